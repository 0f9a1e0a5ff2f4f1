use mitbag_verify::report::CSV_HEADER;
use mitbag_verify::{emit_table, CheckRecord, Comparison, Format, Provenance, Report, SuiteConfig};
use proptest::prelude::*;

fn config() -> SuiteConfig {
    SuiteConfig::from_json(r#"{"suite":"exterior","output_path":"out.csv","seed":7}"#).unwrap()
}

fn record(i: usize) -> CheckRecord {
    CheckRecord::new(
        "exterior.dtn_l0",
        Comparison::Relative,
        101.0,
        101.0 + i as f64 * 1e-12,
        1e-10,
        Provenance::ClosedForm,
    )
    .at_m(100.0)
}

#[test]
fn single_record_csv() {
    let report = Report::new(config(), vec![record(0)]);
    let text = String::from_utf8(emit_table(&report, Format::Csv)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(
        lines[0],
        "check_id,m,kappa,gauss,sector,expected,observed,abs_error,rel_error,tolerance,pass"
    );
    assert_eq!(
        lines[1],
        "exterior.dtn_l0,1.0000000000000000e2,,,,1.0100000000000000e2,1.0100000000000000e2,0.0000000000000000e0,0.0000000000000000e0,1.0000000000000000e-10,true"
    );
}

#[test]
fn csv_row_count() {
    for n in [0, 1, 5, 40] {
        let report = Report::new(config(), (0..n).map(record).collect());
        let text = String::from_utf8(emit_table(&report, Format::Csv)).unwrap();
        assert_eq!(text.lines().count(), n + 1);
        assert!(text.lines().all(|l| l.split(',').count() == 11));
    }
}

#[test]
fn json_field_order_and_seed() {
    let report = Report::new(config(), vec![record(3)]);
    let text = String::from_utf8(emit_table(&report, Format::Json)).unwrap();
    let config_at = text.find("\"config\"").unwrap();
    let records_at = text.find("\"records\"").unwrap();
    let summary_at = text.find("\"summary\"").unwrap();
    assert!(config_at < records_at && records_at < summary_at);
    assert!(text.contains("\"seed\":7"));
    assert!(text.contains("\"provenance\":\"closed-form\""));
    assert!(text.contains("1.0000000000000000e2"));
}

proptest! {
    #[test]
    fn json_round_trip(
        values in prop::collection::vec((-1e6..1e6f64, -1e3..1e3f64, 0.0..1.0f64, any::<bool>(), 0usize..4), 0..12),
        seed in any::<u64>(),
    ) {
        let mut cfg = config();
        cfg.seed = seed;
        let comparisons = [Comparison::Absolute, Comparison::Relative, Comparison::Upper, Comparison::Lower];
        let records = values
            .iter()
            .enumerate()
            .map(|(i, &(e, o, t, asserted, c))| {
                let r = CheckRecord::new(&format!("check{i}"), comparisons[c], e, o, t, Provenance::Fit);
                let r = if i % 2 == 0 { r.at_curvature(o, t).in_sector(-(i as i32) - 1) } else { r.at_m(e.abs() + 1.0) };
                if asserted { r } else { r.reported_only() }
            })
            .collect();
        let report = Report::new(cfg, records);
        let bytes = emit_table(&report, Format::Json);
        let parsed: Report = serde_json::from_slice(&bytes).unwrap();
        prop_assert_eq!(&parsed, &report);
        prop_assert_eq!(emit_table(&parsed, Format::Json), bytes);
    }
}
