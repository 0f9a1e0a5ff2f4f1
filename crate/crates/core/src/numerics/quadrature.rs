//! Gauss-Legendre rules and composite panels.

use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule on `[-1, 1]`, roots of `P_n` by Newton iteration.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(c + h * x))
            .sum::<f64>()
            * h
    }

    /// Nodes and weights of this rule mapped onto `n_panels` equal panels of `[a, b]`.
    pub fn panels(&self, a: f64, b: f64, n_panels: usize) -> (Vec<f64>, Vec<f64>) {
        let n_panels = n_panels.max(1);
        let width = (b - a) / n_panels as f64;
        let mut xs = Vec::with_capacity(n_panels * self.nodes.len());
        let mut ws = Vec::with_capacity(xs.capacity());
        for p in 0..n_panels {
            let lo = a + width * p as f64;
            let c = lo + 0.5 * width;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                xs.push(c + 0.5 * width * x);
                ws.push(0.5 * width * w);
            }
        }
        (xs, ws)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule on `[a, b]` with panels no wider than `max_panel`.
pub fn composite_gauss_legendre<F: Fn(f64) -> f64>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    max_panel: f64,
    f: F,
) -> f64 {
    let n = ((b - a).abs() / max_panel).ceil().max(1.0) as usize;
    let (xs, ws) = rule.panels(a, b, n);
    xs.iter().zip(&ws).map(|(x, w)| w * f(*x)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = GaussLegendre::new(10);
        for deg in 0..20 {
            let got = rule.integrate(0.0, 1.0, |x| x.powi(deg));
            let want = 1.0 / (deg as f64 + 1.0);
            assert!((got - want).abs() < 1e-14, "degree {deg}: {got}");
        }
        assert!((rule.weights().iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn composite_exponential() {
        let rule = GaussLegendre::new(10);
        let got = composite_gauss_legendre(&rule, 0.0, 40.0, 0.25, |t| (-2.0 * t).exp());
        let want = 0.5 * (1.0 - (-80f64).exp());
        assert!((got - want).abs() < 1e-15);
    }
}
