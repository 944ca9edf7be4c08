//! Panel Gauss–Legendre quadrature for integrands that oscillate on the scale
//! of the mean zero spacing.
//!
//! Panels are sized from the local spacing 2π / log(t/2π) and never straddle
//! a caller-supplied breakpoint. Accuracy is controlled by self-convergence:
//! every panel is halved until two successive levels agree.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::summation::Neumaier;

/// Panel layout and convergence policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Panels per mean zero gap.
    pub base_step_factor: f64,
    /// Maximum number of halvings after the base level.
    pub refinement_limit: u32,
    /// Gauss–Legendre order per panel.
    pub order: usize,
    /// Accepted relative change between successive levels, measured against
    /// the integral of |f|.
    pub rel_change_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            base_step_factor: 4.0,
            refinement_limit: 6,
            order: 8,
            rel_change_tol: 1e-3,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.base_step_factor.is_finite() && self.base_step_factor >= 4.0) {
            return Err(Error::Parameter(format!(
                "base_step_factor must be >= 4, got {}",
                self.base_step_factor
            )));
        }
        if !(2..=MAX_ORDER).contains(&self.order) {
            return Err(Error::Parameter(format!(
                "Gauss-Legendre order must be in 2..={MAX_ORDER}, got {}",
                self.order
            )));
        }
        if !(self.rel_change_tol > 0.0 && self.rel_change_tol < 1.0) {
            return Err(Error::Parameter(format!(
                "rel_change_tol must lie in (0, 1), got {}",
                self.rel_change_tol
            )));
        }
        Ok(())
    }

    /// Same policy with each base panel split in two.
    pub fn halved(&self) -> Self {
        Self {
            base_step_factor: 2.0 * self.base_step_factor,
            ..*self
        }
    }
}

/// Result of a converged panel quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// ∫|f| at the accepted level.
    pub abs_integral: f64,
    /// |I_final - I_previous|, the self-convergence estimate.
    pub change: f64,
    /// Panels at the accepted level.
    pub panels: usize,
}

pub const MAX_ORDER: usize = 32;

/// Nodes and weights on [-1, 1].
pub fn gauss_legendre(order: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static RULES: OnceLock<Vec<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    let rules = RULES.get_or_init(|| (0..=MAX_ORDER).map(build_rule).collect());
    &rules[order]
}

fn build_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
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
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Mean distance between consecutive zero ordinates near height t, capped so
/// panels stay reasonable where the density formula degenerates.
pub fn mean_zero_spacing(t: f64) -> f64 {
    TAU / (t.abs() / TAU).ln().max(1.0)
}

/// Base panel edges on [lo, hi] with forced edges at `breaks` (any order;
/// points outside the open interval are ignored).
pub fn panel_edges(lo: f64, hi: f64, breaks: &[f64], base_step_factor: f64) -> Vec<f64> {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&b| b > lo && b < hi).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.push(hi);
    let mut edges = vec![lo];
    let mut start = lo;
    for &end in &cuts {
        let mut t = start;
        while t < end {
            let w = mean_zero_spacing(t) / base_step_factor;
            let remaining = end - t;
            // avoid a sliver at the end of a segment
            let next = if remaining <= 1.5 * w { end } else { t + w };
            edges.push(next);
            t = next;
        }
        start = end;
    }
    edges
}

fn panel_sum<F>(f: &F, a: f64, b: f64, splits: usize, order: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let (x, w) = gauss_legendre(order);
    let mut val = Neumaier::new();
    let mut abs = Neumaier::new();
    let h = (b - a) / splits as f64;
    for j in 0..splits {
        let lo = a + h * j as f64;
        let hi = if j + 1 == splits { b } else { lo + h };
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (xi, wi) in x.iter().zip(w) {
            let v = f(mid + half * xi)?;
            if !v.is_finite() {
                return Err(Error::Numeric(format!("non-finite integrand at t = {}", mid + half * xi)));
            }
            val.add(wi * half * v);
            abs.add(wi * half * v.abs());
        }
    }
    Ok((val.value(), abs.value()))
}

fn level_sum<F>(f: &F, edges: &[f64], splits: usize, order: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let parts: Vec<Result<(f64, f64)>> = edges
        .par_windows(2)
        .map(|e| panel_sum(f, e[0], e[1], splits, order))
        .collect();
    let mut val = Neumaier::new();
    let mut abs = Neumaier::new();
    for p in parts {
        let (v, a) = p?;
        val.add(v);
        abs.add(a);
    }
    Ok((val.value(), abs.value()))
}

/// ∫_lo^hi f(t) dt with panels split at `breaks`.
pub fn integrate<F>(f: F, lo: f64, hi: f64, breaks: &[f64], spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    spec.validate()?;
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(Error::Parameter(format!("bad integration range [{lo}, {hi}]")));
    }
    if hi == lo {
        return Ok(QuadResult {
            value: 0.0,
            abs_integral: 0.0,
            change: 0.0,
            panels: 0,
        });
    }
    let edges = panel_edges(lo, hi, breaks, spec.base_step_factor);
    let (mut prev, _) = level_sum(&f, &edges, 1, spec.order)?;
    let mut splits = 1;
    for _ in 0..spec.refinement_limit.max(1) {
        splits *= 2;
        let (cur, abs) = level_sum(&f, &edges, splits, spec.order)?;
        let change = (cur - prev).abs();
        if change <= spec.rel_change_tol * abs || change <= f64::MIN_POSITIVE {
            return Ok(QuadResult {
                value: cur,
                abs_integral: abs,
                change,
                panels: (edges.len() - 1) * splits,
            });
        }
        prev = cur;
    }
    Err(Error::Quadrature(format!(
        "no self-convergence on [{lo}, {hi}] after {} halvings",
        spec.refinement_limit
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_integrate_polynomials_exactly() {
        for n in [2usize, 5, 8, 16] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            let deg = 2 * n - 1;
            let q: f64 = x.iter().zip(w).map(|(xi, wi)| wi * xi.powi(deg as i32 - 1)).sum();
            let exact = 2.0 / deg as f64;
            assert!((q - exact).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn edges_respect_breaks() {
        let e = panel_edges(100.0, 110.0, &[103.3, 99.0, 107.0, 107.0], 4.0);
        assert_eq!(e[0], 100.0);
        assert_eq!(*e.last().unwrap(), 110.0);
        assert!(e.contains(&103.3) && e.contains(&107.0));
        assert!(e.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn integrates_oscillatory_function() {
        let spec = QuadratureSpec::default();
        let r = integrate(|t| Ok((3.0 * t).cos()), 0.0, 50.0, &[], &spec).unwrap();
        assert!((r.value - (150.0f64).sin() / 3.0).abs() < 1e-12);
    }

    #[test]
    fn step_function_is_exact_with_breaks() {
        let spec = QuadratureSpec::default();
        let f = |t: f64| Ok(if t < 2.5 { 1.0 } else { 3.0 });
        let r = integrate(f, 0.0, 4.0, &[2.5], &spec).unwrap();
        assert!((r.value - (2.5 + 4.5)).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_spec() {
        let spec = QuadratureSpec {
            base_step_factor: 2.0,
            ..Default::default()
        };
        assert!(matches!(integrate(|_| Ok(1.0), 0.0, 1.0, &[], &spec), Err(Error::Parameter(_))));
    }

    #[test]
    fn additive_over_split_ranges() {
        let spec = QuadratureSpec::default();
        let f = |t: f64| Ok((t * t.ln()).sin() + 1.0);
        let whole = integrate(f, 10.0, 30.0, &[20.0], &spec).unwrap().value;
        let a = integrate(f, 10.0, 20.0, &[], &spec).unwrap().value;
        let b = integrate(f, 20.0, 30.0, &[], &spec).unwrap().value;
        assert!((whole - a - b).abs() < 1e-9);
    }
}
