//! Primes, Selberg's approximation R(t) = S(t) + (1/π) Σ_{p≤y} p^{-1/2} sin(t log p),
//! its even moments, and the measure of the set where |R| is large.
//!
//! S(t) is taken from a zero cache through N(t) - 1 - ϑ(t)/π, so R is
//! right-continuous at ordinates.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::argument::s_of_t_counting;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadResult, QuadratureSpec};
use crate::summation::Neumaier;
use crate::zeros::ZeroCache;

pub const SIEVE_MAX: u64 = 100_000_000;
const SEGMENT: usize = 1 << 18;

/// All primes up to `limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    pub limit: u64,
    pub primes: Vec<u32>,
}

impl PrimeTable {
    /// Primes p ≤ x.
    pub fn up_to(&self, x: f64) -> Result<&[u32]> {
        if x > self.limit as f64 {
            return Err(Error::Parameter(format!(
                "prime table stops at {}, need primes up to {x}",
                self.limit
            )));
        }
        let k = self.primes.partition_point(|&p| (p as f64) <= x);
        Ok(&self.primes[..k])
    }
}

fn simple_sieve(limit: usize) -> Vec<u32> {
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for n in 2..=limit {
        if !composite[n] {
            out.push(n as u32);
            let mut k = n * n;
            while k <= limit {
                composite[k] = true;
                k += n;
            }
        }
    }
    out
}

/// Segmented sieve of Eratosthenes.
pub fn sieve(limit: u64) -> Result<PrimeTable> {
    if !(2..=SIEVE_MAX).contains(&limit) {
        return Err(Error::Parameter(format!(
            "sieve limit must lie in [2, {SIEVE_MAX}], got {limit}"
        )));
    }
    let root = (limit as f64).sqrt() as usize + 1;
    let base = simple_sieve(root);
    let mut primes: Vec<u32> = base.iter().copied().filter(|&p| (p as u64) <= limit).collect();
    let mut lo = root as u64 + 1;
    let mut marks = vec![false; SEGMENT];
    while lo <= limit {
        let hi = (lo + SEGMENT as u64 - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        marks[..len].fill(false);
        for &p in &base {
            let p = p as u64;
            if p * p > hi {
                break;
            }
            let mut k = lo.div_ceil(p).max(p) * p;
            while k <= hi {
                marks[(k - lo) as usize] = true;
                k += p;
            }
        }
        primes.extend((0..len).filter(|&i| !marks[i]).map(|i| (lo + i as u64) as u32));
        lo = hi + 1;
    }
    Ok(PrimeTable { limit, primes })
}

/// Length y of the prime sum in R(t), tied to a reference height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelbergParams {
    pub delta: f64,
    pub t_ref: f64,
    pub y: f64,
}

pub const DEFAULT_DELTA: f64 = 0.05;

impl SelbergParams {
    /// y = t_ref^delta with delta in (0, 1/4].
    pub fn from_delta(delta: f64, t_ref: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 0.25) {
            return Err(Error::Parameter(format!("delta must lie in (0, 1/4], got {delta}")));
        }
        if !(t_ref.is_finite() && t_ref > 1.0) {
            return Err(Error::Parameter(format!("t_ref must exceed 1, got {t_ref}")));
        }
        Ok(Self {
            delta,
            t_ref,
            y: t_ref.powf(delta),
        })
    }

    /// Fix y directly; delta is reported as log y / log t_ref.
    pub fn y_absolute(y: f64, t_ref: f64) -> Result<Self> {
        if !(y.is_finite() && y >= 1.0) {
            return Err(Error::Parameter(format!("y must be at least 1, got {y}")));
        }
        if !(t_ref.is_finite() && t_ref > 1.0) {
            return Err(Error::Parameter(format!("t_ref must exceed 1, got {t_ref}")));
        }
        Ok(Self {
            delta: y.ln() / t_ref.ln(),
            t_ref,
            y,
        })
    }

    /// False when y < 2 and the prime sum is empty.
    pub fn has_primes(&self) -> bool {
        self.y >= 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeWeight {
    /// Σ p^{-1/2} sin(t log p)
    InvSqrtSin,
    /// Σ p^{-1/2} log p cos(t log p)
    LogCos,
}

pub fn prime_trig_sum(t: f64, y: f64, weight: PrimeWeight, primes: &PrimeTable) -> Result<f64> {
    let mut acc = Neumaier::new();
    for &p in primes.up_to(y)? {
        let lp = (p as f64).ln();
        let amp = (p as f64).sqrt().recip();
        acc.add(match weight {
            PrimeWeight::InvSqrtSin => amp * (t * lp).sin(),
            PrimeWeight::LogCos => amp * lp * (t * lp).cos(),
        });
    }
    Ok(acc.value())
}

/// R(t), right-continuous at ordinates.
pub fn r_of_t(t: f64, params: &SelbergParams, primes: &PrimeTable, cache: &ZeroCache) -> Result<f64> {
    let s = s_of_t_counting(t, cache)?;
    Ok(s + prime_trig_sum(t, params.y, PrimeWeight::InvSqrtSin, primes)? / PI)
}

/// Panels must resolve sin(t log y): at most 0.5 / log y wide.
fn resolving_spec(t: f64, params: &SelbergParams, quad: &QuadratureSpec) -> QuadratureSpec {
    let mut spec = *quad;
    if params.has_primes() {
        let needed = crate::quadrature::mean_zero_spacing(t) * params.y.ln() / 0.5;
        spec.base_step_factor = spec.base_step_factor.max(needed);
    }
    spec
}

/// ∫_T^{T+H} R(t)^{2m} dt with panels split at the cached ordinates.
pub fn moment_r(
    t: f64,
    h: f64,
    two_m: u32,
    params: &SelbergParams,
    primes: &PrimeTable,
    cache: &ZeroCache,
    quad: &QuadratureSpec,
) -> Result<QuadResult> {
    if !matches!(two_m, 2 | 4 | 6 | 8) {
        return Err(Error::Parameter(format!("two_m must be 2, 4, 6 or 8, got {two_m}")));
    }
    if !(h >= 0.0 && t.is_finite() && h.is_finite()) {
        return Err(Error::Parameter(format!("bad interval [{t}, {t}+{h}]")));
    }
    cache.require(t, t + h)?;
    primes.up_to(params.y)?;
    let breaks = cache.ordinates_in(t, t + h)?;
    let spec = resolving_spec(t, params, quad);
    integrate(
        |u| Ok(r_of_t(u, params, primes, cache)?.powi(two_m as i32)),
        t,
        t + h,
        &breaks,
        &spec,
    )
}

/// Side conditions of the 2m-th moment bound for R, with x = T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentBoundCheck {
    pub m: u32,
    pub epsilon: f64,
    /// (e^37 π^-2 ε^-3 m²)^m H
    pub bound: f64,
    pub m_upper: f64,
    pub m_ok: bool,
    pub y_lower: f64,
    pub y_upper: f64,
    pub y_ok: bool,
    /// Shortest admissible interval T^{27/82+ε}.
    pub h_required: f64,
    pub h_ok: bool,
}

impl MomentBoundCheck {
    pub fn new(t: f64, h: f64, m: u32, epsilon: f64, params: &SelbergParams) -> Result<Self> {
        if m == 0 || !(epsilon > 0.0) {
            return Err(Error::Parameter(format!("need m >= 1 and epsilon > 0, got {m}, {epsilon}")));
        }
        let mf = m as f64;
        let log_bound = mf * (37.0 - 2.0 * PI.ln() - 3.0 * epsilon.ln() + 2.0 * mf.ln()) + h.ln();
        let m_upper = t.ln() / 192.0;
        let y_lower = t.powf(1.0 / (4.0 * mf));
        let y_upper = t.powf(1.0 / mf);
        let h_required = t.powf(27.0 / 82.0 + epsilon);
        Ok(Self {
            m,
            epsilon,
            bound: log_bound.exp(),
            m_upper,
            m_ok: m > 1 && mf <= m_upper,
            y_lower,
            y_upper,
            y_ok: y_lower < params.y && params.y <= y_upper,
            h_required,
            h_ok: h >= h_required,
        })
    }

    pub fn all_satisfied(&self) -> bool {
        self.m_ok && self.y_ok && self.h_ok
    }
}

/// Exceedance level V and grid for measuring {t : |R(t)| >= V}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExceedanceSpec {
    pub level: f64,
    pub m: u32,
    pub grid_step: f64,
}

impl ExceedanceSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.level >= 0.0 && self.level.is_finite()) {
            return Err(Error::Parameter(format!("level must be >= 0, got {}", self.level)));
        }
        if !(1..=4).contains(&self.m) {
            return Err(Error::Parameter(format!("m must lie in 1..=4, got {}", self.m)));
        }
        if !(self.grid_step > 0.0 && self.grid_step <= 0.01) {
            return Err(Error::Parameter(format!(
                "grid_step must lie in (0, 0.01], got {}",
                self.grid_step
            )));
        }
        Ok(())
    }
}

/// V = c log log T.
pub fn loglog_level(c: f64, t: f64) -> Result<f64> {
    if !(t > std::f64::consts::E) {
        return Err(Error::Domain(format!("log log T needs T > e, got {t}")));
    }
    Ok(c * t.ln().ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exceedance {
    /// Grid estimate of the measure of {|R| >= V}.
    pub measure: f64,
    /// Cell width actually used.
    pub grid_step: f64,
    /// V^{-2m} ∫R^{2m} by quadrature.
    pub certificate: f64,
    /// V^{-2m} times the grid Riemann sum of R^{2m}; never below `measure`.
    pub grid_certificate: f64,
    /// One grid cell plus the quadrature/grid discrepancy, scaled by V^{-2m}.
    pub slack: f64,
    pub moment: f64,
}

impl Exceedance {
    /// measure <= certificate + slack.
    pub fn chebyshev_holds(&self) -> bool {
        self.measure <= self.grid_certificate && self.measure <= self.certificate + self.slack
    }
}

pub fn exceedance_measure(
    t: f64,
    h: f64,
    spec: &ExceedanceSpec,
    params: &SelbergParams,
    primes: &PrimeTable,
    cache: &ZeroCache,
    quad: &QuadratureSpec,
) -> Result<Exceedance> {
    spec.validate()?;
    if !(h > 0.0) {
        return Err(Error::Parameter(format!("H must be positive, got {h}")));
    }
    cache.require(t, t + h)?;
    let cells = (h / spec.grid_step).ceil() as usize;
    let step = h / cells as f64;
    let two_m = 2 * spec.m as i32;
    let level = spec.level;
    // (cells at or above V, Σ R^{2m})
    let (hits, power_sum) = (0..cells)
        .into_par_iter()
        .with_min_len(256)
        .map(|k| -> Result<(usize, f64)> {
            let r = r_of_t(t + (k as f64 + 0.5) * step, params, primes, cache)?;
            Ok((usize::from(r.abs() >= level), r.powi(two_m)))
        })
        .try_fold(|| (0usize, 0.0f64), |acc, v| v.map(|(a, b)| (acc.0 + a, acc.1 + b)))
        .try_reduce(|| (0, 0.0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    let moment = moment_r(t, h, two_m as u32, params, primes, cache, quad)?.value;
    let grid_moment = step * power_sum;
    let scale = level.powi(-two_m);
    Ok(Exceedance {
        measure: step * hits as f64,
        grid_step: step,
        certificate: scale * moment,
        grid_certificate: scale * grid_moment,
        slack: step + scale * (grid_moment - moment).abs(),
        moment,
    })
}

/// (Σ_{p≤x} log p / p, Σ_{p≤x} 1/p).
pub fn mertens_sums(x: f64, primes: &PrimeTable) -> Result<(f64, f64)> {
    let mut log_sum = Neumaier::new();
    let mut inv_sum = Neumaier::new();
    for &p in primes.up_to(x)? {
        let p = p as f64;
        log_sum.add(p.ln() / p);
        inv_sum.add(p.recip());
    }
    Ok((log_sum.value(), inv_sum.value()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeros::{scan_zeros, ScanSpec};
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn table() -> &'static PrimeTable {
        static T: OnceLock<PrimeTable> = OnceLock::new();
        T.get_or_init(|| sieve(1_000_000).unwrap())
    }

    fn low_cache() -> &'static ZeroCache {
        static C: OnceLock<ZeroCache> = OnceLock::new();
        C.get_or_init(|| scan_zeros(0.0, 60.0, &ScanSpec::default()).unwrap())
    }

    fn is_prime_by_trial(n: u32) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn small_tables() {
        assert_eq!(sieve(10).unwrap().primes, vec![2, 3, 5, 7]);
        assert_eq!(sieve(2).unwrap().primes, vec![2]);
        assert!(sieve(1).is_err());
        assert!(sieve(SIEVE_MAX + 1).is_err());
    }

    #[test]
    fn prime_count_to_a_million() {
        let t = table();
        assert_eq!(t.primes.len(), 78_498);
        // crosses several segment boundaries
        for lo in [262_000u32, 524_280, 999_000] {
            let got: Vec<u32> = t.primes.iter().copied().filter(|&p| p >= lo && p < lo + 1000).collect();
            let want: Vec<u32> = (lo..lo + 1000).filter(|&n| is_prime_by_trial(n)).collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn trig_sum_special_values() {
        let t = table();
        assert_eq!(prime_trig_sum(0.0, 100.0, PrimeWeight::InvSqrtSin, t).unwrap(), 0.0);
        let direct: f64 = [2.0f64, 3.0, 5.0, 7.0].iter().map(|p| p.ln() / p.sqrt()).sum();
        assert!((prime_trig_sum(0.0, 10.0, PrimeWeight::LogCos, t).unwrap() - direct).abs() < 1e-14);
        let mut four = 0.0;
        for p in [2.0f64, 3.0, 5.0, 7.0] {
            four += (1.0 * p.ln()).sin() / p.sqrt();
        }
        assert!((prime_trig_sum(1.0, 10.0, PrimeWeight::InvSqrtSin, t).unwrap() - four).abs() < 1e-14);
    }

    #[test]
    fn log_cos_is_the_derivative() {
        let t = table();
        let h = 1e-5;
        let f = |u| prime_trig_sum(u, 50.0, PrimeWeight::InvSqrtSin, t).unwrap();
        let fd = (f(100.0 + h) - f(100.0 - h)) / (2.0 * h);
        let exact = prime_trig_sum(100.0, 50.0, PrimeWeight::LogCos, t).unwrap();
        assert!((fd - exact).abs() < 1e-6);
    }

    #[test]
    fn table_too_short() {
        let small = sieve(100).unwrap();
        assert!(prime_trig_sum(1.0, 1000.0, PrimeWeight::LogCos, &small).is_err());
    }

    #[test]
    fn params() {
        let p = SelbergParams::from_delta(0.1, 1000.0).unwrap();
        assert!((p.y - 10f64.powf(0.3)).abs() < 1e-12);
        assert!(!p.has_primes());
        assert!(SelbergParams::from_delta(0.3, 1000.0).is_err());
        assert!(SelbergParams::from_delta(0.0, 1000.0).is_err());
        let q = SelbergParams::y_absolute(100.0, 1e4).unwrap();
        assert!((q.delta - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empty_prime_sum_gives_s() {
        let p = SelbergParams::y_absolute(1.5, 1000.0).unwrap();
        let c = low_cache();
        for t in [20.0, 33.3, 47.0] {
            assert_eq!(r_of_t(t, &p, table(), c).unwrap(), s_of_t_counting(t, c).unwrap());
        }
    }

    #[test]
    fn r_jumps_by_one_at_first_zero() {
        let p = SelbergParams::y_absolute(30.0, 1000.0).unwrap();
        let c = low_cache();
        let g = c.records[0].gamma;
        let jump = r_of_t(g + 1e-9, &p, table(), c).unwrap() - r_of_t(g - 1e-8, &p, table(), c).unwrap();
        assert!((jump - 1.0).abs() < 1e-6);
    }

    #[test]
    fn r_minus_s_is_smooth_between_zeros() {
        let p = SelbergParams::y_absolute(30.0, 1000.0).unwrap();
        let c = low_cache();
        let bound: f64 = table()
            .up_to(30.0)
            .unwrap()
            .iter()
            .map(|&q| (q as f64).ln().powi(2) / (q as f64).sqrt())
            .sum::<f64>()
            / PI;
        let diff = |t| r_of_t(t, &p, table(), c).unwrap() - s_of_t_counting(t, c).unwrap();
        let h = 1e-3;
        // 22 lies between the second and third zeros
        for t in [22.0, 22.5, 23.0] {
            let second = (diff(t + h) - 2.0 * diff(t) + diff(t - h)) / (h * h);
            assert!(second.abs() <= bound * 1.01);
        }
    }

    #[test]
    fn moments_are_positive_and_monotone() {
        let p = SelbergParams::y_absolute(20.0, 50.0).unwrap();
        let q = QuadratureSpec::default();
        let c = low_cache();
        let a = moment_r(15.0, 20.0, 2, &p, table(), c, &q).unwrap().value;
        let b = moment_r(15.0, 40.0, 2, &p, table(), c, &q).unwrap().value;
        assert!(a > 0.0 && b >= a);
        let four = moment_r(15.0, 40.0, 4, &p, table(), c, &q).unwrap().value;
        assert!(four > 0.0);
        assert!(moment_r(15.0, 40.0, 3, &p, table(), c, &q).is_err());
        assert!(matches!(moment_r(15.0, 80.0, 2, &p, table(), c, &q), Err(Error::Coverage(_))));
    }

    #[test]
    fn moment_matches_a_halved_rerun() {
        let p = SelbergParams::y_absolute(20.0, 50.0).unwrap();
        let q = QuadratureSpec::default();
        let c = low_cache();
        let a = moment_r(12.0, 45.0, 2, &p, table(), c, &q).unwrap().value;
        let b = moment_r(12.0, 45.0, 2, &p, table(), c, &q.halved()).unwrap().value;
        assert!((a - b).abs() <= 0.01 * a);
    }

    #[test]
    fn bound_check_flags_desk_scale() {
        let p = SelbergParams::from_delta(0.1, 1000.0).unwrap();
        let chk = MomentBoundCheck::new(1000.0, 200.0, 1, 0.1, &p).unwrap();
        assert!(!chk.m_ok);
        assert!(!chk.all_satisfied());
        let want = (37f64.exp() / (PI * PI) * 1000.0).ln() + 200f64.ln();
        assert!((chk.bound.ln() - want).abs() < 1e-12);
    }

    #[test]
    fn exceedance_edge_levels() {
        let p = SelbergParams::y_absolute(10.0, 50.0).unwrap();
        let q = QuadratureSpec::default();
        let c = low_cache();
        let all = ExceedanceSpec {
            level: 0.0,
            m: 1,
            grid_step: 0.01,
        };
        let e = exceedance_measure(15.0, 30.0, &all, &p, table(), c, &q).unwrap();
        assert!((e.measure - 30.0).abs() < 1e-9);
        let none = ExceedanceSpec { level: 1e6, ..all };
        let e = exceedance_measure(15.0, 30.0, &none, &p, table(), c, &q).unwrap();
        assert_eq!(e.measure, 0.0);
        assert!(e.chebyshev_holds());
        let coarse = ExceedanceSpec { grid_step: 0.1, ..all };
        assert!(exceedance_measure(15.0, 30.0, &coarse, &p, table(), c, &q).is_err());
    }

    #[test]
    fn chebyshev_inequality_on_a_grid_of_levels() {
        let p = SelbergParams::y_absolute(10.0, 50.0).unwrap();
        let q = QuadratureSpec::default();
        let c = low_cache();
        for level in [0.1, 0.3, 0.6, 1.0] {
            for m in 1..=3 {
                let spec = ExceedanceSpec {
                    level,
                    m,
                    grid_step: 0.01,
                };
                let e = exceedance_measure(12.0, 45.0, &spec, &p, table(), c, &q).unwrap();
                assert!(e.chebyshev_holds(), "V = {level}, m = {m}: {e:?}");
            }
        }
    }

    #[test]
    fn mertens() {
        let (l, inv) = mertens_sums(10.0, table()).unwrap();
        assert!((inv - (0.5 + 1.0 / 3.0 + 0.2 + 1.0 / 7.0)).abs() < 1e-5);
        assert!(l > 0.0);
        let (l, _) = mertens_sums(1e4, table()).unwrap();
        let x = 1e4f64.ln();
        assert!(l >= x - 3.0 && l <= x + 1.0);
        assert_eq!(mertens_sums(1.0, table()).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn loglog_helper() {
        assert!((loglog_level(2.0, 1e4).unwrap() - 2.0 * 1e4f64.ln().ln()).abs() < 1e-15);
        assert!(loglog_level(1.0, 2.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn trig_sum_is_odd_and_bounded(t in -1e4f64..1e4, y in 2.0f64..500.0) {
            let tab = table();
            let a = prime_trig_sum(t, y, PrimeWeight::InvSqrtSin, tab).unwrap();
            let b = prime_trig_sum(-t, y, PrimeWeight::InvSqrtSin, tab).unwrap();
            prop_assert!((a + b).abs() < 1e-12);
            let cap: f64 = tab.up_to(y).unwrap().iter().map(|&p| (p as f64).sqrt().recip()).sum();
            prop_assert!(a.abs() <= cap + 1e-12);
        }

        #[test]
        fn sieve_agrees_with_trial_division(limit in 2u64..5000) {
            let got = sieve(limit).unwrap().primes;
            let want: Vec<u32> = (2..=limit as u32).filter(|&n| is_prime_by_trial(n)).collect();
            prop_assert_eq!(got, want);
        }
    }
}
