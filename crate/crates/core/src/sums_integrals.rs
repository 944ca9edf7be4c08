//! Sums over zero ordinates and weighted integrals on the critical line:
//! F(T,H), Gonek's shifted sum, ∫|ζ|²S^k, the second and fourth moments, a
//! polynomial fit of the fourth moment, and two integration identities that
//! tie the zero count to S and R.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::argument::s_of_t_counting;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadResult, QuadratureSpec};
use crate::selberg::{prime_trig_sum, r_of_t, PrimeTable, PrimeWeight, SelbergParams};
use crate::summation::Neumaier;
use crate::zeros::ZeroCache;
use crate::zeta_engine::{
    abs_zeta_sq_deriv, hardy_z, hardy_z_deriv, theta_prime_exact, EvalOptions, Method,
};

/// Accuracy of ζ inside quadrature integrands.
pub const INTEGRAND_TARGET: f64 = 1e-9;
/// Accuracy of Z at refined ordinates.
pub const ORDINATE_TARGET: f64 = 1e-12;

fn integrand_opts() -> EvalOptions {
    EvalOptions {
        target_abs_err: INTEGRAND_TARGET,
        method: Method::Auto,
    }
}

/// [T, T+H] with 10 <= T and 0 < H <= T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub t: f64,
    pub h: f64,
}

impl Interval {
    pub fn new(t: f64, h: f64) -> Result<Self> {
        if !(t.is_finite() && t >= 10.0) {
            return Err(Error::Parameter(format!("T must be at least 10, got {t}")));
        }
        if !(h.is_finite() && h > 0.0 && h <= t) {
            return Err(Error::Parameter(format!("need 0 < H <= T, got H = {h} with T = {t}")));
        }
        Ok(Self { t, h })
    }

    pub fn end(&self) -> f64 {
        self.t + self.h
    }

    /// T^{2/3} log^4 T, the shortest H covered by the large-H theorems when
    /// their unspecified constant is 1.
    pub fn theorem_h(&self) -> f64 {
        self.t.powf(2.0 / 3.0) * self.t.ln().powi(4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FSum {
    pub value: f64,
    /// Σ (2 tol |Z'(γ)|)², what refinement error alone can produce.
    pub noise_bound: f64,
    pub zeros: usize,
}

impl FSum {
    pub fn consistent_with_rh(&self) -> bool {
        self.value <= self.noise_bound
    }
}

/// F(T,H) = Σ_{T<γ≤T+H} |ζ(1/2+iγ)|², each term as Z(γ)².
pub fn f_sum(iv: &Interval, cache: &ZeroCache) -> Result<FSum> {
    let records = cache.in_range(iv.t, iv.end())?;
    let opts = EvalOptions {
        target_abs_err: ORDINATE_TARGET,
        method: Method::Auto,
    };
    let terms: Vec<Result<(f64, f64)>> = records
        .par_iter()
        .map(|r| {
            let z = hardy_z(r.gamma, &opts)?;
            Ok((z * z, (2.0 * r.tol * r.z_prime_abs).powi(2)))
        })
        .collect();
    let mut value = Neumaier::new();
    let mut noise = Neumaier::new();
    for term in terms {
        let (v, n) = term?;
        value.add(v);
        noise.add(n);
    }
    Ok(FSum {
        value: value.value(),
        noise_bound: noise.value(),
        zeros: records.len(),
    })
}

/// Parameters of the shifted sum Σ_{0<γ≤T} |ζ(1/2 + i(γ + α/L))|².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GonekSpec {
    pub t: f64,
    pub alpha: f64,
    /// L = log(T/2π) / 2π
    pub l: f64,
}

impl GonekSpec {
    pub fn new(t: f64, alpha: f64) -> Result<Self> {
        if !(t.is_finite() && t > TAU * std::f64::consts::E) {
            return Err(Error::Parameter(format!("T must exceed 2πe, got {t}")));
        }
        let l = (t / TAU).ln() / TAU;
        if !(alpha.abs() <= 0.5 * l) {
            return Err(Error::Parameter(format!("|alpha| must be at most L/2 = {}, got {alpha}", 0.5 * l)));
        }
        Ok(Self { t, alpha, l })
    }

    /// α = c·L, so the shift α/L equals c.
    pub fn with_fraction(t: f64, c: f64) -> Result<Self> {
        let l = (t / TAU).ln() / TAU;
        Self::new(t, c * l)
    }

    pub fn shift(&self) -> f64 {
        self.alpha / self.l
    }
}

pub fn gonek_shifted_sum(spec: &GonekSpec, cache: &ZeroCache) -> Result<f64> {
    if cache.t_min > 0.0 || cache.count_below != 0 {
        return Err(Error::Coverage("the shifted sum needs a cache starting at 0".into()));
    }
    let records = cache.in_range(0.0, spec.t)?;
    let opts = integrand_opts();
    let shift = spec.shift();
    let terms: Vec<Result<f64>> = records
        .par_iter()
        .map(|r| hardy_z(r.gamma + shift, &opts).map(|z| z * z))
        .collect();
    let mut acc = Neumaier::new();
    for v in terms {
        acc.add(v?);
    }
    Ok(acc.value())
}

pub fn gonek_main_term(spec: &GonekSpec) -> f64 {
    let x = PI * spec.alpha;
    let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
    (1.0 - sinc * sinc) * spec.t / TAU * spec.t.ln().powi(2)
}

/// ∫_T^{T+H} |ζ(1/2+it)|² S(t)^k dt for k in {1, 2}. `abs_integral` of the
/// result is ∫|ζ|²|S|^k.
pub fn weighted_integral_s(iv: &Interval, k: u32, quad: &QuadratureSpec, cache: &ZeroCache) -> Result<QuadResult> {
    if !(1..=2).contains(&k) {
        return Err(Error::Parameter(format!("k must be 1 or 2, got {k}")));
    }
    let breaks = cache.ordinates_in(iv.t, iv.end())?;
    let opts = integrand_opts();
    integrate(
        |t| {
            let z = hardy_z(t, &opts)?;
            Ok(z * z * s_of_t_counting(t, cache)?.powi(k as i32))
        },
        iv.t,
        iv.end(),
        &breaks,
        quad,
    )
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
        return Err(Error::Parameter(format!("bad range [{lo}, {hi}]")));
    }
    Ok(())
}

/// ∫ |ζ(1/2+it)|² dt over [lo, hi].
pub fn moment2(lo: f64, hi: f64, quad: &QuadratureSpec) -> Result<QuadResult> {
    check_range(lo, hi)?;
    let opts = integrand_opts();
    integrate(|t| hardy_z(t, &opts).map(|z| z * z), lo, hi, &[], quad)
}

/// ∫ |ζ(1/2+it)|⁴ dt over [lo, hi].
pub fn moment4(lo: f64, hi: f64, quad: &QuadratureSpec) -> Result<QuadResult> {
    check_range(lo, hi)?;
    let opts = integrand_opts();
    integrate(|t| hardy_z(t, &opts).map(|z| z.powi(4)), lo, hi, &[], quad)
}

/// |ζ'(1/2+it)|² = Z'(t)² + ϑ'(t)² Z(t)².
pub fn abs_zeta_deriv_sq(t: f64, opts: &EvalOptions) -> Result<f64> {
    let z = hardy_z(t, opts)?;
    let dz = hardy_z_deriv(t, opts)?;
    let tp = theta_prime_exact(t.abs());
    Ok(dz * dz + tp * tp * z * z)
}

/// ∫ |ζ'(1/2+it)|⁴ dt over [lo, hi].
pub fn moment4_deriv(lo: f64, hi: f64, quad: &QuadratureSpec) -> Result<QuadResult> {
    check_range(lo, hi)?;
    let opts = integrand_opts();
    integrate(|t| abs_zeta_deriv_sq(t, &opts).map(|v| v * v), lo, hi, &[], quad)
}

/// ∫_0^T |ζ|⁴ at each T in `heights` (ascending), accumulated segment by
/// segment.
pub fn moment4_cumulative(heights: &[f64], quad: &QuadratureSpec) -> Result<Vec<f64>> {
    if heights.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("heights must be strictly increasing".into()));
    }
    let mut out = Vec::with_capacity(heights.len());
    let mut acc = Neumaier::new();
    let mut lo = 0.0;
    for &hi in heights {
        acc.add(moment4(lo, hi, quad)?.value);
        out.push(acc.value());
        lo = hi;
    }
    Ok(out)
}

/// Least-squares fit of (1/T)∫_0^T|ζ|⁴ by c0 + c1 log T + ... + c4 log^4 T.
#[derive(Debug, Clone, PartialEq)]
pub struct P4Fit {
    /// c0..c4
    pub coefficients: [f64; 5],
    /// Observed minus fitted, per sample.
    pub residuals: Vec<f64>,
    /// Condition number of the column-equilibrated design matrix.
    pub condition: f64,
}

impl P4Fit {
    pub fn leading(&self) -> f64 {
        self.coefficients[4]
    }

    pub fn rms_residual(&self) -> f64 {
        (self.residuals.iter().map(|r| r * r).sum::<f64>() / self.residuals.len() as f64).sqrt()
    }
}

pub const P4_MAX_CONDITION: f64 = 1e12;
pub const P4_MIN_SAMPLES: usize = 8;

/// Fit from (T, ∫_0^T |ζ|⁴) pairs.
pub fn p4_fit(samples: &[(f64, f64)]) -> Result<P4Fit> {
    if samples.len() < P4_MIN_SAMPLES {
        return Err(Error::Fit(format!(
            "need at least {P4_MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|&(t, v)| !(t > 1.0 && t.is_finite() && v.is_finite())) {
        return Err(Error::Fit("samples need finite T > 1 and finite moments".into()));
    }
    let (t_min, t_max) = samples
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &(t, _)| (a.min(t), b.max(t)));
    if t_max < 10.0 * t_min {
        return Err(Error::Fit(format!("samples span [{t_min}, {t_max}], less than a decade")));
    }
    let n = samples.len();
    let mut design = DMatrix::from_fn(n, 5, |i, j| samples[i].0.ln().powi(j as i32));
    let scales: Vec<f64> = (0..5).map(|j| design.column(j).norm()).collect();
    for (j, s) in scales.iter().enumerate() {
        design.column_mut(j).scale_mut(1.0 / s);
    }
    let rhs = DVector::from_iterator(n, samples.iter().map(|&(t, v)| v / t));
    let svd = design.clone().svd(true, true);
    let sv = &svd.singular_values;
    let condition = sv.max() / sv.min();
    if !(condition <= P4_MAX_CONDITION) {
        return Err(Error::Fit(format!("design matrix condition number {condition:e}")));
    }
    let scaled = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::Fit(format!("least squares failed: {e}")))?;
    let residuals = (&rhs - &design * &scaled).iter().copied().collect();
    let mut coefficients = [0.0; 5];
    for j in 0..5 {
        coefficients[j] = scaled[j] / scales[j];
    }
    Ok(P4Fit {
        coefficients,
        residuals,
        condition,
    })
}

/// Test functions with closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    One,
    Linear,
    /// exp(-1/(1-x²)) with x mapped from [lo, hi] to [-1, 1].
    Bump { lo: f64, hi: f64 },
    /// Z(t)², equal to |ζ(1/2+it)|².
    ZSquared,
}

impl TestFunction {
    fn bump_x(lo: f64, hi: f64, t: f64) -> f64 {
        (2.0 * t - lo - hi) / (hi - lo)
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        Ok(match *self {
            Self::One => 1.0,
            Self::Linear => t,
            Self::Bump { lo, hi } => {
                let x = Self::bump_x(lo, hi, t);
                if x.abs() >= 1.0 {
                    0.0
                } else {
                    (-1.0 / (1.0 - x * x)).exp()
                }
            }
            Self::ZSquared => hardy_z(t, &integrand_opts())?.powi(2),
        })
    }

    pub fn deriv(&self, t: f64) -> Result<f64> {
        Ok(match *self {
            Self::One => 0.0,
            Self::Linear => 1.0,
            Self::Bump { lo, hi } => {
                let x = Self::bump_x(lo, hi, t);
                if x.abs() >= 1.0 {
                    0.0
                } else {
                    let q = 1.0 - x * x;
                    (-1.0 / q).exp() * (-2.0 * x / (q * q)) * 2.0 / (hi - lo)
                }
            }
            Self::ZSquared => {
                let opts = integrand_opts();
                2.0 * hardy_z(t, &opts)? * hardy_z_deriv(t, &opts)?
            }
        })
    }
}

/// Σ f(γ) against ∫ f dN split into its smooth and fluctuating parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StieltjesCheck {
    pub lhs: f64,
    /// ∫ f(t) log(t/2π)/2π dt
    pub i1: f64,
    /// ∫ f dS plus the ∫ f dϑ-remainder/π correction.
    pub i2: f64,
    pub residual: f64,
}

impl StieltjesCheck {
    /// |residual| relative to the larger of |lhs| and |i1|.
    pub fn relative(&self) -> f64 {
        self.residual.abs() / self.lhs.abs().max(self.i1.abs()).max(f64::MIN_POSITIVE)
    }
}

pub fn stieltjes_identity_check(
    iv: &Interval,
    f: &TestFunction,
    quad: &QuadratureSpec,
    cache: &ZeroCache,
) -> Result<StieltjesCheck> {
    let (a, b) = (iv.t, iv.end());
    let ordinates = cache.ordinates_in(a, b)?;
    let mut lhs = Neumaier::new();
    for &g in &ordinates {
        lhs.add(f.value(g)?);
    }
    let lhs = lhs.value();

    let i1 = integrate(|t| Ok(f.value(t)? * (t / TAU).ln() / TAU), a, b, &[], quad)?.value;
    let boundary = f.value(b)? * s_of_t_counting(b, cache)? - f.value(a)? * s_of_t_counting(a, cache)?;
    let s_part = integrate(|t| Ok(s_of_t_counting(t, cache)? * f.deriv(t)?), a, b, &ordinates, quad)?.value;
    // d/dt of the ϑ remainder is ϑ'(t) - log(t/2π)/2
    let correction = integrate(
        |t| Ok(f.value(t)? * (theta_prime_exact(t) - 0.5 * (t / TAU).ln()) / PI),
        a,
        b,
        &[],
        quad,
    )?
    .value;
    let i2 = boundary - s_part + correction;
    Ok(StieltjesCheck {
        lhs,
        i1,
        i2,
        residual: lhs - i1 - i2,
    })
}

/// ∫ |ζ|² dR computed directly and by parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IbpCheck {
    /// Jump sum plus ∫ f R'_smooth.
    pub direct: f64,
    /// [f R] - ∫ R d|ζ|².
    pub by_parts: f64,
    pub boundary: f64,
    /// Σ f(γ) + ∫ f |R'_smooth|, the scale for the residual.
    pub mass: f64,
    pub residual: f64,
}

impl IbpCheck {
    pub fn relative(&self) -> f64 {
        self.residual.abs() / self.mass.max(f64::MIN_POSITIVE)
    }
}

/// Derivative accuracy for d|ζ|²/dt inside the by-parts integral.
const IBP_DERIV_TARGET: f64 = 1e-8;

pub fn ibp_identity_check(
    iv: &Interval,
    quad: &QuadratureSpec,
    cache: &ZeroCache,
    params: &SelbergParams,
    primes: &PrimeTable,
) -> Result<IbpCheck> {
    let (a, b) = (iv.t, iv.end());
    let ordinates = cache.ordinates_in(a, b)?;
    primes.up_to(params.y)?;
    let f = TestFunction::ZSquared;
    let y = params.y;

    let mut jumps = Neumaier::new();
    for &g in &ordinates {
        jumps.add(f.value(g)?);
    }
    let jumps = jumps.value();
    let smooth_slope = |t: f64| -> Result<f64> {
        Ok((prime_trig_sum(t, y, PrimeWeight::LogCos, primes)? - theta_prime_exact(t)) / PI)
    };
    let smooth = integrate(|t| Ok(f.value(t)? * smooth_slope(t)?), a, b, &[], quad)?;
    let direct = jumps + smooth.value;

    let boundary = f.value(b)? * r_of_t(b, params, primes, cache)? - f.value(a)? * r_of_t(a, params, primes, cache)?;
    let parts = integrate(
        |t| Ok(r_of_t(t, params, primes, cache)? * abs_zeta_sq_deriv(t, IBP_DERIV_TARGET)?),
        a,
        b,
        &ordinates,
        quad,
    )?;
    let by_parts = boundary - parts.value;
    Ok(IbpCheck {
        direct,
        by_parts,
        boundary,
        mass: jumps + smooth.abs_integral,
        residual: direct - by_parts,
    })
}

/// The by-parts identity with R replaced by a constant, where dR = 0 and the
/// residual is pure quadrature noise.
pub fn ibp_constant_check(iv: &Interval, value: f64, quad: &QuadratureSpec) -> Result<IbpCheck> {
    let (a, b) = (iv.t, iv.end());
    let f = TestFunction::ZSquared;
    let boundary = value * (f.value(b)? - f.value(a)?);
    let parts = integrate(|t| Ok(value * abs_zeta_sq_deriv(t, IBP_DERIV_TARGET)?), a, b, &[], quad)?;
    let by_parts = boundary - parts.value;
    Ok(IbpCheck {
        direct: 0.0,
        by_parts,
        boundary,
        mass: parts.abs_integral,
        residual: -by_parts,
    })
}

/// T (log(T/2π) + 2C₀ - 1).
pub fn mean_square_main_term(t: f64) -> f64 {
    t * ((t / TAU).ln() + 2.0 * crate::special::euler_gamma() - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeros::{scan_zeros, ScanSpec};
    use crate::zeta_engine::zeta_deriv_halfline;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn cache() -> &'static ZeroCache {
        static C: OnceLock<ZeroCache> = OnceLock::new();
        C.get_or_init(|| scan_zeros(0.0, 200.0, &ScanSpec::default()).unwrap())
    }

    fn primes() -> &'static PrimeTable {
        static P: OnceLock<PrimeTable> = OnceLock::new();
        P.get_or_init(|| crate::selberg::sieve(10_000).unwrap())
    }

    #[test]
    fn interval_validation() {
        assert!(Interval::new(5.0, 1.0).is_err());
        assert!(Interval::new(100.0, 0.0).is_err());
        assert!(Interval::new(100.0, 150.0).is_err());
        let iv = Interval::new(100.0, 50.0).unwrap();
        assert_eq!(iv.end(), 150.0);
        assert!(iv.theorem_h() > iv.h);
    }

    #[test]
    fn f_sum_is_noise() {
        let iv = Interval::new(100.0, 90.0).unwrap();
        let f = f_sum(&iv, cache()).unwrap();
        assert!(f.zeros > 30);
        assert!(f.consistent_with_rh(), "{f:?}");
        let empty = Interval::new(14.5, 6.0).unwrap();
        let f = f_sum(&empty, cache()).unwrap();
        assert_eq!((f.value, f.zeros), (0.0, 0));
        let far = Interval::new(150.0, 100.0).unwrap();
        assert!(matches!(f_sum(&far, cache()), Err(Error::Coverage(_))));
    }

    #[test]
    fn f_sum_scales_with_tolerance_squared() {
        let coarse = ScanSpec {
            tol: 1e-6,
            ..Default::default()
        };
        let fine = ScanSpec {
            tol: 1e-8,
            ..Default::default()
        };
        let iv = Interval::new(100.0, 100.0).unwrap();
        let a = f_sum(&iv, &scan_zeros(100.0, 200.0, &coarse).unwrap()).unwrap().value;
        let b = f_sum(&iv, &scan_zeros(100.0, 200.0, &fine).unwrap()).unwrap().value;
        assert!(a / b > 1e3, "{a} / {b}");
    }

    #[test]
    fn f_sum_is_additive() {
        let whole = f_sum(&Interval::new(100.0, 80.0).unwrap(), cache()).unwrap();
        let a = f_sum(&Interval::new(100.0, 40.0).unwrap(), cache()).unwrap();
        let b = f_sum(&Interval::new(140.0, 40.0).unwrap(), cache()).unwrap();
        assert!((whole.value - a.value - b.value).abs() <= 1e-9 * whole.value.max(1e-300));
        assert_eq!(whole.zeros, a.zeros + b.zeros);
    }

    #[test]
    fn gonek_terms() {
        let s = GonekSpec::new(200.0, 0.0).unwrap();
        assert_eq!(gonek_main_term(&s), 0.0);
        let l = s.l;
        assert!(GonekSpec::new(200.0, 0.6 * l).is_err());
        let p = GonekSpec::new(200.0, 0.4 * l).unwrap();
        let m = GonekSpec::new(200.0, -0.4 * l).unwrap();
        assert_eq!(gonek_main_term(&p), gonek_main_term(&m));
        let half = GonekSpec::with_fraction(200.0, 0.5).unwrap();
        assert!((half.shift() - 0.5).abs() < 1e-15);
        assert!(gonek_main_term(&half).is_finite());
    }

    #[test]
    fn gonek_sum_within_slack() {
        for c in [0.0, 0.25, 0.5] {
            let s = GonekSpec::with_fraction(200.0, c).unwrap();
            let sum = gonek_shifted_sum(&s, cache()).unwrap();
            let main = gonek_main_term(&s);
            assert!((sum - main).abs() <= 5.0 * 200.0 * 200f64.ln(), "c = {c}");
        }
        let s = GonekSpec::with_fraction(200.0, 0.0).unwrap();
        assert!(gonek_shifted_sum(&s, cache()).unwrap() < 1e-12);
    }

    #[test]
    fn weighted_integrals() {
        let iv = Interval::new(100.0, 100.0).unwrap();
        let q = QuadratureSpec::default();
        let one = weighted_integral_s(&iv, 1, &q, cache()).unwrap();
        assert!(one.value.abs() < one.abs_integral);
        let two = weighted_integral_s(&iv, 2, &q, cache()).unwrap();
        assert!(two.value >= 0.0);
        assert!(weighted_integral_s(&iv, 3, &q, cache()).is_err());
    }

    #[test]
    fn mean_square_at_small_height() {
        let q = QuadratureSpec::default();
        let m = moment2(0.0, 200.0, &q).unwrap().value;
        assert!((m / mean_square_main_term(200.0) - 1.0).abs() < 0.05);
    }

    #[test]
    fn moments_are_additive_and_monotone() {
        let q = QuadratureSpec::default();
        for f in [moment2, moment4, moment4_deriv] {
            let whole = f(60.0, 140.0, &q).unwrap().value;
            let a = f(60.0, 100.0, &q).unwrap().value;
            let b = f(100.0, 140.0, &q).unwrap().value;
            assert!((whole - a - b).abs() <= 1e-9 * whole);
            assert!(a > 0.0 && b > 0.0);
        }
        assert!(moment2(10.0, 5.0, &q).is_err());
    }

    #[test]
    fn halving_changes_moments_little() {
        let q = QuadratureSpec::default();
        let a = moment4(100.0, 150.0, &q).unwrap().value;
        let b = moment4(100.0, 150.0, &q.halved()).unwrap().value;
        assert!((a - b).abs() < 1e-3 * a);
    }

    #[test]
    fn derivative_modulus_matches_cauchy() {
        let opts = integrand_opts();
        for t in [30.0, 77.7, 150.2] {
            let a = abs_zeta_deriv_sq(t, &opts).unwrap();
            let b = zeta_deriv_halfline(t, 1e-11).unwrap().norm_sqr();
            assert!((a - b).abs() < 1e-6 * b.max(1.0), "t = {t}: {a} vs {b}");
        }
    }

    #[test]
    fn cumulative_matches_direct() {
        let q = QuadratureSpec::default();
        let c = moment4_cumulative(&[50.0, 80.0], &q).unwrap();
        let d = moment4(0.0, 80.0, &q).unwrap().value;
        assert!((c[1] - d).abs() < 1e-9 * d);
        assert!(moment4_cumulative(&[80.0, 50.0], &q).is_err());
    }

    #[test]
    fn p4_recovers_exact_polynomial() {
        let coef = [0.3, -1.2, 0.7, 0.11, 0.05066];
        let samples: Vec<(f64, f64)> = (0..12)
            .map(|i| {
                let t = 500.0 * 20f64.powf(i as f64 / 11.0);
                let l = t.ln();
                let p: f64 = coef.iter().enumerate().map(|(k, c)| c * l.powi(k as i32)).sum();
                (t, t * p)
            })
            .collect();
        let fit = p4_fit(&samples).unwrap();
        for k in 0..5 {
            assert!((fit.coefficients[k] - coef[k]).abs() < 1e-9 * coef[0].abs().max(1.0), "c{k}");
        }
        assert!(fit.rms_residual() < 1e-10);
    }

    #[test]
    fn p4_rejects_bad_samples() {
        let few: Vec<(f64, f64)> = (1..5).map(|i| (1000.0 * i as f64, 1.0)).collect();
        assert!(matches!(p4_fit(&few), Err(Error::Fit(_))));
        let narrow: Vec<(f64, f64)> = (1..10).map(|i| (1000.0 + i as f64, 1.0)).collect();
        assert!(matches!(p4_fit(&narrow), Err(Error::Fit(_))));
    }

    #[test]
    fn stieltjes_constant_function() {
        let iv = Interval::new(100.0, 60.0).unwrap();
        let q = QuadratureSpec::default();
        let c = stieltjes_identity_check(&iv, &TestFunction::One, &q, cache()).unwrap();
        let count = (cache().count_le(160.0).unwrap() - cache().count_le(100.0).unwrap()) as f64;
        assert_eq!(c.lhs, count);
        assert!((c.i1 + c.i2 - count).abs() < 1e-6);
    }

    #[test]
    fn stieltjes_smooth_functions() {
        let iv = Interval::new(100.0, 60.0).unwrap();
        let q = QuadratureSpec::default();
        for f in [TestFunction::Linear, TestFunction::Bump { lo: 100.0, hi: 160.0 }] {
            let c = stieltjes_identity_check(&iv, &f, &q, cache()).unwrap();
            assert!(c.relative() < 1e-5, "{f:?}: {c:?}");
        }
    }

    #[test]
    fn stieltjes_reproduces_f_sum() {
        let iv = Interval::new(100.0, 40.0).unwrap();
        let q = QuadratureSpec::default();
        let c = stieltjes_identity_check(&iv, &TestFunction::ZSquared, &q, cache()).unwrap();
        let f = f_sum(&iv, cache()).unwrap();
        assert!((c.lhs - f.value).abs() <= 1e-12);
        assert!((c.i1 + c.i2).abs() < 1e-5 * c.i1.abs(), "{c:?}");
    }

    #[test]
    fn ibp_residual_is_small() {
        let iv = Interval::new(100.0, 20.0).unwrap();
        let q = QuadratureSpec::default();
        let p = SelbergParams::y_absolute(20.0, 100.0).unwrap();
        let c = ibp_identity_check(&iv, &q, cache(), &p, primes()).unwrap();
        assert!(c.relative() < 1e-3, "{c:?}");
        let k = ibp_constant_check(&iv, 0.7, &q).unwrap();
        assert!(k.relative() < 1e-6, "{k:?}");
    }

    #[test]
    fn squared_modulus_derivative_matches_finite_differences() {
        let opts = integrand_opts();
        let h = 1e-4;
        for k in 0..20 {
            let t = 20.0 + 9.1 * k as f64;
            let f = |u: f64| hardy_z(u, &opts).unwrap().powi(2);
            let fd = (f(t + h) - f(t - h)) / (2.0 * h);
            let exact = abs_zeta_sq_deriv(t, 1e-11).unwrap();
            assert!((fd - exact).abs() < 1e-5 * (1.0 + exact.abs()), "t = {t}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn gonek_main_term_is_even_and_bounded(t in 100.0f64..1e5, c in 0.0f64..0.5) {
            let p = GonekSpec::with_fraction(t, c).unwrap();
            let m = GonekSpec::with_fraction(t, -c).unwrap();
            prop_assert_eq!(gonek_main_term(&p), gonek_main_term(&m));
            let v = gonek_main_term(&p);
            prop_assert!(v >= 0.0 && v <= t / TAU * t.ln().powi(2));
        }

        #[test]
        fn bump_derivative_matches_differences(x in -0.95f64..0.95) {
            let f = TestFunction::Bump { lo: 10.0, hi: 30.0 };
            let t = 20.0 + 10.0 * x;
            let h = 1e-6;
            let fd = (f.value(t + h).unwrap() - f.value(t - h).unwrap()) / (2.0 * h);
            prop_assert!((fd - f.deriv(t).unwrap()).abs() < 1e-6);
        }
    }
}
