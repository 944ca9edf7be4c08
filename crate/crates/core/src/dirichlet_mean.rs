//! Weighted mean square of ζ times a Dirichlet polynomial:
//!
//! ∫_0^T |ζ(1/2+it) A(1/2+it)|² dt = T Σ_{k,l≤M} a(k) conj(a(l)) / [k,l]
//!     · (log(T (k,l)² / 2πkl) + 2C₀ - 1) + E(T, A).
//!
//! The main term is evaluated exactly; E is measured by quadrature.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureSpec};
use crate::selberg::PrimeTable;
use crate::special::euler_gamma;
use crate::summation::{Neumaier, NeumaierComplex};
use crate::zeta_engine::{hardy_z, EvalOptions, Method};

/// Largest length accepted by the O(M²) main term.
pub const MAX_MAIN_TERM_LEN: usize = 10_000;
/// Largest length accepted for quadrature comparisons.
pub const MAX_EMPIRICAL_LEN: usize = 50;

/// A(s) = Σ_{m≤M} a(m) m^{-s}.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletPoly {
    /// a(1), ..., a(M).
    coeffs: Vec<Complex64>,
}

impl DirichletPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Parameter("a Dirichlet polynomial needs M >= 1".into()));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Parameter("coefficients must be finite".into()));
        }
        Ok(Self { coeffs })
    }

    /// A(s) = 1.
    pub fn unit() -> Self {
        Self {
            coeffs: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// a(p) = w(p) on primes p ≤ y, zero elsewhere.
    pub fn on_primes(y: f64, weight: PrimeCoeff, primes: &PrimeTable) -> Result<Self> {
        let support = primes.up_to(y)?;
        let Some(&last) = support.last() else {
            return Err(Error::Parameter(format!("no primes up to {y}")));
        };
        let mut coeffs = vec![Complex64::new(0.0, 0.0); last as usize];
        for &p in support {
            coeffs[p as usize - 1] = Complex64::new(weight.at(p), 0.0);
        }
        Ok(Self { coeffs })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// a(m) for 1 <= m <= M.
    pub fn coeff(&self, m: usize) -> Complex64 {
        self.coeffs[m - 1]
    }

    /// (m, a(m)) for the nonzero coefficients.
    pub fn support(&self) -> Vec<(usize, Complex64)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(|(i, &c)| (i + 1, c))
            .collect()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// |a(m)| <= 10 (1 + log m) for every m.
    pub fn growth_ok(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| c.norm() <= 10.0 * (1.0 + ((i + 1) as f64).ln()))
    }

    /// A(1/2 + it).
    pub fn eval_half(&self, t: f64) -> Complex64 {
        let mut acc = NeumaierComplex::new();
        for (m, a) in self.support() {
            let lm = (m as f64).ln();
            acc.add(a * Complex64::from_polar((m as f64).sqrt().recip(), -t * lm));
        }
        acc.value()
    }

    /// Parse `m re im` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Format { line: i + 1, msg };
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 3 {
                return Err(bad(format!("expected `m re im`, found {} fields", cols.len())));
            }
            let m: usize = cols[0].parse().map_err(|_| bad(format!("bad index {:?}", cols[0])))?;
            if m == 0 {
                return Err(bad("indices start at 1".into()));
            }
            let re: f64 = cols[1].parse().map_err(|_| bad(format!("bad real part {:?}", cols[1])))?;
            let im: f64 = cols[2].parse().map_err(|_| bad(format!("bad imaginary part {:?}", cols[2])))?;
            if entries.insert(m, Complex64::new(re, im)).is_some() {
                return Err(bad(format!("index {m} repeated")));
            }
        }
        let Some((&len, _)) = entries.last_key_value() else {
            return Err(Error::Format {
                line: 0,
                msg: "no coefficients".into(),
            });
        };
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
        for (m, c) in entries {
            coeffs[m - 1] = c;
        }
        Self::new(coeffs)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// Coefficient weights for prime-supported polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeCoeff {
    LogP,
    Unit,
}

impl PrimeCoeff {
    fn at(self, p: u32) -> f64 {
        match self {
            PrimeCoeff::LogP => (p as f64).ln(),
            PrimeCoeff::Unit => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MainTermBreakdown {
    pub total: f64,
    /// k = l terms.
    pub diagonal: f64,
    pub off_diagonal: f64,
    pub euler_c0: f64,
}

impl MainTermBreakdown {
    pub fn diagonal_share(&self) -> f64 {
        self.diagonal / self.total
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn check_height(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 10.0) {
        return Err(Error::Parameter(format!("T must be at least 10, got {t}")));
    }
    Ok(())
}

/// Main term of the weighted mean square at height T.
pub fn main_term(t: f64, poly: &DirichletPoly) -> Result<MainTermBreakdown> {
    check_height(t)?;
    if poly.len() > MAX_MAIN_TERM_LEN {
        return Err(Error::Size(format!(
            "M = {} exceeds {MAX_MAIN_TERM_LEN}",
            poly.len()
        )));
    }
    let c0 = euler_gamma();
    let shift = (t / TAU).ln() + 2.0 * c0 - 1.0;
    let support = poly.support();
    // per k: (diagonal, off-diagonal), each complex
    let rows: Vec<(Complex64, Complex64)> = support
        .par_iter()
        .map(|&(k, ak)| {
            let mut off = NeumaierComplex::new();
            let mut diag = Complex64::new(0.0, 0.0);
            for &(l, al) in &support {
                let g = gcd(k as u64, l as u64) as f64;
                let (kf, lf) = (k as f64, l as f64);
                let lcm = kf / g * lf;
                let term = ak * al.conj() / lcm * (shift + (g * g / (kf * lf)).ln());
                if k == l {
                    diag = term;
                } else {
                    off.add(term);
                }
            }
            (diag, off.value())
        })
        .collect();
    let mut diag = NeumaierComplex::new();
    let mut off = NeumaierComplex::new();
    for (d, o) in rows {
        diag.add(d);
        off.add(o);
    }
    let (diag, off) = (diag.value() * t, off.value() * t);
    let total = diag + off;
    if total.im.abs() > 1e-9 * total.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::Consistency(format!(
            "main term has imaginary part {:e} against {:e}",
            total.im,
            total.re
        )));
    }
    Ok(MainTermBreakdown {
        total: diag.re + off.re,
        diagonal: diag.re,
        off_diagonal: off.re,
        euler_c0: c0,
    })
}

/// The same main term for a(p) = w(p), p ≤ y, written as a diagonal sum
/// over primes plus a sum over ordered pairs of distinct primes.
pub fn prime_main_term(t: f64, y: f64, weight: PrimeCoeff, primes: &PrimeTable) -> Result<MainTermBreakdown> {
    check_height(t)?;
    let support = primes.up_to(y)?;
    let c0 = euler_gamma();
    let base = (t / TAU).ln() + 2.0 * c0 - 1.0;
    let mut diag = Neumaier::new();
    for &p in support {
        diag.add(weight.at(p).powi(2) / p as f64 * base);
    }
    let rows: Vec<f64> = support
        .par_iter()
        .map(|&p1| {
            let mut acc = Neumaier::new();
            for &p2 in support {
                if p1 != p2 {
                    let prod = p1 as f64 * p2 as f64;
                    acc.add(weight.at(p1) * weight.at(p2) / prod * (base - prod.ln()));
                }
            }
            acc.value()
        })
        .collect();
    let mut off = Neumaier::new();
    for r in rows {
        off.add(r);
    }
    let (diagonal, off_diagonal) = (t * diag.value(), t * off.value());
    Ok(MainTermBreakdown {
        total: diagonal + off_diagonal,
        diagonal,
        off_diagonal,
        euler_c0: c0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalComparison {
    pub empirical: f64,
    pub main: f64,
    /// empirical - main
    pub error: f64,
    /// Self-convergence estimate of the quadrature.
    pub quadrature_change: f64,
}

/// Quadrature cost grows with the number of nonzero terms, so the height
/// guard T <= 5000 (10/n)² uses that count.
fn check_empirical(t_hi: f64, poly: &DirichletPoly) -> Result<()> {
    if poly.len() > MAX_EMPIRICAL_LEN {
        return Err(Error::Size(format!(
            "M = {} exceeds {MAX_EMPIRICAL_LEN} for quadrature comparisons",
            poly.len()
        )));
    }
    let n = poly.support().len().max(1) as f64;
    let limit = 5000.0 * (10.0 / n).powi(2).min(1.0);
    if t_hi > limit {
        return Err(Error::Size(format!(
            "T = {t_hi} exceeds {limit} for {n} nonzero coefficients"
        )));
    }
    Ok(())
}

fn weighted_integral(lo: f64, hi: f64, poly: &DirichletPoly, quad: &QuadratureSpec) -> Result<(f64, f64)> {
    let opts = EvalOptions {
        target_abs_err: 1e-9,
        method: Method::Auto,
    };
    let r = integrate(
        |t| {
            let z = hardy_z(t, &opts)?;
            Ok(z * z * poly.eval_half(t).norm_sqr())
        },
        lo,
        hi,
        &[],
        quad,
    )?;
    Ok((r.value, r.change))
}

/// ∫_0^T |ζ A|² against its main term.
pub fn empirical_weighted_integral(t: f64, poly: &DirichletPoly, quad: &QuadratureSpec) -> Result<EmpiricalComparison> {
    check_height(t)?;
    check_empirical(t, poly)?;
    let (empirical, change) = weighted_integral(0.0, t, poly, quad)?;
    let main = main_term(t, poly)?.total;
    Ok(EmpiricalComparison {
        empirical,
        main,
        error: empirical - main,
        quadrature_change: change,
    })
}

/// Main-term difference between T+H and T next to the integral over [T, T+H].
pub fn short_interval_difference(
    t: f64,
    h: f64,
    poly: &DirichletPoly,
    quad: &QuadratureSpec,
) -> Result<EmpiricalComparison> {
    check_height(t)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Parameter(format!("H must be positive, got {h}")));
    }
    check_empirical(t + h, poly)?;
    let main = main_term(t + h, poly)?.total - main_term(t, poly)?.total;
    let (empirical, change) = weighted_integral(t, t + h, poly, quad)?;
    Ok(EmpiricalComparison {
        empirical,
        main,
        error: empirical - main,
        quadrature_change: change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selberg::sieve;
    use crate::sums_integrals::mean_square_main_term;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::OnceLock;

    fn primes() -> &'static PrimeTable {
        static P: OnceLock<PrimeTable> = OnceLock::new();
        P.get_or_init(|| sieve(100_000).unwrap())
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn euler_constant_against_a_second_series() {
        // H_n - ln(n + 1/2) converges with error O(n^-2)
        let n = 1_000_000usize;
        let mut h = Neumaier::new();
        for k in (1..=n).rev() {
            h.add(1.0 / k as f64);
        }
        let approx = h.value() - (n as f64 + 0.5).ln();
        assert!((approx - euler_gamma()).abs() < 1e-10);
    }

    #[test]
    fn single_term_is_the_mean_square() {
        let m = main_term(2000.0, &DirichletPoly::unit()).unwrap();
        assert!((m.total - mean_square_main_term(2000.0)).abs() < 1e-10 * m.total);
        assert_eq!(m.off_diagonal, 0.0);
    }

    #[test]
    fn gcd_times_lcm_is_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let a: u64 = rng.random_range(1..10_000);
            let b: u64 = rng.random_range(1..10_000);
            let g = gcd(a, b);
            assert_eq!(g * (a / g * b), a * b);
            assert_eq!(a % g + b % g, 0);
        }
    }

    #[test]
    fn prime_paths_agree() {
        for weight in [PrimeCoeff::LogP, PrimeCoeff::Unit] {
            let poly = DirichletPoly::on_primes(20.0, weight, primes()).unwrap();
            let a = main_term(2000.0, &poly).unwrap();
            let b = prime_main_term(2000.0, 20.0, weight, primes()).unwrap();
            assert!((a.total - b.total).abs() < 1e-10 * a.total.abs());
            assert!((a.diagonal - b.diagonal).abs() < 1e-10 * a.diagonal.abs());
        }
    }

    #[test]
    fn independent_double_loop() {
        // (3.10)-style split written out with explicit pairs
        let ps = [2.0f64, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0];
        let t = 2000.0;
        let base = (t / TAU).ln() + 2.0 * euler_gamma() - 1.0;
        let mut total = 0.0;
        for &p in &ps {
            total += p.ln().powi(2) / p * base;
            for &q in &ps {
                if p != q {
                    total += p.ln() * q.ln() / (p * q) * ((t / (TAU * p * q)).ln() + 2.0 * euler_gamma() - 1.0);
                }
            }
        }
        let poly = DirichletPoly::on_primes(20.0, PrimeCoeff::LogP, primes()).unwrap();
        assert!((main_term(t, &poly).unwrap().total - t * total).abs() < 1e-10 * t * total);
        assert_eq!(poly.len(), 19);
    }

    #[test]
    fn complex_coefficients_give_real_totals() {
        let poly = DirichletPoly::new(vec![c(1.0, 0.5), c(-0.3, 2.0), c(0.0, 0.0), c(0.7, -1.1)]).unwrap();
        let m = main_term(500.0, &poly).unwrap();
        assert!((m.total - m.diagonal - m.off_diagonal).abs() < 1e-9 * m.total.abs());
        assert!(m.diagonal > 0.0);
    }

    #[test]
    fn size_guards() {
        let big = DirichletPoly::new(vec![c(1.0, 0.0); MAX_MAIN_TERM_LEN + 1]).unwrap();
        assert!(matches!(main_term(100.0, &big), Err(Error::Size(_))));
        let wide = DirichletPoly::new(vec![c(1.0, 0.0); 60]).unwrap();
        let q = QuadratureSpec::default();
        assert!(matches!(empirical_weighted_integral(100.0, &wide, &q), Err(Error::Size(_))));
        let dense = DirichletPoly::new(vec![c(1.0, 0.0); 40]).unwrap();
        assert!(matches!(empirical_weighted_integral(1000.0, &dense, &q), Err(Error::Size(_))));
        assert!(main_term(5.0, &DirichletPoly::unit()).is_err());
        assert!(DirichletPoly::new(vec![]).is_err());
    }

    #[test]
    fn growth_check() {
        let poly = DirichletPoly::on_primes(1000.0, PrimeCoeff::LogP, primes()).unwrap();
        assert!(poly.growth_ok());
        let wild = DirichletPoly::new(vec![c(1.0, 0.0), c(50.0, 0.0)]).unwrap();
        assert!(!wild.growth_ok());
    }

    #[test]
    fn parse_coefficients() {
        let poly = DirichletPoly::parse("# family\n1 1 0\n3 0.5 -0.5  # comment\n\n").unwrap();
        assert_eq!(poly.len(), 3);
        assert_eq!(poly.coeff(2), c(0.0, 0.0));
        assert_eq!(poly.coeff(3), c(0.5, -0.5));
        assert!(matches!(DirichletPoly::parse("1 1\n"), Err(Error::Format { line: 1, .. })));
        assert!(matches!(DirichletPoly::parse("1 1 0\n1 2 0\n"), Err(Error::Format { line: 2, .. })));
        assert!(matches!(DirichletPoly::parse("0 1 0\n"), Err(Error::Format { .. })));
        assert!(DirichletPoly::parse("# nothing\n").is_err());
    }

    #[test]
    fn load_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("coeffs.txt");
        std::fs::write(&path, "2 0.6931471805599453 0\n").unwrap();
        let poly = DirichletPoly::load(&path).unwrap();
        assert_eq!(poly.support(), vec![(2, c(2f64.ln(), 0.0))]);
    }

    #[test]
    fn evaluation_matches_definition() {
        let poly = DirichletPoly::new(vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0)]).unwrap();
        let t = 3.7;
        let mut want = c(0.0, 0.0);
        for m in 1..=3 {
            let s = c(0.5, t);
            want += poly.coeff(m) * (-s * (m as f64).ln()).exp();
        }
        assert!((poly.eval_half(t) - want).norm() < 1e-14);
    }

    #[test]
    fn short_interval_main_terms_telescope() {
        let poly = DirichletPoly::on_primes(20.0, PrimeCoeff::LogP, primes()).unwrap();
        let d = |a: f64, b: f64| main_term(b, &poly).unwrap().total - main_term(a, &poly).unwrap().total;
        let lhs = d(1000.0, 1100.0) + d(1100.0, 1200.0);
        assert!((lhs - d(1000.0, 1200.0)).abs() < 1e-10 * lhs.abs());
    }

    #[test]
    fn unit_difference_is_h_log() {
        let one = DirichletPoly::unit();
        let q = QuadratureSpec::default();
        let r = short_interval_difference(2000.0, 200.0, &one, &q).unwrap();
        // derivative of T(log(T/2π) + 2C₀ - 1) is log(T/2π) + 2C₀
        let approx = 200.0 * ((2000.0 / TAU).ln() + 2.0 * euler_gamma());
        assert!((r.main / approx - 1.0).abs() < 0.05);
        assert!((r.empirical / r.main - 1.0).abs() < 0.1);
    }

    #[test]
    fn small_height_comparison() {
        let poly = DirichletPoly::on_primes(10.0, PrimeCoeff::LogP, primes()).unwrap();
        let r = empirical_weighted_integral(300.0, &poly, &QuadratureSpec::default()).unwrap();
        assert!((r.error / r.main).abs() < 0.1, "{r:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn scaling_by_modulus_squared(
            re in prop::collection::vec(-3.0f64..3.0, 1..12),
            lam_re in -4.0f64..4.0,
            lam_im in -4.0f64..4.0,
        ) {
            let coeffs: Vec<Complex64> = re.iter().enumerate().map(|(i, &r)| c(r, 0.3 * i as f64)).collect();
            let poly = DirichletPoly::new(coeffs).unwrap();
            let lam = c(lam_re, lam_im);
            let a = main_term(1000.0, &poly).unwrap().total;
            let b = main_term(1000.0, &poly.scaled(lam)).unwrap().total;
            prop_assert!((b - lam.norm_sqr() * a).abs() <= 1e-9 * (b.abs() + 1.0));
        }

        #[test]
        fn real_coefficients_keep_diagonal_positive(re in prop::collection::vec(0.1f64..3.0, 1..20)) {
            let poly = DirichletPoly::new(re.iter().map(|&r| c(r, 0.0)).collect()).unwrap();
            let m = main_term(1000.0, &poly).unwrap();
            prop_assert!(m.diagonal > 0.0);
        }
    }
}
