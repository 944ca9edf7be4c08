//! Gamma-family special functions on the complex plane, Bernoulli ratios, and
//! Euler's constant.
//!
//! `ln_gamma` follows the analytic branch that is real on the positive real
//! axis and continuous in the right half-plane (the principal logs of the
//! shift factors `z, z+1, ...` never cross the negative real axis there).
//! That is the branch the Riemann–Siegel theta function needs.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::summation::Neumaier;

/// Largest `k` for which `B_{2k}/(2k)!` is tabulated.
pub const MAX_BERNOULLI: usize = 80;

/// Modulus past which Stirling's series is used directly.
const STIRLING_MIN_MODULUS: f64 = 10.0;
const STIRLING_TERMS: usize = 14;

fn bernoulli_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // B_{2k}/(2k)! = (-1)^{k+1} 2 zeta(2k) / (2 pi)^{2k}
        let mut out = vec![0.0; MAX_BERNOULLI + 1];
        for (k, slot) in out.iter_mut().enumerate().skip(1) {
            let z = even_zeta(k);
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            *slot = sign * 2.0 * z / TAU.powi(2 * k as i32);
        }
        out
    })
}

/// zeta(2k) for k >= 1 by a direct sum with an Euler–Maclaurin tail.
fn even_zeta(k: usize) -> f64 {
    if k == 1 {
        return PI * PI / 6.0;
    }
    const M: usize = 1000;
    let e = 2 * k as i32;
    let m = M as f64;
    let mut acc = Neumaier::new();
    // tail first, then the small terms from largest n down
    acc.add(m.powi(1 - e) / (e - 1) as f64);
    acc.add(-0.5 * m.powi(-e));
    acc.add(e as f64 * m.powi(-e - 1) / 12.0);
    for n in (1..=M).rev() {
        acc.add((n as f64).powi(-e));
    }
    acc.value()
}

/// `B_{2k} / (2k)!` for `1 <= k <= MAX_BERNOULLI`.
pub fn bernoulli_over_factorial(k: usize) -> f64 {
    assert!(
        (1..=MAX_BERNOULLI).contains(&k),
        "Bernoulli index {k} out of table range"
    );
    bernoulli_table()[k]
}

/// The Bernoulli number `B_{2k}` itself (as a double).
pub fn bernoulli(k: usize) -> f64 {
    let mut fact = 1.0;
    for j in 1..=(2 * k) {
        fact *= j as f64;
    }
    bernoulli_over_factorial(k) * fact
}

/// `ln(sin(pi z))` on some branch; only its exponential is meaningful. Stable
/// for large `|Im z|`, where `sin(pi z)` itself would overflow.
pub fn log_sin_pi(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return log_sin_pi(z.conj()).conj();
    }
    let i = Complex64::i();
    // sin(pi z) = e^{-i pi z} (1 - e^{2 i pi z}) (i/2)
    let e2 = (2.0 * i * PI * z).exp();
    -i * PI * z + (Complex64::new(1.0, 0.0) - e2).ln() + Complex64::new(0.5f64.ln(), PI / 2.0)
}

/// Complex log-gamma. Continuous branch on `Re z >= 0`; reflection is used
/// for `Re z < 0`, where only `exp(ln_gamma)` is meaningful.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.0 {
        let one = Complex64::new(1.0, 0.0);
        return Complex64::new(PI.ln(), 0.0) - log_sin_pi(z) - ln_gamma(one - z);
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < STIRLING_MIN_MODULUS {
        shift += w.ln();
        w += 1.0;
    }
    stirling_ln_gamma(w) - shift
}

fn stirling_ln_gamma(z: Complex64) -> Complex64 {
    let ln_z = z.ln();
    let mut out = (z - 0.5) * ln_z - z + 0.5 * TAU.ln();
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    for k in 1..=STIRLING_TERMS {
        let b2k = bernoulli(k);
        out += pow * (b2k / ((2 * k) * (2 * k - 1)) as f64);
        pow *= inv2;
    }
    out
}

/// Digamma `psi(z) = Gamma'(z)/Gamma(z)` for `Re z > 0`.
pub fn digamma(z: Complex64) -> Complex64 {
    debug_assert!(z.re > 0.0);
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < STIRLING_MIN_MODULUS {
        shift -= w.inv();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut out = w.ln() - 0.5 * inv;
    let mut pow = inv2;
    for k in 1..=STIRLING_TERMS {
        out -= pow * (bernoulli(k) / (2 * k) as f64);
        pow *= inv2;
    }
    out + shift
}

/// Euler's constant, from `H_n - ln n` with its Euler–Maclaurin corrections
/// at `n = 10^4`. Computed once and memoized.
pub fn euler_gamma() -> f64 {
    static C0: OnceLock<f64> = OnceLock::new();
    *C0.get_or_init(|| {
        const N: usize = 10_000;
        let n = N as f64;
        let mut h = Neumaier::new();
        for k in (1..=N).rev() {
            h.add(1.0 / k as f64);
        }
        h.add(-n.ln());
        h.add(-1.0 / (2.0 * n));
        h.add(1.0 / (12.0 * n * n));
        h.add(-1.0 / (120.0 * n.powi(4)));
        h.add(1.0 / (252.0 * n.powi(6)));
        h.value()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Lanczos (g = 7, n = 9) log-gamma, an independent route for `Re z > 0.5`.
    fn lanczos_ln_gamma(z: Complex64) -> Complex64 {
        const G: f64 = 7.0;
        const COEF: [f64; 9] = [
            0.999_999_999_999_809_93,
            676.520_368_121_885_1,
            -1_259.139_216_722_402_8,
            771.323_428_777_653_13,
            -176.615_029_162_140_59,
            12.507_343_278_686_905,
            -0.138_571_095_265_720_12,
            9.984_369_578_019_571_6e-6,
            1.505_632_735_149_311_6e-7,
        ];
        let z = z - 1.0;
        let mut a = Complex64::new(COEF[0], 0.0);
        for (i, c) in COEF.iter().enumerate().skip(1) {
            a += *c / (z + i as f64);
        }
        let t = z + G + 0.5;
        0.5 * TAU.ln() + (z + 0.5) * t.ln() - t + a.ln()
    }

    #[test]
    fn bernoulli_small_values() {
        let exact = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0];
        for (k, b) in exact.iter().enumerate() {
            let got = bernoulli(k + 1);
            assert!((got - b).abs() <= 1e-14 * b.abs(), "B_{} = {got}", 2 * (k + 1));
        }
    }

    #[test]
    fn ln_gamma_real_axis() {
        // Gamma(5) = 24, Gamma(1/2) = sqrt(pi)
        assert!((ln_gamma(Complex64::new(5.0, 0.0)).re - 24f64.ln()).abs() < 1e-14);
        assert!((ln_gamma(Complex64::new(0.5, 0.0)).re - 0.5 * PI.ln()).abs() < 1e-14);
        assert!(ln_gamma(Complex64::new(3.3, 0.0)).im.abs() < 1e-15);
    }

    #[test]
    fn ln_gamma_matches_lanczos() {
        for &(x, y) in &[(0.75, 3.0), (1.25, 25.0), (2.0, -40.0), (0.9, 0.1), (5.0, 7.0)] {
            let z = Complex64::new(x, y);
            let a = ln_gamma(z);
            let b = lanczos_ln_gamma(z);
            // compare modulo 2 pi i: branch of Lanczos is principal-per-factor
            let d = a - b;
            let wrapped = d.im - TAU * (d.im / TAU).round();
            assert!(d.re.abs() < 1e-12 && wrapped.abs() < 1e-12, "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn reflection_round_trip() {
        // Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        let z = Complex64::new(-0.3, 12.0);
        let one = Complex64::new(1.0, 0.0);
        let lhs = (ln_gamma(z) + ln_gamma(one - z)).exp();
        let rhs = PI / (PI * z).sin();
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }

    #[test]
    fn digamma_values() {
        // psi(1) = -gamma, psi(1/2) = -gamma - 2 ln 2
        let g = euler_gamma();
        assert!((digamma(Complex64::new(1.0, 0.0)).re + g).abs() < 1e-14);
        assert!((digamma(Complex64::new(0.5, 0.0)).re + g + 2.0 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn digamma_is_derivative_of_ln_gamma() {
        let z = Complex64::new(0.25, 30.0);
        let h = 1e-5;
        let fd = (ln_gamma(z + h) - ln_gamma(z - h)) / (2.0 * h);
        assert!((fd - digamma(z)).norm() < 1e-8);
    }

    #[test]
    fn euler_constant() {
        assert!((euler_gamma() - 0.577_215_664_9).abs() < 1e-10);
    }
}
