//! Riemann–Siegel evaluation of Hardy's Z(t).
//!
//! Z(t) = 2 Σ_{n<=m} n^{-1/2} cos(ϑ(t) - t ln n)
//!        + (-1)^{m-1} a^{-1/2} Σ_{k<CORRECTIONS} C_k(p) a^{-k} + R(t),
//! where a = sqrt(t/2π), m = ⌊a⌋, p = a - m. Each C_k is a combination
//! Σ_j c_{k,j} Ψ^{(3k-4j)}(p) / π^{2k-2j} of derivatives of
//! Ψ(p) = cos(2π(p² - p - 1/16)) / cos(2πp). The rational weights c_{k,j}
//! follow a two-term recurrence; the single weight on Ψ itself in C_4 is not
//! produced by the recurrence and is taken from the classical C_4.
//! Ψ is entire; its Taylor series about p = 1/2 is obtained once from a
//! Cauchy integral and each C_k is stored as a polynomial in x = p - 1/2.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;

/// Number of correction terms C_0..C_{CORRECTIONS-1}.
pub const CORRECTIONS: usize = 8;

const TAYLOR_DEGREE: usize = 96;
const CAUCHY_NODES: usize = 512;
const CAUCHY_RADIUS: f64 = 1.0;

fn psi(p: Complex64) -> Complex64 {
    let num = (TAU * (p * p - p - 1.0 / 16.0)).cos();
    let den = (TAU * p).cos();
    num / den
}

/// Taylor coefficients of Ψ(1/2 + x) in x.
fn psi_taylor() -> Vec<f64> {
    let mut coef = vec![0.0; TAYLOR_DEGREE + 1];
    let vals: Vec<(Complex64, f64)> = (0..CAUCHY_NODES)
        .map(|j| {
            let th = TAU * j as f64 / CAUCHY_NODES as f64;
            (psi(Complex64::new(0.5, 0.0) + Complex64::from_polar(CAUCHY_RADIUS, th)), th)
        })
        .collect();
    for (n, c) in coef.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(v, th) in &vals {
            acc += v * Complex64::from_polar(1.0, -(n as f64) * th);
        }
        *c = acc.re / CAUCHY_NODES as f64 / CAUCHY_RADIUS.powi(n as i32);
    }
    coef
}

/// Coefficients of the j-th derivative of a polynomial.
fn derivative(c: &[f64], j: usize) -> Vec<f64> {
    (j..c.len())
        .map(|n| {
            let falling: f64 = ((n - j + 1)..=n).map(|v| v as f64).product();
            c[n] * falling
        })
        .collect()
}

fn add_scaled(acc: &mut Vec<f64>, poly: &[f64], scale: f64) {
    if acc.len() < poly.len() {
        acc.resize(poly.len(), 0.0);
    }
    for (a, p) in acc.iter_mut().zip(poly) {
        *a += scale * p;
    }
}

/// Weights w with C_k = Σ_j w[k][j] Ψ^{(3k-4j)} / π^{2k-2j}.
fn correction_weights() -> Vec<Vec<f64>> {
    // raw[n][i] is the recurrence value for derivative order 3n - 4i
    let mut raw: Vec<Vec<f64>> = vec![vec![1.0]];
    for n in 1..CORRECTIONS {
        let len = 3 * n / 4 + 1;
        let prev = &raw[n - 1];
        let get = |i: isize| -> f64 {
            if i < 0 {
                0.0
            } else {
                prev.get(i as usize).copied().unwrap_or(0.0)
            }
        };
        let row: Vec<f64> = (0..len)
            .map(|i| {
                let order = 3 * n - 4 * i;
                if order == 0 {
                    // only reached for n = 4 below CORRECTIONS
                    assert_eq!(n, 4, "no closed weight for Ψ in C_{n}");
                    -0.5
                } else {
                    let m = order as f64;
                    -(m + 1.0) * get(i as isize - 1) + get(i as isize) / (4.0 * m)
                }
            })
            .collect();
        raw.push(row);
    }
    raw.iter()
        .enumerate()
        .map(|(n, row)| {
            row.iter()
                .enumerate()
                .map(|(i, &d)| {
                    let order = (3 * n - 4 * i) as i32;
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    // d · (-1)^i · 4^{-i} · (-2)^{-order}
                    sign * d * 0.25f64.powi(i as i32) / (-2.0f64).powi(order)
                })
                .collect()
        })
        .collect()
}

fn correction_polys() -> &'static [Vec<f64>; CORRECTIONS] {
    static POLYS: OnceLock<[Vec<f64>; CORRECTIONS]> = OnceLock::new();
    POLYS.get_or_init(|| {
        let c = psi_taylor();
        let weights = correction_weights();
        std::array::from_fn(|n| {
            let mut poly = Vec::new();
            for (i, &w) in weights[n].iter().enumerate() {
                let order = 3 * n - 4 * i;
                let scale = w / PI.powi((2 * n - 2 * i) as i32);
                add_scaled(&mut poly, &derivative(&c, order), scale);
            }
            poly
        })
    })
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

/// C_k(p) for 0 <= k < CORRECTIONS and 0 <= p < 1.
pub fn correction_coefficient(k: usize, p: f64) -> f64 {
    horner(&correction_polys()[k], p - 0.5)
}

/// Gabcke's bound on the remainder after C_0..C_4, valid for t >= 200. The
/// extra terms kept here only make the error smaller.
pub fn remainder_bound(t: f64) -> f64 {
    0.017 * t.powf(-2.75)
}

/// Riemann–Siegel Z(t) for t >= 2π, given ϑ(t).
pub fn hardy_z_rs(t: f64, theta: f64) -> f64 {
    debug_assert!(t >= TAU);
    let a = (t / TAU).sqrt();
    let m = a.floor();
    let p = a - m;
    let m = m as usize;

    let mut main = 0.0;
    let mut comp = 0.0;
    for n in 1..=m {
        let nf = n as f64;
        let v = (theta - t * nf.ln()).cos() / nf.sqrt();
        // Neumaier step
        let s = main + v;
        if main.abs() >= v.abs() {
            comp += (main - s) + v;
        } else {
            comp += (v - s) + main;
        }
        main = s;
    }
    let main = 2.0 * (main + comp);

    let inv_a = 1.0 / a;
    let mut corr = 0.0;
    let mut pow = 1.0;
    for k in 0..CORRECTIONS {
        corr += correction_coefficient(k, p) * pow;
        pow *= inv_a;
    }
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    main + sign * corr / a.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c0_at_half_is_minus_cos_five_pi_over_eight() {
        // Ψ(1/2) = -cos(5π/8)
        let want = -(5.0 * PI / 8.0).cos();
        assert!((correction_coefficient(0, 0.5) - want).abs() < 1e-14);
    }

    #[test]
    fn taylor_series_reproduces_psi() {
        for &p in &[0.0, 0.1, 0.3, 0.6, 0.93] {
            let direct = psi(Complex64::new(p, 0.0)).re;
            assert!((correction_coefficient(0, p) - direct).abs() < 1e-13, "p = {p}");
        }
    }

    #[test]
    fn weights_match_classical_terms() {
        let w = correction_weights();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-15 * b.abs();
        assert!(close(w[1][0], -1.0 / 96.0));
        assert!(close(w[2][0], 1.0 / 18_432.0) && close(w[2][1], 1.0 / 64.0));
        assert!(close(w[3][0], -1.0 / 5_308_416.0));
        assert!(close(w[3][1], -1.0 / 3_840.0) && close(w[3][2], -1.0 / 64.0));
        assert!(close(w[4][0], 1.0 / 2_038_431_744.0));
        assert!(close(w[4][1], 11.0 / 5_898_240.0));
        assert!(close(w[4][2], 19.0 / 24_576.0) && close(w[4][3], 1.0 / 128.0));
    }

    #[test]
    fn corrections_match_high_precision_values() {
        // 40-digit numerical differentiation of Ψ
        let cases: [(usize, f64, f64); 12] = [
            (1, 0.13, 0.0047972164167338786),
            (2, 0.77, 0.0044081672380467287),
            (3, 0.0, -0.00019868520940530258),
            (4, 0.5, 0.00046483389361763381),
            (4, 0.13, 8.2722829088458135e-5),
            (5, 0.0, -7.3965431412416172e-5),
            (5, 0.77, 6.5309649868843562e-5),
            (6, 0.5, 3.3690998401080937e-5),
            (6, 0.999, 1.9135990545301793e-6),
            (7, 0.13, -1.0482557953999343e-5),
            (7, 0.77, 1.0890607144981459e-5),
            (7, 0.999, 1.0016881806060825e-5),
        ];
        for (k, p, want) in cases {
            let got = correction_coefficient(k, p);
            assert!((got - want).abs() < 1e-13, "C_{k}({p}) = {got}, want {want}");
        }
    }

    #[test]
    fn parity_about_one_half() {
        // even k are even in x, odd k are odd
        for k in 0..CORRECTIONS {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let a = correction_coefficient(k, 0.5 + 0.37);
            let b = correction_coefficient(k, 0.5 - 0.37);
            assert!((a - sign * b).abs() < 1e-13, "k = {k}");
        }
    }
}
