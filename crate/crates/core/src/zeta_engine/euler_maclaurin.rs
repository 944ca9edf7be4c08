//! Euler–Maclaurin evaluation of ζ(s), the reference oracle.
//!
//! ζ(s) = Σ_{n<N} n^{-s} + N^{1-s}/(s-1) + N^{-s}/2 + Σ_{k=1}^{K} T_k(N, s) + R,
//! with T_k = B_{2k}/(2k)! · s(s+1)···(s+2k-2) · N^{1-s-2k} and the classical
//! remainder bound |R| <= |s+2K+1| / (σ+2K+1) · |T_{K+1}| for σ > -(2K+1).
//!
//! The phases `t ln n` are formed from a double-double table of logarithms and
//! reduced modulo 2π before the trig call, so each term carries rounding error
//! near one ulp regardless of how large `t` is.

use std::f64::consts::TAU;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dd::{Dd, LN2};
use crate::error::{Error, Result};
use crate::special::{bernoulli_over_factorial, MAX_BERNOULLI};
use crate::summation::NeumaierComplex;

/// Smallest accuracy request honoured in double precision.
pub const PRECISION_FLOOR: f64 = 1e-12;
/// Largest |Im s| handled by the oracle.
pub const MAX_IMAG: f64 = 1e7;

const PARALLEL_CHUNK: usize = 16_384;

/// Summation length and correction depth for one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmPlan {
    pub n: usize,
    pub k: usize,
    pub remainder_bound: f64,
}

/// Choose the cheapest `(N, K)` (searching N upward) whose remainder bound is
/// below `target`.
pub fn plan(s: Complex64, target: f64) -> Result<EmPlan> {
    let sigma = s.re;
    let start = ((s.norm() / TAU).ceil() as usize + 4).max(8);
    let mut n = start;
    let n_cap = 4 * start + 1_000_000;
    while n <= n_cap {
        let nf = n as f64;
        // |T_1| = |B_2/2!| |s| N^{-σ-1}
        let mut mag = bernoulli_over_factorial(1).abs() * s.norm() * nf.powf(-sigma - 1.0);
        let mut best = f64::INFINITY;
        for k in 1..MAX_BERNOULLI {
            let kf = k as f64;
            // |T_{k+1}| from |T_k|
            let next = mag
                * (s + (2.0 * kf - 1.0)).norm()
                * (s + 2.0 * kf).norm()
                / (nf * nf)
                * (bernoulli_over_factorial(k + 1) / bernoulli_over_factorial(k)).abs();
            let denom = sigma + 2.0 * kf + 1.0;
            if denom > 0.0 {
                let bound = (s + (2.0 * kf + 1.0)).norm() / denom * next;
                if bound <= target {
                    return Ok(EmPlan {
                        n,
                        k,
                        remainder_bound: bound,
                    });
                }
                if bound > best && k > 4 {
                    // terms have started growing; more depth will not help
                    break;
                }
                best = best.min(bound);
            }
            mag = next;
        }
        n = n + n / 4 + 1;
    }
    Err(Error::Precision(format!(
        "no Euler-Maclaurin plan reaches {target:e} at s = {s}"
    )))
}

fn log_table(n_max: usize) -> Arc<Vec<Dd>> {
    static TABLE: OnceLock<RwLock<Arc<Vec<Dd>>>> = OnceLock::new();
    let lock = TABLE.get_or_init(|| RwLock::new(Arc::new(Vec::new())));
    {
        let cur = lock.read().expect("log table lock poisoned");
        if cur.len() > n_max {
            return Arc::clone(&cur);
        }
    }
    let mut w = lock.write().expect("log table lock poisoned");
    if w.len() <= n_max {
        let size = (n_max + 1).max(2 * w.len()).max(4096);
        *w = Arc::new(build_log_table(size));
    }
    Arc::clone(&w)
}

/// ln n as double-double for 0 < n < size. Composite n reuse their smallest
/// prime factor; a prime p uses ln p = ln(p-1) + 2 atanh(1/(2p-1)).
fn build_log_table(size: usize) -> Vec<Dd> {
    let mut spf = vec![0u32; size];
    for i in 2..size {
        if spf[i] == 0 {
            let mut j = i;
            while j < size {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    let mut logs = vec![Dd::ZERO; size];
    for i in 2..size {
        let p = spf[i] as usize;
        logs[i] = if p == i {
            if i == 2 {
                LN2
            } else {
                let d = (2 * i - 1) as f64;
                let x = Dd::recip(d);
                let xf = x.hi;
                let x2 = xf * xf;
                let mut pow = xf * x2;
                let mut rest = 0.0;
                let mut j = 3.0;
                while pow > 1e-40 {
                    rest += pow / j;
                    pow *= x2;
                    j += 2.0;
                }
                logs[i - 1].add(x.mul_f64(2.0)).add_f64(2.0 * rest)
            }
        } else {
            logs[p].add(logs[i / p])
        };
    }
    logs
}

#[inline]
fn power_term(log_n: Dd, s: Complex64) -> Complex64 {
    // n^{-s} = exp(-σ ln n) · e^{-i t ln n}
    let mag = (-s.re * log_n.to_f64()).exp();
    let phase = -log_n.mul_mod_tau(s.im);
    let (sin, cos) = phase.sin_cos();
    Complex64::new(mag * cos, mag * sin)
}

fn dirichlet_head(logs: &[Dd], n: usize, s: Complex64) -> Complex64 {
    // Σ_{m=1}^{n-1} m^{-s}, chunked in a fixed order
    let chunks: Vec<(usize, usize)> = (1..n)
        .step_by(PARALLEL_CHUNK)
        .map(|lo| (lo, (lo + PARALLEL_CHUNK).min(n)))
        .collect();
    let partial = |&(lo, hi): &(usize, usize)| {
        let mut acc = NeumaierComplex::new();
        for m in lo..hi {
            acc.add(power_term(logs[m], s));
        }
        acc.value()
    };
    let parts: Vec<Complex64> = if chunks.len() > 1 {
        chunks.par_iter().map(partial).collect()
    } else {
        chunks.iter().map(partial).collect()
    };
    let mut total = NeumaierComplex::new();
    for p in parts {
        total.add(p);
    }
    total.value()
}

/// Reference evaluation of ζ(s) with absolute error below `target_abs_err`.
///
/// Symmetric under conjugation by construction: values for `Im s < 0` are the
/// conjugates of the values at `conj(s)`.
pub fn zeta_reference(s: Complex64, target_abs_err: f64) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {s}")));
    }
    if !(target_abs_err.is_finite() && target_abs_err > 0.0) {
        return Err(Error::Parameter(format!(
            "target_abs_err must be positive, got {target_abs_err}"
        )));
    }
    if target_abs_err < PRECISION_FLOOR {
        return Err(Error::Precision(format!(
            "target {target_abs_err:e} is below the double-precision floor {PRECISION_FLOOR:e}"
        )));
    }
    if (s - 1.0).norm() < 1e-14 {
        return Err(Error::Pole);
    }
    if s.im.abs() > MAX_IMAG {
        return Err(Error::Domain(format!("|Im s| = {} exceeds {MAX_IMAG:e}", s.im.abs())));
    }
    if s.im < 0.0 {
        return zeta_reference(s.conj(), target_abs_err).map(|z| z.conj());
    }
    let plan = plan(s, target_abs_err)?;
    let logs = log_table(plan.n);
    let n = plan.n;
    let nf = n as f64;

    let head = dirichlet_head(&logs, n, s);
    let n_pow = power_term(logs[n], s); // N^{-s}
    let mut tail = NeumaierComplex::new();
    tail.add(n_pow * nf / (s - 1.0));
    tail.add(n_pow * 0.5);
    // P_k = s(s+1)...(s+2k-2) N^{1-2k} N^{-s}
    let mut prod = s / nf * n_pow;
    for k in 1..=plan.k {
        tail.add(prod * bernoulli_over_factorial(k));
        let kf = k as f64;
        prod = prod * (s + (2.0 * kf - 1.0)) * (s + 2.0 * kf) / (nf * nf);
    }
    let out = head + tail.value();
    if !(out.re.is_finite() && out.im.is_finite()) {
        return Err(Error::Numeric(format!("non-finite zeta value at {s}")));
    }
    Ok(out)
}
