//! Evaluation of ζ(s), ζ'(1/2+it), ϑ(t), Z(t) and χ(s).
//!
//! Two evaluators back everything downstream:
//!
//! * [`zeta_reference`], an Euler–Maclaurin oracle with a rigorous remainder
//!   bound, valid anywhere in the desk-scale range;
//! * the Riemann–Siegel fast path for Z(t) on the critical line.
//!
//! [`Method::Auto`] picks the fast path only where its remainder bound is
//! already below the requested accuracy. All accuracy targets are absolute.

mod euler_maclaurin;
pub mod riemann_siegel;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{digamma, ln_gamma};

pub use euler_maclaurin::{plan as em_plan, zeta_reference, EmPlan, MAX_IMAG, PRECISION_FLOOR};

/// A complex number, as used for s, ζ(s) and χ(s).
pub type ComplexValue = Complex64;

/// Auto mode never uses the fast path below this height.
pub const AUTO_FAST_MIN_T: f64 = 50.0;
/// The fast path needs at least one main-sum term.
pub const FAST_MIN_T: f64 = TAU;

/// Accuracy used for zeta evaluations when callers do not specify one.
pub const DEFAULT_TARGET: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ReferenceOracle,
    FastCriticalLine,
    Auto,
}

/// Accuracy target and evaluator choice, without the point itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub target_abs_err: f64,
    pub method: Method,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            target_abs_err: DEFAULT_TARGET,
            method: Method::Auto,
        }
    }
}

impl EvalOptions {
    pub fn new(target_abs_err: f64, method: Method) -> Result<Self> {
        if !(target_abs_err.is_finite() && target_abs_err >= PRECISION_FLOOR) {
            return Err(Error::Precision(format!(
                "target_abs_err must be >= {PRECISION_FLOOR:e}, got {target_abs_err:e}"
            )));
        }
        Ok(Self {
            target_abs_err,
            method,
        })
    }

    pub fn oracle(target_abs_err: f64) -> Result<Self> {
        Self::new(target_abs_err, Method::ReferenceOracle)
    }

    pub fn fast(target_abs_err: f64) -> Result<Self> {
        Self::new(target_abs_err, Method::FastCriticalLine)
    }
}

/// A point evaluation request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalRequest {
    pub s: ComplexValue,
    pub options: EvalOptions,
}

impl EvalRequest {
    pub fn new(s: ComplexValue, target_abs_err: f64, method: Method) -> Result<Self> {
        let options = EvalOptions::new(target_abs_err, method)?;
        if method == Method::FastCriticalLine && s.re != 0.5 {
            return Err(Error::Domain(format!(
                "the fast path needs Re s = 1/2 exactly, got {}",
                s.re
            )));
        }
        Ok(Self { s, options })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaMode {
    Exact,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValue {
    pub t: f64,
    pub theta: f64,
    pub theta_prime: f64,
}

/// The Riemann–Siegel theta function and its derivative.
///
/// `Exact` uses the continuous branch of log Γ(1/4 + it/2); `Asymptotic`
/// uses the Stirling form through the t^{-3} term and requires t >= 10.
pub fn theta(t: f64, mode: ThetaMode) -> Result<ThetaValue> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(format!("theta needs t > 0, got {t}")));
    }
    match mode {
        ThetaMode::Exact => {
            Ok(ThetaValue {
                t,
                theta: theta_exact(t),
                theta_prime: theta_prime_exact(t),
            })
        }
        ThetaMode::Asymptotic => {
            if t < 10.0 {
                return Err(Error::Precision(format!(
                    "asymptotic theta needs t >= 10, got {t}"
                )));
            }
            let l = (t / TAU).ln();
            let t3 = t * t * t;
            let theta = 0.5 * t * l - 0.5 * t - PI / 8.0 + 1.0 / (48.0 * t) + 7.0 / (5760.0 * t3);
            let theta_prime = 0.5 * l - 1.0 / (48.0 * t * t) - 21.0 / (5760.0 * t3 * t);
            Ok(ThetaValue {
                t,
                theta,
                theta_prime,
            })
        }
    }
}

/// ϑ(t) in exact mode, for t > 0.
pub(crate) fn theta_exact(t: f64) -> f64 {
    let z = Complex64::new(0.25, 0.5 * t);
    ln_gamma(z).im - 0.5 * t * PI.ln()
}

/// ϑ'(t) in exact mode, for t > 0.
pub(crate) fn theta_prime_exact(t: f64) -> f64 {
    0.5 * digamma(Complex64::new(0.25, 0.5 * t)).re - 0.5 * PI.ln()
}

/// The remainder ϑ(t) - [(t/2) ln(t/2π) - t/2 - π/8], which is O(1/t).
pub fn theta_remainder(t: f64) -> Result<f64> {
    let exact = theta(t, ThetaMode::Exact)?.theta;
    Ok(exact - (0.5 * t * (t / TAU).ln() - 0.5 * t - PI / 8.0))
}

fn is_near_integer(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() < 1e-12).then_some(r as i64)
}

/// χ(s) = Γ((1-s)/2) / Γ(s/2) · π^{s-1/2}, so that ζ(s) = χ(s) ζ(1-s).
pub fn chi(s: ComplexValue) -> Result<ComplexValue> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {s}")));
    }
    if s.im.abs() < 1e-12 {
        if let Some(n) = is_near_integer(s.re) {
            if n >= 1 && n % 2 == 1 {
                return Err(Error::Domain(format!("chi has a pole at s = {n}")));
            }
            if n <= 0 && n % 2 == 0 {
                // 1/Γ(s/2) vanishes
                return Ok(Complex64::new(0.0, 0.0));
            }
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let log = ln_gamma((one - s) * 0.5) - ln_gamma(s * 0.5) + (s - 0.5) * PI.ln();
    Ok(log.exp())
}

fn check_t(t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("non-finite t = {t}")));
    }
    if t.abs() > MAX_IMAG {
        return Err(Error::Domain(format!("|t| = {} exceeds {MAX_IMAG:e}", t.abs())));
    }
    Ok(())
}

fn use_fast_path(t: f64, opts: &EvalOptions) -> Result<bool> {
    match opts.method {
        Method::ReferenceOracle => Ok(false),
        Method::FastCriticalLine => {
            if t < FAST_MIN_T {
                Err(Error::Domain(format!(
                    "the fast path needs |t| >= 2π, got {t}"
                )))
            } else {
                Ok(true)
            }
        }
        Method::Auto => Ok(t >= AUTO_FAST_MIN_T
            && t >= 200.0
            && riemann_siegel::remainder_bound(t) <= 0.5 * opts.target_abs_err),
    }
}

/// Hardy's Z(t) = e^{iϑ(t)} ζ(1/2+it), real for real t and even in t.
pub fn hardy_z(t: f64, opts: &EvalOptions) -> Result<f64> {
    check_t(t)?;
    let t = t.abs();
    if t == 0.0 {
        // ϑ(0) = 0
        return zeta_reference(Complex64::new(0.5, 0.0), opts.target_abs_err).map(|z| z.re);
    }
    if use_fast_path(t, opts)? {
        return Ok(riemann_siegel::hardy_z_rs(t, theta_exact(t)));
    }
    let th = theta_exact(t);
    let z = zeta_reference(Complex64::new(0.5, t), (0.5 * opts.target_abs_err).max(PRECISION_FLOOR))?;
    let rotated = Complex64::from_polar(1.0, th) * z;
    // rounding in ϑ itself sets a floor on how real the product can be
    let floor = 16.0 * f64::EPSILON * (th.abs() + 1.0) * (z.norm() + 1.0);
    if rotated.im.abs() > opts.target_abs_err.max(floor) {
        return Err(Error::Consistency(format!(
            "Im e^(i theta) zeta = {:e} at t = {t}",
            rotated.im
        )));
    }
    Ok(rotated.re)
}

/// ζ(1/2+it), through Z when the fast path applies.
pub fn zeta_half(t: f64, opts: &EvalOptions) -> Result<ComplexValue> {
    check_t(t)?;
    let at = t.abs();
    let z = if at > 0.0 && use_fast_path(at, opts)? {
        let th = theta_exact(at);
        Complex64::from_polar(1.0, -th) * riemann_siegel::hardy_z_rs(at, th)
    } else {
        zeta_reference(Complex64::new(0.5, at), opts.target_abs_err)?
    };
    Ok(if t < 0.0 { z.conj() } else { z })
}

/// General dispatch for a point request.
pub fn zeta(req: &EvalRequest) -> Result<ComplexValue> {
    if req.s.re == 0.5 && req.options.method != Method::ReferenceOracle {
        return zeta_half(req.s.im, &req.options);
    }
    zeta_reference(req.s, req.options.target_abs_err)
}

/// Z'(t) by a five-point central difference of Z.
pub fn hardy_z_deriv(t: f64, opts: &EvalOptions) -> Result<f64> {
    const H: f64 = 2e-3;
    let f = |x: f64| hardy_z(x, opts);
    let (m2, m1, p1, p2) = (f(t - 2.0 * H)?, f(t - H)?, f(t + H)?, f(t + 2.0 * H)?);
    Ok((m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * H))
}

const CAUCHY_RADIUS: f64 = 0.125;
const CAUCHY_NODES: usize = 32;

/// ζ'(1/2+it) from the Cauchy integral on a circle of radius 1/8 with 32
/// equispaced nodes, each evaluated by the oracle.
pub fn zeta_deriv_halfline(t: f64, target_abs_err: f64) -> Result<ComplexValue> {
    check_t(t)?;
    if t.abs() < 5.0 {
        return Err(Error::Domain(format!("zeta_deriv_halfline needs |t| >= 5, got {t}")));
    }
    if t < 0.0 {
        return zeta_deriv_halfline(-t, target_abs_err).map(|z| z.conj());
    }
    let node_tol = (target_abs_err * CAUCHY_RADIUS).max(PRECISION_FLOOR);
    let centre = Complex64::new(0.5, t);
    let mut acc = crate::summation::NeumaierComplex::new();
    for j in 0..CAUCHY_NODES {
        let dir = Complex64::from_polar(1.0, TAU * j as f64 / CAUCHY_NODES as f64);
        let w = centre + dir * CAUCHY_RADIUS;
        let z = zeta_reference(w, node_tol)?;
        acc.add(z * dir.conj());
    }
    Ok(acc.value() / (CAUCHY_NODES as f64 * CAUCHY_RADIUS))
}

/// d/dt |ζ(1/2+it)|² = 2 Re(i ζ'(1/2+it) conj ζ(1/2+it)).
pub fn abs_zeta_sq_deriv(t: f64, target_abs_err: f64) -> Result<f64> {
    let z = zeta_reference(Complex64::new(0.5, t), target_abs_err.max(PRECISION_FLOOR))?;
    let dz = zeta_deriv_halfline(t, target_abs_err)?;
    Ok(2.0 * (Complex64::i() * dz * z.conj()).re)
}

#[cfg(test)]
mod tests;
