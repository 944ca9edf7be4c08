//! S(t) = (1/π) arg ζ(1/2+it), computed two independent ways, and winding
//! counts of zeros inside rectangles to the right of the critical line.
//!
//! The path method follows arg ζ continuously from 2 to 2+it to 1/2+it. On
//! Re s = 2 the principal argument already is the continuous one, because
//! Re ζ(2+it) >= 2 - π²/6 > 0; only the horizontal leg needs phase tracking.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::zeros::ZeroCache;
use crate::zeta_engine::{theta_exact, zeta_reference};

/// Offset used to realise the right limit S(γ+0) at an ordinate.
pub const RIGHT_LIMIT_OFFSET: f64 = 1e-7;
/// Smallest step the phase tracker may take before giving up.
pub const MIN_STEP: f64 = 1e-12;

/// Discretisation of the path 2 → 2+it → 1/2+it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArgPath {
    /// Initial step on the horizontal leg.
    pub max_step: f64,
    /// Largest accepted phase change between neighbouring samples.
    pub max_phase_step: f64,
    /// Accuracy of each ζ evaluation along the path.
    pub target_abs_err: f64,
}

impl Default for ArgPath {
    fn default() -> Self {
        Self {
            max_step: 0.25,
            max_phase_step: PI / 4.0,
            target_abs_err: 1e-12,
        }
    }
}

impl ArgPath {
    pub fn validate(&self) -> Result<()> {
        if !(self.max_phase_step > 0.0 && self.max_phase_step <= PI / 2.0) {
            return Err(Error::Parameter(format!(
                "max_phase_step must lie in (0, π/2], got {}",
                self.max_phase_step
            )));
        }
        if !(self.max_step > 0.0 && self.max_step <= 1.5) {
            return Err(Error::Parameter(format!(
                "max_step must lie in (0, 1.5], got {}",
                self.max_step
            )));
        }
        Ok(())
    }
}

/// Phase change along the segment a → b of a horizontal or vertical leg,
/// subdividing until every sub-step is below `max_phase`.
fn track_segment(
    f: &dyn Fn(f64) -> Result<Complex64>,
    a: f64,
    b: f64,
    fa: Complex64,
    fb: Complex64,
    max_phase: f64,
) -> Result<f64> {
    let mut total = 0.0;
    let mut stack = vec![(a, b, fa, fb)];
    while let Some((x, y, fx, fy)) = stack.pop() {
        let d = (fy / fx).arg();
        if d.abs() <= max_phase {
            total += d;
            continue;
        }
        if (y - x).abs() < MIN_STEP {
            return Err(Error::Proximity(format!(
                "phase tracking step fell below {MIN_STEP:e} near {x}"
            )));
        }
        let m = 0.5 * (x + y);
        let fm = f(m)?;
        // second half first so the first half is processed next
        stack.push((m, y, fm, fy));
        stack.push((x, m, fx, fm));
    }
    Ok(total)
}

/// S(t) by continuous variation of arg ζ along 2 → 2+it → 1/2+it.
///
/// If 1/2+it is numerically a zero, the right limit is taken by moving to
/// t + [`RIGHT_LIMIT_OFFSET`].
pub fn s_of_t_path(t: f64, path: &ArgPath) -> Result<f64> {
    path.validate()?;
    if !(t.is_finite() && t >= 10.0) {
        return Err(Error::Domain(format!("s_of_t_path needs t >= 10, got {t}")));
    }
    let tol = path.target_abs_err;
    let mut t = t;
    let mut end = zeta_reference(Complex64::new(0.5, t), tol)?;
    if end.norm() < 1e-8 {
        t += RIGHT_LIMIT_OFFSET;
        end = zeta_reference(Complex64::new(0.5, t), tol)?;
    }
    let f = |sigma: f64| zeta_reference(Complex64::new(sigma, t), tol);
    let start = f(2.0)?;
    let mut phase = start.arg();

    let steps = (1.5 / path.max_step).ceil() as usize;
    let h = 1.5 / steps as f64;
    let mut prev_sigma = 2.0;
    let mut prev = start;
    for k in 1..=steps {
        let sigma = if k == steps { 0.5 } else { 2.0 - h * k as f64 };
        let cur = if k == steps { end } else { f(sigma)? };
        phase += track_segment(&f, prev_sigma, sigma, prev, cur, path.max_phase_step)?;
        prev_sigma = sigma;
        prev = cur;
    }
    Ok(phase / PI)
}

/// S(t) = N(t) - 1 - ϑ(t)/π with N(t) from a zero cache.
pub fn s_of_t_counting(t: f64, cache: &ZeroCache) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(format!("s_of_t_counting needs t > 0, got {t}")));
    }
    let n = cache.count_le(t)? as f64;
    Ok(n - 1.0 - theta_exact(t) / PI)
}

/// Axis-parallel rectangle strictly inside 1/2 < σ < 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl Rectangle {
    pub fn new(sigma_lo: f64, sigma_hi: f64, t_lo: f64, t_hi: f64) -> Result<Self> {
        if !(0.5 < sigma_lo && sigma_lo < sigma_hi && sigma_hi < 1.0) {
            return Err(Error::Parameter(format!(
                "need 1/2 < sigma_lo < sigma_hi < 1, got [{sigma_lo}, {sigma_hi}]"
            )));
        }
        if !(t_lo.is_finite() && t_hi.is_finite() && t_lo <= t_hi) {
            return Err(Error::Parameter(format!("bad t range [{t_lo}, {t_hi}]")));
        }
        Ok(Self {
            sigma_lo,
            sigma_hi,
            t_lo,
            t_hi,
        })
    }
}

/// Smallest |ζ| accepted on a rectangle boundary.
pub const BOUNDARY_MIN_ABS: f64 = 1e-6;
const BOUNDARY_STEP: f64 = 0.05;

/// Raw winding number of `f` around the closed polygon through `corners`.
fn winding(f: &dyn Fn(Complex64) -> Result<Complex64>, corners: &[Complex64]) -> Result<f64> {
    let mut total = 0.0;
    for k in 0..corners.len() {
        let a = corners[k];
        let b = corners[(k + 1) % corners.len()];
        let edge = |u: f64| f(a + (b - a) * u);
        let n = ((b - a).norm() / BOUNDARY_STEP).ceil().max(1.0) as usize;
        let mut prev_u = 0.0;
        let mut prev = edge(0.0)?;
        for j in 1..=n {
            let u = j as f64 / n as f64;
            let cur = edge(u)?;
            total += track_segment(&edge, prev_u, u, prev, cur, PI / 4.0)?;
            prev_u = u;
            prev = cur;
        }
    }
    Ok(total / (2.0 * PI))
}

/// Winding number of ζ around the rectangle boundary, i.e. the number of
/// zeros inside counted with multiplicity.
pub fn offline_zero_count(rect: &Rectangle) -> Result<i64> {
    if rect.t_lo == rect.t_hi {
        return Ok(0);
    }
    let tol = 1e-12;
    let corners = [
        Complex64::new(rect.sigma_lo, rect.t_lo),
        Complex64::new(rect.sigma_hi, rect.t_lo),
        Complex64::new(rect.sigma_hi, rect.t_hi),
        Complex64::new(rect.sigma_lo, rect.t_hi),
    ];
    let guard = |s: Complex64| -> Result<Complex64> {
        let z = zeta_reference(s, tol)?;
        if z.norm() < BOUNDARY_MIN_ABS {
            return Err(Error::Proximity(format!(
                "|zeta| = {:e} on the rectangle boundary at {s}",
                z.norm()
            )));
        }
        Ok(z)
    };
    let raw = winding(&guard, &corners)?;
    let rounded = raw.round();
    if (raw - rounded).abs() >= 0.1 {
        return Err(Error::Resolution(format!("winding number {raw} is not near an integer")));
    }
    Ok(rounded as i64)
}
