//! Critical-line zeros: Gram points, sign-change scanning with a completeness
//! audit against N(T), and a cache of refined ordinates.

mod file;

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::argument::{s_of_t_path, ArgPath};
use crate::error::{Error, Result};
use crate::zeta_engine::{hardy_z, theta, theta_exact, theta_prime_exact, EvalOptions, ThetaMode};

pub use file::{ingest_zero_table, read_cache, write_cache, CACHE_HEADER};

/// One refined zero on the critical line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroRecord {
    /// 1-based rank among all zeros with positive ordinate.
    pub index: u64,
    pub gamma: f64,
    /// Width of the final sign-change bracket.
    pub tol: f64,
    /// Estimate of |Z'(γ)|.
    pub z_prime_abs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroSource {
    Scanned,
    Ingested,
}

/// Ordinates in (t_min, t_max_verified], complete for that range.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroCache {
    pub records: Vec<ZeroRecord>,
    pub t_min: f64,
    pub t_max_verified: f64,
    /// N(t_min): zeros at or below the start of the covered range.
    pub count_below: u64,
    pub source: ZeroSource,
}

impl ZeroCache {
    pub fn empty(source: ZeroSource) -> Self {
        Self {
            records: Vec::new(),
            t_min: 0.0,
            t_max_verified: 0.0,
            count_below: 0,
            source,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        lo >= self.t_min && hi <= self.t_max_verified
    }

    pub fn require(&self, lo: f64, hi: f64) -> Result<()> {
        if self.covers(lo, hi) {
            Ok(())
        } else {
            Err(Error::Coverage(format!(
                "zero cache covers ({}, {}], need [{lo}, {hi}]",
                self.t_min, self.t_max_verified
            )))
        }
    }

    /// N(t), the number of ordinates in (0, t].
    pub fn count_le(&self, t: f64) -> Result<u64> {
        self.require(t, t)?;
        let k = self.records.partition_point(|r| r.gamma <= t);
        Ok(self.count_below + k as u64)
    }

    /// Records with T < γ <= T + H.
    pub fn in_range(&self, lo: f64, hi: f64) -> Result<&[ZeroRecord]> {
        self.require(lo, hi)?;
        let a = self.records.partition_point(|r| r.gamma <= lo);
        let b = self.records.partition_point(|r| r.gamma <= hi);
        Ok(&self.records[a..b])
    }

    pub fn ordinates_in(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        Ok(self.in_range(lo, hi)?.iter().map(|r| r.gamma).collect())
    }

    /// Append a cache that starts where this one ends.
    pub fn extend(&mut self, next: ZeroCache) -> Result<()> {
        if next.t_min != self.t_max_verified {
            return Err(Error::Consistency(format!(
                "cannot join caches ending at {} and starting at {}",
                self.t_max_verified, next.t_min
            )));
        }
        let expected = self.count_below + self.records.len() as u64;
        if next.count_below != expected {
            return Err(Error::Consistency(format!(
                "zero counts do not join: {} then {}",
                expected, next.count_below
            )));
        }
        self.records.extend(next.records);
        self.t_max_verified = next.t_max_verified;
        Ok(())
    }

    /// Check ordering and index continuity.
    pub fn validate(&self) -> Result<()> {
        for (k, r) in self.records.iter().enumerate() {
            if r.index != self.count_below + k as u64 + 1 {
                return Err(Error::Consistency(format!(
                    "record {k} has index {}, expected {}",
                    r.index,
                    self.count_below + k as u64 + 1
                )));
            }
            if k > 0 && r.gamma <= self.records[k - 1].gamma {
                return Err(Error::Consistency(format!("ordinates not increasing at index {}", r.index)));
            }
            if r.gamma <= self.t_min || (self.source == ZeroSource::Scanned && r.gamma > self.t_max_verified) {
                return Err(Error::Consistency(format!("ordinate {} outside cache range", r.gamma)));
            }
        }
        Ok(())
    }
}

/// Gram point g_n, the solution of ϑ(t) = nπ on the increasing branch.
pub fn gram_point(n: i64) -> Result<f64> {
    if n < -1 {
        return Err(Error::Parameter(format!("gram_point needs n >= -1, got {n}")));
    }
    let target = n as f64 * PI;
    // ϑ ≈ (t/2) log(t/2πe) - π/8 inverted through Lambert W
    let x = (n as f64 + 0.125) / std::f64::consts::E;
    let mut t = 2.0 * PI * std::f64::consts::E * lambert_w0(x).exp();
    t = t.max(7.0);
    for _ in 0..50 {
        let f = theta_exact(t) - target;
        let d = theta_prime_exact(t);
        let step = f / d;
        t -= step;
        t = t.max(6.3);
        let resid = (theta_exact(t) - target).abs();
        if resid < 1e-10_f64.max(4.0 * f64::EPSILON * target.abs()) && step.abs() < 1e-6 {
            return Ok(t);
        }
    }
    Err(Error::Numeric(format!("Newton iteration for gram point {n} did not converge")))
}

/// Principal branch of Lambert's W for x >= -1/e.
fn lambert_w0(x: f64) -> f64 {
    let mut w = if x < 1.0 { x / (1.0 + x).max(0.3) } else { x.ln() - x.ln().ln().max(0.0) };
    for _ in 0..60 {
        let e = w.exp();
        let f = w * e - x;
        let d = e * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
        let dw = f / d;
        w -= dw;
        if dw.abs() < 1e-15 * (1.0 + w.abs()) {
            break;
        }
    }
    w
}

/// N(T) evaluated as ϑ(T)/π + 1 + S(T) with S from the path method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroCount {
    pub raw: f64,
    pub count: u64,
}

/// Largest tolerated distance of the raw count from an integer.
pub const COUNT_TOLERANCE: f64 = 1e-3;

pub fn count_zeros_nt(t: f64) -> Result<ZeroCount> {
    if !(t.is_finite() && t >= 10.0) {
        return Err(Error::Domain(format!("count_zeros_nt needs T >= 10, got {t}")));
    }
    let th = theta(t, ThetaMode::Exact)?.theta;
    let s = s_of_t_path(t, &ArgPath::default())?;
    let raw = th / PI + 1.0 + s;
    let rounded = raw.round();
    if (raw - rounded).abs() > COUNT_TOLERANCE || rounded < 0.0 {
        return Err(Error::Consistency(format!(
            "N({t}) = {raw} is not within {COUNT_TOLERANCE} of an integer"
        )));
    }
    Ok(ZeroCount {
        raw,
        count: rounded as u64,
    })
}

/// Scanner controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSpec {
    /// Grid step is `grid_factor / ϑ'(t)`.
    pub grid_factor: f64,
    /// Final bracket width for every ordinate.
    pub tol: f64,
    /// Number of grid halvings attempted when the count audit fails.
    pub max_rescans: u32,
    pub eval: EvalOptions,
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self {
            grid_factor: 0.2,
            tol: 1e-9,
            max_rescans: 4,
            eval: EvalOptions::default(),
        }
    }
}

/// Lowest height scanned; there are no zeros with 0 < γ < 10.
pub const SCAN_FLOOR: f64 = 10.0;
/// Highest height the scanner accepts.
pub const SCAN_CEILING: f64 = 1e6;
const CHUNK_GAPS: f64 = 64.0;

#[derive(Debug, Clone, Copy)]
struct Bracket {
    lo: f64,
    hi: f64,
    z_lo: f64,
}

fn grid_step(t: f64, factor: f64) -> f64 {
    // ϑ' is small below t ≈ 20; cap the step there
    let d = theta_prime_exact(t).max(0.25);
    (factor / d).min(0.5)
}

fn chunk_bounds(lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut a = lo;
    while a < hi {
        let w = CHUNK_GAPS * crate::quadrature::mean_zero_spacing(a);
        let b = if hi - a <= 1.5 * w { hi } else { a + w };
        out.push((a, b));
        a = b;
    }
    out
}

fn brackets_in(lo: f64, hi: f64, factor: f64, eval: &EvalOptions) -> Result<Vec<Bracket>> {
    let mut out = Vec::new();
    let mut a = lo;
    let mut za = hardy_z(a, eval)?;
    while a < hi {
        let b = (a + grid_step(a, factor)).min(hi);
        let zb = hardy_z(b, eval)?;
        if za == 0.0 {
            // a grid point hit the zero; bracket it symmetrically
            let h = 0.5 * (b - a);
            out.push(Bracket {
                lo: a - h,
                hi: a + h,
                z_lo: hardy_z(a - h, eval)?,
            });
        } else if za.signum() != zb.signum() && zb != 0.0 {
            out.push(Bracket { lo: a, hi: b, z_lo: za });
        }
        a = b;
        za = zb;
    }
    Ok(out)
}

fn refine(br: Bracket, spec: &ScanSpec) -> Result<(f64, f64, f64)> {
    let (mut lo, mut hi, z_lo) = (br.lo, br.hi, br.z_lo);
    while hi - lo > spec.tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let zm = hardy_z(mid, &spec.eval)?;
        if zm == 0.0 {
            lo = mid - 0.25 * spec.tol;
            hi = mid + 0.25 * spec.tol;
            break;
        }
        if zm.signum() == z_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let gamma = 0.5 * (lo + hi);
    let slope = crate::zeta_engine::hardy_z_deriv(gamma, &spec.eval)?;
    if slope == 0.0 {
        return Err(Error::Numeric(format!("Z' vanishes at the sign change near {gamma}")));
    }
    // Newton started just outside the refined bracket must land back on it
    let offset = (64.0 * spec.tol).min(0.25 * (br.hi - br.lo));
    for start in [gamma - offset, gamma + offset] {
        let mut x = start;
        for _ in 0..20 {
            let step = hardy_z(x, &spec.eval)? / crate::zeta_engine::hardy_z_deriv(x, &spec.eval)?;
            x -= step;
            if !x.is_finite() || step.abs() < 0.1 * spec.tol {
                break;
            }
        }
        if !((x - gamma).abs() <= 2.0 * spec.tol + 1e-10) {
            return Err(Error::Numeric(format!(
                "Newton from {start} reached {x}, not the bracketed zero {gamma}; possible multiple zero"
            )));
        }
    }
    Ok((gamma, hi - lo, slope.abs()))
}

fn scan_once(lo: f64, hi: f64, factor: f64, spec: &ScanSpec) -> Result<Vec<(f64, f64, f64)>> {
    let chunks = chunk_bounds(lo, hi);
    let found: Vec<Result<Vec<(f64, f64, f64)>>> = chunks
        .par_iter()
        .map(|&(a, b)| {
            brackets_in(a, b, factor, &spec.eval)?
                .into_iter()
                .map(|br| refine(br, spec))
                .collect()
        })
        .collect();
    let mut all = Vec::new();
    for part in found {
        all.extend(part?);
    }
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    all.dedup_by(|a, b| (a.0 - b.0).abs() < spec.tol);
    Ok(all)
}

/// Locate every zero in (t_lo, t_hi] and verify completeness against N(T).
pub fn scan_zeros(t_lo: f64, t_hi: f64, spec: &ScanSpec) -> Result<ZeroCache> {
    if !(t_lo.is_finite() && t_hi.is_finite() && 0.0 <= t_lo && t_lo < t_hi && t_hi <= SCAN_CEILING) {
        return Err(Error::Parameter(format!(
            "scan range must satisfy 0 <= t_lo < t_hi <= {SCAN_CEILING:e}, got [{t_lo}, {t_hi}]"
        )));
    }
    if !(spec.tol > 0.0 && spec.tol <= 1e-6 && spec.grid_factor > 0.0 && spec.grid_factor <= 0.2) {
        return Err(Error::Parameter(format!(
            "scan needs 0 < tol <= 1e-6 and 0 < grid_factor <= 0.2, got {} and {}",
            spec.tol, spec.grid_factor
        )));
    }
    let lo = t_lo.max(SCAN_FLOOR);
    let mut cache = ZeroCache {
        records: Vec::new(),
        t_min: t_lo,
        t_max_verified: t_hi,
        count_below: 0,
        source: ZeroSource::Scanned,
    };
    if t_hi <= lo {
        return Ok(cache);
    }
    let base = count_zeros_nt(lo)?.count;
    let top = count_zeros_nt(t_hi)?.count;
    let expected = top.checked_sub(base).ok_or_else(|| {
        Error::Consistency(format!("N({t_hi}) = {top} is below N({lo}) = {base}"))
    })?;
    let mut factor = spec.grid_factor;
    let mut found = Vec::new();
    for _ in 0..=spec.max_rescans {
        found = scan_once(lo, t_hi, factor, spec)?;
        if found.len() as u64 == expected {
            break;
        }
        factor *= 0.5;
    }
    if found.len() as u64 != expected {
        return Err(locate_miss(lo, t_hi, &found, base));
    }
    cache.count_below = base;
    cache.records = found
        .into_iter()
        .enumerate()
        .map(|(k, (gamma, tol, zp))| ZeroRecord {
            index: base + k as u64 + 1,
            gamma,
            tol,
            z_prime_abs: zp,
        })
        .collect();
    Ok(cache)
}

/// Narrow a failed audit down to the first chunk whose count disagrees.
fn locate_miss(lo: f64, hi: f64, found: &[(f64, f64, f64)], base: u64) -> Error {
    let mut prev = base;
    for (a, b) in chunk_bounds(lo, hi) {
        let n_b = match count_zeros_nt(b) {
            Ok(c) => c.count,
            Err(e) => return e,
        };
        let got = found.iter().filter(|z| z.0 > a && z.0 <= b).count() as i64;
        let want = n_b as i64 - prev as i64;
        if got != want {
            return Error::MissedZero {
                lo: a,
                hi: b,
                expected: want,
                found: got,
            };
        }
        prev = n_b;
    }
    Error::MissedZero {
        lo,
        hi,
        expected: prev as i64 - base as i64,
        found: found.len() as i64,
    }
}
