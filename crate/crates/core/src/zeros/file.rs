//! Zero cache files and external ordinate tables.
//!
//! Cache format:
//!
//! ```text
//! # zeta-zeros v1 t_max=<value>
//! # t_min=<value> count_below=<n> source=<scanned|ingested>
//! <index> <gamma> <tol> <z_prime_abs>
//! ```
//!
//! Ingestion also accepts bare ordinate lists, one per line, with `#`
//! comments.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use super::{ZeroCache, ZeroRecord, ZeroSource};
use crate::error::{Error, Result};
use crate::zeta_engine::{hardy_z, hardy_z_deriv, EvalOptions};

pub const CACHE_HEADER: &str = "# zeta-zeros v1";

/// Ingested ordinates must satisfy |Z(γ)| below this on the spot checks.
pub const SPOT_CHECK_MAX_ABS_Z: f64 = 1e-3;

fn render(cache: &ZeroCache) -> String {
    let source = match cache.source {
        ZeroSource::Scanned => "scanned",
        ZeroSource::Ingested => "ingested",
    };
    let mut out = format!(
        "{CACHE_HEADER} t_max={}\n# t_min={} count_below={} source={source}\n",
        cache.t_max_verified, cache.t_min, cache.count_below
    );
    for r in &cache.records {
        out.push_str(&format!("{} {} {:e} {}\n", r.index, r.gamma, r.tol, r.z_prime_abs));
    }
    out
}

/// Write the cache through a temporary file in the same directory, then
/// rename it into place.
pub fn write_cache(cache: &ZeroCache, path: &Path) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("{} has no file name", path.display())))?
        .to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp.{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(render(cache).as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::from(e)
    })
}

#[derive(Debug, Default)]
struct Header {
    t_max: Option<f64>,
    t_min: Option<f64>,
    count_below: Option<u64>,
    source: Option<ZeroSource>,
}

fn parse_header_fields(line: &str, header: &mut Header, lineno: usize) -> Result<()> {
    for field in line.trim_start_matches('#').split_whitespace() {
        let Some((key, value)) = field.split_once('=') else {
            continue;
        };
        let bad = |what: &str| Error::Format {
            line: lineno,
            msg: format!("bad {what} value {value:?}"),
        };
        match key {
            "t_max" => header.t_max = Some(value.parse().map_err(|_| bad("t_max"))?),
            "t_min" => header.t_min = Some(value.parse().map_err(|_| bad("t_min"))?),
            "count_below" => header.count_below = Some(value.parse().map_err(|_| bad("count_below"))?),
            "source" => {
                header.source = Some(match value {
                    "scanned" => ZeroSource::Scanned,
                    "ingested" => ZeroSource::Ingested,
                    _ => return Err(bad("source")),
                })
            }
            _ => {}
        }
    }
    Ok(())
}

/// Tolerance implied by the number of decimals written for an ordinate.
fn decimal_tolerance(token: &str) -> f64 {
    let mantissa = token.split(['e', 'E']).next().unwrap_or(token);
    let decimals = mantissa.split_once('.').map_or(0, |(_, frac)| frac.len());
    0.5 * 10f64.powi(-(decimals as i32))
}

struct Parsed {
    header: Header,
    has_header: bool,
    rows: Vec<(usize, Option<u64>, f64, Option<(f64, f64)>, f64)>,
}

fn parse(text: &str) -> Result<Parsed> {
    let mut header = Header::default();
    let mut has_header = false;
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if line.starts_with(CACHE_HEADER) {
                has_header = true;
            }
            parse_header_fields(line, &mut header, lineno)?;
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Format {
                    line: lineno,
                    msg: format!("not a finite number: {s:?}"),
                })
        };
        match cols.len() {
            1 => {
                let g = num(cols[0])?;
                rows.push((lineno, None, g, None, decimal_tolerance(cols[0])));
            }
            4 => {
                let index = cols[0].parse::<u64>().map_err(|_| Error::Format {
                    line: lineno,
                    msg: format!("bad index {:?}", cols[0]),
                })?;
                let g = num(cols[1])?;
                let tol = num(cols[2])?;
                let zp = num(cols[3])?;
                rows.push((lineno, Some(index), g, Some((tol, zp)), tol));
            }
            n => {
                return Err(Error::Format {
                    line: lineno,
                    msg: format!("expected 1 or 4 columns, found {n}"),
                })
            }
        }
    }
    for w in rows.windows(2) {
        if w[1].2 <= w[0].2 {
            return Err(Error::Format {
                line: w[1].0,
                msg: format!("ordinate {} does not exceed the previous {}", w[1].2, w[0].2),
            });
        }
    }
    Ok(Parsed {
        header,
        has_header,
        rows,
    })
}

/// Read a cache file written by [`write_cache`].
pub fn read_cache(path: &Path) -> Result<ZeroCache> {
    let text = fs::read_to_string(path)?;
    let p = parse(&text)?;
    if !p.has_header {
        return Err(Error::Format {
            line: 1,
            msg: format!("missing '{CACHE_HEADER}' header"),
        });
    }
    let t_max = p.header.t_max.ok_or(Error::Format {
        line: 1,
        msg: "header lacks t_max".into(),
    })?;
    let mut records = Vec::with_capacity(p.rows.len());
    for (lineno, index, gamma, extra, _) in p.rows {
        let (Some(index), Some((tol, z_prime_abs))) = (index, extra) else {
            return Err(Error::Format {
                line: lineno,
                msg: "cache lines need 4 columns".into(),
            });
        };
        records.push(ZeroRecord {
            index,
            gamma,
            tol,
            z_prime_abs,
        });
    }
    let cache = ZeroCache {
        records,
        t_min: p.header.t_min.unwrap_or(0.0),
        t_max_verified: t_max,
        count_below: p.header.count_below.unwrap_or(0),
        source: p.header.source.unwrap_or(ZeroSource::Scanned),
    };
    cache.validate()?;
    Ok(cache)
}

/// Load an external ordinate table and spot-check 1% of its entries.
///
/// Bare tables are assumed to start at the first zero; their verified
/// horizon is the last ordinate listed.
pub fn ingest_zero_table(path: &Path) -> Result<ZeroCache> {
    let text = fs::read_to_string(path)?;
    let p = parse(&text)?;
    let opts = EvalOptions::default();
    let count_below = p.header.count_below.unwrap_or(0);
    let t_min = p.header.t_min.unwrap_or(0.0);
    let t_max = match (p.header.t_max, p.rows.last()) {
        (Some(v), _) => v,
        (None, Some(last)) => last.2,
        (None, None) => 0.0,
    };

    let n = p.rows.len();
    let sample: Vec<usize> = if n == 0 { Vec::new() } else { (0..n).step_by(100).collect() };
    let bad: Vec<Option<(usize, f64, f64)>> = sample
        .par_iter()
        .map(|&k| {
            let (lineno, _, g, _, _) = p.rows[k];
            match hardy_z(g, &opts) {
                Ok(z) if z.abs() < SPOT_CHECK_MAX_ABS_Z => None,
                Ok(z) => Some((lineno, g, z)),
                Err(_) => Some((lineno, g, f64::NAN)),
            }
        })
        .collect();
    if let Some((lineno, g, z)) = bad.into_iter().flatten().next() {
        return Err(Error::Data(format!(
            "line {lineno}: |Z({g})| = {:e} is not below {SPOT_CHECK_MAX_ABS_Z:e}",
            z.abs()
        )));
    }

    let records: Vec<Result<ZeroRecord>> = p
        .rows
        .par_iter()
        .enumerate()
        .map(|(k, &(_, index, gamma, extra, tol))| {
            let z_prime_abs = match extra {
                Some((_, zp)) => zp,
                None => hardy_z_deriv(gamma, &opts)?.abs(),
            };
            Ok(ZeroRecord {
                index: index.unwrap_or(count_below + k as u64 + 1),
                gamma,
                tol,
                z_prime_abs,
            })
        })
        .collect();
    let cache = ZeroCache {
        records: records.into_iter().collect::<Result<_>>()?,
        t_min,
        t_max_verified: t_max,
        count_below,
        source: ZeroSource::Ingested,
    };
    cache.validate()?;
    Ok(cache)
}
