//! The on-disk zero cache shared by all commands.

use std::path::{Path, PathBuf};

use critline_core::zeros::{read_cache, scan_zeros, write_cache, ScanSpec, ZeroCache};
use critline_core::{Error, Result};

pub const CACHE_FILE: &str = "zeros.txt";
/// Scans are extended to a multiple of this height so later runs can reuse them.
const SCAN_GRANULE: f64 = 500.0;

pub struct ZeroStore {
    pub path: PathBuf,
    pub allow_scan: bool,
}

impl ZeroStore {
    pub fn new(dir: &Path, allow_scan: bool) -> Self {
        Self {
            path: dir.join(CACHE_FILE),
            allow_scan,
        }
    }

    pub fn load(&self) -> Result<Option<ZeroCache>> {
        if self.path.exists() {
            read_cache(&self.path).map(Some)
        } else {
            Ok(None)
        }
    }

    /// A cache complete on (0, top], scanning and saving whatever is missing.
    pub fn covering(&self, top: f64) -> Result<ZeroCache> {
        let existing = self.load()?.filter(|c| c.t_min == 0.0 && c.count_below == 0);
        if let Some(c) = &existing {
            if c.t_max_verified >= top {
                return Ok(existing.expect("checked above"));
            }
        }
        let reach = existing.as_ref().map_or(0.0, |c| c.t_max_verified);
        if !self.allow_scan {
            return Err(Error::Coverage(format!(
                "zero cache {} reaches {reach}, need {top}; run zeros-scan or drop --no-scan",
                self.path.display()
            )));
        }
        let target = (top / SCAN_GRANULE).ceil() * SCAN_GRANULE;
        eprintln!("critline: scanning zeros on ({reach}, {target}]");
        let spec = ScanSpec::default();
        let cache = match existing {
            Some(mut c) => {
                c.extend(scan_zeros(reach, target, &spec)?)?;
                c
            }
            None => scan_zeros(0.0, target, &spec)?,
        };
        write_cache(&cache, &self.path)?;
        Ok(cache)
    }
}
