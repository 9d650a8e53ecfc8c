use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use epigeom::densities::{DEFAULT_RESOLUTION_1D, DEFAULT_RESOLUTION_2D, TABLE_KNOTS};
use epigeom::DensitySpec;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Seventeen significant digits, enough to round-trip any double.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

/// Writes through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().with_context(|| format!("{}: not a file path", path.display()))?;
    let tmp = dir.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.with_context(|| format!("{}: write failed", path.display()))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

#[derive(Debug, Clone, Serialize)]
struct TruncationRadius {
    density: String,
    family: &'static str,
    radius: f64,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    command_line: Vec<String>,
    config_digest: String,
    seed: u64,
    workers: usize,
    resolutions: BTreeMap<&'static str, usize>,
    truncation_radii: Vec<TruncationRadius>,
    tool_version: &'static str,
    /// Seconds per check, keyed by check name.
    wall_time: BTreeMap<String, f64>,
}

/// Inputs, timings and artifacts of one invocation.
pub struct Session {
    argv: Vec<String>,
    seed: u64,
    manifest_path: Option<PathBuf>,
    inputs: Vec<Value>,
    radii: Vec<TruncationRadius>,
    directions: Option<usize>,
    wall_time: BTreeMap<String, f64>,
}

impl Session {
    pub fn new(argv: Vec<String>, seed: u64, manifest_path: Option<PathBuf>) -> Self {
        Self {
            argv,
            seed,
            manifest_path,
            inputs: Vec::new(),
            radii: Vec::new(),
            directions: None,
            wall_time: BTreeMap::new(),
        }
    }

    /// Reads a density spec, reporting the file and the offending field on failure.
    pub fn load_density(&mut self, path: &Path) -> Result<DensitySpec> {
        let text = fs::read_to_string(path).with_context(|| format!("{}: cannot read", path.display()))?;
        let f = DensitySpec::from_json(&text).with_context(|| format!("{}", path.display()))?;
        self.inputs.push(f.to_json_value());
        self.radii.push(TruncationRadius {
            density: path.display().to_string(),
            family: f.family_name(),
            radius: f.truncation_radius(),
        });
        Ok(f)
    }

    pub fn record_input(&mut self, value: Value) {
        self.inputs.push(value);
    }

    pub fn set_directions(&mut self, count: usize) {
        self.directions = Some(count);
    }

    pub fn time<T>(&mut self, name: &str, run: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = run();
        *self.wall_time.entry(name.to_string()).or_default() += start.elapsed().as_secs_f64();
        out
    }

    /// Writes `text` to `out` (atomically) or to stdout, then the manifest.
    pub fn emit(&self, out: Option<&Path>, text: &str) -> Result<()> {
        match out {
            Some(path) => write_atomic(path, text.as_bytes())?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()?;
            }
        }
        let manifest =
            self.manifest_path.clone().or_else(|| out.map(|p| PathBuf::from(format!("{}.manifest.json", p.display()))));
        if let Some(path) = manifest {
            write_atomic(&path, to_json(&self.manifest())?.as_bytes())?;
        }
        Ok(())
    }

    fn manifest(&self) -> RunManifest {
        // Output locations do not change results, so they stay out of the digest.
        let mut args = Vec::new();
        let mut skip = false;
        for a in self.argv.iter().skip(1) {
            if skip {
                skip = false;
                continue;
            }
            if a == "--out" || a == "--manifest" {
                skip = true;
                continue;
            }
            if a.starts_with("--out=") || a.starts_with("--manifest=") {
                continue;
            }
            args.push(a.clone());
        }
        let config = json!({ "args": args, "inputs": self.inputs, "seed": self.seed });
        let mut resolutions = BTreeMap::from([
            ("grid_1d", DEFAULT_RESOLUTION_1D),
            ("grid_2d", DEFAULT_RESOLUTION_2D),
            ("table_knots", TABLE_KNOTS),
        ]);
        if let Some(d) = self.directions {
            resolutions.insert("directions", d);
        }
        RunManifest {
            command_line: self.argv.clone(),
            config_digest: hex::encode(Sha256::digest(config.to_string().as_bytes())),
            seed: self.seed,
            workers: rayon::current_num_threads(),
            resolutions,
            truncation_radii: self.radii.clone(),
            tool_version: env!("CARGO_PKG_VERSION"),
            wall_time: self.wall_time.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1.324_700_696_6e-300, -2.5e17] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            assert_eq!(s.split('e').next().unwrap().trim_start_matches('-').replace('.', "").len(), 17);
        }
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
