//! File formats: constellation JSON, run configuration and provenance.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::DetectorKind;
use crate::constellations::{GrassLatticeConfig, ZOptConfig};
use crate::error::{Error, Result};
use crate::manifold::{Codeword, Constellation, Method};
use crate::packing::PackingOptimizerConfig;

pub const TOOL_NAME: &str = "zopt";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CONSTELLATION_FORMAT: &str = "1.0";
pub const RUN_CONFIG_FORMAT: &str = "1.0";

/// Accepts `major.minor` versions whose major part is at most `supported`.
pub fn check_format_version(found: &str, supported: u32, what: &str) -> Result<()> {
    let major = found
        .split('.')
        .next()
        .and_then(|m| m.trim().parse::<u32>().ok())
        .ok_or_else(|| Error::format(1, format!("malformed {what} format version '{found}'")))?;
    if major > supported {
        return Err(Error::format(
            1,
            format!("{what} format {found} is newer than supported major version {supported}"),
        ));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(config: &RunConfig) -> Self {
        Self {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            config_hash: config.hash(),
            seed: config.seed,
        }
    }

    /// Comment lines for the top of a CSV file.
    pub fn csv_header(&self) -> String {
        format!(
            "# tool: {} {}\n# config_hash: {}\n# seed: {}\n",
            self.tool, self.version, self.config_hash, self.seed
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationFile {
    pub format_version: String,
    pub method: Method,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub bits: Option<u32>,
    #[serde(rename = "C")]
    pub count: usize,
    #[serde(rename = "T")]
    pub block_length: usize,
    #[serde(rename = "M")]
    pub streams: usize,
    pub codewords: Vec<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl ConstellationFile {
    pub fn from_constellation(x: &Constellation, provenance: Option<Provenance>) -> Self {
        Self {
            format_version: CONSTELLATION_FORMAT.into(),
            method: x.method(),
            bits: x.bits(),
            count: x.len(),
            block_length: 2,
            streams: 1,
            codewords: x
                .codewords()
                .iter()
                .map(|c| [c.c0().re, c.c0().im, c.c1().re, c.c1().im])
                .collect(),
            provenance,
        }
    }

    pub fn to_constellation(&self) -> Result<Constellation> {
        check_format_version(&self.format_version, 1, "constellation")?;
        if self.block_length != 2 || self.streams != 1 {
            return Err(Error::Unsupported(format!(
                "only T = 2, M = 1 constellations are supported (got T = {}, M = {})",
                self.block_length, self.streams
            )));
        }
        if self.count != self.codewords.len() {
            return Err(Error::format(
                1,
                format!("declared C = {} but {} codewords present", self.count, self.codewords.len()),
            ));
        }
        if let Some(b) = self.bits {
            if b >= usize::BITS || 1usize << b != self.count {
                return Err(Error::format(1, format!("B = {b} does not match C = {}", self.count)));
            }
        }
        let codewords = self
            .codewords
            .iter()
            .enumerate()
            .map(|(k, v)| {
                Codeword::new(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]))
                    .map_err(|e| Error::format(k + 1, format!("codeword {k}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Constellation::new(self.method, codewords)
    }
}

pub fn constellation_to_json(x: &Constellation, provenance: Option<Provenance>) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ConstellationFile::from_constellation(x, provenance))?)
}

pub fn constellation_from_json(text: &str) -> Result<Constellation> {
    let file: ConstellationFile = serde_json::from_str(text)?;
    file.to_constellation()
}

pub fn write_constellation(path: &Path, x: &Constellation, provenance: Option<Provenance>) -> Result<()> {
    write_text(path, &constellation_to_json(x, provenance)?)
}

pub fn read_constellation(path: &Path) -> Result<Constellation> {
    let text = read_text(path)?;
    constellation_from_json(&text)
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        context: format!("reading {}", path.display()),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        context: format!("writing {}", path.display()),
        source,
    })
}

/// Every parameter a run depends on. The hash of its JSON form identifies
/// the run in output headers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub format_version: String,
    pub command: String,
    pub method: Option<Method>,
    pub bits: Option<u32>,
    pub seed: u64,
    pub zopt: ZOptConfig,
    pub packing: PackingOptimizerConfig,
    pub grass_lattice: GrassLatticeConfig,
    pub packing_file: Option<PathBuf>,
    pub constellation: Option<PathBuf>,
    pub inputs: Vec<PathBuf>,
    pub detectors: Vec<DetectorKind>,
    pub snr_db: Vec<f64>,
    pub trials: u64,
    pub antennas: usize,
    pub leaf_size: usize,
    pub bound_range: Option<(usize, usize)>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            format_version: RUN_CONFIG_FORMAT.into(),
            command: String::new(),
            method: None,
            bits: None,
            seed: 0,
            zopt: ZOptConfig::default(),
            packing: PackingOptimizerConfig::default(),
            grass_lattice: GrassLatticeConfig::default(),
            packing_file: None,
            constellation: None,
            inputs: Vec::new(),
            detectors: Vec::new(),
            snr_db: Vec::new(),
            trials: 0,
            antennas: 1,
            leaf_size: crate::detectors::DEFAULT_LEAF_SIZE,
            bound_range: None,
        }
    }
}

impl RunConfig {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        check_format_version(&cfg.format_version, 1, "run configuration")?;
        Ok(cfg)
    }

    /// SHA-256 of the compact JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("run configuration serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellations::build_cube_split;

    #[test]
    fn constellation_round_trip() {
        let x = build_cube_split(4).unwrap();
        let json = constellation_to_json(&x, None).unwrap();
        let back = constellation_from_json(&json).unwrap();
        assert_eq!(back, x);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["B"], 4);
        assert_eq!(v["T"], 2);
        assert_eq!(v["M"], 1);
        assert_eq!(v["method"], "cube-split");
        assert_eq!(v["codewords"].as_array().unwrap().len(), 16);
    }

    #[test]
    fn rejects_future_and_inconsistent_files() {
        let x = build_cube_split(2).unwrap();
        let mut f = ConstellationFile::from_constellation(&x, None);
        f.format_version = "2.0".into();
        assert!(matches!(f.to_constellation(), Err(Error::Format { .. })));
        let mut f = ConstellationFile::from_constellation(&x, None);
        f.format_version = "1.7".into();
        assert!(f.to_constellation().is_ok());
        f.count = 3;
        assert!(f.to_constellation().is_err());
        let mut f = ConstellationFile::from_constellation(&x, None);
        f.codewords[1] = [2.0, 0.0, 0.0, 0.0];
        assert!(matches!(f.to_constellation(), Err(Error::Format { line: 2, .. })));
        let mut f = ConstellationFile::from_constellation(&x, None);
        f.block_length = 3;
        assert!(f.to_constellation().is_err());
        assert!(constellation_from_json("{\"format_version\":\"1.0\",\"bogus\":1}").is_err());
    }

    #[test]
    fn run_config_round_trip_and_hash() {
        let cfg = RunConfig {
            command: "simulate".into(),
            method: Some(Method::ZOpt),
            bits: Some(6),
            seed: 42,
            snr_db: vec![0.0, 4.5, 1e-3],
            trials: 1000,
            antennas: 2,
            detectors: vec![DetectorKind::Glrt, DetectorKind::Zopt],
            bound_range: Some((3, 64)),
            ..RunConfig::default()
        };
        let back = RunConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
        assert_eq!(cfg.hash().len(), 64);
        let other = RunConfig { seed: 43, ..cfg.clone() };
        assert_ne!(other.hash(), cfg.hash());
        assert!(RunConfig::from_json("{\"unknown_field\": 1}").is_err());
        assert!(RunConfig::from_json("{\"format_version\": \"9.0\"}").is_err());
        let p = Provenance::new(&cfg);
        assert!(p.csv_header().contains("# seed: 42"));
    }
}
