//! Constellation builders.

pub mod cube_split;
pub mod expmap;
pub mod grass_lattice;
pub mod quantile;
pub mod sopt;
pub mod zopt;

pub use cube_split::{build_cube_split, cube_split_codeword};
pub use expmap::{build_exp_map, build_exp_map_default, optimal_psk_radius, psk_symbols, qam_symbols};
pub use grass_lattice::{build_grass_lattice, GrassLatticeConfig};
pub use sopt::{build_man_opt, build_s_opt, smoothed_max_correlation};
pub use zopt::{
    build_z_opt, candidate_distances, optimize_zopt, zopt_structure, CandidateDistances, ZOptConfig,
    ZOptConstellation, ZOptStructure,
};

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{Constellation, Method};
use crate::packing::{exact_packing, load_packing, optimize_packing, PackingOptimizerConfig, PackingSet};

/// Settings shared by the builders.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BuildConfig {
    pub zopt: ZOptConfig,
    pub packing: PackingOptimizerConfig,
    pub grass_lattice: GrassLatticeConfig,
    /// Point set for S-Opt instead of the built-in packings.
    pub packing_file: Option<PathBuf>,
}

/// A built constellation, with the layered description when there is one.
#[derive(Clone, Debug, PartialEq)]
pub struct Built {
    pub constellation: Constellation,
    pub zopt: Option<ZOptConstellation>,
}

/// Packing used for S-Opt: the file if given, a closed form when one exists,
/// otherwise the optimizer.
pub fn sopt_packing(count: usize, seed: u64, config: &BuildConfig) -> Result<PackingSet> {
    if let Some(path) = &config.packing_file {
        let p = load_packing(path)?;
        if p.len() != count {
            return Err(Error::invalid(format!(
                "packing file {} holds {} points, {} needed",
                path.display(),
                p.len(),
                count
            )));
        }
        return Ok(p);
    }
    match exact_packing(count) {
        Ok(p) => Ok(p),
        Err(Error::UnsupportedCount { .. }) => optimize_packing(count, seed, &config.packing),
        Err(e) => Err(e),
    }
}

/// Builds `2^bits` codewords with `method`.
///
/// Grass-Lattice spends `bits / 2` bits on each grid axis and so needs an
/// even `bits`.
pub fn build(method: Method, bits: u32, seed: u64, config: &BuildConfig) -> Result<Built> {
    if bits == 0 || bits > 16 {
        return Err(Error::Unsupported(format!("B must lie in 1..=16, got {bits}")));
    }
    let count = 1usize << bits;
    let constellation = match method {
        Method::ZOpt => {
            let z = build_z_opt(bits, &config.zopt, seed)?;
            return Ok(Built {
                constellation: z.constellation.clone(),
                zopt: Some(z),
            });
        }
        Method::SOpt => build_s_opt(&sopt_packing(count, seed, config)?)?,
        Method::ManOpt => build_man_opt(count, seed, &config.packing)?,
        Method::ExpMap => build_exp_map_default(bits)?,
        Method::CubeSplit => build_cube_split(bits)?,
        Method::GrassLattice => {
            if bits % 2 == 1 {
                return Err(Error::Unsupported(format!(
                    "Grass-Lattice has 2^(2 B_r) codewords; B = {bits} is odd"
                )));
            }
            build_grass_lattice(bits / 2, &config.grass_lattice)?
        }
        Method::External => {
            return Err(Error::Unsupported("external constellations are read from files".into()));
        }
    };
    Ok(Built {
        constellation,
        zopt: None,
    })
}
