//! Mesh families used by the experiments: generated distorted quadrilaterals
//! and the shipped Voronoi / non-convex ladders (see `scripts/make_fixtures.py`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{generate_distorted_quads, parse_mesh, PolygonalMesh};

const VORONOI: [(&str, &str); 4] = [
    ("voronoi_16", include_str!("../fixtures/voronoi_16.mesh")),
    ("voronoi_64", include_str!("../fixtures/voronoi_64.mesh")),
    ("voronoi_256", include_str!("../fixtures/voronoi_256.mesh")),
    ("voronoi_1024", include_str!("../fixtures/voronoi_1024.mesh")),
];

const NONCONVEX: [(&str, &str); 4] = [
    ("nonconvex_16", include_str!("../fixtures/nonconvex_16.mesh")),
    ("nonconvex_64", include_str!("../fixtures/nonconvex_64.mesh")),
    ("nonconvex_256", include_str!("../fixtures/nonconvex_256.mesh")),
    ("nonconvex_1024", include_str!("../fixtures/nonconvex_1024.mesh")),
];

/// Default distortion of the generated quadrilateral family.
pub const DISTORTION_AMPLITUDE: f64 = 0.2;
pub const DEFAULT_SEED: u64 = 42;
pub const LEVELS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshFamily {
    Distorted,
    Voronoi,
    Nonconvex,
}

impl MeshFamily {
    pub const ALL: [MeshFamily; 3] = [MeshFamily::Distorted, MeshFamily::Voronoi, MeshFamily::Nonconvex];

    /// Mesh of refinement `level` (0-based, coarsest first).
    pub fn mesh(self, level: usize, seed: u64) -> Result<PolygonalMesh> {
        if level >= LEVELS {
            return Err(Error::InvalidArgument(format!(
                "level {level} out of range (0..{LEVELS})"
            )));
        }
        match self {
            MeshFamily::Distorted => {
                generate_distorted_quads(4 << level, DISTORTION_AMPLITUDE, seed.wrapping_add(level as u64))
            }
            MeshFamily::Voronoi => parse_mesh(VORONOI[level].1),
            MeshFamily::Nonconvex => parse_mesh(NONCONVEX[level].1),
        }
    }

    pub fn ladder(self, levels: usize, seed: u64) -> Result<Vec<PolygonalMesh>> {
        (0..levels).map(|l| self.mesh(l, seed)).collect()
    }

    pub fn finest(self, seed: u64) -> Result<PolygonalMesh> {
        self.mesh(LEVELS - 1, seed)
    }

    pub fn level_name(self, level: usize) -> String {
        match self {
            MeshFamily::Distorted => format!("distorted_{}", 4 << level),
            MeshFamily::Voronoi => VORONOI[level.min(LEVELS - 1)].0.to_string(),
            MeshFamily::Nonconvex => NONCONVEX[level.min(LEVELS - 1)].0.to_string(),
        }
    }
}

impl fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeshFamily::Distorted => "distorted",
            MeshFamily::Voronoi => "voronoi",
            MeshFamily::Nonconvex => "nonconvex",
        })
    }
}

impl FromStr for MeshFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distorted" => Ok(MeshFamily::Distorted),
            "voronoi" => Ok(MeshFamily::Voronoi),
            "nonconvex" | "non-convex" => Ok(MeshFamily::Nonconvex),
            other => Err(Error::InvalidArgument(format!("unknown mesh family {other:?}"))),
        }
    }
}
