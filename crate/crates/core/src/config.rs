//! Run configuration in TOML, with every model default filled in, and the
//! provenance stamp written into output files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{enlarge_domain, DomainBox, Point3};
use crate::growth::{GrowthParameters, StarterSpec};
use crate::model::ModelParameters;
use crate::network::VascularNetwork;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed; repetition n uses `seed + n`.
    pub seed: u64,
    pub repetitions: usize,
    /// DGF network. Without one, the synthetic starter is used.
    pub input: Option<PathBuf>,
    pub output: PathBuf,
    pub cells: [usize; 3],
    /// Region of interest in m. Defaults to the bounding box of the input
    /// network, or to the starter's cube.
    pub roi: Option<RegionConfig>,
    /// Ω is the roi enlarged by this fraction of its extent on every side.
    /// The synthetic starter uses its own value.
    pub enlargement: f64,
    /// Growth phases to run, in order.
    pub phases: Vec<u8>,
    pub export: ExportConfig,
    pub sweep: SweepConfig,
    pub starter: StarterSpec,
    pub model: ModelParameters,
    pub growth: GrowthParameters,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub lower: [f64; 3],
    pub upper: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExportConfig {
    pub dgf: bool,
    pub vtk: bool,
    pub csv: bool,
    /// Network snapshot after every growth step.
    pub checkpoints: bool,
}

impl Default for ExportConfig {
    fn default() -> Self {
        Self { dgf: true, vtk: true, csv: true, checkpoints: true }
    }
}

/// Parameter grid for the Murray exponent and the consumption rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub gamma: Vec<f64>,
    /// mmHg/s.
    pub max_consumption: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { gamma: vec![3.0, 3.5], max_consumption: vec![3.0, 4.0] }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            repetitions: 20,
            input: None,
            output: PathBuf::from("out"),
            cells: [20, 20, 20],
            roi: None,
            enlargement: 0.1,
            phases: vec![1, 2, 3],
            export: ExportConfig::default(),
            sweep: SweepConfig::default(),
            starter: StarterSpec::default(),
            model: ModelParameters::default(),
            growth: GrowthParameters::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Full TOML including every default.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.growth.validate()?;
        if self.cells.iter().any(|&c| c < 2) {
            return Err(Error::Config("every grid axis needs at least 2 cells".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if !(self.enlargement >= 0.0) {
            return Err(Error::Config("enlargement must be non-negative".into()));
        }
        let mut last = 0;
        for &p in &self.phases {
            if !(1..=3).contains(&p) || p <= last {
                return Err(Error::Config("phases must be increasing values from 1 to 3".into()));
            }
            last = p;
        }
        if let Some(r) = self.roi {
            DomainBox::new(Point3::from(r.lower), Point3::from(r.upper))?;
        }
        for &g in &self.sweep.gamma {
            GrowthParameters { gamma: g, ..self.growth }.validate()?;
        }
        if self.sweep.max_consumption.iter().any(|&m| !(m >= 0.0)) {
            return Err(Error::Config("sweep consumption rates must be non-negative".into()));
        }
        Ok(())
    }

    /// Lower-case hex SHA-256 of the canonical TOML form. The output
    /// directory is left out so that relocated runs hash alike.
    pub fn hash(&self) -> Result<String> {
        let canon = Self { output: PathBuf::new(), ..self.clone() };
        Ok(hex::encode(Sha256::digest(canon.to_toml()?.as_bytes())))
    }

    pub fn provenance(&self) -> Result<Provenance> {
        Ok(Provenance {
            config_sha256: self.hash()?,
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        })
    }

    /// Roi and Ω for a given starting network.
    pub fn regions(&self, net: &VascularNetwork) -> Result<(DomainBox, DomainBox)> {
        if self.input.is_none() && self.roi.is_none() {
            return Ok((self.starter.roi()?, self.starter.domain()?));
        }
        let roi = match (self.roi, &self.input) {
            (Some(r), _) => DomainBox::new(Point3::from(r.lower), Point3::from(r.upper))?,
            (None, Some(_)) => {
                let mut nodes = net.nodes().iter().map(|n| n.position);
                let first = nodes.next().ok_or_else(|| Error::Config("input network is empty".into()))?;
                let (mut lo, mut hi) = nodes.fold((first, first), |(lo, hi), p| (lo.inf(&p), hi.sup(&p)));
                // flat inputs (a single straight vessel, a planar mesh) still need a 3D box
                let extent = (hi - lo).max();
                let r_max = net.segments().iter().map(|s| s.radius).fold(0.0, f64::max);
                let pad = (0.5 * extent).max(2.0 * r_max);
                for k in 0..3 {
                    if hi[k] - lo[k] < 1e-9 * extent.max(f64::MIN_POSITIVE) {
                        lo[k] -= pad;
                        hi[k] += pad;
                    }
                }
                DomainBox::new(lo, hi)?
            }
            (None, None) => unreachable!(),
        };
        Ok((roi, enlarge_domain(&roi, self.enlargement)))
    }
}

/// Stamp identifying the configuration, seed and toolkit version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub seed: u64,
    pub version: String,
}

impl Provenance {
    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn line(&self) -> String {
        format!("microvasc {} config_sha256={} seed={}", self.version, self.config_sha256, self.seed)
    }

    /// `# `-prefixed line for CSV files.
    pub fn csv_comment(&self) -> String {
        format!("# {}\n", self.line())
    }
}
