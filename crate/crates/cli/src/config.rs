//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "n": 2,
//!   "links": [{"family": "grud", "v": 0.1, "x": 0.23},
//!             {"family": "werner", "p": 0.3}],
//!   "channels": [{"link": 0, "type": "bit_flip", "param": 0.15, "sides": "both"}],
//!   "filters": {"first": 1.0, "last": 1.0, "middle": [[0.8, 0.97]]},
//!   "scan": {"axes": [{"path": "links.1.p", "min": 0.25, "max": 0.3, "steps": 11}]},
//!   "seed": 0
//! }
//! ```

use serde::{Deserialize, Serialize};
use serde_json::Value;

use netfilter_core::{
    amplitude_damping, apply_channel, bit_flip, grud_state, product_state, pure_theta_state,
    validate_density, werner_state, x_state, ComplexMatrix, DensityMatrix4, GrudParams,
    MeasurementSettings, NetworkFilterSpec, NetworkSpec, ProductParams, PureThetaParam, Sides,
    WernerParam, XParams,
};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum LinkDescriptor {
    Grud { v: f64, x: f64 },
    Werner { p: f64 },
    X { x1: f64, x2: f64, x3: f64, x4: f64 },
    PureTheta { theta: f64 },
    Product { m: [f64; 3], n: [f64; 3] },
    Explicit { matrix: ComplexMatrix },
}

impl LinkDescriptor {
    pub fn build(&self) -> netfilter_core::Result<DensityMatrix4> {
        Ok(match *self {
            LinkDescriptor::Grud { v, x } => grud_state(&GrudParams::new(v, x)?),
            LinkDescriptor::Werner { p } => werner_state(&WernerParam::new(p)?),
            LinkDescriptor::X { x1, x2, x3, x4 } => x_state(&XParams::new(x1, x2, x3, x4)?),
            LinkDescriptor::PureTheta { theta } => pure_theta_state(&PureThetaParam::new(theta)?),
            LinkDescriptor::Product { m, n } => product_state(&ProductParams::new(m, n)?),
            LinkDescriptor::Explicit { ref matrix } => validate_density(matrix.clone())?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    BitFlip,
    AmplitudeDamping,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDescriptor {
    /// Zero-based index into `links`.
    pub link: usize,
    #[serde(rename = "type")]
    pub kind: ChannelKind,
    pub param: f64,
    #[serde(default)]
    pub sides: Sides,
}

/// Filter entries; anything omitted means no filtering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterDescriptor {
    #[serde(default = "one")]
    pub first: f64,
    #[serde(default = "one")]
    pub last: f64,
    #[serde(default)]
    pub middle: Option<Vec<[f64; 2]>>,
}

impl Default for FilterDescriptor {
    fn default() -> Self {
        Self {
            first: 1.0,
            last: 1.0,
            middle: None,
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanAxis {
    pub path: String,
    pub min: f64,
    pub max: f64,
    #[serde(default)]
    pub steps: Option<usize>,
}

/// Grid resolution used when an axis does not give one.
pub const DEFAULT_STEPS: usize = 101;

impl ScanAxis {
    pub fn steps(&self) -> usize {
        self.steps.unwrap_or(DEFAULT_STEPS)
    }

    /// Evenly spaced grid values, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        let steps = self.steps();
        if steps == 1 {
            return vec![self.min];
        }
        (0..steps)
            .map(|k| {
                if k == steps - 1 {
                    self.max
                } else {
                    self.min + (self.max - self.min) * k as f64 / (steps - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    pub axes: Vec<ScanAxis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsDescriptor {
    pub m0: [f64; 3],
    pub m1: [f64; 3],
    pub n0: [f64; 3],
    pub n1: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub links: Vec<LinkDescriptor>,
    #[serde(default)]
    pub channels: Vec<ChannelDescriptor>,
    #[serde(default)]
    pub filters: FilterDescriptor,
    #[serde(default)]
    pub scan: Option<ScanBlock>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub settings: Option<SettingsDescriptor>,
}

impl ExperimentConfig {
    pub fn from_value(value: &Value) -> CliResult<Self> {
        Self::normalize(value).map(|(_, cfg)| cfg)
    }

    /// Parses the config and returns it together with a copy of the JSON in
    /// which defaulted filter entries are written out, so that every filter
    /// parameter has a path.
    pub fn normalize(value: &Value) -> CliResult<(Value, Self)> {
        let mut cfg: Self =
            serde_json::from_value(value.clone()).map_err(|e| CliError::config(e.to_string()))?;
        if cfg.n >= 2 && cfg.filters.middle.is_none() {
            cfg.filters.middle = Some(vec![[1.0, 1.0]; cfg.n - 1]);
        }
        let mut normalized = value.clone();
        if let Value::Object(map) = &mut normalized {
            map.insert(
                "filters".into(),
                serde_json::to_value(&cfg.filters).expect("filters serialize"),
            );
        }
        cfg.check_shape(&normalized)?;
        Ok((normalized, cfg))
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        Self::from_value(&value)
    }

    fn check_shape(&self, raw: &Value) -> CliResult<()> {
        if self.n < 2 {
            return Err(CliError::config(format!(
                "n: need at least 2 sources, got {}",
                self.n
            )));
        }
        if self.links.len() != self.n {
            return Err(CliError::config(format!(
                "links: expected {} entries for n = {}, got {}",
                self.n,
                self.n,
                self.links.len()
            )));
        }
        if let Some(middle) = &self.filters.middle {
            if middle.len() != self.n - 1 {
                return Err(CliError::config(format!(
                    "filters.middle: expected {} pairs, got {}",
                    self.n - 1,
                    middle.len()
                )));
            }
        }
        for (k, ch) in self.channels.iter().enumerate() {
            if ch.link >= self.n {
                return Err(CliError::config(format!(
                    "channels.{k}.link: index {} out of range for {} links",
                    ch.link, self.n
                )));
            }
        }
        if let Some(scan) = &self.scan {
            if scan.axes.is_empty() || scan.axes.len() > 3 {
                return Err(CliError::config(format!(
                    "scan.axes: expected 1 to 3 axes, got {}",
                    scan.axes.len()
                )));
            }
            for (k, axis) in scan.axes.iter().enumerate() {
                crate::paths::get_number(raw, &axis.path)
                    .map_err(|e| CliError::config(format!("scan.axes.{k}.path: {e}")))?;
                if !(axis.min.is_finite() && axis.max.is_finite() && axis.min <= axis.max) {
                    return Err(CliError::config(format!(
                        "scan.axes.{k}: empty range [{}, {}]",
                        axis.min, axis.max
                    )));
                }
                let steps = axis.steps();
                if steps < 2 && !(steps == 1 && axis.min == axis.max) {
                    return Err(CliError::config(format!(
                        "scan.axes.{k}.steps: need at least 2 steps, got {steps}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn filter_spec(&self) -> CliResult<NetworkFilterSpec> {
        let middle = match &self.filters.middle {
            Some(m) => m.iter().map(|&[a, b]| (a, b)).collect(),
            None => vec![(1.0, 1.0); self.n - 1],
        };
        NetworkFilterSpec::new(self.filters.first, self.filters.last, middle)
            .map_err(|e| CliError::from_core("filters", e))
    }

    /// Link states after their noise channels, in config order.
    pub fn link_states(&self) -> CliResult<Vec<DensityMatrix4>> {
        self.links
            .iter()
            .enumerate()
            .map(|(j, desc)| {
                let mut rho = desc
                    .build()
                    .map_err(|e| CliError::from_core(&format!("links.{j}"), e))?;
                for (k, ch) in self
                    .channels
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.link == j)
                {
                    let kraus = match ch.kind {
                        ChannelKind::BitFlip => bit_flip(ch.param),
                        ChannelKind::AmplitudeDamping => amplitude_damping(ch.param),
                    }
                    .map_err(|e| CliError::from_core(&format!("channels.{k}.param"), e))?;
                    rho = apply_channel(&rho, &kraus, ch.sides);
                }
                Ok(rho)
            })
            .collect()
    }

    pub fn network(&self) -> CliResult<NetworkSpec> {
        NetworkSpec::new(self.link_states()?, self.filter_spec()?)
            .map_err(|e| CliError::from_core("", e))
    }

    pub fn measurement_settings(&self) -> CliResult<Option<MeasurementSettings>> {
        self.settings
            .as_ref()
            .map(|s| {
                MeasurementSettings::new(s.m0, s.m1, s.n0, s.n1)
                    .map_err(|e| CliError::from_core("settings", e))
            })
            .transpose()
    }
}
