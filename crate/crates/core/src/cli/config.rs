//! TOML run configuration.
//!
//! ```toml
//! [params]
//! kappa = 1.0
//! omega = 1.0
//! ratio = [2, 1]      # or gamma = 1.414...
//! hbar = 1.0          # optional, default 1
//!
//! [simulate]
//! initial = { x = 0.1, y = 0.2, px = 0.0, py = 0.1 }
//! t_end = 20.0
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::classical::{ModelParams, Ratio};
use crate::dynamics::{IntegratorConfig, Method};
use crate::error::{Error, Result};
use crate::geometry::PhasePoint;
use crate::qspectra::Cutoff;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: Option<ParamsConfig>,
    pub seed: Option<u64>,
    pub output: Option<OutputConfig>,
    pub simulate: Option<SimulateConfig>,
    pub spectrum: Option<SpectrumConfig>,
    pub eigensolve: Option<EigensolveConfig>,
    pub verify: Option<VerifyConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub kappa: f64,
    pub omega: f64,
    pub gamma: Option<f64>,
    pub ratio: Option<[u32; 2]>,
    #[serde(default = "one")]
    pub hbar: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub x: f64,
    pub y: f64,
    pub px: f64,
    pub py: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub initial: InitialState,
    pub t_end: f64,
    /// Default `1e-3 * 2 pi / omega`.
    pub dt: Option<f64>,
    #[serde(default)]
    pub method: Method,
    #[serde(default = "record_every")]
    pub record_every: usize,
    pub newton_tol: Option<f64>,
    pub newton_max_iter: Option<usize>,
    /// Run the closed-orbit search at this tolerance.
    pub closure_tol: Option<f64>,
    /// Per-quantity drift limits, e.g. `{ H = 1e-10 }`; exceeding one
    /// fails the run (exit 1).
    #[serde(default)]
    pub drift_tolerance: BTreeMap<String, f64>,
}

fn record_every() -> usize {
    1
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CutoffConfig {
    Energy(f64),
    Key(u64),
    Count(usize),
}

impl From<CutoffConfig> for Cutoff {
    fn from(c: CutoffConfig) -> Self {
        match c {
            CutoffConfig::Energy(e) => Cutoff::Energy(e),
            CutoffConfig::Key(k) => Cutoff::Key(k),
            CutoffConfig::Count(n) => Cutoff::Count(n),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub cutoff: CutoffConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigensolveConfig {
    #[serde(default = "n_points")]
    pub n_points: usize,
    #[serde(default = "four")]
    pub xi_levels: usize,
    #[serde(default = "four")]
    pub nu_levels: usize,
    /// Add a `2 n_points` solve and Richardson-extrapolated columns.
    #[serde(default)]
    pub richardson: bool,
    /// Hyperboloid truncation half-length; default from the parameters.
    pub truncation: Option<f64>,
    /// Fail (exit 1) when a relative error exceeds this value.
    pub tolerance: Option<f64>,
}

fn n_points() -> usize {
    2000
}

fn four() -> usize {
    4
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub suite: Option<String>,
    /// Random samples per randomized check.
    pub samples: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn model(&self) -> Result<ModelParams> {
        self.params
            .as_ref()
            .ok_or_else(|| Error::Config("missing [params] section".into()))?
            .model()
    }

    pub fn section<'a, T>(&self, section: &'a Option<T>, name: &str) -> Result<&'a T> {
        section.as_ref().ok_or_else(|| Error::Config(format!("missing [{name}] section")))
    }
}

impl ParamsConfig {
    /// Validated parameters. `gamma` defaults to the ratio; when both are
    /// given they must agree.
    pub fn model(&self) -> Result<ModelParams> {
        let ratio = self.ratio.map(|[m, n]| Ratio::new(m, n)).transpose()?;
        let gamma = match (self.gamma, ratio) {
            (Some(g), _) => g,
            (None, Some(r)) => r.value(),
            (None, None) => return Err(Error::Config("[params] needs gamma or ratio".into())),
        };
        let p = ModelParams::new(self.kappa, self.omega, gamma, self.hbar)?;
        match ratio {
            Some(r) => p.with_ratio(r),
            None => Ok(p),
        }
    }
}

impl SimulateConfig {
    pub fn state(&self) -> PhasePoint {
        let s = self.initial;
        PhasePoint::new(s.x, s.y, s.px, s.py)
    }

    pub fn integrator(&self, p: &ModelParams) -> Result<IntegratorConfig> {
        let mut cfg = IntegratorConfig::for_frequency(p.omega, self.t_end);
        if let Some(dt) = self.dt {
            cfg.dt = dt;
        }
        cfg.method = self.method;
        cfg.record_every = self.record_every;
        if let Some(t) = self.newton_tol {
            cfg.newton_tol = t;
        }
        if let Some(n) = self.newton_max_iter {
            cfg.newton_max_iter = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let cfg = RunConfig::parse(
            r#"
            seed = 3
            [params]
            kappa = -1.0
            omega = 5.0
            ratio = [1, 1]
            [spectrum]
            cutoff = { key = 3 }
            [simulate]
            initial = { x = 0.1, y = 0.0, px = 0.0, py = 0.2 }
            t_end = 1.0
            method = "rk4"
            "#,
        )
        .unwrap();
        let p = cfg.model().unwrap();
        assert_eq!(p.gamma, 1.0);
        assert!(p.ratio.is_some());
        assert!(matches!(cfg.spectrum.unwrap().cutoff, CutoffConfig::Key(3)));
        assert_eq!(cfg.simulate.unwrap().method, Method::Rk4);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(RunConfig::parse("[params]\nkappa = 1"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse("bogus = 1"), Err(Error::Config(_))));
        let cfg = RunConfig::parse("[params]\nkappa = 1.0\nomega = 1.0").unwrap();
        assert!(matches!(cfg.model(), Err(Error::Config(_))));
        let cfg = RunConfig::parse("[params]\nkappa = 1.0\nomega = 1.0\ngamma = 1.5\nratio = [2, 1]").unwrap();
        assert!(matches!(cfg.model(), Err(Error::InvalidParams(_))));
    }
}
