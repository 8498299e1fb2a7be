use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ktrig::Curvature;

/// Commensurate frequency ratio `gamma = m / n` with `gcd(m, n) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub m: u32,
    pub n: u32,
}

impl Ratio {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidParams(format!("ratio {m}:{n} must be positive")));
        }
        if gcd(m, n) != 1 {
            return Err(Error::InvalidParams(format!("ratio {m}:{n} is not in lowest terms")));
        }
        Ok(Ratio { m, n })
    }

    pub fn value(self) -> f64 {
        self.m as f64 / self.n as f64
    }

    /// `m + n` even selects the even form of the real symmetries.
    pub fn is_even(self) -> bool {
        (self.m + self.n) % 2 == 0
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Physical parameters shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub kappa: Curvature,
    pub omega: f64,
    pub gamma: f64,
    pub hbar: f64,
    pub ratio: Option<Ratio>,
}

impl ModelParams {
    pub fn new(kappa: f64, omega: f64, gamma: f64, hbar: f64) -> Result<Self> {
        let kappa = Curvature::new(kappa)?;
        for (name, v) in [("omega", omega), ("gamma", gamma), ("hbar", hbar)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if kappa.value() > 0.0 && gamma < 0.5 {
            return Err(Error::InvalidParams(format!(
                "gamma = {gamma} < 1/2 on the sphere leaves the xi interval wider than the x chart"
            )));
        }
        Ok(ModelParams { kappa, omega, gamma, hbar, ratio: None })
    }

    /// Parameters with `gamma = m / n` exactly.
    pub fn commensurate(kappa: f64, omega: f64, m: u32, n: u32, hbar: f64) -> Result<Self> {
        let ratio = Ratio::new(m, n)?;
        Self::new(kappa, omega, ratio.value(), hbar)?.with_ratio(ratio)
    }

    pub fn with_ratio(mut self, ratio: Ratio) -> Result<Self> {
        if (self.gamma - ratio.value()).abs() >= 1e-12 {
            return Err(Error::InvalidParams(format!(
                "gamma = {} does not match ratio {}:{}",
                self.gamma, ratio.m, ratio.n
            )));
        }
        self.ratio = Some(ratio);
        Ok(self)
    }

    pub fn k(&self) -> f64 {
        self.kappa.value()
    }

    pub fn require_ratio(&self, what: &str) -> Result<Ratio> {
        self.ratio.ok_or_else(|| Error::MissingRatio(what.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ModelParams::new(1.0, 1.0, 0.4, 1.0).is_err());
        assert!(ModelParams::new(-1.0, 1.0, 0.4, 1.0).is_ok());
        assert!(ModelParams::new(0.0, 0.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(0.0, 1.0, 1.0, -1.0).is_err());
        assert!(Ratio::new(2, 4).is_err());
        assert!(ModelParams::new(1.0, 1.0, 1.5, 1.0).unwrap().with_ratio(Ratio { m: 2, n: 1 }).is_err());
        let p = ModelParams::commensurate(1.0, 1.0, 3, 2, 1.0).unwrap();
        assert_eq!(p.gamma, 1.5);
        assert!(!p.ratio.unwrap().is_even());
    }
}
