//! Ambient, geodesic parallel and geodesic polar coordinates on the
//! constant-curvature surface `x0^2 + k (x1^2 + x2^2) = 1`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::ktrig::{Curvature, POLE_FLOOR};

/// Geodesic parallel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParallelCoords {
    pub x: f64,
    pub y: f64,
}

/// Geodesic polar coordinates, `phi` in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarCoords {
    pub r: f64,
    pub phi: f64,
}

/// Point of the ambient space. `x1`, `x2` carry length units when `k = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientPoint {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
}

/// Classical state in parallel coordinates with conjugate momenta.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
    pub px: f64,
    pub py: f64,
}

impl PhasePoint {
    pub fn new(x: f64, y: f64, px: f64, py: f64) -> Self {
        PhasePoint { x, y, px, py }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.px, self.py]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        PhasePoint { x: a[0], y: a[1], px: a[2], py: a[3] }
    }

    pub fn position(self) -> ParallelCoords {
        ParallelCoords { x: self.x, y: self.y }
    }
}

impl AmbientPoint {
    /// `x0^2 + k (x1^2 + x2^2)`, equal to 1 on the surface.
    pub fn constraint(&self, kappa: Curvature) -> f64 {
        self.x0 * self.x0 + kappa.value() * (self.x1 * self.x1 + self.x2 * self.x2)
    }
}

/// Validates the parallel chart: on the sphere `-pi/sqrt(k) < x <= pi/sqrt(k)`
/// and `|y| < pi/(2 sqrt(k))`; no restriction otherwise.
pub fn check_parallel_domain(kappa: Curvature, pc: ParallelCoords) -> Result<()> {
    if !pc.x.is_finite() || !pc.y.is_finite() {
        return Err(Error::Domain(format!("non-finite coordinates ({}, {})", pc.x, pc.y)));
    }
    if let Some(quarter) = kappa.quarter_period() {
        let half = 2.0 * quarter;
        if !(pc.x > -half && pc.x <= half) {
            return Err(Error::Domain(format!("x = {} outside (-{half}, {half}]", pc.x)));
        }
        if pc.y.abs() >= quarter {
            return Err(Error::Domain(format!("|y| = {} not below {quarter}", pc.y.abs())));
        }
    }
    Ok(())
}

/// Validates polar coordinates: `r > 0`, `phi` in `[0, 2 pi)` and
/// `r < pi / sqrt(k)` on the sphere.
pub fn check_polar_domain(kappa: Curvature, pol: PolarCoords) -> Result<()> {
    if !(pol.r > 0.0) || !pol.r.is_finite() {
        return Err(Error::Domain(format!("r = {} must be positive and finite", pol.r)));
    }
    if !(0.0..TAU).contains(&pol.phi) {
        return Err(Error::Domain(format!("phi = {} outside [0, 2 pi)", pol.phi)));
    }
    if let Some(quarter) = kappa.quarter_period() {
        if pol.r >= 2.0 * quarter {
            return Err(Error::Domain(format!("r = {} not below {}", pol.r, 2.0 * quarter)));
        }
    }
    Ok(())
}

pub fn parallel_to_ambient(kappa: Curvature, pc: ParallelCoords) -> Result<AmbientPoint> {
    check_parallel_domain(kappa, pc)?;
    let cy = kappa.cos(pc.y);
    Ok(AmbientPoint {
        x0: kappa.cos(pc.x) * cy,
        x1: kappa.sin(pc.x) * cy,
        x2: kappa.sin(pc.y),
    })
}

pub fn polar_to_ambient(kappa: Curvature, pol: PolarCoords) -> Result<AmbientPoint> {
    check_polar_domain(kappa, pol)?;
    let sr = kappa.sin(pol.r);
    Ok(AmbientPoint {
        x0: kappa.cos(pol.r),
        x1: sr * pol.phi.cos(),
        x2: sr * pol.phi.sin(),
    })
}

/// Parallel coordinates of an ambient point. Fails on the poles
/// `x2 = ±1/sqrt(k)` of the sphere where `x` is undefined.
pub fn ambient_to_parallel(kappa: Curvature, a: AmbientPoint) -> Result<ParallelCoords> {
    let y = kappa.arc_sin(a.x2)?;
    let cy = kappa.cos(y);
    if cy < POLE_FLOOR {
        return Err(Error::Domain(format!(
            "point ({}, {}, {}) sits on a pole of the parallel chart",
            a.x0, a.x1, a.x2
        )));
    }
    let x = if kappa.value() > 0.0 {
        let mut x = kappa.arc_tan2(a.x1, a.x0)?;
        // atan2 returns -pi for the antipode approached from below
        let half = 2.0 * kappa.quarter_period().unwrap_or(f64::INFINITY);
        if x <= -half {
            x += 2.0 * half;
        }
        x
    } else {
        kappa.arc_sin(a.x1 / cy)?
    };
    let pc = ParallelCoords { x, y };
    check_parallel_domain(kappa, pc)?;
    Ok(pc)
}

pub fn polar_to_parallel(kappa: Curvature, pol: PolarCoords) -> Result<ParallelCoords> {
    ambient_to_parallel(kappa, polar_to_ambient(kappa, pol)?)
}

pub fn parallel_to_polar(kappa: Curvature, pc: ParallelCoords) -> Result<PolarCoords> {
    let a = parallel_to_ambient(kappa, pc)?;
    let rho = a.x1.hypot(a.x2);
    if rho == 0.0 {
        return Err(Error::Domain("the origin has no polar angle".into()));
    }
    let mut phi = a.x2.atan2(a.x1);
    if phi < 0.0 {
        phi += TAU;
    }
    if phi >= TAU {
        phi = 0.0;
    }
    let r = if kappa.value() > 0.0 {
        let r = kappa.value().sqrt();
        (r * rho).atan2(a.x0) / r
    } else {
        kappa.arc_sin(rho)?
    };
    Ok(PolarCoords { r, phi })
}

/// Free kinetic energy `(px^2 / C_k^2(y) + py^2) / 2` for unit mass.
pub fn kinetic_energy(kappa: Curvature, s: &PhasePoint) -> Result<f64> {
    let cy = kappa.cos(s.y);
    if cy.abs() < POLE_FLOOR {
        return Err(Error::Pole { kappa: kappa.value(), arg: s.y, cos: cy });
    }
    Ok(0.5 * (s.px * s.px / (cy * cy) + s.py * s.py))
}

/// Kinetic energy `(pr^2 + pphi^2 / S_k^2(r)) / 2` in polar variables.
pub fn kinetic_energy_polar(kappa: Curvature, r: f64, pr: f64, pphi: f64) -> Result<f64> {
    let sr = kappa.sin(r);
    if sr.abs() < POLE_FLOOR {
        return Err(Error::Domain(format!("S_k(r) vanishes at r = {r}")));
    }
    Ok(0.5 * (pr * pr + pphi * pphi / (sr * sr)))
}

/// Wraps an angle into `[0, 2 pi)`.
pub fn wrap_angle(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU { 0.0 } else { w }
}

/// Half-length of the `x` interval on the sphere, `pi / sqrt(k)`.
pub fn x_half_range(kappa: Curvature) -> Option<f64> {
    (kappa.value() > 0.0).then(|| PI / kappa.value().sqrt())
}
