use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::ktrig::Curvature;

/// Placement of the interior nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridMap {
    /// `x_i = a + (i + 1) h`, `h = (b - a) / (n + 1)`.
    Uniform,
    /// `x = L sin(pi t / 2)` over `(-L, L)` with `t_i = -1 + (i + 1) h`,
    /// `h = 2 / (n + 1)`. Nodes cluster at the walls `±L`.
    PoleClustered,
}

/// Dirichlet grid of `n_points` interior nodes on `(a, b)`.
///
/// Finite differences are taken in the computational variable (`x` itself
/// for [`GridMap::Uniform`], `t` for [`GridMap::PoleClustered`]); `h` is
/// its spacing and `jacobian` holds `dx/dt` at the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    pub a: f64,
    pub b: f64,
    pub n_points: usize,
    pub h: f64,
    pub map: GridMap,
    nodes: Vec<f64>,
    jacobian: Vec<f64>,
    jacobian_half: Vec<f64>,
    wall_distance: Vec<f64>,
}

impl Grid1D {
    pub fn uniform(a: f64, b: f64, n_points: usize) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::Grid(format!("need at least 3 interior points, got {n_points}")));
        }
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Grid(format!("invalid interval ({a}, {b})")));
        }
        let h = (b - a) / (n_points as f64 + 1.0);
        let nodes: Vec<f64> = (0..n_points).map(|i| a + (i as f64 + 1.0) * h).collect();
        let wall_distance = nodes.iter().map(|&x| (x - a).min(b - x)).collect();
        Ok(Grid1D {
            a,
            b,
            n_points,
            h,
            map: GridMap::Uniform,
            nodes,
            jacobian: vec![1.0; n_points],
            jacobian_half: vec![1.0; n_points + 1],
            wall_distance,
        })
    }

    /// Symmetric truncated interval `(-l, l)`.
    pub fn truncated(l: f64, n_points: usize) -> Result<Self> {
        if !(l > 0.0) {
            return Err(Error::Grid(format!("truncation length {l} must be positive")));
        }
        Self::uniform(-l, l, n_points)
    }

    /// Pole-clustered grid on the full interval `(-l, l)`.
    pub fn clustered(l: f64, n_points: usize) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::Grid(format!("need at least 3 interior points, got {n_points}")));
        }
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::Grid(format!("half width {l} must be positive")));
        }
        let h = 2.0 / (n_points as f64 + 1.0);
        let t = |i: f64| -1.0 + i * h;
        let jac = |t: f64| l * FRAC_PI_2 * (FRAC_PI_2 * t).cos();
        let nodes = (0..n_points).map(|i| l * (FRAC_PI_2 * t(i as f64 + 1.0)).sin()).collect();
        let jacobian = (0..n_points).map(|i| jac(t(i as f64 + 1.0))).collect();
        let jacobian_half = (0..=n_points).map(|i| jac(t(i as f64 + 0.5))).collect();
        // l - l sin(pi |t| / 2) = 2 l sin^2(pi (1 - |t|) / 4)
        let wall_distance = (0..n_points)
            .map(|i| {
                let s = (std::f64::consts::FRAC_PI_4 * (1.0 - t(i as f64 + 1.0).abs())).sin();
                2.0 * l * s * s
            })
            .collect();
        Ok(Grid1D {
            a: -l,
            b: l,
            n_points,
            h,
            map: GridMap::PoleClustered,
            nodes,
            jacobian,
            jacobian_half,
            wall_distance,
        })
    }

    /// Clustered grid spanning the pole-free interval `|x| < pi / (2 sqrt(k))`.
    pub fn sphere(kappa: Curvature, n_points: usize) -> Result<Self> {
        let l = kappa
            .quarter_period()
            .ok_or_else(|| Error::Grid("the clustered sphere grid needs k > 0".into()))?;
        Self::clustered(l, n_points)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `dx/dt` at the nodes.
    pub fn jacobian(&self) -> &[f64] {
        &self.jacobian
    }

    /// `dx/dt` at `t_{i - 1/2}`, `i = 0..=n`.
    pub fn jacobian_half(&self) -> &[f64] {
        &self.jacobian_half
    }

    /// Quadrature weight `h dx/dt` of each node.
    pub fn weights(&self) -> Vec<f64> {
        self.jacobian.iter().map(|j| j * self.h).collect()
    }

    /// Distance of each node to the nearer endpoint.
    pub fn wall_distance(&self) -> &[f64] {
        &self.wall_distance
    }

    /// `C_k` at the nodes. On a clustered sphere grid spanning the pole-free
    /// interval it is evaluated from the wall distance to keep digits.
    pub fn cos_k(&self, kappa: Curvature) -> Vec<f64> {
        let spans_poles = self.map == GridMap::PoleClustered
            && kappa
                .quarter_period()
                .is_some_and(|q| (q - self.b).abs() <= 1e-14 * q);
        if spans_poles {
            let r = kappa.value().sqrt();
            self.wall_distance.iter().map(|d| (r * d).sin()).collect()
        } else {
            self.nodes.iter().map(|&x| kappa.cos(x)).collect()
        }
    }

    /// Checks that every node is strictly inside the pole-free interval.
    pub fn check_inside(&self, kappa: Curvature) -> Result<()> {
        if let Some(q) = kappa.quarter_period() {
            let outer = self.a.abs().max(self.b.abs());
            let strict = match self.map {
                GridMap::Uniform => outer < q,
                GridMap::PoleClustered => outer <= q * (1.0 + 1e-14),
            };
            if !strict {
                return Err(Error::Grid(format!(
                    "grid ({}, {}) leaves the pole-free interval |x| < {q}",
                    self.a, self.b
                )));
            }
        } else if self.map == GridMap::Uniform && (self.a + self.b).abs() > 1e-12 * self.b.abs() {
            return Err(Error::Grid("truncated grids must be symmetric, b = -a".into()));
        }
        Ok(())
    }

    /// Central first derivative `d/dx` of grid values with zero Dirichlet
    /// boundary values.
    pub fn derivative(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n_points;
        (0..n)
            .map(|i| {
                let up = if i + 1 < n { f[i + 1] } else { 0.0 };
                let dn = if i > 0 { f[i - 1] } else { 0.0 };
                (up - dn) / (2.0 * self.h * self.jacobian[i])
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_spacing() {
        let g = Grid1D::uniform(-1.0, 1.0, 3).unwrap();
        assert_eq!(g.h, 0.5);
        assert_eq!(g.nodes(), &[-0.5, 0.0, 0.5]);
        assert!(Grid1D::uniform(1.0, -1.0, 5).is_err());
        assert!(Grid1D::uniform(-1.0, 1.0, 2).is_err());
    }

    #[test]
    fn clustered_nodes() {
        let g = Grid1D::clustered(2.0, 99).unwrap();
        assert!((g.nodes()[49]).abs() < 1e-15);
        assert!(g.nodes().iter().all(|x| x.abs() < 2.0));
        for (x, d) in g.nodes().iter().zip(g.wall_distance()) {
            assert!(((2.0 - x.abs()) - d).abs() < 1e-14);
        }
        let w: f64 = g.weights().iter().sum();
        assert!((w - 4.0).abs() < 1e-3);
    }

    #[test]
    fn sphere_cosine_near_wall() {
        let k = Curvature::new(1.0).unwrap();
        let g = Grid1D::sphere(k, 4001).unwrap();
        let c = g.cos_k(k);
        let d = g.wall_distance()[0];
        assert!((c[0] - d.sin()).abs() <= 1e-15 * d);
        assert!(g.check_inside(k).is_ok());
        assert!(Grid1D::uniform(-2.0, 2.0, 10).unwrap().check_inside(k).is_err());
    }

    #[test]
    fn derivative_is_second_order() {
        let err = |n| {
            let g = Grid1D::clustered(1.0, n).unwrap();
            let f: Vec<f64> = g.nodes().iter().map(|x| (1.0 - x * x).powi(2)).collect();
            let df = g.derivative(&f);
            g.nodes()
                .iter()
                .zip(&df)
                .map(|(x, d)| (d + 4.0 * x * (1.0 - x * x)).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(200) / err(401);
        assert!((ratio - 4.0).abs() < 0.3, "{ratio}");
    }
}
