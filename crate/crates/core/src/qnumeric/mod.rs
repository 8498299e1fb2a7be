//! Finite-difference eigensolver for the two separated one-dimensional
//! problems and grid checks of the ladder and shift operators.
//!
//! `xi` problem: `-(hbar^2/2) d^2/dxi^2 + w^2 / (2 k g^2 C_k^2(xi))`.
//!
//! `y` problem: `-(hbar^2/2) d^2/dy^2 + (hbar^2 k / 2) T_k(y) d/dy
//! + (g eps)^2 / (2 k C_k^2(y)) - w^2 / (2 k)`. Substituting
//! `Y = C_k^{-1/2}(y) Phi` removes the first-derivative term:
//!
//! ```text
//! -(hbar^2/2) Phi'' + [ ((g eps)^2 - hbar^2 k^2 / 4) / (2 k C_k^2) - w^2 / (2 k) - hbar^2 k / 8 ] Phi
//! ```
//!
//! The second derivative uses the three-point conservative stencil in the
//! grid's computational variable, symmetrized by the square root of the
//! node Jacobian.

mod grid;
mod operators;
mod tridiag;

pub use grid::{Grid1D, GridMap};
pub use operators::{
    composite_shift, intertwine_residual, ladder_action_residual, ladder_product_residual,
    lower_xi, lower_y, raise_xi, raise_y, CompositeCheck,
};
pub use tridiag::SymTridiag;

use crate::classical::ModelParams;
use crate::error::{Error, Result};
use crate::ktrig::Curvature;

/// Eigenvalues within this distance below a continuum threshold are not
/// counted as bound.
pub const GUARD_BAND: f64 = 1e-6;

/// Eigenpairs of a discretized one-dimensional operator.
///
/// `eigenvectors` are unit vectors in the symmetrized discrete variable
/// `v_i = phi(x_i) sqrt(w_i)`, `w_i` the node quadrature weight, where
/// `phi` is the function the symmetric operator acts on. The physical
/// function is `phi / gauge`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub grid: Grid1D,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub gauge: Vec<f64>,
}

impl EigenResult {
    /// Grid values of eigenfunction `k`, unit norm in `L^2(dx)` for the
    /// `xi` problem and in `L^2(C_k(y) dy)` for the `y` problem.
    pub fn physical(&self, k: usize) -> Result<Vec<f64>> {
        let v = self
            .eigenvectors
            .get(k)
            .ok_or_else(|| Error::Index(format!("eigenvector {k} of {}", self.eigenvectors.len())))?;
        let w = self.grid.weights();
        Ok(v.iter().zip(&w).zip(&self.gauge).map(|((v, w), g)| v / (w.sqrt() * g)).collect())
    }

    /// Inverse of [`EigenResult::physical`] for an arbitrary grid function.
    pub fn to_discrete(&self, f: &[f64]) -> Vec<f64> {
        let w = self.grid.weights();
        f.iter().zip(&w).zip(&self.gauge).map(|((f, w), g)| f * w.sqrt() * g).collect()
    }

    /// Number of sign changes of eigenvector `k`, ignoring round-off level entries.
    pub fn nodes(&self, k: usize) -> Result<usize> {
        let v = self
            .eigenvectors
            .get(k)
            .ok_or_else(|| Error::Index(format!("eigenvector {k}")))?;
        let floor = 1e-10 * v.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let mut last = 0.0f64;
        let mut changes = 0;
        for &x in v.iter().filter(|x| x.abs() > floor) {
            if last != 0.0 && x.signum() != last.signum() {
                changes += 1;
            }
            last = x;
        }
        Ok(changes)
    }
}

fn require_curved(p: &ModelParams) -> Result<Curvature> {
    if p.k() == 0.0 {
        return Err(Error::FlatCurvature);
    }
    Ok(p.kappa)
}

/// Kinetic part `-(hbar^2/2) d^2/dx^2` in symmetrized form.
fn kinetic(grid: &Grid1D, hbar: f64) -> (Vec<f64>, Vec<f64>) {
    let n = grid.n_points;
    let c = 0.5 * hbar * hbar / (grid.h * grid.h);
    let jac = grid.jacobian();
    let half = grid.jacobian_half();
    let diag = (0..n).map(|i| c * (1.0 / half[i] + 1.0 / half[i + 1]) / jac[i]).collect();
    let off = (0..n - 1).map(|i| -c / half[i + 1] / (jac[i] * jac[i + 1]).sqrt()).collect();
    (diag, off)
}

/// Symmetric matrix of the `xi` problem.
pub fn xi_operator(p: &ModelParams, grid: &Grid1D) -> Result<SymTridiag> {
    let kappa = require_curved(p)?;
    grid.check_inside(kappa)?;
    let (mut diag, off) = kinetic(grid, p.hbar);
    let coupling = p.omega * p.omega / (2.0 * p.k() * p.gamma * p.gamma);
    for (d, c) in diag.iter_mut().zip(grid.cos_k(kappa)) {
        *d += coupling / (c * c);
    }
    SymTridiag::new(diag, off)
}

/// Symmetric matrix of the `y` problem at coupling `gamma_eps`.
pub fn y_operator(p: &ModelParams, gamma_eps: f64, grid: &Grid1D) -> Result<SymTridiag> {
    let kappa = require_curved(p)?;
    grid.check_inside(kappa)?;
    let k = p.k();
    let h2 = p.hbar * p.hbar;
    let (mut diag, off) = kinetic(grid, p.hbar);
    let coupling = (gamma_eps * gamma_eps - 0.25 * h2 * k * k) / (2.0 * k);
    let shift = -p.omega * p.omega / (2.0 * k) - h2 * k / 8.0;
    for (d, c) in diag.iter_mut().zip(grid.cos_k(kappa)) {
        *d += coupling / (c * c) + shift;
    }
    SymTridiag::new(diag, off)
}

/// Direct discretization of the `y` operator with its first-derivative
/// term, `-(hbar^2/2) Y'' + (hbar^2 k/2) T Y' + V Y`, brought to symmetric
/// tridiagonal form by the diagonal similarity `sqrt(l_{i+1} u_i)`.
pub fn y_operator_direct(p: &ModelParams, gamma_eps: f64, grid: &Grid1D) -> Result<SymTridiag> {
    let kappa = require_curved(p)?;
    grid.check_inside(kappa)?;
    let n = grid.n_points;
    let k = p.k();
    let h = grid.h;
    let jac = grid.jacobian();
    let half = grid.jacobian_half();
    let cos = grid.cos_k(kappa);
    let c2 = 0.5 * p.hbar * p.hbar;
    let mut diag = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for i in 0..n {
        let y = grid.nodes()[i];
        let t = kappa.sin(y) / cos[i];
        let second = c2 / (h * h * jac[i]);
        let first = c2 * k * t / (2.0 * h * jac[i]);
        diag.push(
            second * (1.0 / half[i] + 1.0 / half[i + 1])
                + gamma_eps * gamma_eps / (2.0 * k * cos[i] * cos[i])
                - p.omega * p.omega / (2.0 * k),
        );
        lower.push(-second / half[i] - first);
        upper.push(-second / half[i + 1] + first);
    }
    let mut off = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let prod = lower[i + 1] * upper[i];
        if !(prod > 0.0) {
            return Err(Error::Grid(format!(
                "direct y stencil is not symmetrizable at node {i} (l u = {prod:e}); refine the grid"
            )));
        }
        off.push(-prod.sqrt());
    }
    SymTridiag::new(diag, off)
}

fn eigen(op: SymTridiag, grid: &Grid1D, levels: usize, gauge: Vec<f64>) -> Result<EigenResult> {
    let (eigenvalues, eigenvectors) = op.lowest(levels)?;
    Ok(EigenResult { grid: grid.clone(), eigenvalues, eigenvectors, gauge })
}

/// Lowest `levels` eigenpairs of the `xi` problem.
pub fn solve_xi(p: &ModelParams, grid: &Grid1D, levels: usize) -> Result<EigenResult> {
    let op = xi_operator(p, grid)?;
    eigen(op, grid, levels, vec![1.0; grid.n_points])
}

/// Lowest `levels` eigenpairs of the `y` problem; `gauge = C_k^{1/2}(y)`.
pub fn solve_y(p: &ModelParams, gamma_eps: f64, grid: &Grid1D, levels: usize) -> Result<EigenResult> {
    if !(gamma_eps > 0.0) {
        return Err(Error::InvalidParams(format!("gamma_eps = {gamma_eps} must be positive")));
    }
    let op = y_operator(p, gamma_eps, grid)?;
    let gauge = grid.cos_k(p.kappa).iter().map(|c| c.sqrt()).collect();
    eigen(op, grid, levels, gauge)
}

/// Lowest `levels` eigenvalues of the direct `y` discretization.
pub fn solve_y_direct(p: &ModelParams, gamma_eps: f64, grid: &Grid1D, levels: usize) -> Result<Vec<f64>> {
    let op = y_operator_direct(p, gamma_eps, grid)?;
    (0..levels.min(op.len())).map(|k| op.eigenvalue(k)).collect()
}

/// `y -> ∞` limit of the potentials on the hyperboloid:
/// `0` for `xi`, `w^2 / (2|k|) + hbar^2 |k| / 8` for the symmetrized `y` problem.
pub fn continuum_thresholds(p: &ModelParams) -> Result<(f64, f64)> {
    let k = p.k();
    if k >= 0.0 {
        return Err(Error::NotHyperbolic { kappa: k });
    }
    Ok((0.0, p.omega * p.omega / (2.0 * k.abs()) + p.hbar * p.hbar * k.abs() / 8.0))
}

/// Discrete `xi` levels below the continuum threshold minus [`GUARD_BAND`].
pub fn count_bound_xi(p: &ModelParams, grid: &Grid1D) -> Result<usize> {
    let (thr, _) = continuum_thresholds(p)?;
    Ok(xi_operator(p, grid)?.count_below(thr - GUARD_BAND))
}

/// Discrete `y` levels below the continuum threshold minus [`GUARD_BAND`].
pub fn count_bound_y(p: &ModelParams, gamma_eps: f64, grid: &Grid1D) -> Result<usize> {
    let (_, thr) = continuum_thresholds(p)?;
    Ok(y_operator(p, gamma_eps, grid)?.count_below(thr - GUARD_BAND))
}

/// Truncation half-length `20 / sqrt|k|`, stretched by `hbar |k| / chi`
/// when `chi` is small.
pub fn default_truncation(p: &ModelParams) -> Result<f64> {
    let k = p.k().abs();
    let chi = crate::qspectra::chi_of(p)?.chi;
    Ok(20.0 / k.sqrt() * (p.hbar * k / chi).max(1.0))
}

/// Clustered grid on the sphere, truncated uniform grid on the hyperboloid.
pub fn default_grid(p: &ModelParams, n_points: usize) -> Result<Grid1D> {
    let k = require_curved(p)?;
    if k.value() > 0.0 {
        Grid1D::sphere(k, n_points)
    } else {
        Grid1D::truncated(default_truncation(p)?, n_points)
    }
}

/// `eps = sqrt(2 k E)` of a one-dimensional `xi` eigenvalue.
pub fn epsilon_of(p: &ModelParams, e_xi: f64) -> Result<f64> {
    let r = 2.0 * p.k() * e_xi;
    if !(r > 0.0) {
        return Err(Error::Eigen(format!("xi eigenvalue {e_xi} gives 2 k E = {r} <= 0")));
    }
    Ok(r.sqrt())
}

/// Total level from the two-stage solve: `xi` eigenvalue `mu`, then the
/// `nu`-th `y` eigenvalue at `g eps_mu`.
pub fn two_stage_level(p: &ModelParams, mu: u32, nu: u32, n_points: usize) -> Result<f64> {
    let grid = default_grid(p, n_points)?;
    let xi = xi_operator(p, &grid)?.eigenvalue(mu as usize)?;
    let eps = epsilon_of(p, xi)?;
    y_operator(p, p.gamma * eps, &grid)?.eigenvalue(nu as usize)
}

/// Richardson extrapolation of a second-order quantity from spacings
/// `h1 > h2`.
pub fn richardson(h1: f64, v1: f64, h2: f64, v2: f64) -> f64 {
    let (a, b) = (h1 * h1, h2 * h2);
    (a * v2 - b * v1) / (a - b)
}

/// Grid spacing of [`default_grid`] with `n_points` nodes.
pub fn default_spacing(p: &ModelParams, n_points: usize) -> Result<f64> {
    Ok(default_grid(p, n_points)?.h)
}

/// [`two_stage_level`] at `n` and `2n` points, Richardson-extrapolated.
pub fn two_stage_level_extrapolated(p: &ModelParams, mu: u32, nu: u32, n_points: usize) -> Result<f64> {
    let e1 = two_stage_level(p, mu, nu, n_points)?;
    let e2 = two_stage_level(p, mu, nu, 2 * n_points)?;
    Ok(richardson(default_spacing(p, n_points)?, e1, default_spacing(p, 2 * n_points)?, e2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qspectra;

    #[test]
    fn sphere_xi_levels() {
        let p = ModelParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let grid = default_grid(&p, 400).unwrap();
        let r = solve_xi(&p, &grid, 3).unwrap();
        for mu in 0..3 {
            let exact = qspectra::level_xi(&p, mu).unwrap();
            assert!(((r.eigenvalues[mu as usize] - exact) / exact).abs() < 1e-3);
            assert_eq!(r.nodes(mu as usize).unwrap(), mu as usize);
        }
    }

    #[test]
    fn physical_normalisation() {
        let p = ModelParams::new(1.0, 1.0, 2.0, 1.0).unwrap();
        let grid = default_grid(&p, 300).unwrap();
        let r = solve_y(&p, 2.5, &grid, 2).unwrap();
        let f = r.physical(1).unwrap();
        let c = grid.cos_k(p.kappa);
        let norm: f64 = f.iter().zip(grid.weights()).zip(&c).map(|((f, w), c)| f * f * w * c).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        let back = r.to_discrete(&f);
        assert!(back.iter().zip(&r.eigenvectors[1]).all(|(a, b)| (a - b).abs() < 1e-14));
    }

    #[test]
    fn flat_rejected() {
        let p = ModelParams::new(0.0, 1.0, 1.0, 1.0).unwrap();
        let grid = Grid1D::truncated(5.0, 50).unwrap();
        assert_eq!(solve_xi(&p, &grid, 1).unwrap_err(), Error::FlatCurvature);
    }

    #[test]
    fn bad_coupling_rejected() {
        let p = ModelParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let grid = default_grid(&p, 50).unwrap();
        assert!(solve_y(&p, -1.0, &grid, 1).is_err());
    }
}
