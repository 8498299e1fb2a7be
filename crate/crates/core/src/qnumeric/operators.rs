//! Ladder (`xi`) and shift (`y`) operators applied to grid eigenfunctions.
//!
//! ```text
//! B+(eps) = -(hbar/sqrt2) C d/dxi + (1/sqrt2) eps S      eps -> eps + hbar k
//! B-(eps) =  (hbar/sqrt2) C d/dxi + (1/sqrt2) eps S
//! A-(g)   =  (hbar/sqrt2) d/dy - (1/sqrt2) g T           H(g) -> H(g - hbar k)
//! A+(g)   = -(hbar/sqrt2) d/dy - (1/sqrt2) g T           H(g) -> H(g + hbar k)
//! ```

use serde::Serialize;

use super::tridiag::dot;
use super::{default_grid, epsilon_of, solve_xi, solve_y, xi_operator, y_operator, EigenResult, Grid1D};
use crate::classical::ModelParams;
use crate::error::{Error, Result};
use crate::qspectra;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn sin_k(p: &ModelParams, grid: &Grid1D) -> Vec<f64> {
    grid.nodes().iter().map(|&x| p.kappa.sin(x)).collect()
}

/// `B+(eps) f` on the grid of a `xi` solve.
pub fn raise_xi(p: &ModelParams, grid: &Grid1D, f: &[f64], eps: f64) -> Vec<f64> {
    ladder_xi(p, grid, f, eps, -1.0)
}

/// `B-(eps) f`.
pub fn lower_xi(p: &ModelParams, grid: &Grid1D, f: &[f64], eps: f64) -> Vec<f64> {
    ladder_xi(p, grid, f, eps, 1.0)
}

fn ladder_xi(p: &ModelParams, grid: &Grid1D, f: &[f64], eps: f64, sign: f64) -> Vec<f64> {
    let df = grid.derivative(f);
    let c = grid.cos_k(p.kappa);
    let s = sin_k(p, grid);
    (0..f.len())
        .map(|i| FRAC_1_SQRT_2 * (sign * p.hbar * c[i] * df[i] + eps * s[i] * f[i]))
        .collect()
}

/// `A-(g) f` (`sign = 1`) or `A+(g) f` (`sign = -1`).
fn shift_y(p: &ModelParams, grid: &Grid1D, f: &[f64], g: f64, sign: f64) -> Vec<f64> {
    let df = grid.derivative(f);
    let c = grid.cos_k(p.kappa);
    let s = sin_k(p, grid);
    (0..f.len())
        .map(|i| FRAC_1_SQRT_2 * (sign * p.hbar * df[i] - g * s[i] / c[i] * f[i]))
        .collect()
}

/// `A-(g) f`.
pub fn lower_y(p: &ModelParams, grid: &Grid1D, f: &[f64], g: f64) -> Vec<f64> {
    shift_y(p, grid, f, g, 1.0)
}

/// `A+(g) f`.
pub fn raise_y(p: &ModelParams, grid: &Grid1D, f: &[f64], g: f64) -> Vec<f64> {
    shift_y(p, grid, f, g, -1.0)
}

fn weighted(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    a.iter().zip(b).zip(w).map(|((x, y), w)| x * y * w).sum()
}

/// Sine of the angle between `B+ Xi_mu` and `Xi_{mu+1}` in `L^2(dxi)`.
///
/// `eps` is taken from the grid eigenvalue, `eps = sqrt(2 k E_mu)`. Raising
/// adds `hbar k` to `eps`, which moves to `mu + 1` for either sign of `k`.
pub fn ladder_action_residual(p: &ModelParams, xi: &EigenResult, mu: usize) -> Result<f64> {
    let have = xi.eigenvalues.len();
    if mu + 1 >= have {
        return Err(Error::Index(format!(
            "ladder check at mu = {mu} needs eigenpairs {mu} and {} but the solve holds {have}",
            mu + 1
        )));
    }
    let eps = epsilon_of(p, xi.eigenvalues[mu])?;
    let w = xi.grid.weights();
    let raised = raise_xi(p, &xi.grid, &xi.physical(mu)?, eps);
    let target = xi.physical(mu + 1)?;
    let norm2 = weighted(&raised, &raised, &w);
    let proj = weighted(&raised, &target, &w) / weighted(&target, &target, &w);
    let perp: Vec<f64> = raised.iter().zip(&target).map(|(r, t)| r - proj * t).collect();
    Ok((weighted(&perp, &perp, &w) / norm2).sqrt())
}

/// Relative residual of `B-(eps + hbar k) B+(eps) Xi = lambda Xi` with
/// `lambda = eps (eps + hbar k) / (2k) - w^2 / (2 k g^2)`.
pub fn ladder_product_residual(p: &ModelParams, xi: &EigenResult, mu: usize) -> Result<f64> {
    let f = xi.physical(mu)?;
    let eps = epsilon_of(p, xi.eigenvalues[mu])?;
    let k = p.k();
    let step = p.hbar * k;
    let lambda = eps * (eps + step) / (2.0 * k) - p.omega * p.omega / (2.0 * k * p.gamma * p.gamma);
    let up = raise_xi(p, &xi.grid, &f, eps);
    let back = lower_xi(p, &xi.grid, &up, eps + step);
    let w = xi.grid.weights();
    let r: Vec<f64> = back.iter().zip(&f).map(|(b, f)| b - lambda * f).collect();
    Ok((weighted(&r, &r, &w) / weighted(&f, &f, &w)).sqrt() / lambda.abs())
}

/// Maximum over the lowest `levels` eigenvectors `Y` of `H(g)` of the
/// relative size of `A-(g) H(g) Y - H(g - hbar k) A-(g) Y` in
/// `L^2(C_k dy)`, against `|| H(g - hbar k) A- Y ||`.
///
/// On the sphere `A- Y` behaves like `C_k^{g/(hbar k) - 1}` at the walls, so
/// second-order decay needs `g` well above `2 hbar k`.
pub fn intertwine_residual(p: &ModelParams, gamma_eps: f64, grid: &Grid1D, levels: usize) -> Result<f64> {
    let lowered_g = gamma_eps - p.hbar * p.k();
    if !(lowered_g > 0.0) {
        return Err(Error::InvalidParams(format!(
            "intertwining needs g - hbar k > 0, got g = {gamma_eps}, g - hbar k = {lowered_g}"
        )));
    }
    let upper = solve_y(p, gamma_eps, grid, levels)?;
    let source = y_operator(p, gamma_eps, grid)?;
    let target = y_operator(p, lowered_g, grid)?;
    let to_phys = |d: &[f64]| -> Vec<f64> {
        let w = upper.grid.weights();
        d.iter().zip(&w).zip(&upper.gauge).map(|((d, w), g)| d / (w.sqrt() * g)).collect()
    };
    let mut worst: f64 = 0.0;
    for k in 0..upper.eigenvalues.len() {
        let y = upper.physical(k)?;
        let hy = to_phys(&source.apply(&upper.eigenvectors[k]));
        let lhs = upper.to_discrete(&lower_y(p, grid, &hy, gamma_eps));
        let ay = upper.to_discrete(&lower_y(p, grid, &y, gamma_eps));
        let rhs = target.apply(&ay);
        let diff: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        let scale = dot(&rhs, &rhs).sqrt();
        if !(scale > 0.0) {
            return Err(Error::Eigen(format!("A- annihilated eigenvector {k}")));
        }
        worst = worst.max(dot(&diff, &diff).sqrt() / scale);
    }
    Ok(worst)
}

/// Outcome of applying `(A+)^m (B+)^n` to the grid state `(mu, nu)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositeCheck {
    pub mu: u32,
    pub nu: u32,
    pub m: u32,
    pub n: u32,
    /// Rayleigh quotient of the raised `xi` factor.
    pub xi_rayleigh: f64,
    /// Rayleigh quotient of the final state.
    pub rayleigh: f64,
    /// Closed-form `E(mu, nu)`.
    pub expected: f64,
    pub rel_error: f64,
}

/// `(A+)^m (B+)^n` applied to the two-stage grid state `(mu, nu)`.
///
/// The `xi` factor is raised `n` times and its Rayleigh quotient `r`
/// fixes the final coupling `g sqrt(2 k r)`. The `y` factor, solved at
/// `g eps_mu`, is raised `m` times with the coupling stepping by `hbar k`,
/// and the Rayleigh quotient of the result under the final `y` operator
/// is the energy of the new state.
pub fn composite_shift(
    p: &ModelParams,
    m: u32,
    n: u32,
    mu: u32,
    nu: u32,
    n_points: usize,
) -> Result<CompositeCheck> {
    if nu < m {
        return Err(Error::InvalidParams(format!("composite shift lowers nu = {nu} by m = {m}")));
    }
    let expected = qspectra::level(p, mu, nu)?;
    let grid = default_grid(p, n_points)?;
    let xi = solve_xi(p, &grid, mu as usize + 1)?;
    let eps0 = epsilon_of(p, xi.eigenvalues[mu as usize])?;
    let step = p.hbar * p.k();

    let mut f = xi.physical(mu as usize)?;
    for j in 0..n {
        f = raise_xi(p, &grid, &f, eps0 + j as f64 * step);
    }
    let xi_rayleigh = xi_operator(p, &grid)?.rayleigh(&xi.to_discrete(&f));
    let final_g = p.gamma * epsilon_of(p, xi_rayleigh)?;

    let g0 = p.gamma * eps0;
    let ys = solve_y(p, g0, &grid, nu as usize + 1)?;
    let mut y = ys.physical(nu as usize)?;
    for j in 0..m {
        y = raise_y(p, &grid, &y, g0 + j as f64 * step);
    }
    let rayleigh = y_operator(p, final_g, &grid)?.rayleigh(&ys.to_discrete(&y));
    Ok(CompositeCheck {
        mu,
        nu,
        m,
        n,
        xi_rayleigh,
        rayleigh,
        expected,
        rel_error: ((rayleigh - expected) / expected).abs(),
    })
}
