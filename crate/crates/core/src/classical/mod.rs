//! Classical curved anisotropic oscillator
//!
//! ```text
//! H = (px^2 / C_k^2(y) + py^2) / 2 + (w^2 / 2) (T_k^2(g x) / C_k^2(y) + T_k^2(y))
//! ```
//!
//! with its separated constant `H^xi`, the ladder and shift functions that
//! factorize it and the power-product constants of motion for `g = m / n`.

mod bracket;
mod params;

pub use bracket::{partial, poisson_bracket, poisson_bracket_real, BracketStep};
pub use params::{ModelParams, Ratio};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::PhasePoint;
use crate::ktrig::KTrig;

/// Selects `+` or `-` member of a ladder or shift pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `(C, S, T)` at `xi = g x` and at `y`.
fn trig_pair(p: &ModelParams, s: &PhasePoint) -> Result<(KTrig, KTrig)> {
    Ok((p.kappa.eval(p.gamma * s.x)?, p.kappa.eval(s.y)?))
}

pub fn potential(p: &ModelParams, s: &PhasePoint) -> Result<f64> {
    let (xi, y) = trig_pair(p, s)?;
    let w2 = p.omega * p.omega;
    Ok(0.5 * w2 * (xi.t * xi.t / (y.c * y.c) + y.t * y.t))
}

pub fn hamiltonian(p: &ModelParams, s: &PhasePoint) -> Result<f64> {
    let (_, y) = trig_pair(p, s)?;
    let kin = 0.5 * (s.px * s.px / (y.c * y.c) + s.py * s.py);
    Ok(kin + potential(p, s)?)
}

/// `H` written as `py^2/2 + (px^2/2 + w^2 / (2 k C^2(g x))) / C^2(y) - w^2 / (2 k)`.
/// Only defined for `k != 0`; loses digits as `k -> 0`.
pub fn hamiltonian_separated(p: &ModelParams, s: &PhasePoint) -> Result<f64> {
    let k = p.k();
    if k == 0.0 {
        return Err(Error::FlatCurvature);
    }
    let (xi, y) = trig_pair(p, s)?;
    let w2 = p.omega * p.omega;
    Ok(0.5 * s.py * s.py + (0.5 * s.px * s.px + w2 / (2.0 * k * xi.c * xi.c)) / (y.c * y.c)
        - w2 / (2.0 * k))
}

/// `H^xi - w^2 / (2 k g^2) = p_xi^2 / 2 + (w^2 / (2 g^2)) T_k^2(xi)`.
///
/// The subtracted constant diverges as `k -> 0`; this shifted form is
/// smooth there and equals the flat `H^xi` at `k = 0`.
pub fn h_xi_shifted(p: &ModelParams, s: &PhasePoint) -> Result<f64> {
    let xi = p.kappa.eval(p.gamma * s.x)?;
    let pxi = s.px / p.gamma;
    Ok(0.5 * pxi * pxi + 0.5 * (p.omega / p.gamma).powi(2) * xi.t * xi.t)
}

/// `H^xi = p_xi^2 / 2 + w^2 / (2 k g^2 C_k^2(xi))`; the flat member
/// `p_xi^2 / 2 + w^2 xi^2 / (2 g^2)` when `k = 0`.
pub fn h_xi(p: &ModelParams, s: &PhasePoint) -> Result<f64> {
    let k = p.k();
    let shifted = h_xi_shifted(p, s)?;
    if k == 0.0 {
        return Ok(shifted);
    }
    Ok(shifted + p.omega * p.omega / (2.0 * k * p.gamma * p.gamma))
}

/// `H_y = H - g^2 (H^xi - w^2 / (2 k g^2))`, the part of `H` carried by
/// the `y` degree of freedom.
pub fn h_y(p: &ModelParams, s: &PhasePoint) -> Result<f64> {
    Ok(hamiltonian(p, s)? - shift_constant(p, s)?)
}

/// `E_k = sqrt(2 k H^xi)`, computed as `sqrt(k p_xi^2 + w^2 / (g^2 C_k^2(xi)))`
/// which tends smoothly to `w / g` as `k -> 0`.
pub fn cal_e(p: &ModelParams, s: &PhasePoint) -> Result<f64> {
    let xi = p.kappa.eval(p.gamma * s.x)?;
    let pxi = s.px / p.gamma;
    let radicand = p.k() * pxi * pxi + (p.omega / p.gamma).powi(2) / (xi.c * xi.c);
    if !(radicand > 0.0) {
        return Err(Error::ScatteringRegime { value: radicand });
    }
    Ok(radicand.sqrt())
}

/// `B^± = ∓ (i/√2) C_k(xi) p_xi + (E_k / √2) S_k(xi)`.
pub fn ladder_b(p: &ModelParams, s: &PhasePoint, sign: Sign) -> Result<Complex64> {
    let e = cal_e(p, s)?;
    let xi = p.kappa.eval(p.gamma * s.x)?;
    let pxi = s.px / p.gamma;
    Ok(Complex64::new(e * xi.s, -sign.value() * xi.c * pxi) / std::f64::consts::SQRT_2)
}

/// `A^± = ∓ (i/√2) p_y - (g E_k / √2) T_k(y)`.
pub fn shift_a(p: &ModelParams, s: &PhasePoint, sign: Sign) -> Result<Complex64> {
    let e = cal_e(p, s)?;
    let t = p.kappa.tan(s.y)?;
    Ok(Complex64::new(-p.gamma * e * t, -sign.value() * s.py) / std::f64::consts::SQRT_2)
}

/// `(g^2 E_k^2 - w^2) / (2 k)`, the constant in `H = A^+ A^- + lambda`,
/// evaluated as `g^2 (H^xi - w^2 / (2 k g^2))`.
pub fn shift_constant(p: &ModelParams, s: &PhasePoint) -> Result<f64> {
    Ok(p.gamma * p.gamma * h_xi_shifted(p, s)?)
}

/// `X^± = (B^±)^n (A^±)^m` for `g = m / n`.
pub fn symmetry_x(p: &ModelParams, s: &PhasePoint, sign: Sign) -> Result<Complex64> {
    let r = p.require_ratio("symmetry_x needs gamma = m/n")?;
    let b = ladder_b(p, s, sign)?;
    let a = shift_a(p, s, sign)?;
    Ok(b.powu(r.n) * a.powu(r.m))
}

/// Real constants of motion from `X^+`: for `m + n` even
/// `X^+ = X + i E_k Y`, for `m + n` odd `X^+ = X + i Y`.
pub fn real_symmetries(p: &ModelParams, s: &PhasePoint) -> Result<(f64, f64)> {
    let r = p.require_ratio("real_symmetries needs gamma = m/n")?;
    let xp = symmetry_x(p, s, Sign::Plus)?;
    if r.is_even() {
        Ok((xp.re, xp.im / cal_e(p, s)?))
    } else {
        Ok((xp.re, xp.im))
    }
}

/// Curved angular momentum `S_k(x) p_y - C_k(x) T_k(y) p_x`.
pub fn angular_momentum(p: &ModelParams, s: &PhasePoint) -> Result<f64> {
    let k = p.kappa;
    let ty = k.tan(s.y)?;
    Ok(k.sin(s.x) * s.py - k.cos(s.x) * ty * s.px)
}

/// `(dH/dx, dH/dy, dH/dpx, dH/dpy)`.
pub fn grad_h(p: &ModelParams, s: &PhasePoint) -> Result<[f64; 4]> {
    let (xi, y) = trig_pair(p, s)?;
    let w2 = p.omega * p.omega;
    let icy2 = 1.0 / (y.c * y.c);
    let icxi2 = 1.0 / (xi.c * xi.c);
    Ok([
        w2 * p.gamma * xi.t * icxi2 * icy2,
        y.t * icy2 * (p.k() * s.px * s.px + w2 * icxi2),
        s.px * icy2,
        s.py,
    ])
}

/// Phase-space vector field `(dH/dpx, dH/dpy, -dH/dx, -dH/dy)`.
pub fn vector_field(p: &ModelParams, s: &PhasePoint) -> Result<[f64; 4]> {
    let g = grad_h(p, s)?;
    Ok([g[2], g[3], -g[0], -g[1]])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: f64, w: f64, g: f64) -> ModelParams {
        ModelParams::new(k, w, g, 1.0).unwrap()
    }

    #[test]
    fn flat_examples() {
        assert_eq!(hamiltonian(&params(1.0, 1.0, 2.0), &PhasePoint::default()).unwrap(), 0.0);
        let h = hamiltonian(&params(0.0, 1.0, 2.0), &PhasePoint::new(0.3, 0.4, 0.1, 0.2)).unwrap();
        assert!((h - 0.285).abs() < 1e-15);
        let hx = h_xi(&params(0.0, 1.0, 1.0), &PhasePoint::new(0.5, 0.0, 0.2, 0.0)).unwrap();
        assert!((hx - 0.145).abs() < 1e-15);
        let g = grad_h(&params(0.0, 1.3, 2.0), &PhasePoint::new(0.3, -0.2, 0.5, 0.7)).unwrap();
        let w2 = 1.3f64 * 1.3;
        let expect = [w2 * 4.0 * 0.3, w2 * -0.2, 0.5, 0.7];
        for i in 0..4 {
            assert!((g[i] - expect[i]).abs() < 1e-14);
        }
        assert_eq!(grad_h(&params(1.0, 1.0, 2.0), &PhasePoint::default()).unwrap(), [0.0; 4]);
    }

    #[test]
    fn cal_e_examples() {
        let p = params(1.0, 1.0, 1.0);
        // H^xi = p^2/2 + 1/(2 C^2); p = 1, C^2 = 1/3 gives 2
        let x = (1.0f64 / 3.0).sqrt().acos();
        let e = cal_e(&p, &PhasePoint::new(x, 0.0, 1.0, 0.0)).unwrap();
        assert!((e - 2.0).abs() < 1e-14);
        let e0 = cal_e(&params(0.0, 3.0, 1.5), &PhasePoint::new(0.4, 0.1, 0.3, 0.2)).unwrap();
        assert_eq!(e0, 2.0);
        let err = cal_e(&params(-1.0, 1.0, 1.0), &PhasePoint::new(0.0, 0.0, 5.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::ScatteringRegime { .. }));
    }

    #[test]
    fn ladder_at_origin() {
        let p = params(1.0, 1.0, 2.0);
        let s = PhasePoint::new(0.0, 0.0, 0.6, 0.9);
        let q = 0.6 / 2.0;
        let bp = ladder_b(&p, &s, Sign::Plus).unwrap();
        let bm = ladder_b(&p, &s, Sign::Minus).unwrap();
        let r2 = std::f64::consts::SQRT_2;
        assert!((bp - Complex64::new(0.0, -q / r2)).norm() < 1e-15);
        assert!((bm - Complex64::new(0.0, q / r2)).norm() < 1e-15);
        let ap = shift_a(&p, &s, Sign::Plus).unwrap();
        assert!((ap - Complex64::new(0.0, -0.9 / r2)).norm() < 1e-15);
    }

    #[test]
    fn missing_ratio() {
        let p = params(1.0, 1.0, 2.0);
        assert!(matches!(
            symmetry_x(&p, &PhasePoint::default(), Sign::Plus),
            Err(Error::MissingRatio(_))
        ));
    }

    #[test]
    fn angular_momentum_examples() {
        let p = params(0.0, 1.0, 1.0);
        assert_eq!(angular_momentum(&p, &PhasePoint::new(1.0, 0.0, 0.0, 1.0)).unwrap(), 1.0);
        let p = params(1.0, 1.0, 1.0);
        assert_eq!(angular_momentum(&p, &PhasePoint::new(0.0, 0.0, 2.0, 3.0)).unwrap(), 0.0);
    }
}
