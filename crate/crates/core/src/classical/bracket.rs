use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::PhasePoint;

/// Step control for the finite-difference bracket: coordinate `i` is
/// perturbed by `base * (1 + |z_i|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketStep {
    pub base: f64,
}

impl Default for BracketStep {
    fn default() -> Self {
        BracketStep { base: 1e-5 }
    }
}

fn central<F>(f: &F, s: &PhasePoint, idx: usize, h: f64) -> Result<Complex64>
where
    F: Fn(&PhasePoint) -> Result<Complex64>,
{
    let mut plus = s.to_array();
    let mut minus = plus;
    plus[idx] += h;
    minus[idx] -= h;
    let wrap = |e: Error| Error::Evaluation(format!("coordinate {idx}, step {h:e}: {e}"));
    let fp = f(&PhasePoint::from_array(plus)).map_err(wrap)?;
    let fm = f(&PhasePoint::from_array(minus)).map_err(wrap)?;
    Ok((fp - fm) / (2.0 * h))
}

/// Richardson-extrapolated central difference `(4 D(h/2) - D(h)) / 3`
/// along phase coordinate `idx` (order x, y, px, py).
pub fn partial<F>(f: &F, s: &PhasePoint, idx: usize, step: BracketStep) -> Result<Complex64>
where
    F: Fn(&PhasePoint) -> Result<Complex64>,
{
    let h = step.base * (1.0 + s.to_array()[idx].abs());
    let coarse = central(f, s, idx, h)?;
    let fine = central(f, s, idx, 0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `{f, g} = f_x g_px + f_y g_py - f_px g_x - f_py g_y`.
pub fn poisson_bracket<F, G>(f: F, g: G, s: &PhasePoint, step: BracketStep) -> Result<Complex64>
where
    F: Fn(&PhasePoint) -> Result<Complex64>,
    G: Fn(&PhasePoint) -> Result<Complex64>,
{
    let mut df = [Complex64::new(0.0, 0.0); 4];
    let mut dg = df;
    for i in 0..4 {
        df[i] = partial(&f, s, i, step)?;
        dg[i] = partial(&g, s, i, step)?;
    }
    Ok(df[0] * dg[2] + df[1] * dg[3] - df[2] * dg[0] - df[3] * dg[1])
}

/// [`poisson_bracket`] for real phase functions.
pub fn poisson_bracket_real<F, G>(f: F, g: G, s: &PhasePoint, step: BracketStep) -> Result<f64>
where
    F: Fn(&PhasePoint) -> Result<f64>,
    G: Fn(&PhasePoint) -> Result<f64>,
{
    let fc = |q: &PhasePoint| f(q).map(|v| Complex64::new(v, 0.0));
    let gc = |q: &PhasePoint| g(q).map(|v| Complex64::new(v, 0.0));
    Ok(poisson_bracket(fc, gc, s, step)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_pairs() {
        let s = PhasePoint::new(0.3, -1.2, 4.0, 0.5);
        let st = BracketStep::default();
        let x = |q: &PhasePoint| Ok(q.x);
        let y = |q: &PhasePoint| Ok(q.y);
        let px = |q: &PhasePoint| Ok(q.px);
        let py = |q: &PhasePoint| Ok(q.py);
        assert!((poisson_bracket_real(x, px, &s, st).unwrap() - 1.0).abs() < 1e-9);
        assert!((poisson_bracket_real(y, py, &s, st).unwrap() - 1.0).abs() < 1e-9);
        assert!(poisson_bracket_real(x, py, &s, st).unwrap().abs() < 1e-9);
        assert!(poisson_bracket_real(x, y, &s, st).unwrap().abs() < 1e-9);
    }

    #[test]
    fn nonlinear_bracket() {
        // {x^2 py, y px} = 2x py * 0 ... computed by hand: f_x g_px + f_y g_py - f_px g_x - f_py g_y
        // f = x^2 py: f_x = 2 x py, f_py = x^2; g = y px: g_px = y, g_y = px
        let s = PhasePoint::new(0.7, 1.1, -0.4, 2.0);
        let f = |q: &PhasePoint| Ok(q.x * q.x * q.py);
        let g = |q: &PhasePoint| Ok(q.y * q.px);
        let v = poisson_bracket_real(f, g, &s, BracketStep::default()).unwrap();
        let expect = 2.0 * 0.7 * 2.0 * 1.1 - 0.7 * 0.7 * -0.4;
        assert!((v - expect).abs() < 1e-9);
    }

    #[test]
    fn evaluation_failure_propagates() {
        let s = PhasePoint::new(0.0, 0.0, 0.0, 0.0);
        let f = |q: &PhasePoint| {
            if q.x > 0.0 { Err(Error::Domain("boom".into())) } else { Ok(q.x) }
        };
        let g = |q: &PhasePoint| Ok(q.px);
        assert!(matches!(
            poisson_bracket_real(f, g, &s, BracketStep::default()),
            Err(Error::Evaluation(_))
        ));
    }
}
