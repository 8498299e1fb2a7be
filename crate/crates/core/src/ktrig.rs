//! Curvature-dependent trigonometry.
//!
//! `C_k(u)` and `S_k(u)` interpolate between `cos`/`sin` on the sphere
//! (k > 0), `1`/`u` on the plane (k = 0) and `cosh`/`sinh` on the
//! hyperboloid (k < 0):
//!
//! ```text
//! C_k(u) = sum_l (-k)^l u^(2l) / (2l)!        S_k(u) = sum_l (-k)^l u^(2l+1) / (2l+1)!
//! ```
//!
//! When `|k| u^2` is tiny the closed forms `cos(sqrt(k) u)` and
//! `sin(sqrt(k) u) / sqrt(k)` cancel badly, so a truncated series is used
//! below [`SERIES_CROSSOVER`].

use crate::error::{Error, Result};

/// `|k| u^2` below which C, S and their inverses are evaluated by series.
pub const SERIES_CROSSOVER: f64 = 1e-8;

/// `|C_k(u)|` below which the tangent is treated as singular.
pub const POLE_FLOOR: f64 = 1e-12;

/// Sign class of a curvature value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureKind {
    Sphere,
    Flat,
    Hyperbolic,
}

/// Gaussian curvature `k` of the underlying surface, in 1/length^2.
///
/// Classification uses the exact sign: only `k == 0.0` is flat. Values of
/// very small magnitude are handled by the series branch instead of a
/// physical cutoff.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Curvature(f64);

/// The triple `(C_k(u), S_k(u), T_k(u))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KTrig {
    pub c: f64,
    pub s: f64,
    pub t: f64,
}

impl Curvature {
    pub const FLAT: Curvature = Curvature(0.0);

    pub fn new(kappa: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::InvalidParams(format!("curvature must be finite, got {kappa}")));
        }
        Ok(Curvature(kappa))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn kind(self) -> CurvatureKind {
        if self.0 > 0.0 {
            CurvatureKind::Sphere
        } else if self.0 < 0.0 {
            CurvatureKind::Hyperbolic
        } else {
            CurvatureKind::Flat
        }
    }

    pub fn is_flat(self) -> bool {
        self.0 == 0.0
    }

    #[inline]
    fn use_series(self, u: f64) -> bool {
        (self.0 * u * u).abs() < SERIES_CROSSOVER
    }

    /// `C_k(u)`.
    pub fn cos(self, u: f64) -> f64 {
        let k = self.0;
        if self.use_series(u) {
            let z = k * u * u;
            return 1.0 - z / 2.0 + z * z / 24.0 - z * z * z / 720.0;
        }
        if k > 0.0 {
            (k.sqrt() * u).cos()
        } else {
            ((-k).sqrt() * u).cosh()
        }
    }

    /// `S_k(u)`.
    pub fn sin(self, u: f64) -> f64 {
        let k = self.0;
        if self.use_series(u) {
            let z = k * u * u;
            return u * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0);
        }
        if k > 0.0 {
            let r = k.sqrt();
            (r * u).sin() / r
        } else {
            let r = (-k).sqrt();
            (r * u).sinh() / r
        }
    }

    /// `T_k(u) = S_k(u) / C_k(u)`; fails within [`POLE_FLOOR`] of a pole.
    pub fn tan(self, u: f64) -> Result<f64> {
        Ok(self.eval(u)?.t)
    }

    /// All three functions at once.
    pub fn eval(self, u: f64) -> Result<KTrig> {
        let c = self.cos(u);
        let s = self.sin(u);
        if c.abs() < POLE_FLOOR {
            return Err(Error::Pole { kappa: self.0, arg: u, cos: c });
        }
        Ok(KTrig { c, s, t: s / c })
    }

    /// `(d/du C_k, d/du S_k, d/du T_k) = (-k S_k, C_k, 1 / C_k^2)`.
    pub fn derivatives(self, u: f64) -> Result<(f64, f64, f64)> {
        let KTrig { c, s, .. } = self.eval(u)?;
        Ok((-self.0 * s, c, 1.0 / (c * c)))
    }

    /// Principal inverse of `S_k`: the `u` with `S_k(u) = v`,
    /// `|u| <= pi / (2 sqrt(k))` on the sphere.
    pub fn arc_sin(self, v: f64) -> Result<f64> {
        let k = self.0;
        if (k * v * v).abs() < SERIES_CROSSOVER {
            let z = k * v * v;
            return Ok(v * (1.0 + z / 6.0 + 3.0 * z * z / 40.0 + 5.0 * z * z * z / 112.0));
        }
        if k > 0.0 {
            let r = k.sqrt();
            let arg = r * v;
            if arg.abs() > 1.0 + 1e-14 {
                return Err(Error::Domain(format!(
                    "S_k^-1({v}) undefined: |sqrt(k) v| = {} > 1",
                    arg.abs()
                )));
            }
            Ok(arg.clamp(-1.0, 1.0).asin() / r)
        } else {
            let r = (-k).sqrt();
            Ok((r * v).asinh() / r)
        }
    }

    /// Inverse of the pair `(C_k(u), S_k(u)) ∝ (c, s)` with `c > 0` when
    /// `k <= 0`. On the sphere the result covers `(-pi/sqrt(k), pi/sqrt(k)]`.
    pub fn arc_tan2(self, s: f64, c: f64) -> Result<f64> {
        let k = self.0;
        if k > 0.0 && !(c > 0.0 && (k * (s / c).powi(2)) < SERIES_CROSSOVER) {
            let r = k.sqrt();
            return Ok((r * s).atan2(c) / r);
        }
        if c <= 0.0 {
            return Err(Error::Domain(format!(
                "arc tangent with non-positive cosine component {c} for k = {k}"
            )));
        }
        let q = s / c;
        let z = k * q * q;
        if z.abs() < SERIES_CROSSOVER {
            return Ok(q * (1.0 - z / 3.0 + z * z / 5.0 - z * z * z / 7.0));
        }
        // k < 0 here
        let r = (-k).sqrt();
        let arg = r * q;
        if arg.abs() >= 1.0 {
            return Err(Error::Domain(format!(
                "hyperbolic arc tangent argument {arg} outside (-1, 1)"
            )));
        }
        Ok(arg.atanh() / r)
    }

    /// Half-width `pi / (2 sqrt(k))` of the pole-free interval of `T_k`,
    /// or `None` when `k <= 0`.
    pub fn quarter_period(self) -> Option<f64> {
        (self.0 > 0.0).then(|| std::f64::consts::FRAC_PI_2 / self.0.sqrt())
    }
}

/// Free-function form of [`Curvature::eval`].
pub fn ktrig_eval(kappa: Curvature, u: f64) -> Result<KTrig> {
    kappa.eval(u)
}

/// Free-function form of [`Curvature::derivatives`].
pub fn ktrig_derivatives(kappa: Curvature, u: f64) -> Result<(f64, f64, f64)> {
    kappa.derivatives(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    fn k(v: f64) -> Curvature {
        Curvature::new(v).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn flat_values() {
        let r = k(0.0).eval(2.5).unwrap();
        assert_eq!((r.c, r.s, r.t), (1.0, 2.5, 2.5));
    }

    #[test]
    fn sphere_values() {
        let r = k(1.0).eval(PI / 3.0).unwrap();
        assert!(close(r.c, 0.5, 1e-15));
        assert!(close(r.s, 3f64.sqrt() / 2.0, 1e-15));
        assert!(close(r.t, 3f64.sqrt(), 1e-14));

        let r = k(4.0).eval(PI / 6.0).unwrap();
        assert!(close(r.c, 0.5, 1e-15));
        assert!(close(r.s, 3f64.sqrt() / 4.0, 1e-15));
        assert!(close(r.t, 3f64.sqrt() / 2.0, 1e-14));
    }

    #[test]
    fn hyperbolic_values() {
        let r = k(-1.0).eval(LN_2).unwrap();
        assert!(close(r.c, 1.25, 1e-15));
        assert!(close(r.s, 0.75, 1e-15));
        assert!(close(r.t, 0.6, 1e-15));
    }

    #[test]
    fn derivative_values() {
        assert_eq!(k(0.0).derivatives(3.7).unwrap(), (0.0, 1.0, 1.0));
        let (dc, ds, dt) = k(1.0).derivatives(0.0).unwrap();
        assert_eq!((dc, ds, dt), (0.0, 1.0, 1.0));
        let (dc, ds, dt) = k(-1.0).derivatives(1.0).unwrap();
        assert!(close(dc, 1f64.sinh(), 1e-15));
        assert!(close(ds, 1f64.cosh(), 1e-15));
        assert!(close(dt, 1.0 / 1f64.cosh().powi(2), 1e-15));
    }

    #[test]
    fn tangent_pole_is_an_error() {
        let err = k(1.0).tan(PI / 2.0).unwrap_err();
        assert!(matches!(err, Error::Pole { .. }));
        assert!(k(4.0).eval(PI / 4.0).is_err());
        assert!(k(1.0).tan(PI / 2.0 - 1e-6).is_ok());
    }

    #[test]
    fn non_finite_curvature_rejected() {
        assert!(Curvature::new(f64::NAN).is_err());
        assert!(Curvature::new(f64::INFINITY).is_err());
    }

    #[test]
    fn classification_by_sign() {
        assert_eq!(k(1e-300).kind(), CurvatureKind::Sphere);
        assert_eq!(k(0.0).kind(), CurvatureKind::Flat);
        assert_eq!(k(-0.0).kind(), CurvatureKind::Flat);
        assert_eq!(k(-1e-300).kind(), CurvatureKind::Hyperbolic);
    }

    #[test]
    fn series_branch_matches_closed_form_at_crossover() {
        // just above and below the crossover both routes must agree
        for &kv in &[1e-9, -1e-9] {
            let u = (SERIES_CROSSOVER / 1e-9).sqrt();
            let below = k(kv).cos(u * 0.999);
            let above = k(kv).cos(u * 1.001);
            assert!((below - above).abs() < 1e-10);
            let sb = k(kv).sin(u * 0.999) / (u * 0.999);
            let sa = k(kv).sin(u * 1.001) / (u * 1.001);
            assert!((sb - sa).abs() < 1e-10);
        }
    }

    #[test]
    fn linear_decay_towards_flat() {
        let u = 1.3;
        let flat = k(0.0).eval(u).unwrap();
        let mut prev: Option<f64> = None;
        let mut kv = 1e-2;
        for _ in 0..8 {
            let r = k(kv).eval(u).unwrap();
            let d = (r.c - flat.c).abs() + (r.s - flat.s).abs() + (r.t - flat.t).abs();
            if let Some(p) = prev {
                let ratio = p / d;
                assert!((ratio - 2.0).abs() < 0.05, "ratio {ratio} at kappa {kv}");
            }
            prev = Some(d);
            kv /= 2.0;
        }
    }

    #[test]
    fn derivatives_match_central_differences() {
        let h = 1e-5;
        for &kv in &[1.0, 0.3, 0.0, -0.7, 1e-10] {
            for &u in &[-0.9, 0.1, 0.6] {
                let c = k(kv);
                let (dc, ds, dt) = c.derivatives(u).unwrap();
                let fd = |f: &dyn Fn(f64) -> f64| (f(u + h) - f(u - h)) / (2.0 * h);
                assert!((dc - fd(&|v| c.cos(v))).abs() < 1e-9);
                assert!((ds - fd(&|v| c.sin(v))).abs() < 1e-9);
                assert!((dt - fd(&|v| c.tan(v).unwrap())).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn arc_functions_invert() {
        for &kv in &[2.0, 1.0, 1e-12, 0.0, -1e-12, -1.0] {
            let c = k(kv);
            for &u in &[-1.0, -0.3, 0.0, 0.4, 1.05] {
                let back = c.arc_sin(c.sin(u)).unwrap();
                assert!((back - u).abs() < 1e-12, "arc_sin k={kv} u={u}");
                let back = c.arc_tan2(c.sin(u), c.cos(u)).unwrap();
                assert!((back - u).abs() < 1e-12, "arc_tan2 k={kv} u={u}");
            }
        }
        // full sphere branch beyond the quarter period
        let c = k(1.0);
        let u = 2.8;
        assert!((c.arc_tan2(c.sin(u), c.cos(u)).unwrap() - u).abs() < 1e-12);
        assert!(c.arc_sin(1.5).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rel(a: f64, b: f64) -> f64 {
            (a - b).abs() / (1.0 + a.abs().max(b.abs()))
        }

        proptest! {
            #[test]
            fn pythagorean_identity(kv in -2.0f64..2.0, w in -1.4f64..1.4) {
                let c = k(kv);
                let u = if kv.abs() > 1e-6 { w / kv.abs().sqrt() } else { w };
                let (cc, ss) = (c.cos(u), c.sin(u));
                let scale = cc * cc + kv.abs() * ss * ss;
                prop_assert!((cc * cc + kv * ss * ss - 1.0).abs() <= 1e-14 * scale.max(1.0) * 4.0);
            }

            #[test]
            fn double_angle(kv in -2.0f64..2.0, w in -0.7f64..0.7) {
                let c = k(kv);
                let u = if kv.abs() > 1e-6 { w / kv.abs().sqrt() } else { w };
                let (cc, ss) = (c.cos(u), c.sin(u));
                prop_assert!(rel(c.cos(2.0 * u), cc * cc - kv * ss * ss) < 1e-13);
                prop_assert!(rel(c.sin(2.0 * u), 2.0 * ss * cc) < 1e-13);
            }
        }
    }
}
