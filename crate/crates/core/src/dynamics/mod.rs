//! Time integration of Hamilton's equations and conservation monitoring.

mod closure;

pub use closure::{closure_detect, closure_profile, ClosureOptions, ClosureProfile};

use std::collections::BTreeMap;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::classical::{self, ModelParams};
use crate::error::{Error, Result};
use crate::geometry::PhasePoint;

/// `|C_k|` at either chart wall below which integration aborts.
pub const WALL_FLOOR: f64 = 1e-8;

/// Denominator floor of [`conservation_drift`].
pub const DRIFT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    ImplicitMidpoint,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    pub method: Method,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Keep every `record_every`-th step in the trajectory.
    pub record_every: usize,
}

impl IntegratorConfig {
    /// `dt = 1e-3 * 2 pi / omega`.
    pub fn for_frequency(omega: f64, t_end: f64) -> Self {
        IntegratorConfig {
            dt: 1e-3 * std::f64::consts::TAU / omega,
            t_end,
            method: Method::ImplicitMidpoint,
            newton_tol: 1e-13,
            newton_max_iter: 50,
            record_every: 1,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParams(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParams(format!("t_end = {} must be positive", self.t_end)));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::InvalidParams("newton_tol must be positive".into()));
        }
        if self.newton_max_iter == 0 || self.record_every == 0 {
            return Err(Error::InvalidParams(
                "newton_max_iter and record_every must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Recorded solution: states, their phase velocities and conserved-quantity
/// logs, all aligned with `times`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhasePoint>,
    pub rates: Vec<[f64; 4]>,
    pub logs: BTreeMap<String, Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn log(&self, name: &str) -> Result<&[f64]> {
        self.logs
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownQuantity(name.to_string()))
    }
}

/// Quantities logged for `p`: `H`, `Hxi` always, `X`, `Y` with a ratio in
/// the bound regime, `J` when `gamma = 1`.
pub fn logged_quantities(p: &ModelParams, s0: &PhasePoint) -> Vec<&'static str> {
    let mut names = vec!["H", "Hxi"];
    if p.ratio.is_some() && classical::cal_e(p, s0).is_ok() {
        names.extend(["X", "Y"]);
    }
    if p.gamma == 1.0 {
        names.push("J");
    }
    names
}

fn evaluate_log(p: &ModelParams, s: &PhasePoint, name: &str) -> Result<f64> {
    match name {
        "H" => classical::hamiltonian(p, s),
        "Hxi" => classical::h_xi(p, s),
        "X" => Ok(classical::real_symmetries(p, s)?.0),
        "Y" => Ok(classical::real_symmetries(p, s)?.1),
        "J" => classical::angular_momentum(p, s),
        other => Err(Error::UnknownQuantity(other.to_string())),
    }
}

fn check_walls(p: &ModelParams, s: &PhasePoint, t: f64) -> Result<()> {
    let cy = p.kappa.cos(s.y);
    let cxi = p.kappa.cos(p.gamma * s.x);
    let c = cy.abs().min(cxi.abs());
    if !(c >= WALL_FLOOR) {
        return Err(Error::WallProximity { t, cos: c });
    }
    Ok(())
}

fn field(p: &ModelParams, z: &Vector4<f64>) -> Result<Vector4<f64>> {
    let f = classical::vector_field(p, &PhasePoint::new(z[0], z[1], z[2], z[3]))?;
    Ok(Vector4::from(f))
}

/// One-step maps for [`Method`]; `dt` may be negative.
#[derive(Debug, Clone, Copy)]
pub struct Stepper<'a> {
    params: &'a ModelParams,
    cfg: IntegratorConfig,
}

impl<'a> Stepper<'a> {
    pub fn new(params: &'a ModelParams, cfg: IntegratorConfig) -> Self {
        Stepper { params, cfg }
    }

    pub fn step(&self, s: &PhasePoint, dt: f64) -> Result<PhasePoint> {
        let z = Vector4::from(s.to_array());
        let z1 = match self.cfg.method {
            Method::ImplicitMidpoint => self.midpoint(&z, dt)?,
            Method::Rk4 => self.rk4(&z, dt)?,
        };
        Ok(PhasePoint::new(z1[0], z1[1], z1[2], z1[3]))
    }

    fn rk4(&self, z: &Vector4<f64>, dt: f64) -> Result<Vector4<f64>> {
        let p = self.params;
        let k1 = field(p, z)?;
        let k2 = field(p, &(z + 0.5 * dt * k1))?;
        let k3 = field(p, &(z + 0.5 * dt * k2))?;
        let k4 = field(p, &(z + dt * k3))?;
        Ok(z + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
    }

    fn converged(&self, delta: &Vector4<f64>, z: &Vector4<f64>) -> bool {
        delta.amax() <= self.cfg.newton_tol * (1.0 + z.amax())
    }

    /// Solves `z1 = z0 + dt f((z0 + z1) / 2)`: fixed-point sweeps first,
    /// Newton with a finite-difference Jacobian if they stall.
    fn midpoint(&self, z0: &Vector4<f64>, dt: f64) -> Result<Vector4<f64>> {
        let p = self.params;
        let f0 = field(p, z0)?;
        let mut z1 = z0 + dt * f0;
        let max_iter = self.cfg.newton_max_iter;
        let mut prev = f64::INFINITY;
        for _ in 0..max_iter {
            let next = z0 + dt * field(p, &(0.5 * (z0 + z1)))?;
            let delta = next - z1;
            z1 = next;
            if self.converged(&delta, &z1) {
                return Ok(z1);
            }
            let size = delta.amax();
            if size > 0.5 * prev {
                break;
            }
            prev = size;
        }
        self.newton(z0, z1, dt)
    }

    fn newton(&self, z0: &Vector4<f64>, mut z1: Vector4<f64>, dt: f64) -> Result<Vector4<f64>> {
        let p = self.params;
        let residual = |z1: &Vector4<f64>| -> Result<Vector4<f64>> {
            Ok(z1 - z0 - dt * field(p, &(0.5 * (z0 + z1)))?)
        };
        let mut r = residual(&z1)?;
        for _ in 0..self.cfg.newton_max_iter {
            let mid = 0.5 * (z0 + z1);
            let mut jac = Matrix4::identity();
            for j in 0..4 {
                let h = 1e-7 * (1.0 + mid[j].abs());
                let mut up = mid;
                let mut dn = mid;
                up[j] += h;
                dn[j] -= h;
                let col = (field(p, &up)? - field(p, &dn)?) / (2.0 * h);
                for i in 0..4 {
                    jac[(i, j)] -= 0.5 * dt * col[i];
                }
            }
            let delta = jac.lu().solve(&(-r)).ok_or_else(|| Error::NewtonDivergence {
                iterations: 0,
                residual: r.amax(),
            })?;
            z1 += delta;
            r = residual(&z1)?;
            if self.converged(&delta, &z1) {
                return Ok(z1);
            }
        }
        Err(Error::NewtonDivergence { iterations: self.cfg.newton_max_iter, residual: r.amax() })
    }
}

/// Integrates from `s0` for `cfg.t_end`, logging the quantities of
/// [`logged_quantities`].
pub fn integrate(p: &ModelParams, s0: &PhasePoint, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    check_walls(p, s0, 0.0)?;
    let names = logged_quantities(p, s0);
    let steps = (cfg.t_end / cfg.dt).round().max(1.0) as usize;
    let capacity = steps / cfg.record_every + 2;
    let mut traj = Trajectory {
        times: Vec::with_capacity(capacity),
        states: Vec::with_capacity(capacity),
        rates: Vec::with_capacity(capacity),
        logs: names.iter().map(|n| (n.to_string(), Vec::with_capacity(capacity))).collect(),
    };
    let record = |traj: &mut Trajectory, t: f64, s: &PhasePoint| -> Result<()> {
        traj.times.push(t);
        traj.states.push(*s);
        traj.rates.push(classical::vector_field(p, s)?);
        for name in &names {
            let v = evaluate_log(p, s, name)?;
            traj.logs.get_mut(*name).expect("log initialised").push(v);
        }
        Ok(())
    };
    record(&mut traj, 0.0, s0)?;
    let stepper = Stepper::new(p, *cfg);
    let mut s = *s0;
    for i in 1..=steps {
        s = stepper.step(&s, cfg.dt)?;
        let t = i as f64 * cfg.dt;
        check_walls(p, &s, t)?;
        if i % cfg.record_every == 0 || i == steps {
            record(&mut traj, t, &s)?;
        }
    }
    Ok(traj)
}

/// `max_t |q(t) - q(0)| / max(|q(0)|, DRIFT_FLOOR)` for a logged quantity.
pub fn conservation_drift(traj: &Trajectory, name: &str) -> Result<f64> {
    let log = traj.log(name)?;
    let Some(&q0) = log.first() else {
        return Ok(0.0);
    };
    let scale = q0.abs().max(DRIFT_FLOOR);
    Ok(log.iter().map(|q| (q - q0).abs()).fold(0.0, f64::max) / scale)
}
