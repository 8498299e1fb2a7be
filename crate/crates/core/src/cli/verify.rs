//! Seeded invariant suites behind `verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classical::{self, BracketStep, ModelParams};
use crate::dynamics::{self, closure_detect, IntegratorConfig, Method};
use crate::error::{Error, Result};
use crate::geometry::{self, ParallelCoords, PhasePoint};
use crate::ktrig::Curvature;
use crate::qnumeric::{self, Grid1D};
use crate::qspectra::{self, Cutoff};

pub const SUITES: [&str; 10] = [
    "ktrig",
    "geometry",
    "integrability",
    "symmetries",
    "conservation",
    "closure",
    "spectrum",
    "flat",
    "numeric",
    "operators",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub suite: String,
    pub samples: usize,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

struct Ctx {
    rng: ChaCha8Rng,
    samples: usize,
    checks: Vec<Check>,
}

impl Ctx {
    /// Records `residual < tolerance`; NaN fails.
    fn check(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) {
        self.checks.push(Check { name: name.into(), passed: residual < tolerance, residual, tolerance });
    }

    /// Like [`Ctx::check`] but records an error as a failed check.
    fn check_result(&mut self, name: &str, r: Result<f64>, tolerance: f64) {
        match r {
            Ok(v) => self.check(name, v, tolerance),
            Err(_) => self.check(name, f64::NAN, tolerance),
        }
    }
}

pub fn run(suite: &str, seed: u64, samples: usize) -> Result<VerifyReport> {
    let selected: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(Error::Config(format!("unknown suite '{suite}', expected all or one of {SUITES:?}")));
    };
    let mut suites = Vec::new();
    for name in selected {
        let index = SUITES.iter().position(|s| *s == name).expect("known suite") as u64;
        let mut ctx = Ctx {
            rng: ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index)),
            samples,
            checks: Vec::new(),
        };
        match name {
            "ktrig" => ktrig(&mut ctx),
            "geometry" => geometry_suite(&mut ctx),
            "integrability" => integrability(&mut ctx),
            "symmetries" => symmetries(&mut ctx),
            "conservation" => conservation(&mut ctx),
            "closure" => closure(&mut ctx),
            "spectrum" => spectrum(&mut ctx),
            "flat" => flat(&mut ctx),
            "numeric" => numeric(&mut ctx),
            "operators" => operators(&mut ctx),
            _ => unreachable!(),
        }
        let passed = ctx.checks.iter().all(|c| c.passed);
        suites.push(SuiteReport { name: name.to_string(), passed, checks: ctx.checks });
    }
    Ok(VerifyReport {
        seed,
        suite: suite.to_string(),
        samples,
        passed: suites.iter().all(|s| s.passed),
        suites,
    })
}

fn random_kappa(rng: &mut ChaCha8Rng) -> f64 {
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    if rng.gen_bool(0.3) {
        sign * 10f64.powf(rng.gen_range(-12.0..-6.0))
    } else {
        sign * rng.gen_range(0.05..4.0)
    }
}

fn ktrig(ctx: &mut Ctx) {
    let (mut pyth, mut double, mut tan) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..ctx.samples * 10 {
        let k = Curvature::new(random_kappa(&mut ctx.rng)).expect("finite");
        let limit = k.quarter_period().map_or(3.0, |q| 0.95 * q).min(3.0 / k.value().abs().sqrt().max(1.0));
        let u = ctx.rng.gen_range(-limit..limit);
        let (c, s) = (k.cos(u), k.sin(u));
        pyth = pyth.max((c * c + k.value() * s * s - 1.0).abs() / (c * c + k.value().abs() * s * s));
        double = double.max((k.sin(2.0 * u) - 2.0 * s * c).abs() / (1.0 + s.abs()));
        if let Ok(t) = k.tan(u) {
            tan = tan.max((1.0 + k.value() * t * t - 1.0 / (c * c)).abs() / (1.0 + k.value().abs() * t * t));
        }
    }
    ctx.check("pythagorean", pyth, 1e-13);
    ctx.check("double_angle", double, 1e-13);
    ctx.check("secant", tan, 1e-13);
}

fn geometry_suite(ctx: &mut Ctx) {
    let mut worst = 0.0f64;
    let mut constraint = 0.0f64;
    for _ in 0..ctx.samples {
        let k = Curvature::new(random_kappa(&mut ctx.rng)).expect("finite");
        let lim = k.quarter_period().map_or(1.5, |q| 0.9 * q).min(1.5);
        let pc = ParallelCoords { x: ctx.rng.gen_range(-lim..lim), y: ctx.rng.gen_range(-lim..lim) };
        let r: Result<f64> = (|| {
            let a = geometry::parallel_to_ambient(k, pc)?;
            let size = a.x0 * a.x0 + k.value().abs() * (a.x1 * a.x1 + a.x2 * a.x2);
            constraint = constraint.max((a.constraint(k) - 1.0).abs() / size);
            let back = geometry::ambient_to_parallel(k, a)?;
            let pol = geometry::parallel_to_polar(k, pc)?;
            let via = geometry::polar_to_parallel(k, pol)?;
            Ok((back.x - pc.x).abs().max((back.y - pc.y).abs()).max((via.x - pc.x).abs()).max((via.y - pc.y).abs()))
        })();
        worst = worst.max(r.unwrap_or(f64::INFINITY));
    }
    ctx.check("round_trip", worst, 1e-9);
    ctx.check("constraint", constraint, 1e-13);
}

/// Random bound state inside the charts of `p`, away from the walls.
fn random_state(rng: &mut ChaCha8Rng, p: &ModelParams) -> PhasePoint {
    let (xl, yl) = match p.kappa.quarter_period() {
        Some(q) => (0.7 * q / p.gamma, 0.7 * q),
        None => (1.0, 1.0),
    };
    let threshold = if p.k() < 0.0 { p.omega * p.omega / (2.0 * p.k().abs()) } else { f64::INFINITY };
    loop {
        let s = PhasePoint::new(
            rng.gen_range(-xl..xl),
            rng.gen_range(-yl..yl),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
        );
        let bound = classical::cal_e(p, &s).is_ok()
            && classical::hamiltonian(p, &s).is_ok_and(|h| h < 0.9 * threshold);
        if bound {
            return s;
        }
    }
}

fn integrability(ctx: &mut Ctx) {
    for k in [-1.0, 1.0] {
        for g in [0.5, 1.0, 2.0] {
            let p = ModelParams::new(k, 1.0, g, 1.0).expect("valid");
            let mut worst = 0.0f64;
            for _ in 0..ctx.samples / 4 {
                let s = random_state(&mut ctx.rng, &p);
                let b = classical::poisson_bracket_real(
                    |z| classical::hamiltonian(&p, z),
                    |z| classical::h_xi(&p, z),
                    &s,
                    BracketStep::default(),
                );
                worst = worst.max(b.map_or(f64::INFINITY, f64::abs));
            }
            ctx.check(format!("bracket_H_Hxi k={k} g={g}"), worst, 1e-6);
        }
    }
}

fn symmetries(ctx: &mut Ctx) {
    for k in [-1.0, 1.0] {
        for (m, n) in [(1, 1), (2, 1), (1, 2), (3, 2)] {
            let p = ModelParams::commensurate(k, 1.0, m, n, 1.0).expect("valid");
            let mut worst = 0.0f64;
            for _ in 0..ctx.samples / 8 {
                let s = random_state(&mut ctx.rng, &p);
                let h = |z: &PhasePoint| classical::hamiltonian(&p, z);
                let x = classical::poisson_bracket_real(h, |z| Ok(classical::real_symmetries(&p, z)?.0), &s, BracketStep::default());
                let y = classical::poisson_bracket_real(h, |z| Ok(classical::real_symmetries(&p, z)?.1), &s, BracketStep::default());
                let scale = classical::real_symmetries(&p, &s).map_or(1.0, |(a, b)| 1.0f64.max(a.abs()).max(b.abs()));
                let v = match (x, y) {
                    (Ok(x), Ok(y)) => x.abs().max(y.abs()) / scale,
                    _ => f64::INFINITY,
                };
                worst = worst.max(v);
            }
            ctx.check(format!("bracket_H_X k={k} m={m} n={n}"), worst, 1e-6);
        }
    }
    let p = ModelParams::commensurate(1.0, 1.0, 1, 1, 1.0).expect("valid");
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples {
        let s = random_state(&mut ctx.rng, &p);
        let r = classical::real_symmetries(&p, &s)
            .and_then(|(_, y)| Ok((y + 0.5 * classical::angular_momentum(&p, &s)?).abs()));
        worst = worst.max(r.unwrap_or(f64::INFINITY));
    }
    ctx.check("isotropic_Y_is_minus_half_J", worst, 1e-12);
}

fn conservation(ctx: &mut Ctx) {
    let p = ModelParams::commensurate(1.0, 1.0, 2, 1, 1.0).expect("valid");
    let s0 = PhasePoint::new(0.15, 0.2, 0.1, -0.2);
    let midpoint = IntegratorConfig::for_frequency(1.0, 2.0).with_dt(1e-3);
    let mut rk4 = midpoint;
    rk4.method = Method::Rk4;
    for (cfg, quantities, tol) in [(midpoint, ["H", "Hxi"], 1e-6), (rk4, ["X", "Y"], 1e-8)] {
        let label = if cfg.method == Method::Rk4 { "rk4" } else { "midpoint" };
        match dynamics::integrate(&p, &s0, &cfg) {
            Ok(traj) => {
                for q in quantities {
                    let d = dynamics::conservation_drift(&traj, q).unwrap_or(f64::INFINITY);
                    ctx.check(format!("{label}_drift_{q}"), d, tol);
                }
            }
            Err(_) => ctx.check(format!("{label}_integrate"), f64::NAN, tol),
        }
    }
}

fn closure(ctx: &mut Ctx) {
    let p = ModelParams::commensurate(1.0, 1.0, 2, 1, 1.0).expect("valid");
    let s0 = PhasePoint::new(0.3 / 2.0, 0.2, 0.15, -0.25);
    let mut cfg = IntegratorConfig::for_frequency(1.0, 7.0).with_dt(1e-4);
    cfg.record_every = 10;
    let r = dynamics::integrate(&p, &s0, &cfg).map(|traj| match closure_detect(&traj, 1e-6) {
        Some(_) => 0.0,
        None => 1.0,
    });
    ctx.check_result("closes_within_1e-6", r, 0.5);
}

fn spectrum(ctx: &mut Ctx) {
    let mut worst = 0.0f64;
    for _ in 0..ctx.samples / 4 {
        let k = if ctx.rng.gen_bool(0.5) { ctx.rng.gen_range(0.1..2.0) } else { -ctx.rng.gen_range(0.1..0.5) };
        let g = ctx.rng.gen_range(0.5..3.0);
        let p = ModelParams::new(k, ctx.rng.gen_range(3.0..6.0), g, 1.0).expect("valid");
        for (mu, nu) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let Ok(e) = qspectra::level(&p, mu, nu) else { continue };
            for other in [qspectra::level_product_form(&p, mu, nu), qspectra::level_split_form(&p, mu, nu)] {
                worst = worst.max(other.map_or(f64::INFINITY, |o| ((o - e) / e).abs()));
            }
        }
    }
    ctx.check("level_forms_agree", worst, 1e-12);

    let p = ModelParams::commensurate(0.0, 1.0, 1, 1, 1.0).expect("valid");
    let sizes: Vec<usize> =
        qspectra::enumerate_levels(&p, Cutoff::Key(3)).map(|s| s.classes.iter().map(|c| c.size).collect()).unwrap_or_default();
    ctx.check("flat_isotropic_class_sizes", if sizes == [1, 2, 3, 4] { 0.0 } else { 1.0 }, 0.5);

    let p = ModelParams::commensurate(1.0, 1.0, 2, 1, 1.0).expect("valid");
    let r = qspectra::level(&p, 0, 2).and_then(|a| Ok(((a - qspectra::level(&p, 1, 0)?) / a).abs()));
    ctx.check_result("sphere_degeneracy_02_10", r, 1e-12);
}

fn flat(ctx: &mut Ctx) {
    let p0 = ModelParams::new(0.0, 1.0, 1.5, 1.0).expect("valid");
    let e0 = qspectra::level(&p0, 1, 2).expect("flat level");
    for sign in [1.0, -1.0] {
        let err = |k: f64| -> f64 {
            ModelParams::new(sign * k, 1.0, 1.5, 1.0)
                .and_then(|p| qspectra::level(&p, 1, 2))
                .map_or(f64::INFINITY, |e| (e - e0).abs())
        };
        let ratio = err(1e-5) / err(1e-6);
        ctx.check(format!("linear_decay sign={sign}"), (ratio - 10.0).abs(), 0.1);
    }
}

fn numeric(ctx: &mut Ctx) {
    let p = ModelParams::new(1.0, 1.0, 2.0, 1.0).expect("valid");
    let mut worst = 0.0f64;
    for (mu, nu) in [(0, 0), (1, 2), (2, 1)] {
        let r = qnumeric::two_stage_level(&p, mu, nu, 500)
            .and_then(|fd| Ok(((fd - qspectra::level(&p, mu, nu)?) / fd).abs()));
        worst = worst.max(r.unwrap_or(f64::INFINITY));
    }
    ctx.check("sphere_two_stage_n500", worst, 1e-3);

    let p = ModelParams::new(-1.0, 5.0, 1.0, 1.0).expect("valid");
    let r = Grid1D::truncated(20.0, 2000).and_then(|g| qnumeric::count_bound_xi(&p, &g));
    ctx.check("hyperboloid_xi_count", r.map_or(f64::NAN, |c| (c as f64 - 5.0).abs()), 0.5);
}

fn operators(ctx: &mut Ctx) {
    let p = ModelParams::new(1.0, 1.0, 2.0, 1.0).expect("valid");
    let r = qnumeric::default_grid(&p, 500).and_then(|g| {
        let xi = qnumeric::solve_xi(&p, &g, 3)?;
        let a = qnumeric::ladder_action_residual(&p, &xi, 0)?;
        let b = qnumeric::ladder_product_residual(&p, &xi, 1)?;
        let c = qnumeric::intertwine_residual(&p, p.gamma * qspectra::epsilon_mu(&p, 2)?, &g, 3)?;
        Ok(a.max(b).max(c))
    });
    ctx.check_result("ladder_intertwine_n500", r, 1e-3);
    let r = qnumeric::composite_shift(&p, 2, 1, 1, 2, 500).map(|c| c.rel_error);
    ctx.check_result("composite_shift_n500", r, 1e-3);
}
