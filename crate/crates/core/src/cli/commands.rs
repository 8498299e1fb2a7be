use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::RunConfig;
use super::export;
use crate::classical::ModelParams;
use crate::dynamics::{self, closure_profile, ClosureOptions, Method};
use crate::error::{Error, Result};
use crate::geometry::parallel_to_ambient;
use crate::qnumeric::{self, EigenResult, Grid1D, GridMap};
use crate::qspectra::{self, Spectrum, SpectrumEntry};

/// Result of a subcommand: whether its checks passed, the files written
/// and a short text report for stdout.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub files: Vec<PathBuf>,
    pub report: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamsReport {
    pub kappa: f64,
    pub omega: f64,
    pub gamma: f64,
    pub hbar: f64,
    pub ratio: Option<[u32; 2]>,
}

impl From<&ModelParams> for ParamsReport {
    fn from(p: &ModelParams) -> Self {
        ParamsReport {
            kappa: p.k(),
            omega: p.omega,
            gamma: p.gamma,
            hbar: p.hbar,
            ratio: p.ratio.map(|r| [r.m, r.n]),
        }
    }
}

#[derive(Serialize)]
struct IntegratorReport {
    dt: f64,
    t_end: f64,
    method: Method,
    record_every: usize,
    steps: usize,
}

#[derive(Serialize)]
struct ClosureReport {
    tol: f64,
    period: Option<f64>,
    best_time: Option<f64>,
    best_distance: Option<f64>,
}

#[derive(Serialize)]
struct SimulateReport {
    params: ParamsReport,
    integrator: IntegratorReport,
    drift: std::collections::BTreeMap<String, f64>,
    drift_tolerance: std::collections::BTreeMap<String, f64>,
    closure: Option<ClosureReport>,
    passed: bool,
}

pub const TRAJECTORY_COLUMNS: [&str; 10] = ["t", "x", "y", "px", "py", "H", "Hxi", "X", "Y", "J"];
pub const AMBIENT_COLUMNS: [&str; 4] = ["t", "x0", "x1", "x2"];

pub fn simulate(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let p = cfg.model()?;
    let sim = cfg.section(&cfg.simulate, "simulate")?;
    let icfg = sim.integrator(&p)?;
    let s0 = sim.state();
    let traj = dynamics::integrate(&p, &s0, &icfg)?;

    let with_j = traj.logs.contains_key("J");
    let columns = if with_j { &TRAJECTORY_COLUMNS[..] } else { &TRAJECTORY_COLUMNS[..9] };
    let names: Vec<&str> = columns[5..].to_vec();
    let logs: Vec<Option<&Vec<f64>>> = names.iter().map(|n| traj.logs.get(*n)).collect();
    let rows = (0..traj.len()).map(|i| {
        let s = traj.states[i];
        let mut row = vec![traj.times[i], s.x, s.y, s.px, s.py];
        row.extend(logs.iter().map(|l| l.map_or(f64::NAN, |v| v[i])));
        row
    });
    let mut files = vec![export::write(out, "trajectory.csv", &export::csv(columns, rows))?];

    let ambient = traj
        .states
        .iter()
        .zip(&traj.times)
        .map(|(s, &t)| {
            let a = parallel_to_ambient(p.kappa, s.position())?;
            Ok(vec![t, a.x0, a.x1, a.x2])
        })
        .collect::<Result<Vec<_>>>()?;
    files.push(export::write(out, "ambient.csv", &export::csv(&AMBIENT_COLUMNS, ambient))?);

    let mut drift = std::collections::BTreeMap::new();
    for name in traj.logs.keys() {
        drift.insert(name.clone(), dynamics::conservation_drift(&traj, name)?);
    }
    let mut passed = true;
    for (name, tol) in &sim.drift_tolerance {
        let d = drift.get(name).ok_or_else(|| Error::UnknownQuantity(name.clone()))?;
        passed &= d < tol;
    }
    let closure = sim.closure_tol.map(|tol| {
        let prof = closure_profile(&traj, tol, ClosureOptions::default());
        ClosureReport {
            tol,
            period: prof.period,
            best_time: prof.best.map(|b| b.0),
            best_distance: prof.best.map(|b| b.1),
        }
    });
    let steps = (icfg.t_end / icfg.dt).round().max(1.0) as usize;
    let summary = SimulateReport {
        params: (&p).into(),
        integrator: IntegratorReport {
            dt: icfg.dt,
            t_end: icfg.t_end,
            method: icfg.method,
            record_every: icfg.record_every,
            steps,
        },
        drift: drift.clone(),
        drift_tolerance: sim.drift_tolerance.clone(),
        closure,
        passed,
    };
    files.push(export::write(out, "simulate.json", &export::json(&summary)?)?);

    let mut report = format!("simulated {steps} steps, {} records\n", traj.len());
    for (k, v) in &drift {
        report.push_str(&format!("  drift {k:<4} {v:.3e}\n"));
    }
    if let Some(c) = &summary.closure {
        match c.period {
            Some(t) => report.push_str(&format!("  closed orbit, period {t:.12}\n")),
            None => report.push_str("  no closure found\n"),
        }
    }
    Ok(Outcome { passed, files, report })
}

#[derive(Serialize)]
struct SpectrumReport<'a> {
    params: ParamsReport,
    entries: &'a [SpectrumEntry],
    classes: &'a [qspectra::DegeneracyClass],
    empty_channels: &'a [u32],
}

fn spectrum_of(cfg: &RunConfig) -> Result<(ModelParams, Spectrum)> {
    let p = cfg.model()?;
    let sc = cfg.section(&cfg.spectrum, "spectrum")?;
    let spec = qspectra::enumerate_levels(&p, sc.cutoff.into())?;
    Ok((p, spec))
}

pub fn spectrum(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let (p, spec) = spectrum_of(cfg)?;
    let doc = SpectrumReport {
        params: (&p).into(),
        entries: &spec.entries,
        classes: &spec.classes,
        empty_channels: &spec.empty_channels,
    };
    let file = export::write(out, "spectrum.json", &export::json(&doc)?)?;
    let mut report = format!("{} levels, {} classes\n", spec.entries.len(), spec.classes.len());
    for e in spec.entries.iter().take(20) {
        report.push_str(&format!("  ({:>2},{:>2})  {:.12}\n", e.mu, e.nu, e.energy));
    }
    Ok(Outcome { passed: true, files: vec![file], report })
}

#[derive(Serialize)]
struct DegeneracyRow {
    key: u64,
    size: usize,
    energy: f64,
    spread: f64,
    members: Vec<[u32; 2]>,
}

#[derive(Serialize)]
struct DegeneracyReport {
    params: ParamsReport,
    classes: Vec<DegeneracyRow>,
    min_relative_gap: Option<f64>,
}

pub const DEGENERACY_COLUMNS: [&str; 5] = ["key", "size", "energy", "spread", "members"];

pub fn degeneracies(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let (p, spec) = spectrum_of(cfg)?;
    let rows: Vec<DegeneracyRow> = spec
        .classes
        .iter()
        .map(|c| DegeneracyRow {
            key: c.key,
            size: c.size,
            energy: c.energy,
            spread: c.spread,
            members: c.members.iter().map(|&(a, b)| [a, b]).collect(),
        })
        .collect();
    let mut text = DEGENERACY_COLUMNS.join(",");
    text.push('\n');
    let mut report = format!("{:>5} {:>4} {:>22} {:>10}  members\n", "key", "size", "energy", "spread");
    for r in &rows {
        let members: Vec<String> = r.members.iter().map(|[a, b]| format!("({a} {b})")).collect();
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            r.key,
            r.size,
            export::float(r.energy),
            export::float(r.spread),
            members.join(" ")
        ));
        report.push_str(&format!(
            "{:>5} {:>4} {:>22.15} {:>10.2e}  {}\n",
            r.key,
            r.size,
            r.energy,
            r.spread,
            members.join(" ")
        ));
    }
    let gap = spec.min_relative_gap();
    if let Some(g) = gap {
        report.push_str(&format!("minimum relative gap between levels: {g:.3e}\n"));
    }
    let files = vec![
        export::write(out, "degeneracies.csv", &text)?,
        export::write(
            out,
            "degeneracies.json",
            &export::json(&DegeneracyReport { params: (&p).into(), classes: rows, min_relative_gap: gap })?,
        )?,
    ];
    Ok(Outcome { passed: true, files, report })
}

#[derive(Serialize)]
struct GridReport {
    a: f64,
    b: f64,
    n_points: usize,
    h: f64,
    map: &'static str,
}

impl From<&Grid1D> for GridReport {
    fn from(g: &Grid1D) -> Self {
        GridReport {
            a: g.a,
            b: g.b,
            n_points: g.n_points,
            h: g.h,
            map: match g.map {
                GridMap::Uniform => "uniform",
                GridMap::PoleClustered => "pole_clustered",
            },
        }
    }
}

#[derive(Serialize)]
struct XiReport {
    eigenvalues: Vec<f64>,
    closed_form: Vec<Option<f64>>,
}

#[derive(Serialize)]
struct YReport {
    mu: u32,
    gamma_eps: f64,
    eigenvalues: Vec<f64>,
}

#[derive(Serialize)]
struct ComparisonRow {
    mu: u32,
    nu: u32,
    fd: f64,
    closed_form: f64,
    rel_error: f64,
    richardson: Option<f64>,
    richardson_rel_error: Option<f64>,
}

#[derive(Serialize)]
struct EigensolveReport {
    params: ParamsReport,
    grid: GridReport,
    xi: XiReport,
    y: Vec<YReport>,
    comparison: Vec<ComparisonRow>,
    tolerance: Option<f64>,
    passed: bool,
}

fn vectors_csv(r: &EigenResult, prefix: &str) -> String {
    let names: Vec<String> = (0..r.eigenvectors.len()).map(|k| format!("{prefix}{k}")).collect();
    let mut header = vec!["node", "weight", "gauge"];
    header.extend(names.iter().map(String::as_str));
    let w = r.grid.weights();
    let rows = (0..r.grid.n_points).map(|i| {
        let mut row = vec![r.grid.nodes()[i], w[i], r.gauge[i]];
        row.extend(r.eigenvectors.iter().map(|v| v[i]));
        row
    });
    export::csv(&header, rows)
}

/// Closed-form level when `(mu, nu)` is a closed-form state.
fn closed_level(p: &ModelParams, mu: u32, nu: u32) -> Option<f64> {
    qspectra::level(p, mu, nu).ok()
}

struct TwoStage {
    xi: EigenResult,
    ys: Vec<EigenResult>,
    gamma_eps: Vec<f64>,
}

fn two_stage(p: &ModelParams, grid: &Grid1D, xi_levels: usize, nu_levels: usize) -> Result<TwoStage> {
    let xi = qnumeric::solve_xi(p, grid, xi_levels)?;
    let mut ys = Vec::new();
    let mut gamma_eps = Vec::new();
    for &e in &xi.eigenvalues {
        let Ok(eps) = qnumeric::epsilon_of(p, e) else { break };
        let g = p.gamma * eps;
        ys.push(qnumeric::solve_y(p, g, grid, nu_levels)?);
        gamma_eps.push(g);
    }
    Ok(TwoStage { xi, ys, gamma_eps })
}

pub fn eigensolve(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let p = cfg.model()?;
    let ec = cfg.section(&cfg.eigensolve, "eigensolve")?;
    if p.k() == 0.0 {
        return Err(Error::FlatCurvature);
    }
    let make_grid = |n: usize| -> Result<Grid1D> {
        match (ec.truncation, p.k() < 0.0) {
            (Some(l), true) => Grid1D::truncated(l, n),
            _ => qnumeric::default_grid(&p, n),
        }
    };
    let grid = make_grid(ec.n_points)?;
    let coarse = two_stage(&p, &grid, ec.xi_levels, ec.nu_levels)?;
    let fine = if ec.richardson {
        let g2 = make_grid(2 * ec.n_points)?;
        Some((two_stage(&p, &g2, ec.xi_levels, ec.nu_levels)?, g2.h))
    } else {
        None
    };

    let mut comparison = Vec::new();
    for (mu, y) in coarse.ys.iter().enumerate() {
        for (nu, &fd) in y.eigenvalues.iter().enumerate() {
            let Some(exact) = closed_level(&p, mu as u32, nu as u32) else { continue };
            let richardson = fine.as_ref().and_then(|(f, h2)| {
                let v2 = *f.ys.get(mu)?.eigenvalues.get(nu)?;
                Some(qnumeric::richardson(grid.h, fd, *h2, v2))
            });
            comparison.push(ComparisonRow {
                mu: mu as u32,
                nu: nu as u32,
                fd,
                closed_form: exact,
                rel_error: ((fd - exact) / exact).abs(),
                richardson,
                richardson_rel_error: richardson.map(|r| ((r - exact) / exact).abs()),
            });
        }
    }
    let passed = ec.tolerance.is_none_or(|tol| {
        comparison.iter().all(|c| c.richardson_rel_error.unwrap_or(c.rel_error) < tol)
    });

    let mut files = vec![export::write(out, "eigen_xi.csv", &vectors_csv(&coarse.xi, "xi_"))?];
    for (mu, y) in coarse.ys.iter().enumerate() {
        files.push(export::write(out, &format!("eigen_y_mu{mu}.csv"), &vectors_csv(y, "y_"))?);
    }
    let doc = EigensolveReport {
        params: (&p).into(),
        grid: (&grid).into(),
        xi: XiReport {
            eigenvalues: coarse.xi.eigenvalues.clone(),
            closed_form: (0..coarse.xi.eigenvalues.len())
                .map(|mu| qspectra::level_xi(&p, mu as u32).ok())
                .collect(),
        },
        y: coarse
            .ys
            .iter()
            .zip(&coarse.gamma_eps)
            .enumerate()
            .map(|(mu, (y, &g))| YReport { mu: mu as u32, gamma_eps: g, eigenvalues: y.eigenvalues.clone() })
            .collect(),
        comparison,
        tolerance: ec.tolerance,
        passed,
    };
    files.push(export::write(out, "eigensolve.json", &export::json(&doc)?)?);

    let mut report = format!(
        "{:>3} {:>3} {:>22} {:>22} {:>10} {:>10}\n",
        "mu", "nu", "fd", "closed form", "rel err", "richardson"
    );
    for c in &doc.comparison {
        report.push_str(&format!(
            "{:>3} {:>3} {:>22.15} {:>22.15} {:>10.2e} {:>10}\n",
            c.mu,
            c.nu,
            c.fd,
            c.closed_form,
            c.rel_error,
            c.richardson_rel_error.map_or("-".to_string(), |e| format!("{e:.2e}"))
        ));
    }
    Ok(Outcome { passed, files, report })
}
