use super::Trajectory;

/// Knobs of the return search. Distances are measured with each phase
/// component divided by its half-range over the trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureOptions {
    /// Scaled distance the orbit must exceed before returns are considered.
    pub leave_distance: f64,
    /// Sampled minima above this scaled distance are not refined.
    pub candidate_distance: f64,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions { leave_distance: 0.25, candidate_distance: 0.25 }
    }
}

/// Outcome of the return search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureProfile {
    /// First refined return below the tolerance.
    pub period: Option<f64>,
    /// Smallest refined return distance seen, with its time.
    pub best: Option<(f64, f64)>,
}

fn scales(traj: &Trajectory) -> [f64; 4] {
    let mut lo = [f64::INFINITY; 4];
    let mut hi = [f64::NEG_INFINITY; 4];
    for s in &traj.states {
        for (i, v) in s.to_array().into_iter().enumerate() {
            lo[i] = lo[i].min(v);
            hi[i] = hi[i].max(v);
        }
    }
    let mut out = [1.0; 4];
    for i in 0..4 {
        let half = 0.5 * (hi[i] - lo[i]);
        if half > 1e-300 {
            out[i] = half;
        }
    }
    out
}

/// Cubic Hermite interpolant on one recorded segment and its time derivative.
fn hermite(traj: &Trajectory, i: usize, t: f64) -> ([f64; 4], [f64; 4]) {
    let (t0, t1) = (traj.times[i], traj.times[i + 1]);
    let h = t1 - t0;
    let u = (t - t0) / h;
    let (z0, z1) = (traj.states[i].to_array(), traj.states[i + 1].to_array());
    let (f0, f1) = (traj.rates[i], traj.rates[i + 1]);
    let h00 = 2.0 * u * u * u - 3.0 * u * u + 1.0;
    let h10 = u * u * u - 2.0 * u * u + u;
    let h01 = -2.0 * u * u * u + 3.0 * u * u;
    let h11 = u * u * u - u * u;
    let d00 = (6.0 * u * u - 6.0 * u) / h;
    let d10 = 3.0 * u * u - 4.0 * u + 1.0;
    let d01 = (-6.0 * u * u + 6.0 * u) / h;
    let d11 = 3.0 * u * u - 2.0 * u;
    let mut z = [0.0; 4];
    let mut dz = [0.0; 4];
    for k in 0..4 {
        z[k] = h00 * z0[k] + h10 * h * f0[k] + h01 * z1[k] + h11 * h * f1[k];
        dz[k] = d00 * z0[k] + d10 * f0[k] + d01 * z1[k] + d11 * f1[k];
    }
    (z, dz)
}

/// Scaled squared distance to the initial state and its time derivative.
fn dist2(traj: &Trajectory, sc: &[f64; 4], t: f64) -> (f64, f64) {
    let last = traj.times.len() - 2;
    let i = match traj.times.binary_search_by(|v| v.total_cmp(&t)) {
        Ok(i) => i.min(last),
        Err(i) => i.saturating_sub(1).min(last),
    };
    let (z, dz) = hermite(traj, i, t);
    let z0 = traj.states[0].to_array();
    let mut d = 0.0;
    let mut g = 0.0;
    for k in 0..4 {
        let e = (z[k] - z0[k]) / sc[k];
        d += e * e;
        g += 2.0 * e * dz[k] / sc[k];
    }
    (d, g)
}

fn sample_distance(traj: &Trajectory, sc: &[f64; 4], i: usize) -> f64 {
    let (a, b) = (traj.states[i].to_array(), traj.states[0].to_array());
    (0..4).map(|k| ((a[k] - b[k]) / sc[k]).powi(2)).sum::<f64>().sqrt()
}

/// Bisects the derivative of the interpolated squared distance on
/// `[lo, hi]`; falls back to the sampled time when it has no sign change.
fn refine(traj: &Trajectory, sc: &[f64; 4], mut lo: f64, mut hi: f64, sampled: f64) -> (f64, f64) {
    let (_, glo) = dist2(traj, sc, lo);
    let (_, ghi) = dist2(traj, sc, hi);
    if !(glo <= 0.0 && ghi >= 0.0) {
        return (sampled, dist2(traj, sc, sampled).0.sqrt());
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if dist2(traj, sc, mid).1 < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    (t, dist2(traj, sc, t).0.sqrt())
}

/// Full return search: coarse scan of sampled distance minima, then
/// bisection on the Hermite-interpolated distance.
pub fn closure_profile(traj: &Trajectory, tol: f64, opts: ClosureOptions) -> ClosureProfile {
    let mut out = ClosureProfile { period: None, best: None };
    let n = traj.len();
    if n < 3 || traj.rates.len() != n {
        return out;
    }
    let sc = scales(traj);
    let d: Vec<f64> = (0..n).map(|i| sample_distance(traj, &sc, i)).collect();
    let Some(start) = d.iter().position(|&v| v > opts.leave_distance) else {
        return out;
    };
    for i in start.max(1)..n - 1 {
        if !(d[i] <= d[i - 1] && d[i] <= d[i + 1] && d[i] < opts.candidate_distance) {
            continue;
        }
        let (t, dist) = refine(traj, &sc, traj.times[i - 1], traj.times[i + 1], traj.times[i]);
        if out.best.is_none_or(|(_, b)| dist < b) {
            out.best = Some((t, dist));
        }
        if dist < tol {
            out.period = Some(t);
            return out;
        }
    }
    out
}

/// Smallest `t > 0` at which the orbit returns to within `tol` of its
/// starting point (scaled phase-space distance), if any.
pub fn closure_detect(traj: &Trajectory, tol: f64) -> Option<f64> {
    closure_profile(traj, tol, ClosureOptions::default()).period
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::ModelParams;
    use crate::dynamics::{integrate, IntegratorConfig};
    use crate::geometry::PhasePoint;
    use std::f64::consts::TAU;

    #[test]
    fn flat_circle_period() {
        let p = ModelParams::new(0.0, 1.0, 1.0, 1.0).unwrap();
        let mut cfg = IntegratorConfig::for_frequency(1.0, 9.0).with_dt(1e-4);
        cfg.record_every = 10;
        let traj = integrate(&p, &PhasePoint::new(1.0, 0.0, 0.0, 1.0), &cfg).unwrap();
        let t = closure_detect(&traj, 1e-6).expect("closed");
        assert!((t - TAU).abs() < 1e-6, "{t}");
    }

    #[test]
    fn too_short_has_no_closure() {
        let p = ModelParams::new(0.0, 1.0, 1.0, 1.0).unwrap();
        let cfg = IntegratorConfig::for_frequency(1.0, 3.0);
        let traj = integrate(&p, &PhasePoint::new(1.0, 0.0, 0.0, 1.0), &cfg).unwrap();
        assert_eq!(closure_detect(&traj, 1e-6), None);
    }
}
