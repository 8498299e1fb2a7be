//! Closed-form quantum spectra on the sphere, the plane and the hyperboloid.
//!
//! With `a = w^2 / g^2`, `chi` is the root of `chi (chi + hbar k) = a` that
//! is positive (`k > 0`) or exceeds `hbar |k|` (`k < 0`), and
//! `eps_mu = chi + (mu + 1) hbar k` for either sign of `k`.

use serde::Serialize;

use crate::classical::ModelParams;
use crate::error::{Error, Result};

/// Integer maxima closer than this to an integer count as excluded.
pub const EDGE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParams {
    pub chi: f64,
}

/// Largest integer strictly below `q`.
fn largest_integer_below(q: f64) -> i64 {
    let r = q.round();
    if (q - r).abs() <= EDGE_TOLERANCE * q.abs().max(1.0) {
        r as i64 - 1
    } else {
        q.ceil() as i64 - 1
    }
}

pub fn chi_of(p: &ModelParams) -> Result<SpectralParams> {
    let k = p.k();
    if k == 0.0 {
        return Err(Error::FlatCurvature);
    }
    let a = (p.omega / p.gamma).powi(2);
    let hk = p.hbar * k;
    let root = (hk * hk + 4.0 * a).sqrt();
    let chi = if k > 0.0 { 2.0 * a / (root + hk) } else { 0.5 * (root - hk) };
    Ok(SpectralParams { chi })
}

/// `chi`, or its flat limit `w / g` at `k = 0`.
fn chi_or_flat(p: &ModelParams) -> f64 {
    chi_of(p).map(|s| s.chi).unwrap_or(p.omega / p.gamma)
}

/// Bound-state maxima on the hyperboloid. `nu_max[mu]` may be negative,
/// meaning that channel `mu` carries no `y` bound state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundStates {
    pub mu_max: i64,
    pub nu_max: Vec<i64>,
}

impl BoundStates {
    pub fn nu_max(&self, mu: u32) -> Result<i64> {
        self.nu_max
            .get(mu as usize)
            .copied()
            .ok_or(Error::MuOutOfRange { mu, mu_max: self.mu_max })
    }

    /// Total number of `(mu, nu)` bound states.
    pub fn count(&self) -> usize {
        self.nu_max.iter().map(|&v| (v + 1).max(0) as usize).sum()
    }
}

pub fn max_quantum_numbers(p: &ModelParams) -> Result<BoundStates> {
    let k = p.k();
    if k >= 0.0 {
        return Err(Error::NotHyperbolic { kappa: k });
    }
    let hk = p.hbar * k.abs();
    let chi = chi_of(p)?.chi;
    let mu_max = largest_integer_below(chi / hk - 1.0);
    let nu_max = (0..=mu_max.max(-1))
        .map(|mu| {
            let eps = chi - (mu as f64 + 1.0) * hk;
            largest_integer_below(p.gamma * eps / hk - 1.0)
        })
        .collect();
    Ok(BoundStates { mu_max, nu_max })
}

fn check_mu(p: &ModelParams, mu: u32) -> Result<()> {
    if p.k() < 0.0 {
        let b = max_quantum_numbers(p)?;
        if mu as i64 > b.mu_max {
            return Err(Error::MuOutOfRange { mu, mu_max: b.mu_max });
        }
    }
    Ok(())
}

fn check_nu(p: &ModelParams, mu: u32, nu: u32) -> Result<()> {
    if p.k() < 0.0 {
        let b = max_quantum_numbers(p)?;
        let nu_max = b.nu_max(mu)?;
        if nu as i64 > nu_max {
            return Err(Error::NuOutOfRange { mu, nu, nu_max });
        }
    }
    Ok(())
}

/// `eps_mu = chi + (mu + 1) hbar k`.
pub fn epsilon_mu(p: &ModelParams, mu: u32) -> Result<f64> {
    let chi = chi_of(p)?.chi;
    check_mu(p, mu)?;
    Ok(chi + (mu as f64 + 1.0) * p.hbar * p.k())
}

/// One-dimensional level `E^xi_mu = eps_mu^2 / (2 k)`.
pub fn level_xi(p: &ModelParams, mu: u32) -> Result<f64> {
    let eps = epsilon_mu(p, mu)?;
    Ok(eps * eps / (2.0 * p.k()))
}

/// `E^xi_mu - w^2 / (2 k g^2)` in the expanded form, finite as `k -> 0`.
pub fn level_xi_shifted(p: &ModelParams, mu: u32) -> Result<f64> {
    check_mu(p, mu)?;
    let k = p.k();
    let h = p.hbar;
    let m = mu as f64;
    let a = (p.omega / p.gamma).powi(2);
    Ok(0.25 * h * (1.0 + 2.0 * m) * (h * h * k * k + 4.0 * a).sqrt()
        + 0.25 * h * h * k * (1.0 + 2.0 * m + 2.0 * m * m))
}

/// Levels of the `y` problem at coupling `g_eps = g * eps`:
/// `(g_eps + nu hbar k)(g_eps + (nu + 1) hbar k) / (2 k) - w^2 / (2 k)`.
pub fn level_y(p: &ModelParams, gamma_eps: f64, nu: u32) -> Result<f64> {
    let k = p.k();
    if k == 0.0 {
        return Err(Error::FlatCurvature);
    }
    let hk = p.hbar * k;
    let n = nu as f64;
    Ok(((gamma_eps + n * hk) * (gamma_eps + (n + 1.0) * hk) - p.omega * p.omega) / (2.0 * k))
}

/// Flat spectrum `hbar w ((g + 1) / 2 + g mu + nu)`.
pub fn level_flat(p: &ModelParams, mu: u32, nu: u32) -> f64 {
    p.hbar * p.omega * (0.5 * (p.gamma + 1.0) + p.gamma * mu as f64 + nu as f64)
}

/// Total level `E^{mu, nu}` for any sign of `k`, evaluated as
/// `hbar g chi (2 g mu + 2 nu + g + 1) / 2 + k b (b + hbar) / 2` with
/// `b = (g (mu + 1) + nu) hbar`, which reduces to [`level_flat`] at `k = 0`.
pub fn level(p: &ModelParams, mu: u32, nu: u32) -> Result<f64> {
    if p.k() == 0.0 {
        return Ok(level_flat(p, mu, nu));
    }
    check_mu(p, mu)?;
    check_nu(p, mu, nu)?;
    let g = p.gamma;
    let h = p.hbar;
    let chi = chi_or_flat(p);
    let (m, n) = (mu as f64, nu as f64);
    let b = (g * (m + 1.0) + n) * h;
    Ok(0.5 * h * g * chi * (2.0 * g * m + 2.0 * n + g + 1.0) + 0.5 * p.k() * b * (b + h))
}

/// `(g chi + b k)(g chi + (b + hbar) k) / (2 k) - w^2 / (2 k)`.
pub fn level_product_form(p: &ModelParams, mu: u32, nu: u32) -> Result<f64> {
    check_mu(p, mu)?;
    check_nu(p, mu, nu)?;
    let k = p.k();
    let chi = chi_of(p)?.chi;
    let b = (p.gamma * (mu as f64 + 1.0) + nu as f64) * p.hbar;
    let gc = p.gamma * chi;
    Ok(((gc + b * k) * (gc + (b + p.hbar) * k) - p.omega * p.omega) / (2.0 * k))
}

/// `g^2 (E^xi - w^2 / (2 k g^2)) + hbar g eps_mu (2 nu + 1) / 2 + hbar^2 k nu (nu + 1) / 2`.
pub fn level_split_form(p: &ModelParams, mu: u32, nu: u32) -> Result<f64> {
    check_nu(p, mu, nu)?;
    let eps = epsilon_mu(p, mu)?;
    let n = nu as f64;
    Ok(p.gamma * p.gamma * level_xi_shifted(p, mu)?
        + 0.5 * p.hbar * p.gamma * eps * (2.0 * n + 1.0)
        + 0.5 * p.hbar * p.hbar * p.k() * n * (n + 1.0))
}

/// Truncation of an enumerated spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff {
    /// Levels with `E <= value`.
    Energy(f64),
    /// Levels with `m mu + n nu <= value`; needs a ratio.
    Key(u64),
    /// The lowest `value` levels.
    Count(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub mu: u32,
    pub nu: u32,
    pub energy: f64,
    pub key: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegeneracyClass {
    pub key: u64,
    pub size: usize,
    pub energy: f64,
    /// `(max E - min E) / |mean E|` over the members.
    #[serde(skip)]
    pub spread: f64,
    #[serde(skip)]
    pub members: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub entries: Vec<SpectrumEntry>,
    pub classes: Vec<DegeneracyClass>,
    /// Hyperboloid channels `mu` whose `y` problem has no bound state.
    pub empty_channels: Vec<u32>,
}

impl Spectrum {
    /// Smallest relative gap between two entries, `None` with fewer than two.
    pub fn min_relative_gap(&self) -> Option<f64> {
        let mut e: Vec<f64> = self.entries.iter().map(|x| x.energy).collect();
        e.sort_by(f64::total_cmp);
        e.windows(2)
            .map(|w| (w[1] - w[0]) / w[0].abs().max(w[1].abs()).max(f64::MIN_POSITIVE))
            .min_by(f64::total_cmp)
    }
}

fn sweep_bound(p: &ModelParams) -> Result<(Vec<(u32, u32)>, Vec<u32>)> {
    let b = max_quantum_numbers(p)?;
    let mut pairs = Vec::new();
    let mut empty = Vec::new();
    for (mu, &nmax) in b.nu_max.iter().enumerate() {
        if nmax < 0 {
            empty.push(mu as u32);
        }
        for nu in 0..=nmax.max(-1) {
            pairs.push((mu as u32, nu as u32));
        }
    }
    Ok((pairs, empty))
}

/// Levels up to `cutoff` (sphere, plane) or the bound levels within
/// `cutoff` (hyperboloid), grouped by the key `m mu + n nu`.
pub fn enumerate_levels(p: &ModelParams, cutoff: Cutoff) -> Result<Spectrum> {
    let ratio = p.ratio;
    let key_of = |mu: u32, nu: u32| ratio.map(|r| r.m as u64 * mu as u64 + r.n as u64 * nu as u64);
    let (candidates, empty_channels): (Vec<(u32, u32)>, Vec<u32>) = if p.k() < 0.0 {
        sweep_bound(p)?
    } else {
        let pairs = match cutoff {
            Cutoff::Energy(e) => {
                if !(e.is_finite()) {
                    return Err(Error::InvalidParams(format!("energy cutoff {e} must be finite")));
                }
                let mut pairs = Vec::new();
                let mut mu = 0u32;
                while level(p, mu, 0)? <= e {
                    let mut nu = 0u32;
                    while level(p, mu, nu)? <= e {
                        pairs.push((mu, nu));
                        nu += 1;
                    }
                    mu += 1;
                }
                pairs
            }
            Cutoff::Key(kmax) => {
                let r = p.require_ratio("a key cutoff needs gamma = m/n")?;
                let mut pairs = Vec::new();
                for mu in 0..=(kmax / r.m as u64) as u32 {
                    let rest = kmax - r.m as u64 * mu as u64;
                    for nu in 0..=(rest / r.n as u64) as u32 {
                        pairs.push((mu, nu));
                    }
                }
                pairs
            }
            Cutoff::Count(n) => {
                let side = n as u32;
                let mut pairs = Vec::with_capacity(n * n);
                for mu in 0..side {
                    for nu in 0..side {
                        pairs.push((mu, nu));
                    }
                }
                pairs
            }
        };
        (pairs, Vec::new())
    };

    let mut entries = candidates
        .into_iter()
        .map(|(mu, nu)| Ok(SpectrumEntry { mu, nu, energy: level(p, mu, nu)?, key: key_of(mu, nu) }))
        .collect::<Result<Vec<_>>>()?;
    entries.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.mu.cmp(&b.mu)));
    match cutoff {
        Cutoff::Energy(e) => entries.retain(|x| x.energy <= e),
        Cutoff::Key(kmax) => {
            let r = p.require_ratio("a key cutoff needs gamma = m/n")?;
            entries.retain(|x| r.m as u64 * x.mu as u64 + r.n as u64 * x.nu as u64 <= kmax);
        }
        Cutoff::Count(n) => entries.truncate(n),
    }

    let mut classes: Vec<DegeneracyClass> = Vec::new();
    if ratio.is_some() {
        let mut keyed: Vec<&SpectrumEntry> = entries.iter().collect();
        keyed.sort_by_key(|x| (x.key, x.mu));
        for chunk in keyed.chunk_by(|a, b| a.key == b.key) {
            let energies: Vec<f64> = chunk.iter().map(|x| x.energy).collect();
            let lo = energies.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mean = energies.iter().sum::<f64>() / energies.len() as f64;
            classes.push(DegeneracyClass {
                key: chunk[0].key.expect("keyed entry"),
                size: chunk.len(),
                energy: chunk[0].energy,
                spread: if mean == 0.0 { hi - lo } else { (hi - lo) / mean.abs() },
                members: chunk.iter().map(|x| (x.mu, x.nu)).collect(),
            });
        }
    }
    Ok(Spectrum { entries, classes, empty_channels })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: f64, w: f64, g: f64) -> ModelParams {
        ModelParams::new(k, w, g, 1.0).unwrap()
    }

    #[test]
    fn chi_examples() {
        let c = chi_of(&params(1.0, 1.0, 1.0)).unwrap().chi;
        assert!((c - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        let c = chi_of(&params(-1.0, 5.0, 1.0)).unwrap().chi;
        assert!((c - (101f64.sqrt() + 1.0) / 2.0).abs() < 1e-14);
        assert!((c - 5.52494).abs() < 1e-5);
        assert_eq!(chi_of(&params(0.0, 1.0, 1.0)), Err(Error::FlatCurvature));
    }

    #[test]
    fn epsilon_examples() {
        let e = epsilon_mu(&params(1.0, 1.0, 1.0), 0).unwrap();
        assert!((e - (5f64.sqrt() + 1.0) / 2.0).abs() < 1e-15);
        let p = params(-1.0, 5.0, 1.0);
        let e = epsilon_mu(&p, 4).unwrap();
        assert!((e - ((101f64.sqrt() + 1.0) / 2.0 - 5.0)).abs() < 1e-14);
        assert!(e > 0.0);
        assert!(matches!(epsilon_mu(&p, 5), Err(Error::MuOutOfRange { mu: 5, mu_max: 4 })));
    }

    #[test]
    fn flat_level() {
        assert_eq!(level(&params(0.0, 1.0, 2.0), 0, 0).unwrap(), 1.5);
    }

    #[test]
    fn hyperbolic_maxima() {
        let b = max_quantum_numbers(&params(-1.0, 5.0, 1.0)).unwrap();
        assert_eq!(b.mu_max, 4);
        assert_eq!(b.nu_max(4).unwrap(), -1);
        assert_eq!(b.nu_max, vec![3, 2, 1, 0, -1]);
        assert!(max_quantum_numbers(&params(1.0, 5.0, 1.0)).is_err());
        assert!(max_quantum_numbers(&params(0.0, 5.0, 1.0)).is_err());
    }

    #[test]
    fn integer_edge_is_excluded() {
        assert_eq!(largest_integer_below(3.0), 2);
        assert_eq!(largest_integer_below(3.0 + 1e-14), 2);
        assert_eq!(largest_integer_below(3.2), 3);
        assert_eq!(largest_integer_below(-0.4), -1);
        // chi / hbar|k| = 4 exactly: a = chi (chi - 1) = 12
        let p = params(-1.0, 12f64.sqrt(), 1.0);
        assert_eq!(max_quantum_numbers(&p).unwrap().mu_max, 2);
    }

    #[test]
    fn sphere_degenerate_pair() {
        let p = ModelParams::commensurate(1.0, 1.0, 2, 1, 1.0).unwrap();
        let a = level(&p, 0, 2).unwrap();
        let b = level(&p, 1, 0).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs());
        let s = enumerate_levels(&p, Cutoff::Key(2)).unwrap();
        let class = s.classes.iter().find(|c| c.key == 2).unwrap();
        assert_eq!(class.members, vec![(0, 2), (1, 0)]);
    }

    #[test]
    fn flat_isotropic_classes() {
        let p = ModelParams::commensurate(0.0, 1.0, 1, 1, 1.0).unwrap();
        let s = enumerate_levels(&p, Cutoff::Key(3)).unwrap();
        let sizes: Vec<usize> = s.classes.iter().map(|c| c.size).collect();
        assert_eq!(sizes, vec![1, 2, 3, 4]);
    }

    #[test]
    fn hyperbolic_enumeration_flags_empty_channel() {
        let p = ModelParams::commensurate(-1.0, 5.0, 1, 1, 1.0).unwrap();
        let s = enumerate_levels(&p, Cutoff::Energy(f64::MAX)).unwrap();
        assert_eq!(s.entries.len(), 4 + 3 + 2 + 1);
        assert_eq!(s.empty_channels, vec![4]);
        assert!(level(&p, 0, 4).is_err());
    }

    #[test]
    fn count_cutoff() {
        let p = params(1.0, 1.0, 2f64.sqrt());
        let s = enumerate_levels(&p, Cutoff::Count(10)).unwrap();
        assert_eq!(s.entries.len(), 10);
        assert!(s.classes.is_empty());
        assert!(s.entries.windows(2).all(|w| w[0].energy <= w[1].energy));
        assert_eq!((s.entries[0].mu, s.entries[0].nu), (0, 0));
    }

    #[test]
    fn key_cutoff_needs_ratio() {
        assert!(matches!(
            enumerate_levels(&params(1.0, 1.0, 1.0), Cutoff::Key(3)),
            Err(Error::MissingRatio(_))
        ));
    }
}
