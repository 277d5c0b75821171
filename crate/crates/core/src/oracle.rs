//! Brute-force Fock-space oracle.
//!
//! Enumerates every occupation configuration of a finite set of modes and
//! computes grand-canonical averages and ground states directly from the
//! configuration weights, with no factorisation over modes. Used to check
//! the closed forms in [`crate::statistics`] and [`crate::open_system`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statistics::{StatisticsKind, Thermo};

/// Largest number of configurations the oracle will enumerate.
pub const ENUMERATION_CAP: u64 = 10_000_000;

/// Finite list of single-particle energies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSet {
    energies: Vec<f64>,
}

impl ModeSet {
    pub fn new(energies: Vec<f64>) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::invalid("energies", "mode set must not be empty"));
        }
        if let Some(bad) = energies.iter().find(|e| !e.is_finite()) {
            return Err(Error::invalid(
                "energies",
                format!("non-finite energy {bad}"),
            ));
        }
        Ok(Self { energies })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub counts: Vec<u32>,
}

impl Configuration {
    pub fn particles(&self) -> u64 {
        self.counts.iter().map(|&n| u64::from(n)).sum()
    }

    /// `Σ_i (ε_i − μ) n_i`.
    pub fn effective_energy(&self, modes: &ModeSet, mu: f64) -> f64 {
        self.counts
            .iter()
            .zip(modes.energies())
            .map(|(&n, &e)| (e - mu) * f64::from(n))
            .sum()
    }

    /// Indices of modes with nonzero occupation.
    pub fn occupied(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Odometer over all configurations; the last mode varies fastest.
#[derive(Debug, Clone)]
pub struct Configurations {
    current: Option<Vec<u32>>,
    max_count: u32,
}

impl Iterator for Configurations {
    type Item = Configuration;

    fn next(&mut self) -> Option<Configuration> {
        let counts = self.current.as_mut()?;
        let out = Configuration {
            counts: counts.clone(),
        };
        let mut i = counts.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if counts[i] < self.max_count {
                counts[i] += 1;
                break;
            }
            counts[i] = 0;
        }
        Some(out)
    }
}

fn max_count(s: StatisticsKind, cutoff: u32) -> u32 {
    match s {
        StatisticsKind::Fermi => 1,
        StatisticsKind::Bose => cutoff,
    }
}

/// Every configuration exactly once, vacuum first. Fermions take counts in
/// `{0, 1}`; bosons in `0..=cutoff`.
pub fn enumerate_configurations(
    m: &ModeSet,
    s: StatisticsKind,
    cutoff: u32,
) -> Result<Configurations> {
    let max = max_count(s, cutoff);
    let requested = (f64::from(max) + 1.0).powi(m.len() as i32);
    if requested > ENUMERATION_CAP as f64 {
        return Err(Error::EnumerationTooLarge {
            requested,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(Configurations {
        current: Some(vec![0; m.len()]),
        max_count: max,
    })
}

/// Exact per-mode means `Σ n_i w / Σ w` with `w = e^{−β(E − μN)}` over the
/// enumerated space. Weights are kept relative to the largest one seen so
/// far, rescaling when a larger one appears.
pub fn gc_average_occupation(
    m: &ModeSet,
    t: &Thermo,
    s: StatisticsKind,
    cutoff: u32,
) -> Result<Vec<f64>> {
    if s == StatisticsKind::Bose {
        if let Some(&e) = m.energies().iter().find(|&&e| !(t.exponent(e) > 0.0)) {
            return Err(Error::InvalidChemicalPotential {
                mu: t.mu(),
                exponent: t.exponent(e),
            });
        }
    }
    let mut log_ref = f64::NEG_INFINITY;
    let mut partition = 0.0;
    let mut weighted = vec![0.0; m.len()];
    for cfg in enumerate_configurations(m, s, cutoff)? {
        let log_w = -t.beta() * cfg.effective_energy(m, t.mu());
        if log_w > log_ref {
            let scale = (log_ref - log_w).exp();
            partition *= scale;
            weighted.iter_mut().for_each(|x| *x *= scale);
            log_ref = log_w;
        }
        let w = (log_w - log_ref).exp();
        partition += w;
        for (acc, &n) in weighted.iter_mut().zip(&cfg.counts) {
            *acc += f64::from(n) * w;
        }
    }
    Ok(weighted.into_iter().map(|x| x / partition).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GroundState {
    Bounded {
        energy: f64,
        configuration: Configuration,
    },
    /// Some boson mode has `ε − μ < 0`; filling it lowers the energy without
    /// limit.
    Unbounded { mode: usize },
}

impl GroundState {
    pub fn is_bounded(&self) -> bool {
        matches!(self, GroundState::Bounded { .. })
    }

    /// `−∞` when unbounded.
    pub fn energy(&self) -> f64 {
        match self {
            GroundState::Bounded { energy, .. } => *energy,
            GroundState::Unbounded { .. } => f64::NEG_INFINITY,
        }
    }

    pub fn configuration(&self) -> Option<&Configuration> {
        match self {
            GroundState::Bounded { configuration, .. } => Some(configuration),
            GroundState::Unbounded { .. } => None,
        }
    }
}

/// Minimises `Σ_i (ε_i − μ) n_i` over all configurations including the
/// vacuum. Ties resolve to the first configuration in enumeration order.
pub fn ground_state_search(
    m: &ModeSet,
    mu: f64,
    s: StatisticsKind,
    cutoff: u32,
) -> Result<GroundState> {
    let configurations = enumerate_configurations(m, s, cutoff)?;
    if s == StatisticsKind::Bose {
        if let Some(mode) = m.energies().iter().position(|&e| e - mu < 0.0) {
            return Ok(GroundState::Unbounded { mode });
        }
    }
    let mut best: Option<(f64, Configuration)> = None;
    for cfg in configurations {
        let e = cfg.effective_energy(m, mu);
        if best.as_ref().is_none_or(|(b, _)| e < *b) {
            best = Some((e, cfg));
        }
    }
    let (energy, configuration) = best.expect("enumeration yields at least the vacuum");
    Ok(GroundState::Bounded {
        energy,
        configuration,
    })
}
