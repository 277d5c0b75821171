//! Effective energies of an open ensemble of independent oscillators in
//! contact with a particle reservoir at chemical potential `μ`.
//!
//! A level `q` is *accessible* when its effective frequency
//! `ℏω_eff(q) = ½ℏω + qℏω − μ` is strictly positive, equivalently
//! `q > q_min(μ) = μ/ℏω − ½`. Levels exactly on the boundary are not
//! accessible.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::{ensemble_energy, mode_energy, OccupationState, OscillatorParams};

/// `ℏω_eff(q) = ½ℏω + qℏω − μ`, an energy that may be negative.
pub fn effective_frequency(q: usize, mu: f64, p: &OscillatorParams) -> f64 {
    mode_energy(q, p) - mu
}

/// `q_min(μ) = μ/(ℏω) − ½`; levels strictly above it are accessible.
pub fn q_min_vibrational(mu: f64, p: &OscillatorParams) -> f64 {
    mu / p.quantum() - 0.5
}

/// Combined single-series form `Σ_q [ℏω(q + ½) − μ] n_q`.
pub fn effective_energy_vibrational(
    occ: &OccupationState,
    mu: f64,
    p: &OscillatorParams,
) -> Result<f64> {
    occ.check_closure()?;
    Ok(occ
        .iter()
        .map(|(q, n)| effective_frequency(q, mu, p) * n as f64)
        .sum())
}

/// Two-sum form `Σ_q ℏω(q + ½) n_q − μ Σ_q n_q`.
pub fn effective_energy_vibrational_two_sum(
    occ: &OccupationState,
    mu: f64,
    p: &OscillatorParams,
) -> Result<f64> {
    let energy = ensemble_energy(occ, p)?;
    let count: usize = occ.iter().map(|(_, n)| n).sum();
    Ok(energy - mu * count as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub energy: f64,
    pub positive: bool,
    /// Occupied levels whose effective frequency is `≤ 0`.
    pub witnesses: Vec<usize>,
}

/// Checks that the effective energy of `occ` is strictly positive. The
/// vacuum has energy zero and therefore fails.
pub fn positivity_check(
    occ: &OccupationState,
    mu: f64,
    p: &OscillatorParams,
) -> Result<PositivityReport> {
    let energy = effective_energy_vibrational(occ, mu, p)?;
    let witnesses = occ
        .iter()
        .map(|(q, _)| q)
        .filter(|&q| effective_frequency(q, mu, p) <= 0.0)
        .collect();
    Ok(PositivityReport {
        energy,
        positive: energy > 0.0,
        witnesses,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LevelAccess {
    Accessible,
    /// `|ℏω_eff| ≤ ε`; never counted as accessible.
    Boundary,
    Inaccessible,
}

/// Classifies level `q`. With `epsilon = 0` only an exact zero lands on the
/// boundary.
pub fn level_access(q: usize, mu: f64, p: &OscillatorParams, epsilon: f64) -> LevelAccess {
    let w = effective_frequency(q, mu, p);
    if w.abs() <= epsilon {
        LevelAccess::Boundary
    } else if w > 0.0 {
        LevelAccess::Accessible
    } else {
        LevelAccess::Inaccessible
    }
}

/// Levels `0..=q_max` split by accessibility at a given `μ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccessibleSet {
    pub q_min: f64,
    pub q_max: usize,
    pub accessible: Vec<usize>,
    pub boundary: Vec<usize>,
}

impl AccessibleSet {
    pub fn compute(mu: f64, p: &OscillatorParams, q_max: usize, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(Error::invalid(
                "epsilon",
                format!("must be >= 0, got {epsilon}"),
            ));
        }
        let mut accessible = Vec::new();
        let mut boundary = Vec::new();
        for q in 0..=q_max {
            match level_access(q, mu, p, epsilon) {
                LevelAccess::Accessible => accessible.push(q),
                LevelAccess::Boundary => boundary.push(q),
                LevelAccess::Inaccessible => {}
            }
        }
        Ok(Self {
            q_min: q_min_vibrational(mu, p),
            q_max,
            accessible,
            boundary,
        })
    }

    pub fn contains(&self, q: usize) -> bool {
        self.accessible.binary_search(&q).is_ok()
    }

    /// Smallest accessible level in range, if any.
    pub fn lowest(&self) -> Option<usize> {
        self.accessible.first().copied()
    }
}

/// Fermionic level classification relative to the reservoir.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FermionClass {
    /// Energy strictly below `μ`: confined to the system.
    Bound,
    /// Energy at or above `μ`: can be exchanged with the reservoir.
    Exchangeable,
}

/// `Bound` iff `ℏω(q + ½) < μ`. Exact equality is `Exchangeable`.
pub fn classify_fermion_state(q: usize, mu: f64, p: &OscillatorParams) -> FermionClass {
    if mode_energy(q, p) < mu {
        FermionClass::Bound
    } else {
        FermionClass::Exchangeable
    }
}
