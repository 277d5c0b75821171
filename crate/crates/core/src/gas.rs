//! Ideal gas of vibrating particles in a periodic box of side `L`.
//!
//! One-particle states carry a translational index `k ∈ ℤ` and a
//! vibrational level `q ≥ 0` with energy `ε_k + ℏω(q + ½)`, where
//! `ε_k = 4π²ℏ²k²/(2mL²)`. A single integer `k` indexes the translational
//! modes.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::spectra::{mode_energy, OscillatorParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParams {
    osc: OscillatorParams,
    box_length: f64,
    /// `ε_1 = 4π²ℏ²/(2mL²)`.
    translational_unit: f64,
}

impl GasParams {
    pub fn new(osc: OscillatorParams, box_length: f64) -> Result<Self> {
        let box_length = require_positive("box_length", box_length)?;
        let translational_unit =
            4.0 * PI * PI * osc.hbar() * osc.hbar() / (2.0 * osc.mass() * box_length * box_length);
        Ok(Self {
            osc,
            box_length,
            translational_unit,
        })
    }

    /// Fixes `ε_1` directly; the box length is derived from it.
    pub fn with_translational_unit(osc: OscillatorParams, unit: f64) -> Result<Self> {
        let unit = require_positive("translational_unit", unit)?;
        let box_length = 2.0 * PI * osc.hbar() / (2.0 * osc.mass() * unit).sqrt();
        Ok(Self {
            osc,
            box_length,
            translational_unit: unit,
        })
    }

    /// `ℏω = 1` and `ε_1 = 1` exactly.
    pub fn proof_units() -> Self {
        let osc = OscillatorParams::new(1.0, 1.0, 1.0).expect("unit constants are valid");
        Self::with_translational_unit(osc, 1.0).expect("unit prefactor is valid")
    }

    pub fn osc(&self) -> &OscillatorParams {
        &self.osc
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn translational_unit(&self) -> f64 {
        self.translational_unit
    }
}

/// Occupations `n_{k,q}` with declared total.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GasOccupationState {
    occupations: BTreeMap<(i64, usize), usize>,
    total: usize,
}

impl GasOccupationState {
    pub fn from_counts<I>(counts: I) -> Self
    where
        I: IntoIterator<Item = ((i64, usize), usize)>,
    {
        let mut occupations = BTreeMap::new();
        for (state, n) in counts {
            if n > 0 {
                *occupations.entry(state).or_insert(0) += n;
            }
        }
        let total = occupations.values().sum();
        Self { occupations, total }
    }

    pub fn from_parts(occupations: BTreeMap<(i64, usize), usize>, total: usize) -> Self {
        let occupations = occupations.into_iter().filter(|&(_, n)| n > 0).collect();
        Self { occupations, total }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, usize, usize)> + '_ {
        self.occupations.iter().map(|(&(k, q), &n)| (k, q, n))
    }

    pub fn check_closure(&self) -> Result<()> {
        let actual: usize = self.occupations.values().sum();
        if actual == self.total {
            Ok(())
        } else {
            Err(Error::ClosureViolation {
                declared: self.total,
                actual,
            })
        }
    }
}

/// `ε_k = 4π²ℏ²k²/(2mL²)`.
pub fn translational_energy(k: i64, g: &GasParams) -> f64 {
    let k = k as f64;
    g.translational_unit * k * k
}

/// `ε_k + ℏω(q + ½)`.
pub fn joint_energy(k: i64, q: usize, g: &GasParams) -> f64 {
    translational_energy(k, g) + mode_energy(q, &g.osc)
}

/// Combined form `Σ_{k,q} [ε_k + ℏω(q + ½) − μ] n_{k,q}`.
pub fn effective_energy_gas(occ: &GasOccupationState, mu: f64, g: &GasParams) -> Result<f64> {
    occ.check_closure()?;
    Ok(occ
        .iter()
        .map(|(k, q, n)| (joint_energy(k, q, g) - mu) * n as f64)
        .sum())
}

/// Two-sum form `Σ_{k,q} [ε_k + ℏω(q + ½)] n_{k,q} − μ Σ_{k,q} n_{k,q}`.
pub fn effective_energy_gas_two_sum(
    occ: &GasOccupationState,
    mu: f64,
    g: &GasParams,
) -> Result<f64> {
    occ.check_closure()?;
    let energy: f64 = occ
        .iter()
        .map(|(k, q, n)| joint_energy(k, q, g) * n as f64)
        .sum();
    let count: usize = occ.iter().map(|(_, _, n)| n).sum();
    Ok(energy - mu * count as f64)
}

/// `q_min(μ, k) = μ/ℏω − ε_k/ℏω − ½`.
pub fn q_min_gas(mu: f64, k: i64, g: &GasParams) -> f64 {
    let quantum = g.osc.quantum();
    mu / quantum - translational_energy(k, g) / quantum - 0.5
}

/// Per-`k` comparison of the vibrational condition with the point-particle one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasConditionRow {
    pub k: i64,
    /// `ε_k + ℏω/2 − μ > 0`.
    pub extended: bool,
    /// `ε_k − μ > 0`.
    pub classic: bool,
}

impl GasConditionRow {
    /// The extended condition admits a mode the point-particle gas forbids.
    pub fn gap(&self) -> bool {
        self.extended != self.classic
    }
}

pub fn bose_gas_condition(
    mu: f64,
    g: &GasParams,
    k_range: RangeInclusive<i64>,
) -> Vec<GasConditionRow> {
    k_range
        .map(|k| {
            let eps = translational_energy(k, g);
            GasConditionRow {
                k,
                extended: joint_energy(k, 0, g) - mu > 0.0,
                classic: eps - mu > 0.0,
            }
        })
        .collect()
}
