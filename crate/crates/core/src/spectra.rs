//! Spectra of closed (fixed particle number) oscillator ensembles in the
//! occupation-number representation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};

/// Physical constants of one oscillator species.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    hbar: f64,
    mass: f64,
    omega: f64,
}

impl OscillatorParams {
    pub fn new(hbar: f64, mass: f64, omega: f64) -> Result<Self> {
        Ok(Self {
            hbar: require_positive("hbar", hbar)?,
            mass: require_positive("mass", mass)?,
            omega: require_positive("omega", omega)?,
        })
    }

    /// Reduced units: `ℏ = 1`, `m = 1`.
    pub fn reduced(omega: f64) -> Result<Self> {
        Self::new(1.0, 1.0, omega)
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// The level spacing `ℏω`.
    pub fn quantum(&self) -> f64 {
        self.hbar * self.omega
    }
}

/// Energy `ℏω(q + ½)` of level `q`.
pub fn mode_energy(q: usize, p: &OscillatorParams) -> f64 {
    p.quantum() * (q as f64 + 0.5)
}

/// Sparse occupation numbers `n_q` together with the declared particle number.
///
/// Only nonzero occupations are stored. A state built with [`from_parts`]
/// keeps whatever total it was given, so the closure `Σ n_q = n` is checked
/// by the operations that consume it.
///
/// [`from_parts`]: OccupationState::from_parts
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccupationState {
    occupations: BTreeMap<usize, usize>,
    total: usize,
}

impl OccupationState {
    pub fn vacuum() -> Self {
        Self::default()
    }

    /// Builds a state from `(level, count)` pairs; repeated levels accumulate.
    pub fn from_counts<I>(counts: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut occupations = BTreeMap::new();
        for (q, n) in counts {
            if n > 0 {
                *occupations.entry(q).or_insert(0) += n;
            }
        }
        let total = occupations.values().sum();
        Self { occupations, total }
    }

    /// Builds the state of an explicit per-particle level list.
    pub fn from_levels<I>(levels: I) -> Self
    where
        I: IntoIterator<Item = usize>,
    {
        Self::from_counts(levels.into_iter().map(|q| (q, 1)))
    }

    /// Unchecked constructor carrying an externally declared total.
    pub fn from_parts(occupations: BTreeMap<usize, usize>, total: usize) -> Self {
        let occupations = occupations.into_iter().filter(|&(_, n)| n > 0).collect();
        Self { occupations, total }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn occupation(&self, q: usize) -> usize {
        self.occupations.get(&q).copied().unwrap_or(0)
    }

    /// Nonzero `(q, n_q)` pairs in increasing `q`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.occupations.iter().map(|(&q, &n)| (q, n))
    }

    pub fn is_empty(&self) -> bool {
        self.occupations.is_empty()
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

    /// Disjoint union: occupations add level by level.
    pub fn merge(&self, other: &Self) -> Self {
        Self::from_counts(self.iter().chain(other.iter()))
    }
}

/// `Σ_q ℏω(q + ½) n_q`.
pub fn ensemble_energy(occ: &OccupationState, p: &OscillatorParams) -> Result<f64> {
    occ.check_closure()?;
    Ok(occ.iter().map(|(q, n)| mode_energy(q, p) * n as f64).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> OscillatorParams {
        OscillatorParams::reduced(1.0).unwrap()
    }

    #[test]
    fn mode_energy_values() {
        assert_eq!(mode_energy(0, &unit()), 0.5);
        assert_eq!(mode_energy(1, &unit()), 1.5);
        let p = OscillatorParams::reduced(2.0).unwrap();
        assert_eq!(mode_energy(3, &p), 7.0);
    }

    #[test]
    fn rejects_non_positive_constants() {
        assert!(OscillatorParams::new(0.0, 1.0, 1.0).is_err());
        assert!(OscillatorParams::new(1.0, -1.0, 1.0).is_err());
        assert!(OscillatorParams::new(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn ensemble_energy_examples() {
        let p = unit();
        assert_eq!(
            ensemble_energy(&OccupationState::from_counts([(0, 2)]), &p).unwrap(),
            1.0
        );
        let occ = OccupationState::from_counts([(0, 1), (2, 3)]);
        assert_eq!(ensemble_energy(&occ, &p).unwrap(), 8.0);
    }

    #[test]
    fn ensemble_energy_matches_particle_list() {
        let p = unit();
        let occ = OccupationState::from_counts([(0, 1), (1, 1), (2, 1)]);
        // expand into an explicit particle list
        let particles: Vec<usize> = occ
            .iter()
            .flat_map(|(q, n)| std::iter::repeat(q).take(n))
            .collect();
        let by_particle: f64 = particles.iter().map(|&q| mode_energy(q, &p)).sum();
        assert_eq!(by_particle, 4.5);
        assert_eq!(ensemble_energy(&occ, &p).unwrap(), by_particle);
    }

    #[test]
    fn closure_violation_is_reported() {
        let occ = OccupationState::from_parts(BTreeMap::from([(0, 2), (1, 1)]), 4);
        assert_eq!(
            ensemble_energy(&occ, &unit()),
            Err(Error::ClosureViolation {
                declared: 4,
                actual: 3
            })
        );
    }

    #[test]
    fn vacuum_has_zero_energy() {
        assert_eq!(
            ensemble_energy(&OccupationState::vacuum(), &unit()).unwrap(),
            0.0
        );
    }

    fn occupation_strategy() -> impl Strategy<Value = OccupationState> {
        prop::collection::vec((0usize..50, 0usize..20), 0..8).prop_map(OccupationState::from_counts)
    }

    proptest! {
        #[test]
        fn level_spacing_is_one_quantum(q in 0usize..10_000, omega in 0.01f64..100.0) {
            let p = OscillatorParams::reduced(omega).unwrap();
            let gap = mode_energy(q + 1, &p) - mode_energy(q, &p);
            prop_assert!((gap - omega).abs() <= 1e-12 * mode_energy(q + 1, &p));
        }

        #[test]
        fn energy_is_additive(a in occupation_strategy(), b in occupation_strategy(), omega in 0.1f64..10.0) {
            let p = OscillatorParams::reduced(omega).unwrap();
            let union = ensemble_energy(&a.merge(&b), &p).unwrap();
            let parts = ensemble_energy(&a, &p).unwrap() + ensemble_energy(&b, &p).unwrap();
            prop_assert!((union - parts).abs() <= 1e-12 * union.max(1.0));
        }

        #[test]
        fn all_in_ground_level(occ in occupation_strategy(), omega in 0.1f64..10.0) {
            let p = OscillatorParams::reduced(omega).unwrap();
            let ground = OccupationState::from_counts([(0, occ.total())]);
            let e = ensemble_energy(&ground, &p).unwrap();
            prop_assert!((e - occ.total() as f64 / 2.0 * omega).abs() <= 1e-12 * e.max(1.0));
        }
    }
}
