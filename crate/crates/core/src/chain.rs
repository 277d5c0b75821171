//! Periodic linear chain of `N` identical oscillators with nearest-neighbour
//! coupling `c`.
//!
//! After Fourier transformation the chain decouples into normal modes
//! `s = 1..=N` with `ω_s² = ω²[1 + 4c sin²(πs/N)]`, each carrying its own
//! level `q_s`. The canonical energy is the per-mode direct sum. The grouped
//! expression `Σ_q [Σ_{s∈S_q} ℏω_s(q + ½)] n_q` with `n_q = |S_q|` is kept
//! as a diagnostic: it counts each group total `|S_q|` times and therefore
//! disagrees with the direct sum as soon as two modes share a level.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::{OccupationState, OscillatorParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    count: usize,
    osc: OscillatorParams,
    coupling: f64,
}

impl ChainParams {
    /// `coupling = 0` is accepted as the decoupled limit.
    pub fn new(count: usize, osc: OscillatorParams, coupling: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::invalid(
                "count",
                "chain needs at least one oscillator",
            ));
        }
        if !(coupling.is_finite() && coupling >= 0.0) {
            return Err(Error::invalid(
                "coupling",
                format!("must be finite and >= 0, got {coupling}"),
            ));
        }
        Ok(Self {
            count,
            osc,
            coupling,
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn osc(&self) -> &OscillatorParams {
        &self.osc
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// Normal-mode frequency `ω_s` for `s` in `1..=N`.
    pub fn frequency(&self, s: usize) -> f64 {
        let n = self.count;
        // fold s onto min(s, N - s) so ω_s = ω_{N-s} holds bit for bit
        let r = s % n;
        let folded = r.min(n - r);
        let sin = (PI * folded as f64 / n as f64).sin();
        self.osc.omega() * (1.0 + 4.0 * self.coupling * sin * sin).sqrt()
    }
}

/// Levels `q_s` of the normal modes, stored for `s = 1..=N` in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainAssignment {
    levels: Vec<usize>,
}

impl ChainAssignment {
    pub fn new(levels: Vec<usize>) -> Self {
        Self { levels }
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Level of mode `s` (1-based).
    pub fn level(&self, s: usize) -> usize {
        self.levels[s - 1]
    }

    /// `(s, q_s)` pairs, `s` starting at 1.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.levels.iter().enumerate().map(|(i, &q)| (i + 1, q))
    }

    /// `S_q = {s : q_s = q}` for every occupied level.
    pub fn level_groups(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (s, q) in self.iter() {
            groups.entry(q).or_default().push(s);
        }
        groups
    }

    /// `n_q = |S_q|`.
    pub fn occupations(&self) -> OccupationState {
        OccupationState::from_levels(self.levels.iter().copied())
    }

    fn check_len(&self, ch: &ChainParams) -> Result<()> {
        if self.levels.len() == ch.count {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: ch.count,
                actual: self.levels.len(),
            })
        }
    }
}

/// `ω_s` for `s = 1..=N`.
pub fn chain_frequencies(ch: &ChainParams) -> Vec<f64> {
    (1..=ch.count).map(|s| ch.frequency(s)).collect()
}

/// `Σ_s ℏω_s (q_s + ½)`.
pub fn chain_energy(a: &ChainAssignment, ch: &ChainParams) -> Result<f64> {
    a.check_len(ch)?;
    let hbar = ch.osc.hbar();
    Ok(a.iter()
        .map(|(s, q)| hbar * ch.frequency(s) * (q as f64 + 0.5))
        .sum())
}

/// `Σ_s [ℏω_s (q_s + ½) − μ]`.
pub fn chain_effective_energy(a: &ChainAssignment, mu: f64, ch: &ChainParams) -> Result<f64> {
    a.check_len(ch)?;
    let hbar = ch.osc.hbar();
    Ok(a.iter()
        .map(|(s, q)| hbar * ch.frequency(s) * (q as f64 + 0.5) - mu)
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupedFormEnergy {
    /// Literal grouped expression.
    pub grouped: f64,
    /// Per-mode direct sum.
    pub canonical: f64,
    /// Some level is shared by more than one mode.
    pub discrepancy: bool,
}

/// Evaluates `Σ_q [Σ_{s∈S_q} ℏω_s(q + ½)] n_q − μ Σ_q n_q` alongside the
/// canonical direct sum.
pub fn grouped_form_energy(
    a: &ChainAssignment,
    mu: f64,
    ch: &ChainParams,
) -> Result<GroupedFormEnergy> {
    let canonical = chain_effective_energy(a, mu, ch)?;
    let hbar = ch.osc.hbar();
    let groups = a.level_groups();
    let mut grouped = 0.0;
    let mut particles = 0usize;
    for (&q, members) in &groups {
        let group_total: f64 = members
            .iter()
            .map(|&s| hbar * ch.frequency(s) * (q as f64 + 0.5))
            .sum();
        grouped += group_total * members.len() as f64;
        particles += members.len();
    }
    grouped -= mu * particles as f64;
    Ok(GroupedFormEnergy {
        grouped,
        canonical,
        discrepancy: groups.values().any(|m| m.len() > 1),
    })
}

/// `q_min(μ, n) = μ / Σ_{s∈S_q} ℏω_s − ½` for the group currently at level `q`.
pub fn q_min_chain(mu: f64, q: usize, a: &ChainAssignment, ch: &ChainParams) -> Result<f64> {
    a.check_len(ch)?;
    let hbar = ch.osc.hbar();
    let members: Vec<usize> = a
        .iter()
        .filter(|&(_, qs)| qs == q)
        .map(|(s, _)| s)
        .collect();
    if members.is_empty() {
        return Err(Error::EmptyLevelGroup { level: q });
    }
    let group_quantum: f64 = members.iter().map(|&s| hbar * ch.frequency(s)).sum();
    Ok(mu / group_quantum - 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::open_system::{effective_energy_vibrational, q_min_vibrational};
    use crate::spectra::ensemble_energy;
    use proptest::prelude::*;

    fn chain(n: usize, c: f64) -> ChainParams {
        ChainParams::new(n, OscillatorParams::reduced(1.0).unwrap(), c).unwrap()
    }

    #[test]
    fn frequency_examples() {
        assert!(chain_frequencies(&chain(7, 0.0)).iter().all(|&w| w == 1.0));
        let ch = chain(6, 0.8);
        assert_eq!(ch.frequency(6), 1.0);
        let ch = chain(4, 0.25);
        assert!((ch.frequency(2) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_params() {
        let osc = OscillatorParams::reduced(1.0).unwrap();
        assert!(ChainParams::new(0, osc, 0.1).is_err());
        assert!(ChainParams::new(3, osc, -0.1).is_err());
    }

    #[test]
    fn energy_examples() {
        let ch = chain(2, 0.0);
        assert_eq!(
            chain_energy(&ChainAssignment::new(vec![0, 0]), &ch).unwrap(),
            1.0
        );
        assert_eq!(
            chain_energy(&ChainAssignment::new(vec![1, 2]), &ch).unwrap(),
            4.0
        );

        let ch = chain(3, 0.5);
        let half_sum: f64 = chain_frequencies(&ch).iter().sum::<f64>() / 2.0;
        let e = chain_energy(&ChainAssignment::new(vec![0, 0, 0]), &ch).unwrap();
        assert!((e - half_sum).abs() < 1e-15);

        assert_eq!(
            chain_energy(&ChainAssignment::new(vec![0]), &ch),
            Err(Error::LengthMismatch {
                expected: 3,
                actual: 1
            })
        );
    }

    #[test]
    fn effective_energy_examples() {
        let ch = chain(2, 0.0);
        let a = ChainAssignment::new(vec![0, 0]);
        assert_eq!(
            chain_effective_energy(&a, 0.0, &ch).unwrap(),
            chain_energy(&a, &ch).unwrap()
        );
        assert!((chain_effective_energy(&a, 0.2, &ch).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn grouped_form_examples() {
        let ch = chain(2, 0.0);
        let shared = grouped_form_energy(&ChainAssignment::new(vec![0, 0]), 0.2, &ch).unwrap();
        assert!((shared.canonical - 0.6).abs() < 1e-15);
        assert!((shared.grouped - 1.6).abs() < 1e-15);
        assert!(shared.discrepancy);

        let split = grouped_form_energy(&ChainAssignment::new(vec![0, 1]), 0.2, &ch).unwrap();
        assert_eq!(split.grouped, split.canonical);
        assert!(!split.discrepancy);

        let single =
            grouped_form_energy(&ChainAssignment::new(vec![5]), 1.0, &chain(1, 0.3)).unwrap();
        assert!(!single.discrepancy);
    }

    #[test]
    fn q_min_examples() {
        let osc = OscillatorParams::reduced(1.0).unwrap();
        let ch = chain(3, 0.0);
        let a = ChainAssignment::new(vec![0, 1, 1]);
        assert_eq!(
            q_min_chain(1.7, 0, &a, &ch).unwrap(),
            q_min_vibrational(1.7, &osc)
        );
        assert_eq!(q_min_chain(0.0, 1, &a, &chain(3, 0.9)).unwrap(), -0.5);
        assert_eq!(q_min_chain(2.0, 1, &a, &ch).unwrap(), 0.5);
        assert_eq!(
            q_min_chain(2.0, 4, &a, &ch),
            Err(Error::EmptyLevelGroup { level: 4 })
        );
    }

    proptest! {
        #[test]
        fn spectral_symmetry_and_bounds(n in 1usize..64, c in 0.0f64..3.0, omega in 0.1f64..5.0) {
            let ch = ChainParams::new(n, OscillatorParams::reduced(omega).unwrap(), c).unwrap();
            let w = chain_frequencies(&ch);
            for s in 1..n {
                prop_assert_eq!(w[s - 1], w[n - s - 1]);
            }
            let top = omega * (1.0 + 4.0 * c).sqrt();
            for &ws in &w {
                prop_assert!(ws >= omega && ws <= top * (1.0 + 1e-15));
            }
        }

        #[test]
        fn decoupled_chain_is_independent_ensemble(levels in prop::collection::vec(0usize..20, 1..8), mu in -4.0f64..4.0) {
            let ch = chain(levels.len(), 0.0);
            let a = ChainAssignment::new(levels);
            let occ = a.occupations();
            let e_chain = chain_energy(&a, &ch).unwrap();
            let e_occ = ensemble_energy(&occ, ch.osc()).unwrap();
            prop_assert!((e_chain - e_occ).abs() <= 1e-14 * e_occ);
            let eff_chain = chain_effective_energy(&a, mu, &ch).unwrap();
            let eff_occ = effective_energy_vibrational(&occ, mu, ch.osc()).unwrap();
            let scale = e_occ + mu.abs() * a.len() as f64;
            prop_assert!((eff_chain - eff_occ).abs() <= 1e-14 * scale);
        }

        #[test]
        fn grouped_matches_canonical_iff_singletons(levels in prop::collection::vec(0usize..6, 1..6), c in 0.01f64..2.0, mu in -2.0f64..2.0) {
            let ch = chain(levels.len(), c);
            let a = ChainAssignment::new(levels);
            let g = grouped_form_energy(&a, mu, &ch).unwrap();
            let singletons = a.level_groups().values().all(|m| m.len() == 1);
            prop_assert_eq!(g.discrepancy, !singletons);
            if singletons {
                prop_assert!((g.grouped - g.canonical).abs() <= 1e-12 * g.grouped.abs().max(1.0));
            } else {
                prop_assert!(g.grouped > g.canonical);
            }
        }

        #[test]
        fn threshold_falls_as_group_grows(n in 2usize..10, mu in 0.01f64..10.0) {
            let ch = chain(n, 0.0);
            let mut prev = f64::INFINITY;
            for shared in 1..=n {
                let mut levels = vec![1; n];
                levels[..shared].iter_mut().for_each(|q| *q = 0);
                let t = q_min_chain(mu, 0, &ChainAssignment::new(levels), &ch).unwrap();
                prop_assert!(t < prev);
                prev = t;
            }
        }
    }
}
