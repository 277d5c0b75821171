//! Grand-canonical occupation statistics.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{require_finite, require_positive, Error, Result};
use crate::gas::{joint_energy, q_min_gas, translational_energy, GasParams};
use crate::series::{CompensatedSum, SeriesResult, TruncationPolicy};
use crate::spectra::{mode_energy, OscillatorParams};

/// Above this value of `β(ε − μ)` occupations are evaluated through `e^{−x}`.
const SMALL_EXP_FORM: f64 = 30.0;

/// Below this value of `β(ε − μ)` the Bose occupation exceeds ~1e12.
const CONDENSATION_WARNING: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatisticsKind {
    Bose,
    Fermi,
}

impl StatisticsKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StatisticsKind::Bose => "bose",
            StatisticsKind::Fermi => "fermi",
        }
    }
}

/// Inverse temperature and chemical potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thermo {
    beta: f64,
    mu: f64,
}

impl Thermo {
    pub fn new(beta: f64, mu: f64) -> Result<Self> {
        Ok(Self {
            beta: require_positive("beta", beta)?,
            mu: require_finite("mu", mu)?,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::new(self.beta, mu)
    }

    /// `β(ε − μ)`.
    pub fn exponent(&self, energy: f64) -> f64 {
        self.beta * (energy - self.mu)
    }
}

/// Occupation as a function of `x = β(ε − μ)`, with no domain check.
pub(crate) fn occupation_of_exponent(x: f64, s: StatisticsKind) -> f64 {
    match s {
        StatisticsKind::Fermi => {
            if x > 0.0 {
                let y = (-x).exp();
                y / (1.0 + y)
            } else {
                1.0 / (x.exp() + 1.0)
            }
        }
        StatisticsKind::Bose => {
            if x > SMALL_EXP_FORM {
                let y = (-x).exp();
                y / (1.0 - y)
            } else {
                1.0 / x.exp_m1()
            }
        }
    }
}

/// Mean occupation `1/(e^{β(ε−μ)} ∓ 1)` of a single-particle level.
///
/// Bosons require `β(ε − μ) > 0`; the boundary is excluded.
pub fn occupation_number(energy: f64, t: &Thermo, s: StatisticsKind) -> Result<f64> {
    let x = t.exponent(energy);
    if s == StatisticsKind::Bose {
        if !(x > 0.0) {
            return Err(Error::InvalidChemicalPotential {
                mu: t.mu,
                exponent: x,
            });
        }
        if x < CONDENSATION_WARNING {
            log::warn!("Bose occupation near condensation: β(ε − μ) = {x:e}");
        }
    }
    Ok(occupation_of_exponent(x, s))
}

/// `⟨n⟩ = Σ_q 1/(e^{β[ℏω(q+½) − μ]} ∓ 1)` summed until the geometric tail
/// bound meets the policy.
///
/// Past the first level above `μ`, each occupation is at most
/// `e^{−x_q}/(1 − e^{−x_Q})` (Bose) or `e^{−x_q}` (Fermi), and
/// `x_q` grows by `βℏω` per level.
pub fn mean_particle_number(
    t: &Thermo,
    p: &OscillatorParams,
    s: StatisticsKind,
    policy: &TruncationPolicy,
) -> Result<SeriesResult> {
    if s == StatisticsKind::Bose {
        let x0 = t.exponent(mode_energy(0, p));
        if !(x0 > 0.0) {
            return Err(Error::InvalidChemicalPotential {
                mu: t.mu,
                exponent: x0,
            });
        }
    }
    // 1 − e^{−βℏω}
    let one_minus_ratio = -(-t.beta * p.quantum()).exp_m1();
    let mut sum = CompensatedSum::default();
    let mut q = 0usize;
    loop {
        sum.add(occupation_of_exponent(t.exponent(mode_energy(q, p)), s));
        q += 1;
        let x_next = t.exponent(mode_energy(q, p));
        let tail = if x_next > 0.0 {
            let lead = (-x_next).exp() / one_minus_ratio;
            match s {
                StatisticsKind::Fermi => lead,
                StatisticsKind::Bose => lead / -(-x_next).exp_m1(),
            }
        } else {
            f64::INFINITY
        };
        let value = sum.value();
        if policy.accepts(value, tail) || q >= policy.max_terms() {
            return Ok(policy.result(value, q, tail));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoseGasReport {
    /// `log Z` over the requested modes, with a bound on the omitted modes.
    pub log_partition: SeriesResult,
    /// `(k, ⟨n_k⟩)` in range order.
    pub occupations: Vec<(i64, f64)>,
}

/// Ideal gas of point bosons with `ε_k` from the box, over a finite `k` range.
///
/// `log Z = Σ_k −log(1 − e^{−β(ε_k − μ)})`. The bound on the modes outside
/// the range uses `−log(1 − y) ≤ y/(1 − y)` and the Gaussian decay of
/// `e^{−βε_k}` in `|k|`.
pub fn ideal_bose_gas(
    t: &Thermo,
    g: &GasParams,
    k_range: RangeInclusive<i64>,
    policy: &TruncationPolicy,
) -> Result<BoseGasReport> {
    let (k_lo, k_hi) = (*k_range.start(), *k_range.end());
    let mut log_z = CompensatedSum::default();
    let mut occupations = Vec::new();
    for k in k_range {
        let eps = translational_energy(k, g);
        let x = t.exponent(eps);
        if !(x > 0.0) {
            return Err(Error::BoseConditionViolated { k, gap: eps - t.mu });
        }
        log_z.add(-(-(-x).exp_m1()).ln());
        occupations.push((k, occupation_number(eps, t, StatisticsKind::Bose)?));
    }

    // smallest |k| outside the range
    let (gap_abs, gap_k) = if k_lo > k_hi || k_lo > 0 || k_hi < 0 {
        (0u64, 0i64)
    } else if k_hi < -k_lo {
        ((k_hi + 1) as u64, k_hi + 1)
    } else {
        ((-k_lo + 1) as u64, k_lo - 1)
    };
    let u = g.translational_unit();
    let a = gap_abs as f64;
    let x_a = t.exponent(u * a * a);
    if !(x_a > 0.0) {
        return Err(Error::BoseConditionViolated {
            k: gap_k,
            gap: u * a * a - t.mu,
        });
    }
    let y_a = (-x_a).exp();
    let one_minus_rho = -(-t.beta * u * (2.0 * a + 1.0)).exp_m1();
    let tail = 2.0 * y_a / (-(-x_a).exp_m1() * one_minus_rho);

    let terms = occupations.len();
    Ok(BoseGasReport {
        log_partition: policy.result(log_z.value(), terms, tail),
        occupations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemarkReport {
    pub points: usize,
    /// Grid points where the two criteria disagree.
    pub mismatches: Vec<(i64, usize)>,
}

impl RemarkReport {
    pub fn agree(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares, point by point, whether the Bose occupation of `(k, q)` is
/// well defined and non-negative with whether `q > q_min(μ, k)`.
pub fn remark_b1_check(
    t: &Thermo,
    g: &GasParams,
    k_range: RangeInclusive<i64>,
    q_range: RangeInclusive<usize>,
) -> RemarkReport {
    let mut points = 0;
    let mut mismatches = Vec::new();
    for k in k_range {
        let threshold = q_min_gas(t.mu, k, g);
        for q in q_range.clone() {
            points += 1;
            let occupation_valid =
                occupation_number(joint_energy(k, q, g), t, StatisticsKind::Bose)
                    .map(|n| n >= 0.0)
                    .unwrap_or(false);
            let accessible = q as f64 > threshold;
            if occupation_valid != accessible {
                mismatches.push((k, q));
            }
        }
    }
    RemarkReport { points, mismatches }
}
