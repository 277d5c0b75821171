//! Certified evaluation of the equilibrium energy series of the vibrating
//! gas, and numerical checks of the estimates behind its convergence.
//!
//! Every infinite sum is returned as a [`SeriesResult`]: the partial sum,
//! the number of terms it took, and a rigorous upper bound on the omitted
//! remainder. Summation order is fixed, so results are reproducible bit for
//! bit.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::gas::GasParams;
use crate::statistics::{occupation_of_exponent, StatisticsKind, Thermo};

/// Cap on explicit terms used while a ratio bound is not yet below one.
const MAX_EXPLICIT_TAIL_TERMS: u64 = 100_000;

/// Relative inflation applied to computed tail bounds to absorb rounding in
/// their own evaluation.
const BOUND_SLACK: f64 = 1.0 + 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    rel_tol: f64,
    abs_tol: f64,
    max_terms: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_terms: 10_000_000,
        }
    }
}

impl TruncationPolicy {
    pub fn new(rel_tol: f64, abs_tol: f64, max_terms: usize) -> Result<Self> {
        let rel_tol = require_positive("rel_tol", rel_tol)?;
        if !(abs_tol.is_finite() && abs_tol >= 0.0) {
            return Err(Error::invalid(
                "abs_tol",
                format!("must be finite and >= 0, got {abs_tol}"),
            ));
        }
        if max_terms == 0 {
            return Err(Error::invalid("max_terms", "must be at least 1"));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_terms,
        })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    /// `max(rel_tol·|value|, abs_tol)`.
    pub fn tolerance(&self, value: f64) -> f64 {
        (self.rel_tol * value.abs()).max(self.abs_tol)
    }

    pub fn accepts(&self, value: f64, tail_bound: f64) -> bool {
        tail_bound <= self.tolerance(value)
    }

    pub(crate) fn result(&self, value: f64, terms_used: usize, tail_bound: f64) -> SeriesResult {
        SeriesResult {
            value,
            terms_used,
            tail_bound,
            converged: self.accepts(value, tail_bound),
        }
    }
}

/// Partial sum of a non-negative series with a certified remainder bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult {
    pub value: f64,
    pub terms_used: usize,
    pub tail_bound: f64,
    pub converged: bool,
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Upper bound on `Σ_{j ≥ start} f(j)` for a non-negative `f` whose
/// successive ratio satisfies `f(j+1)/f(j) ≤ ratio(j)`, `ratio`
/// non-increasing. Terms are added explicitly until the ratio bound drops
/// below one; the rest is bounded by a geometric series.
pub fn ratio_tail_bound(start: u64, f: impl Fn(u64) -> f64, ratio: impl Fn(u64) -> f64) -> f64 {
    let mut acc = 0.0;
    for j in start..start + MAX_EXPLICIT_TAIL_TERMS {
        let fj = f(j);
        if !fj.is_finite() {
            return f64::INFINITY;
        }
        let r = ratio(j);
        if r < 1.0 {
            return (acc + fj / (1.0 - r)) * BOUND_SLACK;
        }
        acc += fj;
    }
    f64::INFINITY
}

/// Which energy weighs each occupation in the equilibrium series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyForm {
    /// `Σ [ε_k + ℏω(q + ½)] n_{k,q}`.
    Bare,
    /// `Σ [ε_k + ℏω(q + ½) − μ] n_{k,q}`.
    Effective,
    /// `Σ n_{k,q}`, the mean particle number.
    Count,
}

impl EnergyForm {
    fn weight(self, energy: f64, mu: f64) -> f64 {
        match self {
            EnergyForm::Bare => energy,
            EnergyForm::Effective => energy - mu,
            EnergyForm::Count => 1.0,
        }
    }

    /// `(c0, c1)` with `|weight(E)| ≤ c0 + c1·E` for `E ≥ 0`.
    fn weight_bound(self, mu: f64) -> (f64, f64) {
        match self {
            EnergyForm::Bare => (0.0, 1.0),
            EnergyForm::Effective => (mu.abs(), 1.0),
            EnergyForm::Count => (1.0, 0.0),
        }
    }
}

/// Shared constants of the equilibrium series.
struct Equilibrium {
    beta: f64,
    mu: f64,
    quantum: f64,
    unit: f64,
    stats: StatisticsKind,
    form: EnergyForm,
    /// Multiplier turning `e^{−x}` into an occupation bound.
    occupation_factor: f64,
}

impl Equilibrium {
    fn new(t: &Thermo, g: &GasParams, s: StatisticsKind, form: EnergyForm) -> Result<Self> {
        let quantum = g.osc().quantum();
        // lowest one-particle energy is ℏω/2 at k = 0, q = 0
        let x_min = t.exponent(0.5 * quantum);
        let occupation_factor = match s {
            StatisticsKind::Fermi => 1.0,
            StatisticsKind::Bose => {
                if !(x_min > 0.0) {
                    return Err(Error::InvalidChemicalPotential {
                        mu: t.mu(),
                        exponent: x_min,
                    });
                }
                1.0 / -(-x_min).exp_m1()
            }
        };
        Ok(Self {
            beta: t.beta(),
            mu: t.mu(),
            quantum,
            unit: g.translational_unit(),
            stats: s,
            form,
            occupation_factor,
        })
    }

    fn energy(&self, k: u64, q: u64) -> f64 {
        let k = k as f64;
        self.unit * k * k + self.quantum * (q as f64 + 0.5)
    }

    fn term(&self, energy: f64) -> f64 {
        let x = self.beta * (energy - self.mu);
        self.form.weight(energy, self.mu) * occupation_of_exponent(x, self.stats)
    }

    /// Bound on `Σ_{q ≥ 0} |weight| n` for one column starting at energy `e0`
    /// with energy step `ℏω`.
    fn column_bound(&self, e0: f64) -> f64 {
        let (c0, c1) = self.form.weight_bound(self.mu);
        let rho = (-self.beta * self.quantum).exp();
        let one_minus_rho = -(-self.beta * self.quantum).exp_m1();
        let lead = self.occupation_factor * (-self.beta * (e0 - self.mu)).exp();
        lead * ((c0 + c1 * e0) / one_minus_rho
            + c1 * self.quantum * rho / (one_minus_rho * one_minus_rho))
    }

    /// Bound on all states with `ε_k/ℏω + q ≥ first_shell`.
    fn shell_tail(&self, first_shell: u64) -> f64 {
        let (c0, c1) = self.form.weight_bound(self.mu);
        let ratio_k = self.unit / self.quantum;
        let count = |j: u64| 2.0 * ((j as f64 + 1.0) / ratio_k).sqrt() + 1.0;
        let weight = |j: u64| c0 + c1 * self.quantum * (j as f64 + 1.5);
        let f = |j: u64| {
            let x = self.beta * (self.quantum * (j as f64 + 0.5) - self.mu);
            count(j) * weight(j) * self.occupation_factor * (-x).exp()
        };
        let decay = (-self.beta * self.quantum).exp();
        let ratio = |j: u64| (count(j + 1) / count(j)) * (weight(j + 1) / weight(j)) * decay;
        ratio_tail_bound(first_shell, f, ratio)
    }
}

/// Equilibrium energy of the vibrating gas,
/// `Σ_{k∈ℤ} Σ_{q≥0} [ε_k + ℏω(q + ½)] n_{k,q}` with Bose or Fermi
/// occupations, or its `μ`-shifted or particle-count variant per `form`.
///
/// States are visited in shells of `r = ε_k/ℏω + q`: shell `R` holds every
/// state with `R ≤ r < R + 1`, and the `±k` pair is added as one term. After
/// each shell the remainder is bounded by the geometric decay of `e^{−βℏω r}`
/// times the number of states per shell.
pub fn equilibrium_effective_energy(
    t: &Thermo,
    g: &GasParams,
    s: StatisticsKind,
    form: EnergyForm,
    policy: &TruncationPolicy,
) -> Result<SeriesResult> {
    let eq = Equilibrium::new(t, g, s, form)?;
    let ratio_k = eq.unit / eq.quantum;
    // next unvisited q for each |k|
    let mut next_q: Vec<u64> = Vec::new();
    let mut sum = CompensatedSum::default();
    let mut terms = 0usize;
    let mut shell = 0u64;
    loop {
        let upper = (shell + 1) as f64;
        let mut k = 0u64;
        loop {
            let offset = ratio_k * (k as f64) * (k as f64);
            if offset >= upper {
                break;
            }
            if next_q.len() <= k as usize {
                next_q.push(0);
            }
            let q = &mut next_q[k as usize];
            while offset + (*q as f64) < upper {
                let multiplicity = if k == 0 { 1.0 } else { 2.0 };
                sum.add(multiplicity * eq.term(eq.energy(k, *q)));
                *q += 1;
                terms += 1;
            }
            k += 1;
        }
        shell += 1;
        let value = sum.value();
        let tail = eq.shell_tail(shell);
        if policy.accepts(value, tail) || terms >= policy.max_terms() {
            return Ok(policy.result(value, terms, tail));
        }
    }
}

/// Same series over the rectangle `|k| ≤ k_max`, `q ≤ q_max`, with a bound
/// on everything outside it.
pub fn equilibrium_rectangular(
    t: &Thermo,
    g: &GasParams,
    s: StatisticsKind,
    form: EnergyForm,
    k_max: u64,
    q_max: u64,
    policy: &TruncationPolicy,
) -> Result<SeriesResult> {
    let eq = Equilibrium::new(t, g, s, form)?;
    let mut sum = CompensatedSum::default();
    let mut terms = 0usize;
    for k in 0..=k_max {
        let multiplicity = if k == 0 { 1.0 } else { 2.0 };
        for q in 0..=q_max {
            sum.add(multiplicity * eq.term(eq.energy(k, q)));
            terms += 1;
        }
    }
    // columns |k| ≤ k_max above q_max
    let mut tail = 0.0;
    for k in 0..=k_max {
        let multiplicity = if k == 0 { 1.0 } else { 2.0 };
        tail += multiplicity * eq.column_bound(eq.energy(k, q_max + 1));
    }
    // whole columns with |k| > k_max
    let (c0, c1) = eq.form.weight_bound(eq.mu);
    let rho = (-eq.beta * eq.quantum).exp();
    let one_minus_rho = -(-eq.beta * eq.quantum).exp_m1();
    let poly = |k: u64| {
        let e0 = eq.energy(k, 0);
        (c0 + c1 * e0) / one_minus_rho + c1 * eq.quantum * rho / (one_minus_rho * one_minus_rho)
    };
    let outer = ratio_tail_bound(
        k_max + 1,
        |k| 2.0 * eq.column_bound(eq.energy(k, 0)),
        |k| (poly(k + 1) / poly(k)) * (-eq.beta * eq.unit * (2.0 * k as f64 + 1.0)).exp(),
    );
    tail = (tail + outer) * BOUND_SLACK;
    Ok(policy.result(sum.value(), terms, tail))
}

/// `4π⁴/3 + 16π⁶/189 + 8π⁸/315`.
pub fn lemma_b2_constant() -> f64 {
    let p2 = PI * PI;
    let p4 = p2 * p2;
    let p6 = p4 * p2;
    let p8 = p4 * p4;
    4.0 * p4 / 3.0 + 16.0 * p6 / 189.0 + 8.0 * p8 / 315.0
}

/// Analytic upper bound `e^{μ − ½}(4π⁴/3 + 16π⁶/189 + 8π⁸/315)` on the
/// reduced series `S(μ)` in proof units.
pub fn lemma_b2_bound(mu: f64) -> f64 {
    (mu - 0.5).exp() * lemma_b2_constant()
}

/// Number of `k ∈ ℤ` with `k² ≤ r`.
fn columns_reaching(r: u64) -> u64 {
    let mut root = (r as f64).sqrt() as u64;
    while root * root > r {
        root -= 1;
    }
    while (root + 1) * (root + 1) <= r {
        root += 1;
    }
    2 * root + 1
}

/// The reduced series `S = Σ_{k∈ℤ} Σ_{q≥0} (k² + q)/(e^{k²+q} e^{½−μ} ∓ 1)`
/// in proof units (`β = 1`, `ℏω = 1`, `ε_k = k²`).
///
/// With `r = q + k²` each column `k` runs over `r ≥ k²`, so summing by `r`
/// collects `r/(C e^r ∓ 1)` from the `k = 0` column and from both signs of
/// every `k ≥ 1` with `k² ≤ r`. Every term is non-negative on the valid
/// domain, so partial sums grow with the cutoff.
pub fn s_series_numeric(
    mu: f64,
    s: StatisticsKind,
    policy: &TruncationPolicy,
) -> Result<SeriesResult> {
    if !mu.is_finite() {
        return Err(Error::invalid("mu", format!("must be finite, got {mu}")));
    }
    if s == StatisticsKind::Bose && !(mu < 0.5) {
        return Err(Error::InvalidChemicalPotential {
            mu,
            exponent: 0.5 - mu,
        });
    }
    let c = (0.5 - mu).exp();
    let sign = match s {
        StatisticsKind::Bose => -1.0,
        StatisticsKind::Fermi => 1.0,
    };
    let mut sum = CompensatedSum::default();
    let mut r = 0u64;
    loop {
        let rf = r as f64;
        let e = (-rf).exp();
        // r/(C e^r ∓ 1) = r e^{−r}/(C ∓ e^{−r})
        sum.add(columns_reaching(r) as f64 * rf * e / (c + sign * e));
        r += 1;
        let denom = match s {
            StatisticsKind::Fermi => c,
            StatisticsKind::Bose => c - (-(r as f64)).exp(),
        };
        let f = |j: u64| {
            let jf = j as f64;
            (2.0 * jf.sqrt() + 1.0) * jf * (-jf).exp() / denom
        };
        let ratio = |j: u64| {
            let jf = j as f64;
            (2.0 * (jf + 1.0).sqrt() + 1.0) / (2.0 * jf.sqrt() + 1.0) * (jf + 1.0) / jf
                * (-1f64).exp()
        };
        let tail = ratio_tail_bound(r, f, ratio);
        let value = sum.value();
        if policy.accepts(value, tail) || r as usize >= policy.max_terms() {
            return Ok(policy.result(value, r as usize, tail));
        }
    }
}

/// Bracket for `ψ⁽³⁾(a)/3! = Σ_{r≥a} r^{−4}` at integer `a ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBracket {
    pub lower: f64,
    pub upper: f64,
}

impl TailBracket {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// `Σ_{r≥a} r^{−4}` by direct summation of `terms` terms. The remainder
/// after the last summed index `N` lies between `∫_{N+1}^∞ x^{−4} dx` and,
/// by convexity, `∫_{N+½}^∞ x^{−4} dx`.
pub fn quartic_tail(a: u64, terms: u64) -> TailBracket {
    assert!(a >= 1 && terms >= 1);
    let last = a + terms - 1;
    let mut sum = CompensatedSum::default();
    // smallest terms first
    for r in (a..=last).rev() {
        let rf = r as f64;
        let r2 = rf * rf;
        sum.add(1.0 / (r2 * r2));
    }
    let partial = sum.value();
    let n = last as f64;
    TailBracket {
        lower: partial + 1.0 / (3.0 * (n + 1.0).powi(3)),
        upper: partial + 1.0 / (3.0 * (n + 0.5).powi(3)),
    }
}

/// `ψ⁽³⁾(a) = 3! Σ_{r≥a} r^{−4}` for integer `a ≥ 1`.
pub fn polygamma3(a: u64) -> f64 {
    6.0 * quartic_tail(a, 200_000).midpoint()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProofCheckSettings {
    /// Cutoff `R` of the zeta partial sums.
    pub zeta_cutoff: u64,
    /// Largest `k` in the polygamma inequality check.
    pub polygamma_k_max: u64,
    /// Terms summed per polygamma tail.
    pub polygamma_terms: u64,
    pub exp_grid_step: f64,
    pub exp_grid_max: f64,
}

impl Default for ProofCheckSettings {
    fn default() -> Self {
        Self {
            zeta_cutoff: 1000,
            polygamma_k_max: 20,
            polygamma_terms: 100_000,
            exp_grid_step: 0.5,
            exp_grid_max: 50.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofCheck {
    pub name: String,
    pub passed: bool,
    /// Quantity measured by the check.
    pub observed: f64,
    /// Bound it is compared against.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofReport {
    pub checks: Vec<ProofCheck>,
}

impl ProofReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Checks whose name starts with `prefix`.
    pub fn group<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a ProofCheck> + 'a {
        self.checks
            .iter()
            .filter(move |c| c.name.starts_with(prefix))
    }
}

/// Numerically verifies the estimates used to bound `S`:
///
/// * `zeta`: partial sums of `Σ r^{−p}`, `p = 4, 6, 8`, up to `R` fall short
///   of `π⁴/90`, `π⁶/945`, `π⁸/9450` by at most `1/((p−1)R^{p−1})`;
/// * `polygamma`: `ψ⁽³⁾(k²)/3! ≤ (2/k⁶ + 6/k⁸)/6` for `k = 1..=k_max`;
/// * `exp`: `e^r ≥ r⁵/5!` on a grid of `r`.
pub fn verify_convergence_proof(settings: &ProofCheckSettings) -> ProofReport {
    let mut checks = Vec::new();

    let r_max = settings.zeta_cutoff.max(1);
    let p2 = PI * PI;
    let zetas = [
        (4, p2 * p2 / 90.0),
        (6, p2 * p2 * p2 / 945.0),
        (8, p2 * p2 * p2 * p2 / 9450.0),
    ];
    for (p, zeta) in zetas {
        let mut sum = CompensatedSum::default();
        for r in (1..=r_max).rev() {
            sum.add((r as f64).powi(-p));
        }
        let deficit = zeta - sum.value();
        let bound = 1.0 / ((p - 1) as f64 * (r_max as f64).powi(p - 1));
        // rounding in the constant and the sum
        let slack = 8.0 * f64::EPSILON * zeta;
        checks.push(ProofCheck {
            name: format!("zeta({p})"),
            passed: deficit >= -slack && deficit <= bound + slack,
            observed: deficit,
            bound,
        });
    }

    for k in 1..=settings.polygamma_k_max {
        let kf = k as f64;
        let tail = quartic_tail(k * k, settings.polygamma_terms.max(1));
        let bound = (2.0 / kf.powi(6) + 6.0 / kf.powi(8)) / 6.0;
        checks.push(ProofCheck {
            name: format!("polygamma(k={k})"),
            passed: tail.upper <= bound,
            observed: tail.upper,
            bound,
        });
    }

    let steps = (settings.exp_grid_max / settings.exp_grid_step).round() as u64;
    for i in 0..=steps {
        let r = i as f64 * settings.exp_grid_step;
        let lhs = r.exp();
        let rhs = r.powi(5) / 120.0;
        checks.push(ProofCheck {
            name: format!("exp(r={r})"),
            passed: lhs >= rhs,
            observed: lhs,
            bound: rhs,
        });
    }

    ProofReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_validation() {
        assert!(TruncationPolicy::new(0.0, 0.0, 10).is_err());
        assert!(TruncationPolicy::new(1e-8, -1.0, 10).is_err());
        assert!(TruncationPolicy::new(1e-8, 0.0, 0).is_err());
        let p = TruncationPolicy::default();
        assert_eq!(p.tolerance(1.0), 1e-10);
        assert_eq!(p.tolerance(0.0), 1e-14);
    }

    #[test]
    fn compensated_sum_recovers_lost_bits() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-16);
        }
        assert_eq!(s.value(), 1.0 + 1e-15);
    }

    #[test]
    fn ratio_tail_on_geometric_series() {
        // Σ_{j≥3} 2^{-j} = 1/4
        let b = ratio_tail_bound(3, |j| 0.5f64.powi(j as i32), |_| 0.5);
        assert!((b - 0.25).abs() < 1e-12);
        assert_eq!(ratio_tail_bound(0, |_| 1.0, |_| 1.0), f64::INFINITY);
    }

    #[test]
    fn lemma_constant_value() {
        // 452.24479849159915561 (40-digit reference)
        assert!((lemma_b2_constant() - 452.244_798_491_599_16).abs() < 1e-10);
        assert_eq!(lemma_b2_bound(0.5), lemma_b2_constant());
        let ratio = lemma_b2_bound(-0.7) / lemma_b2_bound(0.3);
        assert!((ratio - (-1f64).exp()).abs() < 1e-15);
        assert!((lemma_b2_bound(0.0) - (-0.5f64).exp() * lemma_b2_constant()).abs() < 1e-12);
    }

    #[test]
    fn s_series_reference_values() {
        // mpmath, 40 digits
        let cases = [
            (StatisticsKind::Bose, -2.0, 0.252_598_609_343_150_91),
            (StatisticsKind::Bose, 0.0, 2.086_333_631_346_902_2),
            (StatisticsKind::Bose, 0.4, 3.369_451_515_181_457_1),
            (StatisticsKind::Fermi, -1.0, 0.650_883_004_778_346_91),
            (StatisticsKind::Fermi, 0.0, 1.668_193_460_705_132_3),
            (StatisticsKind::Fermi, 2.0, 8.615_222_646_393_866_1),
        ];
        let policy = TruncationPolicy::default();
        for (s, mu, expected) in cases {
            let r = s_series_numeric(mu, s, &policy).unwrap();
            assert!(r.converged);
            assert!(
                (r.value - expected).abs() <= 2e-10 * expected,
                "{s:?} {mu}: {}",
                r.value
            );
            assert!(r.value <= expected + 1e-14);
            assert!(r.value + r.tail_bound >= expected - 1e-13);
        }
    }

    #[test]
    fn s_series_rejects_bose_above_half() {
        let policy = TruncationPolicy::default();
        assert!(s_series_numeric(0.5, StatisticsKind::Bose, &policy).is_err());
        assert!(s_series_numeric(0.5, StatisticsKind::Fermi, &policy).is_ok());
    }

    #[test]
    fn s_series_partial_sums_grow_with_cutoff() {
        let mut prev = -1.0;
        for cap in 1..40 {
            let policy = TruncationPolicy::new(1e-300, 0.0, cap).unwrap();
            let r = s_series_numeric(0.0, StatisticsKind::Fermi, &policy).unwrap();
            assert_eq!(r.terms_used, cap);
            assert!(r.value >= prev);
            prev = r.value;
        }
        // first shell r = 0 has a zero numerator
        let policy = TruncationPolicy::new(1e-300, 0.0, 1).unwrap();
        assert_eq!(
            s_series_numeric(0.0, StatisticsKind::Fermi, &policy)
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn columns_reaching_counts_squares() {
        assert_eq!(columns_reaching(0), 1);
        assert_eq!(columns_reaching(3), 3);
        assert_eq!(columns_reaching(4), 5);
        assert_eq!(columns_reaching(99), 19);
        assert_eq!(columns_reaching(100), 21);
    }

    #[test]
    fn equilibrium_reference_values() {
        let g = GasParams::proof_units();
        let policy = TruncationPolicy::default();
        // mpmath, 40 digits
        let cases = [
            (
                StatisticsKind::Fermi,
                0.0,
                EnergyForm::Bare,
                2.332_058_401_313_128_6,
            ),
            (
                StatisticsKind::Fermi,
                0.0,
                EnergyForm::Count,
                1.327_729_881_215_992_7,
            ),
            (
                StatisticsKind::Bose,
                0.4,
                EnergyForm::Bare,
                9.218_663_935_040_279_3,
            ),
            (
                StatisticsKind::Bose,
                0.4,
                EnergyForm::Effective,
                4.539_293_999_153_221_6,
            ),
            (
                StatisticsKind::Bose,
                0.4,
                EnergyForm::Count,
                11.698_424_839_717_644,
            ),
        ];
        for (s, mu, form, expected) in cases {
            let t = Thermo::new(1.0, mu).unwrap();
            let r = equilibrium_effective_energy(&t, &g, s, form, &policy).unwrap();
            assert!(r.converged, "{s:?} {form:?}");
            assert!(r.tail_bound <= 1e-10 * r.value);
            assert!(
                (r.value - expected).abs() <= 2e-10 * expected,
                "{s:?} {form:?}: {}",
                r.value
            );
        }
    }

    #[test]
    fn equilibrium_vanishes_for_very_negative_mu() {
        let g = GasParams::proof_units();
        let t = Thermo::new(1.0, -20.0).unwrap();
        let r = equilibrium_effective_energy(
            &t,
            &g,
            StatisticsKind::Bose,
            EnergyForm::Bare,
            &TruncationPolicy::default(),
        )
        .unwrap();
        assert!(r.converged);
        // mpmath: 5.5424630251546475e-9
        let expected = 5.542_463_025_154_648e-9;
        assert!(r.value <= expected * (1.0 + 1e-12));
        assert!(r.value + r.tail_bound >= expected * (1.0 - 1e-12));
        assert!(r.value < 1e-7);
    }

    #[test]
    fn equilibrium_bose_domain() {
        let g = GasParams::proof_units();
        let t = Thermo::new(1.0, 0.5).unwrap();
        assert!(equilibrium_effective_energy(
            &t,
            &g,
            StatisticsKind::Bose,
            EnergyForm::Bare,
            &TruncationPolicy::default()
        )
        .is_err());
    }

    #[test]
    fn non_convergence_reports_partial_value() {
        let g = GasParams::proof_units();
        let t = Thermo::new(1.0, 0.0).unwrap();
        let policy = TruncationPolicy::new(1e-10, 0.0, 5).unwrap();
        let r =
            equilibrium_effective_energy(&t, &g, StatisticsKind::Fermi, EnergyForm::Bare, &policy)
                .unwrap();
        assert!(!r.converged);
        assert!(r.value > 0.0 && r.tail_bound > 0.0);
    }

    #[test]
    fn polygamma_reference() {
        // ψ⁽³⁾(1) = π⁴/15
        let exact = PI.powi(4) / 15.0;
        assert!((polygamma3(1) - exact).abs() < 1e-14 * exact);
        // ψ⁽³⁾(400)/6 = 5.2278971353149423e-9
        let b = quartic_tail(400, 100_000);
        assert!(b.lower <= 5.227_897_135_314_942e-9 * (1.0 + 1e-14));
        assert!(b.upper >= 5.227_897_135_314_942e-9 * (1.0 - 1e-14));
    }

    #[test]
    fn proof_checks_pass() {
        let report = verify_convergence_proof(&ProofCheckSettings::default());
        assert!(
            report.passed(),
            "{:#?}",
            report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .collect::<Vec<_>>()
        );
        assert_eq!(report.group("zeta").count(), 3);
        assert_eq!(report.group("polygamma").count(), 20);
        assert_eq!(report.group("exp").count(), 101);
        let z4 = report.group("zeta(4)").next().unwrap();
        assert!(z4.observed <= 1.0 / (3.0 * 1e9));
        let k1 = report.group("polygamma(k=1)").next().unwrap();
        assert!((k1.observed - 1.082_323_233_711_138).abs() < 1e-12);
        assert!((k1.bound - 4.0 / 3.0).abs() < 1e-15);
        let r0 = report.group("exp(r=0)").next().unwrap();
        assert_eq!((r0.observed, r0.bound), (1.0, 0.0));
    }
}
