//! Validation and execution of jobs.

use std::collections::BTreeMap;
use std::io::Write;

use oscres_core::chain::{
    chain_effective_energy, chain_energy, chain_frequencies, grouped_form_energy,
};
use oscres_core::gas::{joint_energy, q_min_gas};
use oscres_core::open_system::{effective_frequency, level_access, LevelAccess};
use oscres_core::oracle::{gc_average_occupation, ground_state_search};
use oscres_core::series::{lemma_b2_bound, s_series_numeric};
use oscres_core::spectra::mode_energy;
use oscres_core::statistics::{mean_particle_number, occupation_number};
use oscres_core::{
    AccessibleSet, ChainAssignment, ChainParams, Error, GasParams, GroundState, ModeSet,
    OscillatorParams, SeriesResult, StatisticsKind, Thermo, TruncationPolicy,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::job::*;
use crate::report::{Cell, Report, Table};

type Res<T> = Result<T, CliError>;

/// A job whose parameters have passed every module precondition.
#[derive(Debug, Clone)]
enum Plan {
    Spectrum {
        osc: OscillatorParams,
        mu: f64,
        qmax: usize,
        epsilon: f64,
    },
    Gas {
        gas: GasParams,
        mu: f64,
        kmax: i64,
        qmax: usize,
    },
    Chain {
        chain: ChainParams,
        assignment: ChainAssignment,
        mu: f64,
    },
    Stats {
        osc: OscillatorParams,
        thermo: Thermo,
        stat: StatisticsKind,
        qmax: usize,
        policy: TruncationPolicy,
    },
    Bounds {
        stat: StatisticsKind,
        mu: f64,
        policy: TruncationPolicy,
    },
    Oracle {
        modes: ModeSet,
        thermo: Thermo,
        stat: StatisticsKind,
        cutoff: u32,
    },
}

fn finite(name: &'static str, v: f64, origin: &'static str) -> Res<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Domain {
            origin,
            source: Error::InvalidParameter {
                name,
                reason: format!("must be finite, got {v}"),
            },
        })
    }
}

fn bose_gap_check(t: &Thermo, energy: f64, origin: &'static str) -> Res<()> {
    let x = t.exponent(energy);
    if x > 0.0 {
        Ok(())
    } else {
        Err(CliError::Domain {
            origin,
            source: Error::InvalidChemicalPotential {
                mu: t.mu(),
                exponent: x,
            },
        })
    }
}

fn plan(inner: &Inner) -> Res<Plan> {
    match inner {
        Inner::Spectrum(p) => {
            let origin = "open_system";
            let osc = OscillatorParams::new(p.hbar, p.mass, p.omega)
                .map_err(CliError::domain("core_spectra"))?;
            let mu = finite("mu", p.mu, origin)?;
            AccessibleSet::compute(mu, &osc, 0, p.epsilon).map_err(CliError::domain(origin))?;
            Ok(Plan::Spectrum {
                osc,
                mu,
                qmax: p.qmax,
                epsilon: p.epsilon,
            })
        }
        Inner::Gas(p) => {
            let origin = "quantum_gas";
            let osc = OscillatorParams::new(p.hbar, p.mass, p.omega)
                .map_err(CliError::domain("core_spectra"))?;
            let gas = match (p.box_length, p.translational_unit) {
                (Some(_), Some(_)) => {
                    return Err(CliError::Usage {
                        key: Some("translational_unit".into()),
                        message: "give either box_length or translational_unit, not both".into(),
                    })
                }
                (Some(l), None) => GasParams::new(osc, l),
                (None, u) => GasParams::with_translational_unit(osc, u.unwrap_or(1.0)),
            }
            .map_err(CliError::domain(origin))?;
            if p.kmax < 0 {
                return Err(CliError::Domain {
                    origin,
                    source: Error::InvalidParameter {
                        name: "kmax",
                        reason: format!("must be >= 0, got {}", p.kmax),
                    },
                });
            }
            Ok(Plan::Gas {
                gas,
                mu: finite("mu", p.mu, origin)?,
                kmax: p.kmax,
                qmax: p.qmax,
            })
        }
        Inner::Chain(p) => {
            let origin = "coupled_chain";
            let osc = OscillatorParams::new(p.hbar, p.mass, p.omega)
                .map_err(CliError::domain("core_spectra"))?;
            let chain =
                ChainParams::new(p.count, osc, p.coupling).map_err(CliError::domain(origin))?;
            let levels = if p.levels.is_empty() {
                vec![0; p.count]
            } else {
                p.levels.clone()
            };
            if levels.len() != p.count {
                return Err(CliError::Domain {
                    origin,
                    source: Error::LengthMismatch {
                        expected: p.count,
                        actual: levels.len(),
                    },
                });
            }
            Ok(Plan::Chain {
                chain,
                assignment: ChainAssignment::new(levels),
                mu: finite("mu", p.mu, origin)?,
            })
        }
        Inner::Stats(p) => {
            let origin = "statistics";
            let osc = OscillatorParams::new(p.hbar, p.mass, p.omega)
                .map_err(CliError::domain("core_spectra"))?;
            let thermo = Thermo::new(p.beta, p.mu).map_err(CliError::domain(origin))?;
            let policy = TruncationPolicy::new(p.rel_tol, p.abs_tol, p.max_terms)
                .map_err(CliError::domain("series_engine"))?;
            let stat = p.stat.into();
            if stat == StatisticsKind::Bose {
                // μ < ℏω/2
                bose_gap_check(&thermo, mode_energy(0, &osc), origin)?;
            }
            Ok(Plan::Stats {
                osc,
                thermo,
                stat,
                qmax: p.qmax,
                policy,
            })
        }
        Inner::Bounds(p) => {
            let origin = "series_engine";
            let policy = TruncationPolicy::new(p.rel_tol, p.abs_tol, p.max_terms)
                .map_err(CliError::domain(origin))?;
            let mu = finite("mu", p.mu, origin)?;
            let stat = p.stat.into();
            if stat == StatisticsKind::Bose && mu >= 0.5 {
                return Err(CliError::Domain {
                    origin,
                    source: Error::InvalidChemicalPotential {
                        mu,
                        exponent: 0.5 - mu,
                    },
                });
            }
            Ok(Plan::Bounds { stat, mu, policy })
        }
        Inner::Oracle(p) => {
            let origin = "fock_oracle";
            let energies = if p.energies.is_empty() {
                // mass does not enter the level energies
                let osc = OscillatorParams::new(p.hbar, 1.0, p.omega)
                    .map_err(CliError::domain("core_spectra"))?;
                (0..p.modes).map(|q| mode_energy(q, &osc)).collect()
            } else {
                p.energies.clone()
            };
            let modes = ModeSet::new(energies).map_err(CliError::domain(origin))?;
            let thermo = Thermo::new(p.beta, p.mu).map_err(CliError::domain(origin))?;
            let stat: StatisticsKind = p.stat.into();
            if stat == StatisticsKind::Bose {
                for &e in modes.energies() {
                    bose_gap_check(&thermo, e, origin)?;
                }
            }
            let max = if stat == StatisticsKind::Fermi {
                1
            } else {
                p.cutoff
            };
            let count = (max as f64 + 1.0).powi(modes.len() as i32);
            if count > oscres_core::oracle::ENUMERATION_CAP as f64 {
                return Err(CliError::Domain {
                    origin,
                    source: Error::EnumerationTooLarge {
                        requested: count,
                        cap: oscres_core::oracle::ENUMERATION_CAP,
                    },
                });
            }
            Ok(Plan::Oracle {
                modes,
                thermo,
                stat,
                cutoff: p.cutoff,
            })
        }
    }
}

fn converged(origin: &'static str, r: SeriesResult) -> Res<SeriesResult> {
    if r.converged {
        Ok(r)
    } else {
        Err(CliError::NotConverged {
            origin,
            value: r.value,
            tail_bound: r.tail_bound,
            terms_used: r.terms_used,
        })
    }
}

fn row<const N: usize>(cells: [Cell; N]) -> Vec<Cell> {
    cells.into()
}

fn occupied_text(levels: &[usize]) -> String {
    levels
        .iter()
        .map(|q| q.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

/// Data table and summary table for one validated job.
fn run_plan(plan: &Plan) -> Res<(Table, Table)> {
    match plan {
        Plan::Spectrum {
            osc,
            mu,
            qmax,
            epsilon,
        } => {
            let mut data = Table::new(&["q", "energy", "omega_eff", "accessible"]);
            let set = AccessibleSet::compute(*mu, osc, *qmax, *epsilon)
                .map_err(CliError::domain("open_system"))?;
            for q in 0..=*qmax {
                let access = level_access(q, *mu, osc, *epsilon);
                data.push(row([
                    q.into(),
                    mode_energy(q, osc).into(),
                    effective_frequency(q, *mu, osc).into(),
                    (access == LevelAccess::Accessible).into(),
                ]));
            }
            let mut summary = Table::new(&["q_min", "lowest_accessible", "boundary_levels"]);
            summary.push(row([
                set.q_min.into(),
                set.lowest()
                    .map(Cell::from)
                    .unwrap_or_else(|| Cell::Text(String::new())),
                occupied_text(&set.boundary).into(),
            ]));
            Ok((data, summary))
        }
        Plan::Gas {
            gas,
            mu,
            kmax,
            qmax,
        } => {
            let mut data = Table::new(&["k", "q", "energy", "effective_term", "q_min_k"]);
            for k in -*kmax..=*kmax {
                let threshold = q_min_gas(*mu, k, gas);
                for q in 0..=*qmax {
                    let e = joint_energy(k, q, gas);
                    data.push(row([
                        k.into(),
                        q.into(),
                        e.into(),
                        (e - mu).into(),
                        threshold.into(),
                    ]));
                }
            }
            let conditions = oscres_core::gas::bose_gas_condition(*mu, gas, -*kmax..=*kmax);
            let mut summary = Table::new(&[
                "box_length",
                "translational_unit",
                "bose_condition",
                "point_particle_condition",
            ]);
            summary.push(row([
                gas.box_length().into(),
                gas.translational_unit().into(),
                conditions.iter().all(|c| c.extended).into(),
                conditions.iter().all(|c| c.classic).into(),
            ]));
            Ok((data, summary))
        }
        Plan::Chain {
            chain,
            assignment,
            mu,
        } => {
            let origin = "coupled_chain";
            let mut data = Table::new(&["s", "omega_s"]);
            for (i, w) in chain_frequencies(chain).into_iter().enumerate() {
                data.push(row([(i + 1).into(), w.into()]));
            }
            let energy = chain_energy(assignment, chain).map_err(CliError::domain(origin))?;
            let effective =
                chain_effective_energy(assignment, *mu, chain).map_err(CliError::domain(origin))?;
            let grouped =
                grouped_form_energy(assignment, *mu, chain).map_err(CliError::domain(origin))?;
            let mut summary = Table::new(&[
                "chain_energy",
                "chain_effective_energy",
                "grouped_form_energy",
                "discrepancy",
            ]);
            summary.push(row([
                energy.into(),
                effective.into(),
                grouped.grouped.into(),
                grouped.discrepancy.into(),
            ]));
            Ok((data, summary))
        }
        Plan::Stats {
            osc,
            thermo,
            stat,
            qmax,
            policy,
        } => {
            let origin = "statistics";
            let mut data = Table::new(&["level", "occupation"]);
            for q in 0..=*qmax {
                let n = occupation_number(mode_energy(q, osc), thermo, *stat)
                    .map_err(CliError::domain(origin))?;
                data.push(row([q.into(), n.into()]));
            }
            let total = mean_particle_number(thermo, osc, *stat, policy)
                .map_err(CliError::domain(origin))?;
            let total = converged(origin, total)?;
            let mut summary = Table::new(&[
                "mean_particle_number",
                "tail_bound",
                "terms_used",
                "converged",
            ]);
            summary.push(row([
                total.value.into(),
                total.tail_bound.into(),
                total.terms_used.into(),
                total.converged.into(),
            ]));
            Ok((data, summary))
        }
        Plan::Bounds { stat, mu, policy } => {
            let origin = "series_engine";
            let r = s_series_numeric(*mu, *stat, policy).map_err(CliError::domain(origin))?;
            let r = converged(origin, r)?;
            let bound = lemma_b2_bound(*mu);
            let mut data = Table::new(&["mu", "S_numeric", "tail_bound", "lemma_bound", "pass"]);
            data.push(row([
                (*mu).into(),
                r.value.into(),
                r.tail_bound.into(),
                bound.into(),
                (r.value + r.tail_bound <= bound).into(),
            ]));
            let mut summary = Table::new(&["terms_used", "converged"]);
            summary.push(row([r.terms_used.into(), r.converged.into()]));
            Ok((data, summary))
        }
        Plan::Oracle {
            modes,
            thermo,
            stat,
            cutoff,
        } => {
            let origin = "fock_oracle";
            let means = gc_average_occupation(modes, thermo, *stat, *cutoff)
                .map_err(CliError::domain(origin))?;
            let mut data = Table::new(&["mode", "closed_form", "oracle_value", "abs_error"]);
            for (i, (&e, n)) in modes.energies().iter().zip(means).enumerate() {
                let closed =
                    occupation_number(e, thermo, *stat).map_err(CliError::domain("statistics"))?;
                data.push(row([
                    i.into(),
                    closed.into(),
                    n.into(),
                    (n - closed).abs().into(),
                ]));
            }
            let gs = ground_state_search(modes, thermo.mu(), *stat, *cutoff)
                .map_err(CliError::domain(origin))?;
            let occupied = match &gs {
                GroundState::Bounded { configuration, .. } => {
                    occupied_text(&configuration.occupied())
                }
                GroundState::Unbounded { .. } => String::new(),
            };
            let mut summary = Table::new(&["ground_state_energy", "bounded", "occupied_modes"]);
            summary.push(row([
                gs.energy().into(),
                gs.is_bounded().into(),
                occupied.into(),
            ]));
            Ok((data, summary))
        }
    }
}

fn base_metadata(kind: &str) -> BTreeMap<String, Value> {
    let mut m = BTreeMap::new();
    m.insert("kind".into(), json!(kind));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m
}

fn insert_params(meta: &mut BTreeMap<String, Value>, inner: &Inner) {
    if let Value::Object(params) = inner.params_value() {
        for (k, v) in params {
            meta.insert(format!("param.{k}"), v);
        }
    }
}

fn prepend(param: &str, value: f64, table: Table) -> Table {
    let mut columns = vec![param.to_string()];
    columns.extend(table.columns);
    let rows = table
        .rows
        .into_iter()
        .map(|r| {
            let mut full = vec![Cell::Float(value)];
            full.extend(r);
            full
        })
        .collect();
    Table { columns, rows }
}

/// Validates every parameter, then computes the report.
pub fn build_report(job: &Job) -> Res<Report> {
    let mut metadata = base_metadata(job.task.kind());
    metadata.insert("output.format".into(), json!(job.output.format));
    match &job.task {
        Task::Single(inner) => {
            let plan = plan(inner)?;
            insert_params(&mut metadata, inner);
            let (data, summary) = run_plan(&plan)?;
            Ok(Report {
                metadata,
                data,
                summary,
            })
        }
        Task::Sweep { sweep, inner } => {
            let grid = sweep.grid();
            let plans = grid
                .iter()
                .map(|&x| inner.with_param(&sweep.param, x).and_then(|j| plan(&j)))
                .collect::<Res<Vec<_>>>()?;
            insert_params(&mut metadata, inner);
            metadata.insert("sweep.kind".into(), json!(inner.kind()));
            metadata.insert("sweep.param".into(), json!(sweep.param));
            metadata.insert("sweep.from".into(), json!(sweep.from));
            metadata.insert("sweep.to".into(), json!(sweep.to));
            metadata.insert("sweep.steps".into(), json!(sweep.steps));

            let results: Vec<Res<(Table, Table)>> = plans.par_iter().map(run_plan).collect();
            let mut data = Table::default();
            let mut summary = Table::default();
            for (x, result) in grid.iter().zip(results) {
                let (d, s) = result?;
                let d = prepend(&sweep.param, *x, d);
                let s = prepend(&sweep.param, *x, s);
                data.columns = d.columns;
                data.rows.extend(d.rows);
                summary.columns = s.columns;
                summary.rows.extend(s.rows);
            }
            Ok(Report {
                metadata,
                data,
                summary,
            })
        }
    }
}

/// Runs the job and writes the rendered report to its target.
pub fn execute(job: &Job) -> Res<()> {
    let report = build_report(job)?;
    let text = report.render(job.output.format);
    match &job.output.path {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}
