//! Finite ontological models found by alternating linear programs.
//!
//! The reproduction constraints `sum_i xi(phi_k|i) mu(i|psi_j) = |<psi_j|phi_k>|^2`
//! are bilinear. Holding `mu` fixed makes them linear in `xi` (one small LP per
//! filter); holding `xi` fixed makes them linear in `mu` (one LP per
//! preparation). The two stages alternate from a seed that favours rarely shared points until the worst
//! residual drops below the tolerance or the iteration cap is reached.

use std::collections::BTreeMap;

use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, Variable};
use serde::{Deserialize, Serialize};

use super::Scenario;
use crate::error::{Error, Result};
use crate::ontic::{OnticSpace, OntologicalModel, ToleranceConfig};
use crate::quantum::born_probability;

type Table = Vec<Vec<f64>>;

pub const DEFAULT_MAX_ITERATIONS: usize = 50;

/// Which support each preparation may use and where each filter must fire with certainty.
///
/// Rows follow the scenario's state order; columns index ontic points.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportPattern {
    n_points: usize,
    allowed_support: Vec<Vec<bool>>,
    required_core: Vec<Vec<bool>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternFile {
    n_points: usize,
    allowed_support: Vec<Vec<usize>>,
    required_core: Vec<Vec<usize>>,
}

impl SupportPattern {
    pub fn from_index_lists(
        n_points: usize,
        allowed_support: &[Vec<usize>],
        required_core: &[Vec<usize>],
    ) -> Result<Self> {
        let to_mask = |rows: &[Vec<usize>]| -> Result<Vec<Vec<bool>>> {
            rows.iter()
                .map(|row| {
                    let mut mask = vec![false; n_points];
                    for &i in row {
                        *mask.get_mut(i).ok_or_else(|| {
                            Error::validation(format!(
                                "point index {i} out of range ({n_points} points)"
                            ))
                        })? = true;
                    }
                    Ok(mask)
                })
                .collect()
        };
        let pattern = Self {
            n_points,
            allowed_support: to_mask(allowed_support)?,
            required_core: to_mask(required_core)?,
        };
        pattern.check_shape()?;
        Ok(pattern)
    }

    /// One private atom per state, which is also the state's core.
    pub fn one_atom_per_state(n_states: usize) -> Self {
        let rows: Vec<Vec<usize>> = (0..n_states).map(|j| vec![j]).collect();
        Self::from_index_lists(n_states, &rows, &rows).expect("diagonal pattern is well formed")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PatternFile = serde_json::from_str(text)?;
        Self::from_index_lists(file.n_points, &file.allowed_support, &file.required_core)
    }

    pub fn to_json(&self) -> Result<String> {
        let to_lists = |rows: &[Vec<bool>]| -> Vec<Vec<usize>> {
            rows.iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(_, b)| **b)
                        .map(|(i, _)| i)
                        .collect()
                })
                .collect()
        };
        Ok(serde_json::to_string(&PatternFile {
            n_points: self.n_points,
            allowed_support: to_lists(&self.allowed_support),
            required_core: to_lists(&self.required_core),
        })?)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    fn check_shape(&self) -> Result<()> {
        if self.allowed_support.len() != self.required_core.len() {
            return Err(Error::validation(format!(
                "{} support rows but {} core rows",
                self.allowed_support.len(),
                self.required_core.len()
            )));
        }
        for (j, (allowed, core)) in self
            .allowed_support
            .iter()
            .zip(&self.required_core)
            .enumerate()
        {
            if !allowed.iter().any(|&a| a) {
                return Err(Error::validation(format!("state {j} has no allowed point")));
            }
            if core.iter().zip(allowed).any(|(&c, &a)| c && !a) {
                return Err(Error::validation(format!(
                    "required core of state {j} leaves its allowed support"
                )));
            }
        }
        Ok(())
    }

    fn check_against(&self, n_states: usize) -> Result<()> {
        if self.allowed_support.len() != n_states {
            return Err(Error::validation(format!(
                "pattern has {} rows for {n_states} scenario states",
                self.allowed_support.len()
            )));
        }
        if self.n_points < n_states {
            return Err(Error::validation(format!(
                "{} points cannot host {n_states} states",
                self.n_points
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    #[default]
    Feasibility,
    /// Maximize the mass each preparation puts on the other states' allowed supports.
    MaxTotalOverlap,
}

#[derive(Clone, Copy, Debug)]
pub struct SynthesisOptions {
    pub max_iterations: usize,
    pub tolerances: ToleranceConfig,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self {
            max_iterations: DEFAULT_MAX_ITERATIONS,
            tolerances: ToleranceConfig::atomic(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Synthesis {
    pub model: OntologicalModel,
    pub iterations: usize,
    pub max_born_residual: f64,
}

pub fn synthesize_model(
    scenario: &Scenario,
    n_points: usize,
    pattern: &SupportPattern,
    objective: Objective,
) -> Result<Synthesis> {
    synthesize_with(
        scenario,
        n_points,
        pattern,
        objective,
        &SynthesisOptions::default(),
    )
}

pub fn synthesize_with(
    scenario: &Scenario,
    n_points: usize,
    pattern: &SupportPattern,
    objective: Objective,
    options: &SynthesisOptions,
) -> Result<Synthesis> {
    options.tolerances.validate()?;
    if n_points != pattern.n_points {
        return Err(Error::validation(format!(
            "pattern covers {} points, {n_points} requested",
            pattern.n_points
        )));
    }
    let states = scenario.states();
    pattern.check_against(states.len())?;
    let eps = options.tolerances.eps_residual;

    // born[j][k] = |<psi_j|phi_k>|^2
    let born = states
        .iter()
        .map(|p| {
            states
                .iter()
                .map(|f| born_probability(&p.state, &f.state))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    // A preparation confined to a filter's required core passes it with certainty.
    for (j, allowed) in pattern.allowed_support.iter().enumerate() {
        for (k, core) in pattern.required_core.iter().enumerate() {
            let confined = allowed.iter().zip(core).all(|(&a, &c)| !a || c);
            if confined && born[j][k] < 1.0 - eps {
                return Err(Error::SynthesisFailure {
                    iterations: 0,
                    best_residual: 1.0 - born[j][k],
                    reason: format!(
                        "support of `{}` lies inside the required core of `{}` but their overlap is {}",
                        states[j].label, states[k].label, born[j][k]
                    ),
                });
            }
        }
    }

    let overlap_weights: Vec<Vec<f64>> = (0..states.len())
        .map(|j| {
            (0..n_points)
                .map(|i| {
                    (0..states.len())
                        .filter(|&k| k != j && pattern.allowed_support[k][i])
                        .count() as f64
                })
                .collect()
        })
        .collect();
    // Points outside a filter's allowed support stay strictly below certainty.
    let core_margin = 10.0 * options.tolerances.eps_core;

    // Seed: each allowed point weighted by 1/c^2, c = number of required cores
    // containing it. Mass on widely shared cores is what makes the first
    // response stage infeasible, so start with little of it.
    let core_counts: Vec<f64> = (0..n_points)
        .map(|i| {
            pattern
                .required_core
                .iter()
                .filter(|core| core[i])
                .count()
                .max(1) as f64
        })
        .collect();
    let mut mu: Vec<Vec<f64>> = pattern
        .allowed_support
        .iter()
        .map(|allowed| {
            let raw: Vec<f64> = allowed
                .iter()
                .zip(&core_counts)
                .map(|(&a, c)| if a { 1.0 / (c * c) } else { 0.0 })
                .collect();
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|m| m / total).collect()
        })
        .collect();
    // (worst residual, mu, xi) of the best iterate so far.
    let mut best: Option<(f64, Table, Table)> = None;

    for iteration in 1..=options.max_iterations {
        let xi = (0..states.len())
            .map(|k| {
                let column: Vec<f64> = born.iter().map(|row| row[k]).collect();
                solve_response(
                    &mu,
                    &column,
                    &pattern.required_core[k],
                    &pattern.allowed_support[k],
                    core_margin,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        mu = (0..states.len())
            .map(|j| {
                let weights = match objective {
                    Objective::Feasibility => None,
                    Objective::MaxTotalOverlap => Some(overlap_weights[j].as_slice()),
                };
                solve_preparation(&xi, &born[j], &pattern.allowed_support[j], weights)
            })
            .collect::<Result<Vec<_>>>()?;

        let residual = max_residual(&mu, &xi, &born);
        if best.as_ref().is_none_or(|(r, _, _)| residual < *r) {
            best = Some((residual, mu.clone(), xi.clone()));
        }
        if residual <= eps {
            let model = assemble(scenario, n_points, &mu, &xi, options.tolerances)?;
            return Ok(Synthesis {
                model,
                iterations: iteration,
                max_born_residual: residual,
            });
        }
    }

    Err(Error::SynthesisFailure {
        iterations: options.max_iterations,
        best_residual: best.map_or(f64::INFINITY, |(r, _, _)| r),
        reason: "Born constraints not met within the iteration cap".into(),
    })
}

fn max_residual(mu: &[Vec<f64>], xi: &[Vec<f64>], born: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (j, m) in mu.iter().enumerate() {
        for (k, x) in xi.iter().enumerate() {
            let predicted: f64 = m.iter().zip(x).map(|(a, b)| a * b).sum();
            worst = worst.max((predicted - born[j][k]).abs());
        }
    }
    worst
}

/// Adds `s+ - s-` to every Born row; returns the slack variables.
fn born_rows(
    problem: &mut Problem,
    rows: impl Iterator<Item = (LinearExpr, f64)>,
    slack_cost: f64,
) -> Vec<Variable> {
    let mut slacks = Vec::new();
    for (mut expr, target) in rows {
        let up = problem.add_var(slack_cost, (0.0, f64::INFINITY));
        let down = problem.add_var(slack_cost, (0.0, f64::INFINITY));
        expr.add(up, 1.0);
        expr.add(down, -1.0);
        problem.add_constraint(expr, ComparisonOp::Eq, target);
        slacks.extend([up, down]);
    }
    slacks
}

fn lp_failure(stage: &str, err: impl std::fmt::Display) -> Error {
    Error::SynthesisFailure {
        iterations: 0,
        best_residual: f64::INFINITY,
        reason: format!("{stage} LP failed: {err}"),
    }
}

fn solve(problem: &Problem, stage: &str) -> Result<microlp::Solution> {
    problem
        .solve()
        .map_err(|e| lp_failure(stage, e))?
        .into_solution()
        .map_err(|_| lp_failure(stage, "interrupted"))
}

/// Stage 1: filter values for one state given all preparations.
fn solve_response(
    mu: &[Vec<f64>],
    born_column: &[f64],
    core: &[bool],
    allowed: &[bool],
    core_margin: f64,
) -> Result<Vec<f64>> {
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Variable> = core
        .iter()
        .zip(allowed)
        .map(|(&c, &a)| {
            let bounds = match (c, a) {
                (true, _) => (1.0, 1.0),
                (false, true) => (0.0, 1.0),
                (false, false) => (0.0, 1.0 - core_margin),
            };
            problem.add_var(0.0, bounds)
        })
        .collect();
    let rows = mu.iter().zip(born_column).map(|(m, &target)| {
        let mut expr = LinearExpr::empty();
        for (&v, &c) in vars.iter().zip(m) {
            if c != 0.0 {
                expr.add(v, c);
            }
        }
        (expr, target)
    });
    born_rows(&mut problem, rows, 1.0);
    let solution = solve(&problem, "response")?;
    Ok(vars
        .iter()
        .map(|&v| solution.var_value(v).clamp(0.0, 1.0))
        .collect())
}

/// Stage 2: one preparation's distribution given all filters.
fn solve_preparation(
    xi: &[Vec<f64>],
    born_row: &[f64],
    allowed: &[bool],
    overlap_weights: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let build = |slack_cap: Option<f64>| {
        let mut problem = Problem::new(match slack_cap {
            Some(_) => OptimizationDirection::Maximize,
            None => OptimizationDirection::Minimize,
        });
        let vars: Vec<Option<Variable>> = allowed
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                a.then(|| {
                    let cost = match (slack_cap, overlap_weights) {
                        (Some(_), Some(w)) => w[i],
                        _ => 0.0,
                    };
                    problem.add_var(cost, (0.0, f64::INFINITY))
                })
            })
            .collect();
        let mut total = LinearExpr::empty();
        vars.iter().flatten().for_each(|&v| total.add(v, 1.0));
        problem.add_constraint(total, ComparisonOp::Eq, 1.0);
        let rows = xi.iter().zip(born_row).map(|(x, &target)| {
            let mut expr = LinearExpr::empty();
            for (v, &c) in vars.iter().zip(x) {
                if let Some(v) = v {
                    if c != 0.0 {
                        expr.add(*v, c);
                    }
                }
            }
            (expr, target)
        });
        let slack_cost = if slack_cap.is_some() { 0.0 } else { 1.0 };
        let slacks = born_rows(&mut problem, rows, slack_cost);
        if let Some(cap) = slack_cap {
            let mut sum = LinearExpr::empty();
            slacks.iter().for_each(|&s| sum.add(s, 1.0));
            problem.add_constraint(sum, ComparisonOp::Le, cap);
        }
        (problem, vars, slacks)
    };

    let (problem, mut vars, slacks) = build(None);
    let mut solution = solve(&problem, "preparation")?;
    if overlap_weights.is_some() {
        let slack_total: f64 = slacks.iter().map(|&s| solution.var_value(s)).sum();
        let (problem, overlap_vars, _) = build(Some(slack_total + 1e-12));
        solution = solve(&problem, "overlap")?;
        vars = overlap_vars;
    }
    let mut masses: Vec<f64> = vars
        .iter()
        .map(|v| v.map_or(0.0, |v| solution.var_value(v).max(0.0)))
        .collect();
    let total: f64 = masses.iter().sum();
    masses.iter_mut().for_each(|m| *m /= total);
    Ok(masses)
}

fn assemble(
    scenario: &Scenario,
    n_points: usize,
    mu: &[Vec<f64>],
    xi: &[Vec<f64>],
    tolerances: ToleranceConfig,
) -> Result<OntologicalModel> {
    let space = OnticSpace::atomic((0..n_points).map(|i| format!("p{i}")))?;
    let labels: Vec<String> = scenario.labels().map(str::to_string).collect();
    let preparations: BTreeMap<_, _> = labels.iter().cloned().zip(mu.iter().cloned()).collect();
    let responses: BTreeMap<_, _> = labels.into_iter().zip(xi.iter().cloned()).collect();
    OntologicalModel::from_tables(
        "synth",
        space,
        scenario.state_map(),
        preparations,
        responses,
        tolerances,
    )
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use super::*;
    use crate::models::LabeledState;
    use crate::quantum::StateVector;

    fn scenario(states: &[(&str, f64, f64)]) -> Scenario {
        Scenario::new(
            2,
            states
                .iter()
                .map(|&(l, t, p)| LabeledState::new(l, StateVector::qubit(t, p)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_state_single_atom() {
        let s = scenario(&[("psi", 0.7, 0.2)]);
        let pattern = SupportPattern::one_atom_per_state(1);
        let out = synthesize_model(&s, 1, &pattern, Objective::Feasibility).unwrap();
        assert_eq!(out.model.preparation("psi").unwrap().densities(), &[1.0]);
        assert_eq!(out.model.response("psi").unwrap().pass_values(), &[1.0]);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn one_atom_per_state_reproduces_born() {
        let s = scenario(&[("a", 0.0, 0.0), ("b", 1.1, 0.4), ("c", 2.0, 2.0)]);
        let out = synthesize_model(
            &s,
            3,
            &SupportPattern::one_atom_per_state(3),
            Objective::Feasibility,
        )
        .unwrap();
        assert!(out.max_born_residual <= 1e-10);
        for x in s.states() {
            for y in s.states() {
                let p = out.model.predicted_probability(&x.label, &y.label).unwrap();
                let born = born_probability(&x.state, &y.state).unwrap();
                assert!((p - born).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn forced_certainty_on_orthogonal_pair_fails() {
        let s = scenario(&[("zero", 0.0, 0.0), ("one", PI, 0.0)]);
        let pattern =
            SupportPattern::from_index_lists(2, &[vec![0], vec![0, 1]], &[vec![0], vec![0, 1]])
                .unwrap();
        let err = synthesize_model(&s, 2, &pattern, Objective::Feasibility).unwrap_err();
        assert!(matches!(err, Error::SynthesisFailure { .. }), "{err}");
    }

    #[test]
    fn overlap_objective_converges() {
        let s = scenario(&[("zero", 0.0, 0.0), ("plus", FRAC_PI_2, 0.0)]);
        let pattern = SupportPattern::from_index_lists(
            3,
            &[vec![0, 1], vec![1, 2]],
            &[vec![0, 1], vec![1, 2]],
        )
        .unwrap();
        let out = synthesize_model(&s, 3, &pattern, Objective::MaxTotalOverlap).unwrap();
        assert!(out.max_born_residual <= 1e-10);
        // The shared atom can carry at most the quantum overlap.
        let shared = out.model.preparation("zero").unwrap().densities()[1];
        assert!(shared <= 0.5 + 1e-10);
    }

    #[test]
    fn pattern_validation() {
        assert!(SupportPattern::from_index_lists(2, &[vec![]], &[vec![]]).is_err());
        assert!(SupportPattern::from_index_lists(2, &[vec![0]], &[vec![1]]).is_err());
        assert!(SupportPattern::from_index_lists(2, &[vec![5]], &[vec![]]).is_err());
        let p = SupportPattern::one_atom_per_state(2);
        assert_eq!(SupportPattern::from_json(&p.to_json().unwrap()).unwrap(), p);
        let s = scenario(&[("a", 0.0, 0.0)]);
        assert!(synthesize_model(&s, 2, &p, Objective::Feasibility).is_err());
    }
}
