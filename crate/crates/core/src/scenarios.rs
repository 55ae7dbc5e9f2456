//! End-to-end runs: prepare `S ⊗ R`, optionally measure `R`, evolve `S`, and
//! compare two arms through `⟨Σ₂⟩(t)`.
//!
//! | id     | preparation                                 | arms compared                                   |
//! |--------|---------------------------------------------|-------------------------------------------------|
//! | `sec3` | random ensembles, linear dynamics           | randomized no-influence identities              |
//! | `sec5` | `ρ ⊗ μ`, no correlations                    | unmeasured vs measured on `R`                   |
//! | `sec6` | `p ↗α + (1−p) ↙β`                           | measured correlated vs uncorrelated             |
//! | `sec7` | `½ ↑α + ½ ↓β` vs `½ ↗α + ½ ↙β`              | the two preparations, same `ρ_S`                |
//! | `sec8` | singlet                                     | measuring `R` in the ↑/↓ basis vs the ↗/↙ basis |
//!
//! Clocks start at the measurement on `R` where there is one.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::error::{arg, Error, Result};
use crate::linear::no_signalling_suite;
use crate::measurement::{measure_all, MeasurementBasis, Subsystem};
use crate::nonlinear::{
    evolve_ensemble, time_grid, EvolutionPolicy, MeanValueDynamics, NonlinearParams, Trajectory,
};
use crate::qmath::ComplexVector;
use crate::states::{
    alpha, beta, density_of, diag_down, diag_up, down, make_classical_correlated,
    make_product_uncorrelated, reduced_density_s, singlet, up, BlochVector, Ensemble,
};

/// Bound used for trajectory matches against the closed-form curves.
pub const CURVE_TOL: f64 = 1e-8;
/// Bound for quantities that vanish identically.
pub const ZERO_TOL: f64 = 1e-10;
/// Bound for reduced density matrix agreement.
pub const DENSITY_TOL: f64 = 1e-12;
/// Composite density matrices of the two `sec7` preparations must differ by more than this.
pub const COMPOSITE_DIFFERENCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScenarioId {
    LinearBaseline,
    NoCorrelations,
    ClassicalCorrelations,
    ChangedCorrelations,
    Entanglement,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 5] = [
        ScenarioId::LinearBaseline,
        ScenarioId::NoCorrelations,
        ScenarioId::ClassicalCorrelations,
        ScenarioId::ChangedCorrelations,
        ScenarioId::Entanglement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::LinearBaseline => "sec3",
            Self::NoCorrelations => "sec5",
            Self::ClassicalCorrelations => "sec6",
            Self::ChangedCorrelations => "sec7",
            Self::Entanglement => "sec8",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Self::LinearBaseline => "linear dynamics: nothing done on R is visible in S",
            Self::NoCorrelations => "uncorrelated S and R: measuring R changes nothing",
            Self::ClassicalCorrelations => {
                "classically correlated S and R: measured result differs from the uncorrelated one"
            }
            Self::ChangedCorrelations => {
                "same reduced state of S, different correlations, different dynamics"
            }
            Self::Entanglement => "singlet: the basis chosen on R selects the dynamics of S",
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownScenario(pub String);

impl fmt::Display for UnknownScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = ScenarioId::ALL.iter().map(|s| s.name()).collect();
        write!(
            f,
            "unknown scenario '{}'; valid names: {} (alias: linear)",
            self.0,
            names.join(", ")
        )
    }
}

impl std::error::Error for UnknownScenario {}

impl FromStr for ScenarioId {
    type Err = UnknownScenario;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "sec3" | "linear" => Ok(Self::LinearBaseline),
            "sec5" => Ok(Self::NoCorrelations),
            "sec6" => Ok(Self::ClassicalCorrelations),
            "sec7" => Ok(Self::ChangedCorrelations),
            "sec8" => Ok(Self::Entanglement),
            other => Err(UnknownScenario(other.to_string())),
        }
    }
}

/// Measurement basis on `R` for the singlet scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BasisChoice {
    /// Eigenvectors of `Σ₃`.
    #[default]
    UpDown,
    /// Eigenvectors of `(Σ₁ + Σ₃)/√2`.
    Diag,
}

impl BasisChoice {
    pub fn name(self) -> &'static str {
        match self {
            Self::UpDown => "updown",
            Self::Diag => "diag",
        }
    }

    pub fn other(self) -> Self {
        match self {
            Self::UpDown => Self::Diag,
            Self::Diag => Self::UpDown,
        }
    }

    pub fn vectors(self) -> (ComplexVector, ComplexVector) {
        match self {
            Self::UpDown => (up(), down()),
            Self::Diag => (diag_up(), diag_down()),
        }
    }
}

impl FromStr for BasisChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "updown" => Ok(Self::UpDown),
            "diag" => Ok(Self::Diag),
            other => Err(format!("unknown basis '{other}'; expected updown or diag")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    /// Mixing probability of the `↗` component.
    pub p: f64,
    pub epsilon: f64,
    pub t_max: f64,
    pub dt: f64,
    pub basis_choice: BasisChoice,
    pub seed: u64,
    /// Number of randomized trials in the linear baseline.
    pub trials: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            p: 0.75,
            epsilon: 1.0,
            t_max: 10.0,
            dt: 1e-3,
            basis_choice: BasisChoice::UpDown,
            seed: 42,
            trials: 1000,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return arg(format!("p must lie in [0, 1], got {}", self.p));
        }
        if !self.epsilon.is_finite() {
            return arg(format!("epsilon must be finite, got {}", self.epsilon));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return arg(format!("t_max must be positive, got {}", self.t_max));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return arg(format!("dt must be positive, got {}", self.dt));
        }
        if self.dt > self.t_max {
            return arg(format!("dt {} exceeds t_max {}", self.dt, self.t_max));
        }
        if self.trials == 0 {
            return arg("trials must be at least 1");
        }
        Ok(())
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        time_grid(self.t_max, self.dt)
    }

    fn params(&self) -> Result<NonlinearParams> {
        NonlinearParams::new(self.epsilon)
    }
}

/// `(1/√2) sin(√2 ε t)`: `⟨Σ₂⟩(t)` from either `↗` or `↙`.
pub fn pure_diag_s2(epsilon: f64, t: f64) -> f64 {
    FRAC_1_SQRT_2 * (SQRT_2 * epsilon * t).sin()
}

/// `((2p−1)/√2) sin(√2 (2p−1) ε t)`: `⟨Σ₂⟩(t)` from the aggregate of a `p`-mixture of `↗`/`↙`.
pub fn mixed_diag_s2(p: f64, epsilon: f64, t: f64) -> f64 {
    let k = 2.0 * p - 1.0;
    k / SQRT_2 * (SQRT_2 * k * epsilon * t).sin()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arm {
    pub name: String,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// `observed ≤ bound`
    AtMost,
    /// `observed > bound`
    Exceeds,
}

/// One checked claim of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Contract {
    pub name: String,
    pub observed: f64,
    pub bound: f64,
    pub kind: BoundKind,
}

impl Contract {
    pub fn at_most(name: &str, observed: f64, bound: f64) -> Self {
        Self {
            name: name.to_string(),
            observed,
            bound,
            kind: BoundKind::AtMost,
        }
    }

    pub fn exceeds(name: &str, observed: f64, bound: f64) -> Self {
        Self {
            name: name.to_string(),
            observed,
            bound,
            kind: BoundKind::Exceeds,
        }
    }

    pub fn holds(&self) -> bool {
        match self.kind {
            BoundKind::AtMost => self.observed <= self.bound,
            BoundKind::Exceeds => self.observed > self.bound,
        }
    }
}

impl fmt::Display for Contract {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.kind {
            BoundKind::AtMost => "<=",
            BoundKind::Exceeds => ">",
        };
        let status = if self.holds() { "ok" } else { "FAIL" };
        write!(
            f,
            "[{status}] {}: {:e} {op} {:e}",
            self.name, self.observed, self.bound
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub scenario: ScenarioId,
    pub config: ScenarioConfig,
    /// Named trajectories on a shared grid; `armA` first.
    pub arms: Vec<Arm>,
    /// `max_t |Δ⟨Σ₂⟩|` between the arms (the maximal deviation for `sec3`).
    pub divergence: f64,
    pub narrative: BTreeMap<String, Value>,
    pub contracts: Vec<Contract>,
}

impl ScenarioReport {
    pub fn all_contracts_hold(&self) -> bool {
        self.contracts.iter().all(Contract::holds)
    }

    pub fn arm(&self, name: &str) -> Option<&Trajectory> {
        self.arms
            .iter()
            .find(|a| a.name == name)
            .map(|a| &a.trajectory)
    }
}

/// Trajectory of one measurement outcome.
#[derive(Debug, Clone)]
struct OutcomeRun {
    index: usize,
    probability: f64,
    initial: Vec<BlochVector>,
    trajectory: Trajectory,
}

/// Measures `R`, evolves each outcome, and averages with the outcome probabilities.
fn measure_then_evolve(
    e: &Ensemble,
    basis: &MeasurementBasis,
    policy: EvolutionPolicy,
    dynamics: &dyn MeanValueDynamics,
    times: &[f64],
) -> Result<(Trajectory, Vec<OutcomeRun>)> {
    let outcomes = measure_all(e, basis)?;
    let mut runs = Vec::with_capacity(outcomes.len());
    for o in &outcomes {
        let trajectory = evolve_ensemble(&o.post_state, policy, dynamics, times)?;
        let initial = o
            .post_state
            .branches()
            .iter()
            .map(crate::states::conditional_bloch_s)
            .collect::<Result<Vec<_>>>()
            .unwrap_or_else(|_| vec![crate::states::reduced_bloch_s(&o.post_state)]);
        runs.push(OutcomeRun {
            index: o.outcome_index,
            probability: o.probability,
            initial,
            trajectory,
        });
    }
    let points = (0..times.len())
        .map(|i| {
            runs.iter().fold(BlochVector::ZERO, |acc, r| {
                acc.plus(r.trajectory.points()[i].scaled(r.probability))
            })
        })
        .collect();
    Ok((Trajectory::new(times.to_vec(), points)?, runs))
}

fn alpha_beta() -> MeasurementBasis {
    MeasurementBasis::from_vectors(&alpha(), &beta(), Subsystem::R).expect("orthonormal")
}

/// `(|α⟩ + |β⟩)/√2`: a pure `R` state with both outcomes of the `α/β` test possible.
fn r_superposition() -> ComplexVector {
    ComplexVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).expect("2-vector")
}

fn uncorrelated(p: f64) -> Result<Ensemble> {
    make_product_uncorrelated(
        &[(p, diag_up()), (1.0 - p, diag_down())],
        &[(1.0, r_superposition())],
    )
}

fn classical_diag(p: f64) -> Result<Ensemble> {
    make_classical_correlated(p, &diag_up(), &alpha(), &diag_down(), &beta())
}

fn bloch_json(b: BlochVector) -> Value {
    json!(b.as_array())
}

fn outcomes_json(arm: &str, runs: &[OutcomeRun], average: &Trajectory) -> Result<Vec<Value>> {
    runs.iter()
        .map(|r| {
            Ok(json!({
                "arm": arm,
                "outcome_index": r.index,
                "probability": r.probability,
                "initial_bloch": r.initial.iter().map(|b| bloch_json(*b)).collect::<Vec<_>>(),
                "final_bloch": bloch_json(r.trajectory.last()),
                "max_abs_s2_minus_arm": r.trajectory.max_s2_diff(average)?,
            }))
        })
        .collect()
}

/// Largest `|Δs₂|` between any two outcome trajectories.
fn outcome_spread(runs: &[OutcomeRun]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, a) in runs.iter().enumerate() {
        for b in &runs[i + 1..] {
            worst = worst.max(a.trajectory.max_s2_diff(&b.trajectory)?);
        }
    }
    Ok(worst)
}

/// Arms, narrative and the dynamics-independent intermediate values of a run.
struct Built {
    arms: Vec<Arm>,
    divergence: f64,
    narrative: BTreeMap<String, Value>,
    checks: Vec<Contract>,
    outcome_runs: Vec<(String, Vec<OutcomeRun>)>,
}

fn arms_divergence(arms: &[Arm]) -> Result<f64> {
    match arms {
        [a, b, ..] => a.trajectory.max_s2_diff(&b.trajectory),
        _ => Ok(0.0),
    }
}

fn build(id: ScenarioId, cfg: &ScenarioConfig, dynamics: &dyn MeanValueDynamics) -> Result<Built> {
    cfg.validate()?;
    let mut narrative = BTreeMap::new();
    narrative.insert("scenario".into(), json!(id.name()));
    narrative.insert("summary".into(), json!(id.summary()));
    narrative.insert("dynamics".into(), json!(dynamics.label()));
    let mut checks = Vec::new();
    let mut outcome_runs = Vec::new();

    if id == ScenarioId::LinearBaseline {
        let report = no_signalling_suite(cfg.trials, cfg.seed)?;
        let d = report.deviations;
        narrative.insert("trials".into(), json!(report.trials));
        narrative.insert("seed".into(), json!(report.seed));
        narrative.insert(
            "deviations".into(),
            json!({
                "measurement_on_r": d.measurement,
                "heisenberg_vs_schrodinger": d.pictures,
                "dynamics_on_r": d.r_dynamics,
                "evolution_after_measurement": d.interposed,
                "operator_identity": d.operator_identity,
            }),
        );
        checks.push(Contract::at_most("max deviation of linear identities", d.max(), ZERO_TOL));
        return Ok(Built {
            arms: Vec::new(),
            divergence: d.max(),
            narrative,
            checks,
            outcome_runs,
        });
    }

    let times = cfg.times()?;
    let arms = match id {
        ScenarioId::LinearBaseline => unreachable!("handled above"),
        ScenarioId::NoCorrelations => {
            let e = uncorrelated(cfg.p)?;
            let unmeasured = evolve_ensemble(&e, EvolutionPolicy::AggregateMeans, dynamics, &times)?;
            let (measured, runs) = measure_then_evolve(
                &e,
                &alpha_beta(),
                EvolutionPolicy::AggregateMeans,
                dynamics,
                &times,
            )?;
            narrative.insert("p".into(), json!(cfg.p));
            narrative.insert(
                "armA".into(),
                json!("uncorrelated preparation, no measurement, aggregate mean values"),
            );
            narrative.insert(
                "armB".into(),
                json!("uncorrelated preparation, R measured in the alpha/beta basis"),
            );
            narrative.insert("initial_bloch".into(), bloch_json(crate::states::reduced_bloch_s(&e)));
            narrative.insert("outcomes".into(), json!(outcomes_json("armB", &runs, &measured)?));
            outcome_runs.push(("armB".to_string(), runs));
            vec![
                Arm {
                    name: "armA".into(),
                    trajectory: unmeasured,
                },
                Arm {
                    name: "armB".into(),
                    trajectory: measured,
                },
            ]
        }
        ScenarioId::ClassicalCorrelations => {
            if cfg.p == 0.0 || cfg.p == 1.0 {
                return Err(Error::DegenerateConfig(format!(
                    "p = {} is a pure preparation; the correlated and uncorrelated arms coincide",
                    cfg.p
                )));
            }
            classical_arms(cfg, dynamics, &times, &mut narrative, &mut outcome_runs)?
        }
        ScenarioId::ChangedCorrelations => {
            let pi = make_classical_correlated(0.5, &up(), &alpha(), &down(), &beta())?;
            let pi_bar = classical_diag(0.5)?;
            let (a, runs_a) =
                measure_then_evolve(&pi, &alpha_beta(), EvolutionPolicy::BranchMeans, dynamics, &times)?;
            let (b, runs_b) = measure_then_evolve(
                &pi_bar,
                &alpha_beta(),
                EvolutionPolicy::BranchMeans,
                dynamics,
                &times,
            )?;
            let reduced_gap = reduced_density_s(&pi).max_abs_diff(&reduced_density_s(&pi_bar));
            let composite_gap = density_of(&pi).max_abs_diff(&density_of(&pi_bar));
            let half = crate::qmath::ComplexMatrix::from_real_diagonal(&[0.5, 0.5])?;
            let from_half = reduced_density_s(&pi).max_abs_diff(&half);
            checks.push(Contract::at_most(
                "reduced S density matrices agree",
                reduced_gap,
                DENSITY_TOL,
            ));
            checks.push(Contract::at_most("reduced S density is I/2", from_half, DENSITY_TOL));
            checks.push(Contract::exceeds(
                "composite density matrices differ",
                composite_gap,
                COMPOSITE_DIFFERENCE,
            ));
            narrative.insert("mixing".into(), json!(0.5));
            narrative.insert(
                "armA".into(),
                json!("1/2 up(x)alpha + 1/2 down(x)beta, R measured, branch mean values"),
            );
            narrative.insert(
                "armB".into(),
                json!("1/2 ne(x)alpha + 1/2 sw(x)beta, R measured, branch mean values"),
            );
            narrative.insert("reduced_density_gap".into(), json!(reduced_gap));
            narrative.insert("composite_density_gap".into(), json!(composite_gap));
            let mut outs = outcomes_json("armA", &runs_a, &a)?;
            outs.extend(outcomes_json("armB", &runs_b, &b)?);
            narrative.insert("outcomes".into(), json!(outs));
            outcome_runs.push(("armA".to_string(), runs_a));
            outcome_runs.push(("armB".to_string(), runs_b));
            vec![
                Arm {
                    name: "armA".into(),
                    trajectory: a,
                },
                Arm {
                    name: "armB".into(),
                    trajectory: b,
                },
            ]
        }
        ScenarioId::Entanglement => {
            let e = Ensemble::pure(singlet());
            let mut arms = Vec::with_capacity(2);
            let mut outs = Vec::new();
            for (name, choice) in [
                ("armA", cfg.basis_choice),
                ("armB", cfg.basis_choice.other()),
            ] {
                let (v1, v2) = choice.vectors();
                let basis = MeasurementBasis::from_vectors(&v1, &v2, Subsystem::R)?;
                let (traj, runs) =
                    measure_then_evolve(&e, &basis, EvolutionPolicy::BranchMeans, dynamics, &times)?;
                outs.extend(outcomes_json(name, &runs, &traj)?);
                narrative.insert(format!("{name}_basis"), json!(choice.name()));
                outcome_runs.push((choice.name().to_string(), runs));
                arms.push(Arm {
                    name: name.into(),
                    trajectory: traj,
                });
            }
            narrative.insert("basis_choice".into(), json!(cfg.basis_choice.name()));
            narrative.insert("outcomes".into(), json!(outs));
            arms
        }
    };

    let divergence = arms_divergence(&arms)?;
    let bloch_gap = match arms.as_slice() {
        [a, b, ..] => a.trajectory.max_abs_diff(&b.trajectory)?,
        _ => 0.0,
    };
    narrative.insert("max_bloch_component_gap".into(), json!(bloch_gap));
    Ok(Built {
        arms,
        divergence,
        narrative,
        checks,
        outcome_runs,
    })
}

fn classical_arms(
    cfg: &ScenarioConfig,
    dynamics: &dyn MeanValueDynamics,
    times: &[f64],
    narrative: &mut BTreeMap<String, Value>,
    outcome_runs: &mut Vec<(String, Vec<OutcomeRun>)>,
) -> Result<Vec<Arm>> {
    let correlated = classical_diag(cfg.p)?;
    let (measured, runs) = measure_then_evolve(
        &correlated,
        &alpha_beta(),
        EvolutionPolicy::BranchMeans,
        dynamics,
        times,
    )?;
    let baseline = evolve_ensemble(
        &uncorrelated(cfg.p)?,
        EvolutionPolicy::AggregateMeans,
        dynamics,
        times,
    )?;
    narrative.insert("p".into(), json!(cfg.p));
    narrative.insert(
        "armA".into(),
        json!("p ne(x)alpha + (1-p) sw(x)beta, R measured, branch mean values"),
    );
    narrative.insert(
        "armB".into(),
        json!("uncorrelated preparation with the same reduced S state, no measurement"),
    );
    narrative.insert("outcomes".into(), json!(outcomes_json("armA", &runs, &measured)?));
    outcome_runs.push(("armA".to_string(), runs));
    Ok(vec![
        Arm {
            name: "armA".into(),
            trajectory: measured,
        },
        Arm {
            name: "armB".into(),
            trajectory: baseline,
        },
    ])
}

/// Measured correlated arm of `sec6` without the degenerate-`p` guard, so the
/// pure limits can be compared with `sec5`.
pub fn classical_correlations_measured_arm(cfg: &ScenarioConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let params = cfg.params()?;
    let times = cfg.times()?;
    let mut narrative = BTreeMap::new();
    let mut runs = Vec::new();
    let arms = classical_arms(cfg, &params, &times, &mut narrative, &mut runs)?;
    Ok(arms.into_iter().next().expect("two arms").trajectory)
}

/// Runs a scenario with an arbitrary mean-value dynamics in place of the
/// state-dependent one. Only contracts that do not depend on the dynamics are
/// attached.
pub fn run_with_dynamics(
    id: ScenarioId,
    cfg: &ScenarioConfig,
    dynamics: &dyn MeanValueDynamics,
) -> Result<ScenarioReport> {
    let built = build(id, cfg, dynamics)?;
    Ok(ScenarioReport {
        scenario: id,
        config: *cfg,
        arms: built.arms,
        divergence: built.divergence,
        narrative: built.narrative,
        contracts: built.checks,
    })
}

/// Runs a scenario under `H = ε⟨Σ₃⟩Σ₃` and attaches all of its contracts.
pub fn run(id: ScenarioId, cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let params = cfg.params()?;
    let built = build(id, cfg, &params)?;
    let eps = cfg.epsilon;
    let mut contracts = built.checks;
    let arm = |name: &str| {
        built
            .arms
            .iter()
            .find(|a| a.name == name)
            .map(|a| &a.trajectory)
            .expect("arm present")
    };
    let times = cfg.times()?;

    match id {
        ScenarioId::LinearBaseline => {}
        ScenarioId::NoCorrelations => {
            let f = |t| mixed_diag_s2(cfg.p, eps, t);
            contracts.push(Contract::at_most(
                "armA matches the mixed-state curve",
                arm("armA").max_s2_error(f),
                CURVE_TOL,
            ));
            contracts.push(Contract::at_most(
                "armB matches the mixed-state curve",
                arm("armB").max_s2_error(f),
                CURVE_TOL,
            ));
            contracts.push(Contract::at_most(
                "measurement on R changes nothing",
                built.divergence,
                ZERO_TOL,
            ));
        }
        ScenarioId::ClassicalCorrelations => {
            contracts.push(Contract::at_most(
                "armA matches the pure-state curve",
                arm("armA").max_s2_error(|t| pure_diag_s2(eps, t)),
                CURVE_TOL,
            ));
            contracts.push(Contract::at_most(
                "both outcomes give the same trajectory",
                outcome_spread(&built.outcome_runs[0].1)?,
                CURVE_TOL,
            ));
            let expected = times
                .iter()
                .map(|&t| (pure_diag_s2(eps, t) - mixed_diag_s2(cfg.p, eps, t)).abs())
                .fold(0.0, f64::max);
            contracts.push(Contract::at_most(
                "divergence equals the gap between the two curves",
                (built.divergence - expected).abs(),
                CURVE_TOL,
            ));
            contracts.push(Contract::exceeds(
                "correlations change the result",
                built.divergence,
                0.0,
            ));
        }
        ScenarioId::ChangedCorrelations => {
            contracts.push(Contract::at_most(
                "armA <Sigma2> vanishes",
                arm("armA").max_s2_error(|_| 0.0),
                ZERO_TOL,
            ));
            contracts.push(Contract::at_most(
                "armB matches the pure-state curve",
                arm("armB").max_s2_error(|t| pure_diag_s2(eps, t)),
                CURVE_TOL,
            ));
        }
        ScenarioId::Entanglement => {
            let (updown, diag) = match cfg.basis_choice {
                BasisChoice::UpDown => (arm("armA"), arm("armB")),
                BasisChoice::Diag => (arm("armB"), arm("armA")),
            };
            contracts.push(Contract::at_most(
                "updown arm <Sigma2> vanishes",
                updown.max_s2_error(|_| 0.0),
                ZERO_TOL,
            ));
            contracts.push(Contract::at_most(
                "diag arm matches the pure-state curve",
                diag.max_s2_error(|t| pure_diag_s2(eps, t)),
                CURVE_TOL,
            ));
            let prob_gap = built
                .outcome_runs
                .iter()
                .flat_map(|(_, runs)| runs.iter().map(|r| (r.probability - 0.5).abs()))
                .fold(0.0, f64::max);
            contracts.push(Contract::at_most(
                "outcome probabilities are 1/2",
                prob_gap,
                DENSITY_TOL,
            ));
            let envelope = times
                .iter()
                .map(|&t| pure_diag_s2(eps, t).abs())
                .fold(0.0, f64::max);
            contracts.push(Contract::at_most(
                "signal magnitude equals the curve envelope",
                (built.divergence - envelope).abs(),
                CURVE_TOL,
            ));
        }
    }

    Ok(ScenarioReport {
        scenario: id,
        config: *cfg,
        arms: built.arms,
        divergence: built.divergence,
        narrative: built.narrative,
        contracts,
    })
}

pub fn run_linear_baseline(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    run(ScenarioId::LinearBaseline, cfg)
}

pub fn run_no_correlations(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    run(ScenarioId::NoCorrelations, cfg)
}

pub fn run_classical_correlations(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    run(ScenarioId::ClassicalCorrelations, cfg)
}

pub fn run_changed_correlations(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    run(ScenarioId::ChangedCorrelations, cfg)
}

pub fn run_entanglement(cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    run(ScenarioId::Entanglement, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinear::FixedPrecession;

    fn quick() -> ScenarioConfig {
        ScenarioConfig {
            dt: 1e-2,
            trials: 50,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn names_round_trip() {
        for id in ScenarioId::ALL {
            assert_eq!(id.name().parse::<ScenarioId>().unwrap(), id);
        }
        assert_eq!("linear".parse::<ScenarioId>().unwrap(), ScenarioId::LinearBaseline);
        let err = "sec4".parse::<ScenarioId>().unwrap_err();
        assert!(err.to_string().contains("sec5"));
    }

    #[test]
    fn config_validation() {
        let bad = [
            ScenarioConfig { p: 1.5, ..quick() },
            ScenarioConfig { dt: 0.0, ..quick() },
            ScenarioConfig { t_max: -1.0, ..quick() },
            ScenarioConfig { epsilon: f64::NAN, ..quick() },
            ScenarioConfig { trials: 0, ..quick() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn every_scenario_holds_its_contracts() {
        for id in ScenarioId::ALL {
            let r = run(id, &quick()).unwrap();
            for c in &r.contracts {
                assert!(c.holds(), "{id}: {c}");
            }
            assert!(r.divergence >= 0.0);
            if id != ScenarioId::LinearBaseline {
                assert_eq!(r.arms.len(), 2);
                assert_eq!(r.arms[0].trajectory.times(), r.arms[1].trajectory.times());
            }
        }
    }

    #[test]
    fn no_correlations_limits() {
        let half = run_no_correlations(&ScenarioConfig { p: 0.5, ..quick() }).unwrap();
        for a in &half.arms {
            assert!(a.trajectory.s2().all(|s| s.abs() < 1e-15));
        }
        let pure = run_no_correlations(&ScenarioConfig { p: 1.0, ..quick() }).unwrap();
        for a in &pure.arms {
            assert!(a.trajectory.max_s2_error(|t| pure_diag_s2(1.0, t)) < CURVE_TOL);
        }
    }

    #[test]
    fn classical_correlations_rejects_pure_p() {
        for p in [0.0, 1.0] {
            let e = run_classical_correlations(&ScenarioConfig { p, ..quick() });
            assert!(matches!(e, Err(Error::DegenerateConfig(_))));
        }
    }

    #[test]
    fn classical_arm_a_independent_of_p() {
        let a = run_classical_correlations(&ScenarioConfig { p: 0.2, ..quick() }).unwrap();
        let b = run_classical_correlations(&ScenarioConfig { p: 0.9, ..quick() }).unwrap();
        let diff = a.arm("armA").unwrap().max_s2_diff(b.arm("armA").unwrap()).unwrap();
        assert!(diff < 1e-12, "{diff:e}");
        assert!(a.divergence > 0.3);
    }

    #[test]
    fn classical_matches_uncorrelated_at_p_one() {
        let cfg = ScenarioConfig { p: 1.0, ..quick() };
        let measured = classical_correlations_measured_arm(&cfg).unwrap();
        let sec5 = run_no_correlations(&cfg).unwrap();
        for a in &sec5.arms {
            assert!(measured.max_abs_diff(&a.trajectory).unwrap() < CURVE_TOL);
        }
    }

    #[test]
    fn entanglement_basis_choice_swaps_arms() {
        let ud = run_entanglement(&quick()).unwrap();
        let dg = run_entanglement(&ScenarioConfig {
            basis_choice: BasisChoice::Diag,
            ..quick()
        })
        .unwrap();
        assert_eq!(ud.arms[0].trajectory, dg.arms[1].trajectory);
        assert_eq!(ud.arms[1].trajectory, dg.arms[0].trajectory);
        assert_eq!(dg.narrative["armA_basis"], json!("diag"));
    }

    #[test]
    fn entanglement_diag_equals_changed_correlations_arm_b() {
        let sec7 = run_changed_correlations(&quick()).unwrap();
        let sec8 = run_entanglement(&ScenarioConfig {
            basis_choice: BasisChoice::Diag,
            ..quick()
        })
        .unwrap();
        let d = sec8.arm("armA").unwrap().max_abs_diff(sec7.arm("armB").unwrap()).unwrap();
        assert!(d < CURVE_TOL);
    }

    #[test]
    fn linear_dynamics_removes_every_contrast() {
        for omega in [0.0, 0.7, -2.0] {
            let lin = FixedPrecession { omega };
            for id in ScenarioId::ALL {
                let r = run_with_dynamics(id, &quick(), &lin).unwrap();
                assert!(r.divergence < ZERO_TOL, "{id} omega={omega}: {}", r.divergence);
            }
        }
    }

    #[test]
    fn reports_are_reproducible() {
        for id in ScenarioId::ALL {
            assert_eq!(run(id, &quick()).unwrap(), run(id, &quick()).unwrap());
        }
    }
}
