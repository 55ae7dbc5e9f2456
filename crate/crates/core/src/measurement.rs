//! Projective measurements on one spin of the composite system, with Lüders
//! collapse applied branch by branch so the result is still an [`Ensemble`].

use std::fmt;

use crate::error::{arg, Error, Result};
use crate::qmath::{mean_value, tensor, ComplexMatrix, ALGEBRA_TOL, C64};
use crate::states::{density_of, reduced_density_s, Branch, Ensemble, PureComposite};

/// Outcomes at or below this probability are impossible; branches whose
/// weighted projection falls to this level are dropped.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// Outcome probabilities must sum to one within this tolerance.
pub const PROBABILITY_SUM_TOL: f64 = 1e-10;

/// Which factor of `S ⊗ R` an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Subsystem {
    S,
    #[default]
    R,
}

/// Embeds a single-spin operator into the composite space.
pub fn lift(op: &ComplexMatrix, side: Subsystem) -> Result<ComplexMatrix> {
    let id = ComplexMatrix::identity2();
    match side {
        Subsystem::S => tensor(op, &id),
        Subsystem::R => tensor(&id, op),
    }
}

/// Ordered set of projectors on one spin.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    projectors: Vec<ComplexMatrix>,
    side: Subsystem,
}

impl MeasurementBasis {
    /// Projectors acting on `R`. Only dimensions are checked here; use
    /// [`validate_basis`] for the algebraic conditions.
    pub fn new(projectors: Vec<ComplexMatrix>) -> Result<Self> {
        Self::on(projectors, Subsystem::R)
    }

    pub fn on(projectors: Vec<ComplexMatrix>, side: Subsystem) -> Result<Self> {
        if projectors.is_empty() {
            return arg("measurement basis needs at least one projector");
        }
        if projectors.iter().any(|p| p.dim() != 2) {
            return arg("measurement projectors must be 2x2");
        }
        Ok(Self { projectors, side })
    }

    /// `{|v⟩⟨v|, |v⊥⟩⟨v⊥|}` from two orthonormal vectors.
    pub fn from_vectors(
        first: &crate::qmath::ComplexVector,
        second: &crate::qmath::ComplexVector,
        side: Subsystem,
    ) -> Result<Self> {
        Self::on(
            vec![
                crate::qmath::projector_from_vector(first)?,
                crate::qmath::projector_from_vector(second)?,
            ],
            side,
        )
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn side(&self) -> Subsystem {
        self.side
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BasisViolation {
    NotHermitian { index: usize, magnitude: f64 },
    NotIdempotent { index: usize, magnitude: f64 },
    NotOrthogonal { first: usize, second: usize, magnitude: f64 },
    Incomplete { magnitude: f64 },
}

impl fmt::Display for BasisViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotHermitian { index, magnitude } => {
                write!(f, "E_{index} is not hermitian (deviation {magnitude:e})")
            }
            Self::NotIdempotent { index, magnitude } => {
                write!(f, "E_{index}² ≠ E_{index} (deviation {magnitude:e})")
            }
            Self::NotOrthogonal {
                first,
                second,
                magnitude,
            } => write!(f, "E_{first} E_{second} ≠ 0 (max entry {magnitude:e})"),
            Self::Incomplete { magnitude } => {
                write!(f, "Σ E_k ≠ I (deviation {magnitude:e})")
            }
        }
    }
}

/// Result of [`validate_basis`]; empty means the basis is valid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BasisReport {
    pub violations: Vec<BasisViolation>,
}

impl BasisReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_incompleteness(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, BasisViolation::Incomplete { .. }))
    }
}

/// Checks `E_j E_k = δ_jk E_k` and `Σ_k E_k = I`, all within 1e-12.
pub fn validate_basis(b: &MeasurementBasis) -> BasisReport {
    let mut violations = Vec::new();
    let ps = &b.projectors;
    for (i, p) in ps.iter().enumerate() {
        let herm = p.max_abs_diff(&p.dagger());
        if herm > ALGEBRA_TOL {
            violations.push(BasisViolation::NotHermitian {
                index: i,
                magnitude: herm,
            });
        }
        let idem = (p * p).max_abs_diff(p);
        if idem > ALGEBRA_TOL {
            violations.push(BasisViolation::NotIdempotent {
                index: i,
                magnitude: idem,
            });
        }
    }
    let zero = ComplexMatrix::zeros(2).expect("dimension 2");
    for i in 0..ps.len() {
        for j in 0..ps.len() {
            if i == j {
                continue;
            }
            let m = (&ps[i] * &ps[j]).max_abs_diff(&zero);
            if m > ALGEBRA_TOL {
                violations.push(BasisViolation::NotOrthogonal {
                    first: i,
                    second: j,
                    magnitude: m,
                });
            }
        }
    }
    let sum = ps.iter().skip(1).fold(ps[0].clone(), |acc, p| &acc + p);
    let complete = sum.max_abs_diff(&ComplexMatrix::identity2());
    if complete > ALGEBRA_TOL {
        violations.push(BasisViolation::Incomplete {
            magnitude: complete,
        });
    }
    BasisReport { violations }
}

fn check_projector(e: &ComplexMatrix) -> Result<()> {
    if e.dim() != 2 || !e.is_projector(ALGEBRA_TOL) {
        return arg("measurement operator is not a 2x2 projector");
    }
    Ok(())
}

/// `Tr[(I ⊗ E_k) Π]`, the probability that `E_k` (on `R`) is found true.
pub fn outcome_probability(e: &Ensemble, ek: &ComplexMatrix) -> Result<f64> {
    outcome_probability_on(e, ek, Subsystem::R)
}

pub fn outcome_probability_on(e: &Ensemble, ek: &ComplexMatrix, side: Subsystem) -> Result<f64> {
    check_projector(ek)?;
    let p = lift(ek, side)?.matmul(&density_of(e))?.trace();
    if p.im.abs() > ALGEBRA_TOL || !(-ALGEBRA_TOL..=1.0 + ALGEBRA_TOL).contains(&p.re) {
        return Err(Error::InternalConsistency(format!(
            "outcome probability {p} is not in [0, 1]"
        )));
    }
    Ok(p.re.clamp(0.0, 1.0))
}

/// Lüders update `E_k Π E_k / Tr[E_k Π E_k]` performed on each branch.
pub fn collapse(e: &Ensemble, ek: &ComplexMatrix) -> Result<Ensemble> {
    collapse_on(e, ek, Subsystem::R)
}

pub fn collapse_on(e: &Ensemble, ek: &ComplexMatrix, side: Subsystem) -> Result<Ensemble> {
    check_projector(ek)?;
    let op = lift(ek, side)?;
    let mut projected = Vec::with_capacity(e.len());
    let mut total = 0.0;
    for branch in e.branches() {
        let v = op.apply(branch.state.vector())?;
        let w = branch.weight * v.norm_sqr();
        if w > ZERO_PROBABILITY {
            total += w;
            projected.push((w, v));
        }
    }
    if total <= ZERO_PROBABILITY {
        return Err(Error::ImpossibleOutcome { probability: total });
    }
    let branches = projected
        .into_iter()
        .map(|(w, v)| {
            let state = PureComposite::new(v.normalized()?)?;
            Branch::new((w / total).min(1.0), state)
        })
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(branches)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeBranch {
    pub outcome_index: usize,
    pub probability: f64,
    pub post_state: Ensemble,
}

/// Every outcome with positive probability, in basis order.
pub fn measure_all(e: &Ensemble, b: &MeasurementBasis) -> Result<Vec<OutcomeBranch>> {
    let report = validate_basis(b);
    if !report.is_ok() {
        return arg(format!("invalid measurement basis: {}", report.violations[0]));
    }
    let mut outcomes = Vec::with_capacity(b.projectors.len());
    for (k, ek) in b.projectors.iter().enumerate() {
        let probability = outcome_probability_on(e, ek, b.side)?;
        if probability <= ZERO_PROBABILITY {
            continue;
        }
        outcomes.push(OutcomeBranch {
            outcome_index: k,
            probability,
            post_state: collapse_on(e, ek, b.side)?,
        });
    }
    let total: f64 = outcomes.iter().map(|o| o.probability).sum();
    if (total - 1.0).abs() > PROBABILITY_SUM_TOL {
        return Err(Error::InternalConsistency(format!(
            "outcome probabilities sum to {total}"
        )));
    }
    Ok(outcomes)
}

/// `Σ_k prob(E_k) Tr[(P ⊗ I) Π_k]` for a projector `P` on `S` and a basis on `R`.
pub fn joint_probability_total(
    p: &ComplexMatrix,
    e: &Ensemble,
    b: &MeasurementBasis,
) -> Result<f64> {
    check_projector(p)?;
    if b.side != Subsystem::R {
        return arg("joint probability expects the measurement on R");
    }
    let op = lift(p, Subsystem::S)?;
    measure_all(e, b)?
        .iter()
        .map(|o| Ok(o.probability * mean_value(&op, &density_of(&o.post_state))?))
        .sum()
}

/// `Tr_S[P ρ]`, the no-measurement value that [`joint_probability_total`] must reproduce.
pub fn marginal_probability(p: &ComplexMatrix, e: &Ensemble) -> Result<f64> {
    mean_value(p, &reduced_density_s(e))
}

/// `(I ⊗ E) Π (I ⊗ E) / Tr[...]` computed on the density matrix directly.
pub fn luders_density(e: &Ensemble, ek: &ComplexMatrix, side: Subsystem) -> Result<ComplexMatrix> {
    let op = lift(ek, side)?;
    let unnorm = op.matmul(&density_of(e))?.matmul(&op)?;
    let tr = unnorm.trace().re;
    if tr <= ZERO_PROBABILITY {
        return Err(Error::ImpossibleOutcome { probability: tr });
    }
    Ok(unnorm.scale(C64::new(1.0 / tr, 0.0)))
}
