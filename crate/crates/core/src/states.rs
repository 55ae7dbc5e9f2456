//! Preparation-aware states of the composite system `S ⊗ R`.
//!
//! An [`Ensemble`] keeps the full list of weighted pure branches it was
//! prepared from. Two ensembles with the same density matrix are different
//! values, because state-dependent dynamics can tell them apart.

use std::f64::consts::FRAC_PI_8;

use crate::error::{arg, Error, Result};
use crate::qmath::{
    mean_value, partial_trace_r, tensor, Axis, ComplexMatrix, ComplexVector, ALGEBRA_TOL, C64,
};

/// Weights must sum to one within this tolerance.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A branch counts as a product state when its reduced Bloch norm is this close to 1.
pub const PRODUCT_TOL: f64 = 1e-9;

/// Admissible overshoot of a Bloch norm past the unit sphere.
pub const BLOCH_NORM_SLACK: f64 = 1e-10;

/// Unit-norm state vector of the composite system.
#[derive(Debug, Clone, PartialEq)]
pub struct PureComposite {
    vector: ComplexVector,
}

impl PureComposite {
    pub fn new(vector: ComplexVector) -> Result<Self> {
        if vector.dim() != 4 {
            return arg(format!("composite state needs 4 components, got {}", vector.dim()));
        }
        if !vector.is_normalized(ALGEBRA_TOL) {
            return arg(format!("composite state is not normalized (norm {})", vector.norm()));
        }
        Ok(Self { vector })
    }

    /// `|s⟩|r⟩` for normalized spin vectors.
    pub fn product(s: &ComplexVector, r: &ComplexVector) -> Result<Self> {
        Self::new(s.tensor(r)?)
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.vector
    }

    pub fn projector(&self) -> ComplexMatrix {
        self.vector.outer_self()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub weight: f64,
    pub state: PureComposite,
}

impl Branch {
    pub fn new(weight: f64, state: PureComposite) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return arg(format!("branch weight {weight} outside [0, 1]"));
        }
        Ok(Self { weight, state })
    }
}

/// Ordered, weighted list of pure composite states.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    branches: Vec<Branch>,
}

impl Ensemble {
    pub fn new(branches: Vec<Branch>) -> Result<Self> {
        if branches.is_empty() {
            return arg("ensemble needs at least one branch");
        }
        let total: f64 = branches.iter().map(|b| b.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return arg(format!("branch weights sum to {total}, not 1"));
        }
        Ok(Self { branches })
    }

    pub fn pure(state: PureComposite) -> Self {
        Self {
            branches: vec![Branch { weight: 1.0, state }],
        }
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }
}

/// Pauli mean values `(⟨Σ₁⟩, ⟨Σ₂⟩, ⟨Σ₃⟩)` of one spin.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochVector {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl BlochVector {
    pub const ZERO: BlochVector = BlochVector {
        s1: 0.0,
        s2: 0.0,
        s3: 0.0,
    };

    pub const fn new(s1: f64, s2: f64, s3: f64) -> Self {
        Self { s1, s2, s3 }
    }

    /// Bloch vector of a 2x2 density matrix.
    pub fn from_density(rho: &ComplexMatrix) -> Result<Self> {
        if rho.dim() != 2 {
            return arg("Bloch vector needs a 2x2 density matrix");
        }
        let component = |axis| mean_value(&crate::qmath::pauli(axis), rho);
        Ok(Self {
            s1: component(Axis::X)?,
            s2: component(Axis::Y)?,
            s3: component(Axis::Z)?,
        })
    }

    /// `(I + s·Σ) / 2`.
    pub fn to_density(self) -> ComplexMatrix {
        let h = 0.5;
        ComplexMatrix::from_row_major(
            2,
            vec![
                C64::new(h * (1.0 + self.s3), 0.0),
                C64::new(h * self.s1, -h * self.s2),
                C64::new(h * self.s1, h * self.s2),
                C64::new(h * (1.0 - self.s3), 0.0),
            ],
        )
        .expect("2x2 with finite entries")
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(self) -> f64 {
        self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3
    }

    pub fn is_physical(self) -> bool {
        self.norm_sqr() <= 1.0 + BLOCH_NORM_SLACK
    }

    pub fn as_array(self) -> [f64; 3] {
        [self.s1, self.s2, self.s3]
    }

    pub fn scaled(self, k: f64) -> Self {
        Self::new(k * self.s1, k * self.s2, k * self.s3)
    }

    pub fn plus(self, other: Self) -> Self {
        Self::new(self.s1 + other.s1, self.s2 + other.s2, self.s3 + other.s3)
    }

    pub fn max_abs_diff(self, other: Self) -> f64 {
        (self.s1 - other.s1)
            .abs()
            .max((self.s2 - other.s2).abs())
            .max((self.s3 - other.s3).abs())
    }
}

/// `Σ_k w_k |ψ_k⟩⟨ψ_k|`.
pub fn density_of(e: &Ensemble) -> ComplexMatrix {
    e.branches
        .iter()
        .map(|b| b.state.projector().scale(C64::new(b.weight, 0.0)))
        .reduce(|acc, m| &acc + &m)
        .expect("ensembles are never empty")
}

/// Reduced density matrix of `S`.
pub fn reduced_density_s(e: &Ensemble) -> ComplexMatrix {
    partial_trace_r(&density_of(e)).expect("composite density is 4x4")
}

/// Bloch vector of `S` from the full density matrix, `⟨Σ_k ⊗ I⟩`.
pub fn reduced_bloch_s(e: &Ensemble) -> BlochVector {
    let pi = density_of(e);
    let id = ComplexMatrix::identity(2).expect("dimension 2");
    let component = |axis| {
        let op = tensor(&crate::qmath::pauli(axis), &id).expect("2x2 factors");
        mean_value(&op, &pi).expect("ensemble density is a valid state")
    };
    BlochVector::new(component(Axis::X), component(Axis::Y), component(Axis::Z))
}

/// Bloch vector of the `S` factor of a product branch.
pub fn conditional_bloch_s(b: &Branch) -> Result<BlochVector> {
    let rho = partial_trace_r(&b.state.projector())?;
    let bloch = BlochVector::from_density(&rho)?;
    let n = bloch.norm();
    if (n - 1.0).abs() > PRODUCT_TOL {
        return Err(Error::NotProduct { bloch_norm: n });
    }
    Ok(bloch)
}

fn check_weighted_vectors(label: &str, items: &[(f64, ComplexVector)]) -> Result<()> {
    if items.is_empty() {
        return arg(format!("{label}: no vectors given"));
    }
    for (w, v) in items {
        if !(0.0..=1.0).contains(w) {
            return arg(format!("{label}: weight {w} outside [0, 1]"));
        }
        if v.dim() != 2 || !v.is_normalized(ALGEBRA_TOL) {
            return arg(format!("{label}: vectors must be normalized 2-vectors"));
        }
    }
    let total: f64 = items.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return arg(format!("{label}: weights sum to {total}, not 1"));
    }
    Ok(())
}

/// `Π = ρ ⊗ μ` with `ρ = Σ_i w_i |s_i⟩⟨s_i|` and `μ = Σ_j v_j |r_j⟩⟨r_j|`.
///
/// Branches are ordered with the `S` index slow; zero-weight pairs are skipped.
pub fn make_product_uncorrelated(
    rho_branches: &[(f64, ComplexVector)],
    mu_branches: &[(f64, ComplexVector)],
) -> Result<Ensemble> {
    check_weighted_vectors("S mixture", rho_branches)?;
    check_weighted_vectors("R mixture", mu_branches)?;
    let mut branches = Vec::with_capacity(rho_branches.len() * mu_branches.len());
    for (ws, s) in rho_branches {
        for (wr, r) in mu_branches {
            let w = ws * wr;
            if w > 0.0 {
                branches.push(Branch::new(w, PureComposite::product(s, r)?)?);
            }
        }
    }
    Ensemble::new(branches)
}

/// `p |s_A⟩⟨s_A| |r_A⟩⟨r_A| + (1 − p) |s_B⟩⟨s_B| |r_B⟩⟨r_B|` with `r_A ⟂ r_B`.
///
/// A branch of zero weight is omitted.
pub fn make_classical_correlated(
    p: f64,
    s_a: &ComplexVector,
    r_a: &ComplexVector,
    s_b: &ComplexVector,
    r_b: &ComplexVector,
) -> Result<Ensemble> {
    if !(0.0..=1.0).contains(&p) {
        return arg(format!("mixing probability {p} outside [0, 1]"));
    }
    let overlap = r_a.inner(r_b)?.norm();
    if overlap > ALGEBRA_TOL {
        return arg(format!("R vectors are not orthogonal (overlap {overlap:e})"));
    }
    let mut branches = Vec::with_capacity(2);
    for (w, s, r) in [(p, s_a, r_a), (1.0 - p, s_b, r_b)] {
        if w > 0.0 {
            branches.push(Branch::new(w, PureComposite::product(s, r)?)?);
        }
    }
    Ensemble::new(branches)
}

/// The total-spin-zero state `(|↑⟩|↓⟩ − |↓⟩|↑⟩)/√2`.
pub fn singlet() -> PureComposite {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = ComplexVector::from_real(&[0.0, h, -h, 0.0]).expect("4-vector");
    PureComposite::new(v).expect("unit norm")
}

/// Eigenvectors `(|↗⟩, |↙⟩)` of `(Σ₁ + Σ₃)/√2` for eigenvalues `+1`, `−1`.
///
/// Phase convention: first nonzero component real and positive.
pub fn diag_eigenstates() -> (ComplexVector, ComplexVector) {
    let (s, c) = FRAC_PI_8.sin_cos();
    (
        ComplexVector::from_real(&[c, s]).expect("2-vector"),
        ComplexVector::from_real(&[s, -c]).expect("2-vector"),
    )
}

pub fn up() -> ComplexVector {
    ComplexVector::up()
}

pub fn down() -> ComplexVector {
    ComplexVector::down()
}

pub fn diag_up() -> ComplexVector {
    diag_eigenstates().0
}

pub fn diag_down() -> ComplexVector {
    diag_eigenstates().1
}

/// `|α⟩`, the first basis vector of `R`.
pub fn alpha() -> ComplexVector {
    ComplexVector::up()
}

/// `|β⟩`, the second basis vector of `R`.
pub fn beta() -> ComplexVector {
    ComplexVector::down()
}
