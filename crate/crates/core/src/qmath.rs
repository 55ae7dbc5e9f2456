//! Dense complex linear algebra for a single spin (dimension 2) and a pair
//! of spins (dimension 4).
//!
//! Composite operators use the Kronecker convention with `S` as the left
//! (slow) factor and `R` as the right (fast) factor: the basis index of
//! `|s⟩|r⟩` is `2 * s + r`. Every operation in the crate relies on this.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{arg, Error, Result};

/// Tolerance for algebraic identities on exact closed-form paths.
pub const ALGEBRA_TOL: f64 = 1e-12;

/// Largest imaginary residue tolerated in the trace of a mean value.
pub const MEAN_VALUE_IMAG_TOL: f64 = 1e-10;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        arg(format!("dimension must be 2 or 4, got {dim}"))
    }
}

fn check_finite(entries: &[C64]) -> Result<()> {
    if entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        arg("non-finite complex entry")
    }
}

/// Spin axis of a Pauli matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X = 1,
    Y = 2,
    Z = 3,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    /// Maps the conventional index 1, 2, 3 onto an axis.
    pub fn from_index(index: u8) -> Result<Self> {
        match index {
            1 => Ok(Axis::X),
            2 => Ok(Axis::Y),
            3 => Ok(Axis::Z),
            other => arg(format!("Pauli axis must be 1, 2 or 3, got {other}")),
        }
    }

    pub fn index(self) -> u8 {
        self as u8
    }
}

/// Square complex matrix of dimension 2 or 4, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            entries: vec![ZERO; dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for k in 0..dim {
            m.entries[k * dim + k] = ONE;
        }
        Ok(m)
    }

    /// Builds a matrix from `dim * dim` entries in row-major order.
    pub fn from_row_major(dim: usize, entries: Vec<C64>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return arg(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            ));
        }
        check_finite(&entries)?;
        Ok(Self { dim, entries })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(diag.len())?;
        for (k, &d) in diag.iter().enumerate() {
            m.entries[k * m.dim + k] = C64::new(d, 0.0);
        }
        check_finite(&m.entries)?;
        Ok(m)
    }

    pub(crate) fn identity2() -> Self {
        Self {
            dim: 2,
            entries: vec![ONE, ZERO, ZERO, ONE],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|k| self.get(k, k)).sum()
    }

    pub fn dagger(&self) -> Self {
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                entries[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        Self { dim: d, entries }
    }

    /// Matrix product; fails on a dimension mismatch.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let d = self.dim;
        let mut entries = vec![ZERO; d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..d {
                    entries[r * d + c] += a * other.entries[k * d + c];
                }
            }
        }
        Ok(Self { dim: d, entries })
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if v.dim() != self.dim {
            return arg(format!(
                "cannot apply a {0}x{0} matrix to a {1}-vector",
                self.dim,
                v.dim()
            ));
        }
        let d = self.dim;
        let entries = (0..d)
            .map(|r| (0..d).map(|c| self.entries[r * d + c] * v.entries[c]).sum())
            .collect();
        Ok(ComplexVector { entries })
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.approx_eq(&self.dagger(), tol)
    }

    /// Hermitian, unit trace and nonnegative diagonal (all within `tol`).
    pub fn is_density(&self, tol: f64) -> bool {
        self.is_hermitian(tol)
            && (self.trace() - ONE).norm() <= tol
            && (0..self.dim).all(|k| self.get(k, k).re >= -tol)
    }

    /// Hermitian and idempotent within `tol`.
    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol)
            && self
                .matmul(self)
                .map(|sq| sq.approx_eq(self, tol))
                .unwrap_or(false)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let id = Self::identity(self.dim).expect("dimension already checked");
        self.dagger()
            .matmul(self)
            .map(|p| p.approx_eq(&id, tol))
            .unwrap_or(false)
    }

    /// Determinant via cofactor expansion (dimensions 2 and 4 only).
    pub fn determinant(&self) -> C64 {
        fn det(m: &[C64], n: usize) -> C64 {
            if n == 1 {
                return m[0];
            }
            if n == 2 {
                return m[0] * m[3] - m[1] * m[2];
            }
            let mut total = ZERO;
            for col in 0..n {
                let minor: Vec<C64> = (1..n)
                    .flat_map(|r| {
                        (0..n)
                            .filter(move |&c| c != col)
                            .map(move |c| m[r * n + c])
                    })
                    .collect();
                let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
                total += m[col] * sign * det(&minor, n - 1);
            }
            total
        }
        det(&self.entries, self.dim)
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            arg(format!("dimension mismatch: {} vs {}", self.dim, other.dim))
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self.get(r, c);
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Operator sugar for same-dimension arithmetic. Mismatched dimensions are a
// programming error here; fallible callers use `matmul`/`try_add`.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix dimension mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix dimension mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix dimension mismatch")
    }
}

/// Complex column vector of dimension 2 or 4.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<C64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        check_dim(entries.len())?;
        check_finite(&entries)?;
        Ok(Self { entries })
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// `|↑⟩ = (1, 0)`, the `+1` eigenvector of `Σ₃`.
    pub fn up() -> Self {
        Self {
            entries: vec![ONE, ZERO],
        }
    }

    /// `|↓⟩ = (0, 1)`, the `−1` eigenvector of `Σ₃`.
    pub fn down() -> Self {
        Self {
            entries: vec![ZERO, ONE],
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// Returns `v / ‖v‖`; fails on a zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return arg("cannot normalize a zero vector");
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return arg("inner product of vectors with different dimensions");
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Kronecker product `|self⟩|other⟩` of two spin vectors.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.dim() != 2 || other.dim() != 2 {
            return arg("vector tensor product needs two 2-vectors");
        }
        let entries = self
            .entries
            .iter()
            .flat_map(|a| other.entries.iter().map(move |b| a * b))
            .collect();
        Ok(Self { entries })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return arg("vector dimension mismatch");
        }
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `|self⟩⟨self|` without a normalization check.
    pub(crate) fn outer_self(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut entries = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                entries[r * d + c] = self.entries[r] * self.entries[c].conj();
            }
        }
        ComplexMatrix { dim: d, entries }
    }
}

/// The Pauli matrix `Σ_axis` in the basis where `Σ₃` is diagonal.
pub fn pauli(axis: Axis) -> ComplexMatrix {
    let entries = match axis {
        Axis::X => vec![ZERO, ONE, ONE, ZERO],
        Axis::Y => vec![ZERO, -I, I, ZERO],
        Axis::Z => vec![ONE, ZERO, ZERO, -ONE],
    };
    ComplexMatrix { dim: 2, entries }
}

/// Index-based form of [`pauli`]; rejects anything but 1, 2, 3.
pub fn pauli_index(axis: u8) -> Result<ComplexMatrix> {
    Axis::from_index(axis).map(pauli)
}

pub fn dagger(m: &ComplexMatrix) -> ComplexMatrix {
    m.dagger()
}

/// Kronecker product `A ⊗ B` with `A` acting on `S` and `B` on `R`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim != 2 || b.dim != 2 {
        return arg(format!(
            "tensor needs two 2x2 factors, got {0}x{0} and {1}x{1}",
            a.dim, b.dim
        ));
    }
    let mut entries = vec![ZERO; 16];
    for (s_row, s_col) in (0..2).flat_map(|r| (0..2).map(move |c| (r, c))) {
        let a_rc = a.get(s_row, s_col);
        for (r_row, r_col) in (0..2).flat_map(|r| (0..2).map(move |c| (r, c))) {
            entries[(2 * s_row + r_row) * 4 + 2 * s_col + r_col] = a_rc * b.get(r_row, r_col);
        }
    }
    Ok(ComplexMatrix { dim: 4, entries })
}

fn check_composite(m: &ComplexMatrix) -> Result<()> {
    if m.dim == 4 {
        Ok(())
    } else {
        arg(format!("partial trace needs a 4x4 matrix, got {0}x{0}", m.dim))
    }
}

/// `Tr_R Π`: the reduced operator on `S`.
pub fn partial_trace_r(pi: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_composite(pi)?;
    let mut entries = vec![ZERO; 4];
    for s in 0..2 {
        for s2 in 0..2 {
            entries[s * 2 + s2] = (0..2).map(|r| pi.get(2 * s + r, 2 * s2 + r)).sum();
        }
    }
    Ok(ComplexMatrix { dim: 2, entries })
}

/// `Tr_S Π`: the reduced operator on `R`.
pub fn partial_trace_s(pi: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_composite(pi)?;
    let mut entries = vec![ZERO; 4];
    for r in 0..2 {
        for r2 in 0..2 {
            entries[r * 2 + r2] = (0..2).map(|s| pi.get(2 * s + r, 2 * s + r2)).sum();
        }
    }
    Ok(ComplexMatrix { dim: 2, entries })
}

/// `⟨A⟩ = Tr[A ρ]` for hermitian `A` and density `ρ`.
pub fn mean_value(a: &ComplexMatrix, rho: &ComplexMatrix) -> Result<f64> {
    if a.dim != rho.dim {
        return arg(format!(
            "mean value of a {0}x{0} observable in a {1}x{1} state",
            a.dim, rho.dim
        ));
    }
    if !a.is_hermitian(ALGEBRA_TOL) {
        return arg("observable is not hermitian");
    }
    if !rho.is_density(ALGEBRA_TOL) {
        return arg("state is not a density matrix");
    }
    let tr = a.matmul(rho)?.trace();
    if tr.im.abs() > MEAN_VALUE_IMAG_TOL {
        return Err(Error::InternalConsistency(format!(
            "mean value has imaginary part {:e}",
            tr.im
        )));
    }
    Ok(tr.re)
}

/// `exp(−i angle n·Σ / 2) = cos(angle/2) I − i sin(angle/2) n·Σ`.
pub fn spin_unitary(axis: [f64; 3], angle: f64) -> Result<ComplexMatrix> {
    if !axis.iter().all(|x| x.is_finite()) || !angle.is_finite() {
        return arg("rotation axis and angle must be finite");
    }
    let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > ALGEBRA_TOL {
        return arg(format!("rotation axis must be a unit vector, norm is {norm}"));
    }
    let (s, c) = (angle / 2.0).sin_cos();
    let [nx, ny, nz] = axis;
    // n·Σ = [[nz, nx − i ny], [nx + i ny, −nz]]
    let entries = vec![
        C64::new(c, -s * nz),
        C64::new(-s * ny, -s * nx),
        C64::new(s * ny, -s * nx),
        C64::new(c, s * nz),
    ];
    Ok(ComplexMatrix { dim: 2, entries })
}

/// `|v⟩⟨v|` for a normalized `v`.
pub fn projector_from_vector(v: &ComplexVector) -> Result<ComplexMatrix> {
    if !v.is_normalized(ALGEBRA_TOL) {
        return arg(format!("vector is not normalized (norm {})", v.norm()));
    }
    Ok(v.outer_self())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample_matrix(seed: f64) -> ComplexMatrix {
        let entries = (0..4)
            .map(|k| c((seed + k as f64).sin(), (seed * 1.7 + k as f64).cos()))
            .collect();
        ComplexMatrix::from_row_major(2, entries).unwrap()
    }

    #[test]
    fn pauli_z_is_diagonal() {
        let z = pauli(Axis::Z);
        let expected = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]).unwrap();
        assert_eq!(z, expected);
    }

    #[test]
    fn pauli_xy_is_i_z() {
        let xy = &pauli(Axis::X) * &pauli(Axis::Y);
        assert!(xy.approx_eq(&pauli(Axis::Z).scale(I), 0.0));
    }

    #[test]
    fn pauli_properties() {
        for axis in Axis::ALL {
            let m = pauli(axis);
            assert_eq!(m.trace(), ZERO);
            assert!(m.is_hermitian(0.0));
            assert!((m.determinant().norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn pauli_rejects_bad_axis() {
        assert!(matches!(pauli_index(0), Err(Error::Argument(_))));
        assert!(matches!(pauli_index(4), Err(Error::Argument(_))));
        assert_eq!(pauli_index(2).unwrap(), pauli(Axis::Y));
    }

    #[test]
    fn pauli_product_table() {
        // Σ_j Σ_k = δ_jk I + i ε_jkl Σ_l over all nine pairs
        let levi = |j: usize, k: usize, l: usize| -> f64 {
            match (j, k, l) {
                (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
                (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
                _ => 0.0,
            }
        };
        for (j, aj) in Axis::ALL.iter().enumerate() {
            for (k, ak) in Axis::ALL.iter().enumerate() {
                let lhs = &pauli(*aj) * &pauli(*ak);
                let mut rhs = if j == k {
                    ComplexMatrix::identity(2).unwrap()
                } else {
                    ComplexMatrix::zeros(2).unwrap()
                };
                for (l, al) in Axis::ALL.iter().enumerate() {
                    rhs = &rhs + &pauli(*al).scale(I * levi(j, k, l));
                }
                assert!(lhs.approx_eq(&rhs, ALGEBRA_TOL), "pair {j},{k}");
            }
        }
    }

    #[test]
    fn dagger_examples() {
        assert_eq!(dagger(&pauli(Axis::Y)), pauli(Axis::Y));
        let i_id = ComplexMatrix::identity(2).unwrap().scale(I);
        assert_eq!(dagger(&i_id), i_id.scale(c(-1.0, 0.0)));
        let a = sample_matrix(0.3);
        assert_eq!(dagger(&dagger(&a)), a);
    }

    #[test]
    fn dagger_reverses_products() {
        let a = sample_matrix(0.3);
        let b = sample_matrix(2.1);
        let lhs = dagger(&(&a * &b));
        let rhs = &dagger(&b) * &dagger(&a);
        assert!(lhs.approx_eq(&rhs, ALGEBRA_TOL));
    }

    #[test]
    fn tensor_identity_and_dims() {
        let i2 = ComplexMatrix::identity(2).unwrap();
        assert_eq!(tensor(&i2, &i2).unwrap(), ComplexMatrix::identity(4).unwrap());
        let i4 = ComplexMatrix::identity(4).unwrap();
        assert!(matches!(tensor(&i4, &i2), Err(Error::Argument(_))));
    }

    #[test]
    fn tensor_ordering_puts_s_first() {
        // Σ₃ ⊗ I on |↑⟩|α⟩ = e_0 gives +1; on |↓⟩|α⟩ = e_2 gives −1.
        let op = tensor(&pauli(Axis::Z), &ComplexMatrix::identity(2).unwrap()).unwrap();
        let up_alpha = ComplexVector::up().tensor(&ComplexVector::up()).unwrap();
        assert_eq!(up_alpha.entries()[0], ONE);
        assert_eq!(op.apply(&up_alpha).unwrap(), up_alpha);
        let down_alpha = ComplexVector::down().tensor(&ComplexVector::up()).unwrap();
        assert_eq!(down_alpha.entries()[2], ONE);
        assert_eq!(
            op.apply(&down_alpha).unwrap(),
            down_alpha.scale(c(-1.0, 0.0))
        );
    }

    #[test]
    fn partial_trace_of_product() {
        let rho = ComplexMatrix::from_row_major(2, vec![c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)])
            .unwrap();
        let mu = sample_matrix(1.0);
        let pt = partial_trace_r(&tensor(&rho, &mu).unwrap()).unwrap();
        assert!(pt.approx_eq(&rho.scale(mu.trace()), ALGEBRA_TOL));
        let pt_s = partial_trace_s(&tensor(&rho, &mu).unwrap()).unwrap();
        assert!(pt_s.approx_eq(&mu.scale(rho.trace()), ALGEBRA_TOL));
        assert!(partial_trace_r(&rho).is_err());
    }

    #[test]
    fn mean_value_examples() {
        let rho = ComplexMatrix::from_real_diagonal(&[0.25, 0.75]).unwrap();
        let id = ComplexMatrix::identity(2).unwrap();
        assert!((mean_value(&id, &rho).unwrap() - 1.0).abs() < ALGEBRA_TOL);
        assert!((mean_value(&pauli(Axis::Z), &rho).unwrap() + 0.5).abs() < ALGEBRA_TOL);
        let i4 = ComplexMatrix::identity(4).unwrap();
        assert!(matches!(mean_value(&i4, &rho), Err(Error::Argument(_))));
        let not_density = ComplexMatrix::from_real_diagonal(&[0.5, 0.6]).unwrap();
        assert!(mean_value(&id, &not_density).is_err());
    }

    #[test]
    fn spin_unitary_examples() {
        let id = ComplexMatrix::identity(2).unwrap();
        let u0 = spin_unitary([0.6, 0.0, 0.8], 0.0).unwrap();
        assert!(u0.approx_eq(&id, 0.0));
        let full = spin_unitary([0.0, 0.0, 1.0], 2.0 * std::f64::consts::PI).unwrap();
        assert!(full.approx_eq(&id.scale(c(-1.0, 0.0)), ALGEBRA_TOL));
        assert!(spin_unitary([1.0, 1.0, 0.0], 0.3).is_err());
        assert!(spin_unitary([1.0, 0.0, 0.0], f64::NAN).is_err());
    }

    #[test]
    fn spin_unitary_matches_exponential_series() {
        // independent route: truncated Taylor series of exp(−i θ n·Σ / 2)
        let n = [0.48, -0.6, 0.64];
        let theta = 1.234;
        let generator = [Axis::X, Axis::Y, Axis::Z]
            .iter()
            .zip(n)
            .map(|(a, w)| pauli(*a).scale(c(w, 0.0)))
            .reduce(|acc, m| &acc + &m)
            .unwrap()
            .scale(c(0.0, -theta / 2.0));
        let mut term = ComplexMatrix::identity(2).unwrap();
        let mut sum = term.clone();
        for k in 1..30 {
            term = (&term * &generator).scale(c(1.0 / k as f64, 0.0));
            sum = &sum + &term;
        }
        assert!(spin_unitary(n, theta).unwrap().approx_eq(&sum, ALGEBRA_TOL));
    }

    #[test]
    fn projector_examples() {
        let p = projector_from_vector(&ComplexVector::up()).unwrap();
        assert_eq!(p, ComplexMatrix::from_real_diagonal(&[1.0, 0.0]).unwrap());
        assert_eq!(p.trace(), ONE);
        let bad = ComplexVector::from_real(&[1.0, 1.0]).unwrap();
        assert!(projector_from_vector(&bad).is_err());
    }

    #[test]
    fn constructors_reject_bad_input() {
        assert!(ComplexMatrix::zeros(3).is_err());
        assert!(ComplexMatrix::from_row_major(2, vec![ONE; 3]).is_err());
        assert!(ComplexMatrix::from_row_major(2, vec![c(f64::NAN, 0.0), ONE, ONE, ONE]).is_err());
        assert!(ComplexVector::from_real(&[1.0, 0.0, 0.0]).is_err());
        assert!(ComplexVector::from_real(&[0.0, 0.0]).unwrap().normalized().is_err());
    }

    #[test]
    fn determinant_of_four_by_four_product() {
        let a = sample_matrix(0.4);
        let b = sample_matrix(1.9);
        let det = tensor(&a, &b).unwrap().determinant();
        // det(A ⊗ B) = det(A)^2 det(B)^2 for 2x2 factors
        let expected = a.determinant().powi(2) * b.determinant().powi(2);
        assert!((det - expected).norm() < 1e-12);
    }
}
