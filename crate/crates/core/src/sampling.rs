//! Seeded random draws of unitaries, projectors, bases and ensembles.
//!
//! All draws go through a caller-supplied RNG so that a suite seeded once is
//! reproducible bit for bit.

use std::f64::consts::TAU;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::measurement::{MeasurementBasis, Subsystem};
use crate::qmath::{projector_from_vector, spin_unitary, ComplexMatrix, ComplexVector, C64};
use crate::states::{Branch, Ensemble, PureComposite};

pub type SuiteRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point on the unit sphere.
pub fn unit_axis<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            let u = [v[0] / n, v[1] / n, v[2] / n];
            // renormalize once more so the axis passes the 1e-12 unit check
            let m = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            return [u[0] / m, u[1] / m, u[2] / m];
        }
    }
}

/// `spin_unitary` about a uniform axis with a uniform angle in `[0, 2π)`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    let axis = unit_axis(rng);
    let angle = rng.gen_range(0.0..TAU);
    spin_unitary(axis, angle).expect("unit axis")
}

/// Normalized complex Gaussian vector of the given dimension.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexVector {
    loop {
        let entries: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let v = ComplexVector::new(entries).expect("dimension 2 or 4");
        if v.norm() > 1e-6 {
            return v.normalized().expect("nonzero");
        }
    }
}

pub fn random_projector<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    projector_from_vector(&random_vector(rng, 2)).expect("normalized")
}

/// `{P, I − P}` for a random rank-1 `P`.
pub fn random_basis<R: Rng + ?Sized>(rng: &mut R, side: Subsystem) -> MeasurementBasis {
    let p = random_projector(rng);
    let q = &ComplexMatrix::identity2() - &p;
    MeasurementBasis::on(vec![p, q], side).expect("2x2 projectors")
}

/// One to four branches, each a product or a generic (entangled) pure state.
pub fn random_ensemble<R: Rng + ?Sized>(rng: &mut R) -> Ensemble {
    let count = rng.gen_range(1..=4);
    let raw: Vec<f64> = (0..count).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    // put the rounding residue on the last weight so the sum is 1 to machine precision
    let head: f64 = weights[..count - 1].iter().sum();
    weights[count - 1] = 1.0 - head;
    let branches = weights
        .into_iter()
        .map(|w| {
            let state = if rng.gen_bool(0.5) {
                PureComposite::product(&random_vector(rng, 2), &random_vector(rng, 2))
            } else {
                PureComposite::new(random_vector(rng, 4))
            }
            .expect("normalized draws");
            Branch::new(w, state).expect("weight in [0, 1]")
        })
        .collect();
    Ensemble::new(branches).expect("weights sum to 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::validate_basis;
    use crate::qmath::ALGEBRA_TOL;

    #[test]
    fn draws_satisfy_invariants() {
        let mut rng = seeded(7);
        for _ in 0..200 {
            let u = random_unitary(&mut rng);
            assert!(u.is_unitary(ALGEBRA_TOL));
            assert!((u.determinant().norm() - 1.0).abs() < ALGEBRA_TOL);
            assert!(validate_basis(&random_basis(&mut rng, Subsystem::R)).is_ok());
            let e = random_ensemble(&mut rng);
            assert!((1..=4).contains(&e.len()));
        }
    }

    #[test]
    fn same_seed_same_draws() {
        let a = random_ensemble(&mut seeded(3));
        let b = random_ensemble(&mut seeded(3));
        assert_eq!(a, b);
    }
}
