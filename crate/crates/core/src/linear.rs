//! Ordinary linear dynamics of the non-interacting pair: the composite
//! evolves by `U ⊗ V`, and nothing done on `R` can show up in a probability
//! for `S`. [`no_signalling_suite`] checks that numerically.

use crate::error::{arg, Result};
use crate::measurement::{joint_probability_total, lift, measure_all, MeasurementBasis, Subsystem};
use crate::qmath::{mean_value, tensor, ComplexMatrix, ALGEBRA_TOL};
use crate::sampling::{random_basis, random_ensemble, random_projector, random_unitary, seeded};
use crate::states::{alpha, density_of, reduced_density_s, up, Branch, Ensemble, PureComposite};

/// `U_S ⊗ V_R` for unitaries on each spin.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductUnitary {
    u_s: ComplexMatrix,
    v_r: ComplexMatrix,
}

impl ProductUnitary {
    pub fn new(u_s: ComplexMatrix, v_r: ComplexMatrix) -> Result<Self> {
        for (name, m) in [("U_S", &u_s), ("V_R", &v_r)] {
            if m.dim() != 2 || !m.is_unitary(ALGEBRA_TOL) {
                return arg(format!("{name} is not a 2x2 unitary"));
            }
        }
        Ok(Self { u_s, v_r })
    }

    pub fn identity() -> Self {
        Self {
            u_s: ComplexMatrix::identity2(),
            v_r: ComplexMatrix::identity2(),
        }
    }

    pub fn u_s(&self) -> &ComplexMatrix {
        &self.u_s
    }

    pub fn v_r(&self) -> &ComplexMatrix {
        &self.v_r
    }

    pub fn with_v_r(&self, v_r: ComplexMatrix) -> Result<Self> {
        Self::new(self.u_s.clone(), v_r)
    }

    pub fn composite(&self) -> ComplexMatrix {
        tensor(&self.u_s, &self.v_r).expect("2x2 factors")
    }
}

/// Maps every branch vector by `U_S ⊗ V_R`; weights are unchanged.
pub fn evolve(e: &Ensemble, uv: &ProductUnitary) -> Result<Ensemble> {
    let w = uv.composite();
    let branches = e
        .branches()
        .iter()
        .map(|b| {
            let v = w.apply(b.state.vector())?;
            Branch::new(b.weight, PureComposite::new(v)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(branches)
}

/// Heisenberg picture: `Tr_S[U† P U ρ]`.
pub fn heisenberg_probability(p: &ComplexMatrix, uv: &ProductUnitary, e: &Ensemble) -> Result<f64> {
    if !p.is_projector(ALGEBRA_TOL) || p.dim() != 2 {
        return arg("P must be a 2x2 projector");
    }
    let u = &uv.u_s;
    let heis = u.dagger().matmul(p)?.matmul(u)?;
    mean_value(&heis, &reduced_density_s(e))
}

/// Schrödinger picture: `Tr[(P ⊗ I) (U⊗V) Π (U⊗V)†]`.
pub fn schrodinger_probability(p: &ComplexMatrix, uv: &ProductUnitary, e: &Ensemble) -> Result<f64> {
    mean_value(&lift(p, Subsystem::S)?, &density_of(&evolve(e, uv)?))
}

/// One randomized instance of the no-influence checks.
#[derive(Debug, Clone)]
pub struct NoSignallingTrial {
    pub ensemble: Ensemble,
    pub basis: MeasurementBasis,
    pub projector: ComplexMatrix,
    pub unitary: ProductUnitary,
    /// A second dynamics for `R` that must leave every `S` probability alone.
    pub alt_v_r: ComplexMatrix,
}

impl NoSignallingTrial {
    /// Everything trivial: `|↑⟩|α⟩`, `P = |↑⟩⟨↑|`, identity dynamics, `α/β` basis.
    pub fn identity() -> Self {
        let basis = MeasurementBasis::from_vectors(&alpha(), &crate::states::beta(), Subsystem::R)
            .expect("orthonormal");
        Self {
            ensemble: Ensemble::pure(PureComposite::product(&up(), &alpha()).expect("unit")),
            basis,
            projector: crate::qmath::projector_from_vector(&up()).expect("unit"),
            unitary: ProductUnitary::identity(),
            alt_v_r: ComplexMatrix::identity2(),
        }
    }

    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        let ensemble = random_ensemble(rng);
        let basis = random_basis(rng, Subsystem::R);
        let projector = random_projector(rng);
        let unitary =
            ProductUnitary::new(random_unitary(rng), random_unitary(rng)).expect("unitary draws");
        let alt_v_r = random_unitary(rng);
        Self {
            ensemble,
            basis,
            projector,
            unitary,
            alt_v_r,
        }
    }
}

/// Largest deviation seen for each family of identities.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrialDeviations {
    /// Measuring `R` and summing joint probabilities versus `Tr_S[P ρ]`.
    pub measurement: f64,
    /// Heisenberg versus Schrödinger picture.
    pub pictures: f64,
    /// Two different `V_R` dynamics.
    pub r_dynamics: f64,
    /// Evolution interposed between a measurement on `R` and `P` on `S`.
    pub interposed: f64,
    /// Entrywise `U†V†(P⊗I)UV` versus `(U†PU)⊗I`.
    pub operator_identity: f64,
}

impl TrialDeviations {
    pub fn max(&self) -> f64 {
        [
            self.measurement,
            self.pictures,
            self.r_dynamics,
            self.interposed,
            self.operator_identity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    fn merge(self, other: Self) -> Self {
        Self {
            measurement: self.measurement.max(other.measurement),
            pictures: self.pictures.max(other.pictures),
            r_dynamics: self.r_dynamics.max(other.r_dynamics),
            interposed: self.interposed.max(other.interposed),
            operator_identity: self.operator_identity.max(other.operator_identity),
        }
    }
}

pub fn check_trial(t: &NoSignallingTrial) -> Result<TrialDeviations> {
    let p = &t.projector;
    let e = &t.ensemble;
    let uv = &t.unitary;

    let marginal = mean_value(p, &reduced_density_s(e))?;
    let joint = joint_probability_total(p, e, &t.basis)?;

    let heis = heisenberg_probability(p, uv, e)?;
    let schr = schrodinger_probability(p, uv, e)?;
    let alt = uv.with_v_r(t.alt_v_r.clone())?;
    let schr_alt = schrodinger_probability(p, &alt, e)?;
    let heis_alt = heisenberg_probability(p, &alt, e)?;

    // measure R at t = 0, evolve each outcome, then ask about P
    let interposed: f64 = measure_all(e, &t.basis)?
        .iter()
        .map(|o| Ok(o.probability * schrodinger_probability(p, uv, &o.post_state)?))
        .sum::<Result<f64>>()?;

    let w = uv.composite();
    let lhs = w
        .dagger()
        .matmul(&lift(p, Subsystem::S)?)?
        .matmul(&w)?;
    let u = uv.u_s();
    let rhs = lift(&u.dagger().matmul(p)?.matmul(u)?, Subsystem::S)?;

    Ok(TrialDeviations {
        measurement: (joint - marginal).abs(),
        pictures: (heis - schr).abs(),
        r_dynamics: (schr - schr_alt).abs().max((heis - heis_alt).abs()),
        interposed: (interposed - heis).abs(),
        operator_identity: lhs.max_abs_diff(&rhs),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoSignallingReport {
    pub trials: usize,
    pub seed: u64,
    pub deviations: TrialDeviations,
}

impl NoSignallingReport {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.max()
    }
}

/// Runs `trials` checks: the identity trial first, then `trials − 1` random
/// ones drawn from a generator seeded with `seed`.
pub fn no_signalling_suite(trials: usize, seed: u64) -> Result<NoSignallingReport> {
    if trials == 0 {
        return arg("no-signalling suite needs at least one trial");
    }
    let mut rng = seeded(seed);
    let mut deviations = check_trial(&NoSignallingTrial::identity())?;
    for _ in 1..trials {
        let t = NoSignallingTrial::random(&mut rng);
        deviations = deviations.merge(check_trial(&t)?);
    }
    Ok(NoSignallingReport {
        trials,
        seed,
        deviations,
    })
}
