//! State-dependent spin precession for `H = ε ⟨Σ₃⟩ Σ₃`.
//!
//! The mean values obey
//!
//! ```text
//! d⟨Σ₁⟩/dt = −2ε ⟨Σ₃⟩ ⟨Σ₂⟩
//! d⟨Σ₂⟩/dt =  2ε ⟨Σ₃⟩ ⟨Σ₁⟩
//! d⟨Σ₃⟩/dt =  0
//! ```
//!
//! so `⟨Σ₃⟩` is constant and `(⟨Σ₁⟩, ⟨Σ₂⟩)` rotates at angular frequency
//! `2ε⟨Σ₃⟩`. The closed form is the evolution path; [`integrate_rk4`] is an
//! independent check on it.
//!
//! Because the frequency depends on the state, evolving a mixture's average
//! Bloch vector and averaging the evolved Bloch vectors of its members give
//! different answers. [`EvolutionPolicy`] makes that choice explicit.

use crate::error::{arg, Result};
use crate::states::{conditional_bloch_s, reduced_bloch_s, BlochVector, Ensemble};

/// Dynamics of a single spin's mean values.
pub trait MeanValueDynamics: Send + Sync {
    /// Time derivative of the Bloch vector.
    fn rhs(&self, b: BlochVector) -> BlochVector;

    /// Exact solution at time `t` from `b0` at time 0.
    fn propagate(&self, b0: BlochVector, t: f64) -> BlochVector;

    fn label(&self) -> String;
}

/// Strength `ε` of the state-dependent Hamiltonian, in inverse time units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearParams {
    pub epsilon: f64,
}

impl NonlinearParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() {
            return arg(format!("epsilon must be finite, got {epsilon}"));
        }
        Ok(Self { epsilon })
    }
}

fn rotate_about_z(b0: BlochVector, angle: f64) -> BlochVector {
    let (s, c) = angle.sin_cos();
    BlochVector::new(b0.s1 * c - b0.s2 * s, b0.s2 * c + b0.s1 * s, b0.s3)
}

impl MeanValueDynamics for NonlinearParams {
    fn rhs(&self, b: BlochVector) -> BlochVector {
        eom_rhs(b, *self)
    }

    fn propagate(&self, b0: BlochVector, t: f64) -> BlochVector {
        closed_form(b0, *self, t)
    }

    fn label(&self) -> String {
        format!("nonlinear(epsilon={})", self.epsilon)
    }
}

/// Precession about the 3-axis at a fixed angular frequency, independent of
/// the state: the linear counterpart of [`NonlinearParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPrecession {
    pub omega: f64,
}

impl MeanValueDynamics for FixedPrecession {
    fn rhs(&self, b: BlochVector) -> BlochVector {
        BlochVector::new(-self.omega * b.s2, self.omega * b.s1, 0.0)
    }

    fn propagate(&self, b0: BlochVector, t: f64) -> BlochVector {
        rotate_about_z(b0, self.omega * t)
    }

    fn label(&self) -> String {
        format!("linear(omega={})", self.omega)
    }
}

/// `(−2ε s₃ s₂, 2ε s₃ s₁, 0)`.
pub fn eom_rhs(b: BlochVector, p: NonlinearParams) -> BlochVector {
    let w = 2.0 * p.epsilon * b.s3;
    BlochVector::new(-w * b.s2, w * b.s1, 0.0)
}

pub fn closed_form(b0: BlochVector, p: NonlinearParams, t: f64) -> BlochVector {
    rotate_about_z(b0, 2.0 * p.epsilon * b0.s3 * t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    points: Vec<BlochVector>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, points: Vec<BlochVector>) -> Result<Self> {
        if times.len() != points.len() {
            return arg(format!(
                "trajectory has {} times but {} points",
                times.len(),
                points.len()
            ));
        }
        check_grid(&times)?;
        Ok(Self { times, points })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[BlochVector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn s2(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|b| b.s2)
    }

    pub fn last(&self) -> BlochVector {
        *self.points.last().expect("trajectories are never empty")
    }

    /// `max_t |s₂(t) − other.s₂(t)|`; the grids must be identical.
    pub fn max_s2_diff(&self, other: &Self) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self
            .s2()
            .zip(other.s2())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Largest componentwise difference over the grid.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self
            .points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| a.max_abs_diff(*b))
            .fold(0.0, f64::max))
    }

    /// `max_t |s₂(t) − f(t)|`.
    pub fn max_s2_error(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.times
            .iter()
            .zip(self.s2())
            .map(|(&t, s2)| (s2 - f(t)).abs())
            .fold(0.0, f64::max)
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.times != other.times {
            return arg("trajectories are on different time grids");
        }
        Ok(())
    }
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return arg("time grid is empty");
    }
    if times.iter().any(|t| !t.is_finite()) {
        return arg("time grid contains a non-finite value");
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return arg("time grid is not strictly increasing");
    }
    Ok(())
}

/// `0, dt, 2dt, …, t_max`, with the final step shortened to land on `t_max`.
pub fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt.is_finite() && dt > 0.0) {
        return arg(format!("time step must be positive, got {dt}"));
    }
    if !(t_max.is_finite() && t_max >= 0.0) {
        return arg(format!("t_max must be nonnegative, got {t_max}"));
    }
    if t_max == 0.0 {
        return Ok(vec![0.0]);
    }
    if dt > t_max {
        return arg(format!("time step {dt} exceeds t_max {t_max}"));
    }
    let ratio = t_max / dt;
    let nearest = ratio.round();
    // absorb representation error such as 10 / 1e-3 = 10000.000000000002
    let steps = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        ratio.ceil()
    } as usize;
    let mut times: Vec<f64> = (0..steps).map(|i| i as f64 * dt).collect();
    times.push(t_max);
    Ok(times)
}

/// Classical fourth-order Runge–Kutta on any mean-value dynamics.
pub fn integrate_rk4_with(
    dynamics: &dyn MeanValueDynamics,
    b0: BlochVector,
    t_max: f64,
    dt: f64,
) -> Result<Trajectory> {
    let times = time_grid(t_max, dt)?;
    let mut points = Vec::with_capacity(times.len());
    let mut b = b0;
    points.push(b);
    for w in times.windows(2) {
        let h = w[1] - w[0];
        let k1 = dynamics.rhs(b);
        let k2 = dynamics.rhs(b.plus(k1.scaled(h / 2.0)));
        let k3 = dynamics.rhs(b.plus(k2.scaled(h / 2.0)));
        let k4 = dynamics.rhs(b.plus(k3.scaled(h)));
        let incr = k1.plus(k2.scaled(2.0)).plus(k3.scaled(2.0)).plus(k4);
        b = b.plus(incr.scaled(h / 6.0));
        points.push(b);
    }
    Trajectory::new(times, points)
}

pub fn integrate_rk4(b0: BlochVector, p: NonlinearParams, t_max: f64, dt: f64) -> Result<Trajectory> {
    integrate_rk4_with(&p, b0, t_max, dt)
}

/// Closed-form trajectory on a given grid.
pub fn sample_closed_form(
    dynamics: &dyn MeanValueDynamics,
    b0: BlochVector,
    times: &[f64],
) -> Result<Trajectory> {
    check_grid(times)?;
    let points = times.iter().map(|&t| dynamics.propagate(b0, t)).collect();
    Trajectory::new(times.to_vec(), points)
}

/// How a mixture enters state-dependent dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolutionPolicy {
    /// Evolve the reduced Bloch vector of `S` as one state.
    AggregateMeans,
    /// Evolve each (product) branch's `S` Bloch vector, then average with the branch weights.
    BranchMeans,
}

pub fn evolve_ensemble(
    e: &Ensemble,
    policy: EvolutionPolicy,
    dynamics: &dyn MeanValueDynamics,
    times: &[f64],
) -> Result<Trajectory> {
    check_grid(times)?;
    match policy {
        EvolutionPolicy::AggregateMeans => sample_closed_form(dynamics, reduced_bloch_s(e), times),
        EvolutionPolicy::BranchMeans => {
            let starts = e
                .branches()
                .iter()
                .map(|b| Ok((b.weight, conditional_bloch_s(b)?)))
                .collect::<Result<Vec<_>>>()?;
            let points = times
                .iter()
                .map(|&t| {
                    starts
                        .iter()
                        .fold(BlochVector::ZERO, |acc, &(w, b0)| {
                            acc.plus(dynamics.propagate(b0, t).scaled(w))
                        })
                })
                .collect();
            Trajectory::new(times.to_vec(), points)
        }
    }
}
