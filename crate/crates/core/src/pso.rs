//! Global-best particle swarm optimizer over RIS phase vectors.
//!
//! Positions live on the torus `[0, 2π)^M`: they wrap on update and the
//! attraction terms use the shortest signed angular difference. Each
//! velocity component is clamped to `±velocity_clamp` radians.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_8, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ris::RisPhaseVector;
use crate::units::{wrap_difference, wrap_phase};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsoParams {
    pub particle_count: usize,
    pub iteration_count: usize,
    /// Per-dimension velocity limit, radians.
    pub velocity_clamp: f64,
    pub inertia_start: f64,
    pub inertia_end: f64,
    pub cognitive_coeff: f64,
    pub social_coeff: f64,
    pub seed: u64,
}

impl Default for PsoParams {
    fn default() -> Self {
        PsoParams {
            particle_count: 500,
            iteration_count: 100,
            velocity_clamp: FRAC_PI_8,
            inertia_start: 0.9,
            inertia_end: 0.4,
            cognitive_coeff: 2.0,
            social_coeff: 2.0,
            seed: 0,
        }
    }
}

impl PsoParams {
    pub fn with_budget(mut self, particles: usize, iterations: usize) -> Self {
        self.particle_count = particles;
        self.iteration_count = iterations;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.particle_count == 0 {
            return Err(Error::invalid("particle_count", "must be at least 1"));
        }
        if self.iteration_count == 0 {
            return Err(Error::invalid("iteration_count", "must be at least 1"));
        }
        if !(self.velocity_clamp > 0.0 && self.velocity_clamp.is_finite()) {
            return Err(Error::invalid("velocity_clamp", "must be positive"));
        }
        let coeffs = [
            self.inertia_start,
            self.inertia_end,
            self.cognitive_coeff,
            self.social_coeff,
        ];
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("pso coefficients", "must be finite"));
        }
        Ok(())
    }

    /// Inertia for iteration `t`, linear from start to end.
    fn inertia(&self, t: usize) -> f64 {
        if self.iteration_count <= 1 {
            return self.inertia_start;
        }
        let frac = t as f64 / (self.iteration_count - 1) as f64;
        self.inertia_start + (self.inertia_end - self.inertia_start) * frac
    }
}

/// Outcome of a phase search.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSearch {
    pub phases: RisPhaseVector,
    pub best_fitness: f64,
    /// Global best after each iteration.
    pub trace: Vec<f64>,
    /// Fitness calls made, initialization included.
    pub evaluations: usize,
    /// Largest velocity component magnitude seen.
    pub max_abs_velocity: f64,
}

/// Anything that can maximize a fitness over RIS phase vectors.
pub trait PhaseOptimizer {
    /// `warm_start`, when given, is evaluated as one of the candidates.
    fn maximize(
        &self,
        dim: usize,
        warm_start: Option<&[f64]>,
        fitness: &mut dyn FnMut(&[f64]) -> f64,
    ) -> Result<PhaseSearch>;
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pso {
    params: PsoParams,
}

impl Pso {
    pub fn new(params: PsoParams) -> Result<Self> {
        params.validate()?;
        Ok(Pso { params })
    }

    pub fn params(&self) -> &PsoParams {
        &self.params
    }

    pub fn optimize<F>(&self, dim: usize, warm_start: Option<&[f64]>, mut fitness: F) -> Result<PhaseSearch>
    where
        F: FnMut(&[f64]) -> f64,
    {
        let p = &self.params;
        if dim == 0 {
            return Err(Error::invalid("dim", "must be at least 1"));
        }
        if let Some(w) = warm_start {
            if w.len() != dim {
                return Err(Error::LengthMismatch {
                    expected: dim,
                    actual: w.len(),
                });
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        let n = p.particle_count;
        let vmax = p.velocity_clamp;

        let mut pos: Vec<f64> = (0..n * dim).map(|_| wrap_phase(rng.gen::<f64>() * TAU)).collect();
        if let Some(w) = warm_start {
            for (x, &v) in pos[..dim].iter_mut().zip(w) {
                *x = wrap_phase(v);
            }
        }
        let mut vel: Vec<f64> = (0..n * dim).map(|_| rng.gen_range(-vmax..=vmax)).collect();
        let mut max_abs_velocity = vel.iter().fold(0.0_f64, |a, v| a.max(v.abs()));

        let mut evaluations = 0;
        let mut eval = |x: &[f64]| -> Result<f64> {
            evaluations += 1;
            let value = fitness(x);
            if value.is_finite() {
                Ok(value)
            } else {
                Err(Error::NonFiniteFitness {
                    value,
                    phases: x.to_vec(),
                })
            }
        };

        let mut best_pos = pos.clone();
        let mut best_fit = Vec::with_capacity(n);
        for i in 0..n {
            best_fit.push(eval(&pos[i * dim..(i + 1) * dim])?);
        }
        let mut g = argmax(&best_fit);
        let mut g_pos = best_pos[g * dim..(g + 1) * dim].to_vec();
        let mut g_fit = best_fit[g];

        let mut trace = Vec::with_capacity(p.iteration_count);
        for t in 0..p.iteration_count {
            let w = p.inertia(t);
            for i in 0..n {
                let range = i * dim..(i + 1) * dim;
                let x = &mut pos[range.clone()];
                let v = &mut vel[range.clone()];
                let pb = &best_pos[range.clone()];
                for d in 0..dim {
                    let r1: f64 = rng.gen();
                    let r2: f64 = rng.gen();
                    let nv = w * v[d]
                        + p.cognitive_coeff * r1 * wrap_difference(pb[d] - x[d])
                        + p.social_coeff * r2 * wrap_difference(g_pos[d] - x[d]);
                    let nv = nv.clamp(-vmax, vmax);
                    max_abs_velocity = max_abs_velocity.max(nv.abs());
                    v[d] = nv;
                    x[d] = wrap_phase(x[d] + nv);
                }
                let f = eval(x)?;
                if f > best_fit[i] {
                    best_fit[i] = f;
                    best_pos[range].copy_from_slice(x);
                }
            }
            // synchronous global-best update at the end of each iteration
            g = argmax(&best_fit);
            if best_fit[g] > g_fit {
                g_fit = best_fit[g];
                g_pos.copy_from_slice(&best_pos[g * dim..(g + 1) * dim]);
            }
            trace.push(g_fit);
        }

        Ok(PhaseSearch {
            phases: RisPhaseVector::new(g_pos),
            best_fitness: g_fit,
            trace,
            evaluations,
            max_abs_velocity,
        })
    }
}

impl PhaseOptimizer for Pso {
    fn maximize(
        &self,
        dim: usize,
        warm_start: Option<&[f64]>,
        fitness: &mut dyn FnMut(&[f64]) -> f64,
    ) -> Result<PhaseSearch> {
        self.optimize(dim, warm_start, fitness)
    }
}

/// Runs the swarm once without a warm start.
pub fn optimize<F>(fitness: F, dim: usize, params: PsoParams) -> Result<PhaseSearch>
where
    F: FnMut(&[f64]) -> f64,
{
    Pso::new(params)?.optimize(dim, None, fitness)
}

/// First index of the maximum; the caller guarantees finite values.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
