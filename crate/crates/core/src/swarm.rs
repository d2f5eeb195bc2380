//! Population-based minimizers over a bounded box: inertia-weight PSO and
//! quantum-behaved PSO, both with a fully connected (global best) topology.
//!
//! The update loop is synchronous. Each iteration draws all random numbers up
//! front in particle-major, dimension-minor order, moves every particle,
//! evaluates all costs (in parallel), and only then updates personal and
//! global bests.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Bounds, RngSeed};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Pso,
    Qpso,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    /// Only meaningful for [`Variant::Pso`].
    pub velocity: Vec<f64>,
    pub pbest_position: Vec<f64>,
    pub pbest_cost: f64,
    pub current_cost: f64,
}

impl Particle {
    pub fn new(position: Vec<f64>, cost: f64) -> Self {
        Self {
            velocity: vec![0.0; position.len()],
            pbest_position: position.clone(),
            pbest_cost: cost,
            current_cost: cost,
            position,
        }
    }
}

/// Hyperparameters shared by both variants. Velocities start at zero and are
/// never clamped; positions are clamped to the search box after every move.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwarmConfig {
    pub swarm_size: usize,
    pub max_iter: usize,
    pub c1: f64,
    pub c2: f64,
    pub omega_start: f64,
    pub omega_end: f64,
    pub beta_start: f64,
    pub beta_end: f64,
    /// Stop when the global best improves by less than `stagnation_tol`
    /// over this many consecutive iterations.
    pub stagnation_window: usize,
    pub stagnation_tol: f64,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        Self {
            swarm_size: 30,
            max_iter: 200,
            c1: 2.05,
            c2: 2.05,
            omega_start: 0.9,
            omega_end: 0.1,
            beta_start: 1.0,
            beta_end: 0.1,
            stagnation_window: 20,
            stagnation_tol: 1e-8,
        }
    }
}

impl SwarmConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.swarm_size < 2 {
            return fail("swarm_size must be >= 2");
        }
        if self.max_iter < 1 {
            return fail("max_iter must be >= 1");
        }
        if self.stagnation_window < 1 {
            return fail("stagnation_window must be >= 1");
        }
        let finite = [
            self.c1,
            self.c2,
            self.omega_start,
            self.omega_end,
            self.beta_start,
            self.beta_end,
            self.stagnation_tol,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return fail("coefficients must be finite");
        }
        if self.beta_start <= 0.0 || self.beta_end <= 0.0 {
            return fail("beta endpoints must be > 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxIter,
    Stagnation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub gbest_position: Vec<f64>,
    pub gbest_cost: f64,
    /// Global best cost after initialization, then after each iteration.
    pub cost_trace: Vec<f64>,
    pub iterations_run: usize,
    pub terminated_by: Termination,
    pub evaluations: usize,
}

/// Read-only view handed to an observer after every iteration.
pub struct SwarmState<'a> {
    pub iteration: usize,
    pub particles: &'a [Particle],
    /// Mean of the personal bests used for this iteration's QPSO move.
    pub mbest: Option<&'a [f64]>,
    pub gbest_position: &'a [f64],
    pub gbest_cost: f64,
}

/// Inertia weight at iteration `t` of `max_iter`, linear from `start` to `end`.
pub fn omega_schedule(t: usize, max_iter: usize, start: f64, end: f64) -> f64 {
    start + (end - start) * t as f64 / max_iter as f64
}

/// Contraction-expansion coefficient, linear from 1.0 at t = 0 to 0.1 at
/// t = max_iter.
pub fn beta_schedule(t: usize, max_iter: usize) -> f64 {
    beta_schedule_between(t, max_iter, 1.0, 0.1)
}

/// `(start − end)·(T − t)/T + end`.
pub fn beta_schedule_between(t: usize, max_iter: usize, start: f64, end: f64) -> f64 {
    (start - end) * (max_iter - t.min(max_iter)) as f64 / max_iter as f64 + end
}

/// v' = ω·v + c1·r1·(pbest − x) + c2·r2·(gbest − x), componentwise.
#[allow(clippy::too_many_arguments)]
pub fn pso_velocity_update(
    particle: &Particle,
    gbest: &[f64],
    omega: f64,
    c1: f64,
    c2: f64,
    r1: &[f64],
    r2: &[f64],
) -> Vec<f64> {
    particle
        .velocity
        .iter()
        .zip(&particle.position)
        .zip(&particle.pbest_position)
        .zip(gbest)
        .zip(r1.iter().zip(r2))
        .map(|((((v, x), p), g), (a, b))| omega * v + c1 * a * (p - x) + c2 * b * (g - x))
        .collect()
}

/// x' = clamp(x + v).
pub fn pso_position_update(x: &[f64], v: &[f64], bounds: &Bounds) -> Vec<f64> {
    let mut next: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + b).collect();
    bounds.clamp(&mut next);
    next
}

/// Replaces the personal best only on strict improvement.
pub fn greedy_pbest_update(particle: &mut Particle, new_position: Vec<f64>, new_cost: f64) {
    if new_cost < particle.pbest_cost {
        particle.pbest_position.clone_from(&new_position);
        particle.pbest_cost = new_cost;
    }
    particle.position = new_position;
    particle.current_cost = new_cost;
}

/// Per-dimension mean of the personal bests.
pub fn compute_mbest(particles: &[Particle]) -> Vec<f64> {
    let dims = particles.first().map_or(0, |p| p.pbest_position.len());
    let mut mean = vec![0.0; dims];
    for p in particles {
        for (m, v) in mean.iter_mut().zip(&p.pbest_position) {
            *m += v;
        }
    }
    let n = particles.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    mean
}

/// Φ = θ·pbest + (1 − θ)·gbest, componentwise.
pub fn local_attractor(pbest: &[f64], gbest: &[f64], theta: &[f64]) -> Vec<f64> {
    pbest
        .iter()
        .zip(gbest)
        .zip(theta)
        .map(|((p, g), t)| t * p + (1.0 - t) * g)
        .collect()
}

/// x' = Φ ± β·|mbest − x|·ln(1/q), '+' where k ≥ 0.5, then clamped.
pub fn qpso_position_update(
    x: &[f64],
    phi: &[f64],
    mbest: &[f64],
    beta: f64,
    q: &[f64],
    k: &[f64],
    bounds: &Bounds,
) -> Vec<f64> {
    let mut next: Vec<f64> = x
        .iter()
        .zip(phi)
        .zip(mbest)
        .zip(q.iter().zip(k))
        .map(|(((xi, f), m), (qi, ki))| {
            let step = beta * (m - xi).abs() * (1.0 / qi).ln();
            if *ki >= 0.5 {
                f + step
            } else {
                f - step
            }
        })
        .collect();
    bounds.clamp(&mut next);
    next
}

/// Uniform draw in (0, 1].
#[inline]
fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

fn evaluate<F>(cost_fn: &F, positions: &[Vec<f64>]) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let costs: Vec<f64> = positions.par_iter().map(|x| cost_fn(x)).collect();
    if let Some(i) = costs.iter().position(|c| !c.is_finite()) {
        return Err(Error::NonFiniteCost {
            cost: costs[i],
            position: positions[i].clone(),
        });
    }
    Ok(costs)
}

/// Minimizes `cost_fn` over `bounds`.
pub fn optimize<F>(
    cost_fn: F,
    config: &SwarmConfig,
    bounds: &Bounds,
    variant: Variant,
    seed: RngSeed,
) -> Result<OptResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    optimize_observed(cost_fn, config, bounds, variant, seed, |_| {})
}

/// [`optimize`] with a callback invoked after initialization (iteration 0)
/// and after every iteration.
pub fn optimize_observed<F, O>(
    cost_fn: F,
    config: &SwarmConfig,
    bounds: &Bounds,
    variant: Variant,
    seed: RngSeed,
    mut observer: O,
) -> Result<OptResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
    O: FnMut(&SwarmState<'_>),
{
    config.validate()?;
    let dims = bounds.dims();
    if dims == 0 {
        return Err(Error::InvalidConfig("search space has no dimensions".into()));
    }
    let mut rng = seed.rng();
    let n = config.swarm_size;

    let initial: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            bounds
                .lower
                .iter()
                .zip(&bounds.upper)
                .map(|(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
                .collect()
        })
        .collect();
    let costs = evaluate(&cost_fn, &initial)?;
    let mut evaluations = n;
    let mut particles: Vec<Particle> = initial
        .into_iter()
        .zip(costs)
        .map(|(x, c)| Particle::new(x, c))
        .collect();

    let mut best = 0;
    for (i, p) in particles.iter().enumerate() {
        if p.pbest_cost < particles[best].pbest_cost {
            best = i;
        }
    }
    let mut gbest_position = particles[best].pbest_position.clone();
    let mut gbest_cost = particles[best].pbest_cost;
    let mut cost_trace = vec![gbest_cost];
    observer(&SwarmState {
        iteration: 0,
        particles: &particles,
        mbest: None,
        gbest_position: &gbest_position,
        gbest_cost,
    });

    let mut terminated_by = Termination::MaxIter;
    let mut iterations_run = 0;
    let mut draws = vec![0.0; n * dims * 3];

    for t in 0..config.max_iter {
        let mbest = match variant {
            Variant::Qpso => Some(compute_mbest(&particles)),
            Variant::Pso => None,
        };
        let per_dim = match variant {
            Variant::Pso => 2,
            Variant::Qpso => 3,
        };
        let draws = &mut draws[..n * dims * per_dim];
        for slot in draws.chunks_exact_mut(per_dim) {
            match variant {
                Variant::Pso => {
                    slot[0] = rng.random();
                    slot[1] = rng.random();
                }
                Variant::Qpso => {
                    slot[0] = rng.random();
                    slot[1] = open_unit(&mut rng);
                    slot[2] = rng.random();
                }
            }
        }

        let positions: Vec<Vec<f64>> = match variant {
            Variant::Pso => {
                let omega = omega_schedule(t, config.max_iter, config.omega_start, config.omega_end);
                particles
                    .iter_mut()
                    .zip(draws.chunks_exact(dims * 2))
                    .map(|(p, d)| {
                        let r1: Vec<f64> = d.iter().step_by(2).copied().collect();
                        let r2: Vec<f64> = d.iter().skip(1).step_by(2).copied().collect();
                        p.velocity = pso_velocity_update(p, &gbest_position, omega, config.c1, config.c2, &r1, &r2);
                        pso_position_update(&p.position, &p.velocity, bounds)
                    })
                    .collect()
            }
            Variant::Qpso => {
                let beta = beta_schedule_between(t, config.max_iter, config.beta_start, config.beta_end);
                let mbest = mbest.as_deref().expect("computed for QPSO");
                particles
                    .iter()
                    .zip(draws.chunks_exact(dims * 3))
                    .map(|(p, d)| {
                        let theta: Vec<f64> = d.iter().step_by(3).copied().collect();
                        let q: Vec<f64> = d.iter().skip(1).step_by(3).copied().collect();
                        let k: Vec<f64> = d.iter().skip(2).step_by(3).copied().collect();
                        let phi = local_attractor(&p.pbest_position, &gbest_position, &theta);
                        qpso_position_update(&p.position, &phi, mbest, beta, &q, &k, bounds)
                    })
                    .collect()
            }
        };

        let costs = evaluate(&cost_fn, &positions)?;
        evaluations += n;
        for ((p, x), c) in particles.iter_mut().zip(positions).zip(costs) {
            greedy_pbest_update(p, x, c);
        }
        for p in &particles {
            if p.pbest_cost < gbest_cost {
                gbest_cost = p.pbest_cost;
                gbest_position.clone_from(&p.pbest_position);
            }
        }
        cost_trace.push(gbest_cost);
        iterations_run = t + 1;
        observer(&SwarmState {
            iteration: iterations_run,
            particles: &particles,
            mbest: mbest.as_deref(),
            gbest_position: &gbest_position,
            gbest_cost,
        });

        let window = config.stagnation_window;
        if iterations_run >= window && iterations_run < config.max_iter {
            let before = cost_trace[iterations_run - window];
            if before - gbest_cost < config.stagnation_tol {
                terminated_by = Termination::Stagnation;
                break;
            }
        }
    }

    Ok(OptResult {
        gbest_position,
        gbest_cost,
        cost_trace,
        iterations_run,
        terminated_by,
        evaluations,
    })
}
