//! Particle swarm minimization over a box.
//!
//! Velocity update per particle `p` and step `t`:
//! `V <- r V + c_cog u1 * (pbest_p - x_p) + c_soc u2 * (gbest - x_p)` with
//! `u1 ~ U[0, xi1]^d`, `u2 ~ U[0, xi2]^d` drawn fresh per particle and step,
//! followed by `x_p <- x_p + V`. Positions leaving the box are clamped to it
//! and the velocity of every clamped coordinate is zeroed.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng;

const INIT_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq)]
pub enum Bounds {
    /// The same `[low, high]` interval on every coordinate.
    Uniform { low: f64, high: f64 },
    PerCoordinate(Vec<(f64, f64)>),
}

impl Bounds {
    pub fn resolve(&self, dim: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let pairs: Vec<(f64, f64)> = match self {
            Bounds::Uniform { low, high } => vec![(*low, *high); dim],
            Bounds::PerCoordinate(v) => {
                if v.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: v.len(),
                    });
                }
                v.clone()
            }
        };
        if pairs.iter().any(|(l, h)| !(l < h) || !l.is_finite() || !h.is_finite()) {
            return Err(Error::invalid("every bound must satisfy low < high and be finite"));
        }
        Ok(pairs.into_iter().unzip())
    }
}

/// Region the initial positions are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitRegion {
    /// `U[0, 1]^d` intersected with the bounds (falls back to the bounds
    /// when the intersection is empty).
    #[default]
    UnitCube,
    /// Uniform over the whole bounds box.
    Bounds,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoConfig {
    pub n_particles: usize,
    /// Weight `r` on the previous velocity.
    pub inertia: f64,
    pub c_cognitive: f64,
    pub c_social: f64,
    /// Upper end of the uniform cognitive acceleration coefficient.
    pub xi1: f64,
    /// Upper end of the uniform social acceleration coefficient.
    pub xi2: f64,
    pub n_iterations: usize,
    pub bounds: Bounds,
    pub init: InitRegion,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            n_particles: 20,
            inertia: 0.7,
            c_cognitive: 1.0,
            c_social: 1.0,
            xi1: 2.0,
            xi2: 2.0,
            n_iterations: 100,
            bounds: Bounds::Uniform {
                low: f64::MIN / 4.0,
                high: f64::MAX / 4.0,
            },
            init: InitRegion::UnitCube,
            seed: 0,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 {
            return Err(Error::invalid("swarm needs at least one particle"));
        }
        let nonneg = [self.c_cognitive, self.c_social, self.xi1, self.xi2];
        if nonneg.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::invalid("acceleration constants must be finite and nonnegative"));
        }
        if !(0.0..=1.0).contains(&self.inertia) {
            return Err(Error::invalid("inertia must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    pub pbest_positions: Vec<Vec<f64>>,
    /// `+inf` until a particle has been evaluated.
    pub pbest_losses: Vec<f64>,
    pub gbest_position: Vec<f64>,
    pub gbest_loss: f64,
    pub iteration: u64,
    pub low: Vec<f64>,
    pub high: Vec<f64>,
}

impl SwarmState {
    pub fn dim(&self) -> usize {
        self.low.len()
    }

    fn refresh_gbest(&mut self) {
        let mut best = 0;
        for (p, &l) in self.pbest_losses.iter().enumerate() {
            if l < self.pbest_losses[best] {
                best = p;
            }
        }
        self.gbest_loss = self.pbest_losses[best];
        self.gbest_position = self.pbest_positions[best].clone();
    }

    /// Replace the personal-best losses (e.g. after the loss function itself
    /// changed) and recompute the global best from them.
    pub fn rescore(&mut self, pbest_losses: &[f64]) -> Result<()> {
        check_losses(pbest_losses, self.positions.len())?;
        self.pbest_losses = pbest_losses.to_vec();
        self.refresh_gbest();
        Ok(())
    }
}

fn check_losses(losses: &[f64], n: usize) -> Result<()> {
    if losses.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: losses.len(),
        });
    }
    // +inf marks a failed evaluation; NaN and -inf are rejected
    match losses.iter().position(|l| l.is_nan() || *l == f64::NEG_INFINITY) {
        Some(particle) => Err(Error::NonFiniteLoss { particle }),
        None => Ok(()),
    }
}

pub fn init_swarm(cfg: &PsoConfig, dim: usize) -> Result<SwarmState> {
    if dim == 0 {
        return Err(Error::invalid("search dimension must be at least 1"));
    }
    cfg.validate()?;
    let (low, high) = cfg.bounds.resolve(dim)?;
    let (init_low, init_high): (Vec<f64>, Vec<f64>) = match cfg.init {
        InitRegion::Bounds => (low.clone(), high.clone()),
        InitRegion::UnitCube => low
            .iter()
            .zip(&high)
            .map(|(&l, &h)| {
                let (a, b) = (l.max(0.0), h.min(1.0));
                if a < b {
                    (a, b)
                } else {
                    (l, h)
                }
            })
            .unzip(),
    };
    let positions: Vec<Vec<f64>> = (0..cfg.n_particles)
        .map(|p| {
            let mut g = rng::substream(cfg.seed, &[INIT_STREAM, p as u64]);
            init_low
                .iter()
                .zip(&init_high)
                .map(|(&l, &h)| g.random_range(l..h))
                .collect()
        })
        .collect();
    Ok(SwarmState {
        velocities: vec![vec![0.0; dim]; cfg.n_particles],
        pbest_positions: positions.clone(),
        pbest_losses: vec![f64::INFINITY; cfg.n_particles],
        gbest_position: positions[0].clone(),
        gbest_loss: f64::INFINITY,
        positions,
        iteration: 0,
        low,
        high,
    })
}

/// Absorb `losses` (evaluated at the current positions) into the personal and
/// global bests, then move every particle.
pub fn pso_step(state: &mut SwarmState, losses: &[f64], cfg: &PsoConfig) -> Result<()> {
    check_losses(losses, state.positions.len())?;
    for (p, &l) in losses.iter().enumerate() {
        if l < state.pbest_losses[p] {
            state.pbest_losses[p] = l;
            state.pbest_positions[p] = state.positions[p].clone();
        }
    }
    let mut best = None;
    for (p, &l) in state.pbest_losses.iter().enumerate() {
        if l < best.map_or(state.gbest_loss, |(_, b)| b) {
            best = Some((p, l));
        }
    }
    if let Some((p, l)) = best {
        state.gbest_loss = l;
        state.gbest_position = state.pbest_positions[p].clone();
    }

    let dim = state.dim();
    for p in 0..state.positions.len() {
        let mut g = rng::substream(cfg.seed, &[state.iteration, p as u64]);
        for i in 0..dim {
            let u1 = g.random::<f64>() * cfg.xi1;
            let u2 = g.random::<f64>() * cfg.xi2;
            let x = state.positions[p][i];
            let v = cfg.inertia * state.velocities[p][i]
                + cfg.c_cognitive * u1 * (state.pbest_positions[p][i] - x)
                + cfg.c_social * u2 * (state.gbest_position[i] - x);
            let mut nx = x + v;
            let mut nv = v;
            if nx < state.low[i] {
                nx = state.low[i];
                nv = 0.0;
            } else if nx > state.high[i] {
                nx = state.high[i];
                nv = 0.0;
            }
            state.positions[p][i] = nx;
            state.velocities[p][i] = nv;
        }
    }
    state.iteration += 1;
    Ok(())
}

/// `true` iff every particle moved by at most `eta` (Euclidean norm).
pub fn convergence_check(prev: &[Vec<f64>], next: &[Vec<f64>], eta: f64) -> bool {
    prev.len() == next.len()
        && prev.iter().zip(next).all(|(a, b)| {
            a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt() <= eta
        })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoOutcome {
    pub best_position: Vec<f64>,
    pub best_loss: f64,
    /// Global-best loss after each iteration.
    pub trace: Vec<f64>,
}

/// Run `cfg.n_iterations` evaluate-then-move iterations. Particle losses are
/// evaluated in parallel; the trajectory does not depend on thread count.
pub fn pso_minimize<F>(loss_fn: F, dim: usize, cfg: &PsoConfig) -> Result<PsoOutcome>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut state = init_swarm(cfg, dim)?;
    let mut trace = Vec::with_capacity(cfg.n_iterations);
    for _ in 0..cfg.n_iterations {
        let losses: Vec<f64> = state.positions.par_iter().map(|x| loss_fn(x)).collect();
        pso_step(&mut state, &losses, cfg)?;
        trace.push(state.gbest_loss);
    }
    Ok(PsoOutcome {
        best_position: state.gbest_position,
        best_loss: state.gbest_loss,
        trace,
    })
}

/// Standard optimization test functions.
pub mod benchmarks {
    use std::f64::consts::PI;

    pub fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    pub fn ackley(x: &[f64]) -> f64 {
        let n = x.len() as f64;
        let sq = x.iter().map(|v| v * v).sum::<f64>() / n;
        let cs = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
        -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + std::f64::consts::E
    }
}
