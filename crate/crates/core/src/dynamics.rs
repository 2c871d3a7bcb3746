//! Deterministic RK4 integration of the interacting N-particle gradient
//! flow, with trajectory recording.
//!
//! Each particle follows dθⁱ/dt = b(θⁱ, μ_Θ): the drift couples particles
//! only through the n residuals yⱼ − F(Θ, xⱼ), which are recomputed at every
//! internal stage so all particles see the synchronized empirical measure.
//! Stages work in the unwrapped local chart (the drift is 2π-periodic, so
//! the chart is immaterial); coordinates are wrapped back onto the torus
//! after the full step.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experts::{self, Dataset, ExpertModel};
use crate::torus::{sample_uniform, StreamRng, TorusPoint};
use crate::util::ordered_mean;

/// The vector Θ = (θ¹, …, θᴺ) of expert parameters at a point in time.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSystem {
    particles: Vec<TorusPoint>,
    time: f64,
}

impl ParticleSystem {
    pub fn new(particles: Vec<TorusPoint>) -> Result<Self> {
        Self::at_time(particles, 0.0)
    }

    pub fn at_time(particles: Vec<TorusPoint>, time: f64) -> Result<Self> {
        if particles.is_empty() {
            return Err(Error::InvalidInput("particle system must be non-empty".into()));
        }
        let d = particles[0].dim();
        for p in &particles {
            if p.dim() != d {
                return Err(Error::DimensionMismatch { left: p.dim(), right: d });
            }
        }
        if !(time >= 0.0) {
            return Err(Error::InvalidInput("time must be non-negative".into()));
        }
        Ok(Self { particles, time })
    }

    /// N i.i.d. uniform particles, one derived sub-stream per particle.
    ///
    /// Particle i depends only on `(parent, i)`, so the first N particles of
    /// a size-M draw coincide with a size-N draw from the same parent. The
    /// coupled reference construction relies on this nesting.
    pub fn sample(parent: &StreamRng, n: usize, d: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("particle count must be at least 1".into()));
        }
        let particles = (0..n)
            .map(|i| sample_uniform(&mut parent.derive(i as u64), d))
            .collect::<Result<Vec<_>>>()?;
        Self::new(particles)
    }

    pub fn n(&self) -> usize {
        self.particles.len()
    }

    pub fn dim(&self) -> usize {
        self.particles[0].dim()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn particles(&self) -> &[TorusPoint] {
        &self.particles
    }

    /// Reorders particles by `perm[i] = old index of new particle i`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n() {
            return Err(Error::DimensionMismatch { left: perm.len(), right: self.n() });
        }
        let mut seen = vec![false; self.n()];
        let mut particles = Vec::with_capacity(self.n());
        for &i in perm {
            if i >= self.n() || seen[i] {
                return Err(Error::InvalidInput("not a permutation".into()));
            }
            seen[i] = true;
            particles.push(self.particles[i].clone());
        }
        Self::at_time(particles, self.time)
    }

    fn to_raw(&self) -> Vec<Vec<f64>> {
        self.particles.iter().map(|p| p.coords().to_vec()).collect()
    }
}

/// Uniform atomic measure μ_Θ = (1/N) Σ δ_θⁱ. Duplicate atoms are kept:
/// the measure is a multiset.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    atoms: Vec<TorusPoint>,
}

impl EmpiricalMeasure {
    pub fn new(atoms: Vec<TorusPoint>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidInput("empirical measure needs at least one atom".into()));
        }
        let d = atoms[0].dim();
        for a in &atoms {
            if a.dim() != d {
                return Err(Error::DimensionMismatch { left: a.dim(), right: d });
            }
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[TorusPoint] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].dim()
    }
}

/// The particles as a uniform atomic measure, atoms in particle order.
pub fn empirical_measure(system: &ParticleSystem) -> EmpiricalMeasure {
    EmpiricalMeasure { atoms: system.particles().to_vec() }
}

/// A recorded state along a trajectory.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub t: f64,
    pub system: ParticleSystem,
    pub loss: f64,
}

/// Recorded integration output: checkpoints at t = 0, every `record_every`
/// steps, and the final step.
#[derive(Debug, Clone)]
pub struct Trajectory {
    checkpoints: Vec<Checkpoint>,
    step_size: f64,
    horizon: f64,
}

impl Trajectory {
    pub fn checkpoints(&self) -> &[Checkpoint] {
        &self.checkpoints
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn initial(&self) -> &Checkpoint {
        self.checkpoints.first().expect("trajectory has at least one checkpoint")
    }

    pub fn last(&self) -> &Checkpoint {
        self.checkpoints.last().expect("trajectory has at least one checkpoint")
    }

    /// True when both trajectories share step size and checkpoint times.
    pub fn same_schedule(&self, other: &Self) -> bool {
        self.step_size == other.step_size
            && self.checkpoints.len() == other.checkpoints.len()
            && self
                .checkpoints
                .iter()
                .zip(&other.checkpoints)
                .all(|(a, b)| a.t == b.t)
    }

    /// Trajectory holding only the given state; stands in for a zero-length
    /// integration.
    pub fn frozen(model: &ExpertModel, data: &Dataset, system: ParticleSystem) -> Result<Self> {
        let loss = experts::loss(model, &system, data)?;
        Ok(Self {
            checkpoints: vec![Checkpoint { t: system.time(), system, loss }],
            step_size: 0.0,
            horizon: 0.0,
        })
    }
}

/// Evaluates the drift of every particle against the shared empirical
/// measure: one residual pass, then independent per-particle work.
fn stage_drifts(
    model: &ExpertModel,
    data: &Dataset,
    states: &[Vec<f64>],
    t: f64,
) -> Result<Vec<Vec<f64>>> {
    let residuals = experts::residuals_raw(model, states, data)?;
    let drifts = states
        .par_iter()
        .map(|theta| experts::drift_raw(model, theta, &residuals, data))
        .collect::<Result<Vec<_>>>()?;
    for d in &drifts {
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { t });
        }
    }
    Ok(drifts)
}

fn add_scaled(base: &[Vec<f64>], dirs: &[Vec<f64>], factor: f64) -> Vec<Vec<f64>> {
    base.iter()
        .zip(dirs)
        .map(|(b, d)| b.iter().zip(d).map(|(x, v)| x + factor * v).collect())
        .collect()
}

/// One classical RK4 step of the coupled system.
pub fn step(
    model: &ExpertModel,
    data: &Dataset,
    system: &ParticleSystem,
    h: f64,
) -> Result<ParticleSystem> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput("step size must be positive".into()));
    }
    let t = system.time();
    let y0 = system.to_raw();
    let k1 = stage_drifts(model, data, &y0, t)?;
    let k2 = stage_drifts(model, data, &add_scaled(&y0, &k1, 0.5 * h), t)?;
    let k3 = stage_drifts(model, data, &add_scaled(&y0, &k2, 0.5 * h), t)?;
    let k4 = stage_drifts(model, data, &add_scaled(&y0, &k3, h), t)?;

    let sixth = h / 6.0;
    let particles = y0
        .iter()
        .enumerate()
        .map(|(i, y)| {
            let raw: Vec<f64> = y
                .iter()
                .enumerate()
                .map(|(c, &v)| v + sixth * (k1[i][c] + 2.0 * k2[i][c] + 2.0 * k3[i][c] + k4[i][c]))
                .collect();
            TorusPoint::wrap(&raw)
        })
        .collect::<Result<Vec<_>>>()?;
    ParticleSystem::at_time(particles, t + h)
}

/// Integrates from `init` to the horizon with fixed steps, recording the
/// initial state, every `record_every`-th step, and the final step.
///
/// The step count is `round(T / h)`, so the final time matches the horizon
/// within h/2.
pub fn integrate(
    model: &ExpertModel,
    data: &Dataset,
    init: &ParticleSystem,
    horizon: f64,
    h: f64,
    record_every: usize,
) -> Result<Trajectory> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput("step size must be positive".into()));
    }
    if !(horizon > 0.0) {
        return Err(Error::InvalidInput("horizon must be positive".into()));
    }
    if h > horizon {
        return Err(Error::InvalidInput("step size must not exceed the horizon".into()));
    }
    if record_every == 0 {
        return Err(Error::InvalidInput("record_every must be at least 1".into()));
    }
    let steps = (horizon / h).round().max(1.0) as usize;

    let mut checkpoints = Vec::with_capacity(steps / record_every + 2);
    let initial_loss = experts::loss(model, init, data)?;
    checkpoints.push(Checkpoint { t: init.time(), system: init.clone(), loss: initial_loss });

    let mut current = init.clone();
    let mut last_loss = initial_loss;
    let descent_tol = 1e-9 * (1.0 + initial_loss);
    for s in 1..=steps {
        current = step(model, data, &current, h)?;
        if s % record_every == 0 || s == steps {
            let loss = experts::loss(model, &current, data)?;
            if loss > last_loss + descent_tol * record_every as f64 {
                log::warn!(
                    "loss increased from {last_loss} to {loss} at t = {}; step size too large?",
                    current.time()
                );
            }
            last_loss = loss;
            checkpoints.push(Checkpoint { t: current.time(), system: current.clone(), loss });
        }
    }
    Ok(Trajectory { checkpoints, step_size: h, horizon })
}

#[derive(Serialize)]
struct SummaryStats {
    circular_mean: Vec<f64>,
    resultant_length: Vec<f64>,
}

#[derive(Serialize)]
struct TrajectoryRecord<'a> {
    t: f64,
    loss: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    particles: Option<Vec<&'a [f64]>>,
    summary: SummaryStats,
}

fn summary_stats(system: &ParticleSystem) -> SummaryStats {
    let d = system.dim();
    let mut circular_mean = Vec::with_capacity(d);
    let mut resultant_length = Vec::with_capacity(d);
    for c in 0..d {
        let cos: Vec<f64> = system.particles().iter().map(|p| p.coords()[c].cos()).collect();
        let sin: Vec<f64> = system.particles().iter().map(|p| p.coords()[c].sin()).collect();
        let mc = ordered_mean(&cos);
        let ms = ordered_mean(&sin);
        circular_mean.push(crate::torus::wrap_angle(ms.atan2(mc)));
        resultant_length.push((mc * mc + ms * ms).sqrt());
    }
    SummaryStats { circular_mean, resultant_length }
}

/// Writes one JSON record per checkpoint: `{t, loss, particles?, summary}`
/// with a fixed field order. Particle coordinates are included only when
/// `include_particles` is set.
pub fn write_trajectory_jsonl(
    trajectory: &Trajectory,
    path: &Path,
    include_particles: bool,
) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for cp in trajectory.checkpoints() {
        let record = TrajectoryRecord {
            t: cp.t,
            loss: cp.loss,
            particles: include_particles
                .then(|| cp.system.particles().iter().map(|p| p.coords()).collect()),
            summary: summary_stats(&cp.system),
        };
        serde_json::to_writer(&mut out, &record)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
