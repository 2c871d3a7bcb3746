//! Expert models, training data, the uniform mixture, the quadratic loss,
//! and the mean-field drift that couples the particles.
//!
//! Two expert realizations share one abstraction: a Fourier wave
//! `f(θ,x) = cos(⟨k(x),θ⟩ + φ(x))` with integer frequencies in {-1,0,1}, and
//! a parametric quantum circuit. Both are 2π-periodic in every parameter,
//! bounded by 1, and carry derivative bounds α = β = 1, so a single Lipschitz
//! constant serves either kind.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::ParticleSystem;
use crate::error::{Error, Result};
use crate::qsim::CircuitSpec;
use crate::torus::{sample_uniform, StreamRng, TorusPoint};
use crate::util::{ordered_mean, splitmix64};

/// How a Fourier expert maps an input to its frequency vector and phase.
#[derive(Debug, Clone)]
pub enum FourierMap {
    /// One wave shared by every input.
    Fixed { freqs: Vec<i8>, phase: f64 },
    /// Frequencies in {-1,0,1}^d and a phase derived from a hash of the
    /// input features, so distinct inputs get distinct waves.
    Hashed { seed: u64 },
}

/// Expert `f(θ,x) = cos(⟨k(x),θ⟩ + φ(x))` with k(x) ∈ {-1,0,1}^d.
///
/// Integer frequencies make f 2π-periodic in each component; restricting
/// them to {-1,0,1} keeps |∂f| ≤ 1 and |∂²f| ≤ 1.
#[derive(Debug, Clone)]
pub struct FourierExpert {
    dim: usize,
    map: FourierMap,
}

impl FourierExpert {
    pub fn fixed(freqs: Vec<i8>, phase: f64) -> Result<Self> {
        if freqs.is_empty() {
            return Err(Error::InvalidInput("frequency vector must be non-empty".into()));
        }
        if freqs.iter().any(|k| !(-1..=1).contains(k)) {
            return Err(Error::InvalidInput("frequencies must lie in {-1,0,1}".into()));
        }
        let dim = freqs.len();
        Ok(Self { dim, map: FourierMap::Fixed { freqs, phase } })
    }

    pub fn hashed(dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("parameter dimension must be at least 1".into()));
        }
        Ok(Self { dim, map: FourierMap::Hashed { seed } })
    }

    fn wave(&self, x: &[f64]) -> (Vec<f64>, f64) {
        match &self.map {
            FourierMap::Fixed { freqs, phase } => {
                (freqs.iter().map(|&k| k as f64).collect(), *phase)
            }
            FourierMap::Hashed { seed } => {
                let mut acc = *seed ^ 0xa076_1d64_78bd_642f;
                for &v in x {
                    acc = splitmix64(acc ^ v.to_bits());
                }
                let mut rng = StreamRng::new(*seed, acc);
                let freqs = (0..self.dim).map(|_| rng.gen_range(-1..=1) as f64).collect();
                let phase = rng.gen::<f64>() * TAU;
                (freqs, phase)
            }
        }
    }

    fn eval_raw(&self, theta: &[f64], x: &[f64]) -> f64 {
        let (freqs, phase) = self.wave(x);
        let arg: f64 = freqs.iter().zip(theta).map(|(k, t)| k * t).sum::<f64>() + phase;
        arg.cos()
    }

    fn grad_raw(&self, theta: &[f64], x: &[f64]) -> Vec<f64> {
        let (freqs, phase) = self.wave(x);
        let arg: f64 = freqs.iter().zip(theta).map(|(k, t)| k * t).sum::<f64>() + phase;
        let s = arg.sin();
        freqs.iter().map(|k| -s * k).collect()
    }
}

/// Expert realized by a parametric quantum circuit.
#[derive(Debug, Clone)]
pub struct QuantumExpert {
    spec: CircuitSpec,
}

impl QuantumExpert {
    pub fn new(spec: CircuitSpec) -> Self {
        Self { spec }
    }

    pub fn spec(&self) -> &CircuitSpec {
        &self.spec
    }
}

#[derive(Debug, Clone)]
pub enum ExpertKind {
    Fourier(FourierExpert),
    Quantum(QuantumExpert),
}

/// An expert model with its declared derivative bounds.
///
/// `alpha` bounds every |∂f/∂θᵢ| and `beta` every |∂²f/∂θᵢ∂θⱼ|; both default
/// to 1 for the built-in kinds and are spot-checked by
/// [`verify_assumption1`](ExpertModel::verify_assumption1).
#[derive(Debug, Clone)]
pub struct ExpertModel {
    kind: ExpertKind,
    alpha: f64,
    beta: f64,
}

impl ExpertModel {
    pub fn fourier(expert: FourierExpert) -> Self {
        Self { kind: ExpertKind::Fourier(expert), alpha: 1.0, beta: 1.0 }
    }

    pub fn quantum(expert: QuantumExpert) -> Self {
        Self { kind: ExpertKind::Quantum(expert), alpha: 1.0, beta: 1.0 }
    }

    /// Overrides the declared bounds. Meant for falsification tests; the
    /// built-in kinds are correct with the default α = β = 1.
    pub fn with_declared_bounds(mut self, alpha: f64, beta: f64) -> Self {
        self.alpha = alpha;
        self.beta = beta;
        self
    }

    pub fn kind(&self) -> &ExpertKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            ExpertKind::Fourier(_) => "fourier",
            ExpertKind::Quantum(_) => "quantum",
        }
    }

    /// Parameter dimension d.
    pub fn dim(&self) -> usize {
        match &self.kind {
            ExpertKind::Fourier(f) => f.dim,
            ExpertKind::Quantum(q) => q.spec.depth(),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Natural feature count for synthetic sampling.
    pub fn feature_dim_hint(&self) -> usize {
        match &self.kind {
            ExpertKind::Fourier(f) => match f.map {
                FourierMap::Fixed { .. } => 1,
                FourierMap::Hashed { .. } => f.dim,
            },
            ExpertKind::Quantum(q) => q.spec.qubits(),
        }
    }

    /// A short human-readable payload description, used in provenance
    /// records.
    pub fn descriptor(&self) -> String {
        match &self.kind {
            ExpertKind::Fourier(f) => match &f.map {
                FourierMap::Fixed { freqs, phase } => {
                    let mut s = String::from("fourier-fixed k=[");
                    for (i, k) in freqs.iter().enumerate() {
                        if i > 0 {
                            s.push(',');
                        }
                        let _ = write!(s, "{k}");
                    }
                    let _ = write!(s, "] phase={phase}");
                    s
                }
                FourierMap::Hashed { seed } => format!("fourier-hashed seed={seed}"),
            },
            ExpertKind::Quantum(q) => {
                format!(
                    "quantum {}",
                    q.spec.to_config_string().unwrap_or_default().replace('\n', "; ")
                )
            }
        }
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.dim() {
            return Err(Error::DimensionMismatch { left: theta.len(), right: self.dim() });
        }
        Ok(())
    }

    /// f(θ, x) ∈ [-1, 1].
    pub fn eval(&self, theta: &TorusPoint, x: &[f64]) -> Result<f64> {
        self.eval_raw(theta.coords(), x)
    }

    /// As [`eval`](Self::eval) on raw angles; f is 2π-periodic, so integrator
    /// stages may pass unwrapped coordinates.
    pub fn eval_raw(&self, theta: &[f64], x: &[f64]) -> Result<f64> {
        self.check_theta(theta)?;
        match &self.kind {
            ExpertKind::Fourier(f) => Ok(f.eval_raw(theta, x)),
            ExpertKind::Quantum(q) => q.spec.evaluate_raw(theta, x),
        }
    }

    /// ∇_θ f(θ, x); exact for both kinds.
    pub fn grad(&self, theta: &TorusPoint, x: &[f64]) -> Result<Vec<f64>> {
        self.grad_raw(theta.coords(), x)
    }

    pub fn grad_raw(&self, theta: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        self.check_theta(theta)?;
        match &self.kind {
            ExpertKind::Fourier(f) => Ok(f.grad_raw(theta, x)),
            ExpertKind::Quantum(q) => q.spec.gradient_adjoint_raw(theta, x),
        }
    }

    /// Second derivative ∂ᵢ∂ⱼ f. Exact shifts for the quantum kind; central
    /// finite differences of the gradient for the Fourier kind.
    pub fn hessian_entry(&self, theta: &TorusPoint, x: &[f64], i: usize, j: usize) -> Result<f64> {
        self.check_theta(theta.coords())?;
        let d = self.dim();
        if i >= d {
            return Err(Error::ParameterOutOfRange { index: i, count: d });
        }
        if j >= d {
            return Err(Error::ParameterOutOfRange { index: j, count: d });
        }
        match &self.kind {
            ExpertKind::Quantum(q) => q.spec.hessian_entry_raw(theta.coords(), x, i, j),
            ExpertKind::Fourier(f) => {
                let h = 1e-5;
                let mut plus = theta.coords().to_vec();
                let mut minus = plus.clone();
                plus[j] += h;
                minus[j] -= h;
                let gp = f.grad_raw(&plus, x);
                let gm = f.grad_raw(&minus, x);
                Ok((gp[i] - gm[i]) / (2.0 * h))
            }
        }
    }

    /// Samples random (θ, x) pairs and reports the worst observed values of
    /// |f|, |∂f| and |∂²f| against the declared bounds.
    pub fn verify_assumption1(&self, rng: &mut StreamRng, trials: usize) -> Result<BoundsReport> {
        if trials == 0 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        let d = self.dim();
        let p = self.feature_dim_hint();
        let mut report = BoundsReport::new(self.alpha, self.beta, trials);
        for _ in 0..trials {
            let theta = sample_uniform(rng, d)?;
            let x: Vec<f64> = (0..p).map(|_| rng.gen::<f64>() * TAU).collect();
            let f = self.eval(&theta, &x)?;
            report.observe_f(f, &theta);
            let grad = self.grad(&theta, &x)?;
            for g in &grad {
                report.observe_grad(*g, &theta);
            }
            for i in 0..d {
                for j in i..d {
                    let h = self.hessian_entry(&theta, &x, i, j)?;
                    report.observe_hess(h, &theta);
                }
            }
        }
        Ok(report)
    }
}

/// Worst observed values from [`ExpertModel::verify_assumption1`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsReport {
    pub trials: usize,
    pub alpha: f64,
    pub beta: f64,
    pub max_f: f64,
    pub max_grad: f64,
    pub max_hess: f64,
    pub witness_f: Vec<f64>,
    pub witness_grad: Vec<f64>,
    pub witness_hess: Vec<f64>,
    pub f_ok: bool,
    pub grad_ok: bool,
    pub hess_ok: bool,
}

/// Slack for finite-difference Hessian estimates in bound checks.
pub const HESS_CHECK_TOL: f64 = 1e-6;

impl BoundsReport {
    fn new(alpha: f64, beta: f64, trials: usize) -> Self {
        Self {
            trials,
            alpha,
            beta,
            max_f: 0.0,
            max_grad: 0.0,
            max_hess: 0.0,
            witness_f: Vec::new(),
            witness_grad: Vec::new(),
            witness_hess: Vec::new(),
            f_ok: true,
            grad_ok: true,
            hess_ok: true,
        }
    }

    fn observe_f(&mut self, f: f64, theta: &TorusPoint) {
        if f.abs() > self.max_f {
            self.max_f = f.abs();
            self.witness_f = theta.coords().to_vec();
        }
        self.f_ok = self.max_f <= 1.0 + 1e-12;
    }

    fn observe_grad(&mut self, g: f64, theta: &TorusPoint) {
        if g.abs() > self.max_grad {
            self.max_grad = g.abs();
            self.witness_grad = theta.coords().to_vec();
        }
        self.grad_ok = self.max_grad <= self.alpha + 1e-12;
    }

    fn observe_hess(&mut self, h: f64, theta: &TorusPoint) {
        if h.abs() > self.max_hess {
            self.max_hess = h.abs();
            self.witness_hess = theta.coords().to_vec();
        }
        self.hess_ok = self.max_hess <= self.beta + HESS_CHECK_TOL;
    }

    pub fn all_ok(&self) -> bool {
        self.f_ok && self.grad_ok && self.hess_ok
    }
}

/// Training pairs with the recomputed label bound A = max |yⱼ|.
#[derive(Debug, Clone)]
pub struct Dataset {
    inputs: Vec<Vec<f64>>,
    labels: Vec<f64>,
    label_bound: f64,
}

impl Dataset {
    /// The label bound is always recomputed from the labels, never taken
    /// from the caller.
    pub fn new(inputs: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::InvalidInput("dataset must contain at least one pair".into()));
        }
        if inputs.len() != labels.len() {
            return Err(Error::DimensionMismatch { left: inputs.len(), right: labels.len() });
        }
        let p = inputs[0].len();
        if p == 0 {
            return Err(Error::InvalidInput("feature vectors must be non-empty".into()));
        }
        for (j, x) in inputs.iter().enumerate() {
            if x.len() != p {
                return Err(Error::DimensionMismatch { left: x.len(), right: p });
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteCoordinate(j));
            }
        }
        if labels.iter().any(|y| !y.is_finite()) {
            return Err(Error::InvalidInput("labels must be finite".into()));
        }
        let label_bound = labels.iter().fold(0.0f64, |a, y| a.max(y.abs()));
        Ok(Self { inputs, labels, label_bound })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.inputs[0].len()
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// A = max |yⱼ|.
    pub fn label_bound(&self) -> f64 {
        self.label_bound
    }

    /// Reads `x_1..x_p,y` rows; the header is required.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
        let headers = reader.headers()?.clone();
        let cols = headers.len();
        if cols < 2 || headers.get(cols - 1) != Some("y") {
            return Err(Error::InvalidInput(format!(
                "dataset csv must end with a `y` column, got header {headers:?}"
            )));
        }
        for (i, name) in headers.iter().take(cols - 1).enumerate() {
            let expected = format!("x_{}", i + 1);
            if name != expected {
                return Err(Error::InvalidInput(format!(
                    "dataset csv column {i} must be named {expected}, got {name:?}"
                )));
            }
        }
        let mut inputs = Vec::new();
        let mut labels = Vec::new();
        for record in reader.records() {
            let record = record?;
            let mut row: Vec<f64> = Vec::with_capacity(cols);
            for field in record.iter() {
                row.push(field.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidInput(format!("unparseable number {field:?} in dataset csv"))
                })?);
            }
            if row.len() != cols {
                return Err(Error::InvalidInput("ragged dataset csv row".into()));
            }
            labels.push(row.pop().expect("row has a label column"));
            inputs.push(row);
        }
        Self::new(inputs, labels)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut writer = csv::Writer::from_path(path)?;
        let mut header: Vec<String> = (1..=self.feature_dim()).map(|i| format!("x_{i}")).collect();
        header.push("y".into());
        writer.write_record(&header)?;
        for (x, y) in self.inputs.iter().zip(&self.labels) {
            let mut row: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            row.push(y.to_string());
            writer.write_record(&row)?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Label generation mode for synthetic datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelMode {
    /// Labels come from a frozen teacher mixture, so a teacher-initialized
    /// run starts exactly at a stationary point.
    Teacher,
    /// Labels uniform in [-A, A].
    Uniform,
}

fn default_feature_levels() -> usize {
    8
}

fn default_teacher_experts() -> usize {
    4
}

fn default_label_bound() -> f64 {
    1.0
}

/// Synthetic dataset description. Features are drawn from the finite grid
/// {2πk/levels : k = 0..levels-1}.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub size: usize,
    pub features: usize,
    #[serde(default = "default_feature_levels")]
    pub feature_levels: usize,
    pub labels: LabelMode,
    #[serde(default = "default_teacher_experts")]
    pub teacher_experts: usize,
    #[serde(default = "default_label_bound")]
    pub label_bound: f64,
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::Config("dataset.size: must be at least 1".into()));
        }
        if self.features == 0 {
            return Err(Error::Config("dataset.features: must be at least 1".into()));
        }
        if self.feature_levels == 0 {
            return Err(Error::Config("dataset.feature_levels: must be at least 1".into()));
        }
        match self.labels {
            LabelMode::Teacher if self.teacher_experts == 0 => {
                Err(Error::Config("dataset.teacher_experts: must be at least 1".into()))
            }
            LabelMode::Uniform if !(self.label_bound > 0.0) => {
                Err(Error::Config("dataset.label_bound: must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Provenance record emitted next to generated datasets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetProvenance {
    pub mode: LabelMode,
    pub seed: u64,
    pub stream: u64,
    pub feature_levels: usize,
    pub expert: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub teacher_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub teacher_particles: Option<Vec<Vec<f64>>>,
}

impl DatasetProvenance {
    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Generates a synthetic dataset; the teacher mode freezes a mixture of the
/// given model kind and labels every input with its output. The teacher
/// particles are recorded in the provenance so callers can rebuild
/// stationary initializations.
pub fn generate_dataset(
    spec: &DatasetSpec,
    model: &ExpertModel,
    parent: &StreamRng,
) -> Result<(Dataset, DatasetProvenance)> {
    spec.validate()?;
    let mut feature_rng = parent.derive(0);
    let mut label_rng = parent.derive(1);
    let teacher_rng = parent.derive(2);

    let inputs: Vec<Vec<f64>> = (0..spec.size)
        .map(|_| {
            (0..spec.features)
                .map(|_| {
                    let level = feature_rng.gen_range(0..spec.feature_levels);
                    TAU * level as f64 / spec.feature_levels as f64
                })
                .collect()
        })
        .collect();

    let mut provenance = DatasetProvenance {
        mode: spec.labels,
        seed: parent.seed(),
        stream: parent.stream(),
        feature_levels: spec.feature_levels,
        expert: model.descriptor(),
        label_bound: None,
        teacher_size: None,
        teacher_particles: None,
    };

    let labels: Vec<f64> = match spec.labels {
        LabelMode::Uniform => {
            provenance.label_bound = Some(spec.label_bound);
            (0..spec.size)
                .map(|_| (2.0 * label_rng.gen::<f64>() - 1.0) * spec.label_bound)
                .collect()
        }
        LabelMode::Teacher => {
            let teacher = ParticleSystem::sample(&teacher_rng, spec.teacher_experts, model.dim())?;
            provenance.teacher_size = Some(spec.teacher_experts);
            provenance.teacher_particles =
                Some(teacher.particles().iter().map(|p| p.coords().to_vec()).collect());
            inputs
                .iter()
                .map(|x| mixture_eval(model, &teacher, x))
                .collect::<Result<Vec<f64>>>()?
        }
    };

    Ok((Dataset::new(inputs, labels)?, provenance))
}

/// F(Θ, x): the uniform mixture of the experts' outputs.
///
/// The particle sum uses a canonical ordering, so the value is exactly
/// invariant under particle permutations.
pub fn mixture_eval(model: &ExpertModel, system: &ParticleSystem, x: &[f64]) -> Result<f64> {
    let values = system
        .particles()
        .iter()
        .map(|p| model.eval(p, x))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ordered_mean(&values))
}

fn mixture_eval_raw(model: &ExpertModel, states: &[Vec<f64>], x: &[f64]) -> Result<f64> {
    let values = states
        .par_iter()
        .map(|theta| model.eval_raw(theta, x))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ordered_mean(&values))
}

/// Residuals yⱼ − F(Θ, xⱼ), the n scalars through which particles couple.
///
/// Computed once per drift evaluation: the whole stage then costs O(N·n)
/// expert evaluations instead of the naive O(N²·n).
pub fn residuals(model: &ExpertModel, system: &ParticleSystem, data: &Dataset) -> Result<Vec<f64>> {
    data.inputs()
        .iter()
        .zip(data.labels())
        .map(|(x, y)| Ok(y - mixture_eval(model, system, x)?))
        .collect()
}

pub(crate) fn residuals_raw(
    model: &ExpertModel,
    states: &[Vec<f64>],
    data: &Dataset,
) -> Result<Vec<f64>> {
    data.inputs()
        .iter()
        .zip(data.labels())
        .map(|(x, y)| Ok(y - mixture_eval_raw(model, states, x)?))
        .collect()
}

/// ℒ(Θ) = ½ Σⱼ (F(Θ,xⱼ) − yⱼ)².
pub fn loss(model: &ExpertModel, system: &ParticleSystem, data: &Dataset) -> Result<f64> {
    let r = residuals(model, system, data)?;
    Ok(0.5 * r.iter().map(|v| v * v).sum::<f64>())
}

pub(crate) fn loss_raw(model: &ExpertModel, states: &[Vec<f64>], data: &Dataset) -> Result<f64> {
    let r = residuals_raw(model, states, data)?;
    Ok(0.5 * r.iter().map(|v| v * v).sum::<f64>())
}

/// Mean-field drift b(θ, μ_Θ) = Σⱼ ∇f(θ,xⱼ)·(yⱼ − F(Θ,xⱼ)) for one particle,
/// with the residuals precomputed by [`residuals`].
pub fn drift(
    model: &ExpertModel,
    theta: &TorusPoint,
    residuals: &[f64],
    data: &Dataset,
) -> Result<Vec<f64>> {
    drift_raw(model, theta.coords(), residuals, data)
}

pub fn drift_raw(
    model: &ExpertModel,
    theta: &[f64],
    residuals: &[f64],
    data: &Dataset,
) -> Result<Vec<f64>> {
    if residuals.len() != data.len() {
        return Err(Error::DimensionMismatch { left: residuals.len(), right: data.len() });
    }
    let mut out = vec![0.0; model.dim()];
    for (x, r) in data.inputs().iter().zip(residuals) {
        let grad = model.grad_raw(theta, x)?;
        for (o, g) in out.iter_mut().zip(&grad) {
            *o += g * r;
        }
    }
    Ok(out)
}

/// The Lipschitz constant C = max{dβn(A+1), α²dn} of the drift in
/// (position, measure), valid for any model meeting the declared bounds.
pub fn lipschitz_constant(model: &ExpertModel, data: &Dataset) -> f64 {
    let d = model.dim() as f64;
    let n = data.len() as f64;
    let a = data.label_bound();
    (d * model.beta() * n * (a + 1.0)).max(model.alpha() * model.alpha() * d * n)
}
