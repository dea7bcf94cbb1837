//! Ancilla-assisted process tomography against a black-box channel.
//!
//! The pipeline prepares an entangled probe on reference ⊗ system, lets the
//! channel act on the system half only, estimates the joint output state
//! (optionally with a finite shot budget) and reads the Kraus operators off
//! its eigendecomposition.
//!
//! State tomography is simulated by linear inversion in the generalized
//! Gell-Mann basis: each of the `d² − 1` traceless basis observables is
//! measured projectively in its eigenbasis with `shots` repetitions, and
//! `ρ = I/d + ½ Σ_a ⟨G_a⟩ G_a`. Subnormalized states (from trace-decreasing
//! channels) are handled with a per-shot success/failure draw; the
//! conditional state is estimated from the successful shots and scaled back
//! by the pooled success fraction.

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::channels::{
    kraus_from_eigen, kraus_to_choi, ChoiMatrix, KrausSet, StinespringModel, CP_TOL,
    DEFAULT_KRAUS_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::linalg::{c64, hermitian_eig, tensor_product, ComplexMatrix, C64};

/// Smallest Schmidt coefficient accepted by [`reconstruct_from_schmidt`].
pub const MIN_SCHMIDT_COEFFICIENT: f64 = 1e-6;
/// Results whose joint output trace falls below this are flagged as coming
/// from a trace-decreasing channel.
pub const TRACE_DECREASING_FLAG: f64 = 0.999;
/// Multiplier on the plug-in noise scale `n₁/√shots` for the default
/// finite-shot Kraus threshold.
pub const NOISE_THRESHOLD_SIGMAS: f64 = 3.0;

const SCHMIDT_NORM_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-10;

type Evaluator = dyn Fn(&ComplexMatrix) -> ComplexMatrix + Send + Sync;

/// A channel known only through its action on `n₁ x n₁` operators.
#[derive(Clone)]
pub struct OpaqueChannel {
    input_dim: usize,
    output_dim: usize,
    evaluator: Arc<Evaluator>,
}

impl OpaqueChannel {
    pub fn new<F>(input_dim: usize, output_dim: usize, evaluator: F) -> Self
    where
        F: Fn(&ComplexMatrix) -> ComplexMatrix + Send + Sync + 'static,
    {
        Self {
            input_dim,
            output_dim,
            evaluator: Arc::new(evaluator),
        }
    }

    pub fn from_kraus(k: KrausSet) -> Self {
        let (n1, n2) = (k.input_dim(), k.output_dim());
        Self::new(n1, n2, move |m| {
            k.apply(m).expect("pipeline only passes n₁ x n₁ blocks")
        })
    }

    pub fn from_choi(j: ChoiMatrix) -> Self {
        let (n1, n2) = (j.input_dim(), j.output_dim());
        Self::new(n1, n2, move |m| {
            j.apply(m).expect("pipeline only passes n₁ x n₁ blocks")
        })
    }

    pub fn from_stinespring(s: StinespringModel) -> Self {
        let (n1, n2) = (s.system_dim(), s.output_dim());
        Self::new(n1, n2, move |m| {
            s.apply(m).expect("pipeline only passes n₁ x n₁ blocks")
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }
}

impl fmt::Debug for OpaqueChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OpaqueChannel")
            .field("input_dim", &self.input_dim)
            .field("output_dim", &self.output_dim)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shots {
    /// Infinite-shot idealization: the estimate equals the true state.
    Exact,
    /// Repetitions per measurement setting.
    Finite(u64),
}

/// Probe `Σᵢ αᵢ (U|i⟩) ⊗ (V|i⟩)` with every `αᵢ > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtInput {
    coefficients: Vec<f64>,
    left: ComplexMatrix,
    right: ComplexMatrix,
}

impl SchmidtInput {
    pub fn new(coefficients: Vec<f64>, left: ComplexMatrix, right: ComplexMatrix) -> Result<Self> {
        let n = coefficients.len();
        if n == 0 {
            return Err(Error::InvalidDimension(
                "empty Schmidt coefficient list".into(),
            ));
        }
        if let Some((index, &value)) = coefficients
            .iter()
            .enumerate()
            .find(|(_, a)| a.is_nan() || **a <= 0.0)
        {
            return Err(Error::NotMaxSchmidtNumber { index, value });
        }
        let norm_sq: f64 = coefficients.iter().map(|a| a * a).sum();
        if (norm_sq - 1.0).abs() > SCHMIDT_NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "Schmidt coefficients have Σα² = {norm_sq}, expected 1"
            )));
        }
        for (what, m) in [("U", &left), ("V", &right)] {
            if m.shape() != (n, n) {
                return Err(Error::DimensionMismatch {
                    op: "SchmidtInput::new",
                    left: m.shape(),
                    right: (n, n),
                });
            }
            let deviation = m.unitarity_deviation();
            if deviation > UNITARY_TOL {
                return Err(Error::NotUnitary { what, deviation });
            }
        }
        Ok(Self {
            coefficients,
            left,
            right,
        })
    }

    /// Uniform coefficients with identity bases, i.e. the maximally entangled probe.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(
            vec![1.0 / (n as f64).sqrt(); n],
            ComplexMatrix::identity(n),
            ComplexMatrix::identity(n),
        )
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `U`, acting on the reference.
    pub fn left(&self) -> &ComplexMatrix {
        &self.left
    }

    /// `V`, acting on the system.
    pub fn right(&self) -> &ComplexMatrix {
        &self.right
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputKind {
    MaxEntangled,
    Schmidt(SchmidtInput),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyConfig {
    pub shots: Shots,
    pub seed: u64,
    pub input: InputKind,
    /// Eigenvalue cutoff for Kraus extraction; `None` picks
    /// [`TomographyConfig::effective_threshold`]'s default.
    pub kraus_threshold: Option<f64>,
    pub psd_projection: bool,
}

impl Default for TomographyConfig {
    fn default() -> Self {
        Self {
            shots: Shots::Exact,
            seed: 0,
            input: InputKind::MaxEntangled,
            kraus_threshold: None,
            psd_projection: true,
        }
    }
}

impl TomographyConfig {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn with_shots(shots: u64, seed: u64) -> Self {
        Self {
            shots: Shots::Finite(shots),
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self, input_dim: usize) -> Result<()> {
        if let Shots::Finite(0) = self.shots {
            return Err(Error::InvalidParameter("shots must be positive".into()));
        }
        if let Some(t) = self.kraus_threshold {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "kraus_threshold must be a nonnegative number, got {t}"
                )));
            }
        }
        if let InputKind::Schmidt(s) = &self.input {
            if s.dim() != input_dim {
                return Err(Error::InvalidDimension(format!(
                    "Schmidt probe has {} coefficients but the channel input dimension is {input_dim}",
                    s.dim()
                )));
            }
        }
        Ok(())
    }

    /// `1e-10` for exact data, otherwise `max(1e-10, 3 n₁/√shots)` unless overridden.
    pub fn effective_threshold(&self, input_dim: usize) -> f64 {
        if let Some(t) = self.kraus_threshold {
            return t;
        }
        match self.shots {
            Shots::Exact => DEFAULT_KRAUS_THRESHOLD,
            Shots::Finite(n) => DEFAULT_KRAUS_THRESHOLD
                .max(NOISE_THRESHOLD_SIGMAS * input_dim as f64 / (n as f64).sqrt()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TomographyResult {
    /// With PSD projection on, this is exactly the Choi matrix of `kraus`
    /// (the projected estimate with sub-threshold eigenvalues removed);
    /// otherwise it is the unprojected estimate.
    pub estimated_choi: ChoiMatrix,
    pub kraus: KrausSet,
    /// Joint output state as returned by state tomography, before projection.
    pub raw_state_estimate: ComplexMatrix,
    /// Total magnitude of negative eigenvalues clipped from the state estimate.
    pub negativity_removed: f64,
    pub shots_used: u64,
    /// Trace of the estimated joint output.
    pub success_trace: f64,
    /// `success_trace < TRACE_DECREASING_FLAG`.
    pub trace_decreasing: bool,
    pub kraus_threshold: f64,
}

/// `(1/√n₁) Σᵢ |i⟩ ⊗ |i⟩`.
pub fn prepare_max_entangled(n1: usize) -> Result<ComplexMatrix> {
    if n1 < 2 {
        return Err(Error::InvalidDimension(format!(
            "maximally entangled probe needs n₁ ≥ 2, got {n1}"
        )));
    }
    let amp = c64(1.0 / (n1 as f64).sqrt(), 0.0);
    let mut v = vec![c64(0.0, 0.0); n1 * n1];
    for i in 0..n1 {
        v[i * n1 + i] = amp;
    }
    Ok(ComplexMatrix::column(v))
}

/// `Σᵢ αᵢ (U|i⟩) ⊗ (V|i⟩)`, reference (U) factor first.
pub fn prepare_schmidt_input(input: &SchmidtInput) -> ComplexMatrix {
    let n = input.dim();
    let mut v = vec![c64(0.0, 0.0); n * n];
    for (i, &alpha) in input.coefficients.iter().enumerate() {
        for a in 0..n {
            let ua = input.left[(a, i)] * alpha;
            for b in 0..n {
                v[a * n + b] += ua * input.right[(b, i)];
            }
        }
    }
    ComplexMatrix::column(v)
}

/// `(I ⊗ E)(|φ⟩⟨φ|)`, computed by passing each `n₁ x n₁` block of the probe
/// projector through the channel. This is the only place the evaluator runs.
pub fn joint_output_state(
    ch: &OpaqueChannel,
    input_vector: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let (n1, n2) = (ch.input_dim, ch.output_dim);
    if input_vector.shape() != (n1 * n1, 1) {
        return Err(Error::DimensionMismatch {
            op: "joint_output_state",
            left: input_vector.shape(),
            right: (n1 * n1, 1),
        });
    }
    let psi = input_vector.as_slice();
    let probe = ComplexMatrix::outer(psi, psi);
    let mut out = ComplexMatrix::zeros(n1 * n2, n1 * n2);
    for i in 0..n1 {
        for j in 0..n1 {
            let image = (ch.evaluator)(&probe.block(i, j, n1, n1));
            if image.shape() != (n2, n2) {
                return Err(Error::DimensionMismatch {
                    op: "channel evaluator output",
                    left: image.shape(),
                    right: (n2, n2),
                });
            }
            out.set_block(i, j, &image);
        }
    }
    Ok(out)
}

/// One projective measurement: eigenvalue/eigenvector pairs with nonzero
/// eigenvalue. The zero-eigenvalue outcomes are lumped into one remainder bucket.
struct MeasurementSetting {
    observable: ComplexMatrix,
    outcomes: Vec<(f64, Vec<C64>)>,
}

/// Traceless generalized Gell-Mann matrices with `Tr(G_a G_b) = 2 δ_ab`,
/// each paired with its eigenbasis: symmetric, then antisymmetric (both over
/// `j < k`), then diagonal.
fn gell_mann_settings(d: usize) -> Vec<MeasurementSetting> {
    let zero = c64(0.0, 0.0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut settings = Vec::with_capacity(d * d - 1);
    let basis_pair = |j: usize, k: usize, cj: C64, ck: C64| {
        let mut v = vec![zero; d];
        v[j] = cj;
        v[k] = ck;
        v
    };
    for j in 0..d {
        for k in j + 1..d {
            let mut g = ComplexMatrix::zeros(d, d);
            g[(j, k)] = c64(1.0, 0.0);
            g[(k, j)] = c64(1.0, 0.0);
            settings.push(MeasurementSetting {
                observable: g,
                outcomes: vec![
                    (1.0, basis_pair(j, k, c64(s, 0.0), c64(s, 0.0))),
                    (-1.0, basis_pair(j, k, c64(s, 0.0), c64(-s, 0.0))),
                ],
            });
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut g = ComplexMatrix::zeros(d, d);
            g[(j, k)] = c64(0.0, -1.0);
            g[(k, j)] = c64(0.0, 1.0);
            settings.push(MeasurementSetting {
                observable: g,
                outcomes: vec![
                    (1.0, basis_pair(j, k, c64(s, 0.0), c64(0.0, s))),
                    (-1.0, basis_pair(j, k, c64(s, 0.0), c64(0.0, -s))),
                ],
            });
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = vec![zero; d];
        let mut outcomes = Vec::with_capacity(l + 1);
        for (m, entry) in diag.iter_mut().enumerate().take(l + 1) {
            let value = if m < l { norm } else { -(l as f64) * norm };
            *entry = c64(value, 0.0);
            let mut e = vec![zero; d];
            e[m] = c64(1.0, 0.0);
            outcomes.push((value, e));
        }
        settings.push(MeasurementSetting {
            observable: ComplexMatrix::diagonal(&diag),
            outcomes,
        });
    }
    settings
}

fn expectation_in(rho: &ComplexMatrix, v: &[C64]) -> f64 {
    let d = v.len();
    let mut acc = c64(0.0, 0.0);
    for i in 0..d {
        if v[i] == c64(0.0, 0.0) {
            continue;
        }
        for j in 0..d {
            acc += v[i].conj() * rho[(i, j)] * v[j];
        }
    }
    acc.re
}

fn binomial(n: u64, p: f64, rng: &mut ChaCha8Rng) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("p is in (0, 1)").sample(rng)
}

/// Multinomial counts via sequential conditional binomials. The last bucket
/// receives whatever is left.
fn multinomial(n: u64, probs: &[f64], rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut counts = Vec::with_capacity(probs.len());
    let mut remaining = n;
    let mut mass = 1.0f64;
    for (i, &p) in probs.iter().enumerate() {
        if i + 1 == probs.len() {
            counts.push(remaining);
            break;
        }
        let c = if mass > 0.0 {
            binomial(remaining, (p / mass).clamp(0.0, 1.0), rng)
        } else {
            0
        };
        counts.push(c);
        remaining -= c;
        mass -= p;
    }
    counts
}

/// Per-setting RNG: one root seed, one ChaCha stream per setting index, so
/// the draws do not depend on evaluation order.
fn setting_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn validate_state(rho: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eig(rho)?;
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -CP_TOL {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: min,
        });
    }
    let trace = rho.trace().re;
    if trace > 1.0 + 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "state has trace {trace}, expected at most 1"
        )));
    }
    Ok(trace.clamp(0.0, 1.0))
}

/// Simulated state tomography of a (possibly subnormalized) density matrix.
///
/// `Exact` returns `rho` untouched. With a finite budget every Gell-Mann
/// setting gets `shots` repetitions; the estimate is Hermitian but need not be
/// positive semidefinite.
pub fn simulate_state_tomography(
    rho: &ComplexMatrix,
    shots: Shots,
    seed: u64,
) -> Result<ComplexMatrix> {
    let trace = validate_state(rho)?;
    let n = match shots {
        Shots::Exact => return Ok(rho.clone()),
        Shots::Finite(0) => return Err(Error::InvalidParameter("shots must be positive".into())),
        Shots::Finite(n) => n,
    };
    let d = rho.rows();
    if trace == 0.0 {
        return Ok(ComplexMatrix::zeros(d, d));
    }
    let conditional = rho.scale_real(1.0 / trace);
    let settings = gell_mann_settings(d);

    let sample = |index: usize, setting: Option<&MeasurementSetting>| -> (u64, f64) {
        let mut rng = setting_rng(seed, index);
        let successes = binomial(n, trace, &mut rng);
        let Some(setting) = setting else {
            return (successes, 0.0);
        };
        if successes == 0 {
            return (0, 0.0);
        }
        let mut probs: Vec<f64> = setting
            .outcomes
            .iter()
            .map(|(_, v)| expectation_in(&conditional, v).max(0.0))
            .collect();
        let total: f64 = probs.iter().sum();
        if total > 1.0 {
            probs.iter_mut().for_each(|p| *p /= total);
        }
        probs.push((1.0 - probs.iter().sum::<f64>()).max(0.0));
        let counts = multinomial(successes, &probs, &mut rng);
        let weighted: f64 = setting
            .outcomes
            .iter()
            .zip(&counts)
            .map(|((value, _), &c)| value * c as f64)
            .sum();
        (successes, weighted / successes as f64)
    };

    let draws: Vec<(u64, f64)> = if settings.is_empty() {
        vec![sample(0, None)]
    } else {
        settings
            .par_iter()
            .enumerate()
            .map(|(index, s)| sample(index, Some(s)))
            .collect()
    };

    let total_successes: u64 = draws.iter().map(|(s, _)| s).sum();
    let success_fraction = total_successes as f64 / (n as f64 * draws.len() as f64);

    let mut estimate = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
    for (setting, &(_, mean)) in settings.iter().zip(&draws) {
        estimate = &estimate + &setting.observable.scale_real(0.5 * mean);
    }
    Ok(estimate.scale_real(success_fraction))
}

/// Clips negative eigenvalues to zero. Eigenvalues within rounding distance
/// of zero (`1e-14` relative to the spectral scale) are left alone, so a
/// PSD input comes back unchanged with zero clipped mass.
pub fn project_to_psd(m: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    let eig = hermitian_eig(m)?;
    let scale = eig
        .eigenvalues
        .iter()
        .fold(1.0f64, |acc, l| acc.max(l.abs()));
    let floor = -1e-14 * scale;
    if eig.eigenvalues.iter().all(|&l| l >= floor) {
        return Ok((m.clone(), 0.0));
    }
    let clipped: f64 = eig
        .eigenvalues
        .iter()
        .filter(|&&l| l < 0.0)
        .map(|l| -l)
        .sum();
    let projected = eig.reassemble_with(|l| l.max(0.0)).hermitian_part();
    Ok((projected, clipped))
}

/// `J = n₁ ρ`, then Kraus operators from the eigenpairs above `threshold`.
///
/// Negative eigenvalues (present when the estimate was not projected) are
/// ignored rather than rejected.
pub fn reconstruct_from_max_entangled(
    rho_est: &ComplexMatrix,
    n1: usize,
    n2: usize,
    threshold: f64,
) -> Result<(ChoiMatrix, KrausSet)> {
    let choi = ChoiMatrix::new(n1, n2, rho_est.scale_real(n1 as f64))?;
    let kraus = kraus_from_eigen(&choi.eigen()?, n1, n2, threshold);
    Ok((choi, kraus))
}

/// Undoes a general Schmidt probe: rotate by `U† ⊗ I`, divide block `(i, j)`
/// by `αᵢαⱼ`, eigendecompose to get `Ã_k` for the channel `E(V · V†)`, and
/// return `Ã_k V†`. The returned Choi matrix is that of `E` itself,
/// `(conj(V) ⊗ I) J̃ (Vᵀ ⊗ I)`.
pub fn reconstruct_from_schmidt(
    rho_est: &ComplexMatrix,
    input: &SchmidtInput,
    n2: usize,
    threshold: f64,
) -> Result<(ChoiMatrix, KrausSet)> {
    let n1 = input.dim();
    if let Some(&value) = input
        .coefficients
        .iter()
        .find(|&&a| a < MIN_SCHMIDT_COEFFICIENT)
    {
        return Err(Error::IllConditioned {
            value,
            min: MIN_SCHMIDT_COEFFICIENT,
        });
    }
    let d = n1 * n2;
    if rho_est.shape() != (d, d) {
        return Err(Error::DimensionMismatch {
            op: "reconstruct_from_schmidt",
            left: rho_est.shape(),
            right: (d, d),
        });
    }
    let id2 = ComplexMatrix::identity(n2);
    let rotate = tensor_product(&input.left, &id2);
    let mut rotated = &(&rotate.adjoint() * rho_est) * &rotate;
    for i in 0..n1 {
        for j in 0..n1 {
            let w = 1.0 / (input.coefficients[i] * input.coefficients[j]);
            for r in 0..n2 {
                for c in 0..n2 {
                    rotated[(i * n2 + r, j * n2 + c)] *= w;
                }
            }
        }
    }
    let intermediate = ChoiMatrix::new(n1, n2, rotated.hermitian_part())?;
    let tilde = kraus_from_eigen(&intermediate.eigen()?, n1, n2, threshold);
    let kraus = tilde.compose_input(&input.right.adjoint())?;

    let undo = tensor_product(&input.right.conj(), &id2);
    let choi_matrix = &(&undo * intermediate.matrix()) * &undo.adjoint();
    let choi = ChoiMatrix::new(n1, n2, choi_matrix.hermitian_part())?;
    Ok((choi, kraus))
}

/// Prepare, apply, estimate, (project), reconstruct. Deterministic in
/// `(cfg.seed, cfg.shots)`.
pub fn run_tomography(ch: &OpaqueChannel, cfg: &TomographyConfig) -> Result<TomographyResult> {
    let (n1, n2) = (ch.input_dim, ch.output_dim);
    cfg.validate(n1)?;
    let probe = match &cfg.input {
        InputKind::MaxEntangled => prepare_max_entangled(n1)?,
        InputKind::Schmidt(s) => prepare_schmidt_input(s),
    };
    let joint = joint_output_state(ch, &probe)?;
    let raw = simulate_state_tomography(&joint, cfg.shots, cfg.seed)?;
    let success_trace = raw.trace().re;
    let (state, negativity_removed) = if cfg.psd_projection {
        project_to_psd(&raw)?
    } else {
        (raw.clone(), 0.0)
    };
    let threshold = cfg.effective_threshold(n1);
    let (choi, kraus) = match &cfg.input {
        InputKind::MaxEntangled => reconstruct_from_max_entangled(&state, n1, n2, threshold)?,
        InputKind::Schmidt(s) => reconstruct_from_schmidt(&state, s, n2, threshold)?,
    };
    let estimated_choi = if cfg.psd_projection {
        kraus_to_choi(&kraus)
    } else {
        choi
    };
    let settings = (n1 * n2 * n1 * n2 - 1).max(1) as u64;
    let shots_used = match cfg.shots {
        Shots::Exact => 0,
        Shots::Finite(n) => n * settings,
    };
    Ok(TomographyResult {
        estimated_choi,
        kraus,
        raw_state_estimate: raw,
        negativity_removed,
        shots_used,
        success_trace,
        trace_decreasing: success_trace < TRACE_DECREASING_FLAG,
        kraus_threshold: threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{check_cp_tp, kraus_equivalent, zoo_channel};
    use crate::linalg::{frobenius_distance, schmidt_decompose};
    use crate::random::{random_density_matrix, random_unitary};
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        frobenius_distance(a, b).unwrap()
    }

    fn zoo(name: &str, params: &[f64]) -> KrausSet {
        zoo_channel(name, params, 2, 2).unwrap()
    }

    fn pauli_depolarizing() -> KrausSet {
        let z0 = c64(0.0, 0.0);
        let h = c64(0.5, 0.0);
        let ih = c64(0.0, 0.5);
        KrausSet::from_operators(vec![
            ComplexMatrix::identity(2).scale_real(0.5),
            ComplexMatrix::from_rows(&[[z0, h], [h, z0]]),
            ComplexMatrix::from_rows(&[[z0, -ih], [ih, z0]]),
            ComplexMatrix::from_rows(&[[h, z0], [z0, -h]]),
        ])
        .unwrap()
    }

    #[test]
    fn max_entangled_probe() {
        let s = 1.0 / 2f64.sqrt();
        let v = prepare_max_entangled(2).unwrap();
        assert_eq!(
            v.as_slice(),
            &[c64(s, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(s, 0.0)]
        );
        let v = prepare_max_entangled(3).unwrap();
        for (i, z) in v.as_slice().iter().enumerate() {
            let expected = if [0, 4, 8].contains(&i) {
                1.0 / 3f64.sqrt()
            } else {
                0.0
            };
            assert_eq!(z.re, expected);
        }
        for n in 2..=8 {
            assert!((prepare_max_entangled(n).unwrap().frobenius_norm() - 1.0).abs() < 1e-14);
        }
        assert!(prepare_max_entangled(1).is_err());
    }

    #[test]
    fn schmidt_probe() {
        let uniform = SchmidtInput::uniform(3).unwrap();
        assert!(
            dist(
                &prepare_schmidt_input(&uniform),
                &prepare_max_entangled(3).unwrap()
            ) < 1e-15
        );

        let id = ComplexMatrix::identity(2);
        let input = SchmidtInput::new(vec![0.8, 0.6], id.clone(), id.clone()).unwrap();
        assert_eq!(
            prepare_schmidt_input(&input),
            ComplexMatrix::column(vec![
                c64(0.8, 0.0),
                c64(0.0, 0.0),
                c64(0.0, 0.0),
                c64(0.6, 0.0)
            ])
        );

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let input = SchmidtInput::new(
            vec![0.8, 0.6],
            random_unitary(2, &mut rng),
            random_unitary(2, &mut rng),
        )
        .unwrap();
        let d = schmidt_decompose(&prepare_schmidt_input(&input), 2, 2).unwrap();
        assert!((d.coefficients[0] - 0.8).abs() < 1e-9 && (d.coefficients[1] - 0.6).abs() < 1e-9);

        assert!(matches!(
            SchmidtInput::new(vec![1.0, 0.0], id.clone(), id.clone()),
            Err(Error::NotMaxSchmidtNumber { index: 1, .. })
        ));
        assert!(SchmidtInput::new(vec![0.8, 0.8], id.clone(), id.clone()).is_err());
        assert!(SchmidtInput::new(vec![0.8, 0.6], id.scale_real(2.0), id).is_err());
    }

    #[test]
    fn joint_output_examples() {
        let phi = prepare_max_entangled(2).unwrap();
        let phi_proj = ComplexMatrix::outer(phi.as_slice(), phi.as_slice());

        let out =
            joint_output_state(&OpaqueChannel::from_kraus(zoo("identity", &[])), &phi).unwrap();
        assert!(dist(&out, &phi_proj) < 1e-15);

        // block (i, j) of |Φ⟩⟨Φ| is |i⟩⟨j|/2 and the fully depolarizing map
        // sends it to δ_ij I/2 · 1/2
        let out =
            joint_output_state(&OpaqueChannel::from_kraus(pauli_depolarizing()), &phi).unwrap();
        assert!(dist(&out, &ComplexMatrix::identity(4).scale_real(0.25)) < 1e-15);

        let out = joint_output_state(
            &OpaqueChannel::from_kraus(zoo("project_discard", &[])),
            &phi,
        )
        .unwrap();
        assert!((out.trace().re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn joint_output_rejects_bad_evaluator() {
        let ch = OpaqueChannel::new(2, 2, |_| ComplexMatrix::zeros(3, 3));
        let phi = prepare_max_entangled(2).unwrap();
        assert!(matches!(
            joint_output_state(&ch, &phi),
            Err(Error::DimensionMismatch { .. })
        ));
        let ch = OpaqueChannel::from_kraus(zoo("identity", &[]));
        assert!(joint_output_state(&ch, &prepare_max_entangled(3).unwrap()).is_err());
    }

    #[test]
    fn gell_mann_settings_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 2..=5 {
            let settings = gell_mann_settings(d);
            assert_eq!(settings.len(), d * d - 1);
            for (a, s) in settings.iter().enumerate() {
                assert_eq!(s.observable.hermiticity_deviation(), 0.0);
                assert!(s.observable.trace().norm() < 1e-14);
                for (b, t) in settings.iter().enumerate() {
                    let overlap = (&s.observable * &t.observable).trace();
                    let expected = if a == b { 2.0 } else { 0.0 };
                    assert!((overlap - c64(expected, 0.0)).norm() < 1e-13);
                }
                for (value, v) in &s.outcomes {
                    let col = ComplexMatrix::column(v.clone());
                    let image = &s.observable * &col;
                    assert!(dist(&image, &col.scale_real(*value)) < 1e-14);
                }
            }
            // linear inversion identity
            let rho = random_density_matrix(d, &mut rng);
            let mut rebuilt = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
            for s in &settings {
                let mean = (&rho * &s.observable).trace().re;
                rebuilt = &rebuilt + &s.observable.scale_real(0.5 * mean);
            }
            assert!(dist(&rebuilt, &rho) < 1e-13);
        }
    }

    #[test]
    fn state_tomography_exact_and_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random_density_matrix(3, &mut rng);
        assert_eq!(
            simulate_state_tomography(&rho, Shots::Exact, 1).unwrap(),
            rho
        );

        let mut bad = ComplexMatrix::identity(2).scale_real(0.5);
        bad[(1, 1)] = c64(-0.1, 0.0);
        assert!(matches!(
            simulate_state_tomography(&bad, Shots::Finite(10), 0),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
        assert!(simulate_state_tomography(&ComplexMatrix::identity(2), Shots::Exact, 0).is_err());
    }

    #[test]
    fn state_tomography_is_deterministic_and_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random_density_matrix(4, &mut rng);
        let a = simulate_state_tomography(&rho, Shots::Finite(1000), 99).unwrap();
        let b = simulate_state_tomography(&rho, Shots::Finite(1000), 99).unwrap();
        let c = simulate_state_tomography(&rho, Shots::Finite(1000), 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.hermiticity_deviation(), 0.0);
        assert!((a.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_qubit_with_a_million_shots() {
        let rho = ComplexMatrix::identity(2).scale_real(0.5);
        for seed in 0..20 {
            let est = simulate_state_tomography(&rho, Shots::Finite(1_000_000), seed).unwrap();
            assert!(dist(&est, &rho) < 0.01, "seed {seed}");
        }
    }

    #[test]
    fn subnormalized_state_keeps_its_trace_on_average() {
        let rho = ComplexMatrix::unit(2, 0, 0).scale_real(0.3);
        let est = simulate_state_tomography(&rho, Shots::Finite(200_000), 5).unwrap();
        assert!((est.trace().re - 0.3).abs() < 0.005);
        assert!(dist(&est, &rho) < 0.01);
        let zero = ComplexMatrix::zeros(2, 2);
        assert_eq!(
            simulate_state_tomography(&zero, Shots::Finite(100), 5).unwrap(),
            zero
        );
    }

    #[test]
    fn project_to_psd_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rho = random_density_matrix(3, &mut rng);
        let (out, mass) = project_to_psd(&rho).unwrap();
        assert_eq!(out, rho);
        assert_eq!(mass, 0.0);

        let m = ComplexMatrix::diagonal(&[c64(1.0, 0.0), c64(-0.2, 0.0)]);
        let (out, mass) = project_to_psd(&m).unwrap();
        assert!(
            dist(
                &out,
                &ComplexMatrix::diagonal(&[c64(1.0, 0.0), c64(0.0, 0.0)])
            ) < 1e-15
        );
        assert!((mass - 0.2).abs() < 1e-15);

        let x = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        let (out, mass) = project_to_psd(&x).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[[0.5, 0.5], [0.5, 0.5]]);
        assert!(dist(&out, &expected) < 1e-15);
        assert!((mass - 1.0).abs() < 1e-15);

        assert!(project_to_psd(&ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]])).is_err());
    }

    #[test]
    fn reconstruct_from_max_entangled_examples() {
        let phi = prepare_max_entangled(2).unwrap();
        let proj = ComplexMatrix::outer(phi.as_slice(), phi.as_slice());
        let (j, k) = reconstruct_from_max_entangled(&proj, 2, 2, 1e-10).unwrap();
        assert!(dist(j.matrix(), &proj.scale_real(2.0)) < 1e-15);
        assert_eq!(k.len(), 1);
        assert!(kraus_equivalent(&k, &zoo("identity", &[]), 1e-12).unwrap());

        let (j, k) = reconstruct_from_max_entangled(
            &ComplexMatrix::identity(4).scale_real(0.25),
            2,
            2,
            1e-10,
        )
        .unwrap();
        assert!(dist(j.matrix(), &ComplexMatrix::identity(4).scale_real(0.5)) < 1e-15);
        assert_eq!(k.len(), 4);
        assert!(kraus_equivalent(&k, &pauli_depolarizing(), 1e-12).unwrap());

        let truth = zoo("amplitude_damping", &[0.5]);
        let rho = joint_output_state(&OpaqueChannel::from_kraus(truth.clone()), &phi).unwrap();
        let (_, k) = reconstruct_from_max_entangled(&rho, 2, 2, 1e-10).unwrap();
        assert!(dist(kraus_to_choi(&k).matrix(), kraus_to_choi(&truth).matrix()) < 1e-9);
    }

    #[test]
    fn reconstruct_from_schmidt_examples() {
        let truth = zoo("amplitude_damping", &[0.5]);
        let uniform = SchmidtInput::uniform(2).unwrap();
        let phi = prepare_max_entangled(2).unwrap();
        let rho = joint_output_state(&OpaqueChannel::from_kraus(truth.clone()), &phi).unwrap();
        let (j1, k1) = reconstruct_from_max_entangled(&rho, 2, 2, 1e-10).unwrap();
        let (j2, k2) = reconstruct_from_schmidt(&rho, &uniform, 2, 1e-10).unwrap();
        assert!(dist(j1.matrix(), j2.matrix()) < 1e-14);
        assert!(kraus_equivalent(&k1, &k2, 1e-14).unwrap());

        // ρ_out block (i, j) = αᵢαⱼ |i⟩⟨j| for the identity channel
        let id = ComplexMatrix::identity(2);
        let input = SchmidtInput::new(vec![0.8, 0.6], id.clone(), id).unwrap();
        let ch = OpaqueChannel::from_kraus(zoo("identity", &[]));
        let rho = joint_output_state(&ch, &prepare_schmidt_input(&input)).unwrap();
        let (_, k) = reconstruct_from_schmidt(&rho, &input, 2, 1e-10).unwrap();
        assert_eq!(k.len(), 1);
        assert!(kraus_equivalent(&k, &zoo("identity", &[]), 1e-12).unwrap());

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let truth = zoo("amplitude_damping", &[0.3]);
        let input = SchmidtInput::new(
            vec![0.8, 0.6],
            random_unitary(2, &mut rng),
            random_unitary(2, &mut rng),
        )
        .unwrap();
        let ch = OpaqueChannel::from_kraus(truth.clone());
        let rho = joint_output_state(&ch, &prepare_schmidt_input(&input)).unwrap();
        let (j, k) = reconstruct_from_schmidt(&rho, &input, 2, 1e-10).unwrap();
        assert!(kraus_equivalent(&k, &truth, 1e-8).unwrap());
        assert!(dist(j.matrix(), kraus_to_choi(&truth).matrix()) < 1e-12);
    }

    #[test]
    fn reconstruct_from_schmidt_rejects_tiny_coefficients() {
        let id = ComplexMatrix::identity(2);
        let a = 1e-7;
        let input = SchmidtInput::new(vec![(1.0f64 - a * a).sqrt(), a], id.clone(), id).unwrap();
        let rho = ComplexMatrix::identity(4).scale_real(0.25);
        assert!(matches!(
            reconstruct_from_schmidt(&rho, &input, 2, 1e-10),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn run_tomography_exact_examples() {
        let ch = OpaqueChannel::from_kraus(zoo("identity", &[]));
        let r = run_tomography(&ch, &TomographyConfig::exact()).unwrap();
        assert_eq!(r.kraus.len(), 1);
        assert!(kraus_equivalent(&r.kraus, &zoo("identity", &[]), 1e-12).unwrap());
        assert_eq!(r.negativity_removed, 0.0);
        assert_eq!(r.shots_used, 0);
        assert!(!r.trace_decreasing);

        let ch = OpaqueChannel::from_kraus(zoo("depolarizing", &[0.3]));
        let r = run_tomography(&ch, &TomographyConfig::exact()).unwrap();
        let eig = r.estimated_choi.eigen().unwrap().eigenvalues;
        for (l, c) in eig.iter().zip([1.55, 0.15, 0.15, 0.15]) {
            assert!((l - c).abs() < 1e-9);
        }
    }

    #[test]
    fn trace_decreasing_channel_reconstruction() {
        let truth = zoo("project_discard", &[]);
        let r = run_tomography(
            &OpaqueChannel::from_kraus(truth),
            &TomographyConfig::exact(),
        )
        .unwrap();
        assert!(dist(&r.kraus.completeness(), &ComplexMatrix::unit(2, 0, 0)) < 1e-8);
        let v = check_cp_tp(&r.kraus);
        assert!(v.is_trace_nonincreasing && !v.is_trace_preserving);
        assert!((r.success_trace - 0.5).abs() < 1e-15);
        assert!(r.trace_decreasing);
    }

    #[test]
    fn evaluator_is_called_once_per_probe_block() {
        let calls = Arc::new(AtomicUsize::new(0));
        let counter = Arc::clone(&calls);
        let k = zoo_channel("random_cptp", &[4.0, 2.0], 3, 2).unwrap();
        let inner = k.clone();
        let ch = OpaqueChannel::new(3, 2, move |m| {
            counter.fetch_add(1, Ordering::SeqCst);
            inner.apply(m).unwrap()
        });
        let r = run_tomography(&ch, &TomographyConfig::with_shots(500, 1)).unwrap();
        assert_eq!(calls.load(Ordering::SeqCst), 9);
        assert_eq!(r.kraus.input_dim(), 3);
        assert_eq!(r.shots_used, 500 * 35);
    }

    #[test]
    fn finite_shot_runs_are_reproducible() {
        let ch = OpaqueChannel::from_kraus(zoo("amplitude_damping", &[0.4]));
        let cfg = TomographyConfig::with_shots(10_000, 42);
        let a = run_tomography(&ch, &cfg).unwrap();
        let b = run_tomography(&ch, &cfg).unwrap();
        assert_eq!(a.raw_state_estimate, b.raw_state_estimate);
        assert_eq!(a.estimated_choi, b.estimated_choi);
        assert!((a.kraus_threshold - 3.0 * 2.0 / 100.0).abs() < 1e-15);
        assert!(
            dist(
                &kraus_to_choi(&a.kraus).into_matrix(),
                a.estimated_choi.matrix()
            ) < 1e-8
        );
    }

    #[test]
    fn unprojected_estimates_still_reconstruct() {
        let ch = OpaqueChannel::from_kraus(zoo("identity", &[]));
        let cfg = TomographyConfig {
            psd_projection: false,
            ..TomographyConfig::with_shots(2000, 3)
        };
        let r = run_tomography(&ch, &cfg).unwrap();
        assert_eq!(r.negativity_removed, 0.0);
        assert_eq!(
            r.estimated_choi.matrix(),
            &r.raw_state_estimate.scale_real(2.0)
        );
        assert!(!r.kraus.is_empty());
    }

    #[test]
    fn config_validation() {
        let ch = OpaqueChannel::from_kraus(zoo("identity", &[]));
        let cfg = TomographyConfig {
            shots: Shots::Finite(0),
            ..TomographyConfig::default()
        };
        assert!(run_tomography(&ch, &cfg).is_err());
        let cfg = TomographyConfig {
            input: InputKind::Schmidt(SchmidtInput::uniform(3).unwrap()),
            ..TomographyConfig::default()
        };
        assert!(run_tomography(&ch, &cfg).is_err());
        let cfg = TomographyConfig {
            kraus_threshold: Some(-1.0),
            ..TomographyConfig::default()
        };
        assert!(run_tomography(&ch, &cfg).is_err());
    }
}
