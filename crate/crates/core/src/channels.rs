//! Channel representations and the conversions between them.
//!
//! * [`KrausSet`]: `E(M) = Σ_k A_k M A_k†` with `n₂ x n₁` operators.
//! * [`ChoiMatrix`]: `J = Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)`, unnormalized, reference factor first.
//! * [`StinespringModel`]: `E(M) = Tr_o[U (M ⊗ ρ_a) U† (I ⊗ P_o)]`.
//!
//! Kraus sets are never compared entry-wise: global phases and rotations inside
//! degenerate eigenspaces make the operators non-unique. Equality is always
//! judged on the Choi matrix ([`kraus_equivalent`]).

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    c64, frobenius_distance, hermitian_eig, partial_trace, tensor_product, ComplexMatrix,
    HermitianEigenDecomposition, Subsystem, C64, HERMITIAN_TOL,
};
use crate::random::random_isometry;

/// Choi eigenvalues at or above `-CP_TOL` count as nonnegative.
pub const CP_TOL: f64 = 1e-8;
/// Tolerance on the eigenvalues of `Σ A†A` when judging trace behaviour.
pub const TRACE_TOL: f64 = 1e-8;
/// Eigenvalues at or below this are not turned into Kraus operators.
pub const DEFAULT_KRAUS_THRESHOLD: f64 = 1e-10;

/// Ordered list of `n₂ x n₁` Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    input_dim: usize,
    output_dim: usize,
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    /// Checks shapes only. Trace behaviour is reported by [`check_cp_tp`]
    /// rather than enforced here, so that invalid sets can still be linted.
    pub fn new(input_dim: usize, output_dim: usize, operators: Vec<ComplexMatrix>) -> Result<Self> {
        if input_dim == 0 || output_dim == 0 {
            return Err(Error::InvalidDimension(format!(
                "Kraus dimensions must be positive, got ({input_dim}, {output_dim})"
            )));
        }
        if operators.is_empty() {
            return Err(Error::InvalidModel(
                "a Kraus set needs at least one operator".into(),
            ));
        }
        for op in &operators {
            if op.shape() != (output_dim, input_dim) {
                return Err(Error::DimensionMismatch {
                    op: "KrausSet::new",
                    left: op.shape(),
                    right: (output_dim, input_dim),
                });
            }
        }
        Ok(Self {
            input_dim,
            output_dim,
            operators,
        })
    }

    /// Dimensions taken from the first operator.
    pub fn from_operators(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let (n2, n1) = operators
            .first()
            .map(|a| a.shape())
            .ok_or_else(|| Error::InvalidModel("a Kraus set needs at least one operator".into()))?;
        Self::new(n1, n2, operators)
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// `Σ_k A_k† A_k`.
    pub fn completeness(&self) -> ComplexMatrix {
        let n1 = self.input_dim;
        let mut sum = ComplexMatrix::zeros(n1, n1);
        for a in &self.operators {
            sum = &sum + &(&a.adjoint() * a);
        }
        sum
    }

    /// Returns a new set with every operator right-multiplied by `m`
    /// (the channel `ρ ↦ E(m ρ m†)`).
    pub fn compose_input(&self, m: &ComplexMatrix) -> Result<Self> {
        let ops = self
            .operators
            .iter()
            .map(|a| a.multiply(m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(m.cols(), self.output_dim, ops)
    }

    pub fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        apply_kraus(self, m)
    }

    pub fn to_choi(&self) -> ChoiMatrix {
        kraus_to_choi(self)
    }
}

/// Unnormalized Choi matrix `(I ⊗ E)(n₁|Φ⟩⟨Φ|)` of an `n₁ → n₂` map.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    input_dim: usize,
    output_dim: usize,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    /// Validates shape and Hermiticity (to [`HERMITIAN_TOL`]). Positivity is
    /// not required here: an indefinite matrix is a legitimate thing to lint or
    /// to receive from noisy tomography.
    pub fn new(input_dim: usize, output_dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        let d = input_dim * output_dim;
        if d == 0 {
            return Err(Error::InvalidDimension(format!(
                "Choi dimensions must be positive, got ({input_dim}, {output_dim})"
            )));
        }
        if matrix.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                op: "ChoiMatrix::new",
                left: matrix.shape(),
                right: (d, d),
            });
        }
        let deviation = matrix.hermiticity_deviation();
        if deviation.is_nan() || deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self {
            input_dim,
            output_dim,
            matrix,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `E(|i⟩⟨j|)`.
    pub fn block(&self, i: usize, j: usize) -> ComplexMatrix {
        self.matrix.block(i, j, self.output_dim, self.output_dim)
    }

    pub fn eigen(&self) -> Result<HermitianEigenDecomposition> {
        hermitian_eig(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        // Hermiticity was checked on construction, so this cannot fail.
        self.eigen()
            .map(|e| e.eigenvalues.last().copied().unwrap_or(0.0))
            .unwrap_or(f64::NAN)
    }

    /// `E(M) = Σ_ij M_ij E(|i⟩⟨j|)`, evaluated straight from the blocks.
    pub fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        let (n1, n2) = (self.input_dim, self.output_dim);
        if m.shape() != (n1, n1) {
            return Err(Error::DimensionMismatch {
                op: "ChoiMatrix::apply",
                left: m.shape(),
                right: (n1, n1),
            });
        }
        Ok(ComplexMatrix::from_fn(n2, n2, |r, c| {
            let mut acc = c64(0.0, 0.0);
            for i in 0..n1 {
                for j in 0..n1 {
                    acc += m[(i, j)] * self.matrix[(i * n2 + r, j * n2 + c)];
                }
            }
            acc
        }))
    }

    /// `Σ_k A_k† A_k`, recovered as the transpose of `Tr_out J`.
    pub fn completeness(&self) -> ComplexMatrix {
        partial_trace(
            &self.matrix,
            self.input_dim,
            self.output_dim,
            Subsystem::First,
        )
        .expect("shape validated on construction")
        .transpose()
    }
}

/// Unitary dilation `E(M) = Tr_o[U (M ⊗ ρ_a) U† (I ⊗ P_o)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StinespringModel {
    system_dim: usize,
    ancilla_dim: usize,
    output_dim: usize,
    discard_dim: usize,
    unitary: ComplexMatrix,
    ancilla_state: ComplexMatrix,
    projector: ComplexMatrix,
}

const STINESPRING_TOL: f64 = 1e-10;

impl StinespringModel {
    /// `system_dim` and `output_dim` are `n₁` and `n₂`; the ancilla and
    /// discarded dimensions are read from `ancilla_state` and `projector`.
    pub fn new(
        system_dim: usize,
        output_dim: usize,
        unitary: ComplexMatrix,
        ancilla_state: ComplexMatrix,
        projector: ComplexMatrix,
    ) -> Result<Self> {
        let ancilla_dim = ancilla_state.rows();
        let discard_dim = projector.rows();
        if system_dim == 0 || output_dim == 0 || ancilla_dim == 0 || discard_dim == 0 {
            return Err(Error::InvalidDimension(
                "Stinespring dimensions must be positive".into(),
            ));
        }
        if output_dim * discard_dim != system_dim * ancilla_dim {
            return Err(Error::InvalidModel(format!(
                "output partition {output_dim}x{discard_dim} does not match {system_dim}x{ancilla_dim}"
            )));
        }
        let total = system_dim * ancilla_dim;
        if unitary.shape() != (total, total) {
            return Err(Error::DimensionMismatch {
                op: "StinespringModel::new",
                left: unitary.shape(),
                right: (total, total),
            });
        }
        let deviation = unitary.unitarity_deviation();
        if deviation > STINESPRING_TOL {
            return Err(Error::NotUnitary {
                what: "interaction unitary",
                deviation,
            });
        }
        if !ancilla_state.is_square() {
            return Err(Error::NotSquare {
                op: "ancilla state",
                rows: ancilla_state.rows(),
                cols: ancilla_state.cols(),
            });
        }
        let rho_eig = hermitian_eig(&ancilla_state)?;
        let min = rho_eig.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -STINESPRING_TOL {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
        let tr = ancilla_state.trace();
        if (tr - c64(1.0, 0.0)).norm() > STINESPRING_TOL {
            return Err(Error::InvalidModel(format!(
                "ancilla state has trace {tr}, expected 1"
            )));
        }
        if !projector.is_square() {
            return Err(Error::NotSquare {
                op: "projector",
                rows: projector.rows(),
                cols: projector.cols(),
            });
        }
        let idempotence = frobenius_distance(&(&projector * &projector), &projector)?;
        if projector.hermiticity_deviation() > STINESPRING_TOL || idempotence > STINESPRING_TOL {
            return Err(Error::InvalidModel(
                "P_o must be a Hermitian idempotent projector".into(),
            ));
        }
        Ok(Self {
            system_dim,
            ancilla_dim,
            output_dim,
            discard_dim,
            unitary,
            ancilla_state,
            projector,
        })
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn discard_dim(&self) -> usize {
        self.discard_dim
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn ancilla_state(&self) -> &ComplexMatrix {
        &self.ancilla_state
    }

    pub fn projector(&self) -> &ComplexMatrix {
        &self.projector
    }

    pub fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        apply_stinespring(self, m)
    }

    /// Choi matrix assembled block by block from [`apply_stinespring`].
    pub fn to_choi(&self) -> ChoiMatrix {
        let (n1, n2) = (self.system_dim, self.output_dim);
        let mut j = ComplexMatrix::zeros(n1 * n2, n1 * n2);
        for a in 0..n1 {
            for b in 0..n1 {
                let block = apply_stinespring(self, &ComplexMatrix::unit(n1, a, b))
                    .expect("unit matrix has the system shape");
                j.set_block(a, b, &block);
            }
        }
        ChoiMatrix::new(n1, n2, j.hermitian_part()).expect("block assembly is Hermitian")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CpTpVerdict {
    pub is_cp: bool,
    pub min_choi_eigenvalue: f64,
    pub is_trace_preserving: bool,
    pub is_trace_nonincreasing: bool,
    /// `‖Σ A†A − I‖_F`
    pub deviation_from_identity: f64,
}

pub fn apply_kraus(k: &KrausSet, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.shape() != (k.input_dim, k.input_dim) {
        return Err(Error::DimensionMismatch {
            op: "apply_kraus",
            left: m.shape(),
            right: (k.input_dim, k.input_dim),
        });
    }
    let mut out = ComplexMatrix::zeros(k.output_dim, k.output_dim);
    for a in &k.operators {
        out = &out + &(&(a * m) * &a.adjoint());
    }
    Ok(out)
}

/// `vec(A) = Σᵢ |i⟩ ⊗ A|i⟩`: column `i` of `A` becomes segment `i`.
fn vectorize(a: &ComplexMatrix) -> Vec<C64> {
    let (n2, n1) = a.shape();
    let mut v = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        for r in 0..n2 {
            v.push(a[(r, i)]);
        }
    }
    v
}

/// `J = Σ_k vec(A_k) vec(A_k)†`.
pub fn kraus_to_choi(k: &KrausSet) -> ChoiMatrix {
    let d = k.input_dim * k.output_dim;
    let mut j = ComplexMatrix::zeros(d, d);
    for a in &k.operators {
        let v = vectorize(a);
        j = &j + &ComplexMatrix::outer(&v, &v);
    }
    ChoiMatrix {
        input_dim: k.input_dim,
        output_dim: k.output_dim,
        matrix: j,
    }
}

/// Canonical Kraus set from the eigendecomposition of a Choi matrix, using
/// [`DEFAULT_KRAUS_THRESHOLD`].
pub fn choi_to_kraus(j: &ChoiMatrix) -> Result<KrausSet> {
    choi_to_kraus_with_threshold(j, DEFAULT_KRAUS_THRESHOLD)
}

/// Each eigenvalue `λ_k > threshold` contributes `A_k` whose `i`-th column is
/// the `i`-th length-`n₂` segment of `√λ_k |v_k⟩`. Eigenvalues in
/// `[-CP_TOL, 0)` are treated as zero; anything more negative is an error.
pub fn choi_to_kraus_with_threshold(j: &ChoiMatrix, threshold: f64) -> Result<KrausSet> {
    let eig = j.eigen()?;
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -CP_TOL {
        return Err(Error::NotCompletelyPositive {
            min_eigenvalue: min,
        });
    }
    Ok(kraus_from_eigen(&eig, j.input_dim, j.output_dim, threshold))
}

/// Builds Kraus operators from the eigenpairs above `threshold`, ignoring the
/// rest (including negative eigenvalues). Falls back to a single zero operator
/// when nothing survives.
pub(crate) fn kraus_from_eigen(
    eig: &HermitianEigenDecomposition,
    n1: usize,
    n2: usize,
    threshold: f64,
) -> KrausSet {
    let threshold = threshold.max(0.0);
    let mut ops = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= threshold {
            continue;
        }
        let scale = lambda.sqrt();
        let v = eig.eigenvector(k);
        ops.push(ComplexMatrix::from_fn(n2, n1, |r, i| v[i * n2 + r] * scale));
    }
    if ops.is_empty() {
        ops.push(ComplexMatrix::zeros(n2, n1));
    }
    KrausSet {
        input_dim: n1,
        output_dim: n2,
        operators: ops,
    }
}

pub fn apply_stinespring(s: &StinespringModel, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.shape() != (s.system_dim, s.system_dim) {
        return Err(Error::DimensionMismatch {
            op: "apply_stinespring",
            left: m.shape(),
            right: (s.system_dim, s.system_dim),
        });
    }
    let joint = tensor_product(m, &s.ancilla_state);
    let evolved = &(&s.unitary * &joint) * &s.unitary.adjoint();
    let post_selected =
        &evolved * &tensor_product(&ComplexMatrix::identity(s.output_dim), &s.projector);
    partial_trace(
        &post_selected,
        s.output_dim,
        s.discard_dim,
        Subsystem::First,
    )
}

fn verdict(min_choi_eigenvalue: f64, completeness: &ComplexMatrix) -> CpTpVerdict {
    let n = completeness.rows();
    let identity = ComplexMatrix::identity(n);
    let deviation_from_identity =
        frobenius_distance(completeness, &identity).expect("completeness is n₁ x n₁");
    let spectrum = hermitian_eig(&completeness.hermitian_part())
        .expect("Hermitian part is Hermitian")
        .eigenvalues;
    let max = spectrum.first().copied().unwrap_or(0.0);
    let is_trace_nonincreasing = max <= 1.0 + TRACE_TOL;
    let is_trace_preserving =
        is_trace_nonincreasing && spectrum.iter().all(|&l| (l - 1.0).abs() <= TRACE_TOL);
    CpTpVerdict {
        is_cp: min_choi_eigenvalue >= -CP_TOL,
        min_choi_eigenvalue,
        is_trace_preserving,
        is_trace_nonincreasing,
        deviation_from_identity,
    }
}

pub fn check_cp_tp(k: &KrausSet) -> CpTpVerdict {
    verdict(kraus_to_choi(k).min_eigenvalue(), &k.completeness())
}

/// Same verdict computed from a Choi matrix, which need not be positive.
pub fn check_cp_tp_choi(j: &ChoiMatrix) -> CpTpVerdict {
    verdict(j.min_eigenvalue(), &j.completeness())
}

/// Two Kraus sets describe the same channel iff their Choi matrices agree.
pub fn kraus_equivalent(k1: &KrausSet, k2: &KrausSet, tol: f64) -> Result<bool> {
    if (k1.input_dim, k1.output_dim) != (k2.input_dim, k2.output_dim) {
        return Err(Error::DimensionMismatch {
            op: "kraus_equivalent",
            left: (k1.output_dim, k1.input_dim),
            right: (k2.output_dim, k2.input_dim),
        });
    }
    let distance = frobenius_distance(kraus_to_choi(k1).matrix(), kraus_to_choi(k2).matrix())?;
    Ok(distance < tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZooName {
    Identity,
    Unitary,
    Depolarizing,
    AmplitudeDamping,
    PhaseDamping,
    ProjectDiscard,
    RandomCptp,
}

impl ZooName {
    pub const ALL: [ZooName; 7] = [
        ZooName::Identity,
        ZooName::Unitary,
        ZooName::Depolarizing,
        ZooName::AmplitudeDamping,
        ZooName::PhaseDamping,
        ZooName::ProjectDiscard,
        ZooName::RandomCptp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ZooName::Identity => "identity",
            ZooName::Unitary => "unitary",
            ZooName::Depolarizing => "depolarizing",
            ZooName::AmplitudeDamping => "amplitude_damping",
            ZooName::PhaseDamping => "phase_damping",
            ZooName::ProjectDiscard => "project_discard",
            ZooName::RandomCptp => "random_cptp",
        }
    }

    pub fn valid_names() -> Vec<&'static str> {
        Self::ALL.iter().map(|z| z.as_str()).collect()
    }
}

impl fmt::Display for ZooName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ZooName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|z| z.as_str() == s)
            .ok_or_else(|| Error::UnknownChannel {
                name: s.to_string(),
                valid: Self::valid_names(),
            })
    }
}

fn expect_params(name: ZooName, params: &[f64], allowed: &[usize]) -> Result<()> {
    if !allowed.contains(&params.len()) {
        return Err(Error::InvalidParameter(format!(
            "{name} takes {allowed:?} parameters, got {}",
            params.len()
        )));
    }
    if let Some(p) = params.iter().find(|p| !p.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "{name}: parameter {p} is not finite"
        )));
    }
    Ok(())
}

fn probability(name: ZooName, label: &str, value: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidParameter(format!(
            "{name}: {label} = {value} is outside [0, 1]"
        )));
    }
    Ok(value)
}

fn nonnegative_integer(name: ZooName, label: &str, value: f64) -> Result<u64> {
    if value < 0.0 || value.fract() != 0.0 || value > 9.007_199_254_740_992e15 {
        return Err(Error::InvalidParameter(format!(
            "{name}: {label} = {value} must be a nonnegative integer"
        )));
    }
    Ok(value as u64)
}

/// Weyl operator `X^a Z^b` with `X|k⟩ = |k+1⟩`, `Z|k⟩ = ω^k |k⟩`.
fn weyl(n: usize, a: usize, b: usize) -> ComplexMatrix {
    let omega = std::f64::consts::TAU / n as f64;
    let mut w = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        w[((k + a) % n, k)] = C64::from_polar(1.0, omega * ((b * k) % n) as f64);
    }
    w
}

/// Builds a textbook channel by name.
///
/// | name | params | notes |
/// |------|--------|-------|
/// | `identity` | none | |
/// | `unitary` | `[θ]` (default π/4) | `U|k⟩ = e^{iθk} |k+1 mod n⟩` |
/// | `depolarizing` | `[p]` | `(1−p)ρ + p Tr(ρ) I/n` |
/// | `amplitude_damping` | `[γ]` | every level `k ≥ 1` decays to `|0⟩` |
/// | `phase_damping` | `[λ]` | off-diagonals of levels `k ≥ 1` shrink by `√(1−λ)` |
/// | `project_discard` | none | `{|0⟩⟨0|}`, trace decreasing |
/// | `random_cptp` | `[seed, count]` | isometry split into `count` blocks |
///
/// Only `random_cptp` allows `input_dim != output_dim`. Operators that are
/// exactly zero are dropped.
pub fn zoo_channel(
    name: &str,
    params: &[f64],
    input_dim: usize,
    output_dim: usize,
) -> Result<KrausSet> {
    let name: ZooName = name.parse()?;
    if input_dim == 0 || output_dim == 0 {
        return Err(Error::InvalidDimension(format!(
            "{name}: dimensions must be positive, got ({input_dim}, {output_dim})"
        )));
    }
    if name != ZooName::RandomCptp && input_dim != output_dim {
        return Err(Error::InvalidDimension(format!(
            "{name} needs equal input and output dimensions, got ({input_dim}, {output_dim})"
        )));
    }
    let n = input_dim;
    let ops = match name {
        ZooName::Identity => {
            expect_params(name, params, &[0])?;
            vec![ComplexMatrix::identity(n)]
        }
        ZooName::Unitary => {
            expect_params(name, params, &[0, 1])?;
            let theta = params
                .first()
                .copied()
                .unwrap_or(std::f64::consts::FRAC_PI_4);
            let mut u = ComplexMatrix::zeros(n, n);
            for k in 0..n {
                u[((k + 1) % n, k)] = C64::from_polar(1.0, theta * k as f64);
            }
            vec![u]
        }
        ZooName::Depolarizing => {
            expect_params(name, params, &[1])?;
            let p = probability(name, "p", params[0])?;
            let d2 = (n * n) as f64;
            let mut ops = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    let weight = if a == 0 && b == 0 {
                        1.0 - p + p / d2
                    } else {
                        p / d2
                    };
                    ops.push(weyl(n, a, b).scale_real(weight.sqrt()));
                }
            }
            ops
        }
        ZooName::AmplitudeDamping => {
            expect_params(name, params, &[1])?;
            let gamma = probability(name, "gamma", params[0])?;
            let keep = (1.0 - gamma).sqrt();
            let mut a0 = ComplexMatrix::identity(n).scale_real(keep);
            a0[(0, 0)] = c64(1.0, 0.0);
            let mut ops = vec![a0];
            for k in 1..n {
                let mut a = ComplexMatrix::zeros(n, n);
                a[(0, k)] = c64(gamma.sqrt(), 0.0);
                ops.push(a);
            }
            ops
        }
        ZooName::PhaseDamping => {
            expect_params(name, params, &[1])?;
            let lambda = probability(name, "lambda", params[0])?;
            let mut a0 = ComplexMatrix::identity(n).scale_real((1.0 - lambda).sqrt());
            a0[(0, 0)] = c64(1.0, 0.0);
            let mut ops = vec![a0];
            for k in 1..n {
                let mut a = ComplexMatrix::zeros(n, n);
                a[(k, k)] = c64(lambda.sqrt(), 0.0);
                ops.push(a);
            }
            ops
        }
        ZooName::ProjectDiscard => {
            expect_params(name, params, &[0])?;
            vec![ComplexMatrix::unit(n, 0, 0)]
        }
        ZooName::RandomCptp => {
            expect_params(name, params, &[2])?;
            let seed = nonnegative_integer(name, "seed", params[0])?;
            let count = nonnegative_integer(name, "count", params[1])? as usize;
            if count == 0 || output_dim * count < input_dim {
                return Err(Error::InvalidParameter(format!(
                    "random_cptp: count = {count} cannot give an isometry from {input_dim} into {output_dim}x{count}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = random_isometry(output_dim * count, input_dim, &mut rng);
            (0..count)
                .map(|k| v.block(k, 0, output_dim, input_dim))
                .collect()
        }
    };
    let mut ops: Vec<ComplexMatrix> = ops
        .into_iter()
        .filter(|a| a.frobenius_norm() > 0.0)
        .collect();
    if ops.is_empty() {
        ops.push(ComplexMatrix::zeros(output_dim, input_dim));
    }
    KrausSet::new(input_dim, output_dim, ops)
}
