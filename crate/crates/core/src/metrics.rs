//! Channel comparison and measurement-cost accounting.

use serde::Serialize;

use crate::channels::{ChoiMatrix, CP_TOL};
use crate::error::{Error, Result};
use crate::linalg::{frobenius_distance, hermitian_eig, multiply, ComplexMatrix};

/// Frobenius distance between unnormalized Choi matrices.
pub fn choi_distance(j1: &ChoiMatrix, j2: &ChoiMatrix) -> Result<f64> {
    check_dims(j1, j2, "choi_distance")?;
    frobenius_distance(j1.matrix(), j2.matrix())
}

fn check_dims(j1: &ChoiMatrix, j2: &ChoiMatrix, op: &'static str) -> Result<()> {
    if (j1.input_dim(), j1.output_dim()) != (j2.input_dim(), j2.output_dim()) {
        return Err(Error::DimensionMismatch {
            op,
            left: (j1.input_dim(), j1.output_dim()),
            right: (j2.input_dim(), j2.output_dim()),
        });
    }
    Ok(())
}

/// Principal square root of a PSD matrix; eigenvalues below 1e-12 are clipped.
fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -CP_TOL {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: min,
        });
    }
    Ok(eig.reassemble_with(|l| if l < 1e-12 { 0.0 } else { l.sqrt() }))
}

/// Uhlmann fidelity `Tr(√(√ρ₁ ρ₂ √ρ₁))²` of the Choi states `ρᵢ = Jᵢ / Tr Jᵢ`.
///
/// For trace-preserving channels `Tr J = n₁`. Normalizing by the actual trace
/// keeps `F(J, J) = 1` for trace-decreasing maps as well.
pub fn process_fidelity(j1: &ChoiMatrix, j2: &ChoiMatrix) -> Result<f64> {
    check_dims(j1, j2, "process_fidelity")?;
    let t1 = j1.matrix().trace().re;
    let t2 = j2.matrix().trace().re;
    if !(t1 > 0.0 && t2 > 0.0) {
        return Err(Error::InvalidModel(
            "process fidelity needs Choi matrices with positive trace".into(),
        ));
    }
    let rho1 = j1.matrix().scale_real(1.0 / t1);
    let rho2 = j2.matrix().scale_real(1.0 / t2);
    let s1 = psd_sqrt(&rho1)?;
    // validates positivity of the second argument as well
    psd_sqrt(&rho2)?;
    let inner = multiply(&multiply(&s1, &rho2)?, &s1)?.hermitian_part();
    let root_trace: f64 = hermitian_eig(&inner)?
        .eigenvalues
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .sum();
    Ok((root_trace * root_trace).clamp(0.0, 1.0))
}

/// Measurement cost of ancilla-assisted tomography next to the standard
/// input-state method.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResourceReport {
    pub input_dim: usize,
    pub output_dim: usize,
    /// `n₁ n₂`, the side of the single joint density matrix to be estimated.
    pub joint_state_dim: usize,
    /// `(n₁ n₂)²` ensemble measurements for that one joint state.
    pub ensemble_measurements: usize,
    /// `n₁²` output states of dimension `n₂`, each needing `n₂²` measurements.
    pub prior_method_measurements: usize,
    /// Real parameters of a general `n₁ → n₂` map.
    pub degrees_of_freedom: usize,
}

pub fn resource_report(input_dim: usize, output_dim: usize) -> ResourceReport {
    let joint = input_dim * output_dim;
    ResourceReport {
        input_dim,
        output_dim,
        joint_state_dim: joint,
        ensemble_measurements: joint * joint,
        prior_method_measurements: input_dim * input_dim * output_dim * output_dim,
        degrees_of_freedom: input_dim * input_dim * output_dim * output_dim,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{kraus_to_choi, zoo_channel};
    use crate::linalg::c64;

    fn choi(name: &str, params: &[f64]) -> ChoiMatrix {
        kraus_to_choi(&zoo_channel(name, params, 2, 2).unwrap())
    }

    #[test]
    fn choi_distance_examples() {
        let id = choi("identity", &[]);
        assert_eq!(choi_distance(&id, &id).unwrap(), 0.0);

        // Entry-wise: identity has ones at (0,0),(0,3),(3,0),(3,3); dephasing
        // keeps only the diagonal ones, so two unit entries differ.
        let dephasing = choi("phase_damping", &[1.0]);
        let mut diff = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                diff += (id.matrix()[(r, c)] - dephasing.matrix()[(r, c)]).norm_sqr();
            }
        }
        assert_eq!(diff, 2.0);
        assert!((choi_distance(&id, &dephasing).unwrap() - 2f64.sqrt()).abs() < 1e-15);

        let zero = ChoiMatrix::new(2, 2, ComplexMatrix::zeros(4, 4)).unwrap();
        let dep = choi("depolarizing", &[0.3]);
        assert_eq!(
            choi_distance(&dep, &zero).unwrap(),
            dep.matrix().frobenius_norm()
        );

        let big = kraus_to_choi(&zoo_channel("identity", &[], 3, 3).unwrap());
        assert!(choi_distance(&id, &big).is_err());
    }

    #[test]
    fn process_fidelity_examples() {
        let id = choi("identity", &[]);
        assert!((process_fidelity(&id, &id).unwrap() - 1.0).abs() < 1e-12);
        let dep = choi("depolarizing", &[1.0]);
        assert!((process_fidelity(&id, &dep).unwrap() - 0.25).abs() < 1e-12);
        assert!((process_fidelity(&dep, &id).unwrap() - 0.25).abs() < 1e-12);

        let discard = choi("project_discard", &[]);
        assert!((process_fidelity(&discard, &discard).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn process_fidelity_rejects_indefinite_input() {
        let mut m = ComplexMatrix::identity(4);
        m[(3, 3)] = c64(-0.5, 0.0);
        let bad = ChoiMatrix::new(2, 2, m).unwrap();
        let id = choi("identity", &[]);
        assert!(matches!(
            process_fidelity(&bad, &id),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
        assert!(matches!(
            process_fidelity(&id, &bad),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn resource_report_examples() {
        let r = resource_report(2, 2);
        assert_eq!((r.joint_state_dim, r.ensemble_measurements), (4, 16));
        let r = resource_report(2, 3);
        assert_eq!((r.joint_state_dim, r.ensemble_measurements), (6, 36));
        let r = resource_report(3, 3);
        assert_eq!(r.ensemble_measurements, 81);
        assert_eq!(r.prior_method_measurements, 81);
        assert_eq!(resource_report(4, 4).ensemble_measurements, 256);
    }
}
