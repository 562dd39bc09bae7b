use crate::dictionary::Dictionary;
use crate::error::Result;
use crate::linalg;
use crate::types::{Signal, SparseCode, SupportSet};

use super::{check_inputs, hard_max, ProjectionMode, PursuitResult, RESIDUAL_FLOOR};

/// Non-negative matching pursuit.
///
/// Each step picks `(ζ, ι) = hard_max(Φᵀ r)`, adds `ζ` to `x[ι]` and sets
/// `r ← P(r − ζ φ_ι)`. The loop runs while fewer than `budget` steps have
/// been taken and the best correlation is strictly positive, so every
/// accumulated coefficient is positive.
pub fn nnmp_solve(dict: &Dictionary, y: &Signal, budget: usize, proj: ProjectionMode) -> Result<PursuitResult> {
    check_inputs(dict.signal_dim(), y, budget)?;

    let mut r = y.as_slice().to_vec();
    let mut x = vec![0.0; dict.num_atoms()];
    let mut support = SupportSet::default();
    let mut norms = vec![linalg::norm(&r)];

    while support.len() < budget && norms[norms.len() - 1] >= RESIDUAL_FLOOR {
        let (zeta, iota) = hard_max(&dict.correlate(&r))?;
        if !(zeta > 0.0) {
            break;
        }
        x[iota] += zeta;
        support.push(iota);
        linalg::axpy(-zeta, dict.atom(iota), &mut r);
        proj.apply(&mut r);
        norms.push(linalg::norm(&r));
    }

    Ok(PursuitResult {
        code: SparseCode::from_vec_unchecked(x),
        steps_taken: support.len(),
        support,
        residual: Signal::from_vec_unchecked(r),
        residual_norms: norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use nalgebra::DMatrix;

    fn toy() -> Dictionary {
        // e1, e2, e3, (e1+e2)/√2
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Dictionary::new(DMatrix::from_column_slice(
            3,
            4,
            &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, h, h, 0.0],
        ))
        .unwrap()
    }

    #[test]
    fn single_atom_is_recovered_in_one_step() {
        let d = toy();
        let y = Signal::new(d.atom(3).to_vec()).unwrap();
        let res = nnmp_solve(&d, &y, 1, ProjectionMode::PositiveOrthant).unwrap();
        assert_eq!(res.support.indices(), &[3]);
        assert!((res.code.as_slice()[3] - 1.0).abs() < 1e-12);
        assert!(res.residual.norm() < 1e-12);
    }

    #[test]
    fn zero_signal_takes_no_steps() {
        let d = toy();
        let res = nnmp_solve(&d, &Signal::zeros(3), 4, ProjectionMode::Identity).unwrap();
        assert_eq!(res.steps_taken, 0);
        assert!(res.support.is_empty());
        assert_eq!(res.code.nnz(), 0);
    }

    #[test]
    fn stops_when_no_positive_correlation() {
        let d = toy();
        let y = Signal::new(vec![-1.0, -1.0, -0.5]).unwrap();
        let res = nnmp_solve(&d, &y, 3, ProjectionMode::Identity).unwrap();
        assert_eq!(res.steps_taken, 0);
    }

    #[test]
    fn bad_inputs() {
        let d = toy();
        assert!(matches!(nnmp_solve(&d, &Signal::zeros(2), 1, ProjectionMode::Identity), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(nnmp_solve(&d, &Signal::zeros(3), 0, ProjectionMode::Identity), Err(Error::ZeroBudget)));
    }
}
