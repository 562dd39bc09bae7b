use nalgebra::DMatrix;

use crate::dictionary::Dictionary;
use crate::error::Result;
use crate::linalg;
use crate::types::{Signal, SparseCode, SupportSet};

use super::{check_inputs, hard_max, nnls_active_set, PursuitResult, RESIDUAL_FLOOR};

/// Non-negative orthogonal matching pursuit.
///
/// Selection is the NNMP rule restricted to atoms not yet chosen; after each
/// selection every chosen atom is refit jointly by [`nnls_active_set`] and the
/// residual becomes `y − Φ_s x_s` with no projection.
pub fn nnomp_solve(dict: &Dictionary, y: &Signal, budget: usize) -> Result<PursuitResult> {
    check_inputs(dict.signal_dim(), y, budget)?;
    let n = dict.num_atoms();
    let target = y.as_slice();

    let mut r = target.to_vec();
    let mut x = vec![0.0; n];
    let mut chosen = vec![false; n];
    let mut support = SupportSet::default();
    let mut norms = vec![linalg::norm(&r)];

    while support.len() < budget.min(n) && norms[norms.len() - 1] >= RESIDUAL_FLOOR {
        let mut scores = dict.correlate(&r);
        for (s, &c) in scores.iter_mut().zip(&chosen) {
            if c {
                *s = f64::NEG_INFINITY;
            }
        }
        let (zeta, iota) = hard_max(&scores)?;
        if !(zeta > 0.0) {
            break;
        }
        chosen[iota] = true;
        support.push(iota);

        let cols = support.indices();
        let mut sub = DMatrix::zeros(dict.signal_dim(), cols.len());
        for (k, &j) in cols.iter().enumerate() {
            sub.column_mut(k).copy_from_slice(dict.atom(j));
        }
        let coeffs = nnls_active_set(&sub, target)?;

        r.copy_from_slice(target);
        for (&j, &c) in cols.iter().zip(&coeffs) {
            x[j] = c;
            if c != 0.0 {
                linalg::axpy(-c, dict.atom(j), &mut r);
            }
        }
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
