//! Independent reference implementations. Nothing here calls into the crate's
//! numerics; inputs are plain `Vec<Vec<f64>>` columns.
#![allow(dead_code)]

use deepmp_core::nalgebra::DMatrix;

pub fn columns(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.ncols()).map(|j| m.column(j).iter().copied().collect()).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Coherence by the definition: double loop over distinct pairs.
pub fn brute_coherence(cols: &[Vec<f64>]) -> f64 {
    brute_pairs(cols).into_iter().fold(0.0, f64::max)
}

pub fn brute_pairs(cols: &[Vec<f64>]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..cols.len() {
        for j in i + 1..cols.len() {
            let v = (dot(&cols[i], &cols[j]) / (norm(&cols[i]) * norm(&cols[j]))).abs();
            out.push(v.min(1.0));
        }
    }
    out
}

/// Fraction of pairs with coherence ≤ t, counted one by one.
pub fn brute_ecdf(cols: &[Vec<f64>], t: f64) -> f64 {
    let pairs = brute_pairs(cols);
    pairs.iter().filter(|&&v| v <= t).count() as f64 / pairs.len() as f64
}

/// Recovered fraction by set enumeration over 0..n.
pub fn brute_hamming(acquired: &[usize], truth: &[usize], k: usize, n: usize) -> f64 {
    let hits = (0..n).filter(|j| acquired.contains(j) && truth.contains(j)).count();
    hits as f64 / k as f64
}

/// Projected gradient descent on ½‖Ax − b‖², x ≥ 0, step 1/‖A‖_F².
pub fn projected_gradient_nnls(cols: &[Vec<f64>], b: &[f64], iters: usize) -> Vec<f64> {
    let n = cols.len();
    let lip: f64 = cols.iter().map(|c| dot(c, c)).sum();
    let step = 1.0 / lip;
    let mut x = vec![0.0; n];
    for _ in 0..iters {
        let mut r: Vec<f64> = b.iter().map(|v| -v).collect();
        for (c, &xj) in cols.iter().zip(&x) {
            for (ri, ci) in r.iter_mut().zip(c) {
                *ri += ci * xj;
            }
        }
        let mut moved = 0.0f64;
        for (j, c) in cols.iter().enumerate() {
            let next = (x[j] - step * dot(c, &r)).max(0.0);
            moved = moved.max((next - x[j]).abs());
            x[j] = next;
        }
        if moved < 1e-15 {
            break;
        }
    }
    x
}

/// Gradient `Aᵀ(Ax − b)`.
pub fn nnls_gradient(cols: &[Vec<f64>], b: &[f64], x: &[f64]) -> Vec<f64> {
    let mut r: Vec<f64> = b.iter().map(|v| -v).collect();
    for (c, &xj) in cols.iter().zip(x) {
        for (ri, ci) in r.iter_mut().zip(c) {
            *ri += ci * xj;
        }
    }
    cols.iter().map(|c| dot(c, &r)).collect()
}

/// Two-column least squares by Cramer's rule on the normal equations.
pub fn two_column_lstsq(a: &[f64], b: &[f64], y: &[f64]) -> (f64, f64) {
    let (aa, ab, bb) = (dot(a, a), dot(a, b), dot(b, b));
    let (ay, by) = (dot(a, y), dot(b, y));
    let det = aa * bb - ab * ab;
    ((ay * bb - ab * by) / det, (aa * by - ab * ay) / det)
}

/// Best non-negative 2-atom fit by enumerating every pair; returns the pair
/// and its residual norm.
pub fn best_pair(cols: &[Vec<f64>], y: &[f64]) -> ((usize, usize), f64) {
    let mut best = ((0, 0), f64::INFINITY);
    for i in 0..cols.len() {
        for j in i + 1..cols.len() {
            let x = projected_gradient_nnls(&[cols[i].clone(), cols[j].clone()], y, 20_000);
            let r: Vec<f64> = (0..y.len()).map(|m| y[m] - x[0] * cols[i][m] - x[1] * cols[j][m]).collect();
            let rn = norm(&r);
            if rn < best.1 {
                best = ((i, j), rn);
            }
        }
    }
    best
}

/// Scalar AdaBound transcription: returns (new param, m, v).
#[allow(clippy::too_many_arguments)]
pub fn adabound_scalar(p: f64, g: f64, m: f64, v: f64, t: u64, lr: f64, final_lr: f64, b1: f64, b2: f64, gamma: f64, eps: f64) -> (f64, f64, f64) {
    let m = b1 * m + (1.0 - b1) * g;
    let v = b2 * v + (1.0 - b2) * g * g;
    let m_hat = m / (1.0 - b1.powi(t as i32));
    let v_hat = v / (1.0 - b2.powi(t as i32));
    let lower = final_lr * (1.0 - 1.0 / (gamma * t as f64 + 1.0));
    let upper = final_lr * (1.0 + 1.0 / (gamma * t as f64));
    let raw = lr / (v_hat + eps).sqrt();
    let step = if raw < lower { lower } else if raw > upper { upper } else { raw };
    (p - step * m_hat, m, v)
}

/// Mean cross-entropy of a model on fixed teacher residuals, computed
/// directly from the scores (for finite differences).
pub fn cross_entropy(weights: &[DMatrix<f64>], residuals: &[Vec<Vec<f64>>], targets: &[Vec<usize>]) -> f64 {
    let mut total = 0.0;
    let mut terms = 0;
    for (rs, ts) in residuals.iter().zip(targets) {
        for (k, r) in rs.iter().enumerate() {
            let w = &weights[k];
            let scores: Vec<f64> = (0..w.ncols()).map(|j| dot(w.column(j).as_slice(), r)).collect();
            let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
            total += lse - scores[ts[k]];
            terms += 1;
        }
    }
    total / terms as f64
}
