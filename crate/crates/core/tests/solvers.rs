mod common;

use common::*;
use deepmp_core::datagen::{generate_synthetic_dictionary, rng_from_seed};
use deepmp_core::nalgebra::DMatrix;
use deepmp_core::{hard_max, nnls_active_set, nnmp_solve, nnomp_solve, Dictionary, ProjectionMode, Signal};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

fn random_signal(m: usize, seed: u64) -> Signal {
    let mut rng = rng_from_seed(seed);
    Signal::new((0..m).map(|_| StandardNormal.sample(&mut rng)).collect()).unwrap()
}

fn nonneg_signal(m: usize, seed: u64) -> Signal {
    let mut rng = rng_from_seed(seed);
    Signal::new((0..m).map(|_| rng.random::<f64>()).collect()).unwrap()
}

fn mix(dict: &Dictionary, terms: &[(usize, f64)]) -> Signal {
    let mut y = vec![0.0; dict.signal_dim()];
    for &(j, c) in terms {
        for (v, a) in y.iter_mut().zip(dict.atom(j)) {
            *v += c * a;
        }
    }
    Signal::new(y).unwrap()
}

#[test]
fn hard_max_examples() {
    assert_eq!(hard_max(&[0.2, 0.9, 0.1]).unwrap(), (0.9, 1));
    assert_eq!(hard_max(&[0.5, 0.5]).unwrap(), (0.5, 0));
}

#[test]
fn self_inner_product_is_the_strict_maximum() {
    let d = generate_synthetic_dictionary(30, 200, 4).unwrap();
    let cols = columns(d.matrix());
    assert!(brute_coherence(&cols) < 1.0);
    for j in 0..200 {
        let (v, i) = hard_max(&d.correlate(d.atom(j))).unwrap();
        assert_eq!(i, j);
        assert!((v - 1.0).abs() < 1e-12);
    }
}

#[test]
fn nnmp_two_atom_example_against_exhaustive_oracle() {
    // first synthetic 10×50 dictionary where atom 2 is the oracle's first pick
    let (d, cols, y) = (0..)
        .map(|seed| {
            let d = generate_synthetic_dictionary(10, 50, seed).unwrap();
            let y = mix(&d, &[(2, 0.8), (9, 0.3)]);
            (d.clone(), columns(d.matrix()), y)
        })
        .find(|(_, cols, y)| {
            let scores: Vec<f64> = cols.iter().map(|c| dot(c, y.as_slice())).collect();
            (0..50).all(|j| j == 2 || scores[j] < scores[2])
        })
        .unwrap();
    let ((a, b), best) = best_pair(&cols, y.as_slice());
    assert_eq!((a, b), (2, 9));
    assert!(best < 1e-6);

    let r = nnmp_solve(&d, &y, 2, ProjectionMode::PositiveOrthant).unwrap();
    assert_eq!(r.support.indices()[0], 2);
    let n = &r.residual_norms;
    assert_eq!(n.len(), 3);
    assert!(n[2] < n[1] && n[1] < n[0]);
    assert!((n[0] - norm(y.as_slice())).abs() < 1e-12);
}

#[test]
fn one_sparse_inputs_are_recovered_at_step_one() {
    let d = generate_synthetic_dictionary(20, 60, 8).unwrap();
    for j in 0..60 {
        let y = mix(&d, &[(j, 0.7)]);
        let a = nnmp_solve(&d, &y, 1, ProjectionMode::PositiveOrthant).unwrap();
        assert_eq!(a.support.indices(), &[j]);
        assert!((a.code.as_slice()[j] - 0.7).abs() < 1e-12);
        let b = nnomp_solve(&d, &y, 2).unwrap();
        assert_eq!(b.support.indices(), &[j]);
        assert_eq!(b.steps_taken, 1);
        assert!((b.code.as_slice()[j] - 0.7).abs() < 1e-9);
    }
}

#[test]
fn nnomp_matches_closed_form_two_column_fit() {
    // low coherence: columns are sparse non-negative bumps
    let mut m = DMatrix::zeros(20, 40);
    let mut rng = rng_from_seed(77);
    for j in 0..40 {
        m[(j % 20, j)] = 1.0;
        m[((j * 7 + 3) % 20, j)] = 0.2 * rng.random::<f64>();
    }
    for mut c in m.column_iter_mut() {
        let n = c.norm();
        c /= n;
    }
    let d = Dictionary::new(m).unwrap();
    let y = mix(&d, &[(2, 0.8), (9, 0.3)]);
    let r = nnomp_solve(&d, &y, 2).unwrap();
    let mut s = r.support.indices().to_vec();
    s.sort();
    assert_eq!(s, vec![2, 9]);
    let (c2, c9) = two_column_lstsq(d.atom(2), d.atom(9), y.as_slice());
    assert!((r.code.as_slice()[2] - c2).abs() < 1e-6 && (c2 - 0.8).abs() < 1e-6);
    assert!((r.code.as_slice()[9] - c9).abs() < 1e-6 && (c9 - 0.3).abs() < 1e-6);
    assert_eq!(nnomp_solve(&d, &y, 2).unwrap(), r);
}

#[test]
fn nnls_kkt_and_projected_gradient_oracle() {
    let mut rng = rng_from_seed(5);
    for trial in 0..100 {
        let (rows, ncols) = (8, 1 + trial % 5);
        let a = DMatrix::from_fn(rows, ncols, |_, _| StandardNormal.sample(&mut rng));
        let b: Vec<f64> = (0..rows).map(|_| StandardNormal.sample(&mut rng)).collect();
        let x = nnls_active_set(&a, &b).unwrap();
        let cols = columns(&a);
        let g = nnls_gradient(&cols, &b, &x);
        for (xi, gi) in x.iter().zip(&g) {
            assert!(*xi >= 0.0);
            if *xi > 0.0 {
                assert!(gi.abs() <= 1e-8, "trial {trial}: {g:?} at {x:?}");
            } else {
                assert!(*gi >= -1e-8, "trial {trial}: {g:?} at {x:?}");
            }
        }
        let oracle = projected_gradient_nnls(&cols, &b, 200_000);
        for (u, v) in x.iter().zip(&oracle) {
            assert!((u - v).abs() < 1e-6, "trial {trial}: {x:?} vs {oracle:?}");
        }
    }
}

fn reconstruction_residual(d: &Dictionary, y: &Signal, x: &[f64]) -> f64 {
    let cols = columns(d.matrix());
    let r: Vec<f64> = (0..y.len()).map(|m| y.as_slice()[m] - cols.iter().zip(x).map(|(c, xj)| c[m] * xj).sum::<f64>()).collect();
    norm(&r)
}

/// NNLS over a superset of NNMP's atoms cannot fit worse than NNMP's
/// non-negative code; with different supports only the average ordering holds.
#[test]
fn nnomp_residual_dominates_nnmp() {
    let d = generate_synthetic_dictionary(30, 200, 2).unwrap();
    let (mut sum_a, mut sum_b, mut covered) = (0.0, 0.0, 0);
    for seed in 0..300 {
        let y = nonneg_signal(30, seed);
        for k in 1..=5 {
            let a = nnmp_solve(&d, &y, k, ProjectionMode::PositiveOrthant).unwrap();
            let b = nnomp_solve(&d, &y, k).unwrap();
            let ra = reconstruction_residual(&d, &y, a.code.as_slice());
            let rb = reconstruction_residual(&d, &y, b.code.as_slice());
            assert!(b.residual.norm() - rb < 1e-12);
            if a.support.distinct().iter().all(|j| b.support.indices().contains(j)) {
                covered += 1;
                assert!(rb <= ra + 1e-9, "seed {seed} k {k}: {rb} > {ra}");
            }
            if k == 1 {
                assert!(rb <= ra + 1e-9);
            }
            sum_a += ra;
            sum_b += rb;
        }
    }
    assert!(covered > 500, "{covered}");
    assert!(sum_b < sum_a);
}

#[test]
fn identical_inputs_give_identical_outputs() {
    let d = generate_synthetic_dictionary(12, 40, 1).unwrap();
    let y = random_signal(12, 3);
    for proj in [ProjectionMode::Identity, ProjectionMode::PositiveOrthant] {
        assert_eq!(nnmp_solve(&d, &y, 4, proj).unwrap(), nnmp_solve(&d, &y, 4, proj).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nnmp_residual_is_monotone_and_codes_positive(dseed in 0u64..20, yseed in any::<u64>(), k in 1usize..8, signed in any::<bool>()) {
        let d = generate_synthetic_dictionary(15, 40, dseed).unwrap();
        let y = if signed { random_signal(15, yseed) } else { nonneg_signal(15, yseed) };
        let r = nnmp_solve(&d, &y, k, ProjectionMode::PositiveOrthant).unwrap();
        prop_assert!(r.steps_taken <= k);
        prop_assert_eq!(r.residual_norms.len(), r.steps_taken + 1);
        prop_assert_eq!(r.support.len(), r.steps_taken);
        for w in r.residual_norms.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
        for &j in r.support.indices() {
            prop_assert!(r.code.as_slice()[j] > 0.0);
        }
        prop_assert!(r.code.as_slice().iter().all(|&c| c >= 0.0));
    }

    #[test]
    fn nnmp_scale_covariance(dseed in 0u64..10, yseed in any::<u64>(), c in 0.01f64..100.0) {
        let d = generate_synthetic_dictionary(10, 30, dseed).unwrap();
        let y = nonneg_signal(10, yseed);
        let a = nnmp_solve(&d, &y, 3, ProjectionMode::PositiveOrthant).unwrap();
        let b = nnmp_solve(&d, &y.scaled(c).unwrap(), 3, ProjectionMode::PositiveOrthant).unwrap();
        prop_assert_eq!(a.support, b.support);
    }
}
