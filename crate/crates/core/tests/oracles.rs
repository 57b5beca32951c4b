//! Reference values computed independently with mpmath (actions) or frozen
//! from a run that passed every structural check (monodromy).

use lagtop::intmat;
use lagtop::periods::{action_i1, action_i1_cubic};
use lagtop::tracking::{
    cushman_loop, gamma_sub_basis_g2, kappa_loop, monodromy_batch, monodromy_periods, monodromy_with, CUSHMAN_BASE,
    KAPPA_BASE, TRANSPORT_TOL,
};
use lagtop::Exec;
use proptest::prelude::*;

const I1_REFERENCE: [([f64; 3], f64); 8] = [
    ([0.3, 1.2, 0.2], 0.796_788_834_744_613_4),
    ([0.5, 1.0, -0.3], 0.776_661_182_111_579),
    ([0.1, 0.5, 0.3], 0.588_437_893_944_312_5),
    ([1.0, 2.0, 0.0], 0.878_176_336_093_155),
    ([0.8, 1.5, 0.4], 0.705_121_447_902_225_7),
    ([0.5, 2.5, 0.0], 1.266_387_808_179_134_7),
    ([0.5, 3.0, 0.0], 1.433_054_295_981_991_2),
    ([0.5, 4.0, 0.0], 1.718_667_332_506_326),
];

#[test]
fn action_matches_reference() {
    for (a, want) in I1_REFERENCE {
        let q = action_i1(a, 1.0).unwrap();
        let c = action_i1_cubic(a, 1.0).unwrap();
        assert!((q - want).abs() < 1e-9, "{a:?}: quartic {q} vs {want}");
        assert!((c - want).abs() < 1e-9, "{a:?}: cubic {c} vs {want}");
    }
}

#[test]
fn action_scales_linearly() {
    let a = [0.3, 1.2, 0.2];
    let one = action_i1(a, 1.0).unwrap();
    let three = action_i1(a, 3.0).unwrap();
    assert!((three - 3.0 * one).abs() < 1e-12);
}

#[test]
fn action_vanishes_at_the_discriminant() {
    let mut last = f64::INFINITY;
    for eps in [1e-1, 1e-2, 1e-3] {
        let v = action_i1([1.0, eps, 1.0], 1.0).unwrap();
        assert!(v < last);
        last = v;
    }
    assert!(last < 0.05, "{last}");
}

#[test]
fn cushman_reference() {
    let m = monodromy_periods(&cushman_loop(CUSHMAN_BASE)).unwrap();
    assert_eq!(m.permutation, vec![2, 3, 0, 1]);
    assert_eq!(m.matrix, vec![vec![0, 1, 0], vec![-1, 2, 0], vec![0, 0, 1]]);
    assert_eq!(m.det(), 1);
    assert!(m.residual < 1e-8);
}

#[test]
fn kappa3_reference() {
    let m = monodromy_periods(&kappa_loop(3, KAPPA_BASE).unwrap()).unwrap();
    assert_eq!(m.permutation, vec![0, 1, 4, 5, 2, 3]);
    let want = vec![
        vec![1, 0, 0, 0, 0],
        vec![0, 0, 1, 0, 0],
        vec![0, -1, 2, 0, 0],
        vec![0, 0, 0, 1, 0],
        vec![0, 0, 0, -1, 1],
    ];
    assert_eq!(m.matrix, want);
    let sub = gamma_sub_basis_g2(&m.matrix, [0, 1, 2]).unwrap();
    assert_eq!(sub, vec![vec![1, -1, 0], vec![0, 1, 0], vec![0, -1, 1]]);
}

#[test]
fn doubled_loop_squares() {
    let c = cushman_loop(CUSHMAN_BASE);
    let once = monodromy_periods(&c).unwrap();
    let twice = monodromy_periods(&c.then(&c)).unwrap();
    assert_eq!(twice.matrix, intmat::matmul(&once.matrix, &once.matrix));
    let perm2: Vec<usize> = once.permutation.iter().map(|&k| once.permutation[k]).collect();
    assert_eq!(twice.permutation, perm2);
}

#[test]
fn inverse_loop_inverts() {
    let c = cushman_loop(CUSHMAN_BASE);
    let m = monodromy_periods(&c).unwrap();
    let inv = monodromy_periods(&c.inverse()).unwrap();
    assert_eq!(intmat::matmul(&m.matrix, &inv.matrix), intmat::identity(3));
}

#[test]
fn sequential_and_parallel_agree() {
    let loops = vec![cushman_loop(CUSHMAN_BASE), kappa_loop(3, KAPPA_BASE).unwrap()];
    let par = monodromy_batch(&loops, Exec::Parallel);
    let seq = monodromy_batch(&loops, Exec::Sequential);
    for (p, s) in par.iter().zip(&seq) {
        assert_eq!(p.as_ref().unwrap().matrix, s.as_ref().unwrap().matrix);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn cushman_class_is_stable_under_base_moves(
        da1 in -0.1..0.1f64,
        da2 in -0.2..0.2f64,
        da3 in -0.1..0.1f64,
    ) {
        let base = [CUSHMAN_BASE[0] + da1, CUSHMAN_BASE[1] + da2, CUSHMAN_BASE[2] + da3];
        let m = monodromy_with(&cushman_loop(base), false, TRANSPORT_TOL, Exec::Sequential).unwrap();
        prop_assert_eq!(&m.matrix, &vec![vec![0, 1, 0], vec![-1, 2, 0], vec![0, 0, 1]]);
        prop_assert_eq!(m.det(), 1);
    }
}
