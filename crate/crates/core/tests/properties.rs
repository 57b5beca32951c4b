use lagtop::discriminant::{delta_c_section, g2_branch};
use lagtop::homology::{
    form_value, intersection, picard_lefschetz_turns, picard_lefschetz_with, standard_form, transvection_matrix,
    BranchConfig, CycleClass,
};
use lagtop::intmat;
use lagtop::periods::{ellipse_integrals, period_forms};
use lagtop::spectral::identity_residual;
use lagtop::topsys::{bracket_residuals, TopState};
use lagtop::{ComplexPoly, C64};
use proptest::prelude::*;

fn state(g: usize) -> impl Strategy<Value = TopState> {
    (
        0.0..1.0f64,
        prop::array::uniform3(-2.0..2.0f64),
        prop::collection::vec(prop::array::uniform3(-2.0..2.0f64), g),
    )
        .prop_map(move |(m, omega, gamma)| TopState::new(g, m, omega, gamma).unwrap())
}

fn any_state() -> impl Strategy<Value = TopState> {
    (0usize..=3).prop_flat_map(state)
}

fn cycles(g: usize) -> impl Strategy<Value = (Vec<i64>, Vec<i64>, Vec<i64>)> {
    let v = || prop::collection::vec(-4i64..=4, 2 * g + 1);
    (v(), v(), v())
}

proptest! {
    #[test]
    fn spectral_identity_holds(s in any_state()) {
        prop_assert!(identity_residual(&s) < 1e-12);
    }

    #[test]
    fn bracket_is_lie_and_integrals_commute(s in (1usize..=3).prop_flat_map(state)) {
        let b = bracket_residuals(&s);
        prop_assert!(b.antisymmetry < 1e-10);
        prop_assert!(b.jacobi < 1e-10);
        prop_assert!(b.involution < 1e-9);
    }

    #[test]
    fn transvections_preserve_the_form(
        (g, (a, b, v)) in (1usize..=3).prop_flat_map(|g| (Just(g), cycles(g))),
        s in prop_oneof![Just(-1i64), Just(1)],
    ) {
        let j = standard_form(g);
        let ta = picard_lefschetz_with(&j, &a, &v, s);
        let tb = picard_lefschetz_with(&j, &b, &v, s);
        prop_assert_eq!(form_value(&j, &ta, &tb), form_value(&j, &a, &b));
        prop_assert_eq!(picard_lefschetz_with(&j, &ta, &v, -s), a.clone());
        let t = transvection_matrix(&j, &v, s);
        prop_assert_eq!(intmat::det(&t), 1);
        prop_assert_eq!(intmat::matvec(&t, &a), ta);
    }

    #[test]
    fn intersection_is_antisymmetric(c in (1usize..=3).prop_flat_map(cycles)) {
        let (a, b, _) = c;
        let (a, b) = (CycleClass::new(a), CycleClass::new(b));
        prop_assert_eq!(intersection(&a, &b).unwrap(), -intersection(&b, &a).unwrap());
        prop_assert_eq!(intersection(&a, &a).unwrap(), 0);
    }

    #[test]
    fn vanishing_cycle_is_fixed(c in (1usize..=3).prop_flat_map(cycles), s in -3i64..=3) {
        let (_, _, v) = c;
        let v = CycleClass::new(v);
        prop_assert_eq!(picard_lefschetz_turns(&v, &v, s).unwrap(), v);
    }

    #[test]
    fn section_points_have_double_roots(c in -6.0..6.0f64, u in prop_oneof![-3.0..-0.2f64, 0.2..3.0f64]) {
        let (a1, a2) = delta_c_section(c, u).unwrap();
        let f = ComplexPoly::monic_from_real_tail(&[a1, a2, c, 1.0]);
        let (v, d) = f.eval_with_derivative(C64::new(u, 0.0));
        let scale = f.max_abs_coeff() * u.abs().max(1.0).powi(4);
        prop_assert!(v.norm() < 1e-12 * scale, "f(u) = {}", v);
        prop_assert!(d.norm() < 1e-12 * scale, "f'(u) = {}", d);
    }

    #[test]
    fn g2_branch_factors(c2 in 0.5..2.0f64, sign in prop_oneof![Just(-1.0), Just(1.0)]) {
        let p = g2_branch(c2, sign).unwrap();
        prop_assert!(p.factor_residual < 1e-9);
        prop_assert!((p.delta1 - p.delta1_closed).abs() < 1e-9 * p.delta1_closed.abs().max(1.0));
        prop_assert!((p.delta2 - p.delta2_closed).abs() < 1e-9 * p.delta2_closed.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reversed_contour_negates_periods(a1 in -1.0..1.0f64, a2 in 0.5..2.5f64, a3 in -1.0..1.0f64) {
        let p = ComplexPoly::monic_from_real_tail(&[a1, a2, a3, 1.0]);
        let cfg = BranchConfig::from_poly(&p).unwrap();
        let forms = period_forms(1, false);
        for e in cfg.basis_ellipses() {
            let y0 = cfg.sheet_at(e.point(0.0).0);
            let fwd = ellipse_integrals(&p, &e, y0, &forms, 1e-12).unwrap();
            let r = e.reversed();
            let back = ellipse_integrals(&p, &r, cfg.sheet_at(r.point(0.0).0), &forms, 1e-12).unwrap();
            for (x, y) in fwd.iter().zip(&back) {
                prop_assert!((x + y).norm() < 1e-9 * x.norm().max(1.0));
            }
        }
    }
}
