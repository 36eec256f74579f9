mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use pmech::cantrans::*;
use pmech::dynamics::{kernel_pairing, p_mechanise, poisson_bracket, proportionality, PMechObservable};
use pmech::poly::Poly;
use pmech::spaces::{coherent_v, hh_inner, kernel_coherent, pure_kernel, CoherentLabel, HState};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const GRID: [f64; 3] = [-1.0, 0.0, 1.0];

fn random_sl2(r: &mut ChaCha8Rng) -> SymplecticMatrix {
    loop {
        let a: f64 = r.gen_range(-2.0..2.0);
        if a.abs() >= 0.1 {
            return SymplecticMatrix::sl2(a, r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0)).unwrap();
        }
    }
}

fn sym(r: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| r.gen_range(-1.0..1.0));
    (&m + m.transpose()) * 0.5
}

/// Random element of Sp(4) as a product of generators.
fn random_sp4(r: &mut ChaCha8Rng) -> SymplecticMatrix {
    let mut a = DMatrix::from_fn(2, 2, |_, _| r.gen_range(-1.0..1.0));
    a += DMatrix::identity(2, 2) * 1.5;
    let fs = [MetaplecticFactor::LowerShear(sym(r, 2)), MetaplecticFactor::Diag(a), MetaplecticFactor::UpperShear(sym(r, 2))];
    SymplecticMatrix::new(factors_product(&fs, 2)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn metaplectic_intertwines_schrodinger(seed in any::<u64>(), h in 0.3f64..2.5) {
        let mut r = rng(seed);
        let m = random_sl2(&mut r);
        let st = random_schrodinger(&mut r, h, 1);
        let g = group(&mut r, 1, 1.2);
        let d = schrodinger_covariance_defect(&m, &g, &st, MetaplecticConvention::Intertwining).unwrap();
        prop_assert!(d < 1e-9, "defect {d}");
    }

    #[test]
    fn decomposition_reproduces_matrix(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_sl2(&mut r);
        let back = factors_product(&m.decompose().unwrap(), 1);
        prop_assert!((back - m.matrix()).amax() < 1e-12);
        let m4 = random_sp4(&mut r);
        let back = factors_product(&m4.decompose().unwrap(), 2);
        prop_assert!((back - m4.matrix()).amax() < 1e-10);
    }

    #[test]
    fn metaplectic_is_unitary(seed in any::<u64>(), h in 0.3f64..2.5) {
        let mut r = rng(seed);
        let m = random_sl2(&mut r);
        let st = random_schrodinger(&mut r, h, 1);
        let out = metaplectic_apply(&m, &st, MetaplecticConvention::Intertwining).unwrap();
        let (n0, n1) = (st.norm_sq().unwrap(), out.norm_sq().unwrap());
        prop_assert!((n0 - n1).abs() < 1e-9 * n0);
    }

    #[test]
    fn transformed_observable_pairs_with_transformed_kernel(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_sl2(&mut r);
        let mut f = Poly::zero(2);
        for _ in 0..4 {
            f.add_term(pmech::poly::MultiIndex(vec![r.gen_range(0..3), r.gen_range(0..3)]), rc(&mut r, 1.0));
        }
        let b = p_mechanise(&f).unwrap();
        let l = kernel_coherent(r.gen_range(0.3..2.0), &[r.gen_range(-1.0..1.0)], &[r.gen_range(-1.0..1.0)]);
        let lhs = kernel_pairing(&b, &kernel_transform_linear(&l, &m).unwrap()).unwrap();
        let rhs = kernel_pairing(&observable_transform_linear(&b, &m).unwrap(), &l).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-9 * lhs.norm().max(1.0));
    }

    #[test]
    fn linear_maps_preserve_brackets(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_sl2(&mut r);
        let mut rand_poly = || {
            let mut f = Poly::zero(2);
            for _ in 0..3 {
                f.add_term(pmech::poly::MultiIndex(vec![r.gen_range(0..3), r.gen_range(0..3)]), cr(1.0));
            }
            f
        };
        let (f, g) = (rand_poly(), rand_poly());
        let tr = |p: &Poly| observable_transform_linear(&p_mechanise(p).unwrap(), &m).unwrap().poly;
        let lhs = poisson_bracket(&tr(&f), &tr(&g));
        let rhs = tr(&poisson_bracket(&f, &g));
        prop_assert!(lhs.max_diff(&rhs) < 1e-9 * rhs.max_abs().max(1.0));
    }
}

#[test]
fn metaplectic_intertwines_two_degrees_of_freedom() {
    let mut r = rng(41);
    for _ in 0..3 {
        let m = random_sp4(&mut r);
        let st = random_schrodinger(&mut r, 0.8, 2);
        let g = group(&mut r, 2, 1.0);
        let d = schrodinger_covariance_defect(&m, &g, &st, MetaplecticConvention::Intertwining).unwrap();
        assert!(d < 1e-9, "defect {d}");
    }
}

#[test]
fn printed_generators_break_covariance() {
    let mut r = rng(42);
    let st = random_schrodinger(&mut r, 1.0, 1);
    let g = group(&mut r, 1, 1.0);
    let diag = SymplecticMatrix::new(factors_product(&[MetaplecticFactor::Diag(DMatrix::from_element(1, 1, 2.0))], 1)).unwrap();
    let d = schrodinger_covariance_defect(&diag, &g, &st, MetaplecticConvention::Printed).unwrap();
    assert!(d > 1e-2, "defect {d}");
    let d = schrodinger_covariance_defect(&SymplecticMatrix::j(1), &g, &st, MetaplecticConvention::Printed).unwrap();
    assert!(d > 1e-2, "defect {d}");
}

fn sign_gap(m1: &SymplecticMatrix, m2: &SymplecticMatrix, st: &pmech::spaces::SchrodingerState) -> f64 {
    let conv = MetaplecticConvention::Intertwining;
    let two = metaplectic_apply(m1, &metaplectic_apply(m2, st, conv).unwrap(), conv).unwrap();
    let one = metaplectic_apply(&m1.compose(m2), st, conv).unwrap();
    let w = cr(1.0);
    let scale = one.psi.inner(&one.psi, w).unwrap().re;
    let best = [1.0, -1.0]
        .iter()
        .map(|s| {
            let d = two.psi.sub(&one.psi.scale(cr(*s))).unwrap();
            d.inner(&d, w).unwrap().re
        })
        .fold(f64::INFINITY, f64::min);
    (best / scale).sqrt()
}

#[test]
fn metaplectic_composes_up_to_sign() {
    let mut r = rng(43);
    for _ in 0..20 {
        let (m1, m2) = (random_sl2(&mut r), random_sl2(&mut r));
        let st = random_schrodinger(&mut r, 1.3, 1);
        assert!(sign_gap(&m1, &m2, &st) < 1e-9);
    }
    // a negative diagonal block squares to the lift of −I, not to the identity
    let minus = SymplecticMatrix::sl2(-1.0, 0.0, 0.0).unwrap();
    let st = random_schrodinger(&mut r, 0.9, 1);
    assert!(sign_gap(&minus, &minus, &st) < 1e-12);
}

#[test]
fn metaplectic_composes_through_j() {
    let mut r = rng(48);
    let j = SymplecticMatrix::j(1);
    let singular = SymplecticMatrix::new(DMatrix::from_row_slice(2, 2, &[0.0, 0.5, -2.0, 0.3])).unwrap();
    for _ in 0..10 {
        let m = random_sl2(&mut r);
        let st = random_schrodinger(&mut r, 1.1, 1);
        for (a, b) in [(&j, &m), (&m, &j), (&singular, &m), (&m, &singular), (&j, &j), (&singular, &singular)] {
            let gap = sign_gap(a, b, &st);
            assert!(gap < 1e-9, "{gap}");
        }
    }
}

#[test]
fn singular_upper_block_goes_through_j() {
    let m = SymplecticMatrix::sl2(1e-300, 1.0, -1.0);
    assert!(m.is_err() || m.unwrap().decompose().is_ok());
    let m = SymplecticMatrix::new(DMatrix::from_row_slice(2, 2, &[0.0, 0.5, -2.0, 0.3])).unwrap();
    let fs = m.decompose().unwrap();
    assert_eq!(fs[0], MetaplecticFactor::J);
    assert!((factors_product(&fs, 1) - m.matrix()).amax() < 1e-12);
    let mut r = rng(44);
    let st = random_schrodinger(&mut r, 0.9, 1);
    let d = schrodinger_covariance_defect(&m, &group(&mut r, 1, 1.0), &st, MetaplecticConvention::Intertwining).unwrap();
    assert!(d < 1e-9);
}

#[test]
fn non_symplectic_rejected() {
    assert!(SymplecticMatrix::new(DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0])).is_err());
    assert!(SymplecticMatrix::new(DMatrix::identity(3, 3)).is_err());
}

#[test]
fn fock_metaplectic_intertwines_rho() {
    let mut r = rng(45);
    for _ in 0..3 {
        let m = random_sl2(&mut r);
        let f = random_fock(&mut r, 0.7, 1);
        let d = fock_covariance_defect(&m, &group(&mut r, 1, 1.0), &f).unwrap();
        assert!(d < 1e-9, "defect {d}");
    }
}

#[test]
fn flip_exchanges_coordinates_and_pure_kernels() {
    let j = SymplecticMatrix::j(1);
    let q = PMechObservable::q(1, 0);
    assert_eq!(observable_transform_linear(&q, &j).unwrap().poly, Poly::var(2, 1));
    let m = SymplecticMatrix::sl2(1.5, 0.2, -0.4).unwrap();
    let (a2, b2) = m.apply(&[0.3], &[-0.7]);
    let lt = kernel_transform_linear(&pure_kernel(&[0.3], &[-0.7]), &m).unwrap();
    let want = pure_kernel(&a2, &b2);
    for x in [[0.1, 0.2], [-1.0, 0.5], [2.0, -0.3]] {
        assert!((lt.l.eval(&x) - want.l.eval(&x)).norm() < 1e-12);
    }
}

#[test]
fn coupled_cross_term_vanishes() {
    let mut r = rng(46);
    let mut done = 0;
    while done < 50 {
        let (a, b, c) = (r.gen_range(0.1..4.0), r.gen_range(0.1..4.0), r.gen_range(-3.0..3.0));
        let Ok(cp) = Coupling::new(a, b, c) else { continue };
        assert!(cp.cross_term().abs() < 1e-12);
        // the rotated Hamiltonian has no Q₁Q₂ term and the predicted mode frequencies
        let modes = cp.decouple();
        let ht = observable_transform_linear(&cp.hamiltonian(), &modes.rotation()).unwrap().poly;
        let coeff = |e: [u32; 4]| ht.coeff(&pmech::poly::MultiIndex(e.to_vec()));
        assert!(coeff([1, 1, 0, 0]).norm() < 1e-12);
        assert!((coeff([2, 0, 0, 0]).re - modes.w1 / 2.0).abs() < 1e-12);
        assert!((coeff([0, 2, 0, 0]).re - modes.w2 / 2.0).abs() < 1e-12);
        done += 1;
    }
    let equal = Coupling::new(1.0, 1.0, 0.5).unwrap().decouple();
    assert!((equal.alpha - FRAC_PI_2).abs() < 1e-15);
}

#[test]
fn coupled_flow_matches_hamilton() {
    let mut r = rng(47);
    for _ in 0..10 {
        let cp = Coupling::new(r.gen_range(0.5..3.0), r.gen_range(0.5..3.0), r.gen_range(-1.0..1.0)).unwrap();
        let q = [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)];
        let p = [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)];
        let (q1, p1) = coupled_flow(&cp, q, p, 1.0);
        let (q2, p2) = coupled_rk4(&cp, q, p, 1.0, 2000);
        for k in 0..2 {
            assert!((q1[k] - q2[k]).abs() < 1e-6 && (p1[k] - p2[k]).abs() < 1e-6);
        }
    }
}

#[test]
fn coupled_observable_obeys_bracket_equation() {
    let cp = Coupling::new(1.2, 2.5, 0.8).unwrap();
    let h = cp.hamiltonian();
    let b0 = PMechObservable::q(2, 0).mul(&PMechObservable::p(2, 1)).add(&PMechObservable::q(2, 1));
    let (t, dt) = (0.7, 1e-4);
    let f = |t| coupled_evolve_obs(&b0, &cp, t).unwrap().poly;
    let dfdt = f(t + dt).sub(&f(t - dt)).scale(cr(0.5 / dt));
    let rhs = poisson_bracket(&f(t), &h.poly);
    assert!(dfdt.max_diff(&rhs) < 1e-7);
}

#[test]
fn printed_mode_solution_only_right_at_unit_frequency() {
    let t = 0.9;
    for (w, should_match) in [(1.0, true), (4.0, false)] {
        let modes = NormalModes { alpha: 0.0, w1: w, w2: w };
        let g = NormalModes::printed_group_map(w, t);
        // symbol map of a group-variable substitution is its inverse transpose
        let s = g.try_inverse().unwrap().transpose();
        let flow = modes.mode_flow(t);
        let true_map = DMatrix::from_row_slice(2, 2, &[flow[(0, 0)], flow[(0, 2)], flow[(2, 0)], flow[(2, 2)]]);
        let gap = (s - true_map).amax();
        assert_eq!(gap < 1e-12, should_match, "W = {w}, gap {gap}");
    }
}

#[test]
fn indefinite_coupling_rejected() {
    assert!(Coupling::new(1.0, 1.0, 3.0).is_err());
    assert!(Coupling::new(-1.0, 1.0, 0.0).is_err());
}

#[test]
fn matrix_elements_closed_form_matches_convolution() {
    let mut r = rng(48);
    for h in [0.5, 1.0, 2.0] {
        let f = Poly::linear(rc(&mut r, 1.0), &[rc(&mut r, 1.0), rc(&mut r, 1.0)]);
        let a = ct_matrix_element(&f, h).unwrap();
        let b = ct_matrix_element_linear(&f, h).unwrap();
        assert!(rel_gap(&a.fun, &b.fun, &points(&mut r, 4, 30, 1.2)) < 1e-12);
    }
    let one = ct_matrix_element(&Poly::one(2), 1.3).unwrap();
    let k = repker_labels(1.3, 1);
    assert!(rel_gap(&k.fun, &one.fun, &points(&mut r, 4, 30, 1.2)) < 1e-12);
}

#[test]
fn flip_solves_its_equations() {
    let res = ct_residual(&CtSpec::flip(), &flip_m(1.0).unwrap(), &GRID).unwrap();
    assert_eq!(res.points, 81);
    assert!(res.max_abs < 1e-8, "{res:?}");
}

#[test]
fn unshifted_rotation_solves_its_equations() {
    for t in [0.3, FRAC_PI_2, 2.0] {
        let res = ct_residual(&CtSpec::shifted_rotation(t, 0.0), &rotshift_m(1.0, t, 0.0).unwrap(), &GRID).unwrap();
        assert!(res.max_abs < 1e-8, "t = {t}: {res:?}");
    }
}

#[test]
fn printed_shifted_rotation_fails_when_shifted() {
    // the closed form with C ≠ 0 does not satisfy the equations
    for t in [0.3, FRAC_PI_2] {
        let res = ct_residual(&CtSpec::shifted_rotation(t, 1.0), &rotshift_m(1.0, t, 1.0).unwrap(), &GRID).unwrap();
        assert!(res.max_rel > 0.5, "t = {t}: {res:?}");
    }
}

#[test]
fn translated_rotation_solves_shifted_equations() {
    for h in [0.5, 1.0] {
        for t in [0.3, FRAC_PI_2, 2.5] {
            for c in [0.0, 1.0, -0.6] {
                let m = rotshift_m_translated(h, t, c).unwrap();
                let res = ct_residual(&CtSpec::shifted_rotation(t, c), &m, &GRID).unwrap();
                assert!(res.max_rel < 1e-10, "h={h} t={t} C={c}: {res:?}");
            }
        }
    }
}

#[test]
fn quarter_turn_reduces_to_flip() {
    let a = rotshift_m(1.0, FRAC_PI_2, 0.0).unwrap();
    let b = flip_m(1.0).unwrap();
    let mut r = rng(49);
    for p in points(&mut r, 4, 50, 1.5) {
        assert!((a.fun.eval(&p) - b.fun.eval(&p)).norm() < 1e-12);
    }
}

#[test]
fn reproducing_kernel_gives_identity_operator() {
    let mut r = rng(50);
    for h in [0.5, 1.0, 2.0] {
        let v = random_hstate(&mut r, h, 1);
        let u = ct_operator_apply(&repker_labels(h, 1), &v).unwrap();
        assert!(rel_gap(&v.v, &u.v, &points(&mut r, 2, 30, 1.0)) < 1e-10);
    }
}

#[test]
fn rotation_maps_coherent_states() {
    let h = 1.0;
    let z = C64::new(0.4, -0.3);
    for (t, c) in [(0.3, 0.0), (0.3, 1.0), (2.0, -0.5)] {
        let v = coherent_v(&CoherentLabel::new(h, vec![z.re], vec![z.im]).unwrap());
        let u = ct_operator_apply(&rotshift_m(h, t, c).unwrap(), &v).unwrap();
        let z2 = z * C64::from_polar(1.0, -t);
        let want = coherent_v(&CoherentLabel::new(h, vec![z2.re], vec![z2.im]).unwrap())
            .scale((PI / h * c * C64::from_polar(1.0, -t) * z).exp());
        let mut r = rng(51);
        assert!(rel_gap(&want.v, &u.v, &points(&mut r, 2, 30, 1.0)) < 1e-10);
    }
}

#[test]
fn shifted_kernel_matches_coherent_expansion() {
    let mut r = rng(52);
    let h = 1.0;
    for (t, c) in [(0.3, 0.0), (0.3, 1.0), (FRAC_PI_2, 0.0)] {
        let v = random_hstate(&mut r, h, 1);
        let via_m = ct_operator_apply(&rotshift_m(h, t, c).unwrap(), &v).unwrap();
        let via_k = kernel_operator_apply(&rotshift_kernel(h, t, c).unwrap(), cr(1.0), &v).unwrap();
        assert!(rel_gap(&via_m.v, &via_k.v, &points(&mut r, 2, 30, 1.0)) < 1e-10);
    }
    // on the vacuum the kernel returns a coherent state at the image label
    let vac = HState::vacuum(h, 1);
    let out = kernel_operator_apply(&rotshift_kernel(h, 0.7, 0.0).unwrap(), cr(1.0), &vac).unwrap();
    let (_, rel) = proportionality(&out, &coherent_v(&CoherentLabel::new(h, vec![0.0], vec![0.0]).unwrap())).unwrap();
    assert!(rel < 1e-10);
}

#[test]
fn translated_rotation_is_unitary_printed_shift_is_not() {
    let mut r = rng(53);
    let h = 1.0;
    let v = random_hstate(&mut r, h, 1);
    let n0 = hh_inner(&v, &v).unwrap().re;
    let ut = ct_operator_apply(&rotshift_m_translated(h, 0.3, 1.0).unwrap(), &v).unwrap();
    assert!((hh_inner(&ut, &ut).unwrap().re / n0 - 1.0).abs() < 1e-10);
    let up = ct_operator_apply(&rotshift_m(h, 0.3, 1.0).unwrap(), &v).unwrap();
    assert!((hh_inner(&up, &up).unwrap().re / n0 - 1.0).abs() > 1e-3);
}

#[test]
fn custom_spec_parses_and_checks_brackets() {
    let spec = CtSpec::parse(1, &["q + p"], &["Q"], &["p"], &["P + Q"]).unwrap();
    assert!(spec.is_canonical(1e-14));
    let spec = CtSpec::parse(1, &["q^2"], &["Q"], &["p"], &["P"]).unwrap();
    assert!(!spec.is_canonical(1e-6));
    assert!(CtSpec::parse(1, &["q"], &["Q"], &["p"], &[]).is_err());
}
