mod common;

use std::f64::consts::PI;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use pmech::heisenberg::{schrodinger_apply, GroupElement};
use pmech::kepler::*;
use pmech::numerics::{central_diff, gauss_legendre};
use pmech::poly::Poly;
use pmech::spaces::SchrodingerState;
use pmech::Error;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn off_axis(r: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let p: [f64; 3] = [r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0)];
        if p[0].hypot(p[1]) > 0.1 {
            return p;
        }
    }
}

fn label(r: &mut ChaCha8Rng) -> (SphericalPoint, SphericalMomenta) {
    let pt = sph_from_cartesian(off_axis(r)).unwrap();
    let mom = SphericalMomenta { p_r: r.gen_range(-2.0..2.0), p_theta: r.gen_range(-2.0..2.0), p_phi: r.gen_range(-2.0..2.0) };
    (pt, mom)
}

fn atomic_grid() -> RadialGrid {
    RadialGrid::new(60.0, 2000).unwrap()
}

// ---------- coordinates ----------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cartesian_round_trip(seed in any::<u64>()) {
        let xi = off_axis(&mut rng(seed));
        let p = sph_from_cartesian(xi).unwrap();
        prop_assert!((0.0..2.0 * PI).contains(&p.theta) && p.phi > 0.0 && p.phi < PI);
        let back = cartesian_from_sph(&p);
        for k in 0..3 {
            prop_assert!((back[k] - xi[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn momenta_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let q = off_axis(&mut r);
        let p = [r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0)];
        let (pt, mom) = spherical_momenta(q, p).unwrap();
        let (q2, p2) = spherical_momenta_inverse(&pt, &mom);
        for k in 0..3 {
            prop_assert!((q2[k] - q[k]).abs() < 1e-10 && (p2[k] - p[k]).abs() < 1e-10);
        }
    }
}

#[test]
fn printed_branches() {
    let p = sph_from_cartesian([0.0, 1.0, 0.0]).unwrap();
    assert!((p.theta - PI / 2.0).abs() < 1e-15);
    assert!((sph_from_cartesian([0.0, -2.0, 1.0]).unwrap().theta - 1.5 * PI).abs() < 1e-15);
    assert!((sph_from_cartesian([-1.0, 0.0, 0.0]).unwrap().theta - PI).abs() < 1e-15);
    let below = sph_from_cartesian([1.0, 1.0, -1.0]).unwrap();
    assert!(below.phi > PI / 2.0);
    assert!(matches!(sph_from_cartesian([0.0, 0.0, -1.0]), Err(Error::Axis(_))));
    assert!(spherical_momenta([0.0, 0.0, 1.0], [1.0, 0.0, 0.0]).is_err());
}

#[test]
fn spherical_momenta_are_canonical() {
    let mut r = rng(21);
    let omega = DMatrix::from_fn(6, 6, |i, j| if j == i + 3 { 1.0 } else if i == j + 3 { -1.0 } else { 0.0 });
    for _ in 0..20 {
        let (pt, mom) = label(&mut r);
        assert!(spherical_bracket_defect(&pt, &mom, 1e-5) < 1e-6);
        let (q, p) = spherical_momenta_inverse(&pt, &mom);
        let j = spherical_phase_jacobian(q, p, 1e-5).unwrap();
        assert!((&j * &omega * j.transpose() - &omega).amax() < 1e-6);
    }
}

#[test]
fn one_dim_rep_of_l3_is_azimuthal_momentum() {
    let mut r = rng(22);
    for _ in 0..20 {
        let (pt, mom) = label(&mut r);
        let v = l3_one_dim(&pt, &mom, 1e-4).unwrap();
        assert!((v - C64::new(mom.p_theta, 0.0)).norm() < 1e-5 * (1.0 + mom.p_theta.abs()), "{v} vs {}", mom.p_theta);
    }
}

#[test]
fn one_dim_rep_matches_cartesian_rep() {
    let mut r = rng(23);
    let (pt, mom) = label(&mut r);
    let g = group(&mut r, 3, 1.0);
    let (q, p) = spherical_momenta_inverse(&pt, &mom);
    let want = pmech::heisenberg::rho_qp_apply(&q, &p, &g);
    assert!((rho_sph_qp_apply(&pt, &mom, &g).unwrap() - want).norm() < 1e-14);
}

// ---------- special functions ----------

#[test]
fn legendre_recurrence_matches_rodrigues() {
    let mut r = rng(31);
    for l in 0..=6u32 {
        for m in -(l as i32)..=l as i32 {
            for _ in 0..20 {
                let x = r.gen_range(-0.99..0.99);
                let a = assoc_legendre(l, m, x).unwrap();
                let b = legendre_rodrigues(l, m, x).unwrap();
                assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-3), "P_{l}^{m}({x}): {a} vs {b}");
            }
        }
    }
}

#[test]
fn laguerre_recurrence_matches_rodrigues() {
    let mut r = rng(32);
    for p in 0..=6u32 {
        for k in 0..=(6 - p) {
            for _ in 0..20 {
                let z = r.gen_range(0.0..8.0);
                let a = assoc_laguerre(p, k, z);
                let b = laguerre_rodrigues(p, k, z);
                assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "L^{p}_{k}({z}): {a} vs {b}");
            }
        }
    }
    for q in 0..=6 {
        assert!((laguerre(q, 1.3) - laguerre_rodrigues(0, q, 1.3)).abs() < 1e-9);
    }
}

#[test]
fn f1_is_the_confluent_series() {
    for k in 0..5 {
        for c in 1..8u32 {
            for z in [0.0, 0.4, 2.5, 7.0] {
                let a = confluent_f1(-k, c, z).unwrap();
                let b = hyp1f1_series(-k, c, z);
                assert!((a - b).abs() < 1e-11 * b.abs().max(1.0));
            }
        }
    }
}

#[test]
fn spherical_harmonics_are_orthonormal() {
    let (x, w) = gauss_legendre(24);
    let nphi = 24;
    let idx: Vec<(u32, i32)> = (0..=4u32).flat_map(|l| (-(l as i32)..=l as i32).map(move |m| (l, m))).collect();
    for &(l, m) in &idx {
        for &(l2, m2) in &idx {
            let mut s = C64::default();
            for (xi, wi) in x.iter().zip(&w) {
                for k in 0..nphi {
                    let az = 2.0 * PI * k as f64 / nphi as f64;
                    let a = sph_harmonic(l, m, xi.acos(), az).unwrap();
                    let b = sph_harmonic(l2, m2, xi.acos(), az).unwrap();
                    s += a * b.conj() * wi * (2.0 * PI / nphi as f64);
                }
            }
            let want = if (l, m) == (l2, m2) { 1.0 } else { 0.0 };
            assert!((s - want).norm() < 1e-8, "({l},{m}) vs ({l2},{m2}): {s}");
        }
    }
}

#[test]
fn harmonic_reflection() {
    for l in 0..5u32 {
        for m in 1..=l as i32 {
            let a = sph_harmonic(l, -m, 0.7, 1.9).unwrap();
            let b = sph_harmonic(l, m, 0.7, 1.9).unwrap().conj() * if m % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a - b).norm() < 1e-14);
        }
    }
}

// ---------- eigenfunctions and spectrum ----------

#[test]
fn ground_state_is_pure_exponential() {
    let h = 1.7;
    let qn = QuantumNumbers::new(1, 0, 0).unwrap();
    let k = kappa(1, h, KappaConvention::Derived);
    let r0 = coulomb_radial(qn, h, 0.3, KappaConvention::Derived).unwrap();
    for r in [0.1, 0.9, 2.0] {
        let v = coulomb_radial(qn, h, r, KappaConvention::Derived).unwrap();
        assert!((v / r0 - (-k * (r - 0.3)).exp()).abs() < 1e-12);
    }
}

#[test]
fn quantum_number_chain_enforced() {
    assert!(QuantumNumbers::new(0, 0, 0).is_err());
    assert!(QuantumNumbers::new(2, 2, 0).is_err());
    assert!(QuantumNumbers::new(3, 1, -2).is_err());
    for n in 1..5 {
        assert_eq!(QuantumNumbers::level(n).len() as u32, n * n);
    }
}

#[test]
fn eigenfunctions_normalized_and_orthogonal() {
    let h = 2.0 * PI;
    let g = atomic_grid();
    let states: Vec<_> = [(1, 0, 0), (2, 0, 0), (2, 1, 1), (3, 0, 0), (3, 2, -1)]
        .iter()
        .map(|&(n, l, m)| coulomb_eigenfunction(QuantumNumbers::new(n, l, m).unwrap(), h, &g, KappaConvention::Derived).unwrap())
        .collect();
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((a.inner(b).unwrap() - want).abs() < 1e-6, "{:?} {:?}", a.qn, b.qn);
        }
    }
    // angular part enters through Y
    let y = states[2].at(40, 0.8, 0.3).unwrap();
    assert!((y - sph_harmonic(1, 1, 0.8, 0.3).unwrap() * states[2].radial[40]).norm() < 1e-15);
}

#[test]
fn derived_kappa_solves_the_fd_equation() {
    let g = atomic_grid();
    for h in [2.0 * PI, 5.0] {
        // wide enough that n = 3 has decayed at the Dirichlet end
        let grid = RadialGrid::new(100.0 * (h / (2.0 * PI)).powi(2), 3000).unwrap();
        for (n, l) in [(1, 0), (2, 0), (2, 1), (3, 2)] {
            let qn = QuantumNumbers::new(n, l, 0).unwrap();
            let res = eigen_residual(qn, h, &grid, KappaConvention::Derived).unwrap();
            assert!(res < 1e-3, "({n},{l}) at h = {h}: {res}");
        }
    }
    let qn = QuantumNumbers::new(1, 0, 0).unwrap();
    assert!(eigen_residual(qn, 2.0 * PI, &g, KappaConvention::Printed).unwrap() > 0.5);
}

#[test]
fn atomic_units_ground_state() {
    let s = fd_spectrum(0, 2.0 * PI, &atomic_grid(), 3).unwrap();
    assert!((s.extrapolated[0] + 0.5).abs() < 0.005, "{}", s.extrapolated[0]);
    assert!((s.extrapolated[0] - energy(1, 2.0 * PI)).abs() < 1e-4);
}

#[test]
fn inverse_square_law_at_two_h() {
    for h in [2.0 * PI, 3.0] {
        let grid = RadialGrid::new(60.0 * (h / (2.0 * PI)).powi(2), 2000).unwrap();
        let e = fd_spectrum(0, h, &grid, 3).unwrap().extrapolated;
        for n in 2..=3u32 {
            let ratio = e[n as usize - 1] / e[0];
            let want = 1.0 / f64::from(n * n);
            assert!((ratio - want).abs() / want < 0.01, "h = {h}, n = {n}: {ratio}");
        }
    }
}

#[test]
fn levels_degenerate_across_l() {
    let h = 2.0 * PI;
    let g = atomic_grid();
    for n in 1..=3u32 {
        let es: Vec<f64> = (0..n).map(|l| fd_spectrum(l, h, &g, (n - l) as usize).unwrap().extrapolated[(n - l - 1) as usize]).collect();
        for e in &es {
            assert!((e - es[0]).abs() / es[0].abs() < 1e-3, "n = {n}: {es:?}");
        }
    }
}

#[test]
fn coarse_grid_fails_convergence() {
    let g = RadialGrid::new(60.0, 40).unwrap();
    assert!(matches!(fd_spectrum(0, 2.0 * PI, &g, 1), Err(Error::Convergence(_))));
}

#[test]
fn spectrum_rows_and_constants() {
    let h = 2.0 * PI;
    let rows = spectrum_report(3, h, &atomic_grid()).unwrap();
    assert_eq!(rows.len(), 6);
    for row in &rows {
        // the printed law is twice the measured energy
        assert!((row.rel_discrepancy - 0.5).abs() < 1e-2, "{row:?}");
        assert!((row.e_extrapolated / rows[0].e_extrapolated - 1.0 / f64::from(row.n * row.n)).abs() < 0.01);
    }
    let c = constants_discrepancy(h, &atomic_grid()).unwrap();
    assert!((c.omega_printed / c.omega_measured - 2.0).abs() < 0.01);
    assert!((c.kappa1_measured - kappa(1, h, KappaConvention::Derived)).abs() < 1e-2);
    assert!((c.kappa1_measured - c.kappa1_printed).abs() > 0.5);
}

// ---------- representations ----------

#[test]
fn rho_hp_identity_is_trivial() {
    let psi = |p: &SphericalPoint| C64::new(p.r, p.theta * p.phi);
    let at = SphericalPoint::new(1.3, 0.4, 2.0).unwrap();
    let v = rho_hp_apply(&GroupElement::identity(3), 0.8, psi, &at).unwrap();
    assert!((v - psi(&at)).norm() < 1e-14);
}

#[test]
fn rho_hp_is_conjugated_schrodinger() {
    let mut r = rng(41);
    for _ in 0..10 {
        let h = r.gen_range(0.3..2.0);
        let eta = random_pg(&mut r, 3, 2, 2);
        let st = SchrodingerState { h, psi: eta.clone() };
        let g = group(&mut r, 3, 0.8);
        let moved = schrodinger_apply(&g, &st).unwrap();
        for _ in 0..5 {
            let xi = off_axis(&mut r);
            let want = moved.psi.eval(&xi);
            let got = rho_hp_apply(&g, h, |p: &SphericalPoint| eta.eval(&cartesian_from_sph(p)), &sph_from_cartesian(xi).unwrap()).unwrap();
            assert!((got - want).norm() < 1e-8 * want.norm().max(1e-3));
        }
    }
}

#[test]
fn l3_on_harmonics() {
    let h = 1.3;
    for (l, m) in [(2u32, 1i32), (3, -2), (1, 0)] {
        let psi = |p: &SphericalPoint| sph_harmonic(l, m, p.phi, p.theta).unwrap() * (-p.r).exp();
        let at = SphericalPoint::new(0.9, 1.1, 0.7).unwrap();
        let v = rho_hp_l3_apply(h, psi, &at, 1e-5).unwrap();
        let want = psi(&at) * (f64::from(m) * h / (2.0 * PI));
        assert!((v - want).norm() < 1e-8, "({l},{m})");
    }
}

// ---------- general position transforms ----------

fn cubic() -> PositionTransform {
    PositionTransform::new(
        3,
        Box::new(|x| vec![x[0].powi(3) + x[0], x[1], x[2]]),
        Box::new(|z| {
            // real root of t³ + t = z₁
            let d = (z[0] * z[0] / 4.0 + 1.0 / 27.0).sqrt();
            vec![(z[0] / 2.0 + d).cbrt() + (z[0] / 2.0 - d).cbrt(), z[1], z[2]]
        }),
        Box::new(|x| DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0 * x[0] * x[0] + 1.0, 1.0, 1.0]))),
    )
}

fn shear() -> PositionTransform {
    let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
    let ai = a.clone().try_inverse().unwrap();
    let a2 = a.clone();
    PositionTransform::new(
        2,
        Box::new(move |x| (&a * nalgebra::DVector::from_column_slice(x)).iter().copied().collect()),
        Box::new(move |z| (&ai * nalgebra::DVector::from_column_slice(z)).iter().copied().collect()),
        Box::new(move |_| a2.clone()),
    )
}

fn phase_points(r: &mut ChaCha8Rng, n: usize, count: usize, spherical: bool) -> Vec<(Vec<f64>, Vec<f64>)> {
    (0..count)
        .map(|_| {
            let z = if spherical {
                let p = sph_from_cartesian(off_axis(r)).unwrap();
                vec![p.r, p.theta.clamp(0.2, 6.0), p.phi.clamp(0.2, 2.9)]
            } else {
                (0..n).map(|_| r.gen_range(-1.5..1.5)).collect()
            };
            (z, (0..n).map(|_| r.gen_range(-1.5..1.5)).collect())
        })
        .collect()
}

#[test]
fn identity_map_signs() {
    let t = PositionTransform::identity(1);
    let psi = |z: &[f64]| C64::new((-z[0] * z[0]).exp(), 0.3 * z[0]);
    let z = [0.7];
    let printed = t.position_op(psi, &z, 0, PositionSign::Printed).unwrap();
    let standard = t.position_op(psi, &z, 0, PositionSign::Standard).unwrap();
    assert!((printed + psi(&z) * 0.7).norm() < 1e-15);
    assert!((standard - psi(&z) * 0.7).norm() < 1e-15);
    let h = 0.9;
    let dpsi = central_diff(&psi, &z, 0, 1e-5);
    let p_printed = t.momentum_op(h, psi, &z, 0, PositionSign::Printed, 1e-5).unwrap();
    assert!((p_printed + dpsi * h).norm() < 1e-12);
}

#[test]
fn standard_signs_are_derivatives_of_the_rep() {
    // (1/2πi)∂_{x_j}, (1/2πi)∂_{y_j} of ρ_h^ℳ at the identity
    let t = cubic();
    let h = 0.7;
    let psi = |z: &[f64]| C64::new(-(z[0] * z[0] + z[1] * z[1] + 0.5 * z[2] * z[2]), 0.4 * z[0] - 0.2 * z[2]).exp();
    let tpi = C64::new(0.0, 2.0 * PI);
    let zeta = [0.8, -0.3, 0.5];
    for j in 0..3 {
        let t = &t;
        let along = |which: usize| {
            move |v: &[f64]| {
                let mut x = vec![0.0; 3];
                let mut y = vec![0.0; 3];
                if which == 0 {
                    x[j] = v[0];
                } else {
                    y[j] = v[0];
                }
                t.rep_apply(&GroupElement { s: 0.0, x, y }, h, psi, &zeta).unwrap()
            }
        };
        let dx = central_diff(&along(0), &[0.0], 0, 1e-5) / tpi;
        let dy = central_diff(&along(1), &[0.0], 0, 1e-5) / tpi;
        let pos = t.position_op(psi, &zeta, j, PositionSign::Standard).unwrap();
        let mom = t.momentum_op(h, psi, &zeta, j, PositionSign::Standard, 1e-5).unwrap();
        assert!((dx - pos).norm() < 1e-7, "position {j}");
        assert!((dy - mom).norm() < 1e-7, "momentum {j}");
        let printed = t.position_op(psi, &zeta, j, PositionSign::Printed).unwrap();
        assert!((dx - printed).norm() > 0.1 * pos.norm());
    }
}

#[test]
fn standard_ops_satisfy_ccr() {
    let t = cubic();
    let h = 1.1;
    let psi = |z: &[f64]| C64::new(-(z[0] * z[0] + z[1] * z[1]), z[2]).exp();
    let zeta = [0.4, 0.2, -0.6];
    let step = 1e-4;
    let x = |f: &dyn Fn(&[f64]) -> C64, z: &[f64]| t.position_op(f, z, 0, PositionSign::Standard).unwrap();
    let p = |f: &dyn Fn(&[f64]) -> C64, z: &[f64]| t.momentum_op(h, f, z, 0, PositionSign::Standard, step).unwrap();
    let xp = x(&|z: &[f64]| p(&psi, z), &zeta);
    let px = p(&|z: &[f64]| x(&psi, z), &zeta);
    let want = psi(&zeta) * C64::new(0.0, h / (2.0 * PI));
    assert!((xp - px - want).norm() < 1e-6, "{}", xp - px);
}

#[test]
fn canonical_check_orientations() {
    let mut r = rng(51);
    let pts = phase_points(&mut r, 3, 20, false);
    let c = cubic();
    assert!(c.canonical_check(&pts, MomentumOrientation::Transposed, 1e-5).unwrap() < 1e-6);
    assert!(c.canonical_check(&pts, MomentumOrientation::Printed, 1e-5).unwrap() < 1e-6);

    let s = shear();
    let pts2 = phase_points(&mut r, 2, 20, false);
    assert!(s.canonical_check(&pts2, MomentumOrientation::Transposed, 1e-5).unwrap() < 1e-6);
    assert!(s.canonical_check(&pts2, MomentumOrientation::Printed, 1e-5).unwrap() > 0.5);

    let sp = PositionTransform::spherical();
    let pts3 = phase_points(&mut r, 3, 20, true);
    assert!(sp.canonical_check(&pts3, MomentumOrientation::Transposed, 1e-5).unwrap() < 1e-6);
    assert!(sp.canonical_check(&pts3, MomentumOrientation::Printed, 1e-5).unwrap() > 1e-2);
}

#[test]
fn spherical_transform_gives_spherical_momenta() {
    let sp = PositionTransform::spherical();
    let mut r = rng(52);
    for (z, pz) in phase_points(&mut r, 3, 20, true) {
        let (q, p) = sp.to_cartesian(&z, &pz, MomentumOrientation::Transposed).unwrap();
        let (q2, p2) = spherical_momenta_inverse(
            &SphericalPoint { r: z[0], theta: z[1], phi: z[2] },
            &SphericalMomenta { p_r: pz[0], p_theta: pz[1], p_phi: pz[2] },
        );
        for k in 0..3 {
            assert!((q[k] - q2[k]).abs() < 1e-10 && (p[k] - p2[k]).abs() < 1e-10);
        }
    }
}

#[test]
fn singular_jacobian_rejected() {
    let t = PositionTransform::new(
        1,
        Box::new(|x| vec![x[0].powi(3)]),
        Box::new(|z| vec![z[0].cbrt()]),
        Box::new(|x| DMatrix::from_element(1, 1, 3.0 * x[0] * x[0])),
    );
    assert!(t.jacobian_at(&[0.0]).is_err());
    assert!(t.canonical_check(&[(vec![0.0], vec![1.0])], MomentumOrientation::Transposed, 1e-6).is_err());
}

// ---------- angular momentum ----------

#[test]
fn angular_momentum_algebra() {
    let mut r = rng(61);
    for _ in 0..10 {
        let mut f = Poly::zero(3);
        for _ in 0..6 {
            let mono = pmech::poly::MultiIndex(vec![r.gen_range(0..4), r.gen_range(0..4), r.gen_range(0..4)]);
            f.add_term(mono, rc(&mut r, 1.0));
        }
        let h = r.gen_range(0.2..3.0);
        assert!(angular_commutator_defect(h, &f).unwrap() < 1e-12 * f.max_abs().max(1.0));
    }
    for m in 0..5 {
        let f = sectoral_polynomial(m);
        let l3 = angular_momentum_apply(2, 0.9, &f).unwrap();
        assert!(l3.max_diff(&f.scale(C64::new(f64::from(m) * 0.9 / (2.0 * PI), 0.0))) < 1e-12);
    }
}

// ---------- Klauder states ----------

fn euler(r: &mut ChaCha8Rng) -> EulerAngles {
    EulerAngles { theta: r.gen_range(0.1..3.0), phi: r.gen_range(0.0..2.0 * PI), psi: r.gen_range(0.0..2.0 * PI) }
}

#[test]
fn am_state_norm_and_corner() {
    let mut r = rng(71);
    for n in 0..5 {
        let s = klauder_am_state(n, &euler(&mut r));
        assert!((s.norm_sq() - f64::from((n + 1) * (n + 1))).abs() < 1e-10);
        let top = klauder_am_state(n, &EulerAngles::default());
        for (k, v) in &top.0 {
            if k.m != k.l as i32 {
                assert_eq!(v.norm(), 0.0);
            } else {
                assert!((v.norm() - f64::from(2 * k.l + 1).sqrt()).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn zero_sigma_keeps_only_ground_level() {
    let lbl = KlauderLabel::new(0.0, 0.4, EulerAngles { theta: 1.0, phi: 0.3, psi: 0.2 }).unwrap();
    let s = klauder_cs(&lbl, 1.0, 3, KcWeights::Normalized).unwrap();
    assert!(s.0.keys().all(|k| k.n == 1));
    assert!((s.norm_sq() - 1.0).abs() < 1e-14);
}

#[test]
fn kc_states_normalized_and_printed_norm() {
    let mut r = rng(72);
    for _ in 0..20 {
        let sigma = r.gen_range(0.0..2.0);
        let lbl = KlauderLabel::new(sigma, r.gen_range(-5.0..5.0), euler(&mut r)).unwrap();
        let s = klauder_cs(&lbl, 0.8, 30, KcWeights::Normalized).unwrap();
        assert!((s.norm_sq() - 1.0).abs() < 1e-12);
        let p = klauder_cs(&lbl, 0.8, 30, KcWeights::Printed).unwrap();
        let s2 = sigma * sigma;
        let want: f64 = (0..=30u32).map(|n| (-2.0 * s2).exp() * s2.powi(n as i32) / factorial(n) * f64::from((n + 1) * (n + 1))).sum();
        assert!((p.norm_sq() - want).abs() < 1e-12 * want);
    }
}

#[test]
fn truncation_bound_enforced() {
    let lbl = KlauderLabel::new(3.0, 0.0, EulerAngles::default()).unwrap();
    assert!(matches!(klauder_cs(&lbl, 1.0, 10, KcWeights::Printed), Err(Error::Convergence(_))));
    assert!(kc_tail(3.0, 10) > 1e-12 && kc_tail(3.0, 60) < 1e-12);
    assert!(KlauderLabel::new(-1.0, 0.0, EulerAngles::default()).is_err());
}

#[test]
fn am_resolution_of_identity() {
    for n in 0..=2 {
        let d = am_resolution_check(n, [64, 64, 64], AmMeasure::Normalized).unwrap();
        assert!(d < 1e-10, "n = {n}: {d}");
    }
    let printed = am_resolution_check(1, [16, 16, 16], AmMeasure::Printed).unwrap();
    assert!((printed - (8.0 * PI * PI - 1.0)).abs() < 1e-8);
    assert!(matches!(am_resolution_check(2, [2, 2, 2], AmMeasure::Normalized), Err(Error::Convergence(_))));
}

#[test]
fn stationary_states_have_constant_modulus() {
    let h = 1.0;
    let f = kc_transform(&CoeffTable::single(QuantumNumbers::new(2, 1, 0).unwrap()), h, 20).unwrap();
    let lbl = KlauderLabel::new(0.9, 0.3, EulerAngles { theta: 1.2, phi: 0.5, psi: 2.0 }).unwrap();
    let f0 = f.eval(&lbl).unwrap();
    assert!(f0.norm() > 1e-3);
    for t in [0.1, 0.7, 3.0] {
        let ft = kc_time_evolve(&f, t, kepler_omega(h)).eval(&lbl).unwrap();
        assert!((ft.norm() - f0.norm()).abs() < 1e-14);
    }
}

fn random_bound_state(r: &mut ChaCha8Rng, top: u32) -> CoeffTable {
    let mut t = CoeffTable::default();
    for n in 1..=top {
        for qn in QuantumNumbers::level(n) {
            t.0.insert(qn, rc(r, 1.0));
        }
    }
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gamma_shift_is_level_phase(seed in any::<u64>(), t in -3.0f64..3.0) {
        let mut r = rng(seed);
        let h = r.gen_range(0.5..2.0);
        let psi = random_bound_state(&mut r, 3);
        let lbl = KlauderLabel::new(r.gen_range(0.2..1.5), r.gen_range(-2.0..2.0), euler(&mut r)).unwrap();
        let f = kc_transform(&psi, h, 25).unwrap();
        let shifted = kc_time_evolve(&f, t, kepler_omega(h)).eval(&lbl).unwrap();
        let phased = kc_transform(&level_phase_evolve(&psi, t, h), h, 25).unwrap().eval(&lbl).unwrap();
        prop_assert!((shifted - phased).norm() <= 1e-12 * phased.norm().max(1e-3));
    }

    #[test]
    fn schrodinger_flow_is_the_opposite_shift(seed in any::<u64>(), t in 0.2f64..3.0) {
        let mut r = rng(seed);
        let h = 1.0;
        let psi = random_bound_state(&mut r, 3);
        let lbl = KlauderLabel::new(0.8, 0.1, euler(&mut r)).unwrap();
        let f = kc_transform(&psi, h, 25).unwrap();
        let evolved = kc_transform(&schrodinger_evolve(&psi, t, h), h, 25).unwrap().eval(&lbl).unwrap();
        let back = kc_time_evolve(&f, -t, kepler_omega(h)).eval(&lbl).unwrap();
        prop_assert!((evolved - back).norm() <= 1e-12 * back.norm().max(1e-3));
    }
}

#[test]
fn kc_transform_is_the_pairing() {
    let mut r = rng(73);
    let psi = random_bound_state(&mut r, 2);
    let lbl = KlauderLabel::new(0.7, 1.1, euler(&mut r)).unwrap();
    let f = kc_transform(&psi, 1.3, 20).unwrap().eval(&lbl).unwrap();
    let want = psi.inner(&klauder_cs(&lbl, 1.3, 20, KcWeights::Printed).unwrap());
    assert!((f - want).norm() < 1e-14);
    assert!(kc_transform(&CoeffTable::single(QuantumNumbers::new(9, 0, 0).unwrap()), 1.0, 3).is_err());
}

#[test]
fn level_degeneracy_counts() {
    let mut r = rng(74);
    let lbl = KlauderLabel::new(0.8, 0.4, euler(&mut r)).unwrap();
    for n in 1..=3 {
        let (count, dev) = kc_level_degeneracy(n, 1.0, &lbl).unwrap();
        assert_eq!(count as u32, n * n);
        assert!(dev < 1e-6, "level {n}: {dev}");
    }
}
