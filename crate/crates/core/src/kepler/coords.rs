//! Spherical polar coordinates on R³ minus the ξ₃ axis, the matching
//! representations of the Heisenberg group, and spherical momenta.
//!
//! Convention: `theta` is the azimuthal angle, `phi` the polar one. Formulas
//! quoted with the roles reversed (the momentum lemma, the one-dimensional
//! representation, the eigenfunctions) are converted at the call boundary.

use std::f64::consts::PI;

use nalgebra::Matrix3;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::heisenberg::{rho_qp_apply, GroupElement};
use crate::numerics::central_diff;

const AXIS_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalPoint {
    pub r: f64,
    /// azimuthal angle in [0, 2π)
    pub theta: f64,
    /// polar angle in (0, π)
    pub phi: f64,
}

impl SphericalPoint {
    pub fn new(r: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(r > 0.0) || !(0.0..2.0 * PI).contains(&theta) || !(phi > 0.0 && phi < PI) {
            return Err(Error::Invalid(format!("({r}, {theta}, {phi}) outside r > 0, θ ∈ [0, 2π), φ ∈ (0, π)")));
        }
        Ok(SphericalPoint { r, theta, phi })
    }
}

fn check_off_axis(xi: &[f64; 3]) -> Result<f64> {
    let rho = xi[0].hypot(xi[1]);
    let r = rho.hypot(xi[2]);
    if rho <= AXIS_EPS * r.max(1.0) {
        return Err(Error::Axis(format!("{xi:?}")));
    }
    Ok(rho)
}

/// arctan taking values in [0, π)
fn atan_upper(v: f64) -> f64 {
    let a = v.atan();
    if a < 0.0 {
        a + PI
    } else {
        a
    }
}

/// ℳ_S with the four-case azimuth and two-case polar branches.
pub fn sph_from_cartesian(xi: [f64; 3]) -> Result<SphericalPoint> {
    let rho = check_off_axis(&xi)?;
    let [x1, x2, x3] = xi;
    let r = (x1 * x1 + x2 * x2 + x3 * x3).sqrt();
    let theta = if x1 != 0.0 {
        if x2 > 0.0 {
            atan_upper(x2 / x1)
        } else if x2 < 0.0 {
            PI + atan_upper(x2 / x1)
        } else if x1 > 0.0 {
            0.0
        } else {
            // the printed branch would return 0 on the negative ξ₁ half-line
            PI
        }
    } else if x2 > 0.0 {
        PI / 2.0
    } else {
        3.0 * PI / 2.0
    };
    let s = (rho / r).min(1.0).asin();
    let phi = if x3 >= 0.0 { s } else { PI - s };
    Ok(SphericalPoint { r, theta, phi })
}

pub fn cartesian_from_sph(p: &SphericalPoint) -> [f64; 3] {
    let (st, ct) = p.theta.sin_cos();
    let (sp, cp) = p.phi.sin_cos();
    [p.r * ct * sp, p.r * st * sp, p.r * cp]
}

/// (Dℳ_S)_{ij} = ∂(r, θ, φ)_i/∂ξ_j.
pub fn spherical_jacobian(xi: [f64; 3]) -> Result<Matrix3<f64>> {
    let rho = check_off_axis(&xi)?;
    let [x1, x2, x3] = xi;
    let r2 = x1 * x1 + x2 * x2 + x3 * x3;
    let r = r2.sqrt();
    let rho2 = rho * rho;
    Ok(Matrix3::new(
        x1 / r,
        x2 / r,
        x3 / r,
        -x2 / rho2,
        x1 / rho2,
        0.0,
        x1 * x3 / (r2 * rho),
        x2 * x3 / (r2 * rho),
        -rho / r2,
    ))
}

/// Momenta conjugate to (r, θ, φ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalMomenta {
    pub p_r: f64,
    /// conjugate to the azimuth: q₁p₂ − q₂p₁
    pub p_theta: f64,
    /// conjugate to the polar angle
    pub p_phi: f64,
}

pub fn spherical_momenta(q: [f64; 3], p: [f64; 3]) -> Result<(SphericalPoint, SphericalMomenta)> {
    let pt = sph_from_cartesian(q)?;
    let [q1, q2, q3] = q;
    let [p1, p2, p3] = p;
    let rho2 = q1 * q1 + q2 * q2;
    let rho = rho2.sqrt();
    let mom = SphericalMomenta {
        p_r: (q1 * p1 + q2 * p2 + q3 * p3) / pt.r,
        p_theta: -q2 * p1 + q1 * p2,
        p_phi: (q1 * q3 * p1 + q2 * q3 * p2 - rho2 * p3) / rho,
    };
    Ok((pt, mom))
}

/// Inverse of [`spherical_momenta`]: cartesian (q, p).
pub fn spherical_momenta_inverse(pt: &SphericalPoint, mom: &SphericalMomenta) -> ([f64; 3], [f64; 3]) {
    // quoted formulas use (polar, azimuth) = (ϑ, ϕ)
    let (sv, cv) = pt.phi.sin_cos();
    let (sa, ca) = pt.theta.sin_cos();
    let r = pt.r;
    let (pr, pv, pa) = (mom.p_r, mom.p_phi, mom.p_theta);
    let p = [
        pr * sv * ca + pv * cv * ca / r - pa * sa / (r * sv),
        pr * sv * sa + pv * cv * sa / r + pa * ca / (r * sv),
        pr * cv - pv * sv / r,
    ];
    (cartesian_from_sph(pt), p)
}

/// One-dimensional representation labelled by a spherical phase-space point.
pub fn rho_sph_qp_apply(pt: &SphericalPoint, mom: &SphericalMomenta, g: &GroupElement) -> Result<C64> {
    if g.n() != 3 {
        return Err(Error::Dim { expected: 3, got: g.n() });
    }
    let (q, p) = spherical_momenta_inverse(pt, mom);
    Ok(rho_qp_apply(&q, &p, g))
}

/// Value of the p-mechanised angular momentum L₃ under the one-dimensional
/// representation at (pt, mom), read off as (1/2πi)²(∂x₁∂y₂ − ∂x₂∂y₁) of the
/// representation at the identity by finite differences.
pub fn l3_one_dim(pt: &SphericalPoint, mom: &SphericalMomenta, step: f64) -> Result<C64> {
    let eval = |v: &[f64]| {
        let g = GroupElement { s: 0.0, x: v[..3].to_vec(), y: v[3..].to_vec() };
        rho_sph_qp_apply(pt, mom, &g).unwrap_or(C64::new(f64::NAN, 0.0))
    };
    let mixed = |i: usize, j: usize| {
        let d = |v: &[f64]| central_diff(&eval, v, 3 + j, step);
        central_diff(&d, &[0.0; 6], i, step)
    };
    let tpi = C64::new(0.0, 2.0 * PI);
    let val = (mixed(0, 1) - mixed(1, 0)) / (tpi * tpi);
    if !val.is_finite() {
        return Err(Error::Axis("label on the axis".into()));
    }
    Ok(val)
}

/// ρ_h^P(s,x,y)ψ at `at`: e^{−2πihs} e^{πihx·y} e^{2πix·ξ} ψ(ℳ_S(ξ + hy)), ξ = ℳ_S⁻¹(at).
pub fn rho_hp_apply<F: Fn(&SphericalPoint) -> C64>(g: &GroupElement, h: f64, psi: F, at: &SphericalPoint) -> Result<C64> {
    if g.n() != 3 {
        return Err(Error::Dim { expected: 3, got: g.n() });
    }
    let xi = cartesian_from_sph(at);
    let moved = [xi[0] + h * g.y[0], xi[1] + h * g.y[1], xi[2] + h * g.y[2]];
    let target = sph_from_cartesian(moved)?;
    let xy: f64 = g.x.iter().zip(&g.y).map(|(a, b)| a * b).sum();
    let xxi: f64 = g.x.iter().zip(&xi).map(|(a, b)| a * b).sum();
    let phase = 2.0 * PI * (-h * g.s + 0.5 * h * xy + xxi);
    Ok(C64::from_polar(1.0, phase) * psi(&target))
}

/// ρ_h^P(L₃)ψ = (h/2πi) ∂ψ/∂(azimuth), by central differences.
pub fn rho_hp_l3_apply<F: Fn(&SphericalPoint) -> C64>(h: f64, psi: F, at: &SphericalPoint, step: f64) -> Result<C64> {
    check_off_axis(&cartesian_from_sph(at))?;
    let f = |v: &[f64]| psi(&SphericalPoint { r: at.r, theta: v[0], phi: at.phi });
    let d = central_diff(&f, &[at.theta], 0, step);
    Ok(d * h / C64::new(0.0, 2.0 * PI))
}

/// Jacobian of (q, p) ↦ (r, θ, φ, p_r, p_θ, p_φ) by central differences.
pub fn spherical_phase_jacobian(q: [f64; 3], p: [f64; 3], step: f64) -> Result<nalgebra::DMatrix<f64>> {
    let map = |z: &[f64]| -> Result<[f64; 6]> {
        let (pt, m) = spherical_momenta([z[0], z[1], z[2]], [z[3], z[4], z[5]])?;
        Ok([pt.r, pt.theta, pt.phi, m.p_r, m.p_theta, m.p_phi])
    };
    let z0 = [q[0], q[1], q[2], p[0], p[1], p[2]];
    let mut jac = nalgebra::DMatrix::zeros(6, 6);
    for k in 0..6 {
        let mut zp = z0;
        let mut zm = z0;
        zp[k] += step;
        zm[k] -= step;
        let (fp, fm) = (map(&zp)?, map(&zm)?);
        for i in 0..6 {
            let mut d = fp[i] - fm[i];
            if i == 1 {
                // azimuth wraps at 2π
                d = (d + PI).rem_euclid(2.0 * PI) - PI;
            }
            jac[(i, k)] = d / (2.0 * step);
        }
    }
    Ok(jac)
}

/// Max deviation of the canonical brackets {q_i, p_j} = δ_ij, {q_i, q_j} =
/// {p_i, p_j} = 0, with q, p written as functions of the spherical phase
/// coordinates and differentiated numerically there.
pub fn spherical_bracket_defect(pt: &SphericalPoint, mom: &SphericalMomenta, step: f64) -> f64 {
    let z0 = [pt.r, pt.theta, pt.phi, mom.p_r, mom.p_theta, mom.p_phi];
    let cart = |z: &[f64]| {
        let (q, p) = spherical_momenta_inverse(
            &SphericalPoint { r: z[0], theta: z[1], phi: z[2] },
            &SphericalMomenta { p_r: z[3], p_theta: z[4], p_phi: z[5] },
        );
        [q[0], q[1], q[2], p[0], p[1], p[2]]
    };
    let grads: Vec<[f64; 6]> = (0..6)
        .map(|k| {
            let mut zp = z0;
            let mut zm = z0;
            zp[k] += step;
            zm[k] -= step;
            let (a, b) = (cart(&zp), cart(&zm));
            let mut g = [0.0; 6];
            for i in 0..6 {
                g[i] = (a[i] - b[i]) / (2.0 * step);
            }
            g
        })
        .collect();
    // grads[k][i] = ∂(coordinate i)/∂z_k
    let bracket = |a: usize, b: usize| (0..3).map(|k| grads[k][a] * grads[3 + k][b] - grads[3 + k][a] * grads[k][b]).sum::<f64>();
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((bracket(i, 3 + j) - want).abs());
            worst = worst.max(bracket(i, j).abs()).max(bracket(3 + i, 3 + j).abs());
        }
    }
    worst
}
