//! The Heisenberg group, its invariant vector fields and representations.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::gauss::{ExpBuilder, PGFun};
use crate::poly::Poly;
use crate::spaces::{ci, cr, FockState, HState, SchrodingerState};

/// (s, x, y) ∈ R × Rⁿ × Rⁿ.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    pub s: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

impl GroupElement {
    pub fn new(s: f64, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Dim { expected: x.len(), got: y.len() });
        }
        Ok(GroupElement { s, x, y })
    }

    pub fn identity(n: usize) -> Self {
        GroupElement { s: 0.0, x: vec![0.0; n], y: vec![0.0; n] }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn max_abs_diff(&self, other: &GroupElement) -> f64 {
        let mut d = (self.s - other.s).abs();
        for i in 0..self.n() {
            d = d.max((self.x[i] - other.x[i]).abs()).max((self.y[i] - other.y[i]).abs());
        }
        d
    }
}

/// (s+s′+½(x·y′−x′·y), x+x′, y+y′)
pub fn hg_multiply(g1: &GroupElement, g2: &GroupElement) -> Result<GroupElement> {
    if g1.n() != g2.n() {
        return Err(Error::Dim { expected: g1.n(), got: g2.n() });
    }
    let s = g1.s + g2.s + 0.5 * (dot(&g1.x, &g2.y) - dot(&g2.x, &g1.y));
    let x = g1.x.iter().zip(&g2.x).map(|(a, b)| a + b).collect();
    let y = g1.y.iter().zip(&g2.y).map(|(a, b)| a + b).collect();
    Ok(GroupElement { s, x, y })
}

pub fn hg_inverse(g: &GroupElement) -> GroupElement {
    GroupElement { s: -g.s, x: g.x.iter().map(|v| -v).collect(), y: g.y.iter().map(|v| -v).collect() }
}

/// Representation parameter: either an infinite-dimensional h ≠ 0 or a
/// one-dimensional phase-space point.
#[derive(Clone, Debug, PartialEq)]
pub enum RepLabel {
    Planck(f64),
    Point { q: Vec<f64>, p: Vec<f64> },
}

impl RepLabel {
    pub fn planck(h: f64) -> Result<Self> {
        if h == 0.0 {
            return Err(Error::Invalid("h = 0 is the phase-point family".into()));
        }
        Ok(RepLabel::Planck(h))
    }
}

fn shift_only(f: &PGFun, t: Vec<f64>) -> Result<PGFun> {
    let m = f.dim();
    Ok(f.affine_sub(&DMatrix::identity(m, m).map(cr), &DVector::from_vec(t).map(cr))?)
}

/// e^{−2πihs + 2πix·ξ + πihx·y} ψ(ξ + hy)
pub fn schrodinger_apply(g: &GroupElement, st: &SchrodingerState) -> Result<SchrodingerState> {
    let h = st.h;
    let n = st.n();
    let shifted = shift_only(&st.psi, g.y.iter().map(|v| h * v).collect())?;
    let mut e = ExpBuilder::new(n).konst(ci(-2.0 * PI * h * g.s + PI * h * dot(&g.x, &g.y)));
    for i in 0..n {
        e = e.lin(i, ci(2.0 * PI * g.x[i]));
    }
    Ok(SchrodingerState { h, psi: shifted.mul(&e.fun())? })
}

/// e^{−2πi(hs+q·x+p·y)} f(q − hy/2, p + hx/2)
pub fn rho_h_apply(g: &GroupElement, f: &FockState) -> Result<FockState> {
    let h = f.h;
    let n = f.n();
    let mut t: Vec<f64> = g.y.iter().map(|v| -h * v / 2.0).collect();
    t.extend(g.x.iter().map(|v| h * v / 2.0));
    let shifted = shift_only(&f.f, t)?;
    let mut e = ExpBuilder::new(2 * n).konst(ci(-2.0 * PI * h * g.s));
    for i in 0..n {
        e = e.lin(i, ci(-2.0 * PI * g.x[i])).lin(n + i, ci(-2.0 * PI * g.y[i]));
    }
    Ok(FockState { h, f: shifted.mul(&e.fun())? })
}

/// One-dimensional representation e^{−2πi(q·x+p·y)}.
pub fn rho_qp_apply(q: &[f64], p: &[f64], g: &GroupElement) -> C64 {
    ci(-2.0 * PI * (dot(q, &g.x) + dot(p, &g.y))).exp()
}

/// Left shift v ↦ v(g⁻¹·) on the e^{2πihs} fiber:
/// V′ = e^{−2πihs₀} e^{πih(x·y₀ − x₀·y)} V(x−x₀, y−y₀).
pub fn left_shift_apply(g: &GroupElement, v: &HState) -> Result<HState> {
    let h = v.h;
    let n = v.n();
    let mut t: Vec<f64> = g.x.iter().map(|a| -a).collect();
    t.extend(g.y.iter().map(|a| -a));
    let shifted = shift_only(&v.v, t)?;
    let mut e = ExpBuilder::new(2 * n).konst(ci(-2.0 * PI * h * g.s));
    for i in 0..n {
        e = e.lin(i, ci(PI * h * g.y[i])).lin(n + i, ci(-PI * h * g.x[i]));
    }
    Ok(HState { h, v: shifted.mul(&e.fun())? })
}

/// ζ_{(r,a,b)} V = e^{2πir/h} e^{πi(b·y+a·x)} V(x + b/h, y − a/h),
/// i.e. v ↦ v((r/h², b/h, −a/h)·).
pub fn zeta_apply(r: f64, a: &[f64], b: &[f64], v: &HState) -> Result<HState> {
    let h = v.h;
    if h == 0.0 {
        return Err(Error::Invalid("ζ needs h ≠ 0".into()));
    }
    let n = v.n();
    let mut t: Vec<f64> = b.iter().map(|u| u / h).collect();
    t.extend(a.iter().map(|u| -u / h));
    let shifted = shift_only(&v.v, t)?;
    let mut e = ExpBuilder::new(2 * n).konst(ci(2.0 * PI * r / h));
    for i in 0..n {
        e = e.lin(i, ci(PI * a[i])).lin(n + i, ci(PI * b[i]));
    }
    Ok(HState { h, v: shifted.mul(&e.fun())? })
}

/// Composition law of ζ labels: ζ_{l1}∘ζ_{l2} = ζ_{zeta_compose(l1, l2)}.
pub fn zeta_compose(l1: (f64, &[f64], &[f64]), l2: (f64, &[f64], &[f64])) -> (f64, Vec<f64>, Vec<f64>) {
    let (r1, a1, b1) = l1;
    let (r2, a2, b2) = l2;
    let r = r1 + r2 + 0.5 * (dot(a2, b1) - dot(a1, b2));
    let a = a1.iter().zip(a2).map(|(u, v)| u + v).collect();
    let b = b1.iter().zip(b2).map(|(u, v)| u + v).collect();
    (r, a, b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorField {
    XLeft,
    YLeft,
    SLeft,
    XRight,
    YRight,
    SRight,
}

/// Vector field on a function of (s, x, y), variables ordered [s, x₁..xₙ, y₁..yₙ].
/// Left: S = ∂s, X = ∂x − (y/2)∂s, Y = ∂y + (x/2)∂s.
/// Right: S = −∂s, X = ∂x + (y/2)∂s, Y = ∂y − (x/2)∂s.
pub fn vector_field_apply(which: VectorField, j: usize, b: &PGFun) -> Result<PGFun> {
    let m = b.dim();
    if m % 2 == 0 {
        return Err(Error::Invalid("expected variables [s, x, y]".into()));
    }
    let n = (m - 1) / 2;
    let ds = b.diff(0)?;
    let xj = Poly::var(m, 1 + j);
    let yj = Poly::var(m, 1 + n + j);
    let half = cr(0.5);
    let out = match which {
        VectorField::SLeft => ds,
        VectorField::SRight => ds.scale(cr(-1.0)),
        VectorField::XLeft => b.diff(1 + j)?.sub(&ds.mul_poly(&yj.scale(half))?)?,
        VectorField::YLeft => b.diff(1 + n + j)?.add(&ds.mul_poly(&xj.scale(half))?)?,
        VectorField::XRight => b.diff(1 + j)?.add(&ds.mul_poly(&yj.scale(half))?)?,
        VectorField::YRight => b.diff(1 + n + j)?.sub(&ds.mul_poly(&xj.scale(half))?)?,
    };
    Ok(out)
}

/// Same fields on the e^{2πihs} fiber, where ∂s acts as 2πih.
pub fn vector_field_apply_h(which: VectorField, j: usize, v: &HState) -> Result<HState> {
    let n = v.n();
    let ds = v.v.scale(ci(2.0 * PI * v.h));
    let xj = Poly::var(2 * n, j);
    let yj = Poly::var(2 * n, n + j);
    let half = cr(0.5);
    let out = match which {
        VectorField::SLeft => ds,
        VectorField::SRight => ds.scale(cr(-1.0)),
        VectorField::XLeft => v.v.diff(j)?.sub(&ds.mul_poly(&yj.scale(half))?)?,
        VectorField::YLeft => v.v.diff(n + j)?.add(&ds.mul_poly(&xj.scale(half))?)?,
        VectorField::XRight => v.v.diff(j)?.add(&ds.mul_poly(&yj.scale(half))?)?,
        VectorField::YRight => v.v.diff(n + j)?.sub(&ds.mul_poly(&xj.scale(half))?)?,
    };
    Ok(HState { h: v.h, v: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_law_example() {
        let g1 = GroupElement::new(0.0, vec![1.0], vec![0.0]).unwrap();
        let g2 = GroupElement::new(0.0, vec![0.0], vec![1.0]).unwrap();
        let g = hg_multiply(&g1, &g2).unwrap();
        assert_eq!(g, GroupElement::new(0.5, vec![1.0], vec![1.0]).unwrap());
        let sq = hg_multiply(&g, &GroupElement::new(-0.5, vec![1.0], vec![1.0]).unwrap()).unwrap();
        assert_eq!(sq.s, 0.0);
    }

    #[test]
    fn inverse_gives_identity() {
        let g = GroupElement::new(0.3, vec![1.0, -2.0], vec![0.5, 0.25]).unwrap();
        let e = hg_multiply(&g, &hg_inverse(&g)).unwrap();
        assert!(e.max_abs_diff(&GroupElement::identity(2)) < 1e-15);
    }

    #[test]
    fn one_dim_rep_ignores_s() {
        let g = GroupElement::new(7.3, vec![0.0], vec![0.0]).unwrap();
        assert!((rho_qp_apply(&[1.2], &[3.4], &g) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn zeta_pure_phase() {
        let v = HState::vacuum(0.9, 1);
        let w = zeta_apply(0.4, &[0.0], &[0.0], &v).unwrap();
        let ph = ci(2.0 * PI * 0.4 / 0.9).exp();
        assert!((w.v.eval(&[0.2, 0.1]) - ph * v.v.eval(&[0.2, 0.1])).norm() < 1e-14);
    }
}
