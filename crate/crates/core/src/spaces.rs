//! State spaces: L²(Rⁿ), the Fock-type space F² over (q,p), the space H_h² of
//! functions on the group, kernel states, and the maps between them.
//!
//! Variable layout: Fock functions use [q₁..qₙ, p₁..pₙ]; H_h² functions use
//! [x₁..xₙ, y₁..yₙ] with the e^{2πihs} factor left implicit.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{same_h, Error, Result};
use crate::gauss::{ExpBuilder, PGFun};

pub(crate) fn cr(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub(crate) fn ci(x: f64) -> C64 {
    C64::new(0.0, x)
}

/// ψ(ξ) on Rⁿ for the Schrödinger representation with parameter h.
#[derive(Clone, Debug, PartialEq)]
pub struct SchrodingerState {
    pub h: f64,
    pub psi: PGFun,
}

/// f(q,p) in the polarized space F².
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    pub h: f64,
    pub f: PGFun,
}

/// V(x,y) with v(s,x,y) = e^{2πihs}V(x,y).
#[derive(Clone, Debug, PartialEq)]
pub struct HState {
    pub h: f64,
    pub v: PGFun,
}

/// Kernel l(x,y) of a state; the e^{2πihs} factor is implicit when h ≠ 0.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelState {
    pub h: f64,
    pub l: PGFun,
}

/// Phase-space label of a coherent state.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentLabel {
    pub h: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl CoherentLabel {
    pub fn new(h: f64, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if h == 0.0 {
            return Err(Error::Invalid("coherent labels need h ≠ 0".into()));
        }
        if a.len() != b.len() {
            return Err(Error::Dim { expected: a.len(), got: b.len() });
        }
        Ok(CoherentLabel { h, a, b })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }
}

impl SchrodingerState {
    pub fn n(&self) -> usize {
        self.psi.dim()
    }

    pub fn norm_sq(&self) -> Result<f64> {
        Ok(self.psi.inner(&self.psi, cr(1.0))?.re)
    }

    pub fn inner(&self, other: &SchrodingerState) -> Result<C64> {
        same_h(self.h, other.h)?;
        Ok(self.psi.inner(&other.psi, cr(1.0))?)
    }

    /// e^{−πξ²/h}
    pub fn ground(h: f64, n: usize) -> Self {
        let mut e = ExpBuilder::new(n);
        for i in 0..n {
            e = e.quad(i, i, cr(-PI / h));
        }
        SchrodingerState { h, psi: e.fun() }
    }
}

impl FockState {
    pub fn n(&self) -> usize {
        self.f.dim() / 2
    }

    /// exp(−2π(q²+p²)/h)
    pub fn vacuum(h: f64, n: usize) -> Self {
        let mut e = ExpBuilder::new(2 * n);
        for i in 0..2 * n {
            e = e.quad(i, i, cr(-2.0 * PI / h));
        }
        FockState { h, f: e.fun() }
    }

    /// ρ_h(0,x,y) applied to the vacuum.
    pub fn coherent(h: f64, x: &[f64], y: &[f64]) -> Result<Self> {
        let g = crate::heisenberg::GroupElement::new(0.0, x.to_vec(), y.to_vec())?;
        crate::heisenberg::rho_h_apply(&g, &FockState::vacuum(h, x.len()))
    }

    /// D_j f = (h/2)(∂p_j + i∂q_j)f + 2π(p_j + iq_j)f, as a function.
    pub fn polarization(&self, j: usize) -> Result<PGFun> {
        let n = self.n();
        let dp = self.f.diff(n + j)?;
        let dq = self.f.diff(j)?;
        let lin = crate::poly::Poly::linear(cr(0.0), &{
            let mut v = vec![cr(0.0); 2 * n];
            v[j] = ci(2.0 * PI);
            v[n + j] = cr(2.0 * PI);
            v
        });
        let d = dp.add(&dq.scale(ci(1.0)))?.scale(cr(self.h / 2.0));
        Ok(d.add(&self.f.mul_poly(&lin)?)?)
    }

    /// Largest |D_j f| / max|f| over the sample points.
    pub fn polarization_residual(&self, points: &[Vec<f64>]) -> Result<f64> {
        let scale = points.iter().map(|p| self.f.eval(p).norm()).fold(1e-300, f64::max);
        let mut worst: f64 = 0.0;
        for j in 0..self.n() {
            let d = self.polarization(j)?;
            for p in points {
                worst = worst.max(d.eval(p).norm() / scale);
            }
        }
        Ok(worst)
    }
}

impl HState {
    pub fn n(&self) -> usize {
        self.v.dim() / 2
    }

    /// (h/2)ⁿ exp(−(πh/2)(x²+y²))
    pub fn vacuum(h: f64, n: usize) -> Self {
        let mut e = ExpBuilder::new(2 * n).konst(cr(n as f64 * (h / 2.0).ln()));
        for i in 0..2 * n {
            e = e.quad(i, i, cr(-PI * h / 2.0));
        }
        HState { h, v: e.fun() }
    }

    /// E_j V = πh(x_j − iy_j)V + ∂x_j V − i∂y_j V.
    pub fn polarization(&self, j: usize) -> Result<PGFun> {
        let n = self.n();
        let mut lin = vec![cr(0.0); 2 * n];
        lin[j] = cr(PI * self.h);
        lin[n + j] = ci(-PI * self.h);
        let mult = self.v.mul_poly(&crate::poly::Poly::linear(cr(0.0), &lin))?;
        let dx = self.v.diff(j)?;
        let dy = self.v.diff(n + j)?.scale(ci(-1.0));
        Ok(mult.add(&dx)?.add(&dy)?)
    }

    pub fn polarization_residual(&self, points: &[Vec<f64>]) -> Result<f64> {
        let scale = points.iter().map(|p| self.v.eval(p).norm()).fold(1e-300, f64::max);
        let mut worst: f64 = 0.0;
        for j in 0..self.n() {
            let d = self.polarization(j)?;
            for p in points {
                worst = worst.max(d.eval(p).norm() / scale);
            }
        }
        Ok(worst)
    }

    pub fn scale(&self, c: C64) -> HState {
        HState { h: self.h, v: self.v.scale(c) }
    }

    pub fn add(&self, other: &HState) -> Result<HState> {
        same_h(self.h, other.h)?;
        Ok(HState { h: self.h, v: self.v.add(&other.v)? })
    }

    pub fn sub(&self, other: &HState) -> Result<HState> {
        same_h(self.h, other.h)?;
        Ok(HState { h: self.h, v: self.v.sub(&other.v)? })
    }
}

/// (4/h)ⁿ ∫ f₁ conj(f₂) dq dp
pub fn fock_inner(f1: &FockState, f2: &FockState) -> Result<C64> {
    same_h(f1.h, f2.h)?;
    let n = f1.n();
    Ok(f1.f.inner(&f2.f, cr((4.0 / f1.h).powi(n as i32)))?)
}

/// (4/h)ⁿ ∫ V₁ conj(V₂) dx dy
pub fn hh_inner(v1: &HState, v2: &HState) -> Result<C64> {
    same_h(v1.h, v2.h)?;
    let n = v1.n();
    Ok(v1.v.inner(&v2.v, cr((4.0 / v1.h).powi(n as i32)))?)
}

/// Kernel K_I(q,p,ξ) = e^{(4πi/h)(p·ξ+q·p)} e^{−(π/h)(ξ+2q)²} over [q, p, ξ].
fn wavelet_kernel(h: f64, n: usize) -> PGFun {
    let (q, p, xi) = (0, n, 2 * n);
    let mut e = ExpBuilder::new(3 * n);
    for i in 0..n {
        e = e
            .quad(p + i, xi + i, ci(4.0 * PI / h))
            .quad(q + i, p + i, ci(4.0 * PI / h))
            .quad(xi + i, xi + i, cr(-PI / h))
            .quad(xi + i, q + i, cr(-4.0 * PI / h))
            .quad(q + i, q + i, cr(-4.0 * PI / h));
    }
    e.fun()
}

/// L² → F²: (2/h)^{n/4} ∫ K_I(q,p,ξ) ψ(ξ) dξ.
pub fn t_apply(st: &SchrodingerState) -> Result<FockState> {
    let n = st.n();
    let h = st.h;
    let map: Vec<usize> = (2 * n..3 * n).collect();
    let joint = wavelet_kernel(h, n).mul(&st.psi.embed(3 * n, &map)?)?;
    let f = joint.integrate_out(&map)?.scale(cr((2.0 / h).powf(n as f64 / 4.0)));
    Ok(FockState { h, f })
}

/// F² → L²: (4/h)ⁿ (2/h)^{n/4} ∫ f(q,p) conj K_I(q,p,ξ) dq dp.
pub fn t_inverse_apply(f: &FockState) -> Result<SchrodingerState> {
    let n = f.n();
    let h = f.h;
    let map: Vec<usize> = (0..2 * n).collect();
    let joint = wavelet_kernel(h, n).conj().mul(&f.f.embed(3 * n, &map)?)?;
    let psi = joint
        .integrate_out(&map)?
        .scale(cr((4.0 / h).powi(n as i32) * (2.0 / h).powf(n as f64 / 4.0)));
    Ok(SchrodingerState { h, psi })
}

/// F² → H_h²: ∫ f(q,p) e^{2πi(q·x+p·y)} dq dp.
pub fn s_h_apply(f: &FockState) -> Result<HState> {
    let n = f.n();
    let m = 2 * n;
    // joint layout [x, y, q, p]
    let mut e = ExpBuilder::new(2 * m);
    for i in 0..m {
        e = e.quad(i, m + i, ci(2.0 * PI));
    }
    let map: Vec<usize> = (m..2 * m).collect();
    let joint = e.fun().mul(&f.f.embed(2 * m, &map)?)?;
    Ok(HState { h: f.h, v: joint.integrate_out(&map)? })
}

/// H_h² → F²: ∫ V(x,y) e^{−2πi(q·x+p·y)} dx dy.
pub fn s_h_inverse(v: &HState) -> Result<FockState> {
    let n = v.n();
    let m = 2 * n;
    // joint layout [q, p, x, y]
    let mut e = ExpBuilder::new(2 * m);
    for i in 0..m {
        e = e.quad(i, m + i, ci(-2.0 * PI));
    }
    let map: Vec<usize> = (m..2 * m).collect();
    let joint = e.fun().mul(&v.v.embed(2 * m, &map)?)?;
    Ok(FockState { h: v.h, f: joint.integrate_out(&map)? })
}

/// Coherent state (h/2)ⁿ exp(πi(b·y+a·x) − (πh/2)(x+b/h)² − (πh/2)(y−a/h)²).
pub fn coherent_v(lbl: &CoherentLabel) -> HState {
    let n = lbl.n();
    let h = lbl.h;
    let mut e = ExpBuilder::new(2 * n).konst(cr(n as f64 * (h / 2.0).ln()));
    for i in 0..n {
        let (a, b) = (lbl.a[i], lbl.b[i]);
        let (x, y) = (i, n + i);
        e = e
            .lin(x, ci(PI * a))
            .lin(y, ci(PI * b))
            // −(πh/2)(x + b/h)²
            .quad(x, x, cr(-PI * h / 2.0))
            .lin(x, cr(-PI * b))
            .konst(cr(-PI * b * b / (2.0 * h)))
            // −(πh/2)(y − a/h)²
            .quad(y, y, cr(-PI * h / 2.0))
            .lin(y, cr(PI * a))
            .konst(cr(-PI * a * a / (2.0 * h)));
    }
    HState { h, v: e.fun() }
}

/// ⟨v_{(h,a,b)}, v_{(h,a′,b′)}⟩ in closed form.
pub fn repker_hh(l1: &CoherentLabel, l2: &CoherentLabel) -> Result<C64> {
    same_h(l1.h, l2.h)?;
    let h = l1.h;
    let mut s = C64::default();
    for i in 0..l1.n() {
        let z1 = C64::new(l1.a[i], l1.b[i]);
        let z2 = C64::new(l2.a[i], l2.b[i]);
        s += 2.0 * z1 * z2.conj() - z1.norm_sqr() - z2.norm_sqr();
    }
    Ok((s * (PI / (2.0 * h))).exp())
}

/// Reproducing kernel of F², (1/h)ⁿ exp(−(2π/h)(q²+p²+q′²+p′²−2qq′−2pp′−2iq′p+2iqp′)).
pub fn repker_fock(q: &[f64], p: &[f64], q2: &[f64], p2: &[f64], h: f64) -> C64 {
    let n = q.len();
    let mut s = C64::default();
    for i in 0..n {
        s += q[i] * q[i] + p[i] * p[i] + q2[i] * q2[i] + p2[i] * p2[i] - 2.0 * q[i] * q2[i] - 2.0 * p[i] * p2[i];
        s += ci(-2.0 * q2[i] * p[i] + 2.0 * q[i] * p2[i]);
    }
    (s * (-2.0 * PI / h)).exp() * (1.0 / h).powi(n as i32)
}

/// The same kernel as a function over [q, p, q′, p′].
pub fn repker_fock_fun(h: f64, n: usize) -> PGFun {
    let (q, p, q2, p2) = (0, n, 2 * n, 3 * n);
    let k = -2.0 * PI / h;
    let mut e = ExpBuilder::new(4 * n).konst(cr(-(n as f64) * h.ln()));
    for i in 0..n {
        e = e
            .quad(q + i, q + i, cr(k))
            .quad(p + i, p + i, cr(k))
            .quad(q2 + i, q2 + i, cr(k))
            .quad(p2 + i, p2 + i, cr(k))
            .quad(q + i, q2 + i, cr(-2.0 * k))
            .quad(p + i, p2 + i, cr(-2.0 * k))
            .quad(q2 + i, p + i, ci(-2.0 * k))
            .quad(q + i, p2 + i, ci(2.0 * k));
    }
    e.fun()
}

/// l(x,y) = (4/h)ⁿ ∫ e^{πih(x·y′−x′·y)} conj V(x′−x, y′−y) V(x′,y′) dx′dy′.
pub fn kernel_from_state(v: &HState) -> Result<KernelState> {
    let n = v.n();
    let m = 2 * n;
    let h = v.h;
    // joint [x, y, x′, y′]
    let mut e = ExpBuilder::new(2 * m);
    for i in 0..n {
        let (x, y, x2, y2) = (i, n + i, m + i, m + n + i);
        e = e.quad(x, y2, ci(PI * h)).quad(x2, y, ci(-PI * h));
    }
    let mut l = DMatrix::zeros(m, 2 * m);
    for i in 0..m {
        l[(i, m + i)] = cr(1.0);
        l[(i, i)] = cr(-1.0);
    }
    let shifted = v.v.conj().affine_sub(&l, &DVector::zeros(m))?;
    let map: Vec<usize> = (m..2 * m).collect();
    let joint = e.fun().mul(&shifted)?.mul(&v.v.embed(2 * m, &map)?)?;
    let lf = joint.integrate_out(&map)?.scale(cr((4.0 / h).powi(n as i32)));
    Ok(KernelState { h, l: lf })
}

/// Kernel coherent state exp(2πi(a·x+b·y) − (πh/2)(x²+y²)); h = 0 gives the pure state.
pub fn kernel_coherent(h: f64, a: &[f64], b: &[f64]) -> KernelState {
    let n = a.len();
    let mut e = ExpBuilder::new(2 * n);
    for i in 0..n {
        e = e
            .lin(i, ci(2.0 * PI * a[i]))
            .lin(n + i, ci(2.0 * PI * b[i]))
            .quad(i, i, cr(-PI * h / 2.0))
            .quad(n + i, n + i, cr(-PI * h / 2.0));
    }
    KernelState { h, l: e.fun() }
}

/// The (q,p) pure state e^{2πi(a·x+b·y)} as an h = 0 kernel.
pub fn pure_kernel(a: &[f64], b: &[f64]) -> KernelState {
    kernel_coherent(0.0, a, b)
}

/// Value of a p-mechanised observable in the pure state at (a,b).
pub fn pure_state_eval(a: &[f64], b: &[f64], obs: &crate::dynamics::PMechObservable) -> Result<C64> {
    crate::dynamics::kernel_pairing(obs, &pure_kernel(a, b))
}

/// Sign of the bilinear πihxy term in the L² → H_h² kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LtwoKernel {
    /// −πihxy with constant (2/h)^{n/4}(h/2)ⁿ: equals S_h∘T.
    Derived,
    /// +πihxy with no constant, as printed in the source text.
    Printed,
}

/// L² → H_h² by a single ξ-integral.
pub fn ltwo_to_hh_kernel_apply(st: &SchrodingerState, which: LtwoKernel) -> Result<HState> {
    let n = st.n();
    let h = st.h;
    let (x, y, xi) = (0, n, 2 * n);
    let sign = match which {
        LtwoKernel::Derived => -1.0,
        LtwoKernel::Printed => 1.0,
    };
    let mut e = ExpBuilder::new(3 * n);
    for i in 0..n {
        e = e
            .quad(xi + i, y + i, cr(-2.0 * PI))
            .quad(xi + i, x + i, ci(-2.0 * PI))
            .quad(y + i, y + i, cr(-PI * h))
            .quad(x + i, y + i, ci(sign * PI * h))
            .quad(xi + i, xi + i, cr(-PI / h));
    }
    let map: Vec<usize> = (2 * n..3 * n).collect();
    let joint = e.fun().mul(&st.psi.embed(3 * n, &map)?)?;
    let mut v = joint.integrate_out(&map)?;
    if which == LtwoKernel::Derived {
        v = v.scale(cr((2.0 / h).powf(n as f64 / 4.0) * (h / 2.0).powi(n as i32)));
    }
    Ok(HState { h, v })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenKind {
    Position,
    Momentum,
}

/// Generalized eigenfunction in one dimension, over [x, y]:
/// position exp(2πξ(y+ix) − πhy² − πihxy − πξ²/h),
/// momentum exp(2πξ(x+iy) − πhx² + πihxy − πξ²/h).
pub fn generalized_eigenfunction(kind: EigenKind, xi: f64, h: f64) -> HState {
    let (x, y) = (0, 1);
    let e = ExpBuilder::new(2).konst(cr(-PI * xi * xi / h));
    let e = match kind {
        EigenKind::Position => e
            .lin(y, cr(2.0 * PI * xi))
            .lin(x, ci(2.0 * PI * xi))
            .quad(y, y, cr(-PI * h))
            .quad(x, y, ci(-PI * h)),
        EigenKind::Momentum => e
            .lin(x, cr(2.0 * PI * xi))
            .lin(y, ci(2.0 * PI * xi))
            .quad(x, x, cr(-PI * h))
            .quad(x, y, ci(PI * h)),
    };
    HState { h, v: e.fun() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacua_have_unit_norm() {
        for h in [0.5, 1.0, 2.0] {
            let f = FockState::vacuum(h, 1);
            assert!((fock_inner(&f, &f).unwrap() - 1.0).norm() < 1e-13);
            let v = HState::vacuum(h, 2);
            assert!((hh_inner(&v, &v).unwrap() - 1.0).norm() < 1e-13);
        }
    }

    #[test]
    fn s_h_maps_vacuum_to_vacuum() {
        let h = 0.7;
        let v = s_h_apply(&FockState::vacuum(h, 1)).unwrap();
        let w = HState::vacuum(h, 1);
        for p in [[0.1, 0.2], [-0.5, 0.9]] {
            assert!((v.v.eval(&p) - w.v.eval(&p)).norm() < 1e-13);
        }
    }

    #[test]
    fn coherent_is_unit() {
        let l = CoherentLabel::new(0.8, vec![0.3], vec![-1.1]).unwrap();
        let v = coherent_v(&l);
        assert!((hh_inner(&v, &v).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn fock_kernel_diagonal() {
        let h = 0.6;
        let k = repker_fock(&[0.3], &[0.4], &[0.3], &[0.4], h);
        assert!((k - 1.0 / h).norm() < 1e-12);
    }
}
