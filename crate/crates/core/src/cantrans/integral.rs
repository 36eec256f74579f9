//! Canonical transformations as operators U on the coherent-state space, specified by
//! matrix elements m(a,b,a′,b′) = ⟨U v_{(a,b)}, v_{(a′,b′)}⟩ that solve
//! ∫ m(a″,b″,a′,b′) ⟨P(f)*v_{ab}, v_{a″b″}⟩ = ∫ m(a,b,a″,b″) ⟨P(F)*v_{a″b″}, v_{a′b′}⟩.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::dynamics::{convolve_left_family, PMechObservable};
use crate::error::{Error, Result};
use crate::gauss::{ExpBuilder, PGFun};
use crate::poly::Poly;
use crate::spaces::{ci, cr, HState};

use super::spec::{linear_parts, CtSpec};

/// A function of 4n label variables ordered [a, b, a′, b′].
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixElementFn {
    pub h: f64,
    pub n: usize,
    pub fun: PGFun,
}

impl MatrixElementFn {
    pub fn eval(&self, a: &[f64], b: &[f64], a2: &[f64], b2: &[f64]) -> C64 {
        let x: Vec<f64> = a.iter().chain(b).chain(a2).chain(b2).copied().collect();
        self.fun.eval(&x)
    }
}

fn check_h(h: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Invalid(format!("h must be positive, got {h}")));
    }
    Ok(())
}

/// Coherent states as one function of [x, y, a, b] (4n variables).
pub fn coherent_family(h: f64, n: usize) -> PGFun {
    let mut e = ExpBuilder::new(4 * n).konst(cr(n as f64 * (h / 2.0).ln()));
    for i in 0..n {
        let (x, y, a, b) = (i, n + i, 2 * n + i, 3 * n + i);
        // πi(b·y + a·x) − (πh/2)(x + b/h)² − (πh/2)(y − a/h)²
        e = e
            .quad(a, x, ci(PI))
            .quad(b, y, ci(PI))
            .quad(x, x, cr(-PI * h / 2.0))
            .quad(x, b, cr(-PI))
            .quad(b, b, cr(-PI / (2.0 * h)))
            .quad(y, y, cr(-PI * h / 2.0))
            .quad(y, a, cr(PI))
            .quad(a, a, cr(-PI / (2.0 * h)));
    }
    e.fun()
}

/// ⟨v_{ab}, v_{a′b′}⟩ = exp[(π/2h) Σ (2(a+ib)(a′−ib′) − a² − b² − a′² − b′²)].
pub fn repker_labels(h: f64, n: usize) -> MatrixElementFn {
    let mut e = ExpBuilder::new(4 * n);
    let k = PI / (2.0 * h);
    for i in 0..n {
        let (a, b, a2, b2) = (i, n + i, 2 * n + i, 3 * n + i);
        e = e
            .quad(a, a2, cr(2.0 * k))
            .quad(a, b2, ci(-2.0 * k))
            .quad(b, a2, ci(2.0 * k))
            .quad(b, b2, cr(2.0 * k));
        for v in [a, b, a2, b2] {
            e = e.quad(v, v, cr(-k));
        }
    }
    MatrixElementFn { h, n, fun: e.fun() }
}

/// ⟨P(f)*v_{ab}, v_{a′b′}⟩ by convolving the coherent family and integrating over (x, y).
pub fn ct_matrix_element(f: &Poly, h: f64) -> Result<MatrixElementFn> {
    check_h(h)?;
    let n = f.dim() / 2;
    let fam = coherent_family(h, n);
    let conv = convolve_left_family(&PMechObservable { n, poly: f.clone() }, &fam, h)?;
    // joint [x, y, a, b, a′, b′]
    let xy: Vec<usize> = (0..2 * n).collect();
    let mut map2 = xy.clone();
    map2.extend(4 * n..6 * n);
    let prod = conv.embed(6 * n, &(0..4 * n).collect::<Vec<_>>())?.mul(&fam.conj().embed(6 * n, &map2)?)?;
    let fun = prod.integrate_out(&xy)?.scale(cr((4.0 / h).powi(n as i32)));
    Ok(MatrixElementFn { h, n, fun })
}

/// Closed form for degree ≤ 1:
/// ⟨P(q)*v, v′⟩ = ½[(a+ib) + (a′−ib′)]K and ⟨P(p)*v, v′⟩ = ½[(b−ia) + (b′+ia′)]K.
pub fn ct_matrix_element_linear(f: &Poly, h: f64) -> Result<MatrixElementFn> {
    check_h(h)?;
    let n = f.dim() / 2;
    let (c0, co) = linear_parts(f).ok_or_else(|| Error::Invalid("closed form needs degree ≤ 1".into()))?;
    let mut lin = vec![cr(0.0); 4 * n];
    for i in 0..n {
        let (a, b, a2, b2) = (i, n + i, 2 * n + i, 3 * n + i);
        let (al, be) = (co[i] * 0.5, co[n + i] * 0.5);
        lin[a] += al - ci(1.0) * be;
        lin[b] += ci(1.0) * al + be;
        lin[a2] += al + ci(1.0) * be;
        lin[b2] += -ci(1.0) * al + be;
    }
    let k = repker_labels(h, n);
    Ok(MatrixElementFn { h, n, fun: k.fun.mul_poly(&Poly::linear(c0, &lin))? })
}

/// m for the flip q ↦ −P, p ↦ Q:
/// exp((π/h)(a+ib)(−ia′−b′) − (π/2h)(a²+b²+a′²+b′²)).
pub fn flip_m(h: f64) -> Result<MatrixElementFn> {
    rotshift_m(h, PI / 2.0, 0.0)
}

/// m for the shifted rotation Q = q cos t + p sin t − C, P = −q sin t + p cos t − C:
/// exp((π/h)[(a+ib)e^{−it}(a′−ib′) + C e^{−it}(a+ib)] − (π/2h)(a²+b²+a′²+b′²)).
pub fn rotshift_m(h: f64, t: f64, c: f64) -> Result<MatrixElementFn> {
    check_h(h)?;
    let k = PI / h;
    let e = C64::from_polar(1.0, -t) * k;
    let (a, b, a2, b2) = (0, 1, 2, 3);
    let i = ci(1.0);
    let mut ex = ExpBuilder::new(4)
        .quad(a, a2, e)
        .quad(a, b2, -i * e)
        .quad(b, a2, i * e)
        .quad(b, b2, e)
        .lin(a, e * c)
        .lin(b, i * e * c);
    for v in [a, b, a2, b2] {
        ex = ex.quad(v, v, cr(-k / 2.0));
    }
    Ok(MatrixElementFn { h, n: 1, fun: ex.fun() })
}

/// Both sides of one equation as functions of [a, b, a′, b′]:
/// lhs = ∫ m(a″,b″,a′,b′) M_f(a,b,a″,b″), rhs = ∫ m(a,b,a″,b″) M_F(a″,b″,a′,b′).
pub fn ct_equation_sides(m: &MatrixElementFn, me_old: &MatrixElementFn, me_new: &MatrixElementFn) -> Result<(PGFun, PGFun)> {
    let n = m.n;
    let blk = |k: usize| (k * n..(k + 1) * n).collect::<Vec<_>>();
    let cat = |ks: &[usize]| ks.iter().flat_map(|&k| blk(k)).collect::<Vec<_>>();
    // joint [a, b, a′, b′, a″, b″]
    let lhs = m
        .fun
        .embed(6 * n, &cat(&[4, 5, 2, 3]))?
        .mul(&me_old.fun.embed(6 * n, &cat(&[0, 1, 4, 5]))?)?
        .integrate_out(&cat(&[4, 5]))?;
    let rhs = m
        .fun
        .embed(6 * n, &cat(&[0, 1, 4, 5]))?
        .mul(&me_new.fun.embed(6 * n, &cat(&[4, 5, 2, 3]))?)?
        .integrate_out(&cat(&[4, 5]))?;
    Ok((lhs, rhs))
}

/// Outcome of checking the integral equations on a label grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CtResidual {
    /// max |lhs − rhs| over all equations and grid points
    pub max_abs: f64,
    /// the same divided by max(|lhs|, |rhs|, 1)
    pub max_rel: f64,
    pub points: usize,
}

/// One equation at one label point.
#[derive(Clone, Debug, PartialEq)]
pub struct CtResidualRow {
    /// [a, b, a′, b′]
    pub point: Vec<f64>,
    /// index into `CtSpec::pairs`
    pub equation: usize,
    pub lhs: C64,
    pub rhs: C64,
}

/// Both sides of every equation of `spec` for the candidate m, at every point of grid⁴ⁿ.
pub fn ct_residual_table(spec: &CtSpec, m: &MatrixElementFn, grid: &[f64]) -> Result<Vec<CtResidualRow>> {
    if spec.n != m.n {
        return Err(Error::Dim { expected: m.n, got: spec.n });
    }
    let dim = 4 * m.n;
    let mut sides = Vec::new();
    for (old, new) in spec.pairs() {
        let mo = ct_matrix_element(old, m.h)?;
        let mn = ct_matrix_element(new, m.h)?;
        sides.push(ct_equation_sides(m, &mo, &mn)?);
    }
    let total = grid.len().pow(dim as u32);
    let mut rows = Vec::with_capacity(total * sides.len());
    let mut pt = vec![0.0; dim];
    for idx in 0..total {
        let mut r = idx;
        for v in pt.iter_mut().rev() {
            *v = grid[r % grid.len()];
            r /= grid.len();
        }
        for (k, (l, rr)) in sides.iter().enumerate() {
            rows.push(CtResidualRow { point: pt.clone(), equation: k, lhs: l.eval(&pt), rhs: rr.eval(&pt) });
        }
    }
    Ok(rows)
}

/// Residuals of all equations of `spec` for the candidate m, at every point of grid⁴ⁿ.
pub fn ct_residual(spec: &CtSpec, m: &MatrixElementFn, grid: &[f64]) -> Result<CtResidual> {
    let rows = ct_residual_table(spec, m, grid)?;
    let mut out = CtResidual { max_abs: 0.0, max_rel: 0.0, points: rows.len() / spec.pairs().len().max(1) };
    for row in &rows {
        let d = (row.lhs - row.rhs).norm();
        out.max_abs = out.max_abs.max(d);
        out.max_rel = out.max_rel.max(d / row.lhs.norm().max(row.rhs.norm()).max(1.0));
    }
    Ok(out)
}

/// Uv = h^{−2n} ∫∫ m(a,b,a′,b′) ⟨v, v_{ab}⟩ v_{a′b′} da db da′ db′.
pub fn ct_operator_apply(m: &MatrixElementFn, v: &HState) -> Result<HState> {
    let n = m.n;
    let h = v.h;
    if v.n() != n {
        return Err(Error::Dim { expected: n, got: v.n() });
    }
    crate::error::same_h(h, m.h)?;
    let fam = coherent_family(h, n);
    let xy: Vec<usize> = (0..2 * n).collect();
    // ⟨v, v_{ab}⟩ as a function of [a, b]
    let coef = v
        .v
        .embed(4 * n, &xy)?
        .mul(&fam.conj())?
        .integrate_out(&xy)?
        .scale(cr((4.0 / h).powi(n as i32)));
    // joint [a, b, a′, b′, x, y]
    let labels: Vec<usize> = (0..4 * n).collect();
    let mut fam_map: Vec<usize> = (4 * n..6 * n).collect();
    fam_map.extend(2 * n..4 * n);
    let joint = m
        .fun
        .embed(6 * n, &labels)?
        .mul(&coef.embed(6 * n, &(0..2 * n).collect::<Vec<_>>())?)?
        .mul(&fam.embed(6 * n, &fam_map)?)?;
    let out = joint.integrate_out(&labels)?.scale(cr(h.powi(-2 * n as i32)));
    Ok(HState { h, v: out })
}

/// Kernel of the shifted rotation on H_h², over [x, y, x′, y′]:
/// exp{πh e^{−it}(ix + y + C/h)(y′ − ix′) − (πh/2)(x² + y² + x′² + y′²)}.
pub fn rotshift_kernel(h: f64, t: f64, c: f64) -> Result<PGFun> {
    check_h(h)?;
    let e = C64::from_polar(PI * h, -t);
    let i = ci(1.0);
    let (x, y, x2, y2) = (0, 1, 2, 3);
    let mut ex = ExpBuilder::new(4)
        .quad(x, y2, i * e)
        .quad(x, x2, e)
        .quad(y, y2, e)
        .quad(y, x2, -i * e)
        .lin(y2, e * c / h)
        .lin(x2, -i * e * c / h);
    for v in [x, y, x2, y2] {
        ex = ex.quad(v, v, cr(-PI * h / 2.0));
    }
    Ok(ex.fun())
}

/// (Uv)(x, y) = κ ∫ K(x, y, x′, y′) v(x′, y′) dx′ dy′ with the kernel above and constant κ.
pub fn kernel_operator_apply(kernel: &PGFun, kappa: C64, v: &HState) -> Result<HState> {
    if v.n() != 1 || kernel.dim() != 4 {
        return Err(Error::Invalid("the kernel form is implemented for one degree of freedom".into()));
    }
    let joint = kernel.mul(&v.v.embed(4, &[2, 3])?)?;
    Ok(HState { h: v.h, v: joint.integrate_out(&[2, 3])?.scale(kappa) })
}

/// m for the same shifted rotation built as rotation ∘ phase-space translation:
/// exp((π/h)[(z − w)e^{−it} z̄′ + w̄z − |w|²/2] − (π/2h)(|z|² + |z′|²)),
/// z = a + ib, z′ = a′ + ib′, w = C[(cos t − sin t) + i(sin t + cos t)].
pub fn rotshift_m_translated(h: f64, t: f64, c: f64) -> Result<MatrixElementFn> {
    check_h(h)?;
    let k = PI / h;
    let (s, co) = t.sin_cos();
    let w = C64::new(c * (co - s), c * (s + co));
    let e = C64::from_polar(1.0, -t) * k;
    let (a, b, a2, b2) = (0, 1, 2, 3);
    let i = ci(1.0);
    let mut ex = ExpBuilder::new(4)
        .quad(a, a2, e)
        .quad(a, b2, -i * e)
        .quad(b, a2, i * e)
        .quad(b, b2, e)
        .lin(a2, -w * e)
        .lin(b2, i * w * e)
        .lin(a, w.conj() * k)
        .lin(b, i * w.conj() * k)
        .konst(cr(-k * w.norm_sqr() / 2.0));
    for v in [a, b, a2, b2] {
        ex = ex.quad(v, v, cr(-k / 2.0));
    }
    Ok(MatrixElementFn { h, n: 1, fun: ex.fun() })
}
