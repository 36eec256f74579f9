//! Observables as derivative-of-delta distributions, their convolutions with
//! states, brackets, and the harmonic and forced oscillators.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::gauss::{ExpBuilder, PGFun};
use crate::numerics::integrate;
use crate::poly::{MultiIndex, Poly};
use crate::spaces::{ci, coherent_v, cr, hh_inner, CoherentLabel, HState, KernelState};

/// Classical polynomial f(q,p) standing for its p-mechanisation
/// Σ c_{αβ} (1/2πi)^{|α|+|β|} ∂_x^α ∂_y^β δ(s)δ(x)δ(y).
/// Variables are ordered [q₁..qₙ, p₁..pₙ].
#[derive(Clone, Debug, PartialEq)]
pub struct PMechObservable {
    pub n: usize,
    pub poly: Poly,
}

impl PMechObservable {
    pub fn q(n: usize, j: usize) -> Self {
        PMechObservable { n, poly: Poly::var(2 * n, j) }
    }

    pub fn p(n: usize, j: usize) -> Self {
        PMechObservable { n, poly: Poly::var(2 * n, n + j) }
    }

    pub fn constant(n: usize, c: C64) -> Self {
        PMechObservable { n, poly: Poly::constant(2 * n, c) }
    }

    pub fn add(&self, o: &PMechObservable) -> Self {
        PMechObservable { n: self.n, poly: self.poly.add(&o.poly) }
    }

    pub fn sub(&self, o: &PMechObservable) -> Self {
        PMechObservable { n: self.n, poly: self.poly.sub(&o.poly) }
    }

    pub fn mul(&self, o: &PMechObservable) -> Self {
        PMechObservable { n: self.n, poly: self.poly.mul(&o.poly) }
    }

    pub fn scale(&self, c: C64) -> Self {
        PMechObservable { n: self.n, poly: self.poly.scale(c) }
    }

    /// Coefficient of ∂_x^α ∂_y^β δ in the distribution.
    pub fn delta_coeffs(&self) -> Vec<(MultiIndex, C64)> {
        let k = C64::new(0.0, -1.0 / (2.0 * PI)); // 1/(2πi)
        self.poly.terms().map(|(m, c)| (m.clone(), c * k.powu(m.degree()))).collect()
    }

    /// A⁺ = P(mωq − ip) in one dimension (per coordinate j in general).
    pub fn creation(n: usize, j: usize, pr: &OscParams) -> Self {
        PMechObservable::q(n, j).scale(cr(pr.m * pr.omega)).sub(&PMechObservable::p(n, j).scale(ci(1.0)))
    }

    /// A⁻ = P(mωq + ip).
    pub fn annihilation(n: usize, j: usize, pr: &OscParams) -> Self {
        PMechObservable::q(n, j).scale(cr(pr.m * pr.omega)).add(&PMechObservable::p(n, j).scale(ci(1.0)))
    }

    /// p²/2m + mω²q²/2 summed over coordinates.
    pub fn harmonic_hamiltonian(n: usize, pr: &OscParams) -> Self {
        let mut h = PMechObservable { n, poly: Poly::zero(2 * n) };
        for j in 0..n {
            let q = PMechObservable::q(n, j);
            let p = PMechObservable::p(n, j);
            h = h.add(&p.mul(&p).scale(cr(0.5 / pr.m))).add(&q.mul(&q).scale(cr(0.5 * pr.m * pr.omega * pr.omega)));
        }
        h
    }
}

impl fmt::Display for PMechObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)
    }
}

/// The p-mechanisation of a classical polynomial over [q, p].
pub fn p_mechanise(f: &Poly) -> Result<PMechObservable> {
    if f.dim() % 2 != 0 {
        return Err(Error::Invalid("classical polynomial needs 2n variables".into()));
    }
    Ok(PMechObservable { n: f.dim() / 2, poly: f.clone() })
}

/// {f, g} = Σ ∂f/∂q_i ∂g/∂p_i − ∂g/∂q_i ∂f/∂p_i
pub fn poisson_bracket(f: &Poly, g: &Poly) -> Poly {
    let n = f.dim() / 2;
    let mut out = Poly::zero(f.dim());
    for i in 0..n {
        out = out.add(&f.diff(i).mul(&g.diff(n + i))).sub(&g.diff(i).mul(&f.diff(n + i)));
    }
    out
}

/// Symbol of the universal bracket at Planck parameter h:
/// Σ_{k odd} (iħ/2)^{k−1}/k! Πᵏ(f, g), ħ = h/2π, Π = Σᵢ ∂_{qᵢ}⊗∂_{pᵢ} − ∂_{pᵢ}⊗∂_{qᵢ}.
/// At h = 0 this is the Poisson bracket; for degree ≤ 2 it is the Poisson bracket for every h.
pub fn universal_bracket_symbol(f: &Poly, g: &Poly, h: f64) -> Poly {
    let dim = f.dim();
    let n = dim / 2;
    let hbar = h / (2.0 * PI);
    let kmax = f.degree().min(g.degree());
    let mut out = Poly::zero(dim);
    // bidifferential operator Πᵏ as (derivatives on f, derivatives on g) → coefficient
    let mut pik: BTreeMap<(MultiIndex, MultiIndex), C64> = BTreeMap::new();
    pik.insert((MultiIndex::zero(dim), MultiIndex::zero(dim)), cr(1.0));
    let mut fact = 1.0;
    for k in 1..=kmax {
        let mut next: BTreeMap<(MultiIndex, MultiIndex), C64> = BTreeMap::new();
        for ((df, dg), c) in &pik {
            for i in 0..n {
                let (q, p) = (MultiIndex::unit(dim, i), MultiIndex::unit(dim, n + i));
                *next.entry((df.add(&q), dg.add(&p))).or_default() += *c;
                *next.entry((df.add(&p), dg.add(&q))).or_default() -= *c;
            }
        }
        pik = next;
        fact *= k as f64;
        if k % 2 == 0 {
            continue;
        }
        let w = ci(hbar / 2.0).powu(k - 1) / fact;
        if w.norm() == 0.0 {
            break;
        }
        for ((df, dg), c) in &pik {
            let fd = apply_derivs(f, df);
            let gd = apply_derivs(g, dg);
            out = out.add(&fd.mul(&gd).scale(*c * w));
        }
    }
    out.prune();
    out
}

fn apply_derivs(f: &Poly, d: &MultiIndex) -> Poly {
    let mut r = f.clone();
    for (k, &e) in d.0.iter().enumerate() {
        for _ in 0..e {
            r = r.diff(k);
        }
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// Convolution with a function whose first 2n variables are (x, y); any
/// further variables are carried along as parameters.
fn convolve_fun(b: &PMechObservable, v: &PGFun, h: f64, side: Side) -> Result<PGFun> {
    let n = b.n;
    let m = v.dim();
    let extra = m - 2 * n;
    // joint layout [x, y, params, x′, y′]
    let jd = m + 2 * n;
    let mut l = DMatrix::zeros(m, jd);
    for i in 0..2 * n {
        l[(i, i)] = cr(1.0);
        l[(i, m + i)] = cr(-1.0);
    }
    for k in 0..extra {
        l[(2 * n + k, 2 * n + k)] = cr(1.0);
    }
    let shifted = v.affine_sub(&l, &DVector::zeros(m))?;
    // left: e^{πih(x·y′ − x′·y)}, right: the conjugate orientation
    let sgn = if side == Side::Left { 1.0 } else { -1.0 };
    let mut e = ExpBuilder::new(jd);
    for i in 0..n {
        let (x, y, x2, y2) = (i, n + i, m + i, m + n + i);
        e = e.quad(x, y2, ci(sgn * PI * h)).quad(x2, y, ci(-sgn * PI * h));
    }
    let w = shifted.mul(&e.fun())?;
    let mut restrict = DMatrix::zeros(jd, m);
    for i in 0..m {
        restrict[(i, i)] = cr(1.0);
    }
    let minus = C64::new(0.0, 1.0 / (2.0 * PI)); // −1/(2πi)
    let mut out = PGFun::zero(m);
    for (mono, c) in b.poly.terms() {
        let mut d = w.clone();
        for (k, &e) in mono.0.iter().enumerate() {
            for _ in 0..e {
                d = d.diff(m + k)?;
            }
        }
        let at0 = d.affine_sub(&restrict, &DVector::zeros(jd))?;
        out = out.add(&at0.scale(c * minus.powu(mono.degree())))?;
    }
    Ok(out)
}

/// Left convolution B * v.
pub fn convolve_left(b: &PMechObservable, v: &HState) -> Result<HState> {
    check_n(b, v)?;
    Ok(HState { h: v.h, v: convolve_fun(b, &v.v, v.h, Side::Left)? })
}

/// Right convolution v * B.
pub fn convolve_right(b: &PMechObservable, v: &HState) -> Result<HState> {
    check_n(b, v)?;
    Ok(HState { h: v.h, v: convolve_fun(b, &v.v, v.h, Side::Right)? })
}

/// Left convolution of a labelled family: the first 2n variables are (x, y),
/// the rest are parameters.
pub fn convolve_left_family(b: &PMechObservable, v: &PGFun, h: f64) -> Result<PGFun> {
    convolve_fun(b, v, h, Side::Left)
}

fn check_n(b: &PMechObservable, v: &HState) -> Result<()> {
    if b.n != v.n() {
        return Err(Error::Dim { expected: v.n(), got: b.n });
    }
    Ok(())
}

/// 𝒜v = (2π/ih) v.
pub fn antiderivative_apply(v: &HState) -> Result<HState> {
    if v.h == 0.0 {
        return Err(Error::Invalid("the antiderivative needs h ≠ 0".into()));
    }
    Ok(v.scale(C64::new(0.0, -2.0 * PI / v.h)))
}

/// ∂_s on the fiber: multiplication by 2πih.
pub fn s_derivative(v: &HState) -> HState {
    v.scale(ci(2.0 * PI * v.h))
}

/// {B1, B2} * v = B1*(B2*𝒜v) − B2*(B1*𝒜v).
pub fn universal_bracket_apply(b1: &PMechObservable, b2: &PMechObservable, v: &HState) -> Result<HState> {
    let av = antiderivative_apply(v)?;
    let t1 = convolve_left(b1, &convolve_left(b2, &av)?)?;
    let t2 = convolve_left(b2, &convolve_left(b1, &av)?)?;
    t1.sub(&t2)
}

/// ∫ B l̄ = Σ c_{αβ} (−1/2πi)^{|α|+|β|} ∂^{αβ} conj(l) at the origin.
pub fn kernel_pairing(b: &PMechObservable, l: &KernelState) -> Result<C64> {
    let lc = l.l.conj();
    let m = lc.dim();
    let minus = C64::new(0.0, 1.0 / (2.0 * PI));
    let zero = vec![0.0; m];
    let mut s = C64::default();
    for (mono, c) in b.poly.terms() {
        let mut d = lc.clone();
        for (k, &e) in mono.0.iter().enumerate() {
            for _ in 0..e {
                d = d.diff(k)?;
            }
        }
        s += c * minus.powu(mono.degree()) * d.eval(&zero);
    }
    Ok(s)
}

/// max over test states of |⟨B*v, w⟩ − λ⟨v, w⟩| / (‖v‖‖w‖).
pub fn eigen_check(b: &PMechObservable, v: &HState, lambda: C64, tests: &[HState]) -> Result<f64> {
    let bv = convolve_left(b, v)?;
    let nv = hh_inner(v, v)?.re.sqrt();
    let mut worst: f64 = 0.0;
    for w in tests {
        let nw = hh_inner(w, w)?.re.sqrt();
        let r = hh_inner(&bv, w)? - lambda * hh_inner(v, w)?;
        worst = worst.max(r.norm() / (nv * nw));
    }
    Ok(worst)
}

/// Mass and frequency of an oscillator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OscParams {
    pub m: f64,
    pub omega: f64,
}

impl OscParams {
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        if !(m > 0.0 && omega > 0.0) {
            return Err(Error::Invalid(format!("mass and frequency must be positive (m = {m}, ω = {omega})")));
        }
        Ok(OscParams { m, omega })
    }

    pub fn unit() -> Self {
        OscParams { m: 1.0, omega: 1.0 }
    }
}

/// External force z(t).
#[derive(Clone)]
pub enum ForceSpec {
    Zero,
    /// Z₀ cos(Ωt)
    Periodic { z0: f64, big_omega: f64 },
    Tabulated(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for ForceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForceSpec::Zero => write!(f, "Zero"),
            ForceSpec::Periodic { z0, big_omega } => write!(f, "Periodic(Z0={z0}, Omega={big_omega})"),
            ForceSpec::Tabulated(_) => write!(f, "Tabulated"),
        }
    }
}

const QUAD_TOL: f64 = 1e-12;

impl ForceSpec {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            ForceSpec::Zero => 0.0,
            ForceSpec::Periodic { z0, big_omega } => z0 * (big_omega * t).cos(),
            ForceSpec::Tabulated(z) => z(t),
        }
    }

    /// (∫₀ᵗ z sin ωτ dτ, ∫₀ᵗ z cos ωτ dτ)
    pub fn sin_cos_integrals(&self, omega: f64, t: f64) -> (f64, f64) {
        match self {
            ForceSpec::Zero => (0.0, 0.0),
            ForceSpec::Periodic { z0, big_omega } => {
                let (p1, p2) = resonance_psi(omega, *big_omega, t);
                (z0 * p1, z0 * p2)
            }
            ForceSpec::Tabulated(z) => {
                let s = integrate(|u| cr(z(u) * (omega * u).sin()), 0.0, t, QUAD_TOL, QUAD_TOL).re;
                let c = integrate(|u| cr(z(u) * (omega * u).cos()), 0.0, t, QUAD_TOL, QUAD_TOL).re;
                (s, c)
            }
        }
    }
}

/// ψ₁ = ∫₀ᵗ cos Ωτ sin ωτ dτ, ψ₂ = ∫₀ᵗ cos Ωτ cos ωτ dτ.
pub fn resonance_psi(omega: f64, big_omega: f64, t: f64) -> (f64, f64) {
    let (w, o) = (omega, big_omega);
    if (o - w).abs() <= 1e-9 {
        let p1 = (1.0 - (2.0 * w * t).cos()) / (4.0 * w);
        let p2 = t / 2.0 + (2.0 * w * t).sin() / (4.0 * w);
        (p1, p2)
    } else {
        let d = o * o - w * w;
        let (co, so) = ((o * t).cos(), (o * t).sin());
        let (cw, sw) = ((w * t).cos(), (w * t).sin());
        let p1 = (w * co * cw + o * so * sw - w) / d;
        let p2 = (o * so * cw - w * co * sw) / d;
        (p1, p2)
    }
}

/// The non-resonant closed forms exactly as printed in the source text, kept
/// for the discrepancy report.
pub fn resonance_psi_printed(omega: f64, big_omega: f64, t: f64) -> (f64, f64) {
    let (w, o) = (omega, big_omega);
    let d = o * o - w * w;
    let (co, so) = ((o * t).cos(), (o * t).sin());
    let (cw, sw) = ((w * t).cos(), (w * t).sin());
    let p1 = 2.0 * (o * co * cw + w * so * sw - o) / d;
    let p2 = -2.0 * (o * so * cw - w * co * sw) / d;
    (p1, p2)
}

/// Harmonic rotation of the group arguments:
/// (x cos ωt + mωy sin ωt, −x sin ωt/(mω) + y cos ωt).
fn harmonic_args(x: f64, y: f64, t: f64, pr: &OscParams) -> (f64, f64) {
    let (c, s) = ((pr.omega * t).cos(), (pr.omega * t).sin());
    let mw = pr.m * pr.omega;
    (x * c + mw * y * s, -x * s / mw + y * c)
}

/// Observable evolved by the harmonic flow, f ↦ f(q cos ωt + p sin ωt/(mω), −qmω sin ωt + p cos ωt).
pub fn harmonic_evolve_obs(b0: &PMechObservable, t: f64, pr: &OscParams) -> PMechObservable {
    let n = b0.n;
    let (c, s) = ((pr.omega * t).cos(), (pr.omega * t).sin());
    let mw = pr.m * pr.omega;
    let mut subs = Vec::with_capacity(2 * n);
    for j in 0..n {
        let mut lin = vec![cr(0.0); 2 * n];
        lin[j] = cr(c);
        lin[n + j] = cr(s / mw);
        subs.push(Poly::linear(cr(0.0), &lin));
    }
    for j in 0..n {
        let mut lin = vec![cr(0.0); 2 * n];
        lin[j] = cr(-mw * s);
        lin[n + j] = cr(c);
        subs.push(Poly::linear(cr(0.0), &lin));
    }
    PMechObservable { n, poly: b0.poly.compose(&subs) }
}

/// The forced-oscillator solution e^{F} B₀(X, Y) at (x, y), with (X, Y) the
/// harmonic arguments and F = −2πi(I_s X/(mω) + I_c Y).
/// `b0` is a function over [x, y] (one degree of freedom); the s-dependence is
/// a fixed factor carried by B₀ and does not enter.
pub fn forced_solution_eval(b0: &PGFun, t: f64, pr: &OscParams, force: &ForceSpec, point: (f64, f64)) -> C64 {
    let (is, ic) = force.sin_cos_integrals(pr.omega, t);
    forced_solution_eval_with(b0, t, pr, is, ic, point)
}

/// Same, with the force integrals supplied.
pub fn forced_solution_eval_with(b0: &PGFun, t: f64, pr: &OscParams, is: f64, ic: f64, point: (f64, f64)) -> C64 {
    let (xx, yy) = harmonic_args(point.0, point.1, t, pr);
    let f = ci(-2.0 * PI * (is * xx / (pr.m * pr.omega) + ic * yy));
    f.exp() * b0.eval(&[xx, yy])
}

/// Five-point central difference at 0.
fn d5(f: &dyn Fn(f64) -> C64, e: f64) -> C64 {
    (f(-2.0 * e) - f(2.0 * e) + (f(e) - f(-e)) * 8.0) / (12.0 * e)
}

/// Residual of ∂B/∂t = ω²my ∂B/∂x − (x/m) ∂B/∂y − 2πi y z(t) B by fourth-order
/// central differences, relative to max|B| on the grid.
pub fn forced_pde_residual(b0: &PGFun, pr: &OscParams, force: &ForceSpec, ts: &[f64], xs: &[f64], ys: &[f64], step: f64) -> f64 {
    let sol = |t: f64, x: f64, y: f64| forced_solution_eval(b0, t, pr, force, (x, y));
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1e-300;
    for &t in ts {
        for &x in xs {
            for &y in ys {
                let b = sol(t, x, y);
                scale = scale.max(b.norm());
                let bt = d5(&|u| sol(t + u, x, y), step);
                let bx = d5(&|u| sol(t, x + u, y), step);
                let by = d5(&|u| sol(t, x, y + u), step);
                let rhs = pr.omega * pr.omega * pr.m * y * bx - x / pr.m * by - ci(2.0 * PI * y * force.eval(t)) * b;
                worst = worst.max((bt - rhs).norm());
            }
        }
    }
    worst / scale
}

/// Printed classical flow:
/// Q = q cos ωt + p sin ωt/(mω) + I_s/(mω), P = −qmω sin ωt + p cos ωt + I_c.
/// It is the evolution of the coordinate observables under df/dt = {f, H(t)}.
pub fn classical_forced_flow(q: f64, p: f64, t: f64, pr: &OscParams, force: &ForceSpec) -> (f64, f64) {
    let (is, ic) = force.sin_cos_integrals(pr.omega, t);
    let (c, s) = ((pr.omega * t).cos(), (pr.omega * t).sin());
    let mw = pr.m * pr.omega;
    (q * c + p * s / mw + is / mw, -q * mw * s + p * c + ic)
}

/// Phase-space trajectory of Hamilton's equations for H = p²/2m + mω²q²/2 − z(t)q
/// (Duhamel form).
pub fn forced_trajectory(q: f64, p: f64, t: f64, pr: &OscParams, force: &ForceSpec) -> (f64, f64) {
    let (is, ic) = force.sin_cos_integrals(pr.omega, t);
    let (c, s) = ((pr.omega * t).cos(), (pr.omega * t).sin());
    let mw = pr.m * pr.omega;
    // ∫₀ᵗ z(τ) sin ω(t−τ) dτ = s·I_c − c·I_s, and the cosine analogue
    let q_t = q * c + p * s / mw + (s * ic - c * is) / mw;
    let p_t = -q * mw * s + p * c + (c * ic + s * is);
    (q_t, p_t)
}

/// One point of a coherent-state trajectory in the interaction picture.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentTrajectory {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub phase: C64,
}

/// f₁ = −πi ∫₀ᵗ ∫₀^τ z(τ) z(τ′) sin(τ − τ′) dτ′ dτ.
pub fn interaction_f1(force: &ForceSpec, t: f64) -> C64 {
    let inner = |tau: f64| {
        let (s, c) = force.sin_cos_integrals(1.0, tau);
        // ∫₀^τ z(τ′) sin(τ−τ′) dτ′ = sin τ·C(τ) − cos τ·S(τ)
        tau.sin() * c - tau.cos() * s
    };
    let v = integrate(|tau| cr(force.eval(tau) * inner(tau)), 0.0, t, QUAD_TOL, QUAD_TOL).re;
    ci(-PI * v)
}

/// Coherent label and phase at time t for m = ω = 1:
/// a′ = a + ∫z sin, b′ = b − ∫z cos, phase e^{f₁+f₂} with f₂ = −(πi/h)(a∫z cos + b∫z sin).
pub fn interaction_forced_trajectory(start: &CoherentLabel, force: &ForceSpec, t: f64) -> Result<CoherentTrajectory> {
    if start.n() != 1 {
        return Err(Error::Invalid("the interaction-picture trajectory is one-dimensional".into()));
    }
    let (is, ic) = force.sin_cos_integrals(1.0, t);
    let (a, b, h) = (start.a[0], start.b[0], start.h);
    let f1 = interaction_f1(force, t);
    let f2 = ci(-PI / h * (a * ic + b * is));
    Ok(CoherentTrajectory { t, a: a + is, b: b - ic, phase: (f1 + f2).exp() })
}

/// f₂ as printed in the source text, (πi/h)(a∫z cos − b∫z sin).
pub fn interaction_f2_printed(start: &CoherentLabel, force: &ForceSpec, t: f64) -> C64 {
    let (is, ic) = force.sin_cos_integrals(1.0, t);
    ci(PI / start.h * (start.a[0] * ic - start.b[0] * is))
}

/// The interaction-picture solution evaluated directly:
/// e^{f₁} e^{πi(x I_s − y I_c)} V₀(x − I_c/h, y − I_s/h).
pub fn interaction_direct_eval(v0: &HState, force: &ForceSpec, t: f64, point: (f64, f64)) -> C64 {
    let (is, ic) = force.sin_cos_integrals(1.0, t);
    let h = v0.h;
    let (x, y) = point;
    let f1 = interaction_f1(force, t);
    (f1 + ci(PI * (x * is - y * ic))).exp() * v0.v.eval(&[x - ic / h, y - is / h])
}

/// The evolved state as a coherent state times its phase.
pub fn interaction_state(start: &CoherentLabel, force: &ForceSpec, t: f64) -> Result<HState> {
    let tr = interaction_forced_trajectory(start, force, t)?;
    let lbl = CoherentLabel::new(start.h, vec![tr.a], vec![tr.b])?;
    Ok(coherent_v(&lbl).scale(tr.phase))
}

/// Ground state of the oscillator, (h/2)ⁿ exp(−(πh/2)(x²/(mω) + mωy²)).
pub fn harmonic_ground(h: f64, n: usize, pr: &OscParams) -> HState {
    let mw = pr.m * pr.omega;
    let mut e = ExpBuilder::new(2 * n).konst(cr(n as f64 * (h / 2.0).ln()));
    for i in 0..n {
        e = e.quad(i, i, cr(-PI * h / (2.0 * mw))).quad(n + i, n + i, cr(-PI * h * mw / 2.0));
    }
    HState { h, v: e.fun() }
}

/// v_k = (1/k!)^{1/2} (𝒜A⁺)^k v₀ in one dimension.
pub fn harmonic_eigenfunction(k: u32, h: f64, pr: &OscParams) -> Result<HState> {
    if k > crate::gauss::MAX_DEGREE {
        return Err(Error::Invalid(format!("level {k} exceeds the degree cap")));
    }
    let ap = PMechObservable::creation(1, 0, pr);
    let mut v = harmonic_ground(h, 1, pr);
    let mut fact = 1.0;
    for j in 1..=k {
        v = convolve_left(&ap, &antiderivative_apply(&v)?)?;
        fact *= j as f64;
    }
    Ok(v.scale(cr(1.0 / fact.sqrt())))
}

/// The printed closed form of v_k:
/// (1/k!)^{1/2} (h/2)^k (ωmy + ix)^k exp(−(πh/2)(x²/(ωm) + y²ωm)).
pub fn harmonic_eigenfunction_closed(k: u32, h: f64, pr: &OscParams) -> HState {
    let mw = pr.m * pr.omega;
    let lin = Poly::linear(cr(0.0), &[ci(1.0), cr(mw)]);
    let fact: f64 = (1..=k).map(|j| j as f64).product();
    let poly = lin.pow(k).scale(cr((h / 2.0).powi(k as i32) / fact.sqrt()));
    let e = ExpBuilder::new(2).quad(0, 0, cr(-PI * h / (2.0 * mw))).quad(1, 1, cr(-PI * h * mw / 2.0));
    HState { h, v: e.fun_with(poly) }
}

/// Best c with A v ≈ c w in the H_h² inner product, and the relative residual.
pub fn proportionality(v: &HState, w: &HState) -> Result<(C64, f64)> {
    let ww = hh_inner(w, w)?;
    let c = hh_inner(v, w)? / ww;
    let r = v.sub(&w.scale(c))?;
    let rel = (hh_inner(&r, &r)?.re.max(0.0) / hh_inner(v, v)?.re).sqrt();
    Ok((c, rel))
}
