//! Linear symplectic maps, their metaplectic representatives, and the induced
//! action on observables and kernels.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::dynamics::PMechObservable;
use crate::error::{Error, Result};
use crate::gauss::{ExpBuilder, PGFun};
use crate::heisenberg::{rho_h_apply, schrodinger_apply, GroupElement};
use crate::poly::Poly;
use crate::spaces::{ci, cr, t_apply, t_inverse_apply, FockState, KernelState, SchrodingerState};

const SYMPLECTIC_TOL: f64 = 1e-9;

/// J = [[0, I], [−I, 0]] on Rⁿ × Rⁿ.
pub fn standard_j(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// ‖MᵀJM − J‖_max
pub fn symplectic_defect(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows() / 2;
    let j = standard_j(n);
    (m.transpose() * &j * m - j).amax()
}

/// A 2n × 2n real matrix with MᵀJM = J.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticMatrix(DMatrix<f64>);

impl SymplecticMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() % 2 != 0 || m.nrows() == 0 {
            return Err(Error::Invalid(format!("symplectic matrix must be 2n × 2n, got {}×{}", m.nrows(), m.ncols())));
        }
        let d = symplectic_defect(&m);
        if d > SYMPLECTIC_TOL * m.amax().max(1.0).powi(2) {
            return Err(Error::Invalid(format!("matrix is not symplectic (defect {d:.3e})")));
        }
        Ok(SymplecticMatrix(m))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn j(n: usize) -> Self {
        SymplecticMatrix(standard_j(n))
    }

    /// SL(2, R) element [[a, b], [c, d]] with d = (1 + bc)/a.
    pub fn sl2(a: f64, b: f64, c: f64) -> Result<Self> {
        if a == 0.0 {
            return Err(Error::Invalid("a must be non-zero".into()));
        }
        Self::new(DMatrix::from_row_slice(2, 2, &[a, b, c, (1.0 + b * c) / a]))
    }

    /// Blocks (A, B, C, D).
    pub fn blocks(&self) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        let n = self.n();
        let m = &self.0;
        (
            m.view((0, 0), (n, n)).into_owned(),
            m.view((0, n), (n, n)).into_owned(),
            m.view((n, 0), (n, n)).into_owned(),
            m.view((n, n), (n, n)).into_owned(),
        )
    }

    /// M⁻¹ = −J Mᵀ J.
    pub fn inverse(&self) -> Self {
        let j = standard_j(self.n());
        SymplecticMatrix(-(&j * self.0.transpose() * &j))
    }

    pub fn compose(&self, other: &SymplecticMatrix) -> Self {
        SymplecticMatrix(&self.0 * &other.0)
    }

    /// M(x, y).
    pub fn apply(&self, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n();
        let v = DVector::from_iterator(2 * n, x.iter().chain(y).copied());
        let w = &self.0 * v;
        (w.rows(0, n).iter().copied().collect(), w.rows(n, n).iter().copied().collect())
    }

    /// Factors whose ordered product is M, using
    /// M = L(CA⁻¹) · diag(A, A⁻ᵀ) · U(A⁻¹B), falling back to J · (J⁻¹M) when A is singular.
    pub fn decompose(&self) -> Result<Vec<MetaplecticFactor>> {
        let (a, _, _, _) = self.blocks();
        if a.determinant().abs() > 1e-10 {
            return self.decompose_regular();
        }
        let rest = SymplecticMatrix::j(self.n()).inverse().compose(self);
        let (a2, _, _, _) = rest.blocks();
        if a2.determinant().abs() <= 1e-10 {
            return Err(Error::Invalid("both A and C blocks are singular".into()));
        }
        let mut out = vec![MetaplecticFactor::J];
        out.extend(rest.decompose_regular()?);
        Ok(out)
    }

    fn decompose_regular(&self) -> Result<Vec<MetaplecticFactor>> {
        let (a, b, c, _) = self.blocks();
        let ainv = a.clone().try_inverse().ok_or_else(|| Error::Invalid("A block is singular".into()))?;
        Ok(vec![
            MetaplecticFactor::LowerShear(&c * &ainv),
            MetaplecticFactor::Diag(a),
            MetaplecticFactor::UpperShear(&ainv * &b),
        ])
    }
}

/// Generators of Sp(2n).
#[derive(Clone, Debug, PartialEq)]
pub enum MetaplecticFactor {
    /// diag(A, A⁻ᵀ)
    Diag(DMatrix<f64>),
    /// [[I, Y], [0, I]], Y symmetric
    UpperShear(DMatrix<f64>),
    /// [[I, 0], [X, I]], X symmetric
    LowerShear(DMatrix<f64>),
    J,
    JInv,
}

impl MetaplecticFactor {
    pub fn n(&self) -> Option<usize> {
        match self {
            MetaplecticFactor::Diag(m) | MetaplecticFactor::UpperShear(m) | MetaplecticFactor::LowerShear(m) => {
                Some(m.nrows())
            }
            _ => None,
        }
    }

    pub fn matrix(&self, n: usize) -> DMatrix<f64> {
        let mut out = DMatrix::identity(2 * n, 2 * n);
        match self {
            MetaplecticFactor::Diag(a) => {
                let ait = a.clone().try_inverse().unwrap_or_else(|| DMatrix::from_element(n, n, f64::NAN)).transpose();
                out.view_mut((0, 0), (n, n)).copy_from(a);
                out.view_mut((n, n), (n, n)).copy_from(&ait);
            }
            MetaplecticFactor::UpperShear(y) => out.view_mut((0, n), (n, n)).copy_from(y),
            MetaplecticFactor::LowerShear(x) => out.view_mut((n, 0), (n, n)).copy_from(x),
            MetaplecticFactor::J => out = standard_j(n),
            MetaplecticFactor::JInv => out = -standard_j(n),
        }
        out
    }
}

pub fn factors_product(factors: &[MetaplecticFactor], n: usize) -> DMatrix<f64> {
    factors.iter().fold(DMatrix::identity(2 * n, 2 * n), |acc, f| acc * f.matrix(n))
}

/// Which normalisation of the metaplectic generators to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetaplecticConvention {
    /// Generators intertwining the h-scaled Schrödinger representation.
    Intertwining,
    /// The h = 1 textbook forms: |A|^{−1/2}ψ(A⁻¹ξ), e^{−πiξYξ}ψ, i^{n/2}∫ψ(u)e^{2πiu·ξ}du.
    Printed,
}

fn chirp(psi: &PGFun, y: &DMatrix<f64>, k: f64) -> Result<PGFun> {
    // multiply by e^{k·πi ξᵀYξ}
    let n = psi.dim();
    let mut e = ExpBuilder::new(n);
    for i in 0..n {
        for j in 0..n {
            e = e.quad(i, j, ci(k * PI * y[(i, j)]));
        }
    }
    Ok(psi.mul(&e.fun())?)
}

/// h^{−n/2} ∫ ψ(u) e^{σ2πiu·η/h} du, with an extra constant factor.
fn fourier(psi: &PGFun, h: f64, sigma: f64, factor: C64) -> Result<PGFun> {
    let n = psi.dim();
    let map: Vec<usize> = (n..2 * n).collect();
    let mut e = ExpBuilder::new(2 * n);
    for i in 0..n {
        e = e.quad(i, n + i, ci(sigma * 2.0 * PI / h));
    }
    let joint = psi.embed(2 * n, &map)?.mul(&e.fun())?;
    Ok(joint.integrate_out(&map)?.scale(factor * h.powf(-(n as f64) / 2.0)))
}

fn apply_factor(f: &MetaplecticFactor, st: &SchrodingerState, conv: MetaplecticConvention) -> Result<SchrodingerState> {
    let n = st.n();
    let h = st.h;
    if let Some(k) = f.n() {
        if k != n {
            return Err(Error::Dim { expected: n, got: k });
        }
    }
    let psi = &st.psi;
    let out = match (conv, f) {
        (MetaplecticConvention::Intertwining, MetaplecticFactor::Diag(a)) => {
            // principal √det A: a negative determinant contributes i, which keeps
            // the generated operators inside the metaplectic group (cocycle ±1)
            let root = cr(a.determinant()).sqrt();
            psi.affine_sub_real(&a.transpose(), &DVector::zeros(n))?.scale(root)
        }
        (MetaplecticConvention::Intertwining, MetaplecticFactor::UpperShear(y)) => chirp(psi, y, -1.0 / h)?,
        // e^{∓πin/4}: the phase that makes μ(J)² the metaplectic lift of −I
        (MetaplecticConvention::Intertwining, MetaplecticFactor::J) => fourier(psi, h, -1.0, ci(-PI * n as f64 / 4.0).exp())?,
        (MetaplecticConvention::Intertwining, MetaplecticFactor::JInv) => fourier(psi, h, 1.0, ci(PI * n as f64 / 4.0).exp())?,
        (MetaplecticConvention::Printed, MetaplecticFactor::Diag(a)) => {
            let ainv = a.clone().try_inverse().ok_or_else(|| Error::Invalid("singular diagonal block".into()))?;
            psi.affine_sub_real(&ainv, &DVector::zeros(n))?.scale(cr(a.determinant().abs().powf(-0.5)))
        }
        (MetaplecticConvention::Printed, MetaplecticFactor::UpperShear(y)) => chirp(psi, y, -1.0)?,
        (MetaplecticConvention::Printed, MetaplecticFactor::J) => {
            fourier(psi, 1.0, 1.0, ci(PI / 2.0 * n as f64 / 2.0).exp())?
        }
        (MetaplecticConvention::Printed, MetaplecticFactor::JInv) => {
            fourier(psi, 1.0, -1.0, ci(-PI / 2.0 * n as f64 / 2.0).exp())?
        }
        (_, MetaplecticFactor::LowerShear(x)) => {
            // L(X) = J⁻¹ U(−X) J
            let s1 = apply_factor(&MetaplecticFactor::J, st, conv)?;
            let s2 = apply_factor(&MetaplecticFactor::UpperShear(-x), &s1, conv)?;
            return apply_factor(&MetaplecticFactor::JInv, &s2, conv);
        }
    };
    Ok(SchrodingerState { h, psi: out })
}

/// μ(F₁⋯F_k)ψ = μ(F₁)(⋯(μ(F_k)ψ)).
pub fn metaplectic_factors_apply(
    factors: &[MetaplecticFactor],
    st: &SchrodingerState,
    conv: MetaplecticConvention,
) -> Result<SchrodingerState> {
    let mut cur = st.clone();
    for f in factors.iter().rev() {
        cur = apply_factor(f, &cur, conv)?;
    }
    Ok(cur)
}

/// μ(M) on L²(Rⁿ), defined up to an overall sign.
pub fn metaplectic_apply(m: &SymplecticMatrix, st: &SchrodingerState, conv: MetaplecticConvention) -> Result<SchrodingerState> {
    if m.n() != st.n() {
        return Err(Error::Dim { expected: st.n(), got: m.n() });
    }
    metaplectic_factors_apply(&m.decompose()?, st, conv)
}

/// ν(M) = T μ(M) T⁻¹ on F².
pub fn metaplectic_fock_apply(m: &SymplecticMatrix, f: &FockState) -> Result<FockState> {
    let st = t_inverse_apply(f)?;
    t_apply(&metaplectic_apply(m, &st, MetaplecticConvention::Intertwining)?)
}

fn l2_gap(lhs: &PGFun, rhs: &PGFun) -> Result<f64> {
    let w = cr(1.0);
    let scale = rhs.inner(rhs, w)?.re.sqrt().max(1e-300);
    let minus = lhs.sub(rhs)?;
    let plus = lhs.add(rhs)?;
    let d = minus.inner(&minus, w)?.re.min(plus.inner(&plus, w)?.re).max(0.0).sqrt();
    Ok(d / scale)
}

/// ‖ρ(s, M(x,y)) μψ − μ ρ(s,x,y) ψ‖ / ‖μ ρ ψ‖, minimised over the sign ambiguity.
pub fn schrodinger_covariance_defect(
    m: &SymplecticMatrix,
    g: &GroupElement,
    st: &SchrodingerState,
    conv: MetaplecticConvention,
) -> Result<f64> {
    let (x2, y2) = m.apply(&g.x, &g.y);
    let g2 = GroupElement::new(g.s, x2, y2)?;
    let lhs = schrodinger_apply(&g2, &metaplectic_apply(m, st, conv)?)?;
    let rhs = metaplectic_apply(m, &schrodinger_apply(g, st)?, conv)?;
    l2_gap(&lhs.psi, &rhs.psi)
}

/// Same defect for ν(M) and ρ_h on F².
pub fn fock_covariance_defect(m: &SymplecticMatrix, g: &GroupElement, f: &FockState) -> Result<f64> {
    let (x2, y2) = m.apply(&g.x, &g.y);
    let g2 = GroupElement::new(g.s, x2, y2)?;
    let lhs = rho_h_apply(&g2, &metaplectic_fock_apply(m, f)?)?;
    let rhs = metaplectic_fock_apply(m, &rho_h_apply(g, f)?)?;
    l2_gap(&lhs.f, &rhs.f)
}

/// Symbol f ↦ f ∘ M, i.e. f(M(q, p)).
pub fn observable_transform_linear(b: &PMechObservable, m: &SymplecticMatrix) -> Result<PMechObservable> {
    let n = b.n;
    if m.n() != n {
        return Err(Error::Dim { expected: n, got: m.n() });
    }
    let subs: Vec<Poly> = (0..2 * n)
        .map(|i| {
            let row: Vec<C64> = (0..2 * n).map(|j| cr(m.matrix()[(i, j)])).collect();
            Poly::linear(cr(0.0), &row)
        })
        .collect();
    Ok(PMechObservable { n, poly: b.poly.compose(&subs) })
}

/// l ↦ l(Mᵀ(x, y)); pairs with the transformed observable:
/// ⟨f ∘ M, l⟩ = ⟨f, l(Mᵀ ·)⟩.
pub fn kernel_transform_linear(l: &KernelState, m: &SymplecticMatrix) -> Result<KernelState> {
    let dim = l.l.dim();
    if dim != m.matrix().nrows() {
        return Err(Error::Dim { expected: dim, got: m.matrix().nrows() });
    }
    Ok(KernelState { h: l.h, l: l.l.affine_sub_real(&m.matrix().transpose(), &DVector::zeros(dim))? })
}
