//! Finite sums of polynomial × complex Gaussian terms over R^m, with exact
//! integration by completing the square one variable at a time.
//!
//! A term is `coeff · x^α · exp(−xᵀAx + 2b·x + c)` with complex symmetric `A`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::poly::{MultiIndex, Poly};

pub const EXP_MATCH_TOL: f64 = 1e-12;
pub const MAX_DEGREE: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("term {term} is not integrable in variable {var} (Re a = {re_a})")]
    NotIntegrable { term: usize, var: usize, re_a: f64 },
    #[error("monomial degree {0} exceeds the cap")]
    DegreeCap(u32),
    #[error("variable index {0} out of range")]
    BadVar(usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, GaussError>;

fn cr(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// exp(−xᵀAx + 2b·x + c)
#[derive(Clone, Debug, PartialEq)]
pub struct QuadExp {
    pub a: DMatrix<C64>,
    pub b: DVector<C64>,
    pub c: C64,
}

impl QuadExp {
    pub fn new(a: DMatrix<C64>, b: DVector<C64>, c: C64) -> Self {
        let a = (&a + a.transpose()).map(|z| z * 0.5);
        QuadExp { a, b, c }
    }

    pub fn zero(dim: usize) -> Self {
        QuadExp { a: DMatrix::zeros(dim, dim), b: DVector::zeros(dim), c: C64::default() }
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// Exponent value −xᵀAx + 2b·x + c.
    pub fn exponent(&self, x: &[C64]) -> C64 {
        let n = self.dim();
        let mut s = self.c;
        for i in 0..n {
            s += 2.0 * self.b[i] * x[i];
            for j in 0..n {
                s -= x[i] * self.a[(i, j)] * x[j];
            }
        }
        s
    }

    /// Re(A) positive definite.
    pub fn is_integrable(&self) -> bool {
        if self.dim() == 0 {
            return true;
        }
        let re = self.a.map(|z| z.re);
        nalgebra::Cholesky::new(re).is_some()
    }

    fn same_shape(&self, other: &QuadExp) -> bool {
        let da = (&self.a - &other.a).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let db = (&self.b - &other.b).iter().map(|z| z.norm()).fold(0.0, f64::max);
        da <= EXP_MATCH_TOL && db <= EXP_MATCH_TOL
    }

    fn add(&self, other: &QuadExp) -> QuadExp {
        QuadExp { a: &self.a + &other.a, b: &self.b + &other.b, c: self.c + other.c }
    }

    fn conj(&self) -> QuadExp {
        QuadExp { a: self.a.map(|z| z.conj()), b: self.b.map(|z| z.conj()), c: self.c.conj() }
    }

    /// ∂/∂x_k of the exponent, as a linear polynomial.
    fn grad(&self, k: usize) -> Poly {
        let n = self.dim();
        let lin: Vec<C64> = (0..n).map(|j| -2.0 * self.a[(k, j)]).collect();
        Poly::linear(2.0 * self.b[k], &lin)
    }
}

/// Builds an exponent term by term in plain form Σ c_ij z_i z_j + Σ d_i z_i + e.
#[derive(Clone, Debug)]
pub struct ExpBuilder {
    a: DMatrix<C64>,
    b: DVector<C64>,
    c: C64,
}

impl ExpBuilder {
    pub fn new(dim: usize) -> Self {
        ExpBuilder { a: DMatrix::zeros(dim, dim), b: DVector::zeros(dim), c: C64::default() }
    }

    /// Adds coef·z_i·z_j to the exponent.
    pub fn quad(mut self, i: usize, j: usize, coef: C64) -> Self {
        if i == j {
            self.a[(i, i)] -= coef;
        } else {
            self.a[(i, j)] -= coef * 0.5;
            self.a[(j, i)] -= coef * 0.5;
        }
        self
    }

    /// Adds coef·z_i to the exponent.
    pub fn lin(mut self, i: usize, coef: C64) -> Self {
        self.b[i] += coef * 0.5;
        self
    }

    pub fn konst(mut self, coef: C64) -> Self {
        self.c += coef;
        self
    }

    pub fn exp(self) -> QuadExp {
        QuadExp::new(self.a, self.b, self.c)
    }

    pub fn fun(self) -> PGFun {
        let dim = self.b.len();
        PGFun::from_parts(Poly::one(dim), self.exp())
    }

    pub fn fun_with(self, poly: Poly) -> PGFun {
        PGFun::from_parts(poly, self.exp())
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Block {
    exp: QuadExp,
    poly: Poly,
}

/// One term of the expanded view.
#[derive(Clone, Debug, PartialEq)]
pub struct PGTerm {
    pub coeff: C64,
    pub mono: MultiIndex,
    pub exp: QuadExp,
}

/// Sum of polynomial × Gaussian terms over `dim` real variables.
#[derive(Clone, Debug, PartialEq)]
pub struct PGFun {
    dim: usize,
    blocks: Vec<Block>,
}

impl PGFun {
    pub fn zero(dim: usize) -> Self {
        PGFun { dim, blocks: Vec::new() }
    }

    pub fn constant(dim: usize, c: C64) -> Self {
        PGFun::from_parts(Poly::constant(dim, c), QuadExp::zero(dim))
    }

    /// exp(−xᵀAx + 2b·x + c)
    pub fn gaussian(a: DMatrix<C64>, b: DVector<C64>, c: C64) -> Self {
        let dim = b.len();
        PGFun::from_parts(Poly::one(dim), QuadExp::new(a, b, c))
    }

    pub fn from_parts(poly: Poly, exp: QuadExp) -> Self {
        assert_eq!(poly.dim(), exp.dim());
        let dim = exp.dim();
        let mut f = PGFun { dim, blocks: vec![Block { exp, poly }] };
        f.canonicalize();
        f
    }

    pub fn from_terms(dim: usize, terms: Vec<PGTerm>) -> Result<Self> {
        let mut blocks = Vec::new();
        for t in terms {
            if t.mono.dim() != dim || t.exp.dim() != dim {
                return Err(GaussError::DimMismatch { expected: dim, got: t.mono.dim() });
            }
            blocks.push(Block { exp: t.exp, poly: Poly::monomial(t.mono, t.coeff) });
        }
        let mut f = PGFun { dim, blocks };
        f.canonicalize();
        Ok(f)
    }

    /// Polynomial times a single Gaussian factor, both over `dim` variables.
    pub fn poly_gauss(poly: Poly, a: DMatrix<C64>, b: DVector<C64>, c: C64) -> Self {
        PGFun::from_parts(poly, QuadExp::new(a, b, c))
    }

    pub fn poly(p: Poly) -> Self {
        let dim = p.dim();
        PGFun::from_parts(p, QuadExp::zero(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn terms(&self) -> Vec<PGTerm> {
        let mut out = Vec::new();
        for b in &self.blocks {
            for (m, c) in b.poly.terms() {
                out.push(PGTerm { coeff: *c, mono: m.clone(), exp: b.exp.clone() });
            }
        }
        out
    }

    pub fn term_count(&self) -> usize {
        self.blocks.iter().map(|b| b.poly.len()).sum()
    }

    pub fn degree(&self) -> u32 {
        self.blocks.iter().map(|b| b.poly.degree()).max().unwrap_or(0)
    }

    /// Every term has Re(A) positive definite.
    pub fn is_integrable(&self) -> bool {
        self.blocks.iter().all(|b| b.exp.is_integrable())
    }

    fn canonicalize(&mut self) {
        let mut merged: Vec<Block> = Vec::new();
        for blk in self.blocks.drain(..) {
            if blk.poly.is_zero() {
                continue;
            }
            let mut placed = false;
            for m in merged.iter_mut() {
                if m.exp.same_shape(&blk.exp) {
                    let dc = blk.exp.c - m.exp.c;
                    // folding the constant is only safe when it does not blow up
                    if dc.re.abs() < 30.0 {
                        let w = if dc.norm() == 0.0 { cr(1.0) } else { dc.exp() };
                        m.poly = m.poly.add(&blk.poly.scale(w));
                        placed = true;
                        break;
                    }
                }
            }
            if !placed {
                merged.push(blk);
            }
        }
        for m in merged.iter_mut() {
            m.poly.prune();
        }
        merged.retain(|b| !b.poly.is_zero());
        self.blocks = merged;
    }

    fn check_dim(&self, other: &PGFun) -> Result<()> {
        if self.dim != other.dim {
            return Err(GaussError::DimMismatch { expected: self.dim, got: other.dim });
        }
        Ok(())
    }

    pub fn add(&self, other: &PGFun) -> Result<PGFun> {
        self.check_dim(other)?;
        let mut blocks = self.blocks.clone();
        blocks.extend(other.blocks.iter().cloned());
        let mut f = PGFun { dim: self.dim, blocks };
        f.canonicalize();
        Ok(f)
    }

    pub fn sub(&self, other: &PGFun) -> Result<PGFun> {
        self.add(&other.scale(cr(-1.0)))
    }

    pub fn scale(&self, s: C64) -> PGFun {
        let mut f = PGFun {
            dim: self.dim,
            blocks: self.blocks.iter().map(|b| Block { exp: b.exp.clone(), poly: b.poly.scale(s) }).collect(),
        };
        f.canonicalize();
        f
    }

    pub fn mul(&self, other: &PGFun) -> Result<PGFun> {
        self.check_dim(other)?;
        let mut blocks = Vec::new();
        for b1 in &self.blocks {
            for b2 in &other.blocks {
                let poly = b1.poly.mul(&b2.poly);
                if poly.degree() > MAX_DEGREE {
                    return Err(GaussError::DegreeCap(poly.degree()));
                }
                blocks.push(Block { exp: b1.exp.add(&b2.exp), poly });
            }
        }
        let mut f = PGFun { dim: self.dim, blocks };
        f.canonicalize();
        Ok(f)
    }

    /// Multiplies by a polynomial.
    pub fn mul_poly(&self, p: &Poly) -> Result<PGFun> {
        self.mul(&PGFun::poly(p.clone()))
    }

    /// Multiplies by exp(−xᵀAx + 2b·x + c).
    pub fn mul_exp(&self, a: DMatrix<C64>, b: DVector<C64>, c: C64) -> Result<PGFun> {
        self.mul(&PGFun::gaussian(a, b, c))
    }

    pub fn conj(&self) -> PGFun {
        PGFun {
            dim: self.dim,
            blocks: self.blocks.iter().map(|b| Block { exp: b.exp.conj(), poly: b.poly.conj() }).collect(),
        }
    }

    pub fn diff(&self, var: usize) -> Result<PGFun> {
        if var >= self.dim {
            return Err(GaussError::BadVar(var));
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| Block { exp: b.exp.clone(), poly: b.poly.diff(var).add(&b.poly.mul(&b.exp.grad(var))) })
            .collect();
        let mut f = PGFun { dim: self.dim, blocks };
        f.canonicalize();
        Ok(f)
    }

    /// x ↦ f(Lx + t) where `l` is m × m' (m = self.dim, m' the new dimension).
    /// `l` and `t` may be complex; a complex shift is evaluated by analytic
    /// continuation of the Gaussian.
    pub fn affine_sub(&self, l: &DMatrix<C64>, t: &DVector<C64>) -> Result<PGFun> {
        if l.nrows() != self.dim || t.len() != self.dim {
            return Err(GaussError::DimMismatch { expected: self.dim, got: l.nrows() });
        }
        let nd = l.ncols();
        let subs: Vec<Poly> =
            (0..self.dim).map(|i| Poly::linear(t[i], &(0..nd).map(|j| l[(i, j)]).collect::<Vec<_>>())).collect();
        let lt = l.transpose();
        let mut blocks = Vec::new();
        for b in &self.blocks {
            if b.poly.degree() > MAX_DEGREE {
                return Err(GaussError::DegreeCap(b.poly.degree()));
            }
            let at = &b.exp.a * t;
            let a2 = &lt * &b.exp.a * l;
            let b2 = &lt * (&b.exp.b - &at);
            let c2 = b.exp.c - t.dot(&at) + 2.0 * b.exp.b.dot(t);
            blocks.push(Block { exp: QuadExp::new(a2, b2, c2), poly: b.poly.compose(&subs) });
        }
        let mut f = PGFun { dim: nd, blocks };
        f.canonicalize();
        Ok(f)
    }

    /// Real affine substitution convenience.
    pub fn affine_sub_real(&self, l: &DMatrix<f64>, t: &DVector<f64>) -> Result<PGFun> {
        self.affine_sub(&l.map(cr), &t.map(cr))
    }

    /// Re-embeds into `new_dim` variables: old variable i becomes new variable map[i].
    pub fn embed(&self, new_dim: usize, map: &[usize]) -> Result<PGFun> {
        let mut l = DMatrix::zeros(self.dim, new_dim);
        for (i, &k) in map.iter().enumerate() {
            if k >= new_dim {
                return Err(GaussError::BadVar(k));
            }
            l[(i, k)] = cr(1.0);
        }
        self.affine_sub(&l, &DVector::zeros(self.dim))
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        let xc: Vec<C64> = x.iter().map(|&v| cr(v)).collect();
        self.eval_c(&xc)
    }

    pub fn eval_c(&self, x: &[C64]) -> C64 {
        assert_eq!(x.len(), self.dim);
        self.blocks.iter().map(|b| b.poly.eval(x) * b.exp.exponent(x).exp()).sum()
    }

    /// Integrates out one variable; result has dimension dim − 1.
    fn integrate_var(&self, k: usize) -> Result<PGFun> {
        let n = self.dim;
        let nd = n - 1;
        let others: Vec<usize> = (0..n).filter(|&j| j != k).collect();
        let mut blocks = Vec::new();
        for (bi, b) in self.blocks.iter().enumerate() {
            let a = b.exp.a[(k, k)];
            if a.re <= 0.0 {
                return Err(GaussError::NotIntegrable { term: bi, var: k, re_a: a.re });
            }
            let r: Vec<C64> = others.iter().map(|&j| b.exp.a[(k, j)]).collect();
            let bk = b.exp.b[k];
            // new exponent: Schur complement
            let mut a2 = DMatrix::zeros(nd, nd);
            let mut b2 = DVector::zeros(nd);
            for (ii, &i) in others.iter().enumerate() {
                b2[ii] = b.exp.b[i] - bk * r[ii] / a;
                for (jj, &j) in others.iter().enumerate() {
                    a2[(ii, jj)] = b.exp.a[(i, j)] - r[ii] * r[jj] / a;
                }
            }
            let c2 = b.exp.c + bk * bk / a;
            // shift β/a as a linear polynomial in the remaining variables
            let shift = Poly::linear(bk / a, &r.iter().map(|z| -z / a).collect::<Vec<_>>());
            let root = (std::f64::consts::PI / a).sqrt();
            // group monomials by power of x_k
            let mut by_power: std::collections::BTreeMap<u32, Poly> = Default::default();
            for (m, c) in b.poly.terms() {
                let e = m.0[k];
                let rest = MultiIndex(others.iter().map(|&j| m.0[j]).collect());
                by_power.entry(e).or_insert_with(|| Poly::zero(nd)).add_term(rest, *c);
            }
            let max_e = by_power.keys().copied().max().unwrap_or(0);
            let shift_pows: Vec<Poly> = {
                let mut v = vec![Poly::one(nd)];
                for _ in 0..max_e {
                    let nx = v.last().unwrap().mul(&shift);
                    v.push(nx);
                }
                v
            };
            let mut poly = Poly::zero(nd);
            for (e, rest) in by_power {
                // ∫ (u + s)^e e^{−a u²} du = Σ_j C(e,j) s^{e−j} M_j
                let mut factor = Poly::zero(nd);
                let mut binom = 1.0f64;
                for j in 0..=e {
                    if j > 0 {
                        binom = binom * (e - j + 1) as f64 / j as f64;
                    }
                    if j % 2 == 1 {
                        continue;
                    }
                    let mj = root * even_moment_factor(j / 2, a);
                    factor = factor.add(&shift_pows[(e - j) as usize].scale(mj * binom));
                }
                poly = poly.add(&rest.mul(&factor));
            }
            if poly.degree() > MAX_DEGREE {
                return Err(GaussError::DegreeCap(poly.degree()));
            }
            blocks.push(Block { exp: QuadExp::new(a2, b2, c2), poly });
        }
        let mut f = PGFun { dim: nd, blocks };
        f.canonicalize();
        Ok(f)
    }

    /// Integrates out the listed variables; the remaining ones keep their order.
    pub fn integrate_out(&self, vars: &[usize]) -> Result<PGFun> {
        let mut v: Vec<usize> = vars.to_vec();
        v.sort_unstable();
        v.dedup();
        if let Some(&bad) = v.iter().find(|&&k| k >= self.dim) {
            return Err(GaussError::BadVar(bad));
        }
        let mut f = self.clone();
        for &k in v.iter().rev() {
            f = f.integrate_var(k)?;
        }
        Ok(f)
    }

    pub fn integrate_all(&self) -> Result<C64> {
        let vars: Vec<usize> = (0..self.dim).collect();
        let f = self.integrate_out(&vars)?;
        Ok(f.eval(&[]))
    }

    /// weight · ∫ f ḡ
    pub fn inner(&self, other: &PGFun, weight: C64) -> Result<C64> {
        Ok(weight * self.mul(&other.conj())?.integrate_all()?)
    }

    /// Plain-text serialization, one term per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("pgfun dim {} terms {}\n", self.dim, self.term_count());
        for t in self.terms() {
            let mut fields: Vec<String> = vec![fmt_f(t.coeff.re), fmt_f(t.coeff.im)];
            fields.extend(t.mono.0.iter().map(|e| e.to_string()));
            for z in t.exp.a.iter() {
                fields.push(fmt_f(z.re));
                fields.push(fmt_f(z.im));
            }
            for z in t.exp.b.iter() {
                fields.push(fmt_f(z.re));
                fields.push(fmt_f(z.im));
            }
            fields.push(fmt_f(t.exp.c.re));
            fields.push(fmt_f(t.exp.c.im));
            s.push_str(&fields.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<PGFun> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(GaussError::Parse { line: 1, msg: "empty input".into() })?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 5 || h[0] != "pgfun" || h[1] != "dim" || h[3] != "terms" {
            return Err(GaussError::Parse { line: 1, msg: "bad header".into() });
        }
        let perr = |line: usize, msg: &str| GaussError::Parse { line, msg: msg.to_string() };
        let dim: usize = h[2].parse().map_err(|_| perr(1, "bad dim"))?;
        let count: usize = h[4].parse().map_err(|_| perr(1, "bad term count"))?;
        let mut terms = Vec::new();
        for (ln, l) in lines {
            let f: Vec<&str> = l.split_whitespace().collect();
            let want = 2 + dim + 2 * dim * dim + 2 * dim + 2;
            if f.len() != want {
                return Err(perr(ln + 1, &format!("expected {want} fields, got {}", f.len())));
            }
            let num = |i: usize| -> Result<f64> { f[i].parse::<f64>().map_err(|_| perr(ln + 1, "bad number")) };
            let coeff = C64::new(num(0)?, num(1)?);
            let mut mono = Vec::with_capacity(dim);
            for i in 0..dim {
                mono.push(f[2 + i].parse::<u32>().map_err(|_| perr(ln + 1, "bad exponent"))?);
            }
            let mut p = 2 + dim;
            let mut a = DMatrix::zeros(dim, dim);
            for j in 0..dim {
                for i in 0..dim {
                    a[(i, j)] = C64::new(num(p)?, num(p + 1)?);
                    p += 2;
                }
            }
            let mut b = DVector::zeros(dim);
            for i in 0..dim {
                b[i] = C64::new(num(p)?, num(p + 1)?);
                p += 2;
            }
            let c = C64::new(num(p)?, num(p + 1)?);
            terms.push(PGTerm { coeff, mono: MultiIndex(mono), exp: QuadExp { a, b, c } });
        }
        if terms.len() != count {
            return Err(perr(1, "term count does not match header"));
        }
        PGFun::from_terms(dim, terms)
    }
}

fn fmt_f(x: f64) -> String {
    format!("{x:e}")
}

/// (2k−1)!!/(2a)^k, so that ∫u^{2k}e^{−au²} = √(π/a)·this.
fn even_moment_factor(k: u32, a: C64) -> C64 {
    let mut v = cr(1.0);
    for i in 1..=k {
        v *= (2 * i - 1) as f64 / (2.0 * a);
    }
    v
}

impl fmt::Display for PGFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// ∫ xⁿ exp(−ax² + 2bx) dx by differentiating √(π/a)·e^{b²/a} n times in b
/// (each derivative brings down 2x). Independent of the completion-of-squares path.
pub fn moment_by_derivatives(n: u32, a: C64, b: C64) -> C64 {
    // dⁿ/dbⁿ e^{b²/a} = Q_n(b) e^{b²/a}, Q₀ = 1, Q_{k+1} = Q_k′ + (2b/a)Q_k
    let mut q = vec![cr(1.0)]; // coefficients in b
    for _ in 0..n {
        let mut next = vec![cr(0.0); q.len() + 1];
        for (i, &c) in q.iter().enumerate() {
            if i > 0 {
                next[i - 1] += c * i as f64;
            }
            next[i + 1] += c * 2.0 / a;
        }
        q = next;
    }
    let qb: C64 = q.iter().enumerate().map(|(i, &c)| c * b.powu(i as u32)).sum();
    (std::f64::consts::PI / a).sqrt() * (b * b / a).exp() * qb / 2f64.powi(n as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn g1(a: f64, b: f64) -> PGFun {
        PGFun::gaussian(DMatrix::from_element(1, 1, cr(a)), DVector::from_element(1, cr(b)), cr(0.0))
    }

    #[test]
    fn normalized_gaussian() {
        let v = g1(PI, 0.0).integrate_all().unwrap();
        assert!((v - 1.0).norm() < 1e-14);
    }

    #[test]
    fn shifted_gaussian_value() {
        let v = g1(1.0, 1.0).integrate_all().unwrap();
        assert!((v - PI.sqrt() * 1f64.exp()).norm() < 1e-12);
        assert!((v.re - 4.818_029_094_698_7).abs() < 1e-9);
    }

    #[test]
    fn like_terms_merge() {
        let f = g1(1.0, 0.0);
        let s = f.add(&f).unwrap();
        assert_eq!(s.term_count(), 1);
        assert!((s.terms()[0].coeff - 2.0).norm() < 1e-15);
        assert!(f.sub(&f).unwrap().is_zero());
    }

    #[test]
    fn phases_cancel() {
        let p = PGFun::gaussian(DMatrix::zeros(1, 1), DVector::from_element(1, C64::new(0.0, PI)), cr(0.0));
        let prod = p.mul(&p.conj()).unwrap();
        assert!((prod.eval(&[0.37]) - 1.0).norm() < 1e-14);
        assert_eq!(prod.term_count(), 1);
    }

    #[test]
    fn derivative_of_gaussian() {
        let d = g1(1.0, 0.0).diff(0).unwrap();
        let x = 0.8;
        assert!((d.eval(&[x]) - (-2.0 * x * (-x * x as f64).exp())).norm() < 1e-14);
    }

    #[test]
    fn odd_moment_vanishes() {
        let f = g1(1.0, 0.0).mul_poly(&Poly::var(1, 0)).unwrap();
        assert!(f.integrate_all().unwrap().norm() < 1e-15);
    }

    #[test]
    fn inner_of_pi_gaussians() {
        let f = g1(PI, 0.0);
        let v = f.inner(&f, cr(1.0)).unwrap();
        assert!((v - 1.0 / 2f64.sqrt()).norm() < 1e-14);
    }

    #[test]
    fn integrate_out_coupled() {
        // ∫ e^{−x²+2xy} dx = √π e^{y²}
        let a = DMatrix::from_row_slice(2, 2, &[cr(1.0), cr(-1.0), cr(-1.0), cr(0.0)]);
        let f = PGFun::gaussian(a, DVector::zeros(2), cr(0.0));
        let g = f.integrate_out(&[0]).unwrap();
        let y: f64 = 0.6;
        assert!((g.eval(&[y]) - PI.sqrt() * (y * y).exp()).norm() < 1e-13);
    }

    #[test]
    fn rotation_keeps_radial_gaussian() {
        let f = PGFun::gaussian(DMatrix::identity(2, 2).map(cr), DVector::zeros(2), cr(0.0));
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let g = f.affine_sub_real(&rot, &DVector::zeros(2)).unwrap();
        assert!(g.sub(&f).unwrap().is_zero());
    }

    #[test]
    fn text_roundtrip() {
        let f = g1(1.0, 0.5).mul_poly(&Poly::linear(cr(1.0), &[C64::new(0.3, -2.0)])).unwrap();
        let back = PGFun::from_text(&f.to_text()).unwrap();
        assert_eq!(back.to_text(), f.to_text());
    }

    #[test]
    fn non_integrable_reported() {
        let f = g1(-1.0, 0.0);
        assert!(matches!(f.integrate_all(), Err(GaussError::NotIntegrable { .. })));
    }
}
