//! Sparse multivariate polynomials with complex coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;

/// Exponent vector of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    pub fn unit(dim: usize, var: usize) -> Self {
        let mut e = vec![0; dim];
        e[var] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn eval(&self, x: &[C64]) -> C64 {
        let mut v = C64::new(1.0, 0.0);
        for (xi, &e) in x.iter().zip(&self.0) {
            if e > 0 {
                v *= xi.powu(e);
            }
        }
        v
    }
}

/// Σ c_α x^α over `dim` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    dim: usize,
    terms: BTreeMap<MultiIndex, C64>,
}

const PRUNE_REL: f64 = 1e-14;

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Poly { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: C64) -> Self {
        let mut p = Poly::zero(dim);
        p.add_term(MultiIndex::zero(dim), c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Poly::constant(dim, C64::new(1.0, 0.0))
    }

    pub fn var(dim: usize, k: usize) -> Self {
        let mut p = Poly::zero(dim);
        p.add_term(MultiIndex::unit(dim, k), C64::new(1.0, 0.0));
        p
    }

    pub fn monomial(mono: MultiIndex, c: C64) -> Self {
        let mut p = Poly::zero(mono.dim());
        p.add_term(mono, c);
        p
    }

    /// c₀ + Σ coeffs[k] x_k
    pub fn linear(c0: C64, coeffs: &[C64]) -> Self {
        let dim = coeffs.len();
        let mut p = Poly::constant(dim, c0);
        for (k, &c) in coeffs.iter().enumerate() {
            p.add_term(MultiIndex::unit(dim, k), c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mono: &MultiIndex) -> C64 {
        self.terms.get(mono).copied().unwrap_or_default()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, mono: MultiIndex, c: C64) {
        debug_assert_eq!(mono.dim(), self.dim);
        if c == C64::default() {
            return;
        }
        let e = self.terms.entry(mono).or_default();
        *e += c;
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops coefficients negligible relative to the largest one.
    pub fn prune(&mut self) {
        let m = self.max_abs();
        let cut = m * PRUNE_REL;
        self.terms.retain(|_, c| c.norm() > cut && c.norm() > 0.0);
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out.prune();
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Poly {
        let mut out = Poly::zero(self.dim);
        if s == C64::default() {
            return out;
        }
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.add(m2), c1 * c2);
            }
        }
        out.prune();
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one(self.dim);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn conj(&self) -> Poly {
        Poly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.conj())).collect(),
        }
    }

    pub fn diff(&self, k: usize) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.0[k];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[k] -= 1;
            out.add_term(m2, c * e as f64);
        }
        out
    }

    pub fn eval(&self, x: &[C64]) -> C64 {
        self.terms.iter().map(|(m, c)| c * m.eval(x)).sum()
    }

    pub fn eval_real(&self, x: &[f64]) -> C64 {
        let xc: Vec<C64> = x.iter().map(|&v| C64::new(v, 0.0)).collect();
        self.eval(&xc)
    }

    /// Substitutes x_i ↦ subs[i] (polynomials over a common new variable set).
    pub fn compose(&self, subs: &[Poly]) -> Poly {
        assert_eq!(subs.len(), self.dim);
        let new_dim = subs.first().map(|p| p.dim).unwrap_or(0);
        let mut out = Poly::zero(new_dim);
        // cache powers per variable
        let mut powers: Vec<Vec<Poly>> = subs.iter().map(|s| vec![Poly::one(s.dim), s.clone()]).collect();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(new_dim, *c);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&subs[i]);
                    powers[i].push(next);
                }
                t = t.mul(&powers[i][e as usize]);
            }
            for (m2, c2) in t.terms {
                out.add_term(m2, c2);
            }
        }
        out.prune();
        out
    }

    /// Re-embeds into `new_dim` variables; old variable i becomes new variable map[i].
    pub fn embed(&self, new_dim: usize, map: &[usize]) -> Poly {
        let mut out = Poly::zero(new_dim);
        for (m, c) in &self.terms {
            let mut e = vec![0; new_dim];
            for (i, &k) in map.iter().enumerate() {
                e[k] += m.0[i];
            }
            out.add_term(MultiIndex(e), *c);
        }
        out
    }

    /// Largest coefficient difference against another polynomial.
    pub fn max_diff(&self, other: &Poly) -> f64 {
        self.sub(other).max_abs()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)", c.re, c.im)?;
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    write!(f, "*x{}^{}", i, e)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn binomial_square() {
        let p = Poly::linear(c(1.0), &[c(1.0)]);
        let sq = p.pow(2);
        assert_eq!(sq.coeff(&MultiIndex(vec![1])), c(2.0));
        assert_eq!(sq.coeff(&MultiIndex(vec![2])), c(1.0));
    }

    #[test]
    fn compose_matches_eval() {
        let p = Poly::var(2, 0).mul(&Poly::var(2, 1)).add(&Poly::constant(2, c(3.0)));
        let subs = vec![Poly::linear(c(1.0), &[c(2.0)]), Poly::linear(c(0.0), &[c(-1.0)])];
        let q = p.compose(&subs);
        let t = 0.7;
        let direct = p.eval_real(&[1.0 + 2.0 * t, -t]);
        assert!((q.eval_real(&[t]) - direct).norm() < 1e-14);
    }

    #[test]
    fn diff_lowers_degree() {
        let p = Poly::var(1, 0).pow(3);
        assert_eq!(p.diff(0).coeff(&MultiIndex(vec![2])), c(3.0));
    }
}
