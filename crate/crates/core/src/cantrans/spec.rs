//! Canonical transformations given as polynomial identities f_i(q,p) = F_i(Q,P),
//! g_i(q,p) = G_i(Q,P), and a small parser for the polynomial strings.

use num_complex::Complex64 as C64;

use crate::dynamics::poisson_bracket;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::spaces::cr;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            // exponent part, e.g. 1e-3
            if i < cs.len() && (cs[i] == 'e' || cs[i] == 'E') {
                let mut j = i + 1;
                if j < cs.len() && (cs[j] == '+' || cs[j] == '-') {
                    j += 1;
                }
                if j < cs.len() && cs[j].is_ascii_digit() {
                    i = j;
                    while i < cs.len() && cs[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = cs[st..i].iter().collect();
            out.push(Tok::Num(s.parse().map_err(|_| Error::Invalid(format!("bad number '{s}'")))?));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Invalid(format!("unexpected character '{c}' in '{src}'")));
        }
    }
    Ok(out)
}

struct Parser<'a, F: Fn(&str) -> Option<usize>> {
    toks: Vec<Tok>,
    pos: usize,
    dim: usize,
    resolve: &'a F,
}

impl<F: Fn(&str) -> Option<usize>> Parser<'_, F> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    // expr := ['+'|'-'] term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Poly> {
        let mut acc = Poly::zero(self.dim);
        let mut sign = if self.eat('-') {
            -1.0
        } else {
            self.eat('+');
            1.0
        };
        loop {
            acc = acc.add(&self.term()?.scale(cr(sign)));
            if self.eat('+') {
                sign = 1.0;
            } else if self.eat('-') {
                sign = -1.0;
            } else {
                return Ok(acc);
            }
        }
    }

    // term := factor ('*' factor)*
    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    // factor := atom ['^' integer]
    fn factor(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(k)) if k >= 0.0 && k.fract() == 0.0 && k <= 64.0 => {
                    self.pos += 1;
                    return Ok(base.pow(k as u32));
                }
                other => return Err(Error::Invalid(format!("exponent must be a small non-negative integer, got {other:?}"))),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Poly::constant(self.dim, cr(v)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let k = (self.resolve)(&name).ok_or_else(|| Error::Invalid(format!("unknown variable '{name}'")))?;
                Ok(Poly::var(self.dim, k))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Invalid("missing ')'".into()));
                }
                Ok(e)
            }
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(self.factor()?.scale(cr(-1.0)))
            }
            other => Err(Error::Invalid(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses a polynomial with real coefficients; `resolve` maps variable names to indices.
pub fn parse_poly(src: &str, dim: usize, resolve: impl Fn(&str) -> Option<usize>) -> Result<Poly> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(Error::Invalid("empty polynomial".into()));
    }
    let mut p = Parser { toks, pos: 0, dim, resolve: &resolve };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Invalid(format!("trailing input in '{src}'")));
    }
    Ok(out)
}

/// Names q, q1, q_1 (1-based) for a coordinate letter in n degrees of freedom.
fn coordinate_index(name: &str, letter: char, n: usize) -> Option<usize> {
    let rest = name.strip_prefix(letter)?;
    let rest = rest.strip_prefix('_').unwrap_or(rest);
    if rest.is_empty() {
        return (n == 1).then_some(0);
    }
    let k: usize = rest.parse().ok()?;
    (1..=n).contains(&k).then(|| k - 1)
}

/// Parses a polynomial in q_i, p_i (old = true) or Q_i, P_i, returning it over [x₁..xₙ, ξ₁..ξₙ].
pub fn parse_phase_poly(src: &str, n: usize, old: bool) -> Result<Poly> {
    let (qc, pc) = if old { ('q', 'p') } else { ('Q', 'P') };
    parse_poly(src, 2 * n, |name| {
        coordinate_index(name, qc, n).or_else(|| coordinate_index(name, pc, n).map(|k| n + k))
    })
}

/// Transformation given by f_i(q,p) = F_i(Q,P) and g_i(q,p) = G_i(Q,P), i = 1..n.
/// All polynomials are stored over [q, p]; F and G read Q as q and P as p.
#[derive(Clone, Debug, PartialEq)]
pub struct CtSpec {
    pub n: usize,
    pub f: Vec<Poly>,
    pub big_f: Vec<Poly>,
    pub g: Vec<Poly>,
    pub big_g: Vec<Poly>,
}

impl CtSpec {
    pub fn parse(n: usize, f: &[&str], big_f: &[&str], g: &[&str], big_g: &[&str]) -> Result<Self> {
        for (what, v) in [("f", f), ("F", big_f), ("g", g), ("G", big_g)] {
            if v.len() != n {
                return Err(Error::Invalid(format!("expected {n} {what} polynomials, got {}", v.len())));
            }
        }
        let old = |v: &[&str]| v.iter().map(|s| parse_phase_poly(s, n, true)).collect::<Result<Vec<_>>>();
        let new = |v: &[&str]| v.iter().map(|s| parse_phase_poly(s, n, false)).collect::<Result<Vec<_>>>();
        Ok(CtSpec { n, f: old(f)?, big_f: new(big_f)?, g: old(g)?, big_g: new(big_g)? })
    }

    /// q ↦ −P, p ↦ Q.
    pub fn flip() -> Self {
        CtSpec::parse(1, &["q"], &["-P"], &["p"], &["Q"]).expect("static spec")
    }

    /// Q = q cos t + p sin t − C, P = −q sin t + p cos t − C.
    pub fn shifted_rotation(t: f64, c: f64) -> Self {
        let (s, co) = t.sin_cos();
        let f = Poly::linear(cr(-c), &[cr(co), cr(s)]);
        let g = Poly::linear(cr(-c), &[cr(-s), cr(co)]);
        CtSpec { n: 1, f: vec![f], big_f: vec![Poly::var(2, 0)], g: vec![g], big_g: vec![Poly::var(2, 1)] }
    }

    /// Equation pairs (old side, new side).
    pub fn pairs(&self) -> Vec<(&Poly, &Poly)> {
        self.f.iter().zip(&self.big_f).chain(self.g.iter().zip(&self.big_g)).collect()
    }

    /// Largest mismatch between {u_i, w_j}_{q,p} and {U_i, W_j}_{Q,P} over all pairs of equations.
    pub fn bracket_defect(&self) -> f64 {
        let pairs = self.pairs();
        let mut worst: f64 = 0.0;
        for (i, (u, uu)) in pairs.iter().enumerate() {
            for (w, ww) in pairs.iter().skip(i + 1) {
                let d = poisson_bracket(u, w).max_diff(&poisson_bracket(uu, ww));
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_canonical(&self, tol: f64) -> bool {
        self.bracket_defect() <= tol
    }
}

pub(crate) fn linear_parts(p: &Poly) -> Option<(C64, Vec<C64>)> {
    if p.degree() > 1 {
        return None;
    }
    let dim = p.dim();
    let zero = crate::poly::MultiIndex::zero(dim);
    let coeffs = (0..dim).map(|k| p.coeff(&crate::poly::MultiIndex::unit(dim, k))).collect();
    Some((p.coeff(&zero), coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_precedence_and_powers() {
        let p = parse_phase_poly("2*q^2 - 0.5*q*p + (p - 1)^2", 1, true).unwrap();
        let v = p.eval_real(&[1.5, -2.0]).re;
        let want = 2.0 * 2.25 - 0.5 * 1.5 * -2.0 + 9.0;
        assert!((v - want).abs() < 1e-12);
    }

    #[test]
    fn indexed_names() {
        let p = parse_phase_poly("Q_1 + 3*P2", 2, false).unwrap();
        assert!((p.eval_real(&[1.0, 0.0, 0.0, 2.0]).re - 7.0).abs() < 1e-15);
        assert!(parse_phase_poly("q3", 2, true).is_err());
        assert!(parse_phase_poly("Q", 1, true).is_err());
        assert!(parse_phase_poly("q +", 1, true).is_err());
    }

    #[test]
    fn builtin_specs_are_canonical() {
        assert!(CtSpec::flip().is_canonical(1e-14));
        assert!(CtSpec::shifted_rotation(0.3, 1.0).is_canonical(1e-14));
        let bad = CtSpec::parse(1, &["q"], &["2*Q"], &["p"], &["P"]).unwrap();
        assert!(!bad.is_canonical(1e-3));
    }
}
