//! Special functions of the Coulomb problem: associated Legendre functions,
//! spherical harmonics, Laguerre polynomials and the terminating confluent
//! hypergeometric series.
//!
//! Laguerre polynomials follow the unnormalised Rodrigues convention
//! L_q(z) = e^z dᵠ/dzᵠ(e^{−z} zᵠ), which is q! times the textbook one, and
//! L^p_{q−p} = (−1)ᵖ dᵖ/dzᵖ L_q.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

fn check_lm(l: u32, m: i32) -> Result<()> {
    if m.unsigned_abs() > l {
        return Err(Error::Invalid(format!("need |m| ≤ l, got l = {l}, m = {m}")));
    }
    Ok(())
}

/// P_l^m(x) without the Condon–Shortley phase; negative m through
/// P_l^{−m} = (−1)^m (l−m)!/(l+m)! P_l^m.
pub fn assoc_legendre(l: u32, m: i32, x: f64) -> Result<f64> {
    check_lm(l, m)?;
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Invalid(format!("Legendre argument {x} outside [−1, 1]")));
    }
    let am = m.unsigned_abs();
    let s = (1.0 - x * x).sqrt();
    let mut pmm = 1.0;
    for k in 1..=am {
        pmm *= f64::from(2 * k - 1) * s;
    }
    let val = if l == am {
        pmm
    } else {
        let mut prev = pmm;
        let mut cur = x * f64::from(2 * am + 1) * pmm;
        for ll in (am + 2)..=l {
            let next = (x * f64::from(2 * ll - 1) * cur - f64::from(ll + am - 1) * prev) / f64::from(ll - am);
            prev = cur;
            cur = next;
        }
        cur
    };
    if m >= 0 {
        Ok(val)
    } else {
        let sign = if am % 2 == 0 { 1.0 } else { -1.0 };
        Ok(sign * factorial(l - am) / factorial(l + am) * val)
    }
}

/// Y_l^m(θ, φ) = √((2l+1)/4π · (l−m)!/(l+m)!) (−1)^m e^{imφ} P_l^m(cos θ),
/// with θ the polar and φ the azimuthal angle.
pub fn sph_harmonic(l: u32, m: i32, polar: f64, azimuth: f64) -> Result<C64> {
    let p = assoc_legendre(l, m, polar.cos())?;
    let lm = (l as i32 - m) as u32;
    let lp = (l as i32 + m) as u32;
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(lm) / factorial(lp)).sqrt();
    let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok(C64::from_polar(sign * norm * p, f64::from(m) * azimuth))
}

/// Textbook generalized Laguerre L_k^{(α)} by the three-term recurrence.
fn laguerre_textbook(k: u32, alpha: f64, z: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - z;
    for j in 1..k {
        let j = f64::from(j);
        let next = ((2.0 * j + 1.0 + alpha - z) * cur - (j + alpha) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// L_q(z) = e^z dᵠ/dzᵠ(e^{−z} zᵠ).
pub fn laguerre(q: u32, z: f64) -> f64 {
    factorial(q) * laguerre_textbook(q, 0.0, z)
}

/// L^p_{q−p}(z) = (−1)ᵖ dᵖ/dzᵖ L_q(z), indexed by p and q − p.
pub fn assoc_laguerre(p: u32, q_minus_p: u32, z: f64) -> f64 {
    factorial(p + q_minus_p) * laguerre_textbook(q_minus_p, f64::from(p), z)
}

/// F₁(a; c; z) = Γ(1−a)Γ(c)/Γ(c−a)² L^{c−1}_{−a}(z) for a ∈ {0, −1, −2, …}
/// and a positive integer c.
pub fn confluent_f1(a: i32, c: u32, z: f64) -> Result<f64> {
    if a > 0 || c == 0 {
        return Err(Error::Invalid(format!("F₁ needs a ≤ 0 and c ≥ 1, got a = {a}, c = {c}")));
    }
    let k = a.unsigned_abs();
    let pre = factorial(k) * factorial(c - 1) / factorial(c - 1 + k).powi(2);
    Ok(pre * assoc_laguerre(c - 1, k, z))
}

/// Terminating series Σ_j (a)_j/(c)_j zʲ/j!.
pub fn hyp1f1_series(a: i32, c: u32, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut j = 0i32;
    while a + j < 0 {
        term *= f64::from(a + j) / (f64::from(c) + f64::from(j)) * z / f64::from(j + 1);
        sum += term;
        j += 1;
    }
    sum
}

/// Dense real polynomial, coefficient k multiplies xᵏ.
#[derive(Clone, Debug)]
struct Coeffs(Vec<f64>);

impl Coeffs {
    fn deriv(&self) -> Coeffs {
        Coeffs(self.0.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect())
    }

    fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    fn mul(&self, other: &Coeffs) -> Coeffs {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Coeffs(out)
    }
}

/// P_l^m from the Rodrigues form (1−x²)^{m/2}/(2ˡ l!) d^{l+m}/dx^{l+m} (x²−1)ˡ.
pub fn legendre_rodrigues(l: u32, m: i32, x: f64) -> Result<f64> {
    check_lm(l, m)?;
    let base = Coeffs(vec![-1.0, 0.0, 1.0]);
    let mut p = Coeffs(vec![1.0]);
    for _ in 0..l {
        p = p.mul(&base);
    }
    for _ in 0..(l as i32 + m) {
        p = p.deriv();
    }
    Ok((1.0 - x * x).powf(f64::from(m) / 2.0) * p.eval(x) / (2f64.powi(l as i32) * factorial(l)))
}

/// L^p_{q−p} straight from the Rodrigues forms, differentiating symbolically.
pub fn laguerre_rodrigues(p: u32, q_minus_p: u32, z: f64) -> f64 {
    let q = p + q_minus_p;
    // e^{−z}P ↦ e^{−z}(P′ − P), starting from P = zᵠ
    let mut poly = Coeffs((0..=q).map(|k| if k == q { 1.0 } else { 0.0 }).collect());
    for _ in 0..q {
        let d = poly.deriv();
        poly = Coeffs(poly.0.iter().enumerate().map(|(k, c)| d.0.get(k).copied().unwrap_or(0.0) - c).collect());
    }
    for _ in 0..p {
        poly = poly.deriv();
    }
    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
    sign * if poly.0.is_empty() { 0.0 } else { poly.eval(z) }
}
