//! Klauder coherent states for the Coulomb bound states and the KC space of
//! functions f(σ, γ, Ω̄) = ⟨ψ, ψ_{(σ,γ,Ω̄)}⟩ on which the dynamics is a γ-shift.
//!
//! States are coefficient tables in the orthonormal ψ_{(n,l,m)} basis, so all
//! inner products are exact sums.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::special::{binomial, factorial};
use super::spectrum::{energy, QuantumNumbers};
use crate::error::{Error, Result};
use crate::numerics::{central_diff, gauss_legendre};

/// Ω̄ = (θ̄, φ̄, ψ̄).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EulerAngles {
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KlauderLabel {
    pub sigma: f64,
    pub gamma: f64,
    pub omega: EulerAngles,
}

impl KlauderLabel {
    pub fn new(sigma: f64, gamma: f64, omega: EulerAngles) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(Error::Invalid(format!("σ must be non-negative, got {sigma}")));
        }
        Ok(KlauderLabel { sigma, gamma, omega })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoeffTable(pub BTreeMap<QuantumNumbers, C64>);

impl CoeffTable {
    pub fn single(qn: QuantumNumbers) -> Self {
        CoeffTable(BTreeMap::from([(qn, C64::new(1.0, 0.0))]))
    }

    pub fn get(&self, qn: &QuantumNumbers) -> C64 {
        self.0.get(qn).copied().unwrap_or_default()
    }

    /// ⟨self, other⟩ = ∑ a · conj(b).
    pub fn inner(&self, other: &CoeffTable) -> C64 {
        self.0.iter().map(|(k, a)| a * other.get(k).conj()).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn scale(&self, s: C64) -> CoeffTable {
        CoeffTable(self.0.iter().map(|(k, v)| (*k, v * s)).collect())
    }

    pub fn max_diff(&self, other: &CoeffTable) -> f64 {
        self.0.keys().chain(other.0.keys()).map(|k| (self.get(k) - other.get(k)).norm()).fold(0.0, f64::max)
    }

    /// Multiply each coefficient by a phase depending on its principal number.
    fn per_level(&self, phase: impl Fn(u32) -> C64) -> CoeffTable {
        CoeffTable(self.0.iter().map(|(k, v)| (*k, v * phase(k.n))).collect())
    }
}

/// [(2l)!/((l+m)!(l−m)!)]^{1/2} sin(θ̄/2)^{l−m} cos(θ̄/2)^{l+m} e^{−i(mφ̄+lψ̄)} (2l+1)^{1/2}
pub fn am_coefficient(l: u32, m: i32, om: &EulerAngles) -> C64 {
    let (s, c) = (0.5 * om.theta).sin_cos();
    let (lm, lp) = ((l as i32 - m) as i32, (l as i32 + m) as i32);
    let amp = binomial(2 * l, lp as u32).sqrt() * s.powi(lm) * c.powi(lp) * f64::from(2 * l + 1).sqrt();
    C64::from_polar(amp, -(f64::from(m) * om.phi + f64::from(l) * om.psi))
}

/// ψ_{(n,Ω̄)}: sum over l ≤ n of the (l, m) amplitudes on ψ_{(n+1,l,m)}.
pub fn klauder_am_state(n: u32, om: &EulerAngles) -> CoeffTable {
    let mut t = BTreeMap::new();
    for l in 0..=n {
        for m in -(l as i32)..=l as i32 {
            t.insert(QuantumNumbers { n: n + 1, l, m }, am_coefficient(l, m, om));
        }
    }
    CoeffTable(t)
}

/// e^{−σ²} ∑_{n > n_max} σ^{2n}/n!, summed forward to avoid cancellation.
pub fn kc_tail(sigma: f64, n_max: u32) -> f64 {
    let s2 = sigma * sigma;
    let mut term = (0..=n_max).fold((-s2).exp(), |t, k| if k == 0 { t } else { t * s2 / f64::from(k) });
    let mut sum = 0.0;
    let mut k = n_max + 1;
    loop {
        term *= s2 / f64::from(k);
        sum += term;
        if term <= 1e-18 * sum || term == 0.0 {
            break;
        }
        k += 1;
    }
    sum
}

const TAIL_BOUND: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KcWeights {
    /// rescaled to unit norm
    #[default]
    Normalized,
    /// e^{−σ²}σⁿ/√(n!) as written, norm² = e^{−2σ²}∑σ^{2n}(n+1)²/n!
    Printed,
}

/// e^{2πiγ/(hN²)}, the level phase of principal number N.
fn gamma_phase(gamma: f64, h: f64, level: u32) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * gamma / (h * f64::from(level * level)))
}

/// ψ_{(σ,γ,Ω̄)} truncated at n ≤ n_max (principal numbers up to n_max + 1).
pub fn klauder_cs(lbl: &KlauderLabel, h: f64, n_max: u32, weights: KcWeights) -> Result<CoeffTable> {
    let tail = kc_tail(lbl.sigma, n_max);
    if tail >= TAIL_BOUND {
        return Err(Error::Convergence(format!("σ = {} needs more than n_max = {n_max} levels (tail {tail:.1e})", lbl.sigma)));
    }
    let mut t = BTreeMap::new();
    for n in 0..=n_max {
        let w = (-lbl.sigma * lbl.sigma).exp() * lbl.sigma.powi(n as i32) / factorial(n).sqrt();
        if w == 0.0 {
            continue;
        }
        let ph = gamma_phase(lbl.gamma, h, n + 1) * w;
        for (k, v) in klauder_am_state(n, &lbl.omega).0 {
            t.insert(k, v * ph);
        }
    }
    let table = CoeffTable(t);
    Ok(match weights {
        KcWeights::Printed => table,
        KcWeights::Normalized => {
            let nrm = table.norm_sq().sqrt();
            table.scale(C64::new(1.0 / nrm, 0.0))
        }
    })
}

/// ω with E_N = −ω/N² for the kinetic term −(h²/8π²)∇²: ω = 2π²/h².
pub fn kepler_omega(h: f64) -> f64 {
    2.0 * PI * PI / (h * h)
}

/// K₁ψ as a function on labels, with an accumulated γ-shift.
#[derive(Clone, Debug)]
pub struct KcFunction {
    pub coeffs: CoeffTable,
    pub h: f64,
    pub n_max: u32,
    pub gamma_shift: f64,
}

/// f(σ, γ, Ω̄) = ⟨ψ, ψ_{(σ,γ,Ω̄)}⟩ with the printed weights.
pub fn kc_transform(coeffs: &CoeffTable, h: f64, n_max: u32) -> Result<KcFunction> {
    if let Some(k) = coeffs.0.keys().find(|k| k.n > n_max + 1) {
        return Err(Error::Invalid(format!("state {k:?} above the truncation n_max = {n_max}")));
    }
    Ok(KcFunction { coeffs: coeffs.clone(), h, n_max, gamma_shift: 0.0 })
}

impl KcFunction {
    pub fn eval(&self, lbl: &KlauderLabel) -> Result<C64> {
        let shifted = KlauderLabel { gamma: lbl.gamma + self.gamma_shift, ..*lbl };
        Ok(self.coeffs.inner(&klauder_cs(&shifted, self.h, self.n_max, KcWeights::Printed)?))
    }
}

/// f(t; σ, γ, Ω̄) = f₀(σ, γ + ωt, Ω̄).
pub fn kc_time_evolve(f: &KcFunction, t: f64, omega: f64) -> KcFunction {
    KcFunction { gamma_shift: f.gamma_shift + omega * t, ..f.clone() }
}

/// c_N ↦ e^{−(2π/ih)E_N t} c_N with E_N = −2π²/(h²N²).
pub fn level_phase_evolve(coeffs: &CoeffTable, t: f64, h: f64) -> CoeffTable {
    coeffs.per_level(|n| C64::from_polar(1.0, 2.0 * PI * energy(n, h) * t / h))
}

/// Solution of dψ/dt = (2π/ih)Hψ: c_N ↦ e^{(2π/ih)E_N t} c_N.
pub fn schrodinger_evolve(coeffs: &CoeffTable, t: f64, h: f64) -> CoeffTable {
    coeffs.per_level(|n| C64::from_polar(1.0, -2.0 * PI * energy(n, h) * t / h))
}

/// The stated eigenfunction f_{(N,l,m)} of (ih/2π)ω∂_γ, with principal number
/// N ≥ 1 in both the weight and the phase.
pub fn kc_eigenfunction(qn: QuantumNumbers, h: f64, lbl: &KlauderLabel) -> C64 {
    let n = qn.n;
    let w = (-lbl.sigma * lbl.sigma).exp() * lbl.sigma.powi(n as i32) / factorial(n).sqrt();
    gamma_phase(lbl.gamma, h, n) * am_coefficient(qn.l, qn.m, &lbl.omega) * w
}

/// (ih/2π)ω ∂f/∂γ by central differences.
pub fn kc_hamiltonian_apply<F: Fn(&KlauderLabel) -> C64>(f: F, lbl: &KlauderLabel, h: f64, omega: f64, step: f64) -> C64 {
    let g = |v: &[f64]| f(&KlauderLabel { gamma: v[0], ..*lbl });
    central_diff(&g, &[lbl.gamma], 0, step) * C64::new(0.0, h * omega / (2.0 * PI))
}

/// For level N: the number of eigenfunctions f_{(N,l,m)}, l < N, and the
/// largest deviation of their measured eigenvalue from −ω/N².
pub fn kc_level_degeneracy(level: u32, h: f64, lbl: &KlauderLabel) -> Result<(usize, f64)> {
    let omega = kepler_omega(h);
    let want = -omega / f64::from(level * level);
    let states = QuantumNumbers::level(level);
    let step = 1e-4 * h * f64::from(level * level);
    let mut worst: f64 = 0.0;
    for qn in &states {
        let f0 = kc_eigenfunction(*qn, h, lbl);
        if f0.norm() < 1e-300 {
            return Err(Error::Invalid(format!("label gives a vanishing f_{qn:?}; pick θ̄ off the poles")));
        }
        let hf = kc_hamiltonian_apply(|l| kc_eigenfunction(*qn, h, l), lbl, h, omega, step);
        worst = worst.max(((hf / f0) - want).norm() / want.abs());
    }
    Ok((states.len(), worst))
}

/// Weight convention of the Ω̄ integral in the resolution of the identity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AmMeasure {
    /// sin θ̄ dθ̄ dφ̄ dψ̄ / 8π²
    #[default]
    Normalized,
    /// sin θ̄ dθ̄ dφ̄ dψ̄
    Printed,
}

fn am_gram(n: u32, sizes: [usize; 3], measure: AmMeasure) -> Vec<Vec<C64>> {
    let basis: Vec<(u32, i32)> = (0..=n + 1).flat_map(|l| (-(l as i32)..=l as i32).map(move |m| (l, m))).collect();
    let (x, wx) = gauss_legendre(sizes[0]);
    let scale = match measure {
        AmMeasure::Normalized => 1.0 / (8.0 * PI * PI),
        AmMeasure::Printed => 1.0,
    };
    let w = scale * (2.0 * PI / sizes[1] as f64) * (2.0 * PI / sizes[2] as f64);
    let mut g = vec![vec![C64::default(); basis.len()]; basis.len()];
    for (xi, wi) in x.iter().zip(&wx) {
        let theta = xi.acos();
        for a in 0..sizes[1] {
            for b in 0..sizes[2] {
                let om = EulerAngles { theta, phi: 2.0 * PI * a as f64 / sizes[1] as f64, psi: 2.0 * PI * b as f64 / sizes[2] as f64 };
                let c: Vec<C64> = basis.iter().map(|&(l, m)| if l <= n { am_coefficient(l, m, &om) } else { C64::default() }).collect();
                for i in 0..basis.len() {
                    for j in 0..basis.len() {
                        g[i][j] += c[i] * c[j].conj() * wi * w;
                    }
                }
            }
        }
    }
    g.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, v)| {
                    let want = if i == j && basis[i].0 <= n { 1.0 } else { 0.0 };
                    v - want
                })
                .collect()
        })
        .collect()
}

/// Max-norm deviation from the projector onto 𝒜ℳ_n of ∫⟨·, ψ_{(n,Ω̄)}⟩ψ_{(n,Ω̄)},
/// on the (l, m) basis with l ≤ n+1. The quadrature is Gauss–Legendre in cos θ̄
/// and trapezoid in φ̄, ψ̄; it is repeated at doubled sizes and rejected when
/// the two disagree.
pub fn am_resolution_check(n: u32, sizes: [usize; 3], measure: AmMeasure) -> Result<f64> {
    let defect = |s: [usize; 3]| am_gram(n, s, measure).iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    let coarse = defect(sizes);
    let fine = defect([2 * sizes[0], 2 * sizes[1], 2 * sizes[2]]);
    if (coarse - fine).abs() > 1e-9 * fine.max(1.0) {
        return Err(Error::Convergence(format!("AM quadrature under-resolved: {coarse:e} vs {fine:e} after doubling")));
    }
    Ok(fine)
}
