//! Two linearly coupled unit-mass oscillators
//! H = ½(p₁² + p₂²) + ½(A q₁² + B q₂² + C q₁q₂), decoupled by a rotation.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::dynamics::PMechObservable;
use crate::error::{Error, Result};
use crate::numerics::rk4;
use crate::poly::Poly;
use crate::spaces::cr;

use super::symplectic::SymplecticMatrix;

/// Coupling constants of the potential ½(A q₁² + B q₂² + C q₁q₂).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coupling {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Rotation angle and the squared normal-mode frequencies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalModes {
    pub alpha: f64,
    pub w1: f64,
    pub w2: f64,
}

impl Coupling {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::Invalid("coupling constants must be finite".into()));
        }
        // positive definite potential
        if a <= 0.0 || 4.0 * a * b - c * c <= 0.0 {
            return Err(Error::Invalid(format!("potential with A={a}, B={b}, C={c} is not positive definite")));
        }
        Ok(Coupling { a, b, c })
    }

    pub fn hamiltonian(&self) -> PMechObservable {
        let v = |k| Poly::var(4, k);
        let (q1, q2, p1, p2) = (v(0), v(1), v(2), v(3));
        let poly = p1
            .mul(&p1)
            .add(&p2.mul(&p2))
            .add(&q1.mul(&q1).scale(cr(self.a)))
            .add(&q2.mul(&q2).scale(cr(self.b)))
            .add(&q1.mul(&q2).scale(cr(self.c)))
            .scale(cr(0.5));
        PMechObservable { n: 2, poly }
    }

    /// tan α = C/(B − A), with α = (π/2)·sign C when A = B.
    pub fn decouple(&self) -> NormalModes {
        let Coupling { a, b, c } = *self;
        let alpha = if a == b {
            if c == 0.0 {
                0.0
            } else {
                std::f64::consts::FRAC_PI_2 * c.signum()
            }
        } else {
            (c / (b - a)).atan()
        };
        let (s, co) = (alpha / 2.0).sin_cos();
        NormalModes {
            alpha,
            w1: a * co * co + b * s * s - c * co * s,
            w2: a * s * s + b * co * co + c * co * s,
        }
    }

    /// Coefficient of q₁q₂ after the rotation: (A − B)cs + (C/2)(c² − s²).
    pub fn cross_term(&self) -> f64 {
        let (s, co) = (self.decouple().alpha / 2.0).sin_cos();
        (self.a - self.b) * co * s + 0.5 * self.c * (co * co - s * s)
    }
}

impl NormalModes {
    /// The canonical map (Q, P) ↦ (q, p) with q = R Q, p = R P, R = [[c, s], [−s, c]].
    pub fn rotation(&self) -> SymplecticMatrix {
        let (s, c) = (self.alpha / 2.0).sin_cos();
        let mut m = DMatrix::zeros(4, 4);
        for off in [0, 2] {
            m[(off, off)] = c;
            m[(off, off + 1)] = s;
            m[(off + 1, off)] = -s;
            m[(off + 1, off + 1)] = c;
        }
        SymplecticMatrix::new(m).expect("rotations are symplectic")
    }

    /// Symbol flow of the decoupled Hamiltonian ½(P² + W Q²) per mode, variables [Q₁, Q₂, P₁, P₂].
    pub fn mode_flow(&self, t: f64) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(4, 4);
        for (k, w) in [self.w1, self.w2].into_iter().enumerate() {
            let om = w.sqrt();
            let (s, c) = (om * t).sin_cos();
            m[(k, k)] = c;
            m[(k, 2 + k)] = s / om;
            m[(2 + k, k)] = -om * s;
            m[(2 + k, 2 + k)] = c;
        }
        m
    }

    /// Group-variable map of the closed form printed for each mode,
    /// (x, y) ↦ (x cos √W t + y sin √W t/√W, −√W x sin √W t + y cos √W t).
    /// It solves ∂B/∂t = y∂ₓB − W x∂_yB rather than the equation generated by the
    /// Hamiltonian, ∂B/∂t = W y∂ₓB − x∂_yB, and so disagrees with the flow unless W = 1.
    pub fn printed_group_map(w: f64, t: f64) -> DMatrix<f64> {
        let om = w.sqrt();
        let (s, c) = (om * t).sin_cos();
        DMatrix::from_row_slice(2, 2, &[c, s / om, -om * s, c])
    }
}

/// Classical flow matrix in original coordinates [q₁, q₂, p₁, p₂].
pub fn coupled_flow_matrix(cp: &Coupling, t: f64) -> DMatrix<f64> {
    let modes = cp.decouple();
    let r = modes.rotation();
    r.matrix() * modes.mode_flow(t) * r.inverse().matrix()
}

/// (q(t), p(t)) from the normal-mode solution.
pub fn coupled_flow(cp: &Coupling, q: [f64; 2], p: [f64; 2], t: f64) -> ([f64; 2], [f64; 2]) {
    let m = coupled_flow_matrix(cp, t);
    let v = nalgebra::DVector::from_row_slice(&[q[0], q[1], p[0], p[1]]);
    let w = m * v;
    ([w[0], w[1]], [w[2], w[3]])
}

/// Hamilton's equations integrated by RK4.
pub fn coupled_rk4(cp: &Coupling, q: [f64; 2], p: [f64; 2], t: f64, steps: usize) -> ([f64; 2], [f64; 2]) {
    let Coupling { a, b, c } = *cp;
    let y = rk4(
        |_, y: &[f64]| vec![y[2], y[3], -(a * y[0] + 0.5 * c * y[1]), -(b * y[1] + 0.5 * c * y[0])],
        &[q[0], q[1], p[0], p[1]],
        0.0,
        t,
        steps,
    );
    ([y[0], y[1]], [y[2], y[3]])
}

/// Evolved observable f ↦ f ∘ Φₜ for the coupled Hamiltonian.
pub fn coupled_evolve_obs(b0: &PMechObservable, cp: &Coupling, t: f64) -> Result<PMechObservable> {
    if b0.n != 2 {
        return Err(Error::Dim { expected: 2, got: b0.n });
    }
    let m = coupled_flow_matrix(cp, t);
    let subs: Vec<Poly> = (0..4)
        .map(|i| {
            let row: Vec<C64> = (0..4).map(|j| cr(m[(i, j)])).collect();
            Poly::linear(cr(0.0), &row)
        })
        .collect();
    Ok(PMechObservable { n: 2, poly: b0.poly.compose(&subs) })
}
