//! Representations transported through an invertible change of position
//! coordinates ℳ: Rⁿ → 𝓘, with ζ = ℳ(ξ).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::coords::{cartesian_from_sph, sph_from_cartesian, spherical_jacobian, SphericalPoint};
use crate::error::{Error, Result};
use crate::heisenberg::GroupElement;
use crate::numerics::central_diff;

type VecMap = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type JacMap = Box<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// Sign of the transported position operator. `Standard` is multiplication by
/// +ℳ⁻¹(ζ)_j, which is what the Schrödinger case ℳ = id gives; `Printed`
/// keeps the quoted −ℳ⁻¹(ζ)_j and −h∑ψ_{,k}(Dℳ)_{kj} without the 1/2πi.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PositionSign {
    #[default]
    Standard,
    Printed,
}

/// How new momenta map back: `Transposed` is p_j = ∑_k (Dℳ)_{kj} p_{ζ_k}
/// (the cotangent lift); `Printed` uses (Dℳ)_{jk}, which agrees only when
/// Dℳ is symmetric.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MomentumOrientation {
    #[default]
    Transposed,
    Printed,
}

pub struct PositionTransform {
    n: usize,
    forward: VecMap,
    inverse: VecMap,
    jacobian: JacMap,
}

impl PositionTransform {
    /// `jacobian(ξ)_{ij} = ∂ℳ_i/∂ξ_j`.
    pub fn new(n: usize, forward: VecMap, inverse: VecMap, jacobian: JacMap) -> Self {
        PositionTransform { n, forward, inverse, jacobian }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(n, Box::new(|x| x.to_vec()), Box::new(|x| x.to_vec()), Box::new(move |_| DMatrix::identity(n, n)))
    }

    /// ℳ_S, with ζ = (r, azimuth, polar).
    pub fn spherical() -> Self {
        Self::new(
            3,
            Box::new(|x| {
                sph_from_cartesian([x[0], x[1], x[2]]).map(|p| vec![p.r, p.theta, p.phi]).unwrap_or_else(|_| vec![f64::NAN; 3])
            }),
            Box::new(|z| cartesian_from_sph(&SphericalPoint { r: z[0], theta: z[1], phi: z[2] }).to_vec()),
            Box::new(|x| {
                spherical_jacobian([x[0], x[1], x[2]])
                    .map(|m| DMatrix::from_fn(3, 3, |i, j| m[(i, j)]))
                    .unwrap_or_else(|_| DMatrix::from_element(3, 3, f64::NAN))
            }),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn forward(&self, xi: &[f64]) -> Vec<f64> {
        (self.forward)(xi)
    }

    pub fn inverse(&self, zeta: &[f64]) -> Vec<f64> {
        (self.inverse)(zeta)
    }

    /// Dℳ at ℳ⁻¹(ζ), rejecting (near-)singular points.
    pub fn jacobian_at(&self, zeta: &[f64]) -> Result<DMatrix<f64>> {
        self.check_dim(zeta)?;
        let d = (self.jacobian)(&self.inverse(zeta));
        let det = d.determinant();
        if !det.is_finite() || det.abs() < 1e-12 {
            return Err(Error::Invalid(format!("singular Jacobian at {zeta:?} (det = {det:e})")));
        }
        Ok(d)
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::Dim { expected: self.n, got: v.len() });
        }
        Ok(())
    }

    /// (ρ_h^ℳ(s,x,y)ψ)(ζ) = e^{−2πihs} e^{πihx·y} e^{2πix·ℳ⁻¹(ζ)} ψ(ℳ(ℳ⁻¹(ζ) + hy)).
    pub fn rep_apply<F: Fn(&[f64]) -> C64>(&self, g: &GroupElement, h: f64, psi: F, zeta: &[f64]) -> Result<C64> {
        self.check_dim(zeta)?;
        if g.n() != self.n {
            return Err(Error::Dim { expected: self.n, got: g.n() });
        }
        let xi = self.inverse(zeta);
        let moved: Vec<f64> = xi.iter().zip(&g.y).map(|(a, b)| a + h * b).collect();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
        let phase = 2.0 * PI * (-h * g.s + 0.5 * h * dot(&g.x, &g.y) + dot(&g.x, &xi));
        Ok(C64::from_polar(1.0, phase) * psi(&self.forward(&moved)))
    }

    /// Position observable q_j applied to ψ at ζ.
    pub fn position_op<F: Fn(&[f64]) -> C64>(&self, psi: F, zeta: &[f64], j: usize, sign: PositionSign) -> Result<C64> {
        self.check_dim(zeta)?;
        let q = self.inverse(zeta)[j];
        Ok(match sign {
            PositionSign::Standard => q * psi(zeta),
            PositionSign::Printed => -q * psi(zeta),
        })
    }

    /// Momentum observable p_j applied to ψ at ζ, derivatives by central differences.
    pub fn momentum_op<F: Fn(&[f64]) -> C64>(&self, h: f64, psi: F, zeta: &[f64], j: usize, sign: PositionSign, step: f64) -> Result<C64> {
        let d = self.jacobian_at(zeta)?;
        let chain: C64 = (0..self.n).map(|k| central_diff(&psi, zeta, k, step) * d[(k, j)]).sum();
        Ok(match sign {
            PositionSign::Standard => chain * h / C64::new(0.0, 2.0 * PI),
            PositionSign::Printed => -chain * h,
        })
    }

    /// Cartesian (q, p) of the phase point (ζ, p_ζ).
    pub fn to_cartesian(&self, zeta: &[f64], p_zeta: &[f64], orient: MomentumOrientation) -> Result<(Vec<f64>, Vec<f64>)> {
        let d = self.jacobian_at(zeta)?;
        let pz = DVector::from_column_slice(p_zeta);
        let p = match orient {
            MomentumOrientation::Transposed => d.transpose() * pz,
            MomentumOrientation::Printed => d * pz,
        };
        Ok((self.inverse(zeta), p.iter().copied().collect()))
    }

    /// Max deviation of {q_i, p_j} = δ_ij, {q_i, q_j} = {p_i, p_j} = 0 in the
    /// coordinates (ζ, p_ζ), by central differences, over the given points.
    pub fn canonical_check(&self, points: &[(Vec<f64>, Vec<f64>)], orient: MomentumOrientation, step: f64) -> Result<f64> {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for (zeta, pz) in points {
            let z0: Vec<f64> = zeta.iter().chain(pz).copied().collect();
            let mut grads = Vec::with_capacity(2 * n);
            for k in 0..2 * n {
                let mut zp = z0.clone();
                let mut zm = z0.clone();
                zp[k] += step;
                zm[k] -= step;
                let (qa, pa) = self.to_cartesian(&zp[..n], &zp[n..], orient)?;
                let (qb, pb) = self.to_cartesian(&zm[..n], &zm[n..], orient)?;
                let g: Vec<f64> = qa.iter().chain(&pa).zip(qb.iter().chain(&pb)).map(|(a, b)| (a - b) / (2.0 * step)).collect();
                grads.push(g);
            }
            let bracket = |a: usize, b: usize| (0..n).map(|k| grads[k][a] * grads[n + k][b] - grads[n + k][a] * grads[k][b]).sum::<f64>();
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((bracket(i, n + j) - want).abs());
                    worst = worst.max(bracket(i, j).abs()).max(bracket(n + i, n + j).abs());
                }
            }
        }
        Ok(worst)
    }
}
