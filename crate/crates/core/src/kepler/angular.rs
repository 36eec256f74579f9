//! Represented angular momentum L_i = (h/2πi)(ξ_j∂_k − ξ_k∂_j), (i, j, k)
//! cyclic, acting exactly on polynomials in (ξ₁, ξ₂, ξ₃).

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::poly::Poly;

pub fn angular_momentum_apply(i: usize, h: f64, f: &Poly) -> Result<Poly> {
    if f.dim() != 3 || i > 2 {
        return Err(Error::Invalid(format!("L_{} on a {}-variable polynomial", i + 1, f.dim())));
    }
    let (j, k) = ((i + 1) % 3, (i + 2) % 3);
    let rot = Poly::var(3, j).mul(&f.diff(k)).sub(&Poly::var(3, k).mul(&f.diff(j)));
    Ok(rot.scale(C64::new(0.0, -h / (2.0 * PI))))
}

/// max over the three cyclic relations of |[L_i, L_j]f − (ih/2π)L_k f|, coefficient-wise.
pub fn angular_commutator_defect(h: f64, f: &Poly) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let lij = angular_momentum_apply(i, h, &angular_momentum_apply(j, h, f)?)?;
        let lji = angular_momentum_apply(j, h, &angular_momentum_apply(i, h, f)?)?;
        let rhs = angular_momentum_apply(k, h, f)?.scale(C64::new(0.0, h / (2.0 * PI)));
        worst = worst.max(lij.sub(&lji).max_diff(&rhs));
    }
    Ok(worst)
}

/// (ξ₁ + iξ₂)^m, proportional to r^m Y_m^m; an L₃ eigenvector with eigenvalue mh/2π.
pub fn sectoral_polynomial(m: u32) -> Poly {
    Poly::var(3, 0).add(&Poly::var(3, 1).scale(C64::new(0.0, 1.0))).pow(m)
}
