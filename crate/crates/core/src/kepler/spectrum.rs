//! Coulomb bound states: closed-form eigenfunctions and a finite-difference
//! spectrum for the attractive potential −1/r with kinetic term −(h²/8π²)∇².

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::special::{confluent_f1, factorial, sph_harmonic};
use crate::error::{Error, Result};
use crate::numerics::tridiagonal_lowest_eigenvalues;

/// n ≥ 1, 0 ≤ l ≤ n−1, |m| ≤ l.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct QuantumNumbers {
    pub n: u32,
    pub l: u32,
    pub m: i32,
}

impl QuantumNumbers {
    pub fn new(n: u32, l: u32, m: i32) -> Result<Self> {
        if n == 0 || l >= n || m.unsigned_abs() > l {
            return Err(Error::Invalid(format!("need n ≥ 1, l < n, |m| ≤ l; got ({n}, {l}, {m})")));
        }
        Ok(QuantumNumbers { n, l, m })
    }

    /// All states of level n, l ascending then m ascending; n² of them.
    pub fn level(n: u32) -> Vec<QuantumNumbers> {
        (0..n).flat_map(|l| (-(l as i32)..=l as i32).map(move |m| QuantumNumbers { n, l, m })).collect()
    }
}

/// Decay constant of the radial part. `Derived` is the value that makes the
/// closed form an eigenfunction of −(h²/8π²)∇² − 1/r; `Printed` is 2π/(nh²).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KappaConvention {
    #[default]
    Derived,
    Printed,
}

pub fn kappa(n: u32, h: f64, conv: KappaConvention) -> f64 {
    match conv {
        KappaConvention::Derived => 4.0 * PI * PI / (f64::from(n) * h * h),
        KappaConvention::Printed => 2.0 * PI / (f64::from(n) * h * h),
    }
}

/// E_n = −2π²/(h²n²); at h = 2π this is the atomic-units −1/(2n²).
pub fn energy(n: u32, h: f64) -> f64 {
    -2.0 * PI * PI / (h * h * f64::from(n * n))
}

/// The quoted law −ω/n² with ω = 4π²/h².
pub fn energy_printed(n: u32, h: f64) -> f64 {
    -4.0 * PI * PI / (h * h * f64::from(n * n))
}

/// Energy paired with each κ convention (E = −(h²/8π²)κ² for the derived one).
pub fn energy_for(n: u32, h: f64, conv: KappaConvention) -> f64 {
    match conv {
        KappaConvention::Derived => energy(n, h),
        KappaConvention::Printed => energy_printed(n, h),
    }
}

/// e^{−κr}(2κr)ˡ/(2l+1)! · [(2κ)³(n+l)!/(2n(n−l−1)!)]^{1/2} · F₁(−n+l+1; 2l+2; 2κr)
pub fn coulomb_radial(qn: QuantumNumbers, h: f64, r: f64, conv: KappaConvention) -> Result<f64> {
    let QuantumNumbers { n, l, .. } = qn;
    let k = kappa(n, h, conv);
    let z = 2.0 * k * r;
    let norm = ((2.0 * k).powi(3) * factorial(n + l) / (2.0 * f64::from(n) * factorial(n - l - 1))).sqrt();
    let f1 = confluent_f1(-(n as i32) + l as i32 + 1, 2 * l + 2, z)?;
    Ok((-k * r).exp() * z.powi(l as i32) / factorial(2 * l + 1) * norm * f1)
}

/// ψ_{(n,l,m)} at a point given by radius, polar and azimuthal angle.
pub fn coulomb_eigenfunction_at(qn: QuantumNumbers, h: f64, r: f64, polar: f64, azimuth: f64, conv: KappaConvention) -> Result<C64> {
    Ok(sph_harmonic(qn.l, qn.m, polar, azimuth)? * coulomb_radial(qn, h, r, conv)?)
}

/// Uniform grid r_i = i·r_max/N, i = 0..N, Dirichlet at both ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialGrid {
    pub r_max: f64,
    pub n: usize,
}

impl RadialGrid {
    pub fn new(r_max: f64, n: usize) -> Result<Self> {
        if !(r_max > 0.0) || n < 4 {
            return Err(Error::Invalid(format!("radial grid needs r_max > 0 and N ≥ 4, got {r_max}, {n}")));
        }
        Ok(RadialGrid { r_max, n })
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / self.n as f64
    }

    pub fn interior(&self) -> Vec<f64> {
        (1..self.n).map(|i| i as f64 * self.spacing()).collect()
    }

    pub fn refined(&self) -> RadialGrid {
        RadialGrid { r_max: self.r_max, n: 2 * self.n }
    }
}

/// Radial samples of an eigenfunction on the grid nodes r_0..r_N.
#[derive(Clone, Debug)]
pub struct SampledEigenfunction {
    pub qn: QuantumNumbers,
    pub r: Vec<f64>,
    pub radial: Vec<f64>,
}

impl SampledEigenfunction {
    /// Full value: radial sample i times Y_l^m.
    pub fn at(&self, i: usize, polar: f64, azimuth: f64) -> Result<C64> {
        Ok(sph_harmonic(self.qn.l, self.qn.m, polar, azimuth)? * self.radial[i])
    }

    /// ⟨self, other⟩ under r² dr dΩ: trapezoid in r, exact orthonormality of Y in angle.
    pub fn inner(&self, other: &SampledEigenfunction) -> Result<f64> {
        if self.r.len() != other.r.len() {
            return Err(Error::Dim { expected: self.r.len(), got: other.r.len() });
        }
        if (self.qn.l, self.qn.m) != (other.qn.l, other.qn.m) {
            return Ok(0.0);
        }
        let dr = self.r[1] - self.r[0];
        let f = |i: usize| self.radial[i] * other.radial[i] * self.r[i] * self.r[i];
        let last = self.r.len() - 1;
        Ok(dr * ((1..last).map(f).sum::<f64>() + 0.5 * (f(0) + f(last))))
    }
}

pub fn coulomb_eigenfunction(qn: QuantumNumbers, h: f64, grid: &RadialGrid, conv: KappaConvention) -> Result<SampledEigenfunction> {
    let r: Vec<f64> = (0..=grid.n).map(|i| i as f64 * grid.spacing()).collect();
    let radial = r.iter().map(|&x| coulomb_radial(qn, h, x, conv)).collect::<Result<_>>()?;
    Ok(SampledEigenfunction { qn, r, radial })
}

/// Symmetric tridiagonal matrix.
#[derive(Clone, Debug)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * u[i];
                if i > 0 {
                    v += self.off[i - 1] * u[i - 1];
                }
                if i + 1 < n {
                    v += self.off[i] * u[i + 1];
                }
                v
            })
            .collect()
    }

    pub fn lowest(&self, count: usize) -> Vec<f64> {
        tridiagonal_lowest_eigenvalues(&self.diag, &self.off, count)
    }
}

/// −(h²/8π²)(u″ − l(l+1)u/r²) − u/r on u = rR, central differences.
pub fn coulomb_hamiltonian_fd(l: u32, h: f64, grid: &RadialGrid) -> Tridiagonal {
    let c = h * h / (8.0 * PI * PI);
    let d2 = grid.spacing().powi(2);
    let ll = f64::from(l * (l + 1));
    let diag = grid.interior().iter().map(|&r| c * (2.0 / d2 + ll / (r * r)) - 1.0 / r).collect();
    let off = vec![-c / d2; grid.n - 2];
    Tridiagonal { diag, off }
}

#[derive(Clone, Debug)]
pub struct FdSpectrum {
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    /// (4E_{2N} − E_N)/3
    pub extrapolated: Vec<f64>,
}

/// Lowest `count` radial eigenvalues at N and 2N; fails when they disagree
/// by more than 1e−3 relative.
pub fn fd_spectrum(l: u32, h: f64, grid: &RadialGrid, count: usize) -> Result<FdSpectrum> {
    let coarse = coulomb_hamiltonian_fd(l, h, grid).lowest(count);
    let fine = coulomb_hamiltonian_fd(l, h, &grid.refined()).lowest(count);
    for (k, (a, b)) in coarse.iter().zip(&fine).enumerate() {
        let rel = (a - b).abs() / b.abs();
        if rel > 1e-3 {
            return Err(Error::Convergence(format!("l = {l}, eigenvalue {k}: N and 2N differ by {rel:.2e}")));
        }
    }
    let extrapolated = coarse.iter().zip(&fine).map(|(a, b)| (4.0 * b - a) / 3.0).collect();
    Ok(FdSpectrum { coarse, fine, extrapolated })
}

/// ‖H u − E u‖/‖E u‖ for the sampled eigenfunction, u = rR on interior nodes.
pub fn eigen_residual(qn: QuantumNumbers, h: f64, grid: &RadialGrid, conv: KappaConvention) -> Result<f64> {
    let op = coulomb_hamiltonian_fd(qn.l, h, grid);
    let u: Vec<f64> = grid.interior().iter().map(|&r| Ok(r * coulomb_radial(qn, h, r, conv)?)).collect::<Result<_>>()?;
    let hu = op.apply(&u);
    let e = energy_for(qn.n, h, conv);
    let num: f64 = hu.iter().zip(&u).map(|(a, b)| (a - e * b).powi(2)).sum();
    let den: f64 = u.iter().map(|b| (e * b).powi(2)).sum();
    Ok((num / den).sqrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumRow {
    pub n: u32,
    pub l: u32,
    pub e_fd: f64,
    pub e_extrapolated: f64,
    /// −ω/n² with the quoted ω = 4π²/h²
    pub e_formula: f64,
    pub rel_discrepancy: f64,
}

/// One row per (n, l) with n ≤ n_max, compared against −(4π²/h²)/n².
pub fn spectrum_report(n_max: u32, h: f64, grid: &RadialGrid) -> Result<Vec<SpectrumRow>> {
    let mut rows = Vec::new();
    for l in 0..n_max {
        let spec = fd_spectrum(l, h, grid, (n_max - l) as usize)?;
        for k in 0..(n_max - l) {
            let n = k + l + 1;
            let e = spec.extrapolated[k as usize];
            let quoted = energy_printed(n, h);
            rows.push(SpectrumRow {
                n,
                l,
                e_fd: spec.coarse[k as usize],
                e_extrapolated: e,
                e_formula: quoted,
                rel_discrepancy: (e - quoted).abs() / quoted.abs(),
            });
        }
    }
    rows.sort_by_key(|r| (r.n, r.l));
    Ok(rows)
}

/// Measured against printed spectral constants.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantsDiscrepancy {
    pub h: f64,
    pub omega_printed: f64,
    /// −n²E_n from the extrapolated ground state
    pub omega_measured: f64,
    pub kappa1_printed: f64,
    /// √(−8π²E₁/h²)
    pub kappa1_measured: f64,
}

pub fn constants_discrepancy(h: f64, grid: &RadialGrid) -> Result<ConstantsDiscrepancy> {
    let e1 = fd_spectrum(0, h, grid, 1)?.extrapolated[0];
    Ok(ConstantsDiscrepancy {
        h,
        omega_printed: 4.0 * PI * PI / (h * h),
        omega_measured: -e1,
        kappa1_printed: kappa(1, h, KappaConvention::Printed),
        kappa1_measured: (-8.0 * PI * PI * e1 / (h * h)).sqrt(),
    })
}
