//! Seeded random inputs for the verification suites.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gauss::{ExpBuilder, PGFun};
use crate::heisenberg::GroupElement;
use crate::poly::{MultiIndex, Poly};
use crate::spaces::{s_h_apply, t_apply, FockState, HState, SchrodingerState};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(r: &mut Rng64, s: f64) -> C64 {
    C64::new(r.gen_range(-s..s), r.gen_range(-s..s))
}

pub fn group(r: &mut Rng64, n: usize, s: f64) -> GroupElement {
    GroupElement::new(
        r.gen_range(-s..s),
        (0..n).map(|_| r.gen_range(-s..s)).collect(),
        (0..n).map(|_| r.gen_range(-s..s)).collect(),
    )
    .expect("matching dimensions")
}

/// Sum of `blocks` polynomial × Gaussian terms. The real part of every
/// quadratic form has smallest eigenvalue at least 0.8 − 0.2(dim − 1).
pub fn pgfun(r: &mut Rng64, dim: usize, max_deg: u32, blocks: usize) -> PGFun {
    let mut f = PGFun::zero(dim);
    for _ in 0..blocks {
        let mut e = ExpBuilder::new(dim);
        for i in 0..dim {
            e = e.quad(i, i, C64::new(-r.gen_range(0.8..1.6), r.gen_range(-0.5..0.5)));
            for j in 0..i {
                e = e.quad(i, j, C64::new(r.gen_range(-0.2..0.2), r.gen_range(-0.3..0.3)));
            }
            e = e.lin(i, complex(r, 0.8));
        }
        let mut p = Poly::zero(dim);
        for _ in 0..r.gen_range(1..4) {
            let mut mono = vec![0u32; dim];
            for _ in 0..r.gen_range(0..=max_deg) {
                mono[r.gen_range(0..dim)] += 1;
            }
            p.add_term(MultiIndex(mono), complex(r, 1.0));
        }
        f = f.add(&e.fun_with(p)).expect("same dimension");
    }
    f
}

pub fn schrodinger(r: &mut Rng64, h: f64, n: usize) -> SchrodingerState {
    SchrodingerState { h, psi: pgfun(r, n, 2, 2) }
}

pub fn fock(r: &mut Rng64, h: f64, n: usize) -> crate::error::Result<FockState> {
    t_apply(&schrodinger(r, h, n))
}

pub fn hstate(r: &mut Rng64, h: f64, n: usize) -> crate::error::Result<HState> {
    s_h_apply(&fock(r, h, n)?)
}

pub fn points(r: &mut Rng64, dim: usize, count: usize, s: f64) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..dim).map(|_| r.gen_range(-s..s)).collect()).collect()
}

/// max |f − g| / max |f| over the points.
pub fn rel_gap(f: &PGFun, g: &PGFun, pts: &[Vec<f64>]) -> f64 {
    let scale = pts.iter().map(|p| f.eval(p).norm()).fold(1e-300, f64::max);
    pts.iter().map(|p| (f.eval(p) - g.eval(p)).norm()).fold(0.0, f64::max) / scale
}
