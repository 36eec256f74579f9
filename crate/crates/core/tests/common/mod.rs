#![allow(dead_code)]

use num_complex::Complex64 as C64;
use pmech::gauss::{ExpBuilder, PGFun};
use pmech::heisenberg::GroupElement;
use pmech::poly::Poly;
use pmech::spaces::{s_h_apply, t_apply, FockState, HState, SchrodingerState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cr(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn rc(r: &mut ChaCha8Rng, s: f64) -> C64 {
    C64::new(r.gen_range(-s..s), r.gen_range(-s..s))
}

pub fn group(r: &mut ChaCha8Rng, n: usize, s: f64) -> GroupElement {
    GroupElement::new(
        r.gen_range(-s..s),
        (0..n).map(|_| r.gen_range(-s..s)).collect(),
        (0..n).map(|_| r.gen_range(-s..s)).collect(),
    )
    .unwrap()
}

/// Random polynomial × Gaussian over `dim` variables with Re A comfortably positive definite.
pub fn random_pg(r: &mut ChaCha8Rng, dim: usize, max_deg: u32, blocks: usize) -> PGFun {
    let mut f = PGFun::zero(dim);
    for _ in 0..blocks {
        let mut e = ExpBuilder::new(dim);
        for i in 0..dim {
            e = e.quad(i, i, C64::new(-r.gen_range(0.6..1.6), r.gen_range(-0.5..0.5)));
            for j in 0..i {
                e = e.quad(i, j, C64::new(r.gen_range(-0.3..0.3), r.gen_range(-0.3..0.3)));
            }
            e = e.lin(i, rc(r, 0.8));
        }
        let mut p = Poly::zero(dim);
        let nterms = r.gen_range(1..4);
        for _ in 0..nterms {
            let mut mono = vec![0u32; dim];
            let mut left = r.gen_range(0..=max_deg);
            while left > 0 {
                mono[r.gen_range(0..dim)] += 1;
                left -= 1;
            }
            p.add_term(pmech::poly::MultiIndex(mono), rc(r, 1.0));
        }
        f = f.add(&e.fun_with(p)).unwrap();
    }
    f
}

pub fn random_schrodinger(r: &mut ChaCha8Rng, h: f64, n: usize) -> SchrodingerState {
    SchrodingerState { h, psi: random_pg(r, n, 2, 2) }
}

pub fn random_fock(r: &mut ChaCha8Rng, h: f64, n: usize) -> FockState {
    t_apply(&random_schrodinger(r, h, n)).unwrap()
}

pub fn random_hstate(r: &mut ChaCha8Rng, h: f64, n: usize) -> HState {
    s_h_apply(&random_fock(r, h, n)).unwrap()
}

pub fn points(r: &mut ChaCha8Rng, dim: usize, count: usize, s: f64) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..dim).map(|_| r.gen_range(-s..s)).collect()).collect()
}

/// max |f − g| / max |f| over points.
pub fn rel_gap(f: &PGFun, g: &PGFun, pts: &[Vec<f64>]) -> f64 {
    let scale = pts.iter().map(|p| f.eval(p).norm()).fold(1e-300, f64::max);
    pts.iter().map(|p| (f.eval(p) - g.eval(p)).norm()).fold(0.0, f64::max) / scale
}
