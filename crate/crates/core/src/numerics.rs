//! Quadrature and ODE oracles used to check the closed-form machinery.

use num_complex::Complex64 as C64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod panel with the QUADPACK error estimate
/// resasc·min(1, (200|K − G|/resasc)^{3/2}).
fn gk15<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut vals = [(C64::default(), C64::default()); 7];
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        vals[j] = (f(c - x), f(c + x));
        let s = vals[j].0 + vals[j].1;
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    let mean = k * 0.5;
    let mut asc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        asc += WGK[j] * ((vals[j].0 - mean).norm() + (vals[j].1 - mean).norm());
    }
    let (asc, diff) = (asc * h.abs(), ((k - g) * h).norm());
    let err = if asc > 0.0 && diff > 0.0 { asc * (200.0 * diff / asc).powf(1.5).min(1.0) } else { diff };
    (k * h, err.max(50.0 * f64::EPSILON * (k * h).norm()))
}

/// Adaptive Gauss–Kronrod (7/15) integral of a complex function on [a, b].
pub fn integrate<F: FnMut(f64) -> C64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> C64 {
    integrate_panels(f, a, b, 8, abs_tol, rel_tol)
}

/// As [`integrate`], starting from `n0` equal panels before bisecting.
pub fn integrate_panels<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, n0: usize, abs_tol: f64, rel_tol: f64) -> C64 {
    let mut pieces: Vec<(f64, f64, C64, f64)> = Vec::new();
    let n0 = n0.max(1);
    let w = (b - a) / n0 as f64;
    for i in 0..n0 {
        let (lo, hi) = (a + w * i as f64, a + w * (i + 1) as f64);
        let (v, e) = gk15(&mut f, lo, hi);
        pieces.push((lo, hi, v, e));
    }
    for _ in 0..2000 {
        let total: C64 = pieces.iter().map(|p| p.2).sum();
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.norm()) {
            break;
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (lo, hi, _, _) = pieces.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
    pieces.iter().map(|p| p.2).sum()
}

/// Nested adaptive quadrature over a box.
pub fn integrate_box<F: Fn(&[f64]) -> C64>(f: &F, lo: &[f64], hi: &[f64], abs_tol: f64, rel_tol: f64) -> C64 {
    fn rec<F: Fn(&[f64]) -> C64>(f: &F, lo: &[f64], hi: &[f64], x: &mut Vec<f64>, at: f64, rt: f64) -> C64 {
        let d = x.len();
        if d == lo.len() {
            return f(x);
        }
        integrate_panels(
            |t| {
                x.push(t);
                let v = rec(f, lo, hi, x, at, rt);
                x.pop();
                v
            },
            lo[d],
            hi[d],
            4,
            at,
            rt,
        )
    }
    let mut x = Vec::with_capacity(lo.len());
    rec(f, lo, hi, &mut x, abs_tol, rel_tol)
}

/// Trapezoid rule on [a, b], halving the step until two successive sums
/// agree. Converges spectrally for analytic integrands that are negligible
/// at both ends, such as polynomial × Gaussian on a wide enough interval.
pub fn integrate_decaying<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> C64 {
    let mut n = 16usize;
    let mut step = (b - a) / n as f64;
    let mut sum = (f(a) + f(b)) * 0.5 + (1..n).map(|i| f(a + step * i as f64)).sum::<C64>();
    let mut est = sum * step;
    while n < 1 << 20 {
        sum += (0..n).map(|i| f(a + step * (i as f64 + 0.5))).sum::<C64>();
        n *= 2;
        step *= 0.5;
        let next = sum * step;
        if (next - est).norm() <= abs_tol.max(rel_tol * next.norm()) {
            return next;
        }
        est = next;
    }
    est
}

/// Nested [`integrate_decaying`] over a box.
pub fn integrate_box_decaying<F: Fn(&[f64]) -> C64>(f: &F, lo: &[f64], hi: &[f64], abs_tol: f64, rel_tol: f64) -> C64 {
    fn rec<F: Fn(&[f64]) -> C64>(f: &F, lo: &[f64], hi: &[f64], x: &mut Vec<f64>, at: f64, rt: f64) -> C64 {
        let d = x.len();
        if d == lo.len() {
            return f(x);
        }
        integrate_decaying(
            |t| {
                x.push(t);
                let v = rec(f, lo, hi, x, at, rt);
                x.pop();
                v
            },
            lo[d],
            hi[d],
            at,
            rt,
        )
    }
    let mut x = Vec::with_capacity(lo.len());
    rec(f, lo, hi, &mut x, abs_tol, rel_tol)
}

/// Composite Simpson rule on a tensor grid; cheap
/// fallback for smooth, rapidly decaying integrands in 4+ dimensions.
pub fn integrate_grid<F: Fn(&[f64]) -> C64>(f: &F, lo: &[f64], hi: &[f64], n: usize) -> C64 {
    let d = lo.len();
    let n = if n % 2 == 0 { n } else { n + 1 };
    let hs: Vec<f64> = (0..d).map(|k| (hi[k] - lo[k]) / n as f64).collect();
    let mut idx = vec![0usize; d];
    let mut total = C64::default();
    let mut x = vec![0.0; d];
    loop {
        let mut w = 1.0;
        for k in 0..d {
            x[k] = lo[k] + hs[k] * idx[k] as f64;
            let wk = if idx[k] == 0 || idx[k] == n {
                1.0
            } else if idx[k] % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w *= wk * hs[k] / 3.0;
        }
        total += f(&x) * w;
        let mut k = 0;
        loop {
            if k == d {
                return total;
            }
            idx[k] += 1;
            if idx[k] <= n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Classical fourth-order Runge–Kutta for y′ = f(t, y).
pub fn rk4<F: Fn(f64, &[f64]) -> Vec<f64>>(f: F, y0: &[f64], t0: f64, t1: f64, steps: usize) -> Vec<f64> {
    let h = (t1 - t0) / steps as f64;
    let mut y = y0.to_vec();
    let mut t = t0;
    let axpy = |y: &[f64], k: &[f64], s: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    for _ in 0..steps {
        let k1 = f(t, &y);
        let k2 = f(t + h / 2.0, &axpy(&y, &k1, h / 2.0));
        let k3 = f(t + h / 2.0, &axpy(&y, &k2, h / 2.0));
        let k4 = f(t + h, &axpy(&y, &k3, h));
        for i in 0..y.len() {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += h;
    }
    y
}

/// Gauss–Legendre nodes and weights on [−1, 1] (Newton iteration on Pₙ).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix (Sturm count).
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..diag.len() {
        let o2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = diag[i] - x - if i == 0 { 0.0 } else { o2 / d };
        if d == 0.0 {
            d = -f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `count` smallest eigenvalues of a symmetric tridiagonal matrix with
/// diagonal `diag` and off-diagonal `off`, by Sturm bisection.
pub fn tridiagonal_lowest_eigenvalues(diag: &[f64], off: &[f64], count: usize) -> Vec<f64> {
    assert_eq!(off.len() + 1, diag.len());
    let n = diag.len();
    // Gershgorin bounds
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (0..count.min(n))
        .map(|k| {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if sturm_count(diag, off, mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Central difference of a complex function along one coordinate.
pub fn central_diff<F: Fn(&[f64]) -> C64>(f: &F, x: &[f64], k: usize, step: f64) -> C64 {
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    xp[k] += step;
    xm[k] -= step;
    (f(&xp) - f(&xm)) / (2.0 * step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_integral() {
        let v = integrate(|x| C64::new((-x * x).exp(), 0.0), -10.0, 10.0, 1e-14, 1e-13);
        assert!((v.re - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rk4_exponential() {
        let y = rk4(|_, y| vec![y[0]], &[1.0], 0.0, 1.0, 100);
        assert!((y[0] - 1f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn simpson_grid_2d() {
        let v = integrate_grid(&|x: &[f64]| C64::new((-x[0] * x[0] - x[1] * x[1]).exp(), 0.0), &[-8.0, -8.0], &[8.0, 8.0], 200);
        assert!((v.re - std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn decaying_trapezoid_matches_gaussian_integrals() {
        // ∫ x² e^{−x² + ix} dx = √π (1/2 − 1/4) e^{−1/4}
        let f = |x: f64| C64::new(-x * x, x).exp() * (x * x);
        let want = std::f64::consts::PI.sqrt() * 0.25 * (-0.25f64).exp();
        assert!((integrate_decaying(f, -12.0, 12.0, 1e-15, 1e-13) - want).norm() < 1e-14);
        let g = |x: &[f64]| C64::new(-(x[0] * x[0] + x[1] * x[1] - x[0] * x[1]), 0.0).exp();
        let want2 = 2.0 * std::f64::consts::PI / 3.0f64.sqrt();
        let got = integrate_box_decaying(&g, &[-12.0; 2], &[12.0; 2], 1e-15, 1e-13).re;
        assert!((got - want2).abs() < 1e-11, "{got} {want2}");
    }

    #[test]
    fn sturm_bisection_on_laplacian() {
        // −u″ on (0, π) with n interior points: λ_k = (2 − 2cos(kπ/(n+1)))/h²
        let n = 50;
        let h = std::f64::consts::PI / (n + 1) as f64;
        let ev = tridiagonal_lowest_eigenvalues(&vec![2.0 / (h * h); n], &vec![-1.0 / (h * h); n - 1], 3);
        for (k, e) in ev.iter().enumerate() {
            let want = (2.0 - 2.0 * ((k + 1) as f64 * h).cos()) / (h * h);
            assert!((e - want).abs() < 1e-10 * want);
        }
    }
}
