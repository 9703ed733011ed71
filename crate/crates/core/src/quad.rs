//! Quadrature rules: panelled adaptive Gauss–Kronrod (7/15) for vector-valued
//! complex integrands, and Gauss–Legendre / Gauss–Hermite node sets.

use num_complex::Complex64;

use crate::error::{Error, Result};

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
// Gauss 7-point weights, paired with the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Maximum bisection depth below the initial panel partition.
pub const MAX_DEPTH: u32 = 16;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// One Gauss–Kronrod 15-point panel on [a, b]: (Kronrod estimate, |Kronrod − Gauss|).
pub fn gk15<const N: usize, F>(f: &F, a: f64, b: f64) -> ([Complex64; N], f64)
where
    F: Fn(f64) -> [Complex64; N],
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = [ZERO; N];
    let mut gauss = [ZERO; N];
    let center = f(c);
    for k in 0..N {
        kron[k] = center[k] * WGK[7];
        gauss[k] = center[k] * WG[3];
    }
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let lo = f(c - h * x);
        let hi = f(c + h * x);
        for k in 0..N {
            let s = lo[k] + hi[k];
            kron[k] += s * w;
            if j % 2 == 1 {
                gauss[k] += s * WG[j / 2];
            }
        }
    }
    let mut err: f64 = 0.0;
    for k in 0..N {
        kron[k] *= h;
        gauss[k] *= h;
        err = err.max((kron[k] - gauss[k]).norm());
    }
    (kron, err)
}

/// Adaptive integration over [a, b].
///
/// The interval is first cut into equal panels no longer than `max_panel`
/// (callers size this from the fastest phase in the integrand); panels whose
/// error estimate exceeds their share of `abs_tol` are bisected.
pub fn integrate<const N: usize, F>(f: &F, a: f64, b: f64, max_panel: f64, abs_tol: f64) -> Result<[Complex64; N]>
where
    F: Fn(f64) -> [Complex64; N],
{
    let mut total = [ZERO; N];
    if b <= a {
        return Ok(total);
    }
    let n = ((b - a) / max_panel).ceil().max(1.0) as usize;
    let width = (b - a) / n as f64;
    for i in 0..n {
        let lo = a + width * i as f64;
        let hi = if i + 1 == n { b } else { lo + width };
        let part = adapt(f, lo, hi, abs_tol * (hi - lo) / (b - a), 0)?;
        for k in 0..N {
            total[k] += part[k];
        }
    }
    Ok(total)
}

fn adapt<const N: usize, F>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Result<[Complex64; N]>
where
    F: Fn(f64) -> [Complex64; N],
{
    let (val, err) = gk15(f, a, b);
    if !err.is_finite() {
        return Err(Error::Quadrature { lo: a, hi: b, err });
    }
    if err <= tol {
        return Ok(val);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Quadrature { lo: a, hi: b, err });
    }
    let m = 0.5 * (a + b);
    let left = adapt(f, a, m, 0.5 * tol, depth + 1)?;
    let right = adapt(f, m, b, 0.5 * tol, depth + 1)?;
    let mut out = left;
    for k in 0..N {
        out[k] += right[k];
    }
    Ok(out)
}

/// Legendre P_n(x) and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre nodes and weights on [−1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss–Legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * d * d);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Physicists' Gauss–Hermite rule for ∫ e^{−x²} φ(x) dx, nodes ascending.
///
/// Uses orthonormal Hermite functions in the recurrence so that large n does
/// not overflow.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss–Hermite needs at least one node");
    let pi_m4 = std::f64::consts::PI.powf(-0.25);
    let eval = |x: f64| -> (f64, f64) {
        // normalized: H̃_0 = π^{-1/4}, H̃_1 = √2 x H̃_0
        let mut p0 = 0.0;
        let mut p1 = pi_m4;
        for j in 1..=n {
            let jf = j as f64;
            let p2 = x * (2.0 / jf).sqrt() * p1 - ((jf - 1.0) / jf).sqrt() * p0;
            p0 = p1;
            p1 = p2;
        }
        (p1, (2.0 * n as f64).sqrt() * p0)
    };
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..n.div_ceil(2) {
        // initial guesses (descending roots) after Numerical Recipes `gauher`
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[n - 1],
            3 => 1.91 * z - 0.91 * nodes[n - 2],
            _ => 2.0 * z - nodes[n - i + 1],
        };
        for _ in 0..100 {
            let (p, d) = eval(z);
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let dp = eval(z).1;
        let w = 2.0 / (dp * dp);
        nodes[n - 1 - i] = z;
        nodes[i] = -z;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}
