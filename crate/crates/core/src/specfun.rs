//! Complex log-Gamma and the Gauss hypergeometric function ₂F₁(a, b; c; u)
//! for complex parameters and real argument u ≤ 0.
//!
//! ₂F₁ is evaluated by one of three routes depending on |u|:
//!
//! | region          | route                                              |
//! |-----------------|----------------------------------------------------|
//! | \|u\| ≤ 0.5     | direct power series                                |
//! | 0.5 < \|u\| ≤ 2 | Pfaff: (1−u)^(−a) ₂F₁(a, c−b; c; u/(u−1))          |
//! | \|u\| > 2       | connection formula in 1/u (Gamma-ratio weighted)   |
//!
//! Terminating series (a or b a non-positive integer) are summed directly
//! for every u.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LN_PI: f64 = 1.144_729_885_849_400_2;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Maximum number of series terms per evaluation.
pub const MAX_TERMS: usize = 10_000;
/// Per-term relative stopping tolerance.
pub const SERIES_TOL: f64 = 1e-15;
/// Distance to a singular configuration treated as exact degeneracy.
pub const DEGENERACY_TOL: f64 = 1e-12;
/// Size of the perturbation applied to a degenerate parameter.
pub const DEGENERACY_SHIFT: f64 = 1e-9;

const PFAFF_THRESHOLD: f64 = 0.5;
const CONNECTION_THRESHOLD: f64 = 2.0;
/// When a − b is an integer the connection formula needs a perturbed b and
/// loses about nine digits; the Pfaff series still converges within
/// [`MAX_TERMS`] out to this |u|, so it is preferred there.
pub const DEGENERATE_PFAFF_LIMIT: f64 = 200.0;

// B_{2k} / (2k (2k-1)) for k = 1..=8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];
const STIRLING_MIN_NORM: f64 = 16.0;

fn nonpositive_integer(z: Complex64, tol: f64) -> Option<i64> {
    if z.im.abs() > tol || z.re > tol {
        return None;
    }
    let n = z.re.round();
    ((z.re - n).abs() <= tol).then_some(n as i64)
}

fn stirling(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        corr += pow * c;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + corr
}

/// sin(πz) with the real part reduced exactly, so zeros at the integers stay sharp.
fn sin_pi(z: Complex64) -> Complex64 {
    let n = z.re.round();
    let r = Complex64::new(z.re - n, z.im);
    let s = (r * PI).sin();
    if n.rem_euclid(2.0) == 0.0 {
        s
    } else {
        -s
    }
}

/// Principal log of sin(πz), stable for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() <= 1.0 {
        return sin_pi(z).ln();
    }
    // sin(πz) = (i s/2) e^{−isπz} (1 − e^{2isπz}) with s = sign(Im z); the growing
    // exponential is factored out.
    let s = z.im.signum();
    let small = (Complex64::new(0.0, 2.0 * s * PI) * z).exp();
    let rest = Complex64::new(1.0, 0.0) - small;
    let modulus = s * PI * z.im + rest.norm().ln() - std::f64::consts::LN_2;
    let mut arg = -s * PI * z.re + rest.arg() + s * PI / 2.0;
    arg = (arg + PI).rem_euclid(2.0 * PI) - PI;
    if arg <= -PI {
        arg += 2.0 * PI;
    }
    Complex64::new(modulus, arg)
}

/// Principal branch of log Γ(z).
///
/// Uses the Stirling series for |z| ≥ 16, upward recurrence below that, and
/// the reflection formula for Re z < 0.1 (with the 2πi branch correction that
/// keeps the imaginary part continuous off the negative real axis).
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidParameter(format!("ln_gamma of non-finite {z}")));
    }
    if nonpositive_integer(z, 0.0).is_some() {
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    if z.im == 0.0 && (z.re == 1.0 || z.re == 2.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if z.re < 0.1 {
        let branch = (2.0 * PI).copysign(z.im) * (0.5 * z.re + 0.25).floor();
        return Ok(Complex64::new(LN_PI, branch) - ln_sin_pi(z) - ln_gamma(Complex64::new(1.0, 0.0) - z)?);
    }
    if z.norm() >= STIRLING_MIN_NORM {
        return Ok(stirling(z));
    }
    // Γ(z) = Γ(z+n) / (z (z+1) ... (z+n-1)); track modulus and argument separately
    // so the argument sum stays on the continuous branch.
    let n = (STIRLING_MIN_NORM - z.re).ceil().max(1.0) as usize;
    let mut prod = Complex64::new(1.0, 0.0);
    let mut arg = 0.0;
    for k in 0..n {
        let w = z + k as f64;
        prod *= w;
        arg += w.arg();
    }
    let shifted = stirling(z + n as f64);
    Ok(Complex64::new(shifted.re - prod.norm().ln(), shifted.im - arg))
}

/// 1/Γ(z) in log form; `None` when z is a pole of Γ (so 1/Γ vanishes).
fn ln_recip_gamma(z: Complex64) -> Result<Option<Complex64>> {
    if nonpositive_integer(z, DEGENERACY_TOL).is_some() {
        return Ok(None);
    }
    Ok(Some(-ln_gamma(z)?))
}

/// Γ(n₁)Γ(n₂) / (Γ(d₁)Γ(d₂)), evaluated through log-Gamma.
///
/// A pole in the denominator makes the ratio vanish; a pole in the numerator
/// is a degenerate configuration and an error.
pub fn gamma_ratio(num: [Complex64; 2], den: [Complex64; 2]) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for d in den {
        match ln_recip_gamma(d)? {
            Some(v) => acc += v,
            None => return Ok(Complex64::new(0.0, 0.0)),
        }
    }
    for n in num {
        if nonpositive_integer(n, DEGENERACY_TOL).is_some() {
            return Err(Error::Degenerate(format!(
                "Gamma pole at {n} in a connection coefficient"
            )));
        }
        acc += ln_gamma(n)?;
    }
    Ok(acc.exp())
}

/// Parameters (a, b, c) of ₂F₁.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyp2F1Params {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl Hyp2F1Params {
    pub fn new(a: Complex64, b: Complex64, c: Complex64) -> Self {
        Self { a, b, c }
    }

    /// (a+1, b+1, c+1), the parameters of the derivative.
    pub fn shifted(&self) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self::new(self.a + one, self.b + one, self.c + one)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c)] {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v} is not finite")));
            }
        }
        if let Some(n) = nonpositive_integer(self.c, DEGENERACY_TOL) {
            return Err(Error::InvalidParameter(format!(
                "c = {} lies on the pole c = {n}",
                self.c
            )));
        }
        Ok(())
    }
}

/// Evaluation route chosen for a given argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Terminating,
    Direct,
    Pfaff,
    Connection,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Branch::Terminating => "terminating",
            Branch::Direct => "direct",
            Branch::Pfaff => "pfaff",
            Branch::Connection => "connection",
        };
        f.write_str(s)
    }
}

fn power_series(a: Complex64, b: Complex64, c: Complex64, z: f64) -> Result<Complex64> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut small_run = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term.norm() <= SERIES_TOL * sum.norm() {
            small_run += 1;
            if small_run >= 2 {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
        if term.norm() == 0.0 {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        what: "hypergeometric series",
        limit: MAX_TERMS,
    })
}

fn terminating_series(a: Complex64, b: Complex64, c: Complex64, degree: u64, u: f64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for n in 0..degree {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * u;
        sum += term;
    }
    sum
}

/// Prepared ₂F₁ evaluator: parameter checks and the Gamma-function weights of
/// the large-|u| connection formula are computed once.
#[derive(Debug, Clone)]
pub struct Hyp2F1 {
    params: Hyp2F1Params,
    terminating: Option<u64>,
    connection: Option<Connection>,
}

#[derive(Debug, Clone)]
struct Connection {
    /// Parameters actually used in the connection branch (b may be perturbed).
    params: Hyp2F1Params,
    perturbed: bool,
    /// Γ(c)Γ(b−a)/(Γ(b)Γ(c−a)) and Γ(c)Γ(a−b)/(Γ(a)Γ(c−b)).
    weights: [Complex64; 2],
}

impl Connection {
    fn new(p: Hyp2F1Params) -> Result<Self> {
        let mut params = p;
        let diff = p.a - p.b;
        let perturbed = diff.im.abs() <= DEGENERACY_TOL && (diff.re - diff.re.round()).abs() <= DEGENERACY_TOL;
        if perturbed {
            warn!("a - b = {diff} is an integer; perturbing b by {DEGENERACY_SHIFT:e}(1+i) for the connection formula");
            params.b += Complex64::new(DEGENERACY_SHIFT, DEGENERACY_SHIFT);
        }
        let Hyp2F1Params { a, b, c } = params;
        let weights = [
            gamma_ratio([c, b - a], [b, c - a])?,
            gamma_ratio([c, a - b], [a, c - b])?,
        ];
        Ok(Self {
            params,
            perturbed,
            weights,
        })
    }

    /// e^{extra·x} ₂F₁(a,b;c;−e^x) for x > ln 2.
    fn eval(&self, x: f64, extra: f64) -> Result<Complex64> {
        let Hyp2F1Params { a, b, c } = self.params;
        let one = Complex64::new(1.0, 0.0);
        let inv_u = -(-x).exp();
        let mut total = Complex64::new(0.0, 0.0);
        for (w, (p, q)) in self.weights.iter().zip([(a, b), (b, a)]) {
            if *w == Complex64::new(0.0, 0.0) {
                continue;
            }
            let s = power_series(p, p - c + one, p - q + one, inv_u)?;
            total += w * ((extra - p) * x).exp() * s;
        }
        Ok(total)
    }
}

impl Hyp2F1 {
    pub fn new(params: Hyp2F1Params) -> Result<Self> {
        params.validate()?;
        let terminating = [params.a, params.b]
            .into_iter()
            .filter_map(|v| nonpositive_integer(v, DEGENERACY_TOL))
            .map(|n| n.unsigned_abs())
            .min();
        let connection = if terminating.is_none() {
            Some(Connection::new(params)?)
        } else {
            None
        };
        Ok(Self {
            params,
            terminating,
            connection,
        })
    }

    pub fn params(&self) -> &Hyp2F1Params {
        &self.params
    }

    /// True when a − b is an integer, so the large-|u| route runs on a perturbed b.
    pub fn is_degenerate(&self) -> bool {
        self.connection.as_ref().is_some_and(|c| c.perturbed)
    }

    /// Route that [`Hyp2F1::eval`] takes for this u.
    pub fn branch(&self, u: f64) -> Branch {
        if self.terminating.is_some() {
            Branch::Terminating
        } else if u.abs() <= PFAFF_THRESHOLD {
            Branch::Direct
        } else if u.abs() <= CONNECTION_THRESHOLD || (self.is_degenerate() && u.abs() <= DEGENERATE_PFAFF_LIMIT) {
            Branch::Pfaff
        } else {
            Branch::Connection
        }
    }

    pub fn eval(&self, u: f64) -> Result<Complex64> {
        self.eval_via(u, self.branch(u))
    }

    /// Evaluates through a specific route, regardless of the default thresholds.
    ///
    /// Routes are only valid where their series converge: `Direct` for
    /// |u| < 1, `Pfaff` for all u ≤ 0, `Connection` for |u| > 1.
    pub fn eval_via(&self, u: f64, branch: Branch) -> Result<Complex64> {
        check_argument(u)?;
        let Hyp2F1Params { a, b, c } = self.params;
        match branch {
            Branch::Terminating => {
                let degree = self
                    .terminating
                    .ok_or_else(|| Error::InvalidParameter("series does not terminate for these parameters".into()))?;
                Ok(terminating_series(a, b, c, degree, u))
            }
            Branch::Direct => {
                if u.abs() >= 1.0 {
                    return Err(Error::InvalidParameter(format!("direct series diverges at u = {u}")));
                }
                power_series(a, b, c, u)
            }
            Branch::Pfaff => {
                let w = u / (u - 1.0);
                Ok(Complex64::new(1.0 - u, 0.0).powc(-a) * power_series(a, c - b, c, w)?)
            }
            Branch::Connection => {
                if u.abs() <= 1.0 {
                    return Err(Error::InvalidParameter(format!(
                        "connection series diverges at u = {u}"
                    )));
                }
                let conn = self
                    .connection
                    .as_ref()
                    .ok_or_else(|| Error::InvalidParameter("terminating series has no connection branch".into()))?;
                conn.eval((-u).ln(), 0.0)
            }
        }
    }

    /// Computes e^{extra·x} · ₂F₁(a, b; c; −e^x) without forming u = −e^x,
    /// so that large x neither overflows nor loses the power-law prefactors.
    pub fn eval_neg_exp(&self, x: f64, extra: f64) -> Result<Complex64> {
        if x.is_nan() {
            return Err(Error::InvalidParameter("argument is NaN".into()));
        }
        let large = x > CONNECTION_THRESHOLD.ln() && !(self.is_degenerate() && x <= DEGENERATE_PFAFF_LIMIT.ln());
        match (&self.connection, large) {
            (Some(conn), true) => conn.eval(x, extra),
            _ => {
                let u = -x.exp();
                Ok(self.eval(u)? * (extra * x).exp())
            }
        }
    }
}

fn check_argument(u: f64) -> Result<()> {
    if !u.is_finite() || u > 0.0 {
        return Err(Error::InvalidParameter(format!(
            "hypergeometric argument must be finite and ≤ 0, got {u}"
        )));
    }
    Ok(())
}

/// ₂F₁(a, b; c; u) for u ≤ 0.
pub fn hyp2f1(p: Hyp2F1Params, u: f64) -> Result<Complex64> {
    Hyp2F1::new(p)?.eval(u)
}

/// d/du ₂F₁(a, b; c; u) = (ab/c) ₂F₁(a+1, b+1; c+1; u).
pub fn hyp2f1_derivative(p: Hyp2F1Params, u: f64) -> Result<Complex64> {
    p.validate()?;
    let scale = p.a * p.b / p.c;
    if scale == Complex64::new(0.0, 0.0) {
        check_argument(u)?;
        return Ok(scale);
    }
    Ok(scale * hyp2f1(p.shifted(), u)?)
}
