//! Two-level atom dressed by a pump whose envelope switches on as a sigmoid
//! of duration T.
//!
//! In the rotating frame the ground/excited amplitudes obey
//!
//! ```text
//! i ḟ = −V(t) e^{iΔt} g,    i ġ = −V(t) e^{−iΔt} f,    V(t) = V₀ / (1 + e^{−t/T})
//! ```
//!
//! with (f, g) → (1, 0) before the switch. With u = −e^{t/T} the solution is
//!
//! ```text
//! f = (1−u)^σ F(a, b; c; u)
//! g = −e^{−iΔt} [ (1−u)^σ F(a, b; c; u) − (1−u)^{σ+1} F(a+1, b+1; c+1; u) ]
//! ```
//!
//! and for t ≫ T each amplitude is a pair of plane waves separated by the
//! generalized Rabi frequency Ω = √(Δ² + 4V₀²).

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{gamma_ratio, Hyp2F1, Hyp2F1Params};

/// Beyond this many switching times [`DressedAtom::amplitudes`] uses the
/// two-term asymptotic form; the neglected terms are O(e^{−30}).
pub const ASYMPTOTIC_FROM: f64 = 30.0;

const CACHE_LIMIT: usize = 4096;

/// Pump parameters. All frequencies are angular (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpParams {
    /// Half-Rabi coupling d₁₂ε₀/ℏ.
    #[serde(rename = "V0")]
    pub v0: f64,
    /// Δ = ω_pump − ω₀.
    pub delta: f64,
    /// Switching time T (s).
    #[serde(rename = "T")]
    pub switch_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_pump: Option<f64>,
    /// Pump field amplitude; only scales [`pump_envelope`].
    #[serde(default = "one")]
    pub eps0: f64,
}

fn one() -> f64 {
    1.0
}

impl PumpParams {
    pub fn new(v0: f64, delta: f64, switch_time: f64) -> Self {
        Self {
            v0,
            delta,
            switch_time,
            omega_pump: None,
            eps0: 1.0,
        }
    }

    /// Generalized Rabi frequency Ω = √(Δ² + 4V₀²).
    pub fn rabi(&self) -> f64 {
        self.delta.hypot(2.0 * self.v0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("pump: {what}")));
        if !(self.switch_time.is_finite() && self.switch_time > 0.0) {
            return bad("T must be positive and finite");
        }
        if !(self.v0.is_finite() && self.v0 >= 0.0) {
            return bad("V0 must be non-negative and finite");
        }
        if !self.delta.is_finite() {
            return bad("delta must be finite");
        }
        if self.rabi() <= 0.0 {
            return bad("delta and V0 cannot both vanish");
        }
        Ok(())
    }

    fn key(&self) -> [u64; 3] {
        [self.v0.to_bits(), self.delta.to_bits(), self.switch_time.to_bits()]
    }
}

/// Ground (f) and excited (g) amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedAmplitudes {
    pub f: Complex64,
    pub g: Complex64,
}

impl DressedAmplitudes {
    /// |f|² + |g|² − 1.
    pub fn norm_defect(&self) -> f64 {
        self.f.norm_sqr() + self.g.norm_sqr() - 1.0
    }
}

/// Gamma-function ratios of the large-t expansion.
///
/// h₁ = Γ(c)Γ(b−a)/(Γ(b)Γ(c−a)), h₂ = Γ(c)Γ(a−b)/(Γ(a)Γ(c−b)),
/// h₃, h₄ the same with (a, b, c) → (a+1, b+1, c+1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConnectionCoefficients {
    pub h1: Complex64,
    pub h2: Complex64,
    pub h3: Complex64,
    pub h4: Complex64,
}

impl ConnectionCoefficients {
    pub fn from_params(p: &Hyp2F1Params) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        let Hyp2F1Params { a, b, c } = *p;
        Ok(Self {
            h1: gamma_ratio([c, b - a], [b, c - a])?,
            h2: gamma_ratio([c, a - b], [a, c - b])?,
            h3: gamma_ratio([c + one, b - a], [b + one, c - a])?,
            h4: gamma_ratio([c + one, a - b], [a + one, c - b])?,
        })
    }
}

/// One plane-wave component `amp · e^{i freq t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wave {
    pub amp: Complex64,
    pub freq: f64,
}

impl Wave {
    pub fn at(&self, t: f64) -> Complex64 {
        self.amp * Complex64::from_polar(1.0, self.freq * t)
    }
}

/// Post-switch spectrum: f ≈ Σ f_waves, g ≈ Σ g_waves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub f: [Wave; 2],
    pub g: [Wave; 2],
}

/// Everything about the dressed atom that depends only on the pump, computed once.
#[derive(Debug, Clone)]
pub struct DressedAtom {
    pump: PumpParams,
    sigma: Complex64,
    params: Hyp2F1Params,
    f0: Hyp2F1,
    f1: Hyp2F1,
    coeffs: ConnectionCoefficients,
    spectrum: Spectrum,
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

impl DressedAtom {
    pub fn new(pump: PumpParams) -> Result<Self> {
        pump.validate()?;
        let (sigma, params) = hyp_params(&pump);
        let f0 = Hyp2F1::new(params)?;
        let f1 = Hyp2F1::new(params.shifted())?;
        let coeffs = ConnectionCoefficients::from_params(&params)?;
        let omega = pump.rabi();
        let (wa, wb) = ((pump.delta - omega) / 2.0, (pump.delta + omega) / 2.0);
        let spectrum = Spectrum {
            f: [
                Wave {
                    amp: coeffs.h1,
                    freq: wa,
                },
                Wave {
                    amp: coeffs.h2,
                    freq: wb,
                },
            ],
            g: [
                Wave {
                    amp: -(coeffs.h1 - coeffs.h3),
                    freq: wa - pump.delta,
                },
                Wave {
                    amp: -(coeffs.h2 - coeffs.h4),
                    freq: wb - pump.delta,
                },
            ],
        };
        Ok(Self {
            pump,
            sigma,
            params,
            f0,
            f1,
            coeffs,
            spectrum,
        })
    }

    /// Shared instance from a process-wide cache keyed on (V₀, Δ, T).
    pub fn cached(pump: &PumpParams) -> Result<Arc<Self>> {
        static CACHE: OnceLock<RwLock<HashMap<[u64; 3], Arc<DressedAtom>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let key = pump.key();
        if let Some(hit) = cache.read().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(hit.clone());
        }
        let atom = Arc::new(Self::new(*pump)?);
        let mut map = cache.write().unwrap_or_else(|e| e.into_inner());
        if map.len() >= CACHE_LIMIT {
            map.clear();
        }
        Ok(map.entry(key).or_insert(atom).clone())
    }

    pub fn pump(&self) -> &PumpParams {
        &self.pump
    }

    pub fn sigma(&self) -> Complex64 {
        self.sigma
    }

    pub fn hyp_params(&self) -> &Hyp2F1Params {
        &self.params
    }

    pub fn coefficients(&self) -> &ConnectionCoefficients {
        &self.coeffs
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// Hypergeometric closed form at retarded time t.
    pub fn exact(&self, t: f64) -> Result<DressedAmplitudes> {
        let x = t / self.pump.switch_time;
        let pre = (self.sigma * softplus(x)).exp();
        // F(a,b;c;u) and (1−u)·F(a+1,b+1;c+1;u) with u = −e^x
        let (f0, f1) = if x <= std::f64::consts::LN_2 {
            let u = -x.exp();
            (self.f0.eval(u)?, self.f1.eval(u)? * (1.0 - u))
        } else {
            (
                self.f0.eval_neg_exp(x, 0.0)?,
                self.f1.eval_neg_exp(x, 1.0)? * (1.0 + (-x).exp()),
            )
        };
        let rot = Complex64::from_polar(1.0, -self.pump.delta * t);
        Ok(DressedAmplitudes {
            f: pre * f0,
            g: -rot * pre * (f0 - f1),
        })
    }

    /// Two-mode large-t form; accurate to O(e^{−t/T}).
    pub fn asymptotic(&self, t: f64) -> DressedAmplitudes {
        let [fa, fb] = self.spectrum.f;
        let [ga, gb] = self.spectrum.g;
        DressedAmplitudes {
            f: fa.at(t) + fb.at(t),
            g: ga.at(t) + gb.at(t),
        }
    }

    /// Exact before [`ASYMPTOTIC_FROM`]·T, asymptotic after.
    pub fn amplitudes(&self, t: f64) -> Result<DressedAmplitudes> {
        if t >= self.asymptotic_from() {
            Ok(self.asymptotic(t))
        } else {
            self.exact(t)
        }
    }

    /// Retarded time after which [`DressedAtom::amplitudes`] is asymptotic.
    pub fn asymptotic_from(&self) -> f64 {
        ASYMPTOTIC_FROM * self.pump.switch_time
    }
}

/// Sigmoid switch-on envelope ε₀ / (1 + e^{−t/T}).
pub fn pump_envelope(t_ret: f64, p: &PumpParams) -> f64 {
    p.eps0 * sigmoid(t_ret / p.switch_time)
}

/// 1 / (1 + e^{−x}) without overflow.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// σ = −iV₀T and (a, b, c); all four are purely imaginary.
pub fn hyp_params(p: &PumpParams) -> (Complex64, Hyp2F1Params) {
    let t = p.switch_time;
    let omega = p.rabi();
    let im = |v: f64| Complex64::new(0.0, v);
    let sigma = im(-p.v0 * t);
    let a = im(0.5 * t * (-p.delta - 2.0 * p.v0 + omega));
    let b = im(0.5 * t * (-p.delta - 2.0 * p.v0 - omega));
    let c = im(-p.delta * t);
    (sigma, Hyp2F1Params::new(a, b, c))
}

/// u = −e^{t/T}: → 0⁻ before the switch, → −∞ after it.
pub fn argument_u(t_ret: f64, p: &PumpParams) -> f64 {
    -(t_ret / p.switch_time).exp()
}

pub fn amplitudes_exact(t_ret: f64, p: &PumpParams) -> Result<DressedAmplitudes> {
    DressedAtom::cached(p)?.exact(t_ret)
}

pub fn connection_coefficients(p: &PumpParams) -> Result<ConnectionCoefficients> {
    Ok(*DressedAtom::cached(p)?.coefficients())
}

pub fn amplitudes_asymptotic(t_ret: f64, p: &PumpParams) -> Result<DressedAmplitudes> {
    Ok(DressedAtom::cached(p)?.asymptotic(t_ret))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const T: f64 = 1e-12;

    fn pump(dt: f64, vt: f64) -> PumpParams {
        PumpParams::new(vt / T, dt / T, T)
    }

    #[test]
    fn envelope_limits() {
        let p = PumpParams {
            eps0: 3.0,
            ..pump(-5.0, 1.0)
        };
        assert_eq!(pump_envelope(0.0, &p), 1.5);
        assert_eq!(pump_envelope(-1e6 * T, &p), 0.0);
        assert_eq!(pump_envelope(1e6 * T, &p), 3.0);
    }

    #[test]
    fn argument_u_values() {
        let p = pump(-5.0, 1.0);
        assert_eq!(argument_u(0.0, &p), -1.0);
        assert_relative_eq!(argument_u(3.0 * T, &p), -20.085_536_923_187_668, max_relative = 1e-14);
        let early = argument_u(-800.0 * T, &p);
        assert!(early <= 0.0 && early > -1e-300);
    }

    #[test]
    fn hyp_params_examples() {
        let (sigma, h) = hyp_params(&pump(-5.0, 0.0));
        assert_eq!(sigma, Complex64::new(0.0, 0.0));
        assert_relative_eq!(h.a.im, 5.0, max_relative = 1e-14);
        assert_eq!(h.b.im, 0.0);
        assert_relative_eq!(h.c.im, 5.0, max_relative = 1e-14);

        let (sigma, h) = hyp_params(&pump(-5.0, 1.0));
        let r29 = 29f64.sqrt();
        assert_relative_eq!(sigma.im, -1.0, max_relative = 1e-14);
        assert_relative_eq!(h.a.im, 0.5 * (3.0 + r29), max_relative = 1e-14);
        assert_relative_eq!(h.b.im, 0.5 * (3.0 - r29), max_relative = 1e-14);
        for z in [h.a, h.b, h.c, sigma] {
            assert_eq!(z.re, 0.0);
        }
    }

    #[test]
    fn invalid_pumps_are_rejected() {
        assert!(DressedAtom::new(PumpParams::new(0.0, 0.0, T)).is_err());
        assert!(DressedAtom::new(PumpParams::new(1e12, 1e12, -T)).is_err());
        assert!(DressedAtom::new(PumpParams::new(-1.0, 1e12, T)).is_err());
        // Δ = 0 puts c on the pole c = 0
        assert!(DressedAtom::new(PumpParams::new(1e12, 0.0, T)).is_err());
    }

    #[test]
    fn starts_in_ground_state() {
        let a = amplitudes_exact(-20.0 * T, &pump(-5.0, 1.0)).unwrap();
        assert!((a.f - 1.0).norm() < 1e-8);
        assert!(a.g.norm() < 1e-8);
    }

    #[test]
    fn no_coupling_means_free_evolution() {
        for dt in [-5.0, 2.0] {
            let atom = DressedAtom::new(pump(dt, 0.0)).unwrap();
            for t in [-5.0 * T, 0.0, 7.0 * T, 40.0 * T] {
                let a = atom.exact(t).unwrap();
                assert!((a.f - 1.0).norm() < 1e-13 && a.g.norm() < 1e-13, "{a:?}");
            }
            let s = atom.spectrum();
            let nonzero: Vec<_> = s.f.iter().filter(|m| m.amp.norm() > 1e-12).collect();
            assert_eq!(nonzero.len(), 1);
            assert_relative_eq!(nonzero[0].amp.norm(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn coefficient_symmetry_and_contiguity() {
        let p = pump(-1.0, 1.0);
        let atom = DressedAtom::new(p).unwrap();
        let h = *atom.coefficients();
        let hp = atom.hyp_params();
        let swapped = ConnectionCoefficients::from_params(&Hyp2F1Params::new(hp.b, hp.a, hp.c)).unwrap();
        assert!((swapped.h1 - h.h2).norm() < 1e-13 * h.h2.norm());
        assert!((swapped.h2 - h.h1).norm() < 1e-13 * h.h1.norm());
        assert!((swapped.h3 - h.h4).norm() < 1e-13 * h.h4.norm());
        assert!((h.h3 / h.h1 - hp.c / hp.b).norm() < 1e-12 * (hp.c / hp.b).norm());
    }

    #[test]
    fn asymptotic_frequencies_split_by_rabi() {
        let p = pump(-5.0, 1.0);
        let s = *DressedAtom::new(p).unwrap().spectrum();
        assert_relative_eq!(s.f[1].freq - s.f[0].freq, p.rabi(), max_relative = 1e-14);
        assert_relative_eq!(s.g[1].freq - s.g[0].freq, p.rabi(), max_relative = 1e-14);
    }

    #[test]
    fn asymptotic_matches_exact_late() {
        for (dt, vt) in [(-5.0, 1.0), (-1.0, 5.0), (1.0, 0.1), (0.5, 2.0)] {
            let atom = DressedAtom::new(pump(dt, vt)).unwrap();
            let t = 30.0 * T;
            let e = atom.exact(t).unwrap();
            let a = atom.asymptotic(t);
            let scale = (e.f.norm_sqr() + e.g.norm_sqr()).sqrt();
            let err = ((e.f - a.f).norm_sqr() + (e.g - a.g).norm_sqr()).sqrt();
            assert!(err <= 1e-8 * scale, "ΔT={dt} V0T={vt}: {err:e}");
        }
    }

    #[test]
    fn cache_returns_shared_instance() {
        let p = pump(-2.0, 3.0);
        let a = DressedAtom::cached(&p).unwrap();
        let b = DressedAtom::cached(&p).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn unitarity(dt in -6.0f64..6.0, vt in 0.05f64..6.0, x in -10.0f64..40.0) {
            prop_assume!(dt.abs() > 0.05);
            let a = amplitudes_exact(x * T, &pump(dt, vt)).unwrap();
            prop_assert!(a.norm_defect().abs() <= 1e-8, "defect {:e}", a.norm_defect());
        }

        #[test]
        fn amplitudes_switch_is_continuous(dt in -6.0f64..6.0, vt in 0.05f64..6.0) {
            prop_assume!(dt.abs() > 0.05);
            let atom = DressedAtom::new(pump(dt, vt)).unwrap();
            let t = atom.asymptotic_from();
            let below = atom.exact(t).unwrap();
            let above = atom.amplitudes(t).unwrap();
            prop_assert!((below.f - above.f).norm() < 1e-10);
            prop_assert!((below.g - above.g).norm() < 1e-10);
        }
    }
}
