//! First-order response of the dressed atom to a weak co-propagating probe.
//!
//! With δ = ω − ω₀ and S = ω + ω₀ the accumulated integrals are
//!
//! ```text
//! σ₁ = ∫ g e^{−iSt'} K,   θ₁ = ∫ f e^{+iSt'} K,
//! σ₂ = ∫ g e^{+iδt'} K,   θ₂ = ∫ f e^{−iδt'} K,     K = e^{−γ(t−t')}
//! ```
//!
//! taken from t₀ to t. The memory kernel K is the homogeneous damping: it is
//! what shifting ω₀ by an imaginary γ does to each integral once the sign is
//! chosen so that every term decays.
//!
//! The normalized response at retarded time τ is
//!
//! ```text
//! R(τ) = e^{iδτ} (f* θ₂ − g σ₂*)                        (resonant)
//! R(τ) = R_resonant − e^{iSτ} (f θ₁* − g* σ₁)           (full)
//! ```
//!
//! For an undressed atom R → i/(δ + iγ).

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dressed::{DressedAmplitudes, DressedAtom, PumpParams, Wave};
use crate::error::{Error, Result};
use crate::propagation::MediumParams;
use crate::quad;
use crate::units::{C_LIGHT, HBAR};

/// Default integration start, in switching times.
pub const DEFAULT_T0: f64 = -20.0;
/// Relative quadrature tolerance: absolute tolerance is this times (t − t₀).
pub const QUAD_TOL: f64 = 1e-12;
/// Largest phase advance of the fastest term across one GK15 panel.
pub const PANEL_PHASE: f64 = std::f64::consts::FRAC_PI_4;
/// Resonant denominators below this fraction of ω₀ are treated as exact
/// resonance (ω − ω₀ is only resolved to about 1e-16·ω₀).
pub const RESONANCE_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Probe wave. Frequencies angular (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeParams {
    pub omega: f64,
    pub eps_probe: f64,
    #[serde(default = "yes")]
    pub co_propagating: bool,
}

fn yes() -> bool {
    true
}

impl ProbeParams {
    pub fn new(omega: f64, eps_probe: f64) -> Self {
        Self {
            omega,
            eps_probe,
            co_propagating: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::InvalidParameter("probe: omega must be positive".into()));
        }
        if !self.eps_probe.is_finite() {
            return Err(Error::InvalidParameter("probe: eps_probe must be finite".into()));
        }
        if !self.co_propagating {
            return Err(Error::InvalidParameter(
                "probe: only co-propagating geometry is supported".into(),
            ));
        }
        Ok(())
    }
}

/// Which terms of the envelope exponent are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Slowly varying (σ₂, θ₂) pair only.
    #[default]
    Resonant,
    /// The counter-rotating (σ₁, θ₁) pair with the printed depth phases.
    Literal,
    /// Both pairs.
    Full,
}

impl Mode {
    pub fn needs_resonant(self) -> bool {
        matches!(self, Mode::Resonant | Mode::Full)
    }

    pub fn needs_counter(self) -> bool {
        matches!(self, Mode::Literal | Mode::Full)
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Resonant => "resonant",
            Mode::Literal => "literal",
            Mode::Full => "full",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "resonant" => Ok(Mode::Resonant),
            "literal" => Ok(Mode::Literal),
            "full" => Ok(Mode::Full),
            other => Err(Error::config("mode", "resonant | literal | full", other)),
        }
    }
}

/// How the time integrals are started.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Probe on from t₀; includes the free-induction transient.
    #[default]
    Transient,
    /// Long-time limit: transients decayed, amplitudes in their two-wave form.
    Stationary,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Transient => "transient",
            Regime::Stationary => "stationary",
        })
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transient" => Ok(Regime::Transient),
            "stationary" => Ok(Regime::Stationary),
            other => Err(Error::config("regime", "transient | stationary", other)),
        }
    }
}

/// (σ₁, σ₂, θ₁, θ₂), in seconds. Pairs not requested by the [`Mode`] are zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ResponseIntegrals {
    pub sigma1: Complex64,
    pub sigma2: Complex64,
    pub theta1: Complex64,
    pub theta2: Complex64,
}

impl ResponseIntegrals {
    fn from_array(v: [Complex64; 4]) -> Self {
        Self {
            sigma1: v[0],
            sigma2: v[1],
            theta1: v[2],
            theta2: v[3],
        }
    }

    fn to_array(self) -> [Complex64; 4] {
        [self.sigma1, self.sigma2, self.theta1, self.theta2]
    }
}

/// First-order probe corrections to the ground/excited amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationAmplitudes {
    pub c1: Complex64,
    pub c2: Complex64,
}

/// ∫₀ᴸ e^{−λs} ds, stable for small |λL|.
fn decay_integral(lambda: Complex64, len: f64) -> Complex64 {
    let x = lambda * len;
    if x.norm() < 1e-3 {
        len * (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0)
    } else {
        (1.0 - (-x).exp()) / lambda
    }
}

/// Prepared response calculation for one (pump, probe, medium).
#[derive(Debug, Clone)]
pub struct Response {
    atom: Arc<DressedAtom>,
    omega: f64,
    omega0: f64,
    gamma: f64,
    t0: f64,
    regime: Regime,
    resonant: bool,
    counter: bool,
}

impl Response {
    /// `t0 = None` uses [`DEFAULT_T0`]·T.
    pub fn new(
        pump: &PumpParams,
        probe: &ProbeParams,
        medium: &MediumParams,
        mode: Mode,
        regime: Regime,
        t0: Option<f64>,
    ) -> Result<Self> {
        probe.validate()?;
        medium.validate()?;
        let atom = DressedAtom::cached(pump)?;
        let t0 = t0.unwrap_or(DEFAULT_T0 * pump.switch_time);
        if !t0.is_finite() {
            return Err(Error::InvalidParameter("t0 must be finite".into()));
        }
        let r = Self {
            atom,
            omega: probe.omega,
            omega0: medium.omega0,
            gamma: medium.gamma,
            t0,
            regime,
            resonant: mode.needs_resonant(),
            counter: mode.needs_counter(),
        };
        if regime == Regime::Stationary {
            r.check_denominators()?;
        }
        Ok(r)
    }

    pub fn atom(&self) -> &DressedAtom {
        &self.atom
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn detuning(&self) -> f64 {
        self.omega - self.omega0
    }

    fn sum_freq(&self) -> f64 {
        self.omega + self.omega0
    }

    /// Carrier shifts applied to (g, g, f, f) for (σ₁, σ₂, θ₁, θ₂).
    fn shifts(&self) -> [f64; 4] {
        let (d, s) = (self.detuning(), self.sum_freq());
        [-s, d, s, -d]
    }

    fn active(&self) -> [bool; 4] {
        [self.counter, self.resonant, self.counter, self.resonant]
    }

    /// Plane-wave decomposition of each integrand after the switch.
    fn waves(&self) -> [[Wave; 2]; 4] {
        let sp = self.atom.spectrum();
        let shifted = |ws: [Wave; 2], by: f64| {
            ws.map(|w| Wave {
                amp: w.amp,
                freq: w.freq + by,
            })
        };
        let sh = self.shifts();
        [
            shifted(sp.g, sh[0]),
            shifted(sp.g, sh[1]),
            shifted(sp.f, sh[2]),
            shifted(sp.f, sh[3]),
        ]
    }

    fn check_denominators(&self) -> Result<()> {
        for (ws, on) in self.waves().iter().zip(self.active()) {
            if !on {
                continue;
            }
            for w in ws {
                if w.amp != ZERO && Complex64::new(self.gamma, w.freq).norm() < RESONANCE_TOL * self.omega0 {
                    return Err(Error::InvalidParameter(format!(
                        "probe sits on a dressed resonance (component frequency {:e} rad/s) with no damping",
                        w.freq
                    )));
                }
            }
        }
        Ok(())
    }

    fn integrand(&self, t: f64, end: f64) -> Result<[Complex64; 4]> {
        let DressedAmplitudes { f, g } = self.atom.amplitudes(t)?;
        let k = (-self.gamma * (end - t)).exp();
        let sh = self.shifts();
        let on = self.active();
        let mut out = [ZERO; 4];
        for i in 0..4 {
            if on[i] {
                let amp = if i < 2 { g } else { f };
                out[i] = amp * Complex64::from_polar(k, sh[i] * t);
            }
        }
        Ok(out)
    }

    /// Fastest phase rate present in any active integrand.
    fn fastest(&self) -> f64 {
        let p = self.atom.pump();
        let mut shift: f64 = 0.0;
        if self.resonant {
            shift = shift.max(self.detuning().abs());
        }
        if self.counter {
            shift = shift.max(self.sum_freq());
        }
        p.delta.abs() + p.rabi() + shift
    }

    fn max_panel(&self) -> f64 {
        (PANEL_PHASE / self.fastest()).min(0.25 * self.atom.pump().switch_time)
    }

    /// ∫_a^b integrand · e^{−γ(b−t')} dt' by quadrature.
    fn numeric(&self, a: f64, b: f64) -> Result<[Complex64; 4]> {
        if b <= a {
            return Ok([ZERO; 4]);
        }
        let err = std::cell::Cell::new(None);
        let f = |t: f64| match self.integrand(t, b) {
            Ok(v) => v,
            Err(e) => {
                err.set(Some(e));
                [Complex64::new(f64::NAN, 0.0); 4]
            }
        };
        // phases ω·t are only known to ε·ω·|t|, which bounds what any panel can resolve
        let floor = 64.0 * f64::EPSILON * self.fastest() * a.abs().max(b.abs()) * (b - a);
        let tol = (QUAD_TOL * (b - a).max(self.atom.pump().switch_time)).max(floor);
        let v = quad::integrate(&f, a, b, self.max_panel(), tol);
        match err.take() {
            Some(e) => Err(e),
            None => v,
        }
    }

    /// Closed-form ∫_a^b over the post-switch two-wave amplitudes with kernel e^{−γ(b−t')}.
    fn analytic(&self, a: f64, b: f64) -> [Complex64; 4] {
        let mut out = [ZERO; 4];
        if b <= a {
            return out;
        }
        for (i, (ws, on)) in self.waves().iter().zip(self.active()).enumerate() {
            if !on {
                continue;
            }
            for w in ws {
                let lambda = Complex64::new(self.gamma, w.freq);
                out[i] += w.at(b) * decay_integral(lambda, b - a);
            }
        }
        out
    }

    /// t₀ → −∞ limit of the two-wave integrals.
    fn stationary(&self, t: f64) -> [Complex64; 4] {
        let mut out = [ZERO; 4];
        for (i, (ws, on)) in self.waves().iter().zip(self.active()).enumerate() {
            if !on {
                continue;
            }
            for w in ws {
                out[i] += w.at(t) / Complex64::new(self.gamma, w.freq);
            }
        }
        out
    }

    fn carry(&self, v: [Complex64; 4], dt: f64) -> [Complex64; 4] {
        let k = (-self.gamma * dt).exp();
        v.map(|x| x * k)
    }

    /// Integrals at a single time.
    pub fn integrals_at(&self, t: f64) -> Result<ResponseIntegrals> {
        Ok(self.trace(&[t])?.remove(0))
    }

    /// Integrals at each requested time (any order; times before t₀ give zero).
    pub fn trace(&self, ts: &[f64]) -> Result<Vec<ResponseIntegrals>> {
        if ts.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter("non-finite time in response grid".into()));
        }
        if self.regime == Regime::Stationary {
            return Ok(ts
                .iter()
                .map(|&t| ResponseIntegrals::from_array(self.stationary(t)))
                .collect());
        }
        let mut order: Vec<usize> = (0..ts.len()).collect();
        order.sort_by(|&i, &j| ts[i].total_cmp(&ts[j]));

        let t0 = self.t0;
        let ta = self.atom.asymptotic_from().max(t0);
        // Breakpoints for the numeric part: t0, the sorted grid points inside (t0, ta), ta.
        let mut cuts = vec![t0];
        cuts.extend(order.iter().map(|&i| ts[i]).filter(|&t| t > t0 && t < ta));
        cuts.push(ta);
        cuts.dedup();
        let pieces: Vec<[Complex64; 4]> = cuts
            .par_windows(2)
            .map(|w| self.numeric(w[0], w[1]))
            .collect::<Result<_>>()?;
        let mut cumulative = Vec::with_capacity(cuts.len());
        let mut acc = [ZERO; 4];
        cumulative.push(acc);
        for (w, piece) in cuts.windows(2).zip(&pieces) {
            acc = self.carry(acc, w[1] - w[0]);
            for k in 0..4 {
                acc[k] += piece[k];
            }
            cumulative.push(acc);
        }
        let at_ta = *cumulative.last().expect("at least one cut");

        let mut out = vec![ResponseIntegrals::default(); ts.len()];
        for (idx, &t) in ts.iter().enumerate() {
            let v = if t <= t0 {
                [ZERO; 4]
            } else if t < ta {
                let pos = cuts.partition_point(|&c| c < t);
                debug_assert_eq!(cuts[pos], t);
                cumulative[pos]
            } else {
                let mut v = self.carry(at_ta, t - ta);
                let tail = self.analytic(ta, t);
                for k in 0..4 {
                    v[k] += tail[k];
                }
                v
            };
            out[idx] = ResponseIntegrals::from_array(v);
        }
        Ok(out)
    }

    /// Amplitudes consistent with the regime: exact/asymptotic in the transient
    /// regime, two-wave in the stationary one.
    pub fn amplitudes(&self, t: f64) -> Result<DressedAmplitudes> {
        match self.regime {
            Regime::Transient => self.atom.amplitudes(t),
            Regime::Stationary => Ok(self.atom.asymptotic(t)),
        }
    }

    /// Normalized response R(τ) for the resonant or full selections.
    pub fn response(&self, tau: f64, amps: &DressedAmplitudes, s: &ResponseIntegrals) -> Complex64 {
        let DressedAmplitudes { f, g } = *amps;
        let mut r = ZERO;
        if self.resonant {
            r += Complex64::from_polar(1.0, self.detuning() * tau) * (f.conj() * s.theta2 - g * s.sigma2.conj());
        }
        if self.resonant && self.counter {
            r -= Complex64::from_polar(1.0, self.sum_freq() * tau) * (f * s.theta1.conj() - g.conj() * s.sigma1);
        }
        r
    }

    /// Counter-rotating pair in the printed arrangement: e^{iδτ}(f*θ₁, −gσ₁).
    pub fn literal_terms(&self, tau: f64, amps: &DressedAmplitudes, s: &ResponseIntegrals) -> [Complex64; 2] {
        let ph = Complex64::from_polar(1.0, self.detuning() * tau);
        [ph * amps.f.conj() * s.theta1, -ph * amps.g * s.sigma1]
    }
}

/// The four integrals at time t, all pairs computed.
pub fn response_integrals(
    t: f64,
    t0: f64,
    pump: &PumpParams,
    probe: &ProbeParams,
    medium: &MediumParams,
    mode: Mode,
) -> Result<ResponseIntegrals> {
    if t < t0 {
        return Err(Error::InvalidParameter(format!("t = {t:e} precedes t0 = {t0:e}")));
    }
    Response::new(pump, probe, medium, mode, Regime::Transient, Some(t0))?.integrals_at(t)
}

/// C₁ = (i/ℏ) d (e^{ikz} σ₁ ε + e^{−ikz} σ₂ ε*),  C₂ = (i/ℏ) d (e^{ikz} θ₂ ε + e^{−ikz} θ₁ ε*).
pub fn perturbation_amplitudes(
    z: f64,
    s: &ResponseIntegrals,
    probe: &ProbeParams,
    medium: &MediumParams,
) -> PerturbationAmplitudes {
    let d = medium.d12_sq.sqrt();
    let eps = Complex64::new(probe.eps_probe, 0.0);
    let k = probe.omega / C_LIGHT;
    let fwd = Complex64::from_polar(1.0, k * z);
    let back = fwd.conj();
    let pre = Complex64::new(0.0, d / HBAR);
    PerturbationAmplitudes {
        c1: pre * (fwd * s.sigma1 * eps + back * s.sigma2 * eps.conj()),
        c2: pre * (fwd * s.theta2 * eps + back * s.theta1 * eps.conj()),
    }
}

impl ResponseIntegrals {
    /// Component-wise maximum modulus; handy for tolerance checks.
    pub fn max_norm(&self) -> f64 {
        self.to_array().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum component-wise distance to another set.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const T: f64 = 1e-12;
    const W0: f64 = 1e15;

    fn medium(gamma: f64) -> MediumParams {
        MediumParams {
            gamma,
            ..MediumParams::new(W0, 2e-34, 1e15)
        }
    }

    fn strong_pump() -> PumpParams {
        PumpParams::new(1e12, -1e12, T)
    }

    #[test]
    fn zero_at_start() {
        let r = response_integrals(
            -20.0 * T,
            -20.0 * T,
            &strong_pump(),
            &ProbeParams::new(W0 + 3e11, 1.0),
            &medium(0.0),
            Mode::Full,
        )
        .unwrap();
        assert_eq!(r, ResponseIntegrals::default());
    }

    #[test]
    fn free_atom_closed_form() {
        let delta = 3e11;
        let pump = PumpParams::new(0.0, -5e12, T);
        let t0 = -20.0 * T;
        let resp = Response::new(
            &pump,
            &ProbeParams::new(W0 + delta, 1.0),
            &medium(0.0),
            Mode::Full,
            Regime::Transient,
            None,
        )
        .unwrap();
        for t in [-3.0 * T, 10.0 * T, 45.0 * T] {
            let s = resp.integrals_at(t).unwrap();
            // g vanishes to rounding
            assert!(s.sigma1.norm() < 1e-14 * (t - t0) && s.sigma2.norm() < 1e-14 * (t - t0));
            let i = Complex64::new(0.0, 1.0);
            let want = ((-i * delta * t).exp() - (-i * delta * t0).exp()) / (-i * delta);
            assert!(
                (s.theta2 - want).norm() < 1e-10 * want.norm(),
                "{} vs {}",
                s.theta2,
                want
            );
        }
    }

    #[test]
    fn free_atom_response_is_linear_susceptibility() {
        let delta = -2e11;
        let gamma = 1e9;
        let pump = PumpParams::new(0.0, -5e12, T);
        let resp = Response::new(
            &pump,
            &ProbeParams::new(W0 + delta, 1.0),
            &medium(gamma),
            Mode::Resonant,
            Regime::Stationary,
            None,
        )
        .unwrap();
        let tau = 40.0 * T;
        let s = resp.integrals_at(tau).unwrap();
        let r = resp.response(tau, &resp.amplitudes(tau).unwrap(), &s);
        let want = Complex64::new(0.0, 1.0) / Complex64::new(delta, gamma);
        assert!((r - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn exact_resonance_without_damping_is_rejected() {
        let pump = strong_pump();
        let atom = DressedAtom::new(pump).unwrap();
        // θ₂ component at ω_j − δ = 0
        let delta = atom.spectrum().f[1].freq;
        let r = Response::new(
            &pump,
            &ProbeParams::new(W0 + delta, 1.0),
            &medium(0.0),
            Mode::Resonant,
            Regime::Stationary,
            None,
        );
        assert!(r.is_err());
    }

    #[test]
    fn trace_order_independent_and_matches_pointwise() {
        let pump = strong_pump();
        let resp = Response::new(
            &pump,
            &ProbeParams::new(W0 + 4e11, 1.0),
            &medium(1e9),
            Mode::Resonant,
            Regime::Transient,
            None,
        )
        .unwrap();
        let ts = [12.0 * T, -5.0 * T, 50.0 * T, 0.0, 31.0 * T];
        let tr = resp.trace(&ts).unwrap();
        for (t, v) in ts.iter().zip(&tr) {
            let p = resp.integrals_at(*t).unwrap();
            assert!(v.max_diff(&p) <= 1e-11 * p.max_norm().max(1e-30), "t={t:e}");
        }
    }

    #[test]
    fn perturbation_linear_and_zero() {
        let m = medium(0.0);
        let s = ResponseIntegrals {
            sigma1: Complex64::new(1e-12, 2e-13),
            sigma2: Complex64::new(-3e-12, 1e-12),
            theta1: Complex64::new(4e-14, 0.0),
            theta2: Complex64::new(0.5e-12, -7e-12),
        };
        let p1 = perturbation_amplitudes(0.3, &s, &ProbeParams::new(W0, 1.5), &m);
        let p2 = perturbation_amplitudes(0.3, &s, &ProbeParams::new(W0, 3.0), &m);
        assert_eq!(p2.c1, p1.c1 * 2.0);
        assert_eq!(p2.c2, p1.c2 * 2.0);
        let z = perturbation_amplitudes(0.3, &ResponseIntegrals::default(), &ProbeParams::new(W0, 1.5), &m);
        assert_eq!((z.c1, z.c2), (ZERO, ZERO));
    }

    #[test]
    fn resonant_pair_dominates_counter_rotating_pair() {
        let pump = PumpParams::new(1e12, -5e12, T);
        let probe = ProbeParams::new(W0 + 5.004e11, 1.0);
        let resp = Response::new(&pump, &probe, &medium(0.0), Mode::Full, Regime::Transient, None).unwrap();
        let s = resp.integrals_at(25.0 * T).unwrap();
        let sp = resp.atom().spectrum();
        let slow =
            sp.f.iter()
                .chain(&sp.g)
                .map(|w| (w.freq - 5.004e11).abs().min((w.freq + 5.004e11).abs()))
                .fold(f64::INFINITY, f64::min);
        let ratio = (probe.omega + W0) / (slow + pump.rabi());
        let res = s.sigma2.norm().max(s.theta2.norm());
        let cr = s.sigma1.norm().max(s.theta1.norm());
        assert!(
            res >= ratio * cr * 0.1,
            "resonant {res:e} counter {cr:e} ratio {ratio:e}"
        );
        assert!(res > 1e3 * cr);
    }

    #[test]
    fn damped_transient_approaches_stationary() {
        let pump = strong_pump();
        let probe = ProbeParams::new(W0 + 4e11, 1.0);
        let m = medium(5e11);
        let tr = Response::new(&pump, &probe, &m, Mode::Resonant, Regime::Transient, None).unwrap();
        let st = Response::new(&pump, &probe, &m, Mode::Resonant, Regime::Stationary, None).unwrap();
        let tau = 100.0 * T;
        let a = tr.integrals_at(tau).unwrap();
        let b = st.integrals_at(tau).unwrap();
        let ra = tr.response(tau, &tr.amplitudes(tau).unwrap(), &a);
        let rb = st.response(tau, &st.amplitudes(tau).unwrap(), &b);
        assert!((ra - rb).norm() < 1e-9 * rb.norm(), "{ra} vs {rb}");
    }

    #[test]
    fn steady_state_is_periodic_in_rabi_period() {
        let pump = strong_pump();
        let probe = ProbeParams::new(W0 + 4e11, 1.0);
        let resp = Response::new(&pump, &probe, &medium(1e11), Mode::Resonant, Regime::Transient, None).unwrap();
        let period = 2.0 * std::f64::consts::PI / pump.rabi();
        let t = 200.0 * T;
        let r = |t: f64| {
            let s = resp.integrals_at(t).unwrap();
            resp.response(t, &resp.amplitudes(t).unwrap(), &s)
        };
        let (a, b) = (r(t), r(t + period));
        assert!((a - b).norm() <= 0.01 * a.norm());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn integrals_are_continuous_across_asymptotic_switch(dt in -3.0f64..3.0, vt in 0.2f64..3.0, d in 1e11f64..8e11) {
            prop_assume!(dt.abs() > 0.1);
            let pump = PumpParams::new(vt / T, dt / T, T);
            let resp = Response::new(&pump, &ProbeParams::new(W0 + d, 1.0), &medium(1e9), Mode::Resonant, Regime::Transient, None).unwrap();
            let ta = resp.atom().asymptotic_from();
            let lo = resp.integrals_at(ta - 1e-22).unwrap();
            let hi = resp.integrals_at(ta + 1e-22).unwrap();
            prop_assert!(lo.max_diff(&hi) <= 1e-9 * lo.max_norm());
        }
    }
}
