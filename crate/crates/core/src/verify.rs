//! Brute-force oracles for the analytic chain.
//!
//! * [`tdse_oracle`]: fixed-step RK4 on the rotating-wave two-level equations.
//! * [`linearized_oracle`]: the same trajectory plus the first-order probe
//!   amplitudes, with both e^{∓iωt} probe components retained.
//! * [`polarization_component`]: Hann-window demodulation of the induced
//!   dipole at the probe carrier.
//! * [`simpson_integrals`]: composite Simpson rule for the response integrals.
//! * [`fit_g_normalization`]: least-squares scale between the printed excited
//!   amplitude and the integrated one.
//!
//! The probe amplitudes are driven by (f, g) only; the pump does not couple
//! C₁ and C₂ back into each other, matching the first-order treatment the
//! analytic formulas use.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dressed::{sigmoid, DressedAmplitudes, DressedAtom, PumpParams};
use crate::error::{Error, Result};
use crate::propagation::MediumParams;
use crate::response::{PerturbationAmplitudes, ProbeParams, ResponseIntegrals};
use crate::specfun::{Hyp2F1, Hyp2F1Params};
use crate::units::{C_LIGHT, HBAR};

/// Largest tolerated | |f|² + |g|² − 1 | along an oracle trajectory.
pub const NORM_DRIFT_TOL: f64 = 1e-9;
/// Default amplitude step as a fraction of T.
pub const AMPLITUDE_STEPS_PER_T: f64 = 1000.0;
/// Default samples per probe optical cycle.
pub const STEPS_PER_CYCLE: usize = 256;
/// Default demodulation window, in probe cycles.
pub const DEMOD_CYCLES: usize = 2;
/// Allowed deviation of the demodulation window from an integer cycle count.
pub const WINDOW_TOL: f64 = 1e-3;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Fixed-step fourth-order integration settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeSpec {
    pub step: f64,
    pub t_start: f64,
    pub t_end: f64,
}

impl OdeSpec {
    pub fn new(step: f64, t_start: f64, t_end: f64) -> Result<Self> {
        let s = Self { step, t_start, t_end };
        s.validate()?;
        Ok(s)
    }

    /// Step T/1000, which resolves the switch and the Rabi phase for |ΔT|, V₀T ≲ 10.
    pub fn for_amplitudes(pump: &PumpParams, t_start: f64, t_end: f64) -> Result<Self> {
        Self::new(pump.switch_time / AMPLITUDE_STEPS_PER_T, t_start, t_end)
    }

    /// Step 2π/(ω·steps_per_cycle), so that demodulation windows of whole
    /// probe cycles land on the grid.
    pub fn for_optical(probe: &ProbeParams, t_start: f64, t_end: f64, steps_per_cycle: usize) -> Result<Self> {
        if steps_per_cycle == 0 {
            return Err(Error::InvalidParameter(
                "oracle: steps_per_cycle must be positive".into(),
            ));
        }
        Self::new(
            std::f64::consts::TAU / (probe.omega * steps_per_cycle as f64),
            t_start,
            t_end,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::InvalidParameter("oracle: step must be positive".into()));
        }
        if !(self.t_start.is_finite() && self.t_end.is_finite() && self.t_start < self.t_end) {
            return Err(Error::InvalidParameter("oracle: need t_start < t_end".into()));
        }
        Ok(())
    }

    /// Amplitude runs must resolve the switch.
    pub fn check_amplitude_step(&self, pump: &PumpParams) -> Result<()> {
        if self.step > pump.switch_time / 200.0 {
            return Err(Error::InvalidParameter(format!(
                "oracle: step {:e} exceeds T/200 = {:e}",
                self.step,
                pump.switch_time / 200.0
            )));
        }
        Ok(())
    }

    /// Optical runs must resolve the sum frequency.
    pub fn check_optical_step(&self, probe: &ProbeParams, medium: &MediumParams) -> Result<()> {
        let limit = std::f64::consts::TAU / (50.0 * (probe.omega + medium.omega0));
        if self.step > limit * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "oracle: step {:e} exceeds 2π/(50(ω+ω₀)) = {limit:e}",
                self.step
            )));
        }
        Ok(())
    }

    fn n_steps(&self) -> usize {
        ((self.t_end - self.t_start) / self.step).round().max(1.0) as usize
    }

    fn time(&self, i: usize) -> f64 {
        self.t_start + self.step * i as f64
    }
}

/// Uniformly stepped trajectory; `t[i] = t_start + i·step` up to rounding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series<T> {
    pub step: f64,
    pub t: Vec<f64>,
    pub values: Vec<T>,
}

impl<T> Series<T> {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// Pump-dressed amplitudes together with the first-order probe corrections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearizedState {
    pub amps: DressedAmplitudes,
    pub pert: PerturbationAmplitudes,
}

fn rk4<const N: usize, F>(rhs: &F, t: f64, y: &[Complex64; N], h: f64) -> [Complex64; N]
where
    F: Fn(f64, &[Complex64; N]) -> [Complex64; N],
{
    let axpy = |y: &[Complex64; N], k: &[Complex64; N], a: f64| {
        let mut out = *y;
        for (o, k) in out.iter_mut().zip(k) {
            *o += k * a;
        }
        out
    };
    let k1 = rhs(t, y);
    let k2 = rhs(t + 0.5 * h, &axpy(y, &k1, 0.5 * h));
    let k3 = rhs(t + 0.5 * h, &axpy(y, &k2, 0.5 * h));
    let k4 = rhs(t + h, &axpy(y, &k3, h));
    let mut out = *y;
    for i in 0..N {
        out[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
    }
    out
}

fn norm_check(f: Complex64, g: Complex64) -> Result<()> {
    let drift = (f.norm_sqr() + g.norm_sqr() - 1.0).abs();
    if drift > NORM_DRIFT_TOL || !drift.is_finite() {
        return Err(Error::NormDrift {
            drift,
            limit: NORM_DRIFT_TOL,
        });
    }
    Ok(())
}

/// i ḟ = −V(t) e^{iΔt} g,  i ġ = −V(t) e^{−iΔt} f.
fn pump_rhs(pump: &PumpParams) -> impl Fn(f64, &[Complex64; 2]) -> [Complex64; 2] + '_ {
    move |t, y| {
        let v = pump.v0 * sigmoid(t / pump.switch_time);
        let rot = Complex64::from_polar(v, pump.delta * t);
        [I * rot * y[1], I * rot.conj() * y[0]]
    }
}

fn run<const N: usize, F, C>(rhs: &F, y0: [Complex64; N], spec: &OdeSpec, check: C) -> Result<Vec<[Complex64; N]>>
where
    F: Fn(f64, &[Complex64; N]) -> [Complex64; N],
    C: Fn(&[Complex64; N]) -> Result<()>,
{
    let n = spec.n_steps();
    let mut out = Vec::with_capacity(n + 1);
    let mut y = y0;
    out.push(y);
    for i in 0..n {
        y = rk4(rhs, spec.time(i), &y, spec.step);
        check(&y)?;
        out.push(y);
    }
    Ok(out)
}

/// Integrates the pump-only two-level equations from (1, 0) at `t_start`.
pub fn tdse_oracle(spec: &OdeSpec, pump: &PumpParams) -> Result<Series<DressedAmplitudes>> {
    spec.validate()?;
    pump.validate()?;
    spec.check_amplitude_step(pump)?;
    let rhs = pump_rhs(pump);
    let ys = run(&rhs, [Complex64::new(1.0, 0.0), ZERO], spec, |y| norm_check(y[0], y[1]))?;
    Ok(Series {
        step: spec.step,
        t: (0..ys.len()).map(|i| spec.time(i)).collect(),
        values: ys.iter().map(|y| DressedAmplitudes { f: y[0], g: y[1] }).collect(),
    })
}

/// The pump-only trajectory at arbitrary sorted times inside the run.
///
/// The main trajectory advances on the fixed grid; each requested time is
/// reached by one partial step from the preceding grid point.
pub fn tdse_sample(spec: &OdeSpec, pump: &PumpParams, times: &[f64]) -> Result<Vec<DressedAmplitudes>> {
    spec.validate()?;
    pump.validate()?;
    spec.check_amplitude_step(pump)?;
    if times.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("oracle: sample times must be sorted".into()));
    }
    if let (Some(&lo), Some(&hi)) = (times.first(), times.last()) {
        if lo < spec.t_start || hi > spec.t_end + 0.5 * spec.step {
            return Err(Error::InvalidParameter("oracle: sample time outside the run".into()));
        }
    }
    let rhs = pump_rhs(pump);
    let mut y = [Complex64::new(1.0, 0.0), ZERO];
    let mut i = 0usize;
    let mut out = Vec::with_capacity(times.len());
    for &ts in times {
        while spec.time(i + 1) <= ts {
            y = rk4(&rhs, spec.time(i), &y, spec.step);
            norm_check(y[0], y[1])?;
            i += 1;
        }
        let rest = ts - spec.time(i);
        let z = if rest > 0.0 {
            rk4(&rhs, spec.time(i), &y, rest)
        } else {
            y
        };
        out.push(DressedAmplitudes { f: z[0], g: z[1] });
    }
    Ok(out)
}

/// Pump trajectory plus first-order probe amplitudes at depth z:
///
/// ```text
/// Ċ₁ = i(d/ℏ)(ε e^{ikz} e^{−i(ω+ω₀)t} + ε* e^{−ikz} e^{i(ω−ω₀)t}) g − γC₁
/// Ċ₂ = i(d/ℏ)(ε e^{ikz} e^{−i(ω−ω₀)t} + ε* e^{−ikz} e^{i(ω+ω₀)t}) f − γC₂
/// ```
pub fn linearized_oracle(
    spec: &OdeSpec,
    pump: &PumpParams,
    probe: &ProbeParams,
    medium: &MediumParams,
    z: f64,
) -> Result<Series<LinearizedState>> {
    spec.validate()?;
    pump.validate()?;
    probe.validate()?;
    medium.validate()?;
    spec.check_optical_step(probe, medium)?;
    let pump_part = pump_rhs(pump);
    let coupling = Complex64::new(0.0, medium.d12_sq.sqrt() / HBAR);
    let phase = Complex64::from_polar(1.0, probe.omega / C_LIGHT * z);
    let eps_f = phase * probe.eps_probe;
    let eps_b = eps_f.conj();
    let delta = probe.omega - medium.omega0;
    let sum = probe.omega + medium.omega0;
    let gamma = medium.gamma;
    let rhs = |t: f64, y: &[Complex64; 4]| {
        let [df, dg] = pump_part(t, &[y[0], y[1]]);
        let slow = Complex64::from_polar(1.0, delta * t);
        let fast = Complex64::from_polar(1.0, sum * t);
        [
            df,
            dg,
            coupling * (eps_f * fast.conj() + eps_b * slow) * y[1] - y[2] * gamma,
            coupling * (eps_f * slow.conj() + eps_b * fast) * y[0] - y[3] * gamma,
        ]
    };
    let ys = run(&rhs, [Complex64::new(1.0, 0.0), ZERO, ZERO, ZERO], spec, |y| {
        norm_check(y[0], y[1])
    })?;
    Ok(Series {
        step: spec.step,
        t: (0..ys.len()).map(|i| spec.time(i)).collect(),
        values: ys
            .iter()
            .map(|y| LinearizedState {
                amps: DressedAmplitudes { f: y[0], g: y[1] },
                pert: PerturbationAmplitudes { c1: y[2], c2: y[3] },
            })
            .collect(),
    })
}

/// First-order induced dipole ⟨d⟩(t) in units of d₁₂.
pub fn induced_dipole(state: &LinearizedState, t: f64, medium: &MediumParams) -> f64 {
    let LinearizedState { amps, pert } = state;
    let coh = (amps.f.conj() * pert.c2 + pert.c1.conj() * amps.g) * Complex64::from_polar(1.0, -medium.omega0 * t);
    2.0 * coh.re
}

/// Complex amplitude P of ⟨d⟩ ≈ P e^{i(kz−ωt)} + c.c. around `tau`, from a
/// Hann window spanning `cycles` probe periods.
pub fn polarization_component(
    series: &Series<LinearizedState>,
    tau: f64,
    probe: &ProbeParams,
    medium: &MediumParams,
    z: f64,
    cycles: usize,
) -> Result<Complex64> {
    if series.len() < 2 || cycles == 0 {
        return Err(Error::InvalidParameter("demodulation: empty series or window".into()));
    }
    let h = series.step;
    let period = std::f64::consts::TAU / probe.omega;
    let m = (cycles as f64 * period / h).round() as usize;
    let covered = m as f64 * h / period;
    if (covered - cycles as f64).abs() > WINDOW_TOL || m < 4 {
        return Err(Error::WindowMisaligned { cycles: covered });
    }
    let centre = ((tau - series.t[0]) / h).round();
    let start = centre - (m / 2) as f64;
    if start < 0.0 || start as usize + m >= series.len() {
        return Err(Error::InvalidParameter(format!(
            "demodulation window around {tau:e} leaves the series"
        )));
    }
    let start = start as usize;
    let mut acc = ZERO;
    let mut norm = 0.0;
    for j in 0..=m {
        let i = start + j;
        let w = (std::f64::consts::PI * j as f64 / m as f64).sin().powi(2);
        let t = series.t[i];
        let d = induced_dipole(&series.values[i], t, medium);
        acc += Complex64::from_polar(w * d, probe.omega * t);
        norm += w;
    }
    let d12 = medium.d12_sq.sqrt();
    Ok(acc / norm * d12 * Complex64::from_polar(1.0, -probe.omega / C_LIGHT * z))
}

/// Normalized response −iPℏ/(d²ε), comparable with `Response::response`.
pub fn oracle_response(
    series: &Series<LinearizedState>,
    tau: f64,
    probe: &ProbeParams,
    medium: &MediumParams,
    z: f64,
) -> Result<Complex64> {
    if probe.eps_probe == 0.0 {
        return Err(Error::InvalidParameter("oracle response needs a nonzero probe".into()));
    }
    let p = polarization_component(series, tau, probe, medium, z, DEMOD_CYCLES)?;
    Ok(-I * p * HBAR / (medium.d12_sq * probe.eps_probe))
}

/// Composite Simpson rule for σ₁, σ₂, θ₁, θ₂ over [t0, t] with `n` panels
/// (rounded up to even), using only the hypergeometric closed form.
pub fn simpson_integrals(
    t: f64,
    t0: f64,
    pump: &PumpParams,
    probe: &ProbeParams,
    medium: &MediumParams,
    n: usize,
) -> Result<ResponseIntegrals> {
    if t.is_nan() || t0.is_nan() || t < t0 {
        return Err(Error::InvalidParameter("simpson: need t ≥ t0".into()));
    }
    let n = (n.max(2) + 1) & !1;
    let atom = DressedAtom::new(*pump)?;
    let h = (t - t0) / n as f64;
    let delta = probe.omega - medium.omega0;
    let sum = probe.omega + medium.omega0;
    let mut acc = [ZERO; 4];
    for i in 0..=n {
        let tp = t0 + h * i as f64;
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let DressedAmplitudes { f, g } = atom.exact(tp)?;
        let k = w * (-medium.gamma * (t - tp)).exp();
        let slow = Complex64::from_polar(k, delta * tp);
        let fast = Complex64::from_polar(k, sum * tp);
        acc[0] += g * fast.conj();
        acc[1] += g * slow;
        acc[2] += f * fast;
        acc[3] += f * slow.conj();
    }
    let s = h / 3.0;
    Ok(ResponseIntegrals {
        sigma1: acc[0] * s,
        sigma2: acc[1] * s,
        theta1: acc[2] * s,
        theta2: acc[3] * s,
    })
}

/// The printed excited-state bracket (1−u)^σ F(a,b;c;u) − (1−u)^{σ+1} F(a+1,b+1;c+1;u)
/// carried with the rotating-frame phase e^{−iΔt}, u = −e^{t/T}.
pub fn printed_excited_amplitude(pump: &PumpParams, t: f64) -> Result<Complex64> {
    let tt = pump.switch_time;
    let om = pump.rabi();
    let a = Complex64::new(0.0, tt / 2.0 * (-pump.delta - 2.0 * pump.v0 + om));
    let b = Complex64::new(0.0, tt / 2.0 * (-pump.delta - 2.0 * pump.v0 - om));
    let c = Complex64::new(0.0, -pump.delta * tt);
    let sigma = Complex64::new(0.0, -pump.v0 * tt);
    let u = -(t / tt).exp();
    let f0 = Hyp2F1::new(Hyp2F1Params::new(a, b, c))?.eval(u)?;
    let f1 = Hyp2F1::new(Hyp2F1Params::new(a + 1.0, b + 1.0, c + 1.0))?.eval(u)?;
    let w = Complex64::new(1.0 - u, 0.0);
    let bracket = w.powc(sigma) * f0 - w.powc(sigma + 1.0) * f1;
    Ok(Complex64::from_polar(1.0, -pump.delta * t) * bracket)
}

/// Least-squares K in g_oracle ≈ K·g_printed over the samples, with the
/// relative residual of the fit.
pub fn fit_g_normalization(pump: &PumpParams, series: &Series<DressedAmplitudes>) -> Result<(Complex64, f64)> {
    let mut num = ZERO;
    let mut den = 0.0;
    let mut pairs = Vec::with_capacity(series.len());
    for (t, amps) in series.t.iter().zip(&series.values) {
        let p = printed_excited_amplitude(pump, *t)?;
        num += p.conj() * amps.g;
        den += p.norm_sqr();
        pairs.push((p, amps.g));
    }
    if den == 0.0 {
        return Err(Error::Degenerate(
            "g fit: printed amplitude vanishes on the window".into(),
        ));
    }
    let k = num / den;
    let scale = pairs.iter().map(|(_, o)| o.norm()).fold(0.0, f64::max);
    let resid = pairs.iter().map(|(p, o)| (o - k * p).norm()).fold(0.0, f64::max) / scale.max(f64::MIN_POSITIVE);
    Ok((k, resid))
}

/// Keeps only every `stride`-th sample (always including the first).
pub fn thin<T: Clone>(series: &Series<T>, stride: usize) -> Series<T> {
    let stride = stride.max(1);
    Series {
        step: series.step * stride as f64,
        t: series.t.iter().step_by(stride).copied().collect(),
        values: series.values.iter().step_by(stride).cloned().collect(),
    }
}
