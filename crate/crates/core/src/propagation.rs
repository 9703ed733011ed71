//! Probe envelope after propagating a depth z, and pulse-train metrics.
//!
//! ```text
//! ε(z, τ) = ε_p / (1 + e^{−τ/T}) · exp E(z, τ)
//! E       = −κ z R(τ)                                    resonant / full
//! E       = κ [ e^{iδτ} f*θ₁ φ(2ω/c) − e^{iδτ} g σ₁ φ(−2ω₀/c) ]   literal
//! κ       = 2πρω₀²|d₁₂|² / (ℏcω),     φ(q) = ∫₀^z e^{iqz̃} dz̃
//! ```
//!
//! In the co-propagating geometry every time-dependent factor is a function
//! of retarded time only, so the depth integrand of the resonant terms is
//! constant in z̃.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dressed::{sigmoid, PumpParams};
use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::response::{Mode, ProbeParams, Regime, Response};
use crate::units::{C_LIGHT, HBAR};

/// Default clamp on Re E.
pub const DEFAULT_SATURATION_CAP: f64 = 50.0;
/// Start of the metric analysis window, in switching times.
pub const ANALYSIS_FROM: f64 = 10.0;
/// Minimum number of peaks for [`train_metrics`].
pub const MIN_PEAKS: usize = 3;

/// Two-level medium. Frequencies angular (rad/s), CGS-Gaussian units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    pub omega0: f64,
    /// |d₁₂|² in esu²·cm².
    pub d12_sq: f64,
    /// Number density, cm⁻³.
    pub rho: f64,
    /// Homogeneous half-linewidth, rad/s.
    #[serde(default)]
    pub gamma: f64,
    /// Atomic mass, g.
    #[serde(default)]
    pub mass: f64,
    /// Gas temperature, K.
    #[serde(default)]
    pub temperature: f64,
}

impl MediumParams {
    pub fn new(omega0: f64, d12_sq: f64, rho: f64) -> Self {
        Self {
            omega0,
            d12_sq,
            rho,
            gamma: 0.0,
            mass: 0.0,
            temperature: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(Error::InvalidParameter("medium: omega0 must be positive".into()));
        }
        for (name, v) in [
            ("d12_sq", self.d12_sq),
            ("rho", self.rho),
            ("gamma", self.gamma),
            ("mass", self.mass),
            ("temperature", self.temperature),
        ] {
            if !ok(v) {
                return Err(Error::InvalidParameter(format!(
                    "medium: {name} must be non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Retarded-time grid and depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub tau_min: f64,
    pub tau_max: f64,
    pub n_tau: usize,
    /// Depth, cm.
    pub z: f64,
    #[serde(default = "default_nz")]
    pub n_z_quadrature: usize,
}

fn default_nz() -> usize {
    16
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_min.is_finite() && self.tau_max.is_finite() && self.tau_min < self.tau_max) {
            return Err(Error::InvalidParameter("grid: need finite tau_min < tau_max".into()));
        }
        if self.n_tau < 2 || self.n_z_quadrature < 2 {
            return Err(Error::InvalidParameter(
                "grid: n_tau and n_z_quadrature must be ≥ 2".into(),
            ));
        }
        if !(self.z.is_finite() && self.z >= 0.0) {
            return Err(Error::InvalidParameter("grid: z must be non-negative".into()));
        }
        Ok(())
    }

    /// Sample times; node i is the same value for any n_tau sharing it.
    pub fn taus(&self) -> Vec<f64> {
        let span = self.tau_max - self.tau_min;
        let last = (self.n_tau - 1) as f64;
        (0..self.n_tau)
            .map(|i| self.tau_min + span * (i as f64 / last))
            .collect()
    }
}

/// Options shared by every envelope evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeOptions {
    pub mode: Mode,
    pub regime: Regime,
    /// Probe-on time; `None` means −20 T.
    pub t0: Option<f64>,
    pub saturation_cap: f64,
}

impl Default for EnvelopeOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Resonant,
            regime: Regime::Transient,
            t0: None,
            saturation_cap: DEFAULT_SATURATION_CAP,
        }
    }
}

/// Sampled envelope at fixed depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeField {
    pub grid: GridSpec,
    pub tau: Vec<f64>,
    pub values: Vec<Complex64>,
    pub incident: Vec<Complex64>,
    /// Samples whose exponent hit the saturation cap.
    pub saturated: Vec<bool>,
    /// Switching time of the pump, used to place the analysis window.
    pub switch_time: f64,
}

impl EnvelopeField {
    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn incident_intensity(&self) -> Vec<f64> {
        self.incident.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn any_saturated(&self) -> bool {
        self.saturated.iter().any(|&s| s)
    }
}

/// Pulse-train figures of merit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainMetrics {
    pub repetition_period: f64,
    pub peak_fwhm: f64,
    pub contrast: f64,
    pub mean_gain: f64,
    pub n_peaks: usize,
}

/// One envelope sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSample {
    pub value: Complex64,
    pub saturated: bool,
}

/// κ = 2πρω₀²|d₁₂|² / (ℏcω), in cm⁻¹·s⁻¹.
pub fn coupling_constant(medium: &MediumParams, probe: &ProbeParams) -> f64 {
    2.0 * std::f64::consts::PI * medium.rho * medium.omega0 * medium.omega0 * medium.d12_sq
        / (HBAR * C_LIGHT * probe.omega)
}

/// ∫₀^z e^{iqz̃} dz̃: Gauss–Legendre while the phase is resolved, closed form beyond.
pub fn depth_factor(q: f64, z: f64, nodes: &(Vec<f64>, Vec<f64>)) -> Complex64 {
    if q == 0.0 || z == 0.0 {
        return Complex64::new(z, 0.0);
    }
    let n = nodes.0.len() as f64;
    if (q * z).abs() <= 0.5 * n {
        let half = 0.5 * z;
        nodes
            .0
            .iter()
            .zip(&nodes.1)
            .map(|(x, w)| Complex64::from_polar(w * half, q * half * (x + 1.0)))
            .sum()
    } else {
        (Complex64::from_polar(1.0, q * z) - 1.0) / Complex64::new(0.0, q)
    }
}

/// Prepared exponent evaluator for one parameter set.
#[derive(Debug, Clone)]
pub struct Propagator {
    response: Option<Response>,
    kappa: f64,
    mode: Mode,
    z: f64,
    phi_literal: [Complex64; 2],
}

impl Propagator {
    pub fn new(
        pump: &PumpParams,
        probe: &ProbeParams,
        medium: &MediumParams,
        z: f64,
        n_z: usize,
        opts: &EnvelopeOptions,
    ) -> Result<Self> {
        pump.validate()?;
        probe.validate()?;
        medium.validate()?;
        let kappa = coupling_constant(medium, probe);
        let trivial = kappa == 0.0 || z == 0.0;
        let response = if trivial {
            None
        } else {
            Some(Response::new(pump, probe, medium, opts.mode, opts.regime, opts.t0)?)
        };
        let nodes = gauss_legendre(n_z.max(1));
        let phi_literal = [
            depth_factor(2.0 * probe.omega / C_LIGHT, z, &nodes),
            depth_factor(-2.0 * medium.omega0 / C_LIGHT, z, &nodes),
        ];
        Ok(Self {
            response,
            kappa,
            mode: opts.mode,
            z,
            phi_literal,
        })
    }

    pub fn response(&self) -> Option<&Response> {
        self.response.as_ref()
    }

    /// E(z, τ) at each τ; exactly zero when κ = 0 or z = 0.
    pub fn exponents(&self, taus: &[f64]) -> Result<Vec<Complex64>> {
        let Some(resp) = &self.response else {
            return Ok(vec![Complex64::new(0.0, 0.0); taus.len()]);
        };
        let integrals = resp.trace(taus)?;
        taus.par_iter()
            .zip(integrals.par_iter())
            .map(|(&tau, s)| {
                let amps = resp.amplitudes(tau)?;
                Ok(match self.mode {
                    Mode::Resonant | Mode::Full => -self.kappa * self.z * resp.response(tau, &amps, s),
                    Mode::Literal => {
                        let [a, b] = resp.literal_terms(tau, &amps, s);
                        self.kappa * (a * self.phi_literal[0] + b * self.phi_literal[1])
                    }
                })
            })
            .collect()
    }
}

/// Incident envelope ε_p / (1 + e^{−τ/T}).
pub fn incident_envelope(tau: f64, pump: &PumpParams, probe: &ProbeParams) -> Complex64 {
    Complex64::new(probe.eps_probe * sigmoid(tau / pump.switch_time), 0.0)
}

/// Applies the saturation cap to an exponent.
pub fn apply_exponent(incident: Complex64, e: Complex64, cap: f64) -> EnvelopeSample {
    if e.re > cap {
        EnvelopeSample {
            value: incident * Complex64::new(cap, e.im).exp(),
            saturated: true,
        }
    } else {
        EnvelopeSample {
            value: incident * e.exp(),
            saturated: false,
        }
    }
}

/// Envelope at a single (z, τ).
pub fn envelope(
    z: f64,
    tau: f64,
    pump: &PumpParams,
    probe: &ProbeParams,
    medium: &MediumParams,
    n_z: usize,
    opts: &EnvelopeOptions,
) -> Result<EnvelopeSample> {
    let prop = Propagator::new(pump, probe, medium, z, n_z, opts)?;
    let e = prop.exponents(&[tau])?[0];
    Ok(apply_exponent(
        incident_envelope(tau, pump, probe),
        e,
        opts.saturation_cap,
    ))
}

/// Assembles a field from per-sample exponents.
pub fn field_from_exponents(
    grid: &GridSpec,
    taus: Vec<f64>,
    exponents: &[Complex64],
    pump: &PumpParams,
    probe: &ProbeParams,
    cap: f64,
) -> EnvelopeField {
    let incident: Vec<Complex64> = taus.iter().map(|&t| incident_envelope(t, pump, probe)).collect();
    let samples: Vec<EnvelopeSample> = incident
        .iter()
        .zip(exponents)
        .map(|(&inc, &e)| apply_exponent(inc, e, cap))
        .collect();
    EnvelopeField {
        grid: *grid,
        tau: taus,
        values: samples.iter().map(|s| s.value).collect(),
        saturated: samples.iter().map(|s| s.saturated).collect(),
        incident,
        switch_time: pump.switch_time,
    }
}

/// Envelope on the grid's τ samples at depth grid.z.
pub fn intensity_profile(
    grid: &GridSpec,
    pump: &PumpParams,
    probe: &ProbeParams,
    medium: &MediumParams,
    opts: &EnvelopeOptions,
) -> Result<EnvelopeField> {
    grid.validate()?;
    let prop = Propagator::new(pump, probe, medium, grid.z, grid.n_z_quadrature, opts)?;
    let taus = grid.taus();
    let e = prop.exponents(&taus)?;
    Ok(field_from_exponents(grid, taus, &e, pump, probe, opts.saturation_cap))
}

fn parabolic_vertex(x: [f64; 3], y: [f64; 3]) -> f64 {
    let d = (y[0] - 2.0 * y[1] + y[2]) * (x[1] - x[0]);
    if d == 0.0 || (x[2] - x[1] - (x[1] - x[0])).abs() > 1e-9 * (x[1] - x[0]).abs() {
        return x[1];
    }
    x[1] + 0.5 * (x[1] - x[0]) * (y[0] - y[2]) / (y[0] - 2.0 * y[1] + y[2])
}

fn crossing(x0: f64, y0: f64, x1: f64, y1: f64, level: f64) -> f64 {
    if y1 == y0 {
        return x0;
    }
    x0 + (level - y0) * (x1 - x0) / (y1 - y0)
}

/// Period, FWHM, contrast and gain over τ ≥ 10 T.
pub fn train_metrics(field: &EnvelopeField) -> Result<TrainMetrics> {
    let from = ANALYSIS_FROM * field.switch_time;
    let start = field.tau.partition_point(|&t| t < from);
    let x = &field.tau[start..];
    let y: Vec<f64> = field.values[start..].iter().map(|v| v.norm_sqr()).collect();
    let y_in: Vec<f64> = field.incident[start..].iter().map(|v| v.norm_sqr()).collect();
    let n = y.len();
    if n < 3 {
        return Err(Error::InsufficientPeaks {
            found: 0,
            needed: MIN_PEAKS,
        });
    }
    let (lo, hi) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let floor = 1e-9 * (hi - lo);
    let mut peaks = Vec::new();
    let mut troughs = Vec::new();
    for i in 1..n - 1 {
        if y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] - y[i - 1].min(y[i + 1]) > floor {
            peaks.push(i);
        }
        if y[i] < y[i - 1] && y[i] <= y[i + 1] {
            troughs.push(i);
        }
    }
    if peaks.len() < MIN_PEAKS || hi - lo <= 0.0 {
        return Err(Error::InsufficientPeaks {
            found: peaks.len(),
            needed: MIN_PEAKS,
        });
    }
    let pos: Vec<f64> = peaks
        .iter()
        .map(|&i| parabolic_vertex([x[i - 1], x[i], x[i + 1]], [y[i - 1], y[i], y[i + 1]]))
        .collect();
    let period = (pos[pos.len() - 1] - pos[0]) / (pos.len() - 1) as f64;

    let mean = |v: &mut dyn Iterator<Item = f64>| {
        let (s, c) = v.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
        s / c as f64
    };
    let peak_mean = mean(&mut peaks.iter().map(|&i| y[i]));
    let trough_mean = if troughs.is_empty() {
        lo
    } else {
        mean(&mut troughs.iter().map(|&i| y[i]))
    };

    let mut widths = Vec::new();
    for &p in &peaks {
        let level = trough_mean + 0.5 * (y[p] - trough_mean);
        let left = (0..p).rev().find(|&j| y[j] <= level);
        let right = (p + 1..n).find(|&j| y[j] <= level);
        if let (Some(l), Some(r)) = (left, right) {
            let xl = crossing(x[l], y[l], x[l + 1], y[l + 1], level);
            let xr = crossing(x[r - 1], y[r - 1], x[r], y[r], level);
            widths.push(xr - xl);
        }
    }
    let fwhm = if widths.is_empty() {
        f64::NAN
    } else {
        widths.iter().sum::<f64>() / widths.len() as f64
    };
    let gain = y.iter().sum::<f64>() / y_in.iter().sum::<f64>();
    Ok(TrainMetrics {
        repetition_period: period,
        peak_fwhm: fwhm,
        contrast: if trough_mean > 0.0 {
            peak_mean / trough_mean
        } else {
            f64::INFINITY
        },
        mean_gain: gain,
        n_peaks: peaks.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const T: f64 = 1e-12;
    const W0: f64 = 1e15;

    fn synthetic(a: f64, omega: f64) -> EnvelopeField {
        let grid = GridSpec {
            tau_min: 0.0,
            tau_max: 100.0 * T,
            n_tau: 20001,
            z: 1.0,
            n_z_quadrature: 8,
        };
        let tau = grid.taus();
        let values: Vec<Complex64> = tau
            .iter()
            .map(|&t| Complex64::new((0.5 * a * (omega * t).cos()).exp(), 0.0))
            .collect();
        EnvelopeField {
            grid,
            incident: vec![Complex64::new(1.0, 0.0); tau.len()],
            saturated: vec![false; tau.len()],
            tau,
            values,
            switch_time: T,
        }
    }

    #[test]
    fn coupling_constant_scaling() {
        let probe = ProbeParams::new(W0 + 5.004e11, 1.0);
        let m = MediumParams::new(W0, 2e-34, 1e15);
        let k = coupling_constant(&m, &probe);
        let expected = 2.0 * std::f64::consts::PI * 1e15 * 1e30 * 2e-34 / (HBAR * C_LIGHT * (W0 + 5.004e11));
        assert_relative_eq!(k, expected, max_relative = 1e-15);
        assert_eq!(coupling_constant(&MediumParams { rho: 0.0, ..m }, &probe), 0.0);
        assert_relative_eq!(
            coupling_constant(&MediumParams { rho: 2e15, ..m }, &probe),
            2.0 * k,
            max_relative = 1e-15
        );
    }

    #[test]
    fn depth_factor_branches_agree() {
        let nodes = gauss_legendre(16);
        for q in [-3.0, 0.5, 7.9] {
            let z = 1.0;
            let closed = (Complex64::from_polar(1.0, q * z) - 1.0) / Complex64::new(0.0, q);
            assert!((depth_factor(q, z, &nodes) - closed).norm() < 1e-13);
        }
        assert_eq!(depth_factor(0.0, 2.5, &nodes), Complex64::new(2.5, 0.0));
        assert_eq!(depth_factor(1e5, 0.0, &nodes), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn synthetic_train_period_exact() {
        let omega = 2.0 * std::f64::consts::PI / (7.3 * T);
        let m = train_metrics(&synthetic(2.0, omega)).unwrap();
        let dt = 100.0 * T / 20000.0;
        assert!((m.repetition_period - 7.3 * T).abs() < 0.01 * dt);
        assert!(m.contrast > 1.0);
    }

    #[test]
    fn stronger_modulation_narrows_peaks() {
        let omega = 2.0 * std::f64::consts::PI / (7.3 * T);
        let weak = train_metrics(&synthetic(1.0, omega)).unwrap();
        let strong = train_metrics(&synthetic(4.0, omega)).unwrap();
        assert!(strong.peak_fwhm < weak.peak_fwhm);
        assert!(strong.contrast > weak.contrast);
    }

    #[test]
    fn flat_field_has_no_peaks() {
        let mut f = synthetic(0.0, 1.0);
        f.values.iter_mut().for_each(|v| *v = Complex64::new(1.0, 0.0));
        assert!(matches!(train_metrics(&f), Err(Error::InsufficientPeaks { .. })));
    }

    #[test]
    fn saturation_is_flagged() {
        let s = apply_exponent(Complex64::new(1.0, 0.0), Complex64::new(80.0, 1.0), 50.0);
        assert!(s.saturated);
        assert!(s.value.norm().is_finite());
        let s = apply_exponent(Complex64::new(1.0, 0.0), Complex64::new(-80.0, 1.0), 50.0);
        assert!(!s.saturated);
    }

    #[test]
    fn grid_nodes_shared_under_refinement() {
        let g = GridSpec {
            tau_min: -3e-12,
            tau_max: 7e-11,
            n_tau: 101,
            z: 1.0,
            n_z_quadrature: 8,
        };
        let fine = GridSpec { n_tau: 201, ..g };
        let (a, b) = (g.taus(), fine.taus());
        for i in 0..a.len() {
            assert_eq!(a[i], b[2 * i]);
        }
    }
}
