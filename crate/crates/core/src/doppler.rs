//! Maxwell–Boltzmann averaging over atomic velocity along the beam axis.
//!
//! An atom moving at v sees its transition at ω₀(1 + v/c) while the pump
//! carrier stays fixed, so Δ → Δ − ω₀v/c. Each velocity class contributes
//! additively to the polarization, which is why the exponent (not the field)
//! is averaged by default.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dressed::PumpParams;
use crate::error::{Error, Result};
use crate::propagation::{
    apply_exponent, field_from_exponents, incident_envelope, intensity_profile, EnvelopeField, EnvelopeOptions,
    GridSpec, MediumParams, Propagator,
};
use crate::quad::gauss_hermite;
use crate::response::ProbeParams;
use crate::units::{AMU, C_LIGHT, K_B};

pub const DEFAULT_NODES: usize = 16;

/// What is averaged over velocity classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Average {
    #[default]
    Exponent,
    Field,
}

impl std::fmt::Display for Average {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Average::Exponent => "exponent",
            Average::Field => "field",
        })
    }
}

/// Gauss–Hermite velocity quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DopplerSpec {
    pub n_nodes: usize,
    /// One-dimensional velocity spread √(k_B T / m), cm/s.
    pub v_sigma: f64,
    #[serde(default)]
    pub average: Average,
}

impl DopplerSpec {
    /// From gas temperature (K) and atomic mass (amu).
    pub fn thermal(temperature_k: f64, mass_amu: f64, n_nodes: usize) -> Result<Self> {
        if !(temperature_k.is_finite() && temperature_k >= 0.0) {
            return Err(Error::InvalidParameter(
                "doppler: temperature must be non-negative".into(),
            ));
        }
        if !(mass_amu.is_finite() && mass_amu > 0.0) {
            return Err(Error::InvalidParameter("doppler: atomic mass must be positive".into()));
        }
        Ok(Self {
            n_nodes,
            v_sigma: (K_B * temperature_k / (mass_amu * AMU)).sqrt(),
            average: Average::Exponent,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_nodes == 0 {
            return Err(Error::InvalidParameter("doppler: need at least one node".into()));
        }
        if !(self.v_sigma.is_finite() && self.v_sigma >= 0.0) {
            return Err(Error::InvalidParameter("doppler: v_sigma must be non-negative".into()));
        }
        Ok(())
    }

    /// Velocities and probability weights (summing to 1).
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let (x, w) = gauss_hermite(self.n_nodes);
        let norm = std::f64::consts::PI.sqrt();
        x.iter()
            .zip(&w)
            .map(|(x, w)| (std::f64::consts::SQRT_2 * self.v_sigma * x, w / norm))
            .collect()
    }

    /// Doppler detuning spread ω₀σ_v/c.
    pub fn detuning_spread(&self, omega0: f64) -> f64 {
        omega0 * self.v_sigma / C_LIGHT
    }
}

/// Parameters seen by an atom moving at v (cm/s).
pub fn doppler_shifted_params(
    v: f64,
    pump: &PumpParams,
    probe: &ProbeParams,
    medium: &MediumParams,
) -> (PumpParams, ProbeParams, MediumParams) {
    if v == 0.0 {
        return (*pump, *probe, *medium);
    }
    let shift = medium.omega0 * v / C_LIGHT;
    let pump = PumpParams {
        delta: pump.delta - shift,
        ..*pump
    };
    let medium = MediumParams {
        omega0: medium.omega0 + shift,
        ..*medium
    };
    (pump, *probe, medium)
}

/// Velocity-averaged envelope on the grid.
pub fn doppler_average_envelope(
    grid: &GridSpec,
    pump: &PumpParams,
    probe: &ProbeParams,
    medium: &MediumParams,
    spec: &DopplerSpec,
    opts: &EnvelopeOptions,
) -> Result<EnvelopeField> {
    spec.validate()?;
    grid.validate()?;
    if spec.v_sigma == 0.0 {
        return intensity_profile(grid, pump, probe, medium, opts);
    }
    let taus = grid.taus();
    let nodes = spec.nodes();
    let per_node: Vec<Vec<Complex64>> = nodes
        .par_iter()
        .map(|&(v, _)| {
            let (p, q, m) = doppler_shifted_params(v, pump, probe, medium);
            Propagator::new(&p, &q, &m, grid.z, grid.n_z_quadrature, opts)?.exponents(&taus)
        })
        .collect::<Result<_>>()?;

    match spec.average {
        Average::Exponent => {
            let mut avg = vec![Complex64::new(0.0, 0.0); taus.len()];
            for ((_, w), e) in nodes.iter().zip(&per_node) {
                for (a, x) in avg.iter_mut().zip(e) {
                    *a += x * w;
                }
            }
            Ok(field_from_exponents(grid, taus, &avg, pump, probe, opts.saturation_cap))
        }
        Average::Field => {
            let incident: Vec<Complex64> = taus.iter().map(|&t| incident_envelope(t, pump, probe)).collect();
            let mut values = vec![Complex64::new(0.0, 0.0); taus.len()];
            let mut saturated = vec![false; taus.len()];
            for ((_, w), e) in nodes.iter().zip(&per_node) {
                for i in 0..taus.len() {
                    let s = apply_exponent(incident[i], e[i], opts.saturation_cap);
                    values[i] += s.value * w;
                    saturated[i] |= s.saturated;
                }
            }
            Ok(EnvelopeField {
                grid: *grid,
                tau: taus,
                values,
                incident,
                saturated,
                switch_time: pump.switch_time,
            })
        }
    }
}
