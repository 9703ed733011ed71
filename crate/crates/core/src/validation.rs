//! Tolerance suites comparing the analytic chain with the oracles in
//! [`crate::verify`]. Each check records the measured figure and its limit;
//! informational checks are reported but never fail a suite.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dressed::{DressedAtom, PumpParams};
use crate::error::{Error, Result};
use crate::propagation::{coupling_constant, EnvelopeOptions, MediumParams, Propagator};
use crate::response::{perturbation_amplitudes, Mode, ProbeParams, Regime, Response};
use crate::verify::{
    fit_g_normalization, linearized_oracle, oracle_response, simpson_integrals, tdse_oracle, tdse_sample, OdeSpec,
    Series, STEPS_PER_CYCLE,
};

const T: f64 = 1e-12;

/// (ΔT, V₀T) sets used for the amplitude oracle comparison.
pub const ORACLE_SETS: [(f64, f64); 3] = [(-5.0, 1.0), (-1.0, 5.0), (1.0, 0.1)];
/// ΔT values of the unitarity grid.
pub const UNITARITY_DELTAS: [f64; 3] = [-5.0, -1.0, 2.0];
/// V₀T values of the unitarity grid.
pub const UNITARITY_COUPLINGS: [f64; 3] = [0.1, 1.0, 5.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Atom,
    Response,
    Polarization,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "atom" => Ok(Suite::Atom),
            "response" => Ok(Suite::Response),
            "polarization" => Ok(Suite::Polarization),
            other => Err(Error::config("suite", "atom | response | polarization", other)),
        }
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Suite::Atom => "atom",
            Suite::Response => "response",
            Suite::Polarization => "polarization",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
    pub informational: bool,
}

impl Check {
    /// Passes when value ≤ limit.
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            pass: value <= limit,
            informational: false,
        }
    }

    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit: f64::NAN,
            pass: true,
            informational: true,
        }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.informational {
            write!(f, "INFO  {}: {:.3e}", self.name, self.value)
        } else {
            let tag = if self.pass { "PASS" } else { "FAIL" };
            write!(f, "{tag}  {}: {:.3e} (limit {:.1e})", self.name, self.value, self.limit)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn run_suite(suite: Suite) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Atom => atom_checks()?,
        Suite::Response => response_checks()?,
        Suite::Polarization => polarization_checks()?,
    };
    Ok(SuiteReport { suite, checks })
}

fn pump(dt: f64, vt: f64) -> PumpParams {
    PumpParams::new(vt / T, dt / T, T)
}

/// Largest |exact − oracle| over 200 points in [−10T, 40T].
pub fn amplitude_oracle_error(pump: &PumpParams) -> Result<f64> {
    let tt = pump.switch_time;
    let spec = OdeSpec::for_amplitudes(pump, -30.0 * tt, 40.0 * tt)?;
    let times: Vec<f64> = (0..200).map(|i| (-10.0 + 50.0 * i as f64 / 199.0) * tt).collect();
    let oracle = tdse_sample(&spec, pump, &times)?;
    let atom = DressedAtom::new(*pump)?;
    let mut worst: f64 = 0.0;
    for (t, o) in times.iter().zip(&oracle) {
        let a = atom.exact(*t)?;
        worst = worst.max((a.f - o.f).norm()).max((a.g - o.g).norm());
    }
    Ok(worst)
}

/// Largest | |f|² + |g|² − 1 | of the closed form over [−10T, 40T].
pub fn unitarity_defect(pump: &PumpParams, n: usize) -> Result<f64> {
    let atom = DressedAtom::new(*pump)?;
    let tt = pump.switch_time;
    (0..n)
        .map(|i| {
            atom.exact((-10.0 + 50.0 * i as f64 / (n - 1) as f64) * tt)
                .map(|a| a.norm_defect())
        })
        .try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))
}

/// Relative |exact − asymptotic| at t and the fitted slope of its logarithm
/// over [10T, 25T], in units of 1/T.
pub fn asymptotic_law(pump: &PumpParams) -> Result<(f64, f64)> {
    let atom = DressedAtom::new(*pump)?;
    let tt = pump.switch_time;
    let diff = |t: f64| -> Result<f64> {
        let e = atom.exact(t)?;
        let a = atom.asymptotic(t);
        Ok(((e.f - a.f).norm() + (e.g - a.g).norm()) / (e.f.norm() + e.g.norm()))
    };
    let at30 = diff(30.0 * tt)?;
    let n = 31;
    let mut pts = Vec::with_capacity(n);
    for i in 0..n {
        let x = 10.0 + 15.0 * i as f64 / (n - 1) as f64;
        pts.push((x, diff(x * tt)?.ln()));
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok((at30, sxy / sxx))
}

fn atom_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let errs: Vec<Result<f64>> = ORACLE_SETS
        .par_iter()
        .map(|&(dt, vt)| amplitude_oracle_error(&pump(dt, vt)))
        .collect();
    for ((dt, vt), e) in ORACLE_SETS.iter().zip(errs) {
        out.push(Check::at_most(
            format!("closed form vs RK4, ΔT={dt} V0T={vt}"),
            e?,
            1e-6,
        ));
    }

    let mut worst: f64 = 0.0;
    for &dt in &UNITARITY_DELTAS {
        for &vt in &UNITARITY_COUPLINGS {
            worst = worst.max(unitarity_defect(&pump(dt, vt), 501)?);
        }
    }
    out.push(Check::at_most("unitarity defect, 3x3 grid", worst, 1e-8));

    for &(dt, vt) in &ORACLE_SETS[..2] {
        let (at30, slope) = asymptotic_law(&pump(dt, vt))?;
        out.push(Check::at_most(
            format!("asymptotic error at 30T, ΔT={dt} V0T={vt}"),
            at30,
            1e-8,
        ));
        out.push(Check::at_most(
            format!("asymptotic log-slope deviation from -1/T, ΔT={dt} V0T={vt}"),
            (slope + 1.0).abs(),
            0.05,
        ));
    }

    let mut ks = Vec::new();
    for &(dt, vt) in &ORACLE_SETS {
        let p = pump(dt, vt);
        let spec = OdeSpec::for_amplitudes(&p, -30.0 * T, 10.0 * T)?;
        let s = tdse_oracle(&spec, &p)?;
        let keep: Vec<usize> = (0..s.len()).filter(|&i| s.t[i] >= -10.0 * T).step_by(50).collect();
        let window = Series {
            step: s.step * 50.0,
            t: keep.iter().map(|&i| s.t[i]).collect(),
            values: keep.iter().map(|&i| s.values[i]).collect(),
        };
        let (k, resid) = fit_g_normalization(&p, &window)?;
        out.push(Check::at_most(
            format!("printed g fit residual, ΔT={dt} V0T={vt}"),
            resid,
            1e-6,
        ));
        ks.push(k);
    }
    let spread = ks.iter().map(|k| (k - ks[0]).norm()).fold(0.0, f64::max);
    out.push(Check::at_most(
        "printed g constant spread across parameters",
        spread,
        1e-6,
    ));
    out.push(Check::at_most(
        "printed g constant distance from -1",
        (ks[0] + 1.0).norm(),
        1e-6,
    ));

    let p = pump(-5.0, 1.0);
    let end = |step: f64| -> Result<Complex64> {
        let spec = OdeSpec::new(step, -30.0 * T, 20.0 * T)?;
        Ok(tdse_oracle(&spec, &p)?.values.last().unwrap().g)
    };
    let (a, b, c) = (end(T / 1000.0)?, end(T / 2000.0)?, end(T / 4000.0)?);
    out.push(Check::at_most(
        "oracle step-halving change",
        (a - b).norm() / b.norm(),
        1e-8,
    ));
    out.push(Check::info(
        "oracle convergence order",
        ((a - b).norm() / (b - c).norm()).log2(),
    ));
    Ok(out)
}

/// Fig. 1-regime pump, probe and medium with the shipped coupling choice.
pub fn fig1_params(v0: f64, gamma: f64) -> (PumpParams, ProbeParams, MediumParams) {
    let w0 = 1e15;
    let medium = MediumParams {
        gamma,
        ..MediumParams::new(w0, 2e-34, 1e15)
    };
    (
        PumpParams::new(v0, -5e12, T),
        ProbeParams::new(w0 + 5.004e11, 1.0),
        medium,
    )
}

fn response_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let p = pump(-5.0, 1.0);
    let medium = MediumParams {
        gamma: 1e10,
        ..MediumParams::new(1e14, 1e-35, 1e12)
    };
    let probe = ProbeParams::new(1e14 + 5e11, 1.0);
    let (t0, t) = (-10.0 * T, 3.0 * T);
    let n = ((t - t0) * (probe.omega + medium.omega0) / 0.02) as usize;
    let s = simpson_integrals(t, t0, &p, &probe, &medium, n)?;
    let q = Response::new(&p, &probe, &medium, Mode::Full, Regime::Transient, Some(t0))?.integrals_at(t)?;
    out.push(Check::at_most(
        "adaptive quadrature vs Simpson at 10x resolution",
        q.max_diff(&s) / s.max_norm(),
        1e-7,
    ));

    let free = PumpParams::new(0.0, -5e12, T);
    let delta = probe.omega - medium.omega0;
    let undamped = MediumParams { gamma: 0.0, ..medium };
    let s = Response::new(&free, &probe, &undamped, Mode::Resonant, Regime::Transient, Some(t0))?.integrals_at(t)?;
    let i = Complex64::new(0.0, 1.0);
    let exact = ((-i * delta * t).exp() - (-i * delta * t0).exp()) / (-i * delta);
    out.push(Check::at_most(
        "free atom theta2 closed form",
        (s.theta2 - exact).norm() / exact.norm(),
        1e-10,
    ));

    let (p, probe, medium) = fig1_params(5e12, 1e8);
    let z = 0.37;
    let t0 = -20.0 * T;
    let spec = OdeSpec::for_optical(&probe, t0, 12.0 * T, STEPS_PER_CYCLE)?;
    let series = linearized_oracle(&spec, &p, &probe, &medium, z)?;
    let resp = Response::new(&p, &probe, &medium, Mode::Full, Regime::Transient, Some(t0))?;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for k in 0..8 {
        let target = (-5.0 + 2.0 * k as f64) * T;
        let idx = ((target - t0) / spec.step).round() as usize;
        let ts = series.t[idx];
        let c = perturbation_amplitudes(z, &resp.integrals_at(ts)?, &probe, &medium);
        let o = series.values[idx].pert;
        worst = worst.max((c.c1 - o.c1).norm()).max((c.c2 - o.c2).norm());
        scale = scale.max(o.c1.norm()).max(o.c2.norm());
    }
    out.push(Check::at_most(
        "perturbation amplitudes vs linearized RK4",
        worst / scale,
        1e-4,
    ));
    Ok(out)
}

/// Worst |analytic − oracle| / max|oracle| of dE/dz over τ ∈ [−5T, 15T],
/// evaluating the exponent at a tiny depth in the given mode.
pub fn exponent_derivative_error(v0: f64, gamma: f64, modes: &[Mode]) -> Result<Vec<f64>> {
    let (p, probe, medium) = fig1_params(v0, gamma);
    let t0 = -20.0 * T;
    let spec = OdeSpec::for_optical(&probe, t0, 16.0 * T, STEPS_PER_CYCLE)?;
    let series = linearized_oracle(&spec, &p, &probe, &medium, 0.0)?;
    let taus: Vec<f64> = (0..41).map(|k| (-5.0 + 0.5 * k as f64) * T).collect();
    let kappa = coupling_constant(&medium, &probe);
    let oracle: Vec<Complex64> = taus
        .iter()
        .map(|&tau| oracle_response(&series, tau, &probe, &medium, 0.0).map(|r| -kappa * r))
        .collect::<Result<_>>()?;
    let scale = oracle.iter().map(|o| o.norm()).fold(0.0, f64::max);
    let z = 1e-9;
    modes
        .par_iter()
        .map(|&mode| {
            let opts = EnvelopeOptions {
                mode,
                regime: Regime::Transient,
                t0: Some(t0),
                ..Default::default()
            };
            let e = Propagator::new(&p, &probe, &medium, z, 16, &opts)?.exponents(&taus)?;
            Ok(e.iter()
                .zip(&oracle)
                .map(|(e, o)| (e / z - o).norm())
                .fold(0.0, f64::max)
                / scale)
        })
        .collect()
}

fn polarization_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (v0, gamma) in [(5e12, 0.0), (1e12, 1e8)] {
        let errs = exponent_derivative_error(v0, gamma, &[Mode::Resonant, Mode::Full, Mode::Literal])?;
        out.push(Check::at_most(
            format!("resonant dE/dz vs demodulated dipole, V0={v0:e} gamma={gamma:e}"),
            errs[0],
            1e-3,
        ));
        out.push(Check::info(format!("full mode disagreement, V0={v0:e}"), errs[1]));
        out.push(Check::info(format!("literal mode disagreement, V0={v0:e}"), errs[2]));
    }

    let free = PumpParams::new(0.0, -5e12, T);
    let medium = MediumParams {
        gamma: 5e11,
        ..MediumParams::new(1e15, 1e-35, 1e12)
    };
    let probe = ProbeParams::new(1e15 + 3e11, 1.0);
    let spec = OdeSpec::for_optical(&probe, -20.0 * T, 50.0 * T, STEPS_PER_CYCLE)?;
    let series = linearized_oracle(&spec, &free, &probe, &medium, 0.0)?;
    let r = oracle_response(&series, 45.0 * T, &probe, &medium, 0.0)?;
    let g = Complex64::new(0.0, medium.gamma);
    let expected =
        Complex64::new(0.0, -1.0) * (1.0 / (probe.omega + medium.omega0 + g) - 1.0 / (probe.omega - medium.omega0 + g));
    out.push(Check::at_most(
        "free-atom polarizability",
        (r - expected).norm() / expected.norm(),
        1e-6,
    ));
    Ok(out)
}

pub fn report_json(r: &SuiteReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(r)?;
    s.push('\n');
    Ok(s)
}
