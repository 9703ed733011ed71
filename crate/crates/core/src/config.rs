//! JSON run configuration.
//!
//! Input is read field by field so schema errors can name the offending path.
//! Frequencies are canonically angular (rad/s); a `units` block may declare
//! `"frequency": "Hz"` or `"mass": "amu"` instead, and [`SimulationConfig::canonical_json`]
//! always writes the canonical units with every default filled in.

use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::doppler::{Average, DopplerSpec, DEFAULT_NODES};
use crate::dressed::PumpParams;
use crate::error::{Error, Result};
use crate::propagation::{EnvelopeOptions, GridSpec, MediumParams, DEFAULT_SATURATION_CAP};
use crate::response::{Mode, ProbeParams, Regime, DEFAULT_T0};
use crate::units::{AMU, K_B};

/// Smallest |ω − ω₀| accepted without damping (rad/s).
pub const DEFAULT_MIN_DETUNING: f64 = 2e8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub frequency: String,
    pub time: String,
    pub length: String,
    pub density: String,
    pub dipole: String,
    pub mass: String,
}

impl Default for Units {
    fn default() -> Self {
        Self {
            frequency: "rad/s".into(),
            time: "s".into(),
            length: "cm".into(),
            density: "cm^-3".into(),
            dipole: "CGSE".into(),
            mass: "g".into(),
        }
    }
}

/// Fully resolved configuration in canonical units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub units: Units,
    pub pump: PumpParams,
    pub probe: ProbeParams,
    pub medium: MediumParams,
    pub grid: GridSpec,
    pub doppler: DopplerSpec,
    pub mode: Mode,
    pub regime: Regime,
    /// Probe-on time, s.
    pub t0: f64,
    pub saturation_cap: f64,
    pub min_detuning: f64,
}

impl SimulationConfig {
    pub fn envelope_options(&self) -> EnvelopeOptions {
        EnvelopeOptions {
            mode: self.mode,
            regime: self.regime,
            t0: Some(self.t0),
            saturation_cap: self.saturation_cap,
        }
    }

    /// Non-fatal findings: the validity condition |Δ| ≥ 2γ.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = vec![];
        if self.medium.gamma > 0.0 && self.pump.delta.abs() < 2.0 * self.medium.gamma {
            out.push(format!(
                "|delta| = {:e} is below twice the line broadening {:e}",
                self.pump.delta.abs(),
                self.medium.gamma
            ));
        }
        out
    }

    pub fn canonical_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.canonical_value()).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.canonical_json())?;
        Ok(())
    }

    /// Re-validates after programmatic edits.
    pub fn validate(&self) -> Result<()> {
        from_value(&self.canonical_value()).map(|_| ())
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: &Path) -> Result<SimulationConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<SimulationConfig> {
    let v: Value = serde_json::from_str(text)?;
    from_value(&v)
}

fn type_name(v: &Value) -> String {
    match v {
        Value::Null => "null".into(),
        Value::Bool(b) => format!("boolean {b}"),
        Value::Number(n) => format!("number {n}"),
        Value::String(s) => format!("string {s:?}"),
        Value::Array(_) => "array".into(),
        Value::Object(_) => "object".into(),
    }
}

struct Section<'a> {
    path: String,
    map: &'a Map<String, Value>,
}

impl<'a> Section<'a> {
    fn root(v: &'a Value) -> Result<Self> {
        match v {
            Value::Object(map) => Ok(Self {
                path: String::new(),
                map,
            }),
            other => Err(Error::config("<root>", "object", type_name(other))),
        }
    }

    fn field(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for k in self.map.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::config(
                    self.field(k),
                    format!("one of {allowed:?}"),
                    "unknown field",
                ));
            }
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.map.get(key).filter(|v| !v.is_null())
    }

    fn section(&self, key: &str) -> Result<Option<Section<'a>>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Object(map)) => Ok(Some(Section {
                path: self.field(key),
                map,
            })),
            Some(other) => Err(Error::config(self.field(key), "object", type_name(other))),
        }
    }

    fn required_section(&self, key: &str) -> Result<Section<'a>> {
        self.section(key)?
            .ok_or_else(|| Error::config(self.field(key), "object", "missing"))
    }

    fn opt_f64(&self, key: &str, expected: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Number(n)) => match n.as_f64() {
                Some(x) if x.is_finite() => Ok(Some(x)),
                _ => Err(Error::config(self.field(key), expected, format!("number {n}"))),
            },
            Some(other) => Err(Error::config(self.field(key), expected, type_name(other))),
        }
    }

    fn f64(&self, key: &str, expected: &str) -> Result<f64> {
        self.opt_f64(key, expected)?
            .ok_or_else(|| Error::config(self.field(key), expected, "missing"))
    }

    fn opt_usize(&self, key: &str, expected: &str) -> Result<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Number(n)) => n
                .as_u64()
                .map(|x| Some(x as usize))
                .ok_or_else(|| Error::config(self.field(key), expected, format!("number {n}"))),
            Some(other) => Err(Error::config(self.field(key), expected, type_name(other))),
        }
    }

    fn usize(&self, key: &str, expected: &str) -> Result<usize> {
        self.opt_usize(key, expected)?
            .ok_or_else(|| Error::config(self.field(key), expected, "missing"))
    }

    fn opt_bool(&self, key: &str) -> Result<Option<bool>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Bool(b)) => Ok(Some(*b)),
            Some(other) => Err(Error::config(self.field(key), "boolean", type_name(other))),
        }
    }

    fn choice(&self, key: &str, options: &[&str], default: &str) -> Result<String> {
        match self.get(key) {
            None => Ok(default.to_string()),
            Some(Value::String(s)) if options.contains(&s.as_str()) => Ok(s.clone()),
            Some(other) => Err(Error::config(
                self.field(key),
                format!("one of {options:?}"),
                type_name(other),
            )),
        }
    }
}

fn positive(field: String, x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(Error::config(field, "positive number", format!("{x}")))
    }
}

fn non_negative(field: String, x: f64) -> Result<f64> {
    if x >= 0.0 {
        Ok(x)
    } else {
        Err(Error::config(field, "non-negative number", format!("{x}")))
    }
}

fn from_value(v: &Value) -> Result<SimulationConfig> {
    let root = Section::root(v)?;
    root.check_keys(&[
        "units",
        "pump",
        "probe",
        "medium",
        "grid",
        "doppler",
        "mode",
        "regime",
        "t0",
        "saturation_cap",
        "min_detuning",
    ])?;

    let mut units = Units::default();
    let mut freq_scale = 1.0;
    let mut mass_scale = 1.0;
    if let Some(u) = root.section("units")? {
        u.check_keys(&["frequency", "time", "length", "density", "dipole", "mass"])?;
        if u.choice("frequency", &["rad/s", "Hz"], "rad/s")? == "Hz" {
            freq_scale = std::f64::consts::TAU;
        }
        if u.choice("mass", &["g", "amu"], "g")? == "amu" {
            mass_scale = AMU;
        }
        u.choice("time", &["s"], "s")?;
        u.choice("length", &["cm"], "cm")?;
        u.choice("density", &["cm^-3"], "cm^-3")?;
        u.choice("dipole", &["CGSE"], "CGSE")?;
    }
    units.mass = "g".into();

    let p = root.required_section("pump")?;
    p.check_keys(&["V0", "delta", "T", "omega_pump", "eps0"])?;
    let v0 = non_negative(p.field("V0"), p.f64("V0", "number (rad/s)")? * freq_scale)?;
    let delta = p.f64("delta", "number (rad/s)")? * freq_scale;
    let switch_time = positive(p.field("T"), p.f64("T", "number (s)")?)?;
    let eps0 = p.opt_f64("eps0", "number")?.unwrap_or(1.0);
    let omega_pump = p.opt_f64("omega_pump", "number (rad/s)")?.map(|w| w * freq_scale);

    let q = root.required_section("probe")?;
    q.check_keys(&["omega", "eps_probe", "co_propagating"])?;
    let omega = positive(q.field("omega"), q.f64("omega", "number (rad/s)")? * freq_scale)?;
    let eps_probe = q.opt_f64("eps_probe", "number")?.unwrap_or(1.0);
    if q.opt_bool("co_propagating")? == Some(false) {
        return Err(Error::config(q.field("co_propagating"), "true", "false"));
    }

    let m = root.required_section("medium")?;
    m.check_keys(&["omega0", "d12_sq", "rho", "gamma", "mass", "temperature"])?;
    let omega0 = positive(m.field("omega0"), m.f64("omega0", "number (rad/s)")? * freq_scale)?;
    let d12_sq = non_negative(m.field("d12_sq"), m.f64("d12_sq", "number (CGSE)")?)?;
    let rho = non_negative(m.field("rho"), m.f64("rho", "number (cm^-3)")?)?;
    let gamma = non_negative(
        m.field("gamma"),
        m.opt_f64("gamma", "number (rad/s)")?.unwrap_or(0.0) * freq_scale,
    )?;
    let mass = non_negative(
        m.field("mass"),
        m.opt_f64("mass", "number")?.unwrap_or(0.0) * mass_scale,
    )?;
    let temperature = non_negative(
        m.field("temperature"),
        m.opt_f64("temperature", "number (K)")?.unwrap_or(0.0),
    )?;

    let g = root.required_section("grid")?;
    g.check_keys(&["tau_min", "tau_max", "n_tau", "z", "n_z_quadrature"])?;
    let tau_min = g.f64("tau_min", "number (s)")?;
    let tau_max = g.f64("tau_max", "number (s)")?;
    if tau_max <= tau_min {
        return Err(Error::config(
            g.field("tau_max"),
            format!("number > tau_min = {tau_min}"),
            format!("{tau_max}"),
        ));
    }
    let n_tau = g.usize("n_tau", "integer ≥ 2")?;
    if n_tau < 2 {
        return Err(Error::config(g.field("n_tau"), "integer ≥ 2", format!("{n_tau}")));
    }
    let z = non_negative(g.field("z"), g.f64("z", "number (cm)")?)?;
    let n_z = g.opt_usize("n_z_quadrature", "integer ≥ 2")?.unwrap_or(16);
    if n_z < 2 {
        return Err(Error::config(
            g.field("n_z_quadrature"),
            "integer ≥ 2",
            format!("{n_z}"),
        ));
    }

    let mut n_nodes = DEFAULT_NODES;
    let mut v_sigma = None;
    let mut average = Average::Exponent;
    if let Some(d) = root.section("doppler")? {
        d.check_keys(&["n_nodes", "v_sigma", "average"])?;
        if let Some(n) = d.opt_usize("n_nodes", "integer ≥ 1")? {
            if n == 0 {
                return Err(Error::config(d.field("n_nodes"), "integer ≥ 1", "0"));
            }
            n_nodes = n;
        }
        v_sigma = d
            .opt_f64("v_sigma", "number (cm/s)")?
            .map(|v| non_negative(d.field("v_sigma"), v))
            .transpose()?;
        if d.choice("average", &["exponent", "field"], "exponent")? == "field" {
            average = Average::Field;
        }
    }
    let v_sigma = match v_sigma {
        Some(v) => v,
        None if temperature > 0.0 => {
            if mass <= 0.0 {
                return Err(Error::config(
                    m.field("mass"),
                    "positive mass when temperature > 0",
                    format!("{mass}"),
                ));
            }
            (K_B * temperature / mass).sqrt()
        }
        None => 0.0,
    };

    let mode: Mode = root
        .choice("mode", &["resonant", "literal", "full"], "resonant")?
        .parse()?;
    let regime = match root
        .choice("regime", &["transient", "stationary"], "transient")?
        .as_str()
    {
        "stationary" => Regime::Stationary,
        _ => Regime::Transient,
    };
    let t0 = root.opt_f64("t0", "number (s)")?.unwrap_or(DEFAULT_T0 * switch_time);
    let saturation_cap = positive(
        root.field("saturation_cap"),
        root.opt_f64("saturation_cap", "number")?
            .unwrap_or(DEFAULT_SATURATION_CAP),
    )?;
    let min_detuning = non_negative(
        root.field("min_detuning"),
        root.opt_f64("min_detuning", "number (rad/s)")?
            .map_or(DEFAULT_MIN_DETUNING, |x| x * freq_scale),
    )?;

    let omega_pump = match omega_pump {
        None => omega0 + delta,
        Some(w) => {
            if (w - (omega0 + delta)).abs() > 1e-9 * w.abs() {
                return Err(Error::config(
                    p.field("omega_pump"),
                    format!("omega0 + delta = {:e}", omega0 + delta),
                    format!("{w:e}"),
                ));
            }
            w
        }
    };
    if delta == 0.0 && v0 == 0.0 {
        return Err(Error::config(p.field("V0"), "V0 > 0 when delta = 0", "0"));
    }
    if gamma == 0.0 && (omega - omega0).abs() < min_detuning {
        return Err(Error::config(
            q.field("omega"),
            format!("|omega − omega0| ≥ {min_detuning:e} without damping"),
            format!("{:e}", omega - omega0),
        ));
    }

    let cfg = SimulationConfig {
        units,
        pump: PumpParams {
            v0,
            delta,
            switch_time,
            omega_pump: Some(omega_pump),
            eps0,
        },
        probe: ProbeParams {
            omega,
            eps_probe,
            co_propagating: true,
        },
        medium: MediumParams {
            omega0,
            d12_sq,
            rho,
            gamma,
            mass,
            temperature,
        },
        grid: GridSpec {
            tau_min,
            tau_max,
            n_tau,
            z,
            n_z_quadrature: n_z,
        },
        doppler: DopplerSpec {
            n_nodes,
            v_sigma,
            average,
        },
        mode,
        regime,
        t0,
        saturation_cap,
        min_detuning,
    };
    for w in cfg.warnings() {
        warn!("{w}");
    }
    Ok(cfg)
}

fn numeric_slot<'a>(v: &'a mut Value, path: &str) -> Result<&'a mut Value> {
    let mut cur = v;
    for key in path.split('.') {
        cur = cur
            .get_mut(key)
            .ok_or_else(|| Error::config(path, "an existing numeric field", "no such field"))?;
    }
    match cur {
        Value::Number(_) => Ok(cur),
        other => Err(Error::config(path, "numeric field", type_name(other))),
    }
}

/// Fails unless `path` names a numeric field of the canonical form.
pub fn check_path(cfg: &SimulationConfig, path: &str) -> Result<()> {
    numeric_slot(&mut cfg.canonical_value(), path).map(|_| ())
}

/// Replaces the value at a dotted path of the canonical form and re-validates.
pub fn with_override(cfg: &SimulationConfig, path: &str, value: f64) -> Result<SimulationConfig> {
    let mut v = cfg.canonical_value();
    let cur = numeric_slot(&mut v, path)?;
    *cur = serde_json::Number::from_f64(value)
        .map(Value::Number)
        .ok_or_else(|| Error::config(path, "finite number", format!("{value}")))?;
    // omega_pump is derived; drop it so edits of delta or omega0 stay consistent
    if let Some(p) = v.get_mut("pump").and_then(Value::as_object_mut) {
        if path != "pump.omega_pump" {
            p.remove("omega_pump");
        }
    }
    // an explicit v_sigma would mask temperature or mass edits
    if path == "medium.temperature" || path == "medium.mass" {
        if let Some(d) = v.get_mut("doppler").and_then(Value::as_object_mut) {
            d.remove("v_sigma");
        }
    }
    from_value(&v)
}
