use proptest::prelude::*;

use qscomb::config::{parse_config, with_override, SimulationConfig};
use qscomb::dressed::{DressedAtom, PumpParams};
use qscomb::propagation::train_metrics;
use qscomb::run::simulate;

const T: f64 = 1e-12;

fn desk() -> SimulationConfig {
    parse_config(
        r#"{
        "pump": {"V0": 1e12, "delta": -7e11, "T": 1e-12},
        "probe": {"omega": 9.9965e14},
        "medium": {"omega0": 1e15, "d12_sq": 2e-34, "rho": 1e13, "gamma": 1e8},
        "grid": {"tau_min": 0, "tau_max": 6e-11, "n_tau": 1201, "z": 1.0},
        "regime": "stationary"
    }"#,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn amplitudes_stay_normalized(dt in -6.0f64..4.0, vt in 0.05f64..6.0, x in -10.0f64..40.0) {
        let atom = DressedAtom::new(PumpParams::new(vt / T, dt / T, T)).unwrap();
        let a = atom.amplitudes(x * T).unwrap();
        prop_assert!(a.norm_defect() <= 1e-8, "defect {:e}", a.norm_defect());
    }

    #[test]
    fn exact_and_asymptotic_meet_late(dt in -6.0f64..-0.5, vt in 0.2f64..5.0) {
        let atom = DressedAtom::new(PumpParams::new(vt / T, dt / T, T)).unwrap();
        let t = 35.0 * T;
        let (e, a) = (atom.exact(t).unwrap(), atom.asymptotic(t));
        prop_assert!((e.f - a.f).norm() + (e.g - a.g).norm() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn period_follows_generalized_rabi_frequency(d in -1.2e12f64..-0.4e12, v in 0.4e12f64..2.0e12) {
        let mut c = with_override(&desk(), "pump.delta", d).unwrap();
        c = with_override(&c, "pump.V0", v).unwrap();
        c = with_override(&c, "probe.omega", 1e15 + d / 2.0).unwrap();
        let m = simulate(&c).unwrap().metrics.unwrap();
        let want = std::f64::consts::TAU / (d * d + 4.0 * v * v).sqrt();
        prop_assert!((m.repetition_period / want - 1.0).abs() < 0.01);
    }

    #[test]
    fn transmitted_field_is_linear_in_probe_amplitude(scale in 0.01f64..100.0) {
        let base = desk();
        let scaled = with_override(&base, "probe.eps_probe", scale).unwrap();
        let a = simulate(&base).unwrap().field;
        let b = simulate(&scaled).unwrap().field;
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x * scale - y).norm() <= 1e-12 * y.norm());
        }
    }
}

#[test]
fn doppler_average_converges_in_node_count() {
    let hot = with_override(
        &with_override(&desk(), "medium.mass", 85.0 * 1.660_539_066_6e-24).unwrap(),
        "medium.temperature",
        400.0,
    )
    .unwrap();
    let mut coarse = hot.clone();
    coarse.doppler.n_nodes = 16;
    let mut fine = hot;
    fine.doppler.n_nodes = 32;
    let a = simulate(&coarse).unwrap().field;
    let b = simulate(&fine).unwrap().field;
    let worst = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).norm() / y.norm())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-6, "16 vs 32 nodes: {worst:e}");
}

#[test]
fn denser_gas_deepens_modulation() {
    let contrast: Vec<f64> = [2e12, 5e12, 1e13]
        .iter()
        .map(|&r| {
            train_metrics(
                &simulate(&with_override(&desk(), "medium.rho", r).unwrap())
                    .unwrap()
                    .field,
            )
            .unwrap()
            .contrast
        })
        .collect();
    assert!(contrast.windows(2).all(|w| w[1] > w[0]), "{contrast:?}");
}

#[test]
fn empty_medium_transmits_incident_envelope() {
    let field = simulate(&with_override(&desk(), "medium.rho", 0.0).unwrap())
        .unwrap()
        .field;
    assert_eq!(field.values, field.incident);
}
