//! TOML sweep configuration.
//!
//! ```toml
//! figure = "custom"            # fig3 | fig4 | fig5 | fig6 | custom
//! schemes = ["hybrid-fd-df", "ris-s1"]
//! model = "umi"                # umi | free-space
//! seed = 7
//!
//! [grid]
//! d_ab_m = [300.0]
//! d_ri_m = [15.0]
//! pt_dbm = [0.0, 10.0, 20.0]
//! m = [64]
//!
//! [params]
//! si_ratio_db = 0.0
//!
//! [pso]
//! particles = 500
//! iterations = 100
//! ```
//!
//! Omitted fields take the preset values of the named figure.

use serde::Deserialize;

use hrn_core::channels::GainModel;
use hrn_core::relaying::SchemeSpec;
use hrn_core::units::dbm_to_watts;

use crate::error::{SimError, SimResult};
use crate::experiments::{Figure, SweepSpec};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    figure: Option<String>,
    schemes: Option<Vec<String>>,
    model: Option<String>,
    seed: Option<u64>,
    repetitions: Option<u32>,
    #[serde(default)]
    grid: GridSection,
    #[serde(default)]
    params: ParamsSection,
    #[serde(default)]
    los: LosSection,
    #[serde(default)]
    pso: PsoSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    d_ab_m: Option<Vec<f64>>,
    d_ri_m: Option<Vec<f64>>,
    pt_dbm: Option<Vec<f64>>,
    m: Option<Vec<usize>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsSection {
    carrier_frequency_hz: Option<f64>,
    noise_power_dbm: Option<f64>,
    si_ratio_db: Option<f64>,
    gain_alice_dbi: Option<f64>,
    gain_bob_dbi: Option<f64>,
    gain_relay_dbi: Option<f64>,
    gain_ris_dbi: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct LosSection {
    alice_relay: Option<bool>,
    relay_bob: Option<bool>,
    alice_ris: Option<bool>,
    ris_relay: Option<bool>,
    ris_bob: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PsoSection {
    particles: Option<usize>,
    iterations: Option<usize>,
    velocity_clamp: Option<f64>,
    inertia_start: Option<f64>,
    inertia_end: Option<f64>,
    cognitive: Option<f64>,
    social: Option<f64>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

/// Parses and validates a sweep configuration.
pub fn parse_sweep_config(text: &str) -> SimResult<SweepSpec> {
    let file: ConfigFile = toml::from_str(text)?;
    let mut problems = Vec::new();

    let figure = match file.figure.as_deref() {
        None => Figure::Custom,
        Some(code) => code.parse().unwrap_or_else(|_| {
            problems.push(format!("figure: unknown value `{code}`"));
            Figure::Custom
        }),
    };
    let mut spec = SweepSpec::preset(figure);

    if let Some(codes) = file.schemes {
        spec.schemes.clear();
        for code in codes {
            match code.parse::<SchemeSpec>() {
                Ok(s) => spec.schemes.push(s),
                Err(_) => problems.push(format!("schemes: unknown scheme `{code}`")),
            }
        }
    }
    if let Some(model) = file.model {
        match model.parse::<GainModel>() {
            Ok(m) => spec.model = m,
            Err(_) => problems.push(format!("model: unknown value `{model}`")),
        }
    }
    set(&mut spec.seed, file.seed);
    set(&mut spec.repetitions, file.repetitions);

    let g = file.grid;
    set(&mut spec.grid.d_ab_m, g.d_ab_m);
    set(&mut spec.grid.d_ri_m, g.d_ri_m);
    set(&mut spec.grid.pt_dbm, g.pt_dbm);
    set(&mut spec.grid.m, g.m);

    let p = file.params;
    set(&mut spec.params.carrier_frequency_hz, p.carrier_frequency_hz);
    set(&mut spec.params.noise_power_w, p.noise_power_dbm.map(dbm_to_watts));
    set(&mut spec.si_ratio_db, p.si_ratio_db);
    set(&mut spec.params.gain_alice_dbi, p.gain_alice_dbi);
    set(&mut spec.params.gain_bob_dbi, p.gain_bob_dbi);
    set(&mut spec.params.gain_relay_dbi, p.gain_relay_dbi);
    set(&mut spec.params.gain_ris_dbi, p.gain_ris_dbi);
    spec.params = spec.params.with_si_ratio_db(spec.si_ratio_db);

    let l = file.los;
    set(&mut spec.los.alice_relay, l.alice_relay);
    set(&mut spec.los.relay_bob, l.relay_bob);
    set(&mut spec.los.alice_ris, l.alice_ris);
    set(&mut spec.los.ris_relay, l.ris_relay);
    set(&mut spec.los.ris_bob, l.ris_bob);

    let o = file.pso;
    set(&mut spec.pso.particle_count, o.particles);
    set(&mut spec.pso.iteration_count, o.iterations);
    set(&mut spec.pso.velocity_clamp, o.velocity_clamp);
    set(&mut spec.pso.inertia_start, o.inertia_start);
    set(&mut spec.pso.inertia_end, o.inertia_end);
    set(&mut spec.pso.cognitive_coeff, o.cognitive);
    set(&mut spec.pso.social_coeff, o.social);

    if let Err(SimError::Validation(more)) = spec.validate() {
        problems.extend(more);
    }
    if problems.is_empty() {
        Ok(spec)
    } else {
        Err(SimError::Validation(problems))
    }
}

pub fn load_sweep_config(path: &std::path::Path) -> SimResult<SweepSpec> {
    parse_sweep_config(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hrn_core::relaying::{Duplex, Protocol};

    #[test]
    fn minimal_custom_config() {
        let spec = parse_sweep_config(
            r#"
            schemes = ["hybrid-hd-df"]
            [grid]
            pt_dbm = [10.0]
            "#,
        )
        .unwrap();
        assert_eq!(spec.figure, Figure::Custom);
        assert_eq!(spec.schemes, vec![SchemeSpec::hybrid(Duplex::Half, Protocol::DecodeForward)]);
        assert_eq!(spec.grid.pt_dbm, vec![10.0]);
        assert_eq!(spec.model, GainModel::Umi);
    }

    #[test]
    fn preset_overrides() {
        let spec = parse_sweep_config(
            r#"
            figure = "fig6"
            [grid]
            m = [16, 32]
            [pso]
            particles = 50
            iterations = 20
            "#,
        )
        .unwrap();
        assert_eq!(spec.si_ratio_db, 5.0);
        assert_eq!(spec.grid.m, vec![16, 32]);
        assert_eq!((spec.pso.particle_count, spec.pso.iteration_count), (50, 20));
        let ratio = spec.params.residual_si_power_w / spec.params.noise_power_w;
        assert!((ratio - 10f64.powf(0.5)).abs() < 1e-12);
    }

    #[test]
    fn empty_scheme_list_is_rejected() {
        let err = parse_sweep_config("schemes = []").unwrap_err();
        match err {
            SimError::Validation(p) => assert!(p.iter().any(|s| s.starts_with("schemes"))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn all_bad_fields_are_reported() {
        let err = parse_sweep_config(
            r#"
            figure = "fig9"
            schemes = ["hybrid-qd-df"]
            model = "rural"
            [grid]
            d_ri_m = [0.0]
            "#,
        )
        .unwrap_err();
        let SimError::Validation(p) = err else { panic!() };
        assert!(p.iter().any(|s| s.contains("figure")));
        assert!(p.iter().any(|s| s.contains("hybrid-qd-df")));
        assert!(p.iter().any(|s| s.starts_with("model")));
        assert!(p.iter().any(|s| s.starts_with("grid.d_ri_m")));
    }

    #[test]
    fn unknown_keys_fail_to_parse() {
        assert!(matches!(parse_sweep_config("colour = 3"), Err(SimError::Config(_))));
    }
}
