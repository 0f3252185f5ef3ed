use std::process::Command;

use hrn_core::pso::PsoParams;
use hrn_core::relaying::{Duplex, Protocol, SchemeSpec};
use hrn_sim::experiments::{run_fig3, run_fig4, run_fig6, Figure, Metric, Row, SweepResult, SweepSpec};
use hrn_sim::{parse_sweep_config, run, run_custom, table, SimError};
use proptest::prelude::*;

const SMOKE: (usize, usize) = (20, 10);

fn smoke_pso() -> PsoParams {
    PsoParams::default().with_budget(SMOKE.0, SMOKE.1)
}

#[test]
fn single_point_single_scheme_gives_one_row() {
    let mut spec = SweepSpec::preset(Figure::Custom);
    spec.schemes = vec![SchemeSpec::hybrid(Duplex::Full, Protocol::DecodeForward)];
    spec.pso = smoke_pso();
    let r = run_custom(&spec, 1).unwrap();
    assert_eq!(r.len(), 1);
    let row = &r.rows[0];
    assert_eq!(row.metric, Metric::RateBpsHz);
    assert_eq!(row.scheme, "hybrid-fd-df");
    assert_eq!((row.d_ab_m, row.d_ri_m, row.pt_dbm, row.m), (Some(300.0), Some(15.0), Some(20.0), Some(64)));
}

#[test]
fn empty_scheme_list_fails_validation() {
    let spec = SweepSpec::preset(Figure::Custom);
    assert!(matches!(run_custom(&spec, 1), Err(SimError::Validation(_))));
}

#[test]
fn worker_count_does_not_change_results() {
    let mut spec = SweepSpec::preset(Figure::Fig5);
    spec.grid.pt_dbm = vec![0.0, 10.0, 20.0, 30.0];
    spec.pso = smoke_pso();
    spec.seed = 17;
    assert_eq!(run(&spec, 1).unwrap(), run(&spec, 3).unwrap());
}

#[test]
fn repetitions_multiply_rows_with_distinct_seeds() {
    let mut spec = SweepSpec::preset(Figure::Custom);
    spec.schemes = vec![SchemeSpec::relay_only(Duplex::Half, Protocol::DecodeForward)];
    spec.repetitions = 3;
    let r = run(&spec, 1).unwrap();
    assert_eq!(r.len(), 3);
    assert!(r.rows[0].seed != r.rows[1].seed && r.rows[1].seed != r.rows[2].seed);
}

#[test]
fn fig6_row_count() {
    let m = [16, 64, 256];
    let r = run_fig6(&m, smoke_pso(), 1).unwrap();
    assert_eq!(r.len(), m.len() * SweepSpec::preset(Figure::Fig6).schemes.len());
}

#[test]
fn fig3_larger_surface_is_always_higher() {
    let spec = SweepSpec::preset(Figure::Fig3);
    let r = run_fig3(&spec.grid.d_ab_m, &spec.grid.d_ri_m, &[64, 400]).unwrap();
    for pair in r.rows.chunks(2) {
        assert_eq!((pair[0].m, pair[1].m), (Some(64), Some(400)));
        assert!(pair[1].value > pair[0].value);
    }
}

#[test]
fn fig4_without_elements_never_improves() {
    let r = run_fig4(&[100.0, 300.0, 900.0], &[2.0, 10.0, 40.0], &[0]).unwrap();
    assert!(r.rows.iter().all(|row| row.value <= 0.0));
}

#[test]
fn config_sweep_matches_programmatic_spec() {
    let spec = parse_sweep_config(
        r#"
        schemes = ["relay-fd-af", "ris-s1"]
        seed = 4
        [grid]
        pt_dbm = [5.0, 25.0]
        m = [32]
        "#,
    )
    .unwrap();
    let r = run(&spec, 1).unwrap();
    assert_eq!(r.len(), 4);
    assert_eq!(r.rows_for("ris-s1").count(), 2);
}

fn arb_row() -> impl Strategy<Value = Row> {
    (
        prop_oneof![Just(Metric::ChannelGainDb), Just(Metric::GainImprovementDb), Just(Metric::RateBpsHz)],
        prop_oneof![Just("hybrid".to_string()), Just("hybrid-fd-df".to_string()), Just("ris-s2".to_string())],
        proptest::option::of(1u32..100_000),
        proptest::option::of(1u32..10_000),
        proptest::option::of(-400i32..800),
        proptest::option::of(0usize..4096),
        -2_000_000i64..2_000_000,
        any::<u64>(),
    )
        .prop_map(|(metric, scheme, d_ab, d_ri, pt, m, value, seed)| Row {
            metric,
            scheme,
            d_ab_m: d_ab.map(|v| v as f64 / 10.0),
            d_ri_m: d_ri.map(|v| v as f64 / 100.0),
            pt_dbm: pt.map(|v| v as f64 / 4.0),
            m,
            // values already at the four-decimal output precision
            value: value as f64 / 1e4,
            seed,
        })
}

proptest! {
    #[test]
    fn csv_round_trip(rows in prop::collection::vec(arb_row(), 0..20)) {
        let result = SweepResult { rows };
        let text = table::to_csv_string(&result).unwrap();
        let back = table::read_result(text.as_bytes()).unwrap();
        prop_assert_eq!(back, result);
    }
}

fn hrn() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hrn"))
}

#[test]
fn cli_sweep_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    std::fs::write(
        &cfg,
        r#"
        schemes = ["hybrid-fd-af", "hybrid-hd-af", "ris-s2"]
        seed = 11
        [grid]
        pt_dbm = [10.0, 20.0]
        m = [16, 32]
        [pso]
        particles = 15
        iterations = 8
        "#,
    )
    .unwrap();
    let outputs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("run{i}.csv"));
            let status = hrn()
                .args(["sweep", "--config"])
                .arg(&cfg)
                .arg("--out")
                .arg(&out)
                .args(["--jobs", if i == 0 { "1" } else { "2" }])
                .status()
                .unwrap();
            assert!(status.success());
            std::fs::read(out).unwrap()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    let parsed = table::read_result(&outputs[0][..]).unwrap();
    assert_eq!(parsed.len(), 2 * 2 * 3);
}

#[test]
fn cli_fig4_writes_csv_and_traces() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig4.csv");
    let status = hrn().arg("fig4").arg("--out").arg(&out).status().unwrap();
    assert!(status.success());
    let r = table::read_result(std::fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(r.len(), 10 * 25 * 2);

    let out = dir.path().join("fig5.csv");
    let trace = dir.path().join("trace.csv");
    let status = hrn()
        .args(["fig5", "--particles", "10", "--iters", "5", "--out"])
        .arg(&out)
        .arg("--trace-out")
        .arg(&trace)
        .status()
        .unwrap();
    assert!(status.success());
    let traces = std::fs::read_to_string(trace).unwrap();
    // one trace per point for hybrid-fd-df, five iterations each
    assert_eq!(traces.lines().count(), 1 + 21 * 5);
}

#[test]
fn cli_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "schemes = []\n").unwrap();
    let out = hrn().args(["sweep", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("schemes"));
}
