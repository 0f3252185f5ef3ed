//! Acceptance checks. Run with `--nocapture` to see one line per criterion.

use std::f64::consts::TAU;
use std::time::Instant;

use hrn_core::channels::{build_channel_set, free_space_gain, GainModel, LinkGain, LosMap, SystemParams};
use hrn_core::geometry::{distance, symmetric_hrn_layout, NetworkLayout, Position};
use hrn_core::pso::{optimize, PhaseOptimizer, PhaseSearch, Pso, PsoParams};
use hrn_core::relaying::{evaluate_scheme, rate_hd_af, rate_hd_df, Duplex, Protocol, SchemeSpec};
use hrn_core::ris::{cascaded_channel, hybrid_hop_gain, RisPhaseVector};
use hrn_core::Coefficient;
use hrn_sim::experiments::{derive_seed, hybrid_hop_budget, run_fig3, run_fig4, run_fig5, run_fig6, Figure, SweepSpec};
use hrn_sim::SweepResult;

struct Report {
    lines: Vec<(bool, String, String)>,
}

impl Report {
    fn check(&mut self, name: &str, pass: bool, detail: String) {
        println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        self.lines.push((pass, name.to_string(), detail));
    }
}

/// Uniform draw in [0, 1) from a hashed counter.
fn unit(seed: u64, i: u64) -> f64 {
    (derive_seed(seed, i) >> 11) as f64 / (1u64 << 53) as f64
}

fn value(r: &SweepResult, scheme: &str, pick: impl Fn(&hrn_sim::Row) -> bool) -> f64 {
    r.rows_for(scheme).find(|row| pick(row)).map(|row| row.value).unwrap_or(f64::NAN)
}

struct GridSearch {
    levels: usize,
}

impl PhaseOptimizer for GridSearch {
    fn maximize(
        &self,
        dim: usize,
        _warm_start: Option<&[f64]>,
        fitness: &mut dyn FnMut(&[f64]) -> f64,
    ) -> hrn_core::Result<PhaseSearch> {
        let step = TAU / self.levels as f64;
        let mut digits = vec![0usize; dim];
        let mut theta = vec![0.0; dim];
        let mut best = (f64::NEG_INFINITY, theta.clone());
        let mut evaluations = 0;
        loop {
            for (t, d) in theta.iter_mut().zip(&digits) {
                *t = *d as f64 * step;
            }
            let f = fitness(&theta);
            evaluations += 1;
            if f > best.0 {
                best = (f, theta.clone());
            }
            let mut k = 0;
            while k < dim {
                digits[k] += 1;
                if digits[k] < self.levels {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
            if k == dim {
                break;
            }
        }
        Ok(PhaseSearch {
            phases: RisPhaseVector::new(best.1),
            best_fitness: best.0,
            trace: Vec::new(),
            evaluations,
            max_abs_velocity: 0.0,
        })
    }
}

fn gain_checks(rep: &mut Report) {
    let p = SystemParams::default();

    let r = run_fig4(&[300.0], &[10.0], &[400]).unwrap();
    let v = r.rows[0].value;
    rep.check("fig4 improvement at 300 m / 10 m / M=400", (v - 6.0).abs() <= 0.5, format!("{v:.4} dB, expected 6.0 +/- 0.5"));

    let spec = SweepSpec::preset(Figure::Fig3);
    let (d_ab, d_ri) = (&spec.grid.d_ab_m, &spec.grid.d_ri_m);
    let start = Instant::now();
    let surf = run_fig3(d_ab, d_ri, &[64, 400]).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    rep.check("fig3 default grid runtime", elapsed < 1.0, format!("{elapsed:.3} s, limit 1 s"));

    let mut worst: f64 = 0.0;
    for &a in d_ab {
        for &b in d_ri {
            let layout = symmetric_hrn_layout(a, b).unwrap();
            let (_, b1, b2) = hybrid_hop_budget(&layout, &p).unwrap();
            let zero = LinkGain::new(0.0).unwrap();
            let sep = hybrid_hop_gain(zero, b1, b2, 400).db() - hybrid_hop_gain(zero, b1, b2, 64).db();
            worst = worst.max((sep - 15.92).abs());
        }
    }
    rep.check(
        "fig3 surface separation without direct path",
        worst <= 0.1,
        format!("max |sep - 15.92| = {worst:.4} dB over {} points", d_ab.len() * d_ri.len()),
    );

    let mut max_sep = f64::NEG_INFINITY;
    let mut decreasing = true;
    for m in [64, 400] {
        let at = |a: f64, b: f64| value(&surf, "hybrid", |row| row.m == Some(m) && row.d_ab_m == Some(a) && row.d_ri_m == Some(b));
        for (i, &a) in d_ab.iter().enumerate() {
            for (j, &b) in d_ri.iter().enumerate() {
                if i > 0 && at(a, b) >= at(d_ab[i - 1], b) {
                    decreasing = false;
                }
                if j > 0 && at(a, b) >= at(a, d_ri[j - 1]) {
                    decreasing = false;
                }
                if m == 400 {
                    max_sep = max_sep.max(at(a, b) - value(&surf, "hybrid", |row| {
                        row.m == Some(64) && row.d_ab_m == Some(a) && row.d_ri_m == Some(b)
                    }));
                }
            }
        }
    }
    rep.check(
        "fig3 surfaces decrease in both distances",
        decreasing && max_sep <= 15.92 + 0.1,
        format!("monotone = {decreasing}, largest separation with direct path = {max_sep:.4} dB"),
    );
}

fn fig5_checks(rep: &mut Report, label: &str, pso: PsoParams, full: bool) {
    let grid = SweepSpec::preset(Figure::Fig5).grid.pt_dbm;
    let r = run_fig5(&grid, pso, 0).unwrap();
    let at = |scheme: &str, pt: f64| value(&r, scheme, |row| row.pt_dbm == Some(pt));
    let schemes: Vec<&str> = SweepSpec::preset(Figure::Fig5).schemes.iter().map(|s| s.code()).collect();

    let lowest = grid
        .iter()
        .all(|&pt| schemes.iter().filter(|&&s| s != "ris-s2").all(|&s| at(s, pt) > at("ris-s2", pt)));
    rep.check(&format!("fig5 {label}: ris-s2 lowest at every power"), lowest, format!("{} powers", grid.len()));

    let dominated = grid.iter().all(|&pt| {
        at("hybrid-hd-df", pt) >= at("relay-hd-df", pt) && at("hybrid-fd-df", pt) >= at("relay-fd-df", pt)
    });
    rep.check(
        &format!("fig5 {label}: hybrid at least matching relay-only"),
        dominated,
        format!("HD and FD, {} powers", grid.len()),
    );

    if !full {
        return;
    }
    let top = *grid.last().unwrap();
    let best_at = |pt: f64| {
        schemes
            .iter()
            .copied()
            .max_by(|a, b| at(a, pt).total_cmp(&at(b, pt)))
            .unwrap()
    };
    let (b30, btop) = (best_at(30.0), best_at(top));
    rep.check(
        "fig5 full: hybrid-fd-df highest at 30 dBm and at top of grid",
        b30 == "hybrid-fd-df" && btop == "hybrid-fd-df",
        format!("best at 30 dBm = {b30} ({:.4}), at {top} dBm = {btop} ({:.4})", at(b30, 30.0), at(btop, top)),
    );

    let diff: Vec<f64> = grid.iter().map(|&pt| at("hybrid-hd-df", pt) - at("ris-s1", pt)).collect();
    let crossing = diff.windows(2).position(|w| w[0] > 0.0 && w[1] < 0.0);
    rep.check(
        "fig5 full: hybrid-hd-df and ris-s1 cross",
        crossing.is_some(),
        match crossing {
            Some(i) => format!("between {} and {} dBm", grid[i], grid[i + 1]),
            None => "no sign change".to_string(),
        },
    );
}

fn fig6_checks(rep: &mut Report) {
    let grid = SweepSpec::preset(Figure::Fig6).grid.m;
    let r = run_fig6(&grid, PsoParams::default(), 0).unwrap();
    let at = |scheme: &str, m: usize| value(&r, scheme, |row| row.m == Some(m));

    let m_star = (0..grid.len())
        .find(|&i| grid[i..].iter().all(|&m| at("ris-s1", m) > at("hybrid-fd-af", m)))
        .map(|i| grid[i]);
    rep.check(
        "fig6: ris-s1 overtakes hybrid-fd-af for all large M",
        m_star.is_some(),
        match m_star {
            Some(m) => format!("M* = {m}"),
            None => "ris-s1 below hybrid-fd-af at the largest M".to_string(),
        },
    );

    let above = grid.iter().all(|&m| at("hybrid-fd-af", m) > at("ris-s2", m) && at("hybrid-hd-af", m) > at("ris-s2", m));
    let last = *grid.last().unwrap();
    rep.check(
        "fig6: hybrid above ris-s2 at every M",
        above,
        format!("at M={last}: hybrid-fd-af {:.4}, ris-s2 {:.4}", at("hybrid-fd-af", last), at("ris-s2", last)),
    );
}

fn oracle_check(rep: &mut Report) {
    let layout = symmetric_hrn_layout(300.0, 15.0).unwrap();
    let snr = |r: f64| 2f64.powf(r) - 1.0;
    let mut worst_gap: f64 = f64::NEG_INFINITY;
    let mut pso_wins = true;
    let mut cases = 0;
    for m in [2, 4, 6] {
        for protocol in [Protocol::DecodeForward, Protocol::AmplifyForward] {
            let spec = SchemeSpec::hybrid(Duplex::Full, protocol);
            let p = SystemParams::default().with_tx_power_dbm(30.0).with_seed(m as u64);
            let set = build_channel_set(&layout, GainModel::Umi, &LosMap::URBAN, m, &p).unwrap();
            let pso = Pso::new(PsoParams::default().with_seed(m as u64)).unwrap();
            let cont = evaluate_scheme(spec, &layout, &set, &p, Some(&pso)).unwrap();
            let grid = evaluate_scheme(spec, &layout, &set, &p, Some(&GridSearch { levels: 16 })).unwrap();
            pso_wins &= cont.rate >= grid.rate;
            worst_gap = worst_gap.max(10.0 * (snr(cont.rate) / snr(grid.rate)).log10());
            cases += 1;
        }
    }
    rep.check(
        "pso against 16-level exhaustive search, M in {2,4,6}",
        pso_wins && worst_gap <= 0.15,
        format!("pso >= grid in all {cases} cases = {pso_wins}, largest gap {worst_gap:.4} dB"),
    );
}

fn property_checks(rep: &mut Report) {
    let n = 10_000u64;
    let mut violations = 0;
    for k in 0..n {
        let m = 1 + (unit(1, k) * 32.0) as usize;
        let mut draw = |i: u64| {
            Coefficient::from_polar(3.0 * unit(2, k * 1000 + i), TAU * unit(3, k * 1000 + i))
        };
        let h_in: Vec<_> = (0..m as u64).map(&mut draw).collect();
        let h_out: Vec<_> = (100..100 + m as u64).map(&mut draw).collect();
        let theta = RisPhaseVector::new((0..m as u64).map(|i| TAU * unit(4, k * 1000 + i)));
        let bound: f64 = h_in.iter().zip(&h_out).map(|(a, b)| a.magnitude() * b.magnitude()).sum();
        if cascaded_channel(&h_in, &theta, &h_out).unwrap().magnitude() > bound * (1.0 + 1e-12) {
            violations += 1;
        }
    }
    rep.check("coherent bound over random instances", violations == 0, format!("{violations} violations in {n}"));

    let mut violations = 0;
    for k in 0..n {
        let (g1, g2) = (10f64.powf(12.0 * unit(5, k) - 6.0), 10f64.powf(12.0 * unit(6, k) - 6.0));
        if rate_hd_af(g1, g2) > rate_hd_df(g1, g2) {
            violations += 1;
        }
    }
    rep.check("af never exceeds df", violations == 0, format!("{violations} violations in {n}"));

    let d_ab = 300.0;
    let p = SystemParams::default().with_tx_power_dbm(20.0);
    let p = SystemParams { gain_bob_dbi: p.gain_alice_dbi, ..p };
    let rates: Vec<f64> = (0..21)
        .map(|i| {
            let x = d_ab * (i + 1) as f64 / 22.0;
            let layout = NetworkLayout::new(Position::ORIGIN, Position { x: d_ab, y: 0.0 }, Some(Position { x, y: 0.0 }), None)
                .unwrap();
            let set = build_channel_set(&layout, GainModel::FreeSpace, &LosMap::URBAN, 0, &p).unwrap();
            evaluate_scheme(SchemeSpec::relay_only(Duplex::Half, Protocol::DecodeForward), &layout, &set, &p, None)
                .unwrap()
                .rate
        })
        .collect();
    let best = rates.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    rep.check("relay rate peaks at the midpoint", best == 10, format!("argmax index {best} of 21"));

    let (m, y0) = (64.0f64, 2.0);
    let gains: Vec<f64> = (0..=20)
        .map(|i| {
            let ris = Position { x: d_ab * i as f64 / 20.0, y: y0 };
            let b1 = free_space_gain(distance(Position::ORIGIN, ris), 0.0, 5.0, p.carrier_frequency_hz).unwrap();
            let b2 = free_space_gain(distance(ris, Position { x: d_ab, y: 0.0 }), 5.0, 0.0, p.carrier_frequency_hz)
                .unwrap();
            m * m * b1.value() * b2.value()
        })
        .collect();
    let best = gains.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    let worst = gains.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    rep.check(
        "ris gain best at an endpoint",
        best == 0 || best == 20,
        format!("argmax index {best}, argmin index {worst} of 21"),
    );

    let fitness = |t: &[f64]| t.iter().map(|x| (x - 1.0).cos()).sum::<f64>();
    let params = PsoParams::default().with_budget(30, 40).with_seed(9);
    let a = optimize(fitness, 8, params).unwrap();
    let b = optimize(fitness, 8, params).unwrap();
    let monotone = a.trace.windows(2).all(|w| w[1] >= w[0]);
    rep.check(
        "pso trace monotone and seed-deterministic",
        monotone && a.trace == b.trace && a.phases == b.phases,
        format!("{} iterations, final {:.6}", a.trace.len(), a.best_fitness),
    );
}

#[test]
fn acceptance() {
    let mut rep = Report { lines: Vec::new() };
    gain_checks(&mut rep);
    fig5_checks(&mut rep, "full", PsoParams::default(), true);
    fig5_checks(&mut rep, "smoke", PsoParams::default().with_budget(50, 20), false);
    fig6_checks(&mut rep);
    oracle_check(&mut rep);
    property_checks(&mut rep);

    let failed: Vec<&String> = rep.lines.iter().filter(|l| !l.0).map(|l| &l.1).collect();
    println!("{} of {} criteria passed", rep.lines.len() - failed.len(), rep.lines.len());
    assert!(failed.is_empty(), "failed: {failed:?}");
}
