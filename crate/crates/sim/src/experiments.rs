//! Sweep definitions and the sweep engine.
//!
//! Every grid point derives its own seed from the master seed and its flat
//! index, so results do not depend on the number of workers or the order in
//! which points are evaluated.

use std::cell::RefCell;
use std::fmt;
use std::str::FromStr;

use hrn_core::channels::{build_channel_set, free_space_gain, GainModel, LinkGain, LosMap, SystemParams};
use hrn_core::geometry::{
    distance, relay_assisted_layout, ris_assisted_layout, symmetric_hrn_layout, NetworkLayout,
    RisScenario,
};
use hrn_core::pso::{PhaseOptimizer, PhaseSearch, Pso, PsoParams};
use hrn_core::relaying::{evaluate_scheme, Duplex, Protocol, SchemeSpec, Topology};
use hrn_core::ris::hybrid_hop_gain;
use rayon::prelude::*;

use crate::error::{SimError, SimResult};

/// Scheme code used for the channel-gain rows of the hybrid network.
pub const HYBRID_GAIN_SCHEME: &str = "hybrid";

/// Position of the RIS in the RIS-only channel-gain baseline, meters from Alice
/// along the y axis.
pub const GAIN_BASELINE_RIS_OFFSET_M: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Custom,
}

impl Figure {
    pub fn code(self) -> &'static str {
        match self {
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Custom => "custom",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Figure {
    type Err = SimError;

    fn from_str(s: &str) -> SimResult<Self> {
        match s {
            "fig3" => Ok(Figure::Fig3),
            "fig4" => Ok(Figure::Fig4),
            "fig5" => Ok(Figure::Fig5),
            "fig6" => Ok(Figure::Fig6),
            "custom" => Ok(Figure::Custom),
            other => Err(SimError::invalid(format!("figure: unknown value `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    ChannelGainDb,
    GainImprovementDb,
    RateBpsHz,
}

impl Metric {
    pub fn code(self) -> &'static str {
        match self {
            Metric::ChannelGainDb => "channel_gain_db",
            Metric::GainImprovementDb => "gain_improvement_db",
            Metric::RateBpsHz => "rate_bps_hz",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Metric {
    type Err = SimError;

    fn from_str(s: &str) -> SimResult<Self> {
        match s {
            "channel_gain_db" => Ok(Metric::ChannelGainDb),
            "gain_improvement_db" => Ok(Metric::GainImprovementDb),
            "rate_bps_hz" => Ok(Metric::RateBpsHz),
            other => Err(SimError::invalid(format!("metric: unknown value `{other}`"))),
        }
    }
}

/// One output record. Coordinates a sweep does not vary are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub metric: Metric,
    pub scheme: String,
    pub d_ab_m: Option<f64>,
    pub d_ri_m: Option<f64>,
    pub pt_dbm: Option<f64>,
    pub m: Option<usize>,
    pub value: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<Row>,
}

impl SweepResult {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows_for<'a>(&'a self, scheme: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.scheme == scheme)
    }
}

/// Axis values of a sweep. Unused axes are ignored by the figure that runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub d_ab_m: Vec<f64>,
    pub d_ri_m: Vec<f64>,
    pub pt_dbm: Vec<f64>,
    pub m: Vec<usize>,
}

fn stepped(start: f64, end: f64, step: f64) -> Vec<f64> {
    let n = ((end - start) / step).round() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

impl Grid {
    /// `d_AB ∈ {100, …, 1000}` and `d_RI ∈ {2, …, 50}` for the gain surfaces.
    pub fn gain_surface(m: Vec<usize>) -> Self {
        Grid {
            d_ab_m: stepped(100.0, 1000.0, 100.0),
            d_ri_m: stepped(2.0, 50.0, 2.0),
            pt_dbm: Vec::new(),
            m,
        }
    }
}

/// Complete description of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub figure: Figure,
    pub grid: Grid,
    pub schemes: Vec<SchemeSpec>,
    /// Radio parameters; transmit power, SI power and seed are set per point.
    pub params: SystemParams,
    /// Residual SI power relative to the noise power, dB.
    pub si_ratio_db: f64,
    pub model: GainModel,
    pub los: LosMap,
    pub pso: PsoParams,
    pub seed: u64,
    /// Independent channel realizations per grid point.
    pub repetitions: u32,
}

pub const FIG5_M: usize = 64;
pub const FIG5_SI_RATIO_DB: f64 = 0.0;
pub const FIG6_PT_DBM: f64 = 20.0;
pub const FIG6_SI_RATIO_DB: f64 = 5.0;
pub const RATE_D_AB_M: f64 = 300.0;
pub const RATE_D_RI_M: f64 = 15.0;
pub const GAIN_SURFACE_M: [usize; 2] = [64, 400];

fn rate_schemes(protocol: Protocol) -> Vec<SchemeSpec> {
    vec![
        SchemeSpec::hybrid(Duplex::Half, protocol),
        SchemeSpec::hybrid(Duplex::Full, protocol),
        SchemeSpec::relay_only(Duplex::Half, protocol),
        SchemeSpec::relay_only(Duplex::Full, protocol),
        SchemeSpec::RisOnly(RisScenario::NearAlice),
        SchemeSpec::RisOnly(RisScenario::Midpoint),
    ]
}

impl SweepSpec {
    /// Fixed parameters and default grids of each figure.
    pub fn preset(figure: Figure) -> Self {
        let base = SweepSpec {
            figure,
            grid: Grid::gain_surface(GAIN_SURFACE_M.to_vec()),
            schemes: Vec::new(),
            params: SystemParams::default(),
            si_ratio_db: 0.0,
            model: GainModel::FreeSpace,
            los: LosMap::URBAN,
            pso: PsoParams::default(),
            seed: 0,
            repetitions: 1,
        };
        match figure {
            Figure::Fig3 | Figure::Fig4 => base,
            Figure::Fig5 => SweepSpec {
                grid: Grid {
                    d_ab_m: vec![RATE_D_AB_M],
                    d_ri_m: vec![RATE_D_RI_M],
                    pt_dbm: stepped(0.0, 40.0, 2.0),
                    m: vec![FIG5_M],
                },
                schemes: rate_schemes(Protocol::DecodeForward),
                si_ratio_db: FIG5_SI_RATIO_DB,
                model: GainModel::Umi,
                ..base
            },
            Figure::Fig6 => SweepSpec {
                grid: Grid {
                    d_ab_m: vec![RATE_D_AB_M],
                    d_ri_m: vec![RATE_D_RI_M],
                    pt_dbm: vec![FIG6_PT_DBM],
                    m: (4..=10).map(|k| 1usize << k).collect(),
                },
                schemes: rate_schemes(Protocol::AmplifyForward),
                si_ratio_db: FIG6_SI_RATIO_DB,
                model: GainModel::Umi,
                ..base
            },
            Figure::Custom => SweepSpec {
                grid: Grid {
                    d_ab_m: vec![RATE_D_AB_M],
                    d_ri_m: vec![RATE_D_RI_M],
                    pt_dbm: vec![FIG6_PT_DBM],
                    m: vec![FIG5_M],
                },
                model: GainModel::Umi,
                ..base
            },
        }
    }

    fn is_gain_sweep(&self) -> bool {
        matches!(self.figure, Figure::Fig3 | Figure::Fig4)
    }

    /// Checks every field and reports all offending ones at once.
    pub fn validate(&self) -> SimResult<()> {
        let mut problems = Vec::new();
        let positive = |name: &str, values: &[f64], problems: &mut Vec<String>| {
            if values.is_empty() {
                problems.push(format!("grid.{name}: must not be empty"));
            } else if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                problems.push(format!("grid.{name}: distances must be positive, got {v}"));
            }
        };
        positive("d_ab_m", &self.grid.d_ab_m, &mut problems);
        positive("d_ri_m", &self.grid.d_ri_m, &mut problems);
        if self.grid.m.is_empty() {
            problems.push("grid.m: must not be empty".into());
        }
        if !self.is_gain_sweep() {
            if self.grid.pt_dbm.is_empty() {
                problems.push("grid.pt_dbm: must not be empty".into());
            } else if self.grid.pt_dbm.iter().any(|p| !p.is_finite()) {
                problems.push("grid.pt_dbm: values must be finite".into());
            }
            if self.schemes.is_empty() {
                problems.push("schemes: must list at least one scheme".into());
            }
        }
        if !self.si_ratio_db.is_finite() {
            problems.push("params.si_ratio_db: must be finite".into());
        }
        if let Err(e) = self.params.validate() {
            problems.push(format!("params: {e}"));
        }
        if let Err(e) = self.pso.validate() {
            problems.push(format!("pso: {e}"));
        }
        if self.repetitions == 0 {
            problems.push("repetitions: must be at least 1".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(SimError::Validation(problems))
        }
    }
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of grid point `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix(master ^ mix(index))
}

/// Free-space gains `(β_dir, β₁, β₂)` of hop 1 of a hybrid layout: relay
/// link, Alice→RIS and RIS→relay.
pub fn hybrid_hop_budget(layout: &NetworkLayout, params: &SystemParams) -> SimResult<(LinkGain, LinkGain, LinkGain)> {
    let relay = layout.relay()?;
    let ris = layout.ris()?;
    let fc = params.carrier_frequency_hz;
    Ok((
        free_space_gain(distance(layout.alice, relay), params.gain_alice_dbi, params.gain_relay_dbi, fc)?,
        free_space_gain(distance(layout.alice, ris), params.gain_alice_dbi, params.gain_ris_dbi, fc)?,
        free_space_gain(distance(ris, relay), params.gain_ris_dbi, params.gain_relay_dbi, fc)?,
    ))
}

/// `β_H` of the symmetric hybrid network over free space.
pub fn hybrid_channel_gain(d_ab: f64, d_ri: f64, m: usize, params: &SystemParams) -> SimResult<LinkGain> {
    let layout = symmetric_hrn_layout(d_ab, d_ri)?;
    let (dir, b1, b2) = hybrid_hop_budget(&layout, params)?;
    Ok(hybrid_hop_gain(dir, b1, b2, m))
}

/// `β_max`: the better of the RIS-only gain with the RIS at
/// `(0, 10)` and the relay-only hop gain with the relay at the midpoint.
pub fn best_single_helper_gain(d_ab: f64, m: usize, params: &SystemParams) -> SimResult<LinkGain> {
    let fc = params.carrier_frequency_hz;
    let ris_layout = ris_assisted_layout(d_ab, RisScenario::NearAlice, GAIN_BASELINE_RIS_OFFSET_M)?;
    let ris = ris_layout.ris()?;
    let b1 = free_space_gain(distance(ris_layout.alice, ris), params.gain_alice_dbi, params.gain_ris_dbi, fc)?;
    let b2 = free_space_gain(distance(ris, ris_layout.bob), params.gain_ris_dbi, params.gain_bob_dbi, fc)?;
    let ris_only = hybrid_hop_gain(LinkGain::new(0.0)?, b1, b2, m);

    let relay_layout = relay_assisted_layout(d_ab)?;
    let relay = relay_layout.relay()?;
    let hop1 = free_space_gain(distance(relay_layout.alice, relay), params.gain_alice_dbi, params.gain_relay_dbi, fc)?;
    let hop2 = free_space_gain(distance(relay, relay_layout.bob), params.gain_relay_dbi, params.gain_bob_dbi, fc)?;
    let relay_only = if hop1 < hop2 { hop1 } else { hop2 };

    Ok(if ris_only > relay_only { ris_only } else { relay_only })
}

/// Optimizer wrapper that keeps the trace of its last run.
struct Recording<'a> {
    inner: &'a Pso,
    last: RefCell<Option<PhaseSearch>>,
}

impl PhaseOptimizer for Recording<'_> {
    fn maximize(
        &self,
        dim: usize,
        warm_start: Option<&[f64]>,
        fitness: &mut dyn FnMut(&[f64]) -> f64,
    ) -> hrn_core::Result<PhaseSearch> {
        let out = self.inner.maximize(dim, warm_start, fitness)?;
        *self.last.borrow_mut() = Some(out.clone());
        Ok(out)
    }
}

/// Per-iteration best fitness of one optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub scheme: String,
    pub point: usize,
    pub seed: u64,
    pub trace: Vec<f64>,
}

/// Result of a sweep plus optimizer convergence traces.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepOutput {
    pub result: SweepResult,
    pub traces: Vec<TraceRecord>,
}

#[derive(Debug, Clone, Copy)]
struct Point {
    index: usize,
    d_ab: f64,
    d_ri: f64,
    pt_dbm: Option<f64>,
    m: usize,
    seed: u64,
}

fn points(spec: &SweepSpec, with_power: bool) -> Vec<Point> {
    let powers: Vec<Option<f64>> = if with_power {
        spec.grid.pt_dbm.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    let mut out = Vec::new();
    for &d_ab in &spec.grid.d_ab_m {
        for &d_ri in &spec.grid.d_ri_m {
            for &pt_dbm in &powers {
                for &m in &spec.grid.m {
                    for _ in 0..spec.repetitions {
                        let index = out.len();
                        out.push(Point {
                            index,
                            d_ab,
                            d_ri,
                            pt_dbm,
                            m,
                            seed: derive_seed(spec.seed, index as u64),
                        });
                    }
                }
            }
        }
    }
    out
}

fn layout_for(scheme: &SchemeSpec, d_ab: f64, d_ri: f64) -> SimResult<NetworkLayout> {
    Ok(match scheme {
        SchemeSpec::RisOnly(scenario) => ris_assisted_layout(d_ab, *scenario, d_ri)?,
        SchemeSpec::RelayOnly { .. } => relay_assisted_layout(d_ab)?,
        SchemeSpec::Hybrid { .. } => symmetric_hrn_layout(d_ab, d_ri)?,
    })
}

fn eval_gain_point(spec: &SweepSpec, p: &Point) -> SimResult<Vec<Row>> {
    let beta_h = hybrid_channel_gain(p.d_ab, p.d_ri, p.m, &spec.params)?;
    let (metric, value) = match spec.figure {
        Figure::Fig3 => (Metric::ChannelGainDb, beta_h.db()),
        _ => {
            let beta_max = best_single_helper_gain(p.d_ab, p.m, &spec.params)?;
            (Metric::GainImprovementDb, beta_h.db() - beta_max.db())
        }
    };
    Ok(vec![Row {
        metric,
        scheme: HYBRID_GAIN_SCHEME.into(),
        d_ab_m: Some(p.d_ab),
        d_ri_m: Some(p.d_ri),
        pt_dbm: None,
        m: Some(p.m),
        value,
        seed: p.seed,
    }])
}

fn eval_rate_point(spec: &SweepSpec, p: &Point) -> SimResult<(Vec<Row>, Vec<TraceRecord>)> {
    let pt_dbm = p.pt_dbm.expect("rate sweeps always carry a power");
    let params = spec
        .params
        .with_tx_power_dbm(pt_dbm)
        .with_si_ratio_db(spec.si_ratio_db)
        .with_seed(p.seed);
    let mut rows = Vec::with_capacity(spec.schemes.len());
    let mut traces = Vec::new();
    for (k, scheme) in spec.schemes.iter().enumerate() {
        let layout = layout_for(scheme, p.d_ab, p.d_ri)?;
        let elements = if scheme.topology() == Topology::RelayOnly { 0 } else { p.m };
        let channels = build_channel_set(&layout, spec.model, &spec.los, elements, &params)?;
        let pso = Pso::new(spec.pso.with_seed(derive_seed(p.seed, k as u64 + 1)))?;
        let recorder = Recording {
            inner: &pso,
            last: RefCell::new(None),
        };
        let rate = evaluate_scheme(*scheme, &layout, &channels, &params, Some(&recorder))?;
        if !rate.rate.is_finite() {
            return Err(SimError::invalid(format!(
                "non-finite rate for {} at point {}",
                scheme.code(),
                p.index
            )));
        }
        if let Some(search) = recorder.last.into_inner() {
            traces.push(TraceRecord {
                scheme: scheme.code().into(),
                point: p.index,
                seed: pso.params().seed,
                trace: search.trace,
            });
        }
        rows.push(Row {
            metric: Metric::RateBpsHz,
            scheme: scheme.code().into(),
            d_ab_m: Some(p.d_ab),
            d_ri_m: Some(p.d_ri),
            pt_dbm: Some(pt_dbm),
            m: Some(p.m),
            value: rate.rate,
            seed: p.seed,
        });
    }
    Ok((rows, traces))
}

/// Runs a sweep on `jobs` worker threads (0 = one per core).
pub fn run_with_traces(spec: &SweepSpec, jobs: usize) -> SimResult<SweepOutput> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| SimError::invalid(format!("jobs: {e}")))?;
    let gain = spec.is_gain_sweep();
    let pts = points(spec, !gain);
    let per_point: Vec<SimResult<(Vec<Row>, Vec<TraceRecord>)>> = pool.install(|| {
        pts.par_iter()
            .map(|p| {
                if gain {
                    eval_gain_point(spec, p).map(|rows| (rows, Vec::new()))
                } else {
                    eval_rate_point(spec, p)
                }
            })
            .collect()
    });
    let mut out = SweepOutput::default();
    for r in per_point {
        let (rows, traces) = r?;
        out.result.rows.extend(rows);
        out.traces.extend(traces);
    }
    Ok(out)
}

pub fn run(spec: &SweepSpec, jobs: usize) -> SimResult<SweepResult> {
    run_with_traces(spec, jobs).map(|o| o.result)
}

/// Hybrid channel gain surfaces over free space.
pub fn run_fig3(d_ab: &[f64], d_ri: &[f64], m: &[usize]) -> SimResult<SweepResult> {
    let mut spec = SweepSpec::preset(Figure::Fig3);
    spec.grid = Grid {
        d_ab_m: d_ab.to_vec(),
        d_ri_m: d_ri.to_vec(),
        pt_dbm: Vec::new(),
        m: m.to_vec(),
    };
    run(&spec, 1)
}

/// Gain improvement of the hybrid network over the best single helper.
pub fn run_fig4(d_ab: &[f64], d_ri: &[f64], m: &[usize]) -> SimResult<SweepResult> {
    let mut spec = SweepSpec::preset(Figure::Fig4);
    spec.grid = Grid {
        d_ab_m: d_ab.to_vec(),
        d_ri_m: d_ri.to_vec(),
        pt_dbm: Vec::new(),
        m: m.to_vec(),
    };
    run(&spec, 1)
}

/// Rate versus transmit power, DF relays.
pub fn run_fig5(pt_dbm: &[f64], pso: PsoParams, jobs: usize) -> SimResult<SweepResult> {
    let mut spec = SweepSpec::preset(Figure::Fig5);
    spec.grid.pt_dbm = pt_dbm.to_vec();
    spec.pso = pso;
    run(&spec, jobs)
}

/// Rate versus RIS size, AF relays.
pub fn run_fig6(m: &[usize], pso: PsoParams, jobs: usize) -> SimResult<SweepResult> {
    let mut spec = SweepSpec::preset(Figure::Fig6);
    spec.grid.m = m.to_vec();
    spec.pso = pso;
    run(&spec, jobs)
}

/// Runs a fully specified sweep.
pub fn run_custom(spec: &SweepSpec, jobs: usize) -> SimResult<SweepResult> {
    run(spec, jobs)
}
