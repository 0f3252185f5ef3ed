//! Achievable rates (bit/s/Hz) of RIS-only, relay-only and hybrid one-way
//! relaying, for half/full duplex and amplify/decode-and-forward relays.
//!
//! Power policy: a half-duplex hop has a single active transmitter using the
//! whole budget `P_T`; in full duplex Alice and the relay each radiate
//! `P_T/2`. Residual self-interference is a fixed aggregate power that does
//! not depend on the RIS configuration.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::channels::{ChannelSet, Coefficient, SystemParams};
use crate::error::{Error, Result};
use crate::geometry::{NetworkLayout, RisScenario};
use crate::pso::PhaseOptimizer;
use crate::ris::{Cascade, RisPhaseVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Duplex {
    Half,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    AmplifyForward,
    DecodeForward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    RisOnly,
    RelayOnly,
    Hybrid,
}

/// One transmission scheme. RIS-only schemes carry a placement scenario;
/// schemes with a relay carry its duplex mode and protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeSpec {
    RisOnly(RisScenario),
    RelayOnly { duplex: Duplex, protocol: Protocol },
    Hybrid { duplex: Duplex, protocol: Protocol },
}

impl SchemeSpec {
    pub const fn hybrid(duplex: Duplex, protocol: Protocol) -> Self {
        SchemeSpec::Hybrid { duplex, protocol }
    }

    pub const fn relay_only(duplex: Duplex, protocol: Protocol) -> Self {
        SchemeSpec::RelayOnly { duplex, protocol }
    }

    pub fn topology(&self) -> Topology {
        match self {
            SchemeSpec::RisOnly(_) => Topology::RisOnly,
            SchemeSpec::RelayOnly { .. } => Topology::RelayOnly,
            SchemeSpec::Hybrid { .. } => Topology::Hybrid,
        }
    }

    /// Short code such as `hybrid-fd-df` or `ris-s1`.
    pub fn code(&self) -> &'static str {
        use Duplex::*;
        use Protocol::*;
        match *self {
            SchemeSpec::RisOnly(RisScenario::NearAlice) => "ris-s1",
            SchemeSpec::RisOnly(RisScenario::Midpoint) => "ris-s2",
            SchemeSpec::RelayOnly { duplex, protocol } => match (duplex, protocol) {
                (Half, DecodeForward) => "relay-hd-df",
                (Half, AmplifyForward) => "relay-hd-af",
                (Full, DecodeForward) => "relay-fd-df",
                (Full, AmplifyForward) => "relay-fd-af",
            },
            SchemeSpec::Hybrid { duplex, protocol } => match (duplex, protocol) {
                (Half, DecodeForward) => "hybrid-hd-df",
                (Half, AmplifyForward) => "hybrid-hd-af",
                (Full, DecodeForward) => "hybrid-fd-df",
                (Full, AmplifyForward) => "hybrid-fd-af",
            },
        }
    }

    /// Every supported scheme.
    pub fn all() -> Vec<SchemeSpec> {
        let mut out = alloc::vec![
            SchemeSpec::RisOnly(RisScenario::NearAlice),
            SchemeSpec::RisOnly(RisScenario::Midpoint),
        ];
        for duplex in [Duplex::Half, Duplex::Full] {
            for protocol in [Protocol::DecodeForward, Protocol::AmplifyForward] {
                out.push(SchemeSpec::RelayOnly { duplex, protocol });
                out.push(SchemeSpec::Hybrid { duplex, protocol });
            }
        }
        out
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for SchemeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let mut parts = lower.split('-');
        let unknown = || Error::UnknownCode {
            kind: "scheme",
            code: s.into(),
        };
        let head = parts.next().ok_or_else(unknown)?;
        let rest: Vec<&str> = parts.collect();
        match head {
            "ris" => {
                let scenario: RisScenario = rest.join("-").parse().map_err(|_| unknown())?;
                Ok(SchemeSpec::RisOnly(scenario))
            }
            "relay" | "hybrid" => {
                let [d, p] = rest[..] else {
                    return Err(unknown());
                };
                let duplex = match d {
                    "hd" => Duplex::Half,
                    "fd" => Duplex::Full,
                    _ => return Err(unknown()),
                };
                let protocol = match p {
                    "df" => Protocol::DecodeForward,
                    "af" => Protocol::AmplifyForward,
                    _ => return Err(unknown()),
                };
                Ok(if head == "relay" {
                    SchemeSpec::RelayOnly { duplex, protocol }
                } else {
                    SchemeSpec::Hybrid { duplex, protocol }
                })
            }
            _ => Err(unknown()),
        }
    }
}

/// RIS configuration a scheme ended up using.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum PhaseConfig {
    #[default]
    None,
    Single(RisPhaseVector),
    PerHop {
        hop1: RisPhaseVector,
        hop2: RisPhaseVector,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    /// bit/s/Hz
    pub rate: f64,
    /// SNR/SINR at the end of hop 1 (the relay); for RIS-only schemes, at Bob.
    pub sinr_hop1: f64,
    /// SNR/SINR of hop 2 at Bob; for RIS-only schemes, equal to `sinr_hop1`.
    pub sinr_hop2: f64,
    pub phase_config: PhaseConfig,
}

fn log2_1p(x: f64) -> f64 {
    libm::log2(1.0 + x)
}

/// Half-duplex decode-and-forward: `½·log2(1 + min(g1, g2))`.
pub fn rate_hd_df(g1: f64, g2: f64) -> f64 {
    0.5 * log2_1p(g1.min(g2))
}

/// End-to-end SNR of a two-hop amplify-and-forward cascade,
/// `g1·g2/(g1+g2+1)`, with the infinite-SNR limits handled.
fn af_cascade_snr(g1: f64, g2: f64) -> f64 {
    if g1 == 0.0 || g2 == 0.0 {
        0.0
    } else if g1.is_infinite() {
        g2
    } else if g2.is_infinite() {
        g1
    } else {
        g1 * g2 / (g1 + g2 + 1.0)
    }
}

/// Half-duplex amplify-and-forward: `½·log2(1 + g1·g2/(g1+g2+1))`.
pub fn rate_hd_af(g1: f64, g2: f64) -> f64 {
    0.5 * log2_1p(af_cascade_snr(g1, g2))
}

/// Full-duplex decode-and-forward: `log2(1 + min(γ_relay, γ_bob))`.
pub fn rate_fd_df(sinr_relay: f64, sinr_bob: f64) -> f64 {
    log2_1p(sinr_relay.min(sinr_bob))
}

/// End-to-end SINR of a full-duplex AF relay that amplifies its whole input
/// (signal, residual SI and noise) to an average output power of `P_T/2`.
///
/// `relay_impairment_w` is the residual SI plus noise power at the relay
/// input; `bob_interference_w` is any interference at Bob besides noise.
pub fn fd_af_sinr(
    alice_relay_gain: f64,
    relay_impairment_w: f64,
    relay_bob_gain: f64,
    bob_interference_w: f64,
    params: &SystemParams,
) -> f64 {
    let half = 0.5 * params.total_tx_power_w;
    let relay_input = half * alice_relay_gain + relay_impairment_w;
    if half == 0.0 || relay_input == 0.0 {
        return 0.0;
    }
    let amp2 = half / relay_input;
    let signal = half * amp2 * alice_relay_gain * relay_bob_gain;
    let disturbance =
        amp2 * relay_bob_gain * relay_impairment_w + bob_interference_w + params.noise_power_w;
    signal / disturbance
}

/// Full-duplex amplify-and-forward rate, `log2(1 + SINR)` with the SINR from
/// [`fd_af_sinr`].
pub fn rate_fd_af(
    alice_relay_gain: f64,
    relay_impairment_w: f64,
    relay_bob_gain: f64,
    bob_interference_w: f64,
    params: &SystemParams,
) -> f64 {
    log2_1p(fd_af_sinr(
        alice_relay_gain,
        relay_impairment_w,
        relay_bob_gain,
        bob_interference_w,
        params,
    ))
}

/// Full-duplex rate and per-hop SINRs for given effective channels.
struct FullDuplexLink<'a> {
    protocol: Protocol,
    params: &'a SystemParams,
}

impl FullDuplexLink<'_> {
    /// Returns `(rate, relay SINR, Bob SINR)`.
    fn evaluate(&self, hop1_gain: f64, hop2_gain: f64, leak_gain: f64) -> (f64, f64, f64) {
        let p = self.params;
        let half = 0.5 * p.total_tx_power_w;
        let relay_impairment = p.noise_power_w + p.residual_si_power_w;
        let bob_interference = half * leak_gain;
        let sinr_relay = half * hop1_gain / relay_impairment;
        let sinr_bob = half * hop2_gain / (bob_interference + p.noise_power_w);
        let rate = match self.protocol {
            Protocol::DecodeForward => rate_fd_df(sinr_relay, sinr_bob),
            Protocol::AmplifyForward => {
                rate_fd_af(hop1_gain, relay_impairment, hop2_gain, bob_interference, p)
            }
        };
        (rate, sinr_relay, sinr_bob)
    }
}

fn half_duplex(protocol: Protocol, g1: f64, g2: f64) -> f64 {
    match protocol {
        Protocol::DecodeForward => rate_hd_df(g1, g2),
        Protocol::AmplifyForward => rate_hd_af(g1, g2),
    }
}

fn relay_links(spec: &SchemeSpec, layout: &NetworkLayout, channels: &ChannelSet) -> Result<(Coefficient, Coefficient)> {
    let mismatch = |reason| Error::SchemeMismatch {
        scheme: spec.code(),
        reason,
    };
    if layout.relay.is_none() {
        return Err(mismatch("layout has no relay"));
    }
    match (channels.alice_relay, channels.relay_bob) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(mismatch("channel set has no relay links")),
    }
}

/// Builds the Hybrid-FD objective over phase vectors and its per-hop parts.
pub struct HybridFullDuplex<'a> {
    hop1: Cascade,
    hop2: Cascade,
    leak: Cascade,
    link: FullDuplexLink<'a>,
}

impl<'a> HybridFullDuplex<'a> {
    pub fn new(channels: &ChannelSet, protocol: Protocol, params: &'a SystemParams) -> Result<Self> {
        let m = channels.elements();
        if channels.ris_relay.len() != m || channels.ris_bob.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                actual: channels.ris_relay.len().min(channels.ris_bob.len()),
            });
        }
        Ok(HybridFullDuplex {
            hop1: Cascade::new(channels.alice_relay, &channels.alice_ris, &channels.ris_relay)?,
            hop2: Cascade::new(channels.relay_bob, &channels.ris_relay, &channels.ris_bob)?,
            leak: Cascade::new(None, &channels.alice_ris, &channels.ris_bob)?,
            link: FullDuplexLink { protocol, params },
        })
    }

    pub fn elements(&self) -> usize {
        self.hop1.elements()
    }

    /// Hop-1 closed-form alignment, the natural starting point.
    pub fn hop1_alignment(&self) -> RisPhaseVector {
        self.hop1.aligned()
    }

    /// `(rate, relay SINR, Bob SINR)` for reflection factors `e^{jθ}`.
    pub fn evaluate_factors(&self, factors: &[Complex64]) -> (f64, f64, f64) {
        let h1 = self.hop1.effective(factors).norm_sqr();
        let h2 = self.hop2.effective(factors).norm_sqr();
        let leak = self.leak.effective(factors).norm_sqr();
        self.link.evaluate(h1, h2, leak)
    }

    pub fn evaluate(&self, theta: &RisPhaseVector) -> (f64, f64, f64) {
        self.evaluate_factors(&theta.reflection_factors())
    }

    /// Rate as a function of raw phases, reusing one scratch buffer.
    pub fn objective(&self) -> impl FnMut(&[f64]) -> f64 + '_ {
        let mut factors = alloc::vec![Complex64::new(0.0, 0.0); self.elements()];
        move |theta: &[f64]| {
            for (f, &t) in factors.iter_mut().zip(theta) {
                let (s, c) = libm::sincos(t);
                *f = Complex64::new(c, s);
            }
            self.evaluate_factors(&factors).0
        }
    }
}

/// Achievable rate of `spec` on one network realization.
///
/// Hybrid full-duplex schemes with at least one RIS element need a
/// `phase_optimizer`; every other scheme uses closed-form alignment.
pub fn evaluate_scheme(
    spec: SchemeSpec,
    layout: &NetworkLayout,
    channels: &ChannelSet,
    params: &SystemParams,
    phase_optimizer: Option<&dyn PhaseOptimizer>,
) -> Result<RateResult> {
    params.validate()?;
    let power = params.total_tx_power_w;
    let noise = params.noise_power_w;
    match spec {
        SchemeSpec::RisOnly(_) => {
            if layout.ris.is_none() {
                return Err(Error::SchemeMismatch {
                    scheme: spec.code(),
                    reason: "layout has no RIS",
                });
            }
            let cascade = Cascade::new(None, &channels.alice_ris, &channels.ris_bob)?;
            let amplitude = cascade.coherent_bound();
            let snr = power * amplitude * amplitude / noise;
            Ok(RateResult {
                rate: log2_1p(snr),
                sinr_hop1: snr,
                sinr_hop2: snr,
                phase_config: PhaseConfig::Single(cascade.aligned()),
            })
        }
        SchemeSpec::RelayOnly { duplex, protocol } => {
            let (h1, h2) = relay_links(&spec, layout, channels)?;
            match duplex {
                Duplex::Half => {
                    let g1 = power * h1.gain() / noise;
                    let g2 = power * h2.gain() / noise;
                    Ok(RateResult {
                        rate: half_duplex(protocol, g1, g2),
                        sinr_hop1: g1,
                        sinr_hop2: g2,
                        phase_config: PhaseConfig::None,
                    })
                }
                Duplex::Full => {
                    let link = FullDuplexLink { protocol, params };
                    let (rate, s1, s2) = link.evaluate(h1.gain(), h2.gain(), 0.0);
                    Ok(RateResult {
                        rate,
                        sinr_hop1: s1,
                        sinr_hop2: s2,
                        phase_config: PhaseConfig::None,
                    })
                }
            }
        }
        SchemeSpec::Hybrid { duplex, protocol } => {
            let (h1, h2) = relay_links(&spec, layout, channels)?;
            let m = channels.elements();
            if m > 0 && (layout.ris.is_none() || channels.ris_relay.len() != m) {
                return Err(Error::SchemeMismatch {
                    scheme: spec.code(),
                    reason: "RIS links missing for a hybrid scheme",
                });
            }
            match duplex {
                Duplex::Half => {
                    let hop1 = Cascade::new(Some(h1), &channels.alice_ris, &channels.ris_relay)?;
                    let hop2 = Cascade::new(Some(h2), &channels.ris_relay, &channels.ris_bob)?;
                    let (a1, a2) = (hop1.coherent_bound(), hop2.coherent_bound());
                    let g1 = power * a1 * a1 / noise;
                    let g2 = power * a2 * a2 / noise;
                    Ok(RateResult {
                        rate: half_duplex(protocol, g1, g2),
                        sinr_hop1: g1,
                        sinr_hop2: g2,
                        phase_config: PhaseConfig::PerHop {
                            hop1: hop1.aligned(),
                            hop2: hop2.aligned(),
                        },
                    })
                }
                Duplex::Full => {
                    let problem = HybridFullDuplex::new(channels, protocol, params)?;
                    let theta = if m == 0 {
                        RisPhaseVector::zeros(0)
                    } else {
                        let optimizer = phase_optimizer.ok_or(Error::MissingOptimizer(spec.code()))?;
                        let warm = problem.hop1_alignment();
                        let mut objective = problem.objective();
                        optimizer
                            .maximize(m, Some(warm.phases()), &mut objective)?
                            .phases
                    };
                    let (rate, s1, s2) = problem.evaluate(&theta);
                    Ok(RateResult {
                        rate,
                        sinr_hop1: s1,
                        sinr_hop2: s2,
                        phase_config: PhaseConfig::Single(theta),
                    })
                }
            }
        }
    }
}
