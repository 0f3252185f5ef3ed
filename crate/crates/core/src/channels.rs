//! Path-loss models and deterministic channel synthesis.
//!
//! Each sub-link gets a magnitude from the selected large-scale model and an
//! arbitrary phase drawn from a seeded generator. Alice and Bob never share a
//! direct link. All RIS elements see the same distance (far field), so they
//! differ only in phase.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{distance, NetworkLayout};
use crate::units::{db_to_linear, dbm_to_watts, linear_to_db, wavelength, wrap_phase};

/// Radio parameters shared by every node of a network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub carrier_frequency_hz: f64,
    /// Receiver noise power σ², W.
    pub noise_power_w: f64,
    /// Total radiated power at any instant, P_T, W.
    pub total_tx_power_w: f64,
    /// Residual self-interference at a full-duplex relay, W.
    pub residual_si_power_w: f64,
    pub gain_alice_dbi: f64,
    pub gain_bob_dbi: f64,
    pub gain_relay_dbi: f64,
    pub gain_ris_dbi: f64,
    pub rng_seed: u64,
}

impl Default for SystemParams {
    fn default() -> Self {
        let noise = dbm_to_watts(-94.0);
        SystemParams {
            carrier_frequency_hz: 3e9,
            noise_power_w: noise,
            total_tx_power_w: dbm_to_watts(20.0),
            residual_si_power_w: noise,
            gain_alice_dbi: 0.0,
            gain_bob_dbi: 0.0,
            gain_relay_dbi: 5.0,
            gain_ris_dbi: 5.0,
            rng_seed: 0,
        }
    }
}

impl SystemParams {
    pub fn with_tx_power_dbm(mut self, dbm: f64) -> Self {
        self.total_tx_power_w = dbm_to_watts(dbm);
        self
    }

    /// Sets the residual SI power from its ratio to the noise power.
    pub fn with_si_ratio_db(mut self, ratio_db: f64) -> Self {
        self.residual_si_power_w = db_to_linear(ratio_db) * self.noise_power_w;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_frequency_hz > 0.0 && self.carrier_frequency_hz.is_finite()) {
            return Err(Error::invalid("carrier_frequency_hz", "must be positive"));
        }
        if !(self.noise_power_w > 0.0 && self.noise_power_w.is_finite()) {
            return Err(Error::invalid("noise_power_w", "must be positive"));
        }
        if !(self.total_tx_power_w >= 0.0 && self.total_tx_power_w.is_finite()) {
            return Err(Error::invalid("total_tx_power_w", "must be non-negative"));
        }
        if !(self.residual_si_power_w >= 0.0 && self.residual_si_power_w.is_finite()) {
            return Err(Error::invalid("residual_si_power_w", "must be non-negative"));
        }
        let gains = [
            self.gain_alice_dbi,
            self.gain_bob_dbi,
            self.gain_relay_dbi,
            self.gain_ris_dbi,
        ];
        if gains.iter().any(|g| !g.is_finite()) {
            return Err(Error::invalid("antenna gain", "must be finite"));
        }
        Ok(())
    }
}

/// Linear power gain of a sub-link, antenna gains included.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LinkGain(f64);

impl LinkGain {
    pub fn new(value: f64) -> Result<Self> {
        if value >= 0.0 && value.is_finite() {
            Ok(LinkGain(value))
        } else {
            Err(Error::invalid("link gain", "must be finite and non-negative"))
        }
    }

    pub fn from_db(db: f64) -> Result<Self> {
        LinkGain::new(db_to_linear(db))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn db(self) -> f64 {
        linear_to_db(self.0)
    }

    pub fn amplitude(self) -> f64 {
        libm::sqrt(self.0)
    }
}

/// Narrowband channel coefficient in polar form, phase in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficient {
    magnitude: f64,
    phase: f64,
}

impl Coefficient {
    pub const ONE: Coefficient = Coefficient {
        magnitude: 1.0,
        phase: 0.0,
    };

    /// Negative magnitudes are folded into the phase.
    pub fn from_polar(magnitude: f64, phase: f64) -> Self {
        if magnitude < 0.0 {
            Coefficient {
                magnitude: -magnitude,
                phase: wrap_phase(phase + PI),
            }
        } else {
            Coefficient {
                magnitude,
                phase: wrap_phase(phase),
            }
        }
    }

    pub fn from_complex(c: Complex64) -> Self {
        Coefficient::from_polar(c.norm(), c.arg())
    }

    pub fn magnitude(self) -> f64 {
        self.magnitude
    }

    pub fn phase(self) -> f64 {
        self.phase
    }

    /// Power gain `|h|²`.
    pub fn gain(self) -> f64 {
        self.magnitude * self.magnitude
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase)
    }
}

impl From<Complex64> for Coefficient {
    fn from(c: Complex64) -> Self {
        Coefficient::from_complex(c)
    }
}

/// Friis free-space gain `G_tx·G_rx·(λ/4πd)²`.
pub fn free_space_gain(
    distance_m: f64,
    gain_tx_dbi: f64,
    gain_rx_dbi: f64,
    carrier_frequency_hz: f64,
) -> Result<LinkGain> {
    if !(distance_m > 0.0) || !distance_m.is_finite() {
        return Err(Error::invalid("distance", "must be positive"));
    }
    if !(carrier_frequency_hz > 0.0) {
        return Err(Error::invalid("carrier_frequency_hz", "must be positive"));
    }
    let ratio = wavelength(carrier_frequency_hz) / (4.0 * PI * distance_m);
    LinkGain::new(db_to_linear(gain_tx_dbi + gain_rx_dbi) * ratio * ratio)
}

/// Result of [`umi_gain`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UmiGain {
    pub gain: LinkGain,
    pub path_loss_db: f64,
    /// The distance was below the 1 m validity floor and was clamped.
    pub clamped: bool,
}

/// Minimum distance for the UMi formulas, meters.
pub const UMI_MIN_DISTANCE_M: f64 = 1.0;

/// Street-canyon urban micro path loss in dB, no shadow fading.
///
/// LoS uses the single-slope form `32.4 + 21·log10(d) + 20·log10(f_GHz)`.
/// NLoS is `22.4 + 35.3·log10(d) + 21.3·log10(f_GHz)` with the terminal
/// height correction zero at 1.5 m, floored by the LoS loss.
pub fn umi_path_loss_db(distance_m: f64, los: bool, carrier_frequency_hz: f64) -> f64 {
    let d = libm::log10(distance_m);
    let f = libm::log10(carrier_frequency_hz / 1e9);
    let pl_los = 32.4 + 21.0 * d + 20.0 * f;
    if los {
        pl_los
    } else {
        let pl_nlos = 22.4 + 35.3 * d + 21.3 * f;
        pl_nlos.max(pl_los)
    }
}

pub fn umi_gain(
    distance_m: f64,
    los: bool,
    gain_tx_dbi: f64,
    gain_rx_dbi: f64,
    carrier_frequency_hz: f64,
) -> UmiGain {
    let clamped = !(distance_m >= UMI_MIN_DISTANCE_M);
    let d = if clamped { UMI_MIN_DISTANCE_M } else { distance_m };
    let path_loss_db = umi_path_loss_db(d, los, carrier_frequency_hz);
    UmiGain {
        gain: LinkGain(db_to_linear(gain_tx_dbi + gain_rx_dbi - path_loss_db)),
        path_loss_db,
        clamped,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GainModel {
    #[default]
    FreeSpace,
    Umi,
}

impl GainModel {
    pub fn code(self) -> &'static str {
        match self {
            GainModel::FreeSpace => "free-space",
            GainModel::Umi => "umi",
        }
    }
}

impl fmt::Display for GainModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for GainModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free-space" | "freespace" | "fs" => Ok(GainModel::FreeSpace),
            "umi" | "3gpp-umi" => Ok(GainModel::Umi),
            other => Err(Error::UnknownCode {
                kind: "channel model",
                code: other.into(),
            }),
        }
    }
}

/// Line-of-sight flag per sub-link. Ignored by the free-space model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LosMap {
    pub alice_relay: bool,
    pub relay_bob: bool,
    pub alice_ris: bool,
    pub ris_relay: bool,
    pub ris_bob: bool,
}

impl LosMap {
    /// RIS links LoS, relay links NLoS.
    pub const URBAN: LosMap = LosMap {
        alice_relay: false,
        relay_bob: false,
        alice_ris: true,
        ris_relay: true,
        ris_bob: true,
    };

    pub const ALL_LOS: LosMap = LosMap {
        alice_relay: true,
        relay_bob: true,
        alice_ris: true,
        ris_relay: true,
        ris_bob: true,
    };
}

impl Default for LosMap {
    fn default() -> Self {
        LosMap::URBAN
    }
}

/// Complex channels of one network realization.
///
/// The RIS lists all have one entry per element. Links are reciprocal, so
/// `ris_relay` serves both the RIS→relay and relay→RIS directions.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub alice_relay: Option<Coefficient>,
    pub relay_bob: Option<Coefficient>,
    pub alice_ris: Vec<Coefficient>,
    pub ris_relay: Vec<Coefficient>,
    pub ris_bob: Vec<Coefficient>,
    /// Relay transmit → RIS element → relay receive. Not used by the rate
    /// evaluators, which treat residual SI as a fixed aggregate power.
    pub relay_loop_reflected: Vec<Coefficient>,
    /// Some UMi link was shorter than the model floor and got clamped.
    pub clamped: bool,
}

impl ChannelSet {
    pub fn elements(&self) -> usize {
        self.alice_ris.len()
    }
}

struct LinkModel<'a> {
    model: GainModel,
    params: &'a SystemParams,
    clamped: bool,
}

impl LinkModel<'_> {
    fn gain(&mut self, d: f64, los: bool, g_tx: f64, g_rx: f64) -> Result<LinkGain> {
        match self.model {
            GainModel::FreeSpace => {
                free_space_gain(d, g_tx, g_rx, self.params.carrier_frequency_hz)
            }
            GainModel::Umi => {
                let g = umi_gain(d, los, g_tx, g_rx, self.params.carrier_frequency_hz);
                self.clamped |= g.clamped;
                Ok(g.gain)
            }
        }
    }
}

/// Synthesizes every sub-link channel the layout supports.
///
/// Phases are drawn in a fixed order (relay links first, then per element
/// Alice→RIS, RIS→relay, RIS→Bob), and the relay draws happen even when no
/// relay exists. Layouts that share a seed therefore share RIS phases.
pub fn build_channel_set(
    layout: &NetworkLayout,
    model: GainModel,
    los: &LosMap,
    elements: usize,
    params: &SystemParams,
) -> Result<ChannelSet> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut draw = move || wrap_phase(rng.gen::<f64>() * TAU);
    let mut links = LinkModel {
        model,
        params,
        clamped: false,
    };

    let relay_phases = (draw(), draw());
    let (alice_relay, relay_bob) = match layout.relay {
        Some(relay) => {
            let g1 = links.gain(
                distance(layout.alice, relay),
                los.alice_relay,
                params.gain_alice_dbi,
                params.gain_relay_dbi,
            )?;
            let g2 = links.gain(
                distance(relay, layout.bob),
                los.relay_bob,
                params.gain_relay_dbi,
                params.gain_bob_dbi,
            )?;
            (
                Some(Coefficient::from_polar(g1.amplitude(), relay_phases.0)),
                Some(Coefficient::from_polar(g2.amplitude(), relay_phases.1)),
            )
        }
        None => (None, None),
    };

    let mut set = ChannelSet {
        alice_relay,
        relay_bob,
        alice_ris: Vec::with_capacity(elements),
        ris_relay: Vec::with_capacity(elements),
        ris_bob: Vec::with_capacity(elements),
        relay_loop_reflected: Vec::new(),
        clamped: false,
    };
    if elements == 0 {
        set.clamped = links.clamped;
        return Ok(set);
    }

    let ris = layout.ris()?;
    let a_alice_ris = links
        .gain(
            distance(layout.alice, ris),
            los.alice_ris,
            params.gain_alice_dbi,
            params.gain_ris_dbi,
        )?
        .amplitude();
    let a_ris_bob = links
        .gain(
            distance(ris, layout.bob),
            los.ris_bob,
            params.gain_ris_dbi,
            params.gain_bob_dbi,
        )?
        .amplitude();
    let a_ris_relay = match layout.relay {
        Some(relay) => Some(
            links
                .gain(
                    distance(ris, relay),
                    los.ris_relay,
                    params.gain_ris_dbi,
                    params.gain_relay_dbi,
                )?
                .amplitude(),
        ),
        None => None,
    };

    for _ in 0..elements {
        let (p_in, p_relay, p_out) = (draw(), draw(), draw());
        set.alice_ris.push(Coefficient::from_polar(a_alice_ris, p_in));
        set.ris_bob.push(Coefficient::from_polar(a_ris_bob, p_out));
        if let Some(a) = a_ris_relay {
            let h = Coefficient::from_polar(a, p_relay);
            set.ris_relay.push(h);
            set.relay_loop_reflected
                .push(Coefficient::from_polar(h.gain(), 2.0 * p_relay));
        }
    }
    set.clamped = links.clamped;
    Ok(set)
}
