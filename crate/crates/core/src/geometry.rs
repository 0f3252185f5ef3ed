//! Planar node placement for Alice (source), Bob (destination), the relay and
//! the RIS.

use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// A point on the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const ORIGIN: Position = Position { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::invalid("position", "coordinates must be finite"));
        }
        Ok(Position { x, y })
    }

    pub fn distance_to(&self, other: &Position) -> f64 {
        distance(*self, *other)
    }
}

/// Euclidean distance in meters.
pub fn distance(a: Position, b: Position) -> f64 {
    libm::hypot(a.x - b.x, a.y - b.y)
}

/// Where the RIS sits when it is the only helper node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RisScenario {
    /// RIS at `(0, d_RI)`, next to Alice.
    NearAlice,
    /// RIS at `(d_AB/2, d_RI/2)`, halfway between Alice and Bob.
    Midpoint,
}

impl RisScenario {
    pub fn code(self) -> &'static str {
        match self {
            RisScenario::NearAlice => "near-alice",
            RisScenario::Midpoint => "midpoint",
        }
    }
}

impl fmt::Display for RisScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for RisScenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "near-alice" | "s1" | "scenario1" => Ok(RisScenario::NearAlice),
            "midpoint" | "s2" | "scenario2" => Ok(RisScenario::Midpoint),
            other => Err(Error::UnknownCode {
                kind: "RIS scenario",
                code: other.into(),
            }),
        }
    }
}

/// Node positions. Distances are always derived from the positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkLayout {
    pub alice: Position,
    pub bob: Position,
    pub relay: Option<Position>,
    pub ris: Option<Position>,
}

impl NetworkLayout {
    pub fn new(
        alice: Position,
        bob: Position,
        relay: Option<Position>,
        ris: Option<Position>,
    ) -> Result<Self> {
        if !(distance(alice, bob) > 0.0) {
            return Err(Error::invalid("layout", "Alice and Bob must not coincide"));
        }
        Ok(NetworkLayout {
            alice,
            bob,
            relay,
            ris,
        })
    }

    /// Alice to Bob distance.
    pub fn d_ab(&self) -> f64 {
        distance(self.alice, self.bob)
    }

    /// Relay to RIS distance, when both nodes are present.
    pub fn d_ri(&self) -> Option<f64> {
        Some(distance(self.relay?, self.ris?))
    }

    pub fn relay(&self) -> Result<Position> {
        self.relay.ok_or(Error::MissingNode("relay"))
    }

    pub fn ris(&self) -> Result<Position> {
        self.ris.ok_or(Error::MissingNode("RIS"))
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, "must be a positive finite distance"))
    }
}

/// Symmetric hybrid network: relay below and RIS above the midpoint of the
/// Alice-Bob segment, `d_ri` apart.
pub fn symmetric_hrn_layout(d_ab: f64, d_ri: f64) -> Result<NetworkLayout> {
    check_positive("d_ab", d_ab)?;
    check_positive("d_ri", d_ri)?;
    let mid = d_ab / 2.0;
    NetworkLayout::new(
        Position::ORIGIN,
        Position { x: d_ab, y: 0.0 },
        Some(Position { x: mid, y: -d_ri / 2.0 }),
        Some(Position { x: mid, y: d_ri / 2.0 }),
    )
}

/// RIS-only network; `d_ri` sets the RIS offset for the chosen scenario.
pub fn ris_assisted_layout(d_ab: f64, scenario: RisScenario, d_ri: f64) -> Result<NetworkLayout> {
    check_positive("d_ab", d_ab)?;
    check_positive("d_ri", d_ri)?;
    let ris = match scenario {
        RisScenario::NearAlice => Position { x: 0.0, y: d_ri },
        RisScenario::Midpoint => Position {
            x: d_ab / 2.0,
            y: d_ri / 2.0,
        },
    };
    NetworkLayout::new(Position::ORIGIN, Position { x: d_ab, y: 0.0 }, None, Some(ris))
}

/// Relay-only network with the relay on the midpoint of the Alice-Bob segment.
pub fn relay_assisted_layout(d_ab: f64) -> Result<NetworkLayout> {
    check_positive("d_ab", d_ab)?;
    NetworkLayout::new(
        Position::ORIGIN,
        Position { x: d_ab, y: 0.0 },
        Some(Position { x: d_ab / 2.0, y: 0.0 }),
        None,
    )
}
