//! Passive beamforming at the RIS.
//!
//! An element `m` with phase `θₘ` and unit amplitude turns an incident
//! channel `h_in,ₘ` and an outgoing channel `h_out,ₘ` into the term
//! `e^{jθₘ}·h_in,ₘ·h_out,ₘ`; the surface response is the sum over elements.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::channels::{Coefficient, LinkGain};
use crate::error::{Error, Result};
use crate::units::wrap_phase;

/// Reflection phases of the RIS elements, each in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RisPhaseVector {
    phases: Vec<f64>,
}

impl RisPhaseVector {
    /// Reflection amplitude of every element.
    pub const AMPLITUDE: f64 = 1.0;

    pub fn new(phases: impl IntoIterator<Item = f64>) -> Self {
        RisPhaseVector {
            phases: phases.into_iter().map(wrap_phase).collect(),
        }
    }

    pub fn zeros(elements: usize) -> Self {
        RisPhaseVector {
            phases: alloc::vec![0.0; elements],
        }
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn into_phases(self) -> Vec<f64> {
        self.phases
    }

    /// `a·e^{jθₘ}` per element.
    pub fn reflection_factors(&self) -> Vec<Complex64> {
        self.phases
            .iter()
            .map(|&t| Complex64::from_polar(Self::AMPLITUDE, t))
            .collect()
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}

/// Surface response `Σₘ a·e^{jθₘ}·h_in,ₘ·h_out,ₘ`.
pub fn cascaded_channel(
    h_in: &[Coefficient],
    theta: &RisPhaseVector,
    h_out: &[Coefficient],
) -> Result<Coefficient> {
    check_len(h_in.len(), theta.len())?;
    check_len(h_in.len(), h_out.len())?;
    let sum = h_in
        .iter()
        .zip(h_out)
        .zip(theta.phases())
        .map(|((a, b), &t)| {
            Complex64::from_polar(
                RisPhaseVector::AMPLITUDE * a.magnitude() * b.magnitude(),
                a.phase() + b.phase() + t,
            )
        })
        .sum::<Complex64>();
    Ok(Coefficient::from_complex(sum))
}

/// Closed-form coherent alignment: every element term is rotated onto the
/// phase of `reference` (or onto the real axis without one).
///
/// Elements whose product channel is exactly zero get phase 0.
pub fn align_phases(
    h_in: &[Coefficient],
    h_out: &[Coefficient],
    reference: Option<Coefficient>,
) -> Result<RisPhaseVector> {
    check_len(h_in.len(), h_out.len())?;
    let target = reference.map_or(0.0, |r| r.phase());
    Ok(RisPhaseVector::new(h_in.iter().zip(h_out).map(|(a, b)| {
        if a.magnitude() * b.magnitude() == 0.0 {
            0.0
        } else {
            target - (a.phase() + b.phase())
        }
    })))
}

/// Effective gain of one hybrid hop with perfectly aligned, equal-gain
/// elements: `(√β_dir + M·√(β₁β₂))²`.
pub fn hybrid_hop_gain(
    beta_dir: LinkGain,
    beta_1: LinkGain,
    beta_2: LinkGain,
    elements: usize,
) -> LinkGain {
    let amplitude = beta_dir.amplitude() + elements as f64 * libm::sqrt(beta_1.value() * beta_2.value());
    // finite non-negative inputs keep this finite and non-negative
    LinkGain::new(amplitude * amplitude).unwrap_or_else(|_| unreachable!())
}

/// Precomputed per-element products `h_in,ₘ·h_out,ₘ` for fast repeated
/// evaluation of `direct + Σ e^{jθₘ}·pₘ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cascade {
    direct: Complex64,
    products: Vec<Complex64>,
}

impl Cascade {
    pub fn new(direct: Option<Coefficient>, h_in: &[Coefficient], h_out: &[Coefficient]) -> Result<Self> {
        check_len(h_in.len(), h_out.len())?;
        Ok(Cascade {
            direct: direct.map_or(Complex64::new(0.0, 0.0), Coefficient::to_complex),
            products: h_in
                .iter()
                .zip(h_out)
                .map(|(a, b)| a.to_complex() * b.to_complex())
                .collect(),
        })
    }

    pub fn elements(&self) -> usize {
        self.products.len()
    }

    /// Effective channel for reflection factors `e^{jθₘ}` (see
    /// [`RisPhaseVector::reflection_factors`]).
    pub fn effective(&self, factors: &[Complex64]) -> Complex64 {
        debug_assert_eq!(factors.len(), self.products.len());
        self.direct
            + self
                .products
                .iter()
                .zip(factors)
                .map(|(p, f)| p * f)
                .sum::<Complex64>()
    }

    /// `|direct| + Σ|pₘ|`, the largest magnitude any phase vector can reach.
    pub fn coherent_bound(&self) -> f64 {
        self.direct.norm() + self.products.iter().map(|p| p.norm()).sum::<f64>()
    }

    /// Phases that attain [`Cascade::coherent_bound`].
    pub fn aligned(&self) -> RisPhaseVector {
        let target = if self.direct.norm() == 0.0 { 0.0 } else { self.direct.arg() };
        RisPhaseVector::new(self.products.iter().map(|p| {
            if p.norm() == 0.0 {
                0.0
            } else {
                target - p.arg()
            }
        }))
    }
}
