//! Decibel and angle helpers.

use core::f64::consts::{PI, TAU};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * libm::log10(linear)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    linear_to_db(watts) + 30.0
}

pub fn wavelength(carrier_frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / carrier_frequency_hz
}

/// Maps an angle into `[0, 2π)`.
pub fn wrap_phase(angle: f64) -> f64 {
    let r = angle % TAU;
    let r = if r < 0.0 { r + TAU } else { r };
    // r + TAU can round up to exactly TAU for tiny negative r
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Maps an angle difference into `(-π, π]`.
pub fn wrap_difference(delta: f64) -> f64 {
    let w = wrap_phase(delta);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dbm_round_trip() {
        assert_relative_eq!(dbm_to_watts(30.0), 1.0, max_relative = 1e-12);
        assert_relative_eq!(dbm_to_watts(-94.0), 3.981_071_705_534_969e-13, max_relative = 1e-12);
        assert_relative_eq!(watts_to_dbm(dbm_to_watts(17.5)), 17.5, epsilon = 1e-12);
    }

    #[test]
    fn phase_wrapping() {
        assert_eq!(wrap_phase(TAU), 0.0);
        assert_relative_eq!(wrap_phase(-PI / 2.0), 1.5 * PI);
        assert_eq!(wrap_phase(-1e-300), 0.0);
        assert_relative_eq!(wrap_phase(5.0 * TAU + 1.0), 1.0, epsilon = 1e-12);
        assert_relative_eq!(wrap_difference(1.5 * PI), -0.5 * PI);
        assert_relative_eq!(wrap_difference(-PI), PI);
    }

    #[test]
    fn three_ghz_wavelength() {
        assert_relative_eq!(wavelength(3e9), 0.099_930_819_333, max_relative = 1e-10);
    }
}
