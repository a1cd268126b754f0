//! Time base for the analytic ephemerides: Unix epoch seconds in, days since
//! J2000.0 out.

use crate::error::{Error, Result};

/// Unix epoch seconds (UTC).
pub type UnixTime = i64;

/// J2000.0 reference as Unix seconds (2000-01-01T12:00Z; the ~64 s TT-UTC
/// offset is far below the accuracy target of the series).
pub const J2000_UNIX: i64 = 946_728_000;

/// Validity window of the low-precision series: calendar years 1950-2100.
pub const VALID_MIN: UnixTime = -631_152_000; // 1950-01-01T00:00:00Z
pub const VALID_MAX: UnixTime = 4_133_980_800; // 2101-01-01T00:00:00Z

pub fn check_validity(t: UnixTime) -> Result<()> {
    if !(VALID_MIN..VALID_MAX).contains(&t) {
        return Err(Error::Range(format!(
            "timestamp {t} outside the 1950-2100 validity window of the ephemeris series"
        )));
    }
    Ok(())
}

pub fn days_since_j2000(t: UnixTime) -> f64 {
    (t - J2000_UNIX) as f64 / 86_400.0
}

/// Julian centuries since J2000.0.
pub fn centuries_since_j2000(t: UnixTime) -> f64 {
    days_since_j2000(t) / 36_525.0
}

/// Greenwich mean sidereal time in degrees.
pub fn gmst_deg(t: UnixTime) -> f64 {
    wrap360(280.460_618_37 + 360.985_647_366_29 * days_since_j2000(t))
}

pub fn wrap360(deg: f64) -> f64 {
    deg.rem_euclid(360.0)
}

/// Wraps to (-180, 180].
pub fn wrap180(deg: f64) -> f64 {
    let w = deg.rem_euclid(360.0);
    if w > 180.0 {
        w - 360.0
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};

    #[test]
    fn validity_bounds_match_calendar_years() {
        assert_eq!(
            Utc.with_ymd_and_hms(1950, 1, 1, 0, 0, 0).unwrap().timestamp(),
            VALID_MIN
        );
        assert_eq!(
            Utc.with_ymd_and_hms(2101, 1, 1, 0, 0, 0).unwrap().timestamp(),
            VALID_MAX
        );
        assert_eq!(
            Utc.with_ymd_and_hms(2000, 1, 1, 12, 0, 0).unwrap().timestamp(),
            J2000_UNIX
        );
    }

    #[test]
    fn wrap_conventions() {
        assert_eq!(wrap180(190.0), -170.0);
        assert_eq!(wrap180(-190.0), 170.0);
        assert_eq!(wrap180(180.0), 180.0);
        assert_eq!(wrap360(-10.0), 350.0);
    }

    #[test]
    fn out_of_window_is_a_range_error() {
        assert!(check_validity(VALID_MIN - 1).is_err());
        assert!(check_validity(VALID_MAX).is_err());
        assert!(check_validity(0).is_ok());
    }
}
