//! Low-precision solar position: subsolar point to ±0.3°, distance in AU.

use super::time::{check_validity, days_since_j2000, gmst_deg, wrap180, wrap360, UnixTime};
use crate::error::Result;

/// Solar ecliptic state from the standard low-precision series.
fn solar_elements(t: UnixTime) -> (f64, f64, f64) {
    let n = days_since_j2000(t);
    let mean_lon = wrap360(280.460 + 0.985_647_4 * n);
    let mean_anom = wrap360(357.528 + 0.985_600_3 * n).to_radians();
    let ecl_lon = (mean_lon + 1.915 * mean_anom.sin() + 0.020 * (2.0 * mean_anom).sin()).to_radians();
    let obliquity = (23.439 - 0.000_000_4 * n).to_radians();
    (ecl_lon, obliquity, mean_anom)
}

/// Geographic point where the Sun is at zenith: (latitude, longitude) in
/// degrees. Latitude equals the solar declination; longitude comes from the
/// right ascension against Greenwich sidereal time, which folds in the
/// equation of time.
pub fn subsolar_point(t: UnixTime) -> Result<(f64, f64)> {
    check_validity(t)?;
    let (ecl_lon, obliquity, _) = solar_elements(t);
    let decl = (obliquity.sin() * ecl_lon.sin()).asin().to_degrees();
    let ra = (obliquity.cos() * ecl_lon.sin()).atan2(ecl_lon.cos()).to_degrees();
    let lon = wrap180(ra - gmst_deg(t));
    Ok((decl, lon))
}

/// Earth-Sun distance in astronomical units.
pub fn sun_distance_au(t: UnixTime) -> Result<f64> {
    check_validity(t)?;
    let (_, _, g) = solar_elements(t);
    Ok(1.000_14 - 0.016_71 * g.cos() - 0.000_14 * (2.0 * g).cos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{TimeZone, Utc};

    fn ts(y: i32, mo: u32, d: u32, h: u32, mi: u32) -> i64 {
        Utc.with_ymd_and_hms(y, mo, d, h, mi, 0).unwrap().timestamp()
    }

    #[test]
    fn declination_at_equinoxes_and_solstices() {
        // published instants (rounded to the minute)
        for (t, want) in [
            (ts(2015, 3, 20, 22, 45), 0.0),
            (ts(2015, 9, 23, 8, 20), 0.0),
            (ts(2020, 3, 20, 3, 50), 0.0),
            (ts(2015, 6, 21, 16, 38), 23.44),
            (ts(2023, 6, 21, 14, 58), 23.44),
            (ts(2019, 12, 22, 4, 19), -23.44),
        ] {
            let (lat, _) = subsolar_point(t).unwrap();
            assert!((lat - want).abs() < 0.3, "t={t}: {lat} vs {want}");
        }
    }

    #[test]
    fn noon_longitude_is_near_zero() {
        // at 12:00 UTC the subsolar longitude differs from Greenwich only by
        // the equation of time (< 4 degrees; in early September < 1.5)
        let (_, lon) = subsolar_point(ts(2015, 9, 7, 12, 0)).unwrap();
        assert!(lon.abs() < 1.5, "lon = {lon}");
    }

    #[test]
    fn longitude_drifts_fifteen_degrees_per_hour() {
        let t0 = ts(2018, 4, 20, 6, 0);
        let (_, lon0) = subsolar_point(t0).unwrap();
        let (_, lon1) = subsolar_point(t0 + 3600).unwrap();
        let mut drift = lon1 - lon0;
        if drift > 180.0 {
            drift -= 360.0;
        }
        if drift < -180.0 {
            drift += 360.0;
        }
        assert!((drift + 15.0).abs() < 0.1, "drift {drift}");
    }

    #[test]
    fn distance_stays_within_orbital_bounds() {
        for doy in (0..365).step_by(7) {
            let t = ts(2016, 1, 1, 0, 0) + doy * 86_400;
            let r = sun_distance_au(t).unwrap();
            assert!((0.983..=1.017).contains(&r), "day {doy}: {r}");
        }
    }

    #[test]
    fn perihelion_in_early_january() {
        // scan a year for the distance minimum; perihelion falls Jan 2-5
        let start = ts(2017, 1, 1, 0, 0);
        let (mut best_t, mut best_r) = (start, f64::INFINITY);
        for d in 0..366 {
            let t = start + d * 86_400;
            let r = sun_distance_au(t).unwrap();
            if r < best_r {
                best_r = r;
                best_t = t;
            }
        }
        let doy = (best_t - start) / 86_400;
        // within +-5 days of Jan 3 (allowing wraparound from late December)
        assert!(doy <= 8 || doy >= 358, "perihelion at day-of-year {doy}");
    }

    /// Independent oracle: Spencer's Fourier series for declination and the
    /// equation of time, with the subsolar longitude from mean solar time.
    fn spencer_subsolar(t: i64) -> (f64, f64) {
        let dt = Utc.timestamp_opt(t, 0).unwrap();
        use chrono::{Datelike, Timelike};
        let doy = dt.ordinal() as f64;
        let hours = dt.hour() as f64 + dt.minute() as f64 / 60.0 + dt.second() as f64 / 3600.0;
        let gamma = 2.0 * std::f64::consts::PI / 365.0 * (doy - 1.0 + (hours - 12.0) / 24.0);
        let decl = 0.006_918 - 0.399_912 * gamma.cos() + 0.070_257 * gamma.sin()
            - 0.006_758 * (2.0 * gamma).cos()
            + 0.000_907 * (2.0 * gamma).sin()
            - 0.002_697 * (3.0 * gamma).cos()
            + 0.001_48 * (3.0 * gamma).sin();
        let eot_min = 229.18
            * (0.000_075 + 0.001_868 * gamma.cos()
                - 0.032_077 * gamma.sin()
                - 0.014_615 * (2.0 * gamma).cos()
                - 0.040_849 * (2.0 * gamma).sin());
        let lon = super::wrap180(-15.0 * (hours - 12.0 + eot_min / 60.0));
        (decl.to_degrees(), lon)
    }

    #[test]
    fn agrees_with_spencer_oracle() {
        // budget: Spencer's own truncation error (~0.3°) plus ours (~0.01°)
        for k in 0..30 {
            let t = ts(2014, 1, 5, 3, 17) + k * 12 * 86_400 + k * 3571;
            let (lat, lon) = subsolar_point(t).unwrap();
            let (olat, olon) = spencer_subsolar(t);
            assert!((lat - olat).abs() < 0.5, "t={t}: lat {lat} vs {olat}");
            let mut dl = lon - olon;
            if dl > 180.0 {
                dl -= 360.0;
            }
            if dl < -180.0 {
                dl += 360.0;
            }
            assert!(dl.abs() < 0.5, "t={t}: lon {lon} vs {olon}");
        }
    }
}
