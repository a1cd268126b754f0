//! Truncated lunar ephemeris: sublunar point to ~±0.3°, distance in km.

use super::time::{centuries_since_j2000, check_validity, gmst_deg, wrap180, wrap360, UnixTime};
use crate::error::Result;

/// Mean lunar distance used for normalization, km.
pub const MOON_MEAN_DISTANCE_KM: f64 = 384_400.0;

struct LunarState {
    ecl_lon_deg: f64,
    ecl_lat_deg: f64,
    distance_km: f64,
}

/// Main terms of the lunar longitude/latitude/distance series. Enough terms
/// are kept for ~0.2° in longitude and ~0.15° in latitude, comfortably inside
/// the ±1° target.
fn lunar_state(t: UnixTime) -> LunarState {
    let tc = centuries_since_j2000(t);
    let lp = wrap360(218.316_447_7 + 481_267.881_234_21 * tc); // mean longitude
    let d = wrap360(297.850_192_1 + 445_267.111_403_4 * tc).to_radians(); // elongation
    let m = wrap360(357.529_109_2 + 35_999.050_290_9 * tc).to_radians(); // sun anomaly
    let mp = wrap360(134.963_396_4 + 477_198.867_505_5 * tc).to_radians(); // moon anomaly
    let f = wrap360(93.272_095_0 + 483_202.017_523_3 * tc).to_radians(); // arg latitude

    let lon = lp
        + 6.288_774 * mp.sin()
        + 1.274_027 * (2.0 * d - mp).sin()
        + 0.658_314 * (2.0 * d).sin()
        + 0.213_618 * (2.0 * mp).sin()
        - 0.185_116 * m.sin()
        - 0.114_332 * (2.0 * f).sin()
        + 0.058_793 * (2.0 * d - 2.0 * mp).sin()
        + 0.057_066 * (2.0 * d - m - mp).sin()
        + 0.053_322 * (2.0 * d + mp).sin()
        + 0.045_758 * (2.0 * d - m).sin();

    let lat = 5.128_122 * f.sin()
        + 0.280_602 * (mp + f).sin()
        + 0.277_693 * (mp - f).sin()
        + 0.173_237 * (2.0 * d - f).sin()
        + 0.055_413 * (2.0 * d - mp + f).sin()
        + 0.046_271 * (2.0 * d - mp - f).sin();

    let dist = 385_000.56 - 20_905.355 * mp.cos() - 3_699.111 * (2.0 * d - mp).cos()
        - 2_955.968 * (2.0 * d).cos()
        - 569.925 * (2.0 * mp).cos();

    LunarState { ecl_lon_deg: wrap360(lon), ecl_lat_deg: lat, distance_km: dist }
}

/// Geographic point where the Moon is at zenith: (latitude, longitude) in
/// degrees.
pub fn sublunar_point(t: UnixTime) -> Result<(f64, f64)> {
    check_validity(t)?;
    let s = lunar_state(t);
    let lam = s.ecl_lon_deg.to_radians();
    let beta = s.ecl_lat_deg.to_radians();
    let eps = 23.439_f64.to_radians();
    let decl = (beta.sin() * eps.cos() + beta.cos() * eps.sin() * lam.sin()).asin();
    let ra = (lam.sin() * eps.cos() - beta.tan() * eps.sin()).atan2(lam.cos());
    let lon = wrap180(ra.to_degrees() - gmst_deg(t));
    Ok((decl.to_degrees(), lon))
}

/// Earth-Moon distance in km.
pub fn moon_distance_km(t: UnixTime) -> Result<f64> {
    check_validity(t)?;
    Ok(lunar_state(t).distance_km)
}
