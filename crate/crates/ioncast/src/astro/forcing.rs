//! Forcing channels: quantities analytically computable for any timestamp,
//! supplied as ground truth during rollout and excluded from the loss.

use super::moon::{moon_distance_km, sublunar_point, MOON_MEAN_DISTANCE_KM};
use super::sun::{subsolar_point, sun_distance_au};
use super::time::UnixTime;
use crate::error::{Error, Result};
use crate::mesh::{LatLonGrid, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Body {
    Sun,
    Moon,
}

/// Subsolar/sublunar point for a body, degrees.
pub fn subbody_point(t: UnixTime, body: Body) -> Result<(f64, f64)> {
    match body {
        Body::Sun => subsolar_point(t),
        Body::Moon => sublunar_point(t),
    }
}

/// Cosine of the body zenith angle at every grid node:
/// `cos chi = sin(phi) sin(delta) + cos(phi) cos(delta) cos(hour angle)`,
/// computed as the dot product with the sub-body unit vector.
pub fn zenith_cos_map(t: UnixTime, grid: &LatLonGrid, body: Body) -> Result<Vec<f64>> {
    let (lat, lon) = subbody_point(t, body)?;
    let b = Vec3::from_lat_lon_deg(lat, lon);
    Ok(grid.positions().iter().map(|p| p.dot(b)).collect())
}

/// Earth-body distance normalized by 1 AU (sun) or the mean lunar distance.
pub fn body_distance(t: UnixTime, body: Body) -> Result<f64> {
    match body {
        Body::Sun => sun_distance_au(t),
        Body::Moon => Ok(moon_distance_km(t)? / MOON_MEAN_DISTANCE_KM),
    }
}

/// The catalog of computable forcing channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ForcingChannel {
    SolarZenithCos,
    LunarZenithCos,
    SubsolarLatSin,
    SubsolarLatCos,
    SubsolarLonSin,
    SubsolarLonCos,
    SublunarLatSin,
    SublunarLatCos,
    SublunarLonSin,
    SublunarLonCos,
    SunDistance,
    MoonDistance,
    LocalSolarTimeSin,
    LocalSolarTimeCos,
}

impl ForcingChannel {
    pub const ALL: [ForcingChannel; 14] = [
        ForcingChannel::SolarZenithCos,
        ForcingChannel::LunarZenithCos,
        ForcingChannel::SubsolarLatSin,
        ForcingChannel::SubsolarLatCos,
        ForcingChannel::SubsolarLonSin,
        ForcingChannel::SubsolarLonCos,
        ForcingChannel::SublunarLatSin,
        ForcingChannel::SublunarLatCos,
        ForcingChannel::SublunarLonSin,
        ForcingChannel::SublunarLonCos,
        ForcingChannel::SunDistance,
        ForcingChannel::MoonDistance,
        ForcingChannel::LocalSolarTimeSin,
        ForcingChannel::LocalSolarTimeCos,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ForcingChannel::SolarZenithCos => "sza_cos",
            ForcingChannel::LunarZenithCos => "lza_cos",
            ForcingChannel::SubsolarLatSin => "subsolar_lat_sin",
            ForcingChannel::SubsolarLatCos => "subsolar_lat_cos",
            ForcingChannel::SubsolarLonSin => "subsolar_lon_sin",
            ForcingChannel::SubsolarLonCos => "subsolar_lon_cos",
            ForcingChannel::SublunarLatSin => "sublunar_lat_sin",
            ForcingChannel::SublunarLatCos => "sublunar_lat_cos",
            ForcingChannel::SublunarLonSin => "sublunar_lon_sin",
            ForcingChannel::SublunarLonCos => "sublunar_lon_cos",
            ForcingChannel::SunDistance => "sun_dist",
            ForcingChannel::MoonDistance => "moon_dist",
            ForcingChannel::LocalSolarTimeSin => "lst_sin",
            ForcingChannel::LocalSolarTimeCos => "lst_cos",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::Config(format!("unknown forcing channel '{name}'")))
    }
}

/// One timestamp's forcing channel maps on the grid. Scalar quantities are
/// broadcast to every node so all channels share the map layout.
#[derive(Clone, Debug, PartialEq)]
pub struct ForcingFrame {
    pub t: UnixTime,
    pub channels: Vec<(ForcingChannel, Vec<f64>)>,
}

impl ForcingFrame {
    pub fn channel(&self, c: ForcingChannel) -> Option<&[f64]> {
        self.channels
            .iter()
            .find(|(name, _)| *name == c)
            .map(|(_, v)| v.as_slice())
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }
}

/// Assembles the enabled forcing channels for a timestamp. Pure function of
/// `(t, grid, channels)`: two calls with identical arguments are bit-equal.
pub fn forcing_frame(
    t: UnixTime,
    grid: &LatLonGrid,
    channels: &[ForcingChannel],
) -> Result<ForcingFrame> {
    let n = grid.n_nodes();
    let broadcast = |v: f64| vec![v; n];

    // shared intermediate quantities, computed at most once
    let mut sun_pt: Option<(f64, f64)> = None;
    let mut moon_pt: Option<(f64, f64)> = None;
    let mut sun_point = |t| -> Result<(f64, f64)> {
        if sun_pt.is_none() {
            sun_pt = Some(subsolar_point(t)?);
        }
        Ok(sun_pt.unwrap())
    };
    let mut moon_point = |t| -> Result<(f64, f64)> {
        if moon_pt.is_none() {
            moon_pt = Some(sublunar_point(t)?);
        }
        Ok(moon_pt.unwrap())
    };

    let mut out = Vec::with_capacity(channels.len());
    for &c in channels {
        let map = match c {
            ForcingChannel::SolarZenithCos => zenith_cos_map(t, grid, Body::Sun)?,
            ForcingChannel::LunarZenithCos => zenith_cos_map(t, grid, Body::Moon)?,
            ForcingChannel::SubsolarLatSin => broadcast(sun_point(t)?.0.to_radians().sin()),
            ForcingChannel::SubsolarLatCos => broadcast(sun_point(t)?.0.to_radians().cos()),
            ForcingChannel::SubsolarLonSin => broadcast(sun_point(t)?.1.to_radians().sin()),
            ForcingChannel::SubsolarLonCos => broadcast(sun_point(t)?.1.to_radians().cos()),
            ForcingChannel::SublunarLatSin => broadcast(moon_point(t)?.0.to_radians().sin()),
            ForcingChannel::SublunarLatCos => broadcast(moon_point(t)?.0.to_radians().cos()),
            ForcingChannel::SublunarLonSin => broadcast(moon_point(t)?.1.to_radians().sin()),
            ForcingChannel::SublunarLonCos => broadcast(moon_point(t)?.1.to_radians().cos()),
            ForcingChannel::SunDistance => broadcast(body_distance(t, Body::Sun)?),
            ForcingChannel::MoonDistance => broadcast(body_distance(t, Body::Moon)?),
            ForcingChannel::LocalSolarTimeSin | ForcingChannel::LocalSolarTimeCos => {
                // local solar time as the node longitude minus the subsolar
                // longitude (the solar hour angle), encoded sin/cos
                let ss_lon = sun_point(t)?.1;
                let mut map = Vec::with_capacity(n);
                for i in 0..n {
                    let (_, col) = grid.row_col(i);
                    let angle = (grid.lon_of_col(col) - ss_lon).to_radians();
                    map.push(match c {
                        ForcingChannel::LocalSolarTimeSin => angle.sin(),
                        _ => angle.cos(),
                    });
                }
                map
            }
        };
        out.push((c, map));
    }
    Ok(ForcingFrame { t, channels: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::geometry::arc_between;
    use chrono::{TimeZone, Utc};

    fn ts(y: i32, mo: u32, d: u32, h: u32) -> i64 {
        Utc.with_ymd_and_hms(y, mo, d, h, 0, 0).unwrap().timestamp()
    }

    #[test]
    fn zenith_is_one_at_subsolar_cell_and_minus_one_at_antipode() {
        let grid = LatLonGrid::new(180, 360).unwrap(); // 1° cells
        let t = ts(2015, 9, 7, 15);
        let map = zenith_cos_map(t, &grid, Body::Sun).unwrap();
        let max = map.iter().cloned().fold(f64::MIN, f64::max);
        let min = map.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max >= 0.999, "max {max}");
        assert!(min <= -0.999, "min {min}");
    }

    #[test]
    fn illuminated_fraction_integral() {
        // area-weighted mean of max(cos chi, 0) over the sphere is exactly
        // 1/4 in the continuum; quadrature on the grid should be within 0.02
        let grid = LatLonGrid::new(45, 90).unwrap();
        for t in [ts(2014, 3, 3, 3), ts(2019, 12, 25, 18)] {
            let map = zenith_cos_map(t, &grid, Body::Sun).unwrap();
            let mut acc = 0.0;
            let mut wsum = 0.0;
            for (i, v) in map.iter().enumerate() {
                let (row, _) = grid.row_col(i);
                let w = grid.cell_area_weight(row);
                acc += w * v.max(0.0);
                wsum += w;
            }
            let mean = acc / wsum;
            assert!((mean - 0.25).abs() < 0.02, "mean {mean}");
        }
    }

    #[test]
    fn zenith_matches_law_of_cosines_recomputation() {
        let grid = LatLonGrid::new(18, 36).unwrap();
        let t = ts(2021, 6, 1, 9);
        let map = zenith_cos_map(t, &grid, Body::Sun).unwrap();
        let (decl, ss_lon) = subsolar_point(t).unwrap();
        let (sd, cd) = (decl.to_radians().sin(), decl.to_radians().cos());
        for i in 0..grid.n_nodes() {
            let (row, col) = grid.row_col(i);
            let phi = grid.lat_of_row(row).to_radians();
            let h = (grid.lon_of_col(col) - ss_lon).to_radians();
            let want = phi.sin() * sd + phi.cos() * cd * h.cos();
            assert!((map[i] - want).abs() < 1e-9, "node {i}: {} vs {want}", map[i]);
        }
    }

    #[test]
    fn empty_spec_gives_zero_channels() {
        let grid = LatLonGrid::new(4, 8).unwrap();
        let f = forcing_frame(ts(2015, 1, 1, 0), &grid, &[]).unwrap();
        assert_eq!(f.n_channels(), 0);
    }

    #[test]
    fn forcing_frame_is_pure() {
        let grid = LatLonGrid::new(9, 18).unwrap();
        let t = ts(2016, 8, 14, 21);
        let a = forcing_frame(t, &grid, &ForcingChannel::ALL).unwrap();
        let b = forcing_frame(t, &grid, &ForcingChannel::ALL).unwrap();
        assert_eq!(a, b);
        // trig encodings stay in [-1, 1]
        for (c, map) in &a.channels {
            if matches!(c, ForcingChannel::SunDistance | ForcingChannel::MoonDistance) {
                continue;
            }
            assert!(map.iter().all(|v| (-1.0..=1.0).contains(v)), "{c:?}");
        }
    }

    #[test]
    fn solar_geometry_drifts_slowly_across_one_day() {
        // after 24 h the subsolar point has moved by the declination drift
        // plus the equation-of-time drift: under 1.2 degrees
        for t in [ts(2015, 3, 1, 0), ts(2018, 11, 11, 6), ts(2022, 6, 30, 12)] {
            let (la0, lo0) = subsolar_point(t).unwrap();
            let (la1, lo1) = subsolar_point(t + 86_400).unwrap();
            let a = crate::mesh::Vec3::from_lat_lon_deg(la0, lo0);
            let b = crate::mesh::Vec3::from_lat_lon_deg(la1, lo1);
            let arc = arc_between(a, b).to_degrees();
            assert!(arc <= 1.2, "t={t}: drift {arc}");
        }
    }

    #[test]
    fn unknown_channel_name_is_a_config_error() {
        assert!(matches!(
            ForcingChannel::from_name("solar_flux"),
            Err(Error::Config(_))
        ));
        assert_eq!(
            ForcingChannel::from_name("sza_cos").unwrap(),
            ForcingChannel::SolarZenithCos
        );
    }
}
