//! Magnetic-coordinate maps from a tilted centered dipole, with an
//! external-file override for users holding true quasi-dipole grids.

use super::super::mesh::{LatLonGrid, Vec3};
use crate::error::{Error, Result};

/// 2015-epoch centered dipole pole (northern hemisphere).
pub const DEFAULT_POLE_LAT_DEG: f64 = 80.4;
pub const DEFAULT_POLE_LON_DEG: f64 = -72.6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DipoleConfig {
    pub pole_lat_deg: f64,
    pub pole_lon_deg: f64,
}

impl Default for DipoleConfig {
    fn default() -> Self {
        DipoleConfig {
            pole_lat_deg: DEFAULT_POLE_LAT_DEG,
            pole_lon_deg: DEFAULT_POLE_LON_DEG,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MagProvenance {
    AnalyticDipole,
    ExternalFile,
}

/// Static magnetic latitude/longitude maps on the grid. Longitude is encoded
/// as sin/cos to avoid the ±180° seam in learned inputs.
#[derive(Clone, Debug)]
pub struct MagCoordMaps {
    pub maglat_deg: Vec<f64>,
    pub maglon_sin: Vec<f64>,
    pub maglon_cos: Vec<f64>,
    pub provenance: MagProvenance,
}

/// Dipole frame axes for a pole position. The magnetic prime meridian is the
/// half-plane containing the geographic north pole (x axis of the frame).
fn dipole_frame(cfg: &DipoleConfig) -> (Vec3, Vec3, Vec3) {
    let zd = Vec3::from_lat_lon_deg(cfg.pole_lat_deg, cfg.pole_lon_deg);
    let zgeo = Vec3::new(0.0, 0.0, 1.0);
    let yd = zgeo.cross(zd).normalized();
    let xd = yd.cross(zd);
    (xd, yd, zd)
}

pub fn dipole_maps(grid: &LatLonGrid, cfg: &DipoleConfig) -> MagCoordMaps {
    let (xd, yd, zd) = dipole_frame(cfg);
    let n = grid.n_nodes();
    let mut maglat = Vec::with_capacity(n);
    let mut mlon_sin = Vec::with_capacity(n);
    let mut mlon_cos = Vec::with_capacity(n);
    for &p in grid.positions() {
        maglat.push(p.dot(zd).clamp(-1.0, 1.0).asin().to_degrees());
        let mlon = p.dot(yd).atan2(p.dot(xd));
        mlon_sin.push(mlon.sin());
        mlon_cos.push(mlon.cos());
    }
    MagCoordMaps {
        maglat_deg: maglat,
        maglon_sin: mlon_sin,
        maglon_cos: mlon_cos,
        provenance: MagProvenance::AnalyticDipole,
    }
}

/// Wraps externally supplied maps (already read from the grid-stack file)
/// after validating shapes and ranges.
pub fn from_external_maps(
    grid: &LatLonGrid,
    maglat_deg: Vec<f64>,
    maglon_sin: Vec<f64>,
    maglon_cos: Vec<f64>,
) -> Result<MagCoordMaps> {
    let n = grid.n_nodes();
    for (name, v) in [
        ("maglat", &maglat_deg),
        ("maglon_sin", &maglon_sin),
        ("maglon_cos", &maglon_cos),
    ] {
        if v.len() != n {
            return Err(Error::Format(format!(
                "magnetic coordinate channel {name} has {} values, grid expects {n}",
                v.len()
            )));
        }
    }
    if maglat_deg.iter().any(|v| !(-90.0..=90.0).contains(v)) {
        return Err(Error::Format(
            "magnetic latitude outside [-90, 90] in external file".into(),
        ));
    }
    Ok(MagCoordMaps {
        maglat_deg,
        maglon_sin,
        maglon_cos,
        provenance: MagProvenance::ExternalFile,
    })
}
