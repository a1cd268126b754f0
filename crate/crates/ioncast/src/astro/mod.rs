//! Analytic forcings: Sun/Moon positions, zenith-angle maps, Earth-body
//! distances, and magnetic-coordinate maps, valid for any timestamp in
//! 1950-2100.

mod forcing;
mod magcoord;
mod moon;
mod sun;
pub mod time;

pub use forcing::{
    body_distance, forcing_frame, subbody_point, zenith_cos_map, Body, ForcingChannel,
    ForcingFrame,
};
pub use magcoord::{
    dipole_maps, from_external_maps, DipoleConfig, MagCoordMaps, MagProvenance,
    DEFAULT_POLE_LAT_DEG, DEFAULT_POLE_LON_DEG,
};
pub use moon::{moon_distance_km, sublunar_point, MOON_MEAN_DISTANCE_KM};
pub use sun::{subsolar_point, sun_distance_au};
pub use time::UnixTime;
