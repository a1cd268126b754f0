//! Latitude-longitude grid with nodes at cell centers.

use super::geometry::Vec3;
use crate::error::{Error, Result};

/// Equiangular grid, north-to-south rows, west-to-east columns starting at
/// longitude -180°. Node index = `row * n_lon + col`. Cell-center placement
/// avoids duplicated pole nodes (e.g. 89.5°N … 89.5°S at 1° resolution).
#[derive(Clone, Debug)]
pub struct LatLonGrid {
    n_lat: usize,
    n_lon: usize,
    positions: Vec<Vec3>,
}

impl LatLonGrid {
    pub fn new(n_lat: usize, n_lon: usize) -> Result<Self> {
        if n_lat == 0 || n_lon == 0 {
            return Err(Error::Argument(format!(
                "grid extents must be positive, got {n_lat}x{n_lon}"
            )));
        }
        let mut positions = Vec::with_capacity(n_lat * n_lon);
        for row in 0..n_lat {
            let lat = Self::lat_of_row_static(n_lat, row);
            for col in 0..n_lon {
                let lon = Self::lon_of_col_static(n_lon, col);
                positions.push(Vec3::from_lat_lon_deg(lat, lon));
            }
        }
        Ok(LatLonGrid { n_lat, n_lon, positions })
    }

    fn lat_of_row_static(n_lat: usize, row: usize) -> f64 {
        let res = 180.0 / n_lat as f64;
        90.0 - (row as f64 + 0.5) * res
    }

    fn lon_of_col_static(n_lon: usize, col: usize) -> f64 {
        let res = 360.0 / n_lon as f64;
        -180.0 + (col as f64 + 0.5) * res
    }

    pub fn n_lat(&self) -> usize {
        self.n_lat
    }

    pub fn n_lon(&self) -> usize {
        self.n_lon
    }

    pub fn n_nodes(&self) -> usize {
        self.n_lat * self.n_lon
    }

    /// Latitude cell height in degrees.
    pub fn lat_resolution_deg(&self) -> f64 {
        180.0 / self.n_lat as f64
    }

    /// Longitude cell width in degrees.
    pub fn lon_resolution_deg(&self) -> f64 {
        360.0 / self.n_lon as f64
    }

    pub fn lat_of_row(&self, row: usize) -> f64 {
        Self::lat_of_row_static(self.n_lat, row)
    }

    pub fn lon_of_col(&self, col: usize) -> f64 {
        Self::lon_of_col_static(self.n_lon, col)
    }

    pub fn position(&self, node: usize) -> Vec3 {
        self.positions[node]
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn node_index(&self, row: usize, col: usize) -> usize {
        row * self.n_lon + col
    }

    /// (row, col) of a node index.
    pub fn row_col(&self, node: usize) -> (usize, usize) {
        (node / self.n_lon, node % self.n_lon)
    }

    /// Fractional sphere area of one cell in a given row (used by the
    /// area-weighted metric toggle): proportional to
    /// `sin(lat_top) - sin(lat_bottom)`.
    pub fn cell_area_weight(&self, row: usize) -> f64 {
        let res = self.lat_resolution_deg();
        let top = (90.0 - row as f64 * res).to_radians();
        let bottom = (90.0 - (row as f64 + 1.0) * res).to_radians();
        (top.sin() - bottom.sin()) / self.n_lon as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_layout_is_north_to_south_from_dateline() {
        let g = LatLonGrid::new(18, 36).unwrap();
        assert_eq!(g.n_nodes(), 648);
        assert!((g.lat_of_row(0) - 85.0).abs() < 1e-12);
        assert!((g.lat_of_row(17) + 85.0).abs() < 1e-12);
        assert!((g.lon_of_col(0) + 175.0).abs() < 1e-12);
        assert!((g.lon_of_col(35) - 175.0).abs() < 1e-12);
        assert_eq!(g.node_index(2, 3), 2 * 36 + 3);
    }

    #[test]
    fn positions_are_unit_norm() {
        let g = LatLonGrid::new(9, 18).unwrap();
        for p in g.positions() {
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cell_area_weights_sum_to_one() {
        let g = LatLonGrid::new(18, 36).unwrap();
        let total: f64 = (0..18).map(|r| g.cell_area_weight(r) * 36.0).sum();
        assert!((total - 2.0).abs() < 1e-12); // sin(90) - sin(-90)
    }
}
