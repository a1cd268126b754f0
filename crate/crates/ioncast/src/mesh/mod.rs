//! Spherical discretizations: the lat-lon grid, the refined icosahedral
//! multi-mesh, and the bipartite graphs connecting them.

pub mod bipartite;
pub mod features;
pub mod geometry;
mod grid;
mod icosphere;

pub use bipartite::{
    build_grid2mesh, build_mesh2grid, count_within_radius, mesh2grid_weights, BipartiteGraph,
    Mesh2Grid, DEFAULT_RADIUS_SCALE,
};
pub use features::edge_features;
pub use geometry::Vec3;
pub use grid::LatLonGrid;
pub use icosphere::{build_icosphere, build_multimesh, MultiMesh};

#[cfg(test)]
mod tests {
    use super::geometry::{rotate_about, spherical_triangle_area, Vec3};
    use super::*;

    #[test]
    fn finest_triangles_tile_the_sphere() {
        let mesh = build_multimesh(3).unwrap();
        let total: f64 = mesh
            .finest_faces()
            .iter()
            .map(|f| {
                spherical_triangle_area(mesh.position(f[0]), mesh.position(f[1]), mesh.position(f[2]))
            })
            .sum();
        assert!((total - 4.0 * std::f64::consts::PI).abs() < 1e-6, "total {total}");
    }

    #[test]
    fn self_loop_feature_is_zero() {
        let pos = vec![Vec3::from_lat_lon_deg(12.0, 34.0)];
        let f = edge_features(&[0], &[0], &pos, &pos, 0.5);
        assert_eq!(f.data(), &[0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn antipodal_length_feature_is_pi_over_max_edge() {
        let a = Vec3::from_lat_lon_deg(30.0, 40.0);
        let f = edge_features(&[0], &[0], &[a], &[-a], 0.25);
        let len = f.data()[3];
        assert!((len - std::f64::consts::PI / 0.25).abs() < 1e-12);
    }

    #[test]
    fn features_invariant_under_pole_preserving_rotations() {
        // The east/north frame is anchored to the geographic pole, so the
        // full feature vector is invariant exactly for rotations about the
        // polar axis.
        let mesh = build_icosphere(1).unwrap();
        let (senders, receivers) = mesh.directed_edges();
        let base = edge_features(&senders, &receivers, mesh.vertices(), mesh.vertices(), mesh.max_edge_arc());

        let axis = Vec3::new(0.0, 0.0, 1.0);
        for angle in [0.31, 1.57, std::f64::consts::PI] {
            let rotated: Vec<Vec3> = mesh
                .vertices()
                .iter()
                .map(|&v| rotate_about(v, axis, angle))
                .collect();
            let rot = edge_features(&senders, &receivers, &rotated, &rotated, mesh.max_edge_arc());
            for (a, b) in base.data().iter().zip(rot.data()) {
                assert!((a - b).abs() < 1e-6, "angle {angle}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn frame_free_features_invariant_under_arbitrary_rotation() {
        // Radial displacement and arc length do not reference the pole and
        // survive any global rotation.
        let mesh = build_icosphere(1).unwrap();
        let (senders, receivers) = mesh.directed_edges();
        let base = edge_features(&senders, &receivers, mesh.vertices(), mesh.vertices(), mesh.max_edge_arc());

        let axis = Vec3::new(0.3, -0.5, 0.81).normalized();
        let rotated: Vec<Vec3> = mesh
            .vertices()
            .iter()
            .map(|&v| rotate_about(v, axis, 0.7))
            .collect();
        let rot = edge_features(&senders, &receivers, &rotated, &rotated, mesh.max_edge_arc());
        for e in 0..senders.len() {
            for comp in [2, 3] {
                let a = base.data()[e * 4 + comp];
                let b = rot.data()[e * 4 + comp];
                assert!((a - b).abs() < 1e-6, "edge {e} comp {comp}: {a} vs {b}");
            }
        }
    }
}
