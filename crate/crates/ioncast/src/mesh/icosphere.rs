//! Icosphere refinement and the multi-level edge union.

use std::collections::{BTreeSet, HashMap};

use super::geometry::Vec3;
use crate::error::{Error, Result};

const MAX_LEVEL: usize = 8;

/// Fixed tilt (radians, about +y) applied to the base icosahedron. The
/// canonical orientation puts refinement midpoints exactly on the geographic
/// poles, where the east/north edge frame degenerates; the tilt keeps every
/// vertex of every refinement level away from the poles.
const POLE_TILT_RAD: f64 = 0.125;

/// Refined icosahedral mesh. `vertices` always holds the finest-level pool;
/// refinement appends midpoints, so the vertex ids of level `k` are a prefix
/// of level `k + 1` and coarse faces/edges stay valid in finest indexing.
#[derive(Clone, Debug)]
pub struct MultiMesh {
    vertices: Vec<Vec3>,
    faces_per_level: Vec<Vec<[usize; 3]>>,
    edges: Vec<(usize, usize)>,
    max_level: usize,
}

fn base_icosahedron() -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    #[rustfmt::skip]
    let raw = [
        [-1.0,  phi,  0.0], [ 1.0,  phi,  0.0], [-1.0, -phi,  0.0], [ 1.0, -phi,  0.0],
        [ 0.0, -1.0,  phi], [ 0.0,  1.0,  phi], [ 0.0, -1.0, -phi], [ 0.0,  1.0, -phi],
        [ phi,  0.0, -1.0], [ phi,  0.0,  1.0], [-phi,  0.0, -1.0], [-phi,  0.0,  1.0],
    ];
    let y_axis = Vec3::new(0.0, 1.0, 0.0);
    let vertices = raw
        .iter()
        .map(|v| {
            super::geometry::rotate_about(
                Vec3::new(v[0], v[1], v[2]).normalized(),
                y_axis,
                POLE_TILT_RAD,
            )
        })
        .collect();
    #[rustfmt::skip]
    let faces = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    (vertices, faces)
}

/// Splits every triangle into four; midpoints are appended to the pool and
/// reprojected onto the unit sphere.
fn subdivide(vertices: &mut Vec<Vec3>, faces: &[[usize; 3]]) -> Vec<[usize; 3]> {
    let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
    let mut out = Vec::with_capacity(faces.len() * 4);
    let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Vec3>| -> usize {
        let key = (a.min(b), a.max(b));
        if let Some(&id) = midpoints.get(&key) {
            return id;
        }
        let m = (verts[a] + verts[b]).normalized();
        verts.push(m);
        let id = verts.len() - 1;
        midpoints.insert(key, id);
        id
    };
    for &[a, b, c] in faces {
        let ab = midpoint(a, b, vertices);
        let bc = midpoint(b, c, vertices);
        let ca = midpoint(c, a, vertices);
        out.push([a, ab, ca]);
        out.push([b, bc, ab]);
        out.push([c, ca, bc]);
        out.push([ab, bc, ca]);
    }
    out
}

fn edges_of_faces(faces: &[[usize; 3]]) -> BTreeSet<(usize, usize)> {
    let mut set = BTreeSet::new();
    for &[a, b, c] in faces {
        for (u, v) in [(a, b), (b, c), (c, a)] {
            set.insert((u.min(v), u.max(v)));
        }
    }
    set
}

fn check_level(level: usize) -> Result<()> {
    if level > MAX_LEVEL {
        return Err(Error::Argument(format!(
            "refinement level {level} outside supported range 0..={MAX_LEVEL}"
        )));
    }
    Ok(())
}

/// Single refinement level: the level-`k` triangulation only.
pub fn build_icosphere(level: usize) -> Result<MultiMesh> {
    check_level(level)?;
    let (mut vertices, mut faces) = base_icosahedron();
    for _ in 0..level {
        faces = subdivide(&mut vertices, &faces);
    }
    let edges = edges_of_faces(&faces).into_iter().collect();
    Ok(MultiMesh {
        vertices,
        faces_per_level: vec![faces],
        edges,
        max_level: level,
    })
}

/// Multi-mesh: finest-level vertex set with the deduplicated union of the
/// edge sets of every level 0..=`max_level`. Coarse edges are retained
/// verbatim; refinement bisects them, so the union is strictly larger than
/// any single level's edge set for `max_level >= 1`.
pub fn build_multimesh(max_level: usize) -> Result<MultiMesh> {
    check_level(max_level)?;
    let (mut vertices, mut faces) = base_icosahedron();
    let mut faces_per_level = vec![faces.clone()];
    let mut union: BTreeSet<(usize, usize)> = edges_of_faces(&faces);
    for _ in 0..max_level {
        faces = subdivide(&mut vertices, &faces);
        union.extend(edges_of_faces(&faces));
        faces_per_level.push(faces.clone());
    }
    Ok(MultiMesh {
        vertices,
        faces_per_level,
        edges: union.into_iter().collect(),
        max_level,
    })
}

impl MultiMesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn position(&self, v: usize) -> Vec3 {
        self.vertices[v]
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    /// Number of vertex ids belonging to refinement level `k` (prefix rule).
    pub fn level_vertex_count(level: usize) -> usize {
        10 * 4usize.pow(level as u32) + 2
    }

    /// Face lists, coarsest first. Single-level meshes hold one list.
    pub fn faces_per_level(&self) -> &[Vec<[usize; 3]>] {
        &self.faces_per_level
    }

    pub fn finest_faces(&self) -> &[[usize; 3]] {
        self.faces_per_level.last().unwrap()
    }

    /// Deduplicated undirected edge union, ascending `(min, max)` pairs.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Both directions of every undirected edge, sorted by (sender,
    /// receiver). Construction is deterministic.
    pub fn directed_edges(&self) -> (Vec<usize>, Vec<usize>) {
        let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(self.edges.len() * 2);
        for &(u, v) in &self.edges {
            pairs.push((u, v));
            pairs.push((v, u));
        }
        pairs.sort_unstable();
        pairs.into_iter().unzip()
    }

    /// Undirected edge set of one stored level.
    pub fn level_edges(&self, level_index: usize) -> BTreeSet<(usize, usize)> {
        edges_of_faces(&self.faces_per_level[level_index])
    }

    /// Longest finest-level edge, as a great-circle arc in radians. This is
    /// the normalization length for edge features and the grid-to-mesh
    /// connectivity radius.
    pub fn max_edge_arc(&self) -> f64 {
        self.level_edges(self.faces_per_level.len() - 1)
            .iter()
            .map(|&(u, v)| super::geometry::arc_between(self.vertices[u], self.vertices[v]))
            .fold(0.0, f64::max)
    }

    /// (min, mean, max) arc length over an edge set.
    pub fn edge_length_stats(&self, edges: &BTreeSet<(usize, usize)>) -> (f64, f64, f64) {
        let mut min = f64::INFINITY;
        let mut max: f64 = 0.0;
        let mut sum = 0.0;
        for &(u, v) in edges {
            let arc = super::geometry::arc_between(self.vertices[u], self.vertices[v]);
            min = min.min(arc);
            max = max.max(arc);
            sum += arc;
        }
        (min, sum / edges.len() as f64, max)
    }

    /// Experimental: augments the edge union with all pairs at graph distance
    /// <= `k` in the current adjacency. Off by default; large `k` grows the
    /// edge set quickly.
    pub fn augment_k_hop(&mut self, k: usize) {
        if k <= 1 {
            return;
        }
        let n = self.vertices.len();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut union: BTreeSet<(usize, usize)> = self.edges.iter().copied().collect();
        let mut dist = vec![usize::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        for start in 0..n {
            dist[start] = 0;
            queue.push_back(start);
            let mut touched = vec![start];
            while let Some(u) = queue.pop_front() {
                if dist[u] >= k {
                    continue;
                }
                for &v in &adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        touched.push(v);
                        queue.push_back(v);
                        if v != start {
                            union.insert((start.min(v), start.max(v)));
                        }
                    }
                }
            }
            for t in touched {
                dist[t] = usize::MAX;
            }
        }
        self.edges = union.into_iter().collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_zero_is_the_regular_icosahedron() {
        let m = build_icosphere(0).unwrap();
        assert_eq!(m.n_vertices(), 12);
        assert_eq!(m.edges().len(), 30);
        assert_eq!(m.finest_faces().len(), 20);
    }

    #[test]
    fn level_two_counts_and_euler() {
        let m = build_icosphere(2).unwrap();
        assert_eq!(m.n_vertices(), 162);
        assert_eq!(m.finest_faces().len(), 320);
        let e = m.edges().len();
        assert_eq!(162 + 320 - e, 2, "Euler characteristic");
        assert_eq!(e, 480);
    }

    #[test]
    fn vertices_stay_unit_and_prefix_indexed() {
        let coarse = build_icosphere(1).unwrap();
        let fine = build_icosphere(2).unwrap();
        for v in fine.vertices() {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
        // prefix rule: level-1 vertices appear unchanged at the same ids
        for (a, b) in coarse.vertices().iter().zip(fine.vertices()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn edge_lengths_are_near_uniform() {
        for level in [1, 3] {
            let m = build_icosphere(level).unwrap();
            let edges = m.level_edges(m.faces_per_level().len() - 1);
            let (min, mean, max) = m.edge_length_stats(&edges);
            assert!(max <= mean * 1.25, "level {level}: max {max} vs mean {mean}");
            assert!(min >= mean * 0.75, "level {level}: min {min} vs mean {mean}");
        }
    }

    #[test]
    fn multimesh_union_counts() {
        let m0 = build_multimesh(0).unwrap();
        assert_eq!(m0.edges().len(), 30);
        assert_eq!(m0.n_vertices(), 12);

        // level-0 edges are bisected by refinement, so they are disjoint from
        // level-1 edges: 30 + 120 = 150
        let m1 = build_multimesh(1).unwrap();
        assert_eq!(m1.edges().len(), 150);

        // set-union oracle over explicitly enumerated per-level edge sets
        let e0 = m1.level_edges(0);
        let e1 = m1.level_edges(1);
        let union: BTreeSet<_> = e0.union(&e1).copied().collect();
        assert_eq!(union.len(), m1.edges().len());
        assert!(e0.is_disjoint(&e1));

        // union strictly larger than the finest level alone
        assert!(m1.edges().len() > e1.len());
    }

    #[test]
    fn rejects_out_of_range_levels() {
        assert!(build_icosphere(9).is_err());
        assert!(build_multimesh(9).is_err());
    }

    #[test]
    fn directed_edges_double_the_undirected_set() {
        let m = build_multimesh(1).unwrap();
        let (s, r) = m.directed_edges();
        assert_eq!(s.len(), 300);
        assert_eq!(r.len(), 300);
    }

    #[test]
    fn k_hop_augmentation_grows_the_union() {
        let mut m = build_icosphere(1).unwrap();
        let before = m.edges().len();
        m.augment_k_hop(2);
        assert!(m.edges().len() > before);
    }

    #[test]
    fn no_vertex_sits_on_a_pole() {
        // The east/north edge frame is singular at the poles; the base tilt
        // must keep all refinement levels clear of them.
        let m = build_multimesh(5).unwrap();
        for v in m.vertices() {
            assert!(v.z.abs() < 1.0 - 1e-7, "vertex at z = {}", v.z);
        }
    }
}
