//! Geometric edge features for the bipartite and mesh graphs.

use super::geometry::{arc_between, enu_frame, Vec3};
use crate::tensor::Tensor;

/// Per-edge feature vector `[E, 4]`: the sender displacement expressed in the
/// receiver's local east/north/up frame, plus the great-circle arc length,
/// all divided by the maximum finest-mesh edge length.
pub fn edge_features(
    senders: &[usize],
    receivers: &[usize],
    sender_pos: &[Vec3],
    receiver_pos: &[Vec3],
    max_edge_arc: f64,
) -> Tensor<f64> {
    let inv = 1.0 / max_edge_arc;
    let mut data = Vec::with_capacity(senders.len() * 4);
    for (&s, &r) in senders.iter().zip(receivers) {
        let sp = sender_pos[s];
        let rp = receiver_pos[r];
        let d = sp - rp;
        let (east, north, up) = enu_frame(rp);
        data.push(d.dot(east) * inv);
        data.push(d.dot(north) * inv);
        data.push(d.dot(up) * inv);
        data.push(arc_between(sp, rp) * inv);
    }
    Tensor::from_vec(&[senders.len(), 4], data).expect("edge feature buffer sized E*4")
}
