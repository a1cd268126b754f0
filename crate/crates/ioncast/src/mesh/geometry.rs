//! Small 3-vector and spherical geometry helpers (f64 throughout).

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        Vec3::new(self.x / n, self.y / n, self.z / n)
    }

    /// Unit vector for geographic latitude/longitude in degrees.
    pub fn from_lat_lon_deg(lat: f64, lon: f64) -> Vec3 {
        let (phi, lam) = (lat.to_radians(), lon.to_radians());
        Vec3::new(phi.cos() * lam.cos(), phi.cos() * lam.sin(), phi.sin())
    }

    pub fn lat_deg(self) -> f64 {
        self.z.clamp(-1.0, 1.0).asin().to_degrees()
    }

    pub fn lon_deg(self) -> f64 {
        self.y.atan2(self.x).to_degrees()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Great-circle arc between two unit vectors, in radians.
pub fn arc_between(a: Vec3, b: Vec3) -> f64 {
    a.dot(b).clamp(-1.0, 1.0).acos()
}

/// Local east/north/up frame at a unit position. Near the poles the east
/// direction is conventionally pinned to +x so the frame stays orthonormal.
pub fn enu_frame(up: Vec3) -> (Vec3, Vec3, Vec3) {
    let zhat = Vec3::new(0.0, 0.0, 1.0);
    let east = if up.z.abs() > 1.0 - 1e-9 {
        Vec3::new(1.0, 0.0, 0.0)
    } else {
        zhat.cross(up).normalized()
    };
    let north = up.cross(east);
    (east, north, up)
}

/// Solid angle of a spherical triangle (Van Oosterom & Strackee).
pub fn spherical_triangle_area(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let num = a.dot(b.cross(c)).abs();
    let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * num.atan2(den)
}

/// Barycentric coordinates of `p` with respect to triangle (a, b, c), solved
/// in the plane through the three vertices (gnomonic sense). Returns raw,
/// unnormalized coordinates; `p` lies inside the spherical triangle iff all
/// three share the sign of their sum.
pub fn barycentric(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> (f64, f64, f64) {
    // Solve [a b c] * w = p with Cramer's rule.
    let det = a.dot(b.cross(c));
    if det.abs() < 1e-300 {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let wa = p.dot(b.cross(c)) / det;
    let wb = a.dot(p.cross(c)) / det;
    let wc = a.dot(b.cross(p)) / det;
    (wa, wb, wc)
}

/// Rotation of `v` by `angle` radians around a unit `axis` (Rodrigues).
pub fn rotate_about(v: Vec3, axis: Vec3, angle: f64) -> Vec3 {
    let (s, c) = angle.sin_cos();
    v * c + axis.cross(v) * s + axis * (axis.dot(v) * (1.0 - c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_sphere_area_from_octants() {
        // eight octant triangles tile the sphere
        let px = Vec3::new(1.0, 0.0, 0.0);
        let py = Vec3::new(0.0, 1.0, 0.0);
        let pz = Vec3::new(0.0, 0.0, 1.0);
        let mut total = 0.0;
        for sx in [-1.0, 1.0] {
            for sy in [-1.0, 1.0] {
                for sz in [-1.0, 1.0] {
                    total += spherical_triangle_area(px * sx, py * sy, pz * sz);
                }
            }
        }
        assert!((total - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn barycentric_recovers_vertices() {
        let a = Vec3::from_lat_lon_deg(10.0, 20.0);
        let b = Vec3::from_lat_lon_deg(15.0, 30.0);
        let c = Vec3::from_lat_lon_deg(5.0, 28.0);
        let (wa, wb, wc) = barycentric(a, a, b, c);
        assert!((wa - 1.0).abs() < 1e-12 && wb.abs() < 1e-12 && wc.abs() < 1e-12);
    }

    #[test]
    fn enu_frame_is_orthonormal() {
        let p = Vec3::from_lat_lon_deg(37.0, -122.0);
        let (e, n, u) = enu_frame(p);
        assert!(e.dot(n).abs() < 1e-12);
        assert!(e.dot(u).abs() < 1e-12);
        assert!((e.norm() - 1.0).abs() < 1e-12);
        assert!((n.norm() - 1.0).abs() < 1e-12);
        // east at the equator-ish latitudes points along +y for lon ~ -122
        let (e2, _, _) = enu_frame(Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(e2, Vec3::new(1.0, 0.0, 0.0));
    }
}
