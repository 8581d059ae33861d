//! Small 3-D vector algebra and pointing-angle conventions.
//!
//! Angle convention used throughout the crate: azimuth is a bearing in
//! degrees, measured clockwise from +y ("north") toward +x ("east") and
//! normalized into [0, 360); elevation is measured from the horizontal
//! plane toward +z, in [-90, 90].

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A point or direction in 3-D space, meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub type Point3 = Vec3;

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, rhs: Vec3) -> f64 {
        self.x * rhs.x + self.y * rhs.y + self.z * rhs.z
    }

    pub fn cross(self, rhs: Vec3) -> Vec3 {
        Vec3::new(
            self.y * rhs.z - self.z * rhs.y,
            self.z * rhs.x - self.x * rhs.z,
            self.x * rhs.y - self.y * rhs.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        self / self.norm()
    }

    pub fn distance(self, rhs: Vec3) -> f64 {
        (self - rhs).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Normalize an azimuth bearing into [0, 360).
pub fn normalize_azimuth_deg(az_deg: f64) -> f64 {
    let az = az_deg.rem_euclid(360.0);
    // rem_euclid can return 360.0 for tiny negative inputs
    if az >= 360.0 {
        0.0
    } else {
        az
    }
}

/// Bearing azimuth and elevation, degrees, of a direction vector.
pub fn direction_angles_deg(dir: Vec3) -> (f64, f64) {
    let az = normalize_azimuth_deg(dir.x.atan2(dir.y).to_degrees());
    let horiz = (dir.x * dir.x + dir.y * dir.y).sqrt();
    let el = dir.z.atan2(horiz).to_degrees();
    (az, el)
}

/// Unit direction vector for a bearing azimuth and elevation in degrees.
pub fn angles_to_direction(az_deg: f64, el_deg: f64) -> Vec3 {
    let az = az_deg.to_radians();
    let el = el_deg.to_radians();
    Vec3::new(el.cos() * az.sin(), el.cos() * az.cos(), el.sin())
}

/// Great-circle angular separation in degrees between two pointing angles.
pub fn angular_separation_deg(az1: f64, el1: f64, az2: f64, el2: f64) -> f64 {
    let (e1, e2) = (el1.to_radians(), el2.to_radians());
    let daz = (az1 - az2).to_radians();
    let c = e1.sin() * e2.sin() + e1.cos() * e2.cos() * daz.cos();
    c.clamp(-1.0, 1.0).acos().to_degrees()
}
