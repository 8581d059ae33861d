//! Image-method specular ray tracer over planar facets.
//!
//! Scenes are lists of planar convex quadrilateral facets (building walls,
//! ground planes). Paths up to second reflection order are enumerated
//! exactly by mirroring the TX across facet sequences; every candidate is
//! validated for reflection points inside their facets and unobstructed
//! legs. Facets are perfect two-sided specular reflectors; there is no
//! diffraction, scattering, or material model. Only path geometry feeds the
//! downstream pipelines — measured powers, never traced powers, provide
//! amplitudes.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::geom::{direction_angles_deg, Point3, Vec3};
use crate::{path_delay_ns, Error, Result};

/// Geometric tolerance for point-in-facet and intersection tests, meters.
pub const GEOM_EPS_M: f64 = 1e-6;

/// A planar convex quadrilateral reflector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Facet {
    vertices: [Point3; 4],
    normal: Vec3,
}

impl Facet {
    /// Build a facet from four vertices in cyclic order. Vertices must be
    /// coplanar to within 1e-6 m and enclose a non-degenerate convex quad.
    pub fn new(vertices: [Point3; 4]) -> Result<Facet> {
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "facet vertices must be finite".to_string(),
            ));
        }
        // Newell's method: robust normal for near-planar polygons
        let mut n = Vec3::new(0.0, 0.0, 0.0);
        for i in 0..4 {
            let a = vertices[i];
            let b = vertices[(i + 1) % 4];
            n.x += (a.y - b.y) * (a.z + b.z);
            n.y += (a.z - b.z) * (a.x + b.x);
            n.z += (a.x - b.x) * (a.y + b.y);
        }
        let area = n.norm() / 2.0;
        if area < 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "facet is degenerate (area {area:.3e} m^2)"
            )));
        }
        let normal = n / n.norm();
        let centroid = (vertices[0] + vertices[1] + vertices[2] + vertices[3]) / 4.0;
        for (i, v) in vertices.iter().enumerate() {
            let d = (*v - centroid).dot(normal);
            if d.abs() > GEOM_EPS_M {
                return Err(Error::InvalidArgument(format!(
                    "facet vertex {i} lies {d:.3e} m off the facet plane"
                )));
            }
        }
        for i in 0..4 {
            let e0 = vertices[(i + 1) % 4] - vertices[i];
            let e1 = vertices[(i + 2) % 4] - vertices[(i + 1) % 4];
            if e0.cross(e1).dot(normal) <= 0.0 {
                return Err(Error::InvalidArgument(
                    "facet vertices must be in cyclic order around a convex quad".to_string(),
                ));
            }
        }
        Ok(Facet { vertices, normal })
    }

    pub fn vertices(&self) -> &[Point3; 4] {
        &self.vertices
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    fn signed_distance(&self, p: Point3) -> f64 {
        (p - self.vertices[0]).dot(self.normal)
    }

    /// Mirror image of a point across the facet plane.
    pub fn mirror(&self, p: Point3) -> Point3 {
        p - self.normal * (2.0 * self.signed_distance(p))
    }

    fn in_triangle(&self, p: Point3, a: Point3, b: Point3, c: Point3) -> bool {
        for (u, v) in [(a, b), (b, c), (c, a)] {
            let edge = v - u;
            // edge function: negative by more than eps * |edge| means outside
            if edge.cross(p - u).dot(self.normal) < -GEOM_EPS_M * edge.norm() {
                return false;
            }
        }
        true
    }

    fn contains_in_plane(&self, p: Point3) -> bool {
        let [a, b, c, d] = self.vertices;
        self.in_triangle(p, a, b, c) || self.in_triangle(p, a, c, d)
    }

    /// Intersection of the open segment (a, b) with the facet: returns the
    /// parameter and point if the segment crosses the facet strictly between
    /// its endpoints (1e-6 m end margins).
    pub fn intersect_segment(&self, a: Point3, b: Point3) -> Option<(f64, Point3)> {
        let dir = b - a;
        let len = dir.norm();
        if len < GEOM_EPS_M {
            return None;
        }
        let denom = dir.dot(self.normal);
        if denom.abs() < 1e-12 * len {
            return None; // parallel to the plane
        }
        let t = (self.vertices[0] - a).dot(self.normal) / denom;
        let margin = GEOM_EPS_M / len;
        if t <= margin || t >= 1.0 - margin {
            return None;
        }
        let p = a + dir * t;
        if self.contains_in_plane(p) {
            Some((t, p))
        } else {
            None
        }
    }
}

/// An immutable facet scene.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Scene {
    pub facets: Vec<Facet>,
}

impl Scene {
    pub fn new(facets: Vec<Facet>) -> Scene {
        Scene { facets }
    }

    /// Parse scene text: one facet per line as 12 whitespace-separated
    /// numbers (four x y z vertices); `#` starts a comment.
    pub fn parse(text: &str) -> Result<Scene> {
        let mut facets = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums: std::result::Result<Vec<f64>, _> =
                line.split_whitespace().map(str::parse).collect();
            let nums = nums.map_err(|e| Error::Parse {
                path: "<scene>".into(),
                line: lineno + 1,
                column: 1,
                message: format!("bad number: {e}"),
            })?;
            if nums.len() != 12 {
                return Err(Error::Parse {
                    path: "<scene>".into(),
                    line: lineno + 1,
                    column: 1,
                    message: format!("expected 12 numbers per facet line, got {}", nums.len()),
                });
            }
            let v = |i: usize| Point3::new(nums[3 * i], nums[3 * i + 1], nums[3 * i + 2]);
            facets.push(Facet::new([v(0), v(1), v(2), v(3)]).map_err(|e| Error::Parse {
                path: "<scene>".into(),
                line: lineno + 1,
                column: 1,
                message: e.to_string(),
            })?);
        }
        Ok(Scene { facets })
    }

    /// Scene text for `parse` (one facet per line).
    pub fn to_text(&self) -> String {
        let mut s = String::from("# facets: x0 y0 z0 x1 y1 z1 x2 y2 z2 x3 y3 z3\n");
        for f in &self.facets {
            let mut parts = Vec::with_capacity(12);
            for v in f.vertices {
                parts.push(format!("{} {} {}", v.x, v.y, v.z));
            }
            s.push_str(&parts.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Scene> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Scene::parse(&text).map_err(|e| match e {
            Error::Parse { line, column, message, .. } => Error::Parse {
                path: path.to_path_buf(),
                line,
                column,
                message,
            },
            other => other,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Is the open segment (a, b) blocked by any facet?
    pub fn occluded(&self, a: Point3, b: Point3) -> bool {
        self.facets.iter().any(|f| f.intersect_segment(a, b).is_some())
    }
}

/// One specular propagation path from TX to RX.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RayPath {
    /// Reflection points in propagation order (empty for LOS).
    pub reflection_points: Vec<Point3>,
    pub total_length_m: f64,
    /// Departure pointing angle at the TX.
    pub aod_az_deg: f64,
    pub aod_el_deg: f64,
    /// Arrival pointing angle at the RX (direction the RX antenna points to
    /// receive this path).
    pub aoa_az_deg: f64,
    pub aoa_el_deg: f64,
    /// Absolute propagation delay, total_length_m / c.
    pub delay_ns: f64,
    /// Reflection count.
    pub order: usize,
}

fn make_path(tx: Point3, rx: Point3, reflection_points: Vec<Point3>) -> RayPath {
    let mut length = 0.0;
    let mut prev = tx;
    for &p in &reflection_points {
        length += prev.distance(p);
        prev = p;
    }
    length += prev.distance(rx);
    let first_target = reflection_points.first().copied().unwrap_or(rx);
    let last_source = reflection_points.last().copied().unwrap_or(tx);
    let (aod_az, aod_el) = direction_angles_deg((first_target - tx).normalized());
    let (aoa_az, aoa_el) = direction_angles_deg((last_source - rx).normalized());
    RayPath {
        order: reflection_points.len(),
        reflection_points,
        total_length_m: length,
        aod_az_deg: aod_az,
        aod_el_deg: aod_el,
        aoa_az_deg: aoa_az,
        aoa_el_deg: aoa_el,
        delay_ns: path_delay_ns(length),
    }
}

/// Enumerate LOS and specular reflection paths up to `max_order <= 2`.
///
/// The LOS path is included iff the TX-RX segment intersects no facet.
/// Reflected paths come from the image method: the TX is mirrored across
/// each facet sequence, reflection points are the plane intersections of the
/// image chain, and a candidate survives only if every reflection point lies
/// inside its facet and no leg is occluded. An empty result is legal (a
/// ray-traced outage). Paths are sorted by length.
pub fn trace_paths(
    scene: &Scene,
    tx: Point3,
    rx: Point3,
    max_order: usize,
) -> Result<Vec<RayPath>> {
    if max_order > 2 {
        return Err(Error::InvalidArgument(format!(
            "max_order is capped at 2, got {max_order}"
        )));
    }
    if !tx.is_finite() || !rx.is_finite() || tx.distance(rx) < GEOM_EPS_M {
        return Err(Error::InvalidArgument(
            "tx and rx must be distinct finite points".to_string(),
        ));
    }
    let mut paths = Vec::new();
    if !scene.occluded(tx, rx) {
        paths.push(make_path(tx, rx, vec![]));
    }
    if max_order >= 1 {
        for f in &scene.facets {
            if f.signed_distance(tx).abs() < GEOM_EPS_M {
                continue; // TX on the facet plane cannot reflect off it
            }
            let img = f.mirror(tx);
            if let Some((_, p)) = f.intersect_segment(img, rx) {
                if !scene.occluded(tx, p) && !scene.occluded(p, rx) {
                    paths.push(make_path(tx, rx, vec![p]));
                }
            }
        }
    }
    if max_order >= 2 {
        for (i, fi) in scene.facets.iter().enumerate() {
            if fi.signed_distance(tx).abs() < GEOM_EPS_M {
                continue;
            }
            let img1 = fi.mirror(tx);
            for (j, fj) in scene.facets.iter().enumerate() {
                if i == j || fj.signed_distance(img1).abs() < GEOM_EPS_M {
                    continue;
                }
                let img2 = fj.mirror(img1);
                let Some((_, p2)) = fj.intersect_segment(img2, rx) else {
                    continue;
                };
                let Some((_, p1)) = fi.intersect_segment(img1, p2) else {
                    continue;
                };
                if !scene.occluded(tx, p1)
                    && !scene.occluded(p1, p2)
                    && !scene.occluded(p2, rx)
                {
                    paths.push(make_path(tx, rx, vec![p1, p2]));
                }
            }
        }
    }
    paths.sort_by(|a, b| {
        a.total_length_m
            .partial_cmp(&b.total_length_m)
            .unwrap()
            .then(a.order.cmp(&b.order))
            .then(a.aoa_az_deg.partial_cmp(&b.aoa_az_deg).unwrap())
            .then(a.aoa_el_deg.partial_cmp(&b.aoa_el_deg).unwrap())
    });
    Ok(paths)
}

/// A predicted angle of arrival with its absolute delay.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PredictedAoa {
    pub aoa_az_deg: f64,
    pub aoa_el_deg: f64,
    pub delay_ns: f64,
    pub length_m: f64,
    pub order: usize,
}

/// Rank paths by predicted strength and return up to `limit` arrival angles
/// with their absolute delays.
///
/// Strength is 1/length^2 with a flat 10 dB penalty per reflection — only
/// the ranking matters downstream (amplitudes always come from measured
/// PDPs, never from the tracer).
pub fn predict_strongest_aoas(paths: &[RayPath], limit: usize) -> Vec<PredictedAoa> {
    let strength_db =
        |p: &RayPath| -20.0 * p.total_length_m.log10() - 10.0 * p.order as f64;
    let mut ranked: Vec<&RayPath> = paths.iter().collect();
    ranked.sort_by(|a, b| {
        strength_db(b)
            .partial_cmp(&strength_db(a))
            .unwrap()
            .then(a.total_length_m.partial_cmp(&b.total_length_m).unwrap())
            .then(a.order.cmp(&b.order))
            .then(a.aoa_az_deg.partial_cmp(&b.aoa_az_deg).unwrap())
            .then(a.aoa_el_deg.partial_cmp(&b.aoa_el_deg).unwrap())
    });
    ranked
        .into_iter()
        .take(limit)
        .map(|p| PredictedAoa {
            aoa_az_deg: p.aoa_az_deg,
            aoa_el_deg: p.aoa_el_deg,
            delay_ns: p.delay_ns,
            length_m: p.total_length_m,
            order: p.order,
        })
        .collect()
}

/// Largest law-of-reflection residual over a path's reflection points,
/// radians: the angle between the actual outgoing leg and the specular
/// reflection of the incoming leg.
pub fn reflection_residual_rad(scene: &Scene, tx: Point3, rx: Point3, path: &RayPath) -> f64 {
    let mut worst: f64 = 0.0;
    let mut prev = tx;
    for (i, &p) in path.reflection_points.iter().enumerate() {
        let next = path
            .reflection_points
            .get(i + 1)
            .copied()
            .unwrap_or(rx);
        // find the facet this point lies on
        let facet = scene
            .facets
            .iter()
            .filter(|f| f.signed_distance(p).abs() < 10.0 * GEOM_EPS_M && f.contains_in_plane(p))
            .min_by(|a, b| {
                a.signed_distance(p)
                    .abs()
                    .partial_cmp(&b.signed_distance(p).abs())
                    .unwrap()
            });
        let Some(facet) = facet else {
            return f64::INFINITY;
        };
        let d_in = (p - prev).normalized();
        let n = facet.normal();
        let reflected = d_in - n * (2.0 * d_in.dot(n));
        let d_out = (next - p).normalized();
        // atan2 of (cross, dot) stays accurate for tiny angles where acos
        // of the dot product bottoms out near 1e-8
        let angle = reflected.cross(d_out).norm().atan2(reflected.dot(d_out));
        worst = worst.max(angle.abs());
        prev = p;
    }
    worst
}
