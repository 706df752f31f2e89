//! Planar geometry in a local metric frame.
//!
//! All algorithms work in meters (x east, y north) relative to a [`Frame`]
//! origin. The projection is a local equirectangular one, which is accurate
//! to well under 0.1% over the tens of kilometers a single editing region
//! covers.

use std::f64::consts::TAU;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

/// Meters per degree of longitude at the equator.
pub const METERS_PER_DEG_LON: f64 = 111_320.0;
/// Meters per degree of latitude.
pub const METERS_PER_DEG_LAT: f64 = 110_574.0;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GeoError {
    #[error("latitude {0} out of range [-90, 90]")]
    Latitude(f64),
    #[error("longitude {0} out of range [-180, 180]")]
    Longitude(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn dist2(self, other: Point) -> f64 {
        let d = self - other;
        d.x * d.x + d.y * d.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }

    /// Unit vector at `angle` radians counter-clockwise from +x.
    pub fn unit(angle: f64) -> Point {
        Point::new(angle.cos(), angle.sin())
    }

    /// Angle of this vector counter-clockwise from +x, in `[0, 2π)`.
    pub fn angle(self) -> f64 {
        normalize_angle(self.y.atan2(self.x))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Origin of the local projection.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Frame {
    pub lat0: f64,
    pub lon0: f64,
}

fn check_latlon(lat: f64, lon: f64) -> Result<(), GeoError> {
    if !(-90.0..=90.0).contains(&lat) {
        return Err(GeoError::Latitude(lat));
    }
    if !(-180.0..=180.0).contains(&lon) {
        return Err(GeoError::Longitude(lon));
    }
    Ok(())
}

impl Frame {
    pub fn new(lat0: f64, lon0: f64) -> Result<Self, GeoError> {
        check_latlon(lat0, lon0)?;
        Ok(Frame { lat0, lon0 })
    }

    pub fn latlon_to_local(&self, lat: f64, lon: f64) -> Result<Point, GeoError> {
        check_latlon(lat, lon)?;
        let x = (lon - self.lon0) * self.lat0.to_radians().cos() * METERS_PER_DEG_LON;
        let y = (lat - self.lat0) * METERS_PER_DEG_LAT;
        Ok(Point::new(x, y))
    }

    /// Inverse of [`Frame::latlon_to_local`]; returns `(lat, lon)`.
    pub fn local_to_latlon(&self, p: Point) -> Result<(f64, f64), GeoError> {
        let lat = self.lat0 + p.y / METERS_PER_DEG_LAT;
        let lon = self.lon0 + p.x / (self.lat0.to_radians().cos() * METERS_PER_DEG_LON);
        check_latlon(lat, lon)?;
        Ok((lat, lon))
    }
}

/// Closest point on segment `a`–`b` to `p`. Returns the fraction `t` along
/// the segment and the distance.
pub fn project_to_segment(p: Point, a: Point, b: Point) -> (f64, f64) {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let t = if len2 == 0.0 {
        0.0
    } else {
        ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
    };
    (t, p.dist(a.lerp(b, t)))
}

pub fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    project_to_segment(p, a, b).1
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn from_points<I: IntoIterator<Item = Point>>(points: I) -> Option<BBox> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut bb = BBox {
            min: first,
            max: first,
        };
        for p in it {
            bb.min.x = bb.min.x.min(p.x);
            bb.min.y = bb.min.y.min(p.y);
            bb.max.x = bb.max.x.max(p.x);
            bb.max.y = bb.max.y.max(p.y);
        }
        Some(bb)
    }

    pub fn padded(self, pad: f64) -> BBox {
        BBox {
            min: Point::new(self.min.x - pad, self.min.y - pad),
            max: Point::new(self.max.x + pad, self.max.y + pad),
        }
    }

    pub fn intersects(&self, other: &BBox) -> bool {
        self.min.x <= other.max.x
            && other.min.x <= self.max.x
            && self.min.y <= other.max.y
            && other.min.y <= self.max.y
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }
}

/// Convex hull by monotone chain, counter-clockwise, without collinear
/// boundary points.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: Point, a: Point, b: Point| (a - o).cross(b - o);
    let mut lower: Vec<Point> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Shoelace area of a simple polygon (absolute value).
pub fn polygon_area(ring: &[Point]) -> f64 {
    if ring.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for i in 0..ring.len() {
        let a = ring[i];
        let b = ring[(i + 1) % ring.len()];
        twice += a.cross(b);
    }
    (twice / 2.0).abs()
}

pub fn convex_hull_area_of(points: &[Point]) -> f64 {
    polygon_area(&convex_hull(points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn origin_maps_to_origin() {
        let f = Frame::new(0.0, 0.0).unwrap();
        assert_eq!(f.latlon_to_local(0.0, 0.0).unwrap(), Point::new(0.0, 0.0));
    }

    #[test]
    fn one_millidegree_north() {
        let f = Frame::new(0.0, 0.0).unwrap();
        let p = f.latlon_to_local(0.001, 0.0).unwrap();
        assert!(p.x.abs() < 1e-12);
        assert!((p.y - 110.574).abs() < 1e-9);
    }

    #[test]
    fn rejects_out_of_range() {
        let f = Frame::new(10.0, 20.0).unwrap();
        assert_eq!(f.latlon_to_local(91.0, 0.0), Err(GeoError::Latitude(91.0)));
        assert_eq!(
            f.latlon_to_local(0.0, -180.5),
            Err(GeoError::Longitude(-180.5))
        );
        assert!(Frame::new(0.0, 200.0).is_err());
    }

    #[test]
    fn round_trip_latlon() {
        let f = Frame::new(47.6, -122.3).unwrap();
        for &(lat, lon) in &[(47.61, -122.33), (47.5, -122.0), (47.6, -122.3)] {
            let p = f.latlon_to_local(lat, lon).unwrap();
            let (lat2, lon2) = f.local_to_latlon(p).unwrap();
            assert!((lat - lat2).abs() < 1e-9 && (lon - lon2).abs() < 1e-9);
        }
    }

    #[test]
    fn angle_range() {
        assert_eq!(Point::new(1.0, 0.0).angle(), 0.0);
        assert!((Point::new(-1.0, 0.0).angle() - PI).abs() < 1e-12);
        assert!((Point::new(0.0, -1.0).angle() - 1.5 * PI).abs() < 1e-12);
        assert_eq!(normalize_angle(-1e-20), 0.0);
    }

    #[test]
    fn hull_of_square_with_interior_points() {
        let pts = [
            Point::new(0.0, 0.0),
            Point::new(100.0, 0.0),
            Point::new(100.0, 100.0),
            Point::new(0.0, 100.0),
            Point::new(50.0, 50.0),
            Point::new(50.0, 0.0),
        ];
        assert_eq!(convex_hull(&pts).len(), 4);
        assert!((convex_hull_area_of(&pts) - 10_000.0).abs() < 1e-9);
    }

    #[test]
    fn collinear_hull_has_zero_area() {
        let pts: Vec<Point> = (0..10).map(|i| Point::new(i as f64, 2.0 * i as f64)).collect();
        assert_eq!(convex_hull_area_of(&pts), 0.0);
    }

    #[test]
    fn segment_projection_clamps() {
        let (t, d) = project_to_segment(
            Point::new(-3.0, 4.0),
            Point::new(0.0, 0.0),
            Point::new(10.0, 0.0),
        );
        assert_eq!(t, 0.0);
        assert!((d - 5.0).abs() < 1e-12);
    }
}
