//! Exact 2D primitives and collision predicates for disc robots moving among
//! polygonal obstacles.
//!
//! Every predicate here treats contact as collision: a disc whose distance to
//! an obstacle equals its radius is *not* free. Swept motions are checked in
//! closed form (segment distances and the minimum of a quadratic), never by
//! stepping along the motion.

use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used only to detect degenerate (zero-length) rays.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn scale(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn dist2(self, o: Point2) -> f64 {
        (self - o).norm2()
    }

    pub fn dist(self, o: Point2) -> f64 {
        self.dist2(o).sqrt()
    }

    /// Point at parameter `t` on the segment from `self` to `o`.
    pub fn lerp(self, o: Point2, t: f64) -> Point2 {
        Point2::new(self.x + t * (o.x - self.x), self.y + t * (o.y - self.y))
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(a: [f64; 2]) -> Self {
        Point2::new(a[0], a[1])
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

/// Closed segment; `a == b` is allowed and behaves as a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment2 {
    pub a: Point2,
    pub b: Point2,
}

impl Segment2 {
    pub const fn new(a: Point2, b: Point2) -> Self {
        Segment2 { a, b }
    }

    /// Squared distance from `p` to the closest point of the segment.
    pub fn dist2_to_point(&self, p: Point2) -> f64 {
        let d = self.b - self.a;
        let len2 = d.norm2();
        if len2 == 0.0 {
            return p.dist2(self.a);
        }
        let t = ((p - self.a).dot(d) / len2).clamp(0.0, 1.0);
        p.dist2(self.a.lerp(self.b, t))
    }

    /// Squared distance between two closed segments (zero when they touch).
    pub fn dist2_to_segment(&self, other: &Segment2) -> f64 {
        if self.intersects(other) {
            return 0.0;
        }
        self.dist2_to_point(other.a)
            .min(self.dist2_to_point(other.b))
            .min(other.dist2_to_point(self.a))
            .min(other.dist2_to_point(self.b))
    }

    /// Proper or improper intersection test.
    pub fn intersects(&self, other: &Segment2) -> bool {
        let d1 = orient(other.a, other.b, self.a);
        let d2 = orient(other.a, other.b, self.b);
        let d3 = orient(self.a, self.b, other.a);
        let d4 = orient(self.a, self.b, other.b);
        if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
            && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
        {
            return true;
        }
        (d1 == 0.0 && on_segment(other.a, other.b, self.a))
            || (d2 == 0.0 && on_segment(other.a, other.b, self.b))
            || (d3 == 0.0 && on_segment(self.a, self.b, other.a))
            || (d4 == 0.0 && on_segment(self.a, self.b, other.b))
    }
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

// Assumes c is collinear with a-b.
fn on_segment(a: Point2, b: Point2, c: Point2) -> bool {
    c.x >= a.x.min(b.x) && c.x <= a.x.max(b.x) && c.y >= a.y.min(b.y) && c.y <= a.y.max(b.y)
}

/// Simple counter-clockwise polygon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point2>", into = "Vec<Point2>")]
pub struct Polygon2 {
    vertices: Vec<Point2>,
}

impl Polygon2 {
    /// Checks vertex count, finiteness, simplicity and counter-clockwise
    /// orientation.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidPolygon("non-finite coordinate".into()));
        }
        let poly = Polygon2 { vertices };
        if poly.signed_area() <= 0.0 {
            return Err(Error::InvalidPolygon(
                "vertices must be in counter-clockwise order".into(),
            ));
        }
        if !poly.is_simple() {
            return Err(Error::InvalidPolygon("polygon is self-intersecting".into()));
        }
        Ok(poly)
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Polygon2::new(vec![
            Point2::new(x0, y0),
            Point2::new(x1, y0),
            Point2::new(x1, y1),
            Point2::new(x0, y1),
        ])
        .expect("rectangle with positive extent")
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment2> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| Segment2::new(self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        let twice: f64 = (0..n)
            .map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n]))
            .sum();
        twice / 2.0
    }

    fn is_simple(&self) -> bool {
        let edges: Vec<Segment2> = self.edges().collect();
        let n = edges.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // Neighbouring edges share a vertex; they may only overlap
                    // if they fold back onto each other.
                    let (e, f) = if j == i + 1 { (edges[i], edges[j]) } else { (edges[j], edges[i]) };
                    let u = e.a - e.b;
                    let v = f.b - f.a;
                    if u.cross(v) == 0.0 && u.dot(v) > 0.0 {
                        return false;
                    }
                } else if edges[i].intersects(&edges[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// Even-odd containment test. Points on the boundary may go either way;
    /// callers combine this with an edge distance check.
    pub fn contains(&self, p: Point2) -> bool {
        let mut inside = false;
        let n = self.vertices.len();
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (self.vertices[i], self.vertices[j]);
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    /// Bounding box as `(min, max)`.
    pub fn bounding_box(&self) -> (Point2, Point2) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for p in &self.vertices[1..] {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    fn min_dist2_to_boundary(&self, seg: &Segment2) -> f64 {
        self.edges()
            .map(|e| e.dist2_to_segment(seg))
            .fold(f64::INFINITY, f64::min)
    }
}

impl TryFrom<Vec<Point2>> for Polygon2 {
    type Error = Error;

    fn try_from(v: Vec<Point2>) -> Result<Self> {
        Polygon2::new(v)
    }
}

impl From<Polygon2> for Vec<Point2> {
    fn from(p: Polygon2) -> Self {
        p.vertices
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc {
    radius: f64,
}

impl Disc {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidRadius(radius));
        }
        Ok(Disc { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// True iff a disc of radius `r` centred at `center` lies strictly inside
/// `workspace` and touches no obstacle.
pub fn disc_free_at(center: Point2, r: Disc, workspace: &Polygon2, obstacles: &[Polygon2]) -> bool {
    swept_disc_free(center, center, r, workspace, obstacles)
}

/// True iff the disc swept along the segment `a → b` stays strictly inside
/// `workspace` and strictly clear of all obstacles.
pub fn swept_disc_free(
    a: Point2,
    b: Point2,
    r: Disc,
    workspace: &Polygon2,
    obstacles: &[Polygon2],
) -> bool {
    let seg = Segment2::new(a, b);
    let r2 = r.radius * r.radius;
    // If the segment never comes within r of the boundary, it lies entirely on
    // one side, so containment of `a` decides the rest.
    if !workspace.contains(a) || workspace.min_dist2_to_boundary(&seg) <= r2 {
        return false;
    }
    obstacles
        .iter()
        .all(|obs| !obs.contains(a) && obs.min_dist2_to_boundary(&seg) > r2)
}

/// Minimum over `t ∈ [0, 1]` of the squared distance between two points
/// moving linearly and simultaneously, `a1 → b1` and `a2 → b2`.
pub fn min_separation2(a1: Point2, b1: Point2, a2: Point2, b2: Point2) -> f64 {
    let r0 = a1 - a2;
    let dr = (b1 - a1) - (b2 - a2);
    let dd = dr.norm2();
    let t = if dd > 0.0 { (-r0.dot(dr) / dd).clamp(0.0, 1.0) } else { 0.0 };
    let at_t = (r0 + dr.scale(t)).norm2();
    // Endpoints guard against rounding in the interior minimiser.
    at_t.min(r0.norm2()).min((b1 - b2).norm2())
}

/// True iff two discs moving simultaneously along `a1 → b1` and `a2 → b2`
/// keep a separation strictly greater than `r1 + r2` for all `t ∈ [0, 1]`.
pub fn moving_discs_clear(a1: Point2, b1: Point2, r1: Disc, a2: Point2, b2: Point2, r2: Disc) -> bool {
    let reach = r1.radius + r2.radius;
    min_separation2(a1, b1, a2, b2) > reach * reach
}

/// The smaller angle, in `[0, π]`, between the rays `origin → u` and
/// `origin → v`.
pub fn angle_between(origin: Point2, u: Point2, v: Point2) -> Result<f64> {
    let du = u - origin;
    let dv = v - origin;
    if du.norm2().sqrt() < EPS || dv.norm2().sqrt() < EPS {
        return Err(Error::DegenerateRay);
    }
    Ok(du.cross(dv).abs().atan2(du.dot(dv)))
}

/// [`angle_between`] for rays in ℝ^d given as direction vectors.
pub fn angle_between_dirs(du: &[f64], dv: &[f64]) -> Result<f64> {
    debug_assert_eq!(du.len(), dv.len());
    let uu: f64 = du.iter().map(|x| x * x).sum();
    let vv: f64 = dv.iter().map(|x| x * x).sum();
    if uu.sqrt() < EPS || vv.sqrt() < EPS {
        return Err(Error::DegenerateRay);
    }
    let uv: f64 = du.iter().zip(dv).map(|(a, b)| a * b).sum();
    // |u × v| via Lagrange's identity, so the result matches the 2D routine.
    let cross = (uu * vv - uv * uv).max(0.0).sqrt();
    Ok(cross.atan2(uv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unit() -> Disc {
        Disc::new(1.0).unwrap()
    }

    fn room() -> Polygon2 {
        Polygon2::rect(0.0, 0.0, 10.0, 10.0)
    }

    #[test]
    fn free_in_empty_room() {
        assert!(disc_free_at(Point2::new(5.0, 5.0), unit(), &room(), &[]));
    }

    #[test]
    fn penetrating_obstacle_edge() {
        let obs = Polygon2::rect(6.0, 0.0, 8.0, 10.0);
        assert!(!disc_free_at(Point2::new(5.5, 5.0), unit(), &room(), &[obs]));
    }

    #[test]
    fn touching_counts_as_collision() {
        let obs = Polygon2::rect(6.0, 2.0, 8.0, 8.0);
        let c = Point2::new(5.0, 5.0);
        // independent distance: horizontal gap to x = 6
        let d = 6.0 - c.x;
        assert_eq!(d, 1.0);
        assert!(!disc_free_at(c, unit(), &room(), std::slice::from_ref(&obs)));
        assert!(disc_free_at(Point2::new(4.999, 5.0), unit(), &room(), &[obs]));
    }

    #[test]
    fn wall_contact_is_collision() {
        assert!(!disc_free_at(Point2::new(1.0, 5.0), unit(), &room(), &[]));
        assert!(!disc_free_at(Point2::new(11.0, 5.0), unit(), &room(), &[]));
    }

    #[test]
    fn disc_inside_obstacle_is_not_free() {
        let obs = Polygon2::rect(2.0, 2.0, 8.0, 8.0);
        assert!(!disc_free_at(Point2::new(5.0, 5.0), unit(), &room(), &[obs]));
    }

    #[test]
    fn degenerate_sweep_is_point_check() {
        let p = Point2::new(3.0, 3.0);
        assert!(swept_disc_free(p, p, unit(), &room(), &[]));
    }

    #[test]
    fn sweep_grazing_obstacle_within_radius() {
        // obstacle edge at y = 5.9; path along y = 5 => distance 0.9
        let obs = Polygon2::rect(4.0, 5.9, 6.0, 7.0);
        let seg = Segment2::new(Point2::new(2.0, 5.0), Point2::new(8.0, 5.0));
        let d = seg.dist2_to_segment(&Segment2::new(Point2::new(4.0, 5.9), Point2::new(6.0, 5.9)));
        assert!((d.sqrt() - 0.9).abs() < 1e-12);
        assert!(!swept_disc_free(seg.a, seg.b, unit(), &room(), &[obs]));
    }

    #[test]
    fn corridor_clearance() {
        // corridor of width 2.5 between two slabs; traverse along the centre line
        let low = Polygon2::rect(0.0, 0.0, 10.0, 3.75);
        let high = Polygon2::rect(0.0, 6.25, 10.0, 10.0);
        let ws = Polygon2::rect(-2.0, -1.0, 12.0, 11.0);
        assert!(swept_disc_free(
            Point2::new(-0.5, 5.0),
            Point2::new(10.5, 5.0),
            unit(),
            &ws,
            &[low, high]
        ));
    }

    #[test]
    fn sweep_through_thin_wall_fails() {
        let wall = Polygon2::rect(4.9, 0.0, 5.1, 10.0);
        assert!(!swept_disc_free(
            Point2::new(2.0, 5.0),
            Point2::new(8.0, 5.0),
            Disc::new(0.1).unwrap(),
            &room(),
            &[wall]
        ));
    }

    #[test]
    fn stationary_discs_far_apart() {
        let a = Point2::new(0.0, 0.0);
        let b = Point2::new(5.0, 0.0);
        assert!(moving_discs_clear(a, a, unit(), b, b, unit()));
    }

    #[test]
    fn head_on_exchange_collides() {
        let a = Point2::new(0.0, 0.0);
        let b = Point2::new(5.0, 0.0);
        assert!(!moving_discs_clear(a, b, unit(), b, a, unit()));
    }

    #[test]
    fn parallel_motion_keeps_gap() {
        let d = Point2::new(3.0, 1.0);
        let a1 = Point2::new(0.0, 0.0);
        let a2 = Point2::new(0.0, 2.1);
        assert!(moving_discs_clear(a1, a1 + d, unit(), a2, a2 + d, unit()));
        let tight = Point2::new(0.0, 2.0);
        assert!(!moving_discs_clear(a1, a1 + d, unit(), tight, tight + d, unit()));
    }

    #[test]
    fn angles() {
        let o = Point2::new(0.0, 0.0);
        let a = angle_between(o, Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)).unwrap();
        assert!((a - PI / 2.0).abs() < 1e-12);
        let same = angle_between(o, Point2::new(2.0, 3.0), Point2::new(2.0, 3.0)).unwrap();
        assert_eq!(same, 0.0);
        let obtuse = angle_between(o, Point2::new(1.0, 0.0), Point2::new(-1.0, 1.0)).unwrap();
        // arccos of the normalised dot product, computed independently
        let expected = (-1.0f64 / 2.0f64.sqrt()).acos();
        assert!((obtuse - expected).abs() < 1e-12);
        assert!((obtuse - 3.0 * PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_ray_is_error() {
        let o = Point2::new(1.0, 1.0);
        assert!(matches!(angle_between(o, o, Point2::new(2.0, 1.0)), Err(Error::DegenerateRay)));
        assert!(matches!(angle_between(o, Point2::new(2.0, 1.0), o), Err(Error::DegenerateRay)));
    }

    #[test]
    fn nd_angle_matches_2d() {
        let a = angle_between_dirs(&[1.0, 0.0], &[-1.0, 1.0]).unwrap();
        assert!((a - 3.0 * PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn polygon_validation() {
        assert!(Polygon2::new(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]).is_err());
        // clockwise
        assert!(Polygon2::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0)
        ])
        .is_err());
        // bow tie
        assert!(Polygon2::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 2.0),
            Point2::new(2.0, 0.0),
            Point2::new(0.0, 2.0)
        ])
        .is_err());
        assert!(Polygon2::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(1.0, 1.0)
        ])
        .is_ok());
    }

    #[test]
    fn radius_validation() {
        assert!(Disc::new(0.0).is_err());
        assert!(Disc::new(-1.0).is_err());
        assert!(Disc::new(f64::NAN).is_err());
        assert!(Disc::new(f64::INFINITY).is_err());
    }

    fn pt() -> impl Strategy<Value = Point2> {
        (-10.0f64..10.0, -10.0f64..10.0).prop_map(|(x, y)| Point2::new(x, y))
    }

    proptest! {
        #[test]
        fn moving_clear_symmetric(a1 in pt(), b1 in pt(), a2 in pt(), b2 in pt(),
                                  r1 in 0.1f64..3.0, r2 in 0.1f64..3.0) {
            let (d1, d2) = (Disc::new(r1).unwrap(), Disc::new(r2).unwrap());
            let fwd = moving_discs_clear(a1, b1, d1, a2, b2, d2);
            prop_assert_eq!(fwd, moving_discs_clear(a2, b2, d2, a1, b1, d1));
            prop_assert_eq!(fwd, moving_discs_clear(b1, a1, d1, b2, a2, d2));
        }

        #[test]
        fn moving_clear_is_conservative(a1 in pt(), b1 in pt(), a2 in pt(), b2 in pt(),
                                        r in 0.1f64..3.0) {
            let d = Disc::new(r).unwrap();
            if moving_discs_clear(a1, b1, d, a2, b2, d) {
                for k in 0..1000 {
                    let t = k as f64 / 999.0;
                    let p1 = a1.lerp(b1, t);
                    let p2 = a2.lerp(b2, t);
                    prop_assert!(p1.dist(p2) > 2.0 * r);
                }
            }
        }

        #[test]
        fn swept_free_reversible(a in pt(), b in pt(), r in 0.1f64..2.0) {
            let ws = Polygon2::rect(-10.0, -10.0, 10.0, 10.0);
            let obs = vec![Polygon2::rect(-2.0, -2.0, 2.0, 1.0), Polygon2::rect(4.0, 4.0, 6.0, 9.0)];
            let d = Disc::new(r).unwrap();
            prop_assert_eq!(swept_disc_free(a, b, d, &ws, &obs), swept_disc_free(b, a, d, &ws, &obs));
        }

        #[test]
        fn segment_distance_matches_dense_sampling(a in pt(), b in pt(), c in pt(), d in pt()) {
            let s = Segment2::new(a, b);
            let t = Segment2::new(c, d);
            let exact = s.dist2_to_segment(&t).sqrt();
            let mut sampled = f64::INFINITY;
            for k in 0..=200 {
                let p = a.lerp(b, k as f64 / 200.0);
                sampled = sampled.min(t.dist2_to_point(p).sqrt());
            }
            prop_assert!(exact <= sampled + 1e-9);
        }
    }
}
