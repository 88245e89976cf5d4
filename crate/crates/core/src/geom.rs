//! Small planar kernel: vectors, circle/segment intersection primitives and
//! the smallest enclosing circle. Everything downstream (arc chains, spindle
//! hulls, probe containment) is built on these few functions.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector at angle `theta` (radians, counterclockwise from +x).
    pub fn from_angle(theta: f64) -> Self {
        Vec2::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// Scalar cross product `self.x * o.y - self.y * o.x`.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        self / n
    }

    /// Rotation by +90 degrees (counterclockwise).
    pub fn rot90(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    /// Rotation by -90 degrees (clockwise).
    pub fn rot270(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Normalize an angle into `[0, 2*pi)`.
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut r = a % two_pi;
    if r < 0.0 {
        r += two_pi;
    }
    // `-1e-300 % tau` can round to tau itself.
    if r >= two_pi {
        r -= two_pi;
    }
    r
}

/// Signed angle from direction `a` to direction `b`, in `(-pi, pi]`.
pub fn turn_angle(a: Vec2, b: Vec2) -> f64 {
    a.cross(b).atan2(a.dot(b))
}

/// Intersection points of two circles. Returns 0, 1 or 2 points.
/// Coincident circles (same center and radius within `tol`) yield no points;
/// overlap handling is the caller's concern.
pub fn circle_circle(c1: Vec2, r1: f64, c2: Vec2, r2: f64, tol: f64) -> Vec<Vec2> {
    let d = c2 - c1;
    let dist = d.norm();
    if dist <= tol && (r1 - r2).abs() <= tol {
        return Vec::new(); // coincident
    }
    if dist > r1 + r2 || dist < (r1 - r2).abs() {
        // Allow grazing contact within tol.
        if dist > r1 + r2 + tol || dist + tol < (r1 - r2).abs() {
            return Vec::new();
        }
    }
    if dist == 0.0 {
        return Vec::new(); // concentric, distinct radii
    }
    // Distance from c1 to the radical line along d.
    let a = (dist * dist + r1 * r1 - r2 * r2) / (2.0 * dist);
    let h_sq = r1 * r1 - a * a;
    let u = d / dist;
    let mid = c1 + u * a;
    if h_sq <= tol * tol {
        return vec![mid]; // tangency
    }
    let h = h_sq.sqrt();
    let n = u.rot90() * h;
    vec![mid + n, mid - n]
}

/// Intersection of the full line through `p0`,`p1` with a circle, returned as
/// line parameters `s` (point = p0 + s*(p1-p0)). Unfiltered by segment range.
pub fn line_circle_params(p0: Vec2, p1: Vec2, center: Vec2, r: f64) -> Vec<f64> {
    let d = p1 - p0;
    let f = p0 - center;
    let a = d.norm_sq();
    if a == 0.0 {
        return Vec::new();
    }
    let b = 2.0 * f.dot(d);
    let c = f.norm_sq() - r * r;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    // Numerically stable quadratic roots.
    let q = -0.5 * (b + b.signum() * sq);
    if q == 0.0 {
        return vec![0.5 * -b / a];
    }
    let s1 = q / a;
    let s2 = c / q;
    if (s1 - s2).abs() < 1e-15 {
        vec![s1]
    } else {
        vec![s1, s2]
    }
}

/// Intersection of two segments as parameter pairs `(s, t)`, both in `[0,1]`
/// within `tol` of the parameter scale. Parallel segments yield no points.
pub fn seg_seg(a0: Vec2, a1: Vec2, b0: Vec2, b1: Vec2, tol: f64) -> Option<(f64, f64, Vec2)> {
    let da = a1 - a0;
    let db = b1 - b0;
    let denom = da.cross(db);
    if denom.abs() < 1e-14 * da.norm() * db.norm() {
        return None;
    }
    let diff = b0 - a0;
    let s = diff.cross(db) / denom;
    let t = diff.cross(da) / denom;
    let eps_a = tol / da.norm().max(1e-300);
    let eps_b = tol / db.norm().max(1e-300);
    if s < -eps_a || s > 1.0 + eps_a || t < -eps_b || t > 1.0 + eps_b {
        return None;
    }
    Some((s, t, a0 + da * s))
}

/// Smallest enclosing circle of a point set (Welzl's algorithm with move-to-
/// front heuristic, deterministic order). Returns `(center, radius)`.
pub fn smallest_enclosing_circle(points: &[Vec2]) -> (Vec2, f64) {
    assert!(!points.is_empty());
    let mut pts: Vec<Vec2> = points.to_vec();
    // Deterministic shuffle keeps the expected linear behaviour without an RNG
    // dependency here.
    let mut state = 0x9e3779b97f4a7c15u64;
    for i in (1..pts.len()).rev() {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let j = (state >> 33) as usize % (i + 1);
        pts.swap(i, j);
    }
    welzl(&mut pts)
}

fn welzl(pts: &mut [Vec2]) -> (Vec2, f64) {
    let n = pts.len();
    let mut c = (pts[0], 0.0);
    for i in 1..n {
        if !in_circle(c, pts[i]) {
            c = (pts[i], 0.0);
            for j in 0..i {
                if !in_circle(c, pts[j]) {
                    c = circle_two(pts[i], pts[j]);
                    for k in 0..j {
                        if !in_circle(c, pts[k]) {
                            c = circle_three(pts[i], pts[j], pts[k]);
                        }
                    }
                }
            }
        }
    }
    c
}

fn in_circle(c: (Vec2, f64), p: Vec2) -> bool {
    p.dist(c.0) <= c.1 * (1.0 + 1e-12) + 1e-14
}

fn circle_two(a: Vec2, b: Vec2) -> (Vec2, f64) {
    let c = (a + b) * 0.5;
    (c, a.dist(c))
}

fn circle_three(a: Vec2, b: Vec2, c: Vec2) -> (Vec2, f64) {
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if d.abs() < 1e-300 {
        // Collinear: fall back to the diameter of the farthest pair.
        let pairs = [(a, b), (a, c), (b, c)];
        let (p, q) = pairs
            .iter()
            .max_by(|u, v| u.0.dist(u.1).partial_cmp(&v.0.dist(v.1)).unwrap())
            .copied()
            .unwrap();
        return circle_two(p, q);
    }
    let asq = a.norm_sq();
    let bsq = b.norm_sq();
    let csq = c.norm_sq();
    let ux = (asq * (b.y - c.y) + bsq * (c.y - a.y) + csq * (a.y - b.y)) / d;
    let uy = (asq * (c.x - b.x) + bsq * (a.x - c.x) + csq * (b.x - a.x)) / d;
    let center = Vec2::new(ux, uy);
    (center, center.dist(a).max(center.dist(b)).max(center.dist(c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn circle_circle_symmetric_lens() {
        // Unit circles centered at (+-0.5, 0) cross at (0, +-sqrt(0.75)).
        let pts = circle_circle(Vec2::new(-0.5, 0.0), 1.0, Vec2::new(0.5, 0.0), 1.0, 1e-12);
        assert_eq!(pts.len(), 2);
        let y = 0.75f64.sqrt();
        for p in pts {
            assert_relative_eq!(p.x, 0.0, epsilon = 1e-12);
            assert_relative_eq!(p.y.abs(), y, epsilon = 1e-12);
        }
    }

    #[test]
    fn circle_circle_disjoint_and_coincident() {
        assert!(circle_circle(Vec2::ZERO, 1.0, Vec2::new(3.0, 0.0), 1.0, 1e-12).is_empty());
        assert!(circle_circle(Vec2::ZERO, 1.0, Vec2::ZERO, 1.0, 1e-12).is_empty());
    }

    #[test]
    fn line_circle_secant() {
        // Horizontal line y=0 through the unit circle: s such that x = +-1.
        let s = line_circle_params(Vec2::new(-2.0, 0.0), Vec2::new(2.0, 0.0), Vec2::ZERO, 1.0);
        assert_eq!(s.len(), 2);
        let mut xs: Vec<f64> = s.iter().map(|t| -2.0 + t * 4.0).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_relative_eq!(xs[0], -1.0, epsilon = 1e-12);
        assert_relative_eq!(xs[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn seg_seg_crossing() {
        let hit = seg_seg(
            Vec2::new(-1.0, -1.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(-1.0, 1.0),
            Vec2::new(1.0, -1.0),
            1e-12,
        )
        .unwrap();
        assert_relative_eq!(hit.2.x, 0.0, epsilon = 1e-12);
        assert_relative_eq!(hit.2.y, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn welzl_trio() {
        // Equilateral-ish triangle on the unit circle.
        let pts = vec![
            Vec2::from_angle(0.3),
            Vec2::from_angle(2.5),
            Vec2::from_angle(4.4),
        ];
        let (c, r) = smallest_enclosing_circle(&pts);
        assert!(c.norm() < 1e-9);
        assert_relative_eq!(r, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn welzl_degenerate_pairs() {
        let pts = vec![Vec2::ZERO, Vec2::new(2.0, 0.0), Vec2::new(1.0, 0.0)];
        let (c, r) = smallest_enclosing_circle(&pts);
        assert_relative_eq!(c.x, 1.0, epsilon = 1e-12);
        assert_relative_eq!(r, 1.0, epsilon = 1e-12);
    }
}
