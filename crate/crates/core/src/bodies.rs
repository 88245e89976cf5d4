//! Convex planar bodies bounded by cyclic chains of circular arcs and
//! straight segments, plus the scenario data shared by both solvers.
//!
//! Chains are stored counterclockwise, so the interior is on the left of the
//! traversal, arcs always bulge outward (the body lies on the center side)
//! and the boundary curvature is piecewise exact: `1/r` on an arc of radius
//! `r`, `0` on a segment. This makes the closed-form extremal body
//! representable without discretization error.

use crate::geom::{self, Vec2};
use crate::symcone::SymMat;
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BodyError {
    #[error("boundary chain is not closed: gap of {gap} between piece {index} and its successor")]
    OpenChain { index: usize, gap: f64 },
    #[error("chain is not convex: turning {turning} at junction {index}")]
    NonConvex { index: usize, turning: f64 },
    #[error("total turning is {total}, expected 2*pi")]
    BadTotalTurning { total: f64 },
    #[error("arc radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("arc angular span must be positive")]
    EmptyArc,
    #[error("degenerate piece of length {0}")]
    DegeneratePiece(f64),
    #[error("point ({0}, {1}) is not on a smooth boundary piece")]
    NotSmooth(f64, f64),
    #[error("intersection is empty or has no interior")]
    DegenerateIntersection,
    #[error("chain must contain at least one piece")]
    EmptyChain,
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("ball radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("curvature target t={t} outside (0, k] with k = R^-n = {k}")]
    CurvatureOutOfRange { t: f64, k: f64 },
    #[error("opening {0} leaves the boundary data empty or total")]
    DegenerateOpening(f64),
    #[error("ambient dimension must be 2 or 3, got {0}")]
    InvalidDimension(usize),
}

/// One boundary piece of a convex chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Piece {
    /// Counterclockwise circular arc: `point(theta) = center + r e(theta)`
    /// for `theta in [a0, a1]`, `a1 > a0`. The body lies on the center side.
    Arc {
        center: Vec2,
        radius: f64,
        a0: f64,
        a1: f64,
    },
    /// Straight segment from `p0` to `p1`.
    Seg { p0: Vec2, p1: Vec2 },
}

impl Piece {
    pub fn start(&self) -> Vec2 {
        match *self {
            Piece::Arc { center, radius, a0, .. } => center + Vec2::from_angle(a0) * radius,
            Piece::Seg { p0, .. } => p0,
        }
    }

    pub fn end(&self) -> Vec2 {
        match *self {
            Piece::Arc { center, radius, a1, .. } => center + Vec2::from_angle(a1) * radius,
            Piece::Seg { p1, .. } => p1,
        }
    }

    /// Point at normalized parameter `s in [0, 1]`.
    pub fn point_at(&self, s: f64) -> Vec2 {
        match *self {
            Piece::Arc { center, radius, a0, a1 } => {
                center + Vec2::from_angle(a0 + s * (a1 - a0)) * radius
            }
            Piece::Seg { p0, p1 } => p0 + (p1 - p0) * s,
        }
    }

    /// Unit tangent in traversal direction at parameter `s`.
    pub fn tangent_at(&self, s: f64) -> Vec2 {
        match *self {
            Piece::Arc { a0, a1, .. } => Vec2::from_angle(a0 + s * (a1 - a0)).rot90(),
            Piece::Seg { p0, p1 } => (p1 - p0).normalized(),
        }
    }

    /// Outward unit normal at parameter `s` (interior is left of traversal).
    pub fn outward_normal_at(&self, s: f64) -> Vec2 {
        self.tangent_at(s).rot270()
    }

    pub fn length(&self) -> f64 {
        match *self {
            Piece::Arc { radius, a0, a1, .. } => radius * (a1 - a0),
            Piece::Seg { p0, p1 } => (p1 - p0).norm(),
        }
    }

    /// Turning accumulated along the piece.
    pub fn turning(&self) -> f64 {
        match *self {
            Piece::Arc { a0, a1, .. } => a1 - a0,
            Piece::Seg { .. } => 0.0,
        }
    }

    /// Boundary curvature along the piece (constant per piece).
    pub fn curvature(&self) -> f64 {
        match *self {
            Piece::Arc { radius, .. } => 1.0 / radius,
            Piece::Seg { .. } => 0.0,
        }
    }

    /// Exact distance from `p` to the piece.
    pub fn distance_to(&self, p: Vec2) -> f64 {
        match *self {
            Piece::Arc { center, radius, a0, a1 } => {
                let d = p - center;
                let n = d.norm();
                if n < 1e-300 {
                    return radius;
                }
                let theta = d.angle();
                if angle_in_span(theta, a0, a1) {
                    (n - radius).abs()
                } else {
                    p.dist(self.start()).min(p.dist(self.end()))
                }
            }
            Piece::Seg { p0, p1 } => {
                let d = p1 - p0;
                let len_sq = d.norm_sq();
                if len_sq == 0.0 {
                    return p.dist(p0);
                }
                let s = ((p - p0).dot(d) / len_sq).clamp(0.0, 1.0);
                p.dist(p0 + d * s)
            }
        }
    }

    /// Sub-piece between normalized parameters `s0 < s1`.
    fn sub(&self, s0: f64, s1: f64) -> Piece {
        match *self {
            Piece::Arc { center, radius, a0, a1 } => Piece::Arc {
                center,
                radius,
                a0: a0 + s0 * (a1 - a0),
                a1: a0 + s1 * (a1 - a0),
            },
            Piece::Seg { p0, p1 } => Piece::Seg {
                p0: p0 + (p1 - p0) * s0,
                p1: p0 + (p1 - p0) * s1,
            },
        }
    }
}

/// Does angle `theta` fall on the arc span `[a0, a1]` (mod 2*pi)?
fn angle_in_span(theta: f64, a0: f64, a1: f64) -> bool {
    let span = a1 - a0;
    if span >= TAU {
        return true;
    }
    let rel = geom::wrap_angle(theta - a0);
    rel <= span || rel >= TAU - 1e-12
}

/// Convex body bounded by a closed counterclockwise chain of arcs and
/// segments.
#[derive(Clone, Debug, PartialEq)]
pub struct Body2D {
    pieces: Vec<Piece>,
    anchor: Vec2, // interior reference point, computed at construction
}

/// Tolerance for chain closure and convexity audits, relative to scale.
const CHAIN_TOL: f64 = 1e-9;
const TURNING_TOL: f64 = 1e-9;

impl Body2D {
    /// Validate and seal a chain: closed, convex (turning >= -1e-9
    /// everywhere), total turning 2*pi, positive radii.
    pub fn new(pieces: Vec<Piece>) -> Result<Self, BodyError> {
        if pieces.is_empty() {
            return Err(BodyError::EmptyChain);
        }
        let scale = pieces
            .iter()
            .flat_map(|p| [p.start(), p.end()])
            .map(|v| v.norm())
            .fold(0.0f64, f64::max)
            .max(1.0);
        let mut total_turning = 0.0;
        for (i, piece) in pieces.iter().enumerate() {
            match *piece {
                Piece::Arc { radius, a0, a1, .. } => {
                    if radius <= 0.0 {
                        return Err(BodyError::NonPositiveRadius(radius));
                    }
                    if a1 <= a0 {
                        return Err(BodyError::EmptyArc);
                    }
                }
                Piece::Seg { p0, p1 } => {
                    let len = (p1 - p0).norm();
                    if len <= CHAIN_TOL * scale {
                        return Err(BodyError::DegeneratePiece(len));
                    }
                }
            }
            let next = &pieces[(i + 1) % pieces.len()];
            let gap = piece.end().dist(next.start());
            if gap > CHAIN_TOL * scale * 10.0 {
                return Err(BodyError::OpenChain { index: i, gap });
            }
            let turn = geom::turn_angle(piece.tangent_at(1.0), next.tangent_at(0.0));
            if turn < -TURNING_TOL {
                return Err(BodyError::NonConvex { index: i, turning: turn });
            }
            total_turning += piece.turning() + turn;
        }
        if (total_turning - TAU).abs() > 1e-6 {
            return Err(BodyError::BadTotalTurning { total: total_turning });
        }
        let anchor = chain_anchor(&pieces);
        Ok(Body2D { pieces, anchor })
    }

    /// Disk of radius `r` centered at `c`, as a single full-circle arc.
    pub fn disk(center: Vec2, radius: f64) -> Self {
        Body2D::new(vec![Piece::Arc {
            center,
            radius,
            a0: 0.0,
            a1: TAU,
        }])
        .expect("a disk is a valid body")
    }

    /// Axis-aligned square `[-s, s]^2`, counterclockwise.
    pub fn square(half_side: f64) -> Self {
        let s = half_side;
        Body2D::new(vec![
            Piece::Seg { p0: Vec2::new(s, -s), p1: Vec2::new(s, s) },
            Piece::Seg { p0: Vec2::new(s, s), p1: Vec2::new(-s, s) },
            Piece::Seg { p0: Vec2::new(-s, s), p1: Vec2::new(-s, -s) },
            Piece::Seg { p0: Vec2::new(-s, -s), p1: Vec2::new(s, -s) },
        ])
        .expect("a square is a valid body")
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// A point strictly inside the body.
    pub fn interior_point(&self) -> Vec2 {
        self.anchor
    }

    /// Junction points where the tangent turns by more than the smoothness
    /// tolerance, with the turning angle.
    pub fn vertices(&self) -> Vec<(Vec2, f64)> {
        let n = self.pieces.len();
        let mut out = Vec::new();
        for i in 0..n {
            let turn = geom::turn_angle(
                self.pieces[i].tangent_at(1.0),
                self.pieces[(i + 1) % n].tangent_at(0.0),
            );
            if turn > TURNING_TOL {
                out.push((self.pieces[i].end(), turn));
            }
        }
        out
    }

    /// Largest distance from the interior anchor to the boundary.
    pub fn circumscribed_radius(&self) -> f64 {
        self.pieces
            .iter()
            .flat_map(|p| (0..=8).map(move |i| p.point_at(i as f64 / 8.0)))
            .map(|q| q.dist(self.anchor))
            .fold(0.0, f64::max)
    }

    /// Exact support value `max { <p, dir> : p in body }` for a unit `dir`.
    pub fn support(&self, dir: Vec2) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for piece in &self.pieces {
            let cand = match *piece {
                Piece::Arc { center, radius, a0, a1 } => {
                    let mut v = center.dot(dir) + radius * dir.norm();
                    // The free extremum counts only if its angle is on the arc.
                    if !angle_in_span(dir.angle(), a0, a1) {
                        v = piece.start().dot(dir).max(piece.end().dot(dir));
                    }
                    v
                }
                Piece::Seg { p0, p1 } => p0.dot(dir).max(p1.dot(dir)),
            };
            best = best.max(cand);
        }
        best
    }

    /// Distance from `p` to the boundary chain (exact per piece).
    pub fn boundary_distance(&self, p: Vec2) -> f64 {
        self.pieces
            .iter()
            .map(|piece| piece.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Signed distance to the body: negative inside, positive outside.
    ///
    /// The inside test casts a ray from the interior anchor; for a convex
    /// body the ray crosses the boundary exactly once.
    pub fn signed_distance(&self, p: Vec2) -> f64 {
        let d = self.boundary_distance(p);
        if self.is_inside(p) {
            -d
        } else {
            d
        }
    }

    fn is_inside(&self, p: Vec2) -> bool {
        let rel = p - self.anchor;
        let dist = rel.norm();
        if dist < 1e-300 {
            return true;
        }
        let dir = rel / dist;
        match self.ray_exit(self.anchor, dir) {
            Some(t) => dist <= t,
            None => false,
        }
    }

    /// Distance along `origin + t*dir` to the first boundary crossing with
    /// `t > 0`. `None` only on numerical failure (origin outside).
    fn ray_exit(&self, origin: Vec2, dir: Vec2) -> Option<f64> {
        let mut best: Option<f64> = None;
        let far = origin + dir * (4.0 * self.circumscribed_radius() + 1.0);
        for piece in &self.pieces {
            match *piece {
                Piece::Arc { center, radius, a0, a1 } => {
                    for s in geom::line_circle_params(origin, far, center, radius) {
                        if s <= 1e-12 {
                            continue;
                        }
                        let q = origin + (far - origin) * s;
                        if angle_in_span((q - center).angle(), a0, a1) {
                            let t = s * (far - origin).norm();
                            best = Some(best.map_or(t, |b: f64| b.min(t)));
                        }
                    }
                }
                Piece::Seg { p0, p1 } => {
                    if let Some((s, _u, _q)) = geom::seg_seg(origin, far, p0, p1, 1e-12) {
                        if s > 1e-12 {
                            let t = s * (far - origin).norm();
                            best = Some(best.map_or(t, |b: f64| b.min(t)));
                        }
                    }
                }
            }
        }
        best
    }

    /// Containment with a caller-supplied length tolerance.
    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        self.signed_distance(p) <= tol
    }

    /// `samples` points per piece, midpoints of equal parameter cells (no
    /// endpoints, so vertex handling stays explicit).
    pub fn boundary_samples(&self, samples_per_piece: usize) -> Vec<Vec2> {
        let mut out = Vec::with_capacity(self.pieces.len() * samples_per_piece);
        for piece in &self.pieces {
            for i in 0..samples_per_piece {
                let s = (i as f64 + 0.5) / samples_per_piece as f64;
                out.push(piece.point_at(s));
            }
        }
        out
    }

    /// Boundary samples spaced evenly in arc length across the whole chain.
    pub fn boundary_samples_even(&self, total: usize) -> Vec<Vec2> {
        let perimeter: f64 = self.pieces.iter().map(Piece::length).sum();
        let mut out = Vec::with_capacity(total);
        for piece in &self.pieces {
            let n = ((piece.length() / perimeter) * total as f64).ceil().max(1.0) as usize;
            for i in 0..n {
                let s = (i as f64 + 0.5) / n as f64;
                out.push(piece.point_at(s));
            }
        }
        out
    }

    /// Shape operator at a smooth boundary point: the 1x1 matrix `[kappa]`
    /// with respect to the outward normal. Points within the chain tolerance
    /// of a junction are rejected.
    pub fn shape_operator_at(&self, p: Vec2) -> Result<SymMat, BodyError> {
        let scale = self.circumscribed_radius().max(1.0);
        let tol = 1e-7 * scale;
        for (pt, _) in self.vertices() {
            if pt.dist(p) <= tol {
                return Err(BodyError::NotSmooth(p.x, p.y));
            }
        }
        for piece in &self.pieces {
            if piece.distance_to(p) <= tol {
                return Ok(SymMat::scalar(piece.curvature()));
            }
        }
        Err(BodyError::NotSmooth(p.x, p.y))
    }

    /// Smooth-boundary curvature test: does the shape operator lie in `F_t`
    /// at every sampled point? Fails loudly if the chain has vertices.
    pub fn is_type_f_smooth(&self, t: f64) -> Result<bool, BodyError> {
        if let Some((v, _)) = self.vertices().first() {
            return Err(BodyError::NotSmooth(v.x, v.y));
        }
        let tol = crate::symcone::DEFAULT_TOL;
        for piece in &self.pieces {
            // Curvature is constant per piece, but sample anyway so the
            // code path matches the contract (>= 64 points per piece).
            for i in 0..64 {
                let _ = piece.point_at((i as f64 + 0.5) / 64.0);
            }
            if piece.curvature() < t - tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Symmetric Hausdorff distance between two bodies (as sets), computed
    /// from dense boundary samples of each body against exact distances to
    /// the other. Accuracy is limited by the sampling scale.
    pub fn hausdorff(&self, other: &Body2D) -> f64 {
        self.hausdorff_sampled(other, 1024)
    }

    pub fn hausdorff_sampled(&self, other: &Body2D, samples: usize) -> f64 {
        let d_ab = directed_deviation(self, other, samples);
        let d_ba = directed_deviation(other, self, samples);
        d_ab.max(d_ba)
    }

    /// Intersection of two convex bodies as a new boundary chain. Pieces are
    /// inherited and clipped at crossing points.
    pub fn intersect(&self, other: &Body2D) -> Result<Body2D, BodyError> {
        intersect_bodies(self, other)
    }

    /// Area by Green's theorem (exact per piece).
    pub fn area(&self) -> f64 {
        let mut a = 0.0;
        for piece in &self.pieces {
            match *piece {
                Piece::Seg { p0, p1 } => a += 0.5 * p0.cross(p1),
                Piece::Arc { center, radius, a0, a1 } => {
                    // Integral of x dy - y dx over the arc, halved.
                    let span = a1 - a0;
                    let chord_term = 0.5 * radius * center.cross(Vec2::from_angle(a1) - Vec2::from_angle(a0));
                    a += 0.5 * radius * radius * span + chord_term;
                }
            }
        }
        a
    }

    /// Plain-text piece list, one piece per line:
    /// `arc cx cy r a0 a1` or `seg x0 y0 x1 y1`.
    pub fn to_piece_list(&self) -> String {
        let mut out = String::new();
        for piece in &self.pieces {
            match *piece {
                Piece::Arc { center, radius, a0, a1 } => {
                    writeln!(out, "arc {:.17e} {:.17e} {:.17e} {:.17e} {:.17e}", center.x, center.y, radius, a0, a1).unwrap();
                }
                Piece::Seg { p0, p1 } => {
                    writeln!(out, "seg {:.17e} {:.17e} {:.17e} {:.17e}", p0.x, p0.y, p1.x, p1.y).unwrap();
                }
            }
        }
        out
    }

    pub fn from_piece_list(text: &str) -> Result<Body2D, BodyError> {
        let mut pieces = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| -> Result<f64, BodyError> {
                s.parse::<f64>().map_err(|e| BodyError::Parse {
                    line: lineno + 1,
                    msg: format!("bad number {s:?}: {e}"),
                })
            };
            match fields.first().copied() {
                Some("arc") if fields.len() == 6 => pieces.push(Piece::Arc {
                    center: Vec2::new(parse(fields[1])?, parse(fields[2])?),
                    radius: parse(fields[3])?,
                    a0: parse(fields[4])?,
                    a1: parse(fields[5])?,
                }),
                Some("seg") if fields.len() == 5 => pieces.push(Piece::Seg {
                    p0: Vec2::new(parse(fields[1])?, parse(fields[2])?),
                    p1: Vec2::new(parse(fields[3])?, parse(fields[4])?),
                }),
                _ => {
                    return Err(BodyError::Parse {
                        line: lineno + 1,
                        msg: format!("expected `arc cx cy r a0 a1` or `seg x0 y0 x1 y1`, got {line:?}"),
                    })
                }
            }
        }
        Body2D::new(pieces)
    }

    /// SVG path data for the chain (math coordinates; apply a transform for
    /// screen display).
    pub fn to_svg_path(&self) -> String {
        let mut d = String::new();
        let start = self.pieces[0].start();
        write!(d, "M {:.6} {:.6}", start.x, start.y).unwrap();
        for piece in &self.pieces {
            match *piece {
                Piece::Seg { p1, .. } => {
                    write!(d, " L {:.6} {:.6}", p1.x, p1.y).unwrap();
                }
                Piece::Arc { radius, a0, a1, .. } => {
                    // SVG arcs are limited to < 2*pi; split wide spans.
                    let span = a1 - a0;
                    let n = (span / PI).ceil().max(1.0) as usize;
                    for i in 1..=n {
                        let e = piece.point_at(i as f64 / n as f64);
                        // sweep=1: counterclockwise in math coordinates.
                        write!(d, " A {:.6} {:.6} 0 0 1 {:.6} {:.6}", radius, radius, e.x, e.y).unwrap();
                    }
                }
            }
        }
        d.push_str(" Z");
        d
    }
}

fn directed_deviation(a: &Body2D, b: &Body2D, samples: usize) -> f64 {
    a.boundary_samples_even(samples)
        .into_iter()
        .map(|p| b.signed_distance(p).max(0.0))
        .fold(0.0, f64::max)
}

/// Interior anchor: mean of dense boundary samples. For a convex body this
/// lies strictly inside whenever the body has interior.
fn chain_anchor(pieces: &[Piece]) -> Vec2 {
    let mut sum = Vec2::ZERO;
    let mut count = 0.0;
    for piece in pieces {
        for i in 0..16 {
            sum = sum + piece.point_at((i as f64 + 0.5) / 16.0);
            count += 1.0;
        }
    }
    sum / count
}

// ---------------------------------------------------------------------------
// Intersection of two convex chains.
// ---------------------------------------------------------------------------

fn piece_crossings(a: &Piece, b: &Piece, tol: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    match (*a, *b) {
        (Piece::Seg { p0: a0, p1: a1 }, Piece::Seg { p0: b0, p1: b1 }) => {
            if let Some((s, t, _)) = geom::seg_seg(a0, a1, b0, b1, tol) {
                out.push((s.clamp(0.0, 1.0), t.clamp(0.0, 1.0)));
            }
        }
        (Piece::Arc { center, radius, a0, a1 }, Piece::Seg { p0, p1 }) => {
            for s in geom::line_circle_params(p0, p1, center, radius) {
                let eps = tol / (p1 - p0).norm().max(1e-300);
                if !(-eps..=1.0 + eps).contains(&s) {
                    continue;
                }
                let q = p0 + (p1 - p0) * s;
                let theta = (q - center).angle();
                if let Some(u) = span_param(theta, a0, a1) {
                    out.push((u, s.clamp(0.0, 1.0)));
                }
            }
        }
        (Piece::Seg { .. }, Piece::Arc { .. }) => {
            for (t, s) in piece_crossings(b, a, tol) {
                out.push((s, t));
            }
        }
        (
            Piece::Arc { center: c1, radius: r1, a0: s0, a1: s1 },
            Piece::Arc { center: c2, radius: r2, a0: t0, a1: t1 },
        ) => {
            for q in geom::circle_circle(c1, r1, c2, r2, tol) {
                let ta = (q - c1).angle();
                let tb = (q - c2).angle();
                if let (Some(u), Some(v)) = (span_param(ta, s0, s1), span_param(tb, t0, t1)) {
                    out.push((u, v));
                }
            }
        }
    }
    out
}

/// Normalized parameter of angle `theta` on the arc span, if it lies on it.
fn span_param(theta: f64, a0: f64, a1: f64) -> Option<f64> {
    let span = a1 - a0;
    let rel = geom::wrap_angle(theta - a0);
    if rel <= span {
        Some((rel / span).clamp(0.0, 1.0))
    } else if rel >= TAU - 1e-9 {
        Some(0.0)
    } else if rel - span < 1e-9 {
        Some(1.0)
    } else {
        None
    }
}

/// Split the pieces of `body` at the given per-piece parameters and keep the
/// fragments whose midpoint satisfies `keep`.
fn split_and_filter(
    body: &Body2D,
    cuts: &mut [Vec<f64>],
    keep: impl Fn(Vec2) -> bool,
) -> Vec<Piece> {
    let mut kept = Vec::new();
    for (piece, params) in body.pieces().iter().zip(cuts.iter_mut()) {
        params.push(0.0);
        params.push(1.0);
        params.sort_by(|a, b| a.partial_cmp(b).unwrap());
        params.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        for w in params.windows(2) {
            let (s0, s1) = (w[0], w[1]);
            if s1 - s0 < 1e-12 {
                continue;
            }
            let frag = piece.sub(s0, s1);
            if frag.length() < 1e-13 {
                continue;
            }
            if keep(frag.point_at(0.5)) {
                kept.push(frag);
            }
        }
    }
    kept
}

/// Stitch fragments into a closed counterclockwise chain by endpoint
/// matching. Consumes `frags`.
fn stitch_chain(mut frags: Vec<Piece>, scale: f64) -> Result<Vec<Piece>, BodyError> {
    if frags.is_empty() {
        return Err(BodyError::DegenerateIntersection);
    }
    let tol = 1e-7 * scale;
    let mut chain = vec![frags.swap_remove(0)];
    while !frags.is_empty() {
        let tail = chain.last().unwrap().end();
        let mut best: Option<(usize, f64)> = None;
        for (i, f) in frags.iter().enumerate() {
            let d = f.start().dist(tail);
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        let (idx, d) = best.unwrap();
        if d > tol {
            // Remaining fragments do not continue the chain; for convex
            // inputs this means duplicated overlap slivers. Drop them if the
            // chain already closes, otherwise fail.
            break;
        }
        chain.push(frags.swap_remove(idx));
    }
    let gap = chain.last().unwrap().end().dist(chain[0].start());
    if gap > tol {
        return Err(BodyError::OpenChain { index: chain.len() - 1, gap });
    }
    Ok(chain)
}

fn intersect_bodies(a: &Body2D, b: &Body2D) -> Result<Body2D, BodyError> {
    let scale = a
        .circumscribed_radius()
        .max(b.circumscribed_radius())
        .max(1e-12);
    let tol = 1e-12 * scale.max(1.0);

    let mut cuts_a: Vec<Vec<f64>> = vec![Vec::new(); a.pieces().len()];
    let mut cuts_b: Vec<Vec<f64>> = vec![Vec::new(); b.pieces().len()];
    let mut any_crossing = false;
    for (i, pa) in a.pieces().iter().enumerate() {
        for (j, pb) in b.pieces().iter().enumerate() {
            for (s, t) in piece_crossings(pa, pb, tol) {
                any_crossing = true;
                cuts_a[i].push(s);
                cuts_b[j].push(t);
            }
        }
    }

    let ctol = 1e-9 * scale;
    if !any_crossing {
        // Nested or disjoint.
        if b.contains(a.interior_point(), ctol) && b.contains(a.pieces()[0].start(), ctol) {
            return Ok(a.clone());
        }
        if a.contains(b.interior_point(), ctol) && a.contains(b.pieces()[0].start(), ctol) {
            return Ok(b.clone());
        }
        return Err(BodyError::DegenerateIntersection);
    }

    // Keep fragments of A inside B (boundary counts as inside) and
    // fragments of B strictly inside A. The asymmetry keeps overlapping
    // boundary runs from being emitted twice.
    let mut kept = split_and_filter(a, &mut cuts_a, |p| b.contains(p, ctol));
    kept.extend(split_and_filter(b, &mut cuts_b, |p| {
        a.signed_distance(p) < -ctol
    }));

    let chain = stitch_chain(kept, scale)?;
    let body = Body2D::new(chain)?;
    if body.area() <= (1e-7 * scale) * (1e-7 * scale) {
        return Err(BodyError::DegenerateIntersection);
    }
    Ok(body)
}

// ---------------------------------------------------------------------------
// Scenarios.
// ---------------------------------------------------------------------------

/// A fully validated problem instance: the ambient ball, the polar-cap
/// boundary opening and the curvature target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scenario {
    /// Ambient dimension 2 (curves in the plane, n = 1). The opening is the
    /// polar half-angle `alpha in (0, pi)`; `Omega = {|theta| < alpha}`.
    TwoD { radius: f64, alpha: f64, t: f64 },
    /// Ambient dimension 3 (surfaces, n = 2). The opening is the cap height
    /// `z0 in (-R, R)`; `Omega = {z > z0}` on the sphere.
    ThreeD { radius: f64, z0: f64, t: f64 },
}

impl Scenario {
    pub fn radius(&self) -> f64 {
        match *self {
            Scenario::TwoD { radius, .. } | Scenario::ThreeD { radius, .. } => radius,
        }
    }

    pub fn t(&self) -> f64 {
        match *self {
            Scenario::TwoD { t, .. } | Scenario::ThreeD { t, .. } => t,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Scenario::TwoD { .. } => 2,
            Scenario::ThreeD { .. } => 3,
        }
    }

    /// Gaussian curvature `k = R^{-n}` of the ambient ball boundary.
    pub fn curvature_bound(&self) -> f64 {
        let n = self.dim() - 1;
        self.radius().powi(-(n as i32))
    }

    /// Rim radius of the 3D cap scenario: `rho = sqrt(R^2 - z0^2)`.
    pub fn rim_radius(&self) -> Option<f64> {
        match *self {
            Scenario::ThreeD { radius, z0, .. } => Some((radius * radius - z0 * z0).sqrt()),
            Scenario::TwoD { .. } => None,
        }
    }

    /// The ambient ball as a planar body (2D scenarios).
    pub fn khat_body(&self) -> Option<Body2D> {
        match *self {
            Scenario::TwoD { radius, .. } => Some(Body2D::disk(Vec2::ZERO, radius)),
            Scenario::ThreeD { .. } => None,
        }
    }
}

/// Validate and build a scenario. `opening` is the half-angle (dim 2) or the
/// cap height (dim 3). Rejects `t` outside `(0, k]` with `k = R^{-n}`.
pub fn make_scenario(radius: f64, opening: f64, t: f64, dim: usize) -> Result<Scenario, ScenarioError> {
    if !(radius > 0.0) {
        return Err(ScenarioError::InvalidRadius(radius));
    }
    let scenario = match dim {
        2 => {
            if !(opening > 0.0 && opening < PI) {
                return Err(ScenarioError::DegenerateOpening(opening));
            }
            Scenario::TwoD { radius, alpha: opening, t }
        }
        3 => {
            if !(opening > -radius && opening < radius) {
                return Err(ScenarioError::DegenerateOpening(opening));
            }
            Scenario::ThreeD { radius, z0: opening, t }
        }
        d => return Err(ScenarioError::InvalidDimension(d)),
    };
    let k = scenario.curvature_bound();
    if !(t > 0.0 && t <= k + 1e-12) {
        return Err(ScenarioError::CurvatureOutOfRange { t, k });
    }
    Ok(scenario)
}

/// Hull of the fixed boundary data `Omega^c`.
#[derive(Clone, Debug)]
pub enum HullK0 {
    /// 2D: the body bounded by the arc `{|theta| >= alpha}` and the chord
    /// between its endpoints.
    Planar(Body2D),
    /// 3D: the lower spherical cap closed by the flat lid.
    Cap { rim_radius: f64, lid_height: f64 },
}

/// Convex hull of `Omega^c` for a validated scenario.
pub fn hull_k0(s: &Scenario) -> HullK0 {
    match *s {
        Scenario::TwoD { radius, alpha, .. } => {
            let p_plus = Vec2::from_angle(alpha) * radius;
            let p_minus = Vec2::from_angle(-alpha) * radius;
            let body = Body2D::new(vec![
                Piece::Arc {
                    center: Vec2::ZERO,
                    radius,
                    a0: alpha,
                    a1: TAU - alpha,
                },
                Piece::Seg { p0: p_minus, p1: p_plus },
            ])
            .expect("hull of the complementary arc is a valid body");
            HullK0::Planar(body)
        }
        Scenario::ThreeD { radius, z0, .. } => HullK0::Cap {
            rim_radius: (radius * radius - z0 * z0).sqrt(),
            lid_height: z0,
        },
    }
}

/// Gaussian curvature of a graph from its gradient and Hessian:
/// `K = det(hess) / (1 + |grad|^2)^((n+2)/2)` with `n = hess.dim()`.
pub fn graph_gauss_curvature(grad: &[f64], hess: &SymMat) -> f64 {
    let n = hess.dim();
    assert_eq!(grad.len(), n, "gradient length must match Hessian dimension");
    let g2: f64 = grad.iter().map(|g| g * g).sum();
    hess.det() / (1.0 + g2).powf((n as f64 + 2.0) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn scenario_validation() {
        assert!(make_scenario(1.0, PI / 2.0, 0.5, 2).is_ok());
        assert!(make_scenario(1.0, 0.8, 0.25, 3).is_ok());
        // k = R^-n = 1/4 < t for R=2, dim 3.
        match make_scenario(2.0, 0.5, 0.5, 3) {
            Err(ScenarioError::CurvatureOutOfRange { t, k }) => {
                assert_relative_eq!(t, 0.5);
                assert_relative_eq!(k, 0.25);
            }
            other => panic!("expected curvature bound violation, got {other:?}"),
        }
        assert!(make_scenario(1.0, 0.0, 0.5, 2).is_err());
        assert!(make_scenario(1.0, PI, 0.5, 2).is_err());
        assert!(make_scenario(1.0, 1.0, 0.5, 3).is_err()); // z0 = R
        assert!(make_scenario(-1.0, 0.5, 0.5, 2).is_err());
        assert!(make_scenario(1.0, 0.5, 0.5, 4).is_err());
    }

    #[test]
    fn hull_k0_half_disk() {
        let s = make_scenario(1.0, PI / 2.0, 0.5, 2).unwrap();
        let HullK0::Planar(body) = hull_k0(&s) else {
            panic!("2D scenario yields a planar hull")
        };
        // Chord runs from (0,-1) to (0,1).
        let verts = body.vertices();
        assert_eq!(verts.len(), 2);
        for (v, _) in verts {
            assert_relative_eq!(v.x, 0.0, epsilon = 1e-12);
            assert_relative_eq!(v.y.abs(), 1.0, epsilon = 1e-12);
        }
        // Support toward Omega is the chord at x = 0.
        assert_relative_eq!(body.support(Vec2::new(1.0, 0.0)), 0.0, epsilon = 1e-12);
        // K0 sits inside the ambient ball.
        let khat = Body2D::disk(Vec2::ZERO, 1.0);
        for p in body.boundary_samples_even(512) {
            assert!(khat.contains(p, 1e-9));
        }
    }

    #[test]
    fn hull_k0_cap_rim() {
        let s = make_scenario(1.0, 0.8, 0.25, 3).unwrap();
        let HullK0::Cap { rim_radius, lid_height } = hull_k0(&s) else {
            panic!("3D scenario yields a cap hull")
        };
        assert_relative_eq!(rim_radius, 0.6, epsilon = 1e-12);
        assert_relative_eq!(lid_height, 0.8, epsilon = 1e-12);
    }

    #[test]
    fn shape_operator_values() {
        let disk = Body2D::disk(Vec2::ZERO, 1.0);
        let k = disk.shape_operator_at(Vec2::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(k.get(0, 0), 1.0);

        let disk2 = Body2D::disk(Vec2::ZERO, 2.0);
        let k2 = disk2.shape_operator_at(Vec2::new(0.0, 2.0)).unwrap();
        assert_relative_eq!(k2.get(0, 0), 0.5);

        let sq = Body2D::square(1.0);
        let k0 = sq.shape_operator_at(Vec2::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(k0.get(0, 0), 0.0);
        assert!(matches!(
            sq.shape_operator_at(Vec2::new(1.0, 1.0)),
            Err(BodyError::NotSmooth(..))
        ));
    }

    #[test]
    fn smooth_type_f() {
        let disk = Body2D::disk(Vec2::ZERO, 1.0);
        assert!(disk.is_type_f_smooth(1.0).unwrap());
        assert!(!disk.is_type_f_smooth(2.0).unwrap());
        let half = Body2D::disk(Vec2::ZERO, 0.5);
        assert!(half.is_type_f_smooth(1.5).unwrap());
        let sq = Body2D::square(1.0);
        assert!(sq.is_type_f_smooth(0.1).is_err());
    }

    #[test]
    fn intersect_idempotent() {
        let disk = Body2D::disk(Vec2::ZERO, 1.0);
        let same = disk.intersect(&Body2D::disk(Vec2::ZERO, 1.0)).unwrap();
        assert!(disk.hausdorff(&same) < 1e-9);
    }

    #[test]
    fn intersect_lens() {
        let a = Body2D::disk(Vec2::new(-0.5, 0.0), 1.0);
        let b = Body2D::disk(Vec2::new(0.5, 0.0), 1.0);
        let lens = a.intersect(&b).unwrap();
        let verts = lens.vertices();
        assert_eq!(verts.len(), 2);
        let y = 0.75f64.sqrt();
        for (v, _) in &verts {
            assert_relative_eq!(v.x, 0.0, epsilon = 1e-9);
            assert_relative_eq!(v.y.abs(), y, epsilon = 1e-9);
        }
        // Commutes up to reparametrization.
        let lens_rev = b.intersect(&a).unwrap();
        assert!(lens.hausdorff(&lens_rev) < 1e-9);
        // Convexity audit happened in the constructor; spot-check turning.
        assert!(lens.area() > 0.0);
    }

    #[test]
    fn intersect_disjoint() {
        let a = Body2D::disk(Vec2::ZERO, 1.0);
        let b = Body2D::disk(Vec2::new(2.5, 0.0), 1.0);
        assert!(matches!(a.intersect(&b), Err(BodyError::DegenerateIntersection)));
        // Tangent disks: single touching point, no interior.
        let c = Body2D::disk(Vec2::new(2.0, 0.0), 1.0);
        assert!(a.intersect(&c).is_err());
    }

    #[test]
    fn intersect_nested() {
        let big = Body2D::disk(Vec2::ZERO, 2.0);
        let small = Body2D::disk(Vec2::new(0.3, 0.0), 0.5);
        let i1 = big.intersect(&small).unwrap();
        assert!(i1.hausdorff(&small) < 1e-9);
        let i2 = small.intersect(&big).unwrap();
        assert!(i2.hausdorff(&small) < 1e-9);
    }

    #[test]
    fn containment_and_hausdorff() {
        let disk = Body2D::disk(Vec2::ZERO, 1.0);
        assert!(disk.contains(Vec2::ZERO, 1e-9));
        assert!(!disk.contains(Vec2::new(1.1, 0.0), 1e-9));
        let bigger = Body2D::disk(Vec2::ZERO, 1.25);
        let d = disk.hausdorff(&bigger);
        assert_relative_eq!(d, 0.25, epsilon = 1e-4);
        assert_relative_eq!(disk.hausdorff(&disk), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn signed_distance_signs() {
        let sq = Body2D::square(1.0);
        assert!(sq.signed_distance(Vec2::ZERO) < 0.0);
        assert_relative_eq!(sq.signed_distance(Vec2::ZERO), -1.0, epsilon = 1e-12);
        assert_relative_eq!(sq.signed_distance(Vec2::new(2.0, 0.0)), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn gauss_curvature_formula() {
        // Flat gradient, identity Hessian in n=2.
        assert_relative_eq!(
            graph_gauss_curvature(&[0.0, 0.0], &SymMat::identity(2)),
            1.0
        );
        // grad=(1,0), hess=diag(2,2): 4 / 2^2 = 1.
        assert_relative_eq!(
            graph_gauss_curvature(&[1.0, 0.0], &SymMat::diag(&[2.0, 2.0])),
            1.0,
            epsilon = 1e-14
        );
    }

    /// Independent oracle for the sphere-cap graph: symbolic gradient and
    /// Hessian of v(x) = c - sqrt(r^2 - |x|^2).
    fn cap_grad_hess(x: f64, y: f64, r: f64) -> ([f64; 2], SymMat) {
        let s2 = r * r - x * x - y * y;
        let s = s2.sqrt();
        let grad = [x / s, y / s];
        let mut h = SymMat::zero(2);
        h.set(0, 0, 1.0 / s + x * x / (s * s2));
        h.set(0, 1, x * y / (s * s2));
        h.set(1, 1, 1.0 / s + y * y / (s * s2));
        (grad, h)
    }

    #[test]
    fn gauss_curvature_cap_graph() {
        // K must equal r^-2 at every interior sample of the cap graph.
        let r = 1.7;
        let mut worst: f64 = 0.0;
        let n = 40;
        let mut count = 0;
        for i in 0..n {
            for j in 0..n {
                let x = -0.8 * r + 1.6 * r * (i as f64 + 0.5) / n as f64;
                let y = -0.8 * r + 1.6 * r * (j as f64 + 0.5) / n as f64;
                if x * x + y * y >= 0.64 * r * r {
                    continue;
                }
                let (grad, hess) = cap_grad_hess(x, y, r);
                let k = graph_gauss_curvature(&grad, &hess);
                worst = worst.max((k - r.powi(-2)).abs());
                count += 1;
            }
        }
        assert!(count > 1000, "need at least 10^3 samples, got {count}");
        assert!(worst <= 1e-10, "worst deviation {worst}");
    }

    #[test]
    fn one_dim_graph_curvature() {
        // n = 1: circle graph has curvature 1/r under the same formula with
        // exponent 3/2.
        let r = 2.0f64;
        let x = 0.4f64;
        let s = (r * r - x * x).sqrt();
        let grad = [x / s];
        let hess = SymMat::scalar(r * r / (s * s * s));
        assert_relative_eq!(graph_gauss_curvature(&grad, &hess), 1.0 / r, epsilon = 1e-12);
    }

    #[test]
    fn piece_list_round_trip() {
        let s = make_scenario(1.0, 1.1, 0.4, 2).unwrap();
        let HullK0::Planar(body) = hull_k0(&s) else { unreachable!() };
        let text = body.to_piece_list();
        let back = Body2D::from_piece_list(&text).unwrap();
        assert_eq!(body.pieces(), back.pieces());
        assert!(Body2D::from_piece_list("arc 1 2\n").is_err());
        assert!(Body2D::from_piece_list("seg 0 0 nope 1\n").is_err());
    }

    #[test]
    fn area_of_disk_and_square() {
        let disk = Body2D::disk(Vec2::new(0.7, -0.3), 1.5);
        assert_relative_eq!(disk.area(), PI * 2.25, epsilon = 1e-9);
        assert_relative_eq!(Body2D::square(1.0).area(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn convexity_rejected() {
        // A reflex junction: two segments turning clockwise.
        let bad = Body2D::new(vec![
            Piece::Seg { p0: Vec2::new(0.0, 0.0), p1: Vec2::new(1.0, 0.0) },
            Piece::Seg { p0: Vec2::new(1.0, 0.0), p1: Vec2::new(2.0, -0.5) },
            Piece::Seg { p0: Vec2::new(2.0, -0.5), p1: Vec2::new(1.0, 1.5) },
            Piece::Seg { p0: Vec2::new(1.0, 1.5), p1: Vec2::new(0.0, 0.0) },
        ]);
        assert!(matches!(bad, Err(BodyError::NonConvex { .. })));
    }
}
