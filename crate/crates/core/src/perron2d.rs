//! The Perron construction in the plane.
//!
//! The extremal body is the intersection of all convex subsets of the
//! ambient disk that contain the boundary-data hull and have curvature at
//! least `t` everywhere. That family is generated by the disks of radius
//! `1/t` containing the hull: every member is an intersection of such disks,
//! and the disk intersection (the spindle hull) is itself a member. The
//! solver therefore samples one extremal disk per support direction and
//! folds their intersection; for the ball scenario the exact body is also
//! available in closed form as an oracle.

use crate::bodies::{hull_k0, Body2D, BodyError, HullK0, Piece, Scenario};
use crate::geom::{self, Vec2};
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PerronError {
    #[error("no disk of radius {radius} contains the boundary-data hull (circumradius {circumradius})")]
    InfeasibleCore { radius: f64, circumradius: f64 },
    #[error("direction count must be at least 16, got {0}")]
    TooFewDirections(usize),
    #[error("scenario must be two-dimensional")]
    WrongDimension,
    #[error(transparent)]
    Body(#[from] BodyError),
}

/// Closed-form extremal body for the disk scenario: the complementary arc of
/// the ambient circle joined to the free arc of radius `1/t` through the
/// opening endpoints, bulging toward the opening. The free-arc curvature is
/// exactly `t`.
pub fn analytic_kt(s: &Scenario) -> Result<Body2D, PerronError> {
    let Scenario::TwoD { radius: r_hat, alpha, t } = *s else {
        return Err(PerronError::WrongDimension);
    };
    let r_free = 1.0 / t;
    let p_plus = Vec2::from_angle(alpha) * r_hat;
    // Center of the free arc on the symmetry axis:
    // x_c = R cos(alpha) - sqrt(1/t^2 - R^2 sin^2(alpha)).
    let sin_a = alpha.sin();
    let x_c = r_hat * alpha.cos() - (r_free * r_free - r_hat * r_hat * sin_a * sin_a).sqrt();
    let center = Vec2::new(x_c, 0.0);
    // Free-arc half-opening seen from its own center.
    let beta = (p_plus - center).angle();
    if beta <= 1e-12 {
        // t = k with alpha <= pi/2 collapses the construction to the ambient
        // disk itself.
        return Ok(Body2D::disk(Vec2::ZERO, r_hat));
    }
    Ok(Body2D::new(vec![
        Piece::Arc {
            center: Vec2::ZERO,
            radius: r_hat,
            a0: alpha,
            a1: TAU - alpha,
        },
        Piece::Arc {
            center,
            radius: r_free,
            a0: -beta,
            a1: beta,
        },
    ])?)
}

/// Extremal body by sampled family intersection.
///
/// Per direction, the family member minimizing the support value is the disk
/// of radius `1/t` whose center is the support point of the center core
/// `C = { c : hull(data) subset D(c, 1/t) }` in the opposite direction; the
/// core is built from `4m` boundary samples of the hull and searched by
/// golden section along its boundary rays. The returned body contains the
/// hull exactly and lies in the ambient disk within the sampling tolerance.
pub fn perron_solve2d(s: &Scenario, m: usize) -> Result<Body2D, PerronError> {
    let Scenario::TwoD { t, .. } = *s else {
        return Err(PerronError::WrongDimension);
    };
    if m < 16 {
        return Err(PerronError::TooFewDirections(m));
    }
    let HullK0::Planar(k0) = hull_k0(s) else {
        return Err(PerronError::WrongDimension);
    };
    let r = 1.0 / t;

    // Core constraints: the member disk must cover every boundary point of
    // the hull.
    let anchors = k0.boundary_samples_even(4 * m);
    let (core_center, circumradius) = geom::smallest_enclosing_circle(&anchors);
    if circumradius > r * (1.0 + 1e-9) {
        // Cannot occur for t <= k; reaching this signals an invalid scenario.
        return Err(PerronError::InfeasibleCore { radius: r, circumradius });
    }

    // The anchors only sample the hull boundary; shrink the admissible disk
    // radius by the sampling sagitta so member disks cover the hull exactly,
    // not just its samples. Capped so the core never empties near t = k.
    let perimeter: f64 = k0.pieces().iter().map(|p| p.length()).sum();
    let spacing = perimeter / (4 * m) as f64;
    let kappa_max = k0
        .pieces()
        .iter()
        .map(|p| p.curvature())
        .fold(0.0f64, f64::max);
    let sagitta = spacing * spacing * kappa_max / 8.0;
    let r_eff = r - sagitta.min(0.5 * (r - circumradius).max(0.0));

    let mut centers: Vec<Vec2> = Vec::with_capacity(m);
    for i in 0..m {
        let theta = TAU * i as f64 / m as f64;
        let dir = Vec2::from_angle(theta);
        let c = extremal_center(&anchors, core_center, r_eff, dir);
        // Consecutive directions frequently share their extremal disk (the
        // core boundary has vertices); fold each disk once.
        if !centers.iter().any(|&p| p.dist(c) < 1e-10 * r.max(1.0)) {
            centers.push(c);
        }
    }

    intersect_equal_disks(&centers, r)
}

/// Intersection of equal-radius disks, built directly: each circle's
/// surviving angular interval is clipped in closed form against every other
/// disk, then the surviving arcs are chained with snapped endpoints. Exact
/// interval arithmetic avoids the ill-conditioned pairwise stitching of
/// near-tangent circles, and the clip fold is associative and order
/// independent.
fn intersect_equal_disks(centers: &[Vec2], r: f64) -> Result<Body2D, PerronError> {
    assert!(!centers.is_empty());
    if centers.len() == 1 {
        return Ok(Body2D::disk(centers[0], r));
    }

    // Angular intervals (lo, hi) on each circle, hi > lo, possibly several
    // components transiently.
    let mut survivors: Vec<(usize, f64, f64)> = Vec::new();
    for (i, &ci) in centers.iter().enumerate() {
        let mut intervals = vec![(0.0, TAU)];
        for (j, &cj) in centers.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = cj - ci;
            let dist = d.norm();
            if dist >= 2.0 * r {
                intervals.clear(); // disks barely touch or miss: no interior
                break;
            }
            // Points of circle i inside disk j: cos(theta - phi) >= d/(2r).
            let phi = d.angle();
            let w = (dist / (2.0 * r)).clamp(-1.0, 1.0).acos();
            intervals = clip_intervals(&intervals, phi - w, phi + w);
            if intervals.is_empty() {
                break;
            }
        }
        for (lo, hi) in intervals {
            if hi - lo > 1e-13 {
                survivors.push((i, lo, hi));
            }
        }
    }
    if survivors.is_empty() {
        return Err(PerronError::Body(BodyError::DegenerateIntersection));
    }
    if survivors.len() == 1 && survivors[0].2 - survivors[0].1 >= TAU - 1e-12 {
        return Ok(Body2D::disk(centers[survivors[0].0], r));
    }

    // Order arcs counterclockwise around an interior point.
    let anchor = survivors
        .iter()
        .fold(Vec2::ZERO, |acc, &(i, lo, hi)| {
            acc + centers[i] + Vec2::from_angle(0.5 * (lo + hi)) * r
        })
        / survivors.len() as f64;
    survivors.sort_by(|a, b| {
        let pa = centers[a.0] + Vec2::from_angle(0.5 * (a.1 + a.2)) * r - anchor;
        let pb = centers[b.0] + Vec2::from_angle(0.5 * (b.1 + b.2)) * r - anchor;
        pa.angle().partial_cmp(&pb.angle()).unwrap()
    });

    // Snap shared endpoints: consecutive arcs meet at a circle-circle
    // crossing computed twice; use the midpoint of both estimates.
    let n = survivors.len();
    let mut pieces = Vec::with_capacity(n);
    for idx in 0..n {
        let (i, lo, hi) = survivors[idx];
        let (inext, lo_next, _) = survivors[(idx + 1) % n];
        let end_here = centers[i] + Vec2::from_angle(hi) * r;
        let start_next = centers[inext] + Vec2::from_angle(lo_next) * r;
        let q = (end_here + start_next) * 0.5;
        let hi_snapped = nearest_angle((q - centers[i]).angle(), hi);
        pieces.push(Piece::Arc {
            center: centers[i],
            radius: r,
            a0: lo,
            a1: hi_snapped.max(lo + 1e-14),
        });
    }
    // Second pass: snap each arc's start to the previous arc's (already
    // snapped) end.
    let mut snapped = Vec::with_capacity(n);
    for idx in 0..n {
        let prev_end = match pieces[(idx + n - 1) % n] {
            Piece::Arc { center, radius, a1, .. } => center + Vec2::from_angle(a1) * radius,
            Piece::Seg { .. } => unreachable!(),
        };
        let Piece::Arc { center, radius, a0, a1 } = pieces[idx] else {
            unreachable!()
        };
        let lo_snapped = nearest_angle((prev_end - center).angle(), a0);
        snapped.push(Piece::Arc {
            center,
            radius,
            a0: lo_snapped,
            a1: a1.max(lo_snapped + 1e-14),
        });
    }
    Ok(Body2D::new(snapped)?)
}

/// Representative of `theta` (mod 2*pi) nearest to `reference`.
fn nearest_angle(theta: f64, reference: f64) -> f64 {
    let mut t = theta + TAU * ((reference - theta) / TAU).round();
    while t - reference > std::f64::consts::PI {
        t -= TAU;
    }
    while reference - t > std::f64::consts::PI {
        t += TAU;
    }
    t
}

/// Intersect a set of angular intervals with the constraint arc
/// `[clo, chi]` (interpreted mod 2*pi).
fn clip_intervals(intervals: &[(f64, f64)], clo: f64, chi: f64) -> Vec<(f64, f64)> {
    let width = chi - clo;
    debug_assert!(width >= 0.0 && width <= TAU + 1e-12);
    let mut out = Vec::new();
    for &(lo, hi) in intervals {
        // Try the constraint shifted to overlap [lo, hi].
        for k in -1..=2 {
            let c0 = clo + k as f64 * TAU;
            let c1 = c0 + width;
            let a = lo.max(c0);
            let b = hi.min(c1);
            if b - a > 1e-15 {
                out.push((a, b));
            }
        }
    }
    // Merge exact duplicates from the shift enumeration.
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-14 && (a.1 - b.1).abs() < 1e-14);
    out
}

/// Support point of the core in direction `-dir` (the center minimizing
/// `<c, dir>`), via golden-section search over the core boundary rays from
/// an interior point.
fn extremal_center(anchors: &[Vec2], core_center: Vec2, r: f64, dir: Vec2) -> Vec2 {
    // Boundary point of the core along the ray from the interior point:
    // largest step s with max_j |c0 + s e - q_j| <= r.
    let reach = |e: Vec2| -> f64 {
        let mut s_max = f64::INFINITY;
        for &q in anchors {
            let d = q - core_center;
            let de = d.dot(e);
            let dp_sq = (d.norm_sq() - de * de).max(0.0);
            let root = (r * r - dp_sq).max(0.0).sqrt();
            s_max = s_max.min(de + root);
        }
        s_max.max(0.0)
    };
    let objective = |phi: f64| -> (f64, Vec2) {
        let e = Vec2::from_angle(phi);
        let c = core_center + e * reach(e);
        (c.dot(dir), c)
    };

    // The minimum of a linear functional over the convex core boundary lies
    // near the -dir ray; the objective is unimodal on a bracket that
    // contains the minimum but not the maximum.
    let phi_center = (-dir).angle();
    let mut lo = phi_center - 0.5 * std::f64::consts::PI - 0.1;
    let mut hi = phi_center + 0.5 * std::f64::consts::PI + 0.1;
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    for _ in 0..70 {
        if f1.0 <= f2.0 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        }
    }
    if f1.0 <= f2.0 {
        f1.1
    } else {
        f2.1
    }
}

/// Angular contact window against the ambient circle: boundary samples whose
/// distance from the circle of radius `r_hat` is below `delta`, reported as
/// the (min, max) polar angle and the largest angular gap between
/// consecutive contact samples.
pub fn contact_trace(body: &Body2D, r_hat: f64, delta: f64, samples: usize) -> Option<(f64, f64, f64)> {
    let mut angles: Vec<f64> = body
        .boundary_samples_even(samples)
        .into_iter()
        .filter(|p| (r_hat - p.norm()).abs() <= delta)
        .map(|p| geom::wrap_angle(p.angle()))
        .collect();
    if angles.is_empty() {
        return None;
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut max_gap = 0.0f64;
    for w in angles.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    Some((angles[0], *angles.last().unwrap(), max_gap))
}

/// Contact-distance threshold matched to the sampled-family circumscription:
/// the computed boundary hugs the ambient circle within about an eighth of
/// `(2 pi R / m)^2 (k - t)`, and departs quadratically past the opening
/// endpoints, so half of that window separates the two regimes.
pub fn contact_delta(m: usize, r_hat: f64, k: f64, t: f64) -> f64 {
    let l = TAU * r_hat / m as f64;
    (0.5 * l * l * (k - t)).max(1e-12)
}
