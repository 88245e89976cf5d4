//! Viscosity verifier: searches for quadratic touching functions that
//! witness the failure of the curvature conditions.
//!
//! A body fails the interior condition at threshold `t` exactly when some
//! smooth function touches the boundary from inside with reduced Hessian
//! outside the cone; the dual condition reverses orientation. Quantifying
//! over all smooth touching functions is not computable, so the verifier
//! searches a sampled family of paraboloid probes and reports a violation
//! only when a probe demonstrably fits (every sample of the probe region
//! boundary strictly on the required side by `1e-9`). Empty reports mean "no
//! witness found at margin epsilon", never a proof; the tested/tried
//! counters make the search extent explicit.

use crate::bodies::Body2D;
use crate::geom::{self, Vec2};
use crate::symcone::SymMat;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ProbeError {
    #[error("probe gradient must be nonzero")]
    ZeroGradient,
    #[error("probe dimension must be 2 or 3, got {0}")]
    InvalidDimension(usize),
}

/// A quadratic test function `f(x) = <a, x-p> + (1/2) <Q(x-p), x-p>`
/// considered on the ball `B(p, r_test)`.
#[derive(Clone, Debug)]
pub struct Probe {
    /// Base (touching) point, length = ambient dimension.
    pub base: Vec<f64>,
    /// Gradient at the base point; nonzero.
    pub grad: Vec<f64>,
    /// Quadratic part (the Hessian of `f`).
    pub quad: SymMat,
    /// Radius of the test ball.
    pub r_test: f64,
}

/// Shape operator of the level set of the probe with respect to the normal
/// aligned with the gradient: the Hessian restricted to an orthonormal basis
/// of `grad`-perp, divided by `|grad|`. The basis choice only moves the
/// result by orthogonal conjugation.
pub fn reduced_shape(probe: &Probe) -> Result<SymMat, ProbeError> {
    let d = probe.grad.len();
    if d != probe.quad.dim() || d != probe.base.len() {
        return Err(ProbeError::InvalidDimension(d));
    }
    let norm: f64 = probe.grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    if norm <= 0.0 {
        return Err(ProbeError::ZeroGradient);
    }
    let unit: Vec<f64> = probe.grad.iter().map(|g| g / norm).collect();
    match d {
        2 => {
            let tau = [-unit[1], unit[0]];
            let q_tau = probe.quad.apply(&tau);
            let val = (tau[0] * q_tau[0] + tau[1] * q_tau[1]) / norm;
            Ok(SymMat::scalar(val))
        }
        3 => {
            // Orthonormal basis of the plane orthogonal to the gradient.
            let seed = if unit[0].abs() <= unit[1].abs() && unit[0].abs() <= unit[2].abs() {
                [1.0, 0.0, 0.0]
            } else if unit[1].abs() <= unit[2].abs() {
                [0.0, 1.0, 0.0]
            } else {
                [0.0, 0.0, 1.0]
            };
            let dot: f64 = seed.iter().zip(&unit).map(|(s, u)| s * u).sum();
            let mut e1 = [0.0f64; 3];
            for i in 0..3 {
                e1[i] = seed[i] - dot * unit[i];
            }
            let n1 = e1.iter().map(|x| x * x).sum::<f64>().sqrt();
            for v in e1.iter_mut() {
                *v /= n1;
            }
            let e2 = [
                unit[1] * e1[2] - unit[2] * e1[1],
                unit[2] * e1[0] - unit[0] * e1[2],
                unit[0] * e1[1] - unit[1] * e1[0],
            ];
            let q1 = probe.quad.apply(&e1);
            let q2 = probe.quad.apply(&e2);
            let b11: f64 = e1.iter().zip(&q1).map(|(a, b)| a * b).sum();
            let b12: f64 = e1.iter().zip(&q2).map(|(a, b)| a * b).sum();
            let b22: f64 = e2.iter().zip(&q2).map(|(a, b)| a * b).sum();
            SymMat::from_upper(2, &[b11 / norm, b12 / norm, b22 / norm])
                .map_err(|_| ProbeError::InvalidDimension(d))
        }
        d => Err(ProbeError::InvalidDimension(d)),
    }
}

/// How densely boundaries and probe families are sampled.
#[derive(Clone, Copy, Debug)]
pub struct SamplingSpec {
    /// Boundary sample points per piece (smooth sites).
    pub samples_per_piece: usize,
    /// Probe normals spread across the normal cone at each vertex.
    pub vertex_normals: usize,
    /// Geometric curvature samples in `[eps/4, 4/eps]`.
    pub curvature_samples: usize,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec {
            samples_per_piece: 64,
            vertex_normals: 5,
            curvature_samples: 32,
        }
    }
}

/// A boundary point together with the probe normals to try there.
#[derive(Clone, Debug)]
pub struct Site {
    pub point: Vec2,
    pub normals: Vec<Vec2>,
    /// Sort key along the boundary (piece index + parameter, or abscissa).
    pub param: f64,
}

/// A closed planar region the probe engine can interrogate.
pub trait ProbeTarget {
    fn sites(&self, spec: &SamplingSpec) -> Vec<Site>;
    /// Signed distance: negative inside, positive outside.
    fn signed_distance(&self, p: Vec2) -> f64;
    /// Characteristic length of the region.
    fn scale(&self) -> f64;
    /// Largest admissible test radius at a site (data-range limits).
    fn max_probe_radius(&self, _site: &Site) -> f64 {
        f64::INFINITY
    }
}

impl ProbeTarget for Body2D {
    fn sites(&self, spec: &SamplingSpec) -> Vec<Site> {
        let mut sites = Vec::new();
        let n = self.pieces().len();
        for (i, piece) in self.pieces().iter().enumerate() {
            for j in 0..spec.samples_per_piece {
                let s = (j as f64 + 0.5) / spec.samples_per_piece as f64;
                sites.push(Site {
                    point: piece.point_at(s),
                    normals: vec![piece.outward_normal_at(s)],
                    param: i as f64 + s,
                });
            }
            // Vertex between piece i and its successor: fan of normals
            // across the normal cone.
            let next = &self.pieces()[(i + 1) % n];
            let n_in = piece.outward_normal_at(1.0);
            let n_out = next.outward_normal_at(0.0);
            let turn = geom::turn_angle(n_in, n_out);
            if turn > 1e-9 {
                let fan = spec.vertex_normals.max(2);
                let normals = (0..fan)
                    .map(|k| {
                        let a = n_in.angle() + turn * k as f64 / (fan - 1) as f64;
                        Vec2::from_angle(a)
                    })
                    .collect();
                sites.push(Site {
                    point: piece.end(),
                    normals,
                    param: i as f64 + 1.0,
                });
            }
        }
        sites
    }

    fn signed_distance(&self, p: Vec2) -> f64 {
        Body2D::signed_distance(self, p)
    }

    fn scale(&self) -> f64 {
        self.circumscribed_radius()
    }
}

/// A graph slice probed through its hypograph `{(x, z) : z <= u(x)}`.
/// Sites are the graph points, normals come from centered differences.
#[derive(Clone, Debug)]
pub struct SliceHypograph {
    xs: Vec<f64>,
    us: Vec<f64>,
    /// Sites dropped at each end of the slice (rim exclusion).
    trim: usize,
}

impl SliceHypograph {
    pub fn new(xs: Vec<f64>, us: Vec<f64>, trim: usize) -> Self {
        assert_eq!(xs.len(), us.len());
        assert!(xs.len() >= 5, "slice needs at least 5 samples");
        SliceHypograph { xs, us, trim }
    }

    fn interp(&self, x: f64) -> Option<f64> {
        let (x0, x1) = (self.xs[0], *self.xs.last().unwrap());
        if x < x0 || x > x1 {
            return None;
        }
        let h = (x1 - x0) / (self.xs.len() - 1) as f64;
        let idx = (((x - x0) / h).floor() as usize).min(self.xs.len() - 2);
        let frac = (x - self.xs[idx]) / h;
        Some(self.us[idx] * (1.0 - frac) + self.us[idx + 1] * frac)
    }
}

impl ProbeTarget for SliceHypograph {
    fn sites(&self, _spec: &SamplingSpec) -> Vec<Site> {
        // Both node and midpoint sites: against the piecewise-linear
        // interpolant, interior probes can only touch where the chain is
        // locally straight (segment midpoints) while exterior probes can
        // only touch at the convex kinks (nodes).
        let n = self.xs.len();
        let lo = self.trim.max(1);
        let hi = n - 1 - self.trim.max(1);
        let mut sites = Vec::new();
        for i in lo..=hi {
            let (im, ip) = (i - 1, i + 1);
            let slope = (self.us[ip] - self.us[im]) / (self.xs[ip] - self.xs[im]);
            let normal = Vec2::new(-slope, 1.0).normalized();
            sites.push(Site {
                point: Vec2::new(self.xs[i], self.us[i]),
                normals: vec![normal],
                param: self.xs[i],
            });
            if i < hi {
                let slope = (self.us[i + 1] - self.us[i]) / (self.xs[i + 1] - self.xs[i]);
                let normal = Vec2::new(-slope, 1.0).normalized();
                sites.push(Site {
                    point: Vec2::new(
                        0.5 * (self.xs[i] + self.xs[i + 1]),
                        0.5 * (self.us[i] + self.us[i + 1]),
                    ),
                    normals: vec![normal],
                    param: 0.5 * (self.xs[i] + self.xs[i + 1]),
                });
            }
        }
        sites
    }

    fn signed_distance(&self, p: Vec2) -> f64 {
        match self.interp(p.x) {
            // Vertical deviation: a length up to the bounded slope factor,
            // adequate for the strictness thresholds used here.
            Some(u) => p.y - u,
            None => f64::INFINITY, // outside the data range counts as outside
        }
    }

    fn scale(&self) -> f64 {
        0.5 * (self.xs.last().unwrap() - self.xs[0])
    }

    fn max_probe_radius(&self, site: &Site) -> f64 {
        let lo = site.point.x - self.xs[0];
        let hi = self.xs.last().unwrap() - site.point.x;
        0.9 * lo.min(hi)
    }
}

/// One fitting probe found by the search.
#[derive(Clone, Debug)]
pub struct Violation {
    pub point: Vec2,
    pub param: f64,
    pub normal: Vec2,
    /// Curvature of the fitting paraboloid probe.
    pub curvature: f64,
    /// Smallest clearance of the probe region boundary from the forbidden
    /// side; strictly positive by construction.
    pub margin: f64,
}

impl Violation {
    /// The full quadratic test function this violation corresponds to.
    pub fn probe(&self, r_test: f64) -> Probe {
        let tau = self.normal.rot90();
        let mut quad = SymMat::zero(2);
        quad.set(0, 0, self.curvature * tau.x * tau.x);
        quad.set(0, 1, self.curvature * tau.x * tau.y);
        quad.set(1, 1, self.curvature * tau.y * tau.y);
        Probe {
            base: vec![self.point.x, self.point.y],
            grad: vec![self.normal.x, self.normal.y],
            quad,
            r_test,
        }
    }
}

/// Outcome of a probe search over a boundary.
#[derive(Clone, Debug, Default)]
pub struct ProbeReport {
    pub violations: Vec<Violation>,
    pub points_tested: usize,
    pub probes_tried: usize,
}

impl ProbeReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    /// CSV rows `(x, y, param, probe curvature, margin)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,param,probe_curvature,margin\n");
        for v in &self.violations {
            writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                v.point.x, v.point.y, v.param, v.curvature, v.margin
            )
            .unwrap();
        }
        out
    }
}

/// Strictness of the sampled containment check.
const FIT_MARGIN: f64 = 1e-9;
const SURFACE_SAMPLES: usize = 192;
const RIM_SAMPLES: usize = 64;

#[derive(Clone, Copy, PartialEq)]
enum Orientation {
    /// Probe sublevel set must fit inside the body (interior condition).
    Interior,
    /// Probe superlevel set must fit in the complement closure (dual).
    Exterior,
}

/// Search for interior touching probes with reduced curvature in the
/// epsilon-interior of the cone complement (`kappa <= t - eps`). A violation
/// means the probe's sublevel region fits inside the target.
///
/// `site_filter` restricts the tested boundary points (e.g. to the interior
/// of the ambient ball).
pub fn check_type_f(
    target: &dyn ProbeTarget,
    t: f64,
    eps: f64,
    spec: &SamplingSpec,
    site_filter: Option<&dyn Fn(Vec2) -> bool>,
) -> ProbeReport {
    assert!(eps > 0.0, "margin must be positive");
    run_search(target, t, eps, spec, site_filter, Orientation::Interior)
}

/// Dual search: exterior touching probes with reduced curvature in the
/// epsilon-interior of the cone (`kappa >= t + eps`), region `{f >= 0}`
/// required to fit in the complement closure.
pub fn check_type_f_dual(
    target: &dyn ProbeTarget,
    t: f64,
    eps: f64,
    spec: &SamplingSpec,
    site_filter: Option<&dyn Fn(Vec2) -> bool>,
) -> ProbeReport {
    assert!(eps > 0.0, "margin must be positive");
    run_search(target, t, eps, spec, site_filter, Orientation::Exterior)
}

fn run_search(
    target: &dyn ProbeTarget,
    t: f64,
    eps: f64,
    spec: &SamplingSpec,
    site_filter: Option<&dyn Fn(Vec2) -> bool>,
    orientation: Orientation,
) -> ProbeReport {
    let scale = target.scale();
    let curvatures = probe_curvatures(t, eps, spec.curvature_samples, orientation);
    let mut report = ProbeReport::default();
    for site in target.sites(spec) {
        if let Some(filter) = site_filter {
            if !filter(site.point) {
                continue;
            }
        }
        report.points_tested += 1;
        let r_cap = target.max_probe_radius(&site);
        for &normal in &site.normals {
            for &kappa in &curvatures {
                let r_test = (0.2 * scale).min(0.5 / kappa.max(1e-12)).min(r_cap);
                if r_test <= 0.0 {
                    continue;
                }
                report.probes_tried += 1;
                if let Some(margin) = probe_fits(target, site.point, normal, kappa, r_test, orientation) {
                    report.violations.push(Violation {
                        point: site.point,
                        param: site.param,
                        normal,
                        curvature: kappa,
                        margin,
                    });
                    // One witness per site and normal is enough.
                    break;
                }
            }
        }
    }
    report
        .violations
        .sort_by(|a, b| a.param.partial_cmp(&b.param).unwrap());
    report
}

/// Curvature family: geometric samples in `[eps/4, 4/eps]` plus the exact
/// values `t -+ eps`, filtered by the orientation's admissibility.
fn probe_curvatures(t: f64, eps: f64, samples: usize, orientation: Orientation) -> Vec<f64> {
    let lo = 0.25 * eps;
    let hi = 4.0 / eps;
    let mut family: Vec<f64> = (0..samples)
        .map(|i| lo * (hi / lo).powf(i as f64 / (samples - 1) as f64))
        .collect();
    family.push(t - eps);
    family.push(t + eps);
    family.retain(|&k| match orientation {
        Orientation::Interior => k >= 0.0 && k <= t - eps + 1e-15,
        Orientation::Exterior => k >= t + eps - 1e-15,
    });
    family.sort_by(|a, b| a.partial_cmp(b).unwrap());
    family.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    family
}

/// Test whether the paraboloid probe with the given touching point, outward
/// normal and curvature fits on the required side. Returns the minimal
/// clearance if every sampled point of the probe region boundary clears the
/// strictness threshold, `None` otherwise.
fn probe_fits(
    target: &dyn ProbeTarget,
    p: Vec2,
    normal: Vec2,
    kappa: f64,
    r_test: f64,
    orientation: Orientation,
) -> Option<f64> {
    let tau = normal.rot90();
    let sign = match orientation {
        Orientation::Interior => -1.0, // samples must be strictly inside
        Orientation::Exterior => 1.0,  // samples must be strictly outside
    };
    let mut margin = f64::INFINITY;

    // Rim of the test ball on the probe-region side; usually decisive for
    // rejections, so test it first.
    for i in 0..RIM_SAMPLES {
        let phi = std::f64::consts::TAU * (i as f64 + 0.5) / RIM_SAMPLES as f64;
        let (c, s) = (phi.cos(), phi.sin());
        let f = r_test * s + 0.5 * kappa * r_test * r_test * c * c;
        let in_region = match orientation {
            Orientation::Interior => f <= 0.0,
            Orientation::Exterior => f >= 0.0,
        };
        if !in_region {
            continue;
        }
        let q = p + tau * (r_test * c) + normal * (r_test * s);
        let clearance = sign * target.signed_distance(q);
        if clearance < FIT_MARGIN {
            return None;
        }
        margin = margin.min(clearance);
    }

    // Level curve {f = 0} inside the ball: x(s) = p + s tau - (kappa/2) s^2 nu,
    // sampled symmetrically, skipping the touching point, outermost first for
    // early rejection.
    let s_max = level_extent(kappa, r_test);
    let half = SURFACE_SAMPLES / 2;
    for i in 0..SURFACE_SAMPLES {
        let j = half - i / 2; // descending half..1
        let mag = s_max * (j as f64 - 0.5) / half as f64;
        let s = if i % 2 == 0 { mag } else { -mag };
        let q = p + tau * s - normal * (0.5 * kappa * s * s);
        let clearance = sign * target.signed_distance(q);
        if clearance < FIT_MARGIN {
            return None;
        }
        margin = margin.min(clearance);
    }
    Some(margin)
}

/// Largest |s| with the level-curve point still inside the test ball:
/// solves s^2 + kappa^2 s^4 / 4 = r^2.
fn level_extent(kappa: f64, r: f64) -> f64 {
    if kappa.abs() < 1e-12 {
        return r;
    }
    let k2 = kappa * kappa;
    let w = 2.0 * ((1.0 + k2 * r * r).sqrt() - 1.0) / k2;
    w.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::Body2D;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reduced_shape_examples() {
        // f = y + (c/2) x^2 at the origin.
        let c = 3.7;
        let p = Probe {
            base: vec![0.0, 0.0],
            grad: vec![0.0, 1.0],
            quad: SymMat::diag(&[c, 0.0]),
            r_test: 1.0,
        };
        assert_relative_eq!(reduced_shape(&p).unwrap().get(0, 0), c);

        // f = 2y + x^2: the |grad| = 2 scaling.
        let p = Probe {
            base: vec![0.0, 0.0],
            grad: vec![0.0, 2.0],
            quad: SymMat::diag(&[2.0, 0.0]),
            r_test: 1.0,
        };
        assert_relative_eq!(reduced_shape(&p).unwrap().get(0, 0), 1.0);

        // Axis-aligned restriction in dimension 3.
        let p = Probe {
            base: vec![0.0, 0.0, 0.0],
            grad: vec![0.0, 0.0, 1.0],
            quad: SymMat::diag(&[1.25, -0.5, 0.0]),
            r_test: 1.0,
        };
        let b = reduced_shape(&p).unwrap();
        let eigs = b.eigenvalues();
        assert_relative_eq!(eigs[0], -0.5, epsilon = 1e-12);
        assert_relative_eq!(eigs[1], 1.25, epsilon = 1e-12);

        let zero_grad = Probe {
            base: vec![0.0, 0.0],
            grad: vec![0.0, 0.0],
            quad: SymMat::zero(2),
            r_test: 1.0,
        };
        assert_eq!(reduced_shape(&zero_grad), Err(ProbeError::ZeroGradient));
    }

    #[test]
    fn reduced_shape_conjugation_invariance() {
        // Rotating the ambient frame must leave the reduced eigenvalues
        // unchanged; all downstream cone tests only see those.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let grad: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if grad.iter().map(|g| g * g).sum::<f64>() < 1e-4 {
                continue;
            }
            let quad = crate::symcone::random_sym(3, &mut rng);
            let probe = Probe {
                base: vec![0.0; 3],
                grad: grad.clone(),
                quad,
                r_test: 1.0,
            };
            let m = crate::symcone::random_orthogonal(3, &mut rng);
            // Rotate gradient and Hessian: g' = M^T g, Q' = M^T Q M.
            let grad_rot: Vec<f64> = (0..3)
                .map(|i| (0..3).map(|k| m[k * 3 + i] * grad[k]).sum())
                .collect();
            let probe_rot = Probe {
                base: vec![0.0; 3],
                grad: grad_rot,
                quad: quad.conjugate(&m),
                r_test: 1.0,
            };
            let e1 = reduced_shape(&probe).unwrap().eigenvalues();
            let e2 = reduced_shape(&probe_rot).unwrap().eigenvalues();
            for (a, b) in e1.iter().zip(&e2) {
                assert_relative_eq!(a, b, epsilon = 1e-9, max_relative = 1e-9);
            }
        }
    }

    fn spec_small() -> SamplingSpec {
        SamplingSpec {
            samples_per_piece: 24,
            vertex_normals: 5,
            curvature_samples: 24,
        }
    }

    #[test]
    fn disk_interior_condition() {
        let disk = Body2D::disk(Vec2::ZERO, 1.0);
        // kappa = 1 >= t = 1: no admissible flat probe fits.
        let report = check_type_f(&disk, 1.0, 0.05, &spec_small(), None);
        assert!(report.is_empty(), "{} violations", report.violations.len());
        assert!(report.points_tested > 0 && report.probes_tried > 0);

        // t = 2: probes with curvature up to 1.95 fit inside a curvature-1
        // disk; every sampled point must be witnessed.
        let report = check_type_f(&disk, 2.0, 0.05, &spec_small(), None);
        assert_eq!(report.violations.len(), report.points_tested);
        for v in &report.violations {
            assert!(v.margin > 0.0);
            assert!(v.curvature <= 1.95 + 1e-12);
        }
    }

    #[test]
    fn square_flat_probes() {
        let sq = Body2D::square(1.0);
        for &t in &[0.5, 2.0] {
            let report = check_type_f(&sq, t, t / 2.0, &spec_small(), None);
            // Flat-ish probes fit along every edge; in particular each edge
            // midpoint is witnessed (sites close to a corner may not be,
            // since the probe ball then pokes past the corner).
            for edge in 0..4 {
                let mid = edge as f64 + 0.5;
                assert!(
                    report
                        .violations
                        .iter()
                        .any(|v| (v.param - mid).abs() < 0.3),
                    "edge {edge} midpoint not witnessed at t={t}"
                );
            }
            assert!(report.violations.len() >= 2 * spec_small().samples_per_piece);
        }
    }

    #[test]
    fn disk_dual_condition() {
        let disk = Body2D::disk(Vec2::ZERO, 1.0);
        // Exterior probes need curvature >= 1.05 but only curvature <= 1
        // stays outside a unit disk: empty.
        let report = check_type_f_dual(&disk, 1.0, 0.05, &spec_small(), None);
        assert!(report.is_empty());

        // t = 0.5: exterior probes with curvature in [0.55, 1) fit outside.
        let report = check_type_f_dual(&disk, 0.5, 0.05, &spec_small(), None);
        assert_eq!(report.violations.len(), report.points_tested);
    }

    #[test]
    fn one_sidedness() {
        // The admissible families are disjoint, so no probe can witness both
        // conditions at the same t and eps.
        let disk = Body2D::disk(Vec2::ZERO, 1.0);
        let (t, eps) = (0.75, 0.05);
        let f = check_type_f(&disk, t, eps, &spec_small(), None);
        let d = check_type_f_dual(&disk, t, eps, &spec_small(), None);
        for vf in &f.violations {
            assert!(vf.curvature <= t - eps + 1e-12);
        }
        for vd in &d.violations {
            assert!(vd.curvature >= t + eps - 1e-12);
        }
    }

    #[test]
    fn margin_monotonicity() {
        // Near-threshold disk: shrinking eps only adds violations.
        let disk = Body2D::disk(Vec2::ZERO, 1.0);
        let t = 1.08;
        let coarse = check_type_f(&disk, t, 0.1, &spec_small(), None);
        let fine = check_type_f(&disk, t, 0.05, &spec_small(), None);
        assert!(coarse.is_empty(), "no probe <= 0.98 fits a unit disk");
        assert!(!fine.is_empty(), "probes up to 1.03 do fit");
        // And where the coarse margin finds violations they persist:
        let t = 2.0;
        let coarse = check_type_f(&disk, t, 0.2, &spec_small(), None);
        let fine = check_type_f(&disk, t, 0.05, &spec_small(), None);
        let fine_params: Vec<f64> = fine.violations.iter().map(|v| v.param).collect();
        for v in &coarse.violations {
            assert!(
                fine_params.iter().any(|p| (p - v.param).abs() < 1e-12),
                "coarse violation at {} lost at smaller margin",
                v.param
            );
        }
    }

    #[test]
    fn agreement_with_smooth_check() {
        // Circles of radius r against thresholds t with |tr - 1| >= 2 eps:
        // the probe search is empty exactly when the smooth test passes.
        let eps = 0.05;
        for &(r, t) in &[(1.0, 0.5), (1.0, 1.5), (0.5, 1.0), (0.5, 3.0), (2.0, 0.3), (2.0, 0.7)] {
            assert!((t * r - 1.0f64).abs() >= 2.0 * eps);
            let disk = Body2D::disk(Vec2::ZERO, r);
            let report = check_type_f(&disk, t, eps, &spec_small(), None);
            let smooth = disk.is_type_f_smooth(t).unwrap();
            assert_eq!(report.is_empty(), smooth, "r={r} t={t}");
        }
    }

    #[test]
    fn corner_tolerance() {
        // Intersection of two curvature >= t disks: interior probes at the
        // corner exit through one of the faces, so no violation.
        let t = 1.0;
        let a = Body2D::disk(Vec2::new(-0.4, 0.0), 0.9);
        let b = Body2D::disk(Vec2::new(0.4, 0.0), 0.8);
        let lens = a.intersect(&b).unwrap();
        assert_eq!(lens.vertices().len(), 2);
        let report = check_type_f(&lens, t, 0.05, &spec_small(), None);
        assert!(
            report.is_empty(),
            "unexpected violations: {:?}",
            report.violations.first()
        );
    }

    #[test]
    fn slice_hypograph_target() {
        // Hypograph of a circular-arc graph of radius 2: curvature 1/2.
        let r = 2.0f64;
        let n = 201;
        let xs: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
        let us: Vec<f64> = xs.iter().map(|x| (r * r - x * x).sqrt() - r + 1.0).collect();
        let slice = SliceHypograph::new(xs, us, 5);
        let report = check_type_f(&slice, 0.5, 0.025, &spec_small(), None);
        assert!(report.is_empty(), "{:?}", report.violations.first());
        let report = check_type_f_dual(&slice, 0.5, 0.025, &spec_small(), None);
        assert!(report.is_empty(), "{:?}", report.violations.first());
        // Against a too-large threshold the interior test fires.
        let report = check_type_f(&slice, 1.0, 0.05, &spec_small(), None);
        assert!(!report.is_empty());
    }

    #[test]
    fn report_csv_shape() {
        let disk = Body2D::disk(Vec2::ZERO, 1.0);
        let report = check_type_f(&disk, 2.0, 0.05, &spec_small(), None);
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,y,param,probe_curvature,margin");
        assert_eq!(lines.len(), report.violations.len() + 1);
    }
}
