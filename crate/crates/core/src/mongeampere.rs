//! Monotone wide-stencil solver for the free surface in ambient dimension 3.
//!
//! The free hypersurface over the rim disk is the graph of a convex function
//! `v` (the sign-flipped chart `v = -u`, so the dome `u` bulges upward)
//! solving `det D^2 v = t (1 + |grad v|^2)^2` with Dirichlet data on the rim
//! circle and the ambient ball as a lower obstacle for `v`. The operator is
//! discretized as a minimum over orthogonal direction pairs of products of
//! clamped directional second differences; each nodal Gauss-Seidel update
//! solves the per-pair scalar quadratic exactly and takes the smaller root,
//! which keeps both factors nonnegative and the scheme monotone. Arms that
//! cross the rim are shortened to the exact boundary distance.

use crate::bodies::Scenario;
use std::f64::consts::TAU;
use std::fmt::Write as _;
use thiserror::Error;

/// Convexity clamp for the directional second differences.
pub const CONVEXITY_CLAMP: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum PatchError {
    #[error("grid spacing {h} too coarse for rim radius {rho} (need h <= rho/8)")]
    GridTooCoarse { h: f64, rho: f64 },
    #[error("scenario must be three-dimensional")]
    WrongDimension,
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("no convergence after {sweeps} sweeps (last residual {last:.3e})")]
    NonConvergence {
        sweeps: usize,
        last: f64,
        history: Vec<f64>,
    },
}

/// Orthogonal grid-direction pairs with their integer offsets.
#[derive(Clone, Debug)]
pub struct StencilSet {
    pairs: Vec<[[i32; 2]; 2]>,
}

impl StencilSet {
    /// Width 1: axes and diagonals. Width 2 adds the two knight-like
    /// orthogonal pairs; wider sets refine the directional resolution.
    pub fn width(w: usize) -> Self {
        assert!(w >= 1, "stencil width must be at least 1");
        let mut pairs = vec![[[1, 0], [0, 1]], [[1, 1], [-1, 1]]];
        if w >= 2 {
            pairs.push([[2, 1], [-1, 2]]);
            pairs.push([[1, 2], [-2, 1]]);
        }
        if w >= 3 {
            pairs.push([[3, 1], [-1, 3]]);
            pairs.push([[1, 3], [-3, 1]]);
            pairs.push([[3, 2], [-2, 3]]);
            pairs.push([[2, 3], [-3, 2]]);
        }
        for p in &pairs {
            debug_assert_eq!(p[0][0] * p[1][0] + p[0][1] * p[1][1], 0);
        }
        StencilSet { pairs }
    }

    pub fn pairs(&self) -> &[[[i32; 2]; 2]] {
        &self.pairs
    }
}

/// Dirichlet data on the rim circle, as a function of the polar angle.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryData {
    Constant(f64),
    /// `a0 + sum_k (a_k cos(k phi) + b_k sin(k phi))`.
    Fourier { a0: f64, terms: Vec<(usize, f64, f64)> },
}

impl BoundaryData {
    pub fn eval(&self, phi: f64) -> f64 {
        match self {
            BoundaryData::Constant(c) => *c,
            BoundaryData::Fourier { a0, terms } => {
                let mut v = *a0;
                for &(k, a, b) in terms {
                    v += a * (k as f64 * phi).cos() + b * (k as f64 * phi).sin();
                }
                v
            }
        }
    }

    fn min_on_circle(&self) -> f64 {
        (0..720)
            .map(|i| self.eval(TAU * i as f64 / 720.0))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum NodeKind {
    Interior,
    Ghost,
}

/// Scalar grid function over the rim disk: the solver's working chart.
#[derive(Clone, Debug)]
pub struct GraphPatch {
    h: f64,
    half: i32,
    rho: f64,
    values: Vec<f64>,
    kind: Vec<NodeKind>,
    boundary: BoundaryData,
    /// Lower bound on `v` from the ambient ball (`u` may not exceed the
    /// sphere height).
    obstacle: Vec<f64>,
    /// Scenario data carried along for comparisons and exports.
    pub ball_radius: f64,
    pub lid_height: f64,
    pub t: f64,
}

/// One reach of a second-difference stencil arm.
#[derive(Clone, Copy, Debug)]
enum Arm {
    Node { idx: usize, tau: f64 },
    Rim { value: f64, tau: f64 },
}

impl GraphPatch {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn half_span(&self) -> i32 {
        self.half
    }

    pub fn n_per_side(&self) -> usize {
        (2 * self.half + 1) as usize
    }

    fn idx(&self, i: i32, j: i32) -> usize {
        let n = self.n_per_side() as i32;
        ((i + self.half) * n + (j + self.half)) as usize
    }

    pub fn coord(&self, i: i32, j: i32) -> (f64, f64) {
        (i as f64 * self.h, j as f64 * self.h)
    }

    pub fn is_interior(&self, i: i32, j: i32) -> bool {
        if i.abs() > self.half || j.abs() > self.half {
            return false;
        }
        self.kind[self.idx(i, j)] == NodeKind::Interior
    }

    pub fn value(&self, i: i32, j: i32) -> f64 {
        self.values[self.idx(i, j)]
    }

    pub fn set_value(&mut self, i: i32, j: i32, v: f64) {
        let idx = self.idx(i, j);
        self.values[idx] = v;
    }

    pub fn boundary_value(&self, phi: f64) -> f64 {
        self.boundary.eval(phi)
    }

    pub fn interior_nodes(&self) -> Vec<(i32, i32)> {
        let mut out = Vec::new();
        for i in -self.half..=self.half {
            for j in -self.half..=self.half {
                if self.is_interior(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Stencil arm from node `(i, j)` along offset `e`: the neighbor when it
    /// is interior, otherwise the exact rim crossing with its Dirichlet
    /// value and shortened step.
    fn arm(&self, i: i32, j: i32, e: [i32; 2]) -> Arm {
        let (ni, nj) = (i + e[0], j + e[1]);
        let tau_full = self.h * ((e[0] * e[0] + e[1] * e[1]) as f64).sqrt();
        if self.is_interior(ni, nj) {
            return Arm::Node { idx: self.idx(ni, nj), tau: tau_full };
        }
        // Exact crossing of the segment with the rim circle:
        // |x + sigma * h * e|^2 = rho^2, sigma in (0, 1].
        let (x, y) = self.coord(i, j);
        let (dx, dy) = (e[0] as f64 * self.h, e[1] as f64 * self.h);
        let a = dx * dx + dy * dy;
        let b = 2.0 * (x * dx + y * dy);
        let c = x * x + y * y - self.rho * self.rho;
        let disc = (b * b - 4.0 * a * c).max(0.0);
        let sigma = ((-b + disc.sqrt()) / (2.0 * a)).clamp(1e-9, 1.0);
        let (cx, cy) = (x + sigma * dx, y + sigma * dy);
        Arm::Rim {
            value: self.boundary.eval(cy.atan2(cx)),
            tau: sigma * tau_full,
        }
    }

    fn arm_value(&self, arm: &Arm) -> (f64, f64) {
        match *arm {
            Arm::Node { idx, tau } => (self.values[idx], tau),
            Arm::Rim { value, tau } => (value, tau),
        }
    }

    /// Directional second difference along `e` at an interior node, with
    /// shortened one-sided arms at the rim.
    pub fn second_difference(&self, i: i32, j: i32, e: [i32; 2]) -> f64 {
        let (vp, tp) = self.arm_value(&self.arm(i, j, e));
        let (vm, tm) = self.arm_value(&self.arm(i, j, [-e[0], -e[1]]));
        let v0 = self.value(i, j);
        2.0 * ((vp - v0) / tp + (vm - v0) / tm) / (tp + tm)
    }

    /// Lagged gradient at an interior node from axis arms (second-order on
    /// unequal arm lengths).
    pub fn gradient(&self, i: i32, j: i32) -> [f64; 2] {
        let mut g = [0.0; 2];
        for (axis, e) in [[1, 0], [0, 1]].into_iter().enumerate() {
            let (vp, tp) = self.arm_value(&self.arm(i, j, e));
            let (vm, tm) = self.arm_value(&self.arm(i, j, [-e[0], -e[1]]));
            let v0 = self.value(i, j);
            g[axis] = (tm * tm * vp - tp * tp * vm + (tp * tp - tm * tm) * v0)
                / (tp * tm * (tp + tm));
        }
        g
    }

    /// Height field CSV `(x, y, v)` over the interior nodes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,v\n");
        for (i, j) in self.interior_nodes() {
            let (x, y) = self.coord(i, j);
            writeln!(out, "{:.17e},{:.17e},{:.17e}", x, y, self.value(i, j)).unwrap();
        }
        out
    }

    /// Wavefront OBJ mesh of the dome `u = -v` (vertices and faces over grid
    /// cells whose four corners are interior).
    pub fn to_obj(&self) -> String {
        let mut out = String::new();
        let mut vertex_id = vec![0usize; self.values.len()];
        let mut next = 1usize;
        for (i, j) in self.interior_nodes() {
            let (x, y) = self.coord(i, j);
            writeln!(out, "v {:.12} {:.12} {:.12}", x, y, -self.value(i, j)).unwrap();
            vertex_id[self.idx(i, j)] = next;
            next += 1;
        }
        for i in -self.half..self.half {
            for j in -self.half..self.half {
                let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
                if corners.iter().all(|&(a, b)| self.is_interior(a, b)) {
                    let v: Vec<usize> = corners
                        .iter()
                        .map(|&(a, b)| vertex_id[self.idx(a, b)])
                        .collect();
                    writeln!(out, "f {} {} {}", v[0], v[1], v[2]).unwrap();
                    writeln!(out, "f {} {} {}", v[0], v[2], v[3]).unwrap();
                }
            }
        }
        out
    }

    /// Graph slice along the grid row `j`: abscissas and dome heights
    /// `u = -v`, for the probe engine.
    pub fn slice_y(&self, j: i32) -> (Vec<f64>, Vec<f64>) {
        let mut xs = Vec::new();
        let mut us = Vec::new();
        for i in -self.half..=self.half {
            if self.is_interior(i, j) {
                xs.push(self.coord(i, j).0);
                us.push(-self.value(i, j));
            }
        }
        (xs, us)
    }

    pub fn obstacle_at(&self, i: i32, j: i32) -> f64 {
        self.obstacle[self.idx(i, j)]
    }
}

/// Build the working patch for a 3D scenario: grid over the rim disk with
/// spacing `h`, Dirichlet data `-z0` on the rim, the ambient sphere as a
/// lower obstacle and a steep interpolating cone as the initial iterate.
pub fn build_patch(s: &Scenario, h: f64) -> Result<GraphPatch, PatchError> {
    let Scenario::ThreeD { radius, z0, t } = *s else {
        return Err(PatchError::WrongDimension);
    };
    let rho = s.rim_radius().expect("3D scenario has a rim");
    build_patch_with(radius, z0, t, rho, h, BoundaryData::Constant(-z0))
}

/// Patch with explicit boundary data (used by the comparison audits).
pub fn build_patch_with(
    radius: f64,
    z0: f64,
    t: f64,
    rho: f64,
    h: f64,
    boundary: BoundaryData,
) -> Result<GraphPatch, PatchError> {
    if h > rho / 8.0 {
        return Err(PatchError::GridTooCoarse { h, rho });
    }
    let half = (rho / h).ceil() as i32;
    let n = (2 * half + 1) as usize;
    let mut kind = vec![NodeKind::Ghost; n * n];
    let mut values = vec![0.0; n * n];
    let mut obstacle = vec![f64::NEG_INFINITY; n * n];

    // Initial iterate: a cone below any admissible solution. The slope
    // dominates the cap-graph rim slope; the apex sits below the deepest
    // dome the data can produce.
    let g_min = boundary.min_on_circle();
    let rim_slope = rho * t.sqrt() / (1.0 - t * rho * rho).max(1e-9).sqrt();
    let slope = (2.0 * rim_slope).max(1.0);

    let mut patch = GraphPatch {
        h,
        half,
        rho,
        values: values.clone(),
        kind: kind.clone(),
        boundary: boundary.clone(),
        obstacle: obstacle.clone(),
        ball_radius: radius,
        lid_height: z0,
        t,
    };
    for i in -half..=half {
        for j in -half..=half {
            let (x, y) = patch.coord(i, j);
            let rr = x * x + y * y;
            let idx = patch.idx(i, j);
            if rr < rho * rho * (1.0 - 1e-12) {
                kind[idx] = NodeKind::Interior;
                values[idx] = g_min - slope * (rho - rr.sqrt());
                // u <= sphere height  <=>  v >= -sqrt(R^2 - |x|^2).
                obstacle[idx] = -(radius * radius - rr).sqrt();
            } else {
                // Ghost nodes carry the Dirichlet data exactly (display and
                // audits only; the solver uses exact rim crossings).
                values[idx] = boundary.eval(y.atan2(x));
                obstacle[idx] = f64::NEG_INFINITY;
            }
        }
    }
    patch.kind = kind;
    patch.obstacle = obstacle;
    patch.values = values;
    // Project the start onto the obstacle.
    for (i, j) in patch.interior_nodes() {
        let idx = patch.idx(i, j);
        if patch.values[idx] < patch.obstacle[idx] {
            patch.values[idx] = patch.obstacle[idx];
        }
    }
    Ok(patch)
}

/// Wide-stencil operator residual at an interior node:
/// `min over pairs of prod_j max(second difference, clamp) - t (1 + |grad|^2)^2`,
/// with the gradient lagged from the previous sweep.
pub fn ma_residual_at(
    patch: &GraphPatch,
    node: (i32, i32),
    stencil: &StencilSet,
    grad: [f64; 2],
    t: f64,
) -> f64 {
    let (i, j) = node;
    debug_assert!(patch.is_interior(i, j), "operator only defined at interior nodes");
    let rhs = t * (1.0 + grad[0] * grad[0] + grad[1] * grad[1]).powi(2);
    let mut min_product = f64::INFINITY;
    for pair in stencil.pairs() {
        let mut product = 1.0;
        for e in pair {
            product *= patch.second_difference(i, j, *e).max(CONVEXITY_CLAMP);
        }
        if product < min_product {
            min_product = product;
        }
    }
    min_product - rhs
}

/// Per-node cached arms for the sweep inner loop.
struct NodeCache {
    node: (i32, i32),
    idx: usize,
    obstacle: f64,
    /// Per pair: two directions, each with (plus arm, minus arm).
    pairs: Vec<[[Arm; 2]; 2]>,
}

fn build_cache(patch: &GraphPatch, stencil: &StencilSet) -> Vec<NodeCache> {
    patch
        .interior_nodes()
        .into_iter()
        .map(|(i, j)| {
            let pairs = stencil
                .pairs()
                .iter()
                .map(|pair| {
                    [
                        [patch.arm(i, j, pair[0]), patch.arm(i, j, [-pair[0][0], -pair[0][1]])],
                        [patch.arm(i, j, pair[1]), patch.arm(i, j, [-pair[1][0], -pair[1][1]])],
                    ]
                })
                .collect();
            NodeCache {
                node: (i, j),
                idx: patch.idx(i, j),
                obstacle: patch.obstacle_at(i, j),
                pairs,
            }
        })
        .collect()
}

fn arm_read(values: &[f64], arm: &Arm) -> (f64, f64) {
    match *arm {
        Arm::Node { idx, tau } => (values[idx], tau),
        Arm::Rim { value, tau } => (value, tau),
    }
}

/// Linear form of the second difference in the unknown center value:
/// `delta2(x) = a - b x`.
fn diff_coeffs(values: &[f64], arms: &[Arm; 2]) -> (f64, f64) {
    let (vp, tp) = arm_read(values, &arms[0]);
    let (vm, tm) = arm_read(values, &arms[1]);
    let a = 2.0 * (vp / tp + vm / tm) / (tp + tm);
    let b = 2.0 * (1.0 / tp + 1.0 / tm) / (tp + tm);
    (a, b)
}

/// Smaller root of `(a1 - b1 x)(a2 - b2 x) = rhs`; both factors stay
/// positive there, so the clamped scheme is exact at the root.
fn pair_root(a1: f64, b1: f64, a2: f64, b2: f64, rhs: f64) -> f64 {
    // b1 b2 x^2 - (a1 b2 + a2 b1) x + a1 a2 - rhs = 0, discriminant
    // (a1 b2 - a2 b1)^2 + 4 b1 b2 rhs > 0.
    let qa = b1 * b2;
    let qb = -(a1 * b2 + a2 * b1);
    let qc = a1 * a2 - rhs;
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
    let q = -0.5 * (qb + qb.signum() * disc);
    let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / qa, qc / q) };
    r1.min(r2)
}

/// Nonlinear Gauss-Seidel with obstacle projection. Returns the per-sweep
/// max-norm residual history; the patch holds the solution on success.
///
/// The recorded residual treats obstacle contact by complementarity: where
/// the value sits on the obstacle a negative operator residual is admissible
/// and counts as zero.
pub fn solve(
    patch: &mut GraphPatch,
    t: f64,
    stencil: &StencilSet,
    tol: f64,
    max_sweeps: usize,
) -> Result<Vec<f64>, SolveError> {
    assert!(tol > 0.0);
    let cache = build_cache(patch, stencil);
    let mut history = Vec::new();
    for _sweep in 0..max_sweeps {
        // Lagged gradient, refreshed once per sweep.
        let grads: Vec<[f64; 2]> = cache
            .iter()
            .map(|nc| patch.gradient(nc.node.0, nc.node.1))
            .collect();
        for (nc, grad) in cache.iter().zip(&grads) {
            let rhs = t * (1.0 + grad[0] * grad[0] + grad[1] * grad[1]).powi(2);
            let mut best = f64::INFINITY;
            for pair in &nc.pairs {
                let (a1, b1) = diff_coeffs(&patch.values, &pair[0]);
                let (a2, b2) = diff_coeffs(&patch.values, &pair[1]);
                let root = pair_root(a1, b1, a2, b2, rhs);
                if root < best {
                    best = root;
                }
            }
            patch.values[nc.idx] = best.max(nc.obstacle);
        }
        // Residual with the gradient the sweep just used.
        let mut sup = 0.0f64;
        for (nc, grad) in cache.iter().zip(&grads) {
            let rhs = t * (1.0 + grad[0] * grad[0] + grad[1] * grad[1]).powi(2);
            let mut min_product = f64::INFINITY;
            for pair in &nc.pairs {
                let (a1, b1) = diff_coeffs(&patch.values, &pair[0]);
                let (a2, b2) = diff_coeffs(&patch.values, &pair[1]);
                let v0 = patch.values[nc.idx];
                let product =
                    (a1 - b1 * v0).max(CONVEXITY_CLAMP) * (a2 - b2 * v0).max(CONVEXITY_CLAMP);
                if product < min_product {
                    min_product = product;
                }
            }
            let raw = min_product - rhs;
            let contact = patch.values[nc.idx] <= nc.obstacle + 1e-12;
            let eff = if contact { raw.max(0.0) } else { raw.abs() };
            sup = sup.max(eff);
        }
        history.push(sup);
        if sup <= tol {
            return Ok(history);
        }
    }
    let last = *history.last().unwrap();
    Err(SolveError::NonConvergence {
        sweeps: max_sweeps,
        last,
        history,
    })
}

/// Pointwise comparison of the dome `u = -v` against the exact spherical cap
/// for cap-benchmark scenarios: returns the max interior error and the error
/// grid as `(i, j, error)` records.
pub fn compare_to_cap(patch: &GraphPatch, s: &Scenario) -> (f64, Vec<(i32, i32, f64)>) {
    let Scenario::ThreeD { radius: _, z0, t } = *s else {
        panic!("cap comparison requires a 3D scenario");
    };
    let r = 1.0 / t.sqrt();
    let rho = patch.rho();
    let mut grid = Vec::new();
    let mut max_err = 0.0f64;
    for (i, j) in patch.interior_nodes() {
        let (x, y) = patch.coord(i, j);
        let u_cap = z0 - (r * r - rho * rho).sqrt() + (r * r - x * x - y * y).sqrt();
        let err = (-patch.value(i, j) - u_cap).abs();
        max_err = max_err.max(err);
        grid.push((i, j, err));
    }
    (max_err, grid)
}

/// Exact dome apex height for the cap benchmark:
/// `u(0) = z0 - sqrt(r^2 - rho^2) + r` with `r = 1/sqrt(t)`.
pub fn cap_apex(s: &Scenario) -> f64 {
    let Scenario::ThreeD { z0, t, .. } = *s else {
        panic!("cap apex requires a 3D scenario");
    };
    let r = 1.0 / t.sqrt();
    let rho = s.rim_radius().unwrap();
    z0 - (r * r - rho * rho).sqrt() + r
}

/// Parse a height-field CSV `(x, y, v)` back into slice data grouped by `y`
/// (for verification of stored solutions).
pub fn parse_csv_slices(text: &str) -> Result<Vec<(f64, Vec<(f64, f64)>)>, PatchError> {
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('x') || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(PatchError::Parse {
                line: lineno + 1,
                msg: format!("expected 3 comma-separated values, got {line:?}"),
            });
        }
        let mut nums = [0.0; 3];
        for (k, f) in fields.iter().enumerate() {
            nums[k] = f.trim().parse::<f64>().map_err(|e| PatchError::Parse {
                line: lineno + 1,
                msg: format!("bad number {f:?}: {e}"),
            })?;
        }
        rows.push((nums[0], nums[1], nums[2]));
    }
    rows.sort_by(|a, b| (a.1, a.0).partial_cmp(&(b.1, b.0)).unwrap());
    let mut slices: Vec<(f64, Vec<(f64, f64)>)> = Vec::new();
    for (x, y, v) in rows {
        match slices.last_mut() {
            Some((sy, pts)) if (*sy - y).abs() < 1e-14 => pts.push((x, v)),
            _ => slices.push((y, vec![(x, v)])),
        }
    }
    Ok(slices)
}
