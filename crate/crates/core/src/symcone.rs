//! Symmetric-matrix cones and their randomized audits.
//!
//! The representable family is the positive-semidefinite cone `P`, the
//! determinant cone `F_t = { A in P : det A >= t }`, the closure of its
//! complement, and the dual cone `F~_t = -closure(F_t^c)`. Membership is
//! always tolerance-qualified and inclusive on the boundary, since all four
//! sets are closed. Two seeded audits check the defining algebra at scale:
//! `dirichlet_check` (stability under adding a PSD matrix) and
//! `invariance_check` (stability under orthogonal conjugation).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Default membership tolerance; boundary matrices resolve as members.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Off-diagonal threshold for the cyclic Jacobi sweep on 3x3 matrices.
const JACOBI_TOL: f64 = 1e-13;

#[derive(Debug, Error, PartialEq)]
pub enum ConeError {
    #[error("dimension mismatch: matrix is {matrix}x{matrix}, cone expects {cone}x{cone}")]
    DimensionMismatch { matrix: usize, cone: usize },
    #[error("sampling is only defined for PSD and DetCone kinds")]
    UnsupportedSampleKind,
    #[error("cone threshold must be positive, got {0}")]
    InvalidThreshold(f64),
    #[error("matrix dimension must be 1, 2 or 3, got {0}")]
    InvalidDimension(usize),
}

/// Dense symmetric matrix of dimension 1-3; only the upper triangle is
/// stored, so symmetry holds by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymMat {
    dim: usize,
    // Packed upper triangle, row-major: dim 2 -> [a11, a12, a22],
    // dim 3 -> [a11, a12, a13, a22, a23, a33].
    data: [f64; 6],
}

impl SymMat {
    pub fn from_upper(dim: usize, upper: &[f64]) -> Result<Self, ConeError> {
        if !(1..=3).contains(&dim) {
            return Err(ConeError::InvalidDimension(dim));
        }
        let len = dim * (dim + 1) / 2;
        assert_eq!(upper.len(), len, "upper triangle length must match dim");
        let mut data = [0.0; 6];
        data[..len].copy_from_slice(upper);
        Ok(SymMat { dim, data })
    }

    pub fn scalar(a: f64) -> Self {
        SymMat::from_upper(1, &[a]).unwrap()
    }

    pub fn diag(entries: &[f64]) -> Self {
        let dim = entries.len();
        let mut m = SymMat::zero(dim);
        for (i, &e) in entries.iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = SymMat::zero(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn zero(dim: usize) -> Self {
        assert!((1..=3).contains(&dim), "dimension must be 1, 2 or 3");
        SymMat { dim, data: [0.0; 6] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        // Offset of row r in the packed upper triangle.
        let row_start: usize = (0..r).map(|k| self.dim - k).sum();
        row_start + (c - r)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let idx = self.index(i, j);
        self.data[idx] = v;
    }

    pub fn add(&self, o: &SymMat) -> SymMat {
        assert_eq!(self.dim, o.dim);
        let mut r = *self;
        for k in 0..self.dim * (self.dim + 1) / 2 {
            r.data[k] += o.data[k];
        }
        r
    }

    pub fn neg(&self) -> SymMat {
        let mut r = *self;
        for v in r.data.iter_mut() {
            *v = -*v;
        }
        r
    }

    pub fn scale(&self, s: f64) -> SymMat {
        let mut r = *self;
        for v in r.data.iter_mut() {
            *v *= s;
        }
        r
    }

    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let v = self.get(i, j);
                s += v * v;
            }
        }
        s.sqrt()
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Conjugate by a dense dim x dim matrix: `M^T A M`. `m` is row-major.
    pub fn conjugate(&self, m: &[f64]) -> SymMat {
        let d = self.dim;
        assert_eq!(m.len(), d * d);
        let mut out = SymMat::zero(d);
        for i in 0..d {
            for j in i..d {
                let mut s = 0.0;
                for k in 0..d {
                    for l in 0..d {
                        s += m[k * d + i] * self.get(k, l) * m[l * d + j];
                    }
                }
                out.set(i, j, s);
            }
        }
        out
    }

    /// Eigenvalues sorted ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().0
    }

    /// Full spectral decomposition: ascending eigenvalues and the matching
    /// orthonormal eigenvectors as columns of a row-major dim x dim matrix.
    ///
    /// Dimensions 1 and 2 are closed-form; dimension 3 uses cyclic Jacobi
    /// rotations driven to off-diagonal magnitude below `1e-13` of the scale.
    pub fn eigen(&self) -> (Vec<f64>, Vec<f64>) {
        match self.dim {
            1 => (vec![self.get(0, 0)], vec![1.0]),
            2 => self.eigen2(),
            3 => self.eigen3(),
            _ => unreachable!(),
        }
    }

    fn eigen2(&self) -> (Vec<f64>, Vec<f64>) {
        let a = self.get(0, 0);
        let b = self.get(0, 1);
        let c = self.get(1, 1);
        if b == 0.0 {
            return if a <= c {
                (vec![a, c], vec![1.0, 0.0, 0.0, 1.0])
            } else {
                (vec![c, a], vec![0.0, 1.0, 1.0, 0.0])
            };
        }
        let mean = 0.5 * (a + c);
        let half_diff = 0.5 * (a - c);
        let r = half_diff.hypot(b);
        let lo = mean - r;
        let hi = mean + r;
        // Eigenvector for `hi`: (b, hi - a) or (hi - c, b), whichever is
        // better conditioned.
        let v_hi = if half_diff >= 0.0 {
            normalize2(hi - c, b)
        } else {
            normalize2(b, hi - a)
        };
        let v_lo = (-v_hi.1, v_hi.0);
        (
            vec![lo, hi],
            vec![v_lo.0, v_hi.0, v_lo.1, v_hi.1],
        )
    }

    fn eigen3(&self) -> (Vec<f64>, Vec<f64>) {
        let mut a = [[0.0f64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] = self.get(i, j);
            }
        }
        let mut v = [[0.0f64; 3]; 3];
        for (i, row) in v.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let scale = self.norm().max(1e-300);
        for _sweep in 0..64 {
            let off = (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]).sqrt();
            if off <= JACOBI_TOL * scale {
                break;
            }
            for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
                if a[p][q].abs() <= JACOBI_TOL * scale * 1e-3 {
                    continue;
                }
                // Classical Jacobi rotation annihilating a[p][q].
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..3 {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..3 {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for r in v.iter_mut() {
                    let rp = r[p];
                    let rq = r[q];
                    r[p] = c * rp - s * rq;
                    r[q] = s * rp + c * rq;
                }
            }
        }
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
        let values = order.iter().map(|&i| a[i][i]).collect();
        let mut vectors = vec![0.0; 9];
        for (col_out, &col_in) in order.iter().enumerate() {
            for row in 0..3 {
                vectors[row * 3 + col_out] = v[row][col_in];
            }
        }
        (values, vectors)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Determinant as the eigenvalue product, so every membership test runs
    /// through the one spectral code path.
    pub fn det(&self) -> f64 {
        self.eigenvalues().iter().product()
    }
}

fn normalize2(x: f64, y: f64) -> (f64, f64) {
    let n = x.hypot(y);
    if n == 0.0 {
        (1.0, 0.0)
    } else {
        (x / n, y / n)
    }
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn eig_sym(a: &SymMat) -> Vec<f64> {
    a.eigenvalues()
}

/// A closed, conjugation-invariant subset of the symmetric matrices, given
/// by a named rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConeSpec {
    /// Non-negative semi-definite matrices.
    Psd { dim: usize },
    /// `{ A in P : det A >= t }` for `t > 0`.
    DetCone { dim: usize, t: f64 },
    /// Closure of the complement of the determinant cone.
    ClosureComplement { dim: usize, t: f64 },
    /// `-closure(F_t^c)`, the dual cone; itself an invariant Dirichlet set.
    DualTilde { dim: usize, t: f64 },
}

impl ConeSpec {
    pub fn psd(dim: usize) -> Self {
        ConeSpec::Psd { dim }
    }

    pub fn det_cone(dim: usize, t: f64) -> Result<Self, ConeError> {
        if t <= 0.0 {
            return Err(ConeError::InvalidThreshold(t));
        }
        Ok(ConeSpec::DetCone { dim, t })
    }

    pub fn closure_complement(dim: usize, t: f64) -> Result<Self, ConeError> {
        if t <= 0.0 {
            return Err(ConeError::InvalidThreshold(t));
        }
        Ok(ConeSpec::ClosureComplement { dim, t })
    }

    pub fn dual_tilde(dim: usize, t: f64) -> Result<Self, ConeError> {
        if t <= 0.0 {
            return Err(ConeError::InvalidThreshold(t));
        }
        Ok(ConeSpec::DualTilde { dim, t })
    }

    pub fn dim(&self) -> usize {
        match *self {
            ConeSpec::Psd { dim }
            | ConeSpec::DetCone { dim, .. }
            | ConeSpec::ClosureComplement { dim, .. }
            | ConeSpec::DualTilde { dim, .. } => dim,
        }
    }
}

/// Tolerance-qualified cone membership. Boundary cases resolve as members.
pub fn cone_member(a: &SymMat, cone: &ConeSpec, tol: f64) -> Result<bool, ConeError> {
    if a.dim() != cone.dim() {
        return Err(ConeError::DimensionMismatch {
            matrix: a.dim(),
            cone: cone.dim(),
        });
    }
    Ok(match *cone {
        ConeSpec::Psd { .. } => a.min_eigenvalue() >= -tol,
        ConeSpec::DetCone { t, .. } => a.min_eigenvalue() >= -tol && a.det() >= t - tol,
        ConeSpec::ClosureComplement { t, .. } => {
            // Not in the interior of F_t.
            a.min_eigenvalue() <= tol || a.det() <= t + tol
        }
        ConeSpec::DualTilde { dim, t } => {
            cone_member(&a.neg(), &ConeSpec::ClosureComplement { dim, t }, tol)?
        }
    })
}

/// A counterexample found by one of the randomized audits.
#[derive(Clone, Debug)]
pub struct ConeViolation {
    /// Index of the sample that failed.
    pub sample: usize,
    /// The matrix (or matrix sum) whose membership came out wrong.
    pub witness: SymMat,
    /// The PSD bump (Dirichlet audit) or the conjugated matrix (invariance
    /// audit) that exposed the failure.
    pub partner: SymMat,
}

/// Draw a member of a PSD or determinant cone. Deterministic per seed.
///
/// PSD sampling is `G^T G` on a Gaussian `G`; `DetCone(t)` rescales a
/// positive-definite sample so its determinant equals `t * u` with `u`
/// uniform in `[1, 10]`.
pub fn sample_cone(cone: &ConeSpec, seed: u64) -> Result<SymMat, ConeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_cone_rng(cone, &mut rng)
}

fn sample_cone_rng(cone: &ConeSpec, rng: &mut ChaCha8Rng) -> Result<SymMat, ConeError> {
    let dim = cone.dim();
    match *cone {
        ConeSpec::Psd { .. } => Ok(gram_sample(dim, rng)),
        ConeSpec::DetCone { t, .. } => {
            // A Gram matrix is positive definite with probability one; retry
            // on the measure-zero degenerate draw.
            let mut g = gram_sample(dim, rng);
            let mut d = g.det();
            while d <= 1e-12 {
                g = gram_sample(dim, rng);
                d = g.det();
            }
            let u: f64 = rng.gen_range(1.0..=10.0);
            let c = (t * u / d).powf(1.0 / dim as f64);
            Ok(g.scale(c))
        }
        _ => Err(ConeError::UnsupportedSampleKind),
    }
}

fn gram_sample(dim: usize, rng: &mut ChaCha8Rng) -> SymMat {
    let mut g = vec![0.0f64; dim * dim];
    for v in g.iter_mut() {
        *v = rng.sample(StandardNormal);
    }
    let mut m = SymMat::zero(dim);
    for i in 0..dim {
        for j in i..dim {
            let mut s = 0.0;
            for k in 0..dim {
                s += g[k * dim + i] * g[k * dim + j];
            }
            m.set(i, j, s);
        }
    }
    m
}

/// Random symmetric matrix with independent standard-normal entries on and
/// above the diagonal.
pub fn random_sym(dim: usize, rng: &mut ChaCha8Rng) -> SymMat {
    let mut m = SymMat::zero(dim);
    for i in 0..dim {
        for j in i..dim {
            m.set(i, j, rng.sample(StandardNormal));
        }
    }
    m
}

/// Random orthogonal matrix via Gram-Schmidt on Gaussian columns
/// (row-major, dim x dim).
pub fn random_orthogonal(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(dim);
        let mut ok = true;
        for _ in 0..dim {
            let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            for c in &cols {
                let dot: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= dot * ci;
                }
            }
            let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n < 1e-8 {
                ok = false;
                break;
            }
            for vi in v.iter_mut() {
                *vi /= n;
            }
            cols.push(v);
        }
        if ok {
            let mut m = vec![0.0; dim * dim];
            for (j, c) in cols.iter().enumerate() {
                for i in 0..dim {
                    m[i * dim + j] = c[i];
                }
            }
            return m;
        }
    }
}

/// Dirichlet audit against an arbitrary membership rule with explicit pairs:
/// reports every pair `(a, b)` with `rule(a + b)` false. This is the engine
/// behind [`dirichlet_check`], exposed so negative controls (rules that are
/// not Dirichlet sets) can be exercised directly.
pub fn dirichlet_check_rule<F>(rule: F, pairs: &[(SymMat, SymMat)]) -> Vec<ConeViolation>
where
    F: Fn(&SymMat) -> bool,
{
    let mut violations = Vec::new();
    for (i, (a, b)) in pairs.iter().enumerate() {
        let sum = a.add(b);
        if !rule(&sum) {
            violations.push(ConeViolation {
                sample: i,
                witness: sum,
                partner: *b,
            });
        }
    }
    violations
}

/// Seeded audit of the Dirichlet property `C + P subset C`: draws
/// `sample_count` pairs `(A in C, B in P)` and reports every pair whose sum
/// leaves the cone at tolerance `1e-9`.
///
/// PSD and DetCone members are drawn directly; the closure-complement and
/// dual kinds are drawn by rejection from Gaussian symmetric matrices.
pub fn dirichlet_check(cone: &ConeSpec, sample_count: usize, seed: u64) -> Vec<ConeViolation> {
    assert!(sample_count >= 1);
    let dim = cone.dim();
    let psd = ConeSpec::psd(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(sample_count);
    for _ in 0..sample_count {
        let a = match cone {
            ConeSpec::Psd { .. } | ConeSpec::DetCone { .. } => {
                sample_cone_rng(cone, &mut rng).expect("direct sampling")
            }
            _ => loop {
                let cand = random_sym(dim, &mut rng).scale(2.0);
                if cone_member(&cand, cone, 0.0).expect("matching dims") {
                    break cand;
                }
            },
        };
        let b = sample_cone_rng(&psd, &mut rng).expect("PSD sampling");
        pairs.push((a, b));
    }
    dirichlet_check_rule(|m| cone_member(m, cone, DEFAULT_TOL).expect("matching dims"), &pairs)
}

/// Invariance audit against an arbitrary rule: reports every `(a, m)` where
/// membership of `a` and of `m^T a m` disagree.
pub fn invariance_check_rule<F>(rule: F, cases: &[(SymMat, Vec<f64>)]) -> Vec<ConeViolation>
where
    F: Fn(&SymMat) -> bool,
{
    let mut violations = Vec::new();
    for (i, (a, m)) in cases.iter().enumerate() {
        let conj = a.conjugate(m);
        if rule(a) != rule(&conj) {
            violations.push(ConeViolation {
                sample: i,
                witness: *a,
                partner: conj,
            });
        }
    }
    violations
}

/// Seeded audit of conjugation invariance: random symmetric `A` and random
/// orthogonal `M`, membership compared at tolerance `1e-7`.
pub fn invariance_check(cone: &ConeSpec, sample_count: usize, seed: u64) -> Vec<ConeViolation> {
    assert!(sample_count >= 1);
    let dim = cone.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<(SymMat, Vec<f64>)> = (0..sample_count)
        .map(|_| {
            let a = random_sym(dim, &mut rng).scale(2.0);
            let m = random_orthogonal(dim, &mut rng);
            (a, m)
        })
        .collect();
    invariance_check_rule(
        |m| cone_member(m, cone, 1e-7).expect("matching dims"),
        &cases,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eig_diagonal_cases() {
        assert_eq!(eig_sym(&SymMat::diag(&[3.0, 1.0])), vec![1.0, 3.0]);
        assert_eq!(eig_sym(&SymMat::identity(2)), vec![1.0, 1.0]);
    }

    #[test]
    fn eig_2x2_offdiagonal() {
        // [[2,1],[1,2]]: characteristic polynomial (2-l)^2 - 1 = 0 -> 1, 3.
        let m = SymMat::from_upper(2, &[2.0, 1.0, 2.0]).unwrap();
        let ev = eig_sym(&m);
        assert_relative_eq!(ev[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(ev[1], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn eig_3x3_block() {
        // Block diag([[2,1],[1,2]], 5) -> eigenvalues 1, 3, 5.
        let m = SymMat::from_upper(3, &[2.0, 1.0, 0.0, 2.0, 0.0, 5.0]).unwrap();
        let ev = eig_sym(&m);
        assert_relative_eq!(ev[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(ev[1], 3.0, epsilon = 1e-12);
        assert_relative_eq!(ev[2], 5.0, epsilon = 1e-12);
    }

    /// Independent oracle: rebuild A = V diag(ev) V^T from the spectral data
    /// and compare entrywise.
    fn reconstruction_error(a: &SymMat) -> f64 {
        let d = a.dim();
        let (ev, v) = a.eigen();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for k in 0..d {
                    s += v[i * d + k] * ev[k] * v[j * d + k];
                }
                worst = worst.max((s - a.get(i, j)).abs());
            }
        }
        worst
    }

    #[test]
    fn eig_reconstruction_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in 1..=3 {
            for _ in 0..200 {
                let a = random_sym(dim, &mut rng).scale(3.0);
                assert!(reconstruction_error(&a) <= 1e-12 * (1.0 + a.norm()));
            }
        }
    }

    #[test]
    fn membership_examples() {
        let f1 = ConeSpec::det_cone(2, 1.0).unwrap();
        assert!(cone_member(&SymMat::diag(&[2.0, 2.0]), &f1, DEFAULT_TOL).unwrap());
        assert!(!cone_member(&SymMat::diag(&[1.0, -1.0]), &f1, DEFAULT_TOL).unwrap());

        // -A = I has det 1 <= t: on the boundary of closure(F_1^c).
        let dual1 = ConeSpec::dual_tilde(2, 1.0).unwrap();
        assert!(cone_member(&SymMat::diag(&[-1.0, -1.0]), &dual1, DEFAULT_TOL).unwrap());

        for &t in &[0.25, 1.0, 4.0] {
            let dual = ConeSpec::dual_tilde(2, t).unwrap();
            assert!(cone_member(&SymMat::zero(2), &dual, DEFAULT_TOL).unwrap());
        }
    }

    #[test]
    fn membership_dimension_mismatch() {
        let f1 = ConeSpec::det_cone(2, 1.0).unwrap();
        let a = SymMat::identity(3);
        assert_eq!(
            cone_member(&a, &f1, DEFAULT_TOL),
            Err(ConeError::DimensionMismatch { matrix: 3, cone: 2 })
        );
    }

    #[test]
    fn det_cone_implies_psd() {
        // Convex condition F_t subset P, on sampled members.
        let f = ConeSpec::det_cone(3, 0.5).unwrap();
        let p = ConeSpec::psd(3);
        for seed in 0..200 {
            let a = sample_cone(&f, seed).unwrap();
            assert!(cone_member(&a, &p, DEFAULT_TOL).unwrap());
        }
    }

    #[test]
    fn duality_consistency() {
        let t = 1.5;
        let f = ConeSpec::det_cone(2, t).unwrap();
        let cc = ConeSpec::closure_complement(2, t).unwrap();
        // Strict interior of F_t is excluded from the closure complement.
        let interior = SymMat::diag(&[2.0, 2.0]); // det 4 > t, eigs > 0
        assert!(cone_member(&interior, &f, DEFAULT_TOL).unwrap());
        assert!(!cone_member(&interior, &cc, DEFAULT_TOL).unwrap());
        // Boundary (det = t exactly, positive definite) belongs to both.
        let boundary = SymMat::diag(&[t / 2.0, 2.0]);
        assert_relative_eq!(boundary.det(), t, epsilon = 1e-12);
        assert!(cone_member(&boundary, &f, DEFAULT_TOL).unwrap());
        assert!(cone_member(&boundary, &cc, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn sampling_is_deterministic_and_in_cone() {
        let f4 = ConeSpec::det_cone(2, 4.0).unwrap();
        assert_eq!(sample_cone(&f4, 0).unwrap(), sample_cone(&f4, 0).unwrap());
        let p = ConeSpec::psd(3);
        assert_eq!(sample_cone(&p, 0).unwrap(), sample_cone(&p, 0).unwrap());
        for seed in 0..1000 {
            let a = sample_cone(&f4, seed).unwrap();
            assert!(a.det() >= 4.0 - 1e-9, "det {} below threshold", a.det());
            assert!(a.min_eigenvalue() > 0.0);
            assert!(cone_member(&a, &f4, 0.0).unwrap());
        }
        let cc = ConeSpec::closure_complement(2, 1.0).unwrap();
        assert_eq!(sample_cone(&cc, 0), Err(ConeError::UnsupportedSampleKind));
    }

    #[test]
    fn dirichlet_audits_clean_cones() {
        let f1 = ConeSpec::det_cone(2, 1.0).unwrap();
        assert!(dirichlet_check(&f1, 10_000, 11).is_empty());
        let p = ConeSpec::psd(2);
        assert!(dirichlet_check(&p, 10_000, 12).is_empty());
        let dual = ConeSpec::dual_tilde(2, 1.0).unwrap();
        assert!(dirichlet_check(&dual, 10_000, 13).is_empty());
    }

    #[test]
    fn dirichlet_negative_control() {
        // {det >= 1} without the PSD restriction is not a Dirichlet set:
        // A = diag(-2,-2), B = diag(4,0): det(A+B) = det diag(2,-2) = -4 < 1.
        let rule = |m: &SymMat| m.det() >= 1.0 - DEFAULT_TOL;
        let pair = (SymMat::diag(&[-2.0, -2.0]), SymMat::diag(&[4.0, 0.0]));
        let violations = dirichlet_check_rule(rule, &[pair]);
        assert_eq!(violations.len(), 1);
        assert_relative_eq!(violations[0].witness.det(), -4.0, epsilon = 1e-12);
    }

    #[test]
    fn invariance_audits_clean_cones() {
        let f2 = ConeSpec::det_cone(2, 2.0).unwrap();
        assert!(invariance_check(&f2, 1000, 21).is_empty());
        let p = ConeSpec::psd(3);
        assert!(invariance_check(&p, 1000, 22).is_empty());
    }

    #[test]
    fn invariance_negative_control() {
        // The rule {A11 >= 1} is not conjugation-invariant: rotating
        // diag(2, 0) by 90 degrees moves the 2 into the (1,1) slot.
        let rule = |m: &SymMat| m.get(0, 0) >= 1.0;
        let rot90 = vec![0.0, -1.0, 1.0, 0.0];
        let cases = vec![(SymMat::diag(&[2.0, 0.0]), rot90)];
        let violations = invariance_check_rule(rule, &cases);
        assert_eq!(violations.len(), 1);
        assert_relative_eq!(violations[0].partner.get(0, 0), 0.0, epsilon = 1e-12);
    }
}
