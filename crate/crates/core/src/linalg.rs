//! Small dense complex linear algebra: Hermitian quadratic forms, orthogonal
//! projectors, and principal eigenvectors of Hermitian PSD matrices whose side
//! equals the antenna count (2 in the reference setups, general `n` supported).
//!
//! Everything here is a pure function of immutable values and safe to call
//! from any number of concurrent workers.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Elementwise tolerance for the Hermitian-symmetry check.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Smallest singular value accepted before an input counts as rank-deficient.
pub const RANK_TOL: f64 = 1e-10;

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    entries: Vec<Complex64>,
}

impl CVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        assert!(!entries.is_empty(), "vector must have at least one entry");
        Self { entries }
    }

    /// Builds a vector from `(re, im)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        Self::new(pairs.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
    }

    /// `k`-th standard basis vector in dimension `dim`.
    pub fn standard_basis(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut entries = vec![Complex64::ZERO; dim];
        entries[k] = Complex64::ONE;
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { entries: vec![Complex64::ZERO; dim] }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> Complex64 {
        self.entries[i]
    }

    /// Hermitian inner product `self^H other`.
    pub fn inner(&self, other: &CVector) -> Complex64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> CVector {
        CVector::new(self.entries.iter().map(|z| z * s).collect())
    }

    pub fn add(&self, other: &CVector) -> CVector {
        debug_assert_eq!(self.dim(), other.dim());
        CVector::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &CVector) -> CVector {
        debug_assert_eq!(self.dim(), other.dim());
        CVector::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// Unit vector along `self`; `None` when the norm is below `RANK_TOL`.
    pub fn normalized(&self) -> Option<CVector> {
        let n = self.norm();
        if n <= RANK_TOL {
            return None;
        }
        Some(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    /// Rotates the global phase so the first entry of modulus above `1e-12`
    /// is real and nonnegative.
    pub fn phase_normalized(&self) -> CVector {
        for z in &self.entries {
            let m = z.norm();
            if m > 1e-12 {
                let rot = z.conj() / m;
                return self.scale(rot);
            }
        }
        self.clone()
    }
}

/// Dense Hermitian matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Validates Hermitian symmetry to within [`HERMITIAN_TOL`] elementwise.
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        assert_eq!(data.len(), dim * dim);
        let mut residual = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                let d = (data[i * dim + j] - data[j * dim + i].conj()).norm();
                residual = residual.max(d);
            }
        }
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self { dim, data })
    }

    /// Symmetrizes `data` as `(A + A^H) / 2` before construction; used when
    /// rounding noise from matrix products would trip the strict check.
    pub fn new_symmetrized(dim: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), dim * dim);
        let mut sym = vec![Complex64::ZERO; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                sym[i * dim + j] = (data[i * dim + j] + data[j * dim + i].conj()) * 0.5;
            }
        }
        Self { dim, data: sym }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::ONE;
        }
        m
    }

    /// Rank-one matrix `scale * v v^H`.
    pub fn scaled_outer(scale: f64, v: &CVector) -> Self {
        let dim = v.dim();
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(v.get(i) * v.get(j).conj() * scale);
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn add(&self, other: &HermitianMatrix) -> HermitianMatrix {
        debug_assert_eq!(self.dim, other.dim);
        HermitianMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &HermitianMatrix) -> HermitianMatrix {
        debug_assert_eq!(self.dim, other.dim);
        HermitianMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> HermitianMatrix {
        HermitianMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Trace; exactly real for a Hermitian matrix.
    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).sum()
    }

    pub fn mul_vec(&self, v: &CVector) -> CVector {
        debug_assert_eq!(self.dim, v.dim());
        let mut out = vec![Complex64::ZERO; self.dim];
        for i in 0..self.dim {
            let mut acc = Complex64::ZERO;
            for j in 0..self.dim {
                acc += self.data[i * self.dim + j] * v.get(j);
            }
            out[i] = acc;
        }
        CVector::new(out)
    }

    /// Congruence `P * self * P` with a Hermitian `P`; the result is Hermitian.
    pub fn sandwich(&self, p: &HermitianMatrix) -> HermitianMatrix {
        debug_assert_eq!(self.dim, p.dim);
        let n = self.dim;
        let idx = |i: usize, j: usize| i * n + j;
        // tmp = P * self
        let mut tmp = vec![Complex64::ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::ZERO;
                for k in 0..n {
                    acc += p.data[idx(i, k)] * self.data[idx(k, j)];
                }
                tmp[idx(i, j)] = acc;
            }
        }
        // out = tmp * P
        let mut out = vec![Complex64::ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::ZERO;
                for k in 0..n {
                    acc += tmp[idx(i, k)] * p.data[idx(k, j)];
                }
                out[idx(i, j)] = acc;
            }
        }
        HermitianMatrix::new_symmetrized(n, out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// All eigenvalues in ascending order (closed form at dim 2, cyclic
    /// Jacobi otherwise).
    pub fn eigenvalues(&self) -> Vec<f64> {
        match self.dim {
            1 => vec![self.data[0].re],
            2 => {
                let (lo, hi) = eig2_values(self);
                vec![lo, hi]
            }
            _ => {
                let (vals, _) = jacobi_eig(self);
                let mut v = vals;
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                v
            }
        }
    }
}

/// Eigenvalue paired with a unit eigenvector.
#[derive(Debug, Clone)]
pub struct EigPair {
    pub value: f64,
    pub vector: CVector,
}

/// Real value of the quadratic form `h^H S h`.
///
/// The imaginary residual is asserted below `1e-10`; for a Hermitian `S` it
/// vanishes up to rounding.
pub fn quadratic_form(h: &CVector, s: &HermitianMatrix) -> Result<f64> {
    if h.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            context: "quadratic_form",
            expected: s.dim(),
            found: h.dim(),
        });
    }
    let sh = s.mul_vec(h);
    let val = h.inner(&sh);
    assert!(
        val.im.abs() < 1e-10,
        "quadratic form has imaginary residual {:.3e}",
        val.im
    );
    Ok(val.re)
}

/// Orthogonal projector onto the column space of `cols`:
/// `X (X^H X)^{-1} X^H`.
pub fn projector(cols: &[CVector]) -> Result<HermitianMatrix> {
    assert!(!cols.is_empty());
    let dim = cols[0].dim();
    for c in cols {
        if c.dim() != dim {
            return Err(Error::DimensionMismatch {
                context: "projector",
                expected: dim,
                found: c.dim(),
            });
        }
    }
    let k = cols.len();
    // Gram matrix G = X^H X, k x k Hermitian.
    let mut gram = vec![Complex64::ZERO; k * k];
    for a in 0..k {
        for b in 0..k {
            gram[a * k + b] = cols[a].inner(&cols[b]);
        }
    }
    let gram_m = HermitianMatrix::new_symmetrized(k, gram.clone());
    let min_eig = gram_m.eigenvalues()[0].max(0.0);
    if min_eig.sqrt() <= RANK_TOL {
        return Err(Error::RankDeficient { min_singular: min_eig.sqrt() });
    }
    let ginv = invert_small(k, &gram);

    // P_ij = sum_{a,b} X_ia * Ginv_ab * conj(X_jb)
    let mut data = vec![Complex64::ZERO; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex64::ZERO;
            for a in 0..k {
                for b in 0..k {
                    acc += cols[a].get(i) * ginv[a * k + b] * cols[b].get(j).conj();
                }
            }
            data[i * dim + j] = acc;
        }
    }
    Ok(HermitianMatrix::new_symmetrized(dim, data))
}

/// Projector onto the orthogonal complement of the column space of `cols`.
pub fn complement_projector(cols: &[CVector]) -> Result<HermitianMatrix> {
    let p = projector(cols)?;
    Ok(HermitianMatrix::identity(p.dim()).sub(&p))
}

/// Largest eigenvalue and a unit eigenvector of a Hermitian PSD matrix.
///
/// Phase convention: the first entry of modulus above `1e-12` is real and
/// nonnegative. Degenerate principal eigenspaces resolve to the eigenvector
/// maximizing `|first entry|`.
pub fn principal_eig(m: &HermitianMatrix) -> Result<EigPair> {
    let pair = match m.dim() {
        1 => EigPair {
            value: m.get(0, 0).re,
            vector: CVector::new(vec![Complex64::ONE]),
        },
        2 => eig2_principal(m),
        _ => jacobi_principal(m),
    };
    let vector = pair.vector.phase_normalized();
    let residual = m
        .mul_vec(&vector)
        .sub(&vector.scale(Complex64::new(pair.value, 0.0)))
        .norm();
    // Relative for large-norm inputs (targets near zero scale the weighted
    // matrices like 1/E); coincides with the absolute bound at unit scale.
    let scale = m.frobenius_norm().max(1.0);
    assert!(
        residual < 1e-10 * scale,
        "eigenpair residual {:.3e} out of tolerance (scale {:.3e})",
        residual,
        scale
    );
    Ok(EigPair { value: pair.value, vector })
}

/// Result of [`orthonormal_span_basis`]: `u2` is absent when the two inputs
/// are parallel and the span collapses to one dimension.
#[derive(Debug, Clone)]
pub struct SpanBasis {
    pub u1: CVector,
    pub u2: Option<CVector>,
}

impl SpanBasis {
    pub fn is_degenerate(&self) -> bool {
        self.u2.is_none()
    }
}

/// Gram-Schmidt pair spanning `{h_a, h_b}`: `u1 = h_a/|h_a|`,
/// `u2 = P^⊥_{h_a} h_b / |P^⊥_{h_a} h_b|`.
///
/// Parallel inputs yield a single-vector basis flagged degenerate rather than
/// an error; callers restrict their search space accordingly.
pub fn orthonormal_span_basis(h_a: &CVector, h_b: &CVector) -> SpanBasis {
    let u1 = h_a
        .normalized()
        .expect("span basis requires a nonzero first vector");
    let cross = u1.inner(h_b);
    // |h_a^H h_b| >= (1 - 1e-10) * |h_a||h_b| means parallel within tolerance.
    if cross.norm() >= (1.0 - 1e-10) * h_b.norm() {
        return SpanBasis { u1, u2: None };
    }
    let residual = h_b.sub(&u1.scale(cross));
    match residual.normalized() {
        Some(u2) => SpanBasis { u1, u2: Some(u2) },
        None => SpanBasis { u1, u2: None },
    }
}

// --- internal: small dense inverse and eigensolvers ---

/// Gauss-Jordan inverse of a small k x k complex matrix (k <= antenna count;
/// callers have already rejected near-singular inputs).
fn invert_small(k: usize, m: &[Complex64]) -> Vec<Complex64> {
    let mut a = m.to_vec();
    let mut inv = vec![Complex64::ZERO; k * k];
    for i in 0..k {
        inv[i * k + i] = Complex64::ONE;
    }
    for col in 0..k {
        let mut pivot = col;
        for r in (col + 1)..k {
            if a[r * k + col].norm() > a[pivot * k + col].norm() {
                pivot = r;
            }
        }
        if pivot != col {
            for j in 0..k {
                a.swap(col * k + j, pivot * k + j);
                inv.swap(col * k + j, pivot * k + j);
            }
        }
        let p = a[col * k + col];
        let pinv = Complex64::ONE / p;
        for j in 0..k {
            a[col * k + j] *= pinv;
            inv[col * k + j] *= pinv;
        }
        for r in 0..k {
            if r == col {
                continue;
            }
            let f = a[r * k + col];
            if f.norm() == 0.0 {
                continue;
            }
            for j in 0..k {
                let acj = a[col * k + j];
                let icj = inv[col * k + j];
                a[r * k + j] -= f * acj;
                inv[r * k + j] -= f * icj;
            }
        }
    }
    inv
}

/// Eigenvalues of a 2x2 Hermitian matrix, (min, max).
fn eig2_values(m: &HermitianMatrix) -> (f64, f64) {
    let a = m.get(0, 0).re;
    let d = m.get(1, 1).re;
    let z = m.get(0, 1);
    let mean = 0.5 * (a + d);
    let disc = (0.25 * (a - d) * (a - d) + z.norm_sqr()).sqrt();
    (mean - disc, mean + disc)
}

fn eig2_principal(m: &HermitianMatrix) -> EigPair {
    let a = m.get(0, 0).re;
    let d = m.get(1, 1).re;
    let z = m.get(0, 1);
    let (_, lmax) = eig2_values(m);

    // (M - lmax I) v = 0: rows give two candidate null vectors; take the
    // better conditioned one. A fully degenerate eigenspace (M = lmax I)
    // resolves to e1, which maximizes |first entry|.
    let cand1 = CVector::new(vec![z, Complex64::new(lmax - a, 0.0)]);
    let cand2 = CVector::new(vec![Complex64::new(lmax - d, 0.0), z.conj()]);
    let scale = m.frobenius_norm().max(1.0);
    let pick = if cand1.norm() >= cand2.norm() { cand1 } else { cand2 };
    if pick.norm() <= 1e-14 * scale {
        return EigPair {
            value: lmax,
            vector: CVector::standard_basis(2, 0),
        };
    }
    EigPair {
        value: lmax,
        vector: pick.normalized().expect("eigenvector candidate above tolerance"),
    }
}

/// Cyclic Jacobi eigendecomposition for Hermitian matrices of side > 2.
/// Returns unsorted eigenvalues and the unitary of eigenvectors (columns).
fn jacobi_eig(m: &HermitianMatrix) -> (Vec<f64>, Vec<Complex64>) {
    let n = m.dim();
    let idx = |i: usize, j: usize| i * n + j;
    let mut a = m.data.clone();
    let mut u = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        u[idx(i, i)] = Complex64::ONE;
    }
    let scale = m.frobenius_norm().max(1e-300);
    let tol = 1e-15 * scale;

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[idx(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[idx(p, q)];
                let r = apq.norm();
                if r <= tol * 1e-2 {
                    continue;
                }
                let app = a[idx(p, p)].re;
                let aqq = a[idx(q, q)].re;
                // Phase factor turning the (p,q) block real, then a real
                // Jacobi rotation zeroing it.
                let phase = apq.conj() / r;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Plane unitary V = diag(1, w) * [[c, s], [-s, c]] with
                // w = conj(apq)/|apq|; A <- V^H A V, U <- U V.
                let w = phase;
                for i in 0..n {
                    let aip = a[idx(i, p)];
                    let aiq = a[idx(i, q)];
                    a[idx(i, p)] = aip * c - aiq * (w * s);
                    a[idx(i, q)] = aip * s + aiq * (w * c);
                }
                for j in 0..n {
                    let apj = a[idx(p, j)];
                    let aqj = a[idx(q, j)];
                    a[idx(p, j)] = apj * c - aqj * (w.conj() * s);
                    a[idx(q, j)] = apj * s + aqj * (w.conj() * c);
                }
                for i in 0..n {
                    let uip = u[idx(i, p)];
                    let uiq = u[idx(i, q)];
                    u[idx(i, p)] = uip * c - uiq * (w * s);
                    u[idx(i, q)] = uip * s + uiq * (w * c);
                }
            }
        }
    }
    let vals = (0..n).map(|i| a[idx(i, i)].re).collect();
    (vals, u)
}

fn jacobi_principal(m: &HermitianMatrix) -> EigPair {
    let n = m.dim();
    let (vals, u) = jacobi_eig(m);
    let lmax = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let near = 1e-12 * lmax.abs().max(1.0);
    // Among eigenvectors attaining the maximum (ties within `near`), pick the
    // one maximizing |first entry|.
    let mut best: Option<(f64, usize)> = None;
    for (k, &v) in vals.iter().enumerate() {
        if v >= lmax - near {
            let first = u[k].norm();
            if best.map_or(true, |(bf, _)| first > bf) {
                best = Some((first, k));
            }
        }
    }
    let (_, k) = best.expect("nonempty spectrum");
    let vector = CVector::new((0..n).map(|i| u[i * n + k]).collect());
    EigPair {
        value: vals[k],
        vector: vector.normalized().expect("unitary column has unit norm"),
    }
}
