//! Dense complex linear algebra sized for desk-scale registers.
//!
//! The eigensolver is a cyclic Jacobi iteration for Hermitian matrices. It is
//! slower than Householder tridiagonalization but short, allocation-light,
//! and bit-deterministic, which the reproducibility contract needs.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::WbRng;
use crate::Complex64;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                left: rows * cols,
                right: data.len(),
            });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Builds from a nested row list; rows must be equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::LengthMismatch {
                    left: c,
                    right: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(ComplexMatrix { rows: r, cols: c, data })
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = *e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c).conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> ComplexMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> ComplexMatrix {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == ZERO {
                    continue;
                }
                let row_off = r * other.cols;
                let k_off = k * other.cols;
                for c in 0..other.cols {
                    out.data[row_off + c] += a * other.data[k_off + c];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(self.cols, v.len());
        let mut out = vec![ZERO; self.rows];
        for r in 0..self.rows {
            let mut acc = ZERO;
            let off = r * self.cols;
            for c in 0..self.cols {
                acc += self.data[off + c] * v[c];
            }
            out[r] = acc;
        }
        out
    }

    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self.get(r1, c1);
                if a == ZERO {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        out.data[(r1 * other.rows + r2) * cols + (c1 * other.cols + c2)] =
                            a * other.get(r2, c2);
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Max-norm deviation from the Hermitian part; 0 for exactly Hermitian.
    pub fn hermitian_deviation(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                let d = (self.get(r, c) - self.get(c, r).conj()).norm();
                if d > dev {
                    dev = d;
                }
            }
        }
        dev
    }

    /// `(M + M†)/2`; damps asymmetry accumulated by rounding.
    pub fn hermitize(&self) -> ComplexMatrix {
        debug_assert!(self.is_square());
        let mut out = self.clone();
        for r in 0..self.rows {
            out.data[r * self.cols + r] = Complex64::new(self.get(r, r).re, 0.0);
            for c in (r + 1)..self.cols {
                let avg = (self.get(r, c) + self.get(c, r).conj()).scale(0.5);
                out.data[r * self.cols + c] = avg;
                out.data[c * self.cols + r] = avg.conj();
            }
        }
        out
    }

    pub fn unitary_deviation(&self) -> f64 {
        debug_assert!(self.is_square());
        let prod = self.adjoint().mul(self);
        prod.sub(&ComplexMatrix::identity(self.rows)).max_norm()
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn set_column(&mut self, c: usize, v: &[Complex64]) {
        debug_assert_eq!(v.len(), self.rows);
        for (r, x) in v.iter().enumerate() {
            self.set(r, c, *x);
        }
    }
}

/// Hermitian eigendecomposition `A = V diag(values) V†`, eigenvalues
/// ascending, eigenvectors in the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Cyclic Jacobi for Hermitian matrices. The input is hermitized first, so
/// small asymmetries are tolerated; genuinely non-Hermitian input is the
/// caller's bug and is rejected by the higher-level wrappers.
pub fn hermitian_eigen(matrix: &ComplexMatrix) -> Result<HermitianEigen> {
    if !matrix.is_square() {
        return Err(Error::InvalidArgument("eigen of non-square matrix".to_string()));
    }
    let n = matrix.rows;
    let mut a = matrix.hermitize();
    let mut v = ComplexMatrix::identity(n);
    if n > 1 {
        // Rotate while any pivot exceeds the relative threshold
        // eps * sqrt(|a_pp| |a_qq|). For PSD matrices this is the
        // Demmel-Veselic criterion and yields small eigenvalues with high
        // relative accuracy, which the support-restricted inverses need.
        let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
        let eps_rel = 1e-15;
        let abs_floor = 1e-18 * scale;
        let max_sweeps = 60;
        for _ in 0..max_sweeps {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q).norm();
                    if apq <= abs_floor {
                        continue;
                    }
                    let local =
                        eps_rel * libm::sqrt(libm::fabs(a.get(p, p).re) * libm::fabs(a.get(q, q).re));
                    if apq > local {
                        jacobi_rotate(&mut a, &mut v, p, q, abs_floor);
                        rotated = true;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
    }
    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a.get(i, i).re, i)).collect();
    // Stable ascending sort by eigenvalue.
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(core::cmp::Ordering::Equal));
    let values = pairs.iter().map(|p| p.0).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new_col, (_, old_col)) in pairs.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, new_col, v.get(r, *old_col));
        }
    }
    Ok(HermitianEigen { values, vectors })
}

fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, tol: f64) {
    let apq = a.get(p, q);
    let abs = apq.norm();
    if abs <= tol {
        return;
    }
    let phase = apq.unscale(abs); // e^{i phi}
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let tau = (app - aqq) / (2.0 * abs);
    let t = if tau >= 0.0 {
        1.0 / (tau + libm::sqrt(1.0 + tau * tau))
    } else {
        -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
    };
    let c = 1.0 / libm::sqrt(1.0 + t * t);
    let s = t * c;
    let n = a.rows;
    // Column update: col_p <- c*col_p + s*conj(phase)*col_q,
    //                col_q <- -s*phase*col_p + c*col_q.
    let se_conj = phase.conj().scale(s);
    let se = phase.scale(s);
    for i in 0..n {
        let aip = a.get(i, p);
        let aiq = a.get(i, q);
        a.set(i, p, aip.scale(c) + se_conj * aiq);
        a.set(i, q, aiq.scale(c) - se * aip);
    }
    // Row update with the adjoint rotation from the left.
    for j in 0..n {
        let apj = a.get(p, j);
        let aqj = a.get(q, j);
        a.set(p, j, apj.scale(c) + se * aqj);
        a.set(q, j, aqj.scale(c) - se_conj * apj);
    }
    // Clean the pivot pair.
    a.set(p, q, ZERO);
    a.set(q, p, ZERO);
    let app2 = a.get(p, p);
    let aqq2 = a.get(q, q);
    a.set(p, p, Complex64::new(app2.re, 0.0));
    a.set(q, q, Complex64::new(aqq2.re, 0.0));
    // Accumulate eigenvectors: V <- V R.
    for i in 0..n {
        let vip = v.get(i, p);
        let viq = v.get(i, q);
        v.set(i, p, vip.scale(c) + se_conj * viq);
        v.set(i, q, viq.scale(c) - se * vip);
    }
}

/// Applies `f` to the eigenvalues of a Hermitian matrix.
pub fn hermitian_function(matrix: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(matrix)?;
    let n = matrix.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, lambda) in eig.values.iter().enumerate() {
        let flv = f(*lambda);
        if flv == 0.0 {
            continue;
        }
        let col = eig.vectors.column(k);
        for r in 0..n {
            let vr = col[r].scale(flv);
            for c in 0..n {
                let val = out.get(r, c) + vr * col[c].conj();
                out.set(r, c, val);
            }
        }
    }
    Ok(out)
}

/// Eigenvalue-functional square root and support-restricted inverse square
/// root of a Hermitian PSD matrix. Eigenvalues at most `cutoff` are treated
/// as zero in the pseudo-inverse; small negatives from rounding are clamped.
pub fn psd_sqrt_and_pinv(
    matrix: &ComplexMatrix,
    cutoff: f64,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let dev = matrix.hermitian_deviation();
    if dev > 1e-8 {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let eig = hermitian_eigen(matrix)?;
    let n = matrix.rows();
    let mut sqrt = ComplexMatrix::zeros(n, n);
    let mut pinv = ComplexMatrix::zeros(n, n);
    for (k, lambda) in eig.values.iter().enumerate() {
        let l = lambda.max(0.0);
        let root = libm::sqrt(l);
        let inv = if *lambda > cutoff { 1.0 / root } else { 0.0 };
        if root == 0.0 && inv == 0.0 {
            continue;
        }
        let col = eig.vectors.column(k);
        for r in 0..n {
            for c in 0..n {
                let outer = col[r] * col[c].conj();
                if root != 0.0 {
                    let val = sqrt.get(r, c) + outer.scale(root);
                    sqrt.set(r, c, val);
                }
                if inv != 0.0 {
                    let val = pinv.get(r, c) + outer.scale(inv);
                    pinv.set(r, c, val);
                }
            }
        }
    }
    Ok((sqrt, pinv))
}

/// Trace norm `||M||_1 = sum of singular values`, computed from the
/// Hermitian embedding `[[0, M], [M†, 0]]` whose eigenvalues are `±s_i`.
/// Unlike the route through `M†M`, eigenvalue noise enters additively, so
/// the result is accurate to machine precision even at singular values near
/// zero.
pub fn trace_norm(matrix: &ComplexMatrix) -> Result<f64> {
    let (r, c) = (matrix.rows(), matrix.cols());
    let n = r + c;
    let mut h = ComplexMatrix::zeros(n, n);
    for i in 0..r {
        for j in 0..c {
            let v = matrix.get(i, j);
            h.set(i, r + j, v);
            h.set(r + j, i, v.conj());
        }
    }
    let eig = hermitian_eigen(&h)?;
    Ok(eig.values.iter().map(|l| libm::fabs(*l)).sum::<f64>() / 2.0)
}

/// Singular value decomposition of a square matrix, `M = W diag(s) V†`,
/// singular values descending. Built from two Hermitian eigenproblems; null
/// directions of `W` are completed deterministically.
pub fn svd_square(matrix: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<f64>, ComplexMatrix)> {
    if !matrix.is_square() {
        return Err(Error::InvalidArgument("svd_square needs a square matrix".to_string()));
    }
    let n = matrix.rows();
    let gram = matrix.adjoint().mul(matrix); // V S^2 V†
    let eig = hermitian_eigen(&gram)?;
    // Descending singular values.
    let order: Vec<usize> = (0..n).rev().collect();
    let mut v = ComplexMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        s.push(libm::sqrt(eig.values[old_col].max(0.0)));
        v.set_column(new_col, &eig.vectors.column(old_col));
    }
    let mut w_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for (k, sv) in s.iter().enumerate() {
        if *sv > 1e-10 {
            let col = matrix.mul_vec(&v.column(k));
            w_cols.push(col.iter().map(|z| z.unscale(*sv)).collect());
        }
    }
    complete_orthonormal(&mut w_cols, n);
    let mut w = ComplexMatrix::zeros(n, n);
    for (c, col) in w_cols.iter().enumerate() {
        w.set_column(c, col);
    }
    Ok((w, s, v))
}

/// Extends a set of orthonormal columns to a full orthonormal basis of the
/// ambient dimension by Gram-Schmidt over the standard basis, in index order.
pub fn complete_orthonormal(cols: &mut Vec<Vec<Complex64>>, dim: usize) {
    let mut candidate = 0usize;
    while cols.len() < dim && candidate < dim {
        let mut vec_c: Vec<Complex64> = vec![ZERO; dim];
        vec_c[candidate] = ONE;
        candidate += 1;
        for existing in cols.iter() {
            let overlap: Complex64 = existing
                .iter()
                .zip(vec_c.iter())
                .map(|(e, x)| e.conj() * x)
                .sum();
            for (x, e) in vec_c.iter_mut().zip(existing.iter()) {
                *x -= overlap * e;
            }
        }
        let norm = libm::sqrt(vec_c.iter().map(|z| z.norm_sqr()).sum());
        if norm > 1e-7 {
            for x in vec_c.iter_mut() {
                *x = x.unscale(norm);
            }
            cols.push(vec_c);
        }
    }
    debug_assert_eq!(cols.len(), dim, "failed to complete orthonormal basis");
}

/// Deterministic unitary whose first column is the given unit vector.
pub fn unitary_from_first_column(column: &[Complex64]) -> Result<ComplexMatrix> {
    let dim = column.len();
    let norm = libm::sqrt(column.iter().map(|z| z.norm_sqr()).sum());
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized {
            deviation: (norm - 1.0).abs(),
        });
    }
    let mut cols = vec![column.to_vec()];
    complete_orthonormal(&mut cols, dim);
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (c, col) in cols.iter().enumerate() {
        u.set_column(c, col);
    }
    Ok(u)
}

/// Embeds an operator acting on a subset of tensor factors into the full
/// product space (identity elsewhere). `targets` lists factor positions in
/// the order of the operator's own factor layout.
pub fn embed_operator(dims: &[usize], targets: &[usize], op: &ComplexMatrix) -> ComplexMatrix {
    let total: usize = dims.iter().product();
    let target_dim: usize = targets.iter().map(|t| dims[*t]).product();
    debug_assert_eq!(op.rows(), target_dim);
    let others: Vec<usize> = (0..dims.len()).filter(|i| !targets.contains(i)).collect();
    let other_dim: usize = others.iter().map(|i| dims[*i]).product();
    // Strides of each factor in the full row-major index.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let offset_of = |flat: usize, positions: &[usize]| -> usize {
        let mut rest = flat;
        let mut offset = 0usize;
        for i in (0..positions.len()).rev() {
            let d = dims[positions[i]];
            offset += (rest % d) * strides[positions[i]];
            rest /= d;
        }
        offset
    };
    let mut out = ComplexMatrix::zeros(total, total);
    for o in 0..other_dim {
        let base = offset_of(o, &others);
        for tr in 0..target_dim {
            let row = base + offset_of(tr, targets);
            for tc in 0..target_dim {
                let v = op.get(tr, tc);
                if v == ZERO {
                    continue;
                }
                let col = base + offset_of(tc, targets);
                out.set(row, col, v);
            }
        }
    }
    out
}

/// Applies an operator to the trailing factor block of a vector viewed as
/// `lead_dim x op_dim`: `v <- (I_lead (x) op) v`.
pub fn apply_trailing(vector: &mut [Complex64], lead_dim: usize, op: &ComplexMatrix) {
    let block = op.rows();
    debug_assert_eq!(vector.len(), lead_dim * block);
    let mut scratch = vec![ZERO; block];
    for lead in 0..lead_dim {
        let slice = &mut vector[lead * block..(lead + 1) * block];
        scratch.copy_from_slice(slice);
        for r in 0..block {
            let mut acc = ZERO;
            let off = r * block;
            for c in 0..block {
                acc += op.data()[off + c] * scratch[c];
            }
            slice[r] = acc;
        }
    }
}

/// Haar-ish random unitary: Ginibre matrix orthonormalized column by column.
pub fn random_unitary(dim: usize, rng: &mut WbRng) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| rng.complex_gaussian()).collect();
        for existing in cols.iter() {
            let overlap: Complex64 = existing
                .iter()
                .zip(v.iter())
                .map(|(e, x)| e.conj() * x)
                .sum();
            for (x, e) in v.iter_mut().zip(existing.iter()) {
                *x -= overlap * e;
            }
        }
        let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        if norm > 1e-8 {
            for x in v.iter_mut() {
                *x = x.unscale(norm);
            }
            cols.push(v);
        }
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (c, col) in cols.iter().enumerate() {
        u.set_column(c, col);
    }
    u
}
