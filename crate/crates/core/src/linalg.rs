//! Dense complex linear algebra for small tensor-product Hilbert spaces.
//!
//! Everything here targets ambient dimensions of at most ~64: storage is a
//! row-major `Vec<Complex64>`, the eigensolver is a cyclic Jacobi iteration,
//! and matrix exponentials of Hermitian generators go through the
//! eigendecomposition.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        for (idx, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite(idx));
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in diag.iter().enumerate() {
            m.set(i, i, z);
        }
        m
    }

    /// Convenience constructor from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
        )
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.cols + col] = value;
    }

    /// Kronecker product; the left factor carries the most significant index.
    pub fn tensor(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = ComplexMatrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn multiply(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix applied to a length-{} vector",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![Complex64::ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::ZERO;
            for j in 0..self.cols {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self.get(i, i)).sum())
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
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
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
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

    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry-wise absolute difference.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-abs deviation of `A - A†`; errors on non-square input.
    pub fn hermitian_deviation(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut dev = 0.0f64;
        for i in 0..self.rows {
            for j in 0..=i {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        Ok(dev)
    }
}

/// Ordered per-subsystem dimensions; subsystem 0 carries the most
/// significant index, so a product basis state `(i0, i1, ...)` sits at flat
/// index `((i0 * d1 + i1) * d2 + i2) ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemLayout {
    dims: Vec<usize>,
}

impl SubsystemLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::BadLayout("no subsystems".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::BadLayout(format!("subsystem dimension {d} < 2")));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn subsystem_count(&self) -> usize {
        self.dims.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn local_dim(&self, subsystem: usize) -> Result<usize> {
        self.dims
            .get(subsystem)
            .copied()
            .ok_or(Error::BadSubsystem {
                index: subsystem,
                count: self.dims.len(),
            })
    }

    /// Mixed-radix digits of a flat index, most significant first.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (pos, &d) in self.dims.iter().enumerate().rev() {
            out[pos] = index % d;
            index /= d;
        }
        out
    }
}

/// Reduced operator on one kept subsystem; trace is preserved.
pub fn partial_trace(
    rho: &ComplexMatrix,
    layout: &SubsystemLayout,
    keep: usize,
) -> Result<ComplexMatrix> {
    partial_trace_keep(rho, layout, &[keep])
}

/// Reduced operator on several kept subsystems (in layout order).
pub fn partial_trace_keep(
    rho: &ComplexMatrix,
    layout: &SubsystemLayout,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let ambient = layout.ambient_dim();
    if !rho.is_square() {
        return Err(Error::NotSquare {
            rows: rho.rows(),
            cols: rho.cols(),
        });
    }
    if rho.rows() != ambient {
        return Err(Error::DimensionMismatch(format!(
            "operator dim {} vs layout ambient dim {ambient}",
            rho.rows()
        )));
    }
    for &k in keep {
        if k >= layout.subsystem_count() {
            return Err(Error::BadSubsystem {
                index: k,
                count: layout.subsystem_count(),
            });
        }
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::InvalidArgument("repeated kept subsystem".into()));
    }

    let kept_dim: usize = kept.iter().map(|&k| layout.dims()[k]).product();
    let kept_index = |digits: &[usize]| -> usize {
        kept.iter()
            .fold(0usize, |acc, &k| acc * layout.dims()[k] + digits[k])
    };
    let traced: Vec<usize> = (0..layout.subsystem_count())
        .filter(|s| !kept.contains(s))
        .collect();

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for r in 0..ambient {
        let rd = layout.digits(r);
        for c in 0..ambient {
            let cd = layout.digits(c);
            if traced.iter().any(|&s| rd[s] != cd[s]) {
                continue;
            }
            let i = kept_index(&rd);
            let j = kept_index(&cd);
            let v = out.get(i, j) + rho.get(r, c);
            out.set(i, j, v);
        }
    }
    Ok(out)
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    /// Eigenvalues sorted descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, ordered to match `values`.
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.rows())
            .map(|i| self.vectors.get(i, k))
            .collect()
    }
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// The input must be Hermitian within `tol` (max-abs of `A - A†`).
/// Eigenvalues come back sorted descending; for degenerate eigenvalues the
/// eigenvector basis of the eigenspace is arbitrary but orthonormal.
pub fn hermitian_eigensystem(a: &ComplexMatrix, tol: f64) -> Result<Eigensystem> {
    let dev = a.hermitian_deviation()?;
    if dev > tol {
        return Err(Error::NotHermitian {
            deviation: dev,
            tol,
        });
    }
    let n = a.rows();

    // Symmetrized working copy kills the sub-tolerance asymmetry up front.
    let mut w = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            w.set(i, j, (a.get(i, j) + a.get(j, i).conj()) * 0.5);
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = w.frobenius_norm().max(1.0);
    let stop = 1e-15 * scale;

    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * w.get(p, q).norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = w.get(p, q);
                let mag = apq.norm();
                if mag <= stop / (n as f64 * n as f64) {
                    continue;
                }
                let phase = apq / mag;
                let app = w.get(p, p).re;
                let aqq = w.get(q, q).re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Column update with G[p][p]=c, G[p][q]=s, G[q][p]=-s*u*,
                // G[q][q]=c*u*, where u is the phase of the pivot entry.
                let su = Complex64::new(s, 0.0) * phase.conj();
                let cu = Complex64::new(c, 0.0) * phase.conj();
                for i in 0..n {
                    let wip = w.get(i, p);
                    let wiq = w.get(i, q);
                    w.set(i, p, wip * c - wiq * su);
                    w.set(i, q, wip * s + wiq * cu);
                }
                // Row update with G†.
                let su2 = Complex64::new(s, 0.0) * phase;
                let cu2 = Complex64::new(c, 0.0) * phase;
                for j in 0..n {
                    let wpj = w.get(p, j);
                    let wqj = w.get(q, j);
                    w.set(p, j, wpj * c - wqj * su2);
                    w.set(q, j, wpj * s + wqj * cu2);
                }
                w.set(p, q, Complex64::ZERO);
                w.set(q, p, Complex64::ZERO);
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * c - viq * su);
                    v.set(i, q, vip * s + viq * cu);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| w.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());

    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors.set(row, col, v.get(row, src));
        }
    }
    Ok(Eigensystem { values, vectors })
}

/// `exp(-i * h * phi)` for a Hermitian generator `h`, via eigendecomposition.
/// The result is unitary to within roundoff.
pub fn exp_generator(h: &ComplexMatrix, phi: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigensystem(h, 1e-10)?;
    let n = h.rows();
    let phases: Vec<Complex64> = eig
        .values
        .iter()
        .map(|&lambda| Complex64::from_polar(1.0, -lambda * phi))
        .collect();
    // V · diag(phases) · V†
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::ZERO;
            for k in 0..n {
                acc += eig.vectors.get(i, k) * phases[k] * eig.vectors.get(j, k).conj();
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}
