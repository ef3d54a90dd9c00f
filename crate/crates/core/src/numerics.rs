//! Dense complex matrices and the few decompositions the beamformers need.
//!
//! Matrices here are tiny (at most 8x8 in the default codebooks), so the
//! storage is a plain row-major `Vec<Complex64>` and the SVD is a one-sided
//! (Hestenes) Jacobi iteration, which is accurate to a few ulps at these
//! sizes and needs no external LAPACK.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{Result, SimError};

/// Maximum number of Jacobi sweeps before giving up on further rotations.
const MAX_SWEEPS: usize = 100;

/// Singular values below this fraction of the largest one are reported as
/// exact zeros and their left vectors are rebuilt by orthogonal completion.
const RANK_RTOL: f64 = 1e-12;

/// Relative tolerance used to break ties when picking the entry that fixes
/// the phase of a singular vector.
const PHASE_TIE_RTOL: f64 = 1e-9;

/// Moduli below this are treated as zero by [`unit_modulus_normalize`].
const DEGENERATE_MODULUS: f64 = 1e-15;

/// Row-major dense complex matrix with at least one row and one column.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting empty shapes,
    /// mismatched lengths and non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(SimError::Shape(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(SimError::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SimError::InvalidInput(
                "matrix entries must be finite".into(),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    /// Real-valued convenience constructor.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// # Panics
    /// If either dimension is zero.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix must be at least 1x1");
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| Complex64::new(0.0, 0.0))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Rectangular matrix with `values` on the main diagonal.
    pub fn diagonal(rows: usize, cols: usize, values: &[f64]) -> Self {
        Self::from_fn(rows, cols, |r, c| {
            if r == c && r < values.len() {
                Complex64::new(values[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// `n x 1` matrix holding `v`.
    pub fn column_vector(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), 1, |r, _| v[r])
    }

    /// `1 x n` matrix holding `v`.
    pub fn row_vector(v: &[Complex64]) -> Self {
        Self::from_fn(1, v.len(), |_, c| v[c])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    /// First `k` columns, i.e. `self * [I_k; 0]`.
    pub fn leading_columns(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.cols {
            return Err(SimError::Shape(format!(
                "cannot select {k} leading columns of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok(Self::from_fn(self.rows, k, |r, c| self[(r, c)]))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(SimError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                for c in 0..rhs.cols {
                    out.data[r * rhs.cols + c] += a * rhs[(k, c)];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(SimError::Shape(format!(
                "element-wise op on {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Frobenius distance from the identity of `self^H * self`.
    pub fn unitarity_error(&self) -> f64 {
        let gram = self.adjoint().matmul(self).expect("adjoint is conformable");
        gram.sub(&Self::identity(self.cols))
            .expect("gram is square")
            .frobenius_norm()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        assert!(
            r < self.rows && c < self.cols,
            "index ({r}, {c}) out of bounds"
        );
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        assert!(
            r < self.rows && c < self.cols,
            "index ({r}, {c}) out of bounds"
        );
        &mut self.data[r * self.cols + c]
    }
}

/// # Panics
/// On non-conformable shapes; use [`ComplexMatrix::matmul`] to get an error instead.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("non-conformable matrix product")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6e}{:+.6e}j  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Full SVD `M = left * diag(singular_values) * right^H`.
///
/// `left` is `m x m`, `right` is `n x n`, and `singular_values` holds the
/// `min(m, n)` values in descending order.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub left: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub right: ComplexMatrix,
}

impl SvdResult {
    /// Recomposes `left * Sigma * right^H`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let sigma =
            ComplexMatrix::diagonal(self.left.rows(), self.right.rows(), &self.singular_values);
        &(&self.left * &sigma) * &self.right.adjoint()
    }

    /// Largest singular value.
    pub fn sigma_max(&self) -> f64 {
        self.singular_values[0]
    }
}

/// Singular value decomposition with a fixed phase convention: every left
/// singular vector is rotated so its largest-magnitude entry (first one on
/// ties) is real and non-negative, and the paired right vector gets the same
/// rotation. The result is therefore a deterministic function of the input.
pub fn svd(m: &ComplexMatrix) -> Result<SvdResult> {
    if !m.is_finite() {
        return Err(SimError::InvalidInput("svd input must be finite".into()));
    }
    let mut result = if m.rows() >= m.cols() {
        jacobi_tall(m)
    } else {
        // A = V' S U'^H when A^H = U' S V'^H.
        let t = jacobi_tall(&m.adjoint());
        SvdResult {
            left: t.right,
            singular_values: t.singular_values,
            right: t.left,
        }
    };
    fix_phases(&mut result);
    Ok(result)
}

fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// One-sided Jacobi on a matrix with `rows >= cols`.
fn jacobi_tall(a: &ComplexMatrix) -> SvdResult {
    let (m, n) = a.shape();
    debug_assert!(m >= n);
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);

    let mut w: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { one } else { zero }).collect())
        .collect();

    let tol = f64::EPSILON * m as f64;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norm_sqr(&w[p]);
                let beta = norm_sqr(&w[q]);
                let gamma = dot_conj(&w[p], &w[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Strip the phase of gamma from column q, then apply the real
                // Jacobi rotation that orthogonalises the pair.
                let phase_conj = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                rotate_pair(&mut w, p, q, phase_conj, c, s);
                rotate_pair(&mut v, p, q, phase_conj, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = w.iter().map(|col| norm_sqr(col).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));

    let sigma_max = norms[order[0]];
    let mut singular_values = Vec::with_capacity(n);
    let mut left_cols: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    for &k in &order {
        let s = norms[k];
        if s > 0.0 && s > RANK_RTOL * sigma_max {
            singular_values.push(s);
            left_cols.push(w[k].iter().map(|z| z / s).collect());
        } else {
            singular_values.push(0.0);
        }
    }
    complete_orthonormal(&mut left_cols, m);

    let left = ComplexMatrix::from_fn(m, m, |r, c| left_cols[c][r]);
    let right = ComplexMatrix::from_fn(n, n, |r, c| v[order[c]][r]);
    SvdResult {
        left,
        singular_values,
        right,
    }
}

fn rotate_pair(
    cols: &mut [Vec<Complex64>],
    p: usize,
    q: usize,
    phase_conj: Complex64,
    c: f64,
    s: f64,
) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (xp, xq) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *xp;
        let b = *xq * phase_conj;
        *xp = a * c - b * s;
        *xq = a * s + b * c;
    }
}

/// Extends an orthonormal set of `dim`-vectors to a full basis by
/// Gram-Schmidt (two passes) over the standard basis, in index order.
fn complete_orthonormal(basis: &mut Vec<Vec<Complex64>>, dim: usize) {
    // Some standard basis vector always keeps a residual of at least 1/sqrt(dim).
    let accept = 0.5 / (dim as f64).sqrt();
    let mut candidate = 0;
    while basis.len() < dim && candidate < dim {
        let mut e = vec![Complex64::new(0.0, 0.0); dim];
        e[candidate] = Complex64::new(1.0, 0.0);
        candidate += 1;
        for _ in 0..2 {
            for b in basis.iter() {
                let proj = dot_conj(b, &e);
                for (x, y) in e.iter_mut().zip(b) {
                    *x -= proj * y;
                }
            }
        }
        let nrm = norm_sqr(&e).sqrt();
        if nrm > accept {
            basis.push(e.into_iter().map(|z| z / nrm).collect());
        }
    }
    debug_assert_eq!(basis.len(), dim);
}

fn phase_anchor(col: &[Complex64]) -> Option<Complex64> {
    let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return None;
    }
    let anchor = col
        .iter()
        .find(|z| z.norm() >= max * (1.0 - PHASE_TIE_RTOL))
        .copied()?;
    Some(anchor / anchor.norm())
}

fn fix_phases(res: &mut SvdResult) {
    let paired = res.singular_values.len();
    for k in 0..res.left.cols() {
        let Some(phase) = phase_anchor(&res.left.column(k)) else {
            continue;
        };
        let rot = phase.conj();
        for r in 0..res.left.rows() {
            res.left[(r, k)] *= rot;
        }
        // Rotating u_k and v_k together leaves u_k s_k v_k^H unchanged.
        if k < paired {
            for r in 0..res.right.rows() {
                res.right[(r, k)] *= rot;
            }
        }
    }
}

/// Forces every entry to modulus `target_modulus` while keeping its phase.
/// Entries with modulus below 1e-15 have no usable phase and map to
/// `target_modulus + 0j`.
pub fn unit_modulus_normalize(m: &ComplexMatrix, target_modulus: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.rows(), m.cols(), |r, c| {
        let z = m[(r, c)];
        let mag = z.norm();
        if mag < DEGENERATE_MODULUS {
            Complex64::new(target_modulus, 0.0)
        } else {
            z * (target_modulus / mag)
        }
    })
}
