//! Small dense complex matrices and the Hermitian eigen-machinery used by
//! every other module.
//!
//! Dimensions never exceed 4 here, so the eigensolver is a cyclic complex
//! Jacobi iteration with in-place plane rotations.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Entrywise Hermiticity tolerance accepted by the eigen-routines.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Smallest eigenvalue tolerated before a matrix is declared not PSD.
pub const PSD_TOL: f64 = 1e-9;

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("matrix must have at least one row and column".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from separate real and imaginary row-major parts.
    pub fn from_parts(rows: usize, cols: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::Dimension(format!("real part has {} entries, imaginary part {}", re.len(), im.len())));
        }
        Self::new(rows, cols, re.iter().zip(im).map(|(&a, &b)| c(a, b)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::default(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = re(1.0);
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = re(d);
        }
        m
    }

    /// Outer product |u⟩⟨v|.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, a) in u.iter().enumerate() {
            for (j, b) in v.iter().enumerate() {
                m[(i, j)] = a * b.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.re).collect()
    }

    pub fn imag_parts(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.im).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, k: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * k).collect() }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(re(k))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    fn offdiag_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    /// Tr[self · other] without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = C64::default();
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::default() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix { rows: 2, cols: 2, data: vec![re(0.0), re(1.0), re(1.0), re(0.0)] }
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix { rows: 2, cols: 2, data: vec![re(0.0), c(0.0, -1.0), c(0.0, 1.0), re(0.0)] }
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, -1.0])
}

/// σ₀ = I, σ₁ = σ_x, σ₂ = σ_y, σ₃ = σ_z.
pub fn pauli(index: usize) -> ComplexMatrix {
    match index {
        0 => ComplexMatrix::identity(2),
        1 => pauli_x(),
        2 => pauli_y(),
        3 => pauli_z(),
        _ => panic!("Pauli index {index} out of range"),
    }
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix. `values` are sorted
/// descending and column `k` of `vectors` is the eigenvector of `values[k]`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// Rebuilds V · f(Λ) · V†.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("expected a square matrix, got {}x{}", m.rows, m.cols)));
    }
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    check_hermitian(m)?;
    let n = m.rows;
    // symmetrize so rounding in the input cannot bias the rotations
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)] = re(a[(i, i)].re);
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let tol = JACOBI_TOL * a.frobenius_norm().max(1.0);

    let mut converged = a.offdiag_norm() < tol;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        converged = a.offdiag_norm() < tol;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, dst)] = v[(i, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// One Jacobi plane rotation annihilating a[p][q]. The rotation is
/// J = diag phase · real Givens · phase†, which keeps the diagonal real.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 { 1.0 / (tau + (1.0 + tau * tau).sqrt()) } else { -1.0 / (-tau + (1.0 + tau * tau).sqrt()) };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;
    let n = a.rows;

    // A <- A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * cs - akq * phase.conj() * sn;
        a[(k, q)] = akp * phase * sn + akq * cs;
    }
    // A <- J† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * cs - aqk * phase * sn;
        a[(q, k)] = apk * phase.conj() * sn + aqk * cs;
    }
    // V <- V J
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * cs - vkq * phase.conj() * sn;
        v[(k, q)] = vkp * phase * sn + vkq * cs;
    }
    a[(p, q)] = C64::default();
    a[(q, p)] = C64::default();
    a[(p, p)] = re(a[(p, p)].re);
    a[(q, q)] = re(a[(q, q)].re);
}

/// Real eigenvalues of a Hermitian matrix, sorted descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigen(m).map(|e| e.values)
}

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// [−1e−9, 0) are treated as zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(m)?;
    let min = eig.values.last().copied().unwrap_or(0.0);
    if min < -PSD_TOL {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    Ok(eig.reconstruct_with(|x| x.max(0.0).sqrt()))
}

/// Singular values, descending, by one-sided (Hestenes) Jacobi.
///
/// Small singular values come out with absolute accuracy near machine
/// epsilon times the norm, unlike square roots of eigenvalues of M†M.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok(vec![0.0; cols.min(rows)]);
    }
    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, C64::default());
                for k in 0..rows {
                    let (x, y) = (a[(k, p)], a[(k, q)]);
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let mag = gamma.norm();
                // each inner product carries `rows` rounding errors
                if mag <= rows as f64 * f64::EPSILON * (alpha * beta).sqrt() || mag <= 1e-300 {
                    continue;
                }
                rotated = true;
                let phase = gamma / mag;
                let zeta = (beta - alpha) / (2.0 * mag);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                for k in 0..rows {
                    let (x, y) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = x * cs - y * phase.conj() * sn;
                    a[(k, q)] = x * phase * sn + y * cs;
                }
            }
        }
        if !rotated {
            break;
        }
        sweeps += 1;
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
    }
    let mut values: Vec<f64> = (0..cols).map(|j| (0..rows).map(|k| a[(k, j)].norm_sqr()).sum::<f64>().sqrt()).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    values.truncate(rows.min(cols));
    Ok(values)
}

/// Like [`psd_sqrt`], but eigenvalues below `rel_cutoff` times the largest
/// are set to zero, so rank-deficient inputs keep their exact rank.
pub fn psd_sqrt_truncated(m: &ComplexMatrix, rel_cutoff: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(m)?;
    let min = eig.values.last().copied().unwrap_or(0.0);
    if min < -PSD_TOL {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let cutoff = rel_cutoff * eig.values.first().copied().unwrap_or(0.0).max(0.0);
    Ok(eig.reconstruct_with(|x| if x <= cutoff { 0.0 } else { x.sqrt() }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) {
        let d = a.max_abs_diff(b);
        assert!(d <= tol, "difference {d:e} exceeds {tol:e}\n{a:?}\n{b:?}");
    }

    /// Kronecker product straight from the index formula
    /// (a⊗b)[i][j] = a[i / rb][j / cb] · b[i % rb][j % cb].
    fn kron_by_index(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        let (rb, cb) = (b.rows(), b.cols());
        let rows = a.rows() * rb;
        let cols = a.cols() * cb;
        let data = (0..rows * cols)
            .map(|idx| {
                let (i, j) = (idx / cols, idx % cols);
                a[(i / rb, j / cb)] * b[(i % rb, j % cb)]
            })
            .collect();
        ComplexMatrix::new(rows, cols, data).unwrap()
    }

    #[test]
    fn kron_identity_and_diagonal() {
        assert_eq!(kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)), ComplexMatrix::identity(4));
        assert_eq!(kron(&pauli_z(), &pauli_z()), ComplexMatrix::from_real_diag(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn kron_yy_is_antidiagonal() {
        let yy = kron(&pauli_y(), &pauli_y());
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected[(0, 3)] = re(-1.0);
        expected[(1, 2)] = re(1.0);
        expected[(2, 1)] = re(1.0);
        expected[(3, 0)] = re(-1.0);
        assert_close(&yy, &expected, 0.0);
        assert_close(&yy, &kron_by_index(&pauli_y(), &pauli_y()), 0.0);
    }

    #[test]
    fn kron_matches_index_formula_for_rectangular() {
        let a = ComplexMatrix::new(2, 3, (0..6).map(|k| c(k as f64, 1.0 - k as f64)).collect()).unwrap();
        let b = ComplexMatrix::new(3, 1, vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)]).unwrap();
        assert_close(&kron(&a, &b), &kron_by_index(&a, &b), 0.0);
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(matches!(ComplexMatrix::new(2, 2, vec![re(1.0); 3]), Err(Error::Dimension(_))));
        assert!(matches!(ComplexMatrix::new(1, 2, vec![re(1.0), re(f64::NAN)]), Err(Error::NonFinite)));
    }

    #[test]
    fn pauli_spectra() {
        for k in 1..=3 {
            let ev = hermitian_eigenvalues(&pauli(k)).unwrap();
            assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] + 1.0).abs() < 1e-14, "{ev:?}");
        }
        assert_eq!(hermitian_eigenvalues(&ComplexMatrix::identity(4)).unwrap(), vec![1.0; 4]);
        let d = ComplexMatrix::from_real_diag(&[0.1, 0.0, 0.9, 0.0]);
        assert_eq!(hermitian_eigenvalues(&d).unwrap(), vec![0.9, 0.1, 0.0, 0.0]);
    }

    #[test]
    fn eigenvectors_diagonalize() {
        let mut m = ComplexMatrix::zeros(3, 3);
        m[(0, 0)] = re(2.0);
        m[(1, 1)] = re(-1.0);
        m[(2, 2)] = re(0.5);
        m[(0, 1)] = c(0.3, 0.7);
        m[(1, 0)] = c(0.3, -0.7);
        m[(1, 2)] = c(0.0, -1.1);
        m[(2, 1)] = c(0.0, 1.1);
        let eig = hermitian_eigen(&m).unwrap();
        assert_close(&eig.reconstruct_with(|x| x), &m, 1e-12);
        let vtv = &eig.vectors.adjoint() * &eig.vectors;
        assert_close(&vtv, &ComplexMatrix::identity(3), 1e-12);
        assert!((eig.values.iter().sum::<f64>() - m.trace().re).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = re(1.0);
        assert!(matches!(hermitian_eigenvalues(&m), Err(Error::NotHermitian { .. })));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eigenvalues(&rect), Err(Error::Dimension(_))));
    }

    #[test]
    fn sqrt_examples() {
        assert_close(&psd_sqrt(&ComplexMatrix::identity(4)).unwrap(), &ComplexMatrix::identity(4), 1e-14);
        let d = ComplexMatrix::from_real_diag(&[4.0, 1.0, 0.0, 0.0]);
        assert_close(&psd_sqrt(&d).unwrap(), &ComplexMatrix::from_real_diag(&[2.0, 1.0, 0.0, 0.0]), 1e-14);
        let proj = ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0, 0.0]);
        assert_close(&psd_sqrt(&proj).unwrap(), &proj, 1e-14);
    }

    #[test]
    fn sqrt_clamps_tiny_negative_and_rejects_large() {
        let d = ComplexMatrix::from_real_diag(&[1.0, -5e-10]);
        assert_close(&psd_sqrt(&d).unwrap(), &ComplexMatrix::from_real_diag(&[1.0, 0.0]), 1e-14);
        let bad = ComplexMatrix::from_real_diag(&[1.0, -1e-6]);
        assert!(matches!(psd_sqrt(&bad), Err(Error::NotPsd { .. })));
    }
    #[test]
    fn singular_values_match_gram_spectrum() {
        let m = ComplexMatrix::new(
            3,
            3,
            vec![
                c(1.0, 0.5),
                c(-0.3, 0.0),
                c(0.2, -0.7),
                c(0.0, 1.0),
                c(2.0, 0.1),
                c(-1.0, 0.0),
                c(0.4, 0.4),
                c(0.0, 0.0),
                c(0.9, -0.2),
            ],
        )
        .unwrap();
        let sv = singular_values(&m).unwrap();
        let gram = hermitian_eigenvalues(&(&m.adjoint() * &m)).unwrap();
        for (s, g) in sv.iter().zip(&gram) {
            assert!((s * s - g).abs() < 1e-12, "{sv:?} vs {gram:?}");
        }
    }

    #[test]
    fn singular_values_of_rank_one_are_exactly_small() {
        let u = [c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)];
        let m = ComplexMatrix::outer(&u, &u);
        let sv = singular_values(&m).unwrap();
        assert!((sv[0] - 1.0).abs() < 1e-15);
        assert!(sv[1] < 1e-15 && sv[2] < 1e-15, "{sv:?}");
        assert_eq!(singular_values(&ComplexMatrix::zeros(2, 2)).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn truncated_sqrt_keeps_rank() {
        let u = [c(0.6, 0.0), c(0.0, 0.8)];
        let proj = ComplexMatrix::outer(&u, &u);
        let s = psd_sqrt_truncated(&proj, 1e-14).unwrap();
        assert!(s.max_abs_diff(&proj) < 1e-15);
    }
}
