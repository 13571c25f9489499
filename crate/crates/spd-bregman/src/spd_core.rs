//! Validated symmetric / SPD matrix types and eigendecomposition-based
//! matrix functions.
//!
//! `SymMatrix` holds an element of the space of symmetric matrices (the
//! tangent and dual space of the cone); `SpdMatrix` holds a validated
//! member of the open cone of positive definite matrices. Every matrix
//! function here goes through a symmetric eigendecomposition and the
//! result is explicitly re-symmetrized to suppress floating-point drift.

use nalgebra::DMatrix;

use crate::error::{Result, SpdError};

/// Relative cone-membership cutoff: a matrix is accepted as SPD when its
/// smallest eigenvalue exceeds `DEFAULT_SPD_TOL * max(1, |lambda|_max)`.
pub const DEFAULT_SPD_TOL: f64 = 1e-10;

/// Inputs whose relative asymmetry `|M - M^T|_F / |M|_F` exceeds this are
/// rejected; below it they are symmetrized by `(M + M^T)/2`.
pub const DEFAULT_ASYM_TOL: f64 = 1e-8;

/// Relative tolerance for the debug-build eigendecomposition
/// reconstruction check.
pub const EIG_RECONSTRUCTION_TOL: f64 = 1e-9;

/// A symmetric matrix with finite entries. Symmetry is exact: it is
/// enforced entrywise at construction by averaging with the transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    data: DMatrix<f64>,
}

impl SymMatrix {
    /// Builds a symmetric matrix from an arbitrary square matrix by exact
    /// symmetrization. Rejects non-square and non-finite input.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(SpdError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(SpdError::NotFinite);
        }
        Ok(Self::symmetrize_unchecked(&m))
    }

    /// Symmetrizes without the finiteness check; `m` must be square.
    pub(crate) fn symmetrize_unchecked(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut data = DMatrix::zeros(n, n);
        for i in 0..n {
            data[(i, i)] = m[(i, i)];
            for j in (i + 1)..n {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                data[(i, j)] = v;
                data[(j, i)] = v;
            }
        }
        Self { data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            let bad = rows.iter().map(|r| r.len()).max().unwrap_or(0);
            return Err(SpdError::NotSquare { rows: n, cols: bad });
        }
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(m)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            data: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: DMatrix::identity(n, n),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            data: DMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 }),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn trace(&self) -> f64 {
        self.data.trace()
    }

    pub fn scale(&self, s: f64) -> SymMatrix {
        SymMatrix {
            data: &self.data * s,
        }
    }

    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(SymMatrix {
            data: &self.data + &other.data,
        })
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(SymMatrix {
            data: &self.data - &other.data,
        })
    }

    /// Sorted symmetric eigendecomposition.
    pub fn eigen(&self) -> Result<EigenPair> {
        sym_eigen(&self.data)
    }

    /// FNV-1a digest of the dimension and entry bytes; used to reference
    /// matrices in reports and CLI documents.
    pub fn digest(&self) -> String {
        const OFFSET: u64 = 0xcbf29ce484222325;
        const PRIME: u64 = 0x100000001b3;
        let mut h = OFFSET;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= b as u64;
                h = h.wrapping_mul(PRIME);
            }
        };
        eat(&(self.dim() as u64).to_le_bytes());
        for v in self.data.iter() {
            eat(&v.to_le_bytes());
        }
        format!("{h:016x}")
    }
}

/// Result of a symmetric eigendecomposition, eigenvalues ascending and
/// eigenvectors stored as the columns of an orthogonal matrix.
#[derive(Debug, Clone)]
pub struct EigenPair {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl EigenPair {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    /// Assembles `V f(diag(lambda)) V^T`, re-symmetrized.
    pub fn assemble(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let flam = f(lam);
            for i in 0..n {
                scaled[(i, j)] = v[(i, j)] * flam;
            }
        }
        SymMatrix::symmetrize_unchecked(&(scaled * v.transpose()))
    }
}

fn sym_eigen(m: &DMatrix<f64>) -> Result<EigenPair> {
    let n = m.nrows();
    let decomp = m
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or(SpdError::EigFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        decomp.eigenvalues[a]
            .partial_cmp(&decomp.eigenvalues[b])
            .expect("finite eigenvalues")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&k| decomp.eigenvalues[k]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &decomp.eigenvectors.column(src));
    }
    let pair = EigenPair {
        eigenvalues,
        eigenvectors,
    };
    #[cfg(debug_assertions)]
    {
        let rebuilt = pair.assemble(|x| x);
        let scale = m.norm().max(f64::MIN_POSITIVE);
        let resid = (rebuilt.as_matrix() - m).norm() / scale;
        debug_assert!(
            resid <= EIG_RECONSTRUCTION_TOL,
            "eigendecomposition reconstruction residual {resid:e}"
        );
        let vtv = pair.eigenvectors.transpose() * &pair.eigenvectors;
        let orth = (vtv - DMatrix::<f64>::identity(n, n)).norm();
        debug_assert!(orth <= EIG_RECONSTRUCTION_TOL * (n as f64), "V^T V residual {orth:e}");
    }
    Ok(pair)
}

/// A validated symmetric positive definite matrix with its extreme
/// eigenvalues cached at validation time.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    base: SymMatrix,
    min_eigenvalue: f64,
    max_eigenvalue: f64,
}

impl SpdMatrix {
    /// Validates cone membership. `base_tol` is the relative cutoff
    /// (`DEFAULT_SPD_TOL` in most call sites); the effective cutoff is
    /// `base_tol * max(1, |lambda|_max)`.
    pub fn validate(m: DMatrix<f64>, base_tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(SpdError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(SpdError::NotFinite);
        }
        let norm = m.norm();
        if norm > 0.0 {
            let asym = (&m - m.transpose()).norm() / norm;
            if asym > DEFAULT_ASYM_TOL {
                return Err(SpdError::AsymmetryTooLarge { relative: asym });
            }
        }
        let base = SymMatrix::symmetrize_unchecked(&m);
        let eig = base.eigen()?;
        let min = eig.min_eigenvalue();
        let max = eig.max_eigenvalue();
        let cutoff = base_tol * max.abs().max(min.abs()).max(1.0);
        if min <= cutoff {
            return Err(SpdError::NotPositiveDefinite {
                min_eigenvalue: min,
            });
        }
        Ok(Self {
            base,
            min_eigenvalue: min,
            max_eigenvalue: max,
        })
    }

    pub fn from_sym(s: SymMatrix, base_tol: f64) -> Result<Self> {
        Self::validate(s.into_matrix(), base_tol)
    }

    /// Builds `V f(diag(lambda)) V^T` for strictly positive `f(lambda)`,
    /// caching the mapped spectrum instead of re-decomposing. Rejects
    /// mapped eigenvalues that are non-finite or not strictly positive.
    pub(crate) fn from_spectral(eig: &EigenPair, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mapped: Vec<f64> = eig.eigenvalues().iter().map(|&l| f(l)).collect();
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for &v in &mapped {
            if !v.is_finite() {
                return Err(SpdError::NotFinite);
            }
            min = min.min(v);
            max = max.max(v);
        }
        if min <= 0.0 {
            return Err(SpdError::NotPositiveDefinite {
                min_eigenvalue: min,
            });
        }
        Ok(Self {
            base: eig.assemble(f),
            min_eigenvalue: min,
            max_eigenvalue: max,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            base: SymMatrix::identity(n),
            min_eigenvalue: 1.0,
            max_eigenvalue: 1.0,
        }
    }

    pub fn sym(&self) -> &SymMatrix {
        &self.base
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        self.base.as_matrix()
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.max_eigenvalue
    }

    pub fn condition_number(&self) -> f64 {
        self.max_eigenvalue / self.min_eigenvalue
    }

    pub fn eigen(&self) -> Result<EigenPair> {
        self.base.eigen()
    }

    pub fn digest(&self) -> String {
        self.base.digest()
    }
}

/// Validates an arbitrary square matrix as SPD; see [`SpdMatrix::validate`].
pub fn validate_spd(m: DMatrix<f64>, tol: f64) -> Result<SpdMatrix> {
    SpdMatrix::validate(m, tol)
}

/// Scalar functions lifted to SPD matrices through the eigendecomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatrixFn {
    Log,
    Exp,
    Sqrt,
    Power(f64),
    Inverse,
    /// `-X^{-1}`, the Burg-entropy gradient.
    NegInverse,
}

impl MatrixFn {
    fn apply(self, lam: f64) -> f64 {
        match self {
            MatrixFn::Log => lam.ln(),
            MatrixFn::Exp => lam.exp(),
            MatrixFn::Sqrt => lam.sqrt(),
            MatrixFn::Power(t) => lam.powf(t),
            MatrixFn::Inverse => 1.0 / lam,
            MatrixFn::NegInverse => -1.0 / lam,
        }
    }

    /// Whether the scalar function maps positive input to positive output,
    /// so that the lifted result stays in the cone.
    fn positive_range(self) -> bool {
        !matches!(self, MatrixFn::Log | MatrixFn::NegInverse)
    }
}

/// `V f(diag(lambda)) V^T` from the eigendecomposition of `a`.
pub fn matrix_function(a: &SpdMatrix, f: MatrixFn) -> Result<SymMatrix> {
    if let MatrixFn::Power(t) = f {
        if !t.is_finite() {
            return Err(SpdError::NotFinite);
        }
    }
    let eig = a.eigen()?;
    if f.positive_range() {
        // Revalidate cheaply through the mapped spectrum.
        return Ok(SpdMatrix::from_spectral(&eig, |l| f.apply(l))?.base);
    }
    Ok(eig.assemble(|l| f.apply(l)))
}

/// As [`matrix_function`] but keeps the SPD certificate for
/// positive-range functions (exp, sqrt, power, inverse).
pub fn matrix_function_spd(a: &SpdMatrix, f: MatrixFn) -> Result<SpdMatrix> {
    if let MatrixFn::Power(t) = f {
        if !t.is_finite() {
            return Err(SpdError::NotFinite);
        }
    }
    if !f.positive_range() {
        return Err(SpdError::NotPositiveDefinite {
            min_eigenvalue: f64::NEG_INFINITY,
        });
    }
    let eig = a.eigen()?;
    SpdMatrix::from_spectral(&eig, |l| f.apply(l))
}

/// `exp(S)` for symmetric `S`; always lands in the cone.
pub fn sym_exp_spd(s: &SymMatrix) -> Result<SpdMatrix> {
    let eig = s.eigen()?;
    SpdMatrix::from_spectral(&eig, f64::exp)
}

/// Frobenius inner product `trace(x y)` of two symmetric matrices,
/// computed as the sum of elementwise products.
pub fn frobenius_inner(x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
    check_same_dim(x.dim(), y.dim())?;
    Ok(x.as_matrix()
        .iter()
        .zip(y.as_matrix().iter())
        .map(|(a, b)| a * b)
        .sum())
}

/// The invariant metric `trace(A^{-1} X A^{-1} Y)` at base point `A`.
pub fn riemannian_metric(a: &SpdMatrix, x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
    check_same_dim(a.dim(), x.dim())?;
    check_same_dim(a.dim(), y.dim())?;
    let a_inv = matrix_function(a, MatrixFn::Inverse)?;
    let p = a_inv.as_matrix();
    Ok((p * x.as_matrix() * p * y.as_matrix()).trace())
}

/// Minimal geodesic `A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}` for
/// `t` in `[0, 1]`, revalidated SPD.
pub fn geodesic(a: &SpdMatrix, b: &SpdMatrix, t: f64) -> Result<SpdMatrix> {
    check_same_dim(a.dim(), b.dim())?;
    if !(0.0..=1.0).contains(&t) {
        return Err(SpdError::TOutOfRange { t });
    }
    let eig_a = a.eigen()?;
    let a_half = SpdMatrix::from_spectral(&eig_a, f64::sqrt)?;
    let a_inv_half = SpdMatrix::from_spectral(&eig_a, |l| 1.0 / l.sqrt())?;
    let inner = SymMatrix::symmetrize_unchecked(
        &(a_inv_half.as_matrix() * b.as_matrix() * a_inv_half.as_matrix()),
    );
    let inner_t = SpdMatrix::from_spectral(&inner.eigen()?, |l| l.powf(t))?;
    let out = a_half.as_matrix() * inner_t.as_matrix() * a_half.as_matrix();
    SpdMatrix::validate(out, DEFAULT_SPD_TOL)
}

/// Löwner order test: `a <= b` iff the smallest eigenvalue of `b - a`
/// is at least `-tol`.
pub fn loewner_leq(a: &SymMatrix, b: &SymMatrix, tol: f64) -> Result<bool> {
    check_same_dim(a.dim(), b.dim())?;
    let diff = b.sub(a)?;
    Ok(diff.eigen()?.min_eigenvalue() >= -tol)
}

/// Applies the Schur multiplier `dd(lambda_i, lambda_j)` in the eigenbasis
/// of `eig` to the symmetric direction `s`. With `dd` the first divided
/// difference of a scalar function `f`, this is the Daleckii–Krein
/// directional derivative of the lifted matrix function at the
/// decomposed point along `s`.
pub fn daleckii_krein_apply(
    eig: &EigenPair,
    s: &SymMatrix,
    dd: impl Fn(f64, f64) -> f64,
) -> Result<SymMatrix> {
    let n = eig.eigenvalues().len();
    check_same_dim(n, s.dim())?;
    let v = eig.eigenvectors();
    let mut t = v.transpose() * s.as_matrix() * v;
    for i in 0..n {
        for j in 0..n {
            t[(i, j)] *= dd(eig.eigenvalues()[i], eig.eigenvalues()[j]);
        }
    }
    Ok(SymMatrix::symmetrize_unchecked(&(v * t * v.transpose())))
}

/// First divided difference of `ln` with the `1/x` diagonal limit,
/// evaluated cancellation-free through `ln_1p`.
pub fn dd_log(a: f64, b: f64) -> f64 {
    let d = a - b;
    if d == 0.0 {
        return 1.0 / a;
    }
    let r = d / b;
    if r > -1.0 {
        r.ln_1p() / d
    } else {
        (a.ln() - b.ln()) / d
    }
}

/// First divided difference of `exp` with the `e^x` diagonal limit,
/// evaluated cancellation-free through `exp_m1`.
pub fn dd_exp(a: f64, b: f64) -> f64 {
    let d = a - b;
    if d == 0.0 {
        return a.exp();
    }
    b.exp() * d.exp_m1() / d
}

pub(crate) fn check_same_dim(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(SpdError::DimMismatch { left, right })
    }
}
