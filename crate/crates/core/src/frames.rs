//! Finite frames in `C^N`: analysis, synthesis, frame bounds, canonical duals
//! and the change-of-frame operator.
//!
//! Frame vectors are stored as the rows of an `M x N` complex matrix. The inner
//! product is linear in its first argument, `<x, u> = sum_i x_i conj(u_i)`, so the
//! analysis coefficients of `x` are `a_k = <x, u_k>`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{ensure_dim, Error, Result};

/// Default relative threshold below which a coefficient counts as zero.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-8;

/// A family is accepted as a frame when its lower bound exceeds this
/// fraction of the upper bound.
pub const FRAME_RANK_TOL: f64 = 1e-12;

/// Largest `B/A` accepted when inverting the frame operator.
pub const DEFAULT_CONDITION_CAP: f64 = 1e12;

/// Two frame bounds closer than this (relative to `B`) make a frame tight.
pub const TIGHTNESS_TOL: f64 = 1e-9;

/// An indexed family of vectors spanning `C^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    label: String,
    vectors: DMatrix<Complex64>,
}

/// Optimal frame bounds `A <= B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    pub fn is_tight(&self) -> bool {
        (self.upper - self.lower) / self.upper < TIGHTNESS_TOL
    }

    /// `B / A`.
    pub fn condition(&self) -> f64 {
        self.upper / self.lower
    }
}

impl Frame {
    /// Builds a frame from its vectors, each of length `dim`.
    pub fn new(label: impl Into<String>, dim: usize, vectors: &[Vec<Complex64>]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::NotAFrame("dimension must be positive".into()));
        }
        let mut m = DMatrix::zeros(vectors.len(), dim);
        for (k, v) in vectors.iter().enumerate() {
            ensure_dim(dim, v.len())?;
            for (i, z) in v.iter().enumerate() {
                m[(k, i)] = *z;
            }
        }
        Self::from_matrix(label, m)
    }

    /// Builds a frame from real vectors.
    pub fn from_real(label: impl Into<String>, dim: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = vectors
            .iter()
            .map(|v| v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::new(label, dim, &rows)
    }

    /// Builds a frame whose vectors are the rows of `vectors`, validating that
    /// the rows are nonzero and span the ambient space.
    pub fn from_matrix(label: impl Into<String>, vectors: DMatrix<Complex64>) -> Result<Self> {
        let (m, n) = vectors.shape();
        if n == 0 {
            return Err(Error::NotAFrame("dimension must be positive".into()));
        }
        if m < n {
            return Err(Error::NotAFrame(format!(
                "{m} vectors cannot span a space of dimension {n}"
            )));
        }
        if let Some(k) = (0..m).find(|&k| !(vectors.row(k).norm() > 0.0)) {
            return Err(Error::NotAFrame(format!("vector {k} has zero norm")));
        }
        let frame = Frame {
            label: label.into(),
            vectors,
        };
        let b = frame.bounds();
        if !(b.lower > FRAME_RANK_TOL * b.upper) {
            return Err(Error::NotAFrame(format!(
                "vectors do not span the space (A = {:.3e}, B = {:.3e})",
                b.lower, b.upper
            )));
        }
        Ok(frame)
    }

    pub(crate) fn from_matrix_unchecked(label: impl Into<String>, vectors: DMatrix<Complex64>) -> Self {
        Frame {
            label: label.into(),
            vectors,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Ambient dimension `N`.
    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    /// Number of frame vectors `M`.
    pub fn len(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.nrows() == 0
    }

    /// The `M x N` matrix whose rows are the frame vectors.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.vectors
    }

    /// The `k`-th frame vector as a column vector.
    pub fn vector(&self, k: usize) -> DVector<Complex64> {
        self.vectors.row(k).transpose()
    }

    /// Frame operator `S = sum_k u_k u_k^H`.
    pub fn frame_operator(&self) -> DMatrix<Complex64> {
        self.vectors.transpose() * self.vectors.conjugate()
    }

    /// Analysis coefficients `a_k = <x, u_k>`.
    pub fn analyze(&self, x: &DVector<Complex64>) -> Result<CoefficientSeq> {
        ensure_dim(self.dim(), x.len())?;
        Ok(CoefficientSeq::new(self.vectors.conjugate() * x))
    }

    /// Synthesis `sum_k c_k u_k`.
    pub fn synthesize(&self, c: &CoefficientSeq) -> Result<DVector<Complex64>> {
        ensure_dim(self.len(), c.len())?;
        Ok(self.vectors.transpose() * c.values())
    }

    /// Optimal frame bounds: extreme eigenvalues of the frame operator.
    pub fn bounds(&self) -> FrameBounds {
        let eig = SymmetricEigen::new(self.frame_operator()).eigenvalues;
        let lower = eig.iter().copied().fold(f64::INFINITY, f64::min);
        let upper = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        FrameBounds { lower, upper }
    }

    pub fn is_tight(&self) -> bool {
        self.bounds().is_tight()
    }

    /// Canonical dual `u~_k = S^{-1} u_k`.
    pub fn canonical_dual(&self) -> Result<Frame> {
        self.canonical_dual_with_cap(DEFAULT_CONDITION_CAP)
    }

    pub fn canonical_dual_with_cap(&self, cap: f64) -> Result<Frame> {
        let eig = SymmetricEigen::new(self.frame_operator());
        let lower = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let upper = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let condition = upper / lower;
        if !(lower > 0.0) || !(condition <= cap) {
            return Err(Error::IllConditioned { condition, cap });
        }
        let q = &eig.eigenvectors;
        let inv_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(1.0 / l, 0.0)));
        let s_inv = q * inv_diag * q.adjoint();
        let dual = &self.vectors * s_inv.transpose();
        Ok(Frame::from_matrix_unchecked(format!("{}~", self.label), dual))
    }

    /// Largest deviation of `sum_k <x, u_k> d_k` from `x`, measured as the
    /// max-entry distance of `D^T conj(U)` from the identity.
    pub fn dual_defect(&self, dual: &Frame) -> Result<f64> {
        ensure_dim(self.dim(), dual.dim())?;
        ensure_dim(self.len(), dual.len())?;
        let mixed = dual.vectors.transpose() * self.vectors.conjugate();
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((mixed[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        Ok(worst)
    }
}

/// Change-of-frame operator `T = V U^+`, realised through the canonical dual
/// of `U`: `T[l][k] = <u~_k, v_l>`. `T (U x) = V x` for every `x`.
pub fn change_of_frame(u: &Frame, v: &Frame) -> Result<DMatrix<Complex64>> {
    ensure_dim(u.dim(), v.dim())?;
    let dual = u.canonical_dual()?;
    Ok(v.matrix().conjugate() * dual.matrix().transpose())
}

/// Spectral norm (largest singular value).
pub fn operator_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Analysis coefficient sequence together with the tolerance that defines its
/// numerical support.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSeq {
    values: DVector<Complex64>,
    support_tol: f64,
}

impl CoefficientSeq {
    pub fn new(values: DVector<Complex64>) -> Self {
        CoefficientSeq {
            values,
            support_tol: DEFAULT_SUPPORT_TOL,
        }
    }

    pub fn from_slice(values: &[Complex64]) -> Self {
        Self::new(DVector::from_column_slice(values))
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(DVector::from_iterator(
            values.len(),
            values.iter().map(|&x| Complex64::new(x, 0.0)),
        ))
    }

    pub fn with_support_tol(mut self, tol: f64) -> Self {
        self.support_tol = tol;
        self
    }

    pub fn values(&self) -> &DVector<Complex64> {
        &self.values
    }

    pub fn support_tol(&self) -> f64 {
        self.support_tol
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    pub fn moduli(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().map(|z| z.norm())
    }

    pub fn norm_inf(&self) -> f64 {
        self.moduli().fold(0.0, f64::max)
    }

    /// `l^p` norm for `p` in `(0, inf]`.
    pub fn norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.norm_inf();
        }
        let m = self.norm_inf();
        if m == 0.0 {
            return 0.0;
        }
        let s: f64 = self.moduli().map(|x| (x / m).powf(p)).sum();
        m * s.powf(1.0 / p)
    }

    pub fn norm2(&self) -> f64 {
        self.values.norm()
    }

    /// Indices `k` with `|a_k| > tol * max_j |a_j|`.
    pub fn support(&self) -> Vec<usize> {
        self.support_above(self.support_tol * self.norm_inf())
    }

    /// Indices `k` with `|a_k| > floor` for an absolute floor.
    pub fn support_above(&self, floor: f64) -> Vec<usize> {
        self.moduli()
            .enumerate()
            .filter(|&(_, m)| m > floor)
            .map(|(k, _)| k)
            .collect()
    }

    /// Size of the numerical support.
    pub fn l0(&self) -> usize {
        self.support().len()
    }

    /// `a / ||a||_2`; fails for the zero sequence.
    pub fn normalized(&self) -> Result<CoefficientSeq> {
        let n = self.norm2();
        if !(n > 0.0) {
            return Err(Error::ZeroSignal);
        }
        Ok(CoefficientSeq {
            values: self.values.unscale(n),
            support_tol: self.support_tol,
        })
    }
}
