//! Concrete frame families: Kronecker/Fourier mutually unbiased bases,
//! blockwise MUBs, random orthonormal bases, lapped MDCT bases and a small
//! catalogue of redundant tight frames.
//!
//! Every family is also reachable by name through [`FamilyRegistry`], which is
//! what the command-line `gen` subcommand dispatches on.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::frames::Frame;

/// Standard basis of `C^N`.
pub fn kronecker_basis(n: usize) -> Frame {
    assert!(n >= 1, "dimension must be positive");
    Frame::from_matrix_unchecked(format!("kronecker-{n}"), DMatrix::identity(n, n))
}

/// Fourier basis, `(v_l)_n = exp(2 pi i l n / N) / sqrt(N)`.
pub fn fourier_basis(n: usize) -> Frame {
    assert!(n >= 1, "dimension must be positive");
    let scale = 1.0 / (n as f64).sqrt();
    let m = DMatrix::from_fn(n, n, |l, t| {
        // reduce l*t mod n first so large phases stay exact
        let phase = 2.0 * PI * ((l * t) % n) as f64 / n as f64;
        Complex64::from_polar(scale, phase)
    });
    Frame::from_matrix_unchecked(format!("fourier-{n}"), m)
}

/// The Kronecker/Fourier mutually unbiased pair.
pub fn mub_pair(n: usize) -> (Frame, Frame) {
    (kronecker_basis(n), fourier_basis(n))
}

/// Blockwise MUB: Kronecker basis against a block-diagonal Fourier basis with
/// one block per entry of `block_dims`.
pub fn bmub(block_dims: &[usize]) -> Result<(Frame, Frame)> {
    if block_dims.is_empty() {
        return Err(Error::InvalidParameter("block list is empty".into()));
    }
    if block_dims.contains(&0) {
        return Err(Error::InvalidParameter("block dimensions must be positive".into()));
    }
    let n: usize = block_dims.iter().sum();
    let mut v = DMatrix::zeros(n, n);
    let mut offset = 0;
    for &nk in block_dims {
        let block = fourier_basis(nk);
        v.view_mut((offset, offset), (nk, nk)).copy_from(block.matrix());
        offset += nk;
    }
    let tag = block_dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("+");
    Ok((
        kronecker_basis(n),
        Frame::from_matrix_unchecked(format!("bmub-fourier-{tag}"), v),
    ))
}

fn random_onb(n: usize, rng: &mut ChaCha8Rng, label: String) -> Frame {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let sym = (&g + g.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut rows = DMatrix::<Complex64>::zeros(n, n);
    for (k, &col) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(col);
        let pivot = v.iamax();
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            rows[(k, i)] = Complex64::new(sign * v[i], 0.0);
        }
    }
    Frame::from_matrix_unchecked(label, rows)
}

/// Two independent orthonormal bases of `R^N`, each the eigenvector basis of
/// a symmetrised Gaussian matrix.
pub fn random_onb_pair(n: usize, seed: u64) -> Result<(Frame, Frame)> {
    if n < 2 {
        return Err(Error::InvalidParameter("random bases need N >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_onb(n, &mut rng, format!("random-onb-{n}-s{seed}-a"));
    let v = random_onb(n, &mut rng, format!("random-onb-{n}-s{seed}-b"));
    Ok((u, v))
}

/// `m` vectors in `C^n` with i.i.d. complex Gaussian entries.
pub fn random_frame(n: usize, m: usize, seed: u64) -> Result<Frame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_frame_with(n, m, &mut rng, format!("random-frame-{n}x{m}-s{seed}"))
}

fn random_frame_with(n: usize, m: usize, rng: &mut ChaCha8Rng, label: String) -> Result<Frame> {
    if n == 0 || m < n {
        return Err(Error::InvalidParameter(format!(
            "random frame needs 0 < N <= M, got N = {n}, M = {m}"
        )));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mat = DMatrix::from_fn(m, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(s * re, s * im)
    });
    Frame::from_matrix(label, mat)
}

/// Two independent random frames of `m` vectors in `C^n`.
pub fn random_frame_pair(n: usize, m: usize, seed: u64) -> Result<(Frame, Frame)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_frame_with(n, m, &mut rng, format!("random-frame-{n}x{m}-s{seed}-a"))?;
    let v = random_frame_with(n, m, &mut rng, format!("random-frame-{n}x{m}-s{seed}-b"))?;
    Ok((u, v))
}

/// Orthonormal lapped MDCT basis of `R^N` with a sine window of length
/// `window_len` and hop `window_len / 2`, wrapped periodically.
pub fn mdct_basis(n: usize, window_len: usize) -> Result<Frame> {
    if window_len < 2 || !window_len.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "MDCT window length must be even and >= 2, got {window_len}"
        )));
    }
    let hop = window_len / 2;
    if !n.is_multiple_of(hop) || n / hop < 2 {
        return Err(Error::InvalidParameter(format!(
            "MDCT needs N = L * {hop} with L >= 2, got N = {n}"
        )));
    }
    let frames = n / hop;
    let k = hop as f64;
    let norm = (2.0 / k).sqrt();
    let window: Vec<f64> = (0..window_len)
        .map(|t| (PI * (t as f64 + 0.5) / window_len as f64).sin())
        .collect();
    let mut rows = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..frames {
        for m in 0..hop {
            let row = j * hop + m;
            for (t, w) in window.iter().enumerate() {
                let phase = PI / k * (t as f64 + 0.5 + k / 2.0) * (m as f64 + 0.5);
                rows[(row, (j * hop + t) % n)] += Complex64::new(norm * w * phase.cos(), 0.0);
            }
        }
    }
    Ok(Frame::from_matrix_unchecked(format!("mdct-{n}-w{window_len}"), rows))
}

/// Catalogue of redundant tight frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TightKind {
    /// Three unit vectors at 120 degrees in `R^2`; `A = B = 3/2`.
    Mercedes,
    /// Kronecker and Fourier bases stacked; `A = B = 2`.
    UnionOfTwoBases,
    /// First `N` columns of the `count`-point DFT, unit-norm rows; `A = B = count / N`.
    Harmonic { count: usize },
}

impl FromStr for TightKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mercedes" => Ok(TightKind::Mercedes),
            "union2onb" => Ok(TightKind::UnionOfTwoBases),
            "harmonic" => Ok(TightKind::Harmonic { count: 0 }),
            other => Err(Error::UnknownName {
                kind: "tight frame",
                name: other.to_string(),
            }),
        }
    }
}

pub fn tight_frame(kind: TightKind, dim: usize) -> Result<Frame> {
    match kind {
        TightKind::Mercedes => {
            if dim != 2 {
                return Err(Error::InvalidParameter("the Mercedes frame lives in R^2".into()));
            }
            let s = 3f64.sqrt() / 2.0;
            Frame::from_real("mercedes", 2, &[vec![0.0, 1.0], vec![s, -0.5], vec![-s, -0.5]])
        }
        TightKind::UnionOfTwoBases => {
            if dim == 0 {
                return Err(Error::InvalidParameter("dimension must be positive".into()));
            }
            let mut m = DMatrix::zeros(2 * dim, dim);
            m.view_mut((0, 0), (dim, dim)).fill_with_identity();
            m.view_mut((dim, 0), (dim, dim)).copy_from(fourier_basis(dim).matrix());
            Frame::from_matrix(format!("union2onb-{dim}"), m)
        }
        TightKind::Harmonic { count } => {
            if dim == 0 || count < dim {
                return Err(Error::InvalidParameter(format!(
                    "harmonic frame needs 0 < N <= M, got N = {dim}, M = {count}"
                )));
            }
            let scale = 1.0 / (dim as f64).sqrt();
            let m = DMatrix::from_fn(count, dim, |k, t| {
                Complex64::from_polar(scale, 2.0 * PI * ((k * t) % count) as f64 / count as f64)
            });
            Frame::from_matrix(format!("harmonic-{count}x{dim}"), m)
        }
    }
}

/// Rotates every vector of a frame by `theta` in the plane of the first two
/// coordinates.
pub fn rotate_plane(frame: &Frame, theta: f64) -> Result<Frame> {
    if frame.dim() < 2 {
        return Err(Error::InvalidParameter("rotation needs dimension >= 2".into()));
    }
    let (s, c) = theta.sin_cos();
    let mut m = frame.matrix().clone();
    for k in 0..m.nrows() {
        let (x, y) = (m[(k, 0)], m[(k, 1)]);
        m[(k, 0)] = x * c - y * s;
        m[(k, 1)] = x * s + y * c;
    }
    Frame::from_matrix(format!("{}-rot{theta:.4}", frame.label()), m)
}

/// Parameters shared by every registered frame family.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub dim: usize,
    pub seed: u64,
    pub block_dims: Vec<usize>,
    pub window_lens: Vec<usize>,
    /// `M / N` for random and harmonic frames.
    pub redundancy: f64,
    pub tight: Option<String>,
}

impl GeneratorConfig {
    pub fn new(dim: usize) -> Self {
        GeneratorConfig {
            dim,
            seed: 0,
            block_dims: Vec::new(),
            window_lens: Vec::new(),
            redundancy: 2.0,
            tight: None,
        }
    }

    fn redundant_count(&self) -> Result<usize> {
        let m = (self.redundancy * self.dim as f64).round();
        if !(m >= self.dim as f64) {
            return Err(Error::InvalidParameter(format!(
                "redundancy {} gives fewer vectors than the dimension",
                self.redundancy
            )));
        }
        Ok(m as usize)
    }
}

/// A named generator producing one or more frames from a [`GeneratorConfig`].
pub trait FrameFamily: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn generate(&self, cfg: &GeneratorConfig) -> Result<Vec<Frame>>;
}

fn require_dim(cfg: &GeneratorConfig) -> Result<usize> {
    if cfg.dim == 0 {
        Err(Error::InvalidParameter("dimension must be positive".into()))
    } else {
        Ok(cfg.dim)
    }
}

struct Kronecker;
struct Fourier;
struct Mub;
struct Bmub;
struct RandomOnb;
struct RandomFrame;
struct Mdct;
struct Tight;

impl FrameFamily for Kronecker {
    fn name(&self) -> &'static str {
        "kronecker"
    }
    fn summary(&self) -> &'static str {
        "standard basis"
    }
    fn generate(&self, cfg: &GeneratorConfig) -> Result<Vec<Frame>> {
        Ok(vec![kronecker_basis(require_dim(cfg)?)])
    }
}

impl FrameFamily for Fourier {
    fn name(&self) -> &'static str {
        "fourier"
    }
    fn summary(&self) -> &'static str {
        "unitary DFT basis"
    }
    fn generate(&self, cfg: &GeneratorConfig) -> Result<Vec<Frame>> {
        Ok(vec![fourier_basis(require_dim(cfg)?)])
    }
}

impl FrameFamily for Mub {
    fn name(&self) -> &'static str {
        "mub"
    }
    fn summary(&self) -> &'static str {
        "Kronecker/Fourier mutually unbiased pair"
    }
    fn generate(&self, cfg: &GeneratorConfig) -> Result<Vec<Frame>> {
        let (u, v) = mub_pair(require_dim(cfg)?);
        Ok(vec![u, v])
    }
}

impl FrameFamily for Bmub {
    fn name(&self) -> &'static str {
        "bmub"
    }
    fn summary(&self) -> &'static str {
        "blockwise mutually unbiased pair (--blocks)"
    }
    fn generate(&self, cfg: &GeneratorConfig) -> Result<Vec<Frame>> {
        let total: usize = cfg.block_dims.iter().sum();
        if cfg.dim != 0 && total != cfg.dim {
            return Err(Error::InvalidParameter(format!(
                "blocks sum to {total}, expected dimension {}",
                cfg.dim
            )));
        }
        let (u, v) = bmub(&cfg.block_dims)?;
        Ok(vec![u, v])
    }
}

impl FrameFamily for RandomOnb {
    fn name(&self) -> &'static str {
        "random-onb"
    }
    fn summary(&self) -> &'static str {
        "pair of random orthonormal bases (--seed)"
    }
    fn generate(&self, cfg: &GeneratorConfig) -> Result<Vec<Frame>> {
        let (u, v) = random_onb_pair(require_dim(cfg)?, cfg.seed)?;
        Ok(vec![u, v])
    }
}

impl FrameFamily for RandomFrame {
    fn name(&self) -> &'static str {
        "random-frame"
    }
    fn summary(&self) -> &'static str {
        "pair of complex Gaussian frames with M = redundancy * N (--seed, --redundancy)"
    }
    fn generate(&self, cfg: &GeneratorConfig) -> Result<Vec<Frame>> {
        let n = require_dim(cfg)?;
        let (u, v) = random_frame_pair(n, cfg.redundant_count()?, cfg.seed)?;
        Ok(vec![u, v])
    }
}

impl FrameFamily for Mdct {
    fn name(&self) -> &'static str {
        "mdct"
    }
    fn summary(&self) -> &'static str {
        "sine-window MDCT basis, one per --window length"
    }
    fn generate(&self, cfg: &GeneratorConfig) -> Result<Vec<Frame>> {
        let n = require_dim(cfg)?;
        if cfg.window_lens.is_empty() {
            return Err(Error::InvalidParameter("mdct needs at least one window length".into()));
        }
        cfg.window_lens.iter().map(|&w| mdct_basis(n, w)).collect()
    }
}

impl FrameFamily for Tight {
    fn name(&self) -> &'static str {
        "tight"
    }
    fn summary(&self) -> &'static str {
        "catalogue tight frame: mercedes, union2onb, harmonic (--name)"
    }
    fn generate(&self, cfg: &GeneratorConfig) -> Result<Vec<Frame>> {
        let name = cfg
            .tight
            .as_deref()
            .ok_or_else(|| Error::InvalidParameter("tight frame needs a catalogue name".into()))?;
        let kind = match name.parse::<TightKind>()? {
            TightKind::Harmonic { .. } => TightKind::Harmonic {
                count: cfg.redundant_count()?,
            },
            k => k,
        };
        Ok(vec![tight_frame(kind, cfg.dim)?])
    }
}

/// Name-indexed collection of frame families.
pub struct FamilyRegistry {
    families: BTreeMap<&'static str, Box<dyn FrameFamily>>,
}

impl FamilyRegistry {
    pub fn empty() -> Self {
        FamilyRegistry {
            families: BTreeMap::new(),
        }
    }

    /// Registry holding every built-in family.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Kronecker));
        r.register(Box::new(Fourier));
        r.register(Box::new(Mub));
        r.register(Box::new(Bmub));
        r.register(Box::new(RandomOnb));
        r.register(Box::new(RandomFrame));
        r.register(Box::new(Mdct));
        r.register(Box::new(Tight));
        r
    }

    pub fn register(&mut self, family: Box<dyn FrameFamily>) {
        self.families.insert(family.name(), family);
    }

    pub fn get(&self, name: &str) -> Result<&dyn FrameFamily> {
        self.families
            .get(name)
            .map(|f| f.as_ref())
            .ok_or_else(|| Error::UnknownName {
                kind: "frame family",
                name: name.to_string(),
            })
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.families.keys().copied()
    }

    pub fn generate(&self, name: &str, cfg: &GeneratorConfig) -> Result<Vec<Frame>> {
        self.get(name)?.generate(cfg)
    }
}

impl Default for FamilyRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}
