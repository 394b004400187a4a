//! Randomised and structured verification of the uncertainty inequalities,
//! equality-case diagnostics and the stationarity residual for tight frames.
//!
//! Each inequality family is a named [`InequalityFamily`] that expands into
//! concrete [`Inequality`] checks once bound to a [`FramePair`]; the families
//! are collected in an [`InequalityRegistry`] and selected by name.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{entropic_rhs, lp_bound, support_bound, tight_shannon_bound, weak_support_bound, FramePair};
use crate::coherence::CrossGram;
use crate::entropy::{beta_conjugate, renyi, shannon};
use crate::error::{ensure_dim, Error, Result};
use crate::frames::CoefficientSeq;
use crate::io::complex_pairs;

/// Slack below `-tol` is a violation.
pub const DEFAULT_SLACK_TOL: f64 = 1e-9;

/// Tolerance on equality-case residuals.
pub const DEFAULT_EQUALITY_TOL: f64 = 1e-6;

/// Cross-Gram entries below this fraction of the largest one carry no phase.
const PHASE_FLOOR: f64 = 1e-8;

/// One side-by-side evaluation of an inequality `lhs >= rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub lhs: f64,
    /// `-inf` for bounds that carry no information.
    pub rhs: f64,
}

impl Evaluation {
    pub fn slack(&self) -> f64 {
        if self.rhs == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            self.lhs - self.rhs
        }
    }
}

/// A concrete inequality bound to a frame pair, evaluated on the analysis
/// coefficients `a = Ux`, `b = Vx` of a signal.
pub trait Inequality: Send + Sync {
    fn id(&self) -> &str;
    fn evaluate(&self, a: &CoefficientSeq, b: &CoefficientSeq) -> Result<Evaluation>;
}

/// Parameter grids shared by the inequality families.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckParams {
    /// Coherence orders; entries equal to 2 are skipped by families defined on `[1, 2)`.
    pub r_values: Vec<f64>,
    /// Positions `t` in `[0, 1]` mapped to `alpha = r/2 + t (1 - r/2)`.
    pub alpha_positions: Vec<f64>,
    pub p_values: Vec<f64>,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams {
            r_values: vec![1.0, 1.5],
            alpha_positions: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            p_values: vec![1.0, 1.5, 2.0],
        }
    }
}

impl CheckParams {
    fn orders_below_two(&self) -> impl Iterator<Item = f64> + '_ {
        self.r_values.iter().copied().filter(|&r| (1.0..2.0).contains(&r))
    }

    /// `alpha` values in `[r/2, 1]` for the given order.
    pub fn alphas(&self, r: f64) -> Vec<f64> {
        self.alpha_positions
            .iter()
            .map(|t| {
                if *t >= 1.0 {
                    1.0
                } else {
                    r / 2.0 + t * (1.0 - r / 2.0)
                }
            })
            .collect()
    }
}

/// Builds the checks of one inequality family for a given pair.
pub trait InequalityFamily: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    /// Empty when the family does not apply to the pair.
    fn instantiate(&self, pair: &FramePair, params: &CheckParams) -> Result<Vec<Box<dyn Inequality>>>;
}

fn lengths_match(a: &CoefficientSeq, b: &CoefficientSeq, pair_lens: (usize, usize)) -> Result<()> {
    ensure_dim(pair_lens.0, a.len())?;
    ensure_dim(pair_lens.1, b.len())
}

struct SupportProduct {
    id: String,
    rhs: f64,
}

impl Inequality for SupportProduct {
    fn id(&self) -> &str {
        &self.id
    }
    fn evaluate(&self, a: &CoefficientSeq, b: &CoefficientSeq) -> Result<Evaluation> {
        Ok(Evaluation {
            lhs: (a.l0() * b.l0()) as f64,
            rhs: self.rhs,
        })
    }
}

struct SupportSum {
    id: String,
    rhs: f64,
}

impl Inequality for SupportSum {
    fn id(&self) -> &str {
        &self.id
    }
    fn evaluate(&self, a: &CoefficientSeq, b: &CoefficientSeq) -> Result<Evaluation> {
        Ok(Evaluation {
            lhs: (a.l0() + b.l0()) as f64,
            rhs: self.rhs,
        })
    }
}

struct Entropic {
    id: String,
    r: f64,
    alpha: f64,
    beta: f64,
    rhs: f64,
}

impl Inequality for Entropic {
    fn id(&self) -> &str {
        &self.id
    }
    fn evaluate(&self, a: &CoefficientSeq, b: &CoefficientSeq) -> Result<Evaluation> {
        Ok(Evaluation {
            lhs: (2.0 - self.r) * renyi(a, self.alpha)? + self.r * renyi(b, self.beta)?,
            rhs: self.rhs,
        })
    }
}

struct TightShannon {
    rhs: f64,
}

impl Inequality for TightShannon {
    fn id(&self) -> &str {
        "shannon"
    }
    fn evaluate(&self, a: &CoefficientSeq, b: &CoefficientSeq) -> Result<Evaluation> {
        Ok(Evaluation {
            lhs: shannon(a)? + shannon(b)?,
            rhs: self.rhs,
        })
    }
}

struct Lp {
    id: String,
    p: f64,
    constant: f64,
}

impl Inequality for Lp {
    fn id(&self) -> &str {
        &self.id
    }
    fn evaluate(&self, a: &CoefficientSeq, b: &CoefficientSeq) -> Result<Evaluation> {
        Ok(Evaluation {
            lhs: a.norm(self.p) * b.norm(self.p),
            rhs: self.constant * a.norm2() * b.norm2(),
        })
    }
}

struct WeakSupport {
    id: String,
    rhs: f64,
}

impl Inequality for WeakSupport {
    fn id(&self) -> &str {
        &self.id
    }
    fn evaluate(&self, a: &CoefficientSeq, b: &CoefficientSeq) -> Result<Evaluation> {
        Ok(Evaluation {
            lhs: (a.l0() * b.l0()) as f64,
            rhs: self.rhs,
        })
    }
}

struct SupportFamily;
struct SupportSumFamily;
struct EntropicFamily;
struct ShannonFamily;
struct LpFamily;
struct WeakSupportFamily;

impl InequalityFamily for SupportFamily {
    fn name(&self) -> &'static str {
        "support"
    }
    fn summary(&self) -> &'static str {
        "||a||_0 ||b||_0 >= 1 / mu_*^2"
    }
    fn instantiate(&self, pair: &FramePair, _: &CheckParams) -> Result<Vec<Box<dyn Inequality>>> {
        Ok(vec![Box::new(SupportProduct {
            id: "support".into(),
            rhs: support_bound(pair).product,
        })])
    }
}

impl InequalityFamily for SupportSumFamily {
    fn name(&self) -> &'static str {
        "support-sum"
    }
    fn summary(&self) -> &'static str {
        "||a||_0 + ||b||_0 >= 2 / mu_*"
    }
    fn instantiate(&self, pair: &FramePair, _: &CheckParams) -> Result<Vec<Box<dyn Inequality>>> {
        Ok(vec![Box::new(SupportSum {
            id: "support-sum".into(),
            rhs: support_bound(pair).sum,
        })])
    }
}

impl InequalityFamily for EntropicFamily {
    fn name(&self) -> &'static str {
        "entropic"
    }
    fn summary(&self) -> &'static str {
        "(2-r) R_alpha(a) + r R_beta(b) >= -2 ln nu_r - (2 r beta/(beta-1)) ln sigma"
    }
    fn instantiate(&self, pair: &FramePair, params: &CheckParams) -> Result<Vec<Box<dyn Inequality>>> {
        let mut out: Vec<Box<dyn Inequality>> = Vec::new();
        for r in params.orders_below_two() {
            for alpha in params.alphas(r) {
                let bound = entropic_rhs(pair, r, alpha)?;
                out.push(Box::new(Entropic {
                    id: format!("entropic(r={r},alpha={alpha})"),
                    r,
                    alpha,
                    beta: bound.beta,
                    rhs: bound.rhs,
                }));
            }
        }
        Ok(out)
    }
}

impl InequalityFamily for ShannonFamily {
    fn name(&self) -> &'static str {
        "shannon"
    }
    fn summary(&self) -> &'static str {
        "S(a) + S(b) >= -2 ln mu_* (tight pairs only)"
    }
    fn instantiate(&self, pair: &FramePair, _: &CheckParams) -> Result<Vec<Box<dyn Inequality>>> {
        if !pair.is_tight() {
            return Ok(Vec::new());
        }
        Ok(vec![Box::new(TightShannon {
            rhs: tight_shannon_bound(pair)?,
        })])
    }
}

impl InequalityFamily for LpFamily {
    fn name(&self) -> &'static str {
        "lp"
    }
    fn summary(&self) -> &'static str {
        "||a||_p ||b||_p >= C(p, r) ||a||_2 ||b||_2 for p in [r, 2]"
    }
    fn instantiate(&self, pair: &FramePair, params: &CheckParams) -> Result<Vec<Box<dyn Inequality>>> {
        let mut out: Vec<Box<dyn Inequality>> = Vec::new();
        for r in params.orders_below_two() {
            for &p in params.p_values.iter().filter(|&&p| p >= r && p <= 2.0) {
                out.push(Box::new(Lp {
                    id: format!("lp(p={p},r={r})"),
                    p,
                    constant: lp_bound(pair, p, r)?,
                }));
            }
        }
        Ok(out)
    }
}

impl InequalityFamily for WeakSupportFamily {
    fn name(&self) -> &'static str {
        "weak-support"
    }
    fn summary(&self) -> &'static str {
        "||a||_0 ||b||_0 >= sigma^-r / (mu_r(U~,V) mu_r(V~,U))"
    }
    fn instantiate(&self, pair: &FramePair, params: &CheckParams) -> Result<Vec<Box<dyn Inequality>>> {
        params
            .orders_below_two()
            .map(|r| {
                Ok(Box::new(WeakSupport {
                    id: format!("weak-support(r={r})"),
                    rhs: weak_support_bound(pair, r)?,
                }) as Box<dyn Inequality>)
            })
            .collect()
    }
}

/// Name-indexed inequality families.
pub struct InequalityRegistry {
    families: BTreeMap<&'static str, Box<dyn InequalityFamily>>,
}

impl InequalityRegistry {
    pub fn empty() -> Self {
        InequalityRegistry {
            families: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(SupportFamily));
        r.register(Box::new(SupportSumFamily));
        r.register(Box::new(EntropicFamily));
        r.register(Box::new(ShannonFamily));
        r.register(Box::new(LpFamily));
        r.register(Box::new(WeakSupportFamily));
        r
    }

    pub fn register(&mut self, family: Box<dyn InequalityFamily>) {
        self.families.insert(family.name(), family);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.families.keys().copied()
    }

    pub fn get(&self, name: &str) -> Result<&dyn InequalityFamily> {
        self.families
            .get(name)
            .map(|f| f.as_ref())
            .ok_or_else(|| Error::UnknownName {
                kind: "inequality",
                name: name.to_string(),
            })
    }

    /// Checks of the named families (all of them when `names` is empty).
    pub fn instantiate(
        &self,
        names: &[String],
        pair: &FramePair,
        params: &CheckParams,
    ) -> Result<Vec<Box<dyn Inequality>>> {
        let selected: Vec<&dyn InequalityFamily> = if names.is_empty() {
            self.families.values().map(|f| f.as_ref()).collect()
        } else {
            names.iter().map(|n| self.get(n)).collect::<Result<_>>()?
        };
        let mut out = Vec::new();
        for family in selected {
            out.extend(family.instantiate(pair, params)?);
        }
        Ok(out)
    }
}

impl Default for InequalityRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

/// Outcome of one inequality over one or more signals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub inequality_id: String,
    /// Values at the minimal-slack witness.
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub min_slack: f64,
    pub tol: f64,
    pub pass: bool,
    /// False when the bound is `-inf` for this pair.
    pub informative: bool,
    pub trial_count: usize,
    pub witness: Vec<[f64; 2]>,
}

impl VerificationReport {
    fn from_evaluation(id: &str, eval: Evaluation, tol: f64, x: &DVector<Complex64>, trials: usize) -> Self {
        let slack = eval.slack();
        VerificationReport {
            inequality_id: id.to_string(),
            lhs: eval.lhs,
            rhs: eval.rhs,
            slack,
            min_slack: slack,
            tol,
            pass: slack >= -tol,
            informative: eval.rhs.is_finite(),
            trial_count: trials,
            witness: complex_pairs(x),
        }
    }
}

fn unit(x: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let n = x.norm();
    if !(n > 0.0) {
        return Err(Error::ZeroSignal);
    }
    Ok(x.unscale(n))
}

fn coefficients(pair: &FramePair, x: &DVector<Complex64>) -> Result<(CoefficientSeq, CoefficientSeq)> {
    Ok((pair.u().analyze(x)?, pair.v().analyze(x)?))
}

fn check_single(pair: &FramePair, check: &dyn Inequality, x: &DVector<Complex64>) -> Result<VerificationReport> {
    let x = unit(x)?;
    let (a, b) = coefficients(pair, &x)?;
    lengths_match(&a, &b, (pair.u().len(), pair.v().len()))?;
    let eval = check.evaluate(&a, &b)?;
    Ok(VerificationReport::from_evaluation(check.id(), eval, DEFAULT_SLACK_TOL, &x, 1))
}

/// Support inequality `||Ux||_0 ||Vx||_0 >= 1 / mu_*^2` for one signal.
pub fn check_support(pair: &FramePair, x: &DVector<Complex64>) -> Result<VerificationReport> {
    let check = SupportProduct {
        id: "support".into(),
        rhs: support_bound(pair).product,
    };
    check_single(pair, &check, x)
}

/// Entropic inequality at `(r, alpha)` for one signal.
pub fn check_entropic(pair: &FramePair, x: &DVector<Complex64>, r: f64, alpha: f64) -> Result<VerificationReport> {
    let bound = entropic_rhs(pair, r, alpha)?;
    let check = Entropic {
        id: format!("entropic(r={r},alpha={alpha})"),
        r,
        alpha,
        beta: bound.beta,
        rhs: bound.rhs,
    };
    check_single(pair, &check, x)
}

/// Shannon inequality for a tight pair and one signal.
pub fn check_shannon(pair: &FramePair, x: &DVector<Complex64>) -> Result<VerificationReport> {
    let check = TightShannon {
        rhs: tight_shannon_bound(pair)?,
    };
    check_single(pair, &check, x)
}

/// `l^p` inequality at `(p, r)` for one signal.
pub fn check_lp(pair: &FramePair, x: &DVector<Complex64>, p: f64, r: f64) -> Result<VerificationReport> {
    let check = Lp {
        id: format!("lp(p={p},r={r})"),
        p,
        constant: lp_bound(pair, p, r)?,
    };
    check_single(pair, &check, x)
}

/// Weakened support inequality at order `r` for one signal.
pub fn check_weak_support(pair: &FramePair, x: &DVector<Complex64>, r: f64) -> Result<VerificationReport> {
    let check = WeakSupport {
        id: format!("weak-support(r={r})"),
        rhs: weak_support_bound(pair, r)?,
    };
    check_single(pair, &check, x)
}

/// Residuals of the three necessary conditions for equality in the support
/// inequality, all measured on the numerical supports of `a = Ux`, `b = Vx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EqualityDiagnostics {
    /// `(max - min) / max` of `|a|` on its support.
    pub modulus_flatness_a: f64,
    pub modulus_flatness_b: f64,
    /// Worst `(max - min) / max` of `|<u~_k, v_l>|` over `l` in `supp(b)` for fixed
    /// `k` in `supp(a)`, and of `|<v~_l, u_k>|` over `k` in `supp(a)` for fixed `l`.
    pub crossgram_flatness: f64,
    /// Worst circular distance between `arg <u~_k, v_l>` and `arg b_l - arg a_k`
    /// (and between `arg <v~_l, u_k>` and its negative).
    pub phase_residual: f64,
    pub all_satisfied: bool,
}

fn flatness(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, 0.0_f64), |(lo, hi), m| (lo.min(m), hi.max(m)));
    if hi > 0.0 {
        (hi - lo) / hi
    } else {
        0.0
    }
}

pub fn equality_conditions(pair: &FramePair, x: &DVector<Complex64>, tol: f64) -> Result<EqualityDiagnostics> {
    let x = unit(x)?;
    let (a, b) = coefficients(pair, &x)?;
    let sa = a.support();
    let sb = b.support();
    let av = a.values();
    let bv = b.values();
    let guv = pair.gram_uv();
    let gvu = pair.gram_vu();

    let modulus_flatness_a = flatness(sa.iter().map(|&k| av[k].norm()));
    let modulus_flatness_b = flatness(sb.iter().map(|&l| bv[l].norm()));

    let rows = sa
        .iter()
        .map(|&k| flatness(sb.iter().map(|&l| guv.moduli()[(k, l)])));
    let cols = sb
        .iter()
        .map(|&l| flatness(sa.iter().map(|&k| gvu.moduli()[(l, k)])));
    let crossgram_flatness = rows.chain(cols).fold(0.0, f64::max);

    let floor_uv = PHASE_FLOOR * guv.max_modulus();
    let floor_vu = PHASE_FLOOR * gvu.max_modulus();
    let mut phase_residual = 0.0_f64;
    for &k in &sa {
        for &l in &sb {
            let g = guv.entries()[(k, l)];
            if g.norm() > floor_uv {
                phase_residual = phase_residual.max((g * av[k] * bv[l].conj()).arg().abs());
            }
            let h = gvu.entries()[(l, k)];
            if h.norm() > floor_vu {
                phase_residual = phase_residual.max((h * bv[l] * av[k].conj()).arg().abs());
            }
        }
    }

    let all_satisfied = [modulus_flatness_a, modulus_flatness_b, crossgram_flatness, phase_residual]
        .iter()
        .all(|&r| r <= tol);
    Ok(EqualityDiagnostics {
        modulus_flatness_a,
        modulus_flatness_b,
        crossgram_flatness,
        phase_residual,
        all_satisfied,
    })
}

/// Largest violation of the stationarity equations of
/// `(2/r - 1) R_alpha(a) + R_beta(b)` on the unit sphere, for a tight pair:
///
/// ```text
/// |a_l|^{2(alpha-1)} a_l / ||a||_{2alpha}^{2alpha}
///     = (1/A_U) sum_k conj(<u_l, v_k>) |b_k|^{2(beta-1)} b_k / ||b||_{2beta}^{2beta}
/// ```
///
/// Components outside `supp(a)` contribute `|right-hand side|`.
pub fn variational_residual(pair: &FramePair, x: &DVector<Complex64>, alpha: f64, r: f64) -> Result<f64> {
    if !pair.is_tight() {
        return Err(Error::NotTight("variational equations are stated for tight frames".into()));
    }
    if alpha == 1.0 {
        return Err(Error::InvalidParameter("alpha = 1 has no variational form here".into()));
    }
    let beta = beta_conjugate(alpha, r)?;
    let x = unit(x)?;
    let (a, b) = coefficients(pair, &x)?;

    let bmax = b.norm_inf();
    let weights: Vec<Complex64> = if beta.is_infinite() {
        let peaks: Vec<usize> = b.support_above(bmax * (1.0 - 1e-9));
        let n = peaks.len() as f64;
        let mut w = vec![Complex64::new(0.0, 0.0); b.len()];
        for k in peaks {
            w[k] = b.values()[k] / (n * b.values()[k].norm_sqr());
        }
        w
    } else {
        let denom: f64 = b.moduli().map(|m| (m / bmax).powf(2.0 * beta)).sum::<f64>() * bmax * bmax;
        b.values()
            .iter()
            .map(|z| z * ((z.norm() / bmax).powf(2.0 * beta - 2.0) / denom))
            .collect()
    };

    let g = CrossGram::new(pair.u(), pair.v())?;
    let a_u = pair.u_bounds().upper;
    let support = a.support();
    let amax = a.norm_inf();
    let a_sum: f64 = a.moduli().map(|m| (m / amax).powf(2.0 * alpha)).sum::<f64>() * amax.powf(2.0 * alpha);

    let mut residual = 0.0_f64;
    for l in 0..a.len() {
        let rhs: Complex64 = (0..b.len())
            .map(|k| g.entries()[(l, k)].conj() * weights[k])
            .sum::<Complex64>()
            / a_u;
        let diff = if support.contains(&l) {
            let al = a.values()[l];
            let lhs = al * (al.norm().powf(2.0 * (alpha - 1.0)) / a_sum);
            (lhs - rhs).norm()
        } else {
            rhs.norm()
        };
        residual = residual.max(diff);
    }
    Ok(residual)
}

/// Batch verification settings.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    /// Number of random Gaussian signals.
    pub trials: usize,
    pub seed: u64,
    /// Inequality family names; empty selects all.
    pub inequalities: Vec<String>,
    pub params: CheckParams,
    pub tol: f64,
    /// Add frame elements and sparse combinations of them.
    pub structured: bool,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            trials: 1000,
            seed: 0,
            inequalities: Vec::new(),
            params: CheckParams::default(),
            tol: DEFAULT_SLACK_TOL,
            structured: true,
        }
    }
}

/// Per-inequality reports of a batch run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchReport {
    pub u_label: String,
    pub v_label: String,
    pub seed: u64,
    pub signal_count: usize,
    pub all_pass: bool,
    pub reports: Vec<VerificationReport>,
}

fn complex_gaussian(n: usize, rng: &mut ChaCha8Rng) -> DVector<Complex64> {
    DVector::from_fn(n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    })
}

/// Signal set used by [`random_trials`]: `trials` complex Gaussian vectors,
/// then (when `structured`) every element of both frames and random
/// combinations of 1, 2 and 3 frame elements. All normalised to unit norm.
pub fn trial_signals(pair: &FramePair, cfg: &TrialConfig) -> Vec<DVector<Complex64>> {
    let n = pair.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out: Vec<DVector<Complex64>> = (0..cfg.trials).map(|_| complex_gaussian(n, &mut rng)).collect();
    if cfg.structured {
        for f in [pair.u(), pair.v()] {
            out.extend((0..f.len()).map(|k| f.vector(k)));
        }
        const COMBOS_PER_SIZE: usize = 20;
        for size in 1..=3 {
            for _ in 0..COMBOS_PER_SIZE {
                let f = if rng.random_bool(0.5) { pair.u() } else { pair.v() };
                let mut x = DVector::zeros(n);
                for _ in 0..size {
                    let k = rng.random_range(0..f.len());
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    x += f.vector(k) * Complex64::new(re, im);
                }
                out.push(x);
            }
        }
    }
    out.into_iter()
        .filter_map(|x| unit(&x).ok())
        .collect()
}

/// Runs every selected inequality on the signal set of [`trial_signals`] and
/// keeps, per inequality, the signal with the smallest slack (first index on
/// ties).
pub fn random_trials(pair: &FramePair, cfg: &TrialConfig) -> Result<BatchReport> {
    let checks = InequalityRegistry::builtin().instantiate(&cfg.inequalities, pair, &cfg.params)?;
    let signals = trial_signals(pair, cfg);
    let evals: Vec<Vec<Evaluation>> = signals
        .par_iter()
        .map(|x| {
            let (a, b) = coefficients(pair, x)?;
            checks.iter().map(|c| c.evaluate(&a, &b)).collect()
        })
        .collect::<Result<_>>()?;

    let mut reports = Vec::with_capacity(checks.len());
    for (ci, check) in checks.iter().enumerate() {
        let mut best = 0;
        for (si, row) in evals.iter().enumerate() {
            if row[ci].slack() < evals[best][ci].slack() {
                best = si;
            }
        }
        let mut rep = VerificationReport::from_evaluation(
            check.id(),
            evals[best][ci],
            cfg.tol,
            &signals[best],
            signals.len(),
        );
        rep.informative = evals.iter().any(|row| row[ci].rhs.is_finite());
        reports.push(rep);
    }
    Ok(BatchReport {
        u_label: pair.u().label().to_string(),
        v_label: pair.v().label().to_string(),
        seed: cfg.seed,
        signal_count: signals.len(),
        all_pass: reports.iter().all(|r| r.pass),
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{bmub, kronecker_basis, mub_pair, random_frame_pair, random_onb_pair, rotate_plane, tight_frame, TightKind};
    use approx::assert_abs_diff_eq;

    fn mub(n: usize) -> FramePair {
        let (u, v) = mub_pair(n);
        FramePair::new(u, v).unwrap()
    }

    fn e0(n: usize) -> DVector<Complex64> {
        kronecker_basis(n).vector(0)
    }

    #[test]
    fn support_equality_for_mub_delta() {
        let rep = check_support(&mub(8), &e0(8)).unwrap();
        assert_eq!(rep.lhs, 8.0);
        assert_abs_diff_eq!(rep.rhs, 8.0, epsilon = 1e-9);
        assert!(rep.pass);
        let k = kronecker_basis(5);
        let same = FramePair::new(k.clone(), k).unwrap();
        let rep = check_support(&same, &e0(5)).unwrap();
        assert_eq!(rep.lhs, 1.0);
        assert_abs_diff_eq!(rep.rhs, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_signal_is_rejected() {
        assert_eq!(check_support(&mub(4), &DVector::zeros(4)), Err(Error::ZeroSignal));
        assert!(equality_conditions(&mub(4), &DVector::zeros(4), 1e-6).is_err());
    }

    #[test]
    fn entropic_equality_for_mub_delta() {
        let p = mub(8);
        let rep = check_entropic(&p, &e0(8), 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(rep.lhs, 8f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(rep.rhs, 8f64.ln(), epsilon = 1e-12);
        let rep = check_shannon(&p, &e0(8)).unwrap();
        assert_abs_diff_eq!(rep.slack, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn non_tight_shannon_limit_is_non_informative() {
        let (u, v) = random_frame_pair(4, 8, 2).unwrap();
        let p = FramePair::new(u, v).unwrap();
        let rep = check_entropic(&p, &e0(4), 1.0, 1.0).unwrap();
        assert!(rep.pass);
        assert!(!rep.informative);
        assert!(check_shannon(&p, &e0(4)).is_err());
    }

    #[test]
    fn lp_checks() {
        let p = mub(8);
        let rep = check_lp(&p, &e0(8), 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(rep.lhs, 8f64.sqrt(), epsilon = 1e-12);
        assert!(rep.slack >= -1e-9);
        let x = DVector::from_fn(8, |i, _| Complex64::new(i as f64 - 2.5, 0.3));
        let rep = check_lp(&p, &x, 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(rep.slack, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn equality_diagnostics_on_mub_delta() {
        let d = equality_conditions(&mub(8), &e0(8), 1e-10).unwrap();
        assert!(d.modulus_flatness_a <= 1e-10);
        assert!(d.modulus_flatness_b <= 1e-10);
        assert!(d.crossgram_flatness <= 1e-10);
        assert!(d.phase_residual <= 1e-10);
        assert!(d.all_satisfied);
    }

    #[test]
    fn equality_diagnostics_fail_generically() {
        let (u, v) = random_onb_pair(8, 4).unwrap();
        let p = FramePair::new(u, v).unwrap();
        let x = DVector::from_fn(8, |i, _| Complex64::new((i as f64).sin() + 0.2, (i as f64).cos()));
        assert!(!equality_conditions(&p, &x, DEFAULT_EQUALITY_TOL).unwrap().all_satisfied);
    }

    #[test]
    fn shared_element_is_an_equality_case() {
        let (u, v) = bmub(&[1, 5]).unwrap();
        let p = FramePair::new(u, v).unwrap();
        let d = equality_conditions(&p, &e0(6), DEFAULT_EQUALITY_TOL).unwrap();
        assert!(d.all_satisfied);
        assert_eq!(check_support(&p, &e0(6)).unwrap().lhs, 1.0);
    }

    #[test]
    fn variational_residual_vanishes_on_mub_delta() {
        let p = mub(8);
        for (alpha, r) in [(0.75, 1.0), (0.6, 1.0), (0.5, 1.0), (0.9, 1.5)] {
            assert!(variational_residual(&p, &e0(8), alpha, r).unwrap() <= 1e-9);
        }
        let (u, v) = random_onb_pair(8, 9).unwrap();
        let q = FramePair::new(u, v).unwrap();
        let x = DVector::from_fn(8, |i, _| Complex64::new(1.0 + i as f64, 0.5));
        assert!(variational_residual(&q, &x, 0.75, 1.0).unwrap() > 1e-6);
        assert!(variational_residual(&p, &e0(8), 1.0, 1.0).is_err());
        let (u, v) = random_frame_pair(4, 8, 1).unwrap();
        let nt = FramePair::new(u, v).unwrap();
        assert!(matches!(variational_residual(&nt, &e0(4), 0.75, 1.0), Err(Error::NotTight(_))));
    }

    #[test]
    fn flat_pair_saturates_renyi_sum() {
        let p = mub(8);
        let (a, b) = coefficients(&p, &e0(8)).unwrap();
        let beta = beta_conjugate(0.75, 1.0).unwrap();
        let sum = renyi(&a, 0.75).unwrap() + renyi(&b, beta).unwrap();
        assert_abs_diff_eq!(sum, ((a.l0() * b.l0()) as f64).ln(), epsilon = 1e-12);
    }

    #[test]
    fn registry_names_and_selection() {
        let reg = InequalityRegistry::builtin();
        let names: Vec<_> = reg.names().collect();
        assert_eq!(names, vec!["entropic", "lp", "shannon", "support", "support-sum", "weak-support"]);
        let p = mub(4);
        let checks = reg.instantiate(&["lp".to_string()], &p, &CheckParams::default()).unwrap();
        let ids: Vec<_> = checks.iter().map(|c| c.id().to_string()).collect();
        assert_eq!(ids, vec!["lp(p=1,r=1)", "lp(p=1.5,r=1)", "lp(p=2,r=1)", "lp(p=1.5,r=1.5)", "lp(p=2,r=1.5)"]);
        assert!(reg.instantiate(&["nope".to_string()], &p, &CheckParams::default()).is_err());
    }

    #[test]
    fn shannon_family_skips_non_tight_pairs() {
        let (u, v) = random_frame_pair(3, 6, 0).unwrap();
        let p = FramePair::new(u, v).unwrap();
        let checks = InequalityRegistry::builtin()
            .instantiate(&["shannon".to_string()], &p, &CheckParams::default())
            .unwrap();
        assert!(checks.is_empty());
    }

    #[test]
    fn batch_is_deterministic_and_passes_on_mub() {
        let p = mub(16);
        let cfg = TrialConfig {
            trials: 200,
            seed: 11,
            ..TrialConfig::default()
        };
        let a = random_trials(&p, &cfg).unwrap();
        let b = random_trials(&p, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.all_pass, "{:#?}", a.reports.iter().filter(|r| !r.pass).collect::<Vec<_>>());
        let support = a.reports.iter().find(|r| r.inequality_id == "support").unwrap();
        assert_abs_diff_eq!(support.min_slack, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn mercedes_pair_batch() {
        let m = tight_frame(TightKind::Mercedes, 2).unwrap();
        let p = FramePair::new(m.clone(), rotate_plane(&m, 0.4).unwrap()).unwrap();
        let cfg = TrialConfig {
            trials: 500,
            seed: 1,
            inequalities: vec!["shannon".into()],
            ..TrialConfig::default()
        };
        let rep = random_trials(&p, &cfg).unwrap();
        assert_eq!(rep.reports.len(), 1);
        assert!(rep.reports[0].min_slack >= -1e-9);
    }
}
