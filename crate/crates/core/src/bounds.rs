//! Right-hand-side constants of the support, entropic and `l^p` uncertainty
//! inequalities for a pair of frames.
//!
//! With frame bounds `A_U <= B_U` and `A_V <= B_V`:
//!
//! ```text
//! rho   = sqrt(B_V / A_U)
//! sigma = sqrt(B_U B_V / (A_U A_V))      (>= 1, = 1 iff both frames are tight)
//! nu_r  = mu_r(U~, V) / rho^r
//! ```

use std::sync::OnceLock;

use crate::coherence::{mu_star_from_grams, CrossGram, MuStar};
use crate::entropy::beta_conjugate;
use crate::error::{ensure_dim, Error, Result};
use crate::frames::{Frame, FrameBounds};

/// Largest accepted `dual_defect` for user-supplied duals.
pub const DUAL_DEFECT_TOL: f64 = 1e-8;

/// Two frames of the same space together with the duals, bounds and directed
/// cross-Gram matrices every inequality needs.
#[derive(Debug, Clone)]
pub struct FramePair {
    u: Frame,
    v: Frame,
    u_dual: Frame,
    v_dual: Frame,
    u_bounds: FrameBounds,
    v_bounds: FrameBounds,
    /// `<u~_k, v_l>`
    g_uv: CrossGram,
    /// `<v~_l, u_k>`
    g_vu: CrossGram,
    mu_star: OnceLock<MuStar>,
}

impl FramePair {
    /// Pair using the canonical duals.
    pub fn new(u: Frame, v: Frame) -> Result<Self> {
        ensure_dim(u.dim(), v.dim())?;
        let u_dual = u.canonical_dual()?;
        let v_dual = v.canonical_dual()?;
        Self::assemble(u, u_dual, v, v_dual)
    }

    /// Pair with caller-chosen dual frames, checked through the mixed
    /// reconstruction identity `sum_k <x, u_k> u~_k = x`.
    pub fn with_duals(u: Frame, u_dual: Frame, v: Frame, v_dual: Frame) -> Result<Self> {
        ensure_dim(u.dim(), v.dim())?;
        for (f, d) in [(&u, &u_dual), (&v, &v_dual)] {
            let defect = f.dual_defect(d)?;
            if !(defect <= DUAL_DEFECT_TOL) {
                return Err(Error::InvalidParameter(format!(
                    "`{}` is not a dual of `{}` (reconstruction defect {defect:.3e})",
                    d.label(),
                    f.label()
                )));
            }
        }
        Self::assemble(u, u_dual, v, v_dual)
    }

    fn assemble(u: Frame, u_dual: Frame, v: Frame, v_dual: Frame) -> Result<Self> {
        let g_uv = CrossGram::new(&u_dual, &v)?;
        let g_vu = CrossGram::new(&v_dual, &u)?;
        Ok(FramePair {
            u_bounds: u.bounds(),
            v_bounds: v.bounds(),
            u,
            v,
            u_dual,
            v_dual,
            g_uv,
            g_vu,
            mu_star: OnceLock::new(),
        })
    }

    /// The same pair with the roles of `U` and `V` exchanged.
    pub fn swapped(&self) -> FramePair {
        FramePair {
            u: self.v.clone(),
            v: self.u.clone(),
            u_dual: self.v_dual.clone(),
            v_dual: self.u_dual.clone(),
            u_bounds: self.v_bounds,
            v_bounds: self.u_bounds,
            g_uv: self.g_vu.clone(),
            g_vu: self.g_uv.clone(),
            mu_star: self.mu_star.clone(),
        }
    }

    pub fn u(&self) -> &Frame {
        &self.u
    }

    pub fn v(&self) -> &Frame {
        &self.v
    }

    pub fn u_dual(&self) -> &Frame {
        &self.u_dual
    }

    pub fn v_dual(&self) -> &Frame {
        &self.v_dual
    }

    pub fn u_bounds(&self) -> FrameBounds {
        self.u_bounds
    }

    pub fn v_bounds(&self) -> FrameBounds {
        self.v_bounds
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    /// `(U~, V)` cross-Gram.
    pub fn gram_uv(&self) -> &CrossGram {
        &self.g_uv
    }

    /// `(V~, U)` cross-Gram.
    pub fn gram_vu(&self) -> &CrossGram {
        &self.g_vu
    }

    pub fn is_tight(&self) -> bool {
        self.u_bounds.is_tight() && self.v_bounds.is_tight()
    }

    pub fn rho(&self) -> f64 {
        (self.v_bounds.upper / self.u_bounds.lower).sqrt()
    }

    /// Geometric mean of the bound ratios; exactly 1 for tight pairs.
    pub fn sigma(&self) -> f64 {
        if self.is_tight() {
            1.0
        } else {
            (self.u_bounds.condition() * self.v_bounds.condition()).sqrt()
        }
    }

    /// `mu_r(U~, V)`.
    pub fn mu_r_uv(&self, r: f64) -> Result<f64> {
        self.g_uv.coherence(r)
    }

    /// `mu_r(V~, U)`.
    pub fn mu_r_vu(&self, r: f64) -> Result<f64> {
        self.g_vu.coherence(r)
    }

    pub fn mu_star(&self) -> MuStar {
        *self
            .mu_star
            .get_or_init(|| mu_star_from_grams(&self.g_uv, &self.g_vu))
    }
}

/// Every constant entering the bounds at one coherence order `r`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BoundConstants {
    pub r: f64,
    pub rho: f64,
    pub sigma: f64,
    pub nu_r: f64,
    pub mu_r_uv: f64,
    pub mu_r_vu: f64,
}

pub fn bound_constants(pair: &FramePair, r: f64) -> Result<BoundConstants> {
    let mu_r_uv = pair.mu_r_uv(r)?;
    let mu_r_vu = pair.mu_r_vu(r)?;
    let rho = pair.rho();
    Ok(BoundConstants {
        r,
        rho,
        sigma: pair.sigma(),
        nu_r: mu_r_uv / rho.powf(r),
        mu_r_uv,
        mu_r_vu,
    })
}

/// Lower bounds on `||a||_0 ||b||_0` and `||a||_0 + ||b||_0`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SupportBound {
    pub product: f64,
    pub sum: f64,
    pub mu_star: f64,
    pub r_opt: f64,
}

/// `1 / mu_*^2` and `2 / mu_*`.
pub fn support_bound(pair: &FramePair) -> SupportBound {
    let m = pair.mu_star();
    SupportBound {
        product: 1.0 / (m.value * m.value),
        sum: 2.0 / m.value,
        mu_star: m.value,
        r_opt: m.r_opt,
    }
}

/// Support bound at a fixed order `r`: `1 / (mu_r(U~, V) mu_r(V~, U))`.
pub fn support_bound_at(pair: &FramePair, r: f64) -> Result<f64> {
    Ok(1.0 / (pair.mu_r_uv(r)? * pair.mu_r_vu(r)?))
}

/// Support bounds for `K` frames chained cyclically.
#[derive(Debug, Clone, PartialEq)]
pub struct KFrameBound {
    pub product: f64,
    pub sum: f64,
    /// `mu_*` of the pairs `(k, k + 1 mod K)`.
    pub pairwise: Vec<MuStar>,
}

pub fn k_frame_bound(frames: &[Frame]) -> Result<KFrameBound> {
    let k = frames.len();
    if k < 2 {
        return Err(Error::InvalidParameter(format!("need at least two frames, got {k}")));
    }
    let pairwise = (0..k)
        .map(|i| Ok(FramePair::new(frames[i].clone(), frames[(i + 1) % k].clone())?.mu_star()))
        .collect::<Result<Vec<_>>>()?;
    let prod: f64 = pairwise.iter().map(|m| m.value).product();
    Ok(KFrameBound {
        product: 1.0 / prod,
        sum: k as f64 * prod.powf(-1.0 / k as f64),
        pairwise,
    })
}

/// Right-hand side of `(2 - r) R_alpha(a) + r R_beta(b) >= rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropicBound {
    pub r: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `-inf` when the bound carries no information.
    pub rhs: f64,
}

impl EntropicBound {
    pub fn is_informative(&self) -> bool {
        self.rhs.is_finite()
    }
}

/// `-2 ln nu_r - (2 r beta / (beta - 1)) ln sigma`; the factor tends to `2r`
/// as `beta -> inf`, and the bound is `-inf` at `beta = 1` unless the pair is
/// tight.
pub fn entropic_rhs(pair: &FramePair, r: f64, alpha: f64) -> Result<EntropicBound> {
    let beta = beta_conjugate(alpha, r)?;
    let c = bound_constants(pair, r)?;
    let log_sigma = c.sigma.ln();
    let sigma_term = if log_sigma == 0.0 {
        0.0
    } else if beta.is_infinite() {
        2.0 * r * log_sigma
    } else if beta == 1.0 {
        f64::INFINITY
    } else {
        2.0 * r * beta / (beta - 1.0) * log_sigma
    };
    Ok(EntropicBound {
        r,
        alpha,
        beta,
        rhs: -2.0 * c.nu_r.ln() - sigma_term,
    })
}

/// `-2 ln mu_*`, the Shannon bound `S(a) + S(b) >= ...` for tight pairs.
pub fn tight_shannon_bound(pair: &FramePair) -> Result<f64> {
    if !pair.is_tight() {
        return Err(Error::NotTight(format!(
            "bounds of `{}` are {:?}, of `{}` are {:?}",
            pair.u().label(),
            pair.u_bounds(),
            pair.v().label(),
            pair.v_bounds()
        )));
    }
    Ok(-2.0 * pair.mu_star().value.ln())
}

/// Constant `C` in `||a||_p ||b||_p >= C ||a||_2 ||b||_2`, valid for `r` in
/// `[1, 2)` and `p` in `[r, 2]`:
///
/// ```text
/// C = (mu_r(U~, V) mu_r(V~, U))^{1/2 - 1/p} * sigma^{-(1 - r/2)(1 + ((r - p)/p)(1 - r/2))}
/// ```
pub fn lp_bound(pair: &FramePair, p: f64, r: f64) -> Result<f64> {
    if !(1.0..2.0).contains(&r) {
        return Err(Error::InvalidParameter(format!("r = {r} outside [1, 2)")));
    }
    if !(p >= r && p <= 2.0) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [{r}, 2]")));
    }
    let mu = pair.mu_r_uv(r)? * pair.mu_r_vu(r)?;
    let h = 1.0 - r / 2.0;
    let sigma_exp = h * (1.0 + (r - p) / p * h);
    Ok(mu.powf(0.5 - 1.0 / p) * pair.sigma().powf(-sigma_exp))
}

/// `sigma^{-r} / (mu_r(U~, V) mu_r(V~, U))`, the support bound obtained from the
/// entropic route.
pub fn weak_support_bound(pair: &FramePair, r: f64) -> Result<f64> {
    if !(1.0..2.0).contains(&r) {
        return Err(Error::InvalidParameter(format!("r = {r} outside [1, 2)")));
    }
    Ok(pair.sigma().powf(-r) * support_bound_at(pair, r)?)
}
