//! Cross-Gram matrices, the mutual coherence of order `r`, its optimised
//! geometric mean `mu_*`, the multiplicity test predicting that some `r > 1`
//! beats the classical coherence, and the tangent slope of `mu_r` at `r = 2`.
//!
//! For `r` in `(1, 2]` with conjugate exponent `r' = r / (r - 1)`:
//!
//! ```text
//! mu_r(U, V) = max_l ( sum_k |<u_k, v_l>|^{r'} )^{r / r'}
//! ```
//!
//! and `mu_1` is the largest modulus of the cross-Gram matrix (the `r' = inf`
//! limit). Columns are evaluated as `s^r (sum_k (|g_kl| / s)^{r'})^{r - 1}` with
//! `s` the column maximum, which stays finite as `r -> 1`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure_dim, Error, Result};
use crate::frames::Frame;

/// Number of points of the uniform `r` grid scanned before refinement.
pub const MU_STAR_GRID: usize = 201;

/// Width at which golden-section refinement of `mu_*` stops.
pub const MU_STAR_RTOL: f64 = 1e-6;

/// Default relative tolerance for counting ties of the column maximum.
pub const DEFAULT_TIE_TOL: f64 = 1e-9;

/// Matrix of inner products `<u_k, v_l>`; rows follow the first frame,
/// columns the second.
#[derive(Debug, Clone)]
pub struct CrossGram {
    entries: DMatrix<Complex64>,
    moduli: DMatrix<f64>,
    row_label: String,
    col_label: String,
}

impl CrossGram {
    pub fn new(u: &Frame, v: &Frame) -> Result<Self> {
        ensure_dim(u.dim(), v.dim())?;
        let entries = u.matrix() * v.matrix().adjoint();
        let moduli = entries.map(|z| z.norm());
        Ok(CrossGram {
            entries,
            moduli,
            row_label: u.label().to_string(),
            col_label: v.label().to_string(),
        })
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn moduli(&self) -> &DMatrix<f64> {
        &self.moduli
    }

    pub fn row_label(&self) -> &str {
        &self.row_label
    }

    pub fn col_label(&self) -> &str {
        &self.col_label
    }

    /// Classical mutual coherence, the largest entry modulus.
    pub fn max_modulus(&self) -> f64 {
        self.moduli.iter().copied().fold(0.0, f64::max)
    }

    fn column_value(&self, col: usize, r: f64) -> f64 {
        let column = self.moduli.column(col);
        let s = column.iter().copied().fold(0.0, f64::max);
        if s == 0.0 {
            return 0.0;
        }
        if r == 1.0 {
            return s;
        }
        let rp = r / (r - 1.0);
        let sum: f64 = column.iter().map(|&m| (m / s).powf(rp)).sum();
        s.powf(r) * sum.powf(r - 1.0)
    }

    /// Mutual coherence of order `r` for `r` in `[1, 2]`.
    pub fn coherence(&self, r: f64) -> Result<f64> {
        check_order(r)?;
        Ok((0..self.moduli.ncols())
            .map(|c| self.column_value(c, r))
            .fold(0.0, f64::max))
    }
}

fn check_order(r: f64) -> Result<()> {
    if (1.0..=2.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("coherence order r = {r} outside [1, 2]")))
    }
}

pub fn cross_gram(u: &Frame, v: &Frame) -> Result<CrossGram> {
    CrossGram::new(u, v)
}

/// `mu_r(U, V)`.
pub fn coherence_r(u: &Frame, v: &Frame, r: f64) -> Result<f64> {
    check_order(r)?;
    CrossGram::new(u, v)?.coherence(r)
}

/// Optimised constant `inf_r sqrt(mu_r(U~, V) mu_r(V~, U))` and its minimiser.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuStar {
    pub value: f64,
    pub r_opt: f64,
}

/// `r_0 < r_1 < ... < r_{count-1}` evenly spaced over `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| {
                if i == count - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// `mu_*` from the two directed cross-Gram matrices `(U~, V)` and `(V~, U)`.
///
/// A 201-point grid over `[1, 2]` locates the best cell, then golden-section
/// search on `ln` of the geometric mean refines it to `|dr| < 1e-6`. Ties go to
/// the smaller `r`.
pub fn mu_star_from_grams(g_uv: &CrossGram, g_vu: &CrossGram) -> MuStar {
    let log_geo = |r: f64| {
        let a = g_uv.coherence(r).expect("r inside [1, 2]");
        let b = g_vu.coherence(r).expect("r inside [1, 2]");
        0.5 * (a.ln() + b.ln())
    };
    let grid = uniform_grid(1.0, 2.0, MU_STAR_GRID);
    let values: Vec<f64> = grid.par_iter().map(|&r| log_geo(r)).collect();
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    let (r_ref, v_ref) = golden_section(log_geo, lo, hi, MU_STAR_RTOL);
    let (r_opt, log_val) = if v_ref < values[best] {
        (r_ref, v_ref)
    } else {
        (grid[best], values[best])
    };
    MuStar {
        value: log_val.exp(),
        r_opt,
    }
}

/// `mu_*(U, U~, V, V~)`. Argument order follows the coherence pairs:
/// `mu_r(U~, V)` and `mu_r(V~, U)`.
pub fn mu_star(u_dual: &Frame, v: &Frame, v_dual: &Frame, u: &Frame) -> Result<MuStar> {
    let g_uv = CrossGram::new(u_dual, v)?;
    let g_vu = CrossGram::new(v_dual, u)?;
    Ok(mu_star_from_grams(&g_uv, &g_vu))
}

/// Directed coherences and their geometric mean sampled on an `r` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceCurve {
    pub r_grid: Vec<f64>,
    pub mu_uv: Vec<f64>,
    pub mu_vu: Vec<f64>,
    pub geomean: Vec<f64>,
    pub argmin_r: f64,
    pub min_value: f64,
}

pub fn coherence_curve(g_uv: &CrossGram, g_vu: &CrossGram, r_grid: &[f64]) -> Result<CoherenceCurve> {
    if r_grid.is_empty() {
        return Err(Error::InvalidParameter("empty r grid".into()));
    }
    let rows: Vec<(f64, f64)> = r_grid
        .par_iter()
        .map(|&r| Ok((g_uv.coherence(r)?, g_vu.coherence(r)?)))
        .collect::<Result<_>>()?;
    let mu_uv: Vec<f64> = rows.iter().map(|p| p.0).collect();
    let mu_vu: Vec<f64> = rows.iter().map(|p| p.1).collect();
    let geomean: Vec<f64> = rows.iter().map(|(a, b)| (a * b).sqrt()).collect();
    let mut best = 0;
    for (i, &g) in geomean.iter().enumerate() {
        if g < geomean[best] {
            best = i;
        }
    }
    Ok(CoherenceCurve {
        r_grid: r_grid.to_vec(),
        argmin_r: r_grid[best],
        min_value: geomean[best],
        mu_uv,
        mu_vu,
        geomean,
    })
}

/// Column maxima `s_l`, their multiplicities `n_l`, and whether
/// `max_l n_l s_l < 1` (which guarantees some `r > 1` with `mu_r < mu_1`).
#[derive(Debug, Clone, PartialEq)]
pub struct ImprovementReport {
    pub column_max: Vec<f64>,
    pub multiplicity: Vec<usize>,
    pub max_product: f64,
    pub predicted_improvement: bool,
}

pub fn improvement_condition(u: &Frame, v: &Frame, tie_tol: f64) -> Result<ImprovementReport> {
    if !(tie_tol > 0.0) {
        return Err(Error::InvalidParameter("tie tolerance must be positive".into()));
    }
    let g = CrossGram::new(u, v)?;
    let moduli = g.moduli();
    let mut column_max = Vec::with_capacity(moduli.ncols());
    let mut multiplicity = Vec::with_capacity(moduli.ncols());
    for col in moduli.column_iter() {
        let s = col.iter().copied().fold(0.0, f64::max);
        let n = col.iter().filter(|&&m| m >= s * (1.0 - tie_tol)).count();
        column_max.push(s);
        multiplicity.push(n);
    }
    let max_product = column_max
        .iter()
        .zip(&multiplicity)
        .map(|(s, &n)| n as f64 * s)
        .fold(0.0, f64::max);
    Ok(ImprovementReport {
        column_max,
        multiplicity,
        max_product,
        predicted_improvement: max_product < 1.0,
    })
}

fn xlnx(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

/// Per-column entropy `-sum_k |<u_k, v_l>|^2 ln |<u_k, v_l>|^2`.
pub fn column_entropies(u: &Frame, v: &Frame) -> Result<Vec<f64>> {
    let g = CrossGram::new(u, v)?;
    Ok(g.moduli()
        .column_iter()
        .map(|c| -c.iter().map(|&m| xlnx(m * m)).sum::<f64>())
        .collect())
}

/// Slope of the tangent of `r -> mu_r(U, V)` at `r = 2`, taken from the left.
///
/// Column `l` has derivative `m_l ln m_l - (1/2) sum_k |g_kl|^2 ln |g_kl|^2` at
/// `r = 2`, with `m_l` its squared `l^2` mass. The maximum over columns is
/// differentiated along the columns attaining `max_l m_l`; the left slope is the
/// smallest of their derivatives. For orthonormal bases every column has
/// `m_l = 1`, so this is half the smallest column entropy; a mutually unbiased
/// pair gives `ln(N) / 2`.
pub fn slope_at_two(u: &Frame, v: &Frame) -> Result<f64> {
    let g = CrossGram::new(u, v)?;
    let masses: Vec<f64> = g
        .moduli()
        .column_iter()
        .map(|c| c.iter().map(|m| m * m).sum())
        .collect();
    let top = masses.iter().copied().fold(0.0, f64::max);
    let slope = g
        .moduli()
        .column_iter()
        .zip(&masses)
        .filter(|(_, &m)| m >= top * (1.0 - DEFAULT_TIE_TOL))
        .map(|(c, &m)| xlnx(m) - 0.5 * c.iter().map(|&x| xlnx(x * x)).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    Ok(slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{bmub, kronecker_basis, mub_pair, random_onb_pair, tight_frame, TightKind};
    use approx::assert_abs_diff_eq;

    #[test]
    fn gram_of_onb_with_itself_is_identity() {
        let u = kronecker_basis(3);
        let g = cross_gram(&u, &u).unwrap();
        assert!((g.entries() - DMatrix::<Complex64>::identity(3, 3)).camax() < 1e-15);
    }

    #[test]
    fn mercedes_against_kronecker() {
        let m = tight_frame(TightKind::Mercedes, 2).unwrap();
        let k = kronecker_basis(2);
        let g = cross_gram(&k, &m).unwrap();
        let s = 3f64.sqrt() / 2.0;
        let want = [[0.0, s, -s], [1.0, -0.5, -0.5]];
        for (i, row) in want.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                assert_abs_diff_eq!(g.entries()[(i, j)].re, *w, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn mub_coherence_power_law() {
        let (u, v) = mub_pair(4);
        assert_abs_diff_eq!(coherence_r(&u, &v, 1.0).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(coherence_r(&u, &v, 2.0).unwrap(), 1.0, epsilon = 1e-12);
        let (u, v) = mub_pair(8);
        assert_abs_diff_eq!(coherence_r(&u, &v, 1.0).unwrap(), 0.353553390593, epsilon = 1e-12);
    }

    #[test]
    fn identical_bases_have_unit_coherence() {
        let u = kronecker_basis(5);
        for r in [1.0, 1.3, 2.0] {
            assert_abs_diff_eq!(coherence_r(&u, &u, r).unwrap(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn bmub_coherence() {
        let (u, v) = bmub(&[2, 4]).unwrap();
        assert_abs_diff_eq!(coherence_r(&u, &v, 1.0).unwrap(), 0.5f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(coherence_r(&u, &v, 1.5).unwrap(), 2f64.powf(-0.25), epsilon = 1e-12);
        assert_abs_diff_eq!(coherence_r(&u, &v, 2.0).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn order_outside_unit_interval_is_rejected() {
        let (u, v) = mub_pair(3);
        assert!(coherence_r(&u, &v, 0.99).is_err());
        assert!(coherence_r(&u, &v, 2.01).is_err());
        assert!(coherence_r(&u, &v, f64::NAN).is_err());
    }

    #[test]
    fn coherence_is_continuous_at_one() {
        let (u, v) = random_onb_pair(12, 3).unwrap();
        let g = cross_gram(&u, &v).unwrap();
        let at_one = g.coherence(1.0).unwrap();
        let near = g.coherence(1.0 + 1e-9).unwrap();
        assert!((at_one - near).abs() < 1e-6);
    }

    #[test]
    fn mu_star_of_mub_sits_at_r_one() {
        let (u, v) = mub_pair(16);
        let m = mu_star(&u, &v, &v, &u).unwrap();
        assert_abs_diff_eq!(m.value, 0.25, epsilon = 1e-12);
        assert_eq!(m.r_opt, 1.0);
        let k = kronecker_basis(4);
        assert_abs_diff_eq!(mu_star(&k, &k, &k, &k).unwrap().value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mu_star_improves_on_random_bases() {
        let (u, v) = random_onb_pair(64, 1).unwrap();
        let m = mu_star(&u, &v, &v, &u).unwrap();
        let mu1 = coherence_r(&u, &v, 1.0).unwrap();
        assert!(mu1 > 1.0 / 8.0 && mu1 < 1.0);
        assert!(m.value < mu1);
        assert!(m.r_opt > 1.0);
        // brute-force scan oracle
        let g_uv = cross_gram(&u, &v).unwrap();
        let g_vu = cross_gram(&v, &u).unwrap();
        let scan = uniform_grid(1.0, 2.0, 2001)
            .into_iter()
            .map(|r| (g_uv.coherence(r).unwrap() * g_vu.coherence(r).unwrap()).sqrt())
            .fold(f64::INFINITY, f64::min);
        assert!(m.value <= scan + 1e-12);
        assert!(m.value > scan - 1e-6);
    }

    #[test]
    fn prop_condition_examples() {
        let (u, v) = mub_pair(9);
        let rep = improvement_condition(&u, &v, DEFAULT_TIE_TOL).unwrap();
        assert!(rep.multiplicity.iter().all(|&n| n == 9));
        assert_abs_diff_eq!(rep.max_product, 3.0, epsilon = 1e-9);
        assert!(!rep.predicted_improvement);

        let k = kronecker_basis(4);
        let rep = improvement_condition(&k, &k, DEFAULT_TIE_TOL).unwrap();
        assert_eq!(rep.multiplicity, vec![1; 4]);
        assert_abs_diff_eq!(rep.max_product, 1.0);
        assert!(!rep.predicted_improvement);
        assert!(improvement_condition(&k, &k, 0.0).is_err());
    }

    #[test]
    fn prop_condition_is_confirmed_by_grid_scan() {
        let (u, v) = random_onb_pair(64, 1).unwrap();
        let rep = improvement_condition(&u, &v, DEFAULT_TIE_TOL).unwrap();
        if rep.predicted_improvement {
            let g = cross_gram(&u, &v).unwrap();
            let mu1 = g.coherence(1.0).unwrap();
            let found = uniform_grid(1.0, 2.0, 201)[1..]
                .iter()
                .any(|&r| g.coherence(r).unwrap() < mu1 - 1e-12);
            assert!(found);
        }
    }

    #[test]
    fn slope_examples() {
        let (u, v) = mub_pair(8);
        assert_abs_diff_eq!(slope_at_two(&u, &v).unwrap(), 8f64.ln() / 2.0, epsilon = 1e-12);
        for h in column_entropies(&u, &v).unwrap() {
            assert_abs_diff_eq!(h, 8f64.ln(), epsilon = 1e-12);
        }
        let k = kronecker_basis(4);
        assert_abs_diff_eq!(slope_at_two(&k, &k).unwrap(), 0.0);
    }

    #[test]
    fn curve_reports_minimum() {
        let (u, v) = mub_pair(4);
        let g = cross_gram(&u, &v).unwrap();
        let c = coherence_curve(&g, &cross_gram(&v, &u).unwrap(), &uniform_grid(1.0, 2.0, 11)).unwrap();
        assert_eq!(c.r_grid.len(), 11);
        assert_eq!(c.argmin_r, 1.0);
        assert_abs_diff_eq!(c.min_value, 0.5, epsilon = 1e-12);
        assert!(coherence_curve(&g, &g, &[]).is_err());
    }

    #[test]
    fn uniform_grid_hits_endpoints() {
        let g = uniform_grid(1.0, 2.0, 201);
        assert_eq!(g.len(), 201);
        assert_eq!(g[0], 1.0);
        assert_eq!(g[200], 2.0);
        assert_abs_diff_eq!(g[100], 1.5, epsilon = 1e-15);
    }
}
