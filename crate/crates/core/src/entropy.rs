//! Rényi and Shannon entropies (in nats) of l2-normalised coefficient sequences.

use crate::error::{Error, Result};
use crate::frames::CoefficientSeq;

/// Rényi entropy `R_alpha(a) = ln(sum |a~_n|^{2 alpha}) / (1 - alpha)`.
///
/// `alpha = 0` gives `ln ||a||_0` (numerical support), `alpha = 1` the Shannon
/// entropy and `alpha = inf` gives `-2 ln ||a~||_inf`.
pub fn renyi(a: &CoefficientSeq, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!("Rényi order {alpha} must be >= 0")));
    }
    let norm = a.norm2();
    if !(norm > 0.0) {
        return Err(Error::ZeroSignal);
    }
    if alpha == 0.0 {
        return Ok((a.l0() as f64).ln());
    }
    if alpha == 1.0 {
        return shannon(a);
    }
    if alpha.is_infinite() {
        return Ok(-2.0 * (a.norm_inf() / norm).ln());
    }
    let sum: f64 = a.moduli().map(|m| (m / norm).powf(2.0 * alpha)).sum();
    Ok(sum.ln() / (1.0 - alpha))
}

/// Shannon entropy `-sum |a~_n|^2 ln |a~_n|^2`, with `0 ln 0 = 0`.
pub fn shannon(a: &CoefficientSeq) -> Result<f64> {
    let norm = a.norm2();
    if !(norm > 0.0) {
        return Err(Error::ZeroSignal);
    }
    Ok(-a
        .moduli()
        .map(|m| {
            let p = (m / norm).powi(2);
            if p > 0.0 {
                p * p.ln()
            } else {
                0.0
            }
        })
        .sum::<f64>())
}

/// Exponent paired with `alpha` in the frame entropic inequality:
/// `beta = alpha (r - 2) / (r - 2 alpha)`, defined for `r` in `[1, 2)` and
/// `alpha` in `[r/2, 1]`. Returns `inf` at `alpha = r/2`.
pub fn beta_conjugate(alpha: f64, r: f64) -> Result<f64> {
    if !(1.0..2.0).contains(&r) {
        return Err(Error::InvalidParameter(format!("r = {r} outside [1, 2)")));
    }
    if !(alpha >= r / 2.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha = {alpha} outside [{}, 1]",
            r / 2.0
        )));
    }
    let denom = r - 2.0 * alpha;
    if denom.abs() <= 4.0 * f64::EPSILON {
        return Ok(f64::INFINITY);
    }
    if alpha == 1.0 {
        return Ok(1.0);
    }
    Ok(alpha * (r - 2.0) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;

    const ORDERS: [f64; 7] = [0.0, 0.5, 0.9, 1.0, 1.1, 2.0, f64::INFINITY];

    #[test]
    fn delta_has_zero_entropy() {
        let a = CoefficientSeq::from_real(&[0.0, 3.0, 0.0, 0.0]);
        for alpha in ORDERS {
            assert_abs_diff_eq!(renyi(&a, alpha).unwrap(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn flat_sequence_has_log_support_entropy() {
        let a = CoefficientSeq::from_slice(&[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 0.0),
            Complex64::from_polar(1.0, 0.7),
        ]);
        for alpha in ORDERS {
            assert_abs_diff_eq!(renyi(&a, alpha).unwrap(), 3f64.ln(), epsilon = 1e-14);
        }
    }

    #[test]
    fn collision_entropy_by_hand() {
        // |a~|^2 = (1/2, 1/4, 1/4): sum of squares 3/8
        let a = CoefficientSeq::from_real(&[0.5f64.sqrt(), 0.5, -0.5]);
        assert_abs_diff_eq!(renyi(&a, 2.0).unwrap(), -(3.0f64 / 8.0).ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(renyi(&a, 2.0).unwrap(), 0.98082925301, epsilon = 1e-10);
    }

    #[test]
    fn shannon_examples() {
        assert_abs_diff_eq!(shannon(&CoefficientSeq::from_real(&[0.0, 2.0])).unwrap(), 0.0);
        assert_abs_diff_eq!(
            shannon(&CoefficientSeq::from_real(&[1.0, 1.0, 0.0])).unwrap(),
            2f64.ln(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            shannon(&CoefficientSeq::from_real(&[1.0; 5])).unwrap(),
            5f64.ln(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn errors() {
        let zero = CoefficientSeq::from_real(&[0.0, 0.0]);
        assert_eq!(renyi(&zero, 2.0), Err(Error::ZeroSignal));
        assert_eq!(shannon(&zero), Err(Error::ZeroSignal));
        let a = CoefficientSeq::from_real(&[1.0]);
        assert!(renyi(&a, -0.1).is_err());
        assert!(renyi(&a, f64::NAN).is_err());
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta_conjugate(1.0, 1.0).unwrap(), 1.0);
        assert_abs_diff_eq!(beta_conjugate(0.75, 1.0).unwrap(), 1.5, epsilon = 1e-15);
        assert_eq!(beta_conjugate(0.5, 1.0).unwrap(), f64::INFINITY);
        assert_eq!(beta_conjugate(0.75, 1.5).unwrap(), f64::INFINITY);
        assert_eq!(beta_conjugate(1.0, 1.5).unwrap(), 1.0);
        assert!(beta_conjugate(0.4, 1.0).is_err());
        assert!(beta_conjugate(1.1, 1.0).is_err());
        assert!(beta_conjugate(0.9, 2.0).is_err());
    }

    fn seq() -> impl Strategy<Value = CoefficientSeq> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..24)
            .prop_filter("nonzero", |v| v.iter().any(|(re, im)| re.abs() + im.abs() > 1e-3))
            .prop_map(|v| {
                CoefficientSeq::from_slice(&v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect::<Vec<_>>())
            })
    }

    proptest! {
        #[test]
        fn renyi_is_nonincreasing_in_order(a in seq()) {
            let values: Vec<f64> = ORDERS.iter().map(|&al| renyi(&a, al).unwrap()).collect();
            for w in values.windows(2) {
                prop_assert!(w[0] >= w[1] - 1e-10, "{values:?}");
            }
        }

        #[test]
        fn renyi_is_scale_invariant(a in seq(), re in 0.1f64..10.0, im in -10.0f64..10.0) {
            let c = Complex64::new(re, im);
            let scaled = CoefficientSeq::new(a.values().map(|z| z * c));
            for alpha in ORDERS {
                let x = renyi(&a, alpha).unwrap();
                let y = renyi(&scaled, alpha).unwrap();
                prop_assert!((x - y).abs() < 1e-9);
            }
        }

        #[test]
        fn renyi_stays_in_range(a in seq(), alpha in 0.0f64..5.0) {
            let h = renyi(&a, alpha).unwrap();
            prop_assert!(h >= -1e-12);
            prop_assert!(h <= (a.len() as f64).ln() + 1e-12);
        }

        #[test]
        fn beta_lands_in_one_to_infinity(r in 1.0f64..1.999, t in 0.0f64..=1.0) {
            let alpha = r / 2.0 + t * (1.0 - r / 2.0);
            let beta = beta_conjugate(alpha, r).unwrap();
            prop_assert!(beta >= 1.0 - 1e-12);
        }
    }
}
