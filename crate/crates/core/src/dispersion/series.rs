//! Dispersion series induced by the deformed commutator [x, p] = i hbar (1 + beta p^2).
//!
//! The expansion of <p=0| e^{-i pt x/hbar} p^2/2m e^{i pt x/hbar} |p=0> in powers of the
//! shift pt follows from applying D = (1 + beta p^2) d/dp repeatedly to p^2 and evaluating
//! at p = 0. Everything is kept exact and symbolic in beta.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Result, SimError};

/// Polynomial in (p, beta): (p power, beta power) -> coefficient.
type Poly = BTreeMap<(u32, u32), BigRational>;

/// Series coefficients in units of 1/(2m): E = (1/2m) sum c_{n,j} beta^j pt^n.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoefficients {
    pub beta: f64,
    /// (power of pt, power of beta, exact coefficient); zero entries omitted.
    pub terms: Vec<(u32, u32, BigRational)>,
}

impl SeriesCoefficients {
    /// Exact coefficient of beta^j pt^n.
    pub fn coefficient(&self, pt_power: u32, beta_power: u32) -> BigRational {
        self.terms
            .iter()
            .find(|t| t.0 == pt_power && t.1 == beta_power)
            .map(|t| t.2.clone())
            .unwrap_or_else(BigRational::zero)
    }

    /// Numeric coefficient of pt^n at the stored beta.
    pub fn coefficient_at(&self, pt_power: u32) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.0 == pt_power)
            .map(|t| t.2.to_f64().unwrap_or(f64::NAN) * self.beta.powi(t.1 as i32))
            .sum()
    }

    /// (pt power, numeric coefficient) pairs with nonzero value at the stored beta.
    pub fn numeric(&self) -> Vec<(u32, f64)> {
        let mut powers: Vec<u32> = self.terms.iter().map(|t| t.0).collect();
        powers.dedup();
        powers
            .into_iter()
            .map(|n| (n, self.coefficient_at(n)))
            .filter(|(_, c)| *c != 0.0)
            .collect()
    }
}

fn apply_d(poly: &Poly) -> Poly {
    let mut out = Poly::new();
    for (&(i, j), c) in poly {
        if i == 0 {
            continue;
        }
        let ci = c * BigRational::from_integer(BigInt::from(i));
        *out.entry((i - 1, j)).or_insert_with(BigRational::zero) += ci.clone();
        *out.entry((i + 1, j + 1)).or_insert_with(BigRational::zero) += ci;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Expansion up to beta^order; order is limited to 0, 1 or 2.
pub fn commutator_dispersion_series(beta: f64, order: u32) -> Result<SeriesCoefficients> {
    if order > 2 {
        return Err(SimError::Unsupported(format!(
            "series order {order} requested, only 0..=2 are provided"
        )));
    }
    let mut poly = Poly::new();
    poly.insert((2, 0), BigRational::from_integer(1.into()));
    let mut factorial = BigInt::from(1);
    let mut terms = Vec::new();
    let max_nu = 2 * order + 2;
    for nu in 1..=max_nu {
        poly = apply_d(&poly);
        factorial *= nu;
        for (&(i, j), c) in &poly {
            if i == 0 && j <= order {
                let coeff = c / BigRational::from_integer(factorial.clone());
                terms.push((nu, j, coeff));
            }
        }
    }
    terms.sort_by_key(|t| (t.0, t.1));
    Ok(SeriesCoefficients { beta, terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Taylor coefficients of tan^2(y) from t' = 1 + t^2, independent of the recursion above.
    fn tan_squared_coeffs(n: usize) -> Vec<BigRational> {
        let mut t = vec![BigRational::zero(); n + 1];
        for k in 0..n {
            // (k+1) t_{k+1} = [k == 0] + sum_{i} t_i t_{k-i}
            let mut s = if k == 0 { r(1, 1) } else { BigRational::zero() };
            for i in 0..=k {
                s += &t[i] * &t[k - i];
            }
            t[k + 1] = s / r(k as i64 + 1, 1);
        }
        let mut sq = vec![BigRational::zero(); n + 1];
        for i in 0..=n {
            for j in 0..=(n - i) {
                sq[i + j] += &t[i] * &t[j];
            }
        }
        sq
    }

    #[test]
    fn known_coefficients() {
        let s = commutator_dispersion_series(0.3, 2).unwrap();
        assert_eq!(s.coefficient(2, 0), r(1, 1));
        assert_eq!(s.coefficient(4, 1), r(2, 3));
        assert_eq!(s.coefficient(6, 2), r(17, 45));
    }

    #[test]
    fn agrees_with_tan_squared_oracle() {
        // E = (1/2m) tan^2(sqrt(beta) pt) / beta.
        let tan2 = tan_squared_coeffs(6);
        let s = commutator_dispersion_series(1.0, 2).unwrap();
        for j in 0..=2u32 {
            let n = 2 * j + 2;
            assert_eq!(s.coefficient(n, j), tan2[n as usize]);
        }
        assert!(tan2[1].is_zero() && tan2[3].is_zero() && tan2[5].is_zero());
    }

    #[test]
    fn beta_zero_is_standard() {
        let s = commutator_dispersion_series(0.0, 2).unwrap();
        assert_eq!(s.numeric(), vec![(2, 1.0)]);
        let s0 = commutator_dispersion_series(5.0, 0).unwrap();
        assert_eq!(s0.terms, vec![(2, 0, r(1, 1))]);
    }

    #[test]
    fn order_three_rejected() {
        assert!(commutator_dispersion_series(1.0, 3).is_err());
    }

    #[test]
    fn no_linear_term() {
        let mut x = 0.123_f64;
        for _ in 0..100 {
            x = (x * 7919.0 + 0.31).fract();
            let beta = 10f64.powf(8.0 * x - 4.0);
            let s = commutator_dispersion_series(beta, 2).unwrap();
            assert_eq!(s.coefficient_at(1), 0.0);
            assert_eq!(s.coefficient_at(3), 0.0);
        }
    }
}
