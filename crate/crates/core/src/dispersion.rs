//! Modified energy dispersion E(p) = p^2/2m + xi1 m c p / 2M_p + xi2 p^2 / 2M_p.

use serde::{Deserialize, Serialize};

use crate::constants::{planck_mass, C, HBAR};
use crate::error::{Result, SimError};
use crate::model::ParticleSpec;
use crate::Vec3;

pub mod series;

pub use series::{commutator_dispersion_series, SeriesCoefficients};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct DispersionParams {
    pub xi1: f64,
    pub xi2: f64,
}

impl DispersionParams {
    pub fn new(xi1: f64, xi2: f64) -> Self {
        DispersionParams { xi1, xi2 }
    }

    pub fn standard() -> Self {
        DispersionParams::default()
    }

    /// mu = xi1 m c / (2 hbar M_p), in 1/(momentum time).
    pub fn mu(&self, mass: f64) -> f64 {
        self.xi1 * mass * C / (2.0 * HBAR * planck_mass())
    }
}

/// Which terms of the dispersion relation are switched on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergyTerms {
    pub kinetic: bool,
    pub linear: bool,
    pub quadratic: bool,
}

impl EnergyTerms {
    pub const ALL: EnergyTerms = EnergyTerms { kinetic: true, linear: true, quadratic: true };
    pub const KINETIC: EnergyTerms = EnergyTerms { kinetic: true, linear: false, quadratic: false };
    pub const LINEAR: EnergyTerms = EnergyTerms { kinetic: false, linear: true, quadratic: false };
    pub const QUADRATIC: EnergyTerms = EnergyTerms { kinetic: false, linear: false, quadratic: true };
}

impl Default for EnergyTerms {
    fn default() -> Self {
        EnergyTerms::ALL
    }
}

/// Dispersion relation bound to a particle mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dispersion {
    pub mass: f64,
    pub params: DispersionParams,
    pub mu: f64,
    pub terms: EnergyTerms,
}

impl Dispersion {
    pub fn new(mass: f64, params: DispersionParams) -> Self {
        Dispersion { mass, params, mu: params.mu(mass), terms: EnergyTerms::ALL }
    }

    pub fn for_particle(particle: &ParticleSpec, params: DispersionParams) -> Self {
        Self::new(particle.mass, params)
    }

    pub fn with_terms(mut self, terms: EnergyTerms) -> Self {
        self.terms = terms;
        self
    }

    /// Coefficient c of the p^2 part, E = c p^2 + a |p|.
    #[inline]
    pub fn quad_coeff(&self) -> f64 {
        let mut c = 0.0;
        if self.terms.kinetic {
            c += 0.5 / self.mass;
        }
        if self.terms.quadratic {
            c += 0.5 * self.params.xi2 / planck_mass();
        }
        c
    }

    /// Coefficient a = mu hbar of the |p| part.
    #[inline]
    pub fn lin_coeff(&self) -> f64 {
        if self.terms.linear {
            self.mu * HBAR
        } else {
            0.0
        }
    }

    /// Energy of a momentum magnitude.
    pub fn energy(&self, p_mag: f64) -> Result<f64> {
        if !(p_mag >= 0.0) {
            return Err(SimError::domain(format!("momentum magnitude must be >= 0, got {p_mag}")));
        }
        Ok(self.energy_unchecked(p_mag))
    }

    #[inline]
    pub fn energy_unchecked(&self, p_mag: f64) -> f64 {
        self.quad_coeff() * p_mag * p_mag + self.lin_coeff() * p_mag
    }

    #[inline]
    pub fn energy_vec(&self, p: &Vec3) -> f64 {
        self.energy_unchecked(p.norm())
    }

    /// E(|p + dp|) - E(|p|) without cancellation in either term.
    #[inline]
    pub fn delta_e(&self, p: &Vec3, dp: &Vec3) -> f64 {
        let quad = p.dot(dp) * 2.0 + dp.norm_squared();
        self.quad_coeff() * quad + self.lin_coeff() * norm_diff(p, dp)
    }

    /// Group velocity dE/dp.
    #[inline]
    pub fn velocity(&self, p: &Vec3) -> Vec3 {
        let n = p.norm();
        let mut v = p * (2.0 * self.quad_coeff());
        if n > 0.0 {
            v += p * (self.lin_coeff() / n);
        }
        v
    }
}

/// |p + dp| - |p| via (2 p.dp + |dp|^2) / (|p + dp| + |p|).
#[inline]
pub fn norm_diff(p: &Vec3, dp: &Vec3) -> f64 {
    let a = (p + dp).norm();
    let b = p.norm();
    let s = a + b;
    if s == 0.0 {
        return 0.0;
    }
    (2.0 * p.dot(dp) + dp.norm_squared()) / s
}

/// E(p) for a particle and parameter set.
pub fn energy(p_mag: f64, particle: &ParticleSpec, params: &DispersionParams) -> Result<f64> {
    Dispersion::for_particle(particle, *params).energy(p_mag)
}

/// E(|p + dp|) - E(|p|).
pub fn delta_e(p: &Vec3, dp: &Vec3, particle: &ParticleSpec, params: &DispersionParams) -> f64 {
    Dispersion::for_particle(particle, *params).delta_e(p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::K_DEFAULT;
    use proptest::prelude::*;

    fn cs() -> ParticleSpec {
        ParticleSpec::cesium()
    }

    #[test]
    fn standard_limit() {
        let d = Dispersion::new(1e-25, DispersionParams::standard());
        let p = 3e-27;
        assert!((d.energy(p).unwrap() / (p * p / (2.0 * 1e-25)) - 1.0).abs() < 1e-15);
        assert_eq!(d.energy(0.0).unwrap(), 0.0);
        assert!(d.energy(-1.0).is_err());
    }

    #[test]
    fn linear_term_at_planck_mass() {
        let mp = planck_mass();
        let d = Dispersion::new(mp, DispersionParams::new(1.0, 0.0));
        let p = mp * C * 1e-6;
        let e = d.energy(p).unwrap();
        let kinetic = p * p / (2.0 * mp);
        let lin = mp * C * p / (2.0 * mp);
        assert!(((e - kinetic) / lin - 1.0).abs() < 1e-12);
        assert!((lin / kinetic - 1e6).abs() < 1e-4);
    }

    #[test]
    fn single_kick_from_rest() {
        let m = cs().mass;
        let params = DispersionParams::new(0.7, 1.3);
        let hk = HBAR * K_DEFAULT;
        let got = delta_e(&Vec3::zeros(), &Vec3::new(0.0, 0.0, hk), &cs(), &params);
        let mp = planck_mass();
        let want = hk * hk / (2.0 * m) + 0.7 * m * C * hk / (2.0 * mp) + 1.3 * hk * hk / (2.0 * mp);
        assert!((got / want - 1.0).abs() < 1e-14);
    }

    #[test]
    fn orthogonal_kick_linear_part_decays() {
        let d = Dispersion::new(1e-20, DispersionParams::new(1.0, 0.0)).with_terms(EnergyTerms::LINEAR);
        let hk = HBAR * K_DEFAULT;
        let dp = Vec3::new(0.0, 0.0, hk);
        let mut last = f64::INFINITY;
        for scale in [10.0, 100.0, 1e3, 1e4, 1e6] {
            let p = Vec3::new(scale * hk, 0.0, 0.0);
            let got = d.delta_e(&p, &dp);
            let approx = d.mu * HBAR * hk * hk / (2.0 * scale * hk);
            assert!((got / approx - 1.0).abs() < 1.0 / scale, "scale {scale}");
            assert!(got < last);
            last = got;
        }
    }

    #[test]
    fn mu_zero_iff_xi1_zero() {
        assert_eq!(DispersionParams::new(0.0, 5.0).mu(1.0), 0.0);
        assert!(DispersionParams::new(1e-9, 0.0).mu(1.0) > 0.0);
    }

    proptest! {
        #[test]
        fn energy_monotone(a in 0.0f64..1e-20, b in 0.0f64..1e-20, xi1 in 0.0f64..10.0, xi2 in 0.0f64..1e10) {
            let d = Dispersion::new(1e-21, DispersionParams::new(xi1, xi2));
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(d.energy(lo).unwrap() <= d.energy(hi).unwrap());
        }

        #[test]
        fn delta_e_telescopes(
            p in proptest::array::uniform3(-1e-22f64..1e-22),
            dp in proptest::array::uniform3(-1e-24f64..1e-24),
            xi1 in -5.0f64..5.0,
        ) {
            let d = Dispersion::new(1e-21, DispersionParams::new(xi1, 1e3));
            let p = Vec3::from(p);
            let dp = Vec3::from(dp);
            let fwd = d.delta_e(&p, &dp);
            let back = d.delta_e(&(p + dp), &(-dp));
            let scale = d.quad_coeff() * (p.norm() + dp.norm()) * dp.norm()
                + d.lin_coeff().abs() * dp.norm();
            prop_assert!((fwd + back).abs() <= 1e-14 * scale, "{} {}", fwd, back);
        }
    }
}
