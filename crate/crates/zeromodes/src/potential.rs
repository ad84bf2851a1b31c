//! Aharonov–Casher scalar potential `h` with `−Δh = B` and the vector
//! potential `a = −2i ∂_z̄ h` (so `∂_z h = −iā/2`).
//!
//! Every source is radial about its own center, so `h` is a sum of radial
//! functions. Off a support a bump acts like a point flux,
//! `−(Φ/2π) log|z − c|`; inside a smooth bump the radial Gauss law reduces the
//! area integral to two one-dimensional quadratures.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::conformal;
use crate::field::{normalize_flux, total_flux, validate_field, FieldSpec, Profile, RadialBump};
use crate::geometry::{validate_domain, DomainSpec};
use crate::quad;
use crate::{Error, Result};

/// Whether hole fluxes enter the potential reduced into their normalization
/// window or as given.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum HoleGauge {
    #[default]
    Normalized,
    Raw,
}

/// Point flux placed inside a hole.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Delta {
    pub at: Complex64,
    pub flux: f64,
    /// Multiple of 2π removed by normalization (0 in the raw gauge).
    pub gauge_shift: i64,
}

#[derive(Clone, Debug)]
pub struct PotentialField {
    pub deltas: Vec<Delta>,
    pub bumps: Vec<RadialBump>,
    pub gauge: HoleGauge,
}

const QUAD_TOL: f64 = 1e-14;

/// Radial part of a bump: `(h(r), h'(r))`.
fn bump_radial(b: &RadialBump, r: f64) -> (f64, f64) {
    let rho = b.support_radius;
    let phi = b.flux;
    if r >= rho {
        return (-phi / TAU * r.ln(), -phi / (TAU * r));
    }
    match b.profile {
        Profile::UniformDisc => {
            let h = -phi / TAU * rho.ln() + phi / (4.0 * PI) * (1.0 - r * r / (rho * rho));
            (h, -phi * r / (TAU * rho * rho))
        }
        Profile::SmoothCompact => {
            let tol = QUAD_TOL * phi.abs().max(1.0);
            let enclosed = TAU * quad::integrate(|s| s * b.density(s), 0.0, r, tol).0;
            let outer = TAU
                * quad::integrate(|s| if s > 0.0 { s * s.ln() * b.density(s) } else { 0.0 }, r, rho, tol).0;
            let log_term = if r > 0.0 { enclosed * r.ln() } else { 0.0 };
            let dh = if r > 0.0 { -enclosed / (TAU * r) } else { 0.0 };
            (-(log_term + outer) / TAU, dh)
        }
    }
}

impl PotentialField {
    /// Potential in the normalized gauge.
    pub fn new(domain: &DomainSpec, field: &FieldSpec) -> Result<Self> {
        Self::with_gauge(domain, field, HoleGauge::Normalized)
    }

    /// Hole `k` carries a delta flux at its center; on a sphere the delta sits
    /// at the projection of the spherical cap's center, and the designated
    /// hole carries none (its flux is the image of the point at infinity).
    pub fn with_gauge(domain: &DomainSpec, field: &FieldSpec, gauge: HoleGauge) -> Result<Self> {
        validate_domain(domain).map_err(Error::InvalidDomain)?;
        validate_field(field, domain)?;
        total_flux(field, domain)?;
        let deltas = domain
            .holes
            .iter()
            .zip(&field.hole_fluxes)
            .map(|(hole, &raw)| {
                let at = if domain.is_sphere() { conformal::cap_center_projection(hole) } else { hole.center };
                match gauge {
                    HoleGauge::Raw => Delta { at, flux: raw, gauge_shift: 0 },
                    HoleGauge::Normalized => {
                        let n = normalize_flux(raw, field.q, field.kernel);
                        Delta { at, flux: n.value, gauge_shift: n.gauge_integer }
                    }
                }
            })
            .collect();
        Ok(Self { deltas, bumps: field.bumps.clone(), gauge })
    }

    /// Flux seen from infinity (or enclosed by the outer circle).
    pub fn total_flux(&self) -> f64 {
        self.deltas.iter().map(|d| d.flux).sum::<f64>() + self.bumps.iter().map(|b| b.flux).sum::<f64>()
    }

    fn check(&self, z: Complex64) -> Result<()> {
        if self.deltas.iter().any(|d| d.at == z) {
            return Err(Error::SingularPoint(z));
        }
        Ok(())
    }

    pub fn eval_h(&self, z: Complex64) -> Result<f64> {
        self.check(z)?;
        Ok(self.h_and_dz(z).0)
    }

    /// `a = a_x + i a_y`.
    pub fn eval_a(&self, z: Complex64) -> Result<Complex64> {
        self.check(z)?;
        Ok(a_from_dz(self.h_and_dz(z).1))
    }

    /// `(h, ∂_z h)` without the singular-point check.
    pub fn h_and_dz(&self, z: Complex64) -> (f64, Complex64) {
        let mut h = 0.0;
        let mut dz = Complex64::new(0.0, 0.0);
        for d in &self.deltas {
            let w = z - d.at;
            h -= d.flux / TAU * w.norm().ln();
            dz -= d.flux / (2.0 * TAU) / w;
        }
        for b in &self.bumps {
            let w = z - b.center;
            let r = w.norm();
            let (hb, dr) = bump_radial(b, r);
            h += hb;
            if r > 0.0 {
                dz += dr * w.conj() / (2.0 * r);
            }
        }
        (h, dz)
    }

    /// Radial derivative of `h` about `center` at `z`.
    pub fn dr_h(&self, z: Complex64, center: Complex64) -> f64 {
        let dz = self.h_and_dz(z).1;
        let e = (z - center) / (z - center).norm();
        2.0 * (dz * e).re
    }
}

/// `a = −2i ∂_z̄ h = −2i conj(∂_z h)` for real `h`.
pub fn a_from_dz(dz: Complex64) -> Complex64 {
    Complex64::new(0.0, -2.0) * dz.conj()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Asymptotics {
    pub slope: f64,
    pub error_order: &'static str,
    /// `|h − slope·log|z||` at `|z| = 10², 10³, 10⁴`.
    pub residuals: [f64; 3],
}

/// Leading logarithmic growth of `h` at infinity.
pub fn h_asymptotics(p: &PotentialField) -> Asymptotics {
    let slope = -p.total_flux() / TAU;
    let dir = Complex64::from_polar(1.0, 0.7);
    let residuals = [1e2, 1e3, 1e4].map(|r: f64| {
        let (h, _) = p.h_and_dz(dir * r);
        (h - slope * r.ln()).abs()
    });
    Asymptotics { slope, error_order: "O(1/|z|)", residuals }
}
