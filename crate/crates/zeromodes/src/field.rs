//! Magnetic fields: radial bumps in the bulk plus delta fluxes in the holes.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::arith::{ceil_snap, floor_snap};
use crate::geometry::DomainSpec;
use crate::quad;
use crate::{Error, Result};

/// Radial profile of a bump.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// Constant density on the support disc.
    UniformDisc,
    /// `∝ exp(−1/(1 − (r/ρ)²))` for `r < ρ`.
    SmoothCompact,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialBump {
    pub center: Complex64,
    pub support_radius: f64,
    pub flux: f64,
    pub profile: Profile,
}

/// Which half of a boundary kernel enters the spectral condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum KernelChoice {
    /// Spin-down kernel vectors are kept.
    #[default]
    Default,
    /// Spin-up kernel vectors are kept.
    Alternate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldSpec {
    pub bumps: Vec<RadialBump>,
    /// Raw flux through each hole, in the order of `DomainSpec::holes`; for
    /// a sphere the designated hole's flux comes last.
    pub hole_fluxes: Vec<f64>,
    pub q: f64,
    pub kernel: KernelChoice,
}

impl FieldSpec {
    pub fn new(bumps: Vec<RadialBump>, hole_fluxes: Vec<f64>) -> Self {
        Self { bumps, hole_fluxes, q: 0.0, kernel: KernelChoice::Default }
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = q;
        self
    }

    pub fn with_kernel(mut self, kernel: KernelChoice) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn bulk_flux(&self) -> f64 {
        self.bumps.iter().map(|b| b.flux).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizedFlux {
    pub value: f64,
    /// `m` with `phi = value + 2πm`.
    pub gauge_integer: i64,
}

/// Reduces `phi` modulo 2π into the window selected by `(q, kernel)`:
/// `Φ'/2π ∈ [−q−½, −q+½)` for the default kernel, `(−q−½, −q+½]` otherwise.
pub fn normalize_flux(phi: f64, q: f64, kernel: KernelChoice) -> NormalizedFlux {
    let y = phi / TAU;
    let m = match kernel {
        KernelChoice::Default => floor_snap(y + q + 0.5),
        KernelChoice::Alternate => ceil_snap(y + q - 0.5),
    };
    NormalizedFlux { value: phi - TAU * m as f64, gauge_integer: m }
}

/// Normalized fluxes of the bounded holes (the designated sphere hole is
/// excluded).
pub fn normalized_hole_fluxes(field: &FieldSpec, domain: &DomainSpec) -> Vec<NormalizedFlux> {
    field
        .hole_fluxes
        .iter()
        .take(domain.holes.len())
        .map(|&p| normalize_flux(p, field.q, field.kernel))
        .collect()
}

/// Zero-sum residual of the raw sphere fluxes.
pub fn sphere_flux_residual(field: &FieldSpec) -> f64 {
    field.bulk_flux() + field.hole_fluxes.iter().sum::<f64>()
}

/// `Φ₀ + Σ Φ'_k`; on a sphere the sum skips the designated hole (semi-total
/// flux), after checking that the raw fluxes sum to zero.
pub fn total_flux(field: &FieldSpec, domain: &DomainSpec) -> Result<f64> {
    check_lengths(field, domain)?;
    if domain.is_sphere() {
        let r = sphere_flux_residual(field);
        let scale = field.bulk_flux().abs() + field.hole_fluxes.iter().map(|f| f.abs()).sum::<f64>();
        if r.abs() > 1e-9 * scale.max(1.0) {
            return Err(Error::SphereFluxMismatch(r));
        }
    }
    let holes: f64 = normalized_hole_fluxes(field, domain).iter().map(|n| n.value).sum();
    Ok(field.bulk_flux() + holes)
}

fn check_lengths(field: &FieldSpec, domain: &DomainSpec) -> Result<()> {
    if field.hole_fluxes.len() != domain.hole_count() {
        return Err(Error::InvalidField(format!(
            "{} hole fluxes for {} holes",
            field.hole_fluxes.len(),
            domain.hole_count()
        )));
    }
    Ok(())
}

/// Checks flux list length, finiteness and that every bump support lies in
/// the interior of `M`.
pub fn validate_field(field: &FieldSpec, domain: &DomainSpec) -> Result<()> {
    check_lengths(field, domain)?;
    if !field.q.is_finite() || field.hole_fluxes.iter().any(|f| !f.is_finite()) {
        return Err(Error::InvalidField("non-finite flux or q".into()));
    }
    for (i, b) in field.bumps.iter().enumerate() {
        if !(b.support_radius > 0.0) || !b.flux.is_finite() {
            return Err(Error::InvalidField(format!("bump {i} has bad radius or flux")));
        }
        if domain.clearance(b.center) <= b.support_radius {
            return Err(Error::InvalidField(format!("bump {i} support leaves the interior")));
        }
    }
    Ok(())
}

fn smooth_shape(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

/// `2π ∫₀¹ x·exp(−1/(1−x²)) dx`, the flux of the unit smooth profile.
pub fn smooth_norm() -> f64 {
    static N: OnceLock<f64> = OnceLock::new();
    *N.get_or_init(|| TAU * quad::integrate(|x| x * smooth_shape(x), 0.0, 1.0, 1e-16).0)
}

impl RadialBump {
    /// Field density at distance `r` from the center.
    pub fn density(&self, r: f64) -> f64 {
        let rho = self.support_radius;
        match self.profile {
            Profile::UniformDisc => {
                if r < rho {
                    self.flux / (PI * rho * rho)
                } else {
                    0.0
                }
            }
            Profile::SmoothCompact => self.flux / (rho * rho * smooth_norm()) * smooth_shape(r / rho),
        }
    }
}

/// Pointwise bulk field; delta fluxes contribute nothing.
#[allow(non_snake_case)]
pub fn eval_B(field: &FieldSpec, z: Complex64) -> f64 {
    field.bumps.iter().map(|b| b.density((z - b.center).norm())).sum()
}
