//! Eta invariants of the boundary operators and the index of the disc problem.
//!
//! For the spectrum `{n − c : n ∈ ℤ}` the eta function is
//!
//! ```text
//! η_s = −⟨c⟩^{−s} + Σ_{n≥1} [(n − ⟨c⟩)^{−s} − (n + ⟨c⟩)^{−s}]
//! ```
//!
//! Subtracting the integral of the summand over `[n, n+1]` leaves the terms
//! `ρ(s, ⟨c⟩, n) = O(n^{−s−2})`, which converge for `ℜs > −1`; the subtracted
//! integrals add up to an elementary closed form. At `s = 0` this gives
//! `η = −1 + 2⟨c⟩`.

use std::f64::consts::TAU;

use crate::aps::{BoundarySpectrum, Spin};
use crate::arith::{floor_snap, floor_strict, frac, near_integer};
use crate::field::{normalized_hole_fluxes, total_flux, FieldSpec, KernelChoice};
use crate::geometry::{Boundary, DomainKind, DomainSpec};
use crate::modes::{count_zero_modes, Chirality};
use crate::{Error, Result};

/// `−1 + 2⟨c⟩`, or 0 for integer `c`. Evaluated on `|c|` so that
/// `η(−c) = −η(c)` holds bit for bit.
pub fn eta_closed(c: f64) -> f64 {
    if c < 0.0 {
        return -eta_closed(-c);
    }
    match frac(c) {
        Some(f) => -1.0 + 2.0 * f,
        None => 0.0,
    }
}

/// `∫_a^{a+1} x^{−s} dx` for `a > 0`, written to avoid cancellation.
fn unit_integral(a: f64, s: f64) -> f64 {
    let l = (1.0 / a).ln_1p();
    if s == 1.0 {
        l
    } else {
        a.powf(1.0 - s) * ((1.0 - s) * l).exp_m1() / (1.0 - s)
    }
}

/// `(n − c)^{−s} − (n + c)^{−s}`.
fn paired_difference(n: f64, c: f64, s: f64) -> f64 {
    let x = c / n;
    n.powf(-s) * ((-s * (-x).ln_1p()).exp_m1() - (-s * x.ln_1p()).exp_m1())
}

/// `ρ(s, c, n)`: the paired summand minus its integral over `[n, n+1]`.
pub fn rho(s: f64, c: f64, n: u64) -> f64 {
    let n = n as f64;
    paired_difference(n, c, s) - (unit_integral(n - c, s) - unit_integral(n + c, s))
}

/// Continuation of `∫₁^∞ [(x − c)^{−s} − (x + c)^{−s}] dx`.
fn tail_integral(c: f64, s: f64) -> f64 {
    if s == 1.0 {
        ((1.0 + c) / (1.0 - c)).ln()
    } else {
        ((1.0 + c).powf(1.0 - s) - (1.0 - c).powf(1.0 - s)) / (1.0 - s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtaSeries {
    pub value: f64,
    /// Bound on the omitted `Σ_{n>N} |ρ|`.
    pub remainder_bound: f64,
}

/// `η_s` of `{n − c}` from `N` corrected terms.
pub fn eta_series(c: f64, s: f64, n_terms: u64) -> Result<EtaSeries> {
    if s <= -1.0 {
        return Err(Error::Domain(format!("eta series needs s > -1, got {s}")));
    }
    let cc = frac(c).ok_or_else(|| Error::Domain("eta series needs non-integer c".into()))?;
    let value = -cc.powf(-s) + rho_sum(cc, s, n_terms) + tail_integral(cc, s);
    let nf = n_terms.max(8) as f64;
    let remainder_bound = (s * (s + 1.0)).abs() * cc * nf.powf(-s - 1.0) / (s + 1.0)
        + 11.0 * (s * (s + 1.0) * (s + 2.0)).abs() * nf.powf(-s - 2.0) / (s + 2.0);
    Ok(EtaSeries { value, remainder_bound })
}

pub const RICHARDSON_S: [f64; 3] = [0.2, 0.1, 0.05];

/// `Σ_{n≤N} ρ(s, c, n)`, the only part of `η_s` without a closed form.
fn rho_sum(c: f64, s: f64, n_terms: u64) -> f64 {
    (1..=n_terms.max(8)).map(|n| rho(s, c, n)).sum()
}

/// Value at 0 of the quadratic through `(s_k, v_k)`.
fn neville_at_zero(x: [f64; 3], mut p: [f64; 3]) -> f64 {
    for k in 1..p.len() {
        for i in (k..p.len()).rev() {
            p[i] = (x[i] * p[i - 1] - x[i - k] * p[i]) / (x[i] - x[i - k]);
        }
    }
    p[2]
}

/// `η_0` by continuation: `−⟨c⟩^{−s}` and the tail integral are continued
/// exactly, and the `ρ` series is Richardson-extrapolated from
/// `s ∈ {0.2, 0.1, 0.05}`.
pub fn eta_continued(c: f64, n_terms: u64) -> Result<f64> {
    let Some(cc) = frac(c) else { return Ok(0.0) };
    let series = neville_at_zero(RICHARDSON_S, RICHARDSON_S.map(|s| rho_sum(cc, s, n_terms)));
    Ok(-1.0 + series + tail_integral(cc, 0.0))
}

/// `η_s` of the scaled spectrum `{κ(n − c)}`: each term picks up
/// `sign(κ)|κ|^{−s}`.
pub fn eta_series_scaled(kappa: f64, c: f64, s: f64, n_terms: u64) -> Result<f64> {
    if frac(c).is_none() {
        return Ok(0.0);
    }
    Ok(kappa.signum() * kappa.abs().powf(-s) * eta_series(c, s, n_terms)?.value)
}

/// Reads `κ` and `c` off a spin-up family `λ(ℓ) = κ(ℓ − c)`.
fn affine_parameters(spec: &BoundarySpectrum) -> (f64, f64) {
    // at most one ℓ is a kernel index, so one of the two pairs avoids it
    for l in [1, 5] {
        let (a, b) = (spec.eigenvalue(Spin::Up, l), spec.eigenvalue(Spin::Up, l + 1));
        if a != 0.0 && b != 0.0 {
            let kappa = b - a;
            return (kappa, l as f64 - a / kappa);
        }
    }
    unreachable!("two disjoint pairs cannot both hold the kernel")
}

/// Eta invariant and kernel dimension of the spin-up block of a boundary
/// operator.
pub fn boundary_eta(spec: &BoundarySpectrum) -> (f64, u32) {
    let (kappa, c) = affine_parameters(spec);
    let ker = u32::from(near_integer(c).is_some());
    (kappa.signum() * eta_closed(c), ker)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexReport {
    /// Rounded raw assembly.
    pub index: i64,
    /// Pre-simplification sum of bulk, eta, kernel and `q` terms.
    pub raw: f64,
    /// `FLOOR_STRICT(Φ/2π + ½ + q)` (non-strict floor for the alternate kernel).
    pub simplified: i64,
    pub eta_holes: Vec<f64>,
    pub ker_holes: Vec<u32>,
    pub eta_outer: f64,
    pub ker_outer: u32,
    pub phi_total: f64,
}

/// Index of the disc problem assembled from boundary eta invariants:
/// `Φ₀/2π − ½Σ_j(η_j ± h_j) − ½(η_out ± h_out) + (1 − N)q`, with `+` for the
/// default kernel choice and `−` for the alternate one. A sphere is reduced to
/// its projected disc first.
pub fn index_formula(domain: &DomainSpec, field: &FieldSpec) -> Result<IndexReport> {
    if domain.is_sphere() {
        let r = crate::conformal::sphere_to_disc(domain, field)?;
        return index_formula(&r.disc, &r.field);
    }
    let DomainKind::Disc { outer_radius } = domain.kind else {
        return Err(Error::Domain("the index formula is stated for bounded domains".into()));
    };
    let phi = total_flux(field, domain)?;
    let sign = match field.kernel {
        KernelChoice::Default => 1.0,
        KernelChoice::Alternate => -1.0,
    };
    let mut raw = field.bulk_flux() / TAU;
    let (mut eta_holes, mut ker_holes) = (Vec::new(), Vec::new());
    for (j, (hole, nf)) in domain.holes.iter().zip(normalized_hole_fluxes(field, domain)).enumerate() {
        let spec = BoundarySpectrum { boundary: Boundary::Hole(j), radius: hole.radius, flux: nf.value, q: field.q, kernel: field.kernel };
        let (eta, ker) = boundary_eta(&spec);
        raw -= 0.5 * (eta + sign * ker as f64);
        eta_holes.push(eta);
        ker_holes.push(ker);
    }
    let outer = BoundarySpectrum { boundary: Boundary::Outer, radius: outer_radius, flux: phi, q: field.q, kernel: field.kernel };
    let (eta_outer, ker_outer) = boundary_eta(&outer);
    raw -= 0.5 * (eta_outer + sign * ker_outer as f64);
    raw += (1.0 - domain.holes.len() as f64) * field.q;
    let t = phi / TAU + 0.5 + field.q;
    let simplified = match field.kernel {
        KernelChoice::Default => floor_strict(t),
        KernelChoice::Alternate => floor_snap(t),
    };
    Ok(IndexReport { index: raw.round() as i64, raw, simplified, eta_holes, ker_holes, eta_outer, ker_outer, phi_total: phi })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexConsistency {
    pub index: i64,
    pub signed_count: i64,
    pub consistent: bool,
}

/// Compares the index with `±count` of the zero modes.
pub fn index_vs_count(domain: &DomainSpec, field: &FieldSpec) -> Result<IndexConsistency> {
    let ind = index_formula(domain, field)?;
    let mc = count_zero_modes(domain, field)?;
    let signed_count = match mc.chirality {
        Chirality::Up => mc.count as i64,
        Chirality::Down => -(mc.count as i64),
        Chirality::None => 0,
    };
    Ok(IndexConsistency {
        index: ind.index,
        signed_count,
        consistent: ind.index == signed_count && ind.index == ind.simplified && (ind.raw - ind.index as f64).abs() < 1e-9,
    })
}
