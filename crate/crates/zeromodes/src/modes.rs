//! Counting, construction and numerical verification of zero modes.
//!
//! Every zero mode has the form `u⁺ = e^{h} g(z)` or `u⁻ = e^{−h} ḡ(z̄)` with
//! `g` holomorphic. The boundary conditions pick out polynomial `g`, so a
//! basis is a list of monomial degrees. Verification never trusts that form:
//! it differentiates the sampled spinor, expands its boundary traces in the
//! eigenbasis of the boundary operator and checks decay at infinity.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::aps::{leakage, sample_angles, trace_on_circle, BoundarySpectrum};
use crate::arith::floor_strict;
use crate::conformal::{conformal_factor, hole_frame, sphere_to_disc};
use crate::field::{normalize_flux, total_flux, FieldSpec, KernelChoice, Profile};
use crate::geometry::{annulus_probe, Boundary, DomainKind, DomainSpec};
use crate::potential::{a_from_dz, HoleGauge, PotentialField};
use crate::{Error, Result, Spinor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chirality {
    Up,
    Down,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModeCount {
    pub count: u64,
    pub chirality: Chirality,
}

fn signed(k: i64) -> ModeCount {
    match k.cmp(&0) {
        std::cmp::Ordering::Greater => ModeCount { count: k as u64, chirality: Chirality::Up },
        std::cmp::Ordering::Less => ModeCount { count: k.unsigned_abs(), chirality: Chirality::Down },
        std::cmp::Ordering::Equal => ModeCount { count: 0, chirality: Chirality::None },
    }
}

/// Number and chirality of zero modes.
///
/// Plane: `⌊|Φ|/2π⌋` with the strict floor. Disc: `⌊Φ/2π + q + ½⌋`, signed by
/// chirality; the alternate kernel choice gives `−⌊−(Φ/2π + q) + ½⌋`. A sphere
/// counts like its projected disc with the semi-total flux.
pub fn count_zero_modes(domain: &DomainSpec, field: &FieldSpec) -> Result<ModeCount> {
    if domain.is_sphere() {
        let r = sphere_to_disc(domain, field)?;
        return count_zero_modes(&r.disc, &r.field);
    }
    let y = total_flux(field, domain)? / TAU;
    Ok(match domain.kind {
        DomainKind::Plane => {
            let k = floor_strict(y.abs()).max(0);
            if y > 0.0 {
                signed(k)
            } else {
                signed(-k)
            }
        }
        _ => match field.kernel {
            KernelChoice::Default => signed(floor_strict(y + field.q + 0.5)),
            KernelChoice::Alternate => signed(-floor_strict(-(y + field.q) + 0.5)),
        },
    })
}

/// Holomorphic factor `g(z) = Σ c_k z^k · Π (z − w)^p`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticFactor {
    pub coeffs: Vec<Complex64>,
    pub factors: Vec<(Complex64, i32)>,
}

impl AnalyticFactor {
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Self { coeffs, factors: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c], factors: Vec::new() }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let p = self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
        self.factors.iter().fold(p, |acc, &(w, k)| acc * (z - w).powi(k))
    }

    /// Growth exponent at infinity.
    pub fn degree(&self) -> i64 {
        let top = self.coeffs.iter().rposition(|c| c.norm() > 0.0).map_or(0, |k| k as i64);
        top + self.factors.iter().map(|f| f.1 as i64).sum::<i64>()
    }
}

/// `u = (e^{h} g⁺, e^{−h} conj(g⁻))`; either part may be absent.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroMode {
    pub up: Option<AnalyticFactor>,
    pub down: Option<AnalyticFactor>,
}

impl ZeroMode {
    pub fn spin_up(g: AnalyticFactor) -> Self {
        Self { up: Some(g), down: None }
    }

    pub fn spin_down(g: AnalyticFactor) -> Self {
        Self { up: None, down: Some(g) }
    }

    pub fn chirality(&self) -> Chirality {
        match (&self.up, &self.down) {
            (Some(_), None) => Chirality::Up,
            (None, Some(_)) => Chirality::Down,
            _ => Chirality::None,
        }
    }

    /// Flat spinor for a given value of `h`.
    pub fn flat_with_h(&self, h: f64, z: Complex64) -> Spinor {
        let zero = Complex64::new(0.0, 0.0);
        [
            self.up.as_ref().map_or(zero, |g| h.exp() * g.eval(z)),
            self.down.as_ref().map_or(zero, |g| (-h).exp() * g.eval(z).conj()),
        ]
    }

    pub fn flat(&self, p: &PotentialField, z: Complex64) -> Spinor {
        self.flat_with_h(p.h_and_dz(z).0, z)
    }

    /// `(g⁺, g⁻)` recovered from a sampled spinor by removing `e^{±h}`.
    pub fn holomorphic_parts(u: Spinor, h: f64) -> (Complex64, Complex64) {
        ((-h).exp() * u[0], (h.exp() * u[1]).conj())
    }
}

/// Evaluates a mode; on a sphere the spinor carries the factor `W^{−1/2}`.
pub fn eval_mode(mode: &ZeroMode, potential: &PotentialField, sphere: bool, z: Complex64) -> Spinor {
    let u = mode.flat(potential, z);
    if sphere {
        let s = conformal_factor(z).powf(-0.5);
        [u[0] * s, u[1] * s]
    } else {
        u
    }
}

#[derive(Clone, Debug)]
pub struct ZeroModeBasis {
    pub chirality: Chirality,
    pub degrees: Vec<i64>,
    pub modes: Vec<ZeroMode>,
    pub potential: PotentialField,
    pub domain: DomainSpec,
    pub field: FieldSpec,
}

fn monomial_mode(chirality: Chirality, n: usize, potential: &PotentialField, field: &FieldSpec) -> ZeroMode {
    let mut g = AnalyticFactor::monomial(n);
    if potential.gauge == HoleGauge::Raw {
        // undo the normalization: (z − w)^m for spin up, (z − w)^{−m} inside
        // the conjugate for spin down
        for d in &potential.deltas {
            let m = normalize_flux(d.flux, field.q, field.kernel).gauge_integer as i32;
            if m != 0 {
                let p = if chirality == Chirality::Down { -m } else { m };
                g.factors.push((d.at, p));
            }
        }
    }
    match chirality {
        Chirality::Down => ZeroMode::spin_down(g),
        _ => ZeroMode::spin_up(g),
    }
}

/// Monomial basis `z^n` (spin up) or `z̄^n` (spin down), `n = 0..count`.
pub fn build_basis(domain: &DomainSpec, field: &FieldSpec, potential: &PotentialField) -> Result<ZeroModeBasis> {
    let mc = count_zero_modes(domain, field)?;
    if mc.count == 0 {
        return Err(Error::EmptyBasis);
    }
    let degrees: Vec<i64> = (0..mc.count as i64).collect();
    let modes = degrees.iter().map(|&n| monomial_mode(mc.chirality, n as usize, potential, field)).collect();
    Ok(ZeroModeBasis {
        chirality: mc.chirality,
        degrees,
        modes,
        potential: potential.clone(),
        domain: domain.clone(),
        field: field.clone(),
    })
}

/// The first monomial beyond the basis: the next degree of the same
/// chirality, or degree 0 with the sign of the flux when the basis is empty.
pub fn next_candidate(domain: &DomainSpec, field: &FieldSpec, potential: &PotentialField) -> Result<ZeroMode> {
    let mc = count_zero_modes(domain, field)?;
    let chirality = match mc.chirality {
        Chirality::None => {
            let phi = if domain.is_sphere() { potential.total_flux() } else { total_flux(field, domain)? };
            if phi >= 0.0 {
                Chirality::Up
            } else {
                Chirality::Down
            }
        }
        c => c,
    };
    Ok(monomial_mode(chirality, mc.count as usize, potential, field))
}

/// Resolution and tolerances of the numerical checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    /// Finite-difference step is `min_radius / resolution`.
    pub resolution: usize,
    pub radial: usize,
    pub angular: usize,
    /// Maximum bulk grid points per axis.
    pub bulk_cap: usize,
    pub trace_samples: usize,
    pub l_max: i64,
    pub tol_residual: f64,
    pub tol_leakage: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::new(256)
    }
}

impl GridSpec {
    pub fn new(resolution: usize) -> Self {
        Self {
            resolution: resolution.max(8),
            radial: 64,
            angular: 256,
            bulk_cap: 160,
            trace_samples: 2048,
            l_max: 64,
            tol_residual: 1e-6,
            tol_leakage: 1e-6,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol_residual = tol;
        self.tol_leakage = tol;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    /// `max|D u| / max|u|` at the fine step.
    pub pde_residual: f64,
    /// Same at twice the step.
    pub pde_residual_coarse: f64,
    /// Forbidden share of each boundary trace (Ȟ-norm).
    pub leakage: Vec<(Boundary, f64)>,
    /// Plane only: `n_max ∓ Φ/2π < −1`.
    pub exponent_ok: Option<bool>,
    /// Plane only: measured `d log|u| / d log r` at large radius.
    pub decay_slope: Option<f64>,
    pub sample_points: usize,
    pub tol_residual: f64,
    pub tol_leakage: f64,
    pub pass: bool,
}

impl VerificationReport {
    pub fn max_leakage(&self) -> f64 {
        self.leakage.iter().map(|l| l.1).fold(0.0, f64::max)
    }
}

/// Flat picture of a domain: a sphere becomes its projected disc.
fn flat_domain(domain: &DomainSpec, field: &FieldSpec) -> Result<DomainSpec> {
    if domain.is_sphere() {
        Ok(sphere_to_disc(domain, field)?.disc)
    } else {
        Ok(domain.clone())
    }
}

fn length_scale(domain: &DomainSpec, field: &FieldSpec) -> f64 {
    let bumps = field.bumps.iter().map(|b| b.support_radius).fold(f64::INFINITY, f64::min);
    let r = domain.min_radius().min(bumps);
    if r.is_finite() {
        r
    } else {
        1.0
    }
}

/// Interior sample points: polar grids on the probe annuli plus a Cartesian
/// bulk grid. Points whose stencil would leave `M`, touch a delta or straddle
/// the edge of a uniform disc are dropped.
fn sample_points(flat: &DomainSpec, field: &FieldSpec, grid: &GridSpec, delta: f64) -> Vec<Complex64> {
    let margin = 2.5 * delta;
    let keep = |z: Complex64| {
        flat.clearance(z) > margin
            && field.bumps.iter().all(|b| {
                b.profile != Profile::UniformDisc || ((z - b.center).norm() - b.support_radius).abs() > margin
            })
    };
    let mut pts = Vec::new();
    let mut annuli = Vec::new();
    for (j, hole) in flat.holes.iter().enumerate() {
        let supports: Vec<f64> =
            field.bumps.iter().map(|b| (b.center - hole.center).norm() - b.support_radius).collect();
        if let Ok(mut a) = annulus_probe(flat, Boundary::Hole(j), &supports) {
            a.outer = a.outer.min(4.0 * a.inner);
            annuli.push(a);
        }
    }
    if flat.outer_radius().is_some() {
        let supports: Vec<f64> = field.bumps.iter().map(|b| b.center.norm() + b.support_radius).collect();
        if let Ok(a) = annulus_probe(flat, Boundary::Outer, &supports) {
            annuli.push(a);
        }
    }
    for a in annuli {
        for i in 0..grid.radial {
            let r = a.inner + (a.outer - a.inner) * (i as f64 + 0.5) / grid.radial as f64;
            for t in sample_angles(grid.angular) {
                pts.push(a.center + Complex64::from_polar(r, t));
            }
        }
    }
    let extent = match flat.outer_radius() {
        Some(r) => r,
        None => {
            let reach = flat
                .holes
                .iter()
                .map(|h| h.center.norm() + h.radius)
                .chain(field.bumps.iter().map(|b| b.center.norm() + b.support_radius))
                .fold(1.0, f64::max);
            1.5 * reach
        }
    };
    let spacing = (flat.min_radius().min(extent) / 32.0).max(2.0 * extent / grid.bulk_cap as f64);
    let n = (2.0 * extent / spacing).ceil() as i64;
    for i in 0..=n {
        for k in 0..=n {
            pts.push(Complex64::new(-extent + i as f64 * spacing, -extent + k as f64 * spacing));
        }
    }
    pts.retain(|&z| keep(z));
    pts
}

/// `D_a u` at `z` from fourth-order central differences with step `delta`.
fn dirac_residual(mode: &ZeroMode, p: &PotentialField, z: Complex64, delta: f64) -> Spinor {
    let u = |w: Complex64| mode.flat(p, w);
    let diff = |e: Complex64| -> Spinor {
        let (m2, m1, p1, p2) = (u(z - 2.0 * e), u(z - e), u(z + e), u(z + 2.0 * e));
        [0, 1].map(|s| (m2[s] - 8.0 * m1[s] + 8.0 * p1[s] - p2[s]) / (12.0 * delta))
    };
    let ux = diff(Complex64::new(delta, 0.0));
    let uy = diff(Complex64::new(0.0, delta));
    let i = Complex64::i();
    let dz = |s: usize| (ux[s] - i * uy[s]) / 2.0;
    let dzb = |s: usize| (ux[s] + i * uy[s]) / 2.0;
    let a = a_from_dz(p.h_and_dz(z).1);
    let c = u(z);
    [-2.0 * i * dz(1) - a.conj() * c[1], -2.0 * i * dzb(0) - a * c[0]]
}

fn spinor_norm(u: Spinor) -> f64 {
    (u[0].norm_sqr() + u[1].norm_sqr()).sqrt()
}

/// Normalized PDE residual over `pts`. On a sphere the operator is
/// `W^{−3/2} D W^{1/2}` acting on `W^{−1/2}·(flat mode)`.
fn pde_residual(mode: &ZeroMode, p: &PotentialField, pts: &[Complex64], delta: f64, sphere: bool) -> f64 {
    let (res, size) = pts
        .par_iter()
        .map(|&z| {
            let r = spinor_norm(dirac_residual(mode, p, z, delta));
            let u = spinor_norm(mode.flat(p, z));
            if sphere {
                let w = conformal_factor(z);
                (r * w.powf(-1.5), u * w.powf(-0.5))
            } else {
                (r, u)
            }
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    if size > 0.0 {
        res / size
    } else {
        0.0
    }
}

fn circle_leakage(u: &[Spinor], dr: &[f64], spec: &BoundarySpectrum, l_max: i64) -> f64 {
    let tf = trace_on_circle(u, dr, spec.radius, spec.flux, l_max);
    leakage(&tf, spec).relative()
}

/// Forbidden trace share on each boundary circle.
fn boundary_leakage(
    mode: &ZeroMode,
    domain: &DomainSpec,
    flat: &DomainSpec,
    field: &FieldSpec,
    p: &PotentialField,
    grid: &GridSpec,
) -> Result<Vec<(Boundary, f64)>> {
    let m = grid.trace_samples;
    let angles: Vec<f64> = sample_angles(m).collect();
    let mut out = Vec::new();
    for (j, hole) in flat.holes.iter().enumerate() {
        let flux = p.deltas.get(j).map_or(0.0, |d| d.flux);
        let (u, dr, radius): (Vec<Spinor>, Vec<f64>, f64) = if domain.is_sphere() {
            // the hole is centred in its own chart z_j = Y(z); W is constant
            // on its boundary there and W^{1/2}u = (k e^{h}g, k̄ e^{−h}ḡ)
            // with k = cz + d
            let frame = hole_frame(hole)?;
            let inv = frame.mobius.inverse();
            let mut u = Vec::with_capacity(m);
            let mut dr = Vec::with_capacity(m);
            for &t in &angles {
                let e = Complex64::from_polar(1.0, t);
                let zt = inv.apply(frame.radius * e)?;
                let k = frame.mobius.denom(zt);
                let (h, dz) = p.h_and_dz(zt);
                let f = mode.flat_with_h(h, zt);
                u.push([k * f[0], k.conj() * f[1]]);
                dr.push(2.0 * (dz * k * k * e).re);
            }
            (u, dr, frame.radius)
        } else {
            let pts: Vec<Complex64> = angles.iter().map(|&t| hole.center + Complex64::from_polar(hole.radius, t)).collect();
            (
                pts.iter().map(|&z| mode.flat(p, z)).collect(),
                pts.iter().map(|&z| p.dr_h(z, hole.center)).collect(),
                hole.radius,
            )
        };
        let spec = BoundarySpectrum { boundary: Boundary::Hole(j), radius, flux, q: field.q, kernel: field.kernel };
        out.push((Boundary::Hole(j), circle_leakage(&u, &dr, &spec, grid.l_max)));
    }
    if let Some(r) = flat.outer_radius() {
        let pts: Vec<Complex64> = angles.iter().map(|&t| Complex64::from_polar(r, t)).collect();
        let u: Vec<Spinor> = pts.iter().map(|&z| mode.flat(p, z)).collect();
        let dr: Vec<f64> = pts.iter().map(|&z| p.dr_h(z, Complex64::new(0.0, 0.0))).collect();
        let spec = BoundarySpectrum {
            boundary: Boundary::Outer,
            radius: r,
            flux: p.total_flux(),
            q: field.q,
            kernel: field.kernel,
        };
        out.push((Boundary::Outer, circle_leakage(&u, &dr, &spec, grid.l_max)));
    }
    Ok(out)
}

/// Angle-averaged `log|u|` slope between `r` and `2r`; the harmonic part of
/// `h` averages out beyond every source.
fn decay_slope(mode: &ZeroMode, p: &PotentialField, r: f64) -> f64 {
    let avg = |rad: f64| {
        sample_angles(64).map(|t| spinor_norm(mode.flat(p, Complex64::from_polar(rad, t + 0.3))).ln()).sum::<f64>() / 64.0
    };
    (avg(2.0 * r) - avg(r)) / std::f64::consts::LN_2
}

/// Checks the PDE, every boundary condition and (on the plane) square
/// integrability of one mode.
pub fn verify_mode(
    mode: &ZeroMode,
    domain: &DomainSpec,
    field: &FieldSpec,
    potential: &PotentialField,
    grid: &GridSpec,
) -> Result<VerificationReport> {
    let flat = flat_domain(domain, field)?;
    let delta = length_scale(&flat, field) / grid.resolution as f64;
    let pts = sample_points(&flat, field, grid, 2.0 * delta);
    let sphere = domain.is_sphere();
    let coarse = pde_residual(mode, potential, &pts, 2.0 * delta, sphere);
    let fine = pde_residual(mode, potential, &pts, delta, sphere);
    if (coarse - fine).abs() > 10.0 * grid.tol_residual {
        return Err(Error::GridTooCoarse { coarse, fine });
    }
    let leak = boundary_leakage(mode, domain, &flat, field, potential, grid)?;
    let (exponent_ok, slope) = if matches!(flat.kind, DomainKind::Plane) {
        let y = potential.total_flux() / TAU;
        let ok = match (&mode.up, &mode.down) {
            (Some(g), None) => g.degree() as f64 - y < -1.0,
            (None, Some(g)) => g.degree() as f64 + y < -1.0,
            (Some(g), Some(f)) => g.degree() as f64 - y < -1.0 && f.degree() as f64 + y < -1.0,
            (None, None) => true,
        };
        let expected = match (&mode.up, &mode.down) {
            (Some(g), None) => Some(g.degree() as f64 - y),
            (None, Some(g)) => Some(g.degree() as f64 + y),
            _ => None,
        };
        let s = decay_slope(mode, potential, 1e3);
        let slope_ok = expected.is_none_or(|e| (s - e).abs() < 1e-2);
        (Some(ok && slope_ok), Some(s))
    } else {
        (None, None)
    };
    let pass = fine < grid.tol_residual
        && leak.iter().all(|l| l.1 < grid.tol_leakage)
        && exponent_ok.unwrap_or(true);
    Ok(VerificationReport {
        pde_residual: fine,
        pde_residual_coarse: coarse,
        leakage: leak,
        exponent_ok,
        decay_slope: slope,
        sample_points: pts.len(),
        tol_residual: grid.tol_residual,
        tol_leakage: grid.tol_leakage,
        pass,
    })
}

/// Verifies every mode of a basis.
pub fn verify_basis(basis: &ZeroModeBasis, grid: &GridSpec) -> Result<Vec<VerificationReport>> {
    basis
        .modes
        .iter()
        .map(|m| verify_mode(m, &basis.domain, &basis.field, &basis.potential, grid))
        .collect()
}

/// Whether `g^± = e^{∓h} u^±` extends holomorphically into hole `hole`:
/// Laurent coefficients are taken by DFT at three radii of the probe annulus
/// and every negative power must be below `10⁻⁶` of the largest coefficient.
pub fn analytic_extension_check(
    mode: &ZeroMode,
    domain: &DomainSpec,
    field: &FieldSpec,
    potential: &PotentialField,
    hole: usize,
) -> Result<bool> {
    let flat = flat_domain(domain, field)?;
    let h0 = flat.holes.get(hole).ok_or_else(|| Error::Domain(format!("no hole {hole}")))?;
    let supports: Vec<f64> = field.bumps.iter().map(|b| (b.center - h0.center).norm() - b.support_radius).collect();
    let a = annulus_probe(&flat, Boundary::Hole(hole), &supports)?;
    let outer = a.outer.min(4.0 * a.inner);
    let m = 256usize;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(m);
    for frac in [0.25, 0.5, 0.75] {
        let r = a.inner + (outer - a.inner) * frac;
        let mut parts = [Vec::with_capacity(m), Vec::with_capacity(m)];
        for t in sample_angles(m) {
            let z = a.center + Complex64::from_polar(r, t);
            let h = potential.h_and_dz(z).0;
            let (gp, gm) = ZeroMode::holomorphic_parts(mode.flat_with_h(h, z), h);
            parts[0].push(gp);
            parts[1].push(gm);
        }
        for mut g in parts {
            fft.process(&mut g);
            let max = g.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if max == 0.0 {
                continue;
            }
            // bins m/2+1..m hold the negative powers
            if g[m / 2 + 1..].iter().any(|c| c.norm() >= 1e-6 * max) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Basis with every hole flux taken in the raw gauge (`HoleGauge::Raw`).
pub fn build_basis_raw_gauge(domain: &DomainSpec, field: &FieldSpec) -> Result<ZeroModeBasis> {
    let p = PotentialField::with_gauge(domain, field, HoleGauge::Raw)?;
    build_basis(domain, field, &p)
}
