//! Independent oracles and configuration generators shared by the
//! integration tests. Nothing here calls the library's counting or
//! normalization code.

#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use zeromodes::field::{FieldSpec, KernelChoice, Profile, RadialBump};
use zeromodes::geometry::{DomainSpec, Hole};

/// Signed zero-mode count by enumerating admissible degrees, with every
/// quantity an integer multiple of 1/16 (so `16·Φ/2π = k16`, `2q = q2`).
///
/// Plane: `n ≥ 0` with `n < |y| − 1`. Disc: spin up `n < y + q − ½` when
/// `y + q + ½ > 0`, otherwise spin down `n ≤ −(y + q) − ½`.
pub fn plane_count_oracle(k16: i64) -> i64 {
    let n = (0..).take_while(|n| 16 * n < k16.abs() - 16).count() as i64;
    n * k16.signum()
}

pub fn disc_count_oracle(k16: i64, q2: i64) -> i64 {
    let t16 = k16 + 8 * q2 + 8;
    if t16 > 0 {
        (0..).take_while(|n| 16 * n < t16 - 16).count() as i64
    } else {
        -((0..).take_while(|n| 16 * n <= -t16).count() as i64)
    }
}

/// `Φ'` with `Φ'/2π ∈ [−q−½, −q+½)`, by repeated subtraction.
pub fn normalize_oracle(phi: f64, q: f64) -> f64 {
    let mut p = phi;
    while p / TAU >= -q + 0.5 - 1e-12 {
        p -= TAU;
    }
    while p / TAU < -q - 0.5 - 1e-12 {
        p += TAU;
    }
    p
}

pub fn c(x: f64, y: f64) -> Complex64 {
    Complex64::new(x, y)
}

pub fn centred_bump(flux: f64, rho: f64) -> RadialBump {
    RadialBump { center: c(0.0, 0.0), support_radius: rho, flux, profile: Profile::UniformDisc }
}

fn random_profile(rng: &mut ChaCha8Rng) -> Profile {
    if rng.gen_bool(0.5) {
        Profile::UniformDisc
    } else {
        Profile::SmoothCompact
    }
}

/// Non-overlapping holes inside `|z| < reach` with clearance `gap`.
pub fn random_holes(rng: &mut ChaCha8Rng, n: usize, reach: f64, gap: f64) -> Vec<Hole> {
    let mut holes: Vec<Hole> = Vec::new();
    while holes.len() < n {
        let r = rng.gen_range(0.3..0.8);
        let center = Complex64::from_polar(rng.gen_range(0.0..reach - r - gap), rng.gen_range(0.0..TAU));
        if holes.iter().all(|h| (h.center - center).norm() > h.radius + r + gap) {
            holes.push(Hole::new(center, r));
        }
    }
    holes
}

/// Bumps whose supports keep distance `gap` from every boundary.
pub fn random_bumps(rng: &mut ChaCha8Rng, domain: &DomainSpec, n: usize, reach: f64, gap: f64) -> Vec<RadialBump> {
    let mut out = Vec::new();
    while out.len() < n {
        let rho = rng.gen_range(0.4..1.0);
        let center = Complex64::from_polar(rng.gen_range(0.0..reach), rng.gen_range(0.0..TAU));
        if domain.clearance(center) > rho + gap {
            out.push(RadialBump { center, support_radius: rho, flux: 0.0, profile: random_profile(rng) });
        }
    }
    out
}

/// Plane or disc with up to three holes and up to two bumps.
pub struct RandomConfig {
    pub domain: DomainSpec,
    pub field: FieldSpec,
}

pub fn random_flat_config(rng: &mut ChaCha8Rng, plane: bool) -> RandomConfig {
    let reach = 6.0;
    let n_holes = rng.gen_range(0..=3);
    let holes = random_holes(rng, n_holes, reach - 0.8, 0.8);
    let domain = if plane { DomainSpec::plane(holes) } else { DomainSpec::disc(reach, holes) };
    let n_bumps = rng.gen_range(if n_holes == 0 { 1 } else { 0 }..=2);
    let mut bumps = random_bumps(rng, &domain, n_bumps, reach - 1.0, 0.3);
    let q = if plane { 0.0 } else { [-1.0, 0.0, 0.5, 1.0][rng.gen_range(0..4)] };
    let kernel = if !plane && rng.gen_bool(0.25) { KernelChoice::Alternate } else { KernelChoice::Default };
    let hole_fluxes: Vec<f64> = (0..n_holes).map(|_| rng.gen_range(-6.0 * PI..6.0 * PI)).collect();
    for b in &mut bumps {
        b.flux = rng.gen_range(-5.0 * PI..5.0 * PI);
    }
    RandomConfig { domain, field: FieldSpec { bumps, hole_fluxes, q, kernel } }
}

/// Sphere in the projected picture: a pole radius, bounded holes and bumps,
/// with the designated hole's flux closing the zero-sum constraint.
pub fn random_sphere_config(rng: &mut ChaCha8Rng) -> RandomConfig {
    let pole = 5.0;
    let n_holes = rng.gen_range(1..=3);
    let holes = random_holes(rng, n_holes, pole - 0.6, 0.6);
    let domain = DomainSpec::sphere(pole, holes);
    let n_bumps = rng.gen_range(1..=2);
    let mut bumps = random_bumps(rng, &domain, n_bumps, pole - 1.0, 0.3);
    for b in &mut bumps {
        b.flux = rng.gen_range(-5.0 * PI..5.0 * PI);
    }
    let mut hole_fluxes: Vec<f64> = (0..n_holes).map(|_| rng.gen_range(-4.0 * PI..4.0 * PI)).collect();
    let sum: f64 = bumps.iter().map(|b| b.flux).sum::<f64>() + hole_fluxes.iter().sum::<f64>();
    hole_fluxes.push(-sum);
    RandomConfig { domain, field: FieldSpec::new(bumps, hole_fluxes) }
}

/// Semi-total sphere flux from raw data: bulk plus normalized bounded holes.
pub fn semi_total_oracle(field: &FieldSpec, bounded: usize) -> f64 {
    field.bumps.iter().map(|b| b.flux).sum::<f64>()
        + field.hole_fluxes[..bounded].iter().map(|&p| normalize_oracle(p, field.q)).sum::<f64>()
}

/// Greatest integer strictly below `y`, snapping within `1e-9`.
pub fn strict_floor_oracle(y: f64) -> i64 {
    let r = y.round();
    if (y - r).abs() < 1e-9 {
        r as i64 - 1
    } else {
        y.floor() as i64
    }
}
