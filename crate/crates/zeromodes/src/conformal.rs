//! Stereographic projection, sphere-rotation Möbius maps and spinor patching.
//!
//! The projection sends `(θ, φ)` on the unit sphere to `2cot(θ/2)e^{−iφ}`,
//! the north pole going to infinity. The round metric pulls back to
//! `W²(dx² + dy²)` with `W(z) = (1 + |z|²/4)⁻¹`.
//!
//! A sphere with holes is handled in the projected picture: one designated
//! hole contains the pole and becomes the exterior of a centred circle; the
//! other holes are discs. Spherical caps project to discs, but the cap's
//! center does not project to the disc's Euclidean center.

use num_complex::Complex64;

use crate::field::{FieldSpec, RadialBump};
use crate::geometry::{validate_domain, DomainKind, DomainSpec, Hole};
use crate::{Error, Result, Spinor};

pub fn conformal_factor(z: Complex64) -> f64 {
    1.0 / (1.0 + z.norm_sqr() / 4.0)
}

pub fn stereo_project(theta: f64, phi: f64) -> Result<Complex64> {
    if theta == 0.0 {
        return Err(Error::NorthPole);
    }
    Ok(Complex64::from_polar(2.0 / (theta / 2.0).tan(), -phi))
}

/// Point on the unit sphere projecting to `z`.
pub fn lift(z: Complex64) -> [f64; 3] {
    let w = z.conj() / 2.0;
    let n = w.norm_sqr();
    [2.0 * w.re / (n + 1.0), 2.0 * w.im / (n + 1.0), (n - 1.0) / (n + 1.0)]
}

/// `(θ, φ)` of a unit vector.
pub fn spherical_coords(v: [f64; 3]) -> (f64, f64) {
    (v[2].clamp(-1.0, 1.0).acos(), v[1].atan2(v[0]))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobiusCoeffs {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MobiusCoeffs {
    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self { a: o, b: z, c: z, d: o }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// `cz + d`.
    pub fn denom(&self, z: Complex64) -> Complex64 {
        self.c * z + self.d
    }

    /// `cz + d`, or `PolePoint` when it vanishes to rounding.
    fn checked_denom(&self, z: Complex64) -> Result<Complex64> {
        let k = self.denom(z);
        if k.norm() <= 4.0 * f64::EPSILON * (self.c.norm() * z.norm() + self.d.norm()) {
            return Err(Error::PolePoint);
        }
        Ok(k)
    }

    pub fn apply(&self, z: Complex64) -> Result<Complex64> {
        let den = self.checked_denom(z)?;
        Ok((self.a * z + self.b) / den)
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Deviation from `a = d̄`, `b = −4c̄`, `|a|² + 4|c|² = 1`.
    pub fn rotation_defect(&self) -> f64 {
        let e1 = (self.a - self.d.conj()).norm();
        let e2 = (self.b + 4.0 * self.c.conj()).norm();
        let e3 = (self.a.norm_sqr() + 4.0 * self.c.norm_sqr() - 1.0).abs();
        e1.max(e2).max(e3)
    }
}

/// Möbius form of the sphere rotation that carries `ω = (θ₀, φ₀)` to the
/// north pole along its meridian.
pub fn mobius_for_point(theta0: f64, phi0: f64) -> MobiusCoeffs {
    let (s, c) = (theta0 / 2.0).sin_cos();
    MobiusCoeffs {
        a: Complex64::new(c, 0.0),
        b: Complex64::from_polar(2.0 * s, -phi0),
        c: Complex64::from_polar(-0.5 * s, phi0),
        d: Complex64::new(c, 0.0),
    }
}

/// Transports a spinor value at `z2` to the chart `Y(z2)`:
/// `u₁ = |cz+d|⁻¹ diag(cz+d, conj(cz+d)) u₂`.
pub fn patch_spinor(u2: Spinor, z2: Complex64, m: &MobiusCoeffs) -> Result<Spinor> {
    let k = m.checked_denom(z2)?;
    let p = k / k.norm();
    Ok([p * u2[0], p.conj() * u2[1]])
}

/// `|cz + d|⁻²`, equal to `W(z)/W(Y(z))` for sphere rotations.
pub fn conformal_ratio(z: Complex64, m: &MobiusCoeffs) -> Result<f64> {
    let k = m.checked_denom(z)?;
    Ok(1.0 / k.norm_sqr())
}

/// Spherical cap `{X : X·axis ≥ cos α}` whose projection is the closed disc
/// `|z − center| ≤ radius` (which must not contain the pole's image, i.e. be
/// bounded).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cap {
    pub axis: [f64; 3],
    pub cos_alpha: f64,
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn cap_of_disc(center: Complex64, radius: f64) -> Cap {
    let pts: Vec<[f64; 3]> = (0..3)
        .map(|k| lift(center + Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / 3.0)))
        .collect();
    let mut n = cross(sub(pts[1], pts[0]), sub(pts[2], pts[0]));
    let len = dot(n, n).sqrt();
    n = n.map(|x| x / len);
    let level = dot(n, pts[0]);
    let inside = lift(center);
    if dot(n, inside) < level {
        n = n.map(|x| -x);
    }
    Cap { axis: n, cos_alpha: dot(n, pts[0]) }
}

/// Projection of the spherical center of a hole's cap.
pub fn cap_center_projection(hole: &Hole) -> Complex64 {
    let cap = cap_of_disc(hole.center, hole.radius);
    // the axis of a bounded disc's cap is never the north pole
    let (t, p) = spherical_coords(cap.axis);
    stereo_project(t, p).unwrap_or(hole.center)
}

/// Circle through the images of three points of `|z − center| = radius`.
pub fn circle_image(m: &MobiusCoeffs, center: Complex64, radius: f64) -> Result<(Complex64, f64)> {
    let w: Vec<Complex64> = (0..3)
        .map(|k| m.apply(center + Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / 3.0 + 0.1)))
        .collect::<Result<_>>()?;
    let (a, b, c) = (w[0], w[1], w[2]);
    let d = 2.0 * (a.re * (b.im - c.im) + b.re * (c.im - a.im) + c.re * (a.im - b.im));
    if d.abs() < 1e-300 {
        return Err(Error::PolePoint);
    }
    let (na, nb, nc) = (a.norm_sqr(), b.norm_sqr(), c.norm_sqr());
    let ux = (na * (b.im - c.im) + nb * (c.im - a.im) + nc * (a.im - b.im)) / d;
    let uy = (na * (c.re - b.re) + nb * (a.re - c.re) + nc * (b.re - a.re)) / d;
    let o = Complex64::new(ux, uy);
    Ok((o, (a - o).norm()))
}

/// The disc problem that carries the sphere's counting data, and the rule for
/// dressing its solutions.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereReduction {
    pub disc: DomainSpec,
    pub field: FieldSpec,
    pub dressing: &'static str,
}

/// Drops the designated hole: the projected domain is a disc of radius
/// `pole_radius` with the remaining holes, carrying the semi-total flux.
pub fn sphere_to_disc(domain: &DomainSpec, field: &FieldSpec) -> Result<SphereReduction> {
    let DomainKind::Sphere { pole_radius } = domain.kind else {
        return Err(Error::Domain("sphere_to_disc needs a sphere domain".into()));
    };
    crate::field::total_flux(field, domain)?;
    let n = domain.holes.len();
    let mut f = field.clone();
    f.hole_fluxes.truncate(n);
    Ok(SphereReduction {
        disc: DomainSpec::disc(pole_radius, domain.holes.clone()),
        field: f,
        dressing: "u_sphere = W^(-1/2) u_flat, D^W = W^(-3/2) D W^(1/2)",
    })
}

/// Chart in which bounded hole `j` of a sphere domain is the disc
/// `|z| < radius`: `z_j = Y(z)` rotates the cap's antipode to the pole.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HoleFrame {
    pub mobius: MobiusCoeffs,
    pub radius: f64,
}

pub fn hole_frame(hole: &Hole) -> Result<HoleFrame> {
    let cap = cap_of_disc(hole.center, hole.radius);
    let anti = cap.axis.map(|x| -x);
    let (t, p) = spherical_coords(anti);
    let mobius = mobius_for_point(t, p);
    let (o, r) = circle_image(&mobius, hole.center, hole.radius)?;
    if o.norm() > 1e-7 * r {
        return Err(Error::Domain(format!("hole frame is not centred (offset {o})")));
    }
    Ok(HoleFrame { mobius, radius: r })
}

/// Re-expresses a sphere problem with bounded hole `j` as the designated one.
///
/// Holes map to their Möbius image circles; the old designated hole becomes
/// the last bounded hole. Each bump keeps its flux and profile and is
/// re-centred on the image of its support circle (exact for every flux
/// quantity; the bump's internal shape is not transported).
pub fn redesignate(domain: &DomainSpec, field: &FieldSpec, j: usize) -> Result<(DomainSpec, FieldSpec)> {
    let DomainKind::Sphere { pole_radius } = domain.kind else {
        return Err(Error::Domain("redesignate needs a sphere domain".into()));
    };
    validate_domain(domain).map_err(Error::InvalidDomain)?;
    crate::field::total_flux(field, domain)?;
    let n = domain.holes.len();
    if j == n {
        return Ok((domain.clone(), field.clone()));
    }
    let target = domain.holes.get(j).ok_or_else(|| Error::Domain(format!("no hole {j}")))?;
    let cap = cap_of_disc(target.center, target.radius);
    let (t, p) = spherical_coords(cap.axis);
    let y = mobius_for_point(t, p);
    let (o, new_pole) = circle_image(&y, target.center, target.radius)?;
    if o.norm() > 1e-7 * new_pole {
        return Err(Error::Domain("designated image is not centred".into()));
    }
    let mut holes = Vec::with_capacity(n);
    let mut fluxes = Vec::with_capacity(n + 1);
    for (k, h) in domain.holes.iter().enumerate() {
        if k != j {
            let (c, r) = circle_image(&y, h.center, h.radius)?;
            holes.push(Hole::new(c, r));
            fluxes.push(field.hole_fluxes[k]);
        }
    }
    let (c, r) = circle_image(&y, Complex64::new(0.0, 0.0), pole_radius)?;
    holes.push(Hole::new(c, r));
    fluxes.push(field.hole_fluxes[n]);
    fluxes.push(field.hole_fluxes[j]);
    let bumps = field
        .bumps
        .iter()
        .map(|b| {
            let (c, r) = circle_image(&y, b.center, b.support_radius)?;
            Ok(RadialBump { center: c, support_radius: r, ..*b })
        })
        .collect::<Result<Vec<_>>>()?;
    let new_domain = DomainSpec::sphere(new_pole, holes);
    let new_field = FieldSpec { bumps, hole_fluxes: fluxes, q: field.q, kernel: field.kernel };
    Ok((new_domain, new_field))
}
