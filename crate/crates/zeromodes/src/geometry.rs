//! Base manifolds with disjoint circular holes.
//!
//! A sphere is stored after stereographic projection: the listed holes are
//! bounded discs in the plane and one further, designated hole is the
//! exterior `|z| > pole_radius`, which contains the image of the pole.

use std::fmt;

use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hole {
    pub center: Complex64,
    pub radius: f64,
}

impl Hole {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Self { center, radius }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DomainKind {
    Plane,
    Disc { outer_radius: f64 },
    /// Projected sphere; the designated hole is `|z| > pole_radius`.
    Sphere { pole_radius: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec {
    pub kind: DomainKind,
    /// Bounded holes. For a sphere the designated hole is not in this list.
    pub holes: Vec<Hole>,
}

/// One circle of `∂M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Boundary {
    Hole(usize),
    Outer,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Hole(j) => write!(f, "hole {j}"),
            Boundary::Outer => write!(f, "outer boundary"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NonPositiveRadius(usize),
    NonPositiveOuter,
    NotContained(usize),
    Overlap(usize, usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveRadius(k) => write!(f, "hole {k} has non-positive radius"),
            Violation::NonPositiveOuter => write!(f, "outer radius must be positive"),
            Violation::NotContained(k) => write!(f, "hole {k} not contained"),
            Violation::Overlap(j, k) => write!(f, "holes {j},{k} overlap"),
        }
    }
}

/// Open annulus `inner < |z − center| < outer`; `outer` may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Annulus {
    pub center: Complex64,
    pub inner: f64,
    pub outer: f64,
}

impl DomainSpec {
    pub fn plane(holes: Vec<Hole>) -> Self {
        Self { kind: DomainKind::Plane, holes }
    }

    pub fn disc(outer_radius: f64, holes: Vec<Hole>) -> Self {
        Self { kind: DomainKind::Disc { outer_radius }, holes }
    }

    pub fn sphere(pole_radius: f64, holes: Vec<Hole>) -> Self {
        Self { kind: DomainKind::Sphere { pole_radius }, holes }
    }

    /// Number of holes including the designated one on a sphere.
    pub fn hole_count(&self) -> usize {
        self.holes.len() + usize::from(matches!(self.kind, DomainKind::Sphere { .. }))
    }

    /// Radius of the outer circle (disc boundary or designated sphere hole).
    pub fn outer_radius(&self) -> Option<f64> {
        match self.kind {
            DomainKind::Plane => None,
            DomainKind::Disc { outer_radius } => Some(outer_radius),
            DomainKind::Sphere { pole_radius } => Some(pole_radius),
        }
    }

    pub fn is_sphere(&self) -> bool {
        matches!(self.kind, DomainKind::Sphere { .. })
    }

    pub fn boundaries(&self) -> Vec<Boundary> {
        let mut b: Vec<_> = (0..self.holes.len()).map(Boundary::Hole).collect();
        if self.outer_radius().is_some() {
            b.push(Boundary::Outer);
        }
        b
    }

    /// Signed clearance: positive inside `M°`, negative inside a hole or
    /// beyond the outer circle.
    pub fn clearance(&self, z: Complex64) -> f64 {
        let mut d = f64::INFINITY;
        for h in &self.holes {
            d = d.min((z - h.center).norm() - h.radius);
        }
        if let Some(r) = self.outer_radius() {
            d = d.min(r - z.norm());
        }
        d
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.clearance(z) >= 0.0
    }

    /// Smallest length scale among hole and outer radii.
    pub fn min_radius(&self) -> f64 {
        let r = self.holes.iter().map(|h| h.radius).fold(f64::INFINITY, f64::min);
        r.min(self.outer_radius().unwrap_or(f64::INFINITY))
    }
}

/// Collects every violated invariant; an empty list means the spec is valid.
pub fn validate_domain(spec: &DomainSpec) -> std::result::Result<(), Vec<Violation>> {
    let mut v = Vec::new();
    let outer = spec.outer_radius();
    if let Some(r) = outer {
        if !(r > 0.0 && r.is_finite()) {
            v.push(Violation::NonPositiveOuter);
        }
    }
    for (k, h) in spec.holes.iter().enumerate() {
        if !(h.radius > 0.0 && h.radius.is_finite()) {
            v.push(Violation::NonPositiveRadius(k));
        }
        if let Some(r) = outer {
            if h.center.norm() + h.radius >= r {
                v.push(Violation::NotContained(k));
            }
        }
    }
    for j in 0..spec.holes.len() {
        for k in j + 1..spec.holes.len() {
            let (a, b) = (spec.holes[j], spec.holes[k]);
            if (a.center - b.center).norm() <= a.radius + b.radius {
                v.push(Violation::Overlap(j, k));
            }
        }
    }
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

/// Largest annulus co-centred with `target` that avoids the field support and
/// every other boundary component.
///
/// For a hole, `support_radii` are distances from its center at which the
/// bulk field begins. For the outer circle they are the radii (from the
/// origin) that the bulk support reaches out to.
pub fn annulus_probe(spec: &DomainSpec, target: Boundary, support_radii: &[f64]) -> Result<Annulus> {
    match target {
        Boundary::Hole(j) => {
            let hole = spec
                .holes
                .get(j)
                .ok_or_else(|| Error::Domain(format!("no hole {j}")))?;
            let mut outer = support_radii.iter().copied().fold(f64::INFINITY, f64::min);
            for (k, h) in spec.holes.iter().enumerate() {
                if k != j {
                    outer = outer.min((h.center - hole.center).norm() - h.radius);
                }
            }
            if let Some(r) = spec.outer_radius() {
                outer = outer.min(r - hole.center.norm());
            }
            if outer <= hole.radius {
                return Err(Error::NoClearance(target.to_string()));
            }
            Ok(Annulus { center: hole.center, inner: hole.radius, outer })
        }
        Boundary::Outer => {
            let r = spec
                .outer_radius()
                .ok_or_else(|| Error::Domain("the plane has no outer boundary".into()))?;
            let mut inner = support_radii.iter().copied().fold(0.0, f64::max);
            for h in &spec.holes {
                inner = inner.max(h.center.norm() + h.radius);
            }
            if inner >= r {
                return Err(Error::NoClearance(target.to_string()));
            }
            Ok(Annulus { center: Complex64::new(0.0, 0.0), inner, outer: r })
        }
    }
}
