//! TOML run configuration. Fluxes are multiples of π and may be written as
//! integers, decimals or rational strings such as `"5/2"`.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use zeromodes::bm::{BmConfig, BmRegion};
use zeromodes::conformal::redesignate;
use zeromodes::field::{total_flux, validate_field, FieldSpec, KernelChoice, Profile, RadialBump};
use zeromodes::geometry::{validate_domain, DomainSpec, Hole};

/// A configuration problem; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// A number kept exact when it is written as an integer or a fraction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Num {
    Exact(i64, i64),
    Approx(f64),
}

impl Num {
    pub fn value(self) -> f64 {
        match self {
            Num::Exact(n, d) => n as f64 / d as f64,
            Num::Approx(x) => x,
        }
    }

    /// `self + k·step`, exact when both are.
    pub fn advance(self, step: Num, k: i64) -> Num {
        match (self, step) {
            (Num::Exact(a, b), Num::Exact(c, d)) => Num::Exact(a * d + k * c * b, b * d),
            _ => Num::Approx(self.value() + k as f64 * step.value()),
        }
    }

    fn parse(s: &str) -> Option<Num> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let (n, d) = (n.trim().parse::<i64>().ok()?, d.trim().parse::<i64>().ok()?);
            return (d != 0).then_some(if d < 0 { Num::Exact(-n, -d) } else { Num::Exact(n, d) });
        }
        if let Ok(n) = s.parse::<i64>() {
            return Some(Num::Exact(n, 1));
        }
        s.parse::<f64>().ok().filter(|x| x.is_finite()).map(Num::Approx)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Num::Exact(n, 1)),
            Raw::Float(x) => Ok(Num::Approx(x)),
            Raw::Text(s) => Num::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("not a number: {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Plane,
    Disc,
    Sphere,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleCfg {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainCfg {
    pub kind: Kind,
    pub outer_radius: Option<f64>,
    #[serde(default)]
    pub holes: Vec<HoleCfg>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileCfg {
    #[default]
    Uniform,
    Smooth,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpCfg {
    pub center: [f64; 2],
    pub radius: f64,
    pub flux: Num,
    #[serde(default)]
    pub profile: ProfileCfg,
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelCfg {
    #[default]
    Default,
    Alternate,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldCfg {
    #[serde(default)]
    pub hole_fluxes: Vec<Num>,
    pub q: Option<Num>,
    #[serde(default)]
    pub kernel_choice: KernelCfg,
    #[serde(default)]
    pub bumps: Vec<BumpCfg>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereCfg {
    pub designated_hole: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SweepTarget {
    #[default]
    Count,
    Bm,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCfg {
    #[serde(default)]
    pub target: SweepTarget,
    pub phi_min: Num,
    pub phi_max: Num,
    pub step: Num,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EtaCfg {
    pub c: Vec<Num>,
    pub terms: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BmCfg {
    pub r_in: f64,
    pub r_out: Option<f64>,
    pub phi: Num,
    pub s_in: f64,
    pub s_out: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyCfg {
    pub tol: Option<f64>,
    pub grid: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: Option<DomainCfg>,
    pub field: Option<FieldCfg>,
    pub sphere: Option<SphereCfg>,
    pub sweep: Option<SweepCfg>,
    pub eta: Option<EtaCfg>,
    pub bm: Option<BmCfg>,
    pub verify: Option<VerifyCfg>,
}

pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

fn point(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl RunConfig {
    fn domain_cfg(&self) -> Result<&DomainCfg, ConfigError> {
        self.domain.as_ref().map_or_else(|| bad("missing [domain]"), Ok)
    }

    pub fn kind(&self) -> Result<Kind, ConfigError> {
        Ok(self.domain_cfg()?.kind)
    }

    pub fn domain_spec(&self) -> Result<DomainSpec, ConfigError> {
        let d = self.domain_cfg()?;
        let holes = d.holes.iter().map(|h| Hole::new(point(h.center), h.radius)).collect();
        let outer = || d.outer_radius.map_or_else(|| bad("outer_radius is required for this kind"), Ok);
        Ok(match d.kind {
            Kind::Plane => {
                if d.outer_radius.is_some() {
                    return bad("a plane has no outer_radius");
                }
                DomainSpec::plane(holes)
            }
            Kind::Disc => DomainSpec::disc(outer()?, holes),
            Kind::Sphere => DomainSpec::sphere(outer()?, holes),
        })
    }

    pub fn field_spec(&self) -> Result<FieldSpec, ConfigError> {
        let f = self.field.as_ref().map_or_else(|| bad("missing [field]"), Ok)?;
        let bumps = f
            .bumps
            .iter()
            .map(|b| RadialBump {
                center: point(b.center),
                support_radius: b.radius,
                flux: b.flux.value() * PI,
                profile: match b.profile {
                    ProfileCfg::Uniform => Profile::UniformDisc,
                    ProfileCfg::Smooth => Profile::SmoothCompact,
                },
            })
            .collect();
        let kernel = match f.kernel_choice {
            KernelCfg::Default => KernelChoice::Default,
            KernelCfg::Alternate => KernelChoice::Alternate,
        };
        let fluxes = f.hole_fluxes.iter().map(|n| n.value() * PI).collect();
        Ok(FieldSpec::new(bumps, fluxes).with_q(f.q.map_or(0.0, Num::value)).with_kernel(kernel))
    }

    /// Validated domain and field, with the requested sphere hole made the
    /// designated one.
    pub fn problem(&self) -> Result<(DomainSpec, FieldSpec), ConfigError> {
        let domain = self.domain_spec()?;
        let field = self.field_spec()?;
        check(&domain, &field)?;
        if let Some(j) = self.sphere.as_ref().and_then(|s| s.designated_hole) {
            if !domain.is_sphere() {
                return bad("[sphere] needs kind = \"sphere\"");
            }
            if j > domain.holes.len() {
                return bad(format!("designated_hole {j} does not exist"));
            }
            let (d, f) = redesignate(&domain, &field, j).map_err(|e| ConfigError(e.to_string()))?;
            return Ok((d, f));
        }
        Ok((domain, field))
    }

    pub fn tolerance(&self, flag: Option<f64>) -> Result<Option<f64>, ConfigError> {
        let tol = flag.or(self.verify.as_ref().and_then(|v| v.tol));
        match tol {
            Some(t) if !(t > 0.0) => bad(format!("tolerance must be positive, got {t}")),
            t => Ok(t),
        }
    }

    pub fn grid(&self, flag: Option<usize>) -> Result<Option<usize>, ConfigError> {
        let g = flag.or(self.verify.as_ref().and_then(|v| v.grid));
        match g {
            Some(n) if n < 8 => bad(format!("grid resolution must be at least 8, got {n}")),
            g => Ok(g),
        }
    }

    pub fn bm_config(&self) -> Result<BmConfig, ConfigError> {
        let b = self.bm.as_ref().map_or_else(|| bad("missing [bm]"), Ok)?;
        let region = match (b.r_out, b.s_out) {
            (Some(r_out), Some(s_out)) => BmRegion::Annulus { r_out, s_out },
            (None, None) => BmRegion::Exterior,
            _ => return bad("[bm] needs both r_out and s_out, or neither for the exterior"),
        };
        let cfg = BmConfig { r_in: b.r_in, phi: b.phi.value() * PI, s_in: b.s_in, region };
        cfg.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(cfg)
    }
}

/// Structural checks that the library would otherwise report mid-run.
pub fn check(domain: &DomainSpec, field: &FieldSpec) -> Result<(), ConfigError> {
    if let Err(v) = validate_domain(domain) {
        let list: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        return bad(format!("invalid domain: {}", list.join("; ")));
    }
    validate_field(field, domain).map_err(|e| ConfigError(e.to_string()))?;
    total_flux(field, domain).map_err(|e| ConfigError(e.to_string()))?;
    Ok(())
}

/// Sweep points `min, min + step, …` up to `max`.
pub fn sweep_points(min: Num, max: Num, step: Num) -> Result<Vec<Num>, ConfigError> {
    if !(step.value() > 0.0) || max.value() < min.value() {
        return bad("sweep needs step > 0 and phi_max ≥ phi_min");
    }
    let n = ((max.value() - min.value()) / step.value() + 1e-9).floor() as i64;
    if n > 100_000 {
        return bad("sweep has more than 100000 points");
    }
    Ok((0..=n).map(|k| min.advance(step, k)).collect())
}
