//! Local (Berry–Mondragón) boundary conditions on a concentric annulus
//! `R₁ < |z| < R_out` with all flux `Φ` inside the hole.
//!
//! The conditions read `u⁻ = −S_in i e^{iφ} u⁺` on the inner circle and
//! `u⁻ = S_out i e^{iφ} u⁺` on the outer one. With `h = −(Φ/2π) log|z|` the
//! Fourier modes decouple: `u⁻ = |z|^{Φ/2π} z̄^{−n}` pairs with
//! `u⁺ ∝ |z|^{−Φ/2π} z^{n−1}`, and matching both circles forces
//!
//! ```text
//! (R₁/R_out)^{e} = −S_in/S_out,   e = Φ/π − 2n + 1.
//! ```
//!
//! So a mode needs `K = −S_in/S_out > 0`, and `n = (Φ/π − e* + 1)/2` must be
//! an integer for `e* = log K / log(R₁/R_out)`. When `|S_in| = |S_out|` this is
//! the familiar rule: opposite signs and `Φ` an odd multiple of π.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::aps::sample_angles;
use crate::{Error, Result, Spinor};

/// Tolerance on the integrality of `n`.
pub const EXISTENCE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BmRegion {
    Annulus { r_out: f64, s_out: f64 },
    /// The hole's exterior in the plane.
    Exterior,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BmConfig {
    pub r_in: f64,
    pub phi: f64,
    pub s_in: f64,
    pub region: BmRegion,
}

impl BmConfig {
    pub fn annulus(r_in: f64, r_out: f64, phi: f64, s_in: f64, s_out: f64) -> Self {
        Self { r_in, phi, s_in, region: BmRegion::Annulus { r_out, s_out } }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_in > 0.0) || self.s_in == 0.0 || !self.phi.is_finite() {
            return Err(Error::Domain("need R1 > 0, S_in ≠ 0 and finite flux".into()));
        }
        if let BmRegion::Annulus { r_out, s_out } = self.region {
            if !(r_out > self.r_in) || s_out == 0.0 {
                return Err(Error::Domain("need R1 < R_out and S_out ≠ 0".into()));
            }
        }
        Ok(())
    }
}

/// `u⁻ = |z|^{y} z̄^{−n}`, `u⁺ = amp·|z|^{−y} z^{n−1}` with `y = Φ/2π`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BmMode {
    pub n: i64,
    pub amp: Complex64,
    pub scale: Complex64,
    pub phi: f64,
}

impl BmMode {
    pub fn eval(&self, z: Complex64) -> Spinor {
        let y = self.phi / TAU;
        let r = z.norm();
        let down = r.powf(y) * z.conj().powi(-self.n as i32);
        let up = self.amp * r.powf(-y) * z.powi(self.n as i32 - 1);
        [self.scale * up, self.scale * down]
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.scale *= c;
        self
    }

    pub fn with_flipped_up(mut self) -> Self {
        self.amp = -self.amp;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BmOutcome {
    Mode(BmMode),
    None(String),
}

impl BmOutcome {
    pub fn mode(&self) -> Option<&BmMode> {
        match self {
            BmOutcome::Mode(m) => Some(m),
            BmOutcome::None(_) => None,
        }
    }
}

/// Existence test and explicit mode.
pub fn bm_zero_mode(cfg: &BmConfig) -> Result<BmOutcome> {
    cfg.validate()?;
    let BmRegion::Annulus { r_out, s_out } = cfg.region else {
        return Ok(BmOutcome::None(
            "exterior region: u⁻ ~ r^{Φ/2π−n} and u⁺ ~ r^{n−1−Φ/2π} cannot both decay faster than 1/r".into(),
        ));
    };
    let k = -cfg.s_in / s_out;
    if k <= 0.0 {
        return Ok(BmOutcome::None(format!("−S_in/S_out = {k} is not positive")));
    }
    let e_star = k.ln() / (cfg.r_in / r_out).ln();
    let n_real = (cfg.phi / PI - e_star + 1.0) / 2.0;
    let n = n_real.round();
    if (n_real - n).abs() > EXISTENCE_TOL * n_real.abs().max(1.0) {
        return Ok(BmOutcome::None(format!("no integer degree: n would be {n_real}")));
    }
    let amp = Complex64::i() * cfg.r_in.powf(e_star) / cfg.s_in;
    Ok(BmOutcome::Mode(BmMode { n: n as i64, amp, scale: Complex64::new(1.0, 0.0), phi: cfg.phi }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BmReport {
    pub pde_residual: f64,
    pub pde_residual_coarse: f64,
    pub inner_residual: f64,
    pub outer_residual: f64,
    pub pass: bool,
}

pub const BM_BOUNDARY_POINTS: usize = 512;
pub const BM_BOUNDARY_TOL: f64 = 1e-8;
pub const BM_PDE_TOL: f64 = 1e-6;

fn norm(u: Spinor) -> f64 {
    (u[0].norm_sqr() + u[1].norm_sqr()).sqrt()
}

/// `max |D_a u| / max|u|` on a polar grid with `a` from `h = −(Φ/2π) log|z|`.
fn annulus_residual(mode: &BmMode, r_in: f64, r_out: f64, delta: f64) -> f64 {
    let y = mode.phi / TAU;
    let pts: Vec<Complex64> = (0..64)
        .flat_map(|i| {
            let r = r_in + (r_out - r_in) * (i as f64 + 0.5) / 64.0;
            sample_angles(256).map(move |t| Complex64::from_polar(r, t))
        })
        .filter(|z| z.norm() - r_in > 2.5 * delta && r_out - z.norm() > 2.5 * delta)
        .collect();
    let i = Complex64::i();
    let (res, size) = pts
        .par_iter()
        .map(|&z| {
            let d = |e: Complex64| -> Spinor {
                let (a, b, c, dd) = (mode.eval(z - 2.0 * e), mode.eval(z - e), mode.eval(z + e), mode.eval(z + 2.0 * e));
                [0, 1].map(|s| (a[s] - 8.0 * b[s] + 8.0 * c[s] - dd[s]) / (12.0 * delta))
            };
            let ux = d(Complex64::new(delta, 0.0));
            let uy = d(Complex64::new(0.0, delta));
            // ∂_z h = −y/(2z)
            let dzh = -y / (2.0 * z);
            let a = -2.0 * i * dzh.conj();
            let u = mode.eval(z);
            let r0 = -i * (ux[1] - i * uy[1]) - a.conj() * u[1];
            let r1 = -i * (ux[0] + i * uy[0]) - a * u[0];
            (norm([r0, r1]), norm(u))
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    res / size
}

fn boundary_residual(mode: &BmMode, r: f64, sign_s: f64) -> f64 {
    let mut worst = 0.0f64;
    let mut size = 0.0f64;
    for t in sample_angles(BM_BOUNDARY_POINTS) {
        let u = mode.eval(Complex64::from_polar(r, t));
        worst = worst.max((u[1] + sign_s * Complex64::i() * Complex64::from_polar(1.0, t) * u[0]).norm());
        size = size.max(norm(u));
    }
    worst / size
}

/// PDE residual on the annulus and pointwise boundary relations on both
/// circles.
pub fn bm_verify(cfg: &BmConfig, mode: &BmMode) -> Result<BmReport> {
    cfg.validate()?;
    let BmRegion::Annulus { r_out, s_out } = cfg.region else {
        return Err(Error::Domain("verification needs the bounded annulus".into()));
    };
    let delta = cfg.r_in / 256.0;
    let coarse = annulus_residual(mode, cfg.r_in, r_out, 2.0 * delta);
    let fine = annulus_residual(mode, cfg.r_in, r_out, delta);
    if (coarse - fine).abs() > 10.0 * BM_PDE_TOL {
        return Err(Error::GridTooCoarse { coarse, fine });
    }
    let inner = boundary_residual(mode, cfg.r_in, cfg.s_in);
    let outer = boundary_residual(mode, r_out, -s_out);
    Ok(BmReport {
        pde_residual: fine,
        pde_residual_coarse: coarse,
        inner_residual: inner,
        outer_residual: outer,
        pass: fine < BM_PDE_TOL && inner < BM_BOUNDARY_TOL && outer < BM_BOUNDARY_TOL,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub phi: f64,
    pub has_mode: bool,
    pub n: Option<i64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BmSweep {
    pub rows: Vec<SweepRow>,
    /// Set when the table is empty for a structural reason.
    pub reason: Option<String>,
}

impl BmSweep {
    pub fn crossings(&self) -> usize {
        self.rows.iter().filter(|r| r.has_mode).count()
    }
}

/// Mode existence on `steps` equally spaced fluxes in `[lo, hi]`.
pub fn bm_flux_sweep(cfg: &BmConfig, lo: f64, hi: f64, steps: usize) -> Result<BmSweep> {
    if steps < 2 {
        return Err(Error::Domain("a sweep needs at least two steps".into()));
    }
    cfg.validate()?;
    let rows: Vec<SweepRow> = (0..steps)
        .into_par_iter()
        .map(|k| {
            let phi = lo + (hi - lo) * k as f64 / (steps - 1) as f64;
            let out = bm_zero_mode(&BmConfig { phi, ..*cfg })?;
            Ok(SweepRow { phi, has_mode: out.mode().is_some(), n: out.mode().map(|m| m.n) })
        })
        .collect::<Result<_>>()?;
    let reason = match cfg.region {
        BmRegion::Exterior => Some("no zero modes on the unbounded region".into()),
        BmRegion::Annulus { s_out, .. } if -cfg.s_in / s_out <= 0.0 => Some("−S_in/S_out is not positive".into()),
        _ => None,
    };
    Ok(BmSweep { rows, reason })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn existence_examples() {
        let m = bm_zero_mode(&BmConfig::annulus(1.0, 2.0, PI, 1.0, -1.0)).unwrap();
        assert_eq!(m.mode().unwrap().n, 1);
        assert!(bm_zero_mode(&BmConfig::annulus(1.0, 2.0, TAU, 1.0, -1.0)).unwrap().mode().is_none());
        assert!(bm_zero_mode(&BmConfig::annulus(1.0, 2.0, PI, 1.0, 1.0)).unwrap().mode().is_none());
        let ext = BmConfig { r_in: 1.0, phi: PI, s_in: 1.0, region: BmRegion::Exterior };
        assert!(bm_zero_mode(&ext).unwrap().mode().is_none());
    }

    #[test]
    fn unequal_magnitudes_shift_the_flux() {
        // K = 2 on (1, 2): e* = −1, so Φ/π must be an even integer
        let cfg = BmConfig::annulus(1.0, 2.0, PI, 2.0, -1.0);
        assert!(bm_zero_mode(&cfg).unwrap().mode().is_none());
        let cfg = BmConfig::annulus(1.0, 2.0, TAU, 2.0, -1.0);
        let m = *bm_zero_mode(&cfg).unwrap().mode().unwrap();
        assert!(bm_verify(&cfg, &m).unwrap().pass);
    }

    #[test]
    fn verify_examples() {
        let cfg = BmConfig::annulus(1.0, 2.0, PI, 1.0, -1.0);
        let m = *bm_zero_mode(&cfg).unwrap().mode().unwrap();
        let r = bm_verify(&cfg, &m).unwrap();
        assert!(r.pass, "{r:?}");
        let r = bm_verify(&cfg, &m.with_flipped_up()).unwrap();
        assert!(!r.pass && r.inner_residual > 0.1);
        assert!(bm_verify(&cfg, &m.scaled(7.0)).unwrap().pass);
    }

    #[test]
    fn sweep_examples() {
        let cfg = BmConfig::annulus(1.0, 2.0, 0.0, 1.0, -1.0);
        let s = bm_flux_sweep(&cfg, 0.0, 4.0 * PI, 33).unwrap();
        let hits: Vec<f64> = s.rows.iter().filter(|r| r.has_mode).map(|r| r.phi / PI).collect();
        assert_eq!(hits.len(), 2);
        assert!((hits[0] - 1.0).abs() < 1e-12 && (hits[1] - 3.0).abs() < 1e-12);
        let same = BmConfig::annulus(1.0, 2.0, 0.0, 1.0, 1.0);
        assert_eq!(bm_flux_sweep(&same, 0.0, 4.0 * PI, 33).unwrap().crossings(), 0);
        let ext = BmConfig { r_in: 1.0, phi: 0.0, s_in: 1.0, region: BmRegion::Exterior };
        let s = bm_flux_sweep(&ext, 0.0, 4.0 * PI, 33).unwrap();
        assert_eq!(s.crossings(), 0);
        assert!(s.reason.is_some());
        assert!(bm_flux_sweep(&cfg, 0.0, 1.0, 1).is_err());
    }

    proptest! {
        #[test]
        fn rescaling_invariance(c in 0.1..10.0f64, k in -4i64..4, s in 0.2..3.0f64) {
            let phi = PI * (2 * k + 1) as f64;
            let a = bm_zero_mode(&BmConfig::annulus(1.0, 2.5, phi, s, -s)).unwrap().mode().map(|m| m.n);
            let b = bm_zero_mode(&BmConfig::annulus(c, 2.5 * c, phi, s, -s)).unwrap().mode().map(|m| m.n);
            prop_assert_eq!(a, b);
            prop_assert!(a.is_some());
        }

        #[test]
        fn equal_magnitude_dependence_is_sign_only(s in 0.2..3.0f64, phi in -12.0..12.0f64, sign in prop::bool::ANY) {
            let so = if sign { s } else { -s };
            let base = bm_zero_mode(&BmConfig::annulus(1.0, 2.0, phi, 1.0, if sign { 1.0 } else { -1.0 })).unwrap();
            let other = bm_zero_mode(&BmConfig::annulus(1.0, 2.0, phi, s, so)).unwrap();
            prop_assert_eq!(base.mode().map(|m| m.n), other.mode().map(|m| m.n));
        }
    }
}
