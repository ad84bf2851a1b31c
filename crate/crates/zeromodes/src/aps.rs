//! Boundary operator spectra and the spectral (APS) boundary condition.
//!
//! On a circle of radius `R` enclosing flux `Φ` (so `y = Φ/2π`), the shifted
//! boundary operator has eigenvectors `(ψ_ℓ, 0)` and `(0, ψ_ℓ)` with
//!
//! ```text
//! hole : λ↑(ℓ) =  (y − ½ − ℓ + q)/R     λ↓(ℓ) = −(y + ½ − ℓ + q)/R
//! outer: λ↑(ℓ) = −(y − ½ − ℓ + q)/R     λ↓(ℓ) =  (y + ½ − ℓ + q)/R
//! ```
//!
//! where `ψ_ℓ(φ) = e^{iℓφ} e^{i∫₀^φ a·ds − iyφ}`. A trace is admissible when
//! it has no component along positive eigenvalues; kernel vectors are kept
//! for spin down under [`KernelChoice::Default`] and for spin up otherwise.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::arith::THRESHOLD_TOL;
use crate::field::KernelChoice;
use crate::geometry::Boundary;
use crate::Spinor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundarySpectrum {
    pub boundary: Boundary,
    pub radius: f64,
    /// Flux enclosed by the circle: the hole flux, or the total for the outer
    /// circle.
    pub flux: f64,
    pub q: f64,
    pub kernel: KernelChoice,
}

impl BoundarySpectrum {
    /// `R·λ` up to the overall orientation sign.
    fn numerator(&self, spin: Spin, l: i64) -> f64 {
        let y = self.flux / TAU;
        let l = l as f64;
        match (self.boundary, spin) {
            (Boundary::Hole(_), Spin::Up) => y - 0.5 - l + self.q,
            (Boundary::Hole(_), Spin::Down) => -(y + 0.5 - l + self.q),
            (Boundary::Outer, Spin::Up) => -(y - 0.5 - l + self.q),
            (Boundary::Outer, Spin::Down) => y + 0.5 - l + self.q,
        }
    }

    fn is_kernel(&self, spin: Spin, l: i64) -> bool {
        let y = self.flux / TAU;
        let scale = 1.0 + y.abs() + self.q.abs() + (l as f64).abs();
        self.numerator(spin, l).abs() <= THRESHOLD_TOL * scale
    }

    pub fn eigenvalue(&self, spin: Spin, l: i64) -> f64 {
        if self.is_kernel(spin, l) {
            0.0
        } else {
            self.numerator(spin, l) / self.radius
        }
    }

    pub fn is_allowed(&self, spin: Spin, l: i64) -> bool {
        if self.is_kernel(spin, l) {
            return match self.kernel {
                KernelChoice::Default => spin == Spin::Down,
                KernelChoice::Alternate => spin == Spin::Up,
            };
        }
        self.numerator(spin, l) < 0.0
    }
}

pub fn eigenvalue(spec: &BoundarySpectrum, spin: Spin, l: i64) -> f64 {
    spec.eigenvalue(spin, l)
}

/// Membership predicate of the admissible index set for one spin.
pub fn allowed_set(spec: &BoundarySpectrum, spin: Spin) -> impl Fn(i64) -> bool + '_ {
    move |l| spec.is_allowed(spin, l)
}

/// Boundary trace in the `ψ_ℓ` basis, both spins, for `|ℓ| ≤ ext`.
/// Coefficients with `|ℓ| ≤ l_max` are the reported band; the rest feed the
/// truncation tail.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceFourier {
    pub l_max: i64,
    pub ext: i64,
    coeffs: [Vec<Complex64>; 2],
}

impl TraceFourier {
    pub fn zeros(l_max: i64, ext: i64) -> Self {
        let ext = ext.max(l_max);
        let n = (2 * ext + 1) as usize;
        Self { l_max, ext, coeffs: [vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n]] }
    }

    pub fn from_terms(l_max: i64, terms: &[(Spin, i64, Complex64)]) -> Self {
        let ext = terms.iter().map(|t| t.1.abs()).max().unwrap_or(0).max(l_max);
        let mut t = Self::zeros(l_max, ext);
        for &(s, l, c) in terms {
            t.set(s, l, c);
        }
        t
    }

    pub fn get(&self, spin: Spin, l: i64) -> Complex64 {
        if l.abs() > self.ext {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[spin.index()][(l + self.ext) as usize]
    }

    pub fn set(&mut self, spin: Spin, l: i64, c: Complex64) {
        self.coeffs[spin.index()][(l + self.ext) as usize] = c;
    }

    fn terms(&self) -> impl Iterator<Item = (Spin, i64, Complex64)> + '_ {
        [Spin::Up, Spin::Down]
            .into_iter()
            .flat_map(move |s| (-self.ext..=self.ext).map(move |l| (s, l, self.get(s, l))))
    }
}

fn weight(lambda: f64) -> f64 {
    if lambda < 0.0 {
        (1.0 + lambda * lambda).sqrt()
    } else {
        1.0 / (1.0 + lambda * lambda).sqrt()
    }
}

/// Squared Ȟ(A)-norm over the reported band `|ℓ| ≤ l_max`.
pub fn check_norm(coeffs: &TraceFourier, spec: &BoundarySpectrum) -> f64 {
    coeffs
        .terms()
        .filter(|t| t.1.abs() <= coeffs.l_max)
        .map(|(s, l, c)| c.norm_sqr() * weight(spec.eigenvalue(s, l)))
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Leakage {
    /// Squared Ȟ-norm of forbidden coefficients with `|ℓ| ≤ l_max`.
    pub in_band: f64,
    /// Squared Ȟ-norm of forbidden coefficients beyond `l_max`.
    pub tail: f64,
    /// Squared Ȟ-norm of the whole trace.
    pub total: f64,
}

impl Leakage {
    /// Ȟ-norm of the forbidden projection.
    pub fn absolute(&self) -> f64 {
        (self.in_band + self.tail).sqrt()
    }

    /// Forbidden share of the trace; scale-free, 0 for a vanishing trace.
    pub fn relative(&self) -> f64 {
        if self.total > 0.0 {
            ((self.in_band + self.tail) / self.total).sqrt()
        } else {
            0.0
        }
    }
}

/// Projection onto the forbidden index sets.
pub fn leakage(coeffs: &TraceFourier, spec: &BoundarySpectrum) -> Leakage {
    let mut out = Leakage { in_band: 0.0, tail: 0.0, total: 0.0 };
    for (s, l, c) in coeffs.terms() {
        let w = c.norm_sqr() * weight(spec.eigenvalue(s, l));
        out.total += w;
        if !spec.is_allowed(s, l) {
            if l.abs() <= coeffs.l_max {
                out.in_band += w;
            } else {
                out.tail += w;
            }
        }
    }
    out
}

/// Expands samples of `u` at `φ_k = 2πk/M` on a circle of radius `radius` in
/// the `ψ_ℓ` basis.
///
/// `dr_h[k]` is the radial derivative of `h` at the samples; the connection
/// phase `∫₀^φ a·ds = yφ + P(φ)` follows from `a·t = −∂_r h` by integrating
/// the Fourier series of `−R∂_r h − y` term by term.
pub fn trace_on_circle(u: &[Spinor], dr_h: &[f64], radius: f64, enclosed_flux: f64, l_max: i64) -> TraceFourier {
    let m = u.len();
    assert_eq!(m, dr_h.len());
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let y = enclosed_flux / TAU;
    let mut g: Vec<Complex64> = dr_h.iter().map(|&d| Complex64::new(-radius * d - y, 0.0)).collect();
    fwd.process(&mut g);
    let half = (m / 2) as i64;
    let mut offset = Complex64::new(0.0, 0.0);
    for (k, gk) in g.iter_mut().enumerate() {
        let freq = if (k as i64) < half { k as i64 } else { k as i64 - m as i64 };
        if freq == 0 || freq == -half {
            *gk = Complex64::new(0.0, 0.0);
        } else {
            *gk /= Complex64::new(0.0, freq as f64) * m as f64;
            offset += *gk;
        }
    }
    inv.process(&mut g);
    let phase: Vec<Complex64> = g.iter().map(|p| Complex64::from_polar(1.0, -(p - offset).re)).collect();

    let ext = half - 1;
    let mut out = TraceFourier::zeros(l_max, ext);
    for spin in [Spin::Up, Spin::Down] {
        let mut w: Vec<Complex64> = u.iter().zip(&phase).map(|(s, p)| s[spin.index()] * p).collect();
        fwd.process(&mut w);
        for l in -ext..=ext {
            let idx = if l >= 0 { l as usize } else { (m as i64 + l) as usize };
            out.set(spin, l, w[idx] / m as f64);
        }
    }
    out
}

/// Sample angles `2πk/M`.
pub fn sample_angles(m: usize) -> impl Iterator<Item = f64> {
    (0..m).map(move |k| TAU * k as f64 / m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn spec(boundary: Boundary, radius: f64, flux: f64) -> BoundarySpectrum {
        BoundarySpectrum { boundary, radius, flux, q: 0.0, kernel: KernelChoice::Default }
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(spec(Boundary::Hole(0), 1.0, 0.0).eigenvalue(Spin::Up, 0), -0.5);
        assert_eq!(spec(Boundary::Hole(0), 2.0, PI).eigenvalue(Spin::Up, 0), 0.0);
        assert_eq!(spec(Boundary::Outer, 1.0, 0.0).eigenvalue(Spin::Up, 0), 0.5);
    }

    #[test]
    fn allowed_examples() {
        let h = spec(Boundary::Hole(0), 1.0, 0.0);
        assert!((0..50).all(|l| h.is_allowed(Spin::Up, l)) && (-50..0).all(|l| !h.is_allowed(Spin::Up, l)));
        let h = spec(Boundary::Hole(0), 1.0, PI);
        assert!((-50..=1).all(|l| h.is_allowed(Spin::Down, l)) && !h.is_allowed(Spin::Down, 2));
        assert_eq!(h.eigenvalue(Spin::Down, 1), 0.0);
        let alt = BoundarySpectrum { kernel: KernelChoice::Alternate, ..h };
        assert!(!alt.is_allowed(Spin::Down, 1) && alt.is_allowed(Spin::Up, 0));
        let o = spec(Boundary::Outer, 1.0, 4.0 * PI);
        assert!(o.is_allowed(Spin::Up, 1) && !o.is_allowed(Spin::Up, 2));
    }

    #[test]
    fn norm_examples() {
        let h = spec(Boundary::Hole(0), 1.0, 0.0);
        assert_eq!(check_norm(&TraceFourier::zeros(8, 8), &h), 0.0);
        let t = TraceFourier::from_terms(8, &[(Spin::Up, 0, Complex64::new(1.0, 0.0))]);
        assert!((check_norm(&t, &h) - 1.25f64.sqrt()).abs() < 1e-15);
        let h4 = spec(Boundary::Hole(0), 0.25, 0.0);
        let t = TraceFourier::from_terms(8, &[(Spin::Up, -1, Complex64::new(1.0, 0.0))]);
        assert_eq!(h4.eigenvalue(Spin::Up, -1), 2.0);
        assert!((check_norm(&t, &h4) - 5f64.powf(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn leakage_examples() {
        let h = spec(Boundary::Hole(0), 1.0, 0.0);
        let ok = TraceFourier::from_terms(8, &[(Spin::Up, 3, Complex64::new(1.0, 0.0))]);
        assert_eq!(leakage(&ok, &h).absolute(), 0.0);
        let bad = TraceFourier::from_terms(8, &[(Spin::Up, -1, Complex64::new(1.0, 0.0))]);
        assert!((leakage(&bad, &h).absolute().powi(2) - check_norm(&bad, &h)).abs() < 1e-15);
        assert!(leakage(&bad, &h).absolute() > 0.0);
    }

    #[test]
    fn psi_orthogonality_in_delta_gauge() {
        let m = 2048;
        for (l, k) in [(0i64, 0i64), (3, 3), (2, -5), (7, 1)] {
            let s: Complex64 = sample_angles(m)
                .map(|t| Complex64::from_polar(1.0, (l - k) as f64 * t))
                .sum::<Complex64>()
                * (TAU / m as f64);
            let expect = if l == k { TAU } else { 0.0 };
            assert!((s - expect).norm() < 1e-10);
        }
    }

    #[test]
    fn trace_of_pure_delta_field_is_laurent_series() {
        // u⁺ = z² + 0.5 z⁻¹ on |z| = 2 with a point flux at 0: dr_h = −y/r
        let m = 2048;
        let y = 0.3;
        let r = 2.0;
        let u: Vec<Spinor> = sample_angles(m)
            .map(|t| {
                let z = Complex64::from_polar(r, t);
                [z * z + 0.5 / z, Complex64::new(0.0, 0.0)]
            })
            .collect();
        let dr = vec![-y / r; m];
        let t = trace_on_circle(&u, &dr, r, TAU * y, 16);
        assert!((t.get(Spin::Up, 2) - 4.0).norm() < 1e-12);
        assert!((t.get(Spin::Up, -1) - 0.25).norm() < 1e-12);
        assert!(t.get(Spin::Up, 0).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn spins_partition_and_pair(flux in -20.0..20.0f64, q in -1.5..1.5f64, l in -40i64..40, r in 0.1..5.0f64) {
            let h = BoundarySpectrum { boundary: Boundary::Hole(0), radius: r, flux, q, kernel: KernelChoice::Default };
            prop_assert!((h.eigenvalue(Spin::Up, l) + h.eigenvalue(Spin::Down, l + 1)).abs() < 1e-12);
            // gauge shift by 2π relabels ℓ ↦ ℓ + 1
            let g = BoundarySpectrum { flux: flux + TAU, ..h };
            for s in [Spin::Up, Spin::Down] {
                prop_assert_eq!(h.is_allowed(s, l), g.is_allowed(s, l + 1));
            }
        }

        #[test]
        fn kernel_choice_only_moves_kernel_vectors(k in -12i64..12, l in -20i64..20, outer in any::<bool>()) {
            // flux on the half-integer threshold grid
            let flux = PI * k as f64;
            let b = if outer { Boundary::Outer } else { Boundary::Hole(0) };
            let d = BoundarySpectrum { boundary: b, radius: 1.0, flux, q: 0.0, kernel: KernelChoice::Default };
            let a = BoundarySpectrum { kernel: KernelChoice::Alternate, ..d };
            for s in [Spin::Up, Spin::Down] {
                if d.eigenvalue(s, l) != 0.0 {
                    prop_assert_eq!(d.is_allowed(s, l), a.is_allowed(s, l));
                } else {
                    prop_assert_ne!(d.is_allowed(s, l), a.is_allowed(s, l));
                }
            }
        }
    }
}
