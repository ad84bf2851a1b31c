//! Threshold arithmetic shared by the counting formulas.
//!
//! The counting floor is strict: `FLOOR_STRICT(y)` is the greatest integer
//! strictly below `y`, so `FLOOR_STRICT(2) = 1`. Inputs that sit within
//! [`THRESHOLD_TOL`] of an integer are treated as that integer.

pub const THRESHOLD_TOL: f64 = 1e-12;

/// The integer `x` rounds to, if it is within tolerance of one.
pub fn near_integer(x: f64) -> Option<i64> {
    let k = x.round();
    if (x - k).abs() <= THRESHOLD_TOL * x.abs().max(1.0) {
        Some(k as i64)
    } else {
        None
    }
}

/// Greatest integer strictly less than `y`.
pub fn floor_strict(y: f64) -> i64 {
    match near_integer(y) {
        Some(k) => k - 1,
        None => y.floor() as i64,
    }
}

/// Floor with snapping: `floor(y)` that returns `k` for `y ≈ k`.
pub fn floor_snap(y: f64) -> i64 {
    near_integer(y).unwrap_or_else(|| y.floor() as i64)
}

/// Ceiling with snapping.
pub fn ceil_snap(y: f64) -> i64 {
    near_integer(y).unwrap_or_else(|| y.ceil() as i64)
}

/// `⟨c⟩ ∈ (0, 1)` with `c − ⟨c⟩ ∈ ℤ`; `None` for integer `c`.
pub fn frac(c: f64) -> Option<f64> {
    if near_integer(c).is_some() {
        return None;
    }
    Some(c - c.floor())
}

/// `y = Φ/2π`.
pub fn turns(phi: f64) -> f64 {
    phi / std::f64::consts::TAU
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_floor_at_integers() {
        assert_eq!(floor_strict(2.0), 1);
        assert_eq!(floor_strict(2.5), 2);
        assert_eq!(floor_strict(0.0), -1);
        assert_eq!(floor_strict(-0.5), -1);
        assert_eq!(floor_strict(-1.0), -2);
        // drift from 5π/2π style arithmetic
        assert_eq!(floor_strict(turns(4.0 * std::f64::consts::PI)), 1);
    }

    #[test]
    fn frac_representative() {
        assert_eq!(frac(-0.25), Some(0.75));
        assert_eq!(frac(3.0), None);
        assert!((frac(2.125).unwrap() - 0.125).abs() < 1e-15);
    }
}
