//! Cross-module properties: staircases, index against count, sphere
//! designation and candidate rejection.

mod common;

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use zeromodes::eta::index_vs_count;
use zeromodes::field::{FieldSpec, KernelChoice};
use zeromodes::geometry::DomainSpec;
use zeromodes::modes::{count_zero_modes, next_candidate, verify_mode, Chirality, GridSpec, ModeCount};
use zeromodes::potential::PotentialField;

fn signed(m: ModeCount) -> i64 {
    match m.chirality {
        Chirality::Up => m.count as i64,
        Chirality::Down => -(m.count as i64),
        Chirality::None => 0,
    }
}

#[test]
fn disc_staircase_jumps_only_at_crossings() {
    let disc = DomainSpec::disc(3.0, vec![]);
    for q in [-1.0, 0.0, 0.5, 1.0] {
        let counts: Vec<i64> = (-48..=48)
            .map(|k| {
                let f = FieldSpec::new(vec![centred_bump(k as f64 * PI / 8.0, 1.0)], vec![]).with_q(q);
                signed(count_zero_modes(&disc, &f).unwrap())
            })
            .collect();
        for (i, w) in counts.windows(2).enumerate() {
            // t = Φ/2π + q + ½ in sixteenths; the strict floor steps just after
            // each integer, so a jump needs an integer in [t_i, t_{i+1})
            let t16 = (i as i64 - 48) + (16.0 * q) as i64 + 8;
            let crossing = t16.rem_euclid(16) == 0;
            assert_eq!(w[1] - w[0], crossing as i64, "q={q}, step {i}");
        }
    }
}

#[test]
fn plane_staircase_jumps_at_integer_turns() {
    let plane = DomainSpec::plane(vec![]);
    let counts: Vec<u64> = (-48..=48)
        .map(|k| count_zero_modes(&plane, &FieldSpec::new(vec![centred_bump(k as f64 * PI / 8.0, 1.0)], vec![])).unwrap().count)
        .collect();
    for (i, w) in counts.windows(2).enumerate() {
        let k = i as i64 - 48;
        let jump = w[1] as i64 - w[0] as i64;
        let expected = if k >= 16 && k % 16 == 0 {
            1
        } else if k < -16 && (k + 1).rem_euclid(16) == 0 {
            -1
        } else {
            0
        };
        assert_eq!(jump, expected, "k={k}");
    }
}

#[test]
fn candidates_on_spheres_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut grid = GridSpec::new(128);
    grid.radial = 24;
    grid.angular = 96;
    grid.bulk_cap = 64;
    for _ in 0..4 {
        let cfg = random_sphere_config(&mut rng);
        let p = PotentialField::new(&cfg.domain, &cfg.field).unwrap();
        let cand = next_candidate(&cfg.domain, &cfg.field, &p).unwrap();
        let r = verify_mode(&cand, &cfg.domain, &cfg.field, &p, &grid).unwrap();
        assert!(r.max_leakage() > 1e-2, "{r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn index_equals_signed_count(seed in any::<u64>(), alt in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cfg = random_flat_config(&mut rng, false);
        if alt {
            cfg.field.kernel = KernelChoice::Alternate;
        }
        let r = index_vs_count(&cfg.domain, &cfg.field).unwrap();
        prop_assert!(r.consistent, "{r:?}");
    }

    #[test]
    fn sphere_count_matches_semi_total(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = random_sphere_config(&mut rng);
        let m = count_zero_modes(&cfg.domain, &cfg.field).unwrap();
        let hat = semi_total_oracle(&cfg.field, cfg.domain.holes.len());
        prop_assert_eq!(m.count, strict_floor_oracle(hat / TAU + 0.5).unsigned_abs());
        let r = index_vs_count(&cfg.domain, &cfg.field).unwrap();
        prop_assert!(r.consistent);
    }

    #[test]
    fn count_ignores_hole_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = random_flat_config(&mut rng, seed % 2 == 0);
        let mut d = cfg.domain.clone();
        let mut f = cfg.field.clone();
        d.holes.reverse();
        f.hole_fluxes.reverse();
        prop_assert_eq!(count_zero_modes(&cfg.domain, &cfg.field).unwrap(), count_zero_modes(&d, &f).unwrap());
    }
}
