use gapbound::bounds::{g_expectations, theorem1_bound, theorem2_bound, trapezoid_g, TrapezoidVariant, WeightFunction};
use gapbound::eigen::{lowest_two, DEFAULT_DEGENERACY_TOL};
use gapbound::experiment::random::{random_envelope_spec, random_weight, trial_rng};
use gapbound::lattice::{parse_model, write_model};
use gapbound::{density, DensityProfile, HoppingEnvelope, ModelSpec};
use proptest::prelude::*;

fn spec_from(seed: u64, sites: usize, n0: usize) -> ModelSpec {
    let env = HoppingEnvelope::new(1.0, 0.7).unwrap();
    random_envelope_spec(&mut trial_rng(seed, 0), sites, n0, &env, 3, 1.0)
}

fn model() -> impl Strategy<Value = ModelSpec> {
    (any::<u64>(), 2usize..16, 1usize..=3).prop_map(|(seed, l, n0)| spec_from(seed, l, n0))
}

fn profile() -> impl Strategy<Value = DensityProfile> {
    prop::collection::vec(0.0f64..1.0, 2..40)
        .prop_filter("nonzero mass", |w| w.iter().sum::<f64>() > 1e-3)
        .prop_map(|w| DensityProfile::from_weights(&w).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn assembled_matrix_is_exactly_hermitian(spec in model()) {
        let h = spec.assemble();
        prop_assert_eq!(h.dim(), spec.sites() * spec.internal_dim());
        prop_assert_eq!(h.hermiticity_defect(), 0.0);
    }

    #[test]
    fn block_norm_is_symmetric(spec in model()) {
        for x in 1..=spec.sites() {
            for y in 1..=spec.sites() {
                if x != y {
                    prop_assert_eq!(spec.block_norm(x, y), spec.block_norm(y, x));
                }
            }
        }
    }

    #[test]
    fn fitted_envelope_is_tight(spec in model(), mu in 0.1f64..3.0) {
        if let Ok(env) = spec.fit_envelope(mu) {
            prop_assert!(env.admits(&spec));
            let best = spec
                .hoppings()
                .map(|(x, x2, b)| b.spectral_norm() / env.at((x2 - x) as f64))
                .fold(0.0, f64::max);
            prop_assert!((best - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn model_file_round_trips(spec in model()) {
        let text = write_model(&spec);
        let back = parse_model(&text).unwrap();
        prop_assert_eq!(back.assemble(), spec.assemble());
        prop_assert_eq!(write_model(&back), text);
    }

    #[test]
    fn tail_is_monotone_and_obeys_chebyshev(p in profile(), r1 in 0.0f64..20.0, dr in 0.0f64..20.0) {
        let stats = p.position_stats();
        let a = p.tail(stats.mean, r1);
        let b = p.tail(stats.mean, r1 + dr);
        prop_assert!(b <= a + 1e-15);
        prop_assert!((p.tail(stats.mean, 0.0) - 1.0).abs() < 1e-12);
        let r = r1 + dr;
        if r > 0.0 {
            prop_assert!(b <= stats.variance / (r * r) + 1e-12);
        }
    }

    #[test]
    fn trapezoid_is_bounded_and_lipschitz(
        sites in 2usize..80,
        center in 0.0f64..80.0,
        r_inner in 0.0f64..30.0,
        delta_r in 3.01f64..40.0,
    ) {
        for (variant, plateau) in [
            (TrapezoidVariant::Exponential, delta_r / 3.0),
            (TrapezoidVariant::NearestNeighbor, delta_r - 2.0),
        ] {
            let g = trapezoid_g(sites, center, r_inner, delta_r, variant).unwrap();
            prop_assert!(g.values().iter().all(|&v| (0.0..=plateau + 1e-12).contains(&v)));
            prop_assert!(g.values().windows(2).all(|w| (w[0] - w[1]).abs() <= 1.0 + 1e-12));
        }
    }

    #[test]
    fn xi_decreases_with_gap(gap in 1e-4f64..10.0, factor in 1.0f64..50.0, s in 0.05f64..0.95, v0 in 0.1f64..5.0) {
        let env = HoppingEnvelope::new(1.0, 1.0).unwrap();
        let a = theorem1_bound(&env, gap, s, 1.0).unwrap();
        let b = theorem1_bound(&env, gap * factor, s, 1.0).unwrap();
        prop_assert!(b.xi1 <= a.xi1);
        let c = theorem2_bound(v0, gap, s, 1.0).unwrap();
        let d = theorem2_bound(v0, gap * factor, s, 1.0).unwrap();
        prop_assert!(d.xi2 <= c.xi2);
        let e = theorem2_bound(v0 * factor, gap, s, 1.0).unwrap();
        prop_assert!(e.xi2 >= c.xi2);
    }

    #[test]
    fn gap_branch_halves_when_gap_quadruples(gap in 1e-6f64..1e-2, s in 0.05f64..0.95) {
        let env = HoppingEnvelope::new(1.0, 1.0).unwrap();
        let a = theorem1_bound(&env, gap, s, 1.0).unwrap();
        let b = theorem1_bound(&env, 4.0 * gap, s, 1.0).unwrap();
        prop_assert!(a.xi1 > a.range_floor() && b.xi1 > b.range_floor());
        prop_assert!((b.xi1 - a.xi1 / 2.0).abs() <= 1e-12 * a.xi1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn fluctuation_report_is_gauge_covariant(seed in any::<u64>(), c in -20.0f64..20.0, lambda in -4.0f64..4.0) {
        let spec = spec_from(seed, 12, 2);
        let Ok(r) = lowest_two(&spec.assemble(), 1e-10, DEFAULT_DEGENERACY_TOL) else {
            return Ok(());
        };
        let g = random_weight(&mut trial_rng(seed, 1), spec.sites(), 3.0);
        let base = g_expectations(&r.psi0, &spec, &g, r.gap).unwrap();
        let shifted = g_expectations(&r.psi0, &spec, &g.shifted(c), r.gap).unwrap();
        let scaled = g_expectations(&r.psi0, &spec, &g.scaled(lambda), r.gap).unwrap();
        let tol = 1e-9 * base.scale.max(shifted.scale);
        prop_assert!((shifted.var_g - base.var_g).abs() <= tol);
        prop_assert!((shifted.hod_explicit - base.hod_explicit).abs() <= tol);
        prop_assert!((shifted.hod_commutator - base.hod_commutator).abs() <= tol);
        let l2 = lambda * lambda;
        prop_assert!((scaled.var_g - l2 * base.var_g).abs() <= 1e-9 * base.scale * l2.max(1.0));
        prop_assert!((scaled.hod_explicit - l2 * base.hod_explicit).abs() <= 1e-9 * base.scale * l2.max(1.0));
        prop_assert!(base.holds(1e-9) && base.routes_agree(1e-9));
    }

    #[test]
    fn potential_shift_keeps_gap_and_profile(seed in any::<u64>(), c in -10.0f64..10.0) {
        let spec = spec_from(seed, 10, 2);
        let shifted = spec.with_potential_shift(c);
        let (Ok(a), Ok(b)) = (
            lowest_two(&spec.assemble(), 1e-10, DEFAULT_DEGENERACY_TOL),
            lowest_two(&shifted.assemble(), 1e-10, DEFAULT_DEGENERACY_TOL),
        ) else {
            return Ok(());
        };
        let scale = spec.assemble().spectral_scale() + c.abs();
        prop_assert!((a.gap - b.gap).abs() <= 1e-10 * scale);
        prop_assert!((b.e0 - a.e0 - c).abs() <= 1e-10 * scale);
        if a.gap > 1e-4 {
            let pa = density(&a.psi0, &spec).unwrap().position_stats();
            let pb = density(&b.psi0, &shifted).unwrap().position_stats();
            prop_assert!((pa.variance - pb.variance).abs() <= 1e-6 * (1.0 + pa.variance));
        }
    }
}

#[test]
fn position_weight_gives_position_variance() {
    let spec = spec_from(3, 9, 1);
    let r = lowest_two(&spec.assemble(), 1e-10, DEFAULT_DEGENERACY_TOL).unwrap();
    let rep = g_expectations(&r.psi0, &spec, &WeightFunction::position(9), r.gap).unwrap();
    let stats = density(&r.psi0, &spec).unwrap().position_stats();
    assert!((rep.var_g - stats.variance).abs() < 1e-12);
    assert!((rep.mean_g - stats.mean).abs() < 1e-12);
}
