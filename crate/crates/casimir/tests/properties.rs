//! Randomized invariant checks: permittivity shape, mixing bounds,
//! reflection passivity, and the sign and bounds of the force.

use proptest::prelude::*;

use casimir::materials::{mix_clausius_mossotti, mix_looyenga};
use casimir::optics::{stack_reflection, SpectralPoint};
use casimir::{
    casimir_pressure, DielectricModel, DrudeParams, GapConfig, Layer, LorentzOscillator,
    MixingRule, MixingSpec, QuadratureSpec, Stack,
};

fn arb_drude() -> impl Strategy<Value = DielectricModel> {
    (3.0..12.0f64, 0.01..0.3f64).prop_map(|(plasma_energy_ev, damping_energy_ev)| {
        DielectricModel::Drude(DrudeParams {
            plasma_energy_ev,
            damping_energy_ev,
        })
    })
}

fn arb_lorentz() -> impl Strategy<Value = DielectricModel> {
    prop::collection::vec(
        (0.01..400.0f64, 0.05..25.0f64, 0.0..1.0f64).prop_map(
            |(strength_ev2, resonance_ev, width_ev)| LorentzOscillator {
                strength_ev2,
                resonance_ev,
                width_ev,
            },
        ),
        1..=3,
    )
    .prop_map(DielectricModel::LorentzSum)
}

fn arb_rule() -> impl Strategy<Value = MixingRule> {
    prop_oneof![
        Just(MixingRule::ClausiusMossotti),
        Just(MixingRule::Looyenga)
    ]
}

fn arb_mixture() -> impl Strategy<Value = DielectricModel> {
    (arb_lorentz(), 0.0..1.0f64, arb_rule()).prop_map(|(host, porosity, rule)| {
        DielectricModel::Mixed(MixingSpec {
            porosity,
            rule,
            host: Box::new(host),
        })
    })
}

fn arb_material() -> impl Strategy<Value = DielectricModel> {
    prop_oneof![arb_drude(), arb_lorentz(), arb_mixture()]
}

fn arb_stack() -> impl Strategy<Value = Stack> {
    let layer = (arb_material(), 1.0..2000.0f64).prop_map(|(material, thickness_nm)| Layer {
        material,
        thickness_nm,
    });
    (
        prop::collection::vec(layer, 0..=2),
        prop_oneof![arb_drude(), arb_lorentz(), Just(DielectricModel::Vacuum)],
    )
        .prop_map(|(layers, substrate)| Stack { layers, substrate })
}

proptest! {
    // Any passive model: real permittivity, at least 1, monotone
    // nonincreasing along the imaginary axis.
    #[test]
    fn permittivity_decreases_from_at_least_unity(
        model in arb_material(),
        lo in 1e-3..50.0f64,
        factor in 1.001..100.0f64,
    ) {
        let hi = lo * factor;
        let eps_lo = model.eval(lo).unwrap();
        let eps_hi = model.eval(hi).unwrap();
        prop_assert!(eps_lo.is_finite() && eps_hi.is_finite());
        prop_assert!(eps_hi >= 1.0);
        prop_assert!(eps_lo + 1e-12 >= eps_hi, "eps({lo}) = {eps_lo} < eps({hi}) = {eps_hi}");
    }

    // Both mixing rules interpolate between air and the host and respond
    // monotonically to porosity.
    #[test]
    fn mixing_stays_between_air_and_host(
        host in 1.0..20.0f64,
        phi_a in 0.0..1.0f64,
        phi_b in 0.0..1.0f64,
    ) {
        let (phi_lo, phi_hi) = if phi_a <= phi_b { (phi_a, phi_b) } else { (phi_b, phi_a) };
        for mix in [mix_clausius_mossotti, mix_looyenga] {
            let at_lo = mix(host, phi_lo).unwrap();
            let at_hi = mix(host, phi_hi).unwrap();
            prop_assert!((1.0..=host).contains(&at_lo));
            prop_assert!((1.0..=host).contains(&at_hi));
            prop_assert!(at_lo + 1e-12 >= at_hi, "more air must not raise eps");
        }
    }

    // No stack of passive materials amplifies a reflection.
    #[test]
    fn reflections_are_passive(
        stack in arb_stack(),
        xi in 1e-3..50.0f64,
        q_parallel in 0.0..0.5f64,
    ) {
        let point = SpectralPoint::new(xi, q_parallel);
        let r = stack_reflection(&stack, &point).unwrap();
        prop_assert!(r.r_s.abs() <= 1.0, "r_s = {}", r.r_s);
        prop_assert!(r.r_p.abs() <= 1.0, "r_p = {}", r.r_p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // The force between any two material-backed stacks is attractive and
    // weaker than between ideal mirrors.
    #[test]
    fn force_is_attractive_and_below_ideal(
        left in arb_stack(),
        right in arb_stack(),
        gap_nm in 50.0..1500.0f64,
    ) {
        // A vacuum substrate with no layers reflects nothing; keep at least
        // one real interface per side so the force cannot vanish.
        prop_assume!(!(left.layers.is_empty() && left.substrate == DielectricModel::Vacuum));
        prop_assume!(!(right.layers.is_empty() && right.substrate == DielectricModel::Vacuum));
        let config = GapConfig { left, right, gap_nm };
        // Sign and bounds are under test here, not tight convergence.
        let quad = QuadratureSpec {
            target_rel_tol: 1e-3,
            ..QuadratureSpec::default()
        };
        let result = casimir_pressure(&config, &quad).unwrap();
        prop_assert!(result.pressure_pa < 0.0, "pressure {}", result.pressure_pa);
        prop_assert!(
            result.reduction_factor > 0.0 && result.reduction_factor < 1.0,
            "reduction factor {}",
            result.reduction_factor
        );
    }
}
