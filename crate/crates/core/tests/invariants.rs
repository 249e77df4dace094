use diamond_min::analysis::{n1, Axis, AxisRange, Observable, SweepSpec};
use diamond_min::min::{bloch_decompose, min_hilbert_schmidt, min_trace, min_xstate};
use diamond_min::presets::{preset, PresetKind, FIG3_DELTAS};
use diamond_min::transfer::thermal_state;
use diamond_min::ModelParams;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ModelParams> {
    (
        -3.0..3.0f64,
        -3.0..3.0f64,
        -3.0..3.0f64,
        -3.0..3.0f64,
        -3.0..3.0f64,
        0.05..5.0f64,
    )
        .prop_map(|(j, j1, delta, d, h, t)| ModelParams::new(j, j1, delta, d, h, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn min_values_are_bounded_and_related(p in params()) {
        let m = min_xstate(&thermal_state(&p).unwrap());
        prop_assert!((0.0..=1.0 + 1e-12).contains(&m.n1), "N1 = {}", m.n1);
        prop_assert!((m.n2 - m.n1 * m.n1 / 2.0).abs() <= 1e-12);
    }

    #[test]
    fn thermal_state_is_a_density_matrix(p in params()) {
        let s = thermal_state(&p).unwrap();
        prop_assert!((s.trace() - 1.0).abs() <= 1e-12);
        prop_assert!(s.min_eigenvalue() >= -1e-12);
    }

    #[test]
    fn general_closed_forms_agree_off_degeneracy(p in params()) {
        let s = thermal_state(&p).unwrap();
        let m = min_xstate(&s);
        let b = bloch_decompose(s.matrix()).unwrap();
        prop_assume!(!m.maximizer_degenerate);
        prop_assert!((min_trace(&b).unwrap() - m.n1).abs() <= 1e-12);
        prop_assert!((min_hilbert_schmidt(&b) - m.n2).abs() <= 1e-12);
    }

    #[test]
    fn sweep_matches_pointwise_evaluation(p in params(), k in 0usize..9) {
        let axis = AxisRange::new(Axis::Delta, -2.0, 2.0, 9);
        let r = diamond_min::analysis::sweep(&SweepSpec::one(axis, p, Observable::N1)).unwrap();
        prop_assert_eq!(r.values[k], n1(&Axis::Delta.with(&p, axis.value(k))).unwrap());
    }
}

#[test]
fn high_temperature_envelope_is_non_increasing() {
    let p = preset("fig3").unwrap();
    let PresetKind::Curves { axis, .. } = p.kind else {
        panic!("fig3 is a curve family");
    };
    for delta in FIG3_DELTAS {
        let fixed = Axis::Delta.with(&p.base, delta);
        let values: Vec<f64> = axis
            .values()
            .iter()
            .map(|&t| n1(&fixed.with_t(t)).unwrap())
            .collect();
        let peak = values
            .iter()
            .enumerate()
            .fold(0, |best, (k, &v)| if v > values[best] { k } else { best });
        for w in values[peak..].windows(2) {
            assert!(w[1] <= w[0] + 1e-15, "delta={delta}: {} -> {}", w[0], w[1]);
        }
    }
}

#[test]
fn zero_field_marginal_is_degenerate() {
    // Global spin flip symmetry at h = 0 makes the first qubit maximally mixed.
    let p = ModelParams::new(1.0, 1.0, 1.0, 0.5, 0.0, 0.3);
    let m = min_xstate(&thermal_state(&p).unwrap());
    assert!(m.maximizer_degenerate);
}
