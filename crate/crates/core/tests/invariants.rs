use mismatch_qpt::circuit::{build_cnot, Basis, InputLabel, QubitPrep, TauParams, TAU_COUNT};
use mismatch_qpt::fock::{ModeId, PathTerm, Photon, TwoPhotonState};
use mismatch_qpt::tomography::CompiledGate;
use mismatch_qpt::wavepacket::Displacement;
use proptest::prelude::*;

fn with(tau: &TauParams, index: usize, value: f64) -> TauParams {
    let mut v = *tau.values();
    v[index - 1] = value;
    TauParams::new(v).unwrap()
}

fn tau_strategy() -> impl Strategy<Value = TauParams> {
    prop::array::uniform5(-3.0f64..3.0).prop_map(|v| TauParams::new(v).unwrap())
}

/// Largest change of any joint probability of `rows` in `bases` as τ_index sweeps a grid.
fn sweep_deviation(base: &TauParams, index: usize, rows: &[usize], bases: &[Basis]) -> f64 {
    let gate = CompiledGate::cnot();
    let mut worst = 0.0f64;
    for &r in rows {
        for &b in bases {
            let reference = gate.joint(r, b, base);
            for k in -6..=6 {
                let probe = gate.joint(r, b, &with(base, index, 0.5 * k as f64));
                for (x, y) in probe.iter().zip(&reference) {
                    worst = worst.max((x - y).abs());
                }
            }
        }
    }
    worst
}

#[test]
fn tau1_and_tau5_invisible_in_computational_basis() {
    let base = TauParams::reference();
    for index in [1, 5] {
        assert!(sweep_deviation(&base, index, &[0, 1, 2, 3], &[Basis::Z]) < 1e-10);
        // but both are visible once superpositions are measured
        assert!(sweep_deviation(&base, index, &[4, 5, 6, 7], &[Basis::X]) > 1e-3);
    }
}

#[test]
fn tau2_invisible_without_control_photon_in_c1() {
    let cnot = build_cnot();
    let base = TauParams::reference();
    for target in QubitPrep::ALL {
        let label = InputLabel::new(QubitPrep::Zero, target);
        for (cb, tb) in [(Basis::Z, Basis::Z), (Basis::X, Basis::X), (Basis::Z, Basis::X), (Basis::X, Basis::Z)] {
            let reference = cnot.predict(&base, label, cb, tb).unwrap().joint;
            for value in [-3.0, -1.0, 0.0, 0.7, 2.5] {
                let probe = cnot.predict(&with(&base, 2, value), label, cb, tb).unwrap().joint;
                for (x, y) in probe.iter().zip(&reference) {
                    assert!((x - y).abs() < 1e-10);
                }
            }
        }
    }
    // the same sweep with control |1⟩ is not flat
    assert!(sweep_deviation(&base, 2, &[3], &[Basis::Z]) > 1e-3);
}

fn shifted_predictions(tau: &TauParams, shift: f64) -> Vec<f64> {
    let cnot = build_cnot();
    let rails = cnot.dual_rail().unwrap();
    let mut out = Vec::new();
    for label in InputLabel::MATRIX_ROWS {
        let mut state: TwoPhotonState = rails.prepare_input(cnot.mode_count(), label).unwrap();
        for m in 0..cnot.mode_count() {
            state = state.apply_taubox(ModeId(m), &Displacement::scalar(shift)).unwrap();
        }
        let evolved = cnot.run(&state, tau).unwrap();
        for basis in [Basis::Z, Basis::X] {
            let mut measured = evolved.clone();
            for e in rails.measurement_elements(basis, basis) {
                measured = e.apply(&measured, &|_| Displacement::default()).unwrap();
            }
            for c in rails.control {
                for t in rails.target {
                    out.push(measured.outcome_probability(c, t).unwrap());
                }
            }
        }
    }
    out
}

#[test]
fn vector_displacements_depend_only_on_projection() {
    let cnot = build_cnot();
    let rails = cnot.dual_rail().unwrap();
    let tau = TauParams::reference();
    let dir = [0.6, -0.8];
    let along: [Displacement; TAU_COUNT] =
        std::array::from_fn(|i| Displacement::new(dir.map(|d| d * tau.values()[i])).unwrap());
    for label in InputLabel::MATRIX_ROWS {
        let state: TwoPhotonState<Displacement> = rails.prepare_input(cnot.mode_count(), label).unwrap();
        let state2: TwoPhotonState<Displacement> = TwoPhotonState::from_terms(
            cnot.mode_count(),
            state.terms().iter().map(|t| {
                let [p, q] = t.photons();
                PathTerm::new(
                    t.amplitude,
                    Photon::new(p.mode, Displacement::zero(2)),
                    Photon::new(q.mode, Displacement::zero(2)),
                )
            }),
        )
        .unwrap();
        let scalar = cnot.post_select(&cnot.run(&state, &tau).unwrap()).unwrap();
        let vector = cnot.post_select(&cnot.run_with_displacements(&state2, &along).unwrap()).unwrap();
        assert!((scalar.norm().unwrap() - vector.norm().unwrap()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn global_input_displacement_is_invisible(tau in tau_strategy(), shift in -4.0f64..4.0) {
        let a = shifted_predictions(&tau, 0.0);
        let b = shifted_predictions(&tau, shift);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn model_rows_are_normalised(tau in tau_strategy()) {
        let m = mismatch_qpt::tomography::model_matrix(&tau).unwrap();
        m.check_normalization(1e-12).unwrap();
    }

    #[test]
    fn sign_flip_of_all_tau_is_a_symmetry(tau in tau_strategy()) {
        let a = mismatch_qpt::tomography::model_matrix(&tau).unwrap();
        let b = mismatch_qpt::tomography::model_matrix(&tau.scaled(-1.0)).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                prop_assert!((a.get(r, c) - b.get(r, c)).abs() < 1e-12);
            }
        }
    }
}
