use cvleak_core::gaussian::{GaussianState, Quadrature, SymplecticForm};
use cvleak_core::keyrate::key_rate_individual;
use cvleak_core::linalg::Matrix;
use cvleak_core::optimize::{optimize_squeezing, VmPolicy, V_S_MIN};
use cvleak_core::scenario::{build_pm_premod, LeakageInputs, BOB, SIDE};
use cvleak_core::{
    key_rate, Attack, ChannelModel, Direction, MultimodeLeakageScenario, PremodLeakageScenario, ProtocolChoice, Scenario,
};
use proptest::prelude::*;

#[derive(Clone, Debug)]
enum Op {
    Squeeze(usize, f64),
    Split(usize, usize, f64),
}

fn ops(n: usize) -> impl Strategy<Value = Vec<Op>> {
    let op = prop_oneof![
        (0..n, -1.2..1.2f64).prop_map(|(a, r)| Op::Squeeze(a, r)),
        (0..n, 1..n.max(2), 0.0..=1.0f64).prop_map(move |(a, d, t)| Op::Split(a, (a + d) % n, t)),
    ];
    prop::collection::vec(op, 0..8)
}

fn state() -> impl Strategy<Value = (GaussianState, Vec<Op>)> {
    (1usize..=4)
        .prop_flat_map(|n| (prop::collection::vec(1.0..15.0f64, n), ops(n), ops(n)))
        .prop_map(|(vs, prep, later)| {
            let mut st = GaussianState::empty();
            for (i, v) in vs.iter().enumerate() {
                st = st.attach_thermal(format!("q{i}"), *v).unwrap();
            }
            (apply(st, &prep), later)
        })
}

fn apply(mut st: GaussianState, ops: &[Op]) -> GaussianState {
    let labels = st.labels().to_vec();
    for op in ops {
        st = match *op {
            Op::Squeeze(a, r) => st.apply_squeezer(labels[a].clone(), r).unwrap(),
            Op::Split(a, b, t) if a != b => st.apply_beamsplitter(labels[a].clone(), labels[b].clone(), t).unwrap(),
            Op::Split(..) => st,
        };
    }
    st
}

fn pure_state() -> impl Strategy<Value = GaussianState> {
    (2usize..=4).prop_flat_map(|n| ops(n).prop_map(move |o| {
        let mut st = GaussianState::empty();
        for i in 0..n {
            st = st.attach_vacuum(format!("q{i}")).unwrap();
        }
        apply(st, &o)
    }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn spectrum_is_invariant((st, later) in state()) {
        let a = st.symplectic_eigenvalues();
        let b = apply(st, &later).symplectic_eigenvalues();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-8 * x.max(1.0));
        }
    }

    #[test]
    fn states_respect_uncertainty((st, _) in state()) {
        prop_assert!(st.check_physical().is_ok());
        prop_assert!(st.symplectic_eigenvalues().iter().all(|v| *v >= 1.0 - 1e-9));
        let omega = SymplecticForm::new(1).matrix();
        prop_assert_eq!(omega.transpose().max_abs_diff(&omega.scaled(-1.0)), 0.0);
    }

    #[test]
    fn entropy_is_nonnegative((st, _) in state()) {
        prop_assert!(st.von_neumann_entropy().unwrap() >= 0.0);
    }

    #[test]
    fn homodyne_keeps_pure_states_pure(st in pure_state(), x in any::<bool>()) {
        let q = if x { Quadrature::X } else { Quadrature::P };
        let c = st.homodyne_condition(st.labels()[0].clone(), q).unwrap();
        prop_assert!(c.purity_defect() < 1e-8);
        let h = st.heterodyne_condition(st.labels()[1].clone()).unwrap();
        prop_assert!(h.purity_defect() < 1e-8);
    }

    #[test]
    fn conditioning_never_increases_variance((st, _) in state()) {
        prop_assume!(st.n_modes() > 1);
        let target = st.labels()[1].clone();
        let before = st.variance(target.clone(), Quadrature::X).unwrap();
        let c = st.homodyne_condition(st.labels()[0].clone(), Quadrature::X).unwrap();
        prop_assert!(c.variance(target, Quadrature::X).unwrap() <= before * (1.0 + 1e-12));
        prop_assert!(c.check_physical().is_ok());
    }

    #[test]
    fn split_leakage_matches_single_mode(
        v_s in 0.05..1.0f64,
        v_m in 0.1..50.0f64,
        k in 0.0..3.0f64,
        n in 2usize..5,
        eta in 0.05..0.95f64,
    ) {
        let ch = ChannelModel::pure_loss(eta).unwrap();
        let single = MultimodeLeakageScenario::symmetric(v_s, v_m, k);
        let split = MultimodeLeakageScenario {
            k: k / (n as f64).sqrt(),
            leakage: LeakageInputs::MatchSignal { n_modes: n },
            ..single.clone()
        };
        for dir in [Direction::Reverse, Direction::Direct] {
            let a = key_rate_individual(&single.clone().into(), &ch, dir).unwrap();
            let b = key_rate_individual(&split.clone().into(), &ch, dir).unwrap();
            prop_assert!((a.rate - b.rate).abs() < 1e-9);
            prop_assert_eq!(a.v_b_cond_e.is_some(), b.v_b_cond_e.is_some());
            if let (Some(x), Some(y)) = (a.v_b_cond_e, b.v_b_cond_e) {
                prop_assert!((x - y).abs() < 1e-9 * x.max(1.0));
            }
            if let (Some(x), Some(y)) = (a.v_a_cond_e, b.v_a_cond_e) {
                prop_assert!((x - y).abs() < 1e-9 * x.max(1.0));
            }
        }
    }

    #[test]
    fn side_channel_correlation_vanishes_monotonically(v_s in 0.05..0.95f64, dv in 0.001..0.05f64, ee in 0.5..0.95f64, de in 0.001..0.05f64) {
        let corr = |v_s: f64, ee: f64| {
            let sc = PremodLeakageScenario::new(v_s, 3.0, ee);
            let st = build_pm_premod(&sc, &ChannelModel::pure_loss(1.0).unwrap()).unwrap();
            st.covariance_between(BOB, Quadrature::X, SIDE, Quadrature::X).unwrap().abs()
        };
        prop_assert!(corr((v_s + dv).min(1.0), ee) <= corr(v_s, ee) + 1e-12);
        prop_assert!(corr(v_s, (ee + de).min(1.0)) <= corr(v_s, ee) + 1e-12);
        prop_assert!((corr(v_s, ee) - corr(v_s, 1.0 - ee)).abs() < 1e-12);
        prop_assert_eq!(corr(1.0, ee), 0.0);
        prop_assert_eq!(corr(v_s, 1.0), 0.0);
    }

    #[test]
    fn premod_squeezing_beats_coherent(v_s in 0.05..1.0f64, v_m in 1.0..30.0f64, ee in 0.1..1.0f64, eta in 0.05..0.95f64) {
        let ch = ChannelModel::pure_loss(eta).unwrap();
        let p = ProtocolChoice::new(Direction::Reverse, Attack::Individual, 1.0).unwrap();
        let sq = key_rate(&PremodLeakageScenario::new(v_s, v_m, ee).into(), &ch, &p).unwrap().rate;
        let coh = key_rate(&PremodLeakageScenario::new(1.0, v_m, ee).into(), &ch, &p).unwrap().rate;
        prop_assert!(sq >= coh - 1e-12);
    }
}

#[test]
fn nested_optimum_dominates_grid() {
    let ch = ChannelModel::new(0.3, 0.01).unwrap();
    let p = ProtocolChoice::new(Direction::Reverse, Attack::Collective, 0.95).unwrap();
    let sc: Scenario = MultimodeLeakageScenario::symmetric(0.5, 1.0, 0.5).into();
    let best = optimize_squeezing(&sc, &ch, &p, VmPolicy::default()).unwrap();
    for i in 0..20 {
        let v_s = V_S_MIN + (1.0 - V_S_MIN) * i as f64 / 19.0;
        for j in 0..20 {
            let v_m = 10f64.powf(-3.0 + 6.0 * j as f64 / 19.0);
            let r = key_rate(&sc.with_v_s(v_s).with_v_m(v_m), &ch, &p).unwrap().rate;
            assert!(best.value >= r - 1e-6, "grid ({v_s}, {v_m}) gives {r} > {}", best.value);
        }
    }
}

#[test]
fn optimizers_are_deterministic() {
    let ch = ChannelModel::new(0.3, 0.01).unwrap();
    let p = ProtocolChoice::new(Direction::Reverse, Attack::Collective, 0.95).unwrap();
    let sc: Scenario = MultimodeLeakageScenario::symmetric(0.4, 1.0, 0.7).into();
    let a = optimize_squeezing(&sc, &ch, &p, VmPolicy::default()).unwrap();
    let b = optimize_squeezing(&sc, &ch, &p, VmPolicy::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn symplectic_form_is_preserved_by_elements() {
    let form = SymplecticForm::new(2);
    let (c, s) = (0.3f64.sqrt(), 0.7f64.sqrt());
    let bs = Matrix::from_rows(&[[c, 0.0, s, 0.0], [0.0, c, 0.0, s], [-s, 0.0, c, 0.0], [0.0, -s, 0.0, c]]);
    assert!(form.preserved_by(&bs, 1e-12));
    let sq = Matrix::diag(&[0.5, 2.0, 1.0, 1.0]);
    assert!(form.preserved_by(&sq, 1e-12));
    assert!(!form.preserved_by(&Matrix::diag(&[0.5, 0.5, 1.0, 1.0]), 1e-12));
}
