use cvleak_core::keyrate::limits::{multimode_asymptotics, KMax};
use cvleak_core::keyrate::{key_rate_collective, key_rate_individual, mutual_info_ab};
use cvleak_core::optimize::{
    max_tolerable_k, optimize_squeezing, optimize_vm, secure_distance, DistanceOptions, KBound, VmPolicy, STRONG_MODULATION,
    VM_BRACKET, VM_TOLERANCE,
};
use cvleak_core::{
    key_rate, Attack, ChannelModel, Direction, MultimodeLeakageScenario, PremodLeakageScenario, ProtocolChoice, Scenario,
};

fn collective(dir: Direction, beta: f64) -> ProtocolChoice {
    ProtocolChoice::new(dir, Attack::Collective, beta).unwrap()
}

fn individual(dir: Direction) -> ProtocolChoice {
    ProtocolChoice::new(dir, Attack::Individual, 1.0).unwrap()
}

fn mm(v: f64, v_m: f64, k: f64) -> Scenario {
    MultimodeLeakageScenario::symmetric(v, v_m, k).into()
}

#[test]
fn leakage_does_not_change_i_ab() {
    let ch = ChannelModel::new(0.4, 0.02).unwrap();
    let a = mutual_info_ab(&mm(0.5, 7.0, 0.0), &ch).unwrap();
    let b = mutual_info_ab(&mm(0.5, 7.0, 2.0), &ch).unwrap();
    assert_eq!(a, b);
    let premod = mutual_info_ab(&PremodLeakageScenario::new(0.5, 7.0, 1.0).into(), &ch).unwrap();
    assert!((premod - a).abs() < 1e-15);
}

#[test]
fn holevo_bound_dominates_individual_information() {
    for eta in [0.1, 0.4, 0.8] {
        let ch = ChannelModel::pure_loss(eta).unwrap();
        for (v, v_m, k) in [(1.0, 5.0, 0.0), (0.5, 10.0, 0.5), (0.3, 2.0, 1.5)] {
            let sc = mm(v, v_m, k);
            for dir in [Direction::Reverse, Direction::Direct] {
                let chi = key_rate_collective(&sc, &ch, &collective(dir, 1.0)).unwrap().eve_information;
                let i_e = key_rate_individual(&sc, &ch, dir).unwrap().eve_information;
                assert!(chi >= -1e-12);
                assert!(chi >= i_e - 1e-9, "eta={eta} v={v} k={k} {dir:?}: chi={chi} i_e={i_e}");
            }
        }
        for v_s in [0.2, 1.0] {
            let sc: Scenario = PremodLeakageScenario::new(v_s, 4.0, 0.6).into();
            for dir in [Direction::Reverse, Direction::Direct] {
                let chi = key_rate_collective(&sc, &ch, &collective(dir, 1.0)).unwrap().eve_information;
                let i_e = key_rate_individual(&sc, &ch, dir).unwrap().eve_information;
                assert!(chi >= i_e - 1e-9);
            }
        }
    }
}

#[test]
fn report_rate_identity() {
    let ch = ChannelModel::new(0.3, 0.01).unwrap();
    let r = key_rate(&mm(0.5, 4.0, 0.7), &ch, &collective(Direction::Reverse, 0.95)).unwrap();
    assert!((r.rate - (0.95 * r.i_ab - r.eve_information)).abs() < 1e-12);
    let ch = ChannelModel::pure_loss(0.3).unwrap();
    let r = key_rate(&mm(0.5, 4.0, 0.7), &ch, &individual(Direction::Direct)).unwrap();
    assert!((r.rate - (r.i_ab - r.eve_information)).abs() < 1e-12);
    assert!(r.v_a_cond_e.is_some() && r.v_b_cond_e.is_none());
}

#[test]
fn unit_efficiency_rate_grows_with_modulation() {
    let ch = ChannelModel::new(0.5, 0.01).unwrap();
    let p = collective(Direction::Reverse, 1.0);
    let mut last = f64::NEG_INFINITY;
    for i in 0..30 {
        let v_m = 10f64.powf(-2.0 + 5.0 * i as f64 / 29.0);
        let r = key_rate(&mm(1.0, v_m, 0.0), &ch, &p).unwrap().rate;
        assert!(r >= last - 1e-12, "v_m={v_m}");
        last = r;
    }
}

#[test]
fn modulation_optimum_edge_and_interior() {
    let ch = ChannelModel::pure_loss(0.5).unwrap();
    let edge = optimize_vm(&mm(1.0, 1.0, 0.0), &ch, &collective(Direction::Reverse, 1.0), VM_BRACKET).unwrap();
    assert!((edge.argument - VM_BRACKET.1).abs() < 1e-2);
    let ch = ChannelModel::new(0.3, 0.01).unwrap();
    let p = collective(Direction::Reverse, 0.95);
    let r = optimize_vm(&mm(1.0, 1.0, 0.0), &ch, &p, VM_BRACKET).unwrap();
    assert!(r.converged);
    assert!(r.argument > 1.0 && r.argument < 500.0, "{r:?}");
    for dv in [-10.0 * VM_TOLERANCE, 10.0 * VM_TOLERANCE] {
        assert!(r.value >= key_rate(&mm(1.0, r.argument + dv, 0.0), &ch, &p).unwrap().rate);
    }
}

#[test]
fn negative_objective_still_returns_best_point() {
    let ch = ChannelModel::new(0.01, 0.05).unwrap();
    let r = optimize_vm(&mm(1.0, 1.0, 0.0), &ch, &collective(Direction::Reverse, 0.9), VM_BRACKET).unwrap();
    assert!(r.value < 0.0 && r.converged);
}

#[test]
fn squeezing_optimum_examples() {
    let ch = ChannelModel::pure_loss(0.4).unwrap();
    let fixed = VmPolicy::Fixed(STRONG_MODULATION);
    let p = individual(Direction::Reverse);
    let r = optimize_squeezing(&mm(0.5, STRONG_MODULATION, 1.0), &ch, &p, fixed).unwrap();
    assert!((r.argument - 0.5f64.sqrt()).abs() < 1e-3);
    let r = optimize_squeezing(&mm(0.5, STRONG_MODULATION, 30.0), &ch, &p, fixed).unwrap();
    assert!(r.argument > 0.99);
    let ch = ChannelModel::new(0.3, 0.01).unwrap();
    let p = collective(Direction::Reverse, 0.95);
    let sc = mm(0.5, 1.0, 0.6);
    let best = optimize_squeezing(&sc, &ch, &p, VmPolicy::default()).unwrap();
    for v in [0.5, 1.0] {
        let (other, _) = cvleak_core::optimize::rate_with_policy(&sc.with_v_s(v), &ch, &p, VmPolicy::default()).unwrap();
        assert!(best.value >= other - 1e-9);
    }
}

#[test]
fn tolerable_k_examples() {
    let fixed = VmPolicy::Fixed(STRONG_MODULATION);
    let p = individual(Direction::Reverse);
    let ch = ChannelModel::pure_loss(0.5).unwrap();
    let sc = MultimodeLeakageScenario::symmetric(0.5, STRONG_MODULATION, 0.0);
    match max_tolerable_k(&sc, &ch, &p, fixed).unwrap() {
        KBound::Finite(r) => assert!((r.argument - 5f64.sqrt()).abs() < 1e-3),
        KBound::Unbounded => panic!("expected a crossing"),
    }
    let sc = MultimodeLeakageScenario::symmetric(1.0, STRONG_MODULATION, 0.0);
    assert_eq!(max_tolerable_k(&sc, &ch, &p, fixed).unwrap(), KBound::Unbounded);
    assert_eq!(multimode_asymptotics(1.0, 0.5, 3.0).unwrap().k_max, KMax::Unbounded);
}

#[test]
fn insecure_at_contact_gives_zero_distance() {
    let p = collective(Direction::Reverse, 0.5);
    let d = secure_distance(&mm(1.0, 1.0, 2.0), &p, 0.2, 0.2, &DistanceOptions::default()).unwrap();
    assert!(d.insecure_at_contact);
    assert_eq!(d.distance_km, 0.0);
}

#[test]
fn distance_shrinks_with_leakage() {
    let p = collective(Direction::Reverse, 0.97);
    let opts = DistanceOptions::default();
    let d0 = secure_distance(&mm(0.5, 1.0, 0.0), &p, 0.01, 0.2, &opts).unwrap();
    let d1 = secure_distance(&mm(0.5, 1.0, 1.0), &p, 0.01, 0.2, &opts).unwrap();
    assert!(d0.distance_km > d1.distance_km && d1.distance_km > 0.0);
}
