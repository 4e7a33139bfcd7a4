//! Mutual information, Eve's information and key rates.
//!
//! Collective-attack rates evaluate the Holevo quantity on Eve's modes of the
//! ensemble-averaged prepare-and-measure state. The entanglement-based models
//! of [`crate::purification`] give the same numbers and are available through
//! [`holevo_bound`] and [`key_rate_collective_purified`].

use alloc::vec::Vec;

use crate::error::{ensure, Error};
use crate::gaussian::{entropy_g, GaussianState, ModeId, Quadrature};
use crate::math;
use crate::purification::{build_eb_premod, purify_multimode, PurifiedModel, PREMOD_T1, PREMOD_V_S0};
use crate::scenario::{
    ensemble_multimode, ensemble_premod, Attack, ChannelModel, Direction, Ensemble, PremodLeakageScenario,
    ProtocolChoice, Scenario, SideChannelOwner, BOB, RECORD_P, RECORD_X,
};
use crate::Result;

pub mod limits;

#[derive(Clone, Debug, PartialEq)]
pub struct KeyRateReport {
    pub direction: Direction,
    pub attack: Attack,
    pub beta: f64,
    pub i_ab: f64,
    /// `I_BE`/`I_AE` for individual attacks, the Holevo bound for collective ones.
    pub eve_information: f64,
    pub rate: f64,
    /// Bob's x-variance.
    pub v_b: f64,
    /// Bob's x-variance given Alice's data.
    pub v_b_cond_a: f64,
    /// Bob's x-variance given Eve's x-homodynes (individual, reverse).
    pub v_b_cond_e: Option<f64>,
    /// Variance of Alice's x-data given Eve's x-homodynes (individual, direct).
    pub v_a_cond_e: Option<f64>,
}

impl KeyRateReport {
    pub fn is_secure(&self) -> bool {
        self.rate > 0.0
    }

    /// Named intermediates that are defined for this report.
    pub fn conditional_variances(&self) -> Vec<(&'static str, f64)> {
        let mut out = alloc::vec![("v_b", self.v_b), ("v_b_cond_a", self.v_b_cond_a)];
        if let Some(v) = self.v_b_cond_e {
            out.push(("v_b_cond_e", v));
        }
        if let Some(v) = self.v_a_cond_e {
            out.push(("v_a_cond_e", v));
        }
        out
    }
}

fn half_log2_ratio(num: f64, den: f64) -> f64 {
    0.5 * math::log2(num / den)
}

/// Alice–Bob mutual information of the pure-loss prepare-and-measure model:
/// `½ log₂(V_B / V_B|A)` with `V_B|A = η(V_0 − 1) + 1` and `V_B = V_B|A + ηV_M`,
/// where `V_0` is the unmodulated signal variance at the modulator. Channel
/// noise and leakage do not enter.
pub fn mutual_info_ab(sc: &Scenario, channel: &ChannelModel) -> Result<f64> {
    sc.validate()?;
    channel.validate()?;
    let v0 = match sc {
        Scenario::Multimode(m) => m.v_s,
        Scenario::Premod(p) => p.coupled_signal_variance(),
    };
    let eta = channel.eta;
    let cond = eta * (v0 - 1.0) + 1.0;
    if sc.v_m() == 0.0 {
        return Ok(0.0);
    }
    Ok(half_log2_ratio(cond + eta * sc.v_m(), cond))
}

fn build_ensemble(sc: &Scenario, channel: &ChannelModel, owner: SideChannelOwner) -> Result<Ensemble> {
    match sc {
        Scenario::Multimode(m) => ensemble_multimode(m, channel),
        Scenario::Premod(p) => ensemble_premod(p, channel, owner),
    }
}

fn condition_all(state: &GaussianState, modes: &[ModeId], q: Quadrature) -> Result<GaussianState> {
    let mut s = state.clone();
    for m in modes {
        s = s.homodyne_condition(m.clone(), q)?;
    }
    Ok(s)
}

fn bob_cond_alice(ens: &Ensemble) -> Result<f64> {
    ens.state.homodyne_condition(RECORD_X, Quadrature::X)?.variance(BOB, Quadrature::X)
}

/// Individual attack on a pure-loss channel: Eve homodynes the x-quadrature
/// of every mode she holds.
pub fn key_rate_individual(sc: &Scenario, channel: &ChannelModel, direction: Direction) -> Result<KeyRateReport> {
    individual(sc, channel, direction, SideChannelOwner::Eve)
}

fn individual(sc: &Scenario, channel: &ChannelModel, direction: Direction, owner: SideChannelOwner) -> Result<KeyRateReport> {
    channel.validate()?;
    ensure(channel.is_pure_loss(), "epsilon", channel.epsilon, "0 for individual attacks")?;
    let ens = build_ensemble(sc, channel, owner)?;
    let i_ab = mutual_info_ab(sc, channel)?;
    let v_b = ens.state.variance(BOB, Quadrature::X)?;
    let v_b_cond_a = bob_cond_alice(&ens)?;
    let given_eve = condition_all(&ens.state, &ens.eve, Quadrature::X)?;
    let (eve_information, v_b_cond_e, v_a_cond_e) = match direction {
        Direction::Reverse => {
            let v = given_eve.variance(BOB, Quadrature::X)?;
            (half_log2_ratio(v_b, v), Some(v), None)
        }
        Direction::Direct => {
            let v = given_eve.variance(RECORD_X, Quadrature::X)?;
            let info = if sc.v_m() == 0.0 { 0.0 } else { half_log2_ratio(sc.v_m(), v) };
            (info, None, Some(v))
        }
    };
    Ok(KeyRateReport {
        direction,
        attack: Attack::Individual,
        beta: 1.0,
        i_ab,
        eve_information,
        rate: i_ab - eve_information,
        v_b,
        v_b_cond_a,
        v_b_cond_e,
        v_a_cond_e,
    })
}

fn entropy_of(state: &GaussianState, modes: &[ModeId], g: fn(f64) -> f64) -> Result<f64> {
    state.partial_trace(modes)?.von_neumann_entropy_with(g)
}

/// `S(E) − S(E | reference data)` on the ensemble state.
fn ensemble_holevo(ens: &Ensemble, direction: Direction, coherent: bool, g: fn(f64) -> f64) -> Result<f64> {
    let s_e = entropy_of(&ens.state, &ens.eve, g)?;
    let cond = match direction {
        Direction::Reverse => ens.state.homodyne_condition(BOB, Quadrature::X)?,
        Direction::Direct => {
            let s = ens.state.homodyne_condition(RECORD_X, Quadrature::X)?;
            if coherent {
                s.homodyne_condition(RECORD_P, Quadrature::X)?
            } else {
                s
            }
        }
    };
    Ok(s_e - entropy_of(&cond, &ens.eve, g)?)
}

/// Collective attack: `β·I_AB − χ`. For direct reconciliation Eve's state
/// is conditioned on the x-displacement, and for the coherent protocol
/// (`V_S = 1`) on both displacements. Negative rates are returned as they are.
pub fn key_rate_collective(sc: &Scenario, channel: &ChannelModel, protocol: &ProtocolChoice) -> Result<KeyRateReport> {
    collective(sc, channel, protocol, SideChannelOwner::Eve, entropy_g)
}

/// [`key_rate_collective`] with a substitute entropy kernel.
pub fn key_rate_collective_with(
    sc: &Scenario,
    channel: &ChannelModel,
    protocol: &ProtocolChoice,
    g: fn(f64) -> f64,
) -> Result<KeyRateReport> {
    collective(sc, channel, protocol, SideChannelOwner::Eve, g)
}

fn collective(
    sc: &Scenario,
    channel: &ChannelModel,
    protocol: &ProtocolChoice,
    owner: SideChannelOwner,
    g: fn(f64) -> f64,
) -> Result<KeyRateReport> {
    protocol.validate()?;
    let ens = build_ensemble(sc, channel, owner)?;
    let i_ab = mutual_info_ab(sc, channel)?;
    let chi = ensemble_holevo(&ens, protocol.direction, sc.is_coherent(), g)?;
    Ok(KeyRateReport {
        direction: protocol.direction,
        attack: Attack::Collective,
        beta: protocol.beta,
        i_ab,
        eve_information: chi,
        rate: protocol.beta * i_ab - chi,
        v_b: ens.state.variance(BOB, Quadrature::X)?,
        v_b_cond_a: bob_cond_alice(&ens)?,
        v_b_cond_e: None,
        v_a_cond_e: None,
    })
}

/// Dispatches on `protocol.attack`. Individual rates use full efficiency.
pub fn key_rate(sc: &Scenario, channel: &ChannelModel, protocol: &ProtocolChoice) -> Result<KeyRateReport> {
    match protocol.attack {
        Attack::Individual => key_rate_individual(sc, channel, protocol.direction),
        Attack::Collective => key_rate_collective(sc, channel, protocol),
    }
}

/// Premodulation scenario with the side-channel output treated as trusted
/// preparation noise: same state, but Eve does not hold `ES`.
pub fn key_rate_preparation_noise(
    sc: &PremodLeakageScenario,
    channel: &ChannelModel,
    protocol: &ProtocolChoice,
) -> Result<KeyRateReport> {
    let s = Scenario::Premod(sc.clone());
    match protocol.attack {
        Attack::Individual => individual(&s, channel, protocol.direction, SideChannelOwner::Trusted),
        Attack::Collective => collective(&s, channel, protocol, SideChannelOwner::Trusted, entropy_g),
    }
}

fn measure_reference(model: &PurifiedModel, direction: Direction) -> Result<GaussianState> {
    match direction {
        Direction::Reverse => model.state().homodyne_condition(model.bob(), Quadrature::X),
        Direction::Direct => {
            if model.alice_measurement().is_empty() {
                return Err(Error::Unsupported("model has no direct-reconciliation measurement"));
            }
            let mut s = model.state().clone();
            for (m, q) in model.alice_measurement() {
                s = s.homodyne_condition(m.clone(), *q)?;
            }
            Ok(s)
        }
    }
}

/// Holevo bound `S(E) − S(E | reference)` on Eve's modes of a purified model.
/// The reference is Bob's x-homodyne (reverse) or Alice's preparation
/// measurement (direct).
pub fn holevo_bound(model: &PurifiedModel, direction: Direction) -> Result<f64> {
    let s_e = entropy_of(model.state(), model.eve(), entropy_g)?;
    let cond = measure_reference(model, direction)?;
    Ok(s_e - entropy_of(&cond, model.eve(), entropy_g)?)
}

/// Same quantity through global purity: `S(E) = S(trusted)` and
/// `S(E | ref) = S(trusted remainder | ref)`. Only well conditioned when the
/// trusted covariance entries are moderate.
pub fn holevo_bound_dual(model: &PurifiedModel, direction: Direction) -> Result<f64> {
    let s_t = entropy_of(model.state(), model.trusted(), entropy_g)?;
    let cond = measure_reference(model, direction)?;
    let rest: Vec<ModeId> = model
        .trusted()
        .iter()
        .filter(|m| cond.contains(m))
        .cloned()
        .collect();
    Ok(s_t - entropy_of(&cond, &rest, entropy_g)?)
}

/// Builds the entanglement-based model of a scenario with the default
/// premodulation limits.
pub fn purified_model(sc: &Scenario, channel: &ChannelModel) -> Result<PurifiedModel> {
    match sc {
        Scenario::Multimode(m) => purify_multimode(m, channel),
        Scenario::Premod(p) => build_eb_premod(p, channel, PREMOD_T1, PREMOD_V_S0),
    }
}

/// Collective rate with `χ` taken from the entanglement-based model.
pub fn key_rate_collective_purified(sc: &Scenario, channel: &ChannelModel, protocol: &ProtocolChoice) -> Result<KeyRateReport> {
    protocol.validate()?;
    let model = purified_model(sc, channel)?;
    let chi = holevo_bound(&model, protocol.direction)?;
    let i_ab = mutual_info_ab(sc, channel)?;
    let ens = build_ensemble(sc, channel, SideChannelOwner::Eve)?;
    Ok(KeyRateReport {
        direction: protocol.direction,
        attack: Attack::Collective,
        beta: protocol.beta,
        i_ab,
        eve_information: chi,
        rate: protocol.beta * i_ab - chi,
        v_b: ens.state.variance(BOB, Quadrature::X)?,
        v_b_cond_a: bob_cond_alice(&ens)?,
        v_b_cond_e: None,
        v_a_cond_e: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::MultimodeLeakageScenario;

    fn mm(v_s: f64, v_m: f64, k: f64) -> Scenario {
        MultimodeLeakageScenario::symmetric(v_s, v_m, k).into()
    }

    #[test]
    fn mutual_information_examples() {
        let ch = ChannelModel::pure_loss(1.0).unwrap();
        assert!((mutual_info_ab(&mm(1.0, 3.0, 0.0), &ch).unwrap() - 1.0).abs() < 1e-15);
        let ch = ChannelModel::pure_loss(0.3).unwrap();
        assert_eq!(mutual_info_ab(&mm(0.5, 3.0, 0.0), &ch).unwrap(), mutual_info_ab(&mm(0.5, 3.0, 2.0), &ch).unwrap());
        assert_eq!(mutual_info_ab(&mm(0.5, 0.0, 1.0), &ch).unwrap(), 0.0);
        let pm: Scenario = PremodLeakageScenario::new(0.5, 3.0, 1.0).into();
        assert!((mutual_info_ab(&pm, &ch).unwrap() - mutual_info_ab(&mm(0.5, 3.0, 0.0), &ch).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn baseline_coherent_rate_is_one_bit() {
        let ch = ChannelModel::pure_loss(1.0).unwrap();
        let r = key_rate_individual(&mm(1.0, 3.0, 0.0), &ch, Direction::Reverse).unwrap();
        assert!((r.rate - 1.0).abs() < 1e-14);
        assert!(r.eve_information.abs() < 1e-14);
    }

    #[test]
    fn trivial_collective_gives_i_ab() {
        let ch = ChannelModel::pure_loss(1.0).unwrap();
        let p = ProtocolChoice::new(Direction::Reverse, Attack::Collective, 1.0).unwrap();
        let r = key_rate_collective(&mm(0.5, 3.0, 0.0), &ch, &p).unwrap();
        assert!(r.eve_information.abs() < 1e-10);
        assert!((r.rate - r.i_ab).abs() < 1e-10);
    }

    #[test]
    fn individual_requires_pure_loss() {
        let ch = ChannelModel::new(0.5, 0.01).unwrap();
        assert!(key_rate_individual(&mm(0.5, 3.0, 1.0), &ch, Direction::Reverse).is_err());
    }

    #[test]
    fn ensemble_and_purified_holevo_agree() {
        let p = ProtocolChoice::new(Direction::Reverse, Attack::Collective, 0.95).unwrap();
        for (v_s, v_m, k, eta, eps) in [(0.5, 4.0, 1.0, 0.3, 0.01), (1.0, 10.0, 0.5, 0.8, 0.0), (0.2, 2.0, 2.0, 0.1, 0.05)] {
            let ch = ChannelModel::new(eta, eps).unwrap();
            let a = key_rate_collective(&mm(v_s, v_m, k), &ch, &p).unwrap();
            let b = key_rate_collective_purified(&mm(v_s, v_m, k), &ch, &p).unwrap();
            assert!((a.eve_information - b.eve_information).abs() < 1e-8, "{a:?} {b:?}");
        }
    }

    #[test]
    fn dual_route_matches_eve_side() {
        let sc = MultimodeLeakageScenario::symmetric(0.5, 3.0, 0.8);
        let model = purify_multimode(&sc, &ChannelModel::new(0.4, 0.02).unwrap()).unwrap();
        let a = holevo_bound(&model, Direction::Reverse).unwrap();
        let b = holevo_bound_dual(&model, Direction::Reverse).unwrap();
        assert!((a - b).abs() < 1e-8, "{a} {b}");
        assert!(holevo_bound(&model, Direction::Direct).is_err());
    }

    #[test]
    fn premod_ensemble_matches_purification() {
        for v_s in [0.3, 1.0] {
            for dir in [Direction::Reverse, Direction::Direct] {
                let sc: Scenario = PremodLeakageScenario::new(v_s, 3.0, 0.6).into();
                let ch = ChannelModel::new(0.7, 0.02).unwrap();
                let p = ProtocolChoice::new(dir, Attack::Collective, 1.0).unwrap();
                let a = key_rate_collective(&sc, &ch, &p).unwrap();
                let b = key_rate_collective_purified(&sc, &ch, &p).unwrap();
                assert!((a.eve_information - b.eve_information).abs() < 1e-4, "{v_s} {dir:?}: {a:?} {b:?}");
            }
        }
    }
}
