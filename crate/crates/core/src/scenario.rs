//! Protocol descriptions and their prepare-and-measure covariance structures.
//!
//! Mode names used by the builders:
//!
//! | label | meaning |
//! |-------|---------|
//! | `B`   | signal mode, received by Bob |
//! | `L`, `L1`..`LN` | leakage modes (Eve) |
//! | `ES`  | output of the premodulation side channel (Eve) |
//! | `E`, `F` | channel purification (Eve); `F` only with excess noise |
//! | `MX`, `MP` | classical records of Alice's x and p displacements |
//!
//! The record modes only carry x-variance; they are bookkeeping for
//! conditioning on Alice's data and are never passed to entropy routines.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure, Error};
use crate::gaussian::{GaussianState, ModeId, Quadrature};
use crate::linalg::Matrix;
use crate::math;
use crate::Result;

pub const BOB: ModeId = ModeId::from_static("B");
pub const LEAK: ModeId = ModeId::from_static("L");
pub const SIDE: ModeId = ModeId::from_static("ES");
pub const EVE_CHANNEL: ModeId = ModeId::from_static("E");
pub const EVE_PURIFIER: ModeId = ModeId::from_static("F");
pub const RECORD_X: ModeId = ModeId::from_static("MX");
pub const RECORD_P: ModeId = ModeId::from_static("MP");

pub const DEFAULT_ATTENUATION_DB_PER_KM: f64 = 0.2;

/// `η = 10^(-a·d/10)`.
pub fn distance_to_transmittance(d_km: f64, attenuation_db_per_km: f64) -> Result<f64> {
    ensure(d_km >= 0.0 && d_km.is_finite(), "distance", d_km, ">= 0 km")?;
    ensure(attenuation_db_per_km >= 0.0, "attenuation", attenuation_db_per_km, ">= 0 dB/km")?;
    Ok(math::powf(10.0, -attenuation_db_per_km * d_km / 10.0))
}

/// Untrusted channel with transmittance `eta` and excess noise `epsilon`.
///
/// Excess noise is referred to the channel output:
/// `V_out = η·V + 1 − η + ε`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelModel {
    pub eta: f64,
    pub epsilon: f64,
    pub attenuation_db_per_km: f64,
}

impl ChannelModel {
    pub fn new(eta: f64, epsilon: f64) -> Result<Self> {
        let c = ChannelModel {
            eta,
            epsilon,
            attenuation_db_per_km: DEFAULT_ATTENUATION_DB_PER_KM,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn pure_loss(eta: f64) -> Result<Self> {
        ChannelModel::new(eta, 0.0)
    }

    pub fn from_distance(d_km: f64, epsilon: f64, attenuation_db_per_km: f64) -> Result<Self> {
        let c = ChannelModel {
            eta: distance_to_transmittance(d_km, attenuation_db_per_km)?,
            epsilon,
            attenuation_db_per_km,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.eta > 0.0 && self.eta <= 1.0, "eta", self.eta, "(0, 1]")?;
        ensure(self.epsilon >= 0.0 && self.epsilon.is_finite(), "epsilon", self.epsilon, ">= 0")?;
        ensure(
            self.attenuation_db_per_km >= 0.0,
            "attenuation_db_per_km",
            self.attenuation_db_per_km,
            ">= 0",
        )
    }

    pub fn is_pure_loss(&self) -> bool {
        self.epsilon == 0.0
    }

    pub fn output_variance(&self, v: f64) -> f64 {
        self.eta * v + 1.0 - self.eta + self.epsilon
    }

    /// Variance `W` of the EPR pair whose arm enters the channel beam
    /// splitter, so that `η·V + (1-η)·W` reproduces [`output_variance`](Self::output_variance).
    pub fn noise_epr_variance(&self) -> Result<f64> {
        if self.epsilon == 0.0 {
            return Ok(1.0);
        }
        if self.eta >= 1.0 {
            return Err(Error::Unsupported("excess noise on a lossless channel has no purification"));
        }
        Ok(1.0 + self.epsilon / (1.0 - self.eta))
    }

    /// Eve's modes added by [`apply_noisy_channel`].
    pub fn eve_modes(&self) -> Vec<ModeId> {
        if self.is_pure_loss() {
            vec![EVE_CHANNEL]
        } else {
            vec![EVE_CHANNEL, EVE_PURIFIER]
        }
    }
}

/// Sends `mode` through the channel, purified: the mode meets one arm `E` of
/// an EPR pair `(E, F)` of variance `W` on a beam splitter of transmittance
/// `η`. With no excess noise only a vacuum `E` is added.
pub fn apply_noisy_channel(state: &GaussianState, mode: impl Into<ModeId>, channel: &ChannelModel) -> Result<GaussianState> {
    channel.validate()?;
    let w = channel.noise_epr_variance()?;
    let with_eve = if channel.is_pure_loss() {
        state.attach_vacuum(EVE_CHANNEL)?
    } else {
        state.attach_epr(EVE_CHANNEL, EVE_PURIFIER, w)?
    };
    with_eve.apply_beamsplitter(mode, EVE_CHANNEL, channel.eta)
}

/// Same channel without Eve's modes.
pub fn apply_channel_unpurified(state: &GaussianState, mode: impl Into<ModeId>, channel: &ChannelModel) -> Result<GaussianState> {
    channel.validate()?;
    state.apply_attenuation(mode, channel.eta, 1.0 - channel.eta + channel.epsilon)
}

#[derive(Clone, Debug, PartialEq)]
pub enum LeakageInputs {
    /// `n_modes` leakage modes prepared like the signal (`V_L = V_S`).
    MatchSignal { n_modes: usize },
    /// Explicit x-variances of the leakage inputs. `V ≤ 1` is a pure
    /// squeezed state `(V, 1/V)`, `V > 1` a thermal state.
    Fixed(Vec<f64>),
}

/// Signal plus `N` leakage modes sharing a correlated modulation: each leakage
/// mode receives `(k·x_M, −k·p_M)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultimodeLeakageScenario {
    pub v_s: f64,
    pub v_m: f64,
    pub k: f64,
    pub leakage: LeakageInputs,
}

impl MultimodeLeakageScenario {
    /// Single leakage mode with `V_L = V_S`.
    pub fn symmetric(v_s: f64, v_m: f64, k: f64) -> Self {
        MultimodeLeakageScenario {
            v_s,
            v_m,
            k,
            leakage: LeakageInputs::MatchSignal { n_modes: 1 },
        }
    }

    pub fn n_modes(&self) -> usize {
        match &self.leakage {
            LeakageInputs::MatchSignal { n_modes } => *n_modes,
            LeakageInputs::Fixed(v) => v.len(),
        }
    }

    pub fn leakage_variances(&self) -> Vec<f64> {
        match &self.leakage {
            LeakageInputs::MatchSignal { n_modes } => vec![self.v_s; *n_modes],
            LeakageInputs::Fixed(v) => v.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.v_s > 0.0 && self.v_s <= 1.0, "v_s", self.v_s, "(0, 1]")?;
        ensure(self.v_m >= 0.0 && self.v_m.is_finite(), "v_m", self.v_m, ">= 0")?;
        ensure(self.k >= 0.0 && self.k.is_finite(), "k", self.k, ">= 0")?;
        for v in self.leakage_variances() {
            ensure(v > 0.0 && v.is_finite(), "v_l", v, "> 0")?;
        }
        Ok(())
    }

    /// Labels of the leakage modes: `L` for a single mode, `L1..LN` otherwise.
    pub fn leakage_labels(&self) -> Vec<ModeId> {
        let n = self.n_modes();
        if n == 1 {
            vec![LEAK]
        } else {
            (1..=n).map(|i| ModeId::from(format!("L{i}"))).collect()
        }
    }

    /// Equivalent single leakage mode for individual attacks:
    /// harmonic mean of the x-variances and `k·√N`.
    pub fn effective_leakage(&self) -> Result<(f64, f64)> {
        let v = self.leakage_variances();
        if v.is_empty() {
            return Err(Error::Unsupported("no leakage modes to reduce"));
        }
        let n = v.len() as f64;
        let v_eff = n / v.iter().map(|x| 1.0 / x).sum::<f64>();
        Ok((v_eff, self.k * math::sqrt(n)))
    }

    /// The single-mode scenario `(V_L,eff, k_eff)`.
    pub fn reduced(&self) -> Result<Self> {
        let (v_l, k) = self.effective_leakage()?;
        Ok(MultimodeLeakageScenario {
            v_s: self.v_s,
            v_m: self.v_m,
            k,
            leakage: LeakageInputs::Fixed(vec![v_l]),
        })
    }
}

/// Signal coupled to a side channel `ES` with transmittance `eta_e` before
/// modulation.
#[derive(Clone, Debug, PartialEq)]
pub struct PremodLeakageScenario {
    pub v_s: f64,
    pub v_m: f64,
    pub eta_e: f64,
    pub v_es: f64,
}

impl PremodLeakageScenario {
    /// Vacuum side-channel input.
    pub fn new(v_s: f64, v_m: f64, eta_e: f64) -> Self {
        PremodLeakageScenario {
            v_s,
            v_m,
            eta_e,
            v_es: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.v_s > 0.0 && self.v_s <= 1.0, "v_s", self.v_s, "(0, 1]")?;
        ensure(self.v_m >= 0.0 && self.v_m.is_finite(), "v_m", self.v_m, ">= 0")?;
        ensure(self.eta_e > 0.0 && self.eta_e <= 1.0, "eta_e", self.eta_e, "(0, 1]")?;
        ensure(self.v_es >= 1.0 && self.v_es.is_finite(), "v_es", self.v_es, ">= 1")
    }

    /// Signal x-variance after the side channel, before modulation.
    pub fn coupled_signal_variance(&self) -> f64 {
        self.eta_e * self.v_s + (1.0 - self.eta_e) * self.v_es
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scenario {
    Multimode(MultimodeLeakageScenario),
    Premod(PremodLeakageScenario),
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        match self {
            Scenario::Multimode(s) => s.validate(),
            Scenario::Premod(s) => s.validate(),
        }
    }

    pub fn v_s(&self) -> f64 {
        match self {
            Scenario::Multimode(s) => s.v_s,
            Scenario::Premod(s) => s.v_s,
        }
    }

    pub fn v_m(&self) -> f64 {
        match self {
            Scenario::Multimode(s) => s.v_m,
            Scenario::Premod(s) => s.v_m,
        }
    }

    pub fn is_coherent(&self) -> bool {
        self.v_s() == 1.0
    }

    /// Copy with a new signal variance; leakage inputs declared as
    /// [`LeakageInputs::MatchSignal`] follow it.
    pub fn with_v_s(&self, v_s: f64) -> Self {
        let mut s = self.clone();
        match &mut s {
            Scenario::Multimode(m) => m.v_s = v_s,
            Scenario::Premod(p) => p.v_s = v_s,
        }
        s
    }

    pub fn with_v_m(&self, v_m: f64) -> Self {
        let mut s = self.clone();
        match &mut s {
            Scenario::Multimode(m) => m.v_m = v_m,
            Scenario::Premod(p) => p.v_m = v_m,
        }
        s
    }
}

impl From<MultimodeLeakageScenario> for Scenario {
    fn from(s: MultimodeLeakageScenario) -> Self {
        Scenario::Multimode(s)
    }
}

impl From<PremodLeakageScenario> for Scenario {
    fn from(s: PremodLeakageScenario) -> Self {
        Scenario::Premod(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Direct,
    Reverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Attack {
    Individual,
    Collective,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolChoice {
    pub direction: Direction,
    pub attack: Attack,
    pub beta: f64,
}

impl ProtocolChoice {
    pub fn new(direction: Direction, attack: Attack, beta: f64) -> Result<Self> {
        let p = ProtocolChoice {
            direction,
            attack,
            beta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.beta > 0.0 && self.beta <= 1.0, "beta", self.beta, "(0, 1]")
    }
}

fn source_block(v: f64) -> Matrix {
    if v <= 1.0 {
        Matrix::diag(&[v, 1.0 / v])
    } else {
        Matrix::diag(&[v, v])
    }
}

/// The ensemble-averaged prepare-and-measure state together with the
/// bookkeeping needed to evaluate any attack on it.
#[derive(Clone, Debug)]
pub struct Ensemble {
    /// Bob, Eve's modes and the `MX`/`MP` records.
    pub state: GaussianState,
    pub eve: Vec<ModeId>,
}

/// Which modes Eve holds in the premodulation model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideChannelOwner {
    Eve,
    /// Side-channel output treated as trusted preparation noise.
    Trusted,
}

/// Constructive prepare-and-measure state for the multimode scenario: source
/// modes, correlated modulation, then the purified channel on `B`.
pub fn ensemble_multimode(sc: &MultimodeLeakageScenario, channel: &ChannelModel) -> Result<Ensemble> {
    sc.validate()?;
    let labels = sc.leakage_labels();
    let mut st = GaussianState::empty()
        .attach_block(&[RECORD_X, RECORD_P], &Matrix::zeros(4, 4))?
        .attach_squeezed(BOB, sc.v_s)?;
    for (label, v) in labels.iter().zip(sc.leakage_variances()) {
        st = st.attach_block(core::slice::from_ref(label), &source_block(v))?;
    }
    let mut px = vec![(RECORD_X, Quadrature::X, 1.0), (BOB, Quadrature::X, 1.0)];
    let mut pp = vec![(RECORD_P, Quadrature::X, 1.0), (BOB, Quadrature::P, 1.0)];
    for l in &labels {
        px.push((l.clone(), Quadrature::X, sc.k));
        pp.push((l.clone(), Quadrature::P, -sc.k));
    }
    st = st.modulate(&px, sc.v_m)?.modulate(&pp, sc.v_m)?;
    let state = apply_noisy_channel(&st, BOB, channel)?;
    let mut eve = labels;
    eve.extend(channel.eve_modes());
    Ok(Ensemble { state, eve })
}

/// Constructive prepare-and-measure state for the premodulation scenario:
/// side-channel coupling, modulation, then the purified channel on `B`.
pub fn ensemble_premod(sc: &PremodLeakageScenario, channel: &ChannelModel, owner: SideChannelOwner) -> Result<Ensemble> {
    sc.validate()?;
    let st = GaussianState::empty()
        .attach_block(&[RECORD_X, RECORD_P], &Matrix::zeros(4, 4))?
        .attach_squeezed(BOB, sc.v_s)?
        .attach_thermal(SIDE, sc.v_es)?
        .apply_beamsplitter(BOB, SIDE, sc.eta_e)?
        .modulate(&[(RECORD_X, Quadrature::X, 1.0), (BOB, Quadrature::X, 1.0)], sc.v_m)?
        .modulate(&[(RECORD_P, Quadrature::X, 1.0), (BOB, Quadrature::P, 1.0)], sc.v_m)?;
    let state = apply_noisy_channel(&st, BOB, channel)?;
    let mut eve = match owner {
        SideChannelOwner::Eve => vec![SIDE],
        SideChannelOwner::Trusted => Vec::new(),
    };
    eve.extend(channel.eve_modes());
    Ok(Ensemble { state, eve })
}

pub fn ensemble(sc: &Scenario, channel: &ChannelModel) -> Result<Ensemble> {
    match sc {
        Scenario::Multimode(m) => ensemble_multimode(m, channel),
        Scenario::Premod(p) => ensemble_premod(p, channel, SideChannelOwner::Eve),
    }
}

fn require_pure_loss(channel: &ChannelModel) -> Result<()> {
    channel.validate()?;
    ensure(channel.is_pure_loss(), "epsilon", channel.epsilon, "0 (pure-loss builder)")
}

/// Closed-form covariance over `(B, L, E)` for a pure-loss channel, using the
/// effective single leakage mode. Without leakage modes the state is over
/// `(B, E)`.
pub fn build_pm_multimode(sc: &MultimodeLeakageScenario, channel: &ChannelModel) -> Result<GaussianState> {
    sc.validate()?;
    require_pure_loss(channel)?;
    let eta = channel.eta;
    let (vm, s) = (sc.v_m, sc.v_s);
    let bx = eta * (s + vm - 1.0) + 1.0;
    let bp = eta * (1.0 / s + vm - 1.0) + 1.0;
    let ex = (1.0 - eta) * (s + vm) + eta;
    let ep = (1.0 - eta) * (1.0 / s + vm) + eta;
    let cbe_x = -math::sqrt(eta * (1.0 - eta)) * (s + vm - 1.0);
    let cbe_p = -math::sqrt(eta * (1.0 - eta)) * (1.0 / s + vm - 1.0);
    if sc.n_modes() == 0 {
        let cm = Matrix::from_rows(&[
            [bx, 0.0, cbe_x, 0.0],
            [0.0, bp, 0.0, cbe_p],
            [cbe_x, 0.0, ex, 0.0],
            [0.0, cbe_p, 0.0, ep],
        ]);
        return GaussianState::from_covariance([BOB, EVE_CHANNEL], cm);
    }
    let (vl, k) = sc.effective_leakage()?;
    let src = source_block(vl);
    let lx = src[(0, 0)] + k * k * vm;
    let lp = src[(1, 1)] + k * k * vm;
    let cbl = math::sqrt(eta) * k * vm;
    let cle = math::sqrt(1.0 - eta) * k * vm;
    let cm = Matrix::from_rows(&[
        [bx, 0.0, cbl, 0.0, cbe_x, 0.0],
        [0.0, bp, 0.0, -cbl, 0.0, cbe_p],
        [cbl, 0.0, lx, 0.0, -cle, 0.0],
        [0.0, -cbl, 0.0, lp, 0.0, cle],
        [cbe_x, 0.0, -cle, 0.0, ex, 0.0],
        [0.0, cbe_p, 0.0, cle, 0.0, ep],
    ]);
    GaussianState::from_covariance([BOB, LEAK, EVE_CHANNEL], cm)
}

/// Closed-form covariance over `(B, ES, E)` for a pure-loss channel.
pub fn build_pm_premod(sc: &PremodLeakageScenario, channel: &ChannelModel) -> Result<GaussianState> {
    sc.validate()?;
    require_pure_loss(channel)?;
    let eta = channel.eta;
    let (ee, e) = (sc.eta_e, sc.v_es);
    let mix = math::sqrt(ee * (1.0 - ee));
    let mut q = [[0.0; 6]; 2];
    for (i, s) in [sc.v_s, 1.0 / sc.v_s].into_iter().enumerate() {
        let sig = ee * s + (1.0 - ee) * e + sc.v_m;
        q[i] = [
            eta * sig + 1.0 - eta,
            (1.0 - ee) * s + ee * e,
            (1.0 - eta) * sig + eta,
            math::sqrt(eta) * mix * (e - s),
            -math::sqrt(eta * (1.0 - eta)) * (sig - 1.0),
            -math::sqrt(1.0 - eta) * mix * (e - s),
        ];
    }
    let mut cm = Matrix::zeros(6, 6);
    for (i, v) in q.iter().enumerate() {
        let (b, es, ev) = (i, 2 + i, 4 + i);
        cm[(b, b)] = v[0];
        cm[(es, es)] = v[1];
        cm[(ev, ev)] = v[2];
        cm[(b, es)] = v[3];
        cm[(es, b)] = v[3];
        cm[(b, ev)] = v[4];
        cm[(ev, b)] = v[4];
        cm[(es, ev)] = v[5];
        cm[(ev, es)] = v[5];
    }
    GaussianState::from_covariance([BOB, SIDE, EVE_CHANNEL], cm)
}
