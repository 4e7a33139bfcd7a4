//! Entanglement-based equivalents of the prepare-and-measure models.
//!
//! * Multimode leakage: two EPR sources `(A, B)` and `(D, L)`, a beam splitter
//!   `T1` between `B` and `L`, single-mode squeezers `r1`, `r2`, and a second
//!   beam splitter `T2`. The six parameters are fixed by requiring the reduced
//!   `(B, L)` state to equal the modulated prepare-and-measure ensemble.
//! * Premodulation leakage: a near-infinitely squeezed `A`, an EPR pair
//!   `(C, D)` of variance `V_M/(1-T1)`, the signal `B` coupled to the side
//!   channel `ES`, and two strongly unbalanced beam splitters `T1 → 1`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use crate::error::{ensure, Error};
use crate::gaussian::{GaussianState, ModeId, Quadrature};
use crate::linalg::Matrix;
use crate::math;
use crate::scenario::{
    apply_noisy_channel, ChannelModel, MultimodeLeakageScenario, PremodLeakageScenario, BOB, LEAK, SIDE,
};
use crate::Result;

pub const ALICE: ModeId = ModeId::from_static("A");
pub const ALICE_AUX: ModeId = ModeId::from_static("D");
pub const MOD_SOURCE: ModeId = ModeId::from_static("C");

/// Maximum moment defect accepted from [`solve_bloch_messiah`].
pub const BM_TOLERANCE: f64 = 1e-8;

/// Default `T1` of the premodulation purification.
pub const PREMOD_T1: f64 = 1.0 - 1e-6;
/// Default x-variance of Alice's reference squeezed state.
pub const PREMOD_V_S0: f64 = 1e-6;

/// Second moments of the `(B, L)` pair the construction must reproduce.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochMessiahTargets {
    pub bx: f64,
    pub bp: f64,
    pub lx: f64,
    pub lp: f64,
    pub cx: f64,
    pub cp: f64,
}

impl BlochMessiahTargets {
    /// Signal `(V_S, 1/V_S)`, leakage input `(V_L, 1/V_L)`, modulation `V_M`
    /// on the signal and `k²V_M` on the leakage, correlations `±k·V_M`.
    pub fn new(k: f64, v_s: f64, v_m: f64, v_l: f64) -> Result<Self> {
        ensure(k >= 0.0 && k.is_finite(), "k", k, ">= 0")?;
        ensure(v_s > 0.0 && v_s <= 1.0, "v_s", v_s, "(0, 1]")?;
        ensure(v_m > 0.0 && v_m.is_finite(), "v_m", v_m, "> 0")?;
        ensure(v_l > 0.0 && v_l <= 1.0, "v_l", v_l, "(0, 1] (pure leakage input)")?;
        Ok(BlochMessiahTargets {
            bx: v_s + v_m,
            bp: 1.0 / v_s + v_m,
            lx: v_l + k * k * v_m,
            lp: 1.0 / v_l + k * k * v_m,
            cx: k * v_m,
            cp: -k * v_m,
        })
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.bx, self.bp, self.lx, self.lp, self.cx, self.cp]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochMessiahSolution {
    pub t1: f64,
    pub t2: f64,
    pub r1: f64,
    pub r2: f64,
    pub v1: f64,
    pub v2: f64,
    /// Largest absolute defect over the six target moments.
    pub residual: f64,
}

/// Closed-form `(B, L)` moments of the construction, in the order
/// `[V_B(x), V_B(p), V_L(x), V_L(p), C_BL(x), C_BL(p)]`.
pub fn bloch_messiah_moments(t1: f64, t2: f64, r1: f64, r2: f64, v1: f64, v2: f64) -> [f64; 6] {
    let vd = v1 - v2;
    let s1 = math::sqrt((1.0 - t1) * t1);
    let s2 = math::sqrt((1.0 - t2) * t2);
    let em = math::exp(-(r1 + r2));
    let ep = math::exp(r1 + r2);
    let a = t1 * vd + v2;
    let b = v1 - t1 * vd;
    let (x1, x2) = (math::exp(-2.0 * r1), math::exp(-2.0 * r2));
    let (p1, p2) = (math::exp(2.0 * r1), math::exp(2.0 * r2));
    [
        -2.0 * s1 * s2 * em * vd + x1 * t2 * a + x2 * (1.0 - t2) * b,
        -2.0 * s1 * s2 * ep * vd + p1 * t2 * a + p2 * (1.0 - t2) * b,
        2.0 * s1 * s2 * em * vd + x1 * (1.0 - t2) * a + x2 * t2 * b,
        2.0 * s1 * s2 * ep * vd + p1 * (1.0 - t2) * a + p2 * t2 * b,
        s1 * (1.0 - 2.0 * t2) * em * vd + s2 * (x2 * b - x1 * a),
        s1 * (1.0 - 2.0 * t2) * ep * vd + s2 * (p2 * b - p1 * a),
    ]
}

impl BlochMessiahSolution {
    pub fn moments(&self) -> [f64; 6] {
        bloch_messiah_moments(self.t1, self.t2, self.r1, self.r2, self.v1, self.v2)
    }

    /// Four-mode state over `(A, B, D, L)` built from the optical elements.
    pub fn state(&self) -> Result<GaussianState> {
        GaussianState::empty()
            .attach_epr(ALICE, BOB, self.v1)?
            .attach_epr(ALICE_AUX, LEAK, self.v2)?
            .apply_beamsplitter(BOB, LEAK, self.t1)?
            .apply_squeezer(BOB, self.r1)?
            .apply_squeezer(LEAK, self.r2)?
            .apply_beamsplitter(BOB, LEAK, self.t2)
    }

    fn with_residual(mut self, targets: &BlochMessiahTargets) -> Self {
        let m = self.moments();
        self.residual = m
            .iter()
            .zip(targets.as_array())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()));
        if self.residual.is_nan() {
            self.residual = f64::INFINITY;
        }
        self
    }
}

/// Solves for the construction with `V_L = V_S`.
pub fn solve_bloch_messiah(k: f64, v_s: f64, v_m: f64) -> Result<BlochMessiahSolution> {
    solve_bloch_messiah_targets(&BlochMessiahTargets::new(k, v_s, v_m, v_s)?)
}

/// Solves the six moment equations for arbitrary targets.
///
/// The first candidate comes from the Williamson form of the target state
/// (exact up to rounding); damped Newton from eight fixed starts is used only
/// when that candidate misses the tolerance. Among Newton solutions the one
/// with the smallest `|r1| + |r2|` wins.
pub fn solve_bloch_messiah_targets(targets: &BlochMessiahTargets) -> Result<BlochMessiahSolution> {
    let mut best = analytic_candidate(targets).map(|s| s.with_residual(targets));
    if let Some(s) = best {
        if s.residual <= BM_TOLERANCE {
            return Ok(s);
        }
    }
    let mut found: Option<BlochMessiahSolution> = None;
    for start in newton_starts() {
        let s = newton(targets, start).with_residual(targets);
        if s.residual <= BM_TOLERANCE {
            let better = found.map_or(true, |f| s.r1.abs() + s.r2.abs() < f.r1.abs() + f.r2.abs());
            if better {
                found = Some(s);
            }
        } else if best.map_or(true, |b| s.residual < b.residual) {
            best = Some(s);
        }
    }
    found.ok_or(Error::NoConvergence {
        best_residual: best.map_or(f64::INFINITY, |b| b.residual),
    })
}

fn analytic_candidate(t: &BlochMessiahTargets) -> Option<BlochMessiahSolution> {
    let gx = Matrix::from_rows(&[[t.bx, t.cx], [t.cx, t.lx]]);
    let gp = Matrix::from_rows(&[[t.bp, t.cp], [t.cp, t.lp]]);
    let sx = gx.sqrt_psd();
    let eig = sx.congruence(&gp).symmetric_eigen();
    let nu: Vec<f64> = eig.values.iter().map(|v| math::sqrt(v.max(0.0))).collect();
    if nu.iter().any(|v| *v <= 0.0) {
        return None;
    }
    let scale = Matrix::diag(&[1.0 / math::sqrt(nu[0]), 1.0 / math::sqrt(nu[1])]);
    let mut m = &(&sx * &eig.vectors) * &scale;
    let mut d = [nu[0], nu[1]];
    // Singular vectors of M from the eigenvectors of MᵀM.
    let mtm = &m.transpose() * &m;
    let se = mtm.symmetric_eigen();
    let sigma = [math::sqrt(se.values[0].max(0.0)), math::sqrt(se.values[1].max(0.0))];
    if sigma[0] <= 0.0 || sigma[1] <= 0.0 {
        return None;
    }
    let mut v = se.vectors;
    if v.determinant() < 0.0 {
        // Flipping a column of M flips the matching row of Vᵀ.
        m = &m * &Matrix::diag(&[1.0, -1.0]);
        for i in 0..2 {
            v[(1, i)] = -v[(1, i)];
        }
    }
    let mut u = &(&m * &v) * &Matrix::diag(&[1.0 / sigma[0], 1.0 / sigma[1]]);
    let mut sigma = sigma;
    if u.determinant() < 0.0 {
        for i in 0..2 {
            u[(i, 1)] = -u[(i, 1)];
            v[(i, 1)] = -v[(i, 1)];
        }
        for i in 0..2 {
            v[(1, i)] = -v[(1, i)];
        }
    }
    // M = R(alpha) diag(sigma) R(beta), R(θ) = [[cos, sin], [-sin, cos]].
    let mut alpha = math::atan2(u[(0, 1)], u[(0, 0)]);
    let mut beta = math::atan2(v[(1, 0)], v[(0, 0)]);
    let j = math::floor(alpha / FRAC_PI_2);
    alpha -= j * FRAC_PI_2;
    beta += j * FRAC_PI_2;
    if (j as i64).rem_euclid(2) == 1 {
        sigma.swap(0, 1);
    }
    let j = math::floor(beta / FRAC_PI_2);
    beta -= j * FRAC_PI_2;
    if (j as i64).rem_euclid(2) == 1 {
        d.swap(0, 1);
    }
    let ct = |x: f64| {
        let c = math::cos(x);
        (c * c).clamp(0.0, 1.0)
    };
    Some(BlochMessiahSolution {
        t1: ct(beta),
        t2: ct(alpha),
        r1: -math::ln(sigma[0]),
        r2: -math::ln(sigma[1]),
        v1: d[0].max(1.0),
        v2: d[1].max(1.0),
        residual: f64::INFINITY,
    })
}

// Unconstrained coordinates: logit T1, logit T2, r1, r2, ln(V1-1), ln(V2-1).
fn decode(u: &[f64; 6]) -> BlochMessiahSolution {
    let sig = |x: f64| 1.0 / (1.0 + math::exp(-x));
    BlochMessiahSolution {
        t1: sig(u[0]),
        t2: sig(u[1]),
        r1: u[2],
        r2: u[3],
        v1: 1.0 + math::exp(u[4]),
        v2: 1.0 + math::exp(u[5]),
        residual: f64::INFINITY,
    }
}

fn newton_starts() -> [[f64; 6]; 8] {
    let mut out = [[0.0; 6]; 8];
    let mut i = 0;
    for lt in [-1.0, 1.0] {
        for r in [-0.5, 0.5] {
            for lv in [0.0, 2.0] {
                out[i] = [lt, -lt, r, -r, lv, lv - 1.0];
                i += 1;
            }
        }
    }
    out
}

fn defect(targets: &BlochMessiahTargets, u: &[f64; 6]) -> [f64; 6] {
    let m = decode(u).moments();
    let t = targets.as_array();
    core::array::from_fn(|i| m[i] - t[i])
}

fn norm2(v: &[f64; 6]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn newton(targets: &BlochMessiahTargets, start: [f64; 6]) -> BlochMessiahSolution {
    let mut u = start;
    let mut f = defect(targets, &u);
    let mut lambda = 1e-3;
    for _ in 0..300 {
        if !norm2(&f).is_finite() {
            break;
        }
        let mut jac = Matrix::zeros(6, 6);
        for j in 0..6 {
            let h = 1e-7 * (1.0 + u[j].abs());
            let (mut up, mut dn) = (u, u);
            up[j] += h;
            dn[j] -= h;
            let (fu, fd) = (defect(targets, &up), defect(targets, &dn));
            for i in 0..6 {
                jac[(i, j)] = (fu[i] - fd[i]) / (2.0 * h);
            }
        }
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let g: Vec<f64> = (0..6).map(|i| -(0..6).map(|k| jt[(i, k)] * f[k]).sum::<f64>()).collect();
        let mut improved = false;
        for _ in 0..20 {
            let mut a = jtj.clone();
            for i in 0..6 {
                a[(i, i)] += lambda * (1.0 + jtj[(i, i)]);
            }
            if let Some(step) = a.solve(&g) {
                let trial: [f64; 6] = core::array::from_fn(|i| u[i] + step[i]);
                let ft = defect(targets, &trial);
                if norm2(&ft) < norm2(&f) {
                    u = trial;
                    f = ft;
                    lambda = (lambda * 0.3).max(1e-12);
                    improved = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved || norm2(&f) < 1e-24 {
            break;
        }
    }
    decode(&u)
}

/// An entanglement-based model whose state is pure before the channel.
///
/// Fields are private; models only come from the builders in this module.
#[derive(Clone, Debug)]
pub struct PurifiedModel {
    state: GaussianState,
    pre_channel: GaussianState,
    trusted: Vec<ModeId>,
    eve: Vec<ModeId>,
    alice_measurement: Vec<(ModeId, Quadrature)>,
}

impl PurifiedModel {
    /// Full state after the channel, including Eve's modes.
    pub fn state(&self) -> &GaussianState {
        &self.state
    }

    pub fn pre_channel(&self) -> &GaussianState {
        &self.pre_channel
    }

    /// Alice's modes followed by Bob's.
    pub fn trusted(&self) -> &[ModeId] {
        &self.trusted
    }

    pub fn eve(&self) -> &[ModeId] {
        &self.eve
    }

    pub fn bob(&self) -> ModeId {
        BOB
    }

    /// Homodyne measurements that realise Alice's preparation, in order.
    /// Empty when the model does not support direct reconciliation.
    pub fn alice_measurement(&self) -> &[(ModeId, Quadrature)] {
        &self.alice_measurement
    }

    /// Largest `|ν - 1|` of the pre-channel state.
    pub fn pre_channel_purity_defect(&self) -> f64 {
        self.pre_channel.purity_defect()
    }
}

/// Two-source model for one leakage mode, with the channel on `B`.
pub fn build_eb_multimode(solution: &BlochMessiahSolution, channel: &ChannelModel) -> Result<PurifiedModel> {
    ensure(solution.residual <= BM_TOLERANCE, "bloch-messiah residual", solution.residual, "<= 1e-8")?;
    let pre = solution.state()?;
    let state = apply_noisy_channel(&pre, BOB, channel)?;
    let mut eve = vec![LEAK];
    eve.extend(channel.eve_modes());
    Ok(PurifiedModel {
        state,
        pre_channel: pre,
        trusted: vec![ALICE, ALICE_AUX, BOB],
        eve,
        alice_measurement: Vec::new(),
    })
}

/// Solves and builds the two-source model for a multimode scenario. Several
/// leakage modes are first reduced to the effective single mode.
pub fn purify_multimode(sc: &MultimodeLeakageScenario, channel: &ChannelModel) -> Result<PurifiedModel> {
    sc.validate()?;
    let (v_l, k) = if sc.n_modes() == 0 { (sc.v_s, 0.0) } else { sc.effective_leakage()? };
    let targets = BlochMessiahTargets::new(k, sc.v_s, sc.v_m, v_l)?;
    build_eb_multimode(&solve_bloch_messiah_targets(&targets)?, channel)
}

/// Six-mode premodulation purification with the channel on `B`.
///
/// Requires a vacuum side-channel input, `t1 ∈ (0.99, 1)` and
/// `v_s0 ∈ (0, 1e-3]`.
pub fn build_eb_premod(sc: &PremodLeakageScenario, channel: &ChannelModel, t1: f64, v_s0: f64) -> Result<PurifiedModel> {
    sc.validate()?;
    if sc.v_es != 1.0 {
        return Err(Error::Unsupported("premodulation purification needs a vacuum side-channel input"));
    }
    ensure(t1 > 0.99 && t1 < 1.0, "t1", t1, "(0.99, 1)")?;
    ensure(v_s0 > 0.0 && v_s0 <= 1e-3, "v_s0", v_s0, "(0, 1e-3]")?;
    ensure(sc.v_m > 0.0, "v_m", sc.v_m, "> 0 for the purification")?;
    let w = sc.v_m / (1.0 - t1);
    let pre = GaussianState::empty()
        .attach_squeezed(ALICE, v_s0)?
        .attach_epr(MOD_SOURCE, ALICE_AUX, w)?
        .attach_squeezed(BOB, sc.v_s)?
        .attach_vacuum(SIDE)?
        .apply_beamsplitter(BOB, SIDE, sc.eta_e)?
        .apply_beamsplitter(ALICE, MOD_SOURCE, t1)?
        .apply_beamsplitter(ALICE_AUX, BOB, t1)?;
    let state = apply_noisy_channel(&pre, BOB, channel)?;
    let mut eve = vec![SIDE];
    eve.extend(channel.eve_modes());
    let alice_measurement = if sc.v_s == 1.0 {
        vec![(ALICE, Quadrature::X), (MOD_SOURCE, Quadrature::P)]
    } else {
        vec![(ALICE, Quadrature::X)]
    };
    Ok(PurifiedModel {
        state,
        pre_channel: pre,
        trusted: vec![ALICE, MOD_SOURCE, ALICE_AUX, BOB],
        eve,
        alice_measurement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments_of(state: &GaussianState) -> [f64; 6] {
        let v = |m: ModeId, q| state.variance(m, q).unwrap();
        let c = |q| state.covariance_between(BOB, q, LEAK, q).unwrap();
        [
            v(BOB, Quadrature::X),
            v(BOB, Quadrature::P),
            v(LEAK, Quadrature::X),
            v(LEAK, Quadrature::P),
            c(Quadrature::X),
            c(Quadrature::P),
        ]
    }

    #[test]
    fn closed_form_moments_match_construction() {
        for p in [
            (0.3, 0.8, 0.4, -0.2, 3.0, 1.5),
            (0.9, 0.1, -0.7, 0.3, 1.2, 6.0),
            (0.5, 0.5, 0.0, 0.0, 2.0, 2.0),
        ] {
            let s = BlochMessiahSolution {
                t1: p.0,
                t2: p.1,
                r1: p.2,
                r2: p.3,
                v1: p.4,
                v2: p.5,
                residual: 0.0,
            };
            let built = moments_of(&s.state().unwrap());
            for (a, b) in built.iter().zip(s.moments()) {
                assert!((a - b).abs() < 1e-12, "{p:?}: {built:?} vs {:?}", s.moments());
            }
        }
    }

    #[test]
    fn solver_reproduces_targets() {
        for (k, v_s, v_m) in [(1.0, 0.5, 4.0), (0.0, 0.5, 4.0), (2.0, 0.1, 10.0), (0.3, 1.0, 0.5), (5.0, 0.9, 100.0)] {
            let s = solve_bloch_messiah(k, v_s, v_m).unwrap();
            assert!(s.residual <= BM_TOLERANCE, "{k} {v_s} {v_m}: {}", s.residual);
            assert!((0.0..=1.0).contains(&s.t1) && (0.0..=1.0).contains(&s.t2));
            assert!(s.v1 >= 1.0 && s.v2 >= 1.0);
            let st = s.state().unwrap();
            let t = BlochMessiahTargets::new(k, v_s, v_m, v_s).unwrap().as_array();
            for (a, b) in moments_of(&st).iter().zip(t) {
                assert!((a - b).abs() < 1e-8);
            }
            assert!(st.purity_defect() < 1e-8);
        }
    }

    #[test]
    fn newton_fallback_converges() {
        let t = BlochMessiahTargets::new(2.0, 0.1, 10.0, 0.1).unwrap();
        let mut found = None;
        for start in newton_starts() {
            let s = newton(&t, start).with_residual(&t);
            if s.residual <= BM_TOLERANCE {
                found = Some(s);
                break;
            }
        }
        assert!(found.is_some());
    }

    #[test]
    fn solver_is_deterministic() {
        assert_eq!(solve_bloch_messiah(0.7, 0.4, 3.0).unwrap(), solve_bloch_messiah(0.7, 0.4, 3.0).unwrap());
    }

    #[test]
    fn domain_rejections() {
        assert!(solve_bloch_messiah(-1.0, 0.5, 1.0).is_err());
        assert!(solve_bloch_messiah(1.0, 1.5, 1.0).is_err());
        assert!(solve_bloch_messiah(1.0, 0.5, 0.0).is_err());
        let sc = PremodLeakageScenario::new(0.5, 2.0, 0.5);
        let ch = ChannelModel::pure_loss(0.5).unwrap();
        assert!(build_eb_premod(&sc, &ch, 0.9, 1e-6).is_err());
        assert!(build_eb_premod(&sc, &ch, 1.0, 1e-6).is_err());
        assert!(build_eb_premod(&sc, &ch, 0.999, 0.1).is_err());
    }

    #[test]
    fn premod_limit_conditional_variances() {
        let (v_s, v_m) = (0.4, 5.0);
        let sc = PremodLeakageScenario::new(v_s, v_m, 1.0);
        let ch = ChannelModel::pure_loss(1.0).unwrap();
        let m = build_eb_premod(&sc, &ch, 1.0 - 1e-6, 1e-6).unwrap();
        let x = m.state().homodyne_condition(ALICE, Quadrature::X).unwrap();
        assert!((x.variance(BOB, Quadrature::X).unwrap() - v_s).abs() < 1e-4);
        let p = m.state().homodyne_condition(ALICE, Quadrature::P).unwrap();
        assert!((p.variance(BOB, Quadrature::P).unwrap() - (1.0 / v_s + v_m)).abs() < 1e-4);
    }

    #[test]
    fn premod_moments_match_paper_forms() {
        let (v_s, v_m, ee, eta, t1, v0) = (0.3, 2.0, 0.6, 0.7, 0.995, 1e-3);
        let sc = PremodLeakageScenario::new(v_s, v_m, ee);
        let m = build_eb_premod(&sc, &ChannelModel::pure_loss(eta).unwrap(), t1, v0).unwrap();
        let pre = m.pre_channel();
        assert!((pre.variance(ALICE, Quadrature::X).unwrap() - (v0 * t1 + v_m)).abs() < 1e-9);
        assert!((pre.variance(ALICE, Quadrature::P).unwrap() - (t1 / v0 + v_m)).abs() < 1e-6);
        assert!((pre.variance(BOB, Quadrature::X).unwrap() - ((v_s * ee + 1.0 - ee) * t1 + v_m)).abs() < 1e-9);
        let c = m.state().covariance_between(ALICE, Quadrature::X, BOB, Quadrature::X).unwrap();
        assert!((c + ((v_m * v_m - (1.0 - t1) * (1.0 - t1)) * eta).sqrt()).abs() < 1e-9);
        assert!(m.pre_channel_purity_defect() < 1e-8);
    }
}
