//! Closed-form limits for individual attacks on pure-loss channels.

use crate::error::ensure;
use crate::math;
use crate::Result;

/// Largest tolerable modulation ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KMax {
    Finite(f64),
    /// Any ratio is tolerated (coherent signal or lossless channel).
    Unbounded,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultimodeAsymptotics {
    /// Reverse-reconciliation rate for `V_M → ∞` with `V = V_L = V_S`.
    pub rr_inf: f64,
    /// Same rate when the leakage mode is ignored.
    pub false_rr_inf: f64,
    pub k_max: KMax,
    /// Signal variance maximising `rr_inf`.
    pub v_opt: f64,
    /// Open interval of `V` in which squeezing beats the coherent protocol.
    pub improvement_range: (f64, f64),
}

fn check_v(v: f64) -> Result<()> {
    ensure(v > 0.0 && v <= 1.0, "v", v, "(0, 1]")
}

fn check_eta(eta: f64) -> Result<()> {
    ensure(eta > 0.0 && eta <= 1.0, "eta", eta, "(0, 1]")
}

fn check_k(k: f64) -> Result<()> {
    ensure(k >= 0.0 && k.is_finite(), "k", k, ">= 0")
}

pub fn rr_strong_modulation(v: f64, eta: f64, k: f64) -> Result<f64> {
    check_v(v)?;
    check_eta(eta)?;
    check_k(k)?;
    let k2 = k * k;
    Ok(-0.5 * math::log2((1.0 - eta + eta * k2 / (v * (1.0 + k2))) * (1.0 + eta * (v - 1.0))))
}

pub fn false_rr_strong_modulation(v: f64, eta: f64) -> Result<f64> {
    check_v(v)?;
    check_eta(eta)?;
    Ok(-0.5 * math::log2((1.0 - eta) * (1.0 + eta * (v - 1.0))))
}

/// Difference between the false and the actual strong-modulation rates.
pub fn underestimation_cost(v: f64, eta: f64, k: f64) -> Result<f64> {
    check_v(v)?;
    check_eta(eta)?;
    check_k(k)?;
    let k2 = k * k;
    Ok(-0.5 * math::log2((1.0 - eta) / (1.0 - eta + k2 * eta / (v * (k2 + 1.0)))))
}

pub fn k_max(v: f64, eta: f64) -> Result<KMax> {
    check_v(v)?;
    check_eta(eta)?;
    if v == 1.0 || eta == 1.0 {
        return Ok(KMax::Unbounded);
    }
    let num = v * (eta - 2.0 + v - eta * v);
    let den = (eta - 1.0) * (v - 1.0) * (v - 1.0);
    Ok(KMax::Finite(math::sqrt(num / den)))
}

pub fn v_opt(k: f64) -> Result<f64> {
    check_k(k)?;
    Ok(math::sqrt(k * k / (1.0 + k * k)))
}

pub fn multimode_asymptotics(v: f64, eta: f64, k: f64) -> Result<MultimodeAsymptotics> {
    let k2 = k * k;
    Ok(MultimodeAsymptotics {
        rr_inf: rr_strong_modulation(v, eta, k)?,
        false_rr_inf: false_rr_strong_modulation(v, eta)?,
        k_max: k_max(v, eta)?,
        v_opt: v_opt(k)?,
        improvement_range: (k2 / (1.0 + k2), 1.0),
    })
}

/// Direct-reconciliation rate near a lossless channel, `V = V_L = V_S`.
pub fn dr_shortdistance_rate(v: f64, eta: f64, k: f64, v_m: f64) -> Result<f64> {
    check_v(v)?;
    check_eta(eta)?;
    check_k(k)?;
    ensure(v_m >= 0.0 && v_m.is_finite(), "v_m", v_m, ">= 0")?;
    let k2vm = k * k * v_m;
    let first = (eta - 1.0) * v_m / (v * core::f64::consts::LN_2) * (2.0 * k2vm + v) * (2.0 * k2vm + v) / (k2vm + v);
    Ok(0.5 * (first + math::log2((v_m + v) / (k2vm + v))))
}

/// Bob's x-variance given Eve's leakage and channel modes, `V_L = V_S`.
pub fn v_b_cond_le(v_s: f64, v_m: f64, k: f64, eta: f64) -> Result<f64> {
    check_v(v_s)?;
    check_eta(eta)?;
    check_k(k)?;
    let k2 = k * k;
    let top = v_m + k2 * v_m + v_s;
    Ok(top / (eta * (k2 * v_m / v_s + 1.0) + (1.0 - eta) * top))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PremodAsymptotics {
    /// Direct-reconciliation rate on a lossless channel.
    pub dr_perfect_channel: f64,
    /// Reverse-reconciliation rate for `V_M → ∞`.
    pub rr_strong_mod: f64,
    /// Squeezed minus coherent rate for `V_M → ∞`.
    pub sq_over_coh: f64,
    /// Rate lost to the side-channel correlations beyond what the same
    /// variance degradation would cost as trusted preparation noise, on a
    /// lossless channel.
    pub correlation_advantage: f64,
}

pub fn premod_asymptotics(v_s: f64, eta: f64, eta_e: f64, v_m: f64) -> Result<PremodAsymptotics> {
    check_v(v_s)?;
    ensure(eta > 0.0 && eta < 1.0, "eta", eta, "(0, 1)")?;
    ensure(eta_e > 0.0 && eta_e <= 1.0, "eta_e", eta_e, "(0, 1]")?;
    ensure(v_m >= 0.0 && v_m.is_finite(), "v_m", v_m, ">= 0")?;
    let d = eta_e * (v_s - 1.0);
    Ok(PremodAsymptotics {
        dr_perfect_channel: 0.5 * math::log2(1.0 + v_m / (1.0 + d)),
        rr_strong_mod: -0.5 * math::log2((1.0 - eta) * (1.0 + d * eta)),
        sq_over_coh: -0.5 * math::log2(1.0 + d * eta),
        correlation_advantage: 0.5 * math::log2((1.0 + v_m + d) / (v_m + v_s / (eta_e + v_s - eta_e * v_s))),
    })
}
