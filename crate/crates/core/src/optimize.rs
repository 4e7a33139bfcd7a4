//! One-dimensional maximisation and root finding over protocol parameters.
//!
//! Maximisation is a coarse scan followed by golden-section refinement around
//! the best scan point; roots come from plain bisection. Both are
//! deterministic.

use crate::error::{ensure, Error};
use crate::keyrate::key_rate;
use crate::math;
use crate::scenario::{ChannelModel, MultimodeLeakageScenario, ProtocolChoice, Scenario};
use crate::Result;

pub const VM_BRACKET: (f64, f64) = (1e-3, 1e3);
pub const VM_TOLERANCE: f64 = 1e-4;
pub const V_S_MIN: f64 = 1e-3;
pub const V_S_TOLERANCE: f64 = 1e-5;
pub const DISTANCE_CAP_KM: f64 = 500.0;
pub const DISTANCE_TOLERANCE_KM: f64 = 0.01;
pub const K_CAP: f64 = 100.0;
pub const K_TOLERANCE: f64 = 1e-4;
/// Modulation used for the strong-modulation analytic track.
pub const STRONG_MODULATION: f64 = 1e6;

const SCAN_POINTS: usize = 16;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizationResult {
    /// Arg-max (or root).
    pub argument: f64,
    /// Objective at `argument`.
    pub value: f64,
    pub iterations: usize,
    /// Final bracket, in the same units as `argument`.
    pub bracket: (f64, f64),
    pub converged: bool,
    /// Inner optimum of the modulation variance, when one was run.
    pub v_m: Option<f64>,
}

fn golden_mapped<F>(mut f: F, lo: f64, hi: f64, tol: f64, map: fn(f64) -> f64) -> Result<OptimizationResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    ensure(lo < hi, "bracket", hi - lo, "lower < upper")?;
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let mut best = (lo, f64::NEG_INFINITY);
    let mut best_i = 0;
    for i in 0..SCAN_POINTS {
        let x = if i == SCAN_POINTS - 1 { hi } else { lo + step * i as f64 };
        let y = f(x)?;
        if y > best.1 {
            best = (x, y);
            best_i = i;
        }
    }
    let mut a = if best_i == 0 { lo } else { lo + step * (best_i - 1) as f64 };
    let mut b = if best_i + 1 >= SCAN_POINTS { hi } else { lo + step * (best_i + 1) as f64 };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    let mut iterations = SCAN_POINTS + 2;
    while map(b) - map(a) > tol && iterations < 10_000 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
        iterations += 1;
    }
    for (x, y) in [(c, fc), (d, fd)] {
        if y > best.1 {
            best = (x, y);
        }
    }
    Ok(OptimizationResult {
        argument: map(best.0),
        value: best.1,
        iterations,
        bracket: (map(a), map(b)),
        converged: map(b) - map(a) <= tol,
        v_m: None,
    })
}

fn identity(x: f64) -> f64 {
    x
}

/// Maximises `f` over `[lo, hi]` to absolute tolerance `tol` in `x`.
/// Endpoints are always evaluated, so monotone objectives return an edge.
pub fn golden_section_max<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<OptimizationResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    golden_mapped(f, lo, hi, tol, identity)
}

/// As [`golden_section_max`] but searching `ln x`; `tol` still applies to `x`.
pub fn golden_section_max_log<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<OptimizationResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    ensure(lo > 0.0, "bracket lower bound", lo, "> 0 on a log scale")?;
    golden_mapped(|u| f(math::exp(u)), math::ln(lo), math::ln(hi), tol, math::exp)
}

/// Root of `f` on `[lo, hi]`, which must have `f(lo) > 0 >= f(hi)` or the
/// reverse.
pub fn bisection<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<OptimizationResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let fa = f(a)?;
    let fb = f(b)?;
    if (fa > 0.0) == (fb > 0.0) {
        return Err(Error::domain("bisection bracket", fb, "sign change between the endpoints"));
    }
    let positive_low = fa > 0.0;
    let mut iterations = 2;
    while b - a > tol && iterations < 10_000 {
        let m = 0.5 * (a + b);
        if (f(m)? > 0.0) == positive_low {
            a = m;
        } else {
            b = m;
        }
        iterations += 1;
    }
    let root = 0.5 * (a + b);
    Ok(OptimizationResult {
        argument: root,
        value: f(root)?,
        iterations: iterations + 1,
        bracket: (a, b),
        converged: b - a <= tol,
        v_m: None,
    })
}

/// How the modulation variance is chosen at each point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VmPolicy {
    Fixed(f64),
    Optimize { bracket: (f64, f64), tol: f64 },
}

impl Default for VmPolicy {
    fn default() -> Self {
        VmPolicy::Optimize {
            bracket: VM_BRACKET,
            tol: VM_TOLERANCE,
        }
    }
}

/// Rate under `policy`, and the modulation variance used.
pub fn rate_with_policy(sc: &Scenario, channel: &ChannelModel, protocol: &ProtocolChoice, policy: VmPolicy) -> Result<(f64, f64)> {
    match policy {
        VmPolicy::Fixed(v_m) => Ok((key_rate(&sc.with_v_m(v_m), channel, protocol)?.rate, v_m)),
        VmPolicy::Optimize { bracket, tol } => {
            let r = optimize_vm_with(sc, channel, protocol, bracket, tol)?;
            Ok((r.value, r.argument))
        }
    }
}

/// Maximises the key rate over `V_M ∈ bracket` (log-scale search, absolute
/// tolerance 1e-4 on `V_M`). All-negative objectives still return their best
/// point.
pub fn optimize_vm(sc: &Scenario, channel: &ChannelModel, protocol: &ProtocolChoice, bracket: (f64, f64)) -> Result<OptimizationResult> {
    optimize_vm_with(sc, channel, protocol, bracket, VM_TOLERANCE)
}

fn optimize_vm_with(sc: &Scenario, channel: &ChannelModel, protocol: &ProtocolChoice, bracket: (f64, f64), tol: f64) -> Result<OptimizationResult> {
    let mut r = golden_section_max_log(
        |v_m| Ok(key_rate(&sc.with_v_m(v_m), channel, protocol)?.rate),
        bracket.0,
        bracket.1,
        tol,
    )?;
    r.v_m = Some(r.argument);
    Ok(r)
}

/// Maximises the key rate over the signal variance `V_S ∈ [1e-3, 1]`, with
/// the modulation variance chosen by `policy` at every trial point.
pub fn optimize_squeezing(sc: &Scenario, channel: &ChannelModel, protocol: &ProtocolChoice, policy: VmPolicy) -> Result<OptimizationResult> {
    let mut inner = None;
    let mut r = golden_section_max(
        |v_s| Ok(rate_with_policy(&sc.with_v_s(v_s), channel, protocol, policy)?.0),
        V_S_MIN,
        1.0,
        V_S_TOLERANCE,
    )?;
    if let VmPolicy::Optimize { .. } = policy {
        let (value, v_m) = rate_with_policy(&sc.with_v_s(r.argument), channel, protocol, policy)?;
        r.value = value;
        inner = Some(v_m);
    } else if let VmPolicy::Fixed(v) = policy {
        inner = Some(v);
    }
    r.v_m = inner;
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistanceOptions {
    pub vm: VmPolicy,
    pub optimize_v_s: bool,
    pub cap_km: f64,
    pub tol_km: f64,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        DistanceOptions {
            vm: VmPolicy::default(),
            optimize_v_s: false,
            cap_km: DISTANCE_CAP_KM,
            tol_km: DISTANCE_TOLERANCE_KM,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecureDistance {
    pub distance_km: f64,
    /// Still secure at the probe cap; `distance_km` is a lower bound.
    pub capped: bool,
    pub insecure_at_contact: bool,
    pub iterations: usize,
}

/// Best rate at distance `d` under `opts`.
pub fn rate_at_distance(
    sc: &Scenario,
    protocol: &ProtocolChoice,
    epsilon: f64,
    attenuation_db_per_km: f64,
    opts: &DistanceOptions,
    d_km: f64,
) -> Result<f64> {
    let channel = ChannelModel::from_distance(d_km, epsilon, attenuation_db_per_km)?;
    if opts.optimize_v_s {
        Ok(optimize_squeezing(sc, &channel, protocol, opts.vm)?.value)
    } else {
        Ok(rate_with_policy(sc, &channel, protocol, opts.vm)?.0)
    }
}

/// Largest distance with a positive (optimised) key rate, by bisection.
///
/// With excess noise a lossless channel has no purification, so the contact
/// probe is taken at `d = tol_km` instead of 0.
pub fn secure_distance(
    sc: &Scenario,
    protocol: &ProtocolChoice,
    epsilon: f64,
    attenuation_db_per_km: f64,
    opts: &DistanceOptions,
) -> Result<SecureDistance> {
    ensure(opts.cap_km > opts.tol_km, "cap_km", opts.cap_km, "> tolerance")?;
    let contact = if epsilon > 0.0 { opts.tol_km } else { 0.0 };
    let f = |d| rate_at_distance(sc, protocol, epsilon, attenuation_db_per_km, opts, d);
    if f(contact)? <= 0.0 {
        return Ok(SecureDistance {
            distance_km: 0.0,
            capped: false,
            insecure_at_contact: true,
            iterations: 1,
        });
    }
    if f(opts.cap_km)? > 0.0 {
        return Ok(SecureDistance {
            distance_km: opts.cap_km,
            capped: true,
            insecure_at_contact: false,
            iterations: 2,
        });
    }
    let r = bisection(f, contact, opts.cap_km, opts.tol_km)?;
    Ok(SecureDistance {
        distance_km: r.argument,
        capped: false,
        insecure_at_contact: false,
        iterations: r.iterations + 2,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KBound {
    Finite(OptimizationResult),
    /// No sign change below the probe cap.
    Unbounded,
}

/// Zero crossing of the key rate in the modulation ratio `k`.
pub fn max_tolerable_k(
    sc: &MultimodeLeakageScenario,
    channel: &ChannelModel,
    protocol: &ProtocolChoice,
    policy: VmPolicy,
) -> Result<KBound> {
    let f = |k: f64| {
        let s = Scenario::Multimode(MultimodeLeakageScenario { k, ..sc.clone() });
        Ok(rate_with_policy(&s, channel, protocol, policy)?.0)
    };
    if f(0.0)? <= 0.0 {
        return Err(Error::Unsupported("key rate is not positive without leakage"));
    }
    if f(K_CAP)? > 0.0 {
        return Ok(KBound::Unbounded);
    }
    Ok(KBound::Finite(bisection(f, 0.0, K_CAP, K_TOLERANCE)?))
}
