use cvleak_core::{Attack, Direction, KeyRateReport};
use serde::Serialize;

/// Flat form of a key-rate report. Rates are reported as computed, negative
/// values included; `secure` is `rate > 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateRecord {
    pub direction: &'static str,
    pub attack: &'static str,
    pub beta: f64,
    pub v_s: f64,
    pub v_m: f64,
    pub i_ab: f64,
    pub eve_information: f64,
    /// Holevo bound; collective attacks only.
    pub chi: Option<f64>,
    pub rate: f64,
    pub secure: bool,
    pub v_b: f64,
    pub v_b_cond_a: f64,
    pub v_b_cond_e: Option<f64>,
    pub v_a_cond_e: Option<f64>,
}

impl RateRecord {
    pub fn new(r: &KeyRateReport, v_s: f64, v_m: f64) -> Self {
        RateRecord {
            direction: match r.direction {
                Direction::Reverse => "reverse",
                Direction::Direct => "direct",
            },
            attack: match r.attack {
                Attack::Individual => "individual",
                Attack::Collective => "collective",
            },
            beta: r.beta,
            v_s,
            v_m,
            i_ab: r.i_ab,
            eve_information: r.eve_information,
            chi: (r.attack == Attack::Collective).then_some(r.eve_information),
            rate: r.rate,
            secure: r.is_secure(),
            v_b: r.v_b,
            v_b_cond_a: r.v_b_cond_a,
            v_b_cond_e: r.v_b_cond_e,
            v_a_cond_e: r.v_a_cond_e,
        }
    }
}

/// Shortest decimal that round-trips; empty for absent values.
pub fn num(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}
