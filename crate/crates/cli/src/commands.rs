use std::io::Write;
use std::path::Path;

use cvleak_core::gaussian::GaussianState;
use cvleak_core::optimize::{max_tolerable_k, optimize_squeezing, optimize_vm, secure_distance, KBound};
use cvleak_core::purification::{build_eb_premod, solve_bloch_messiah};
use cvleak_core::scenario::{build_pm_multimode, build_pm_premod};
use cvleak_core::snapshot::{from_snapshot, to_snapshot};
use cvleak_core::validation::{run_all, CheckOutcome};
use cvleak_core::{ChannelModel, MultimodeLeakageScenario, PremodLeakageScenario, Scenario};
use serde::Serialize;
use serde_json::json;

use crate::config::{Config, OptimizeFlag, OptimizeTarget};
use crate::error::{from_core, CliError, Result};
use crate::report::num;
use crate::sweep::evaluate_rate;
use crate::Format;

fn core(e: cvleak_core::Error) -> CliError {
    from_core("scenario", e)
}

pub fn rate(cfg: &Config, format: Format) -> Result<String> {
    let record = evaluate_rate(cfg, &[])?;
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&record).expect("record serializes") + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.serialize(&record).expect("record serializes");
            Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8"))
        }
    }
}

pub fn optimize(cfg: &Config) -> Result<serde_json::Value> {
    let o = cfg.optimize_settings();
    o.validate()?;
    let sc = cfg.scenario()?;
    let protocol = cfg.protocol()?;
    let value = match o.target {
        OptimizeTarget::VM => {
            let r = optimize_vm(&sc, &cfg.channel()?, &protocol, (o.vm_bracket[0], o.vm_bracket[1])).map_err(core)?;
            let record = evaluate_rate(&cfg.with_parameter(crate::config::Parameter::VM, r.argument)?, &[])?;
            json!({
                "target": "v_m",
                "argument": r.argument,
                "value": r.value,
                "iterations": r.iterations,
                "bracket": [r.bracket.0, r.bracket.1],
                "converged": r.converged,
                "report": record,
            })
        }
        OptimizeTarget::VS => {
            let r = optimize_squeezing(&sc, &cfg.channel()?, &protocol, cfg.vm_policy(o.optimize_vm)).map_err(core)?;
            let mut flags = vec![OptimizeFlag::VS];
            if o.optimize_vm {
                flags.push(OptimizeFlag::VM);
            }
            json!({
                "target": "v_s",
                "argument": r.argument,
                "value": r.value,
                "iterations": r.iterations,
                "bracket": [r.bracket.0, r.bracket.1],
                "converged": r.converged,
                "v_m": r.v_m,
                "report": evaluate_rate(cfg, &flags)?,
            })
        }
        OptimizeTarget::Distance => {
            let opts = cfg.distance_options(o.optimize_vm, o.optimize_v_s);
            let c = &cfg.channel;
            let d = secure_distance(&sc, &protocol, c.epsilon, c.attenuation_db_per_km, &opts).map_err(core)?;
            json!({
                "target": "distance",
                "distance_km": d.distance_km,
                "capped": d.capped,
                "insecure_at_contact": d.insecure_at_contact,
                "secure": d.distance_km > 0.0,
                "iterations": d.iterations,
            })
        }
        OptimizeTarget::K => {
            let Scenario::Multimode(m) = &sc else {
                return Err(CliError::config("optimize.target", "k needs kind = \"multimode\""));
            };
            match max_tolerable_k(m, &cfg.channel()?, &protocol, cfg.vm_policy(o.optimize_vm)).map_err(core)? {
                KBound::Finite(r) => json!({
                    "target": "k",
                    "unbounded": false,
                    "k_max": r.argument,
                    "bracket": [r.bracket.0, r.bracket.1],
                    "iterations": r.iterations,
                    "converged": r.converged,
                }),
                KBound::Unbounded => json!({ "target": "k", "unbounded": true, "k_max": null }),
            }
        }
    };
    Ok(value)
}

const GOLDEN: [(&str, &str); 3] = [
    ("multimode_pm", include_str!("../golden/multimode_pm.snap")),
    ("premod_pm", include_str!("../golden/premod_pm.snap")),
    ("premod_eb_pre_channel", include_str!("../golden/premod_eb_pre_channel.snap")),
];

const GOLDEN_TOLERANCE: f64 = 1e-10;

fn golden_state(name: &str) -> cvleak_core::Result<GaussianState> {
    match name {
        "multimode_pm" => build_pm_multimode(&MultimodeLeakageScenario::symmetric(0.5, 4.0, 1.0), &ChannelModel::pure_loss(0.3)?),
        "premod_pm" => build_pm_premod(&PremodLeakageScenario::new(0.3, 2.0, 0.6), &ChannelModel::pure_loss(0.7)?),
        _ => Ok(build_eb_premod(&PremodLeakageScenario::new(0.3, 2.0, 0.6), &ChannelModel::pure_loss(1.0)?, 0.999, 1e-3)?
            .pre_channel()
            .clone()),
    }
}

/// Relative snapshot difference against the stored golden matrices.
fn golden_checks() -> Vec<CheckOutcome> {
    GOLDEN
        .iter()
        .map(|(name, text)| {
            let compared = from_snapshot(text).and_then(|g| {
                let s = from_snapshot(&to_snapshot(&golden_state(name)?))?;
                if s.labels() != g.labels() {
                    return Err(cvleak_core::Error::Dimension("mode labels differ".into()));
                }
                let scale = g.covariance().max_abs().max(1.0);
                Ok(s.covariance().max_abs_diff(g.covariance()) / scale)
            });
            let name: &'static str = match *name {
                "multimode_pm" => "golden_multimode_pm",
                "premod_pm" => "golden_premod_pm",
                _ => "golden_premod_eb_pre_channel",
            };
            match compared {
                Ok(r) => CheckOutcome {
                    name,
                    residual: r,
                    tolerance: GOLDEN_TOLERANCE,
                    passed: r <= GOLDEN_TOLERANCE,
                    detail: None,
                },
                Err(e) => CheckOutcome {
                    name,
                    residual: f64::INFINITY,
                    tolerance: GOLDEN_TOLERANCE,
                    passed: false,
                    detail: Some(e.to_string()),
                },
            }
        })
        .collect()
}

#[derive(Serialize)]
struct CheckRecord<'a> {
    name: &'a str,
    residual: f64,
    tolerance: f64,
    passed: bool,
    detail: Option<&'a str>,
}

/// Bloch–Messiah parameters over a small grid, as CSV.
pub fn bloch_messiah_csv() -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::io("bloch-messiah table", e.into());
    w.write_record(["k_ratio", "v_s_snu", "v_m_snu", "t1", "t2", "r1", "r2", "v1_snu", "v2_snu", "residual_snu"])
        .map_err(io)?;
    for k in [0.0, 0.5, 1.0, 1.5, 2.0] {
        for v_s in [0.1, 0.3, 0.5, 1.0] {
            for v_m in [1.0, 10.0] {
                let s = solve_bloch_messiah(k, v_s, v_m).map_err(core)?;
                let row: Vec<String> = [k, v_s, v_m, s.t1, s.t2, s.r1, s.r2, s.v1, s.v2, s.residual]
                    .iter()
                    .map(|v| num(Some(*v)))
                    .collect();
                w.write_record(&row).map_err(io)?;
            }
        }
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8"))
}

/// Runs every cross-check, prints one line each, and optionally writes the
/// Bloch–Messiah table to `table`.
pub fn validate<W: Write>(out: &mut W, format: Format, table: Option<&Path>) -> Result<()> {
    let mut checks = run_all();
    checks.extend(golden_checks());
    let io = |e: std::io::Error| CliError::io("stdout", e);
    match format {
        Format::Json => {
            let records: Vec<CheckRecord> = checks
                .iter()
                .map(|c| CheckRecord {
                    name: c.name,
                    residual: c.residual,
                    tolerance: c.tolerance,
                    passed: c.passed,
                    detail: c.detail.as_deref(),
                })
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&records).expect("records serialize")).map_err(io)?;
        }
        Format::Csv => {
            for c in &checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                write!(out, "{status} {:<30} residual {:.3e} tolerance {:.0e}", c.name, c.residual, c.tolerance).map_err(io)?;
                if let Some(d) = &c.detail {
                    write!(out, " ({d})").map_err(io)?;
                }
                writeln!(out).map_err(io)?;
            }
            let passed = checks.iter().filter(|c| c.passed).count();
            writeln!(out, "{passed}/{} checks passed", checks.len()).map_err(io)?;
        }
    }
    if let Some(path) = table {
        std::fs::write(path, bloch_messiah_csv()?).map_err(|e| CliError::io(path, e))?;
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(failed.join(", ")))
    }
}
