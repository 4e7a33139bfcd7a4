//! Grid evaluation. Points are evaluated on a bounded worker pool and written
//! back in axis order, so output does not depend on the worker count.

use std::io::Write;

use cvleak_core::key_rate;
use cvleak_core::optimize::{optimize_squeezing, rate_with_policy, secure_distance};
use rayon::prelude::*;

use crate::config::{Config, OptimizeFlag, Quantity, SweepConfig};
use crate::error::{from_core, CliError, Result};
use crate::report::{num, RateRecord};

/// Key rate at one configuration, with `V_M` and/or `V_S` optimised first.
pub fn evaluate_rate(cfg: &Config, flags: &[OptimizeFlag]) -> Result<RateRecord> {
    let sc = cfg.scenario()?;
    let ch = cfg.channel()?;
    let protocol = cfg.protocol()?;
    let policy = cfg.vm_policy(flags.contains(&OptimizeFlag::VM));
    let core = |e| from_core("scenario", e);
    let (v_s, v_m) = if flags.contains(&OptimizeFlag::VS) {
        let r = optimize_squeezing(&sc, &ch, &protocol, policy).map_err(core)?;
        (r.argument, r.v_m.unwrap_or(sc.v_m()))
    } else {
        let (_, v_m) = rate_with_policy(&sc, &ch, &protocol, policy).map_err(core)?;
        (sc.v_s(), v_m)
    };
    let report = key_rate(&sc.with_v_s(v_s).with_v_m(v_m), &ch, &protocol).map_err(core)?;
    Ok(RateRecord::new(&report, v_s, v_m))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Row {
    Rate { x: f64, record: RateRecord },
    Distance { x: f64, distance_km: f64, capped: bool, insecure_at_contact: bool },
}

fn evaluate_point(cfg: &Config, spec: &SweepConfig, x: f64) -> Result<Row> {
    let point = cfg.with_parameter(spec.parameter, x)?;
    match spec.quantity {
        Quantity::Distance => {
            let opts = point.distance_options(
                spec.optimize.contains(&OptimizeFlag::VM),
                spec.optimize.contains(&OptimizeFlag::VS),
            );
            let sc = point.scenario()?;
            let c = &point.channel;
            let d = secure_distance(&sc, &point.protocol()?, c.epsilon, c.attenuation_db_per_km, &opts)
                .map_err(|e| from_core("scenario", e))?;
            Ok(Row::Distance {
                x,
                distance_km: d.distance_km,
                capped: d.capped,
                insecure_at_contact: d.insecure_at_contact,
            })
        }
        _ => Ok(Row::Rate {
            x,
            record: evaluate_rate(&point, &spec.optimize)?,
        }),
    }
}

/// Evaluates every grid point of `cfg.sweep` on `workers` threads.
pub fn run(cfg: &Config, workers: usize) -> Result<Vec<Row>> {
    let spec = cfg.sweep.as_ref().ok_or_else(|| CliError::config("sweep", "missing [sweep] section"))?;
    spec.validate(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::config("workers", e.to_string()))?;
    let points = spec.points();
    let rows: Vec<Result<Row>> = pool.install(|| points.par_iter().map(|&x| evaluate_point(cfg, spec, x)).collect());
    rows.into_iter().collect()
}

fn rate_columns(spec: &SweepConfig) -> Vec<&'static str> {
    let mut cols = match spec.quantity {
        Quantity::Rate | Quantity::Distance => vec!["rate_bits_per_use", "i_ab_bits_per_use", "eve_information_bits_per_use"],
        Quantity::IAb => vec!["i_ab_bits_per_use", "rate_bits_per_use", "eve_information_bits_per_use"],
        Quantity::Chi => vec!["eve_information_bits_per_use", "rate_bits_per_use", "i_ab_bits_per_use"],
    };
    cols.push("secure");
    if spec.optimize.contains(&OptimizeFlag::VM) {
        cols.push("v_m_opt_snu");
    }
    if spec.optimize.contains(&OptimizeFlag::VS) {
        cols.push("v_s_opt_snu");
    }
    cols
}

/// Writes the sweep as CSV with a unit-suffixed header.
pub fn write_csv<W: Write>(out: W, spec: &SweepConfig, rows: &[Row]) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![spec.parameter.header()];
    if spec.quantity == Quantity::Distance {
        header.extend(["distance_km", "capped", "insecure_at_contact", "secure"]);
    } else {
        header.extend(rate_columns(spec));
    }
    w.write_record(&header)?;
    for row in rows {
        match row {
            Row::Rate { x, record } => {
                let mut fields = vec![num(Some(*x))];
                for col in rate_columns(spec) {
                    fields.push(match col {
                        "rate_bits_per_use" => num(Some(record.rate)),
                        "i_ab_bits_per_use" => num(Some(record.i_ab)),
                        "eve_information_bits_per_use" => num(Some(record.eve_information)),
                        "secure" => record.secure.to_string(),
                        "v_m_opt_snu" => num(Some(record.v_m)),
                        _ => num(Some(record.v_s)),
                    });
                }
                w.write_record(&fields)?;
            }
            Row::Distance {
                x,
                distance_km,
                capped,
                insecure_at_contact,
            } => {
                w.write_record([
                    num(Some(*x)),
                    num(Some(*distance_km)),
                    capped.to_string(),
                    insecure_at_contact.to_string(),
                    (*distance_km > 0.0).to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Rows as JSON objects keyed like the CSV header.
pub fn to_json(spec: &SweepConfig, rows: &[Row]) -> serde_json::Value {
    let axis = spec.parameter.header();
    let items = rows
        .iter()
        .map(|row| match row {
            Row::Rate { x, record } => serde_json::json!({ axis: x, "report": record }),
            Row::Distance {
                x,
                distance_km,
                capped,
                insecure_at_contact,
            } => serde_json::json!({
                axis: x,
                "distance_km": distance_km,
                "capped": capped,
                "insecure_at_contact": insecure_at_contact,
                "secure": *distance_km > 0.0,
            }),
        })
        .collect();
    serde_json::Value::Array(items)
}
