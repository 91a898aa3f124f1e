//! CSV serialization and replay audit of iterate records.

use std::io::Write;

use crate::error::{Error, Result};

use super::params::TrParams;
use super::state::{IterateRecord, StepKind};
use super::step::update_radius;

pub const CSV_HEADER: &str =
    "k,f,norm_g,psi,delta,rho,step_kind,bundle_size,wall_ms,pred_decrease,cauchy_bound,refined";

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

pub fn write_csv<W: Write>(records: &[IterateRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.k,
            real(r.f),
            real(r.norm_g),
            opt_real(r.psi),
            real(r.delta),
            opt_real(r.rho),
            r.step_kind.as_str(),
            r.bundle_size.map(|b| b.to_string()).unwrap_or_default(),
            real(r.wall_ms),
            opt_real(r.pred_decrease),
            opt_real(r.cauchy_bound),
            u8::from(r.refined),
        )?;
    }
    Ok(())
}

pub fn to_csv_string(records: &[IterateRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("ascii output")
}

pub fn parse_csv(text: &str) -> Result<Vec<IterateRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => return Err(Error::Parse(format!("unexpected header {other:?}"))),
    }
    let mut out = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(Error::Parse(format!(
                "line {}: expected 12 fields, found {}",
                lineno + 2,
                fields.len()
            )));
        }
        let bad =
            |what: &str, v: &str| Error::Parse(format!("line {}: bad {what} '{v}'", lineno + 2));
        let f64_of =
            |i: usize, what: &str| fields[i].parse::<f64>().map_err(|_| bad(what, fields[i]));
        let opt_f64 = |i: usize, what: &str| -> Result<Option<f64>> {
            if fields[i].is_empty() {
                Ok(None)
            } else {
                f64_of(i, what).map(Some)
            }
        };
        out.push(IterateRecord {
            k: fields[0].parse().map_err(|_| bad("k", fields[0]))?,
            f: f64_of(1, "f")?,
            norm_g: f64_of(2, "norm_g")?,
            psi: opt_f64(3, "psi")?,
            delta: f64_of(4, "delta")?,
            rho: opt_f64(5, "rho")?,
            step_kind: StepKind::parse(fields[6]).ok_or_else(|| bad("step_kind", fields[6]))?,
            bundle_size: if fields[7].is_empty() {
                None
            } else {
                Some(
                    fields[7]
                        .parse()
                        .map_err(|_| bad("bundle_size", fields[7]))?,
                )
            },
            wall_ms: f64_of(8, "wall_ms")?,
            pred_decrease: opt_f64(9, "pred_decrease")?,
            cauchy_bound: opt_f64(10, "cauchy_bound")?,
            refined: match fields[11] {
                "0" => false,
                "1" => true,
                v => return Err(bad("refined", v)),
            },
        });
    }
    Ok(out)
}

/// Replays the update table and the decrease inequalities over a log.
/// Returns one message per violation.
pub fn audit_records(records: &[IterateRecord], params: &TrParams) -> Vec<String> {
    let mut issues = Vec::new();
    for (i, r) in records.iter().enumerate() {
        if let (Some(pred), Some(bound)) = (r.pred_decrease, r.cauchy_bound) {
            if pred < bound * (1.0 - 1e-12) {
                issues.push(format!(
                    "k={}: decrease {pred:e} below bound {bound:e}",
                    r.k
                ));
            }
        }
        if let (Some(psi), Some(rho)) = (r.psi, r.rho) {
            if psi <= r.norm_g * r.delta && rho != 0.0 {
                issues.push(format!(
                    "k={}: rho {rho} should be 0 (psi <= |g| delta)",
                    r.k
                ));
            }
        }
        if let Some(rho) = r.rho {
            let null = rho <= params.eta1;
            let expected = if null {
                StepKind::Null
            } else {
                StepKind::Successful
            };
            if r.step_kind != expected {
                issues.push(format!(
                    "k={}: step kind {:?} inconsistent with rho {rho}",
                    r.k, r.step_kind
                ));
            }
        }
        let Some(next) = records.get(i + 1) else {
            continue;
        };
        if next.k != r.k + 1 {
            issues.push(format!("k={}: next record has k={}", r.k, next.k));
        }
        match r.rho {
            Some(rho) => {
                let want = update_radius(r.delta, rho, params);
                if next.delta != want {
                    issues.push(format!(
                        "k={}: radius {:e} does not follow the update table ({want:e})",
                        r.k, next.delta
                    ));
                }
                if !next.refined {
                    if next.f > r.f {
                        issues.push(format!("k={}: f increased {} -> {}", r.k, r.f, next.f));
                    }
                    if r.step_kind == StepKind::Null && next.f != r.f {
                        issues.push(format!("k={}: null step changed f", r.k));
                    }
                }
            }
            None => issues.push(format!("k={}: record without rho is not the last", r.k)),
        }
    }
    issues
}
