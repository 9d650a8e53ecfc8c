use anyhow::{bail, Result};
use epigeom::exponent::comparison_bounds;
use rayon::prelude::*;
use serde_json::json;

use super::Outcome;
use crate::args::{AlphaArgs, Format};
use crate::output::{fmt_f64, to_json, Session};

pub fn orders(a: &AlphaArgs) -> Result<Vec<f64>> {
    if !(a.p_min > 1.0 && a.p_max >= a.p_min && a.p_max.is_finite()) {
        bail!("need 1 < p-min <= p-max < ∞, got p-min {} and p-max {}", a.p_min, a.p_max);
    }
    if a.steps == 0 {
        bail!("--steps must be at least 1");
    }
    if a.steps == 1 {
        return Ok(vec![a.p_min]);
    }
    let t = |i: usize| i as f64 / (a.steps - 1) as f64;
    Ok((0..a.steps)
        .map(|i| if a.log { a.p_min * (a.p_max / a.p_min).powf(t(i)) } else { a.p_min + (a.p_max - a.p_min) * t(i) })
        .collect())
}

pub fn run(session: &mut Session, a: &AlphaArgs) -> Result<Outcome> {
    let ps = orders(a)?;
    let rows = session.time("alpha", || ps.par_iter().map(|p| comparison_bounds(*p)).collect::<Result<Vec<_>, _>>())?;
    let text = match a.format {
        Format::Csv => {
            let mut s = String::from("p,alpha,alpha_opt,bm16,lower_bound,argmax_lambda\n");
            for r in &rows {
                let cells = [r.p, r.alpha_closed, r.alpha_opt, r.bm16, r.lower_bound, r.argmax_lambda];
                s.push_str(&cells.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => to_json(
            &rows
                .iter()
                .map(|r| {
                    json!({
                        "p": r.p,
                        "alpha": r.alpha_closed,
                        "alpha_opt": r.alpha_opt,
                        "bm16": r.bm16,
                        "lower_bound": r.lower_bound,
                        "argmax_lambda": r.argmax_lambda,
                    })
                })
                .collect::<Vec<_>>(),
        )?,
    };
    session.emit(a.out.as_deref(), &text)?;
    Ok(Outcome::Pass)
}
