use anyhow::{bail, Result};
use epigeom::renyi::{renyi_entropies, renyi_monte_carlo};
use rayon::prelude::*;

use super::Outcome;
use crate::args::EntropyArgs;
use crate::output::{fmt_f64, Session};

pub fn run(session: &mut Session, a: &EntropyArgs, seed: u64) -> Result<Outcome> {
    let f = session.load_density(&a.density)?;
    let rows = match a.samples {
        Some(0) => bail!("--samples must be positive"),
        Some(n) => session.time("entropy", || {
            a.p.par_iter().map(|p| renyi_monte_carlo(&f, *p, n, seed)).collect::<Result<Vec<_>, _>>()
        })?,
        None => session.time("entropy", || renyi_entropies(&f, &a.p))?,
    };
    let mut text = String::from("p,h_p,N_p,method,error_estimate\n");
    for r in rows {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(r.p),
            fmt_f64(r.h_p),
            fmt_f64(r.n_p),
            r.method.as_str(),
            fmt_f64(r.error_estimate)
        ));
    }
    session.emit(a.out.as_deref(), &text)?;
    Ok(Outcome::Pass)
}
