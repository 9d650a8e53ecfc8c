use anyhow::{bail, Context, Result};
use epigeom::exponent::alpha;
use epigeom::verify::{
    balancing_lambda, check_cminus1, check_entropy_convexity, check_epi, check_identity_c1, check_identity_rp,
    check_linearized, check_reverse_epi, convexity_certificate, dct_lower_check,
};
use epigeom::{CheckReport, DensitySpec, JointDensity2D, StarBody};
use serde_json::json;

use super::{direction_set, Outcome};
use crate::args::{CheckArgs, CheckKind};
use crate::output::{to_json, Session};

/// Points of the default λ sweep.
const SWEEP_POINTS: usize = 21;

fn sweep(lambdas: &[f64]) -> Vec<f64> {
    if lambdas.is_empty() {
        (0..SWEEP_POINTS).map(|k| k as f64 / (SWEEP_POINTS - 1) as f64).collect()
    } else {
        lambdas.to_vec()
    }
}

fn load_body(session: &mut Session, a: &CheckArgs) -> Result<StarBody> {
    let path = a.body.as_ref().context("--body is required for `check convexity`")?;
    let text = std::fs::read_to_string(path).with_context(|| format!("{}: cannot read", path.display()))?;
    let raw: StarBody =
        serde_json::from_str(&text).with_context(|| format!("{}: malformed star body", path.display()))?;
    let body = StarBody::new(raw.directions, raw.radii, raw.label, raw.symmetric)
        .with_context(|| format!("{}", path.display()))?;
    session.record_input(serde_json::to_value(&body)?);
    Ok(body)
}

pub fn run(session: &mut Session, a: &CheckArgs) -> Result<Outcome> {
    let density = |session: &mut Session| -> Result<DensitySpec> {
        let path = a.density.as_ref().context("--density is required for this check")?;
        session.load_density(path)
    };
    // Unproven cases are reported but never fail the run.
    let mut asserting = true;
    let reports: Vec<CheckReport> = match a.kind {
        CheckKind::Epi | CheckKind::Linearized | CheckKind::DctLower => {
            let fx = density(session)?;
            let fy = match &a.density2 {
                Some(path) => session.load_density(path)?,
                None => fx.clone(),
            };
            match a.kind {
                CheckKind::Epi => {
                    let p = a.p.unwrap_or(2.0);
                    let al = match a.alpha {
                        Some(x) => x,
                        None => alpha(p)?,
                    };
                    let r = session.time("epi", || check_epi(&fx, &fy, p, al))?;
                    let balance = balancing_lambda(&fx, &fy, p, al)?;
                    let details = match r.details.clone() {
                        serde_json::Value::Object(mut m) => {
                            m.insert("balancing".into(), json!(balance));
                            serde_json::Value::Object(m)
                        }
                        other => other,
                    };
                    vec![r.with_details(details)]
                }
                CheckKind::Linearized => {
                    let p = a.p.unwrap_or(2.0);
                    let al = match a.alpha {
                        Some(x) => x,
                        None => alpha(p)?,
                    };
                    let lambdas = sweep(&a.lambda);
                    session.time("linearized", || {
                        lambdas.iter().map(|l| check_linearized(&fx, &fy, p, al, *l)).collect::<Result<Vec<_>, _>>()
                    })?
                }
                _ => {
                    let lambdas = if a.lambda.is_empty() { vec![0.5] } else { a.lambda.clone() };
                    session.time("dct-lower", || {
                        lambdas.iter().map(|l| dct_lower_check(&fx, &fy, *l)).collect::<Result<Vec<_>, _>>()
                    })?
                }
            }
        }
        CheckKind::ReverseEpi => {
            let joint = JointDensity2D::new(density(session)?)?;
            let p = a.p.unwrap_or(2.0);
            asserting = p == 0.0 || p == 2.0;
            vec![session.time("reverse-epi", || check_reverse_epi(&joint, p))?]
        }
        CheckKind::EntropyConvexity => {
            let joint = JointDensity2D::new(density(session)?)?;
            asserting = false;
            let lambdas = sweep(&a.lambda);
            vec![session.time("entropy-convexity", || check_entropy_convexity(&joint, a.p.unwrap_or(2.0), &lambdas))?]
        }
        CheckKind::IdentityC1 | CheckKind::IdentityRp | CheckKind::IdentityCminus1 => {
            let f = density(session)?;
            let set = direction_set(f.dim(), a.directions)?;
            session.set_directions(set.len());
            vec![match a.kind {
                CheckKind::IdentityC1 => session.time("identity-c1", || check_identity_c1(&f, set))?,
                CheckKind::IdentityRp => {
                    let p = a.p.unwrap_or(1.0);
                    session.time("identity-rp", || check_identity_rp(&f, p, set))?
                }
                _ => session.time("identity-cminus1", || check_cminus1(&f, set))?,
            }]
        }
        CheckKind::Convexity => {
            let body = load_body(session, a)?;
            vec![session.time("convexity", || convexity_certificate(&body))?]
        }
    };
    let reports: Vec<CheckReport> = match a.tolerance {
        Some(t) if !(t >= 0.0) => bail!("--tolerance must be non-negative"),
        Some(t) => reports.into_iter().map(|r| r.with_tolerance(t)).collect(),
        None => reports,
    };
    let text = if reports.len() == 1 { to_json(&reports[0])? } else { to_json(&reports)? };
    session.emit(a.out.as_deref(), &text)?;
    Ok(if asserting { Outcome::from_verdicts(reports.iter().map(|r| &r.verdict)) } else { Outcome::Pass })
}
