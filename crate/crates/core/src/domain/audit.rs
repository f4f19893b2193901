use serde::Serialize;

use super::sample::sample;
use super::ResidueDomain;
use crate::error::{Error, Result};
use crate::padic::{gamma_exponent, Extension};
use crate::report::{par_map, sub_seed, Verdict};
use crate::series::{AdicSeries, ModelPoint};

#[derive(Debug, Clone)]
pub struct AuditOptions {
    pub samples_per_ext: usize,
    pub seed: u64,
    pub single_thread: bool,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            samples_per_ext: 50,
            seed: 0,
            single_thread: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditWitness {
    pub point: Vec<String>,
    pub value: String,
    pub residue: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionAudit {
    pub e_rel: usize,
    pub f_rel: usize,
    pub gamma: u32,
    pub sampled: usize,
    pub center_residue: Option<String>,
    pub failures: Vec<AuditWitness>,
    pub undecided: usize,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FunctionAuditReport {
    pub verdict: Verdict,
    pub n: u32,
    pub precision: u32,
    pub extensions: Vec<ExtensionAudit>,
}

enum Outcome {
    Agree,
    Differ(AuditWitness),
    Undecided,
}

/// Samples the domain over each extension and compares f(y) with f(x)
/// modulo π_E^γ, γ = γ_{E/L}(n).
pub fn pointwise_constancy_audit(
    f: &AdicSeries,
    domain: &ResidueDomain,
    n: u32,
    extensions: &[Extension],
    opts: &AuditOptions,
) -> Result<FunctionAuditReport> {
    if **f.model() != **domain.model() {
        return Err(Error::arg("series and domain live on different models"));
    }
    let mut reports = Vec::new();
    for (ei, ext) in extensions.iter().enumerate() {
        let gamma = gamma_exponent(ext.e_rel() as u32, n)?;
        let mut rep = ExtensionAudit {
            e_rel: ext.e_rel(),
            f_rel: ext.f_rel(),
            gamma,
            sampled: 0,
            center_residue: None,
            failures: Vec::new(),
            undecided: 0,
            diagnostics: Vec::new(),
        };
        let ev = f.evaluator(ext)?;
        let center = domain.center().base_change(ext)?;
        let fx = match ev.eval(&center) {
            Ok(v) if v.precision() >= gamma => v.reduce_mod(gamma)?,
            Ok(_) | Err(Error::Precision { .. }) => {
                rep.diagnostics.push("value at the center is not known to γ digits".into());
                rep.undecided += 1;
                reports.push(rep);
                continue;
            }
            Err(e) => return Err(e),
        };
        rep.center_residue = Some(fx.to_string());
        let s = sample(domain, ext, opts.samples_per_ext, sub_seed(opts.seed, ei as u64, 0))?;
        rep.diagnostics.extend(s.diagnostics);
        rep.sampled = s.points.len();
        let outcomes = par_map(s.points, opts.single_thread, |y: ModelPoint| -> Result<Outcome> {
            let v = match ev.eval(&y) {
                Ok(v) => v,
                Err(Error::Precision { .. }) => return Ok(Outcome::Undecided),
                Err(e) => return Err(e),
            };
            if v.precision() < gamma {
                return Ok(Outcome::Undecided);
            }
            let r = v.reduce_mod(gamma)?;
            if r == fx {
                Ok(Outcome::Agree)
            } else {
                Ok(Outcome::Differ(AuditWitness {
                    point: y.coords().iter().map(|c| c.to_string()).collect(),
                    value: v.to_string(),
                    residue: r.to_string(),
                }))
            }
        });
        for o in outcomes {
            match o? {
                Outcome::Agree => {}
                Outcome::Differ(w) => rep.failures.push(w),
                Outcome::Undecided => rep.undecided += 1,
            }
        }
        reports.push(rep);
    }
    let verdict = Verdict::all(reports.iter().map(|r| {
        if !r.failures.is_empty() {
            Verdict::Fail
        } else if r.undecided > 0 || r.sampled == 0 {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        }
    }));
    Ok(FunctionAuditReport {
        verdict,
        n,
        precision: f.precision(),
        extensions: reports,
    })
}

#[cfg(test)]
mod tests {
    use super::super::describe;
    use super::*;
    use crate::padic::{PadicContext, PadicElement};
    use crate::series::{AlgebraModel, NeighborhoodKind};

    #[test]
    fn identity_function_audits() {
        let ctx = PadicContext::qp(5, 10).unwrap();
        let disc = AlgebraModel::disc(&ctx, &[], &["T"], 8).unwrap();
        let t = AdicSeries::var(&disc, "T").unwrap();
        let x = ModelPoint::rational(&disc, vec![PadicElement::from_int(&ctx, 5)]).unwrap();
        let exts = vec![Extension::trivial(&ctx), Extension::build(&ctx, 3, 1).unwrap()];
        for n in 1..=3 {
            let dom = describe(&disc, &x, n, NeighborhoodKind::WideOpen).unwrap();
            let r = pointwise_constancy_audit(&t, &dom, n, &exts, &AuditOptions::default()).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        }
    }

    #[test]
    fn closed_disc_audit() {
        // bounded variable: the closed unit disc, with 0 and 1 both present
        let ctx = PadicContext::qp(5, 6).unwrap();
        let disc = AlgebraModel::disc(&ctx, &["T"], &[], 0).unwrap();
        let t = AdicSeries::var(&disc, "T").unwrap();
        let x = ModelPoint::rational(&disc, vec![PadicElement::zero(&ctx)]).unwrap();
        let dom = describe(&disc, &x, 1, NeighborhoodKind::Affinoid).unwrap();
        // V^(1) at 0 is v(T) ≥ 1; the audit of T passes at level 1
        let exts = vec![Extension::trivial(&ctx)];
        let r = pointwise_constancy_audit(&t, &dom, 1, &exts, &AuditOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let one = ModelPoint::rational(&disc, vec![PadicElement::one(&ctx)]).unwrap();
        assert!(!dom.member(&one).unwrap());
        assert_ne!(
            t.evaluate(&one).unwrap().reduce_mod(1).unwrap(),
            t.evaluate(&x).unwrap().reduce_mod(1).unwrap()
        );
    }
}
