use serde::Serialize;

use super::{monomials_up_to, RepFamily};
use crate::error::Result;
use crate::lattice::matrix_strings;
use crate::linalg::{ChainRing, Matrix};
use crate::padic::PadicElement;
use crate::series::{AdicSeries, Mono, NeighborhoodKind, Substitution, VarKind};

#[derive(Debug, Clone, Default)]
pub struct StrictOptions {
    /// Degree budget of the conjugacy-aware test; None runs only the
    /// entrywise test.
    pub conjugacy_degree: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryWitness {
    pub generator: String,
    pub row: usize,
    pub col: usize,
    pub monomial: String,
    pub valuation: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugacyCheck {
    /// A basis change C with C(x) = 1 making every image constant was found.
    pub found: bool,
    pub degree_budget: u32,
    pub unknowns: usize,
    pub equations: usize,
    pub constant_matrices: Option<Vec<Vec<Vec<String>>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StrictReport {
    pub constant: bool,
    pub entrywise: bool,
    pub n: u32,
    pub kind: NeighborhoodKind,
    pub precision: u32,
    pub degree_cap: u32,
    pub witness: Option<EntryWitness>,
    /// Constant terms mod π^n of the recentered images.
    pub constant_matrices: Option<Vec<Vec<Vec<String>>>>,
    pub conjugacy: Option<ConjugacyCheck>,
}

/// Recenters every matrix entry around `center` (scale of U^(n) or V^(n))
/// and tests constancy mod π^n.
pub fn strict_constancy_check(
    fam: &RepFamily,
    center: &[PadicElement],
    n: u32,
    kind: NeighborhoodKind,
    opts: &StrictOptions,
) -> Result<StrictReport> {
    let sub = Substitution::new(fam.model(), center, kind.scale(n), kind, None)?;
    let recentered: Vec<Matrix<AdicSeries>> = fam
        .gen_images()
        .iter()
        .map(|g| g.try_map(|s| sub.apply(s)))
        .collect::<Result<_>>()?;
    let mut report = StrictReport {
        constant: true,
        entrywise: true,
        n,
        kind,
        precision: recentered
            .iter()
            .flat_map(|g| g.entries().iter().map(|s| s.precision()))
            .min()
            .unwrap_or(0),
        degree_cap: sub.target().degree_cap(),
        witness: None,
        constant_matrices: None,
        conjugacy: None,
    };
    'outer: for (gi, g) in recentered.iter().enumerate() {
        for r in 0..fam.dim() {
            for c in 0..fam.dim() {
                let v = g.get(r, c).is_constant_mod(n)?;
                if let Some(w) = v.witness {
                    report.entrywise = false;
                    report.witness = Some(EntryWitness {
                        generator: fam.group().generators()[gi].clone(),
                        row: r,
                        col: c,
                        monomial: w.monomial,
                        valuation: w.valuation,
                    });
                    break 'outer;
                }
            }
        }
    }
    let constants: Vec<Matrix<PadicElement>> = recentered
        .iter()
        .map(|g| g.map(|s| s.constant_term().truncate(n)))
        .collect();
    if report.entrywise {
        report.constant_matrices = Some(constants.iter().map(matrix_strings).collect());
        return Ok(report);
    }
    report.constant = false;
    if let Some(budget) = opts.conjugacy_degree {
        let check = conjugacy_check(&recentered, &constants, n, budget)?;
        report.constant = check.found;
        report.conjugacy = Some(check);
    }
    Ok(report)
}

/// Solves C·ρ'(g) = M_g·C over the truncated algebra mod (π^n, degree >
/// budget) with C = 1 + (terms of positive degree), M_g = ρ'(g)(0).
fn conjugacy_check(rho: &[Matrix<AdicSeries>], consts: &[Matrix<PadicElement>], n: u32, budget: u32) -> Result<ConjugacyCheck> {
    let model = rho[0].get(0, 0).model().clone();
    let ring = ChainRing::new(model.base(), n)?;
    let d = rho[0].rows();
    let budget = if model.kinds().contains(&VarKind::Open) {
        budget.min(model.degree_cap())
    } else {
        budget
    };
    let mons = monomials_up_to(model.nvars(), budget);
    let nz: Vec<&Mono> = mons.iter().skip(1).collect();
    let nm = nz.len();
    let unknown = |i: usize, k: usize, mu: usize| (i * d + k) * nm + mu;
    let cols = d * d * nm;
    let mut rows: Vec<Vec<PadicElement>> = Vec::new();
    let mut rhs: Vec<PadicElement> = Vec::new();
    for (g, m) in rho.iter().zip(consts) {
        for i in 0..d {
            for j in 0..d {
                for (nu_i, nu) in nz.iter().enumerate() {
                    let mut row = vec![ring.zero(); cols];
                    for k in 0..d {
                        for (mu_i, mu) in nz.iter().enumerate() {
                            if mu.iter().zip(nu.iter()).any(|(a, b)| a > b) {
                                continue;
                            }
                            let lam: Mono = nu.iter().zip(mu.iter()).map(|(b, a)| b - a).collect();
                            let c = g.get(k, j).coefficient(&lam);
                            let idx = unknown(i, k, mu_i);
                            row[idx] = ring.reduce(&(&row[idx] + &c))?;
                        }
                        let idx = unknown(k, j, nu_i);
                        row[idx] = ring.reduce(&(&row[idx] - m.get(i, k)))?;
                    }
                    rows.push(row);
                    rhs.push(ring.reduce(&-g.get(i, j).coefficient(nu))?);
                }
            }
        }
    }
    let equations = rows.len();
    let found = if cols == 0 {
        rhs.iter().all(|x| x.is_zero())
    } else {
        ring.solve(&Matrix::from_rows(rows), &rhs)?.is_some()
    };
    Ok(ConjugacyCheck {
        found,
        degree_budget: budget,
        unknowns: cols,
        equations,
        constant_matrices: found.then(|| consts.iter().map(matrix_strings).collect()),
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::tests::one_plus_t;
    use super::*;
    use crate::group::GroupPresentation;
    use crate::series::{parse_series, AlgebraModel};
    use crate::padic::PadicContext;

    #[test]
    fn one_plus_t_levels() {
        let fam = one_plus_t(3, 10, 8, "1+T");
        let ctx = fam.model().base().clone();
        let t0 = PadicElement::from_int(&ctx, 3);
        for n in 1..=3 {
            let r = strict_constancy_check(&fam, &[t0.clone()], n, NeighborhoodKind::Affinoid, &StrictOptions::default()).unwrap();
            assert!(r.constant, "n = {n}");
            let want = PadicElement::from_int(&ctx, 4).truncate(n).to_string();
            assert_eq!(r.constant_matrices.unwrap()[0][0][0], want);
            let r = strict_constancy_check(&fam, &[t0.clone()], n, NeighborhoodKind::WideOpen, &StrictOptions::default()).unwrap();
            assert!(!r.constant);
            let w = r.witness.unwrap();
            assert_eq!((w.monomial.as_str(), w.valuation), ("U", n - 1));
        }
    }

    #[test]
    fn constant_family() {
        let fam = one_plus_t(5, 8, 4, "6");
        let ctx = fam.model().base().clone();
        for n in 1..=8 {
            let r = strict_constancy_check(&fam, &[PadicElement::zero(&ctx)], n, NeighborhoodKind::WideOpen, &StrictOptions::default()).unwrap();
            assert!(r.constant);
        }
    }

    #[test]
    fn conjugated_constant_family() {
        // C^{-1}·diag(1, 2)·C with C = [[1, T],[0, 1]] is not entrywise constant
        let ctx = PadicContext::qp(5, 8).unwrap();
        let model = AlgebraModel::disc(&ctx, &[], &["T"], 6).unwrap();
        let g = Arc::new(GroupPresentation::free(&["g"]).unwrap());
        let s = |x: &str| parse_series(&model, x).unwrap();
        let base = RepFamily::new(g, &model, vec![Matrix::from_rows(vec![vec![s("1"), s("0")], vec![s("0"), s("2")]])]).unwrap();
        let c = Matrix::from_rows(vec![vec![s("1"), s("T")], vec![s("0"), s("1")]]);
        let fam = base.conjugate(&c).unwrap();
        let zero = PadicElement::zero(&ctx);
        let plain = strict_constancy_check(&fam, &[zero.clone()], 1, NeighborhoodKind::WideOpen, &StrictOptions::default()).unwrap();
        assert!(!plain.constant);
        let opts = StrictOptions {
            conjugacy_degree: Some(4),
        };
        let conj = strict_constancy_check(&fam, &[zero], 1, NeighborhoodKind::WideOpen, &opts).unwrap();
        assert!(conj.constant);
        assert!(conj.conjugacy.unwrap().found);
        // 1 + T on the wide open disc is not conjugate to a constant
        let fam = one_plus_t(5, 8, 6, "1+T");
        let r = strict_constancy_check(&fam, &[PadicElement::zero(fam.model().base())], 1, NeighborhoodKind::WideOpen, &opts).unwrap();
        assert!(!r.constant);
    }
}
