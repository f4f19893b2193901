use std::sync::Arc;

use num_rational::Ratio;
use proptest::prelude::*;

use congruence_core::domain::describe;
use congruence_core::family::{specialize, trace_of_word, RepFamily};
use congruence_core::galois::{
    alpha, crystalline_module, semistable_context, semistable_module, weak_admissibility, LInvariant,
};
use congruence_core::group::GroupPresentation;
use congruence_core::lattice::{iso_mod, reduce_rep_mod, semisimplify_mod_p, IntegralRep, IsoOptions, MeataxeOptions};
use congruence_core::linalg::Matrix;
use congruence_core::padic::{Extension, PadicContext, PadicElement, PadicNumber, Valuation};
use congruence_core::series::{
    check_commutes, parse_series, AlgebraModel, ModelPoint, NeighborhoodKind, Substitution,
};

fn qp(p: u64, prec: u32) -> Arc<PadicContext> {
    PadicContext::qp(p, prec).unwrap()
}

fn int(ctx: &Arc<PadicContext>, n: i64) -> PadicElement {
    PadicElement::from_int(ctx, n)
}

fn open_disc(p: u64) -> Arc<AlgebraModel> {
    AlgebraModel::disc(&qp(p, 10), &[], &["T"], 8).unwrap()
}

fn poly(coeffs: &[i64]) -> String {
    let mut s = String::from("0");
    for (i, c) in coeffs.iter().enumerate() {
        s.push_str(&format!("+({c})*T^{i}"));
    }
    s
}

fn primes() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7])
}

fn odd_primes() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn valuation_is_additive(p in primes(), a in 1i64..100_000, b in 1i64..100_000) {
        let c = qp(p, 12);
        let (x, y) = (int(&c, a), int(&c, b));
        if let (Valuation::Exact(u), Valuation::Exact(v), Valuation::Exact(w)) =
            (x.valuation(), y.valuation(), (&x * &y).valuation())
        {
            prop_assert_eq!(w, u + v);
        }
    }

    #[test]
    fn reduction_is_a_ring_map(p in primes(), a in -5000i64..5000, b in -5000i64..5000, m in 1u32..6) {
        let c = qp(p, 10);
        let (x, y) = (int(&c, a), int(&c, b));
        let (xr, yr) = (x.reduce_mod(m).unwrap(), y.reduce_mod(m).unwrap());
        prop_assert!((&x + &y).reduce_mod(m).unwrap().congruent_mod(&(&xr + &yr), m).unwrap());
        prop_assert!((&x * &y).reduce_mod(m).unwrap().congruent_mod(&(&xr * &yr), m).unwrap());
    }

    #[test]
    fn recentering_commutes_with_evaluation(
        p in odd_primes(),
        coeffs in prop::collection::vec(-20i64..20, 1..5),
        c in -3i64..3,
        u in -20i64..20,
        n in 1u32..4,
        affinoid in any::<bool>(),
    ) {
        let model = open_disc(p);
        let ctx = model.base().clone();
        let f = parse_series(&model, &poly(&coeffs)).unwrap();
        let kind = if affinoid { NeighborhoodKind::Affinoid } else { NeighborhoodKind::WideOpen };
        let center = vec![int(&ctx, c * p as i64)];
        let sub = Substitution::new(&model, &center, kind.scale(n), kind, None).unwrap();
        // the target variable is open for U^(n) and bounded for V^(n)
        let uu = if affinoid { u } else { u * p as i64 };
        let pt = ModelPoint::rational(sub.target(), vec![int(&ctx, uu)]).unwrap();
        prop_assert!(check_commutes(&f, &sub, &pt).unwrap());
    }

    #[test]
    fn neighborhoods_nest(p in odd_primes(), c in -5i64..5, k in 1u32..5, b in 1i64..40, n in 2u32..4) {
        let model = open_disc(p);
        let ctx = model.base().clone();
        let x = ModelPoint::rational(&model, vec![int(&ctx, c * p as i64)]).unwrap();
        let y = ModelPoint::rational(&model, vec![&int(&ctx, c * p as i64) + &int(&ctx, b).mul_pi_pow(k)]).unwrap();
        let v_n = describe(&model, &x, n, NeighborhoodKind::Affinoid).unwrap().member(&y).unwrap();
        let u_n = describe(&model, &x, n, NeighborhoodKind::WideOpen).unwrap().member(&y).unwrap();
        let v_m = describe(&model, &x, n - 1, NeighborhoodKind::Affinoid).unwrap().member(&y).unwrap();
        prop_assert!(!v_n || u_n);
        prop_assert!(!u_n || v_m);
    }

    #[test]
    fn membership_is_stable_under_base_change(p in odd_primes(), k in 1u32..5, b in 1i64..40, n in 1u32..4, e in 1usize..3) {
        let model = open_disc(p);
        let ctx = model.base().clone();
        let x = ModelPoint::rational(&model, vec![PadicElement::zero(&ctx)]).unwrap();
        let yc = int(&ctx, b).mul_pi_pow(k);
        let y = ModelPoint::rational(&model, vec![yc.clone()]).unwrap();
        let ext = Extension::build(&ctx, e, 1).unwrap();
        let y_up = ModelPoint::new(&model, &ext, vec![ext.embed(&yc).unwrap()]).unwrap();
        for kind in [NeighborhoodKind::WideOpen, NeighborhoodKind::Affinoid] {
            let dom = describe(&model, &x, n, kind).unwrap();
            prop_assert_eq!(dom.member(&y).unwrap(), dom.member(&y_up).unwrap());
        }
    }

    #[test]
    fn traces_commute_with_specialization(p in odd_primes(), t in -10i64..10, word in prop::collection::vec(0usize..4, 0..4)) {
        let model = open_disc(p);
        let ctx = model.base().clone();
        let g = Arc::new(GroupPresentation::free(&["a", "b"]).unwrap());
        let s = |rows: &[[&str; 2]; 2]| rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect::<Vec<Vec<String>>>();
        let fam = RepFamily::from_strings(
            g.clone(),
            &model,
            &[s(&[["1+T", "T"], ["0", "1"]]), s(&[["1", "0"], ["T^2", "1-T"]])],
        )
        .unwrap();
        let names = ["a", "a^-1", "b", "b^-1"];
        let text = if word.is_empty() { "1".to_string() } else { word.iter().map(|i| names[*i]).collect::<Vec<_>>().join("*") };
        let w = g.parse_word(&text).unwrap();
        let pt = ModelPoint::rational(&model, vec![int(&ctx, t * p as i64)]).unwrap();
        let lhs = trace_of_word(&fam, &w).evaluate(&pt).unwrap();
        let rhs = specialize(&fam, &pt).unwrap().trace(&w);
        prop_assert!(lhs.congruent_mod(&rhs, 5).unwrap());
        // T(w) mod π does not depend on the point
        let at_zero = trace_of_word(&fam, &w).evaluate(&ModelPoint::rational(&model, vec![PadicElement::zero(&ctx)]).unwrap()).unwrap();
        prop_assert!(lhs.congruent_mod(&at_zero, 1).unwrap());
    }

    #[test]
    fn alpha_is_monotone_and_bounded(p in primes(), km1 in 0u64..200) {
        let a = alpha(km1, p).unwrap();
        prop_assert!(alpha(km1 + 1, p).unwrap() >= a);
        // α ≤ (k−1)/(p−1) · p/(p−1)
        prop_assert!(Ratio::from_integer(a as i64) <= Ratio::new((km1 * p) as i64, ((p - 1) * (p - 1)) as i64));
    }

    #[test]
    fn crystalline_modules_are_admissible(p in odd_primes(), k in 2u32..9, j in -30i64..30, shift in 1u32..4) {
        let ctx = qp(p, 16);
        let ap = PadicNumber::from(int(&ctx, j).mul_pi_pow(shift));
        let m = crystalline_module(k, &ap).unwrap();
        check_phi_invariants(m.phi(), m.monodromy(), p, k)?;
        let r = weak_admissibility(&m).unwrap();
        prop_assert!(r.admissible);
        for s in r.newton_slopes {
            let s: Ratio<i64> = s.into();
            prop_assert!(s >= Ratio::from_integer(0) && s <= Ratio::from_integer(k as i64 - 1));
        }
    }

    #[test]
    fn semistable_modules_are_admissible(p in odd_primes(), k in 2u32..9, l in -30i64..30, inf in any::<bool>()) {
        let ctx = semistable_context(p, 2 * k + 4).unwrap();
        let li = if inf { LInvariant::Infinity } else { LInvariant::Finite(PadicNumber::from(int(&ctx, l))) };
        let m = semistable_module(k, &li, &ctx).unwrap();
        check_phi_invariants(m.phi(), m.monodromy(), p, k)?;
        prop_assert!(weak_admissibility(&m).unwrap().admissible);
    }

    #[test]
    fn isomorphism_is_an_equivalence(a in -4i64..4, b in -4i64..4, c in -4i64..4, m in 1u32..4) {
        let ctx = qp(5, 8);
        // det (1+5a)(1+5c)... keep C ≡ unipotent mod 5 so det is a unit
        let cm = Matrix::from_rows(vec![vec![int(&ctx, 1 + 5 * a), int(&ctx, b)], vec![int(&ctx, 5 * c), int(&ctx, 1)]]);
        let base = standard_s3(&ctx);
        let conj = base.conjugate(&cm).unwrap();
        let (x, y) = (reduce_rep_mod(&base, m).unwrap(), reduce_rep_mod(&conj, m).unwrap());
        let opts = IsoOptions { single_thread: true, ..Default::default() };
        prop_assert!(iso_mod(&x, &x, &opts).unwrap().is_isomorphic());
        prop_assert!(iso_mod(&x, &y, &opts).unwrap().is_isomorphic());
        prop_assert!(iso_mod(&y, &x, &opts).unwrap().is_isomorphic());
        for mm in 1..=m {
            let (x, y) = (reduce_rep_mod(&base, mm).unwrap(), reduce_rep_mod(&conj, mm).unwrap());
            prop_assert!(iso_mod(&x, &y, &opts).unwrap().is_isomorphic());
        }
    }

    #[test]
    fn semisimplification_ignores_basis(a in 0i64..5, b in 0i64..5, c in 0i64..5, d in 0i64..5, split in any::<bool>()) {
        let ctx = qp(5, 6);
        prop_assume!((a * d - b * c).rem_euclid(5) != 0);
        let cm = Matrix::from_rows(vec![vec![int(&ctx, a), int(&ctx, b)], vec![int(&ctx, c), int(&ctx, d)]]);
        let base = if split { triv_plus_sign(&ctx) } else { standard_s3(&ctx) };
        let conj = base.conjugate(&cm).unwrap();
        let key = |r: &IntegralRep| {
            let s = semisimplify_mod_p(&reduce_rep_mod(r, 1).unwrap(), &MeataxeOptions::default()).unwrap();
            let mut f: Vec<_> = s.factors.iter().map(|f| (f.dim, f.multiplicity, f.traces.clone())).collect();
            f.sort();
            f
        };
        prop_assert_eq!(key(&base), key(&conj));
    }
}

fn check_phi_invariants(phi: &Matrix<PadicNumber>, n: &Matrix<PadicNumber>, p: u64, k: u32) -> Result<(), TestCaseError> {
    let ctx = phi.get(0, 0).ctx().clone();
    prop_assert!(n.mul(n).is_zero());
    let pn = PadicNumber::from(PadicElement::from_int(&ctx, p as i64));
    prop_assert!(n.mul(phi).sub(&phi.mul(n).scale(&pn)).is_zero());
    prop_assert_eq!(phi.det().valuation_p().unwrap(), Ratio::from_integer(k as i64 - 1));
    Ok(())
}

fn s3_group() -> Arc<GroupPresentation> {
    Arc::new(GroupPresentation::symmetric(3).unwrap())
}

fn standard_s3(ctx: &Arc<PadicContext>) -> IntegralRep {
    IntegralRep::from_ints(s3_group(), ctx, &[vec![vec![-1, 1], vec![0, 1]], vec![vec![0, -1], vec![1, -1]]]).unwrap()
}

fn triv_plus_sign(ctx: &Arc<PadicContext>) -> IntegralRep {
    IntegralRep::from_ints(s3_group(), ctx, &[vec![vec![1, 0], vec![0, -1]], vec![vec![1, 0], vec![0, 1]]]).unwrap()
}
