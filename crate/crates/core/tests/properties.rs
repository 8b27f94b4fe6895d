//! Structural invariants as property tests. Inputs are drawn from seeded
//! streams so that a shrunk failure names a reproducible seed.

use std::sync::Arc;

use hitchin_linf::adjoint::{build_adjoint_morphism, BasePoint, ToyHiggsDgla};
use hitchin_linf::graded::{self, koszul_sign, unshuffles, GradedElement, LinftyMorphism};
use hitchin_linf::hitchin::{build_hitchin_morphism, sample_mc, wedge, HiggsModel, HitchinSabotage, McStratum};
use hitchin_linf::invariants::{polarize, AdjointQuotient, InvariantPolynomial};
use hitchin_linf::kuranishi::{compute_hull, normalise};
use hitchin_linf::sampling::{self, trial_rng};
use hitchin_linf::suites::{run, Suite, SuiteConfig};
use hitchin_linf::{small_extension_pair, ArtinElement, ArtinRing, LieAlgebra, LieElement, Rational};
use proptest::prelude::*;
use rand::Rng;

fn ring(choice: usize) -> Arc<ArtinRing> {
    let (vars, order) = [(1, 2), (1, 4), (2, 3), (3, 2)][choice % 4];
    ArtinRing::truncated(vars, order).unwrap()
}

fn algebra(choice: usize) -> Arc<LieAlgebra> {
    LieAlgebra::builtin(["gl2", "gl3", "sl2", "sl3"][choice % 4]).unwrap()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ring_axioms(seed in any::<u64>(), choice in 0usize..4) {
        let r = ring(choice);
        let mut rng = trial_rng(seed, "prop/ring", 0);
        let a = sampling::artin_element(&mut rng, &r, false);
        let b = sampling::artin_element(&mut rng, &r, false);
        let c = sampling::artin_element(&mut rng, &r, false);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn maximal_ideal_is_nilpotent(seed in any::<u64>(), choice in 0usize..4) {
        let r = ring(choice);
        let x = sampling::artin_element(&mut trial_rng(seed, "prop/nil", 0), &r, true);
        prop_assert!(x.pow(r.nilpotency_index()).is_zero());
    }

    #[test]
    fn small_extension_sections(seed in any::<u64>(), order in 2u32..6) {
        let ext = small_extension_pair(order).unwrap();
        let a = sampling::artin_element(&mut trial_rng(seed, "prop/ext", 0), &ext.quotient, false);
        prop_assert_eq!(ext.project(&ext.lift(&a)), a);
        let m = sampling::artin_element(&mut trial_rng(seed, "prop/ext", 1), &ext.total, true);
        prop_assert!((&m * &ext.kernel_generator()).is_zero());
    }

    #[test]
    fn jacobi_on_integer_triples(seed in any::<u64>(), choice in 0usize..4) {
        let alg = algebra(choice);
        let mut rng = trial_rng(seed, "prop/jacobi", 0);
        let (x, y, z) = (sampling::lie_element(&mut rng, &alg), sampling::lie_element(&mut rng, &alg), sampling::lie_element(&mut rng, &alg));
        let total = x.bracket(&y).bracket(&z).add(&y.bracket(&z).bracket(&x)).add(&z.bracket(&x).bracket(&y));
        prop_assert!(total.is_zero());
    }

    #[test]
    fn exp_ad_is_an_automorphism_with_inverse(seed in any::<u64>(), choice in 0usize..4) {
        let alg = algebra(choice);
        let r = ring(choice + 1);
        let mut rng = trial_rng(seed, "prop/expad", 0);
        let lambda = sampling::lie_element_over(&mut rng, &alg, &r, true);
        let x = sampling::lie_element_over(&mut rng, &alg, &r, false);
        let y = sampling::lie_element_over(&mut rng, &alg, &r, false);
        let e = |w: &LieElement| LieElement::exp_ad(&lambda, w).unwrap();
        prop_assert_eq!(e(&x.bracket(&y)), e(&x).bracket(&e(&y)));
        prop_assert_eq!(LieElement::exp_ad(&lambda.neg(), &e(&x)).unwrap(), x);
    }

    #[test]
    fn polarisation_is_symmetric_multilinear_and_bounded(seed in any::<u64>(), choice in 0usize..4) {
        let alg = algebra(choice);
        let q = AdjointQuotient::char_poly(&alg).unwrap();
        let mut rng = trial_rng(seed, "prop/polar", 0);
        for p in q.components() {
            let d = p.degree() as usize;
            let v = sampling::lie_element(&mut rng, &alg);
            let xs: Vec<LieElement> = (0..d.min(3)).map(|_| sampling::lie_element(&mut rng, &alg)).collect();
            let mut reversed = xs.clone();
            reversed.reverse();
            prop_assert_eq!(polarize(p, &xs, &v).unwrap(), polarize(p, &reversed, &v).unwrap());
            let y = sampling::lie_element(&mut rng, &alg);
            let (a, b) = (sampling::small_rational(&mut rng), sampling::small_rational(&mut rng));
            let mut mixed = xs.clone();
            mixed[0] = xs[0].scale_rational(&a).add(&y.scale_rational(&b));
            let mut with_y = xs.clone();
            with_y[0] = y;
            let expected = &polarize(p, &xs, &v).unwrap().scale(&a) + &polarize(p, &with_y, &v).unwrap().scale(&b);
            prop_assert_eq!(polarize(p, &mixed, &v).unwrap(), expected);
            let too_many: Vec<LieElement> = (0..=d).map(|_| sampling::lie_element(&mut rng, &alg)).collect();
            prop_assert!(polarize(p, &too_many, &v).unwrap().is_zero());
        }
    }

    #[test]
    fn koszul_sign_composes(n in 1usize..7, seed in any::<u64>()) {
        let mut rng = trial_rng(seed, "prop/koszul", 0);
        let odd: Vec<bool> = (0..n).map(|_| sampling::small_int(&mut rng) % 2 == 0).collect();
        let tau = sampling::permutation(&mut rng, n);
        let sigma = sampling::permutation(&mut rng, n);
        // listing by tau, then relisting that by sigma, is listing by tau o sigma
        let composed: Vec<usize> = sigma.iter().map(|&i| tau[i]).collect();
        let odd_after_tau: Vec<bool> = tau.iter().map(|&i| odd[i]).collect();
        prop_assert_eq!(koszul_sign(&odd, &composed), &koszul_sign(&odd, &tau) * &koszul_sign(&odd_after_tau, &sigma));
    }

    #[test]
    fn unshuffles_are_counted_by_binomials(n in 1usize..8, k_seed in any::<usize>()) {
        let k = k_seed % (n + 1);
        let all = unshuffles(k, n).unwrap();
        prop_assert_eq!(all.len(), binomial(n, k));
        for s in &all {
            prop_assert!(s[..k].windows(2).all(|w| w[0] < w[1]));
            prop_assert!(s[k..].windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn wedge_is_associative(a in 0u32..64, b in 0u32..64, c in 0u32..64) {
        let left = wedge(a, b).and_then(|(ab, s1)| wedge(ab, c).map(|(m, s2)| (m, s1 ^ s2)));
        let right = wedge(b, c).and_then(|(bc, s1)| wedge(a, bc).map(|(m, s2)| (m, s1 ^ s2)));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn dbar_is_a_graded_derivation(m1 in 0u32..16, m2 in 0u32..16) {
        let model = HiggsModel::builtin("remark_gl2").unwrap();
        let forms = &model.forms;
        let Some((m, s)) = wedge(m1, m2) else { return Ok(()) };
        let mut lhs: Vec<(u32, Rational)> = forms.dbar(m).into_iter().map(|(x, c)| (x, if s { -c } else { c })).collect();
        let mut rhs: Vec<(u32, Rational)> = Vec::new();
        let sign1 = if m1.count_ones() % 2 == 1 { -Rational::one() } else { Rational::one() };
        for (x, c) in forms.dbar(m1) {
            if let Some((y, t)) = wedge(x, m2) {
                rhs.push((y, if t { -c } else { c }));
            }
        }
        for (x, c) in forms.dbar(m2) {
            if let Some((y, t)) = wedge(m1, x) {
                let c = &c * &sign1;
                rhs.push((y, if t { -c } else { c }));
            }
        }
        let collect = |v: &mut Vec<(u32, Rational)>| {
            let mut out = std::collections::BTreeMap::new();
            for (x, c) in v.drain(..) {
                *out.entry(x).or_insert_with(Rational::zero) += &c;
            }
            out.retain(|_, c: &mut Rational| !c.is_zero());
            out
        };
        prop_assert_eq!(collect(&mut lhs), collect(&mut rhs));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn taylor_coefficients_are_koszul_coherent(seed in any::<u64>(), model_choice in 0usize..7) {
        let name = HiggsModel::builtin_names()[model_choice];
        let h = build_hitchin_morphism(&HiggsModel::builtin(name).unwrap(), HitchinSabotage::default()).unwrap();
        let space = h.source().space().clone();
        let q = ArtinRing::rationals();
        let mut rng = trial_rng(seed, "prop/coherence", 0);
        let k = 2 + (sampling::small_int(&mut rng).unsigned_abs() as usize % 2);
        let idx: Vec<usize> = (0..k).map(|_| rng.gen_range(0..space.dim())).collect();
        let word: Vec<GradedElement> = idx.iter().map(|&i| GradedElement::basis(&space, &q, i)).collect();
        let odd: Vec<bool> = idx.iter().map(|&i| space.is_shifted_odd(i)).collect();
        let sigma = sampling::permutation(&mut rng, k);
        let permuted: Vec<GradedElement> = sigma.iter().map(|&i| word[i].clone()).collect();
        prop_assert_eq!(h.taylor(&permuted), h.taylor(&word).scale_rational(&koszul_sign(&odd, &sigma)));
    }

    #[test]
    fn gauge_action_preserves_mc_and_pushforward(seed in any::<u64>(), model_choice in 0usize..7, two_vars in any::<bool>()) {
        let name = HiggsModel::builtin_names()[model_choice];
        let model = HiggsModel::builtin(name).unwrap();
        let h = build_hitchin_morphism(&model, HitchinSabotage::default()).unwrap();
        let dgla = h.model_dgla().clone();
        let r = ArtinRing::truncated(if two_vars { 2 } else { 1 }, 3).unwrap();
        let mut rng = trial_rng(seed, "prop/gauge", 0);
        let s = sample_mc(&dgla, McStratum::Mixed, &r, &mut rng).unwrap().element;
        let lambda = sampling::lie_element_over(&mut rng, &model.algebra, &r, true);
        let moved = graded::gauge_act(dgla.as_ref(), &dgla.embed(0, &lambda), &s).unwrap();
        prop_assert!(graded::mc_set_check(dgla.as_ref(), &moved).unwrap());
        prop_assert_eq!(graded::mc_pushforward(&h, &moved).unwrap(), graded::mc_pushforward(&h, &s).unwrap());
    }

    #[test]
    fn adjoint_pushforward_is_gauge_invariant(seed in any::<u64>(), choice in 0usize..4, point in 0usize..3) {
        let alg = algebra(choice);
        let v = BasePoint::fixtures()[point].resolve(&alg).unwrap();
        let h = build_adjoint_morphism(&AdjointQuotient::char_poly(&alg).unwrap(), &v).unwrap();
        let toy = h.toy();
        let r = ArtinRing::truncated(1, 4).unwrap();
        let mut rng = trial_rng(seed, "prop/adjoint-gauge", 0);
        let b = toy.degree1(&sampling::lie_element_over(&mut rng, &alg, &r, true));
        let lambda = toy.degree0(&sampling::lie_element_over(&mut rng, &alg, &r, true));
        let moved = graded::gauge_act(toy, &lambda, &b).unwrap();
        prop_assert!(graded::mc_set_check(toy, &moved).unwrap());
        prop_assert_eq!(graded::mc_pushforward(&h, &moved).unwrap(), graded::mc_pushforward(&h, &b).unwrap());
    }

    #[test]
    fn centraliser_matches_degree_zero_cohomology(seed in any::<u64>(), choice in 0usize..4) {
        let alg = algebra(choice);
        let v = sampling::lie_element(&mut trial_rng(seed, "prop/centraliser", 0), &alg);
        let toy = ToyHiggsDgla::new(&v).unwrap();
        let kernel = alg.dim() - alg.ad_matrix(&v.residue()).rank();
        prop_assert_eq!(graded::cohomology(&toy, 0).len(), kernel);
    }

    #[test]
    fn first_order_complement_is_already_normal(seed in any::<u64>(), choice in 0usize..2, point in 0usize..2) {
        let alg = LieAlgebra::builtin(["sl2", "sl3"][choice]).unwrap();
        let v = [BasePoint::RegularSemisimple, BasePoint::RegularNilpotent][point].resolve(&alg).unwrap();
        let hull = compute_hull(&v).unwrap();
        let r = ArtinRing::truncated(1, 2).unwrap();
        let t = ArtinElement::var(&r, 0);
        let mut rng = trial_rng(seed, "prop/hull", 0);
        let mut k = LieElement::zero(&alg, &r);
        for b in hull.complement_basis() {
            k = k.add(&LieElement::from_rationals(&alg, b).embed(&r).scale(&t).scale_rational(&sampling::small_rational(&mut rng)));
        }
        let n = normalise(&hull, &k, true).unwrap();
        prop_assert_eq!(n.normal_form, k);
    }

    #[test]
    fn reports_are_reproducible(seed in any::<u64>()) {
        let cfg = SuiteConfig::new(Suite::Lemma, seed).with_algebra("sl2").with_trials(3);
        prop_assert_eq!(run(&cfg).unwrap().to_json(), run(&cfg).unwrap().to_json());
    }

    #[test]
    fn invariants_are_invariant(seed in any::<u64>(), choice in 0usize..4) {
        let alg = algebra(choice);
        let r = ring(choice);
        let mut rng = trial_rng(seed, "prop/invariance", 0);
        let lambda = sampling::lie_element_over(&mut rng, &alg, &r, true);
        let x = sampling::lie_element_over(&mut rng, &alg, &r, false);
        for p in InvariantPolynomial::trace_powers(&alg, 4).unwrap() {
            prop_assert_eq!(p.eval(&LieElement::exp_ad(&lambda, &x).unwrap()), p.eval(&x));
        }
    }
}
