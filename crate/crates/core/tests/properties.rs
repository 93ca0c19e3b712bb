use std::sync::Arc;

use gfc_core::curves::{genus_closed_form, genus_riemann_hurwitz, make_curve, Family};
use gfc_core::equiv::AlgebraicRelation;
use gfc_core::ffield::make_field;
use gfc_core::moebius::{nonsplit_cyclic_generator, split_cyclic_generator};
use gfc_core::{Elem, Field, Moebius, Poly, ProjPoint, RatFn, Tower};
use proptest::prelude::*;

const FIELDS: [(u32, usize); 6] = [(3, 1), (5, 1), (7, 1), (3, 2), (5, 2), (3, 3)];

fn field(i: usize) -> Arc<Field> {
    let (p, h) = FIELDS[i % FIELDS.len()];
    make_field(p, h).unwrap()
}

fn el(f: &Field, k: u128) -> Elem {
    f.element_at(k % f.order())
}

fn poly(f: &Field, cs: &[u128]) -> Poly {
    Poly::from_coeffs(cs.iter().map(|&k| el(f, k)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(fi in 0usize..6, a in any::<u128>(), b in any::<u128>(), c in any::<u128>()) {
        let f = field(fi);
        let (a, b, c) = (el(&f, a), el(&f, b), el(&f, c));
        prop_assert_eq!(f.mul(&a, &f.mul(&b, &c)), f.mul(&f.mul(&a, &b), &c));
        prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
        prop_assert_eq!(f.add(&a, &f.neg(&a)), Elem::ZERO);
        prop_assert_eq!(f.pow(&a, f.order()), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
        }
        prop_assert_eq!(f.element_at(f.canonical_index(&b)), b);
    }

    #[test]
    fn factorization_multiplies_back(fi in 0usize..6, cs in prop::collection::vec(any::<u128>(), 2..9)) {
        let f = field(fi);
        let p = poly(&f, &cs);
        prop_assume!(!p.is_zero());
        let (lead, factors) = p.factorize(&f).unwrap();
        let mut prod = Poly::constant(lead);
        for (g, e) in &factors {
            prop_assert!(g.is_irreducible(&f));
            prop_assert_eq!(g.lead(), f.one());
            prod = prod.mul(&g.pow(*e as u64, &f), &f);
        }
        prop_assert_eq!(prod, p);
    }

    #[test]
    fn roots_are_roots(fi in 0usize..6, cs in prop::collection::vec(any::<u128>(), 2..7)) {
        let f = field(fi);
        let p = poly(&f, &cs);
        prop_assume!(!p.is_zero());
        let roots = p.roots(&f);
        let brute: Vec<Elem> = f.elements().filter(|x| p.eval(x, &f).is_zero()).collect();
        prop_assert_eq!(roots.len(), brute.len());
        for r in roots {
            prop_assert!(p.eval(&r, &f).is_zero());
        }
    }

    #[test]
    fn moebius_action_is_a_homomorphism(fi in 0usize..6, e in prop::array::uniform8(any::<u128>()), x in any::<u128>()) {
        let f = field(fi);
        let m1 = Moebius::new(&f, el(&f, e[0]), el(&f, e[1]), el(&f, e[2]), el(&f, e[3]));
        let m2 = Moebius::new(&f, el(&f, e[4]), el(&f, e[5]), el(&f, e[6]), el(&f, e[7]));
        let (Ok(m1), Ok(m2)) = (m1, m2) else { return Ok(()) };
        let p = ProjPoint::finite(el(&f, x), &f);
        prop_assert_eq!(m1.compose(&m2, &f).act(&p, &f), m1.act(&m2.act(&p, &f), &f));
        prop_assert!(m1.compose(&m1.inverse(&f), &f).is_identity());
        let r = m1.as_ratfn(&f);
        prop_assert_eq!(r.eval_proj(&p, &f), m1.act(&p, &f));
    }

    #[test]
    fn ratfn_canonical_and_composition(fi in 0usize..6, a in prop::collection::vec(any::<u128>(), 1..5),
                                       b in prop::collection::vec(any::<u128>(), 1..5), k in any::<u128>(), x in any::<u128>()) {
        let f = field(fi);
        let (pa, pb) = (poly(&f, &a), poly(&f, &b));
        prop_assume!(!pb.is_zero());
        let r = RatFn::new(pa.clone(), pb.clone(), &f).unwrap();
        let c = el(&f, k);
        prop_assume!(!c.is_zero());
        // scaling numerator and denominator gives the same canonical form
        prop_assert_eq!(RatFn::new(pa.scale(&c, &f), pb.scale(&c, &f), &f).unwrap(), r.clone());
        let g = RatFn::new(Poly::from_coeffs(vec![c, f.one()]), Poly::one(&f), &f).unwrap();
        let x0 = el(&f, x);
        let comp = r.compose(&g, &f);
        let gx = g.eval(&x0, &f).unwrap();
        if let (Some(lhs), Some(rhs)) = (comp.eval(&x0, &f), r.eval(&gx, &f)) {
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn cyclic_generators_have_exact_order(qi in 0usize..5, n in 2u64..14) {
        let f = field(qi);
        let q = f.order() as u64;
        prop_assume!(n % f.p() as u64 != 0);
        if (q - 1).is_multiple_of(n) {
            let s = split_cyclic_generator(&f, n).unwrap();
            prop_assert_eq!(s.order(&f, n), Some(n));
        }
        if (q + 1).is_multiple_of(n) {
            let t = Tower::new(&f).unwrap();
            let g = nonsplit_cyclic_generator(&t, n).unwrap();
            prop_assert_eq!(g.tau.order(&f, n), Some(n));
        }
    }

    #[test]
    fn algebra_multiplication_associates(a in prop::collection::vec(any::<u128>(), 3),
                                         b in prop::collection::vec(any::<u128>(), 3),
                                         c in prop::collection::vec(any::<u128>(), 3)) {
        let f = make_field(7, 1).unwrap();
        let alg = AlgebraicRelation::new(3, &f, RatFn::from_poly(Poly::from_ints(&f, &[1, 0, 0, 6]), &f)).unwrap();
        let lift = |v: &[u128]| -> Vec<RatFn> { v.iter().map(|&k| RatFn::constant(el(&f, k), &f)).collect() };
        let (a, b, c) = (lift(&a), lift(&b), lift(&c));
        prop_assert_eq!(alg.mul(&a, &alg.mul(&b, &c)), alg.mul(&alg.mul(&a, &b), &c));
        prop_assert_eq!(alg.mul(&a, &b), alg.mul(&b, &a));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn genus_formula_matches_oracle(fam in 0usize..4, qi in 0usize..3, n in 2u64..9, m in 2u64..9,
                                    ps in prop::collection::vec(any::<u128>(), 4)) {
        let qs = [(7, 1), (11, 1), (3, 2)];
        let (p, h) = qs[qi];
        let f = make_field(p, h).unwrap();
        let family = Family::ALL[fam];
        let params: Vec<Elem> = ps[..family.arity()].iter().map(|&k| el(&f, k)).collect();
        if let Ok(c) = make_curve(family, &f, n, m, &params) {
            prop_assert_eq!(genus_riemann_hurwitz(&c).unwrap(), genus_closed_form(&c));
        }
    }
}
