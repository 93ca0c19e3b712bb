use gfc_core::autgroup::{
    check_catalog, g_orbits, generated_group, generator_catalog, recognize_group,
};
use gfc_core::curves::{
    count_rational_places, genus_closed_form, genus_rh_over, make_curve, oracle_extension,
    place_count_oracle, Family,
};
use gfc_core::equiv::{mainpgroup_identity, overlap_identity, quadrex_normalize};
use gfc_core::ffield::make_field;
use gfc_core::verify::{field_for_q, grid, sample_cell, verify_suite, Suite, VerifyConfig};
use gfc_core::{Elem, Field, GfcError};

fn ints(f: &Field, v: &[i64]) -> Vec<Elem> {
    v.iter().map(|&k| f.from_int(k)).collect()
}

#[test]
fn rh_oracle_stable_under_doubling() {
    let cfg = VerifyConfig::new(vec![5, 7, 9], 6, vec![Suite::Genus]);
    for g in grid(&cfg).unwrap().iter().step_by(5) {
        let model = g.curve.kummer_unchecked().unwrap();
        let l = oracle_extension(&model);
        if g.curve.working_field().order().pow(2 * l as u32) > 1 << 22 {
            continue;
        }
        let a = genus_rh_over(&model, l).unwrap();
        let b = genus_rh_over(&model, 2 * l).unwrap();
        assert_eq!(a, b, "{}", g.label());
        assert_eq!(a, genus_closed_form(&g.curve));
    }
}

#[test]
fn report_independent_of_worker_count() {
    let cfg = VerifyConfig::new(vec![5, 7], 6, Suite::ALL.to_vec());
    let run = |k: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .unwrap();
        serde_json::to_string(&pool.install(|| verify_suite(&cfg)).unwrap()).unwrap()
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert!(one.starts_with("{\"schema\":1,"));
}

#[test]
fn guards() {
    let cfg = VerifyConfig::new(vec![17], 4, vec![Suite::Genus]);
    assert!(matches!(
        verify_suite(&cfg),
        Err(GfcError::DeskScaleExceeded(_))
    ));
    let cfg = VerifyConfig::new(vec![6], 4, vec![Suite::Genus]);
    assert!(matches!(
        verify_suite(&cfg),
        Err(GfcError::InvalidParameter(_))
    ));
    let f = field_for_q(7).unwrap();
    let c = make_curve(Family::IIb1, &f, 3, 3, &ints(&f, &[2, 1, 1])).unwrap();
    assert!(matches!(
        count_rational_places(&c, 13),
        Err(GfcError::DeskScaleExceeded(_))
    ));
}

// degree-3 Fermat curve has genus 1; family II genus is (m-1)(n-1)
#[test]
fn genus_values() {
    let f7 = make_field(7, 1).unwrap();
    let fermat = make_curve(Family::I, &f7, 3, 3, &ints(&f7, &[1, 1])).unwrap();
    assert_eq!(genus_closed_form(&fermat), 1);
    let c = make_curve(Family::IIb1, &f7, 3, 3, &ints(&f7, &[2, 1, 1])).unwrap();
    assert_eq!(genus_closed_form(&c), 4);
    let f13 = make_field(13, 1).unwrap();
    let c = make_curve(Family::I, &f13, 4, 6, &ints(&f13, &[1, 1])).unwrap();
    // (24 - 4 - 6 - 2 + 2)/2
    assert_eq!(genus_closed_form(&c), 7);
}

#[test]
fn place_counts_agree_over_extensions() {
    let f5 = make_field(5, 1).unwrap();
    let c = make_curve(Family::IIb3, &f5, 3, 3, &ints(&f5, &[0, 1, 1, 0])).unwrap();
    for l in 1..=2 {
        assert_eq!(
            count_rational_places(&c, l).unwrap(),
            place_count_oracle(&c, l).unwrap()
        );
    }
}

// <sigma1, sigma2, mu> has order 2mn; n = 5, m = 2, a = 1 gives 4mn = 40 and quotient D10
#[test]
fn catalog_orders() {
    let f7 = make_field(7, 1).unwrap();
    let c = make_curve(Family::IIb1, &f7, 3, 3, &ints(&f7, &[2, 1, 1])).unwrap();
    let cat = generator_catalog(&c).unwrap();
    let gens: Vec<_> = ["sigma1", "sigma2", "mu"]
        .iter()
        .map(|s| cat.get(s).unwrap())
        .collect();
    let g = generated_group(&gens, &cat.field, 1000).unwrap();
    assert_eq!(g.elements.len(), 18);
    let sub = generated_group(&gens[..2], &cat.field, 1000).unwrap();
    assert_eq!(sub.elements.len(), 9);
    assert_eq!(recognize_group(&sub.table).to_string(), "C3 x C3");
    let f11 = make_field(11, 1).unwrap();
    let c = make_curve(Family::IIb1, &f11, 5, 2, &ints(&f11, &[1, 1, 1])).unwrap();
    let chk = check_catalog(&c).unwrap();
    assert_eq!(chk.orders["full"], 40);
    assert_eq!(chk.quotient, "D10");
    assert!(chk.pass());
}

#[test]
fn birational_maps() {
    let f11 = make_field(11, 1).unwrap();
    let c = overlap_identity(&f11, 5).unwrap();
    assert!(c.pass());
    assert_eq!((c.genus_src, c.genus_dst), (4, 4));
    let c = mainpgroup_identity(3, 2).unwrap();
    assert!(c.pass());
    assert!(matches!(
        mainpgroup_identity(2, 1),
        Err(GfcError::InvalidParameter(_))
    ));
}

#[test]
fn quadrex_preserves_orbits() {
    let f11 = make_field(11, 1).unwrap();
    let c = make_curve(Family::IIb2, &f11, 4, 5, &ints(&f11, &[1, 0, 0, 1]));
    if let Ok(c) = c {
        if g_orbits(&c).is_ok() {
            let r = quadrex_normalize(&c).unwrap();
            assert!(r.pass());
        }
    }
    let f7 = make_field(7, 1).unwrap();
    let c = &sample_cell(&f7, Family::IIb3, 4, 8, 1)[0].curve;
    let r = quadrex_normalize(c).unwrap();
    assert!(r.pass());
    assert_eq!(r.genus_after, 21);
}
