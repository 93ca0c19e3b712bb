//! Generators of the fixed fields of the split and nonsplit cyclic actions on
//! `F_q(x)`, with invariance, degree and rationality certificates.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{GfcError, Result};
use crate::ffield::{Elem, Field, Tower};
use crate::moebius::{
    nonsplit_cyclic_generator, split_cyclic_generator, Moebius, MoebiusJson, ProjPoint,
};
use crate::places::{RatFn, RatFnJson};
use crate::poly::Poly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QuotientKind {
    Split,
    Nonsplit,
}

/// The invariant function of an order-`n` cyclic action, over `F_q`.
#[derive(Debug, Clone)]
pub struct QuotientDatum {
    pub kind: QuotientKind,
    pub n: u64,
    pub generator: Moebius,
    pub invariant: RatFn,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuotientJson {
    pub kind: QuotientKind,
    pub n: u64,
    pub tau: MoebiusJson,
    pub inv_num: Vec<Vec<u64>>,
    pub inv_den: Vec<Vec<u64>>,
}

impl QuotientDatum {
    pub fn to_json(&self, f: &Field) -> QuotientJson {
        let RatFnJson { num, den } = self.invariant.to_json(f);
        QuotientJson {
            kind: self.kind,
            n: self.n,
            tau: self.generator.to_json(f),
            inv_num: num,
            inv_den: den,
        }
    }

    /// `inv ∘ τ == inv`, exactly.
    pub fn is_invariant(&self, f: &Field) -> bool {
        self.invariant.compose(&self.generator.as_ratfn(f), f) == self.invariant
    }
}

/// `x^n`, invariant under `x ↦ ζ_n x`.
pub fn split_quotient(f: &Field, n: u64) -> Result<QuotientDatum> {
    let generator = split_cyclic_generator(f, n)?;
    let invariant = RatFn::from_poly(Poly::monomial(f.one(), n as usize), f);
    Ok(QuotientDatum {
        kind: QuotientKind::Split,
        n,
        generator,
        invariant,
    })
}

/// `z = i[(x+i)^n - (x-i)^n] / [(x+i)^n + (x-i)^n]` over `F_{q²}`, brought
/// back to `F_q`.
pub fn z_map_top(t: &Tower, n: u64) -> RatFn {
    let top = &t.top;
    let plus = Poly::from_coeffs(vec![t.i, top.one()]).pow(n, top);
    let minus = Poly::from_coeffs(vec![top.neg(&t.i), top.one()]).pow(n, top);
    let num = plus.sub(&minus, top).scale(&t.i, top);
    let den = plus.add(&minus, top);
    RatFn::new(num, den, top).expect("(x+i)^n + (x-i)^n is nonzero")
}

pub fn nonsplit_quotient(t: &Tower, n: u64) -> Result<QuotientDatum> {
    let g = nonsplit_cyclic_generator(t, n)?;
    let z = z_map_top(t, n);
    let invariant = z
        .restrict(|c| t.restrict(c), &t.base)
        .ok_or_else(|| GfcError::TheoremViolation("z has a coefficient outside F_q".into()))?;
    Ok(QuotientDatum {
        kind: QuotientKind::Nonsplit,
        n,
        generator: g.tau,
        invariant,
    })
}

/// `h = ((x-i)/(x+i))^n` over `F_{q²}` and the checks around it.
#[derive(Debug, Clone)]
pub struct IntermediateH {
    pub h: RatFn,
    /// `h ∘ τ = h`.
    pub invariant: bool,
    /// `i(h-1)/(h+1) = -z`: the proof variant is the negative of the statement form.
    pub z_relation_negated: bool,
    /// `(u - iv)^n = (u + iv)^n`.
    pub lambda_certificate: bool,
}

pub fn intermediate_h(t: &Tower, n: u64) -> Result<IntermediateH> {
    let g = nonsplit_cyclic_generator(t, n)?;
    let top = &t.top;
    let base = Poly::from_coeffs(vec![top.neg(&t.i), top.one()]);
    let den = Poly::from_coeffs(vec![t.i, top.one()]);
    let h = RatFn::new(base.pow(n, top), den.pow(n, top), top)?;
    let tau = g.tau.embed(&t.base, top)?.as_ratfn(top);
    let invariant = h.compose(&tau, top) == h;
    let one = RatFn::constant(top.one(), top);
    let zp = h
        .sub(&one, top)
        .div(&h.add(&one, top), top)?
        .scale(&t.i, top);
    let z = z_map_top(t, n);
    let z_relation_negated = zp == z.neg(top);
    let lambda_certificate =
        top.pow(&t.conj(&g.lambda), n as u128) == top.pow(&g.lambda, n as u128);
    Ok(IntermediateH {
        h,
        invariant,
        z_relation_negated,
        lambda_certificate,
    })
}

/// `N(x) = Π σ^j(x)` (split) or `Tr(x) = Σ τ^j(x)` (nonsplit).
pub fn trace_and_norm(
    base: &Arc<Field>,
    tower: Option<&Tower>,
    n: u64,
    kind: QuotientKind,
) -> Result<RatFn> {
    let f = base.as_ref();
    let gen = match kind {
        QuotientKind::Split => split_cyclic_generator(f, n)?,
        QuotientKind::Nonsplit => {
            let t = tower
                .ok_or_else(|| GfcError::InvalidParameter("nonsplit kind needs a tower".into()))?;
            nonsplit_cyclic_generator(t, n)?.tau
        }
    };
    let mut acc = match kind {
        QuotientKind::Split => RatFn::constant(f.one(), f),
        QuotientKind::Nonsplit => RatFn::constant(Elem::ZERO, f),
    };
    let mut g = Moebius::identity(f);
    for _ in 0..n {
        let term = g.as_ratfn(f);
        acc = match kind {
            QuotientKind::Split => acc.mul(&term, f),
            QuotientKind::Nonsplit => acc.add(&term, f),
        };
        g = g.compose(&gen, f);
    }
    Ok(acc)
}

/// A Möbius map `M` over `F_q` with `target = M ∘ source`, found by
/// interpolating at three points of `P^1(F_{q²})` with distinct `source`
/// values and then checked symbolically.
pub fn moebius_relating(t: &Tower, source: &RatFn, target: &RatFn) -> Result<Moebius> {
    let top = &t.top;
    let s = source.embed(&t.base, top)?;
    let tt = target.embed(&t.base, top)?;
    let mut picked: Vec<(ProjPoint, ProjPoint)> = Vec::new();
    for p in ProjPoint::all(top) {
        let v = s.eval_proj(&p, top);
        if picked.iter().any(|(w, _)| *w == v) {
            continue;
        }
        picked.push((v, tt.eval_proj(&p, top)));
        if picked.len() == 3 {
            break;
        }
    }
    if picked.len() < 3 {
        return Err(GfcError::DegenerateMap(
            "fewer than three distinct values".into(),
        ));
    }
    let src = three_point_frame(top, [picked[0].0, picked[1].0, picked[2].0])?;
    let dst = three_point_frame(top, [picked[0].1, picked[1].1, picked[2].1])?;
    let m = dst.compose(&src.inverse(top), top);
    let restrict = |e: &Elem| t.restrict(e);
    let mq = match (
        restrict(&m.a),
        restrict(&m.b),
        restrict(&m.c),
        restrict(&m.d),
    ) {
        (Some(a), Some(b), Some(c), Some(d)) => Moebius::new(&t.base, a, b, c, d)?,
        _ => {
            return Err(GfcError::TheoremViolation(
                "relating map is not defined over F_q".into(),
            ))
        }
    };
    if mq.as_ratfn(&t.base).compose(source, &t.base) != *target {
        return Err(GfcError::TheoremViolation(
            "interpolated map does not relate the functions".into(),
        ));
    }
    Ok(mq)
}

/// The map sending `0, ∞, 1` to `p[0], p[1], p[2]`.
fn three_point_frame(f: &Field, p: [ProjPoint; 3]) -> Result<Moebius> {
    // p2 = α p1 + β p0
    let det = f.sub(&f.mul(&p[1].x0, &p[0].x1), &f.mul(&p[0].x0, &p[1].x1));
    if det.is_zero() {
        return Err(GfcError::DegenerateMap(
            "interpolation points coincide".into(),
        ));
    }
    let alpha = f.div(
        &f.sub(&f.mul(&p[2].x0, &p[0].x1), &f.mul(&p[0].x0, &p[2].x1)),
        &det,
    )?;
    let beta = f.div(
        &f.sub(&f.mul(&p[1].x0, &p[2].x1), &f.mul(&p[2].x0, &p[1].x1)),
        &det,
    )?;
    Moebius::new(
        f,
        f.mul(&alpha, &p[1].x0),
        f.mul(&beta, &p[0].x0),
        f.mul(&alpha, &p[1].x1),
        f.mul(&beta, &p[0].x1),
    )
}

/// Fiber sizes of `inv` on `P^1(e)`: value → count, for the nonempty fibers.
pub fn fiber_sizes(inv: &RatFn, from: &Field, e: &Field) -> Result<HashMap<ProjPoint, usize>> {
    let g = inv.embed(from, e)?;
    let mut out = HashMap::new();
    for p in ProjPoint::all(e) {
        *out.entry(g.eval_proj(&p, e)).or_insert(0) += 1;
    }
    Ok(out)
}

/// Every nonempty fiber has size `n`, apart from at most two.
pub fn fiber_law_holds(inv: &RatFn, n: u64, from: &Field, e: &Field) -> Result<bool> {
    let sizes = fiber_sizes(inv, from, e)?;
    Ok(sizes.values().filter(|&&k| k as u64 != n).count() <= 2)
}

/// All certificates for one `(q, n, kind)`.
#[derive(Debug, Clone, Serialize)]
pub struct QuotientCertificate {
    pub q: u128,
    pub n: u64,
    pub kind: QuotientKind,
    pub invariant: bool,
    pub map_degree: usize,
    pub rational: bool,
    pub trace_relation: bool,
    pub fiber_law: bool,
}

impl QuotientCertificate {
    pub fn pass(&self) -> bool {
        self.invariant
            && self.map_degree as u64 == self.n
            && self.rational
            && self.trace_relation
            && self.fiber_law
    }
}

pub fn certify_quotient(t: &Tower, n: u64, kind: QuotientKind) -> Result<QuotientCertificate> {
    let f = &t.base;
    let (datum, rational) = match kind {
        QuotientKind::Split => (split_quotient(f, n)?, true),
        QuotientKind::Nonsplit => match nonsplit_quotient(t, n) {
            Ok(d) => (d, true),
            Err(GfcError::TheoremViolation(_)) => {
                return Ok(QuotientCertificate {
                    q: t.q(),
                    n,
                    kind,
                    invariant: false,
                    map_degree: 0,
                    rational: false,
                    trace_relation: false,
                    fiber_law: false,
                })
            }
            Err(e) => return Err(e),
        },
    };
    let invariant = datum.is_invariant(f);
    let map_degree = datum.invariant.map_degree();
    let tr = trace_and_norm(f, Some(t), n, kind)?;
    let trace_relation = tr.compose(&datum.generator.as_ratfn(f), f) == tr
        && tr.map_degree() as u64 == n
        && moebius_relating(t, &datum.invariant, &tr).is_ok();
    let e = match kind {
        QuotientKind::Split => f.clone(),
        QuotientKind::Nonsplit => t.top.clone(),
    };
    let fiber_law = fiber_law_holds(&datum.invariant, n, f, &e)?;
    Ok(QuotientCertificate {
        q: t.q(),
        n,
        kind,
        invariant,
        map_degree,
        rational,
        trace_relation,
        fiber_law,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;

    fn rf(f: &Field, n: &[i64], d: &[i64]) -> RatFn {
        RatFn::new(Poly::from_ints(f, n), Poly::from_ints(f, d), f).unwrap()
    }

    #[test]
    fn split_examples() {
        let f = make_field(7, 1).unwrap();
        let d = split_quotient(&f, 3).unwrap();
        assert_eq!(d.invariant, rf(&f, &[0, 0, 0, 1], &[1]));
        assert!(d.is_invariant(&f));
        assert_eq!(split_quotient(&f, 1).unwrap().invariant, RatFn::x(&f));
        let g = make_field(5, 1).unwrap();
        assert!(split_quotient(&g, 4).unwrap().is_invariant(&g));
    }

    #[test]
    fn nonsplit_closed_forms() {
        let f7 = make_field(7, 1).unwrap();
        let t = Tower::new(&f7).unwrap();
        let d = nonsplit_quotient(&t, 2).unwrap();
        // 2s x / (x^2 + s), s = 3
        assert_eq!(d.invariant, rf(&f7, &[0, 6], &[3, 0, 1]));
        assert!(d.is_invariant(&f7));
        let f5 = make_field(5, 1).unwrap();
        let t5 = Tower::new(&f5).unwrap();
        let d = nonsplit_quotient(&t5, 3).unwrap();
        assert_eq!(d.invariant, rf(&f5, &[4, 0, 1], &[0, 1, 0, 1]));
        assert!(d.is_invariant(&f5));
    }

    #[test]
    fn h_certificates() {
        let f7 = make_field(7, 1).unwrap();
        let t = Tower::new(&f7).unwrap();
        for n in [1, 2, 4, 8] {
            let h = intermediate_h(&t, n).unwrap();
            assert!(
                h.invariant && h.z_relation_negated && h.lambda_certificate,
                "n = {n}"
            );
        }
    }

    #[test]
    fn trace_examples() {
        let f7 = make_field(7, 1).unwrap();
        let t = Tower::new(&f7).unwrap();
        assert_eq!(
            trace_and_norm(&f7, Some(&t), 3, QuotientKind::Split).unwrap(),
            rf(&f7, &[0, 0, 0, 1], &[1])
        );
        let tr = trace_and_norm(&f7, Some(&t), 2, QuotientKind::Nonsplit).unwrap();
        assert_eq!(tr, rf(&f7, &[3, 0, 1], &[0, 1]));
        let z = nonsplit_quotient(&t, 2).unwrap().invariant;
        // Tr = 2s / z
        assert_eq!(
            moebius_relating(&t, &z, &tr).unwrap(),
            Moebius::from_ints(&f7, [0, 6, 1, 0]).unwrap()
        );
        let f5 = make_field(5, 1).unwrap();
        let t5 = Tower::new(&f5).unwrap();
        let c = certify_quotient(&t5, 3, QuotientKind::Nonsplit).unwrap();
        assert!(c.pass(), "{c:?}");
    }

    #[test]
    fn divisibility_errors() {
        let f7 = make_field(7, 1).unwrap();
        let t = Tower::new(&f7).unwrap();
        assert!(matches!(
            split_quotient(&f7, 4),
            Err(GfcError::NoSuchSubgroup { .. })
        ));
        assert!(matches!(
            nonsplit_quotient(&t, 3),
            Err(GfcError::NoSuchSubgroup { .. })
        ));
        assert!(intermediate_h(&t, 5).is_err());
    }
}
