//! `PGL(2, F)` acting on the projective line, the two kinds of tame cyclic
//! subgroups, and the exhaustive audit of element orders in `PGL(2, q)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, GfcError, Result};
use crate::ffield::{gcd, is_prime, make_field, root_of_unity, Elem, Field, Tower};
use crate::places::RatFn;
use crate::poly::Poly;

/// `(x0 : x1)`, scaled so the last nonzero coordinate is 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ProjPoint {
    pub x0: Elem,
    pub x1: Elem,
}

impl ProjPoint {
    pub fn new(x0: Elem, x1: Elem, f: &Field) -> Result<ProjPoint> {
        if !x1.is_zero() {
            let inv = f.inv(&x1)?;
            Ok(ProjPoint {
                x0: f.mul(&x0, &inv),
                x1: f.one(),
            })
        } else if !x0.is_zero() {
            Ok(ProjPoint {
                x0: f.one(),
                x1: Elem::ZERO,
            })
        } else {
            invalid("(0 : 0) is not a point")
        }
    }

    pub fn finite(a: Elem, f: &Field) -> ProjPoint {
        ProjPoint { x0: a, x1: f.one() }
    }

    pub fn infinity(f: &Field) -> ProjPoint {
        ProjPoint {
            x0: f.one(),
            x1: Elem::ZERO,
        }
    }

    pub fn is_infinity(&self) -> bool {
        self.x1.is_zero()
    }

    pub fn affine(&self, _f: &Field) -> Option<Elem> {
        (!self.x1.is_zero()).then_some(self.x0)
    }

    pub fn embed(&self, from: &Field, to: &Field) -> Result<ProjPoint> {
        Ok(ProjPoint {
            x0: to.embed_from(from, &self.x0)?,
            x1: to.embed_from(from, &self.x1)?,
        })
    }

    /// All points of `P^1(f)`: affine ones in canonical order, then infinity.
    pub fn all(f: &Field) -> impl Iterator<Item = ProjPoint> + '_ {
        f.elements()
            .map(move |a| ProjPoint::finite(a, f))
            .chain(std::iter::once(ProjPoint::infinity(f)))
    }
}

/// `x ↦ (ax + b)/(cx + d)`, scaled so the first nonzero entry (row-major) is 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Moebius {
    pub a: Elem,
    pub b: Elem,
    pub c: Elem,
    pub d: Elem,
}

#[derive(Debug, Clone, Serialize)]
pub struct MoebiusJson {
    pub matrix: [Vec<u64>; 4],
}

impl Moebius {
    pub fn new(f: &Field, a: Elem, b: Elem, c: Elem, d: Elem) -> Result<Moebius> {
        if f.sub(&f.mul(&a, &d), &f.mul(&b, &c)).is_zero() {
            return Err(GfcError::DegenerateMap("determinant is zero".into()));
        }
        let lead = [a, b, c, d].into_iter().find(|e| !e.is_zero()).unwrap();
        let k = f.inv(&lead)?;
        Ok(Moebius {
            a: f.mul(&a, &k),
            b: f.mul(&b, &k),
            c: f.mul(&c, &k),
            d: f.mul(&d, &k),
        })
    }

    pub fn from_ints(f: &Field, e: [i64; 4]) -> Result<Moebius> {
        Moebius::new(
            f,
            f.from_int(e[0]),
            f.from_int(e[1]),
            f.from_int(e[2]),
            f.from_int(e[3]),
        )
    }

    pub fn identity(f: &Field) -> Moebius {
        Moebius {
            a: f.one(),
            b: Elem::ZERO,
            c: Elem::ZERO,
            d: f.one(),
        }
    }

    pub fn entries(&self) -> [Elem; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self, f: &Field) -> Elem {
        f.sub(&f.mul(&self.a, &self.d), &f.mul(&self.b, &self.c))
    }

    pub fn is_identity(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &Moebius, f: &Field) -> Moebius {
        let m = |x: &Elem, y: &Elem, z: &Elem, w: &Elem| f.add(&f.mul(x, y), &f.mul(z, w));
        Moebius::new(
            f,
            m(&self.a, &o.a, &self.b, &o.c),
            m(&self.a, &o.b, &self.b, &o.d),
            m(&self.c, &o.a, &self.d, &o.c),
            m(&self.c, &o.b, &self.d, &o.d),
        )
        .expect("product of invertible matrices")
    }

    pub fn inverse(&self, f: &Field) -> Moebius {
        Moebius::new(f, self.d, f.neg(&self.b), f.neg(&self.c), self.a).expect("invertible")
    }

    pub fn pow(&self, k: u64, f: &Field) -> Moebius {
        let mut r = Moebius::identity(f);
        for _ in 0..k {
            r = r.compose(self, f);
        }
        r
    }

    /// Order in `PGL(2)`, searched up to `bound`.
    pub fn order(&self, f: &Field, bound: u64) -> Option<u64> {
        let mut r = *self;
        for k in 1..=bound {
            if r.is_identity() {
                return Some(k);
            }
            r = r.compose(self, f);
        }
        None
    }

    pub fn act(&self, p: &ProjPoint, f: &Field) -> ProjPoint {
        let x0 = f.add(&f.mul(&self.a, &p.x0), &f.mul(&self.b, &p.x1));
        let x1 = f.add(&f.mul(&self.c, &p.x0), &f.mul(&self.d, &p.x1));
        ProjPoint::new(x0, x1, f).expect("invertible map")
    }

    pub fn embed(&self, from: &Field, to: &Field) -> Result<Moebius> {
        let e = |x: &Elem| to.embed_from(from, x);
        Moebius::new(to, e(&self.a)?, e(&self.b)?, e(&self.c)?, e(&self.d)?)
    }

    pub fn as_ratfn(&self, f: &Field) -> RatFn {
        RatFn::new(
            Poly::from_coeffs(vec![self.b, self.a]),
            Poly::from_coeffs(vec![self.d, self.c]),
            f,
        )
        .expect("invertible map")
    }

    pub fn to_json(&self, f: &Field) -> MoebiusJson {
        MoebiusJson {
            matrix: self.entries().map(|e| f.rel_coords_flat(&e)),
        }
    }
}

/// `x ↦ ζ_n x`.
pub fn split_cyclic_generator(f: &Field, n: u64) -> Result<Moebius> {
    if n == 0 || !(f.order() - 1).is_multiple_of(n as u128) {
        return Err(GfcError::NoSuchSubgroup {
            order: n,
            q: f.order(),
        });
    }
    let z = root_of_unity(f, n)?;
    Moebius::new(f, z, Elem::ZERO, Elem::ZERO, f.one())
}

/// The nonsplit generator `τ = (u sv; v u)` with `λ = u + iv`.
#[derive(Debug, Clone)]
pub struct NonsplitGenerator {
    pub tau: Moebius,
    /// `λ` in the top field of the tower.
    pub lambda: Elem,
    /// Whether `λ` is a primitive `2n`-th root of unity.
    pub primitive_2n: bool,
}

/// Order-`n` subgroup of `PGL(2, q)` fixing `±i`.
///
/// `λ = g^{(q²-1)/(2n)}` for the least generator `g` of `F_{q²}^*`. When that
/// choice gives an element of the wrong projective order (`n` even and
/// `q ≡ 1 mod 4`), `λ = g^{(q+1)/n}` is used instead.
pub fn nonsplit_cyclic_generator(t: &Tower, n: u64) -> Result<NonsplitGenerator> {
    let q = t.q();
    if n == 0 || !(q + 1).is_multiple_of(n as u128) {
        return Err(GfcError::NoSuchSubgroup { order: n, q });
    }
    let top = &t.top;
    let g = top.primitive_root();
    let build = |lambda: Elem| -> Result<Moebius> {
        let (u, v) = t.split(&lambda);
        Moebius::new(&t.base, u, t.base.mul(&t.s, &v), v, u)
    };
    let candidates = [
        ((q * q - 1) / (2 * n as u128), true),
        ((q + 1) / n as u128, false),
    ];
    for (e, prim) in candidates {
        let lambda = top.pow(&g, e);
        let tau = build(lambda)?;
        if tau.order(&t.base, n) == Some(n) {
            return Ok(NonsplitGenerator {
                tau,
                lambda,
                primitive_2n: prim,
            });
        }
    }
    Err(GfcError::NoSuchSubgroup { order: n, q })
}

/// The scalar elements in `<λ>` (powers of `λ` lying in `F_q`), canonically sorted.
pub fn scalar_kernel(t: &Tower, lambda: &Elem) -> Result<Vec<Elem>> {
    let ord = t.top.mult_order(lambda)?;
    let mut out: Vec<Elem> = (0..ord)
        .map(|j| t.top.pow(lambda, j))
        .filter_map(|x| t.restrict(&x))
        .collect();
    out.sort_by(|a, b| t.base.canonical_cmp(a, b));
    out.dedup();
    Ok(out)
}

/// Points of `P^1(e)` fixed by `m` (entries in `from`, a subfield of `e`).
pub fn fixed_points(m: &Moebius, from: &Field, e: &Field) -> Result<Vec<ProjPoint>> {
    let me = m.embed(from, e)?;
    if me.is_identity() {
        if e.order() > 1 << 20 {
            return Err(GfcError::DeskScaleExceeded(
                "identity on a huge projective line".into(),
            ));
        }
        return Ok(ProjPoint::all(e).collect());
    }
    // c x^2 + (d - a) x - b = 0, plus infinity when c = 0
    let quad = Poly::from_coeffs(vec![e.neg(&me.b), e.sub(&me.d, &me.a), me.c]);
    let mut pts: Vec<ProjPoint> = quad
        .roots(e)
        .into_iter()
        .map(|r| ProjPoint::finite(r, e))
        .collect();
    if me.c.is_zero() {
        pts.push(ProjPoint::infinity(e));
    }
    Ok(pts)
}

/// `(p, h)` with `q = p^h`, if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u32, usize)> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    if !is_prime(p) {
        return None;
    }
    let mut r = q;
    let mut h = 0;
    while r.is_multiple_of(p) {
        r /= p;
        h += 1;
    }
    (r == 1).then_some((p as u32, h))
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub q: u64,
    pub group_order: u64,
    pub orders_histogram: BTreeMap<u64, u64>,
    pub dichotomy_violations: Vec<String>,
    pub pass: bool,
}

pub const AUDIT_MAX_Q: u64 = 169;

/// Exhaustive pass over `PGL(2, q)`: every element of order prime to `p`
/// has order dividing `q - 1` or `q + 1`, and its fixed points are
/// `F_q`-rational exactly in the first case (order 2 may go either way).
pub fn dickson_audit(q: u64) -> Result<AuditReport> {
    if q > AUDIT_MAX_Q {
        return Err(GfcError::DeskScaleExceeded(format!(
            "q = {q} > {AUDIT_MAX_Q}"
        )));
    }
    let (p, h) = prime_power(q)
        .ok_or_else(|| GfcError::InvalidParameter(format!("{q} is not a prime power")))?;
    let f: Arc<Field> = make_field(p, h)?;
    let elems: Vec<Elem> = f.elements().collect();
    let one = f.one();
    let mut maps = Vec::with_capacity((q * q * q) as usize);
    for b in &elems {
        for c in &elems {
            for d in &elems {
                if let Ok(m) = Moebius::new(&f, one, *b, *c, *d) {
                    maps.push(m);
                }
            }
        }
    }
    for c in &elems {
        for d in &elems {
            if let Ok(m) = Moebius::new(&f, Elem::ZERO, one, *c, *d) {
                maps.push(m);
            }
        }
    }
    let mut hist = BTreeMap::new();
    let mut violations = Vec::new();
    for m in &maps {
        let k = m
            .order(&f, q + 1)
            .ok_or_else(|| GfcError::OracleFailure("order exceeds q + 1".into()))?;
        *hist.entry(k).or_insert(0u64) += 1;
        if k == 1 || k % p as u64 == 0 {
            continue;
        }
        let split = (q - 1).is_multiple_of(k);
        let nonsplit = (q + 1).is_multiple_of(k);
        if !split && !nonsplit {
            violations.push(format!("{m:?}: order {k} divides neither q-1 nor q+1"));
            continue;
        }
        // fixed points are rational iff c = 0 or the discriminant is a square
        let disc = f.add(
            &f.pow(&f.sub(&m.d, &m.a), 2),
            &f.scale_int(&f.mul(&m.b, &m.c), 4),
        );
        let rational = m.c.is_zero() || f.is_square(&disc);
        let ok = if k == 2 {
            true
        } else if rational {
            split
        } else {
            nonsplit
        };
        if !ok {
            violations.push(format!(
                "{m:?}: order {k}, rational fixed points = {rational}"
            ));
        }
    }
    let group_order = maps.len() as u64;
    let expected = q * (q * q - 1);
    if group_order != expected {
        violations.push(format!(
            "enumerated {group_order} elements, expected {expected}"
        ));
    }
    let pass = violations.is_empty();
    Ok(AuditReport {
        q,
        group_order,
        orders_histogram: hist,
        dichotomy_violations: violations,
        pass,
    })
}

/// Sanity helper for reports: `gcd(k, p) = 1`.
pub fn is_tame(k: u64, p: u32) -> bool {
    gcd(k, p as u64) == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;

    #[test]
    fn act_examples() {
        let f = make_field(7, 1).unwrap();
        let m = Moebius::from_ints(&f, [0, 3, 1, 0]).unwrap();
        let one = ProjPoint::finite(f.one(), &f);
        assert_eq!(m.act(&one, &f), ProjPoint::finite(f.from_int(3), &f));
        assert_eq!(Moebius::identity(&f).act(&one, &f), one);
        assert!(Moebius::from_ints(&f, [1, 2, 2, 4]).is_err());
    }

    #[test]
    fn split_generators() {
        let f = make_field(7, 1).unwrap();
        assert_eq!(
            split_cyclic_generator(&f, 3).unwrap(),
            Moebius::from_ints(&f, [2, 0, 0, 1]).unwrap()
        );
        assert_eq!(
            split_cyclic_generator(&f, 6).unwrap(),
            Moebius::from_ints(&f, [3, 0, 0, 1]).unwrap()
        );
        assert!(matches!(
            split_cyclic_generator(&f, 4),
            Err(GfcError::NoSuchSubgroup { .. })
        ));
    }

    #[test]
    fn nonsplit_generators() {
        let f7 = make_field(7, 1).unwrap();
        let t = Tower::new(&f7).unwrap();
        assert_eq!(t.s, f7.from_int(3));
        let g2 = nonsplit_cyclic_generator(&t, 2).unwrap();
        assert_eq!(g2.tau, Moebius::from_ints(&f7, [0, 3, 1, 0]).unwrap());
        let g4 = nonsplit_cyclic_generator(&t, 4).unwrap();
        assert_eq!(g4.tau.order(&f7, 10), Some(4));
        assert_eq!(t.top.mult_order(&g4.lambda).unwrap(), 8);
        let fx = fixed_points(&g4.tau, &f7, &t.top).unwrap();
        let mut want = vec![
            ProjPoint::finite(t.i, &t.top),
            ProjPoint::finite(t.top.neg(&t.i), &t.top),
        ];
        want.sort_by(|a, b| t.top.canonical_cmp(&a.x0, &b.x0));
        assert_eq!(fx, want);
        assert!(nonsplit_cyclic_generator(&t, 3).is_err());
        // ker-scalar law
        assert_eq!(
            scalar_kernel(&t, &g4.lambda).unwrap(),
            vec![f7.one(), f7.from_int(-1)]
        );

        let f5 = make_field(5, 1).unwrap();
        let t5 = Tower::new(&f5).unwrap();
        let g3 = nonsplit_cyclic_generator(&t5, 3).unwrap();
        assert_eq!(g3.tau.order(&f5, 10), Some(3));
        assert!(fixed_points(&g3.tau, &f5, &f5).unwrap().is_empty());
        // q = 5, n = 2: no primitive 4th root works, fallback used
        let g2 = nonsplit_cyclic_generator(&t5, 2).unwrap();
        assert!(!g2.primitive_2n);
        assert_eq!(g2.tau.order(&f5, 10), Some(2));
    }

    #[test]
    fn fixed_point_examples() {
        let f = make_field(7, 1).unwrap();
        let m = Moebius::from_ints(&f, [2, 0, 0, 1]).unwrap();
        assert_eq!(
            fixed_points(&m, &f, &f).unwrap(),
            vec![ProjPoint::finite(f.zero(), &f), ProjPoint::infinity(&f)]
        );
        assert_eq!(
            fixed_points(&Moebius::identity(&f), &f, &f).unwrap().len(),
            8
        );
    }

    #[test]
    fn small_audits() {
        let r = dickson_audit(5).unwrap();
        assert!(r.pass);
        assert_eq!(r.group_order, 120);
        assert_eq!(
            r.orders_histogram.keys().copied().collect::<Vec<_>>(),
            vec![1, 2, 3, 4, 5, 6]
        );
        let r = dickson_audit(3).unwrap();
        assert_eq!(r.group_order, 24);
        assert_eq!(
            r.orders_histogram.keys().copied().collect::<Vec<_>>(),
            vec![1, 2, 3, 4]
        );
        let r = dickson_audit(7).unwrap();
        assert_eq!(r.group_order, 336);
        assert_eq!(
            r.orders_histogram.keys().copied().collect::<Vec<_>>(),
            vec![1, 2, 3, 4, 6, 7, 8]
        );
        assert!(matches!(
            dickson_audit(173),
            Err(GfcError::DeskScaleExceeded(_))
        ));
        assert!(dickson_audit(15).is_err());
    }
}
