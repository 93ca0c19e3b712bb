//! Rational functions in one variable, places of `F(x)`, valuations and
//! principal divisors.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{invalid, GfcError, Result};
use crate::ffield::{Elem, Field};
use crate::moebius::ProjPoint;
use crate::poly::Poly;

/// `num / den` with `gcd(num, den) = 1` and `den` monic.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    pub fn new(num: Poly, den: Poly, f: &Field) -> Result<RatFn> {
        if den.is_zero() {
            return Err(GfcError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFn {
                num,
                den: Poly::one(f),
            });
        }
        let g = num.gcd(&den, f);
        let (num, den) = (num.div_exact(&g, f), den.div_exact(&g, f));
        let lc = f.inv(&den.lead())?;
        Ok(RatFn {
            num: num.scale(&lc, f),
            den: den.scale(&lc, f),
        })
    }

    pub fn from_poly(p: Poly, f: &Field) -> RatFn {
        RatFn {
            num: p,
            den: Poly::one(f),
        }
    }

    pub fn constant(c: Elem, f: &Field) -> RatFn {
        RatFn::from_poly(Poly::constant(c), f)
    }

    pub fn x(f: &Field) -> RatFn {
        RatFn::from_poly(Poly::x(f), f)
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// `max(deg num, deg den)`, the degree of `x ↦ self(x)` as a map of `P^1`.
    pub fn map_degree(&self) -> usize {
        self.num.deg0().max(self.den.deg0())
    }

    pub fn add(&self, o: &RatFn, f: &Field) -> RatFn {
        let num = self.num.mul(&o.den, f).add(&o.num.mul(&self.den, f), f);
        RatFn::new(num, self.den.mul(&o.den, f), f).expect("nonzero denominator")
    }

    pub fn sub(&self, o: &RatFn, f: &Field) -> RatFn {
        self.add(&o.neg(f), f)
    }

    pub fn neg(&self, f: &Field) -> RatFn {
        RatFn {
            num: self.num.neg(f),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &RatFn, f: &Field) -> RatFn {
        RatFn::new(self.num.mul(&o.num, f), self.den.mul(&o.den, f), f)
            .expect("nonzero denominator")
    }

    pub fn scale(&self, c: &Elem, f: &Field) -> RatFn {
        self.mul(&RatFn::constant(*c, f), f)
    }

    pub fn inv(&self, f: &Field) -> Result<RatFn> {
        RatFn::new(self.den.clone(), self.num.clone(), f)
    }

    pub fn div(&self, o: &RatFn, f: &Field) -> Result<RatFn> {
        Ok(self.mul(&o.inv(f)?, f))
    }

    pub fn pow(&self, e: i64, f: &Field) -> Result<RatFn> {
        let base = if e < 0 { self.inv(f)? } else { self.clone() };
        let k = e.unsigned_abs();
        RatFn::new(base.num.pow(k, f), base.den.pow(k, f), f)
    }

    /// `self(g(x))`.
    pub fn compose(&self, g: &RatFn, f: &Field) -> RatFn {
        let d = self.map_degree();
        let homog = |p: &Poly| {
            let mut acc = Poly::zero();
            for (k, c) in p.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let term = g.num.pow(k as u64, f).mul(&g.den.pow((d - k) as u64, f), f);
                acc = acc.add(&term.scale(c, f), f);
            }
            acc
        };
        RatFn::new(homog(&self.num), homog(&self.den), f)
            .expect("composition with a degenerate map")
    }

    /// Value at an affine point; `None` at a pole.
    pub fn eval(&self, x: &Elem, f: &Field) -> Option<Elem> {
        let d = self.den.eval(x, f);
        (!d.is_zero()).then(|| f.mul(&self.num.eval(x, f), &f.inv(&d).unwrap()))
    }

    /// Value as a point of `P^1`, with `x` itself projective.
    pub fn eval_proj(&self, x: &ProjPoint, f: &Field) -> ProjPoint {
        let d = self.map_degree();
        let hom = |p: &Poly| -> Elem {
            // Σ c_k x0^k x1^(d-k)
            let mut acc = Elem::ZERO;
            for (k, c) in p.coeffs().iter().enumerate() {
                let t = f.mul(&f.pow(&x.x0, k as u128), &f.pow(&x.x1, (d - k) as u128));
                acc = f.add(&acc, &f.mul(c, &t));
            }
            acc
        };
        ProjPoint::new(hom(&self.num), hom(&self.den), f)
            .expect("coprime numerator and denominator")
    }

    pub fn embed(&self, from: &Field, to: &Field) -> Result<RatFn> {
        RatFn::new(self.num.embed(from, to)?, self.den.embed(from, to)?, to)
    }

    /// Coefficients restricted to a subfield via `restrict`; `None` when some
    /// coefficient lies outside.
    pub fn restrict(&self, restrict: impl Fn(&Elem) -> Option<Elem>, sub: &Field) -> Option<RatFn> {
        let r = |p: &Poly| -> Option<Poly> {
            Some(Poly::from_coeffs(
                p.coeffs()
                    .iter()
                    .map(&restrict)
                    .collect::<Option<Vec<_>>>()?,
            ))
        };
        RatFn::new(r(&self.num)?, r(&self.den)?, sub).ok()
    }

    /// `c_0` and `v` with `self = c_0 t^v + …` in the uniformizer `t` at `x0`
    /// (`t = x - x0`, or `1/x` at infinity).
    pub fn leading_term(&self, x0: &ProjPoint, f: &Field) -> Result<(Elem, i64)> {
        if self.is_zero() {
            return invalid("zero function has no leading term");
        }
        match x0.affine(f) {
            None => {
                let v = self.den.deg0() as i64 - self.num.deg0() as i64;
                Ok((f.div(&self.num.lead(), &self.den.lead())?, v))
            }
            Some(a) => {
                let (vn, cn) = strip_root(&self.num, &a, f);
                let (vd, cd) = strip_root(&self.den, &a, f);
                Ok((f.div(&cn, &cd)?, vn as i64 - vd as i64))
            }
        }
    }

    /// Coefficient arrays for reports.
    pub fn to_json(&self, f: &Field) -> RatFnJson {
        let enc = |p: &Poly| p.coeffs().iter().map(|c| f.rel_coords_flat(c)).collect();
        RatFnJson {
            num: enc(&self.num),
            den: enc(&self.den),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RatFnJson {
    pub num: Vec<Vec<u64>>,
    pub den: Vec<Vec<u64>>,
}

/// Multiplicity of the root `a` and the value of the cofactor at `a`.
fn strip_root(p: &Poly, a: &Elem, f: &Field) -> (usize, Elem) {
    let lin = Poly::from_coeffs(vec![f.neg(a), f.one()]);
    let mut q = p.clone();
    let mut k = 0;
    loop {
        let v = q.eval(a, f);
        if !v.is_zero() {
            return (k, v);
        }
        q = q.div_exact(&lin, f);
        k += 1;
    }
}

/// A place of the rational function field `F(x)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Place {
    Finite(Poly),
    Infinity,
}

impl Place {
    pub fn degree(&self) -> usize {
        match self {
            Place::Finite(p) => p.deg0(),
            Place::Infinity => 1,
        }
    }

    /// Finite places first in canonical polynomial order, infinity last.
    pub fn canonical_cmp(&self, o: &Place, f: &Field) -> Ordering {
        match (self, o) {
            (Place::Finite(a), Place::Finite(b)) => a.canonical_cmp(b, f),
            (Place::Finite(_), Place::Infinity) => Ordering::Less,
            (Place::Infinity, Place::Finite(_)) => Ordering::Greater,
            (Place::Infinity, Place::Infinity) => Ordering::Equal,
        }
    }
}

/// Multiplicity of the monic irreducible `pi` in `p` (nonzero).
fn multiplicity(p: &Poly, pi: &Poly, f: &Field) -> i64 {
    let mut q = p.clone();
    let mut k = 0;
    loop {
        let (d, r) = q.divrem(pi, f).expect("nonzero place polynomial");
        if !r.is_zero() {
            return k;
        }
        q = d;
        k += 1;
    }
}

pub fn valuation(place: &Place, h: &RatFn, f: &Field) -> Result<i64> {
    if h.is_zero() {
        return invalid("valuation of zero is not represented");
    }
    Ok(match place {
        Place::Infinity => h.den.deg0() as i64 - h.num.deg0() as i64,
        Place::Finite(pi) => multiplicity(&h.num, pi, f) - multiplicity(&h.den, pi, f),
    })
}

/// A finitely supported divisor on `P^1`, stored in canonical place order.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Divisor {
    pub terms: Vec<(Place, i64)>,
}

impl Divisor {
    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|(p, k)| p.degree() as i64 * k).sum()
    }

    pub fn coeff(&self, place: &Place) -> i64 {
        self.terms
            .iter()
            .find(|(p, _)| p == place)
            .map_or(0, |(_, k)| *k)
    }
}

pub fn principal_divisor(h: &RatFn, f: &Field) -> Result<Divisor> {
    if h.is_zero() {
        return invalid("zero function has no divisor");
    }
    let mut terms = Vec::new();
    for (g, k) in h.num.factorize(f)?.1 {
        terms.push((Place::Finite(g), k as i64));
    }
    for (g, k) in h.den.factorize(f)?.1 {
        terms.push((Place::Finite(g), -(k as i64)));
    }
    terms.sort_by(|a, b| a.0.canonical_cmp(&b.0, f));
    let v_inf = h.den.deg0() as i64 - h.num.deg0() as i64;
    if v_inf != 0 {
        terms.push((Place::Infinity, v_inf));
    }
    Ok(Divisor { terms })
}

/// Whether `h = c·g^d` over `f` with `c` a `d`-th power in `f`.
pub fn is_dth_power(h: &RatFn, d: u64, f: &Field) -> Result<bool> {
    if d < 2 {
        return invalid("exponent must be at least 2");
    }
    if h.is_zero() {
        return invalid("zero function");
    }
    Ok(valuations_divisible(h, d, f)? && f.is_nth_power(&h.num.lead(), d))
}

/// Every valuation of `h` divisible by `d`: `h` is a `d`-th power over the
/// algebraic closure.
pub fn valuations_divisible(h: &RatFn, d: u64, f: &Field) -> Result<bool> {
    let div = principal_divisor(h, f)?;
    Ok(div.terms.iter().all(|(_, k)| k.rem_euclid(d as i64) == 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;

    fn rf(f: &Field, n: &[i64], d: &[i64]) -> RatFn {
        RatFn::new(Poly::from_ints(f, n), Poly::from_ints(f, d), f).unwrap()
    }

    #[test]
    fn valuations_of_x3_over_x_minus_1() {
        let f = make_field(7, 1).unwrap();
        let h = rf(&f, &[0, 0, 0, 1], &[-1, 1]);
        assert_eq!(valuation(&Place::Finite(Poly::x(&f)), &h, &f).unwrap(), 3);
        assert_eq!(
            valuation(&Place::Finite(Poly::from_ints(&f, &[-1, 1])), &h, &f).unwrap(),
            -1
        );
        assert_eq!(valuation(&Place::Infinity, &h, &f).unwrap(), -2);
        let one = rf(&f, &[1], &[1]);
        assert_eq!(valuation(&Place::Infinity, &one, &f).unwrap(), 0);
        let c = rf(&f, &[1, 0, 0, -1], &[1]);
        assert_eq!(
            valuation(&Place::Finite(Poly::from_ints(&f, &[-2, 1])), &c, &f).unwrap(),
            1
        );
        assert!(valuation(&Place::Infinity, &rf(&f, &[0], &[1]), &f).is_err());
    }

    #[test]
    fn divisors() {
        let f = make_field(7, 1).unwrap();
        let d = principal_divisor(&rf(&f, &[-1, 0, 0, 1], &[1]), &f).unwrap();
        assert_eq!(d.terms.len(), 4);
        assert_eq!(d.coeff(&Place::Infinity), -3);
        assert_eq!(d.degree(), 0);
        let g = make_field(5, 1).unwrap();
        let d = principal_divisor(&rf(&g, &[-2, 0, 1], &[0, 1]), &g).unwrap();
        assert_eq!(
            d.terms,
            vec![
                (Place::Finite(Poly::x(&g)), -1),
                (Place::Finite(Poly::from_ints(&g, &[-2, 0, 1])), 1),
                (Place::Infinity, -1)
            ]
        );
        assert_eq!(d.degree(), 0);
    }

    #[test]
    fn dth_powers() {
        let f = make_field(7, 1).unwrap();
        assert!(is_dth_power(&rf(&f, &[0, 0, 1], &[1]), 2, &f).unwrap());
        assert!(!is_dth_power(&rf(&f, &[1, 0, 0, -1], &[1]), 3, &f).unwrap());
        assert!(is_dth_power(&rf(&f, &[0, 0, 4], &[1]), 2, &f).unwrap());
        assert!(!is_dth_power(&rf(&f, &[0, 0, 3], &[1]), 2, &f).unwrap());
    }

    #[test]
    fn canonical_form_and_compose() {
        let f = make_field(7, 1).unwrap();
        let h = rf(&f, &[0, 2], &[0, 0, 2]);
        assert_eq!(h, rf(&f, &[1], &[0, 1]));
        // (x^2) ∘ (1/x) = 1/x^2
        let sq = rf(&f, &[0, 0, 1], &[1]);
        let inv = rf(&f, &[1], &[0, 1]);
        assert_eq!(sq.compose(&inv, &f), rf(&f, &[1], &[0, 0, 1]));
    }
}
