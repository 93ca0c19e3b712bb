//! Dense univariate polynomials over a [`Field`] and their factorization.
//!
//! Factorization is square-free decomposition, distinct-degree splitting and
//! an equal-degree splitting driven by a deterministic sweep of trial
//! polynomials `x + c` (then `x^2 + x + c`), so results never depend on a
//! random source.

use std::cmp::Ordering;

use num_bigint::BigUint;

use crate::error::{invalid, GfcError, Result};
use crate::ffield::{prime_factors, Elem, Field};

/// Coefficients low degree first; no trailing zeros (the zero polynomial is empty).
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Poly {
    c: Vec<Elem>,
}

impl Poly {
    pub fn from_coeffs(mut c: Vec<Elem>) -> Poly {
        while c.last().is_some_and(|e| e.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn from_ints(f: &Field, c: &[i64]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&v| f.from_int(v)).collect())
    }

    pub fn zero() -> Poly {
        Poly { c: Vec::new() }
    }

    pub fn constant(a: Elem) -> Poly {
        Poly::from_coeffs(vec![a])
    }

    pub fn one(f: &Field) -> Poly {
        Poly::constant(f.one())
    }

    /// `c·x^k`.
    pub fn monomial(c: Elem, k: usize) -> Poly {
        let mut v = vec![Elem::ZERO; k + 1];
        v[k] = c;
        Poly::from_coeffs(v)
    }

    pub fn x(f: &Field) -> Poly {
        Poly::monomial(f.one(), 1)
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> Elem {
        self.c.get(k).copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg0(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lead(&self) -> Elem {
        self.c.last().copied().unwrap_or(Elem::ZERO)
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn is_one(&self, f: &Field) -> bool {
        self.c.len() == 1 && self.c[0] == f.one()
    }

    pub fn add(&self, o: &Poly, f: &Field) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::from_coeffs((0..n).map(|i| f.add(&self.coeff(i), &o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Poly, f: &Field) -> Poly {
        let n = self.c.len().max(o.c.len());
        Poly::from_coeffs((0..n).map(|i| f.sub(&self.coeff(i), &o.coeff(i))).collect())
    }

    pub fn neg(&self, f: &Field) -> Poly {
        Poly {
            c: self.c.iter().map(|a| f.neg(a)).collect(),
        }
    }

    pub fn scale(&self, k: &Elem, f: &Field) -> Poly {
        Poly::from_coeffs(self.c.iter().map(|a| f.mul(a, k)).collect())
    }

    pub fn mul(&self, o: &Poly, f: &Field) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Elem::ZERO; self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn pow(&self, mut e: u64, f: &Field) -> Poly {
        let mut r = Poly::one(f);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b, f);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b, f);
            }
        }
        r
    }

    pub fn divrem(&self, d: &Poly, f: &Field) -> Result<(Poly, Poly)> {
        let dd = d.degree().ok_or(GfcError::DivisionByZero)?;
        if self.c.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let inv = f.inv(&d.lead())?;
        let mut rem = self.c.clone();
        let mut q = vec![Elem::ZERO; rem.len() - dd];
        for k in (0..q.len()).rev() {
            let c = f.mul(&rem[k + dd], &inv);
            if c.is_zero() {
                continue;
            }
            q[k] = c;
            for j in 0..=dd {
                rem[k + j] = f.sub(&rem[k + j], &f.mul(&c, &d.c[j]));
            }
        }
        rem.truncate(dd);
        Ok((Poly::from_coeffs(q), Poly::from_coeffs(rem)))
    }

    pub fn rem(&self, d: &Poly, f: &Field) -> Poly {
        self.divrem(d, f).expect("division by zero polynomial").1
    }

    /// Exact quotient; panics if `d` is zero.
    pub fn div_exact(&self, d: &Poly, f: &Field) -> Poly {
        self.divrem(d, f).expect("division by zero polynomial").0
    }

    pub fn monic(&self, f: &Field) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = f.inv(&self.lead()).expect("nonzero lead");
        self.scale(&inv, f)
    }

    /// Monic gcd (zero only when both inputs are zero).
    pub fn gcd(&self, o: &Poly, f: &Field) -> Poly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b, f);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn derivative(&self, f: &Field) -> Poly {
        Poly::from_coeffs(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| f.scale_int(a, i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Elem, f: &Field) -> Elem {
        self.c
            .iter()
            .rev()
            .fold(Elem::ZERO, |acc, a| f.add(&f.mul(&acc, x), a))
    }

    /// `self(g(x))`.
    pub fn compose(&self, g: &Poly, f: &Field) -> Poly {
        self.c.iter().rev().fold(Poly::zero(), |acc, a| {
            acc.mul(g, f).add(&Poly::constant(*a), f)
        })
    }

    /// Coefficients mapped into an extension containing `f` in its tower.
    pub fn embed(&self, from: &Field, to: &Field) -> Result<Poly> {
        Ok(Poly::from_coeffs(
            self.c
                .iter()
                .map(|a| to.embed_from(from, a))
                .collect::<Result<_>>()?,
        ))
    }

    pub fn map_coeffs(&self, g: impl Fn(&Elem) -> Elem) -> Poly {
        Poly::from_coeffs(self.c.iter().map(g).collect())
    }

    pub fn mulmod(&self, o: &Poly, m: &Poly, f: &Field) -> Poly {
        self.mul(o, f).rem(m, f)
    }

    pub fn powmod(&self, mut e: u128, m: &Poly, f: &Field) -> Poly {
        let mut r = Poly::one(f).rem(m, f);
        let mut b = self.rem(m, f);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mulmod(&b, m, f);
            }
            e >>= 1;
            if e > 0 {
                b = b.mulmod(&b, m, f);
            }
        }
        r
    }

    pub fn powmod_big(&self, e: &BigUint, m: &Poly, f: &Field) -> Poly {
        let mut r = Poly::one(f).rem(m, f);
        let b = self.rem(m, f);
        for i in (0..e.bits()).rev() {
            r = r.mulmod(&r, m, f);
            if e.bit(i) {
                r = r.mulmod(&b, m, f);
            }
        }
        r
    }

    /// Canonical comparison: degree, then coefficient tuple (low degree first)
    /// in the field's canonical element order.
    pub fn canonical_cmp(&self, o: &Poly, f: &Field) -> Ordering {
        self.c.len().cmp(&o.c.len()).then_with(|| {
            for (a, b) in self.c.iter().zip(&o.c) {
                match f.canonical_cmp(a, b) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }

    /// Square-free decomposition of a monic polynomial: pairs `(g_i, i)` with
    /// `self = ∏ g_i^i`, each `g_i` square-free.
    pub fn squarefree(&self, f: &Field) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.is_constant() {
            return out;
        }
        let monic = self.monic(f);
        let d = monic.derivative(f);
        let mut c = monic.gcd(&d, f);
        let mut w = monic.div_exact(&c, f);
        let mut i = 1;
        while !w.is_constant() {
            let y = w.gcd(&c, f);
            let z = w.div_exact(&y, f);
            if !z.is_constant() {
                out.push((z, i));
            }
            i += 1;
            w = y;
            c = c.div_exact(&w, f);
        }
        if !c.is_constant() {
            // c is a polynomial in x^p
            let p = f.p() as usize;
            let root_exp = f.order() / f.p() as u128;
            let root =
                Poly::from_coeffs(c.c.iter().step_by(p).map(|a| f.pow(a, root_exp)).collect());
            for (g, k) in root.squarefree(f) {
                out.push((g, k * p));
            }
        }
        out
    }

    /// Distinct-degree factorization of a monic square-free polynomial.
    fn ddf(&self, f: &Field) -> Vec<(Poly, usize)> {
        let q = f.order();
        let x = Poly::x(f);
        let mut rest = self.clone();
        let mut h = x.rem(&rest, f);
        let mut out = Vec::new();
        let mut d = 1;
        while rest.deg0() >= 2 * d {
            h = h.powmod(q, &rest, f);
            let g = h.sub(&x, f).gcd(&rest, f);
            if !g.is_constant() {
                rest = rest.div_exact(&g, f);
                h = h.rem(&rest, f);
                out.push((g, d));
            }
            d += 1;
        }
        if !rest.is_constant() {
            let dd = rest.deg0();
            out.push((rest, dd));
        }
        out
    }

    /// Splits a monic square-free product of irreducibles of degree `d`.
    fn edf(&self, d: usize, f: &Field, out: &mut Vec<Poly>) {
        let n = self.deg0();
        if n == d {
            out.push(self.clone());
            return;
        }
        let exp = (BigUint::from(f.order()).pow(d as u32) - 1u32) / 2u32;
        let one = Poly::one(f);
        let limit = f.order().min(512);
        for shape in 0..2usize {
            for idx in 0..limit {
                let c = f.element_at(idx);
                let a = if shape == 0 {
                    Poly::from_coeffs(vec![c, f.one()])
                } else {
                    Poly::from_coeffs(vec![c, f.one(), f.one()])
                };
                let b = if d == 1 {
                    a.powmod((f.order() - 1) / 2, self, f)
                } else {
                    a.powmod_big(&exp, self, f)
                };
                let g = b.sub(&one, f).gcd(self, f);
                let gd = g.deg0();
                if gd > 0 && gd < n {
                    let other = self.div_exact(&g, f);
                    g.edf(d, f, out);
                    other.edf(d, f, out);
                    return;
                }
            }
        }
        // Exhaustive fallback: every monic polynomial of degree < n in canonical order.
        for k in 2..n {
            for idx in 0..f.order().pow(k as u32).min(1 << 16) {
                let mut coeffs = Vec::with_capacity(k + 1);
                let mut rest = idx;
                for _ in 0..k {
                    coeffs.push(f.element_at(rest % f.order()));
                    rest /= f.order();
                }
                coeffs.push(f.one());
                let a = Poly::from_coeffs(coeffs);
                let b = a.powmod_big(&exp, self, f);
                let g = b.sub(&one, f).gcd(self, f);
                let gd = g.deg0();
                if gd > 0 && gd < n {
                    let other = self.div_exact(&g, f);
                    g.edf(d, f, out);
                    other.edf(d, f, out);
                    return;
                }
            }
        }
        panic!("equal-degree splitting failed to find a separating polynomial");
    }

    /// Factorization into monic irreducibles with multiplicities, sorted by
    /// degree then canonical coefficient order, plus the leading unit.
    pub fn factorize(&self, f: &Field) -> Result<(Elem, Vec<(Poly, usize)>)> {
        if self.is_zero() {
            return invalid("cannot factor the zero polynomial");
        }
        let unit = self.lead();
        let mut out = Vec::new();
        for (sq, mult) in self.squarefree(f) {
            for (g, d) in sq.ddf(f) {
                let mut parts = Vec::new();
                g.edf(d, f, &mut parts);
                out.extend(parts.into_iter().map(|h| (h, mult)));
            }
        }
        out.sort_by(|a, b| a.0.canonical_cmp(&b.0, f));
        // merge equal factors (possible across p-th power branches)
        let mut merged: Vec<(Poly, usize)> = Vec::new();
        for (g, m) in out {
            match merged.last_mut() {
                Some((h, k)) if *h == g => *k += m,
                _ => merged.push((g, m)),
            }
        }
        Ok((unit, merged))
    }

    /// Distinct roots in the field, canonically sorted.
    pub fn roots(&self, f: &Field) -> Vec<Elem> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut roots = Vec::new();
        let mut g = self.monic(f);
        if g.coeff(0).is_zero() {
            roots.push(Elem::ZERO);
            while g.coeff(0).is_zero() && !g.is_constant() {
                g = Poly::from_coeffs(g.c[1..].to_vec());
            }
        }
        if !g.is_constant() {
            let x = Poly::x(f);
            let lin = x.powmod(f.order(), &g, f).sub(&x, f).gcd(&g, f);
            if !lin.is_constant() {
                let mut parts = Vec::new();
                lin.edf(1, f, &mut parts);
                roots.extend(parts.iter().map(|h| f.neg(&h.coeff(0))));
            }
        }
        roots.sort_by(|a, b| f.canonical_cmp(a, b));
        roots.dedup();
        roots
    }

    /// Rabin's irreducibility test.
    pub fn is_irreducible(&self, f: &Field) -> bool {
        let n = match self.degree() {
            None | Some(0) => return false,
            Some(1) => return true,
            Some(n) => n,
        };
        let g = self.monic(f);
        let x = Poly::x(f);
        let q = f.order();
        // x^{q^k} mod g for k = 0..=n
        let mut frob = vec![x.rem(&g, f)];
        for k in 1..=n {
            let next = frob[k - 1].powmod(q, &g, f);
            frob.push(next);
        }
        if frob[n] != x.rem(&g, f) {
            return false;
        }
        prime_factors(n as u128).into_iter().all(|r| {
            let k = n / r as usize;
            frob[k].sub(&x, f).gcd(&g, f).is_one(f)
        })
    }

    /// The least monic irreducible of degree `l` in lexicographic order of
    /// `(c_0, …, c_{l-1})`, each coefficient in canonical element order.
    pub fn least_irreducible(f: &Field, l: usize) -> Result<Poly> {
        if l == 0 {
            return invalid("degree must be positive");
        }
        let q = f.order();
        let mut digits = vec![0u128; l];
        digits[0] = 1; // c_0 = 0 gives a root at 0 when l ≥ 2
        loop {
            let mut coeffs: Vec<Elem> = digits.iter().map(|&d| f.element_at(d)).collect();
            coeffs.push(f.one());
            let g = Poly::from_coeffs(coeffs);
            if g.is_irreducible(f) {
                return Ok(g);
            }
            // odometer, last digit fastest
            let mut k = l;
            loop {
                if k == 0 {
                    return invalid("no irreducible polynomial found");
                }
                k -= 1;
                digits[k] += 1;
                if digits[k] < q {
                    break;
                }
                digits[k] = 0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;

    fn expand(f: &Field, unit: Elem, parts: &[(Poly, usize)]) -> Poly {
        parts.iter().fold(Poly::constant(unit), |acc, (g, k)| {
            acc.mul(&g.pow(*k as u64, f), f)
        })
    }

    #[test]
    fn cube_roots_of_unity_mod_7() {
        let f = make_field(7, 1).unwrap();
        let p = Poly::from_ints(&f, &[-1, 0, 0, 1]);
        let (u, parts) = p.factorize(&f).unwrap();
        let lin: Vec<Poly> = [4, 2, 1]
            .iter()
            .map(|&r| Poly::from_ints(&f, &[7 - r, 1]))
            .collect();
        assert_eq!(parts, lin.into_iter().map(|g| (g, 1)).collect::<Vec<_>>());
        assert_eq!(expand(&f, u, &parts), p);
    }

    #[test]
    fn quadratics_mod_5() {
        let f = make_field(5, 1).unwrap();
        let (_, parts) = Poly::from_ints(&f, &[1, 0, 1]).factorize(&f).unwrap();
        assert_eq!(
            parts,
            vec![
                (Poly::from_ints(&f, &[2, 1]), 1),
                (Poly::from_ints(&f, &[3, 1]), 1)
            ]
        );
        let g = Poly::from_ints(&f, &[-2, 0, 1]);
        assert_eq!(g.factorize(&f).unwrap().1, vec![(g.clone(), 1)]);
        assert!(Poly::zero().factorize(&f).is_err());
    }

    #[test]
    fn repeated_and_pth_power_factors() {
        let f = make_field(3, 1).unwrap();
        // (x+1)^3 (x^2+1)^2 x
        let a = Poly::from_ints(&f, &[1, 1]).pow(3, &f);
        let b = Poly::from_ints(&f, &[1, 0, 1]).pow(2, &f);
        let p = a
            .mul(&b, &f)
            .mul(&Poly::x(&f), &f)
            .scale(&f.from_int(2), &f);
        let (u, parts) = p.factorize(&f).unwrap();
        assert_eq!(u, f.from_int(2));
        assert_eq!(expand(&f, u, &parts), p);
        assert_eq!(parts.len(), 3);
    }

    #[test]
    fn factor_over_extension() {
        let f = make_field(5, 2).unwrap();
        // x^4 - 1 splits over F_25 only partially? No: 4 | 24, so fully.
        let p = Poly::from_ints(&f, &[-1, 0, 0, 0, 1]);
        let (_, parts) = p.factorize(&f).unwrap();
        assert_eq!(parts.len(), 4);
        assert!(parts.iter().all(|(g, k)| g.deg0() == 1 && *k == 1));
        // x^3 - 2 over F_25: 3 ∤ 24 so one root and a quadratic? gcd(3,24)=3 → 3 roots or none.
        let r = Poly::from_ints(&f, &[-2, 0, 0, 1]);
        let (_, parts) = r.factorize(&f).unwrap();
        assert_eq!(expand(&f, f.one(), &parts), r);
    }

    #[test]
    fn least_irreducible_quadratic_f3() {
        let f = make_field(3, 1).unwrap();
        assert_eq!(
            Poly::least_irreducible(&f, 2).unwrap(),
            Poly::from_ints(&f, &[1, 0, 1])
        );
    }
}
