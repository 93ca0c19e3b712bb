//! Exact verification of birational maps between Kummer-type relations
//! `y^m = f(x)`, computed in the algebra `K(x)[y]/(y^m - f)`.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::autgroup::g_orbits;
use crate::curves::{
    genus_rh_over, genus_riemann_hurwitz, make_curve, CurveSpec, Family, KummerModel, Substitution,
};
use crate::error::{GfcError, Result};
use crate::ffield::{Elem, Field};
use crate::places::RatFn;
use crate::poly::Poly;

/// `y^m = f(x)` over `field`.
#[derive(Debug, Clone)]
pub struct AlgebraicRelation {
    pub m: u64,
    pub field: Arc<Field>,
    pub f: RatFn,
}

impl AlgebraicRelation {
    pub fn new(m: u64, field: &Arc<Field>, f: RatFn) -> Result<AlgebraicRelation> {
        if f.is_zero() || m == 0 {
            return Err(GfcError::InvalidParameter("need m ≥ 1 and f ≠ 0".into()));
        }
        Ok(AlgebraicRelation {
            m,
            field: field.clone(),
            f,
        })
    }

    pub fn from_model(k: &KummerModel) -> AlgebraicRelation {
        AlgebraicRelation {
            m: k.m,
            field: k.field.clone(),
            f: k.f.clone(),
        }
    }

    pub fn zero(&self) -> Vec<RatFn> {
        vec![RatFn::constant(Elem::ZERO, &self.field); self.m as usize]
    }

    pub fn constant(&self, r: RatFn) -> Vec<RatFn> {
        let mut v = self.zero();
        v[0] = r;
        v
    }

    /// `r · y^k`.
    pub fn monomial(&self, r: RatFn, k: usize) -> Vec<RatFn> {
        let mut v = vec![RatFn::constant(Elem::ZERO, &self.field); k + 1];
        v[k] = r;
        self.normal_form(&v)
    }

    /// Reduces `Σ c_k y^k` (any length) to the basis `1, y, …, y^{m-1}`.
    pub fn normal_form(&self, coeffs: &[RatFn]) -> Vec<RatFn> {
        let fld = &self.field;
        let m = self.m as usize;
        let mut out = self.zero();
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let reduced = c.mul(&self.f.pow((k / m) as i64, fld).unwrap(), fld);
            out[k % m] = out[k % m].add(&reduced, fld);
        }
        out
    }

    pub fn add(&self, a: &[RatFn], b: &[RatFn]) -> Vec<RatFn> {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.add(y, &self.field))
            .collect()
    }

    pub fn sub(&self, a: &[RatFn], b: &[RatFn]) -> Vec<RatFn> {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.sub(y, &self.field))
            .collect()
    }

    pub fn mul(&self, a: &[RatFn], b: &[RatFn]) -> Vec<RatFn> {
        let fld = &self.field;
        let m = self.m as usize;
        let mut prod = vec![RatFn::constant(Elem::ZERO, fld); 2 * m - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] = prod[i + j].add(&x.mul(y, fld), fld);
                }
            }
        }
        self.normal_form(&prod)
    }

    pub fn pow(&self, a: &[RatFn], mut e: u64) -> Vec<RatFn> {
        let mut acc = self.constant(RatFn::constant(self.field.one(), &self.field));
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn is_zero(&self, a: &[RatFn]) -> bool {
        a.iter().all(|c| c.is_zero())
    }

    /// Inverse by solving `a · b = 1` over `K(x)`.
    pub fn inverse(&self, a: &[RatFn]) -> Result<Vec<RatFn>> {
        let fld = &self.field;
        let m = self.m as usize;
        // column j = a · y^j
        let cols: Vec<Vec<RatFn>> = (0..m)
            .map(|j| self.mul(a, &self.monomial(RatFn::constant(fld.one(), fld), j)))
            .collect();
        let mut rows: Vec<Vec<RatFn>> = (0..m)
            .map(|i| {
                let mut r: Vec<RatFn> = (0..m).map(|j| cols[j][i].clone()).collect();
                r.push(RatFn::constant(
                    if i == 0 { fld.one() } else { Elem::ZERO },
                    fld,
                ));
                r
            })
            .collect();
        for col in 0..m {
            let piv = (col..m).find(|&r| !rows[r][col].is_zero()).ok_or_else(|| {
                GfcError::ReducibleRelation("zero divisor in the function algebra".into())
            })?;
            rows.swap(col, piv);
            let inv = rows[col][col].inv(fld)?;
            rows[col] = rows[col].iter().map(|x| x.mul(&inv, fld)).collect();
            for r in 0..m {
                if r != col && !rows[r][col].is_zero() {
                    let k = rows[r][col].clone();
                    let pivot_row = rows[col].clone();
                    rows[r] = rows[r]
                        .iter()
                        .zip(&pivot_row)
                        .map(|(x, y)| x.sub(&y.mul(&k, fld), fld))
                        .collect();
                }
            }
        }
        Ok(rows.into_iter().map(|r| r[m].clone()).collect())
    }

    /// `h(a)` for a rational function `h = N/D`, as `(N(a), D(a))`.
    fn eval_parts(&self, h: &RatFn, a: &[RatFn]) -> (Vec<RatFn>, Vec<RatFn>) {
        let horner = |p: &Poly| {
            let mut acc = self.zero();
            for c in p.coeffs().iter().rev() {
                acc = self.mul(&acc, a);
                acc[0] = acc[0].add(&RatFn::constant(*c, &self.field), &self.field);
            }
            acc
        };
        (horner(h.num()), horner(h.den()))
    }

    /// Evaluates an algebra element at an affine point, if defined.
    pub fn eval_at(&self, a: &[RatFn], x0: &Elem, y0: &Elem, e: &Field) -> Option<Elem> {
        let mut acc = Elem::ZERO;
        let mut yk = e.one();
        for c in a {
            if !c.is_zero() {
                acc = e.add(&acc, &e.mul(&c.eval(x0, e)?, &yk));
            }
            yk = e.mul(&yk, y0);
        }
        Some(acc)
    }

    pub fn embed(&self, to: &Arc<Field>) -> Result<AlgebraicRelation> {
        Ok(AlgebraicRelation {
            m: self.m,
            field: to.clone(),
            f: self.f.embed(&self.field, to)?,
        })
    }

    pub fn genus(&self) -> Result<i64> {
        let model = KummerModel {
            m: self.m,
            field: self.field.clone(),
            f: self.f.clone(),
            substitution: Substitution::Y,
        };
        genus_rh_over(&model, crate::curves::oracle_extension(&model))
    }
}

/// Images of `x'` and `y'` in the source algebra.
#[derive(Debug, Clone)]
pub struct BirationalMap {
    pub x: Vec<RatFn>,
    pub y: Vec<RatFn>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalarCertificate {
    pub name: String,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCertificate {
    pub identity: String,
    pub holds: bool,
    pub reduction_steps: usize,
    pub scalar_certificates: Vec<ScalarCertificate>,
    pub genus_src: i64,
    pub genus_dst: i64,
    pub samples_needed: usize,
    /// Sampled points whose image has a single preimage.
    pub injective_samples: usize,
    pub sampled_points: usize,
    pub images_on_target: bool,
}

impl IdentityCertificate {
    pub fn pass(&self) -> bool {
        self.holds
            && self.scalar_certificates.iter().all(|s| s.holds)
            && self.genus_src == self.genus_dst
            && self.injective_samples >= self.samples_needed
            && self.images_on_target
    }
}

const SAMPLE_FIELD_LIMIT: u128 = 1 << 16;

/// Substitutes `M` into the target relation and reduces in the source
/// algebra; then samples points to exhibit a one-sided inverse.
pub fn verify_birational_identity(
    name: &str,
    src: &AlgebraicRelation,
    map: &BirationalMap,
    dst: &AlgebraicRelation,
) -> Result<IdentityCertificate> {
    if !Arc::ptr_eq(&src.field, &dst.field) && *src.field != *dst.field {
        return Err(GfcError::FieldMismatch);
    }
    let mut steps = 0;
    let (num, den) = src.eval_parts(&dst.f, &map.x);
    steps += dst.f.num().deg0() + dst.f.den().deg0();
    if src.is_zero(&den) {
        return Err(GfcError::DegenerateMap(
            "target denominator vanishes on the image".into(),
        ));
    }
    let ym = src.pow(&map.y, dst.m);
    steps += 2 * (64 - dst.m.leading_zeros() as usize);
    let lhs = src.sub(&src.mul(&ym, &den), &num);
    steps += 1;
    let holds = src.is_zero(&lhs);
    let genus_src = src.genus()?;
    let genus_dst = dst.genus()?;
    let needed = (3 * genus_src.max(0) + 3) as usize;
    let (injective, sampled, on_target) = sample_inverse(src, map, dst, needed)?;
    Ok(IdentityCertificate {
        identity: name.into(),
        holds,
        reduction_steps: steps,
        scalar_certificates: Vec::new(),
        genus_src,
        genus_dst,
        samples_needed: needed,
        injective_samples: injective,
        sampled_points: sampled,
        images_on_target: on_target,
    })
}

fn sample_inverse(
    src: &AlgebraicRelation,
    map: &BirationalMap,
    dst: &AlgebraicRelation,
    needed: usize,
) -> Result<(usize, usize, bool)> {
    let mut l = 1;
    loop {
        let e = Field::extend(&src.field, l)?;
        if e.order() > SAMPLE_FIELD_LIMIT {
            return Ok((0, 0, false));
        }
        let s = src.embed(&e)?;
        let d = dst.embed(&e)?;
        let emb = |v: &[RatFn]| -> Result<Vec<RatFn>> {
            v.iter().map(|r| r.embed(&src.field, &e)).collect()
        };
        let (mx, my) = (emb(&map.x)?, emb(&map.y)?);
        let mut preimages: HashMap<(Elem, Elem), usize> = HashMap::new();
        let mut images = Vec::new();
        let mut on_target = true;
        for x0 in e.elements() {
            let Some(fx) = s.f.eval(&x0, &e) else {
                continue;
            };
            for y0 in e.nth_roots(&fx, s.m) {
                if e.pow(&y0, s.m as u128) != fx {
                    continue;
                }
                let (Some(u), Some(v)) =
                    (s.eval_at(&mx, &x0, &y0, &e), s.eval_at(&my, &x0, &y0, &e))
                else {
                    continue;
                };
                if let Some(fu) = d.f.eval(&u, &e) {
                    on_target &= e.pow(&v, d.m as u128) == fu;
                }
                *preimages.entry((u, v)).or_insert(0) += 1;
                images.push((u, v));
            }
        }
        let injective = images.iter().filter(|p| preimages[p] == 1).count();
        if injective >= needed {
            return Ok((injective, images.len(), on_target));
        }
        l += 1;
    }
}

/// `(X, 2Y/(Y^2 + 1))` from `X^n Y^2 + X^n + Y^2 = 1` to `X^{2n} + Y^2 = 1`.
pub fn overlap_identity(field: &Arc<Field>, n: u64) -> Result<IdentityCertificate> {
    let f = field.as_ref();
    let one = Poly::one(f);
    let xn = Poly::monomial(f.one(), n as usize);
    let src_f = RatFn::new(one.sub(&xn, f), one.add(&xn, f), f)?;
    let src = AlgebraicRelation::new(2, field, src_f.clone())?;
    let dst = AlgebraicRelation::new(2, field, RatFn::from_poly(one.sub(&xn.mul(&xn, f), f), f))?;
    let two = RatFn::constant(f.from_int(2), f);
    let coef = two.div(&src_f.add(&RatFn::constant(f.one(), f), f), f)?;
    let map = BirationalMap {
        x: src.monomial(RatFn::x(f), 0),
        y: src.monomial(coef, 1),
    };
    verify_birational_identity(&format!("overlap n={n}"), &src, &map, &dst)
}

/// `u = ε/(z - κ) + ε`, `v = w (ε/(z - κ))^{(Q+1)/2}` from `z^Q + z = w^2`
/// to `v^2 = u^{Q+1} + 1`, over `F_{Q^2}`.
pub fn mainpgroup_identity(p: u32, r: usize) -> Result<IdentityCertificate> {
    if p == 2 || r == 0 {
        return Err(GfcError::InvalidParameter("need odd p and r ≥ 1".into()));
    }
    let field = Field::extend(&Field::prime(p)?, 2 * r)?;
    let f = field.as_ref();
    let q = (p as u128).pow(r as u32);
    let eps = f.pow(&f.primitive_root(), (q - 1) / 2);
    let mut kp = vec![Elem::ZERO; q as usize + 1];
    kp[0] = f.neg(&f.one());
    kp[1] = f.one();
    kp[q as usize] = f.one();
    let kappa = *Poly::from_coeffs(kp)
        .roots(f)
        .first()
        .ok_or_else(|| GfcError::OracleFailure("κ^Q + κ = 1 has no root".into()))?;
    let z = RatFn::x(f);
    let src = AlgebraicRelation::new(2, &field, z.pow(q as i64, f)?.add(&z, f))?;
    let dst = AlgebraicRelation::new(
        2,
        &field,
        RatFn::from_poly(
            Poly::monomial(f.one(), q as usize + 1).add(&Poly::one(f), f),
            f,
        ),
    )?;
    let t = RatFn::constant(eps, f).div(&z.sub(&RatFn::constant(kappa, f), f), f)?;
    let u = t.add(&RatFn::constant(eps, f), f);
    let map = BirationalMap {
        x: src.monomial(u, 0),
        y: src.monomial(t.pow(q.div_ceil(2) as i64, f)?, 1),
    };
    let mut cert =
        verify_birational_identity(&format!("mainpgroup p={p} r={r}"), &src, &map, &dst)?;
    let km1 = f.sub(&kappa, &f.one());
    cert.scalar_certificates = vec![
        ScalarCertificate {
            name: "kappa^(Q+1) = (kappa-1)^(Q+1)".into(),
            holds: f.pow(&kappa, q + 1) == f.pow(&km1, q + 1),
        },
        ScalarCertificate {
            name: "kappa^Q + kappa = 1".into(),
            holds: f.add(&f.pow(&kappa, q), &kappa) == f.one(),
        },
        ScalarCertificate {
            name: "eps^(Q+1) = -1".into(),
            holds: f.pow(&eps, q + 1) == f.neg(&f.one()),
        },
    ];
    Ok(cert)
}

#[derive(Debug, Clone)]
pub struct QuadrexResult {
    pub curve: CurveSpec,
    pub map: BirationalMap,
    pub certificate: IdentityCertificate,
    pub genus_before: i64,
    pub genus_after: i64,
    pub orbits_before: Vec<u64>,
    pub orbits_after: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadrexJson {
    pub params: Vec<Vec<u64>>,
    pub field_order: u128,
    pub genus_before: i64,
    pub genus_after: i64,
    pub orbits_before: Vec<u64>,
    pub orbits_after: Vec<u64>,
    pub certificate: IdentityCertificate,
}

impl QuadrexResult {
    pub fn pass(&self) -> bool {
        self.certificate.holds
            && self.genus_before == self.genus_after
            && self.orbits_before == self.orbits_after
    }

    pub fn to_json(&self) -> QuadrexJson {
        let b = &self.curve.base;
        QuadrexJson {
            params: self
                .curve
                .params
                .iter()
                .map(|e| b.rel_coords_flat(e))
                .collect(),
            field_order: b.order(),
            genus_before: self.genus_before,
            genus_after: self.genus_after,
            orbits_before: self.orbits_before.clone(),
            orbits_after: self.orbits_after.clone(),
            certificate: self.certificate.clone(),
        }
    }
}

/// Rewrites a IIb2/IIb3 curve as `y^m = (1 - b X^n)/(a X^n + c)` over
/// `F_{q^2}` with `X = (x - i)/(x + i)` (or its reciprocal).
pub fn quadrex_normalize(c: &CurveSpec) -> Result<QuadrexResult> {
    if !matches!(c.family, Family::IIb2 | Family::IIb3) {
        return Err(GfcError::UnsupportedNormalForm(format!(
            "family {} is already split",
            c.family
        )));
    }
    let t = c.tower()?;
    let top = &t.top;
    let f = top.as_ref();
    let model = c.kummer_unchecked()?;
    let fs = model.f.embed(&model.field, top)?;
    let i = t.i;
    let n = c.n as usize;
    for flip in [false, true] {
        // x as a function of X
        let (p, q) = if flip {
            (
                Poly::from_coeffs(vec![i, i]),
                Poly::from_coeffs(vec![f.neg(&f.one()), f.one()]),
            )
        } else {
            (
                Poly::from_coeffs(vec![i, i]),
                Poly::from_coeffs(vec![f.one(), f.neg(&f.one())]),
            )
        };
        let x_of_big = RatFn::new(p, q, f)?;
        let g = fs.compose(&x_of_big, f);
        let coeff = |poly: &Poly, k: usize| poly.coeff(k);
        let sparse = |poly: &Poly| {
            poly.coeffs()
                .iter()
                .enumerate()
                .all(|(k, c)| c.is_zero() || k == 0 || k == n)
        };
        if !sparse(g.num()) || !sparse(g.den()) {
            return Err(GfcError::UnsupportedNormalForm(
                "Kummer function is not a function of X^n".into(),
            ));
        }
        let (p0, p1, q0, q1) = (
            coeff(g.num(), 0),
            coeff(g.num(), n),
            coeff(g.den(), 0),
            coeff(g.den(), n),
        );
        if p0.is_zero() {
            continue;
        }
        let a = f.div(&q1, &p0)?;
        let b = f.neg(&f.div(&p1, &p0)?);
        let cc = f.div(&q0, &p0)?;
        let curve = make_curve(Family::IIb1, top, c.n, c.m, &[a, b, cc])?;
        let src = AlgebraicRelation::new(c.m, top, fs.clone())?;
        let dst = AlgebraicRelation::from_model(&curve.kummer_unchecked()?);
        let big_x = if flip {
            RatFn::new(
                Poly::from_coeffs(vec![i, f.one()]),
                Poly::from_coeffs(vec![f.neg(&i), f.one()]),
                f,
            )?
        } else {
            RatFn::new(
                Poly::from_coeffs(vec![f.neg(&i), f.one()]),
                Poly::from_coeffs(vec![i, f.one()]),
                f,
            )?
        };
        let map = BirationalMap {
            x: src.monomial(big_x, 0),
            y: src.monomial(RatFn::constant(f.one(), f), 1),
        };
        let certificate =
            verify_birational_identity(&format!("quadrex {}", c.family), &src, &map, &dst)?;
        return Ok(QuadrexResult {
            genus_before: genus_riemann_hurwitz(c)?,
            genus_after: genus_riemann_hurwitz(&curve)?,
            orbits_before: g_orbits(c)?.short_sizes(),
            orbits_after: g_orbits(&curve)?.short_sizes(),
            curve,
            map,
            certificate,
        });
    }
    Err(GfcError::UnsupportedNormalForm(
        "f vanishes at both x = ±i".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;

    #[test]
    fn normal_form_examples() {
        let f7 = make_field(7, 1).unwrap();
        let f = RatFn::from_poly(Poly::from_ints(&f7, &[1, 0, 0, 6]), &f7);
        let alg = AlgebraicRelation::new(3, &f7, f.clone()).unwrap();
        let one = RatFn::constant(f7.one(), &f7);
        let zero = RatFn::constant(Elem::ZERO, &f7);
        assert_eq!(
            alg.monomial(one.clone(), 3),
            vec![f.clone(), zero.clone(), zero.clone()]
        );
        assert_eq!(
            alg.monomial(one.clone(), 4),
            vec![zero.clone(), f.clone(), zero.clone()]
        );
        let y2 = alg.monomial(one.clone(), 2);
        let p = alg.mul(
            &alg.add(&y2, &alg.constant(one.clone())),
            &alg.sub(&y2, &alg.constant(one.clone())),
        );
        assert_eq!(p, vec![one.neg(&f7), f.clone(), zero.clone()]);
        let y = alg.monomial(one.clone(), 1);
        let yi = alg.inverse(&y).unwrap();
        assert_eq!(alg.mul(&y, &yi), alg.constant(one));
    }

    #[test]
    fn reducible_relation_detected() {
        let f7 = make_field(7, 1).unwrap();
        let alg = AlgebraicRelation::new(2, &f7, RatFn::constant(f7.one(), &f7)).unwrap();
        // y - 1 is a zero divisor when y^2 = 1
        let one = RatFn::constant(f7.one(), &f7);
        let e = alg.sub(&alg.monomial(one.clone(), 1), &alg.constant(one));
        assert!(matches!(
            alg.inverse(&e),
            Err(GfcError::ReducibleRelation(_))
        ));
    }

    #[test]
    fn overlap_n3() {
        let f7 = make_field(7, 1).unwrap();
        let cert = overlap_identity(&f7, 3).unwrap();
        assert!(cert.pass(), "{cert:?}");
        assert_eq!(cert.genus_src, 2);
    }

    #[test]
    fn mainpgroup_small() {
        for (p, r) in [(3, 1), (5, 1)] {
            let cert = mainpgroup_identity(p, r).unwrap();
            assert!(cert.pass(), "{cert:?}");
        }
    }

    #[test]
    fn identity_map() {
        let f7 = make_field(7, 1).unwrap();
        let f = RatFn::from_poly(Poly::from_ints(&f7, &[1, 0, 0, 6]), &f7);
        let alg = AlgebraicRelation::new(3, &f7, f).unwrap();
        let one = RatFn::constant(f7.one(), &f7);
        let map = BirationalMap {
            x: alg.monomial(RatFn::x(&f7), 0),
            y: alg.monomial(one, 1),
        };
        assert!(verify_birational_identity("id", &alg, &map, &alg)
            .unwrap()
            .pass());
    }

    #[test]
    fn quadrex_examples() {
        let f7 = make_field(7, 1).unwrap();
        let ps: Vec<Elem> = [1, 0, 0, 1].iter().map(|&k| f7.from_int(k)).collect();
        let c = make_curve(Family::IIb2, &f7, 4, 3, &ps).unwrap();
        let r = quadrex_normalize(&c).unwrap();
        assert!(r.pass(), "{:?}", r.to_json());
        assert_eq!(r.genus_after, 6);
        assert_eq!(r.curve.base.order(), 49);
        let f5 = make_field(5, 1).unwrap();
        let ps: Vec<Elem> = [0, 1, 1, 0].iter().map(|&k| f5.from_int(k)).collect();
        let c = make_curve(Family::IIb3, &f5, 3, 3, &ps).unwrap();
        let r = quadrex_normalize(&c).unwrap();
        assert!(r.pass());
        assert_eq!(r.orbits_after, vec![3, 3, 3, 3]);
        let fermat = make_curve(Family::I, &f7, 3, 3, &[f7.one(), f7.one()]).unwrap();
        assert!(matches!(
            quadrex_normalize(&fermat),
            Err(GfcError::UnsupportedNormalForm(_))
        ));
    }
}
