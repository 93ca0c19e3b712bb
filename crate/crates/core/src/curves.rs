//! The four curve families, their Kummer models `y^m = f(x)`, genus by closed
//! form and by a Riemann–Hurwitz valuation sweep, and degree-one places.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{GfcError, Result};
use crate::ffield::{gcd, gcd_u128, lcm, prime_factors, Elem, Field, Tower};
use crate::moebius::{Moebius, ProjPoint};
use crate::places::{valuations_divisible, RatFn, RatFnJson};
use crate::poly::Poly;
use crate::quotients::nonsplit_quotient;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    I,
    IIb1,
    IIb2,
    IIb3,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::I, Family::IIb1, Family::IIb2, Family::IIb3];

    pub fn arity(self) -> usize {
        match self {
            Family::I => 2,
            Family::IIb1 => 3,
            Family::IIb2 | Family::IIb3 => 4,
        }
    }

    /// Three short orbits (family I) or four.
    pub fn short_orbit_count(self) -> usize {
        if self == Family::I {
            3
        } else {
            4
        }
    }

    /// Whether `n` (resp. `m`) is required to divide `q - 1` (split) or `q + 1`.
    pub fn split_pattern(self) -> (bool, bool) {
        match self {
            Family::I | Family::IIb1 => (true, true),
            Family::IIb2 => (false, true),
            Family::IIb3 => (false, false),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::I => "I",
            Family::IIb1 => "IIb1",
            Family::IIb2 => "IIb2",
            Family::IIb3 => "IIb3",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = GfcError;
    fn from_str(s: &str) -> Result<Family> {
        match s {
            "I" | "i" => Ok(Family::I),
            "IIb1" | "iib1" => Ok(Family::IIb1),
            "IIb2" | "iib2" => Ok(Family::IIb2),
            "IIb3" | "iib3" => Ok(Family::IIb3),
            _ => Err(GfcError::InvalidParameter(format!("unknown family {s}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CurveSpec {
    pub family: Family,
    pub base: Arc<Field>,
    pub tower: Option<Tower>,
    pub n: u64,
    pub m: u64,
    pub params: Vec<Elem>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Substitution {
    /// The relation is in `y` itself.
    Y,
    /// `w = (y - i)/(y + i)`.
    W,
}

/// `y^m = f(x)` over `field`.
#[derive(Debug, Clone)]
pub struct KummerModel {
    pub m: u64,
    pub field: Arc<Field>,
    pub f: RatFn,
    pub substitution: Substitution,
}

impl CurveSpec {
    /// No validation; for probing rejected parameters.
    pub fn unchecked(
        family: Family,
        base: &Arc<Field>,
        n: u64,
        m: u64,
        params: &[Elem],
    ) -> Result<CurveSpec> {
        if params.len() != family.arity() {
            return Err(GfcError::InvalidParameter(format!(
                "family {family} takes {} coefficients, got {}",
                family.arity(),
                params.len()
            )));
        }
        if n == 0 || m == 0 {
            return Err(GfcError::InvalidParameter(
                "exponents must be positive".into(),
            ));
        }
        let tower = match family {
            Family::I | Family::IIb1 => None,
            Family::IIb2 | Family::IIb3 => Some(Tower::new(base)?),
        };
        Ok(CurveSpec {
            family,
            base: base.clone(),
            tower,
            n,
            m,
            params: params.to_vec(),
        })
    }

    pub fn q(&self) -> u128 {
        self.base.order()
    }

    pub fn tower(&self) -> Result<&Tower> {
        self.tower
            .as_ref()
            .ok_or_else(|| GfcError::InvalidParameter("family has no tower".into()))
    }

    /// `F_q`, or `F_{q²}` for IIb3.
    pub fn working_field(&self) -> Arc<Field> {
        match self.family {
            Family::IIb3 => self.tower.as_ref().unwrap().top.clone(),
            _ => self.base.clone(),
        }
    }

    fn moebius_params(&self) -> Result<Moebius> {
        let [a, b, c, d] = [
            self.params[0],
            self.params[1],
            self.params[2],
            self.params[3],
        ];
        Moebius::new(&self.base, a, b, c, d)
            .map_err(|_| GfcError::ReducibleOrSingular("ad = bc".into()))
    }

    /// The Kummer function without any validity checks.
    pub fn kummer_unchecked(&self) -> Result<KummerModel> {
        let f = &self.base;
        let p = &self.params;
        let xn = Poly::monomial(f.one(), self.n as usize);
        let one = Poly::one(f);
        let (field, func, substitution) = match self.family {
            Family::I => {
                let num = one.sub(&xn.scale(&p[0], f), f);
                (
                    f.clone(),
                    RatFn::new(num, Poly::constant(p[1]), f)?,
                    Substitution::Y,
                )
            }
            Family::IIb1 => {
                let num = one.sub(&xn.scale(&p[1], f), f);
                let den = xn.scale(&p[0], f).add(&Poly::constant(p[2]), f);
                (f.clone(), RatFn::new(num, den, f)?, Substitution::Y)
            }
            Family::IIb2 => {
                let z = nonsplit_quotient(self.tower()?, self.n)?.invariant;
                let num = z.scale(&p[3], f).sub(&RatFn::constant(p[1], f), f);
                let den = RatFn::constant(p[0], f).sub(&z.scale(&p[2], f), f);
                (f.clone(), num.div(&den, f)?, Substitution::Y)
            }
            Family::IIb3 => {
                let t = self.tower()?;
                let z = nonsplit_quotient(t, self.n)?.invariant;
                let r = self
                    .moebius_params()?
                    .as_ratfn(f)
                    .compose(&z, f)
                    .embed(f, &t.top)?;
                let i = RatFn::constant(t.i, &t.top);
                let func = i.sub(&r, &t.top).div(&i.add(&r, &t.top), &t.top)?;
                (t.top.clone(), func, Substitution::W)
            }
        };
        Ok(KummerModel {
            m: self.m,
            field,
            f: func,
            substitution,
        })
    }
}

/// Constructs and validates a curve of the given family over `F_q`.
pub fn make_curve(
    family: Family,
    base: &Arc<Field>,
    n: u64,
    m: u64,
    params: &[Elem],
) -> Result<CurveSpec> {
    let c = CurveSpec::unchecked(family, base, n, m, params)?;
    let p = base.p() as u64;
    if (n * m).is_multiple_of(p) {
        return Err(GfcError::TamenessViolation(format!(
            "p = {p} divides nm = {}",
            n * m
        )));
    }
    if n.max(m) <= 2 {
        return Err(GfcError::InvalidParameter("max(n, m) must exceed 2".into()));
    }
    let q = base.order();
    let divides = |k: u64, split: bool| {
        let target = if split { q - 1 } else { q + 1 };
        target % k as u128 == 0
    };
    let (sn, sm) = family.split_pattern();
    if !divides(n, sn) || !divides(m, sm) {
        return Err(GfcError::WrongFamily {
            family: family.to_string(),
            detail: format!(
                "need n | q{} and m | q{} (q = {q}, n = {n}, m = {m})",
                if sn { "-1" } else { "+1" },
                if sm { "-1" } else { "+1" }
            ),
        });
    }
    let f = base.as_ref();
    let pr = &c.params;
    let singular = |msg: &str| Err(GfcError::ReducibleOrSingular(msg.into()));
    match family {
        Family::I => {
            if pr[0].is_zero() || pr[1].is_zero() {
                return singular("a and b must be nonzero");
            }
        }
        Family::IIb1 => {
            if pr.iter().any(|e| e.is_zero()) {
                return singular("a, b and c must be nonzero");
            }
            if pr[0] == f.neg(&f.mul(&pr[1], &pr[2])) {
                return singular("a = -bc gives a singular model");
            }
        }
        Family::IIb2 => {
            c.moebius_params()?;
        }
        Family::IIb3 => {
            let mo = c.moebius_params()?;
            let t = c.tower()?;
            let image = mo
                .embed(f, &t.top)?
                .act(&ProjPoint::finite(t.i, &t.top), &t.top);
            let plus = ProjPoint::finite(t.i, &t.top);
            let minus = ProjPoint::finite(t.top.neg(&t.i), &t.top);
            if image == plus || image == minus {
                return singular("the Möbius map preserves {i, -i}, so branch points collide");
            }
        }
    }
    let model = c.kummer_unchecked()?;
    for d in prime_factors(m as u128) {
        if valuations_divisible(&model.f, d as u64, &model.field)? {
            return Err(GfcError::ReducibleOrSingular(format!(
                "Kummer function is a {d}-th power"
            )));
        }
    }
    Ok(c)
}

pub fn kummer_model(c: &CurveSpec) -> Result<KummerModel> {
    c.kummer_unchecked()
}

/// Closed-form genus: three short orbits for family I, four otherwise.
pub fn genus_closed_form(c: &CurveSpec) -> i64 {
    let (n, m) = (c.n as i64, c.m as i64);
    match c.family {
        Family::I => (m * n - m - n - gcd(c.m, c.n) as i64 + 2) / 2,
        _ => m * n - m - n + 1,
    }
}

/// Order of `q` modulo `m` (`m` coprime to `q`).
pub fn mult_order_mod(q: u128, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let mut r = q % m as u128;
    let mut k = 1;
    while r != 1 {
        r = r * (q % m as u128) % m as u128;
        k += 1;
        if k > m {
            return 0;
        }
    }
    k
}

/// `lcm(2, ord_m |W|)` for the working field `W`.
pub fn oracle_extension(model: &KummerModel) -> usize {
    lcm(2, mult_order_mod(model.field.order(), model.m)) as usize
}

/// Riemann–Hurwitz for the degree-`m` cover of the `x`-line, computed over
/// the extension of the working field of degree [`oracle_extension`].
pub fn genus_riemann_hurwitz(c: &CurveSpec) -> Result<i64> {
    let model = c.kummer_unchecked()?;
    let l = oracle_extension(&model);
    genus_rh_over(&model, l)
}

/// The same sweep over an explicit extension degree.
pub fn genus_rh_over(model: &KummerModel, l: usize) -> Result<i64> {
    let e = Field::extend(&model.field, l)?;
    let f = model.f.embed(&model.field, &e)?;
    if f.is_zero() || f.is_constant() {
        return Err(GfcError::OracleFailure("constant Kummer function".into()));
    }
    let m = model.m as i64;
    let mut total = -2 * m;
    for p in [f.num(), f.den()] {
        for (g, k) in p.factorize(&e)?.1 {
            total += g.deg0() as i64 * (m - gcd(model.m, k as u64) as i64);
        }
    }
    let v_inf = f.den().deg0() as i64 - f.num().deg0() as i64;
    total += m - gcd(model.m, v_inf.unsigned_abs()) as i64;
    if total % 2 != 0 {
        return Err(GfcError::OracleFailure(format!("2g - 2 = {total} is odd")));
    }
    let g = (total + 2) / 2;
    if g < 0 {
        return Err(GfcError::OracleFailure(format!("negative genus {g}")));
    }
    Ok(g)
}

#[derive(Debug, Clone, Serialize)]
pub struct GenusReport {
    pub closed_form: i64,
    pub rh_oracle: i64,
    pub family_case: &'static str,
}

pub fn genus_report(c: &CurveSpec) -> Result<GenusReport> {
    Ok(GenusReport {
        closed_form: genus_closed_form(c),
        rh_oracle: genus_riemann_hurwitz(c)?,
        family_case: if c.family == Family::I {
            "I-three-orbits"
        } else {
            "II-four-orbits"
        },
    })
}

/// A place of the Kummer model over `x0`: the value `ℓ` of `y^{m'}/t^{v'}`
/// with `g = gcd(m, v)`, `m = g m'`, `v = g v'` and `ℓ^g = c_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SmoothPoint {
    pub x: ProjPoint,
    pub label: Elem,
    /// Ramification index `m / gcd(m, v)` over the `x`-line.
    pub ramification: u64,
}

/// The Kummer relation over an extension `e` of its working field.
#[derive(Debug, Clone)]
pub struct LocalModel {
    pub m: u64,
    pub e: Arc<Field>,
    pub f: RatFn,
}

impl LocalModel {
    pub fn new(model: &KummerModel, e: &Arc<Field>) -> Result<LocalModel> {
        Ok(LocalModel {
            m: model.m,
            e: e.clone(),
            f: model.f.embed(&model.field, e)?,
        })
    }

    /// `(c_0, v)` at `x0`.
    pub fn local(&self, x0: &ProjPoint) -> (Elem, i64) {
        self.f
            .leading_term(x0, &self.e)
            .expect("nonzero Kummer function")
    }

    fn g_of(&self, v: i64) -> u64 {
        gcd(self.m, v.unsigned_abs())
    }

    /// Number of degree-one places over `x0`.
    pub fn count_over(&self, x0: &ProjPoint) -> u64 {
        let (c0, v) = self.local(x0);
        let g = self.g_of(v) as u128;
        let e = &self.e;
        let k = gcd_u128(g, e.order() - 1);
        if e.pow(&c0, (e.order() - 1) / k) == e.one() {
            k as u64
        } else {
            0
        }
    }

    pub fn places_over(&self, x0: &ProjPoint) -> Vec<SmoothPoint> {
        let (c0, v) = self.local(x0);
        let g = self.g_of(v);
        self.e
            .nth_roots(&c0, g)
            .into_iter()
            .map(|label| SmoothPoint {
                x: *x0,
                label,
                ramification: self.m / g,
            })
            .collect()
    }

    /// Geometric number of places over `x0`.
    pub fn geometric_count_over(&self, x0: &ProjPoint) -> u64 {
        self.g_of(self.local(x0).1)
    }

    /// Image of a place under `(x, y) ↦ (M(x^Q), κ y^{εQ})`.
    pub fn transport(&self, pt: &SmoothPoint, map: &SemilinearMap) -> SmoothPoint {
        let e = &self.e;
        let (_, v) = self.local(&pt.x);
        let g = self.g_of(v);
        let (mp, vp) = ((self.m / g) as i64, v / g as i64);
        let frob = |a: &Elem| e.pow(a, map.q_pow);
        let xq = ProjPoint {
            x0: frob(&pt.x.x0),
            x1: frob(&pt.x.x1),
        };
        let image = map.m.act(&xq, e);
        let mo = &map.m;
        let lead = match (xq.affine(e), image.affine(e)) {
            (Some(x0), Some(_)) => {
                let den = e.add(&e.mul(&mo.c, &x0), &mo.d);
                e.div(&mo.det(e), &e.mul(&den, &den)).unwrap()
            }
            (Some(x0), None) => e.div(&mo.c, &e.add(&e.mul(&mo.a, &x0), &mo.b)).unwrap(),
            (None, Some(_)) => e.div(&e.neg(&mo.det(e)), &e.mul(&mo.c, &mo.c)).unwrap(),
            (None, None) => e.div(&mo.d, &mo.a).unwrap(),
        };
        let lab = e.mul(
            &e.mul(
                &e.pow_signed(&map.kappa, mp).unwrap(),
                &e.pow_signed(&lead, -map.eps * vp).unwrap(),
            ),
            &e.pow_signed(&frob(&pt.label), map.eps).unwrap(),
        );
        SmoothPoint {
            x: image,
            label: lab,
            ramification: pt.ramification,
        }
    }

    /// Checks `ℓ^g = c_0` at the point.
    pub fn is_valid(&self, pt: &SmoothPoint) -> bool {
        let (c0, v) = self.local(&pt.x);
        self.e.pow(&pt.label, self.g_of(v) as u128) == c0
    }
}

/// `(x, y) ↦ (M(x^Q), κ y^{εQ})` with `Q = q_pow` (1 for an automorphism).
#[derive(Debug, Clone, Copy)]
pub struct SemilinearMap {
    pub m: Moebius,
    pub q_pow: u128,
    pub kappa: Elem,
    pub eps: i64,
}

pub const MAX_PLACE_EXTENSION: usize = 12;
pub const MAX_CENSUS_FIELD: u128 = 28_561; // 13^4

fn census_field(c: &CurveSpec, l: usize) -> Result<(KummerModel, Arc<Field>)> {
    if l == 0 || l > MAX_PLACE_EXTENSION {
        return Err(GfcError::DeskScaleExceeded(format!(
            "extension degree {l} > {MAX_PLACE_EXTENSION}"
        )));
    }
    let model = c.kummer_unchecked()?;
    let w = model.field.clone();
    let size = (w.order()).checked_pow(l as u32).unwrap_or(u128::MAX);
    if size > MAX_CENSUS_FIELD {
        return Err(GfcError::DeskScaleExceeded(format!("|F| = {size} > 13^4")));
    }
    let e = Field::extend(&w, l)?;
    Ok((model, e))
}

/// All degree-one places over the degree-`l` extension of the working field.
pub fn rational_places(c: &CurveSpec, l: usize) -> Result<Vec<SmoothPoint>> {
    let (model, e) = census_field(c, l)?;
    let lm = LocalModel::new(&model, &e)?;
    Ok(ProjPoint::all(&e)
        .flat_map(|x| lm.places_over(&x))
        .collect())
}

pub fn count_rational_places(c: &CurveSpec, l: usize) -> Result<u64> {
    let (model, e) = census_field(c, l)?;
    let lm = LocalModel::new(&model, &e)?;
    Ok(ProjPoint::all(&e).map(|x| lm.count_over(&x)).sum())
}

/// The defining relation `A(x) S(y) = B(x) T(y)` over `F_q` and the branch
/// values of `y ↦ S/T` (in the top field for IIb3).
pub struct PlaneRelation {
    pub a: Poly,
    pub b: Poly,
    pub s: Poly,
    pub t: Poly,
}

pub fn plane_relation(c: &CurveSpec) -> Result<PlaneRelation> {
    let f = &c.base;
    let p = &c.params;
    let xn = Poly::monomial(f.one(), c.n as usize);
    let ym = Poly::monomial(f.one(), c.m as usize);
    let one = Poly::one(f);
    Ok(match c.family {
        Family::I => PlaneRelation {
            a: one.clone(),
            b: one.sub(&xn.scale(&p[0], f), f),
            s: ym.scale(&p[1], f),
            t: one,
        },
        Family::IIb1 => PlaneRelation {
            a: xn.scale(&p[0], f).add(&Poly::constant(p[2]), f),
            b: one.sub(&xn.scale(&p[1], f), f),
            s: ym,
            t: one,
        },
        Family::IIb2 => {
            let z = nonsplit_quotient(c.tower()?, c.n)?.invariant;
            PlaneRelation {
                a: z.den().clone(),
                b: z.num().clone(),
                s: ym.scale(&p[0], f).add(&Poly::constant(p[1]), f),
                t: ym.scale(&p[2], f).add(&Poly::constant(p[3]), f),
            }
        }
        Family::IIb3 => {
            let t = c.tower()?;
            let zn = nonsplit_quotient(t, c.n)?.invariant;
            let zm = nonsplit_quotient(t, c.m)?.invariant;
            let r = c.moebius_params()?.as_ratfn(f).compose(&zn, f);
            PlaneRelation {
                a: r.den().clone(),
                b: r.num().clone(),
                s: zm.num().clone(),
                t: zm.den().clone(),
            }
        }
    })
}

fn hom_eval(p: &Poly, d: usize, x: &ProjPoint, e: &Field) -> Elem {
    let mut acc = Elem::ZERO;
    for (k, c) in p.coeffs().iter().enumerate() {
        let t = e.mul(&e.pow(&x.x0, k as u128), &e.pow(&x.x1, (d - k) as u128));
        acc = e.add(&acc, &e.mul(c, &t));
    }
    acc
}

/// Place count from a direct scan of the defining relation over `P^1 × P^1`
/// at unbranched `x`, plus local Kummer bookkeeping over the branched ones.
pub fn place_count_oracle(c: &CurveSpec, l: usize) -> Result<u64> {
    let (model, e) = census_field(c, l)?;
    let rel = plane_relation(c)?;
    let emb = |p: &Poly| p.embed(&c.base, &e);
    let (a, b, s, t) = (emb(&rel.a)?, emb(&rel.b)?, emb(&rel.s)?, emb(&rel.t)?);
    let dx = a.deg0().max(b.deg0());
    let dy = s.deg0().max(t.deg0());
    // branch values of y ↦ S/T
    let pr: Vec<Elem> = c
        .params
        .iter()
        .map(|x| e.embed_from(&c.base, x).unwrap())
        .collect();
    let branch: Vec<ProjPoint> = match c.family {
        Family::I | Family::IIb1 => {
            vec![ProjPoint::finite(Elem::ZERO, &e), ProjPoint::infinity(&e)]
        }
        Family::IIb2 => vec![
            ProjPoint::new(pr[1], pr[3], &e)?,
            ProjPoint::new(pr[0], pr[2], &e)?,
        ],
        Family::IIb3 => {
            let i = e.embed_from(&c.tower()?.top, &c.tower()?.i)?;
            vec![ProjPoint::finite(i, &e), ProjPoint::finite(e.neg(&i), &e)]
        }
    };
    let mut fiber: HashMap<ProjPoint, u64> = HashMap::new();
    for y in ProjPoint::all(&e) {
        if let Ok(v) = ProjPoint::new(hom_eval(&s, dy, &y, &e), hom_eval(&t, dy, &y, &e), &e) {
            *fiber.entry(v).or_insert(0) += 1;
        }
    }
    let lm = LocalModel::new(&model, &e)?;
    let mut total = 0;
    for x in ProjPoint::all(&e) {
        match ProjPoint::new(hom_eval(&b, dx, &x, &e), hom_eval(&a, dx, &x, &e), &e) {
            Ok(v) if !branch.contains(&v) => total += fiber.get(&v).copied().unwrap_or(0),
            _ => total += lm.count_over(&x),
        }
    }
    Ok(total)
}

/// A singular point of the projective plane model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SingularPoint {
    /// Homogeneous coordinates as integers over the prime field.
    pub point: [u8; 3],
    pub multiplicity: u64,
    pub ordinary: bool,
}

/// Sparse bivariate polynomial: `(i, j) ↦ c` for `c x^i y^j`.
pub type Sparse = Vec<((u64, u64), Elem)>;

/// The plane equation `F(x, y) = 0` of family I or IIb1.
pub fn plane_polynomial(c: &CurveSpec) -> Result<Sparse> {
    let f = &c.base;
    let p = &c.params;
    let minus_one = f.neg(&f.one());
    match c.family {
        Family::I => Ok(vec![
            ((c.n, 0), p[0]),
            ((0, c.m), p[1]),
            ((0, 0), minus_one),
        ]),
        Family::IIb1 => Ok(vec![
            ((c.n, c.m), p[0]),
            ((c.n, 0), p[1]),
            ((0, c.m), p[2]),
            ((0, 0), minus_one),
        ]),
        _ => Err(GfcError::UnsupportedNormalForm(
            "plane model only for families I and IIb1".into(),
        )),
    }
}

/// Singular points of the plane model of a valid family I or IIb1 curve.
///
/// The affine part of a valid curve is smooth (the partials vanish together
/// only when `a = -bc`), so only `(1:0:0)` and `(0:1:0)` are examined.
pub fn singular_locus(c: &CurveSpec) -> Result<Vec<SingularPoint>> {
    let f = &c.base;
    let poly = plane_polynomial(c)?;
    let d = poly.iter().map(|((i, j), _)| i + j).max().unwrap();
    let mut out = Vec::new();
    // (0:1:0): chart y = 1, local coordinates (x, z) with z-degree d - i - j.
    // (1:0:0): chart x = 1, local coordinates (y, z).
    for (point, chart_y) in [([0u8, 1, 0], true), ([1u8, 0, 0], false)] {
        let terms: Vec<((u64, u64), Elem)> = poly
            .iter()
            .map(|((i, j), coef)| {
                let zdeg = d - i - j;
                (if chart_y { (*i, zdeg) } else { (*j, zdeg) }, *coef)
            })
            .collect();
        let mult = terms.iter().map(|((u, v), _)| u + v).min().unwrap();
        if mult == 0 {
            continue; // not on the curve
        }
        if mult == 1 {
            continue; // smooth
        }
        // tangent cone Σ c u^k v^{mult-k} as a polynomial in t = u/v
        let mut cone = vec![Elem::ZERO; mult as usize + 1];
        for ((u, v), coef) in &terms {
            if u + v == mult {
                cone[*u as usize] = f.add(&cone[*u as usize], coef);
            }
        }
        let cone = Poly::from_coeffs(cone);
        let at_inf = mult as usize - cone.deg0();
        let low = cone.coeffs().iter().take_while(|e| e.is_zero()).count();
        let squarefree = cone.gcd(&cone.derivative(f), f).is_constant();
        let ordinary = at_inf <= 1 && low <= 1 && squarefree;
        out.push(SingularPoint {
            point,
            multiplicity: mult,
            ordinary,
        });
    }
    Ok(out)
}

/// `(d-1)(d-2)/2 - Σ r(r-1)/2` for the plane model; meaningful when every
/// singular point is ordinary.
pub fn plane_genus(c: &CurveSpec) -> Result<Option<i64>> {
    let sing = singular_locus(c)?;
    if sing.iter().any(|s| !s.ordinary) {
        return Ok(None);
    }
    let d = plane_polynomial(c)?
        .iter()
        .map(|((i, j), _)| (i + j) as i64)
        .max()
        .unwrap();
    let delta: i64 = sing
        .iter()
        .map(|s| (s.multiplicity * (s.multiplicity - 1) / 2) as i64)
        .sum();
    Ok(Some((d - 1) * (d - 2) / 2 - delta))
}

#[derive(Debug, Clone, Serialize)]
pub struct KummerJson {
    pub m: u64,
    pub f_num: Vec<Vec<u64>>,
    pub f_den: Vec<Vec<u64>>,
    pub substitution: Substitution,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveJson {
    pub family: Family,
    pub q: u128,
    pub s: Option<Vec<u64>>,
    pub n: u64,
    pub m: u64,
    pub params: Vec<Vec<u64>>,
    pub kummer: KummerJson,
    pub genus: GenusJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct GenusJson {
    pub closed: i64,
    pub rh: i64,
}

pub fn curve_json(c: &CurveSpec) -> Result<CurveJson> {
    let model = c.kummer_unchecked()?;
    let RatFnJson { num, den } = model.f.to_json(&model.field);
    Ok(CurveJson {
        family: c.family,
        q: c.q(),
        s: c.tower.as_ref().map(|t| c.base.rel_coords_flat(&t.s)),
        n: c.n,
        m: c.m,
        params: c.params.iter().map(|e| c.base.rel_coords_flat(e)).collect(),
        kummer: KummerJson {
            m: model.m,
            f_num: num,
            f_den: den,
            substitution: model.substitution,
        },
        genus: GenusJson {
            closed: genus_closed_form(c),
            rh: genus_riemann_hurwitz(c)?,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;

    fn ints(f: &Field, v: &[i64]) -> Vec<Elem> {
        v.iter().map(|&k| f.from_int(k)).collect()
    }

    #[test]
    fn constructor_examples() {
        let f7 = make_field(7, 1).unwrap();
        let fermat = make_curve(Family::I, &f7, 3, 3, &ints(&f7, &[1, 1])).unwrap();
        let model = kummer_model(&fermat).unwrap();
        assert_eq!(
            model.f,
            RatFn::from_poly(Poly::from_ints(&f7, &[1, 0, 0, -1]), &f7)
        );
        assert!(matches!(
            make_curve(Family::IIb1, &f7, 3, 3, &ints(&f7, &[6, 1, 1])),
            Err(GfcError::ReducibleOrSingular(_))
        ));
        let f5 = make_field(5, 1).unwrap();
        assert!(matches!(
            make_curve(Family::IIb3, &f5, 3, 3, &ints(&f5, &[1, 0, 0, 1])),
            Err(GfcError::ReducibleOrSingular(_))
        ));
        assert!(matches!(
            make_curve(Family::I, &f7, 7, 3, &ints(&f7, &[1, 1])),
            Err(GfcError::TamenessViolation(_))
        ));
        assert!(matches!(
            make_curve(Family::I, &f7, 4, 3, &ints(&f7, &[1, 1])),
            Err(GfcError::WrongFamily { .. })
        ));
        assert!(make_curve(Family::I, &f7, 3, 3, &ints(&f7, &[1])).is_err());
        assert!(make_curve(Family::I, &f7, 2, 2, &ints(&f7, &[1, 1])).is_err());
    }

    #[test]
    fn kummer_examples() {
        let f7 = make_field(7, 1).unwrap();
        let c = make_curve(Family::IIb1, &f7, 3, 3, &ints(&f7, &[2, 1, 1])).unwrap();
        let want = RatFn::new(
            Poly::from_ints(&f7, &[1, 0, 0, -1]),
            Poly::from_ints(&f7, &[1, 0, 0, 2]),
            &f7,
        )
        .unwrap();
        assert_eq!(kummer_model(&c).unwrap().f, want);
        let c = CurveSpec::unchecked(Family::IIb2, &f7, 2, 3, &ints(&f7, &[1, 0, 0, 1])).unwrap();
        let want = RatFn::new(
            Poly::from_ints(&f7, &[0, 6]),
            Poly::from_ints(&f7, &[3, 0, 1]),
            &f7,
        )
        .unwrap();
        assert_eq!(kummer_model(&c).unwrap().f, want);
    }

    #[test]
    fn genus_examples() {
        let f7 = make_field(7, 1).unwrap();
        let fermat = make_curve(Family::I, &f7, 3, 3, &ints(&f7, &[1, 1])).unwrap();
        assert_eq!(genus_closed_form(&fermat), 1);
        assert_eq!(genus_riemann_hurwitz(&fermat).unwrap(), 1);
        let c = make_curve(Family::IIb1, &f7, 3, 3, &ints(&f7, &[2, 1, 1])).unwrap();
        assert_eq!(genus_riemann_hurwitz(&c).unwrap(), 4);
        let c = make_curve(Family::IIb2, &f7, 4, 3, &ints(&f7, &[1, 0, 0, 1])).unwrap();
        assert_eq!(genus_closed_form(&c), 6);
        assert_eq!(genus_riemann_hurwitz(&c).unwrap(), 6);
        let f5 = make_field(5, 1).unwrap();
        let c = make_curve(Family::IIb1, &f5, 4, 2, &ints(&f5, &[1, 1, 1])).unwrap();
        assert_eq!(genus_riemann_hurwitz(&c).unwrap(), 3);
    }

    #[test]
    fn fermat_cubic_places() {
        let f7 = make_field(7, 1).unwrap();
        let fermat = make_curve(Family::I, &f7, 3, 3, &ints(&f7, &[1, 1])).unwrap();
        let pts = rational_places(&fermat, 1).unwrap();
        let x0: Vec<_> = pts
            .iter()
            .filter(|p| p.x == ProjPoint::finite(Elem::ZERO, &f7))
            .collect();
        assert_eq!(x0.len(), 3);
        assert_eq!(pts.iter().filter(|p| p.x.is_infinity()).count(), 3);
        let model = kummer_model(&fermat).unwrap();
        let lm = LocalModel::new(&model, &f7).unwrap();
        let y0 = pts.iter().filter(|p| lm.local(&p.x).1 > 0).count();
        assert_eq!(y0, 3);
        assert_eq!(pts.len() as u64, place_count_oracle(&fermat, 1).unwrap());
        assert_eq!(pts.len() as u64, count_rational_places(&fermat, 1).unwrap());
    }

    #[test]
    fn oracle_matches_for_iib1_over_f49() {
        let f7 = make_field(7, 1).unwrap();
        let c = make_curve(Family::IIb1, &f7, 3, 3, &ints(&f7, &[2, 1, 1])).unwrap();
        assert_eq!(
            count_rational_places(&c, 2).unwrap(),
            place_count_oracle(&c, 2).unwrap()
        );
    }

    #[test]
    fn singular_points() {
        let f7 = make_field(7, 1).unwrap();
        let c = make_curve(Family::IIb1, &f7, 3, 3, &ints(&f7, &[2, 1, 1])).unwrap();
        let s = singular_locus(&c).unwrap();
        assert_eq!(
            s,
            vec![
                SingularPoint {
                    point: [0, 1, 0],
                    multiplicity: 3,
                    ordinary: true
                },
                SingularPoint {
                    point: [1, 0, 0],
                    multiplicity: 3,
                    ordinary: true
                }
            ]
        );
        assert_eq!(plane_genus(&c).unwrap(), Some(4));
        let fermat = make_curve(Family::I, &f7, 3, 3, &ints(&f7, &[1, 1])).unwrap();
        assert!(singular_locus(&fermat).unwrap().is_empty());
    }

    #[test]
    fn guards() {
        let f7 = make_field(7, 1).unwrap();
        let c = make_curve(Family::I, &f7, 3, 3, &ints(&f7, &[1, 1])).unwrap();
        assert!(matches!(
            rational_places(&c, 13),
            Err(GfcError::DeskScaleExceeded(_))
        ));
        assert!(matches!(
            count_rational_places(&c, 6),
            Err(GfcError::DeskScaleExceeded(_))
        ));
    }
}
