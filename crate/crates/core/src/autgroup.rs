//! Automorphisms of the curve families: the `C_n × C_m` orbit census with the
//! Frobenius action on short orbits, the monomial catalog on the
//! `a x^n y^m + x^n + y^m = 1` model with closure and recognition, and the
//! generators of `z^Q + z = w^2`.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::curves::{
    count_rational_places, CurveSpec, Family, KummerModel, LocalModel, SemilinearMap, SmoothPoint,
    MAX_PLACE_EXTENSION,
};
use crate::error::{GfcError, Result};
use crate::ffield::{gcd, lcm, prime_factors, root_of_unity, Elem, Field};
use crate::moebius::{fixed_points, nonsplit_cyclic_generator, Moebius, ProjPoint};
use crate::places::RatFn;
use crate::poly::Poly;

// ---------------------------------------------------------------------------
// orbit census

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FrobeniusCase {
    #[serde(rename = "T3-all-preserved")]
    T3All,
    #[serde(rename = "T4-all-preserved")]
    T4All,
    #[serde(rename = "T4-two-preserved")]
    T4Two,
    #[serde(rename = "T4-none-preserved")]
    T4None,
}

impl fmt::Display for FrobeniusCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrobeniusCase::T3All => "T3-all-preserved",
            FrobeniusCase::T4All => "T4-all-preserved",
            FrobeniusCase::T4Two => "T4-two-preserved",
            FrobeniusCase::T4None => "T4-none-preserved",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PlaceJson {
    pub x: Option<Vec<u64>>,
    pub label: Vec<u64>,
}

fn place_json(p: &SmoothPoint, e: &Field) -> PlaceJson {
    PlaceJson {
        x: p.x.affine(e).map(|a| e.rel_coords_flat(&a)),
        label: e.rel_coords_flat(&p.label),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Orbit {
    pub size: u64,
    pub representative: PlaceJson,
    pub stabilizer: u64,
    #[serde(skip)]
    pub rep: SmoothPoint,
}

#[derive(Debug, Clone, Serialize)]
pub struct Census {
    pub places: u64,
    pub orbit_size_sum: u64,
    pub long_orbits: u64,
    /// Every orbit of size `< mn` lies over the branch and fixed locus.
    pub short_orbits_match: bool,
    pub long_orbit_law: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitReport {
    #[serde(rename = "L")]
    pub l: usize,
    pub field_order: u128,
    pub group_order: u64,
    /// Orbits over the zeros and poles of `f` and the fixed points of `σ1`.
    pub orbits: Vec<Orbit>,
    pub short_orbits: Vec<usize>,
    /// Image of each short orbit under Frobenius (indices into `short_orbits`).
    pub frobenius_action: Vec<usize>,
    pub case: FrobeniusCase,
    pub census: Option<Census>,
    #[serde(skip)]
    pub field: Option<Arc<Field>>,
}

impl OrbitReport {
    pub fn short_sizes(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self
            .short_orbits
            .iter()
            .map(|&i| self.orbits[i].size)
            .collect();
        v.sort();
        v
    }
}

/// `σ1` (on `x`), `σ2` (on `y`, or on `w` for IIb3) and the `F_q`-Frobenius.
pub struct OrbitMaps {
    pub sigma1: SemilinearMap,
    pub sigma2: SemilinearMap,
    pub frobenius: SemilinearMap,
}

pub fn orbit_maps(c: &CurveSpec, e: &Arc<Field>) -> Result<OrbitMaps> {
    let base = &c.base;
    let one = e.one();
    let m1 = match c.family {
        Family::I | Family::IIb1 => {
            let z = e.embed_from(base, &root_of_unity(base, c.n)?)?;
            Moebius::new(e, z, Elem::ZERO, Elem::ZERO, one)?
        }
        Family::IIb2 | Family::IIb3 => nonsplit_cyclic_generator(c.tower()?, c.n)?
            .tau
            .embed(base, e)?,
    };
    let kappa = root_of_unity(e, c.m)?;
    let id = Moebius::identity(e);
    Ok(OrbitMaps {
        sigma1: SemilinearMap {
            m: m1,
            q_pow: 1,
            kappa: one,
            eps: 1,
        },
        sigma2: SemilinearMap {
            m: id,
            q_pow: 1,
            kappa,
            eps: 1,
        },
        frobenius: SemilinearMap {
            m: id,
            q_pow: base.order(),
            kappa: one,
            eps: if c.family == Family::IIb3 { -1 } else { 1 },
        },
    })
}

/// Points of the `x`-line carrying short orbits: zeros and poles of `f`,
/// plus the fixed points of `σ1`, in `P^1(e)`.
fn special_points(lm: &LocalModel, sigma1: &Moebius) -> Result<Vec<ProjPoint>> {
    let e = &lm.e;
    let mut pts: Vec<ProjPoint> = Vec::new();
    for p in [lm.f.num(), lm.f.den()] {
        pts.extend(p.roots(e).into_iter().map(|r| ProjPoint::finite(r, e)));
    }
    if lm.f.num().deg0() != lm.f.den().deg0() {
        pts.push(ProjPoint::infinity(e));
    }
    pts.extend(fixed_points(sigma1, e, e)?);
    let mut seen = HashSet::new();
    pts.retain(|p| seen.insert(*p));
    Ok(pts)
}

fn geometric_special_count(model: &KummerModel) -> Result<usize> {
    let w = &model.field;
    let mut k = 0;
    for p in [model.f.num(), model.f.den()] {
        k += p
            .factorize(w)?
            .1
            .iter()
            .map(|(g, _)| g.deg0())
            .sum::<usize>();
    }
    if model.f.num().deg0() != model.f.den().deg0() {
        k += 1;
    }
    Ok(k)
}

/// Degree over the working field needed for `x`-points over zeros/poles of `f`
/// and for the fixed points of `σ1`.
fn base_degree(c: &CurveSpec, model: &KummerModel) -> Result<usize> {
    let mut l = 1u64;
    for p in [model.f.num(), model.f.den()] {
        for (g, _) in p.factorize(&model.field)?.1 {
            l = lcm(l, g.deg0() as u64);
        }
    }
    if matches!(c.family, Family::IIb2) {
        l = lcm(l, 2);
    }
    Ok(l as usize)
}

fn canon_point_key(p: &SmoothPoint, e: &Field) -> (u8, u128, u128) {
    match p.x.affine(e) {
        Some(a) => (0, e.canonical_index(&a), e.canonical_index(&p.label)),
        None => (1, 0, e.canonical_index(&p.label)),
    }
}

/// Whether every geometric place over the special points is `e`-rational.
fn special_places_rational(c: &CurveSpec, model: &KummerModel, e: &Arc<Field>) -> Result<bool> {
    let lm = LocalModel::new(model, e)?;
    let maps = orbit_maps(c, e)?;
    let mut zp = 0;
    for p in [lm.f.num(), lm.f.den()] {
        zp += p.roots(e).len();
    }
    if lm.f.num().deg0() != lm.f.den().deg0() {
        zp += 1;
    }
    if zp != geometric_special_count(model)? || fixed_points(&maps.sigma1.m, e, e)?.len() != 2 {
        return Ok(false);
    }
    let pts = special_points(&lm, &maps.sigma1.m)?;
    Ok(pts
        .iter()
        .all(|x| lm.count_over(x) == lm.geometric_count_over(x)))
}

/// Least `L ≤ 12` over which every place over the special points is rational.
pub fn orbit_extension(c: &CurveSpec) -> Result<usize> {
    let model = c.kummer_unchecked()?;
    let step = base_degree(c, &model)?;
    let mut l = step;
    while l <= MAX_PLACE_EXTENSION {
        let e = Field::extend(&model.field, l)?;
        if special_places_rational(c, &model, &e)? {
            return Ok(l);
        }
        l += step;
    }
    Err(GfcError::RaiseExtension(MAX_PLACE_EXTENSION))
}

/// Census bound for the full enumeration of places.
pub const FULL_CENSUS_FIELD: u128 = 2500;

fn orbits_of(
    places: &[SmoothPoint],
    lm: &LocalModel,
    gens: &[&SemilinearMap],
) -> Result<(Vec<Vec<SmoothPoint>>, HashMap<SmoothPoint, usize>)> {
    let mut index: HashMap<SmoothPoint, usize> = HashMap::new();
    let mut orbits = Vec::new();
    for p in places {
        if index.contains_key(p) {
            continue;
        }
        let id = orbits.len();
        let mut orbit = vec![*p];
        index.insert(*p, id);
        let mut queue = VecDeque::from([*p]);
        while let Some(cur) = queue.pop_front() {
            for g in gens {
                let img = lm.transport(&cur, g);
                if !lm.is_valid(&img) {
                    return Err(GfcError::OracleFailure(
                        "transported label off the curve".into(),
                    ));
                }
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(img) {
                    e.insert(id);
                    orbit.push(img);
                    queue.push_back(img);
                }
            }
        }
        orbits.push(orbit);
    }
    Ok((orbits, index))
}

pub fn g_orbits(c: &CurveSpec) -> Result<OrbitReport> {
    let l = orbit_extension(c)?;
    g_orbits_at(c, l)
}

/// Orbit census of `⟨σ1, σ2⟩` over the degree-`l` extension of the working field.
pub fn g_orbits_at(c: &CurveSpec, l: usize) -> Result<OrbitReport> {
    if l > MAX_PLACE_EXTENSION {
        return Err(GfcError::DeskScaleExceeded(format!(
            "L = {l} > {MAX_PLACE_EXTENSION}"
        )));
    }
    let model = c.kummer_unchecked()?;
    let e = Field::extend(&model.field, l)?;
    if !special_places_rational(c, &model, &e)? {
        return Err(GfcError::RaiseExtension(l));
    }
    let lm = LocalModel::new(&model, &e)?;
    let maps = orbit_maps(c, &e)?;
    let group_order = c.n * c.m;
    let mut special: Vec<SmoothPoint> = special_points(&lm, &maps.sigma1.m)?
        .iter()
        .flat_map(|x| lm.places_over(x))
        .collect();
    special.sort_by_key(|p| canon_point_key(p, &e));
    let (raw, index) = orbits_of(&special, &lm, &[&maps.sigma1, &maps.sigma2])?;
    if raw.iter().flatten().count() != special.len() {
        return Err(GfcError::OracleFailure(
            "special places not closed under the group".into(),
        ));
    }
    let mut orbits: Vec<(Orbit, usize)> = raw
        .iter()
        .enumerate()
        .map(|(k, o)| {
            let rep = *o.iter().min_by_key(|p| canon_point_key(p, &e)).unwrap();
            let size = o.len() as u64;
            (
                Orbit {
                    size,
                    representative: place_json(&rep, &e),
                    stabilizer: group_order / size,
                    rep,
                },
                k,
            )
        })
        .collect();
    orbits.sort_by_key(|(o, _)| (o.size, canon_point_key(&o.rep, &e)));
    let mut renumber = vec![0; orbits.len()];
    for (new, (_, old)) in orbits.iter().enumerate() {
        renumber[*old] = new;
    }
    let orbits: Vec<Orbit> = orbits.into_iter().map(|(o, _)| o).collect();
    let short: Vec<usize> = (0..orbits.len())
        .filter(|&i| orbits[i].size < group_order)
        .collect();
    let mut action = Vec::new();
    for &i in &short {
        let img = lm.transport(&orbits[i].rep, &maps.frobenius);
        let j = index.get(&img).map(|&k| renumber[k]).ok_or_else(|| {
            GfcError::OracleFailure("Frobenius image outside special places".into())
        })?;
        let pos = short.iter().position(|&s| s == j).ok_or_else(|| {
            GfcError::TheoremViolation("Frobenius maps a short orbit to a long one".into())
        })?;
        action.push(pos);
    }
    let fixed = action.iter().enumerate().filter(|(i, j)| i == *j).count();
    let case = match (short.len(), fixed) {
        (3, 3) => FrobeniusCase::T3All,
        (4, 4) => FrobeniusCase::T4All,
        (4, 2) => FrobeniusCase::T4Two,
        (4, 0) => FrobeniusCase::T4None,
        (t, k) => {
            return Err(GfcError::TheoremViolation(format!(
                "{t} short orbits, {k} preserved by Frobenius"
            )))
        }
    };
    let census = if e.order() <= FULL_CENSUS_FIELD {
        Some(full_census(c, &lm, &maps, l, group_order, &orbits, &short)?)
    } else {
        None
    };
    Ok(OrbitReport {
        l,
        field_order: e.order(),
        group_order,
        orbits,
        short_orbits: short,
        frobenius_action: action,
        case,
        census,
        field: Some(e),
    })
}

fn full_census(
    c: &CurveSpec,
    lm: &LocalModel,
    maps: &OrbitMaps,
    l: usize,
    group_order: u64,
    special: &[Orbit],
    short: &[usize],
) -> Result<Census> {
    let e = &lm.e;
    let mut all: Vec<SmoothPoint> = ProjPoint::all(e).flat_map(|x| lm.places_over(&x)).collect();
    all.sort_by_key(|p| canon_point_key(p, e));
    let (orbits, _) = orbits_of(&all, lm, &[&maps.sigma1, &maps.sigma2])?;
    let places = count_rational_places(c, l)?;
    let orbit_size_sum: u64 = orbits.iter().map(|o| o.len() as u64).sum();
    let mut full_short: Vec<u64> = orbits
        .iter()
        .map(|o| o.len() as u64)
        .filter(|&s| s < group_order)
        .collect();
    full_short.sort();
    let mut want: Vec<u64> = short.iter().map(|&i| special[i].size).collect();
    want.sort();
    let long: Vec<_> = orbits
        .iter()
        .filter(|o| o.len() as u64 >= group_order)
        .collect();
    Ok(Census {
        places,
        orbit_size_sum,
        long_orbits: long.len() as u64,
        short_orbits_match: full_short == want,
        long_orbit_law: long.iter().all(|o| o.len() as u64 == group_order),
    })
}

/// Case predicted by the split/nonsplit pattern of the family.
pub fn expected_case(family: Family) -> FrobeniusCase {
    match family {
        Family::I => FrobeniusCase::T3All,
        Family::IIb1 => FrobeniusCase::T4All,
        Family::IIb2 => FrobeniusCase::T4Two,
        Family::IIb3 => FrobeniusCase::T4None,
    }
}

/// Checks the computed Frobenius case against the divisibility pattern.
pub fn frobenius_orbit_action(c: &CurveSpec, r: &OrbitReport) -> Result<FrobeniusCase> {
    let want = expected_case(c.family);
    if r.case != want {
        return Err(GfcError::TheoremViolation(format!(
            "Frobenius case {} but divisibility predicts {want}",
            r.case
        )));
    }
    if c.family == Family::IIb2 {
        // the preserved pair are the size-n orbits over the zeros and poles of f
        for (i, &j) in r.frobenius_action.iter().enumerate() {
            let over_branch = r.orbits[r.short_orbits[i]].size == c.n && c.n != c.m;
            if over_branch && i != j {
                return Err(GfcError::TheoremViolation("a size-n orbit is moved".into()));
            }
        }
    }
    Ok(r.case)
}

/// `2g - 2 = (t - 2) mn - Σ ℓ_ν` over the short orbits.
pub fn rhp_holds(c: &CurveSpec, genus: i64, r: &OrbitReport) -> bool {
    let t = r.short_orbits.len() as i64;
    let mn = (c.n * c.m) as i64;
    let sum: i64 = r.short_sizes().iter().map(|&s| s as i64).sum();
    2 * genus - 2 == (t - 2) * mn - sum
}

/// Short orbit sizes predicted for the family.
pub fn expected_short_sizes(c: &CurveSpec) -> Vec<u64> {
    let mut v = if c.family == Family::I {
        vec![c.n, c.m, gcd(c.n, c.m)]
    } else {
        vec![c.n, c.n, c.m, c.m]
    };
    v.sort();
    v
}

pub fn kontogeorgis_normal(r: u64, s: u64) -> bool {
    2 * r < s
}

// ---------------------------------------------------------------------------
// monomial automorphisms

/// `t ↦ α t` or `t ↦ α / t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MonoMap {
    pub alpha: Elem,
    pub inv: bool,
}

impl MonoMap {
    pub fn scale(alpha: Elem) -> MonoMap {
        MonoMap { alpha, inv: false }
    }

    pub fn invert(alpha: Elem) -> MonoMap {
        MonoMap { alpha, inv: true }
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &MonoMap, f: &Field) -> MonoMap {
        let inner = if self.inv {
            f.inv(&o.alpha).unwrap()
        } else {
            o.alpha
        };
        MonoMap {
            alpha: f.mul(&self.alpha, &inner),
            inv: self.inv != o.inv,
        }
    }

    fn exp(&self) -> i64 {
        if self.inv {
            -1
        } else {
            1
        }
    }

    pub fn apply(&self, p: &ProjPoint, f: &Field) -> ProjPoint {
        let q = if self.inv {
            ProjPoint { x0: p.x1, x1: p.x0 }
        } else {
            *p
        };
        ProjPoint::new(f.mul(&self.alpha, &q.x0), q.x1, f).unwrap()
    }
}

/// `(x, y) ↦ (u(s1), v(s2))` with `(s1, s2) = (x, y)`, or `(y, x)` if `swap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CurveAutomorphism {
    pub swap: bool,
    pub x: MonoMap,
    pub y: MonoMap,
}

#[derive(Debug, Clone, Serialize)]
pub struct AutomorphismJson {
    pub name: String,
    pub swap: bool,
    pub x_map: String,
    pub y_map: String,
}

impl CurveAutomorphism {
    pub fn identity(f: &Field) -> CurveAutomorphism {
        CurveAutomorphism {
            swap: false,
            x: MonoMap::scale(f.one()),
            y: MonoMap::scale(f.one()),
        }
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &CurveAutomorphism, f: &Field) -> CurveAutomorphism {
        if self.swap {
            CurveAutomorphism {
                swap: !o.swap,
                x: self.x.compose(&o.y, f),
                y: self.y.compose(&o.x, f),
            }
        } else {
            CurveAutomorphism {
                swap: o.swap,
                x: self.x.compose(&o.x, f),
                y: self.y.compose(&o.y, f),
            }
        }
    }

    pub fn apply(&self, p: &(ProjPoint, ProjPoint), f: &Field) -> (ProjPoint, ProjPoint) {
        let (s1, s2) = if self.swap { (p.1, p.0) } else { (p.0, p.1) };
        (self.x.apply(&s1, f), self.y.apply(&s2, f))
    }

    /// `F ∘ φ` as a Laurent polynomial, `(i, j) ↦ c`.
    fn substitute(&self, poly: &[((u64, u64), Elem)], f: &Field) -> BTreeMap<(i64, i64), Elem> {
        let mut out: BTreeMap<(i64, i64), Elem> = BTreeMap::new();
        for ((i, j), c) in poly {
            let coef = f.mul(
                c,
                &f.mul(
                    &f.pow(&self.x.alpha, *i as u128),
                    &f.pow(&self.y.alpha, *j as u128),
                ),
            );
            let (ei, ej) = (self.x.exp() * *i as i64, self.y.exp() * *j as i64);
            let key = if self.swap { (ej, ei) } else { (ei, ej) };
            let slot = out.entry(key).or_insert(Elem::ZERO);
            *slot = f.add(slot, &coef);
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// Whether `F ∘ φ = λ x^A y^B F` for a constant `λ` and a monomial.
    pub fn preserves(&self, poly: &[((u64, u64), Elem)], f: &Field) -> bool {
        let img = self.substitute(poly, f);
        let src: BTreeMap<(i64, i64), Elem> = poly
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((i, j), c)| ((*i as i64, *j as i64), *c))
            .collect();
        if img.len() != src.len() || img.is_empty() {
            return false;
        }
        let shift = |m: &BTreeMap<(i64, i64), Elem>| {
            (
                m.keys().map(|k| k.0).min().unwrap(),
                m.keys().map(|k| k.1).min().unwrap(),
            )
        };
        let (si, sj) = shift(&src);
        let (ti, tj) = shift(&img);
        let (k0, c0) = src.iter().next().unwrap();
        let Some(d0) = img.get(&(k0.0 - si + ti, k0.1 - sj + tj)) else {
            return false;
        };
        let lambda = f.div(d0, c0).unwrap();
        src.iter()
            .all(|((i, j), c)| img.get(&(i - si + ti, j - sj + tj)) == Some(&f.mul(&lambda, c)))
    }

    fn key(&self, f: &Field) -> (bool, bool, bool, u128, u128) {
        (
            self.swap,
            self.x.inv,
            self.y.inv,
            f.canonical_index(&self.x.alpha),
            f.canonical_index(&self.y.alpha),
        )
    }

    pub fn to_json(&self, name: &str, f: &Field) -> AutomorphismJson {
        let show = |m: &MonoMap, var: &str| {
            let a = f.rel_coords_flat(&m.alpha);
            if m.inv {
                format!("{a:?}/{var}")
            } else {
                format!("{a:?}*{var}")
            }
        };
        let (v1, v2) = if self.swap { ("y", "x") } else { ("x", "y") };
        AutomorphismJson {
            name: name.into(),
            swap: self.swap,
            x_map: show(&self.x, v1),
            y_map: show(&self.y, v2),
        }
    }
}

/// The named generators of the catalog and the model they act on.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub field: Arc<Field>,
    /// Coefficient `a` of the normalized model (`a/(bc)` for IIb1).
    pub a: Elem,
    pub n: u64,
    pub m: u64,
    pub family: Family,
    pub equation: Vec<((u64, u64), Elem)>,
    pub gens: Vec<(String, CurveAutomorphism)>,
    /// Degree of the catalog field over `F_q`.
    pub degree_over_base: usize,
}

impl Catalog {
    pub fn get(&self, name: &str) -> Option<CurveAutomorphism> {
        self.gens.iter().find(|(n, _)| n == name).map(|(_, g)| *g)
    }

    pub fn all(&self) -> Vec<CurveAutomorphism> {
        self.gens.iter().map(|(_, g)| *g).collect()
    }

    pub fn pick(&self, names: &[&str]) -> Vec<CurveAutomorphism> {
        names.iter().filter_map(|n| self.get(n)).collect()
    }

    pub fn is_one(&self) -> bool {
        self.a == self.field.one()
    }
}

/// Catalog generators. IIb1 curves are first normalized to `b = c = 1`
/// (`a ↦ a/(bc)`); IIb2/IIb3 need the quadratic base change first.
pub fn generator_catalog(c: &CurveSpec) -> Result<Catalog> {
    let base = &c.base;
    let (n, m) = (c.n, c.m);
    let minus_one = base.neg(&base.one());
    let (a, equation_base, family) = match c.family {
        Family::IIb1 => {
            let a = base.div(&c.params[0], &base.mul(&c.params[1], &c.params[2]))?;
            (
                a,
                vec![
                    ((n, m), a),
                    ((n, 0), base.one()),
                    ((0, m), base.one()),
                    ((0, 0), minus_one),
                ],
                Family::IIb1,
            )
        }
        Family::I => {
            let (a, b) = (c.params[0], c.params[1]);
            (
                a,
                vec![((n, 0), a), ((0, m), b), ((0, 0), minus_one)],
                Family::I,
            )
        }
        _ => {
            return Err(GfcError::UnsupportedNormalForm(format!(
                "family {} has no monomial catalog before the quadratic base change",
                c.family
            )))
        }
    };
    let a_is_one = a == base.one() && family == Family::IIb1;
    let target = base.neg(&base.inv(&a)?);
    // smallest extension carrying the needed roots
    let mut k = 1;
    let field = loop {
        let f = Field::extend(base, k)?;
        let t = f.embed_from(base, &target)?;
        let mut ok = f.is_nth_power(&t, n) && f.is_nth_power(&t, m);
        if a_is_one {
            ok &= (f.order() - 1) % (2 * n as u128) == 0 && (f.order() - 1) % (2 * m as u128) == 0;
        }
        if family == Family::I {
            ok = true;
        }
        if ok {
            break f;
        }
        k += 1;
        if k > 24 {
            return Err(GfcError::RaiseExtension(24));
        }
    };
    let f = &field;
    let emb = |x: &Elem| f.embed_from(base, x).unwrap();
    let equation: Vec<((u64, u64), Elem)> =
        equation_base.iter().map(|(k, v)| (*k, emb(v))).collect();
    let one = f.one();
    let (d1, d2) = if a_is_one {
        (
            Some(root_of_unity(f, 2 * n)?),
            Some(root_of_unity(f, 2 * m)?),
        )
    } else {
        (None, None)
    };
    let z1 = d1.map(|d| f.mul(&d, &d)).unwrap_or(root_of_unity(f, n)?);
    let z2 = d2.map(|d| f.mul(&d, &d)).unwrap_or(root_of_unity(f, m)?);
    let mut gens = vec![
        (
            "sigma1".to_string(),
            CurveAutomorphism {
                swap: false,
                x: MonoMap::scale(z1),
                y: MonoMap::scale(one),
            },
        ),
        (
            "sigma2".to_string(),
            CurveAutomorphism {
                swap: false,
                x: MonoMap::scale(one),
                y: MonoMap::scale(z2),
            },
        ),
    ];
    if family == Family::IIb1 {
        let t = emb(&target);
        let c1 = f.nth_roots(&t, n)[0];
        let c2 = f.nth_roots(&t, m)[0];
        gens.push((
            "mu".into(),
            CurveAutomorphism {
                swap: false,
                x: MonoMap::invert(c1),
                y: MonoMap::invert(c2),
            },
        ));
        if let (Some(d1), Some(d2)) = (d1, d2) {
            gens.push((
                "tau1".into(),
                CurveAutomorphism {
                    swap: false,
                    x: MonoMap::scale(d1),
                    y: MonoMap::invert(one),
                },
            ));
            gens.push((
                "tau2".into(),
                CurveAutomorphism {
                    swap: false,
                    x: MonoMap::invert(one),
                    y: MonoMap::scale(d2),
                },
            ));
        }
    }
    let theta_ok = n == m && (family == Family::IIb1 || c.params[0] == c.params[1]);
    if theta_ok {
        gens.push((
            "theta".into(),
            CurveAutomorphism {
                swap: true,
                x: MonoMap::scale(one),
                y: MonoMap::scale(one),
            },
        ));
    }
    for (name, g) in &gens {
        if !g.preserves(&equation, f) {
            return Err(GfcError::TheoremViolation(format!(
                "{name} does not preserve the curve"
            )));
        }
    }
    Ok(Catalog {
        field: field.clone(),
        a: emb(&a),
        n,
        m,
        family,
        equation,
        gens,
        degree_over_base: k,
    })
}

// ---------------------------------------------------------------------------
// finite groups by multiplication table

/// Multiplication table on `0..len`; `mul[i][j] = i·j`.
#[derive(Debug, Clone)]
pub struct MulTable {
    pub mul: Vec<Vec<usize>>,
    pub identity: usize,
}

impl MulTable {
    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order())
            .find(|&b| self.mul[a][b] == self.identity)
            .unwrap()
    }

    pub fn elem_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != self.identity {
            x = self.mul[x][a];
            k += 1;
        }
        k
    }

    pub fn power(&self, a: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul[acc][a])
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..a).all(|b| self.mul[a][b] == self.mul[b][a]))
    }

    /// Closure of `gens` as a sorted index set.
    pub fn subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul[x][g];
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order()).filter(|&i| seen[i]).collect()
    }

    /// Full associativity, identity and inverse check.
    pub fn is_group(&self) -> bool {
        let n = self.order();
        let assoc = (0..n).all(|a| {
            (0..n)
                .all(|b| (0..n).all(|c| self.mul[self.mul[a][b]][c] == self.mul[a][self.mul[b][c]]))
        });
        let ident =
            (0..n).all(|a| self.mul[self.identity][a] == a && self.mul[a][self.identity] == a);
        let inv = (0..n).all(|a| (0..n).any(|b| self.mul[a][b] == self.identity));
        assoc && ident && inv
    }

    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for a in 0..self.order() {
            *h.entry(self.elem_order(a)).or_insert(0) += 1;
        }
        h
    }

    /// Checks normality by conjugation; witness `(n, g)` with `g n g^{-1} ∉ N`.
    pub fn normality_witness(&self, sub: &[usize]) -> Option<(usize, usize)> {
        let inside: HashSet<usize> = sub.iter().copied().collect();
        for g in 0..self.order() {
            let gi = self.inverse(g);
            for &x in sub {
                if !inside.contains(&self.mul[self.mul[g][x]][gi]) {
                    return Some((x, g));
                }
            }
        }
        None
    }

    /// Quotient by a normal subgroup.
    pub fn quotient(&self, sub: &[usize]) -> Result<MulTable> {
        if sub.is_empty()
            || self.subgroup(sub) != {
                let mut s = sub.to_vec();
                s.sort();
                s
            }
        {
            return Err(GfcError::InvalidParameter("not a subgroup".into()));
        }
        if let Some((x, g)) = self.normality_witness(sub) {
            return Err(GfcError::NotNormal {
                conjugator: x,
                by: g,
            });
        }
        let mut coset = vec![usize::MAX; self.order()];
        let mut reps = Vec::new();
        for g in 0..self.order() {
            if coset[g] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(g);
            for &x in sub {
                coset[self.mul[g][x]] = id;
            }
        }
        let mul = reps
            .iter()
            .map(|&a| reps.iter().map(|&b| coset[self.mul[a][b]]).collect())
            .collect();
        Ok(MulTable {
            mul,
            identity: coset[self.identity],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Structure {
    Cyclic {
        order: usize,
    },
    /// Dihedral of order `2k`, written `D_k`.
    Dihedral {
        k: usize,
    },
    ElementaryAbelian {
        p: u64,
        rank: usize,
    },
    Abelian {
        invariants: Vec<usize>,
    },
    Unrecognized {
        order: usize,
        abelian: bool,
        histogram: BTreeMap<usize, usize>,
    },
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Structure::Cyclic { order } => write!(f, "C{order}"),
            Structure::Dihedral { k } => write!(f, "D{k}"),
            Structure::ElementaryAbelian { p, rank } => {
                let parts: Vec<String> = (0..*rank).map(|_| format!("C{p}")).collect();
                write!(f, "{}", parts.join(" x "))
            }
            Structure::Abelian { invariants } => {
                let parts: Vec<String> = invariants.iter().map(|k| format!("C{k}")).collect();
                write!(f, "{}", parts.join(" x "))
            }
            Structure::Unrecognized { order, .. } => {
                write!(f, "unrecognized group of order {order}")
            }
        }
    }
}

fn abelian_invariants(t: &MulTable) -> Vec<usize> {
    let n = t.order() as u128;
    let mut primary: Vec<Vec<usize>> = Vec::new();
    for p in prime_factors(n) {
        let p = p as usize;
        // s_k with p^{s_k} = #{x : x^{p^k} = 1}
        let mut s = vec![0usize];
        let mut pk = 1;
        loop {
            pk *= p;
            let c = (0..t.order())
                .filter(|&x| t.power(x, pk) == t.identity)
                .count();
            let sk = (c as f64).log(p as f64).round() as usize;
            if sk == *s.last().unwrap() {
                break;
            }
            s.push(sk);
        }
        // parts ≥ k: s_k - s_{k-1}
        let ge: Vec<usize> = s.windows(2).map(|w| w[1] - w[0]).collect();
        let rank = ge[0];
        let mut parts = vec![0usize; rank];
        for (k, &g) in ge.iter().enumerate() {
            for part in parts.iter_mut().take(g) {
                *part = k + 1;
            }
        }
        primary.push(parts.iter().map(|&e| p.pow(e as u32)).collect());
    }
    let width = primary.iter().map(|v| v.len()).max().unwrap_or(0);
    let mut inv = vec![1usize; width];
    for parts in primary {
        // parts are sorted descending; align largest with the last invariant
        for (i, q) in parts.iter().enumerate() {
            inv[width - 1 - i] *= q;
        }
    }
    inv
}

pub fn recognize_group(t: &MulTable) -> Structure {
    let n = t.order();
    let orders: Vec<usize> = (0..n).map(|a| t.elem_order(a)).collect();
    if orders.contains(&n) {
        return Structure::Cyclic { order: n };
    }
    if t.is_abelian() {
        let inv = abelian_invariants(t);
        let primes = prime_factors(n as u128);
        if primes.len() == 1 && inv.iter().all(|&k| k as u128 == primes[0]) {
            return Structure::ElementaryAbelian {
                p: primes[0] as u64,
                rank: inv.len(),
            };
        }
        return Structure::Abelian { invariants: inv };
    }
    if n.is_multiple_of(2) && n >= 6 {
        let k = n / 2;
        if let Some(r) = (0..n).find(|&a| orders[a] == k) {
            let rot: HashSet<usize> = t.subgroup(&[r]).into_iter().collect();
            let ri = t.inverse(r);
            let dihedral = (0..n)
                .filter(|x| !rot.contains(x))
                .all(|s| orders[s] == 2 && t.mul[t.mul[s][r]][s] == ri);
            if dihedral {
                return Structure::Dihedral { k };
            }
        }
    }
    Structure::Unrecognized {
        order: n,
        abelian: false,
        histogram: t.histogram(),
    }
}

/// A closed set of curve automorphisms with its multiplication table.
#[derive(Debug, Clone)]
pub struct GroupTable {
    pub field: Arc<Field>,
    pub elements: Vec<CurveAutomorphism>,
    pub table: MulTable,
    index: HashMap<CurveAutomorphism, usize>,
}

impl GroupTable {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, g: &CurveAutomorphism) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn indices(&self, gs: &[CurveAutomorphism]) -> Result<Vec<usize>> {
        gs.iter()
            .map(|g| {
                self.index_of(g)
                    .ok_or_else(|| GfcError::InvalidParameter("element not in group".into()))
            })
            .collect()
    }

    pub fn subgroup_of(&self, gs: &[CurveAutomorphism]) -> Result<Vec<usize>> {
        Ok(self.table.subgroup(&self.indices(gs)?))
    }
}

pub fn generated_group(
    gens: &[CurveAutomorphism],
    f: &Arc<Field>,
    bound: usize,
) -> Result<GroupTable> {
    let id = CurveAutomorphism::identity(f);
    let mut seen: HashSet<CurveAutomorphism> = HashSet::from([id]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.compose(g, f);
            if seen.insert(y) {
                if seen.len() > bound {
                    return Err(GfcError::BoundExceeded(bound));
                }
                queue.push_back(y);
            }
        }
    }
    let mut elements: Vec<CurveAutomorphism> = seen.into_iter().collect();
    elements.sort_by_key(|g| g.key(f));
    let index: HashMap<CurveAutomorphism, usize> =
        elements.iter().enumerate().map(|(i, g)| (*g, i)).collect();
    let mul = elements
        .iter()
        .map(|a| elements.iter().map(|b| index[&a.compose(b, f)]).collect())
        .collect();
    let table = MulTable {
        mul,
        identity: index[&id],
    };
    Ok(GroupTable {
        field: f.clone(),
        elements,
        table,
        index,
    })
}

pub fn quotient_structure(g: &GroupTable, sub: &[usize]) -> Result<Structure> {
    Ok(recognize_group(&g.table.quotient(sub)?))
}

/// The four special sets of the normalized model, by the coordinate that is 0 or ∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Boundary {
    X0,
    XInf,
    Y0,
    YInf,
}

impl Boundary {
    pub const ALL: [Boundary; 4] = [Boundary::X0, Boundary::XInf, Boundary::Y0, Boundary::YInf];
}

/// Where `φ` sends the set `{x = 0}`, `{x = ∞}`, `{y = 0}`, `{y = ∞}`.
pub fn boundary_permutation(g: &CurveAutomorphism) -> [Boundary; 4] {
    let flip = |inv: bool, zero: Boundary, inf: Boundary, was_zero: bool| {
        if was_zero != inv {
            zero
        } else {
            inf
        }
    };
    Boundary::ALL.map(|b| {
        let (is_x, was_zero) = match b {
            Boundary::X0 => (true, true),
            Boundary::XInf => (true, false),
            Boundary::Y0 => (false, true),
            Boundary::YInf => (false, false),
        };
        // a point with s = 0/∞ lands in the coordinate that reads s
        let lands_in_x = is_x != g.swap;
        if lands_in_x {
            flip(g.x.inv, Boundary::X0, Boundary::XInf, was_zero)
        } else {
            flip(g.y.inv, Boundary::Y0, Boundary::YInf, was_zero)
        }
    })
}

/// Fixes `{x = 0}` and `{x = ∞}` while exchanging `{y = 0}` and `{y = ∞}`.
pub fn is_interchange(g: &CurveAutomorphism) -> bool {
    boundary_permutation(g) == [Boundary::X0, Boundary::XInf, Boundary::YInf, Boundary::Y0]
}

/// Elements acting trivially on the four boundary sets.
pub fn permutation_kernel(g: &GroupTable) -> Vec<usize> {
    (0..g.order())
        .filter(|&i| boundary_permutation(&g.elements[i]) == Boundary::ALL)
        .collect()
}

/// Orbit of a point under the group.
pub fn point_orbit(g: &GroupTable, p: &(ProjPoint, ProjPoint)) -> HashSet<(ProjPoint, ProjPoint)> {
    g.elements.iter().map(|h| h.apply(p, &g.field)).collect()
}

/// The points of the normalized model with `y ∈ {0, ∞}` (if `on_y`) or `x ∈ {0, ∞}`.
pub fn boundary_points(cat: &Catalog, on_y: bool) -> HashSet<(ProjPoint, ProjPoint)> {
    let f = &cat.field;
    let (k, zero_val) = if on_y {
        (cat.n, ProjPoint::finite(Elem::ZERO, f))
    } else {
        (cat.m, ProjPoint::finite(Elem::ZERO, f))
    };
    let inf = ProjPoint::infinity(f);
    let far = f.neg(&f.inv(&cat.a).unwrap());
    let mut out = HashSet::new();
    // coordinate = 0 gives t^k = 1, coordinate = ∞ gives t^k = -1/a
    for (fixed, rhs) in [(zero_val, f.one()), (inf, far)] {
        for r in f.nth_roots(&rhs, k) {
            let other = ProjPoint::finite(r, f);
            out.insert(if on_y { (other, fixed) } else { (fixed, other) });
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogCheck {
    pub n: u64,
    pub m: u64,
    pub a_is_one: bool,
    pub field_degree: usize,
    pub generators: Vec<AutomorphismJson>,
    pub preserves: bool,
    pub relations: BTreeMap<String, bool>,
    pub orders: BTreeMap<String, usize>,
    pub expected_order: usize,
    pub normal_subgroup: String,
    pub normal: bool,
    pub quotient: String,
    pub expected_quotient: String,
    /// Whether the structure claims apply (the `n = 4` exclusions).
    pub theorem_applies: bool,
    pub interchange_elements: usize,
    pub kernel_is_g: bool,
    pub orbdih_transitive: bool,
    pub generators_in_fq2: bool,
}

impl CatalogCheck {
    pub fn pass(&self) -> bool {
        let structure_ok = !self.theorem_applies
            || (self.normal
                && self.quotient == self.expected_quotient
                && self.orders.get("full") == Some(&self.expected_order));
        let interchange_ok = if self.a_is_one {
            self.interchange_elements > 0
        } else {
            self.interchange_elements == 0
        };
        self.preserves
            && self.relations.values().all(|&b| b)
            && structure_ok
            && interchange_ok
            && self.kernel_is_g
            && self.orbdih_transitive
    }
}

/// Relation, order, normality and quotient checks on an IIb1 catalog.
pub fn check_catalog(c: &CurveSpec) -> Result<CatalogCheck> {
    if c.family != Family::IIb1 {
        return Err(GfcError::UnsupportedNormalForm(
            "catalog checks use the IIb1 model".into(),
        ));
    }
    let cat = generator_catalog(c)?;
    let f = &cat.field;
    let (n, m) = (c.n as usize, c.m as usize);
    let one = cat.is_one();
    let get = |s: &str| cat.get(s).unwrap();
    let (s1, s2, mu) = (get("sigma1"), get("sigma2"), get("mu"));
    let id = CurveAutomorphism::identity(f);
    let inv = |g: &CurveAutomorphism| -> CurveAutomorphism {
        let mut x = *g;
        loop {
            let nx = x.compose(g, f);
            if nx == id {
                return x;
            }
            x = nx;
        }
    };
    let mut relations = BTreeMap::new();
    relations.insert("mu^2 = 1".into(), mu.compose(&mu, f) == id);
    relations.insert(
        "mu sigma1 mu = sigma1^-1".into(),
        mu.compose(&s1, f).compose(&mu, f) == inv(&s1),
    );
    relations.insert(
        "mu sigma2 mu = sigma2^-1".into(),
        mu.compose(&s2, f).compose(&mu, f) == inv(&s2),
    );
    relations.insert(
        "sigma1 sigma2 = sigma2 sigma1".into(),
        s1.compose(&s2, f) == s2.compose(&s1, f),
    );
    if one {
        let (t1, t2) = (get("tau1"), get("tau2"));
        relations.insert("tau1^2 = sigma1".into(), t1.compose(&t1, f) == s1);
        relations.insert("tau2^2 = sigma2".into(), t2.compose(&t2, f) == s2);
        relations.insert(
            "tau1 tau2 != tau2 tau1".into(),
            t1.compose(&t2, f) != t2.compose(&t1, f),
        );
    }
    let bound = 8 * n * m + 1;
    let g = generated_group(&[s1, s2], f, bound)?;
    let gm = generated_group(&[s1, s2, mu], f, bound)?;
    let full = generated_group(&cat.all(), f, bound)?;
    let mut orders = BTreeMap::new();
    orders.insert("sigma1,sigma2".to_string(), g.order());
    orders.insert("sigma1,sigma2,mu".to_string(), gm.order());
    orders.insert("full".to_string(), full.order());
    relations.insert("|<sigma1,sigma2>| = mn".into(), g.order() == n * m);
    relations.insert("|<sigma1,sigma2,mu>| = 2mn".into(), gm.order() == 2 * n * m);
    relations.insert(
        "table is a group".into(),
        full.order() > 64 || full.table.is_group(),
    );

    let (expected_order, sub_names, expected_quotient, theorem_applies) = match n.cmp(&m) {
        std::cmp::Ordering::Greater => (
            if one { 4 * n * m } else { 2 * n * m },
            vec!["sigma2"],
            Structure::Dihedral {
                k: if one { 2 * n } else { n },
            }
            .to_string(),
            n != 4,
        ),
        std::cmp::Ordering::Less => (
            if one { 4 * n * m } else { 2 * n * m },
            vec!["sigma1"],
            Structure::Dihedral {
                k: if one { 2 * m } else { m },
            }
            .to_string(),
            m != 4,
        ),
        std::cmp::Ordering::Equal => (
            if one { 8 * m * m } else { 4 * m * m },
            vec!["sigma1", "sigma2"],
            if one {
                Structure::Dihedral { k: 4 }.to_string()
            } else {
                Structure::ElementaryAbelian { p: 2, rank: 2 }.to_string()
            },
            true,
        ),
    };
    let sub = full.subgroup_of(&cat.pick(&sub_names))?;
    let (normal, quotient) = match quotient_structure(&full, &sub) {
        Ok(s) => (true, s.to_string()),
        Err(GfcError::NotNormal { .. }) => (false, "not normal".into()),
        Err(e) => return Err(e),
    };
    let interchange_elements = full.elements.iter().filter(|g| is_interchange(g)).count();
    let mut kernel = permutation_kernel(&full);
    kernel.sort();
    let gset = full.subgroup_of(&[s1, s2])?;
    let kernel_is_g = kernel == gset;
    // ⟨σ1, μ⟩ on the y ∈ {0, ∞} points and ⟨σ2, μ⟩ on the x ∈ {0, ∞} points
    let on_y = generated_group(&[s1, mu], f, bound)?;
    let on_x = generated_group(&[s2, mu], f, bound)?;
    let ypts = boundary_points(&cat, true);
    let xpts = boundary_points(&cat, false);
    let start_y = (
        ProjPoint::finite(f.one(), f),
        ProjPoint::finite(Elem::ZERO, f),
    );
    let start_x = (
        ProjPoint::finite(Elem::ZERO, f),
        ProjPoint::finite(f.one(), f),
    );
    let orbdih_transitive = ypts.len() == 2 * n
        && xpts.len() == 2 * m
        && point_orbit(&on_y, &start_y) == ypts
        && point_orbit(&on_x, &start_x) == xpts;
    let q2 = c.base.order() * c.base.order();
    let generators_in_fq2 = cat
        .gens
        .iter()
        .all(|(_, g)| f.in_subfield(&g.x.alpha, q2) && f.in_subfield(&g.y.alpha, q2));
    Ok(CatalogCheck {
        n: c.n,
        m: c.m,
        a_is_one: one,
        field_degree: cat.degree_over_base,
        generators: cat
            .gens
            .iter()
            .map(|(name, g)| g.to_json(name, f))
            .collect(),
        preserves: true,
        relations,
        orders,
        expected_order,
        normal_subgroup: format!("<{}>", sub_names.join(",")),
        normal,
        quotient,
        expected_quotient,
        theorem_applies,
        interchange_elements,
        kernel_is_g,
        orbdih_transitive,
        generators_in_fq2,
    })
}

// ---------------------------------------------------------------------------
// z^Q + z = w^2

/// `z ↦ (αz + β)/(γz + δ)`, `w ↦ e w / (γz + δ)^{(Q+1)/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AsMap {
    pub a: [Elem; 4],
    pub e: Elem,
}

impl AsMap {
    /// `self ∘ o`.
    pub fn compose(&self, o: &AsMap, f: &Field, k: u128) -> AsMap {
        let [a, b, c, d] = self.a;
        let [a2, b2, c2, d2] = o.a;
        let m = [
            f.add(&f.mul(&a, &a2), &f.mul(&b, &c2)),
            f.add(&f.mul(&a, &b2), &f.mul(&b, &d2)),
            f.add(&f.mul(&c, &a2), &f.mul(&d, &c2)),
            f.add(&f.mul(&c, &b2), &f.mul(&d, &d2)),
        ];
        AsMap {
            a: m,
            e: f.mul(&self.e, &o.e),
        }
        .canonical(f, k)
    }

    /// First nonzero matrix entry scaled to 1, compensating `e`.
    pub fn canonical(&self, f: &Field, k: u128) -> AsMap {
        let lead = *self.a.iter().find(|x| !x.is_zero()).unwrap();
        let lam = f.inv(&lead).unwrap();
        AsMap {
            a: self.a.map(|x| f.mul(&x, &lam)),
            e: f.mul(&self.e, &f.pow(&lam, k)),
        }
    }

    /// Exact substitution: `Z^Q + Z = W^2 (z^Q + z)` in `K(z)`.
    pub fn preserves(&self, f: &Field, q: u128) -> bool {
        let [a, b, c, d] = self.a;
        let Ok(z) = RatFn::new(
            Poly::from_coeffs(vec![b, a]),
            Poly::from_coeffs(vec![d, c]),
            f,
        ) else {
            return false;
        };
        let den = RatFn::from_poly(Poly::from_coeffs(vec![d, c]), f);
        let Ok(w) = RatFn::constant(self.e, f).div(&den.pow(q.div_ceil(2) as i64, f).unwrap(), f)
        else {
            return false;
        };
        let zq = z.pow(q as i64, f).unwrap();
        let lhs = zq.add(&z, f);
        let x = RatFn::x(f);
        let rhs = w.mul(&w, f).mul(&x.pow(q as i64, f).unwrap().add(&x, f), f);
        lhs == rhs
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ArtinSchreierCertificate {
    pub p: u32,
    pub r: usize,
    pub q: u128,
    pub translations: usize,
    pub translations_ok: bool,
    pub scalings: usize,
    pub scalings_ok: bool,
    pub inversion_ok: bool,
    pub closure_order: usize,
    pub expected_closure_order: u128,
}

impl ArtinSchreierCertificate {
    pub fn pass(&self) -> bool {
        self.translations as u128 == self.q
            && self.translations_ok
            && self.scalings as u128 == 2 * (self.q - 1)
            && self.scalings_ok
            && self.inversion_ok
            && self.closure_order as u128 == self.expected_closure_order
    }
}

pub struct ArtinSchreierGenerators {
    pub field: Arc<Field>,
    pub q: u128,
    pub translations: Vec<AsMap>,
    pub scalings: Vec<AsMap>,
    pub inversion: AsMap,
}

/// Generators on `z^Q + z = w^2`, `Q = p^r`, over `F_{Q^2}`.
pub fn artin_schreier_generators(p: u32, r: usize) -> Result<ArtinSchreierGenerators> {
    if p == 2 || r == 0 {
        return Err(GfcError::InvalidParameter("need odd p and r ≥ 1".into()));
    }
    let f = Field::extend(&Field::prime(p)?, 2 * r)?;
    let q = (p as u128).pow(r as u32);
    let (zero, one) = (Elem::ZERO, f.one());
    let mut tpoly = vec![Elem::ZERO; q as usize + 1];
    tpoly[1] = one;
    tpoly[q as usize] = one;
    let translations = Poly::from_coeffs(tpoly)
        .roots(&f)
        .into_iter()
        .map(|c| AsMap {
            a: [one, c, zero, one],
            e: one,
        })
        .collect();
    let mut spoly = vec![Elem::ZERO; 2 * (q as usize - 1) + 1];
    spoly[0] = f.neg(&one);
    spoly[2 * (q as usize - 1)] = one;
    let scalings = Poly::from_coeffs(spoly)
        .roots(&f)
        .into_iter()
        .map(|a| AsMap {
            a: [f.mul(&a, &a), zero, zero, one],
            e: a,
        })
        .collect();
    let inversion = AsMap {
        a: [zero, one, one, zero],
        e: one,
    };
    Ok(ArtinSchreierGenerators {
        field: f,
        q,
        translations,
        scalings,
        inversion,
    })
}

pub fn certify_artin_schreier(p: u32, r: usize) -> Result<ArtinSchreierCertificate> {
    let g = artin_schreier_generators(p, r)?;
    let (f, q) = (&g.field, g.q);
    let k = q.div_ceil(2);
    let expected = 2 * q * (q * q - 1);
    let mut gens: Vec<AsMap> = Vec::new();
    gens.extend(g.translations.iter().copied());
    gens.extend(g.scalings.iter().copied());
    gens.push(g.inversion);
    let id = AsMap {
        a: [f.one(), Elem::ZERO, Elem::ZERO, f.one()],
        e: f.one(),
    };
    let mut seen = HashSet::from([id]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for h in &gens {
            let y = x.compose(h, f, k);
            if seen.insert(y) {
                if seen.len() as u128 > 2 * expected {
                    return Err(GfcError::BoundExceeded(seen.len()));
                }
                queue.push_back(y);
            }
        }
    }
    Ok(ArtinSchreierCertificate {
        p,
        r,
        q,
        translations: g.translations.len(),
        translations_ok: g.translations.iter().all(|t| t.preserves(f, q)),
        scalings: g.scalings.len(),
        scalings_ok: g.scalings.iter().all(|t| t.preserves(f, q)),
        inversion_ok: g.inversion.preserves(f, q),
        closure_order: seen.len(),
        expected_closure_order: expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::make_curve;
    use crate::ffield::make_field;

    fn curve(family: Family, p: u32, h: usize, n: u64, m: u64, params: &[i64]) -> CurveSpec {
        let f = make_field(p, h).unwrap();
        let ps: Vec<Elem> = params.iter().map(|&k| f.from_int(k)).collect();
        make_curve(family, &f, n, m, &ps).unwrap()
    }

    #[test]
    fn fermat_cubic_orbits() {
        let c = curve(Family::I, 7, 1, 3, 3, &[1, 1]);
        let r = g_orbits(&c).unwrap();
        assert_eq!(r.l, 1);
        assert_eq!(r.short_sizes(), vec![3, 3, 3]);
        assert_eq!(r.case, FrobeniusCase::T3All);
        let census = r.census.unwrap();
        assert!(census.long_orbit_law && census.short_orbits_match);
        assert_eq!(census.places, census.orbit_size_sum);
        assert!(rhp_holds(&c, 1, &g_orbits(&c).unwrap()));
    }

    #[test]
    fn iib1_orbits() {
        let c = curve(Family::IIb1, 7, 1, 3, 3, &[2, 1, 1]);
        let r = g_orbits(&c).unwrap();
        assert_eq!(r.short_sizes(), vec![3, 3, 3, 3]);
        assert_eq!(
            frobenius_orbit_action(&c, &r).unwrap(),
            FrobeniusCase::T4All
        );
        assert!(rhp_holds(&c, 4, &r));
    }

    #[test]
    fn iib2_two_preserved() {
        let c = curve(Family::IIb2, 7, 1, 4, 3, &[1, 0, 0, 1]);
        let r = g_orbits(&c).unwrap();
        assert_eq!(r.short_sizes(), vec![3, 3, 4, 4]);
        assert_eq!(
            frobenius_orbit_action(&c, &r).unwrap(),
            FrobeniusCase::T4Two
        );
    }

    #[test]
    fn iib3_none_preserved() {
        let c = curve(Family::IIb3, 5, 1, 3, 3, &[0, 1, 1, 0]);
        let r = g_orbits(&c).unwrap();
        assert_eq!(r.short_sizes(), vec![3, 3, 3, 3]);
        assert_eq!(
            frobenius_orbit_action(&c, &r).unwrap(),
            FrobeniusCase::T4None
        );
    }

    #[test]
    fn catalog_examples() {
        let c = curve(Family::IIb1, 7, 1, 3, 3, &[2, 1, 1]);
        let cat = generator_catalog(&c).unwrap();
        let f = &cat.field;
        let mu = cat.get("mu").unwrap();
        let three = f.from_int(3);
        assert_eq!(f.pow(&mu.x.alpha, 3), three);
        assert_eq!(f.pow(&mu.y.alpha, 3), three);
        let g = generated_group(&cat.pick(&["sigma1", "sigma2"]), f, 100).unwrap();
        assert_eq!(g.order(), 9);
        let g = generated_group(&cat.pick(&["sigma1", "sigma2", "mu"]), f, 100).unwrap();
        assert_eq!(g.order(), 18);
        let chk = check_catalog(&c).unwrap();
        assert!(chk.pass(), "{chk:?}");
        assert_eq!(chk.quotient, "C2 x C2");
        assert_eq!(chk.interchange_elements, 0);
    }

    #[test]
    fn catalog_a_one() {
        let c = curve(Family::IIb1, 11, 1, 5, 2, &[1, 1, 1]);
        let chk = check_catalog(&c).unwrap();
        assert!(chk.pass(), "{chk:?}");
        assert_eq!(chk.orders["full"], 40);
        assert_eq!(chk.quotient, "D10");
        let c = curve(Family::IIb1, 11, 1, 5, 2, &[3, 1, 1]);
        let chk = check_catalog(&c).unwrap();
        assert_eq!(chk.quotient, "D5");
        assert!(chk.pass());
        let c = curve(Family::IIb1, 7, 1, 3, 3, &[1, 1, 1]);
        let chk = check_catalog(&c).unwrap();
        assert_eq!(chk.orders["full"], 72);
        assert_eq!(chk.quotient, "D4");
        assert!(chk.pass());
    }

    #[test]
    fn recognition() {
        let f = make_field(11, 1).unwrap();
        let c = curve(Family::IIb1, 11, 1, 5, 2, &[3, 1, 1]);
        let cat = generator_catalog(&c).unwrap();
        let t = generated_group(&cat.pick(&["sigma1", "mu"]), &cat.field, 100).unwrap();
        assert_eq!(recognize_group(&t.table), Structure::Dihedral { k: 5 });
        let klein = MulTable {
            mul: (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect(),
            identity: 0,
        };
        assert_eq!(
            recognize_group(&klein),
            Structure::ElementaryAbelian { p: 2, rank: 2 }
        );
        let z12 = MulTable {
            mul: (0..12)
                .map(|a| (0..12).map(|b| (a + b) % 12).collect())
                .collect(),
            identity: 0,
        };
        assert_eq!(recognize_group(&z12), Structure::Cyclic { order: 12 });
        let z2z6 = MulTable {
            mul: (0..12)
                .map(|a: usize| {
                    (0..12)
                        .map(|b: usize| ((a / 6 + b / 6) % 2) * 6 + (a % 6 + b % 6) % 6)
                        .collect()
                })
                .collect(),
            identity: 0,
        };
        assert_eq!(
            recognize_group(&z2z6),
            Structure::Abelian {
                invariants: vec![2, 6]
            }
        );
        let _ = f;
    }

    #[test]
    fn kontogeorgis() {
        assert!(kontogeorgis_normal(2, 10));
        assert!(!kontogeorgis_normal(3, 6));
    }

    #[test]
    fn artin_schreier() {
        let cert = certify_artin_schreier(3, 1).unwrap();
        assert_eq!(cert.translations, 3);
        assert!(cert.pass(), "{cert:?}");
        assert_eq!(cert.closure_order, 48);
    }
}
