//! Exact arithmetic in finite fields of odd characteristic.
//!
//! Every field is a tower `F_p ⊂ B ⊂ E` in which `E = B[t]/(g)` for a monic
//! irreducible `g` over the immediate base `B`. Elements are stored in an
//! absolute power basis `F_p[θ]/(M)` for a primitive element `θ`, which keeps
//! multiplication a flat polynomial product modulo `p`. The tower ("relative")
//! coordinates over `B` are recovered by a precomputed change of basis; they
//! drive the canonical enumeration order and the `a + b·i` view of quadratic
//! towers.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{invalid, GfcError, Result};
use crate::poly::Poly;

/// Largest absolute extension degree `[E : F_p]` supported.
pub const MAX_DEGREE: usize = 48;

/// A field element in the absolute power basis of its owning [`Field`].
///
/// Elements carry no reference to their field; every operation goes through
/// the owning `Field`. The derived ordering is an internal total order used
/// for deterministic maps; the canonical enumeration order is
/// [`Field::canonical_cmp`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem([u8; MAX_DEGREE]);

impl Elem {
    pub const ZERO: Elem = Elem([0; MAX_DEGREE]);

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    #[inline]
    pub fn coeff(&self, i: usize) -> u8 {
        self.0[i]
    }

    fn from_coeffs(c: &[u32], p: u32) -> Elem {
        let mut e = Elem::ZERO;
        for (i, &v) in c.iter().enumerate() {
            e.0[i] = (v % p) as u8;
        }
        e
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.0.iter().rposition(|&c| c != 0).unwrap_or(0);
        write!(f, "{:?}", &self.0[..=last])
    }
}

/// Serializable descriptor of a field: characteristic, absolute degree and
/// the tower of relative moduli (each coefficient as its base coordinates).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub h: usize,
    pub modulus: Vec<Vec<u64>>,
    pub base: Option<Box<FieldDescriptor>>,
}

pub struct Field {
    p: u32,
    degree: usize,
    /// Absolute minimal polynomial of the internal generator, monic, low degree first.
    modulus: Vec<u32>,
    order: u128,
    base: Option<Arc<Field>>,
    rel_modulus: Vec<Elem>,
    rel_degree: usize,
    /// Row-major `degree × degree`: tensor coordinates = `to_tensor · internal`.
    to_tensor: Vec<u32>,
    /// Row-major inverse of `to_tensor`.
    from_tensor: Vec<u32>,
    /// Image of the base's k-th internal basis vector.
    embed_cols: Vec<Elem>,
    order_factors: OnceLock<Vec<u128>>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.p, self.degree)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
            || (self.p == other.p
                && self.degree == other.degree
                && self.modulus == other.modulus
                && self.rel_modulus == other.rel_modulus
                && self.base == other.base)
    }
}
impl Eq for Field {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors by trial division.
pub fn prime_factors(mut n: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut d: u128 = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn mod_inv_u32(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// Inverts a square matrix over `F_p` (row-major). `None` when singular.
fn invert_matrix(m: &[u32], n: usize, p: u32) -> Option<Vec<u32>> {
    let w = 2 * n;
    let mut a = vec![0u32; n * w];
    for r in 0..n {
        for c in 0..n {
            a[r * w + c] = m[r * n + c] % p;
        }
        a[r * w + n + r] = 1;
    }
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r * w + col] != 0)?;
        if piv != col {
            for c in 0..w {
                a.swap(piv * w + c, col * w + c);
            }
        }
        let inv = mod_inv_u32(a[col * w + col], p);
        for c in 0..w {
            a[col * w + c] = a[col * w + c] * inv % p;
        }
        for r in 0..n {
            if r != col && a[r * w + col] != 0 {
                let f = a[r * w + col];
                for c in 0..w {
                    a[r * w + c] = (a[r * w + c] + (p - f) * a[col * w + c]) % p;
                }
            }
        }
    }
    let mut out = vec![0u32; n * n];
    for r in 0..n {
        for c in 0..n {
            out[r * n + c] = a[r * w + n + c];
        }
    }
    Some(out)
}

fn mat_vec(m: &[u32], v: &[u32], n: usize, p: u32) -> Vec<u32> {
    (0..n)
        .map(|r| {
            let mut s = 0u64;
            for c in 0..n {
                s += m[r * n + c] as u64 * v[c] as u64;
            }
            (s % p as u64) as u32
        })
        .collect()
}

impl Field {
    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Arc<Field>> {
        if p == 2 || !is_prime(p as u64) {
            return invalid(format!("characteristic must be an odd prime, got {p}"));
        }
        if p > 251 {
            return invalid(format!("characteristic {p} exceeds the supported range"));
        }
        Ok(Arc::new(Field {
            p,
            degree: 1,
            modulus: vec![0, 1],
            order: p as u128,
            base: None,
            rel_modulus: Vec::new(),
            rel_degree: 1,
            to_tensor: vec![1],
            from_tensor: vec![1],
            embed_cols: Vec::new(),
            order_factors: OnceLock::new(),
        }))
    }

    /// `base[t]/(g)` for a monic irreducible `g` over `base` of degree ≥ 2.
    ///
    /// Irreducibility is checked.
    pub fn extension(base: &Arc<Field>, g: &Poly) -> Result<Arc<Field>> {
        let l = g
            .degree()
            .ok_or_else(|| GfcError::InvalidParameter("zero modulus".into()))?;
        if l < 2 {
            return invalid("extension modulus must have degree at least 2");
        }
        if g.lead() != base.one() {
            return invalid("extension modulus must be monic");
        }
        let db = base.degree;
        let d = db * l;
        if d > MAX_DEGREE {
            return Err(GfcError::DeskScaleExceeded(format!(
                "absolute degree {d} exceeds {MAX_DEGREE}"
            )));
        }
        if !g.is_irreducible(base) {
            return invalid("extension modulus is reducible");
        }
        let p = base.p;
        let rel: Vec<Elem> = g.coeffs().to_vec();

        // Tensor arithmetic: vectors of `l` base elements, reduced modulo g.
        let tmul = |a: &[Elem], b: &[Elem]| -> Vec<Elem> {
            let mut acc = vec![Elem::ZERO; 2 * l - 1];
            for i in 0..l {
                if a[i].is_zero() {
                    continue;
                }
                for j in 0..l {
                    acc[i + j] = base.add(&acc[i + j], &base.mul(&a[i], &b[j]));
                }
            }
            for k in (l..2 * l - 1).rev() {
                let c = acc[k];
                if c.is_zero() {
                    continue;
                }
                for j in 0..l {
                    acc[k - l + j] = base.sub(&acc[k - l + j], &base.mul(&c, &rel[j]));
                }
                acc[k] = Elem::ZERO;
            }
            acc.truncate(l);
            acc
        };
        let flatten = |v: &[Elem]| -> Vec<u32> {
            let mut out = Vec::with_capacity(d);
            for e in v {
                for k in 0..db {
                    out.push(e.0[k] as u32);
                }
            }
            out
        };

        let try_theta = |theta: &[Elem]| -> Option<(Vec<u32>, Vec<u32>, Vec<u32>)> {
            let mut powers = Vec::with_capacity(d + 1);
            let mut cur = vec![Elem::ZERO; l];
            cur[0] = base.one();
            for _ in 0..=d {
                powers.push(flatten(&cur));
                cur = tmul(&cur, theta);
            }
            let mut c = vec![0u32; d * d];
            for (k, col) in powers.iter().take(d).enumerate() {
                for r in 0..d {
                    c[r * d + k] = col[r];
                }
            }
            let cinv = invert_matrix(&c, d, p)?;
            let coeffs = mat_vec(&cinv, &powers[d], d, p);
            let mut modulus: Vec<u32> = coeffs.iter().map(|&x| (p - x) % p).collect();
            modulus.push(1);
            Some((c, cinv, modulus))
        };

        // θ = t + b for b in canonical order of the base, then any element.
        let mut found = None;
        let bsize = base.order.min(4096);
        for idx in 0..bsize {
            let mut theta = vec![Elem::ZERO; l];
            theta[0] = base.element_at(idx);
            theta[1] = base.one();
            if let Some(r) = try_theta(&theta) {
                found = Some(r);
                break;
            }
        }
        if found.is_none() {
            let total = base.order.pow(l as u32).min(1 << 20);
            for idx in 1..total {
                let mut theta = vec![Elem::ZERO; l];
                let mut rest = idx;
                for slot in theta.iter_mut().rev() {
                    *slot = base.element_at(rest % base.order);
                    rest /= base.order;
                }
                if let Some(r) = try_theta(&theta) {
                    found = Some(r);
                    break;
                }
            }
        }
        let (to_tensor, from_tensor, modulus) =
            found.ok_or_else(|| GfcError::InvalidParameter("no primitive element found".into()))?;
        let embed_cols = (0..db)
            .map(|k| {
                let mut v = vec![0u32; d];
                v[k] = 1;
                Elem::from_coeffs(&mat_vec(&from_tensor, &v, d, p), p)
            })
            .collect();
        Ok(Arc::new(Field {
            p,
            degree: d,
            modulus,
            order: (p as u128).pow(d as u32),
            base: Some(base.clone()),
            rel_modulus: rel,
            rel_degree: l,
            to_tensor,
            from_tensor,
            embed_cols,
            order_factors: OnceLock::new(),
        }))
    }

    /// Degree-`l` extension of `base` by the least monic irreducible polynomial
    /// in lexicographic order of its low-degree-first coefficient tuple.
    /// Results are cached per (base, l).
    pub fn extend(base: &Arc<Field>, l: usize) -> Result<Arc<Field>> {
        if l == 0 {
            return invalid("extension degree must be at least 1");
        }
        if l == 1 {
            return Ok(base.clone());
        }
        if base.degree * l > MAX_DEGREE {
            return Err(GfcError::DeskScaleExceeded(format!(
                "absolute degree {} exceeds {MAX_DEGREE}",
                base.degree * l
            )));
        }
        type Cache = Mutex<HashMap<(FieldDescriptor, usize), Arc<Field>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let key = (base.descriptor(), l);
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(f) = cache.lock().unwrap().get(&key) {
            return Ok(f.clone());
        }
        let g = Poly::least_irreducible(base, l)?;
        let f = Field::extension(base, &g)?;
        cache.lock().unwrap().insert(key, f.clone());
        Ok(f)
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    /// Absolute degree over `F_p`.
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn order(&self) -> u128 {
        self.order
    }
    pub fn base(&self) -> Option<&Arc<Field>> {
        self.base.as_ref()
    }
    /// Degree over the immediate base (1 for a prime field).
    pub fn rel_degree(&self) -> usize {
        self.rel_degree
    }
    pub fn rel_modulus(&self) -> &[Elem] {
        &self.rel_modulus
    }
    /// Size of the immediate base (`p` for prime fields).
    pub fn base_order(&self) -> u128 {
        self.base.as_ref().map_or(self.p as u128, |b| b.order)
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        match &self.base {
            None => FieldDescriptor {
                p: self.p,
                h: 1,
                modulus: vec![],
                base: None,
            },
            Some(b) => FieldDescriptor {
                p: self.p,
                h: self.degree,
                modulus: self
                    .rel_modulus
                    .iter()
                    .map(|c| b.rel_coords_flat(c))
                    .collect(),
                base: Some(Box::new(b.descriptor())),
            },
        }
    }

    #[inline]
    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }
    #[inline]
    pub fn one(&self) -> Elem {
        let mut e = Elem::ZERO;
        e.0[0] = 1;
        e
    }

    pub fn from_int(&self, v: i64) -> Elem {
        let mut e = Elem::ZERO;
        e.0[0] = v.rem_euclid(self.p as i64) as u8;
        e
    }

    /// The integer value of an element of the prime subfield, if it is one.
    pub fn as_int(&self, a: &Elem) -> Option<u32> {
        if a.0[1..self.degree].iter().all(|&c| c == 0) {
            Some(a.0[0] as u32)
        } else {
            None
        }
    }

    #[inline]
    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        let mut e = Elem::ZERO;
        let p = self.p as u16;
        for i in 0..self.degree {
            let s = a.0[i] as u16 + b.0[i] as u16;
            e.0[i] = if s >= p { s - p } else { s } as u8;
        }
        e
    }

    #[inline]
    pub fn neg(&self, a: &Elem) -> Elem {
        let mut e = Elem::ZERO;
        for i in 0..self.degree {
            if a.0[i] != 0 {
                e.0[i] = (self.p - a.0[i] as u32) as u8;
            }
        }
        e
    }

    #[inline]
    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let d = self.degree;
        let p = self.p;
        if d == 1 {
            let mut e = Elem::ZERO;
            e.0[0] = ((a.0[0] as u32 * b.0[0] as u32) % p) as u8;
            return e;
        }
        let mut acc = [0u32; 2 * MAX_DEGREE];
        for i in 0..d {
            let ai = a.0[i] as u32;
            if ai == 0 {
                continue;
            }
            for j in 0..d {
                acc[i + j] += ai * b.0[j] as u32;
            }
        }
        for k in (d..2 * d - 1).rev() {
            let c = acc[k] % p;
            if c != 0 {
                let nc = p - c;
                for j in 0..d {
                    acc[k - d + j] += nc * self.modulus[j];
                }
            }
            acc[k] = 0;
        }
        Elem::from_coeffs(&acc[..d], p)
    }

    pub fn scale_int(&self, a: &Elem, k: i64) -> Elem {
        self.mul(a, &self.from_int(k))
    }

    pub fn pow(&self, a: &Elem, mut e: u128) -> Elem {
        let mut r = self.one();
        let mut b = *a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }

    pub fn pow_big(&self, a: &Elem, e: &BigUint) -> Elem {
        let mut r = self.one();
        for i in (0..e.bits()).rev() {
            r = self.mul(&r, &r);
            if e.bit(i) {
                r = self.mul(&r, a);
            }
        }
        r
    }

    /// `a^k` for a signed exponent; fails on `0^k` with `k < 0`.
    pub fn pow_signed(&self, a: &Elem, k: i64) -> Result<Elem> {
        if k >= 0 {
            Ok(self.pow(a, k as u128))
        } else {
            Ok(self.pow(&self.inv(a)?, k.unsigned_abs() as u128))
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm on `F_p[θ]`.
    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(GfcError::DivisionByZero);
        }
        let p = self.p;
        let d = self.degree;
        if d == 1 {
            let mut e = Elem::ZERO;
            e.0[0] = mod_inv_u32(a.0[0] as u32, p) as u8;
            return Ok(e);
        }
        // Polynomials mod p, low degree first, trimmed.
        fn trim(v: &mut Vec<u32>) {
            while v.last() == Some(&0) {
                v.pop();
            }
        }
        let mut r0: Vec<u32> = self.modulus.clone();
        let mut r1: Vec<u32> = a.0[..d].iter().map(|&c| c as u32).collect();
        trim(&mut r1);
        let mut s0: Vec<u32> = vec![];
        let mut s1: Vec<u32> = vec![1];
        while !r1.is_empty() {
            // q, r = divmod(r0, r1)
            let mut rem = r0.clone();
            let dl = r1.len() - 1;
            let lead_inv = mod_inv_u32(*r1.last().unwrap(), p);
            let mut q = vec![0u32; rem.len().saturating_sub(dl).max(1)];
            while rem.len() > dl {
                let k = rem.len() - 1 - dl;
                let c = rem.last().unwrap() * lead_inv % p;
                q[k] = c;
                for j in 0..=dl {
                    let idx = k + j;
                    rem[idx] = (rem[idx] + (p - c) * r1[j]) % p;
                }
                trim(&mut rem);
                if rem.len() <= dl {
                    break;
                }
            }
            trim(&mut rem);
            // s2 = s0 - q*s1
            let mut s2 = vec![0u32; (q.len() + s1.len()).max(s0.len())];
            for (i, &c) in s0.iter().enumerate() {
                s2[i] = c;
            }
            for (i, &qi) in q.iter().enumerate() {
                if qi == 0 {
                    continue;
                }
                for (j, &sj) in s1.iter().enumerate() {
                    s2[i + j] = (s2[i + j] + (p - qi * sj % p)) % p;
                }
            }
            trim(&mut s2);
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a nonzero constant
        let c = mod_inv_u32(r0[0], p);
        let out: Vec<u32> = s0.iter().map(|&x| x * c % p).collect();
        Ok(Elem::from_coeffs(&out, p))
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Embeds an element of the immediate base.
    pub fn embed(&self, b: &Elem) -> Elem {
        match &self.base {
            None => *b,
            Some(base) => {
                let mut acc = [0u32; MAX_DEGREE];
                for k in 0..base.degree {
                    let c = b.0[k] as u32;
                    if c == 0 {
                        continue;
                    }
                    let col = &self.embed_cols[k];
                    for r in 0..self.degree {
                        acc[r] += c * col.0[r] as u32;
                    }
                }
                Elem::from_coeffs(&acc[..self.degree], self.p)
            }
        }
    }

    /// Embeds an element of any subfield appearing in this field's tower.
    pub fn embed_from(&self, sub: &Field, a: &Elem) -> Result<Elem> {
        if sub == self {
            return Ok(*a);
        }
        match &self.base {
            Some(b) => {
                let inner = b.embed_from(sub, a)?;
                Ok(self.embed(&inner))
            }
            None => Err(GfcError::FieldMismatch),
        }
    }

    /// Whether `sub` occurs in this field's tower (including itself).
    pub fn contains_subfield(&self, sub: &Field) -> bool {
        sub == self || self.base.as_ref().is_some_and(|b| b.contains_subfield(sub))
    }

    /// Coordinates over the immediate base (`rel_degree` base elements).
    pub fn rel_coords(&self, a: &Elem) -> Vec<Elem> {
        match &self.base {
            None => vec![*a],
            Some(base) => {
                let v: Vec<u32> = a.0[..self.degree].iter().map(|&c| c as u32).collect();
                let t = mat_vec(&self.to_tensor, &v, self.degree, self.p);
                t.chunks(base.degree)
                    .map(|c| Elem::from_coeffs(c, self.p))
                    .collect()
            }
        }
    }

    pub fn from_rel_coords(&self, coords: &[Elem]) -> Elem {
        match &self.base {
            None => coords[0],
            Some(base) => {
                let mut t = vec![0u32; self.degree];
                for (j, c) in coords.iter().enumerate().take(self.rel_degree) {
                    for k in 0..base.degree {
                        t[j * base.degree + k] = c.0[k] as u32;
                    }
                }
                Elem::from_coeffs(&mat_vec(&self.from_tensor, &t, self.degree, self.p), self.p)
            }
        }
    }

    /// Fully flattened tower coordinates as integers (for reports).
    pub fn rel_coords_flat(&self, a: &Elem) -> Vec<u64> {
        match &self.base {
            None => vec![a.0[0] as u64],
            Some(base) => self
                .rel_coords(a)
                .iter()
                .flat_map(|c| base.rel_coords_flat(c))
                .collect(),
        }
    }

    /// Position of `a` in the canonical coordinate-lex enumeration.
    pub fn canonical_index(&self, a: &Elem) -> u128 {
        match &self.base {
            None => a.0[0] as u128,
            Some(base) => self
                .rel_coords(a)
                .iter()
                .fold(0u128, |acc, c| acc * base.order + base.canonical_index(c)),
        }
    }

    /// Inverse of [`Field::canonical_index`].
    pub fn element_at(&self, idx: u128) -> Elem {
        match &self.base {
            None => {
                let mut e = Elem::ZERO;
                e.0[0] = (idx % self.p as u128) as u8;
                e
            }
            Some(base) => {
                let mut coords = vec![Elem::ZERO; self.rel_degree];
                let mut rest = idx;
                for slot in coords.iter_mut().rev() {
                    *slot = base.element_at(rest % base.order);
                    rest /= base.order;
                }
                self.from_rel_coords(&coords)
            }
        }
    }

    pub fn canonical_cmp(&self, a: &Elem, b: &Elem) -> Ordering {
        self.canonical_index(a).cmp(&self.canonical_index(b))
    }

    /// All elements in canonical order. Only sensible for small fields.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order).map(move |i| self.element_at(i))
    }

    /// `a^{|B|^e}` where `B` is the immediate base (`F_p` for a prime field,
    /// where the map is the identity).
    pub fn frobenius(&self, a: &Elem, e: u32) -> Elem {
        let q = self.base_order();
        let mut r = *a;
        for _ in 0..e {
            r = self.pow(&r, q);
        }
        r
    }

    /// `a^{Q^e}` for an explicit `Q`.
    pub fn frobenius_by(&self, a: &Elem, q: u128, e: u32) -> Elem {
        let mut r = *a;
        for _ in 0..e {
            r = self.pow(&r, q);
        }
        r
    }

    fn order_factors(&self) -> &[u128] {
        self.order_factors
            .get_or_init(|| prime_factors(self.order - 1))
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: &Elem) -> Result<u128> {
        if a.is_zero() {
            return Err(GfcError::DivisionByZero);
        }
        let mut ord = self.order - 1;
        for &r in self.order_factors() {
            while ord.is_multiple_of(r) && self.pow(a, ord / r) == self.one() {
                ord /= r;
            }
        }
        Ok(ord)
    }

    pub fn is_square(&self, a: &Elem) -> bool {
        a.is_zero() || self.pow(a, (self.order - 1) / 2) == self.one()
    }

    /// Least generator of the multiplicative group in canonical order.
    pub fn primitive_root(&self) -> Elem {
        let n = self.order - 1;
        let fs = self.order_factors().to_vec();
        for idx in 1..self.order {
            let g = self.element_at(idx);
            if fs.iter().all(|&r| self.pow(&g, n / r) != self.one()) {
                return g;
            }
        }
        unreachable!("finite field without a primitive root")
    }

    /// Whether `a` lies in the subfield of size `q` (i.e. `a^q = a`).
    pub fn in_subfield(&self, a: &Elem, q: u128) -> bool {
        self.pow(a, q) == *a
    }

    /// All `k`-th roots of `c` in this field, sorted canonically.
    pub fn nth_roots(&self, c: &Elem, k: u64) -> Vec<Elem> {
        if c.is_zero() {
            return vec![Elem::ZERO];
        }
        if k == 1 {
            return vec![*c];
        }
        let mut coeffs = vec![Elem::ZERO; k as usize + 1];
        coeffs[0] = self.neg(c);
        coeffs[k as usize] = self.one();
        Poly::from_coeffs(coeffs).roots(self)
    }

    pub fn is_nth_power(&self, c: &Elem, k: u64) -> bool {
        if c.is_zero() {
            return true;
        }
        let g = gcd_u128(k as u128, self.order - 1);
        self.pow(c, (self.order - 1) / g) == self.one()
    }
}

pub fn gcd_u128(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd_u128(b, a % b)
    }
}

/// `F_{p^h}` with the lexicographically least monic irreducible modulus.
pub fn make_field(p: u32, h: usize) -> Result<Arc<Field>> {
    if h < 1 {
        return invalid("extension degree must be at least 1");
    }
    let fp = Field::prime(p)?;
    Field::extend(&fp, h)
}

/// First nonsquare in canonical order.
pub fn find_nonsquare(f: &Field) -> Elem {
    let minus_one = f.neg(&f.one());
    let e = (f.order() - 1) / 2;
    for idx in 1..f.order() {
        let a = f.element_at(idx);
        if f.pow(&a, e) == minus_one {
            return a;
        }
    }
    unreachable!("odd-order field without a nonsquare")
}

/// `g^{(|F|-1)/n}` for the least primitive root `g`.
pub fn root_of_unity(f: &Field, n: u64) -> Result<Elem> {
    if n == 0 {
        return invalid("root of unity order must be positive");
    }
    let m = f.order() - 1;
    if !m.is_multiple_of(n as u128) {
        return Err(GfcError::NoSuchRoot {
            order: n,
            field_size: f.order(),
        });
    }
    let g = f.primitive_root();
    Ok(f.pow(&g, m / n as u128))
}

/// The quadratic tower `F_{q^2} = F_q(i)` with `i^2 = s`, `s` the least nonsquare.
#[derive(Debug, Clone)]
pub struct Tower {
    pub base: Arc<Field>,
    pub s: Elem,
    pub top: Arc<Field>,
    pub i: Elem,
}

impl Tower {
    pub fn new(base: &Arc<Field>) -> Result<Tower> {
        let s = find_nonsquare(base);
        Tower::with_nonsquare(base, s)
    }

    pub fn with_nonsquare(base: &Arc<Field>, s: Elem) -> Result<Tower> {
        let minus_one = base.neg(&base.one());
        if base.pow(&s, (base.order() - 1) / 2) != minus_one {
            return invalid("tower parameter is not a nonsquare");
        }
        let g = Poly::from_coeffs(vec![base.neg(&s), Elem::ZERO, base.one()]);
        let top = Field::extension(base, &g)?;
        let i = top.from_rel_coords(&[Elem::ZERO, base.one()]);
        Ok(Tower {
            base: base.clone(),
            s,
            top,
            i,
        })
    }

    /// `q = |F_q|`.
    pub fn q(&self) -> u128 {
        self.base.order()
    }

    /// `a + b·i` from base coordinates.
    pub fn make(&self, a: &Elem, b: &Elem) -> Elem {
        self.top.from_rel_coords(&[*a, *b])
    }

    /// `(a, b)` with `x = a + b·i`.
    pub fn split(&self, x: &Elem) -> (Elem, Elem) {
        let c = self.top.rel_coords(x);
        (c[0], c[1])
    }

    /// `a + b·i ↦ a - b·i`.
    pub fn conj(&self, x: &Elem) -> Elem {
        let (a, b) = self.split(x);
        self.make(&a, &self.base.neg(&b))
    }

    pub fn frobenius(&self, x: &Elem, e: u32) -> Elem {
        self.top.frobenius(x, e)
    }

    pub fn embed(&self, a: &Elem) -> Elem {
        self.top.embed(a)
    }

    /// Back to the base when the `i`-coordinate vanishes.
    pub fn restrict(&self, x: &Elem) -> Option<Elem> {
        let (a, b) = self.split(x);
        b.is_zero().then_some(a)
    }
}

/// An element bundled with its field, for checked mixed-field arithmetic.
#[derive(Debug, Clone)]
pub struct FieldElement {
    pub field: Arc<Field>,
    pub value: Elem,
}

pub enum FieldOp {
    Add,
    Mul,
    Inv,
    Pow(u128),
}

impl FieldElement {
    pub fn new(field: &Arc<Field>, value: Elem) -> Self {
        FieldElement {
            field: field.clone(),
            value,
        }
    }

    pub fn from_int(field: &Arc<Field>, v: i64) -> Self {
        FieldElement {
            field: field.clone(),
            value: field.from_int(v),
        }
    }

    /// Checked arithmetic; `other` is ignored by the unary operations.
    pub fn apply(&self, other: &FieldElement, op: FieldOp) -> Result<FieldElement> {
        if !Arc::ptr_eq(&self.field, &other.field) && *self.field != *other.field {
            return Err(GfcError::FieldMismatch);
        }
        let f = &self.field;
        let value = match op {
            FieldOp::Add => f.add(&self.value, &other.value),
            FieldOp::Mul => f.mul(&self.value, &other.value),
            FieldOp::Inv => f.inv(&self.value)?,
            FieldOp::Pow(k) => f.pow(&self.value, k),
        };
        Ok(FieldElement {
            field: f.clone(),
            value,
        })
    }

    pub fn coords(&self) -> Vec<u64> {
        self.field.rel_coords_flat(&self.value)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.value == other.value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f = make_field(7, 1).unwrap();
        let (a, b) = (f.from_int(3), f.from_int(5));
        assert_eq!(f.add(&a, &b), f.from_int(1));
        assert_eq!(f.mul(&a, &b), f.from_int(1));
        assert_eq!(f.inv(&a).unwrap(), f.from_int(5));
        assert_eq!(f.pow(&a, 6), f.one());
        assert_eq!(f.inv(&Elem::ZERO), Err(GfcError::DivisionByZero));
    }

    #[test]
    fn f9_modulus_is_t2_plus_1() {
        let f = make_field(3, 2).unwrap();
        assert_eq!(f.descriptor().modulus, vec![vec![1], vec![0], vec![1]]);
        let t = f.from_rel_coords(&[Elem::ZERO, f.base().unwrap().one()]);
        assert_eq!(f.mul(&t, &t), f.from_int(2));
        // t^3 = 2t
        assert_eq!(f.frobenius(&t, 1), f.scale_int(&t, 2));
        assert_eq!(f.frobenius(&t, 0), t);
    }

    #[test]
    fn rejects_bad_characteristic() {
        assert!(matches!(
            make_field(2, 1),
            Err(GfcError::InvalidParameter(_))
        ));
        assert!(matches!(
            make_field(9, 1),
            Err(GfcError::InvalidParameter(_))
        ));
        assert!(matches!(
            make_field(7, 0),
            Err(GfcError::InvalidParameter(_))
        ));
    }

    #[test]
    fn nonsquares_and_roots_of_unity() {
        let f7 = make_field(7, 1).unwrap();
        let f5 = make_field(5, 1).unwrap();
        assert_eq!(find_nonsquare(&f7), f7.from_int(3));
        assert_eq!(find_nonsquare(&f5), f5.from_int(2));
        assert_eq!(root_of_unity(&f7, 3).unwrap(), f7.from_int(2));
        assert_eq!(root_of_unity(&f7, 6).unwrap(), f7.from_int(3));
        assert!(matches!(
            root_of_unity(&f7, 4),
            Err(GfcError::NoSuchRoot { .. })
        ));
    }

    #[test]
    fn f9_nonsquare_matches_enumeration() {
        let f = make_field(3, 2).unwrap();
        let squares: Vec<Elem> = f.elements().skip(1).map(|a| f.mul(&a, &a)).collect();
        let expected = f.elements().skip(1).find(|a| !squares.contains(a)).unwrap();
        assert_eq!(find_nonsquare(&f), expected);
    }

    #[test]
    fn tower_conjugation_is_frobenius() {
        let f7 = make_field(7, 1).unwrap();
        let t = Tower::new(&f7).unwrap();
        assert_eq!(t.s, f7.from_int(3));
        assert_eq!(t.top.mul(&t.i, &t.i), t.embed(&t.s));
        let x = t.make(&f7.from_int(2), &f7.from_int(5));
        assert_eq!(t.frobenius(&x, 1), t.make(&f7.from_int(2), &f7.from_int(2)));
        for x in t.top.elements() {
            assert_eq!(t.frobenius(&x, 1), t.conj(&x));
        }
    }

    #[test]
    fn nested_tower_over_f9() {
        let f9 = make_field(3, 2).unwrap();
        let t = Tower::new(&f9).unwrap();
        assert_eq!(t.top.order(), 81);
        for x in t.top.elements() {
            assert_eq!(t.frobenius(&x, 1), t.conj(&x));
            assert_eq!(t.top.pow(&x, 81), x);
        }
        for a in f9.elements() {
            let e = t.embed(&a);
            assert_eq!(t.restrict(&e), Some(a));
            assert_eq!(t.top.frobenius_by(&e, 9, 1), e);
        }
    }

    #[test]
    fn canonical_index_roundtrip() {
        let f = make_field(5, 2).unwrap();
        for i in 0..f.order() {
            assert_eq!(f.canonical_index(&f.element_at(i)), i);
        }
    }
}
