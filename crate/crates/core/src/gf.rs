//! Finite fields GF(p^f) in the polynomial basis.
//!
//! An element is stored as the integer `Σ d_i p^i` of its little-endian
//! coefficient digits. Small fields (q ≤ 2^20) use log/exp/Zech tables;
//! larger ones fall back to digit arithmetic.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest degree accepted by [`Field::new`].
pub const MAX_DEGREE: u32 = 16;

const TABLE_LIMIT: u64 = 1 << 20;
const NO_LOG: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree {0} outside 1..={MAX_DEGREE}")]
    DegreeTooLarge(u32),
    #[error("field of order {0} does not fit the 32-bit element encoding")]
    FieldTooLarge(u128),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("GF({0}) has odd degree and no involution")]
    NoInvolution(u64),
    #[error("{0} is not an element of GF({1})")]
    OutOfRange(u64, u64),
    #[error("cannot parse field spec {0:?}")]
    BadSpec(String),
}

/// Encoded field element `Σ digits[i]·p^i`; meaningful only with its [`Field`].
#[derive(
    Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    log: Vec<u32>,
    /// `exp[i] = g^i` for `0 <= i < 2(q-1)`.
    exp: Vec<u32>,
    /// `zech[i] = log(1 + g^i)`, `NO_LOG` when the sum vanishes. Odd p only.
    zech: Vec<u32>,
}

struct Inner {
    p: u32,
    f: u32,
    q: u32,
    modulus: Vec<u32>,
    pw: Vec<u64>,
    tables: Option<Tables>,
    primitive: Elem,
}

/// Handle to GF(p^f). Cloning is cheap; equal `(p, f)` share one instance.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.f == other.0.f)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.0.p, self.0.f)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.0.p, self.0.f)
    }
}

fn registry() -> &'static Mutex<HashMap<(u32, u32), Field>> {
    static REG: OnceLock<Mutex<HashMap<(u32, u32), Field>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

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

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Polynomials over GF(p) as little-endian coefficient vectors, trimmed.
mod poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn inv_mod(a: u32, p: u32) -> u32 {
        let (mut r, mut b, mut e) = (1u64, a as u64 % p as u64, p as u64 - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p) as u64;
        let p64 = p as u64;
        while r.len() > dm {
            let top = r.len() - 1;
            let c = r[top] as u64 * lead_inv % p64;
            let shift = top - dm;
            for (i, &mi) in m.iter().enumerate() {
                let sub = c * mi as u64 % p64;
                r[shift + i] = ((r[shift + i] as u64 + p64 - sub) % p64) as u32;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let p64 = p as u64;
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p64;
            }
        }
        let mut r: Vec<u32> = out.into_iter().map(|x| x as u32).collect();
        trim(&mut r);
        r
    }

    pub fn mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let mut r: Vec<u32> = (0..n)
            .map(|i| {
                let x = *a.get(i).unwrap_or(&0);
                let y = *b.get(i).unwrap_or(&0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut r);
        r
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    /// x^(p^k) mod m.
    pub fn x_pow_pk(k: u32, m: &[u32], p: u32) -> Vec<u32> {
        let mut cur = rem(&[0, 1], m, p);
        for _ in 0..k {
            // raise to the p-th power
            let mut result = vec![1u32];
            let mut base = cur.clone();
            let mut e = p;
            while e > 0 {
                if e & 1 == 1 {
                    result = mulmod(&result, &base, m, p);
                }
                base = mulmod(&base, &base, m, p);
                e >>= 1;
            }
            cur = result;
        }
        cur
    }

    /// Rabin's test for a monic polynomial of degree f ≥ 1.
    pub fn is_irreducible(m: &[u32], p: u32) -> bool {
        let f = (m.len() - 1) as u32;
        if f == 1 {
            return true;
        }
        let x = vec![0u32, 1];
        if !sub(&x_pow_pk(f, m, p), &rem(&x, m, p), p).is_empty() {
            return false;
        }
        for r in super::prime_factors(f as u64) {
            let h = sub(&x_pow_pk(f / r as u32, m, p), &x, p);
            if gcd(m, &h, p).len() != 1 {
                return false;
            }
        }
        true
    }
}

impl Field {
    /// GF(p^f) with the lexicographically smallest monic irreducible modulus.
    pub fn new(p: u64, f: u32) -> Result<Field, GfError> {
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if f == 0 || f > MAX_DEGREE {
            return Err(GfError::DegreeTooLarge(f));
        }
        let q = (p as u128).pow(f);
        if q > u32::MAX as u128 {
            return Err(GfError::FieldTooLarge(q));
        }
        let key = (p as u32, f);
        if let Some(fld) = registry().lock().unwrap().get(&key) {
            return Ok(fld.clone());
        }
        let fld = Field(Arc::new(Self::build(p as u32, f)));
        let mut reg = registry().lock().unwrap();
        Ok(reg.entry(key).or_insert(fld).clone())
    }

    /// Parses `"p^f"` (or a bare prime `"p"`).
    pub fn parse(s: &str) -> Result<Field, GfError> {
        let bad = || GfError::BadSpec(s.to_string());
        let (p, f) = match s.trim().split_once('^') {
            Some((a, b)) => (
                a.trim().parse::<u64>().map_err(|_| bad())?,
                b.trim().parse::<u32>().map_err(|_| bad())?,
            ),
            None => (s.trim().parse::<u64>().map_err(|_| bad())?, 1),
        };
        Field::new(p, f)
    }

    fn build(p: u32, f: u32) -> Inner {
        let q = p.pow(f);
        let mut pw = vec![1u64; f as usize + 1];
        for i in 1..=f as usize {
            pw[i] = pw[i - 1] * p as u64;
        }
        let mut modulus = Vec::new();
        for code in 0..q as u64 {
            let mut m: Vec<u32> = (0..f as usize)
                .map(|i| ((code / pw[i]) % p as u64) as u32)
                .collect();
            m.push(1);
            if poly::is_irreducible(&m, p) {
                modulus = m;
                break;
            }
        }
        let mut inner = Inner {
            p,
            f,
            q,
            modulus,
            pw,
            tables: None,
            primitive: Elem::ONE,
        };
        let slow = Field(Arc::new(Inner {
            p,
            f,
            q,
            modulus: inner.modulus.clone(),
            pw: inner.pw.clone(),
            tables: None,
            primitive: Elem::ONE,
        }));
        let primitive = slow.find_primitive();
        inner.primitive = primitive;
        if (q as u64) <= TABLE_LIMIT {
            inner.tables = Some(slow.build_tables(primitive));
        }
        inner
    }

    fn find_primitive(&self) -> Elem {
        let q = self.0.q as u64;
        if q == 2 {
            return Elem::ONE;
        }
        let factors = prime_factors(q - 1);
        (1..q as u32)
            .map(Elem)
            .find(|&a| factors.iter().all(|&r| self.pow(a, (q - 1) / r) != Elem::ONE))
            .expect("finite field has a primitive element")
    }

    fn build_tables(&self, g: Elem) -> Tables {
        let q = self.0.q as usize;
        let n = q - 1;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![NO_LOG; q];
        let mut cur = Elem::ONE;
        for i in 0..n {
            exp[i] = cur.0;
            log[cur.0 as usize] = i as u32;
            cur = self.mul(cur, g);
        }
        for i in n..2 * n {
            exp[i] = exp[i - n];
        }
        let mut zech = Vec::new();
        if self.0.p != 2 {
            zech = (0..n)
                .map(|i| {
                    let s = self.add_digits(Elem::ONE, Elem(exp[i]));
                    if s.is_zero() {
                        NO_LOG
                    } else {
                        log[s.0 as usize]
                    }
                })
                .collect();
        }
        Tables { log, exp, zech }
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.f
    }

    pub fn order(&self) -> u32 {
        self.0.q
    }

    /// Modulus coefficients, little-endian, length f+1.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn primitive_element(&self) -> Elem {
        self.0.primitive
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.0.q).map(Elem)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Elem> {
        (1..self.0.q).map(Elem)
    }

    pub fn elem(&self, raw: u64) -> Result<Elem, GfError> {
        if raw < self.0.q as u64 {
            Ok(Elem(raw as u32))
        } else {
            Err(GfError::OutOfRange(raw, self.0.q as u64))
        }
    }

    /// Image of the integer `k` under `Z -> GF(p)`.
    pub fn from_int(&self, k: i64) -> Elem {
        Elem(k.rem_euclid(self.0.p as i64) as u32)
    }

    pub fn digits(&self, a: Elem) -> Vec<u32> {
        let p = self.0.p as u64;
        (0..self.0.f as usize)
            .map(|i| ((a.0 as u64 / self.0.pw[i]) % p) as u32)
            .collect()
    }

    pub fn from_digits(&self, d: &[u32]) -> Result<Elem, GfError> {
        let p = self.0.p;
        let mut code = 0u64;
        for (i, &x) in d.iter().enumerate() {
            if x >= p || i >= self.0.f as usize {
                if x == 0 {
                    continue;
                }
                return Err(GfError::OutOfRange(x as u64, p as u64));
            }
            code += x as u64 * self.0.pw[i];
        }
        Ok(Elem(code as u32))
    }

    fn add_digits(&self, a: Elem, b: Elem) -> Elem {
        let p = self.0.p as u64;
        let (mut x, mut y, mut out) = (a.0 as u64, b.0 as u64, 0u64);
        for i in 0..self.0.f as usize {
            out += ((x % p + y % p) % p) * self.0.pw[i];
            x /= p;
            y /= p;
        }
        Elem(out as u32)
    }

    fn neg_digits(&self, a: Elem) -> Elem {
        let p = self.0.p as u64;
        let (mut x, mut out) = (a.0 as u64, 0u64);
        for i in 0..self.0.f as usize {
            out += ((p - x % p) % p) * self.0.pw[i];
            x /= p;
        }
        Elem(out as u32)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.0.p == 2 {
            return Elem(a.0 ^ b.0);
        }
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        match &self.0.tables {
            Some(t) => {
                let la = t.log[a.0 as usize];
                let lb = t.log[b.0 as usize];
                let n = self.0.q - 1;
                let d = if lb >= la { lb - la } else { lb + n - la };
                let z = t.zech[d as usize];
                if z == NO_LOG {
                    Elem::ZERO
                } else {
                    Elem(t.exp[(la + z) as usize])
                }
            }
            None => self.add_digits(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.0.p == 2 || a.is_zero() {
            return a;
        }
        match &self.0.tables {
            Some(t) => {
                let n = self.0.q - 1;
                Elem(t.exp[(t.log[a.0 as usize] + n / 2) as usize])
            }
            None => self.neg_digits(a),
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.is_zero() || b.is_zero() {
            return Elem::ZERO;
        }
        match &self.0.tables {
            Some(t) => Elem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => {
                let p = self.0.p;
                let r = poly::mulmod(&self.digits(a), &self.digits(b), &self.0.modulus, p);
                self.from_digits(&r).expect("reduced product")
            }
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, GfError> {
        if a.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        Ok(match &self.0.tables {
            Some(t) => {
                let n = self.0.q - 1;
                let l = t.log[a.0 as usize];
                Elem(t.exp[((n - l) % n.max(1)) as usize])
            }
            None => self.pow(a, self.0.q as u64 - 2),
        })
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.is_zero() {
            return Elem::ZERO;
        }
        if let Some(t) = &self.0.tables {
            let n = (self.0.q - 1) as u64;
            let l = t.log[a.0 as usize] as u64;
            return Elem(t.exp[((l * (e % n)) % n) as usize]);
        }
        let (mut r, mut b, mut e) = (Elem::ONE, a, e);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    /// Discrete logarithm to the primitive element, `None` for zero.
    pub fn log(&self, a: Elem) -> Option<u64> {
        if a.is_zero() {
            return None;
        }
        if let Some(t) = &self.0.tables {
            return Some(t.log[a.0 as usize] as u64);
        }
        let g = self.0.primitive;
        let mut cur = Elem::ONE;
        for i in 0..self.0.q as u64 - 1 {
            if cur == a {
                return Some(i);
            }
            cur = self.mul(cur, g);
        }
        None
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: Elem) -> u64 {
        assert!(!a.is_zero(), "zero has no multiplicative order");
        let n = self.0.q as u64 - 1;
        let mut ord = n;
        for r in prime_factors(n) {
            while ord.is_multiple_of(r) && self.pow(a, ord / r) == Elem::ONE {
                ord /= r;
            }
        }
        ord
    }

    /// `a^(p^k)`.
    pub fn frobenius(&self, a: Elem, k: u32) -> Elem {
        let k = k % self.0.f;
        if k == 0 || a.is_zero() {
            return a;
        }
        let n = self.0.q as u64 - 1;
        let e = self.0.pw[k as usize] % n;
        self.pow(a, e)
    }

    pub fn has_involution(&self) -> bool {
        self.0.f.is_multiple_of(2)
    }

    /// θ(x) = x^(p^(f/2)).
    pub fn involution(&self, a: Elem) -> Result<Elem, GfError> {
        if !self.has_involution() {
            return Err(GfError::NoInvolution(self.0.q as u64));
        }
        Ok(self.frobenius(a, self.0.f / 2))
    }

    /// x + θ(x), onto the fixed field of θ.
    pub fn trace_to_half(&self, a: Elem) -> Result<Elem, GfError> {
        Ok(self.add(a, self.involution(a)?))
    }

    /// x·θ(x).
    pub fn norm_to_half(&self, a: Elem) -> Result<Elem, GfError> {
        Ok(self.mul(a, self.involution(a)?))
    }

    /// Absolute trace to GF(p).
    pub fn abs_trace(&self, a: Elem) -> Elem {
        let mut s = Elem::ZERO;
        for k in 0..self.0.f {
            s = self.add(s, self.frobenius(a, k));
        }
        s
    }

    /// Square root in characteristic 2 (the inverse Frobenius).
    pub fn sqrt_char2(&self, a: Elem) -> Elem {
        debug_assert_eq!(self.0.p, 2);
        self.frobenius(a, self.0.f - 1)
    }

    /// Degree over GF(p) of the minimal polynomial of `a`.
    pub fn min_poly_degree(&self, a: Elem) -> u32 {
        (1..=self.0.f)
            .find(|&d| self.0.f.is_multiple_of(d) && self.frobenius(a, d) == a)
            .unwrap_or(self.0.f)
    }

    pub fn in_subfield(&self, a: Elem, d: u32) -> bool {
        self.frobenius(a, d) == a
    }

    /// Smallest d | f with every element of `xs` in GF(p^d).
    pub fn subfield_generated<I: IntoIterator<Item = Elem>>(&self, xs: I) -> u32 {
        let mut d = 1u32;
        for x in xs {
            let m = self.min_poly_degree(x);
            d = lcm(d, m);
            if d == self.0.f {
                break;
            }
        }
        d
    }

    pub fn wrap(&self, value: Elem) -> FieldElement {
        FieldElement {
            field: self.clone(),
            value,
        }
    }
}

pub fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

/// An element bundled with its field, for checked arithmetic.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    value: Elem,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{:?}", self.value.0, self.field)
    }
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn value(&self) -> Elem {
        self.value
    }

    pub fn digits(&self) -> Vec<u32> {
        self.field.digits(self.value)
    }

    fn same(&self, o: &FieldElement) -> Result<(), GfError> {
        if self.field == o.field {
            Ok(())
        } else {
            Err(GfError::FieldMismatch)
        }
    }

    fn lift(&self, v: Elem) -> FieldElement {
        self.field.wrap(v)
    }

    pub fn try_add(&self, o: &FieldElement) -> Result<FieldElement, GfError> {
        self.same(o)?;
        Ok(self.lift(self.field.add(self.value, o.value)))
    }

    pub fn try_sub(&self, o: &FieldElement) -> Result<FieldElement, GfError> {
        self.same(o)?;
        Ok(self.lift(self.field.sub(self.value, o.value)))
    }

    pub fn try_mul(&self, o: &FieldElement) -> Result<FieldElement, GfError> {
        self.same(o)?;
        Ok(self.lift(self.field.mul(self.value, o.value)))
    }

    pub fn inv(&self) -> Result<FieldElement, GfError> {
        Ok(self.lift(self.field.inv(self.value)?))
    }

    pub fn neg(&self) -> FieldElement {
        self.lift(self.field.neg(self.value))
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        self.lift(self.field.pow(self.value, e))
    }

    pub fn involution(&self) -> Result<FieldElement, GfError> {
        Ok(self.lift(self.field.involution(self.value)?))
    }

    pub fn trace_to_half(&self) -> Result<FieldElement, GfError> {
        Ok(self.lift(self.field.trace_to_half(self.value)?))
    }
}
