//! Exact arithmetic in small finite fields `F_{p^m}`.
//!
//! Elements are encoded as integers `c0 + c1*p + ... + c_{m-1}*p^{m-1}` where
//! `c_i` are the coefficients of the polynomial representative modulo the
//! field's modulus. Prime-field elements are therefore plain residues. For
//! `q <= 2^16` the field also carries discrete-log tables; the coefficient
//! encoding stays the canonical equality witness.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 20;
const LOG_TABLE_LIMIT: u32 = 1 << 16;
const OP_TABLE_LIMIT: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{m} exceeds the 2^20 bound")]
    TooLarge { p: u64, m: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields: {0} and {1}")]
    Mismatch(String, String),
    #[error("unsupported query: {0}")]
    Unsupported(String),
    #[error("cannot parse field element {0:?}")]
    Parse(String),
}

/// An immutable description of `F_{p^m}` together with its lookup tables.
pub struct FieldSpec {
    p: u32,
    m: u32,
    q: u32,
    /// Monic modulus, coefficients from degree 0 upwards (length `m + 1`).
    modulus: Vec<u32>,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    add_table: Vec<u32>,
    mul_table: Vec<u32>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)?;
        if self.m > 1 {
            write!(f, "[{}]", self.modulus_string())?;
        }
        Ok(())
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors of `n`.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
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

// Dense polynomials over F_p, lowest coefficient first, no trailing zeros.
fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p);
    while r.len() > db {
        let dr = r.len() - 1;
        let c = (r[dr] as u64 * lead_inv as u64 % p as u64) as u32;
        let shift = dr - db;
        for (i, &bi) in b.iter().enumerate() {
            let sub = (c as u64 * bi as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

fn digits(mut v: u32, p: u32, m: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(m as usize);
    for _ in 0..m {
        out.push(v % p);
        v /= p;
    }
    out
}

fn undigits(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let m = f.len() - 1;
    for d in 1..=m / 2 {
        let count = (p as u64).pow(d as u32);
        for t in 0..count {
            let mut g = digits(t as u32, p, d as u32);
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

static FIELD_CACHE: OnceLock<Mutex<HashMap<(u32, u32), Arc<FieldSpec>>>> = OnceLock::new();

/// Construct (or fetch from the process-wide cache) the field `F_{p^m}`.
///
/// The modulus is the least monic irreducible polynomial of degree `m`, with
/// coefficients compared from degree `m - 1` down to degree 0. The designated
/// generator is the least element (in the integer encoding) of order `q - 1`.
pub fn make_field(p: u64, m: u32) -> Result<Arc<FieldSpec>, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if m == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let q = (p as u128).checked_pow(m).unwrap_or(u128::MAX);
    if q > MAX_ORDER as u128 {
        return Err(FieldError::TooLarge { p, m });
    }
    let cache = FIELD_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (p as u32, m);
    if let Some(f) = cache.lock().unwrap().get(&key) {
        return Ok(f.clone());
    }
    let f = Arc::new(FieldSpec::build(p as u32, m));
    cache.lock().unwrap().entry(key).or_insert(f.clone());
    Ok(f)
}

/// Field of order `q` (a prime power).
pub fn field_of_order(q: u64) -> Result<Arc<FieldSpec>, FieldError> {
    let pf = prime_factors(q);
    if pf.len() != 1 {
        return Err(FieldError::NotPrime(q));
    }
    let p = pf[0];
    let mut m = 0;
    let mut t = q;
    while t > 1 {
        t /= p;
        m += 1;
    }
    make_field(p, m)
}

impl FieldSpec {
    fn build(p: u32, m: u32) -> FieldSpec {
        let q = p.pow(m);
        let modulus = (0..q)
            .map(|t| {
                let mut f = digits(t, p, m);
                f.push(1);
                f
            })
            .find(|f| is_irreducible(f, p))
            .expect("an irreducible polynomial exists in every degree");
        let mut spec = FieldSpec {
            p,
            m,
            q,
            modulus,
            generator: 1,
            exp: Vec::new(),
            log: Vec::new(),
            add_table: Vec::new(),
            mul_table: Vec::new(),
        };
        let order = (q - 1) as u64;
        let factors = prime_factors(order);
        spec.generator = (1..q)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&l| spec.pow_slow(g, order / l) != 1)
            })
            .expect("the multiplicative group is cyclic");
        if q <= LOG_TABLE_LIMIT {
            let n = (q - 1) as usize;
            let mut exp = vec![0u32; 2 * n.max(1)];
            let mut log = vec![0u32; q as usize];
            let mut x = 1u32;
            for k in 0..n {
                exp[k] = x;
                log[x as usize] = k as u32;
                x = spec.mul_poly(x, spec.generator);
            }
            for k in n..2 * n {
                exp[k] = exp[k - n];
            }
            if n == 0 {
                exp[0] = 1;
            }
            spec.exp = exp;
            spec.log = log;
        }
        if q <= OP_TABLE_LIMIT {
            let qs = q as usize;
            let mut add_t = vec![0u32; qs * qs];
            let mut mul_t = vec![0u32; qs * qs];
            for a in 0..q {
                for b in 0..q {
                    add_t[a as usize * qs + b as usize] = spec.add_digits(a, b);
                    mul_t[a as usize * qs + b as usize] = spec.mul_logs(a, b);
                }
            }
            spec.add_table = add_t;
            spec.mul_table = mul_t;
        }
        spec
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients from degree 0 upwards, including the leading 1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> u32 {
        self.generator
    }

    pub fn has_log_tables(&self) -> bool {
        !self.log.is_empty()
    }

    pub fn modulus_string(&self) -> String {
        let mut terms = Vec::new();
        for (i, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coeff = if c == 1 && i > 0 { String::new() } else { c.to_string() };
            let term = match i {
                0 => coeff,
                1 => format!("{coeff}x"),
                _ => format!("{coeff}x^{i}"),
            };
            terms.push(term);
        }
        terms.join("+")
    }

    fn add_digits(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.m {
            let d = (a % self.p + b % self.p) % self.p;
            out += d * place;
            place *= self.p;
            a /= self.p;
            b /= self.p;
        }
        out
    }

    fn mul_poly(&self, a: u32, b: u32) -> u32 {
        if self.m == 1 {
            return (a as u64 * b as u64 % self.p as u64) as u32;
        }
        let da = digits(a, self.p, self.m);
        let db = digits(b, self.p, self.m);
        let mut prod = vec![0u32; 2 * self.m as usize];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % self.p as u64) as u32;
            }
        }
        let mut r = poly_rem(&prod, &self.modulus, self.p);
        r.resize(self.m as usize, 0);
        undigits(&r, self.p)
    }

    fn mul_logs(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.log.is_empty() {
            return self.mul_poly(a, b);
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    fn pow_slow(&self, a: u32, mut e: u64) -> u32 {
        let mut result = 1;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul_poly(result, base);
            }
            base = self.mul_poly(base, base);
            e >>= 1;
        }
        result
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            a ^ b
        } else if !self.add_table.is_empty() {
            self.add_table[(a * self.q + b) as usize]
        } else {
            self.add_digits(a, b)
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if !self.mul_table.is_empty() {
            self.mul_table[(a * self.q + b) as usize]
        } else {
            self.mul_logs(a, b)
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let mut out = 0;
        let mut place = 1;
        let mut a = a;
        for _ in 0..self.m {
            let d = a % self.p;
            out += ((self.p - d) % self.p) * place;
            place *= self.p;
            a /= self.p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        if !self.log.is_empty() {
            let n = self.q - 1;
            return Some(self.exp[((n - self.log[a as usize]) % n) as usize]);
        }
        Some(self.pow_slow(a, (self.q - 2) as u64))
    }

    pub fn div(&self, a: u32, b: u32) -> Option<u32> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// `a^e` for any integer exponent; `None` for a negative power of zero.
    pub fn pow(&self, a: u32, e: i64) -> Option<u32> {
        if a == 0 {
            return match e.cmp(&0) {
                std::cmp::Ordering::Less => None,
                std::cmp::Ordering::Equal => Some(1),
                std::cmp::Ordering::Greater => Some(0),
            };
        }
        let n = (self.q - 1) as i64;
        let e = e.rem_euclid(n) as u64;
        if !self.log.is_empty() {
            let k = (self.log[a as usize] as u64 * e) % n as u64;
            return Some(self.exp[k as usize]);
        }
        Some(self.pow_slow(a, e))
    }

    /// `g^k` for the designated generator.
    pub fn exp_gen(&self, k: i64) -> u32 {
        self.pow(self.generator, k).expect("generator is nonzero")
    }

    /// Discrete logarithm to the designated generator.
    pub fn log_gen(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        if !self.log.is_empty() {
            return Some(self.log[a as usize]);
        }
        let n = self.q - 1;
        let step = (n as f64).sqrt().ceil() as u32;
        let mut baby = HashMap::new();
        let mut x = 1;
        for j in 0..step {
            baby.entry(x).or_insert(j);
            x = self.mul(x, self.generator);
        }
        let giant = self.pow(self.generator, -(step as i64)).unwrap();
        let mut y = a;
        for i in 0..=step {
            if let Some(&j) = baby.get(&y) {
                return Some((i * step + j) % n);
            }
            y = self.mul(y, giant);
        }
        None
    }

    /// Prime-field image of an integer.
    pub fn from_int(&self, k: i64) -> u32 {
        k.rem_euclid(self.p as i64) as u32
    }

    /// `a^{p^r}`; `r` is taken modulo `m`.
    pub fn frobenius(&self, a: u32, r: u32) -> u32 {
        let mut x = a;
        for _ in 0..(r % self.m) {
            x = self.pow(x, self.p as i64).unwrap();
        }
        x
    }

    pub fn is_square(&self, a: u32) -> bool {
        if a == 0 || self.p == 2 {
            return true;
        }
        self.pow(a, ((self.q - 1) / 2) as i64) == Some(1)
    }

    /// An element `xi` of `F_{q^2} \ F_q` with `xi^{q-1} = -1`, where this
    /// field is `F_{q^2}` with `q` odd.
    pub fn norm_minus_one(&self) -> Result<u32, FieldError> {
        if self.p == 2 {
            return Err(FieldError::Unsupported(
                "norm_minus_one needs odd characteristic".into(),
            ));
        }
        if self.m % 2 != 0 {
            return Err(FieldError::Unsupported(
                "norm_minus_one needs a quadratic extension F_{q^2}".into(),
            ));
        }
        let q = (self.p as i64).pow(self.m / 2);
        Ok(self.exp_gen((q + 1) / 2))
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: u32) -> Option<u64> {
        if a == 0 {
            return None;
        }
        let n = (self.q - 1) as u64;
        let mut ord = n;
        for l in prime_factors(n) {
            while ord % l == 0 && self.pow(a, (ord / l) as i64) == Some(1) {
                ord /= l;
            }
        }
        Some(ord)
    }

    /// True when `a` lies in the subfield `F_{p^d}` (`d` must divide `m`).
    pub fn in_subfield(&self, a: u32, d: u32) -> bool {
        self.frobenius(a, d) == a
    }

    pub fn coefficients(&self, a: u32) -> Vec<u32> {
        digits(a, self.p, self.m)
    }

    pub fn from_coefficients(&self, c: &[u32]) -> Result<u32, FieldError> {
        if c.len() > self.m as usize || c.iter().any(|&d| d >= self.p) {
            return Err(FieldError::Parse(format!("{c:?}")));
        }
        Ok(undigits(c, self.p))
    }

    /// Report format: integers for prime fields, `[c0,c1,...]` otherwise.
    pub fn format(&self, a: u32) -> String {
        if self.m == 1 {
            return a.to_string();
        }
        let c = self.coefficients(a);
        let body: Vec<String> = c.iter().map(|d| d.to_string()).collect();
        format!("[{}]", body.join(","))
    }

    /// Discrete-log report format `g^k` (with `0` for zero).
    pub fn format_log(&self, a: u32) -> String {
        match self.log_gen(a) {
            None => "0".into(),
            Some(k) => format!("g^{k}"),
        }
    }

    /// Parse any of the report formats.
    pub fn parse(&self, s: &str) -> Result<u32, FieldError> {
        let s = s.trim();
        let err = || FieldError::Parse(s.to_string());
        if let Some(k) = s.strip_prefix("g^") {
            let k: i64 = k.parse().map_err(|_| err())?;
            return Ok(self.exp_gen(k));
        }
        if let Some(body) = s.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
            let c: Result<Vec<u32>, _> = body
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse::<u32>())
                .collect();
            return self.from_coefficients(&c.map_err(|_| err())?);
        }
        let k: i64 = s.parse().map_err(|_| err())?;
        if self.m == 1 {
            Ok(self.from_int(k))
        } else if k == 0 || k == 1 {
            Ok(k as u32)
        } else {
            Err(err())
        }
    }

    /// Header naming the field in reports.
    pub fn header(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.p,
            "m": self.m,
            "modulus": self.modulus,
        })
    }
}

/// A field element bound to its field; binary operations check that both
/// operands share the same field.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<FieldSpec>,
    v: u32,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format(self.v))
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.v == other.v && same_field(&self.field, &other.field)
    }
}

impl Eq for FieldElement {}

pub fn same_field(a: &Arc<FieldSpec>, b: &Arc<FieldSpec>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Inv,
    Pow,
}

/// Second operand of [`arith`]: another element, or an integer (exponent for
/// `Pow`, prime-field scalar otherwise). Unary operations ignore it.
#[derive(Debug, Clone)]
pub enum Operand {
    Elem(FieldElement),
    Int(i64),
    None,
}

impl FieldElement {
    pub fn new(field: &Arc<FieldSpec>, v: u32) -> Result<Self, FieldError> {
        if v >= field.q {
            return Err(FieldError::Parse(v.to_string()));
        }
        Ok(FieldElement { field: field.clone(), v })
    }

    pub fn zero(field: &Arc<FieldSpec>) -> Self {
        FieldElement { field: field.clone(), v: 0 }
    }

    pub fn one(field: &Arc<FieldSpec>) -> Self {
        FieldElement { field: field.clone(), v: 1 }
    }

    pub fn generator(field: &Arc<FieldSpec>) -> Self {
        FieldElement { field: field.clone(), v: field.generator }
    }

    pub fn value(&self) -> u32 {
        self.v
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.v == 0
    }

    fn check(&self, other: &FieldElement) -> Result<(), FieldError> {
        if same_field(&self.field, &other.field) {
            Ok(())
        } else {
            Err(FieldError::Mismatch(
                format!("{:?}", self.field),
                format!("{:?}", other.field),
            ))
        }
    }

    fn wrap(&self, v: u32) -> FieldElement {
        FieldElement { field: self.field.clone(), v }
    }

    pub fn add(&self, o: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(o)?;
        Ok(self.wrap(self.field.add(self.v, o.v)))
    }

    pub fn sub(&self, o: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(o)?;
        Ok(self.wrap(self.field.sub(self.v, o.v)))
    }

    pub fn mul(&self, o: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(o)?;
        Ok(self.wrap(self.field.mul(self.v, o.v)))
    }

    pub fn div(&self, o: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(o)?;
        self.field
            .div(self.v, o.v)
            .map(|v| self.wrap(v))
            .ok_or(FieldError::DivisionByZero)
    }

    pub fn neg(&self) -> FieldElement {
        self.wrap(self.field.neg(self.v))
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        self.field
            .inv(self.v)
            .map(|v| self.wrap(v))
            .ok_or(FieldError::DivisionByZero)
    }

    pub fn pow(&self, e: i64) -> Result<FieldElement, FieldError> {
        self.field
            .pow(self.v, e)
            .map(|v| self.wrap(v))
            .ok_or(FieldError::DivisionByZero)
    }

    pub fn frobenius(&self, r: u32) -> FieldElement {
        self.wrap(self.field.frobenius(self.v, r))
    }

    pub fn is_square(&self) -> bool {
        self.field.is_square(self.v)
    }
}

/// Single entry point for field arithmetic.
pub fn arith(op: ArithOp, a: &FieldElement, b: Operand) -> Result<FieldElement, FieldError> {
    let other = |b: Operand| -> Result<FieldElement, FieldError> {
        match b {
            Operand::Elem(e) => Ok(e),
            Operand::Int(k) => Ok(a.wrap(a.field.from_int(k))),
            Operand::None => Err(FieldError::Unsupported("missing second operand".into())),
        }
    };
    match op {
        ArithOp::Add => a.add(&other(b)?),
        ArithOp::Sub => a.sub(&other(b)?),
        ArithOp::Mul => a.mul(&other(b)?),
        ArithOp::Div => a.div(&other(b)?),
        ArithOp::Neg => Ok(a.neg()),
        ArithOp::Inv => a.inv(),
        ArithOp::Pow => match b {
            Operand::Int(k) => a.pow(k),
            _ => Err(FieldError::Unsupported("pow needs an integer exponent".into())),
        },
    }
}

/// Queries about the multiplicative structure.
#[derive(Debug, Clone)]
pub enum MultQuery {
    IsSquare(FieldElement),
    Generator,
    NormMinusOne,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MultAnswer {
    Flag(bool),
    Elem(FieldElement),
}

pub fn mult_structure(field: &Arc<FieldSpec>, query: MultQuery) -> Result<MultAnswer, FieldError> {
    match query {
        MultQuery::IsSquare(a) => {
            if !same_field(field, &a.field) {
                return Err(FieldError::Mismatch(format!("{field:?}"), format!("{:?}", a.field)));
            }
            Ok(MultAnswer::Flag(a.is_square()))
        }
        MultQuery::Generator => Ok(MultAnswer::Elem(FieldElement::generator(field))),
        MultQuery::NormMinusOne => {
            let v = field.norm_minus_one()?;
            Ok(MultAnswer::Elem(FieldElement { field: field.clone(), v }))
        }
    }
}

/// The embedding `F_{p^m} -> F_{p^{mk}}` sending the class of `x` to the
/// least root (in the integer encoding) of the source modulus.
#[derive(Clone)]
pub struct Embedding {
    src: Arc<FieldSpec>,
    dst: Arc<FieldSpec>,
    map: Vec<u32>,
}

impl Embedding {
    pub fn new(src: &Arc<FieldSpec>, dst: &Arc<FieldSpec>) -> Result<Self, FieldError> {
        if src.p != dst.p || dst.m % src.m != 0 {
            return Err(FieldError::Unsupported(format!(
                "no embedding {src:?} -> {dst:?}"
            )));
        }
        let eval = |x: u32| -> u32 {
            src.modulus
                .iter()
                .rev()
                .fold(0, |acc, &c| dst.add(dst.mul(acc, x), c))
        };
        let step = ((dst.q - 1) / (src.q - 1)) as i64;
        let mut candidates: Vec<u32> = (0..src.q as i64 - 1).map(|k| dst.exp_gen(k * step)).collect();
        candidates.push(0);
        candidates.sort_unstable();
        let theta = candidates
            .into_iter()
            .find(|&x| eval(x) == 0)
            .expect("the source modulus splits in the target field");
        let map = (0..src.q)
            .map(|v| {
                src.coefficients(v)
                    .iter()
                    .rev()
                    .fold(0, |acc, &c| dst.add(dst.mul(acc, theta), c))
            })
            .collect();
        Ok(Embedding { src: src.clone(), dst: dst.clone(), map })
    }

    pub fn source(&self) -> &Arc<FieldSpec> {
        &self.src
    }

    pub fn target(&self) -> &Arc<FieldSpec> {
        &self.dst
    }

    pub fn apply(&self, v: u32) -> u32 {
        self.map[v as usize]
    }

    pub fn apply_elem(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        if !same_field(&a.field, &self.src) {
            return Err(FieldError::Mismatch(format!("{:?}", a.field), format!("{:?}", self.src)));
        }
        Ok(FieldElement { field: self.dst.clone(), v: self.map[a.v as usize] })
    }

    /// Preimage of a target element that lies in the image.
    pub fn preimage(&self, v: u32) -> Option<u32> {
        self.map.iter().position(|&x| x == v).map(|i| i as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_fields() {
        let f2 = make_field(2, 1).unwrap();
        assert_eq!(f2.generator(), 1);
        let f5 = make_field(5, 1).unwrap();
        assert_eq!(f5.mul(3, 4), 2);
        assert_eq!(f5.inv(2), Some(3));
        assert!(!f5.is_square(2));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(make_field(4, 1).unwrap_err(), FieldError::NotPrime(4));
        assert!(matches!(make_field(2, 21), Err(FieldError::TooLarge { .. })));
        assert!(make_field(2, 20).is_ok());
    }

    #[test]
    fn parse_round_trip() {
        let f = make_field(3, 2).unwrap();
        for a in 0..f.q() {
            assert_eq!(f.parse(&f.format(a)).unwrap(), a);
            assert_eq!(f.parse(&f.format_log(a)).unwrap(), a);
        }
    }

    #[test]
    fn large_field_without_tables() {
        let f = make_field(2, 17).unwrap();
        assert!(!f.has_log_tables());
        let g = f.generator();
        assert_eq!(f.pow(g, (f.q() - 1) as i64), Some(1));
        let a = f.exp_gen(12345);
        assert_eq!(f.log_gen(a), Some(12345));
        assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
    }

    #[test]
    fn mismatch_is_an_error() {
        let f4 = make_field(2, 2).unwrap();
        let f8 = make_field(2, 3).unwrap();
        let a = FieldElement::one(&f4);
        let b = FieldElement::one(&f8);
        assert!(matches!(a.add(&b), Err(FieldError::Mismatch(..))));
    }
}
