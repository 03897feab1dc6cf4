//! Arithmetic in prime fields GF(p) and extension fields GF(p^m).
//!
//! Elements are stored in the polynomial basis: a coefficient vector of
//! length `m` over GF(p), reduced modulo a monic irreducible polynomial held
//! by the shared [`FieldCtx`]. Every construction in this crate, from the
//! prime fields of the array codes to GF(3^210) of the Reed-Solomon scheme,
//! runs on this one representation.
//!
//! Integer encoding of an element is the base-p evaluation
//! `sum(coeff_i * p^i)`; it is what files and reports print.

mod poly;
pub mod primes;
mod trace;

pub use trace::TraceMap;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use smallvec::SmallVec;
use thiserror::Error;

use self::primes::{is_prime, prime_factors};

/// Largest characteristic accepted; keeps every product of two residues in a u64.
pub const MAX_CHARACTERISTIC: u64 = (1 << 31) - 1;

/// Up to this degree the canonical modulus is the lexicographically smallest
/// monic irreducible; above it a seeded random search is used.
pub const LEXICOGRAPHIC_MAX_DEGREE: usize = 12;

/// Seed for the random modulus search when the caller supplies none.
pub const DEFAULT_MODULUS_SEED: u64 = 0x7261_636b_6d73_72;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} exceeds the supported maximum {MAX_CHARACTERISTIC}")]
    CharacteristicTooLarge(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("modulus must be a monic polynomial of degree {0} with coefficients below p")]
    BadModulus(usize),
    #[error("modulus polynomial is reducible")]
    Reducible,
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields ({0} vs {1})")]
    ContextMismatch(String, String),
    #[error("order {ord} does not divide the multiplicative group order {group}")]
    OrderNotDivisor { ord: u64, group: String },
    #[error("subfield degree {sub} does not divide extension degree {degree}")]
    NotSubfield { sub: usize, degree: usize },
    #[error("invalid element encoding: {0}")]
    BadEncoding(String),
    #[error("invalid field header: {0}")]
    BadHeader(String),
}

struct Inner {
    p: u32,
    m: usize,
    /// Monic modulus, `m + 1` coefficients; empty for prime fields.
    modulus: Vec<u32>,
    group_order: BigUint,
    modulus_seed: Option<u64>,
    lazy: bool,
}

/// Shared, immutable description of a finite field.
///
/// Cloning is cheap (reference counted). Two contexts describe the same field
/// when characteristic, degree and modulus all agree.
#[derive(Clone)]
pub struct FieldCtx(Arc<Inner>);

impl FieldCtx {
    /// GF(p) for a prime `p`.
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        check_characteristic(p)?;
        Ok(Self::assemble(p as u32, 1, Vec::new(), None))
    }

    /// GF(p^m) with the canonical modulus.
    pub fn extension(p: u64, m: usize) -> Result<Self, FieldError> {
        Self::extension_seeded(p, m, DEFAULT_MODULUS_SEED)
    }

    /// GF(p^m); `seed` drives the random modulus search used above
    /// [`LEXICOGRAPHIC_MAX_DEGREE`] and is ignored below it.
    pub fn extension_seeded(p: u64, m: usize, seed: u64) -> Result<Self, FieldError> {
        check_characteristic(p)?;
        if m == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if m == 1 {
            return Self::prime(p);
        }
        let p32 = p as u32;
        if m <= LEXICOGRAPHIC_MAX_DEGREE {
            let modulus = smallest_irreducible(p32, m);
            Ok(Self::assemble(p32, m, modulus, None))
        } else {
            let modulus = random_irreducible(p32, m, seed);
            Ok(Self::assemble(p32, m, modulus, Some(seed)))
        }
    }

    /// GF(p^m) with a caller-supplied modulus (coefficients low degree first,
    /// leading 1 included). The modulus is checked for irreducibility.
    pub fn with_modulus(p: u64, modulus: Vec<u32>) -> Result<Self, FieldError> {
        check_characteristic(p)?;
        let p32 = p as u32;
        if modulus.len() < 2 {
            return Err(FieldError::ZeroDegree);
        }
        let m = modulus.len() - 1;
        if m == 1 {
            // a linear modulus adds nothing; GF(p) itself
            return Self::prime(p);
        }
        if modulus[m] != 1 || modulus.iter().any(|&c| c >= p32) {
            return Err(FieldError::BadModulus(m));
        }
        if !poly::is_irreducible(&modulus, p32) {
            return Err(FieldError::Reducible);
        }
        Ok(Self::assemble(p32, m, modulus, None))
    }

    /// Parses the `p^m/c0,c1,...,cm` header produced by [`FieldCtx::header`].
    pub fn from_header(header: &str) -> Result<Self, FieldError> {
        let bad = || FieldError::BadHeader(header.to_string());
        let (size, modulus) = header.split_once('/').ok_or_else(bad)?;
        let (p, m) = size.split_once('^').ok_or_else(bad)?;
        let p: u64 = p.parse().map_err(|_| bad())?;
        let m: usize = m.parse().map_err(|_| bad())?;
        if m == 1 {
            if modulus != "-" {
                return Err(bad());
            }
            return Self::prime(p);
        }
        let coeffs = modulus
            .split(',')
            .map(|c| c.parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        if coeffs.len() != m + 1 {
            return Err(bad());
        }
        Self::with_modulus(p, coeffs)
    }

    fn assemble(p: u32, m: usize, modulus: Vec<u32>, modulus_seed: Option<u64>) -> Self {
        let group_order = BigUint::from(p).pow(m as u32) - 1u32;
        let lazy = poly::lazy_ok(p, 2 * m);
        FieldCtx(Arc::new(Inner {
            p,
            m,
            modulus,
            group_order,
            modulus_seed,
            lazy,
        }))
    }

    pub fn characteristic(&self) -> u64 {
        self.0.p as u64
    }

    /// Extension degree over the prime field.
    pub fn degree(&self) -> usize {
        self.0.m
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.m == 1
    }

    /// The monic modulus, absent for prime fields.
    pub fn modulus(&self) -> Option<&[u32]> {
        if self.0.m == 1 {
            None
        } else {
            Some(&self.0.modulus)
        }
    }

    /// Seed used by the random modulus search, if one was used.
    pub fn modulus_seed(&self) -> Option<u64> {
        self.0.modulus_seed
    }

    /// `p^m - 1`.
    pub fn group_order(&self) -> &BigUint {
        &self.0.group_order
    }

    /// `p^m`.
    pub fn size(&self) -> BigUint {
        &self.0.group_order + 1u32
    }

    /// Field size as a u64 when it fits.
    pub fn size_u64(&self) -> Option<u64> {
        self.size().to_u64()
    }

    /// `p^m/c0,...,cm`, or `p^1/-` for prime fields.
    pub fn header(&self) -> String {
        let modulus = match self.modulus() {
            None => "-".to_string(),
            Some(f) => f.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
        };
        format!("{}^{}/{}", self.0.p, self.0.m, modulus)
    }

    pub fn same_field(&self, other: &FieldCtx) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.m == other.0.m && self.0.modulus == other.0.modulus)
    }

    fn raw(&self, coeffs: SmallVec<[u32; 4]>) -> FieldElement {
        debug_assert_eq!(coeffs.len(), self.0.m);
        FieldElement {
            ctx: self.clone(),
            c: coeffs,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.raw(SmallVec::from_elem(0, self.0.m))
    }

    pub fn one(&self) -> FieldElement {
        self.constant(1)
    }

    /// The prime-field constant `v mod p`.
    pub fn constant(&self, v: u64) -> FieldElement {
        let mut c: SmallVec<[u32; 4]> = SmallVec::from_elem(0, self.0.m);
        c[0] = (v % self.0.p as u64) as u32;
        self.raw(c)
    }

    /// Element from its coefficient vector (length `m`, entries below `p`).
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement, FieldError> {
        if coeffs.len() != self.0.m || coeffs.iter().any(|&c| c >= self.0.p) {
            return Err(FieldError::BadEncoding(format!("{coeffs:?}")));
        }
        Ok(self.raw(SmallVec::from_slice(coeffs)))
    }

    /// Element whose integer encoding is `v`.
    pub fn from_u64(&self, v: u64) -> Result<FieldElement, FieldError> {
        self.from_integer(&BigUint::from(v))
    }

    /// Element whose integer encoding is `v`; errors when `v >= p^m`.
    pub fn from_integer(&self, v: &BigUint) -> Result<FieldElement, FieldError> {
        if v > &self.0.group_order {
            return Err(FieldError::BadEncoding(v.to_string()));
        }
        let p = BigUint::from(self.0.p);
        let mut rest = v.clone();
        let mut c: SmallVec<[u32; 4]> = SmallVec::from_elem(0, self.0.m);
        for slot in c.iter_mut() {
            let (q, r) = rest.div_rem(&p);
            *slot = r.to_u32().unwrap_or(0);
            rest = q;
        }
        Ok(self.raw(c))
    }

    /// Parses a decimal integer encoding.
    pub fn parse(&self, s: &str) -> Result<FieldElement, FieldError> {
        let v = BigUint::parse_bytes(s.trim().as_bytes(), 10)
            .ok_or_else(|| FieldError::BadEncoding(s.to_string()))?;
        self.from_integer(&v)
    }

    /// The class of the polynomial variable, a root of the modulus.
    /// `None` for prime fields.
    pub fn variable(&self) -> Option<FieldElement> {
        if self.0.m == 1 {
            return None;
        }
        let mut c: SmallVec<[u32; 4]> = SmallVec::from_elem(0, self.0.m);
        c[1] = 1;
        Some(self.raw(c))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        let p = self.0.p;
        let c: SmallVec<[u32; 4]> = (0..self.0.m).map(|_| rng.gen_range(0..p)).collect();
        self.raw(c)
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        loop {
            let x = self.random(rng);
            if !x.is_zero() {
                return x;
            }
        }
    }

    /// An element of exact multiplicative order `ord`.
    ///
    /// Prime fields return the smallest integer representative with that
    /// order. Extension fields return `x^((p^m - 1)/ord)` for the first `x`
    /// in integer-encoding order for which that power has order `ord`.
    pub fn element_of_order(&self, ord: u64) -> Result<FieldElement, FieldError> {
        let group = &self.0.group_order;
        if ord == 0 || !(group % ord).is_zero() {
            return Err(FieldError::OrderNotDivisor {
                ord,
                group: group.to_string(),
            });
        }
        if ord == 1 {
            return Ok(self.one());
        }
        let ord_primes = prime_factors(ord);
        let has_order = |y: &FieldElement| {
            y.pow_u64(ord).is_one() && ord_primes.iter().all(|l| !y.pow_u64(ord / l).is_one())
        };
        if self.0.m == 1 {
            for g in 1..self.0.p as u64 {
                let y = self.constant(g);
                if has_order(&y) {
                    return Ok(y);
                }
            }
        } else {
            let cofactor = group / ord;
            let mut idx = 1u64;
            loop {
                let y = self.from_u64(idx)?.pow(&cofactor);
                if has_order(&y) {
                    return Ok(y);
                }
                idx += 1;
            }
        }
        unreachable!("a cyclic group has elements of every order dividing its size")
    }
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.0.p, self.0.m)
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.same_field(other)
    }
}

impl Eq for FieldCtx {}

fn check_characteristic(p: u64) -> Result<(), FieldError> {
    if p > MAX_CHARACTERISTIC {
        return Err(FieldError::CharacteristicTooLarge(p));
    }
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    Ok(())
}

fn smallest_irreducible(p: u32, m: usize) -> Vec<u32> {
    let mut idx: u128 = 1;
    loop {
        let mut f = vec![0u32; m + 1];
        let mut rest = idx;
        for slot in f.iter_mut().take(m) {
            *slot = (rest % p as u128) as u32;
            rest /= p as u128;
        }
        f[m] = 1;
        if f[0] != 0 && poly::is_irreducible(&f, p) {
            return f;
        }
        idx += 1;
    }
}

fn random_irreducible(p: u32, m: usize, seed: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut f: Vec<u32> = (0..m).map(|_| rng.gen_range(0..p)).collect();
        f.push(1);
        if f[0] != 0 && poly::is_irreducible(&f, p) {
            return f;
        }
    }
}

/// The four field operations accepted by [`arithmetic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked binary arithmetic: errors on context mismatch and on division by
/// zero instead of panicking like the operator impls.
pub fn arithmetic(a: &FieldElement, b: &FieldElement, op: Op) -> Result<FieldElement, FieldError> {
    if !a.ctx.same_field(&b.ctx) {
        return Err(FieldError::ContextMismatch(
            format!("{:?}", a.ctx),
            format!("{:?}", b.ctx),
        ));
    }
    Ok(match op {
        Op::Add => a.add_impl(b),
        Op::Sub => a.sub_impl(b),
        Op::Mul => a.mul_impl(b),
        Op::Div => a.checked_div(b)?,
    })
}

/// An element of a [`FieldCtx`].
#[derive(Clone)]
pub struct FieldElement {
    ctx: FieldCtx,
    c: SmallVec<[u32; 4]>,
}

impl FieldElement {
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    /// Polynomial-basis coefficients, low degree first.
    pub fn coeffs(&self) -> &[u32] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|&x| x == 0)
    }

    /// Base-p integer encoding.
    pub fn to_integer(&self) -> BigUint {
        let p = BigUint::from(self.ctx.0.p);
        let mut acc = BigUint::zero();
        for &c in self.c.iter().rev() {
            acc = acc * &p + c;
        }
        acc
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.to_integer().to_u64()
    }

    #[inline]
    fn assert_same(&self, other: &FieldElement) {
        assert!(
            self.ctx.same_field(&other.ctx),
            "field mismatch: {:?} vs {:?}",
            self.ctx,
            other.ctx
        );
    }

    fn add_impl(&self, other: &FieldElement) -> FieldElement {
        self.assert_same(other);
        let p = self.ctx.0.p;
        let c = self
            .c
            .iter()
            .zip(other.c.iter())
            .map(|(&a, &b)| poly::add_mod_p(a, b, p))
            .collect();
        self.ctx.raw(c)
    }

    fn sub_impl(&self, other: &FieldElement) -> FieldElement {
        self.assert_same(other);
        let p = self.ctx.0.p;
        let c = self
            .c
            .iter()
            .zip(other.c.iter())
            .map(|(&a, &b)| poly::sub_mod_p(a, b, p))
            .collect();
        self.ctx.raw(c)
    }

    fn mul_impl(&self, other: &FieldElement) -> FieldElement {
        self.assert_same(other);
        let inner = &self.ctx.0;
        if inner.m == 1 {
            let mut c = SmallVec::new();
            c.push(poly::mul_mod_p(self.c[0], other.c[0], inner.p));
            return self.ctx.raw(c);
        }
        let v = poly::mul_mod_monic(&self.c, &other.c, &inner.modulus, inner.p, inner.lazy);
        self.ctx.raw(SmallVec::from_vec(v))
    }

    fn neg_impl(&self) -> FieldElement {
        let p = self.ctx.0.p;
        let c = self.c.iter().map(|&a| poly::sub_mod_p(0, a, p)).collect();
        self.ctx.raw(c)
    }

    pub fn square(&self) -> FieldElement {
        self.mul_impl(self)
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let inner = &self.ctx.0;
        if inner.m == 1 {
            return Ok(self.ctx.constant(poly::inv_mod_p(self.c[0], inner.p) as u64));
        }
        let v = poly::inverse_mod(&self.c, &inner.modulus, inner.p).ok_or(FieldError::DivisionByZero)?;
        Ok(self.ctx.raw(SmallVec::from_vec(v)))
    }

    pub fn checked_div(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.assert_same(other);
        Ok(self.mul_impl(&other.inv()?))
    }

    /// `self^exp` for an exponent of any size; `0^0 = 1`.
    pub fn pow(&self, exp: &BigUint) -> FieldElement {
        let mut acc = self.ctx.one();
        for i in (0..exp.bits()).rev() {
            acc = acc.square();
            if exp.bit(i) {
                acc = acc.mul_impl(self);
            }
        }
        acc
    }

    pub fn pow_u64(&self, mut exp: u64) -> FieldElement {
        let mut acc = self.ctx.one();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_impl(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// `self^(p^k)`.
    pub fn frobenius(&self, k: usize) -> FieldElement {
        let mut y = self.clone();
        for _ in 0..k {
            y = y.pow_u64(self.ctx.0.p as u64);
        }
        y
    }

    /// Trace to the subfield GF(p^sub): `sum_j x^(p^(sub*j))` over
    /// `j < m/sub`, computed directly from Frobenius powers.
    ///
    /// [`TraceMap`] gives the same map precomputed as a matrix.
    pub fn trace_to_subfield(&self, sub: usize) -> Result<FieldElement, FieldError> {
        let m = self.ctx.0.m;
        if sub == 0 || !m.is_multiple_of(sub) {
            return Err(FieldError::NotSubfield { sub, degree: m });
        }
        let q = BigUint::from(self.ctx.0.p).pow(sub as u32);
        let mut sum = self.clone();
        let mut y = self.clone();
        for _ in 1..m / sub {
            y = y.pow(&q);
            sum = sum.add_impl(&y);
        }
        Ok(sum)
    }

    /// Degree of the minimal polynomial over GF(p): least `t >= 1` with
    /// `x^(p^t) = x`.
    pub fn element_degree(&self) -> usize {
        let m = self.ctx.0.m;
        let mut y = self.clone();
        for t in 1..=m {
            y = y.pow_u64(self.ctx.0.p as u64);
            if y == *self {
                return t;
            }
        }
        unreachable!("x^(p^m) = x holds for every element")
    }

    /// Whether the element lies in GF(p^sub). False if `sub` does not divide `m`.
    pub fn in_subfield(&self, sub: usize) -> bool {
        let m = self.ctx.0.m;
        if sub == 0 || !m.is_multiple_of(sub) {
            return false;
        }
        self.element_degree() <= sub && sub.is_multiple_of(self.element_degree())
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c && self.ctx.same_field(&other.ctx)
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.c.hash(state);
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ctx.0.m == 1 {
            write!(f, "{}", self.c[0])
        } else {
            write!(f, "{}", self.to_integer())
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl<'a, 'b> $tr<&'b FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &'b FieldElement) -> FieldElement {
                self.$imp(rhs)
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.$imp(&rhs)
            }
        }
        impl<'b> $tr<&'b FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &'b FieldElement) -> FieldElement {
                self.$imp(rhs)
            }
        }
        impl<'a> $tr<FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.$imp(&rhs)
            }
        }
    };
}

binop!(Add, add, add_impl);
binop!(Sub, sub, sub_impl);
binop!(Mul, mul, mul_impl);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_impl()
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_impl()
    }
}

impl AddAssign<&FieldElement> for FieldElement {
    fn add_assign(&mut self, rhs: &FieldElement) {
        *self = self.add_impl(rhs);
    }
}

impl SubAssign<&FieldElement> for FieldElement {
    fn sub_assign(&mut self, rhs: &FieldElement) {
        *self = self.sub_impl(rhs);
    }
}

impl MulAssign<&FieldElement> for FieldElement {
    fn mul_assign(&mut self, rhs: &FieldElement) {
        *self = self.mul_impl(rhs);
    }
}

/// Convenience: `sum` of a nonempty slice of elements, or zero of `ctx`.
pub fn sum<'a, I>(ctx: &FieldCtx, items: I) -> FieldElement
where
    I: IntoIterator<Item = &'a FieldElement>,
{
    let mut acc = ctx.zero();
    for x in items {
        acc += x;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(p: u64) -> FieldCtx {
        FieldCtx::prime(p).unwrap()
    }

    #[test]
    fn prime_field_construction() {
        assert_eq!(gf(17).size_u64(), Some(17));
        assert_eq!(gf(13).degree(), 1);
        assert_eq!(FieldCtx::prime(4).unwrap_err(), FieldError::NotPrime(4));
        assert!(matches!(FieldCtx::prime(1), Err(FieldError::NotPrime(1))));
    }

    #[test]
    fn gf4_modulus_is_x2_x_1() {
        let f = FieldCtx::extension(2, 2).unwrap();
        assert_eq!(f.modulus(), Some(&[1u32, 1, 1][..]));
        assert_eq!(f.header(), "2^2/1,1,1");
    }

    #[test]
    fn gf9_modulus_is_smallest_monic_irreducible() {
        // brute force: x^2 + b x + c over GF(3) is irreducible iff it has no root
        let mut expected = None;
        'outer: for idx in 0..9u32 {
            let (c, b) = (idx % 3, idx / 3);
            for x in 0..3 {
                if (x * x + b * x + c) % 3 == 0 {
                    continue 'outer;
                }
            }
            expected = Some(vec![c, b, 1]);
            break;
        }
        let f = FieldCtx::extension(3, 2).unwrap();
        assert_eq!(f.modulus().map(|m| m.to_vec()), expected);
        assert_eq!(expected, Some(vec![1, 0, 1]));
    }

    #[test]
    fn header_round_trip() {
        for ctx in [gf(17), FieldCtx::extension(3, 4).unwrap()] {
            let back = FieldCtx::from_header(&ctx.header()).unwrap();
            assert_eq!(back, ctx);
        }
        assert!(FieldCtx::from_header("4^1/-").is_err());
        assert!(FieldCtx::from_header("2^2/1,0,1").is_err());
    }

    #[test]
    fn pow_and_inverse_in_prime_fields() {
        let f17 = gf(17);
        let three = f17.constant(3);
        assert_eq!(three.pow_u64(8), f17.constant(16));
        assert!(three.pow_u64(16).is_one());
        let f13 = gf(13);
        assert!((f13.constant(4) * f13.constant(10)).is_one());
        assert_eq!(f13.constant(4).inv().unwrap(), f13.constant(10));
        let x = f13.constant(7);
        assert_eq!(&x + &f13.zero(), x);
        assert_eq!(f13.zero().inv().unwrap_err(), FieldError::DivisionByZero);
        assert!(f13.zero().pow_u64(0).is_one());
    }

    #[test]
    fn checked_arithmetic_reports_mismatch() {
        let a = gf(13).constant(2);
        let b = gf(17).constant(2);
        assert!(matches!(
            arithmetic(&a, &b, Op::Add),
            Err(FieldError::ContextMismatch(_, _))
        ));
        let z = gf(13).zero();
        assert_eq!(arithmetic(&a, &z, Op::Div).unwrap_err(), FieldError::DivisionByZero);
        assert_eq!(arithmetic(&a, &a, Op::Mul).unwrap(), gf(13).constant(4));
    }

    #[test]
    fn element_of_order_examples() {
        assert_eq!(gf(17).element_of_order(16).unwrap(), gf(17).constant(3));
        assert_eq!(gf(13).element_of_order(6).unwrap(), gf(13).constant(4));
        assert!(gf(13).element_of_order(1).unwrap().is_one());
        assert!(matches!(
            gf(13).element_of_order(5),
            Err(FieldError::OrderNotDivisor { .. })
        ));
    }

    #[test]
    fn element_of_order_in_extension() {
        let f = FieldCtx::extension(3, 4).unwrap(); // 80 = 2^4 * 5
        for ord in [2u64, 5, 8, 16, 40, 80] {
            let y = f.element_of_order(ord).unwrap();
            assert!(y.pow_u64(ord).is_one());
            for l in prime_factors(ord) {
                assert!(!y.pow_u64(ord / l).is_one());
            }
        }
    }

    #[test]
    fn traces_in_gf4() {
        let f = FieldCtx::extension(2, 2).unwrap();
        assert!(f.one().trace_to_subfield(1).unwrap().is_zero());
        let w = f.variable().unwrap();
        assert!(w.trace_to_subfield(1).unwrap().is_one());
        assert!(matches!(
            w.trace_to_subfield(3),
            Err(FieldError::NotSubfield { .. })
        ));
    }

    #[test]
    fn full_degree_trace_is_identity() {
        let f = FieldCtx::extension(3, 2).unwrap();
        for i in 0..9 {
            let x = f.from_u64(i).unwrap();
            assert_eq!(x.trace_to_subfield(2).unwrap(), x);
        }
    }

    #[test]
    fn degrees() {
        let f = FieldCtx::extension(3, 6).unwrap();
        assert_eq!(f.constant(2).element_degree(), 1);
        assert_eq!(f.variable().unwrap().element_degree(), 6);
        // the norm-like power lands in GF(3^2) or GF(3)
        let y = f.variable().unwrap().pow_u64((729 - 1) / (9 - 1));
        assert!(matches!(y.element_degree(), 1 | 2));
        assert!(y.in_subfield(2));
    }

    #[test]
    fn integer_encoding_round_trip() {
        let f = FieldCtx::extension(5, 3).unwrap();
        for v in [0u64, 1, 4, 5, 37, 124] {
            let x = f.from_u64(v).unwrap();
            assert_eq!(x.to_u64(), Some(v));
            assert_eq!(f.parse(&x.to_string()).unwrap(), x);
        }
        assert!(f.from_u64(125).is_err());
    }

    #[test]
    fn gf3_210_is_reproducible() {
        let a = FieldCtx::extension(3, 210).unwrap();
        let b = FieldCtx::extension(3, 210).unwrap();
        assert_eq!(a.modulus(), b.modulus());
        assert_eq!(a.modulus_seed(), Some(DEFAULT_MODULUS_SEED));
        assert_eq!(a.variable().unwrap().element_degree(), 210);
        // an element of GF(3^3): degree 1 or 3
        let y = a.variable().unwrap().pow(&((a.group_order().clone()) / 26u32));
        assert!(matches!(y.element_degree(), 1 | 3));
    }

    fn field_axioms(ctx: &FieldCtx, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..1000 {
            let a = ctx.random(&mut rng);
            let b = ctx.random(&mut rng);
            let c = ctx.random(&mut rng);
            assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            assert_eq!(&(&a - &b) + &b, a);
            if !a.is_zero() {
                assert!((&a * &a.inv().unwrap()).is_one());
            }
        }
    }

    #[test]
    fn axioms_hold_in_test_fields() {
        field_axioms(&gf(17), 1);
        field_axioms(&gf(2_147_483_647), 2);
        field_axioms(&FieldCtx::extension(2, 8).unwrap(), 3);
        field_axioms(&FieldCtx::extension(3, 5).unwrap(), 4);
        field_axioms(&FieldCtx::extension(65_521, 3).unwrap(), 5);
    }

    proptest! {
        #[test]
        fn trace_is_subfield_linear(seed in any::<u64>()) {
            let ctx = FieldCtx::extension(3, 6).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = ctx.random(&mut rng);
            let y = ctx.random(&mut rng);
            // alpha in GF(3^2): a random element pushed through the norm-type power
            let alpha = ctx.random(&mut rng).pow_u64((729 - 1) / (9 - 1));
            let lhs = (&(&alpha * &x) + &y).trace_to_subfield(2).unwrap();
            let rhs = &(&alpha * &x.trace_to_subfield(2).unwrap()) + &y.trace_to_subfield(2).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn trace_lands_in_subfield(seed in any::<u64>()) {
            let ctx = FieldCtx::extension(5, 4).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = ctx.random(&mut rng).trace_to_subfield(2).unwrap();
            prop_assert_eq!(t.pow_u64(25), t);
        }
    }
}
