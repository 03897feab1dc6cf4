//! Dense polynomials over GF(p) with coefficients stored low degree first.
//!
//! Used for modulus search and irreducibility testing, and as the
//! multiplication kernel of extension-field elements.

use num_bigint::BigUint;

#[inline]
pub(crate) fn mul_mod_p(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
pub(crate) fn add_mod_p(a: u32, b: u32, p: u32) -> u32 {
    let s = a as u64 + b as u64;
    if s >= p as u64 {
        (s - p as u64) as u32
    } else {
        s as u32
    }
}

#[inline]
pub(crate) fn sub_mod_p(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        (a as u64 + p as u64 - b as u64) as u32
    }
}

pub(crate) fn pow_mod_p(mut base: u32, mut exp: u64, p: u32) -> u32 {
    let mut acc = 1 % p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_p(acc, base, p);
        }
        base = mul_mod_p(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue via Fermat.
pub(crate) fn inv_mod_p(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod_p(a, p as u64 - 2, p)
}

/// True when `terms` products of residues below `p` can be summed in a u64
/// without intermediate reduction.
pub(crate) fn lazy_ok(p: u32, terms: usize) -> bool {
    let sq = (p as u128 - 1) * (p as u128 - 1);
    sq * (terms as u128 + 1) < u64::MAX as u128
}

pub(crate) fn trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub(crate) fn degree(a: &[u32]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

/// Multiplies `a` by `b` and reduces modulo the monic polynomial `f`.
///
/// Output has exactly `deg f` coefficients.
pub(crate) fn mul_mod_monic(a: &[u32], b: &[u32], f: &[u32], p: u32, lazy: bool) -> Vec<u32> {
    let m = f.len() - 1;
    let mut acc = vec![0u64; a.len() + b.len()];
    let pm = p as u64;
    if lazy {
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let x = x as u64;
            for (j, &y) in b.iter().enumerate() {
                acc[i + j] += x * y as u64;
            }
        }
    } else {
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let x = x as u64;
            for (j, &y) in b.iter().enumerate() {
                acc[i + j] = (acc[i + j] + x * y as u64 % pm) % pm;
            }
        }
    }
    reduce_acc(&mut acc, f, p, lazy);
    let mut out = vec![0u32; m];
    for (o, a) in out.iter_mut().zip(acc.iter()) {
        *o = (*a % pm) as u32;
    }
    out
}

fn reduce_acc(acc: &mut [u64], f: &[u32], p: u32, lazy: bool) {
    let m = f.len() - 1;
    let pm = p as u64;
    if acc.len() <= m {
        return;
    }
    for d in (m..acc.len()).rev() {
        let c = acc[d] % pm;
        acc[d] = 0;
        if c == 0 {
            continue;
        }
        let neg = pm - c;
        let base = d - m;
        for (k, &fk) in f[..m].iter().enumerate() {
            if fk == 0 {
                continue;
            }
            if lazy {
                acc[base + k] += neg * fk as u64;
            } else {
                acc[base + k] = (acc[base + k] + neg * fk as u64 % pm) % pm;
            }
        }
    }
}

/// Remainder of `a` modulo a nonzero polynomial `b`.
pub(crate) fn rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let db = degree(b).expect("division by zero polynomial");
    let mut r: Vec<u32> = a.to_vec();
    trim(&mut r);
    let lead_inv = inv_mod_p(b[db], p);
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let coef = mul_mod_p(r[dr], lead_inv, p);
        let shift = dr - db;
        for (k, &bk) in b[..=db].iter().enumerate() {
            r[shift + k] = sub_mod_p(r[shift + k], mul_mod_p(coef, bk, p), p);
        }
        trim(&mut r);
    }
    r
}

/// Monic gcd of two polynomials (zero polynomial if both are zero).
pub(crate) fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    if let Some(d) = degree(&x) {
        let inv = inv_mod_p(x[d], p);
        for c in x.iter_mut() {
            *c = mul_mod_p(*c, inv, p);
        }
    }
    x
}

/// Inverse of `a` modulo the irreducible monic `f` by the extended Euclidean
/// algorithm. Returns `None` when `a` is zero modulo `f`.
pub(crate) fn inverse_mod(a: &[u32], f: &[u32], p: u32) -> Option<Vec<u32>> {
    let m = f.len() - 1;
    let mut r0: Vec<u32> = f.to_vec();
    let mut r1: Vec<u32> = a.to_vec();
    trim(&mut r1);
    if r1.is_empty() {
        return None;
    }
    let mut s0: Vec<u32> = Vec::new();
    let mut s1: Vec<u32> = vec![1];
    while degree(&r1).is_some_and(|d| d > 0) {
        let (q, r) = divmod(&r0, &r1, p);
        let qs = mul_plain(&q, &s1, p);
        let s2 = sub_plain(&s0, &qs, p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
        if r1.is_empty() {
            return None;
        }
    }
    // r1 is a nonzero constant
    let inv = inv_mod_p(r1[0], p);
    let mut out = rem(&s1, f, p);
    for c in out.iter_mut() {
        *c = mul_mod_p(*c, inv, p);
    }
    out.resize(m, 0);
    Some(out)
}

fn divmod(a: &[u32], b: &[u32], p: u32) -> (Vec<u32>, Vec<u32>) {
    let db = degree(b).expect("division by zero polynomial");
    let mut r: Vec<u32> = a.to_vec();
    trim(&mut r);
    let mut q = vec![0u32; r.len().saturating_sub(db).max(1)];
    let lead_inv = inv_mod_p(b[db], p);
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let coef = mul_mod_p(r[dr], lead_inv, p);
        let shift = dr - db;
        q[shift] = coef;
        for (k, &bk) in b[..=db].iter().enumerate() {
            r[shift + k] = sub_mod_p(r[shift + k], mul_mod_p(coef, bk, p), p);
        }
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

fn mul_plain(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = add_mod_p(out[i + j], mul_mod_p(x, y, p), p);
        }
    }
    trim(&mut out);
    out
}

fn sub_plain(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let n = a.len().max(b.len());
    let mut out = vec![0u32; n];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = sub_mod_p(x, y, p);
    }
    trim(&mut out);
    out
}

/// `base^exp mod f` for monic `f`; `base` must already be reduced.
pub(crate) fn pow_mod_monic(base: &[u32], exp: &BigUint, f: &[u32], p: u32, lazy: bool) -> Vec<u32> {
    let m = f.len() - 1;
    let mut acc = vec![0u32; m];
    acc[0] = 1 % p;
    let bits = exp.bits();
    for i in (0..bits).rev() {
        acc = mul_mod_monic(&acc, &acc, f, p, lazy);
        if exp.bit(i) {
            acc = mul_mod_monic(&acc, base, f, p, lazy);
        }
    }
    acc
}

/// Ben-Or irreducibility test for a monic polynomial of degree `m >= 1`:
/// `f` is irreducible iff `gcd(x^(p^i) - x, f) = 1` for all `i <= m/2`.
///
/// Reducible inputs usually fail at a small `i`, which keeps random
/// modulus search cheap.
pub(crate) fn is_irreducible(f: &[u32], p: u32) -> bool {
    let m = match degree(f) {
        Some(d) => d,
        None => return false,
    };
    if m == 0 || f[m] != 1 {
        return false;
    }
    if m == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let lazy = lazy_ok(p, 2 * m);
    let pe = BigUint::from(p);
    let mut x = vec![0u32; m];
    x[1] = 1;
    let mut y = x.clone();
    for _ in 1..=m / 2 {
        y = pow_mod_monic(&y, &pe, f, p, lazy);
        let mut diff = y.clone();
        diff[1] = sub_mod_p(diff[1], 1, p);
        let g = gcd(&diff, f, p);
        if degree(&g).is_none_or(|d| d > 0) {
            // either a proper factor or diff == 0 (impossible below m/2 for irreducible f)
            return false;
        }
    }
    true
}
