//! Small-integer number theory: primality, factorization, prime powers.

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
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

/// Decomposes `q = p^e` with `p` prime, or `None`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let factors = prime_factors(q);
    if factors.len() != 1 {
        return None;
    }
    let p = factors[0];
    let mut e = 0;
    let mut rest = q;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    Some((p, e))
}

/// Smallest prime `p >= from`.
pub fn smallest_prime_at_least(from: u64) -> u64 {
    let mut p = from.max(2);
    while !is_prime(p) {
        p += 1;
    }
    p
}

/// Smallest prime `p ≡ 1 (mod m)` with `p >= from`.
pub fn smallest_prime_one_mod(m: u64, from: u64) -> u64 {
    let mut p = from.max(2);
    let rem = (p + m - 1) % m; // p - 1 mod m
    if rem != 0 {
        p += m - rem;
    }
    while !is_prime(p) {
        p += m;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
    }

    #[test]
    fn factors_and_powers() {
        assert_eq!(prime_factors(360), vec![2, 3, 5]);
        assert_eq!(prime_factors(17), vec![17]);
        assert_eq!(prime_power(81), Some((3, 4)));
        assert_eq!(prime_power(4), Some((2, 2)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn prime_search() {
        assert_eq!(smallest_prime_at_least(5), 5);
        assert_eq!(smallest_prime_at_least(8), 11);
        assert_eq!(smallest_prime_one_mod(16, 17), 17);
        assert_eq!(smallest_prime_one_mod(6, 7), 7);
        assert_eq!(smallest_prime_one_mod(8, 9), 17);
        assert_eq!(smallest_prime_one_mod(1, 4), 5);
    }
}
