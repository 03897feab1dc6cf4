//! Precomputed trace maps.
//!
//! The trace from GF(p^m) to GF(p^sub) is GF(p)-linear, so on coefficient
//! vectors it is an m×m matrix over GF(p). Building the matrix costs a few
//! matrix products; afterwards each trace is one matrix-vector product, far
//! cheaper than the `m/sub` big exponentiations of the direct formula.

use num_bigint::BigUint;
use smallvec::SmallVec;

use std::fmt;

use super::{poly, FieldCtx, FieldElement, FieldError};

/// Column-major dense matrix over GF(p).
type Columns = Vec<Vec<u32>>;

#[derive(Clone)]
pub struct TraceMap {
    ctx: FieldCtx,
    sub: usize,
    cols: Columns,
    lazy: bool,
}

impl fmt::Debug for TraceMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TraceMap({:?} -> degree {})", self.ctx, self.sub)
    }
}

impl TraceMap {
    pub fn new(ctx: &FieldCtx, sub: usize) -> Result<Self, FieldError> {
        let m = ctx.degree();
        if sub == 0 || !m.is_multiple_of(sub) {
            return Err(FieldError::NotSubfield { sub, degree: m });
        }
        let p = ctx.0.p;
        let lazy = poly::lazy_ok(p, m);
        let identity: Columns = (0..m)
            .map(|c| {
                let mut v = vec![0u32; m];
                v[c] = 1;
                v
            })
            .collect();
        if m == 1 {
            return Ok(TraceMap {
                ctx: ctx.clone(),
                sub,
                cols: identity,
                lazy,
            });
        }
        // Column c of the q-Frobenius matrix is X^(c q) = (X^q)^c.
        let q = BigUint::from(p).pow(sub as u32);
        let xq = ctx.variable().expect("extension field").pow(&q);
        let mut frob: Columns = Vec::with_capacity(m);
        let mut cur = ctx.one();
        for _ in 0..m {
            frob.push(cur.coeffs().to_vec());
            cur = &cur * &xq;
        }
        // Horner: T = I + P (I + P (... ))
        let mut total = identity.clone();
        for _ in 1..m / sub {
            let mut next = mat_mul(&frob, &total, p, lazy);
            for (col, id) in next.iter_mut().zip(identity.iter()) {
                for (x, &y) in col.iter_mut().zip(id.iter()) {
                    *x = poly::add_mod_p(*x, y, p);
                }
            }
            total = next;
        }
        Ok(TraceMap {
            ctx: ctx.clone(),
            sub,
            cols: total,
            lazy,
        })
    }

    /// Degree over GF(p) of the target subfield.
    pub fn sub_degree(&self) -> usize {
        self.sub
    }

    pub fn apply(&self, x: &FieldElement) -> FieldElement {
        assert!(self.ctx.same_field(x.ctx()), "trace map applied across fields");
        let v = mat_vec(&self.cols, x.coeffs(), self.ctx.0.p, self.lazy);
        self.ctx.raw(SmallVec::from_vec(v))
    }
}

fn mat_vec(cols: &Columns, x: &[u32], p: u32, lazy: bool) -> Vec<u32> {
    let m = cols.len();
    let pm = p as u64;
    let mut acc = vec![0u64; m];
    for (col, &xc) in cols.iter().zip(x.iter()) {
        if xc == 0 {
            continue;
        }
        let xc = xc as u64;
        if lazy {
            for (a, &v) in acc.iter_mut().zip(col.iter()) {
                *a += xc * v as u64;
            }
        } else {
            for (a, &v) in acc.iter_mut().zip(col.iter()) {
                *a = (*a + xc * v as u64 % pm) % pm;
            }
        }
    }
    acc.into_iter().map(|a| (a % pm) as u32).collect()
}

fn mat_mul(a: &Columns, b: &Columns, p: u32, lazy: bool) -> Columns {
    b.iter().map(|col| mat_vec(a, col, p, lazy)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_direct_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (p, m, sub) in [(2u64, 2usize, 1usize), (3, 6, 2), (3, 6, 3), (5, 4, 1), (7, 3, 3), (2, 12, 4)] {
            let ctx = FieldCtx::extension(p, m).unwrap();
            let map = TraceMap::new(&ctx, sub).unwrap();
            for _ in 0..20 {
                let x = ctx.random(&mut rng);
                assert_eq!(map.apply(&x), x.trace_to_subfield(sub).unwrap());
            }
        }
    }

    #[test]
    fn prime_field_trace_is_identity() {
        let ctx = FieldCtx::prime(13).unwrap();
        let map = TraceMap::new(&ctx, 1).unwrap();
        assert_eq!(map.apply(&ctx.constant(7)), ctx.constant(7));
    }

    #[test]
    fn rejects_non_divisor() {
        let ctx = FieldCtx::extension(3, 6).unwrap();
        assert!(TraceMap::new(&ctx, 4).is_err());
    }
}
