//! Optimal-access MSR code for homogeneous storage, any `k <= d <= n-1`.
//!
//! Sub-packetization `l = s^n` with `s = d - k + 1`. Repair of node `j1`
//! reads, on every helper, exactly the rows whose digit `j1` is 0 and sends
//! them unchanged: `l/s` symbols per helper, read and sent alike.

use super::coupled::Coupled;
use super::{
    check_data, check_shape, CodeError, Codeword, Family, RepairTranscript, RepairableCode,
};
use crate::ffield::primes::smallest_prime_at_least;
use crate::ffield::{FieldCtx, FieldElement};
use crate::linalg::check_distinct;

#[derive(Debug, Clone)]
pub struct OaCode {
    d: usize,
    inner: Coupled,
}

impl OaCode {
    /// Builds the code with `λ_j = j` and `μ_p = n - 1 + p`, over the
    /// smallest prime field with at least `n + s - 1` elements unless a field
    /// is supplied.
    pub fn build(n: usize, k: usize, d: usize, field: Option<FieldCtx>) -> Result<Self, CodeError> {
        validate(n, k, d)?;
        let s = d - k + 1;
        let need = (n + s - 1) as u64;
        let ctx = match field {
            Some(ctx) => ctx,
            None => FieldCtx::prime(smallest_prime_at_least(need))?,
        };
        if ctx.size_u64().is_some_and(|q| q < need) {
            return Err(CodeError::InvalidParameters(format!(
                "field has fewer than n + s - 1 = {need} elements"
            )));
        }
        let lambdas = (0..n).map(|j| ctx.from_u64(j as u64)).collect::<Result<Vec<_>, _>>()?;
        let mus = (1..s)
            .map(|p| ctx.from_u64((n - 1 + p) as u64))
            .collect::<Result<Vec<_>, _>>()?;
        Self::with_elements(n, k, d, ctx, lambdas, mus)
    }

    /// Builds the code from explicit `λ_0..λ_{n-1}` and `μ_1..μ_{s-1}`, which
    /// must be `n + s - 1` distinct field elements.
    pub fn with_elements(
        n: usize,
        k: usize,
        d: usize,
        ctx: FieldCtx,
        lambdas: Vec<FieldElement>,
        mus: Vec<FieldElement>,
    ) -> Result<Self, CodeError> {
        validate(n, k, d)?;
        let s = d - k + 1;
        let all: Vec<FieldElement> = lambdas.iter().chain(&mus).cloned().collect();
        check_distinct(&all)
            .map_err(|_| CodeError::InvalidParameters("λ and μ values must be pairwise distinct".into()))?;
        let inner = Coupled::new(ctx, n, k, 1, d, s, lambdas, mus)?;
        inner.check_repair_systems()?;
        Ok(OaCode { d, inner })
    }

    pub fn lambdas(&self) -> &[FieldElement] {
        &self.inner.lambdas
    }

    pub fn mus(&self) -> &[FieldElement] {
        &self.inner.mus
    }

    /// Peeling decoder over rows; agrees with [`super::decode_by_elimination`].
    pub fn decode_inductive(&self, received: &[Option<Vec<FieldElement>>]) -> Result<Codeword, CodeError> {
        self.inner.decode(self, received)
    }
}

fn validate(n: usize, k: usize, d: usize) -> Result<(), CodeError> {
    if k == 0 || n < 2 || k >= n {
        return Err(CodeError::InvalidParameters(format!("need 1 <= k < n, got n={n}, k={k}")));
    }
    if d < k || d > n - 1 {
        return Err(CodeError::InvalidParameters(format!(
            "repair degree d={d} must satisfy k={k} <= d <= n-1={}",
            n - 1
        )));
    }
    Ok(())
}

impl RepairableCode for OaCode {
    fn family(&self) -> Family {
        Family::C2
    }

    fn field(&self) -> &FieldCtx {
        &self.inner.ctx
    }

    fn length(&self) -> usize {
        self.inner.n
    }

    fn dimension(&self) -> usize {
        self.inner.k
    }

    fn rows(&self) -> usize {
        self.inner.rows()
    }

    fn rack_size(&self) -> usize {
        1
    }

    fn repair_degree(&self) -> usize {
        self.d
    }

    fn s_bar(&self) -> usize {
        self.d - self.inner.k + 1
    }

    fn parity_equations(&self) -> Vec<Vec<(usize, usize, FieldElement)>> {
        self.inner.parity_equations()
    }

    /// Encodes by one linear solve for the parity columns.
    fn encode(&self, data: &[Vec<FieldElement>]) -> Result<Codeword, CodeError> {
        check_data(self, data)?;
        let mut received: Vec<Option<Vec<FieldElement>>> = data.iter().cloned().map(Some).collect();
        received.resize(self.inner.n, None);
        super::decode_by_elimination(self, &received)
    }

    fn erasure_decode(&self, received: &[Option<Vec<FieldElement>>]) -> Result<Codeword, CodeError> {
        self.decode_inductive(received)
    }

    fn repair(
        &self,
        cw: &Codeword,
        failed: usize,
        helpers: &[usize],
    ) -> Result<(Vec<FieldElement>, RepairTranscript), CodeError> {
        check_shape(self, cw)?;
        self.inner.repair(self, cw, failed, helpers)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{decode_by_elimination, helper_sets, random_codeword};
    use itertools::Itertools;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    #[test]
    fn demo_parameters() {
        let c = OaCode::build(4, 2, 3, None).unwrap();
        assert_eq!(c.rows(), 16);
        assert_eq!(c.field().characteristic(), 5);
        let f = c.field();
        assert_eq!(c.lambdas(), &(0..4).map(|x| f.constant(x)).collect::<Vec<_>>()[..]);
        assert_eq!(c.mus(), &[f.constant(4)]);
        let deg = OaCode::build(4, 2, 2, None).unwrap();
        assert_eq!(deg.rows(), 1);
        assert!(deg.degenerate());
        assert!(OaCode::build(4, 2, 4, None).is_err());
        assert!(OaCode::build(4, 2, 3, Some(FieldCtx::prime(3).unwrap())).is_err());
    }

    #[test]
    fn decoders_agree_on_all_patterns() {
        let c = OaCode::build(4, 2, 3, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cw = random_codeword(&c, &mut rng).unwrap();
        assert!(c.parity_check(&cw));
        for pattern in (0..4).combinations(2) {
            let rx = cw.erase(&pattern);
            assert_eq!(c.decode_inductive(&rx).unwrap(), cw);
            assert_eq!(decode_by_elimination(&c, &rx).unwrap(), cw);
        }
    }

    #[test]
    fn larger_instance_is_mds() {
        let c = OaCode::build(6, 3, 4, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cw = random_codeword(&c, &mut rng).unwrap();
        for pattern in (0..6).combinations(3) {
            assert_eq!(c.erasure_decode(&cw.erase(&pattern)).unwrap(), cw);
        }
    }

    #[test]
    fn repair_reads_what_it_sends() {
        let c = OaCode::build(4, 2, 3, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cw = random_codeword(&c, &mut rng).unwrap();
        for failed in 0..4 {
            let mut seen: Option<BTreeSet<usize>> = None;
            for helpers in helper_sets(&c, failed) {
                let (col, tr) = c.repair(&cw, failed, &helpers).unwrap();
                assert_eq!(col, cw.column(failed));
                assert_eq!(tr.bandwidth(), 24);
                assert_eq!(tr.access(), 24);
                for rows in tr.accessed.values() {
                    assert_eq!(rows.len(), 8);
                    let s = seen.get_or_insert_with(|| rows.clone());
                    assert_eq!(s, rows);
                }
            }
        }
    }

    #[test]
    fn repair_with_several_non_helpers() {
        // n - d = 3 exercises the peeling order
        let c = OaCode::build(6, 2, 3, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cw = random_codeword(&c, &mut rng).unwrap();
        for failed in [0, 5] {
            for helpers in helper_sets(&c, failed).into_iter().take(4) {
                let (col, tr) = c.repair(&cw, failed, &helpers).unwrap();
                assert_eq!(col, cw.column(failed));
                assert_eq!(tr.bandwidth() as usize, 3 * c.rows() / 2);
            }
        }
    }
}
