//! Rack-aware MSR code with low access.
//!
//! The coupled-layer layout with one digit per rack: `l = s̄^n̄`, node
//! `j = e*u + g` gets `λ_j = λ^(e + g*n̄)` for `λ` of order `n`, and all nodes
//! of rack `e` couple through digit `e`. With checks `t = u*w` the node
//! multipliers inside a rack collapse to `λ^(e*u*w)`, so helper racks send
//! sums over their nodes, and only rows with digit `e1` equal to 0 are read:
//! `l/s̄` rows per helper node.
//!
//! Valid `μ` values lie outside `⟨λ⟩`, and the repair systems additionally
//! need the `u`-th powers `μ_p^u` to avoid each other and every `λ^(e*u)`.
//! The builder enforces both and confirms every repair matrix has full rank.

use std::collections::BTreeSet;

use super::coupled::Coupled;
use super::{check_data, check_shape, CodeError, Codeword, Family, RackParams, RepairTranscript, RepairableCode};
use crate::ffield::primes::smallest_prime_one_mod;
use crate::ffield::{FieldCtx, FieldElement};
use crate::linalg::check_distinct;

use super::c1::has_exact_order;

/// Candidates examined per field when searching for `μ` values.
const MU_SEARCH_LIMIT: u64 = 1 << 16;

#[derive(Debug, Clone)]
pub struct C3Code {
    params: RackParams,
    lambda: FieldElement,
    inner: Coupled,
}

impl C3Code {
    /// Builds the code over the smallest prime field with `n | p - 1`,
    /// `p >= n + s̄ - 1` and a valid `μ` set, unless a field is supplied.
    pub fn build(params: RackParams, field: Option<FieldCtx>) -> Result<Self, CodeError> {
        params.validate()?;
        if let Some(ctx) = field {
            return Self::over_field(params, ctx);
        }
        let n = params.n() as u64;
        let need = n + params.s_bar() as u64 - 1;
        let mut p = smallest_prime_one_mod(n, need.max(n + 1));
        loop {
            match Self::over_field(params, FieldCtx::prime(p)?) {
                Ok(code) => return Ok(code),
                Err(CodeError::Construction(_)) => p = smallest_prime_one_mod(n, p + 1),
                Err(e) => return Err(e),
            }
        }
    }

    fn over_field(params: RackParams, ctx: FieldCtx) -> Result<Self, CodeError> {
        let n = params.n() as u64;
        let u = params.rack_size as u64;
        let sb = params.s_bar();
        if ctx.group_order() % n != num_bigint::BigUint::from(0u32) {
            return Err(CodeError::InvalidParameters(format!(
                "n = {n} does not divide |F| - 1 = {}",
                ctx.group_order()
            )));
        }
        if ctx.size_u64().is_some_and(|q| q < n + sb as u64 - 1) {
            return Err(CodeError::InvalidParameters(format!(
                "field has fewer than n + s̄ - 1 = {} elements",
                n + sb as u64 - 1
            )));
        }
        let lambda = ctx.element_of_order(n)?;
        let mut taken: Vec<FieldElement> = (0..params.racks as u64).map(|e| lambda.pow_u64(e * u)).collect();
        let mut mus = Vec::new();
        let limit = ctx.size_u64().unwrap_or(u64::MAX).min(MU_SEARCH_LIMIT);
        for v in 1..limit {
            if mus.len() + 1 == sb {
                break;
            }
            let x = ctx.from_u64(v)?;
            if x.pow_u64(n).is_one() {
                continue;
            }
            let xu = x.pow_u64(u);
            if taken.contains(&xu) {
                continue;
            }
            taken.push(xu);
            mus.push(x);
        }
        if mus.len() + 1 != sb {
            return Err(CodeError::Construction(format!(
                "{:?} has no {} μ values outside ⟨λ⟩ whose u-th powers are distinct from each other and from every λ^(eu)",
                ctx,
                sb - 1
            )));
        }
        Self::with_elements(params, ctx, lambda, mus)
    }

    /// Builds the code from explicit `λ` (order `n`) and `μ_1..μ_{s̄-1}`.
    pub fn with_elements(
        params: RackParams,
        ctx: FieldCtx,
        lambda: FieldElement,
        mus: Vec<FieldElement>,
    ) -> Result<Self, CodeError> {
        params.validate()?;
        let n = params.n();
        let u = params.rack_size;
        let racks = params.racks;
        if !has_exact_order(&lambda, n as u64) {
            return Err(CodeError::InvalidParameters(format!("λ = {lambda} does not have order {n}")));
        }
        if mus.len() + 1 != params.s_bar() {
            return Err(CodeError::InvalidParameters(format!(
                "need {} μ values, got {}",
                params.s_bar() - 1,
                mus.len()
            )));
        }
        for m in &mus {
            if m.is_zero() || m.pow_u64(n as u64).is_one() {
                return Err(CodeError::Construction(format!("μ = {m} must be nonzero and outside ⟨λ⟩")));
            }
        }
        let mut powers: Vec<FieldElement> = (0..racks).map(|e| lambda.pow_u64((e * u) as u64)).collect();
        powers.extend(mus.iter().map(|m| m.pow_u64(u as u64)));
        if check_distinct(&powers).is_err() {
            return Err(CodeError::Construction(
                "the values μ_p^u and λ^(eu) must be pairwise distinct".into(),
            ));
        }
        let lambdas: Vec<FieldElement> = (0..n)
            .map(|j| lambda.pow_u64((j / u + (j % u) * racks) as u64))
            .collect();
        let inner = Coupled::new(ctx, n, params.k, u, params.helpers, params.s_bar(), lambdas, mus)?;
        inner.check_repair_systems()?;
        Ok(C3Code { params, lambda, inner })
    }

    pub fn params(&self) -> RackParams {
        self.params
    }

    pub fn lambda(&self) -> &FieldElement {
        &self.lambda
    }

    pub fn mus(&self) -> &[FieldElement] {
        &self.inner.mus
    }

    /// Rows every helper node reads when a node of rack `e1` fails.
    pub fn access_rows(&self, e1: usize) -> BTreeSet<usize> {
        (0..self.rows())
            .filter(|&i| self.inner.digits.digit(i, e1) == 0)
            .collect()
    }

    /// Peeling decoder over rows; agrees with [`super::decode_by_elimination`].
    pub fn decode_inductive(&self, received: &[Option<Vec<FieldElement>>]) -> Result<Codeword, CodeError> {
        self.inner.decode(self, received)
    }
}

impl RepairableCode for C3Code {
    fn family(&self) -> Family {
        Family::C3
    }

    fn field(&self) -> &FieldCtx {
        &self.inner.ctx
    }

    fn length(&self) -> usize {
        self.params.n()
    }

    fn dimension(&self) -> usize {
        self.params.k
    }

    fn rows(&self) -> usize {
        self.inner.rows()
    }

    fn rack_size(&self) -> usize {
        self.params.rack_size
    }

    fn repair_degree(&self) -> usize {
        self.params.helpers
    }

    fn s_bar(&self) -> usize {
        self.params.s_bar()
    }

    fn parity_equations(&self) -> Vec<Vec<(usize, usize, FieldElement)>> {
        self.inner.parity_equations()
    }

    /// Encodes by one linear solve for the parity columns.
    fn encode(&self, data: &[Vec<FieldElement>]) -> Result<Codeword, CodeError> {
        check_data(self, data)?;
        let mut received: Vec<Option<Vec<FieldElement>>> = data.iter().cloned().map(Some).collect();
        received.resize(self.params.n(), None);
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

    fn params(racks: usize, rack_size: usize, k: usize, helpers: usize) -> RackParams {
        RackParams {
            racks,
            rack_size,
            k,
            helpers,
        }
    }

    #[test]
    fn demo_parameters() {
        let c = C3Code::build(params(3, 2, 3, 2), None).unwrap();
        let f = c.field();
        assert_eq!(f.characteristic(), 13);
        assert_eq!(c.rows(), 8);
        assert_eq!(c.lambda(), &f.constant(4));
        assert_eq!(c.mus(), &[f.constant(2)]);
    }

    #[test]
    fn gf7_has_no_valid_mu() {
        let err = C3Code::build(params(3, 2, 3, 2), Some(FieldCtx::prime(7).unwrap())).unwrap_err();
        match err {
            CodeError::Construction(msg) => assert!(msg.contains("μ")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_flag() {
        let c = C3Code::build(params(2, 2, 2, 1), None).unwrap();
        assert_eq!(c.rows(), 1);
        assert!(c.degenerate());
    }

    #[test]
    fn mds_and_decoder_agreement() {
        let c = C3Code::build(params(3, 2, 3, 2), None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cw = random_codeword(&c, &mut rng).unwrap();
        assert!(c.parity_check(&cw));
        for pattern in (0..6).combinations(3) {
            let rx = cw.erase(&pattern);
            assert_eq!(c.decode_inductive(&rx).unwrap(), cw);
            assert_eq!(decode_by_elimination(&c, &rx).unwrap(), cw);
        }
    }

    #[test]
    fn repair_counts() {
        let c = C3Code::build(params(3, 2, 3, 2), None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cw = random_codeword(&c, &mut rng).unwrap();
        for failed in 0..6 {
            for helpers in helper_sets(&c, failed) {
                let (col, tr) = c.repair(&cw, failed, &helpers).unwrap();
                assert_eq!(col, cw.column(failed));
                assert_eq!(tr.bandwidth(), 8);
                assert_eq!(tr.access(), 16);
                for rows in tr.accessed.values() {
                    assert_eq!(rows, &c.access_rows(failed / 2));
                }
            }
        }
    }

    #[test]
    fn repair_with_more_racks() {
        // n̄ = 4, u = 2, k = 4, d̄ = 2: s̄ = 1 + ... exercises two non-helper racks
        let c = C3Code::build(params(4, 2, 4, 2), None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cw = random_codeword(&c, &mut rng).unwrap();
        for failed in 0..8 {
            for helpers in helper_sets(&c, failed) {
                let (col, tr) = c.repair(&cw, failed, &helpers).unwrap();
                assert_eq!(col, cw.column(failed));
                assert_eq!(tr.bandwidth() as usize, 2 * c.rows() / c.s_bar());
            }
        }
        let c = C3Code::build(params(4, 2, 3, 3), None).unwrap();
        let cw = random_codeword(&c, &mut rng).unwrap();
        for failed in 0..8 {
            for helpers in helper_sets(&c, failed) {
                let (col, _) = c.repair(&cw, failed, &helpers).unwrap();
                assert_eq!(col, cw.column(failed));
            }
        }
    }
}
