//! Rack-aware MSR code with optimal repair and optimal update.
//!
//! Node `j = e*u + g` in row `i` has locator `λ^(e*s̄ + i_e + g*s̄*n̄)`, where
//! `i_e` is base-`s̄` digit `e` of `i` and `λ` has order `s̄n`. Row `i` of the
//! codeword is then a codeword of the generalized RS code with parity checks
//! `Σ_j x_{j,i}^t c_{j,i} = 0`, `t < r`, so rows encode and decode
//! independently.
//!
//! Repair of a node in rack `p` works on groups of `s̄` rows that differ only
//! in digit `p`. Only the checks with `t = w*u` are used; there the in-rack
//! multipliers `λ^(g*s̄*n̄*w*u)` are 1, so each rack enters through the sum of
//! its nodes. Each helper rack sends one aggregate per group.

use num_bigint::BigUint;

use super::digits::Digits;
use super::{
    check_data, check_shape, erased_positions, CodeError, Codeword, Family, RackParams, RepairSession,
    RepairTranscript, RepairableCode,
};
use crate::ffield::primes::smallest_prime_one_mod;
use crate::ffield::{FieldCtx, FieldElement};
use crate::linalg::vandermonde_solve;

/// Largest sub-packetization the array codes will build.
pub const MAX_ROWS: usize = 1 << 20;

#[derive(Debug, Clone)]
pub struct C1Code {
    params: RackParams,
    ctx: FieldCtx,
    lambda: FieldElement,
    digits: Digits,
    /// `λ^e` for `e < s̄n`.
    lambda_pows: Vec<FieldElement>,
}

impl C1Code {
    /// Builds the code, choosing the smallest prime `p ≡ 1 (mod s̄n)` when no
    /// field is supplied.
    pub fn build(params: RackParams, field: Option<FieldCtx>) -> Result<Self, CodeError> {
        params.validate()?;
        let ord = (params.s_bar() * params.n()) as u64;
        let ctx = match field {
            Some(ctx) => ctx,
            None => FieldCtx::prime(smallest_prime_one_mod(ord, ord + 1))?,
        };
        if !(ctx.group_order() % ord == BigUint::from(0u32)) {
            return Err(CodeError::InvalidParameters(format!(
                "s̄n = {ord} does not divide |F| - 1 = {}",
                ctx.group_order()
            )));
        }
        let lambda = ctx.element_of_order(ord)?;
        Self::with_lambda(params, ctx, lambda)
    }

    /// Builds the code around a given `λ`, which must have order `s̄n`.
    pub fn with_lambda(params: RackParams, ctx: FieldCtx, lambda: FieldElement) -> Result<Self, CodeError> {
        params.validate()?;
        let ord = (params.s_bar() * params.n()) as u64;
        if !has_exact_order(&lambda, ord) {
            return Err(CodeError::InvalidParameters(format!("λ = {lambda} does not have order {ord}")));
        }
        let digits = Digits::new(params.s_bar(), params.racks);
        if digits.total() > MAX_ROWS {
            return Err(CodeError::InvalidParameters(format!(
                "sub-packetization {} exceeds {MAX_ROWS}",
                digits.total()
            )));
        }
        let mut lambda_pows = Vec::with_capacity(ord as usize);
        let mut x = ctx.one();
        for _ in 0..ord {
            lambda_pows.push(x.clone());
            x = &x * &lambda;
        }
        Ok(C1Code {
            params,
            ctx,
            lambda,
            digits,
            lambda_pows,
        })
    }

    pub fn params(&self) -> RackParams {
        self.params
    }

    pub fn lambda(&self) -> &FieldElement {
        &self.lambda
    }

    fn exponent(&self, node: usize, row: usize) -> usize {
        let u = self.params.rack_size;
        let (e, g) = (node / u, node % u);
        let sb = self.params.s_bar();
        e * sb + self.digits.digit(row, e) + g * sb * self.params.racks
    }

    /// Locator `x_{node,row}` of the row-wise GRS code.
    pub fn locator(&self, node: usize, row: usize) -> &FieldElement {
        &self.lambda_pows[self.exponent(node, row)]
    }

    fn decode_row(
        &self,
        row: usize,
        received: &[Option<Vec<FieldElement>>],
        erased: &[usize],
    ) -> Result<Vec<FieldElement>, CodeError> {
        let n = self.params.n();
        let r = self.params.r();
        // syndromes of the known part for t < r
        let mut syn = vec![self.ctx.zero(); r];
        for (j, col) in received.iter().enumerate() {
            let Some(col) = col else { continue };
            let x = self.locator(j, row);
            let mut xt = self.ctx.one();
            for s in syn.iter_mut() {
                *s += &(&xt * &col[row]);
                xt = &xt * x;
            }
        }
        let points: Vec<FieldElement> = erased.iter().map(|&j| self.locator(j, row).clone()).collect();
        let rhs: Vec<FieldElement> = syn[..erased.len()].iter().map(|s| -s).collect();
        let vals = vandermonde_solve(&self.ctx, &points, &rhs)?;
        // remaining checks must hold
        for (t, s) in syn.iter().enumerate().skip(erased.len()) {
            let mut acc = s.clone();
            for (x, v) in points.iter().zip(&vals) {
                acc += &(&x.pow_u64(t as u64) * v);
            }
            if !acc.is_zero() {
                return Err(CodeError::Inconsistent);
            }
        }
        let mut out = Vec::with_capacity(n);
        let mut it = vals.into_iter();
        for col in received.iter() {
            match col {
                Some(c) => out.push(c[row].clone()),
                None => out.push(it.next().unwrap()),
            }
        }
        Ok(out)
    }
}

impl RepairableCode for C1Code {
    fn family(&self) -> Family {
        Family::C1
    }

    fn field(&self) -> &FieldCtx {
        &self.ctx
    }

    fn length(&self) -> usize {
        self.params.n()
    }

    fn dimension(&self) -> usize {
        self.params.k
    }

    fn rows(&self) -> usize {
        self.digits.total()
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
        let mut eqs = Vec::new();
        for row in 0..self.rows() {
            for t in 0..self.params.r() {
                eqs.push(
                    (0..self.params.n())
                        .map(|j| (j, row, self.locator(j, row).pow_u64(t as u64)))
                        .collect(),
                );
            }
        }
        eqs
    }

    fn encode(&self, data: &[Vec<FieldElement>]) -> Result<Codeword, CodeError> {
        check_data(self, data)?;
        let mut received: Vec<Option<Vec<FieldElement>>> = data.iter().cloned().map(Some).collect();
        received.resize(self.params.n(), None);
        self.erasure_decode(&received)
    }

    fn erasure_decode(&self, received: &[Option<Vec<FieldElement>>]) -> Result<Codeword, CodeError> {
        let erased = erased_positions(self, received, self.params.r())?;
        let l = self.rows();
        let mut cols: Vec<Vec<FieldElement>> = vec![Vec::with_capacity(l); self.params.n()];
        for row in 0..l {
            for (j, x) in self.decode_row(row, received, &erased)?.into_iter().enumerate() {
                cols[j].push(x);
            }
        }
        Codeword::from_columns(cols)
    }

    fn repair(
        &self,
        cw: &Codeword,
        failed: usize,
        helpers: &[usize],
    ) -> Result<(Vec<FieldElement>, RepairTranscript), CodeError> {
        check_shape(self, cw)?;
        let mut session = RepairSession::new(self, cw, failed, helpers)?;
        let u = self.params.rack_size;
        let sb = self.params.s_bar();
        let r_bar = self.params.r_bar();
        let host = failed / u;
        let helper_racks = session.helpers().to_vec();
        let others: Vec<usize> = (0..self.params.racks)
            .filter(|e| *e != host && !helper_racks.contains(e))
            .collect();
        let alpha = self.lambda.pow_u64(u as u64);
        let mut column = vec![self.ctx.zero(); self.rows()];

        for base in (0..self.rows()).filter(|&i| self.digits.digit(i, host) == 0) {
            let group: Vec<usize> = (0..sb).map(|a| self.digits.with_digit(base, host, a)).collect();
            let mut rhs = vec![self.ctx.zero(); r_bar];
            for &b in &helper_racks {
                let mut sigma = self.ctx.zero();
                for &row in &group {
                    for g in 0..u {
                        sigma += &session.read_helper(b * u + g, row);
                    }
                }
                let sigma = session.send(b, sigma);
                let point = alpha.pow_u64((sb * b + self.digits.digit(base, b)) as u64);
                let mut pw = self.ctx.one();
                for slot in rhs.iter_mut() {
                    *slot -= &(&pw * &sigma);
                    pw = &pw * &point;
                }
            }
            let mut points: Vec<FieldElement> = (0..sb).map(|a| alpha.pow_u64((sb * host + a) as u64)).collect();
            points.extend(
                others
                    .iter()
                    .map(|&e| alpha.pow_u64((sb * e + self.digits.digit(base, e)) as u64)),
            );
            debug_assert_eq!(points.len(), r_bar);
            let sol = vandermonde_solve(&self.ctx, &points, &rhs)?;
            for (a, &row) in group.iter().enumerate() {
                let mut value = sol[a].clone();
                for g in (0..u).filter(|&g| host * u + g != failed) {
                    value -= &session.read_local(host * u + g, row);
                }
                column[row] = value;
            }
        }
        Ok((column, session.finish()))
    }
}

pub(crate) fn has_exact_order(x: &FieldElement, ord: u64) -> bool {
    x.pow_u64(ord).is_one()
        && crate::ffield::primes::prime_factors(ord)
            .iter()
            .all(|l| !x.pow_u64(ord / l).is_one())
}
