//! Parity-check layout shared by the optimal-access code and its rack-aware
//! variant.
//!
//! Node `j` belongs to group `d(j) = j / u` (every node is its own group when
//! `u = 1`), and row indices are read as base-`s` numbers with one digit per
//! group. The checks are
//!
//! ```text
//! Σ_j λ_j^t c_{j,i} + Σ_j δ(i_{d(j)}) Σ_{p=1}^{s-1} μ_p^t c_{j, i(d(j),p)} = 0,   t < r,
//! ```
//!
//! where `δ(x) = 1` iff `x = 0` and `i(e,p)` replaces digit `e` of `i` by `p`.
//! A coupling term always points from a row with digit `e` equal to 0 to a row
//! where it is nonzero, which is what lets both the decoder and the repair
//! procedure peel rows in order of how many relevant digits are zero.

use std::collections::BTreeSet;

use super::digits::Digits;
use super::{erased_positions, CodeError, Codeword, RepairSession, RepairTranscript, RepairableCode};
use crate::ffield::{FieldCtx, FieldElement};
use crate::linalg::{check_distinct, vandermonde, vandermonde_solve};

#[derive(Debug, Clone)]
pub(crate) struct Coupled {
    pub(crate) ctx: FieldCtx,
    pub(crate) n: usize,
    pub(crate) k: usize,
    pub(crate) u: usize,
    /// Helper groups used by repair.
    pub(crate) helpers: usize,
    pub(crate) digits: Digits,
    pub(crate) lambdas: Vec<FieldElement>,
    pub(crate) mus: Vec<FieldElement>,
    /// `λ_j^t`, `t < r`.
    lam_pows: Vec<Vec<FieldElement>>,
    /// `μ_p^t`, `t < r`, for `p = 1..s-1` stored at `p - 1`.
    mu_pows: Vec<Vec<FieldElement>>,
}

fn power_table(x: &FieldElement, count: usize) -> Vec<FieldElement> {
    let mut out = Vec::with_capacity(count);
    let mut pw = x.ctx().one();
    for _ in 0..count {
        out.push(pw.clone());
        pw = &pw * x;
    }
    out
}

impl Coupled {
    /// `s` is the digit base, `groups = n / u` the number of digits.
    pub(crate) fn new(
        ctx: FieldCtx,
        n: usize,
        k: usize,
        u: usize,
        helpers: usize,
        s: usize,
        lambdas: Vec<FieldElement>,
        mus: Vec<FieldElement>,
    ) -> Result<Self, CodeError> {
        if lambdas.len() != n || mus.len() + 1 != s {
            return Err(CodeError::InvalidParameters(format!(
                "need {n} λ values and {} μ values",
                s - 1
            )));
        }
        if let Some(x) = lambdas.iter().chain(&mus).find(|x| !x.ctx().same_field(&ctx)) {
            return Err(CodeError::InvalidParameters(format!(
                "element {x} is not in {:?}",
                ctx
            )));
        }
        let digits = Digits::new(s, n / u);
        if digits.total() > super::c1::MAX_ROWS {
            return Err(CodeError::InvalidParameters(format!(
                "sub-packetization {} exceeds {}",
                digits.total(),
                super::c1::MAX_ROWS
            )));
        }
        let r = n - k;
        let lam_pows = lambdas.iter().map(|x| power_table(x, r)).collect();
        let mu_pows = mus.iter().map(|x| power_table(x, r)).collect();
        Ok(Coupled {
            ctx,
            n,
            k,
            u,
            helpers,
            digits,
            lambdas,
            mus,
            lam_pows,
            mu_pows,
        })
    }

    pub(crate) fn rows(&self) -> usize {
        self.digits.total()
    }

    fn s(&self) -> usize {
        self.mus.len() + 1
    }

    fn groups(&self) -> usize {
        self.n / self.u
    }

    fn group(&self, node: usize) -> usize {
        node / self.u
    }

    /// Repair uses checks `t = u*w` for `w` below this count.
    fn repair_checks(&self) -> usize {
        self.groups() - self.k / self.u
    }

    pub(crate) fn parity_equations(&self) -> Vec<Vec<(usize, usize, FieldElement)>> {
        let mut eqs = Vec::with_capacity(self.rows() * (self.n - self.k));
        for i in 0..self.rows() {
            for t in 0..self.n - self.k {
                let mut eq = Vec::new();
                for j in 0..self.n {
                    eq.push((j, i, self.lam_pows[j][t].clone()));
                    let e = self.group(j);
                    if self.digits.digit(i, e) == 0 {
                        for p in 1..self.s() {
                            eq.push((j, self.digits.with_digit(i, e, p), self.mu_pows[p - 1][t].clone()));
                        }
                    }
                }
                eqs.push(eq);
            }
        }
        eqs
    }

    /// Checks that every square Vandermonde system met during repair is
    /// invertible: for each set `J` of non-helper groups, the points
    /// `λ_{eu}^u (e ∈ J)` and `μ_p^u` must be distinct.
    pub(crate) fn check_repair_systems(&self) -> Result<(), CodeError> {
        let w = self.repair_checks();
        let alpha: Vec<FieldElement> = (0..self.groups())
            .map(|e| self.lambdas[e * self.u].pow_u64(self.u as u64))
            .collect();
        let nu: Vec<FieldElement> = self.mus.iter().map(|m| m.pow_u64(self.u as u64)).collect();
        let size = self.groups() - self.helpers;
        for j_set in itertools::Itertools::combinations(0..self.groups(), size) {
            let mut pts: Vec<FieldElement> = j_set.iter().map(|&e| alpha[e].clone()).collect();
            pts.extend(nu.iter().cloned());
            if pts.len() != w {
                return Err(CodeError::Construction(format!(
                    "repair system has {} unknowns but {w} equations",
                    pts.len()
                )));
            }
            if vandermonde(&self.ctx, &pts, w).rank() != w {
                return Err(CodeError::Construction(format!(
                    "repair matrix singular for non-helper groups {j_set:?}"
                )));
            }
        }
        Ok(())
    }

    /// Peeling decoder: rows are processed in order of how many digits of
    /// erased groups are zero, so every coupling term involving an erased
    /// node refers to a row that is already decoded.
    pub(crate) fn decode<C: RepairableCode + ?Sized>(
        &self,
        code: &C,
        received: &[Option<Vec<FieldElement>>],
    ) -> Result<Codeword, CodeError> {
        let r = self.n - self.k;
        let erased = erased_positions(code, received, r)?;
        let l = self.rows();
        let mut cw = Codeword::zeros(&self.ctx, self.n, l);
        for (j, col) in received.iter().enumerate() {
            if let Some(col) = col {
                for (i, x) in col.iter().enumerate() {
                    cw.set(j, i, x.clone());
                }
            }
        }
        let erased_groups: BTreeSet<usize> = erased.iter().map(|&j| self.group(j)).collect();
        let mut order: Vec<usize> = (0..l).collect();
        order.sort_by_key(|&i| {
            erased_groups
                .iter()
                .filter(|&&e| self.digits.digit(i, e) == 0)
                .count()
        });
        let points: Vec<FieldElement> = erased.iter().map(|&j| self.lambdas[j].clone()).collect();
        check_distinct(&points)?;
        for &i in &order {
            // everything already known, per check t
            let mut known = vec![self.ctx.zero(); r];
            for j in 0..self.n {
                let e = self.group(j);
                let coupled = self.digits.digit(i, e) == 0;
                let is_erased = received[j].is_none();
                for (t, acc) in known.iter_mut().enumerate() {
                    if !is_erased {
                        *acc += &(&self.lam_pows[j][t] * cw.get(j, i));
                    }
                    if coupled {
                        for p in 1..self.s() {
                            let row = self.digits.with_digit(i, e, p);
                            *acc += &(&self.mu_pows[p - 1][t] * cw.get(j, row));
                        }
                    }
                }
            }
            let m = erased.len();
            if m > 0 {
                let rhs: Vec<FieldElement> = known[..m].iter().map(|x| -x).collect();
                let vals = vandermonde_solve(&self.ctx, &points, &rhs)?;
                for (&j, v) in erased.iter().zip(vals) {
                    cw.set(j, i, v);
                }
            }
            for (t, k) in known.iter().enumerate().skip(m) {
                let mut acc = k.clone();
                for &j in &erased {
                    acc += &(&self.lam_pows[j][t] * cw.get(j, i));
                }
                if !acc.is_zero() {
                    return Err(CodeError::Inconsistent);
                }
            }
        }
        Ok(cw)
    }

    /// Repairs `failed` from helper groups. Each helper group sends, for every
    /// row `i` with digit `e1` equal to 0, the sum of its nodes' symbols in
    /// row `i`; for `u = 1` that is the symbol itself.
    pub(crate) fn repair<C: RepairableCode>(
        &self,
        code: &C,
        cw: &Codeword,
        failed: usize,
        helpers: &[usize],
    ) -> Result<(Vec<FieldElement>, RepairTranscript), CodeError> {
        let mut session = RepairSession::new(code, cw, failed, helpers)?;
        let u = self.u;
        let s = self.s();
        let l = self.rows();
        let e1 = failed / u;
        let helper_groups = session.helpers().to_vec();
        let others: Vec<usize> = (0..self.groups())
            .filter(|e| *e != e1 && !helper_groups.contains(e))
            .collect();
        let w_count = self.repair_checks();
        let alpha: Vec<FieldElement> = (0..self.groups())
            .map(|e| self.lambdas[e * u].pow_u64(u as u64))
            .collect();
        let nu: Vec<FieldElement> = self.mus.iter().map(|m| m.pow_u64(u as u64)).collect();
        let alpha_pows: Vec<Vec<FieldElement>> = alpha.iter().map(|a| power_table(a, w_count)).collect();
        let nu_pows: Vec<Vec<FieldElement>> = nu.iter().map(|a| power_table(a, w_count)).collect();

        let rows_i: Vec<usize> = (0..l).filter(|&i| self.digits.digit(i, e1) == 0).collect();
        // pi[e][i]: sum over group e of row i
        let mut pi: Vec<Vec<Option<FieldElement>>> = vec![vec![None; l]; self.groups()];
        for &e in &helper_groups {
            for &i in &rows_i {
                let mut acc = self.ctx.zero();
                for g in 0..u {
                    acc += &session.read_helper(e * u + g, i);
                }
                pi[e][i] = Some(session.send(e, acc));
            }
        }

        let mut order = rows_i.clone();
        order.sort_by_key(|&i| others.iter().filter(|&&e| self.digits.digit(i, e) == 0).count());
        let mut points: Vec<FieldElement> = vec![alpha[e1].clone()];
        points.extend(nu.iter().cloned());
        points.extend(others.iter().map(|&e| alpha[e].clone()));
        debug_assert_eq!(points.len(), w_count);

        let get = |pi: &Vec<Vec<Option<FieldElement>>>, e: usize, i: usize| -> FieldElement {
            pi[e][i].clone().expect("aggregate available by peeling order")
        };
        for &i in &order {
            let mut rhs = vec![self.ctx.zero(); w_count];
            for (w, slot) in rhs.iter_mut().enumerate() {
                let mut acc = self.ctx.zero();
                for &e in &helper_groups {
                    acc += &(&alpha_pows[e][w] * &get(&pi, e, i));
                }
                for &e in helper_groups.iter().chain(&others) {
                    if self.digits.digit(i, e) == 0 {
                        for p in 1..s {
                            let row = self.digits.with_digit(i, e, p);
                            acc += &(&nu_pows[p - 1][w] * &get(&pi, e, row));
                        }
                    }
                }
                *slot = -acc;
            }
            let sol = vandermonde_solve(&self.ctx, &points, &rhs)?;
            let mut it = sol.into_iter();
            pi[e1][i] = it.next();
            for p in 1..s {
                pi[e1][self.digits.with_digit(i, e1, p)] = it.next();
            }
            for &e in &others {
                pi[e][i] = it.next();
            }
        }

        let mut column = Vec::with_capacity(l);
        for i in 0..l {
            let mut v = get(&pi, e1, i);
            for g in (0..u).filter(|&g| e1 * u + g != failed) {
                v -= &session.read_local(e1 * u + g, i);
            }
            column.push(v);
        }
        Ok((column, session.finish()))
    }
}
