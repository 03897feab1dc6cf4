//! Scalar Reed-Solomon code with trace-based rack repair.
//!
//! The big field `K = GF(q^l)`, `l = s̄ * p_1 * ... * p_n̄`, holds one symbol per
//! node. Rack `i` evaluates at `λ_i * λ^g` (`g < u`) where `λ_i` has degree
//! `p_i` over GF(q) and `λ` has order `u` in GF(q). Because `λ^u = 1`, the dual
//! checks `t = u*w` see every node of rack `i` through the same multiplier
//! `λ_i^(uw)`, and that multiplier lies in the subfield `F_i*` of degree
//! `∏_{m≠i*} p_m` whenever `i != i*`. Helper racks therefore send `p_i*`
//! traces into `F_i*` and the host rack rebuilds its aggregate from the trace
//! values against a basis of `K` over `F_i*`.
//!
//! One flat field represents the whole tower; subfields are named by their
//! degree over the prime field.

use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    check_data, check_shape, erased_positions, CodeError, Codeword, Family, RackParams, RepairSession,
    RepairTranscript, RepairableCode,
};
use crate::ffield::primes::{prime_power, smallest_prime_one_mod};
use crate::ffield::{FieldCtx, FieldElement, TraceMap};
use crate::linalg::{check_distinct, Matrix};

/// Largest `l` built unless the caller raises the ceiling.
pub const DEFAULT_MAX_L: usize = 1024;

/// Draws allowed per rack when searching for `λ_i`.
const LAMBDA_DRAWS: usize = 256;

/// Parameters that, together with the field modulus, fix an [`RsCode`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RsParams {
    pub q: u64,
    pub rack: RackParams,
    pub seed: u64,
}

#[derive(Debug)]
pub struct RsCode {
    params: RsParams,
    primes: Vec<u64>,
    l: usize,
    max_l: usize,
    /// Degree of GF(q) over the prime field.
    q_degree: usize,
    ctx: FieldCtx,
    lambda: FieldElement,
    rack_lambdas: Vec<FieldElement>,
    mu: FieldElement,
    points: Vec<FieldElement>,
    multipliers: Vec<FieldElement>,
    spaces: Vec<OnceLock<Result<RepairSpace, CodeError>>>,
}

/// The repair subspace for one host rack and what is needed to invert the
/// trace values it produces.
#[derive(Debug)]
pub struct RepairSpace {
    host: usize,
    /// `e_1..e_p` spanning the subspace over `F_i*`.
    basis: Vec<FieldElement>,
    /// `e_m * x^w` for `w < s̄`, `m < p`, at index `w*p + m`.
    probes: Vec<FieldElement>,
    /// Reference basis `x^a μ^t` of `K` over `F_i*`.
    reference: Vec<FieldElement>,
    /// Inverse of `Tr(probe_r * reference_c)`.
    pairing_inv: Matrix,
    trace: TraceMap,
}

impl RepairSpace {
    pub fn host(&self) -> usize {
        self.host
    }

    pub fn basis(&self) -> &[FieldElement] {
        &self.basis
    }

    pub fn probes(&self) -> &[FieldElement] {
        &self.probes
    }

    /// Degree of `F_i*` over the prime field.
    pub fn subfield_degree(&self) -> usize {
        self.trace.sub_degree()
    }

    pub fn trace(&self, x: &FieldElement) -> FieldElement {
        self.trace.apply(x)
    }

    /// Recovers `X` from `Tr(probe_r * X)` for every probe.
    fn invert(&self, values: &[FieldElement]) -> Result<FieldElement, CodeError> {
        let coef = self.pairing_inv.mul_vec(values)?;
        let ctx = self.pairing_inv.ctx();
        let mut x = ctx.zero();
        for (c, w) in coef.iter().zip(&self.reference) {
            x += &(c * w);
        }
        Ok(x)
    }
}

/// Rank over `K` of `Tr(a_r * b_c)`. For entries in `F_i*` this equals the
/// rank over `F_i*`.
fn pairing(trace: &TraceMap, ctx: &FieldCtx, a: &[FieldElement], b: &[FieldElement]) -> Matrix {
    let mut m = Matrix::zeros(ctx, a.len(), b.len());
    for (r, x) in a.iter().enumerate() {
        for (c, y) in b.iter().enumerate() {
            m.set(r, c, trace.apply(&(x * y)));
        }
    }
    m
}

impl RsCode {
    pub fn build(params: RsParams) -> Result<Self, CodeError> {
        Self::build_with_ceiling(params, DEFAULT_MAX_L)
    }

    /// Builds the code, refusing sub-packetization above `max_l`.
    pub fn build_with_ceiling(params: RsParams, max_l: usize) -> Result<Self, CodeError> {
        let (p, a, primes, l) = shape(&params, max_l)?;
        let ctx = FieldCtx::extension(p, a * l)?;
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let q_big = num_bigint::BigUint::from(params.q);
        let u = params.rack.rack_size as u64;
        let mut rack_lambdas = Vec::with_capacity(primes.len());
        for &pi in &primes {
            // y^((Q-1)/(q^p_i - 1)) lands in GF(q^p_i)
            let sub_order = q_big.pow(pi as u32) - 1u32;
            let cofactor = ctx.group_order() / &sub_order;
            let mut found = None;
            for _ in 0..LAMBDA_DRAWS {
                let z = ctx.random_nonzero(&mut rng).pow(&cofactor);
                let zu = z.pow_u64(u);
                if z.pow(&q_big) != z && zu.pow(&q_big) != zu {
                    found = Some(z);
                    break;
                }
            }
            let z = found.ok_or_else(|| {
                CodeError::Construction(format!("no λ of degree {pi} found in {LAMBDA_DRAWS} draws"))
            })?;
            rack_lambdas.push(z);
        }
        Self::from_parts(params, ctx, rack_lambdas, max_l)
    }

    /// Rebuilds the code from a field and the rack elements `λ_i`, checking
    /// every structural requirement.
    pub fn from_parts(
        params: RsParams,
        ctx: FieldCtx,
        rack_lambdas: Vec<FieldElement>,
        max_l: usize,
    ) -> Result<Self, CodeError> {
        let (p, a, primes, l) = shape(&params, max_l)?;
        if ctx.characteristic() != p || ctx.degree() != a * l {
            return Err(CodeError::InvalidParameters(format!(
                "field must be GF({p}^{}), got {:?}",
                a * l,
                ctx
            )));
        }
        let u = params.rack.rack_size;
        if rack_lambdas.len() != primes.len() {
            return Err(CodeError::InvalidParameters(format!(
                "need {} rack elements, got {}",
                primes.len(),
                rack_lambdas.len()
            )));
        }
        let q_big = num_bigint::BigUint::from(params.q);
        for (z, &pi) in rack_lambdas.iter().zip(&primes) {
            if !z.ctx().same_field(&ctx) || !z.in_subfield(a * pi as usize) || z.pow(&q_big) == *z {
                return Err(CodeError::Construction(format!("λ_i = {z} does not have degree {pi} over GF(q)")));
            }
            let zu = z.pow_u64(u as u64);
            if zu.pow(&q_big) == zu {
                return Err(CodeError::Construction(format!("λ_i^u for λ_i = {z} lies in GF(q)")));
            }
        }
        let lambda = ctx.element_of_order(u as u64)?;
        let mu = ctx
            .variable()
            .ok_or_else(|| CodeError::Construction("big field has no generator variable".into()))?;
        let f_degree = a * primes.iter().product::<u64>() as usize;
        if s_bar_of(&params) > 1 && mu.in_subfield(f_degree) {
            return Err(CodeError::Construction("μ lies in F".into()));
        }
        let mut points = Vec::with_capacity(params.rack.n());
        for z in &rack_lambdas {
            let mut y = z.clone();
            for _ in 0..u {
                points.push(y.clone());
                y = &y * &lambda;
            }
        }
        check_distinct(&points)?;
        let mut multipliers = Vec::with_capacity(points.len());
        for (j, x) in points.iter().enumerate() {
            let mut prod = ctx.one();
            for (jj, y) in points.iter().enumerate() {
                if jj != j {
                    prod = &prod * &(x - y);
                }
            }
            multipliers.push(prod.inv()?);
        }
        let spaces = (0..primes.len()).map(|_| OnceLock::new()).collect();
        Ok(RsCode {
            params,
            primes,
            l,
            max_l,
            q_degree: a,
            ctx,
            lambda,
            rack_lambdas,
            mu,
            points,
            multipliers,
            spaces,
        })
    }

    pub fn params(&self) -> RsParams {
        self.params
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Sub-packetization `l` over GF(q).
    pub fn l(&self) -> usize {
        self.l
    }

    /// The ceiling the code was built under.
    pub fn max_l(&self) -> usize {
        self.max_l
    }

    pub fn lambda(&self) -> &FieldElement {
        &self.lambda
    }

    pub fn rack_lambdas(&self) -> &[FieldElement] {
        &self.rack_lambdas
    }

    pub fn mu(&self) -> &FieldElement {
        &self.mu
    }

    pub fn points(&self) -> &[FieldElement] {
        &self.points
    }

    /// Dual multipliers `a_j = ∏_{j'≠j} (λ_j - λ_j')^(-1)`.
    pub fn multipliers(&self) -> &[FieldElement] {
        &self.multipliers
    }

    /// Evaluates the message polynomial `Σ m_t x^t` at every point.
    pub fn evaluate(&self, message: &[FieldElement]) -> Result<Codeword, CodeError> {
        if message.len() != self.params.rack.k {
            return Err(CodeError::Dimension(format!(
                "message must hold {} coefficients",
                self.params.rack.k
            )));
        }
        let cols = self
            .points
            .iter()
            .map(|x| {
                let mut acc = self.ctx.zero();
                for m in message.iter().rev() {
                    acc = &(&acc * x) + m;
                }
                vec![acc]
            })
            .collect();
        Codeword::from_columns(cols)
    }

    /// `h(x) = ∏ (x - λ_j)` over the nodes of racks outside `helpers ∪ {host}`.
    pub fn annihilator_at(&self, host: usize, helpers: &[usize], x: &FieldElement) -> FieldElement {
        let u = self.params.rack.rack_size;
        let mut acc = self.ctx.one();
        for (j, y) in self.points.iter().enumerate() {
            let rack = j / u;
            if rack != host && !helpers.contains(&rack) {
                acc = &acc * &(x - y);
            }
        }
        acc
    }

    /// The repair subspace for host rack `host`, built and rank-checked on
    /// first use.
    pub fn repair_space(&self, host: usize) -> Result<&RepairSpace, CodeError> {
        if host >= self.primes.len() {
            return Err(CodeError::InvalidParameters(format!("rack {host} out of range")));
        }
        self.spaces[host]
            .get_or_init(|| self.build_space(host))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn build_space(&self, host: usize) -> Result<RepairSpace, CodeError> {
        let sb = s_bar_of(&self.params);
        let p = self.primes[host] as usize;
        let u = self.params.rack.rack_size as u64;
        let sub: usize = self.q_degree
            * self
                .primes
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != host)
                .map(|(_, &pm)| pm as usize)
                .product::<usize>();
        let trace = TraceMap::new(&self.ctx, sub)?;
        let x = self.rack_lambdas[host].pow_u64(u);
        let x_pows: Vec<FieldElement> = (0..p).scan(self.ctx.one(), |acc, _| {
            let cur = acc.clone();
            *acc = &*acc * &x;
            Some(cur)
        })
        .collect();
        let mu_pows: Vec<FieldElement> = (0..sb).scan(self.ctx.one(), |acc, _| {
            let cur = acc.clone();
            *acc = &*acc * &self.mu;
            Some(cur)
        })
        .collect();

        let mut basis = Vec::with_capacity(p);
        for e in 0..(p - 1) / sb {
            for (t, mt) in mu_pows.iter().enumerate() {
                basis.push(mt * &x_pows[t + e * sb]);
            }
        }
        let mut tail = self.ctx.zero();
        for mt in &mu_pows {
            tail += &(mt * &x_pows[p - 1]);
        }
        basis.push(tail);

        let mut probes = Vec::with_capacity(sb * p);
        let mut xw = self.ctx.one();
        for _ in 0..sb {
            probes.extend(basis.iter().map(|e| e * &xw));
            xw = &xw * &x;
        }
        let reference: Vec<FieldElement> = mu_pows
            .iter()
            .flat_map(|mt| x_pows.iter().map(move |xa| mt * xa))
            .collect();

        let dim = sb * p;
        if pairing(&trace, &self.ctx, &reference, &reference).rank() != dim {
            return Err(CodeError::Construction(format!(
                "x^a μ^t is not a basis of K over F_{host}"
            )));
        }
        let pairing_mat = pairing(&trace, &self.ctx, &probes, &reference);
        if pairing_mat.rank() != dim {
            return Err(CodeError::Construction(format!(
                "repair subspace for rack {host} and its shifts by λ_i^(uw) do not span K"
            )));
        }
        let pairing_inv = pairing_mat.inverse()?;
        Ok(RepairSpace {
            host,
            basis,
            probes,
            reference,
            pairing_inv,
            trace,
        })
    }

    /// Interpolates the unique codeword through the listed known positions.
    fn interpolate(&self, known: &[(usize, FieldElement)]) -> Result<Codeword, CodeError> {
        let mut cols = Vec::with_capacity(self.points.len());
        for (j, x) in self.points.iter().enumerate() {
            if let Some((_, v)) = known.iter().find(|(jj, _)| *jj == j) {
                cols.push(vec![v.clone()]);
                continue;
            }
            let mut acc = self.ctx.zero();
            for (s, (js, vs)) in known.iter().enumerate() {
                let mut num = self.ctx.one();
                let mut den = self.ctx.one();
                for (t, (jt, _)) in known.iter().enumerate() {
                    if s != t {
                        num = &num * &(x - &self.points[*jt]);
                        den = &den * &(&self.points[*js] - &self.points[*jt]);
                    }
                }
                acc += &(&(vs * &num) * &den.inv()?);
            }
            cols.push(vec![acc]);
        }
        Codeword::from_columns(cols)
    }
}

fn s_bar_of(params: &RsParams) -> usize {
    params.rack.s_bar()
}

/// Validates `params` and returns the characteristic, `[GF(q):GF(p)]`, the
/// primes `p_i` and `l`.
fn shape(params: &RsParams, max_l: usize) -> Result<(u64, usize, Vec<u64>, usize), CodeError> {
    let rack = params.rack;
    rack.validate()?;
    let (p, a) = prime_power(params.q)
        .ok_or_else(|| CodeError::InvalidParameters(format!("q = {} is not a prime power", params.q)))?;
    let u = rack.rack_size as u64;
    if !(params.q - 1).is_multiple_of(u) {
        return Err(CodeError::InvalidParameters(format!(
            "rack size u = {u} does not divide q - 1 = {}",
            params.q - 1
        )));
    }
    let sb = rack.s_bar() as u64;
    let mut primes = Vec::with_capacity(rack.racks);
    let mut next = u + 1;
    let mut l: u128 = sb as u128;
    for _ in 0..rack.racks {
        let pi = smallest_prime_one_mod(sb, next);
        primes.push(pi);
        next = pi + 1;
        l *= pi as u128;
        if l > max_l as u128 {
            return Err(CodeError::InvalidParameters(format!(
                "sub-packetization exceeds the ceiling {max_l}"
            )));
        }
    }
    Ok((p, a as usize, primes, l as usize))
}

impl RepairableCode for RsCode {
    fn family(&self) -> Family {
        Family::Rs
    }

    fn field(&self) -> &FieldCtx {
        &self.ctx
    }

    fn length(&self) -> usize {
        self.params.rack.n()
    }

    fn dimension(&self) -> usize {
        self.params.rack.k
    }

    fn rows(&self) -> usize {
        1
    }

    fn rack_size(&self) -> usize {
        self.params.rack.rack_size
    }

    fn repair_degree(&self) -> usize {
        self.params.rack.helpers
    }

    fn s_bar(&self) -> usize {
        s_bar_of(&self.params)
    }

    /// One `K`-symbol is `l` symbols of GF(q).
    fn node_size(&self) -> u64 {
        self.l as u64
    }

    /// `Σ_j a_j λ_j^t c_j = 0` for `t < n - k`.
    fn parity_equations(&self) -> Vec<Vec<(usize, usize, FieldElement)>> {
        let r = self.params.rack.r();
        let mut pows: Vec<FieldElement> = self.multipliers.clone();
        let mut eqs = Vec::with_capacity(r);
        for _ in 0..r {
            eqs.push(pows.iter().enumerate().map(|(j, c)| (j, 0, c.clone())).collect());
            for (c, x) in pows.iter_mut().zip(&self.points) {
                *c = &*c * x;
            }
        }
        eqs
    }

    /// Systematic encoding: the first `k` symbols are the data.
    fn encode(&self, data: &[Vec<FieldElement>]) -> Result<Codeword, CodeError> {
        check_data(self, data)?;
        let known: Vec<(usize, FieldElement)> = data.iter().map(|c| c[0].clone()).enumerate().collect();
        self.interpolate(&known)
    }

    fn erasure_decode(&self, received: &[Option<Vec<FieldElement>>]) -> Result<Codeword, CodeError> {
        let erased = erased_positions(self, received, self.params.rack.r())?;
        let present: Vec<(usize, FieldElement)> = (0..received.len())
            .filter(|j| !erased.contains(j))
            .map(|j| (j, received[j].as_ref().expect("present")[0].clone()))
            .collect();
        let cw = self.interpolate(&present[..self.params.rack.k])?;
        if present.iter().any(|(j, v)| cw.get(*j, 0) != v) {
            return Err(CodeError::Inconsistent);
        }
        Ok(cw)
    }

    fn repair(
        &self,
        cw: &Codeword,
        failed: usize,
        helpers: &[usize],
    ) -> Result<(Vec<FieldElement>, RepairTranscript), CodeError> {
        check_shape(self, cw)?;
        let mut session = RepairSession::new(self, cw, failed, helpers)?;
        let u = self.params.rack.rack_size;
        let host = failed / u;
        let space = self.repair_space(host)?;
        let sb = self.s_bar();
        let p = self.primes[host] as usize;
        let helper_racks = session.helpers().to_vec();
        // F_i*-symbols are worth [F_i* : GF(q)] base symbols
        let sub_over_q = (space.subfield_degree() / self.q_degree) as u64;
        session.set_weights(sub_over_q, self.l as u64);

        // downloads[rack][m] = Σ_g h(λ_ig) Tr(e_m a_ig c_ig)
        let mut downloads = Vec::with_capacity(helper_racks.len());
        for &i in &helper_racks {
            let weighted: Vec<(FieldElement, FieldElement)> = (0..u)
                .map(|g| {
                    let j = i * u + g;
                    let c = session.read_helper(j, 0);
                    let h = self.annihilator_at(host, &helper_racks, &self.points[j]);
                    (h, &self.multipliers[j] * &c)
                })
                .collect();
            let mut sent = Vec::with_capacity(p);
            for e in space.basis() {
                let mut acc = self.ctx.zero();
                for (h, ac) in &weighted {
                    acc += &(h * &space.trace(&(e * ac)));
                }
                sent.push(session.send(i, acc));
            }
            downloads.push(sent);
        }

        // Tr(e_m x^w X) = -Σ_i λ_i^(uw) D_{i,m}
        let mut values = Vec::with_capacity(sb * p);
        let lam_u: Vec<FieldElement> = helper_racks
            .iter()
            .map(|&i| self.rack_lambdas[i].pow_u64(u as u64))
            .collect();
        let mut lam_uw: Vec<FieldElement> = vec![self.ctx.one(); helper_racks.len()];
        for _ in 0..sb {
            for m in 0..p {
                let mut acc = self.ctx.zero();
                for (d, lw) in downloads.iter().zip(&lam_uw) {
                    acc -= &(lw * &d[m]);
                }
                values.push(acc);
            }
            for (lw, lu) in lam_uw.iter_mut().zip(&lam_u) {
                *lw = &*lw * lu;
            }
        }
        let aggregate = space.invert(&values)?;

        let mut rest = aggregate;
        for g in 0..u {
            let j = host * u + g;
            if j == failed {
                continue;
            }
            let c = session.read_local(j, 0);
            let h = self.annihilator_at(host, &helper_racks, &self.points[j]);
            rest -= &(&(&self.multipliers[j] * &h) * &c);
        }
        let h_failed = self.annihilator_at(host, &helper_racks, &self.points[failed]);
        assert!(!h_failed.is_zero(), "annihilator vanishes on the host rack");
        let value = rest.checked_div(&(&self.multipliers[failed] * &h_failed))?;
        Ok((vec![value], session.finish()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{decode_by_elimination, helper_sets, random_codeword};
    use itertools::Itertools;

    fn params(q: u64, racks: usize, rack_size: usize, k: usize, helpers: usize) -> RsParams {
        RsParams {
            q,
            rack: RackParams {
                racks,
                rack_size,
                k,
                helpers,
            },
            seed: 7,
        }
    }

    fn reference() -> RsParams {
        params(3, 3, 2, 3, 2)
    }

    #[test]
    fn validation() {
        assert_eq!(shape(&params(4, 3, 3, 3, 2), DEFAULT_MAX_L).unwrap().2, vec![5, 7, 11]);
        assert!(RsCode::build(params(4, 3, 2, 3, 2)).is_err());
        assert!(RsCode::build(params(6, 3, 1, 2, 2)).is_err());
        assert!(RsCode::build_with_ceiling(reference(), 100).is_err());
    }

    #[test]
    fn reference_shape() {
        let c = RsCode::build(reference()).unwrap();
        assert_eq!(c.primes(), &[3, 5, 7]);
        assert_eq!(c.l(), 210);
        assert_eq!(c.field().degree(), 210);
        assert_eq!(c.lambda(), &c.field().constant(2));
        for (z, &p) in c.rack_lambdas().iter().zip(c.primes()) {
            assert_eq!(z.element_degree(), p as usize);
        }
    }

    #[test]
    fn degenerate_shape() {
        let c = RsCode::build(params(3, 2, 2, 2, 1)).unwrap();
        assert_eq!(c.primes(), &[3, 5]);
        assert_eq!(c.l(), 15);
        assert!(c.degenerate());
        let sp = c.repair_space(0).unwrap();
        let x = c.rack_lambdas()[0].pow_u64(2);
        let expect: Vec<FieldElement> = (0..3).map(|e| x.pow_u64(e)).collect();
        assert_eq!(sp.basis(), &expect[..]);
    }

    #[test]
    fn degenerate_repair_downloads_everything() {
        let c = RsCode::build(params(3, 2, 2, 2, 1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cw = random_codeword(&c, &mut rng).unwrap();
        assert!(c.parity_check(&cw));
        for failed in 0..4 {
            for helpers in helper_sets(&c, failed) {
                let (col, tr) = c.repair(&cw, failed, &helpers).unwrap();
                assert_eq!(col, cw.column(failed));
                assert_eq!(tr.bandwidth(), c.l() as u64);
            }
        }
    }

    #[test]
    fn interpolation_oracle_and_decoders() {
        let c = RsCode::build(reference()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let msg: Vec<FieldElement> = (0..3).map(|_| c.field().random(&mut rng)).collect();
        let cw = c.evaluate(&msg).unwrap();
        assert!(c.parity_check(&cw));
        for pattern in (0..6).combinations(3) {
            let rx = cw.erase(&pattern);
            assert_eq!(c.erasure_decode(&rx).unwrap(), cw);
        }
        assert_eq!(decode_by_elimination(&c, &cw.erase(&[0, 4, 5])).unwrap(), cw);
        let one = c.evaluate(&[c.field().one(), c.field().zero(), c.field().zero()]).unwrap();
        assert!(one.columns().iter().all(|col| col[0].is_one()));
        let mut bad = cw.clone();
        bad.set(2, 0, cw.get(2, 0) + &c.field().one());
        assert_eq!(c.erasure_decode(&bad.erase(&[0])), Err(CodeError::Inconsistent));
    }

    #[test]
    fn dual_vectors_annihilate_codewords() {
        let c = RsCode::build(reference()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cw = random_codeword(&c, &mut rng).unwrap();
        for host in 0..3 {
            for helpers in helper_sets(&c, host * 2) {
                for w in 0..c.s_bar() as u64 {
                    let mut acc = c.field().zero();
                    for (j, x) in c.points().iter().enumerate() {
                        let h = c.annihilator_at(host, &helpers, x);
                        acc += &(&(&(&c.multipliers()[j] * &x.pow_u64(2 * w)) * &h) * cw.get(j, 0));
                    }
                    assert!(acc.is_zero());
                }
            }
        }
    }

    #[test]
    fn reference_repair() {
        let c = RsCode::build(reference()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cw = random_codeword(&c, &mut rng).unwrap();
        for failed in 0..6 {
            for helpers in helper_sets(&c, failed) {
                let (col, tr) = c.repair(&cw, failed, &helpers).unwrap();
                assert_eq!(col, cw.column(failed));
                assert_eq!(tr.bandwidth(), 210);
                let p = c.primes()[failed / 2];
                assert_eq!(tr.downloaded_symbols(), 2 * p);
                assert_eq!(c.repair_space(failed / 2).unwrap().basis().len() as u64, p);
            }
        }
    }

    #[test]
    fn trace_probes_separate_points() {
        let c = RsCode::build(params(3, 2, 2, 2, 1)).unwrap();
        let sp = c.repair_space(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x = c.field().random_nonzero(&mut rng);
            assert!(sp.probes().iter().any(|b| !sp.trace(&(b * &x)).is_zero()));
            let vals: Vec<FieldElement> = sp.probes().iter().map(|b| sp.trace(&(b * &x))).collect();
            assert_eq!(sp.invert(&vals).unwrap(), x);
        }
    }

    #[test]
    fn zero_codeword_sends_zeros() {
        let c = RsCode::build(params(3, 2, 2, 2, 1)).unwrap();
        let cw = Codeword::zeros(c.field(), 4, 1);
        let (col, tr) = c.repair(&cw, 1, &[1]).unwrap();
        assert!(col[0].is_zero());
        assert!(tr.downloads.values().flatten().all(FieldElement::is_zero));
    }
}
