//! Code constructions and the machinery they share: codewords, repair
//! transcripts, helper access metering and a generic elimination decoder.
//!
//! Indexing is 0-based throughout. Node `j` of a rack-aware code sits in rack
//! `j / u` at position `j % u`; a codeword is stored column-major, one column
//! of `l` symbols per node.

pub mod c1;
pub mod c3;
mod coupled;
pub(crate) mod digits;
pub mod oa;
pub mod rs;


use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ffield::{FieldCtx, FieldElement, FieldError};
use crate::linalg::{LinalgError, Matrix};

pub use c1::C1Code;
pub use c3::C3Code;
pub use oa::OaCode;
pub use rs::{RsCode, RsParams};


#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{erased} erased nodes exceed the {max} the code can correct")]
    TooManyErasures { erased: usize, max: usize },
    #[error("received word is inconsistent with the code")]
    Inconsistent,
    #[error("invalid helper set: {0}")]
    BadHelpers(String),
    #[error("construction check failed: {0}")]
    Construction(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    C1,
    C2,
    C3,
    Rs,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::C1 => "C1",
            Family::C2 => "C2",
            Family::C3 => "C3",
            Family::Rs => "RS",
        })
    }
}

impl FromStr for Family {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "c1" => Ok(Family::C1),
            "c2" | "oa" => Ok(Family::C2),
            "c3" => Ok(Family::C3),
            "rs" => Ok(Family::Rs),
            other => Err(CodeError::InvalidParameters(format!("unknown code family {other:?}"))),
        }
    }
}

/// Rack-model parameters and the quantities derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RackParams {
    pub racks: usize,
    pub rack_size: usize,
    pub k: usize,
    pub helpers: usize,
}

impl RackParams {
    pub fn n(&self) -> usize {
        self.racks * self.rack_size
    }

    pub fn r(&self) -> usize {
        self.n() - self.k
    }

    pub fn k_bar(&self) -> usize {
        self.k / self.rack_size
    }

    pub fn v(&self) -> usize {
        self.k % self.rack_size
    }

    pub fn r_bar(&self) -> usize {
        self.racks - self.k_bar()
    }

    pub fn s_bar(&self) -> usize {
        self.helpers + 1 - self.k_bar()
    }

    /// Checks `1 <= u <= k < n` and `k̄ <= d̄ <= n̄ - 1`.
    pub fn validate(&self) -> Result<(), CodeError> {
        let bad = |m: String| Err(CodeError::InvalidParameters(m));
        if self.racks < 2 || self.rack_size == 0 {
            return bad(format!(
                "need at least two racks of positive size, got {} racks of size {}",
                self.racks, self.rack_size
            ));
        }
        if self.rack_size > self.k {
            return bad(format!("rack size u={} exceeds k={}", self.rack_size, self.k));
        }
        if self.k >= self.n() {
            return bad(format!("k={} must be below n={}", self.k, self.n()));
        }
        if self.helpers < self.k_bar() {
            return bad(format!(
                "helper racks d̄={} below k̄=⌊k/u⌋={}",
                self.helpers,
                self.k_bar()
            ));
        }
        if self.helpers > self.racks - 1 {
            return bad(format!(
                "helper racks d̄={} above n̄-1={}",
                self.helpers,
                self.racks - 1
            ));
        }
        Ok(())
    }
}

/// An `l × n` array, stored as `n` columns of `l` symbols.
#[derive(Clone, PartialEq, Eq)]
pub struct Codeword {
    cols: Vec<Vec<FieldElement>>,
}

impl Codeword {
    pub fn from_columns(cols: Vec<Vec<FieldElement>>) -> Result<Self, CodeError> {
        let l = cols.first().map_or(0, |c| c.len());
        if cols.iter().any(|c| c.len() != l) {
            return Err(CodeError::Dimension("columns of unequal length".into()));
        }
        Ok(Codeword { cols })
    }

    pub fn zeros(ctx: &FieldCtx, n: usize, l: usize) -> Self {
        Codeword {
            cols: vec![vec![ctx.zero(); l]; n],
        }
    }

    pub fn n(&self) -> usize {
        self.cols.len()
    }

    pub fn l(&self) -> usize {
        self.cols.first().map_or(0, |c| c.len())
    }

    pub fn column(&self, j: usize) -> &[FieldElement] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[Vec<FieldElement>] {
        &self.cols
    }

    pub fn get(&self, node: usize, row: usize) -> &FieldElement {
        &self.cols[node][row]
    }

    pub fn set(&mut self, node: usize, row: usize, v: FieldElement) {
        self.cols[node][row] = v;
    }

    /// Every column present, for feeding a decoder.
    pub fn to_received(&self) -> Vec<Option<Vec<FieldElement>>> {
        self.cols.iter().cloned().map(Some).collect()
    }

    /// The received word with the listed columns erased.
    pub fn erase(&self, nodes: &[usize]) -> Vec<Option<Vec<FieldElement>>> {
        self.cols
            .iter()
            .enumerate()
            .map(|(j, c)| if nodes.contains(&j) { None } else { Some(c.clone()) })
            .collect()
    }
}

impl fmt::Debug for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.l() {
            let row: Vec<String> = self.cols.iter().map(|c| c[i].to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// What one repair moved and read.
///
/// `downloads` holds the symbols each helper unit (rack, or node for the
/// homogeneous code) sent across rack boundaries. `accessed` holds the rows
/// read on each helper node before any intra-rack aggregation. Reads on the
/// host rack are free in the rack model and kept apart in `local_reads`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepairTranscript {
    pub failed: usize,
    pub helpers: Vec<usize>,
    pub downloads: BTreeMap<usize, Vec<FieldElement>>,
    pub accessed: BTreeMap<usize, BTreeSet<usize>>,
    pub local_reads: BTreeMap<usize, BTreeSet<usize>>,
    /// Base-field units carried by one downloaded symbol.
    pub symbol_weight: u64,
    /// Base-field units in one accessed row.
    pub access_weight: u64,
}

impl RepairTranscript {
    pub fn downloaded_symbols(&self) -> u64 {
        self.downloads.values().map(|v| v.len() as u64).sum()
    }

    /// Repair bandwidth in base-field units.
    pub fn bandwidth(&self) -> u64 {
        self.downloaded_symbols() * self.symbol_weight
    }

    /// Per-helper-unit bandwidth in base-field units.
    pub fn per_helper(&self) -> BTreeMap<usize, u64> {
        self.downloads
            .iter()
            .map(|(&h, v)| (h, v.len() as u64 * self.symbol_weight))
            .collect()
    }

    /// Total helper-side access in base-field units.
    pub fn access(&self) -> u64 {
        self.accessed.values().map(|s| s.len() as u64).sum::<u64>() * self.access_weight
    }

    pub fn per_node_access(&self) -> BTreeMap<usize, u64> {
        self.accessed
            .iter()
            .map(|(&node, s)| (node, s.len() as u64 * self.access_weight))
            .collect()
    }
}

/// Metered view of the surviving nodes during one repair.
///
/// Helper reads are logged per node and row; the repair procedure returns
/// only what it explicitly `send`s, so reconstruction cannot peek at helper
/// data it did not pay for.
pub(crate) struct RepairSession<'a> {
    cw: &'a Codeword,
    rack_size: usize,
    host: usize,
    transcript: RepairTranscript,
}

impl<'a> RepairSession<'a> {
    pub(crate) fn new(
        code: &dyn RepairableCode,
        cw: &'a Codeword,
        failed: usize,
        helpers: &[usize],
    ) -> Result<Self, CodeError> {
        check_shape(code, cw)?;
        let units = code.length() / code.rack_size();
        if failed >= code.length() {
            return Err(CodeError::BadHelpers(format!(
                "failed node {failed} out of range 0..{}",
                code.length()
            )));
        }
        let host = failed / code.rack_size();
        let mut sorted = helpers.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != helpers.len() {
            return Err(CodeError::BadHelpers("repeated helper".into()));
        }
        if sorted.len() != code.repair_degree() {
            return Err(CodeError::BadHelpers(format!(
                "need exactly {} helpers, got {}",
                code.repair_degree(),
                sorted.len()
            )));
        }
        if let Some(&h) = sorted.iter().find(|&&h| h >= units) {
            return Err(CodeError::BadHelpers(format!("helper {h} out of range 0..{units}")));
        }
        if sorted.contains(&host) {
            return Err(CodeError::BadHelpers(format!(
                "helper set contains the host {} of failed node {failed}",
                host
            )));
        }
        Ok(RepairSession {
            cw,
            rack_size: code.rack_size(),
            host,
            transcript: RepairTranscript {
                failed,
                helpers: sorted,
                downloads: BTreeMap::new(),
                accessed: BTreeMap::new(),
                local_reads: BTreeMap::new(),
                symbol_weight: 1,
                access_weight: 1,
            },
        })
    }

    pub(crate) fn helpers(&self) -> &[usize] {
        &self.transcript.helpers
    }

    pub(crate) fn set_weights(&mut self, symbol_weight: u64, access_weight: u64) {
        self.transcript.symbol_weight = symbol_weight;
        self.transcript.access_weight = access_weight;
    }

    /// Reads a symbol on a helper node.
    pub(crate) fn read_helper(&mut self, node: usize, row: usize) -> FieldElement {
        let unit = node / self.rack_size;
        assert!(
            self.transcript.helpers.contains(&unit),
            "read on node {node} outside the helper set"
        );
        self.transcript.accessed.entry(node).or_default().insert(row);
        self.cw.get(node, row).clone()
    }

    /// Reads a symbol on an intact node of the host rack.
    pub(crate) fn read_local(&mut self, node: usize, row: usize) -> FieldElement {
        assert_eq!(node / self.rack_size, self.host, "local read outside the host rack");
        assert_ne!(node, self.transcript.failed, "read of the failed node");
        self.transcript.local_reads.entry(node).or_default().insert(row);
        self.cw.get(node, row).clone()
    }

    /// Records a symbol sent from a helper unit and hands it to the repairer.
    pub(crate) fn send(&mut self, unit: usize, value: FieldElement) -> FieldElement {
        self.transcript.downloads.entry(unit).or_default().push(value.clone());
        value
    }

    pub(crate) fn finish(self) -> RepairTranscript {
        self.transcript
    }
}

/// A linear code given by parity checks, with single-node repair.
pub trait RepairableCode: Send + Sync {
    fn family(&self) -> Family;
    fn field(&self) -> &FieldCtx;
    /// Number of nodes `n`.
    fn length(&self) -> usize;
    fn dimension(&self) -> usize;
    /// Symbols per node, `l` (1 for scalar codes).
    fn rows(&self) -> usize;
    /// Nodes per rack; 1 for the homogeneous model.
    fn rack_size(&self) -> usize;
    /// Helper racks (or helper nodes when `rack_size` is 1).
    fn repair_degree(&self) -> usize;
    /// `d̄ - k̄ + 1` (or `d - k + 1`).
    fn s_bar(&self) -> usize;
    /// Node size in base-field units.
    fn node_size(&self) -> u64 {
        self.rows() as u64
    }
    /// True when the repair degree makes repair trivial (`s̄ = 1`).
    fn degenerate(&self) -> bool {
        self.s_bar() == 1
    }
    /// Parity-check equations as lists of `(node, row, coefficient)`.
    fn parity_equations(&self) -> Vec<Vec<(usize, usize, FieldElement)>>;
    /// Systematic encoding: `data` holds the first `k` columns.
    fn encode(&self, data: &[Vec<FieldElement>]) -> Result<Codeword, CodeError>;
    fn erasure_decode(&self, received: &[Option<Vec<FieldElement>>]) -> Result<Codeword, CodeError>;
    /// Repairs node `failed` from the listed helper racks (helper nodes when
    /// `rack_size` is 1), returning the column and the metered transcript.
    fn repair(
        &self,
        cw: &Codeword,
        failed: usize,
        helpers: &[usize],
    ) -> Result<(Vec<FieldElement>, RepairTranscript), CodeError>;

    fn parity_check(&self, cw: &Codeword) -> bool {
        if check_shape(self, cw).is_err() {
            return false;
        }
        evaluate_checks(self.field(), &self.parity_equations(), cw)
    }

    fn racks(&self) -> usize {
        self.length() / self.rack_size()
    }
}

pub(crate) fn check_shape<C: RepairableCode + ?Sized>(code: &C, cw: &Codeword) -> Result<(), CodeError> {
    if cw.n() != code.length() || cw.l() != code.rows() {
        return Err(CodeError::Dimension(format!(
            "expected {} columns of {} symbols, got {} of {}",
            code.length(),
            code.rows(),
            cw.n(),
            cw.l()
        )));
    }
    Ok(())
}

pub(crate) fn check_data<C: RepairableCode + ?Sized>(code: &C, data: &[Vec<FieldElement>]) -> Result<(), CodeError> {
    if data.len() != code.dimension() || data.iter().any(|c| c.len() != code.rows()) {
        return Err(CodeError::Dimension(format!(
            "data must be {} columns of {} symbols",
            code.dimension(),
            code.rows()
        )));
    }
    if let Some(x) = data.iter().flatten().find(|x| !x.ctx().same_field(code.field())) {
        return Err(CodeError::Field(FieldError::ContextMismatch(
            format!("{:?}", x.ctx()),
            format!("{:?}", code.field()),
        )));
    }
    Ok(())
}

/// Splits a received word into erased positions and validates its shape.
pub(crate) fn erased_positions<C: RepairableCode + ?Sized>(
    code: &C,
    received: &[Option<Vec<FieldElement>>],
    max: usize,
) -> Result<Vec<usize>, CodeError> {
    if received.len() != code.length() {
        return Err(CodeError::Dimension(format!(
            "expected {} columns, got {}",
            code.length(),
            received.len()
        )));
    }
    if received.iter().flatten().any(|c| c.len() != code.rows()) {
        return Err(CodeError::Dimension(format!("columns must hold {} symbols", code.rows())));
    }
    let erased: Vec<usize> = (0..received.len()).filter(|&j| received[j].is_none()).collect();
    if erased.len() > max {
        return Err(CodeError::TooManyErasures {
            erased: erased.len(),
            max,
        });
    }
    Ok(erased)
}

pub(crate) fn evaluate_checks(
    ctx: &FieldCtx,
    eqs: &[Vec<(usize, usize, FieldElement)>],
    cw: &Codeword,
) -> bool {
    eqs.iter().all(|eq| {
        let mut acc = ctx.zero();
        for (node, row, coef) in eq {
            acc += &(coef * cw.get(*node, *row));
        }
        acc.is_zero()
    })
}

/// Decodes erasures by one linear solve over all parity equations.
///
/// Independent of any construction-specific structure; serves as the
/// encoder for the coupled-layer codes and as a reference decoder.
pub fn decode_by_elimination<C: RepairableCode + ?Sized>(
    code: &C,
    received: &[Option<Vec<FieldElement>>],
) -> Result<Codeword, CodeError> {
    let ctx = code.field();
    let l = code.rows();
    let erased = erased_positions(code, received, code.length() - code.dimension())?;
    let mut cw = Codeword::zeros(ctx, code.length(), l);
    for (j, col) in received.iter().enumerate() {
        if let Some(col) = col {
            for (i, x) in col.iter().enumerate() {
                cw.set(j, i, x.clone());
            }
        }
    }
    if erased.is_empty() {
        return if code.parity_check(&cw) {
            Ok(cw)
        } else {
            Err(CodeError::Inconsistent)
        };
    }
    let slot: BTreeMap<usize, usize> = erased.iter().enumerate().map(|(a, &j)| (j, a)).collect();
    let eqs = code.parity_equations();
    let unknowns = erased.len() * l;
    let mut a = Matrix::zeros(ctx, eqs.len(), unknowns);
    let mut b = Vec::with_capacity(eqs.len());
    for (e, eq) in eqs.iter().enumerate() {
        let mut rhs = ctx.zero();
        for (node, row, coef) in eq {
            match slot.get(node) {
                Some(&s) => {
                    let col = s * l + row;
                    let v = a.get(e, col) + coef;
                    a.set(e, col, v);
                }
                None => rhs -= &(coef * cw.get(*node, *row)),
            }
        }
        b.push(rhs);
    }
    let x = a.solve_consistent(&b).map_err(|e| match e {
        LinalgError::Inconsistent => CodeError::Inconsistent,
        other => CodeError::Linalg(other),
    })?;
    for (&j, &s) in &slot {
        for i in 0..l {
            cw.set(j, i, x[s * l + i].clone());
        }
    }
    Ok(cw)
}

/// Uniformly random data columns for `code`.
pub fn random_data<C: RepairableCode + ?Sized, R: Rng + ?Sized>(code: &C, rng: &mut R) -> Vec<Vec<FieldElement>> {
    (0..code.dimension())
        .map(|_| (0..code.rows()).map(|_| code.field().random(rng)).collect())
        .collect()
}

pub fn random_codeword<C: RepairableCode + ?Sized, R: Rng + ?Sized>(
    code: &C,
    rng: &mut R,
) -> Result<Codeword, CodeError> {
    let data = random_data(code, rng);
    code.encode(&data)
}

/// Every admissible helper set for a failure of `failed`, in lexicographic order.
pub fn helper_sets<C: RepairableCode + ?Sized>(code: &C, failed: usize) -> Vec<Vec<usize>> {
    let host = failed / code.rack_size();
    (0..code.racks())
        .filter(|&u| u != host)
        .combinations(code.repair_degree())
        .collect()
}

/// Number of admissible helper sets per failed node.
pub fn helper_set_count<C: RepairableCode + ?Sized>(code: &C) -> u128 {
    binomial((code.racks() - 1) as u128, code.repair_degree() as u128)
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}
