//! Experiment runner: random codewords, erasure sweeps, repair sweeps with
//! metering, and the bound checks applied to what was measured.
//!
//! Every comparison against a bound goes through [`crate::bounds`]. Reports
//! serialize deterministically for a given configuration; wall-clock time is
//! kept out of the JSON.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    access_bound, access_bound_applies, homogeneous_decomposition, rack_cutset_bound, subpacketization_bound,
    BoundReport, BoundValue, SubpacketizationVariant,
};
use crate::codes::{binomial, helper_set_count, helper_sets, random_codeword, random_data, CodeError, Codeword, Family, RepairableCode};
use crate::ffield::FieldElement;
use crate::specfile::CodeSpec;

/// Default cap on exhaustively enumerated scenarios or erasure patterns.
pub const DEFAULT_SCENARIO_CEILING: usize = 5000;

/// Failures listed per check before truncation.
const MAX_LISTED_FAILURES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Mds,
    Repair,
    UniformDownload,
    Access,
    Bounds,
    OptimalUpdate,
}

impl Check {
    pub const ALL: [Check; 6] = [
        Check::Mds,
        Check::Repair,
        Check::UniformDownload,
        Check::Access,
        Check::Bounds,
        Check::OptimalUpdate,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Check::Mds => "mds",
            Check::Repair => "repair",
            Check::UniformDownload => "uniform-download",
            Check::Access => "access",
            Check::Bounds => "bounds",
            Check::OptimalUpdate => "optimal-update",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Check::ALL.iter().map(|c| c.name()).collect();
                format!("unknown check {s:?}; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Exhaustive,
    /// At most this many items, stratified by failed node for repairs.
    Sampled(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub spec: CodeSpec,
    pub seed: u64,
    pub scope: Scope,
    pub checks: Vec<Check>,
    /// Random codewords for the erasure sweep.
    pub codewords: usize,
    /// Random codewords for the repair sweep.
    pub repair_codewords: usize,
    /// Single-symbol data changes probed by the update check.
    pub update_probes: usize,
    pub scenario_ceiling: usize,
}

impl ExperimentConfig {
    pub fn new(spec: CodeSpec, seed: u64) -> Self {
        ExperimentConfig {
            spec,
            seed,
            scope: Scope::Exhaustive,
            checks: Check::ALL.to_vec(),
            codewords: 10,
            repair_codewords: 1,
            update_probes: 100,
            scenario_ceiling: DEFAULT_SCENARIO_CEILING,
        }
    }

    pub fn with_checks(mut self, checks: &[Check]) -> Self {
        self.checks = checks.iter().copied().sorted().dedup().collect();
        self
    }

    fn wants(&self, c: Check) -> bool {
        self.checks.contains(&c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub check: Check,
    pub status: Status,
    pub detail: String,
    /// Named failing scenarios or patterns, truncated.
    pub failures: Vec<String>,
    pub failure_count: usize,
    pub metrics: BTreeMap<String, String>,
}

impl CheckOutcome {
    fn from_failures(check: Check, detail: String, failures: Vec<String>) -> Self {
        let failure_count = failures.len();
        CheckOutcome {
            check,
            status: if failures.is_empty() { Status::Pass } else { Status::Fail },
            detail,
            failures: failures.into_iter().take(MAX_LISTED_FAILURES).collect(),
            failure_count,
            metrics: BTreeMap::new(),
        }
    }

    fn skipped(check: Check, detail: &str) -> Self {
        CheckOutcome {
            check,
            status: Status::Skipped,
            detail: detail.to_string(),
            failures: Vec::new(),
            failure_count: 0,
            metrics: BTreeMap::new(),
        }
    }

    fn metric(mut self, key: &str, value: impl ToString) -> Self {
        self.metrics.insert(key.to_string(), value.to_string());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// A failed node together with its helper racks (or helper nodes).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ScenarioId {
    pub failed: usize,
    pub helpers: Vec<usize>,
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "failed={} helpers={:?}", self.failed, self.helpers)
    }
}

/// Metering of one repair, in base-field units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScenarioResult {
    pub id: ScenarioId,
    pub codeword: usize,
    pub correct: bool,
    pub error: Option<String>,
    pub bandwidth: u64,
    pub access: u64,
    pub per_helper: BTreeMap<usize, u64>,
    pub per_node_access: BTreeMap<usize, u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MinMax {
    pub min: u64,
    pub max: u64,
}

impl MinMax {
    fn of(values: impl IntoIterator<Item = u64>) -> Option<Self> {
        let (min, max) = values.into_iter().minmax().into_option()?;
        Some(MinMax { min, max })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepairStats {
    pub scenarios: usize,
    pub exhaustive: bool,
    pub units: String,
    pub bandwidth: Option<MinMax>,
    pub access: Option<MinMax>,
    pub per_helper_download: Option<MinMax>,
    pub per_node_access: Option<MinMax>,
    /// Total download from each helper unit over all scenarios.
    pub per_unit_download: BTreeMap<usize, u64>,
    /// Scenario with the largest bandwidth (first in order on ties).
    pub worst_case: Option<ScenarioId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodeSummary {
    pub family: Family,
    pub field: String,
    pub n: usize,
    pub k: usize,
    pub racks: usize,
    pub rack_size: usize,
    pub helpers: usize,
    pub s_bar: usize,
    pub rows: usize,
    pub node_size: u64,
    pub degenerate: bool,
}

impl CodeSummary {
    pub fn of(code: &dyn RepairableCode) -> Self {
        CodeSummary {
            family: code.family(),
            field: short_field(code),
            n: code.length(),
            k: code.dimension(),
            racks: code.racks(),
            rack_size: code.rack_size(),
            helpers: code.repair_degree(),
            s_bar: code.s_bar(),
            rows: code.rows(),
            node_size: code.node_size(),
            degenerate: code.degenerate(),
        }
    }
}

fn short_field(code: &dyn RepairableCode) -> String {
    let f = code.field();
    format!("GF({}^{})", f.characteristic(), f.degree())
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub code: CodeSummary,
    pub checks: Vec<CheckOutcome>,
    pub repair: Option<RepairStats>,
    pub bounds: Vec<BoundReport>,
    pub passed: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per check, then one per bound.
    pub fn tsv(&self) -> String {
        let mut out = String::from("check\tstatus\tdetail\n");
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skipped",
            };
            out.push_str(&format!("{}\t{}\t{}\n", c.check, status, c.detail));
            for f in &c.failures {
                out.push_str(&format!("\t\t{f}\n"));
            }
        }
        if !self.bounds.is_empty() {
            out.push_str("bound\tinputs\tvalue\tmeasured\tattained\n");
            for b in &self.bounds {
                out.push_str(&b.tsv());
                out.push('\n');
            }
        }
        out
    }

    pub fn check(&self, c: Check) -> Option<&CheckOutcome> {
        self.checks.iter().find(|o| o.check == c)
    }
}

/// Helper racks of the rack model, `d̄`; helper nodes when `u = 1`.
fn k_bar(code: &dyn RepairableCode) -> usize {
    code.dimension() / code.rack_size()
}

/// Every `(failed, helpers)` pair, or a stratified sample covering every
/// failed node when the scope or ceiling calls for it.
pub fn scenarios<R: Rng + ?Sized>(
    code: &dyn RepairableCode,
    scope: Scope,
    ceiling: usize,
    rng: &mut R,
) -> (Vec<ScenarioId>, bool) {
    let n = code.length();
    let total = helper_set_count(code).saturating_mul(n as u128);
    let budget = match scope {
        Scope::Exhaustive if total <= ceiling as u128 => None,
        Scope::Exhaustive => Some(ceiling),
        Scope::Sampled(m) if total <= m as u128 => None,
        Scope::Sampled(m) => Some(m),
    };
    match budget {
        None => {
            let all = (0..n)
                .flat_map(|failed| {
                    helper_sets(code, failed)
                        .into_iter()
                        .map(move |helpers| ScenarioId { failed, helpers })
                })
                .collect();
            (all, true)
        }
        Some(m) => {
            let per_node = (m / n).max(1);
            let mut out = Vec::new();
            for failed in 0..n {
                let host = failed / code.rack_size();
                let others: Vec<usize> = (0..code.racks()).filter(|&r| r != host).collect();
                let mut seen = BTreeSet::new();
                for _ in 0..per_node {
                    let mut h: Vec<usize> = others
                        .choose_multiple(rng, code.repair_degree())
                        .copied()
                        .collect();
                    h.sort_unstable();
                    seen.insert(h);
                }
                out.extend(seen.into_iter().map(|helpers| ScenarioId { failed, helpers }));
            }
            (out, false)
        }
    }
}

/// All erasure patterns of size `r`, or a random sample of them.
pub fn erasure_patterns<R: Rng + ?Sized>(
    code: &dyn RepairableCode,
    scope: Scope,
    ceiling: usize,
    rng: &mut R,
) -> (Vec<Vec<usize>>, bool) {
    let n = code.length();
    let r = n - code.dimension();
    let total = binomial(n as u128, r as u128);
    let budget = match scope {
        Scope::Exhaustive if total <= ceiling as u128 => None,
        Scope::Exhaustive => Some(ceiling),
        Scope::Sampled(m) if total <= m as u128 => None,
        Scope::Sampled(m) => Some(m),
    };
    match budget {
        None => ((0..n).combinations(r).collect(), true),
        Some(m) => {
            let nodes: Vec<usize> = (0..n).collect();
            let mut seen = BTreeSet::new();
            for _ in 0..m {
                let mut p: Vec<usize> = nodes.choose_multiple(rng, r).copied().collect();
                p.sort_unstable();
                seen.insert(p);
            }
            (seen.into_iter().collect(), false)
        }
    }
}

/// Erases every pattern from every codeword and decodes with `decoder`.
pub fn verify_mds_with<D>(
    code: &dyn RepairableCode,
    codewords: &[Codeword],
    patterns: &[Vec<usize>],
    decoder: D,
) -> CheckOutcome
where
    D: Fn(&[Option<Vec<FieldElement>>]) -> Result<Codeword, CodeError> + Sync,
{
    let mut failures: Vec<String> = codewords
        .iter()
        .enumerate()
        .filter(|(_, cw)| !code.parity_check(cw))
        .map(|(c, _)| format!("codeword {c}: parity check fails"))
        .collect();
    let jobs: Vec<(usize, &Vec<usize>)> = (0..codewords.len()).cartesian_product(patterns).collect();
    failures.extend(
        jobs.par_iter()
            .filter_map(|&(c, pattern)| match decoder(&codewords[c].erase(pattern)) {
                Ok(ref got) if got == &codewords[c] => None,
                Ok(_) => Some(format!("codeword {c} erased {pattern:?}: wrong decode")),
                Err(e) => Some(format!("codeword {c} erased {pattern:?}: {e}")),
            })
            .collect::<Vec<_>>(),
    );
    CheckOutcome::from_failures(
        Check::Mds,
        format!(
            "{} erasure patterns x {} codewords",
            patterns.len(),
            codewords.len()
        ),
        failures,
    )
    .metric("patterns", patterns.len())
}

/// [`verify_mds_with`] using the code's own decoder.
pub fn verify_mds(code: &dyn RepairableCode, codewords: &[Codeword], patterns: &[Vec<usize>]) -> CheckOutcome {
    verify_mds_with(code, codewords, patterns, |rx| code.erasure_decode(rx))
}

/// Repairs every scenario on every codeword, in parallel.
pub fn run_repair_sweep(
    code: &dyn RepairableCode,
    codewords: &[Codeword],
    scenarios: &[ScenarioId],
) -> Vec<ScenarioResult> {
    let jobs: Vec<(usize, &ScenarioId)> = (0..codewords.len()).cartesian_product(scenarios).collect();
    jobs.par_iter()
        .map(|&(c, id)| {
            let cw = &codewords[c];
            match code.repair(cw, id.failed, &id.helpers) {
                Ok((col, tr)) => ScenarioResult {
                    id: id.clone(),
                    codeword: c,
                    correct: col == cw.column(id.failed),
                    error: None,
                    bandwidth: tr.bandwidth(),
                    access: tr.access(),
                    per_helper: tr.per_helper(),
                    per_node_access: tr.per_node_access(),
                },
                Err(e) => ScenarioResult {
                    id: id.clone(),
                    codeword: c,
                    correct: false,
                    error: Some(e.to_string()),
                    bandwidth: 0,
                    access: 0,
                    per_helper: BTreeMap::new(),
                    per_node_access: BTreeMap::new(),
                },
            }
        })
        .collect()
}

pub fn repair_stats(code: &dyn RepairableCode, results: &[ScenarioResult], exhaustive: bool) -> RepairStats {
    let ok: Vec<&ScenarioResult> = results.iter().filter(|r| r.error.is_none()).collect();
    let mut per_unit = BTreeMap::new();
    for r in &ok {
        for (&h, &v) in &r.per_helper {
            *per_unit.entry(h).or_insert(0) += v;
        }
    }
    let worst = ok
        .iter()
        .fold(None::<&ScenarioResult>, |best, r| match best {
            Some(b) if b.bandwidth >= r.bandwidth => Some(b),
            _ => Some(r),
        })
        .map(|r| r.id.clone());
    RepairStats {
        scenarios: results.len(),
        exhaustive,
        units: units(code),
        bandwidth: MinMax::of(ok.iter().map(|r| r.bandwidth)),
        access: MinMax::of(ok.iter().map(|r| r.access)),
        per_helper_download: MinMax::of(ok.iter().flat_map(|r| r.per_helper.values().copied())),
        per_node_access: MinMax::of(ok.iter().flat_map(|r| r.per_node_access.values().copied())),
        per_unit_download: per_unit,
        worst_case: worst,
    }
}

fn units(code: &dyn RepairableCode) -> String {
    if code.family() == Family::Rs {
        "symbols of GF(q)".into()
    } else {
        "symbols of F".into()
    }
}

pub fn check_repair(results: &[ScenarioResult]) -> CheckOutcome {
    let failures = results
        .iter()
        .filter(|r| !r.correct)
        .map(|r| match &r.error {
            Some(e) => format!("{} codeword {}: {e}", r.id, r.codeword),
            None => format!("{} codeword {}: wrong column", r.id, r.codeword),
        })
        .collect();
    CheckOutcome::from_failures(Check::Repair, format!("{} repairs", results.len()), failures)
}

/// Every helper unit sends exactly `node_size / s̄`. Skipped when `k̄ = 1`,
/// outside the hypothesis under which uniform download is forced.
pub fn check_uniform_download(code: &dyn RepairableCode, results: &[ScenarioResult]) -> CheckOutcome {
    if k_bar(code) <= 1 {
        return CheckOutcome::skipped(Check::UniformDownload, "k̄ = 1: uniform download is not forced");
    }
    let sb = code.s_bar() as u64;
    let size = code.node_size();
    if !size.is_multiple_of(sb) {
        return CheckOutcome::from_failures(
            Check::UniformDownload,
            format!("node size {size} is not divisible by s̄ = {sb}"),
            vec!["all scenarios".into()],
        );
    }
    let share = size / sb;
    let failures = results
        .iter()
        .filter(|r| r.error.is_none())
        .flat_map(|r| {
            r.per_helper
                .iter()
                .filter(|(_, &v)| v != share)
                .map(move |(h, v)| format!("{}: helper {h} sent {v}, expected {share}", r.id))
        })
        .collect();
    CheckOutcome::from_failures(Check::UniformDownload, format!("each helper sends {share}"), failures)
        .metric("share", share)
}

/// Per-node access each construction is designed to meet.
fn designed_node_access(code: &dyn RepairableCode) -> u64 {
    let size = code.node_size();
    if code.degenerate() {
        return size;
    }
    match code.family() {
        Family::C2 | Family::C3 => size / code.s_bar() as u64,
        Family::C1 | Family::Rs => size,
    }
}

/// Compares helper-side access with `d̄ul/s`, `s = u·s̄`, and with the
/// `s = d - k + 1` form when `u ∤ k`.
pub fn check_access(code: &dyn RepairableCode, results: &[ScenarioResult]) -> (CheckOutcome, Vec<BoundReport>) {
    let u = code.rack_size() as u64;
    let d_bar = code.repair_degree() as u64;
    let kb = k_bar(code) as u64;
    let k = code.dimension() as u64;
    let l = code.node_size();
    let sb = code.s_bar() as u64;
    let s = u * sb;
    let ok: Vec<&ScenarioResult> = results.iter().filter(|r| r.error.is_none()).collect();
    let measured = ok.iter().map(|r| r.access).max();
    let applies = access_bound_applies(d_bar, kb, u, k);
    let bound = access_bound(d_bar, u, l, s).expect("s is positive");
    let mut reports = vec![{
        let r = BoundReport::new(
            "access",
            &[("d_bar", d_bar), ("u", u), ("l", l), ("s", s)],
            BoundValue::Exact(bound),
            measured,
        );
        if applies {
            r
        } else {
            r.not_applicable()
        }
    }];
    let v = k % u;
    if v != 0 {
        let d = d_bar * u + u - 1;
        let s_nodes = d - k + 1;
        let b = access_bound(d_bar, u, l, s_nodes).expect("s is positive");
        let r = BoundReport::new(
            "access (s = d-k+1)",
            &[("d_bar", d_bar), ("u", u), ("l", l), ("s", s_nodes)],
            BoundValue::Exact(b),
            measured,
        );
        reports.push(if applies { r } else { r.not_applicable() });
    }

    let expect = designed_node_access(code);
    let mut failures: Vec<String> = ok
        .iter()
        .flat_map(|r| {
            r.per_node_access
                .iter()
                .filter(|(_, &a)| a != expect)
                .map(move |(node, a)| format!("{}: node {node} read {a}, expected {expect}", r.id))
        })
        .collect();
    if applies {
        for r in &ok {
            if Ratio::from_integer(r.access) < bound {
                failures.push(format!("{}: access {} below the bound {bound}", r.id, r.access));
            }
        }
    }
    let mut outcome = CheckOutcome::from_failures(
        Check::Access,
        match measured {
            Some(m) => format!("measured {m}, bound {bound}, per node {expect}"),
            None => "no successful repairs".into(),
        },
        failures,
    )
    .metric("bound", bound)
    .metric("per_node", expect);
    if let Some(m) = measured {
        outcome = outcome.metric("measured", m).metric("ratio", Ratio::from_integer(m) / bound);
    }
    (outcome, reports)
}

/// Checks that every repair attains the rack cut-set bound and reports the
/// remaining bounds that apply to the code's parameters.
pub fn check_bounds(code: &dyn RepairableCode, results: &[ScenarioResult]) -> (CheckOutcome, Vec<BoundReport>) {
    let u = code.rack_size() as u64;
    let d_bar = code.repair_degree() as u64;
    let kb = k_bar(code) as u64;
    let k = code.dimension() as u64;
    let l = code.node_size();
    let ok: Vec<&ScenarioResult> = results.iter().filter(|r| r.error.is_none()).collect();
    let cutset = rack_cutset_bound(d_bar, kb, l).expect("k̄ <= d̄ by construction");
    let worst = ok.iter().map(|r| r.bandwidth).max();
    let mut reports = vec![BoundReport::new(
        "rack cut-set",
        &[("d_bar", d_bar), ("k_bar", kb), ("l", l)],
        BoundValue::Exact(cutset),
        worst,
    )];
    let mut failures: Vec<String> = ok
        .iter()
        .filter(|r| Ratio::from_integer(r.bandwidth) != cutset)
        .map(|r| format!("{}: bandwidth {} differs from {cutset}", r.id, r.bandwidth))
        .collect();

    if k.is_multiple_of(u) && u > 1 {
        let d = d_bar * u + u - 1;
        if let Ok((rack, local)) = homogeneous_decomposition(d, k, u, l) {
            reports.push(BoundReport::new(
                "homogeneous rack term",
                &[("d", d), ("k", k), ("u", u), ("l", l)],
                BoundValue::Exact(rack),
                worst,
            ));
            reports.push(BoundReport::new(
                "homogeneous local term",
                &[("d", d), ("k", k), ("u", u), ("l", l)],
                BoundValue::Exact(local),
                None,
            ));
        }
    }
    if k.is_multiple_of(u) {
        let oa = matches!(code.family(), Family::C2 | Family::C3);
        let n_bar = code.racks() as u64;
        let rows = code.rows() as u64;
        for (name, variant) in [
            ("sub-packetization (a)", SubpacketizationVariant::A),
            ("sub-packetization (b)", SubpacketizationVariant::B),
        ] {
            let b = subpacketization_bound(n_bar, kb, d_bar, u, variant).expect("k̄ <= d̄ by construction");
            let r = BoundReport::new(
                name,
                &[("n_bar", n_bar), ("k_bar", kb), ("d_bar", d_bar), ("u", u)],
                BoundValue::Real(b),
                Some(rows),
            );
            if oa && r.respected == Some(false) {
                failures.push(format!("{name}: l = {rows} below {b}"));
            }
            reports.push(if oa { r } else { r.not_applicable() });
        }
    }
    let outcome = CheckOutcome::from_failures(
        Check::Bounds,
        match worst {
            Some(w) => format!("bandwidth {w}, rack cut-set {cutset}"),
            None => "no successful repairs".into(),
        },
        failures,
    )
    .metric("cutset", cutset);
    (outcome, reports)
}

/// Changes one data symbol at a time and counts the parity symbols that
/// move: an update-optimal code changes exactly `r`, all in the same row.
pub fn check_optimal_update<R: Rng + ?Sized>(code: &dyn RepairableCode, probes: usize, rng: &mut R) -> CheckOutcome {
    if code.family() != Family::C1 {
        return CheckOutcome::skipped(Check::OptimalUpdate, "only the C1 code claims optimal update");
    }
    let k = code.dimension();
    let r = code.length() - k;
    let l = code.rows();
    let mut failures = Vec::new();
    for _ in 0..probes {
        let data = random_data(code, rng);
        let (col, row) = (rng.gen_range(0..k), rng.gen_range(0..l));
        let mut changed = data.clone();
        changed[col][row] = &changed[col][row] + &code.field().random_nonzero(rng);
        let (a, b) = match (code.encode(&data), code.encode(&changed)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                failures.push(format!("data ({row}, {col}): {e}"));
                continue;
            }
        };
        let moved: Vec<(usize, usize)> = (k..code.length())
            .flat_map(|j| (0..l).map(move |i| (j, i)))
            .filter(|&(j, i)| a.get(j, i) != b.get(j, i))
            .collect();
        let rows: BTreeSet<usize> = moved.iter().map(|&(_, i)| i).collect();
        if moved.len() != r || rows.len() != 1 || !rows.contains(&row) {
            failures.push(format!(
                "data (row {row}, column {col}): {} parity symbols changed in rows {rows:?}",
                moved.len()
            ));
        }
    }
    CheckOutcome::from_failures(
        Check::OptimalUpdate,
        format!("{probes} single-symbol updates, expecting {r} parity changes in one row"),
        failures,
    )
}

/// Runs the configured checks on a freshly built code.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report, CodeError> {
    let code = config.spec.build()?;
    Ok(run_on(config, code.as_dyn(), None))
}

/// Runs the configured checks. A supplied codeword replaces the random ones
/// for the erasure and repair sweeps.
pub fn run_on(config: &ExperimentConfig, code: &dyn RepairableCode, supplied: Option<Codeword>) -> Report {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (mds_words, repair_words) = match supplied {
        Some(cw) => (vec![cw.clone()], vec![cw]),
        None => {
            let count = config.codewords.max(config.repair_codewords).max(1);
            let words: Vec<Codeword> = (0..count)
                .map(|_| random_codeword(code, &mut rng).expect("random data has the right shape"))
                .collect();
            (
                words[..config.codewords.max(1)].to_vec(),
                words[..config.repair_codewords.max(1)].to_vec(),
            )
        }
    };
    let mut checks = Vec::new();
    let mut bounds = Vec::new();

    if config.wants(Check::Mds) {
        let (patterns, _) = erasure_patterns(code, config.scope, config.scenario_ceiling, &mut rng);
        checks.push(verify_mds(code, &mds_words, &patterns));
    }

    let needs_sweep = [Check::Repair, Check::UniformDownload, Check::Access, Check::Bounds]
        .iter()
        .any(|c| config.wants(*c));
    let mut repair = None;
    if needs_sweep {
        let (ids, exhaustive) = scenarios(code, config.scope, config.scenario_ceiling, &mut rng);
        let results = run_repair_sweep(code, &repair_words, &ids);
        repair = Some(repair_stats(code, &results, exhaustive));
        if config.wants(Check::Repair) {
            checks.push(check_repair(&results));
        }
        if config.wants(Check::UniformDownload) {
            checks.push(check_uniform_download(code, &results));
        }
        if config.wants(Check::Access) {
            let (o, b) = check_access(code, &results);
            checks.push(o);
            bounds.extend(b);
        }
        if config.wants(Check::Bounds) {
            let (o, b) = check_bounds(code, &results);
            checks.push(o);
            bounds.extend(b);
        }
    }
    if config.wants(Check::OptimalUpdate) {
        checks.push(check_optimal_update(code, config.update_probes, &mut rng));
    }
    let passed = checks.iter().all(CheckOutcome::passed);
    Report {
        config: config.clone(),
        code: CodeSummary::of(code),
        checks,
        repair,
        bounds,
        passed,
        elapsed: start.elapsed(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::Family;
    use crate::specfile::CodeParams;

    fn spec(family: Family, racks: usize, rack_size: usize, k: usize, helpers: usize) -> CodeSpec {
        CodeParams {
            family,
            racks,
            rack_size,
            k,
            helpers,
            field: None,
            q: None,
            seed: 0,
            max_l: None,
        }
        .build()
        .unwrap()
        .spec()
    }

    #[test]
    fn c1_demo_passes_everything() {
        let report = run_experiment(&ExperimentConfig::new(spec(Family::C1, 4, 2, 5, 3), 1)).unwrap();
        assert!(report.passed, "{}", report.tsv());
        let stats = report.repair.as_ref().unwrap();
        assert_eq!(stats.scenarios, 8);
        assert_eq!(stats.bandwidth, Some(MinMax { min: 24, max: 24 }));
        assert_eq!(stats.access, Some(MinMax { min: 96, max: 96 }));
        assert_eq!(report.check(Check::Mds).unwrap().metrics["patterns"], "56");
        assert_eq!(report.check(Check::UniformDownload).unwrap().status, Status::Pass);
        assert_eq!(report.check(Check::OptimalUpdate).unwrap().status, Status::Pass);
    }

    #[test]
    fn c3_access_ratio() {
        let report = run_experiment(&ExperimentConfig::new(spec(Family::C3, 3, 2, 3, 2), 1)).unwrap();
        assert!(report.passed, "{}", report.tsv());
        let access = report.check(Check::Access).unwrap();
        assert_eq!(access.metrics["measured"], "16");
        assert_eq!(access.metrics["bound"], "8");
        assert_eq!(access.metrics["ratio"], "2");
        assert_eq!(report.check(Check::UniformDownload).unwrap().status, Status::Skipped);
        assert_eq!(report.repair.as_ref().unwrap().scenarios, 6);
        let alt_form = report.bounds.iter().find(|b| b.name == "access (s = d-k+1)").unwrap();
        assert_eq!(alt_form.bound, BoundValue::Exact(Ratio::new(32, 3)));
    }

    #[test]
    fn c2_access_is_attained() {
        let report = run_experiment(&ExperimentConfig::new(spec(Family::C2, 4, 1, 2, 3), 1)).unwrap();
        assert!(report.passed, "{}", report.tsv());
        let access = report.bounds.iter().find(|b| b.name == "access").unwrap();
        assert_eq!(access.attained, Some(true));
        assert_eq!(access.measured, Some(24));
    }

    #[test]
    fn broken_decoder_is_named() {
        let code = spec(Family::C2, 4, 1, 2, 3).build().unwrap();
        let c = code.as_dyn();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cws = vec![random_codeword(c, &mut rng).unwrap()];
        let (patterns, _) = erasure_patterns(c, Scope::Exhaustive, 100, &mut rng);
        let out = verify_mds_with(c, &cws, &patterns, |rx| {
            let mut cw = c.erasure_decode(rx)?;
            if rx[0].is_none() {
                cw.set(0, 0, cw.get(0, 0) + &c.field().one());
            }
            Ok(cw)
        });
        assert_eq!(out.status, Status::Fail);
        assert_eq!(out.failure_count, 3);
        assert!(out.failures[0].contains("erased [0, 1]"), "{:?}", out.failures);
    }

    #[test]
    fn forged_transcript_breaks_uniformity() {
        let code = spec(Family::C1, 4, 2, 5, 3).build().unwrap();
        let c = code.as_dyn();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cws = vec![random_codeword(c, &mut rng).unwrap()];
        let (ids, _) = scenarios(c, Scope::Exhaustive, 100, &mut rng);
        let mut results = run_repair_sweep(c, &cws, &ids);
        assert_eq!(check_uniform_download(c, &results).status, Status::Pass);
        *results[0].per_helper.values_mut().next().unwrap() = 9;
        let out = check_uniform_download(c, &results);
        assert_eq!(out.status, Status::Fail);
        assert!(out.failures[0].starts_with("failed=0 helpers=[1, 2, 3]"));
    }

    #[test]
    fn zero_codeword_repairs_to_zero() {
        let code = spec(Family::C3, 3, 2, 3, 2).build().unwrap();
        let c = code.as_dyn();
        let zero = Codeword::zeros(c.field(), c.length(), c.rows());
        let (ids, _) = scenarios(c, Scope::Exhaustive, 100, &mut ChaCha8Rng::seed_from_u64(0));
        let results = run_repair_sweep(c, std::slice::from_ref(&zero), &ids);
        assert!(results.iter().all(|r| r.correct));
        for id in &ids {
            let (_, tr) = c.repair(&zero, id.failed, &id.helpers).unwrap();
            assert!(tr.downloads.values().flatten().all(FieldElement::is_zero));
        }
        assert_eq!(verify_mds(c, &[zero], &[vec![0, 1, 2]]).status, Status::Pass);
    }

    #[test]
    fn sampling_covers_every_failed_node() {
        let code = spec(Family::C2, 6, 1, 2, 3).build().unwrap();
        let c = code.as_dyn();
        let (ids, exhaustive) = scenarios(c, Scope::Sampled(12), 5000, &mut ChaCha8Rng::seed_from_u64(3));
        assert!(!exhaustive);
        let failed: BTreeSet<usize> = ids.iter().map(|i| i.failed).collect();
        assert_eq!(failed.len(), 6);
        let (all, exhaustive) = scenarios(c, Scope::Exhaustive, 5000, &mut ChaCha8Rng::seed_from_u64(3));
        assert!(exhaustive);
        assert_eq!(all.len(), 6 * 10);
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = ExperimentConfig::new(spec(Family::C3, 3, 2, 3, 2), 42);
        let a = run_experiment(&cfg).unwrap().to_json();
        let b = run_experiment(&cfg).unwrap().to_json();
        assert_eq!(a, b);
        assert!(!a.contains("elapsed"));
    }

    #[test]
    fn check_names_round_trip() {
        for c in Check::ALL {
            assert_eq!(c.name().parse::<Check>().unwrap(), c);
        }
        assert!("speed".parse::<Check>().is_err());
    }
}
