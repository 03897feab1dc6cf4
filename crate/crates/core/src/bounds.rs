//! Lower bounds on repair bandwidth, helper access and sub-packetization.
//!
//! Linear bounds are exact rationals so that "attains the bound" is an exact
//! comparison. Only the sub-packetization bound, which has fractional
//! exponents, is real-valued.

use std::fmt;

use num_rational::Ratio;
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundError {
    #[error("repair degree {d} is below the dimension {k}")]
    DegreeBelowDimension { d: u64, k: u64 },
    #[error("rack size must be positive")]
    ZeroRackSize,
    #[error("s must be positive")]
    ZeroS,
    #[error("d = {d} is not of the form d̄u + u - 1 for u = {u}")]
    NotRackDegree { d: u64, u: u64 },
    #[error("k = {k} is not a multiple of u = {u}")]
    RackSizeDoesNotDivideK { k: u64, u: u64 },
}

/// `dl/(d-k+1)` for `d` helper nodes.
pub fn cutset_bound(d: u64, k: u64, l: u64) -> Result<Ratio<u64>, BoundError> {
    if d < k {
        return Err(BoundError::DegreeBelowDimension { d, k });
    }
    Ok(Ratio::new(d * l, d - k + 1))
}

/// `d̄l/(d̄-k̄+1)` for `d̄` helper racks.
pub fn rack_cutset_bound(d_bar: u64, k_bar: u64, l: u64) -> Result<Ratio<u64>, BoundError> {
    cutset_bound(d_bar, k_bar, l)
}

/// `d̄ul/s`: symbols that must be read on the helper racks.
pub fn access_bound(d_bar: u64, u: u64, l: u64, s: u64) -> Result<Ratio<u64>, BoundError> {
    if s == 0 {
        return Err(BoundError::ZeroS);
    }
    Ok(Ratio::new(d_bar * u * l, s))
}

/// Whether the access bound is established: `d̄ >= k̄ + 1` and `u <= k`.
pub fn access_bound_applies(d_bar: u64, k_bar: u64, u: u64, k: u64) -> bool {
    d_bar > k_bar && u <= k
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SubpacketizationVariant {
    /// `min(s̄^((n̄-1)/s), s̄^(k̄-1))`.
    A,
    /// `min(s̄^(n̄/s), s̄^(k̄-1))`.
    B,
}

/// Sub-packetization lower bound for optimal-access rack codes with
/// `k = k̄u`, where `s = u·s̄`.
pub fn subpacketization_bound(
    n_bar: u64,
    k_bar: u64,
    d_bar: u64,
    u: u64,
    variant: SubpacketizationVariant,
) -> Result<f64, BoundError> {
    if u == 0 {
        return Err(BoundError::ZeroRackSize);
    }
    if d_bar < k_bar {
        return Err(BoundError::DegreeBelowDimension { d: d_bar, k: k_bar });
    }
    let s_bar = (d_bar - k_bar + 1) as f64;
    let s = u as f64 * s_bar;
    let racks = match variant {
        SubpacketizationVariant::A => n_bar.saturating_sub(1),
        SubpacketizationVariant::B => n_bar,
    } as f64;
    let first = s_bar.powf(racks / s);
    let second = s_bar.powf(k_bar.saturating_sub(1) as f64);
    Ok(first.min(second))
}

/// Splits the homogeneous cut-set bound for `d = d̄u + u - 1` helpers into
/// the rack term `d̄l/s̄` and the local term `(u-1)l/(d-k+1)`; the two sum to
/// `dl/(d-k+1)`.
pub fn homogeneous_decomposition(d: u64, k: u64, u: u64, l: u64) -> Result<(Ratio<u64>, Ratio<u64>), BoundError> {
    if u == 0 {
        return Err(BoundError::ZeroRackSize);
    }
    if !(d + 1).is_multiple_of(u) || d + 1 < u {
        return Err(BoundError::NotRackDegree { d, u });
    }
    if !k.is_multiple_of(u) {
        return Err(BoundError::RackSizeDoesNotDivideK { k, u });
    }
    if d < k {
        return Err(BoundError::DegreeBelowDimension { d, k });
    }
    let d_bar = (d + 1) / u - 1;
    let k_bar = k / u;
    let rack = rack_cutset_bound(d_bar, k_bar, l)?;
    let local = Ratio::new((u - 1) * l, d - k + 1);
    Ok((rack, local))
}

/// A bound value: exact for the linear bounds, real for sub-packetization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundValue {
    Exact(Ratio<u64>),
    Real(f64),
}

impl BoundValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            BoundValue::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            BoundValue::Real(x) => *x,
        }
    }

    fn equals(&self, measured: u64) -> bool {
        match self {
            BoundValue::Exact(r) => *r == Ratio::from_integer(measured),
            BoundValue::Real(x) => *x == measured as f64,
        }
    }

    fn at_most(&self, measured: u64) -> bool {
        match self {
            BoundValue::Exact(r) => *r <= Ratio::from_integer(measured),
            BoundValue::Real(x) => *x <= measured as f64,
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Exact(r) => write!(f, "{r}"),
            BoundValue::Real(x) => write!(f, "{x:.12}"),
        }
    }
}

impl Serialize for BoundValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// One bound, its inputs and, when available, the measured value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub inputs: Vec<(String, u64)>,
    pub bound: BoundValue,
    pub measured: Option<u64>,
    /// `measured == bound`, when measured.
    pub attained: Option<bool>,
    /// `measured >= bound`, when measured.
    pub respected: Option<bool>,
    /// False when the bound's hypotheses do not hold for these inputs.
    pub applicable: bool,
}

impl BoundReport {
    pub fn new(name: &str, inputs: &[(&str, u64)], bound: BoundValue, measured: Option<u64>) -> Self {
        BoundReport {
            name: name.to_string(),
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            bound,
            measured,
            attained: measured.map(|m| bound.equals(m)),
            respected: measured.map(|m| bound.at_most(m)),
            applicable: true,
        }
    }

    pub fn not_applicable(mut self) -> Self {
        self.applicable = false;
        self
    }

    /// One TSV line: name, inputs, bound, measured, attained.
    pub fn tsv(&self) -> String {
        let inputs: Vec<String> = self.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let opt = |x: Option<String>| x.unwrap_or_else(|| "-".into());
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.name,
            inputs.join(","),
            self.bound,
            opt(self.measured.map(|m| m.to_string())),
            opt(self.attained.map(|a| a.to_string())),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cutset_values() {
        assert_eq!(cutset_bound(3, 2, 16).unwrap(), Ratio::from_integer(24));
        assert_eq!(cutset_bound(4, 4, 9).unwrap(), Ratio::from_integer(36));
        assert_eq!(cutset_bound(7, 5, 16).unwrap(), Ratio::new(112, 3));
        assert!(cutset_bound(1, 2, 4).is_err());
        assert_eq!(rack_cutset_bound(3, 2, 16).unwrap(), Ratio::from_integer(24));
        assert_eq!(rack_cutset_bound(2, 1, 8).unwrap(), Ratio::from_integer(8));
        assert_eq!(rack_cutset_bound(5, 4, 32).unwrap(), Ratio::from_integer(80));
    }

    #[test]
    fn access_values() {
        assert_eq!(access_bound(2, 2, 8, 4).unwrap(), Ratio::from_integer(8));
        assert_eq!(access_bound(3, 2, 16, 6).unwrap(), Ratio::from_integer(16));
        assert_eq!(access_bound(3, 1, 16, 2).unwrap(), cutset_bound(3, 2, 16).unwrap());
        assert!(access_bound_applies(2, 1, 2, 3));
        assert!(!access_bound_applies(1, 1, 2, 3));
    }

    #[test]
    fn subpacketization_values() {
        use SubpacketizationVariant::*;
        let oracle = 2.0 * 2f64.sqrt() * 2f64.sqrt().sqrt();
        let a = subpacketization_bound(8, 4, 5, 2, A).unwrap();
        assert!((a - oracle).abs() < 1e-12);
        assert!((a - 3.363_585_661_014_858).abs() < 1e-12);
        assert_eq!(subpacketization_bound(8, 4, 5, 2, B).unwrap(), 4.0);
        assert_eq!(subpacketization_bound(6, 3, 3, 2, A).unwrap(), 1.0);
    }

    #[test]
    fn decomposition_values() {
        let (rack, local) = homogeneous_decomposition(7, 4, 2, 16).unwrap();
        assert_eq!(rack, Ratio::from_integer(24));
        assert_eq!(local, Ratio::from_integer(4));
        assert_eq!(rack + local, cutset_bound(7, 4, 16).unwrap());
        let (rack, local) = homogeneous_decomposition(3, 2, 1, 16).unwrap();
        assert_eq!(rack, cutset_bound(3, 2, 16).unwrap());
        assert_eq!(local, Ratio::from_integer(0));
        assert!(homogeneous_decomposition(6, 4, 2, 16).is_err());
        assert!(homogeneous_decomposition(7, 3, 2, 16).is_err());
    }

    #[test]
    fn report_flags() {
        let r = BoundReport::new("rack", &[("l", 16)], BoundValue::Exact(Ratio::from_integer(24)), Some(24));
        assert_eq!(r.attained, Some(true));
        assert_eq!(r.respected, Some(true));
        assert_eq!(r.tsv(), "rack\tl=16\t24\t24\ttrue");
        let r = BoundReport::new("acc", &[], BoundValue::Exact(Ratio::new(32, 3)), Some(16));
        assert_eq!(r.attained, Some(false));
        assert_eq!(serde_json::to_value(&r).unwrap()["bound"], "32/3");
    }

    proptest! {
        #[test]
        fn decomposition_sums_to_cutset(u in 1u64..5, k_bar in 1u64..5, extra in 0u64..4, l in 1u64..100) {
            let d_bar = k_bar + extra;
            let d = d_bar * u + u - 1;
            let k = k_bar * u;
            let (rack, local) = homogeneous_decomposition(d, k, u, l).unwrap();
            let total = cutset_bound(d, k, l).unwrap();
            prop_assert_eq!(rack + local, total);
            prop_assert!(rack <= total);
        }
    }
}
