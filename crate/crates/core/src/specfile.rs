//! Serializable code specifications.
//!
//! A [`CodeSpec`] records the field (header with modulus) and every special
//! element in decimal encoding, so loading it rebuilds the same code without
//! repeating any search. [`CodeParams`] is the user-facing request that picks
//! those elements.

use serde::{Deserialize, Serialize};

use crate::codes::rs::DEFAULT_MAX_L;
use crate::codes::{C1Code, C3Code, CodeError, Family, OaCode, RackParams, RepairableCode, RsCode, RsParams};
use crate::ffield::{FieldCtx, FieldElement, FieldError};

/// What to build. For the homogeneous code `racks` is the node count `n`,
/// `rack_size` is 1 and `helpers` is the repair degree `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    pub family: Family,
    pub racks: usize,
    pub rack_size: usize,
    pub k: usize,
    pub helpers: usize,
    /// Field override, `p` or `p^m`. Ignored by the RS code.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    /// Base field size of the RS code.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    /// Seed for the RS evaluation-point draws.
    #[serde(default)]
    pub seed: u64,
    /// Sub-packetization ceiling of the RS code.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_l: Option<usize>,
}

impl CodeParams {
    pub fn rack(&self) -> RackParams {
        RackParams {
            racks: self.racks,
            rack_size: self.rack_size,
            k: self.k,
            helpers: self.helpers,
        }
    }

    pub fn build(&self) -> Result<AnyCode, CodeError> {
        let field = self.field.as_deref().map(parse_field).transpose()?;
        Ok(match self.family {
            Family::C1 => AnyCode::C1(C1Code::build(self.rack(), field)?),
            Family::C3 => AnyCode::C3(C3Code::build(self.rack(), field)?),
            Family::C2 => {
                if self.rack_size != 1 {
                    return Err(CodeError::InvalidParameters(
                        "the homogeneous code has rack size 1".into(),
                    ));
                }
                AnyCode::C2(OaCode::build(self.racks, self.k, self.helpers, field)?)
            }
            Family::Rs => {
                let q = self
                    .q
                    .ok_or_else(|| CodeError::InvalidParameters("the RS code needs q".into()))?;
                let params = RsParams {
                    q,
                    rack: self.rack(),
                    seed: self.seed,
                };
                AnyCode::Rs(RsCode::build_with_ceiling(params, self.max_l.unwrap_or(DEFAULT_MAX_L))?)
            }
        })
    }
}

/// Parses `p` or `p^m` into a field with the canonical modulus.
pub fn parse_field(s: &str) -> Result<FieldCtx, CodeError> {
    let bad = || CodeError::InvalidParameters(format!("field {s:?} is not of the form p or p^m"));
    let (p, m) = match s.split_once('^') {
        Some((p, m)) => (p.trim().parse().map_err(|_| bad())?, m.trim().parse().map_err(|_| bad())?),
        None => (s.trim().parse().map_err(|_| bad())?, 1usize),
    };
    Ok(FieldCtx::extension(p, m)?)
}

/// A fully instantiated code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum CodeSpec {
    C1 {
        rack: RackParamsSpec,
        field: String,
        lambda: String,
    },
    C2 {
        n: usize,
        k: usize,
        d: usize,
        field: String,
        lambdas: Vec<String>,
        mus: Vec<String>,
    },
    C3 {
        rack: RackParamsSpec,
        field: String,
        lambda: String,
        mus: Vec<String>,
    },
    Rs {
        q: u64,
        rack: RackParamsSpec,
        seed: u64,
        max_l: usize,
        primes: Vec<u64>,
        field: String,
        rack_lambdas: Vec<String>,
    },
}

/// Rack parameters under stable JSON names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RackParamsSpec {
    pub racks: usize,
    pub rack_size: usize,
    pub k: usize,
    pub helpers: usize,
}

impl From<RackParams> for RackParamsSpec {
    fn from(p: RackParams) -> Self {
        RackParamsSpec {
            racks: p.racks,
            rack_size: p.rack_size,
            k: p.k,
            helpers: p.helpers,
        }
    }
}

impl From<RackParamsSpec> for RackParams {
    fn from(p: RackParamsSpec) -> Self {
        RackParams {
            racks: p.racks,
            rack_size: p.rack_size,
            k: p.k,
            helpers: p.helpers,
        }
    }
}

fn parse_all(ctx: &FieldCtx, xs: &[String]) -> Result<Vec<FieldElement>, FieldError> {
    xs.iter().map(|x| ctx.parse(x)).collect()
}

fn encode_all(xs: &[FieldElement]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

impl CodeSpec {
    pub fn family(&self) -> Family {
        match self {
            CodeSpec::C1 { .. } => Family::C1,
            CodeSpec::C2 { .. } => Family::C2,
            CodeSpec::C3 { .. } => Family::C3,
            CodeSpec::Rs { .. } => Family::Rs,
        }
    }

    /// Rebuilds the code, re-running every construction check.
    pub fn build(&self) -> Result<AnyCode, CodeError> {
        Ok(match self {
            CodeSpec::C1 { rack, field, lambda } => {
                let ctx = FieldCtx::from_header(field)?;
                let lambda = ctx.parse(lambda)?;
                AnyCode::C1(C1Code::with_lambda((*rack).into(), ctx, lambda)?)
            }
            CodeSpec::C2 {
                n,
                k,
                d,
                field,
                lambdas,
                mus,
            } => {
                let ctx = FieldCtx::from_header(field)?;
                let lambdas = parse_all(&ctx, lambdas)?;
                let mus = parse_all(&ctx, mus)?;
                AnyCode::C2(OaCode::with_elements(*n, *k, *d, ctx, lambdas, mus)?)
            }
            CodeSpec::C3 {
                rack,
                field,
                lambda,
                mus,
            } => {
                let ctx = FieldCtx::from_header(field)?;
                let lambda = ctx.parse(lambda)?;
                let mus = parse_all(&ctx, mus)?;
                AnyCode::C3(C3Code::with_elements((*rack).into(), ctx, lambda, mus)?)
            }
            CodeSpec::Rs {
                q,
                rack,
                seed,
                max_l,
                primes,
                field,
                rack_lambdas,
            } => {
                let ctx = FieldCtx::from_header(field)?;
                let zs = parse_all(&ctx, rack_lambdas)?;
                let params = RsParams {
                    q: *q,
                    rack: (*rack).into(),
                    seed: *seed,
                };
                let code = RsCode::from_parts(params, ctx, zs, *max_l)?;
                if code.primes() != &primes[..] {
                    return Err(CodeError::InvalidParameters(format!(
                        "recorded primes {primes:?} differ from {:?}",
                        code.primes()
                    )));
                }
                AnyCode::Rs(code)
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// One of the four constructions.
#[derive(Debug)]
pub enum AnyCode {
    C1(C1Code),
    C2(OaCode),
    C3(C3Code),
    Rs(RsCode),
}

impl AnyCode {
    pub fn as_dyn(&self) -> &dyn RepairableCode {
        match self {
            AnyCode::C1(c) => c,
            AnyCode::C2(c) => c,
            AnyCode::C3(c) => c,
            AnyCode::Rs(c) => c,
        }
    }

    pub fn spec(&self) -> CodeSpec {
        match self {
            AnyCode::C1(c) => CodeSpec::C1 {
                rack: c.params().into(),
                field: c.field().header(),
                lambda: c.lambda().to_string(),
            },
            AnyCode::C2(c) => CodeSpec::C2 {
                n: c.length(),
                k: c.dimension(),
                d: c.repair_degree(),
                field: c.field().header(),
                lambdas: encode_all(c.lambdas()),
                mus: encode_all(c.mus()),
            },
            AnyCode::C3(c) => CodeSpec::C3 {
                rack: c.params().into(),
                field: c.field().header(),
                lambda: c.lambda().to_string(),
                mus: encode_all(c.mus()),
            },
            AnyCode::Rs(c) => CodeSpec::Rs {
                q: c.params().q,
                rack: c.params().rack.into(),
                seed: c.params().seed,
                max_l: c.max_l(),
                primes: c.primes().to_vec(),
                field: c.field().header(),
                rack_lambdas: encode_all(c.rack_lambdas()),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(family: Family, racks: usize, rack_size: usize, k: usize, helpers: usize) -> CodeParams {
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
    }

    #[test]
    fn round_trip_every_family() {
        let mut rs = params(Family::Rs, 2, 2, 2, 1);
        rs.q = Some(3);
        for p in [
            params(Family::C1, 4, 2, 5, 3),
            params(Family::C2, 4, 1, 2, 3),
            params(Family::C3, 3, 2, 3, 2),
            rs,
        ] {
            let code = p.build().unwrap();
            let spec = code.spec();
            let back = CodeSpec::from_json(&spec.to_json()).unwrap();
            assert_eq!(back, spec);
            assert_eq!(back.build().unwrap().spec(), spec);
        }
    }

    #[test]
    fn c1_demo_spec() {
        let spec = params(Family::C1, 4, 2, 5, 3).build().unwrap().spec();
        let json: serde_json::Value = serde_json::from_str(&spec.to_json()).unwrap();
        assert_eq!(json["family"], "c1");
        assert_eq!(json["field"], "17^1/-");
        assert_eq!(json["lambda"], "3");
    }

    #[test]
    fn field_overrides() {
        assert_eq!(parse_field("7").unwrap().size_u64(), Some(7));
        assert_eq!(parse_field("3^4").unwrap().size_u64(), Some(81));
        assert!(parse_field("x").is_err());
        let mut p = params(Family::C3, 3, 2, 3, 2);
        p.field = Some("7".into());
        let err = p.build().unwrap_err().to_string();
        assert!(err.contains("μ"), "{err}");
    }

    #[test]
    fn tampered_spec_is_rejected() {
        let spec = params(Family::C1, 4, 2, 5, 3).build().unwrap().spec();
        let bad = spec.to_json().replace("\"lambda\": \"3\"", "\"lambda\": \"2\"");
        assert!(CodeSpec::from_json(&bad).unwrap().build().is_err());
    }
}
