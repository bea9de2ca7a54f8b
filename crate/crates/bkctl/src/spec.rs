//! The JSON spec document read by `--spec`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use bk_core::conjectures::{LengthLedger, SweepConfig};
use bk_core::module::{BKModule, CyclicSummand, Presentation};
use bk_core::ring::{EisensteinPoly, RingParams, TruncatedSeries};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub format_version: u32,
    pub ring: RingSpec,
    pub eisenstein: EisensteinSpec,
    #[serde(default)]
    pub modules: BTreeMap<String, ModuleSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub ledgers: BTreeMap<String, LengthLedger>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    pub p: u64,
    pub p_prec: u32,
    pub u_prec: usize,
}

/// `{"kind": "default", "e": 4}` for `u^e - p`, or `{"kind": "explicit", "coeffs": [c_0, ..]}`
/// for `u^e + c_{e-1} u^{e-1} + ... + c_0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum EisensteinSpec {
    Default { e: usize },
    Explicit { coeffs: Vec<i64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModuleSpec {
    Summands(Vec<SummandSpec>),
    Presentation(PresentationSpec),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummandSpec {
    pub kind: SummandKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u64>,
    /// Coefficients of the unit in `FUr`, lowest degree first; defaults to `1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_coeffs: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SummandKind {
    Free,
    Ppow,
    PUr,
    FUr,
}

/// Relation rows; each entry is a series given by its coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationSpec {
    pub generators: usize,
    pub relations: Vec<Vec<Vec<i64>>>,
}

impl SpecDocument {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let doc: SpecDocument =
            serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed spec: {e}")))?;
        doc.validate()?;
        Ok(doc)
    }

    /// Builds every object once so that bad numbers fail at load time.
    fn validate(&self) -> Result<(), CliError> {
        if self.format_version != FORMAT_VERSION {
            return Err(CliError::Input(format!(
                "unsupported format_version {}, expected {FORMAT_VERSION}",
                self.format_version
            )));
        }
        self.params()?;
        self.eisenstein()?;
        for name in self.modules.keys() {
            self.module(name)?;
        }
        for (name, ledger) in &self.ledgers {
            ledger
                .check()
                .map_err(|e| CliError::Input(format!("ledger {name}: {e}")))?;
        }
        Ok(())
    }

    pub fn params(&self) -> Result<RingParams, CliError> {
        RingParams::new(self.ring.p, self.ring.p_prec, self.ring.u_prec).map_err(input)
    }

    pub fn eisenstein(&self) -> Result<EisensteinPoly, CliError> {
        match &self.eisenstein {
            EisensteinSpec::Default { e } => EisensteinPoly::default_for(self.ring.p, *e),
            EisensteinSpec::Explicit { coeffs } => EisensteinPoly::new(self.ring.p, coeffs.clone()),
        }
        .map_err(input)
    }

    pub fn module(&self, name: &str) -> Result<BKModule, CliError> {
        let spec = self
            .modules
            .get(name)
            .ok_or_else(|| CliError::Input(format!("no module named {name:?} in the spec")))?;
        let params = self.params()?;
        let ctx = |e: bk_core::Error| CliError::Input(format!("module {name}: {e}"));
        match spec {
            ModuleSpec::Summands(list) => {
                let summands = list
                    .iter()
                    .map(|s| s.build(params))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| match e {
                        CliError::Input(msg) => CliError::Input(format!("module {name}: {msg}")),
                        other => other,
                    })?;
                BKModule::from_summands(params, summands).map_err(ctx)
            }
            ModuleSpec::Presentation(p) => {
                let relations = p
                    .relations
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|c| TruncatedSeries::from_coeffs(params, c))
                            .collect()
                    })
                    .collect();
                let pres = Presentation::new(params, p.generators, relations).map_err(ctx)?;
                Ok(BKModule::from_presentation(params, pres))
            }
        }
    }

    pub fn ledger(&self, name: &str) -> Result<&LengthLedger, CliError> {
        self.ledgers
            .get(name)
            .ok_or_else(|| CliError::Input(format!("no ledger named {name:?} in the spec")))
    }
}

impl SummandSpec {
    fn build(&self, params: RingParams) -> Result<CyclicSummand, CliError> {
        let need = |v: Option<u64>, field: &str| {
            v.ok_or_else(|| CliError::Input(format!("{:?} summand needs field {field:?}", self.kind)))
        };
        let s = match self.kind {
            SummandKind::Free => Ok(CyclicSummand::Free),
            SummandKind::Ppow => CyclicSummand::ppow(need(self.a, "a")?),
            SummandKind::PUr => CyclicSummand::pur(self.a.unwrap_or(1), need(self.r, "r")?),
            SummandKind::FUr => {
                let unit = match &self.unit_coeffs {
                    Some(c) => TruncatedSeries::from_coeffs(params, c),
                    None => TruncatedSeries::one(params),
                };
                CyclicSummand::fur(need(self.alpha, "alpha")?, unit, need(self.r, "r")?)
            }
        };
        s.map_err(input)
    }
}

fn input(e: bk_core::Error) -> CliError {
    CliError::Input(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "format_version": 1,
        "ring": {"p": 3, "p_prec": 4, "u_prec": 64},
        "eisenstein": {"kind": "default", "e": 4},
        "modules": {
            "k2": [{"kind": "PUr", "a": 1, "r": 2}],
            "mixed": [{"kind": "FUr", "alpha": 1, "r": 3, "unit_coeffs": [1, 1]}, {"kind": "Free"}],
            "ideal": {"generators": 2, "relations": [[[0, 1], [-3]]]}
        },
        "ledgers": {
            "lp": {"degree": 2, "l_crys": [2, 2], "l_dR": [4, 4]}
        }
    }"#;

    #[test]
    fn sample_loads_and_builds() {
        let doc = SpecDocument::parse(SAMPLE).unwrap();
        assert_eq!(doc.eisenstein().unwrap().degree(), 4);
        assert_eq!(doc.module("k2").unwrap().summands().unwrap().len(), 1);
        assert!(doc.module("ideal").unwrap().presentation().is_some());
        assert!(doc.module("missing").is_err());
        assert_eq!(doc.ledger("lp").unwrap().degree, 2);
    }

    #[test]
    fn round_trip_is_identity() {
        let doc = SpecDocument::parse(SAMPLE).unwrap();
        let text = serde_json::to_string_pretty(&doc).unwrap();
        assert_eq!(SpecDocument::parse(&text).unwrap(), doc);
    }

    #[test]
    fn bad_numbers_fail_on_load() {
        let bad_prime = SAMPLE.replace("\"p\": 3", "\"p\": 4");
        assert!(matches!(SpecDocument::parse(&bad_prime), Err(CliError::Input(_))));
        let bad_version = SAMPLE.replace("\"format_version\": 1", "\"format_version\": 2");
        assert!(SpecDocument::parse(&bad_version).is_err());
        let missing_r = SAMPLE.replace("\"a\": 1, \"r\": 2", "\"a\": 1");
        assert!(SpecDocument::parse(&missing_r).is_err());
        let bad_eisenstein = SAMPLE.replace(
            r#"{"kind": "default", "e": 4}"#,
            r#"{"kind": "explicit", "coeffs": [9, 0]}"#,
        );
        assert!(SpecDocument::parse(&bad_eisenstein).is_err());
    }
}
