//! JSON ingestion and emission of series files.
//!
//! Accepted shapes:
//!
//! ```json
//! {"terms": [[n, m, re, im], ...], "certs": [[R, C], ...]}
//! {"builtin": "exp_conj"}
//! ```

use serde::{Deserialize, Serialize};

use super::bi_series::{BiPowerSeries, DecayCert};
use crate::{Complex, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeriesFile {
    Builtin {
        builtin: String,
    },
    Explicit {
        terms: Vec<(u32, u32, f64, f64)>,
        #[serde(default)]
        certs: Vec<(f64, f64)>,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        truncation_note: String,
    },
}

impl SeriesFile {
    pub fn into_series(self) -> Result<BiPowerSeries> {
        match self {
            SeriesFile::Builtin { builtin } => builtin_series(&builtin),
            SeriesFile::Explicit {
                terms,
                certs,
                truncation_note,
            } => BiPowerSeries::new(
                terms
                    .into_iter()
                    .map(|(n, m, re, im)| (n, m, Complex::new(re, im))),
                certs
                    .into_iter()
                    .map(|(radius, constant)| DecayCert {
                        radius,
                        constant,
                        empirical: false,
                    })
                    .collect(),
                truncation_note,
            ),
        }
    }

    pub fn from_series(s: &BiPowerSeries) -> Self {
        SeriesFile::Explicit {
            terms: s.terms().map(|(n, m, a)| (n, m, a.re, a.im)).collect(),
            certs: s.certs().iter().map(|c| (c.radius, c.constant)).collect(),
            truncation_note: s.truncation_note().to_string(),
        }
    }
}

pub fn builtin_series(name: &str) -> Result<BiPowerSeries> {
    match name {
        "conj" => Ok(BiPowerSeries::conj()),
        "identity" => Ok(BiPowerSeries::identity()),
        "exp_conj" => Ok(BiPowerSeries::exp_conj()),
        "square" => Ok(BiPowerSeries::square()),
        other => Err(Error::InvalidInput(format!(
            "'{other}' is not a series builtin (conj, identity, exp_conj, square)"
        ))),
    }
}

pub fn parse_series(json: &str) -> Result<BiPowerSeries> {
    let file: SeriesFile =
        serde_json::from_str(json).map_err(|e| Error::InvalidInput(format!("series file: {e}")))?;
    file.into_series()
}

pub fn emit_series(s: &BiPowerSeries) -> String {
    serde_json::to_string(&SeriesFile::from_series(s)).expect("series serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn builtin_and_explicit_forms() {
        let s = parse_series(r#"{"builtin":"exp_conj"}"#).unwrap();
        assert_eq!(s.max_total_degree(), 80);
        let s = parse_series(r#"{"terms":[[0,1,1.0,0.0]],"certs":[[8.0,8.0]]}"#).unwrap();
        assert_eq!(s.certs().len(), 1);
        assert!(!s.certs()[0].empirical);
        assert!(parse_series(r#"{"terms":[[0,1,1.0,0.0]],"certs":[[8.0,1.0]]}"#).is_err());
        assert!(parse_series(r#"{"builtin":"pole1"}"#).is_err());
    }

    proptest! {
        #[test]
        fn reemission_round_trips(coeffs in prop::collection::vec((0u32..6, 0u32..6, -10.0f64..10.0, -10.0f64..10.0), 1..12)) {
            let mut seen = std::collections::BTreeSet::new();
            let terms: Vec<_> = coeffs.into_iter().filter(|t| seen.insert((t.0, t.1))).collect();
            let file = SeriesFile::Explicit { terms, certs: vec![], truncation_note: String::new() };
            let s = file.into_series().unwrap().with_fitted_certs(&[8.0]).unwrap();
            let back = parse_series(&emit_series(&s)).unwrap();
            for (n, m, a) in s.terms() {
                prop_assert!((back.coeff(n, m) - a).norm() <= 1e-15 * a.norm().max(1.0));
            }
            prop_assert_eq!(back.certs().len(), 1);
        }
    }
}
