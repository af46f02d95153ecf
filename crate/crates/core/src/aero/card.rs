//! On-disk formats: coefficient samples (CSV) and model cards (JSON).
//!
//! Samples CSV has the header `alpha_deg,cd,cl` with an optional trailing
//! `weight` column. A model card looks like
//!
//! ```json
//! {"family": "sin2", "k_a": 0.06, "params": {"c0": 0.43, "c1": 0.462},
//!  "cd0": 1.354, "source": {"re": 7.96e6, "mach": 6.0},
//!  "residuals": {"cd_rms": 0.01, "cl_rms": 0.02}}
//! ```

use super::{AeroError, AeroFamily, AeroModel, CoefficientTable, FitResiduals};
use serde::{Deserialize, Serialize};
use std::io::Read;

/// One coefficient measurement. `alpha` is in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub alpha: f64,
    pub cd: f64,
    pub cl: f64,
    pub weight: f64,
}

impl Sample {
    pub fn new(alpha: f64, cd: f64, cl: f64) -> Self {
        Sample {
            alpha,
            cd,
            cl,
            weight: 1.0,
        }
    }
}

#[derive(Debug, Deserialize)]
struct SampleRow {
    alpha_deg: f64,
    cd: f64,
    cl: f64,
    #[serde(default)]
    weight: Option<f64>,
}

/// Reads samples from CSV text with header `alpha_deg,cd,cl[,weight]`.
pub fn parse_samples<R: Read>(reader: R) -> Result<Vec<Sample>, AeroError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| AeroError::InvalidSamples(e.to_string()))?
        .clone();
    let names: Vec<&str> = headers.iter().collect();
    if names != ["alpha_deg", "cd", "cl"] && names != ["alpha_deg", "cd", "cl", "weight"] {
        return Err(AeroError::InvalidSamples(format!(
            "expected header alpha_deg,cd,cl[,weight], got {}",
            names.join(",")
        )));
    }
    let mut samples = Vec::new();
    for (line, row) in rdr.deserialize::<SampleRow>().enumerate() {
        let row = row.map_err(|e| AeroError::InvalidSamples(format!("row {}: {e}", line + 1)))?;
        let weight = row.weight.unwrap_or(1.0);
        if ![row.alpha_deg, row.cd, row.cl, weight]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(AeroError::InvalidSamples(format!(
                "row {}: non-finite value",
                line + 1
            )));
        }
        if !(0.0..=180.0).contains(&row.alpha_deg) {
            return Err(AeroError::InvalidSamples(format!(
                "row {}: alpha_deg {} outside [0, 180]",
                line + 1,
                row.alpha_deg
            )));
        }
        if weight <= 0.0 {
            return Err(AeroError::InvalidSamples(format!(
                "row {}: weight must be positive",
                line + 1
            )));
        }
        samples.push(Sample {
            alpha: row.alpha_deg.to_radians(),
            cd: row.cd,
            cl: row.cl,
            weight,
        });
    }
    if samples.is_empty() {
        return Err(AeroError::InvalidSamples("no rows".into()));
    }
    Ok(samples)
}

/// Reynolds and Mach numbers of the data a model was identified from.
/// Metadata only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowConditions {
    pub re: Option<f64>,
    pub mach: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CardFamily {
    Sin2,
    Tan,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CardParams {
    Sin2 {
        c0: f64,
        c1: f64,
    },
    Tan {
        c0_bar: f64,
        c1_bar: f64,
    },
    Tabulated {
        alpha_deg: Vec<f64>,
        cd: Vec<f64>,
        cl: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lift_over_sine: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CardResiduals {
    pub cd_rms: f64,
    pub cl_rms: f64,
}

impl From<FitResiduals> for CardResiduals {
    fn from(r: FitResiduals) -> Self {
        CardResiduals {
            cd_rms: r.cd_rms,
            cl_rms: r.cl_rms,
        }
    }
}

/// Serialized aerodynamic model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelCard {
    pub family: CardFamily,
    pub k_a: f64,
    pub params: CardParams,
    #[serde(default)]
    pub cd0: Option<f64>,
    #[serde(default)]
    pub source: Option<FlowConditions>,
    #[serde(default)]
    pub residuals: Option<CardResiduals>,
}

impl ModelCard {
    pub fn from_json_slice(bytes: &[u8]) -> Result<Self, AeroError> {
        serde_json::from_slice(bytes)
            .map_err(|e| AeroError::InvalidModel(format!("model card: {e}")))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("model card serializes")
    }

    /// Builds a card for `model`, filling `cd0` when the model has one.
    pub fn from_model(model: &AeroModel, residuals: Option<FitResiduals>) -> Self {
        let (family, params) = match &model.family {
            AeroFamily::SymmetricSin2 { c0, c1 } => {
                (CardFamily::Sin2, CardParams::Sin2 { c0: *c0, c1: *c1 })
            }
            AeroFamily::TanFamily { c0_bar, c1_bar } => (
                CardFamily::Tan,
                CardParams::Tan {
                    c0_bar: *c0_bar,
                    c1_bar: *c1_bar,
                },
            ),
            AeroFamily::Tabulated(t) => (
                CardFamily::Tabulated,
                CardParams::Tabulated {
                    alpha_deg: t.alpha().iter().map(|a| a.to_degrees()).collect(),
                    cd: t.cd().to_vec(),
                    cl: t.cl().to_vec(),
                    lift_over_sine: t.lift_over_sine().map(<[f64]>::to_vec),
                },
            ),
        };
        ModelCard {
            family,
            k_a: model.k_a,
            params,
            cd0: model.cd0(),
            source: model.source,
            residuals: residuals.map(Into::into),
        }
    }

    pub fn to_model(&self) -> Result<AeroModel, AeroError> {
        let family = match (&self.family, &self.params) {
            (CardFamily::Sin2, CardParams::Sin2 { c0, c1 }) => {
                AeroFamily::SymmetricSin2 { c0: *c0, c1: *c1 }
            }
            (CardFamily::Tan, CardParams::Tan { c0_bar, c1_bar }) => AeroFamily::TanFamily {
                c0_bar: *c0_bar,
                c1_bar: *c1_bar,
            },
            (
                CardFamily::Tabulated,
                CardParams::Tabulated {
                    alpha_deg,
                    cd,
                    cl,
                    lift_over_sine,
                },
            ) => AeroFamily::Tabulated(CoefficientTable::new(
                alpha_deg.iter().map(|a| a.to_radians()).collect(),
                cd.clone(),
                cl.clone(),
                lift_over_sine.clone(),
            )?),
            (family, _) => {
                return Err(AeroError::InvalidModel(format!(
                    "params do not match family {family:?}"
                )));
            }
        };
        let model = AeroModel::new(self.k_a, family)?;
        if let (Some(stated), Some(actual)) = (self.cd0, model.cd0()) {
            if (stated - actual).abs() > 1e-9 * actual.abs().max(1.0) {
                log::warn!("model card states cd0 = {stated} but its coefficients give {actual}");
            }
        }
        Ok(match self.source {
            Some(src) => model.with_source(src),
            None => model,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_samples() {
        let text = "alpha_deg,cd,cl\n0,0.43,0\n90, 1.354 ,0.0\n";
        let s = parse_samples(text.as_bytes()).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].alpha, 90f64.to_radians());
        assert_eq!(s[1].cd, 1.354);
        assert_eq!(s[0].weight, 1.0);

        let weighted = parse_samples("alpha_deg,cd,cl,weight\n10,1,0.2,3\n".as_bytes()).unwrap();
        assert_eq!(weighted[0].weight, 3.0);
    }

    #[test]
    fn rejects_bad_samples() {
        for bad in [
            "alpha,cd,cl\n1,2,3\n",
            "alpha_deg,cd,cl\n",
            "alpha_deg,cd,cl\n1,2\n",
            "alpha_deg,cd,cl\nx,2,3\n",
            "alpha_deg,cd,cl\n190,2,3\n",
            "alpha_deg,cd,cl\nNaN,2,3\n",
            "alpha_deg,cd,cl,weight\n1,2,3,-1\n",
            "",
        ] {
            assert!(
                parse_samples(bad.as_bytes()).is_err(),
                "{bad:?} should fail"
            );
        }
    }

    #[test]
    fn card_round_trip() {
        let model = AeroModel::sin2(0.06, 0.43, 0.462)
            .unwrap()
            .with_source(FlowConditions {
                re: Some(7.96e6),
                mach: Some(6.0),
            });
        let card = ModelCard::from_model(&model, None);
        assert_eq!(card.family, CardFamily::Sin2);
        assert!((card.cd0.unwrap() - 1.354).abs() < 1e-15);
        let back = ModelCard::from_json_slice(card.to_json_pretty().as_bytes()).unwrap();
        assert_eq!(back.to_model().unwrap(), model);
    }

    #[test]
    fn card_variants() {
        let tan = br#"{"family":"tan","k_a":1,"params":{"c0_bar":0.05,"c1_bar":2}}"#;
        let m = ModelCard::from_json_slice(tan).unwrap().to_model().unwrap();
        assert_eq!(m.cd0(), Some(2.05));

        let table = br#"{"family":"tabulated","k_a":1,
            "params":{"alpha_deg":[0,90,180],"cd":[1,1,1],"cl":[0,0,0],"lift_over_sine":[0,0,0]}}"#;
        let m = ModelCard::from_json_slice(table)
            .unwrap()
            .to_model()
            .unwrap();
        assert_eq!(m.cd0(), Some(1.0));
        let card = ModelCard::from_model(&m, None);
        assert_eq!(
            ModelCard::from_json_slice(card.to_json_pretty().as_bytes()).unwrap(),
            card
        );

        let mismatch = br#"{"family":"tan","k_a":1,"params":{"c0":0.05,"c1":2}}"#;
        assert!(ModelCard::from_json_slice(mismatch)
            .unwrap()
            .to_model()
            .is_err());
        let unknown = br#"{"family":"sin2","k_a":1,"params":{"c0":0.05,"c1":2},"extra":1}"#;
        assert!(ModelCard::from_json_slice(unknown).is_err());
        assert!(ModelCard::from_json_slice(b"{").is_err());
    }
}
