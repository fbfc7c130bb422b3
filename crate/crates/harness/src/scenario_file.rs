//! Scenario files: plain key-value text with `[section]` headers.
//!
//! ```text
//! [scenario]
//! id = headline
//! d = 1
//! n = 4096
//! target = linear
//! trials = 20000
//! seed = 42
//! delta = 0.049787068367863944
//! query = fixed
//! query_point = 0.5
//!
//! [noise]
//! kind = gaussian      # gaussian | student_t | pareto
//! sigma = 0.5
//! # nu = 2.5           # student_t only
//! # tail_index = 3.0   # pareto only
//!
//! [model]
//! rho = 1.0
//! # alpha = 0.9        # required for mnn
//!
//! [estimator]
//! kind = knn           # knn | bagged | mnn | kernel | partition
//! mode = mom           # mom | adaptive
//! m = auto             # integer or auto (= ceil ln(1/delta))
//! tuning = auto        # number or auto (closed-form rule)
//! robust = false
//!
//! [contamination]      # optional section
//! count = 1
//! placement = block_concentrated   # | uniform_random
//! y = 500000.0
//! x = query            # query | random | comma-separated coordinates
//! ```

use std::collections::BTreeMap;

use momreg_core::error::{Error, Result};
use momreg_core::EstimatorFamily;

use crate::contaminate::{ContaminationSpec, OutlierPlacement, OutlierX};
use crate::scenario::{EstimatorSpec, NoiseSpec, QueryPolicy, ScenarioSpec, TargetFn, TuningValue};

/// Normalized section → key → value view of a scenario file; serializes
/// deterministically, so it doubles as the config echo in JSON reports.
pub type ScenarioDoc = BTreeMap<String, BTreeMap<String, String>>;

/// Parse the section/key/value structure, with line numbers on errors.
pub fn parse_doc(text: &str, path: &str) -> Result<ScenarioDoc> {
    let mut doc: ScenarioDoc = BTreeMap::new();
    let mut section: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| Error::Parse {
                path: path.to_string(),
                line: line_no,
                msg: "unterminated section header".to_string(),
            })?;
            let name = name.trim().to_string();
            doc.entry(name.clone()).or_default();
            section = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                path: path.to_string(),
                line: line_no,
                msg: format!("expected key = value, got {line:?}"),
            });
        };
        let Some(section) = &section else {
            return Err(Error::Parse {
                path: path.to_string(),
                line: line_no,
                msg: "key outside any [section]".to_string(),
            });
        };
        doc.get_mut(section)
            .expect("section inserted on header")
            .insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(doc)
}

struct Section<'a> {
    name: &'a str,
    map: &'a BTreeMap<String, String>,
}

impl<'a> Section<'a> {
    fn get(&self, key: &str) -> Result<&'a str> {
        self.map
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::invalid(format!("[{}] is missing key {key:?}", self.name)))
    }

    fn get_or(&self, key: &str, default: &'a str) -> &'a str {
        self.map.get(key).map(String::as_str).unwrap_or(default)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.get(key)?;
        raw.parse()
            .map_err(|e| Error::invalid(format!("[{}] {key} = {raw:?}: {e}", self.name)))
    }
}

fn section<'a>(doc: &'a ScenarioDoc, name: &'a str) -> Result<Section<'a>> {
    doc.get(name)
        .map(|map| Section { name, map })
        .ok_or_else(|| Error::invalid(format!("scenario file is missing section [{name}]")))
}

fn parse_coords(raw: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|e| Error::invalid(format!("bad coordinate {f:?}: {e}")))
        })
        .collect()
}

/// Build a runnable spec from a parsed document.
pub fn spec_from_doc(doc: &ScenarioDoc) -> Result<ScenarioSpec> {
    let scenario = section(doc, "scenario")?;
    let noise_sec = section(doc, "noise")?;
    let model = section(doc, "model")?;
    let estimator_sec = section(doc, "estimator")?;

    let d: usize = scenario.parse("d")?;
    let sigma: f64 = noise_sec.parse("sigma")?;
    let noise = match noise_sec.get("kind")? {
        "gaussian" => NoiseSpec::Gaussian { sigma },
        "student_t" => NoiseSpec::StudentT {
            nu: noise_sec.parse("nu")?,
            sigma,
        },
        "pareto" => NoiseSpec::SymmetricPareto {
            tail_index: noise_sec.parse("tail_index")?,
            sigma,
        },
        other => {
            return Err(Error::invalid(format!(
                "unknown noise kind {other:?}; expected gaussian|student_t|pareto"
            )))
        }
    };

    let family = EstimatorFamily::parse(estimator_sec.get("kind")?)?;
    let mode = estimator_sec.get_or("mode", "mom");
    let estimator = match mode {
        "adaptive" => EstimatorSpec::Adaptive { family },
        "mom" => {
            let m = match estimator_sec.get_or("m", "auto") {
                "auto" => None,
                raw => Some(
                    raw.parse::<usize>()
                        .map_err(|e| Error::invalid(format!("[estimator] m = {raw:?}: {e}")))?,
                ),
            };
            let tuning = match estimator_sec.get_or("tuning", "auto") {
                "auto" => None,
                raw => Some(match family {
                    EstimatorFamily::Kernel => {
                        TuningValue::Bandwidth(raw.parse().map_err(|e| {
                            Error::invalid(format!("[estimator] tuning = {raw:?}: {e}"))
                        })?)
                    }
                    EstimatorFamily::Partition => TuningValue::Cells(raw.parse().map_err(|e| {
                        Error::invalid(format!("[estimator] tuning = {raw:?}: {e}"))
                    })?),
                    _ => TuningValue::Neighbors(raw.parse().map_err(|e| {
                        Error::invalid(format!("[estimator] tuning = {raw:?}: {e}"))
                    })?),
                }),
            };
            let robust = estimator_sec
                .get_or("robust", "false")
                .parse::<bool>()
                .map_err(|e| Error::invalid(format!("[estimator] robust: {e}")))?;
            EstimatorSpec::Mom {
                family,
                m,
                tuning,
                robust,
            }
        }
        other => {
            return Err(Error::invalid(format!(
                "unknown estimator mode {other:?}; expected mom|adaptive"
            )))
        }
    };

    let query = match scenario.get_or("query", "fixed") {
        "fresh" => QueryPolicy::Fresh,
        "fixed" => QueryPolicy::Fixed {
            point: parse_coords(scenario.get("query_point")?)?,
        },
        other => {
            return Err(Error::invalid(format!(
                "unknown query policy {other:?}; expected fixed|fresh"
            )))
        }
    };

    let contamination = match doc.get("contamination") {
        None => None,
        Some(map) => {
            let sec = Section {
                name: "contamination",
                map,
            };
            let placement = match sec.get_or("placement", "block_concentrated") {
                "block_concentrated" => OutlierPlacement::BlockConcentrated,
                "uniform_random" => OutlierPlacement::UniformRandom,
                other => {
                    return Err(Error::invalid(format!(
                        "unknown placement {other:?}; expected block_concentrated|uniform_random"
                    )))
                }
            };
            let x = match sec.get_or("x", "random") {
                "random" => OutlierX::Random,
                "query" => {
                    let QueryPolicy::Fixed { point } = &query else {
                        return Err(Error::invalid(
                            "contamination x = query requires a fixed query point",
                        ));
                    };
                    OutlierX::Fixed(point.clone())
                }
                raw => OutlierX::Fixed(parse_coords(raw)?),
            };
            Some(ContaminationSpec {
                count: sec.parse("count")?,
                placement,
                y: sec.parse("y")?,
                x,
            })
        }
    };

    let spec = ScenarioSpec {
        id: scenario.get("id")?.to_string(),
        d,
        n: scenario.parse("n")?,
        target: TargetFn::parse(scenario.get("target")?)?,
        noise,
        rho: model.parse("rho")?,
        alpha: match model.map.get("alpha") {
            Some(raw) => Some(
                raw.parse::<f64>()
                    .map_err(|e| Error::invalid(format!("[model] alpha = {raw:?}: {e}")))?,
            ),
            None => None,
        },
        estimator,
        delta: scenario.parse("delta")?,
        trials: scenario.parse("trials")?,
        seed: scenario.parse("seed")?,
        query,
        contamination,
    };
    spec.validate()?;
    Ok(spec)
}

/// Parse a scenario file into its spec plus the normalized echo document.
pub fn parse_scenario(text: &str, path: &str) -> Result<(ScenarioSpec, ScenarioDoc)> {
    let doc = parse_doc(text, path)?;
    let spec = spec_from_doc(&doc)?;
    Ok((spec, doc))
}
