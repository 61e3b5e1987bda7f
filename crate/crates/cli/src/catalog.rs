//! Catalog files: the durable output of `enumerate` and `verify`.
//!
//! JSON schema (format 1), keys in this order:
//!
//! ```text
//! { "header": { "format", "tool", "n", "s", "m", "seed", "config_hash", "cond_c" },
//!   "rows": [ { "arrangement", "m_prime", "admissible", "status", "residual",
//!               "fixed_point_residual", "path", "reextracted", "witness",
//!               "witness_exact" } ],
//!   "soundness": { "samples", "out_of_domain", "distinct_observed", "violations" } | null }
//! ```
//!
//! Wall times are kept out of the JSON form so that it is byte-identical
//! across runs; the CSV form carries them in its last column. CSV starts
//! with `#`-prefixed `key value` header lines, then the columns
//! `arrangement,m_prime,admissible,status,residual,fixed_point_residual,path,reextracted,witness,witness_exact,wall_ms`
//! with coefficient lists separated by single spaces.

use std::io::{BufRead, Write};
use std::path::Path;

use rootchain::admissibility::CondCMode;
use rootchain::realizer::RealizationPath;
use rootchain::verify::{RowStatus, SoundnessReport};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

const COLUMNS: [&str; 11] = [
    "arrangement",
    "m_prime",
    "admissible",
    "status",
    "residual",
    "fixed_point_residual",
    "path",
    "reextracted",
    "witness",
    "witness_exact",
    "wall_ms",
];

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("cannot access catalog {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed catalog: {0}")]
    Format(String),
}

fn format_err(e: impl std::fmt::Display) -> CatalogError {
    CatalogError::Format(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogHeader {
    pub format: u32,
    pub tool: String,
    pub n: u32,
    pub s: u32,
    pub m: u32,
    pub seed: u64,
    pub config_hash: String,
    pub cond_c: CondCMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogRow {
    pub arrangement: String,
    pub m_prime: u32,
    pub admissible: bool,
    pub status: Option<RowStatus>,
    pub residual: Option<f64>,
    pub fixed_point_residual: Option<f64>,
    pub path: Option<RealizationPath>,
    pub reextracted: Option<String>,
    /// Witness coefficients, leading first, 17 significant digits.
    pub witness: Option<Vec<String>>,
    /// Same coefficients as exact rationals when the witness is exact.
    pub witness_exact: Option<Vec<String>>,
    #[serde(skip)]
    pub wall_ms: Option<f64>,
}

impl CatalogRow {
    pub fn verdict_only(arrangement: String, m_prime: u32, admissible: bool) -> Self {
        CatalogRow {
            arrangement,
            m_prime,
            admissible,
            status: None,
            residual: None,
            fixed_point_residual: None,
            path: None,
            reextracted: None,
            witness: None,
            witness_exact: None,
            wall_ms: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationRow {
    pub arrangement: String,
    pub polynomial: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoundnessSummary {
    pub samples: u64,
    pub out_of_domain: u64,
    pub distinct_observed: u64,
    pub violations: Vec<ViolationRow>,
}

impl From<&SoundnessReport> for SoundnessSummary {
    fn from(r: &SoundnessReport) -> Self {
        SoundnessSummary {
            samples: r.samples,
            out_of_domain: r.out_of_domain,
            distinct_observed: r.observed.len() as u64,
            violations: r
                .violations
                .iter()
                .map(|v| ViolationRow {
                    arrangement: v.arrangement.clone(),
                    polynomial: v.polynomial.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub header: CatalogHeader,
    pub rows: Vec<CatalogRow>,
    pub soundness: Option<SoundnessSummary>,
}

impl Catalog {
    pub fn new(header: CatalogHeader, mut rows: Vec<CatalogRow>, soundness: Option<SoundnessSummary>) -> Self {
        rows.sort_by(|a, b| a.arrangement.cmp(&b.arrangement));
        Catalog { header, rows, soundness }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("catalog serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CatalogError> {
        let cat: Catalog = serde_json::from_str(text).map_err(format_err)?;
        cat.check_format()?;
        Ok(cat)
    }

    fn check_format(&self) -> Result<(), CatalogError> {
        if self.header.format != FORMAT_VERSION {
            return Err(CatalogError::Format(format!(
                "format {} is not supported (expected {FORMAT_VERSION})",
                self.header.format
            )));
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let h = &self.header;
        let mut out = String::new();
        out.push_str(&format!("# format {}\n# tool {}\n", h.format, h.tool));
        out.push_str(&format!("# n {}\n# s {}\n# m {}\n# seed {}\n", h.n, h.s, h.m, h.seed));
        out.push_str(&format!("# config_hash {}\n# cond_c {}\n", h.config_hash, cond_c_name(h.cond_c)));
        if let Some(sd) = &self.soundness {
            out.push_str(&format!(
                "# soundness samples={} out_of_domain={} distinct_observed={}\n",
                sd.samples, sd.out_of_domain, sd.distinct_observed
            ));
            for v in &sd.violations {
                out.push_str(&format!("# violation {} | {}\n", v.arrangement, v.polynomial));
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(COLUMNS).expect("in-memory write");
        for r in &self.rows {
            let opt = |x: Option<String>| x.unwrap_or_default();
            w.write_record([
                r.arrangement.clone(),
                r.m_prime.to_string(),
                r.admissible.to_string(),
                opt(r.status.map(|s| enum_name(&s))),
                opt(r.residual.map(|x| x.to_string())),
                opt(r.fixed_point_residual.map(|x| x.to_string())),
                opt(r.path.map(|p| enum_name(&p))),
                opt(r.reextracted.clone()),
                opt(r.witness.as_ref().map(|c| c.join(" "))),
                opt(r.witness_exact.as_ref().map(|c| c.join(" "))),
                opt(r.wall_ms.map(|x| format!("{x:.3}"))),
            ])
            .expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, CatalogError> {
        let mut fields = std::collections::BTreeMap::new();
        let mut soundness: Option<SoundnessSummary> = None;
        let mut body = String::new();
        for line in text.as_bytes().lines() {
            let line = line.map_err(format_err)?;
            let Some(rest) = line.strip_prefix('#') else {
                body.push_str(&line);
                body.push('\n');
                continue;
            };
            let rest = rest.trim();
            let (key, value) = rest.split_once(' ').unwrap_or((rest, ""));
            match key {
                "soundness" => {
                    let mut sd = SoundnessSummary {
                        samples: 0,
                        out_of_domain: 0,
                        distinct_observed: 0,
                        violations: Vec::new(),
                    };
                    for kv in value.split_whitespace() {
                        let (k, v) = kv.split_once('=').ok_or_else(|| format_err(kv))?;
                        let v: u64 = v.parse().map_err(format_err)?;
                        match k {
                            "samples" => sd.samples = v,
                            "out_of_domain" => sd.out_of_domain = v,
                            "distinct_observed" => sd.distinct_observed = v,
                            _ => return Err(format_err(format!("unknown soundness key {k}"))),
                        }
                    }
                    soundness = Some(sd);
                }
                "violation" => {
                    let (a, p) = value.split_once(" | ").ok_or_else(|| format_err(value))?;
                    soundness
                        .as_mut()
                        .ok_or_else(|| format_err("violation before soundness line"))?
                        .violations
                        .push(ViolationRow {
                            arrangement: a.to_string(),
                            polynomial: p.to_string(),
                        });
                }
                _ => {
                    fields.insert(key.to_string(), value.to_string());
                }
            }
        }
        let get = |k: &str| fields.get(k).cloned().ok_or_else(|| format_err(format!("missing header {k}")));
        let num = |k: &str| -> Result<u64, CatalogError> { get(k)?.parse().map_err(format_err) };
        let header = CatalogHeader {
            format: num("format")? as u32,
            tool: get("tool")?,
            n: num("n")? as u32,
            s: num("s")? as u32,
            m: num("m")? as u32,
            seed: num("seed")?,
            config_hash: get("config_hash")?,
            cond_c: get("cond_c")?.parse().map_err(format_err)?,
        };

        let mut rows = Vec::new();
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let names: Vec<String> = rdr.headers().map_err(format_err)?.iter().map(str::to_string).collect();
        if names != COLUMNS {
            return Err(format_err(format!("unexpected columns {names:?}")));
        }
        for rec in rdr.records() {
            let rec = rec.map_err(format_err)?;
            let cell = |i: usize| Some(rec[i].to_string()).filter(|c| !c.is_empty());
            let float = |i: usize| cell(i).map(|c| c.parse::<f64>()).transpose().map_err(format_err);
            let list = |i: usize| cell(i).map(|c| c.split(' ').map(str::to_string).collect::<Vec<_>>());
            rows.push(CatalogRow {
                arrangement: rec[0].to_string(),
                m_prime: rec[1].parse().map_err(format_err)?,
                admissible: rec[2].parse().map_err(format_err)?,
                status: cell(3).map(|c| from_name(&c)).transpose()?,
                residual: float(4)?,
                fixed_point_residual: float(5)?,
                path: cell(6).map(|c| from_name(&c)).transpose()?,
                reextracted: cell(7),
                witness: list(8),
                witness_exact: list(9),
                wall_ms: float(10)?,
            });
        }
        let cat = Catalog::new(header, rows, soundness);
        cat.check_format()?;
        Ok(cat)
    }

    /// Write as CSV when the extension is `.csv`, JSON otherwise.
    pub fn write(&self, path: &Path) -> Result<(), CatalogError> {
        let text = if is_csv(path) { self.to_csv() } else { self.to_json() };
        let io = |source| CatalogError::Io {
            path: path.display().to_string(),
            source,
        };
        let mut f = std::fs::File::create(path).map_err(io)?;
        f.write_all(text.as_bytes()).map_err(io)
    }

    pub fn read(path: &Path) -> Result<Self, CatalogError> {
        let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if text.trim_start().starts_with('{') {
            Catalog::from_json(&text)
        } else {
            Catalog::from_csv(&text)
        }
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn enum_name<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        other => panic!("not a unit enum: {other:?}"),
    }
}

fn from_name<T: for<'de> Deserialize<'de>>(name: &str) -> Result<T, CatalogError> {
    serde_json::from_value(serde_json::Value::String(name.to_string())).map_err(format_err)
}

pub fn cond_c_name(mode: CondCMode) -> String {
    enum_name(&mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Catalog {
        let header = CatalogHeader {
            format: FORMAT_VERSION,
            tool: "rootchain 0.1.0".into(),
            n: 2,
            s: 1,
            m: 0,
            seed: 3,
            config_hash: "00ff".into(),
            cond_c: CondCMode::HyperbolicOnly,
        };
        let mut realized = CatalogRow::verdict_only("P^2Q".into(), 0, true);
        realized.status = Some(RowStatus::Realized);
        realized.residual = Some(0.0);
        realized.path = Some(RealizationPath::FixedPoint);
        realized.reextracted = Some("P^2Q".into());
        realized.witness = Some(vec!["1.0000000000000000e0".into(), "0.0000000000000000e0".into()]);
        realized.witness_exact = Some(vec!["1".into(), "-1/2".into(), "1/16".into()]);
        realized.wall_ms = Some(1.25);
        let rows = vec![realized, CatalogRow::verdict_only("P < Q < P".into(), 0, true)];
        let soundness = SoundnessSummary {
            samples: 10,
            out_of_domain: 0,
            distinct_observed: 2,
            violations: vec![ViolationRow {
                arrangement: "Q < P < P".into(),
                polynomial: "x^2".into(),
            }],
        };
        Catalog::new(header, rows, Some(soundness))
    }

    #[test]
    fn rows_are_sorted() {
        let c = sample();
        assert_eq!(c.rows[0].arrangement, "P < Q < P");
    }

    #[test]
    fn csv_roundtrip() {
        let c = sample();
        let back = Catalog::from_csv(&c.to_csv()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn json_roundtrip_drops_wall_time() {
        let c = sample();
        let back = Catalog::from_json(&c.to_json()).unwrap();
        assert_eq!(back.rows[1].wall_ms, None);
        assert!(!c.to_json().contains("wall"));
        assert_eq!(back.rows[1].witness_exact, c.rows[1].witness_exact);
    }

    #[test]
    fn future_format_is_rejected() {
        let mut c = sample();
        c.header.format = 2;
        assert!(Catalog::from_json(&c.to_json()).is_err());
    }
}
