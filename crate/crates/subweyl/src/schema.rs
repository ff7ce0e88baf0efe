//! On-disk formats: scheme files, parameter files, reports, and CSV
//! export. Decimal strings in files are the source of truth; loading and
//! re-saving a file is byte-identical.

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use crate::optimizer::{Scheme, SchemeRow};
use crate::pipeline::{
    assemble_certified, rational_from_decimal, CoefficientReport, H0Convention, H3Convention,
    ParamSet, PipelineConfig,
};
use crate::rigor::UpperScalar;
use crate::{Error, Result};

pub const TOOL: &str = concat!("subweyl ", env!("CARGO_PKG_VERSION"));

/// Exact decimal rendering of a rational, if its reduced denominator is of
/// the form 2^a 5^b; `None` otherwise.
pub fn decimal_from_rational(q: &Rational) -> Option<String> {
    let mut den = q.denom().clone();
    let mut k2 = 0u32;
    while den.is_even() {
        den /= 2;
        k2 += 1;
    }
    let mut k5 = 0u32;
    while den.clone() % Integer::from(5) == 0 {
        den /= 5;
        k5 += 1;
    }
    if den != 1 {
        return None;
    }
    let shift = k2.max(k5);
    let mut scaled = q.numer().clone();
    scaled *= Integer::from(2).pow(shift - k2);
    scaled *= Integer::from(5).pow(shift - k5);
    let neg = scaled < 0;
    let digits = scaled.abs().to_string();
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    if shift == 0 {
        s.push_str(&digits);
        return Some(s);
    }
    let shift = shift as usize;
    if digits.len() > shift {
        s.push_str(&digits[..digits.len() - shift]);
        let frac = digits[digits.len() - shift..].trim_end_matches('0');
        if !frac.is_empty() {
            s.push('.');
            s.push_str(frac);
        }
    } else {
        s.push_str("0.");
        for _ in 0..shift - digits.len() {
            s.push('0');
        }
        s.push_str(digits.trim_end_matches('0'));
    }
    Some(s)
}

/// Canonical string form: exact decimal when possible, `n/d` otherwise.
pub fn param_to_string(q: &Rational) -> String {
    decimal_from_rational(q).unwrap_or_else(|| q.to_string())
}

/// Parses the canonical form produced by `param_to_string` as well as
/// scientific notation.
pub fn param_from_string(s: &str) -> Result<Rational> {
    if let Some((n, d)) = s.split_once('/') {
        let num: Integer = n
            .trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("bad fraction numerator {n:?}")))?;
        let den: Integer = d
            .trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("bad fraction denominator {d:?}")))?;
        if den == 0 {
            return Err(Error::Malformed("fraction denominator is zero".into()));
        }
        return Ok(Rational::from((num, den)));
    }
    rational_from_decimal(s)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemeMeta {
    pub tool: String,
    pub precision_digits: u32,
    pub h3_convention: String,
    pub h0_convention: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemeFileRow {
    pub log_t0: String,
    /// `"inf"` marks the unbounded tail row.
    pub log_t1: String,
    pub h1: String,
    pub h2: String,
    pub eta1: String,
    pub eta2: String,
    pub theta1: String,
    pub theta2: String,
    pub theta3: String,
    /// Certified constant for the row, rounded up.
    pub a: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemeFile {
    pub meta: SchemeMeta,
    pub rows: Vec<SchemeFileRow>,
}

/// Number of significant digits used for certified constants in files.
const A_SIG: usize = 17;

fn convention_strings(pcfg: &PipelineConfig) -> (String, String) {
    let h3 = match pcfg.h3 {
        H3Convention::Proof => "proof",
        H3Convention::Statement => "statement",
    };
    let h0 = match pcfg.h0 {
        H0Convention::Theta1 => "theta1",
        H0Convention::Theta2 => "theta2",
    };
    (h3.into(), h0.into())
}

fn parse_conventions(meta: &SchemeMeta) -> Result<PipelineConfig> {
    let h3 = match meta.h3_convention.as_str() {
        "proof" => H3Convention::Proof,
        "statement" => H3Convention::Statement,
        other => return Err(Error::Malformed(format!("unknown h3 convention {other:?}"))),
    };
    let h0 = match meta.h0_convention.as_str() {
        "theta1" => H0Convention::Theta1,
        "theta2" => H0Convention::Theta2,
        other => return Err(Error::Malformed(format!("unknown h0 convention {other:?}"))),
    };
    Ok(PipelineConfig {
        digits: meta.precision_digits,
        h3,
        h0,
    })
}

pub fn scheme_to_file(
    scheme: &Scheme,
    pcfg: &PipelineConfig,
    seed: Option<u64>,
    budget: Option<u64>,
) -> SchemeFile {
    let (h3, h0) = convention_strings(pcfg);
    let rows = scheme
        .rows
        .iter()
        .map(|r| SchemeFileRow {
            log_t0: param_to_string(&r.params.log_t0),
            log_t1: r
                .params
                .log_t1
                .as_ref()
                .map(param_to_string)
                .unwrap_or_else(|| "inf".into()),
            h1: param_to_string(&r.params.h1),
            h2: param_to_string(&r.params.h2),
            eta1: param_to_string(&r.params.eta1),
            eta2: param_to_string(&r.params.eta2),
            theta1: param_to_string(&r.params.theta1),
            theta2: param_to_string(&r.params.theta2),
            theta3: param_to_string(&r.params.theta3),
            a: r.a.decimal(A_SIG),
        })
        .collect();
    SchemeFile {
        meta: SchemeMeta {
            tool: TOOL.into(),
            precision_digits: pcfg.digits,
            h3_convention: h3,
            h0_convention: h0,
            seed,
            budget,
        },
        rows,
    }
}

fn row_params(row: &SchemeFileRow) -> Result<ParamSet> {
    Ok(ParamSet {
        log_t0: param_from_string(&row.log_t0)?,
        log_t1: if row.log_t1 == "inf" {
            None
        } else {
            Some(param_from_string(&row.log_t1)?)
        },
        h1: param_from_string(&row.h1)?,
        h2: param_from_string(&row.h2)?,
        eta1: param_from_string(&row.eta1)?,
        eta2: param_from_string(&row.eta2)?,
        theta1: param_from_string(&row.theta1)?,
        theta2: param_from_string(&row.theta2)?,
        theta3: param_from_string(&row.theta3)?,
    })
}

/// Rebuilds the scheme from a file, re-certifying every row. The stored
/// constants must match the recomputation exactly; a mismatch means the
/// file does not describe what it claims.
pub fn scheme_from_file(file: &SchemeFile) -> Result<(Scheme, PipelineConfig)> {
    let pcfg = parse_conventions(&file.meta)?;
    let mut rows = Vec::with_capacity(file.rows.len());
    for (i, row) in file.rows.iter().enumerate() {
        let params = row_params(row)?;
        let rep = assemble_certified(&params, &pcfg)?;
        let recomputed = rep.a_total.decimal(A_SIG);
        if recomputed != row.a {
            return Err(Error::InvariantViolation(format!(
                "row {i}: stored constant {} does not match recertified {recomputed}",
                row.a
            )));
        }
        rows.push(SchemeRow {
            params,
            a: rep.a_total,
        });
    }
    let scheme = Scheme { rows };
    scheme.validate(&pcfg)?;
    Ok((scheme, pcfg))
}

/// Single parameter set, same string conventions as scheme rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamsFile {
    pub log_t0: String,
    pub log_t1: String,
    pub h1: String,
    pub h2: String,
    pub eta1: String,
    pub eta2: String,
    pub theta1: String,
    pub theta2: String,
    pub theta3: String,
}

pub fn params_to_file(p: &ParamSet) -> ParamsFile {
    ParamsFile {
        log_t0: param_to_string(&p.log_t0),
        log_t1: p
            .log_t1
            .as_ref()
            .map(param_to_string)
            .unwrap_or_else(|| "inf".into()),
        h1: param_to_string(&p.h1),
        h2: param_to_string(&p.h2),
        eta1: param_to_string(&p.eta1),
        eta2: param_to_string(&p.eta2),
        theta1: param_to_string(&p.theta1),
        theta2: param_to_string(&p.theta2),
        theta3: param_to_string(&p.theta3),
    }
}

pub fn params_from_file(f: &ParamsFile) -> Result<ParamSet> {
    Ok(ParamSet {
        log_t0: param_from_string(&f.log_t0)?,
        log_t1: if f.log_t1 == "inf" {
            None
        } else {
            Some(param_from_string(&f.log_t1)?)
        },
        h1: param_from_string(&f.h1)?,
        h2: param_from_string(&f.h2)?,
        eta1: param_from_string(&f.eta1)?,
        eta2: param_from_string(&f.eta2)?,
        theta1: param_from_string(&f.theta1)?,
        theta2: param_from_string(&f.theta2)?,
        theta3: param_from_string(&f.theta3)?,
    })
}

/// Envelope for command output written to disk: configuration, an input
/// digest, and a command-specific payload. All numeric payload values are
/// direction-tagged strings.
#[derive(Debug, Clone, Serialize)]
pub struct Report<P: Serialize> {
    pub tool: String,
    pub command: String,
    pub precision_digits: u32,
    pub h3_convention: String,
    pub h0_convention: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_sha256: Option<String>,
    pub payload: P,
}

impl<P: Serialize> Report<P> {
    pub fn new(command: &str, pcfg: &PipelineConfig, input: Option<&[u8]>, payload: P) -> Self {
        let (h3, h0) = convention_strings(pcfg);
        Report {
            tool: TOOL.into(),
            command: command.into(),
            precision_digits: pcfg.digits,
            h3_convention: h3,
            h0_convention: h0,
            input_sha256: input.map(sha256_hex),
            payload,
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Direction-tagged rendering of a certified scalar.
pub fn tagged(u: &UpperScalar, sig: usize) -> serde_json::Value {
    serde_json::json!({
        "value": u.decimal(sig),
        "direction": u.direction.as_str(),
    })
}

/// Serializes as pretty JSON with a trailing newline; the output is stable
/// under a load/save cycle.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json_string(value)?)?;
    Ok(())
}

pub fn read_scheme(path: &Path) -> Result<SchemeFile> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_params(path: &Path) -> Result<ParamsFile> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(fields: &[String]) -> String {
    let mut line = fields
        .iter()
        .map(|f| csv_field(f))
        .collect::<Vec<_>>()
        .join(",");
    line.push_str("\r\n");
    line
}

/// Scheme table as CSV: one row per scheme row with the block counts of
/// the certified decomposition. The tail row leaves K and R empty.
pub fn scheme_csv(scheme: &Scheme, reports: &[CoefficientReport]) -> String {
    let mut out = csv_line(
        &[
            "log_t0", "log_t1", "h1", "h2", "eta1", "eta2", "theta1", "theta2", "theta3", "A",
            "K", "R",
        ]
        .map(String::from),
    );
    for (row, rep) in scheme.rows.iter().zip(reports) {
        let fields = vec![
            param_to_string(&row.params.log_t0),
            row.params
                .log_t1
                .as_ref()
                .map(param_to_string)
                .unwrap_or_else(|| "inf".into()),
            param_to_string(&row.params.h1),
            param_to_string(&row.params.h2),
            param_to_string(&row.params.eta1),
            param_to_string(&row.params.eta2),
            param_to_string(&row.params.theta1),
            param_to_string(&row.params.theta2),
            param_to_string(&row.params.theta3),
            row.a.decimal(12),
            rep.k_t1.map(|k| k.to_string()).unwrap_or_default(),
            rep.r_t1.map(|r| r.to_string()).unwrap_or_default(),
        ];
        out.push_str(&csv_line(&fields));
    }
    out
}

/// Log-log samples of the certified bound and reference bounds, for
/// plotting. Columns are log t and the log of each bound.
pub fn plot_csv(
    scheme: &Scheme,
    comparators: &[crate::optimizer::Comparator],
    lo: f64,
    hi: f64,
    samples: usize,
) -> String {
    let mut header = vec!["log_t".to_string(), "scheme".to_string()];
    header.extend(comparators.iter().map(|c| c.name().to_string()));
    let mut out = csv_line(&header);
    let n = samples.max(2);
    for i in 0..n {
        let l = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let mut fields = vec![format!("{l:.6}")];
        match scheme.row_covering(l) {
            Some(r) => fields.push(format!("{:.9}", r.a_f64().ln() + 27.0 * l / 164.0)),
            None => fields.push(String::new()),
        }
        for c in comparators {
            if l >= c.domain_start_log() {
                fields.push(format!("{:.9}", c.log_value(l)));
            } else {
                fields.push(String::new());
            }
        }
        out.push_str(&csv_line(&fields));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rendering_is_exact() {
        let cases = [
            ("1.01563", "1.01563"),
            ("261658", "261658"),
            ("2.53087e-11", "0.0000000000253087"),
            ("-0.25", "-0.25"),
            ("875", "875"),
        ];
        for (input, want) in cases {
            let q = rational_from_decimal(input).unwrap();
            assert_eq!(decimal_from_rational(&q).unwrap(), want);
            assert_eq!(param_from_string(want).unwrap(), q);
        }
        let third = Rational::from((1, 3));
        assert_eq!(decimal_from_rational(&third), None);
        assert_eq!(param_to_string(&third), "1/3");
        assert_eq!(param_from_string("1/3").unwrap(), third);
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn json_is_stable_under_reload() {
        let file = SchemeFile {
            meta: SchemeMeta {
                tool: TOOL.into(),
                precision_digits: 60,
                h3_convention: "proof".into(),
                h0_convention: "theta1".into(),
                seed: Some(1),
                budget: Some(100),
            },
            rows: vec![SchemeFileRow {
                log_t0: "875".into(),
                log_t1: "inf".into(),
                h1: "1.01563".into(),
                h2: "1.0027".into(),
                eta1: "1.59875".into(),
                eta2: "0.828895".into(),
                theta1: "1.14283".into(),
                theta2: "261658".into(),
                theta3: "0.0000000000253087".into(),
                a: "66.624044879563874".into(),
            }],
        };
        let first = to_json_string(&file).unwrap();
        let reloaded: SchemeFile = serde_json::from_str(&first).unwrap();
        let second = to_json_string(&reloaded).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn sha256_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
