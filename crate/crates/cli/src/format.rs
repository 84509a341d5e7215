//! JSON and CSV formats. Rationals are always `"p/q"` strings.

use std::path::{Path, PathBuf};

use circle_rearrange_core::circle::{normalize, Arc};
use circle_rearrange_core::flow::FlowTrace;
use circle_rearrange_core::rational::{fmt_rational, parse_rational, to_decimal};
use circle_rearrange_core::{IntervalSet, PLFn, Rational, StepFn};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Environment variable overriding where relative output paths land.
pub const OUT_DIR_VAR: &str = "CIRCLE_REARRANGE_OUT_DIR";

/// Digits in the `_dec` columns.
pub const DECIMAL_DIGITS: usize = 20;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ArcDto {
    pub center: String,
    pub halfwidth: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SetDto {
    pub arcs: Vec<ArcDto>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct StepFnDto {
    pub breakpoints: Vec<String>,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PLFnDto {
    pub breakpoints: Vec<String>,
    pub node_values: Vec<String>,
}

pub fn r(x: &Rational) -> String {
    fmt_rational(x)
}

pub fn parse_r(s: &str) -> Result<Rational, CliError> {
    Ok(parse_rational(s)?)
}

/// Comma-separated rationals, e.g. `1/2,1/2,1/2`.
pub fn parse_list(s: &str) -> Result<Vec<Rational>, CliError> {
    s.split(',').map(parse_r).collect()
}

impl SetDto {
    pub fn from_set(s: &IntervalSet) -> Self {
        SetDto {
            arcs: s
                .arcs()
                .iter()
                .map(|a| ArcDto { center: r(a.center().value()), halfwidth: r(a.halfwidth()) })
                .collect(),
        }
    }

    /// Parses and normalizes. A bad rational or halfwidth is a parse error.
    pub fn to_set(&self) -> Result<IntervalSet, CliError> {
        let arcs = self
            .arcs
            .iter()
            .map(|a| {
                Arc::new(parse_r(&a.center)?, parse_r(&a.halfwidth)?)
                    .map_err(|e| CliError::Parse(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(normalize(&arcs))
    }
}

impl StepFnDto {
    pub fn from_fn(f: &StepFn) -> Self {
        StepFnDto {
            breakpoints: f.breakpoints().iter().map(|p| r(p.value())).collect(),
            values: f.values().iter().map(r).collect(),
        }
    }
}

impl PLFnDto {
    pub fn from_fn(f: &PLFn) -> Self {
        PLFnDto {
            breakpoints: f.breakpoints().iter().map(|p| r(p.value())).collect(),
            node_values: f.node_values().iter().map(r).collect(),
        }
    }
}

pub fn parse_set(text: &str) -> Result<IntervalSet, CliError> {
    let dto: SetDto = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    dto.to_set()
}

pub fn read_set(path: &Path) -> Result<IntervalSet, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_set(&text).map_err(|e| match e {
        CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Relative paths are resolved against `$CIRCLE_REARRANGE_OUT_DIR` when set.
pub fn output_path(p: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if p.is_relative() => PathBuf::from(dir).join(p),
        _ => p.to_path_buf(),
    }
}

pub fn write_output(path: Option<&Path>, text: &str) -> Result<Option<PathBuf>, CliError> {
    let Some(p) = path else { return Ok(None) };
    let p = output_path(p);
    if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(&p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
    Ok(Some(p))
}

/// `s,s_dec,m1,m1_dec,...`: every exact column is followed by its decimal
/// approximation.
pub fn trace_csv(trace: &FlowTrace) -> Result<String, CliError> {
    let names = ["s", "m1", "m2", "m3", "T_norm", "sum_norm", "D_norm"];
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = names.iter().flat_map(|n| [n.to_string(), format!("{n}_dec")]).collect();
    w.write_record(&header).map_err(|e| CliError::Io(e.to_string()))?;
    for row in &trace.rows {
        let vals = [&row.s, &row.m[0], &row.m[1], &row.m[2], &row.t_norm, &row.sum_norm, &row.d_norm];
        let rec: Vec<String> = vals.iter().flat_map(|v| [r(v), to_decimal(v, DECIMAL_DIGITS)]).collect();
        w.write_record(&rec).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use circle_rearrange_core::rational::rat;

    #[test]
    fn set_round_trip() {
        let s = parse_set(r#"{"arcs":[{"center":"1/4","halfwidth":"1/16"},{"center":"3/10","halfwidth":"1/16"}]}"#).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.measure(), rat(1, 20) + rat(1, 8));
        let back = serde_json::to_string(&SetDto::from_set(&s)).unwrap();
        assert_eq!(parse_set(&back).unwrap(), s);
    }

    #[test]
    fn bad_input_is_a_parse_error() {
        assert!(matches!(parse_set(r#"{"arcs":[{"center":"x","halfwidth":"1/4"}]}"#), Err(CliError::Parse(_))));
        assert!(matches!(parse_set(r#"{"arcs":[{"center":"0","halfwidth":"3/4"}]}"#), Err(CliError::Parse(_))));
        assert!(matches!(parse_set("[1,2]"), Err(CliError::Parse(_))));
    }

    #[test]
    fn step_fn_dto() {
        let f = StepFn::scaled_indicator(&IntervalSet::interval(rat(0, 1), rat(1, 4)), rat(1, 2));
        let dto = StepFnDto::from_fn(&f);
        assert_eq!(dto.values.len(), dto.breakpoints.len());
        assert!(dto.values.contains(&"1/2".to_string()));
    }
}
