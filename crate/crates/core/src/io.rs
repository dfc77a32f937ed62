//! JSON file formats for spaces and value processes.
//!
//! Extended reals accept the strings `"inf"` and `"-inf"`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::growth::{iid_tree, StepDistribution, ValueProcess, ValueTail};
use crate::scenarios;
use crate::space::FilteredSpace;
use crate::variable::RandomVariable;

pub use crate::space::{AtomSpec, SpaceFile};

/// A value process file, tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProcessFile {
    Explicit(ExplicitProcess),
    Iid(IidProcess),
    Builtin(BuiltinProcess),
}

/// `values[t][atom]`, on a space given inline or separately.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplicitProcess {
    pub values: Vec<Vec<ExtReal>>,
    #[serde(default)]
    pub tail: ValueTail,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceFile>,
}

/// Log-returns drawn independently each period from `step`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IidProcess {
    pub v0: f64,
    pub step: StepDistribution,
}

/// One of the processes built into the scenarios.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuiltinProcess {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

/// Names accepted by [`ProcessFile::Builtin`].
pub const BUILTIN_PROCESSES: &[&str] = &["dyadic_vhat", "notacc", "notrej", "gamma0_a", "gamma0_b"];

#[derive(Clone, Debug)]
pub enum LoadedProcess {
    Tree(ValueProcess),
    /// Kept in closed form; the tree is only built when asked for.
    Iid {
        v0: f64,
        step: StepDistribution,
    },
}

impl LoadedProcess {
    /// The process on a finite tree; i.i.d. processes are enumerated to `depth`.
    pub fn tree(&self, depth: usize) -> Result<ValueProcess> {
        match self {
            LoadedProcess::Tree(v) => Ok(v.clone()),
            LoadedProcess::Iid { v0, step } => Ok(iid_tree(step, *v0, depth)?),
        }
    }
}

pub fn parse_space(text: &str) -> Result<FilteredSpace> {
    let file: SpaceFile = serde_json::from_str(text)?;
    Ok(FilteredSpace::from_file(&file)?)
}

impl ProcessFile {
    /// Reads the tag first and then the variant straight from the text, so
    /// that schema errors keep their line and column.
    pub fn parse(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Tag {
            kind: String,
        }
        let tag: Tag = serde_json::from_str(text)?;
        Ok(match tag.kind.as_str() {
            "explicit" => ProcessFile::Explicit(serde_json::from_str(text)?),
            "iid" => ProcessFile::Iid(serde_json::from_str(text)?),
            "builtin" => ProcessFile::Builtin(serde_json::from_str(text)?),
            other => return Err(Error::Schema(format!("unknown process kind {other:?}"))),
        })
    }

    /// Validates the process. Explicit processes take their space from the
    /// file or, failing that, from `space`.
    pub fn load(&self, space: Option<Arc<FilteredSpace>>) -> Result<LoadedProcess> {
        match self {
            ProcessFile::Explicit(ExplicitProcess { values, tail, space: inline }) => {
                let space = match (inline, space) {
                    (Some(file), _) => Arc::new(FilteredSpace::from_file(file)?),
                    (None, Some(s)) => s,
                    (None, None) => return Err(Error::Schema("explicit process needs a space".into())),
                };
                let values = values.iter().map(|v| RandomVariable::new(v.clone())).collect();
                Ok(LoadedProcess::Tree(ValueProcess::from_values(space, values, *tail)?))
            }
            ProcessFile::Iid(IidProcess { v0, step }) => {
                if !(*v0 > 0.0 && v0.is_finite()) {
                    return Err(Error::Schema(format!("v0 = {v0} must be positive and finite")));
                }
                Ok(LoadedProcess::Iid { v0: *v0, step: step.clone() })
            }
            ProcessFile::Builtin(BuiltinProcess { name, depth, grid }) => {
                let grid = grid.unwrap_or(4096);
                let v = match name.as_str() {
                    "dyadic_vhat" => scenarios::dyadic_vhat(depth.unwrap_or(12))?,
                    "notacc" => scenarios::notacc(grid)?,
                    "notrej" => scenarios::notrej(grid)?,
                    "gamma0_a" => scenarios::gamma0_a(grid)?,
                    "gamma0_b" => scenarios::gamma0_b(grid)?,
                    other => return Err(Error::Schema(format!("unknown builtin process {other:?}"))),
                };
                Ok(LoadedProcess::Tree(v))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_with_inline_space_and_infinities() {
        let text = r#"{"kind":"explicit","tail":"geometric",
            "space":{"atoms":[{"id":"u","p":0.5},{"id":"d","p":0.5}],"partitions":[[["u","d"]],[["u"],["d"]]]},
            "values":[[1,1],[2,0]]}"#;
        let LoadedProcess::Tree(v) = ProcessFile::parse(text).unwrap().load(None).unwrap() else { panic!() };
        assert_eq!(v.absorption_time(), &[None, Some(1)]);
        assert_eq!(v.log_value(3).unwrap()[0].get(), 3.0 * 2f64.ln());
        let bad = text.replace("[2,0]", r#"["inf",0]"#);
        assert!(ProcessFile::parse(&bad).unwrap().load(None).is_err());
    }

    #[test]
    fn explicit_needs_a_space() {
        let p = ProcessFile::parse(r#"{"kind":"explicit","values":[[1]]}"#).unwrap();
        assert!(matches!(p.load(None), Err(Error::Schema(_))));
        let one = Arc::new(parse_space(r#"{"atoms":[{"id":"a","p":1}],"partitions":[[["a"]]]}"#).unwrap());
        assert!(p.load(Some(one)).is_ok());
    }

    #[test]
    fn iid_and_builtin() {
        let p = ProcessFile::parse(r#"{"kind":"iid","v0":1.0,"step":[{"x":0.5,"p":0.5},{"x":-0.5,"p":0.5}]}"#).unwrap();
        let loaded = p.load(None).unwrap();
        assert_eq!(loaded.tree(3).unwrap().space().atom_count(), 8);
        let b = ProcessFile::parse(r#"{"kind":"builtin","name":"notacc","grid":64}"#).unwrap();
        assert_eq!(b.load(None).unwrap().tree(0).unwrap().space().atom_count(), 64);
        assert!(ProcessFile::parse(r#"{"kind":"builtin","name":"nope"}"#).unwrap().load(None).is_err());
        let err = ProcessFile::parse("{\n\"kind\": \"iid\",\n\"v0\": 1.0\n}").unwrap_err().to_string();
        assert!(err.contains("line"), "{err}");
    }
}
