//! On-disk catalog: one directory per document kind, one pretty-printed JSON
//! file per name. Documents carry no floats and no timestamps, so rerunning a
//! command reproduces them byte for byte; wall-clock timings go to a
//! separate run log.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use fusionlab::invariants::{ModularInvariant, RuleStats};
use fusionlab::modular_data::{Axiom, AxiomResult, ModularDataJson};
use fusionlab::nimreps::{MatchReport, NimRep};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Data,
    Invariants,
    NimReps,
}

impl Kind {
    fn dir(self) -> &'static str {
        match self {
            Kind::Data => "data",
            Kind::Invariants => "invariants",
            Kind::NimReps => "nimreps",
        }
    }
}

pub struct Catalog {
    root: PathBuf,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name.starts_with('.')
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "-_.,+".contains(c))
}

impl Catalog {
    pub fn open(root: impl Into<PathBuf>) -> Catalog {
        Catalog { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, kind: Kind, name: &str) -> PathBuf {
        self.root.join(kind.dir()).join(format!("{name}.json"))
    }

    pub fn save<T: Serialize>(&self, kind: Kind, name: &str, doc: &T) -> Result<PathBuf, CliError> {
        if !valid_name(name) {
            return Err(CliError::Input(format!("'{name}' is not a valid catalog name")));
        }
        let path = self.path(kind, name);
        fs::create_dir_all(path.parent().expect("catalog paths have a parent"))?;
        let mut text = serde_json::to_string_pretty(doc)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }

    pub fn load<T: DeserializeOwned>(&self, kind: Kind, name: &str) -> Result<T, CliError> {
        let path = self.path(kind, name);
        let text = fs::read_to_string(&path)
            .map_err(|_| CliError::Input(format!("no {} entry named '{name}'", kind.dir())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn list(&self, kind: Kind) -> Vec<String> {
        let Ok(dir) = fs::read_dir(self.root.join(kind.dir())) else {
            return Vec::new();
        };
        let mut names: Vec<String> = dir
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                e.file_name()
                    .to_str()
                    .and_then(|n| n.strip_suffix(".json"))
                    .map(str::to_string)
            })
            .collect();
        names.sort();
        names
    }

    /// Append one line to the run log (the only place timings are kept).
    pub fn log_run(&self, command: &str, micros: u128) -> Result<(), CliError> {
        use std::io::Write;
        fs::create_dir_all(&self.root)?;
        let mut f = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.root.join("runs.log"))?;
        writeln!(f, "{micros}us\t{command}")?;
        Ok(())
    }
}

/// How a document was produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub command: String,
    pub options: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataDoc {
    pub name: String,
    pub valid: bool,
    pub failed: Vec<Axiom>,
    pub axioms: Vec<AxiomResult>,
    pub modular_data: ModularDataJson,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantDoc {
    pub datum: String,
    pub complete: bool,
    pub nodes: u64,
    pub budget: u64,
    pub commutant_dim: usize,
    pub sum_bound: i64,
    pub rules: RuleStats,
    pub invariants: Vec<ModularInvariant>,
    /// exponent multisets, in the order of `invariants`
    pub exponents: Vec<Vec<usize>>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NimRepSearchRecord {
    pub dim: usize,
    pub target: Option<Vec<usize>>,
    pub complete: bool,
    pub nodes: u64,
    pub found: usize,
    pub dropped_mandatory: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NimRepDoc {
    pub datum: String,
    pub complete: bool,
    pub budget: u64,
    pub strict_mandatory: bool,
    pub generators: Vec<usize>,
    pub searches: Vec<NimRepSearchRecord>,
    pub nimreps: Vec<NimRep>,
    pub exponents: Vec<Vec<usize>>,
    pub matching: Option<MatchReport>,
    pub provenance: Provenance,
}
