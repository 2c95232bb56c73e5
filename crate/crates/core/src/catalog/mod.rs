//! Machine-readable catalog of subalgebras, invariants, ansatzes and solution
//! families. Stored as JSON lines, one entry per line, with expressions as
//! rendered text.

mod builtin;

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{parse, Bindings, Coord, Expr, FuncName, FuncSym, Param, ParseError};
use crate::liealg::{CoeffVector, LieError, ParamDomain, Subalgebra};
use crate::pis::{InvariantSet, ReducedFamily, SolutionTriple};

pub use builtin::builtin;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("line {line}, field {field}: {source}")]
    Expr { line: usize, field: String, source: ParseError },
    #[error("line {line}, field {field}: {source}")]
    Generator { line: usize, field: String, source: LieError },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("unknown entry `{0}`")]
    UnknownEntry(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamDecl {
    pub name: String,
    pub domain: ParamDomain,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubalgebraRecord {
    pub generators: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<ParamDecl>,
}

/// Expressions for `a, b, c` in terms of the reduced unknowns `f, g` of one
/// invariant variable and the functions left arbitrary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzRecord {
    pub a: String,
    pub b: String,
    pub c: String,
    /// Argument of the reduced unknowns, `x` or `t`.
    pub variable: String,
    pub arbitrary: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionRecord {
    pub a: String,
    pub b: String,
    pub c: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<String>,
}

/// Values of the reduced unknowns and of the arbitrary `a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReducedRecord {
    pub f: String,
    pub g: String,
    pub a: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub id: String,
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subalgebra: Option<SubalgebraRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub invariants: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ansatz: Option<AnsatzRecord>,
    /// Residuals of the system after substituting the ansatz.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reduced: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub consistency: Vec<String>,
    /// Expressions required to be nonzero.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inequations: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reduced_solutions: Vec<ReducedRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub solutions: Vec<SolutionRecord>,
    /// Declared defect of the solutions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defect: Option<usize>,
}

fn px(s: &str) -> Expr {
    parse(s).unwrap_or_else(|e| panic!("catalog expression `{s}`: {e}"))
}

impl CatalogEntry {
    pub fn new(id: &str, provenance: &str) -> Self {
        CatalogEntry {
            id: id.into(),
            provenance: provenance.into(),
            subalgebra: None,
            invariants: Vec::new(),
            ansatz: None,
            reduced: Vec::new(),
            consistency: Vec::new(),
            inequations: Vec::new(),
            reduced_solutions: Vec::new(),
            solutions: Vec::new(),
            defect: None,
        }
    }

    /// Every expression-valued field as `(field path, text)`.
    pub fn expression_fields(&self) -> Vec<(String, &str)> {
        let mut out: Vec<(String, &str)> = Vec::new();
        for (i, s) in self.invariants.iter().enumerate() {
            out.push((format!("invariants[{i}]"), s));
        }
        if let Some(a) = &self.ansatz {
            out.push(("ansatz.a".into(), &a.a));
            out.push(("ansatz.b".into(), &a.b));
            out.push(("ansatz.c".into(), &a.c));
        }
        for (name, list) in
            [("reduced", &self.reduced), ("consistency", &self.consistency), ("inequations", &self.inequations)]
        {
            for (i, s) in list.iter().enumerate() {
                out.push((format!("{name}[{i}]"), s));
            }
        }
        for (i, r) in self.reduced_solutions.iter().enumerate() {
            out.push((format!("reduced_solutions[{i}].f"), &r.f));
            out.push((format!("reduced_solutions[{i}].g"), &r.g));
            out.push((format!("reduced_solutions[{i}].a"), &r.a));
        }
        for (i, s) in self.solutions.iter().enumerate() {
            out.push((format!("solutions[{i}].a"), &s.a));
            out.push((format!("solutions[{i}].b"), &s.b));
            out.push((format!("solutions[{i}].c"), &s.c));
        }
        out
    }

    fn validate(&self, line: usize) -> Result<(), CatalogError> {
        for (field, text) in self.expression_fields() {
            parse(text).map_err(|source| CatalogError::Expr { line, field, source })?;
        }
        if let Some(sub) = &self.subalgebra {
            for (i, g) in sub.generators.iter().enumerate() {
                CoeffVector::parse(g).map_err(|source| CatalogError::Generator {
                    line,
                    field: format!("subalgebra.generators[{i}]"),
                    source,
                })?;
            }
            for p in &sub.params {
                if Param::from_name(&p.name).is_none() {
                    return Err(CatalogError::Schema { line, message: format!("unknown parameter `{}`", p.name) });
                }
            }
        }
        if let Some(a) = &self.ansatz {
            if a.variable != "x" && a.variable != "t" {
                return Err(CatalogError::Schema { line, message: format!("ansatz variable `{}`", a.variable) });
            }
        }
        Ok(())
    }

    pub fn subalgebra(&self) -> Option<Subalgebra> {
        let rec = self.subalgebra.as_ref()?;
        let gens = rec.generators.iter().map(|g| CoeffVector::parse(g).expect("validated generator")).collect();
        let mut h = Subalgebra::new(self.id.clone(), gens);
        for p in &rec.params {
            if let Some(param) = Param::from_name(&p.name) {
                match h.params.iter_mut().find(|(q, _)| *q == param) {
                    Some(slot) => slot.1 = p.domain,
                    None => h.params.push((param, p.domain)),
                }
            }
        }
        Some(h)
    }

    pub fn invariant_set(&self) -> InvariantSet {
        InvariantSet::new(self.invariants.iter().map(|s| px(s)).collect())
    }

    fn variable(&self) -> Coord {
        match self.ansatz.as_ref().map(|a| a.variable.as_str()) {
            Some("x") => Coord::X,
            _ => Coord::T,
        }
    }

    /// Bindings for the dependent variables that the ansatz fixes.
    pub fn ansatz_bindings(&self) -> Option<Bindings> {
        let a = self.ansatz.as_ref()?;
        let mut b = Bindings::new();
        for (name, text) in [(FuncName::A, &a.a), (FuncName::B, &a.b), (FuncName::C, &a.c)] {
            let sym = FuncSym::dependent(name);
            let e = px(text);
            if e != Expr::func(sym.clone()) {
                b.bind(sym.into(), e);
            }
        }
        Some(b)
    }

    pub fn reduced_exprs(&self) -> Vec<Expr> {
        self.reduced.iter().map(|s| px(s)).collect()
    }

    pub fn consistency_exprs(&self) -> Vec<Expr> {
        self.consistency.iter().map(|s| px(s)).collect()
    }

    pub fn inequation_exprs(&self) -> Vec<Expr> {
        self.inequations.iter().map(|s| px(s)).collect()
    }

    pub fn reduced_families(&self) -> Vec<ReducedFamily> {
        let var = self.variable();
        self.reduced_solutions.iter().map(|r| ReducedFamily::new(var, px(&r.f), px(&r.g), px(&r.a))).collect()
    }

    pub fn triples(&self) -> Vec<SolutionTriple> {
        self.solutions.iter().map(|s| SolutionTriple::new(px(&s.a), px(&s.b), px(&s.c))).collect()
    }
}

/// Parse a catalog from JSON lines. Blank lines are skipped.
pub fn from_jsonl(text: &str) -> Result<Vec<CatalogEntry>, CatalogError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let entry: CatalogEntry = serde_json::from_str(raw)
            .map_err(|e| CatalogError::Schema { line, message: format!("column {}: {e}", e.column()) })?;
        entry.validate(line)?;
        out.push(entry);
    }
    Ok(out)
}

pub fn to_jsonl(entries: &[CatalogEntry]) -> String {
    let mut s = String::new();
    for e in entries {
        s.push_str(&serde_json::to_string(e).expect("catalog entry serializes"));
        s.push('\n');
    }
    s
}

pub fn load(path: &Path) -> Result<Vec<CatalogEntry>, CatalogError> {
    from_jsonl(&fs::read_to_string(path)?)
}

pub fn save(entries: &[CatalogEntry], path: &Path) -> Result<(), CatalogError> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(to_jsonl(entries).as_bytes())?;
    w.flush()?;
    Ok(())
}

pub fn find<'a>(entries: &'a [CatalogEntry], id: &str) -> Result<&'a CatalogEntry, CatalogError> {
    entries.iter().find(|e| e.id == id).ok_or_else(|| CatalogError::UnknownEntry(id.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_counts() {
        let all = builtin();
        let count = |p: &str| all.iter().filter(|e| e.id.starts_with(p)).count();
        assert_eq!(count("onedim."), 13);
        assert_eq!(count("twodim."), 54);
        assert_eq!(count("eq25."), 4);
        assert_eq!(count("eq26."), 3);
        assert_eq!(count("table1."), 4);
        assert_eq!(count("eq27"), 1);
        assert!(all.len() > 13 + 48 + 4 + 3 + 4);
        let mut ids: Vec<&str> = all.iter().map(|e| e.id.as_str()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), all.len());
    }

    #[test]
    fn named_entries() {
        let all = builtin();
        let fam2 = find(&all, "eq25.family2").unwrap();
        assert_eq!(fam2.triples()[0].a, px("c1*t + c2"));
        assert_eq!(fam2.triples()[0].b, px("c1*c3^2*t + c5"));
        let row3 = find(&all, "table1.row3").unwrap();
        assert_eq!(row3.triples()[0].a, px("4*(t + c1)/(c2*x + c3)^2"));
        assert!(find(&all, "nope").is_err());
    }

    #[test]
    fn round_trip() {
        let all = builtin();
        let text = to_jsonl(&all);
        let back = from_jsonl(&text).unwrap();
        assert_eq!(back, all);
        assert_eq!(to_jsonl(&back), text);
        assert!(from_jsonl("").unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_input() {
        let bad_index = r#"{"id":"x","provenance":"p","invariants":["a_5"]}"#;
        let err = from_jsonl(bad_index).unwrap_err().to_string();
        assert!(err.contains("a_5"), "{err}");
        assert!(err.contains("line 1"));
        let unknown = "\n{\"id\":\"x\",\"provenance\":\"p\",\"colour\":1}";
        let err = from_jsonl(unknown).unwrap_err().to_string();
        assert!(err.contains("line 2") && err.contains("colour"), "{err}");
    }

    #[test]
    fn every_provenance_present() {
        assert!(builtin().iter().all(|e| !e.provenance.trim().is_empty()));
    }
}
