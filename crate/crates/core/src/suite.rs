//! Check records, reports and the per-entry verification driver.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::CatalogEntry;
use crate::expr::{Expr, ZeroTest, ZeroVerdict};
use crate::geometry::{build_metric, component_name, component_pairs, einstein_residual};
use crate::jets::reduced_system;
use crate::liealg::{subalgebra_closed, StructureConstants, Subalgebra};
use crate::pis::{
    ansatz_substitute, defect, invariant_check, invariant_rank, reducibility_scan, verify_reduced_family,
    verify_triple, Reducibility, SolutionTriple,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Computed and reported, but not a failure: a finding that disagrees
    /// with a claim recorded in the catalog.
    Flag,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Flag => "FLAG",
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub verdict: Verdict,
    pub witness: Option<String>,
    pub detail: String,
}

impl CheckRecord {
    pub fn new(id: impl Into<String>, verdict: Verdict, detail: impl Into<String>) -> Self {
        CheckRecord { id: id.into(), verdict, witness: None, detail: detail.into() }
    }

    pub fn with_witness(mut self, w: Option<String>) -> Self {
        self.witness = w;
        self
    }
}

/// Ordered list of checks plus free-form output lines (tables and the like).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub title: String,
    pub lines: Vec<String>,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), ..Default::default() }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn push(&mut self, c: CheckRecord) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = CheckRecord>) {
        self.checks.extend(cs);
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.checks.iter().filter(|c| c.verdict == v).count()
    }

    /// True when no check failed.
    pub fn passed(&self) -> bool {
        self.count(Verdict::Fail) == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    /// Sort checks by id so output order never depends on scheduling.
    pub fn sort(&mut self) {
        self.checks.sort_by(|a, b| a.id.cmp(&b.id));
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "title": self.title,
            "lines": self.lines,
            "checks": self.checks,
            "summary": {
                "total": self.checks.len(),
                "passed": self.count(Verdict::Pass),
                "failed": self.count(Verdict::Fail),
                "flagged": self.count(Verdict::Flag),
            },
        })
    }

    /// Pretty JSON with keys in lexicographic order.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if !self.title.is_empty() {
            let _ = writeln!(s, "== {} ==", self.title);
        }
        for l in &self.lines {
            let _ = writeln!(s, "{l}");
        }
        for c in &self.checks {
            let _ = writeln!(s, "{} {}: {}", c.verdict.label(), c.id, c.detail);
            if let Some(w) = &c.witness {
                let _ = writeln!(s, "     witness: {w}");
            }
        }
        let _ = writeln!(
            s,
            "summary: {} checks, {} passed, {} failed, {} flagged",
            self.checks.len(),
            self.count(Verdict::Pass),
            self.count(Verdict::Fail),
            self.count(Verdict::Flag)
        );
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Exact canonical form first, numeric probe as fallback.
    Symbolic,
    /// Numeric probe only.
    Numeric,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub mode: Mode,
    pub seed: u64,
    pub tol: f64,
    pub samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { mode: Mode::Symbolic, seed: 42, tol: 1e-9, samples: 100 }
    }
}

impl VerifyOptions {
    pub fn zero_test(&self) -> ZeroTest {
        ZeroTest {
            samples: self.samples,
            tol: self.tol,
            seed: self.seed,
            numeric_only: self.mode == Mode::Numeric,
            ..ZeroTest::default()
        }
    }
}

fn witness_of(label: &str, v: &ZeroVerdict) -> Option<String> {
    match v {
        ZeroVerdict::NonZero(w) => {
            Some(format!("{label} = {:.6e} (relative {:.3e}) at {}", w.value, w.relative(), w.point))
        }
        ZeroVerdict::Undetermined(why) => Some(format!("{label}: {why}")),
        _ => None,
    }
}

/// Summarise a list of zero verdicts as one check.
pub fn zero_check(id: String, labels: &[String], verdicts: &[ZeroVerdict]) -> CheckRecord {
    let ok = verdicts.iter().all(ZeroVerdict::is_zero);
    let symbolic = verdicts.iter().filter(|v| **v == ZeroVerdict::ZeroSymbolic).count();
    let numeric = verdicts.iter().filter(|v| **v == ZeroVerdict::ZeroNumeric).count();
    let detail = if ok {
        format!("{} residuals vanish ({symbolic} symbolic, {numeric} numeric)", verdicts.len())
    } else {
        let bad: Vec<&str> =
            labels.iter().zip(verdicts).filter(|(_, v)| !v.is_zero()).map(|(l, _)| l.as_str()).collect();
        format!("nonvanishing: {}", bad.join(", "))
    };
    let witness = labels.iter().zip(verdicts).find_map(|(l, v)| witness_of(l, v));
    CheckRecord::new(id, Verdict::from_bool(ok), detail).with_witness(witness)
}

fn equation_labels(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("eq{k}")).collect()
}

/// Closure of the entry's subalgebra.
fn closure_check(entry: &CatalogEntry, h: &Subalgebra, sc: &StructureConstants) -> CheckRecord {
    let c = subalgebra_closed(h, sc);
    let detail = if c.closed {
        let parts: Vec<String> = c
            .witnesses
            .iter()
            .map(|w| {
                let case = if w.case.is_empty() { String::new() } else { format!("{}: ", w.case) };
                format!("{case}[g1, g2] = ({})*g1 + ({})*g2", w.lambda, w.mu)
            })
            .collect();
        if h.gens.len() == 1 {
            format!("{h} is one-dimensional")
        } else {
            format!("{h} closes; {}", parts.join("; "))
        }
    } else {
        format!("{h} does not close")
    };
    CheckRecord::new(format!("{}/closure", entry.id), Verdict::from_bool(c.closed), detail).with_witness(c.reason)
}

fn invariant_checks(entry: &CatalogEntry, h: &Subalgebra, opts: &VerifyOptions) -> Vec<CheckRecord> {
    let inv = entry.invariant_set();
    let mut out = Vec::new();
    match invariant_check(h, &inv, opts.seed) {
        Ok(r) => {
            let witness = r
                .failures
                .first()
                .map(|(g, i)| format!("generator {} does not annihilate invariant {}", g, entry.invariants[i - 1]));
            out.push(
                CheckRecord::new(
                    format!("{}/invariants", entry.id),
                    Verdict::from_bool(r.passed()),
                    format!("{} invariants, jacobian rank {}", inv.members.len(), r.jacobian_rank),
                )
                .with_witness(witness),
            );
        }
        Err(e) => out.push(CheckRecord::new(format!("{}/invariants", entry.id), Verdict::Fail, e.to_string())),
    }
    match invariant_rank(&inv, opts.seed) {
        Ok((rank, delta)) => {
            let ok = rank + delta == 3 && entry.defect.is_none_or(|d| d == delta);
            out.push(CheckRecord::new(
                format!("{}/rank", entry.id),
                Verdict::from_bool(ok),
                format!("rank {rank}, defect {delta}"),
            ));
        }
        Err(e) => out.push(CheckRecord::new(format!("{}/rank", entry.id), Verdict::Fail, e.to_string())),
    }
    out
}

fn ansatz_check(entry: &CatalogEntry, test: &ZeroTest) -> Option<CheckRecord> {
    let bindings = entry.ansatz_bindings()?;
    let reduced = entry.reduced_exprs();
    if reduced.is_empty() {
        return None;
    }
    let substituted = ansatz_substitute(&bindings, &reduced_system());
    let id = format!("{}/ansatz", entry.id);
    if substituted.len() != reduced.len() {
        return Some(CheckRecord::new(
            id,
            Verdict::Fail,
            format!("{} substituted equations against {} stored", substituted.len(), reduced.len()),
        ));
    }
    let verdicts: Vec<ZeroVerdict> = substituted.iter().zip(&reduced).map(|(s, r)| test.run(&(s - r))).collect();
    let mut c = zero_check(id, &equation_labels(verdicts.len()), &verdicts);
    c.detail = format!("ansatz reproduces the stored reduced system: {}", c.detail);
    Some(c)
}

fn reduced_family_checks(entry: &CatalogEntry, test: &ZeroTest) -> Vec<CheckRecord> {
    let reduced = entry.reduced_exprs();
    let consistency = entry.consistency_exprs();
    let inequations = entry.inequation_exprs();
    entry
        .reduced_families()
        .iter()
        .enumerate()
        .map(|(i, fam)| {
            let v = verify_reduced_family(fam, &reduced, &consistency, &inequations, test);
            let ok = v.passed && v.degenerate_inequations.is_empty();
            let mut detail =
                format!("reduced equations [{}]; consistency [{}]", v.equations.join(", "), v.consistency.join(", "));
            if !v.degenerate_inequations.is_empty() {
                let _ = write!(detail, "; inequations vanishing identically: {:?}", v.degenerate_inequations);
            }
            CheckRecord::new(format!("{}/reduced{}", entry.id, i + 1), Verdict::from_bool(ok), detail)
                .with_witness(v.witness)
        })
        .collect()
}

fn solution_id(entry: &CatalogEntry, i: usize) -> String {
    if entry.solutions.len() == 1 {
        format!("{}/solution", entry.id)
    } else {
        format!("{}/solution{}", entry.id, i + 1)
    }
}

fn reducibility_text(r: &Reducibility) -> String {
    match r {
        Reducibility::NonReducible => "non-reducible".into(),
        Reducibility::Directions(d) => format!("invariant along ({})", d.join("), (")),
        Reducibility::WholePencil => "invariant under the whole subalgebra".into(),
    }
}

fn triple_checks(
    entry: &CatalogEntry,
    h: Option<&Subalgebra>,
    i: usize,
    s: &SolutionTriple,
    opts: &VerifyOptions,
) -> Vec<CheckRecord> {
    let base = solution_id(entry, i);
    let test = opts.zero_test();
    let sys = reduced_system();
    let verdicts = verify_triple(&sys, s, &test);
    let mut out = vec![zero_check(format!("{base}/system"), &equation_labels(verdicts.len()), &verdicts)];
    let Some(h) = h else { return out };
    let expected = entry.defect.unwrap_or(0);
    match defect(h, s, opts.seed) {
        Ok(d) => out.push(CheckRecord::new(
            format!("{base}/defect"),
            Verdict::from_bool(d == expected),
            format!("defect {d}, declared {expected}"),
        )),
        Err(e) => out.push(CheckRecord::new(format!("{base}/defect"), Verdict::Fail, e.to_string())),
    }
    if h.gens.len() == 2 && expected > 0 {
        let r = reducibility_scan(h, s, opts.seed);
        // A partially invariant solution with positive defect is expected to be
        // non-reducible; anything else is a finding, not an error.
        let verdict = if r == Reducibility::NonReducible { Verdict::Pass } else { Verdict::Flag };
        let mut detail = reducibility_text(&r);
        if verdict == Verdict::Flag {
            detail.push_str(
                "; the solution is invariant under a one-parameter subgroup of the subalgebra, \
                 contrary to the recorded non-reducibility",
            );
        }
        out.push(CheckRecord::new(format!("{base}/reducibility"), verdict, detail));
    }
    out
}

/// Every component of the Einstein residual on a triple.
pub fn einstein_check(id: String, s: &SolutionTriple, test: &ZeroTest) -> CheckRecord {
    let g = build_metric(&s.a, &s.b, &s.c);
    let residual = einstein_residual(&g);
    let verdicts: Vec<ZeroVerdict> = residual.iter().map(|e| test.run(e)).collect();
    let labels: Vec<String> = component_pairs().into_iter().map(|(i, j)| component_name(i, j)).collect();
    let mut c = zero_check(id, &labels, &verdicts);
    c.detail = format!("Einstein residual: {}", c.detail);
    c
}

/// All checks that apply to one catalog entry.
pub fn verify_entry(entry: &CatalogEntry, opts: &VerifyOptions) -> Vec<CheckRecord> {
    let sc = StructureConstants::standard();
    let test = opts.zero_test();
    let h = entry.subalgebra();
    let mut out = Vec::new();
    if let Some(h) = &h {
        out.push(closure_check(entry, h, sc));
        if !entry.invariants.is_empty() {
            out.extend(invariant_checks(entry, h, opts));
        }
    }
    out.extend(ansatz_check(entry, &test));
    out.extend(reduced_family_checks(entry, &test));
    for (i, s) in entry.triples().iter().enumerate() {
        out.extend(triple_checks(entry, h.as_ref(), i, s, opts));
        if entry.id == "eq27" {
            out.push(einstein_check(format!("{}/einstein", solution_id(entry, i)), s, &test));
        }
    }
    out
}

/// Run [`verify_entry`] on every entry, one thread per entry, and assemble
/// the report in id order.
pub fn verify_entries(entries: &[CatalogEntry], opts: &VerifyOptions) -> Report {
    let results: Vec<Vec<CheckRecord>> = std::thread::scope(|scope| {
        let handles: Vec<_> = entries.iter().map(|e| scope.spawn(move || verify_entry(e, opts))).collect();
        handles.into_iter().map(|h| h.join().expect("verification thread")).collect()
    });
    let mut report = Report::new("verify");
    for r in results {
        report.extend(r);
    }
    report.sort();
    report
}

/// Einstein check for free-standing expressions.
pub fn einstein_expr(a: &Expr, b: &Expr, c: &Expr, test: &ZeroTest) -> CheckRecord {
    einstein_check("einstein".into(), &SolutionTriple::new(a.clone(), b.clone(), c.clone()), test)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{builtin, find};

    fn run(id: &str) -> Vec<CheckRecord> {
        let all = builtin();
        verify_entry(find(&all, id).unwrap(), &VerifyOptions::default())
    }

    fn verdict(checks: &[CheckRecord], id: &str) -> Verdict {
        checks.iter().find(|c| c.id == id).unwrap_or_else(|| panic!("no check {id} in {checks:?}")).verdict
    }

    #[test]
    fn first_family_passes_and_is_flagged() {
        let c = run("eq25.family1");
        assert_eq!(verdict(&c, "eq25.family1/solution/system"), Verdict::Pass);
        assert_eq!(verdict(&c, "eq25.family1/solution/defect"), Verdict::Pass);
        assert_eq!(verdict(&c, "eq25.family1/solution/reducibility"), Verdict::Flag);
        let r = c.iter().find(|c| c.id.ends_with("reducibility")).unwrap();
        assert!(r.detail.contains("1 : 0"), "{}", r.detail);
    }

    #[test]
    fn flat_metric() {
        let c = einstein_expr(&Expr::zero(), &Expr::zero(), &Expr::zero(), &ZeroTest::default());
        assert_eq!(c.verdict, Verdict::Pass);
    }

    #[test]
    fn report_json_is_sorted() {
        let mut r = Report::new("t");
        r.push(CheckRecord::new("b", Verdict::Fail, "x").with_witness(Some("w".into())));
        r.push(CheckRecord::new("a", Verdict::Pass, "y"));
        r.sort();
        let j = r.to_json();
        assert!(j.find("\"detail\"").unwrap() < j.find("\"id\"").unwrap());
        assert!(j.find("\"a\"").unwrap() < j.find("\"b\"").unwrap());
        assert_eq!(r.exit_code(), 1);
        assert!(r.to_text().contains("FAIL b: x"));
    }
}
