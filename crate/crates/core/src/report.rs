//! Deterministic run reports in plain text and JSON.
//!
//! Every report has the same shape whatever produced it. Timing lives in its
//! own field so two reports can be compared with [`Report::without_timing`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::pipeline::{PipelineError, PipelineOutput, PipelineSpec, Seed, StepReport};
use crate::roby::{CharMorphism, CharMorphismReport, GradedRobyModule, RobyReport};

pub const SCHEMA_VERSION: u32 = 1;

pub const SMOOTHNESS_NOTE: &str = "smoothness of the linear section is assumed, not checked";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub kind: String,
    pub inputs: BTreeMap<String, String>,
    pub dimensions: BTreeMap<String, usize>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub passed: bool,
    pub timing_ms: BTreeMap<String, u128>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl Report {
    pub fn new(kind: &str) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            kind: kind.into(),
            inputs: BTreeMap::new(),
            dimensions: BTreeMap::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            passed: true,
            timing_ms: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.inputs.insert(key.into(), value.to_string());
        self
    }

    pub fn dimension(&mut self, key: &str, n: usize) -> &mut Self {
        self.dimensions.insert(key.into(), n);
        self
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) -> &mut Self {
        self.passed &= passed;
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    pub fn timing(&mut self, key: &str, millis: u128) -> &mut Self {
        self.timing_ms.insert(key.into(), millis);
        self
    }

    /// The report with timing cleared, for comparisons.
    pub fn without_timing(&self) -> Report {
        Report { timing_ms: BTreeMap::new(), ..self.clone() }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
        }
    }

    /// One `key: value` line per item; timing lines come last and start with `timing.`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "schema_version: {}", self.schema_version);
        let _ = writeln!(s, "kind: {}", self.kind);
        for (k, v) in &self.inputs {
            let _ = writeln!(s, "input.{k}: {v}");
        }
        for (k, v) in &self.dimensions {
            let _ = writeln!(s, "dim.{k}: {v}");
        }
        for c in &self.checks {
            let _ = writeln!(s, "[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        let _ = writeln!(s, "result: {}", if self.passed { "PASS" } else { "FAIL" });
        for (k, v) in &self.timing_ms {
            let _ = writeln!(s, "timing.{k}_ms: {v}");
        }
        s
    }
}

fn seed_kind(seed: &Seed) -> String {
    match seed {
        Seed::Split => "split".into(),
        Seed::CyclicCover(z) => format!("cyclic cover {z}"),
        Seed::Module(m) => format!("module of dimension {}", m.dim()),
    }
}

fn add_steps(r: &mut Report, steps: &[StepReport]) {
    for s in steps {
        r.check(&s.name, s.passed, s.detail.clone());
        r.timing(&s.name.replace(' ', "_"), s.millis);
    }
}

/// Report of a pipeline run, successful or not.
pub fn pipeline_report(spec: &PipelineSpec, steps: &[StepReport], result: &Result<PipelineOutput, PipelineError>) -> Report {
    let mut r = Report::new("pipeline");
    let alg = &spec.algebra;
    r.input("algebra.basis", alg.basis_names().join(", "));
    r.input("algebra.coefficients", alg.coeff_vars().iter().map(|v| v.name()).collect::<Vec<_>>().join(", "));
    r.input("line", format!("{}, {}; {}", spec.line.x, spec.line.y, spec.line.bindings.iter().map(|(z, l)| format!("{z} = {l}")).collect::<Vec<_>>().join(", ")));
    r.input("seed", seed_kind(&spec.seed));
    r.dimension("algebra_rank", alg.rank());
    add_steps(&mut r, steps);
    match result {
        Ok(out) => {
            r.input("chi", &out.chi);
            r.input("chi_on_line", &out.chi_line);
            r.dimension("seed", out.seed.dim());
            r.dimension("module", out.module.dim());
            r.dimension("monomials", out.monomials.len());
            r.dimension("filtration_steps", out.filtration.flags().len());
            for (i, m) in out.monomial_records.iter().enumerate() {
                let deg = match m.degrees_consistent {
                    Some(true) => "degrees match",
                    Some(false) => "degrees do not match the grading",
                    None => "ungraded",
                };
                r.input(&format!("monomial.{}", i + 1), format!("{} ({deg})", m.spec));
            }
            if !out.graded_mode {
                r.note("ungraded mode: degree bookkeeping skipped");
            }
            if out.coordinate_change {
                r.note("line moved to the origin by a linear change of coordinates");
            }
            if !out.char_report.algebra_morphism.passed() {
                r.note("C is a characteristic morphism but not an algebra morphism");
            }
        }
        Err(e) => {
            r.passed = false;
            if steps.is_empty() {
                r.check("input", false, e.to_string());
            }
        }
    }
    r.note(SMOOTHNESS_NOTE);
    r
}

fn roby_detail(rep: &RobyReport) -> String {
    match (&rep.first_mismatch, rep.graded) {
        (Some(e), _) => format!("entry ({},{}) is {} but should be {}", e.row, e.col, e.actual, e.expected),
        (None, false) => format!("grading violated at {:?}", rep.grading_violation),
        (None, true) => format!("power {} of the generic action is the target times the identity", rep.degree),
    }
}

/// Report of a verify-only run on a stored module.
pub fn roby_report(source: &str, m: &GradedRobyModule, rep: &RobyReport) -> Report {
    let mut r = Report::new("roby-verify");
    r.input("module", source);
    r.input("target", m.target());
    r.dimension("module", m.dim());
    r.dimension("degree", m.degree() as usize);
    r.check("roby identity", rep.identity, roby_detail(rep));
    r.check("graded", rep.graded, if rep.graded { "actions shift the grading by one".into() } else { format!("violation at {:?}", rep.grading_violation) });
    r
}

/// Report of a characteristic-morphism check.
pub fn char_morphism_report(source: &str, c: &CharMorphism, rep: &CharMorphismReport) -> Report {
    let mut r = Report::new("charmor");
    r.input("source", source);
    r.input("chi", c.algebra().char_poly());
    r.dimension("module", c.dim());
    r.dimension("algebra_rank", c.algebra().rank());
    let detail = match &rep.first_nonzero {
        Some((i, j, p)) => format!("entry ({i},{j}) of chi(C(a), a) is {p}"),
        None => "chi(C(a), a) = 0".into(),
    };
    r.check("characteristic identity", rep.identity, detail);
    let m = &rep.algebra_morphism;
    r.note(format!(
        "algebra morphism: unit {}, multiplicative {}{}",
        m.unit,
        m.multiplicative,
        m.first_failure.map(|(i, j)| format!(" (fails at basis pair {}, {})", i + 1, j + 1)).unwrap_or_default()
    ));
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{examples, run_traced};
    use crate::poly::{Poly, PolyMatrix};
    use std::sync::Arc;

    #[test]
    fn quadric_report_is_deterministic() {
        let spec = examples::quadric();
        let (s1, r1) = run_traced(&spec);
        let (s2, r2) = run_traced(&spec);
        let a = pipeline_report(&spec, &s1, &r1);
        let b = pipeline_report(&spec, &s2, &r2);
        assert!(a.passed);
        assert_eq!(a.dimensions["module"], 8);
        assert_eq!(a.without_timing().render(Format::Text), b.without_timing().render(Format::Text));
        assert_eq!(a.without_timing().render(Format::Json), b.without_timing().render(Format::Json));
        assert!(a.notes.iter().any(|n| n == SMOOTHNESS_NOTE));
        let parsed: Report = serde_json::from_str(&a.render(Format::Json)).unwrap();
        assert_eq!(parsed, a);
    }

    #[test]
    fn corrupted_seed_names_the_entry() {
        let mut spec = examples::quadric();
        let alg_line = Arc::new(spec.algebra.substitute(&spec.line.as_map()).unwrap());
        let b = PolyMatrix::parse_rows(&[vec!["0", "x"], vec!["y", "0"]]).unwrap();
        let good = crate::roby::cyclic_cover_seed(alg_line, &b).unwrap();
        let mut actions = good.actions().to_vec();
        let bad = actions[1].get(0, 2).clone() + Poly::one();
        actions[1].set(0, 2, bad);
        let corrupted = GradedRobyModule::with_t_slot(good.grading().to_vec(), actions, good.target().clone()).unwrap();
        spec.seed = Seed::Module(corrupted);
        let (steps, res) = run_traced(&spec);
        let r = pipeline_report(&spec, &steps, &res);
        assert!(!r.passed);
        let last = r.checks.last().unwrap();
        assert_eq!(last.name, "seed");
        assert!(!last.passed);
        assert!(last.detail.contains("Roby identity fails: entry ("), "{}", last.detail);

        spec.seed = Seed::CyclicCover(PolyMatrix::parse_rows(&[vec!["0", "x"], vec!["x", "0"]]).unwrap());
        let (steps, res) = run_traced(&spec);
        assert!(!pipeline_report(&spec, &steps, &res).passed);
    }

    #[test]
    fn verify_only_has_the_same_schema() {
        let m = crate::roby::split_roby(3);
        let rep = crate::roby::verify_roby(&m);
        let r = roby_report("split(3)", &m, &rep);
        assert!(r.passed);
        let v: serde_json::Value = serde_json::from_str(&r.render(Format::Json)).unwrap();
        let p = pipeline_report(&examples::trivial(), &[], &Err(PipelineError::SeedRejected("x".into())));
        let w: serde_json::Value = serde_json::from_str(&p.render(Format::Json)).unwrap();
        let keys = |v: &serde_json::Value| v.as_object().unwrap().keys().cloned().collect::<Vec<_>>();
        assert_eq!(keys(&v), keys(&w));
    }
}
