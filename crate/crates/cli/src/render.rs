//! Human-readable rendering of the report model.

use std::fmt::Write as _;

use pdmlab::report::{CheckRecord, ReportDocument, Status, Tier};

pub fn header(doc: &ReportDocument) -> String {
    format!(
        "pdmlab {} seed={} points={} tol={:e}\n",
        doc.tool_version, doc.seed, doc.policy.points, doc.policy.tol
    )
}

fn check_line(c: &CheckRecord) -> String {
    let status = match c.status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Inconclusive => "INCONCLUSIVE",
    };
    let tier = match c.tier {
        Tier::Symbolic => "proved",
        Tier::Numeric => "numeric",
    };
    let mut s = format!("{status:<4} {tier:<7} [{}]", c.entry);
    if let Some(i) = &c.integral {
        let _ = write!(s, " {i}:");
    }
    let _ = write!(s, " {}", c.check);
    if let Some(r) = c.max_residual {
        if c.tier == Tier::Numeric {
            let _ = write!(s, " (residual {r:.3e}");
            if let Some(p) = c.points {
                let _ = write!(s, ", {p} points");
            }
            s.push(')');
        }
    }
    if let Some(d) = &c.detail {
        let _ = write!(s, " -- {d}");
    }
    s
}

pub fn document(doc: &ReportDocument) -> String {
    let mut out = String::new();
    for sec in &doc.sections {
        let _ = writeln!(out, "== {} ==", sec.title);
        for c in &sec.checks {
            let _ = writeln!(out, "{}", check_line(c));
        }
        for a in &sec.annotations {
            let _ = writeln!(out, "note [{}] {}: {}", a.entry, a.topic, a.text);
        }
    }
    let s = &doc.summary;
    let _ = writeln!(
        out,
        "summary: proved {}, numeric {}, failed {}, annotated {}",
        s.proved, s.numeric, s.failed, s.annotated
    );
    out
}
