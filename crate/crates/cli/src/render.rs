use std::fmt::Write;

use crate::document::VariantSpec;
use crate::pipeline::{CompareOutcome, ReportOutcome, Resolved, ValidateOutcome};

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn header(out: &mut String, model: &str, r: &Resolved) {
    let variant = match r.variant {
        VariantSpec::Full => "full",
        VariantSpec::Simplified => "simplified",
    };
    let based = if r.reduced { "reduced" } else { "unreduced" };
    let _ = writeln!(
        out,
        "model {model} ({variant}, {based}); degrees 0..={}; free Lie window up to {} (margin {})",
        r.max_degree, r.window, r.trust_margin
    );
}

pub fn validate(v: &ValidateOutcome) -> String {
    let mut out = String::new();
    header(&mut out, &v.model, &v.settings);
    for c in &v.checks {
        let _ = writeln!(out, "  [{}] {}: {}", if c.passed { "ok" } else { "FAIL" }, c.name, c.detail);
        for d in &c.defects {
            let _ = writeln!(out, "      {d}");
        }
    }
    let _ = writeln!(out, "valid: {}", yes(v.valid));
    out
}

pub fn report(r: &ReportOutcome) -> String {
    let mut out = String::new();
    header(&mut out, &r.model, &r.settings);
    if r.twisting.is_empty() {
        let _ = writeln!(out, "twisting: none");
    } else {
        let t: Vec<String> =
            r.twisting.iter().map(|t| format!("{}*hom({},{})", t.coefficient, t.word, t.target)).collect();
        let _ = writeln!(out, "twisting: {}", t.join(" + "));
    }
    for s in &r.applied_signs {
        let _ = writeln!(out, "  word {} reordered with sign {}", s.word, s.sign);
    }
    let _ = writeln!(out, "convention: {}", r.convention);
    let _ = writeln!(out);
    let _ = writeln!(out, "{:>4} {:>4} {:>6} {:>6} {:>6}  trusted", "n", "pi", "total", "fiber", "base");
    for row in &r.rows {
        let _ = writeln!(
            out,
            "{:>4} {:>4} {:>6} {:>6} {:>6}  {}",
            row.degree,
            row.homotopy_degree,
            row.total,
            row.fiber,
            row.base,
            yes(row.trusted)
        );
    }
    let _ = writeln!(out);
    let nonzero: Vec<String> = r
        .rows
        .iter()
        .filter(|x| x.trusted && x.total > 0)
        .map(|x| {
            if x.total == 1 {
                format!("pi_{} = Q", x.homotopy_degree)
            } else {
                format!("pi_{} = Q^{}", x.homotopy_degree, x.total)
            }
        })
        .collect();
    let _ = writeln!(
        out,
        "rational homotopy: {}",
        if nonzero.is_empty() { "trivial in trusted degrees".to_string() } else { nonzero.join(", ") }
    );
    match r.trusted_up_to {
        Some(n) => {
            let _ = writeln!(out, "trusted through degree {n}");
        }
        None => {
            let _ = writeln!(out, "no trusted degrees");
        }
    }
    if let Some(m) = r.suggested_trust_margin {
        let _ = writeln!(out, "rerun with --trust-margin {m} to trust every requested degree");
    }
    let euler = match r.euler_consistent {
        Some(true) => "consistent",
        Some(false) => "INCONSISTENT",
        None => "n/a",
    };
    let _ = writeln!(
        out,
        "short exact: {}; euler: {}; twist identity: {}",
        yes(r.exact),
        euler,
        if r.twist_identity { "holds" } else { "FAILS" }
    );
    let _ = writeln!(out, "validation: {} checks, {} defects", r.validation.checks, r.validation.defects.len());
    for d in &r.validation.defects {
        let _ = writeln!(out, "  {d}");
    }
    out
}

pub fn compare(c: &CompareOutcome) -> String {
    let mut out = String::new();
    let r = &c.settings;
    let _ = writeln!(
        out,
        "model {}: simplified against reduced full; degrees 0..={}; free Lie window up to {} (margin {})",
        c.model, r.max_degree, r.window, r.trust_margin
    );
    let _ = writeln!(out, "{:>4} {:>10} {:>6}  trusted  iso", "n", "simplified", "full");
    for r in &c.rows {
        let _ = writeln!(
            out,
            "{:>4} {:>10} {:>6}  {:<7}  {}",
            r.degree,
            r.simplified,
            r.full,
            yes(r.trusted),
            if r.trusted { yes(r.isomorphic) } else { "-" }
        );
    }
    let _ = writeln!(out, "dg Lie morphism: {}", yes(c.morphism));
    for d in &c.defects {
        let _ = writeln!(out, "  {d}");
    }
    let _ = writeln!(out, "quasi-isomorphism: {}", yes(c.quasi_isomorphism));
    let _ = writeln!(out, "twist identity: {}", if c.twist_identity { "holds" } else { "FAILS" });
    out
}
