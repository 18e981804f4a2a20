//! Text and JSON rendering of reports.

use std::fmt::Write;

use num_complex::Complex64;
use serde_json::{json, Value};
use symsecant::io::{decomposition_json, scalar_json};
use symsecant::poly::Poly;
use symsecant::rdm::ParentHamiltonian;
use symsecant::slocc::SweepRow;
use symsecant::sylvester::{BinaryForm, ProjectiveRoot, TangentCertificate, WaringDecomposition, Witness};
use symsecant::{ClassificationReport, DecomposedState, Field, GaussianRational, Mode};

pub fn json_line(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn c64_text(c: Complex64) -> String {
    let clean = |x: f64| if x.abs() < 5e-13 { 0.0 } else { x };
    let (re, im) = (clean(c.re), clean(c.im));
    match (re == 0.0, im == 0.0) {
        (_, true) => format!("{re:.6}"),
        (true, false) => format!("{im:.6}i"),
        _ => format!("{re:.6}{im:+.6}i"),
    }
}

fn scalar_text<F: Field>(x: &F) -> String {
    match (F::MODE, x.to_exact()) {
        (Mode::Exact, Some(q)) => q.to_string(),
        _ => c64_text(x.to_c64()),
    }
}

/// `g_0 x0^k + g_1 x0^{k-1} x1 + …`, zero terms dropped.
fn form_text<F: Field>(g: &BinaryForm<F>) -> String {
    let k = g.degree();
    let mono = |e: usize, v: &str| match e {
        0 => String::new(),
        1 => v.to_string(),
        _ => format!("{v}^{e}"),
    };
    let parts: Vec<String> = g
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| {
            let m = [mono(k - i, "x0"), mono(i, "x1")].into_iter().filter(|s| !s.is_empty()).collect::<Vec<_>>().join("·");
            if m.is_empty() {
                format!("({})", scalar_text(c))
            } else {
                format!("({})·{m}", scalar_text(c))
            }
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn form_json<F: Field>(g: &BinaryForm<F>) -> Value {
    json!(g.coeffs().iter().map(scalar_json).collect::<Vec<_>>())
}

fn poly_json(p: &Poly<GaussianRational>) -> Value {
    json!(p.coeffs().iter().map(scalar_json).collect::<Vec<_>>())
}

fn root_json(r: &ProjectiveRoot) -> Value {
    json!({ "point": [[r.point[0].re, r.point[0].im], [r.point[1].re, r.point[1].im]], "multiplicity": r.multiplicity })
}

fn root_text(r: &ProjectiveRoot) -> String {
    format!("[{} : {}] ×{}", c64_text(r.point[0]), c64_text(r.point[1]), r.multiplicity)
}

fn decomposition_value<F: Field>(d: &WaringDecomposition<F>) -> Value {
    let algebraic = d.algebraic().map(|a| {
        let (x0, x1) = a.point();
        json!({
            "minimal_polynomial": poly_json(a.minimal_polynomial()),
            "weight": poly_json(a.weight()),
            "x0": poly_json(x0),
            "x1": poly_json(x1),
        })
    });
    json!({
        "rank": d.rank(),
        "form": form_json(d.form()),
        "residual": d.residual(),
        "terms": d.explicit().map(decomposition_json),
        "algebraic": algebraic,
        "numeric_terms": decomposition_json(d.numeric()),
    })
}

fn certificate_value<F: Field>(c: &TangentCertificate<F>) -> Value {
    json!({
        "k": c.k,
        "kernel": c.kernel.iter().map(form_json).collect::<Vec<_>>(),
        "common_factor": c.common_factor.as_ref().map(form_json),
        "repeated_roots": c.repeated_roots.iter().map(root_json).collect::<Vec<_>>(),
    })
}

pub fn classify_json<F: Field>(r: &ClassificationReport<F>, mode: &str) -> Value {
    let witness = match &r.witness {
        Witness::Decomposition(d) => json!({ "kind": "decomposition", "decomposition": decomposition_value(d) }),
        Witness::Tangent { certificate, minimal } => json!({
            "kind": "tangent",
            "certificate": certificate_value(certificate),
            "decomposition": decomposition_value(minimal),
        }),
    };
    json!({
        "schema": 1,
        "command": "classify",
        "mode": mode,
        "N": r.n,
        "border_rank": r.border_rank,
        "symmetric_rank": r.symmetric_rank,
        "label": r.label.name(),
        "taxonomy": r.label.taxonomy(r.n),
        "rank_profile": r.rank_profile,
        "witness": witness,
        "flags": r.flags,
        "unstable": r.unstable,
    })
}

fn terms_text<F: Field>(out: &mut String, d: &DecomposedState<F>) {
    for t in d.terms() {
        let v: Vec<String> = t.vector.0.iter().map(scalar_text).collect();
        let _ = writeln!(out, "    {} · ({})^⊗{}", scalar_text(&t.weight), v.join(", "), d.parties());
    }
}

fn decomposition_text<F: Field>(out: &mut String, d: &WaringDecomposition<F>) {
    let _ = writeln!(out, "  apolar form: {}", form_text(d.form()));
    if let Some(e) = d.explicit() {
        let _ = writeln!(out, "  decomposition ({} terms):", e.len());
        terms_text(out, e);
    } else {
        if let Some(a) = d.algebraic() {
            let (x0, x1) = a.point();
            let _ = writeln!(out, "  decomposition over the roots t of p(t) = {}:", a.minimal_polynomial());
            let _ = writeln!(out, "    L(t) · (x0(t), x1(t))^⊗{}", a.parties());
            let _ = writeln!(out, "    L(t)  = {}", a.weight());
            let _ = writeln!(out, "    x0(t) = {x0}");
            let _ = writeln!(out, "    x1(t) = {x1}");
        }
        let _ = writeln!(out, "  numeric terms ({}):", d.numeric().len());
        terms_text(out, d.numeric());
    }
    let _ = writeln!(out, "  residual: {:.3e}", d.residual());
}

pub fn classify_text<F: Field>(r: &ClassificationReport<F>, mode: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "N = {} ({mode} mode)", r.n);
    let _ = writeln!(out, "label: {} [{}]", r.label, r.label.taxonomy(r.n));
    let _ = writeln!(out, "border rank: {}", r.border_rank);
    let _ = writeln!(out, "symmetric rank: {}", r.symmetric_rank);
    let ranks: Vec<String> = r.rank_profile.ranks.iter().map(|k| k.to_string()).collect();
    let _ = writeln!(out, "catalecticant ranks C_1..C_{}: {}", ranks.len(), ranks.join(" "));
    match &r.witness {
        Witness::Decomposition(d) => {
            let _ = writeln!(out, "witness: square-free apolar form of degree {}", d.rank());
            decomposition_text(&mut out, d);
        }
        Witness::Tangent { certificate, minimal } => {
            let _ = writeln!(out, "witness: degree-{} apolar forms share a repeated root", certificate.k);
            for g in &certificate.kernel {
                let _ = writeln!(out, "  kernel: {}", form_text(g));
            }
            if let Some(c) = &certificate.common_factor {
                let _ = writeln!(out, "  common factor: {}", form_text(c));
            }
            for root in &certificate.repeated_roots {
                let _ = writeln!(out, "  repeated root: {}", root_text(root));
            }
            let _ = writeln!(out, "minimal decomposition ({} terms):", minimal.rank());
            decomposition_text(&mut out, minimal);
        }
    }
    for f in &r.flags {
        let _ = writeln!(out, "note: {f}");
    }
    if r.unstable {
        let _ = writeln!(out, "UNSTABLE: a rank or root decision was near its threshold");
    }
    out
}

pub fn sweep_text(rows: &[SweepRow]) -> String {
    let mut out = format!("{:>12} {:>14} {:>14} {:>14} {:>12}\n", "epsilon", "chordal", "fidelity", "p", "p/eps^2");
    for r in rows {
        let _ = writeln!(
            out,
            "{:>12.3e} {:>14.6e} {:>14.10} {:>14.6e} {:>12.8}",
            r.epsilon, r.chordal_distance, r.fidelity, r.p, r.p_over_eps2
        );
    }
    out
}

pub fn hamiltonian_text(h: &ParentHamiltonian, auto_j: usize, source: &str) -> String {
    let v = &h.verification;
    let mut out = String::new();
    let _ = writeln!(out, "N = {}, j = {} ({source}; interaction length {auto_j})", h.n, h.j);
    let _ = writeln!(out, "projector rank: {} on Sym^{}", h.kernel_dimension, h.j);
    let _ = writeln!(out, "terms at sites: {:?}", h.terms);
    let _ = writeln!(out, "residual: {:.3e} (relative {:.3e})", v.residual, v.relative_residual);
    let _ = writeln!(out, "min eigenvalue: {:.3e} ({})", v.min_eigenvalue, v.spectrum);
    if let Some(g) = v.ground_dimension {
        let _ = writeln!(out, "ground dimension: {g}");
    }
    let _ = writeln!(out, "projector idempotence {:.1e}, hermiticity {:.1e}", v.projector_idempotence, v.projector_hermiticity);
    let _ = writeln!(out, "verification: {}", if v.passed { "passed" } else { "FAILED" });
    out
}
