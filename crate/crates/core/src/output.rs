//! Serialization of results and atomic file output.
//!
//! JSON documents carry `"schema": 1`. Keys are emitted in sorted order and
//! floats in shortest round-trip form, so identical inputs give identical
//! bytes; the optional `meta` block (elapsed time) is the only exception.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::Result;
use crate::spectrum::{ConvergenceRecord, Eigenfunction, SpectrumResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Run metadata that varies between otherwise identical runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Meta {
    pub elapsed_s: f64,
}

impl Meta {
    fn to_json(self) -> Value {
        json!({
            "elapsed_s": self.elapsed_s,
            "version": env!("CARGO_PKG_VERSION"),
        })
    }
}

fn pairs(values: &[Complex64]) -> Value {
    Value::Array(values.iter().map(|k| json!([k.re, k.im])).collect())
}

fn finish(mut doc: Value, meta: Option<Meta>) -> String {
    if let Some(m) = meta {
        doc["meta"] = m.to_json();
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
    s.push('\n');
    s
}

pub fn spectrum_json(result: &SpectrumResult, meta: Option<Meta>) -> String {
    let p = &result.params;
    let doc = json!({
        "schema": SCHEMA_VERSION,
        "method": p.method.tag(),
        "params": {
            "n": p.n,
            "a": p.a,
            "half_width": p.half_width,
            "lambda": p.lambda_sign.value(),
            "potential": p.potential,
        },
        "all_k": pairs(&result.all_k),
        "discrete_k": pairs(&result.discrete_k),
        "residuals": result.residuals,
    });
    finish(doc, meta)
}

/// `kind,re,im,residual`: the discrete eigenvalues (`kind = discrete`) then
/// every computed eigenvalue (`kind = all`, empty residual).
pub fn spectrum_csv(result: &SpectrumResult) -> String {
    let mut s = String::from("kind,re,im,residual\n");
    for (k, r) in result.discrete_k.iter().zip(&result.residuals) {
        writeln!(s, "discrete,{},{},{}", k.re, k.im, r).unwrap();
    }
    for k in &result.all_k {
        writeln!(s, "all,{},{},", k.re, k.im).unwrap();
    }
    s
}

/// `x,re_psi1,im_psi1,re_psi2,im_psi2`; the end rows have `x = ±inf`.
pub fn eigenfunction_csv(ef: &Eigenfunction) -> String {
    let mut s = String::from("x,re_psi1,im_psi1,re_psi2,im_psi2\n");
    for ((x, p1), p2) in ef.x.iter().zip(&ef.psi1).zip(&ef.psi2) {
        writeln!(s, "{x},{},{},{},{}", p1.re, p1.im, p2.re, p2.im).unwrap();
    }
    s
}

/// Infinite coordinates are written as `null`.
pub fn eigenfunction_json(ef: &Eigenfunction, meta: Option<Meta>) -> String {
    let doc = json!({
        "schema": SCHEMA_VERSION,
        "k": [ef.k.re, ef.k.im],
        "residual": ef.residual,
        "x": ef.x,
        "psi1": pairs(&ef.psi1),
        "psi2": pairs(&ef.psi2),
    });
    finish(doc, meta)
}

/// `route,a,n,error,status`, with `error = inf` for failed points.
pub fn convergence_csv(records: &[(String, ConvergenceRecord)]) -> String {
    let mut s = String::from("route,a,n,error,status\n");
    for (name, rec) in records {
        for p in &rec.points {
            writeln!(s, "{name},{},{},{},{}", p.a, p.n, p.error, p.status.tag()).unwrap();
        }
    }
    s
}

pub fn convergence_json(records: &[(String, ConvergenceRecord)], meta: Option<Meta>) -> String {
    let reference = records.first().map(|(_, r)| json!([r.reference_k.re, r.reference_k.im]));
    let routes: Vec<Value> = records
        .iter()
        .map(|(name, rec)| {
            json!({
                "name": name,
                "points": rec.points.iter().map(|p| json!({
                    "a": p.a,
                    "n": p.n,
                    "error": p.error,
                    "status": p.status.tag(),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let doc = json!({
        "schema": SCHEMA_VERSION,
        "reference_k": reference,
        "routes": routes,
    });
    finish(doc, meta)
}

/// One row of a Chebyshev / Fourier comparison at matched size.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub size: usize,
    pub chebyshev_error: f64,
    pub fcm_error: f64,
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut s = String::from("size,chebyshev_error,fcm_error\n");
    for r in rows {
        writeln!(s, "{},{},{}", r.size, r.chebyshev_error, r.fcm_error).unwrap();
    }
    s
}

pub fn comparison_json(reference: Complex64, a: f64, half_width: f64, rows: &[ComparisonRow], meta: Option<Meta>) -> String {
    let doc = json!({
        "schema": SCHEMA_VERSION,
        "reference_k": [reference.re, reference.im],
        "a": a,
        "half_width": half_width,
        "rows": rows.iter().map(|r| json!({
            "size": r.size,
            "chebyshev_error": r.chebyshev_error,
            "fcm_error": r.fcm_error,
        })).collect::<Vec<_>>(),
    });
    finish(doc, meta)
}

/// Writes `bytes` to `path` via a temporary file in the same directory and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let write = || -> std::io::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(bytes)?;
        #[cfg(unix)]
        {
            use std::os::unix::fs::PermissionsExt;
            tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644))?;
        }
        tmp.as_file().sync_all()?;
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    };
    write().map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}
