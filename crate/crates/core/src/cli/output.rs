use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::Value;

/// 17 significant digits.
pub fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

pub enum Sink<'a> {
    File(BufWriter<File>),
    Stdout(&'a mut dyn Write),
}

impl<'a> Sink<'a> {
    pub fn open(path: Option<&Path>, stdout: &'a mut dyn Write) -> io::Result<Self> {
        match path {
            Some(p) => File::create(p)
                .map(|f| Sink::File(BufWriter::new(f)))
                .map_err(|e| io::Error::new(e.kind(), format!("cannot write {}: {e}", p.display()))),
            None => Ok(Sink::Stdout(stdout)),
        }
    }

    pub fn finish(self) -> io::Result<()> {
        match self {
            Sink::File(mut f) => f.flush(),
            Sink::Stdout(s) => s.flush(),
        }
    }
}

impl Write for Sink<'_> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match self {
            Sink::File(f) => f.write(buf),
            Sink::Stdout(s) => s.write(buf),
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match self {
            Sink::File(f) => f.flush(),
            Sink::Stdout(s) => s.flush(),
        }
    }
}

/// `# key: value` preamble lines ahead of a CSV header.
pub fn write_meta_lines(w: &mut dyn Write, entries: &[(&str, String)]) -> io::Result<()> {
    for (k, v) in entries {
        writeln!(w, "# {k}: {v}")?;
    }
    Ok(())
}

fn num(v: &Value) -> String {
    v.as_f64().map(f17).unwrap_or_else(|| "-".into())
}

fn flags(r: &Value) -> String {
    let mut s = if r["satisfied"].as_bool() == Some(true) {
        "ok".to_string()
    } else {
        "VIOLATED".to_string()
    };
    if r["saturated"].as_bool() == Some(true) {
        s.push_str(", saturated");
    }
    if r["degenerate"].as_bool() == Some(true) {
        s.push_str(", degenerate");
    }
    s
}

fn relation_line(w: &mut dyn Write, label: &str, r: &Value) -> io::Result<()> {
    writeln!(
        w,
        "  {label:<22} lhs {}  rhs {}  margin {}  [{}]",
        num(&r["lhs"]),
        num(&r["rhs"]),
        num(&r["margin"]),
        flags(r)
    )
}

pub fn write_verify_text(w: &mut dyn Write, rep: &Value) -> io::Result<()> {
    writeln!(w, "source: {}, dim {}, tol {}", rep["source"].as_str().unwrap_or("?"), rep["dim"], num(&rep["tol"]))?;
    writeln!(w, "dispersions:")?;
    if let Some(s) = rep["sigma2"].as_array() {
        for (k, v) in s.iter().enumerate() {
            writeln!(w, "  sigma{}^2 = {}  (mean {})", k + 1, num(v), num(&rep["means"][k]))?;
        }
    }
    if let Some(pairs) = rep["pairs"].as_array() {
        writeln!(w, "pairwise relations:")?;
        for p in pairs {
            let tag = format!("({},{})", p["i"], p["j"]);
            relation_line(w, &format!("heisenberg {tag}"), &p["heisenberg"])?;
            relation_line(w, &format!("schroedinger {tag}"), &p["schroedinger"])?;
        }
    }
    if let Some(table) = rep["correlations"].as_array() {
        writeln!(w, "normalized correlations:")?;
        for c in table {
            let deg = if c["degenerate"].as_bool() == Some(true) { "  degenerate" } else { "" };
            writeln!(w, "  ({},{})  rho {}  phi {}{deg}", c["i"], c["j"], num(&c["rho"]), num(&c["phi"]))?;
        }
        if !rep["sigma_sum"].is_null() {
            writeln!(
                w,
                "  Sigma {}  (wrapped {})  cos Sigma {}",
                num(&rep["sigma_sum"]),
                num(&rep["sigma_sum_wrapped"]),
                num(&rep["cos_sigma"])
            )?;
        }
    }
    if !rep["gur_raw"].is_null() {
        writeln!(w, "three-observable relation:")?;
        relation_line(w, "raw", &rep["gur_raw"])?;
        if rep["gur_normalized"]["degenerate"].as_bool() == Some(true) && rep["gur_normalized"]["relation"].is_null() {
            writeln!(w, "  {:<22} undefined (degenerate dispersion; raw form applies)", "normalized")?;
        } else {
            relation_line(w, "normalized", &rep["gur_normalized"])?;
        }
    }
    if !rep["gur_n"].is_null() {
        let g = &rep["gur_n"];
        writeln!(w, "moment matrix:")?;
        writeln!(
            w,
            "  det {}  min eigenvalue {}  worst minor {}  psd {}",
            num(&g["report"]["margin"]),
            num(&g["min_eigenvalue"]),
            num(&g["worst_minor"]),
            g["is_psd"]
        )?;
    }
    writeln!(
        w,
        "result: {}",
        if rep["all_satisfied"].as_bool() == Some(true) { "all relations satisfied" } else { "VIOLATION" }
    )
}
