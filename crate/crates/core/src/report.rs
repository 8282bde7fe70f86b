//! Report writers.
//!
//! JSONL: one `VerifyReport` per line, fields in declaration order.
//!
//! CSV columns, fixed:
//! `statement_id,n,k,family,seed,cardinalities,certified_lower_bound,holds,runtime_ms`.
//! `cardinalities` is `name=value` pairs joined by `;` in name order; empty
//! cells stand for absent optional values.

use std::io::{self, Write};

use crate::verify::VerifyReport;

pub const CSV_HEADER: [&str; 9] = [
    "statement_id",
    "n",
    "k",
    "family",
    "seed",
    "cardinalities",
    "certified_lower_bound",
    "holds",
    "runtime_ms",
];

pub fn write_jsonl<W: Write>(mut w: W, reports: &[VerifyReport]) -> io::Result<()> {
    for r in reports {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

pub fn csv_row(r: &VerifyReport) -> [String; 9] {
    let cards: Vec<String> = r
        .cardinalities
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    [
        r.statement_id.to_string(),
        r.inputs.n.to_string(),
        opt(&r.inputs.k),
        opt(&r.inputs.family),
        opt(&r.inputs.seed),
        cards.join(";"),
        r.certified_lower_bound.to_string(),
        r.holds.to_string(),
        opt(&r.runtime_ms),
    ]
}

pub fn write_csv<W: Write>(w: W, reports: &[VerifyReport]) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in reports {
        out.write_record(csv_row(r))?;
    }
    out.flush()
}
