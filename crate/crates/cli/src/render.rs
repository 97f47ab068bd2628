use std::fmt::Write as _;

use serde_json::Value;

use crate::config::{OutputFormat, RunConfig};
use kwsense::WsdReport;

/// Prints `value` as JSON (keys sorted) or the table produced by `table`.
pub fn emit(cfg: &RunConfig, value: &Value, table: impl FnOnce() -> String) -> anyhow::Result<()> {
    match cfg.output {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(value)?),
        OutputFormat::Table => println!("{}", table()),
    }
    Ok(())
}

pub fn disambiguation_table(cfg: &RunConfig, out: &Value) -> String {
    let mut s = format!("# {}\n", cfg.summary());
    let empty = Vec::new();
    for entry in out["keywords"].as_array().unwrap_or(&empty) {
        let kd = entry["keyword"].as_str().unwrap_or_default();
        let result = &entry["result"];
        if result.is_null() {
            let _ = writeln!(s, "{kd}: no senses");
            continue;
        }
        let ctx: Vec<&str> = result["active_context"]["members"]
            .as_array()
            .unwrap_or(&empty)
            .iter()
            .filter_map(|m| m["word"].as_str())
            .collect();
        let _ = writeln!(s, "{kd}: context [{}]", ctx.join(", "));
        for sense in result["senses"].as_array().unwrap_or(&empty) {
            let t = &sense["trace"];
            let _ = writeln!(
                s,
                "  {:<24} {:.6}  (step1 {:.6}, step2 {:.6}, step3 {:.6})",
                sense["sense_id"].as_str().unwrap_or_default(),
                sense["score"].as_f64().unwrap_or(f64::NAN),
                t["step1"].as_f64().unwrap_or(f64::NAN),
                t["step2"].as_f64().unwrap_or(f64::NAN),
                t["step3"].as_f64().unwrap_or(f64::NAN),
            );
        }
    }
    s.trim_end().to_owned()
}

pub fn wsd_table(cfg: &RunConfig, r: &WsdReport) -> String {
    let mut s = format!("# {}\n", cfg.summary());
    for rec in &r.records {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}",
            rec.item_id,
            rec.position,
            rec.keyword,
            rec.predicted.as_deref().unwrap_or("-"),
            if rec.correct { "ok" } else { "x" }
        );
    }
    let _ = write!(
        s,
        "attempted={} correct={} total={} precision={:.4} recall={:.4} f1={:.4}",
        r.attempted, r.correct, r.total, r.precision, r.recall, r.f1
    );
    s
}
