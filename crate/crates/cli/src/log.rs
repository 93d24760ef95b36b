//! Machine-readable log lines on stderr, one JSON object per line.

use std::io::Write;

use serde_json::{json, Map, Value};

fn emit(level: &str, event: &str, fields: Value) {
    let mut obj = Map::new();
    obj.insert("level".into(), level.into());
    obj.insert("event".into(), event.into());
    if let Value::Object(extra) = fields {
        obj.extend(extra);
    }
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{}", Value::Object(obj));
}

pub fn info(event: &str, fields: Value) {
    emit("info", event, fields);
}

pub fn warn(event: &str, fields: Value) {
    emit("warn", event, fields);
}

pub fn error(e: &anyhow::Error, code: u8) {
    emit(
        "error",
        "failed",
        json!({ "message": format!("{e:#}"), "exit_code": code }),
    );
}
