//! Emitted reports conform to `docs/report-schema.json`.
//!
//! The validator covers the keywords the schema uses: type, const, enum,
//! required, properties, additionalProperties, items, minimum and maximum.

use std::path::Path;

use serde_json::Value;
use vcurate::{
    classification_metrics, emit_report, enrich, label_distribution, refine, token_stats, Averaging,
    FunctionRecord, Report, TokenCounter,
};

fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report-schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn type_matches(name: &str, v: &Value) -> bool {
    match name {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "integer" => v.is_u64() || v.is_i64(),
        "number" => v.is_number(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        other => panic!("unsupported type {other}"),
    }
}

fn validate(schema: &Value, v: &Value, at: &str, errors: &mut Vec<String>) {
    let s = schema.as_object().unwrap();
    if let Some(t) = s.get("type") {
        let ok = match t {
            Value::String(name) => type_matches(name, v),
            Value::Array(names) => names.iter().any(|n| type_matches(n.as_str().unwrap(), v)),
            _ => panic!("bad type keyword"),
        };
        if !ok {
            errors.push(format!("{at}: expected type {t}"));
            return;
        }
    }
    if let Some(c) = s.get("const") {
        if c != v {
            errors.push(format!("{at}: expected {c}"));
        }
    }
    if let Some(Value::Array(options)) = s.get("enum") {
        if !options.contains(v) {
            errors.push(format!("{at}: {v} not in enum"));
        }
    }
    if let Some(n) = v.as_f64() {
        if s.get("minimum").and_then(Value::as_f64).is_some_and(|m| n < m) {
            errors.push(format!("{at}: below minimum"));
        }
        if s.get("maximum").and_then(Value::as_f64).is_some_and(|m| n > m) {
            errors.push(format!("{at}: above maximum"));
        }
    }
    if let Value::Object(obj) = v {
        if let Some(Value::Array(req)) = s.get("required") {
            for r in req {
                if !obj.contains_key(r.as_str().unwrap()) {
                    errors.push(format!("{at}: missing {r}"));
                }
            }
        }
        let props = s.get("properties").and_then(Value::as_object);
        for (k, child) in obj {
            let path = format!("{at}.{k}");
            match (props.and_then(|p| p.get(k)), s.get("additionalProperties")) {
                (Some(sub), _) => validate(sub, child, &path, errors),
                (None, Some(Value::Bool(false))) => errors.push(format!("{path}: not allowed")),
                (None, Some(sub @ Value::Object(_))) => validate(sub, child, &path, errors),
                _ => {}
            }
        }
    }
    if let (Value::Array(items), Some(sub)) = (v, s.get("items")) {
        for (i, item) in items.iter().enumerate() {
            validate(sub, item, &format!("{at}[{i}]"), errors);
        }
    }
}

fn errors_for(doc: &Value) -> Vec<String> {
    let mut errors = Vec::new();
    validate(&schema(), doc, "$", &mut errors);
    errors
}

fn full_report() -> Report {
    let funcs = [
        ("int a(int x){return x;}", 0),
        ("int b(int y){return y;}", 1),
        ("// c", 0),
        ("void d(){ puts(\"s\"); }", 1),
    ];
    let records: Vec<_> = funcs.iter().map(|&(f, t)| enrich(FunctionRecord::new(f, t))).collect();
    let (_, curation) = refine(&records);
    let texts: Vec<&str> = funcs.iter().map(|f| f.0).collect();
    let stats = token_stats(&texts, 8, &TokenCounter::Lexical).unwrap();
    let dist = label_distribution(funcs.iter().map(|f| f.1));
    let metrics = classification_metrics(&[0, 0, 0, 1], &[0, 1, 0, 1], Averaging::Macro).unwrap();
    emit_report(Some(stats), Some(dist), Some(curation), Some(metrics)).unwrap()
}

#[test]
fn full_report_validates() {
    let doc: Value = serde_json::from_str(&full_report().to_json()).unwrap();
    assert_eq!(errors_for(&doc), Vec::<String>::new());
}

#[test]
fn partial_report_validates() {
    let stats = token_stats(&["x;"], 1024, &TokenCounter::Surface).unwrap();
    let report = emit_report(Some(stats), None, None, None).unwrap();
    let doc: Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(errors_for(&doc), Vec::<String>::new());
}

#[test]
fn degenerate_metrics_validate() {
    let m = classification_metrics(&[0, 0], &[0, 0], Averaging::PositiveClass).unwrap();
    let report = emit_report(None, None, None, Some(m)).unwrap();
    let doc: Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(errors_for(&doc), Vec::<String>::new());
    assert_eq!(doc["metrics"]["degenerate_flags"].as_array().unwrap().len(), 3);
}

#[test]
fn schema_rejects_drift() {
    let mut doc: Value = serde_json::from_str(&full_report().to_json()).unwrap();
    doc["curation"].as_object_mut().unwrap().remove("retained");
    doc["metrics"]["surprise"] = Value::from(1);
    doc["token_stats"]["over_limit_fraction"] = Value::from(1.5);
    doc["schema_version"] = Value::from(2);
    let errors = errors_for(&doc);
    assert_eq!(errors.len(), 4, "{errors:?}");
}
