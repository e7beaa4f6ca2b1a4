//! Plain-text view of a JSON report: one `path: value` line per leaf, with
//! numeric arrays kept on a single line.

use serde_json::Value;

fn is_flat(items: &[Value]) -> bool {
    items.iter().all(|v| !v.is_object() && !v.is_array())
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(inline).collect();
            format!("[{}]", parts.join(", "))
        }
        other => other.to_string(),
    }
}

fn walk(v: &Value, path: &str, out: &mut String) {
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, child) in map {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                walk(child, &p, out);
            }
        }
        Value::Array(items) if !items.is_empty() && !is_flat(items) && !items.iter().all(|i| i.as_array().is_some_and(|a| is_flat(a))) => {
            for (i, child) in items.iter().enumerate() {
                walk(child, &format!("{path}[{i}]"), out);
            }
        }
        leaf => {
            out.push_str(path);
            out.push_str(": ");
            out.push_str(&inline(leaf));
            out.push('\n');
        }
    }
}

pub fn render(v: &Value) -> String {
    let mut out = String::new();
    walk(v, "", &mut out);
    while out.ends_with('\n') {
        out.pop();
    }
    out
}
