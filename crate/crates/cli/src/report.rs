//! Text rendering of reports: one `key = value` line per scalar, floats
//! with 17 significant digits.

use serde::Serialize;
use serde_json::Value;

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, child, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), child, out);
            }
        }
        Value::Number(n) => {
            let text = if n.is_f64() {
                format_float(n.as_f64().unwrap_or(f64::NAN))
            } else {
                n.to_string()
            };
            out.push((prefix.to_string(), text));
        }
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), "none".into())),
    }
}

pub fn render_text<T: Serialize>(report: &T) -> anyhow::Result<String> {
    let value = serde_json::to_value(report)?;
    let mut lines = Vec::new();
    flatten("", &value, &mut lines);
    let mut out = String::new();
    for (k, v) in lines {
        out.push_str(&k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    }
    Ok(out)
}

pub fn render<T: Serialize>(report: &T, json: bool) -> anyhow::Result<String> {
    if json {
        let mut s = serde_json::to_string_pretty(report)?;
        s.push('\n');
        Ok(s)
    } else {
        render_text(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Inner {
        x: f64,
    }

    #[derive(Serialize)]
    struct Sample {
        name: &'static str,
        count: usize,
        value: f64,
        maybe: Option<f64>,
        inner: Inner,
        list: Vec<f64>,
    }

    #[test]
    fn flattens_with_seventeen_digits() {
        let s = Sample {
            name: "t",
            count: 3,
            value: 0.1,
            maybe: None,
            inner: Inner { x: 2.0 },
            list: vec![1.0 / 3.0],
        };
        let text = render_text(&s).unwrap();
        assert!(text.contains("value = 1.0000000000000001e-1\n"));
        assert!(text.contains("count = 3\n"));
        assert!(text.contains("maybe = none\n"));
        assert!(text.contains("inner.x = 2.0000000000000000e0\n"));
        assert!(text.contains("list[0] = 3.3333333333333331e-1\n"));
    }
}
