//! Canonical JSON rendering: keys in sorted order, reals formatted with 17
//! significant digits, so equal reports are byte-identical files.

use serde_json::Value;

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                let f = n.as_f64().unwrap_or(0.0);
                out.push_str(&format!("{f:.16e}"));
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("strings serialize"));
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            // serde_json's default map is a BTreeMap, so iteration order is
            // already sorted; sort defensively in case the feature set
            // changes.
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, key) in keys.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(&Value::String((*key).clone()), out);
                out.push(':');
                write_value(&map[*key], out);
            }
            out.push('}');
        }
    }
}

/// Renders a JSON value canonically; the result ends with a newline.
pub fn to_canonical_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, &mut out);
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_sorted_and_reals_pinned() {
        let v = json!({"zeta": 1.0, "alpha": 0.5, "count": 3});
        let s = to_canonical_string(&v);
        assert_eq!(
            s,
            "{\"alpha\":5.0000000000000000e-1,\"count\":3,\"zeta\":1.0000000000000000e0}\n"
        );
    }

    #[test]
    fn rendering_is_deterministic() {
        let v = json!({"a": [1.25, -0.3], "b": {"c": null, "d": true}});
        assert_eq!(to_canonical_string(&v), to_canonical_string(&v));
    }
}
