//! Canonical text forms used for digests, golden files and the XML view.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Serializes with object keys sorted at every level, independent of how
/// `serde_json` was compiled.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("model types always serialize");
    let mut out = String::new();
    write_value(&v, &mut out);
    out
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push(':');
                write_value(&map[*k], out);
            }
            out.push('}');
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
        other => out.push_str(&other.to_string()),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn digest_of<T: Serialize>(value: &T) -> String {
    sha256_hex(canonical_json(value).as_bytes())
}

/// Renders any serializable value as sorted-key XML. Arrays become
/// `<item index="i">` children; null becomes an empty element.
pub fn xml_view<T: Serialize>(root: &str, value: &T) -> String {
    let v = serde_json::to_value(value).expect("model types always serialize");
    let mut out = String::new();
    write_xml(root, None, &v, &mut out);
    out
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

fn write_xml(tag: &str, index: Option<usize>, v: &Value, out: &mut String) {
    out.push('<');
    out.push_str(tag);
    if let Some(i) = index {
        out.push_str(&format!(" index=\"{i}\""));
    }
    match v {
        Value::Null => {
            out.push_str("/>");
            return;
        }
        _ => out.push('>'),
    }
    match v {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for k in keys {
                write_xml(k, None, &map[k], out);
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                write_xml("item", Some(i), item, out);
            }
        }
        Value::String(s) => out.push_str(&escape(s)),
        other => out.push_str(&other.to_string()),
    }
    out.push_str("</");
    out.push_str(tag);
    out.push('>');
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_are_sorted_recursively() {
        let v = json!({"b": 1, "a": {"d": [1, {"z": 0, "y": 1}], "c": null}});
        assert_eq!(
            canonical_json(&v),
            r#"{"a":{"c":null,"d":[1,{"y":1,"z":0}]},"b":1}"#
        );
    }

    #[test]
    fn xml_escapes_and_indexes() {
        let v = json!({"t": ["a<b", "c"], "n": null});
        assert_eq!(
            xml_view("doc", &v),
            r#"<doc><n/><t><item index="0">a&lt;b</item><item index="1">c</item></t></doc>"#
        );
    }
}
