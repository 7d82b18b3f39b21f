use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Structural argument type shared by action signatures and skill params.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArgType {
    String,
    Number,
    Boolean,
    List,
}

impl ArgType {
    pub fn as_str(self) -> &'static str {
        match self {
            ArgType::String => "string",
            ArgType::Number => "number",
            ArgType::Boolean => "boolean",
            ArgType::List => "list",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "string" => Some(ArgType::String),
            "number" => Some(ArgType::Number),
            "boolean" => Some(ArgType::Boolean),
            "list" => Some(ArgType::List),
            _ => None,
        }
    }
}

impl fmt::Display for ArgType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An argument value: a scalar or a flat list of scalars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Num(f64),
    Str(String),
    List(Vec<Value>),
}

pub type Args = BTreeMap<String, Value>;

impl Value {
    pub fn arg_type(&self) -> ArgType {
        match self {
            Value::Bool(_) => ArgType::Boolean,
            Value::Num(_) => ArgType::Number,
            Value::Str(_) => ArgType::String,
            Value::List(_) => ArgType::List,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Num(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Plain rendering used when a value is spliced into text: strings
    /// unquoted, integral numbers without a fraction.
    pub fn render(&self) -> String {
        match self {
            Value::Str(s) => s.clone(),
            Value::Num(n) => format_number(*n),
            Value::Bool(b) => b.to_string(),
            Value::List(items) => items.iter().map(Value::render).collect::<Vec<_>>().join(","),
        }
    }

    /// Casts a rendered template value back to `ty`.
    pub fn cast(&self, ty: ArgType) -> Option<Value> {
        match (self, ty) {
            (v, t) if v.arg_type() == t => Some(v.clone()),
            (Value::Str(s), ArgType::Number) => s.trim().parse::<f64>().ok().filter(|n| n.is_finite()).map(Value::Num),
            (Value::Str(s), ArgType::Boolean) => s.trim().parse::<bool>().ok().map(Value::Bool),
            (Value::Num(_) | Value::Bool(_), ArgType::String) => Some(Value::Str(self.render())),
            _ => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("values always serialize")
    }
}

pub fn format_number(n: f64) -> String {
    if n.fract() == 0.0 && n.abs() < 1e15 {
        format!("{}", n as i64)
    } else {
        format!("{n}")
    }
}

/// DSL literal syntax.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Str(s) => write!(f, "{}", serde_json::Value::String(s.clone())),
            Value::Num(n) => f.write_str(&format_number(*n)),
            Value::Bool(b) => write!(f, "{b}"),
            Value::List(items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
        }
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Str(s)
    }
}

impl From<f64> for Value {
    fn from(n: f64) -> Self {
        Value::Num(n)
    }
}

impl From<i32> for Value {
    fn from(n: i32) -> Self {
        Value::Num(n as f64)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_display() {
        assert_eq!(Value::from(2).to_string(), "2");
        assert_eq!(Value::from(1.5).to_string(), "1.5");
        assert_eq!(Value::from("a\"b").to_string(), r#""a\"b""#);
        assert_eq!(
            Value::List(vec![Value::from(1), Value::from("x")]).to_string(),
            r#"[1, "x"]"#
        );
    }

    #[test]
    fn cast_from_rendered_text() {
        assert_eq!(Value::from("3").cast(ArgType::Number), Some(Value::from(3)));
        assert_eq!(Value::from("x").cast(ArgType::Number), None);
        assert_eq!(Value::from(3).cast(ArgType::String), Some(Value::from("3")));
    }

    #[test]
    fn untagged_json() {
        let v: Value = serde_json::from_str(r#"[1, "a", true]"#).unwrap();
        assert_eq!(v.arg_type(), ArgType::List);
    }
}
