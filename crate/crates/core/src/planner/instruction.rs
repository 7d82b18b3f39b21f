//! Step-instruction grammar shared by help documents and the explorer.
//!
//! ```text
//! click NAME [tab]          click a control (`tab` marks a ribbon tab)
//! type 'TEXT'               type into the edit revealed by the open menu, else the canvas
//! type 'TEXT' into NAME     type into a named control
//! set NAME to 'VALUE'       set the text of an editable control
//! select text 'TEXT'
//! select table N            1-based
//! press CHORD               e.g. ^b, {ESC}
//! scroll N                  wheel distance over the canvas
//! ```

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instruction {
    Click { name: String, tab: bool },
    Type { text: String },
    TypeInto { text: String, name: String },
    Set { name: String, value: String },
    SelectText { text: String },
    SelectTable { number: u32 },
    Press { chord: String },
    Scroll { dist: i64 },
}

/// Splits `'quoted' rest` into (quoted, rest).
fn quoted(s: &str) -> Option<(String, &str)> {
    let s = s.trim_start();
    let body = s.strip_prefix('\'')?;
    let end = body.rfind('\'')?;
    Some((body[..end].to_string(), body[end + 1..].trim()))
}

impl Instruction {
    pub fn parse(text: &str) -> Result<Instruction, String> {
        let t = text.trim();
        let (verb, rest) = t.split_once(' ').unwrap_or((t, ""));
        let rest = rest.trim();
        let bad = || format!("cannot parse instruction {text:?}");
        match verb {
            "click" if !rest.is_empty() => Ok(match rest.strip_suffix(" tab") {
                Some(name) => Instruction::Click {
                    name: name.trim().to_string(),
                    tab: true,
                },
                None => Instruction::Click {
                    name: rest.to_string(),
                    tab: false,
                },
            }),
            "type" => {
                let (text, tail) = quoted(rest).ok_or_else(bad)?;
                if tail.is_empty() {
                    Ok(Instruction::Type { text })
                } else {
                    let name = tail.strip_prefix("into ").ok_or_else(bad)?.trim();
                    Ok(Instruction::TypeInto {
                        text,
                        name: name.to_string(),
                    })
                }
            }
            "set" => {
                let (name, value) = rest.split_once(" to ").ok_or_else(bad)?;
                let (value, tail) = quoted(value).ok_or_else(bad)?;
                if !tail.is_empty() || name.trim().is_empty() {
                    return Err(bad());
                }
                Ok(Instruction::Set {
                    name: name.trim().to_string(),
                    value,
                })
            }
            "select" => {
                if let Some(r) = rest.strip_prefix("text ") {
                    let (text, tail) = quoted(r).ok_or_else(bad)?;
                    if !tail.is_empty() {
                        return Err(bad());
                    }
                    Ok(Instruction::SelectText { text })
                } else if let Some(r) = rest.strip_prefix("table ") {
                    let number = r.trim().parse().map_err(|_| bad())?;
                    Ok(Instruction::SelectTable { number })
                } else {
                    Err(bad())
                }
            }
            "press" if !rest.is_empty() => Ok(Instruction::Press {
                chord: rest.to_string(),
            }),
            "scroll" => Ok(Instruction::Scroll {
                dist: rest.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Click { name, tab: true } => write!(f, "click {name} tab"),
            Instruction::Click { name, tab: false } => write!(f, "click {name}"),
            Instruction::Type { text } => write!(f, "type '{text}'"),
            Instruction::TypeInto { text, name } => write!(f, "type '{text}' into {name}"),
            Instruction::Set { name, value } => write!(f, "set {name} to '{value}'"),
            Instruction::SelectText { text } => write!(f, "select text '{text}'"),
            Instruction::SelectTable { number } => write!(f, "select table {number}"),
            Instruction::Press { chord } => write!(f, "press {chord}"),
            Instruction::Scroll { dist } => write!(f, "scroll {dist}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_help_doc_steps() {
        assert_eq!(
            Instruction::parse("click Insert tab").unwrap(),
            Instruction::Click {
                name: "Insert".into(),
                tab: true
            }
        );
        assert_eq!(
            Instruction::parse("set Font Size to '13'").unwrap(),
            Instruction::Set {
                name: "Font Size".into(),
                value: "13".into()
            }
        );
        assert_eq!(
            Instruction::parse("type 'it's here' into Search").unwrap(),
            Instruction::TypeInto {
                text: "it's here".into(),
                name: "Search".into()
            }
        );
        assert!(Instruction::parse("dance").is_err());
        assert!(Instruction::parse("select table two").is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "click 2x2 Table",
            "type 'header'",
            "select text 'hello'",
            "select table 2",
            "press ^b",
            "scroll -3",
        ] {
            assert_eq!(Instruction::parse(s).unwrap().to_string(), s);
        }
    }
}
