//! Flat `key = value` configuration files with `[section]` headers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config:{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: String,
    pub line: usize,
    pub column: usize,
}

impl Entry {
    pub fn error(&self, message: impl Into<String>) -> ConfigError {
        ConfigError { line: self.line, column: self.column, message: message.into() }
    }

    pub fn parse<T: FromStr>(&self, what: &str) -> Result<T, ConfigError> {
        self.value.parse().map_err(|_| self.error(format!("expected {what}, found `{}`", self.value)))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<(String, String), Entry>,
}

fn is_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

impl ConfigFile {
    /// Keys before the first header belong to the section `run`.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        let mut section = "run".to_string();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let indent = raw.len() - raw.trim_start().len();
            let body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            if let Some(h) = body.strip_prefix('[') {
                let name = h.strip_suffix(']').ok_or(ConfigError {
                    line,
                    column: indent + body.len() + 1,
                    message: "expected `]`".into(),
                })?;
                if !is_name(name.trim()) {
                    return Err(ConfigError { line, column: indent + 2, message: format!("bad section name `{name}`") });
                }
                section = name.trim().to_string();
                continue;
            }
            let eq = body.find('=').ok_or(ConfigError {
                line,
                column: indent + body.len() + 1,
                message: "expected `key = value`".into(),
            })?;
            let key = body[..eq].trim();
            if !is_name(key) {
                return Err(ConfigError { line, column: indent + 1, message: format!("bad key `{key}`") });
            }
            let after = &body[eq + 1..];
            let value = after.trim();
            let column = indent + eq + 2 + (after.len() - after.trim_start().len());
            let k = (section.clone(), key.to_string());
            if entries.contains_key(&k) {
                return Err(ConfigError { line, column: indent + 1, message: format!("duplicate key `{section}.{key}`") });
            }
            entries.insert(k, Entry { value: value.to_string(), line, column });
        }
        Ok(ConfigFile { entries })
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    pub fn require(&self, section: &str, key: &str) -> Result<&Entry, ConfigError> {
        self.get(section, key).ok_or(ConfigError { line: 0, column: 0, message: format!("missing `{key}` in [{section}]") })
    }
}

/// `a,b,c`, `a..b` (inclusive) or `a..b:step`.
pub fn parse_depths(e: &Entry) -> Result<Vec<usize>, ConfigError> {
    let v = e.value.trim();
    let out: Vec<usize> = if let Some((a, rest)) = v.split_once("..") {
        let (b, step) = rest.split_once(':').unwrap_or((rest, "1"));
        let num = |s: &str| s.trim().parse::<usize>().map_err(|_| e.error(format!("bad depth range `{v}`")));
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if step == 0 || a > b {
            return Err(e.error(format!("bad depth range `{v}`")));
        }
        (a..=b).step_by(step).collect()
    } else {
        v.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| e.error(format!("bad depth `{}`", t.trim()))))
            .collect::<Result<_, _>>()?
    };
    if out.is_empty() || out.contains(&0) {
        return Err(e.error("depths must be a nonempty list of positive integers"));
    }
    Ok(out)
}

pub fn parse_floats(e: &Entry) -> Result<Vec<f64>, ConfigError> {
    let out: Vec<f64> = e
        .value
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| e.error(format!("bad number `{}`", t.trim()))))
        .collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err(e.error("empty list"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_positions() {
        let c = ConfigFile::parse("system = circle:2\n[verify]\n  tolerance =  0.5\n").unwrap();
        assert_eq!(c.get("run", "system").unwrap().value, "circle:2");
        let t = c.get("verify", "tolerance").unwrap();
        assert_eq!((t.line, t.column), (3, 16));
    }

    #[test]
    fn errors_carry_line_and_column() {
        let e = ConfigFile::parse("a = 1\nbogus line\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 11));
        let e = ConfigFile::parse("[run\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(ConfigFile::parse("a = 1\na = 2\n").is_err());
    }

    #[test]
    fn depth_lists() {
        let e = |v: &str| Entry { value: v.into(), line: 1, column: 1 };
        assert_eq!(parse_depths(&e("4..8:2")).unwrap(), vec![4, 6, 8]);
        assert_eq!(parse_depths(&e("3, 5")).unwrap(), vec![3, 5]);
        assert!(parse_depths(&e("0")).is_err());
        assert!(parse_depths(&e("")).is_err());
    }
}
