//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are lowercase
//! ASCII letters, digits, `_` and `-`; each key may appear once.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValueConfig {
    entries: BTreeMap<String, (String, usize)>,
}

fn valid_key(k: &str) -> bool {
    !k.is_empty() && k.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '-')
}

impl KeyValueConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(n + 1, format!("expected key = value, found '{line}'")))?;
            let (k, v) = (k.trim(), v.trim());
            if !valid_key(k) {
                return Err(Error::parse(n + 1, format!("invalid key '{k}'")));
            }
            if v.is_empty() {
                return Err(Error::parse(n + 1, format!("key '{k}' has no value")));
            }
            if let Some((_, first)) = entries.get(k) {
                return Err(Error::parse(n + 1, format!("duplicate key '{k}' (first set on line {first})")));
            }
            entries.insert(k.to_string(), (v.to_string(), n + 1));
        }
        Ok(KeyValueConfig { entries })
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    /// Line on which a key was set.
    pub fn line_of(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|(_, l)| *l)
    }

    /// Typed value of a key, or None when absent.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::parse(*line, format!("cannot parse value '{v}' of key '{key}'"))),
        }
    }

    /// A comma-separated pair such as `0.5,2.5`.
    pub fn get_pair<T: FromStr>(&self, key: &str) -> Result<Option<(T, T)>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => parse_pair(v).map(Some).map_err(|_| Error::parse(*line, format!("key '{key}' expects a pair a,b, got '{v}'"))),
        }
    }

    /// Fails on the first key not in `known`.
    pub fn reject_unknown(&self, known: &[&str]) -> Result<()> {
        for (k, (_, line)) in &self.entries {
            if !known.contains(&k.as_str()) {
                return Err(Error::parse(*line, format!("unknown key '{k}'")));
            }
        }
        Ok(())
    }
}

pub fn parse_pair<T: FromStr>(s: &str) -> std::result::Result<(T, T), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected a,b, got '{s}'"))?;
    match (a.trim().parse(), b.trim().parse()) {
        (Ok(a), Ok(b)) => Ok((a, b)),
        _ => Err(format!("expected a,b, got '{s}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_types() {
        let c = KeyValueConfig::parse("# run\nmetric = sphere\n\nc=-0.05\ngrid = 64,32\n").unwrap();
        assert_eq!(c.raw("metric"), Some("sphere"));
        assert_eq!(c.get::<f64>("c").unwrap(), Some(-0.05));
        assert_eq!(c.get_pair::<usize>("grid").unwrap(), Some((64, 32)));
        assert_eq!(c.get::<f64>("missing").unwrap(), None);
        assert_eq!(c.line_of("grid"), Some(5));
    }

    #[test]
    fn errors_carry_lines() {
        assert!(matches!(KeyValueConfig::parse("a = 1\nnonsense\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(KeyValueConfig::parse("a = 1\na = 2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(KeyValueConfig::parse("A = 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(KeyValueConfig::parse("a =\n"), Err(Error::Parse { line: 1, .. })));
        let c = KeyValueConfig::parse("\nc = x\n").unwrap();
        assert!(matches!(c.get::<f64>("c"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(c.reject_unknown(&["d"]), Err(Error::Parse { line: 2, .. })));
    }
}
