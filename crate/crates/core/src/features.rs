//! Feature maps and unification.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Value stored for a `+flag` feature.
pub const FLAG_VALUE: &str = "true";

/// A partial map from feature names to atomic values.
///
/// Flags written `+def` are stored as `def=true`. Names are kept sorted so
/// that display and serialization are canonical.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureMap(BTreeMap<String, String>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureParseError {
    #[error("empty feature in `{0}`")]
    Empty(String),
    #[error("negative flag `{0}` is not supported")]
    NegativeFlag(String),
    #[error("malformed feature `{0}`")]
    Malformed(String),
    #[error("duplicate feature name `{0}`")]
    Duplicate(String),
}

impl FeatureMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.0.get(name).map(String::as_str)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Sets `name` to `value`, replacing any previous value.
    pub fn insert(&mut self, name: impl Into<String>, value: impl Into<String>) {
        self.0.insert(name.into(), value.into());
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Returns the union of both maps, or `None` if some shared name maps
    /// to different values.
    pub fn unify(&self, other: &FeatureMap) -> Option<FeatureMap> {
        let (mut out, smaller) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (name, value) in &smaller.0 {
            match out.0.get(name) {
                Some(existing) if existing != value => return None,
                Some(_) => {}
                None => {
                    out.0.insert(name.clone(), value.clone());
                }
            }
        }
        Some(out)
    }

    /// True when [`FeatureMap::unify`] would succeed.
    pub fn compatible(&self, other: &FeatureMap) -> bool {
        self.0
            .iter()
            .all(|(name, value)| other.0.get(name).is_none_or(|v| v == value))
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for FeatureMap {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        FeatureMap(iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }
}

/// Free-function form of [`FeatureMap::unify`].
pub fn unify(a: &FeatureMap, b: &FeatureMap) -> Option<FeatureMap> {
    a.unify(b)
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn valid_value(value: &str) -> bool {
    !value.is_empty()
        && !value
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | '=' | '[' | ']' | '(' | ')' | ':' | ';'))
}

impl FromStr for FeatureMap {
    type Err = FeatureParseError;

    /// Parses `f=v,+g,...`. The empty string is the empty map.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut map = FeatureMap::new();
        let s = s.trim();
        if s.is_empty() {
            return Ok(map);
        }
        for part in s.split(',') {
            let part = part.trim();
            if part.is_empty() {
                return Err(FeatureParseError::Empty(s.to_owned()));
            }
            let (name, value) = if let Some(flag) = part.strip_prefix('+') {
                (flag, FLAG_VALUE)
            } else if part.starts_with('-') {
                return Err(FeatureParseError::NegativeFlag(part.to_owned()));
            } else if let Some((name, value)) = part.split_once('=') {
                (name.trim(), value.trim())
            } else {
                return Err(FeatureParseError::Malformed(part.to_owned()));
            };
            if !valid_name(name) || !valid_value(value) {
                return Err(FeatureParseError::Malformed(part.to_owned()));
            }
            if map.contains(name) {
                return Err(FeatureParseError::Duplicate(name.to_owned()));
            }
            map.insert(name, value);
        }
        Ok(map)
    }
}

impl fmt::Display for FeatureMap {
    /// Writes `f=v,+g` with flags in `+` form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, value)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            if value == FLAG_VALUE {
                write!(f, "+{name}")?;
            } else {
                write!(f, "{name}={value}")?;
            }
        }
        Ok(())
    }
}
