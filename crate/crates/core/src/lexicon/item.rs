use std::fmt;

use serde::Serialize;

use crate::features::FeatureMap;

/// POS categories matched against a token's tag rather than the category dictionary.
pub const POS_CATEGORIES: &[&str] = &["$v", "$n", "$adj", "$adv", "$pron"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ItemKind {
    Word,
    Lexeme,
    Category,
}

/// One position of a group, a transformation pattern or a target group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GroupItem {
    pub kind: ItemKind,
    pub text: String,
    pub constraints: FeatureMap,
}

/// Splits a lexeme identifier such as `lose_v` into stem and POS tag.
pub fn split_lexeme(text: &str) -> Option<(&str, &str)> {
    let (stem, pos) = text.rsplit_once('_')?;
    if stem.is_empty() || pos.is_empty() || !pos.chars().all(|c| c.is_ascii_lowercase()) {
        return None;
    }
    Some((stem, pos))
}

impl GroupItem {
    /// Classifies `text` by its shape: `$cat`, `stem_pos` or a plain wordform.
    pub fn new(text: impl Into<String>, constraints: FeatureMap) -> Self {
        let text = text.into();
        let kind = if text.starts_with('$') {
            ItemKind::Category
        } else if split_lexeme(&text).is_some() {
            ItemKind::Lexeme
        } else {
            ItemKind::Word
        };
        GroupItem {
            kind,
            text,
            constraints,
        }
    }

    pub fn plain(text: impl Into<String>) -> Self {
        Self::new(text, FeatureMap::new())
    }

    pub fn is_category(&self) -> bool {
        self.kind == ItemKind::Category
    }

    /// True for the built-in POS categories (`$v`, `$n`, ...).
    pub fn is_pos_category(&self) -> bool {
        self.is_category() && POS_CATEGORIES.contains(&self.text.as_str())
    }

    /// POS suffix of a lexeme item.
    pub fn pos(&self) -> Option<&str> {
        match self.kind {
            ItemKind::Lexeme => split_lexeme(&self.text).map(|(_, pos)| pos),
            _ => None,
        }
    }

    /// Key under which this item indexes a group: wordforms are lowercased.
    pub fn index_key(&self) -> String {
        match self.kind {
            ItemKind::Word => self.text.to_lowercase(),
            _ => self.text.clone(),
        }
    }

    /// Parses one whitespace-free item token: `word`, `lex_pos`, `$cat`, each
    /// optionally followed by `[features]`.
    pub fn parse(token: &str) -> Result<Self, String> {
        let (text, constraints) = match token.find('[') {
            Some(0) => return Err(format!("unexpected `[` in item `{token}`")),
            Some(i) => {
                let rest = &token[i + 1..];
                let body = rest
                    .strip_suffix(']')
                    .ok_or_else(|| format!("unterminated features in item `{token}`"))?;
                let features = body.parse::<FeatureMap>().map_err(|e| format!("item `{token}`: {e}"))?;
                (&token[..i], features)
            }
            None => (token, FeatureMap::new()),
        };
        if text.is_empty() || text.contains(']') {
            return Err(format!("malformed item `{token}`"));
        }
        if text == "$" {
            return Err(format!("empty category symbol in `{token}`"));
        }
        Ok(GroupItem::new(text, constraints))
    }
}

impl fmt::Display for GroupItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)?;
        if !self.constraints.is_empty() {
            write!(f, "[{}]", self.constraints)?;
        }
        Ok(())
    }
}

/// Parses a whitespace-separated item list in which heads are bracketed.
/// Returns the items and the 1-based positions of bracketed items.
pub(crate) fn parse_item_list(line: &str) -> Result<(Vec<GroupItem>, Vec<usize>), String> {
    let mut items = Vec::new();
    let mut heads = Vec::new();
    for token in line.split_whitespace() {
        let inner = match token.strip_prefix('[') {
            Some(rest) => {
                let inner = rest
                    .strip_suffix(']')
                    .ok_or_else(|| format!("unterminated head `{token}`"))?;
                heads.push(items.len() + 1);
                inner
            }
            None => token,
        };
        items.push(GroupItem::parse(inner)?);
    }
    Ok((items, heads))
}

/// Writes an item list, bracketing position `head` (1-based).
pub(crate) fn write_item_list(f: &mut impl fmt::Write, items: &[GroupItem], head: Option<usize>) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_char(' ')?;
        }
        if head == Some(i + 1) {
            write!(f, "[{item}]")?;
        } else {
            write!(f, "{item}")?;
        }
    }
    Ok(())
}
