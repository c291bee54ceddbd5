//! The ordered character inventory of a model. Index `i` owns row `i` of the
//! output weight matrix, so codec order is part of the model's identity.

use std::collections::HashMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codec {
    chars: Vec<char>,
    index: HashMap<char, usize>,
}

impl Codec {
    /// Build from an ordered character list. Duplicates are rejected.
    pub fn new(chars: Vec<char>) -> Result<Self> {
        let mut index = HashMap::with_capacity(chars.len());
        for (i, &c) in chars.iter().enumerate() {
            if index.insert(c, i).is_some() {
                return Err(Error::invalid(format!("duplicate codec character {c:?}")));
            }
        }
        Ok(Codec { chars, index })
    }

    /// Codec in first-occurrence order over the given texts.
    pub fn from_first_occurrence<'a, I: IntoIterator<Item = &'a str>>(texts: I) -> Self {
        let mut chars = Vec::new();
        let mut index = HashMap::new();
        for text in texts {
            for c in text.chars() {
                if !index.contains_key(&c) {
                    index.insert(c, chars.len());
                    chars.push(c);
                }
            }
        }
        Codec { chars, index }
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn contains(&self, c: char) -> bool {
        self.index.contains_key(&c)
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.index.get(&c).copied()
    }

    pub fn char_at(&self, i: usize) -> char {
        self.chars[i]
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }
}
