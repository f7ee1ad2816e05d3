//! Keyword rules that produce weak topic labels, and the chatter partition
//! (documents that trigger no rule).
//!
//! Rules file format, one rule per line:
//!
//! ```text
//! # comment
//! Cricket: ipl, wicket, batsman
//! Basketball: nba, slam dunk, #marchmadness
//! ```

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::Path;

use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::topics::TopicSpace;

/// Case-folds, drops every character that is not a letter, digit, `#` or `@`
/// (whitespace aside) and splits on whitespace.
pub fn rule_tokens(text: &str) -> Vec<String> {
    let cleaned: String = text
        .chars()
        .flat_map(char::to_lowercase)
        .filter(|c| c.is_alphanumeric() || c.is_whitespace() || *c == '#' || *c == '@')
        .collect();
    cleaned.split_whitespace().map(str::to_string).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub topic: String,
    /// Normalized keyword phrases (tokens joined by single spaces).
    pub keywords: Vec<String>,
}

/// Compiled keyword rules over a topic space.
#[derive(Debug, Clone, Default)]
pub struct RuleSet {
    rules: Vec<Rule>,
    // first token -> (rule index, full token sequence)
    by_first: HashMap<String, Vec<(usize, Vec<String>)>>,
}

impl RuleSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn keyword_count(&self) -> usize {
        self.rules.iter().map(|r| r.keywords.len()).sum()
    }

    /// Adds keywords for a topic. Keywords are normalized with
    /// [`rule_tokens`]; duplicates are dropped.
    pub fn add<I, K>(&mut self, space: &TopicSpace, topic: &str, keywords: I) -> Result<()>
    where
        I: IntoIterator<Item = K>,
        K: AsRef<str>,
    {
        space.require(topic)?;
        let slot = match self.rules.iter().position(|r| r.topic == topic) {
            Some(i) => i,
            None => {
                self.rules.push(Rule {
                    topic: topic.to_string(),
                    keywords: Vec::new(),
                });
                self.rules.len() - 1
            }
        };
        for kw in keywords {
            let tokens = rule_tokens(kw.as_ref());
            if tokens.is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "empty keyword for topic {topic:?}"
                )));
            }
            let phrase = tokens.join(" ");
            if self.rules[slot].keywords.contains(&phrase) {
                continue;
            }
            self.rules[slot].keywords.push(phrase);
            self.by_first
                .entry(tokens[0].clone())
                .or_default()
                .push((slot, tokens));
        }
        Ok(())
    }

    pub fn parse(text: &str, space: &TopicSpace) -> Result<Self> {
        let mut set = Self::empty();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let line_no = i + 1;
            let (topic, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::parse("rules", line_no, "expected `Topic: kw1, kw2, ...`"))?;
            let topic = topic.trim();
            if space.index(topic).is_none() {
                return Err(Error::parse(
                    "rules",
                    line_no,
                    format!("unknown topic {topic:?}"),
                ));
            }
            let keywords: Vec<&str> = rest.split(',').map(str::trim).collect();
            if keywords.iter().any(|k| rule_tokens(k).is_empty()) {
                return Err(Error::parse(
                    "rules",
                    line_no,
                    format!("empty keyword for topic {topic:?}"),
                ));
            }
            set.add(space, topic, keywords)?;
        }
        Ok(set)
    }

    pub fn load(path: impl AsRef<Path>, space: &TopicSpace) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, space)
    }

    /// Topics with at least one keyword occurring as a contiguous token
    /// sequence in `text`.
    pub fn match_text(&self, text: &str) -> BTreeSet<String> {
        let tokens = rule_tokens(text);
        let mut hits: HashSet<usize> = HashSet::new();
        for start in 0..tokens.len() {
            let Some(candidates) = self.by_first.get(&tokens[start]) else {
                continue;
            };
            for (rule, phrase) in candidates {
                if hits.contains(rule) {
                    continue;
                }
                let end = start + phrase.len();
                if end <= tokens.len() && tokens[start..end] == phrase[..] {
                    hits.insert(*rule);
                }
            }
        }
        hits.into_iter()
            .map(|r| self.rules[r].topic.clone())
            .collect()
    }
}

/// Free-function form of [`RuleSet::load`].
pub fn compile_rules(path: impl AsRef<Path>, space: &TopicSpace) -> Result<RuleSet> {
    RuleSet::load(path, space)
}

/// Weak labels for a document: rule matches over its text.
pub fn weak_label(doc: &Document, rules: &RuleSet) -> BTreeSet<String> {
    rules.match_text(&doc.text)
}

/// Splits a corpus into documents with at least one weak label (labels
/// attached) and chatter, which triggers no rule (attached an empty set).
pub fn partition_chatter(corpus: &Corpus, rules: &RuleSet) -> (Corpus, Corpus) {
    let mut topical = Vec::new();
    let mut chatter = Vec::new();
    for doc in &corpus.documents {
        let labels = weak_label(doc, rules);
        let mut doc = doc.clone();
        if labels.is_empty() {
            doc.weak_labels = Some(BTreeSet::new());
            chatter.push(doc);
        } else {
            doc.weak_labels = Some(labels);
            topical.push(doc);
        }
    }
    (
        Corpus {
            documents: topical,
            provenance: format!("{}.topical", corpus.provenance),
        },
        Corpus {
            documents: chatter,
            provenance: format!("{}.chatter", corpus.provenance),
        },
    )
}
