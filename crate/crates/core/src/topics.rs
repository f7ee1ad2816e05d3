//! The topic registry and multi-hot label encoding.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use crate::error::{Error, Result};

/// Ordered set of topic names. Position in the list is the vector index used
/// by every label, logit and probability vector, by model files and by
/// constraint files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopicSpace {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl TopicSpace {
    /// Registers topics in the given order. Names are compared byte-exact.
    pub fn new<I, T>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::EmptyTopicList);
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateTopic(name.clone()));
            }
        }
        Ok(Self { names, index })
    }

    /// Parses a topic list: one name per line. Blank lines are skipped;
    /// surrounding whitespace and a trailing `\r` are trimmed.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(text.lines().map(str::trim).filter(|l| !l.is_empty()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Topic list file contents, one name per line.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for name in &self.names {
            out.push_str(name);
            out.push('\n');
        }
        out
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> Option<&str> {
        self.names.get(i).map(String::as_str)
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index(name)
            .ok_or_else(|| Error::UnknownTopic(name.to_string()))
    }

    /// Multi-hot encoding of a label set.
    pub fn encode<'a, I>(&self, labels: I) -> Result<MultiHot>
    where
        I: IntoIterator<Item = &'a String>,
    {
        let mut bits = vec![false; self.len()];
        for label in labels {
            bits[self.require(label)?] = true;
        }
        Ok(MultiHot(bits))
    }
}

/// Binary label vector over a [`TopicSpace`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiHot(Vec<bool>);

impl MultiHot {
    pub fn zeros(len: usize) -> Self {
        MultiHot(vec![false; len])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        MultiHot(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i)
    }

    /// Names of the set positions.
    pub fn decode(&self, space: &TopicSpace) -> BTreeSet<String> {
        self.ones()
            .filter_map(|i| space.name(i).map(str::to_string))
            .collect()
    }
}

/// Free-function form of [`TopicSpace::new`].
pub fn register_topics<I, T>(names: I) -> Result<TopicSpace>
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    TopicSpace::new(names)
}

/// Free-function form of [`TopicSpace::encode`].
pub fn encode_labels<'a, I>(labels: I, space: &TopicSpace) -> Result<MultiHot>
where
    I: IntoIterator<Item = &'a String>,
{
    space.encode(labels)
}
