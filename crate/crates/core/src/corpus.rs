//! Document records, newline-delimited JSON corpora and author-disjoint splits.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on post length, in Unicode scalar values.
pub const MAX_TEXT_CHARS: usize = 4000;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hyperlink {
    #[serde(default)]
    pub url: String,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Author {
    pub id: String,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub bio: String,
}

/// One post with everything the encoders may consume.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub hyperlinks: Vec<Hyperlink>,
    #[serde(default)]
    pub media_annotations: Vec<String>,
    #[serde(default)]
    pub entity_descriptions: Vec<String>,
    pub author: Author,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_labels: Option<BTreeSet<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weak_labels: Option<BTreeSet<String>>,
}

impl Document {
    fn validate(&self) -> std::result::Result<(), String> {
        if self.id.is_empty() {
            return Err("empty document id".into());
        }
        if self.author.id.is_empty() {
            return Err(format!("document {:?} has an empty author id", self.id));
        }
        let chars = self.text.chars().count();
        if chars > MAX_TEXT_CHARS {
            return Err(format!(
                "document {:?} text has {chars} characters (limit {MAX_TEXT_CHARS})",
                self.id
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub provenance: String,
}

impl Corpus {
    /// Builds a corpus, checking the document invariants and id uniqueness.
    pub fn new(documents: Vec<Document>, provenance: impl Into<String>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(documents.len());
        for (i, doc) in documents.iter().enumerate() {
            doc.validate()
                .map_err(|m| Error::parse("corpus", i + 1, m))?;
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::DuplicateDocument(doc.id.clone()));
            }
        }
        Ok(Self {
            documents,
            provenance: provenance.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Document> {
        self.documents.iter()
    }

    /// Parses newline-delimited JSON. Blank lines are ignored.
    pub fn parse(text: &str, provenance: impl Into<String>) -> Result<Self> {
        let provenance = provenance.into();
        let mut docs = Vec::new();
        let mut seen = HashSet::new();
        for (i, line) in text.lines().enumerate() {
            let doc = parse_line(line, i + 1, &provenance)?;
            if let Some(doc) = doc {
                if !seen.insert(doc.id.clone()) {
                    return Err(Error::DuplicateDocument(doc.id));
                }
                docs.push(doc);
            }
        }
        Ok(Self {
            documents: docs,
            provenance,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let provenance = path.display().to_string();
        let mut docs = Vec::new();
        let mut seen = HashSet::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if let Some(doc) = parse_line(&line, i + 1, &provenance)? {
                if !seen.insert(doc.id.clone()) {
                    return Err(Error::DuplicateDocument(doc.id));
                }
                docs.push(doc);
            }
        }
        Ok(Self {
            documents: docs,
            provenance,
        })
    }

    /// One JSON object per line, in corpus order.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for doc in &self.documents {
            out.push_str(&serde_json::to_string(doc).expect("documents serialize"));
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        w.write_all(self.to_jsonl().as_bytes())
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn author_ids(&self) -> BTreeSet<&str> {
        self.documents.iter().map(|d| d.author.id.as_str()).collect()
    }
}

fn parse_line(line: &str, line_no: usize, context: &str) -> Result<Option<Document>> {
    if line.trim().is_empty() {
        return Ok(None);
    }
    let doc: Document =
        serde_json::from_str(line).map_err(|e| Error::parse(context, line_no, e.to_string()))?;
    doc.validate()
        .map_err(|m| Error::parse(context, line_no, m))?;
    Ok(Some(doc))
}

/// Free-function form of [`Corpus::load`].
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    Corpus::load(path)
}

/// Train / validation / test partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Corpus,
    pub valid: Corpus,
    pub test: Corpus,
}

impl Split {
    pub fn parts(&self) -> [&Corpus; 3] {
        [&self.train, &self.valid, &self.test]
    }
}

/// Default train/validation/test fractions.
pub const DEFAULT_FRACTIONS: [f64; 3] = [0.8, 0.1, 0.1];

/// Splits a corpus so that every author's documents land in exactly one part.
///
/// Authors are shuffled with a seeded generator and assigned greedily to the
/// first part whose document budget (`fraction * len`) is not yet reached, so
/// a part overshoots its budget by less than one author's documents.
pub fn split_user_disjoint(corpus: &Corpus, fractions: [f64; 3], seed: u64) -> Result<Split> {
    if fractions.iter().any(|f| !f.is_finite() || *f < 0.0) {
        return Err(Error::InvalidFractions(format!(
            "{fractions:?} must be finite and non-negative"
        )));
    }
    let total: f64 = fractions.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidFractions(format!(
            "{fractions:?} sums to {total}, expected 1"
        )));
    }

    let mut by_author: HashMap<&str, usize> = HashMap::new();
    for doc in &corpus.documents {
        *by_author.entry(doc.author.id.as_str()).or_default() += 1;
    }
    let mut authors: Vec<&str> = by_author.keys().copied().collect();
    authors.sort_unstable();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    authors.shuffle(&mut rng);

    let n = corpus.len() as f64;
    let budgets = fractions.map(|f| f * n);
    let mut counts = [0usize; 3];
    let mut assignment: HashMap<&str, usize> = HashMap::with_capacity(authors.len());
    for author in authors {
        let part = (0..3)
            .find(|&k| (counts[k] as f64) < budgets[k])
            .unwrap_or_else(|| {
                // Only reachable through rounding of the budgets.
                (0..3)
                    .max_by(|&a, &b| {
                        let da = budgets[a] - counts[a] as f64;
                        let db = budgets[b] - counts[b] as f64;
                        da.total_cmp(&db).then(b.cmp(&a))
                    })
                    .unwrap()
            });
        counts[part] += by_author[author];
        assignment.insert(author, part);
    }

    let mut parts: [Vec<Document>; 3] = Default::default();
    for doc in &corpus.documents {
        parts[assignment[doc.author.id.as_str()]].push(doc.clone());
    }
    let [train, valid, test] = parts;
    let prov = |suffix: &str| format!("{}.{suffix}", corpus.provenance);
    Ok(Split {
        train: Corpus {
            documents: train,
            provenance: prov("train"),
        },
        valid: Corpus {
            documents: valid,
            provenance: prov("valid"),
        },
        test: Corpus {
            documents: test,
            provenance: prov("test"),
        },
    })
}
