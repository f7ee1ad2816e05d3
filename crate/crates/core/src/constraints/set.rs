//! Declared constraints between topics and the constraints file format.
//!
//! ```text
//! # broader topic first
//! includes Sports Cricket
//! includes Sports "American football"
//! excludes Cricket Basketball
//! # custom table: phi(0,0) phi(0,1) phi(1,0) phi(1,1)
//! potential Music Jazz 0.5 0.1 0.5 5
//! ```
//!
//! Multi-word topic names may be quoted; unquoted names are accepted when
//! exactly one way of splitting the words yields two known topics.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use crate::constraints::potential::{exclusion_potential, inclusion_potential, PotentialMatrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::topics::TopicSpace;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstraintKind {
    /// `first` is the broader topic, `second` the narrower one.
    Includes,
    /// At most one of the two topics is active.
    Excludes,
    /// User-supplied table, rows indexed by `first`.
    Custom(PotentialMatrix<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraint {
    pub first: usize,
    pub second: usize,
    pub kind: ConstraintKind,
}

impl Constraint {
    pub fn potential<S: Scalar>(&self) -> PotentialMatrix<S> {
        match self.kind {
            ConstraintKind::Includes => inclusion_potential(),
            ConstraintKind::Excludes => exclusion_potential(),
            ConstraintKind::Custom(m) => m.cast(),
        }
    }

    pub fn touches(&self, topic: usize) -> bool {
        self.first == topic || self.second == topic
    }
}

/// Validated constraints over a topic space of `topic_count` topics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstraintSet {
    topic_count: usize,
    constraints: Vec<Constraint>,
}

fn unordered(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl ConstraintSet {
    pub fn new(topic_count: usize) -> Self {
        Self {
            topic_count,
            constraints: Vec::new(),
        }
    }

    pub fn topic_count(&self) -> usize {
        self.topic_count
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// `(broader, narrower)` pairs.
    pub fn inclusions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.constraints
            .iter()
            .filter(|c| c.kind == ConstraintKind::Includes)
            .map(|c| (c.first, c.second))
    }

    pub fn exclusions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.constraints
            .iter()
            .filter(|c| c.kind == ConstraintKind::Excludes)
            .map(|c| (c.first, c.second))
    }

    pub fn add(&mut self, constraint: Constraint) -> Result<()> {
        let Constraint { first, second, kind } = constraint;
        for i in [first, second] {
            if i >= self.topic_count {
                return Err(Error::InvalidConstraint(format!(
                    "topic index {i} out of range for {} topics",
                    self.topic_count
                )));
            }
        }
        if first == second {
            return Err(Error::InvalidConstraint(format!(
                "constraint relates topic {first} to itself"
            )));
        }
        let pair = unordered(first, second);
        for existing in &self.constraints {
            let same_pair = unordered(existing.first, existing.second) == pair;
            if !same_pair {
                continue;
            }
            let duplicate = match (existing.kind, kind) {
                (ConstraintKind::Includes, ConstraintKind::Includes) => {
                    existing.first == first
                }
                (ConstraintKind::Excludes, ConstraintKind::Excludes) => true,
                (ConstraintKind::Custom(_), ConstraintKind::Custom(_)) => true,
                (ConstraintKind::Includes, ConstraintKind::Excludes)
                | (ConstraintKind::Excludes, ConstraintKind::Includes) => {
                    return Err(Error::InvalidConstraint(format!(
                        "topics {first} and {second} are both included and excluded"
                    )));
                }
                _ => false,
            };
            if duplicate {
                return Err(Error::InvalidConstraint(format!(
                    "duplicate constraint between topics {first} and {second}"
                )));
            }
        }
        self.constraints.push(constraint);
        Ok(())
    }

    pub fn add_inclusion(&mut self, broader: usize, narrower: usize) -> Result<()> {
        self.add(Constraint {
            first: broader,
            second: narrower,
            kind: ConstraintKind::Includes,
        })
    }

    pub fn add_exclusion(&mut self, a: usize, b: usize) -> Result<()> {
        self.add(Constraint {
            first: a,
            second: b,
            kind: ConstraintKind::Excludes,
        })
    }

    pub fn add_custom(&mut self, a: usize, b: usize, potential: PotentialMatrix<f64>) -> Result<()> {
        self.add(Constraint {
            first: a,
            second: b,
            kind: ConstraintKind::Custom(potential),
        })
    }

    /// Topics touched by at least one constraint, ascending.
    pub fn constrained_topics(&self) -> BTreeSet<usize> {
        self.constraints
            .iter()
            .flat_map(|c| [c.first, c.second])
            .collect()
    }

    /// Connected components of the constraint graph, each sorted ascending,
    /// ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: BTreeMap<usize, usize> = self
            .constrained_topics()
            .into_iter()
            .map(|t| (t, t))
            .collect();
        fn find(parent: &mut BTreeMap<usize, usize>, x: usize) -> usize {
            let mut root = x;
            while parent[&root] != root {
                root = parent[&root];
            }
            let mut cur = x;
            while parent[&cur] != root {
                let next = parent[&cur];
                parent.insert(cur, root);
                cur = next;
            }
            root
        }
        for c in &self.constraints {
            let a = find(&mut parent, c.first);
            let b = find(&mut parent, c.second);
            if a != b {
                parent.insert(a.max(b), a.min(b));
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let topics: Vec<usize> = parent.keys().copied().collect();
        for t in topics {
            let root = find(&mut parent, t);
            groups.entry(root).or_default().push(t);
        }
        let mut comps: Vec<Vec<usize>> = groups.into_values().collect();
        comps.sort_by_key(|c| c[0]);
        comps
    }

    /// Constraints whose topics both lie in `topics`.
    pub fn restricted_to(&self, topics: &[usize]) -> ConstraintSet {
        let keep: HashSet<usize> = topics.iter().copied().collect();
        ConstraintSet {
            topic_count: self.topic_count,
            constraints: self
                .constraints
                .iter()
                .filter(|c| keep.contains(&c.first) && keep.contains(&c.second))
                .copied()
                .collect(),
        }
    }

    pub fn parse(text: &str, space: &TopicSpace) -> Result<Self> {
        let mut set = ConstraintSet::new(space.len());
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let line_no = i + 1;
            let err = |m: String| Error::parse("constraints", line_no, m);
            let (keyword, rest) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| err("expected `includes|excludes|potential <A> <B>`".into()))?;
            let constraint = match keyword {
                "includes" | "excludes" => {
                    let (a, b) = resolve_pair(rest.trim(), space).map_err(err)?;
                    let kind = if keyword == "includes" {
                        ConstraintKind::Includes
                    } else {
                        ConstraintKind::Excludes
                    };
                    Constraint {
                        first: a,
                        second: b,
                        kind,
                    }
                }
                "potential" => {
                    let words: Vec<&str> = rest.split_whitespace().collect();
                    if words.len() < 6 {
                        return Err(err("potential needs two topics and four entries".into()));
                    }
                    let (names, numbers) = words.split_at(words.len() - 4);
                    let v: Vec<f64> = numbers
                        .iter()
                        .map(|s| s.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| err(format!("bad potential entry: {e}")))?;
                    let matrix = PotentialMatrix::new([[v[0], v[1]], [v[2], v[3]]])
                        .map_err(|e| err(e.to_string()))?;
                    let (a, b) = resolve_pair(&names.join(" "), space).map_err(err)?;
                    Constraint {
                        first: a,
                        second: b,
                        kind: ConstraintKind::Custom(matrix),
                    }
                }
                other => return Err(err(format!("unknown constraint kind {other:?}"))),
            };
            set.add(constraint).map_err(|e| err(e.to_string()))?;
        }
        Ok(set)
    }

    pub fn load(path: impl AsRef<Path>, space: &TopicSpace) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, space)
    }
}

fn resolve_pair(rest: &str, space: &TopicSpace) -> std::result::Result<(usize, usize), String> {
    let lookup = |name: &str| {
        space
            .index(name)
            .ok_or_else(|| format!("unknown topic {name:?}"))
    };
    if rest.contains('"') {
        let names = quoted_names(rest)?;
        if names.len() != 2 {
            return Err(format!("expected two topic names, found {}", names.len()));
        }
        return Ok((lookup(&names[0])?, lookup(&names[1])?));
    }
    let words: Vec<&str> = rest.split_whitespace().collect();
    if words.len() < 2 {
        return Err("expected two topic names".into());
    }
    let candidates: Vec<(usize, usize)> = (1..words.len())
        .filter_map(|k| {
            let a = space.index(&words[..k].join(" "))?;
            let b = space.index(&words[k..].join(" "))?;
            Some((a, b))
        })
        .collect();
    match candidates.as_slice() {
        [pair] => Ok(*pair),
        [] if words.len() == 2 => Ok((lookup(words[0])?, lookup(words[1])?)),
        [] => Err(format!("cannot resolve two known topics from {rest:?}")),
        _ => Err(format!("ambiguous topic names in {rest:?}; quote them")),
    }
}

fn quoted_names(s: &str) -> std::result::Result<Vec<String>, String> {
    let mut names = Vec::new();
    let mut chars = s.chars().peekable();
    loop {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        let Some(&c) = chars.peek() else { break };
        let mut name = String::new();
        if c == '"' {
            chars.next();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some(ch) => name.push(ch),
                    None => return Err("unterminated quote".into()),
                }
            }
        } else {
            while let Some(&ch) = chars.peek() {
                if ch.is_whitespace() {
                    break;
                }
                name.push(ch);
                chars.next();
            }
        }
        names.push(name);
    }
    Ok(names)
}
