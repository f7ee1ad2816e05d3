//! Seeded synthetic corpora with planted topic signal in post text, links
//! and author bios, used by the end-to-end tests and the `synth` command.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraints::ConstraintSet;
use crate::corpus::{Author, Corpus, Document, Hyperlink};
use crate::error::Result;
use crate::rules::RuleSet;
use crate::topics::TopicSpace;

struct TopicDef {
    name: &'static str,
    parent: Option<&'static str>,
    keywords: &'static [&'static str],
    words: &'static [&'static str],
}

const TOPICS: &[TopicDef] = &[
    TopicDef {
        name: "Sports",
        parent: None,
        keywords: &["sports", "#sports"],
        words: &["team", "league", "season", "coach", "stadium", "fans"],
    },
    TopicDef {
        name: "Cricket",
        parent: Some("Sports"),
        keywords: &["cricket", "wicket", "#cricket"],
        words: &["bowler", "innings", "batsman", "umpire", "spinner", "boundary"],
    },
    TopicDef {
        name: "Basketball",
        parent: Some("Sports"),
        keywords: &["basketball", "slam dunk", "#nba"],
        words: &["rebound", "layup", "hoop", "dribble", "playoffs", "guard"],
    },
    TopicDef {
        name: "Music",
        parent: None,
        keywords: &["music", "#music"],
        words: &["album", "song", "concert", "chorus", "playlist", "lyrics"],
    },
    TopicDef {
        name: "Jazz",
        parent: Some("Music"),
        keywords: &["jazz", "bebop", "#jazz"],
        words: &["saxophone", "trumpet", "swing", "improvisation", "quartet", "bassline"],
    },
    TopicDef {
        name: "Science",
        parent: None,
        keywords: &["science", "#science"],
        words: &["experiment", "research", "hypothesis", "laboratory", "physics", "data"],
    },
    TopicDef {
        name: "Astronomy",
        parent: Some("Science"),
        keywords: &["astronomy", "telescope", "#space"],
        words: &["galaxy", "nebula", "orbit", "comet", "planet", "eclipse"],
    },
    TopicDef {
        name: "Cooking",
        parent: None,
        keywords: &["cooking", "recipe", "#foodie"],
        words: &["garlic", "oven", "simmer", "skillet", "flavor", "dough"],
    },
    TopicDef {
        name: "Painting",
        parent: None,
        keywords: &["painting", "watercolor", "#art"],
        words: &["canvas", "brush", "palette", "acrylic", "sketch", "portrait"],
    },
    TopicDef {
        name: "Gardening",
        parent: None,
        keywords: &["gardening", "#garden"],
        words: &["seedlings", "compost", "tomatoes", "soil", "pruning", "blooms"],
    },
];

const EXCLUSIONS: &[(&str, &str)] = &[("Cricket", "Basketball")];

const FILLER: &[&str] = &[
    "today", "really", "just", "think", "good", "time", "people", "going", "love", "day",
    "new", "see", "know", "great", "still", "back", "much", "right", "way", "week", "honestly",
    "morning", "tonight", "weekend", "friends", "coffee", "finally", "maybe", "thanks", "lol",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub documents: usize,
    pub authors: usize,
    /// Share of posts with no topic at all.
    pub chatter_fraction: f64,
    /// Share of topical posts carrying one of their topic's rule keywords.
    pub keyword_rate: f64,
    /// Share of topical posts whose content words come from a random topic.
    pub text_noise: f64,
    /// Share of an author's topical posts on the author's home topic.
    pub home_rate: f64,
    /// Share of authors whose bio names words of their home topic.
    pub bio_rate: f64,
    /// Share of chatter posts carrying a link or photo from the author's
    /// home topic.
    pub chatter_cue_rate: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            documents: 2000,
            authors: 100,
            chatter_fraction: 0.3,
            keyword_rate: 0.7,
            text_noise: 0.5,
            home_rate: 0.95,
            bio_rate: 1.0,
            chatter_cue_rate: 0.5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub space: TopicSpace,
    /// Rules file contents.
    pub rules: String,
    /// Constraints file contents.
    pub constraints: String,
    /// Documents with gold labels; chatter posts carry an empty gold set.
    pub corpus: Corpus,
}

impl SyntheticData {
    pub fn rule_set(&self) -> Result<RuleSet> {
        RuleSet::parse(&self.rules, &self.space)
    }

    pub fn constraint_set(&self) -> Result<ConstraintSet> {
        ConstraintSet::parse(&self.constraints, &self.space)
    }
}

fn rules_text() -> String {
    let mut out = String::new();
    for t in TOPICS {
        let mut kws: Vec<&str> = t.keywords.to_vec();
        for child in TOPICS.iter().filter(|c| c.parent == Some(t.name)) {
            kws.extend_from_slice(child.keywords);
        }
        out.push_str(&format!("{}: {}\n", t.name, kws.join(", ")));
    }
    out
}

fn constraints_text() -> String {
    let mut out = String::new();
    for t in TOPICS {
        if let Some(p) = t.parent {
            out.push_str(&format!("includes {p} {}\n", t.name));
        }
    }
    for (a, b) in EXCLUSIONS {
        out.push_str(&format!("excludes {a} {b}\n"));
    }
    out
}

fn pick<'a, R: Rng>(rng: &mut R, words: &[&'a str]) -> &'a str {
    words.choose(rng).copied().expect("non-empty word list")
}

pub fn generate(config: &SynthConfig) -> Result<SyntheticData> {
    let space = TopicSpace::new(TOPICS.iter().map(|t| t.name))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let authors: Vec<(Author, usize)> = (0..config.authors.max(1))
        .map(|i| {
            let home = rng.gen_range(0..TOPICS.len());
            let bio = if rng.gen_bool(config.bio_rate) {
                let def = &TOPICS[home];
                format!(
                    "{} and {} enthusiast, {} {}",
                    pick(&mut rng, def.words),
                    pick(&mut rng, def.words),
                    pick(&mut rng, FILLER),
                    pick(&mut rng, FILLER)
                )
            } else {
                format!("{} {} person", pick(&mut rng, FILLER), pick(&mut rng, FILLER))
            };
            let author = Author {
                id: format!("a{i:04}"),
                name: format!("user {i}"),
                bio,
            };
            (author, home)
        })
        .collect();

    let mut documents = Vec::with_capacity(config.documents);
    for i in 0..config.documents {
        let (author, home) = &authors[rng.gen_range(0..authors.len())];
        let mut words: Vec<String> = (0..rng.gen_range(6..12))
            .map(|_| pick(&mut rng, FILLER).to_string())
            .collect();
        let mut doc = Document {
            id: format!("d{i:05}"),
            author: author.clone(),
            ..Default::default()
        };
        if rng.gen_bool(config.chatter_fraction) {
            if rng.gen_bool(config.chatter_cue_rate) {
                let def = &TOPICS[*home];
                if rng.gen_bool(0.5) {
                    doc.media_annotations
                        .push(format!("photo of a {}", pick(&mut rng, def.words)));
                } else {
                    doc.hyperlinks.push(Hyperlink {
                        url: format!("https://example.org/{i}"),
                        title: String::new(),
                        description: format!("all about the {}", pick(&mut rng, def.words)),
                    });
                }
            }
            doc.gold_labels = Some(BTreeSet::new());
        } else {
            let topic = if rng.gen_bool(config.home_rate) {
                *home
            } else {
                rng.gen_range(0..TOPICS.len())
            };
            let def = &TOPICS[topic];
            let source = if rng.gen_bool(config.text_noise) {
                &TOPICS[rng.gen_range(0..TOPICS.len())]
            } else {
                def
            };
            for _ in 0..2 {
                let at = rng.gen_range(0..=words.len());
                words.insert(at, pick(&mut rng, source.words).to_string());
            }
            if rng.gen_bool(config.keyword_rate) {
                let at = rng.gen_range(0..=words.len());
                words.insert(at, pick(&mut rng, def.keywords).to_string());
            }
            if rng.gen_bool(0.3) {
                doc.hyperlinks.push(Hyperlink {
                    url: format!("https://example.org/{i}"),
                    title: String::new(),
                    description: format!(
                        "all about the {} and the {}",
                        pick(&mut rng, def.words),
                        pick(&mut rng, def.words)
                    ),
                });
            }
            if rng.gen_bool(0.2) {
                doc.media_annotations
                    .push(format!("photo of a {}", pick(&mut rng, def.words)));
            }
            let mut gold = BTreeSet::from([def.name.to_string()]);
            if let Some(p) = def.parent {
                gold.insert(p.to_string());
            }
            doc.gold_labels = Some(gold);
        }
        if rng.gen_bool(0.1) {
            words.push(format!("https://t.co/{i}"));
        }
        doc.text = words.join(" ");
        documents.push(doc);
    }

    Ok(SyntheticData {
        space,
        rules: rules_text(),
        constraints: constraints_text(),
        corpus: Corpus::new(documents, format!("synthetic:{}", config.seed))?,
    })
}
