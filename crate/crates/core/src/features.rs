//! Builds the two encoder input strings for a document: the content input
//! (post text plus link, media and entity cues) and the author input.

use serde::{Deserialize, Serialize};

use crate::corpus::Document;

pub const LINK_TOKEN: &str = "[LINK]";
pub const MEDIA_TOKEN: &str = "[MEDIA]";
pub const ENTITY_TOKEN: &str = "[ENTITY]";
pub const BIO_TOKEN: &str = "[BIO]";

/// Characters of a link description kept before case-folding.
pub const DESCRIPTION_CHARS: usize = 100;

/// Which document fields feed the encoders. Post text is always used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureToggles {
    pub links: bool,
    pub media: bool,
    pub entities: bool,
    pub author: bool,
}

impl Default for FeatureToggles {
    fn default() -> Self {
        Self::all()
    }
}

impl FeatureToggles {
    pub const fn all() -> Self {
        Self {
            links: true,
            media: true,
            entities: true,
            author: true,
        }
    }

    pub const fn text_only() -> Self {
        Self {
            links: false,
            media: false,
            entities: false,
            author: false,
        }
    }

    pub(crate) fn bits(self) -> u8 {
        self.links as u8
            | (self.media as u8) << 1
            | (self.entities as u8) << 2
            | (self.author as u8) << 3
    }

    pub(crate) fn from_bits(bits: u8) -> Self {
        Self {
            links: bits & 1 != 0,
            media: bits & 2 != 0,
            entities: bits & 4 != 0,
            author: bits & 8 != 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssembledInputs {
    pub content_input: String,
    pub author_input: String,
}

fn fold(s: &str) -> String {
    s.to_lowercase()
}

fn is_url(token: &str) -> bool {
    token.starts_with("http://") || token.starts_with("https://")
}

/// Case-folds, drops URL and `@mention` tokens and collapses whitespace.
pub fn preprocess_text(raw: &str) -> String {
    let folded = fold(raw);
    let mut out = String::with_capacity(folded.len());
    for token in folded.split_whitespace() {
        if is_url(token) || token.starts_with('@') {
            continue;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(token);
    }
    out
}

fn truncate_chars(s: &str, n: usize) -> &str {
    match s.char_indices().nth(n) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

/// Content encoder input. Segments follow the text in a fixed order: links,
/// then media annotations, then entity descriptions, each in document order.
pub fn assemble_content_input(doc: &Document, toggles: FeatureToggles) -> String {
    let mut out = preprocess_text(&doc.text);
    if toggles.links {
        for link in &doc.hyperlinks {
            out.push(' ');
            out.push_str(LINK_TOKEN);
            out.push(' ');
            out.push_str(&fold(&link.title));
            out.push(' ');
            out.push_str(&fold(truncate_chars(&link.description, DESCRIPTION_CHARS)));
        }
    }
    if toggles.media {
        for annotation in &doc.media_annotations {
            out.push(' ');
            out.push_str(MEDIA_TOKEN);
            out.push(' ');
            out.push_str(&fold(annotation));
        }
    }
    if toggles.entities {
        for description in &doc.entity_descriptions {
            out.push(' ');
            out.push_str(ENTITY_TOKEN);
            out.push(' ');
            out.push_str(&fold(description));
        }
    }
    out
}

/// Author encoder input: `name [BIO] bio`, omitting the separator when either
/// part is empty.
pub fn assemble_author_input(doc: &Document) -> String {
    let name = fold(doc.author.name.trim());
    let bio = fold(doc.author.bio.trim());
    match (name.is_empty(), bio.is_empty()) {
        (true, true) => String::new(),
        (false, true) => name,
        (true, false) => format!("{BIO_TOKEN} {bio}"),
        (false, false) => format!("{name} {BIO_TOKEN} {bio}"),
    }
}

pub fn assemble(doc: &Document, toggles: FeatureToggles) -> AssembledInputs {
    AssembledInputs {
        content_input: assemble_content_input(doc, toggles),
        author_input: if toggles.author {
            assemble_author_input(doc)
        } else {
            String::new()
        },
    }
}
