//! Verse-parallel corpus, word alignments and NP span annotations.
//!
//! Every structure here is validated on construction and immutable
//! afterwards. Verses outside the shared verse set are dropped as soon as
//! the corpus is built; alignments and annotations are restricted to the
//! shared set when they are attached to a corpus.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::projection::NpSpan;
use crate::{Error, Result, BOUNDARY};

/// Verse key shared by all versions (e.g. `40001001`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VerseId(String);

impl VerseId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(Error::InvalidVerseId(id));
        }
        Ok(Self(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VerseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A language edition, written `<language>-<edition>`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VersionId {
    language: String,
    edition: String,
}

impl VersionId {
    pub fn new(language: impl Into<String>, edition: impl Into<String>) -> Result<Self> {
        let (language, edition) = (language.into(), edition.into());
        let bad = |s: &str| s.is_empty() || s.chars().any(|c| c.is_whitespace() || c == ':');
        if bad(&language) || language.contains('-') || bad(&edition) {
            return Err(Error::InvalidVersionId(format!("{language}-{edition}")));
        }
        Ok(Self { language, edition })
    }

    /// Splits at the first `-`: `lat-vulgate-1` is language `lat`, edition
    /// `vulgate-1`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.split_once('-') {
            Some((language, edition)) => Self::new(language, edition),
            None => Err(Error::InvalidVersionId(s.to_string())),
        }
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn edition(&self) -> &str {
        &self.edition
    }
}

impl fmt::Display for VersionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.language, self.edition)
    }
}

/// A tokenized verse. Tokens are non-empty and contain neither whitespace
/// nor the boundary sentinel.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Verse {
    tokens: Vec<String>,
}

impl Verse {
    pub fn new<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        for token in &tokens {
            check_token(token)?;
        }
        Ok(Self { tokens })
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

fn check_token(token: &str) -> Result<()> {
    let reason = if token.is_empty() {
        "empty token"
    } else if token.contains(BOUNDARY) {
        "contains the reserved boundary character `$`"
    } else if token.chars().any(char::is_whitespace) {
        "contains whitespace"
    } else {
        return Ok(());
    };
    Err(Error::InvalidToken { token: token.to_string(), reason })
}

pub type VerseMap = BTreeMap<VerseId, Verse>;

/// Versions restricted to the verses all of them share.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelCorpus {
    versions: BTreeMap<VersionId, VerseMap>,
    shared: BTreeSet<VerseId>,
}

impl ParallelCorpus {
    /// Intersects the verse sets of all versions (and the allowlist, if
    /// given) and drops everything outside the intersection.
    pub fn from_versions<I>(versions: I, allowlist: Option<&BTreeSet<VerseId>>) -> Result<Self>
    where
        I: IntoIterator<Item = (VersionId, VerseMap)>,
    {
        let mut map = BTreeMap::new();
        for (id, verses) in versions {
            if map.contains_key(&id) {
                return Err(Error::DuplicateVersion(id.to_string()));
            }
            map.insert(id, verses);
        }
        if map.len() < 2 {
            return Err(Error::TooFewVersions(map.len()));
        }

        let mut iter = map.values();
        let first = iter.next().expect("at least two versions");
        let mut shared: BTreeSet<VerseId> = match allowlist {
            Some(allow) => first.keys().filter(|v| allow.contains(*v)).cloned().collect(),
            None => first.keys().cloned().collect(),
        };
        for verses in iter {
            shared.retain(|v| verses.contains_key(v));
        }
        if shared.is_empty() {
            return Err(Error::NoSharedVerses);
        }
        for verses in map.values_mut() {
            verses.retain(|v, _| shared.contains(v));
        }
        Ok(Self { versions: map, shared })
    }

    pub fn shared_verses(&self) -> &BTreeSet<VerseId> {
        &self.shared
    }

    pub fn version_ids(&self) -> impl Iterator<Item = &VersionId> {
        self.versions.keys()
    }

    pub fn contains_version(&self, version: &VersionId) -> bool {
        self.versions.contains_key(version)
    }

    pub fn version(&self, version: &VersionId) -> Option<&VerseMap> {
        self.versions.get(version)
    }

    pub fn verse(&self, version: &VersionId, verse: &VerseId) -> Option<&Verse> {
        self.versions.get(version)?.get(verse)
    }

    pub fn total_tokens(&self, version: &VersionId) -> usize {
        self.versions.get(version).map_or(0, |v| v.values().map(Verse::len).sum())
    }

    /// FNV-1a over version ids, verse ids and tokens, in sorted order.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv1a::default();
        for (id, verses) in &self.versions {
            h.write(id.to_string().as_bytes());
            h.write(&[0xff]);
            for (vid, verse) in verses {
                h.write(vid.as_str().as_bytes());
                for t in verse.tokens() {
                    h.write(&[0x1f]);
                    h.write(t.as_bytes());
                }
                h.write(&[0x1e]);
            }
        }
        h.0
    }
}

struct Fnv1a(u64);

impl Default for Fnv1a {
    fn default() -> Self {
        Self(0xcbf2_9ce4_8422_2325)
    }
}

impl Fnv1a {
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
}

/// Token-level links from a source version to a target version, per verse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    source: VersionId,
    target: VersionId,
    links: BTreeMap<VerseId, BTreeSet<(usize, usize)>>,
}

impl Alignment {
    /// Bounds-checks `raw` against `corpus`. Verses not shared by the corpus
    /// are ignored; shared verses missing from `raw` get no links.
    pub fn new<I>(source: VersionId, target: VersionId, raw: I, corpus: &ParallelCorpus) -> Result<Self>
    where
        I: IntoIterator<Item = (VerseId, Vec<(usize, usize)>)>,
    {
        let src = corpus.version(&source).ok_or_else(|| Error::UnknownVersion(source.to_string()))?;
        let tgt = corpus.version(&target).ok_or_else(|| Error::UnknownVersion(target.to_string()))?;
        let mut links: BTreeMap<VerseId, BTreeSet<(usize, usize)>> =
            corpus.shared_verses().iter().map(|v| (v.clone(), BTreeSet::new())).collect();
        for (verse, pairs) in raw {
            let Some(set) = links.get_mut(&verse) else { continue };
            let (source_len, target_len) = (src[&verse].len(), tgt[&verse].len());
            for (s, t) in pairs {
                if s >= source_len || t >= target_len {
                    return Err(Error::LinkOutOfBounds {
                        verse: verse.to_string(),
                        source_index: s,
                        target_index: t,
                        source_len,
                        target_len,
                    });
                }
                set.insert((s, t));
            }
        }
        Ok(Self { source, target, links })
    }

    pub fn source(&self) -> &VersionId {
        &self.source
    }

    pub fn target(&self) -> &VersionId {
        &self.target
    }

    pub fn links(&self, verse: &VerseId) -> Option<&BTreeSet<(usize, usize)>> {
        self.links.get(verse)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VerseId, &BTreeSet<(usize, usize)>)> {
        self.links.iter()
    }
}

/// NP spans marked in one version, per verse, in left-to-right order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NpAnnotation {
    version: VersionId,
    spans: BTreeMap<VerseId, Vec<NpSpan>>,
}

impl NpAnnotation {
    /// `raw` holds half-open `(start, end)` token ranges. Spans must be
    /// non-empty, in bounds and pairwise disjoint within a verse.
    pub fn new<I>(version: VersionId, raw: I, corpus: &ParallelCorpus) -> Result<Self>
    where
        I: IntoIterator<Item = (VerseId, Vec<(usize, usize)>)>,
    {
        let verses = corpus.version(&version).ok_or_else(|| Error::UnknownVersion(version.to_string()))?;
        let mut spans: BTreeMap<VerseId, Vec<NpSpan>> = BTreeMap::new();
        for (verse_id, mut ranges) in raw {
            let Some(verse) = verses.get(&verse_id) else { continue };
            let name = || verse_id.to_string();
            for &(start, end) in &ranges {
                if start >= end {
                    return Err(Error::EmptySpan { verse: name(), start, end });
                }
                if end > verse.len() {
                    return Err(Error::SpanOutOfBounds { verse: name(), start, end, len: verse.len() });
                }
            }
            ranges.sort_unstable();
            for pair in ranges.windows(2) {
                if pair[1].0 < pair[0].1 {
                    return Err(Error::OverlappingSpans { verse: name(), first: pair[0], second: pair[1] });
                }
            }
            let entry = spans.entry(verse_id.clone()).or_default();
            if !entry.is_empty() {
                // the same verse listed twice; re-check against what we have
                let mut all: Vec<(usize, usize)> =
                    entry.iter().map(|s| (s.first(), s.last() + 1)).chain(ranges.iter().copied()).collect();
                all.sort_unstable();
                for pair in all.windows(2) {
                    if pair[1].0 < pair[0].1 {
                        return Err(Error::OverlappingSpans { verse: name(), first: pair[0], second: pair[1] });
                    }
                }
            }
            entry.extend(ranges.into_iter().map(|(s, e)| NpSpan::from_range(verse_id.clone(), s, e)));
            entry.sort_by_key(NpSpan::first);
        }
        Ok(Self { version, spans })
    }

    pub fn version(&self) -> &VersionId {
        &self.version
    }

    pub fn spans(&self, verse: &VerseId) -> &[NpSpan] {
        self.spans.get(verse).map_or(&[], Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VerseId, &[NpSpan])> {
        self.spans.iter().map(|(v, s)| (v, s.as_slice()))
    }

    pub fn span_count(&self) -> usize {
        self.spans.values().map(Vec::len).sum()
    }
}
