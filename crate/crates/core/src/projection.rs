//! NP projection through word alignments and inside/outside word statistics.
//!
//! Each annotated English edition is its own "copy" of the corpus: its NP
//! spans are projected into every target version separately, and a target
//! token is counted once per copy, either inside or outside an NP.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::{Alignment, NpAnnotation, ParallelCorpus, VerseId, VersionId};
use crate::{Error, Result};

/// Token positions of one NP in one verse, strictly increasing. Projected
/// spans may have gaps.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NpSpan {
    verse: VerseId,
    indices: Vec<usize>,
}

impl NpSpan {
    /// Sorts and deduplicates `indices`; `None` when there are none.
    pub fn new(verse: VerseId, indices: impl IntoIterator<Item = usize>) -> Option<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        indices.sort_unstable();
        indices.dedup();
        (!indices.is_empty()).then_some(Self { verse, indices })
    }

    pub(crate) fn from_range(verse: VerseId, start: usize, end: usize) -> Self {
        debug_assert!(start < end);
        Self { verse, indices: (start..end).collect() }
    }

    pub fn verse(&self) -> &VerseId {
        &self.verse
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn first(&self) -> usize {
        self.indices[0]
    }

    pub fn last(&self) -> usize {
        self.indices[self.indices.len() - 1]
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Surface tokens of the span in `version`, space-joined.
    pub fn surface(&self, corpus: &ParallelCorpus, version: &VersionId) -> Option<String> {
        let verse = corpus.verse(version, &self.verse)?;
        let words: Option<Vec<&str>> = self.indices.iter().map(|&i| verse.tokens().get(i).map(String::as_str)).collect();
        Some(words?.join(" "))
    }
}

/// Follows every link out of `span`'s tokens; target positions come back in
/// target word order. `None` when no source token is aligned.
pub fn project_span(span: &NpSpan, alignment: &Alignment) -> Option<NpSpan> {
    let links = alignment.links(span.verse())?;
    let targets = span.indices().iter().flat_map(|&s| links.range((s, 0)..=(s, usize::MAX)).map(|&(_, t)| t));
    NpSpan::new(span.verse().clone(), targets)
}

/// One English NP with its realized translations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelNp {
    pub source_version: VersionId,
    pub source_span: NpSpan,
    pub projections: BTreeMap<VersionId, NpSpan>,
}

impl ParallelNp {
    pub fn verse(&self) -> &VerseId {
        self.source_span.verse()
    }

    /// `<version>:<verse>:<i,j,...>`, unique within a [`ParallelNpSet`].
    pub fn id(&self) -> String {
        let idx: Vec<String> = self.source_span.indices().iter().map(ToString::to_string).collect();
        format!("{}:{}:{}", self.source_version, self.verse(), idx.join(","))
    }

    /// The span realizing this NP in `language`: the source span itself for
    /// the source language, otherwise the projection into that language.
    pub fn span_in_language(&self, language: &str) -> Option<(&VersionId, &NpSpan)> {
        if self.source_version.language() == language {
            return Some((&self.source_version, &self.source_span));
        }
        self.projections.iter().find(|(v, _)| v.language() == language)
    }
}

/// The parallel NP set together with the versions it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelNpSet {
    pub sources: Vec<VersionId>,
    pub targets: Vec<VersionId>,
    pub nps: Vec<ParallelNp>,
}

/// Projects every annotated NP of every source edition into every target
/// version. Targets are all corpus versions whose language is not a source
/// language; each (source, target) pair needs exactly one alignment.
pub fn build_parallel_np_set(
    corpus: &ParallelCorpus,
    annotations: &[NpAnnotation],
    alignments: &[Alignment],
) -> Result<ParallelNpSet> {
    build_parallel_np_set_for(corpus, annotations, alignments, |_| true)
}

/// [`build_parallel_np_set`] restricted to target languages accepted by
/// `admit`; alignments are only required for those.
pub fn build_parallel_np_set_for(
    corpus: &ParallelCorpus,
    annotations: &[NpAnnotation],
    alignments: &[Alignment],
    admit: impl Fn(&str) -> bool,
) -> Result<ParallelNpSet> {
    let mut by_source: BTreeMap<&VersionId, &NpAnnotation> = BTreeMap::new();
    for ann in annotations {
        if by_source.insert(ann.version(), ann).is_some() {
            return Err(Error::DuplicateAnnotation(ann.version().to_string()));
        }
    }
    let source_languages: BTreeSet<&str> = by_source.keys().map(|v| v.language()).collect();
    let targets: Vec<VersionId> =
        corpus.version_ids().filter(|v| !source_languages.contains(v.language()) && admit(v.language())).cloned().collect();

    let mut by_pair: BTreeMap<(&VersionId, &VersionId), &Alignment> = BTreeMap::new();
    for al in alignments {
        if by_pair.insert((al.source(), al.target()), al).is_some() {
            return Err(Error::DuplicateAlignment { from: al.source().to_string(), to: al.target().to_string() });
        }
    }

    let mut nps = Vec::new();
    for (&source, ann) in &by_source {
        let mut routes = Vec::with_capacity(targets.len());
        for target in &targets {
            let al = by_pair.get(&(source, target)).ok_or_else(|| Error::MissingAlignment {
                from: source.to_string(),
                to: target.to_string(),
            })?;
            routes.push((target, *al));
        }
        for (_, spans) in ann.iter() {
            for span in spans {
                let projections = routes
                    .iter()
                    .filter_map(|(target, al)| project_span(span, al).map(|p| ((*target).clone(), p)))
                    .collect();
                nps.push(ParallelNp { source_version: source.clone(), source_span: span.clone(), projections });
            }
        }
    }
    Ok(ParallelNpSet { sources: by_source.into_keys().cloned().collect(), targets, nps })
}

/// W_inside and W_outside for one language, as word-type counts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InsideOutsideCounts {
    pub language: String,
    pub inside: BTreeMap<String, u64>,
    pub outside: BTreeMap<String, u64>,
}

impl InsideOutsideCounts {
    pub fn new(language: impl Into<String>) -> Self {
        Self { language: language.into(), ..Self::default() }
    }

    pub fn inside_count(&self, word: &str) -> u64 {
        self.inside.get(word).copied().unwrap_or(0)
    }

    pub fn outside_count(&self, word: &str) -> u64 {
        self.outside.get(word).copied().unwrap_or(0)
    }

    pub fn total_inside(&self) -> u64 {
        self.inside.values().sum()
    }

    pub fn total_outside(&self) -> u64 {
        self.outside.values().sum()
    }

    /// Multiset sum.
    pub fn merge(&mut self, other: &Self) {
        for (w, n) in &other.inside {
            *self.inside.entry(w.clone()).or_default() += n;
        }
        for (w, n) in &other.outside {
            *self.outside.entry(w.clone()).or_default() += n;
        }
    }

    fn count_copy<'a>(&mut self, corpus: &ParallelCorpus, version: &VersionId, spans: impl Iterator<Item = &'a NpSpan>) {
        let mut marked: BTreeMap<&VerseId, BTreeSet<usize>> = BTreeMap::new();
        for span in spans {
            marked.entry(span.verse()).or_default().extend(span.indices().iter().copied());
        }
        let Some(verses) = corpus.version(version) else { return };
        let empty = BTreeSet::new();
        for (vid, verse) in verses {
            let inside = marked.get(vid).unwrap_or(&empty);
            for (i, token) in verse.tokens().iter().enumerate() {
                let bucket = if inside.contains(&i) { &mut self.inside } else { &mut self.outside };
                *bucket.entry(token.clone()).or_default() += 1;
            }
        }
    }
}

/// Inside/outside counts for `version`, accumulated over all copies.
///
/// A target version is counted once per source edition. A source edition is
/// counted once, against its own annotation.
pub fn build_inside_outside(
    corpus: &ParallelCorpus,
    set: &ParallelNpSet,
    version: &VersionId,
) -> Result<InsideOutsideCounts> {
    let mut counts = InsideOutsideCounts::new(version.language());
    if set.sources.contains(version) {
        let spans = set.nps.iter().filter(|np| &np.source_version == version).map(|np| &np.source_span);
        counts.count_copy(corpus, version, spans);
    } else if set.targets.contains(version) {
        for source in &set.sources {
            let spans = set
                .nps
                .iter()
                .filter(|np| &np.source_version == source)
                .filter_map(|np| np.projections.get(version));
            counts.count_copy(corpus, version, spans);
        }
    } else {
        return Err(Error::UnknownVersion(version.to_string()));
    }
    Ok(counts)
}

/// Counts from an annotation made directly on the version (a native chunker),
/// with no projection involved.
pub fn inside_outside_from_annotation(corpus: &ParallelCorpus, annotation: &NpAnnotation) -> InsideOutsideCounts {
    let mut counts = InsideOutsideCounts::new(annotation.version().language());
    let spans = annotation.iter().flat_map(|(_, spans)| spans.iter());
    counts.count_copy(corpus, annotation.version(), spans);
    counts
}

/// I_l and O_l.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WordPartition {
    pub language: String,
    pub np_relevant: BTreeSet<String>,
    pub np_irrelevant: BTreeSet<String>,
}

/// A word type is NP-relevant iff it occurs strictly more often inside NPs
/// than outside; ties are NP-irrelevant.
pub fn partition_word_types(counts: &InsideOutsideCounts) -> WordPartition {
    let mut part = WordPartition { language: counts.language.clone(), ..WordPartition::default() };
    let words: BTreeSet<&String> = counts.inside.keys().chain(counts.outside.keys()).collect();
    for w in words {
        let (inside, outside) = (counts.inside_count(w), counts.outside_count(w));
        if inside + outside == 0 {
            continue;
        }
        if inside > outside {
            part.np_relevant.insert(w.clone());
        } else {
            part.np_irrelevant.insert(w.clone());
        }
    }
    part
}
