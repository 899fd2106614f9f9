//! Candidate n-grams and the filters that turn them into case markers.
//!
//! Candidates are substrings of `$word$` taken from NP-relevant words (C_1).
//! Counts are over word types: a word contributes at most one to a gram's
//! count no matter how often the gram occurs inside it. The frequency
//! filter keeps grams found in at least `theta` NP-relevant words (C_2);
//! each survivor is then tested against all other survivors with a 2×2
//! exact test, and finally restricted to word endings.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::{ParallelCorpus, VersionId};
use crate::projection::{build_inside_outside, build_parallel_np_set_for, partition_word_types, ParallelNpSet, WordPartition};
use crate::stats::{fisher_exact_two_sided, odds_ratio, ContingencyTable};
use crate::corpus::{Alignment, NpAnnotation};
use crate::{Error, Result, BOUNDARY};

/// All substrings of `$word$` with at least one word character.
pub fn candidates_of_word(word: &str) -> BTreeSet<String> {
    candidates_with_cap(word, None)
}

/// Like [`candidates_of_word`], skipping grams with more than `max_len`
/// word characters.
pub fn candidates_with_cap(word: &str, max_len: Option<usize>) -> BTreeSet<String> {
    let mut wrapped = Vec::with_capacity(word.len() + 2);
    wrapped.push(BOUNDARY);
    wrapped.extend(word.chars());
    wrapped.push(BOUNDARY);
    let len = wrapped.len();
    let mut out = BTreeSet::new();
    for i in 0..len {
        for j in i + 1..=len {
            let core_len = (j - i) - usize::from(i == 0) - usize::from(j == len);
            if core_len == 0 {
                continue;
            }
            if max_len.is_some_and(|cap| core_len > cap) {
                break;
            }
            out.insert(wrapped[i..j].iter().collect());
        }
    }
    out
}

/// I_l(c) and O_l(c).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GramCounts {
    pub inside: u64,
    pub outside: u64,
}

pub type CandidateCounts = BTreeMap<String, GramCounts>;

/// C_1 with per-gram word-type counts over I_l and O_l. Grams that only
/// occur in O_l words are not candidates.
pub fn build_candidate_counts(
    np_relevant: &BTreeSet<String>,
    np_irrelevant: &BTreeSet<String>,
    max_len: Option<usize>,
) -> CandidateCounts {
    let mut counts = CandidateCounts::new();
    for word in np_relevant {
        for gram in candidates_with_cap(word, max_len) {
            counts.entry(gram).or_default().inside += 1;
        }
    }
    for word in np_irrelevant {
        for gram in candidates_with_cap(word, max_len) {
            if let Some(c) = counts.get_mut(&gram) {
                c.outside += 1;
            }
        }
    }
    counts
}

/// C_2: grams found in at least `theta` NP-relevant words.
pub fn frequency_filter(counts: &CandidateCounts, theta: u64) -> BTreeSet<String> {
    counts.iter().filter(|(_, c)| c.inside >= theta).map(|(g, _)| g.clone()).collect()
}

#[derive(Debug, Clone, Copy, Default)]
struct Totals {
    inside: u64,
    outside: u64,
}

impl Totals {
    fn over(c2: &BTreeSet<String>, counts: &CandidateCounts) -> Self {
        c2.iter().filter_map(|g| counts.get(g)).fold(Self::default(), |t, c| Self {
            inside: t.inside + c.inside,
            outside: t.outside + c.outside,
        })
    }

    fn table(&self, own: GramCounts) -> ContingencyTable {
        ContingencyTable::new(own.inside, self.inside - own.inside, own.outside, self.outside - own.outside)
    }
}

/// The candidate's counts against the summed counts of every other gram in
/// C_2. `gram` is expected to be in `c2`.
pub fn contingency_for(gram: &str, c2: &BTreeSet<String>, counts: &CandidateCounts) -> ContingencyTable {
    let own = counts.get(gram).copied().unwrap_or_default();
    let mut totals = Totals::over(c2, counts);
    if !c2.contains(gram) {
        totals.inside += own.inside;
        totals.outside += own.outside;
    }
    totals.table(own)
}

/// A candidate with its counts and, once tested, its exact-test statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateMarker {
    pub gram: String,
    pub inside_count: u64,
    pub outside_count: u64,
    pub p_value: Option<f64>,
    /// `+inf` for grams never seen outside NPs; `None` when undefined (0/0).
    pub odds_ratio: Option<f64>,
}

/// Runs the exact test for every gram in C_2.
pub fn test_candidates(c2: &BTreeSet<String>, counts: &CandidateCounts) -> Vec<CandidateMarker> {
    let totals = Totals::over(c2, counts);
    c2.iter()
        .map(|gram| {
            let own = counts.get(gram).copied().unwrap_or_default();
            let table = totals.table(own);
            CandidateMarker {
                gram: gram.clone(),
                inside_count: own.inside,
                outside_count: own.outside,
                p_value: fisher_exact_two_sided(&table).ok(),
                odds_ratio: odds_ratio(&table).ok(),
            }
        })
        .collect()
}

/// Keeps grams with `p < phi` and `r > chi`.
pub fn inside_outside_filter(c2: &BTreeSet<String>, counts: &CandidateCounts, phi: f64, chi: f64) -> BTreeSet<String> {
    test_candidates(c2, counts)
        .into_iter()
        .filter(|m| passes_p(m, phi) && passes_ratio(m, chi))
        .map(|m| m.gram)
        .collect()
}

fn passes_p(m: &CandidateMarker, phi: f64) -> bool {
    m.p_value.is_some_and(|p| p < phi)
}

fn passes_ratio(m: &CandidateMarker, chi: f64) -> bool {
    m.odds_ratio.is_some_and(|r| r > chi)
}

/// Word-final grams (including whole words).
pub fn suffix_restrict<'a, I>(grams: I) -> BTreeSet<String>
where
    I: IntoIterator<Item = &'a String>,
{
    grams.into_iter().filter(|g| g.ends_with(BOUNDARY)).cloned().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramPosition {
    /// Touches the end of the word (`ibus$`, `$a$`).
    Suffix,
    /// Touches the start only (`$ovi`).
    Prefix,
    /// Touches neither boundary (`ibu`).
    Interior,
}

pub fn gram_position(gram: &str) -> GramPosition {
    if gram.ends_with(BOUNDARY) {
        GramPosition::Suffix
    } else if gram.starts_with(BOUNDARY) {
        GramPosition::Prefix
    } else {
        GramPosition::Interior
    }
}

/// Switches for ablating individual pipeline stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageToggles {
    pub frequency: bool,
    pub p_value: bool,
    pub odds_ratio: bool,
    /// Also admit word-interior grams into the final set.
    pub include_middle: bool,
    /// Also admit word-initial grams into the final set.
    pub include_beginning: bool,
}

impl Default for StageToggles {
    fn default() -> Self {
        Self { frequency: true, p_value: true, odds_ratio: true, include_middle: false, include_beginning: false }
    }
}

/// Which target languages a run covers. An empty allowlist admits all.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LanguageFilter {
    pub allow: BTreeSet<String>,
    pub deny: BTreeSet<String>,
}

impl LanguageFilter {
    pub fn admits(&self, language: &str) -> bool {
        (self.allow.is_empty() || self.allow.contains(language)) && !self.deny.contains(language)
    }
}

/// Lower bound for a rescaled `theta`.
pub const MIN_SCALED_THETA: u64 = 5;

/// |I_l| the default `theta` is taken to correspond to.
pub const REFERENCE_NP_RELEVANT_TYPES: usize = 9_700;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub theta: u64,
    pub phi: f64,
    pub chi: f64,
    pub suffix_only: bool,
    /// Longest gram considered, in word characters. `None` is unbounded.
    pub max_ngram: Option<usize>,
    /// When set, `theta` is rescaled per language by `|I_l| / reference`
    /// (floored at [`MIN_SCALED_THETA`]), for corpora much smaller than the
    /// one `theta` was tuned on.
    pub theta_reference: Option<usize>,
    pub stages: StageToggles,
    pub languages: LanguageFilter,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            theta: 97,
            phi: 0.08,
            chi: 0.34,
            suffix_only: true,
            max_ngram: None,
            theta_reference: None,
            stages: StageToggles::default(),
            languages: LanguageFilter::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.theta < 1 {
            return Err(Error::InvalidConfig("theta must be at least 1".into()));
        }
        if !(self.phi > 0.0 && self.phi < 1.0) {
            return Err(Error::InvalidConfig("phi must lie in (0, 1)".into()));
        }
        if !(self.chi >= 0.0 && self.chi.is_finite()) {
            return Err(Error::InvalidConfig("chi must be a non-negative number".into()));
        }
        if self.theta_reference == Some(0) {
            return Err(Error::InvalidConfig("theta_reference must be positive".into()));
        }
        if self.max_ngram == Some(0) {
            return Err(Error::InvalidConfig("max_ngram must be positive".into()));
        }
        Ok(())
    }

    /// Threshold actually applied: 1 when the frequency filter is ablated.
    pub fn effective_theta(&self) -> u64 {
        if self.stages.frequency {
            self.theta
        } else {
            1
        }
    }

    /// Threshold for a language with `np_relevant` word types in I_l.
    pub fn theta_for(&self, np_relevant: usize) -> u64 {
        match (self.stages.frequency, self.theta_reference) {
            (true, Some(reference)) => {
                let scaled = libm::round(self.theta as f64 * np_relevant as f64 / reference as f64) as u64;
                scaled.max(MIN_SCALED_THETA)
            }
            _ => self.effective_theta(),
        }
    }

    pub fn admits_position(&self, gram: &str) -> bool {
        if !self.suffix_only {
            return true;
        }
        match gram_position(gram) {
            GramPosition::Suffix => true,
            GramPosition::Prefix => self.stages.include_beginning,
            GramPosition::Interior => self.stages.include_middle,
        }
    }

    fn passes_tests(&self, m: &CandidateMarker) -> bool {
        (!self.stages.p_value || passes_p(m, self.phi)) && (!self.stages.odds_ratio || passes_ratio(m, self.chi))
    }
}

/// Set sizes along the way, for run manifests.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExtractionDiagnostics {
    pub np_relevant: usize,
    pub np_irrelevant: usize,
    pub c1: usize,
    pub c2: usize,
    pub passed_tests: usize,
    pub markers: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub config: PipelineConfig,
    pub corpus_fingerprint: u64,
}

/// C_final for one language. Markers are sorted by gram.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkerSet {
    pub language: String,
    pub markers: Vec<CandidateMarker>,
    pub provenance: Provenance,
    pub diagnostics: ExtractionDiagnostics,
}

impl MarkerSet {
    pub fn grams(&self) -> BTreeSet<String> {
        self.markers.iter().map(|m| m.gram.clone()).collect()
    }

    pub fn get(&self, gram: &str) -> Option<&CandidateMarker> {
        self.markers.binary_search_by(|m| m.gram.as_str().cmp(gram)).ok().map(|i| &self.markers[i])
    }
}

/// Candidate generation through position restriction for one partition.
pub fn extract_markers(partition: &WordPartition, config: &PipelineConfig) -> (Vec<CandidateMarker>, ExtractionDiagnostics) {
    let counts = build_candidate_counts(&partition.np_relevant, &partition.np_irrelevant, config.max_ngram);
    let c2 = frequency_filter(&counts, config.theta_for(partition.np_relevant.len()));
    let tested: Vec<CandidateMarker> = test_candidates(&c2, &counts).into_iter().filter(|m| config.passes_tests(m)).collect();
    let passed_tests = tested.len();
    let markers: Vec<CandidateMarker> = tested.into_iter().filter(|m| config.admits_position(&m.gram)).collect();
    let diagnostics = ExtractionDiagnostics {
        np_relevant: partition.np_relevant.len(),
        np_irrelevant: partition.np_irrelevant.len(),
        c1: counts.len(),
        c2: c2.len(),
        passed_tests,
        markers: markers.len(),
    };
    (markers, diagnostics)
}

/// Projection, partition and extraction for a single version of `set`.
pub fn run_language(
    corpus: &ParallelCorpus,
    set: &ParallelNpSet,
    version: &VersionId,
    config: &PipelineConfig,
) -> Result<MarkerSet> {
    let counts = build_inside_outside(corpus, set, version)?;
    let partition = partition_word_types(&counts);
    let (markers, diagnostics) = extract_markers(&partition, config);
    Ok(MarkerSet {
        language: version.language().into(),
        markers,
        provenance: Provenance { config: config.clone(), corpus_fingerprint: corpus.fingerprint() },
        diagnostics,
    })
}

/// Target versions of `set` admitted by the config's language filter, one
/// per language.
pub fn selected_targets<'a>(set: &'a ParallelNpSet, config: &PipelineConfig) -> Result<Vec<&'a VersionId>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for v in &set.targets {
        if !config.languages.admits(v.language()) {
            continue;
        }
        if !seen.insert(v.language()) {
            return Err(Error::DuplicateTargetLanguage(v.language().into()));
        }
        out.push(v);
    }
    Ok(out)
}

/// The whole pipeline, sequentially, for every selected target language.
pub fn run_pipeline(
    corpus: &ParallelCorpus,
    annotations: &[NpAnnotation],
    alignments: &[Alignment],
    config: &PipelineConfig,
) -> Result<BTreeMap<String, MarkerSet>> {
    config.validate()?;
    let set = build_parallel_np_set_for(corpus, annotations, alignments, |l| config.languages.admits(l))?;
    run_on_set(corpus, &set, config)
}

/// [`run_pipeline`] over an already built parallel NP set.
pub fn run_on_set(corpus: &ParallelCorpus, set: &ParallelNpSet, config: &PipelineConfig) -> Result<BTreeMap<String, MarkerSet>> {
    config.validate()?;
    selected_targets(set, config)?
        .into_iter()
        .map(|v| run_language(corpus, set, v, config).map(|m| (m.language.clone(), m)))
        .collect()
}
