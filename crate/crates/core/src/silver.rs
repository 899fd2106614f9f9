//! Reference suffix inventories induced from paradigm tables.
//!
//! For each noun or adjective paradigm a root is chosen (the longer of the
//! nominative singular and the common prefix of its repeated forms) and the
//! remainder of every form starting with that root becomes a suffix.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::BOUNDARY;

/// One row of a paradigm table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ParadigmEntry {
    pub lemma: String,
    pub form: String,
    /// Part of speech first, e.g. `["N", "GEN", "SG"]`.
    pub features: Vec<String>,
}

impl ParadigmEntry {
    pub fn pos(&self) -> &str {
        self.features.first().map_or("", String::as_str)
    }
}

/// All entries sharing one lemma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Paradigm {
    pub lemma: String,
    pub entries: Vec<ParadigmEntry>,
}

impl Paradigm {
    pub fn forms(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.form.as_str())
    }
}

/// Groups entries by lemma, ordered by lemma. Entry order within a paradigm
/// follows the input.
pub fn group_by_lemma(entries: impl IntoIterator<Item = ParadigmEntry>) -> Vec<Paradigm> {
    let mut map: BTreeMap<String, Vec<ParadigmEntry>> = BTreeMap::new();
    for e in entries {
        map.entry(e.lemma.clone()).or_default().push(e);
    }
    map.into_iter().map(|(lemma, entries)| Paradigm { lemma, entries }).collect()
}

/// Keeps noun and adjective rows; paradigms left empty are dropped.
pub fn filter_pos(paradigms: Vec<Paradigm>) -> Vec<Paradigm> {
    paradigms
        .into_iter()
        .filter_map(|mut p| {
            p.entries.retain(|e| matches!(e.pos(), "N" | "ADJ"));
            (!p.entries.is_empty()).then_some(p)
        })
        .collect()
}

/// Drops forms that occur only once in the multiset; if that removes
/// everything the input is returned unchanged.
pub fn prune_singletons<'a>(forms: &[&'a str]) -> Vec<&'a str> {
    let mut freq: BTreeMap<&str, usize> = BTreeMap::new();
    for f in forms {
        *freq.entry(f).or_default() += 1;
    }
    let kept: Vec<&str> = forms.iter().copied().filter(|f| freq[f] > 1).collect();
    if kept.is_empty() {
        forms.to_vec()
    } else {
        kept
    }
}

/// Longest common prefix, by characters.
pub fn longest_common_prefix<'a, I>(words: I) -> String
where
    I: IntoIterator<Item = &'a str>,
{
    let mut iter = words.into_iter();
    let Some(first) = iter.next() else { return String::new() };
    let mut prefix: Vec<char> = first.chars().collect();
    for w in iter {
        let common = prefix.iter().zip(w.chars()).take_while(|(a, b)| **a == *b).count();
        prefix.truncate(common);
    }
    prefix.into_iter().collect()
}

/// Root of a paradigm: the longer of the nominative singular and the common
/// prefix of the pruned distinct forms. Ties go to the nominative singular.
pub fn induce_root(forms: &[&str], nominative_singular: &str) -> String {
    let pruned = prune_singletons(forms);
    let distinct: BTreeSet<&str> = pruned.into_iter().collect();
    let lcp = longest_common_prefix(distinct);
    if lcp.chars().count() > nominative_singular.chars().count() {
        lcp
    } else {
        nominative_singular.into()
    }
}

/// `rest$` for every form that is `root + rest` with `rest` non-empty.
pub fn extract_suffixes<'a, I>(forms: I, root: &str) -> BTreeSet<String>
where
    I: IntoIterator<Item = &'a str>,
{
    forms
        .into_iter()
        .filter_map(|f| f.strip_prefix(root))
        .filter(|rest| !rest.is_empty())
        .map(|rest| {
            let mut s = String::from(rest);
            s.push(BOUNDARY);
            s
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SilverDiagnostics {
    pub paradigms_read: usize,
    pub paradigms_used: usize,
    pub entries_used: usize,
    pub suffixes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SilverStandard {
    pub language: String,
    pub suffixes: BTreeSet<String>,
    pub diagnostics: SilverDiagnostics,
}

/// Builds the suffix inventory of one language from its paradigm rows.
pub fn build_silver(language: &str, entries: impl IntoIterator<Item = ParadigmEntry>) -> SilverStandard {
    let paradigms = group_by_lemma(entries);
    let paradigms_read = paradigms.len();
    let paradigms = filter_pos(paradigms);
    let mut suffixes = BTreeSet::new();
    let mut entries_used = 0;
    for p in &paradigms {
        let forms: Vec<&str> = p.forms().collect();
        entries_used += forms.len();
        let root = induce_root(&forms, &p.lemma);
        if root.is_empty() {
            continue;
        }
        suffixes.extend(extract_suffixes(forms.iter().copied(), &root));
    }
    let diagnostics = SilverDiagnostics {
        paradigms_read,
        paradigms_used: paradigms.len(),
        entries_used,
        suffixes: suffixes.len(),
    };
    SilverStandard { language: language.into(), suffixes, diagnostics }
}
