//! Grouping parallel NPs by cross-lingual marker combinations, and the
//! NP-word cooccurrence matrix.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::ParallelCorpus;
use crate::projection::{ParallelNp, ParallelNpSet};
use crate::BOUNDARY;

/// Longest gram in `markers` that is a suffix of `word$`.
pub fn assign_marker<'a, I>(word: &str, markers: I) -> Option<&'a str>
where
    I: IntoIterator<Item = &'a String>,
{
    let closed = format!("{word}{BOUNDARY}");
    markers
        .into_iter()
        .filter(|m| m.ends_with(BOUNDARY) && closed.ends_with(m.as_str()))
        .max_by(|a, b| a.chars().count().cmp(&b.chars().count()).then_with(|| b.cmp(a)))
        .map(String::as_str)
}

/// Which token of a span is inspected for its marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeadPolicy {
    #[default]
    Last,
    First,
}

impl HeadPolicy {
    fn pick(self, indices: &[usize]) -> usize {
        match self {
            Self::Last => indices[indices.len() - 1],
            Self::First => indices[0],
        }
    }
}

/// The head word of `np` in `language`, if the NP is realized there.
pub fn head_word<'c>(corpus: &'c ParallelCorpus, np: &ParallelNp, language: &str, policy: HeadPolicy) -> Option<&'c str> {
    let (version, span) = np.span_in_language(language)?;
    let verse = corpus.verse(version, span.verse())?;
    verse.tokens().get(policy.pick(span.indices())).map(String::as_str)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkerCombinationGroup {
    /// One entry per requested language, in request order.
    pub key: Vec<(String, Option<String>)>,
    /// Indices into [`ParallelNpSet::nps`], ascending.
    pub members: Vec<usize>,
}

/// Partitions the NPs of `set` by their per-language head markers. A
/// language without a projection, or whose head carries no marker, gets
/// `None`. Groups come largest first, ties broken by key.
pub fn group_by_marker_combination(
    corpus: &ParallelCorpus,
    set: &ParallelNpSet,
    markers: &BTreeMap<String, BTreeSet<String>>,
    languages: &[String],
    policy: HeadPolicy,
) -> Vec<MarkerCombinationGroup> {
    let empty = BTreeSet::new();
    let mut groups: BTreeMap<Vec<(String, Option<String>)>, Vec<usize>> = BTreeMap::new();
    for (i, np) in set.nps.iter().enumerate() {
        let key = languages
            .iter()
            .map(|lang| {
                let marker = head_word(corpus, np, lang, policy)
                    .and_then(|w| assign_marker(w, markers.get(lang).unwrap_or(&empty)))
                    .map(String::from);
                (lang.clone(), marker)
            })
            .collect();
        groups.entry(key).or_default().push(i);
    }
    let mut out: Vec<MarkerCombinationGroup> =
        groups.into_iter().map(|(key, members)| MarkerCombinationGroup { key, members }).collect();
    // stable sort keeps key order among equal sizes
    out.sort_by_key(|g| core::cmp::Reverse(g.members.len()));
    out
}

/// Sparse word-by-NP matrix. Each cell is 1: a word form either occurs in
/// an NP's span in its language or it does not.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CooccurrenceMatrix {
    /// `(language, form)`, sorted by `language:form`.
    pub rows: Vec<(String, String)>,
    /// `(np id, source surface)`, sorted by id.
    pub cols: Vec<(String, String)>,
    /// `(row, col, count)`, sorted by row then column.
    pub cells: Vec<(usize, usize, u64)>,
}

impl CooccurrenceMatrix {
    pub fn row_sums(&self) -> Vec<u64> {
        let mut sums = alloc::vec![0; self.rows.len()];
        for &(r, _, c) in &self.cells {
            sums[r] += c;
        }
        sums
    }
}

pub fn build_cooccurrence_matrix(corpus: &ParallelCorpus, set: &ParallelNpSet, languages: &[String]) -> CooccurrenceMatrix {
    let mut cols: Vec<(String, String, usize)> = set
        .nps
        .iter()
        .enumerate()
        .map(|(i, np)| (np.id(), np.source_span.surface(corpus, &np.source_version).unwrap_or_default(), i))
        .collect();
    cols.sort();

    let mut entries: BTreeSet<(String, usize)> = BTreeSet::new();
    for (col, (_, _, np_index)) in cols.iter().enumerate() {
        let np = &set.nps[*np_index];
        for lang in languages {
            let Some((version, span)) = np.span_in_language(lang) else { continue };
            let Some(verse) = corpus.verse(version, span.verse()) else { continue };
            for &i in span.indices() {
                if let Some(tok) = verse.tokens().get(i) {
                    entries.insert((format!("{lang}:{tok}"), col));
                }
            }
        }
    }

    let labels: BTreeSet<&String> = entries.iter().map(|(label, _)| label).collect();
    let row_of: BTreeMap<&String, usize> = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
    let cells = entries.iter().map(|(label, col)| (row_of[label], *col, 1)).collect();
    let rows = labels
        .iter()
        .map(|l| {
            let (lang, form) = l.split_once(':').unwrap_or((l.as_str(), ""));
            (String::from(lang), String::from(form))
        })
        .collect();
    CooccurrenceMatrix { rows, cols: cols.into_iter().map(|(id, surface, _)| (id, surface)).collect(), cells }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Alignment, NpAnnotation, Verse, VerseId, VerseMap, VersionId};
    use crate::projection::build_parallel_np_set;
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn vid(s: &str) -> VerseId {
        VerseId::new(s).unwrap()
    }

    fn ver(s: &str) -> VersionId {
        VersionId::parse(s).unwrap()
    }

    fn corpus(versions: &[(&str, &[(&str, &str)])]) -> ParallelCorpus {
        ParallelCorpus::from_versions(
            versions.iter().map(|(name, verses)| {
                let map: VerseMap =
                    verses.iter().map(|(id, text)| (vid(id), Verse::new(text.split(' ')).unwrap())).collect();
                (ver(name), map)
            }),
            None,
        )
        .unwrap()
    }

    #[test]
    fn assign_marker_examples() {
        assert_eq!(assign_marker("ovibus", &set(&["ibus$", "s$"])), Some("ibus$"));
        assert_eq!(assign_marker("pastor", &set(&["ibus$"])), None);
        let ru = set(&["а$", "ам$", "ами$", "ах$", "ы$", "ом$", "у$"]);
        assert_eq!(assign_marker("дворцах", &ru), Some("ах$"));
        assert_eq!(assign_marker("дворцами", &ru), Some("ами$"));
        // interior grams never match
        assert_eq!(assign_marker("ovibus", &set(&["ibu"])), None);
        assert_eq!(assign_marker("a", &set(&["$a$", "a$"])), Some("a$"));
    }

    /// Three verses in which Latin -ibus NPs are split by Russian case.
    fn ibus_fixture() -> (ParallelCorpus, ParallelNpSet) {
        let c = corpus(&[
            ("eng-a", &[("1", "in palaces"), ("2", "with sheep"), ("3", "to shepherds"), ("4", "in houses")]),
            ("lat-a", &[("1", "in palatiis"), ("2", "cum ovibus"), ("3", "pastoribus"), ("4", "in domibus")]),
            ("rus-a", &[("1", "в дворцах"), ("2", "с овцами"), ("3", "пастухам"), ("4", "в домах")]),
        ]);
        let ann = NpAnnotation::new(
            ver("eng-a"),
            [(vid("1"), vec![(1, 2)]), (vid("2"), vec![(1, 2)]), (vid("3"), vec![(1, 2)]), (vid("4"), vec![(1, 2)])],
            &c,
        )
        .unwrap();
        let links = |pairs: [(usize, usize); 4]| -> Vec<(VerseId, Vec<(usize, usize)>)> {
            ["1", "2", "3", "4"].iter().zip(pairs).map(|(v, p)| (vid(v), vec![p])).collect()
        };
        let lat = Alignment::new(ver("eng-a"), ver("lat-a"), links([(1, 1), (1, 1), (1, 0), (1, 1)]), &c).unwrap();
        let rus = Alignment::new(ver("eng-a"), ver("rus-a"), links([(1, 1), (1, 1), (1, 0), (1, 1)]), &c).unwrap();
        let set = build_parallel_np_set(&c, &[ann], &[lat, rus]).unwrap();
        (c, set)
    }

    fn marker_map() -> BTreeMap<String, BTreeSet<String>> {
        let mut m = BTreeMap::new();
        m.insert("lat".to_string(), set(&["ibus$", "is$", "s$"]));
        m.insert("rus".to_string(), set(&["ах$", "ами$", "ам$"]));
        m
    }

    #[test]
    fn ibus_split_by_russian() {
        let (c, s) = ibus_fixture();
        let langs = vec!["lat".to_string(), "rus".to_string()];
        let groups = group_by_marker_combination(&c, &s, &marker_map(), &langs, HeadPolicy::Last);
        let keys: Vec<(Option<&str>, Option<&str>, usize)> =
            groups.iter().map(|g| (g.key[0].1.as_deref(), g.key[1].1.as_deref(), g.members.len())).collect();
        assert_eq!(
            keys,
            vec![
                (Some("ibus$"), Some("ам$"), 1),
                (Some("ibus$"), Some("ами$"), 1),
                (Some("ibus$"), Some("ах$"), 1),
                (Some("is$"), Some("ах$"), 1),
            ]
        );
        let langs = vec!["lat".to_string()];
        let groups = group_by_marker_combination(&c, &s, &marker_map(), &langs, HeadPolicy::Last);
        assert_eq!(groups[0].members, vec![1, 2, 3]);
        assert_eq!(groups[1].members, vec![0]);
    }

    #[test]
    fn missing_projection_and_head_policy() {
        let c = corpus(&[("eng-a", &[("1", "the good shepherd")]), ("lat-a", &[("1", "pastor bonus")])]);
        let ann = NpAnnotation::new(ver("eng-a"), [(vid("1"), vec![(0, 3)])], &c).unwrap();
        let al = Alignment::new(ver("eng-a"), ver("lat-a"), [(vid("1"), vec![(2, 0), (1, 1)])], &c).unwrap();
        let s = build_parallel_np_set(&c, &[ann], &[al]).unwrap();
        let m = marker_map();
        let langs = vec!["lat".to_string(), "deu".to_string()];
        let g = group_by_marker_combination(&c, &s, &m, &langs, HeadPolicy::Last);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].key, vec![("lat".to_string(), Some("s$".to_string())), ("deu".to_string(), None)]);
        assert_eq!(head_word(&c, &s.nps[0], "lat", HeadPolicy::First), Some("pastor"));
        assert_eq!(head_word(&c, &s.nps[0], "eng", HeadPolicy::Last), Some("shepherd"));

        let mx = build_cooccurrence_matrix(&c, &s, &["lat".to_string()]);
        assert_eq!(mx.rows, vec![("lat".to_string(), "bonus".to_string()), ("lat".to_string(), "pastor".to_string())]);
        assert_eq!(mx.cols, vec![("eng-a:1:0,1,2".to_string(), "the good shepherd".to_string())]);
        assert_eq!(mx.cells, vec![(0, 0, 1), (1, 0, 1)]);
    }

    #[test]
    fn matrix_keeps_editions_apart_and_drops_absent_words() {
        let c = corpus(&[
            ("eng-a", &[("1", "sheep graze")]),
            ("eng-b", &[("1", "sheep graze")]),
            ("lat-a", &[("1", "oves pascunt")]),
        ]);
        let ann = |e: &str| NpAnnotation::new(ver(e), [(vid("1"), vec![(0, 1)])], &c).unwrap();
        let al = |e: &str| Alignment::new(ver(e), ver("lat-a"), [(vid("1"), vec![(0, 0), (1, 1)])], &c).unwrap();
        let s = build_parallel_np_set(&c, &[ann("eng-a"), ann("eng-b")], &[al("eng-a"), al("eng-b")]).unwrap();
        let mx = build_cooccurrence_matrix(&c, &s, &["lat".to_string()]);
        assert_eq!(mx.cols.len(), 2);
        assert_eq!(mx.rows, vec![("lat".to_string(), "oves".to_string())]);
        assert_eq!(mx.row_sums(), vec![2]);
        assert_eq!(build_cooccurrence_matrix(&c, &s, &[]), CooccurrenceMatrix { cols: mx.cols.clone(), ..Default::default() });
    }

    proptest! {
        #[test]
        fn assign_marker_is_longest_suffix(word in "[ab]{1,6}", marks in prop::collection::btree_set("\\$?[ab]{0,3}\\$", 0..6)) {
            let closed = format!("{word}$");
            let got = assign_marker(&word, &marks);
            let best = marks.iter().filter(|m| closed.ends_with(m.as_str())).map(|m| m.chars().count()).max();
            prop_assert_eq!(got.map(|g| g.chars().count()), best);
            if let Some(g) = got {
                prop_assert!(word.ends_with(g.trim_matches('$')));
            }
        }

        /// Grouping partitions the NPs; row sums match a brute-force count.
        #[test]
        fn grouping_and_matrix_counts(
            verses in prop::collection::vec(prop::collection::vec(0usize..4, 1..5), 1..6),
            spans in prop::collection::vec((0usize..5, 0usize..5), 1..6),
        ) {
            let vocab = ["oves", "ovibus", "pastor", "domus"];
            let ids: Vec<String> = (0..verses.len()).map(|i| i.to_string()).collect();
            let eng: Vec<(String, String)> = verses.iter().zip(&ids)
                .map(|(v, id)| (id.clone(), vec!["w"; v.len()].join(" "))).collect();
            let lat: Vec<(String, String)> = verses.iter().zip(&ids)
                .map(|(v, id)| (id.clone(), v.iter().map(|&i| vocab[i]).collect::<Vec<_>>().join(" "))).collect();
            let eng_ref: Vec<(&str, &str)> = eng.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            let lat_ref: Vec<(&str, &str)> = lat.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            let c = corpus(&[("eng-a", &eng_ref), ("lat-a", &lat_ref)]);

            let mut raw: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
            for &(v, i) in &spans {
                let v = v % verses.len();
                let i = i % verses[v].len();
                raw.insert(v, vec![(i, i + 1)]);
            }
            let ann = NpAnnotation::new(ver("eng-a"), raw.iter().map(|(v, s)| (vid(&ids[*v]), s.clone())), &c).unwrap();
            let al_raw: Vec<(VerseId, Vec<(usize, usize)>)> =
                verses.iter().zip(&ids).map(|(v, id)| (vid(id), (0..v.len()).map(|i| (i, i)).collect())).collect();
            let al = Alignment::new(ver("eng-a"), ver("lat-a"), al_raw, &c).unwrap();
            let s = build_parallel_np_set(&c, &[ann], &[al]).unwrap();

            let langs = vec!["lat".to_string()];
            let groups = group_by_marker_combination(&c, &s, &marker_map(), &langs, HeadPolicy::Last);
            let mut seen: Vec<usize> = groups.iter().flat_map(|g| g.members.clone()).collect();
            seen.sort();
            prop_assert_eq!(seen, (0..s.nps.len()).collect::<Vec<_>>());
            for w in groups.windows(2) {
                prop_assert!(w[0].members.len() >= w[1].members.len());
            }

            let mx = build_cooccurrence_matrix(&c, &s, &langs);
            for (r, (_, form)) in mx.rows.iter().enumerate() {
                let brute = s.nps.iter().filter(|np| {
                    let (version, span) = np.span_in_language("lat").unwrap();
                    let toks = c.verse(version, span.verse()).unwrap().tokens();
                    span.indices().iter().any(|&i| &toks[i] == form)
                }).count() as u64;
                prop_assert_eq!(mx.row_sums()[r], brute);
            }
        }
    }
}
