//! Scoring extracted markers against silver standards, and the ablation grid.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::corpus::ParallelCorpus;
use crate::extraction::{run_on_set, MarkerSet, PipelineConfig};
use crate::projection::ParallelNpSet;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn new(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
        Self { precision, recall, f1 }
    }
}

/// Exact-match set comparison. Both sets empty scores (1, 1, 1); an empty
/// side facing a non-empty one scores 0 on the undefined ratio.
pub fn score(predicted: &BTreeSet<String>, gold: &BTreeSet<String>) -> Prf {
    if predicted.is_empty() && gold.is_empty() {
        return Prf { precision: 1.0, recall: 1.0, f1: 1.0 };
    }
    let hits = predicted.intersection(gold).count() as f64;
    let ratio = |n: usize| if n == 0 { 0.0 } else { hits / n as f64 };
    Prf::new(ratio(predicted.len()), ratio(gold.len()))
}

/// Unweighted means of P, R and F1 (F1 is averaged, not recomputed).
pub fn macro_average(scores: &[Prf]) -> Result<Prf> {
    if scores.is_empty() {
        return Err(Error::EmptyAverage);
    }
    let n = scores.len() as f64;
    let sum = scores.iter().fold((0.0, 0.0, 0.0), |(p, r, f), s| (p + s.precision, r + s.recall, f + s.f1));
    Ok(Prf { precision: sum.0 / n, recall: sum.1 / n, f1: sum.2 / n })
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiffReport {
    pub intersection: BTreeSet<String>,
    pub predicted_only: BTreeSet<String>,
    pub gold_only: BTreeSet<String>,
}

pub fn diff_report(predicted: &BTreeSet<String>, gold: &BTreeSet<String>) -> DiffReport {
    DiffReport {
        intersection: predicted.intersection(gold).cloned().collect(),
        predicted_only: predicted.difference(gold).cloned().collect(),
        gold_only: gold.difference(predicted).cloned().collect(),
    }
}

/// Per-language scores for every language with both a marker set and a
/// silver standard, in language order.
pub fn score_languages(
    predicted: &BTreeMap<String, BTreeSet<String>>,
    gold: &BTreeMap<String, BTreeSet<String>>,
) -> Vec<(String, Prf)> {
    predicted
        .iter()
        .filter_map(|(lang, p)| gold.get(lang).map(|g| (lang.clone(), score(p, g))))
        .collect()
}

/// NP-relevant word types from projection scored against those from a
/// native chunker.
pub fn projection_self_eval(direct: &BTreeSet<String>, projected: &BTreeSet<String>) -> Prf {
    score(projected, direct)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AblationVariant {
    Baseline,
    NoTheta,
    NoPhi,
    NoChi,
    Middle,
    Beginning,
}

impl AblationVariant {
    pub const ALL: [Self; 6] = [Self::Baseline, Self::NoTheta, Self::NoPhi, Self::NoChi, Self::Middle, Self::Beginning];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Baseline => "baseline",
            Self::NoTheta => "no_theta",
            Self::NoPhi => "no_phi",
            Self::NoChi => "no_chi",
            Self::Middle => "middle",
            Self::Beginning => "beginning",
        }
    }

    /// `base` with this variant's stage switched off or widened.
    pub fn apply(&self, base: &PipelineConfig) -> PipelineConfig {
        let mut c = base.clone();
        match self {
            Self::Baseline => {}
            Self::NoTheta => c.stages.frequency = false,
            Self::NoPhi => c.stages.p_value = false,
            Self::NoChi => c.stages.odds_ratio = false,
            Self::Middle => c.stages.include_middle = true,
            Self::Beginning => c.stages.include_beginning = true,
        }
        c
    }
}

impl fmt::Display for AblationVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AblationVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(alloc::format!("unknown ablation variant {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub variant: AblationVariant,
    pub macro_scores: Prf,
    pub per_language: Vec<(String, Prf)>,
}

/// Macro scores of `markers` against `gold`; errors when no language has
/// both.
pub fn macro_score(
    markers: &BTreeMap<String, MarkerSet>,
    gold: &BTreeMap<String, BTreeSet<String>>,
) -> Result<(Prf, Vec<(String, Prf)>)> {
    let predicted: BTreeMap<String, BTreeSet<String>> = markers.iter().map(|(l, m)| (l.clone(), m.grams())).collect();
    let per_language = score_languages(&predicted, gold);
    let scores: Vec<Prf> = per_language.iter().map(|(_, s)| *s).collect();
    Ok((macro_average(&scores)?, per_language))
}

/// Runs the pipeline once per variant and scores each run against `gold`.
pub fn run_ablation(
    corpus: &ParallelCorpus,
    set: &ParallelNpSet,
    base: &PipelineConfig,
    gold: &BTreeMap<String, BTreeSet<String>>,
    variants: &[AblationVariant],
) -> Result<Vec<AblationRow>> {
    variants
        .iter()
        .map(|&variant| {
            let markers = run_on_set(corpus, set, &variant.apply(base))?;
            let (macro_scores, per_language) = macro_score(&markers, gold)?;
            Ok(AblationRow { variant, macro_scores, per_language })
        })
        .collect()
}
