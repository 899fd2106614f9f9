//! One function per subcommand. Each returns the files it wrote, in order.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use casemark_core::analysis::{build_cooccurrence_matrix, group_by_marker_combination};
use casemark_core::corpus::{Alignment, NpAnnotation, ParallelCorpus};
use casemark_core::eval::{self, AblationRow, AblationVariant, Prf};
use casemark_core::extraction::{run_language, selected_targets, MarkerSet, PipelineConfig};
use casemark_core::projection::{
    build_inside_outside, build_parallel_np_set_for, inside_outside_from_annotation, partition_word_types, ParallelNpSet,
};
use casemark_core::silver::{build_silver, SilverStandard};
use log::{info, warn};
use rayon::prelude::*;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::input::{self, expand};
use crate::output::{self, write_file};

struct Inputs {
    corpus: ParallelCorpus,
    annotations: Vec<NpAnnotation>,
    alignments: Vec<Alignment>,
    /// Every file read, for the manifest.
    files: Vec<PathBuf>,
}

fn expand_all(paths: &[PathBuf], extensions: &[&str]) -> anyhow::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        out.extend(expand(p, extensions)?);
    }
    Ok(out)
}

fn load_inputs(cfg: &RunConfig) -> anyhow::Result<Inputs> {
    if cfg.verses.is_empty() {
        bail!("no verse files configured ([corpus] verses)");
    }
    let verse_files = expand_all(&cfg.verses, &[".txt"])?;
    let allowlist = cfg.verse_allowlist.as_deref().map(input::read_verse_allowlist).transpose()?;
    let corpus = input::load_corpus(&verse_files, allowlist.as_ref())?;
    info!("corpus: {} versions, {} shared verses", corpus.version_ids().count(), corpus.shared_verses().len());

    let annotation_files = expand_all(&cfg.annotations, &[])?;
    let annotations =
        annotation_files.iter().map(|p| input::read_np_annotation(p, &corpus)).collect::<Result<Vec<_>, _>>()?;
    let alignment_files = expand_all(&cfg.alignments, &[])?;
    let alignments =
        alignment_files.iter().map(|p| input::read_alignment(p, &corpus)).collect::<Result<Vec<_>, _>>()?;
    if annotations.is_empty() {
        bail!("no NP annotation files configured ([corpus] annotations)");
    }

    let mut files = verse_files;
    files.extend(cfg.verse_allowlist.iter().cloned());
    files.extend(annotation_files);
    files.extend(alignment_files);
    Ok(Inputs { corpus, annotations, alignments, files })
}

fn parallel_set(inputs: &Inputs, admit: impl Fn(&str) -> bool) -> anyhow::Result<ParallelNpSet> {
    let set = build_parallel_np_set_for(&inputs.corpus, &inputs.annotations, &inputs.alignments, admit)
        .context("building the parallel NP set")?;
    info!("{} parallel NPs, {} target versions", set.nps.len(), set.targets.len());
    Ok(set)
}

fn pool(cfg: &RunConfig) -> anyhow::Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build()?)
}

fn sha256(path: &Path) -> anyhow::Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn manifest(cfg: &RunConfig, inputs: &Inputs, set: &ParallelNpSet, config: &PipelineConfig, sets: &[MarkerSet]) -> anyhow::Result<String> {
    let files = inputs
        .files
        .iter()
        .map(|p| Ok(json!({ "path": cfg.display_path(p), "sha256": sha256(p)? })))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let languages: BTreeMap<&str, serde_json::Value> = sets
        .iter()
        .map(|m| {
            let d = m.diagnostics;
            let value = json!({
                "theta": config.theta_for(d.np_relevant),
                "np_relevant": d.np_relevant,
                "np_irrelevant": d.np_irrelevant,
                "c1": d.c1,
                "c2": d.c2,
                "passed_tests": d.passed_tests,
                "markers": d.markers,
            });
            (m.language.as_str(), value)
        })
        .collect();
    let s = config.stages;
    let doc = json!({
        "pipeline": cfg.pipeline,
        "stages": {
            "frequency": s.frequency,
            "p_value": s.p_value,
            "odds_ratio": s.odds_ratio,
            "include_middle": s.include_middle,
            "include_beginning": s.include_beginning,
        },
        "inputs": files,
        "corpus": {
            "fingerprint": format!("{:016x}", inputs.corpus.fingerprint()),
            "versions": inputs.corpus.version_ids().map(ToString::to_string).collect::<Vec<_>>(),
            "shared_verses": inputs.corpus.shared_verses().len(),
        },
        "sources": set.sources.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "parallel_nps": set.nps.len(),
        "languages": languages,
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Reports per-language failures and fails if there were any.
fn check_failures(failures: Vec<(String, String)>) -> anyhow::Result<()> {
    if failures.is_empty() {
        return Ok(());
    }
    for (lang, err) in &failures {
        log::error!("{lang}: {err}");
    }
    let names: Vec<&str> = failures.iter().map(|(l, _)| l.as_str()).collect();
    bail!("{} language(s) failed: {}", failures.len(), names.join(", "))
}

/// Marker files under `<out>/markers/` plus `<out>/manifest.json`.
pub fn cmd_extract(cfg: &RunConfig) -> anyhow::Result<Vec<PathBuf>> {
    let config = cfg.pipeline_config()?;
    let inputs = load_inputs(cfg)?;
    let set = parallel_set(&inputs, |l| config.languages.admits(l))?;
    let targets = selected_targets(&set, &config)?;
    if targets.is_empty() {
        warn!("no target language selected");
    }
    let results: Vec<(String, Result<MarkerSet, casemark_core::Error>)> = pool(cfg)?.install(|| {
        targets
            .par_iter()
            .map(|v| (v.language().to_string(), run_language(&inputs.corpus, &set, v, &config)))
            .collect()
    });

    let mut written = Vec::new();
    let mut sets = Vec::new();
    let mut failures = Vec::new();
    for (lang, result) in results {
        match result {
            Ok(m) => {
                let path = cfg.out.join("markers").join(format!("{lang}.tsv"));
                write_file(&path, &output::render_marker_set(&m))?;
                info!("{lang}: {} markers", m.markers.len());
                written.push(path);
                sets.push(m);
            }
            Err(e) => failures.push((lang, e.to_string())),
        }
    }
    let path = cfg.out.join("manifest.json");
    write_file(&path, &manifest(cfg, &inputs, &set, &config, &sets)?)?;
    written.push(path);
    check_failures(failures)?;
    Ok(written)
}

/// Silver standards from the configured paradigm files, one per language.
pub fn build_silver_standards(cfg: &RunConfig) -> anyhow::Result<Vec<SilverStandard>> {
    let files = expand_all(&cfg.unimorph, &[])?;
    let allow: BTreeSet<&str> = cfg.silver_languages.iter().map(String::as_str).collect();
    let filter = cfg.language_filter();
    let mut by_language: BTreeMap<String, Vec<PathBuf>> = BTreeMap::new();
    for f in files {
        let lang = input::file_stem(&f);
        if (allow.is_empty() || allow.contains(lang.as_str())) && filter.admits(&lang) {
            by_language.entry(lang).or_default().push(f);
        }
    }
    let mut standards = by_language
        .into_par_iter()
        .map(|(lang, paths)| {
            let mut entries = Vec::new();
            for p in &paths {
                entries.extend(input::parse_unimorph(p)?);
            }
            Ok(build_silver(&lang, entries))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    standards.sort_by(|a, b| a.language.cmp(&b.language));
    Ok(standards)
}

/// `<out>/silver/<lang>.txt` plus `diagnostics.tsv`.
pub fn cmd_silver(cfg: &RunConfig) -> anyhow::Result<Vec<PathBuf>> {
    let standards = pool(cfg)?.install(|| build_silver_standards(cfg))?;
    if standards.is_empty() {
        warn!("no paradigm files found; no silver standard written");
        return Ok(Vec::new());
    }
    let dir = cfg.out.join("silver");
    let mut written = Vec::new();
    for s in &standards {
        let path = dir.join(format!("{}.txt", s.language));
        write_file(&path, &output::render_silver(s))?;
        info!("{}: {} suffixes from {} paradigms", s.language, s.suffixes.len(), s.diagnostics.paradigms_used);
        written.push(path);
    }
    let path = dir.join("diagnostics.tsv");
    write_file(&path, &output::render_silver_diagnostics(&standards))?;
    written.push(path);
    Ok(written)
}

fn read_grams(dir: &Path, extension: &str, cfg: &RunConfig, what: &str) -> anyhow::Result<BTreeMap<String, BTreeSet<String>>> {
    if !dir.is_dir() {
        bail!("{what} directory {} does not exist", dir.display());
    }
    let filter = cfg.language_filter();
    let mut grams = input::read_gram_dir(dir, extension)?;
    grams.retain(|lang, _| filter.admits(lang));
    Ok(grams)
}

fn read_gold(cfg: &RunConfig) -> anyhow::Result<BTreeMap<String, BTreeSet<String>>> {
    read_grams(&cfg.gold_dir, ".txt", cfg, "silver standard")
}

/// `eval.tsv`, `diff/<lang>.tsv` and, with native annotations configured,
/// `projection_eval.tsv`.
pub fn cmd_eval(cfg: &RunConfig) -> anyhow::Result<Vec<PathBuf>> {
    let predicted = read_grams(&cfg.markers_dir, ".tsv", cfg, "marker")?;
    let gold = read_gold(cfg)?;
    let rows = eval::score_languages(&predicted, &gold);
    if rows.is_empty() {
        bail!(
            "nothing to evaluate: no language has both markers in {} and a silver standard in {}",
            cfg.markers_dir.display(),
            cfg.gold_dir.display()
        );
    }
    let scores: Vec<Prf> = rows.iter().map(|(_, s)| *s).collect();
    let average = eval::macro_average(&scores)?;
    let mut written = Vec::new();
    let path = cfg.out.join("eval.tsv");
    write_file(&path, &output::render_eval_table(&rows, &average))?;
    written.push(path);
    for (lang, _) in &rows {
        let d = eval::diff_report(&predicted[lang], &gold[lang]);
        let path = cfg.out.join("diff").join(format!("{lang}.tsv"));
        write_file(&path, &output::render_diff(&d))?;
        written.push(path);
    }
    info!("macro P/R/F1 {:.4} {:.4} {:.4} over {} languages", average.precision, average.recall, average.f1, rows.len());

    if !cfg.native_annotations.is_empty() {
        written.push(projection_eval(cfg)?);
    }
    Ok(written)
}

/// NP-relevant word types from projection against those from native
/// annotations of the same version.
fn projection_eval(cfg: &RunConfig) -> anyhow::Result<PathBuf> {
    let inputs = load_inputs(cfg)?;
    let set = parallel_set(&inputs, |_| true)?;
    let mut rows = BTreeMap::new();
    for p in expand_all(&cfg.native_annotations, &[])? {
        let native = input::read_np_annotation(&p, &inputs.corpus)?;
        let version = native.version().clone();
        let direct = partition_word_types(&inside_outside_from_annotation(&inputs.corpus, &native)).np_relevant;
        let counts = build_inside_outside(&inputs.corpus, &set, &version)
            .with_context(|| format!("projecting into {version}"))?;
        let projected = partition_word_types(&counts).np_relevant;
        rows.insert(version.to_string(), eval::projection_self_eval(&direct, &projected));
    }
    let path = cfg.out.join("projection_eval.tsv");
    write_file(&path, &output::render_projection_eval(&rows))?;
    Ok(path)
}

/// `ablation.tsv`: one macro-averaged row per variant.
pub fn cmd_ablate(cfg: &RunConfig) -> anyhow::Result<Vec<PathBuf>> {
    let base = cfg.pipeline_config()?;
    let gold = read_gold(cfg)?;
    let inputs = load_inputs(cfg)?;
    let set = parallel_set(&inputs, |l| base.languages.admits(l))?;
    let rows: Vec<anyhow::Result<AblationRow>> = pool(cfg)?.install(|| {
        AblationVariant::ALL
            .par_iter()
            .map(|&v| {
                eval::run_ablation(&inputs.corpus, &set, &base, &gold, &[v])
                    .map(|mut r| r.remove(0))
                    .map_err(|e| match e {
                        casemark_core::Error::EmptyAverage => anyhow!("nothing to evaluate for variant {v}"),
                        other => anyhow!("variant {v}: {other}"),
                    })
            })
            .collect()
    });
    let rows = rows.into_iter().collect::<anyhow::Result<Vec<_>>>()?;
    for r in &rows {
        info!("{}: F1 {:.4}", r.variant, r.macro_scores.f1);
    }
    let path = cfg.out.join("ablation.tsv");
    write_file(&path, &output::render_ablation(&rows))?;
    Ok(vec![path])
}

/// `analysis/groups.tsv` plus the cooccurrence matrix files.
pub fn cmd_analyze(cfg: &RunConfig) -> anyhow::Result<Vec<PathBuf>> {
    let markers = read_grams(&cfg.markers_dir, ".tsv", cfg, "marker")?;
    let languages: Vec<String> =
        if cfg.analysis.languages.is_empty() { markers.keys().cloned().collect() } else { cfg.analysis.languages.clone() };
    if languages.is_empty() {
        bail!("no analysis languages: set [analysis] languages or run extract first");
    }
    let policy = cfg.head_policy()?;
    let inputs = load_inputs(cfg)?;
    let wanted: BTreeSet<&str> = languages.iter().map(String::as_str).collect();
    let set = parallel_set(&inputs, |l| wanted.contains(l))?;
    for l in &languages {
        if !markers.contains_key(l) && !set.sources.iter().any(|s| s.language() == l) {
            warn!("{l}: no marker set; every NP gets no marker there");
        }
    }
    let groups = group_by_marker_combination(&inputs.corpus, &set, &markers, &languages, policy);
    let matrix = build_cooccurrence_matrix(&inputs.corpus, &set, &languages);
    let dir = cfg.out.join("analysis");
    let groups_path = dir.join("groups.tsv");
    write_file(&groups_path, &output::render_groups(&inputs.corpus, &set, &groups, &languages, cfg.analysis.samples))?;
    output::export_matrix(&matrix, &dir)?;
    info!("{} groups; matrix {}x{} with {} cells", groups.len(), matrix.rows.len(), matrix.cols.len(), matrix.cells.len());
    Ok(vec![groups_path, dir.join("matrix.tsv"), dir.join("rows.txt"), dir.join("cols.txt")])
}

/// `parallel_nps.tsv`: the parallel NP set, one line per span.
pub fn cmd_project(cfg: &RunConfig) -> anyhow::Result<Vec<PathBuf>> {
    let filter = cfg.language_filter();
    let inputs = load_inputs(cfg)?;
    let set = parallel_set(&inputs, |l| filter.admits(l))?;
    let path = cfg.out.join("parallel_nps.tsv");
    write_file(&path, &output::render_parallel_nps(&inputs.corpus, &set))?;
    Ok(vec![path])
}
