//! TOML run configuration. Relative paths resolve against the config file's
//! directory; command-line flags override file values.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use casemark_core::analysis::HeadPolicy;
use casemark_core::eval::AblationVariant;
use casemark_core::extraction::{LanguageFilter, PipelineConfig, StageToggles};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    out: Option<PathBuf>,
    jobs: Option<usize>,
    #[serde(default)]
    languages: Vec<String>,
    #[serde(default)]
    deny_languages: Vec<String>,
    #[serde(default)]
    corpus: RawCorpus,
    #[serde(default)]
    pipeline: PipelineSection,
    #[serde(default)]
    silver: RawSilver,
    #[serde(default)]
    eval: RawEval,
    #[serde(default)]
    analysis: AnalysisSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCorpus {
    #[serde(default)]
    verses: Vec<PathBuf>,
    #[serde(default)]
    alignments: Vec<PathBuf>,
    #[serde(default)]
    annotations: Vec<PathBuf>,
    verse_allowlist: Option<PathBuf>,
}

/// Thresholds and stage switches, echoed verbatim into run manifests.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineSection {
    pub theta: u64,
    pub phi: f64,
    pub chi: f64,
    pub suffix_only: bool,
    pub max_ngram: Option<usize>,
    /// Rescale `theta` by `|I_l| / theta_reference` per language.
    pub theta_reference: Option<usize>,
    /// Run with one stage ablated.
    pub ablate: Option<String>,
}

impl Default for PipelineSection {
    fn default() -> Self {
        let d = PipelineConfig::default();
        Self {
            theta: d.theta,
            phi: d.phi,
            chi: d.chi,
            suffix_only: d.suffix_only,
            max_ngram: d.max_ngram,
            theta_reference: None,
            ablate: None,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSilver {
    #[serde(default)]
    unimorph: Vec<PathBuf>,
    #[serde(default)]
    languages: Vec<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEval {
    markers: Option<PathBuf>,
    gold: Option<PathBuf>,
    #[serde(default)]
    native_annotations: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSection {
    pub languages: Vec<String>,
    pub samples: usize,
    /// `last` or `first` token of a span.
    pub head: String,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self { languages: Vec::new(), samples: 5, head: "last".into() }
    }
}

/// A validated configuration with absolute paths.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Directory relative paths were resolved against.
    pub base: PathBuf,
    pub out: PathBuf,
    pub jobs: usize,
    pub languages: Vec<String>,
    pub deny_languages: Vec<String>,
    pub verses: Vec<PathBuf>,
    pub alignments: Vec<PathBuf>,
    pub annotations: Vec<PathBuf>,
    pub verse_allowlist: Option<PathBuf>,
    pub pipeline: PipelineSection,
    pub unimorph: Vec<PathBuf>,
    pub silver_languages: Vec<String>,
    pub markers_dir: PathBuf,
    pub gold_dir: PathBuf,
    pub native_annotations: Vec<PathBuf>,
    pub analysis: AnalysisSection,
}

/// Values given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub languages: Option<Vec<String>>,
    pub jobs: Option<usize>,
    pub theta: Option<u64>,
    pub phi: Option<f64>,
    pub chi: Option<f64>,
    pub suffix_only: Option<bool>,
    pub ablate: Option<String>,
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let base = if base.as_os_str().is_empty() { PathBuf::from(".") } else { base };
        Self::from_toml(&text, &base, overrides).with_context(|| format!("in config {}", path.display()))
    }

    pub fn from_toml(text: &str, base: &Path, overrides: &Overrides) -> anyhow::Result<Self> {
        let raw: RawConfig = toml::from_str(text)?;
        let abs = |p: &PathBuf| if p.is_absolute() { p.clone() } else { base.join(p) };
        let all = |ps: &[PathBuf]| ps.iter().map(abs).collect::<Vec<_>>();

        let out = overrides.out.clone().unwrap_or_else(|| raw.out.as_ref().map(abs).unwrap_or_else(|| base.join("out")));
        let mut pipeline = raw.pipeline;
        if let Some(t) = overrides.theta {
            pipeline.theta = t;
        }
        if let Some(p) = overrides.phi {
            pipeline.phi = p;
        }
        if let Some(c) = overrides.chi {
            pipeline.chi = c;
        }
        if let Some(s) = overrides.suffix_only {
            pipeline.suffix_only = s;
        }
        if overrides.ablate.is_some() {
            pipeline.ablate = overrides.ablate.clone();
        }
        let default_jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
        let config = Self {
            base: base.to_path_buf(),
            markers_dir: raw.eval.markers.as_ref().map(abs).unwrap_or_else(|| out.join("markers")),
            gold_dir: raw.eval.gold.as_ref().map(abs).unwrap_or_else(|| out.join("silver")),
            out,
            jobs: overrides.jobs.or(raw.jobs).unwrap_or(default_jobs),
            languages: overrides.languages.clone().unwrap_or(raw.languages),
            deny_languages: raw.deny_languages,
            verses: all(&raw.corpus.verses),
            alignments: all(&raw.corpus.alignments),
            annotations: all(&raw.corpus.annotations),
            verse_allowlist: raw.corpus.verse_allowlist.as_ref().map(abs),
            pipeline,
            unimorph: all(&raw.silver.unimorph),
            silver_languages: raw.silver.languages,
            native_annotations: all(&raw.eval.native_annotations),
            analysis: raw.analysis,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> anyhow::Result<()> {
        if self.jobs == 0 {
            bail!("jobs must be at least 1");
        }
        let inputs = self
            .verses
            .iter()
            .chain(&self.alignments)
            .chain(&self.annotations)
            .chain(&self.verse_allowlist)
            .chain(&self.unimorph)
            .chain(&self.native_annotations);
        for p in inputs {
            if !p.exists() {
                bail!("{} does not exist", p.display());
            }
        }
        self.pipeline_config()?;
        self.head_policy()?;
        Ok(())
    }

    pub fn ablation(&self) -> anyhow::Result<Option<AblationVariant>> {
        self.pipeline.ablate.as_deref().map(|s| s.parse::<AblationVariant>()).transpose().map_err(Into::into)
    }

    /// The core pipeline configuration, with any `ablate` variant applied.
    pub fn pipeline_config(&self) -> anyhow::Result<PipelineConfig> {
        let p = &self.pipeline;
        let config = PipelineConfig {
            theta: p.theta,
            phi: p.phi,
            chi: p.chi,
            suffix_only: p.suffix_only,
            max_ngram: p.max_ngram,
            theta_reference: p.theta_reference,
            stages: StageToggles::default(),
            languages: self.language_filter(),
        };
        config.validate()?;
        Ok(match self.ablation()? {
            Some(v) => v.apply(&config),
            None => config,
        })
    }

    pub fn language_filter(&self) -> LanguageFilter {
        LanguageFilter {
            allow: self.languages.iter().cloned().collect::<BTreeSet<_>>(),
            deny: self.deny_languages.iter().cloned().collect(),
        }
    }

    pub fn head_policy(&self) -> anyhow::Result<HeadPolicy> {
        match self.analysis.head.as_str() {
            "last" => Ok(HeadPolicy::Last),
            "first" => Ok(HeadPolicy::First),
            other => bail!("analysis.head must be \"last\" or \"first\", not {other:?}"),
        }
    }

    /// `path` relative to the config directory when it lies beneath it.
    pub fn display_path(&self, path: &Path) -> String {
        path.strip_prefix(&self.base).unwrap_or(path).to_string_lossy().replace('\\', "/")
    }
}
