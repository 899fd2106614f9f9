//! Renderers for every output file. Each returns the full file text so that
//! writing is a single call and identical inputs give identical bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::Context;
use casemark_core::analysis::{CooccurrenceMatrix, MarkerCombinationGroup};
use casemark_core::corpus::ParallelCorpus;
use casemark_core::eval::{AblationRow, DiffReport, Prf};
use casemark_core::extraction::MarkerSet;
use casemark_core::projection::ParallelNpSet;
use casemark_core::silver::SilverStandard;

/// Writes `text` to `path`, creating parent directories.
pub fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn float(x: Option<f64>) -> String {
    match x {
        None => "NA".into(),
        Some(v) if v.is_infinite() => "inf".into(),
        Some(v) => format!("{v:e}"),
    }
}

pub fn render_marker_set(set: &MarkerSet) -> String {
    let mut out = String::from("gram\tinside\toutside\tp_value\todds_ratio\n");
    for m in &set.markers {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            m.gram,
            m.inside_count,
            m.outside_count,
            float(m.p_value),
            float(m.odds_ratio)
        ));
    }
    out
}

pub fn render_silver(standard: &SilverStandard) -> String {
    standard.suffixes.iter().map(|s| format!("{s}\n")).collect()
}

pub fn render_silver_diagnostics<'a>(standards: impl IntoIterator<Item = &'a SilverStandard>) -> String {
    let mut out = String::from("language\tparadigms_read\tparadigms_used\tentries_used\tsuffixes\n");
    for s in standards {
        let d = s.diagnostics;
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            s.language, d.paradigms_read, d.paradigms_used, d.entries_used, d.suffixes
        ));
    }
    out
}

fn prf_cells(s: &Prf) -> String {
    format!("{:.4}\t{:.4}\t{:.4}", s.precision, s.recall, s.f1)
}

/// Per-language rows followed by the macro-average row.
pub fn render_eval_table(rows: &[(String, Prf)], average: &Prf) -> String {
    let mut out = String::from("language\tP\tR\tF1\n");
    for (lang, s) in rows {
        out.push_str(&format!("{lang}\t{}\n", prf_cells(s)));
    }
    out.push_str(&format!("Average\t{}\n", prf_cells(average)));
    out
}

/// Three columns, padded with empty cells.
pub fn render_diff(d: &DiffReport) -> String {
    let mut out = String::from("intersection\tpredicted_only\tgold_only\n");
    let cols: [Vec<&String>; 3] =
        [d.intersection.iter().collect(), d.predicted_only.iter().collect(), d.gold_only.iter().collect()];
    let height = cols.iter().map(Vec::len).max().unwrap_or(0);
    for i in 0..height {
        let cell = |c: &Vec<&String>| c.get(i).map_or("", |s| s.as_str()).to_string();
        out.push_str(&format!("{}\t{}\t{}\n", cell(&cols[0]), cell(&cols[1]), cell(&cols[2])));
    }
    out
}

pub fn render_ablation(rows: &[AblationRow]) -> String {
    let mut out = String::from("variant\tP\tR\tF1\n");
    for r in rows {
        out.push_str(&format!("{}\t{}\n", r.variant, prf_cells(&r.macro_scores)));
    }
    out
}

/// `<verse-id>\t<version>\t<idx,...>\t<surface>`: each NP's source line
/// followed by one line per projection.
pub fn render_parallel_nps(corpus: &ParallelCorpus, set: &ParallelNpSet) -> String {
    let mut out = String::new();
    for np in &set.nps {
        let spans = std::iter::once((&np.source_version, &np.source_span)).chain(np.projections.iter());
        for (version, span) in spans {
            let idx: Vec<String> = span.indices().iter().map(ToString::to_string).collect();
            let surface = span.surface(corpus, version).unwrap_or_default();
            out.push_str(&format!("{}\t{version}\t{}\t{surface}\n", span.verse(), idx.join(",")));
        }
    }
    out
}

pub struct MatrixFiles {
    pub triplets: String,
    pub rows: String,
    pub cols: String,
}

pub fn render_matrix(m: &CooccurrenceMatrix) -> MatrixFiles {
    let mut triplets = String::from("row_idx\tcol_idx\tcount\n");
    for (r, c, n) in &m.cells {
        triplets.push_str(&format!("{r}\t{c}\t{n}\n"));
    }
    let mut rows = String::from("language:form\n");
    for (lang, form) in &m.rows {
        rows.push_str(&format!("{lang}:{form}\n"));
    }
    let mut cols = String::from("np_id\tsurface\n");
    for (id, surface) in &m.cols {
        cols.push_str(&format!("{id}\t{surface}\n"));
    }
    MatrixFiles { triplets, rows, cols }
}

pub fn export_matrix(m: &CooccurrenceMatrix, dir: &Path) -> anyhow::Result<()> {
    let files = render_matrix(m);
    write_file(&dir.join("matrix.tsv"), &files.triplets)?;
    write_file(&dir.join("rows.txt"), &files.rows)?;
    write_file(&dir.join("cols.txt"), &files.cols)
}

/// One line per sample NP (at most `samples` per group): group number,
/// size, the key's marker per language (`-` for none), the NP id and its
/// surface per language.
pub fn render_groups(
    corpus: &ParallelCorpus,
    set: &ParallelNpSet,
    groups: &[MarkerCombinationGroup],
    languages: &[String],
    samples: usize,
) -> String {
    let mut out = String::from("group\tsize");
    for l in languages {
        out.push_str(&format!("\t{l}"));
    }
    out.push_str("\tnp_id");
    for l in languages {
        out.push_str(&format!("\t{l}_surface"));
    }
    out.push('\n');
    for (g, group) in groups.iter().enumerate() {
        let key: Vec<&str> = group.key.iter().map(|(_, m)| m.as_deref().unwrap_or("-")).collect();
        for &i in group.members.iter().take(samples) {
            let np = &set.nps[i];
            let surfaces: Vec<String> = languages
                .iter()
                .map(|l| np.span_in_language(l).and_then(|(v, s)| s.surface(corpus, v)).unwrap_or_default())
                .collect();
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                g + 1,
                group.members.len(),
                key.join("\t"),
                np.id(),
                surfaces.join("\t")
            ));
        }
    }
    out
}

/// Scores keyed by language, as written in the projection self-evaluation.
pub fn render_projection_eval(rows: &BTreeMap<String, Prf>) -> String {
    let mut out = String::from("version\tP\tR\tF1\n");
    for (v, s) in rows {
        out.push_str(&format!("{v}\t{}\n", prf_cells(s)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use casemark_core::eval::AblationVariant;
    use std::collections::BTreeSet;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn matrix_export_shapes() {
        let empty = render_matrix(&CooccurrenceMatrix::default());
        assert_eq!(empty.triplets, "row_idx\tcol_idx\tcount\n");
        assert_eq!(empty.rows, "language:form\n");
        assert_eq!(empty.cols, "np_id\tsurface\n");

        let m = CooccurrenceMatrix {
            rows: vec![("lat".into(), "bonus".into()), ("lat".into(), "pastor".into())],
            cols: vec![("a".into(), "x".into()), ("b".into(), "y".into())],
            cells: vec![(1, 0, 1)],
        };
        let dir = tempfile::TempDir::new().unwrap();
        export_matrix(&m, dir.path()).unwrap();
        let first = fs::read(dir.path().join("matrix.tsv")).unwrap();
        assert_eq!(String::from_utf8(first.clone()).unwrap().lines().count(), 2);
        export_matrix(&m, dir.path()).unwrap();
        assert_eq!(fs::read(dir.path().join("matrix.tsv")).unwrap(), first);
        assert_eq!(fs::read_to_string(dir.path().join("rows.txt")).unwrap(), "language:form\nlat:bonus\nlat:pastor\n");
    }

    #[test]
    fn diff_and_tables() {
        let d = casemark_core::eval::diff_report(&set(&["a$", "b$"]), &set(&["b$", "c$", "d$"]));
        assert_eq!(render_diff(&d), "intersection\tpredicted_only\tgold_only\nb$\ta$\tc$\n\t\td$\n");
        let p = Prf::new(1.0, 0.5);
        let t = render_eval_table(&[("lat".into(), p)], &p);
        assert_eq!(t, "language\tP\tR\tF1\nlat\t1.0000\t0.5000\t0.6667\nAverage\t1.0000\t0.5000\t0.6667\n");
        let a = render_ablation(&[AblationRow { variant: AblationVariant::NoPhi, macro_scores: Prf::default(), per_language: vec![] }]);
        assert_eq!(a, "variant\tP\tR\tF1\nno_phi\t0.0000\t0.0000\t0.0000\n");
    }

    #[test]
    fn float_cells() {
        assert_eq!(float(None), "NA");
        assert_eq!(float(Some(f64::INFINITY)), "inf");
        assert_eq!(float(Some(2.869e-6)), "2.869e-6");
    }
}
