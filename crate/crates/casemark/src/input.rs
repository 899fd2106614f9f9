//! Readers for verse, alignment, NP annotation, paradigm, marker and silver
//! files.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use casemark_core::corpus::{Alignment, NpAnnotation, ParallelCorpus, Verse, VerseId, VerseMap, VersionId};
use casemark_core::silver::ParadigmEntry;
use unicode_normalization::UnicodeNormalization;

use crate::error::{LoadError, LoadResult};

fn read(path: &Path) -> LoadResult<String> {
    fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> LoadError {
    LoadError::Parse { path: path.to_path_buf(), line, message: message.into() }
}

fn core_err(path: &Path, line: usize) -> impl Fn(casemark_core::Error) -> LoadError + '_ {
    move |source| LoadError::Invalid { path: path.to_path_buf(), line, source }
}

/// Non-blank lines with their 1-based numbers, NFC-normalized, trailing
/// `\r` removed.
fn lines(text: &str) -> impl Iterator<Item = (usize, String)> + '_ {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r').nfc().collect::<String>()))
        .filter(|(_, l)| !l.trim().is_empty())
}

/// File name up to the first `.`.
pub fn file_stem(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    name.split('.').next().unwrap_or_default().to_string()
}

/// `path` itself, or the sorted regular files in it whose name ends with
/// one of `extensions` (any file when empty). Hidden files are skipped.
pub fn expand(path: &Path, extensions: &[&str]) -> LoadResult<Vec<PathBuf>> {
    if !path.is_dir() {
        if !path.exists() {
            return Err(LoadError::Missing(path.to_path_buf()));
        }
        return Ok(vec![path.to_path_buf()]);
    }
    let entries = fs::read_dir(path).map_err(|source| LoadError::Io { path: path.to_path_buf(), source })?;
    let mut out = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| LoadError::Io { path: path.to_path_buf(), source })?;
        let p = entry.path();
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with('.') || !p.is_file() {
            continue;
        }
        if extensions.is_empty() || extensions.iter().any(|e| name.ends_with(e)) {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

/// One version from `<language>-<edition>.txt`. Lines are
/// `<verse-id>\t<tokens>`; `#` lines are comments and a verse with empty
/// text is treated as absent.
pub fn read_verse_file(path: &Path) -> LoadResult<(VersionId, VerseMap)> {
    let version = VersionId::parse(&file_stem(path)).map_err(core_err(path, 0))?;
    let text = read(path)?;
    let mut verses = VerseMap::new();
    for (n, line) in lines(&text) {
        if line.starts_with('#') {
            continue;
        }
        let (id, body) = line.split_once('\t').ok_or_else(|| parse_err(path, n, "expected <verse-id>\\t<tokens>"))?;
        let id = VerseId::new(id).map_err(core_err(path, n))?;
        if verses.contains_key(&id) {
            return Err(parse_err(path, n, format!("duplicate verse id {id}")));
        }
        if body.is_empty() {
            continue;
        }
        let verse = Verse::new(body.split(' ')).map_err(core_err(path, n))?;
        verses.insert(id, verse);
    }
    Ok((version, verses))
}

pub fn write_verse_file(path: &Path, verses: &VerseMap) -> std::io::Result<()> {
    let mut out = String::new();
    for (id, verse) in verses {
        out.push_str(&format!("{id}\t{}\n", verse.tokens().join(" ")));
    }
    fs::write(path, out)
}

/// Loads and intersects the given verse files.
pub fn load_corpus(paths: &[PathBuf], allowlist: Option<&BTreeSet<VerseId>>) -> LoadResult<ParallelCorpus> {
    let versions = paths.iter().map(|p| read_verse_file(p)).collect::<LoadResult<Vec<_>>>()?;
    ParallelCorpus::from_versions(versions, allowlist).map_err(LoadError::Corpus)
}

/// One verse id per line; `#` comments allowed.
pub fn read_verse_allowlist(path: &Path) -> LoadResult<BTreeSet<VerseId>> {
    let text = read(path)?;
    lines(&text)
        .filter(|(_, l)| !l.starts_with('#'))
        .map(|(n, l)| VerseId::new(l.trim()).map_err(core_err(path, n)))
        .collect()
}

fn parse_pair(path: &Path, n: usize, item: &str, sep: char) -> LoadResult<(usize, usize)> {
    let bad = || parse_err(path, n, format!("malformed pair {item:?}"));
    let (a, b) = item.split_once(sep).ok_or_else(bad)?;
    Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
}

type PairLine = (VerseId, Vec<(usize, usize)>);

/// Splits `<verse-id>\t<pair pair ...>` lines into raw pairs.
/// `#` lines, the header included, are skipped.
fn read_pairs(path: &Path, text: &str, sep: char) -> LoadResult<Vec<PairLine>> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (n, line) in lines(text) {
        if line.starts_with('#') {
            continue;
        }
        let (id, body) = line.split_once('\t').unwrap_or((line.as_str(), ""));
        let id = VerseId::new(id).map_err(core_err(path, n))?;
        if !seen.insert(id.clone()) {
            return Err(parse_err(path, n, format!("duplicate verse id {id}")));
        }
        let pairs = body.split(' ').filter(|s| !s.is_empty()).map(|s| parse_pair(path, n, s, sep)).collect::<LoadResult<_>>()?;
        out.push((id, pairs));
    }
    Ok(out)
}

/// The `#\t...` header fields, if the first non-blank line is one.
fn header(text: &str) -> Option<Vec<String>> {
    let (_, first) = lines(text).next()?;
    let rest = first.strip_prefix("#\t")?;
    Some(rest.split('\t').map(str::to_string).collect())
}

/// Alignment file: header `#\t<source>\t<target>`, then
/// `<verse-id>\t<i-j i-j ...>`.
pub fn read_alignment(path: &Path, corpus: &ParallelCorpus) -> LoadResult<Alignment> {
    let text = read(path)?;
    let fields = header(&text).ok_or_else(|| parse_err(path, 1, "missing header #\\t<source>\\t<target>"))?;
    let [source, target] = fields.as_slice() else {
        return Err(parse_err(path, 1, "header must name exactly a source and a target version"));
    };
    let source = VersionId::parse(source).map_err(core_err(path, 1))?;
    let target = VersionId::parse(target).map_err(core_err(path, 1))?;
    let raw = read_pairs(path, &text, '-')?;
    Alignment::new(source, target, raw, corpus).map_err(core_err(path, 0))
}

/// NP annotation file: optional header `#\t<version>` (otherwise the file
/// name up to the first `.`), then `<verse-id>\t<start:end ...>` with
/// half-open ranges.
pub fn read_np_annotation(path: &Path, corpus: &ParallelCorpus) -> LoadResult<NpAnnotation> {
    let text = read(path)?;
    let name = match header(&text) {
        Some(fields) if fields.len() == 1 => fields[0].clone(),
        Some(_) => return Err(parse_err(path, 1, "header must name exactly one version")),
        None => file_stem(path),
    };
    let version = VersionId::parse(&name).map_err(core_err(path, 1))?;
    let raw = read_pairs(path, &text, ':')?;
    NpAnnotation::new(version, raw, corpus).map_err(core_err(path, 0))
}

/// UniMorph TSV: `lemma\tform\tfeat;feat;...`, extra columns ignored.
pub fn parse_unimorph(path: &Path) -> LoadResult<Vec<ParadigmEntry>> {
    let text = read(path)?;
    lines(&text)
        .map(|(n, line)| {
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() < 3 || cols[..3].iter().any(|c| c.is_empty()) {
                return Err(parse_err(path, n, "expected lemma\\tform\\tfeatures"));
            }
            Ok(ParadigmEntry {
                lemma: cols[0].to_string(),
                form: cols[1].to_string(),
                features: cols[2].split(';').map(str::to_string).collect(),
            })
        })
        .collect()
}

/// Grams from a marker file (first column) or a silver file (one per
/// line). A `gram` header line is skipped.
pub fn read_gram_file(path: &Path) -> LoadResult<BTreeSet<String>> {
    let text = read(path)?;
    let mut out = BTreeSet::new();
    for (n, line) in lines(&text) {
        let gram = line.split('\t').next().unwrap_or_default();
        if n == 1 && gram == "gram" {
            continue;
        }
        if !gram.ends_with(casemark_core::BOUNDARY) || gram.chars().count() < 2 {
            return Err(parse_err(path, n, format!("{gram:?} is not a boundary-terminated gram")));
        }
        out.insert(gram.to_string());
    }
    Ok(out)
}

/// Every `<lang>.<ext>` gram file in `dir`, keyed by language.
pub fn read_gram_dir(dir: &Path, extension: &str) -> LoadResult<BTreeMap<String, BTreeSet<String>>> {
    expand(dir, &[extension])?.into_iter().map(|p| Ok((file_stem(&p), read_gram_file(&p)?))).collect()
}
