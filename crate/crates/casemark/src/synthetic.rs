//! Seeded generator for a small planted-suffix fixture.
//!
//! Languages: two English editions (`eng-a`, `eng-b`) carrying NP
//! annotations, a suffixing language `sfx` and an isolating language `iso`.
//! In `sfx` every noun inside an NP ends in `um` (subject) or `ibus`
//! (oblique), and verbs end in `nt`. Outside NPs there are particles ending
//! in many different `Xm` and `Xbus` sequences, none of them frequent on its
//! own, so that `m$`, `s$`, `us$` and `bus$` are about as common outside NPs
//! as inside. Exactly five verb types exist, which keeps `nt$` at the
//! frequency threshold without making it significant. Uninflected
//! adjectives inside NPs and adverbs outside them share a pool of endings,
//! so their final grams are frequent but carry no signal.
//!
//! The corpus is small, so the frequency threshold is rescaled: the
//! generated config sets `theta_reference = 9700`, giving
//! `theta' = max(5, round(97 * |I_l| / 9700))`, which is 5 here.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::output::write_file;

#[derive(Debug, Clone)]
pub struct FixtureParams {
    pub seed: u64,
    pub verses: usize,
    pub noun_stems: usize,
    pub verbs: usize,
    /// Particle types per family (`Xm` and `Xbus`).
    pub particles: usize,
    /// Adjective types, all uninflected, drawn from the shared endings.
    pub adjectives: usize,
    /// Adverb types, drawn from the same endings as adjectives.
    pub adverbs: usize,
    /// Probability that an alignment link is dropped or misdirected.
    pub noise: f64,
}

impl Default for FixtureParams {
    fn default() -> Self {
        Self { seed: 7, verses: 500, noun_stems: 30, verbs: 5, particles: 45, adjectives: 48, adverbs: 72, noise: 0.03 }
    }
}

/// The suffixes planted on `sfx` nouns.
pub const PLANTED: [&str; 2] = ["ibus$", "um$"];

pub fn planted_gold() -> BTreeSet<String> {
    PLANTED.iter().map(|s| s.to_string()).collect()
}

const VOWELS: &[char] = &['a', 'e', 'o', 'u'];
const CONSONANTS: &[char] = &['b', 'd', 'f', 'g', 'k', 'l', 'm', 'n', 'p', 'r', 's', 't', 'v', 'x', 'z'];
/// Letters allowed right before a particle's `m` or `bus`.
const PARTICLE_LINKS: &[char] = &['a', 'e', 'o', 'y', 'l', 'r', 'n', 'k', 'p', 'd', 'g', 'h'];
/// Endings shared by uninflected adjectives (inside NPs) and adverbs (outside).
const SHARED_ENDINGS: &[&str] = &["or", "ax", "el", "on", "ik", "ed", "ug", "af"];

struct Vocabulary {
    noun_stems: Vec<String>,
    verb_stems: Vec<String>,
    m_particles: Vec<String>,
    bus_particles: Vec<String>,
    adjectives: Vec<String>,
    adverbs: Vec<String>,
    eng_nouns: Vec<String>,
    eng_verbs: Vec<String>,
    eng_particles: Vec<String>,
    eng_adjectives: Vec<String>,
    eng_adverbs: Vec<String>,
    iso_nouns: Vec<String>,
    iso_verbs: Vec<String>,
    iso_particles: Vec<String>,
    iso_adjectives: Vec<String>,
    iso_adverbs: Vec<String>,
}

fn syllables(rng: &mut ChaCha8Rng, n: usize) -> String {
    let mut s = String::new();
    for _ in 0..n {
        s.push(*CONSONANTS.choose(rng).unwrap());
        s.push(*VOWELS.choose(rng).unwrap());
    }
    s
}

/// `count` distinct words from `make`, skipping any in `taken`.
fn distinct(rng: &mut ChaCha8Rng, count: usize, taken: &mut BTreeSet<String>, mut make: impl FnMut(&mut ChaCha8Rng, usize) -> String) -> Vec<String> {
    let mut out = Vec::with_capacity(count);
    for attempt in 0.. {
        if out.len() == count {
            break;
        }
        assert!(attempt < 1_000_000, "vocabulary space too small for {count} words");
        let w = make(rng, out.len());
        if taken.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

impl Vocabulary {
    fn new(params: &FixtureParams, rng: &mut ChaCha8Rng) -> Self {
        let mut taken = BTreeSet::new();
        // final consonants cycle so no single `Xum`/`Xibus` ending is frequent
        let noun_stems = distinct(rng, params.noun_stems, &mut taken, |r, i| {
            let mut s = syllables(r, 1);
            s.push(CONSONANTS[i % CONSONANTS.len()]);
            s
        });
        let verb_stems = distinct(rng, params.verbs, &mut taken, |r, _| syllables(r, 2) + "a");
        let m_particles = distinct(rng, params.particles, &mut taken, |r, i| {
            let mut s = syllables(r, 1);
            s.push(*CONSONANTS.choose(r).unwrap());
            s.push(PARTICLE_LINKS[i % PARTICLE_LINKS.len()]);
            s.push('m');
            s
        });
        let bus_particles = distinct(rng, params.particles, &mut taken, |r, i| {
            let mut s = syllables(r, 1);
            s.push(*CONSONANTS.choose(r).unwrap());
            s.push(PARTICLE_LINKS[i % PARTICLE_LINKS.len()]);
            s + "bus"
        });
        let shared = |r: &mut ChaCha8Rng, i: usize| {
            let mut s = syllables(r, 1);
            s.push(*CONSONANTS.choose(r).unwrap());
            s + SHARED_ENDINGS[i % SHARED_ENDINGS.len()]
        };
        let adjectives = distinct(rng, params.adjectives, &mut taken, shared);
        let adverbs = distinct(rng, params.adverbs, &mut taken, shared);
        let mut eng = BTreeSet::new();
        let eng_nouns = distinct(rng, params.noun_stems, &mut eng, |r, _| syllables(r, 2) + "ing");
        let eng_verbs = distinct(rng, params.verbs, &mut eng, |r, _| syllables(r, 1) + "ed");
        let eng_particles = distinct(rng, 2 * params.particles, &mut eng, |r, _| syllables(r, 2) + "ly");
        let eng_adjectives = distinct(rng, params.adjectives, &mut eng, |r, _| syllables(r, 2) + "ous");
        let eng_adverbs = distinct(rng, params.adverbs, &mut eng, |r, _| syllables(r, 2) + "ward");
        let mut iso = BTreeSet::new();
        let iso_nouns = distinct(rng, params.noun_stems, &mut iso, |r, _| syllables(r, 2));
        let iso_verbs = distinct(rng, params.verbs, &mut iso, |r, _| syllables(r, 1));
        let iso_particles = distinct(rng, 2 * params.particles, &mut iso, |r, _| syllables(r, 2));
        let iso_adjectives = distinct(rng, params.adjectives, &mut iso, |r, _| syllables(r, 2));
        let iso_adverbs = distinct(rng, params.adverbs, &mut iso, |r, _| syllables(r, 2));
        Self {
            noun_stems,
            verb_stems,
            m_particles,
            bus_particles,
            adjectives,
            adverbs,
            eng_nouns,
            eng_verbs,
            eng_particles,
            eng_adjectives,
            eng_adverbs,
            iso_nouns,
            iso_verbs,
            iso_particles,
            iso_adjectives,
            iso_adverbs,
        }
    }
}

/// One abstract verse: which lexemes fill its slots.
struct Plan {
    subject: usize,
    object: usize,
    verb: usize,
    m_particle: usize,
    bus_particle: usize,
    subject_adjective: Option<usize>,
    object_adjective: Option<usize>,
    adverb: usize,
}

/// Slot kinds, in English order.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Subject,
    Verb,
    Object,
    MParticle,
    BusParticle,
    Adverb,
    SubjectAdjective,
    ObjectAdjective,
}

const ENGLISH_ORDER: [Slot; 6] =
    [Slot::Subject, Slot::Verb, Slot::Object, Slot::MParticle, Slot::BusParticle, Slot::Adverb];

fn adjective_of(plan: &Plan, slot: Slot) -> Option<(Slot, usize)> {
    match slot {
        Slot::Subject => plan.subject_adjective.map(|a| (Slot::SubjectAdjective, a)),
        Slot::Object => plan.object_adjective.map(|a| (Slot::ObjectAdjective, a)),
        _ => None,
    }
}

struct Rendered {
    tokens: Vec<String>,
    /// Token index of each slot's content word.
    heads: Vec<(Slot, usize)>,
    /// Half-open NP spans.
    nps: Vec<(usize, usize)>,
}

fn render_english(plan: &Plan, v: &Vocabulary, determiner: &str) -> Rendered {
    let mut tokens = Vec::new();
    let mut heads = Vec::new();
    let mut nps = Vec::new();
    for slot in ENGLISH_ORDER {
        match slot {
            Slot::Subject | Slot::Object => {
                let noun = if slot == Slot::Subject { plan.subject } else { plan.object };
                let start = tokens.len();
                tokens.push(determiner.to_string());
                if let Some((adj_slot, a)) = adjective_of(plan, slot) {
                    heads.push((adj_slot, tokens.len()));
                    tokens.push(v.eng_adjectives[a].clone());
                }
                heads.push((slot, tokens.len()));
                tokens.push(v.eng_nouns[noun].clone());
                nps.push((start, tokens.len()));
            }
            Slot::Verb => {
                heads.push((slot, tokens.len()));
                tokens.push(v.eng_verbs[plan.verb].clone());
            }
            Slot::MParticle => {
                heads.push((slot, tokens.len()));
                tokens.push(v.eng_particles[plan.m_particle].clone());
            }
            Slot::BusParticle => {
                heads.push((slot, tokens.len()));
                tokens.push(v.eng_particles[v.m_particles.len() + plan.bus_particle].clone());
            }
            Slot::Adverb => {
                heads.push((slot, tokens.len()));
                tokens.push(v.eng_adverbs[plan.adverb].clone());
            }
            Slot::SubjectAdjective | Slot::ObjectAdjective => unreachable!(),
        }
    }
    Rendered { tokens, heads, nps }
}

fn render_target(plan: &Plan, v: &Vocabulary, order: &[Slot], suffixing: bool) -> Rendered {
    let mut tokens = Vec::new();
    let mut heads = Vec::new();
    for &slot in order {
        if let Some((adj_slot, a)) = adjective_of(plan, slot) {
            heads.push((adj_slot, tokens.len()));
            tokens.push(if suffixing { v.adjectives[a].clone() } else { v.iso_adjectives[a].clone() });
        }
        heads.push((slot, tokens.len()));
        let word = match (slot, suffixing) {
            (Slot::Subject, true) => format!("{}um", v.noun_stems[plan.subject]),
            (Slot::Object, true) => format!("{}ibus", v.noun_stems[plan.object]),
            (Slot::Verb, true) => format!("{}nt", v.verb_stems[plan.verb]),
            (Slot::MParticle, true) => v.m_particles[plan.m_particle].clone(),
            (Slot::BusParticle, true) => v.bus_particles[plan.bus_particle].clone(),
            (Slot::Subject, false) => v.iso_nouns[plan.subject].clone(),
            (Slot::Object, false) => v.iso_nouns[plan.object].clone(),
            (Slot::Verb, false) => v.iso_verbs[plan.verb].clone(),
            (Slot::MParticle, false) => v.iso_particles[plan.m_particle].clone(),
            (Slot::BusParticle, false) => v.iso_particles[v.m_particles.len() + plan.bus_particle].clone(),
            (Slot::Adverb, true) => v.adverbs[plan.adverb].clone(),
            (Slot::Adverb, false) => v.iso_adverbs[plan.adverb].clone(),
            (Slot::SubjectAdjective | Slot::ObjectAdjective, _) => unreachable!(),
        };
        tokens.push(word);
    }
    Rendered { tokens, heads, nps: Vec::new() }
}

fn head_of(r: &Rendered, slot: Slot) -> usize {
    r.heads.iter().find(|(s, _)| *s == slot).map(|(_, i)| *i).unwrap()
}

/// Content-word links with noise: a link is dropped or pointed at a random
/// target token with probability `noise` each.
fn links(src: &Rendered, tgt: &Rendered, noise: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for &(slot, i) in &src.heads {
        let j = head_of(tgt, slot);
        let roll: f64 = rng.gen();
        if roll < noise {
            continue;
        } else if roll < 2.0 * noise {
            out.push((i, rng.gen_range(0..tgt.tokens.len())));
        } else {
            out.push((i, j));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn pairs(links: &[(usize, usize)], sep: char) -> String {
    links.iter().map(|(a, b)| format!("{a}{sep}{b}")).collect::<Vec<_>>().join(" ")
}

/// Paths of a written fixture.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub root: PathBuf,
    pub config: PathBuf,
}

/// Writes the fixture under `root` together with `casemark.toml`.
pub fn generate(root: &Path, params: &FixtureParams) -> anyhow::Result<Fixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let vocab = Vocabulary::new(params, &mut rng);
    let target_orders: [[Slot; 6]; 3] = [
        [Slot::Subject, Slot::Object, Slot::Verb, Slot::MParticle, Slot::BusParticle, Slot::Adverb],
        [Slot::MParticle, Slot::Subject, Slot::Adverb, Slot::Verb, Slot::Object, Slot::BusParticle],
        [Slot::Adverb, Slot::Object, Slot::BusParticle, Slot::Subject, Slot::MParticle, Slot::Verb],
    ];

    let editions = [("eng-a", "the"), ("eng-b", "this")];
    let targets = [("sfx-a", true), ("iso-a", false)];
    let mut verse_files: Vec<String> = vec![String::new(); editions.len() + targets.len()];
    let mut np_files: Vec<String> = editions.iter().map(|(e, _)| format!("#\t{e}\n")).collect();
    let mut align_files: Vec<String> = Vec::new();
    for (e, _) in editions {
        for (t, _) in targets {
            align_files.push(format!("#\t{e}\t{t}\n"));
        }
    }

    for n in 0..params.verses {
        let id = format!("{:03}{:03}", 1 + n / 100, n % 100 + 1);
        let plan = Plan {
            subject: rng.gen_range(0..params.noun_stems),
            object: rng.gen_range(0..params.noun_stems),
            verb: rng.gen_range(0..params.verbs),
            m_particle: rng.gen_range(0..params.particles),
            bus_particle: rng.gen_range(0..params.particles),
            subject_adjective: rng.gen_bool(0.5).then(|| rng.gen_range(0..params.adjectives)),
            object_adjective: rng.gen_bool(0.5).then(|| rng.gen_range(0..params.adjectives)),
            adverb: rng.gen_range(0..params.adverbs),
        };
        let order = target_orders.choose(&mut rng).unwrap();
        let english: Vec<Rendered> = editions.iter().map(|(_, det)| render_english(&plan, &vocab, det)).collect();
        let rendered: Vec<Rendered> = targets.iter().map(|(_, sfx)| render_target(&plan, &vocab, order, *sfx)).collect();

        for (k, r) in english.iter().chain(&rendered).enumerate() {
            writeln!(verse_files[k], "{id}\t{}", r.tokens.join(" "))?;
        }
        for (k, e) in english.iter().enumerate() {
            let spans = e.nps.iter().map(|&(s, t)| format!("{s}:{t}")).collect::<Vec<_>>().join(" ");
            writeln!(np_files[k], "{id}\t{spans}")?;
            for (m, t) in rendered.iter().enumerate() {
                writeln!(align_files[k * targets.len() + m], "{id}\t{}", pairs(&links(e, t, params.noise, &mut rng), '-'))?;
            }
        }
    }

    for (k, name) in editions.iter().map(|(e, _)| *e).chain(targets.iter().map(|(t, _)| *t)).enumerate() {
        write_file(&root.join("verses").join(format!("{name}.txt")), &verse_files[k])?;
    }
    for (k, (e, _)) in editions.iter().enumerate() {
        write_file(&root.join("annotations").join(format!("{e}.np.tsv")), &np_files[k])?;
        for (m, (t, _)) in targets.iter().enumerate() {
            write_file(&root.join("alignments").join(format!("{e}__{t}.tsv")), &align_files[k * targets.len() + m])?;
        }
    }

    // paradigms: nouns with both cases twice over, plus verb rows to be filtered
    let mut um = String::new();
    for stem in &vocab.noun_stems {
        for (ending, feats) in [("um", "N;NOM;SG"), ("um", "N;ACC;SG"), ("ibus", "N;DAT;PL"), ("ibus", "N;ABL;PL")] {
            writeln!(um, "{stem}\t{stem}{ending}\t{feats}")?;
        }
    }
    for stem in &vocab.verb_stems {
        writeln!(um, "{stem}re\t{stem}nt\tV;IND;PRS;3;PL")?;
    }
    write_file(&root.join("unimorph").join("sfx.tsv"), &um)?;

    let config = root.join("casemark.toml");
    write_file(&config, FIXTURE_CONFIG)?;
    Ok(Fixture { root: root.to_path_buf(), config })
}

const FIXTURE_CONFIG: &str = r#"out = "out"
jobs = 2

[corpus]
verses = ["verses"]
alignments = ["alignments"]
annotations = ["annotations"]

[pipeline]
theta = 97
phi = 0.08
chi = 0.34
theta_reference = 9700

[silver]
unimorph = ["unimorph"]

[analysis]
languages = ["eng", "sfx", "iso"]
"#;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_bytes() {
        let a = tempfile::TempDir::new().unwrap();
        let b = tempfile::TempDir::new().unwrap();
        let params = FixtureParams { verses: 40, ..Default::default() };
        generate(a.path(), &params).unwrap();
        generate(b.path(), &params).unwrap();
        for rel in ["verses/sfx-a.txt", "alignments/eng-b__iso-a.tsv", "annotations/eng-a.np.tsv", "unimorph/sfx.tsv"] {
            assert_eq!(std::fs::read(a.path().join(rel)).unwrap(), std::fs::read(b.path().join(rel)).unwrap(), "{rel}");
        }
    }

    #[test]
    fn vocabulary_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = Vocabulary::new(&FixtureParams::default(), &mut rng);
        assert!(v.noun_stems.iter().all(|s| !s.ends_with('i') && !s.contains("ibu")));
        assert!(v.m_particles.iter().all(|p| p.ends_with('m') && !p.ends_with("um")));
        assert!(v.bus_particles.iter().all(|p| p.ends_with("bus") && !p.ends_with("ibus")));
        let shared = |w: &String| SHARED_ENDINGS.iter().any(|e| w.ends_with(e));
        assert!(v.adjectives.iter().chain(&v.adverbs).all(shared));
        let mut finals = std::collections::BTreeMap::new();
        for s in &v.noun_stems {
            *finals.entry(s.chars().last().unwrap()).or_insert(0) += 1;
        }
        assert!(finals.values().all(|&n| n < 5));
    }
}
