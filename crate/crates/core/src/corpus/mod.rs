//! The seed proof library, the proofless training dataset, and SFT extraction.

mod generate;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::kernel::{Kernel, ParseError, Proof, Statement, DEFAULT_STEP_BUDGET};
use crate::seed;

pub use generate::{
    generate_benchmark, generate_recorded_dataset, generate_seed_corpus, generate_theorems, generate_unproved_dataset, random_theorem,
    Benchmark, BenchmarkSpec, BENCHMARK_CORPUS_DIR, BENCHMARK_DATASET, BENCHMARK_DIFFICULTY, MAX_GENERATOR_STEPS,
};

pub const DEFAULT_PER_PAIR_CAP: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{line}: {source}", path.display())]
    Parse { path: PathBuf, line: usize, source: ParseError },
    #[error("{}:{line}: {message}", path.display())]
    Format { path: PathBuf, line: usize, message: String },
}

impl CorpusError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io { path: path.to_path_buf(), source }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremEntry {
    pub name: String,
    pub statement: Statement,
    pub proof: Option<Proof>,
    pub file_id: String,
    pub position: usize,
}

impl TheoremEntry {
    pub fn to_line(&self) -> String {
        let proof = self.proof.as_ref().map(Proof::canonical_text).unwrap_or_else(|| "sorry".into());
        format!("theorem {} : {} := {}", self.name, self.statement.canonical_text(), proof)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusFile {
    pub id: String,
    pub theorems: Vec<TheoremEntry>,
}

/// A proof library; files are kept sorted by id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Corpus {
    pub files: Vec<CorpusFile>,
}

impl Corpus {
    pub fn theorems(&self) -> impl Iterator<Item = &TheoremEntry> {
        self.files.iter().flat_map(|f| f.theorems.iter())
    }

    pub fn len(&self) -> usize {
        self.files.iter().map(|f| f.theorems.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(file name, contents)` pairs in the on-disk line format.
    pub fn to_files(&self) -> Vec<(String, String)> {
        self.files
            .iter()
            .map(|f| {
                let body: String = f.theorems.iter().map(|t| t.to_line() + "\n").collect();
                (format!("{}.txt", f.id), body)
            })
            .collect()
    }

    pub fn write_dir(&self, dir: &Path) -> Result<(), CorpusError> {
        fs::create_dir_all(dir).map_err(|e| CorpusError::io(dir, e))?;
        for (name, body) in self.to_files() {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| CorpusError::io(&path, e))?;
        }
        Ok(())
    }

    /// Reads every `*.txt` file in `dir`. Recorded proofs are re-verified.
    pub fn read_dir(kernel: &Kernel, dir: &Path) -> Result<Corpus, CorpusError> {
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| CorpusError::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "txt"))
            .collect();
        paths.sort();
        let mut names = HashSet::new();
        let mut files = Vec::new();
        for path in paths {
            let text = fs::read_to_string(&path).map_err(|e| CorpusError::io(&path, e))?;
            let id = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let mut theorems = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let entry = parse_theorem_line(kernel, line, &id, theorems.len())
                    .map_err(|e| e.at(&path, i + 1))?;
                if !names.insert(entry.name.clone()) {
                    return Err(CorpusError::Format {
                        path,
                        line: i + 1,
                        message: format!("duplicate theorem name {}", entry.name),
                    });
                }
                theorems.push(entry);
            }
            files.push(CorpusFile { id, theorems });
        }
        Ok(Corpus { files })
    }
}

enum LineError {
    Parse(ParseError),
    Format(String),
}

impl LineError {
    fn at(self, path: &Path, line: usize) -> CorpusError {
        let path = path.to_path_buf();
        match self {
            LineError::Parse(source) => CorpusError::Parse { path, line, source },
            LineError::Format(message) => CorpusError::Format { path, line, message },
        }
    }
}

fn parse_theorem_line(kernel: &Kernel, line: &str, file_id: &str, position: usize) -> Result<TheoremEntry, LineError> {
    let rest = line
        .strip_prefix("theorem ")
        .ok_or_else(|| LineError::Format("expected `theorem <name> : <statement> := <proof>`".into()))?;
    let (name, rest) = rest.split_once(" : ").ok_or_else(|| LineError::Format("missing ` : `".into()))?;
    let (statement, proof) = rest.split_once(" := ").ok_or_else(|| LineError::Format("missing ` := `".into()))?;
    let name = name.trim();
    if name.is_empty() || name.contains(char::is_whitespace) {
        return Err(LineError::Format(format!("bad theorem name `{name}`")));
    }
    let statement = kernel.parse_statement(statement).map_err(LineError::Parse)?;
    let proof = match proof.trim() {
        "sorry" => None,
        text => {
            let proof = kernel.parse_proof(text).map_err(LineError::Parse)?;
            let outcome = kernel.verify(&statement, &proof, DEFAULT_STEP_BUDGET);
            if !outcome.is_verified() {
                return Err(LineError::Format(format!("recorded proof of {name} does not verify: {}", outcome.verdict)));
            }
            Some(proof)
        }
    };
    Ok(TheoremEntry { name: name.to_string(), statement, proof, file_id: file_id.to_string(), position })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProverSftExample {
    pub statement: Statement,
    pub proof: Proof,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjecturerSftExample {
    pub lemma: String,
    pub theorem_x: TheoremEntry,
    pub theorem_y: TheoremEntry,
}

/// Every proved statement, in (file id, position) order.
pub fn extract_prover_sft(corpus: &Corpus) -> Vec<ProverSftExample> {
    let mut files: Vec<&CorpusFile> = corpus.files.iter().collect();
    files.sort_by(|a, b| a.id.cmp(&b.id));
    let mut out = Vec::new();
    for file in files {
        let mut theorems: Vec<&TheoremEntry> = file.theorems.iter().collect();
        theorems.sort_by_key(|t| t.position);
        for t in theorems {
            if let Some(proof) = &t.proof {
                out.push(ProverSftExample { statement: t.statement.clone(), proof: proof.clone() });
            }
        }
    }
    out
}

/// `(lemma, X, Y)` with X before Y in one file and the lemma used by both
/// proofs, at most `per_pair_cap` tuples per (file, lemma).
pub fn extract_conjecturer_sft(corpus: &Corpus, per_pair_cap: usize, seed: u64) -> Vec<ConjecturerSftExample> {
    assert!(per_pair_cap >= 1, "per_pair_cap must be at least 1");
    let mut files: Vec<&CorpusFile> = corpus.files.iter().collect();
    files.sort_by(|a, b| a.id.cmp(&b.id));
    let mut out = Vec::new();
    for file in files {
        let mut proved: Vec<(&TheoremEntry, _)> = file
            .theorems
            .iter()
            .filter_map(|t| t.proof.as_ref().map(|p| (t, p.rule_names())))
            .collect();
        proved.sort_by_key(|(t, _)| t.position);

        let mut by_lemma: BTreeMap<&str, Vec<(usize, usize)>> = BTreeMap::new();
        for (i, (_, xs)) in proved.iter().enumerate() {
            for (j, (_, ys)) in proved.iter().enumerate().skip(i + 1) {
                for lemma in xs.intersection(ys) {
                    by_lemma.entry(lemma.as_str()).or_default().push((i, j));
                }
            }
        }
        for (lemma, pairs) in by_lemma {
            let keep: Vec<(usize, usize)> = if pairs.len() > per_pair_cap {
                let mut rng = seed::rng(seed, &[seed::label(&file.id), seed::label(lemma)]);
                let mut picked = index::sample(&mut rng, pairs.len(), per_pair_cap).into_vec();
                picked.sort_unstable();
                picked.into_iter().map(|k| pairs[k]).collect()
            } else {
                pairs
            };
            out.extend(keep.into_iter().map(|(i, j)| ConjecturerSftExample {
                lemma: lemma.to_string(),
                theorem_x: proved[i].0.clone(),
                theorem_y: proved[j].0.clone(),
            }));
        }
    }
    out
}

/// Which dataset a proofless statement came from; matching weights are per source.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    #[default]
    Main,
    Valid,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Main => "main",
            Source::Valid => "valid",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetStatement {
    pub statement: Statement,
    pub source: Source,
}

/// Parses one statement per line, merging duplicates by canonical text.
pub fn parse_unproved_dataset(kernel: &Kernel, text: &str, source: Source, path: &Path) -> Result<Vec<DatasetStatement>, CorpusError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let statement = kernel
            .parse_statement(line)
            .map_err(|source| CorpusError::Parse { path: path.to_path_buf(), line: i + 1, source })?;
        if seen.insert(statement.canonical_text()) {
            out.push(DatasetStatement { statement, source });
        }
    }
    Ok(out)
}

pub fn load_unproved_dataset(kernel: &Kernel, path: &Path, source: Source) -> Result<Vec<DatasetStatement>, CorpusError> {
    let text = fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
    parse_unproved_dataset(kernel, &text, source, path)
}

pub fn dataset_to_text<'a>(statements: impl IntoIterator<Item = &'a Statement>) -> String {
    statements.into_iter().map(|s| s.canonical_text() + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(name: &str, position: usize, stmt: &str, proof: Option<&str>) -> TheoremEntry {
        let k = Kernel::standard();
        TheoremEntry {
            name: name.into(),
            statement: k.parse_statement(stmt).unwrap(),
            proof: proof.map(|p| k.parse_proof(p).unwrap()),
            file_id: "f".into(),
            position,
        }
    }

    fn lemma_file() -> Corpus {
        Corpus {
            files: vec![CorpusFile {
                id: "f".into(),
                theorems: vec![
                    entry("t1", 0, "(a + b) = (b + a)", Some("rw add_comm at L []; refl")),
                    entry("t2", 1, "(a * 1) = a", Some("rw mul_one at L []; refl")),
                    entry("t3", 2, "(c + d) = (d + c)", Some("rw add_comm at R []; refl")),
                ],
            }],
        }
    }

    #[test]
    fn prover_sft_skips_proofless_entries() {
        let mut corpus = lemma_file();
        assert_eq!(extract_prover_sft(&corpus).len(), 3);
        corpus.files[0].theorems[1].proof = None;
        let examples = extract_prover_sft(&corpus);
        assert_eq!(examples.len(), 2);
        assert_eq!(examples[1].statement.canonical_text(), "(c + d) = (d + c)");
    }

    #[test]
    fn conjecturer_sft_pairs() {
        let out = extract_conjecturer_sft(&lemma_file(), DEFAULT_PER_PAIR_CAP, 0);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].lemma, "add_comm");
        assert_eq!(out[0].theorem_x.name, "t1");
        assert_eq!(out[0].theorem_y.name, "t3");
    }

    #[test]
    fn conjecturer_sft_cap() {
        let theorems = (0..4)
            .map(|i| entry(&format!("t{i}"), i, &format!("({} + 0) = {}", "abcd".as_bytes()[i] as char, "abcd".as_bytes()[i] as char), Some("rw add_zero at L []; refl")))
            .collect();
        let corpus = Corpus { files: vec![CorpusFile { id: "f".into(), theorems }] };
        assert_eq!(extract_conjecturer_sft(&corpus, 8, 0).len(), 6);
        let capped = extract_conjecturer_sft(&corpus, 2, 0);
        assert_eq!(capped.len(), 2);
        assert_eq!(capped, extract_conjecturer_sft(&corpus, 2, 0));
        assert!(capped.iter().all(|e| e.theorem_x.position < e.theorem_y.position));
    }

    #[test]
    fn dataset_dedup() {
        let k = Kernel::standard();
        let text = "(a + 0) = a\n(a+0)=a\n(b * 1) = b\n\n(a + 0) = a\n";
        let out = parse_unproved_dataset(k, text, Source::Main, Path::new("x")).unwrap();
        assert_eq!(out.len(), 2);
        assert!(parse_unproved_dataset(k, "", Source::Main, Path::new("x")).unwrap().is_empty());
        let err = parse_unproved_dataset(k, "a = a\n(a + ) = a\n", Source::Main, Path::new("x")).unwrap_err();
        assert!(matches!(err, CorpusError::Parse { line: 2, .. }));
        let again = parse_unproved_dataset(k, &dataset_to_text(out.iter().map(|d| &d.statement)), Source::Main, Path::new("x")).unwrap();
        assert_eq!(again, out);
    }

    #[test]
    fn directory_round_trip() {
        let k = Kernel::standard();
        let mut corpus = generate_seed_corpus(k, 5, 3, 4, (1, 4)).unwrap();
        corpus.files[1].theorems[2].proof = None;
        let dir = tempfile::tempdir().unwrap();
        corpus.write_dir(dir.path()).unwrap();
        assert_eq!(Corpus::read_dir(k, dir.path()).unwrap(), corpus);
    }

    #[test]
    fn unverified_recorded_proof_is_rejected() {
        let k = Kernel::standard();
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("f.txt"), "theorem t : (a + 0) = a := refl\n").unwrap();
        assert!(matches!(Corpus::read_dir(k, dir.path()), Err(CorpusError::Format { line: 1, .. })));
    }
}
