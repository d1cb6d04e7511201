//! Shared fixtures for the criterion benchmarks.

use std::fs;
use std::path::Path;

use stp_core::corpus::{Benchmark, DatasetStatement, Source};
use stp_core::{Kernel, Proof, Statement};

fn data_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data"))
}

/// The bundled `statement := proof` pairs.
pub fn golden(kernel: &Kernel) -> Vec<(Statement, Proof)> {
    fs::read_to_string(data_dir().join("golden.txt"))
        .expect("golden file")
        .lines()
        .filter_map(|l| l.split_once(":="))
        .map(|(s, p)| (kernel.parse_statement(s.trim()).unwrap(), kernel.parse_proof(p.trim()).unwrap()))
        .collect()
}

pub fn benchmark(kernel: &Kernel) -> Benchmark {
    Benchmark::read_dir(kernel, &data_dir().join("benchmark")).expect("bundled benchmark")
}

pub fn dataset(bench: &Benchmark) -> Vec<DatasetStatement> {
    bench.dataset.iter().map(|(s, _)| DatasetStatement { statement: s.clone(), source: Source::Main }).collect()
}
