//! Example generation and the line-oriented dataset file format.
//!
//! A record is `database hits`, each a bit string written most significant
//! channel first, so channel `i` of an `N`-bit record is character `N - 1 - i`.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::training::{Dataset, TrainingExample};

/// RNG streams of the generator. Distinct from the trainer's streams.
const ORDER_STREAM: u64 = 10;
const RULE_STREAM: u64 = 11;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorRule {
    /// `hits = database AND mask`.
    MaskAnd { mask: Vec<bool> },
    /// Explicit `database -> hits` rows, used in order.
    FixedMap { table: Vec<(Vec<bool>, Vec<bool>)> },
    /// A seeded random hits pattern per database pattern.
    RandomRule,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub rule: GeneratorRule,
    pub count: usize,
    pub n: usize,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_CHANNELS {
            return Err(Error::Config(format!("dataset.n: {} outside 1..={MAX_CHANNELS}", self.n)));
        }
        if self.count == 0 {
            return Err(Error::Config("dataset.count: must be at least 1".into()));
        }
        match &self.rule {
            GeneratorRule::MaskAnd { mask } if mask.len() != self.n => Err(Error::Config(format!(
                "dataset.mask: has {} bits but dataset.n = {}",
                mask.len(),
                self.n
            ))),
            GeneratorRule::FixedMap { table } => {
                if table.is_empty() {
                    return Err(Error::Config("dataset.table: is empty".into()));
                }
                for (i, (d, h)) in table.iter().enumerate() {
                    if d.len() != self.n || h.len() != self.n {
                        return Err(Error::Config(format!(
                            "dataset.table: row {} is not {} bits wide",
                            i + 1,
                            self.n
                        )));
                    }
                    if table[..i].iter().any(|(e, _)| e == d) {
                        return Err(Error::Config(format!(
                            "dataset.table: database {} listed twice",
                            format_bits(d)
                        )));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Widest database the generators enumerate.
pub const MAX_CHANNELS: usize = 16;

fn pattern(index: usize, n: usize) -> Vec<bool> {
    (0..n).map(|b| index >> b & 1 == 1).collect()
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Examples drawn by cycling a seeded permutation of the `2^n` databases
/// (rows of the table for `FixedMap`); `count ≤ 2^n` therefore gives distinct databases.
pub fn gen_dataset(spec: &GeneratorSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let n = spec.n;
    if let GeneratorRule::FixedMap { table } = &spec.rule {
        return table
            .iter()
            .cycle()
            .take(spec.count)
            .map(|(d, h)| TrainingExample::new(d.clone(), h.clone()))
            .collect();
    }
    let mut order: Vec<usize> = (0..1usize << n).collect();
    order.shuffle(&mut stream(seed, ORDER_STREAM));
    let random_hits: Vec<Vec<bool>> = match spec.rule {
        GeneratorRule::RandomRule => {
            let mut rng = stream(seed, RULE_STREAM);
            (0..1usize << n).map(|_| (0..n).map(|_| rng.gen()).collect()).collect()
        }
        _ => Vec::new(),
    };
    order
        .iter()
        .cycle()
        .take(spec.count)
        .map(|&d| {
            let database = pattern(d, n);
            let hits = match &spec.rule {
                GeneratorRule::MaskAnd { mask } => database.iter().zip(mask).map(|(a, b)| a & b).collect(),
                GeneratorRule::RandomRule => random_hits[d].clone(),
                GeneratorRule::FixedMap { .. } => unreachable!(),
            };
            TrainingExample::new(database, hits)
        })
        .collect()
}

/// Whether `example` obeys `rule`. Random rules are checked against a regenerated map.
pub fn satisfies(spec: &GeneratorSpec, seed: u64, example: &TrainingExample) -> bool {
    match &spec.rule {
        GeneratorRule::MaskAnd { mask } => example
            .database
            .iter()
            .zip(mask)
            .map(|(a, b)| a & b)
            .eq(example.hits.iter().copied()),
        GeneratorRule::FixedMap { table } => table
            .iter()
            .any(|(d, h)| *d == example.database && *h == example.hits),
        GeneratorRule::RandomRule => {
            let full = GeneratorSpec {
                rule: GeneratorRule::RandomRule,
                count: 1 << spec.n,
                n: spec.n,
            };
            gen_dataset(&full, seed)
                .map(|all| all.contains(example))
                .unwrap_or(false)
        }
    }
}

/// Bit string, most significant channel first.
pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().rev().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Inverse of [`format_bits`]; `None` unless `text` is a non-empty 0/1 string.
pub fn parse_bits(text: &str) -> Option<Vec<bool>> {
    if text.is_empty() {
        return None;
    }
    text.chars()
        .rev()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

pub fn format_dataset(dataset: &[TrainingExample]) -> String {
    let mut out = String::from("# database hits (most significant channel first)\n");
    for e in dataset {
        writeln!(out, "{} {}", format_bits(&e.database), format_bits(&e.hits)).unwrap();
    }
    out
}

pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let record = raw.split('#').next().unwrap_or("").trim();
        if record.is_empty() {
            continue;
        }
        let fields: Vec<&str> = record.split_whitespace().collect();
        let bad = |message: String| Error::Parse { line, message };
        let [d, h] = fields[..] else {
            return Err(bad(format!("expected `database hits`, got `{record}`")));
        };
        let database = parse_bits(d).ok_or_else(|| bad(format!("`{d}` is not a bit string")))?;
        let hits = parse_bits(h).ok_or_else(|| bad(format!("`{h}` is not a bit string")))?;
        if let Some(first) = out.first().map(|e: &TrainingExample| e.database.len()) {
            if database.len() != first {
                return Err(bad(format!("record is {} bits wide, earlier records {first}", database.len())));
            }
        }
        out.push(TrainingExample::new(database, hits).map_err(|e| bad(e.to_string()))?);
    }
    if out.is_empty() {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            message: "no records".into(),
        });
    }
    Ok(out)
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_dataset(&text)
}

pub fn write_dataset(path: &Path, dataset: &[TrainingExample]) -> Result<()> {
    std::fs::write(path, format_dataset(dataset)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
