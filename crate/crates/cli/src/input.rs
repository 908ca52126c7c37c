use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use bandlimited_up::random::{random_coeffs, rng_from_seed};
use bandlimited_up::CoeffVec;
use clap::{Args, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    /// Random vectors with zero alternating sum.
    Admissible,
    /// Random vectors without the projection.
    Raw,
}

/// Where the functions under test come from. Defaults to the two-sample
/// demo `f(0) = f(1) = 1`.
#[derive(Debug, Args)]
pub struct InputArgs {
    /// JSON file holding one coefficient vector or an array of them.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["inline", "generate"])]
    pub input: Option<PathBuf>,

    /// Coefficient vector(s) as a JSON string.
    #[arg(long, value_name = "JSON", conflicts_with = "generate")]
    pub inline: Option<String>,

    /// Draw seeded random vectors instead of reading them.
    #[arg(long, value_enum)]
    pub generate: Option<Generator>,

    /// Support size of generated vectors.
    #[arg(long, default_value_t = 11)]
    pub dim: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Number of generated vectors.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(CoeffVec),
    Many(Vec<CoeffVec>),
}

fn parse_vectors(text: &str, origin: &str) -> Result<Vec<CoeffVec>> {
    if text.trim().is_empty() {
        bail!("{origin} is empty");
    }
    let parsed: OneOrMany = serde_json::from_str(text).with_context(|| format!("cannot parse {origin}"))?;
    let list = match parsed {
        OneOrMany::One(f) => vec![f],
        OneOrMany::Many(v) => v,
    };
    if list.is_empty() {
        bail!("{origin} contains no coefficient vectors");
    }
    Ok(list)
}

pub fn demo() -> CoeffVec {
    CoeffVec::from_real(0, &[1.0, 1.0]).expect("demo vector is valid")
}

impl InputArgs {
    pub fn load(&self) -> Result<Vec<CoeffVec>> {
        if let Some(path) = &self.input {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            return parse_vectors(&text, &path.display().to_string());
        }
        if let Some(text) = &self.inline {
            return parse_vectors(text, "inline input");
        }
        if let Some(kind) = self.generate {
            if self.count == 0 {
                bail!("--count must be at least 1");
            }
            let mut rng = rng_from_seed(self.seed);
            return (0..self.count)
                .map(|_| Ok(random_coeffs(&mut rng, self.dim, kind == Generator::Admissible)?))
                .collect();
        }
        Ok(vec![demo()])
    }
}
