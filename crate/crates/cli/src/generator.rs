//! Generator spec files and named presets.

use std::path::Path;

use serde::{Deserialize, Serialize};

use patcx::rotation::{code, IrrationalAngle, RotationCodingSpec, RotationSpecFile};
use patcx::seqcore::{parse_bits, SequenceSource};
use patcx::toeplitz::{generate, HolePolicy, SimpleToeplitzSpec, ToeplitzSpec, ToeplitzSpecFile};
use patcx::witnesses::{
    block_doubling, block_doubling_defect, cofinite, growing_runs, powers_of_two, powers_plus_index, progression,
    squares,
};
use patcx::{Error, Result, RotationSpec};

/// A sequence description, as stored in a JSON spec file.
///
/// ```json
/// {"rotation": {"alpha": {"cf": [0], "repeat": [1]}, "cells": [...]}}
/// {"toeplitz": {"periods": {"list": [3], "ratio": 3}, "rule": {...}}}
/// {"cofinite": [0, 1, 2, 3, 5, 9, 10]}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorSpec {
    Rotation(RotationSpecFile),
    Toeplitz {
        #[serde(flatten)]
        file: ToeplitzSpecFile,
        #[serde(default)]
        hole_policy: HolePolicy,
    },
    SimpleToeplitz {
        #[serde(flatten)]
        spec: SimpleToeplitzSpec,
        #[serde(default)]
        hole_policy: HolePolicy,
    },
    Constant(u8),
    EventuallyPeriodic { prefix: String, period: String },
    /// Indicator of the naturals outside the list.
    Cofinite(Vec<usize>),
    /// Indicator of `residue + k·step`.
    Progression { residue: u64, step: u64 },
    /// A literal finite prefix.
    Bits(String),
    /// Block-doubling sequence coded by `x′(i) = [x[i, i + N) = 0^N]`.
    DefectCode { block_len: usize, horizon: usize },
    Preset(String),
}

pub const PRESETS: &[(&str, &str)] = &[
    ("fibonacci", "rotation by the golden angle, I1 = [0, α)"),
    ("golden-closed", "rotation by the golden angle, I0 = [0, α] closed"),
    ("golden-complement-closed", "rotation by (3 − √5)/2, I0 = [0, α] closed"),
    ("silver-closed", "rotation by √2 − 1, I0 = [0, α] closed"),
    ("ternary-toeplitz", "Toeplitz with periods 3^k, hole at 0, fills 0 then 1"),
    ("alternating-toeplitz", "simple Toeplitz with periods 2^k, hole 0, letters 1, 0, 1, …"),
    ("powers-of-two", "1s at 2^k"),
    ("powers-plus-index", "1s at 2^k + k"),
    ("squares", "1s at k^2"),
    ("block-doubling", "limit of w_{k+1} = w_k 0^k w_k"),
    ("block-doubling-defect", "block doubling coded by 00-blocks"),
    ("growing-runs", "0 1 00 11 000 111 …"),
    ("cofinite-example", "1s everywhere except 0, 1, 2, 3, 5, 9, 10"),
];

/// A built sequence plus what is needed to describe and re-derive it.
#[derive(Clone)]
pub struct Generated {
    pub source: SequenceSource,
    pub spec: GeneratorSpec,
    pub rotation: Option<RotationSpec>,
    pub toeplitz: Option<ToeplitzSpec>,
}

impl Generated {
    fn plain(source: SequenceSource, spec: &GeneratorSpec) -> Self {
        Generated { source, spec: spec.clone(), rotation: None, toeplitz: None }
    }

    /// Deepest Toeplitz level read by the first `len` bits.
    pub fn depth_consumed(&self, len: usize) -> Result<Option<usize>> {
        self.toeplitz.as_ref().map(|t| t.depth_consumed(len)).transpose()
    }
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<Generated> {
        Ok(match self {
            GeneratorSpec::Rotation(file) => {
                let spec = RotationSpec::from_file(file)?;
                Generated { source: code(&spec), spec: self.clone(), rotation: Some(spec), toeplitz: None }
            }
            GeneratorSpec::Toeplitz { file, hole_policy } => {
                let spec = ToeplitzSpec::from_file(file)?;
                Generated {
                    source: generate(&spec, *hole_policy),
                    spec: self.clone(),
                    rotation: None,
                    toeplitz: Some(spec),
                }
            }
            GeneratorSpec::SimpleToeplitz { spec, hole_policy } => {
                let spec = SimpleToeplitzSpec::new(spec.periods.clone(), spec.letters.clone(), spec.holes.clone())?
                    .to_spec()?;
                Generated {
                    source: generate(&spec, *hole_policy),
                    spec: self.clone(),
                    rotation: None,
                    toeplitz: Some(spec),
                }
            }
            GeneratorSpec::Constant(b) => match b {
                0 | 1 => Generated::plain(SequenceSource::constant(*b == 1), self),
                _ => return Err(Error::InvalidSpec(format!("constant must be 0 or 1, got {b}"))),
            },
            GeneratorSpec::EventuallyPeriodic { prefix, period } => {
                Generated::plain(SequenceSource::eventually_periodic(prefix, period)?, self)
            }
            GeneratorSpec::Cofinite(excluded) => Generated::plain(cofinite(excluded), self),
            GeneratorSpec::Progression { residue, step } => {
                if *step == 0 {
                    return Err(Error::InvalidSpec("progression step must be positive".into()));
                }
                Generated::plain(progression(*residue, *step), self)
            }
            GeneratorSpec::Bits(bits) => Generated::plain(SequenceSource::from_bit_str(bits)?, self),
            GeneratorSpec::DefectCode { block_len, horizon } => {
                Generated::plain(block_doubling_defect(*block_len, *horizon)?.source, self)
            }
            GeneratorSpec::Preset(name) => return preset(name),
        })
    }
}

/// Build a named preset; the returned spec is the preset's expanded form
/// where one exists.
pub fn preset(name: &str) -> Result<Generated> {
    let rotation = |spec: RotationSpec| -> Generated {
        Generated {
            source: code(&spec),
            spec: GeneratorSpec::Rotation(spec.to_file()),
            rotation: Some(spec),
            toeplitz: None,
        }
    };
    let named = |source: SequenceSource| Generated::plain(source, &GeneratorSpec::Preset(name.to_string()));
    Ok(match name {
        "fibonacci" => rotation(RotationCodingSpec::fibonacci()),
        "golden-closed" => rotation(RotationCodingSpec::closed_initial(IrrationalAngle::golden())),
        "golden-complement-closed" => rotation(RotationCodingSpec::closed_initial(IrrationalAngle::golden_complement())),
        "silver-closed" => rotation(RotationCodingSpec::closed_initial(IrrationalAngle::silver())),
        "ternary-toeplitz" => {
            let spec = ToeplitzSpec::ternary_example();
            GeneratorSpec::Toeplitz { file: spec.to_file(), hole_policy: HolePolicy::default() }.build()?
        }
        "alternating-toeplitz" => GeneratorSpec::SimpleToeplitz {
            spec: SimpleToeplitzSpec::lemma_instance()?,
            hole_policy: HolePolicy::Bit(false),
        }
        .build()?,
        "powers-of-two" => named(powers_of_two()),
        "powers-plus-index" => named(powers_plus_index()),
        "squares" => named(squares()),
        "block-doubling" => named(block_doubling()),
        "block-doubling-defect" => GeneratorSpec::DefectCode { block_len: 2, horizon: 1 << 20 }.build()?,
        "growing-runs" => named(growing_runs()),
        "cofinite-example" => GeneratorSpec::Cofinite(vec![0, 1, 2, 3, 5, 9, 10]).build()?,
        _ => {
            let known: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
            return Err(Error::InvalidSpec(format!("unknown preset {name:?}; known presets: {}", known.join(", "))));
        }
    })
}

/// `--spec` accepts inline JSON, a path to a JSON file, or a preset name.
pub fn resolve_spec(arg: &str) -> Result<Generated> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        return parse_spec(trimmed)?.build();
    }
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        return parse_spec(&text)?.build();
    }
    preset(arg)
}

pub fn parse_spec(text: &str) -> Result<GeneratorSpec> {
    serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))
}

/// A `.bits` file read back as a finite source.
pub fn load_prefix_file(path: &Path) -> Result<SequenceSource> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    let tape = parse_bits(&text)?;
    if tape.is_empty() {
        return Err(Error::InvalidArgument(format!("{} holds no bits", path.display())));
    }
    Ok(SequenceSource::from_tape(tape, path.display().to_string()))
}

/// The `.bits` format: `#` header lines, then 64 bits per line.
pub fn render_bits_file(g: &Generated, len: usize) -> Result<String> {
    let tape = g.source.prefix(len)?;
    let spec = serde_json::to_string(&g.spec).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let mut out = String::new();
    out.push_str(&format!("# source: {}\n", g.source.label()));
    out.push_str(&format!("# spec: {spec}\n"));
    out.push_str(&format!("# length: {len}\n"));
    if let Some(d) = g.depth_consumed(len)? {
        out.push_str(&format!("# depth-consumed: {d}\n"));
    }
    let bits = tape.to_bit_string();
    for chunk in bits.as_bytes().chunks(64) {
        out.push_str(std::str::from_utf8(chunk).expect("ascii"));
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_builds() {
        for (name, _) in PRESETS {
            let g = preset(name).unwrap();
            g.source.prefix(64).unwrap();
        }
        assert!(preset("nope").is_err());
    }

    #[test]
    fn specs_round_trip_through_json() {
        for (name, _) in PRESETS {
            let g = preset(name).unwrap();
            let text = serde_json::to_string(&g.spec).unwrap();
            let again = parse_spec(&text).unwrap().build().unwrap();
            assert_eq!(again.source.prefix(300).unwrap(), g.source.prefix(300).unwrap(), "{name}");
        }
    }

    #[test]
    fn inline_json() {
        let g = resolve_spec(r#"{"cofinite": [0, 2]}"#).unwrap();
        assert_eq!(g.source.prefix(5).unwrap().to_bit_string(), "01011");
        assert!(resolve_spec(r#"{"constant": 2}"#).is_err());
        assert!(resolve_spec(r#"{"bogus": 1}"#).is_err());
    }
}
