use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use super::family::FamilyDescriptor;
use super::map::{PointMap, SlidingBlockCode};
use super::verify::AcoeBundle;
use super::AcoeError;
use crate::cocycles::{CocycleError, LocallyConstantFn, PotentialCocycle, SumKind};
use crate::sft::{Direction, MatrixError, ShiftSystem, Symbol, TransitionMatrix};

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed bundle: {0}")]
    Syntax(String),
    #[error("{context}: {source}")]
    Matrix { context: String, source: MatrixError },
    #[error("{context}: {source}")]
    Table { context: String, source: CocycleError },
    #[error("{context}: {source}")]
    Map { context: String, source: AcoeError },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleDoc {
    source: SystemDoc,
    target: SystemDoc,
    #[serde(default)]
    h: Vec<MapDoc>,
    #[serde(default)]
    h_inv: Vec<MapDoc>,
    c1: FnDoc,
    c2: FnDoc,
    #[serde(default)]
    d1: Option<CocycleDoc>,
    #[serde(default)]
    d2: Option<CocycleDoc>,
    #[serde(default)]
    family: Option<FamilyDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemDoc {
    matrix: Option<Vec<Vec<u8>>>,
    matrix_file: Option<String>,
    #[serde(default)]
    direction: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "kebab-case")]
enum MapDoc {
    Identity,
    Reversal,
    Shift {
        power: i64,
    },
    Block {
        #[serde(default)]
        memory: usize,
        #[serde(default)]
        anticipation: usize,
        target: Option<Vec<Vec<u8>>>,
        target_file: Option<String>,
        rule: BTreeMap<String, Symbol>,
    },
    HigherBlock {
        block: usize,
    },
    HigherBlockInverse {
        block: usize,
        base: Option<Vec<Vec<u8>>>,
        base_file: Option<String>,
    },
    SiteSwap {
        site: i64,
        a: Symbol,
        b: Symbol,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FnDoc {
    constant: Option<i64>,
    radius: Option<usize>,
    table: Option<BTreeMap<String, i64>>,
    table_file: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CocycleDoc {
    #[serde(default)]
    sum: Option<String>,
    #[serde(flatten)]
    potential: FnDoc,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyDoc {
    radius: Option<u32>,
    tails: Option<u32>,
    periods: Option<u32>,
}

/// A parsed bundle and the family bounds it requests, if any.
#[derive(Debug, Clone)]
pub struct LoadedBundle {
    pub bundle: AcoeBundle,
    pub radius: Option<u32>,
    pub tails: Option<u32>,
    pub periods: Option<u32>,
}

impl LoadedBundle {
    /// Bounds from the bundle, falling back to `defaults` field by field.
    pub fn descriptor(&self, defaults: FamilyDescriptor) -> FamilyDescriptor {
        FamilyDescriptor {
            radius: self.radius.unwrap_or(defaults.radius),
            tails: self.tails.unwrap_or(defaults.tails),
            periods: self.periods.unwrap_or(defaults.periods),
        }
    }
}

pub fn load_bundle(path: &Path) -> Result<LoadedBundle, BundleError> {
    let text = read(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_bundle(&text, &base)
}

/// Parses bundle text; relative file references resolve against `base_dir`.
pub fn parse_bundle(text: &str, base_dir: &Path) -> Result<LoadedBundle, BundleError> {
    let doc: BundleDoc = toml::from_str(text).map_err(|e| BundleError::Syntax(e.to_string()))?;
    let ctx = Ctx {
        base: base_dir.to_path_buf(),
    };

    let source = ctx.system(&doc.source, "source")?;
    let target = ctx.system(&doc.target, "target")?;
    let h = ctx.chain(&doc.h, &source.matrix, &source.matrix, "h")?;
    let h_inv = ctx.chain(&doc.h_inv, &target.matrix, &source.matrix, "h_inv")?;
    let c1 = ctx.function(&doc.c1, &source.matrix, "c1")?;
    let c2 = ctx.function(&doc.c2, &target.matrix, "c2")?;
    let d1 = ctx.cocycle(doc.d1.as_ref(), &source.matrix, "d1")?;
    let d2 = ctx.cocycle(doc.d2.as_ref(), &target.matrix, "d2")?;
    let bundle = AcoeBundle::new(source, target, h, h_inv, c1, c2, d1, d2).map_err(|source| BundleError::Map {
        context: "bundle".into(),
        source,
    })?;
    let family = doc.family.unwrap_or(FamilyDoc {
        radius: None,
        tails: None,
        periods: None,
    });
    if family.tails == Some(0) || family.periods == Some(0) {
        return Err(BundleError::Invalid("family tails and periods must be positive".into()));
    }
    Ok(LoadedBundle {
        bundle,
        radius: family.radius,
        tails: family.tails,
        periods: family.periods,
    })
}

fn read(path: &Path) -> Result<String, BundleError> {
    std::fs::read_to_string(path).map_err(|e| BundleError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

struct Ctx {
    base: PathBuf,
}

impl Ctx {
    fn matrix(
        &self,
        inline: Option<&Vec<Vec<u8>>>,
        file: Option<&String>,
        context: &str,
    ) -> Result<Option<TransitionMatrix>, BundleError> {
        let wrap = |source| BundleError::Matrix {
            context: context.to_string(),
            source,
        };
        match (inline, file) {
            (Some(_), Some(_)) => Err(BundleError::Invalid(format!(
                "{context}: give an inline matrix or a file, not both"
            ))),
            (Some(rows), None) => TransitionMatrix::new(rows).map(Some).map_err(wrap),
            (None, Some(f)) => TransitionMatrix::parse(&read(&self.base.join(f))?)
                .map(Some)
                .map_err(wrap),
            (None, None) => Ok(None),
        }
    }

    fn system(&self, doc: &SystemDoc, context: &str) -> Result<ShiftSystem, BundleError> {
        let matrix = self
            .matrix(doc.matrix.as_ref(), doc.matrix_file.as_ref(), context)?
            .ok_or_else(|| BundleError::Invalid(format!("{context}: a matrix is required")))?;
        let direction = match doc.direction.as_deref() {
            None | Some("forward") => Direction::Forward,
            Some("inverse") => Direction::Inverse,
            Some(other) => {
                return Err(BundleError::Invalid(format!(
                    "{context}: direction must be `forward` or `inverse`, found `{other}`"
                )))
            }
        };
        Ok(ShiftSystem::new(matrix, direction))
    }

    /// Builds the composite map; `docs[last]` acts first on `domain`.
    fn chain(
        &self,
        docs: &[MapDoc],
        domain: &TransitionMatrix,
        default_base: &TransitionMatrix,
        name: &str,
    ) -> Result<PointMap, BundleError> {
        let mut maps = Vec::with_capacity(docs.len());
        let mut current = domain.clone();
        for (i, doc) in docs.iter().enumerate().rev() {
            let context = format!("{name}[{i}]");
            let map_err = |source| BundleError::Map {
                context: context.clone(),
                source,
            };
            let map = match doc {
                MapDoc::Identity => PointMap::Identity,
                MapDoc::Reversal => PointMap::Reversal,
                MapDoc::Shift { power } => PointMap::Shift(*power),
                MapDoc::Block {
                    memory,
                    anticipation,
                    target,
                    target_file,
                    rule,
                } => {
                    let target = self
                        .matrix(target.as_ref(), target_file.as_ref(), &context)?
                        .unwrap_or_else(|| current.clone());
                    let mut table = BTreeMap::new();
                    for (word, image) in rule {
                        let parsed = word
                            .split(',')
                            .map(|t| t.trim().parse::<Symbol>())
                            .collect::<Result<Vec<_>, _>>()
                            .map_err(|_| BundleError::Invalid(format!("{context}: bad rule word `{word}`")))?;
                        table.insert(parsed, *image);
                    }
                    PointMap::Block(
                        SlidingBlockCode::new(current.clone(), target, *memory, *anticipation, table)
                            .map_err(map_err)?,
                    )
                }
                MapDoc::HigherBlock { block } => {
                    if *block == 0 {
                        return Err(BundleError::Invalid(format!(
                            "{context}: block length must be positive"
                        )));
                    }
                    PointMap::Block(SlidingBlockCode::higher_block(&current, *block).0)
                }
                MapDoc::HigherBlockInverse { block, base, base_file } => {
                    if *block == 0 {
                        return Err(BundleError::Invalid(format!(
                            "{context}: block length must be positive"
                        )));
                    }
                    let base = self
                        .matrix(base.as_ref(), base_file.as_ref(), &context)?
                        .unwrap_or_else(|| default_base.clone());
                    PointMap::Block(SlidingBlockCode::higher_block(&base, *block).1)
                }
                MapDoc::SiteSwap { site, a, b } => PointMap::site_swap(&current, *site, *a, *b).map_err(map_err)?,
            };
            current = map.codomain(&current).map_err(|source| BundleError::Map {
                context: context.clone(),
                source,
            })?;
            maps.push(map);
        }
        maps.reverse();
        Ok(match maps.len() {
            0 => PointMap::Identity,
            1 => maps.pop().unwrap(),
            _ => PointMap::Compose(maps),
        })
    }

    fn function(
        &self,
        doc: &FnDoc,
        matrix: &TransitionMatrix,
        context: &str,
    ) -> Result<LocallyConstantFn, BundleError> {
        let wrap = |source| BundleError::Table {
            context: context.to_string(),
            source,
        };
        match (doc.constant, &doc.table, &doc.table_file) {
            (Some(v), None, None) => {
                if doc.radius.is_some_and(|r| r != 0) {
                    return Err(BundleError::Invalid(format!("{context}: a constant takes no radius")));
                }
                Ok(LocallyConstantFn::constant(v))
            }
            (None, Some(table), None) => {
                let radius = doc
                    .radius
                    .ok_or_else(|| BundleError::Invalid(format!("{context}: a table needs a radius")))?;
                let mut parsed = BTreeMap::new();
                for (word, v) in table {
                    let w = word
                        .split(',')
                        .map(|t| t.trim().parse::<Symbol>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|_| BundleError::Invalid(format!("{context}: bad table word `{word}`")))?;
                    parsed.insert(w, *v);
                }
                LocallyConstantFn::new(matrix, radius, parsed).map_err(wrap)
            }
            (None, None, Some(file)) => {
                if doc.radius.is_some() {
                    return Err(BundleError::Invalid(format!(
                        "{context}: the radius of a table file is read from the file"
                    )));
                }
                LocallyConstantFn::parse(&read(&self.base.join(file))?, matrix).map_err(wrap)
            }
            _ => Err(BundleError::Invalid(format!(
                "{context}: give exactly one of `constant`, `table` or `table_file`"
            ))),
        }
    }

    fn cocycle(
        &self,
        doc: Option<&CocycleDoc>,
        matrix: &TransitionMatrix,
        context: &str,
    ) -> Result<PotentialCocycle, BundleError> {
        let Some(doc) = doc else {
            return Ok(PotentialCocycle::zero());
        };
        let sum = match doc.sum.as_deref() {
            None | Some("forward") => SumKind::Forward,
            Some("bilateral") => SumKind::Bilateral,
            Some(other) => {
                return Err(BundleError::Invalid(format!(
                    "{context}: sum must be `forward` or `bilateral`, found `{other}`"
                )))
            }
        };
        Ok(PotentialCocycle::new(
            self.function(&doc.potential, matrix, context)?,
            sum,
        ))
    }
}
