//! JSON document model for experiments and CLI inputs.
//!
//! Conventions: complex numbers are `[re, im]` pairs, matrices are row-major
//! nested arrays, boundary points are either `[re, im]` (affine) or the
//! string `"inf"`. Generator maps are serialized as JSON objects and read in
//! sorted name order, so generator indexing is deterministic.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cocycle::{
    BoundaryMap, Cocycle, FiniteGammaSpace, GroupPresentation, TableEntry, TwistMap, Word,
};
use crate::error::{Error, Result};
use crate::invariant::Partition;
use crate::projflag::{veronese, CompleteFlag, GroupElement, ProjPoint};
use crate::rigidity::{Branch, Trivialization};

type JsonMatrix = Vec<Vec<[f64; 2]>>;

fn matrix_from_json(rows: &JsonMatrix, what: &str) -> Result<DMatrix<Complex64>> {
    let nr = rows.len();
    if nr == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(Error::InvalidInput(format!(
            "{what}: matrix rows must be nonempty and of equal length"
        )));
    }
    let nc = rows[0].len();
    Ok(DMatrix::from_fn(nr, nc, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

fn matrix_to_json(m: &DMatrix<Complex64>) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

/// A boundary point: affine `[re, im]` or `"inf"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Infinity(String),
    Affine([f64; 2]),
}

impl PointSpec {
    pub fn to_point(&self) -> Result<ProjPoint> {
        match self {
            PointSpec::Affine([re, im]) => ProjPoint::from_affine(Complex64::new(*re, *im)),
            PointSpec::Infinity(s) if s == "inf" => Ok(ProjPoint::infinity()),
            PointSpec::Infinity(s) => Err(Error::InvalidInput(format!(
                "unknown point literal {s:?}; use [re, im] or \"inf\""
            ))),
        }
    }

    pub fn from_point(p: &ProjPoint) -> PointSpec {
        if p.y().norm() < 1e-15 {
            PointSpec::Infinity("inf".into())
        } else {
            let z = p.x() / p.y();
            PointSpec::Affine([z.re, z.im])
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PresentationDoc {
    /// Generator name → 2×2 matrix.
    pub generators: BTreeMap<String, JsonMatrix>,
    pub relators: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceDoc {
    pub points: Vec<String>,
    pub weights: Vec<f64>,
    /// Generator name → permutation (image index per point).
    pub action: BTreeMap<String, Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CocycleDoc {
    /// One of `sym-power`, `representation`, `block`, `table`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugate: Option<bool>,
    /// Optional twist applied after construction, one matrix per point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<Vec<JsonMatrix>>,
    /// For `kind = representation`: generator name → n×n matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representation: Option<BTreeMap<String, JsonMatrix>>,
    /// For `kind = table`: generator name → one n×n matrix per point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<BTreeMap<String, Vec<JsonMatrix>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableEntryDoc {
    pub xi: PointSpec,
    /// Point name in `space.points`.
    pub x: String,
    pub flag: JsonMatrix,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryMapDoc {
    /// One of `veronese`, `twisted-veronese`, `block`, `table`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugate: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<Vec<JsonMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<TableEntryDoc>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EstimatorDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// `vol_m`: a plain number, or a regular-ideal-tetrahedron count that is
/// converted to k·ν₃ at load time (the constant is always recomputed from
/// the dilogarithm, never stored).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VolumeDoc {
    Tetrahedra { regular_tetrahedra: usize },
    Number(f64),
}

/// The on-disk experiment document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentDocument {
    pub n: usize,
    pub presentation: PresentationDoc,
    pub space: SpaceDoc,
    pub cocycle: CocycleDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_map: Option<BoundaryMapDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<EstimatorDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vol_m: Option<VolumeDoc>,
}

/// A fully validated experiment, ready to run.
pub struct LoadedExperiment {
    pub n: usize,
    pub presentation: Arc<GroupPresentation>,
    pub space: Arc<FiniteGammaSpace>,
    pub cocycle: Cocycle,
    pub boundary: Option<BoundaryMap>,
    pub partition: Option<Partition>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    /// Vol(M), with tetrahedron counts already converted to k·ν₃.
    pub vol_m: Option<f64>,
}

fn twist_from_json(mats: &[JsonMatrix], space_len: usize, n: usize) -> Result<TwistMap> {
    if mats.len() != space_len {
        return Err(Error::InvalidInput(format!(
            "twist lists {} matrices for {space_len} points",
            mats.len()
        )));
    }
    let elems = mats
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let m = matrix_from_json(m, &format!("twist[{i}]"))?;
            if m.nrows() != n {
                return Err(Error::DimensionMismatch(format!(
                    "twist[{i}] is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            GroupElement::new(m)
        })
        .collect::<Result<Vec<_>>>()?;
    TwistMap::new(elems)
}

/// Build and validate the full experiment from a parsed document.
pub fn load_experiment_doc(doc: &ExperimentDocument) -> Result<LoadedExperiment> {
    if doc.n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let generators = doc
        .presentation
        .generators
        .iter()
        .map(|(name, m)| {
            let m = matrix_from_json(m, &format!("generator {name:?}"))?;
            Ok((name.clone(), GroupElement::new(m)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let relators = doc
        .presentation
        .relators
        .iter()
        .map(|r| Word::parse(r))
        .collect::<Result<Vec<_>>>()?;
    let presentation = Arc::new(GroupPresentation::new(generators, relators)?);

    for name in doc.space.action.keys() {
        if presentation.generator_names().iter().all(|g| g != name) {
            return Err(Error::UnknownGenerator(name.clone()));
        }
    }
    let perms = presentation
        .generator_names()
        .iter()
        .map(|name| {
            let p = doc.space.action.get(name).ok_or_else(|| {
                Error::InvalidInput(format!("space.action is missing generator {name:?}"))
            })?;
            Ok((name.clone(), p.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let space = Arc::new(FiniteGammaSpace::new(
        &presentation,
        doc.space.points.clone(),
        doc.space.weights.clone(),
        perms,
    )?);

    let partition = doc
        .partition
        .as_ref()
        .map(|p| Partition::new(p.clone()))
        .transpose()?;

    let mut cocycle = match doc.cocycle.kind.as_str() {
        "sym-power" => Cocycle::from_sym_power(presentation.clone(), space.clone(), doc.n)?,
        "block" => {
            let p = partition.as_ref().ok_or_else(|| {
                Error::InvalidInput("cocycle kind \"block\" needs a partition".into())
            })?;
            crate::invariant::block_cocycle(presentation.clone(), space.clone(), p)?
        }
        "representation" => {
            let rep = doc.cocycle.representation.as_ref().ok_or_else(|| {
                Error::InvalidInput(
                    "cocycle kind \"representation\" needs a representation map".into(),
                )
            })?;
            let rho = presentation
                .generator_names()
                .iter()
                .map(|name| {
                    let m = rep.get(name).ok_or_else(|| {
                        Error::InvalidInput(format!("representation is missing generator {name:?}"))
                    })?;
                    GroupElement::new(matrix_from_json(m, &format!("representation {name:?}"))?)
                })
                .collect::<Result<Vec<_>>>()?;
            Cocycle::from_representation(presentation.clone(), space.clone(), rho)?
        }
        "table" => {
            let tab = doc.cocycle.table.as_ref().ok_or_else(|| {
                Error::InvalidInput("cocycle kind \"table\" needs a table".into())
            })?;
            let table = presentation
                .generator_names()
                .iter()
                .map(|name| {
                    let row = tab.get(name).ok_or_else(|| {
                        Error::InvalidInput(format!("cocycle table is missing generator {name:?}"))
                    })?;
                    row.iter()
                        .enumerate()
                        .map(|(x, m)| {
                            GroupElement::new(matrix_from_json(
                                m,
                                &format!("cocycle table {name:?}[{x}]"),
                            )?)
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Cocycle::new(presentation.clone(), space.clone(), table)?
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown cocycle kind {other:?}; expected sym-power, block, representation or table"
            )));
        }
    };
    if cocycle.n() != doc.n {
        return Err(Error::DimensionMismatch(format!(
            "cocycle dimension {} does not match document n = {}",
            cocycle.n(),
            doc.n
        )));
    }
    if doc.cocycle.conjugate.unwrap_or(false) {
        cocycle = cocycle.conjugated();
    }
    if let Some(t) = &doc.cocycle.twist {
        cocycle = cocycle.twist(&twist_from_json(t, space.len(), doc.n)?)?;
    }

    let boundary = match &doc.boundary_map {
        None => None,
        Some(b) => {
            let conjugate = b.conjugate.unwrap_or(false);
            Some(match b.kind.as_str() {
                "veronese" => BoundaryMap::Veronese {
                    n: doc.n,
                    conjugate,
                },
                "twisted-veronese" => {
                    let t = b.twist.as_ref().ok_or_else(|| {
                        Error::InvalidInput(
                            "boundary kind \"twisted-veronese\" needs a twist".into(),
                        )
                    })?;
                    BoundaryMap::TwistedVeronese {
                        twist: twist_from_json(t, space.len(), doc.n)?,
                        conjugate,
                    }
                }
                "block" => {
                    let p = partition.as_ref().ok_or_else(|| {
                        Error::InvalidInput("boundary kind \"block\" needs a partition".into())
                    })?;
                    BoundaryMap::Block {
                        sizes: p.parts().to_vec(),
                    }
                }
                "table" => {
                    let entries = b.entries.as_ref().ok_or_else(|| {
                        Error::InvalidInput("boundary kind \"table\" needs entries".into())
                    })?;
                    let entries = entries
                        .iter()
                        .enumerate()
                        .map(|(i, e)| {
                            Ok(TableEntry {
                                xi: e.xi.to_point()?,
                                x: space.point_index(&e.x)?,
                                flag: CompleteFlag::new(matrix_from_json(
                                    &e.flag,
                                    &format!("table entry {i}"),
                                )?)?,
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    BoundaryMap::Table { entries }
                }
                other => {
                    return Err(Error::InvalidInput(format!(
                        "unknown boundary map kind {other:?}; expected veronese, twisted-veronese, block or table"
                    )));
                }
            })
        }
    };
    if let Some(b) = &boundary {
        if b.n()? != doc.n {
            return Err(Error::DimensionMismatch(format!(
                "boundary map dimension {} does not match document n = {}",
                b.n()?,
                doc.n
            )));
        }
    }

    let vol_m = doc.vol_m.as_ref().map(|v| match v {
        VolumeDoc::Number(x) => *x,
        VolumeDoc::Tetrahedra { regular_tetrahedra } => {
            *regular_tetrahedra as f64 * crate::dilog::nu3()
        }
    });
    if let Some(v) = vol_m {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidInput(format!(
                "vol_m must be positive, got {v}"
            )));
        }
    }

    Ok(LoadedExperiment {
        n: doc.n,
        presentation,
        space,
        cocycle,
        boundary,
        partition,
        samples: doc.estimator.as_ref().and_then(|e| e.samples),
        seed: doc.estimator.as_ref().and_then(|e| e.seed),
        vol_m,
    })
}

pub fn parse_experiment(json: &str) -> Result<LoadedExperiment> {
    let doc: ExperimentDocument = serde_json::from_str(json)
        .map_err(|e| Error::InvalidInput(format!("document parse error: {e}")))?;
    load_experiment_doc(&doc)
}

pub fn load_experiment(path: &Path) -> Result<LoadedExperiment> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_experiment(&text)
}

/// Input of `eval-borel`: four explicit flag bases, or four boundary points
/// whose Veronese flags are evaluated.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalBorelInput {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flags: Option<Vec<JsonMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<PointSpec>>,
}

pub fn parse_eval_input(json: &str) -> Result<(usize, [CompleteFlag; 4])> {
    let doc: EvalBorelInput = serde_json::from_str(json)
        .map_err(|e| Error::InvalidInput(format!("input parse error: {e}")))?;
    if doc.n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let flags: Vec<CompleteFlag> = match (&doc.flags, &doc.points) {
        (Some(flags), None) => {
            if flags.len() != 4 {
                return Err(Error::InvalidInput(format!(
                    "eval-borel needs exactly 4 flags, got {}",
                    flags.len()
                )));
            }
            flags
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let m = matrix_from_json(m, &format!("flag {i}"))?;
                    if m.nrows() != doc.n {
                        return Err(Error::DimensionMismatch(format!(
                            "flag {i} is {}x{}, expected {0}x{0} for n = {0}",
                            doc.n,
                            m.nrows()
                        )));
                    }
                    CompleteFlag::new(m).map_err(|e| Error::InvalidInput(format!("flag {i}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?
        }
        (None, Some(points)) => {
            if points.len() != 4 {
                return Err(Error::InvalidInput(format!(
                    "eval-borel needs exactly 4 points, got {}",
                    points.len()
                )));
            }
            points
                .iter()
                .map(|p| Ok(veronese(&p.to_point()?, doc.n)))
                .collect::<Result<Vec<_>>>()?
        }
        _ => {
            return Err(Error::InvalidInput(
                "eval-borel input needs either \"flags\" or \"points\", not both".into(),
            ));
        }
    };
    let flags: [CompleteFlag; 4] = flags.try_into().expect("length checked above");
    Ok((doc.n, flags))
}

/// Serialize an estimator report for `--output`.
pub fn estimator_report_json(
    r: &crate::invariant::EstimatorReport,
    vol_m: Option<f64>,
) -> serde_json::Value {
    let beta = vol_m.map(|v| r.lambda_hat * v);
    serde_json::json!({
        "n": r.n,
        "lambda_hat": r.lambda_hat,
        "std_error": r.std_error,
        "samples": r.samples,
        "seed": r.seed,
        "workers": r.workers,
        "integrand_min": r.integrand_min,
        "integrand_max": r.integrand_max,
        "max_deviation": r.max_deviation,
        "bound": r.bound,
        "maximal": r.maximal_verdict,
        "heuristic": r.heuristic,
        "equivariance_residual": r.equivariance_residual,
        "vol_m": vol_m,
        "beta_hat": beta,
    })
}

/// Serialize a trivialization (the recovered f table and diagnostics) for
/// `--output`.
pub fn trivialization_json(
    t: &Trivialization,
    space: &FiniteGammaSpace,
    gens: &[String],
) -> serde_json::Value {
    let f: Vec<serde_json::Value> = (0..t.f.len())
        .map(|x| {
            serde_json::json!({
                "x": space.point_name(x),
                "matrix": matrix_to_json(t.f.get(x).matrix()),
            })
        })
        .collect();
    let slices: Vec<serde_json::Value> = t
        .slices
        .iter()
        .map(|s| {
            serde_json::json!({
                "x": space.point_name(s.x),
                "residual": s.residual,
                "sv_gap": s.sv_gap,
            })
        })
        .collect();
    let deviations: serde_json::Map<String, serde_json::Value> = gens
        .iter()
        .zip(&t.deviations)
        .map(|(g, row)| (g.clone(), serde_json::json!(row)))
        .collect();
    serde_json::json!({
        "branch": match t.branch { Branch::Plain => "plain", Branch::Conjugated => "conjugated" },
        "residual": t.residual,
        "f": f,
        "slices": slices,
        "deviations": deviations,
    })
}

/// Build the document for one bundled experiment (also used by the data
/// generator example).
pub fn matrix_doc(m: &DMatrix<Complex64>) -> JsonMatrix {
    matrix_to_json(m)
}
