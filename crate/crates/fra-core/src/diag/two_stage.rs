//! Two-stage diagnosis: an EE-trained type model gates a CIW-trained joint
//! (type, degree) model.

use std::path::{Path, PathBuf};

use crate::data::{Connection, DecodedClass, FaultType, FraSweep, GridId, SchemeKind};
use crate::error::{Error, Result};
use crate::nn::{predict_one, SavedModel};

/// Final call of the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Healthy,
    Fault { fault_type: FaultType, degree: u8 },
}

/// Outcome of one diagnosis. Stage-2 probabilities are present only when
/// stage 1 flagged a fault.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnosis {
    pub verdict: Verdict,
    pub stage1_probs: Vec<f64>,
    pub stage2_probs: Option<Vec<f64>>,
    /// Set when stage 1 said fault but stage 2's top class was Normal; the
    /// verdict then carries stage 2's best non-normal class.
    pub conflict: bool,
}

/// The composed pipeline: stage 1 must be an EE-trained type model, stage 2
/// a CIW-trained joint model.
#[derive(Debug, Clone)]
pub struct TwoStagePipeline {
    pub stage1: SavedModel,
    pub stage2: SavedModel,
    pub grid_id: GridId,
}

impl TwoStagePipeline {
    pub fn new(stage1: SavedModel, stage2: SavedModel, grid_id: GridId) -> Result<Self> {
        if stage1.meta.connection != Some(Connection::Ee) {
            return Err(Error::domain("stage 1 must be trained on EE data"));
        }
        if stage2.meta.connection != Some(Connection::Ciw) {
            return Err(Error::domain("stage 2 must be trained on CIW data"));
        }
        let s1_kind = stage1.scheme()?.kind();
        if s1_kind != SchemeKind::Type {
            return Err(Error::domain("stage 1 must be a fault-type model"));
        }
        let s2_kind = stage2.scheme()?.kind();
        if s2_kind != SchemeKind::Joint {
            return Err(Error::domain("stage 2 must be a joint (type, degree) model"));
        }
        Ok(TwoStagePipeline {
            stage1,
            stage2,
            grid_id,
        })
    }

    fn model_probs(model: &SavedModel, sweep: &FraSweep) -> Result<Vec<f64>> {
        let x: Vec<f32> = sweep
            .values()
            .iter()
            .map(|&v| v / model.meta.input_scale)
            .collect();
        Ok(predict_one(&model.params, &model.spec, &x)?
            .into_iter()
            .map(|v| v as f64)
            .collect())
    }

    /// Runs the two-stage flow on a paired EE/CIW measurement of one
    /// winding. Stage 2 is only consulted when stage 1 flags a fault;
    /// stage 2's (type, degree) supersedes stage 1's type.
    pub fn diagnose(&self, ee: &FraSweep, ciw: &FraSweep) -> Result<Diagnosis> {
        if ee.grid_id() != self.grid_id || ciw.grid_id() != self.grid_id {
            return Err(Error::domain("sweep grid does not match the pipeline grid"));
        }
        let stage1_probs = Self::model_probs(&self.stage1, ee)?;
        let s1_class = argmax(&stage1_probs);
        if s1_class == 0 {
            return Ok(Diagnosis {
                verdict: Verdict::Healthy,
                stage1_probs,
                stage2_probs: None,
                conflict: false,
            });
        }
        let stage2_probs = Self::model_probs(&self.stage2, ciw)?;
        let scheme2 = self.stage2.scheme()?;
        let s2_class = argmax(&stage2_probs);
        let (class, conflict) = if s2_class == 0 {
            // Stages disagree; trust stage 2's fault ranking but flag it.
            let best_fault = stage2_probs
                .iter()
                .enumerate()
                .skip(1)
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(&a.0)))
                .map(|(i, _)| i)
                .expect("joint scheme has fault classes");
            (best_fault, true)
        } else {
            (s2_class, false)
        };
        let verdict = match scheme2.decode(class)? {
            DecodedClass::Fault {
                fault_type,
                degree: Some(degree),
            } => Verdict::Fault { fault_type, degree },
            _ => unreachable!("class > 0 in a joint scheme decodes to a degreed fault"),
        };
        Ok(Diagnosis {
            verdict,
            stage1_probs,
            stage2_probs: Some(stage2_probs),
            conflict,
        })
    }

    /// Shortcut for known-faulty units: consult only the stage-2 model.
    /// Returns the verdict and the stage-2 probabilities.
    pub fn diagnose_stage2_only(&self, ciw: &FraSweep) -> Result<(Verdict, Vec<f64>)> {
        if ciw.grid_id() != self.grid_id {
            return Err(Error::domain("sweep grid does not match the pipeline grid"));
        }
        let probs = Self::model_probs(&self.stage2, ciw)?;
        let class = argmax(&probs);
        let verdict = match self.stage2.scheme()?.decode(class)? {
            DecodedClass::Normal => Verdict::Healthy,
            DecodedClass::Fault {
                fault_type,
                degree: Some(degree),
            } => Verdict::Fault { fault_type, degree },
            DecodedClass::Fault { degree: None, .. } => {
                unreachable!("joint classes carry degrees")
            }
        };
        Ok((verdict, probs))
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// On-disk description of a pipeline: the two model paths, the grid
/// fingerprint, and optionally a fusion weight.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineManifest {
    pub stage1_path: PathBuf,
    pub stage2_path: PathBuf,
    pub grid_id: GridId,
    pub lambda: Option<f64>,
}

impl PipelineManifest {
    pub fn to_string_form(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("stage1 = {}\n", self.stage1_path.display()));
        out.push_str(&format!("stage2 = {}\n", self.stage2_path.display()));
        out.push_str(&format!("grid = {}\n", self.grid_id));
        if let Some(lambda) = self.lambda {
            out.push_str(&format!("lambda = {lambda:.6}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut stage1 = None;
        let mut stage2 = None;
        let mut grid = None;
        let mut lambda = None;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::domain(format!("manifest line without '=': {line:?}")))?;
            match key.trim() {
                "stage1" => stage1 = Some(PathBuf::from(value.trim())),
                "stage2" => stage2 = Some(PathBuf::from(value.trim())),
                "grid" => grid = Some(GridId::parse(value)?),
                "lambda" => {
                    lambda = Some(value.trim().parse::<f64>().map_err(|e| {
                        Error::domain(format!("bad lambda {value:?}: {e}"))
                    })?)
                }
                other => return Err(Error::domain(format!("unknown manifest key {other:?}"))),
            }
        }
        Ok(PipelineManifest {
            stage1_path: stage1.ok_or_else(|| Error::domain("manifest missing stage1"))?,
            stage2_path: stage2.ok_or_else(|| Error::domain("manifest missing stage2"))?,
            grid_id: grid.ok_or_else(|| Error::domain("manifest missing grid"))?,
            lambda,
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_string_form())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Loads both models, resolving relative paths against `base_dir`.
    pub fn load(&self, base_dir: &Path) -> Result<TwoStagePipeline> {
        let resolve = |p: &Path| {
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base_dir.join(p)
            }
        };
        let stage1 = crate::nn::load_model(resolve(&self.stage1_path))?;
        let stage2 = crate::nn::load_model(resolve(&self.stage2_path))?;
        TwoStagePipeline::new(stage1, stage2, self.grid_id)
    }
}

/// Structured-text form of a diagnosis: verdict, conflict flag, and
/// per-class probabilities of each consulted stage.
pub fn diagnosis_to_string(
    d: &Diagnosis,
    stage1_classes: &[String],
    stage2_classes: &[String],
) -> String {
    let mut out = String::new();
    match d.verdict {
        Verdict::Healthy => out.push_str("verdict = healthy\n"),
        Verdict::Fault { fault_type, degree } => {
            out.push_str("verdict = fault\n");
            out.push_str(&format!("fault_type = {fault_type}\n"));
            out.push_str(&format!("degree = {degree}\n"));
        }
    }
    out.push_str(&format!("conflict = {}\n", d.conflict));
    for (name, p) in stage1_classes.iter().zip(&d.stage1_probs) {
        out.push_str(&format!("stage1_p_{name} = {p:.6}\n"));
    }
    if let Some(probs) = &d.stage2_probs {
        for (name, p) in stage2_classes.iter().zip(probs) {
            out.push_str(&format!("stage2_p_{name} = {p:.6}\n"));
        }
    }
    out
}
