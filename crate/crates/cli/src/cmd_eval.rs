use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::Args;
use meshgcn_core::eval::{
    ced, icp_align, nme, uniform_thresholds, write_ced_csv, write_report_csv, IcpConfig,
    Normalizer, SampleReport, DEFAULT_CED_STEPS,
};
use meshgcn_core::kv::KvMap;
use meshgcn_core::obj::load_mesh_file;
use meshgcn_core::{CoreError, Result};

use crate::common::{load_config, require_path, resolve, resolve_or, resolve_path};

/// Score predicted meshes against ground truth.
///
/// Predictions and ground truth are directories of OBJ files paired by file
/// stem. Writes `report.csv` with one row per sample and, when `--ced` is
/// given, `ced.csv` with the cumulative error distribution over sample NMEs.
#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Directory of predicted OBJ meshes (required here or as config key `pred`)
    #[arg(long, value_name = "DIR")]
    pred: Option<PathBuf>,

    /// Directory of ground-truth OBJ meshes (required)
    #[arg(long, value_name = "DIR")]
    gt: Option<PathBuf>,

    /// Error normalizer: `bbox`, `diagonal`, or `interocular` [default: bbox]
    #[arg(long, value_name = "KIND")]
    normalizer: Option<String>,

    /// Rigidly align each prediction to its ground truth first [default: off]
    #[arg(long)]
    icp: bool,

    /// Emit ced.csv with this error cutoff [default: disabled]
    #[arg(long, value_name = "CUTOFF")]
    ced: Option<f64>,

    /// Threshold count of the CED grid [default: 512]
    #[arg(long, value_name = "N")]
    ced_steps: Option<usize>,

    /// `name = row` file labeling ground-truth vertices; needed by interocular
    #[arg(long, value_name = "PATH")]
    labels: Option<PathBuf>,

    /// Output directory, created if missing (required)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Flat `key = value` config file; flags override its entries [default: none]
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

/// Maps file stems to paths for every `.obj` directly inside `dir`.
fn obj_files(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let mut map = BTreeMap::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("obj") {
            continue;
        }
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| CoreError::invalid(format!("non-UTF-8 file name in {}", dir.display())))?
            .to_string();
        map.insert(stem, path);
    }
    if map.is_empty() {
        return Err(CoreError::invalid(format!(
            "no .obj files in {}",
            dir.display()
        )));
    }
    Ok(map)
}

fn check_paired(pred: &BTreeMap<String, PathBuf>, gt: &BTreeMap<String, PathBuf>) -> Result<()> {
    let pred_ids: BTreeSet<_> = pred.keys().collect();
    let gt_ids: BTreeSet<_> = gt.keys().collect();
    let only_pred: Vec<_> = pred_ids.difference(&gt_ids).take(3).collect();
    let only_gt: Vec<_> = gt_ids.difference(&pred_ids).take(3).collect();
    if only_pred.is_empty() && only_gt.is_empty() {
        return Ok(());
    }
    let mut parts = Vec::new();
    for id in only_pred {
        parts.push(format!("prediction {id} has no ground truth"));
    }
    for id in only_gt {
        parts.push(format!("ground truth {id} has no prediction"));
    }
    Err(CoreError::invalid(parts.join("; ")))
}

fn read_labels(path: &Path) -> Result<BTreeMap<String, usize>> {
    let kv = KvMap::parse_file(path)?;
    let mut labels = BTreeMap::new();
    for key in kv.keys() {
        let raw = kv.get(key).expect("listed key");
        let row: usize = raw
            .parse()
            .map_err(|e| CoreError::invalid(format!("label {key} = {raw:?}: {e}")))?;
        labels.insert(key.to_string(), row);
    }
    Ok(labels)
}

/// Re-wraps `err` with the sample id, keeping the variant (and exit code).
fn with_sample(err: CoreError, id: &str) -> CoreError {
    match err {
        CoreError::InvalidArgument(m) => CoreError::invalid(format!("sample {id}: {m}")),
        CoreError::ShapeMismatch(m) => CoreError::shape(format!("sample {id}: {m}")),
        CoreError::Numerical(m) => CoreError::numerical(format!("sample {id}: {m}")),
        other => other,
    }
}

pub fn run(args: EvalArgs) -> Result<()> {
    let kv = load_config(args.config.as_deref())?;
    let pred_dir = require_path(args.pred, &kv, "pred")?;
    let gt_dir = require_path(args.gt, &kv, "gt")?;
    let normalizer = Normalizer::parse(&resolve_or(args.normalizer, &kv, "normalizer", "bbox".to_string())?)?;
    let icp = args.icp || kv.get("icp") == Some("true");
    let cutoff = resolve(args.ced, &kv, "ced")?;
    let ced_steps = resolve_or(args.ced_steps, &kv, "ced_steps", DEFAULT_CED_STEPS)?;
    let labels_path = resolve_path(args.labels, &kv, "labels");
    let out = require_path(args.out, &kv, "out")?;

    let labels = match labels_path {
        Some(path) => read_labels(&path)?,
        None => {
            if normalizer == Normalizer::Interocular {
                return Err(CoreError::invalid(
                    "interocular normalization needs --labels with the eye-corner rows",
                ));
            }
            BTreeMap::new()
        }
    };

    let pred_files = obj_files(&pred_dir)?;
    let gt_files = obj_files(&gt_dir)?;
    check_paired(&pred_files, &gt_files)?;

    let mut reports = Vec::with_capacity(pred_files.len());
    for (id, pred_path) in &pred_files {
        let pred = load_mesh_file(pred_path)?.coords();
        let gt = load_mesh_file(&gt_files[id])?.coords();
        let aligned = if icp {
            icp_align(&pred, &gt, &IcpConfig::default())
                .map_err(|e| with_sample(e, id))?
                .aligned
        } else {
            pred
        };
        let d = normalizer
            .compute(&gt, &labels)
            .map_err(|e| with_sample(e, id))?;
        let error = nme(&aligned, &gt, d).map_err(|e| with_sample(e, id))?;
        reports.push(SampleReport {
            sample_id: id.clone(),
            nme: error,
            d,
            aligned: icp,
        });
    }

    fs::create_dir_all(&out)?;
    let mut report_file = BufWriter::new(fs::File::create(out.join("report.csv"))?);
    write_report_csv(&mut report_file, &reports)?;

    let mean = reports.iter().map(|r| r.nme).sum::<f64>() / reports.len() as f64;
    println!("samples: {}, mean NME: {mean:.6}", reports.len());

    if let Some(cutoff) = cutoff {
        let errors: Vec<f64> = reports.iter().map(|r| r.nme).collect();
        let thresholds = uniform_thresholds(cutoff, ced_steps)?;
        let curve = ced(&errors, &thresholds, cutoff)?;
        let mut ced_file = BufWriter::new(fs::File::create(out.join("ced.csv"))?);
        write_ced_csv(&mut ced_file, &curve)?;
        println!("ced auc: {} (cutoff {})", curve.auc, curve.cutoff);
    }
    Ok(())
}
