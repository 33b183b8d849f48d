//! Subcommand implementations.

use std::path::Path;

use anyhow::{bail, Context, Result};
use fra_core::data::{read_dataset, write_dataset, FaultType, Group, LabelScheme, LabeledDataset};
use fra_core::diag::{diagnosis_to_string, tune_lambda, PipelineManifest, TwoStagePipeline, Verdict};
use fra_core::eval::{cross_validate, evaluate, train, TrainConfig, TrainSeeds};
use fra_core::nn::{
    forward_batch, load_model, save_model, ForwardMode, Mat, ModelMeta, SavedModel,
    DEFAULT_INPUT_SCALE,
};
use fra_core::sim::{generate_group_with, netlist, GenerationConfig, MeasurementSetup, WindingSpec};
use fra_core::zoo::{build, Architecture};
use fra_core::Connection;

use crate::config::{resolve_out, Defaults};
use crate::{plot, Cli, Command};

pub fn run(cli: Cli) -> Result<()> {
    let defaults = Defaults::load(cli.config.as_deref())?;
    let jobs = defaults.resolve(cli.jobs, "jobs", 0usize)?;
    if jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("configuring the worker pool")?;
    }
    match cli.command {
        Command::Gen {
            group,
            seed,
            out,
            jitter_sigma,
            noise_db,
            csv,
            netlist: netlist_path,
        } => run_gen(
            &defaults,
            group,
            seed,
            &out,
            jitter_sigma,
            noise_db,
            csv.as_deref(),
            netlist_path.as_deref(),
        ),
        Command::Train {
            data,
            arch,
            task,
            out,
            scale,
            seed,
            epochs,
            batch,
            lr,
            patience,
        } => run_train(
            &defaults, &data, &arch, &task, &out, scale, seed, epochs, batch, lr, patience,
        ),
        Command::Cv {
            data,
            arch,
            task,
            out,
            scale,
            k,
            seed,
            epochs,
            batch,
            lr,
            patience,
        } => run_cv(
            &defaults, &data, &arch, &task, &out, scale, k, seed, epochs, batch, lr, patience,
        ),
        Command::Eval { model, data, out } => run_eval(&model, &data, out.as_deref()),
        Command::Fuse {
            model_a,
            model_b,
            data,
            out,
            lambda,
        } => run_fuse(&model_a, &model_b, &data, &out, lambda),
        Command::Diagnose {
            stage1,
            stage2,
            manifest,
            ee,
            ciw,
            out,
            limit,
            stage2_only,
            save_manifest,
        } => run_diagnose(
            stage1.as_deref(),
            stage2.as_deref(),
            manifest.as_deref(),
            ee.as_deref(),
            &ciw,
            &out,
            limit,
            stage2_only,
            save_manifest.as_deref(),
        ),
        Command::Plot {
            kind,
            data,
            out,
            samples,
            fault_type,
        } => run_plot(&kind, &data, &out, samples.as_deref(), fault_type.as_deref()),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_gen(
    defaults: &Defaults,
    group: usize,
    seed: Option<u64>,
    out: &Path,
    jitter_sigma: Option<f64>,
    noise_db: Option<f64>,
    csv: Option<&Path>,
    netlist_path: Option<&Path>,
) -> Result<()> {
    let group = Group::from_index(group)?;
    let seed = defaults.resolve(seed, "seed", 0u64)?;
    let cfg = GenerationConfig {
        jitter_sigma: defaults.resolve(jitter_sigma, "jitter_sigma", 0.005)?,
        noise_db: defaults.resolve(noise_db, "noise_db", 0.1)?,
    };
    let ds = generate_group_with(group, seed, &cfg)?;
    let out = resolve_out(out);
    write_dataset(&ds, &out).with_context(|| format!("writing {}", out.display()))?;
    if let Some(csv_path) = csv {
        let csv_path = resolve_out(csv_path);
        let mut file = std::fs::File::create(&csv_path)
            .with_context(|| format!("creating {}", csv_path.display()))?;
        fra_core::data::export_csv(&ds, &mut file)?;
    }
    if let Some(nl_path) = netlist_path {
        let spec = WindingSpec::for_winding(group.winding());
        let net = fra_core::sim::base_parameters(&spec, seed, 0.0)?;
        let setup = match group.connection() {
            Connection::Ee => MeasurementSetup::ee(),
            Connection::Ciw => MeasurementSetup::ciw(),
        };
        std::fs::write(resolve_out(nl_path), netlist(&net, &setup))?;
    }
    println!(
        "generated {} ({} samples) -> {}",
        group,
        ds.len(),
        out.display()
    );
    Ok(())
}

/// Parses `type`, `joint`, or `degree:<TYPE>`, slicing the dataset for the
/// degree task. Returns the (possibly sliced) dataset and the scheme.
fn resolve_task(ds: LabeledDataset, task: &str) -> Result<(LabeledDataset, LabelScheme)> {
    let lower = task.to_ascii_lowercase();
    if lower == "type" {
        let scheme = LabelScheme::fault_types(&ds.fault_types())?;
        return Ok((ds, scheme));
    }
    if lower == "joint" {
        let scheme = LabelScheme::joint(&ds.fault_types())?;
        return Ok((ds, scheme));
    }
    if let Some(t) = lower.strip_prefix("degree:") {
        let fault_type = FaultType::parse(t)?;
        let sliced = ds.slice_degree_task(fault_type)?;
        let scheme = LabelScheme::degrees(fault_type)?;
        return Ok((sliced, scheme));
    }
    bail!("unknown task {task:?} (expected type, joint, or degree:<TYPE>)");
}

struct TrainFlags {
    scale: f64,
    cfg: TrainConfig,
}

#[allow(clippy::too_many_arguments)]
fn train_flags(
    defaults: &Defaults,
    scale: Option<f64>,
    seed: Option<u64>,
    epochs: Option<usize>,
    batch: Option<usize>,
    lr: Option<f64>,
    patience: Option<usize>,
) -> Result<TrainFlags> {
    let seed = defaults.resolve(seed, "seed", 0u64)?;
    let base = TrainConfig::default();
    let cfg = TrainConfig {
        learning_rate: defaults.resolve(lr, "lr", base.learning_rate)?,
        batch_size: defaults.resolve(batch, "batch", base.batch_size)?,
        max_epochs: defaults.resolve(epochs, "epochs", base.max_epochs)?,
        patience: defaults.resolve(patience, "patience", base.patience)?,
        seeds: TrainSeeds::from_base(seed),
    };
    Ok(TrainFlags {
        scale: defaults.resolve(scale, "scale", 0.1)?,
        cfg,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_train(
    defaults: &Defaults,
    data: &Path,
    arch: &str,
    task: &str,
    out: &Path,
    scale: Option<f64>,
    seed: Option<u64>,
    epochs: Option<usize>,
    batch: Option<usize>,
    lr: Option<f64>,
    patience: Option<usize>,
) -> Result<()> {
    let arch: Architecture = arch.parse()?;
    let flags = train_flags(defaults, scale, seed, epochs, batch, lr, patience)?;
    let ds = read_dataset(data).with_context(|| format!("reading {}", data.display()))?;
    let connection = ds.connection();
    let (ds, scheme) = resolve_task(ds, task)?;
    let spec = build(arch, scheme.class_count(), flags.scale)?;
    let outcome = train(&spec, &ds, &scheme, &flags.cfg)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    let model = SavedModel::new(
        spec,
        outcome.params,
        ModelMeta {
            architecture: arch.to_string(),
            class_names: scheme.class_names(),
            connection: Some(connection),
            input_scale: DEFAULT_INPUT_SCALE,
        },
    )?;
    let out = resolve_out(out);
    save_model(&model, &out).with_context(|| format!("writing {}", out.display()))?;
    println!(
        "trained {arch} on {} samples, final loss {:.6} after {} epochs -> {}",
        ds.len(),
        outcome.history.last().copied().unwrap_or(f64::NAN),
        outcome.history.len(),
        out.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_cv(
    defaults: &Defaults,
    data: &Path,
    arch: &str,
    task: &str,
    out: &Path,
    scale: Option<f64>,
    k: Option<usize>,
    seed: Option<u64>,
    epochs: Option<usize>,
    batch: Option<usize>,
    lr: Option<f64>,
    patience: Option<usize>,
) -> Result<()> {
    let arch: Architecture = arch.parse()?;
    let flags = train_flags(defaults, scale, seed, epochs, batch, lr, patience)?;
    let k = defaults.resolve(k, "k", 10usize)?;
    let ds = read_dataset(data).with_context(|| format!("reading {}", data.display()))?;
    let (ds, scheme) = resolve_task(ds, task)?;
    let scale_value = flags.scale;
    let builder = move |classes: usize| build(arch, classes, scale_value);
    let report = cross_validate(&builder, &ds, &scheme, k, &flags.cfg)?;
    let out = resolve_out(out);
    report.write_to_dir(&out)?;
    eprintln!("wall clock: {:.1?}", report.wall_clock);
    println!(
        "cv {arch} k={k}: mean acc {:.4} (std {:.4}), mean macro-F1 {:.4} -> {}",
        report.mean_accuracy,
        report.std_accuracy,
        report.mean_macro_f1,
        out.display()
    );
    Ok(())
}

fn run_eval(model_path: &Path, data: &Path, out: Option<&Path>) -> Result<()> {
    let model = load_model(model_path)?;
    let ds = read_dataset(data)?;
    let scheme = model.scheme()?;
    if let Some(conn) = model.meta.connection {
        if conn != ds.connection() {
            bail!(
                "model was trained on {conn} data but the dataset is {}",
                ds.connection()
            );
        }
    }
    // Degree-scheme models evaluate on the matching slice.
    let ds = match scheme.kind() {
        fra_core::data::SchemeKind::Degree(t) => ds.slice_degree_task(t)?,
        _ => ds,
    };
    let cm = evaluate(&model.params, &model.spec, &ds, &scheme)?;
    let summary = format!(
        "samples = {}\naccuracy = {:.6}\nmacro_f1 = {:.6}\n",
        cm.total(),
        cm.accuracy()?,
        cm.macro_f1()?
    );
    match out {
        Some(dir) => {
            let dir = resolve_out(dir);
            std::fs::create_dir_all(&dir)?;
            std::fs::write(dir.join("metrics.txt"), &summary)?;
            std::fs::write(dir.join("confusion.csv"), cm.to_csv())?;
            println!("eval -> {}", dir.display());
            print!("{summary}");
        }
        None => print!("{summary}"),
    }
    Ok(())
}

fn model_probs(model: &SavedModel, ds: &LabeledDataset) -> Result<Vec<Vec<f64>>> {
    let mut x = Mat::zeros(ds.len(), ds.grid().len());
    for (i, s) in ds.samples().iter().enumerate() {
        for (dst, &v) in x.row_mut(i).iter_mut().zip(s.sweep.values()) {
            *dst = v / model.meta.input_scale;
        }
    }
    let pass = forward_batch(&model.params, &model.spec, &x, ForwardMode::Eval)?;
    Ok((0..pass.probs.rows())
        .map(|r| pass.probs.row(r).iter().map(|&v| v as f64).collect())
        .collect())
}

fn run_fuse(
    model_a: &Path,
    model_b: &Path,
    data: &Path,
    out: &Path,
    fixed_lambda: Option<f64>,
) -> Result<()> {
    let a = load_model(model_a)?;
    let b = load_model(model_b)?;
    if a.meta.class_names != b.meta.class_names {
        bail!("fusion requires models sharing one label scheme");
    }
    let scheme = a.scheme()?;
    let ds = read_dataset(data)?;
    let ds = match scheme.kind() {
        fra_core::data::SchemeKind::Degree(t) => ds.slice_degree_task(t)?,
        _ => ds,
    };
    let truths: Vec<usize> = ds
        .samples()
        .iter()
        .map(|s| scheme.encode(&s.label))
        .collect::<fra_core::Result<_>>()?;
    let probs_a = model_probs(&a, &ds)?;
    let probs_b = model_probs(&b, &ds)?;
    let choice = match fixed_lambda {
        Some(lambda) => {
            let mut correct = 0usize;
            for ((pa, pb), &t) in probs_a.iter().zip(&probs_b).zip(&truths) {
                let fused = fra_core::diag::fuse(pa, pb, lambda)?;
                let am = fused
                    .iter()
                    .enumerate()
                    .max_by(|x, y| x.1.partial_cmp(y.1).unwrap().then(y.0.cmp(&x.0)))
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                if am == t {
                    correct += 1;
                }
            }
            fra_core::diag::LambdaChoice {
                lambda,
                accuracy: correct as f64 / truths.len() as f64,
            }
        }
        None => tune_lambda(&probs_a, &probs_b, &truths)?,
    };
    let report = format!(
        "model_a = {}\nmodel_b = {}\nlambda = {:.6}\naccuracy = {:.6}\nsamples = {}\n",
        model_a.display(),
        model_b.display(),
        choice.lambda,
        choice.accuracy,
        truths.len()
    );
    let out = resolve_out(out);
    std::fs::write(&out, &report).with_context(|| format!("writing {}", out.display()))?;
    print!("{report}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_diagnose(
    stage1: Option<&Path>,
    stage2: Option<&Path>,
    manifest: Option<&Path>,
    ee: Option<&Path>,
    ciw: &Path,
    out: &Path,
    limit: Option<usize>,
    stage2_only: bool,
    save_manifest: Option<&Path>,
) -> Result<()> {
    let ciw_ds = read_dataset(ciw)?;
    if ciw_ds.connection() != Connection::Ciw {
        bail!("--ciw dataset must carry the CIW connection tag");
    }
    let grid_id = ciw_ds.grid().id();
    let (pipeline, s1_path, s2_path) = match manifest {
        Some(mpath) => {
            let m = PipelineManifest::read(mpath)?;
            let base = mpath.parent().unwrap_or(Path::new("."));
            (m.load(base)?, m.stage1_path.clone(), m.stage2_path.clone())
        }
        None => {
            let s1 = stage1.expect("clap enforces --stage1 without --manifest");
            let s2 = stage2.expect("clap enforces --stage2 without --manifest");
            (
                TwoStagePipeline::new(load_model(s1)?, load_model(s2)?, grid_id)?,
                s1.to_path_buf(),
                s2.to_path_buf(),
            )
        }
    };
    if let Some(mpath) = save_manifest {
        PipelineManifest {
            stage1_path: s1_path,
            stage2_path: s2_path,
            grid_id,
            lambda: None,
        }
        .write(resolve_out(mpath))?;
    }
    let s1_classes = pipeline.stage1.scheme()?.class_names();
    let s2_classes = pipeline.stage2.scheme()?.class_names();
    let joint = pipeline.stage2.scheme()?;

    let mut text = String::new();
    let mut exact = 0usize;
    let mut healthy_calls = 0usize;
    let mut conflicts = 0usize;
    let total;
    if stage2_only {
        let n = limit.unwrap_or(ciw_ds.len()).min(ciw_ds.len());
        total = n;
        for (i, sample) in ciw_ds.samples().iter().take(n).enumerate() {
            let (verdict, probs) = pipeline.diagnose_stage2_only(&sample.sweep)?;
            text.push_str(&format!("sample = {i}\n"));
            match verdict {
                Verdict::Healthy => {
                    healthy_calls += 1;
                    text.push_str("verdict = healthy\n");
                }
                Verdict::Fault { fault_type, degree } => {
                    text.push_str(&format!(
                        "verdict = fault\nfault_type = {fault_type}\ndegree = {degree}\n"
                    ));
                }
            }
            for (name, p) in s2_classes.iter().zip(&probs) {
                text.push_str(&format!("stage2_p_{name} = {p:.6}\n"));
            }
            if verdict_matches(&verdict, sample, &joint) {
                exact += 1;
            }
            text.push('\n');
        }
    } else {
        let ee_path = ee.expect("clap enforces --ee without --stage2-only");
        let ee_ds = read_dataset(ee_path)?;
        if ee_ds.connection() != Connection::Ee {
            bail!("--ee dataset must carry the EE connection tag");
        }
        if ee_ds.len() != ciw_ds.len() {
            bail!(
                "paired datasets differ in size: {} EE vs {} CIW",
                ee_ds.len(),
                ciw_ds.len()
            );
        }
        let n = limit.unwrap_or(ee_ds.len()).min(ee_ds.len());
        total = n;
        for i in 0..n {
            let d = pipeline.diagnose(&ee_ds.samples()[i].sweep, &ciw_ds.samples()[i].sweep)?;
            text.push_str(&format!("sample = {i}\n"));
            text.push_str(&diagnosis_to_string(&d, &s1_classes, &s2_classes));
            text.push('\n');
            if d.verdict == Verdict::Healthy {
                healthy_calls += 1;
            }
            if d.conflict {
                conflicts += 1;
            }
            if verdict_matches(&d.verdict, &ciw_ds.samples()[i], &joint) {
                exact += 1;
            }
        }
    }
    let summary = format!(
        "samples = {total}\nhealthy_calls = {healthy_calls}\nconflicts = {conflicts}\nexact_match = {:.6}\n",
        exact as f64 / total.max(1) as f64
    );
    let out = resolve_out(out);
    std::fs::write(&out, format!("{summary}\n{text}"))
        .with_context(|| format!("writing {}", out.display()))?;
    print!("{summary}");
    Ok(())
}

fn verdict_matches(
    verdict: &Verdict,
    sample: &fra_core::data::Sample,
    _scheme: &LabelScheme,
) -> bool {
    match verdict {
        Verdict::Healthy => sample.label.is_normal(),
        Verdict::Fault { fault_type, degree } => {
            sample.label.fault_type == *fault_type && sample.label.degree == *degree
        }
    }
}

fn run_plot(
    kind: &str,
    data: &Path,
    out: &Path,
    samples: Option<&str>,
    fault_type: Option<&str>,
) -> Result<()> {
    let out = resolve_out(out);
    match kind.to_ascii_lowercase().as_str() {
        "bode" => {
            let ds = read_dataset(data)?;
            let indices: Vec<usize> = match samples {
                Some(list) => list
                    .split(',')
                    .map(|s| s.trim().parse().context("bad sample index"))
                    .collect::<Result<_>>()?,
                None => vec![0],
            };
            plot::bode(&ds, &indices, &out)?;
        }
        "confusion" => {
            let text = std::fs::read_to_string(data)
                .with_context(|| format!("reading {}", data.display()))?;
            let counts = plot::parse_confusion_csv(&text)?;
            plot::confusion_heatmap(&counts, None, &out)?;
        }
        "cced" => {
            let ds = read_dataset(data)?;
            let reference = plot::normal_reference(&ds)?;
            let filter_type = match fault_type {
                Some(t) => Some(FaultType::parse(t)?),
                None => None,
            };
            let stats = fra_core::eval::cc_ed_map(&ds, &reference, |label| match filter_type {
                Some(t) => label.fault_type == t,
                None => !label.is_normal(),
            })?;
            plot::cc_ed_scatter(&stats, &out)?;
        }
        other => bail!("unknown plot kind {other:?} (expected bode, confusion, or cced)"),
    }
    println!("plot -> {}", out.display());
    Ok(())
}
