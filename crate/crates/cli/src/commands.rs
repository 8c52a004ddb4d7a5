use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use myorec::classify::ModelSpec;
use myorec::dataset::{
    generate_synthetic, load_dataset, load_manifest, save_dataset, DatasetManifest, Recording, SyntheticSpec,
};
use myorec::evaluate::{
    compare_reports, condition, crossvalidate_prepared, prepare, write_long_csv, EvalConfig, EvalReport, MetricName,
    Prepared, PreparedSubject,
};
use myorec::features::FeatureSetSpec;
use myorec::preprocess::{segment, MinMax};
use myorec::reduce::{fit_ulda, project, res_index, write_scatter};
use myorec::select::{forward_select, SelectionConfig};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{CommandName, Preset, RunConfig};

/// Execute the configured command. Returns false when some fold failed.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<bool> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_json(&out.join("run.json"), cfg)?;
    match cfg.command.expect("resolved command") {
        CommandName::Extract => extract(cfg, out).map(|_| true),
        CommandName::Evaluate => evaluate(cfg, out),
        CommandName::SweepWindow => sweep(cfg, out, Sweep::Window),
        CommandName::SweepSnr => sweep(cfg, out, Sweep::Snr),
        CommandName::Select => select(cfg, out).map(|_| true),
        CommandName::Res => res(cfg, out).map(|_| true),
        CommandName::Scatter => scatter(cfg, out).map(|_| true),
        CommandName::Compare => compare(cfg, out).map(|_| true),
        CommandName::Synth => synth(cfg, out).map(|_| true),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(
        fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn manifest(cfg: &RunConfig) -> Result<DatasetManifest> {
    let Some(path) = &cfg.manifest else {
        bail!("a dataset manifest is required (--manifest)");
    };
    load_manifest(path).with_context(|| format!("loading {}", path.display()))
}

fn dataset(cfg: &RunConfig) -> Result<Vec<Recording>> {
    Ok(load_dataset(&manifest(cfg)?)?)
}

fn slug(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

fn per_set_path(out: &Path, stem: &str, set: &FeatureSetSpec, many: bool) -> PathBuf {
    if many {
        out.join(format!("{stem}_{}.csv", slug(&set.display_name())))
    } else {
        out.join(format!("{stem}.csv"))
    }
}

fn extract(cfg: &RunConfig, out: &Path) -> Result<()> {
    let manifest = manifest(cfg)?;
    let recordings = load_dataset(&manifest)?;
    let mut subjects: Vec<&str> = Vec::new();
    for r in &recordings {
        if !subjects.contains(&r.subject_id.as_str()) {
            subjects.push(&r.subject_id);
        }
    }
    let n_channels = recordings.first().map_or(manifest.expected_channels(), Recording::n_channels);
    let many = cfg.feature_sets.len() > 1;
    for set in &cfg.feature_sets {
        let rows: Vec<Vec<String>> = recordings
            .par_iter()
            .map(|rec| {
                let subject = subjects.iter().position(|s| *s == rec.subject_id).unwrap_or(0);
                let conditioned = condition(rec, subject, &cfg.eval)?;
                segment(&conditioned, cfg.eval.window_ms, cfg.eval.overlap_ms)?
                    .iter()
                    .map(|w| {
                        let v = set.extract(w)?;
                        let mut line = format!("{},{},{},{}", rec.subject_id, rec.movement, rec.trial, w.meta.index);
                        for x in &v.values {
                            line.push(',');
                            line += &x.to_string();
                        }
                        Ok(line)
                    })
                    .collect::<myorec::Result<Vec<String>>>()
            })
            .collect::<myorec::Result<_>>()?;
        let path = per_set_path(out, "features", set, many);
        let mut w = create(&path)?;
        writeln!(w, "subject,movement,trial,window,{}", set.column_names(n_channels).join(","))?;
        for line in rows.iter().flatten() {
            writeln!(w, "{line}")?;
        }
        w.flush()?;
        println!("{}: {} rows -> {}", set.display_name(), rows.iter().map(Vec::len).sum::<usize>(), path.display());
    }
    Ok(())
}

fn evaluate_all(prepared: &Prepared, cfg: &RunConfig) -> Result<Vec<EvalReport>> {
    let combos: Vec<(&FeatureSetSpec, &ModelSpec)> = cfg
        .feature_sets
        .iter()
        .flat_map(|s| cfg.classifiers.iter().map(move |m| (s, m)))
        .collect();
    Ok(combos
        .par_iter()
        .map(|(s, m)| crossvalidate_prepared(prepared, s, m))
        .collect::<myorec::Result<_>>()?)
}

fn print_summary(reports: &[EvalReport]) {
    println!(
        "{:<24} {:<4} {:>7} {:>7} {:>17} {:>17} {:>17}",
        "feature_set", "clf", "window", "snr", "accuracy", "ovr_accuracy", "macro_f1"
    );
    for r in reports {
        let cell = |m| format!("{:.2} ± {:.2}", 100.0 * r.mean(m), 100.0 * r.std(m));
        println!(
            "{:<24} {:<4} {:>7} {:>7} {:>17} {:>17} {:>17}",
            r.feature_set,
            r.classifier.to_string(),
            r.window_ms,
            r.snr_db.map_or("-".to_string(), |s| s.to_string()),
            cell(MetricName::Accuracy),
            cell(MetricName::OvrAccuracy),
            cell(MetricName::F1)
        );
    }
}

fn finish_reports(reports: &[EvalReport], out: &Path, stem: &str) -> Result<bool> {
    write_json(&out.join(format!("{stem}.json")), &reports)?;
    let mut w = create(&out.join(format!("{stem}.csv")))?;
    write_long_csv(&mut w, reports)?;
    w.flush()?;
    print_summary(reports);
    let mut complete = true;
    for r in reports {
        for e in &r.errors {
            eprintln!(
                "fold failed: {} {} subject {} fold {}: {}",
                r.feature_set, r.classifier, e.subject, e.fold, e.message
            );
            complete = false;
        }
        if !r.all_converged() {
            log::warn!("{} {}: some SVM solves hit the iteration budget", r.feature_set, r.classifier);
        }
    }
    Ok(complete)
}

fn evaluate(cfg: &RunConfig, out: &Path) -> Result<bool> {
    let data = dataset(cfg)?;
    let prepared = prepare(&data, &cfg.eval, &cfg.thresholds)?;
    let reports = evaluate_all(&prepared, cfg)?;
    finish_reports(&reports, out, "report")
}

enum Sweep {
    Window,
    Snr,
}

fn sweep(cfg: &RunConfig, out: &Path, kind: Sweep) -> Result<bool> {
    let data = dataset(cfg)?;
    let (points, stem): (Vec<EvalConfig>, &str) = match kind {
        Sweep::Window => (
            cfg.window_sizes.iter().map(|&w| EvalConfig { window_ms: w, ..cfg.eval }).collect(),
            "sweep_window",
        ),
        Sweep::Snr => (
            cfg.snrs.iter().map(|&s| EvalConfig { snr_db: Some(s), ..cfg.eval }).collect(),
            "sweep_snr",
        ),
    };
    let reports: Vec<Vec<EvalReport>> = points
        .par_iter()
        .map(|p| -> Result<Vec<EvalReport>> {
            let prepared = prepare(&data, p, &cfg.thresholds)?;
            evaluate_all(&prepared, cfg)
        })
        .collect::<Result<_>>()?;
    let reports: Vec<EvalReport> = reports.into_iter().flatten().collect();
    finish_reports(&reports, out, stem)
}

fn select(cfg: &RunConfig, out: &Path) -> Result<()> {
    let data = dataset(cfg)?;
    let sel = SelectionConfig {
        pool: cfg.select.pool.clone(),
        improvement_threshold: cfg.select.improvement_threshold,
        objective: cfg.select.objective,
        model: cfg.classifiers[0],
        eval: cfg.eval,
        thresholds: cfg.thresholds,
    };
    let trace = forward_select(&data, &sel)?;
    write_json(&out.join("selection.json"), &trace)?;
    let table = trace.table();
    fs::write(out.join("selection.txt"), &table)?;
    print!("{table}");
    Ok(())
}

/// Fit normalization and ULDA on every window of a subject and keep the
/// first two reduced features.
fn reduce_subject(
    subject: &PreparedSubject,
    set: &FeatureSetSpec,
    n_classes: usize,
    windows_per_trial: Option<usize>,
) -> Result<(DMatrix<f64>, Vec<usize>)> {
    let keep = windows_per_trial.unwrap_or(usize::MAX);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (w, &label) in subject.windows.iter().zip(&subject.labels) {
        if w.meta.index < keep {
            rows.push(set.gather(w)?);
            labels.push(label);
        }
    }
    let width = rows.first().map_or(0, Vec::len);
    let x = DMatrix::from_fn(rows.len(), width, |i, j| rows[i][j]);
    let normalized = MinMax::fit(&x).apply(&x)?;
    let projection = fit_ulda(&normalized, &labels, n_classes)?;
    let reduced = project(&projection, &normalized)?;
    if reduced.ncols() < 2 {
        bail!(
            "subject {}: ULDA kept {} dimension(s), two are needed",
            subject.subject,
            reduced.ncols()
        );
    }
    Ok((reduced.columns(0, 2).into_owned(), labels))
}

fn subjects_for<'a>(cfg: &RunConfig, prepared: &'a Prepared) -> Result<Vec<&'a PreparedSubject>> {
    let chosen: Vec<&PreparedSubject> = prepared
        .subjects
        .iter()
        .filter(|s| cfg.scatter.subject.as_ref().is_none_or(|want| *want == s.subject))
        .collect();
    if chosen.is_empty() {
        bail!("no matching subject in the dataset");
    }
    Ok(chosen)
}

#[derive(Serialize)]
struct ResRow {
    subject: String,
    feature_set: String,
    res: f64,
}

fn res(cfg: &RunConfig, out: &Path) -> Result<()> {
    let data = dataset(cfg)?;
    let prepared = prepare(&data, &cfg.eval, &cfg.thresholds)?;
    let mut rows = Vec::new();
    for s in subjects_for(cfg, &prepared)? {
        for set in &cfg.feature_sets {
            let (reduced, labels) = reduce_subject(s, set, prepared.n_classes(), cfg.scatter.windows_per_trial)?;
            rows.push(ResRow {
                subject: s.subject.clone(),
                feature_set: set.display_name(),
                res: res_index(&reduced, &labels, prepared.n_classes())?,
            });
        }
    }
    let mut w = create(&out.join("res.csv"))?;
    writeln!(w, "subject,feature_set,res")?;
    for r in &rows {
        writeln!(w, "{},{},{}", r.subject, r.feature_set, r.res)?;
        println!("{:<8} {:<24} {:.4}", r.subject, r.feature_set, r.res);
    }
    w.flush()?;
    write_json(&out.join("res.json"), &rows)
}

fn scatter(cfg: &RunConfig, out: &Path) -> Result<()> {
    let data = dataset(cfg)?;
    let prepared = prepare(&data, &cfg.eval, &cfg.thresholds)?;
    for s in subjects_for(cfg, &prepared)? {
        for set in &cfg.feature_sets {
            let (reduced, labels) = reduce_subject(s, set, prepared.n_classes(), cfg.scatter.windows_per_trial)?;
            let names: Vec<_> = labels.iter().map(|&k| prepared.classes[k]).collect();
            let path = out.join(format!("scatter_{}_{}.csv", slug(&s.subject), slug(&set.display_name())));
            let mut w = create(&path)?;
            write_scatter(&mut w, &reduced, &names)?;
            println!("{} rows -> {}", names.len(), path.display());
        }
    }
    Ok(())
}

fn compare(cfg: &RunConfig, out: &Path) -> Result<()> {
    let groups: Vec<Vec<EvalReport>> = cfg
        .compare
        .groups
        .iter()
        .map(|files| -> Result<Vec<EvalReport>> {
            let mut reports = Vec::new();
            for f in files {
                let text = fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?;
                let mut batch: Vec<EvalReport> =
                    serde_json::from_str(&text).with_context(|| format!("parsing {}", f.display()))?;
                reports.append(&mut batch);
            }
            Ok(reports)
        })
        .collect::<Result<_>>()?;
    let slices: Vec<&[EvalReport]> = groups.iter().map(Vec::as_slice).collect();
    let result = compare_reports(&slices, cfg.compare.metric, cfg.compare.comparisons)?;
    write_json(&out.join("compare.json"), &result)?;
    println!(
        "F = {} (df {}, {}), p = {}, bonferroni p = {}",
        result.f_stat, result.df_between, result.df_within, result.p_value, result.bonferroni_p
    );
    Ok(())
}

fn synth(cfg: &RunConfig, out: &Path) -> Result<()> {
    let s = &cfg.synth;
    let mut spec = match s.preset {
        Preset::Separable => SyntheticSpec::separable_ten_class(s.seed),
        Preset::Amplitude => SyntheticSpec::amplitude_coded(s.seed, s.contrast),
    };
    spec.n_subjects = s.n_subjects;
    let recordings = generate_synthetic(&spec)?;
    let root = out.join("data");
    let mut manifest = save_dataset(&recordings, &root, "{movement}_{trial}.csv")?;
    manifest.root_path = PathBuf::from("data");
    write_json(&out.join("manifest.json"), &manifest)?;
    println!("{} recordings -> {}", recordings.len(), out.join("manifest.json").display());
    Ok(())
}
