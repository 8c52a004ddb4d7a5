use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{generate_synthetic, DatasetManifest, Layout, MovementLabel, Recording};
use crate::error::{Error, Result};

/// Read `manifest.json`, resolving a relative root against the manifest's directory.
pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let manifest: DatasetManifest = serde_json::from_str(&text)?;
    manifest.validate()?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    Ok(manifest.rooted_at(dir))
}

/// Load every (subject, movement, trial) file the manifest declares.
///
/// Files are read in parallel; the result is ordered subject-major, then
/// movement, then trial.
pub fn load_dataset(manifest: &DatasetManifest) -> Result<Vec<Recording>> {
    manifest.validate()?;
    if manifest.layout == Layout::Synthetic {
        let spec = manifest.synthetic.as_ref().expect("validated");
        return generate_synthetic(spec);
    }
    let mut jobs = Vec::new();
    for subject in &manifest.subjects {
        for &movement in &manifest.movements {
            for trial in 1..=manifest.trials_per_movement {
                jobs.push((subject.as_str(), movement, trial));
            }
        }
    }
    let expected = manifest.expected_channels();
    let recordings = jobs
        .par_iter()
        .map(|&(subject, movement, trial)| {
            let path = manifest.file_path(subject, movement, trial);
            let channels = read_recording_csv(&path)?;
            if channels.len() != expected {
                return Err(Error::ChannelCountMismatch {
                    path,
                    expected,
                    found: channels.len(),
                });
            }
            let mut rec = Recording::new(subject, movement, trial, manifest.sample_rate_hz, channels)
                .map_err(|e| Error::MalformedRow {
                    path: path.clone(),
                    line: 0,
                    reason: e.to_string(),
                })?;
            rec.units = manifest.units;
            Ok(rec)
        })
        .collect::<Result<Vec<_>>>()?;

    for subject in &manifest.subjects {
        let lens: Vec<usize> = recordings
            .iter()
            .filter(|r| &r.subject_id == subject)
            .map(Recording::n_samples)
            .collect();
        if let (Some(min), Some(max)) = (lens.iter().min(), lens.iter().max()) {
            if max - min > 1 {
                log::warn!("subject {subject}: trial lengths range from {min} to {max} samples");
            }
        }
    }
    Ok(recordings)
}

/// Parse a headerless numeric file, one column per channel. Commas and
/// whitespace are both accepted as separators; blank lines are skipped.
pub fn read_recording_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut channels: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        if fields.is_empty() {
            continue;
        }
        if channels.is_empty() {
            channels = vec![Vec::new(); fields.len()];
        } else if fields.len() != channels.len() {
            return Err(Error::MalformedRow {
                path: path.to_path_buf(),
                line: line_no,
                reason: format!("expected {} columns, found {}", channels.len(), fields.len()),
            });
        }
        for (ch, field) in channels.iter_mut().zip(&fields) {
            let v: f64 = field.parse().map_err(|_| Error::MalformedRow {
                path: path.to_path_buf(),
                line: line_no,
                reason: format!("non-numeric cell {field:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::MalformedRow {
                    path: path.to_path_buf(),
                    line: line_no,
                    reason: format!("non-finite cell {field:?}"),
                });
            }
            ch.push(v);
        }
    }
    Ok(channels)
}

/// Write channels as comma-separated columns. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_recording_csv(path: &Path, channels: &[Vec<f64>]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let n = channels.first().map_or(0, Vec::len);
    let write = |w: &mut BufWriter<fs::File>| -> std::io::Result<()> {
        for i in 0..n {
            for (c, ch) in channels.iter().enumerate() {
                if c > 0 {
                    w.write_all(b",")?;
                }
                write!(w, "{}", ch[i])?;
            }
            w.write_all(b"\n")?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| Error::io(path, e))
}

/// Save recordings under `root` using the CSV layout and return a manifest
/// that loads them back.
pub fn save_dataset(
    recordings: &[Recording],
    root: &Path,
    filename_template: &str,
) -> Result<DatasetManifest> {
    let mut subjects: Vec<String> = Vec::new();
    let mut movements: Vec<MovementLabel> = Vec::new();
    let mut trials = 0;
    for r in recordings {
        if !subjects.contains(&r.subject_id) {
            subjects.push(r.subject_id.clone());
        }
        if !movements.contains(&r.movement) {
            movements.push(r.movement);
        }
        trials = trials.max(r.trial);
    }
    let first = recordings.first();
    let manifest = DatasetManifest {
        root_path: PathBuf::from(root),
        layout: Layout::TwoChannelCsv,
        subjects,
        movements,
        trials_per_movement: trials.max(2),
        sample_rate_hz: first.map_or(2000.0, |r| r.sample_rate_hz),
        filename_template: filename_template.to_string(),
        n_channels: first.map(Recording::n_channels),
        units: first.map(|r| r.units).unwrap_or_default(),
        synthetic: None,
    };
    recordings.par_iter().try_for_each(|r| {
        write_recording_csv(&manifest.file_path(&r.subject_id, r.movement, r.trial), &r.channels)
    })?;
    Ok(manifest)
}
