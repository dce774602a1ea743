//! Gnuplot-ready data extraction from run directories.
//!
//! Every directory containing a `summary.json` is treated as one run; its
//! per-seed traces are aggregated into whitespace-separated `t mean stderr`
//! files (one per metric) plus a gnuplot script stub drawing the
//! mean +/- stderr band.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};
use crate::trace::{aggregate, read_trace_csv, MeanRecord};

pub const PLOT_SCHEMA: &str = "bnnlab-plot-v1";
pub const PLOT_HEADER: &str = "# t mean stderr";

fn find_run_dirs(root: &Path) -> Result<Vec<PathBuf>> {
    let mut dirs = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        if dir.join("summary.json").exists() {
            dirs.push(dir.clone());
        }
        for entry in fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.is_dir() {
                stack.push(path);
            }
        }
    }
    dirs.sort();
    Ok(dirs)
}

fn run_label(dir: &Path) -> Result<String> {
    let text = fs::read_to_string(dir.join("summary.json"))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", dir.display())))?;
    Ok(value["config"]["label"]
        .as_str()
        .unwrap_or("run")
        .to_string())
}

fn seed_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("seed_") && n.ends_with(".csv"))
        })
        .collect();
    files.sort();
    Ok(files)
}

fn write_curve(
    path: &Path,
    means: &[MeanRecord],
    pick: fn(&MeanRecord) -> (f64, f64),
) -> Result<()> {
    let mut out = format!("# {PLOT_SCHEMA}\n{PLOT_HEADER}\n");
    for m in means {
        let (mean, stderr) = pick(m);
        out.push_str(&format!("{} {} {}\n", m.t, mean, stderr));
    }
    fs::File::create(path)?.write_all(out.as_bytes())?;
    Ok(())
}

/// Emits plot data for every run directory under `root` into `out_dir` and
/// returns the data files written.
pub fn emit_plot_data(root: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let run_dirs = find_run_dirs(root)?;
    if run_dirs.is_empty() {
        return Err(HarnessError::Config(format!(
            "no run directories (summary.json) under {}",
            root.display()
        )));
    }
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for dir in &run_dirs {
        let label = run_label(dir)?;
        let mut per_seed = Vec::new();
        for file in seed_files(dir)? {
            per_seed.push(read_trace_csv(&file)?);
        }
        if per_seed.is_empty() {
            continue;
        }
        let means = aggregate(&per_seed)?;
        let nashconv = out_dir.join(format!("{label}_nashconv.dat"));
        write_curve(&nashconv, &means, |m| (m.nash_conv_mean, m.nash_conv_stderr))?;
        written.push(nashconv);
        let gamma = out_dir.join(format!("{label}_gamma.dat"));
        write_curve(&gamma, &means, |m| (m.gamma_mean, m.gamma_stderr))?;
        written.push(gamma);
    }

    let mut script = String::from(
        "# gnuplot stub: mean with stderr band per curve\nset logscale y\nset xlabel 't'\nset ylabel 'NashConv'\nplot \\\n",
    );
    let curves: Vec<String> = written
        .iter()
        .filter(|p| p.to_string_lossy().ends_with("_nashconv.dat"))
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy();
            format!(
                "  '{name}' using 1:($2-$3):($2+$3) with filledcurves fs transparent solid 0.2 notitle, \\\n  '{name}' using 1:2 with lines title '{}'",
                name.trim_end_matches("_nashconv.dat")
            )
        })
        .collect();
    script.push_str(&curves.join(", \\\n"));
    script.push('\n');
    fs::File::create(out_dir.join("plot.gp"))?.write_all(script.as_bytes())?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RawConfig;
    use crate::runner::run_experiment;

    #[test]
    fn emits_stable_format() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RawConfig {
            game: Some("brps".into()),
            iters: Some(50),
            eval_interval: Some(10),
            seeds: Some("0..2".into()),
            label: Some("demo".into()),
            ..RawConfig::default()
        }
        .resolve()
        .unwrap();
        run_experiment(&cfg, &dir.path().join("run")).unwrap();
        let out = dir.path().join("plot");
        let files = emit_plot_data(dir.path(), &out).unwrap();
        assert_eq!(files.len(), 2);
        let text = std::fs::read_to_string(out.join("demo_nashconv.dat")).unwrap();
        let mut lines = text.lines();
        // golden: schema line, header line, then one row per eval with
        // exactly three whitespace-separated columns
        assert_eq!(lines.next().unwrap(), "# bnnlab-plot-v1");
        assert_eq!(lines.next().unwrap(), "# t mean stderr");
        for line in lines {
            assert_eq!(line.split_whitespace().count(), 3);
        }
        assert!(out.join("plot.gp").exists());
    }

    #[test]
    fn single_seed_stderr_column_zero() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RawConfig {
            game: Some("brps".into()),
            iters: Some(30),
            eval_interval: Some(10),
            seeds: Some("5,5".into()),
            ..RawConfig::default()
        };
        // duplicate seeds rejected; use a single seed
        let cfg = RawConfig { seeds: Some("5".into()), ..cfg }.resolve().unwrap();
        run_experiment(&cfg, &dir.path().join("run")).unwrap();
        let out = dir.path().join("plot");
        emit_plot_data(dir.path(), &out).unwrap();
        let file = std::fs::read_dir(&out)
            .unwrap()
            .filter_map(|e| e.ok())
            .find(|e| e.file_name().to_string_lossy().ends_with("_nashconv.dat"))
            .unwrap();
        let text = std::fs::read_to_string(file.path()).unwrap();
        for line in text.lines().skip(2) {
            let cols: Vec<&str> = line.split_whitespace().collect();
            assert_eq!(cols[2], "0");
        }
    }

    #[test]
    fn empty_dir_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = emit_plot_data(dir.path(), &dir.path().join("plot")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
