//! Result files: trajectory and table CSVs, summary JSON.
//!
//! Every number is written with 12 significant digits in scientific notation, so
//! output is byte-identical across reruns of the same configuration. Files are written
//! to a temporary sibling and renamed into place.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::observables::SummaryMetrics;
use crate::propagator::Trajectory;
use crate::spectrum::{AdiabaticityRow, CrossingRecord};

/// 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Write `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(path))?;
    tmp.write_all(contents).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    #[cfg(unix)]
    {
        // Temp files are created owner-only; results should be ordinary files.
        use std::os::unix::fs::PermissionsExt;
        let mode = std::fs::Permissions::from_mode(0o644);
        std::fs::set_permissions(tmp.path(), mode).map_err(io_err(path))?;
    }
    tmp.persist(path).map_err(|e| io_err(path)(e.error))?;
    Ok(())
}

/// Header `t,P_-N,...,P_N,v_mean,norm`.
pub fn trajectory_header(n_max: usize) -> String {
    let n = n_max as i64;
    let mut cols = vec!["t".to_string()];
    cols.extend((-n..=n).map(|k| format!("P_{k}")));
    cols.push("v_mean".into());
    cols.push("norm".into());
    cols.join(",")
}

/// Trajectory as CSV text: `2N + 1` populations between `t` and `v_mean,norm`.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut s = trajectory_header(traj.n_max);
    s.push('\n');
    for (k, t) in traj.times.iter().enumerate() {
        s.push_str(&fmt_num(*t));
        for p in &traj.populations[k] {
            s.push(',');
            s.push_str(&fmt_num(*p));
        }
        let _ = writeln!(s, ",{},{}", fmt_num(traj.mean_velocity[k]), fmt_num(traj.norm[k]));
    }
    s
}

pub fn emit_trajectory(traj: &Trajectory, path: &Path) -> Result<()> {
    write_atomic(path, trajectory_csv(traj).as_bytes())
}

/// Document written next to every trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct Summary<'a> {
    /// Snapshot of the configuration that produced the run.
    pub config: &'a Value,
    pub metrics: &'a SummaryMetrics,
    pub adiabaticity: &'a [AdiabaticityRow],
    pub warnings: &'a [String],
    pub steps: usize,
}

pub fn summary_json(summary: &Summary<'_>) -> Result<String> {
    let mut s = serde_json::to_string_pretty(summary)?;
    s.push('\n');
    Ok(s)
}

pub fn emit_summary(summary: &Summary<'_>, path: &Path) -> Result<()> {
    write_atomic(path, summary_json(summary)?.as_bytes())
}

/// Any serialisable value as pretty JSON, written atomically.
pub fn emit_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

/// Dressed energies on a time grid: `t,E_0,...,E_{2N}` in ascending order.
pub fn spectrum_csv(rows: &[(f64, Vec<f64>)]) -> String {
    let width = rows.first().map_or(0, |r| r.1.len());
    let mut s = String::from("t");
    for k in 0..width {
        let _ = write!(s, ",E_{k}");
    }
    s.push('\n');
    for (t, e) in rows {
        s.push_str(&fmt_num(*t));
        for x in e {
            s.push(',');
            s.push_str(&fmt_num(*x));
        }
        s.push('\n');
    }
    s
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, fmt_num)
}

/// Located crossings joined with their adiabaticity verdicts.
pub fn crossings_csv(records: &[CrossingRecord], rows: &[AdiabaticityRow]) -> String {
    let mut s = String::from("n,n_plus_1,t_cross,gap,t_diabatic,rabi,t_lz,spacing,lz_ratio,flagged\n");
    for (r, a) in records.iter().zip(rows) {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.pair.0,
            r.pair.1,
            fmt_num(r.t_cross),
            fmt_num(r.gap),
            fmt_num(r.t_diabatic),
            fmt_num(r.rabi),
            fmt_num(r.t_lz),
            opt(r.spacing),
            fmt_num(a.ratio),
            a.flagged
        );
    }
    s
}

/// One metric row per scan value.
pub fn scan_csv(parameter: &str, values: &[f64], metrics: &[SummaryMetrics]) -> String {
    let mut s = format!("{parameter},fidelity,residual_low,asymmetry,max_norm_deviation,dominant_level\n");
    for (v, m) in values.iter().zip(metrics) {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            fmt_num(*v),
            fmt_num(m.fidelity),
            fmt_num(m.residual_low),
            opt(m.asymmetry),
            fmt_num(m.max_norm_deviation),
            m.dominant_level
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(1.0), "1.00000000000e0");
        assert_eq!(fmt_num(-0.123456789012345), "-1.23456789012e-1");
        let x = 0.1 + 0.2;
        assert!((fmt_num(x).parse::<f64>().unwrap() - x).abs() < 1e-12);
    }

    #[test]
    fn header_columns() {
        let h = trajectory_header(2);
        assert_eq!(h, "t,P_-2,P_-1,P_0,P_1,P_2,v_mean,norm");
        assert_eq!(h.split(',').count(), 2 * 2 + 4);
    }

    #[test]
    fn atomic_write_replaces_and_reports_missing_dirs() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        let err = write_atomic(&dir.path().join("nope/b.txt"), b"x").unwrap_err();
        assert!(err.to_string().contains("nope"));
    }
}
