//! CSV emission with fixed column order and 6-significant-digit decimals.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use super::{BenchError, PredictionRow, ResultRow, RunOutput, SummaryRow};

/// Plain decimal notation rounded to 6 significant digits, trailing zeros
/// dropped.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn csv_err(e: csv::Error) -> BenchError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => BenchError::Output(io),
        other => BenchError::Output(std::io::Error::other(format!("{other:?}"))),
    }
}

pub fn write_results<W: Write>(rows: &[ResultRow], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "noise", "repetition", "seed", "n_train", "error_rate", "mean_iterations", "wall_time_ms"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.method.name().to_string(),
            format_sig(r.noise),
            r.repetition.to_string(),
            r.seed.to_string(),
            r.n_train.to_string(),
            format_sig(r.error_rate),
            r.mean_iterations.map(format_sig).unwrap_or_default(),
            format_sig(r.wall_time_ms),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "noise", "mean_error", "std_error", "n_reps"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.method.name().to_string(),
            format_sig(r.noise),
            format_sig(r.mean_error),
            format_sig(r.std_error),
            r.n_reps.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_predictions<W: Write>(rows: &[PredictionRow], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "noise", "repetition", "example", "truth", "prediction"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.method.name().to_string(),
            format_sig(r.noise),
            r.repetition.to_string(),
            r.example.to_string(),
            r.truth.to_string(),
            r.prediction.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `results.csv`, `summary.csv` and, when asked, `predictions.csv`
/// into `dir`, creating it if needed.
pub fn emit<P: AsRef<Path>>(output: &RunOutput, dir: P, predictions: bool) -> Result<(), BenchError> {
    if output.rows.is_empty() {
        return Err(BenchError::Data(crate::Error::Empty("results")));
    }
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    write_results(&output.rows, File::create(dir.join("results.csv"))?)?;
    write_summary(&output.summary, File::create(dir.join("summary.csv"))?)?;
    if predictions {
        write_predictions(&output.predictions, File::create(dir.join("predictions.csv"))?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{summarize, Method};

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.158655254), "0.158655");
        assert_eq!(format_sig(0.1), "0.1");
        assert_eq!(format_sig(123.4567891), "123.457");
        assert_eq!(format_sig(2.0), "2");
        assert_eq!(format_sig(1234567.0), "1234567");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(-0.0000123456789), "-0.0000123457");
    }

    fn row(method: Method, noise: f64) -> ResultRow {
        ResultRow {
            method,
            noise,
            repetition: 0,
            seed: 3,
            n_train: 80,
            error_rate: 0.25,
            mean_iterations: (method == Method::Plaknn).then_some(12.5),
            wall_time_ms: 0.0,
        }
    }

    #[test]
    fn single_row_gives_two_lines() {
        let mut buf = Vec::new();
        write_results(&[row(Method::Plaknn, 0.0)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "method,noise,repetition,seed,n_train,error_rate,mean_iterations,wall_time_ms\nplaknn,0,0,3,80,0.25,12.5,0\n"
        );
    }

    #[test]
    fn summary_rows_per_method_and_noise() {
        let rows: Vec<_> =
            [Method::Plaknn, Method::FixedK].iter().flat_map(|&m| [0.0, 0.1, 0.2].map(|n| row(m, n))).collect();
        let out = RunOutput { summary: summarize(&rows), rows, predictions: vec![] };
        let dir = tempfile::tempdir().unwrap();
        emit(&out, dir.path(), false).unwrap();
        let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(summary.lines().count(), 7);
        let first = std::fs::read(dir.path().join("results.csv")).unwrap();
        emit(&out, dir.path(), false).unwrap();
        assert_eq!(std::fs::read(dir.path().join("results.csv")).unwrap(), first);
        assert!(!dir.path().join("predictions.csv").exists());
        assert!(emit(&RunOutput::default(), dir.path(), false).is_err());
    }
}
