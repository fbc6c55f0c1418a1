//! CSV emission for convergence traces and summary rows.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::admm::ConvergenceTrace;
use crate::error::Result;

pub const TRACE_HEADER: &str = "iter,objective,primal_d,primal_h,rel_change,sylv_residual,elapsed_s";
pub const SUMMARY_HEADER: &str = "experiment,mode,tv,mu,beta,rho,noise,iters,metric_name,metric_value";

/// Shortest round-trip representation, in exponent form outside
/// `[1e-4, 1e15)`.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// One line of the summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub experiment: String,
    pub mode: String,
    pub tv: String,
    pub mu: f64,
    pub beta: f64,
    /// Empty for TV/L2 runs.
    pub rho: Option<f64>,
    pub noise: f64,
    pub iters: usize,
    pub metric_name: String,
    pub metric_value: f64,
}

impl SummaryRow {
    pub fn to_csv(&self) -> String {
        let rho = self.rho.map(fmt_num).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.experiment,
            self.mode,
            self.tv,
            fmt_num(self.mu),
            fmt_num(self.beta),
            rho,
            fmt_num(self.noise),
            self.iters,
            self.metric_name,
            fmt_num(self.metric_value)
        )
    }
}

/// Trace rows under [`TRACE_HEADER`]. `primal_h` is left empty for TV/L2.
pub fn trace_csv(trace: &ConvergenceTrace) -> String {
    let mut s = String::with_capacity(64 * (trace.records.len() + 1));
    s.push_str(TRACE_HEADER);
    s.push('\n');
    for r in &trace.records {
        let ph = r.primal_h.map(fmt_num).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.iter,
            fmt_num(r.objective),
            fmt_num(r.primal_d),
            ph,
            fmt_num(r.rel_change),
            fmt_num(r.sylvester_residual),
            fmt_num(r.elapsed_s)
        );
    }
    s
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = String::from(SUMMARY_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv());
        s.push('\n');
    }
    s
}

/// Output paths for `count` traces: `path` itself for one trace, otherwise
/// `stem_ch{c}.ext` per channel.
pub fn trace_paths(path: &Path, count: usize) -> Vec<PathBuf> {
    if count == 1 {
        return vec![path.to_path_buf()];
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    (0..count)
        .map(|c| path.with_file_name(format!("{stem}_ch{c}.{ext}")))
        .collect()
}

/// Writes each trace to its path from [`trace_paths`] and returns the paths.
pub fn write_traces(path: &Path, traces: &[ConvergenceTrace]) -> Result<Vec<PathBuf>> {
    let paths = trace_paths(path, traces.len());
    for (p, t) in paths.iter().zip(traces) {
        fs::write(p, trace_csv(t))?;
    }
    Ok(paths)
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    fs::write(path, summary_csv(rows))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admm::IterationRecord;

    fn record(iter: usize, primal_h: Option<f64>) -> IterationRecord {
        IterationRecord {
            iter,
            objective: 2.5,
            primal_d: 0.125,
            primal_h,
            rel_change: 1e-3,
            sylvester_residual: 3e-9,
            elapsed_s: 0.0,
            multiplier_inner: None,
            basis_dim: iter,
        }
    }

    #[test]
    fn trace_layout() {
        let t = ConvergenceTrace {
            records: vec![record(1, Some(0.5)), record(2, None)],
            converged: true,
        };
        let csv = trace_csv(&t);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], TRACE_HEADER);
        assert_eq!(lines[1], "1,2.5,0.125,0.5,0.001,3e-9,0");
        assert_eq!(lines[2], "2,2.5,0.125,,0.001,3e-9,0");
        for l in &lines {
            assert_eq!(l.matches(',').count(), 6);
        }
    }

    #[test]
    fn summary_layout() {
        let row = SummaryRow {
            experiment: "example1".into(),
            mode: "tvl1".into(),
            tv: "aniso".into(),
            mu: 0.2,
            beta: 50.0,
            rho: Some(5.0),
            noise: 0.3,
            iters: 48,
            metric_name: "snr".into(),
            metric_value: 19.21,
        };
        let csv = summary_csv(&[row.clone(), SummaryRow { rho: None, ..row }]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SUMMARY_HEADER);
        assert_eq!(lines[1], "example1,tvl1,aniso,0.2,50,5,0.3,48,snr,19.21");
        assert_eq!(lines[2], "example1,tvl1,aniso,0.2,50,,0.3,48,snr,19.21");
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.0, 1.5, -2e-7, 1e-300, 6.02e23, 0.1, 123456.789] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_num(1e-5), "1e-5");
        assert_eq!(fmt_num(0.25), "0.25");
    }

    #[test]
    fn channel_paths() {
        let p = Path::new("out/trace.csv");
        assert_eq!(trace_paths(p, 1), vec![PathBuf::from("out/trace.csv")]);
        assert_eq!(
            trace_paths(p, 3),
            vec![
                PathBuf::from("out/trace_ch0.csv"),
                PathBuf::from("out/trace_ch1.csv"),
                PathBuf::from("out/trace_ch2.csv")
            ]
        );
    }
}
