use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gmres::{ConvergenceHistory, SolveReport};

/// Summary written as the JSON report of one solve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub method: String,
    pub n: usize,
    pub iterations: usize,
    pub cycles: usize,
    pub final_relres: f64,
    pub converged: bool,
    pub breakdown_flag: bool,
    pub wall_time_ms: f64,
}

impl RunReport {
    pub fn new(method: &str, n: usize, report: &SolveReport, wall_time_ms: f64) -> Self {
        Self {
            method: method.to_string(),
            n,
            iterations: report.iterations,
            cycles: report.cycles(),
            final_relres: report.final_relres,
            converged: report.converged,
            breakdown_flag: report.breakdown(),
            wall_time_ms,
        }
    }
}

/// Seventeen significant digits, enough to round-trip an `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// History as CSV with columns `iteration,cycle,relres,event`; several
/// events on one iteration are joined by `;`.
pub fn history_csv(history: &ConvergenceHistory) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::invalid(format!("csv: {e}"));
    w.write_record(["iteration", "cycle", "relres", "event"]).map_err(csv_err)?;
    for (it, &rel) in history.relres.iter().enumerate() {
        let events: Vec<String> =
            history.events.iter().filter(|e| e.iteration == it).map(|e| e.kind.to_string()).collect();
        w.write_record([it.to_string(), history.cycle_of(it).to_string(), format_float(rel), events.join(";")])
            .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

pub fn write_history(history: &ConvergenceHistory, path: &Path) -> Result<()> {
    std::fs::write(path, history_csv(history)?)?;
    Ok(())
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::invalid(format!("json: {e}")))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// `history.csv` becomes `history.<i>.csv` for system `i` of a sequence.
pub fn indexed_path(path: &Path, i: usize) -> std::path::PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{i}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{i}"),
    };
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmres::EventKind;

    #[test]
    fn csv_layout() {
        let mut h = ConvergenceHistory::new(1.0);
        h.mark_cycle();
        h.push(0.5);
        h.record(EventKind::Stagnation);
        h.record(EventKind::RecycleRefresh);
        let text = history_csv(&h).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "iteration,cycle,relres,event");
        assert_eq!(lines[1], "0,0,1.0000000000000000e0,");
        assert_eq!(lines[2], "1,1,5.0000000000000000e-1,stagnation;recycle-refresh");
    }

    #[test]
    fn float_round_trips() {
        for x in [0.1, 1.0 / 3.0, 2.2250738585072014e-308, 123456.789e-3] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn indexed_paths() {
        assert_eq!(indexed_path(Path::new("out/h.csv"), 2), Path::new("out/h.2.csv"));
        assert_eq!(indexed_path(Path::new("h"), 0), Path::new("h.0"));
    }
}
