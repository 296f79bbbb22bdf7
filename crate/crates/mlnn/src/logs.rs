//! Learning-curve and cost-landscape CSV files.

use mlnn_core::landscape::LandscapeGrid;
use mlnn_core::train::{LogEntry, RunLog};

use crate::{format_f64, FormatError};

pub const RUN_LOG_HEADER: &str = "updates,train_loss,val_rankloss,val_map";
pub const LANDSCAPE_HEADER: &str = "w1,w2,cost";

pub fn write_run_log(log: &RunLog) -> String {
    let mut out = format!("{RUN_LOG_HEADER}\n");
    for e in &log.entries {
        out.push_str(&format!(
            "{},{},{},{}\n",
            e.updates,
            format_f64(e.train_loss),
            format_f64(e.val_rank_loss),
            format_f64(e.val_map)
        ));
    }
    out
}

pub fn read_run_log(text: &str) -> Result<RunLog, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == RUN_LOG_HEADER => {}
        _ => return Err(FormatError::syntax(1, "missing run log header")),
    }
    let mut entries = Vec::new();
    for (n, line) in lines {
        let bad = |what: &str| FormatError::syntax(n + 1, format!("bad {what}"));
        let f: Vec<&str> = line.trim().split(',').collect();
        if f.len() != 4 {
            return Err(FormatError::syntax(n + 1, "expected 4 columns"));
        }
        let float = |s: &str, what: &str| s.parse::<f64>().map_err(|_| bad(what));
        entries.push(LogEntry {
            updates: f[0].parse().map_err(|_| bad("update count"))?,
            train_loss: float(f[1], "train_loss")?,
            val_rank_loss: float(f[2], "val_rankloss")?,
            val_map: float(f[3], "val_map")?,
        });
    }
    Ok(RunLog { entries })
}

pub fn write_landscape(grid: &LandscapeGrid) -> String {
    let mut out = format!("{LANDSCAPE_HEADER}\n");
    for (w1, w2, c) in grid.rows() {
        out.push_str(&format!(
            "{},{},{}\n",
            format_f64(w1),
            format_f64(w2),
            format_f64(c)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use mlnn_core::landscape::{landscape_grid, Fixture, GridRange};
    use mlnn_core::network::{Activation, LossConfig};

    #[test]
    fn run_log_round_trip() {
        let log = RunLog {
            entries: vec![
                LogEntry {
                    updates: 10,
                    train_loss: 0.5,
                    val_rank_loss: 0.25,
                    val_map: 0.75,
                },
                LogEntry {
                    updates: 20,
                    train_loss: f64::NAN,
                    val_rank_loss: 1e-7,
                    val_map: 1.0,
                },
            ],
        };
        let text = write_run_log(&log);
        assert!(text.starts_with("updates,train_loss,val_rankloss,val_map\n10,0.5,0.25,0.75\n"));
        let back = read_run_log(&text).unwrap();
        assert_eq!(write_run_log(&back), text);
        assert!(read_run_log("a,b\n").is_err());
        assert!(read_run_log(&format!("{RUN_LOG_HEADER}\n1,2\n")).is_err());
    }

    #[test]
    fn landscape_rows() {
        let r = GridRange::new(-1.0, 1.0, 5).unwrap();
        let g = landscape_grid(
            r,
            r,
            LossConfig::cross_entropy(),
            Activation::Tanh,
            &Fixture::default(),
        )
        .unwrap();
        let text = write_landscape(&g);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 26);
        assert_eq!(lines[0], "w1,w2,cost");
        assert!(lines[1].starts_with("-1,-1,"));
    }
}
