//! CSV output: comma separated, 17 significant digits, header row, LF line
//! endings.

use std::fmt::Write as _;
use std::path::Path;

use crate::analysis::EnergyKind;
use crate::error::Result;
use crate::state::TrajectoryRecord;

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// An in-memory table, written in one go.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    text: String,
    columns: usize,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut t = Table {
            text: String::new(),
            columns: header.len(),
        };
        t.push_raw(header.iter().map(|s| s.as_ref().to_string()));
        t
    }

    fn push_raw(&mut self, cells: impl Iterator<Item = String>) {
        let mut n = 0;
        for (i, c) in cells.enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            self.text.push_str(&c);
            n += 1;
        }
        debug_assert_eq!(n, self.columns);
        self.text.push('\n');
    }

    pub fn push_floats(&mut self, row: &[f64]) {
        self.push_raw(row.iter().map(|&x| fmt_f64(x)));
    }

    /// A row whose leading cells are labels.
    pub fn push_labelled(&mut self, labels: &[&str], row: &[f64]) {
        self.push_raw(labels.iter().map(|s| s.to_string()).chain(row.iter().map(|&x| fmt_f64(x))));
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, &self.text)?;
        Ok(())
    }
}

/// `t, q0.., p0..` with node-average momenta.
pub fn trajectory_table(rec: &TrajectoryRecord) -> Table {
    let d = rec.states.first().map_or(0, |s| s.q.len());
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((0..d).map(|i| format!("q{i}")))
        .chain((0..d).map(|i| format!("p{i}")))
        .collect();
    let mut table = Table::new(&header);
    let mut row = Vec::with_capacity(2 * d + 1);
    for (t, s) in rec.times.iter().zip(&rec.states) {
        row.clear();
        row.push(*t);
        row.extend_from_slice(&s.q);
        row.extend(s.p_prev_half.iter().zip(&s.p_next_half).map(|(a, b)| 0.5 * (a + b)));
        table.push_floats(&row);
    }
    table
}

/// `t, pseudo_energy, discrete_energy, defect, force_evals`.
pub fn energy_table(rec: &TrajectoryRecord) -> Table {
    let mut table = Table::new(&["t", "pseudo_energy", "discrete_energy", "defect", "force_evals"]);
    for ((t, e), evals) in rec.times.iter().zip(&rec.energies).zip(&rec.force_evals) {
        let mut line = String::new();
        let _ = write!(
            line,
            "{},{},{},{},{}",
            fmt_f64(*t),
            fmt_f64(e.pseudo),
            fmt_f64(e.discrete),
            fmt_f64(e.defect()),
            evals
        );
        table.text.push_str(&line);
        table.text.push('\n');
    }
    table
}

/// Reads one energy column back from an energy table.
pub fn energy_column(text: &str, which: EnergyKind) -> Vec<f64> {
    let col = match which {
        EnergyKind::Pseudo => 1,
        EnergyKind::Discrete => 2,
    };
    text.lines()
        .skip(1)
        .filter_map(|l| l.split(',').nth(col).and_then(|c| c.parse().ok()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.0), "-2.0000000000000000e0");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new(&["h", "error"]);
        t.push_floats(&[0.5, 0.25]);
        t.push_labelled(&["slope"], &[2.0]);
        assert_eq!(t.as_str(), "h,error\n5.0000000000000000e-1,2.5000000000000000e-1\nslope,2.0000000000000000e0\n");
    }
}
