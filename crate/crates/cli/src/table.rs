//! In-memory CSV tables and the few fits the summaries need.

use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }

    pub fn from_csv(bytes: &[u8]) -> Result<Self, csv::Error> {
        let mut r = csv::Reader::from_reader(bytes);
        let header = r.headers()?.iter().map(str::to_string).collect();
        let rows =
            r.records().map(|rec| rec.map(|r| r.iter().map(str::to_string).collect())).collect::<Result<_, _>>()?;
        Ok(Self { header, rows })
    }

    pub fn read(path: &Path) -> Result<Self, csv::Error> {
        Self::from_csv(&std::fs::read(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), csv::Error> {
        std::fs::File::create(path)?.write_all(&self.to_csv()?)?;
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Values of column `name` parsed as numbers; empty cells become NaN.
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.column(name)?;
        self.rows.iter().map(|r| if r[c].is_empty() { Some(f64::NAN) } else { r[c].parse().ok() }).collect()
    }

    /// Rows whose `name` cell equals `value`.
    pub fn filter(&self, name: &str, value: &str) -> Table {
        let c = self.column(name);
        let rows = self.rows.iter().filter(|r| c.is_some_and(|c| r[c] == value)).cloned().collect();
        Table { header: self.header.clone(), rows }
    }

    /// Column-aligned text for terminal summaries.
    pub fn render(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(String::len).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        std::iter::once(line(&self.header)).chain(self.rows.iter().map(|r| line(r))).collect()
    }
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Path-loss exponent from received power in dBm against distance:
/// minus the slope of power over `10·log10(d)`.
pub fn path_loss_exponent_fit(distances_m: &[f64], powers_dbm: &[f64]) -> f64 {
    let x: Vec<f64> = distances_m.iter().map(|d| 10.0 * d.log10()).collect();
    -slope(&x, powers_dbm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_with_quoting() {
        let t = Table {
            header: vec!["a".into(), "b".into()],
            rows: vec![vec!["1.5".into(), "x,y".into()], vec!["".into(), "q\"".into()]],
        };
        let bytes = t.to_csv().unwrap();
        assert_eq!(String::from_utf8(bytes.clone()).unwrap(), "a,b\r\n1.5,\"x,y\"\r\n,\"q\"\"\"\r\n");
        assert_eq!(Table::from_csv(&bytes).unwrap(), t);
        assert!(Table::from_csv(&bytes).unwrap().numbers("a").unwrap()[1].is_nan());
    }

    #[test]
    fn exponent_fit_recovers_power_law() {
        let d = [0.5, 1.0, 2.0, 4.0];
        let p: Vec<f64> = d.iter().map(|d: &f64| -60.0 - 27.0 * d.log10()).collect();
        assert!((path_loss_exponent_fit(&d, &p) - 2.7).abs() < 1e-12);
    }
}
