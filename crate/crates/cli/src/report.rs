//! Summary tables and the convergence CSV.

use std::io::{Read, Write};
use std::path::Path;

use crate::config::ProblemConfig;
use crate::error::{CliError, CliResult};
use crate::problem::{IndexReport, RankRow};

pub const CSV_HEADER: [&str; 7] = [
    "n",
    "rank",
    "lambda_corr",
    "lambda_sum",
    "corr_norm",
    "eta",
    "eta_bar",
];

/// Right-aligned plain-text table.
pub fn aligned_table(header: &[String], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&width)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = line(header);
    out.push('\n');
    let rule: Vec<String> = width.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&line(&rule));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

pub fn summary_table(reports: &[IndexReport]) -> String {
    let with_ref = reports.iter().any(|r| r.reference.is_some());
    let mut header: Vec<String> = [
        "n",
        "m",
        "lambda",
        "|lambda^(m)|",
        "||u^(m)||",
        "eta",
        "eta_bar",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    if with_ref {
        header.push("|lambda - ref|".into());
    }
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let last = r.final_row();
            let mut row = vec![
                r.n.to_string(),
                last.rank.to_string(),
                format!("{:.15}", r.lambda()),
                format!("{:.2e}", last.lambda_corr.abs()),
                format!("{:.2e}", last.corr_norm),
                format!("{:.2e}", last.eta),
                format!("{:.2e}", last.eta_bar),
            ];
            if with_ref {
                row.push(
                    r.discrepancy()
                        .map(|d| format!("{d:.4e}"))
                        .unwrap_or_default(),
                );
            }
            row
        })
        .collect();
    aligned_table(&header, &rows)
}

pub fn write_convergence_csv<W: Write>(reports: &[IndexReport], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::config(format!("writing CSV: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in reports.iter().flat_map(|r| &r.rows) {
        w.write_record([
            row.n.to_string(),
            row.rank.to_string(),
            format!("{:e}", row.lambda_corr),
            format!("{:e}", row.lambda_sum),
            format!("{:e}", row.corr_norm),
            format!("{:e}", row.eta),
            format!("{:e}", row.eta_bar),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| CliError::config(format!("writing CSV: {e}")))?;
    Ok(())
}

/// Parses a convergence CSV, enforcing the exact header and seven numeric
/// fields per row.
pub fn read_convergence_csv<R: Read>(input: R) -> CliResult<Vec<RankRow>> {
    let mut r = csv::Reader::from_reader(input);
    let bad = |msg: String| CliError::config(format!("convergence CSV: {msg}"));
    let header = r.headers().map_err(|e| bad(e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let int = |i: usize| {
            rec[i]
                .parse::<usize>()
                .map_err(|_| bad(format!("field {i} in {rec:?}")))
        };
        let real = |i: usize| {
            rec[i]
                .parse::<f64>()
                .map_err(|_| bad(format!("field {i} in {rec:?}")))
        };
        rows.push(RankRow {
            n: int(0)?,
            rank: int(1)?,
            lambda_corr: real(2)?,
            lambda_sum: real(3)?,
            corr_norm: real(4)?,
            eta: real(5)?,
            eta_bar: real(6)?,
        });
    }
    Ok(rows)
}

/// Writes `summary.txt`, `convergence.csv` and `effective_config.txt`.
pub fn write_outputs(dir: &Path, config: &ProblemConfig, reports: &[IndexReport]) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let write = |name: &str, text: &str| {
        let p = dir.join(name);
        std::fs::write(&p, text).map_err(|e| CliError::io(p, e))
    };
    write("summary.txt", &summary_table(reports))?;
    write("effective_config.txt", &config.to_text())?;
    let p = dir.join("convergence.csv");
    let f = std::fs::File::create(&p).map_err(|e| CliError::io(&p, e))?;
    write_convergence_csv(reports, std::io::BufWriter::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_columns_line_up() {
        let t = aligned_table(
            &["a".into(), "long".into()],
            &[
                vec!["123".into(), "x".into()],
                vec!["4".into(), "yz".into()],
            ],
        );
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "  a  long");
        assert_eq!(lines[1], "---  ----");
        assert_eq!(lines[2], "123     x");
        assert_eq!(lines[3], "  4    yz");
    }

    #[test]
    fn csv_rejects_a_wrong_header() {
        let text = "n,rank,lambda,lambda_sum,corr_norm,eta,eta_bar\n";
        assert!(read_convergence_csv(text.as_bytes()).is_err());
        let text = "n,rank,lambda_corr,lambda_sum,corr_norm,eta,eta_bar\n0,1.5,0,0,0,0,0\n";
        assert!(read_convergence_csv(text.as_bytes()).is_err());
    }
}
