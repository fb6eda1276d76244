//! Truncation sweeps: run the TT engine at several `epsilon` and compare each
//! result against the `epsilon = 0` run, timing both engines.

use std::io::{Read, Write};
use std::time::Instant;

use crate::dmd::{exact_dmd, mode_errors, standard_dmd, tt_dmd, DmdResult, TtSnapshotPair, Variant};
use crate::error::{Result, TtError};
use crate::pinv::Cutoff;
use crate::synth::build_xy;
use crate::tt::DenseTensor;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    /// TT-ranks of `X` at this `epsilon`.
    pub ranks: Vec<usize>,
    pub t_dense_ms: f64,
    pub t_tt_ms: f64,
    /// `(e_lambda, e_phi)` per reference mode; NaN when unmatched.
    pub errors: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub variant: Variant,
    /// Sorted by ascending `epsilon`; the first row is `epsilon = 0`.
    pub rows: Vec<SweepRow>,
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn dense_engine(s: &crate::dmd::SnapshotMatrices, variant: Variant) -> Result<DmdResult> {
    match variant {
        Variant::Standard => standard_dmd(s, Cutoff::Roundoff),
        Variant::Exact => exact_dmd(s, Cutoff::Roundoff),
    }
}

/// Sweep over `epsilons`, which must contain 0 and at least one other value.
/// TT conversion time is not included in `t_tt_ms`.
pub fn run_sweep(series: &DenseTensor, epsilons: &[f64], dt: f64, variant: Variant) -> Result<SweepReport> {
    if epsilons.len() < 2 {
        return Err(TtError::arg("a sweep needs at least two epsilon values"));
    }
    if let Some(bad) = epsilons.iter().find(|e| !(**e >= 0.0) || !e.is_finite()) {
        return Err(TtError::arg(format!("epsilon must be finite and nonnegative, got {bad}")));
    }
    if !epsilons.contains(&0.0) {
        return Err(TtError::arg("a sweep needs epsilon = 0 as reference"));
    }
    let mut eps = epsilons.to_vec();
    eps.sort_by(f64::total_cmp);
    eps.dedup();

    let (mats, _) = build_xy(series, dt, 0.0)?;
    let start = Instant::now();
    dense_engine(&mats, variant)?;
    let t_dense_ms = elapsed_ms(start);

    let mut runs = Vec::with_capacity(eps.len());
    for &e in &eps {
        let (_, pair) = build_xy(series, dt, e)?;
        let (result, ms) = timed_tt(&pair, variant)?;
        runs.push((e, pair.x().ranks(), ms, result));
    }
    let reference = runs[0].3.clone();
    let rows = runs
        .into_iter()
        .map(|(epsilon, ranks, t_tt_ms, result)| {
            let errors = mode_errors(&reference, &result)?
                .into_iter()
                .map(|m| (m.e_lambda, m.e_phi))
                .collect();
            Ok(SweepRow {
                epsilon,
                ranks,
                t_dense_ms,
                t_tt_ms,
                errors,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport { variant, rows })
}

fn timed_tt(pair: &TtSnapshotPair, variant: Variant) -> Result<(DmdResult, f64)> {
    let start = Instant::now();
    let r = tt_dmd(pair, variant, Cutoff::Roundoff)?;
    Ok((r, elapsed_ms(start)))
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

fn mode_count(rows: &[SweepRow]) -> usize {
    rows.iter().map(|r| r.errors.len()).max().unwrap_or(0)
}

impl SweepReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let k = mode_count(&self.rows);
        let mut header: Vec<String> = ["epsilon", "ranks", "t_dense_ms", "t_tt_ms"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        for j in 0..k {
            header.push(format!("e_lambda_{j}"));
            header.push(format!("e_phi_{j}"));
        }
        out.write_record(&header).map_err(csv_err)?;
        for row in &self.rows {
            let mut rec = vec![
                sci(row.epsilon),
                row.ranks.iter().map(usize::to_string).collect::<Vec<_>>().join(";"),
                sci(row.t_dense_ms),
                sci(row.t_tt_ms),
            ];
            for j in 0..k {
                let (l, p) = row.errors.get(j).copied().unwrap_or((f64::NAN, f64::NAN));
                rec.push(sci(l));
                rec.push(sci(p));
            }
            out.write_record(&rec).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is ASCII"))
    }

    /// Parse CSV written by [`SweepReport::write_csv`].
    pub fn read_csv<R: Read>(r: R, variant: Variant) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers().map_err(csv_err)?.clone();
        let fixed = ["epsilon", "ranks", "t_dense_ms", "t_tt_ms"];
        if header.len() < 4 || header.len() % 2 != 0 || header.iter().take(4).ne(fixed) {
            return Err(TtError::format(0, "unexpected sweep CSV header"));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(csv_err)?;
            let offset = rec.position().map_or(0, |p| p.byte());
            let num = |i: usize| -> Result<f64> {
                rec[i]
                    .parse()
                    .map_err(|_| TtError::format(offset, format!("bad number '{}'", &rec[i])))
            };
            let ranks = rec[1]
                .split(';')
                .map(|s| s.parse().map_err(|_| TtError::format(offset, format!("bad rank '{s}'"))))
                .collect::<Result<Vec<usize>>>()?;
            let errors = (4..rec.len())
                .step_by(2)
                .map(|i| Ok((num(i)?, num(i + 1)?)))
                .collect::<Result<Vec<_>>>()?;
            rows.push(SweepRow {
                epsilon: num(0)?,
                ranks,
                t_dense_ms: num(2)?,
                t_tt_ms: num(3)?,
                errors,
            });
        }
        Ok(SweepReport { variant, rows })
    }

    /// Human-readable table with 6 significant digits.
    pub fn table(&self) -> String {
        let k = mode_count(&self.rows);
        let mut s = format!("{:>12}  {:<20} {:>12} {:>12}", "epsilon", "ranks", "t_dense_ms", "t_tt_ms");
        for j in 0..k {
            s += &format!(" {:>12} {:>12}", format!("e_lambda_{j}"), format!("e_phi_{j}"));
        }
        s.push('\n');
        for row in &self.rows {
            let ranks = row.ranks.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
            s += &format!(
                "{:>12.5e}  {:<20} {:>12.5e} {:>12.5e}",
                row.epsilon, ranks, row.t_dense_ms, row.t_tt_ms
            );
            for (l, p) in &row.errors {
                s += &format!(" {l:>12.5e} {p:>12.5e}");
            }
            s.push('\n');
        }
        s
    }
}

fn csv_err(e: csv::Error) -> TtError {
    let offset = e.position().map_or(0, |p| p.byte());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => TtError::Io(io),
        other => TtError::format(offset, format!("{other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_series, graded, two_mode};

    #[test]
    fn reference_row_is_exactly_zero() {
        let series = generate_series(&two_mode(&[5, 4], 10, 0.1).unwrap()).unwrap();
        let rep = run_sweep(&series, &[1e-10, 0.0], 0.1, Variant::Standard).unwrap();
        assert_eq!(rep.rows[0].epsilon, 0.0);
        assert_eq!(rep.rows[0].errors.len(), 4);
        assert!(rep.rows[0].errors.iter().all(|&(l, p)| l == 0.0 && p == 0.0));
        assert_eq!(rep.rows[0].t_dense_ms, rep.rows[1].t_dense_ms);
    }

    #[test]
    fn rejects_bad_epsilons() {
        let series = generate_series(&two_mode(&[3, 3], 5, 0.1).unwrap()).unwrap();
        for eps in [&[0.0][..], &[1e-5, 1e-3], &[0.0, -1.0], &[0.0, f64::NAN]] {
            assert!(matches!(
                run_sweep(&series, eps, 0.1, Variant::Standard),
                Err(TtError::Argument(_))
            ));
        }
    }

    #[test]
    fn truncation_does_not_improve_modes() {
        let series = generate_series(&graded(&[6, 5, 4], 12, 0.1, 4, 1e-4).unwrap()).unwrap();
        let rep = run_sweep(&series, &[0.0, 1e-10, 1e-5], 0.1, Variant::Standard).unwrap();
        let e_phi = |r: usize| rep.rows[r].errors[0].1;
        assert!(e_phi(2) >= e_phi(1) - 1e-12);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let rep = SweepReport {
            variant: Variant::Exact,
            rows: vec![
                SweepRow {
                    epsilon: 0.0,
                    ranks: vec![1, 3, 2, 1],
                    t_dense_ms: 1.0 / 3.0,
                    t_tt_ms: 0.1,
                    errors: vec![(0.0, 0.0), (0.0, 0.0)],
                },
                SweepRow {
                    epsilon: 1e-5,
                    ranks: vec![1, 2, 2, 1],
                    t_dense_ms: 1.0 / 3.0,
                    t_tt_ms: 2.0f64.sqrt(),
                    errors: vec![(1.234e-7, 5e-300), (f64::NAN, f64::NAN)],
                },
            ],
        };
        let text = rep.to_csv().unwrap();
        assert!(text.starts_with("epsilon,ranks,t_dense_ms,t_tt_ms,e_lambda_0,e_phi_0,e_lambda_1,e_phi_1\n"));
        assert!(text.contains("1;3;2;1"));
        let back = SweepReport::read_csv(text.as_bytes(), Variant::Exact).unwrap();
        // NaN != NaN, so compare the re-rendered text.
        assert_eq!(back.to_csv().unwrap(), text);
        assert_eq!(back.rows[0], rep.rows[0]);
        assert!(back.rows[1].errors[1].0.is_nan());
        assert!(SweepReport::read_csv("a,b\n1,2\n".as_bytes(), Variant::Exact).is_err());
    }
}
