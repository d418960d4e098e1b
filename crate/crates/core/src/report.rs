//! Cost reports: predicted bounds next to measured ledgers, and the CSV
//! sweep used by `kcert bench`.

use std::fmt::{self, Write as _};

use crate::checkpoint::verifier_bound;
use crate::engine::{CostLedger, Mode, VerifierOutcome};
use crate::error::Error;
use crate::field::FieldSpec;
use crate::logdepth::{ceil_log2, sequence_log_prediction, sequence_single_prediction, PowerVariant};
use crate::protocol::{resolve, run, Options, Protocol, RunOutput};
use crate::prover::HonestProver;
use crate::recursive::dense_bound;
use crate::sequence::seq_cost;
use crate::sparse::SparseMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub formula: &'static str,
    pub predicted: f64,
    pub measured: u64,
    pub pass: bool,
}

/// Verifier bound for `protocol` on a matrix with dimension `n` and apply
/// cost `mu`, where one is stated.
pub fn predicted_verifier(protocol: &Protocol, n: u64, mu: u64) -> Option<(&'static str, f64)> {
    let lg = |d: usize| (d.max(2) as f64).log2();
    match *protocol {
        Protocol::Checkpoint { delta, k } => {
            Some(("2K(mu+n) + ceil(delta/K)(2K+6n)", verifier_bound(n, delta as u64, mu, k as u64) as f64))
        }
        Protocol::Dense { delta, k } => {
            Some(("2mu + 10Kn + ceil(delta/K)(2K+6n)", dense_bound(n, delta as u64, mu, k as u64) as f64))
        }
        Protocol::PowerLog { d } => Some(("(mu+8n)log2(d) + mu", (mu + 8 * n) as f64 * lg(d) + mu as f64)),
        Protocol::PowerSingle { d, .. } => {
            Some(("mu + 8n + 12n log2(d)", (mu + 8 * n) as f64 + 12.0 * n as f64 * lg(d)))
        }
        Protocol::Sequence { delta, variant: PowerVariant::Log } => {
            Some(("1/2 mu log2^2(d) + 4n log2^2(d)", sequence_log_prediction(n, mu, delta as u64)))
        }
        Protocol::Sequence { delta, variant: PowerVariant::Single } => {
            Some(("mu log2(d) + 6n log2^2(d)", sequence_single_prediction(n, mu, delta as u64)))
        }
        _ => None,
    }
}

/// Outcome, ledger and the bound comparisons that apply to `protocol`.
pub struct RunReport {
    pub protocol: Protocol,
    pub outcome: VerifierOutcome,
    pub ledger: CostLedger,
    pub checks: Vec<BoundCheck>,
}

impl RunReport {
    pub fn new(protocol: Protocol, matrix: &SparseMatrix, out: &RunOutput) -> Self {
        let n = matrix.dim() as u64;
        let mu = matrix.mu();
        let v = &out.ledger.verifier;
        let mut checks = Vec::new();
        if let Some((formula, predicted)) = predicted_verifier(&protocol, n, mu) {
            let measured = v.field_ops;
            let pass = match protocol {
                Protocol::Sequence { .. } => (measured as f64) <= 2.0 * predicted && 2.0 * measured as f64 >= predicted,
                _ => measured as f64 <= predicted,
            };
            checks.push(BoundCheck { formula, predicted, measured, pass });
        }
        match protocol {
            Protocol::PowerSingle { .. } => {
                let m = v.applications();
                checks.push(BoundCheck { formula: "verifier matvecs = 1", predicted: 1.0, measured: m, pass: m == 1 });
            }
            Protocol::PowerLog { d } => {
                let bound = u64::from(ceil_log2(d)) + 1;
                let m = v.applications();
                checks.push(BoundCheck {
                    formula: "verifier matvecs <= ceil(log2 d) + 1",
                    predicted: bound as f64,
                    measured: m,
                    pass: m <= bound,
                });
            }
            Protocol::Sequence { variant, .. } => {
                let factor = match variant {
                    PowerVariant::Log => (5.5, "prover <= 5.5 Seq(n)"),
                    PowerVariant::Single => (7.5, "prover <= 7.5 Seq(n)"),
                };
                let predicted = factor.0 * seq_cost(n, mu) as f64;
                let measured = out.ledger.prover.field_ops;
                checks.push(BoundCheck { formula: factor.1, predicted, measured, pass: measured as f64 <= predicted });
            }
            _ => {}
        }
        RunReport { protocol, outcome: out.outcome.clone(), ledger: out.ledger, checks }
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = &self.ledger;
        writeln!(f, "protocol: {}", self.protocol)?;
        writeln!(f, "outcome: {}", self.outcome)?;
        writeln!(
            f,
            "verifier: {} field ops, {} matvecs, {} vecmats",
            l.verifier.field_ops, l.verifier.matvecs, l.verifier.vecmats
        )?;
        if l.prover != Default::default() {
            writeln!(
                f,
                "prover: {} field ops, {} matvecs, {} vecmats",
                l.prover.field_ops, l.prover.matvecs, l.prover.vecmats
            )?;
        }
        writeln!(f, "communication: {} field elements in {} rounds, {} tests", l.comm_field_elements, l.rounds, l.tests)?;
        for c in &self.checks {
            let status = if c.pass { "ok" } else { "EXCEEDED" };
            writeln!(f, "bound {}: predicted {:.0}, measured {} [{status}]", c.formula, c.predicted, c.measured)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub protocol: String,
    pub n: usize,
    pub role: &'static str,
    pub field_ops: u64,
    pub matvecs: u64,
    pub comm: u64,
    pub predicted_bound: Option<f64>,
    pub slope: Option<f64>,
}

pub const CSV_HEADER: &str = "protocol,n,role,field_ops,matvecs,comm,predicted_bound,slope";

impl BenchRow {
    pub fn csv(&self) -> String {
        let opt = |x: Option<f64>, prec: usize| x.map(|v| format!("{v:.prec$}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{}",
            self.protocol,
            self.n,
            self.role,
            self.field_ops,
            self.matvecs,
            self.comm,
            opt(self.predicted_bound, 0),
            opt(self.slope, 3)
        )
    }
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.csv());
    }
    out
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let m = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    (den > 0.0).then(|| num / den)
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub protocols: Vec<String>,
    pub sizes: Vec<usize>,
    pub nnz_per_row: usize,
    pub seed: u64,
    pub spec: FieldSpec,
    pub options: Options,
    pub with_prover: bool,
}

/// Runs every protocol at every size on a seeded random matrix with
/// `delta = 2n` unless overridden, and fills in the per-role slope.
pub fn bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>, Error> {
    let mut rows = Vec::new();
    for name in &cfg.protocols {
        let first = rows.len();
        for &n in &cfg.sizes {
            let a = SparseMatrix::random(cfg.spec.field(), n, cfg.nnz_per_row.min(n), cfg.seed ^ n as u64)?;
            let protocol = resolve(name, &cfg.options, &a)?;
            let out = run(&a, cfg.spec, protocol, Mode::FiatShamir, cfg.seed, &mut HonestProver)?;
            if !out.outcome.is_accept() {
                return Err(Error::Prover(format!("{name} at n={n}: {}", out.outcome)));
            }
            let predicted = predicted_verifier(&protocol, n as u64, a.mu()).map(|p| p.1);
            let l = out.ledger;
            let comm = l.comm_field_elements;
            rows.push(BenchRow {
                protocol: name.clone(),
                n,
                role: "verifier",
                field_ops: l.verifier.field_ops,
                matvecs: l.verifier.applications(),
                comm,
                predicted_bound: predicted,
                slope: None,
            });
            if cfg.with_prover {
                rows.push(BenchRow {
                    protocol: name.clone(),
                    n,
                    role: "prover",
                    field_ops: l.prover.field_ops,
                    matvecs: l.prover.applications(),
                    comm,
                    predicted_bound: None,
                    slope: None,
                });
            }
        }
        for role in ["verifier", "prover"] {
            let pts: Vec<(f64, f64)> = rows[first..]
                .iter()
                .filter(|r| r.role == role)
                .map(|r| (r.n as f64, r.field_ops as f64))
                .collect();
            let slope = loglog_slope(&pts);
            for r in rows[first..].iter_mut().filter(|r| r.role == role) {
                r.slope = slope;
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [64.0f64, 256.0, 1024.0].iter().map(|&n| (n, 3.0 * n.powf(1.5))).collect();
        assert!((loglog_slope(&pts).unwrap() - 1.5).abs() < 1e-9);
        assert_eq!(loglog_slope(&pts[..1]), None);
    }

    #[test]
    fn empty_sweep_is_header_only() {
        assert_eq!(to_csv(&[]), format!("{CSV_HEADER}\n"));
    }
}
