//! Seeded random-ensemble experiments, one CSV row per sample.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use snwit_core::qstate::{self, MixingWeights};
use snwit_core::witness::{self, CHAIN_SLACK};
use snwit_core::{osc, CoefficientOptions, WitnessCoefficients};

use crate::io::fmt_sig10;
use crate::CliError;

pub const CSV_HEADER: [&str; 12] = [
    "sample_id",
    "k",
    "dim",
    "n_pure",
    "seed",
    "lambda_exact",
    "lambda_numeric",
    "theta",
    "zeta",
    "eta",
    "P",
    "purity",
];

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub k: usize,
    pub dim: usize,
    pub n_pure: usize,
    pub samples: usize,
    pub seed: u64,
    pub restarts: usize,
    /// 0 means one worker per core.
    pub threads: usize,
    /// Draw constituents of Schmidt rank at most this instead of Haar pure states.
    pub schmidt_rank: Option<usize>,
    pub weights: MixingWeights,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            k: 3,
            dim: 3,
            n_pure: 2000,
            samples: 50,
            seed: 0,
            restarts: 32,
            threads: 0,
            schmidt_rank: None,
            weights: MixingWeights::Equal,
        }
    }
}

impl EnsembleConfig {
    fn validate(&self) -> Result<(), CliError> {
        let positive = [("samples", self.samples), ("pure-count", self.n_pure), ("restarts", self.restarts)];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(CliError::Usage(format!("--{name} must be at least 1")));
        }
        if self.k < 2 {
            return Err(CliError::Usage(format!("--k must be at least 2, got {}", self.k)));
        }
        if self.dim < 2 {
            return Err(CliError::Usage(format!("--dim must be at least 2, got {}", self.dim)));
        }
        if let Some(r) = self.schmidt_rank {
            if r == 0 || r > self.dim {
                return Err(CliError::Usage(format!("--schmidt-rank must lie in 1..={}, got {r}", self.dim)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleRecord {
    pub sample_id: usize,
    pub k: usize,
    pub dim: usize,
    pub n_pure: usize,
    pub seed: u64,
    pub coefficients: WitnessCoefficients,
    pub purity: f64,
}

impl EnsembleRecord {
    pub fn lambda_numeric(&self) -> f64 {
        self.coefficients.lambda_numeric.expect("ensemble rows always carry the numeric value")
    }

    fn fields(&self) -> Vec<String> {
        let c = &self.coefficients;
        vec![
            self.sample_id.to_string(),
            self.k.to_string(),
            self.dim.to_string(),
            self.n_pure.to_string(),
            self.seed.to_string(),
            c.lambda.map(fmt_sig10).unwrap_or_default(),
            fmt_sig10(self.lambda_numeric()),
            fmt_sig10(c.theta),
            fmt_sig10(c.zeta),
            fmt_sig10(c.eta),
            fmt_sig10(c.big_p),
            fmt_sig10(self.purity),
        ]
    }
}

/// The random stream of one sample: the master seed, stream `sample_id`.
pub fn sample_rng(seed: u64, sample_id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample_id as u64);
    rng
}

pub fn run_sample(cfg: &EnsembleConfig, sample_id: usize) -> Result<EnsembleRecord, CliError> {
    let mut rng = sample_rng(cfg.seed, sample_id);
    let rho = match cfg.schmidt_rank {
        Some(r) => qstate::random_sn_bounded(cfg.dim, r, cfg.n_pure, &mut rng)?,
        None => qstate::random_mixed_weighted(cfg.dim, cfg.n_pure, cfg.weights, &mut rng)?,
    };
    let opts = CoefficientOptions { with_numeric: true, restarts: cfg.restarts };
    let coefficients = witness::coefficients_from_spectrum(&osc(&rho), cfg.k, &opts, &mut rng)?;
    Ok(EnsembleRecord {
        sample_id,
        k: cfg.k,
        dim: cfg.dim,
        n_pure: cfg.n_pure,
        seed: cfg.seed,
        coefficients,
        purity: qstate::purity(&rho),
    })
}

/// All samples, in sample order regardless of the worker count.
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<Vec<EnsembleRecord>, CliError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..cfg.samples).into_par_iter().map(|id| run_sample(cfg, id)).collect())
}

/// Writes the header and rows; each row's coefficient chain is checked first.
pub fn write_csv<W: Write>(records: &[EnsembleRecord], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        r.coefficients
            .check_chain(CHAIN_SLACK)
            .map_err(|e| CliError::Core(e).context(format!("sample {}", r.sample_id)))?;
        w.write_record(r.fields())?;
    }
    w.flush().map_err(|source| CliError::Io { path: "<csv output>".into(), source })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> EnsembleConfig {
        EnsembleConfig { k: 2, dim: 3, n_pure: 5, samples: 4, seed: 9, restarts: 4, ..Default::default() }
    }

    #[test]
    fn rejects_empty_runs() {
        for cfg in [
            EnsembleConfig { samples: 0, ..small() },
            EnsembleConfig { n_pure: 0, ..small() },
            EnsembleConfig { k: 1, ..small() },
            EnsembleConfig { schmidt_rank: Some(4), ..small() },
        ] {
            assert!(matches!(run_ensemble(&cfg), Err(CliError::Usage(_))));
        }
    }

    #[test]
    fn samples_are_independent_of_order() {
        let cfg = small();
        let all = run_ensemble(&cfg).unwrap();
        assert_eq!(all[2], run_sample(&cfg, 2).unwrap());
        assert_ne!(all[0].purity, all[1].purity);
    }

    #[test]
    fn csv_layout() {
        let cfg = EnsembleConfig { k: 5, dim: 3, ..small() };
        let mut buf = Vec::new();
        write_csv(&run_ensemble(&cfg).unwrap(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 12);
        assert_eq!(&row[..5], &["0", "5", "3", "5", "9"]);
        assert_eq!(row[5], "", "no exact value for k = 5");
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn chain_violation_aborts() {
        let mut rec = run_sample(&small(), 0).unwrap();
        rec.coefficients.theta = rec.coefficients.big_p + 1.0;
        let err = write_csv(&[rec], Vec::new()).unwrap_err();
        assert!(err.to_string().contains("sample 0"), "{err}");
    }
}
