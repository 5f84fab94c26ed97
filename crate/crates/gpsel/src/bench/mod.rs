//! Benchmark engine: simulated designs, the replicated train/test protocol
//! with MSE/HITS/FP accounting, the response-translation probe, and the
//! repeated-split protocol for real datasets.

mod run;

pub use run::{real_data_protocol, run_replicates, shift_probe};
#[cfg(test)]
pub(crate) use run::shift_probe_with_method;

use crate::data::{Column, Dataset};
use crate::model::ModelIndicator;
use crate::rng::{derive, Purpose};
use crate::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// Covariate generation scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DesignKind {
    /// Independent standard normal columns.
    Iid,
    /// Three blocks sharing latent factors: x_i = (z_i + 3 z_g)/sqrt(10)
    /// with g the block factor, giving within-block correlation 0.9.
    FactorGroups,
    /// AR(1)-style correlation rho^|i-j|.
    ArCorr(f64),
}

/// One simulated benchmark design.
#[derive(Debug, Clone)]
pub struct SimExample {
    pub id: u8,
    pub p: usize,
    /// Intercept followed by the p slope coefficients.
    pub truth_beta: Vec<f64>,
    pub noise_sd: f64,
    pub design: DesignKind,
}

impl SimExample {
    /// The six standard designs.
    pub fn standard(id: u8) -> Result<SimExample> {
        let ex = match id {
            1 => SimExample {
                id,
                p: 10,
                truth_beta: vec![2.0, 0.0, 1.0, 2.0, 0.0, 0.0, -2.0, -1.5, 0.0, 0.0, 0.0],
                noise_sd: 1.0,
                design: DesignKind::Iid,
            },
            2 => SimExample {
                id,
                p: 10,
                truth_beta: vec![2.0, 0.0, 1.0, 2.0, 0.0, 0.0, -2.0, -1.5, 0.0, 0.0, 0.0],
                noise_sd: 1.0,
                design: DesignKind::FactorGroups,
            },
            3 => SimExample {
                id,
                p: 8,
                truth_beta: vec![0.0, 3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0],
                noise_sd: 3.0,
                design: DesignKind::ArCorr(0.5),
            },
            4 => SimExample {
                id,
                p: 8,
                truth_beta: vec![0.0; 9]
                    .into_iter()
                    .enumerate()
                    .map(|(i, _)| if i == 0 { 0.0 } else { 0.85 })
                    .collect(),
                noise_sd: 1.0,
                design: DesignKind::ArCorr(0.5),
            },
            5 => SimExample {
                id,
                p: 9,
                truth_beta: vec![0.0, 0.0, 2.0, 0.0, -3.0, 0.0, 0.0, 0.0, 0.0, 0.0],
                noise_sd: 1.0,
                design: DesignKind::ArCorr(0.7),
            },
            6 => SimExample {
                id,
                p: 8,
                truth_beta: vec![2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
                noise_sd: 2.0,
                design: DesignKind::ArCorr(0.5),
            },
            other => {
                return Err(Error::Domain(format!(
                    "no standard example {other}; valid ids are 1..6"
                )))
            }
        };
        debug_assert_eq!(ex.truth_beta.len(), ex.p + 1);
        Ok(ex)
    }

    /// Indicator of the truly influential variables.
    pub fn truth_support(&self) -> ModelIndicator {
        ModelIndicator::from_bits(self.truth_beta[1..].iter().map(|b| *b != 0.0).collect())
    }
}

fn draw_design(ex: &SimExample, n: usize, rng: &mut ChaCha12Rng) -> Vec<Vec<f64>> {
    let p = ex.p;
    let mut cols = vec![vec![0.0_f64; n]; p];
    match ex.design {
        DesignKind::Iid => {
            for i in 0..n {
                for col in cols.iter_mut() {
                    col[i] = rng.sample(StandardNormal);
                }
            }
        }
        DesignKind::FactorGroups => {
            let inv = 1.0 / 10.0_f64.sqrt();
            for i in 0..n {
                let z: Vec<f64> = (0..13).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                for (j, col) in cols.iter_mut().enumerate() {
                    let factor = match j {
                        0 | 1 => z[10],
                        2..=4 => z[11],
                        _ => z[12],
                    };
                    col[i] = (z[j] + 3.0 * factor) * inv;
                }
            }
        }
        DesignKind::ArCorr(rho) => {
            let scale = (1.0 - rho * rho).sqrt();
            for i in 0..n {
                let mut prev: f64 = rng.sample(StandardNormal);
                cols[0][i] = prev;
                for col in cols.iter_mut().skip(1) {
                    let z: f64 = rng.sample(StandardNormal);
                    prev = rho * prev + scale * z;
                    col[i] = prev;
                }
            }
        }
    }
    cols
}

fn response(ex: &SimExample, cols: &[Vec<f64>], n: usize, rng: &mut ChaCha12Rng) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let mut mean = ex.truth_beta[0];
            for (j, col) in cols.iter().enumerate() {
                mean += ex.truth_beta[j + 1] * col[i];
            }
            let eps: f64 = rng.sample(StandardNormal);
            mean + ex.noise_sd * eps
        })
        .collect()
}

fn to_dataset(name: String, cols: Vec<Vec<f64>>, y: Vec<f64>) -> Dataset {
    let columns = cols
        .into_iter()
        .enumerate()
        .map(|(j, values)| Column {
            name: format!("x{}", j + 1),
            values,
        })
        .collect();
    Dataset::new(name, y, columns).expect("generated data is well formed")
}

/// Deterministic draw of one train/test pair. Separate streams per phase so
/// the train set is unchanged by the test size.
pub fn generate_example(
    ex: &SimExample,
    n: usize,
    n_test: usize,
    seed: u64,
) -> (Dataset, Dataset) {
    let domain = ex.id as u64;
    let mut rng = derive(seed, domain, 0, Purpose::TrainDesign);
    let train_cols = draw_design(ex, n, &mut rng);
    let mut rng = derive(seed, domain, 0, Purpose::TrainNoise);
    let train_y = response(ex, &train_cols, n, &mut rng);
    let mut rng = derive(seed, domain, 0, Purpose::TestDesign);
    let test_cols = draw_design(ex, n_test, &mut rng);
    let mut rng = derive(seed, domain, 0, Purpose::TestNoise);
    let test_y = response(ex, &test_cols, n_test, &mut rng);
    (
        to_dataset(format!("example{}-train", ex.id), train_cols, train_y),
        to_dataset(format!("example{}-test", ex.id), test_cols, test_y),
    )
}

/// Per-method aggregate metrics. HITS is absent when the generating truth
/// has no influential variables; both HITS and FP are absent for real data.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub mse: f64,
    pub mse_se: f64,
    pub hits: Option<f64>,
    pub hits_se: Option<f64>,
    pub fp: Option<f64>,
    pub fp_se: Option<f64>,
}

/// One report row.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: String,
    pub metrics: Metrics,
    /// Per-variable selection frequencies over replicates/splits.
    pub freqs: Vec<f64>,
    pub failures: usize,
}

impl MethodSummary {
    /// Mean number of selected variables (sum of selection frequencies).
    pub fn mean_selected(&self) -> f64 {
        self.freqs.iter().sum()
    }
}

/// Aggregated benchmark outcome, bit-reproducible for a fixed
/// (seed, method set, replicate count).
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub title: String,
    pub var_names: Vec<String>,
    pub rows: Vec<MethodSummary>,
    pub reps: usize,
    pub seed: u64,
}
