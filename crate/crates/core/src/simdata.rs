//! Seeded generators for the four simulation scenarios.
//!
//! All randomness comes from ChaCha8 with one stream per role: stream 0 for
//! the design, stream 1 for SNP allele frequencies, stream 2 for the noise.
//! Replicate seeds are derived from a master seed with SplitMix64.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{standardize, DesignMatrix};

const DESIGN_STREAM: u64 = 0;
const ALLELE_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finalizer, used to derive independent seeds from tuples.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for an ordered tuple of indices under a master seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix_seed(master, 0), |s, &k| mix_seed(s, k.wrapping_add(1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: u8,
    pub n: usize,
    pub p: usize,
    pub p0: usize,
    #[serde(default = "default_beta")]
    pub beta_value: f64,
    #[serde(default = "default_corr")]
    pub corr_b: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_beta() -> f64 {
    3.0
}

fn default_corr() -> f64 {
    0.3
}

impl ScenarioConfig {
    pub fn new(scenario: u8, n: usize, p: usize, p0: usize, seed: u64) -> Self {
        ScenarioConfig {
            scenario,
            n,
            p,
            p0,
            beta_value: default_beta(),
            corr_b: default_corr(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.scenario) {
            return Err(Error::invalid(format!(
                "scenario must be 1..=4, got {}",
                self.scenario
            )));
        }
        if self.n < 2 || self.p < 1 {
            return Err(Error::invalid(format!(
                "need n >= 2 and p >= 1, got n = {}, p = {}",
                self.n, self.p
            )));
        }
        if self.p0 > self.p {
            return Err(Error::invalid(format!(
                "p0 = {} exceeds p = {}",
                self.p0, self.p
            )));
        }
        if !(0.0..1.0).contains(&self.corr_b) {
            return Err(Error::invalid(format!(
                "corr_b must lie in [0, 1), got {}",
                self.corr_b
            )));
        }
        if !self.beta_value.is_finite() {
            return Err(Error::invalid("beta_value must be finite"));
        }
        Ok(())
    }

    /// Design correlation used by this scenario.
    pub fn design_correlation(&self) -> f64 {
        match self.scenario {
            3 | 4 => self.corr_b,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedDataset {
    /// Design the response was generated from (SNP designs are already
    /// standardized genotypes).
    pub x: DesignMatrix,
    pub y: Vec<f64>,
    pub beta: Vec<f64>,
    pub support: Vec<usize>,
}

/// Rows i.i.d. N(0, (1-b) I + b 11') via `sqrt(b) z0 1 + sqrt(1-b) z`.
pub fn gen_gaussian_design(n: usize, p: usize, b: f64, seed: u64) -> Result<DesignMatrix> {
    if !(0.0..1.0).contains(&b) {
        return Err(Error::invalid(format!(
            "equicorrelation must lie in [0, 1), got {b}"
        )));
    }
    let mut rng = rng_for(seed, DESIGN_STREAM);
    let (shared, own) = (b.sqrt(), (1.0 - b).sqrt());
    let mut data = vec![0.0; n * p];
    for i in 0..n {
        let z0: f64 = if b > 0.0 { rng.sample(StandardNormal) } else { 0.0 };
        for j in 0..p {
            let z: f64 = rng.sample(StandardNormal);
            data[j * n + i] = shared * z0 + own * z;
        }
    }
    DesignMatrix::from_column_major(n, p, data)
}

/// Genotype probabilities (0, 1, 2 copies of the major allele) for minor
/// allele frequency `pi`.
pub fn genotype_probabilities(pi: f64) -> [f64; 3] {
    [pi * pi, 2.0 * pi * (1.0 - pi), (1.0 - pi) * (1.0 - pi)]
}

/// Raw genotype counts with per-column minor allele frequency ~ U(0.1, 0.5).
pub fn gen_snp_genotypes(n: usize, p: usize, seed: u64) -> Result<(DesignMatrix, Vec<f64>)> {
    if n < 1 || p < 1 {
        return Err(Error::invalid("SNP design needs n, p >= 1"));
    }
    let mut freq_rng = rng_for(seed, ALLELE_STREAM);
    let freqs: Vec<f64> = (0..p).map(|_| freq_rng.gen_range(0.1..0.5)).collect();
    let mut rng = rng_for(seed, DESIGN_STREAM);
    let mut data = Vec::with_capacity(n * p);
    for &pi in &freqs {
        let [p0, p1, _] = genotype_probabilities(pi);
        for _ in 0..n {
            let u: f64 = rng.gen();
            data.push(if u < p0 {
                0.0
            } else if u < p0 + p1 {
                1.0
            } else {
                2.0
            });
        }
    }
    Ok((DesignMatrix::from_column_major(n, p, data)?, freqs))
}

/// Standardized SNP design.
pub fn gen_snp_design(n: usize, p: usize, seed: u64) -> Result<DesignMatrix> {
    let (raw, _) = gen_snp_genotypes(n, p, seed)?;
    standardize(&raw)
}

/// Standard Cauchy draw by inverse CDF.
#[inline]
pub(crate) fn cauchy(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.gen();
    (std::f64::consts::PI * (u - 0.5)).tan()
}

/// Scenarios 1-3: `y = X beta + eps`; scenario 4: `y = exp(4 + 0.05 beta'x) + eps`;
/// `eps` i.i.d. standard Cauchy.
pub fn gen_response(x: &DesignMatrix, beta: &[f64], scenario: u8, seed: u64) -> Result<Vec<f64>> {
    if beta.len() != x.p() {
        return Err(Error::invalid("beta length does not match the design"));
    }
    if !(1..=4).contains(&scenario) {
        return Err(Error::invalid(format!("unknown scenario {scenario}")));
    }
    let index = x.matvec(beta);
    let mut rng = rng_for(seed, NOISE_STREAM);
    Ok(index
        .into_iter()
        .map(|u| {
            let eps = cauchy(&mut rng);
            if scenario == 4 {
                (4.0 + 0.05 * u).exp() + eps
            } else {
                u + eps
            }
        })
        .collect())
}

pub fn true_beta(p: usize, p0: usize, value: f64) -> Vec<f64> {
    (0..p).map(|j| if j < p0 { value } else { 0.0 }).collect()
}

/// Full dataset for one scenario configuration.
pub fn generate(config: &ScenarioConfig) -> Result<SimulatedDataset> {
    config.validate()?;
    let x = match config.scenario {
        2 => gen_snp_design(config.n, config.p, config.seed)?,
        _ => gen_gaussian_design(config.n, config.p, config.design_correlation(), config.seed)?,
    };
    let beta = true_beta(config.p, config.p0, config.beta_value);
    let y = gen_response(&x, &beta, config.scenario, config.seed)?;
    Ok(SimulatedDataset {
        x,
        y,
        beta,
        support: (0..config.p0).collect(),
    })
}

/// Writes `x_1..x_p,y` with a header row.
pub fn dataset_to_csv(data: &SimulatedDataset) -> String {
    use crate::runner::format::fmt_full;
    let mut out = String::new();
    for j in 0..data.x.p() {
        out.push_str(&format!("x{},", j + 1));
    }
    out.push_str("y\n");
    for i in 0..data.x.n() {
        for j in 0..data.x.p() {
            out.push_str(&fmt_full(data.x.get(i, j)));
            out.push(',');
        }
        out.push_str(&fmt_full(data.y[i]));
        out.push('\n');
    }
    out
}
