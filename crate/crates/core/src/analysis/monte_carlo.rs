use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::Serialize;

use crate::distributions::HardInstance;
use crate::error::{invalid, Error, Result};
use crate::mechanisms::Mechanism;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RngSeed {
    pub seed: u64,
}

impl RngSeed {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Draws one untruncated balanced index (one-based).
fn balanced_index(rng: &mut ChaCha8Rng, geo: &Geometric, d: usize) -> u64 {
    let block = geo.sample(rng);
    block * d as u64 + rng.random_range(1..=d as u64)
}

struct Sampler<'a> {
    inst: &'a HardInstance,
    geo: Geometric,
}

impl<'a> Sampler<'a> {
    fn new(inst: &'a HardInstance) -> Result<Self> {
        let geo = Geometric::new(inst.params.epsilon)
            .map_err(|e| invalid("epsilon", e.to_string()))?;
        Ok(Self { inst, geo })
    }

    /// Fills `idx` with zero-based grid indices of the shrunk market:
    /// bidder 1 first, then the middle bidders.
    ///
    /// Middle indices are drawn without truncation, `h` is taken from the
    /// untruncated sum, and indices beyond the grid are folded back by
    /// multiples of `d`, which preserves every residue.
    fn draw(&self, rng: &mut ChaCha8Rng, idx: &mut [usize]) {
        let d = self.inst.params.d;
        let span = (self.inst.params.trunc_blocks * d) as u64;
        let mut sum = 0u64;
        for slot in idx.iter_mut().skip(1) {
            let x = balanced_index(rng, &self.geo, d);
            sum += x;
            *slot = ((x - 1) % span) as usize;
        }
        let m = self.inst.family.m;
        let h = ((sum % d as u64) as usize).min(m - 1);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut j = h;
        for y in 0..=h {
            acc += self.inst.family.prob(h, y);
            if u < acc {
                j = y;
                break;
            }
        }
        idx[0] = j;
    }
}

/// Welford running mean of the per-profile payment total.
pub fn monte_carlo_revenue(
    mech: &Mechanism,
    inst: &HardInstance,
    samples: u64,
    seed: RngSeed,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(invalid("samples", "must be at least 1"));
    }
    let full = if inst.joint_n.same_grids(mech.grids()) {
        true
    } else if inst.joint_shrunk.same_grids(mech.grids()) {
        false
    } else {
        return Err(Error::GridMismatch(
            "mechanism grids match neither market of the instance".into(),
        ));
    };
    let sampler = Sampler::new(inst)?;
    let mut rng = seed.rng();
    let grid = mech.grid();
    let mut idx = vec![0usize; inst.n - 1];
    let mut profile = vec![0usize; grid.n_bidders()];
    let (mut mean, mut m2) = (0.0f64, 0.0f64);
    for k in 1..=samples {
        sampler.draw(&mut rng, &mut idx);
        profile[..idx.len()].copy_from_slice(&idx);
        if full {
            profile[inst.n - 1] = 0;
        }
        let x = mech.total_pay(grid.flat(&profile));
        let delta = x - mean;
        mean += delta / k as f64;
        m2 += delta * (x - mean);
    }
    let std_error = if samples > 1 {
        (m2 / (samples - 1) as f64 / samples as f64).sqrt()
    } else {
        0.0
    };
    Ok(McEstimate {
        estimate: mean,
        std_error,
        samples,
    })
}

/// Empirical law of `h` from untruncated middle-bidder draws.
pub fn sample_h_histogram(inst: &HardInstance, samples: u64, seed: RngSeed) -> Result<Vec<f64>> {
    if samples == 0 {
        return Err(invalid("samples", "must be at least 1"));
    }
    let sampler = Sampler::new(inst)?;
    let mut rng = seed.rng();
    let d = inst.params.d;
    let m = inst.family.m;
    let mut counts = vec![0u64; m];
    for _ in 0..samples {
        let sum: u64 = (0..inst.n_middle())
            .map(|_| balanced_index(&mut rng, &sampler.geo, d))
            .sum();
        counts[((sum % d as u64) as usize).min(m - 1)] += 1;
    }
    Ok(counts.iter().map(|&c| c as f64 / samples as f64).collect())
}
