//! Synthetic coincidence data with counting noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::tomography::{MeasMatrix, MATRIX_DIM};

/// Counts behind one (input, basis) block at experimental scale.
pub const DEFAULT_COUNTS: u64 = 4600;

/// Multinomial draw of `total` events over `probs`, as successive binomials.
pub fn multinomial<R: rand::Rng + ?Sized>(rng: &mut R, total: u64, probs: &[f64]) -> Result<Vec<u64>> {
    let mut left = total;
    let mut mass = probs.iter().sum::<f64>();
    let mut out = Vec::with_capacity(probs.len());
    for (i, &p) in probs.iter().enumerate() {
        if i + 1 == probs.len() {
            out.push(left);
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let k = Binomial::new(left, q)
            .map_err(|e| Error::Config(e.to_string()))?
            .sample(rng);
        out.push(k);
        left -= k;
        mass -= p;
    }
    Ok(out)
}

/// Counts for every (row, basis block) of `model`, `counts` events each.
pub fn sample_counts(model: &MeasMatrix, counts: u64, seed: u64) -> Result<[[u64; MATRIX_DIM]; MATRIX_DIM]> {
    if counts == 0 {
        return Err(Error::Config("counts per block must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = [[0; MATRIX_DIM]; MATRIX_DIM];
    for (r, row) in out.iter_mut().enumerate() {
        for b in [0, 4] {
            let drawn = multinomial(&mut rng, counts, &model.row(r)[b..b + 4])?;
            row[b..b + 4].copy_from_slice(&drawn);
        }
    }
    Ok(out)
}

/// Block-normalised frequencies from raw counts.
pub fn frequencies(counts: &[[u64; MATRIX_DIM]; MATRIX_DIM]) -> Result<MeasMatrix> {
    let mut entries = [[0.0; MATRIX_DIM]; MATRIX_DIM];
    for (r, row) in counts.iter().enumerate() {
        for b in [0, 4] {
            let total: u64 = row[b..b + 4].iter().sum();
            if total == 0 {
                return Err(Error::DegenerateNormalization(0.0));
            }
            for k in b..b + 4 {
                entries[r][k] = row[k] as f64 / total as f64;
            }
        }
    }
    MeasMatrix::new(entries)
}

/// Noisy measured matrix drawn from `model`.
pub fn synthesize(model: &MeasMatrix, counts: u64, seed: u64) -> Result<MeasMatrix> {
    frequencies(&sample_counts(model, counts, seed)?)
}
