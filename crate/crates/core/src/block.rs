//! Cartesian block decomposition of `ℝⁿ` and block-structured vectors.

use std::ops::Range;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

const PROB_SUM_TOL: f64 = 1e-12;

/// Decomposition of `ℝⁿ` into `d` consecutive blocks together with the
/// sampling law used to pick the block updated at each iteration.
///
/// Block indices are zero-based throughout the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockStructure {
    dims: Vec<usize>,
    probs: Vec<f64>,
    offsets: Vec<usize>,
    cumulative: Vec<f64>,
}

impl BlockStructure {
    pub fn new(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidStructure("at least one block is required".into()));
        }
        if dims.len() != probs.len() {
            return Err(Error::InvalidStructure(format!(
                "{} block dimensions but {} probabilities",
                dims.len(),
                probs.len()
            )));
        }
        if let Some(i) = dims.iter().position(|&n| n == 0) {
            return Err(Error::InvalidStructure(format!("block {i} has dimension 0")));
        }
        if let Some(i) = probs.iter().position(|&p| !(p > 0.0) || !p.is_finite()) {
            return Err(Error::InvalidStructure(format!(
                "block {i} has non-positive sampling probability {}",
                probs[i]
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidStructure(format!(
                "sampling probabilities sum to {total}, not 1"
            )));
        }

        let mut offsets = Vec::with_capacity(dims.len() + 1);
        offsets.push(0);
        for &n in &dims {
            offsets.push(offsets.last().unwrap() + n);
        }
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        // u < 1 always lands somewhere.
        *cumulative.last_mut().unwrap() = 1.0;

        Ok(Self {
            dims,
            probs,
            offsets,
            cumulative,
        })
    }

    /// Blocks of the given dimensions sampled uniformly.
    pub fn uniform(dims: Vec<usize>) -> Result<Self> {
        let d = dims.len().max(1);
        let probs = vec![1.0 / d as f64; dims.len()];
        Self::new(dims, probs)
    }

    /// `d` blocks of dimension `block_dim`, sampled uniformly.
    pub fn equal_blocks(d: usize, block_dim: usize) -> Result<Self> {
        Self::uniform(vec![block_dim; d])
    }

    pub fn num_blocks(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, block: usize) -> f64 {
        self.probs[block]
    }

    /// Total dimension `n = Σ nᵢ`.
    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn range(&self, block: usize) -> Range<usize> {
        self.offsets[block]..self.offsets[block + 1]
    }

    pub fn p_min(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn p_max(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }

    /// Draws a block index with probability `pᵢ` by inverting the cumulative
    /// distribution.
    pub fn sample_block<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.dims.len() == 1 {
            return 0;
        }
        let u: f64 = rng.random();
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.dims.len() - 1)
    }

    /// Probability-weighted block distance `Σᵢ pᵢ⁻¹ ‖x⁽ⁱ⁾ − y⁽ⁱ⁾‖²` on flat
    /// slices laid out according to this structure.
    pub fn block_distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_len(self.dim(), x.len())?;
        check_len(self.dim(), y.len())?;
        Ok((0..self.num_blocks())
            .map(|i| {
                let r = self.range(i);
                let sq: f64 = x[r.clone()]
                    .iter()
                    .zip(&y[r])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                sq / self.probs[i]
            })
            .sum())
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// A point of `ℝⁿ` tied to a [`BlockStructure`].
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector {
    structure: Arc<BlockStructure>,
    data: Vec<f64>,
}

impl BlockVector {
    pub fn new(structure: Arc<BlockStructure>, data: Vec<f64>) -> Result<Self> {
        check_len(structure.dim(), data.len())?;
        Ok(Self { structure, data })
    }

    pub fn zeros(structure: Arc<BlockStructure>) -> Self {
        let n = structure.dim();
        Self {
            structure,
            data: vec![0.0; n],
        }
    }

    /// Concatenates per-block pieces.
    pub fn from_blocks(structure: Arc<BlockStructure>, blocks: &[Vec<f64>]) -> Result<Self> {
        if blocks.len() != structure.num_blocks() {
            return Err(Error::DimensionMismatch {
                expected: structure.num_blocks(),
                got: blocks.len(),
            });
        }
        let mut data = Vec::with_capacity(structure.dim());
        for (i, b) in blocks.iter().enumerate() {
            check_len(structure.dims()[i], b.len())?;
            data.extend_from_slice(b);
        }
        Ok(Self { structure, data })
    }

    pub fn structure(&self) -> &Arc<BlockStructure> {
        &self.structure
    }

    pub fn block(&self, i: usize) -> &[f64] {
        &self.data[self.structure.range(i)]
    }

    pub fn block_mut(&mut self, i: usize) -> &mut [f64] {
        let r = self.structure.range(i);
        &mut self.data[r]
    }

    pub fn blocks(&self) -> Vec<Vec<f64>> {
        (0..self.structure.num_blocks())
            .map(|i| self.block(i).to_vec())
            .collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.data)
    }

    /// Block distance to `other`; both vectors must share the structure.
    pub fn distance(&self, other: &BlockVector) -> Result<f64> {
        if !Arc::ptr_eq(&self.structure, &other.structure) && self.structure != other.structure {
            return Err(Error::StructureMismatch);
        }
        self.structure.block_distance(&self.data, &other.data)
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_structures() {
        assert!(BlockStructure::new(vec![], vec![]).is_err());
        assert!(BlockStructure::new(vec![1, 0], vec![0.5, 0.5]).is_err());
        assert!(BlockStructure::new(vec![1, 1], vec![1.0, 0.0]).is_err());
        assert!(BlockStructure::new(vec![1, 1], vec![0.5, 0.6]).is_err());
        assert!(BlockStructure::new(vec![1, 1], vec![0.5]).is_err());
    }

    #[test]
    fn derived_quantities() {
        let s = BlockStructure::new(vec![2, 3, 1], vec![0.2, 0.5, 0.3]).unwrap();
        assert_eq!(s.dim(), 6);
        assert_eq!(s.range(1), 2..5);
        assert_eq!(s.p_min(), 0.2);
        assert_eq!(s.p_max(), 0.5);
    }

    #[test]
    fn single_block_is_always_drawn() {
        let s = BlockStructure::uniform(vec![3]).unwrap();
        let mut rng = rng_from_seed(1);
        assert!((0..1000).all(|_| s.sample_block(&mut rng) == 0));
    }

    #[test]
    fn uniform_sampling_frequencies() {
        let s = BlockStructure::uniform(vec![1, 1, 1]).unwrap();
        let mut rng = rng_from_seed(2);
        let draws = 300_000;
        let mut counts = [0usize; 3];
        for _ in 0..draws {
            counts[s.sample_block(&mut rng)] += 1;
        }
        for c in counts {
            let freq = c as f64 / draws as f64;
            assert!((freq - 1.0 / 3.0).abs() <= 0.01, "frequency {freq}");
        }
    }

    #[test]
    fn skewed_sampling_frequency() {
        let s = BlockStructure::new(vec![1, 1], vec![0.9, 0.1]).unwrap();
        let mut rng = rng_from_seed(3);
        let draws = 100_000;
        let second = (0..draws).filter(|_| s.sample_block(&mut rng) == 1).count();
        let freq = second as f64 / draws as f64;
        assert!((0.09..=0.11).contains(&freq), "frequency {freq}");
    }

    #[test]
    fn block_distance_examples() {
        let s = Arc::new(BlockStructure::uniform(vec![1, 1]).unwrap());
        let x = BlockVector::new(s.clone(), vec![1.0, 2.0]).unwrap();
        let y = BlockVector::new(s.clone(), vec![0.0, 0.0]).unwrap();
        assert_eq!(x.distance(&x).unwrap(), 0.0);
        assert_eq!(x.distance(&y).unwrap(), 10.0);

        let other = Arc::new(BlockStructure::uniform(vec![2]).unwrap());
        let z = BlockVector::zeros(other);
        assert!(matches!(x.distance(&z), Err(Error::StructureMismatch)));
    }

    proptest! {
        #[test]
        fn distance_sandwich(
            raw in proptest::collection::vec(0.05f64..1.0, 4),
            x in proptest::collection::vec(-10.0f64..10.0, 8),
            y in proptest::collection::vec(-10.0f64..10.0, 8),
        ) {
            let total: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.iter().map(|p| p / total).collect();
            let probs_sum: f64 = probs.iter().sum();
            let mut probs = probs;
            probs[3] += 1.0 - probs_sum;
            let s = BlockStructure::new(vec![2; 4], probs).unwrap();
            let d = s.block_distance(&x, &y).unwrap();
            let sq = dist(&x, &y).powi(2);
            prop_assert!(s.p_min() * d <= sq * (1.0 + 1e-12) + 1e-12);
            prop_assert!(sq <= s.p_max() * d * (1.0 + 1e-12) + 1e-12);
        }

        #[test]
        fn blocks_reassemble(x in proptest::collection::vec(-5.0f64..5.0, 6)) {
            let s = Arc::new(BlockStructure::uniform(vec![1, 3, 2]).unwrap());
            let v = BlockVector::new(s.clone(), x.clone()).unwrap();
            let w = BlockVector::from_blocks(s, &v.blocks()).unwrap();
            prop_assert_eq!(w.as_slice(), &x[..]);
        }
    }
}
