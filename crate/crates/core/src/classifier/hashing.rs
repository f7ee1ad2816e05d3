//! Hashed bag-of-n-grams features.

use std::hash::Hasher;

use fnv::FnvHasher;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Identifier of the string hash, recorded in model files.
pub const HASH_ID: &str = "fnv1a64";

/// Default feature dimensionality.
pub const DEFAULT_DIM: usize = 1 << 18;

/// 64-bit FNV-1a over the UTF-8 bytes of `s`.
pub fn hash_str(s: &str) -> u64 {
    let mut h = FnvHasher::default();
    h.write(s.as_bytes());
    h.finish()
}

/// Sparse vector with strictly increasing indices in `[0, dim)` and
/// strictly positive finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseFeatureVector<S> {
    indices: Vec<u32>,
    values: Vec<S>,
    dim: usize,
}

impl<S: Scalar> SparseFeatureVector<S> {
    pub fn new(indices: Vec<u32>, values: Vec<S>, dim: usize) -> Result<Self> {
        if indices.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: indices.len(),
                actual: values.len(),
            });
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("feature indices must be strictly increasing".into()));
        }
        if indices.last().is_some_and(|&i| i as usize >= dim) {
            return Err(Error::InvalidConfig(format!("feature index out of range for dim {dim}")));
        }
        if values.iter().any(|v| !v.is_finite() || *v <= S::zero()) {
            return Err(Error::InvalidConfig("feature values must be finite and positive".into()));
        }
        Ok(Self { indices, values, dim })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            indices: Vec::new(),
            values: Vec::new(),
            dim,
        }
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, S)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }
}

/// Binary presence of hashed word unigrams and bigrams (tokens split on
/// whitespace), each reduced modulo `dim`.
pub fn featurize<S: Scalar>(text: &str, dim: usize) -> SparseFeatureVector<S> {
    assert!(dim >= 2, "feature dimensionality must be at least 2");
    assert!(dim <= u32::MAX as usize + 1, "feature dimensionality exceeds u32 range");
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let mut indices: Vec<u32> = Vec::with_capacity(tokens.len() * 2);
    let mut bigram = String::new();
    for (i, token) in tokens.iter().enumerate() {
        indices.push((hash_str(token) % dim as u64) as u32);
        if i + 1 < tokens.len() {
            bigram.clear();
            bigram.push_str(token);
            bigram.push(' ');
            bigram.push_str(tokens[i + 1]);
            indices.push((hash_str(&bigram) % dim as u64) as u32);
        }
    }
    indices.sort_unstable();
    indices.dedup();
    let values = vec![S::one(); indices.len()];
    SparseFeatureVector { indices, values, dim }
}
