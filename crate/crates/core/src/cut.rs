//! Cut and partition results.

use serde::{Deserialize, Serialize};

use crate::{Hypergraph, Result, Scalar};

/// Which denominator an expansion value uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioType {
    /// `cut / min(vol S, vol V\S)`.
    Symmetric,
    /// `cut / vol S`.
    OneSided,
}

/// A vertex set together with its expansion and the vector it was rounded from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutResult<T> {
    pub set: Vec<usize>,
    pub expansion: T,
    pub ratio_type: RatioType,
    pub certificate: Vec<T>,
}

impl<T: Scalar> CutResult<T> {
    /// Builds a result, computing the expansion from the hypergraph.
    pub fn evaluate(
        h: &Hypergraph<T>,
        mut set: Vec<usize>,
        ratio_type: RatioType,
        certificate: Vec<T>,
    ) -> Result<Self> {
        set.sort_unstable();
        let expansion = match ratio_type {
            RatioType::Symmetric => h.expansion(&set)?,
            RatioType::OneSided => h.one_sided_expansion(&set)?,
        };
        Ok(CutResult {
            set,
            expansion,
            ratio_type,
            certificate,
        })
    }

    /// Recomputes the expansion from scratch.
    pub fn recompute(&self, h: &Hypergraph<T>) -> Result<T> {
        match self.ratio_type {
            RatioType::Symmetric => h.expansion(&self.set),
            RatioType::OneSided => h.one_sided_expansion(&self.set),
        }
    }
}

/// Disjoint vertex sets with their (symmetric) expansions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionResult<T> {
    pub sets: Vec<Vec<usize>>,
    pub expansions: Vec<T>,
    pub max_expansion: T,
    /// Number of sets that was asked for.
    pub requested: usize,
    /// False when fewer than `requested` sets were accepted.
    pub complete: bool,
}

impl<T: Scalar> PartitionResult<T> {
    pub fn new(h: &Hypergraph<T>, mut sets: Vec<Vec<usize>>, requested: usize) -> Result<Self> {
        for s in &mut sets {
            s.sort_unstable();
        }
        let expansions = sets
            .iter()
            .map(|s| h.expansion(s))
            .collect::<Result<Vec<T>>>()?;
        let max_expansion = expansions.iter().copied().fold(T::zero(), T::max);
        let complete = sets.len() >= requested;
        Ok(PartitionResult {
            sets,
            expansions,
            max_expansion,
            requested,
            complete,
        })
    }

    pub fn is_disjoint(&self) -> bool {
        let mut all: Vec<usize> = self.sets.iter().flatten().copied().collect();
        let len = all.len();
        all.sort_unstable();
        all.dedup();
        all.len() == len
    }
}
