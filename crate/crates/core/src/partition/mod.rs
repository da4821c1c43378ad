//! Rounding spectral information into cuts and partitions.

mod baseline;
mod cheeger;
mod demands;
mod kpart;
mod separator;
mod sse;
mod sweep;

pub use baseline::{clique_expansion, clique_expansion_baseline, BaselineResult, CLIQUE_MAX_RANK, CIRCULANT_DEGREE};
pub use cheeger::{cheeger_check, CheegerReport};
pub use demands::{sparsest_cut_demands, DemandInstance, DemandsConfig, DemandsResult};
pub use kpart::{multi_partition, multi_partition_with, KpartConfig, KpartResult};
pub use separator::{orthogonal_separator, OrthogonalSeparator};
pub use sse::{small_set_expansion, small_set_expansion_with, SseConfig, SseResult};
pub use sweep::{median_split, sweep_bound, sweep_cut, sweep_cut_nonneg, sweep_nonneg_bound};
