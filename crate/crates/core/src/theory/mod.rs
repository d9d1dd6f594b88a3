//! Executable learnability checks for finite-support distributions.
//!
//! * [`is_reconstructible`] / [`find_ambiguous_pair`]: column independence of
//!   bag-generation matrices and, when it fails, two label distributions that
//!   no learner can tell apart from bags.
//! * [`is_label_aligned_dist`], [`is_label_aligned_process`],
//!   [`check_relaxed`]: alignment between bag frequencies and posteriors.
//! * [`advantage`]: how salient the most frequent bag labels are around an atom.
//! * [`flip_distribution`]: a bag-equivalent distribution whose Bayes rule
//!   differs wherever alignment fails.

mod advantage;
mod alignment;
mod reconstruct;
mod report;

pub use advantage::{advantage, advantage_report, AdvantageEntry, AdvantageReport};
pub use alignment::{
    aligned_at, check_relaxed, flip_distribution, flipped_atoms, frequency_argmax, is_atom_aligned,
    is_label_aligned_dist, is_label_aligned_process, near_optimal_labels, probe_alignment, ProbeSet,
    ProcessAlignment, RelaxedSpec,
};
pub use reconstruct::{find_ambiguous_pair, is_reconstructible, DEFAULT_RANK_TOL};
pub use report::{theory_report, AtomReport, TheoryReport};
