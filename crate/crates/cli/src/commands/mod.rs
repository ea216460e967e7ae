pub mod equivalence;
pub mod evolve;
pub mod kraus_verify;
pub mod sweep;
