pub mod analyze;
pub mod calka;
pub mod kobayashi;
pub mod retract;
pub mod semigroup;
