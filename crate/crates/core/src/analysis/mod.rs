//! Partition comparison, Markov-time sweeps and stable-plateau detection.

mod nmi;
mod plateau;
mod sweep;

pub use nmi::nmi;
pub use plateau::{detect_plateaus, Plateau};
pub use sweep::{sweep, Optimiser, SweepConfig, SweepRecord};
