//! Exact invariants of topological Markov chains equipped with a one-block
//! flip: flip signatures, Lind zeta functions, fixed-point counts and
//! equivalence witnesses between flip pairs.

pub mod dynamics;
pub mod equivalence;
pub mod flip;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod zeta;

pub use dynamics::{HigherBlock, PeriodicPoint};
pub use equivalence::{EquivalenceWitness, NonConjugacyCertificate, SseChain, WitnessKind};
pub use flip::{FlipPair, ZeroOneMatrix};
pub use kernel::{CycleBasis, FlipSignature};
pub use linalg::{IntMatrix, IntPolynomial, RMatrix, Rational};
pub use zeta::{FixedPointTable, ZetaSeries};
