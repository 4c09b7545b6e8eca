//! A desk-scale algorithmic-statistics workbench.
//!
//! The crate fixes one bit-exact reference machine (KVM-8, [`vm`]),
//! enumerates every program up to a length budget under a step cap
//! ([`enumerate`]), and reads complexity quantities out of the resulting
//! tables ([`complexity`]): plain, conditional and time-bounded
//! complexity, and the measured busy-beaver bound. On top of that it
//! harvests every machine-realizable finite-set model ([`models`]) and
//! builds the three profile curves — resource-bounded, structure function,
//! stochasticity — together with the curve-distance machinery that tests
//! their coincidence empirically ([`profiles`]).
//!
//! Every quantity is a `T`-bounded measurement on this one machine, never
//! a claim about the unbounded quantities; reports carry their `(L, T,
//! machine)` provenance. A deliberately naive re-implementation
//! ([`oracle`]) certifies the optimized pipeline bit for bit at small
//! scale, and [`verify`] packages the whole check suite.

pub mod bits;
pub mod codec;
pub mod complexity;
pub mod enumerate;
pub mod models;
pub mod oracle;
pub mod pipeline;
pub mod profiles;
pub mod verify;
pub mod vm;

pub use bits::BitString;
pub use codec::FiniteSetModel;
pub use enumerate::RunTable;
pub use vm::MachineConfig;
