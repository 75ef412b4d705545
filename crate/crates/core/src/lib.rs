//! Simulators, storage codes and translators for write-once Turing machines.
//!
//! * [`machine`]: descriptions, tape disciplines and step semantics.
//! * [`simulator`]: deterministic, nondeterministic and alternating engines,
//!   inter-write loop detection, run shortening and gap statistics.
//! * [`womcode`]: write-once memory codes.
//! * [`transpile`]: machine-to-machine constructions and a differential
//!   harness.
//! * [`endwriter`]: analysis of machines that only append to their tape.
//! * [`cli`]: the `wotm` command-line front end and corpus loading.

pub mod machine;
pub mod simulator;
pub mod womcode;
pub mod transpile;
pub mod endwriter;
pub mod cli;
