//! Multidimensional Voronoi-constellation coded modulation toolkit.
//!
//! The crate is organized around six subsystems:
//!
//! - [`lattice`]: exact lattice arithmetic and closest-point quantizers,
//! - [`vc`]: Voronoi constellations and the bit-label <-> point bijection,
//! - [`fec`]: inner LDPC codes, interleaving, and rate accounting,
//! - [`pipeline`]: the two-level multilevel-coding chain and a Gray-16QAM
//!   BICM baseline,
//! - [`channel`]: AWGN and a four-core fiber surrogate with launch-power
//!   dependent SNR,
//! - [`sim`]: Monte Carlo sweep harness with CSV emission.
//!
//! Each major capability has a runnable demonstration under `examples/`.

pub mod lattice;
