//! Learning binary block codes with a two-phase autoencoder.
//!
//! The encoder maps a one-hot message to a length-`n` word, the word crosses a
//! binary symmetric channel, and the decoder picks the most likely message. The
//! encoder is first trained with continuous `tanh` outputs, then its outputs are
//! hard-binarized with `sign` and only the decoder keeps adapting.
//!
//! Alongside the model this crate carries the coding-theory workbench needed to
//! judge a learned code: the Hamming(7,4) reference, exhaustive ML decoding,
//! distance spectra, linearity and equivalence checks, and Monte Carlo BLER.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, threading and the
//! command line live in `binae-cli`.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod autoencoder;
pub mod channel;
pub mod classic;
mod error;
pub mod eval;
pub mod nn;
pub mod numerics;

pub use error::{Error, Result};
