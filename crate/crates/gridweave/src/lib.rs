//! Files, rendering, benchmarks and the HTTP service around
//! [`gridweave_core`].

pub mod bench;
pub mod io;
pub mod render;
pub mod service;
pub mod synth;

pub use gridweave_core as core;
