//! The guide under `book/src`, one module per chapter, so that
//! `cargo test` runs every code block in it.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/field.md")]
pub mod field {}

#[doc = include_str!("../../../book/src/fourier.md")]
pub mod fourier {}

#[doc = include_str!("../../../book/src/extremal.md")]
pub mod extremal {}

#[doc = include_str!("../../../book/src/increment.md")]
pub mod increment {}

#[doc = include_str!("../../../book/src/varnavides.md")]
pub mod varnavides {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../README.md")]
pub mod readme {}
