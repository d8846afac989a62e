//! The chapters of `book/`, included verbatim so that `cargo test` runs
//! every Rust example in the book.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}

#[doc = include_str!("../../../book/src/pathloss.md")]
pub mod pathloss {}

#[doc = include_str!("../../../book/src/fading.md")]
pub mod fading {}

#[doc = include_str!("../../../book/src/link.md")]
pub mod link {}

#[doc = include_str!("../../../book/src/sep.md")]
pub mod sep {}

#[doc = include_str!("../../../book/src/montecarlo.md")]
pub mod montecarlo {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
