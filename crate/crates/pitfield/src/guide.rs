//! The user guide, embedded so its examples are tested.
//!
//! Each module below holds one chapter of the rendered book (the markdown
//! sources under `book/src/`), included verbatim as its doc comment. That
//! makes every ```rust fence in the book a doc-test of this crate: if an
//! API drifts or a frozen number in the prose goes stale, `cargo test`
//! fails and names the chapter. One module per chapter keeps the failure
//! attribution readable.
//!
//! The modules contain no items — they exist only to carry documentation.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}

#[doc = include_str!("../../../book/src/operators.md")]
pub mod operators {}

#[doc = include_str!("../../../book/src/time-stepping.md")]
pub mod time_stepping {}

#[doc = include_str!("../../../book/src/verification.md")]
pub mod verification {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../book/src/formats.md")]
pub mod formats {}
