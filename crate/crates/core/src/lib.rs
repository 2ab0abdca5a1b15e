//! Packings of triangle-free partial linear spaces built from the Heisenberg
//! group of order q⁵, and the K_{k+1}-free graph packings they yield.
//!
//! The pipeline, bottom up:
//!
//! - [`finite_field`]: GF(q) ⊂ GF(q²) with trace, norm and halving.
//! - [`heisenberg`]: the group E on GF(q²) × GF(q) × GF(q²).
//! - [`kantor`]: the Kantor family of E, the automorphisms τ_λ, the κ search
//!   and the twisted subgroups A_t^λ.
//! - [`geometry`]: coset line sets ℒ_λ and their verification.
//! - [`packing`]: random equitable partitions and the graphs G_1, …, G_r.
//! - [`bounds`]: the choice of q and the resulting upper bounds.
//!
//! ```
//! use gqpack::finite_field::FieldCtx;
//! use gqpack::heisenberg::GroupCtx;
//! use gqpack::{geometry, kantor};
//!
//! let ctx = GroupCtx::new(FieldCtx::for_q(3)?);
//! let kappa = kantor::find_kappa(ctx.field())?;
//! let params = kantor::TwistParams::new(ctx.field(), ctx.field().elem(1), kappa)?;
//! let lines = geometry::build_line_set(&ctx, &params);
//! assert_eq!(lines.num_lines(), 81);
//! assert!(geometry::verify_pls(&lines).passed);
//! assert!(geometry::verify_triangle_free(&lines).passed);
//! # Ok::<(), gqpack::Error>(())
//! ```

pub mod bounds;
pub mod clique;
pub mod error;
pub mod finite_field;
pub mod geometry;
pub mod heisenberg;
pub mod kantor;
pub mod packing;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/heisenberg.md")]
    mod heisenberg {}
    #[doc = include_str!("../../../book/src/kantor.md")]
    mod kantor {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/packing.md")]
    mod packing {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
