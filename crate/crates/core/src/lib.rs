//! Exact and numeric analysis of singular foliations presented as finitely
//! generated modules of polynomial vector fields.
//!
//! The exact layer ([`exactalg`], [`foliation`], [`pointwise`]) works over
//! the rationals and decides module membership with Gröbner bases. The
//! numeric layer ([`flows`], [`holonomy`]) integrates flows in `f64`.

pub mod catalog;
pub mod dsl;
pub mod error;
pub mod exactalg;
pub mod flows;
pub mod foliation;
pub mod holonomy;
pub mod pointwise;

pub use error::{Error, Result};
