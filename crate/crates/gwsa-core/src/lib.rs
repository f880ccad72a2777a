//! Exact-arithmetic toolkit for generalised weighted surface algebras.
//!
//! The crate is organised bottom-up:
//!
//! * [`ring`]: coefficient rings GF(p) and GF(p)[X]/(X^N), exact.
//! * [`linalg`]: dense linear algebra over GF(p) (RREF, kernels, solving).
//! * [`quiver`]: 2-regular quivers (Q, f), g-orbits and Brauer graphs.
//! * [`rewrite`]: path words and length-bounded rewriting systems.
//! * [`algebra`]: finite-dimensional algebras presented by rewriting, and
//!   structure-constant ("table") algebras used by the homological layers.
//! * [`gwsa`]: builders, validators and the named preset families.
//! * [`orders`]: ribbon graph orders, pullback orders, central elements,
//!   reductions and decomposition matrices.
//! * [`homotopy`]: bounded complexes of projectives, Hom-spaces in the
//!   homotopy category, Krull-Schmidt decomposition.
//! * [`silting`]: mutation, two-term poset enumeration, lifting complexes to
//!   orders and transporting them between reductions.
//! * [`posetiso`]: Hasse-diagram isomorphism search with backtracking caps.
//!
//! Everything is deterministic: collections are ordered, randomised searches
//! take explicit seeds.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod algebra;
pub mod gwsa;
pub mod homotopy;
pub mod linalg;
pub mod orders;
pub mod posetiso;
pub mod quiver;
pub mod rewrite;
pub mod ring;
pub mod rng;
pub mod silting;
