//! Computational algebra for operad-decorated categories of finite sets.
//!
//! The library implements, at desk scale and over exact integer arithmetic:
//!
//! * finite truncations of set-operads with their symmetric-group actions
//!   ([`operad`]),
//! * the decorated map categories built from an operad, in plain, pointed and
//!   surjective flavors ([`opcat`]),
//! * squares, pullback lifting and the span category, together with its
//!   description by free-algebra elements ([`spans`]),
//! * functors on the truncated bases with cross-effects, decomposition and
//!   polynomial truncation ([`functorlab`]),
//! * the idempotent/Morita translation between pointed-base functors and
//!   surjective-base functors ([`doldkan`]),
//! * generator/relation presentations of Janus functor pairs with the exchange
//!   identities checked numerically ([`mackey`]),
//! * augmentation-power towers of monoid, group and operad-algebra rings
//!   ([`passi`]),
//! * exact integer linear algebra used throughout ([`zmod`]), and
//! * the check registry backing the CLI ([`report`]).
//!
//! Everything is computed exactly; no floating point is used anywhere.

pub mod doldkan;
pub mod functorlab;
pub mod mackey;
pub mod opcat;
pub mod operad;
pub mod passi;
pub mod perm;
pub mod report;
pub mod spans;
pub mod zmod;
