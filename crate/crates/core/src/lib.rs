//! Exact arithmetic in Cayley-Dickson algebras of dimension `2^N`, viewed as
//! twisted group algebras over the XOR group of basis indices.
//!
//! Every basis product satisfies `e_p e_q = omega(p, q) e_{p XOR q}` for a
//! sign-valued twist `omega` that depends on which of the eight doubling
//! products defines the multiplication. This crate computes that twist three
//! independent ways and cross-checks them against each other:
//!
//! * [`oracle`]: recursive brute force. Build basis vectors and multiply
//!   them with the literal doubling formulas; slow by design, the reference.
//! * [`automaton`]: a five-state signed automaton walking the doublet path
//!   of `[p;q]` in O(bits) time and O(1) space.
//! * [`periodicity`]: reduce `(p, q)` to a small canonical pair with the
//!   same twist before evaluating.
//!
//! [`kernel`] builds the production multiplication `z_{p XOR q} += omega(p,
//! q) x_p y_q` on top of the automaton, optionally memoized through the
//! canonicalizer, and [`verify`] bundles the whole invariant battery into one
//! runnable report.
//!
//! ```
//! use cdtwist::{twist, basis_product, canonicalize, BasisIndex, ProductVariant, Sign};
//!
//! let p = BasisIndex::new(25);
//! let q = BasisIndex::new(17);
//! assert_eq!(twist(p, q, ProductVariant::P3), Sign::Plus);
//! assert_eq!(basis_product(p, q, ProductVariant::P3).1, BasisIndex::new(8));
//!
//! // Large pairs reduce to small ones with the same twist.
//! let trace = canonicalize(BasisIndex::new(5), BasisIndex::new(481));
//! assert_eq!(trace.canonical, (BasisIndex::new(5), BasisIndex::new(9)));
//! assert_eq!(trace.total_sign, Sign::Plus);
//! ```

pub mod algebra;
pub mod automaton;
pub mod kernel;
pub mod oracle;
pub mod periodicity;
pub mod verify;

pub use algebra::{
    shuffle_doublets, xor_index, BasisIndex, Doublet, DoubletPath, ProductVariant, Sign,
};
pub use automaton::{basis_product, step, twist, NodeLabel, TransitionTable, TwistState};
pub use kernel::{multiply_fast, twist_memo, TwistCache};
pub use oracle::{conjugate, multiply, oracle_twist, DenseVector, LevelMismatch};
pub use periodicity::{
    canonicalize, check_periodicity_t2, check_periodicity_t3, reduce_t4, reduce_t5,
    ReductionRule, ReductionStep, ReductionTrace,
};
