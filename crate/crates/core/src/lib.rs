//! Cusp-cobordism invariants of Morse functions on compact manifolds with
//! boundary.
//!
//! The crate is split along the natural layers of the theory:
//!
//! - [`morse_model`]: finite descriptors of Morse functions (boundary critical
//!   points with index and sign, Euler characteristics) and their structural
//!   operations.
//! - [`invariants`]: exact integer/rational invariants, most importantly the
//!   class `χ(M) − χ₊[f]` in `ℤ/2` (even `n`) or `ℤ` (odd `n`).
//! - [`cobordism_group`]: group-level decisions and constructions
//!   (cobordance, generators, sign-assignment realization).
//! - [`singular_pattern`]: the combinatorial shadow of the singular set of a
//!   generic map to the plane (fold arcs, cusps, circles and intervals) and
//!   the parity/sign predicates that govern vector fields along it.
//! - [`moves`]: cusp creation/elimination rewriting with replayable traces and
//!   the normalization drivers for even and odd dimension.
//! - [`normal_forms`]: floating-point evaluation of fold, cusp and swallow's
//!   tail local models, numerical singular-set detection, perturbation checks
//!   and SVG/CSV emission.
//!
//! Everything except [`normal_forms`] is exact arithmetic.

pub mod cobordism_group;
pub mod invariants;
pub mod morse_model;
pub mod moves;
pub mod normal_forms;
pub mod rational;
pub mod singular_pattern;

pub use cobordism_group::{generator, is_cobordant, realize_sign_assignment, solve_sigma_for_target};
pub use invariants::{chi_plus, chi_plus_sigma, cobordism_invariant, CobordismClass, SignAssignment};
pub use morse_model::{BoundaryCriticalPoint, InteriorCriticalPoint, MorseDescriptor, Sign};
pub use singular_pattern::{Component, ComponentKind, Cusp, Element, FoldArc, SingularPattern};
