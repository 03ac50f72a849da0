//! Exact arithmetic for divisors of `x^n - 1` with prescribed initial
//! coefficients.
//!
//! Fix a target sequence `n_1, ..., n_r` and ask which positive integers `n`
//! admit a monic integer divisor of `x^n - 1` congruent to
//! `1 + n_1 x + ... + n_r x^r (mod x^{r+1})`. This crate decides membership
//! with exact certificates, constructs explicit witness members, and counts
//! members up to a bound, all in arbitrary-precision integer arithmetic.
//!
//! Key components:
//! - [`arith`]: Möbius function, divisor enumeration, prime generation.
//! - [`series`]: truncated power series, exact integer polynomials, and
//!   cyclotomic polynomials in exact and truncated form.
//! - [`engine`]: exponent solving, membership decisions, witness
//!   construction, and density counting.
//! - [`selftest`]: a fast built-in invariant battery.

pub mod arith;
pub mod engine;
pub mod error;
pub mod selftest;
pub mod series;

pub use error::{Error, Result};

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;
