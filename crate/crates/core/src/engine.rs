//! Exponent solving, membership decisions, witnesses, and counting.
//!
//! The whole pipeline rests on one reduction. Every monic integer divisor of
//! `x^n - 1` with constant term 1 is a product of sign-normalized cyclotomics
//! over a subset of the divisors of `n`, and modulo `x^{r+1}` each factor is
//! a product of terms `(1 - x^m)^{±1}`. Because the exponent vector of a
//! target series in the `(1 - x^i)` basis is unique, prescribing the first
//! `r` coefficients of a divisor is the same as prescribing how many times
//! each `(1 - x^m)` must appear, which turns membership into an exact
//! bounded feasibility question over divisor classes.
//!
//! Key components:
//! - [`solve_exponents`]: the unique `(k_1, ..., k_r)` with
//!   `prod (1 - x^i)^{k_i} = 1 + n_1 x + ... + n_r x^r  (mod x^{r+1})`.
//! - [`support_profile`]: the support of `k`, its lcm, and the density.
//! - [`is_member`] / [`brute_member`]: fast and exhaustive membership
//!   oracles, both returning divisor-subset certificates.
//! - [`find_witness`] / [`verify_witness`]: explicit members built from
//!   fresh primes, with independent verification.
//! - [`count_members`] / [`smallest_member`]: counting sweeps.

mod count;
mod groups;
mod membership;
mod witness;

pub use count::{count_members, decimal_six, smallest_member, CountRow};
pub use membership::{brute_member, is_member, MembershipContext};
pub use witness::{
    find_witness, verify_witness, ExactOutcome, WitnessCertificate, WitnessDefect, WitnessGroup,
    WitnessReport,
};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::series::{one_minus_pow, TruncSeries};

/// Resource caps for the configurable operations.
///
/// Every cap fails loudly with a dedicated error when exceeded; nothing
/// degrades to an approximate answer.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    /// Most divisors of `n` the exhaustive subset oracle will enumerate.
    pub max_divisors: usize,
    /// Most divisor classes the grouped membership search will build.
    pub max_divisor_classes: usize,
    /// Most search states the grouped membership search will visit.
    pub max_states: u64,
    /// Trial-division bound when factoring big membership arguments.
    pub trial_bound: u64,
    /// Exact witness check runs only when the totient-degree sum is at most
    /// this.
    pub exact_degree_bound: u64,
    /// Exact witness check runs only when the witness `n` is at most this,
    /// since it materializes `x^n - 1` densely.
    pub exact_n_bound: u64,
    /// Most prime labels a witness construction may consume.
    pub witness_label_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_divisors: 20,
            max_divisor_classes: 4096,
            max_states: 10_000_000,
            trial_bound: 1_000_000,
            exact_degree_bound: 5000,
            exact_n_bound: 100_000,
            witness_label_budget: 100_000,
        }
    }
}

/// The unique exponents `(k_1, ..., k_r)` with
/// `prod_{i=1}^{r} (1 - x^i)^{k_i} = 1 + n_1 x + ... + n_r x^r (mod x^{r+1})`.
///
/// Works degree by degree: after `k_1, ..., k_{i-1}` are fixed, the running
/// product has some coefficient `c` at `x^i`, and multiplying by
/// `(1 - x^i)^{k_i}` changes that coefficient to `c - k_i` without touching
/// lower degrees, so `k_i = c - n_i` is forced. This is also why the vector
/// is unique.
pub fn solve_exponents(seq: &[BigInt]) -> Vec<BigInt> {
    let r = seq.len();
    let mut product = TruncSeries::one(r);
    let mut exponents = Vec::with_capacity(r);
    for (i, target_coeff) in seq.iter().enumerate() {
        let k = product.coeff(i + 1) - target_coeff;
        if !k.is_zero() {
            let factor = one_minus_pow(i as u64 + 1, &k, r).expect("index is positive");
            product = product.mul(&factor).expect("orders match");
        }
        exponents.push(k);
    }
    debug_assert_eq!(
        product,
        TruncSeries::from_initial_coeffs(seq, r).expect("lengths match"),
        "exponent solution must reproduce the target series"
    );
    exponents
}

/// Support, modulus, and density derived from an exponent vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportProfile {
    /// Indices `i` with `k_i != 0`, ascending.
    pub support: Vec<u64>,
    /// Least common multiple of the support; `1` when the support is empty.
    /// Every member is a multiple of this.
    pub modulus: BigUint,
    /// Natural density of the member set: exactly `1 / modulus`.
    pub density: BigRational,
}

/// Reads support, modulus, and density off an exponent vector.
pub fn support_profile(exponents: &[BigInt]) -> SupportProfile {
    let support: Vec<u64> = exponents
        .iter()
        .enumerate()
        .filter(|(_, k)| !k.is_zero())
        .map(|(idx, _)| idx as u64 + 1)
        .collect();
    let modulus = arith::lcm_all(&support);
    let density = BigRational::new(BigInt::one(), modulus.clone().into());
    SupportProfile {
        support,
        modulus,
        density,
    }
}

/// How one divisor `d` of `n` contributes to a subset product mod `x^{r+1}`.
///
/// Including `d` multiplies the subset product by
/// `prod_{m | d, m <= r} (1 - x^m)^{mu(d/m)}`, so the contribution is the
/// vector of those Möbius exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorVector {
    pub divisor: u64,
    /// Entry `m - 1` is `mu(d/m)` when `m | d`, else 0, for `1 <= m <= r`.
    pub entries: Vec<i8>,
}

/// The contribution vector of a single divisor `d` of `n`.
pub fn divisor_vector(d: u64, n: u64, order: usize) -> Result<DivisorVector> {
    if d == 0 || n == 0 {
        return Err(Error::ZeroArgument);
    }
    if n % d != 0 {
        return Err(Error::NotADivisor { divisor: d, n });
    }
    let mut entries = Vec::with_capacity(order);
    for m in 1..=order as u64 {
        entries.push(if d % m == 0 {
            arith::mobius(d / m)? as i8
        } else {
            0
        });
    }
    Ok(DivisorVector {
        divisor: d,
        entries,
    })
}

/// Why a membership decision came out the way it did.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MembershipReason {
    /// Some exponent index does not divide `n`, so no subset can work.
    ModulusFilter,
    /// The full search over divisor classes found no combination.
    Infeasible,
    /// A certificate subset was found and re-verified.
    Certified,
}

impl MembershipReason {
    pub fn as_str(self) -> &'static str {
        match self {
            MembershipReason::ModulusFilter => "modulus_filter",
            MembershipReason::Infeasible => "infeasible",
            MembershipReason::Certified => "certified",
        }
    }
}

/// Outcome of a membership decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipResult {
    pub member: bool,
    pub reason: MembershipReason,
    /// For members: divisors of `n` whose sign-normalized truncated
    /// cyclotomics multiply to the target series, ascending.
    pub certificate: Option<Vec<BigUint>>,
}
