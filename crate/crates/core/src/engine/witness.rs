//! Explicit members built from fresh primes, and their verification.
//!
//! For a support index `i` with exponent `k_i`, attaching a fresh prime
//! label `q > r` to every divisor of `i` contributes
//! `prod_{d | i} ct(d * q) = (1 - x^i)^{-1}` modulo `x^{r+1}`, while a
//! semiprime label `q1 * q2` of fresh primes contributes `(1 - x^i)^{+1}`.
//! Spending `|k_i|` labels of the right shape per index therefore realizes
//! the whole exponent vector at once, and the least common multiple of all
//! the decorated indices is a member with a fully explicit certificate.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, Factorization};
use crate::engine::{solve_exponents, support_profile, Limits};
use crate::error::{Error, Result};
use crate::series::{cyclotomic_exact, cyclotomic_trunc_of_factored, IntPoly, TruncSeries};

/// One support index with its labels: fresh primes for negative exponents,
/// fresh semiprimes for positive ones, `|k_i|` labels either way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessGroup {
    pub index: u64,
    pub exponent: BigInt,
    pub labels: Vec<BigUint>,
}

/// A constructed member together with everything needed to re-check it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessCertificate {
    /// The member: least common multiple of the cyclotomic indices.
    pub n: BigUint,
    /// Least common multiple of the support; divides `n`.
    pub modulus: BigUint,
    pub groups: Vec<WitnessGroup>,
    /// All decorated indices `d * label` for `d | index`, ascending.
    pub cyclotomic_indices: Vec<BigUint>,
}

/// Builds a member of the sequence class from fresh prime labels.
///
/// Labels draw the smallest unused primes above the truncation order, so
/// the construction is deterministic. The returned `n` is the lcm of the
/// decorated indices, and the truncated product over those indices is
/// re-verified against the target before returning.
pub fn find_witness(seq: &[BigInt], limits: &Limits) -> Result<WitnessCertificate> {
    let exponents = solve_exponents(seq);
    let profile = support_profile(&exponents);
    let order = seq.len() as u64;

    let total_labels: BigUint = exponents.iter().map(|k| k.magnitude().clone()).sum();
    if total_labels > BigUint::from(limits.witness_label_budget) {
        return Err(Error::WitnessBudgetExceeded(format!(
            "{total_labels} labels needed, budget {}",
            limits.witness_label_budget
        )));
    }

    let mut prime_need = 0usize;
    for k in &exponents {
        let count = k.magnitude().to_usize().expect("within label budget");
        prime_need += if k.is_positive() { 2 * count } else { count };
    }
    let primes = arith::next_primes(order.max(1), prime_need, 1);
    let mut prime_iter = primes.iter();

    let mut groups = Vec::new();
    let mut indexed: Vec<(BigUint, Factorization)> = Vec::new();
    for (slot, k) in exponents.iter().enumerate() {
        if k.is_zero() {
            continue;
        }
        let index = slot as u64 + 1;
        let count = k.magnitude().to_usize().expect("within label budget");
        let mut labels = Vec::with_capacity(count);
        for _ in 0..count {
            let (label, label_factors) = if k.is_positive() {
                let p = prime_iter.next().expect("enough primes");
                let q = prime_iter.next().expect("enough primes");
                (BigUint::from(p) * q, vec![(p, 1), (q, 1)])
            } else {
                let p = prime_iter.next().expect("enough primes");
                (BigUint::from(p), vec![(p, 1)])
            };
            for d in arith::divisors(index)? {
                let factors = arith::merge_factorizations(arith::factor(d)?, label_factors.clone());
                indexed.push((BigUint::from(d) * &label, factors));
            }
            labels.push(label);
        }
        groups.push(WitnessGroup {
            index,
            exponent: k.clone(),
            labels,
        });
    }
    indexed.sort();

    let n = indexed
        .iter()
        .fold(BigUint::one(), |acc, (value, _)| acc.lcm(value));

    let mut product = TruncSeries::one(seq.len());
    for (_, factors) in &indexed {
        product = product.mul(&cyclotomic_trunc_of_factored(factors, seq.len()))?;
    }
    if product != TruncSeries::from_initial_coeffs(seq, seq.len()).expect("lengths match") {
        return Err(Error::Internal(
            "witness product does not reproduce the target".into(),
        ));
    }

    Ok(WitnessCertificate {
        n,
        modulus: profile.modulus,
        groups,
        cyclotomic_indices: indexed.into_iter().map(|(value, _)| value).collect(),
    })
}

/// Outcome of the optional exact divisibility check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactOutcome {
    NotRequested,
    /// Requested but skipped: structural defects, or the degree or `n`
    /// bound would make the dense division unreasonable.
    Skipped,
    Passed,
    Failed,
}

impl ExactOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            ExactOutcome::NotRequested => "not_requested",
            ExactOutcome::Skipped => "skipped",
            ExactOutcome::Passed => "passed",
            ExactOutcome::Failed => "failed",
        }
    }
}

/// One structural flaw in a claimed witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessDefect {
    /// Group indices are not exactly the support of the sequence.
    SupportMismatch,
    ExponentMismatch { index: u64 },
    LabelCountMismatch { index: u64 },
    /// Label is not a fresh prime (negative exponent) or a squarefree
    /// semiprime (positive exponent).
    LabelShape { label: BigUint },
    PrimeTooSmall { prime: u64 },
    PrimeReused { prime: u64 },
    DuplicateIndex { index: BigUint },
    IndexNotDividing { index: BigUint },
    /// The stated cyclotomic indices differ from the ones the groups
    /// generate.
    IndexSetMismatch,
    ModulusMismatch,
    /// Truncated product over the indices misses the target series.
    ProductMismatch,
}

impl fmt::Display for WitnessDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessDefect::SupportMismatch => {
                write!(f, "group indices do not match the support")
            }
            WitnessDefect::ExponentMismatch { index } => {
                write!(f, "group at index {index} carries the wrong exponent")
            }
            WitnessDefect::LabelCountMismatch { index } => {
                write!(f, "group at index {index} has the wrong number of labels")
            }
            WitnessDefect::LabelShape { label } => {
                write!(f, "label {label} does not have the required prime shape")
            }
            WitnessDefect::PrimeTooSmall { prime } => {
                write!(f, "label prime {prime} does not exceed the truncation order")
            }
            WitnessDefect::PrimeReused { prime } => {
                write!(f, "label prime {prime} is used more than once")
            }
            WitnessDefect::DuplicateIndex { index } => {
                write!(f, "cyclotomic index {index} appears more than once")
            }
            WitnessDefect::IndexNotDividing { index } => {
                write!(f, "cyclotomic index {index} does not divide n")
            }
            WitnessDefect::IndexSetMismatch => {
                write!(f, "cyclotomic indices do not match the groups")
            }
            WitnessDefect::ModulusMismatch => {
                write!(f, "stated modulus does not match the sequence")
            }
            WitnessDefect::ProductMismatch => {
                write!(f, "truncated product does not reproduce the target")
            }
        }
    }
}

/// What an independent re-check of a witness found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessReport {
    pub defects: Vec<WitnessDefect>,
    pub exact: ExactOutcome,
}

impl WitnessReport {
    /// No structural defects and the exact check, if it ran, passed.
    pub fn valid(&self) -> bool {
        self.defects.is_empty() && self.exact != ExactOutcome::Failed
    }
}

/// Re-checks a witness certificate against the sequence from scratch.
///
/// Structure first: support, exponents, label shapes and freshness, the
/// index set, the modulus, and the truncated product over the indices.
/// With `check_exact` the certificate's cyclotomics are then multiplied
/// out and divided into `x^n - 1` exactly, when the degree sum stays
/// within `limits.exact_degree_bound` and `n` within
/// `limits.exact_n_bound`; outside those bounds the check reports itself
/// as skipped rather than guessing.
pub fn verify_witness(
    cert: &WitnessCertificate,
    seq: &[BigInt],
    limits: &Limits,
    check_exact: bool,
) -> Result<WitnessReport> {
    let order = seq.len() as u64;
    let exponents = solve_exponents(seq);
    let profile = support_profile(&exponents);
    let mut defects = Vec::new();

    if cert.modulus != profile.modulus {
        defects.push(WitnessDefect::ModulusMismatch);
    }

    let mut seen_indices = BTreeSet::new();
    let mut support_ok = true;
    for group in &cert.groups {
        if !seen_indices.insert(group.index) {
            support_ok = false;
        }
    }
    let expected_support: BTreeSet<u64> = profile.support.iter().copied().collect();
    if seen_indices != expected_support {
        support_ok = false;
    }
    if !support_ok {
        defects.push(WitnessDefect::SupportMismatch);
    }

    // Per-group checks need the true exponent, so they only run for groups
    // whose index actually lies in the support.
    let mut used_primes: BTreeSet<u64> = BTreeSet::new();
    let mut shapes_ok = true;
    let mut labeled: Vec<(u64, Factorization)> = Vec::new();
    for group in &cert.groups {
        if !expected_support.contains(&group.index) {
            continue;
        }
        let k = &exponents[group.index as usize - 1];
        if group.exponent != *k {
            defects.push(WitnessDefect::ExponentMismatch { index: group.index });
        }
        if BigUint::from(group.labels.len()) != *k.magnitude() {
            defects.push(WitnessDefect::LabelCountMismatch { index: group.index });
        }
        for label in &group.labels {
            let factors = arith::factor_biguint(label, limits.trial_bound)?;
            let shaped = if k.is_positive() {
                factors.len() == 2 && factors.iter().all(|&(_, e)| e == 1)
            } else {
                factors.len() == 1 && factors[0].1 == 1
            };
            if !shaped {
                defects.push(WitnessDefect::LabelShape {
                    label: label.clone(),
                });
                shapes_ok = false;
                continue;
            }
            for &(p, _) in &factors {
                if p <= order {
                    defects.push(WitnessDefect::PrimeTooSmall { prime: p });
                    shapes_ok = false;
                }
                if !used_primes.insert(p) {
                    defects.push(WitnessDefect::PrimeReused { prime: p });
                    shapes_ok = false;
                }
            }
            labeled.push((group.index, factors));
        }
    }

    // The stated index list must be duplicate-free, divide n, and agree
    // with what the groups generate.
    let mut stated = cert.cyclotomic_indices.clone();
    stated.sort();
    for pair in stated.windows(2) {
        if pair[0] == pair[1] {
            defects.push(WitnessDefect::DuplicateIndex {
                index: pair[1].clone(),
            });
        }
    }
    for index in &stated {
        let divides = !index.is_zero() && !cert.n.is_zero() && (&cert.n % index).is_zero();
        if !divides {
            defects.push(WitnessDefect::IndexNotDividing {
                index: index.clone(),
            });
        }
    }
    let mut expected: Vec<(BigUint, Factorization)> = Vec::new();
    for (index, label_factors) in &labeled {
        let label_value = arith::value_of_factored(label_factors);
        for d in arith::divisors(*index)? {
            let factors = arith::merge_factorizations(arith::factor(d)?, label_factors.clone());
            expected.push((BigUint::from(d) * &label_value, factors));
        }
    }
    expected.sort();
    let set_ok = shapes_ok
        && support_ok
        && expected.len() == stated.len()
        && expected.iter().map(|(value, _)| value).eq(stated.iter());
    if !set_ok {
        defects.push(WitnessDefect::IndexSetMismatch);
    }

    if set_ok {
        let mut product = TruncSeries::one(seq.len());
        for (_, factors) in &expected {
            product = product.mul(&cyclotomic_trunc_of_factored(factors, seq.len()))?;
        }
        if product != TruncSeries::from_initial_coeffs(seq, seq.len()).expect("lengths match") {
            defects.push(WitnessDefect::ProductMismatch);
        }
    }

    let exact = if !check_exact {
        ExactOutcome::NotRequested
    } else if !defects.is_empty() {
        ExactOutcome::Skipped
    } else {
        let degree_sum: BigUint = expected
            .iter()
            .map(|(_, factors)| arith::totient_of_factored(factors))
            .sum();
        if degree_sum > BigUint::from(limits.exact_degree_bound)
            || cert.n > BigUint::from(limits.exact_n_bound)
        {
            ExactOutcome::Skipped
        } else {
            let n = cert.n.to_u64().expect("within the exact bound");
            let mut product = IntPoly::one();
            for (value, _) in &expected {
                let index = value.to_u64().expect("divides n");
                product = product.mul(&cyclotomic_exact(index)?);
            }
            match IntPoly::x_pow_minus_one(n)?.exact_div(&product) {
                Ok(_) => ExactOutcome::Passed,
                Err(Error::InexactDivision) => ExactOutcome::Failed,
                Err(other) => return Err(other),
            }
        }
    };

    Ok(WitnessReport { defects, exact })
}
