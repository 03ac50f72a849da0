//! Membership decisions: does `x^n - 1` have a monic divisor with constant
//! term 1 whose low-order coefficients match the target series?
//!
//! Such a divisor is a product of sign-normalized cyclotomics over a subset
//! of the divisors of `n`, so the question reduces to hitting the target's
//! exponent vector with a sum of divisor-class vectors, each class used at
//! most its size many times. Two solvers share that reduction:
//!
//! - a fast triangular pass that only spends divisors whose small part is
//!   itself at most `r`; it covers the structured members (in particular
//!   every constructed witness) without search, and
//! - a complete depth-first search over the grouped classes, pruned by
//!   exact per-coefficient tail bounds and a dead-state memo, which either
//!   finds a combination, proves none exists, or fails loudly on the state
//!   cap.
//!
//! [`brute_member`] double-checks all of this by multiplying truncated
//! cyclotomics over every divisor subset directly.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{self, Factorization};
use crate::engine::groups::{self, ClassTable};
use crate::engine::{solve_exponents, support_profile, Limits, MembershipReason, MembershipResult};
use crate::error::{Error, Result};
use crate::series::{cyclotomic_trunc, cyclotomic_trunc_of_factored, TruncSeries};

/// Dead-state memo stops growing past this many entries; the search stays
/// correct, it just stops caching.
const MEMO_CAP: usize = 2_000_000;

/// Shared state for deciding many `n` against one target series.
#[derive(Clone, Debug)]
pub struct MembershipContext {
    seq: Vec<BigInt>,
    exponents: Vec<BigInt>,
    support: Vec<u64>,
    modulus: BigUint,
    target: TruncSeries,
    limits: Limits,
}

impl MembershipContext {
    /// Solves the exponent vector for `seq` once; decisions reuse it.
    pub fn new(seq: &[BigInt], limits: &Limits) -> MembershipContext {
        let exponents = solve_exponents(seq);
        let profile = support_profile(&exponents);
        let target = TruncSeries::from_initial_coeffs(seq, seq.len()).expect("lengths match");
        MembershipContext {
            seq: seq.to_vec(),
            exponents,
            support: profile.support,
            modulus: profile.modulus,
            target,
            limits: *limits,
        }
    }

    pub fn exponents(&self) -> &[BigInt] {
        &self.exponents
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// Decides membership of `n`, certificate included.
    pub fn decide(&self, n: &BigUint) -> Result<MembershipResult> {
        if n.is_zero() {
            return Err(Error::ZeroArgument);
        }
        if let Some(small) = n.to_u64() {
            return self.decide_u64(small);
        }
        if self.support.is_empty() {
            return Ok(trivial_member());
        }
        for &m in &self.support {
            if !(n % BigUint::from(m)).is_zero() {
                return Ok(filtered_out());
            }
        }
        let factors = arith::factor_biguint(n, self.limits.trial_bound)?;
        self.decide_factored(&factors)
    }

    /// Same decision for machine-sized `n`.
    pub fn decide_u64(&self, n: u64) -> Result<MembershipResult> {
        if n == 0 {
            return Err(Error::ZeroArgument);
        }
        if self.support.is_empty() {
            return Ok(trivial_member());
        }
        for &m in &self.support {
            if n % m != 0 {
                return Ok(filtered_out());
            }
        }
        let factors = arith::factor(n)?;
        self.decide_factored(&factors)
    }

    /// The search proper; callers have already applied the modulus filter.
    fn decide_factored(&self, n_factors: &Factorization) -> Result<MembershipResult> {
        let table = groups::build_classes(n_factors, self.seq.len(), &self.limits)?;
        if let Some(assignment) = self.fast_assignment(&table, n_factors) {
            return self.certify(&table, &assignment);
        }
        match search_groups(&table, &self.exponents, self.limits.max_states)? {
            Some(assignment) => self.certify(&table, &assignment),
            None => Ok(MembershipResult {
                member: false,
                reason: MembershipReason::Infeasible,
                certificate: None,
            }),
        }
    }

    /// Triangular shortcut over divisors `m <= r` of `n`.
    ///
    /// Spending `s_m` net copies of small part `m` (positive counts from
    /// the even side, negative from the odd side) contributes
    /// `sum_m s_m * w(m)` to the exponent vector, and since `w(m)_m = 1`
    /// while `w(m)_j` needs `j | m`, the system `sum = k` is triangular
    /// with unit diagonal: solve it exactly, then check the side counts
    /// can pay for each `|s_m|`. Any failure falls back to the full
    /// search; this pass never rules membership out.
    fn fast_assignment(
        &self,
        table: &ClassTable,
        n_factors: &Factorization,
    ) -> Option<Vec<BigUint>> {
        let order = self.seq.len();
        let m_factors = groups::unit_range_factors(order);
        let ms: Vec<usize> = (1..=order)
            .filter(|&m| divides(&m_factors[m - 1], n_factors))
            .collect();
        let mut s: Vec<BigInt> = vec![BigInt::zero(); order + 1];
        for &m in ms.iter().rev() {
            let mut value = self.exponents[m - 1].clone();
            for &d in &ms {
                if d > m && d % m == 0 {
                    match arith::mobius((d / m) as u64).expect("positive") {
                        1 => value -= &s[d],
                        -1 => value += &s[d],
                        _ => {}
                    }
                }
            }
            s[m] = value;
        }
        let mut assignment = vec![BigUint::zero(); table.groups.len()];
        for &m in &ms {
            if s[m].is_zero() {
                continue;
            }
            let negated = s[m].is_negative();
            let magnitude = s[m].magnitude();
            let side = if negated {
                &table.odd_count
            } else {
                &table.even_count
            };
            if magnitude > side {
                return None;
            }
            let w = groups::class_vector(&m_factors[m - 1], &m_factors);
            let vector: Vec<i8> = if negated {
                w.iter().map(|&v| -v).collect()
            } else {
                w
            };
            let g = table.group_index(&vector)?;
            assignment[g] += magnitude;
        }
        Some(assignment)
    }

    /// Turns a multiplicity assignment into an explicit certificate and
    /// re-verifies the product before answering.
    fn certify(&self, table: &ClassTable, assignment: &[BigUint]) -> Result<MembershipResult> {
        let chosen = groups::extract_certificate(table, assignment)?;
        let order = self.seq.len();
        let mut product = TruncSeries::one(order);
        for (_, factors) in &chosen {
            product = product.mul(&cyclotomic_trunc_of_factored(factors, order))?;
        }
        if product != self.target {
            return Err(Error::Internal(
                "certificate product does not reproduce the target".into(),
            ));
        }
        Ok(MembershipResult {
            member: true,
            reason: MembershipReason::Certified,
            certificate: Some(chosen.into_iter().map(|(value, _)| value).collect()),
        })
    }
}

/// Decides whether some monic divisor of `x^n - 1` with constant term 1
/// starts with the coefficients in `seq`.
pub fn is_member(n: &BigUint, seq: &[BigInt], limits: &Limits) -> Result<MembershipResult> {
    MembershipContext::new(seq, limits).decide(n)
}

fn trivial_member() -> MembershipResult {
    MembershipResult {
        member: true,
        reason: MembershipReason::Certified,
        certificate: Some(Vec::new()),
    }
}

fn filtered_out() -> MembershipResult {
    MembershipResult {
        member: false,
        reason: MembershipReason::ModulusFilter,
        certificate: None,
    }
}

fn divides(m_factors: &Factorization, n_factors: &Factorization) -> bool {
    m_factors.iter().all(|&(p, e)| {
        n_factors
            .iter()
            .find(|&&(q, _)| q == p)
            .is_some_and(|&(_, f)| f >= e)
    })
}

/// Complete search for a nonnegative multiplicity per group, each at most
/// the group size, whose vector combination equals `target`.
fn search_groups(
    table: &ClassTable,
    target: &[BigInt],
    max_states: u64,
) -> Result<Option<Vec<BigUint>>> {
    let order = target.len();
    let count = table.groups.len();
    // Exact per-coefficient bounds on what groups i.. can still contribute.
    let mut min_tail = vec![vec![BigInt::zero(); order]; count + 1];
    let mut max_tail = vec![vec![BigInt::zero(); order]; count + 1];
    for i in (0..count).rev() {
        let size = BigInt::from(table.groups[i].size.clone());
        for m in 0..order {
            let (lo, hi) = match table.groups[i].vector[m] {
                1 => (BigInt::zero(), size.clone()),
                -1 => (-size.clone(), BigInt::zero()),
                _ => (BigInt::zero(), BigInt::zero()),
            };
            min_tail[i][m] = &min_tail[i + 1][m] + lo;
            max_tail[i][m] = &max_tail[i + 1][m] + hi;
        }
    }
    let mut search = Search {
        table,
        order,
        min_tail,
        max_tail,
        dead: HashSet::new(),
        states: 0,
        max_states,
        choice: vec![BigUint::zero(); count],
    };
    let mut residual: Vec<BigInt> = target.to_vec();
    if search.dfs(0, &mut residual)? {
        Ok(Some(search.choice))
    } else {
        Ok(None)
    }
}

struct Search<'a> {
    table: &'a ClassTable,
    order: usize,
    min_tail: Vec<Vec<BigInt>>,
    max_tail: Vec<Vec<BigInt>>,
    dead: HashSet<(usize, Vec<BigInt>)>,
    states: u64,
    max_states: u64,
    choice: Vec<BigUint>,
}

impl Search<'_> {
    /// Tries every multiplicity for group `idx` that keeps the residual
    /// reachable by the remaining groups. `residual` is restored on exit.
    fn dfs(&mut self, idx: usize, residual: &mut [BigInt]) -> Result<bool> {
        self.states += 1;
        if self.states > self.max_states {
            return Err(Error::StateCapExceeded(self.max_states));
        }
        if idx == self.table.groups.len() {
            return Ok(residual.iter().all(Zero::is_zero));
        }
        let key = (idx, residual.to_vec());
        if self.dead.contains(&key) {
            return Ok(false);
        }
        let group = &self.table.groups[idx];
        let vector = group.vector.clone();
        // Window of usable multiplicities: t copies of this vector must
        // leave each coefficient inside the tail bounds of the rest.
        let mut lo = BigInt::zero();
        let mut hi = BigInt::from(group.size.clone());
        for m in 0..self.order {
            match vector[m] {
                1 => {
                    let a = &residual[m] - &self.max_tail[idx + 1][m];
                    let b = &residual[m] - &self.min_tail[idx + 1][m];
                    if a > lo {
                        lo = a;
                    }
                    if b < hi {
                        hi = b;
                    }
                }
                -1 => {
                    let a = &self.min_tail[idx + 1][m] - &residual[m];
                    let b = &self.max_tail[idx + 1][m] - &residual[m];
                    if a > lo {
                        lo = a;
                    }
                    if b < hi {
                        hi = b;
                    }
                }
                _ => {}
            }
        }
        if lo <= hi {
            shift_residual(residual, &vector, &lo);
            let mut t = lo;
            loop {
                if self.dfs(idx + 1, residual)? {
                    unshift_residual(residual, &vector, &t);
                    self.choice[idx] = t.to_biguint().expect("window is nonnegative");
                    return Ok(true);
                }
                if t == hi {
                    break;
                }
                t += 1;
                shift_residual(residual, &vector, &BigInt::from(1));
            }
            unshift_residual(residual, &vector, &hi);
        }
        if self.dead.len() < MEMO_CAP {
            self.dead.insert(key);
        }
        Ok(false)
    }
}

/// Subtracts `t` copies of the group vector from the residual.
fn shift_residual(residual: &mut [BigInt], vector: &[i8], t: &BigInt) {
    for (value, &v) in residual.iter_mut().zip(vector) {
        match v {
            1 => *value -= t,
            -1 => *value += t,
            _ => {}
        }
    }
}

/// Adds `t` copies back.
fn unshift_residual(residual: &mut [BigInt], vector: &[i8], t: &BigInt) {
    for (value, &v) in residual.iter_mut().zip(vector) {
        match v {
            1 => *value += t,
            -1 => *value -= t,
            _ => {}
        }
    }
}

/// Exhaustive reference oracle: multiplies truncated cyclotomics over every
/// subset of the divisors of `n` in ascending bitmask order and compares
/// against the target directly. Exponential in the divisor count, hence the
/// `max_divisors` cap.
pub fn brute_member(n: u64, seq: &[BigInt], limits: &Limits) -> Result<MembershipResult> {
    if n == 0 {
        return Err(Error::ZeroArgument);
    }
    let order = seq.len();
    let divisors = arith::divisors(n)?;
    if divisors.len() > limits.max_divisors {
        return Err(Error::DivisorCapExceeded {
            count: divisors.len(),
            cap: limits.max_divisors,
        });
    }
    let target = TruncSeries::from_initial_coeffs(seq, order).expect("lengths match");
    let factors: Vec<TruncSeries> = divisors
        .iter()
        .map(|&d| cyclotomic_trunc(d, order))
        .collect::<Result<_>>()?;
    match brute_search(&TruncSeries::one(order), &factors, factors.len(), &target)? {
        Some(subset) => Ok(MembershipResult {
            member: true,
            reason: MembershipReason::Certified,
            certificate: Some(subset.into_iter().map(|i| BigUint::from(divisors[i])).collect()),
        }),
        None => Ok(MembershipResult {
            member: false,
            reason: MembershipReason::Infeasible,
            certificate: None,
        }),
    }
}

/// Recursing on the highest remaining index with "exclude" before
/// "include" visits subsets exactly in ascending bitmask order.
fn brute_search(
    acc: &TruncSeries,
    factors: &[TruncSeries],
    idx: usize,
    target: &TruncSeries,
) -> Result<Option<Vec<usize>>> {
    if idx == 0 {
        return Ok(if acc == target { Some(Vec::new()) } else { None });
    }
    if let Some(hit) = brute_search(acc, factors, idx - 1, target)? {
        return Ok(Some(hit));
    }
    let with = acc.mul(&factors[idx - 1])?;
    if let Some(mut hit) = brute_search(&with, factors, idx - 1, target)? {
        hit.push(idx - 1);
        return Ok(Some(hit));
    }
    Ok(None)
}
