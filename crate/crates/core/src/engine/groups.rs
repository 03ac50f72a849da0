//! Divisor classes of `n` with identical truncated contribution vectors.
//!
//! Split `n = A * B` with `A` the part supported on primes at most `r` and
//! `B` the part on larger primes. A divisor `d = d_A * d_B` contributes the
//! vector `mu(d_B) * w(d_A)` where `w(d_A)_m = mu(d_A / m)` for `m | d_A`,
//! `m <= r`. Divisors with non-squarefree `d_B` contribute nothing, and
//! `w(d_A)` only depends on `d_A` through exponents capped just above the
//! largest power fitting under `r`, so the full divisor set collapses into
//! a small table of classes: a `(d_A, parity of omega(d_B))` pair per class,
//! with an exactly counted class size. The grouped search then works on
//! groups of classes sharing one vector.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{self, Factorization};
use crate::engine::Limits;
use crate::error::{Error, Result};

/// One `(d_A, side)` class inside a group: all divisors `d_A * d_B` with
/// `d_B` squarefree over the big primes and `omega(d_B)` of the given
/// parity. `small` is symbolic because capped `d_A` values can overflow
/// `u64` even though every class member divides `n`.
#[derive(Clone, Debug)]
pub(crate) struct Source {
    pub small: BigUint,
    pub small_factors: Factorization,
    /// True when this side flips the sign: `mu(d_B) = -1`.
    pub negated: bool,
    /// Number of admissible `d_B` for this side.
    pub count: BigUint,
}

/// All divisor classes sharing one contribution vector.
#[derive(Clone, Debug)]
pub(crate) struct Group {
    pub vector: Vec<i8>,
    /// Total class size: sum of the source counts.
    pub size: BigUint,
    pub sources: Vec<Source>,
}

/// The classed divisors of one `n`, ready for the grouped search.
#[derive(Clone, Debug)]
pub(crate) struct ClassTable {
    /// Groups sorted by vector; every vector is nonzero and distinct.
    pub groups: Vec<Group>,
    /// Primes of `n` exceeding the truncation order, ascending.
    pub big_primes: Vec<u64>,
    /// Squarefree products over `big_primes` with evenly many factors.
    pub even_count: BigUint,
    /// Same with oddly many factors.
    pub odd_count: BigUint,
}

impl ClassTable {
    /// Index of the group carrying `vector`, if any.
    pub fn group_index(&self, vector: &[i8]) -> Option<usize> {
        self.groups
            .binary_search_by(|g| g.vector.as_slice().cmp(vector))
            .ok()
    }
}

/// Caps the exponent of `p` at one more than the largest power of `p`
/// fitting under `order`; beyond that, raising the exponent cannot change
/// which truncated terms divide `d_A`.
fn exponent_cap(p: u64, order: u64) -> u32 {
    let mut t = 0u32;
    let mut power = 1u64;
    while power <= order / p {
        power *= p;
        t += 1;
    }
    t + 1
}

/// All divisors of the capped small part, each with its factorization.
fn capped_divisors(capped: &Factorization) -> Vec<(BigUint, Factorization)> {
    let mut out = vec![(BigUint::one(), Factorization::new())];
    for &(p, e) in capped {
        let prev = std::mem::take(&mut out);
        for (value, factors) in prev {
            for t in 0..=e {
                let mut v = value.clone();
                let mut f = factors.clone();
                if t > 0 {
                    v *= BigUint::from(p).pow(t);
                    f.push((p, t));
                }
                out.push((v, f));
            }
        }
    }
    out
}

/// `mu(d / m)` when `m | d`, else `None`, both given by factorization.
pub(crate) fn quotient_mobius(d: &Factorization, m: &Factorization) -> Option<i32> {
    let mut mu = 1i32;
    let mut m_iter = m.iter().peekable();
    for &(p, e) in d {
        let m_exp = match m_iter.peek() {
            Some(&&(q, f)) if q == p => {
                m_iter.next();
                f
            }
            _ => 0,
        };
        if m_exp > e {
            return None;
        }
        match e - m_exp {
            0 => {}
            1 => mu = -mu,
            _ => mu = 0,
        }
    }
    if m_iter.next().is_some() {
        return None;
    }
    Some(mu)
}

/// The truncated contribution vector of a small part, from factorizations.
pub(crate) fn class_vector(d_factors: &Factorization, m_factors: &[Factorization]) -> Vec<i8> {
    m_factors
        .iter()
        .map(|mf| quotient_mobius(d_factors, mf).unwrap_or(0) as i8)
        .collect()
}

/// Factorizations of `1..=order`, indexed by `m - 1`.
pub(crate) fn unit_range_factors(order: usize) -> Vec<Factorization> {
    (1..=order as u64)
        .map(|m| arith::factor(m).expect("positive"))
        .collect()
}

/// Builds the class table for `n` (given by factorization) at truncation
/// `order`. Fails with `DivisorCapExceeded` when the grouped classes would
/// outgrow `limits.max_divisor_classes`.
pub(crate) fn build_classes(
    factors: &Factorization,
    order: usize,
    limits: &Limits,
) -> Result<ClassTable> {
    let mut capped = Factorization::new();
    let mut big_primes = Vec::new();
    for &(p, e) in factors {
        if p <= order as u64 {
            capped.push((p, e.min(exponent_cap(p, order as u64))));
        } else {
            big_primes.push(p);
        }
    }

    // Binomial halves: of the 2^j squarefree products over j big primes,
    // half have even weight, except that j = 0 has the empty product only.
    let j = big_primes.len();
    let (even_count, odd_count) = if j == 0 {
        (BigUint::one(), BigUint::zero())
    } else {
        let half = BigUint::one() << (j - 1);
        (half.clone(), half)
    };

    let m_factors = unit_range_factors(order);
    let mut by_vector: BTreeMap<Vec<i8>, Vec<Source>> = BTreeMap::new();
    let mut class_count = 0usize;
    for (small, small_factors) in capped_divisors(&capped) {
        let w = class_vector(&small_factors, &m_factors);
        for negated in [false, true] {
            let count = if negated {
                odd_count.clone()
            } else {
                even_count.clone()
            };
            if count.is_zero() {
                continue;
            }
            let vector: Vec<i8> = if negated {
                w.iter().map(|&v| -v).collect()
            } else {
                w.clone()
            };
            if vector.iter().all(|&v| v == 0) {
                continue;
            }
            class_count += 1;
            if class_count > limits.max_divisor_classes {
                return Err(Error::DivisorCapExceeded {
                    count: class_count,
                    cap: limits.max_divisor_classes,
                });
            }
            by_vector.entry(vector).or_default().push(Source {
                small: small.clone(),
                small_factors: small_factors.clone(),
                negated,
                count,
            });
        }
    }

    let groups = by_vector
        .into_iter()
        .map(|(vector, sources)| {
            let size = sources.iter().map(|s| &s.count).sum();
            Group {
                vector,
                size,
                sources,
            }
        })
        .collect();

    Ok(ClassTable {
        groups,
        big_primes,
        even_count,
        odd_count,
    })
}

/// Lazily enumerates squarefree products over `primes` with the requested
/// parity of the factor count, in increasing value.
///
/// Each popped index subset spawns two successors, "append the next prime"
/// and "replace the last prime with the next", which reach every subset
/// exactly once and only ever grow the product, so a min-heap yields values
/// in nondecreasing order without materializing the powerset.
struct SubsetStream<'a> {
    primes: &'a [u64],
    want_odd: bool,
    heap: BinaryHeap<Reverse<(BigUint, Vec<usize>)>>,
}

impl<'a> SubsetStream<'a> {
    fn new(primes: &'a [u64], want_odd: bool) -> Self {
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((BigUint::one(), Vec::new())));
        SubsetStream {
            primes,
            want_odd,
            heap,
        }
    }

    fn next(&mut self) -> Option<(BigUint, Vec<usize>)> {
        while let Some(Reverse((product, indices))) = self.heap.pop() {
            if let Some(&last) = indices.last() {
                let succ = last + 1;
                if succ < self.primes.len() {
                    let mut grown = indices.clone();
                    grown.push(succ);
                    self.heap
                        .push(Reverse((&product * self.primes[succ], grown)));
                    let mut bumped = indices.clone();
                    bumped.pop();
                    bumped.push(succ);
                    self.heap.push(Reverse((
                        &product / self.primes[last] * self.primes[succ],
                        bumped,
                    )));
                }
            } else if !self.primes.is_empty() {
                self.heap
                    .push(Reverse((BigUint::from(self.primes[0]), vec![0])));
            }
            if (indices.len() % 2 == 1) == self.want_odd {
                return Some((product, indices));
            }
        }
        None
    }
}

/// Materializes a multiplicity assignment as explicit divisors: from each
/// group, the `t` smallest members, found by merging the per-source streams.
/// Values come with factorizations so later truncations need not refactor.
pub(crate) fn extract_certificate(
    table: &ClassTable,
    assignment: &[BigUint],
) -> Result<Vec<(BigUint, Factorization)>> {
    let mut chosen: Vec<(BigUint, Factorization)> = Vec::new();
    for (g, total) in assignment.iter().enumerate() {
        if total.is_zero() {
            continue;
        }
        let t = total
            .to_usize()
            .ok_or_else(|| Error::Internal("certificate multiplicity exceeds memory".into()))?;
        let group = &table.groups[g];
        let mut candidates: Vec<(BigUint, Factorization)> = Vec::new();
        for source in &group.sources {
            let mut stream = SubsetStream::new(&table.big_primes, source.negated);
            for _ in 0..t {
                match stream.next() {
                    Some((product, prime_indices)) => {
                        let mut factors = source.small_factors.clone();
                        for idx in prime_indices {
                            factors.push((table.big_primes[idx], 1));
                        }
                        candidates.push((&source.small * &product, factors));
                    }
                    None => break,
                }
            }
        }
        candidates.sort();
        if candidates.len() < t {
            return Err(Error::Internal(
                "divisor class smaller than its assigned multiplicity".into(),
            ));
        }
        chosen.extend(candidates.into_iter().take(t));
    }
    chosen.sort();
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(n: u64, order: usize) -> ClassTable {
        let factors = arith::factor(n).unwrap();
        build_classes(&factors, order, &Limits::default()).unwrap()
    }

    #[test]
    fn exponent_caps() {
        assert_eq!(exponent_cap(2, 8), 4);
        assert_eq!(exponent_cap(2, 7), 3);
        assert_eq!(exponent_cap(3, 9), 3);
        assert_eq!(exponent_cap(5, 4), 1);
    }

    #[test]
    fn quotient_mobius_examples() {
        let d = arith::factor(12).unwrap();
        assert_eq!(quotient_mobius(&d, &arith::factor(12).unwrap()), Some(1));
        assert_eq!(quotient_mobius(&d, &arith::factor(6).unwrap()), Some(-1));
        assert_eq!(quotient_mobius(&d, &arith::factor(4).unwrap()), Some(-1));
        assert_eq!(quotient_mobius(&d, &arith::factor(2).unwrap()), Some(1));
        assert_eq!(quotient_mobius(&d, &arith::factor(3).unwrap()), Some(0));
        assert_eq!(quotient_mobius(&d, &arith::factor(1).unwrap()), Some(0));
        assert_eq!(quotient_mobius(&d, &arith::factor(5).unwrap()), None);
        assert_eq!(quotient_mobius(&d, &arith::factor(8).unwrap()), None);
    }

    #[test]
    fn small_n_has_one_class_per_divisor() {
        // n = 6, order 2: 3 is already a big prime, so the four divisors
        // split as small parts {1, 2} times sides {even, odd}, with the
        // four distinct vectors (1,0), (-1,0), (-1,1), (1,-1).
        let t = table(6, 2);
        assert_eq!(t.big_primes, vec![3]);
        assert_eq!(t.groups.len(), 4);
        let total: BigUint = t.groups.iter().map(|g| &g.size).sum();
        assert_eq!(total, BigUint::from(4u32));
        for v in [[1, 0], [-1, 0], [-1, 1], [1, -1]] {
            let g = &t.groups[t.group_index(&v).unwrap()];
            assert_eq!(g.size, BigUint::one());
        }
    }

    #[test]
    fn big_primes_split_into_parities() {
        // n = 2 * 5 * 7, order 2: big primes {5, 7} give two even products
        // (1, 35) and two odd ones (5, 7) per small part.
        let t = table(70, 2);
        assert_eq!(t.big_primes, vec![5, 7]);
        assert_eq!(t.even_count, BigUint::from(2u32));
        assert_eq!(t.odd_count, BigUint::from(2u32));
        // Small parts 1 and 2, two sides each, all vectors distinct and
        // nonzero: four groups of size 2.
        assert_eq!(t.groups.len(), 4);
        for g in &t.groups {
            assert_eq!(g.size, BigUint::from(2u32));
        }
    }

    #[test]
    fn high_powers_drop_out() {
        // n = 2^10, order 2: divisors 8 and up have zero vectors, so only
        // the small parts 1, 2, 4 survive, each its own group of size 1.
        let t = table(1024, 2);
        assert_eq!(t.groups.len(), 3);
        let idx = t.group_index(&[0, -1]).unwrap();
        assert_eq!(t.groups[idx].size, BigUint::one());
        assert_eq!(t.groups[idx].sources[0].small_factors, vec![(2u64, 2u32)]);
    }

    #[test]
    fn subset_stream_orders_products() {
        let primes = [3u64, 5, 7, 11];
        let mut even = SubsetStream::new(&primes, false);
        let got: Vec<u64> = std::iter::from_fn(|| even.next())
            .map(|(v, _)| v.to_u64().unwrap())
            .collect();
        // All 8 even-weight products: 1 and the six pair products and 3*5*7*11.
        assert_eq!(got, vec![1, 15, 21, 33, 35, 55, 77, 1155]);

        let mut odd = SubsetStream::new(&primes, true);
        let got: Vec<u64> = std::iter::from_fn(|| odd.next())
            .map(|(v, _)| v.to_u64().unwrap())
            .collect();
        assert_eq!(got, vec![3, 5, 7, 11, 105, 165, 231, 385]);
    }

    #[test]
    fn subset_stream_handles_no_primes() {
        let mut even = SubsetStream::new(&[], false);
        assert_eq!(even.next(), Some((BigUint::one(), vec![])));
        assert_eq!(even.next(), None);
        let mut odd = SubsetStream::new(&[], true);
        assert_eq!(odd.next(), None);
    }

    #[test]
    fn extraction_takes_smallest_members() {
        // n = 2 * 5 * 7, order 2: group (1, -1) is the odd side of small
        // part 2 and holds {10, 14}; group (-1, 1) is its even side and
        // holds {2, 70}.
        let t = table(70, 2);
        let g = t.group_index(&[1, -1]).unwrap();
        let mut assignment = vec![BigUint::zero(); t.groups.len()];
        assignment[g] = BigUint::one();
        let got = extract_certificate(&t, &assignment).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].0, BigUint::from(10u32));
        assert_eq!(got[0].1, vec![(2u64, 1u32), (5u64, 1u32)]);

        assignment[g] = BigUint::from(2u32);
        let got = extract_certificate(&t, &assignment).unwrap();
        let values: Vec<u64> = got.iter().map(|(v, _)| v.to_u64().unwrap()).collect();
        assert_eq!(values, vec![10, 14]);

        let e = t.group_index(&[-1, 1]).unwrap();
        assignment[g] = BigUint::zero();
        assignment[e] = BigUint::from(2u32);
        let got = extract_certificate(&t, &assignment).unwrap();
        let values: Vec<u64> = got.iter().map(|(v, _)| v.to_u64().unwrap()).collect();
        assert_eq!(values, vec![2, 70]);

        assignment[e] = BigUint::from(3u32);
        assert!(matches!(
            extract_certificate(&t, &assignment),
            Err(Error::Internal(_))
        ));
    }

    #[test]
    fn class_cap_is_enforced() {
        let factors = arith::factor(6).unwrap();
        let limits = Limits {
            max_divisor_classes: 2,
            ..Limits::default()
        };
        assert!(matches!(
            build_classes(&factors, 2, &limits),
            Err(Error::DivisorCapExceeded { .. })
        ));
    }
}
