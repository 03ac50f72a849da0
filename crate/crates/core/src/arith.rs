//! Elementary number-theoretic primitives.
//!
//! Everything here is deterministic and exact: factorization is plain trial
//! division with an explicit bound, primality is trial division, and there
//! is no shared mutable state, so results never depend on call order.
//!
//! Key components:
//! - [`factor`], [`divisors`], [`mobius`], [`omega`], [`totient`]: classical
//!   multiplicative functions on `u64` arguments.
//! - [`delta`]: the sign `delta(1) = -1`, `delta(d) = 1` for `d > 1`.
//! - [`PrimeList`] and [`next_primes`]: ordered prime generation.
//! - [`factor_biguint`]: trial-division factoring for big integers whose
//!   prime factors are small.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest argument the trial-division factoring routines accept.
pub const FACTOR_BOUND: u64 = i64::MAX as u64;

/// Prime factorization as `(prime, exponent)` pairs with primes ascending.
pub type Factorization = Vec<(u64, u32)>;

fn require_positive(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::ZeroArgument);
    }
    Ok(())
}

fn require_factorable(n: u64) -> Result<()> {
    require_positive(n)?;
    if n > FACTOR_BOUND {
        return Err(Error::FactorBoundExceeded(n.to_string()));
    }
    Ok(())
}

/// Prime factorization of `n` by deterministic trial division.
pub fn factor(n: u64) -> Result<Factorization> {
    require_factorable(n)?;
    let mut rest = n;
    let mut out = Vec::new();
    let mut push = |p: u64, rest: &mut u64| {
        let mut e = 0u32;
        while *rest % p == 0 {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut rest);
    let mut c = 3u64;
    while c.checked_mul(c).map_or(false, |cc| cc <= rest) {
        push(c, &mut rest);
        c += 2;
    }
    if rest > 1 {
        out.push((rest, 1));
    }
    Ok(out)
}

/// Möbius function: 0 if `n` has a squared prime factor, else `(-1)^omega(n)`.
pub fn mobius(n: u64) -> Result<i32> {
    Ok(mobius_of_factored(&factor(n)?))
}

/// Möbius value read off a factorization.
pub fn mobius_of_factored(factors: &Factorization) -> i32 {
    if factors.iter().any(|&(_, e)| e > 1) {
        0
    } else if factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Number of distinct prime factors.
pub fn omega(n: u64) -> Result<u32> {
    Ok(factor(n)?.len() as u32)
}

/// Sign normalizer: `-1` for `d = 1`, `+1` for every `d > 1`.
pub fn delta(d: u64) -> Result<i32> {
    require_positive(d)?;
    Ok(if d == 1 { -1 } else { 1 })
}

/// Euler totient.
pub fn totient(n: u64) -> Result<u64> {
    let mut t = 1u64;
    for (p, e) in factor(n)? {
        t *= p.pow(e - 1) * (p - 1);
    }
    Ok(t)
}

/// All positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    let factors = factor(n)?;
    let mut out = vec![1u64];
    for (p, e) in factors {
        let prev = out.clone();
        let mut pe = 1u64;
        for _ in 0..e {
            pe *= p;
            out.extend(prev.iter().map(|d| d * pe));
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Least common multiple of the values; `1` for an empty list.
///
/// Computed in `BigUint` so large supports cannot overflow silently.
pub fn lcm_all(values: &[u64]) -> BigUint {
    let mut acc = BigUint::one();
    for &v in values {
        assert!(v > 0, "lcm_all requires positive values");
        acc = acc.lcm(&BigUint::from(v));
    }
    acc
}

// ---- Prime generation ----

/// Deterministic primality test by trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut c = 3u64;
    while c.checked_mul(c).map_or(false, |cc| cc <= n) {
        if n % c == 0 {
            return false;
        }
        c += 2;
    }
    true
}

/// A strictly increasing list of verified primes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeList {
    primes: Vec<u64>,
}

impl PrimeList {
    /// Wraps a list after checking it is strictly increasing and all prime.
    pub fn new(primes: Vec<u64>) -> Result<Self> {
        for (i, &p) in primes.iter().enumerate() {
            if !is_prime(p) {
                return Err(Error::InvalidArgument(format!("{p} is not prime")));
            }
            if i > 0 && primes[i - 1] >= p {
                return Err(Error::InvalidArgument(
                    "primes must be strictly increasing".into(),
                ));
            }
        }
        Ok(PrimeList { primes })
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

/// The first `count` primes strictly greater than `lower` that do not divide
/// `coprime_to`, in increasing order.
pub fn next_primes(lower: u64, count: usize, coprime_to: u64) -> PrimeList {
    let mut primes = Vec::with_capacity(count);
    let mut c = lower.max(1);
    while primes.len() < count {
        c += 1;
        if is_prime(c) && (coprime_to == 0 || coprime_to % c != 0) {
            primes.push(c);
        }
    }
    PrimeList { primes }
}

// ---- Big-integer factoring ----

/// Factors a positive `BigUint` by trial division with candidates up to
/// `trial_bound`.
///
/// Succeeds whenever every prime factor is at most `trial_bound`, or the
/// final cofactor is provably prime (it exceeds the bound but not its
/// square). Anything else is a resource error: the routine never guesses.
pub fn factor_biguint(n: &BigUint, trial_bound: u64) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::ZeroArgument);
    }
    if let Some(small) = n.to_u64() {
        if small <= FACTOR_BOUND {
            return factor(small);
        }
    }
    let mut rest = n.clone();
    let mut out = Vec::new();
    let mut strip = |p: u64, rest: &mut BigUint| {
        let big = BigUint::from(p);
        let mut e = 0u32;
        while (&*rest % &big).is_zero() {
            *rest /= &big;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    strip(2, &mut rest);
    let mut c = 3u64;
    while c <= trial_bound && !rest.is_one() {
        // Once the cofactor fits in u64 the plain routine finishes exactly.
        if let Some(small) = rest.to_u64() {
            if small <= FACTOR_BOUND {
                let tail = factor(small)?;
                return Ok(merge_factorizations(out, tail));
            }
        }
        strip(c, &mut rest);
        c += 2;
    }
    if rest.is_one() {
        return Ok(out);
    }
    if let Some(small) = rest.to_u64() {
        if small <= FACTOR_BOUND {
            let tail = factor(small)?;
            return Ok(merge_factorizations(out, tail));
        }
    }
    let bound_sq = BigUint::from(trial_bound) * BigUint::from(trial_bound);
    if rest <= bound_sq {
        // No divisor up to trial_bound and rest <= trial_bound^2: prime.
        let p = rest
            .to_u64()
            .ok_or_else(|| Error::FactorBoundExceeded(n.to_string()))?;
        out.push((p, 1));
        return Ok(out);
    }
    Err(Error::FactorBoundExceeded(n.to_string()))
}

/// Combines two factorizations of coprime or overlapping values into one,
/// adding exponents of shared primes.
pub fn merge_factorizations(mut head: Factorization, tail: Factorization) -> Factorization {
    for (p, e) in tail {
        if let Some(entry) = head.iter_mut().find(|(q, _)| *q == p) {
            entry.1 += e;
        } else {
            head.push((p, e));
        }
    }
    head.sort_unstable_by_key(|&(p, _)| p);
    head
}

/// Rebuilds the integer value of a factorization.
pub fn value_of_factored(factors: &Factorization) -> BigUint {
    let mut v = BigUint::one();
    for &(p, e) in factors {
        v *= BigUint::from(p).pow(e);
    }
    v
}

/// Euler totient read off a factorization, exact at any size.
pub fn totient_of_factored(factors: &Factorization) -> BigUint {
    let mut t = BigUint::one();
    for &(p, e) in factors {
        t *= BigUint::from(p).pow(e - 1) * BigUint::from(p - 1);
    }
    t
}
