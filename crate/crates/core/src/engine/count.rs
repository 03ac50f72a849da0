//! Counting sweeps: how many members up to `x`, and the smallest one.
//!
//! Every member is a multiple of the modulus, so a sweep only ever tests
//! multiples of it, and `floor(x / modulus)` is a hard ceiling on the
//! count. The ratio of count to ceiling tends to 1, which the checkpoint
//! rows expose as an exact rational.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::engine::{Limits, MembershipContext};
use crate::error::{Error, Result};

/// One checkpoint of a counting sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountRow {
    pub x: u64,
    /// Members up to and including `x`.
    pub members: u64,
    /// The structural ceiling `floor(x / modulus)`.
    pub bound: u64,
    /// `members * modulus / x`, fully reduced.
    pub ratio: BigRational,
}

/// Counts members at each checkpoint in one pass over the multiples of the
/// modulus. Checkpoints must be positive, ascending, and within `limit`.
/// A decision failure on some multiple aborts the sweep with the failing
/// `n` attached.
pub fn count_members(
    seq: &[BigInt],
    limit: u64,
    checkpoints: &[u64],
    limits: &Limits,
) -> Result<Vec<CountRow>> {
    if limit == 0 || checkpoints.iter().any(|&x| x == 0) {
        return Err(Error::ZeroArgument);
    }
    for pair in checkpoints.windows(2) {
        if pair[0] > pair[1] {
            return Err(Error::InvalidArgument(
                "checkpoints must be ascending".into(),
            ));
        }
    }
    if checkpoints.last().is_some_and(|&x| x > limit) {
        return Err(Error::InvalidArgument(
            "checkpoints must not exceed the limit".into(),
        ));
    }
    let ctx = MembershipContext::new(seq, limits);
    let step = ctx.modulus().to_u64();
    let mut rows = Vec::with_capacity(checkpoints.len());
    let mut members: u64 = 0;
    let mut cursor = step;
    for &x in checkpoints {
        while let (Some(m), Some(s)) = (cursor, step) {
            if m > x {
                break;
            }
            let decision = ctx.decide_u64(m).map_err(|e| Error::CountFailed {
                n: m,
                source: Box::new(e),
            })?;
            if decision.member {
                members += 1;
            }
            cursor = m.checked_add(s);
        }
        rows.push(CountRow {
            x,
            members,
            bound: step.map_or(0, |s| x / s),
            ratio: ratio_at(members, ctx.modulus(), x),
        });
    }
    Ok(rows)
}

/// The least member not exceeding `limit`, scanning multiples of the
/// modulus from below.
pub fn smallest_member(seq: &[BigInt], limit: u64, limits: &Limits) -> Result<Option<u64>> {
    if limit == 0 {
        return Err(Error::ZeroArgument);
    }
    let ctx = MembershipContext::new(seq, limits);
    let step = match ctx.modulus().to_u64() {
        Some(s) => s,
        None => return Ok(None),
    };
    let mut m = step;
    while m <= limit {
        let decision = ctx.decide_u64(m).map_err(|e| Error::CountFailed {
            n: m,
            source: Box::new(e),
        })?;
        if decision.member {
            return Ok(Some(m));
        }
        match m.checked_add(step) {
            Some(next) => m = next,
            None => break,
        }
    }
    Ok(None)
}

fn ratio_at(members: u64, modulus: &BigUint, x: u64) -> BigRational {
    BigRational::new(
        BigInt::from(members) * BigInt::from(modulus.clone()),
        BigInt::from(x),
    )
}

/// Renders a nonnegative rational with six decimals, rounding half up.
pub fn decimal_six(ratio: &BigRational) -> String {
    let scaled = ratio * BigRational::from_integer(BigInt::from(1_000_000));
    let num = scaled.numer();
    let den = scaled.denom();
    let two = BigInt::from(2);
    let q = (num * &two + den).div_floor(&(den * &two));
    let million = BigInt::from(1_000_000);
    let whole = &q / &million;
    let frac = &q % &million;
    format!("{whole}.{frac:06}")
}
