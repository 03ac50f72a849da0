//! Truncated integer power series and exact integer polynomials.
//!
//! A [`TruncSeries`] is an element of `Z[[x]] / x^{r+1}` that remembers its
//! truncation order `r`; binary operations insist both sides carry the same
//! order so silent precision loss is impossible. An [`IntPoly`] is an exact
//! polynomial over the integers. Both use arbitrary-precision coefficients.
//!
//! Key components:
//! - [`TruncSeries`]: truncated multiplication and exact inversion of units.
//! - [`one_minus_pow`]: `(1 - x^i)^e` for any signed big exponent `e`.
//! - [`IntPoly`]: exact multiplication and exact division.
//! - [`cyclotomic_exact`] and [`cyclotomic_trunc`]: the n-th cyclotomic
//!   polynomial, exact or truncated with the constant-term-1 normalization.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, Factorization};
use crate::error::{Error, Result};

/// Cap on the degree of any dense polynomial this module will materialize.
pub const MAX_DENSE_DEGREE: u64 = 1 << 20;

// ---- Truncated power series ----

/// An integer power series truncated after `x^order`.
///
/// Holds exactly `order + 1` coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncSeries {
    coeffs: Vec<BigInt>,
}

impl TruncSeries {
    /// The constant series `1` at the given truncation order.
    pub fn one(order: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); order + 1];
        coeffs[0] = BigInt::one();
        TruncSeries { coeffs }
    }

    /// Wraps an explicit coefficient vector; its length fixes the order.
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "a truncated series needs at least a constant term".into(),
            ));
        }
        Ok(TruncSeries { coeffs })
    }

    /// The series `1 + v_1 x + ... + v_r x^r` at truncation order `order`.
    ///
    /// `values` must have exactly `order` entries.
    pub fn from_initial_coeffs(values: &[BigInt], order: usize) -> Result<Self> {
        if values.len() != order {
            return Err(Error::LengthMismatch {
                expected: order,
                actual: values.len(),
            });
        }
        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(BigInt::one());
        coeffs.extend_from_slice(values);
        Ok(TruncSeries { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> &BigInt {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// Truncated product. Both operands must carry the same order.
    pub fn mul(&self, rhs: &TruncSeries) -> Result<TruncSeries> {
        if self.order() != rhs.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: rhs.order(),
            });
        }
        let n = self.coeffs.len();
        let mut out = vec![BigInt::zero(); n];
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in rhs.coeffs.iter().take(n - a).enumerate() {
                if !cb.is_zero() {
                    out[a + b] += ca * cb;
                }
            }
        }
        Ok(TruncSeries { coeffs: out })
    }

    /// Exact multiplicative inverse; the constant term must be 1 or -1.
    pub fn inverse(&self) -> Result<TruncSeries> {
        let c0 = &self.coeffs[0];
        if !(c0.is_one() || (-c0).is_one()) {
            return Err(Error::NonUnitConstant);
        }
        // With c0 = +-1 the triangular solve stays in the integers:
        // b_0 = c0 and b_j = -c0 * sum_{t=1..j} a_t b_{j-t}.
        let n = self.coeffs.len();
        let mut b = vec![BigInt::zero(); n];
        b[0] = c0.clone();
        for j in 1..n {
            let mut s = BigInt::zero();
            for t in 1..=j {
                if !self.coeffs[t].is_zero() {
                    s += &self.coeffs[t] * &b[j - t];
                }
            }
            b[j] = -(c0 * s);
        }
        Ok(TruncSeries { coeffs: b })
    }
}

/// `(1 - x^i)^e` truncated to the given order, for any signed integer `e`.
///
/// Nonnegative exponents expand by the binomial series; negative exponents
/// invert the positive power. Coefficients are exact integers either way.
pub fn one_minus_pow(i: u64, e: &BigInt, order: usize) -> Result<TruncSeries> {
    if i == 0 {
        return Err(Error::ZeroArgument);
    }
    if e.is_negative() {
        return one_minus_pow(i, &-e, order)?.inverse();
    }
    let mut coeffs = vec![BigInt::zero(); order + 1];
    coeffs[0] = BigInt::one();
    let mut c = BigInt::one();
    let mut j = 0u64;
    loop {
        j += 1;
        let pos = match i.checked_mul(j) {
            Some(p) if p <= order as u64 => p as usize,
            _ => break,
        };
        // C(e, j) = C(e, j-1) * (e - j + 1) / j, exact at every step.
        c = c * (e - BigInt::from(j - 1)) / BigInt::from(j);
        if c.is_zero() {
            break;
        }
        coeffs[pos] = if j % 2 == 1 { -c.clone() } else { c.clone() };
    }
    Ok(TruncSeries { coeffs })
}

// ---- Exact integer polynomials ----

/// A polynomial over the integers, constant term first, no trailing zeros.
///
/// The zero polynomial is the empty coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly {
            coeffs: vec![BigInt::one()],
        }
    }

    /// Builds from coefficients, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    /// The dense polynomial `x^n - 1`.
    pub fn x_pow_minus_one(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroArgument);
        }
        if n > MAX_DENSE_DEGREE {
            return Err(Error::DegreeCapExceeded(n));
        }
        let mut coeffs = vec![BigInt::zero(); n as usize + 1];
        coeffs[0] = -BigInt::one();
        coeffs[n as usize] = BigInt::one();
        Ok(IntPoly { coeffs })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Exact product.
    pub fn mul(&self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in rhs.coeffs.iter().enumerate() {
                if !cb.is_zero() {
                    out[a + b] += ca * cb;
                }
            }
        }
        IntPoly::from_coeffs(out)
    }

    /// Exact division; the divisor must be nonzero with leading coefficient
    /// 1 or -1, and any nonzero remainder is an error.
    pub fn exact_div(&self, den: &IntPoly) -> Result<IntPoly> {
        if den.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        let lead = den.leading().expect("nonzero polynomial has a leading term");
        if !(lead.is_one() || (-lead).is_one()) {
            return Err(Error::NonMonicDivisor);
        }
        if self.is_zero() {
            return Ok(IntPoly::zero());
        }
        let nd = self.coeffs.len();
        let dd = den.coeffs.len();
        if nd < dd {
            return Err(Error::InexactDivision);
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); nd - dd + 1];
        for top in (dd - 1..nd).rev() {
            if rem[top].is_zero() {
                continue;
            }
            let q = if lead.is_one() {
                rem[top].clone()
            } else {
                -rem[top].clone()
            };
            let shift = top + 1 - dd;
            for (i, c) in den.coeffs.iter().enumerate() {
                if !c.is_zero() {
                    rem[shift + i] -= &q * c;
                }
            }
            quot[shift] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(Error::InexactDivision);
        }
        Ok(IntPoly::from_coeffs(quot))
    }

    /// The truncation of this polynomial to a series of the given order.
    pub fn truncated(&self, order: usize) -> TruncSeries {
        let mut coeffs = vec![BigInt::zero(); order + 1];
        for (i, c) in self.coeffs.iter().take(order + 1).enumerate() {
            coeffs[i] = c.clone();
        }
        TruncSeries { coeffs }
    }
}

// ---- Cyclotomic polynomials ----

/// The n-th cyclotomic polynomial, exactly.
///
/// Follows `phi_n(x) = prod_{d | n} (x^d - 1)^{mu(n/d)}`: all factors with
/// positive Möbius sign are multiplied in increasing divisor order, then the
/// negative-sign factors are divided out in increasing divisor order. Every
/// intermediate is an integer polynomial and every division is exact.
pub fn cyclotomic_exact(n: u64) -> Result<IntPoly> {
    let divs = arith::divisors(n)?;
    let mut mul_degree = 0u64;
    for &d in &divs {
        if arith::mobius(n / d)? == 1 {
            mul_degree += d;
        }
    }
    if mul_degree > MAX_DENSE_DEGREE {
        return Err(Error::DegreeCapExceeded(mul_degree));
    }
    let mut acc = IntPoly::one();
    for &d in &divs {
        if arith::mobius(n / d)? == 1 {
            acc = acc.mul(&IntPoly::x_pow_minus_one(d)?);
        }
    }
    for &d in &divs {
        if arith::mobius(n / d)? == -1 {
            acc = acc.exact_div(&IntPoly::x_pow_minus_one(d)?)?;
        }
    }
    debug_assert_eq!(acc.degree(), Some(arith::totient(n)? as usize));
    Ok(acc)
}

/// The truncation of `delta(n) * phi_n(x)` to the given order, computed as
/// `prod_{d | n, d <= order} (1 - x^d)^{mu(n/d)}`.
///
/// Divisors above the truncation order contribute nothing modulo
/// `x^{order+1}`, so only small divisors of `n` are touched; this is what
/// makes the truncation cheap even for enormous `n`. The `delta` sign makes
/// the constant term 1 for every `n` (for `n = 1` the result is `1 - x`).
pub fn cyclotomic_trunc(n: u64, order: usize) -> Result<TruncSeries> {
    let factors = arith::factor(n)?;
    Ok(cyclotomic_trunc_of_factored(&factors, order))
}

/// [`cyclotomic_trunc`] driven by an explicit factorization, for arguments
/// too large to factor on the spot.
pub fn cyclotomic_trunc_of_factored(factors: &Factorization, order: usize) -> TruncSeries {
    let mut acc = TruncSeries::one(order);
    if order == 0 {
        return acc;
    }
    for (d, exps) in bounded_divisors(factors, order as u64) {
        let mut mu = 1i32;
        for (i, &(_, e)) in factors.iter().enumerate() {
            match e - exps[i] {
                0 => {}
                1 => mu = -mu,
                _ => {
                    mu = 0;
                    break;
                }
            }
        }
        if mu == 0 {
            continue;
        }
        let factor = one_minus_pow(d, &BigInt::from(mu), order)
            .expect("divisor is positive");
        acc = acc.mul(&factor).expect("orders match by construction");
    }
    acc
}

/// Divisors of the factored integer that are at most `bound`, each with its
/// exponent pattern, in no particular order.
fn bounded_divisors(factors: &Factorization, bound: u64) -> Vec<(u64, Vec<u32>)> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; factors.len()];
    fn recurse(
        factors: &Factorization,
        bound: u64,
        idx: usize,
        value: u64,
        exps: &mut Vec<u32>,
        out: &mut Vec<(u64, Vec<u32>)>,
    ) {
        if idx == factors.len() {
            out.push((value, exps.clone()));
            return;
        }
        let (p, e) = factors[idx];
        let mut v = value;
        for k in 0..=e {
            if k > 0 {
                v = match v.checked_mul(p) {
                    Some(v) if v <= bound => v,
                    _ => break,
                };
            }
            exps[idx] = k;
            recurse(factors, bound, idx + 1, v, exps, out);
        }
        exps[idx] = 0;
    }
    recurse(factors, bound, 0, 1, &mut exps, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ts(coeffs: &[i64]) -> TruncSeries {
        TruncSeries::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect()).unwrap()
    }

    fn poly(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn from_initial_coeffs_examples() {
        assert_eq!(
            TruncSeries::from_initial_coeffs(&[], 0).unwrap(),
            ts(&[1])
        );
        let vals = [BigInt::from(0), BigInt::from(1)];
        assert_eq!(
            TruncSeries::from_initial_coeffs(&vals, 2).unwrap(),
            ts(&[1, 0, 1])
        );
        let vals = [BigInt::from(-1)];
        assert_eq!(
            TruncSeries::from_initial_coeffs(&vals, 1).unwrap(),
            ts(&[1, -1])
        );
        assert!(matches!(
            TruncSeries::from_initial_coeffs(&vals, 3),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(ts(&[1, 1]).mul(&ts(&[1, -1])).unwrap(), ts(&[1, 0]));
        let s = ts(&[1, 1, 1]);
        assert_eq!(s.mul(&s).unwrap(), ts(&[1, 2, 3]));
        assert_eq!(
            s.mul(&TruncSeries::one(2)).unwrap(),
            s
        );
        assert!(matches!(
            ts(&[1, 1]).mul(&ts(&[1])),
            Err(Error::OrderMismatch { .. })
        ));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(ts(&[1, -1, 0]).inverse().unwrap(), ts(&[1, 1, 1]));
        assert_eq!(ts(&[1]).inverse().unwrap(), ts(&[1]));
        assert_eq!(ts(&[1, 2, 0]).inverse().unwrap(), ts(&[1, -2, 4]));
        assert_eq!(ts(&[-1, 1]).inverse().unwrap(), ts(&[-1, -1]));
        assert!(matches!(ts(&[2, 1]).inverse(), Err(Error::NonUnitConstant)));
    }

    #[test]
    fn one_minus_pow_examples() {
        // (1 - x)^{-3} = 1 + 3x + ... truncated at order 1.
        assert_eq!(
            one_minus_pow(1, &BigInt::from(-3), 1).unwrap(),
            ts(&[1, 3])
        );
        assert_eq!(
            one_minus_pow(2, &BigInt::from(-1), 2).unwrap(),
            ts(&[1, 0, 1])
        );
        assert_eq!(
            one_minus_pow(5, &BigInt::from(7), 3).unwrap(),
            ts(&[1, 0, 0, 0])
        );
        assert_eq!(
            one_minus_pow(1, &BigInt::from(3), 3).unwrap(),
            ts(&[1, -3, 3, -1])
        );
        assert!(matches!(
            one_minus_pow(0, &BigInt::one(), 2),
            Err(Error::ZeroArgument)
        ));
    }

    #[test]
    fn poly_mul_examples() {
        assert_eq!(poly(&[-1, 1]).mul(&poly(&[1, 1])), poly(&[-1, 0, 1]));
        assert_eq!(poly(&[]).mul(&poly(&[1, 2, 3])), IntPoly::zero());
        assert_eq!(poly(&[1, 1, 1]).mul(&poly(&[1, -1])), poly(&[1, 0, 0, -1]));
    }

    #[test]
    fn exact_div_examples() {
        assert_eq!(
            poly(&[-1, 0, 1]).exact_div(&poly(&[-1, 1])).unwrap(),
            poly(&[1, 1])
        );
        let x6 = IntPoly::x_pow_minus_one(6).unwrap();
        let x2 = IntPoly::x_pow_minus_one(2).unwrap();
        assert_eq!(x6.exact_div(&x2).unwrap(), poly(&[1, 0, 1, 0, 1]));
        assert!(matches!(
            poly(&[1, 0, 1]).exact_div(&poly(&[-1, 1])),
            Err(Error::InexactDivision)
        ));
        assert!(matches!(
            poly(&[1]).exact_div(&IntPoly::zero()),
            Err(Error::ZeroDivisor)
        ));
        assert!(matches!(
            poly(&[1, 0, 1]).exact_div(&poly(&[1, 2])),
            Err(Error::NonMonicDivisor)
        ));
    }

    #[test]
    fn cyclotomic_exact_examples() {
        assert_eq!(cyclotomic_exact(1).unwrap(), poly(&[-1, 1]));
        assert_eq!(cyclotomic_exact(2).unwrap(), poly(&[1, 1]));
        assert_eq!(cyclotomic_exact(4).unwrap(), poly(&[1, 0, 1]));
        assert_eq!(cyclotomic_exact(6).unwrap(), poly(&[1, -1, 1]));
        assert_eq!(
            cyclotomic_exact(12).unwrap(),
            poly(&[1, 0, -1, 0, 1])
        );
        // The first index whose cyclotomic has a coefficient outside {-1,0,1}.
        let c105 = cyclotomic_exact(105).unwrap();
        assert_eq!(c105.coeffs()[7], BigInt::from(-2));
        assert_eq!(c105.degree(), Some(48));
    }

    #[test]
    fn cyclotomic_trunc_examples() {
        assert_eq!(cyclotomic_trunc(1, 3).unwrap(), ts(&[1, -1, 0, 0]));
        assert_eq!(cyclotomic_trunc(6, 5).unwrap(), ts(&[1, -1, 1, 0, 0, 0]));
        assert_eq!(cyclotomic_trunc(35, 4).unwrap(), ts(&[1, -1, 0, 0, 0]));
        assert_eq!(cyclotomic_trunc(7, 0).unwrap(), ts(&[1]));
    }

    #[test]
    fn trunc_matches_sign_normalized_exact() {
        for n in 1..=150u64 {
            let exact = cyclotomic_exact(n).unwrap();
            let sign = crate::arith::delta(n).unwrap();
            for order in 0..=8usize {
                let t = cyclotomic_trunc(n, order).unwrap();
                let mut reference = exact.truncated(order);
                if sign == -1 {
                    let flipped: Vec<BigInt> =
                        reference.coeffs().iter().map(|c| -c).collect();
                    reference = TruncSeries::from_coeffs(flipped).unwrap();
                }
                assert_eq!(t, reference, "n = {n}, order = {order}");
            }
        }
    }

    #[test]
    fn cyclotomics_multiply_to_x_n_minus_one_small() {
        for n in 1..=60u64 {
            let mut acc = IntPoly::one();
            for d in crate::arith::divisors(n).unwrap() {
                acc = acc.mul(&cyclotomic_exact(d).unwrap());
            }
            assert_eq!(acc, IntPoly::x_pow_minus_one(n).unwrap(), "n = {n}");
        }
    }

    fn arb_unit_series() -> impl Strategy<Value = TruncSeries> {
        (0usize..=10, any::<bool>()).prop_flat_map(|(order, neg)| {
            proptest::collection::vec(-9i64..=9, order).prop_map(move |tail| {
                let mut coeffs = vec![BigInt::from(if neg { -1 } else { 1 })];
                coeffs.extend(tail.into_iter().map(BigInt::from));
                TruncSeries::from_coeffs(coeffs).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn inverse_roundtrips(s in arb_unit_series()) {
            let inv = s.inverse().unwrap();
            prop_assert!(s.mul(&inv).unwrap().is_one());
            prop_assert_eq!(inv.inverse().unwrap(), s);
        }

        #[test]
        fn one_minus_pow_adds_exponents(
            i in 1u64..=6,
            e1 in -12i64..=12,
            e2 in -12i64..=12,
            order in 0usize..=8,
        ) {
            let a = one_minus_pow(i, &BigInt::from(e1), order).unwrap();
            let b = one_minus_pow(i, &BigInt::from(e2), order).unwrap();
            let both = one_minus_pow(i, &BigInt::from(e1 + e2), order).unwrap();
            prop_assert_eq!(a.mul(&b).unwrap(), both);
        }

        #[test]
        fn poly_division_undoes_multiplication(
            a in proptest::collection::vec(-9i64..=9, 0..=8),
            b in proptest::collection::vec(-9i64..=9, 0..=8),
            monic_neg in any::<bool>(),
        ) {
            let num = IntPoly::from_coeffs(a.into_iter().map(BigInt::from).collect());
            let mut den_coeffs: Vec<BigInt> = b.into_iter().map(BigInt::from).collect();
            den_coeffs.push(BigInt::from(if monic_neg { -1 } else { 1 }));
            let den = IntPoly::from_coeffs(den_coeffs);
            let prod = num.mul(&den);
            prop_assert_eq!(prod.exact_div(&den).unwrap(), num);
        }
    }
}
