//! Positive binary floating-point numbers with a fixed mantissa length and
//! explicit rounding direction, for cheap certified enclosures of large
//! products.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exact::BigRat;

const PRECISION: u64 = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(super) enum Round {
    Down,
    Up,
}

/// `mantissa * 2^exponent` with a positive mantissa.
#[derive(Clone, Debug)]
pub(super) struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    fn normalized(mantissa: BigInt, exponent: i64, round: Round) -> Self {
        let bits = mantissa.bits();
        if bits <= PRECISION {
            return Dyadic { mantissa, exponent };
        }
        let shift = bits - PRECISION;
        let mut kept = &mantissa >> shift;
        if round == Round::Up && (&kept << shift) != mantissa {
            kept += 1;
        }
        Dyadic {
            mantissa: kept,
            exponent: exponent + shift as i64,
        }
    }

    /// Rounded value of a positive rational.
    pub fn from_rat(x: &BigRat, round: Round) -> Self {
        debug_assert!(x.is_positive());
        let k = PRECISION as i64 + x.denom().bits() as i64 - x.numer().bits() as i64 + 1;
        let (num, den) = if k >= 0 {
            (x.numer() << k as u64, x.denom().clone())
        } else {
            (x.numer().clone(), x.denom() << (-k) as u64)
        };
        let (mut q, r) = num.div_rem(&den);
        if round == Round::Up && !r.is_zero() {
            q += 1;
        }
        Dyadic::normalized(q, -k, round)
    }

    pub fn one() -> Self {
        Dyadic {
            mantissa: BigInt::one(),
            exponent: 0,
        }
    }

    pub fn mul(&self, other: &Dyadic, round: Round) -> Self {
        Dyadic::normalized(
            &self.mantissa * &other.mantissa,
            self.exponent + other.exponent,
            round,
        )
    }

    pub fn pow(&self, mut e: u64, round: Round) -> Self {
        let mut result = Dyadic::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base, round);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, round);
            }
        }
        result
    }

    fn magnitude(&self) -> i64 {
        self.mantissa.bits() as i64 + self.exponent
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.magnitude().cmp(&other.magnitude()) {
            Ordering::Equal => {}
            unequal => return unequal,
        }
        let common = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - common) as u64;
        let b = &other.mantissa << (other.exponent - common) as u64;
        a.cmp(&b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn to_rat(d: &Dyadic) -> BigRat {
        BigRat::from_integer(d.mantissa.clone()) * {
            if d.exponent >= 0 {
                BigRat::from_integer(BigInt::one() << d.exponent as u64)
            } else {
                BigRat::new(BigInt::one(), BigInt::one() << (-d.exponent) as u64)
            }
        }
    }

    #[test]
    fn rounding_brackets_the_value() {
        for (p, q) in [(1, 3), (22, 7), (1, 1), (12345, 67), (3, 1 << 20)] {
            let x = rat(p, q);
            let lo = Dyadic::from_rat(&x, Round::Down);
            let hi = Dyadic::from_rat(&x, Round::Up);
            assert!(to_rat(&lo) <= x && x <= to_rat(&hi));
            let e = 300;
            let exact = num_traits::pow(x.clone(), e as usize);
            assert!(to_rat(&lo.pow(e, Round::Down)) <= exact);
            assert!(to_rat(&hi.pow(e, Round::Up)) >= exact);
        }
    }

    #[test]
    fn ordering() {
        let a = Dyadic::from_rat(&rat(1, 3), Round::Down);
        let b = Dyadic::from_rat(&rat(1, 2), Round::Down);
        assert!(a < b);
        assert!(Dyadic::one() == Dyadic::from_rat(&rat(1, 1), Round::Up));
    }
}
