//! Integer polynomials used internally by the root counters. Every operation
//! here scales only by positive constants so that signs at points survive.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::RatPoly;
use super::rational::{BigRat, ExtRat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct ZPoly(Vec<BigInt>);

impl ZPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        ZPoly(coeffs)
    }

    /// Positive multiple of `p` with coprime integer coefficients.
    pub fn from_rat(p: &RatPoly) -> Self {
        Self::cleared(p).primitive()
    }

    /// `p` times the lcm of its denominators, without removing the content.
    pub fn cleared(p: &RatPoly) -> Self {
        let lcm = p
            .coeffs()
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints = p
            .coeffs()
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        ZPoly::new(ints)
    }

    pub fn to_rat(&self) -> RatPoly {
        RatPoly::new(self.0.iter().cloned().map(BigRat::from_integer).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lc(&self) -> &BigInt {
        self.0.last().expect("nonzero polynomial")
    }

    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    pub fn primitive(self) -> Self {
        let content = self.content();
        if content.is_zero() || content.is_one() {
            return self;
        }
        ZPoly(self.0.into_iter().map(|c| c / &content).collect())
    }

    pub fn neg(self) -> Self {
        ZPoly(self.0.into_iter().map(|c| -c).collect())
    }

    pub fn derivative(&self) -> Self {
        ZPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn sub(&self, other: &ZPoly) -> ZPoly {
        let len = self.0.len().max(other.0.len());
        ZPoly::new(
            (0..len)
                .map(|i| {
                    let a = self.0.get(i).cloned().unwrap_or_default();
                    match other.0.get(i) {
                        Some(b) => a - b,
                        None => a,
                    }
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &ZPoly) -> ZPoly {
        if self.is_zero() || other.is_zero() {
            return ZPoly::new(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ZPoly::new(out)
    }

    pub fn pow(&self, exponent: u64) -> ZPoly {
        let mut result = ZPoly::new(vec![BigInt::one()]);
        let mut base = self.clone();
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Remainder of `|lc(b)|^(deg a - deg b + 1) * a` divided by `b`.
    ///
    /// The multiplier is positive, so the result has the sign behaviour of the
    /// true Euclidean remainder.
    pub fn positive_prem(&self, b: &ZPoly) -> ZPoly {
        let db = b.degree().expect("nonzero divisor");
        let Some(da) = self.degree() else {
            return ZPoly::new(Vec::new());
        };
        if da < db {
            return self.clone();
        }
        let lb = b.lc().clone();
        let mut r = self.0.clone();
        let mut steps = 0usize;
        while r.len() > db {
            let shift = r.len() - 1 - db;
            let lr = r.last().expect("nonempty").clone();
            for c in r.iter_mut() {
                *c *= &lb;
            }
            for (i, c) in b.0.iter().enumerate() {
                r[shift + i] -= &lr * c;
            }
            r.pop();
            steps += 1;
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        let expected = da - db + 1;
        let extra = num_traits::pow(lb.clone(), expected - steps);
        let mut rem = ZPoly::new(r.into_iter().map(|c| c * &extra).collect());
        if lb.is_negative() && expected % 2 == 1 {
            rem = rem.neg();
        }
        rem
    }

    /// Exact quotient when `divisor` divides `self` over the integers.
    pub fn div_exact(&self, divisor: &ZPoly) -> Option<ZPoly> {
        let dd = divisor.degree()?;
        let lead = divisor.lc();
        let mut rem = self.0.clone();
        if rem.is_empty() {
            return Some(ZPoly::new(Vec::new()));
        }
        if rem.len() <= dd {
            return None;
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        while rem.len() > dd {
            let shift = rem.len() - 1 - dd;
            let top = rem.last().expect("nonempty");
            let (factor, leftover) = top.div_rem(lead);
            if !leftover.is_zero() {
                return None;
            }
            for (i, c) in divisor.0.iter().enumerate() {
                rem[shift + i] -= &factor * c;
            }
            quot[shift] = factor;
            rem.pop();
        }
        if rem.iter().all(Zero::is_zero) {
            Some(ZPoly::new(quot))
        } else {
            None
        }
    }

    /// Primitive gcd with positive leading coefficient.
    pub fn gcd(&self, other: &ZPoly) -> ZPoly {
        let (mut a, mut b) = (self.clone().primitive(), other.clone().primitive());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.positive_prem(&b).primitive();
            a = b;
            b = r;
        }
        if !a.is_zero() && a.lc().is_negative() {
            a = a.neg();
        }
        a
    }

    /// Sign of the value at a finite point, or of the limit at an infinity.
    pub fn sign_at(&self, x: &ExtRat) -> i8 {
        let Some(deg) = self.degree() else {
            return 0;
        };
        match x {
            ExtRat::PlusInfinity => signum(self.lc()),
            ExtRat::MinusInfinity => {
                let s = signum(self.lc());
                if deg % 2 == 1 {
                    -s
                } else {
                    s
                }
            }
            ExtRat::Finite(v) => {
                // q^deg * f(p/q), q > 0
                let (p, q) = (v.numer(), v.denom());
                let mut acc = BigInt::zero();
                let mut qpow = BigInt::one();
                for c in self.0.iter().rev() {
                    acc = acc * p + c * &qpow;
                    qpow *= q;
                }
                signum(&acc)
            }
        }
    }

    /// `(q y - p)` for the rational `p/q`.
    pub fn linear_factor(root: &BigRat) -> ZPoly {
        ZPoly::new(vec![-root.numer().clone(), root.denom().clone()])
    }
}

fn signum(v: &BigInt) -> i8 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}
