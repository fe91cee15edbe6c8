//! Real root counting on open intervals: Sturm chains for distinct roots and
//! Yun's squarefree decomposition for multiplicities.

use super::poly::RatPoly;
use super::rational::{BigRat, ExtRat};
use super::sign::sign_variation;
use super::zpoly::ZPoly;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RootCount {
    pub distinct: usize,
    pub with_multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarefreeFactor {
    /// Primitive integer polynomial with positive leading coefficient.
    pub factor: RatPoly,
    pub multiplicity: usize,
}

/// Sturm chain `f, f', -rem(f, f'), ...` with each member reduced to its
/// primitive part.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<ZPoly>,
}

impl SturmChain {
    pub fn new(p: &RatPoly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::IdenticallyZero);
        }
        Ok(Self::from_zpoly(ZPoly::from_rat(p)))
    }

    pub(crate) fn from_zpoly(f: ZPoly) -> Self {
        let mut chain = vec![f.clone()];
        let mut prev = f;
        let mut cur = prev.derivative().primitive();
        while !cur.is_zero() {
            let next = prev.positive_prem(&cur).neg().primitive();
            chain.push(cur.clone());
            prev = cur;
            cur = next;
        }
        SturmChain { chain }
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    pub fn polynomials(&self) -> Vec<RatPoly> {
        self.chain.iter().map(ZPoly::to_rat).collect()
    }

    /// Last member of the chain, a primitive multiple of `gcd(f, f')`.
    pub(crate) fn tail(&self) -> &ZPoly {
        self.chain.last().expect("chain is never empty")
    }

    pub fn variations_at(&self, x: &ExtRat) -> usize {
        let signs: Vec<i8> = self.chain.iter().map(|p| p.sign_at(x)).collect();
        sign_variation(&signs)
    }

    /// Distinct roots in the open interval `(a, b)`; neither endpoint may be a
    /// root of the chain's first polynomial.
    pub fn count_between(&self, a: &ExtRat, b: &ExtRat) -> usize {
        let va = self.variations_at(a);
        let vb = self.variations_at(b);
        va.saturating_sub(vb)
    }
}

/// Yun's algorithm: `p = c * prod q_i^i` with pairwise coprime squarefree `q_i`.
/// Constant factors are dropped; a constant input yields an empty list.
pub fn squarefree_decomposition(p: &RatPoly) -> Result<Vec<SquarefreeFactor>> {
    if p.is_zero() {
        return Err(Error::IdenticallyZero);
    }
    Ok(yun(&ZPoly::from_rat(p))
        .into_iter()
        .map(|(q, m)| SquarefreeFactor {
            factor: q.to_rat(),
            multiplicity: m,
        })
        .collect())
}

pub fn squarefree_part(p: &RatPoly) -> Result<RatPoly> {
    Ok(squarefree_decomposition(p)?
        .iter()
        .fold(RatPoly::one(), |acc, f| &acc * &f.factor))
}

pub(crate) fn yun(f: &ZPoly) -> Vec<(ZPoly, usize)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let df = f.derivative();
    let g = f.gcd(&df);
    let mut b = f.div_exact(&g).expect("gcd divides f");
    let c = df.div_exact(&g).expect("gcd divides f'");
    let mut d = c.sub(&b.derivative());
    let mut multiplicity = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), multiplicity));
        }
        b = b.div_exact(&a).expect("gcd divides b");
        let c = d.div_exact(&a).expect("gcd divides d");
        d = c.sub(&b.derivative());
        multiplicity += 1;
    }
    out.into_iter()
        .map(|(q, m)| {
            let q = q.primitive();
            let q = if q.lc() < &num_bigint::BigInt::from(0) { q.neg() } else { q };
            (q, m)
        })
        .collect()
}

/// Counts the roots of `p` strictly inside `(a, b)`, both as distinct points
/// and with multiplicity.
pub fn count_roots_in_interval(p: &RatPoly, a: &ExtRat, b: &ExtRat) -> Result<RootCount> {
    if p.is_zero() {
        return Err(Error::IdenticallyZero);
    }
    if a >= b {
        return Err(Error::InvalidInterval(format!("({a}, {b})")));
    }
    let mut f = ZPoly::from_rat(p);
    for endpoint in [a, b] {
        if let ExtRat::Finite(v) = endpoint {
            f = strip_root(f, v);
        }
    }
    if f.degree() == Some(0) {
        return Ok(RootCount {
            distinct: 0,
            with_multiplicity: 0,
        });
    }
    let sturm = SturmChain::from_zpoly(f.clone());
    let distinct = sturm.count_between(a, b);
    if distinct == 0 || sturm.tail().degree() == Some(0) {
        return Ok(RootCount {
            distinct,
            with_multiplicity: distinct,
        });
    }
    let mut with_multiplicity = 0;
    let mut check = 0;
    for (q, m) in yun(&f) {
        let count = SturmChain::from_zpoly(q).count_between(a, b);
        with_multiplicity += m * count;
        check += count;
    }
    if check != distinct {
        return Err(Error::Internal(format!(
            "squarefree factors give {check} distinct roots, Sturm chain gives {distinct}"
        )));
    }
    Ok(RootCount {
        distinct,
        with_multiplicity,
    })
}

/// Sum of the signs of `q` over the distinct roots of `p` in `(a, b)`, read
/// off the signed remainder sequence of `p` and `p' * q`.
pub fn tarski_query(p: &RatPoly, q: &RatPoly, a: &ExtRat, b: &ExtRat) -> Result<i64> {
    if p.is_zero() {
        return Err(Error::IdenticallyZero);
    }
    if a >= b {
        return Err(Error::InvalidInterval(format!("({a}, {b})")));
    }
    let mut f = ZPoly::from_rat(p);
    for endpoint in [a, b] {
        if let ExtRat::Finite(v) = endpoint {
            f = strip_root(f, v);
        }
    }
    if q.is_zero() || f.degree() == Some(0) {
        return Ok(0);
    }
    // only the values of p' * q at roots of p matter, and reducing modulo p
    // leaves the Cauchy index of (p' * q) / p unchanged
    // q may carry huge coefficients; content removal would cost more than the
    // short remainder sequence saves
    let reduced = f.derivative().mul(&ZPoly::cleared(q));
    let reduced = match reduced.degree() {
        Some(d) if d >= f.degree().unwrap_or(0) => reduced.positive_prem(&f),
        _ => reduced,
    };
    let mut seq = vec![f.clone()];
    let mut prev = f.clone();
    let mut cur = reduced;
    while !cur.is_zero() {
        let next = prev.positive_prem(&cur).neg();
        seq.push(cur.clone());
        prev = cur;
        cur = next;
    }
    let variations = |x: &ExtRat| {
        let signs: Vec<i8> = seq.iter().map(|p| p.sign_at(x)).collect();
        sign_variation(&signs) as i64
    };
    Ok(variations(a) - variations(b))
}

fn strip_root(mut f: ZPoly, root: &BigRat) -> ZPoly {
    let factor = ZPoly::linear_factor(root);
    while f.sign_at(&ExtRat::Finite(root.clone())) == 0 && f.degree().unwrap_or(0) > 0 {
        f = f.div_exact(&factor).expect("rational root gives an integer factor");
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};
    use proptest::prelude::*;

    fn open(a: i64, b: Option<i64>) -> (ExtRat, ExtRat) {
        (
            ExtRat::Finite(int(a)),
            b.map_or(ExtRat::PlusInfinity, |b| ExtRat::Finite(int(b))),
        )
    }

    #[test]
    fn single_positive_root_of_the_parity_counterexample() {
        let p = RatPoly::new(vec![int(-1), int(1), rat(13, 8)]);
        let (a, b) = open(0, None);
        let c = count_roots_in_interval(&p, &a, &b).unwrap();
        assert_eq!((c.distinct, c.with_multiplicity), (1, 1));
    }

    #[test]
    fn double_root_counts_twice() {
        let p = RatPoly::from_i64(&[1, -2, 1]);
        let (a, b) = open(0, Some(2));
        let c = count_roots_in_interval(&p, &a, &b).unwrap();
        assert_eq!((c.distinct, c.with_multiplicity), (1, 2));
    }

    #[test]
    fn cubic_with_three_positive_roots() {
        // (y - 1)(y^2 - 3y + 1): roots 1 and (3 +- sqrt 5)/2, all positive
        let p = RatPoly::from_i64(&[-1, 4, -4, 1]);
        let (a, b) = open(0, None);
        let c = count_roots_in_interval(&p, &a, &b).unwrap();
        assert_eq!((c.distinct, c.with_multiplicity), (3, 3));
    }

    #[test]
    fn endpoint_roots_are_excluded() {
        // y (y - 1)^2 (y - 2) on (0, 2): only the double root at 1 is inside
        let p = &(&RatPoly::from_i64(&[0, 1]) * &RatPoly::from_i64(&[1, -2, 1]))
            * &RatPoly::from_i64(&[-2, 1]);
        let (a, b) = open(0, Some(2));
        let c = count_roots_in_interval(&p, &a, &b).unwrap();
        assert_eq!((c.distinct, c.with_multiplicity), (1, 2));
        let (a, b) = open(1, Some(2));
        let c = count_roots_in_interval(&p, &a, &b).unwrap();
        assert_eq!((c.distinct, c.with_multiplicity), (0, 0));
    }

    #[test]
    fn tarski_query_signs() {
        // roots 1, 2, 3; q = y - 2 is negative, zero, positive there
        let p = RatPoly::from_i64(&[-6, 11, -6, 1]);
        let q = RatPoly::from_i64(&[-2, 1]);
        let (a, b) = open(0, None);
        assert_eq!(tarski_query(&p, &q, &a, &b).unwrap(), 0);
        let (a, b) = open(0, Some(2));
        assert_eq!(tarski_query(&p, &q, &a, &b).unwrap(), -1);
        let (a, b) = open(2, None);
        assert_eq!(tarski_query(&p, &q, &a, &b).unwrap(), 1);
        let q = RatPoly::from_i64(&[5, 0, -1]);
        let (a, b) = open(0, None);
        // 5 - y^2 at 1, 2, 3: +, +, -
        assert_eq!(tarski_query(&p, &q, &a, &b).unwrap(), 1);
        // repeated roots count once
        let p2 = &p * &p;
        assert_eq!(tarski_query(&p2, &q, &a, &b).unwrap(), 1);
    }

    #[test]
    fn errors() {
        let (a, b) = open(0, Some(1));
        assert_eq!(
            count_roots_in_interval(&RatPoly::zero(), &a, &b),
            Err(Error::IdenticallyZero)
        );
        assert!(matches!(
            count_roots_in_interval(&RatPoly::one(), &b, &a),
            Err(Error::InvalidInterval(_))
        ));
    }

    #[test]
    fn yun_recovers_multiplicities() {
        // (y + 1) (y - 2)^2 (y - 3)^3
        let p = &(&RatPoly::from_i64(&[1, 1]) * &RatPoly::from_i64(&[-2, 1]).pow(2))
            * &RatPoly::from_i64(&[-3, 1]).pow(3);
        let parts = squarefree_decomposition(&p.scale(&rat(-5, 7))).unwrap();
        let summary: Vec<(RatPoly, usize)> =
            parts.into_iter().map(|f| (f.factor, f.multiplicity)).collect();
        assert_eq!(
            summary,
            vec![
                (RatPoly::from_i64(&[1, 1]), 1),
                (RatPoly::from_i64(&[-2, 1]), 2),
                (RatPoly::from_i64(&[-3, 1]), 3),
            ]
        );
    }

    proptest! {
        #[test]
        fn products_of_distinct_rational_roots(
            roots in prop::collection::btree_set(-20i64..20, 1..7),
            lead in prop_oneof![Just(-3i64), Just(2i64)],
        ) {
            let roots: Vec<BigRat> = roots.into_iter().map(|r| rat(r, 3)).collect();
            let p = roots.iter().fold(RatPoly::constant(int(lead)), |acc, r| {
                &acc * &RatPoly::linear(-r.clone(), int(1))
            });
            let lo = rat(-5, 2);
            let hi = rat(7, 3);
            let inside = roots.iter().filter(|r| **r > lo && **r < hi).count();
            let c = count_roots_in_interval(&p, &ExtRat::Finite(lo), &ExtRat::Finite(hi)).unwrap();
            prop_assert_eq!((c.distinct, c.with_multiplicity), (inside, inside));
            let all = count_roots_in_interval(&p, &ExtRat::MinusInfinity, &ExtRat::PlusInfinity).unwrap();
            prop_assert_eq!(all.with_multiplicity, roots.len());
        }

        #[test]
        fn multiplicity_never_exceeds_degree(coeffs in prop::collection::vec(-6i64..=6, 1..9)) {
            let p = RatPoly::from_i64(&coeffs);
            prop_assume!(!p.is_zero());
            let c = count_roots_in_interval(&p, &ExtRat::MinusInfinity, &ExtRat::PlusInfinity).unwrap();
            prop_assert!(c.distinct <= c.with_multiplicity);
            prop_assert!(c.with_multiplicity <= p.degree().unwrap());
        }
    }
}
