//! Root counting for `g(y) = 1` through the critical points of `log g`.
//!
//! Between consecutive critical points `log g` is strictly monotone, so each
//! such piece holds a root exactly when the signs of `g - 1` at its ends are
//! opposite and nonzero. The derivative of `log g` has a numerator of degree
//! below the number of ray classes, which keeps every polynomial here small
//! no matter how large the exponents are.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::enclosure::{Dyadic, Round};
use super::UnivariateModel;
use crate::error::{Error, Result};
use crate::exact::{
    count_roots_in_interval, squarefree_decomposition, tarski_query, BigRat, ExtRat, RatPoly,
    SquarefreeFactor, ZPoly,
};
use crate::gale::GaleVector;

/// Forms sharing one direction, merged into `scale * form^exponent`.
struct Group {
    constant: BigRat,
    slope: BigRat,
    exponent: i64,
}

impl Group {
    fn form(&self) -> RatPoly {
        RatPoly::linear(self.constant.clone(), self.slope.clone())
    }

    fn at(&self, y: &BigRat) -> BigRat {
        &self.constant + &self.slope * y
    }
}

/// `g = scale * prod form_j^exponent_j` with nonzero exponents only.
struct Factored {
    scale: BigRat,
    groups: Vec<Group>,
}

fn factor(model: &UnivariateModel) -> Factored {
    let mut scale = BigRat::one();
    let mut groups: Vec<Group> = Vec::new();
    for (GaleVector(u, v), &e) in model.p.iter().zip(&model.lambda_primitive) {
        if e == 0 {
            continue;
        }
        let existing = groups
            .iter_mut()
            .find(|g| (&g.constant * v - &g.slope * u).is_zero());
        match existing {
            Some(g) => {
                // the form is a positive multiple of the group's form
                let ratio = if g.constant.is_zero() {
                    v / &g.slope
                } else {
                    u / &g.constant
                };
                scale *= power(&ratio, e);
                g.exponent += e;
            }
            None => groups.push(Group {
                constant: u.clone(),
                slope: v.clone(),
                exponent: e,
            }),
        }
    }
    groups.retain(|g| g.exponent != 0);
    Factored { scale, groups }
}

fn power(base: &BigRat, e: i64) -> BigRat {
    let p = num_traits::pow(base.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

fn sign(v: &BigRat) -> i8 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

impl Factored {
    fn value(&self, y: &BigRat) -> BigRat {
        self.groups
            .iter()
            .fold(self.scale.clone(), |acc, g| acc * power(&g.at(y), g.exponent))
    }

    /// Numerator of `(log g)' = sum e_j v_j / form_j` over the common denominator.
    fn critical_numerator(&self) -> RatPoly {
        let mut total = RatPoly::zero();
        for (j, gj) in self.groups.iter().enumerate() {
            let mut term = RatPoly::constant(&gj.slope * BigRat::from_integer(gj.exponent.into()));
            for (i, gi) in self.groups.iter().enumerate() {
                if i != j {
                    term = &term * &gi.form();
                }
            }
            total = &total + &term;
        }
        total
    }

    /// Sign of `g - 1` as `y` tends to a finite endpoint of the domain.
    fn sign_at_endpoint(&self, e: &BigRat) -> i8 {
        if let Some(g) = self.groups.iter().find(|g| g.at(e).is_zero()) {
            return -(g.exponent.signum() as i8);
        }
        sign(&(self.value(e) - BigRat::one()))
    }

    /// Sign of `g - 1` as `y` tends to `+-infinity`.
    fn sign_at_infinity(&self) -> i8 {
        let growth: i64 = self
            .groups
            .iter()
            .filter(|g| !g.slope.is_zero())
            .map(|g| g.exponent)
            .sum();
        if growth != 0 {
            return growth.signum() as i8;
        }
        let limit = self.groups.iter().fold(self.scale.clone(), |acc, g| {
            let lead = if g.slope.is_zero() {
                g.constant.abs()
            } else {
                g.slope.abs()
            };
            acc * power(&lead, g.exponent)
        });
        sign(&(limit - BigRat::one()))
    }

    /// Certified sign of `g - 1` at the only critical point in `[lo, hi]`,
    /// when the interval is narrow enough to decide it from `g` at an end.
    /// With `|(log g)'| <= m` on the interval and `t = m * (hi - lo) < 1`,
    /// `g(c)` lies between `g(y) * (1 - t)` and `g(y) / (1 - t)`.
    fn certified_sign(&self, lo: &BigRat, hi: &BigRat) -> Option<i8> {
        let mut m = BigRat::zero();
        for g in &self.groups {
            let (a, b) = (g.at(lo), g.at(hi));
            if !a.is_positive() || !b.is_positive() {
                return None;
            }
            let weight = (&g.slope * BigRat::from_integer(g.exponent.into())).abs();
            m += weight / a.min(b);
        }
        let t = m * (hi - lo);
        if &t * BigRat::from_integer(2.into()) >= BigRat::one() {
            return None;
        }
        let shrink = Dyadic::from_rat(&(BigRat::one() - t), Round::Down);
        for y in [lo, hi] {
            let (num_lo, num_hi, den_lo, den_hi) = self.enclose(y);
            if num_lo.mul(&shrink, Round::Down) > den_hi {
                return Some(1);
            }
            if num_hi < shrink.mul(&den_lo, Round::Down) {
                return Some(-1);
            }
        }
        None
    }

    /// Lower and upper bounds on the numerator and denominator of `g(y)`.
    fn enclose(&self, y: &BigRat) -> (Dyadic, Dyadic, Dyadic, Dyadic) {
        let mut num = (
            Dyadic::from_rat(&self.scale, Round::Down),
            Dyadic::from_rat(&self.scale, Round::Up),
        );
        let mut den = (Dyadic::one(), Dyadic::one());
        for g in &self.groups {
            let v = g.at(y);
            let e = g.exponent.unsigned_abs();
            let lo = Dyadic::from_rat(&v, Round::Down).pow(e, Round::Down);
            let hi = Dyadic::from_rat(&v, Round::Up).pow(e, Round::Up);
            let side = if g.exponent > 0 { &mut num } else { &mut den };
            side.0 = side.0.mul(&lo, Round::Down);
            side.1 = side.1.mul(&hi, Round::Up);
        }
        (num.0, num.1, den.0, den.1)
    }

    /// A positive multiple of
    /// `(scale * prod_{e > 0} form^e - prod_{e < 0} form^-e) mod modulus`.
    fn difference_mod(&self, modulus: &RatPoly) -> RatPoly {
        let m = ZPoly::from_rat(modulus);
        let mut scale = self.scale.clone();
        let mut positive = Residue::one();
        let mut negative = Residue::one();
        for g in &self.groups {
            let form = g.form();
            let z = ZPoly::from_rat(&form);
            // form = z / ratio with ratio > 0
            let (fc, zc) = form
                .coeffs()
                .iter()
                .zip(z.coeffs())
                .find(|(c, _)| !c.is_zero())
                .expect("forms are nonzero");
            let ratio = BigRat::from_integer(zc.clone()) / fc;
            scale *= power(&ratio, -g.exponent);
            let p = Residue::pow(&z, g.exponent.unsigned_abs(), &m);
            if g.exponent > 0 {
                positive = positive.mul(&p, &m);
            } else {
                negative = negative.mul(&p, &m);
            }
        }
        // positive / lc^a versus negative / lc^b, scaled by lc^max(a, b)
        let lc = m.lc().clone();
        let top = positive.lc_power.max(negative.lc_power);
        let lift = |r: &Residue, c: &BigInt| {
            let factor = num_traits::pow(lc.clone(), top - r.lc_power) * c;
            ZPoly::new(r.poly.coeffs().iter().map(|x| x * &factor).collect())
        };
        let diff = lift(&positive, scale.numer()).sub(&lift(&negative, scale.denom()));
        diff.to_rat()
    }
}

/// `poly / lc^lc_power` modulo a primitive integer polynomial with positive
/// leading coefficient `lc`.
struct Residue {
    poly: ZPoly,
    lc_power: usize,
}

impl Residue {
    fn one() -> Self {
        Residue {
            poly: ZPoly::new(vec![BigInt::one()]),
            lc_power: 0,
        }
    }

    fn reduce(poly: ZPoly, lc_power: usize, m: &ZPoly) -> Self {
        let dm = m.degree().expect("nonconstant modulus");
        match poly.degree() {
            Some(d) if d >= dm => Residue {
                poly: poly.positive_prem(m),
                lc_power: lc_power + d - dm + 1,
            },
            _ => Residue { poly, lc_power },
        }
    }

    fn mul(&self, other: &Residue, m: &ZPoly) -> Self {
        Residue::reduce(
            self.poly.mul(&other.poly),
            self.lc_power + other.lc_power,
            m,
        )
    }

    fn pow(base: &ZPoly, mut e: u64, m: &ZPoly) -> Self {
        let mut result = Residue::one();
        let mut b = Residue::reduce(base.clone(), 0, m);
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&b, m);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b, m);
            }
        }
        result
    }
}

/// Bisection steps tried before the exact sign computation.
const REFINEMENTS: usize = 48;

/// A critical point inside the domain.
enum Critical {
    Exact(BigRat),
    /// The only root of the squarefree critical polynomial in `(lo, hi)`.
    Isolated { lo: BigRat, hi: BigRat },
}

fn distinct_in(p: &RatPoly, lo: &BigRat, hi: &BigRat) -> Result<usize> {
    Ok(count_roots_in_interval(p, &ExtRat::Finite(lo.clone()), &ExtRat::Finite(hi.clone()))?.distinct)
}

fn midpoint(lo: &BigRat, hi: &BigRat) -> BigRat {
    (lo + hi) / BigRat::from_integer(2.into())
}

fn isolate(s: &RatPoly, lo: BigRat, hi: BigRat, out: &mut Vec<Critical>) -> Result<()> {
    match distinct_in(s, &lo, &hi)? {
        0 => Ok(()),
        1 => {
            out.push(Critical::Isolated { lo, hi });
            Ok(())
        }
        _ => {
            let mid = midpoint(&lo, &hi);
            isolate(s, lo, mid.clone(), out)?;
            if s.eval(&mid).is_zero() {
                out.push(Critical::Exact(mid.clone()));
            }
            isolate(s, mid, hi, out)
        }
    }
}

/// `1 + max |c_i / lc|` bounds the absolute value of every root.
fn root_bound(p: &RatPoly) -> BigRat {
    let lc = p.leading_coefficient().expect("nonzero").abs();
    p.coeffs()
        .iter()
        .map(|c| c.abs() / &lc)
        .fold(BigRat::zero(), |acc, c| if c > acc { c } else { acc })
        + BigRat::one()
}

#[derive(Debug, PartialEq, Eq)]
pub(super) struct CriticalCount {
    pub distinct: usize,
    pub with_multiplicity: usize,
}

#[derive(Debug, PartialEq, Eq)]
pub(super) enum Outcome {
    Constant { equals_one: bool },
    Counted(CriticalCount),
}

pub(super) fn count(model: &UnivariateModel) -> Result<Outcome> {
    count_with_refinements(model, REFINEMENTS)
}

/// `refinements = 0` skips the certified filter and decides every algebraic
/// critical point exactly.
pub(super) fn count_with_refinements(model: &UnivariateModel, refinements: usize) -> Result<Outcome> {
    let f = factor(model);
    if f.groups.is_empty() {
        return Ok(Outcome::Constant {
            equals_one: f.scale.is_one(),
        });
    }
    let q = f.critical_numerator();
    if q.is_zero() {
        return Err(Error::Internal(
            "critical numerator vanishes for non-parallel forms".into(),
        ));
    }
    let (lower, upper) = (&model.delta.lower, &model.delta.upper);
    let end_signs = [
        match lower {
            ExtRat::Finite(a) => f.sign_at_endpoint(a),
            _ => f.sign_at_infinity(),
        },
        match upper {
            ExtRat::Finite(b) => f.sign_at_endpoint(b),
            _ => f.sign_at_infinity(),
        },
    ];

    let factors = squarefree_decomposition(&q)?;
    let mut criticals = Vec::new();
    if !factors.is_empty() {
        let s = factors
            .iter()
            .fold(RatPoly::one(), |acc, sf| &acc * &sf.factor);
        let bound = root_bound(&s);
        let lo = match lower {
            ExtRat::Finite(a) => a.clone(),
            _ => -bound.clone(),
        };
        let hi = match upper {
            ExtRat::Finite(b) => b.clone(),
            _ => bound,
        };
        // Otherwise every root of `s` lies outside the interval.
        if lo < hi {
            isolate(&s, lo, hi, &mut criticals)?;
        }
    }

    let mut node_signs = vec![end_signs[0]];
    let mut critical_roots = 0;
    let mut critical_mult = 0;
    let mut residues = vec![None; factors.len()];
    for point in criticals {
        let (sign_here, order) = classify(&f, &factors, &mut residues, point, refinements)?;
        if sign_here == 0 {
            critical_roots += 1;
            critical_mult += 1 + order;
        }
        node_signs.push(sign_here);
    }
    node_signs.push(end_signs[1]);
    let crossings = node_signs
        .windows(2)
        .filter(|w| w[0] * w[1] < 0)
        .count();
    Ok(Outcome::Counted(CriticalCount {
        distinct: crossings + critical_roots,
        with_multiplicity: crossings + critical_mult,
    }))
}

/// Sign of `g - 1` at a critical point and the point's order as a root of
/// the critical numerator. `residues` caches one difference per factor.
fn classify(
    f: &Factored,
    factors: &[SquarefreeFactor],
    residues: &mut [Option<RatPoly>],
    point: Critical,
    refinements: usize,
) -> Result<(i8, usize)> {
    match point {
        Critical::Exact(c) => {
            let order = factors
                .iter()
                .find(|sf| sf.factor.eval(&c).is_zero())
                .map_or(0, |sf| sf.multiplicity);
            Ok((sign(&(f.value(&c) - BigRat::one())), order))
        }
        Critical::Isolated { lo, hi } => {
            let mut owner = None;
            for (idx, sf) in factors.iter().enumerate() {
                if distinct_in(&sf.factor, &lo, &hi)? == 1 {
                    owner = Some(idx);
                    break;
                }
            }
            let owner = owner
                .ok_or_else(|| Error::Internal("critical point has no squarefree factor".into()))?;
            let sf = &factors[owner];
            let (mut lo, mut hi) = (lo, hi);
            for _ in 0..refinements {
                if let Some(s) = f.certified_sign(&lo, &hi) {
                    return Ok((s, sf.multiplicity));
                }
                let mid = midpoint(&lo, &hi);
                if sf.factor.eval(&mid).is_zero() {
                    return Ok((sign(&(f.value(&mid) - BigRat::one())), sf.multiplicity));
                }
                if distinct_in(&sf.factor, &lo, &mid)? == 1 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            // g(c) is 1 or extremely close to it: decide exactly
            let r = residues[owner].get_or_insert_with(|| f.difference_mod(&sf.factor));
            // the owner has a single root in the interval, so the query is
            // the sign of r there
            let s = tarski_query(&sf.factor, r, &ExtRat::Finite(lo), &ExtRat::Finite(hi))?;
            Ok((s.signum() as i8, sf.multiplicity))
        }
    }
}
