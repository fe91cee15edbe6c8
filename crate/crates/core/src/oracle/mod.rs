//! Exact positive-solution counting. The positive solutions of the system
//! correspond, with multiplicity, to the solutions of `g(y) = 1` on an open
//! interval, equivalently to the roots of one univariate polynomial there.

mod critical;
mod enclosure;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::circuit::{circuit_profile, ExponentConfig};
use crate::error::{Error, Result};
use crate::exact::{count_roots_in_interval, BigRat, ExtRat, RatMatrix, RatPoly, ZPoly};
use crate::gale::{analyze_gale, CoefficientMatrix, GaleSystem, GaleVector};

/// Open interval with possibly infinite endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenInterval {
    pub lower: ExtRat,
    pub upper: ExtRat,
}

impl OpenInterval {
    pub fn is_empty(&self) -> bool {
        self.lower >= self.upper
    }

    pub fn contains(&self, y: &BigRat) -> bool {
        let y = ExtRat::Finite(y.clone());
        self.lower < y && y < self.upper
    }

    /// A rational point inside a nonempty interval.
    pub fn sample(&self) -> Option<BigRat> {
        if self.is_empty() {
            return None;
        }
        Some(match (&self.lower, &self.upper) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => (a + b) / BigRat::from_integer(2.into()),
            (ExtRat::Finite(a), _) => a + BigRat::one(),
            (_, ExtRat::Finite(b)) => b - BigRat::one(),
            _ => BigRat::zero(),
        })
    }
}

/// The univariate reduction for one pair of ray classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnivariateModel {
    /// Dual vectors normalized so the pair's representatives are `(1, 0)` and
    /// `(0, 1)`; the linear forms are `p_l(y) = P_l.0 + P_l.1 * y`.
    pub p: Vec<GaleVector>,
    pub lambda_primitive: Vec<i64>,
    pub delta: OpenInterval,
    /// Class positions of the two representatives.
    pub pair: (usize, usize),
    /// Column indices of the two representatives.
    pub pair_columns: (usize, usize),
}

impl UnivariateModel {
    pub fn linear_form(&self, l: usize) -> RatPoly {
        RatPoly::linear(self.p[l].0.clone(), self.p[l].1.clone())
    }

    /// Primitive integer polynomial whose roots in `delta` are the solutions.
    /// Its degree can reach the normalized volume, so it is built on demand.
    pub fn h(&self) -> RatPoly {
        difference_of_products(&self.p, &self.lambda_primitive)
    }
}

/// How `count_model` counts roots.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CountMethod {
    /// Sign analysis of `g - 1` at the critical points of `log g`.
    #[default]
    Critical,
    /// Sturm chains and squarefree decomposition of `h`.
    Sturm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmptyReason {
    HalfspaceFails,
    DeltaEmpty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CountResult {
    Finite {
        distinct: usize,
        with_multiplicity: usize,
    },
    Infinite,
    NoPositiveSolutions {
        reason: EmptyReason,
    },
}

impl CountResult {
    /// Number of solutions with multiplicity, `None` when infinite.
    pub fn finite_count(&self) -> Option<usize> {
        match self {
            CountResult::Finite {
                with_multiplicity, ..
            } => Some(*with_multiplicity),
            CountResult::Infinite => None,
            CountResult::NoPositiveSolutions { .. } => Some(0),
        }
    }
}

/// Reduction with the first and last ray classes as the pair.
pub fn reduce_to_univariate(config: &ExponentConfig, g: &GaleSystem) -> Result<UnivariateModel> {
    let k = g
        .ordering()
        .ok_or_else(|| Error::Precondition("Gale system has no ordering".into()))?
        .k();
    reduce_to_univariate_with_pair(config, g, 0, k - 1)
}

/// Reduction for the representatives of classes `i` and `j` (any two distinct
/// class positions, in either order).
pub fn reduce_to_univariate_with_pair(
    config: &ExponentConfig,
    g: &GaleSystem,
    i: usize,
    j: usize,
) -> Result<UnivariateModel> {
    let ord = g
        .ordering()
        .ok_or_else(|| Error::Precondition("Gale system has no ordering".into()))?;
    if config.n() + 2 != g.basis().rows() {
        return Err(Error::Dimension(format!(
            "{} exponents for {} dual vectors",
            config.n() + 2,
            g.basis().rows()
        )));
    }
    if i == j || i >= ord.k() || j >= ord.k() {
        return Err(Error::Precondition(format!(
            "pair ({i}, {j}) is not two distinct classes out of {}",
            ord.k()
        )));
    }
    let (a, b) = (ord.reps[i], ord.reps[j]);
    let frame = RatMatrix::from_rows(vec![
        vec![g.basis().get(a, 0).clone(), g.basis().get(a, 1).clone()],
        vec![g.basis().get(b, 0).clone(), g.basis().get(b, 1).clone()],
    ])?;
    let change = frame.inverse().ok_or_else(|| {
        Error::Internal(format!("representatives {a} and {b} have parallel dual vectors"))
    })?;
    let normalized = g.basis().mul(&change)?;
    let p: Vec<GaleVector> = (0..normalized.rows())
        .map(|l| GaleVector(normalized.get(l, 0).clone(), normalized.get(l, 1).clone()))
        .collect();
    let lambda_primitive = circuit_profile(config).lambda_primitive;
    let delta = positivity_interval(&p);
    Ok(UnivariateModel {
        p,
        lambda_primitive,
        delta,
        pair: (i, j),
        pair_columns: (a, b),
    })
}

/// `{y : P_l.0 + P_l.1 * y > 0 for all l}`.
pub fn positivity_interval(p: &[GaleVector]) -> OpenInterval {
    let mut lower = ExtRat::MinusInfinity;
    let mut upper = ExtRat::PlusInfinity;
    for GaleVector(u, v) in p {
        if v.is_zero() {
            if !u.is_positive() {
                return OpenInterval {
                    lower: ExtRat::PlusInfinity,
                    upper: ExtRat::MinusInfinity,
                };
            }
            continue;
        }
        let root = ExtRat::Finite(-u / v);
        if v.is_positive() {
            lower = lower.max(root);
        } else {
            upper = upper.min(root);
        }
    }
    OpenInterval { lower, upper }
}

/// `prod_{e_l > 0} p_l^e_l - prod_{e_l < 0} p_l^-e_l`, scaled to a primitive
/// integer polynomial by a positive constant.
fn difference_of_products(p: &[GaleVector], exponents: &[i64]) -> RatPoly {
    let mut positive = (BigRat::one(), ZPoly::new(vec![BigInt::one()]));
    let mut negative = positive.clone();
    for (GaleVector(u, v), &e) in p.iter().zip(exponents) {
        if e == 0 {
            continue;
        }
        let form = RatPoly::linear(u.clone(), v.clone());
        let z = ZPoly::from_rat(&form);
        // form = scale * z with scale > 0
        let (coeff, zc) = form
            .coeffs()
            .iter()
            .zip(z.coeffs())
            .find(|(c, _)| !c.is_zero())
            .expect("dual vectors are nonzero");
        let scale = coeff / BigRat::from_integer(zc.clone());
        let side = if e > 0 { &mut positive } else { &mut negative };
        let power = e.unsigned_abs();
        side.0 *= num_traits::pow(scale, power as usize);
        side.1 = side.1.mul(&z.pow(power));
    }
    let h = &positive.1.to_rat().scale(&positive.0) - &negative.1.to_rat().scale(&negative.0);
    h.primitive_part()
}

/// `g(y) = prod p_l(y)^lambda_primitive_l` for `y` in the interval.
pub fn evaluate_g(model: &UnivariateModel, y: &BigRat) -> Result<BigRat> {
    let mut value = BigRat::one();
    for (GaleVector(u, v), &e) in model.p.iter().zip(&model.lambda_primitive) {
        let form = u + v * y;
        if !form.is_positive() {
            return Err(Error::Domain(format!(
                "linear form is not positive at y = {}",
                crate::exact::format_rational(y)
            )));
        }
        if e > 0 {
            value *= num_traits::pow(form, e as usize);
        } else if e < 0 {
            value /= num_traits::pow(form, (-e) as usize);
        }
    }
    Ok(value)
}

/// Counts the solutions of `g(y) = 1` in the model's interval.
pub fn count_model(model: &UnivariateModel) -> Result<CountResult> {
    count_model_with(model, CountMethod::default())
}

pub fn count_model_with(model: &UnivariateModel, method: CountMethod) -> Result<CountResult> {
    if model.delta.is_empty() {
        return Ok(CountResult::NoPositiveSolutions {
            reason: EmptyReason::DeltaEmpty,
        });
    }
    let constant = |equals_one: bool| {
        if equals_one {
            CountResult::Infinite
        } else {
            CountResult::Finite {
                distinct: 0,
                with_multiplicity: 0,
            }
        }
    };
    match method {
        CountMethod::Critical => Ok(match critical::count(model)? {
            critical::Outcome::Constant { equals_one } => constant(equals_one),
            critical::Outcome::Counted(c) => CountResult::Finite {
                distinct: c.distinct,
                with_multiplicity: c.with_multiplicity,
            },
        }),
        CountMethod::Sturm => {
            let h = model.h();
            if h.is_zero() {
                let y = model.delta.sample().expect("nonempty interval");
                return Ok(constant(evaluate_g(model, &y)?.is_one()));
            }
            let c = count_roots_in_interval(&h, &model.delta.lower, &model.delta.upper)?;
            Ok(CountResult::Finite {
                distinct: c.distinct,
                with_multiplicity: c.with_multiplicity,
            })
        }
    }
}

/// Positive solutions of `C * (x^w_0, ..., x^w_{n+1}) = 0`.
pub fn count_positive_solutions(
    config: &ExponentConfig,
    c: &CoefficientMatrix,
) -> Result<CountResult> {
    check_dimensions(config, c)?;
    let g = analyze_gale(c);
    count_with_gale(config, &g, CountMethod::default())
}

pub fn count_positive_solutions_with(
    config: &ExponentConfig,
    c: &CoefficientMatrix,
    method: CountMethod,
) -> Result<CountResult> {
    check_dimensions(config, c)?;
    count_with_gale(config, &analyze_gale(c), method)
}

pub(crate) fn count_with_gale(
    config: &ExponentConfig,
    g: &GaleSystem,
    method: CountMethod,
) -> Result<CountResult> {
    if !g.halfspace_ok() {
        return Ok(CountResult::NoPositiveSolutions {
            reason: EmptyReason::HalfspaceFails,
        });
    }
    count_model_with(&reduce_to_univariate(config, g)?, method)
}

pub(crate) fn check_dimensions(config: &ExponentConfig, c: &CoefficientMatrix) -> Result<()> {
    if config.n() != c.n() {
        return Err(Error::Dimension(format!(
            "exponents in dimension {} with {} equations",
            config.n(),
            c.n()
        )));
    }
    Ok(())
}
