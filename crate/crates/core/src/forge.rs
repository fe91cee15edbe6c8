//! Instance construction: the optimal families and their sign-flipped
//! variants, circuits from a prescribed relation, systems from prescribed
//! dual vectors, and seeded random instances.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::ExponentConfig;
use crate::error::{Error, Result};
use crate::exact::{format_rational, BigRat, RatMatrix};
use crate::gale::{gale_dual, CoefficientMatrix, GaleVector};
use crate::oracle::{count_positive_solutions, CountResult};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub config: ExponentConfig,
    pub coefficients: CoefficientMatrix,
    pub label: String,
    pub provenance: String,
}

impl Instance {
    pub fn new(config: ExponentConfig, coefficients: CoefficientMatrix) -> Result<Self> {
        if config.n() != coefficients.n() {
            return Err(Error::Dimension(format!(
                "exponents in dimension {} with {} equations",
                config.n(),
                coefficients.n()
            )));
        }
        Ok(Instance {
            config,
            coefficients,
            label: String::new(),
            provenance: String::new(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>, provenance: impl Into<String>) -> Self {
        self.label = label.into();
        self.provenance = provenance.into();
        self
    }

    pub fn n(&self) -> usize {
        self.config.n()
    }
}

/// Exponents `0, e1 + e2, ..., e_{n-1} + e_n, e_n, 2 e1`.
fn family_exponents(n: usize) -> ExponentConfig {
    let mut points = vec![vec![0i64; n]];
    for i in 0..n {
        let mut w = vec![0; n];
        w[i] = 1;
        if i + 1 < n {
            w[i + 1] = 1;
        }
        points.push(w);
    }
    let mut last = vec![0; n];
    last[0] = 2;
    points.push(last);
    ExponentConfig::new(points).expect("family exponents form a circuit")
}

/// Equation `i` (1-based) reads `w_i - const_i - sign_i * eps^(2i-3) x1^2 = 0`
/// with `const_1 = eps`, `const_i = 1` otherwise, and `eps^(-1)` read as 1.
fn family_system(n: usize, eps: &BigRat, negated: impl Fn(usize) -> bool) -> CoefficientMatrix {
    let mut rows = vec![vec![BigRat::zero(); n + 2]; n];
    for i in 1..=n {
        let row = &mut rows[i - 1];
        row[0] = if i == 1 { -eps.clone() } else { -BigRat::one() };
        row[i] = BigRat::one();
        let scale = if i == 1 {
            BigRat::one()
        } else {
            num_traits::pow(eps.clone(), 2 * i - 3)
        };
        row[n + 1] = if negated(i) { scale } else { -scale };
    }
    CoefficientMatrix::new(RatMatrix::from_rows(rows).expect("rectangular"))
        .expect("family system has full rank")
}

fn check_family_args(n: usize, eps: &BigRat) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("family needs n >= 2, got {n}")));
    }
    if !eps.is_positive() {
        return Err(Error::Domain(format!(
            "eps must be positive, got {}",
            format_rational(eps)
        )));
    }
    Ok(())
}

/// The system with `n + 1` positive solutions for small `eps`.
pub fn family_prs(n: usize, eps: &BigRat) -> Result<Instance> {
    check_family_args(n, eps)?;
    Ok(
        Instance::new(family_exponents(n), family_system(n, eps, |_| false))?.with_label(
            format!("prs n={n} eps={}", format_rational(eps)),
            format!("family_prs(n={n}, eps={})", format_rational(eps)),
        ),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlipVariant {
    /// Negate the `x1^2` term of every equation `i >= r + 1` with `i - r` odd.
    /// Both the sign variation and the count drop to `r + 1`.
    Alternating,
    /// Negate only equation `r + 1`. The count drops to `r + 1`, the sign
    /// variation in general does not.
    Single,
}

pub fn family_prs_modified(
    n: usize,
    r: usize,
    eps: &BigRat,
    variant: FlipVariant,
) -> Result<Instance> {
    check_family_args(n, eps)?;
    if r > n {
        return Err(Error::Domain(format!("r = {r} exceeds n = {n}")));
    }
    if r == n {
        return family_prs(n, eps);
    }
    let c = match variant {
        FlipVariant::Alternating => family_system(n, eps, |i| i > r && (i - r) % 2 == 1),
        FlipVariant::Single => family_system(n, eps, |i| i == r + 1),
    };
    let tag = match variant {
        FlipVariant::Alternating => "alternating",
        FlipVariant::Single => "single",
    };
    Ok(Instance::new(family_exponents(n), c)?.with_label(
        format!("prs-modified n={n} r={r} eps={} {tag}", format_rational(eps)),
        format!(
            "family_prs_modified(n={n}, r={r}, eps={}, variant={tag})",
            format_rational(eps)
        ),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilized {
    pub instance: Instance,
    pub eps: BigRat,
    pub count: CountResult,
    pub halvings: usize,
}

/// Starts at `start` and halves `eps` until the solution count agrees at
/// `eps` and `eps / 2`; returns the instance at the first of the two.
pub fn stabilize_eps(
    start: &BigRat,
    max_halvings: usize,
    build: impl Fn(&BigRat) -> Result<Instance>,
) -> Result<Stabilized> {
    let two = BigRat::from_integer(2.into());
    let mut eps = start.clone();
    let mut current = build(&eps)?;
    let mut count = count_positive_solutions(&current.config, &current.coefficients)?;
    for halvings in 0..max_halvings {
        let next_eps = &eps / &two;
        let next = build(&next_eps)?;
        let next_count = count_positive_solutions(&next.config, &next.coefficients)?;
        if next_count == count {
            return Ok(Stabilized {
                instance: current,
                eps,
                count,
                halvings,
            });
        }
        eps = next_eps;
        current = next;
        count = next_count;
    }
    Err(Error::Generation {
        attempts: max_halvings,
        reason: "count did not stabilize".into(),
    })
}

/// A circuit with the prescribed affine relation. The last entry equal to
/// `+-1` marks the point that is solved for; the remaining points are the
/// origin followed by the unit vectors.
pub fn config_from_lambda(lambda: &[i64]) -> Result<ExponentConfig> {
    if lambda.len() < 3 {
        return Err(Error::Dimension(format!(
            "relation needs at least 3 entries, got {}",
            lambda.len()
        )));
    }
    if lambda.iter().sum::<i64>() != 0 {
        return Err(Error::Precondition("relation entries must sum to zero".into()));
    }
    let n = lambda.len() - 2;
    let t = lambda
        .iter()
        .rposition(|v| v.abs() == 1)
        .ok_or_else(|| Error::Unsupported("relation has no entry equal to +-1".into()))?;
    let mut points = vec![Vec::new(); n + 2];
    for (slot, l) in (0..n + 2).filter(|&l| l != t).enumerate() {
        let mut w = vec![0i64; n];
        if slot > 0 {
            w[slot - 1] = 1;
        }
        points[l] = w;
    }
    points[t] = (0..n)
        .map(|i| {
            let s: i64 = (0..n + 2)
                .filter(|&l| l != t)
                .map(|l| lambda[l] * points[l][i])
                .sum();
            -lambda[t] * s
        })
        .collect();
    ExponentConfig::new(points)
}

/// A coefficient matrix whose kernel is spanned by the columns of the
/// `(n + 2) x 2` matrix with rows `p`.
pub fn coefficients_from_gale(p: &[GaleVector]) -> Result<CoefficientMatrix> {
    if p.len() < 3 {
        return Err(Error::Dimension(format!(
            "need at least 3 dual vectors, got {}",
            p.len()
        )));
    }
    let bt = RatMatrix::from_rows(vec![
        p.iter().map(|v| v.0.clone()).collect(),
        p.iter().map(|v| v.1.clone()).collect(),
    ])?;
    if bt.rank() != 2 {
        return Err(Error::Rank("dual vectors must span the plane".into()));
    }
    CoefficientMatrix::new(bt.kernel_basis().transpose())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RandomSpec {
    pub n: usize,
    pub seed: u64,
    /// Exponent coordinates are drawn from `[-exp_bound, exp_bound]`.
    pub exp_bound: i64,
    /// Coefficient numerators are drawn from `[-coeff_bound, coeff_bound]`.
    pub coeff_bound: i64,
    /// Coefficient denominators are drawn from `[1, denom_bound]`.
    pub denom_bound: i64,
    pub require_halfspace: bool,
    pub max_attempts: usize,
}

impl RandomSpec {
    pub fn new(n: usize, seed: u64) -> Self {
        RandomSpec {
            n,
            seed,
            exp_bound: 4,
            coeff_bound: 20,
            denom_bound: 3,
            require_halfspace: false,
            max_attempts: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub instance: Instance,
    pub exponent_attempts: usize,
    pub coefficient_attempts: usize,
}

pub fn random_instance(spec: &RandomSpec) -> Result<Instance> {
    random_instance_with_stats(spec).map(|g| g.instance)
}

pub fn random_instance_with_stats(spec: &RandomSpec) -> Result<Generated> {
    if spec.n == 0 || spec.exp_bound < 1 || spec.coeff_bound < 1 || spec.denom_bound < 1 {
        return Err(Error::Domain(format!("invalid random spec {spec:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (config, exponent_attempts) = random_config(&mut rng, spec)?;
    let mut coefficient_attempts = 0;
    loop {
        if coefficient_attempts == spec.max_attempts {
            return Err(Error::Generation {
                attempts: coefficient_attempts,
                reason: format!(
                    "no full-rank coefficient matrix{} for seed {}",
                    if spec.require_halfspace {
                        " with a positive kernel vector"
                    } else {
                        ""
                    },
                    spec.seed
                ),
            });
        }
        coefficient_attempts += 1;
        let Some(c) = random_coefficients(&mut rng, spec) else {
            continue;
        };
        if spec.require_halfspace && !gale_dual(&c).halfspace_ok() {
            continue;
        }
        let instance = Instance::new(config, c)?.with_label(
            format!("random n={} seed={}", spec.n, spec.seed),
            format!(
                "random_instance(n={}, seed={}, exp_bound={}, coeff_bound={}, denom_bound={})",
                spec.n, spec.seed, spec.exp_bound, spec.coeff_bound, spec.denom_bound
            ),
        );
        return Ok(Generated {
            instance,
            exponent_attempts,
            coefficient_attempts,
        });
    }
}

fn random_config(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> Result<(ExponentConfig, usize)> {
    for attempt in 1..=spec.max_attempts {
        let points: Vec<Vec<i64>> = (0..spec.n + 2)
            .map(|_| {
                (0..spec.n)
                    .map(|_| rng.random_range(-spec.exp_bound..=spec.exp_bound))
                    .collect()
            })
            .collect();
        if let Ok(config) = ExponentConfig::new(points) {
            return Ok((config, attempt));
        }
    }
    Err(Error::Generation {
        attempts: spec.max_attempts,
        reason: format!("no full-rank exponent configuration for seed {}", spec.seed),
    })
}

/// One draw of an `n x (n + 2)` matrix; `None` if it is rank deficient.
pub fn random_coefficients(rng: &mut impl Rng, spec: &RandomSpec) -> Option<CoefficientMatrix> {
    let rows: Vec<Vec<BigRat>> = (0..spec.n)
        .map(|_| {
            (0..spec.n + 2)
                .map(|_| {
                    let p = rng.random_range(-spec.coeff_bound..=spec.coeff_bound);
                    let q = rng.random_range(1..=spec.denom_bound);
                    BigRat::new(p.into(), q.into())
                })
                .collect()
        })
        .collect();
    CoefficientMatrix::new(RatMatrix::from_rows(rows).ok()?).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{circuit_profile, lambda_of};
    use crate::exact::{int, rat};
    use crate::gale::{analyze_gale, s_alpha};

    #[test]
    fn prs_n2_matrix() {
        let inst = family_prs(2, &rat(1, 4)).unwrap();
        let expected = RatMatrix::from_rows(vec![
            vec![rat(-1, 4), int(1), int(0), int(-1)],
            vec![int(-1), int(0), int(1), rat(-1, 4)],
        ])
        .unwrap();
        assert_eq!(inst.coefficients.entries(), &expected);
        assert_eq!(inst.config.points()[3], vec![2, 0]);
        assert!(family_prs(1, &rat(1, 4)).is_err());
        assert!(family_prs(3, &int(0)).is_err());
    }

    #[test]
    fn prs_relation() {
        for n in 2..=7usize {
            let inst = family_prs(n, &rat(1, 4)).unwrap();
            let l = lambda_of(&inst.config);
            let mut expected: Vec<i64> = vec![if n % 2 == 0 { 1 } else { -1 }];
            for i in 1..=n {
                expected.push(if i % 2 == 1 { 2 } else { -2 });
            }
            expected.push(-1);
            let negated: Vec<i64> = expected.iter().map(|v| -v).collect();
            assert!(l == expected || l == negated, "n = {n}: {l:?}");
        }
    }

    #[test]
    fn modified_family_edges() {
        let eps = rat(1, 4);
        assert_eq!(
            family_prs_modified(3, 3, &eps, FlipVariant::Alternating).unwrap(),
            family_prs(3, &eps).unwrap()
        );
        assert!(family_prs_modified(3, 4, &eps, FlipVariant::Single).is_err());
        // r = 0 negates the x1^2 term of the first equation
        let inst = family_prs_modified(3, 0, &eps, FlipVariant::Alternating).unwrap();
        assert_eq!(inst.coefficients.entries().get(0, 4), &int(1));
        assert_eq!(inst.coefficients.entries().get(1, 4), &-rat(1, 4));
        assert_eq!(inst.coefficients.entries().get(2, 4), &rat(1, 64));
    }

    #[test]
    fn relation_realization() {
        let cfg = config_from_lambda(&[1, -1, 3, -3, 1, -1]).unwrap();
        assert_eq!(cfg.points()[5], vec![-1, 3, -3, 1]);
        let l = lambda_of(&cfg);
        assert!(l == vec![1, -1, 3, -3, 1, -1] || l == vec![-1, 1, -3, 3, -1, 1]);
        let cfg = config_from_lambda(&[1, -1, 1, -2, 1]).unwrap();
        assert_eq!(cfg.points()[4], vec![1, -1, 2]);
        let cfg = config_from_lambda(&[-1, 2, -1]).unwrap();
        assert_eq!(circuit_profile(&cfg).lambda_primitive.iter().map(|v| v.abs()).collect::<Vec<_>>(), vec![1, 2, 1]);
        assert!(matches!(config_from_lambda(&[2, -4, 2]), Err(Error::Unsupported(_))));
        assert!(matches!(config_from_lambda(&[1, 1, 1]), Err(Error::Precondition(_))));
    }

    #[test]
    fn parity_counterexample_from_gale() {
        let p = vec![
            GaleVector(int(1), int(0)),
            GaleVector(int(1), int(0)),
            GaleVector(int(3), rat(21, 8)),
            GaleVector(int(1), int(1)),
            GaleVector(int(0), int(1)),
        ];
        let c = coefficients_from_gale(&p).unwrap();
        let cfg = config_from_lambda(&[1, -1, 1, -2, 1]).unwrap();
        let s = s_alpha(&analyze_gale(&c), &circuit_profile(&cfg)).unwrap();
        assert_eq!(s.sgnvar, 2);
        assert_eq!(
            count_positive_solutions(&cfg, &c).unwrap(),
            CountResult::Finite {
                distinct: 1,
                with_multiplicity: 1
            }
        );
        let padded = vec![
            GaleVector(int(1), int(0)),
            GaleVector(int(0), int(1)),
            GaleVector(int(1), int(1)),
            GaleVector(int(1), int(1)),
        ];
        assert!(analyze_gale(&coefficients_from_gale(&padded).unwrap()).halfspace_ok());
        assert!(coefficients_from_gale(&vec![GaleVector(int(1), int(1)); 4]).is_err());
    }

    #[test]
    fn random_instances_are_deterministic_and_valid() {
        for seed in 0..50 {
            let spec = RandomSpec::new(3, seed);
            let a = random_instance_with_stats(&spec).unwrap();
            let b = random_instance_with_stats(&spec).unwrap();
            assert_eq!(a, b);
            assert!(a.exponent_attempts >= 1 && a.coefficient_attempts >= 1);
            let spec = RandomSpec {
                require_halfspace: true,
                ..spec
            };
            let c = random_instance(&spec).unwrap();
            assert!(gale_dual(&c.coefficients).halfspace_ok());
        }
    }
}
