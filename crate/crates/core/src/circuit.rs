//! Exponent configurations of `n + 2` points in `Z^n`: the affine relation,
//! its primitive form, signature, volumes, Cayley structure and the reduction
//! of pyramids to lower-dimensional circuits.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{BigRat, IntMatrix, RatMatrix};
use crate::gale::CoefficientMatrix;

/// Point configuration `w_0, ..., w_{n+1}` with its lifted matrix: a row of
/// ones stacked over the point coordinates, one column per point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExponentConfig {
    points: Vec<Vec<i64>>,
    lifted: IntMatrix,
    lambda: Vec<i64>,
}

impl ExponentConfig {
    /// Validates `n + 2` distinct points of length `n >= 1` whose lifted
    /// matrix has full rank `n + 1`.
    pub fn new(points: Vec<Vec<i64>>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::Dimension(format!(
                "need at least 3 points, got {}",
                points.len()
            )));
        }
        let n = points.len() - 2;
        if let Some(bad) = points.iter().position(|p| p.len() != n) {
            return Err(Error::Dimension(format!(
                "point {bad} has {} coordinates, expected {n}",
                points[bad].len()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = points.iter().position(|p| !seen.insert(p.clone())) {
            return Err(Error::Precondition(format!("point {dup} repeats an earlier point")));
        }
        let lifted = IntMatrix::from_fn(n + 1, n + 2, |i, j| {
            if i == 0 {
                BigInt::one()
            } else {
                BigInt::from(points[j][i - 1])
            }
        });
        let minors: Vec<BigInt> = (0..n + 2)
            .map(|l| lifted.without_columns(&[l]).determinant())
            .collect::<Result<_>>()?;
        if minors.iter().all(Zero::is_zero) {
            return Err(Error::Rank(format!(
                "lifted exponent matrix has rank below {}",
                n + 1
            )));
        }
        let lambda = minors
            .iter()
            .enumerate()
            .map(|(l, m)| {
                let signed = if l % 2 == 0 { -m } else { m.clone() };
                signed.to_i64().ok_or_else(|| {
                    Error::Unsupported(format!("relation entry {signed} exceeds 64 bits"))
                })
            })
            .collect::<Result<_>>()?;
        Ok(ExponentConfig {
            points,
            lifted,
            lambda,
        })
    }

    pub fn n(&self) -> usize {
        self.points.len() - 2
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn lifted(&self) -> &IntMatrix {
        &self.lifted
    }

    /// `det A(l)`: the lifted matrix with column `l` removed.
    pub fn lifted_minor(&self, l: usize) -> BigInt {
        self.lifted
            .without_columns(&[l])
            .determinant()
            .expect("square minor")
    }

    pub fn translated(&self, offset: &[i64]) -> Result<Self> {
        if offset.len() != self.n() {
            return Err(Error::Dimension(format!(
                "offset of length {} for dimension {}",
                offset.len(),
                self.n()
            )));
        }
        ExponentConfig::new(
            self.points
                .iter()
                .map(|p| p.iter().zip(offset).map(|(a, b)| a + b).collect())
                .collect(),
        )
    }

    /// Applies the integer matrix `m` (rows of length `n`) to every point.
    pub fn transformed(&self, m: &[Vec<i64>]) -> Result<Self> {
        let n = self.n();
        if m.len() != n || m.iter().any(|row| row.len() != n) {
            return Err(Error::Dimension(format!("transform must be {n}x{n}")));
        }
        ExponentConfig::new(
            self.points
                .iter()
                .map(|p| {
                    m.iter()
                        .map(|row| row.iter().zip(p).map(|(a, b)| a * b).sum())
                        .collect()
                })
                .collect(),
        )
    }

    /// Configuration whose point `i` is the current point `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        check_permutation(order, self.points.len())?;
        ExponentConfig::new(order.iter().map(|&i| self.points[i].clone()).collect())
    }
}

pub(crate) fn check_permutation(order: &[usize], len: usize) -> Result<()> {
    let mut seen = vec![false; len];
    if order.len() != len {
        return Err(Error::Dimension(format!(
            "permutation of length {} for {len} items",
            order.len()
        )));
    }
    for &i in order {
        if i >= len || std::mem::replace(&mut seen[i], true) {
            return Err(Error::Precondition(format!("{order:?} is not a permutation")));
        }
    }
    Ok(())
}

/// The affine relation `lambda_l = (-1)^(l+1) det A(l)`.
pub fn lambda_of(config: &ExponentConfig) -> Vec<i64> {
    config.lambda.clone()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitProfile {
    pub lambda: Vec<i64>,
    pub lambda_primitive: Vec<i64>,
    pub index: u64,
    pub a_plus: usize,
    pub a_minus: usize,
    pub sigma: usize,
    pub vol_z: u64,
    pub vol_za: u64,
    pub is_circuit: bool,
    pub zero_support: Vec<usize>,
    pub has_cayley: bool,
}

impl CircuitProfile {
    /// The signature bound `2 sigma`, lowered by one when the two signs are
    /// balanced.
    pub fn signature_bound(&self) -> usize {
        2 * self.sigma - usize::from(self.a_plus == self.a_minus)
    }
}

pub fn circuit_profile(config: &ExponentConfig) -> CircuitProfile {
    let lambda = lambda_of(config);
    let index = content(&lambda);
    let lambda_primitive: Vec<i64> = lambda.iter().map(|l| l / index).collect();
    let a_plus = lambda.iter().filter(|l| **l > 0).count();
    let a_minus = lambda.iter().filter(|l| **l < 0).count();
    let zero_support: Vec<usize> = (0..lambda.len()).filter(|&l| lambda[l] == 0).collect();
    let vol_z: u64 = lambda.iter().filter(|l| **l > 0).map(|&l| l as u64).sum();
    CircuitProfile {
        has_cayley: has_zero_subsum(&lambda),
        index: index as u64,
        vol_za: vol_z / index as u64,
        vol_z,
        a_plus,
        a_minus,
        sigma: a_plus.min(a_minus),
        is_circuit: zero_support.is_empty(),
        zero_support,
        lambda_primitive,
        lambda,
    }
}

/// Whether a proper nonempty subset of the entries sums to zero.
pub fn has_zero_subsum(values: &[i64]) -> bool {
    // States: (partial sum, some entry taken, some entry left out).
    let mut states: HashSet<(i128, bool, bool)> = HashSet::from([(0, false, false)]);
    for &v in values {
        let mut next = HashSet::with_capacity(states.len() * 2);
        for &(sum, taken, left) in &states {
            next.insert((sum + v as i128, true, left));
            next.insert((sum, taken, true));
        }
        states = next;
    }
    states.contains(&(0, true, true))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PyramidReduction {
    NotPyramid,
    Reduced(ReducedCircuit),
    /// The apex columns of the coefficient matrix are dependent: the system
    /// has no positive solutions or infinitely many.
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedCircuit {
    pub config: ExponentConfig,
    pub coefficients: CoefficientMatrix,
    pub m: usize,
    /// Original indices of the points kept in the reduced circuit.
    pub kept: Vec<usize>,
}

/// Eliminates the apex monomials of a pyramid. When the apex columns of `C`
/// are independent, the remaining equations involve only the circuit points,
/// and the reduced instance has at least as many positive solutions as the
/// original.
pub fn reduce_pyramid(
    config: &ExponentConfig,
    coefficients: &CoefficientMatrix,
) -> Result<PyramidReduction> {
    let n = config.n();
    if coefficients.n() != n {
        return Err(Error::Dimension(format!(
            "coefficients for dimension {} with exponents for dimension {n}",
            coefficients.n()
        )));
    }
    let lambda = lambda_of(config);
    let apex: Vec<usize> = (0..n + 2).filter(|&l| lambda[l] == 0).collect();
    if apex.is_empty() {
        return Ok(PyramidReduction::NotPyramid);
    }
    let kept: Vec<usize> = (0..n + 2).filter(|&l| lambda[l] != 0).collect();
    let m = n - apex.len();

    let mut rows = coefficients.entries().to_rows();
    for (t, &z) in apex.iter().enumerate() {
        let Some(p) = RatMatrix::largest_pivot(&rows, z, t) else {
            return Ok(PyramidReduction::Degenerate);
        };
        rows.swap(t, p);
        let inv = rows[t][z].recip();
        for x in rows[t].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != t && !rows[i][z].is_zero() {
                let factor = rows[i][z].clone();
                for j in 0..n + 2 {
                    let delta = &factor * &rows[t][j];
                    rows[i][j] -= delta;
                }
            }
        }
    }
    let reduced_rows: Vec<Vec<BigRat>> = rows[apex.len()..]
        .iter()
        .map(|row| kept.iter().map(|&l| row[l].clone()).collect())
        .collect();
    let reduced_coefficients = CoefficientMatrix::new(RatMatrix::from_rows(reduced_rows)?)?;

    let base = &config.points()[kept[0]];
    let differences: Vec<Vec<i64>> = kept[1..]
        .iter()
        .map(|&l| {
            config.points()[l]
                .iter()
                .zip(base)
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    for c in 0..n {
        if chosen.len() == m {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(c);
        let sub: Vec<Vec<i64>> = differences
            .iter()
            .map(|d| trial.iter().map(|&k| d[k]).collect())
            .collect();
        if IntMatrix::from_i64_rows(&sub)?.rank() == trial.len() {
            chosen = trial;
        }
    }
    if chosen.len() != m {
        return Err(Error::Internal(format!(
            "circuit part spans dimension {} instead of {m}",
            chosen.len()
        )));
    }
    let reduced_config = ExponentConfig::new(
        kept.iter()
            .map(|&l| chosen.iter().map(|&c| config.points()[l][c]).collect())
            .collect(),
    )?;
    Ok(PyramidReduction::Reduced(ReducedCircuit {
        config: reduced_config,
        coefficients: reduced_coefficients,
        m,
        kept,
    }))
}

/// Nonnegative `gcd` of the entries; zero for a zero vector.
pub(crate) fn content(values: &[i64]) -> i64 {
    values.iter().fold(0i64, |acc, &v| acc.gcd(&v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use proptest::prelude::*;

    fn config(points: &[&[i64]]) -> ExponentConfig {
        ExponentConfig::new(points.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    fn square() -> ExponentConfig {
        config(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])
    }

    /// Cofactor expansion over i128, independent of the Bareiss code path.
    fn cofactor_det(m: &[Vec<i128>]) -> i128 {
        if m.len() == 1 {
            return m[0][0];
        }
        (0..m.len())
            .map(|j| {
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| *v).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * cofactor_det(&minor)
            })
            .sum()
    }

    fn oracle_lambda(points: &[Vec<i64>]) -> Vec<i64> {
        let n = points.len() - 2;
        (0..n + 2)
            .map(|l| {
                let mut a = vec![vec![1i128; n + 1]; n + 1];
                for (col, j) in (0..n + 2).filter(|&j| j != l).enumerate() {
                    for i in 0..n {
                        a[i + 1][col] = points[j][i] as i128;
                    }
                }
                let d = cofactor_det(&a);
                (if l % 2 == 0 { -d } else { d }) as i64
            })
            .collect()
    }

    #[test]
    fn relation_examples() {
        assert_eq!(lambda_of(&config(&[&[0], &[1], &[2]])), vec![-1, 2, -1]);
        assert_eq!(lambda_of(&square()), vec![1, -1, -1, 1]);
        // w_0 = 0, w_1 = e1 + e2, w_2 = e2 + e3, w_3 = e3, w_4 = 2 e1
        let family = config(&[&[0, 0, 0], &[1, 1, 0], &[0, 1, 1], &[0, 0, 1], &[2, 0, 0]]);
        let l = lambda_of(&family);
        assert!(l == vec![-1, 2, -2, 2, -1] || l == vec![1, -2, 2, -2, 1], "{l:?}");
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            ExponentConfig::new(vec![vec![0], vec![1, 2], vec![3]]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            ExponentConfig::new(vec![vec![0, 0], vec![1, 1], vec![2, 2], vec![3, 3]]),
            Err(Error::Rank(_))
        ));
        assert!(matches!(
            ExponentConfig::new(vec![vec![0], vec![1], vec![1]]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn square_profile() {
        let p = circuit_profile(&square());
        assert_eq!((p.index, p.vol_z, p.vol_za), (1, 2, 2));
        assert!(p.has_cayley && p.is_circuit);
        assert_eq!((p.a_plus, p.a_minus, p.sigma), (2, 2, 2));
        assert_eq!(p.signature_bound(), 3);
    }

    #[test]
    fn simplex_with_interior_point() {
        for n in 1..=5usize {
            let mut points = vec![vec![0i64; n]];
            for i in 0..n {
                let mut e = vec![0; n];
                e[i] = n as i64 + 1;
                points.push(e);
            }
            points.push(vec![1; n]);
            let p = circuit_profile(&ExponentConfig::new(points).unwrap());
            assert_eq!(p.sigma, 1, "n = {n}");
            assert_eq!((p.a_plus.min(p.a_minus), p.a_plus.max(p.a_minus)), (1, n + 1));
        }
    }

    #[test]
    fn nonprimitive_relation() {
        let p = circuit_profile(&config(&[&[0], &[2], &[4]]));
        assert_eq!(p.lambda, vec![-2, 4, -2]);
        assert_eq!(p.lambda_primitive, vec![-1, 2, -1]);
        assert_eq!((p.index, p.vol_z, p.vol_za), (2, 4, 2));
    }

    #[test]
    fn pyramid_reduces_to_square() {
        let pyramid = config(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 0], &[0, 0, 1]]);
        let profile = circuit_profile(&pyramid);
        assert_eq!(profile.zero_support, vec![4]);
        assert!(!profile.is_circuit);
        let c = CoefficientMatrix::new(
            RatMatrix::from_rows(vec![
                vec![int(1), int(-3), int(2), int(1), int(0)],
                vec![int(0), int(0), int(0), int(0), int(1)],
                vec![int(-1), rat(1, 2), int(1), int(-2), int(0)],
            ])
            .unwrap(),
        )
        .unwrap();
        let PyramidReduction::Reduced(r) = reduce_pyramid(&pyramid, &c).unwrap() else {
            panic!("expected a reduction");
        };
        assert_eq!(r.m, 2);
        assert_eq!(r.kept, vec![0, 1, 2, 3]);
        assert_eq!(r.config, square());
        let expected = RatMatrix::from_rows(vec![
            vec![int(1), int(-3), int(2), int(1)],
            vec![int(-1), rat(1, 2), int(1), int(-2)],
        ])
        .unwrap();
        assert_eq!(r.coefficients.entries(), &expected);
    }

    #[test]
    fn pyramid_with_dead_apex_column_is_degenerate() {
        let pyramid = config(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 0], &[0, 0, 1]]);
        let c = CoefficientMatrix::new(
            RatMatrix::from_i64_rows(&[
                vec![1, 0, 0, 0, 0],
                vec![0, 1, 0, 0, 0],
                vec![0, 0, 1, 1, 0],
            ])
            .unwrap(),
        )
        .unwrap();
        assert_eq!(reduce_pyramid(&pyramid, &c).unwrap(), PyramidReduction::Degenerate);
        let circuit_c = CoefficientMatrix::new(
            RatMatrix::from_i64_rows(&[vec![1, -1, 1, -1], vec![0, 1, 1, -3]]).unwrap(),
        )
        .unwrap();
        assert_eq!(
            reduce_pyramid(&square(), &circuit_c).unwrap(),
            PyramidReduction::NotPyramid
        );
    }

    fn brute_force_zero_subsum(values: &[i64]) -> bool {
        let k = values.len();
        (1..(1u32 << k) - 1).any(|mask| {
            (0..k)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| values[i])
                .sum::<i64>()
                == 0
        })
    }

    fn points_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..=4).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-4i64..=4, n), n + 2))
    }

    proptest! {
        #[test]
        fn relation_matches_cofactor_oracle(points in points_strategy()) {
            let Ok(cfg) = ExponentConfig::new(points.clone()) else { return Ok(()); };
            let lambda = lambda_of(&cfg);
            prop_assert_eq!(&lambda, &oracle_lambda(&points));
            prop_assert_eq!(lambda.iter().sum::<i64>(), 0);
            for i in 0..cfg.n() {
                prop_assert_eq!(points.iter().zip(&lambda).map(|(p, l)| p[i] * l).sum::<i64>(), 0);
            }
            let kernel = cfg.lifted().to_rational().kernel_basis();
            prop_assert_eq!(kernel.cols(), 1);
            let p = circuit_profile(&cfg);
            let negative: u64 = lambda.iter().filter(|l| **l < 0).map(|l| (-l) as u64).sum();
            prop_assert_eq!(p.vol_z, negative);
            prop_assert_eq!(p.vol_za * p.index, p.vol_z);
            prop_assert_eq!(content(&p.lambda_primitive), 1);
            prop_assert_eq!(p.a_plus + p.a_minus + p.zero_support.len(), cfg.n() + 2);
            prop_assert_eq!(p.is_circuit, p.zero_support.is_empty());
        }

        #[test]
        fn profile_invariance(points in points_strategy(), shift in prop::collection::vec(-3i64..=3, 4), seed in any::<u64>()) {
            let Ok(cfg) = ExponentConfig::new(points) else { return Ok(()); };
            let n = cfg.n();
            let base = circuit_profile(&cfg);
            let moved = circuit_profile(&cfg.translated(&shift[..n]).unwrap());
            prop_assert_eq!(&moved, &base);
            // unit upper triangular integer matrix: unimodular
            let m: Vec<Vec<i64>> = (0..n)
                .map(|i| (0..n).map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Equal => 1,
                    std::cmp::Ordering::Greater => ((seed >> ((i * n + j) % 60)) & 3) as i64 - 1,
                    std::cmp::Ordering::Less => 0,
                }).collect())
                .collect();
            let t = circuit_profile(&cfg.transformed(&m).unwrap());
            prop_assert_eq!((t.index, t.vol_za, t.sigma), (base.index, base.vol_za, base.sigma));
            prop_assert!(t.lambda == base.lambda || t.lambda.iter().zip(&base.lambda).all(|(a, b)| *a == -b));
            let mut order: Vec<usize> = (0..n + 2).collect();
            order.rotate_left((seed % (n as u64 + 2)) as usize);
            let permuted = lambda_of(&cfg.permuted(&order).unwrap());
            let expected: Vec<i64> = order.iter().map(|&i| base.lambda[i]).collect();
            let negated: Vec<i64> = expected.iter().map(|v| -v).collect();
            prop_assert!(permuted == expected || permuted == negated);
        }

        #[test]
        fn zero_subsum_matches_enumeration(values in prop::collection::vec(-6i64..=6, 2..=10)) {
            prop_assert_eq!(has_zero_subsum(&values), brute_force_zero_subsum(&values));
        }
    }
}
