//! Coefficient matrices and their planar Gale duals: the open-halfplane test,
//! the angular ordering of the dual vectors, ray classes and the sign
//! sequence they induce on the affine relation.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::circuit::{check_permutation, CircuitProfile};
use crate::error::{Error, Result};
use crate::exact::{sign_of, sign_variation, BigRat, RatMatrix};

/// Rank-`n` matrix of shape `n x (n + 2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoefficientMatrix {
    entries: RatMatrix,
}

impl CoefficientMatrix {
    pub fn new(entries: RatMatrix) -> Result<Self> {
        let n = entries.rows();
        if n == 0 || entries.cols() != n + 2 {
            return Err(Error::Dimension(format!(
                "coefficient matrix must be n x (n+2) with n >= 1, got {}x{}",
                n,
                entries.cols()
            )));
        }
        let rank = entries.rank();
        if rank != n {
            return Err(Error::Rank(format!("coefficient matrix has rank {rank}, expected {n}")));
        }
        Ok(CoefficientMatrix { entries })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        CoefficientMatrix::new(RatMatrix::from_i64_rows(rows)?)
    }

    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &RatMatrix {
        &self.entries
    }

    /// `det C(i, j)`: columns `i` and `j` removed. Zero when `i == j`.
    pub fn minor(&self, i: usize, j: usize) -> BigRat {
        if i == j {
            return BigRat::zero();
        }
        self.entries
            .without_columns(&[i, j])
            .determinant()
            .expect("square minor")
    }

    /// `M * C` for an invertible `n x n` matrix `M`.
    pub fn left_multiplied(&self, m: &RatMatrix) -> Result<Self> {
        CoefficientMatrix::new(m.mul(&self.entries)?)
    }

    /// Whether every maximal minor is nonzero.
    pub fn is_uniform(&self) -> bool {
        let cols = self.entries.cols();
        (0..cols).all(|i| (i + 1..cols).all(|j| !self.minor(i, j).is_zero()))
    }
}

/// A planar vector `(first, second)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaleVector(pub BigRat, pub BigRat);

impl GaleVector {
    pub fn det(&self, other: &GaleVector) -> BigRat {
        &self.0 * &other.1 - &self.1 * &other.0
    }

    pub fn dot(&self, other: &GaleVector) -> BigRat {
        &self.0 * &other.0 + &self.1 * &other.1
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero() && self.1.is_zero()
    }

    fn rotated(&self, clockwise: bool) -> GaleVector {
        if clockwise {
            GaleVector(self.1.clone(), -self.0.clone())
        } else {
            GaleVector(-self.1.clone(), self.0.clone())
        }
    }

    fn plus(&self, other: &GaleVector) -> GaleVector {
        GaleVector(&self.0 + &other.0, &self.1 + &other.1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaleOrdering {
    /// Concatenation of the classes in angular order.
    pub alpha: Vec<usize>,
    /// Indices whose dual vectors lie on a common ray, each sorted ascending.
    pub classes: Vec<Vec<usize>>,
    /// Smallest index of each class.
    pub reps: Vec<usize>,
}

impl GaleOrdering {
    pub fn k(&self) -> usize {
        self.classes.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaleSystem {
    basis: RatMatrix,
    halfspace_ok: bool,
    witness: Option<GaleVector>,
    ordering: Option<GaleOrdering>,
}

impl GaleSystem {
    /// `(n + 2) x 2` matrix whose columns span `ker C`.
    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<GaleVector> {
        (0..self.basis.rows())
            .map(|l| GaleVector(self.basis.get(l, 0).clone(), self.basis.get(l, 1).clone()))
            .collect()
    }

    pub fn vector(&self, l: usize) -> GaleVector {
        GaleVector(self.basis.get(l, 0).clone(), self.basis.get(l, 1).clone())
    }

    pub fn halfspace_ok(&self) -> bool {
        self.halfspace_ok
    }

    /// `mu` with `<P_l, mu> > 0` for every `l`, first coordinate positive.
    pub fn witness(&self) -> Option<&GaleVector> {
        self.witness.as_ref()
    }

    pub fn ordering(&self) -> Option<&GaleOrdering> {
        self.ordering.as_ref()
    }

    fn require_ordering(&self) -> Result<&GaleOrdering> {
        self.ordering
            .as_ref()
            .ok_or_else(|| Error::Precondition("Gale system has no ordering".into()))
    }

    /// Whether no two dual vectors are parallel.
    pub fn is_uniform(&self) -> bool {
        let p = self.vectors();
        (0..p.len()).all(|i| (i + 1..p.len()).all(|j| !p[i].det(&p[j]).is_zero()))
    }
}

/// Kernel basis of `C` with the halfplane test applied.
pub fn gale_dual(c: &CoefficientMatrix) -> GaleSystem {
    let basis = c.entries().kernel_basis();
    debug_assert_eq!(basis.cols(), 2);
    from_kernel_basis(basis)
}

/// Builds the dual from a caller-supplied kernel basis of `C`.
pub fn gale_from_basis(c: &CoefficientMatrix, basis: RatMatrix) -> Result<GaleSystem> {
    let n = c.n();
    if basis.rows() != n + 2 || basis.cols() != 2 {
        return Err(Error::Dimension(format!(
            "basis must be {}x2, got {}x{}",
            n + 2,
            basis.rows(),
            basis.cols()
        )));
    }
    if !c.entries().mul(&basis)?.is_zero() {
        return Err(Error::Precondition("basis columns are not in the kernel".into()));
    }
    if basis.rank() != 2 {
        return Err(Error::Rank("basis must have rank 2".into()));
    }
    Ok(from_kernel_basis(basis))
}

fn from_kernel_basis(mut basis: RatMatrix) -> GaleSystem {
    let vectors: Vec<GaleVector> = (0..basis.rows())
        .map(|l| GaleVector(basis.get(l, 0).clone(), basis.get(l, 1).clone()))
        .collect();
    let Some(mut mu) = open_halfplane_witness(&vectors) else {
        return GaleSystem {
            basis,
            halfspace_ok: false,
            witness: None,
            ordering: None,
        };
    };
    if mu.0.is_zero() {
        // Tilt the witness towards (1, 0) while keeping every product positive.
        let mut t = BigRat::one();
        for p in vectors.iter().filter(|p| p.0.is_negative()) {
            let limit = p.dot(&mu) / (BigRat::from_integer(2.into()) * -p.0.clone());
            if limit < t {
                t = limit;
            }
        }
        mu.0 = t;
    } else if mu.0.is_negative() {
        for l in 0..basis.rows() {
            let v = -basis.get(l, 0).clone();
            basis.set(l, 0, v);
        }
        mu.0 = -mu.0;
    }
    GaleSystem {
        basis,
        halfspace_ok: true,
        witness: Some(mu),
        ordering: None,
    }
}

/// Searches a finite candidate set that contains an interior direction of the
/// feasible cone whenever it is nonempty: the vectors themselves, their
/// perpendiculars and sums of two perpendiculars.
fn open_halfplane_witness(vectors: &[GaleVector]) -> Option<GaleVector> {
    if vectors.iter().any(GaleVector::is_zero) {
        return None;
    }
    let feasible = |mu: &GaleVector| vectors.iter().all(|p| p.dot(mu).is_positive());
    if let Some(p) = vectors.iter().find(|p| feasible(p)) {
        return Some(p.clone());
    }
    let normals: Vec<GaleVector> = vectors
        .iter()
        .flat_map(|p| [p.rotated(false), p.rotated(true)])
        .collect();
    if let Some(mu) = normals.iter().find(|mu| feasible(mu)) {
        return Some(mu.clone());
    }
    for (i, a) in normals.iter().enumerate() {
        for b in &normals[i + 1..] {
            let mu = a.plus(b);
            if !mu.is_zero() && feasible(&mu) {
                return Some(mu);
            }
        }
    }
    None
}

/// Sorts the dual vectors by angle inside the witness halfplane and groups
/// them into ray classes. The direction is fixed so that the first class has
/// the smaller representative; the second basis column is then negated if
/// needed so that `det(P_rep_i, P_rep_j) > 0` for `i < j`.
pub fn ordering(g: &GaleSystem) -> Result<GaleSystem> {
    if !g.halfspace_ok {
        return Err(Error::Precondition(
            "dual vectors do not lie in an open halfplane".into(),
        ));
    }
    let p = g.vectors();
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&a, &b| match sign_of(&p[a].det(&p[b])) {
        1 => Ordering::Less,
        -1 => Ordering::Greater,
        _ => a.cmp(&b),
    });
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &l in &idx {
        match classes.last_mut() {
            Some(class) if p[class[0]].det(&p[l]).is_zero() => class.push(l),
            _ => classes.push(vec![l]),
        }
    }
    for class in classes.iter_mut() {
        class.sort_unstable();
    }
    if classes.len() < 2 {
        return Err(Error::Internal("rank-2 dual with a single ray class".into()));
    }
    if classes[0][0] > classes[classes.len() - 1][0] {
        classes.reverse();
    }
    let reps: Vec<usize> = classes.iter().map(|c| c[0]).collect();
    let mut basis = g.basis.clone();
    let mut witness = g.witness.clone();
    if p[reps[0]].det(&p[reps[reps.len() - 1]]).is_negative() {
        for l in 0..basis.rows() {
            let v = -basis.get(l, 1).clone();
            basis.set(l, 1, v);
        }
        if let Some(mu) = witness.as_mut() {
            mu.1 = -mu.1.clone();
        }
    }
    Ok(GaleSystem {
        basis,
        halfspace_ok: true,
        witness,
        ordering: Some(GaleOrdering {
            alpha: classes.iter().flatten().copied().collect(),
            classes,
            reps,
        }),
    })
}

/// Dual with halfplane test and ordering; the ordering is absent when the
/// halfplane test fails.
pub fn analyze_gale(c: &CoefficientMatrix) -> GaleSystem {
    let g = gale_dual(c);
    if g.halfspace_ok {
        ordering(&g).expect("halfplane holds")
    } else {
        g
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignSequence {
    pub bar_lambda: Vec<i64>,
    pub sgnvar: usize,
}

/// Class sums of the affine relation, in class order.
pub fn s_alpha(g: &GaleSystem, profile: &CircuitProfile) -> Result<SignSequence> {
    let ord = g.require_ordering()?;
    if profile.lambda.len() != g.basis.rows() {
        return Err(Error::Dimension(format!(
            "relation of length {} for {} dual vectors",
            profile.lambda.len(),
            g.basis.rows()
        )));
    }
    let bar_lambda: Vec<i64> = ord
        .classes
        .iter()
        .map(|class| class.iter().map(|&l| profile.lambda[l]).sum())
        .collect();
    let sgnvar = sign_variation(&bar_lambda);
    Ok(SignSequence { bar_lambda, sgnvar })
}

/// Checks, from maximal minors of `C` alone, whether `alpha` sorts the dual
/// vectors monotonically in angle (in one of the two directions).
pub fn verify_ordering_certificate(c: &CoefficientMatrix, alpha: &[usize]) -> bool {
    if check_permutation(alpha, c.n() + 2).is_err() {
        return false;
    }
    let mut seen_positive = false;
    let mut seen_negative = false;
    for i in 0..alpha.len() {
        for j in i + 1..alpha.len() {
            let (a, b) = (alpha[i], alpha[j]);
            let mut s = sign_of(&c.minor(a, b));
            if (a + b) % 2 == 1 {
                s = -s;
            }
            if b < a {
                s = -s;
            }
            match s {
                1 => seen_positive = true,
                -1 => seen_negative = true,
                _ => {}
            }
        }
    }
    !(seen_positive && seen_negative)
}

/// The scalar `delta` with `delta * det C(i, j) = (-1)^(i+j) det(P_i, P_j)`
/// for all `i < j`, or `None` if no single scalar works.
pub fn minor_relation_scalar(c: &CoefficientMatrix, g: &GaleSystem) -> Option<BigRat> {
    let p = g.vectors();
    let mut delta: Option<BigRat> = None;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let minor = c.minor(i, j);
            let mut d = p[i].det(&p[j]);
            if (i + j) % 2 == 1 {
                d = -d;
            }
            match (&delta, minor.is_zero()) {
                (_, true) => {
                    if !d.is_zero() {
                        return None;
                    }
                }
                (None, false) => delta = Some(d / minor),
                (Some(delta), false) => {
                    if &(delta * &minor) != &d {
                        return None;
                    }
                }
            }
        }
    }
    delta.filter(|d| !d.is_zero())
}
