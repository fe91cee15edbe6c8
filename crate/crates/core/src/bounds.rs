//! Upper bounds on the number of positive solutions and the predicates that
//! qualify them.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitProfile, ExponentConfig};
use crate::error::{Error, Result};
use crate::exact::{sign_of, BigRat, RatMatrix};
use crate::gale::{CoefficientMatrix, GaleSystem, SignSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityClass {
    Even,
    Odd,
}

impl ParityClass {
    pub fn of(value: usize) -> Self {
        if value % 2 == 0 {
            ParityClass::Even
        } else {
            ParityClass::Odd
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Parity {
    /// The solution count has the same parity as the sign variation.
    Applies { expected: ParityClass },
    NotApplicable { reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Finiteness {
    Finite,
    PossiblyInfinite,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub sgnvar_bound: usize,
    pub vol_bound: usize,
    pub combined: usize,
    pub k_minus_1: usize,
    pub signature_bound: usize,
    pub parity: Parity,
    pub finiteness: Finiteness,
    pub uniform: bool,
    pub halfspace_ok: bool,
    /// Informative: without a Cayley structure the parity statement always applies.
    pub has_cayley: bool,
}

impl BoundReport {
    /// Smallest of the bounds that hold for every finite count.
    pub fn tightest(&self) -> usize {
        self.combined.min(self.k_minus_1).min(self.signature_bound)
    }
}

pub fn assemble_report(
    profile: &CircuitProfile,
    g: &GaleSystem,
    s: &SignSequence,
) -> Result<BoundReport> {
    let ord = g
        .ordering()
        .ok_or_else(|| Error::Precondition("bounds need an ordered Gale system".into()))?;
    if profile.lambda.len() != g.basis().rows() || s.bar_lambda.len() != ord.k() {
        return Err(Error::Dimension(format!(
            "relation of length {}, {} dual vectors, {} class sums for {} classes",
            profile.lambda.len(),
            g.basis().rows(),
            s.bar_lambda.len(),
            ord.k()
        )));
    }
    let vol_bound = usize::try_from(profile.vol_za)
        .map_err(|_| Error::Unsupported("volume exceeds the platform word".into()))?;
    let first = s.bar_lambda[0];
    let last = s.bar_lambda[ord.k() - 1];
    let parity = if first == 0 {
        Parity::NotApplicable {
            reason: "first class sum is zero".into(),
        }
    } else if last == 0 {
        Parity::NotApplicable {
            reason: "last class sum is zero".into(),
        }
    } else {
        Parity::Applies {
            expected: ParityClass::of(s.sgnvar),
        }
    };
    let finiteness = if s.bar_lambda.iter().any(|v| *v != 0) {
        Finiteness::Finite
    } else {
        Finiteness::PossiblyInfinite
    };
    Ok(BoundReport {
        sgnvar_bound: s.sgnvar,
        vol_bound,
        combined: s.sgnvar.min(vol_bound),
        k_minus_1: ord.k() - 1,
        signature_bound: profile.signature_bound(),
        parity,
        finiteness,
        uniform: ord.k() == g.basis().rows(),
        halfspace_ok: true,
        has_cayley: profile.has_cayley,
    })
}

/// For a nonzero kernel vector `d`: whether some class representative `r`
/// has `d_r * class_sum_r != 0`.
pub fn finiteness_check(g: &GaleSystem, s: &SignSequence, d: &[BigRat]) -> Result<bool> {
    let ord = g
        .ordering()
        .ok_or_else(|| Error::Precondition("finiteness needs an ordered Gale system".into()))?;
    if d.len() != g.basis().rows() {
        return Err(Error::Dimension(format!(
            "vector of length {} for {} columns",
            d.len(),
            g.basis().rows()
        )));
    }
    if d.iter().all(Zero::is_zero) {
        return Err(Error::Precondition("vector is zero".into()));
    }
    let stacked = RatMatrix::from_fn(d.len(), 3, |l, c| match c {
        2 => d[l].clone(),
        _ => g.basis().get(l, c).clone(),
    });
    if stacked.rank() != 2 {
        return Err(Error::Precondition("vector is not in the kernel".into()));
    }
    Ok(ord
        .reps
        .iter()
        .zip(&s.bar_lambda)
        .any(|(&r, &sum)| sum != 0 && !d[r].is_zero()))
}

/// Sign condition `det A(j) * det C(0, j) >= 0` for `j = 1..=n+1`, strict for
/// at least one `j`. Under it the sign variation is at most one.
pub fn mfrcsd_condition(config: &ExponentConfig, c: &CoefficientMatrix) -> bool {
    if config.n() != c.n() {
        return false;
    }
    let mut strict = false;
    for j in 1..config.n() + 2 {
        let product = sign_of(&config.lifted_minor(j)) * sign_of(&c.minor(0, j));
        match product {
            -1 => return false,
            1 => strict = true,
            _ => {}
        }
    }
    strict
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::circuit_profile;
    use crate::gale::{analyze_gale, s_alpha};

    fn report(points: Vec<Vec<i64>>, rows: &[Vec<i64>]) -> (BoundReport, GaleSystem, SignSequence) {
        let cfg = ExponentConfig::new(points).unwrap();
        let c = CoefficientMatrix::from_i64_rows(rows).unwrap();
        let profile = circuit_profile(&cfg);
        let g = analyze_gale(&c);
        let s = s_alpha(&g, &profile).unwrap();
        (assemble_report(&profile, &g, &s).unwrap(), g, s)
    }

    #[test]
    fn square_with_uniform_system() {
        // dual vectors (1,0), (2,1), (1,2), (0,1) in this angular order
        let bt = RatMatrix::from_i64_rows(&[vec![1, 2, 1, 0], vec![0, 1, 2, 1]]).unwrap();
        let c = CoefficientMatrix::new(bt.kernel_basis().transpose()).unwrap();
        let cfg = ExponentConfig::new(vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]).unwrap();
        let profile = circuit_profile(&cfg);
        let g = analyze_gale(&c);
        let s = s_alpha(&g, &profile).unwrap();
        let r = assemble_report(&profile, &g, &s).unwrap();
        assert_eq!(s.bar_lambda.iter().map(|v| v.abs()).collect::<Vec<_>>(), vec![1; 4]);
        assert_eq!(r.sgnvar_bound, 2);
        assert_eq!(r.vol_bound, 2);
        assert_eq!(r.k_minus_1, 3);
        assert!(r.uniform);
        assert_eq!(r.finiteness, Finiteness::Finite);
        assert_eq!(r.parity, Parity::Applies { expected: ParityClass::Even });
    }

    #[test]
    fn square_sign_variation_capped_by_volume() {
        // points in cyclic order so that the relation alternates
        let bt = RatMatrix::from_i64_rows(&[vec![1, 2, 1, 0], vec![0, 1, 2, 1]]).unwrap();
        let c = CoefficientMatrix::new(bt.kernel_basis().transpose()).unwrap();
        let cfg = ExponentConfig::new(vec![vec![0, 0], vec![1, 0], vec![1, 1], vec![0, 1]]).unwrap();
        let profile = circuit_profile(&cfg);
        let g = analyze_gale(&c);
        let s = s_alpha(&g, &profile).unwrap();
        let r = assemble_report(&profile, &g, &s).unwrap();
        assert_eq!(r.sgnvar_bound, 3);
        assert_eq!(r.vol_bound, 2);
        assert_eq!(r.combined, 2);
        assert_eq!(r.signature_bound, 3);
    }

    #[test]
    fn class_sum_zero_disables_parity_and_finiteness() {
        let (r, g, s) = report(
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]],
            &[vec![1, -1, -1, 1], vec![1, -1, 1, -1]],
        );
        assert_eq!(s.bar_lambda, vec![0, 0]);
        assert_eq!(r.finiteness, Finiteness::PossiblyInfinite);
        assert!(matches!(r.parity, Parity::NotApplicable { .. }));
        let d = g.basis().column(0);
        assert!(!finiteness_check(&g, &s, &d).unwrap());
        let off: Vec<BigRat> = [1, 0, 0, 0].map(|v| BigRat::from_integer(v.into())).to_vec();
        assert!(finiteness_check(&g, &s, &off).is_err());
    }

    #[test]
    fn mfrcsd_examples() {
        let cfg = ExponentConfig::new(vec![vec![0], vec![1], vec![2]]).unwrap();
        // det A(1) = 2, det A(2) = 1; det C(0,1) = c2, det C(0,2) = c1
        assert!(mfrcsd_condition(&cfg, &CoefficientMatrix::from_i64_rows(&[vec![-1, 1, 1]]).unwrap()));
        assert!(!mfrcsd_condition(&cfg, &CoefficientMatrix::from_i64_rows(&[vec![1, -3, 2]]).unwrap()));
    }
}
