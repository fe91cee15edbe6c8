//! Exact arithmetic: rationals, matrices, univariate polynomials and real
//! root counting. Nothing in here touches floating point.

mod matrix;
mod poly;
mod rational;
mod roots;
mod sign;
mod zpoly;

pub use matrix::{IntMatrix, Matrix, RatMatrix};
pub use poly::RatPoly;
pub use rational::{format_rational, int, parse_rational, rat, sign_of, BigRat, ExtRat};
pub use roots::{
    count_roots_in_interval, squarefree_decomposition, squarefree_part, tarski_query, RootCount,
    SquarefreeFactor, SturmChain,
};
pub use sign::{sign_variation, sign_variation_by_deletion};

pub(crate) use zpoly::ZPoly;
