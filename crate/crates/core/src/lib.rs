pub mod criterion;
pub mod error;
pub mod factorizer;
pub mod logderiv;
pub mod measure;
pub mod polynomial;
pub mod quad;
pub mod quasimeasure;
pub mod zeros;

pub use error::{Error, Result};
pub use measure::{Atom, AtomicMeasure, Rect};
pub use polynomial::{expand_sine_product, zero_strip_estimate, ExpPolynomial, SineFactor, SineProduct, Strip, Term};
pub use zeros::{count_zeros, find_zeros, ZeroReport};
