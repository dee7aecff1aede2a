//! Local implicit and inverse functions by nested monotone bisection.
//!
//! Given `F(x, y) = 0` at a seed `(a, b)` with `∂F/∂y(a, b)` invertible, the
//! crate builds the implicit function `y = f(x)` near `a` by reducing the
//! system one unknown at a time to scalar problems, each solved by bisection
//! on a box where the equation is monotone. Jacobians come from the matrix
//! formula `Jf = −[∂F/∂y]⁻¹ ∂F/∂x`, evaluated with forward-mode duals. Local
//! inverses reuse the same machinery on `F(x) − y = 0`.
//!
//! ```
//! use dini_core::{ExprFunction, SplitPoint, SystemOptions, build_system};
//!
//! let f = ExprFunction::parse(&["x^2 + y^2 - 1"], &["x", "y"]).unwrap();
//! let sys = build_system(&f, SplitPoint::new(vec![0.0], vec![1.0]), &SystemOptions::default()).unwrap();
//! let y = sys.solve_at(&[0.3]).unwrap();
//! assert!((y[0] - (1.0f64 - 0.09).sqrt()).abs() < 1e-10);
//! ```

pub mod dini;
pub mod error;
pub mod expr;
pub mod grid;
pub mod inverse;
pub mod linalg;
pub mod map;
pub mod point;
pub mod scalar;
pub mod verify;

pub use dini::{build_system, normalize, SystemOptions, SystemSolution, UniquenessReport};
pub use error::{Error, Result};
pub use expr::{Dual, ExprFunction};
pub use inverse::{build_inverse, LocalInverse};
pub use linalg::Matrix;
pub use map::SmoothMap;
pub use point::SplitPoint;
pub use scalar::{find_box, ImplicitSolution, ScalarOptions, SolutionBox};
