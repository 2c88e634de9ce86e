//! Real scalar abstraction shared by the geometric modules.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type usable by the geometric code.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only if the target type cannot represent finite values.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    /// Relative slack used for inequalities that must tolerate rounding.
    fn slack() -> Self;

    /// Looser slack for quantities that pass through ill-conditioned chart changes.
    fn loose() -> Self;
}

impl Scalar for f32 {
    fn slack() -> Self {
        1e-5
    }

    fn loose() -> Self {
        1e-4
    }
}

impl Scalar for f64 {
    fn slack() -> Self {
        1e-12
    }

    fn loose() -> Self {
        1e-9
    }
}

/// `a <= b` up to the relative slack of the scalar type.
pub fn le_tol<T: Scalar>(a: T, b: T) -> bool {
    let scale = a.abs().max(b.abs());
    a <= b + T::slack() * scale
}

/// `a == b` up to the relative slack of the scalar type.
pub fn eq_tol<T: Scalar>(a: T, b: T) -> bool {
    le_tol(a, b) && le_tol(b, a)
}

pub fn cplx<T: Scalar>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// Lexicographic order on (Re, Im).
pub fn lex_cmp<T: Scalar>(a: &Complex<T>, b: &Complex<T>) -> std::cmp::Ordering {
    a.re
        .partial_cmp(&b.re)
        .unwrap_or(std::cmp::Ordering::Equal)
        .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
}
