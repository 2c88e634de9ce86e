//! Fixed-point reals with 320 fractional bits, enough for the log-scale oracles.

use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

const PREC: usize = 320;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fixed(BigInt);

impl Fixed {
    pub fn int(n: i64) -> Self {
        Fixed(BigInt::from(n) << PREC)
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Fixed((BigInt::from(n) << PREC) / BigInt::from(d))
    }

    /// Exact value of a double.
    pub fn from_f64(x: f64) -> Self {
        let (mantissa, exp, sign) = num_traits::float::FloatCore::integer_decode(x);
        let m = BigInt::from(mantissa) * BigInt::from(sign);
        let shift = PREC as i64 + exp as i64;
        Fixed(if shift >= 0 { m << shift as usize } else { m >> (-shift) as usize })
    }

    pub fn div(&self, other: &Fixed) -> Fixed {
        Fixed((&self.0 << PREC) / &other.0)
    }

    pub fn div_int(&self, d: i64) -> Fixed {
        Fixed(&self.0 / BigInt::from(d))
    }

    pub fn pow(&self, k: u32) -> Fixed {
        (0..k).fold(Fixed::int(1), |acc, _| &acc * self)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.0.bits() as usize;
        if bits <= 1000 {
            return self.0.to_f64().expect("finite") / 2f64.powi(PREC as i32);
        }
        let drop = bits - 900;
        (&self.0 >> drop).to_f64().expect("finite") * 2f64.powi(drop as i32 - PREC as i32)
    }
}

impl Add for &Fixed {
    type Output = Fixed;
    fn add(self, o: &Fixed) -> Fixed {
        Fixed(&self.0 + &o.0)
    }
}

impl Sub for &Fixed {
    type Output = Fixed;
    fn sub(self, o: &Fixed) -> Fixed {
        Fixed(&self.0 - &o.0)
    }
}

impl Mul for &Fixed {
    type Output = Fixed;
    fn mul(self, o: &Fixed) -> Fixed {
        Fixed((&self.0 * &o.0) >> PREC)
    }
}

/// Σ_j s^j u^{2j+1}/(2j+1) with s = −1 for atan and +1 for atanh.
fn odd_series(u: &Fixed, alternating: bool) -> Fixed {
    let u2 = u * u;
    let mut power = u.clone();
    let mut acc = Fixed(BigInt::zero());
    let mut j = 0i64;
    while !power.is_zero() {
        let term = power.div_int(2 * j + 1);
        acc = if alternating && j % 2 == 1 { &acc - &term } else { &acc + &term };
        power = &power * &u2;
        j += 1;
    }
    acc
}

/// π = 16 atan(1/5) − 4 atan(1/239).
pub fn pi() -> Fixed {
    let a = odd_series(&Fixed::ratio(1, 5), true);
    let b = odd_series(&Fixed::ratio(1, 239), true);
    &Fixed(a.0 * 16) - &Fixed(b.0 * 4)
}

pub fn ln2() -> Fixed {
    let a = odd_series(&Fixed::ratio(1, 3), false);
    &a + &a
}

/// Natural logarithm of a positive value: x = 2^e·y with y ∈ [1, 2), ln y = 2 atanh((y−1)/(y+1)).
pub fn ln(x: &Fixed) -> Fixed {
    assert!(x.0.is_positive(), "ln of a nonpositive value");
    let e = x.0.bits() as i64 - PREC as i64 - 1;
    let y = if e >= 0 { Fixed(&x.0 >> e as usize) } else { Fixed(&x.0 << (-e) as usize) };
    let one = Fixed(BigInt::one() << PREC);
    let u = (&y - &one).div(&(&y + &one));
    let half = odd_series(&u, false);
    let l2 = ln2();
    &(&half + &half) + &Fixed(l2.0 * e)
}
