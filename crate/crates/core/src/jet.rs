//! Truncated Taylor jets of order three in one variable.
//!
//! A [`Jet`] stores `f(x₀)`, `f'(x₀)`, `f''(x₀)/2`, `f'''(x₀)/6`. Arithmetic on
//! jets propagates exact derivatives through compositions, which is how the
//! smooth transition profile of the `ξ`-entropies is differentiated.

use core::ops::{Add, Div, Mul, Sub};

use crate::math::exp;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet(pub [f64; 4]);

impl Jet {
    pub fn constant(c: f64) -> Self {
        Jet([c, 0.0, 0.0, 0.0])
    }

    /// The independent variable at `x`.
    pub fn var(x: f64) -> Self {
        Jet([x, 1.0, 0.0, 0.0])
    }

    /// `[f, f', f'', f''']`.
    pub fn derivatives(&self) -> [f64; 4] {
        [self.0[0], self.0[1], 2.0 * self.0[2], 6.0 * self.0[3]]
    }

    pub fn recip(self) -> Self {
        let a = self.0;
        let mut q = [0.0; 4];
        q[0] = 1.0 / a[0];
        for k in 1..4 {
            let mut s = 0.0;
            for j in 1..=k {
                s += a[j] * q[k - j];
            }
            q[k] = -s / a[0];
        }
        Jet(q)
    }

    pub fn exp(self) -> Self {
        let a = self.0;
        let mut b = [0.0; 4];
        b[0] = exp(a[0]);
        for k in 1..4 {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * a[j] * b[k - j];
            }
            b[k] = s / k as f64;
        }
        Jet(b)
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, other: Jet) -> Jet {
        self * other.recip()
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2], self.0[3] + o.0[3]])
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2], self.0[3] - o.0[3]])
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let (a, b) = (self.0, o.0);
        let mut c = [0.0; 4];
        for k in 0..4 {
            for j in 0..=k {
                c[k] += a[j] * b[k - j];
            }
        }
        Jet(c)
    }
}
