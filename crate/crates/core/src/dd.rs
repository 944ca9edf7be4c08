//! Minimal double-double arithmetic for phase reduction in the oscillatory sums.
//!
//! Only the handful of operations the zeta kernels need: exact sums/products
//! of two doubles, addition of double-double values, and reduction of a
//! large product `t * x` modulo 2π.

use std::f64::consts::TAU;

/// Low word of 2π (`TAU + TAU_LO` is 2π to ~106 bits).
const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;

/// ln 2 as a double-double.
pub(crate) const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub(crate) const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[cfg(test)]
    fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub(crate) fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub(crate) fn add_f64(self, x: f64) -> Dd {
        let (s, e) = two_sum(self.hi, x);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Dd { hi, lo }
    }

    #[inline]
    pub(crate) fn mul_f64(self, x: f64) -> Dd {
        let (p, e) = two_prod(self.hi, x);
        let (hi, lo) = quick_two_sum(p, e + self.lo * x);
        Dd { hi, lo }
    }

    /// `1 / d` for a positive double `d`, to double-double accuracy.
    #[inline]
    pub(crate) fn recip(d: f64) -> Dd {
        let q = 1.0 / d;
        // residual 1 - q*d is exact via fma
        let r = (-q).mul_add(d, 1.0);
        let (hi, lo) = quick_two_sum(q, r / d);
        Dd { hi, lo }
    }

    #[inline]
    pub(crate) fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// `self * t` reduced to the interval [-π, π].
    #[inline]
    pub(crate) fn mul_mod_tau(self, t: f64) -> f64 {
        let p = self.mul_f64(t);
        let k = (p.hi / TAU).round();
        // p - k*2π with the products k*TAU computed exactly
        let (kh, kl) = two_prod(k, TAU);
        let r = Dd { hi: p.hi, lo: p.lo }
            .add(Dd { hi: -kh, lo: -kl })
            .add_f64(-k * TAU_LO);
        r.to_f64()
    }
}
