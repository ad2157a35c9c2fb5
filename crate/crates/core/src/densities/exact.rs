//! Exact rational evaluation of the piecewise-geometric family.
//!
//! The CDF here is assembled from band masses plus a closed geometric tail,
//! independently of the `beta * a` identities used by the floating-point
//! density, so the identities can be checked rather than assumed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// Shorthand for the rational `num / den`.
pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactPiecewise {
    pub alpha1: Rational,
    pub alpha2: Rational,
    pub p: Rational,
    pub q: Rational,
    pub r: Rational,
    pub a1: Rational,
    pub beta1: Rational,
    pub beta2: Rational,
}

impl ExactPiecewise {
    pub fn new(alpha1: Rational, alpha2: Rational, p: Rational, q: Rational) -> Self {
        let one = Rational::one();
        let r = &p * &q;
        let denom = &one - &r;
        let beta1 = (&alpha2 * &p * (&one - &q) + &alpha1 * (&one - &p)) / &denom;
        let beta2 = (&alpha2 * (&one - &q) + &alpha1 * &q * (&one - &p)) / &denom;
        let a1 = beta1.recip();
        ExactPiecewise {
            alpha1,
            alpha2,
            p,
            q,
            r,
            a1,
            beta1,
            beta2,
        }
    }

    /// `alpha2 < 1 + q (1-p)/(1-q) (1-alpha1)`.
    pub fn admissible(&self) -> bool {
        let one = Rational::one();
        let bound = &one + &self.q * (&one - &self.p) / (&one - &self.q) * (&one - &self.alpha1);
        self.alpha2 < bound
    }

    /// `a_k` for `k >= 1`.
    pub fn endpoint(&self, k: usize) -> Rational {
        assert!(k >= 1);
        let n = (k - 1) / 2;
        let mut a = self.a1.clone();
        for _ in 0..n {
            a = &a * &self.r;
        }
        if k % 2 == 0 {
            a * &self.p
        } else {
            a
        }
    }

    /// Mass of one full period `[a_{2n+1}, a_{2n-1})` divided by `a_{2n-1}`.
    fn period_mass_ratio(&self) -> Rational {
        let one = Rational::one();
        &self.alpha1 * (&one - &self.p) + &self.alpha2 * &self.p * (&one - &self.q)
    }

    pub fn cdf(&self, x: &Rational) -> Rational {
        let one = Rational::one();
        if !x.is_positive() {
            return Rational::zero();
        }
        if *x >= self.a1 {
            return one;
        }
        // locate the period a_{2n+1} <= x < a_{2n-1}
        let mut upper = self.a1.clone();
        let mut lower = &upper * &self.r;
        while *x < lower {
            upper = lower;
            lower = &upper * &self.r;
        }
        let even = &upper * &self.p;
        // everything below a_{2n+1}: a geometric series of whole periods
        let below = &lower * self.period_mass_ratio() / (&one - &self.r);
        if *x >= even {
            below + &self.alpha2 * (&even - &lower) + &self.alpha1 * (x - &even)
        } else {
            below + &self.alpha2 * (x - &lower)
        }
    }

    /// `psi(lambda, mu) = (F(lambda (mu + 1)) - F(lambda mu)) / lambda`.
    pub fn psi(&self, lambda: &Rational, mu: &Rational) -> Rational {
        let hi = lambda * (mu + Rational::one());
        let lo = lambda * mu;
        (self.cdf(&hi) - self.cdf(&lo)) / lambda
    }

    pub fn rho(&self) -> Rational {
        (Rational::one() + &self.p) / ratio(2, 1)
    }

    /// Slope bound of `F` on the good set.
    pub fn slope_bound(&self) -> Rational {
        let one = Rational::one();
        let rho = self.rho();
        ((&one - &self.q) * &self.alpha2 + &self.q * (&one - &rho) * &self.alpha1) / (&one - &self.q * &rho)
    }

    /// `(F(y + h) - F(y)) / h`.
    pub fn difference_quotient(&self, y: &Rational, h: &Rational) -> Rational {
        (self.cdf(&(y + h)) - self.cdf(y)) / h
    }
}
