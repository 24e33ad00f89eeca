//! Exact coefficients: big rationals, and univariate rational functions in
//! the degeneration parameter λ.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("pole at lambda = 0")]
    PoleAtZero,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

/// Shorthand for `n/d`. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    assert!(d != 0, "rat: zero denominator");
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_rational(s: &str) -> Result<Rational, ScalarError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(ScalarError::Parse(s.to_string()));
    }
    Rational::from_str(t).map_err(|_| ScalarError::Parse(s.to_string()))
}

/// Coefficient field interface shared by [`Rational`] and [`RationalFunction`].
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn from_rational(q: &Rational) -> Self;

    fn inv(&self) -> Result<Self, ScalarError>;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }

    fn mul_rational(&self, q: &Rational) -> Self {
        self.clone() * Self::from_rational(q)
    }
}

impl Scalar for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            Err(ScalarError::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }

    fn mul_rational(&self, q: &Rational) -> Self {
        self * q
    }
}

/// Dense univariate polynomial with rational coefficients, lowest degree first.
/// Trailing zeros are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(q: Rational) -> Self {
        Self::from_coeffs(vec![q])
    }

    pub fn monomial(q: Rational, k: usize) -> Self {
        let mut c = vec![Rational::zero(); k + 1];
        c[k] = q;
        Self::from_coeffs(c)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Order of vanishing at λ = 0.
    pub fn ord0(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    fn is_monomial(&self) -> bool {
        self.coeffs.iter().filter(|c| !c.is_zero()).count() == 1
    }

    pub fn scale(&self, q: &Rational) -> Poly {
        if q.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n)
            .map(|i| match (self.coeffs.get(i), o.coeffs.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => Rational::zero(),
            })
            .collect();
        Poly::from_coeffs(c)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    c[i + j] += a * b;
                }
            }
        }
        Poly::from_coeffs(c)
    }

    /// Multiply by λ^k.
    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut c = vec![Rational::zero(); k];
        c.extend(self.coeffs.iter().cloned());
        Poly { coeffs: c }
    }

    /// Divide by λ^k; the low coefficients must vanish.
    fn shift_down(&self, k: usize) -> Poly {
        debug_assert!(self.coeffs.iter().take(k).all(|c| c.is_zero()));
        Poly::from_coeffs(self.coeffs.iter().skip(k).cloned().collect())
    }

    /// Euclidean division. Panics when `d` is zero.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("polynomial division by zero");
        let dl = d.lead().unwrap().clone();
        let mut r = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); n - dd];
        for k in (0..n - dd).rev() {
            let c = &r[k + dd] / &dl;
            if !c.is_zero() {
                for (i, di) in d.coeffs.iter().enumerate() {
                    if !di.is_zero() {
                        r[k + i] -= &c * di;
                    }
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::from_coeffs(q), Poly::from_coeffs(r))
    }

    fn monic(&self) -> Poly {
        match self.lead() {
            Some(l) => self.scale(&l.recip()),
            None => Poly::zero(),
        }
    }

    /// Monic greatest common divisor (zero when both inputs are zero).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r;
        }
        x.monic()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    fn fmt_in(&self, f: &mut fmt::Formatter<'_>, var: &str) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = a.is_one();
            match k {
                0 => write!(f, "{a}")?,
                _ => {
                    if !unit {
                        write!(f, "{a}*")?;
                    }
                    if k == 1 {
                        write!(f, "{var}")?;
                    } else {
                        write!(f, "{var}^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_in(f, "l")
    }
}

/// Quotient of polynomials in λ kept in canonical form: coprime, with a
/// monic denominator. Equal values therefore have equal representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::ZeroDenominator);
        }
        Ok(Self::normalized(num, den))
    }

    pub fn constant(q: Rational) -> Self {
        RationalFunction {
            num: Poly::constant(q),
            den: Poly::constant(Rational::one()),
        }
    }

    /// The parameter λ itself.
    pub fn lambda() -> Self {
        Self::lambda_pow(1)
    }

    /// λ^k for any integer k.
    pub fn lambda_pow(k: i64) -> Self {
        let one = Rational::one();
        if k >= 0 {
            RationalFunction {
                num: Poly::monomial(one.clone(), k as usize),
                den: Poly::constant(one),
            }
        } else {
            RationalFunction {
                num: Poly::constant(one.clone()),
                den: Poly::monomial(one, k.unsigned_abs() as usize),
            }
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    fn normalized(mut num: Poly, mut den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_monomial() {
            // Common case in degeneration runs: the denominator is a power of λ.
            let k = den.ord0().unwrap();
            let s = k.min(num.ord0().unwrap());
            if s > 0 {
                num = num.shift_down(s);
                den = den.shift_down(s);
            }
        } else {
            let g = Poly::gcd(&num, &den);
            if g.degree().unwrap_or(0) > 0 {
                num = num.div_rem(&g).0;
                den = den.div_rem(&g).0;
            }
        }
        let l = den.lead().unwrap().clone();
        if !l.is_one() {
            let li = l.recip();
            num = num.scale(&li);
            den = den.scale(&li);
        }
        RationalFunction { num, den }
    }

    /// Value at λ = 0; a pole there is an error.
    pub fn limit_at_zero(&self) -> Result<Rational, ScalarError> {
        let d0 = self.den.coeff(0);
        if d0.is_zero() {
            // Coprime form: the numerator cannot vanish at 0 as well.
            return Err(ScalarError::PoleAtZero);
        }
        Ok(self.num.coeff(0) / d0)
    }

    /// Order at λ = 0 (negative for a pole); `None` for the zero function.
    pub fn valuation(&self) -> Option<i64> {
        let a = self.num.ord0()? as i64;
        let b = self.den.ord0().unwrap() as i64;
        Some(a - b)
    }

    /// Coefficient of λ^valuation in the Laurent expansion at 0.
    pub fn leading_coefficient(&self) -> Option<Rational> {
        let a = self.num.ord0()?;
        let b = self.den.ord0().unwrap();
        Some(self.num.coeff(a) / self.den.coeff(b))
    }

    pub fn times_lambda_pow(&self, k: i64) -> Self {
        if k == 0 || self.is_zero() {
            return self.clone();
        }
        if k > 0 {
            Self::normalized(self.num.shift_up(k as usize), self.den.clone())
        } else {
            Self::normalized(self.num.clone(), self.den.shift_up(k.unsigned_abs() as usize))
        }
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational, ScalarError> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(self.num.eval(x) / d)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            return self.num.fmt_in(f, "l");
        }
        write!(f, "(")?;
        self.num.fmt_in(f, "l")?;
        write!(f, ")/(")?;
        self.den.fmt_in(f, "l")?;
        write!(f, ")")
    }
}

impl Zero for RationalFunction {
    fn zero() -> Self {
        RationalFunction {
            num: Poly::zero(),
            den: Poly::constant(Rational::one()),
        }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RationalFunction {
    fn one() -> Self {
        Self::constant(Rational::one())
    }
}

impl Add<&RationalFunction> for RationalFunction {
    type Output = RationalFunction;

    fn add(self, o: &RationalFunction) -> RationalFunction {
        if o.is_zero() {
            return self;
        }
        if self.is_zero() {
            return o.clone();
        }
        if self.den == o.den {
            return Self::normalized(self.num.add(&o.num), self.den);
        }
        if self.den.is_monomial() && o.den.is_monomial() {
            // Both denominators are powers of λ (monic): align on the larger one.
            let (i, j) = (self.den.degree().unwrap(), o.den.degree().unwrap());
            let k = i.max(j);
            let n = self.num.shift_up(k - i).add(&o.num.shift_up(k - j));
            let d = if i >= j { self.den } else { o.den.clone() };
            return Self::normalized(n, d);
        }
        let n = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        Self::normalized(n, self.den.mul(&o.den))
    }
}

impl Add for RationalFunction {
    type Output = RationalFunction;

    fn add(self, o: RationalFunction) -> RationalFunction {
        self + &o
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;

    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: self.num.neg(),
            den: self.den,
        }
    }
}

impl Sub<&RationalFunction> for RationalFunction {
    type Output = RationalFunction;

    fn sub(self, o: &RationalFunction) -> RationalFunction {
        self + &(-o.clone())
    }
}

impl Sub for RationalFunction {
    type Output = RationalFunction;

    fn sub(self, o: RationalFunction) -> RationalFunction {
        self + &(-o)
    }
}

impl Mul<&RationalFunction> for RationalFunction {
    type Output = RationalFunction;

    fn mul(self, o: &RationalFunction) -> RationalFunction {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        Self::normalized(self.num.mul(&o.num), self.den.mul(&o.den))
    }
}

impl Mul for RationalFunction {
    type Output = RationalFunction;

    fn mul(self, o: RationalFunction) -> RationalFunction {
        self * &o
    }
}

impl Scalar for RationalFunction {
    fn from_rational(q: &Rational) -> Self {
        Self::constant(q.clone())
    }

    fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    fn mul_rational(&self, q: &Rational) -> Self {
        if q.is_zero() || self.is_zero() {
            return Self::zero();
        }
        RationalFunction {
            num: self.num.scale(q),
            den: self.den.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&x| rat(x, 1)).collect())
    }

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::new(p(n), p(d)).unwrap()
    }

    #[test]
    fn cancels_common_factor() {
        // (λ² + λ)/λ = λ + 1
        assert_eq!(rf(&[0, 1, 1], &[0, 1]), rf(&[1, 1], &[1]));
    }

    #[test]
    fn scales_denominator_into_numerator() {
        let f = rf(&[0, 2], &[4]);
        assert_eq!(f.denominator(), &p(&[1]));
        assert_eq!(f.numerator(), &Poly::from_coeffs(vec![rat(0, 1), rat(1, 2)]));
    }

    #[test]
    fn zero_over_power_is_zero() {
        let f = rf(&[0], &[0, 0, 0, 1]);
        assert!(f.is_zero());
        assert_eq!(f, RationalFunction::zero());
    }

    #[test]
    fn zero_denominator_is_rejected() {
        assert_eq!(
            RationalFunction::new(p(&[1]), Poly::zero()),
            Err(ScalarError::ZeroDenominator)
        );
    }

    #[test]
    fn non_monomial_gcd() {
        // (λ² − 1)/(λ² + 2λ + 1) = (λ − 1)/(λ + 1)
        assert_eq!(rf(&[-1, 0, 1], &[1, 2, 1]), rf(&[-1, 1], &[1, 1]));
    }

    #[test]
    fn limits() {
        assert_eq!(rf(&[1, 1], &[1]).limit_at_zero().unwrap(), rat(1, 1));
        assert_eq!(rf(&[0, 3, 1], &[0, 1]).limit_at_zero().unwrap(), rat(3, 1));
        assert_eq!(rf(&[1], &[0, 1]).limit_at_zero(), Err(ScalarError::PoleAtZero));
    }

    #[test]
    fn valuation_and_lead() {
        let f = rf(&[0, 0, 3, 1], &[0, 0, 0, 0, 2]);
        assert_eq!(f.valuation(), Some(-2));
        assert_eq!(f.leading_coefficient(), Some(rat(3, 2)));
        assert_eq!(f.times_lambda_pow(2).limit_at_zero().unwrap(), rat(3, 2));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational(" -3/6 ").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn display() {
        assert_eq!(rf(&[1, -2, 0, 1], &[1]).to_string(), "l^3 - 2*l + 1");
        assert_eq!(rf(&[1], &[0, 1]).to_string(), "(1)/(l)");
    }

    fn small_rf() -> impl Strategy<Value = RationalFunction> {
        (
            prop::collection::vec(-4i64..5, 0..4),
            prop::collection::vec(-4i64..5, 1..4),
            0usize..3,
        )
            .prop_filter_map("nonzero denominator", |(n, d, k)| {
                let den = p(&d).shift_up(k);
                if den.is_zero() {
                    None
                } else {
                    Some(RationalFunction::new(p(&n), den).unwrap())
                }
            })
    }

    proptest! {
        #[test]
        fn field_axioms(a in small_rf(), b in small_rf(), c in small_rf()) {
            prop_assert_eq!(a.clone() + &b, b.clone() + &a);
            prop_assert_eq!(a.clone() * &b, b.clone() * &a);
            prop_assert_eq!((a.clone() + &b) + &c, a.clone() + &(b.clone() + &c));
            prop_assert_eq!((a.clone() * &b) * &c, a.clone() * &(b.clone() * &c));
            prop_assert_eq!(a.clone() * &(b.clone() + &c), a.clone() * &b + a.clone() * &c);
            prop_assert_eq!(a.clone() - &a, RationalFunction::zero());
            if !a.is_zero() {
                prop_assert_eq!(a.clone() * &a.inv().unwrap(), RationalFunction::one());
            }
        }

        #[test]
        fn normalize_idempotent(a in small_rf()) {
            let again = RationalFunction::new(a.numerator().clone(), a.denominator().clone()).unwrap();
            prop_assert_eq!(&again, &a);
            prop_assert!(a.denominator().lead().unwrap().is_one());
            let g = Poly::gcd(a.numerator(), a.denominator());
            prop_assert!(a.is_zero() || g.degree() == Some(0));
        }
    }
}
