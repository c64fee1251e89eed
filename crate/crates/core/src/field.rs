//! Exact arithmetic in Q(√2) and the Lorentzian linear algebra built on it.
//!
//! Every equality test on group elements goes through these types, so all
//! values are kept canonical at construction time.

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Error raised by field operations that are undefined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    DivisionByZero,
    Parse(String),
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::DivisionByZero => write!(f, "division by zero in Q(sqrt2)"),
            FieldError::Parse(s) => write!(f, "cannot parse Q(sqrt2) element: {s}"),
        }
    }
}

/// An element `a + b·√2` of Q(√2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QSqrt2 {
    a: Rational,
    b: Rational,
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl QSqrt2 {
    pub fn new(a: Rational, b: Rational) -> Self {
        // Ratio keeps itself reduced on every arithmetic op; this is the only
        // place raw parts enter.
        Self { a, b }
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        Self::new(rat(a), rat(b))
    }

    pub fn from_ratios(an: i64, ad: i64, bn: i64, bd: i64) -> Self {
        Self::new(
            Rational::new(BigInt::from(an), BigInt::from(ad)),
            Rational::new(BigInt::from(bn), BigInt::from(bd)),
        )
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn sqrt2() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn sqrt2_part(&self) -> &Rational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    /// Galois conjugate `a − b√2`.
    pub fn conjugate(&self) -> Self {
        Self::new(self.a.clone(), -self.b.clone())
    }

    /// Field norm `a² − 2b²`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - rat(2) * &self.b * &self.b
    }

    /// Multiplication by √2, which only swaps and scales the parts.
    pub fn mul_sqrt2(&self) -> Self {
        Self::new(rat(2) * &self.b, self.a.clone())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Self::new(&self.a * r, &self.b * r)
    }

    pub fn inverse(&self) -> Result<Self, FieldError> {
        let n = self.norm();
        if n.is_zero() {
            // √2 is irrational, so the norm vanishes only at zero.
            return Err(FieldError::DivisionByZero);
        }
        let c = self.conjugate();
        Ok(Self::new(c.a / &n, c.b / n))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, FieldError> {
        Ok(self * &rhs.inverse()?)
    }

    /// Exact sign of the real number `a + b√2`.
    pub fn sign(&self) -> i8 {
        let sa = signum(&self.a);
        let sb = signum(&self.b);
        if sa == sb || sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        // Opposite signs: compare a² with 2b².
        let a2 = &self.a * &self.a;
        let b2 = rat(2) * &self.b * &self.b;
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    /// Exact comparison of the underlying real numbers.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        match (self - other).sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    /// Double-precision value, for rendering and statistics only.
    pub fn to_f64(&self) -> f64 {
        // Evaluate a + b√2 as (a² − 2b²)/(a − b√2) when the direct sum would
        // cancel badly.
        let a = ratio_to_f64(&self.a);
        let b = ratio_to_f64(&self.b);
        let direct = a + b * core::f64::consts::SQRT_2;
        if a == 0.0 || b == 0.0 || (a > 0.0) == (b > 0.0) {
            return direct;
        }
        let den = a - b * core::f64::consts::SQRT_2;
        ratio_to_f64(&self.norm()) / den
    }
}

fn signum(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Nearest float to a rational, robust to huge numerators and denominators.
pub fn ratio_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Huge numerators and denominators: scale both down first.
        let n = r.numer();
        let d = r.denom();
        let shift = n.bits().max(d.bits()).saturating_sub(1000);
        let n = n >> shift;
        let d = d >> shift;
        n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
    })
}

impl fmt::Debug for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Canonical serialization `p/q+r/s*sqrt2`, sign carried by the numerators.
impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}+{}/{}*sqrt2",
            self.a.numer(),
            self.a.denom(),
            self.b.numer(),
            self.b.denom()
        )
    }
}

fn parse_ratio(s: &str) -> Result<Rational, FieldError> {
    let err = || FieldError::Parse(s.to_string());
    let (n, d) = s.split_once('/').ok_or_else(err)?;
    let n = BigInt::from_str(n).map_err(|_| err())?;
    let d = BigInt::from_str(d).map_err(|_| err())?;
    if !d.is_positive() {
        return Err(err());
    }
    let r = Rational::new(n.clone(), d.clone());
    // Only the canonical form round-trips bit-exactly; reject anything else.
    if r.numer() != &n || r.denom() != &d {
        return Err(err());
    }
    Ok(r)
}

impl FromStr for QSqrt2 {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || FieldError::Parse(s.to_string());
        let body = s.strip_suffix("*sqrt2").ok_or_else(err)?;
        // The rational part never contains '+', so the first one splits.
        let (a, b) = body.split_once('+').ok_or_else(err)?;
        Ok(Self::new(parse_ratio(a)?, parse_ratio(b)?))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&QSqrt2> for &QSqrt2 {
            type Output = QSqrt2;
            fn $m(self, rhs: &QSqrt2) -> QSqrt2 {
                let f: fn(&QSqrt2, &QSqrt2) -> QSqrt2 = $body;
                f(self, rhs)
            }
        }
        impl $tr<QSqrt2> for QSqrt2 {
            type Output = QSqrt2;
            fn $m(self, rhs: QSqrt2) -> QSqrt2 {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&QSqrt2> for QSqrt2 {
            type Output = QSqrt2;
            fn $m(self, rhs: &QSqrt2) -> QSqrt2 {
                (&self).$m(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |x, y| QSqrt2::new(&x.a + &y.a, &x.b + &y.b));
forward_binop!(Sub, sub, |x, y| QSqrt2::new(&x.a - &y.a, &x.b - &y.b));
forward_binop!(Mul, mul, |x, y| {
    if x.b.is_zero() && y.b.is_zero() {
        return QSqrt2::new(&x.a * &y.a, Rational::zero());
    }
    QSqrt2::new(
        &x.a * &y.a + rat(2) * &x.b * &y.b,
        &x.a * &y.b + &x.b * &y.a,
    )
});

impl Neg for &QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2::new(-self.a.clone(), -self.b.clone())
    }
}

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        -&self
    }
}

/// A column vector with entries in Q(√2).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Vec3(pub [QSqrt2; 3]);

impl Vec3 {
    pub fn zero() -> Self {
        Vec3([QSqrt2::zero(), QSqrt2::zero(), QSqrt2::zero()])
    }

    /// Standard basis vector `e_{i+1}` (zero-based index).
    pub fn basis(i: usize) -> Self {
        let mut v = Self::zero();
        v.0[i] = QSqrt2::one();
        v
    }

    pub fn add(&self, o: &Vec3) -> Vec3 {
        Vec3([&self.0[0] + &o.0[0], &self.0[1] + &o.0[1], &self.0[2] + &o.0[2]])
    }

    pub fn scale(&self, s: &QSqrt2) -> Vec3 {
        Vec3([&self.0[0] * s, &self.0[1] * s, &self.0[2] * s])
    }

    pub fn neg(&self) -> Vec3 {
        Vec3([-&self.0[0], -&self.0[1], -&self.0[2]])
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [self.0[0].to_f64(), self.0[1].to_f64(), self.0[2].to_f64()]
    }
}

/// A 3×3 matrix over Q(√2), row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mat3(pub [[QSqrt2; 3]; 3]);

impl Mat3 {
    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            m.0[i][i] = QSqrt2::one();
        }
        m
    }

    pub fn zero() -> Self {
        Mat3(core::array::from_fn(|_| core::array::from_fn(|_| QSqrt2::zero())))
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> QSqrt2) -> Self {
        Mat3(core::array::from_fn(|i| core::array::from_fn(|j| f(i, j))))
    }

    pub fn mul(&self, o: &Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| {
            let mut acc = QSqrt2::zero();
            for k in 0..3 {
                if self.0[i][k].is_zero() || o.0[k][j].is_zero() {
                    continue;
                }
                acc = acc + &self.0[i][k] * &o.0[k][j];
            }
            acc
        })
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        Vec3(core::array::from_fn(|i| {
            let mut acc = QSqrt2::zero();
            for k in 0..3 {
                acc = acc + &self.0[i][k] * &v.0[k];
            }
            acc
        }))
    }

    pub fn transpose(&self) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[j][i].clone())
    }

    pub fn column(&self, j: usize) -> Vec3 {
        Vec3(core::array::from_fn(|i| self.0[i][j].clone()))
    }

    pub fn determinant(&self) -> QSqrt2 {
        let m = &self.0;
        let minor = |r1: usize, r2: usize, c1: usize, c2: usize| {
            &m[r1][c1] * &m[r2][c2] - &m[r1][c2] * &m[r2][c1]
        };
        &m[0][0] * &minor(1, 2, 1, 2) - &m[0][1] * &minor(1, 2, 0, 2)
            + &m[0][2] * &minor(1, 2, 0, 1)
    }

    /// Inverse by the adjugate formula.
    pub fn inverse(&self) -> Result<Mat3, FieldError> {
        let det_inv = self.determinant().inverse()?;
        let m = &self.0;
        let cof = |i: usize, j: usize| {
            let r: [usize; 2] = match i {
                0 => [1, 2],
                1 => [0, 2],
                _ => [0, 1],
            };
            let c: [usize; 2] = match j {
                0 => [1, 2],
                1 => [0, 2],
                _ => [0, 1],
            };
            let d = &m[r[0]][c[0]] * &m[r[1]][c[1]] - &m[r[0]][c[1]] * &m[r[1]][c[0]];
            if (i + j).is_multiple_of(2) {
                d
            } else {
                -d
            }
        };
        Ok(Mat3::from_fn(|i, j| &cof(j, i) * &det_inv))
    }

    pub fn is_identity(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| if i == j { self.0[i][j].is_one() } else { self.0[i][j].is_zero() }))
    }

    pub fn to_f64(&self) -> [[f64; 3]; 3] {
        core::array::from_fn(|i| core::array::from_fn(|j| self.0[i][j].to_f64()))
    }
}

/// The Gram form of the (4,4,4) triangle: `G_ii = 1`, `G_ij = −√2/2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramForm {
    g: Mat3,
}

impl Default for GramForm {
    fn default() -> Self {
        Self::triangle_444()
    }
}

impl GramForm {
    pub fn triangle_444() -> Self {
        let off = QSqrt2::from_ratios(0, 1, -1, 2);
        let g = Mat3::from_fn(|i, j| if i == j { QSqrt2::one() } else { off.clone() });
        GramForm { g }
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.g
    }

    /// `B(x, y) = xᵀ G y`.
    pub fn eval(&self, x: &Vec3, y: &Vec3) -> QSqrt2 {
        let gy = self.g.apply(y);
        let mut acc = QSqrt2::zero();
        for i in 0..3 {
            acc = acc + &x.0[i] * &gy.0[i];
        }
        acc
    }

    /// Leading principal minors of G. Sylvester's rule reads the signature off
    /// their signs: (+, +, −) is signature (2,1).
    pub fn leading_minors(&self) -> [QSqrt2; 3] {
        let m = &self.g.0;
        let m1 = m[0][0].clone();
        let m2 = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
        [m1, m2, self.g.determinant()]
    }

    /// (positive, negative) inertia, decided exactly.
    pub fn signature(&self) -> (usize, usize) {
        let minors = self.leading_minors();
        let mut pos = 0;
        let mut neg = 0;
        let mut prev = 1i8;
        for d in &minors {
            let s = d.sign();
            if s * prev > 0 {
                pos += 1;
            } else {
                neg += 1;
            }
            prev = s;
        }
        (pos, neg)
    }

    /// Whether `m` preserves the form: `mᵀ G m = G`.
    pub fn preserved_by(&self, m: &Mat3) -> bool {
        m.transpose().mul(&self.g).mul(m) == self.g
    }
}

impl Ord for QSqrt2 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_value(other)
    }
}

impl PartialOrd for QSqrt2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
