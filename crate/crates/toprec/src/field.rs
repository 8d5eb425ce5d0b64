//! Exact coefficient fields: ℚ, ℚ(u) and the polynomial subring ℚ\[p\].
//!
//! `Rational` holds an arbitrary-precision fraction in lowest terms with a
//! positive denominator. `FieldElem` is the tagged union used as the scalar
//! type everywhere else; mixing tags is an error, never a silent coercion.
//! The formal parameter is written `u` internally; curves rename it for
//! display (γ, E, ...). `Qp` elements are polynomials in a symbol standing
//! for π² and embed in ℚ(u) as a subring, but stay polynomials: a division
//! that would leave the ring is reported, not coerced.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

// ---------------------------------------------------------------------------
// Rational
// ---------------------------------------------------------------------------

/// Arbitrary-precision rational in canonical form: gcd(|num|, den) = 1, den > 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational {
    num: BigInt,
    den: BigInt,
}

impl Rational {
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: BigInt, den: BigInt) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return Rational {
                num: BigInt::zero(),
                den: BigInt::one(),
            };
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = (num / &g, den / g);
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        Rational { num, den }
    }

    pub fn from_int(n: i64) -> Self {
        Rational {
            num: BigInt::from(n),
            den: BigInt::one(),
        }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::reduced(BigInt::from(num), BigInt::from(den))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduced(self.den.clone(), self.num.clone()))
    }

    pub fn abs(&self) -> Self {
        Rational {
            num: self.num.abs(),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        Rational {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// n! as a rational, for the dictionary prefactors.
    pub fn factorial(n: u64) -> Self {
        let mut acc = BigInt::one();
        for k in 2..=n {
            acc *= BigInt::from(k);
        }
        Rational {
            num: acc,
            den: BigInt::one(),
        }
    }

    /// Binomial coefficient C(n, k) with n a non-negative integer.
    pub fn binomial(n: u64, k: u64) -> Self {
        if k > n {
            return Self::zero();
        }
        let mut acc = BigInt::one();
        for i in 0..k {
            acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
        }
        Rational {
            num: acc,
            den: BigInt::one(),
        }
    }

    /// Parses "p/q" or a bare integer "p".
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational literal: {s:?}")))?;
        let den: BigInt = den
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational literal: {s:?}")))?;
        Self::new(num, den)
    }

    /// Canonical "p/q" serialization (always carries the denominator).
    pub fn to_literal(&self) -> String {
        format!("{}/{}", self.num, self.den)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! forward_binop {
    ($t:ty, $tr:ident, $m:ident) => {
        impl $tr for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $m(self, rhs: &$t) -> $t {
                (&self).$m(rhs)
            }
        }
        impl $tr<$t> for &$t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                self.$m(&rhs)
            }
        }
    };
}

impl Add<&Rational> for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        Rational::reduced(&self.num * &rhs.den + &rhs.num * &self.den, &self.den * &rhs.den)
    }
}
impl Sub<&Rational> for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        Rational::reduced(&self.num * &rhs.den - &rhs.num * &self.den, &self.den * &rhs.den)
    }
}
impl Mul<&Rational> for &Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        Rational::reduced(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}
impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}
impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}
forward_binop!(Rational, Add, add);
forward_binop!(Rational, Sub, sub);
forward_binop!(Rational, Mul, mul);

// ---------------------------------------------------------------------------
// UPoly: dense polynomial over ℚ in the formal parameter
// ---------------------------------------------------------------------------

/// Dense polynomial over ℚ, coefficients lowest-degree first, trailing zeros
/// trimmed. Used both for ℚ(u) payloads and for ℚ\[p\] elements.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UPoly {
    coeffs: Vec<Rational>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn zero() -> Self {
        UPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        UPoly {
            coeffs: vec![Rational::one()],
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial u.
    pub fn gen() -> Self {
        UPoly {
            coeffs: vec![Rational::zero(), Rational::one()],
        }
    }

    pub fn monomial(c: Rational, deg: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); deg + 1];
        coeffs[deg] = c;
        Self::new(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &acc * x + c;
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        UPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let inv = self.leading().recip().expect("nonzero leading");
        self.scale(&inv)
    }

    /// Quotient and remainder; `div` must be nonzero.
    pub fn div_rem(&self, div: &UPoly) -> (UPoly, UPoly) {
        assert!(!div.is_zero(), "polynomial division by zero");
        if self.degree() < div.degree() || self.is_zero() {
            return (UPoly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let dlead = div.leading();
        let dl_inv = dlead.recip().expect("nonzero leading");
        let dq = div.degree();
        let mut quot = vec![Rational::zero(); rem.len() - dq];
        for i in (dq..rem.len()).rev() {
            let c = &rem[i] * &dl_inv;
            if !c.is_zero() {
                for (j, d) in div.coeffs.iter().enumerate() {
                    rem[i - dq + j] = &rem[i - dq + j] - &(&c * d);
                }
            }
            quot[i - dq] = c;
        }
        (UPoly::new(quot), UPoly::new(rem))
    }

    /// Monic gcd by the Euclidean algorithm.
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    pub fn derivative(&self) -> UPoly {
        if self.coeffs.len() <= 1 {
            return UPoly::zero();
        }
        UPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * &Rational::from_int(i as i64 + 1))
                .collect(),
        )
    }

    /// Splits into (even part in u, odd part divided by u), i.e.
    /// p(u) = e(u²) + u·o(u²).
    pub fn even_odd_split(&self) -> (UPoly, UPoly) {
        let mut even = vec![];
        let mut odd = vec![];
        for (i, c) in self.coeffs.iter().enumerate() {
            if i % 2 == 0 {
                even.push(c.clone());
            } else {
                odd.push(c.clone());
            }
        }
        (UPoly::new(even), UPoly::new(odd))
    }

    /// Number of leading zero coefficients (the u-adic valuation).
    pub fn trailing_zeros(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(0)
    }

    /// p / u^k, assuming u^k divides p.
    pub fn shr(&self, k: usize) -> UPoly {
        debug_assert!(self.coeffs.iter().take(k).all(Rational::is_zero));
        UPoly::new(self.coeffs[k.min(self.coeffs.len())..].to_vec())
    }

    /// Single nonzero coefficient (at the top degree).
    pub fn is_monomial(&self) -> bool {
        !self.is_zero() && self.coeffs[..self.coeffs.len() - 1].iter().all(Rational::is_zero)
    }

    /// p(u²) — substitutes u → u², doubling every exponent.
    pub fn inflate_square(&self) -> UPoly {
        let mut coeffs = vec![Rational::zero(); 2 * self.coeffs.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[2 * i] = c.clone();
        }
        UPoly::new(coeffs)
    }
}

impl Add<&UPoly> for &UPoly {
    type Output = UPoly;
    fn add(self, rhs: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}
impl Sub<&UPoly> for &UPoly {
    type Output = UPoly;
    fn sub(self, rhs: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}
impl Mul<&UPoly> for &UPoly {
    type Output = UPoly;
    fn mul(self, rhs: &UPoly) -> UPoly {
        if self.is_zero() || rhs.is_zero() {
            return UPoly::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        UPoly::new(coeffs)
    }
}
impl Neg for &UPoly {
    type Output = UPoly;
    fn neg(self) -> UPoly {
        UPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}
impl Neg for UPoly {
    type Output = UPoly;
    fn neg(self) -> UPoly {
        -&self
    }
}
forward_binop!(UPoly, Add, add);
forward_binop!(UPoly, Sub, sub);
forward_binop!(UPoly, Mul, mul);

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_upoly(self, "u"))
    }
}
impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn fmt_upoly(p: &UPoly, var: &str) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut parts = vec![];
    for (i, c) in p.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let body = match i {
            0 => format!("{c}"),
            1 if c.is_one() => var.to_string(),
            1 => format!("{c}*{var}"),
            _ if c.is_one() => format!("{var}^{i}"),
            _ => format!("{c}*{var}^{i}"),
        };
        parts.push(body);
    }
    parts.join(" + ").replace("+ -", "- ")
}

// ---------------------------------------------------------------------------
// RatU: reduced ratio of UPolys with monic denominator
// ---------------------------------------------------------------------------

/// Element of ℚ(u): coprime numerator/denominator, denominator monic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatU {
    num: UPoly,
    den: UPoly,
}

impl RatU {
    pub fn new(num: UPoly, den: UPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: UPoly, den: UPoly) -> Self {
        if num.is_zero() {
            return RatU {
                num: UPoly::zero(),
                den: UPoly::one(),
            };
        }
        // Strip the common power of the parameter first; monomial
        // denominators (the common case on formal-parameter curves) then
        // skip the general gcd entirely.
        let k = num.trailing_zeros().min(den.trailing_zeros());
        let (num, den) = if k > 0 {
            (num.shr(k), den.shr(k))
        } else {
            (num, den)
        };
        if den.is_constant() {
            let lead_inv = den.coeff(0).recip().expect("nonzero denominator");
            return RatU {
                num: num.scale(&lead_inv),
                den: UPoly::one(),
            };
        }
        let (num, den) = if den.is_monomial() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_constant() {
                (num, den)
            } else {
                (num.div_rem(&g).0, den.div_rem(&g).0)
            }
        };
        let lead = den.leading();
        if lead.is_one() {
            return RatU { num, den };
        }
        let lead_inv = lead.recip().expect("nonzero denominator");
        RatU {
            num: num.scale(&lead_inv),
            den: den.scale(&lead_inv),
        }
    }

    pub fn from_poly(p: UPoly) -> Self {
        RatU {
            num: p,
            den: UPoly::one(),
        }
    }

    pub fn num(&self) -> &UPoly {
        &self.num
    }

    pub fn den(&self) -> &UPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_constant()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduced(self.den.clone(), self.num.clone()))
    }
}

impl Add<&RatU> for &RatU {
    type Output = RatU;
    fn add(self, rhs: &RatU) -> RatU {
        // Polynomials stay polynomials; no reduction needed.
        if self.is_poly() && rhs.is_poly() {
            return RatU {
                num: &self.num + &rhs.num,
                den: UPoly::one(),
            };
        }
        RatU::reduced(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}
impl Sub<&RatU> for &RatU {
    type Output = RatU;
    fn sub(self, rhs: &RatU) -> RatU {
        if self.is_poly() && rhs.is_poly() {
            return RatU {
                num: &self.num - &rhs.num,
                den: UPoly::one(),
            };
        }
        RatU::reduced(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}
impl Mul<&RatU> for &RatU {
    type Output = RatU;
    fn mul(self, rhs: &RatU) -> RatU {
        if self.is_poly() && rhs.is_poly() {
            return RatU {
                num: &self.num * &rhs.num,
                den: UPoly::one(),
            };
        }
        RatU::reduced(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}
impl Neg for &RatU {
    type Output = RatU;
    fn neg(self) -> RatU {
        RatU {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}
forward_binop!(RatU, Add, add);
forward_binop!(RatU, Sub, sub);
forward_binop!(RatU, Mul, mul);

// ---------------------------------------------------------------------------
// FieldElem
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum FieldTag {
    /// Plain rationals.
    Q,
    /// Rational functions of one formal parameter.
    Qu,
    /// Polynomials in a formal symbol standing for π² (a subring of ℚ(u)).
    Qp,
}

impl FieldTag {
    pub fn name(self) -> &'static str {
        match self {
            FieldTag::Q => "Q",
            FieldTag::Qu => "Qu",
            FieldTag::Qp => "Qp",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "Q" => Ok(FieldTag::Q),
            "Qu" => Ok(FieldTag::Qu),
            "Qp" => Ok(FieldTag::Qp),
            _ => Err(Error::Parse(format!("unknown field tag {s:?}"))),
        }
    }
}

/// Scalar of one of the three coefficient fields.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum FieldElem {
    Q(Rational),
    Qu(RatU),
    Qp(UPoly),
}

impl FieldElem {
    pub fn tag(&self) -> FieldTag {
        match self {
            FieldElem::Q(_) => FieldTag::Q,
            FieldElem::Qu(_) => FieldTag::Qu,
            FieldElem::Qp(_) => FieldTag::Qp,
        }
    }

    pub fn zero(tag: FieldTag) -> Self {
        Self::from_rational(tag, Rational::zero())
    }

    pub fn one(tag: FieldTag) -> Self {
        Self::from_rational(tag, Rational::one())
    }

    /// Embeds a rational constant into the field named by `tag`.
    pub fn from_rational(tag: FieldTag, r: Rational) -> Self {
        match tag {
            FieldTag::Q => FieldElem::Q(r),
            FieldTag::Qu => FieldElem::Qu(RatU::from_poly(UPoly::constant(r))),
            FieldTag::Qp => FieldElem::Qp(UPoly::constant(r)),
        }
    }

    pub fn from_int(tag: FieldTag, n: i64) -> Self {
        Self::from_rational(tag, Rational::from_int(n))
    }

    /// The formal parameter of ℚ(u) or ℚ\[p\].
    pub fn param(tag: FieldTag) -> Result<Self> {
        match tag {
            FieldTag::Qu => Ok(FieldElem::Qu(RatU::from_poly(UPoly::gen()))),
            FieldTag::Qp => Ok(FieldElem::Qp(UPoly::gen())),
            FieldTag::Q => Err(Error::Parse("field Q has no formal parameter".into())),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElem::Q(r) => r.is_zero(),
            FieldElem::Qu(r) => r.is_zero(),
            FieldElem::Qp(p) => p.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElem::Q(r) => r.is_one(),
            FieldElem::Qu(r) => r.is_poly() && r.num().is_constant() && r.num().coeff(0).is_one(),
            FieldElem::Qp(p) => p.is_constant() && p.coeff(0).is_one(),
        }
    }

    /// The underlying rational when the element is a constant of any field.
    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            FieldElem::Q(r) => Some(r.clone()),
            FieldElem::Qu(r) if r.is_poly() && r.num().is_constant() => Some(r.num().coeff(0)),
            FieldElem::Qp(p) if p.is_constant() => Some(p.coeff(0)),
            _ => None,
        }
    }

    fn check_tag(&self, rhs: &FieldElem) -> Result<()> {
        if self.tag() == rhs.tag() {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn try_add(&self, rhs: &FieldElem) -> Result<FieldElem> {
        self.check_tag(rhs)?;
        Ok(self + rhs)
    }

    pub fn try_sub(&self, rhs: &FieldElem) -> Result<FieldElem> {
        self.check_tag(rhs)?;
        Ok(self - rhs)
    }

    pub fn try_mul(&self, rhs: &FieldElem) -> Result<FieldElem> {
        self.check_tag(rhs)?;
        Ok(self * rhs)
    }

    /// Exact division. In ℚ\[p\] the quotient must stay polynomial.
    pub fn try_div(&self, rhs: &FieldElem) -> Result<FieldElem> {
        self.check_tag(rhs)?;
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match (self, rhs) {
            (FieldElem::Q(a), FieldElem::Q(b)) => Ok(FieldElem::Q(a * &b.recip()?)),
            (FieldElem::Qu(a), FieldElem::Qu(b)) => Ok(FieldElem::Qu(a * &b.recip()?)),
            (FieldElem::Qp(a), FieldElem::Qp(b)) => {
                if b.is_constant() {
                    let inv = b.coeff(0).recip()?;
                    Ok(FieldElem::Qp(a.scale(&inv)))
                } else {
                    let (q, r) = a.div_rem(b);
                    if r.is_zero() {
                        Ok(FieldElem::Qp(q))
                    } else {
                        Err(Error::InexactDivision)
                    }
                }
            }
            _ => unreachable!("tags checked"),
        }
    }

    pub fn recip(&self) -> Result<FieldElem> {
        FieldElem::one(self.tag()).try_div(self)
    }

    pub fn pow(&self, e: u32) -> FieldElem {
        let mut acc = FieldElem::one(self.tag());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale_int(&self, n: i64) -> FieldElem {
        self * &FieldElem::from_int(self.tag(), n)
    }

    /// Writes the element with `var` as the parameter name.
    pub fn display_with(&self, var: &str) -> String {
        match self {
            FieldElem::Q(r) => format!("{r}"),
            FieldElem::Qp(p) => fmt_upoly(p, var),
            FieldElem::Qu(r) => {
                if r.is_poly() {
                    fmt_upoly(r.num(), var)
                } else {
                    format!("({})/({})", fmt_upoly(r.num(), var), fmt_upoly(r.den(), var))
                }
            }
        }
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with("u"))
    }
}
impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// Operator impls panic on mixed tags; the public entry points validate tags
// up front, so engine-internal arithmetic always runs within one field.
impl Add<&FieldElem> for &FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        match (self, rhs) {
            (FieldElem::Q(a), FieldElem::Q(b)) => FieldElem::Q(a + b),
            (FieldElem::Qu(a), FieldElem::Qu(b)) => FieldElem::Qu(a + b),
            (FieldElem::Qp(a), FieldElem::Qp(b)) => FieldElem::Qp(a + b),
            _ => panic!("mixed field tags"),
        }
    }
}
impl Sub<&FieldElem> for &FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        match (self, rhs) {
            (FieldElem::Q(a), FieldElem::Q(b)) => FieldElem::Q(a - b),
            (FieldElem::Qu(a), FieldElem::Qu(b)) => FieldElem::Qu(a - b),
            (FieldElem::Qp(a), FieldElem::Qp(b)) => FieldElem::Qp(a - b),
            _ => panic!("mixed field tags"),
        }
    }
}
impl Mul<&FieldElem> for &FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        match (self, rhs) {
            (FieldElem::Q(a), FieldElem::Q(b)) => FieldElem::Q(a * b),
            (FieldElem::Qu(a), FieldElem::Qu(b)) => FieldElem::Qu(a * b),
            (FieldElem::Qp(a), FieldElem::Qp(b)) => FieldElem::Qp(a * b),
            _ => panic!("mixed field tags"),
        }
    }
}
impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        match self {
            FieldElem::Q(a) => FieldElem::Q(-a),
            FieldElem::Qu(a) => FieldElem::Qu(-a),
            FieldElem::Qp(a) => FieldElem::Qp(-a),
        }
    }
}
impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}
forward_binop!(FieldElem, Add, add);
forward_binop!(FieldElem, Sub, sub);
forward_binop!(FieldElem, Mul, mul);

impl Div<&FieldElem> for &FieldElem {
    type Output = FieldElem;
    fn div(self, rhs: &FieldElem) -> FieldElem {
        self.try_div(rhs).expect("exact division")
    }
}
forward_binop!(FieldElem, Div, div);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked field arithmetic: same tag required, divisor nonzero for `Div`.
pub fn field_arith(a: &FieldElem, b: &FieldElem, op: ArithOp) -> Result<FieldElem> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
        ArithOp::Div => a.try_div(b),
    }
}

// ---------------------------------------------------------------------------
// JSON helpers (the wire formats are bespoke, so no derives)
// ---------------------------------------------------------------------------

use serde_json::Value;

pub fn rational_to_json(r: &Rational) -> Value {
    Value::String(r.to_literal())
}

pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => Rational::parse(s),
        Value::Number(n) => {
            let i = n
                .as_i64()
                .ok_or_else(|| Error::Parse(format!("non-integer number literal {n}")))?;
            Ok(Rational::from_int(i))
        }
        _ => Err(Error::Parse(format!("expected rational literal, got {v}"))),
    }
}

pub fn upoly_to_json(p: &UPoly) -> Value {
    Value::Array(p.coeffs().iter().map(rational_to_json).collect())
}

pub fn upoly_from_json(v: &Value) -> Result<UPoly> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("expected coefficient array, got {v}")))?;
    Ok(UPoly::new(
        arr.iter().map(rational_from_json).collect::<Result<_>>()?,
    ))
}

/// Field elements serialize as "p/q" (constants), {"num":[..],"den":[..]}
/// (ℚ(u)) or a bare coefficient array (ℚ\[p\]).
pub fn field_elem_to_json(e: &FieldElem) -> Value {
    match e {
        FieldElem::Q(r) => rational_to_json(r),
        FieldElem::Qu(r) => serde_json::json!({
            "num": upoly_to_json(r.num()),
            "den": upoly_to_json(r.den()),
        }),
        FieldElem::Qp(p) => upoly_to_json(p),
    }
}

pub fn field_elem_from_json(tag: FieldTag, v: &Value) -> Result<FieldElem> {
    match v {
        Value::String(_) | Value::Number(_) => {
            Ok(FieldElem::from_rational(tag, rational_from_json(v)?))
        }
        Value::Array(_) => {
            let p = upoly_from_json(v)?;
            match tag {
                FieldTag::Qp => Ok(FieldElem::Qp(p)),
                FieldTag::Qu => Ok(FieldElem::Qu(RatU::from_poly(p))),
                FieldTag::Q => Err(Error::Parse(
                    "polynomial payload in a Q-tagged document".into(),
                )),
            }
        }
        Value::Object(map) => {
            let num = map
                .get("num")
                .ok_or_else(|| Error::Parse("missing \"num\"".into()))?;
            let den = map
                .get("den")
                .map(upoly_from_json)
                .transpose()?
                .unwrap_or_else(UPoly::one);
            let num = upoly_from_json(num)?;
            match tag {
                FieldTag::Qu => Ok(FieldElem::Qu(RatU::new(num, den)?)),
                FieldTag::Qp => {
                    if den.is_constant() {
                        let inv = den.coeff(0).recip()?;
                        Ok(FieldElem::Qp(num.scale(&inv)))
                    } else {
                        Err(Error::Parse("ratio payload in a Qp-tagged document".into()))
                    }
                }
                FieldTag::Q => Err(Error::Parse("ratio payload in a Q-tagged document".into())),
            }
        }
        _ => Err(Error::Parse(format!("bad field-element payload: {v}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> FieldElem {
        FieldElem::Q(Rational::ratio(n, d))
    }

    #[test]
    fn rational_canonical_form() {
        let r = Rational::new(BigInt::from(4), BigInt::from(-6)).unwrap();
        assert_eq!(r, Rational::ratio(-2, 3));
        assert!(r.denominator() > &BigInt::zero());
        assert_eq!(Rational::ratio(0, 5), Rational::zero());
    }

    #[test]
    fn field_arith_examples() {
        // (1/2) + (1/3) = 5/6
        let r = field_arith(&q(1, 2), &q(1, 3), ArithOp::Add).unwrap();
        assert_eq!(r, q(5, 6));

        // u/(u-1) * u = u^2/(u-1) in Q(u)
        let u = FieldElem::param(FieldTag::Qu).unwrap();
        let one = FieldElem::one(FieldTag::Qu);
        let a = u.try_div(&(&u - &one)).unwrap();
        let prod = field_arith(&a, &u, ArithOp::Mul).unwrap();
        let expect = (&u * &u).try_div(&(&u - &one)).unwrap();
        assert_eq!(prod, expect);

        // p / 0 is an error
        let p = FieldElem::param(FieldTag::Qp).unwrap();
        assert_eq!(
            field_arith(&p, &FieldElem::zero(FieldTag::Qp), ArithOp::Div),
            Err(Error::DivisionByZero)
        );

        // mixing tags is an error
        assert_eq!(
            field_arith(&q(1, 2), &FieldElem::one(FieldTag::Qu), ArithOp::Add),
            Err(Error::FieldMismatch)
        );
    }

    #[test]
    fn qp_division_stays_polynomial() {
        let p = FieldElem::param(FieldTag::Qp).unwrap();
        let p2 = p.pow(2);
        assert_eq!(p2.try_div(&p).unwrap(), p);
        let one = FieldElem::one(FieldTag::Qp);
        assert_eq!((&p2 + &one).try_div(&p), Err(Error::InexactDivision));
    }

    #[test]
    fn upoly_div_rem_and_gcd() {
        // (u^2 - 1) / (u - 1) = u + 1
        let u = UPoly::gen();
        let num = &(&u * &u) - &UPoly::one();
        let den = &u - &UPoly::one();
        let (quot, rem) = num.div_rem(&den);
        assert!(rem.is_zero());
        assert_eq!(quot, &u + &UPoly::one());
        assert_eq!(num.gcd(&den), den.monic());
    }

    #[test]
    fn literal_round_trip() {
        for s in ["3/4", "-5/7", "0/1", "12"] {
            let r = Rational::parse(s).unwrap();
            assert_eq!(Rational::parse(&r.to_literal()).unwrap(), r);
        }
        assert!(Rational::parse("1/0").is_err());
        assert!(Rational::parse("abc").is_err());
    }

    #[test]
    fn json_round_trip() {
        let u = FieldElem::param(FieldTag::Qu).unwrap();
        let e = (&u * &u).try_div(&(&u - &FieldElem::one(FieldTag::Qu))).unwrap();
        let v = field_elem_to_json(&e);
        assert_eq!(field_elem_from_json(FieldTag::Qu, &v).unwrap(), e);

        let p = FieldElem::param(FieldTag::Qp).unwrap().pow(3);
        let v = field_elem_to_json(&p);
        assert_eq!(field_elem_from_json(FieldTag::Qp, &v).unwrap(), p);
    }
}
