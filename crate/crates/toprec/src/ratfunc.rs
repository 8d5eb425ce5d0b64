//! Dense polynomials and rational functions of the uniformizer z, with
//! coefficients in one of the exact fields.
//!
//! The uniformizer is always written `z`. Root finding is deliberately
//! limited to linear-factor extraction: rational-root search over ℚ, a
//! specialize-and-verify search for constant roots over ℚ(u)/ℚ\[p\], and an
//! exact solve once the unfactored part has degree one. Anything left over
//! is reported as an unfactored remainder, not an error.

use crate::error::{Error, Result};
use crate::field::{
    field_elem_from_json, field_elem_to_json, FieldElem, FieldTag, Rational,
};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::Value;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

// ---------------------------------------------------------------------------
// ZPoly
// ---------------------------------------------------------------------------

/// Dense polynomial in z over a single coefficient field.
#[derive(Clone, PartialEq, Eq)]
pub struct ZPoly {
    tag: FieldTag,
    coeffs: Vec<FieldElem>,
}

impl ZPoly {
    pub fn new(tag: FieldTag, mut coeffs: Vec<FieldElem>) -> Self {
        assert!(coeffs.iter().all(|c| c.tag() == tag), "mixed field tags");
        while coeffs.last().is_some_and(FieldElem::is_zero) {
            coeffs.pop();
        }
        ZPoly { tag, coeffs }
    }

    pub fn zero(tag: FieldTag) -> Self {
        ZPoly { tag, coeffs: vec![] }
    }

    pub fn one(tag: FieldTag) -> Self {
        ZPoly {
            tag,
            coeffs: vec![FieldElem::one(tag)],
        }
    }

    pub fn constant(c: FieldElem) -> Self {
        let tag = c.tag();
        Self::new(tag, vec![c])
    }

    /// The monomial z.
    pub fn gen(tag: FieldTag) -> Self {
        ZPoly {
            tag,
            coeffs: vec![FieldElem::zero(tag), FieldElem::one(tag)],
        }
    }

    pub fn monomial(c: FieldElem, deg: usize) -> Self {
        let tag = c.tag();
        let mut coeffs = vec![FieldElem::zero(tag); deg + 1];
        coeffs[deg] = c;
        Self::new(tag, coeffs)
    }

    pub fn from_ints(tag: FieldTag, ints: &[i64]) -> Self {
        Self::new(tag, ints.iter().map(|&n| FieldElem::from_int(tag, n)).collect())
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
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

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| FieldElem::zero(self.tag))
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn leading(&self) -> FieldElem {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| FieldElem::zero(self.tag))
    }

    pub fn eval(&self, x: &FieldElem) -> FieldElem {
        let mut acc = FieldElem::zero(self.tag);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        if c.is_zero() {
            return Self::zero(self.tag);
        }
        ZPoly {
            tag: self.tag,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn derivative(&self) -> ZPoly {
        if self.coeffs.len() <= 1 {
            return ZPoly::zero(self.tag);
        }
        ZPoly::new(
            self.tag,
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c.scale_int(i as i64 + 1))
                .collect(),
        )
    }

    /// Quotient and remainder. Fails only in ℚ\[p\] when a coefficient
    /// division leaves the ring.
    pub fn div_rem(&self, div: &ZPoly) -> Result<(ZPoly, ZPoly)> {
        assert!(!div.is_zero(), "polynomial division by zero");
        if self.is_zero() || self.degree() < div.degree() {
            return Ok((ZPoly::zero(self.tag), self.clone()));
        }
        let mut rem = self.coeffs.clone();
        let dq = div.degree();
        let dlead = div.leading();
        let mut quot = vec![FieldElem::zero(self.tag); rem.len() - dq];
        for i in (dq..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let c = rem[i].try_div(&dlead)?;
            for (j, d) in div.coeffs.iter().enumerate() {
                rem[i - dq + j] = &rem[i - dq + j] - &(&c * d);
            }
            quot[i - dq] = c;
        }
        Ok((ZPoly::new(self.tag, quot), ZPoly::new(self.tag, rem)))
    }

    pub fn gcd(&self, other: &ZPoly) -> Result<ZPoly> {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            return Ok(a);
        }
        let inv = a.leading().recip()?;
        Ok(a.scale(&inv))
    }

    /// p(c·z) — rescales the variable.
    pub fn scale_var(&self, c: &FieldElem) -> ZPoly {
        let mut pow = FieldElem::one(self.tag);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            coeffs.push(a * &pow);
            pow = &pow * c;
        }
        ZPoly::new(self.tag, coeffs)
    }

    /// p(z + c) — shifts the variable.
    pub fn shift_var(&self, c: &FieldElem) -> ZPoly {
        let mut acc = ZPoly::zero(self.tag);
        let shift = ZPoly::new(self.tag, vec![c.clone(), FieldElem::one(self.tag)]);
        for a in self.coeffs.iter().rev() {
            acc = &(&acc * &shift) + &ZPoly::constant(a.clone());
        }
        acc
    }

    pub fn pow(&self, e: u32) -> ZPoly {
        let mut acc = ZPoly::one(self.tag);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl Add<&ZPoly> for &ZPoly {
    type Output = ZPoly;
    fn add(self, rhs: &ZPoly) -> ZPoly {
        assert_eq!(self.tag, rhs.tag, "mixed field tags");
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ZPoly::new(self.tag, (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}
impl Sub<&ZPoly> for &ZPoly {
    type Output = ZPoly;
    fn sub(self, rhs: &ZPoly) -> ZPoly {
        assert_eq!(self.tag, rhs.tag, "mixed field tags");
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ZPoly::new(self.tag, (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}
impl Mul<&ZPoly> for &ZPoly {
    type Output = ZPoly;
    fn mul(self, rhs: &ZPoly) -> ZPoly {
        assert_eq!(self.tag, rhs.tag, "mixed field tags");
        if self.is_zero() || rhs.is_zero() {
            return ZPoly::zero(self.tag);
        }
        let mut coeffs =
            vec![FieldElem::zero(self.tag); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        ZPoly::new(self.tag, coeffs)
    }
}
impl Neg for &ZPoly {
    type Output = ZPoly;
    fn neg(self) -> ZPoly {
        ZPoly {
            tag: self.tag,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}
impl Neg for ZPoly {
    type Output = ZPoly;
    fn neg(self) -> ZPoly {
        -&self
    }
}

macro_rules! forward_zbinop {
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
forward_zbinop!(ZPoly, Add, add);
forward_zbinop!(ZPoly, Sub, sub);
forward_zbinop!(ZPoly, Mul, mul);

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = vec![];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cs = c.to_string();
            let coeff = if cs.contains(['+', '-', ' ']) && i > 0 {
                format!("({cs})")
            } else {
                cs
            };
            parts.push(match i {
                0 => coeff,
                1 if c.is_one() => "z".into(),
                1 => format!("{coeff}*z"),
                _ if c.is_one() => format!("z^{i}"),
                _ => format!("{coeff}*z^{i}"),
            });
        }
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}
impl fmt::Debug for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ---------------------------------------------------------------------------
// UniRatFunc
// ---------------------------------------------------------------------------

/// Reduced rational function of z. The denominator is normalized monic.
#[derive(Clone, PartialEq, Eq)]
pub struct UniRatFunc {
    num: ZPoly,
    den: ZPoly,
}

impl UniRatFunc {
    pub fn new(num: ZPoly, den: ZPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        assert_eq!(num.tag(), den.tag(), "mixed field tags");
        if num.is_zero() {
            return Ok(UniRatFunc {
                num,
                den: ZPoly::one(den.tag()),
            });
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den)?;
            if g.is_constant() {
                (num, den)
            } else {
                (num.div_rem(&g)?.0, den.div_rem(&g)?.0)
            }
        };
        let inv = den.leading().recip()?;
        Ok(UniRatFunc {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    pub fn from_poly(p: ZPoly) -> Self {
        let tag = p.tag();
        UniRatFunc {
            num: p,
            den: ZPoly::one(tag),
        }
    }

    pub fn zero(tag: FieldTag) -> Self {
        Self::from_poly(ZPoly::zero(tag))
    }

    pub fn constant(c: FieldElem) -> Self {
        Self::from_poly(ZPoly::constant(c))
    }

    pub fn gen(tag: FieldTag) -> Self {
        Self::from_poly(ZPoly::gen(tag))
    }

    pub fn tag(&self) -> FieldTag {
        self.num.tag()
    }

    pub fn num(&self) -> &ZPoly {
        &self.num
    }

    pub fn den(&self) -> &ZPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_constant()
    }

    /// Exact value f(z0); the denominator must not vanish there.
    pub fn eval(&self, z0: &FieldElem) -> Result<FieldElem> {
        let d = self.den.eval(z0);
        if d.is_zero() {
            return Err(Error::PoleAtPoint);
        }
        self.num.eval(z0).try_div(&d)
    }

    pub fn add(&self, rhs: &UniRatFunc) -> Result<UniRatFunc> {
        UniRatFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }

    pub fn sub(&self, rhs: &UniRatFunc) -> Result<UniRatFunc> {
        UniRatFunc::new(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }

    pub fn mul(&self, rhs: &UniRatFunc) -> Result<UniRatFunc> {
        UniRatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }

    pub fn div(&self, rhs: &UniRatFunc) -> Result<UniRatFunc> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        UniRatFunc::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn neg(&self) -> UniRatFunc {
        UniRatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, c: &FieldElem) -> Result<UniRatFunc> {
        UniRatFunc::new(self.num.scale(c), self.den.clone())
    }

    pub fn derivative(&self) -> Result<UniRatFunc> {
        UniRatFunc::new(
            &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative()),
            &self.den * &self.den,
        )
    }

    pub fn pow(&self, e: u32) -> Result<UniRatFunc> {
        Ok(UniRatFunc {
            num: self.num.pow(e),
            den: self.den.pow(e),
        })
    }

    /// f(g(z)) for rational g.
    pub fn compose(&self, g: &UniRatFunc) -> Result<UniRatFunc> {
        let tag = self.tag();
        let eval_poly = |p: &ZPoly| -> Result<UniRatFunc> {
            let mut acc = UniRatFunc::zero(tag);
            for c in p.coeffs().iter().rev() {
                acc = acc.mul(g)?.add(&UniRatFunc::constant(c.clone()))?;
            }
            Ok(acc)
        };
        eval_poly(&self.num)?.div(&eval_poly(&self.den)?)
    }
}

impl fmt::Display for UniRatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_poly() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}
impl fmt::Debug for UniRatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ---------------------------------------------------------------------------
// Root finding by linear-factor extraction
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootReport {
    pub roots: Vec<(FieldElem, usize)>,
    /// Degree of the unfactored remainder (0 when the polynomial split
    /// completely over the field).
    pub unfactored_degree: usize,
}

/// Roots of `poly` expressible in its coefficient field, with multiplicity.
pub fn roots_in_field(poly: &ZPoly) -> RootReport {
    assert!(!poly.is_zero(), "roots of the zero polynomial");
    let tag = poly.tag();
    let mut rem = poly.clone();
    let mut roots: Vec<(FieldElem, usize)> = vec![];

    let candidates: Vec<FieldElem> = candidate_constants(&rem)
        .into_iter()
        .map(|r| FieldElem::from_rational(tag, r))
        .collect();

    for c in candidates {
        if rem.is_constant() {
            break;
        }
        if !rem.eval(&c).is_zero() {
            continue;
        }
        let lin = ZPoly::new(tag, vec![-&c, FieldElem::one(tag)]);
        let mut mult = 0usize;
        loop {
            match rem.div_rem(&lin) {
                Ok((q, r)) if r.is_zero() => {
                    rem = q;
                    mult += 1;
                }
                _ => break,
            }
        }
        if mult > 0 {
            roots.push((c, mult));
        }
    }

    // A degree-one leftover solves exactly, possibly to a non-constant
    // element of the field.
    if rem.degree() == 1 && !rem.is_constant() {
        if let Ok(r) = (-&rem.coeff(0)).try_div(&rem.coeff(1)) {
            if let Some(entry) = roots.iter_mut().find(|(x, _)| *x == r) {
                entry.1 += 1;
            } else {
                roots.push((r, 1));
            }
            rem = ZPoly::one(tag);
        }
    }

    roots.sort_by_key(|(r, _)| format!("{r:?}"));
    RootReport {
        roots,
        unfactored_degree: if rem.is_constant() { 0 } else { rem.degree() },
    }
}

/// Constant (rational) root candidates. Over ℚ this is the rational-root
/// theorem; over ℚ(u)/ℚ\[p\] the polynomial is specialized at a few rational
/// parameter values and the candidate sets intersected. Verification is
/// exact either way, so the candidate search only affects completeness.
fn candidate_constants(poly: &ZPoly) -> Vec<Rational> {
    match poly.tag() {
        FieldTag::Q => {
            let coeffs: Vec<Rational> = poly
                .coeffs()
                .iter()
                .map(|c| c.as_rational().expect("Q coefficients"))
                .collect();
            rational_root_candidates(&coeffs)
        }
        FieldTag::Qu | FieldTag::Qp => {
            let mut sets: Vec<Vec<Rational>> = vec![];
            for sample in [2i64, 3, 5] {
                let s = Rational::from_int(sample);
                let Some(coeffs) = specialize(poly, &s) else {
                    continue;
                };
                if coeffs.iter().all(Rational::is_zero) {
                    continue;
                }
                sets.push(rational_root_candidates(&coeffs));
            }
            match sets.split_first() {
                None => vec![],
                Some((first, rest)) => first
                    .iter()
                    .filter(|c| rest.iter().all(|s| s.contains(c)))
                    .cloned()
                    .collect(),
            }
        }
    }
}

fn specialize(poly: &ZPoly, at: &Rational) -> Option<Vec<Rational>> {
    let mut out = vec![];
    for c in poly.coeffs() {
        let r = match c {
            FieldElem::Q(r) => r.clone(),
            FieldElem::Qp(p) => p.eval(at),
            FieldElem::Qu(r) => {
                let d = r.den().eval(at);
                if d.is_zero() {
                    return None;
                }
                &r.num().eval(at) * &d.recip().ok()?
            }
        };
        out.push(r);
    }
    Some(out)
}

fn rational_root_candidates(coeffs: &[Rational]) -> Vec<Rational> {
    let mut lo = 0;
    while lo < coeffs.len() && coeffs[lo].is_zero() {
        lo += 1;
    }
    if lo == coeffs.len() {
        return vec![];
    }
    let body = &coeffs[lo..];
    let mut lcm = BigInt::one();
    for c in body {
        lcm = num_integer::lcm(lcm, c.denominator().clone());
    }
    let ints: Vec<BigInt> = body
        .iter()
        .map(|c| c.numerator() * (&lcm / c.denominator()))
        .collect();
    let a0 = ints.first().cloned().unwrap_or_else(BigInt::zero);
    let ad = ints.last().cloned().unwrap_or_else(BigInt::zero);
    let mut out = vec![Rational::zero()];
    for p in divisors(&a0.abs()) {
        for q in divisors(&ad.abs()) {
            let r = Rational::new(p.clone(), q.clone()).expect("q > 0");
            out.push(r.clone());
            out.push(-&r);
        }
    }
    out.sort_by(|a, b| (a.numerator(), a.denominator()).cmp(&(b.numerator(), b.denominator())));
    out.dedup();
    out
}

/// All positive divisors, via trial-division factoring. Cofactors beyond
/// the trial bound are kept as single factors, so extremely large prime
/// pairs can hide candidates; exactness is unaffected.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    if n.is_zero() {
        return vec![];
    }
    let mut n = n.clone();
    let mut primes: Vec<(BigInt, u32)> = vec![];
    let mut d = BigInt::from(2);
    let bound = BigInt::from(1_000_000u64);
    while &d * &d <= n && d <= bound {
        let mut e = 0;
        while (&n % &d).is_zero() {
            n /= &d;
            e += 1;
        }
        if e > 0 {
            primes.push((d.clone(), e));
        }
        d += 1;
    }
    if n > BigInt::one() {
        primes.push((n, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in primes {
        let mut next = vec![];
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs.dedup();
    divs
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

pub fn zpoly_to_json(p: &ZPoly) -> Value {
    Value::Array(p.coeffs().iter().map(field_elem_to_json).collect())
}

pub fn zpoly_from_json(tag: FieldTag, v: &Value) -> Result<ZPoly> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("expected coefficient array, got {v}")))?;
    Ok(ZPoly::new(
        tag,
        arr.iter()
            .map(|c| field_elem_from_json(tag, c))
            .collect::<Result<_>>()?,
    ))
}

pub fn ratfunc_to_json(f: &UniRatFunc) -> Value {
    serde_json::json!({
        "num": zpoly_to_json(f.num()),
        "den": zpoly_to_json(f.den()),
    })
}

pub fn ratfunc_from_json(tag: FieldTag, v: &Value) -> Result<UniRatFunc> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse(format!("expected {{num, den}}, got {v}")))?;
    let num = obj
        .get("num")
        .ok_or_else(|| Error::Parse("missing \"num\"".into()))?;
    let num = zpoly_from_json(tag, num)?;
    let den = match obj.get("den") {
        Some(d) => zpoly_from_json(tag, d)?,
        None => ZPoly::one(tag),
    };
    UniRatFunc::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zq(ints: &[i64]) -> ZPoly {
        ZPoly::from_ints(FieldTag::Q, ints)
    }

    #[test]
    fn eval_z_plus_inv_z() {
        // f = z + 1/z at z0 = 2 -> 5/2
        let f = UniRatFunc::new(zq(&[1, 0, 1]), zq(&[0, 1])).unwrap();
        assert_eq!(
            f.eval(&FieldElem::from_int(FieldTag::Q, 2)).unwrap(),
            FieldElem::Q(Rational::ratio(5, 2))
        );
        // 1/(z-1) at z0 = 1 -> pole
        let g = UniRatFunc::new(zq(&[1]), zq(&[-1, 1])).unwrap();
        assert_eq!(
            g.eval(&FieldElem::from_int(FieldTag::Q, 1)),
            Err(Error::PoleAtPoint)
        );
    }

    #[test]
    fn eval_formal_parameter_curve() {
        // f = u*(z + 1/z) over Q(u) at z0 = 1 -> 2u
        let u = FieldElem::param(FieldTag::Qu).unwrap();
        let num = ZPoly::new(
            FieldTag::Qu,
            vec![u.clone(), FieldElem::zero(FieldTag::Qu), u.clone()],
        );
        let f = UniRatFunc::new(num, ZPoly::gen(FieldTag::Qu)).unwrap();
        assert_eq!(
            f.eval(&FieldElem::one(FieldTag::Qu)).unwrap(),
            u.scale_int(2)
        );
    }

    #[test]
    fn roots_over_q() {
        // z^2 - 1 -> {1, -1}, remainder 0
        let rep = roots_in_field(&zq(&[-1, 0, 1]));
        assert_eq!(rep.unfactored_degree, 0);
        let mut roots: Vec<String> = rep
            .roots
            .iter()
            .map(|(r, m)| {
                assert_eq!(*m, 1);
                r.to_string()
            })
            .collect();
        roots.sort();
        assert_eq!(roots, vec!["-1", "1"]);

        // z^2 - 2 -> no rational roots, remainder degree 2
        let rep = roots_in_field(&zq(&[-2, 0, 1]));
        assert!(rep.roots.is_empty());
        assert_eq!(rep.unfactored_degree, 2);
    }

    #[test]
    fn roots_over_qu() {
        // numerator of d/dz [u(z + 1/z)]: u z^2 - u, roots ±1 over Q(u)
        let u = FieldElem::param(FieldTag::Qu).unwrap();
        let p = ZPoly::new(
            FieldTag::Qu,
            vec![-&u, FieldElem::zero(FieldTag::Qu), u.clone()],
        );
        let rep = roots_in_field(&p);
        assert_eq!(rep.unfactored_degree, 0);
        assert_eq!(rep.roots.len(), 2);
        for (r, m) in &rep.roots {
            assert_eq!(*m, 1);
            assert!(p.eval(r).is_zero());
        }
    }

    #[test]
    fn root_multiplicity_matches_repeated_division() {
        // z^3 (z + 5): zero has multiplicity 3
        let f = &zq(&[0, 1]).pow(3) * &zq(&[5, 1]);
        let rep = roots_in_field(&f);
        let zero_mult = rep
            .roots
            .iter()
            .find(|(r, _)| r.is_zero())
            .map(|(_, m)| *m);
        assert_eq!(zero_mult, Some(3));
        assert_eq!(rep.unfactored_degree, 0);
    }

    #[test]
    fn compose_moebius() {
        // f(z) = z^2, g(z) = (z+1)/(z-1): f∘g = (z+1)^2/(z-1)^2
        let f = UniRatFunc::from_poly(zq(&[0, 0, 1]));
        let g = UniRatFunc::new(zq(&[1, 1]), zq(&[-1, 1])).unwrap();
        let h = f.compose(&g).unwrap();
        let expect = UniRatFunc::new(
            &zq(&[1, 1]) * &zq(&[1, 1]),
            &zq(&[-1, 1]) * &zq(&[-1, 1]),
        )
        .unwrap();
        assert_eq!(h, expect);
    }

    #[test]
    fn shift_and_scale_var() {
        // p(z) = z^2 - 1: p(z+1) = z^2 + 2z, p(2z) = 4z^2 - 1
        let p = zq(&[-1, 0, 1]);
        assert_eq!(p.shift_var(&FieldElem::from_int(FieldTag::Q, 1)), zq(&[0, 2, 1]));
        assert_eq!(p.scale_var(&FieldElem::from_int(FieldTag::Q, 2)), zq(&[-1, 0, 4]));
    }
}
