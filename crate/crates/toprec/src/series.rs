//! Truncated Laurent series with tracked validity windows.
//!
//! Every series knows through which exponent its coefficients are trusted
//! (`valid`). Arithmetic recomputes the window; reading past it is an
//! error, never a silent zero. Exact series (finite Laurent polynomials,
//! e.g. shifted numerators) carry a sentinel window so they never limit a
//! product. Truncation bugs in residue calculus then surface as
//! `WindowExceeded` instead of wrong rationals.

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldTag};
use crate::ratfunc::UniRatFunc;
use std::fmt;

/// Sentinel validity for exact series: all unstored coefficients are zero.
pub const EXACT: i64 = i64::MAX / 4;

fn sat(v: i64) -> i64 {
    v.min(EXACT)
}

#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    tag: FieldTag,
    center: FieldElem,
    /// Lowest exponent with a possibly nonzero coefficient. For a series
    /// that is zero through its window this is `valid + 1`.
    lo: i64,
    /// `coeffs[i]` is the coefficient of `s^(lo + i)`.
    coeffs: Vec<FieldElem>,
    /// Coefficients are trusted for exponents `<= valid`.
    valid: i64,
}

impl LaurentSeries {
    pub fn new(
        tag: FieldTag,
        center: FieldElem,
        lo: i64,
        mut coeffs: Vec<FieldElem>,
        valid: i64,
    ) -> Self {
        if valid < EXACT {
            let keep = (valid - lo + 1).max(0) as usize;
            coeffs.truncate(keep);
        }
        let mut lo = lo;
        while coeffs.first().is_some_and(FieldElem::is_zero) {
            coeffs.remove(0);
            lo += 1;
        }
        while coeffs.last().is_some_and(FieldElem::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            lo = sat(valid.saturating_add(1));
        }
        LaurentSeries {
            tag,
            center,
            lo,
            coeffs,
            valid,
        }
    }

    pub fn zero_through(tag: FieldTag, center: FieldElem, valid: i64) -> Self {
        Self::new(tag, center, sat(valid.saturating_add(1)), vec![], valid)
    }

    /// An exact monomial c·s^e.
    pub fn monomial(center: FieldElem, c: FieldElem, e: i64) -> Self {
        let tag = c.tag();
        Self::new(tag, center, e, vec![c], EXACT)
    }

    pub fn constant(_tag: FieldTag, center: FieldElem, c: FieldElem) -> Self {
        Self::monomial(center, c, 0)
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn center(&self) -> &FieldElem {
        &self.center
    }

    pub fn lowest(&self) -> i64 {
        self.lo
    }

    pub fn valid_order(&self) -> i64 {
        self.valid
    }

    pub fn is_exact(&self) -> bool {
        self.valid >= EXACT
    }

    /// Zero through the whole trusted window.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `s^e`. Reading beyond the window is an error.
    pub fn coefficient(&self, e: i64) -> Result<FieldElem> {
        if e > self.valid {
            return Err(Error::WindowExceeded {
                needed: e,
                valid: self.valid,
            });
        }
        let idx = e - self.lo;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Ok(FieldElem::zero(self.tag))
        } else {
            Ok(self.coeffs[idx as usize].clone())
        }
    }

    /// Coefficient of `s^{-1}`.
    pub fn residue(&self) -> Result<FieldElem> {
        self.coefficient(-1)
    }

    pub fn truncate_to(&self, valid: i64) -> Self {
        let valid = valid.min(self.valid);
        Self::new(
            self.tag,
            self.center.clone(),
            self.lo,
            self.coeffs.clone(),
            valid,
        )
    }

    pub fn neg(&self) -> Self {
        LaurentSeries {
            tag: self.tag,
            center: self.center.clone(),
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            valid: self.valid,
        }
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        if c.is_zero() {
            return Self::zero_through(self.tag, self.center.clone(), self.valid);
        }
        LaurentSeries {
            tag: self.tag,
            center: self.center.clone(),
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
            valid: self.valid,
        }
    }

    /// Multiplies by the exact monomial s^e.
    pub fn shift(&self, e: i64) -> Self {
        LaurentSeries {
            tag: self.tag,
            center: self.center.clone(),
            lo: sat(self.lo.saturating_add(e)),
            coeffs: self.coeffs.clone(),
            valid: sat(self.valid.saturating_add(e)),
        }
    }

    fn stored(&self, e: i64) -> FieldElem {
        let idx = e - self.lo;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            FieldElem::zero(self.tag)
        } else {
            self.coeffs[idx as usize].clone()
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.tag, rhs.tag);
        let valid = self.valid.min(rhs.valid);
        let lo = self.lo.min(rhs.lo);
        if lo > valid {
            return Self::zero_through(self.tag, self.center.clone(), valid);
        }
        // A zero series has no stored top; its sentinel lo must not widen
        // the allocation window.
        let top = |s: &Self| -> i64 {
            if s.coeffs.is_empty() {
                i64::MIN / 4
            } else {
                s.lo + s.coeffs.len() as i64 - 1
            }
        };
        let hi = valid.min(top(self).max(top(rhs)));
        if hi < lo {
            return Self::zero_through(self.tag, self.center.clone(), valid);
        }
        let mut coeffs = Vec::with_capacity((hi - lo + 1) as usize);
        for e in lo..=hi {
            coeffs.push(&self.stored(e) + &rhs.stored(e));
        }
        Self::new(self.tag, self.center.clone(), lo, coeffs, valid)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.tag, rhs.tag);
        // First unknown coefficient of the product pairs an unknown factor
        // coefficient with the other factor's lowest stored term.
        let valid = sat(self.valid.saturating_add(rhs.lo))
            .min(sat(rhs.valid.saturating_add(self.lo)));
        if self.is_zero() || rhs.is_zero() {
            return Self::zero_through(self.tag, self.center.clone(), valid);
        }
        let lo = self.lo + rhs.lo;
        let hi = valid
            .min(self.lo + self.coeffs.len() as i64 - 1 + rhs.lo + rhs.coeffs.len() as i64 - 1);
        if hi < lo {
            return Self::zero_through(self.tag, self.center.clone(), valid);
        }
        let mut coeffs = vec![FieldElem::zero(self.tag); (hi - lo + 1) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ea = self.lo + i as i64;
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let e = ea + rhs.lo + j as i64;
                if e > hi {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                let idx = (e - lo) as usize;
                coeffs[idx] = &coeffs[idx] + &(a * b);
            }
        }
        Self::new(self.tag, self.center.clone(), lo, coeffs, valid)
    }

    /// Multiplicative inverse to relative depth `rel_order` (bounded by the
    /// input's own window). The leading coefficient must be a unit.
    pub fn invert(&self, rel_order: i64) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let lead_inv = self.coeffs[0].recip()?;
        let depth = if self.is_exact() {
            rel_order
        } else {
            rel_order.min(self.valid - self.lo)
        };
        if depth < 0 {
            return Err(Error::WindowExceeded {
                needed: self.lo,
                valid: self.valid,
            });
        }
        let rel = |k: i64| -> FieldElem { self.stored(self.lo + k) };
        let mut g = vec![FieldElem::zero(self.tag); depth as usize + 1];
        g[0] = lead_inv.clone();
        for m in 1..=depth {
            let mut acc = FieldElem::zero(self.tag);
            for j in 1..=m {
                let e = rel(j);
                if e.is_zero() {
                    continue;
                }
                acc = &acc + &(&e * &g[(m - j) as usize]);
            }
            g[m as usize] = &(-&acc) * &lead_inv;
        }
        Ok(Self::new(
            self.tag,
            self.center.clone(),
            -self.lo,
            g,
            -self.lo + depth,
        ))
    }

    pub fn div(&self, rhs: &Self, rel_order: i64) -> Result<Self> {
        Ok(self.mul(&rhs.invert(rel_order)?))
    }

    pub fn powi(&self, e: i64, rel_order: i64) -> Result<Self> {
        let base = if e < 0 {
            self.invert(rel_order)?
        } else {
            self.clone()
        };
        let mut acc = Self::constant(self.tag, self.center.clone(), FieldElem::one(self.tag));
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Substitutes `inner` (vanishing at 0) for the series variable.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        assert!(
            inner.is_zero() || inner.lo >= 1,
            "composition requires a series vanishing at the center"
        );
        let center = self.center.clone();
        if self.is_zero() {
            return Ok(Self::zero_through(self.tag, center, self.valid));
        }
        let rel = if inner.is_exact() {
            if self.is_exact() {
                self.lo.abs() + self.coeffs.len() as i64 + 8
            } else {
                self.valid - self.lo + 8
            }
        } else {
            inner.valid - inner.lo + 1
        };
        let mut acc = Self::zero_through(self.tag, center.clone(), EXACT);
        let top = self.lo + self.coeffs.len() as i64 - 1;
        let mut pos_powers = vec![Self::constant(self.tag, center.clone(), FieldElem::one(self.tag))];
        for k in 1..=top.max(0) {
            let next = pos_powers[(k - 1) as usize].mul(inner);
            pos_powers.push(next);
        }
        let mut neg_powers: Vec<Self> = vec![];
        if self.lo < 0 {
            let inv = inner.invert(rel)?;
            let mut acc_inv = inv.clone();
            for _ in 1..=(-self.lo) {
                neg_powers.push(acc_inv.clone());
                acc_inv = acc_inv.mul(&inv);
            }
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.lo + i as i64;
            let term = if e >= 0 {
                pos_powers[e as usize].scale(c)
            } else {
                neg_powers[(-e - 1) as usize].scale(c)
            };
            acc = acc.add(&term);
        }
        if !self.is_exact() {
            let ord = inner.lo.max(1);
            acc = acc.truncate_to(sat((self.valid.saturating_add(1)).saturating_mul(ord) - 1));
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Self {
        let coeffs: Vec<FieldElem> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.scale_int(self.lo + i as i64))
            .collect();
        Self::new(
            self.tag,
            self.center.clone(),
            self.lo - 1,
            coeffs,
            sat(self.valid.saturating_sub(1)),
        )
    }

    /// Termwise antiderivative with constant 0. A nonzero s^{-1} term has
    /// no Laurent antiderivative and signals an engine bug upstream.
    pub fn antiderivative(&self) -> Result<Self> {
        if self.lo <= -1 && -1 <= self.valid && !self.stored(-1).is_zero() {
            return Err(Error::ResiduePresent);
        }
        let mut coeffs = vec![];
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = self.lo + i as i64;
            if e == -1 {
                coeffs.push(FieldElem::zero(self.tag));
                continue;
            }
            coeffs.push(c.try_div(&FieldElem::from_int(self.tag, e + 1))?);
        }
        Ok(Self::new(
            self.tag,
            self.center.clone(),
            self.lo + 1,
            coeffs,
            sat(self.valid.saturating_add(1)),
        ))
    }

    /// -ln(1 - f) = Σ_{k>=1} f^k / k for a series with f(0) = 0.
    pub fn neg_log_one_minus(&self) -> Result<Self> {
        assert!(
            self.is_zero() || self.lo >= 1,
            "needs a series vanishing at 0"
        );
        let valid = self.valid.min(EXACT - 1);
        let mut acc = Self::zero_through(self.tag, self.center.clone(), valid);
        let mut power = self.clone();
        let mut k = 1i64;
        while !power.is_zero() && power.lo <= valid {
            let inv_k = FieldElem::one(self.tag).try_div(&FieldElem::from_int(self.tag, k))?;
            acc = acc.add(&power.scale(&inv_k).truncate_to(valid));
            power = power.mul(self).truncate_to(valid);
            k += 1;
        }
        Ok(acc.truncate_to(valid))
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            if self.is_exact() {
                return write!(f, "0");
            }
            return write!(f, "O(s^{})", self.valid + 1);
        }
        let mut parts = vec![];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.lo + i as i64;
            let cs = c.to_string();
            let coeff = if cs.contains(['+', '-', ' ']) {
                format!("({cs})")
            } else {
                cs
            };
            parts.push(match e {
                0 => coeff,
                1 if c.is_one() => "s".into(),
                1 => format!("{coeff}*s"),
                _ if c.is_one() => format!("s^{e}"),
                _ => format!("{coeff}*s^{e}"),
            });
        }
        let body = parts.join(" + ").replace("+ -", "- ");
        if self.is_exact() {
            write!(f, "{body}")
        } else {
            write!(f, "{body} + O(s^{})", self.valid + 1)
        }
    }
}
impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Substitutes a power series for the squared formal parameter: `v` must
/// be an element of ℚ(u) even under u → -u; it is rewritten as a rational
/// function of u² and composed with `sq` (a series in t with no constant
/// term). Odd elements are rejected, never truncated.
pub fn series_substitute_even(
    v: &FieldElem,
    sq: &LaurentSeries,
    order: i64,
) -> Result<LaurentSeries> {
    use crate::field::{RatU, UPoly};
    let ratu: RatU = match v {
        FieldElem::Qu(r) => r.clone(),
        FieldElem::Q(r) => RatU::from_poly(UPoly::constant(r.clone())),
        FieldElem::Qp(_) => return Err(Error::FieldMismatch),
    };
    // Make the denominator even: multiply through by its conjugate.
    let (de, dobj) = ratu.den().even_odd_split();
    let conj = &de.inflate_square() - &(&UPoly::gen() * &dobj.inflate_square());
    let num = ratu.num() * &conj;
    let (ne, no) = num.even_odd_split();
    if !no.is_zero() {
        return Err(Error::OddParity);
    }
    // Denominator in w = u²: De(w)² - w·Do(w)².
    let dw = &(&de * &de) - &(&UPoly::gen() * &(&dobj * &dobj));
    let tag = sq.tag();
    let center = sq.center().clone();
    let as_series = |p: &UPoly| -> LaurentSeries {
        LaurentSeries::new(
            tag,
            center.clone(),
            0,
            p.coeffs()
                .iter()
                .map(|c| FieldElem::from_rational(tag, c.clone()))
                .collect(),
            EXACT,
        )
    };
    let a = as_series(&ne).compose(sq)?;
    let b = as_series(&dw).compose(sq)?;
    let rel = order - a.lowest().min(0) + b.lowest().abs() + 4;
    Ok(a.div(&b, rel)?.truncate_to(order))
}

/// Exact Laurent expansion of a rational function about `center`, trusted
/// through `order`.
pub fn laurent_expand(f: &UniRatFunc, center: &FieldElem, order: i64) -> Result<LaurentSeries> {
    let tag = f.tag();
    if f.is_zero() {
        return Ok(LaurentSeries::zero_through(tag, center.clone(), EXACT - 1));
    }
    let num = f.num().shift_var(center);
    let den = f.den().shift_var(center);
    let mut k = 0usize;
    while den.coeff(k).is_zero() {
        k += 1;
    }
    let unit_coeffs: Vec<FieldElem> = (k..=den.degree()).map(|i| den.coeff(i)).collect();
    let unit = LaurentSeries::new(tag, center.clone(), 0, unit_coeffs, EXACT);
    let num_series = LaurentSeries::new(tag, center.clone(), 0, num.coeffs().to_vec(), EXACT);
    let lead = num_series.lowest();
    let depth = (order + k as i64 - lead + 2).max(2);
    let inv = unit.invert(depth)?;
    Ok(num_series.mul(&inv).shift(-(k as i64)).truncate_to(order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;
    use crate::ratfunc::ZPoly;

    fn q(n: i64, d: i64) -> FieldElem {
        FieldElem::Q(Rational::ratio(n, d))
    }

    fn zq(ints: &[i64]) -> ZPoly {
        ZPoly::from_ints(FieldTag::Q, ints)
    }

    fn rf(num: &[i64], den: &[i64]) -> UniRatFunc {
        UniRatFunc::new(zq(num), zq(den)).unwrap()
    }

    #[test]
    fn expand_double_pole() {
        // 1/(z-1)^2 at center 1 -> s^{-2}
        let f = rf(&[1], &[1, -2, 1]);
        let s = laurent_expand(&f, &q(1, 1), 2).unwrap();
        assert_eq!(s.coefficient(-2).unwrap(), q(1, 1));
        assert_eq!(s.coefficient(0).unwrap(), q(0, 1));
        assert_eq!(s.coefficient(2).unwrap(), q(0, 1));
    }

    #[test]
    fn expand_inverse_z_at_one() {
        // 1/z at center 1 -> 1 - s + s^2
        let f = rf(&[1], &[0, 1]);
        let s = laurent_expand(&f, &q(1, 1), 2).unwrap();
        for (e, v) in [(0, 1), (1, -1), (2, 1)] {
            assert_eq!(s.coefficient(e).unwrap(), q(v, 1));
        }
        assert!(s.coefficient(3).is_err());
    }

    #[test]
    fn expand_z_plus_inverse() {
        // z + 1/z at center 1, order 3 -> 2 + s^2 - s^3
        let f = rf(&[1, 0, 1], &[0, 1]);
        let s = laurent_expand(&f, &q(1, 1), 3).unwrap();
        assert_eq!(s.coefficient(0).unwrap(), q(2, 1));
        assert_eq!(s.coefficient(1).unwrap(), q(0, 1));
        assert_eq!(s.coefficient(2).unwrap(), q(1, 1));
        assert_eq!(s.coefficient(3).unwrap(), q(-1, 1));
    }

    #[test]
    fn window_tracking_through_arithmetic() {
        let center = q(0, 1);
        let f = LaurentSeries::new(FieldTag::Q, center.clone(), 0, vec![q(1, 1); 4], 3);
        let g = LaurentSeries::new(FieldTag::Q, center.clone(), -2, vec![q(1, 1)], EXACT);
        let prod = f.mul(&g);
        assert_eq!(prod.valid_order(), 1);
        assert!(prod.coefficient(1).is_ok());
        assert_eq!(
            prod.coefficient(2),
            Err(Error::WindowExceeded { needed: 2, valid: 1 })
        );
    }

    #[test]
    fn inversion_against_long_division() {
        // 1/(1+s) = 1 - s + s^2 - s^3 ...
        let center = q(0, 1);
        let f = LaurentSeries::new(FieldTag::Q, center, 0, vec![q(1, 1), q(1, 1)], EXACT);
        let inv = f.invert(4).unwrap();
        for e in 0..=4 {
            assert_eq!(
                inv.coefficient(e).unwrap(),
                q(if e % 2 == 0 { 1 } else { -1 }, 1)
            );
        }
    }

    #[test]
    fn compose_with_involution_like_series() {
        // 1/s composed with sigma = -s + s^2: 1/(-s+s^2) = -1/s - 1 - s - ...
        let center = q(0, 1);
        let f = LaurentSeries::monomial(center.clone(), q(1, 1), -1);
        let sigma = LaurentSeries::new(FieldTag::Q, center, 1, vec![q(-1, 1), q(1, 1)], 6);
        let comp = f.compose(&sigma).unwrap();
        assert_eq!(comp.coefficient(-1).unwrap(), q(-1, 1));
        assert_eq!(comp.coefficient(0).unwrap(), q(-1, 1));
        assert_eq!(comp.coefficient(1).unwrap(), q(-1, 1));
    }

    #[test]
    fn antiderivative_blocks_residue() {
        let center = q(0, 1);
        let f = LaurentSeries::monomial(center.clone(), q(3, 1), -1);
        assert_eq!(f.antiderivative(), Err(Error::ResiduePresent));
        let g = LaurentSeries::monomial(center, q(4, 1), -3);
        let anti = g.antiderivative().unwrap();
        assert_eq!(anti.coefficient(-2).unwrap(), q(-2, 1));
    }

    #[test]
    fn expansion_coefficients_are_exact() {
        // 1/(z-2) at 0: coefficients -1/2^{e+1}
        let f = rf(&[1], &[-2, 1]);
        let s = laurent_expand(&f, &q(0, 1), 8).unwrap();
        for e in 0..=8 {
            assert_eq!(
                s.coefficient(e).unwrap(),
                FieldElem::Q(-Rational::ratio(1, 2).pow(e as u32 + 1))
            );
        }
    }

    #[test]
    fn log_series() {
        // -ln(1 - s) = s + s^2/2 + s^3/3 + ...
        let center = q(0, 1);
        let f = LaurentSeries::new(FieldTag::Q, center, 1, vec![q(1, 1)], 5);
        let l = f.neg_log_one_minus().unwrap();
        for e in 1..=5 {
            assert_eq!(l.coefficient(e).unwrap(), q(1, e));
        }
    }
}
