//! Canonical pole-basis representation of the stable correlator forms.
//!
//! A stable `ω_n^(g)` on a genus-zero curve decays at infinity and has
//! poles only at branchpoints with no residues, so it is a finite sum
//!
//! ```text
//!   Σ  c · ∏ᵢ dzᵢ/(zᵢ - a_{jᵢ})^{kᵢ}        (kᵢ ≥ 2)
//! ```
//!
//! stored as a map from per-slot pole assignments to exact coefficients.
//! Addition, symmetrization, local expansion, residue extraction and
//! interval integration are all termwise in this basis. The unstable
//! (0,1) and (0,2) entries are carried by dedicated markers, never here.

use crate::error::{Error, Result};
use crate::field::{field_elem_from_json, field_elem_to_json, FieldElem, FieldTag, Rational};
use crate::ratfunc::{UniRatFunc, ZPoly};
use crate::series::LaurentSeries;
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt;

/// One pole assignment per variable slot: (branchpoint index, order).
pub type PoleKey = Vec<(usize, u32)>;

/// Unstable correlators are markers over the curve data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnstableForm {
    /// ω_1^(0) = -y dx.
    OneZero,
    /// ω_2^(0) = B(z₁,z₂) = dz₁dz₂/(z₁-z₂)².
    Bergman,
}

// ---------------------------------------------------------------------------
// Term maps
// ---------------------------------------------------------------------------

/// Bare term map over a fixed number of slots (a PoleForm without the (g,n)
/// bookkeeping); the engine's intermediate bracket coefficients live here.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Terms(pub BTreeMap<PoleKey, FieldElem>);

impl Terms {
    pub fn zero() -> Self {
        Terms(BTreeMap::new())
    }

    pub fn singleton(key: PoleKey, coeff: FieldElem) -> Self {
        let mut m = BTreeMap::new();
        if !coeff.is_zero() {
            m.insert(key, coeff);
        }
        Terms(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn insert_add(&mut self, key: PoleKey, coeff: FieldElem) {
        if coeff.is_zero() {
            return;
        }
        match self.0.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = &*o.get() + &coeff;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, rhs: &Terms) -> Terms {
        let mut out = self.clone();
        for (k, c) in &rhs.0 {
            out.insert_add(k.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &FieldElem) -> Terms {
        if c.is_zero() {
            return Terms::zero();
        }
        Terms(self.0.iter().map(|(k, v)| (k.clone(), v * c)).collect())
    }

    /// Tensor product with slot embedding: `self`'s slot i lands at
    /// `pos_self[i]`, `rhs`'s slot j at `pos_rhs[j]`, in a result with
    /// `total` slots. The position lists must be disjoint and cover all
    /// result slots.
    pub fn tensor(
        &self,
        rhs: &Terms,
        pos_self: &[usize],
        pos_rhs: &[usize],
        total: usize,
    ) -> Terms {
        let mut out = Terms::zero();
        for (ka, ca) in &self.0 {
            for (kb, cb) in &rhs.0 {
                let mut key: PoleKey = vec![(0, 0); total];
                for (i, &p) in pos_self.iter().enumerate() {
                    key[p] = ka[i];
                }
                for (j, &p) in pos_rhs.iter().enumerate() {
                    key[p] = kb[j];
                }
                out.insert_add(key, ca * cb);
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// PoleForm
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq)]
pub struct PoleForm {
    tag: FieldTag,
    g: u32,
    n: u32,
    terms: Terms,
}

impl PoleForm {
    pub fn new(tag: FieldTag, g: u32, n: u32, terms: Terms) -> Self {
        debug_assert!(2 * g as i64 - 2 + n as i64 > 0, "stable forms only");
        for key in terms.0.keys() {
            debug_assert_eq!(key.len(), n as usize);
            debug_assert!(key.iter().all(|&(_, k)| k >= 2), "no order-1 poles");
        }
        PoleForm { tag, g, n, terms }
    }

    pub fn zero(tag: FieldTag, g: u32, n: u32) -> Self {
        Self::new(tag, g, n, Terms::zero())
    }

    /// Convenience constructor from (slot assignments, coefficient) rows.
    pub fn from_rows(tag: FieldTag, g: u32, n: u32, rows: &[(&[(usize, u32)], FieldElem)]) -> Self {
        let mut terms = Terms::zero();
        for (key, coeff) in rows {
            terms.insert_add(key.to_vec(), coeff.clone());
        }
        Self::new(tag, g, n, terms)
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn terms(&self) -> &Terms {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    pub fn coeff(&self, key: &PoleKey) -> FieldElem {
        self.terms
            .0
            .get(key)
            .cloned()
            .unwrap_or_else(|| FieldElem::zero(self.tag))
    }

    pub fn add(&self, rhs: &PoleForm) -> PoleForm {
        assert_eq!((self.g, self.n), (rhs.g, rhs.n));
        PoleForm::new(self.tag, self.g, self.n, self.terms.add(&rhs.terms))
    }

    pub fn sub(&self, rhs: &PoleForm) -> PoleForm {
        self.add(&rhs.scale(&FieldElem::from_int(self.tag, -1)))
    }

    pub fn scale(&self, c: &FieldElem) -> PoleForm {
        PoleForm::new(self.tag, self.g, self.n, self.terms.scale(c))
    }

    pub fn max_pole_order(&self) -> u32 {
        self.terms
            .0
            .keys()
            .flat_map(|k| k.iter().map(|&(_, o)| o))
            .max()
            .unwrap_or(0)
    }

    /// The structural bound 6g - 4 + 2n on pole orders.
    pub fn order_bound(&self) -> u32 {
        (6 * self.g as i64 - 4 + 2 * self.n as i64) as u32
    }

    pub fn permute_slots(&self, perm: &[usize]) -> PoleForm {
        assert_eq!(perm.len(), self.n as usize);
        let mut terms = Terms::zero();
        for (key, c) in &self.terms.0 {
            let new_key: PoleKey = perm.iter().map(|&i| key[i]).collect();
            terms.insert_add(new_key, c.clone());
        }
        PoleForm::new(self.tag, self.g, self.n, terms)
    }

    /// Full permutation check for n ≤ 4, all transpositions beyond.
    pub fn is_symmetric(&self) -> bool {
        let n = self.n as usize;
        if n <= 1 {
            return true;
        }
        if n <= 4 {
            let mut perm: Vec<usize> = (0..n).collect();
            loop {
                if self.permute_slots(&perm) != *self {
                    return false;
                }
                if !next_permutation(&mut perm) {
                    break;
                }
            }
            true
        } else {
            for i in 0..n {
                for j in (i + 1)..n {
                    let mut perm: Vec<usize> = (0..n).collect();
                    perm.swap(i, j);
                    if self.permute_slots(&perm) != *self {
                        return false;
                    }
                }
            }
            true
        }
    }

    /// Checks the representation invariants: orders within [2, 6g-4+2n].
    pub fn validate_orders(&self) -> Result<()> {
        let bound = self.order_bound();
        for key in self.terms.0.keys() {
            for &(_, k) in key {
                if k < 2 {
                    return Err(Error::ResiduePresent);
                }
                if k > bound {
                    return Err(Error::IdentityFailed(format!(
                        "pole order {k} exceeds the bound {bound} for (g,n)=({},{})",
                        self.g, self.n
                    )));
                }
            }
        }
        Ok(())
    }

    /// Expands one slot as a Laurent series about branchpoint `bp` with the
    /// slot variable substituted by a + w(s); the result is a series whose
    /// coefficients are term maps over the remaining slots (in order). The
    /// substitution's dz = w'(s)ds density factor is included.
    pub fn expand_slot(
        &self,
        slot: usize,
        bp: usize,
        points: &[FieldElem],
        w: &LaurentSeries,
    ) -> Result<SeriesOfForms> {
        assert!((slot as u32) < self.n);
        let wprime = w.derivative();
        let mut out = SeriesOfForms::zero(self.tag, self.n as usize - 1, i64::MAX / 8);
        let mut groups: BTreeMap<(usize, u32), Terms> = BTreeMap::new();
        for (key, c) in &self.terms.0 {
            let mine = key[slot];
            let rest: PoleKey = key
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != slot)
                .map(|(_, &p)| p)
                .collect();
            groups
                .entry(mine)
                .or_insert_with(Terms::zero)
                .insert_add(rest, c.clone());
        }
        for ((j, k), rest) in groups {
            let base = expand_pole_monomial(j, k, bp, points, w)?;
            let series = base.mul(&wprime);
            out = out.add(&SeriesOfForms::from_scalar_series(
                &series,
                &rest,
                self.n as usize - 1,
            )?);
        }
        Ok(out)
    }

    /// Local expansion of one slot about branchpoint `bp` with the plain
    /// substitution z = a + s, windowed to `order`: monomials at the same
    /// branchpoint contribute principal parts, the others Taylor parts.
    pub fn local_expand(
        &self,
        slot: usize,
        bp: usize,
        points: &[FieldElem],
        order: i64,
    ) -> Result<SeriesOfForms> {
        let tag = self.tag;
        // The substitution itself is exact; only the report is windowed.
        let s_var = LaurentSeries::monomial(points[bp].clone(), FieldElem::one(tag), 1);
        Ok(self.expand_slot(slot, bp, points, &s_var)?.truncate_to(order))
    }

    /// Collects the form as rational functions of one slot: one row per
    /// assignment of the remaining slots (the dz of the chosen slot is
    /// stripped). For n = 1 use [`Self::to_ratfunc1`].
    pub fn to_ratfunc_with(
        &self,
        slot: usize,
        points: &[FieldElem],
    ) -> Result<Vec<(PoleKey, UniRatFunc)>> {
        assert!((slot as u32) < self.n);
        let mut groups: BTreeMap<PoleKey, Vec<((usize, u32), FieldElem)>> = BTreeMap::new();
        for (key, c) in &self.terms.0 {
            let mine = key[slot];
            let rest: PoleKey = key
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != slot)
                .map(|(_, &p)| p)
                .collect();
            groups.entry(rest).or_default().push((mine, c.clone()));
        }
        let mut out = vec![];
        for (rest, rows) in groups {
            let mut acc = UniRatFunc::zero(self.tag);
            for ((bp, k), c) in rows {
                let a = &points[bp];
                let lin = ZPoly::new(self.tag, vec![-a, FieldElem::one(self.tag)]);
                let mono = UniRatFunc::new(ZPoly::constant(c), lin.pow(k))?;
                acc = acc.add(&mono)?;
            }
            out.push((rest, acc));
        }
        Ok(out)
    }

    /// Density of a one-variable form as a plain rational function.
    pub fn to_ratfunc1(&self, points: &[FieldElem]) -> Result<UniRatFunc> {
        assert_eq!(self.n, 1);
        Ok(self
            .to_ratfunc_with(0, points)?
            .pop()
            .map(|(_, f)| f)
            .unwrap_or_else(|| UniRatFunc::zero(self.tag)))
    }
}

impl fmt::Debug for PoleForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "omega({},{})[", self.g, self.n)?;
        for (i, (key, c)) in self.terms.0.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for &(bp, k) in key.iter() {
                write!(f, " (a{bp};{k})")?;
            }
        }
        write!(f, "]")
    }
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// 1/(z - a_j)^k with z = a_i + w(s), as a Laurent series in s.
pub fn expand_pole_monomial(
    j: usize,
    k: u32,
    i: usize,
    points: &[FieldElem],
    w: &LaurentSeries,
) -> Result<LaurentSeries> {
    let tag = w.tag();
    let rel = if w.is_exact() {
        64
    } else {
        w.valid_order() - w.lowest() + 2
    };
    if j == i {
        w.powi(-(k as i64), rel)
    } else {
        let d = &points[i] - &points[j];
        let shifted = w.add(&LaurentSeries::constant(tag, w.center().clone(), d));
        shifted.powi(-(k as i64), rel)
    }
}

// ---------------------------------------------------------------------------
// Series with term-map coefficients
// ---------------------------------------------------------------------------

/// Laurent series in the local variable whose coefficients are term maps
/// over a fixed set of spectator slots.
#[derive(Clone, Debug)]
pub struct SeriesOfForms {
    tag: FieldTag,
    pub slots: usize,
    coeffs: BTreeMap<i64, Terms>,
    valid: i64,
}

impl SeriesOfForms {
    pub fn zero(tag: FieldTag, slots: usize, valid: i64) -> Self {
        SeriesOfForms {
            tag,
            slots,
            coeffs: BTreeMap::new(),
            valid,
        }
    }

    pub fn valid_order(&self) -> i64 {
        self.valid
    }

    pub fn lowest(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Lifts a scalar series to a series of forms with a fixed spectator
    /// term map.
    pub fn from_scalar_series(s: &LaurentSeries, spectator: &Terms, slots: usize) -> Result<Self> {
        let mut out = SeriesOfForms::zero(s.tag(), slots, s.valid_order());
        if spectator.is_zero() || s.is_zero() {
            return Ok(out);
        }
        let lo = s.lowest();
        let hi = s.valid_order().min(lo + 4096);
        for e in lo..=hi {
            let c = s.coefficient(e)?;
            if c.is_zero() {
                continue;
            }
            out.coeffs.insert(e, spectator.scale(&c));
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.slots, rhs.slots);
        let valid = self.valid.min(rhs.valid);
        let mut coeffs: BTreeMap<i64, Terms> = BTreeMap::new();
        for (e, t) in self.coeffs.iter().chain(rhs.coeffs.iter()) {
            if *e > valid {
                continue;
            }
            let entry = coeffs.entry(*e).or_insert_with(Terms::zero);
            *entry = entry.add(t);
        }
        coeffs.retain(|_, t: &mut Terms| !t.is_zero());
        SeriesOfForms {
            tag: self.tag,
            slots: self.slots,
            coeffs,
            valid,
        }
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        SeriesOfForms {
            tag: self.tag,
            slots: self.slots,
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, t)| (*e, t.scale(c)))
                .filter(|(_, t)| !t.is_zero())
                .collect(),
            valid: self.valid,
        }
    }

    /// Multiplies by a scalar Laurent series.
    pub fn mul_scalar_series(&self, s: &LaurentSeries) -> Result<Self> {
        let my_lo = self.lowest().unwrap_or_else(|| sat_add(self.valid, 1));
        let valid = sat_add(self.valid, s.lowest()).min(sat_add(s.valid_order(), my_lo));
        let mut out = SeriesOfForms::zero(self.tag, self.slots, valid);
        if self.coeffs.is_empty() || s.is_zero() {
            return Ok(out);
        }
        let s_hi = s.valid_order().min(s.lowest() + 4096);
        for (e1, t) in &self.coeffs {
            for e2 in s.lowest()..=s_hi {
                let e = e1 + e2;
                if e > valid {
                    break;
                }
                let c = s.coefficient(e2)?;
                if c.is_zero() {
                    continue;
                }
                let entry = out.coeffs.entry(e).or_insert_with(Terms::zero);
                *entry = entry.add(&t.scale(&c));
            }
        }
        out.coeffs.retain(|_, t| !t.is_zero());
        Ok(out)
    }

    /// Tensor product of two series of forms with slot embeddings.
    pub fn product(&self, rhs: &Self, pos_self: &[usize], pos_rhs: &[usize], total: usize) -> Self {
        let my_lo = self.lowest().unwrap_or_else(|| sat_add(self.valid, 1));
        let rhs_lo = rhs.lowest().unwrap_or_else(|| sat_add(rhs.valid, 1));
        let valid = sat_add(self.valid, rhs_lo).min(sat_add(rhs.valid, my_lo));
        let mut out = SeriesOfForms::zero(self.tag, total, valid);
        for (e1, t1) in &self.coeffs {
            for (e2, t2) in &rhs.coeffs {
                let e = e1 + e2;
                if e > valid {
                    continue;
                }
                let prod = t1.tensor(t2, pos_self, pos_rhs, total);
                if prod.is_zero() {
                    continue;
                }
                let entry = out.coeffs.entry(e).or_insert_with(Terms::zero);
                *entry = entry.add(&prod);
            }
        }
        out.coeffs.retain(|_, t| !t.is_zero());
        out
    }

    /// Coefficient of s^{-1}; reading past the window stays an error so
    /// truncation bugs surface loudly.
    pub fn residue(&self) -> Result<Terms> {
        self.coefficient(-1)
    }

    /// Residue of scalar(s)·self without materializing the product:
    /// Σ_e scalar(-1-e)·self(e). Windows must cover the full pairing.
    pub fn residue_against(&self, scalar: &LaurentSeries) -> Result<Terms> {
        let my_lo = self.lowest().unwrap_or_else(|| sat_add(self.valid, 1));
        // Unknown coefficients of self beyond its window must pair with
        // exact zeros of the scalar, and vice versa.
        if scalar.lowest() < -1 - self.valid {
            return Err(Error::WindowExceeded {
                needed: -1 - scalar.lowest(),
                valid: self.valid,
            });
        }
        if my_lo < -1 - scalar.valid_order() {
            return Err(Error::WindowExceeded {
                needed: -1 - my_lo,
                valid: scalar.valid_order(),
            });
        }
        let mut acc = Terms::zero();
        for (e, t) in &self.coeffs {
            let c = scalar.coefficient(-1 - e)?;
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&t.scale(&c));
        }
        Ok(acc)
    }

    pub fn coefficient(&self, e: i64) -> Result<Terms> {
        if e > self.valid {
            return Err(Error::WindowExceeded {
                needed: e,
                valid: self.valid,
            });
        }
        Ok(self.coeffs.get(&e).cloned().unwrap_or_else(Terms::zero))
    }

    pub fn truncate_to(&self, valid: i64) -> Self {
        let valid = valid.min(self.valid);
        SeriesOfForms {
            tag: self.tag,
            slots: self.slots,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(e, _)| **e <= valid)
                .map(|(e, t)| (*e, t.clone()))
                .collect(),
            valid,
        }
    }

    /// Expands spectator slot `slot` about branchpoint `bp` with the slot
    /// variable substituted by a + w(s) (density factor included).
    pub fn expand_slot(
        &self,
        slot: usize,
        bp: usize,
        points: &[FieldElem],
        w: &LaurentSeries,
    ) -> Result<Self> {
        let wprime = w.derivative();
        let mut out = SeriesOfForms::zero(self.tag, self.slots - 1, self.valid);
        for (e, terms) in &self.coeffs {
            let mut grouped: BTreeMap<(usize, u32), Terms> = BTreeMap::new();
            for (key, c) in &terms.0 {
                let mine = key[slot];
                let rest: PoleKey = key
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != slot)
                    .map(|(_, &p)| p)
                    .collect();
                grouped
                    .entry(mine)
                    .or_insert_with(Terms::zero)
                    .insert_add(rest, c.clone());
            }
            for ((j, k), rest) in grouped {
                let base = expand_pole_monomial(j, k, bp, points, w)?.mul(&wprime);
                let lifted = SeriesOfForms::from_scalar_series(&base, &rest, self.slots - 1)?;
                let mut shifted =
                    SeriesOfForms::zero(self.tag, lifted.slots, sat_add(lifted.valid, *e));
                for (e2, t) in lifted.coeffs {
                    shifted.coeffs.insert(e2 + e, t);
                }
                out = out.add(&shifted);
            }
        }
        Ok(out)
    }
}

fn sat_add(a: i64, b: i64) -> i64 {
    a.saturating_add(b).min(i64::MAX / 8)
}

// ---------------------------------------------------------------------------
// Interval integration
// ---------------------------------------------------------------------------

/// Exact iterated integral of a PoleForm with every slot integrated between
/// the same symbolic endpoints: each factor dz/(z-a)^k contributes
/// (1/(k-1)) [ (z₂-a)^{-(k-1)} - (z₁-a)^{-(k-1)} ].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegratedForm {
    tag: FieldTag,
    /// (coefficient, per-slot (branchpoint value, k-1) factors).
    pub terms: Vec<(FieldElem, Vec<(FieldElem, u32)>)>,
}

impl IntegratedForm {
    /// Exact evaluation at rational endpoints.
    pub fn eval(&self, z1: &FieldElem, z2: &FieldElem) -> Result<FieldElem> {
        let mut acc = FieldElem::zero(self.tag);
        for (c, factors) in &self.terms {
            let mut prod = c.clone();
            for (a, km1) in factors {
                let f2 = FieldElem::one(self.tag).try_div(&(z2 - a).pow(*km1))?;
                let f1 = FieldElem::one(self.tag).try_div(&(z1 - a).pow(*km1))?;
                prod = &prod * &(&f2 - &f1);
            }
            acc = &acc + &prod;
        }
        Ok(acc)
    }
}

impl fmt::Display for IntegratedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, factors)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (a, km1) in factors {
                write!(f, "*[(z2 - {a})^-{km1} - (z1 - {a})^-{km1}]")?;
            }
        }
        Ok(())
    }
}

/// Integrates every slot of `f` over [z₂, z₁]. Pole orders ≥ 2 guarantee no
/// logarithms arise; an order-1 term violates the representation and is an
/// engine bug.
pub fn integrate_form(f: &PoleForm, points: &[FieldElem]) -> Result<IntegratedForm> {
    let tag = f.tag();
    let mut terms = vec![];
    for (key, c) in &f.terms().0 {
        let mut coeff = c.clone();
        let mut factors = vec![];
        for &(bp, k) in key {
            if k < 2 {
                return Err(Error::ResiduePresent);
            }
            coeff = coeff.try_div(&FieldElem::from_int(tag, (k - 1) as i64))?;
            factors.push((points[bp].clone(), k - 1));
        }
        terms.push((coeff, factors));
    }
    Ok(IntegratedForm { tag, terms })
}

// ---------------------------------------------------------------------------
// Residue at infinity (count extraction service)
// ---------------------------------------------------------------------------

/// Res_{z→∞} f dz = -(coefficient of z^{-1} in the expansion at infinity).
/// For the proper part rem/den this coefficient is
/// lim z·rem/den = rem_{d-1}/den_d, with d = deg den.
pub fn residue_at_infinity(f: &UniRatFunc) -> Result<FieldElem> {
    let tag = f.tag();
    if f.is_zero() {
        return Ok(FieldElem::zero(tag));
    }
    let (_, rem) = f.num().div_rem(f.den())?;
    if rem.is_zero() {
        return Ok(FieldElem::zero(tag));
    }
    let d = f.den().degree();
    let c1 = rem.coeff(d - 1).try_div(&f.den().coeff(d))?;
    Ok(-&c1)
}

// ---------------------------------------------------------------------------
// Volume dictionary
// ---------------------------------------------------------------------------

/// Polynomial in L₁², ..., Lₙ² with exact coefficients (possibly involving
/// the π² symbol).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumePoly {
    pub n: u32,
    /// Exponent vector (d₁..dₙ) of the L², mapped to the coefficient.
    pub coeffs: BTreeMap<Vec<u32>, FieldElem>,
}

impl fmt::Display for VolumePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = c.display_with("p");
            if cs.contains(['+', ' ']) {
                write!(f, "({cs})")?;
            } else {
                write!(f, "{cs}")?;
            }
            for (i, &di) in d.iter().enumerate() {
                match di {
                    0 => {}
                    _ => write!(f, "*L{}^{}", i + 1, 2 * di)?,
                }
            }
        }
        Ok(())
    }
}

/// Laplace-dual volume polynomial of an engine-convention form on a
/// one-branchpoint curve with x''(a)/2 = 1: the (-1)^n orientation factor
/// is applied, and the coefficient of ∏ dzᵢ/zᵢ^{2dᵢ+2} contributes
/// ∏ Lᵢ^{2dᵢ}/(2dᵢ+1)!.
pub fn laplace_volume_dictionary(f: &PoleForm, xpp_half: &FieldElem) -> Result<VolumePoly> {
    let tag = f.tag();
    if !xpp_half.is_one() {
        return Err(Error::NonQuadraticX);
    }
    let sign = if f.n() % 2 == 0 { 1 } else { -1 };
    let mut coeffs: BTreeMap<Vec<u32>, FieldElem> = BTreeMap::new();
    for (key, c) in &f.terms().0 {
        let mut d = vec![];
        let mut factor = Rational::from_int(sign);
        for &(bp, k) in key {
            if bp != 0 {
                return Err(Error::NonQuadraticX);
            }
            if k % 2 != 0 || k < 2 {
                return Err(Error::IdentityFailed(format!(
                    "odd pole order {k} in a quadratic-x form"
                )));
            }
            let di = (k - 2) / 2;
            d.push(di);
            factor = &factor * &Rational::factorial(2 * di as u64 + 1).recip()?;
        }
        let contrib = c * &FieldElem::from_rational(tag, factor);
        let entry = coeffs.entry(d).or_insert_with(|| FieldElem::zero(tag));
        *entry = &*entry + &contrib;
    }
    coeffs.retain(|_, c| !c.is_zero());
    Ok(VolumePoly { n: f.n(), coeffs })
}

/// Divides the coefficient of ∏ dz/z^{2dᵢ+2} (engine convention, sign
/// converted) by the dictionary prefactor
/// 2^{-d_{g,n}} (t₃-2)^{2-2g-n} ∏ (2dᵢ+1)!/dᵢ!, exposing the bracket
/// ⟨∏κ ∏ψ⟩-combination it multiplies.
pub fn kappa_psi_bracket(f: &PoleForm, t3: &FieldElem, d: &[u32]) -> Result<FieldElem> {
    let tag = f.tag();
    assert_eq!(d.len(), f.n() as usize);
    let key: PoleKey = d.iter().map(|&di| (0usize, 2 * di + 2)).collect();
    let sign = FieldElem::from_int(tag, if f.n() % 2 == 0 { 1 } else { -1 });
    let printed = &f.coeff(&key) * &sign;
    let d_gn = 3 * f.g() as i64 - 3 + f.n() as i64;
    let chi = 2 - 2 * (f.g() as i64) - f.n() as i64;
    let t3m2 = t3 - &FieldElem::from_int(tag, 2);
    let mut pref = FieldElem::from_rational(tag, Rational::ratio(1, 2).pow(d_gn as u32));
    if chi >= 0 {
        pref = &pref * &t3m2.pow(chi as u32);
    } else {
        pref = pref.try_div(&t3m2.pow((-chi) as u32))?;
    }
    for &di in d {
        let r = &Rational::factorial(2 * di as u64 + 1) * &Rational::factorial(di as u64).recip()?;
        pref = &pref * &FieldElem::from_rational(tag, r);
    }
    printed.try_div(&pref)
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

pub fn poleform_to_json(f: &PoleForm) -> Value {
    let terms: Vec<Value> = f
        .terms()
        .0
        .iter()
        .map(|(key, c)| {
            let poles: Vec<Value> = key
                .iter()
                .map(|&(bp, k)| serde_json::json!({ "bp": bp, "k": k }))
                .collect();
            serde_json::json!({ "poles": poles, "coeff": field_elem_to_json(c) })
        })
        .collect();
    serde_json::json!({ "g": f.g(), "n": f.n(), "terms": terms })
}

pub fn poleform_from_json(tag: FieldTag, v: &Value) -> Result<PoleForm> {
    let g = v
        .get("g")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing \"g\"".into()))? as u32;
    let n = v
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing \"n\"".into()))? as u32;
    let mut terms = Terms::zero();
    for t in v
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing \"terms\"".into()))?
    {
        let poles = t
            .get("poles")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("term missing \"poles\"".into()))?;
        let key: PoleKey = poles
            .iter()
            .map(|p| {
                let bp = p.get("bp").and_then(Value::as_u64).unwrap_or(0) as usize;
                let k = p.get("k").and_then(Value::as_u64).unwrap_or(0) as u32;
                (bp, k)
            })
            .collect();
        let coeff = field_elem_from_json(
            tag,
            t.get("coeff")
                .ok_or_else(|| Error::Parse("term missing \"coeff\"".into()))?,
        )?;
        terms.insert_add(key, coeff);
    }
    Ok(PoleForm::new(tag, g, n, terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> FieldElem {
        FieldElem::Q(Rational::ratio(n, d))
    }

    fn airy_omega11() -> PoleForm {
        PoleForm::from_rows(FieldTag::Q, 1, 1, &[(&[(0, 4)], q(1, 16))])
    }

    #[test]
    fn expand_slot_principal_part() {
        // dz/z^4 at its own branchpoint: s^{-4} ds.
        let f = airy_omega11();
        let points = [q(0, 1)];
        let s_var = LaurentSeries::monomial(q(0, 1), q(1, 1), 1);
        let ser = f.expand_slot(0, 0, &points, &s_var).unwrap();
        let m4 = ser.coefficient(-4).unwrap();
        assert_eq!(m4.0.get(&vec![]).unwrap(), &q(1, 16));
        assert!(ser.coefficient(-3).unwrap().is_zero());
    }

    #[test]
    fn expand_slot_taylor_part() {
        // dz/(z-1)^2 expanded at a = -1: 1/(s-2)^2 = 1/4 + s/4 + 3s²/16 ...
        let f = PoleForm::from_rows(FieldTag::Q, 1, 1, &[(&[(0, 2)], q(1, 1))]);
        let points = [q(1, 1), q(-1, 1)];
        let s_var = LaurentSeries::monomial(q(-1, 1), q(1, 1), 1).truncate_to(8);
        let ser = f.expand_slot(0, 1, &points, &s_var).unwrap();
        assert_eq!(ser.coefficient(0).unwrap().0.get(&vec![]).unwrap(), &q(1, 4));
        assert_eq!(ser.coefficient(1).unwrap().0.get(&vec![]).unwrap(), &q(1, 4));
        assert_eq!(ser.coefficient(2).unwrap().0.get(&vec![]).unwrap(), &q(3, 16));
    }

    #[test]
    fn to_ratfunc_single_slot() {
        let f = airy_omega11();
        let r = f.to_ratfunc1(&[q(0, 1)]).unwrap();
        let expect =
            UniRatFunc::new(ZPoly::constant(q(1, 16)), ZPoly::monomial(q(1, 1), 4)).unwrap();
        assert_eq!(r, expect);
    }

    #[test]
    fn integrate_airy_forms() {
        // Triple integral of (1/2)∏dzᵢ/zᵢ²: (z₁-z₂)³/(2 z₁³ z₂³).
        let f = PoleForm::from_rows(FieldTag::Q, 0, 3, &[(&[(0, 2), (0, 2), (0, 2)], q(1, 2))]);
        let int = integrate_form(&f, &[q(0, 1)]).unwrap();
        // at z₁ = 2, z₂ = 1: (1 - 1/2)³/2 = 1/16
        assert_eq!(int.eval(&q(2, 1), &q(1, 1)).unwrap(), q(1, 16));

        // Single-integrate ω₁^(1): (1/48)(1/z₂³ - 1/z₁³).
        let f = airy_omega11();
        let int = integrate_form(&f, &[q(0, 1)]).unwrap();
        let got = int.eval(&q(2, 1), &q(1, 1)).unwrap();
        assert_eq!(got, q(7, 384));
    }

    #[test]
    fn infinity_residue_of_rational_forms() {
        let tag = FieldTag::Q;
        // Res_∞ (1/z) dz = -1.
        let f = UniRatFunc::new(ZPoly::one(tag), ZPoly::gen(tag)).unwrap();
        assert_eq!(residue_at_infinity(&f).unwrap(), q(-1, 1));
        // Res_∞ z³/(z-2)² dz: expansion z + 4 + 12/z + ... -> -12.
        let f = UniRatFunc::new(
            ZPoly::monomial(q(1, 1), 3),
            ZPoly::from_ints(tag, &[-2, 1]).pow(2),
        )
        .unwrap();
        assert_eq!(residue_at_infinity(&f).unwrap(), q(-12, 1));
        // Polynomials have none.
        let f = UniRatFunc::from_poly(ZPoly::from_ints(tag, &[3, 0, 5]));
        assert_eq!(residue_at_infinity(&f).unwrap(), q(0, 1));
    }

    #[test]
    fn permutation_symmetry_detection() {
        let sym = PoleForm::from_rows(FieldTag::Q, 0, 3, &[(&[(0, 2), (0, 2), (0, 2)], q(1, 2))]);
        assert!(sym.is_symmetric());
        let asym = PoleForm::from_rows(FieldTag::Q, 1, 2, &[(&[(0, 2), (0, 4)], q(1, 1))]);
        assert!(!asym.is_symmetric());
        let sym2 = PoleForm::from_rows(
            FieldTag::Q,
            1,
            2,
            &[(&[(0, 2), (0, 4)], q(1, 1)), (&[(0, 4), (0, 2)], q(1, 1))],
        );
        assert!(sym2.is_symmetric());
    }

    #[test]
    fn json_round_trip() {
        let f = PoleForm::from_rows(
            FieldTag::Q,
            1,
            2,
            &[(&[(0, 2), (1, 4)], q(5, 32)), (&[(1, 4), (0, 2)], q(5, 32))],
        );
        let v = poleform_to_json(&f);
        let f2 = poleform_from_json(FieldTag::Q, &v).unwrap();
        assert_eq!(f, f2);
    }

    #[test]
    fn window_exceeded_on_truncated_substitution() {
        let f = airy_omega11();
        let points = [q(0, 1)];
        let w = LaurentSeries::new(FieldTag::Q, q(0, 1), 1, vec![q(1, 1)], 3);
        let ser = f.expand_slot(0, 0, &points, &w).unwrap();
        assert!(ser.coefficient(ser.valid_order() + 1).is_err());
    }
}
