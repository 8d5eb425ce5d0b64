//! The residue recursion and everything built directly on it: correlator
//! forms, free energies, dilaton reduction, loop-equation verification and
//! the first-order expansion of the determinantal kernel.
//!
//! The recursion computes, for each branchpoint a and local variable s,
//!
//! ```text
//!   ω_{n+1}(z₀,J) = Σ_a Res_s K(z₀, a+s) [ ω_{n+2}^{(g-1)}(a+s, a+σ(s), J)
//!                       + Σ' ω(a+s, I) ω(a+σ(s), J∖I) ]
//! ```
//!
//! with K(z₀,z) = -½ dz₀ [1/(z₀-z) - 1/(z₀-z̄)] / ((y(z)-y(z̄)) dx(z)).
//! Expanding 1/(z₀-a-s) = Σ s^m/(z₀-a)^{m+1} turns each residue into a
//! family of pole-basis coefficients: the engine multiplies truncated
//! local series and reads off s^{-1}.
//!
//! Sign orientation: ω_1^(0) = -y dx and the -½ kernel prefactor are used
//! verbatim. In this orientation the inverse-loop (dilaton) identity reads
//! Σ Res Φ ω_{n+1}^{(g)} = (2g-2+n) ω_n^{(g)}, and F_g =
//! 1/(2-2g) Σ Res Φ ω_1^{(g)} — F_g carries no orientation ambiguity since
//! Φ and ω_1 flip together.

use crate::curve::{BranchData, SpectralCurve};
use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldTag};
use crate::forms::{
    integrate_form, residue_at_infinity, IntegratedForm, PoleForm, SeriesOfForms, Terms,
    UnstableForm,
};
use crate::ratfunc::{UniRatFunc, ZPoly};
use crate::series::{laurent_expand, LaurentSeries};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

/// A correlator table entry.
#[derive(Clone, Debug)]
pub enum Omega {
    Stable(Arc<PoleForm>),
    Unstable(UnstableForm),
}

impl Omega {
    pub fn stable(&self) -> Option<&PoleForm> {
        match self {
            Omega::Stable(f) => Some(f),
            Omega::Unstable(_) => None,
        }
    }
}

/// Per-branchpoint local series at one working order.
struct Local {
    data: BranchData,
    /// Identity substitution s, window-limited to the working order.
    ident: LaurentSeries,
    /// σ powers cache, built lazily per level.
    x_deriv: LaurentSeries,
    /// 1 / ((Y - Y∘σ)·X'), the scalar part of the recursion kernel.
    inv_kernel_denom: LaurentSeries,
    /// σ'(s)/(s - σ(s))², the B(z, z̄) density.
    b_self: LaurentSeries,
}

struct Locals {
    order: i64,
    per_bp: Vec<Local>,
}

/// Bottom-up memoized table of correlators for one curve.
pub struct OmegaTable<'c> {
    curve: &'c SpectralCurve,
    jobs: usize,
    points: Vec<FieldElem>,
    locals: RefCell<Option<Arc<Locals>>>,
    table: RefCell<HashMap<(u32, u32), Arc<PoleForm>>>,
}

impl<'c> OmegaTable<'c> {
    pub fn new(curve: &'c SpectralCurve) -> Self {
        Self::with_jobs(curve, 1)
    }

    pub fn with_jobs(curve: &'c SpectralCurve, jobs: usize) -> Self {
        OmegaTable {
            curve,
            jobs: jobs.max(1),
            points: curve.branchpoint_values(),
            locals: RefCell::new(None),
            table: RefCell::new(HashMap::new()),
        }
    }

    pub fn curve(&self) -> &SpectralCurve {
        self.curve
    }

    fn tag(&self) -> FieldTag {
        self.curve.tag()
    }

    /// Default working order for a target level.
    fn working_order(g: u32, n: u32) -> i64 {
        6 * g as i64 + 2 * n as i64 + 6
    }

    fn locals_at(&self, order: i64) -> Result<Arc<Locals>> {
        {
            let cached = self.locals.borrow();
            if let Some(l) = cached.as_ref() {
                if l.order >= order {
                    return Ok(l.clone());
                }
            }
        }
        // Round up so one local-data build (one Newton solve per
        // branchpoint) serves a whole band of levels.
        let order = ((order + 23) / 24) * 24;
        let tag = self.tag();
        let mut per_bp = vec![];
        for i in 0..self.points.len() {
            let data = self.curve.branch_local(i, order)?;
            let a = data.a.clone();
            let ident = LaurentSeries::new(tag, a.clone(), 1, vec![FieldElem::one(tag)], order);
            let x_loc = laurent_expand(self.curve.x(), &a, order + 1)?;
            let x0 = x_loc.coefficient(0)?;
            let x_deriv = x_loc
                .sub(&LaurentSeries::constant(tag, a.clone(), x0))
                .derivative();
            let y_odd = data.y_series.sub(&data.y_series.compose(&data.sigma)?);
            let denom = y_odd.mul(&x_deriv);
            let inv_kernel_denom = denom.invert(order)?;
            let s_minus_sigma = ident.sub(&data.sigma);
            let b_self = data
                .sigma
                .derivative()
                .mul(&s_minus_sigma.powi(-2, order)?);
            per_bp.push(Local {
                data,
                ident,
                x_deriv,
                inv_kernel_denom,
                b_self,
            });
        }
        let locals = Arc::new(Locals { order, per_bp });
        *self.locals.borrow_mut() = Some(locals.clone());
        Ok(locals)
    }

    /// The correlator ω_n^(g); unstable entries are returned as markers.
    pub fn omega(&self, g: u32, n: u32) -> Result<Omega> {
        assert!(n >= 1, "use fg() for n = 0");
        if 2 * g as i64 - 2 + n as i64 <= 0 {
            return Ok(Omega::Unstable(match (g, n) {
                (0, 1) => UnstableForm::OneZero,
                (0, 2) => UnstableForm::Bergman,
                _ => unreachable!(),
            }));
        }
        Ok(Omega::Stable(self.stable(g, n)?))
    }

    fn stable(&self, g: u32, n: u32) -> Result<Arc<PoleForm>> {
        if let Some(f) = self.table.borrow().get(&(g, n)) {
            return Ok(f.clone());
        }
        // Prefetch dependencies (all have strictly smaller 2g-2+n).
        let jn = n - 1;
        if g >= 1 && !(g == 1 && jn == 0) {
            self.stable(g - 1, jn + 2)?;
        }
        for h in 0..=g {
            for sz in 0..=jn {
                // Mirror the primed-sum exclusions (0,∅) and (g,J).
                if (h == 0 && sz == 0) || (h == g && sz == jn) {
                    continue;
                }
                let (n1, n2) = (1 + sz, 1 + jn - sz);
                for (hh, nn) in [(h, n1), (g - h, n2)] {
                    if 2 * hh as i64 - 2 + nn as i64 > 0 {
                        self.stable(hh, nn)?;
                    }
                }
            }
        }

        let mut order = Self::working_order(g, n);
        let mut last_err = Error::InsufficientOrder;
        for _ in 0..5 {
            match self.stable_step(g, n, order) {
                Ok(f) => {
                    let f = Arc::new(f);
                    self.table.borrow_mut().insert((g, n), f.clone());
                    return Ok(f);
                }
                Err(e @ Error::WindowExceeded { .. }) | Err(e @ Error::InsufficientOrder) => {
                    last_err = e;
                    order *= 2;
                }
                Err(e) => return Err(e),
            }
        }
        Err(last_err)
    }

    /// One recursion step at a fixed working order.
    fn stable_step(&self, g: u32, n: u32, order: i64) -> Result<PoleForm> {
        let tag = self.tag();
        let jn = (n - 1) as usize;
        // Locals are built once per curve at a rounded-up order; each level
        // works with windows truncated to its own need.
        let full = self.locals_at(order)?;
        let locals = Arc::new(Locals {
            order,
            per_bp: full
                .per_bp
                .iter()
                .map(|l| Local {
                    data: BranchData {
                        a: l.data.a.clone(),
                        sigma: l.data.sigma.truncate_to(order),
                        y_series: l.data.y_series.truncate_to(order),
                        phi_series: l.data.phi_series.truncate_to(order),
                        xpp_half: l.data.xpp_half.clone(),
                        y_prime_sq: l.data.y_prime_sq.clone(),
                    },
                    ident: l.ident.truncate_to(order),
                    x_deriv: l.x_deriv.truncate_to(order),
                    inv_kernel_denom: l.inv_kernel_denom.truncate_to(order),
                    b_self: l.b_self.truncate_to(order),
                })
                .collect(),
        });

        let deps: HashMap<(u32, u32), Arc<PoleForm>> = self.table.borrow().clone();
        let points: &[FieldElem] = &self.points;
        let locals_for_units = locals.clone();

        // Distinct bracket factors per branchpoint: each is a lower form
        // with its local slot substituted by a + s (kind 0) or a + σ(s)
        // (kind 1); subset masks only change the slot embedding, so every
        // (h, slot count, kind) expansion is built once.
        let mut factor_keys: Vec<(u32, u32, u8)> = vec![];
        for h in 0..=g {
            for sz in 0..=jn {
                if (h == 0 && sz == 0) || (h == g && sz == jn) {
                    continue;
                }
                let k1 = (h, sz as u32 + 1, 0u8);
                let k2 = (g - h, (jn - sz) as u32 + 1, 1u8);
                for k in [k1, k2] {
                    if !factor_keys.contains(&k) {
                        factor_keys.push(k);
                    }
                }
            }
        }

        let build_factor = move |bp: usize, key: (u32, u32, u8)| -> Result<SeriesOfForms> {
            let loc = &locals_for_units.per_bp[bp];
            let w = if key.2 == 0 { &loc.ident } else { &loc.data.sigma };
            factor_series(tag, &deps, points, bp, key.0, key.1, w, order)
        };
        let build_factor = &build_factor;

        let deps2: HashMap<(u32, u32), Arc<PoleForm>> = self.table.borrow().clone();
        let mut result = Terms::zero();
        for bp in 0..self.points.len() {
            let factors: Vec<Result<SeriesOfForms>> = if self.jobs > 1 && factor_keys.len() > 1 {
                std::thread::scope(|scope| {
                    let chunks: Vec<Vec<usize>> = (0..self.jobs)
                        .map(|w| (w..factor_keys.len()).step_by(self.jobs).collect())
                        .collect();
                    let handles: Vec<_> = chunks
                        .into_iter()
                        .map(|idxs| {
                            let factor_keys = &factor_keys;
                            scope.spawn(move || {
                                idxs.into_iter()
                                    .map(|i| (i, build_factor(bp, factor_keys[i])))
                                    .collect::<Vec<_>>()
                            })
                        })
                        .collect();
                    let mut slots: Vec<Option<Result<SeriesOfForms>>> =
                        (0..factor_keys.len()).map(|_| None).collect();
                    for h in handles {
                        for (i, r) in h.join().expect("worker panicked") {
                            slots[i] = Some(r);
                        }
                    }
                    slots
                        .into_iter()
                        .map(|s| s.expect("all factors built"))
                        .collect()
                })
            } else {
                factor_keys.iter().map(|&k| build_factor(bp, k)).collect()
            };
            let mut cache: HashMap<(u32, u32, u8), SeriesOfForms> = HashMap::new();
            for (key, f) in factor_keys.iter().zip(factors) {
                cache.insert(*key, f?);
            }

            let loc = &locals.per_bp[bp];
            let mut bracket = SeriesOfForms::zero(tag, jn, i64::MAX / 8);
            // Merged entry ω_{jn+2}^{(g-1)}(z, z̄, J).
            if g >= 1 {
                let merged = if g == 1 && jn == 0 {
                    SeriesOfForms::from_scalar_series(
                        &loc.b_self,
                        &Terms::singleton(vec![], FieldElem::one(tag)),
                        0,
                    )?
                } else {
                    let w = deps2
                        .get(&(g - 1, jn as u32 + 2))
                        .expect("prefetched dependency");
                    let s1 = w.expand_slot(0, bp, points, &loc.ident)?;
                    s1.expand_slot(0, bp, points, &loc.data.sigma)?
                };
                bracket = bracket.add(&merged);
            }
            // Splitting products, excluding (0, ∅) and (g, J).
            for h in 0..=g {
                for mask in 0..(1u64 << jn) {
                    let full = mask == (1 << jn) - 1;
                    if (h == 0 && mask == 0) || (h == g && full) {
                        continue;
                    }
                    let in_i: Vec<usize> = (0..jn).filter(|j| mask & (1 << j) != 0).collect();
                    let rest: Vec<usize> = (0..jn).filter(|j| mask & (1 << j) == 0).collect();
                    let f1 = &cache[&(h, in_i.len() as u32 + 1, 0u8)];
                    let f2 = &cache[&(g - h, rest.len() as u32 + 1, 1u8)];
                    bracket = bracket.add(&f1.product(f2, &in_i, &rest, jn));
                }
            }
            // Kernel weights: κ_m = -½ (s^m - σ^m) / ((Y-Y∘σ) X'), paired
            // with the pole dz₀/(z₀-a)^{m+1}.
            let glo = match bracket.lowest() {
                Some(l) => l,
                None => continue,
            };
            let m_max = (1 - glo).max(1);
            let mut s_pow = loc.ident.clone();
            let mut sigma_pow = loc.data.sigma.clone();
            let minus_half = FieldElem::from_rational(tag, crate::field::Rational::ratio(-1, 2));
            for m in 1..=m_max {
                let diff = s_pow.sub(&sigma_pow);
                if !diff.is_zero() {
                    let kappa = diff.mul(&loc.inv_kernel_denom).scale(&minus_half);
                    let res = bracket.residue_against(&kappa)?;
                    for (key, c) in res.0 {
                        let mut full: Vec<(usize, u32)> = Vec::with_capacity(n as usize);
                        full.push((bp, m as u32 + 1));
                        full.extend(key);
                        result.insert_add(full, c);
                    }
                }
                s_pow = s_pow.mul(&loc.ident);
                sigma_pow = sigma_pow.mul(&loc.data.sigma);
            }
        }

        let form = PoleForm::new(tag, g, n, result);
        form.validate_orders()?;
        if !form.is_symmetric() {
            return Err(Error::IdentityFailed(format!(
                "ω_{n}^({g}) is not slot-symmetric"
            )));
        }
        Ok(form)
    }

    /// F_g for g ≥ 2, from the inverse-loop residue pairing
    /// Σ_a Res Φ ω_1^(g) = (2g-2)·F_g — the constant that holds in this
    /// orientation (with the opposite y-orientation both Φ and ω_1 flip
    /// and the pairing is unchanged). The result is asserted independent
    /// of the per-branchpoint constant of Φ.
    pub fn fg(&self, g: u32) -> Result<FieldElem> {
        assert!(g >= 2, "F_g via the residue formula needs g >= 2");
        let tag = self.tag();
        let omega1 = self.stable(g, 1)?;
        let order = Self::working_order(g, 1);
        let locals = self.locals_at(order)?;
        let mut acc = FieldElem::zero(tag);
        let mut acc_shifted = FieldElem::zero(tag);
        for (key, c) in &omega1.terms().0 {
            let (bp, k) = key[0];
            let phi = &locals.per_bp[bp].data.phi_series;
            let coeff = phi.coefficient(k as i64 - 1)?;
            acc = &acc + &(c * &coeff);
            // Residue against Φ + const differs only through a k = 1 term,
            // which the representation forbids; recompute to assert.
            let shifted = if k == 1 { &coeff + &FieldElem::one(tag) } else { coeff };
            acc_shifted = &acc_shifted + &(c * &shifted);
        }
        if acc != acc_shifted {
            return Err(Error::IdentityFailed(
                "F_g depends on the additive constant of Φ".into(),
            ));
        }
        acc.try_div(&FieldElem::from_int(tag, 2 * g as i64 - 2))
    }

    /// Residue-pairs the last slot of `f` against Φ:
    /// Σ_a Res Φ(z_last) f. In this orientation the result equals
    /// (2g - 2 + n)·ω_n^{(g)} for f = ω_{n+1}^{(g)}; the target level must
    /// itself be stable (or n = 0, where the scalar is (2g-2)·F_g).
    pub fn dilaton_reduce(&self, f: &PoleForm) -> Result<DilatonReduced> {
        let tag = self.tag();
        let g = f.g();
        let target_n = f.n() as i64 - 1;
        if target_n >= 1 && 2 * g as i64 - 2 + target_n <= 0 {
            return Err(Error::Parse(
                "dilaton reduction targets an unstable level".into(),
            ));
        }
        let last = (f.n() - 1) as usize;
        let order = Self::working_order(g, f.n());
        let locals = self.locals_at(order)?;
        let mut terms = Terms::zero();
        let mut scalar = FieldElem::zero(tag);
        for (key, c) in &f.terms().0 {
            let (bp, k) = key[last];
            let phi = &locals.per_bp[bp].data.phi_series;
            let coeff = phi.coefficient(k as i64 - 1)?;
            let contrib = c * &coeff;
            if last == 0 {
                scalar = &scalar + &contrib;
            } else {
                terms.insert_add(key[..last].to_vec(), contrib);
            }
        }
        Ok(if last == 0 {
            DilatonReduced::Scalar(scalar)
        } else {
            DilatonReduced::Form(PoleForm::new(tag, g, f.n() - 1, terms))
        })
    }

    /// ∂ln(τ_B)/∂x(a_i) = Res_{z→a_i} B(z, z̄)/dx(z).
    pub fn tau_b_derivative(&self, bp: usize) -> Result<FieldElem> {
        let order = Self::working_order(1, 1);
        let locals = self.locals_at(order)?;
        let loc = &locals.per_bp[bp];
        loc.b_self
            .mul(&loc.x_deriv.invert(order)?)
            .residue()
    }

    /// The square-root slope y'(a) at the single branchpoint of a curve
    /// normalized to x''(a)/2 = 1; F₁ is (1/24)·ln of it up to a constant.
    pub fn f1_log_argument(&self) -> Result<FieldElem> {
        if self.points.len() != 1 {
            return Err(Error::MultiBranchpoint);
        }
        let b = &self.curve.branchpoints()[0];
        if !b.xpp_half.is_one() {
            return Err(Error::NotNormalized);
        }
        b.y_series.coefficient(1)
    }

    /// Boundary-weighted residues at infinity:
    /// T^{(g)}_{l₁..lₙ} = (-1)^n ∏ᵢ Res_{zᵢ→∞} x^{lᵢ} · (correlator), taken
    /// on the physical sheet of the rational parametrization. The unstable
    /// (0,2) entry subtracts the double pole in x per its generating-series
    /// definition (the subtraction integrates to an exact form, which the
    /// computation confirms term by term).
    pub fn counts_at_infinity(&self, g: u32, n: u32, weights: &[u32]) -> Result<FieldElem> {
        assert_eq!(weights.len(), n as usize);
        let tag = self.tag();
        let x = self.curve.x();
        match self.omega(g, n)? {
            Omega::Unstable(UnstableForm::OneZero) => {
                // W₁^(0) dx = -y dx: T = -Res x^l W₁ dx = Res x^l y dx.
                let y = self.curve.ydata().rational().ok_or_else(|| {
                    Error::UnsupportedTransform("counts need rational y".into())
                })?;
                let f = x.pow(weights[0])?.mul(y)?.mul(&x.derivative()?)?;
                residue_at_infinity(&f)
            }
            Omega::Unstable(UnstableForm::Bergman) => {
                let (l1, l2) = (weights[0], weights[1]);
                // Inner residue of x₁^{l₁}/(z₁-z₂)²: only the polynomial
                // part of x^{l₁} contributes, giving -(poly part)'(z₂).
                let xl1 = x.pow(l1)?;
                let (poly_part, _) = xl1.num().div_rem(xl1.den())?;
                let inner = UniRatFunc::from_poly(-&poly_part.derivative());
                let b_part = residue_at_infinity(&x.pow(l2)?.mul(&inner)?)?;
                // Subtraction piece: inner residue -l₁ x₂^{l₁-1}, then the
                // outer residue of an exact form in x (identically zero).
                let sub_inner = x
                    .pow(l1 + l2 - 1)?
                    .mul(&x.derivative()?)?
                    .scale(&FieldElem::from_int(tag, -(l1 as i64)))?;
                let sub = residue_at_infinity(&sub_inner)?;
                Ok(&b_part - &sub)
            }
            Omega::Stable(f) => {
                let mut acc = FieldElem::zero(tag);
                for (key, c) in &f.terms().0 {
                    let mut prod = c.clone();
                    for (slot, &(bp, k)) in key.iter().enumerate() {
                        let a = &self.points[bp];
                        let mono = UniRatFunc::new(
                            ZPoly::one(tag),
                            ZPoly::new(tag, vec![-a, FieldElem::one(tag)]).pow(k),
                        )?;
                        let with_weight = x.pow(weights[slot])?.mul(&mono)?;
                        prod = &prod * &residue_at_infinity(&with_weight)?;
                        if prod.is_zero() {
                            break;
                        }
                    }
                    acc = &acc + &prod;
                }
                let sign = FieldElem::from_int(tag, if n % 2 == 0 { 1 } else { -1 });
                Ok(&acc * &sign)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum DilatonReduced {
    Form(PoleForm),
    Scalar(FieldElem),
}

/// One bracket factor ω_{nn}^{(h)} with its local slot substituted by
/// a + w(s); the nn-1 spectator slots keep the stored form's order and are
/// embedded into the bracket at product time.
#[allow(clippy::too_many_arguments)]
fn factor_series(
    tag: FieldTag,
    deps: &HashMap<(u32, u32), Arc<PoleForm>>,
    points: &[FieldElem],
    bp: usize,
    h: u32,
    nn: u32,
    w: &LaurentSeries,
    order: i64,
) -> Result<SeriesOfForms> {
    match (h, nn) {
        (0, 1) => unreachable!("excluded by the primed sum"),
        (0, 2) => {
            // ω_2^(0)(local, z_j) = B: Σ_m (m+1) w^m w' ⊗ dz_j/(z_j-a)^{m+2}.
            let wprime = w.derivative();
            let mut out = SeriesOfForms::zero(tag, 1, i64::MAX / 8);
            let mut w_pow = LaurentSeries::constant(tag, w.center().clone(), FieldElem::one(tag));
            for m in 0..=order.max(2) {
                let scalar = w_pow.mul(&wprime).scale(&FieldElem::from_int(tag, m + 1));
                let spect = Terms::singleton(vec![(bp, m as u32 + 2)], FieldElem::one(tag));
                out = out.add(&SeriesOfForms::from_scalar_series(&scalar, &spect, 1)?);
                w_pow = w_pow.mul(w);
            }
            Ok(out)
        }
        _ => {
            let f = deps.get(&(h, nn)).expect("prefetched dependency");
            f.expand_slot(0, bp, points, w)
        }
    }
}

// ---------------------------------------------------------------------------
// Convenience entry points
// ---------------------------------------------------------------------------

pub fn compute_omega(curve: &SpectralCurve, g: u32, n: u32) -> Result<Omega> {
    OmegaTable::new(curve).omega(g, n)
}

pub fn compute_fg(curve: &SpectralCurve, g: u32) -> Result<FieldElem> {
    OmegaTable::new(curve).fg(g)
}

pub fn f1_log_argument(curve: &SpectralCurve) -> Result<FieldElem> {
    OmegaTable::new(curve).f1_log_argument()
}

pub fn tau_b_derivative(curve: &SpectralCurve, bp: usize) -> Result<FieldElem> {
    OmegaTable::new(curve).tau_b_derivative(bp)
}

/// Boundary-weighted count extraction T^{(g)}_{l₁..lₙ}; see
/// [`OmegaTable::counts_at_infinity`].
pub fn residue_at_infinity_with_weight(
    curve: &SpectralCurve,
    g: u32,
    n: u32,
    weights: &[u32],
) -> Result<FieldElem> {
    OmegaTable::new(curve).counts_at_infinity(g, n, weights)
}

// ---------------------------------------------------------------------------
// Loop equations (one-matrix family)
// ---------------------------------------------------------------------------

/// Report of one loop-equation check: the residual is the polynomial
/// P^{(g)}_{n+1}(x; J) reconstructed in the x-variable.
#[derive(Clone, Debug)]
pub struct LoopEqReport {
    /// Coefficients of P in x, lowest first.
    pub residual_in_x: Vec<FieldElem>,
}

/// Verifies the one-cut loop equation for the curve at level (g, n) — the
/// equation defining P^{(g)}_{n+1}(x; J) — with the n spectator variables
/// placed at sampled uniformizer values. The curve must come from the
/// one-cut constructor, so that y(z) = -W_1^{(0)}(x(z)).
pub fn loop_equation_check(
    curve: &SpectralCurve,
    vprime_in_x: &UniRatFunc,
    g: u32,
    n: u32,
    spectators: &[FieldElem],
) -> Result<LoopEqReport> {
    assert_eq!(spectators.len(), n as usize, "one sample per spectator");
    assert!(n <= 1, "implemented for n = 0, 1 (the catalog checks)");
    let tag = curve.tag();
    let table = OmegaTable::new(curve);
    let x = curve.x();
    let xp = x.derivative()?;
    let y = curve
        .ydata()
        .rational()
        .ok_or_else(|| Error::UnsupportedTransform("loop equations need rational y".into()))?;
    let w1 = y.neg(); // W_1^{(0)}(x(z))
    let vp_of_x = vprime_in_x.compose(x)?;

    // Degree bound: deg V' - 1 for the disc equation, deg V' - 2 beyond.
    let degv = vprime_in_x.num().degree();
    let bound = if (g, n) == (0, 0) {
        degv as i64 - 1
    } else {
        degv as i64 - 2
    };

    let lhs_minus_rhs: UniRatFunc = match (g, n) {
        (0, 0) => {
            // W₁² - V'W₁ = -P₁^(0).
            w1.mul(&w1)?.sub(&vp_of_x.mul(&w1)?)?
        }
        (0, 1) => {
            // 2W₁W₂ + ∂-term - V'W₂ = -P₂^(0).
            let w = &spectators[0];
            let w2 = bergman_w2(curve, w)?;
            let dterm = derivative_term(curve, &w1, w)?;
            w1.mul(&w2)?
                .scale(&FieldElem::from_int(tag, 2))?
                .add(&dterm)?
                .sub(&vp_of_x.mul(&w2)?)?
        }
        (1, 1) => {
            let w = &spectators[0];
            let w2_b = bergman_w2(curve, w)?;
            let w30 = table.stable(0, 3)?;
            let w21 = table.stable(1, 2)?;
            let w11 = table.stable(1, 1)?;
            let points = curve.branchpoint_values();
            // W₃^(0)(x, x, x₂): both local slots on the diagonal.
            let w3_diag = stable_w_diagonal(&w30, &points, &xp, w)?;
            let w21_z = stable_w_partial(&w21, &points, &xp, &[w.clone()])?;
            let w11_z = w11.to_ratfunc1(&points)?.div(&xp)?;
            let dterm = derivative_term_form(&w11_z, x, &xp, w)?;
            let two = FieldElem::from_int(tag, 2);
            w3_diag
                .add(&w1.mul(&w21_z)?.scale(&two)?)?
                .add(&w11_z.mul(&w2_b)?.scale(&two)?)?
                .add(&dterm)?
                .sub(&vp_of_x.mul(&w21_z)?)?
        }
        _ => {
            return Err(Error::ResidualNotPolynomial(format!(
                "level (g,n) = ({g},{n}) not wired for the loop-equation check"
            )))
        }
    };

    // The combination equals -P(x); verify it is a polynomial in x of the
    // stated degree and reconstruct its coefficients.
    let minus_p = lhs_minus_rhs;
    let coeffs = express_in_x(&minus_p, x, bound)?;
    Ok(LoopEqReport {
        residual_in_x: coeffs.iter().map(|c| -c).collect(),
    })
}

/// W₂^(0)(x(z), x(w)) as a rational function of z at a fixed sample w:
/// 1/((z-w)² x'(z) x'(w)) - 1/(x(z) - x(w))².
fn bergman_w2(curve: &SpectralCurve, w: &FieldElem) -> Result<UniRatFunc> {
    let tag = curve.tag();
    let x = curve.x();
    let xp = x.derivative()?;
    let xw = x.eval(w)?;
    let xpw = xp.eval(w)?;
    let lin = UniRatFunc::new(
        ZPoly::one(tag),
        ZPoly::new(tag, vec![-w, FieldElem::one(tag)]).pow(2),
    )?;
    let first = lin.div(&xp)?.scale(&xpw.recip()?)?;
    let diff = x.sub(&UniRatFunc::constant(xw))?;
    let second = UniRatFunc::constant(FieldElem::one(tag)).div(&diff.mul(&diff)?)?;
    first.sub(&second)
}

/// ∂_{x₂} [(F(x) - F(x₂)) / (x - x₂)] at x₂ = x(w), for F given as a
/// rational function of z (F = W evaluated on the physical sheet):
/// [ (F(x) - F(x₂)) - F'(x₂)(x - x₂) ] / (x - x₂)².
fn derivative_term(curve: &SpectralCurve, f_of_z: &UniRatFunc, w: &FieldElem) -> Result<UniRatFunc> {
    let x = curve.x();
    let xp = x.derivative()?;
    derivative_term_inner(f_of_z, x, &xp, w)
}

fn derivative_term_form(
    f_of_z: &UniRatFunc,
    x: &UniRatFunc,
    xp: &UniRatFunc,
    w: &FieldElem,
) -> Result<UniRatFunc> {
    derivative_term_inner(f_of_z, x, xp, w)
}

fn derivative_term_inner(
    f_of_z: &UniRatFunc,
    x: &UniRatFunc,
    xp: &UniRatFunc,
    w: &FieldElem,
) -> Result<UniRatFunc> {
    let fw = f_of_z.eval(w)?;
    // dF/dx at the sample: F'(w)/x'(w).
    let fpw = f_of_z.derivative()?.eval(w)?.try_div(&xp.eval(w)?)?;
    let xw = x.eval(w)?;
    let dx = x.sub(&UniRatFunc::constant(xw))?;
    let num = f_of_z
        .sub(&UniRatFunc::constant(fw))?
        .sub(&dx.scale(&fpw)?)?;
    num.div(&dx.mul(&dx)?)
}

/// Σ over terms of a stable form with slot 0 kept in z and the remaining
/// slots evaluated at the given samples, converted to a W-function of x on
/// the physical sheet (divides by x'(z) and the sampled x'(wⱼ)).
fn stable_w_partial(
    f: &PoleForm,
    points: &[FieldElem],
    xp: &UniRatFunc,
    samples: &[FieldElem],
) -> Result<UniRatFunc> {
    let tag = f.tag();
    let mut acc = UniRatFunc::zero(tag);
    for (key, c) in &f.terms().0 {
        let mut coeff = c.clone();
        for (slot, &(bp, k)) in key.iter().enumerate().skip(1) {
            let w = &samples[slot - 1];
            let d = w - &points[bp];
            coeff = coeff.try_div(&d.pow(k))?;
            coeff = coeff.try_div(&xp.eval(w)?)?;
        }
        let (bp0, k0) = key[0];
        let lin = ZPoly::new(tag, vec![-&points[bp0], FieldElem::one(tag)]);
        let mono = UniRatFunc::new(ZPoly::constant(coeff), lin.pow(k0))?;
        acc = acc.add(&mono)?;
    }
    acc.div(xp)
}

/// Diagonal W(x(z), x(z), samples...) of a stable form: slots 0 and 1 both
/// carried in z, the rest evaluated.
fn stable_w_diagonal(
    f: &PoleForm,
    points: &[FieldElem],
    xp: &UniRatFunc,
    sample: &FieldElem,
) -> Result<UniRatFunc> {
    let tag = f.tag();
    let mut acc = UniRatFunc::zero(tag);
    for (key, c) in &f.terms().0 {
        assert_eq!(key.len(), 3);
        let mut coeff = c.clone();
        let (bp2, k2) = key[2];
        coeff = coeff.try_div(&(sample - &points[bp2]).pow(k2))?;
        coeff = coeff.try_div(&xp.eval(sample)?)?;
        let mut term = UniRatFunc::constant(coeff);
        for &(bp, k) in &key[..2] {
            let lin = ZPoly::new(tag, vec![-&points[bp], FieldElem::one(tag)]);
            term = term.mul(&UniRatFunc::new(ZPoly::one(tag), lin.pow(k))?)?;
        }
        acc = acc.add(&term)?;
    }
    acc.div(&xp.mul(xp)?)
}

/// Expresses `f` as a polynomial in x of degree ≤ bound: solves for the
/// coefficients on sample points, then verifies the identity exactly as
/// rational functions. Fails with the residual's shape otherwise.
fn express_in_x(f: &UniRatFunc, x: &UniRatFunc, bound: i64) -> Result<Vec<FieldElem>> {
    let tag = f.tag();
    if bound < 0 {
        if f.is_zero() {
            return Ok(vec![]);
        }
        return Err(Error::ResidualNotPolynomial(
            "expected zero residual".into(),
        ));
    }
    let m = bound as usize + 1;
    // Sample away from poles of f and x.
    let mut rows: Vec<Vec<FieldElem>> = vec![];
    let mut rhs: Vec<FieldElem> = vec![];
    let mut z = 2i64;
    while rows.len() < m {
        let point = FieldElem::from_int(tag, z);
        z += 1;
        let (Ok(xv), Ok(fv)) = (x.eval(&point), f.eval(&point)) else {
            continue;
        };
        let mut row = Vec::with_capacity(m);
        let mut p = FieldElem::one(tag);
        for _ in 0..m {
            row.push(p.clone());
            p = &p * &xv;
        }
        rows.push(row);
        rhs.push(fv);
        if z > 200 {
            return Err(Error::ResidualNotPolynomial(
                "could not sample enough regular points".into(),
            ));
        }
    }
    let coeffs = solve_linear(rows, rhs)?;
    // Exact verification: f - Σ cᵢ xᶦ ≡ 0.
    let mut poly = UniRatFunc::zero(tag);
    let mut xpow = UniRatFunc::constant(FieldElem::one(tag));
    for c in &coeffs {
        poly = poly.add(&xpow.scale(c)?)?;
        xpow = xpow.mul(x)?;
    }
    let diff = f.sub(&poly)?;
    if !diff.is_zero() {
        return Err(Error::ResidualNotPolynomial(format!(
            "residual is not a degree-≤{bound} polynomial in x"
        )));
    }
    let mut coeffs = coeffs;
    while coeffs.last().is_some_and(FieldElem::is_zero) {
        coeffs.pop();
    }
    Ok(coeffs)
}

fn solve_linear(mut a: Vec<Vec<FieldElem>>, mut b: Vec<FieldElem>) -> Result<Vec<FieldElem>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(Error::SingularSystem)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip()?;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] * &inv;
            for c in col..n {
                a[r][c] = &a[r][c] - &(&factor * &a[col][c]);
            }
            b[r] = &b[r] - &(&factor * &b[col]);
        }
    }
    (0..n).map(|i| b[i].try_div(&a[i][i])).collect()
}

// ---------------------------------------------------------------------------
// Determinantal-kernel expansion
// ---------------------------------------------------------------------------

/// Structured record of the kernel's exponential formula to first
/// subleading order: the leading factor exp(-N ∫ y dx) over the prime form
/// E(z₁,z₂) = (z₁-z₂)/√(dz₁dz₂), then the order-1/N corrections
/// ∫ω₁^(1) and (1/6)∫∫∫ω₃^(0), all integrals over [z₂, z₁].
#[derive(Clone, Debug)]
pub struct KernelExpansion {
    pub prefactor: String,
    pub prime_form_denominator: String,
    pub corrections: Vec<(String, IntegratedForm)>,
}

pub fn kernel_h_expansion(curve: &SpectralCurve, order: u8) -> Result<KernelExpansion> {
    assert!(order <= 1, "expansion implemented to first subleading order");
    let mut corrections = vec![];
    if order >= 1 {
        let table = OmegaTable::new(curve);
        let points = curve.branchpoint_values();
        let o11 = table.stable(1, 1)?;
        corrections.push((
            "∫ ω_1^(1)".to_string(),
            integrate_form(&o11, &points)?,
        ));
        let o03 = table.stable(0, 3)?;
        let sixth = FieldElem::from_rational(curve.tag(), crate::field::Rational::ratio(1, 6));
        let scaled = o03.scale(&sixth);
        corrections.push((
            "(1/6) ∫∫∫ ω_3^(0)".to_string(),
            integrate_form(&scaled, &points)?,
        ));
    }
    Ok(KernelExpansion {
        prefactor: "exp(-N ∫_{z2}^{z1} y dx)".to_string(),
        prime_form_denominator: "E(z1,z2) = (z1 - z2)/sqrt(dz1 dz2)".to_string(),
        corrections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::YData;
    use crate::field::Rational;

    fn q(n: i64, d: i64) -> FieldElem {
        FieldElem::Q(Rational::ratio(n, d))
    }

    fn poly(ints: &[i64]) -> UniRatFunc {
        UniRatFunc::from_poly(ZPoly::from_ints(FieldTag::Q, ints))
    }

    fn airy() -> SpectralCurve {
        SpectralCurve::build(poly(&[0, 0, 1]), YData::Rational(poly(&[0, 1])), None, "u").unwrap()
    }

    #[test]
    fn airy_three_point() {
        // ω₃^(0) = (1/2) ∏ dzᵢ/zᵢ².
        let c = airy();
        let t = OmegaTable::new(&c);
        let f = t.stable(0, 3).unwrap();
        assert_eq!(f.terms().0.len(), 1);
        assert_eq!(f.coeff(&vec![(0, 2), (0, 2), (0, 2)]), q(1, 2));
    }

    #[test]
    fn airy_one_point_genus_one_and_two() {
        let c = airy();
        let t = OmegaTable::new(&c);
        let f = t.stable(1, 1).unwrap();
        assert_eq!(f.terms().0.len(), 1);
        assert_eq!(f.coeff(&vec![(0, 4)]), q(1, 16));
        // Sharpness of the pole bound 6g-4+2n at genus 2: a single z^{-10}.
        let f2 = t.stable(2, 1).unwrap();
        assert_eq!(f2.terms().0.len(), 1);
        assert_eq!(f2.coeff(&vec![(0, 10)]), q(105, 1024));
        assert_eq!(f2.max_pole_order(), f2.order_bound());
    }

    #[test]
    fn airy_two_point_genus_one() {
        // ω₂^(1) = [5/(32 z₀²z₁⁶) + 3/(32 z₀⁴z₁⁴) + 5/(32 z₀⁶z₁²)].
        let c = airy();
        let t = OmegaTable::new(&c);
        let f = t.stable(1, 2).unwrap();
        assert_eq!(f.coeff(&vec![(0, 2), (0, 6)]), q(5, 32));
        assert_eq!(f.coeff(&vec![(0, 4), (0, 4)]), q(3, 32));
        assert_eq!(f.coeff(&vec![(0, 6), (0, 2)]), q(5, 32));
        assert!(f.is_symmetric());
    }

    #[test]
    fn airy_free_energies_vanish() {
        let c = airy();
        let t = OmegaTable::new(&c);
        assert!(t.fg(2).unwrap().is_zero());
        assert!(t.fg(3).unwrap().is_zero());
        assert!(t.f1_log_argument().unwrap().is_one());
    }

    #[test]
    fn dilaton_identity_on_airy() {
        // Σ Res Φ ω_{n+1} = (2g-2+n) ω_n in the engine orientation.
        let c = airy();
        let t = OmegaTable::new(&c);
        let w21 = t.stable(1, 2).unwrap();
        let reduced = t.dilaton_reduce(&w21).unwrap();
        let w11 = t.stable(1, 1).unwrap();
        match reduced {
            DilatonReduced::Form(f) => assert_eq!(f, w11.scale(&q(1, 1))),
            _ => panic!("expected a form"),
        }
        // And down to the scalar level: Σ Res Φ ω₁^(g) = (2g-2) F_g.
        let w12 = t.stable(2, 1).unwrap();
        match t.dilaton_reduce(&w12).unwrap() {
            DilatonReduced::Scalar(s) => assert!(s.is_zero()), // (2g-2)·F₂ = 0 for the Airy curve
            _ => panic!("expected a scalar"),
        }
    }

    #[test]
    fn airy_tau_b_derivative_vanishes() {
        let c = airy();
        assert!(tau_b_derivative(&c, 0).unwrap().is_zero());
    }

    #[test]
    fn tau_b_derivative_symmetry_and_translation_invariance() {
        // On x = γ(z+1/z) with α = 0 the map z → -z exchanges the two
        // branchpoints and pulls dx back to -dx, so the τ_B-derivative
        // values are each other's negatives; a translation of x changes
        // nothing.
        let oc = crate::catalog::make_quadrangulation_rational(
            &Rational::ratio(1, 7),
            &Rational::ratio(1, 2),
        )
        .unwrap();
        let v0 = tau_b_derivative(&oc.curve, 0).unwrap();
        let v1 = tau_b_derivative(&oc.curve, 1).unwrap();
        assert_eq!(v0, -&v1);
        assert!(!v0.is_zero());
        let shifted = oc
            .curve
            .apply_transform(&crate::curve::TransformSpec::MobiusX {
                a: FieldElem::one(FieldTag::Q),
                b: FieldElem::from_int(FieldTag::Q, 5),
                c: FieldElem::zero(FieldTag::Q),
                d: FieldElem::one(FieldTag::Q),
            })
            .unwrap();
        // The branchpoint order is preserved by the transform.
        assert_eq!(tau_b_derivative(&shifted, 0).unwrap(), v0);
        assert_eq!(tau_b_derivative(&shifted, 1).unwrap(), v1);
    }

    #[test]
    fn public_local_expand_matches_spec_shape() {
        // dz/z^4 about its own branchpoint: the s^{-4} principal part.
        let c = airy();
        let t = OmegaTable::new(&c);
        let f = t.stable(1, 1).unwrap();
        let ser = f
            .local_expand(0, 0, &c.branchpoint_values(), 3)
            .unwrap();
        let m4 = ser.coefficient(-4).unwrap();
        assert_eq!(m4.0.get(&vec![]).unwrap(), &q(1, 16));
        assert!(ser.coefficient(3).unwrap().is_zero());
        assert!(ser.coefficient(4).is_err());
    }

    #[test]
    fn f1_log_argument_examples() {
        // x = z² - 2, y = z³ - 3z: slope -3.
        let c = SpectralCurve::build(
            poly(&[-2, 0, 1]),
            YData::Rational(poly(&[0, -3, 0, 1])),
            None,
            "u",
        )
        .unwrap();
        assert_eq!(f1_log_argument(&c).unwrap(), q(-3, 1));
    }

    #[test]
    fn kernel_corrections_for_airy() {
        let c = airy();
        let k = kernel_h_expansion(&c, 1).unwrap();
        assert_eq!(k.corrections.len(), 2);
        // ∫ω₁^(1) at (z₁,z₂) = (2,1): (1/48)(1 - 1/8) = 7/384.
        let v = k.corrections[0].1.eval(&q(2, 1), &q(1, 1)).unwrap();
        assert_eq!(v, q(7, 384));
        // (1/6)∫³ω₃^(0) = (z₁-z₂)³/(12 z₁³z₂³): at (2,1): 1/96.
        let v = k.corrections[1].1.eval(&q(2, 1), &q(1, 1)).unwrap();
        assert_eq!(v, q(1, 96));
        let k0 = kernel_h_expansion(&c, 0).unwrap();
        assert!(k0.corrections.is_empty());
    }

    #[test]
    fn omega_residue_free_and_bounded() {
        let c = airy();
        let t = OmegaTable::new(&c);
        for (g, n) in [(0u32, 3u32), (0, 4), (1, 1), (1, 2), (2, 1)] {
            let f = t.stable(g, n).unwrap();
            f.validate_orders().unwrap();
            assert!(f.is_symmetric(), "(g,n)=({g},{n})");
        }
    }

    #[test]
    fn jobs_parallelism_is_deterministic() {
        let c = airy();
        let seq = OmegaTable::with_jobs(&c, 1).stable(1, 3).unwrap();
        let par = OmegaTable::with_jobs(&c, 3).stable(1, 3).unwrap();
        assert_eq!(*seq, *par);
    }

    #[test]
    fn weighted_two_point_residues_stay_finite() {
        // The double-pole subtraction keeps the two-boundary extraction
        // finite for every tested weight pair; on x = z + 1/z the diagonal
        // weights also have closed positive values.
        let c = SpectralCurve::build(
            UniRatFunc::new(
                ZPoly::from_ints(FieldTag::Q, &[1, 0, 1]),
                ZPoly::gen(FieldTag::Q),
            )
            .unwrap(),
            YData::Rational(UniRatFunc::new(
                ZPoly::from_ints(FieldTag::Q, &[-1, 0, 0]),
                ZPoly::gen(FieldTag::Q),
            ).unwrap()),
            None,
            "u",
        )
        .unwrap();
        let t = OmegaTable::new(&c);
        for (l1, l2) in [(2u32, 2u32), (4, 4), (6, 4), (3, 5)] {
            t.counts_at_infinity(0, 2, &[l1, l2]).unwrap();
        }
    }
}
