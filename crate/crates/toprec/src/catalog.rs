//! Constructors for the application curves: intersection-number curves,
//! one-cut map curves, colored-map (quartic two-potential) curves,
//! partition-counting curves and their relatives. Every constructor emits
//! a validated curve (or an explicit template where validation cannot
//! complete) plus the derived parameters it computed along the way.

use crate::curve::{SpectralCurve, YData};
use crate::error::{Error, Result};
use crate::field::{field_elem_from_json, rational_from_json, FieldElem, FieldTag, Rational};
use crate::ratfunc::{roots_in_field, RootReport, UniRatFunc, ZPoly};
use crate::series::{series_substitute_even, LaurentSeries};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt;

// ---------------------------------------------------------------------------
// Kontsevich-type curves (x = z²)
// ---------------------------------------------------------------------------

/// x = z², y = z - ½ Σ_k t_{k+2} z^k, over ℚ. `times[i]` is t_{i+3}.
pub fn make_kontsevich(times: &[Rational]) -> Result<SpectralCurve> {
    let tag = FieldTag::Q;
    let elems: Vec<FieldElem> = times
        .iter()
        .map(|t| FieldElem::from_rational(tag, t.clone()))
        .collect();
    make_kontsevich_in(tag, &elems)
}

/// Same construction over an arbitrary coefficient field.
pub fn make_kontsevich_in(tag: FieldTag, times: &[FieldElem]) -> Result<SpectralCurve> {
    let x = UniRatFunc::from_poly(ZPoly::monomial(FieldElem::one(tag), 2));
    let half = FieldElem::from_rational(tag, Rational::ratio(1, 2));
    // y = z - ½ (t₃ z + t₄ z² + ...)
    let mut coeffs = vec![FieldElem::zero(tag), FieldElem::one(tag)];
    for (i, t) in times.iter().enumerate() {
        let deg = i + 1;
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, FieldElem::zero(tag));
        }
        coeffs[deg] = &coeffs[deg] - &(&half * t);
    }
    let y = UniRatFunc::from_poly(ZPoly::new(tag, coeffs));
    SpectralCurve::build(x, YData::Rational(y), None, "u")
}

/// Weil-Petersson times over ℚ\[p\] (p standing for π²):
/// t_{2d+3} = (-4p)^d/(2d+1)! + 2δ_{d,0} for d = 0..order-1.
pub fn weil_petersson_times(order: usize) -> Vec<FieldElem> {
    let tag = FieldTag::Qp;
    let p = FieldElem::param(tag).expect("Qp parameter");
    let minus_4p = p.scale_int(-4);
    let mut out = vec![];
    let mut pow = FieldElem::one(tag);
    for d in 0..order {
        let fact = Rational::factorial(2 * d as u64 + 1)
            .recip()
            .expect("nonzero");
        let mut t = &pow * &FieldElem::from_rational(tag, fact);
        if d == 0 {
            t = &t + &FieldElem::from_int(tag, 2);
        }
        out.push(t);
        pow = &pow * &minus_4p;
    }
    out
}

/// The Weil-Petersson curve as a Kontsevich-type curve over ℚ\[p\], with the
/// odd times above and zero even times, truncated to `order` odd times.
pub fn make_weil_petersson(order: usize) -> Result<SpectralCurve> {
    let tag = FieldTag::Qp;
    let odd = weil_petersson_times(order);
    let mut times = vec![FieldElem::zero(tag); 2 * order];
    for (d, t) in odd.iter().enumerate() {
        times[2 * d] = t.clone();
    }
    make_kontsevich_in(tag, &times)
}

/// The Schur-transformed times: with
/// f(w) = Σ_{a≥1} (2a+1)!/a! · t_{2a+3}/(2-t₃) · w^a, the generating series
/// of the transformed times is -ln(1 - f). `odd_times[a]` is t_{2a+3}.
pub fn ttilde_series(odd_times: &[FieldElem], order: i64) -> Result<LaurentSeries> {
    let tag = odd_times
        .first()
        .map(FieldElem::tag)
        .unwrap_or(FieldTag::Q);
    let t3 = odd_times
        .first()
        .cloned()
        .unwrap_or_else(|| FieldElem::zero(tag));
    let denom = &FieldElem::from_int(tag, 2) - &t3;
    let mut coeffs = vec![FieldElem::zero(tag)];
    for a in 1..=(order as usize) {
        let t = odd_times
            .get(a)
            .cloned()
            .unwrap_or_else(|| FieldElem::zero(tag));
        let fact = &Rational::factorial(2 * a as u64 + 1)
            * &Rational::factorial(a as u64).recip().expect("nonzero");
        coeffs.push((&t * &FieldElem::from_rational(tag, fact)).try_div(&denom)?);
    }
    let f = LaurentSeries::new(tag, FieldElem::zero(tag), 0, coeffs, order);
    f.neg_log_one_minus()
}

// ---------------------------------------------------------------------------
// One-cut map curves (x = α + γ(z + 1/z))
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct OneCutCurve {
    pub curve: SpectralCurve,
    /// Expansion coefficients of V'(x(z)) = Σ u_k (z^k + z^{-k}).
    pub u: Vec<FieldElem>,
    /// Derived vertex weight t = γ·u₁.
    pub t: FieldElem,
}

/// Builds the one-cut curve for V'(x) = x - Σ_{k≥3} t_k x^{k-1} at the
/// supplied (α, γ): x = α + γ(z + 1/z), y = -Σ_{k≥1} u_k z^{-k}. The pair
/// must satisfy u₀ = 0 identically; `tks[i]` is t_{i+3}.
pub fn make_one_cut_map_curve(
    alpha: &FieldElem,
    gamma: &FieldElem,
    tks: &[Rational],
) -> Result<OneCutCurve> {
    let tag = gamma.tag();
    if gamma.is_zero() {
        return Err(Error::NotRegular("gamma must be nonzero".into()));
    }
    // V'(x) = x - Σ t_{k+3} x^{k+2}
    let mut vp = vec![FieldElem::zero(tag), FieldElem::one(tag)];
    for (i, t) in tks.iter().enumerate() {
        if vp.len() <= i + 2 {
            vp.resize(i + 3, FieldElem::zero(tag));
        }
        vp[i + 2] = FieldElem::from_rational(tag, -t);
    }
    let vprime = UniRatFunc::from_poly(ZPoly::new(tag, vp));
    let x = x_one_cut(alpha, gamma)?;
    let u = symmetric_coefficients(&vprime.compose(&x)?)?;
    if !u[0].is_zero() {
        return Err(Error::U0NotZero);
    }
    // y = -Σ_{k≥1} u_k z^{-k}
    let deg = u.len() - 1;
    let mut num = vec![FieldElem::zero(tag); deg + 1];
    for (k, uk) in u.iter().enumerate().skip(1) {
        num[deg - k] = -uk;
    }
    let y = UniRatFunc::new(
        ZPoly::new(tag, num),
        ZPoly::monomial(FieldElem::one(tag), deg),
    )?;
    let t = gamma * &u[1];
    let curve = SpectralCurve::build(
        x,
        YData::Rational(y),
        None,
        if tag == FieldTag::Qu { "gamma" } else { "u" },
    )?;
    Ok(OneCutCurve { curve, u, t })
}

fn x_one_cut(alpha: &FieldElem, gamma: &FieldElem) -> Result<UniRatFunc> {
    let tag = gamma.tag();
    UniRatFunc::new(
        ZPoly::new(tag, vec![gamma.clone(), alpha.clone(), gamma.clone()]),
        ZPoly::gen(tag),
    )
}

/// Reads a finite Laurent polynomial f = Σ c_k z^k as Σ u_k (z^k + z^{-k}),
/// checking the symmetry c_k = c_{-k}.
fn symmetric_coefficients(f: &UniRatFunc) -> Result<Vec<FieldElem>> {
    let tag = f.tag();
    let den = f.den();
    let m = den.degree();
    for i in 0..m {
        if !den.coeff(i).is_zero() {
            return Err(Error::Parse("expected a Laurent polynomial".into()));
        }
    }
    let lead = den.coeff(m);
    let num = f.num().scale(&lead.recip()?);
    let top = num.degree() as i64 - m as i64;
    let get = |k: i64| -> FieldElem {
        let idx = k + m as i64;
        if idx < 0 {
            FieldElem::zero(tag)
        } else {
            num.coeff(idx as usize)
        }
    };
    let mut u = vec![get(0).try_div(&FieldElem::from_int(tag, 2))?];
    let kmax = top.max(m as i64);
    for k in 1..=kmax {
        let ck = get(k);
        if ck != get(-k) {
            return Err(Error::IdentityFailed(
                "asymmetric expansion of V'(x(z))".into(),
            ));
        }
        u.push(ck);
    }
    Ok(u)
}

/// Quadrangulation curve (quartic potential, t₄ the face weight) with
/// formal γ: branchpoints stay at ±1 and all data lives in ℚ(γ).
pub fn make_quadrangulation_formal(t4: &Rational) -> Result<OneCutCurve> {
    let tag = FieldTag::Qu;
    let gamma = FieldElem::param(tag)?;
    make_one_cut_map_curve(
        &FieldElem::zero(tag),
        &gamma,
        &[Rational::zero(), t4.clone()],
    )
}

/// Quadrangulation curve at a rational γ.
pub fn make_quadrangulation_rational(t4: &Rational, gamma: &Rational) -> Result<OneCutCurve> {
    let tag = FieldTag::Q;
    make_one_cut_map_curve(
        &FieldElem::zero(tag),
        &FieldElem::from_rational(tag, gamma.clone()),
        &[Rational::zero(), t4.clone()],
    )
}

/// Quadrangulation curve normalized to vertex weight t = 1: the quartic
/// coupling becomes t₄ = (γ²-1)/(3γ⁴) ∈ ℚ(γ).
pub fn make_quadrangulation_t1() -> Result<OneCutCurve> {
    let tag = FieldTag::Qu;
    let g = FieldElem::param(tag)?;
    let g2 = g.pow(2);
    // y = -1/(γz) + t₄γ³/z³ with t₄γ³ = (γ²-1)/(3γ).
    let t4g3 = (&g2 - &FieldElem::one(tag)).try_div(&g.scale_int(3))?;
    let y = UniRatFunc::new(
        ZPoly::new(tag, vec![t4g3, FieldElem::zero(tag), -&g.recip()?]),
        ZPoly::monomial(FieldElem::one(tag), 3),
    )?;
    let x = x_one_cut(&FieldElem::zero(tag), &g)?;
    let curve = SpectralCurve::build(x, YData::Rational(y), None, "gamma")?;
    let u1 = g.recip()?;
    let u3 = (&FieldElem::one(tag) - &g2).try_div(&g.scale_int(3))?;
    Ok(OneCutCurve {
        curve,
        u: vec![FieldElem::zero(tag), u1, FieldElem::zero(tag), u3],
        t: FieldElem::one(tag),
    })
}

/// The series γ²(t) solving γ² = t + 3 t₄ γ⁴, to the requested order.
pub fn gamma_sq_series(t4: &Rational, order: i64) -> LaurentSeries {
    let tag = FieldTag::Q;
    let center = FieldElem::zero(tag);
    let t = LaurentSeries::new(tag, center, 1, vec![FieldElem::one(tag)], order);
    let c = FieldElem::from_rational(tag, &Rational::from_int(3) * t4);
    let mut g = t.clone();
    loop {
        let next = t.add(&g.mul(&g).scale(&c)).truncate_to(order);
        if next == g {
            return g;
        }
        g = next;
    }
}

// ---------------------------------------------------------------------------
// Quartic two-potential (spin) curve
// ---------------------------------------------------------------------------

/// Derived data of the bicolored quartic curve
/// x = γz + α₁/z + α₃/z³, y = γ/z + β₁z + β₃z³.
#[derive(Clone, Debug)]
pub struct IsingQuartic {
    pub gamma: Rational,
    pub alpha1: Rational,
    pub alpha3: Rational,
    pub beta1: Rational,
    pub beta3: Rational,
    /// Derived vertex weight t = α₁β₁ + 3α₃β₃ - γ².
    pub t: Rational,
    pub x: UniRatFunc,
    pub y: UniRatFunc,
}

/// Solves the coefficient relations
/// β₃ = -t₄γ³, α₃ = -t̃₄γ³, β₁ = t₂γ - 3t₄γ²α₁, α₁ = t̃₂γ - 3t̃₄γ²β₁
/// at the supplied γ, and derives t from α₁β₁ + 3α₃β₃ = γ² + t.
pub fn make_ising_quartic(
    t2: &Rational,
    tt2: &Rational,
    t4: &Rational,
    tt4: &Rational,
    gamma: &Rational,
) -> Result<IsingQuartic> {
    let g2 = gamma.pow(2);
    let g3 = gamma.pow(3);
    let g4 = gamma.pow(4);
    let nine = Rational::from_int(9);
    let three = Rational::from_int(3);
    let det = &Rational::one() - &(&(&nine * &(t4 * tt4)) * &g4);
    if det.is_zero() {
        return Err(Error::SingularSystem);
    }
    let alpha1 = &(gamma * &(tt2 - &(&(&three * &(t2 * tt4)) * &g2))) * &det.recip()?;
    let beta1 = &(gamma * &(t2 - &(&(&three * &(tt2 * t4)) * &g2))) * &det.recip()?;
    let alpha3 = -&(tt4 * &g3);
    let beta3 = -&(t4 * &g3);
    let t = &(&(&alpha1 * &beta1) + &(&three * &(&alpha3 * &beta3))) - &g2;
    let tag = FieldTag::Q;
    let qe = |r: &Rational| FieldElem::from_rational(tag, r.clone());
    // x = (γz⁴ + α₁z² + α₃)/z³, y = (β₃z⁴ + β₁z² + γ)/z.
    let x = UniRatFunc::new(
        ZPoly::new(
            tag,
            vec![
                qe(&alpha3),
                FieldElem::zero(tag),
                qe(&alpha1),
                FieldElem::zero(tag),
                qe(gamma),
            ],
        ),
        ZPoly::monomial(FieldElem::one(tag), 3),
    )?;
    let y = UniRatFunc::new(
        ZPoly::new(
            tag,
            vec![
                qe(gamma),
                FieldElem::zero(tag),
                qe(&beta1),
                FieldElem::zero(tag),
                qe(&beta3),
            ],
        ),
        ZPoly::gen(tag),
    )?;
    Ok(IsingQuartic {
        gamma: gamma.clone(),
        alpha1,
        alpha3,
        beta1,
        beta3,
        t,
        x,
        y,
    })
}

impl IsingQuartic {
    /// Validates the full spectral curve; branchpoints must be discovered
    /// in ℚ or supplied.
    pub fn curve(&self, supplied: Option<Vec<FieldElem>>) -> Result<SpectralCurve> {
        SpectralCurve::build(
            self.x.clone(),
            YData::Rational(self.y.clone()),
            supplied,
            "u",
        )
    }
}

// ---------------------------------------------------------------------------
// Partition-counting curves
// ---------------------------------------------------------------------------

/// Log-type curve x = E(z + 1/z - u₁), y = ln z + (u₁/2)(z - 1/z), over
/// ℚ(E) with E standing for e^{-u₀}, u₀ = -u₁²/2. The constant shift of x
/// is dropped (a symplectic translation).
pub fn make_plancherel(u1: &Rational) -> Result<SpectralCurve> {
    let tag = FieldTag::Qu;
    let e = FieldElem::param(tag)?;
    let u1e = FieldElem::from_rational(tag, u1.clone());
    let x = UniRatFunc::new(
        ZPoly::new(tag, vec![e.clone(), -&(&e * &u1e), e.clone()]),
        ZPoly::gen(tag),
    )?;
    // dy = dz/z + (u₁/2)(1 + 1/z²)dz = ((u₁/2)z² + z + u₁/2)/z²
    let half_u1 = FieldElem::from_rational(tag, &Rational::ratio(1, 2) * u1);
    let dy = UniRatFunc::new(
        ZPoly::new(tag, vec![half_u1.clone(), FieldElem::one(tag), half_u1]),
        ZPoly::monomial(FieldElem::one(tag), 2),
    )?;
    let log_terms = vec![(FieldElem::one(tag), UniRatFunc::gen(tag))];
    SpectralCurve::build(x, YData::Log { dy, log_terms }, None, "E")
}

// ---------------------------------------------------------------------------
// (p,2)-type curves (x = z² - 2u, y an odd polynomial)
// ---------------------------------------------------------------------------

/// x = z² - 2u, y = Σ_j t̄_j z^{2j+1}; a single branchpoint at z = 0.
pub fn make_minimal_p2(u: &Rational, tbar: &[Rational]) -> Result<SpectralCurve> {
    let tag = FieldTag::Q;
    let x = UniRatFunc::from_poly(ZPoly::new(
        tag,
        vec![
            FieldElem::from_rational(tag, &Rational::from_int(-2) * u),
            FieldElem::zero(tag),
            FieldElem::one(tag),
        ],
    ));
    let mut coeffs = vec![FieldElem::zero(tag); 2 * tbar.len()];
    for (j, t) in tbar.iter().enumerate() {
        coeffs[2 * j + 1] = FieldElem::from_rational(tag, t.clone());
    }
    let y = UniRatFunc::from_poly(ZPoly::new(tag, coeffs));
    SpectralCurve::build(x, YData::Rational(y), None, "u")
}

// ---------------------------------------------------------------------------
// Gaussian curve in an external field (Brownian movers)
// ---------------------------------------------------------------------------

/// Template x = z + Σᵢ εᵢ/(z - aᵢ), y = z. The branchpoints are generically
/// outside ℚ; a full curve is returned only when discovery succeeds, and
/// the blow-up classifier accepts supplied candidate points either way.
#[derive(Clone, Debug)]
pub struct GaussianExternal {
    pub x: UniRatFunc,
    pub y: UniRatFunc,
    pub root_report: RootReport,
    pub curve: Option<SpectralCurve>,
}

pub fn make_gaussian_external(eps: &[Rational], centers: &[Rational]) -> Result<GaussianExternal> {
    let tag = FieldTag::Q;
    assert_eq!(eps.len(), centers.len());
    for i in 0..centers.len() {
        for j in (i + 1)..centers.len() {
            if centers[i] == centers[j] {
                return Err(Error::CoincidentBranchpoints);
            }
        }
    }
    let mut x = UniRatFunc::gen(tag);
    for (e, a) in eps.iter().zip(centers) {
        let term = UniRatFunc::new(
            ZPoly::constant(FieldElem::from_rational(tag, e.clone())),
            ZPoly::new(
                tag,
                vec![
                    FieldElem::from_rational(tag, -a),
                    FieldElem::one(tag),
                ],
            ),
        )?;
        x = x.add(&term)?;
    }
    let y = UniRatFunc::gen(tag);
    let xp = x.derivative()?;
    let root_report = roots_in_field(xp.num());
    let curve = if root_report.unfactored_degree == 0
        && root_report.roots.iter().all(|(_, m)| *m == 1)
    {
        SpectralCurve::build(x.clone(), YData::Rational(y.clone()), None, "u").ok()
    } else {
        None
    };
    Ok(GaussianExternal {
        x,
        y,
        root_report,
        curve,
    })
}

// ---------------------------------------------------------------------------
// q-deformed partition curve and its mirror identity
// ---------------------------------------------------------------------------

/// Formal sum of logarithms of rational functions, canonicalized to monic
/// linear (or irreducible leftover) factors plus a prime-factored constant
/// part. Equality of two such expressions is exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogExpr {
    /// Coefficient per monic factor, keyed by its coefficient list.
    factors: BTreeMap<Vec<String>, Rational>,
    /// Coefficient per prime of the constant inside the logs.
    scalar_primes: BTreeMap<BigInt, Rational>,
    /// Coefficient of ln(-1).
    minus_one: Rational,
}

impl LogExpr {
    pub fn zero() -> Self {
        LogExpr {
            factors: BTreeMap::new(),
            scalar_primes: BTreeMap::new(),
            minus_one: Rational::zero(),
        }
    }

    /// Adds c·ln(arg) for a rational-function argument.
    pub fn add_term(&mut self, c: &Rational, arg: &UniRatFunc) -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        self.accumulate_poly(c, arg.num())?;
        self.accumulate_poly(&-c, arg.den())?;
        Ok(())
    }

    fn accumulate_poly(&mut self, c: &Rational, p: &ZPoly) -> Result<()> {
        if p.is_zero() {
            return Err(Error::Parse("ln of the zero function".into()));
        }
        if p.is_constant() {
            let r = p
                .coeff(0)
                .as_rational()
                .ok_or_else(|| Error::Parse("non-rational log constant".into()))?;
            self.accumulate_scalar(c, &r)?;
            return Ok(());
        }
        let report = roots_in_field(p);
        let lead = p
            .leading()
            .as_rational()
            .ok_or_else(|| Error::Parse("non-rational leading coefficient".into()))?;
        self.accumulate_scalar(c, &lead)?;
        let tag = p.tag();
        let mut rem = p.scale(&p.leading().recip()?);
        for (root, mult) in &report.roots {
            let lin = ZPoly::new(tag, vec![-root, FieldElem::one(tag)]);
            for _ in 0..*mult {
                let key: Vec<String> = lin.coeffs().iter().map(|x| x.to_string()).collect();
                let entry = self.factors.entry(key).or_insert_with(Rational::zero);
                *entry = &*entry + c;
                rem = rem.div_rem(&lin)?.0;
            }
        }
        if !rem.is_constant() {
            // Keep the monic irreducible leftover as one factor unit.
            let key: Vec<String> = rem.coeffs().iter().map(|x| x.to_string()).collect();
            let entry = self.factors.entry(key).or_insert_with(Rational::zero);
            *entry = &*entry + c;
        }
        self.factors.retain(|_, v| !v.is_zero());
        Ok(())
    }

    fn accumulate_scalar(&mut self, c: &Rational, r: &Rational) -> Result<()> {
        if r.is_zero() {
            return Err(Error::Parse("ln of zero".into()));
        }
        if r.is_negative() {
            self.minus_one = &self.minus_one + c;
        }
        for (prime, e) in factor_big(&r.numerator().abs()) {
            let entry = self
                .scalar_primes
                .entry(prime)
                .or_insert_with(Rational::zero);
            *entry = &*entry + &(c * &Rational::from_int(e));
        }
        for (prime, e) in factor_big(r.denominator()) {
            let entry = self
                .scalar_primes
                .entry(prime)
                .or_insert_with(Rational::zero);
            *entry = &*entry - &(c * &Rational::from_int(e));
        }
        self.scalar_primes.retain(|_, v| !v.is_zero());
        Ok(())
    }

    /// exp(self) as a rational function; every factor exponent and the
    /// constant part must exponentiate rationally.
    pub fn exp(&self, tag: FieldTag) -> Result<UniRatFunc> {
        let mut out = UniRatFunc::constant(FieldElem::one(tag));
        for (key, c) in &self.factors {
            if !c.is_integer() {
                return Err(Error::IdentityFailed(
                    "exp of a fractional log coefficient".into(),
                ));
            }
            let coeffs: Vec<FieldElem> = key
                .iter()
                .map(|s| Ok(FieldElem::from_rational(tag, Rational::parse(s)?)))
                .collect::<Result<_>>()?;
            let base = UniRatFunc::from_poly(ZPoly::new(tag, coeffs));
            let e: i64 = c
                .numerator()
                .try_into()
                .map_err(|_| Error::Parse("huge exponent".into()))?;
            let powed = base.pow(e.unsigned_abs() as u32)?;
            out = if e >= 0 {
                out.mul(&powed)?
            } else {
                out.div(&powed)?
            };
        }
        let mut scalar = Rational::one();
        for (prime, c) in &self.scalar_primes {
            if !c.is_integer() {
                return Err(Error::IdentityFailed(
                    "exp of a fractional scalar-log coefficient".into(),
                ));
            }
            let e: i64 = c
                .numerator()
                .try_into()
                .map_err(|_| Error::Parse("huge exponent".into()))?;
            let base = Rational::new(prime.clone(), BigInt::one())?;
            let powed = base.pow(e.unsigned_abs() as u32);
            scalar = if e >= 0 {
                &scalar * &powed
            } else {
                &scalar * &powed.recip()?
            };
        }
        if !self.minus_one.is_zero() {
            if !self.minus_one.is_integer() {
                return Err(Error::IdentityFailed("exp of fractional ln(-1)".into()));
            }
            if (self.minus_one.numerator() % BigInt::from(2)).abs() == BigInt::one() {
                scalar = -scalar;
            }
        }
        out.scale(&FieldElem::from_rational(tag, scalar))
    }
}

fn factor_big(n: &BigInt) -> Vec<(BigInt, i64)> {
    let mut n = n.clone();
    let mut out = vec![];
    if n.is_zero() || n.is_one() {
        return out;
    }
    let mut d = BigInt::from(2);
    while &d * &d <= n {
        let mut e = 0;
        while (&n % &d).is_zero() {
            n /= &d;
            e += 1;
        }
        if e > 0 {
            out.push((d.clone(), e));
        }
        d += 1;
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

/// The two symplectically-equivalent partition curves and the exact mirror
/// identities relating them.
#[derive(Clone, Debug)]
pub struct QPlancherelPair {
    /// Rational x of the first curve.
    pub x_a: UniRatFunc,
    /// y_a = prefactor · body with prefactor = 1/x_a.
    pub y_a_prefactor: UniRatFunc,
    pub y_a_body: LogExpr,
    /// Mirror curve: x̃ and ỹ as log expressions.
    pub x_b: LogExpr,
    pub y_b: LogExpr,
    /// Normalization (1 + 1/z₀)².
    pub c: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MirrorReport {
    /// e^{x̃} = c·x holds exactly.
    pub exp_xb_is_c_times_x: bool,
    /// x·y = ỹ holds exactly in the log algebra.
    pub x_times_y_is_yb: bool,
}

/// Builds the q-deformed partition curve and its mirror form at z₀, p, and
/// verifies the equivalence identities exactly. z₀ must avoid {0, ±1}.
pub fn make_q_plancherel(z0: &Rational, p: i64) -> Result<(QPlancherelPair, MirrorReport)> {
    if z0.is_zero() || z0.abs().is_one() {
        return Err(Error::Parse("z0 must avoid {0, 1, -1}".into()));
    }
    let tag = FieldTag::Q;
    let qe = |r: &Rational| FieldElem::from_rational(tag, r.clone());
    let z0inv = z0.recip()?;
    // u = (1 - z/z₀)(1 - 1/(z z₀)), c = (1 + 1/z₀)².
    let f1 = UniRatFunc::from_poly(ZPoly::new(tag, vec![FieldElem::one(tag), qe(&-&z0inv)]));
    let f2 = UniRatFunc::new(
        ZPoly::new(tag, vec![qe(&-&z0inv), FieldElem::one(tag)]),
        ZPoly::gen(tag),
    )?;
    let u = f1.mul(&f2)?;
    let c = (&Rational::one() + &z0inv).pow(2);
    let x_a = u.scale(&qe(&c.recip()?))?;

    let half_p = Rational::ratio(p, 2);
    let ratio = f1.div(&f2)?;
    let mut y_a_body = LogExpr::zero();
    y_a_body.add_term(&Rational::from_int(-1), &UniRatFunc::gen(tag))?;
    y_a_body.add_term(&half_p, &ratio)?;

    let mut x_b = LogExpr::zero();
    x_b.add_term(&Rational::one(), &u)?;
    let mut y_b = LogExpr::zero();
    y_b.add_term(&Rational::from_int(-1), &UniRatFunc::gen(tag))?;
    y_b.add_term(&half_p, &f1)?;
    y_b.add_term(&-&half_p, &f2)?;

    let y_a_prefactor = UniRatFunc::constant(FieldElem::one(tag)).div(&x_a)?;

    let pair = QPlancherelPair {
        x_a,
        y_a_prefactor,
        y_a_body,
        x_b,
        y_b,
        c,
    };
    let report = pair.verify()?;
    Ok((pair, report))
}

impl QPlancherelPair {
    pub fn verify(&self) -> Result<MirrorReport> {
        let tag = FieldTag::Q;
        let lhs = self.x_b.exp(tag)?;
        let rhs = self
            .x_a
            .scale(&FieldElem::from_rational(tag, self.c.clone()))?;
        let exp_ok = lhs == rhs;
        let unit = self.x_a.mul(&self.y_a_prefactor)?;
        let pref_ok = unit == UniRatFunc::constant(FieldElem::one(tag));
        let body_ok = self.y_a_body == self.y_b;
        let report = MirrorReport {
            exp_xb_is_c_times_x: exp_ok,
            x_times_y_is_yb: pref_ok && body_ok,
        };
        if !report.exp_xb_is_c_times_x || !report.x_times_y_is_yb {
            return Err(Error::IdentityFailed("mirror identity".into()));
        }
        Ok(report)
    }
}

// ---------------------------------------------------------------------------
// Family specifications (JSON)
// ---------------------------------------------------------------------------

/// What a family constructor produced.
pub enum CatalogOutput {
    Curve(SpectralCurve),
    Mirror(Box<QPlancherelPair>, MirrorReport),
    Template(Box<GaussianExternal>),
}

pub struct CatalogResult {
    pub output: CatalogOutput,
    /// Derived parameters, for display.
    pub derived: Vec<(String, String)>,
}

/// Builds a curve from a FamilySpec document like
/// `{"family":"quadrangulation","t4":"1/1","mode":"formal-gamma"}`.
pub fn family_from_json(v: &Value) -> Result<CatalogResult> {
    let fam = v
        .get("family")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse("missing \"family\"".into()))?;
    let rat = |key: &str| -> Result<Rational> {
        rational_from_json(
            v.get(key)
                .ok_or_else(|| Error::Parse(format!("missing \"{key}\"")))?,
        )
    };
    let rat_or = |key: &str, default: Rational| -> Result<Rational> {
        match v.get(key) {
            Some(x) => rational_from_json(x),
            None => Ok(default),
        }
    };
    let rat_list = |key: &str| -> Result<Vec<Rational>> {
        match v.get(key) {
            None => Ok(vec![]),
            Some(Value::Array(a)) => a.iter().map(rational_from_json).collect(),
            Some(other) => Err(Error::Parse(format!(
                "\"{key}\" must be an array, got {other}"
            ))),
        }
    };
    match fam {
        "airy" => Ok(CatalogResult {
            output: CatalogOutput::Curve(make_kontsevich(&[])?),
            derived: vec![],
        }),
        "kontsevich" => {
            let times = rat_list("times")?;
            Ok(CatalogResult {
                output: CatalogOutput::Curve(make_kontsevich(&times)?),
                derived: vec![],
            })
        }
        "weil-petersson" => {
            let order = v.get("order").and_then(Value::as_u64).unwrap_or(4) as usize;
            let times = weil_petersson_times(order);
            let derived = times
                .iter()
                .enumerate()
                .map(|(d, t)| (format!("t{}", 2 * d + 3), t.display_with("p")))
                .collect();
            Ok(CatalogResult {
                output: CatalogOutput::Curve(make_weil_petersson(order)?),
                derived,
            })
        }
        "quadrangulation" => {
            let t4 = rat_or("t4", Rational::one())?;
            let mode = v
                .get("mode")
                .and_then(Value::as_str)
                .unwrap_or("formal-gamma");
            let oc = match mode {
                "formal-gamma" => make_quadrangulation_formal(&t4)?,
                "t1" => make_quadrangulation_t1()?,
                "rational-gamma" => make_quadrangulation_rational(&t4, &rat("gamma")?)?,
                other => return Err(Error::Parse(format!("unknown mode {other:?}"))),
            };
            let derived = vec![
                ("t".into(), oc.t.display_with("gamma")),
                (
                    "u".into(),
                    format!(
                        "[{}]",
                        oc.u
                            .iter()
                            .map(|x| x.display_with("gamma"))
                            .collect::<Vec<_>>()
                            .join(", ")
                    ),
                ),
            ];
            Ok(CatalogResult {
                output: CatalogOutput::Curve(oc.curve),
                derived,
            })
        }
        "one-cut-map" => {
            let alpha = rat_or("alpha", Rational::zero())?;
            let gamma = rat("gamma")?;
            let tks = rat_list("tks")?;
            let tag = FieldTag::Q;
            let oc = make_one_cut_map_curve(
                &FieldElem::from_rational(tag, alpha),
                &FieldElem::from_rational(tag, gamma),
                &tks,
            )?;
            let derived = vec![("t".into(), oc.t.to_string())];
            Ok(CatalogResult {
                output: CatalogOutput::Curve(oc.curve),
                derived,
            })
        }
        "ising-quartic" => {
            let q = make_ising_quartic(
                &rat("t2")?,
                &rat("tt2")?,
                &rat_or("t4", Rational::zero())?,
                &rat_or("tt4", Rational::zero())?,
                &rat("gamma")?,
            )?;
            let derived = vec![
                ("alpha1".into(), q.alpha1.to_string()),
                ("alpha3".into(), q.alpha3.to_string()),
                ("beta1".into(), q.beta1.to_string()),
                ("beta3".into(), q.beta3.to_string()),
                ("t".into(), q.t.to_string()),
            ];
            let supplied = match v.get("branchpoints") {
                Some(Value::Array(a)) => Some(
                    a.iter()
                        .map(|b| field_elem_from_json(FieldTag::Q, b))
                        .collect::<Result<Vec<_>>>()?,
                ),
                _ => None,
            };
            Ok(CatalogResult {
                output: CatalogOutput::Curve(q.curve(supplied)?),
                derived,
            })
        }
        "plancherel-trivial" => Ok(CatalogResult {
            output: CatalogOutput::Curve(make_plancherel(&Rational::zero())?),
            derived: vec![("u0".into(), "0".into())],
        }),
        "plancherel" | "plancherel-t2" => {
            let u1 = rat("u1")?;
            let u0 = -&(&Rational::ratio(1, 2) * &u1.pow(2));
            Ok(CatalogResult {
                output: CatalogOutput::Curve(make_plancherel(&u1)?),
                derived: vec![("u0".into(), u0.to_string())],
            })
        }
        "q-plancherel" => {
            let z0 = rat("z0")?;
            let p = v.get("p").and_then(Value::as_i64).unwrap_or(1);
            let (pair, report) = make_q_plancherel(&z0, p)?;
            let derived = vec![
                ("c".into(), pair.c.to_string()),
                (
                    "identities".into(),
                    format!(
                        "exp(xt) = c*x: {}, x*y = yt: {}",
                        report.exp_xb_is_c_times_x, report.x_times_y_is_yb
                    ),
                ),
            ];
            Ok(CatalogResult {
                output: CatalogOutput::Mirror(Box::new(pair), report),
                derived,
            })
        }
        "gaussian-external" => {
            let eps = rat_list("eps")?;
            let centers = rat_list("a")?;
            let t = make_gaussian_external(&eps, &centers)?;
            let derived = vec![(
                "branchpoints".into(),
                format!(
                    "{} in-field, unfactored degree {}",
                    t.root_report.roots.len(),
                    t.root_report.unfactored_degree
                ),
            )];
            Ok(CatalogResult {
                output: CatalogOutput::Template(Box::new(t)),
                derived,
            })
        }
        "minimal-p2" => {
            let u = rat_or("u", Rational::zero())?;
            let tbar = rat_list("tbar")?;
            Ok(CatalogResult {
                output: CatalogOutput::Curve(make_minimal_p2(&u, &tbar)?),
                derived: vec![],
            })
        }
        other => Err(Error::Parse(format!("unknown family {other:?}"))),
    }
}

/// Loads either a FamilySpec (object with "family") or a raw curve-spec
/// document.
pub fn curve_or_family_from_json(v: &Value) -> Result<CatalogResult> {
    if v.get("family").is_some() {
        family_from_json(v)
    } else {
        Ok(CatalogResult {
            output: CatalogOutput::Curve(crate::curve::curve_from_json(v)?),
            derived: vec![],
        })
    }
}

// ---------------------------------------------------------------------------
// Count tables
// ---------------------------------------------------------------------------

/// Extracted enumerative data with provenance.
#[derive(Clone, Debug)]
pub struct CountTable {
    pub family: String,
    pub genus: u32,
    pub perimeters: Vec<u32>,
    /// (number of faces, count); counts are exact rationals (integers for
    /// the rooted one-boundary cases).
    pub counts: Vec<(u32, Rational)>,
    pub provenance: String,
}

impl fmt::Display for CountTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} genus {} perimeters {:?} ({})",
            self.family, self.genus, self.perimeters, self.provenance
        )?;
        for (n, c) in &self.counts {
            writeln!(f, "  faces {n}: {c}")?;
        }
        Ok(())
    }
}

/// Full quadrangulation-count pipeline: formal-γ curve → recursion →
/// residues at infinity → γ²-series substitution → coefficient table.
/// Counts are indexed by the total number of faces (marked included).
pub fn quadrangulation_counts(
    t4: &Rational,
    genus: u32,
    perimeters: &[u32],
    max_faces: u32,
) -> Result<CountTable> {
    let oc = make_quadrangulation_formal(t4)?;
    let n = perimeters.len() as u32;
    let table = crate::engine::OmegaTable::new(&oc.curve);
    let value = table.counts_at_infinity(genus, n, perimeters)?;
    // t-exponent for a quadrangulation with f faces: v = 2 - 2g + f.
    let v_of_faces = |f: u32| 2 + f as i64 - 2 * genus as i64;
    let order = v_of_faces(max_faces);
    let gsq = gamma_sq_series(t4, order + 2);
    let series = series_substitute_even(&value, &gsq, order)?;
    let mut counts = vec![];
    let min_faces = if genus == 0 { n } else { 1 };
    for f in min_faces..=max_faces {
        let v = v_of_faces(f);
        let c = series.coefficient(v)?;
        let r = c
            .as_rational()
            .ok_or_else(|| Error::Parse("count is not rational".into()))?;
        counts.push((f, r));
    }
    Ok(CountTable {
        family: "quadrangulation".into(),
        genus,
        perimeters: perimeters.to_vec(),
        counts,
        provenance: format!("recursion + residue extraction at t4 = {t4}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::f1_log_argument;

    fn r(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn kontsevich_examples() {
        let c = make_kontsevich(&[]).unwrap();
        assert_eq!(
            c.x(),
            &UniRatFunc::from_poly(ZPoly::from_ints(FieldTag::Q, &[0, 0, 1]))
        );
        assert!(f1_log_argument(&c).unwrap().is_one());
        // t₃ = 1: slope 1 - t₃/2 = 1/2.
        let c = make_kontsevich(&[r(1, 1)]).unwrap();
        assert_eq!(f1_log_argument(&c).unwrap(), FieldElem::Q(r(1, 2)));
        // t₃ = 2 degenerates.
        assert!(matches!(
            make_kontsevich(&[r(2, 1)]),
            Err(Error::NotRegular(_))
        ));
    }

    #[test]
    fn weil_petersson_times_values() {
        // t₃ = 3, t₅ = -2p/3, t₇ = 2p²/15.
        let t = weil_petersson_times(3);
        let p = FieldElem::param(FieldTag::Qp).unwrap();
        assert_eq!(t[0], FieldElem::from_int(FieldTag::Qp, 3));
        assert_eq!(
            t[1],
            p.scale_int(-2)
                .try_div(&FieldElem::from_int(FieldTag::Qp, 3))
                .unwrap()
        );
        assert_eq!(
            t[2],
            p.pow(2)
                .scale_int(2)
                .try_div(&FieldElem::from_int(FieldTag::Qp, 15))
                .unwrap()
        );
        // t̃₁ = 4p and the higher transformed times vanish (the series
        // needs times through t₁₁ to pin t̃₄).
        let t = weil_petersson_times(5);
        let tt = ttilde_series(&t, 4).unwrap();
        assert_eq!(tt.coefficient(1).unwrap(), p.scale_int(4));
        for e in 2..=4 {
            assert!(tt.coefficient(e).unwrap().is_zero(), "ttilde_{e}");
        }
    }

    #[test]
    fn quadrangulation_derived_weight() {
        // t = γ² - 3t₄γ⁴; u₁ = γ - 3t₄γ³, u₃ = -t₄γ³.
        let oc = make_quadrangulation_formal(&r(1, 1)).unwrap();
        let g = FieldElem::param(FieldTag::Qu).unwrap();
        let expect_t = &g.pow(2) - &g.pow(4).scale_int(3);
        assert_eq!(oc.t, expect_t);
        assert_eq!(oc.u[1], &g - &g.pow(3).scale_int(3));
        assert!(oc.u[2].is_zero());
        assert_eq!(oc.u[3], -&g.pow(3));
        assert!(oc.u[0].is_zero());
    }

    #[test]
    fn gamma_sq_series_matches_closed_form() {
        // γ² = (1 - √(1-12 t t₄))/(6 t₄): compare against the binomial
        // expansion of the square root at t₄ = 1.
        let order = 8;
        let got = gamma_sq_series(&r(1, 1), order);
        let mut binom = vec![Rational::one()];
        for k in 1..=order as usize {
            let prev = binom[k - 1].clone();
            let num = &r(1, 2) - &Rational::from_int(k as i64 - 1);
            binom.push(&prev * &(&num * &Rational::from_int(k as i64).recip().unwrap()));
        }
        for e in 1..=order {
            let c = &binom[e as usize] * &r(-12, 1).pow(e as u32);
            let expect = &-&c * &r(1, 6);
            assert_eq!(got.coefficient(e).unwrap(), FieldElem::Q(expect), "order {e}");
        }
    }

    #[test]
    fn even_substitution_recovers_planar_counts() {
        // T₄^(0) = γ⁴(3t - γ²) = 2γ⁶ - 9t₄γ⁸ at t₄ = 1: 2t³ + 9t⁴ + 54t⁵...
        let g = FieldElem::param(FieldTag::Qu).unwrap();
        let v = &g.pow(6).scale_int(2) - &g.pow(8).scale_int(9);
        let gsq = gamma_sq_series(&r(1, 1), 8);
        let s = series_substitute_even(&v, &gsq, 6).unwrap();
        assert_eq!(s.coefficient(3).unwrap(), FieldElem::Q(r(2, 1)));
        assert_eq!(s.coefficient(4).unwrap(), FieldElem::Q(r(9, 1)));
        assert_eq!(s.coefficient(5).unwrap(), FieldElem::Q(r(54, 1)));
        assert_eq!(s.coefficient(6).unwrap(), FieldElem::Q(r(378, 1)));
        // γ² maps to the input series itself; odd elements are rejected.
        let back = series_substitute_even(&g.pow(2), &gsq, 6).unwrap();
        assert_eq!(back.coefficient(1).unwrap(), gsq.coefficient(1).unwrap());
        assert_eq!(back.coefficient(4).unwrap(), gsq.coefficient(4).unwrap());
        assert!(matches!(
            series_substitute_even(&g.pow(3), &gsq, 4),
            Err(Error::OddParity)
        ));
    }

    #[test]
    fn one_cut_cubic_with_solved_alpha() {
        // α = 1, γ = 1 forces t₃ = 1/3 for u₀ = 0.
        let tag = FieldTag::Q;
        let oc = make_one_cut_map_curve(
            &FieldElem::from_int(tag, 1),
            &FieldElem::from_int(tag, 1),
            &[r(1, 3)],
        )
        .unwrap();
        assert!(oc.u[0].is_zero());
        // 2u₀ = α - t₃(α² + 2γ²) has roots α ∈ {1, 2} here; α = 3 violates it.
        let e = make_one_cut_map_curve(
            &FieldElem::from_int(tag, 3),
            &FieldElem::from_int(tag, 1),
            &[r(1, 3)],
        );
        assert!(matches!(e, Err(Error::U0NotZero)));
    }

    #[test]
    fn ising_quartic_examples() {
        // Degenerate-Gaussian sanity: t₄ = t̃₄ = 0, t₂ = t̃₂ = 2, γ = 1.
        let q = make_ising_quartic(&r(2, 1), &r(2, 1), &r(0, 1), &r(0, 1), &r(1, 1)).unwrap();
        assert_eq!(q.alpha1, r(2, 1));
        assert_eq!(q.beta1, r(2, 1));
        assert_eq!(q.t, r(3, 1));
        // Branchpoints of x = z + 2/z are ±√2: not in ℚ.
        assert!(matches!(
            q.curve(None),
            Err(Error::BranchpointNotInField { .. })
        ));

        // Generic rational inputs satisfy the γ²-relation
        // 3t₄t̃₄γ⁴ + (t₂-3t̃₂t₄γ²)(t̃₂-3t₂t̃₄γ²)/(1-9t₄t̃₄γ⁴)² = 1 + t/γ².
        let (t2, tt2, t4, tt4, g) = (r(2, 1), r(3, 1), r(1, 5), r(1, 7), r(1, 2));
        let q = make_ising_quartic(&t2, &tt2, &t4, &tt4, &g).unwrap();
        let g2 = g.pow(2);
        let det = &Rational::one() - &(&(&r(9, 1) * &(&t4 * &tt4)) * &g2.pow(2));
        let lhs = &(&(&r(3, 1) * &(&t4 * &tt4)) * &g2.pow(2))
            + &(&(&(&t2 - &(&(&r(3, 1) * &(&tt2 * &t4)) * &g2))
                * &(&tt2 - &(&(&r(3, 1) * &(&t2 * &tt4)) * &g2)))
                * &det.pow(2).recip().unwrap());
        let rhs = &Rational::one() + &(&q.t * &g2.recip().unwrap());
        assert_eq!(lhs, rhs);

        // 1 - 9t₄t̃₄γ⁴ = 0 is refused.
        assert!(matches!(
            make_ising_quartic(&r(2, 1), &r(2, 1), &r(1, 3), &r(1, 3), &r(1, 1)),
            Err(Error::SingularSystem)
        ));
    }

    #[test]
    fn ising_quartic_with_engineered_rational_branchpoints() {
        // Engineer γz⁴ - α₁z² - 3α₃ = (z²-1)(z²-4): α₁ = 5, α₃ = -4/3 at
        // γ = 1, so t̃₄ = 4/3; pick t₂ and solve t̃₂ from the α₁-relation.
        let g = r(1, 1);
        let tt4 = r(4, 3);
        let t4 = r(1, 10);
        let t2 = r(1, 1);
        let det = &Rational::one() - &(&r(9, 1) * &(&t4 * &tt4));
        let tt2 = &(&r(5, 1) * &det) + &(&r(3, 1) * &(&t2 * &tt4));
        let q = make_ising_quartic(&t2, &tt2, &t4, &tt4, &g).unwrap();
        assert_eq!(q.alpha1, r(5, 1));
        assert_eq!(q.alpha3, -r(4, 3));
        let bps = vec![
            FieldElem::from_int(FieldTag::Q, 1),
            FieldElem::from_int(FieldTag::Q, -1),
            FieldElem::from_int(FieldTag::Q, 2),
            FieldElem::from_int(FieldTag::Q, -2),
        ];
        let curve = q.curve(Some(bps)).unwrap();
        assert_eq!(curve.branchpoints().len(), 4);
    }

    #[test]
    fn plancherel_curves() {
        let c = make_plancherel(&Rational::zero()).unwrap();
        assert_eq!(c.branchpoints().len(), 2);
        // u₁ = 1 makes dy vanish at z = -1 (1 + 2u₀ = 0).
        assert!(matches!(
            make_plancherel(&Rational::one()),
            Err(Error::NotRegular(_))
        ));
    }

    #[test]
    fn minimal_p2_examples() {
        // Pure gravity: x = z² - 2, y = z³ - 3z.
        let c = make_minimal_p2(&r(1, 1), &[r(-3, 1), r(1, 1)]).unwrap();
        assert_eq!(
            c.ydata().rational().unwrap(),
            &UniRatFunc::from_poly(ZPoly::from_ints(FieldTag::Q, &[0, -3, 0, 1]))
        );
        // u = 0, t̄ = [1]: the Airy curve.
        let c = make_minimal_p2(&r(0, 1), &[r(1, 1)]).unwrap();
        assert_eq!(
            c.x(),
            &UniRatFunc::from_poly(ZPoly::from_ints(FieldTag::Q, &[0, 0, 1]))
        );
        // y = z³ alone has dy(0) = 0.
        assert!(make_minimal_p2(&r(0, 1), &[r(0, 1), r(1, 1)]).is_err());
    }

    #[test]
    fn gaussian_external_template() {
        // ε = [1], a = [0]: x = z + 1/z, branchpoints ±1 in ℚ.
        let t = make_gaussian_external(&[r(1, 1)], &[r(0, 1)]).unwrap();
        let c = t.curve.expect("discovered curve");
        assert_eq!(c.branchpoints().len(), 2);
        use crate::curve::{classify_branchpoint, Classification};
        let cls =
            classify_branchpoint(c.x(), c.ydata(), &FieldElem::from_int(FieldTag::Q, 1)).unwrap();
        assert!(matches!(cls, Classification::Regular { .. }));

        // Tuned merged pair: x = z + ½/(z-1) + ½/(z+1) has a double zero of
        // x' at the origin — the cusp-type blow-up report.
        let t = make_gaussian_external(&[r(1, 2), r(1, 2)], &[r(1, 1), r(-1, 1)]).unwrap();
        assert!(t.curve.is_none());
        let cls = classify_branchpoint(
            &t.x,
            &YData::Rational(t.y.clone()),
            &FieldElem::zero(FieldTag::Q),
        )
        .unwrap();
        assert_eq!(cls, Classification::Singular { p: 1, q: 3 });
    }

    #[test]
    fn q_plancherel_identities() {
        for p in [0i64, 1, 2] {
            let (_, report) = make_q_plancherel(&r(2, 1), p).unwrap();
            assert!(report.exp_xb_is_c_times_x);
            assert!(report.x_times_y_is_yb);
        }
        assert!(make_q_plancherel(&r(1, 1), 1).is_err());
    }

    #[test]
    fn planar_quadrangulation_pipeline() {
        let table = quadrangulation_counts(&r(1, 1), 0, &[4], 4).unwrap();
        let got: Vec<Rational> = table.counts.iter().map(|(_, c)| c.clone()).collect();
        assert_eq!(got, vec![r(2, 1), r(9, 1), r(54, 1), r(378, 1)]);
    }

    #[test]
    fn involution_identities_across_the_catalog() {
        // σ(σ(s)) = s and (implicitly, from construction) x(a+σ) = x(a+s)
        // to working order, for one representative of each family shape.
        let curves = vec![
            make_kontsevich(&[r(1, 2), r(0, 1), r(1, 3)]).unwrap(),
            make_quadrangulation_formal(&r(1, 1)).unwrap().curve,
            make_minimal_p2(&r(1, 1), &[r(-3, 1), r(1, 1)]).unwrap(),
            make_plancherel(&r(1, 2)).unwrap(),
        ];
        for curve in &curves {
            for b in curve.branchpoints() {
                let twice = b.sigma.compose(&b.sigma).unwrap();
                let order = twice.valid_order().min(10);
                assert!(
                    (&twice.coefficient(1).unwrap() - &FieldElem::one(curve.tag())).is_zero()
                );
                for e in 2..=order {
                    assert!(twice.coefficient(e).unwrap().is_zero());
                }
            }
        }
    }
}
