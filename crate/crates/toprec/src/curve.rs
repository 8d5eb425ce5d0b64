//! Spectral-curve data model: regularity validation, branchpoint discovery
//! and per-branchpoint local analysis.
//!
//! A curve is the pair `(x(z), y(z))` on the Riemann sphere with x a
//! rational function of the uniformizer. y is either rational or log-type
//! (rational dy plus constant-coefficient log terms; the additive constants
//! of y are dropped per branchpoint — the recursion only consumes y through
//! dy, y(z)-y(z̄) and local primitives paired with residue-free forms).
//!
//! Regularity means every zero of dx is simple and dy does not vanish
//! there; local data at a branchpoint `a` consists of the involution series
//! σ with x(a+σ(s)) = x(a+s), the y-series modulo its constant, and the
//! primitive Φ with dΦ = y dx and Φ(a) = 0.

use crate::error::{Error, Result};
use crate::field::{field_elem_from_json, field_elem_to_json, FieldElem, FieldTag};
use crate::ratfunc::{ratfunc_from_json, ratfunc_to_json, roots_in_field, UniRatFunc, ZPoly};
use crate::series::{laurent_expand, LaurentSeries};
use serde_json::Value;

/// Default local order for branch data populated at build time. Consumers
/// with deeper needs recompute via [`SpectralCurve::branch_local`].
pub const DEFAULT_LOCAL_ORDER: i64 = 16;

// ---------------------------------------------------------------------------
// Curve data
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum YData {
    /// y itself is a rational function of z.
    Rational(UniRatFunc),
    /// y = (rational part) + Σ cᵢ·ln(argᵢ(z)) up to constants, carried by
    /// its rational differential plus the log structure.
    Log {
        dy: UniRatFunc,
        log_terms: Vec<(FieldElem, UniRatFunc)>,
    },
}

impl YData {
    pub fn dy(&self) -> Result<UniRatFunc> {
        match self {
            YData::Rational(y) => y.derivative(),
            YData::Log { dy, .. } => Ok(dy.clone()),
        }
    }

    pub fn rational(&self) -> Option<&UniRatFunc> {
        match self {
            YData::Rational(y) => Some(y),
            YData::Log { .. } => None,
        }
    }
}

/// Cached local analysis at one branchpoint.
#[derive(Clone, Debug)]
pub struct BranchData {
    /// Branchpoint location.
    pub a: FieldElem,
    /// Involution series: z̄ = a + σ(s) with σ(s) = -s + c₂s² + ...
    pub sigma: LaurentSeries,
    /// y(a+s) modulo its additive constant.
    pub y_series: LaurentSeries,
    /// Φ(a+s) = ∫ y dx with constant term 0.
    pub phi_series: LaurentSeries,
    /// x''(a)/2, the leading coefficient of x(a+s) - x(a).
    pub xpp_half: FieldElem,
    /// Square of the square-root slope: (linear y coefficient)² / (x''/2).
    pub y_prime_sq: FieldElem,
}

#[derive(Clone, Debug)]
pub struct SpectralCurve {
    tag: FieldTag,
    param_name: String,
    x: UniRatFunc,
    ydata: YData,
    branch: Vec<BranchData>,
}

impl SpectralCurve {
    /// Builds and fully validates a curve. Branchpoints are discovered on
    /// the numerator of x' unless supplied explicitly; either way the list
    /// must exhaust the zeroes of dx.
    pub fn build(
        x: UniRatFunc,
        ydata: YData,
        supplied: Option<Vec<FieldElem>>,
        param_name: impl Into<String>,
    ) -> Result<Self> {
        let tag = x.tag();
        if x.num().is_constant() && x.den().is_constant() {
            return Err(Error::NotRegular("x is constant".into()));
        }
        // dx must not vanish at z = ∞, which would put a branchpoint
        // outside the pole basis: x needs a pole there, or at worst a
        // finite value approached at first order in 1/z.
        if dx_vanishes_at_infinity(&x)? {
            return Err(Error::NotRegular(
                "dx vanishes at infinity (branchpoint at infinity)".into(),
            ));
        }
        let xp = x.derivative()?;
        if xp.is_zero() {
            return Err(Error::NotRegular("dx vanishes identically".into()));
        }

        let points: Vec<FieldElem> = match supplied {
            Some(list) => list,
            None => {
                let report = roots_in_field(xp.num());
                if report.unfactored_degree > 0 {
                    return Err(Error::BranchpointNotInField {
                        unfactored_degree: report.unfactored_degree,
                    });
                }
                report
                    .roots
                    .into_iter()
                    .flat_map(|(a, m)| std::iter::repeat(a).take(m))
                    .collect()
            }
        };

        // Each point must be a simple zero of dx, and together they must
        // exhaust the numerator of x'.
        let mut remaining = xp.num().clone();
        for a in &points {
            let lin = ZPoly::new(tag, vec![-a, FieldElem::one(tag)]);
            let (quot, rem) = remaining.div_rem(&lin)?;
            if !rem.is_zero() {
                return Err(Error::NotRegular(format!(
                    "point {} is not a zero of dx",
                    a.display_with("u")
                )));
            }
            if quot.eval(a).is_zero() {
                return Err(Error::NotRegular(format!(
                    "dx has a multiple zero at {}",
                    a.display_with("u")
                )));
            }
            remaining = quot;
        }
        if !remaining.is_constant() {
            return Err(Error::BranchpointNotInField {
                unfactored_degree: remaining.degree(),
            });
        }

        // Pairwise distinct with invertible differences.
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let d = &points[i] - &points[j];
                if d.is_zero() || d.recip().is_err() {
                    return Err(Error::CoincidentBranchpoints);
                }
            }
        }

        // dy finite and nonzero at every branchpoint.
        let dy = ydata.dy()?;
        for a in &points {
            if dy.den().eval(a).is_zero() {
                return Err(Error::NotRegular(format!(
                    "dy has a pole at the branchpoint {}",
                    a.display_with("u")
                )));
            }
            if dy.eval(a)?.is_zero() {
                return Err(Error::NotRegular(format!(
                    "dy vanishes at the branchpoint {}",
                    a.display_with("u")
                )));
            }
        }

        let curve = SpectralCurve {
            tag,
            param_name: param_name.into(),
            x,
            ydata,
            branch: vec![],
        };
        let mut branch = Vec::with_capacity(points.len());
        for a in &points {
            branch.push(curve.compute_branch_local(a, DEFAULT_LOCAL_ORDER)?);
        }
        Ok(SpectralCurve { branch, ..curve })
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn param_name(&self) -> &str {
        &self.param_name
    }

    pub fn x(&self) -> &UniRatFunc {
        &self.x
    }

    pub fn ydata(&self) -> &YData {
        &self.ydata
    }

    pub fn dy(&self) -> UniRatFunc {
        self.ydata.dy().expect("validated at build")
    }

    pub fn branchpoints(&self) -> &[BranchData] {
        &self.branch
    }

    pub fn branchpoint_values(&self) -> Vec<FieldElem> {
        self.branch.iter().map(|b| b.a.clone()).collect()
    }

    /// Local data at branchpoint `i` recomputed to the requested order.
    pub fn branch_local(&self, i: usize, order: i64) -> Result<BranchData> {
        let a = self.branch[i].a.clone();
        self.compute_branch_local(&a, order)
    }

    fn compute_branch_local(&self, a: &FieldElem, order: i64) -> Result<BranchData> {
        let sigma = involution_series(&self.x, a, order)?;
        let (y_series, phi_series) = local_y_and_phi(&self.x, &self.ydata, a, order)?;
        let x_loc = laurent_expand(&self.x, a, 2)?;
        let xpp_half = x_loc.coefficient(2)?;
        let y_lin = y_series.coefficient(1)?;
        if y_lin.is_zero() {
            return Err(Error::NotRegular(format!(
                "local y-series has no linear term at {}",
                a.display_with("u")
            )));
        }
        let y_prime_sq = (&y_lin * &y_lin).try_div(&xpp_half)?;
        Ok(BranchData {
            a: a.clone(),
            sigma,
            y_series,
            phi_series,
            xpp_half,
            y_prime_sq,
        })
    }

    /// Applies a symplectic-group generator and revalidates.
    pub fn apply_transform(&self, t: &TransformSpec) -> Result<SpectralCurve> {
        let tag = self.tag;
        let keep_bps = Some(self.branchpoint_values());
        match t {
            TransformSpec::AddRofX(r) => {
                let r_of_x = r.compose(&self.x)?;
                let ydata = match &self.ydata {
                    YData::Rational(y) => YData::Rational(y.add(&r_of_x)?),
                    YData::Log { dy, log_terms } => YData::Log {
                        dy: dy.add(&r_of_x.derivative()?)?,
                        log_terms: log_terms.clone(),
                    },
                };
                SpectralCurve::build(self.x.clone(), ydata, keep_bps, self.param_name.clone())
            }
            TransformSpec::ScaleY(l) => {
                if l.is_zero() {
                    return Err(Error::UnsupportedTransform("ScaleY(0)".into()));
                }
                SpectralCurve::build(
                    self.x.clone(),
                    scale_ydata(&self.ydata, l)?,
                    keep_bps,
                    self.param_name.clone(),
                )
            }
            TransformSpec::NegateY => {
                self.apply_transform(&TransformSpec::ScaleY(FieldElem::from_int(tag, -1)))
            }
            TransformSpec::ScaleXY(l) => {
                if l.is_zero() {
                    return Err(Error::UnsupportedTransform("ScaleXY(0)".into()));
                }
                let x = self.x.scale(&l.recip()?)?;
                SpectralCurve::build(
                    x,
                    scale_ydata(&self.ydata, l)?,
                    keep_bps,
                    self.param_name.clone(),
                )
            }
            TransformSpec::MobiusX { a, b, c, d } => {
                let det = &(a * d) - &(b * c);
                if det.is_zero() {
                    return Err(Error::UnsupportedTransform(
                        "Möbius map with ad - bc = 0".into(),
                    ));
                }
                let num = self.x.scale(a)?.add(&UniRatFunc::constant(b.clone()))?;
                let den = self.x.scale(c)?.add(&UniRatFunc::constant(d.clone()))?;
                let new_x = num.div(&den)?;
                // y picks up (cx+d)²/(ad-bc); for log-type y this is only a
                // constant rescaling when c = 0.
                let factor = den.mul(&den)?.scale(&det.recip()?)?;
                let ydata = match &self.ydata {
                    YData::Rational(y) => YData::Rational(y.mul(&factor)?),
                    YData::Log { .. } if c.is_zero() => {
                        let l = (d * d).try_div(&det)?;
                        scale_ydata(&self.ydata, &l)?
                    }
                    YData::Log { .. } => {
                        return Err(Error::UnsupportedTransform(
                            "Möbius map with c ≠ 0 on a log-type curve".into(),
                        ))
                    }
                };
                SpectralCurve::build(new_x, ydata, keep_bps, self.param_name.clone())
            }
            TransformSpec::SwapXY => {
                let y = self
                    .ydata
                    .rational()
                    .ok_or_else(|| Error::UnsupportedTransform("swap on a log-type curve".into()))?
                    .clone();
                SpectralCurve::build(
                    y,
                    YData::Rational(self.x.clone()),
                    None,
                    self.param_name.clone(),
                )
            }
        }
    }
}

/// Whether dx has a zero at z = ∞: x is rewritten in the coordinate
/// w = 1/z and the derivative checked at w = 0. A pole of x at infinity
/// always keeps dx pole-like there.
fn dx_vanishes_at_infinity(x: &UniRatFunc) -> Result<bool> {
    let n = x.num().degree();
    let d = x.den().degree();
    if n > d {
        return Ok(false);
    }
    let tag = x.tag();
    let rev = |p: &ZPoly, up_to: usize| -> ZPoly {
        ZPoly::new(
            tag,
            (0..=up_to)
                .map(|i| {
                    if up_to - i <= p.degree() {
                        p.coeff(up_to - i)
                    } else {
                        FieldElem::zero(tag)
                    }
                })
                .collect(),
        )
    };
    // x(1/w) = rev(num)·w^{d-n} / rev(den) with both reversed to length d.
    let xw = UniRatFunc::new(rev(x.num(), d), rev(x.den(), d))?;
    let deriv = xw.derivative()?;
    Ok(deriv.eval(&FieldElem::zero(tag))?.is_zero())
}

fn scale_ydata(ydata: &YData, l: &FieldElem) -> Result<YData> {
    Ok(match ydata {
        YData::Rational(y) => YData::Rational(y.scale(l)?),
        YData::Log { dy, log_terms } => YData::Log {
            dy: dy.scale(l)?,
            log_terms: log_terms
                .iter()
                .map(|(c, arg)| (c * l, arg.clone()))
                .collect(),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransformSpec {
    /// y → y + R(x).
    AddRofX(UniRatFunc),
    /// y → λy.
    ScaleY(FieldElem),
    /// x → x/λ, y → λy.
    ScaleXY(FieldElem),
    /// x → (ax+b)/(cx+d), y → (cx+d)²/(ad-bc) · y.
    MobiusX {
        a: FieldElem,
        b: FieldElem,
        c: FieldElem,
        d: FieldElem,
    },
    /// y → -y.
    NegateY,
    /// x and y exchanged (rational curves only).
    SwapXY,
}

// ---------------------------------------------------------------------------
// Local analysis
// ---------------------------------------------------------------------------

/// Solves x(a + σ(s)) = x(a + s) for the deck involution σ(s) = -s + ...
/// by Newton iteration on the truncated series ring.
pub fn involution_series(x: &UniRatFunc, a: &FieldElem, order: i64) -> Result<LaurentSeries> {
    let tag = x.tag();
    // Window shrink per Newton step is small; retry with a wider buffer if
    // the requested order is not reached.
    for buffer in [12i64, 32, 96] {
        let w = order + buffer;
        let x_loc = laurent_expand(x, a, w)?;
        let x0 = x_loc.coefficient(0)?;
        let big_x = x_loc.sub(&LaurentSeries::constant(tag, a.clone(), x0));
        if big_x.lowest() != 2 {
            return Err(Error::NotRegular(format!(
                "x - x(a) vanishes to order {} at {}, expected a simple zero of dx",
                big_x.lowest(),
                a.display_with("u")
            )));
        }
        let xp = big_x.derivative();
        let mut sigma =
            LaurentSeries::new(tag, a.clone(), 1, vec![FieldElem::from_int(tag, -1)], w);
        let mut converged = false;
        for _ in 0..40 {
            let f = big_x.compose(&sigma)?.sub(&big_x);
            if f.is_zero() || f.lowest() > order + 1 {
                converged = true;
                break;
            }
            let slope = xp.compose(&sigma)?;
            let delta = f.div(&slope, w)?;
            sigma = sigma.sub(&delta);
        }
        if converged && sigma.valid_order() >= order {
            return Ok(sigma.truncate_to(order));
        }
    }
    Err(Error::InsufficientOrder)
}

/// Local y-series (modulo constant) and its primitive Φ = ∫ y dx with
/// constant 0, both about the branchpoint `a`.
pub fn local_y_and_phi(
    x: &UniRatFunc,
    ydata: &YData,
    a: &FieldElem,
    order: i64,
) -> Result<(LaurentSeries, LaurentSeries)> {
    let tag = x.tag();
    let y_series = match ydata {
        YData::Rational(y) => {
            let loc = laurent_expand(y, a, order)?;
            let c = loc.coefficient(0)?;
            loc.sub(&LaurentSeries::constant(tag, a.clone(), c))
        }
        YData::Log { dy, .. } => {
            // Regular curves have dy finite at a, so no residue can occur.
            laurent_expand(dy, a, order - 1)?.antiderivative()?
        }
    };
    let x_loc = laurent_expand(x, a, order + 2)?;
    let x0 = x_loc.coefficient(0)?;
    let big_x = x_loc.sub(&LaurentSeries::constant(tag, a.clone(), x0));
    let phi = y_series.mul(&big_x.derivative()).antiderivative()?;
    Ok((y_series.truncate_to(order), phi.truncate_to(order)))
}

// ---------------------------------------------------------------------------
// Branchpoint classification (blow-up type)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    /// Square-root branchpoint with nonvanishing y-slope; the local model
    /// is the Airy curve with the reported scale data.
    Regular {
        xpp_half: FieldElem,
        y_linear: FieldElem,
    },
    /// Cusp-type point: y - y(a) opens like (x - x(a))^{p/q}.
    Singular { p: i64, q: i64 },
}

/// Reads the blow-up type of a point where dx vanishes. For a simple zero
/// of dx (q = 2) the y-exponent p is the first odd exponent of
/// y(a+s) - y(a+σ(s)); a multiple zero of dx reports the leading exponents
/// of both local expansions (merged-branchpoint cusps).
pub fn classify_branchpoint(
    x: &UniRatFunc,
    ydata: &YData,
    a: &FieldElem,
) -> Result<Classification> {
    let tag = x.tag();
    let order = 24;
    let x_loc = laurent_expand(x, a, order)?;
    let x0 = x_loc.coefficient(0)?;
    let big_x = x_loc.sub(&LaurentSeries::constant(tag, a.clone(), x0));
    let q = big_x.lowest();
    if q < 2 {
        return Err(Error::NotRegular(format!(
            "dx does not vanish at {}",
            a.display_with("u")
        )));
    }
    let y_series = match ydata {
        YData::Rational(y) => {
            let loc = laurent_expand(y, a, order)?;
            let c = loc.coefficient(0)?;
            loc.sub(&LaurentSeries::constant(tag, a.clone(), c))
        }
        YData::Log { dy, .. } => laurent_expand(dy, a, order - 1)?.antiderivative()?,
    };
    if q == 2 {
        let sigma = involution_series(x, a, order)?;
        let odd = y_series.sub(&y_series.compose(&sigma)?);
        if odd.is_zero() {
            return Err(Error::NotRegular(format!(
                "y is invariant under the local involution at {}",
                a.display_with("u")
            )));
        }
        let p = odd.lowest();
        if p == 1 {
            Ok(Classification::Regular {
                xpp_half: big_x.coefficient(2)?,
                y_linear: y_series.coefficient(1)?,
            })
        } else {
            Ok(Classification::Singular { p, q: 2 })
        }
    } else {
        if y_series.is_zero() {
            return Err(Error::NotRegular(format!(
                "y is constant near {}",
                a.display_with("u")
            )));
        }
        Ok(Classification::Singular {
            p: y_series.lowest(),
            q,
        })
    }
}

// ---------------------------------------------------------------------------
// Curve-spec document (JSON)
// ---------------------------------------------------------------------------

/// Parses the curve-spec document:
/// `{"field":"Q"|"Qu"|"Qp", "x":{"num":[..],"den":[..]},
///   "y":{..} or "dy":{.., "logs":[{"coeff":.., "arg":{..}}]},
///   "branchpoints":[".."]?, "params":{"name":".."}?}`.
pub fn curve_from_json(v: &Value) -> Result<SpectralCurve> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("curve spec must be an object".into()))?;
    let tag = FieldTag::parse(
        obj.get("field")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("missing \"field\"".into()))?,
    )?;
    let x = ratfunc_from_json(
        tag,
        obj.get("x")
            .ok_or_else(|| Error::Parse("missing \"x\"".into()))?,
    )?;
    let ydata = if let Some(y) = obj.get("y") {
        YData::Rational(ratfunc_from_json(tag, y)?)
    } else if let Some(dyv) = obj.get("dy") {
        let dy = ratfunc_from_json(tag, dyv)?;
        let mut log_terms = vec![];
        if let Some(logs) = dyv.get("logs").and_then(Value::as_array) {
            for l in logs {
                let coeff = field_elem_from_json(
                    tag,
                    l.get("coeff")
                        .ok_or_else(|| Error::Parse("log term missing \"coeff\"".into()))?,
                )?;
                let arg = ratfunc_from_json(
                    tag,
                    l.get("arg")
                        .ok_or_else(|| Error::Parse("log term missing \"arg\"".into()))?,
                )?;
                log_terms.push((coeff, arg));
            }
        }
        YData::Log { dy, log_terms }
    } else {
        return Err(Error::Parse("curve spec needs \"y\" or \"dy\"".into()));
    };
    let supplied = match obj.get("branchpoints") {
        Some(Value::Array(arr)) => Some(
            arr.iter()
                .map(|b| field_elem_from_json(tag, b))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
        Some(other) => {
            return Err(Error::Parse(format!(
                "\"branchpoints\" must be an array, got {other}"
            )))
        }
    };
    let name = obj
        .get("params")
        .and_then(|p| p.get("name"))
        .and_then(Value::as_str)
        .unwrap_or("u")
        .to_string();
    SpectralCurve::build(x, ydata, supplied, name)
}

pub fn curve_to_json(c: &SpectralCurve) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("field".into(), Value::String(c.tag().name().into()));
    obj.insert("x".into(), ratfunc_to_json(c.x()));
    match c.ydata() {
        YData::Rational(y) => {
            obj.insert("y".into(), ratfunc_to_json(y));
        }
        YData::Log { dy, log_terms } => {
            let mut dyv = ratfunc_to_json(dy);
            let logs: Vec<Value> = log_terms
                .iter()
                .map(|(coeff, arg)| {
                    serde_json::json!({
                        "coeff": field_elem_to_json(coeff),
                        "arg": ratfunc_to_json(arg),
                    })
                })
                .collect();
            dyv.as_object_mut()
                .unwrap()
                .insert("logs".into(), Value::Array(logs));
            obj.insert("dy".into(), dyv);
        }
    }
    obj.insert(
        "branchpoints".into(),
        Value::Array(
            c.branchpoints()
                .iter()
                .map(|b| field_elem_to_json(&b.a))
                .collect(),
        ),
    );
    obj.insert(
        "params".into(),
        serde_json::json!({ "name": c.param_name() }),
    );
    Value::Object(obj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rational;

    fn q(n: i64) -> FieldElem {
        FieldElem::from_int(FieldTag::Q, n)
    }

    fn qr(n: i64, d: i64) -> FieldElem {
        FieldElem::Q(Rational::ratio(n, d))
    }

    fn zq(ints: &[i64]) -> ZPoly {
        ZPoly::from_ints(FieldTag::Q, ints)
    }

    fn poly(ints: &[i64]) -> UniRatFunc {
        UniRatFunc::from_poly(zq(ints))
    }

    fn airy() -> SpectralCurve {
        SpectralCurve::build(poly(&[0, 0, 1]), YData::Rational(poly(&[0, 1])), None, "u").unwrap()
    }

    #[test]
    fn airy_builds_with_exact_involution() {
        let c = airy();
        assert_eq!(c.branchpoints().len(), 1);
        let b = &c.branchpoints()[0];
        assert!(b.a.is_zero());
        assert_eq!(b.sigma.coefficient(1).unwrap(), q(-1));
        for e in 2..=8 {
            assert!(b.sigma.coefficient(e).unwrap().is_zero());
        }
        assert_eq!(b.xpp_half, q(1));
        assert_eq!(b.y_series.coefficient(1).unwrap(), q(1));
        // Φ = (2/3)s³
        assert_eq!(b.phi_series.coefficient(3).unwrap(), qr(2, 3));
        assert!(b.phi_series.coefficient(2).unwrap().is_zero());
        assert!(b.phi_series.coefficient(4).unwrap().is_zero());
    }

    #[test]
    fn singular_curve_is_rejected() {
        // x = z², y = z³: dy(0) = 0
        let e = SpectralCurve::build(
            poly(&[0, 0, 1]),
            YData::Rational(poly(&[0, 0, 0, 1])),
            None,
            "u",
        );
        assert!(matches!(e, Err(Error::NotRegular(_))));
    }

    #[test]
    fn map_curve_recovers_global_involution() {
        // x = u(z + 1/z) over Q(u): branchpoints ±1, z̄ = 1/z.
        let tag = FieldTag::Qu;
        let u = FieldElem::param(tag).unwrap();
        let x = UniRatFunc::new(
            ZPoly::new(tag, vec![u.clone(), FieldElem::zero(tag), u.clone()]),
            ZPoly::gen(tag),
        )
        .unwrap();
        // y = -1/(u z) + u³/z³
        let num = ZPoly::new(tag, vec![u.pow(3), FieldElem::zero(tag), -&u.recip().unwrap()]);
        let y = UniRatFunc::new(num, ZPoly::monomial(FieldElem::one(tag), 3)).unwrap();
        let c = SpectralCurve::build(x, YData::Rational(y), None, "gamma").unwrap();
        assert_eq!(c.branchpoints().len(), 2);
        let b1 = c
            .branchpoints()
            .iter()
            .find(|b| b.a.is_one())
            .expect("branchpoint at 1");
        for e in 1..=6 {
            let expect = FieldElem::from_int(tag, if e % 2 == 1 { -1 } else { 1 });
            assert_eq!(b1.sigma.coefficient(e).unwrap(), expect, "order {e}");
        }
    }

    #[test]
    fn cubic_x_involution_matches_closed_form() {
        // x = z³ - 3z at a = 1: z̄ = -(z - √(12 - 3z²))/2 gives
        // σ(s) = -s - s²/3 + ...
        let x = poly(&[0, -3, 0, 1]);
        let sigma = involution_series(&x, &q(1), 8).unwrap();
        assert_eq!(sigma.coefficient(1).unwrap(), q(-1));
        assert_eq!(sigma.coefficient(2).unwrap(), qr(-1, 3));
        // Involution property σ(σ(s)) = s.
        let twice = sigma.compose(&sigma).unwrap();
        assert_eq!(twice.coefficient(1).unwrap(), q(1));
        for e in 2..=7 {
            assert!(twice.coefficient(e).unwrap().is_zero(), "order {e}");
        }
    }

    #[test]
    fn log_curve_local_series() {
        // x = z + 1/z, dy = dz/z: y-series at 1 is ln(1+s) minus constant;
        // at -1 it is the ln(-z) expansion with ln(-1) dropped.
        let x = UniRatFunc::new(zq(&[1, 0, 1]), zq(&[0, 1])).unwrap();
        let dy = UniRatFunc::new(zq(&[1]), zq(&[0, 1])).unwrap();
        let c = SpectralCurve::build(
            x,
            YData::Log {
                dy,
                log_terms: vec![(q(1), UniRatFunc::gen(FieldTag::Q))],
            },
            None,
            "u",
        )
        .unwrap();
        let b1 = c.branchpoints().iter().find(|b| b.a.is_one()).unwrap();
        for e in 1..=5 {
            assert_eq!(
                b1.y_series.coefficient(e).unwrap(),
                FieldElem::Q(Rational::ratio(if e % 2 == 1 { 1 } else { -1 }, e)),
                "order {e}"
            );
        }
        let bm = c.branchpoints().iter().find(|b| b.a == q(-1)).unwrap();
        for e in 1..=5 {
            assert_eq!(
                bm.y_series.coefficient(e).unwrap(),
                FieldElem::Q(Rational::ratio(-1, e)),
                "order {e}"
            );
        }
    }

    #[test]
    fn transforms_round_trip() {
        let c = airy();
        let neg = c.apply_transform(&TransformSpec::NegateY).unwrap();
        assert_eq!(neg.ydata().rational().unwrap(), &poly(&[0, -1]));
        let shifted = c
            .apply_transform(&TransformSpec::MobiusX {
                a: q(1),
                b: q(1),
                c: q(0),
                d: q(1),
            })
            .unwrap();
        assert_eq!(shifted.x(), &poly(&[1, 0, 1]));
        let pg = SpectralCurve::build(
            poly(&[-2, 0, 1]),
            YData::Rational(poly(&[0, -3, 0, 1])),
            None,
            "u",
        )
        .unwrap();
        let sw = pg.apply_transform(&TransformSpec::SwapXY).unwrap();
        assert_eq!(sw.x(), &poly(&[0, -3, 0, 1]));
        assert_eq!(sw.ydata().rational().unwrap(), &poly(&[-2, 0, 1]));
        let mut bps: Vec<String> = sw.branchpoints().iter().map(|b| b.a.to_string()).collect();
        bps.sort();
        assert_eq!(bps, vec!["-1", "1"]);
        let back = shifted
            .apply_transform(&TransformSpec::MobiusX {
                a: q(1),
                b: q(-1),
                c: q(0),
                d: q(1),
            })
            .unwrap();
        assert_eq!(back.x(), c.x());
        assert_eq!(back.ydata(), c.ydata());
    }

    #[test]
    fn classification_examples() {
        let cls =
            classify_branchpoint(&poly(&[0, 0, 1]), &YData::Rational(poly(&[0, 1])), &q(0))
                .unwrap();
        assert_eq!(
            cls,
            Classification::Regular {
                xpp_half: q(1),
                y_linear: q(1)
            }
        );
        // x = z², y = z³ (cusp): (3,2).
        let cls = classify_branchpoint(
            &poly(&[0, 0, 1]),
            &YData::Rational(poly(&[0, 0, 0, 1])),
            &q(0),
        )
        .unwrap();
        assert_eq!(cls, Classification::Singular { p: 3, q: 2 });
    }

    #[test]
    fn curve_json_round_trip() {
        let c = airy();
        let v = curve_to_json(&c);
        let c2 = curve_from_json(&v).unwrap();
        assert_eq!(c2.x(), c.x());
        assert_eq!(c2.ydata(), c.ydata());
    }
}
