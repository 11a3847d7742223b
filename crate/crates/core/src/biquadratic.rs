//! Biquadratic relations `S(X,x;q) = 0`, the top's parameters, the n-step
//! parameter recursion, wedge brackets and periodicity polynomials γ⁽ⁿ⁾.
//!
//! All formulas are generic over [`Ring`], so they run on rationals for a
//! concrete top and on [`SparsePoly`] over the generic symbols `a..f`.

use std::fmt;
use std::ops::Index;
use std::sync::{Arc, OnceLock};

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::eulermap::{InvariantPair, TopConfig};
use crate::polynomials::SparsePoly;
use crate::scalars::{ExactScalar, Ring};

/// Entry names of a parameter 6-tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coef {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Coef {
    pub const ALL: [Coef; 6] = [Coef::A, Coef::B, Coef::C, Coef::D, Coef::E, Coef::F];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> char {
        (b'a' + self as u8) as char
    }

    pub fn from_char(c: char) -> Result<Coef> {
        Coef::ALL.into_iter().find(|k| k.name() == c).ok_or_else(|| Error::Parse(format!("no parameter named `{c}`")))
    }

    /// The 15 unordered pairs `(g, h)` with `g` before `h`.
    pub fn pairs() -> impl Iterator<Item = (Coef, Coef)> {
        Coef::ALL.into_iter().enumerate().flat_map(|(i, g)| Coef::ALL[i + 1..].iter().map(move |&h| (g, h)))
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// `q = (a, b, c, d, e, f)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiquadParams<T>(pub [T; 6]);

impl<T: Ring> BiquadParams<T> {
    /// Rejects the all-zero tuple, which defines no relation.
    pub fn new(entries: [T; 6]) -> Result<Self> {
        if entries.iter().all(|v| v.is_zero()) {
            return Err(Error::InvalidConfig("all six parameters vanish".into()));
        }
        Ok(BiquadParams(entries))
    }

    pub fn get(&self, k: Coef) -> &T {
        &self.0[k.index()]
    }

    pub fn is_all_zero(&self) -> bool {
        self.0.iter().all(|v| v.is_zero())
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> BiquadParams<U> {
        BiquadParams(self.0.each_ref().map(f))
    }
}

impl<T> Index<Coef> for BiquadParams<T> {
    type Output = T;
    fn index(&self, k: Coef) -> &T {
        &self.0[k.index()]
    }
}

impl<T: Serialize> Serialize for BiquadParams<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = serializer.serialize_map(Some(6))?;
        for k in Coef::ALL {
            m.serialize_entry(&k.name().to_string(), &self.0[k.index()])?;
        }
        m.end()
    }
}

/// `A₀..A₃` of a top at given invariants.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ACoeffs<T> {
    #[serde(rename = "A0")]
    pub a0: T,
    #[serde(rename = "A1")]
    pub a1: T,
    #[serde(rename = "A2")]
    pub a2: T,
    #[serde(rename = "A3")]
    pub a3: T,
}

/// Body axis selector, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Axis(u8);

impl Axis {
    pub const ALL: [Axis; 3] = [Axis(1), Axis(2), Axis(3)];

    pub fn new(n: u8) -> Result<Axis> {
        if (1..=3).contains(&n) {
            Ok(Axis(n))
        } else {
            Err(Error::InvalidConfig(format!("axis must be 1, 2 or 3, got {n}")))
        }
    }

    pub fn number(self) -> u8 {
        self.0
    }

    /// 0-based coordinate index.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl TryFrom<u8> for Axis {
    type Error = Error;
    fn try_from(n: u8) -> Result<Axis> {
        Axis::new(n)
    }
}

impl From<Axis> for u8 {
    fn from(a: Axis) -> u8 {
        a.0
    }
}

/// `aX²x² + bXx(X+x) + c(X−x)² + dXx + e(X+x) + f`.
pub fn s_eval<T: Ring>(q: &BiquadParams<T>, big_x: &T, x: &T) -> T {
    let [a, b, c, d, e, f] = &q.0;
    let xx = big_x.clone() * x;
    let sum = big_x.clone() + x;
    let diff = big_x.clone() - x;
    a.clone() * &xx * &xx
        + &(b.clone() * &xx * &sum)
        + &(c.clone() * &diff * &diff)
        + &(d.clone() * &xx)
        + &(e.clone() * &sum)
        + f
}

/// `A₀ = 4I₁I₂I₃/δ²`, `A₁ = (I₂−I₃)(I₁H₁−H₂)` and cyclic.
///
/// The `1/δ²` keeps the parameters valid for any step size; it is 1 at δ = 1.
pub fn a_coeffs<T: Ring>(cfg: &TopConfig, h: &InvariantPair<T>) -> Result<ACoeffs<T>> {
    let [i1, i2, i3] = cfg.inertia();
    let like = &h.h1;
    let k = |v: &ExactScalar| like.constant_like(v);
    let a0 = (ExactScalar::from(4) * i1 * i2 * i3).checked_div(&cfg.delta().square())?;
    let term = |ii: &ExactScalar, diff: ExactScalar| k(&diff) * &(k(ii) * &h.h1 - &h.h2);
    Ok(ACoeffs { a0: k(&a0), a1: term(i1, i2 - i3), a2: term(i2, i3 - i1), a3: term(i3, i1 - i2) })
}

/// The relation between `x_j` and its image `X_j` for the top at fixed
/// invariants. `b` and `e` always vanish.
pub fn top_params<T: Ring>(cfg: &TopConfig, h: &InvariantPair<T>, axis: Axis) -> Result<BiquadParams<T>> {
    let ACoeffs { a0, a1, a2, a3 } = a_coeffs(cfg, h)?;
    let like = &h.h1;
    let [al1, al2, al3] = cfg.alpha();
    let pair = match axis.number() {
        1 => al2 * al3,
        2 => al3 * al1,
        _ => al1 * al2,
    };
    if pair.is_zero() {
        return Err(Error::AxiallySymmetric { axis: axis.number() as usize });
    }
    let four = like.int_like(4);
    let kf = like.constant_like(&ExactScalar::from(4).checked_div(&pair)?);
    let m4pair = like.constant_like(&(ExactScalar::from(-4) * &pair));
    let zero = like.zero_like();
    let entries = match axis.number() {
        1 => {
            let s = a0.clone() - &a2 + &a3;
            [
                m4pair * &(a0.clone() - &a2) * &(a0.clone() + &a3),
                zero.clone(),
                s.square(),
                four * &(a1.square() - &(a2.clone() * &(a0.clone() + &a3)) + &(a3.clone() * &(a0.clone() - &a2))),
                zero,
                kf * &a2 * &a3,
            ]
        }
        2 => {
            let s = a0.clone() - &a2 - &a3;
            [
                m4pair * &a0 * &(a0.clone() - &a2),
                zero.clone(),
                s.square(),
                four * &(a2.square() - &(a0.clone() * &(a2.clone() + &a3)) - &(a3.clone() * &(a0.clone() - &a2))),
                zero,
                kf * &a3 * &a1,
            ]
        }
        _ => {
            let s = a0.clone() + &a2 + &a3;
            [
                m4pair * &a0 * &(a0.clone() + &a3),
                zero.clone(),
                s.square(),
                four * &(a3.square() + &(a0.clone() * &(a2.clone() + &a3)) + &(a2.clone() * &(a0.clone() + &a3))),
                zero,
                kf * &a1 * &a2,
            ]
        }
    };
    Ok(BiquadParams(entries))
}

/// Parameters of the two-step relation.
pub fn q_second<T: Ring>(q: &BiquadParams<T>) -> BiquadParams<T> {
    let [a, b, c, d, e, f] = &q.0;
    let two = a.int_like(2);
    let four = a.int_like(4);
    let ae_cb = a.clone() * e - &(c.clone() * b);
    let big_b = a.clone() * d - &(two.clone() * a * c) - &b.square();
    let big_c = b.clone() * e - &(c.clone() * d) + &(two.clone() * &c.square());
    let fb_ce = f.clone() * b - &(c.clone() * e);
    let fd = f.clone() * d - &(two.clone() * f * c) - &e.square();
    let mid = two.clone() * a * f - &(b.clone() * e) + &(c.clone() * d) - &(four.clone() * &c.square());
    let af_c2 = a.clone() * f - &c.square();
    BiquadParams([
        ae_cb.square() - &(big_b.clone() * &big_c),
        ae_cb.clone() * &mid - &(big_b.clone() * &fb_ce),
        af_c2.square() - &(ae_cb.clone() * &fb_ce),
        four * &af_c2.square() - &(two * &ae_cb * &fb_ce) - &big_c.square() - &(big_b * &fd),
        fb_ce.clone() * &mid - &(fd.clone() * &ae_cb),
        fb_ce.square() - &(fd * &big_c),
    ])
}

/// `(g∧h)ₙ = g·h⁽ⁿ⁾ − h·g⁽ⁿ⁾`.
pub fn wedge<T: Ring>(g: Coef, h: Coef, q: &BiquadParams<T>, qn: &BiquadParams<T>) -> Result<T> {
    if g == h {
        return Err(Error::SameEntry(g.name()));
    }
    Ok(raw_wedge(g, h, q, qn))
}

fn raw_wedge<T: Ring>(g: Coef, h: Coef, q: &BiquadParams<T>, qn: &BiquadParams<T>) -> T {
    q[g].clone() * &qn[h] - &(q[h].clone() * &qn[g])
}

fn exact_div<T: Ring>(num: T, den: &T) -> Result<T> {
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    num.try_div(den)
}

/// The five wedge-driven entries `(a, b, d, e, f)` of the next parameters,
/// given wedges `w` at level n and the parameters at level n−1.
fn next_from_wedges<T: Ring>(prev: &BiquadParams<T>, w: &dyn Fn(Coef, Coef) -> T) -> Result<[T; 5]> {
    use Coef::*;
    let [ap, bp, _, dp, ep, fp] = &prev.0;
    let half = ap.constant_like(&ExactScalar::new(1, 2)?);
    let two = ap.int_like(2);
    let three = ap.int_like(3);
    let four = ap.int_like(4);

    let (ab, ac, ad, ae, af) = (w(A, B), w(A, C), w(A, D), w(A, E), w(A, F));
    let (bc, bd, be, bf) = (w(B, C), w(B, D), w(B, E), w(B, F));
    let (cd, ce, cf) = (w(C, D), w(C, E), w(C, F));
    let (de, df, ef) = (w(D, E), w(D, F), w(E, F));
    // reversed pairs as they appear in the f-side formulas
    let (fe, ec, fc, fb, eb, fd) = (-ef.clone(), -ce.clone(), -cf.clone(), -bf.clone(), -be.clone(), -df.clone());

    let a_new = exact_div(ac.square() - &(ab.clone() * &bc), ap)?;
    let b_num = bp.clone() * &(ab.clone() * &bc - &ac.square())
        + &(ap.clone()
            * &(ac.clone() * &(ae.clone() + &(two.clone() * &bc))
                - &(half.clone() * &(ab.clone() * &be - &(ab.clone() * &cd) + &(ad.clone() * &bc)))));
    let b_new = exact_div(b_num, &ap.square())?;
    let e_num = ep.clone() * &(fe.clone() * &ec - &fc.square())
        + &(fp.clone()
            * &(fc.clone() * &(fb.clone() + &(two.clone() * &ec))
                - &(half * &(fe.clone() * &eb - &(fe.clone() * &cd) + &(fd.clone() * &ec)))));
    let e_new = exact_div(e_num, &fp.square())?;
    let f_new = exact_div(fc.square() - &(fe * &ec), fp)?;

    let d_num = -(fp.clone() * &a_new) - &(ap.clone() * &f_new) - &(four.clone() * bp * &e_new) - &(four * ep * &b_new)
        + &af.square()
        + &cd.square()
        - &(ab.clone() * &ef)
        - &(bc.clone() * &ce)
        + &(ad.clone() * &df)
        + &(two.clone() * &be * &af)
        - &((three.clone() * &ce - &bf - &de) * &(three * &bc - &ae - &bd))
        + &(two.clone() * &(ad - &ac) * &(cf - &df))
        + &(two * &(bc + &ae) * &(bf + &ce));
    let d_new = exact_div(d_num, dp)?;
    Ok([a_new, b_new, d_new, e_new, f_new])
}

/// Parameters at level n+1 from the base `q`, level n−1 and level n.
/// Divisors are `a⁽ⁿ⁻¹⁾`, `2c⁽ⁿ⁻¹⁾`, `d⁽ⁿ⁻¹⁾`, `f⁽ⁿ⁻¹⁾`; polynomial
/// divisions must be exact.
pub fn q_next<T: Ring>(
    q: &BiquadParams<T>,
    q_prev: &BiquadParams<T>,
    q_curr: &BiquadParams<T>,
) -> Result<BiquadParams<T>> {
    let w = |g: Coef, h: Coef| raw_wedge(g, h, q, q_curr);
    let [a_new, b_new, d_new, e_new, f_new] = next_from_wedges(q_prev, &w)?;
    let [a, b, c, _, e, f] = &q.0;
    let [an, bn, cn, _, en, fn_] = &q_curr.0;
    let c_num = (c.clone() * en - &(b.clone() * fn_)) * &(a.clone() * en - &(b.clone() * cn))
        + &((c.clone() * bn - &(e.clone() * an)) * &(f.clone() * bn - &(e.clone() * cn)))
        + &(a.clone() * fn_ - &(c.clone() * cn)).square()
        + &(f.clone() * an - &(c.clone() * cn)).square();
    let c_new = exact_div(c_num, &(q_prev[Coef::C].int_like(2) * &q_prev[Coef::C]))?;
    Ok(BiquadParams([a_new, b_new, c_new, d_new, e_new, f_new]))
}

/// `[q⁽¹⁾, q⁽²⁾, …, q⁽ⁿ⁾]` with `q⁽¹⁾ = q`.
pub fn q_sequence<T: Ring>(q: &BiquadParams<T>, n: usize) -> Result<Vec<BiquadParams<T>>> {
    let mut out = vec![q.clone()];
    if n >= 2 {
        out.push(q_second(q));
    }
    for k in 2..n {
        let next = q_next(q, &out[k - 2], &out[k - 1])?;
        out.push(next);
    }
    out.truncate(n.max(1));
    Ok(out)
}

const GAMMA3: &str = "a*f - b*e - 3*c^2 + c*d";
const GAMMA4: &str = "2*a*c*f - a*d*f + b^2*f + a*e^2 - 2*c^3 + c^2*d - 2*b*c*e";
const GAMMA5: &str = "a^3*f^3 - c*f^2*d*a^2 + 2*c*f*e^2*a^2 + f*d*e^2*a^2 - 3*e*b*f^2*a^2 - e^4*a^2 \
    - c^2*f^2*a^2 - 13*c^4*f*a + 18*c^3*f*d*a + d*e^3*b*a + 2*c*f^2*b^2*a + 7*d*c^2*e^2*a \
    - c*e^2*d^2*a - 2*c*e^3*b*a + 2*c^2*f*e*b*a - 7*f*d^2*c^2*a - 14*c^3*e^2*a + c*d^3*f*a \
    + f*b^2*e^2*a + f^2*d*b^2*a - e*b*d^2*f*a - c*d^2*b^2*f - b^3*e^3 - 4*c^3*d*e*b \
    + c*d*b^2*e^2 + 13*e*c^4*b - f^2*b^4 + 7*f*b^2*c^2*d + c^4*d^2 - 5*c^5*d + 5*c^6 \
    - 2*f*b^3*e*c - e^2*c^2*b^2 + e*b^3*d*f - 14*f*b^2*c^3";

/// The variable list `a, b, c, d, e, f`.
pub fn param_vars() -> &'static Arc<[String]> {
    static VARS: OnceLock<Arc<[String]>> = OnceLock::new();
    VARS.get_or_init(|| SparsePoly::variables(&["a", "b", "c", "d", "e", "f"]).expect("six names"))
}

/// γ⁽ⁿ⁾ as a polynomial in `a..f`, for n = 3, 4, 5.
pub fn gamma_poly(n: u32) -> Result<SparsePoly> {
    let text = match n {
        3 => GAMMA3,
        4 => GAMMA4,
        5 => GAMMA5,
        _ => return Err(Error::UnsupportedPeriod(n)),
    };
    SparsePoly::parse(text, param_vars())
}

/// γ⁽ⁿ⁾ evaluated at `q`.
pub fn gamma_general<T: Ring>(n: u32, q: &BiquadParams<T>) -> Result<T> {
    Ok(gamma_poly(n)?.eval_in(&q.0, &q.0[0]))
}

/// Generic symbolic parameters: the variables `a..f` of `vars`.
pub fn symbolic_params(vars: &Arc<[String]>) -> Result<BiquadParams<SparsePoly>> {
    let mk = |n: &str| SparsePoly::var(vars, n);
    Ok(BiquadParams([mk("a")?, mk("b")?, mk("c")?, mk("d")?, mk("e")?, mk("f")?]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationVerdict {
    FullyCorrelated,
    NotFullyCorrelated,
}

/// Outcome of testing `q⁽ⁿ⁾ = ε·q + γ·q̂⁽ⁿ⁾`.
///
/// With pivot entry `p` (normally `c`), `ε = p⁽ⁿ⁾/p` and `q̂ = hat/p`, where
/// `hat_g = (p∧g)ₙ/γ`. Everything is reported as numerators over `p` so that
/// symbolic reports stay polynomial: `p·q⁽ⁿ⁾ = ε_num·q + γ·hat`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationReport<T> {
    pub verdict: CorrelationVerdict,
    pub gamma: T,
    pub pivot: Option<Coef>,
    pub epsilon_numerator: Option<T>,
    pub denominator: Option<T>,
    pub hat_params: Option<BiquadParams<T>>,
    /// `(g∧h)ₙ/γ` for every pair that divides.
    pub wedge_quotients: Vec<(Coef, Coef, T)>,
    /// Pairs whose wedge is not divisible by γ.
    pub failing_wedges: Vec<(Coef, Coef)>,
    /// `p·q⁽ⁿ⁾ = ε_num·q + γ·hat` entrywise.
    pub decomposition_holds: bool,
}

impl<T> CorrelationReport<T> {
    pub fn quotient(&self, g: Coef, h: Coef) -> Option<&T> {
        self.wedge_quotients.iter().find(|(x, y, _)| (*x, *y) == (g, h)).map(|(_, _, v)| v)
    }
}

const PIVOT_ORDER: [Coef; 6] = [Coef::C, Coef::A, Coef::D, Coef::F, Coef::B, Coef::E];

/// Tests every wedge `(g∧h)ₙ` for exact divisibility by `gamma`.
pub fn check_full_correlation<T: Ring>(
    q: &BiquadParams<T>,
    qn: &BiquadParams<T>,
    gamma: &T,
) -> Result<CorrelationReport<T>> {
    if gamma.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let mut quotients = Vec::new();
    let mut failing = Vec::new();
    for (g, h) in Coef::pairs() {
        match raw_wedge(g, h, q, qn).try_div(gamma) {
            Ok(v) => quotients.push((g, h, v)),
            Err(Error::NotDivisible) => failing.push((g, h)),
            Err(e) => return Err(e),
        }
    }
    let pivot = PIVOT_ORDER.into_iter().find(|&k| !q[k].is_zero());
    let mut report = CorrelationReport {
        verdict: CorrelationVerdict::NotFullyCorrelated,
        gamma: gamma.clone(),
        pivot,
        epsilon_numerator: None,
        denominator: None,
        hat_params: None,
        wedge_quotients: quotients,
        failing_wedges: failing,
        decomposition_holds: false,
    };
    let Some(p) = pivot else {
        return Ok(report);
    };
    if !report.failing_wedges.is_empty() {
        return Ok(report);
    }
    let zero = gamma.zero_like();
    let hats: [T; 6] = Coef::ALL.map(|g| {
        if g == p {
            zero.clone()
        } else {
            let (lo, hi, sign) = if p < g { (p, g, 1) } else { (g, p, -1) };
            let v = report.quotient(lo, hi).cloned().unwrap_or_else(|| zero.clone());
            if sign > 0 {
                v
            } else {
                -v
            }
        }
    });
    let eps = qn[p].clone();
    let den = q[p].clone();
    let holds =
        Coef::ALL.iter().all(|&g| den.clone() * &qn[g] == eps.clone() * &q[g] + &(gamma.clone() * &hats[g.index()]));
    report.verdict = CorrelationVerdict::FullyCorrelated;
    report.epsilon_numerator = Some(eps);
    report.denominator = Some(den);
    report.hat_params = Some(BiquadParams(hats));
    report.decomposition_holds = holds;
    Ok(report)
}

/// Coefficients of `K_{n+1}`: the wedge-driven entries of the recursion with
/// every wedge replaced by its quotient by γ. The `c` slot is zero.
pub fn k_params<T: Ring>(q_prev: &BiquadParams<T>, report: &CorrelationReport<T>) -> Result<BiquadParams<T>> {
    if report.verdict != CorrelationVerdict::FullyCorrelated {
        return Err(Error::NotDivisible);
    }
    let zero = report.gamma.zero_like();
    let w = |g: Coef, h: Coef| -> T {
        let (lo, hi, neg) = if g < h { (g, h, false) } else { (h, g, true) };
        let v = report.quotient(lo, hi).cloned().unwrap_or_else(|| zero.clone());
        if neg {
            -v
        } else {
            v
        }
    };
    let [a, b, d, e, f] = next_from_wedges(q_prev, &w)?;
    Ok(BiquadParams([a, b, zero.clone(), d, e, f]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eulermap::{euler_step, invariants, orbit, BodyState};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(s: &str) -> ExactScalar {
        s.parse().unwrap()
    }

    fn ex(v: [i64; 6]) -> BiquadParams<ExactScalar> {
        BiquadParams(v.map(ExactScalar::from))
    }

    fn sym() -> (Arc<[String]>, BiquadParams<SparsePoly>) {
        let v = param_vars().clone();
        let p = symbolic_params(&v).unwrap();
        (v, p)
    }

    #[test]
    fn s_eval_examples() {
        let x = q("7/3");
        assert!(s_eval(&ex([0, 0, 1, 0, 0, 0]), &x, &x).is_zero());
        assert_eq!(s_eval(&ex([0, 0, 0, 0, 0, 1]), &q("5"), &q("-2")), ExactScalar::one());
    }

    #[test]
    fn s_is_symmetric_symbolically() {
        let v = SparsePoly::variables(&["a", "b", "c", "d", "e", "f", "X", "x"]).unwrap();
        let p = symbolic_params(&v).unwrap();
        let big = SparsePoly::var(&v, "X").unwrap();
        let small = SparsePoly::var(&v, "x").unwrap();
        assert_eq!(s_eval(&p, &big, &small), s_eval(&p, &small, &big));
    }

    #[test]
    fn a_coeffs_examples() {
        let cfg = TopConfig::from_ints(1, 2, 3).unwrap();
        let h = InvariantPair { h1: q("72/13"), h2: q("168/13") };
        let a = a_coeffs(&cfg, &h).unwrap();
        assert_eq!(a.a0, q("24"));
        assert_eq!((a.a1.clone(), a.a2.clone(), a.a3.clone()), (q("96/13"), q("-48/13"), q("-48/13")));
        assert!((a.a1 + &a.a2 + &a.a3).is_zero());

        let v = SparsePoly::variables(&["H1", "H2"]).unwrap();
        let hs = InvariantPair { h1: SparsePoly::var(&v, "H1").unwrap(), h2: SparsePoly::var(&v, "H2").unwrap() };
        let cfg = TopConfig::new([q("2/7"), q("5"), q("-3/4")], q("1/3")).unwrap();
        let a = a_coeffs(&cfg, &hs).unwrap();
        assert!((a.a1 + &a.a2 + &a.a3).is_zero());
    }

    #[test]
    fn top_params_axis_availability() {
        let cfg = TopConfig::from_ints(2, 1, 1).unwrap();
        let h = InvariantPair { h1: q("3"), h2: q("5") };
        assert!(top_params(&cfg, &h, Axis::new(1).unwrap()).is_ok());
        assert_eq!(top_params(&cfg, &h, Axis::new(2).unwrap()), Err(Error::AxiallySymmetric { axis: 2 }));
        assert_eq!(top_params(&cfg, &h, Axis::new(3).unwrap()), Err(Error::AxiallySymmetric { axis: 3 }));
    }

    fn random_state(rng: &mut ChaCha8Rng) -> BodyState<ExactScalar> {
        let mut r = || ExactScalar::new(rng.gen_range(-9..=9), rng.gen_range(1..=5)).unwrap();
        BodyState::new(r(), r(), r())
    }

    fn random_top(rng: &mut ChaCha8Rng) -> TopConfig {
        loop {
            let mut r = || ExactScalar::new(rng.gen_range(1..=9), rng.gen_range(1..=4)).unwrap();
            let i = [r(), r(), r()];
            let d = ExactScalar::new(rng.gen_range(1..=3), rng.gen_range(1..=3)).unwrap();
            let cfg = TopConfig::new(i, d).unwrap();
            if !cfg.is_axially_symmetric() && !cfg.is_fully_symmetric() {
                return cfg;
            }
        }
    }

    #[test]
    fn n_step_relations_hold_on_orbits() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut checked = 0;
        while checked < 6 {
            let cfg = random_top(&mut rng);
            let s = random_state(&mut rng);
            let (Ok(h), Ok(orb)) = (invariants(&cfg, &s), orbit(&cfg, &s, 5)) else {
                continue;
            };
            for axis in Axis::ALL {
                let p = top_params(&cfg, &h, axis).unwrap();
                assert!(p[Coef::B].is_zero() && p[Coef::E].is_zero());
                let Ok(seq) = q_sequence(&p, 5) else { continue };
                let j = axis.index();
                for (n, qn) in seq.iter().enumerate() {
                    assert!(s_eval(qn, &orb[n + 1].x[j], &s.x[j]).is_zero(), "axis {axis:?} n {}", n + 1);
                }
                let q2 = &seq[1];
                assert!(q2[Coef::B].is_zero() && q2[Coef::E].is_zero());
            }
            checked += 1;
        }
    }

    #[test]
    fn wedge_rules() {
        let p = ex([1, 2, 3, 4, 5, 6]);
        assert_eq!(wedge(Coef::A, Coef::A, &p, &p), Err(Error::SameEntry('a')));
        let scaled = p.map(|v| v.clone() * &q("-5/2"));
        for (g, h) in Coef::pairs() {
            assert!(wedge(g, h, &p, &scaled).unwrap().is_zero());
        }
        let r = ex([3, -1, 4, 1, -5, 9]);
        for (g, h) in Coef::pairs() {
            assert_eq!(wedge(g, h, &p, &r).unwrap(), -wedge(h, g, &p, &r).unwrap());
        }
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_general(3, &ex([1, 0, 0, 0, 0, 1])).unwrap(), ExactScalar::one());
        assert!(gamma_general(3, &ex([0, 0, 1, 3, 0, 0])).unwrap().is_zero());
        assert!(gamma_general(4, &ex([1, 0, 1, 0, 0, 1])).unwrap().is_zero());
        assert_eq!(gamma_general(5, &ex([1, 0, 0, 0, 0, 1])).unwrap(), ExactScalar::one());
        assert_eq!(gamma_general(6, &ex([1, 0, 0, 0, 0, 1])), Err(Error::UnsupportedPeriod(6)));
        assert_eq!(gamma_poly(3).unwrap().to_string(), "a*f - b*e - 3*c^2 + c*d");
        assert_eq!(gamma_poly(5).unwrap().len(), 35);
    }

    #[test]
    fn symbolic_second_level_correlation() {
        let (v, p) = sym();
        let q2 = q_second(&p);
        let g3 = gamma_poly(3).unwrap();
        let rep = check_full_correlation(&p, &q2, &g3).unwrap();
        assert_eq!(rep.verdict, CorrelationVerdict::FullyCorrelated);
        assert!(rep.decomposition_holds);
        let expect = SparsePoly::parse("2*a^2*e - a*b*d + b^3", &v).unwrap();
        assert_eq!(rep.quotient(Coef::A, Coef::B), Some(&expect));

        let mut bent = q2.clone();
        bent.0[0] = bent.0[0].clone() + SparsePoly::constant(&v, &ExactScalar::one());
        let rep = check_full_correlation(&p, &bent, &g3).unwrap();
        assert_eq!(rep.verdict, CorrelationVerdict::NotFullyCorrelated);
        assert!(!rep.failing_wedges.is_empty());
    }

    #[test]
    fn symbolic_third_level_divisions_are_exact() {
        let (_, p) = sym();
        let seq = q_sequence(&p, 3).unwrap();
        let g4 = gamma_poly(4).unwrap();
        let rep = check_full_correlation(&p, &seq[2], &g4).unwrap();
        assert_eq!(rep.verdict, CorrelationVerdict::FullyCorrelated);
    }

    #[test]
    fn k_polynomial_recovers_next_level() {
        // S(Q,x;q⁽ⁿ⁺¹⁾) = c⁽ⁿ⁺¹⁾(Q−x)² + γ²K(Q,x), checked at n = 2 over a
        // rational line through parameter space.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let p =
                BiquadParams([(); 6].map(|_| ExactScalar::new(rng.gen_range(-20..=20), rng.gen_range(1..=7)).unwrap()));
            let q2 = q_second(&p);
            let q3 = q_next(&p, &p, &q2).unwrap();
            let g = gamma_general(3, &p).unwrap();
            let rep = check_full_correlation(&p, &q2, &g).unwrap();
            let k = k_params(&p, &rep).unwrap();
            let g2 = g.square();
            for c in [Coef::A, Coef::B, Coef::D, Coef::E, Coef::F] {
                assert_eq!(q3[c], g2.clone() * &k[c], "entry {c}");
            }
        }
    }

    #[test]
    fn euler_step_and_params_agree_at_reference_point() {
        let cfg = TopConfig::from_ints(1, 2, 3).unwrap();
        let s = BodyState::from_ints(1, 1, 1);
        let h = invariants(&cfg, &s).unwrap();
        let x = euler_step(&cfg, &s).unwrap();
        for axis in Axis::ALL {
            let p = top_params(&cfg, &h, axis).unwrap();
            assert!(s_eval(&p, &x.x[axis.index()], &s.x[axis.index()]).is_zero());
        }
    }
}
