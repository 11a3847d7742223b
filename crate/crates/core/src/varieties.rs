//! ξ-coordinates and the periodicity conditions of the top written in the
//! invariants (`A₀..A₃`) and in ξ, the period-3 variety v⁽³⁾, the three
//! lines and the singular quartic.

use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::biquadratic::{a_coeffs, ACoeffs, Axis};
use crate::error::{Error, Result};
use crate::eulermap::{invariants, BodyState, InvariantPair, TopConfig};
use crate::linalg;
use crate::polynomials::SparsePoly;
use crate::scalars::{BigScalar, ExactScalar, MaybeExact, Precision, Ring};

/// Reduced squared coordinates `ξₖ = αᵢαⱼxₖ²`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XiPoint<T> {
    pub xi: [T; 3],
}

impl<T> XiPoint<T> {
    pub fn new(xi1: T, xi2: T, xi3: T) -> Self {
        XiPoint { xi: [xi1, xi2, xi3] }
    }
}

/// `αⱼαₖ` for each coordinate `i`, the factor between `xᵢ²` and `ξᵢ`.
pub fn xi_prefactors(cfg: &TopConfig) -> [ExactScalar; 3] {
    let [a1, a2, a3] = cfg.alpha();
    [a2 * a3, a3 * a1, a1 * a2]
}

/// At δ = 1 this is `ξ₁ = (I₃−I₁)(I₁−I₂)x₁²/(4I₂I₃)` and cyclic; for other
/// step sizes the α's carry δ.
pub fn xi_from_state<T: Ring>(cfg: &TopConfig, s: &BodyState<T>) -> XiPoint<T> {
    let pre = xi_prefactors(cfg);
    let like = &s.x[0];
    XiPoint { xi: [0, 1, 2].map(|k| like.constant_like(&pre[k]) * &s.x[k].square()) }
}

/// `(1+ξ₁+ξ₂+ξ₃)² − 4(1+ξ₁ξ₂+ξ₂ξ₃+ξ₃ξ₁)`.
pub fn v3_condition<T: Ring>(p: &XiPoint<T>) -> T {
    let [x1, x2, x3] = &p.xi;
    let one = x1.one_like();
    let s = one.clone() + x1 + x2 + x3;
    let pairs = one + &(x1.clone() * x2) + &(x2.clone() * x3) + &(x3.clone() * x1);
    s.square() - &(x1.int_like(4) * &pairs)
}

/// `(1−ξ₁−ξ₂−ξ₃)² − 4ξ₁ξ₂ξ₃`.
pub fn singular_quartic<T: Ring>(p: &XiPoint<T>) -> T {
    let [x1, x2, x3] = &p.xi;
    let s = x1.one_like() - x1 - x2 - x3;
    s.square() - &(x1.int_like(4) * x1 * x2 * x3)
}

/// `A₁² + 2A₀(A₂−A₃) − 3A₀²`.
pub fn a_condition_p3<T: Ring>(a: &ACoeffs<T>) -> T {
    a.a1.square() + &(a.a0.int_like(2) * &a.a0 * &(a.a2.clone() - &a.a3)) - &(a.a0.int_like(3) * &a.a0.square())
}

fn check_period(n: u32) -> Result<()> {
    if (2..=4).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedPeriod(n))
    }
}

/// Factors of γⱼ⁽ⁿ⁾ in the A-coordinates; their product is [`gamma_top`].
pub fn gamma_top_factors<T: Ring>(n: u32, axis: Axis, a: &ACoeffs<T>) -> Result<Vec<T>> {
    check_period(n)?;
    let ACoeffs { a0, a1, a2, a3 } = a;
    let k = |c: i64| a0.int_like(c);
    let out = match (n, axis.number()) {
        (2, 1) => vec![a0.clone() - a2 + a3],
        (2, 2) => vec![a0.clone() - a2 - a3],
        (2, _) => vec![a0.clone() + a2 + a3],
        (3, j) => {
            let second = match j {
                1 => (a1.clone() + a0).square() + &(k(4) * a0 * a3),
                2 => (a1.clone() + a0).square() + &(k(4) * a3 * a1),
                _ => (a1.clone() - a0).square() + &(k(4) * a1 * a2),
            };
            vec![a_condition_p3(a), second]
        }
        (_, 1) => vec![
            k(2) * &(a1.clone() - a0),
            a0.clone() - a2 - a3,
            (a1.clone() - a0).pow(4) - &(k(8) * a2 * &(a0.clone() + a3) * &(a1.square() + &a0.square())),
        ],
        (_, 2) => vec![
            k(2) * &(a0.clone() - a1),
            a0.clone() - a2 + a3,
            (a1.clone() + a0).pow(4) + &(k(16) * a0 * a1 * a3 * &(a0.clone() - a2)),
        ],
        (_, _) => vec![
            k(2) * &(a0.clone() + a1),
            a0.clone() - a2 + a3,
            (a1.clone() - a0).pow(4) + &(k(16) * a0 * a1 * a2 * &(a0.clone() + a3)),
        ],
    };
    Ok(out)
}

/// γⱼ⁽ⁿ⁾ of the top in the A-coordinates, n ∈ {2, 3, 4}.
pub fn gamma_top<T: Ring>(n: u32, axis: Axis, a: &ACoeffs<T>) -> Result<T> {
    let f = gamma_top_factors(n, axis, a)?;
    Ok(product(f))
}

fn product<T: Ring>(f: Vec<T>) -> T {
    let mut it = f.into_iter();
    let first = it.next().expect("at least one factor");
    it.fold(first, |acc, v| acc * &v)
}

/// Factors of γⱼ⁽ⁿ⁾ in ξ; their product is [`gamma_xi`].
pub fn gamma_xi_factors<T: Ring>(n: u32, axis: Axis, p: &XiPoint<T>) -> Result<Vec<T>> {
    check_period(n)?;
    // Rotate so that the selected axis comes first; every form is the
    // axis-1 form under the cyclic relabelling, except for the sign
    // patterns, which are written out per axis as displayed.
    let [x1, x2, x3] = &p.xi;
    let one = x1.one_like();
    let k = |c: i64| x1.int_like(c);
    let lin = |s1: i64, s2: i64, s3: i64| one.clone() + &(k(s1) * x1) + &(k(s2) * x2) + &(k(s3) * x3);
    let out = match (n, axis.number()) {
        (2, 1) => vec![lin(1, -1, -1)],
        (2, 2) => vec![lin(-1, 1, -1)],
        (2, _) => vec![lin(-1, -1, 1)],
        (3, j) => {
            let second = match j {
                1 => {
                    lin(1, -1, -1).square()
                        - &(k(4) * &(x1.square() - &(x1.clone() * x2) + &(x2.clone() * x3) - &(x3.clone() * x1)))
                }
                2 => {
                    lin(-1, 1, -1).square()
                        - &(k(4) * &(x2.square() - &(x1.clone() * x2) - &(x2.clone() * x3) + &(x3.clone() * x1)))
                }
                _ => {
                    lin(-1, -1, 1).square()
                        - &(k(4) * &(x3.square() + &(x1.clone() * x2) - &(x2.clone() * x3) - &(x3.clone() * x1)))
                }
            };
            vec![v3_condition(p), second]
        }
        (_, j) => {
            // (ξᵢ, ξⱼ, ξₖ) = selected, next, previous, and the linear form
            // 1 ± ... with the selected coordinate positive.
            let (xs, xa, xb, l) = match j {
                1 => (x1, x2, x3, lin(1, -1, -1)),
                2 => (x2, x3, x1, lin(-1, 1, -1)),
                _ => (x3, x1, x2, lin(-1, -1, 1)),
            };
            let first = (one.clone() - xs).square() - &(xa.clone() - xb).square();
            let m1 = xs.clone() - &one;
            let dab = xa.clone() - xb;
            let second = m1.square() * &(k(2) * &l.square() - &m1.square())
                + &(dab.square() * &((k(2) + &(k(2) * xs) - xa - xb).square() + &(k(4) * xa * xb) - &(k(8) * xs)));
            vec![first, second]
        }
    };
    Ok(out)
}

/// γⱼ⁽ⁿ⁾ of the top in ξ, n ∈ {2, 3, 4}.
pub fn gamma_xi<T: Ring>(n: u32, axis: Axis, p: &XiPoint<T>) -> Result<T> {
    Ok(product(gamma_xi_factors(n, axis, p)?))
}

/// On one of `{ξ₁=1, ξ₂=ξ₃}`, `{ξ₂=1, ξ₃=ξ₁}`, `{ξ₃=1, ξ₁=ξ₂}`.
pub fn three_lines_member(p: &XiPoint<ExactScalar>) -> bool {
    let one = ExactScalar::one();
    let [x1, x2, x3] = &p.xi;
    (*x1 == one && x2 == x3) || (*x2 == one && x3 == x1) || (*x3 == one && x1 == x2)
}

/// The two ξ₃ completing `(ξ₁, ξ₂)` to a point of v⁽³⁾:
/// `ξ₃ = ξ₁+ξ₂−1 ± 2√((1−ξ₁)(1−ξ₂))`. Complex when the radicand is negative.
pub fn v3_sample(xi1: &ExactScalar, xi2: &ExactScalar, prec: Precision) -> [MaybeExact; 2] {
    let one = ExactScalar::one();
    let centre = xi1 + xi2 - &one;
    let rad = (&one - xi1) * (&one - xi2);
    match rad.sqrt_exact() {
        Some(r) => {
            let two_r = ExactScalar::from(2) * &r;
            [MaybeExact::Exact(&centre + &two_r), MaybeExact::Exact(&centre - &two_r)]
        }
        None => {
            let c = BigScalar::from_exact(&centre, prec);
            let two_r = BigScalar::from_exact(&ExactScalar::from(2), prec) * &BigScalar::from_exact(&rad, prec).sqrt();
            [MaybeExact::Approx(c.clone() + &two_r), MaybeExact::Approx(c - &two_r)]
        }
    }
}

/// Sign choice for each coordinate when lifting ξ back to x.
pub type Signs = [bool; 3];

/// `xₖ = ±√(ξₖ/(αᵢαⱼ))`, complex when the radicand is negative.
pub fn state_from_xi(cfg: &TopConfig, p: &XiPoint<BigScalar>, signs: Signs) -> Result<BodyState<BigScalar>> {
    let pre = xi_prefactors(cfg);
    let prec = p.xi[0].precision();
    let mut out = Vec::with_capacity(3);
    for k in 0..3 {
        if pre[k].is_zero() {
            if p.xi[k].is_zero() {
                out.push(BigScalar::zero(prec));
                continue;
            }
            return Err(Error::AxiallySymmetric { axis: k + 1 });
        }
        let r = p.xi[k].checked_div(&BigScalar::from_exact(&pre[k], prec))?.sqrt();
        out.push(if signs[k] { r } else { -r });
    }
    let [x1, x2, x3]: [BigScalar; 3] = out.try_into().map_err(|_| Error::SingularSystem)?;
    Ok(BodyState::new(x1, x2, x3))
}

/// Exact lift; `None` when some radicand is not a rational square.
pub fn state_from_xi_exact(
    cfg: &TopConfig,
    p: &XiPoint<ExactScalar>,
    signs: Signs,
) -> Result<Option<BodyState<ExactScalar>>> {
    let pre = xi_prefactors(cfg);
    let mut out = Vec::with_capacity(3);
    for k in 0..3 {
        if pre[k].is_zero() {
            if p.xi[k].is_zero() {
                out.push(ExactScalar::zero());
                continue;
            }
            return Err(Error::AxiallySymmetric { axis: k + 1 });
        }
        match p.xi[k].checked_div(&pre[k])?.sqrt_exact() {
            Some(r) => out.push(if signs[k] { r } else { -r }),
            None => return Ok(None),
        }
    }
    let [x1, x2, x3]: [ExactScalar; 3] = out.try_into().map_err(|_| Error::SingularSystem)?;
    Ok(Some(BodyState::new(x1, x2, x3)))
}

fn require_distinct(cfg: &TopConfig) -> Result<()> {
    if cfg.is_axially_symmetric() || cfg.is_fully_symmetric() {
        Err(Error::InvalidConfig("distinct moments of inertia are required".into()))
    } else {
        Ok(())
    }
}

/// Rationals ordered by height `max(|p|, q)`, then by denominator and
/// numerator, both signs: 0, 1, −1, 2, −2, 1/2, −1/2, ...
fn rationals_by_height(bound: u64) -> impl Iterator<Item = ExactScalar> {
    let zero = std::iter::once(ExactScalar::zero());
    let rest = (1..=bound as i64).flat_map(|h| {
        let mut v = Vec::new();
        for q in 1..=h {
            for p in 1..=h {
                if p.max(q) != h || gcd(p, q) != 1 {
                    continue;
                }
                let r = ExactScalar::new(p, q).expect("nonzero denominator");
                v.push(-&r);
                v.push(r);
            }
        }
        v.sort_by(|a, b| a.abs().cmp(&b.abs()).then(b.cmp(a)));
        v
    });
    zero.chain(rest)
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Rational invariant pairs on the period-3 conic, searching `H₁` by
/// increasing height and solving the quadratic in `H₂`; pairs whose `H₂`
/// exceeds the height bound are skipped.
pub fn p3_invariant_points(
    cfg: &TopConfig,
    bound: u64,
) -> Result<impl Iterator<Item = InvariantPair<ExactScalar>> + '_> {
    require_distinct(cfg)?;
    if bound == 0 {
        return Err(Error::InvalidConfig("height bound must be at least 1".into()));
    }
    let cond = move |h1: &ExactScalar, h2: ExactScalar| -> ExactScalar {
        let a = a_coeffs(cfg, &InvariantPair { h1: h1.clone(), h2 }).expect("δ ≠ 0");
        a_condition_p3(&a)
    };
    let bound_int = rug::Integer::from(bound);
    Ok(rationals_by_height(bound).flat_map(move |h1| {
        // g(H₂) = αH₂² + βH₂ + γ from three evaluations.
        let g0 = cond(&h1, ExactScalar::zero());
        let gp = cond(&h1, ExactScalar::one());
        let gm = cond(&h1, -ExactScalar::one());
        let two = ExactScalar::from(2);
        let alpha = (&gp + &gm - &(&two * &g0)).checked_div(&two).expect("two");
        let beta = (&gp - &gm).checked_div(&two).expect("two");
        let disc = &beta * &beta - &(ExactScalar::from(4) * &alpha * &g0);
        let mut found = Vec::new();
        if alpha.is_zero() {
            return found;
        }
        if let Some(r) = disc.sqrt_exact() {
            let den = &two * &alpha;
            for root in [(-&beta + &r), (-&beta - &r)] {
                let h2 = root.checked_div(&den).expect("nonzero");
                let pair = InvariantPair { h1: h1.clone(), h2 };
                if pair.h2.height() <= bound_int && !found.contains(&pair) {
                    found.push(pair);
                }
            }
        }
        found
    }))
}

/// The first rational point of the period-3 conic within the height bound.
pub fn rational_p3_invariants(cfg: &TopConfig, bound: u64) -> Result<InvariantPair<ExactScalar>> {
    p3_invariant_points(cfg, bound)?.next().ok_or(Error::NotFound(bound))
}

/// Variables `xi1, xi2, xi3`.
pub fn xi_vars() -> &'static Arc<[String]> {
    static V: OnceLock<Arc<[String]>> = OnceLock::new();
    V.get_or_init(|| SparsePoly::variables(&["xi1", "xi2", "xi3"]).expect("three names"))
}

/// Variables `A0, A1, A2, A3`.
pub fn a_vars() -> &'static Arc<[String]> {
    static V: OnceLock<Arc<[String]>> = OnceLock::new();
    V.get_or_init(|| SparsePoly::variables(&["A0", "A1", "A2", "A3"]).expect("four names"))
}

pub fn symbolic_xi() -> XiPoint<SparsePoly> {
    let g = SparsePoly::generators(xi_vars());
    XiPoint::new(g[0].clone(), g[1].clone(), g[2].clone())
}

pub fn symbolic_a() -> ACoeffs<SparsePoly> {
    let g = SparsePoly::generators(a_vars());
    ACoeffs { a0: g[0].clone(), a1: g[1].clone(), a2: g[2].clone(), a3: g[3].clone() }
}

/// The common zeros of the three period-2 linear forms, by exact linear
/// algebra on their coefficients. Errors when the system is singular.
pub fn period2_common_zero() -> Result<XiPoint<ExactScalar>> {
    let xi = symbolic_xi();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for axis in Axis::ALL {
        let form = gamma_xi(2, axis, &xi)?;
        let mut row = vec![ExactScalar::zero(); 3];
        let mut constant = ExactScalar::zero();
        for (m, c) in form.terms() {
            match m.degree() {
                0 => constant = c,
                1 => {
                    let k = (0..3).find(|&k| m.exponent(k) == 1).expect("linear term");
                    row[k] = c;
                }
                _ => return Err(Error::InvalidConfig("period-2 form is not linear".into())),
            }
        }
        rows.push(row);
        rhs.push(-constant);
    }
    let sol = linalg::solve(rows, rhs)?;
    Ok(XiPoint::new(sol[0].clone(), sol[1].clone(), sol[2].clone()))
}

/// Outcome of comparing the A-form and ξ-form of one γ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencyVerdict {
    pub passed: bool,
    pub n: u32,
    pub axis: Axis,
    pub trials: usize,
    /// Homogeneous degree m of the A-form; ratios are taken after dividing
    /// by `(A₀/(1−ξ₁))^m`.
    pub weight: u32,
    /// The common normalized ratio, when one exists.
    pub ratio: Option<ExactScalar>,
    pub witness: Option<ConsistencyWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencyWitness {
    pub inertia: [ExactScalar; 3],
    pub state: BodyState<ExactScalar>,
}

/// Homogeneous degree of the A-form of γ⁽ⁿ⁾.
pub fn a_form_weight(n: u32) -> Result<u32> {
    match n {
        2 => Ok(1),
        3 => Ok(4),
        4 => Ok(6),
        _ => Err(Error::UnsupportedPeriod(n)),
    }
}

/// Substitutes the invariants of random rational states into the A-form and
/// compares with the ξ-form: after the weight normalization the ratio must
/// be one constant across all trials.
pub fn substitution_consistency(n: u32, axis: Axis, trials: usize, seed: u64) -> Result<ConsistencyVerdict> {
    compare_forms(n, axis, trials, seed, |a| gamma_top(n, axis, a), |p| gamma_xi(n, axis, p))
}

/// [`substitution_consistency`] with caller-supplied forms, so that
/// corrupted forms can be checked to fail.
pub fn compare_forms<FA, FX>(
    n: u32,
    axis: Axis,
    trials: usize,
    seed: u64,
    a_form: FA,
    xi_form: FX,
) -> Result<ConsistencyVerdict>
where
    FA: Fn(&ACoeffs<ExactScalar>) -> Result<ExactScalar>,
    FX: Fn(&XiPoint<ExactScalar>) -> Result<ExactScalar>,
{
    let weight = a_form_weight(n)?;
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratio: Option<ExactScalar> = None;
    let mut done = 0;
    let mut attempts = 0usize;
    while done < trials {
        attempts += 1;
        if attempts > trials * 100 {
            return Err(Error::InvalidConfig("could not draw usable sample points".into()));
        }
        let mut r =
            |lo: i64, hi: i64| ExactScalar::new(rng.gen_range(lo..=hi), rng.gen_range(1..=97)).expect("den ≥ 1");
        let inertia = [r(1, 500), r(1, 500), r(1, 500)];
        let Ok(cfg) = TopConfig::new(inertia.clone(), ExactScalar::one()) else { continue };
        if cfg.is_axially_symmetric() || cfg.is_fully_symmetric() {
            continue;
        }
        let state = BodyState::new(r(-500, 500), r(-500, 500), r(-500, 500));
        let Ok(h) = invariants(&cfg, &state) else { continue };
        let a = a_coeffs(&cfg, &h)?;
        let xi = xi_from_state(&cfg, &state);
        let ga = a_form(&a)?;
        let gx = xi_form(&xi)?;
        let scale = a.a0.checked_div(&(ExactScalar::one() - &xi.xi[0]))?.powi(weight as i32)?;
        let normalized = (&gx * &scale).clone();
        let ok = if normalized.is_zero() {
            ga.is_zero()
        } else {
            let r = ga.checked_div(&normalized)?;
            match &ratio {
                None => {
                    let ok = !r.is_zero();
                    ratio = Some(r);
                    ok
                }
                Some(r0) => *r0 == r,
            }
        };
        done += 1;
        if !ok {
            return Ok(ConsistencyVerdict {
                passed: false,
                n,
                axis,
                trials,
                weight,
                ratio,
                witness: Some(ConsistencyWitness { inertia, state }),
            });
        }
    }
    Ok(ConsistencyVerdict { passed: true, n, axis, trials, weight, ratio, witness: None })
}

/// Real states on v⁽³⁾ for a top with distinct moments: random `(ξ₁, ξ₂)`
/// with the sign pattern that admits real lifts, completed by either root.
/// Fixed points are excluded.
pub fn sample_real_v3_states(
    cfg: &TopConfig,
    count: usize,
    seed: u64,
    prec: Precision,
) -> Result<Vec<(XiPoint<BigScalar>, BodyState<BigScalar>)>> {
    require_distinct(cfg)?;
    let pre = xi_prefactors(cfg);
    let sign = pre.clone().map(|p| p.signum());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 10_000 * count.max(1) {
            return Err(Error::NotFound(count as u64));
        }
        let mut draw = |s: i32| -> ExactScalar {
            let v = ExactScalar::new(rng.gen_range(1..=400), rng.gen_range(1..=200)).expect("den ≥ 1");
            if s < 0 {
                -v
            } else {
                v
            }
        };
        let (xi1, xi2) = (draw(sign[0]), draw(sign[1]));
        let roots = v3_sample(&xi1, &xi2, prec);
        let pick = rng.gen_range(0..2);
        let xi3 = roots[pick].to_big(prec);
        if !xi3.is_real() || xi3.re().is_zero() || (xi3.re().is_sign_negative() != (sign[2] < 0)) {
            continue;
        }
        let p = XiPoint::new(BigScalar::from_exact(&xi1, prec), BigScalar::from_exact(&xi2, prec), xi3);
        let signs = [rng.gen(), rng.gen(), rng.gen()];
        let s = state_from_xi(cfg, &p, signs)?;
        out.push((p, s));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eulermap::denominator_with;
    use crate::scalars::{approx_equal, Tolerance};

    fn q(s: &str) -> ExactScalar {
        s.parse().unwrap()
    }

    fn xp(a: &str, b: &str, c: &str) -> XiPoint<ExactScalar> {
        XiPoint::new(q(a), q(b), q(c))
    }

    fn ax(n: u8) -> Axis {
        Axis::new(n).unwrap()
    }

    #[test]
    fn xi_examples() {
        let cfg = TopConfig::from_ints(1, 2, 3).unwrap();
        assert_eq!(xi_from_state(&cfg, &BodyState::from_ints(0, 0, 0)), xp("0", "0", "0"));
        assert_eq!(xi_from_state(&cfg, &BodyState::from_ints(1, 1, 1)), xp("-1/12", "1/12", "-1/4"));
        let axi = TopConfig::from_ints(2, 1, 1).unwrap();
        let p = xi_from_state(&axi, &BodyState::from_ints(3, -5, 7));
        assert!(p.xi[1].is_zero() && p.xi[2].is_zero());
    }

    #[test]
    fn xi_matches_inertia_form_at_unit_step() {
        let cfg = TopConfig::new([q("2/3"), q("7"), q("5/2")], q("1")).unwrap();
        let [i1, i2, i3] = cfg.inertia().clone();
        let s = BodyState::new(q("3/5"), q("-2"), q("1/7"));
        let four = q("4");
        let expect = [
            ((&i3 - &i1) * (&i1 - &i2) * s.x[0].square()).checked_div(&(&four * &i2 * &i3)).unwrap(),
            ((&i1 - &i2) * (&i2 - &i3) * s.x[1].square()).checked_div(&(&four * &i3 * &i1)).unwrap(),
            ((&i2 - &i3) * (&i3 - &i1) * s.x[2].square()).checked_div(&(&four * &i1 * &i2)).unwrap(),
        ];
        assert_eq!(xi_from_state(&cfg, &s).xi, expect);
    }

    #[test]
    fn v3_and_quartic_examples() {
        assert!(v3_condition(&xp("-3", "0", "0")).is_zero());
        assert!(v3_condition(&xp("1", "1", "1")).is_zero());
        assert_eq!(v3_condition(&xp("0", "0", "0")), q("-3"));
        assert!(singular_quartic(&xp("1", "1", "1")).is_zero());
        assert!(singular_quartic(&xp("1", "3/7", "3/7")).is_zero());
        assert_eq!(singular_quartic(&xp("0", "0", "0")), q("1"));
    }

    #[test]
    fn v3_is_fully_symmetric() {
        let xi = symbolic_xi();
        let base = v3_condition(&xi);
        let [a, b, c] = xi.xi.clone();
        for perm in [
            [a.clone(), c.clone(), b.clone()],
            [b.clone(), a.clone(), c.clone()],
            [b.clone(), c.clone(), a.clone()],
            [c.clone(), a.clone(), b.clone()],
            [c.clone(), b.clone(), a.clone()],
        ] {
            assert_eq!(v3_condition(&XiPoint { xi: perm }), base);
        }
    }

    #[test]
    fn a_condition_examples() {
        let a = ACoeffs { a0: q("1"), a1: q("1"), a2: q("1"), a3: q("-2") };
        assert_eq!(a_condition_p3(&a), q("4"));
        let a = ACoeffs { a0: q("0"), a1: q("0"), a2: q("5"), a3: q("7") };
        assert!(a_condition_p3(&a).is_zero());
    }

    #[test]
    fn gamma_top_examples() {
        let a = ACoeffs { a0: q("24"), a1: q("96/13"), a2: q("-48/13"), a3: q("-48/13") };
        assert_eq!(gamma_top(2, ax(1), &a).unwrap(), q("24"));
        let a = ACoeffs { a0: q("1"), a1: q("0"), a2: q("1"), a3: q("-1") };
        assert_eq!(gamma_top(2, ax(1), &a).unwrap(), q("-1"));
        assert_eq!(gamma_top(5, ax(1), &a), Err(Error::UnsupportedPeriod(5)));
        let sym = symbolic_a();
        let g = gamma_top(3, ax(1), &sym).unwrap();
        assert!(g.divide_exact(&a_condition_p3(&sym)).is_ok());
    }

    #[test]
    fn gamma_xi_examples() {
        for axis in Axis::ALL {
            assert!(gamma_xi(2, axis, &xp("1", "1", "1")).unwrap().is_zero());
            assert_eq!(gamma_xi(2, axis, &xp("0", "0", "0")).unwrap(), q("1"));
        }
        let roots = v3_sample(&q("-1/3"), &q("-2"), Precision::DEFAULT);
        let r = roots[0].as_exact().expect("square radicand").clone();
        for axis in Axis::ALL {
            assert!(gamma_xi(3, axis, &XiPoint::new(q("-1/3"), q("-2"), r.clone())).unwrap().is_zero());
        }
    }

    #[test]
    fn three_lines_examples() {
        assert!(three_lines_member(&xp("1", "5", "5")));
        assert!(three_lines_member(&xp("1", "1", "1")));
        assert!(!three_lines_member(&xp("0", "0", "1/2")));
    }

    #[test]
    fn v3_sample_examples() {
        let p = Precision::DEFAULT;
        let roots = v3_sample(&q("0"), &q("0"), p);
        let vals: Vec<_> = roots.iter().map(|r| r.as_exact().unwrap().clone()).collect();
        assert_eq!(vals, vec![q("1"), q("-3")]);
        for r in v3_sample(&q("1"), &q("1"), p) {
            assert!(v3_condition(&XiPoint::new(q("1"), q("1"), r.as_exact().unwrap().clone())).is_zero());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let tol = Tolerance::default();
        for _ in 0..50 {
            let a = ExactScalar::random(&mut rng, 1000);
            let b = ExactScalar::random(&mut rng, 1000);
            for r in v3_sample(&a, &b, p) {
                let pt = XiPoint::new(BigScalar::from_exact(&a, p), BigScalar::from_exact(&b, p), r.to_big(p));
                let res = v3_condition(&pt);
                assert!(approx_equal(&res, &BigScalar::zero(p), &tol).unwrap(), "{res}");
            }
        }
    }

    #[test]
    fn lifting_round_trips() {
        let cfg = TopConfig::from_ints(1, 2, 3).unwrap();
        let lifted = state_from_xi_exact(&cfg, &xp("-1/12", "1/12", "-1/4"), [true; 3]).unwrap();
        assert_eq!(lifted, Some(BodyState::from_ints(1, 1, 1)));
        assert_eq!(
            state_from_xi_exact(&cfg, &xp("0", "0", "0"), [true; 3]).unwrap(),
            Some(BodyState::from_ints(0, 0, 0))
        );
        let p = Precision::DEFAULT;
        let tol = Tolerance::new(1e-60, 1e-60);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let xi = XiPoint::new(
                BigScalar::from_exact(&ExactScalar::random(&mut rng, 100), p),
                BigScalar::from_exact(&ExactScalar::random(&mut rng, 100), p),
                BigScalar::from_exact(&ExactScalar::random(&mut rng, 100), p),
            );
            let s = state_from_xi(&cfg, &xi, [rng.gen(), rng.gen(), rng.gen()]).unwrap();
            let back = xi_from_state(&cfg, &s);
            for k in 0..3 {
                assert!(approx_equal(&back.xi[k], &xi.xi[k], &tol).unwrap());
            }
        }
        let axi = TopConfig::from_ints(2, 1, 1).unwrap();
        let xi = XiPoint::new(BigScalar::zero(p), BigScalar::from_f64(1.0, p), BigScalar::zero(p));
        assert_eq!(state_from_xi(&axi, &xi, [true; 3]), Err(Error::AxiallySymmetric { axis: 2 }));
    }

    #[test]
    fn p3_invariants_found_and_on_conic() {
        let cfg = TopConfig::from_ints(1, 2, 3).unwrap();
        let h = rational_p3_invariants(&cfg, 10_000).unwrap();
        assert!(a_condition_p3(&a_coeffs(&cfg, &h).unwrap()).is_zero());
        let several: Vec<_> = p3_invariant_points(&cfg, 10_000).unwrap().take(4).collect();
        assert_eq!(several.len(), 4);
        assert!(rational_p3_invariants(&TopConfig::from_ints(1, 1, 3).unwrap(), 100).is_err());
    }

    #[test]
    fn a_condition_is_v3_after_substitution() {
        // I=(1,2,3): with H over the shared denominator 1 − ξ₁, scaling every
        // Aᵢ by that denominator gives A₁²+2A₀(A₂−A₃)−3A₀² = A₀²·v⁽³⁾.
        let cfg = TopConfig::from_ints(1, 2, 3).unwrap();
        let v = SparsePoly::variables(&["x1", "x2", "x3"]).unwrap();
        let g = SparsePoly::generators(&v);
        let s = BodyState::new(g[0].clone(), g[1].clone(), g[2].clone());
        let xi = xi_from_state(&cfg, &s);
        let c = |r: &ExactScalar| SparsePoly::constant(&v, r);
        let den = c(&ExactScalar::one()) - &xi.xi[0];
        let [i1, i2, i3] = cfg.inertia().clone().map(|i| c(&i));
        let sq: Vec<SparsePoly> = g.iter().map(|x| x * x).collect();
        let h1 = &i1 * &sq[0] + &i2 * &sq[1] + &i3 * &sq[2];
        let h2 = &(&i1 * &i1) * &sq[0] + &(&i2 * &i2) * &sq[1] + &(&i3 * &i3) * &sq[2];
        let a = ACoeffs {
            a0: c(&q("24")) * &den,
            a1: c(&q("-1")) * &(&i1 * &h1 - &h2),
            a2: c(&q("2")) * &(&i2 * &h1 - &h2),
            a3: c(&q("-1")) * &(&i3 * &h1 - &h2),
        };
        assert_eq!(a_condition_p3(&a), c(&q("576")) * &v3_condition(&xi));
    }

    #[test]
    fn substitution_consistency_all_forms() {
        for n in 2..=4 {
            for axis in Axis::ALL {
                let v = substitution_consistency(n, axis, 20, 7).unwrap();
                assert!(v.passed, "n={n} axis={axis:?} {v:?}");
            }
        }
    }

    #[test]
    fn corrupted_form_fails_consistency() {
        let axis = ax(1);
        let v = compare_forms(
            3,
            axis,
            20,
            7,
            |a| gamma_top(3, axis, a),
            |p| {
                let f = gamma_xi_factors(3, axis, p)?;
                // flip the sign of the ξ₂ξ₃ term inside the second factor
                let [_, x2, x3] = &p.xi;
                let bumped = f[1].clone() + &(ExactScalar::from(8) * x2 * x3);
                Ok(f[0].clone() * &bumped)
            },
        )
        .unwrap();
        assert!(!v.passed);
        assert!(v.witness.is_some());
    }

    #[test]
    fn period_two_forms_meet_only_at_one_one_one() {
        let p = period2_common_zero().unwrap();
        assert_eq!(p, xp("1", "1", "1"));
        assert!(singular_quartic(&p).is_zero());
    }

    #[test]
    fn quartic_factors_into_denominators() {
        let v = SparsePoly::variables(&["al1", "al2", "al3", "x1", "x2", "x3"]).unwrap();
        let g = SparsePoly::generators(&v);
        let alpha = [g[0].clone(), g[1].clone(), g[2].clone()];
        let x = [g[3].clone(), g[4].clone(), g[5].clone()];
        let xi = XiPoint::new(
            &(&alpha[1] * &alpha[2]) * &(&x[0] * &x[0]),
            &(&alpha[2] * &alpha[0]) * &(&x[1] * &x[1]),
            &(&alpha[0] * &alpha[1]) * &(&x[2] * &x[2]),
        );
        let lhs = singular_quartic(&xi);
        let rhs = denominator_with(&alpha, &x, 1) * denominator_with(&alpha, &x, -1);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn sampled_states_lie_on_v3() {
        let cfg = TopConfig::from_ints(1, 2, 3).unwrap();
        let p = Precision::DEFAULT;
        for (_, s) in sample_real_v3_states(&cfg, 5, 3, p).unwrap() {
            assert!(s.x.iter().all(|v| v.is_real()));
            let res = v3_condition(&xi_from_state(&cfg, &s));
            assert!(res.abs_f64() < 1e-60);
        }
    }
}
