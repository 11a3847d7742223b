//! The discrete Euler top: explicit map, implicit-scheme oracle, inverse,
//! invariants, singular denominator and orbits.
//!
//! Everything is generic over the scalar so that the same code runs on exact
//! rationals, high-precision floats and (for the numerator/denominator
//! formulas) symbolic polynomials.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalars::{BigScalar, ExactScalar, Field, Precision, Ring};

/// Moments of inertia and time step, with the derived α's cached.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TopConfigRepr", into = "TopConfigRepr")]
pub struct TopConfig {
    inertia: [ExactScalar; 3],
    delta: ExactScalar,
    alpha: [ExactScalar; 3],
}

#[derive(Serialize, Deserialize)]
struct TopConfigRepr {
    inertia: [ExactScalar; 3],
    delta: ExactScalar,
}

impl TryFrom<TopConfigRepr> for TopConfig {
    type Error = Error;
    fn try_from(r: TopConfigRepr) -> Result<Self> {
        TopConfig::new(r.inertia, r.delta)
    }
}

impl From<TopConfig> for TopConfigRepr {
    fn from(c: TopConfig) -> Self {
        TopConfigRepr { inertia: c.inertia, delta: c.delta }
    }
}

impl TopConfig {
    pub fn new(inertia: [ExactScalar; 3], delta: ExactScalar) -> Result<Self> {
        if inertia.iter().any(|i| i.is_zero()) {
            return Err(Error::InvalidConfig("moments of inertia must be nonzero".into()));
        }
        if delta.is_zero() {
            return Err(Error::InvalidConfig("time step must be nonzero".into()));
        }
        let [i1, i2, i3] = &inertia;
        let two = ExactScalar::from(2);
        let alpha_of =
            |num: ExactScalar, den: &ExactScalar| -> Result<ExactScalar> { (&delta * &num).checked_div(&(&two * den)) };
        let alpha = [alpha_of(i2 - i3, i1)?, alpha_of(i3 - i1, i2)?, alpha_of(i1 - i2, i3)?];
        Ok(TopConfig { inertia, delta, alpha })
    }

    /// Integer moments of inertia with δ = 1.
    pub fn from_ints(i1: i64, i2: i64, i3: i64) -> Result<Self> {
        TopConfig::new([i1.into(), i2.into(), i3.into()], ExactScalar::one())
    }

    pub fn inertia(&self) -> &[ExactScalar; 3] {
        &self.inertia
    }

    pub fn delta(&self) -> &ExactScalar {
        &self.delta
    }

    pub fn alpha(&self) -> &[ExactScalar; 3] {
        &self.alpha
    }

    pub fn with_delta(&self, delta: ExactScalar) -> Result<Self> {
        TopConfig::new(self.inertia.clone(), delta)
    }

    /// The same top with δ negated; its step is the inverse map.
    pub fn reversed(&self) -> Self {
        TopConfig {
            inertia: self.inertia.clone(),
            delta: -&self.delta,
            alpha: [-&self.alpha[0], -&self.alpha[1], -&self.alpha[2]],
        }
    }

    pub fn is_fully_symmetric(&self) -> bool {
        self.inertia[0] == self.inertia[1] && self.inertia[1] == self.inertia[2]
    }

    /// Exactly two moments equal.
    pub fn is_axially_symmetric(&self) -> bool {
        let [a, b, c] = &self.inertia;
        !self.is_fully_symmetric() && (a == b || b == c || c == a)
    }

    /// The α's embedded in the ring of `like`.
    pub fn alphas_like<T: Ring>(&self, like: &T) -> [T; 3] {
        [like.constant_like(&self.alpha[0]), like.constant_like(&self.alpha[1]), like.constant_like(&self.alpha[2])]
    }
}

/// Angular velocity in the body frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BodyState<T> {
    pub x: [T; 3],
}

impl<T> BodyState<T> {
    pub fn new(x1: T, x2: T, x3: T) -> Self {
        BodyState { x: [x1, x2, x3] }
    }
}

impl BodyState<ExactScalar> {
    pub fn from_ints(x1: i64, x2: i64, x3: i64) -> Self {
        BodyState::new(x1.into(), x2.into(), x3.into())
    }

    pub fn to_big(&self, prec: Precision) -> BodyState<BigScalar> {
        BodyState { x: self.x.clone().map(|v| BigScalar::from_exact(&v, prec)) }
    }
}

impl BodyState<BigScalar> {
    /// Max-norm distance `maxᵢ |xᵢ − yᵢ|`.
    pub fn distance(&self, other: &BodyState<BigScalar>) -> Float {
        let mut best = Float::with_val(self.x[0].precision().bits(), 0);
        for (a, b) in self.x.iter().zip(&other.x) {
            let d = (a.clone() - b).abs();
            if d > best {
                best = d;
            }
        }
        best
    }
}

/// The two conserved quantities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantPair<T> {
    #[serde(rename = "H1")]
    pub h1: T,
    #[serde(rename = "H2")]
    pub h2: T,
}

/// `1 − 2s·α₁α₂α₃x₁x₂x₃ − α₂α₃x₁² − α₃α₁x₂² − α₁α₂x₃²` with `s = odd_sign`.
/// `odd_sign = 1` is the map's denominator; `±1` give the two factors of
/// the singular quartic.
pub fn denominator_with<T: Ring>(alpha: &[T; 3], x: &[T; 3], odd_sign: i64) -> T {
    let [a1, a2, a3] = alpha;
    let [x1, x2, x3] = x;
    let one = a1.one_like();
    let odd = a1.int_like(2 * odd_sign) * a1 * a2 * a3 * x1 * x2 * x3;
    one - &odd - &(a2.clone() * a3 * x1 * x1) - &(a3.clone() * a1 * x2 * x2) - &(a1.clone() * a2 * x3 * x3)
}

/// Numerators of the explicit map over the common denominator.
pub fn step_numerators<T: Ring>(alpha: &[T; 3], x: &[T; 3]) -> [T; 3] {
    let [a1, a2, a3] = alpha;
    let [x1, x2, x3] = x;
    let one = a1.one_like();
    let two = a1.int_like(2);
    let u1 = a2.clone() * a3 * x1 * x1;
    let u2 = a3.clone() * a1 * x2 * x2;
    let u3 = a1.clone() * a2 * x3 * x3;
    [
        x1.clone() * &(one.clone() - &u1 + &u2 + &u3) + &(two.clone() * a1 * x2 * x3),
        x2.clone() * &(one.clone() + &u1 - &u2 + &u3) + &(two.clone() * a2 * x3 * x1),
        x3.clone() * &(one + &u1 + &u2 - &u3) + &(two * a3 * x1 * x2),
    ]
}

pub fn denominator<T: Ring>(cfg: &TopConfig, s: &BodyState<T>) -> T {
    denominator_with(&cfg.alphas_like(&s.x[0]), &s.x, 1)
}

/// One step of the explicit map.
pub fn euler_step<T: Field>(cfg: &TopConfig, s: &BodyState<T>) -> Result<BodyState<T>> {
    let alpha = cfg.alphas_like(&s.x[0]);
    let d = denominator_with(&alpha, &s.x, 1);
    if d.is_negligible() {
        return Err(Error::SingularPoint { step: 0 });
    }
    let [n1, n2, n3] = step_numerators(&alpha, &s.x);
    Ok(BodyState::new(n1.try_div(&d)?, n2.try_div(&d)?, n3.try_div(&d)?))
}

/// One step by solving the implicit scheme, which is linear in the image.
pub fn euler_step_implicit<T: Field>(cfg: &TopConfig, s: &BodyState<T>) -> Result<BodyState<T>> {
    let [a1, a2, a3] = cfg.alphas_like(&s.x[0]);
    let [x1, x2, x3] = &s.x;
    let one = x1.one_like();
    let m = vec![
        vec![one.clone(), -(a1.clone() * x3), -(a1.clone() * x2)],
        vec![-(a2.clone() * x3), one.clone(), -(a2.clone() * x1)],
        vec![-(a3.clone() * x2), -(a3.clone() * x1), one],
    ];
    let sol = linalg::solve(m, s.x.to_vec())?;
    let [y1, y2, y3]: [T; 3] = sol.try_into().map_err(|_| Error::SingularSystem)?;
    Ok(BodyState::new(y1, y2, y3))
}

/// The backward map, i.e. the forward map with δ negated.
pub fn euler_inverse<T: Field>(cfg: &TopConfig, s: &BodyState<T>) -> Result<BodyState<T>> {
    euler_step(&cfg.reversed(), s)
}

/// `H₁, H₂` over the shared denominator `1 − α₂α₃x₁²`.
pub fn invariants<T: Field>(cfg: &TopConfig, s: &BodyState<T>) -> Result<InvariantPair<T>> {
    let like = &s.x[0];
    let [_, a2, a3] = cfg.alphas_like(like);
    let [i1, i2, i3] = cfg.inertia().clone().map(|i| like.constant_like(&i));
    let sq = s.x.clone().map(|v| v.square());
    let den = like.one_like() - &(a2 * &a3 * &sq[0]);
    if den.is_negligible() {
        return Err(Error::InvariantsUndefined);
    }
    let h1 = i1.clone() * &sq[0] + &(i2.clone() * &sq[1]) + &(i3.clone() * &sq[2]);
    let h2 = i1.square() * &sq[0] + &(i2.square() * &sq[1]) + &(i3.square() * &sq[2]);
    Ok(InvariantPair { h1: h1.try_div(&den)?, h2: h2.try_div(&den)? })
}

/// At least two coordinates vanish: a steady rotation about a body axis.
pub fn is_fixed_point<T: Ring>(s: &BodyState<T>) -> bool {
    s.x.iter().filter(|v| v.is_zero()).count() >= 2
}

/// `[s, X⁽¹⁾, …, X⁽ⁿ⁾]`. A singular step reports the index of the state
/// whose image is undefined.
pub fn orbit<T: Field>(cfg: &TopConfig, s: &BodyState<T>, n: usize) -> Result<Vec<BodyState<T>>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(s.clone());
    for k in 0..n {
        let next = euler_step(cfg, &out[k]).map_err(|e| match e {
            Error::SingularPoint { .. } => Error::SingularPoint { step: k },
            other => other,
        })?;
        out.push(next);
    }
    Ok(out)
}

/// Right side of the continuous Euler equations, `ẋ₁ = (I₂−I₃)/I₁ x₂x₃` and
/// cyclic.
pub fn continuous_rhs<T: Ring>(cfg: &TopConfig, s: &BodyState<T>) -> Result<[T; 3]> {
    let [i1, i2, i3] = cfg.inertia();
    let like = &s.x[0];
    let k = [(i2 - i3).checked_div(i1)?, (i3 - i1).checked_div(i2)?, (i1 - i2).checked_div(i3)?]
        .map(|c| like.constant_like(&c));
    let [x1, x2, x3] = &s.x;
    let [k1, k2, k3] = k;
    Ok([k1 * x2 * x3, k2 * x3 * x1, k3 * x1 * x2])
}

/// CSV dump of an exact orbit: step, coordinates, invariants, denominator.
pub fn orbit_csv(cfg: &TopConfig, states: &[BodyState<ExactScalar>]) -> Result<String> {
    let mut out = String::from("step,x1,x2,x3,H1,H2,denominator\n");
    for (k, s) in states.iter().enumerate() {
        let h = invariants(cfg, s)?;
        out.push_str(&format!("{k},{},{},{},{},{},{}\n", s.x[0], s.x[1], s.x[2], h.h1, h.h2, denominator(cfg, s)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{BigScalar, Precision};
    use proptest::prelude::*;

    fn q(s: &str) -> ExactScalar {
        s.parse().unwrap()
    }

    fn top123() -> TopConfig {
        TopConfig::from_ints(1, 2, 3).unwrap()
    }

    #[test]
    fn rejects_degenerate_configs() {
        assert!(TopConfig::from_ints(0, 1, 2).is_err());
        assert!(TopConfig::new([q("1"), q("2"), q("3")], q("0")).is_err());
    }

    #[test]
    fn symmetry_flags() {
        assert!(TopConfig::from_ints(1, 1, 1).unwrap().is_fully_symmetric());
        assert!(TopConfig::from_ints(2, 1, 1).unwrap().is_axially_symmetric());
        assert!(!top123().is_axially_symmetric());
    }

    #[test]
    fn identity_top_is_identity() {
        let cfg = TopConfig::new([q("1"), q("1"), q("1")], q("3/7")).unwrap();
        let s = BodyState::new(q("2/3"), q("-5"), q("7/11"));
        assert_eq!(euler_step(&cfg, &s).unwrap(), s);
        assert_eq!(euler_step_implicit(&cfg, &s).unwrap(), s);
        assert_eq!(euler_inverse(&cfg, &s).unwrap(), s);
    }

    #[test]
    fn fixed_axes_are_fixed() {
        let cfg = top123();
        for s in [BodyState::from_ints(5, 0, 0), BodyState::from_ints(0, -3, 0), BodyState::from_ints(0, 0, 4)] {
            assert!(is_fixed_point(&s));
            assert_eq!(euler_step(&cfg, &s).unwrap(), s);
            assert_eq!(euler_step_implicit(&cfg, &s).unwrap(), s);
            assert_eq!(euler_inverse(&cfg, &s).unwrap(), s);
            assert_eq!(orbit(&cfg, &s, 7).unwrap(), vec![s.clone(); 8]);
        }
        assert!(is_fixed_point(&BodyState::from_ints(0, 0, 0)));
        assert!(!is_fixed_point(&BodyState::from_ints(1, 1, 0)));
    }

    #[test]
    fn reference_point_values() {
        let cfg = top123();
        let s = BodyState::from_ints(1, 1, 1);
        assert_eq!(denominator(&cfg, &s), q("7/6"));
        let x = euler_step(&cfg, &s).unwrap();
        assert_eq!(x.x[0], q("-1/14"));
        assert_eq!(x, euler_step_implicit(&cfg, &s).unwrap());
        assert_eq!(euler_inverse(&cfg, &x).unwrap(), s);
        let h = invariants(&cfg, &s).unwrap();
        assert_eq!((h.h1.clone(), h.h2.clone()), (q("72/13"), q("168/13")));
        for st in orbit(&cfg, &s, 3).unwrap() {
            assert_eq!(invariants(&cfg, &st).unwrap(), h);
        }
    }

    #[test]
    fn trivial_denominators() {
        let cfg = TopConfig::from_ints(2, 2, 2).unwrap();
        assert_eq!(denominator(&cfg, &BodyState::from_ints(3, 4, 5)), ExactScalar::one());
        assert_eq!(denominator(&top123(), &BodyState::from_ints(0, 0, 0)), ExactScalar::one());
        let h = invariants(&top123(), &BodyState::from_ints(0, 0, 0)).unwrap();
        assert!(h.h1.is_zero() && h.h2.is_zero());
    }

    #[test]
    fn orbit_of_length_zero() {
        let s = BodyState::from_ints(1, 1, 1);
        assert_eq!(orbit(&top123(), &s, 0).unwrap(), vec![s]);
    }

    #[test]
    fn singular_point_is_reported() {
        // I=(1,2,3): D = 1 − x₁x₂x₃/12 + x₁²/12 − x₂²/12 + x₃²/4.
        let cfg = top123();
        let s = BodyState::from_ints(-2, -4, 0);
        assert!(denominator(&cfg, &s).is_zero());
        assert_eq!(euler_step(&cfg, &s), Err(Error::SingularPoint { step: 0 }));
        assert_eq!(euler_step_implicit(&cfg, &s), Err(Error::SingularSystem));
        assert_eq!(orbit(&cfg, &s, 3), Err(Error::SingularPoint { step: 0 }));
    }

    #[test]
    fn big_scalar_step_matches_exact() {
        let cfg = top123();
        let p = Precision::DEFAULT;
        let s = BodyState::new(q("1/3"), q("-2/5"), q("7/4"));
        let exact = euler_step(&cfg, &s).unwrap();
        let sb = BodyState::new(
            BigScalar::from_exact(&s.x[0], p),
            BigScalar::from_exact(&s.x[1], p),
            BigScalar::from_exact(&s.x[2], p),
        );
        let big = euler_step(&cfg, &sb).unwrap();
        for i in 0..3 {
            let diff = (big.x[i].clone() - &BigScalar::from_exact(&exact.x[i], p)).abs_f64();
            assert!(diff < 1e-70);
        }
    }

    #[test]
    fn continuous_limit_is_first_order() {
        let i = [q("1"), q("2"), q("3")];
        let s = BodyState::new(q("1/2"), q("-1/3"), q("3/4"));
        let mut residuals = Vec::new();
        for d in ["1/100", "1/1000", "1/10000"] {
            let d = q(d);
            let cfg = TopConfig::new(i.clone(), d.clone()).unwrap();
            let x = euler_step(&cfg, &s).unwrap();
            let f = continuous_rhs(&cfg, &s).unwrap();
            let r: f64 = (0..3)
                .map(|k| {
                    let v = (&x.x[k] - &s.x[k]).checked_div(&d).unwrap() - &f[k];
                    v.to_f64().powi(2)
                })
                .sum::<f64>()
                .sqrt();
            residuals.push(r);
        }
        for w in residuals.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio - 10.0).abs() < 0.5, "ratio {ratio}");
        }
    }

    #[test]
    fn csv_columns() {
        let cfg = top123();
        let orb = orbit(&cfg, &BodyState::from_ints(1, 1, 1), 1).unwrap();
        let csv = orbit_csv(&cfg, &orb).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("step,x1,x2,x3,H1,H2,denominator"));
        assert_eq!(lines.next(), Some("0,1,1,1,72/13,168/13,7/6"));
        assert!(lines.next().unwrap().starts_with("1,-1/14,"));
    }

    #[test]
    fn config_serde_round_trip() {
        let cfg = TopConfig::new([q("1"), q("2/3"), q("3")], q("1/2")).unwrap();
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(json, r#"{"inertia":["1","2/3","3"],"delta":"1/2"}"#);
        let back: TopConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }

    fn small_rational() -> impl Strategy<Value = ExactScalar> {
        (-9i64..=9, 1i64..=6).prop_map(|(n, d)| ExactScalar::new(n, d).unwrap())
    }

    fn nonzero_rational() -> impl Strategy<Value = ExactScalar> {
        small_rational().prop_filter("nonzero", |v| !v.is_zero())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn conservation_and_inverse(i1 in nonzero_rational(), i2 in nonzero_rational(), i3 in nonzero_rational(),
                                    d in nonzero_rational(),
                                    x1 in small_rational(), x2 in small_rational(), x3 in small_rational()) {
            let cfg = TopConfig::new([i1, i2, i3], d).unwrap();
            let s = BodyState::new(x1, x2, x3);
            let Ok(h0) = invariants(&cfg, &s) else { return Ok(()) };
            let Ok(orb) = orbit(&cfg, &s, 6) else { return Ok(()) };
            for (k, st) in orb.iter().enumerate() {
                if let Ok(h) = invariants(&cfg, st) {
                    prop_assert_eq!(&h, &h0, "step {}", k);
                }
            }
            let x = &orb[1];
            prop_assert_eq!(&euler_step_implicit(&cfg, &s).unwrap(), x);
            prop_assert_eq!(&euler_inverse(&cfg, x).unwrap(), &s);
        }
    }
}
