//! The axially symmetric top (`I₂ = I₃`, δ = 1): every step rotates
//! `(x₂, x₃)` by an angle fixed by `x₁`, so orbits are periodic exactly when
//! that angle is a rational multiple of 2π.

use rug::float::Constant;
use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eulermap::{euler_step, BodyState, TopConfig};
use crate::scalars::{BigScalar, ExactScalar, Field, MaybeExact, Precision};

/// `I₁` and `I₂ = I₃`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxisymTop {
    i1: ExactScalar,
    i2: ExactScalar,
}

impl AxisymTop {
    pub fn new(i1: ExactScalar, i2: ExactScalar) -> Result<Self> {
        if i1.is_zero() || i2.is_zero() {
            return Err(Error::InvalidConfig("moments of inertia must be nonzero".into()));
        }
        if i1 == i2 {
            return Err(Error::InvalidConfig("I1 = I2 = I3 is the fully symmetric top".into()));
        }
        Ok(AxisymTop { i1, i2 })
    }

    pub fn from_ints(i1: i64, i2: i64) -> Result<Self> {
        Self::new(i1.into(), i2.into())
    }

    pub fn i1(&self) -> &ExactScalar {
        &self.i1
    }

    pub fn i2(&self) -> &ExactScalar {
        &self.i2
    }

    /// The general top `(I₁, I₂, I₂)` with δ = 1.
    pub fn config(&self) -> TopConfig {
        TopConfig::new([self.i1.clone(), self.i2.clone(), self.i2.clone()], ExactScalar::one())
            .expect("validated in new")
    }
}

/// `(cos Ω, sin Ω)` for the given `x₁`.
pub fn rotation_angle<T: Field>(top: &AxisymTop, x1: &T) -> Result<(T, T)> {
    let i2 = x1.constant_like(&top.i2);
    let k = x1.constant_like(&(&top.i2 - &top.i1));
    let four_i2_sq = x1.int_like(4) * &i2.square();
    let kx_sq = (k.clone() * x1).square();
    let den = four_i2_sq.clone() + &kx_sq;
    let cos = (four_i2_sq - &kx_sq).try_div(&den)?;
    let sin = (x1.int_like(4) * &i2 * &k * x1).try_div(&den)?;
    Ok((cos, sin))
}

/// One step as a rotation of `(x₂, x₃)`, with `x₁` fixed.
pub fn rotation_step<T: Field>(top: &AxisymTop, s: &BodyState<T>) -> Result<BodyState<T>> {
    let [x1, x2, x3] = &s.x;
    let (c, sn) = rotation_angle(top, x1)?;
    Ok(BodyState::new(x1.clone(), c.clone() * x2 + &(sn.clone() * x3), c * x3 - &(sn * x2)))
}

/// `(cos nΩ, sin nΩ)` by repeated multiplication of the unit complex number.
pub fn rotation_power<T: Field>(cos: &T, sin: &T, n: u32) -> (T, T) {
    let mut c = cos.one_like();
    let mut s = cos.zero_like();
    for _ in 0..n {
        let nc = c.clone() * cos - &(s.clone() * sin);
        let ns = s * cos + &(c * sin);
        c = nc;
        s = ns;
    }
    (c, s)
}

/// `μₙ = √((1 − cos 2π/n)/(1 + cos 2π/n))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuValue {
    pub n: u32,
    pub mu_squared: MaybeExact,
    pub mu: MaybeExact,
    /// cos(2π/n) is rational, so μₙ² is exact.
    pub exact_form_known: bool,
}

fn check_n(n: u32) -> Result<()> {
    match n {
        0 => Err(Error::InvalidConfig("period must be at least 1".into())),
        2 => Err(Error::DivergentMu),
        _ => Ok(()),
    }
}

/// Rational values of cos(2π/n).
fn rational_cos(n: u32) -> Option<ExactScalar> {
    match n {
        1 => Some(ExactScalar::one()),
        3 => Some(ExactScalar::new(-1, 2).expect("den")),
        4 => Some(ExactScalar::zero()),
        6 => Some(ExactScalar::new(1, 2).expect("den")),
        _ => None,
    }
}

pub fn mu(n: u32, prec: Precision) -> Result<MuValue> {
    check_n(n)?;
    if let Some(c) = rational_cos(n) {
        let one = ExactScalar::one();
        let sq = (&one - &c).checked_div(&(&one + &c))?;
        let root = match sq.sqrt_exact() {
            Some(r) => MaybeExact::Exact(r),
            None => MaybeExact::Approx(BigScalar::from_exact(&sq, prec).sqrt()),
        };
        return Ok(MuValue { n, mu_squared: MaybeExact::Exact(sq), mu: root, exact_form_known: true });
    }
    let bits = prec.bits();
    let angle = Float::with_val(bits, Constant::Pi) * 2u32 / n;
    let c = angle.cos();
    let sq = Float::with_val(bits, 1 - &c) / Float::with_val(bits, 1 + &c);
    let sq = BigScalar::from_float(sq, prec);
    let root = sq.sqrt();
    Ok(MuValue { n, mu_squared: MaybeExact::Approx(sq), mu: MaybeExact::Approx(root), exact_form_known: false })
}

/// `x₁ = ±μₙ·2I₂/(I₂ − I₁)`, the `+μ` branch first.
pub fn quantized_x1(n: u32, top: &AxisymTop, prec: Precision) -> Result<[MaybeExact; 2]> {
    let m = mu(n, prec)?;
    let k = (ExactScalar::from(2) * &top.i2).checked_div(&(&top.i2 - &top.i1))?;
    Ok(match m.mu {
        MaybeExact::Exact(v) => {
            let x = &v * &k;
            [MaybeExact::Exact(x.clone()), MaybeExact::Exact(-x)]
        }
        MaybeExact::Approx(v) => {
            let x = v * &BigScalar::from_exact(&k, prec);
            [MaybeExact::Approx(x.clone()), MaybeExact::Approx(-x)]
        }
    })
}

/// Result of iterating the general map from a quantized state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxisymCertificate {
    pub n: u32,
    pub inertia: [ExactScalar; 3],
    pub x1: MaybeExact,
    pub x2: ExactScalar,
    pub x3: ExactScalar,
    /// Exact rational iteration (X⁽ⁿ⁾ = x checked by equality).
    pub exact: bool,
    /// max |X⁽ⁿ⁾ − x|; zero for an exact certificate that holds.
    pub residual: f64,
    pub returned: bool,
    /// No k < n returned to the start.
    pub minimal: bool,
    pub precision: u32,
}

impl AxisymCertificate {
    pub fn holds(&self) -> bool {
        self.returned && self.minimal
    }
}

/// Residual below which a BigScalar orbit counts as returned, and above which
/// an intermediate state counts as distinct.
pub const RETURN_TOLERANCE: f64 = 1e-40;
const DISTINCT_THRESHOLD: f64 = 1e-10;

/// Lifts `x₁` to the `+μ` quantized value and iterates the general map n
/// times.
pub fn verify_axisym_period(
    n: u32,
    top: &AxisymTop,
    x2: &ExactScalar,
    x3: &ExactScalar,
    prec: Precision,
) -> Result<AxisymCertificate> {
    let [x1, _] = quantized_x1(n, top, prec)?;
    verify_axisym_period_with(n, top, &x1, x2, x3, prec)
}

/// [`verify_axisym_period`] from a caller-chosen `x₁`, normally one of the
/// [`quantized_x1`] values.
pub fn verify_axisym_period_with(
    n: u32,
    top: &AxisymTop,
    x1: &MaybeExact,
    x2: &ExactScalar,
    x3: &ExactScalar,
    prec: Precision,
) -> Result<AxisymCertificate> {
    check_n(n)?;
    let cfg = top.config();
    let moving = !(x2.is_zero() && x3.is_zero());
    let (exact, returned, minimal, residual) = match x1 {
        MaybeExact::Exact(v) => {
            let start = BodyState::new(v.clone(), x2.clone(), x3.clone());
            let mut s = start.clone();
            let mut minimal = true;
            for k in 1..=n {
                s = euler_step(&cfg, &s).map_err(|_| Error::SingularPoint { step: k as usize - 1 })?;
                if k < n && s == start && moving {
                    minimal = false;
                }
            }
            let returned = s == start;
            let residual = if returned { 0.0 } else { start.to_big(prec).distance(&s.to_big(prec)).to_f64() };
            (true, returned, minimal, residual)
        }
        MaybeExact::Approx(v) => {
            let start = BodyState::new(
                v.with_precision(prec),
                BigScalar::from_exact(x2, prec),
                BigScalar::from_exact(x3, prec),
            );
            let mut s = start.clone();
            let mut minimal = true;
            for k in 1..=n {
                s = euler_step(&cfg, &s).map_err(|_| Error::SingularPoint { step: k as usize - 1 })?;
                if k < n && moving && start.distance(&s).to_f64() < DISTINCT_THRESHOLD {
                    minimal = false;
                }
            }
            let residual = start.distance(&s).to_f64();
            (false, residual <= RETURN_TOLERANCE, minimal, residual)
        }
    };
    Ok(AxisymCertificate {
        n,
        inertia: cfg.inertia().clone(),
        x1: x1.clone(),
        x2: x2.clone(),
        x3: x3.clone(),
        exact,
        residual,
        returned,
        minimal,
        precision: prec.bits(),
    })
}

/// Right side of `I₂H₁ − H₂ = μₙ²/(1+μₙ²) · 4I₁I₂²/(I₂−I₁)` on the
/// quantized planes.
pub fn plane_invariant_relation(n: u32, top: &AxisymTop, prec: Precision) -> Result<MaybeExact> {
    let m = mu(n, prec)?;
    let k = (ExactScalar::from(4) * &top.i1 * &top.i2 * &top.i2).checked_div(&(&top.i2 - &top.i1))?;
    Ok(match m.mu_squared {
        MaybeExact::Exact(sq) => {
            let one = ExactScalar::one();
            MaybeExact::Exact(sq.checked_div(&(&one + &sq))? * &k)
        }
        MaybeExact::Approx(sq) => {
            let one = BigScalar::from_exact(&ExactScalar::one(), prec);
            let frac = sq.checked_div(&(one + &sq))?;
            MaybeExact::Approx(frac * &BigScalar::from_exact(&k, prec))
        }
    })
}
