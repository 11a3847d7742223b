//! Multi-start damped Newton search for real periodic points of the map,
//! with each converged root classified against the known loci.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eulermap::{euler_step, BodyState, TopConfig};
use crate::linalg;
use crate::scalars::{BigScalar, ExactScalar, Precision, Ring};
use crate::varieties::{singular_quartic, v3_condition, xi_from_state};

/// Box, grid and Newton settings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchRegion {
    pub bounds: [(f64, f64); 3],
    pub grid_resolution: usize,
    pub newton_max_iters: usize,
    /// Residual at which a polished root counts as converged.
    pub newton_tolerance: f64,
    /// Scale for the fixed-axis, singular-set and v⁽³⁾ tests.
    pub classify_tolerance: f64,
    pub precision: Precision,
}

impl SearchRegion {
    pub fn cube(lo: f64, hi: f64, grid_resolution: usize) -> Result<Self> {
        let r = SearchRegion {
            bounds: [(lo, hi); 3],
            grid_resolution,
            newton_max_iters: 80,
            newton_tolerance: 1e-30,
            classify_tolerance: 1e-25,
            precision: Precision::DEFAULT,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bounds.iter().any(|(lo, hi)| !lo.is_finite() || !hi.is_finite() || lo >= hi) {
            return Err(Error::InvalidConfig("search intervals must be nonempty and finite".into()));
        }
        if self.grid_resolution < 2 {
            return Err(Error::InvalidConfig("grid resolution must be at least 2".into()));
        }
        if self.newton_tolerance <= 0.0 || self.classify_tolerance <= 0.0 {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    FixedAxis,
    SingularSet,
    OnV3,
    Genuine,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateReport {
    pub state: BodyState<BigScalar>,
    pub period: u32,
    /// max |X⁽ⁿ⁾ − x| at the search precision.
    pub residual: f64,
    /// The same residual recomputed at doubled precision.
    pub verified_residual: f64,
    pub classification: Classification,
    /// |(1−ξ₁−ξ₂−ξ₃)² − 4ξ₁ξ₂ξ₃| at the state.
    pub distance_to_singular: f64,
    /// |v⁽³⁾(ξ)| at the state.
    pub v3_value: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SearchSummary {
    pub starts: usize,
    pub converged: usize,
    pub distinct: usize,
    /// Starts dropped because Newton stalled or left the chart.
    pub dropped: usize,
    /// Starts whose orbit hit the singular set during the search.
    pub near_singular: usize,
    /// Converged roots whose doubled-precision residual exceeded the tolerance.
    pub failed_reverification: usize,
    pub fixed_axis: usize,
    pub singular_set: usize,
    pub on_v3: usize,
    pub genuine: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReport {
    pub period: u32,
    pub seed: u64,
    pub summary: SearchSummary,
    pub candidates: Vec<CandidateReport>,
}

fn n_steps(cfg: &TopConfig, s: &BodyState<BigScalar>, n: u32) -> Result<BodyState<BigScalar>> {
    let mut cur = s.clone();
    for k in 0..n as usize {
        cur = euler_step(cfg, &cur).map_err(|_| Error::SingularPoint { step: k })?;
    }
    Ok(cur)
}

/// max over coordinates of |X⁽ⁿ⁾ᵢ − xᵢ|, computed at `prec`.
pub fn period_residual(cfg: &TopConfig, s: &BodyState<BigScalar>, n: u32, prec: Precision) -> Result<Float> {
    if n == 0 {
        return Err(Error::InvalidConfig("period must be at least 1".into()));
    }
    let s = BodyState { x: s.x.clone().map(|v| v.with_precision(prec)) };
    let end = n_steps(cfg, &s, n)?;
    Ok(end.distance(&s))
}

fn residual_vector(cfg: &TopConfig, s: &BodyState<BigScalar>, n: u32) -> Result<[BigScalar; 3]> {
    let end = n_steps(cfg, s, n)?;
    Ok([0, 1, 2].map(|k| end.x[k].clone() - &s.x[k]))
}

fn shifted(s: &BodyState<BigScalar>, k: usize, h: &BigScalar) -> BodyState<BigScalar> {
    let mut t = s.clone();
    t.x[k] = t.x[k].clone() + h;
    t
}

/// Jacobian of `F(x) = X⁽ⁿ⁾(x) − x` by central differences with step `h`.
pub fn jacobian_central(
    cfg: &TopConfig,
    s: &BodyState<BigScalar>,
    n: u32,
    h: &BigScalar,
) -> Result<[[BigScalar; 3]; 3]> {
    let prec = h.precision();
    let two_h = BigScalar::from_exact(&ExactScalar::from(2), prec) * h;
    let mut cols = Vec::with_capacity(3);
    for k in 0..3 {
        let fp = residual_vector(cfg, &shifted(s, k, h), n)?;
        let fm = residual_vector(cfg, &shifted(s, k, &-h.clone()), n)?;
        let mut col = Vec::with_capacity(3);
        for i in 0..3 {
            col.push((fp[i].clone() - &fm[i]).checked_div(&two_h)?);
        }
        cols.push(col);
    }
    Ok([0, 1, 2].map(|i| [0, 1, 2].map(|k| cols[k][i].clone())))
}

/// Forward-difference Jacobian, used to cross-check [`jacobian_central`].
pub fn jacobian_forward(
    cfg: &TopConfig,
    s: &BodyState<BigScalar>,
    n: u32,
    h: &BigScalar,
) -> Result<[[BigScalar; 3]; 3]> {
    let f0 = residual_vector(cfg, s, n)?;
    let mut cols = Vec::with_capacity(3);
    for k in 0..3 {
        let fp = residual_vector(cfg, &shifted(s, k, h), n)?;
        let mut col = Vec::with_capacity(3);
        for i in 0..3 {
            col.push((fp[i].clone() - &f0[i]).checked_div(h)?);
        }
        cols.push(col);
    }
    Ok([0, 1, 2].map(|i| [0, 1, 2].map(|k| cols[k][i].clone())))
}

fn norm2(v: &[BigScalar; 3]) -> BigScalar {
    let sq = v.iter().fold(v[0].zero_like(), |acc, x| acc + &x.square());
    sq.sqrt()
}

fn max_abs(v: &[BigScalar; 3]) -> f64 {
    v.iter().map(|x| x.abs_f64()).fold(0.0, f64::max)
}

fn with_prec(s: &BodyState<BigScalar>, prec: Precision) -> BodyState<BigScalar> {
    BodyState { x: s.x.clone().map(|v| v.with_precision(prec)) }
}

enum Outcome {
    Converged(BodyState<BigScalar>),
    Stalled,
    Singular,
}

/// Levenberg–Marquardt iteration `(JᵀJ + λI)·dx = −JᵀF` with `λ = μ‖F‖`
/// and adaptive μ. The roots of F come in positive-dimensional families, so
/// a plain Newton step would meet singular Jacobians.
fn damped_newton(cfg: &TopConfig, start: BodyState<BigScalar>, n: u32, target: f64, max_iters: usize) -> Outcome {
    let prec = start.x[0].precision();
    let bits = prec.bits() as i32;
    // central differences: error ~ h², rounding ~ ε/h
    let h_scale = BigScalar::from_float(Float::with_val(prec.bits(), Float::i_exp(1, -bits / 3)), prec);
    let mut s = start;
    let mut f = match residual_vector(cfg, &s, n) {
        Ok(f) => f,
        Err(_) => return Outcome::Singular,
    };
    let mut mu = BigScalar::from_f64(1.0, prec);
    for _ in 0..max_iters {
        if max_abs(&f) <= target {
            return Outcome::Converged(s);
        }
        if s.x.iter().any(|v| v.abs_f64() > 1e8) {
            return Outcome::Stalled;
        }
        let scale = s.x.iter().map(|v| v.abs_f64()).fold(1.0, f64::max);
        let h = h_scale.clone() * &BigScalar::from_f64(scale, prec);
        let j = match jacobian_central(cfg, &s, n, &h) {
            Ok(j) => j,
            Err(_) => return Outcome::Singular,
        };
        let fnorm = norm2(&f);
        let mut accepted = false;
        for _ in 0..8 {
            let lambda = mu.clone() * &fnorm;
            let mut a = vec![vec![BigScalar::zero(prec); 3]; 3];
            let mut g = vec![BigScalar::zero(prec); 3];
            for r in 0..3 {
                for c in 0..3 {
                    let mut acc = BigScalar::zero(prec);
                    for i in 0..3 {
                        acc = acc + &(j[i][r].clone() * &j[i][c]);
                    }
                    if r == c {
                        acc = acc + &lambda;
                    }
                    a[r][c] = acc;
                }
                let mut acc = BigScalar::zero(prec);
                for i in 0..3 {
                    acc = acc + &(j[i][r].clone() * &f[i]);
                }
                g[r] = -acc;
            }
            let Ok(dx) = linalg::solve(a, g) else {
                mu = mu * &BigScalar::from_f64(4.0, prec);
                continue;
            };
            let trial = BodyState::new(s.x[0].clone() + &dx[0], s.x[1].clone() + &dx[1], s.x[2].clone() + &dx[2]);
            match residual_vector(cfg, &trial, n) {
                Ok(ft) if norm2(&ft).abs() < fnorm.abs() => {
                    s = trial;
                    f = ft;
                    mu = mu * &BigScalar::from_f64(0.25, prec);
                    if mu.abs_f64() < 1e-12 {
                        mu = BigScalar::from_f64(1e-12, prec);
                    }
                    accepted = true;
                    break;
                }
                _ => mu = mu * &BigScalar::from_f64(4.0, prec),
            }
        }
        if !accepted {
            return if max_abs(&f) <= target { Outcome::Converged(s) } else { Outcome::Stalled };
        }
    }
    if max_abs(&f) <= target {
        Outcome::Converged(s)
    } else {
        Outcome::Stalled
    }
}

const COARSE_PRECISION: Precision = Precision::MIN;
const COARSE_TARGET: f64 = 1e-12;

fn classify(cfg: &TopConfig, s: &BodyState<BigScalar>, tol: f64) -> (Classification, f64, f64) {
    let xi = xi_from_state(cfg, s);
    let quartic = singular_quartic(&xi).abs_f64();
    let v3 = v3_condition(&xi).abs_f64();
    let small = s.x.iter().filter(|v| v.abs_f64() <= tol).count();
    let class = if small >= 2 {
        Classification::FixedAxis
    } else if quartic <= tol {
        Classification::SingularSet
    } else if v3 <= tol {
        Classification::OnV3
    } else {
        Classification::Genuine
    };
    (class, quartic, v3)
}

/// Grid starts (with a seeded sub-cell jitter) in row-major order.
pub fn grid_starts(region: &SearchRegion, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = region.grid_resolution;
    let step = region.bounds.map(|(lo, hi)| (hi - lo) / (m - 1) as f64);
    let mut out = Vec::with_capacity(m * m * m);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let idx = [i, j, k];
                let p = [0, 1, 2].map(|c| {
                    let jitter: f64 = rng.gen_range(-0.25..0.25);
                    region.bounds[c].0 + (idx[c] as f64 + jitter) * step[c]
                });
                out.push(p);
            }
        }
    }
    out
}

/// Runs Newton from every grid start: coarse at 64 bits, polished at the
/// region precision, re-verified at twice that precision, deduplicated and
/// classified. Deterministic for a given seed.
pub fn newton_periodic_search(cfg: &TopConfig, n: u32, region: &SearchRegion, seed: u64) -> Result<SearchReport> {
    region.validate()?;
    if n == 0 {
        return Err(Error::InvalidConfig("period must be at least 1".into()));
    }
    let prec = region.precision;
    let mut summary = SearchSummary::default();
    let mut roots: Vec<BodyState<BigScalar>> = Vec::new();
    for p in grid_starts(region, seed) {
        summary.starts += 1;
        let start = BodyState { x: p.map(|v| BigScalar::from_f64(v, COARSE_PRECISION)) };
        let coarse = match damped_newton(cfg, start, n, COARSE_TARGET, region.newton_max_iters) {
            Outcome::Converged(s) => s,
            Outcome::Stalled => {
                summary.dropped += 1;
                continue;
            }
            Outcome::Singular => {
                summary.dropped += 1;
                summary.near_singular += 1;
                continue;
            }
        };
        match damped_newton(cfg, with_prec(&coarse, prec), n, region.newton_tolerance, region.newton_max_iters) {
            Outcome::Converged(s) => {
                summary.converged += 1;
                roots.push(s);
            }
            Outcome::Stalled => summary.dropped += 1,
            Outcome::Singular => {
                summary.dropped += 1;
                summary.near_singular += 1;
            }
        }
    }
    roots.sort_by(|a, b| {
        a.x.iter()
            .zip(&b.x)
            .map(|(u, v)| u.re().partial_cmp(v.re()).unwrap_or(std::cmp::Ordering::Equal))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let cluster = region.newton_tolerance.sqrt();
    let mut distinct: Vec<BodyState<BigScalar>> = Vec::new();
    for r in roots {
        if distinct.iter().rev().take(64).any(|d| d.distance(&r).to_f64() <= cluster) {
            continue;
        }
        distinct.push(r);
    }
    let mut candidates = Vec::with_capacity(distinct.len());
    for s in distinct {
        let residual = period_residual(cfg, &s, n, prec)?.to_f64();
        let verified_residual = period_residual(cfg, &s, n, prec.doubled())?.to_f64();
        if verified_residual > region.newton_tolerance {
            summary.failed_reverification += 1;
        }
        let (classification, distance_to_singular, v3_value) = classify(cfg, &s, region.classify_tolerance);
        match classification {
            Classification::FixedAxis => summary.fixed_axis += 1,
            Classification::SingularSet => summary.singular_set += 1,
            Classification::OnV3 => summary.on_v3 += 1,
            Classification::Genuine => summary.genuine += 1,
        }
        candidates.push(CandidateReport {
            state: s,
            period: n,
            residual,
            verified_residual,
            classification,
            distance_to_singular,
            v3_value,
        });
    }
    summary.distinct = candidates.len();
    Ok(SearchReport { period: n, seed, summary, candidates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::varieties::sample_real_v3_states;

    const P: Precision = Precision::DEFAULT;

    fn big(x: [f64; 3]) -> BodyState<BigScalar> {
        BodyState { x: x.map(|v| BigScalar::from_f64(v, P)) }
    }

    #[test]
    fn residual_examples() {
        let cfg = TopConfig::from_ints(1, 2, 3).unwrap();
        for n in 1..=4 {
            assert!(period_residual(&cfg, &big([0.0, 3.0, 0.0]), n, P).unwrap().is_zero());
        }
        assert!(period_residual(&cfg, &big([1.0, 1.0, 1.0]), 2, P).unwrap() > 0.01);
        for (_, s) in sample_real_v3_states(&cfg, 3, 1, P).unwrap() {
            assert!(period_residual(&cfg, &s, 3, P).unwrap() <= 1e-40);
        }
    }

    #[test]
    fn central_differences_are_second_order() {
        let cfg = TopConfig::from_ints(1, 2, 3).unwrap();
        let s = big([0.3, -0.7, 1.1]);
        let h = BigScalar::from_f64(1e-4, P);
        let jc = jacobian_central(&cfg, &s, 2, &h).unwrap();
        let jf = jacobian_forward(&cfg, &s, 2, &h).unwrap();
        let diff = |a: &[[BigScalar; 3]; 3], b: &[[BigScalar; 3]; 3]| {
            let mut m: f64 = 0.0;
            for i in 0..3 {
                for k in 0..3 {
                    m = m.max((a[i][k].clone() - &b[i][k]).abs_f64());
                }
            }
            m
        };
        assert!(diff(&jc, &jf) < 1e-2);
        let fine = BigScalar::from_f64(1e-12, P);
        let exact = jacobian_central(&cfg, &s, 2, &fine).unwrap();
        let e1 = diff(&jacobian_central(&cfg, &s, 2, &h).unwrap(), &exact);
        let h2 = BigScalar::from_f64(5e-5, P);
        let e2 = diff(&jacobian_central(&cfg, &s, 2, &h2).unwrap(), &exact);
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn small_search_is_deterministic_and_finds_no_genuine_period_two() {
        let cfg = TopConfig::from_ints(1, 2, 3).unwrap();
        let region = SearchRegion::cube(-3.0, 3.0, 3).unwrap();
        let a = newton_periodic_search(&cfg, 2, &region, 7).unwrap();
        let b = newton_periodic_search(&cfg, 2, &region, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.summary.genuine, 0);
        assert_eq!(a.summary.starts, 27);
        assert!(a.candidates.iter().all(|c| c.verified_residual <= region.newton_tolerance));
    }

    #[test]
    fn period_three_roots_lie_on_v3() {
        let cfg = TopConfig::from_ints(1, 2, 3).unwrap();
        let region = SearchRegion::cube(-2.0, 2.0, 3).unwrap();
        let r = newton_periodic_search(&cfg, 3, &region, 1).unwrap();
        assert_eq!(r.summary.genuine, 0, "{:?}", r.summary);
        assert!(r.summary.on_v3 > 0, "{:?}", r.summary);
    }

    #[test]
    fn sign_flip_plane_orbits_have_period_four() {
        // 1 + ξ₁ − ξ₂ − ξ₃ = 0 gives X⁽²⁾ = (x₁, −x₂, −x₃).
        let cfg = TopConfig::from_ints(1, 3, 4).unwrap();
        let s = BodyState::from_ints(1, 3, 1);
        let orbit = crate::eulermap::orbit(&cfg, &s, 4).unwrap();
        assert_eq!(orbit[2], BodyState::from_ints(1, -3, -1));
        assert_eq!(orbit[4], s);
        assert!(orbit[1] != s);
        let (class, quartic, _) = classify(&cfg, &s.to_big(P), 1e-25);
        assert_eq!(class, Classification::Genuine);
        assert!(quartic > 1e-3);
    }

    #[test]
    fn bad_regions_rejected() {
        assert!(SearchRegion::cube(1.0, 1.0, 5).is_err());
        assert!(SearchRegion::cube(-1.0, 1.0, 1).is_err());
    }
}
