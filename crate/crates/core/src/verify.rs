//! The acceptance criteria as runnable checks. Each criterion is a list of
//! named sub-checks; a criterion passes when all of its sub-checks do.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;
use serde::Serialize;

use crate::axisym::{mu, plane_invariant_relation, quantized_x1, verify_axisym_period_with, AxisymTop};
use crate::biquadratic::{
    check_full_correlation, gamma_poly, param_vars, q_second, q_sequence, s_eval, symbolic_params, top_params, Axis,
    BiquadParams, Coef, CorrelationVerdict,
};
use crate::error::{Error, Result};
use crate::eulermap::{
    denominator_with, euler_inverse, euler_step, euler_step_implicit, invariants, is_fixed_point, orbit, BodyState,
    TopConfig,
};
use crate::perisearch::{newton_periodic_search, period_residual, SearchRegion};
use crate::polynomials::{resultant_in, SparsePoly};
use crate::scalars::{ExactScalar, MaybeExact, Precision, Ring};
use crate::varieties::{
    gamma_xi_factors, period2_common_zero, rational_p3_invariants, sample_real_v3_states, singular_quartic,
    substitution_consistency, XiPoint,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl SubCheck {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        SubCheck { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub seed: u64,
    pub checks: Vec<SubCheck>,
}

impl CriterionReport {
    fn build(id: u8, seed: u64, checks: Vec<SubCheck>) -> Self {
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
        CriterionReport { id, title: title(id).to_string(), passed, seed, checks }
    }

    pub fn failures(&self) -> impl Iterator<Item = &SubCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Settings shared by all criteria.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOptions {
    pub seed: u64,
    pub precision: Precision,
    /// Asymmetric top used by the period-3, variety and search criteria.
    pub inertia: [ExactScalar; 3],
    pub search_grid: usize,
    pub search_box: (f64, f64),
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 0,
            precision: Precision::DEFAULT,
            inertia: [1, 2, 3].map(ExactScalar::from),
            search_grid: 21,
            search_box: (-5.0, 5.0),
        }
    }
}

pub const CRITERIA: [u8; 12] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12];

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "invariant conservation",
        2 => "explicit map equals implicit solve; inverse",
        3 => "one-step biquadratic relations",
        4 => "two-step parameters: orbits and resultant",
        5 => "gamma3 factorization of level-2 wedges",
        6 => "gamma4 and gamma5 divide level-3 and level-4 wedges",
        7 => "period-3 collapse on the conic",
        8 => "orbits on v3 return after three steps",
        9 => "A-form and xi-form consistency",
        10 => "period-2 and period-4 exclusion",
        11 => "axially symmetric quantization",
        12 => "singular quartic factorization",
        _ => "unknown criterion",
    }
}

fn seed_for(opts: &SuiteOptions, id: u8) -> u64 {
    opts.seed.wrapping_mul(1_000_003).wrapping_add(id as u64)
}

/// Runs one criterion. Errors inside a check become failing sub-checks.
pub fn run_criterion(id: u8, opts: &SuiteOptions) -> Result<CriterionReport> {
    let seed = seed_for(opts, id);
    let checks = match id {
        1 => conservation(seed),
        2 => oracle_equivalence(seed),
        3 => biquadratic_reduction(seed),
        4 => second_level(seed),
        5 => gamma3_factorization(),
        6 => higher_gammas(),
        7 => period3_collapse(opts),
        8 => v3_orbits(opts, seed),
        9 => form_consistency(seed),
        10 => exclusion(opts, seed),
        11 => axisym_quantization(opts, seed),
        12 => singular_factorization(),
        _ => return Err(Error::InvalidConfig(format!("no criterion {id}"))),
    };
    Ok(CriterionReport::build(id, seed, checks))
}

pub fn run_all(opts: &SuiteOptions) -> Vec<CriterionReport> {
    CRITERIA.iter().map(|&id| run_criterion(id, opts).expect("known id")).collect()
}

fn from_result(name: &str, r: Result<Vec<SubCheck>>) -> Vec<SubCheck> {
    r.unwrap_or_else(|e| vec![SubCheck::new(name, false, format!("error: {e}"))])
}

fn small_rational(rng: &mut ChaCha8Rng, num: i64, den: i64) -> ExactScalar {
    ExactScalar::new(rng.gen_range(-num..=num), rng.gen_range(1..=den)).expect("den ≥ 1")
}

fn random_config(rng: &mut ChaCha8Rng, asymmetric: bool) -> TopConfig {
    loop {
        let mut pos = || ExactScalar::new(rng.gen_range(1..=12), rng.gen_range(1..=5)).expect("den ≥ 1");
        let inertia = [pos(), pos(), pos()];
        let delta = loop {
            let d = small_rational(rng, 3, 4);
            if !d.is_zero() {
                break d;
            }
        };
        let Ok(cfg) = TopConfig::new(inertia, delta) else { continue };
        if asymmetric && (cfg.is_axially_symmetric() || cfg.is_fully_symmetric()) {
            continue;
        }
        return cfg;
    }
}

fn random_state(rng: &mut ChaCha8Rng) -> BodyState<ExactScalar> {
    BodyState::new(small_rational(rng, 9, 5), small_rational(rng, 9, 5), small_rational(rng, 9, 5))
}

fn conservation(seed: u64) -> Vec<SubCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut done, mut skipped, mut bad) = (0, 0, None);
    while done < 100 {
        let cfg = random_config(&mut rng, false);
        let s = random_state(&mut rng);
        let (Ok(h0), Ok(orb)) = (invariants(&cfg, &s), orbit(&cfg, &s, 20)) else {
            skipped += 1;
            continue;
        };
        for (k, st) in orb.iter().enumerate() {
            match invariants(&cfg, st) {
                Ok(h) if h == h0 => {}
                _ => {
                    bad.get_or_insert(format!("{:?} step {k}", cfg.inertia()));
                }
            }
        }
        done += 1;
    }
    vec![SubCheck::new(
        "H1,H2 identical along 100 orbits of 20 steps",
        bad.is_none(),
        match bad {
            None => format!("100 orbits, {skipped} singular draws skipped"),
            Some(b) => format!("mismatch at {b}"),
        },
    )]
}

fn oracle_equivalence(seed: u64) -> Vec<SubCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut done, mut eq_fail, mut inv_fail) = (0, 0, 0);
    while done < 100 {
        let cfg = random_config(&mut rng, false);
        let s = random_state(&mut rng);
        let Ok(x) = euler_step(&cfg, &s) else { continue };
        match euler_step_implicit(&cfg, &s) {
            Ok(y) if y == x => {}
            _ => eq_fail += 1,
        }
        match euler_inverse(&cfg, &x) {
            Ok(back) if back == s => {}
            _ => inv_fail += 1,
        }
        done += 1;
    }
    vec![
        SubCheck::new("explicit = implicit on 100 states", eq_fail == 0, format!("{eq_fail} mismatches")),
        SubCheck::new("inverse after forward is the identity", inv_fail == 0, format!("{inv_fail} mismatches")),
    ]
}

fn biquadratic_reduction(seed: u64) -> Vec<SubCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut done, mut fails, mut pairs) = (0, 0, 0);
    while done < 50 {
        let cfg = random_config(&mut rng, true);
        let s = random_state(&mut rng);
        let (Ok(h), Ok(orb)) = (invariants(&cfg, &s), orbit(&cfg, &s, 4)) else { continue };
        for axis in Axis::ALL {
            let Ok(q) = top_params(&cfg, &h, axis) else {
                fails += 1;
                continue;
            };
            let j = axis.index();
            for w in orb.windows(2) {
                pairs += 1;
                if !s_eval(&q, &w[1].x[j], &w[0].x[j]).is_zero() {
                    fails += 1;
                }
            }
        }
        done += 1;
    }
    vec![SubCheck::new(
        "S(X_j, x_j; q_j) = 0 on 50 orbits, all axes",
        fails == 0,
        format!("{pairs} consecutive pairs, {fails} failures"),
    )]
}

fn second_level(seed: u64) -> Vec<SubCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut done, mut fails) = (0, 0);
    while done < 50 {
        let cfg = random_config(&mut rng, true);
        let s = random_state(&mut rng);
        let (Ok(h), Ok(orb)) = (invariants(&cfg, &s), orbit(&cfg, &s, 2)) else { continue };
        for axis in Axis::ALL {
            let j = axis.index();
            match top_params(&cfg, &h, axis) {
                Ok(q) if s_eval(&q_second(&q), &orb[2].x[j], &s.x[j]).is_zero() => {}
                _ => fails += 1,
            }
        }
        done += 1;
    }
    let mut out =
        vec![SubCheck::new("S(X_j^(2), x_j; q^(2)) = 0 on 50 orbits", fails == 0, format!("{fails} failures"))];
    out.extend(from_result("resultant composition", resultant_check()));
    out
}

fn resultant_check() -> Result<Vec<SubCheck>> {
    let v = SparsePoly::variables(&["a", "b", "c", "d", "e", "f", "X", "Y", "x"])?;
    let q = symbolic_params(&v)?;
    let var = |n: &str| SparsePoly::var(&v, n);
    let (big_x, y, x) = (var("X")?, var("Y")?, var("x")?);
    let res = resultant_in("Y", &s_eval(&q, &big_x, &y), &s_eval(&q, &y, &x))?;
    let diff = big_x.clone() - &x;
    let divisor = diff.square() * &s_eval(&q_second(&q), &big_x, &x);
    let (ok, detail) = match res.divide_exact(&divisor) {
        Ok(cof) => (true, format!("cofactor {cof}")),
        Err(e) => (false, format!("{e}")),
    };
    Ok(vec![SubCheck::new("Res_Y divisible by (X-x)^2 S(X,x;q^(2))", ok, detail)])
}

/// The cofactors displayed next to the level-2 wedges.
const DISPLAYED_COFACTORS: [(Coef, Coef, &str); 4] = [
    (Coef::A, Coef::B, "2*a^2*e - a*b*d + b^3"),
    (Coef::A, Coef::C, "a^2*f + a*c^2 - a*c*d + b^2*c"),
    (Coef::B, Coef::C, "2*a*c*e - a*b*f - b*c^2"),
    (Coef::E, Coef::F, "e*d*f - e^3 - 2*b*f^2"),
];

fn gamma3_factorization() -> Vec<SubCheck> {
    from_result(
        "gamma3",
        (|| {
            let v = param_vars().clone();
            let q = symbolic_params(&v)?;
            let g3 = gamma_poly(3)?;
            let rep = check_full_correlation(&q, &q_second(&q), &g3)?;
            let mut out = vec![SubCheck::new(
                "all 15 level-2 wedges divisible by af - be - 3c^2 + cd",
                rep.failing_wedges.is_empty(),
                format!("{} divisible, failing {:?}", rep.wedge_quotients.len(), rep.failing_wedges),
            )];
            for (g, h, text) in DISPLAYED_COFACTORS {
                let expect = SparsePoly::parse(text, &v)?;
                let got = rep.quotient(g, h);
                let ok = got == Some(&expect);
                out.push(SubCheck::new(
                    format!("({g}^{h})_2 cofactor is {text}"),
                    ok,
                    match got {
                        Some(p) => format!("computed {p}"),
                        None => "not divisible".into(),
                    },
                ));
            }
            Ok(out)
        })(),
    )
}

fn higher_gammas() -> Vec<SubCheck> {
    from_result(
        "gamma4/gamma5",
        (|| {
            let v = param_vars().clone();
            let q = symbolic_params(&v)?;
            let seq = q_sequence(&q, 4)?;
            let mut out = vec![SubCheck::new(
                "q^(3), q^(4) by exact symbolic recursion",
                true,
                format!(
                    "term counts {:?} and {:?}",
                    seq[2].0.iter().map(SparsePoly::len).collect::<Vec<_>>(),
                    seq[3].0.iter().map(SparsePoly::len).collect::<Vec<_>>()
                ),
            )];
            for (n, level) in [(4u32, 2usize), (5, 3)] {
                let g = gamma_poly(n)?;
                let rep = check_full_correlation(&q, &seq[level], &g)?;
                out.push(SubCheck::new(
                    format!("all level-{} wedges divisible by gamma{n}", level + 1),
                    rep.verdict == CorrelationVerdict::FullyCorrelated && rep.decomposition_holds,
                    format!("failing {:?}", rep.failing_wedges),
                ));
            }
            Ok(out)
        })(),
    )
}

fn period3_collapse(opts: &SuiteOptions) -> Vec<SubCheck> {
    from_result(
        "period-3 collapse",
        (|| {
            let cfg = TopConfig::new(opts.inertia.clone(), ExactScalar::one())?;
            let h = rational_p3_invariants(&cfg, 10_000)?;
            let mut out = vec![SubCheck::new("rational point on the conic", true, format!("H1={} H2={}", h.h1, h.h2))];
            for axis in Axis::ALL {
                let q = top_params(&cfg, &h, axis)?;
                let q3 = q_sequence(&q, 3)?.pop().expect("three levels");
                let c = q3[Coef::C].clone();
                let n = axis.number();
                let vanish = [Coef::A, Coef::B, Coef::E, Coef::F].iter().all(|&k| q3[k].is_zero());
                out.push(SubCheck::new(format!("axis {n}: a=b=e=f=0"), vanish, format!("q3 = {}", show(&q3))));
                out.push(SubCheck::new(format!("axis {n}: c != 0"), !c.is_zero(), format!("c = {c}")));
                let minus_2c = -(ExactScalar::from(2) * &c);
                out.push(SubCheck::new(
                    format!("axis {n}: d = -2c"),
                    q3[Coef::D] == minus_2c,
                    format!("d = {}, -2c = {}", q3[Coef::D], minus_2c),
                ));
                let proportional = vanish && q3[Coef::D].is_zero() && !c.is_zero();
                out.push(SubCheck::new(
                    format!("axis {n}: S(Q,x;q^(3)) proportional to (Q-x)^2"),
                    proportional,
                    format!("q3 = {}", show(&q3)),
                ));
            }
            Ok(out)
        })(),
    )
}

fn show(q: &BiquadParams<ExactScalar>) -> String {
    let parts: Vec<String> = q.0.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn v3_orbits(opts: &SuiteOptions, seed: u64) -> Vec<SubCheck> {
    from_result(
        "v3 orbits",
        (|| {
            let cfg = TopConfig::new(opts.inertia.clone(), ExactScalar::one())?;
            let prec = opts.precision;
            let samples = sample_real_v3_states(&cfg, 10, seed, prec)?;
            let (mut worst3, mut least1) = (0f64, f64::INFINITY);
            let mut fixed = 0;
            for (_, s) in &samples {
                if is_fixed_point(s) {
                    fixed += 1;
                }
                worst3 = worst3.max(period_residual(&cfg, s, 3, prec)?.to_f64());
                least1 = least1.min(period_residual(&cfg, s, 1, prec)?.to_f64());
            }
            Ok(vec![
                SubCheck::new("10 non-fixed samples", samples.len() == 10 && fixed == 0, format!("{fixed} fixed")),
                SubCheck::new(
                    "3-step residual <= 1e-40",
                    worst3 <= 1e-40,
                    format!("max {worst3:e} at {} bits", prec.bits()),
                ),
                SubCheck::new("1-step residual >= 1e-3", least1 >= 1e-3, format!("min {least1:e}")),
            ])
        })(),
    )
}

fn form_consistency(seed: u64) -> Vec<SubCheck> {
    let mut out = Vec::new();
    for n in 2..=4 {
        for axis in Axis::ALL {
            let name = format!("n={n} axis {}", axis.number());
            out.extend(from_result(
                &name,
                substitution_consistency(n, axis, 20, seed).map(|v| {
                    vec![SubCheck::new(
                        name.clone(),
                        v.passed,
                        match &v.ratio {
                            Some(r) => format!("constant ratio {r} after weight {}", v.weight),
                            None => "no ratio".into(),
                        },
                    )]
                }),
            ));
        }
    }
    out
}

fn exclusion(opts: &SuiteOptions, seed: u64) -> Vec<SubCheck> {
    let mut out = from_result(
        "period-2 linear forms",
        (|| {
            let p = period2_common_zero()?;
            let one = ExactScalar::one();
            let ok = p.xi.iter().all(|v| *v == one);
            Ok(vec![
                SubCheck::new(
                    "unique common zero is (1,1,1)",
                    ok,
                    format!("{:?}", p.xi.iter().map(|v| v.to_string()).collect::<Vec<_>>()),
                ),
                SubCheck::new("singular quartic vanishes there", singular_quartic(&p).is_zero(), String::new()),
            ])
        })(),
    );
    out.extend(from_result("lines", line_checks()));
    out.extend(from_result(
        "newton search",
        (|| {
            let cfg = TopConfig::new(opts.inertia.clone(), ExactScalar::one())?;
            let mut region = SearchRegion::cube(opts.search_box.0, opts.search_box.1, opts.search_grid)?;
            region.precision = opts.precision;
            let mut v = Vec::new();
            for n in [2, 4] {
                let r = newton_periodic_search(&cfg, n, &region, seed)?;
                let s = &r.summary;
                v.push(SubCheck::new(
                    format!("no genuine period-{n} points"),
                    s.genuine == 0,
                    format!(
                        "{} starts, {} converged, fixed_axis {}, singular_set {}, on_v3 {}, genuine {}",
                        s.starts, s.converged, s.fixed_axis, s.singular_set, s.on_v3, s.genuine
                    ),
                ));
            }
            Ok(v)
        })(),
    ));
    out
}

/// The three lines as polynomials in `t`.
fn line_checks() -> Result<Vec<SubCheck>> {
    let v = SparsePoly::variables(&["t"])?;
    let t = SparsePoly::var(&v, "t")?;
    let one = SparsePoly::constant(&v, &ExactScalar::one());
    let lines = [
        XiPoint::new(one.clone(), t.clone(), t.clone()),
        XiPoint::new(t.clone(), one.clone(), t.clone()),
        XiPoint::new(t.clone(), t.clone(), one.clone()),
    ];
    let (mut second3, mut factors4, mut quartic) = (Vec::new(), Vec::new(), Vec::new());
    for (li, line) in lines.iter().enumerate() {
        for axis in Axis::ALL {
            let f3 = gamma_xi_factors(3, axis, line)?;
            if !f3[1].is_zero() {
                second3.push((li + 1, axis.number()));
            }
            for (fi, f) in gamma_xi_factors(4, axis, line)?.iter().enumerate() {
                if !f.is_zero() {
                    factors4.push((li + 1, axis.number(), fi + 1));
                }
            }
        }
        if !singular_quartic(line).is_zero() {
            quartic.push(li + 1);
        }
    }
    Ok(vec![
        SubCheck::new(
            "period-3 second factors vanish on the lines",
            second3.is_empty(),
            format!("nonzero (line, axis): {second3:?}"),
        ),
        SubCheck::new(
            "period-4 factors vanish on the lines",
            factors4.is_empty(),
            format!("nonzero (line, axis, factor): {factors4:?}"),
        ),
        SubCheck::new(
            "singular quartic vanishes on the lines",
            quartic.is_empty(),
            format!("nonzero lines: {quartic:?}"),
        ),
    ])
}

fn axisym_quantization(opts: &SuiteOptions, seed: u64) -> Vec<SubCheck> {
    let prec = opts.precision;
    let mut out = from_result("mu table", mu_table(prec));
    out.extend(from_result(
        "period certificates",
        (|| {
            let top = AxisymTop::from_ints(2, 1)?;
            let two = ExactScalar::from(2);
            let quantized = quantized_x1(4, &top, prec)?;
            let mut v = vec![SubCheck::new(
                "x1 = 2 is a quantized n=4 value for I=(2,1,1)",
                quantized.iter().any(|q| q.as_exact() == Some(&two)),
                format!("{}, {}", quantized[0], quantized[1]),
            )];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut fails = Vec::new();
            for _ in 0..5 {
                let (x2, x3) = loop {
                    let pair = (small_rational(&mut rng, 50, 9), small_rational(&mut rng, 50, 9));
                    if !(pair.0.is_zero() && pair.1.is_zero()) {
                        break pair;
                    }
                };
                let c = verify_axisym_period_with(4, &top, &MaybeExact::Exact(two.clone()), &x2, &x3, prec)?;
                if !(c.exact && c.holds()) {
                    fails.push(format!("({x2}, {x3})"));
                }
            }
            v.push(SubCheck::new(
                "exact period-4 certificates, 5 random (x2, x3)",
                fails.is_empty(),
                format!("failing {fails:?}"),
            ));
            for n in [3, 5, 6] {
                let c = crate::axisym::verify_axisym_period(
                    n,
                    &top,
                    &ExactScalar::new(3, 7)?,
                    &ExactScalar::from(-2),
                    prec,
                )?;
                v.push(SubCheck::new(
                    format!("period-{n} certificate, residual <= 1e-40"),
                    c.holds() && c.residual <= 1e-40,
                    format!("residual {:e}, minimal {}", c.residual, c.minimal),
                ));
            }
            let rel = plane_invariant_relation(4, &top, prec)?;
            let rel = rel.as_exact().cloned().ok_or(Error::InvalidConfig("n=4 relation is rational".into()))?;
            let cfg = top.config();
            let mut bad = 0;
            for k in 0..20 {
                let x1 = if k % 2 == 0 { two.clone() } else { -two.clone() };
                let s = BodyState::new(x1, small_rational(&mut rng, 50, 9), small_rational(&mut rng, 50, 9));
                let h = invariants(&cfg, &s)?;
                if &h.h1 * top.i2() - &h.h2 != rel {
                    bad += 1;
                }
            }
            v.push(SubCheck::new(
                "I2 H1 - H2 = relation on the n=4 plane",
                bad == 0,
                format!("relation {rel}, {bad} of 20 failing"),
            ));
            Ok(v)
        })(),
    ));
    out
}

fn mu_table(prec: Precision) -> Result<Vec<SubCheck>> {
    let bits = prec.bits();
    let tol = 1e-70;
    let diff = |got: &MaybeExact, expect: Float| -> f64 {
        let g = got.to_big(prec);
        Float::with_val(bits, g.re() - &expect).abs().to_f64()
    };
    let f = |v: i32| Float::with_val(bits, v);
    let sqrt = |v: i32| Float::with_val(bits, v).sqrt();
    let mut out = Vec::new();
    let m1 = mu(1, prec)?;
    out.push(SubCheck::new("mu_1 = 0", m1.mu.as_exact().is_some_and(|v| v.is_zero()), format!("{}", m1.mu)));
    let m3 = mu(3, prec)?;
    out.push(SubCheck::new(
        "mu_3^2 = 3",
        m3.mu_squared.as_exact() == Some(&ExactScalar::from(3)),
        format!("{}", m3.mu_squared),
    ));
    let m4 = mu(4, prec)?;
    out.push(SubCheck::new("mu_4 = 1", m4.mu.as_exact() == Some(&ExactScalar::one()), format!("{}", m4.mu)));
    let m5 = mu(5, prec)?;
    let d5 = diff(&m5.mu_squared, f(5) - Float::with_val(bits, 2 * sqrt(5)));
    out.push(SubCheck::new("mu_5^2 = 5 - 2 sqrt 5", d5 <= tol, format!("|difference| {d5:e}")));
    let m6 = mu(6, prec)?;
    let d6 = diff(&m6.mu, f(2) - sqrt(3));
    out.push(SubCheck::new("mu_6 = 2 - sqrt 3", d6 <= tol, format!("computed mu_6 = {}, |difference| {d6:e}", m6.mu)));
    Ok(out)
}

fn singular_factorization() -> Vec<SubCheck> {
    from_result(
        "singular quartic",
        (|| {
            let v = SparsePoly::variables(&["al1", "al2", "al3", "x1", "x2", "x3"])?;
            let g = SparsePoly::generators(&v);
            let alpha = [g[0].clone(), g[1].clone(), g[2].clone()];
            let x = [g[3].clone(), g[4].clone(), g[5].clone()];
            let xi = XiPoint::new(
                alpha[1].clone() * &alpha[2] * &x[0].square(),
                alpha[2].clone() * &alpha[0] * &x[1].square(),
                alpha[0].clone() * &alpha[1] * &x[2].square(),
            );
            let lhs = singular_quartic(&xi);
            let rhs = denominator_with(&alpha, &x, 1) * &denominator_with(&alpha, &x, -1);
            let diff = lhs.clone() - &rhs;
            Ok(vec![SubCheck::new(
                "(1-xi1-xi2-xi3)^2 - 4 xi1 xi2 xi3 = D+ D-",
                diff.is_zero(),
                format!("{} terms on each side", lhs.len()),
            )])
        })(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_criterion() {
        assert!(run_criterion(13, &SuiteOptions::default()).is_err());
    }

    #[test]
    fn fast_criteria_pass() {
        let opts = SuiteOptions::default();
        for id in [6, 9, 12] {
            let r = run_criterion(id, &opts).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn line_factors() {
        let checks = line_checks().unwrap();
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
    }
}
