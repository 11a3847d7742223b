use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use eulertop::axisym::{self, AxisymTop};
use eulertop::biquadratic::{
    a_coeffs, check_full_correlation, gamma_poly, param_vars, q_sequence, symbolic_params, top_params,
    CorrelationVerdict,
};
use eulertop::eulermap::{self, invariants, is_fixed_point, orbit, orbit_csv};
use eulertop::perisearch::{newton_periodic_search, period_residual, SearchRegion};
use eulertop::varieties::{singular_quartic, state_from_xi, v3_condition, v3_sample, xi_from_state, XiPoint};
use eulertop::verify::{self, SuiteOptions};
use eulertop::{
    Axis, BigScalar, BiquadParams, BodyState, ExactScalar, InvariantPair, MaybeExact, Precision, TopConfig,
};

use crate::args::{AxisymCommand, RunArgs, Six, Triple, VarietyCommand, VerifyTarget};
use crate::report::{csv_escape, Output, UsageError, Verdict};

fn default_inertia() -> Vec<ExactScalar> {
    [1, 2, 3].map(ExactScalar::from).to_vec()
}

pub fn top_config(run: &RunArgs) -> Result<TopConfig> {
    let inertia = run.inertia.clone().map(|i| i.0).unwrap_or_else(default_inertia);
    let Ok(inertia) = <[ExactScalar; 3]>::try_from(inertia) else {
        bail!(UsageError("--inertia takes three values I1,I2,I3".into()));
    };
    Ok(TopConfig::new(inertia, run.delta.clone())?)
}

fn precision(run: &RunArgs) -> Result<Precision> {
    Precision::new(run.precision).map_err(|e| UsageError(e.to_string()).into())
}

fn state(t: &Triple) -> BodyState<ExactScalar> {
    let [a, b, c] = t.clone();
    BodyState::new(a, b, c)
}

fn axes(axis: Option<u8>) -> Result<Vec<Axis>> {
    match axis {
        Some(n) => Ok(vec![Axis::new(n).map_err(|e| UsageError(e.to_string()))?]),
        None => Ok((1..=3).map(|n| Axis::new(n).expect("1..=3")).collect()),
    }
}

pub fn iterate(run: &RunArgs, s: &Triple, steps: usize) -> Result<Output> {
    let cfg = top_config(run)?;
    let states = orbit(&cfg, &state(s), steps)?;
    let csv = orbit_csv(&cfg, &states)?;
    let rows = states
        .iter()
        .map(|s| {
            let h = invariants(&cfg, s)?;
            Ok(json!({ "x": s.x, "H1": h.h1, "H2": h.h2, "denominator": eulermap::denominator(&cfg, s) }))
        })
        .collect::<Result<Vec<_>>>()?;
    let h0 = invariants(&cfg, &states[0])?;
    let conserved = states.iter().all(|s| invariants(&cfg, s).map(|h| h == h0).unwrap_or(false));
    Ok(Output::new(
        Verdict::from_pass(conserved),
        json!({ "steps": steps, "invariants_conserved": conserved, "orbit": rows }),
    )?
    .with_csv(csv))
}

pub fn invariants_cmd(run: &RunArgs, s: &Triple) -> Result<Output> {
    let cfg = top_config(run)?;
    let st = state(s);
    let h = invariants(&cfg, &st)?;
    let a = a_coeffs(&cfg, &h)?;
    let csv = format!("H1,H2\n{},{}\n", h.h1, h.h2);
    Ok(Output::new(Verdict::Ok, json!({ "state": st, "invariants": h, "a_coefficients": a }))?.with_csv(csv))
}

pub fn fixed_points(run: &RunArgs, s: Option<&Triple>) -> Result<Output> {
    let cfg = top_config(run)?;
    let axes = ["(t,0,0)", "(0,t,0)", "(0,0,t)"];
    let mut result = json!({ "fixed_sets": axes, "inertia": cfg.inertia() });
    let mut verdict = Verdict::Ok;
    if let Some(s) = s {
        let st = state(s);
        let fixed = is_fixed_point(&st);
        let image = eulermap::euler_step(&cfg, &st)?;
        result["state"] = json!(st);
        result["image"] = json!(image);
        result["is_fixed"] = json!(fixed);
        verdict = Verdict::from_pass(fixed == (image == st));
    }
    Output::new(verdict, result)
}

pub fn biquad(
    run: &RunArgs,
    s: Option<&Triple>,
    h1: Option<&ExactScalar>,
    h2: Option<&ExactScalar>,
    axis: Option<u8>,
    level: usize,
) -> Result<Output> {
    let cfg = top_config(run)?;
    if level == 0 {
        bail!(UsageError("--level must be at least 1".into()));
    }
    let h = match (s, h1, h2) {
        (Some(s), None, None) => invariants(&cfg, &state(s))?,
        (None, Some(h1), Some(h2)) => InvariantPair { h1: h1.clone(), h2: h2.clone() },
        _ => bail!(UsageError("give either --state or both --h1 and --h2".into())),
    };
    let a = a_coeffs(&cfg, &h)?;
    let mut per_axis = Vec::new();
    let mut csv = String::from("axis,level,a,b,c,d,e,f\n");
    for ax in axes(axis)? {
        let q = top_params(&cfg, &h, ax)?;
        let qn = q_sequence(&q, level)?.pop().expect("level >= 1");
        let cells: Vec<String> = qn.0.iter().map(ToString::to_string).collect();
        csv.push_str(&format!("{},{level},{}\n", ax.number(), cells.join(",")));
        per_axis.push(json!({ "axis": ax.number(), "q": q, "level": level, "q_level": qn }));
    }
    Ok(Output::new(Verdict::Ok, json!({ "invariants": h, "a_coefficients": a, "params": per_axis }))?.with_csv(csv))
}

fn six_params(v: &Six) -> BiquadParams<ExactScalar> {
    BiquadParams(v.clone())
}

pub fn gamma(run: &RunArgs, n: u32, print: bool, at: Option<&Six>) -> Result<(Output, Option<String>)> {
    let _ = run;
    let g = gamma_poly(n).map_err(|e| UsageError(e.to_string()))?;
    if print {
        return Ok((Output::new(Verdict::Ok, Value::Null)?, Some(format!("{g}\n"))));
    }
    let mut result = json!({
        "n": n,
        "polynomial": g.to_string(),
        "terms": g.len(),
        "degree": g.total_degree(),
    });
    if let Some(v) = at {
        let q = six_params(v);
        result["at"] = json!(q);
        result["value"] = json!(g.eval_in(&q.0, &ExactScalar::zero()));
    }
    Ok((Output::new(Verdict::Ok, result)?, None))
}

pub fn correlate(run: &RunArgs, n: u32, params: Option<&Six>) -> Result<Output> {
    let _ = run;
    if !(3..=5).contains(&n) {
        bail!(UsageError(format!("--n must be 3, 4 or 5, got {n}")));
    }
    let g = gamma_poly(n)?;
    let level = (n - 1) as usize;
    match params {
        None => {
            let q = symbolic_params(param_vars())?;
            let qn = q_sequence(&q, level)?.pop().expect("level >= 2");
            let rep = check_full_correlation(&q, &qn, &g)?;
            let passed = rep.verdict == CorrelationVerdict::FullyCorrelated && rep.decomposition_holds;
            let quotients: Vec<Value> = rep
                .wedge_quotients
                .iter()
                .map(|(a, b, v)| json!({ "wedge": format!("{a}^{b}"), "quotient": v.to_string() }))
                .collect();
            let cofactor = rep
                .epsilon_numerator
                .as_ref()
                .zip(rep.denominator.as_ref())
                .map(|(e, d)| json!({ "epsilon_numerator": e.to_string(), "denominator": d.to_string() }));
            Ok(Output::new(
                Verdict::from_pass(passed),
                json!({
                    "n": n,
                    "level": level,
                    "verdict": rep.verdict,
                    "decomposition_holds": rep.decomposition_holds,
                    "failing_wedges": rep.failing_wedges.iter().map(|(a, b)| format!("{a}^{b}")).collect::<Vec<_>>(),
                    "quotients": quotients,
                    "epsilon": cofactor,
                }),
            )?)
        }
        Some(v) => {
            let q = six_params(v);
            let gv = g.eval_in(&q.0, &ExactScalar::zero());
            let qn = q_sequence(&q, level)?.pop().expect("level >= 2");
            let col = collinear(&q, &qn);
            // A vanishing gamma must force q^(n-1) to be proportional to q.
            let verdict = if gv.is_zero() { Verdict::from_pass(col) } else { Verdict::Ok };
            Ok(Output::new(
                verdict,
                json!({ "n": n, "level": level, "params": q, "q_level": qn, "gamma": gv, "gamma_vanishes": gv.is_zero(), "collinear": col }),
            )?)
        }
    }
}

/// All 2×2 minors of `[q; qn]` vanish.
fn collinear(q: &BiquadParams<ExactScalar>, qn: &BiquadParams<ExactScalar>) -> bool {
    (0..6).all(|i| (i + 1..6).all(|j| (q.0[i].clone() * &qn.0[j] - &(q.0[j].clone() * &qn.0[i])).is_zero()))
}

#[derive(Serialize)]
struct XiRow {
    xi: [String; 3],
    v3: f64,
    singular: f64,
    period3_residual: Option<f64>,
    real_lift: bool,
    state: Option<BodyState<BigScalar>>,
}

const XI_HEADER: &str = "xi1,xi2,xi3,v3,singular,period3_residual,real_lift\n";

fn xi_row_csv(r: &XiRow) -> String {
    let res = r.period3_residual.map(|v| format!("{v:e}")).unwrap_or_default();
    format!(
        "{},{},{},{:e},{:e},{res},{}\n",
        csv_escape(&r.xi[0]),
        csv_escape(&r.xi[1]),
        csv_escape(&r.xi[2]),
        r.v3,
        r.singular,
        r.real_lift
    )
}

fn xi_row(cfg: &TopConfig, xi: [MaybeExact; 3], prec: Precision) -> Result<XiRow> {
    let labels = xi.clone().map(|v| v.to_string());
    let big = XiPoint::new(xi[0].to_big(prec), xi[1].to_big(prec), xi[2].to_big(prec));
    let exact: Option<Vec<ExactScalar>> = xi.iter().map(|v| v.as_exact().cloned()).collect();
    let (v3, singular) = match exact {
        Some(e) => {
            let p = XiPoint::new(e[0].clone(), e[1].clone(), e[2].clone());
            (v3_condition(&p).abs().to_f64(), singular_quartic(&p).abs().to_f64())
        }
        None => (v3_condition(&big).abs_f64(), singular_quartic(&big).abs_f64()),
    };
    let lifted = state_from_xi(cfg, &big, [true; 3]).ok();
    let real = lifted.as_ref().is_some_and(|s| s.x.iter().all(BigScalar::is_real));
    let residual = match (&lifted, real) {
        (Some(s), true) => period_residual(cfg, s, 3, prec).ok().map(|r| r.to_f64()),
        _ => None,
    };
    Ok(XiRow { xi: labels, v3, singular, period3_residual: residual, real_lift: real, state: lifted.filter(|_| real) })
}

fn sample_rows(cfg: &TopConfig, xi1: &ExactScalar, xi2: &ExactScalar, prec: Precision) -> Result<Vec<XiRow>> {
    v3_sample(xi1, xi2, prec)
        .into_iter()
        .map(|xi3| xi_row(cfg, [MaybeExact::Exact(xi1.clone()), MaybeExact::Exact(xi2.clone()), xi3], prec))
        .collect()
}

fn rows_output(rows: Vec<XiRow>, extra: Value) -> Result<Output> {
    let mut csv = String::from(XI_HEADER);
    for r in &rows {
        csv.push_str(&xi_row_csv(r));
    }
    let mut result = extra;
    result["rows"] = serde_json::to_value(&rows)?;
    Ok(Output::new(Verdict::Ok, result)?.with_csv(csv))
}

pub fn variety(cmd: &VarietyCommand) -> Result<Output> {
    match cmd {
        VarietyCommand::Sample { run, xi1, xi2 } => {
            let cfg = top_config(run)?;
            let rows = sample_rows(&cfg, xi1, xi2, precision(run)?)?;
            rows_output(rows, json!({ "signs": "+++" }))
        }
        VarietyCommand::Check { run, state: s } => {
            let cfg = top_config(run)?;
            let st = state(s);
            let xi = xi_from_state(&cfg, &st);
            let v3 = v3_condition(&xi);
            let singular = singular_quartic(&xi);
            let orbit3 = orbit(&cfg, &st, 3);
            let residual = match &orbit3 {
                Ok(o) => {
                    Some(o[3].x.iter().zip(&st.x).map(|(a, b)| (a.clone() - b).abs().to_f64()).fold(0.0, f64::max))
                }
                Err(_) => None,
            };
            let row = XiRow {
                xi: xi.xi.clone().map(|v| v.to_string()),
                v3: v3.to_f64().abs(),
                singular: singular.to_f64().abs(),
                period3_residual: residual,
                real_lift: true,
                state: None,
            };
            let on_v3 = v3.is_zero();
            let returns = residual == Some(0.0);
            let mut out = rows_output(
                vec![row],
                json!({ "state": st, "xi": xi.xi, "v3": v3, "singular": singular, "on_v3": on_v3, "period3": returns }),
            )?;
            out.verdict = Verdict::Ok;
            Ok(out)
        }
        VarietyCommand::Scan { run, grid, bounds } => {
            let cfg = top_config(run)?;
            let prec = precision(run)?;
            if *grid < 2 {
                bail!(UsageError("--grid must be at least 2".into()));
            }
            let (lo, hi) = bounds;
            let step = (hi.clone() - lo).checked_div(&ExactScalar::from((*grid - 1) as i64))?;
            let mut rows = Vec::new();
            for i in 0..*grid {
                let xi1 = lo.clone() + &(step.clone() * &ExactScalar::from(i as i64));
                for j in 0..*grid {
                    let xi2 = lo.clone() + &(step.clone() * &ExactScalar::from(j as i64));
                    rows.extend(sample_rows(&cfg, &xi1, &xi2, prec)?);
                }
            }
            rows_output(rows, json!({ "grid": grid, "box": [lo, hi] }))
        }
    }
}

/// `--inertia I1,I2` or a three-value inertia with one repeated pair, relabelled
/// so the distinct moment comes first.
fn axisym_top(run: &RunArgs) -> Result<(AxisymTop, Option<String>)> {
    let v = run.inertia.clone().map(|i| i.0).unwrap_or_else(|| vec![ExactScalar::from(2), ExactScalar::from(1)]);
    let (i1, i2, note) = match v.as_slice() {
        [a, b] => (a.clone(), b.clone(), None),
        [a, b, c] if b == c => (a.clone(), b.clone(), None),
        [a, b, c] if a == c => (b.clone(), a.clone(), Some("relabelled axes 2,3,1 -> 1,2,3".to_string())),
        [a, b, c] if a == b => (c.clone(), a.clone(), Some("relabelled axes 3,1,2 -> 1,2,3".to_string())),
        _ => bail!(UsageError("--inertia for axisym takes I1,I2 or three values with a repeated pair".into())),
    };
    Ok((AxisymTop::new(i1, i2).map_err(|e| UsageError(e.to_string()))?, note))
}

pub fn axisym_cmd(cmd: &AxisymCommand) -> Result<Output> {
    match cmd {
        AxisymCommand::Quantize { run, n } => {
            let (top, note) = axisym_top(run)?;
            let prec = precision(run)?;
            let mu = axisym::mu(*n, prec)?;
            let x1 = axisym::quantized_x1(*n, &top, prec)?;
            let relation = axisym::plane_invariant_relation(*n, &top, prec)?;
            let csv = format!(
                "n,mu_squared,x1_plus,x1_minus,plane_relation\n{n},{},{},{},{}\n",
                csv_escape(&mu.mu_squared.to_string()),
                csv_escape(&x1[0].to_string()),
                csv_escape(&x1[1].to_string()),
                csv_escape(&relation.to_string())
            );
            Ok(Output::new(
                Verdict::Ok,
                json!({ "n": n, "inertia": top.config().inertia(), "relabel": note, "mu": mu, "x1": x1, "plane_relation": relation }),
            )?
            .with_csv(csv))
        }
        AxisymCommand::Verify { run, n, x2, x3, minus } => {
            let (top, note) = axisym_top(run)?;
            let prec = precision(run)?;
            let x1 = axisym::quantized_x1(*n, &top, prec)?;
            let chosen = &x1[usize::from(*minus)];
            let cert = axisym::verify_axisym_period_with(*n, &top, chosen, x2, x3, prec)?;
            let holds = cert.holds();
            let witness = json!({ "x": [chosen.to_string(), x2.to_string(), x3.to_string()] });
            Ok(Output::new(Verdict::from_pass(holds), json!({ "relabel": note, "certificate": cert }))?
                .with_witnesses(if holds { vec![witness] } else { Vec::new() }))
        }
    }
}

pub fn search(run: &RunArgs, period: u32, bounds: (f64, f64), grid: usize) -> Result<Output> {
    let cfg = top_config(run)?;
    let mut region = SearchRegion::cube(bounds.0, bounds.1, grid).map_err(|e| UsageError(e.to_string()))?;
    region.precision = precision(run)?;
    if let Some(t) = run.tol {
        region.newton_tolerance = t;
        region.validate().map_err(|e| UsageError(e.to_string()))?;
    }
    let report = newton_periodic_search(&cfg, period, &region, run.seed)?;
    let genuine: Vec<Value> = report
        .candidates
        .iter()
        .filter(|c| c.classification == eulertop::perisearch::Classification::Genuine)
        .take(10)
        .map(|c| json!(c.state))
        .collect();
    let verdict = Verdict::from_pass(report.summary.genuine == 0);
    Ok(Output::new(verdict, json!({ "region": region, "report": report }))?.with_witnesses(genuine))
}

pub fn verify_cmd(run: &RunArgs, target: VerifyTarget, grid: usize, bounds: (f64, f64)) -> Result<Output> {
    let inertia = run.inertia.clone().map(|i| i.0).unwrap_or_else(default_inertia);
    let Ok(inertia) = <[ExactScalar; 3]>::try_from(inertia) else {
        bail!(UsageError("--inertia takes three values I1,I2,I3".into()));
    };
    let opts =
        SuiteOptions { seed: run.seed, precision: precision(run)?, inertia, search_grid: grid, search_box: bounds };
    let reports = target
        .criteria()
        .iter()
        .map(|&id| verify::run_criterion(id, &opts).with_context(|| format!("criterion {id}")))
        .collect::<Result<Vec<_>>>()?;
    let passed = reports.iter().all(|r| r.passed);
    let summary: Vec<Value> =
        reports.iter().map(|r| json!({ "id": r.id, "title": r.title, "passed": r.passed })).collect();
    Output::new(Verdict::from_pass(passed), json!({ "options": opts, "summary": summary, "criteria": reports }))
}
