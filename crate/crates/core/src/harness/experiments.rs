use std::time::Instant;

use super::config::{Experiment, ExperimentConfig};
use super::result::{sequence_tolerances, within, ExperimentResult, Param, Row};
use crate::coalescent::{
    sample_states_at, scaled_conditional_moment, scaled_joint_moment, scaled_raw_moment,
    shifted_scaled_joint_moment, transition_matrix, CoalescentSpec, MomentQuery,
};
use crate::error::Result;
use crate::mlprocess::{
    chapman_kolmogorov_defect, exponential_functional_moment, exponential_functional_sample,
    generator_coeff, generator_extrapolated, joint_moment, laplace_exponent_closed,
    laplace_exponent_quadrature, ml_moment, ml_sample, semigroup_apply_poly, MLParameter,
    SubordinatorSpec,
};
use crate::montecarlo::{accumulate, map_replicates, tag, Exec};
use crate::specfun::{PrecisionContext, StirlingTables};
use crate::stats::ks_two_sample;

/// Multiple of the standard error allowed for Monte Carlo rows.
const MC_SIGMAS: f64 = 3.0;
/// Relative band for the exponential-functional moments; covers Monte Carlo
/// noise and the bias of the discretized subordinator.
const FUNCTIONAL_BAND: f64 = 0.02;

/// Run the configured experiment.
pub fn run(cfg: &ExperimentConfig, exec: Exec) -> Result<ExperimentResult> {
    match cfg.experiment {
        Experiment::ConvergeMoments => run_converge_moments(cfg),
        Experiment::ConvergeDist => run_converge_dist(cfg, exec),
        Experiment::Fdd => run_fdd(cfg, exec),
        Experiment::CkCheck => run_ck_check(cfg),
        Experiment::SemigroupCompare => run_semigroup_compare(cfg),
        Experiment::SubordinatorCheck => run_subordinator_check(cfg, exec),
        Experiment::GeneratorCheck => run_generator_check(cfg),
    }
}

struct Clock {
    enabled: bool,
    start: Instant,
}

impl Clock {
    fn start(enabled: bool) -> Self {
        Self {
            enabled,
            start: Instant::now(),
        }
    }

    fn lap(&mut self) -> Option<f64> {
        let now = Instant::now();
        let secs = (now - self.start).as_secs_f64();
        self.start = now;
        self.enabled.then_some(secs)
    }
}

/// One point of a sequence over `n`, before its tolerance is known.
struct Pending {
    params: Vec<(&'static str, Param)>,
    exact: f64,
    estimate: f64,
    seconds: Option<f64>,
}

fn close_sequence(
    exp: Experiment,
    statistic: &str,
    points: Vec<Pending>,
    final_tolerance: f64,
    out: &mut Vec<Row>,
) {
    let errors: Vec<f64> = points.iter().map(|p| (p.estimate - p.exact).abs()).collect();
    let tolerances = sequence_tolerances(&errors, final_tolerance);
    for ((p, e), tol) in points.into_iter().zip(errors).zip(tolerances) {
        let mut row = Row::new(exp, statistic, p.params, p.exact, p.estimate, e, tol);
        row.seconds = p.seconds;
        out.push(row);
    }
}

fn spec(n: u64) -> Result<CoalescentSpec> {
    CoalescentSpec::new(n)
}

/// Exact `E((X_t^(n))^m)` against `E(X_t^m)` over increasing `n`.
pub fn run_converge_moments(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let exp = Experiment::ConvergeMoments;
    let mut clock = Clock::start(cfg.timing);
    let mut rows = Vec::new();
    for &t in &cfg.t_list {
        for &m in &cfg.m_list {
            let exact = ml_moment(MLParameter::at_time(t)?, m)?;
            let mut points = Vec::new();
            for &n in &cfg.n_list {
                let estimate = scaled_raw_moment(spec(n)?, t, m as usize)?;
                points.push(Pending {
                    params: vec![("t", Param::Real(t)), ("m", Param::Real(m)), ("n", Param::Int(n))],
                    exact,
                    estimate,
                    seconds: clock.lap(),
                });
            }
            close_sequence(exp, "raw_moment", points, cfg.effective_tolerance(), &mut rows);
        }
    }
    Ok(ExperimentResult::new(exp, rows))
}

/// Two-sample KS between simulated `X_t^(n)` and Mittag–Leffler draws.
///
/// The chain draws for different `n` share their random streams. The KS
/// statistic must decrease in `n` and, at the largest `n`, stay below the
/// critical value at level `ks_level`.
pub fn run_converge_dist(cfg: &ExperimentConfig, exec: Exec) -> Result<ExperimentResult> {
    let exp = Experiment::ConvergeDist;
    let mut clock = Clock::start(cfg.timing);
    let mut rows = Vec::new();
    let count = cfg.replicates;
    for (ti, &t) in cfg.t_list.iter().enumerate() {
        let p = MLParameter::at_time(t)?;
        let limit = map_replicates(exec, cfg.seed, tag("converge-dist/ml", ti as u64), count, |rng| {
            ml_sample(p, rng)
        });
        let mut stats = Vec::new();
        for &n in &cfg.n_list {
            let scale = spec(n)?.scale(t);
            let chain =
                map_replicates(exec, cfg.seed, tag("converge-dist/chain", ti as u64), count, |rng| {
                    sample_states_at(n, &[t], rng)[0] as f64 / scale
                });
            stats.push((n, ks_two_sample(&chain, &limit), clock.lap()));
        }
        let errors: Vec<f64> = stats.iter().map(|s| s.1.statistic).collect();
        let critical = stats
            .last()
            .map(|s| s.1.critical_value(cfg.ks_level))
            .unwrap_or(f64::INFINITY);
        let tolerances = sequence_tolerances(&errors, critical.min(cfg.effective_tolerance()));
        for ((n, ks, secs), tol) in stats.into_iter().zip(tolerances) {
            let mut row = Row::new(
                exp,
                "ks_statistic",
                vec![("t", Param::Real(t)), ("n", Param::Int(n))],
                0.0,
                ks.statistic,
                ks.statistic,
                tol,
            );
            row.seconds = secs;
            rows.push(row);
        }
    }
    Ok(ExperimentResult::new(exp, rows))
}

/// Joint moments at finitely many times: exact finite-`n` values (raw and
/// with the shifted factors) against the limit, and Monte Carlo against the
/// exact finite-`n` value.
pub fn run_fdd(cfg: &ExperimentConfig, exec: Exec) -> Result<ExperimentResult> {
    let exp = Experiment::Fdd;
    let mut clock = Clock::start(cfg.timing);
    let mut rows = Vec::new();
    for (g, (times, ms)) in cfg.fdd_times.iter().zip(&cfg.fdd_exponents).enumerate() {
        let q = MomentQuery::new(times.clone(), ms.clone())?;
        let exact = joint_moment(&q);
        let base = vec![("times", Param::List(times.clone())), ("m", Param::List(ms.clone()))];
        let with_n = |n: u64| {
            let mut p = base.clone();
            p.push(("n", Param::Int(n)));
            p
        };
        let mut raw = Vec::new();
        let mut shifted = Vec::new();
        for (ni, &n) in cfg.n_list.iter().enumerate() {
            let sp = spec(n)?;
            let finite = scaled_joint_moment(sp, &q)?;
            raw.push(Pending {
                params: with_n(n),
                exact,
                estimate: finite,
                seconds: clock.lap(),
            });
            shifted.push(Pending {
                params: with_n(n),
                exact,
                estimate: shifted_scaled_joint_moment(sp, &q)?,
                seconds: clock.lap(),
            });

            let scales: Vec<f64> = times.iter().map(|&t| sp.scale(t)).collect();
            let powers: Vec<i32> = ms.iter().map(|&m| m as i32).collect();
            let [acc] = accumulate::<1, _>(
                exec,
                cfg.seed,
                tag("fdd", ((g as u64) << 32) | ni as u64),
                cfg.replicates,
                |rng| {
                    let states = sample_states_at(n, times, rng);
                    let mut prod = 1.0;
                    for ((s, c), k) in states.iter().zip(&scales).zip(&powers) {
                        prod *= (*s as f64 / c).powi(*k);
                    }
                    [prod]
                },
            );
            let error = (acc.mean() - finite).abs();
            let mut row = Row::new(
                exp,
                "joint_moment_mc",
                with_n(n),
                finite,
                acc.mean(),
                error,
                MC_SIGMAS * acc.std_error(),
            );
            row.seconds = clock.lap();
            rows.push(row);
        }
        let tol = cfg.effective_tolerance();
        close_sequence(exp, "joint_moment", raw, tol, &mut rows);
        close_sequence(exp, "shifted_joint_moment", shifted, tol, &mut rows);
    }
    Ok(ExperimentResult::new(exp, rows))
}

/// Chapman–Kolmogorov: moment defects of the Mittag–Leffler kernel and
/// entrywise defects of `P(s)P(t) - P(s+t)` for the chain.
pub fn run_ck_check(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let exp = Experiment::CkCheck;
    let mut clock = Clock::start(cfg.timing);
    let ctx = PrecisionContext::new(cfg.precision_bits)?;
    let tol = cfg.effective_tolerance();
    let m_max = cfg.m_list.iter().copied().fold(0.0, f64::max) as usize;
    let mut rows = Vec::new();
    for &s in &cfg.s_list {
        for &t in &cfg.t_list {
            for &x in &cfg.x_list {
                let defects = chapman_kolmogorov_defect(s, t, x, m_max, &ctx)?;
                let worst = defects.iter().copied().fold(0.0, f64::max);
                let mut row = Row::new(
                    exp,
                    "kernel_moment_defect",
                    vec![
                        ("s", Param::Real(s)),
                        ("t", Param::Real(t)),
                        ("x", Param::Real(x)),
                        ("m_max", Param::Int(m_max as u64)),
                    ],
                    0.0,
                    worst,
                    worst,
                    tol,
                );
                row.seconds = clock.lap();
                rows.push(row);
            }
        }
    }
    if let Some(&n_max) = cfg.n_list.iter().max() {
        let tables = StirlingTables::new(n_max as usize);
        for &n in &cfg.n_list {
            let sp = spec(n)?;
            for &s in &cfg.s_list {
                for &t in &cfg.t_list {
                    let ps = transition_matrix(sp, s, &tables, &ctx)?;
                    let pt = transition_matrix(sp, t, &tables, &ctx)?;
                    let pst = transition_matrix(sp, s + t, &tables, &ctx)?;
                    let product = ps.compose(&pt);
                    let mut worst = 0.0f64;
                    for (i, row) in product.iter().enumerate() {
                        for (j, v) in row.iter().enumerate() {
                            worst = worst.max((v - pst.get(i + 1, j + 1)).abs());
                        }
                    }
                    let mut row = Row::new(
                        exp,
                        "chain_matrix_defect",
                        vec![("n", Param::Int(n)), ("s", Param::Real(s)), ("t", Param::Real(t))],
                        0.0,
                        worst,
                        worst,
                        tol,
                    );
                    row.seconds = clock.lap();
                    rows.push(row);
                }
            }
        }
    }
    Ok(ExperimentResult::new(exp, rows))
}

/// `sup_{x ∈ E_n(s) ∩ [0, L]} |T_{s,t}^(n) p_m(x) - T_t p_m(x)|` over
/// increasing `n`.
pub fn run_semigroup_compare(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let exp = Experiment::SemigroupCompare;
    let mut clock = Clock::start(cfg.timing);
    let mut rows = Vec::new();
    let window = cfg.window;
    for &s in &cfg.s_list {
        for &t in &cfg.t_list {
            for &m in &cfg.m_list {
                let degree = m as usize;
                let mut monomial = vec![0.0; degree + 1];
                monomial[degree] = 1.0;
                let mut points = Vec::new();
                for &n in &cfg.n_list {
                    let sp = spec(n)?;
                    let scale = sp.scale(s);
                    let mut sup = 0.0f64;
                    for j in 1..=n {
                        let x = j as f64 / scale;
                        if x > window {
                            break;
                        }
                        let chain = scaled_conditional_moment(sp, s, t, degree, j)?;
                        let limit = semigroup_apply_poly(t, &monomial, x)?;
                        sup = sup.max((chain - limit).abs());
                    }
                    points.push(Pending {
                        params: vec![
                            ("s", Param::Real(s)),
                            ("t", Param::Real(t)),
                            ("m", Param::Real(m)),
                            ("window", Param::Real(window)),
                            ("n", Param::Int(n)),
                        ],
                        exact: 0.0,
                        estimate: sup,
                        seconds: clock.lap(),
                    });
                }
                close_sequence(exp, "sup_norm", points, cfg.effective_tolerance(), &mut rows);
            }
        }
    }
    Ok(ExperimentResult::new(exp, rows))
}

/// Laplace exponent by quadrature against the closed form, moments of the
/// simulated exponential functional, and its law against the stable sampler.
pub fn run_subordinator_check(cfg: &ExperimentConfig, exec: Exec) -> Result<ExperimentResult> {
    let exp = Experiment::SubordinatorCheck;
    let mut clock = Clock::start(cfg.timing);
    let mut rows = Vec::new();
    for (ai, &alpha) in cfg.alpha_list.iter().enumerate() {
        let sub = SubordinatorSpec::with_alpha(alpha)?;
        for &x in &cfg.x_list {
            let closed = laplace_exponent_closed(&sub, x)?;
            let quad = laplace_exponent_quadrature(&sub, x)?;
            let rel = ((quad - closed) / closed).abs();
            let mut row = Row::new(
                exp,
                "laplace_exponent",
                vec![("alpha", Param::Real(alpha)), ("x", Param::Real(x))],
                closed,
                quad,
                rel,
                cfg.effective_tolerance(),
            );
            row.seconds = clock.lap();
            rows.push(row);
        }

        let ai = ai as u64;
        let results = map_replicates(exec, cfg.seed, tag("subordinator/moments", ai), cfg.replicates, |rng| {
            exponential_functional_sample(&sub, rng)
        });
        let draws = results.into_iter().collect::<Result<Vec<f64>>>()?;
        for m in 1..=2u32 {
            let exact = exponential_functional_moment(&sub, m)?;
            let mean = draws.iter().map(|v| v.powi(m as i32)).sum::<f64>() / draws.len() as f64;
            let rel = ((mean - exact) / exact).abs();
            let mut row = Row::new(
                exp,
                "functional_moment",
                vec![("alpha", Param::Real(alpha)), ("m", Param::Int(m as u64))],
                exact,
                mean,
                rel,
                FUNCTIONAL_BAND,
            );
            row.seconds = clock.lap();
            rows.push(row);
        }

        let k = cfg.ks_replicates;
        let functional = map_replicates(exec, cfg.seed, tag("subordinator/ks-functional", ai), k, |rng| {
            exponential_functional_sample(&sub, rng)
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
        let p = MLParameter::new(alpha)?;
        let stable = map_replicates(exec, cfg.seed, tag("subordinator/ks-stable", ai), k, |rng| {
            ml_sample(p, rng)
        });
        let ks = ks_two_sample(&functional, &stable);
        let mut row = Row::new(
            exp,
            "functional_ks",
            vec![("alpha", Param::Real(alpha))],
            0.0,
            ks.statistic,
            ks.statistic,
            ks.critical_value(cfg.ks_level),
        );
        row.seconds = clock.lap();
        rows.push(row);
    }
    Ok(ExperimentResult::new(exp, rows))
}

/// Extrapolated small-`t` estimates of `a_k(x)` against the closed form.
pub fn run_generator_check(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let exp = Experiment::GeneratorCheck;
    let mut clock = Clock::start(cfg.timing);
    let mut rows = Vec::new();
    for &k in &cfg.m_list {
        for &x in &cfg.x_list {
            let k = k as u32;
            let exact = generator_coeff(k, x)?;
            let estimate = generator_extrapolated(k, x)?;
            let error = (estimate - exact).abs();
            let mut row = Row::new(
                exp,
                "generator_coeff",
                vec![("k", Param::Int(k as u64)), ("x", Param::Real(x))],
                exact,
                estimate,
                error,
                cfg.effective_tolerance(),
            );
            row.seconds = clock.lap();
            rows.push(row);
        }
    }
    debug_assert!(rows.iter().all(|r| r.pass == within(r.error, r.tolerance)));
    Ok(ExperimentResult::new(exp, rows))
}
