use std::fmt::Write as _;

use ncg_core::amc::{
    absorption_variance, build_chain, color_pattern, expected_absorption, fundamental_matrix,
    limit_distribution_check, transient_classes, write_chain_csv, ChainOptions, LimitReport,
};
use ncg_core::borda::{
    borda_welfare, estimate_expected_optimum, load_prefs, local_optimal_run, reduce_network, write_phase_trace_csv,
    BordaNetwork, LocalRunOptions, PreferenceProfile, StallPolicy,
};
use ncg_core::convergence::{
    prop3_tail_curve, run_sweep, scaling_report, tail_checks, write_samples_csv, GraphFamily, PaletteRule,
    SweepConfig, TrialSample, MIN_TRIALS_PER_SIZE,
};
use ncg_core::game::{write_trajectory_csv, ConvergenceResult, Dynamics, PlayOptions};
use ncg_core::graph::{generate_er, load_coloring, load_graph};
use ncg_core::rng::{derive_seed, stream};
use ncg_core::samplers::{sa_run, write_sa_trace_csv, AcceptanceMode};
use ncg_core::{Coloring, Error, Graph, Rational, Result, Scalar, Schedule};
use serde::Serialize;
use serde_json::json;

use crate::output::{Meta, OutDir};
use crate::{AnnealArgs, EstimateArgs, ExactArgs, Family, GenArgs, InstanceArgs, LocalArgs, Mode, PlayArgs, Stall, SweepArgs};

fn write_text(out: &OutDir, name: &str, meta: &Meta, body: &str) -> Result<()> {
    out.write_with(name, meta, |buf, header| {
        for line in header {
            buf.extend_from_slice(format!("# {line}\n").as_bytes());
        }
        buf.extend_from_slice(body.as_bytes());
        Ok(())
    })?;
    Ok(())
}

/// Edgeless graphs resolve at once under any palette; otherwise require
/// `q >= max_degree + 2`.
fn dynamics(g: &Graph, q: usize) -> Result<Dynamics<'_>> {
    if g.edge_count() == 0 {
        Dynamics::with_any_palette(g, q)
    } else {
        Dynamics::new(g, q)
    }
}

fn play_recorded(g: &Graph, q: usize, seed: u64, max_rounds: usize) -> Result<ConvergenceResult> {
    dynamics(g, q)?.play(seed, PlayOptions { max_rounds, record_trajectory: true })
}

/// Graph attempt `a` uses stream `[0, a]`, preferences `[1]`, play `[2]`.
pub fn gen(a: &GenArgs) -> Result<()> {
    if a.q == 0 {
        return Err(Error::InvalidSize("palette must have at least one color".into()));
    }
    let mut attempt = 0usize;
    let g = loop {
        let g = generate_er(a.n, a.p, derive_seed(a.seed, &[0, attempt as u64]))?;
        if g.edge_count() == 0 || a.q >= g.max_degree() + 2 {
            break g;
        }
        attempt += 1;
        if a.no_regenerate || attempt >= a.max_attempts {
            return Err(Error::PaletteTooSmall { q: a.q, max_degree: g.max_degree() });
        }
    };
    let prefs = PreferenceProfile::random(a.n, a.q, &mut stream(a.seed, &[1]));
    let played = play_recorded(&g, a.q, derive_seed(a.seed, &[2]), a.max_rounds)?;
    let coloring = played.final_state.assignment();

    let meta = Meta::new("gen", a, Some(a.seed));
    let out = OutDir::create(&a.out)?;
    out.write_with("graph.txt", &meta, |w, h| g.write_to(w, h))?;
    out.write_with("prefs.csv", &meta, |w, h| prefs.write_to(w, h))?;
    out.write_with("coloring.txt", &meta, |w, h| coloring.write_to(w, h))?;
    out.write_with("trajectory.csv", &meta, |w, h| {
        write_trajectory_csv(w, h, played.trajectory.as_deref().unwrap_or_default())
    })?;
    out.write_json(
        "gen.json",
        &meta,
        &json!({
            "graph_attempts": attempt + 1,
            "edges": g.edge_count(),
            "max_degree": g.max_degree(),
            "rounds": played.rounds,
            "welfare": borda_welfare(&prefs, coloring)?,
        }),
    )?;
    Ok(())
}

pub fn play(a: &PlayArgs) -> Result<()> {
    let g = load_graph(&a.graph)?;
    let played = play_recorded(&g, a.q, a.seed, a.max_rounds)?;
    let meta = Meta::new("play", a, Some(a.seed));
    let out = OutDir::create(&a.out)?;
    out.write_with("trajectory.csv", &meta, |w, h| {
        write_trajectory_csv(w, h, played.trajectory.as_deref().unwrap_or_default())
    })?;
    out.write_with("coloring.txt", &meta, |w, h| played.final_state.assignment().write_to(w, h))?;
    out.write_json("play.json", &meta, &json!({ "n": g.n(), "q": a.q, "rounds": played.rounds }))?;
    Ok(())
}

fn family_graph(family: Family, n: usize) -> Result<Graph> {
    Ok(match family {
        Family::Complete => Graph::complete(n),
        Family::Path => Graph::path(n),
        Family::Star => Graph::star(n),
        Family::Edgeless => Graph::empty(n),
        Family::Er => return Err(Error::InvalidSize("use `gen` and `--graph` for random graphs".into())),
    })
}

#[derive(Serialize)]
struct StateRow {
    state: usize,
    colors: Vec<usize>,
    pattern: Vec<usize>,
    expected_steps: f64,
    second_moment: f64,
    variance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<ExactMoments>,
}

#[derive(Serialize)]
struct ExactMoments {
    expected_steps: String,
    second_moment: String,
    variance: String,
}

#[derive(Serialize)]
struct ClassRow {
    pattern: Vec<usize>,
    members: usize,
    expected_steps: f64,
    variance: f64,
}

#[derive(Serialize)]
struct ExactReport {
    n: usize,
    q: usize,
    states: usize,
    transient: usize,
    absorbing: usize,
    rational: bool,
    transient_states: Vec<StateRow>,
    classes: Vec<ClassRow>,
    decay: LimitReport,
}

fn exact_report<T: Scalar + std::fmt::Display>(g: &Graph, q: usize, t_max: u64, out: &OutDir, meta: &Meta) -> Result<ExactReport> {
    let (space, chain) = build_chain::<T>(g, q, ChainOptions::default())?;
    let n_matrix = fundamental_matrix(&chain)?;
    let summary = absorption_variance(&n_matrix, &expected_absorption(&n_matrix))?;
    let f = |x: &T| x.to_f64().unwrap_or(f64::NAN);
    let transient_states: Vec<StateRow> = (0..chain.transient_count())
        .map(|i| {
            let state = chain.transient_state(i);
            let colors = space.decode(state);
            StateRow {
                state,
                pattern: color_pattern(&colors),
                colors,
                expected_steps: f(&summary.expected_steps[i]),
                second_moment: f(&summary.second_moment[i]),
                variance: f(&summary.variance[i]),
                exact: T::is_exact().then(|| ExactMoments {
                    expected_steps: summary.expected_steps[i].to_string(),
                    second_moment: summary.second_moment[i].to_string(),
                    variance: summary.variance[i].to_string(),
                }),
            }
        })
        .collect();
    let classes = transient_classes(&space, &chain)
        .into_iter()
        .map(|c| ClassRow {
            expected_steps: f(&summary.expected_steps[c.representative]),
            variance: f(&summary.variance[c.representative]),
            pattern: c.pattern,
            members: c.members,
        })
        .collect();
    // decay is tracked in floating point: rational powers of Q grow huge
    let (_, float_chain) = build_chain::<f64>(g, q, ChainOptions::default())?;
    let decay = limit_distribution_check(&float_chain, t_max)?;
    out.write_with("chain.csv", meta, |w, h| write_chain_csv(w, h, &space, &chain))?;
    Ok(ExactReport {
        n: g.n(),
        q,
        states: space.len(),
        transient: chain.transient_count(),
        absorbing: chain.absorbing_count(),
        rational: T::is_exact(),
        transient_states,
        classes,
        decay,
    })
}

pub fn exact(a: &ExactArgs) -> Result<()> {
    let g = match (&a.graph, a.family, a.n) {
        (Some(path), _, _) => load_graph(path)?,
        (None, Some(family), Some(n)) => family_graph(family, n)?,
        _ => return Err(Error::InvalidSize("give --graph, or --family with --n".into())),
    };
    let meta = Meta::new("exact", a, None);
    let out = OutDir::create(&a.out)?;
    let report = if a.rational {
        exact_report::<Rational>(&g, a.q, a.t_max, &out, &meta)?
    } else {
        exact_report::<f64>(&g, a.q, a.t_max, &out, &meta)?
    };
    out.write_json("exact.json", &meta, &report)?;
    Ok(())
}

fn sweep_family(a: &SweepArgs) -> Result<GraphFamily> {
    Ok(match a.family {
        Family::Er => match (a.p, a.degree) {
            (Some(p), None) => GraphFamily::ErdosRenyi { p },
            (None, Some(degree)) => GraphFamily::ExpectedDegree { degree },
            _ => return Err(Error::InvalidSize("`er` sweeps need exactly one of --p or --degree".into())),
        },
        Family::Complete => GraphFamily::Complete,
        Family::Path => GraphFamily::Path,
        Family::Edgeless => GraphFamily::Edgeless,
        Family::Star => return Err(Error::InvalidSize("star graphs are not a sweep family".into())),
    })
}

pub fn sweep(a: &SweepArgs) -> Result<()> {
    let cfg = SweepConfig {
        sizes: a.sizes.clone(),
        family: sweep_family(a)?,
        palette: a.q.map_or(PaletteRule::MaxDegreePlus(a.palette_slack), PaletteRule::Fixed),
        trials: a.trials,
        trials_per_graph: a.trials_per_graph,
        master_seed: a.seed,
        max_rounds: a.max_rounds,
    };
    let samples = run_sweep(&cfg)?;
    let scaling = if a.sizes.len() >= 2 { Some(scaling_report(&samples, MIN_TRIALS_PER_SIZE)?) } else { None };
    let tails = tail_checks(&samples, a.epsilon)?;
    let quantiles = a
        .sizes
        .iter()
        .map(|&n| {
            let subset: Vec<TrialSample> = samples.iter().filter(|s| s.n == n).copied().collect();
            prop3_tail_curve(&subset)
        })
        .collect::<Result<Vec<_>>>()?;

    let meta = Meta::new("sweep", a, Some(a.seed));
    let out = OutDir::create(&a.out)?;
    out.write_with("samples.csv", &meta, |w, h| write_samples_csv(w, h, &samples))?;
    if let Some(report) = &scaling {
        let mut body = String::from("n,trials,mean,variance,std_err,mean_ratio,variance_ratio\n");
        for s in &report.sizes {
            let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
            let _ = writeln!(
                body,
                "{},{},{},{},{},{},{}",
                s.n,
                s.trials,
                s.mean,
                s.variance,
                s.std_err,
                opt(s.mean_ratio),
                opt(s.variance_ratio)
            );
        }
        write_text(&out, "scaling.csv", &meta, &body)?;
    }
    out.write_json("sweep.json", &meta, &json!({ "scaling": scaling, "tails": tails, "quantiles": quantiles }))?;
    Ok(())
}

fn load_instance(a: &InstanceArgs) -> Result<(Graph, PreferenceProfile, Coloring)> {
    let g = load_graph(&a.graph)?;
    let prefs = load_prefs(&a.prefs)?;
    let coloring = load_coloring(&a.coloring)?;
    coloring.check_len(&g)?;
    Ok((g, prefs, coloring))
}

pub fn reduce(a: &InstanceArgs) -> Result<()> {
    let (g, prefs, coloring) = load_instance(a)?;
    let net = BordaNetwork::new(g, prefs, coloring)?;
    let outcome = reduce_network(&net)?;
    let rest = &outcome.network;

    let meta = Meta::new("reduce", a, None);
    let out = OutDir::create(&a.out)?;
    out.write_with("reduced_graph.txt", &meta, |w, h| rest.graph().write_to(w, h))?;
    out.write_with("reduced_prefs.csv", &meta, |w, h| rest.prefs().write_to(w, h))?;
    out.write_with("reduced_coloring.txt", &meta, |w, h| rest.coloring().write_to(w, h))?;
    out.write_json(
        "reduce.json",
        &meta,
        &json!({
            "quitters": outcome.quitters,
            "payoff_gained": outcome.payoff_gained,
            "remaining_ids": rest.original_ids(),
            "remaining_edges": rest.graph().edge_count(),
            "available_lists": rest.avail().lists(),
        }),
    )?;
    Ok(())
}

fn acceptance(mode: Mode) -> AcceptanceMode {
    match mode {
        Mode::Standard => AcceptanceMode::Standard,
        Mode::Literal => AcceptanceMode::Literal,
    }
}

fn run_options(a: &LocalArgs) -> LocalRunOptions {
    LocalRunOptions {
        mh_steps: a.steps,
        mode: acceptance(a.mode),
        phase_cap: a.phase_cap,
        stall: match a.stall {
            Stall::Freeze => StallPolicy::Freeze,
            Stall::Fail => StallPolicy::Fail,
        },
    }
}

pub fn localopt(a: &LocalArgs) -> Result<()> {
    let (g, prefs, coloring) = load_instance(&a.instance)?;
    let run = local_optimal_run(&g, &prefs, &coloring, a.seed, run_options(a))?;
    let final_coloring = Coloring::new(run.final_colors.clone(), prefs.q())?;

    let meta = Meta::new("localopt", a, Some(a.seed));
    let out = OutDir::create(&a.instance.out)?;
    out.write_with("trace.csv", &meta, |w, h| write_phase_trace_csv(w, h, &run.trace))?;
    out.write_with("final_coloring.txt", &meta, |w, h| final_coloring.write_to(w, h))?;
    out.write_json(
        "localopt.json",
        &meta,
        &json!({
            "initial_welfare": borda_welfare(&prefs, &coloring)?,
            "total_welfare": run.total_welfare,
            "ceiling": (prefs.q().saturating_sub(1) * g.n()),
            "phases": run.trace.len(),
            "frozen": run.frozen,
        }),
    )?;
    Ok(())
}

pub fn estimate(a: &EstimateArgs) -> Result<()> {
    let l = &a.local;
    let (g, prefs, coloring) = load_instance(&l.instance)?;
    let (est, runs) = estimate_expected_optimum(&g, &prefs, &coloring, a.trials, l.seed, run_options(l))?;

    let meta = Meta::new("estimate", a, Some(l.seed));
    let out = OutDir::create(&l.instance.out)?;
    let mut body = String::from("repetition,welfare,phases,frozen\n");
    for (r, run) in runs.iter().enumerate() {
        let _ = writeln!(body, "{r},{},{},{}", run.total_welfare, run.trace.len(), run.frozen.len());
    }
    write_text(&out, "samples.csv", &meta, &body)?;
    let min = est.samples.iter().min().copied();
    out.write_json(
        "estimate.json",
        &meta,
        &json!({
            "repetitions": a.trials,
            "mean": est.mean,
            "max": est.max,
            "min": min,
            "ceiling": (prefs.q().saturating_sub(1) * g.n()),
            "initial_welfare": borda_welfare(&prefs, &coloring)?,
        }),
    )?;
    Ok(())
}

#[derive(Serialize)]
struct ScheduleResult {
    schedule: Schedule,
    name: String,
    seed: u64,
    best_welfare: u64,
    reaching_time: u64,
    final_welfare: u64,
    accepted: u64,
}

/// Schedule `i` runs on seed `derive_seed(seed, [i])`.
pub fn anneal(a: &AnnealArgs) -> Result<()> {
    let (g, prefs, coloring) = load_instance(&a.instance)?;
    let schedules = a.schedule.iter().map(|s| s.parse::<Schedule>()).collect::<Result<Vec<_>>>()?;
    let meta = Meta::new("anneal", a, Some(a.seed));
    let out = OutDir::create(&a.instance.out)?;
    let mut results = Vec::with_capacity(schedules.len());
    for (i, schedule) in schedules.into_iter().enumerate() {
        let seed = derive_seed(a.seed, &[i as u64]);
        let trace = sa_run(&g, &prefs, &coloring, a.steps, schedule, acceptance(a.mode), seed)?;
        out.write_with(&format!("trace_{i}_{}.csv", schedule.name()), &meta, |w, h| write_sa_trace_csv(w, h, &trace))?;
        results.push(ScheduleResult {
            schedule,
            name: schedule.name().to_string(),
            seed,
            best_welfare: trace.best_welfare,
            reaching_time: trace.reaching_time,
            final_welfare: trace.records.last().map_or(0, |r| r.welfare),
            accepted: trace.records.iter().filter(|r| r.accepted).count() as u64,
        });
    }
    out.write_json(
        "anneal.json",
        &meta,
        &json!({
            "steps": a.steps,
            "initial_welfare": borda_welfare(&prefs, &coloring)?,
            "ceiling": (prefs.q().saturating_sub(1) * g.n()),
            "schedules": results,
        }),
    )?;
    Ok(())
}
