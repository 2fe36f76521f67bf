use anyhow::{bail, Context, Result};
use golflab::dynamics::{run_golf_logged, run_parking, simulate_golf};
use golflab::exact::{
    binomial, cycle_law, multiball_law, parking_law, sparse_density, sparse_moments, z_block0_law_general,
    z_critical_block_law, MultiballConvention, ZLawParams,
};
use golflab::experiments::{
    critical_window_profile, max_block_scan, parking_asymptotics_check, sparse_case_check, Regime, ScanSpec,
};
use golflab::line::{find_window_separators, run_golf_line, sample_line_window};
use golflab::model::sample_initial_cycle;
use golflab::parallel::try_run_trials;
use golflab::stats::{quantile, summarize};
use golflab::verify::{run_verify, Mutation, VerifyOptions};
use golflab::{Clocks, MultiballConfig, Seed, Strategy};
use serde::Serialize;
use serde_json::json;

use crate::cli::{
    Command, Convention, Exact, Experiment, GolfArgs, LineArgs, MutationArg, ParkingArgs, PhaseArgs, RegimeArg,
    Simulate, VerifyArgs,
};

/// Largest support the exact hole-set laws are allowed to enumerate.
const MAX_SUPPORT: u64 = 2_000_000;

/// Bytes for stdout or the emitted file, plus an optional stderr note.
pub struct Output {
    pub bytes: Vec<u8>,
    pub success: bool,
    pub note: Option<String>,
}

impl Output {
    fn ok(bytes: Vec<u8>) -> Self {
        Self { bytes, success: true, note: None }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(w.into_inner()?)
}

pub fn execute(command: &Command, seed: Seed) -> Result<Output> {
    match command {
        Command::Simulate(Simulate::Golf(a)) => simulate_golf_cmd(a, seed),
        Command::Simulate(Simulate::Parking(a)) => simulate_parking_cmd(a, seed),
        Command::Simulate(Simulate::Line(a)) => simulate_line_cmd(a, seed),
        Command::Exact(e) => exact_cmd(e).map(Output::ok),
        Command::Verify(a) => verify_cmd(a),
        Command::Experiment(Experiment::Phase(a)) => phase_cmd(a, seed),
        Command::Experiment(Experiment::Sparse(a)) => {
            let r = sparse_case_check(a.balls, a.holes, a.n, a.trials, &a.strategy, seed)?;
            let note = format!("reject at 1%: {}", r.gof.reject_at_1pct);
            Ok(Output { bytes: to_json(&r)?, success: true, note: Some(note) })
        }
        Command::Experiment(Experiment::Parking(a)) => {
            let scan = parking_asymptotics_check(a.a, &a.ns, a.trials, &a.strategy, seed)?;
            let note = format!("band {:.4}, within band: {}", scan.band, scan.within_band);
            Ok(Output { bytes: to_csv(&scan.rows)?, success: true, note: Some(note) })
        }
        Command::Replay { .. } => bail!("replay cannot be nested"),
    }
}

fn simulate_golf_cmd(a: &GolfArgs, seed: Seed) -> Result<Output> {
    if a.trials == 0 {
        bail!("need at least one trial");
    }
    if a.trials == 1 {
        let mut rng = seed.rng();
        let config = sample_initial_cycle(a.n, a.balls, a.holes, &mut rng)?;
        let fs = if a.logged {
            let clocks = Clocks::sample(a.balls, a.strategy.needs_clock(), &mut rng);
            run_golf_logged(&config, &a.strategy, &clocks, &mut rng)?
        } else {
            simulate_golf(&config, &a.strategy, &mut rng)?
        };
        let blocks = if fs.remaining_holes.is_empty() { Vec::new() } else { fs.block_sizes()?.deltas };
        let doc = json!({
            "initial": config.to_string(),
            "strategy": a.strategy.to_string(),
            "final": fs,
            "blocks": blocks,
        });
        return Ok(Output::ok(to_json(&doc)?));
    }
    if a.logged {
        bail!("--logged needs a single trial");
    }
    let k = a.holes.checked_sub(a.balls).context("more balls than holes")?;
    if k == 0 {
        bail!("no hole remains when balls = holes, so there are no blocks");
    }
    let rows = try_run_trials(seed, a.trials, |_, rng| {
        let c = sample_initial_cycle(a.n, a.balls, a.holes, rng)?;
        simulate_golf(&c, &a.strategy, rng)?.block_sizes()
    })?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["trial".to_string()];
    header.extend((0..k).map(|i| format!("delta_{i}")));
    w.write_record(&header)?;
    for (t, b) in rows.iter().enumerate() {
        let mut rec = vec![t.to_string()];
        rec.extend(b.deltas.iter().map(usize::to_string));
        w.write_record(&rec)?;
    }
    Ok(Output::ok(w.into_inner()?))
}

#[derive(Serialize)]
struct ParkingSummary {
    n: usize,
    cars: usize,
    strategy: String,
    trials: usize,
    mean_max_block: f64,
    se_max_block: f64,
    median_max_block: f64,
}

fn simulate_parking_cmd(a: &ParkingArgs, seed: Seed) -> Result<Output> {
    if a.trials == 0 {
        bail!("need at least one trial");
    }
    let maxima = try_run_trials(seed, a.trials, |_, rng| {
        Ok(run_parking(a.n, a.cars, &a.strategy, rng)?.block_sizes()?.largest() as f64)
    })?;
    let s = summarize(&maxima);
    let mut sorted = maxima;
    sorted.sort_by(f64::total_cmp);
    let row = ParkingSummary {
        n: a.n,
        cars: a.cars,
        strategy: a.strategy.to_string(),
        trials: a.trials,
        mean_max_block: s.mean,
        se_max_block: if a.trials > 1 { s.se } else { 0.0 },
        median_max_block: quantile(&sorted, 0.5),
    };
    Ok(Output::ok(to_csv(&[row])?))
}

fn simulate_line_cmd(a: &LineArgs, seed: Seed) -> Result<Output> {
    let mut rng = seed.rng();
    let window = sample_line_window(a.db, a.dt, a.width, &mut rng)?;
    let report = find_window_separators(&window);
    let out = run_golf_line(&window, &a.strategy, &mut rng)?;
    let remaining: Vec<i64> = out.final_state.remaining_holes.iter().map(|&v| window.left + v as i64).collect();
    let doc = json!({
        "d_b": a.db,
        "d_t": a.dt,
        "window": window.to_text(),
        "separators": report.certified,
        "margins": report.margin,
        "resolved": [out.resolved.0, out.resolved.1],
        "remaining_holes": remaining,
        "filled_separators": out.filled_separators,
        "uncertified_balls": out.uncertified_balls,
    });
    Ok(Output::ok(to_json(&doc)?))
}

fn guard_support(n: usize, k: usize) -> Result<()> {
    let size = binomial(n, k);
    if size > MAX_SUPPORT.into() {
        bail!("instance too large: {size} candidate sets exceed the limit of {MAX_SUPPORT}");
    }
    Ok(())
}

fn exact_cmd(e: &Exact) -> Result<Vec<u8>> {
    match e {
        Exact::Cycle { n, balls, holes } => {
            guard_support(*n, holes.saturating_sub(*balls))?;
            to_json(&cycle_law(*n, *balls, *holes)?)
        }
        Exact::Parking { n, cars } => {
            guard_support(*n, n.saturating_sub(*cars))?;
            to_json(&parking_law(*n, *cars)?)
        }
        Exact::Multiball { multiplicity, convention } => {
            let config: MultiballConfig = multiplicity.parse()?;
            guard_support(config.n(), config.surplus().max(0) as usize)?;
            let conv = match convention {
                Convention::Closing => MultiballConvention::ClosingHoleCounted,
                Convention::Literal => MultiballConvention::Literal,
            };
            to_json(&multiball_law(config.n(), &config.census(), conv)?)
        }
        Exact::Zlaw { db, dt, index, max_b } => {
            let params = ZLawParams::new(*db, *dt)?;
            let mass = (0..=*max_b).map(|b| z_critical_block_law(params, *index, b)).collect::<Result<Vec<_>, _>>()?;
            let support: Vec<u64> = (0..=*max_b).map(|b| 2 * b).collect();
            to_json(&json!({ "d_b": db, "d_t": dt, "index": index, "support": support, "mass": mass }))
        }
        Exact::Zgeneral { db, dt, max_l } => {
            let mass = (0..=*max_l).map(|l| z_block0_law_general(*db, *dt, l)).collect::<Result<Vec<_>, _>>()?;
            let support: Vec<u64> = (0..=*max_l).collect();
            to_json(&json!({ "d_b": db, "d_t": dt, "index": 0, "support": support, "mass": mass }))
        }
        Exact::Sparse { balls, holes, x } => {
            let m = sparse_moments(*balls, *holes)?;
            let density = x.as_ref().map(|x| sparse_density(*balls, *holes, x)).transpose()?;
            to_json(&json!({
                "balls": balls,
                "holes": holes,
                "mean": m.mean,
                "second": m.second,
                "x": x,
                "density": density,
            }))
        }
    }
}

fn parse_walk(s: &str) -> Result<Strategy> {
    let s = s.trim();
    let strategy: Strategy = if s.contains(':') { s.parse()? } else { format!("pwalk:{s}").parse()? };
    Ok(strategy)
}

fn verify_cmd(a: &VerifyArgs) -> Result<Output> {
    let mut opts = VerifyOptions::new(a.max_n);
    if let Some(pair) = &a.p_pair {
        let parts: Vec<&str> = pair.split(',').collect();
        if parts.len() != 2 {
            bail!("--p-pair expects two values, e.g. 1/2,1/3");
        }
        opts = opts.with_p_pair(parse_walk(parts[0])?, parse_walk(parts[1])?)?;
    }
    opts.mutation = a.mutate.map(|m| match m {
        MutationArg::DropSurvivalFactor => Mutation::DropSurvivalFactor,
    });
    let report = run_verify(&opts)?;
    let note = report
        .first_counterexample()
        .map(|(name, msg)| format!("check failed: {name}\ncounterexample: {msg}"));
    Ok(Output { bytes: to_json(&report)?, success: report.passed(), note })
}

#[derive(Serialize)]
struct ProfileRow {
    trial: usize,
    block0: f64,
    largest: f64,
    second: f64,
}

fn phase_cmd(a: &PhaseArgs, seed: Seed) -> Result<Output> {
    let regime = match a.regime {
        RegimeArg::Linear => Regime::Linear(a.a),
        RegimeArg::Critical => Regime::Critical(a.lambda),
        RegimeArg::Super => Regime::Super,
        RegimeArg::Sub => Regime::Sub,
    };
    if let (RegimeArg::Critical, Some(n)) = (a.regime, a.n) {
        let p = critical_window_profile(a.lambda, n, a.trials, seed)?;
        let rows: Vec<ProfileRow> = p
            .sorted_blocks
            .iter()
            .zip(&p.block0)
            .enumerate()
            .map(|(trial, (b, &block0))| ProfileRow {
                trial,
                block0,
                largest: b[0],
                second: b.get(1).copied().unwrap_or(0.0),
            })
            .collect();
        let note = format!(
            "n_l={} chi-square {:.3} on {} dof (1% critical {:.3}), reject: {}",
            p.n_l, p.gof.statistic, p.gof.dof, p.gof.critical_1pct, p.gof.reject_at_1pct
        );
        return Ok(Output { bytes: to_csv(&rows)?, success: true, note: Some(note) });
    }
    let ns = match (&a.ns, a.n) {
        (Some(ns), _) => ns.clone(),
        (None, Some(n)) => vec![n],
        (None, None) => bail!("give --n or --ns"),
    };
    let spec = ScanSpec::new(regime, ns, a.trials, seed, a.strategy.clone())?;
    Ok(Output::ok(to_csv(&max_block_scan(&spec)?)?))
}
