use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::output::{csv, ensure_dir, line_chart, write_file, write_json, Series, SCHEMA_VERSION};
use super::{Command, Failure, FormArg, PsiArg, ScenarioFile, StageArg, SystemArg};
use crate::conservation::{conservation_drift, intrinsic_flow, psi_derived, psi_paper, CostFunctional, PsiSource};
use crate::dynamics::{
    draw_competition, run_recovery_pipeline, stage1_field, stage2_field, stage2_reduced_field, stage3_field,
    verify_competition, Competition, OutcomeReport, RecoveryStatus,
};
use crate::integrator::{integrate, EventRecord, Integration, IntegratorOptions};
use crate::kcc::{compare_bundles, InvariantsBundle};
use crate::model::{QuadraticSode, State};
use crate::production::{symbiosis_spray, SprayForm, TimeMap};

pub(super) fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Simulate { scenario, stage, out } => simulate(&scenario, stage, &out),
        Command::Pipeline { scenario, out } => pipeline(&scenario, &out),
        Command::Classify { k1, k2, mu1, mu2, verify, lambda, f1, f2, horizon, sweep, seed, margin } => {
            let opts = IntegratorOptions::default().with_span(0.0, horizon);
            match sweep {
                Some(count) => classify_sweep(count, seed, margin, (f1, f2), &opts),
                None => {
                    let c = Competition {
                        lambda,
                        k1: k1.unwrap_or_default(),
                        k2: k2.unwrap_or_default(),
                        mu1: mu1.unwrap_or_default(),
                        mu2: mu2.unwrap_or_default(),
                    };
                    classify(&c, verify, (f1, f2), &opts)
                }
            }
        }
        Command::Invariants { scenario, system, form, gamma, out } => {
            invariants(scenario.as_deref(), system, form, gamma.as_deref(), &out)
        }
        Command::Conservation { scenario, psi, out } => conservation(&scenario, psi, &out),
        Command::Compare { a, b, map, tol, out } => compare(&a, &b, map.as_deref(), tol, out.as_deref()),
    }
}

const SPECIES: [&str; 3] = ["N", "A1", "A2"];

#[derive(Serialize)]
struct EventOut {
    species: &'static str,
    time: f64,
    direction: crate::integrator::Crossing,
}

fn events_out(events: &[EventRecord], names: &[&'static str]) -> Vec<EventOut> {
    events.iter().map(|e| EventOut { species: names[e.species], time: e.time, direction: e.direction }).collect()
}

fn trajectory_rows(run: &Integration, prefix: &[f64]) -> Vec<Vec<f64>> {
    run.trajectory
        .times()
        .iter()
        .zip(run.trajectory.states())
        .map(|(t, s)| {
            let mut row = vec![*t];
            row.extend_from_slice(prefix);
            row.extend_from_slice(&s.populations);
            row
        })
        .collect()
}

fn species_chart(title: &str, times: &[f64], columns: &[(&str, Vec<f64>)]) -> String {
    let series: Vec<Series> = columns.iter().map(|(label, y)| Series { label, x: times, y }).collect();
    line_chart(title, "t", &series)
}

fn simulate(path: &Path, stage: StageArg, out: &Path) -> Result<(), Failure> {
    let file = ScenarioFile::load(path)?;
    let sc = file.stage_scenario();
    let [n0, a10, a20] = sc.initial;
    let (field, y0, names, duration, label): (_, Vec<f64>, Vec<&'static str>, f64, &str) = match stage {
        StageArg::One => (stage1_field(&sc)?, vec![n0, a10, a20], SPECIES.to_vec(), sc.durations[0], "1"),
        StageArg::Two => {
            sc.validate_recovery()?;
            (stage2_field(&sc)?, vec![n0, a10, a20], SPECIES.to_vec(), sc.durations[1], "2")
        }
        StageArg::TwoReduced => (stage2_reduced_field(&sc)?, vec![a10, a20], vec!["A1", "A2"], sc.durations[1], "2r"),
        StageArg::Three => (stage3_field(&sc)?, vec![n0, a20], vec!["N", "A2"], sc.durations[2], "3"),
    };
    let run = integrate(&field, &State::new(y0), &file.options().with_span(0.0, duration))?;

    ensure_dir(out)?;
    let mut header = vec!["time"];
    header.extend(&names);
    let comment = format!("stage {label}; columns: time, then population of {}", names.join(", "));
    write_file(&out.join("trajectory.csv"), &csv(&comment, &header, &trajectory_rows(&run, &[])))?;
    write_json(
        &out.join("events.json"),
        &json!({
            "schema_version": SCHEMA_VERSION,
            "stage": label,
            "events": events_out(&run.events, &names),
            "stopped_at": run.stopped_at,
        }),
    )?;
    let cols: Vec<(&str, Vec<f64>)> = names.iter().enumerate().map(|(i, n)| (*n, run.trajectory.population(i))).collect();
    write_file(&out.join("trajectory.svg"), &species_chart(&format!("stage {label}"), run.trajectory.times(), &cols))?;
    Ok(())
}

fn pipeline(path: &Path, out: &Path) -> Result<(), Failure> {
    let file = ScenarioFile::load(path)?;
    let sc = file.stage_scenario();
    let res = run_recovery_pipeline(&sc, &file.options())?;

    let mut rows = trajectory_rows(&res.stage1, &[1.0]);
    rows.extend(trajectory_rows(&res.stage2, &[2.0]));
    // stage III carries (N, A2); A1 is absent and written as 0
    rows.extend(trajectory_rows(&res.stage3, &[3.0]).into_iter().map(|r| vec![r[0], r[1], r[2], 0.0, r[3]]));

    let mut events = events_out(&res.stage1.events, &SPECIES);
    events.extend(events_out(&res.stage2.events, &SPECIES));
    events.extend(events_out(&res.stage3.events, &["N", "A2"]));

    let recovered = match res.status {
        RecoveryStatus::Recovered => "yes",
        RecoveryStatus::Failed => "no",
        RecoveryStatus::Undecided => "undecided",
    };
    let fin = &res.final_state().populations;

    ensure_dir(out)?;
    write_file(
        &out.join("trajectory.csv"),
        &csv(
            "columns: time, stage (1-3), N, A1, A2; A1 is written as 0 during stage 3",
            &["time", "stage", "N", "A1", "A2"],
            &rows,
        ),
    )?;
    write_json(&out.join("events.json"), &json!({ "schema_version": SCHEMA_VERSION, "events": events }))?;
    write_json(
        &out.join("report.json"),
        &json!({
            "schema_version": SCHEMA_VERSION,
            "recovered": recovered,
            "status": res.status,
            "a1_extinction_time": res.a1_extinction,
            "stage_starts": res.stage_starts,
            "final_state": { "N": fin[0], "A2": fin[1] },
            "equilibrium": res.equilibrium.map(|(n, a)| json!({ "N": n, "A2": a })),
        }),
    )?;
    let times: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let col = |i: usize| rows.iter().map(|r| r[i]).collect::<Vec<f64>>();
    write_file(
        &out.join("trajectory.svg"),
        &species_chart("recovery pipeline", &times, &[("N", col(2)), ("A1", col(3)), ("A2", col(4))]),
    )?;
    println!("recovered: {recovered}");
    if let Some(t) = res.a1_extinction {
        println!("A1 extinct at t = {t}");
    }
    Ok(())
}

fn classify(c: &Competition, verify: bool, fractions: (f64, f64), opts: &IntegratorOptions) -> Result<(), Failure> {
    let outcome = c.classify()?;
    if !verify {
        println!("{}", serde_json::to_string(&outcome).expect("enum serializes"));
        return Ok(());
    }
    let report = verify_competition(c, fractions.0 * c.k1, fractions.1 * c.k2, opts)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({ "schema_version": SCHEMA_VERSION, "competition": c, "report": report }))
            .expect("report serializes")
    );
    Ok(())
}

/// Worker count from `VH_REEF_THREADS`; 0 or unset means automatic.
fn sweep_threads() -> Result<usize, Failure> {
    match std::env::var("VH_REEF_THREADS") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Validation(format!("VH_REEF_THREADS = {v:?} is not a count"))),
        Err(_) => Ok(0),
    }
}

fn classify_sweep(count: usize, seed: u64, margin: f64, fr: (f64, f64), opts: &IntegratorOptions) -> Result<(), Failure> {
    if !(margin > 0.0 && margin < 0.8) {
        return Err(Failure::Validation("margin must lie in (0, 0.8)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<Competition> = (0..count).map(|_| draw_competition(&mut rng, margin)).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sweep_threads()?)
        .build()
        .map_err(|e| Failure::Validation(e.to_string()))?;
    let reports: Vec<Result<OutcomeReport, Failure>> = pool.install(|| {
        draws
            .par_iter()
            .map(|c| verify_competition(c, fr.0 * c.k1, fr.1 * c.k2, opts).map_err(Failure::from))
            .collect()
    });
    let mut disagreements = Vec::new();
    for (i, (c, r)) in draws.iter().zip(reports).enumerate() {
        let r = r?;
        if !r.agree {
            disagreements.push(json!({ "draw": i, "competition": c, "predicted": r.predicted, "observed": r.observed }));
        }
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "schema_version": SCHEMA_VERSION,
            "seed": seed,
            "draws": count,
            "margin": margin,
            "agreed": count - disagreements.len(),
            "disagreements": disagreements,
        }))
        .expect("summary serializes")
    );
    Ok(())
}

const INDEX_ORDER: &str = "row-major; epsilon[i][m][n]: eps^i = sum epsilon[i][m][n] v^m v^n; \
deviation_curvature[i][j][m][n]: P^i_j = sum p[i][j][m][n] v^m v^n; \
third[i][j][k][m]: R^i_jk = sum third[i][j][k][m] v^m; fourth[i][j][k][l] = B^i_jkl";

#[derive(Serialize, Deserialize)]
struct InvariantsFile {
    schema_version: u32,
    system: String,
    index_order: String,
    gamma: Vec<Vec<Vec<f64>>>,
    bundle: InvariantsBundle,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GammaFile {
    gamma: Vec<Vec<Vec<f64>>>,
}

fn spray_form(form: FormArg) -> SprayForm {
    match form {
        FormArg::Printed => SprayForm::Printed,
        FormArg::Derived => SprayForm::Derived,
    }
}

fn invariants(
    scenario: Option<&Path>,
    system: SystemArg,
    form: FormArg,
    gamma: Option<&Path>,
    out: &Path,
) -> Result<(), Failure> {
    let need_scenario = || scenario.ok_or_else(|| Failure::Validation("this system needs a scenario file".into()));
    let form = spray_form(form);
    let (sode, name) = match system {
        SystemArg::Stage1 => {
            let p = ScenarioFile::load(need_scenario()?)?.params;
            (symbiosis_spray(form, p.lambda, p.k, p.k1, p.delta, p.delta1)?, format!("stage1 ({form:?})"))
        }
        SystemArg::Stage3 => {
            let p = ScenarioFile::load(need_scenario()?)?.params;
            (symbiosis_spray(form, p.lambda, p.k, p.k2, p.delta, p.delta2)?, format!("stage3 ({form:?})"))
        }
        SystemArg::File => {
            let path = gamma.ok_or_else(|| Failure::Validation("--system file needs --gamma".into()))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?;
            let g: GammaFile = serde_json::from_str(&text).map_err(|e| Failure::Validation(format!("gamma file: {e}")))?;
            (QuadraticSode::from_nested(&g.gamma)?, format!("file {}", path.display()))
        }
    };
    ensure_dir(out)?;
    let file = InvariantsFile {
        schema_version: SCHEMA_VERSION,
        system: name,
        index_order: INDEX_ORDER.into(),
        gamma: sode.to_nested(),
        bundle: InvariantsBundle::for_sode(&sode),
    };
    write_json(&out.join("invariants.json"), &file)
}

fn read_bundle(path: &Path) -> Result<InvariantsBundle, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?;
    let f: InvariantsFile =
        serde_json::from_str(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    Ok(f.bundle)
}

fn parse_map(map: Option<&str>, n: usize) -> Result<Vec<usize>, Failure> {
    match map {
        None => Ok((0..n).collect()),
        Some(s) => s
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| Failure::Validation(format!("bad --map entry {p:?}"))))
            .collect(),
    }
}

fn compare(a: &Path, b: &Path, map: Option<&str>, tol: f64, out: Option<&Path>) -> Result<(), Failure> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Failure::Validation("--tol must be a finite non-negative number".into()));
    }
    let (ba, bb) = (read_bundle(a)?, read_bundle(b)?);
    let map = parse_map(map, ba.dimension)?;
    let report = compare_bundles(&ba, &bb, &map, tol)?;
    let doc = json!({ "schema_version": SCHEMA_VERSION, "map": map, "report": report });
    println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
    if let Some(dir) = out {
        ensure_dir(dir)?;
        write_json(&dir.join("equivalence.json"), &doc)?;
    }
    Ok(())
}

fn conservation(path: &Path, psi: Option<PsiArg>, out: &Path) -> Result<(), Failure> {
    let file = ScenarioFile::load(path)?;
    let params = file.psi_params();
    let psi = psi.unwrap_or(match file.psi {
        PsiSource::Paper => PsiArg::Paper,
        PsiSource::Derived => PsiArg::Derived,
    });
    let sources: &[PsiSource] = match psi {
        PsiArg::Paper => &[PsiSource::Paper],
        PsiArg::Derived => &[PsiSource::Derived],
        PsiArg::Both => &[PsiSource::Paper, PsiSource::Derived],
    };
    let span = file.stages.conservation_span;
    let sode = params.spray(SprayForm::Printed)?;
    let traj = intrinsic_flow(&sode, params.lambda, [file.initial.n0, file.initial.a10], span, &file.options())?;

    let mut results = Vec::new();
    let mut series = Vec::new();
    for &src in sources {
        let (l, k, k1, d, d1) = (params.lambda, params.k, params.k1, params.delta, params.delta1);
        let c = match src {
            PsiSource::Paper => psi_paper(l, k, k1, d, d1),
            PsiSource::Derived => psi_derived(l, k, k1, d, d1),
        };
        let rep = conservation_drift(&traj, &CostFunctional::new(l, c, src)?)?;
        results.push(json!({ "source": src, "c_x": c.0, "c_y": c.1, "max_rel_drift": rep.max_rel_drift }));
        series.push((src, rep.series));
    }
    let tm = TimeMap::new(params.lambda)?;
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "params": params,
        "flow": "printed",
        "t_span": [0.0, span],
        "s_span": [tm.to_s(0.0), tm.to_s(span)],
        "results": results,
    });
    if psi == PsiArg::Both {
        let (dp, dd) = (results[0]["max_rel_drift"].as_f64(), results[1]["max_rel_drift"].as_f64());
        let (dp, dd) = (dp.unwrap_or(f64::NAN), dd.unwrap_or(f64::NAN));
        doc["flagged"] = json!(dp.max(dd) > crate::conservation::DRIFT_FLAG_RATIO * dp.min(dd));
        doc["k1_structural_difference"] = json!(params.k1 != params.k);
        doc["note"] = json!(if params.k1 != params.k {
            "K1 differs from K: the published coefficients do not involve K1, the derived ones do"
        } else {
            "K1 equals K"
        });
    }

    ensure_dir(out)?;
    write_json(&out.join("conservation.json"), &doc)?;
    let s = traj.times();
    let mut header = vec!["s"];
    header.extend(series.iter().map(|(src, _)| match src {
        PsiSource::Paper => "F_paper",
        PsiSource::Derived => "F_derived",
    }));
    let rows: Vec<Vec<f64>> =
        (0..s.len()).map(|j| std::iter::once(s[j]).chain(series.iter().map(|(_, f)| f[j])).collect()).collect();
    write_file(&out.join("F.csv"), &csv("columns: intrinsic time s, then F for each psi", &header, &rows))?;
    let normalized: Vec<(String, Vec<f64>)> = series
        .iter()
        .map(|(src, f)| (format!("{src:?} F/F0"), f.iter().map(|v| v / f[0]).collect()))
        .collect();
    let plots: Vec<Series> = normalized.iter().map(|(l, y)| Series { label: l, x: s, y }).collect();
    write_file(&out.join("F.svg"), &line_chart("production cost along the flow", "s", &plots))?;
    for r in &results {
        println!("{}: max_rel_drift = {}", r["source"].as_str().unwrap_or("?"), r["max_rel_drift"]);
    }
    Ok(())
}
