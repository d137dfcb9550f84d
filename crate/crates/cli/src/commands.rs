use std::fs::File;
use std::io::{BufReader, Write};

use anyhow::{bail, Context, Result};
use log::{error, info, warn};
use popsi::baselines::{run_variant_with, BaselineSpec, EvalSplit, PopsiVariant, Registry, VariantParams};
use popsi::data::{build_tensor, item_popularity, parse_interactions, split_holdout, HoldoutSets};
use popsi::metrics::{evaluate as evaluate_scorer, EvalReport, RunMeta};
use popsi::model::{fit as fit_model, fit_logged};
use serde_json::json;

use crate::config::RunConfig;
use crate::workspace::{self as ws, Workspace};

pub fn ingest(cfg: &mut RunConfig) -> Result<()> {
    let input = cfg.input.clone().context("ingest needs --input")?;
    let file = File::open(&input).with_context(|| format!("opening {}", input.display()))?;
    let explicit = (!cfg.behaviors.is_empty()).then(|| cfg.labels());
    let outcome = parse_interactions(BufReader::new(file), &cfg.schema(), explicit.as_deref())?;
    if outcome.records.is_empty() {
        return Err(popsi::Error::NoRecords.into());
    }
    if !outcome.records.iter().any(|r| r.behavior == cfg.target_behavior) {
        bail!("target behavior `{}` does not occur in {}", cfg.target_behavior, input.display());
    }
    let labels = explicit.unwrap_or_else(|| {
        let mut labels = vec![cfg.target_behavior.clone()];
        for r in &outcome.records {
            if !labels.contains(&r.behavior) {
                labels.push(r.behavior.clone());
            }
        }
        labels
    });
    let (tensor, users, items) = build_tensor(&outcome.records, &labels)?;
    cfg.behaviors = labels;

    let dir = Workspace::create(&cfg.out)?;
    dir.write_tensor(ws::TENSOR, &tensor)?;
    dir.write_lines(ws::USERS, users.tokens().iter().map(String::as_str))?;
    dir.write_lines(ws::ITEMS, items.tokens().iter().map(String::as_str))?;
    dir.write_lines(ws::BEHAVIORS, tensor.labels().iter().map(String::as_str))?;

    let (m1, m2, _) = tensor.dims();
    let behaviors: Vec<_> = tensor
        .labels()
        .iter()
        .zip(tensor.slices())
        .map(|(label, x)| json!({ "label": label, "interactions": x.nnz() }))
        .collect();
    let stats = json!({
        "users": m1,
        "items": m2,
        "behaviors": behaviors,
        "target_behavior": cfg.target_behavior,
        "target_density_percent": 100.0 * tensor.target().nnz() as f64 / (m1 * m2) as f64,
        "records": outcome.records.len(),
        "malformed_lines": outcome.malformed,
        "unknown_behavior_lines": outcome.unknown_behavior,
        "warnings": outcome.warnings(),
    });
    dir.write_string(ws::STATS, &(serde_json::to_string_pretty(&stats)? + "\n"))?;
    cfg.save(&dir.path(ws::CONFIG))?;

    println!(
        "ingested {} records: {m1} users, {m2} items, {} behaviors, {} warning(s)",
        outcome.records.len(),
        tensor.labels().len(),
        outcome.warnings()
    );
    Ok(())
}

pub fn fit(cfg: &RunConfig) -> Result<()> {
    let dir = Workspace::create(&cfg.out)?;
    let tensor = dir.read_tensor(ws::TENSOR)?;
    let data = split_holdout(&tensor, &cfg.split_spec()?)?;
    dir.write_tensor(ws::TRAIN, &data.train)?;
    dir.write_holdout(ws::VAL, &data.val_positives)?;
    dir.write_holdout(ws::TEST, &data.test_positives)?;

    let (model, log) = fit_logged(&data.train, &cfg.fit_config()).context("fit failed")?;
    dir.write_model(&model)?;
    let log = format!("{log}p = {}\nseed = {}\n", cfg.p, cfg.seed);
    dir.write_string(ws::FIT_LOG, &log)?;
    cfg.save(&dir.path(ws::CONFIG))?;
    print!("{log}");
    Ok(())
}

fn load_holdout(dir: &Workspace) -> Result<HoldoutSets> {
    let train = dir.read_tensor(ws::TRAIN)?;
    let val_positives = dir.read_holdout(ws::VAL)?;
    let test_positives = dir.read_holdout(ws::TEST)?;
    for positives in [&val_positives, &test_positives] {
        if positives.len() != train.users() {
            return Err(popsi::Error::DimensionMismatch {
                context: "users in holdout vs training tensor",
                expected: train.users(),
                found: positives.len(),
            }
            .into());
        }
    }
    Ok(HoldoutSets { train, val_positives, test_positives })
}

pub fn evaluate(cfg: &RunConfig, split: EvalSplit, variant: Option<&str>) -> Result<()> {
    let dir = Workspace::new(&cfg.out);
    let data = load_holdout(&dir)?;
    let (report, file) = match variant {
        Some(name) => {
            let spec: BaselineSpec = name.parse()?;
            let params = VariantParams { fit: cfg.fit_config(), ks: cfg.k.clone(), split, exclude_train: true };
            let report = run_variant_with(&Registry::builtin(), &spec, &data, &params)?;
            (report, format!("report_{name}.json"))
        }
        None => {
            let model = dir.read_model()?;
            let train = &data.train;
            if (model.users(), model.items()) != (train.users(), train.items()) {
                let (expected, found, context) = if model.users() != train.users() {
                    (train.users(), model.users(), "users in model vs data")
                } else {
                    (train.items(), model.items(), "items in model vs data")
                };
                return Err(popsi::Error::DimensionMismatch { context, expected, found }.into());
            }
            let positives = match split {
                EvalSplit::Validation => &data.val_positives,
                EvalSplit::Test => &data.test_positives,
            };
            let pop = item_popularity(train.target());
            let metrics = evaluate_scorer(&model, positives, Some(train.target()), &pop, &cfg.k)?;
            let config = RunMeta {
                variant: PopsiVariant::from_flags(model.use_si, model.use_pop).name.to_string(),
                r: model.rank(),
                p: model.popular_fraction,
                use_si: model.use_si,
                use_pop: model.use_pop,
                seed: cfg.seed,
            };
            (EvalReport { metrics, config }, ws::REPORT.to_string())
        }
    };
    let json = report.to_json_string();
    dir.write_string(&file, &json)?;
    print!("{json}");
    Ok(())
}

/// Prints recommendations; returns `false` if any user could not be served.
pub fn recommend(cfg: &RunConfig, users: &[String]) -> Result<bool> {
    let dir = Workspace::new(&cfg.out);
    let model = dir.read_model()?;
    let user_index = dir.read_index(ws::USERS)?;
    let item_index = dir.read_index(ws::ITEMS)?;
    let train = dir.read_tensor(ws::TRAIN)?;
    if model.users() != user_index.len() || model.items() != item_index.len() {
        bail!(
            "model is {}x{} but the index files list {} users and {} items",
            model.users(),
            model.items(),
            user_index.len(),
            item_index.len()
        );
    }
    let k = cfg.k[0];
    let mut ok = true;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for token in users {
        let Some(u) = user_index.get(token) else {
            writeln!(out, "ERR unknown user {token}")?;
            ok = false;
            continue;
        };
        let list = model.top_k(u, k, train.target().row(u).0)?;
        if list.short {
            warn!("user {token}: only {} of {k} requested items are available", list.items.len());
        }
        for (v, score) in list.items.iter().zip(&list.scores) {
            writeln!(out, "{token}\t{}\t{score:.6}", item_index.token(*v).unwrap_or("?"))?;
        }
    }
    Ok(ok)
}

struct GridPoint {
    param: &'static str,
    value: String,
    config: RunConfig,
}

fn grid(cfg: &RunConfig, ranks: &[usize], fractions: &[f64]) -> Vec<GridPoint> {
    let mut points = Vec::new();
    let mut seen_r = Vec::new();
    for &r in ranks {
        if !seen_r.contains(&r) {
            seen_r.push(r);
            points.push(GridPoint { param: "r", value: r.to_string(), config: RunConfig { r, ..cfg.clone() } });
        }
    }
    let mut seen_p: Vec<f64> = Vec::new();
    for &p in fractions {
        if !seen_p.contains(&p) {
            seen_p.push(p);
            points.push(GridPoint { param: "p", value: p.to_string(), config: RunConfig { p, ..cfg.clone() } });
        }
    }
    points
}

pub fn sweep(cfg: &RunConfig, ranks: &[usize], fractions: &[f64], split: EvalSplit) -> Result<()> {
    let points = grid(cfg, ranks, fractions);
    if points.is_empty() {
        bail!("sweep grid is empty: pass --sweep-r and/or --sweep-p");
    }
    let dir = Workspace::new(&cfg.out);
    let tensor = dir.read_tensor(ws::TENSOR)?;
    let data = split_holdout(&tensor, &cfg.split_spec()?)?;
    let positives = match split {
        EvalSplit::Validation => &data.val_positives,
        EvalSplit::Test => &data.test_positives,
    };
    let pop = item_popularity(data.train.target());
    let mut ks = cfg.k.clone();
    if !ks.contains(&50) {
        ks.push(50);
    }

    let run = |point: &GridPoint| -> Result<(f64, Option<f64>)> {
        point.config.validate()?;
        let model = fit_model(&data.train, &point.config.fit_config())?;
        let eval = evaluate_scorer(&model, positives, Some(data.train.target()), &pop, &ks)?;
        Ok((eval.ndcg[&50], eval.pri))
    };
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut results = Vec::with_capacity(points.len());
    for chunk in points.chunks(workers) {
        std::thread::scope(|s| {
            let handles: Vec<_> = chunk.iter().map(|p| s.spawn(|| run(p))).collect();
            results.extend(handles.into_iter().map(|h| h.join().expect("sweep worker panicked")));
        });
    }

    let mut csv = String::from("param,value,ndcg_at_50,pri\n");
    let mut failures = 0;
    for (point, result) in points.iter().zip(results) {
        match result {
            Ok((ndcg, pri)) => {
                info!("{}={}: ndcg@50 {ndcg:.4}", point.param, point.value);
                let pri = pri.map(|v| v.to_string()).unwrap_or_default();
                csv.push_str(&format!("{},{},{ndcg},{pri}\n", point.param, point.value));
            }
            Err(e) => {
                error!("{}={}: {e:#}", point.param, point.value);
                failures += 1;
                csv.push_str(&format!("{},{},,\n", point.param, point.value));
            }
        }
    }
    dir.write_string(ws::SWEEP, &csv)?;
    print!("{csv}");
    if failures == points.len() {
        bail!("every sweep point failed");
    }
    Ok(())
}
