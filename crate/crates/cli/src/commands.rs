use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use dimest::autoencoder::Activation;
use dimest::data::{
    load_mnist_idx, load_prices_csv, regime_price_panel, sliding_windows, write_prices_csv, MnistSet, Regime,
    WindowSpec,
};
use dimest::pca::{fit_pca, reconstruction_error_curve, scree};
use dimest::{DataMatrix, Error, Result, Rule, Share};

use crate::estimate::{estimate, is_run_failure, EstimateOpts, Method, Outcome};
use crate::report::{report_path, summary_row, Failure, History, ResultRow, RunReport};
use crate::seeds::{derive, SUBSET, TRAIN};
use crate::{AeArgs, DeMnistArgs, DeTimeseriesArgs, LambdaSweepArgs, MnistArgs, ReconArgs, RuleArgs, ScreeArgs,
    SynthPricesArgs, WidthSweepArgs};

fn params<T: Serialize>(args: &T) -> BTreeMap<String, serde_json::Value> {
    match serde_json::to_value(args) {
        Ok(serde_json::Value::Object(map)) => map.into_iter().collect(),
        _ => BTreeMap::new(),
    }
}

fn existing(path: &Path) -> PathBuf {
    if path.exists() {
        return path.to_path_buf();
    }
    let mut gz = path.as_os_str().to_owned();
    gz.push(".gz");
    let gz = PathBuf::from(gz);
    if gz.exists() {
        gz
    } else {
        path.to_path_buf()
    }
}

fn load_mnist(a: &MnistArgs) -> Result<MnistSet> {
    load_mnist_idx(existing(&a.mnist_images), existing(&a.mnist_labels))
}

fn create(out: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(out)?))
}

fn csv_writer(out: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(create(out)?))
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(e.into())
}

fn json_line<W: Write, T: Serialize>(w: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer(&mut *w, value).map_err(std::io::Error::other)?;
    w.write_all(b"\n")?;
    Ok(())
}

fn finish(mut report: RunReport, out: &Path, started: Instant) -> Result<RunReport> {
    report.wall_time_seconds = started.elapsed().as_secs_f64();
    report.write(&report_path(out))?;
    Ok(report)
}

fn opts(rules: &RuleArgs, ae: &AeArgs, center: bool, neighbors: usize, lambda: f64, output: Activation) -> EstimateOpts {
    EstimateOpts {
        gte_threshold: rules.threshold_gte,
        cum_threshold: rules.threshold_cum,
        share: rules.cum_share.into(),
        center,
        neighbors,
        lambda,
        epochs: ae.epochs,
        steps: ae.steps,
        batch_size: ae.batch_size,
        learning_rate: ae.learning_rate,
        optimizer: ae.optimizer,
        output,
    }
}

fn cumulative_name(share: Share) -> &'static str {
    Rule::cumulative(share).name()
}

/// Draws a digit subset, plus a disjoint probe batch of the same size when
/// `holdout` is set.
fn draw(set: &MnistSet, digit: u8, samples: usize, holdout: bool, seed: u64) -> Result<(DataMatrix, Option<DataMatrix>)> {
    if !holdout {
        return Ok((set.digit_subset(digit, samples, seed)?, None));
    }
    let both = set.digit_subset(digit, 2 * samples, seed)?;
    let first: Vec<usize> = (0..samples).collect();
    let second: Vec<usize> = (samples..2 * samples).collect();
    Ok((both.select_rows(&first)?, Some(both.select_rows(&second)?)))
}

struct Run {
    seed: u64,
    outcome: Result<Outcome>,
}

/// Folds repeated runs into two summary rows. Run-level failures are
/// recorded and skipped; any other error aborts the command.
fn aggregate(label: &str, runs: Vec<Run>, share: Share, report: &mut RunReport) -> Result<[ResultRow; 2]> {
    let (mut gte, mut cum, mut failures) = (Vec::new(), Vec::new(), 0);
    for run in runs {
        match run.outcome {
            Ok(o) => {
                gte.push(o.gte as f64);
                cum.push(o.cumulative as f64);
                if let Some(loss) = o.history {
                    report.histories.push(History {
                        label: label.to_string(),
                        seed: run.seed,
                        loss,
                    });
                }
            }
            Err(e) if is_run_failure(&e) => {
                failures += 1;
                report.failures.push(Failure {
                    label: label.to_string(),
                    seed: run.seed,
                    error: e.to_string(),
                });
            }
            Err(e) => return Err(e),
        }
    }
    let rows = [
        summary_row(label.to_string(), Rule::GteFraction.name(), gte, failures),
        summary_row(label.to_string(), cumulative_name(share), cum, failures),
    ];
    report.results.extend(rows.iter().cloned());
    Ok(rows)
}

fn write_summary<W: Write>(w: &mut csv::Writer<W>, key: &str, method: Method, row: &ResultRow) -> Result<()> {
    let fmt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
    w.write_record([
        key,
        method.name(),
        row.rule.as_str(),
        &fmt(row.value),
        &fmt(row.std_dev),
        &row.count.to_string(),
        &row.failures.to_string(),
    ])
    .map_err(csv_io)
}

/// Subset seed shared by the single-subset commands and repeat 0 of `de-mnist`.
fn first_subset_seed(seed: u64, digit: u8) -> u64 {
    derive(seed, &[u64::from(digit), 0, SUBSET])
}

pub fn cmd_pca_scree(a: &ScreeArgs, argv: Vec<String>) -> Result<RunReport> {
    let started = Instant::now();
    let set = load_mnist(&a.mnist)?;
    let x = set.digit_subset(a.digit, a.samples, first_subset_seed(a.seed, a.digit))?;
    let data = scree(&fit_pca(&x, a.center)?)?;
    let mut w = csv_writer(&a.out)?;
    w.write_record(["index", "normalized_variance"]).map_err(csv_io)?;
    for (i, v) in data.normalized_variance.iter().enumerate() {
        w.write_record([(i + 1).to_string(), v.to_string()]).map_err(csv_io)?;
    }
    w.flush()?;
    let mut report = RunReport::new("scree", argv, params(a));
    report.results.push(ResultRow {
        label: format!("digit={}", a.digit),
        rule: "normalized_variance".into(),
        value: None,
        std_dev: None,
        count: data.normalized_variance.len(),
        failures: 0,
        series: data.normalized_variance,
    });
    finish(report, &a.out, started)
}

pub fn cmd_recon_curve(a: &ReconArgs, argv: Vec<String>) -> Result<RunReport> {
    let started = Instant::now();
    let set = load_mnist(&a.mnist)?;
    let x = set.digit_subset(a.digit, a.samples, first_subset_seed(a.seed, a.digit))?;
    let model = fit_pca(&x, a.center)?;
    let ks: Vec<usize> = if a.ks.is_empty() {
        (1..=model.svd().rank_bound()).collect()
    } else {
        a.ks.clone()
    };
    let curve = reconstruction_error_curve(&model, &x, &ks)?;
    let mut w = csv_writer(&a.out)?;
    w.write_record(["k", "relative_error"]).map_err(csv_io)?;
    for (k, e) in &curve {
        w.write_record([k.to_string(), e.to_string()]).map_err(csv_io)?;
    }
    w.flush()?;
    let mut report = RunReport::new("recon", argv, params(a));
    report.results.push(ResultRow {
        label: format!("digit={}", a.digit),
        rule: "relative_error".into(),
        value: None,
        std_dev: None,
        count: curve.len(),
        failures: 0,
        series: curve.iter().map(|c| c.1).collect(),
    });
    finish(report, &a.out, started)
}

pub fn cmd_de_mnist(a: &DeMnistArgs, argv: Vec<String>) -> Result<RunReport> {
    let started = Instant::now();
    if a.repeats == 0 {
        return Err(Error::Argument("repeats must be positive".into()));
    }
    let set = load_mnist(&a.mnist)?;
    let o = opts(&a.rules, &a.ae, a.center, a.neighbors, a.lambda, Activation::Sigmoid);
    let mut report = RunReport::new("de-mnist", argv, params(a));
    let mut w = csv_writer(&a.out)?;
    w.write_record(["digit", "method", "rule", "mean", "std_dev", "count", "failures"]).map_err(csv_io)?;
    for &digit in &a.digits {
        let runs: Vec<Run> = (0..a.repeats as u64)
            .into_par_iter()
            .map(|r| {
                let d = u64::from(digit);
                let seed = derive(a.seed, &[d, r, TRAIN]);
                let outcome = draw(&set, digit, a.samples, a.holdout, derive(a.seed, &[d, r, SUBSET]))
                    .and_then(|(x, probe)| estimate(a.method, &x, probe.as_ref(), &o, seed));
                Run { seed, outcome }
            })
            .collect();
        for row in aggregate(&format!("digit={digit}"), runs, o.share, &mut report)? {
            write_summary(&mut w, &digit.to_string(), a.method, &row)?;
        }
    }
    w.flush()?;
    finish(report, &a.out, started)
}

pub fn cmd_width_sweep(a: &WidthSweepArgs, argv: Vec<String>) -> Result<RunReport> {
    let started = Instant::now();
    if a.repeats == 0 {
        return Err(Error::Argument("repeats must be positive".into()));
    }
    let set = load_mnist(&a.mnist)?;
    let o = opts(&a.rules, &a.ae, a.center, a.neighbors, a.lambda, Activation::Sigmoid);
    let mut report = RunReport::new("width-sweep", argv, params(a));
    let mut w = csv_writer(&a.out)?;
    w.write_record(["width", "method", "rule", "mean", "std_dev", "count", "failures"]).map_err(csv_io)?;
    for &width in &a.widths {
        let runs: Vec<Run> = (0..a.repeats as u64)
            .into_par_iter()
            .map(|r| {
                let key = [u64::from(a.digit), width as u64, r];
                let seed = derive(a.seed, &[key[0], key[1], key[2], TRAIN]);
                let outcome = draw(&set, a.digit, width, a.holdout, derive(a.seed, &[key[0], key[1], key[2], SUBSET]))
                    .and_then(|(x, probe)| estimate(a.method, &x, probe.as_ref(), &o, seed));
                Run { seed, outcome }
            })
            .collect();
        for row in aggregate(&format!("width={width}"), runs, o.share, &mut report)? {
            write_summary(&mut w, &width.to_string(), a.method, &row)?;
        }
    }
    w.flush()?;
    finish(report, &a.out, started)
}

#[derive(Serialize)]
struct LambdaLine<'a> {
    lambda: f64,
    seed: u64,
    svp: &'a [f64],
    gte: usize,
    cumulative: usize,
    final_loss: Option<f64>,
}

pub fn cmd_lambda_sweep(a: &LambdaSweepArgs, argv: Vec<String>) -> Result<RunReport> {
    let started = Instant::now();
    if a.lambdas.is_empty() {
        return Err(Error::Argument("at least one lambda is required".into()));
    }
    let (x, output) = match &a.prices {
        Some(path) => {
            let panel = load_prices_csv(path)?;
            let spec = WindowSpec { width: a.window, stride: 1 };
            let last = sliding_windows(&panel, spec)?.pop().expect("at least one window").1;
            (last, Activation::Tanh)
        }
        None => {
            let set = load_mnist(&a.mnist)?;
            (set.digit_subset(a.digit, a.samples, first_subset_seed(a.seed, a.digit))?, Activation::Sigmoid)
        }
    };
    let seed = derive(a.seed, &[TRAIN]);
    let outcomes: Vec<(f64, Result<Outcome>)> = a
        .lambdas
        .par_iter()
        .map(|&lambda| {
            let o = opts(&a.rules, &a.ae, false, 0, lambda, output);
            (lambda, estimate(Method::Ae, &x, None, &o, seed))
        })
        .collect();

    let share: Share = a.rules.cum_share.into();
    let mut report = RunReport::new("lambda-sweep", argv, params(a));
    let mut w = create(&a.out)?;
    for (lambda, outcome) in outcomes {
        let label = format!("lambda={lambda}");
        match outcome {
            Ok(o) => {
                let loss = o.history.clone().unwrap_or_default();
                json_line(
                    &mut w,
                    &LambdaLine {
                        lambda,
                        seed,
                        svp: o.spectrum.values(),
                        gte: o.gte,
                        cumulative: o.cumulative,
                        final_loss: loss.last().copied(),
                    },
                )?;
                for (rule, p) in [(Rule::GteFraction.name(), o.gte), (cumulative_name(share), o.cumulative)] {
                    report.results.push(ResultRow {
                        label: label.clone(),
                        rule: rule.into(),
                        value: Some(p as f64),
                        std_dev: None,
                        count: 1,
                        failures: 0,
                        series: o.spectrum.values().to_vec(),
                    });
                }
                report.histories.push(History { label, seed, loss });
            }
            Err(e) if is_run_failure(&e) => report.failures.push(Failure {
                label,
                seed,
                error: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    w.flush()?;
    finish(report, &a.out, started)
}

#[derive(Serialize)]
struct SeriesLine<'a> {
    end_date: &'a str,
    method: &'a str,
    rule: &'a str,
    p: usize,
}

pub fn cmd_de_timeseries(a: &DeTimeseriesArgs, argv: Vec<String>) -> Result<RunReport> {
    let started = Instant::now();
    let panel = load_prices_csv(&a.prices)?;
    let windows = sliding_windows(&panel, WindowSpec { width: a.window, stride: a.stride })?;
    let o = opts(&a.rules, &a.ae, a.center, a.neighbors, a.lambda, Activation::Tanh);
    let cum_rule = cumulative_name(o.share);
    let mut report = RunReport::new("de-timeseries", argv, params(a));
    let mut w = create(&a.out)?;
    let work: Vec<(usize, Method)> = (0..windows.len())
        .flat_map(|i| a.methods.iter().map(move |&m| (i, m)))
        .collect();
    let outcomes: Vec<(u64, Result<Outcome>)> = work
        .par_iter()
        .map(|&(i, method)| {
            let seed = derive(a.seed, &[i as u64, TRAIN]);
            (seed, estimate(method, &windows[i].1, None, &o, seed))
        })
        .collect();
    for (&(i, method), (seed, outcome)) in work.iter().zip(outcomes) {
        let end = windows[i].0.to_string();
        let label = format!("{end}/{}", method.name());
        match outcome {
            Ok(out) => {
                for (rule, p) in [(Rule::GteFraction.name(), out.gte), (cum_rule, out.cumulative)] {
                    json_line(&mut w, &SeriesLine { end_date: &end, method: method.name(), rule, p })?;
                    report.results.push(ResultRow {
                        label: label.clone(),
                        rule: rule.into(),
                        value: Some(p as f64),
                        std_dev: None,
                        count: 1,
                        failures: 0,
                        series: Vec::new(),
                    });
                }
                if let Some(loss) = out.history {
                    report.histories.push(History { label, seed, loss });
                }
            }
            Err(e) if is_run_failure(&e) => report.failures.push(Failure {
                label,
                seed,
                error: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    w.flush()?;
    finish(report, &a.out, started)
}

pub fn cmd_synth_prices(a: &SynthPricesArgs, argv: Vec<String>) -> Result<RunReport> {
    let started = Instant::now();
    let regimes: Vec<Regime> = a.regimes.iter().map(|&r| r.into()).collect();
    let synth = regime_price_panel(&regimes, a.tickers, a.factor_std, a.noise_std, a.seed)?;
    let mut w = create(&a.out)?;
    write_prices_csv(&mut w, &synth.dates, &synth.tickers, &synth.prices)?;
    w.flush()?;
    let report = RunReport::new("synth-prices", argv, params(a));
    finish(report, &a.out, started)
}
