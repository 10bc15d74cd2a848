use std::fmt::Write as _;

use bimeans_core::catalog::{sub_checks, Params, Point};
use bimeans_core::verifier::{DerivativeReport, MonotonicityReport, StepStatus};
use bimeans_core::{
    catalog, derivative_consistency, eval_mean, falsify, lookup, monotonicity_scan, tightness_scan,
    FalsificationReport, InequalitySpec, Interval, MeanKind, MonotonicityTarget, Order,
    PositivePair, SearchBox, TightnessPath, TightnessSeries, VerifierConfig,
};
use serde::Serialize;

use crate::args::{
    CheckArgs, Cli, Command, DerivArgs, EvalArgs, MonoArgs, OutputFormat, PathKind, Range,
    TableArgs, Target, TightnessArgs,
};
use crate::format::{field, sig17};

pub struct Outcome {
    pub text: String,
    pub violation: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self {
            text,
            violation: false,
        }
    }
}

type CmdResult = Result<Outcome, String>;

pub fn execute(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Eval(a) => eval(a, cli.format.unwrap_or(OutputFormat::Text)),
        Command::Table(a) => table(a, cli.format.unwrap_or(OutputFormat::Csv)),
        Command::Check(a) => check(a, cli.format.unwrap_or(OutputFormat::Text), cli.threads),
        Command::Mono(a) => mono(a, cli.format.unwrap_or(OutputFormat::Text)),
        Command::DerivCheck(a) => deriv(a, cli.format.unwrap_or(OutputFormat::Text)),
        Command::Tightness(a) => tightness(a, cli.format.unwrap_or(OutputFormat::Text)),
    }
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| e.to_string())
}

fn parse_mean(spec: &str, k: Option<f64>) -> Result<MeanKind, String> {
    let (name, inline_k) = match spec.split_once(':') {
        Some((n, k)) => (
            n,
            Some(
                k.parse::<f64>()
                    .map_err(|_| format!("invalid order {k:?} in {spec:?}"))?,
            ),
        ),
        None => (spec, None),
    };
    let order = || -> Result<Order, String> {
        let k = inline_k
            .or(k)
            .ok_or_else(|| format!("{name} needs an order: use {name}:<k> or --k"))?;
        Order::new(k).map_err(|e| e.to_string())
    };
    let kind = match name.to_ascii_lowercase().as_str() {
        "arithmetic" | "a" => MeanKind::ARITHMETIC,
        "geometric" | "g" => MeanKind::GEOMETRIC,
        "heronian" | "he" => MeanKind::Heronian,
        "identric" | "i" => MeanKind::Identric,
        "s" | "s-mean" | "smean" => MeanKind::SMean,
        "power" | "power-mean" => MeanKind::PowerMean(order()?),
        "f2" | "unnormalized" | "unnormalized-power" => MeanKind::UnnormalizedPower(order()?),
        other => {
            return Err(format!(
                "unknown mean {other:?}; expected arithmetic, geometric, heronian, identric, s, power or f2"
            ))
        }
    };
    kind.validate().map_err(|e| e.to_string())?;
    Ok(kind)
}

fn order_of(kind: MeanKind) -> Option<f64> {
    match kind {
        MeanKind::PowerMean(k) | MeanKind::UnnormalizedPower(k) => Some(k.value()),
        _ => None,
    }
}

fn pair(a: f64, b: f64) -> Result<PositivePair, String> {
    PositivePair::new(a, b).map_err(|e| e.to_string())
}

fn eval(args: &EvalArgs, format: OutputFormat) -> CmdResult {
    let kind = parse_mean(&args.mean, args.k)?;
    let value = eval_mean(kind, pair(args.a, args.b)?).map_err(|e| e.to_string())?;
    let text = match format {
        OutputFormat::Text => format!("{}\n", sig17(value)),
        OutputFormat::Csv => format!(
            "mean,a,b,k,value\n{},{},{},{},{}\n",
            kind.label(),
            sig17(args.a),
            sig17(args.b),
            field(order_of(kind)),
            sig17(value)
        ),
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Row {
                mean: String,
                a: f64,
                b: f64,
                #[serde(skip_serializing_if = "Option::is_none")]
                k: Option<f64>,
                value: f64,
            }
            json(&Row {
                mean: kind.label(),
                a: args.a,
                b: args.b,
                k: order_of(kind),
                value,
            })?
        }
    };
    Ok(Outcome::ok(text))
}

fn table(args: &TableArgs, format: OutputFormat) -> CmdResult {
    let kinds = args
        .means
        .iter()
        .map(|m| parse_mean(m.trim(), args.k))
        .collect::<Result<Vec<_>, _>>()?;
    let labels: Vec<String> = kinds.iter().map(|k| k.label()).collect();
    let mut rows = Vec::new();
    for b in args.b_range.values() {
        let p = pair(args.a, b)?;
        let values = kinds
            .iter()
            .map(|&k| eval_mean(k, p).map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((b, values));
    }
    let text = match format {
        OutputFormat::Csv | OutputFormat::Text => {
            let sep = if format == OutputFormat::Csv {
                ","
            } else {
                "  "
            };
            let mut s = format!("b{sep}{}\n", labels.join(sep));
            for (b, values) in &rows {
                let cells: Vec<String> = values.iter().map(|v| sig17(*v)).collect();
                let _ = writeln!(s, "{}{sep}{}", sig17(*b), cells.join(sep));
            }
            s
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Row<'a> {
                b: f64,
                values: &'a [f64],
            }
            #[derive(Serialize)]
            struct Table<'a> {
                a: f64,
                means: &'a [String],
                rows: Vec<Row<'a>>,
            }
            json(&Table {
                a: args.a,
                means: &labels,
                rows: rows.iter().map(|(b, v)| Row { b: *b, values: v }).collect(),
            })?
        }
    };
    Ok(Outcome::ok(text))
}

fn interval(r: Range, what: &str) -> Result<Interval, String> {
    Interval::new(r.lo, r.hi).map_err(|_| format!("invalid {what} range {}:{}", r.lo, r.hi))
}

fn resolve_specs(args: &CheckArgs) -> Result<Vec<&'static InequalitySpec>, String> {
    if args.all {
        return Ok(catalog().iter().chain(sub_checks()).collect());
    }
    let id = args.ineq.as_deref().unwrap_or_default();
    lookup(id)
        .map(|s| vec![s])
        .ok_or_else(|| format!("unknown inequality id {id:?}"))
}

fn point_fields(p: &Point) -> String {
    let mut s = format!("a={}, b={}", sig17(p.a), sig17(p.b));
    for (name, v) in [
        ("k", p.params.k),
        ("beta", p.params.beta),
        ("k2", p.params.k2),
    ] {
        if let Some(v) = v {
            let _ = write!(s, ", {name}={}", sig17(v));
        }
    }
    s
}

fn check(args: &CheckArgs, format: OutputFormat, threads: usize) -> CmdResult {
    let specs = resolve_specs(args)?;
    let (a_range, b_range) = (interval(args.a_range, "a")?, interval(args.b_range, "b")?);
    let cfg = VerifierConfig {
        seed: args.seed,
        n_random: args.samples,
        grid_per_axis: args.grid,
        refine_steps: args.refine,
        tolerance: args.tol,
        threads,
    };
    let mut reports: Vec<FalsificationReport> = Vec::with_capacity(specs.len());
    for spec in specs {
        let bx = SearchBox::for_spec(spec, a_range, b_range).map_err(|e| e.to_string())?;
        reports.push(falsify(spec, &bx, &cfg).map_err(|e| e.to_string())?);
    }
    let violation = reports.iter().any(|r| !r.holds());
    let text = match format {
        OutputFormat::Json => json(&reports)?,
        OutputFormat::Csv => {
            let mut s = String::from(
                "specId,seed,minGap,a,b,k,beta,k2,samplesEvaluated,samplesSkipped,violationCount\n",
            );
            for r in &reports {
                let p = &r.argmin;
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    r.spec_id,
                    r.seed,
                    sig17(r.min_gap),
                    sig17(p.a),
                    sig17(p.b),
                    field(p.params.k),
                    field(p.params.beta),
                    field(p.params.k2),
                    r.samples_evaluated,
                    r.samples_skipped,
                    r.violation_count
                );
            }
            s
        }
        OutputFormat::Text => {
            let mut s = String::new();
            for r in &reports {
                let _ = writeln!(
                    s,
                    "{:<18} {:<8} minGap={} at ({}) samples={} violations={}",
                    r.spec_id,
                    if r.holds() { "holds" } else { "VIOLATED" },
                    sig17(r.min_gap),
                    point_fields(&r.argmin),
                    r.samples_evaluated,
                    r.violation_count
                );
                if let Some(v) = r.violations.first() {
                    let _ = writeln!(
                        s,
                        "{:<18} first violation at ({}) gap={} extended={}",
                        "",
                        point_fields(&v.point),
                        sig17(v.gap),
                        sig17(v.extended_gap)
                    );
                }
            }
            s
        }
    };
    Ok(Outcome { text, violation })
}

fn status_name(s: Option<StepStatus>) -> &'static str {
    match s {
        None => "",
        Some(StepStatus::Strict) => "strict",
        Some(StepStatus::Inconclusive) => "inconclusive",
        Some(StepStatus::Violated) => "violated",
        Some(StepStatus::Skipped) => "skipped",
    }
}

fn mono_table(r: &MonotonicityReport, sep: &str) -> String {
    let mut s = format!("k{sep}value{sep}step{sep}status\n");
    for (i, (k, v)) in r.k_grid.iter().zip(&r.values).enumerate() {
        let (step, status) = if i == 0 {
            (String::new(), None)
        } else {
            (sig17(r.steps[i - 1]), Some(r.status[i - 1]))
        };
        let _ = writeln!(
            s,
            "{}{sep}{}{sep}{step}{sep}{}",
            sig17(*k),
            sig17(*v),
            status_name(status)
        );
    }
    s
}

fn mono(args: &MonoArgs, format: OutputFormat) -> CmdResult {
    let target = match args.target {
        Target::F1 => MonotonicityTarget::F1,
        Target::F2 => MonotonicityTarget::F2,
    };
    let r = monotonicity_scan(target, pair(args.a, args.b)?, &args.k_grid, args.tol)
        .map_err(|e| e.to_string())?;
    let text = match format {
        OutputFormat::Json => json(&r)?,
        OutputFormat::Csv => mono_table(&r, ","),
        OutputFormat::Text => {
            let direction = match target {
                MonotonicityTarget::F1 => "increasing",
                MonotonicityTarget::F2 => "decreasing",
            };
            let verdict = if r.degenerate {
                "degenerate (a = b)".to_string()
            } else if !r.holds {
                format!("NOT {direction}")
            } else if r.strict {
                format!("strictly {direction}")
            } else {
                format!("{direction} within tolerance")
            };
            format!("{}{verdict}\n", mono_table(&r, "  "))
        }
    };
    Ok(Outcome {
        text,
        violation: !r.holds,
    })
}

const DERIV_REL: f64 = 1e-6;
const DERIV_ABS: f64 = 1e-8;

fn deriv(args: &DerivArgs, format: OutputFormat) -> CmdResult {
    let r: DerivativeReport =
        derivative_consistency(pair(args.a, args.b)?, args.k, args.h).map_err(|e| e.to_string())?;
    let passes = r.passes(DERIV_REL, DERIV_ABS);
    let rows = [("f1", r.f1), ("f2", r.f2)];
    let text = match format {
        OutputFormat::Json => json(&r)?,
        OutputFormat::Csv | OutputFormat::Text => {
            let sep = if format == OutputFormat::Csv {
                ","
            } else {
                "  "
            };
            let mut s = format!(
                "function{sep}analytic{sep}finiteDifference{sep}absDeviation{sep}relDeviation\n"
            );
            for (name, c) in rows {
                let _ = writeln!(
                    s,
                    "{name}{sep}{}{sep}{}{sep}{}{sep}{}",
                    sig17(c.analytic),
                    sig17(c.finite_difference),
                    sig17(c.abs_deviation),
                    sig17(c.rel_deviation)
                );
            }
            if format == OutputFormat::Text {
                s.push_str(if passes {
                    "consistent\n"
                } else {
                    "INCONSISTENT\n"
                });
            }
            s
        }
    };
    Ok(Outcome {
        text,
        violation: !passes,
    })
}

fn tightness(args: &TightnessArgs, format: OutputFormat) -> CmdResult {
    let spec =
        lookup(&args.ineq).ok_or_else(|| format!("unknown inequality id {:?}", args.ineq))?;
    let path = match args.path {
        PathKind::Diagonal => TightnessPath::ContractToDiagonal { a: args.a },
        PathKind::Ratio => TightnessPath::BlowUpRatio { a: args.a },
    };
    let mut params: Params = spec.endpoint;
    for (slot, v) in [
        (&mut params.k, args.k),
        (&mut params.beta, args.beta),
        (&mut params.k2, args.k2),
    ] {
        if v.is_some() {
            *slot = v;
        }
    }
    let s: TightnessSeries =
        tightness_scan(spec, path, args.steps, Some(params)).map_err(|e| e.to_string())?;
    let text = match format {
        OutputFormat::Json => json(&s)?,
        OutputFormat::Csv | OutputFormat::Text => {
            let sep = if format == OutputFormat::Csv {
                ","
            } else {
                "  "
            };
            let n = spec.chain.len() - 1;
            let gap_cols: Vec<String> = (1..=n).map(|i| format!("gap{i}")).collect();
            let mut out = format!("j{sep}a{sep}b{sep}minGap{sep}{}\n", gap_cols.join(sep));
            for (i, (p, gaps)) in s.points.iter().zip(&s.gaps).enumerate() {
                let cells: Vec<String> = gaps.iter().map(|g| sig17(*g)).collect();
                let _ = writeln!(
                    out,
                    "{}{sep}{}{sep}{}{sep}{}{sep}{}",
                    i + 1,
                    sig17(p.a),
                    sig17(p.b),
                    sig17(s.min_gaps[i]),
                    cells.join(sep)
                );
            }
            if format == OutputFormat::Text {
                if let Some(t) = &s.truncated {
                    let _ = writeln!(out, "truncated: {t}");
                }
            }
            out
        }
    };
    Ok(Outcome::ok(text))
}
