use std::fmt::Write as _;
use std::path::Path;

use millionaire_core::fixtures;
use millionaire_core::harness::{self, BenchReport, Model, SweepOptions};
use millionaire_core::ot::OtBackend;
use millionaire_core::protocols::{
    run_protocol, Coin, ParamSource, Protocol, ProtocolConfig, Seeds,
};
use millionaire_core::simnet::{OpCounters, OpTag};
use serde_json::Value;

use crate::args::{
    BenchArgs, Cli, CoinArg, Command, Fixture, ProtocolFlags, RunArgs, SweepArgs, TablesArgs,
};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_ERROR: u8 = 3;

type CmdResult = Result<u8, String>;

pub fn dispatch(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Tables(a) => cmd_tables(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn small_fixed_params() -> ParamSource {
    ParamSource::Fixed {
        s: 3.into(),
        k: 2.into(),
        l: 5.into(),
    }
}

/// Turns flags into a configuration. `default_params` applies when no
/// `--s/--k/--l` is given.
fn build_config(
    flags: &ProtocolFlags,
    default_params: ParamSource,
    default_ot: OtBackend,
) -> Result<ProtocolConfig, String> {
    let mut cfg = ProtocolConfig {
        seeds: Seeds::from_master(&flags.seed),
        he_backend: flags.he_backend.into(),
        ot_backend: flags.ot_backend.map_or(default_ot, Into::into),
        ot_modulus_bits: flags.ot_modulus_bits,
        params: default_params,
        ..ProtocolConfig::default()
    };
    if let Some(w) = flags.width {
        cfg.width = w;
    }
    if let (Some(s), Some(k), Some(l)) = (&flags.s, &flags.k, &flags.l) {
        cfg.params = ParamSource::Fixed {
            s: s.clone(),
            k: k.clone(),
            l: l.clone(),
        };
    }
    if let Some(u) = flags.u {
        cfg.coin = match u {
            CoinArg::Fixed | CoinArg::One => Coin::Fixed(true),
            CoinArg::Zero => Coin::Fixed(false),
            CoinArg::Coin => Coin::Flip,
        };
    }
    if let Some(w) = flags.complement_width {
        cfg.complement_width = w;
    }
    if let Some(Fixture::PointSample) = flags.fixture {
        if flags.d.is_some_and(|d| d != 4) {
            return Err(format!("fixture {} has d = 4", fixtures::SAMPLE_NAME));
        }
        cfg.d = 4;
        cfg.point_l = fixtures::SAMPLE_L.into();
        cfg.point_range = (
            fixtures::SAMPLE_RANGE.0.into(),
            fixtures::SAMPLE_RANGE.1.into(),
        );
        cfg.point_draws = Some(fixtures::sample_draws());
    }
    if let Some(d) = flags.d {
        cfg.d = d;
    }
    if let Some(l) = &flags.l_point {
        cfg.point_l = l.clone();
    }
    if let Some(r) = &flags.range {
        cfg.point_range = r.clone();
    }
    Ok(cfg)
}

fn write_json(path: &Path, value: &Value) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| format!("writing {}: {e}", path.display()))
}

fn counters_line(c: &OpCounters) -> String {
    OpTag::ALL
        .iter()
        .map(|&t| {
            let name = serde_json::to_value(t)
                .ok()
                .and_then(|v| v.as_str().map(String::from));
            format!("{}={}", name.unwrap_or_default(), c.get(t))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_run(args: RunArgs) -> CmdResult {
    let default_params = ParamSource::Standard;
    let cfg = build_config(&args.flags, default_params, OtBackend::CommutativeRsa)?;
    let (outcome, t) =
        run_protocol(args.protocol, &args.a, &args.b, &cfg).map_err(|e| e.to_string())?;
    println!("{}", outcome.label());
    println!("protocol  {}", args.protocol);
    println!("messages  {}", t.messages.len());
    println!("bytes     {}", t.bytes_total());
    println!("rounds    {}", t.rounds());
    println!("counters  {}", counters_line(&t.counters));
    if outcome.relation.is_none() {
        println!("note      a >= b; this protocol does not separate equality");
    }
    if let Some(path) = &args.json {
        let doc = t.to_document(&args.protocol.to_string(), outcome.to_json());
        write_json(path, &serde_json::to_value(doc).map_err(|e| e.to_string())?)?;
    }
    Ok(outcome.exit_code() as u8)
}

fn cmd_sweep(args: SweepArgs) -> CmdResult {
    let cfg = build_config(&args.flags, small_fixed_params(), OtBackend::Transparent)?;
    let ot_backends = match args.flags.ot_backend {
        Some(b) => vec![b.into()],
        None => OtBackend::ALL.to_vec(),
    };
    let opts = SweepOptions {
        protocol: args.protocol,
        max_bits: args.max_bits,
        seeds: args.seeds,
        master: args.flags.seed.clone(),
        ot_backends,
        base: cfg,
    };
    let report = harness::sweep(&opts).map_err(|e| e.to_string())?;
    if report.passed() {
        println!(
            "PASS: {} pairs x {} variants ({} runs)",
            report.pairs_per_variant,
            report.variants.len(),
            report.runs
        );
    } else {
        let m = report
            .first_mismatch
            .as_ref()
            .expect("failed sweep has a mismatch");
        println!(
            "FAIL: {} of {} runs disagree; first a={} b={} [{}] got {} expected {}",
            report.mismatches, report.runs, m.a, m.b, m.variant, m.got, m.expected
        );
    }
    for v in &report.variants {
        println!("  variant: {v}");
    }
    if let Some(note) = &report.note {
        println!("  note: {note}");
    }
    if let Some(path) = &args.json {
        write_json(
            path,
            &serde_json::to_value(&report).map_err(|e| e.to_string())?,
        )?;
    }
    Ok(if report.passed() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}

fn cmd_tables(args: TablesArgs) -> CmdResult {
    let report = harness::tables();
    for t in &report.tables {
        println!("{}", t.render());
    }
    if report.identical() {
        println!("PASS: all cells match");
    } else {
        println!("FAIL: {} cells differ", report.diffs.len());
        for d in &report.diffs {
            println!(
                "  {} / row {} / {}: expected {}, got {}",
                d.table, d.row, d.column, d.expected, d.got
            );
        }
    }
    if let Some(path) = &args.json {
        write_json(
            path,
            &serde_json::to_value(&report).map_err(|e| e.to_string())?,
        )?;
    }
    Ok(if report.identical() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}

fn default_sizes(p: Protocol) -> Vec<usize> {
    match p {
        Protocol::C => vec![4, 8, 16],
        _ => vec![8, 16, 32, 64],
    }
}

fn render_bench(r: &BenchReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>6}  {:>10}  {:>8}  {:>6}",
        "n", "bytes", "messages", "rounds"
    );
    for p in &r.points {
        let _ = writeln!(
            out,
            "{:>6}  {:>10}  {:>8}  {:>6}",
            p.n, p.bytes, p.messages, p.rounds
        );
    }
    for f in &r.fits {
        let mark = if f.model == r.expected_model {
            "*"
        } else {
            " "
        };
        let coef: Vec<String> = f.coefficients.iter().map(|c| format!("{c:.4}")).collect();
        let resid: Vec<String> = f.residuals.iter().map(|c| format!("{c:.1}")).collect();
        let _ = writeln!(
            out,
            "{mark} {:<16} R^2={:.5}  coef=[{}]  residuals=[{}]",
            f.model.formula(),
            f.r_squared,
            coef.join(", "),
            resid.join(", ")
        );
    }
    if r.expected_model == Model::NLogN {
        let ratios: Vec<String> = r.nlogn_ratios().iter().map(|x| format!("{x:.4}")).collect();
        let _ = writeln!(
            out,
            "  bytes/(n log2 n) = [{}]  within envelope: {}",
            ratios.join(", "),
            r.within_nlogn_envelope()
        );
    }
    let _ = writeln!(out, "  bytes/n increasing: {}", r.superlinear());
    let payload: Vec<String> = r.payload_bytes().iter().map(ToString::to_string).collect();
    let _ = writeln!(
        out,
        "  payload bytes ({}) = [{}]  per n increasing: {}",
        r.payload_labels.join("+"),
        payload.join(", "),
        r.payload_superlinear()
    );
    out
}

fn cmd_bench(args: BenchArgs) -> CmdResult {
    let mut cfg = build_config(&args.flags, small_fixed_params(), OtBackend::CommutativeRsa)?;
    if args.flags.u.is_none() {
        cfg.coin = Coin::Fixed(true);
    }
    let sizes = args
        .sizes
        .map_or_else(|| default_sizes(args.protocol), |s| s.0);
    let report = harness::bench(args.protocol, &sizes, &cfg).map_err(|e| e.to_string())?;
    print!("{}", render_bench(&report));
    if let Some(path) = &args.json {
        write_json(
            path,
            &serde_json::to_value(&report).map_err(|e| e.to_string())?,
        )?;
    }
    Ok(EXIT_PASS)
}
