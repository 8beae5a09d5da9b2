//! Command-line front end: stream runs, failure/scaling experiments, the
//! distributed simulation, and the lab experiments. Every command emits a
//! CSV (stdout, or `--out`) that is a pure function of its configuration
//! and seed.
//!
//! Exit codes: 0 success, 1 experiment threshold breached, 2 usage or
//! input error.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use sketchspan::agm::{agm_params, VertexSketchBank};
use sketchspan::distributed::simulate;
use sketchspan::error::Error;
use sketchspan::experiments::{
    embed_experiment, encdec_experiment, failure_experiment, lab_defaults, nfold_experiment,
    scaling_row, to_csv, CodecProtocol,
};
use sketchspan::graph::{apply_stream, parse_edge_list, parse_stream, ExactGraph};
use sketchspan::lab::{check_dsk_invariants, sample_d_sk, ur_params};
use sketchspan::prf::{tag, Seed256};

const USAGE: &str = "\
usage: sketchspan <command> [args]

commands:
  run <stream.txt>        apply a turnstile stream; one CSV row per query
  exp failure             random dynamic streams, empirical failure rate
  exp scaling             bank and message sizes across a list of n
  sim dist <graph.txt>    one-shot distributed simulation on a graph file
  lab encdec              encode/decode round-trips under three protocols
  lab nfold               the n-fold reduction through the real sketch
  lab embed               embed a relation instance in the planted family
  lab dsk                 sample the planted family, check its structure

flags (also settable in a `key = value` --config file; flags win):
  --n N            vertex count, or comma list for `exp scaling`
  --delta D        forest failure probability (default 0.05)
  --trials T       experiment repetitions (default 100)
  --seed S         master seed (default: env SKETCHSPAN_SEED, else 0)
  --out PATH       write the CSV here instead of stdout (`run` appends)
  --config PATH    flat key = value defaults
  --delta-rule R   `inv-n` (default) or `fixed`, for `exp scaling`
  --u U            relation universe for lab commands
  --ur-delta D     relation delta for lab commands
  --c-size C       ladder size constant (the alpha numerator)
  --c-r C          ladder stage-count constant
";

fn main() {
    std::process::exit(match cli() {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    });
}

struct Opts {
    values: BTreeMap<String, String>,
    positionals: Vec<String>,
}

impl Opts {
    fn parse(args: &[String]) -> Result<Opts, String> {
        let mut values = BTreeMap::new();
        let mut positionals = Vec::new();
        let mut it = args.iter().peekable();
        while let Some(arg) = it.next() {
            if let Some(stripped) = arg.strip_prefix("--") {
                let (key, inline) = match stripped.split_once('=') {
                    Some((k, v)) => (k.to_string(), Some(v.to_string())),
                    None => (stripped.to_string(), None),
                };
                let key = key.replace('-', "_");
                let value = match inline {
                    Some(v) => v,
                    None => it
                        .next()
                        .ok_or_else(|| format!("flag --{key} needs a value"))?
                        .clone(),
                };
                values.insert(key, value);
            } else {
                positionals.push(arg.clone());
            }
        }
        // config supplies defaults for anything a flag did not set
        if let Some(path) = values.get("config").cloned() {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| format!("cannot read config {path}: {e}"))?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| format!("config line {} has no `=`", lineno + 1))?;
                let key = k.trim().replace('-', "_");
                values.entry(key).or_insert_with(|| v.trim().to_string());
            }
        }
        Ok(Opts { values, positionals })
    }

    fn get<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, String>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            Some(v) => v.parse::<T>().map_err(|e| format!("bad --{key} `{v}`: {e}")),
            None => Ok(default),
        }
    }

    fn seed(&self) -> Result<u64, String> {
        if let Some(v) = self.values.get("seed") {
            return v.parse::<u64>().map_err(|e| format!("bad --seed `{v}`: {e}"));
        }
        match std::env::var("SKETCHSPAN_SEED") {
            Ok(v) => v.parse::<u64>().map_err(|e| format!("bad SKETCHSPAN_SEED `{v}`: {e}")),
            Err(_) => Ok(0),
        }
    }

    fn n_list(&self, default: &str) -> Result<Vec<u64>, String> {
        let raw = self.values.get("n").cloned().unwrap_or_else(|| default.to_string());
        raw.split(',')
            .map(|p| p.trim().parse::<u64>().map_err(|e| format!("bad --n `{raw}`: {e}")))
            .collect()
    }
}

fn emit(opts: &Opts, csv: &str, append: bool) -> Result<(), String> {
    match opts.values.get("out") {
        Some(path) => {
            if append {
                use std::io::Write;
                let existing = std::fs::metadata(path).map(|m| m.len()).unwrap_or(0);
                let mut f = std::fs::OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(path)
                    .map_err(|e| format!("cannot open {path}: {e}"))?;
                let body = if existing > 0 {
                    // header already present
                    csv.split_once('\n').map(|(_, rest)| rest).unwrap_or("")
                } else {
                    csv
                };
                f.write_all(body.as_bytes()).map_err(|e| format!("cannot write {path}: {e}"))?;
            } else {
                std::fs::write(path, csv).map_err(|e| format!("cannot write {path}: {e}"))?;
            }
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn lib_err(e: Error) -> String {
    e.to_string()
}

fn cli() -> Result<i32, String> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = args.first() else {
        eprint!("{USAGE}");
        return Ok(2);
    };
    match command.as_str() {
        "run" => cmd_run(&Opts::parse(&args[1..])?),
        "exp" => {
            let sub = args.get(1).map(String::as_str);
            match sub {
                Some("failure") => cmd_exp_failure(&Opts::parse(&args[2..])?),
                Some("scaling") => cmd_exp_scaling(&Opts::parse(&args[2..])?),
                _ => Err("exp needs `failure` or `scaling`".into()),
            }
        }
        "sim" => match args.get(1).map(String::as_str) {
            Some("dist") => cmd_sim_dist(&Opts::parse(&args[2..])?),
            _ => Err("sim needs `dist`".into()),
        },
        "lab" => match args.get(1).map(String::as_str) {
            Some("encdec") => cmd_lab_encdec(&Opts::parse(&args[2..])?),
            Some("nfold") => cmd_lab_nfold(&Opts::parse(&args[2..])?),
            Some("embed") => cmd_lab_embed(&Opts::parse(&args[2..])?),
            Some("dsk") => cmd_lab_dsk(&Opts::parse(&args[2..])?),
            _ => Err("lab needs one of encdec | nfold | embed | dsk".into()),
        },
        "help" | "--help" | "-h" => {
            print!("{USAGE}");
            Ok(0)
        }
        other => Err(format!("unknown command `{other}`\n{USAGE}")),
    }
}

fn cmd_run(opts: &Opts) -> Result<i32, String> {
    let path = opts
        .positionals
        .first()
        .ok_or("run needs a stream file argument")?;
    let delta: f64 = opts.get("delta", 0.05)?;
    let seed = opts.seed()?;
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let stream = parse_stream(&text).map_err(lib_err)?;
    if stream.n < 2 {
        return Err("stream must declare at least 2 vertices".into());
    }
    let params = agm_params(stream.n, delta).map_err(lib_err)?;
    let mut bank = VertexSketchBank::init(params, Seed256::from_u64(seed));
    let mut oracle = ExactGraph::new(stream.n);
    let results = apply_stream(&mut bank, &mut oracle, &stream.ops).map_err(lib_err)?;
    let rows: Vec<Vec<String>> = results
        .iter()
        .enumerate()
        .map(|(i, (forest, report))| {
            vec![
                i.to_string(),
                report.is_valid.to_string(),
                forest.edge_count().to_string(),
                forest.component_count().to_string(),
            ]
        })
        .collect();
    let all_valid = results.iter().all(|(_, r)| r.is_valid);
    emit(
        opts,
        &to_csv(
            &["query_index", "valid", "forest_edge_count", "component_count"],
            &rows,
        ),
        true,
    )?;
    Ok(if all_valid { 0 } else { 1 })
}

fn cmd_exp_failure(opts: &Opts) -> Result<i32, String> {
    let n: u64 = opts.get("n", 256)?;
    let delta: f64 = opts.get("delta", 0.05)?;
    let trials: u64 = opts.get("trials", 100)?;
    let seed = opts.seed()?;
    let (rows, failure_rate) = failure_experiment(n, delta, trials, seed).map_err(lib_err)?;
    let mut out: Vec<Vec<String>> = rows
        .iter()
        .enumerate()
        .map(|(t, valid)| {
            vec![seed.to_string(), n.to_string(), delta.to_string(), t.to_string(), valid.to_string()]
        })
        .collect();
    out.push(vec![
        seed.to_string(),
        n.to_string(),
        delta.to_string(),
        "summary".into(),
        format!("{failure_rate:.6}"),
    ]);
    emit(opts, &to_csv(&["seed", "n", "delta", "trial", "valid"], &out), false)?;
    Ok(if failure_rate <= 2.0 * delta { 0 } else { 1 })
}

fn cmd_exp_scaling(opts: &Opts) -> Result<i32, String> {
    let ns = opts.n_list("256,512,1024,2048")?;
    let seed = opts.seed()?;
    let rule = opts.get::<String>("delta_rule", "inv-n".into())?;
    let fixed_delta: f64 = opts.get("delta", 0.05)?;
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    for &n in &ns {
        let delta = match rule.as_str() {
            "inv-n" => 1.0 / n as f64,
            "fixed" => fixed_delta,
            other => return Err(format!("unknown --delta-rule `{other}` (inv-n | fixed)")),
        };
        let row = scaling_row(n, delta, seed).map_err(lib_err)?;
        let nf = n as f64;
        let shape = nf * (nf / delta).log2() * nf.log2() * nf.log2();
        ratios.push(row.total_bits as f64 / shape);
        rows.push(vec![
            seed.to_string(),
            n.to_string(),
            format!("{delta:e}"),
            row.total_bits.to_string(),
            format!("{:.1}", row.avg_msg_bits),
        ]);
    }
    emit(
        opts,
        &to_csv(&["seed", "n", "delta", "total_bits", "avg_msg_bits"], &rows),
        false,
    )?;
    let spread = ratios.iter().cloned().fold(f64::MIN, f64::max)
        / ratios.iter().cloned().fold(f64::MAX, f64::min);
    Ok(if spread <= 4.0 { 0 } else { 1 })
}

fn cmd_sim_dist(opts: &Opts) -> Result<i32, String> {
    let path = opts
        .positionals
        .first()
        .ok_or("sim dist needs a graph file argument")?;
    let delta: f64 = opts.get("delta", 0.05)?;
    let seed = opts.seed()?;
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let g = parse_edge_list(&text).map_err(lib_err)?;
    let report = simulate(&g, delta, Seed256::from_u64(seed)).map_err(lib_err)?;
    let rows = vec![vec![
        g.n().to_string(),
        delta.to_string(),
        seed.to_string(),
        report.valid.to_string(),
        format!("{:.1}", report.avg_message_bits),
        report.max_message_bits.to_string(),
    ]];
    emit(
        opts,
        &to_csv(&["n", "delta", "seed", "valid", "avg_bits", "max_bits"], &rows),
        false,
    )?;
    Ok(if report.valid { 0 } else { 1 })
}

fn lab_ur_params(
    opts: &Opts,
    defaults: (u64, f64, f64, f64),
) -> Result<sketchspan::lab::UrParams, String> {
    let u: u64 = opts.get("u", defaults.0)?;
    let ur_delta: f64 = opts.get("ur_delta", defaults.1)?;
    let c_size: f64 = opts.get("c_size", defaults.2)?;
    let c_r: f64 = opts.get("c_r", defaults.3)?;
    let p = ur_params(u, ur_delta, c_size, c_r).map_err(lib_err)?;
    if p.is_degenerate() {
        eprintln!(
            "warning: the size ladder has a single stage (m = {}, alpha = {:.4}); \
             the geometric structure is not exercised",
            p.m, p.alpha
        );
    }
    Ok(p)
}

fn cmd_lab_encdec(opts: &Opts) -> Result<i32, String> {
    let p = lab_ur_params(opts, lab_defaults::ENCDEC)?;
    let trials: u64 = opts.get("trials", 100)?;
    let seed = opts.seed()?;
    let mut rows = Vec::new();
    let mut all_ok = true;
    for which in [CodecProtocol::AlwaysFail, CodecProtocol::AlwaysWrong, CodecProtocol::Sketch] {
        let outcomes = encdec_experiment(&p, which, trials, seed).map_err(lib_err)?;
        let ok = outcomes.iter().filter(|o| o.roundtrip_ok).count();
        let mean_accepted: f64 =
            outcomes.iter().map(|o| o.accepted as f64).sum::<f64>() / trials as f64;
        for (t, o) in outcomes.iter().enumerate() {
            rows.push(vec![
                seed.to_string(),
                p.universe.to_string(),
                format!("{:e}", p.delta),
                which.name().into(),
                t.to_string(),
                o.stage0.to_string(),
                o.stages.to_string(),
                o.accepted.to_string(),
                o.roundtrip_ok.to_string(),
            ]);
        }
        rows.push(vec![
            seed.to_string(),
            p.universe.to_string(),
            format!("{:e}", p.delta),
            which.name().into(),
            "summary".into(),
            String::new(),
            String::new(),
            format!("{mean_accepted:.3}"),
            format!("{ok}/{trials}"),
        ]);
        all_ok &= ok as u64 == trials;
    }
    emit(
        opts,
        &to_csv(
            &["seed", "u", "ur_delta", "protocol", "trial", "stage0", "stages", "accepted", "roundtrip_ok"],
            &rows,
        ),
        false,
    )?;
    Ok(if all_ok { 0 } else { 1 })
}

fn cmd_lab_nfold(opts: &Opts) -> Result<i32, String> {
    let n: u64 = opts.get("n", 32)?;
    let delta: f64 = opts.get("delta", 0.05)?;
    let trials: u64 = opts.get("trials", 100)?;
    let seed = opts.seed()?;
    let mut defaults = lab_defaults::NFOLD;
    defaults.0 = n; // instances live over [n]
    let p = lab_ur_params(opts, defaults)?;
    let (rows, all_correct_rate) = nfold_experiment(n, delta, &p, trials, seed).map_err(lib_err)?;
    let mut out: Vec<Vec<String>> = rows
        .iter()
        .enumerate()
        .map(|(t, (valid, correct, bytes))| {
            vec![
                seed.to_string(),
                n.to_string(),
                delta.to_string(),
                t.to_string(),
                valid.to_string(),
                correct.to_string(),
                bytes.to_string(),
            ]
        })
        .collect();
    out.push(vec![
        seed.to_string(),
        n.to_string(),
        delta.to_string(),
        "summary".into(),
        String::new(),
        format!("{all_correct_rate:.4}"),
        String::new(),
    ]);
    emit(
        opts,
        &to_csv(
            &["seed", "n", "delta", "trial", "forest_valid", "all_correct", "communicated_bytes"],
            &out,
        ),
        false,
    )?;
    Ok(if all_correct_rate >= 1.0 - 2.0 * delta { 0 } else { 1 })
}

fn cmd_lab_embed(opts: &Opts) -> Result<i32, String> {
    let side: u64 = opts.get("u", lab_defaults::EMBED.0)?;
    let delta: f64 = opts.get("delta", 0.05)?;
    let trials: u64 = opts.get("trials", 50)?;
    let seed = opts.seed()?;
    let mut defaults = lab_defaults::EMBED;
    defaults.0 = side;
    let p = lab_ur_params(opts, defaults)?;
    let outcomes = embed_experiment(side, delta, &p, trials, seed).map_err(lib_err)?;
    let mut sound = true;
    let mut valid_count = 0u64;
    let mut recovered_count = 0u64;
    let mut rows: Vec<Vec<String>> = Vec::new();
    for (t, o) in outcomes.iter().enumerate() {
        if o.forest_valid {
            valid_count += 1;
            sound &= o.recovered_in_difference;
        }
        recovered_count += o.recovered_in_difference as u64;
        rows.push(vec![
            seed.to_string(),
            side.to_string(),
            delta.to_string(),
            t.to_string(),
            o.forest_valid.to_string(),
            o.recovered.map(|x| x.to_string()).unwrap_or_default(),
            o.recovered_in_difference.to_string(),
        ]);
    }
    rows.push(vec![
        seed.to_string(),
        side.to_string(),
        delta.to_string(),
        "summary".into(),
        format!("{valid_count}/{trials}"),
        String::new(),
        format!("{recovered_count}/{trials}"),
    ]);
    emit(
        opts,
        &to_csv(
            &["seed", "side", "delta", "trial", "forest_valid", "recovered", "in_difference"],
            &rows,
        ),
        false,
    )?;
    Ok(if sound { 0 } else { 1 })
}

fn cmd_lab_dsk(opts: &Opts) -> Result<i32, String> {
    let n: u64 = opts.get("n", 1024)?;
    let trials: u64 = opts.get("trials", 100)?;
    let seed = opts.seed()?;
    let p = lab_ur_params(opts, lab_defaults::DSK)?;
    let mut rows = Vec::new();
    let mut total_violations = 0usize;
    for t in 0..trials {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::from_seed(
            Seed256::from_u64(seed).derive(tag::TRIAL, t).to_bytes(),
        );
        let d = sample_d_sk(n, &p, &mut rng).map_err(lib_err)?;
        let violations = check_dsk_invariants(&d);
        total_violations += violations.len();
        rows.push(vec![
            seed.to_string(),
            n.to_string(),
            t.to_string(),
            d.graph.edge_count().to_string(),
            violations.len().to_string(),
        ]);
    }
    let mut summary = String::new();
    let _ = write!(summary, "{total_violations}");
    rows.push(vec![seed.to_string(), n.to_string(), "summary".into(), String::new(), summary]);
    emit(
        opts,
        &to_csv(&["seed", "n", "trial", "edges", "violations"], &rows),
        false,
    )?;
    Ok(if total_violations == 0 { 0 } else { 1 })
}
