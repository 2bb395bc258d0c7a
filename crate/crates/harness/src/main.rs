//! Command-line driver. Prints the CSV report to stdout (or `--out`), a
//! summary to stderr, and exits 0 when every assertion row passed, 1 when
//! any failed, 2 on usage or structural errors.

use std::collections::BTreeMap;
use std::process::ExitCode;

use owsg_wb::config::{parse_config_lines, seed_from_env, ExperimentConfig};
use owsg_wb::experiments::{run, suite, SUITE};
use owsg_wb::report::{to_csv, to_json, ReportRow};
use owsg_wb_core::DEFAULT_DIM_CAP;

const USAGE: &str = "usage: owsg-wb [flags] <verb>

verbs:
  check fvdg|twirl|pgm|sym-subspace
  amplify [--n N --q Q --delta D --t T --trials N]
  amplify degenerate
  qds game|good-event
  money clone
  qpotp efi|wrong-msg
  commit metrics|from-svsi
  efi amplify
  fixtures --out-dir DIR
  suite [--only name,name,...]

flags (also valid as `key = value` lines in --config FILE):
  --config FILE      flat key = value defaults
  --seed N           rng seed (default: $OWSG_WB_SEED or 42)
  --cap N            total-dimension cap (default 4096)
  --scale-loops F    multiply amplification loop constants (default 1)
  --out FILE         write the CSV report to FILE instead of stdout
  --json             also emit a JSON report (stdout or FILE.json)
  --no-timing        print '-' for wall time, for byte-stable reruns
";

struct Cli {
    experiment: Option<String>,
    suite_only: Option<Vec<String>>,
    is_suite: bool,
    write_fixtures: Option<String>,
    params: BTreeMap<String, String>,
    seed: u64,
    dim_cap: usize,
    scale_loops: f64,
    out: Option<String>,
    json: bool,
    timing: bool,
}

fn usage_error(msg: &str) -> String {
    format!("{msg}\n\n{USAGE}")
}

fn verb_to_experiment(verb: &str, sub: Option<&str>) -> Result<String, String> {
    let name = match (verb, sub) {
        ("check", Some(which @ ("fvdg" | "twirl" | "pgm" | "sym-subspace"))) => {
            format!("check-{which}")
        }
        ("amplify", None) => "amplify".to_string(),
        ("amplify", Some("degenerate")) => "amplify-degenerate".to_string(),
        ("qds", Some(which @ ("game" | "good-event"))) => format!("qds-{which}"),
        ("money", Some("clone")) => "money-clone".to_string(),
        ("qpotp", Some(which @ ("efi" | "wrong-msg"))) => format!("qpotp-{which}"),
        ("commit", Some(which @ ("metrics" | "from-svsi"))) => format!("commit-{which}"),
        ("efi", Some("amplify")) => "efi-amplify".to_string(),
        ("planted-negative", None) => "planted-negative".to_string(),
        _ => {
            return Err(usage_error(&format!(
                "unknown verb {verb:?} {:?}",
                sub.unwrap_or("")
            )))
        }
    };
    Ok(name)
}

fn parse_cli(args: &[String]) -> Result<Cli, String> {
    let mut cli = Cli {
        experiment: None,
        suite_only: None,
        is_suite: false,
        write_fixtures: None,
        params: BTreeMap::new(),
        seed: seed_from_env(),
        dim_cap: DEFAULT_DIM_CAP,
        scale_loops: 1.0,
        out: None,
        json: false,
        timing: true,
    };
    let mut words: Vec<String> = Vec::new();
    let mut flags: BTreeMap<String, String> = BTreeMap::new();
    let mut i = 0;
    while i < args.len() {
        let arg = &args[i];
        if let Some(key) = arg.strip_prefix("--") {
            match key {
                "json" => {
                    flags.insert("json".into(), "true".into());
                    i += 1;
                }
                "no-timing" => {
                    flags.insert("no-timing".into(), "true".into());
                    i += 1;
                }
                _ => {
                    let value = args
                        .get(i + 1)
                        .ok_or_else(|| usage_error(&format!("flag --{key} needs a value")))?;
                    flags.insert(key.to_string(), value.clone());
                    i += 2;
                }
            }
        } else {
            words.push(arg.clone());
            i += 1;
        }
    }
    // Config file first, then CLI flags override.
    let mut merged: BTreeMap<String, String> = BTreeMap::new();
    if let Some(path) = flags.get("config") {
        let body = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {path:?}: {e}"))?;
        merged.extend(parse_config_lines(&body).map_err(|e| e.to_string())?);
    }
    for (k, v) in &flags {
        if k != "config" {
            merged.insert(k.clone(), v.clone());
        }
    }
    for (key, value) in merged {
        match key.as_str() {
            "seed" => {
                cli.seed = value
                    .parse()
                    .map_err(|_| usage_error(&format!("bad seed {value:?}")))?
            }
            "cap" => {
                cli.dim_cap = value
                    .parse()
                    .map_err(|_| usage_error(&format!("bad cap {value:?}")))?
            }
            "scale-loops" => {
                cli.scale_loops = value
                    .parse()
                    .map_err(|_| usage_error(&format!("bad scale-loops {value:?}")))?
            }
            "out" => cli.out = Some(value),
            "json" => cli.json = value == "true",
            "no-timing" => cli.timing = value != "true",
            "out-dir" => {
                cli.params.insert("out-dir".into(), value);
            }
            "only" => {
                cli.suite_only = Some(
                    value
                        .split(',')
                        .filter(|s| !s.is_empty())
                        .map(str::to_string)
                        .collect(),
                )
            }
            _ => {
                cli.params.insert(key, value);
            }
        }
    }
    match words.first().map(String::as_str) {
        None => return Err(usage_error("missing verb")),
        Some("suite") => {
            cli.is_suite = true;
            if words.len() > 1 {
                cli.suite_only = Some(words[1..].to_vec());
            }
        }
        Some("fixtures") => {
            let dir = cli
                .params
                .remove("out-dir")
                .ok_or_else(|| usage_error("fixtures needs --out-dir DIR"))?;
            cli.write_fixtures = Some(dir);
        }
        Some(verb) => {
            cli.experiment = Some(verb_to_experiment(verb, words.get(1).map(String::as_str))?);
        }
    }
    Ok(cli)
}

fn write_report(cli: &Cli, rows: &[ReportRow]) -> Result<(), String> {
    let csv = to_csv(rows);
    match &cli.out {
        None => {
            print!("{csv}");
            if cli.json {
                print!("{}", to_json(rows));
            }
        }
        Some(path) => {
            atomic_write(path, &csv)?;
            if cli.json {
                atomic_write(&format!("{path}.json"), &to_json(rows))?;
            }
        }
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    eprintln!(
        "{} rows, {} failed (seed {})",
        rows.len(),
        failed,
        cli.seed
    );
    Ok(())
}

fn atomic_write(path: &str, body: &str) -> Result<(), String> {
    let tmp = format!("{path}.tmp");
    std::fs::write(&tmp, body).map_err(|e| format!("cannot write {tmp:?}: {e}"))?;
    std::fs::rename(&tmp, path).map_err(|e| format!("cannot rename to {path:?}: {e}"))
}

fn write_fixture_files(dir: &str) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {dir:?}: {e}"))?;
    for (name, family) in owsg_wb::experiments::fixture_families().map_err(|e| e.to_string())? {
        let body = owsg_wb::fixtures::family_manifest(&name, &family);
        atomic_write(&format!("{dir}/{name}.txt"), &body)?;
    }
    let record = owsg_wb::experiments::qpotp_fixture_record_text().map_err(|e| e.to_string())?;
    atomic_write(&format!("{dir}/toy-qpotp.txt"), &record)?;
    Ok(())
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match parse_cli(&args) {
        Ok(cli) => cli,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    if let Some(dir) = &cli.write_fixtures {
        return match write_fixture_files(dir) {
            Ok(()) => ExitCode::SUCCESS,
            Err(msg) => {
                eprintln!("{msg}");
                ExitCode::from(2)
            }
        };
    }
    let rows = if cli.is_suite {
        let names: Vec<&str> = match &cli.suite_only {
            Some(list) => list.iter().map(String::as_str).collect(),
            None => SUITE.to_vec(),
        };
        suite(&names, cli.seed, cli.dim_cap, cli.scale_loops, cli.timing)
    } else {
        let name = cli.experiment.as_deref().expect("verb parsed");
        let mut config = ExperimentConfig::new(name, cli.seed);
        config.params = cli.params.clone();
        config.dim_cap = cli.dim_cap;
        config.scale_loops = cli.scale_loops;
        config.timing = cli.timing;
        run(&config)
    };
    match rows {
        Ok(rows) => {
            if let Err(msg) = write_report(&cli, &rows) {
                eprintln!("{msg}");
                return ExitCode::from(2);
            }
            if rows.iter().all(|r| r.pass) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
