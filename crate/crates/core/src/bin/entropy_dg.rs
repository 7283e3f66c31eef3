//! `entropy-dg <experiment> [options]`: run one experiment and write its
//! CSV/SVG artifacts.

use entropy_dg::harness::{parse_config, ExperimentId, ExperimentSpec};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

const USAGE: &str = "usage: entropy-dg <experiment> [options]

experiments:
  ops-check flux-check entropy-wave pulse-1d sod sine-shock
  pulse-2d vortex riemann-2d projection-study burgers-equivalence

options:
  --config FILE     read a key = value config file (sections per experiment)
  --n LIST          polynomial degrees, e.g. 1,2,3
  --k LIST          mesh sizes (elements in 1D, quads per side in 2D)
  --cfl LIST        CFL numbers
  --quad LIST       gll | gauss1 | gauss2 | tri2n
  --flux MODE       ec | eclf
  --t-final X       final time
  --eps-log X       logarithmic-mean switch tolerance
  --output-every N  diagnostics cadence in steps
  --out DIR         output directory (default: out)
  --threads N       worker threads (1 = deterministic reference)
  --dump            dump operator matrices (ops-check)
";

fn parse_args() -> Result<ExperimentSpec, entropy_dg::Error> {
    let mut args = std::env::args().skip(1);
    let first = args
        .next()
        .ok_or_else(|| entropy_dg::Error::Config("missing experiment name".into()))?;
    if first == "--help" || first == "-h" {
        print!("{USAGE}");
        std::process::exit(0);
    }
    let id = ExperimentId::from_str(&first)?;

    // collect flags first so --config applies before overrides
    let mut flags: Vec<(String, Option<String>)> = Vec::new();
    while let Some(flag) = args.next() {
        let needs_value = flag != "--dump";
        let value = if needs_value {
            Some(args.next().ok_or_else(|| {
                entropy_dg::Error::Config(format!("flag {flag} requires a value"))
            })?)
        } else {
            None
        };
        flags.push((flag, value));
    }

    let mut spec = ExperimentSpec::defaults(id);
    if let Some((_, Some(path))) = flags.iter().find(|(f, _)| f == "--config") {
        spec = parse_config(&PathBuf::from(path), id)?;
    }
    for (flag, value) in &flags {
        let v = value.as_deref().unwrap_or("");
        match flag.as_str() {
            "--config" => {}
            "--dump" => spec.dump = true,
            "--n" => apply(&mut spec, "n", v)?,
            "--k" => apply(&mut spec, "k", v)?,
            "--cfl" => apply(&mut spec, "cfl", v)?,
            "--quad" => apply(&mut spec, "quad", v)?,
            "--flux" => apply(&mut spec, "flux", v)?,
            "--t-final" => apply(&mut spec, "t-final", v)?,
            "--eps-log" => apply(&mut spec, "eps-log", v)?,
            "--output-every" => apply(&mut spec, "output-every", v)?,
            "--out" => apply(&mut spec, "out", v)?,
            "--threads" => apply(&mut spec, "threads", v)?,
            other => {
                return Err(entropy_dg::Error::Config(format!("unknown flag `{other}`")))
            }
        }
    }
    spec.validate()?;
    Ok(spec)
}

/// Route one flag through the config-key parser so flags and files share
/// validation, then copy the single updated field onto `spec`.
fn apply(spec: &mut ExperimentSpec, key: &str, value: &str) -> Result<(), entropy_dg::Error> {
    let text = format!("[{}]\n{key} = {value}\n", spec.id.name());
    let parsed = entropy_dg::harness::parse_config_str(&text, spec.id)?;
    match key {
        "n" => spec.n_values = parsed.n_values,
        "k" => spec.k_values = parsed.k_values,
        "cfl" => spec.cfl_values = parsed.cfl_values,
        "quad" => spec.quads = parsed.quads,
        "flux" => spec.flux = parsed.flux,
        "t-final" => spec.t_final = parsed.t_final,
        "eps-log" => spec.eps_log = parsed.eps_log,
        "output-every" => spec.output_every = parsed.output_every,
        "out" => spec.out_dir = parsed.out_dir,
        "threads" => spec.threads = parsed.threads,
        _ => unreachable!("flag list is fixed"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let spec = match parse_args() {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("entropy-dg: {e}");
            eprint!("{USAGE}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.threads)
        .build_global();
    match entropy_dg::harness::run_experiment(&spec) {
        Ok(()) => {
            println!(
                "{}: artifacts in {}",
                spec.id.name(),
                spec.out_dir.join(spec.id.name()).display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}: {e}", spec.id.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
