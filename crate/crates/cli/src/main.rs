use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nesslsd::experiment::{
    exit_code, find_preset, list_presets, run_experiment, ExperimentConfig, ResultBundle, Scale,
};
use nesslsd::Error;

/// Level-spacing statistics of steady states and decay modes of
/// boundary-driven XXZ chains.
#[derive(Debug, Parser)]
#[command(name = "nesslsd", version)]
struct Args {
    /// JSON experiment configuration.
    #[arg(long, conflicts_with_all = ["preset", "list_presets"])]
    config: Option<PathBuf>,

    /// Named figure preset (see --list-presets).
    #[arg(long)]
    preset: Option<String>,

    #[arg(long, default_value = "desk", value_parser = parse_scale)]
    scale: Scale,

    /// Output directory. Presets with several runs get one subdirectory each.
    #[arg(long)]
    out_dir: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    /// Relative residual tolerance of the Krylov solvers.
    #[arg(long)]
    tol: Option<f64>,

    /// Matrix-vector product budget per Krylov solve.
    #[arg(long)]
    max_iter: Option<usize>,

    /// Print the preset catalogue as JSON and exit.
    #[arg(long)]
    list_presets: bool,
}

fn parse_scale(s: &str) -> Result<Scale, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn configs(args: &Args) -> nesslsd::Result<Vec<ExperimentConfig>> {
    let mut configs = match (&args.config, &args.preset) {
        (Some(path), None) => vec![ExperimentConfig::from_file(path)?],
        (None, Some(name)) => find_preset(name)?.configs(args.scale).to_vec(),
        _ => {
            return Err(Error::InvalidArgument(
                "exactly one of --config or --preset is required".into(),
            ))
        }
    };
    for cfg in &mut configs {
        if let Some(seed) = args.seed {
            cfg.seed = seed;
        }
        if let Some(tol) = args.tol {
            cfg.solver.tol = tol;
        }
        if let Some(max_iter) = args.max_iter {
            cfg.solver.max_iter = max_iter;
        }
        cfg.validate()?;
        cfg.check_runnable()?;
    }
    Ok(configs)
}

fn report(bundle: &ResultBundle) {
    let s = &bundle.summary;
    let ks = s
        .ks
        .map(|k| format!("ks poisson {:.4} goe {:.4} gue {:.4}", k.poisson, k.goe, k.gue))
        .unwrap_or_else(|| "ks n/a".into());
    let class = s
        .classification
        .map(|c| format!("{c:?}").to_lowercase())
        .unwrap_or_else(|| "unclassified".into());
    println!(
        "{}: {} spacings, {ks}, {class}, {:.1} s",
        s.config.name, s.spacing_count, s.runtime.wall_seconds
    );
}

fn run(args: &Args) -> nesslsd::Result<()> {
    if args.list_presets {
        println!("{}", serde_json::to_string_pretty(&list_presets())?);
        return Ok(());
    }
    let configs = configs(args)?;
    let nested = configs.len() > 1;
    let mut index = Vec::new();
    for mut cfg in configs {
        if let Some(dir) = &args.out_dir {
            cfg.out_dir = Some(if nested { dir.join(&cfg.name) } else { dir.clone() });
        }
        let bundle = run_experiment(&cfg)?;
        report(&bundle);
        index.push(serde_json::json!({
            "name": cfg.name,
            "spacing_count": bundle.summary.spacing_count,
            "ks": bundle.summary.ks,
            "classification": bundle.summary.classification,
        }));
    }
    if let (true, Some(dir)) = (nested, &args.out_dir) {
        std::fs::write(dir.join("index.json"), serde_json::to_string_pretty(&index)?)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err) as u8)
        }
    }
}
