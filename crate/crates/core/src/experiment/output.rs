use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::config::ExperimentConfig;
use super::run::{ResultBundle, Runtime, Summary};
use crate::error::{Error, Result};
use crate::rmtstats::{spacing_histogram, surmise_pdf, Ensemble};

/// Step of the tabulated surmise curves.
pub const CURVE_STEP: f64 = 0.01;

pub fn write_outputs(bundle: &ResultBundle, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(&bundle.summary)?,
    )?;
    fs::write(dir.join("spacings.csv"), spacings_csv(bundle))?;
    let h = bundle.summary.config.histogram;
    emit_figure_data(bundle, dir, h.s_max, h.bin_width)
}

pub(crate) fn write_failure(
    config: &ExperimentConfig,
    err: &Error,
    wall_seconds: f64,
    dir: &Path,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let summary = Summary {
        status: "failed".into(),
        error: Some(err.to_string()),
        config: config.clone(),
        unfolding: None,
        modes: Vec::new(),
        sectors: Vec::new(),
        spacing_count: 0,
        ks: None,
        classification: None,
        number_variance: Vec::new(),
        runtime: Runtime {
            wall_seconds,
            matvecs: 0,
        },
    };
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    Ok(())
}

fn spacings_csv(bundle: &ResultBundle) -> String {
    let mut out = String::new();
    if let Some(u) = &bundle.summary.unfolding {
        let _ = writeln!(
            out,
            "# unfolding {} degree {} trim {} zero_cutoff {:e}",
            u.methods.join("+"),
            u.degree,
            u.trim_fraction,
            u.zero_cutoff
        );
    }
    for s in &bundle.summary.sectors {
        let _ = writeln!(
            out,
            "# mode {} n_up {} levels {} discarded {} trimmed_per_edge {}",
            s.mode,
            s.n_up,
            s.level_count,
            s.discarded_count,
            bundle
                .sectors
                .iter()
                .find(|d| d.mode == s.mode && d.spectrum.source().n_up == Some(s.n_up))
                .map_or(0, |d| d.unfolded.trimmed()),
        );
    }
    out.push_str("model_id,n_up,index,spacing\n");
    for d in &bundle.sectors {
        let (id, n_up) = d
            .sample
            .provenance()
            .first()
            .map(|p| (p.model_id.as_str(), p.n_up))
            .unwrap_or(("", None));
        let n_up = n_up.map(|z| z.to_string()).unwrap_or_default();
        for (i, s) in d.sample.spacings().iter().enumerate() {
            let _ = writeln!(out, "{id},{n_up},{i},{s:.12e}");
        }
    }
    out
}

/// Writes `histogram.csv` (pooled spacing density) and `surmise_curves.csv`
/// (the three reference densities on a grid up to `s_max`).
pub fn emit_figure_data(bundle: &ResultBundle, dir: &Path, s_max: f64, bin_width: f64) -> Result<()> {
    fs::create_dir_all(dir)?;
    let hist = spacing_histogram(&bundle.pooled, bin_width, s_max)?;
    let mut out = String::from("bin_center,density\n");
    for (c, d) in hist {
        let _ = writeln!(out, "{c:.6},{d:.10}");
    }
    fs::write(dir.join("histogram.csv"), out)?;

    let steps = (s_max / CURVE_STEP).round() as usize;
    let mut out = String::from("s,poisson,goe,gue\n");
    for i in 0..=steps {
        let s = i as f64 * CURVE_STEP;
        let _ = writeln!(
            out,
            "{s:.4},{:.10},{:.10},{:.10}",
            surmise_pdf(Ensemble::Poisson, s)?,
            surmise_pdf(Ensemble::Goe, s)?,
            surmise_pdf(Ensemble::Gue, s)?
        );
    }
    fs::write(dir.join("surmise_curves.csv"), out)?;
    Ok(())
}
