use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::Value;
use singlet_core::pipeline::{histogram, invariance, project, simulate_run, witness_analysis};
use singlet_core::report::{
    histogram_json, invariance_json, pipeline_json, projection_json, read_counts_csv,
    simulated_run_json, witness_json, write_amplitudes_csv, write_histogram_csv,
    write_invariance_csv, write_terms_csv,
};
use singlet_core::witness::{diff_against_golden, parse_golden, REFERENCE_TERMS};
use singlet_core::{
    run_pipeline, witness_expectation_from_counts, BootstrapConfig, CountsTable, LetterBasis,
    MeasurementSetting, Spatial,
};

use crate::args::{
    Format, HistogramArgs, InvarianceArgs, OutputArgs, PipelineArgs, ProjectArgs, ReportBasis,
    WitnessArgs,
};

const GOLDEN_TOL: f64 = 1e-9;

fn emit<F>(output: &OutputArgs, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match &output.out {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush()
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_json(w: &mut dyn Write, v: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, v)?;
    writeln!(w)?;
    Ok(())
}

pub fn pipeline(args: &PipelineArgs) -> Result<()> {
    let cfg = args.config.resolve()?;
    let run = run_pipeline(&cfg)?;
    log::info!(
        "success probability {:.12}, singlet fidelity {:.12}",
        run.success_probability,
        run.singlet_fidelity
    );
    emit(&args.output, |w| match args.output.format {
        Format::Json => write_json(w, &pipeline_json(&cfg, &run)),
        Format::Csv => Ok(write_amplitudes_csv(w, &run.state)?),
    })
}

pub fn histogram_cmd(args: &HistogramArgs) -> Result<()> {
    let cfg = args.config.resolve()?;
    let setting = MeasurementSetting::parse(&args.setting, 6)?;
    let report = histogram(&cfg, &setting)?;
    match &report.estimate {
        Some(e) => eprintln!(
            "setting {setting}: theory correlation {:.6}, estimate {:.6} +- {:.6} from {} events",
            report.theory_correlation, e.value, e.stderr, e.total
        ),
        None => eprintln!(
            "setting {setting}: theory correlation {:.6}",
            report.theory_correlation
        ),
    }
    emit(&args.output, |w| match args.output.format {
        Format::Json => write_json(w, &histogram_json(&cfg, &report)),
        Format::Csv => Ok(write_histogram_csv(
            w,
            &report.theory,
            report.counts.as_ref(),
        )?),
    })
}

pub fn project_cmd(args: &ProjectArgs) -> Result<()> {
    let cfg = args.config.resolve()?;
    let mode = Spatial::parse(&args.mode)
        .filter(|m| Spatial::OUTPUTS.contains(m))
        .ok_or_else(|| anyhow!("mode {:?} is not one of a..f", args.mode))?;
    let basis = match args.basis {
        ReportBasis::Hv => LetterBasis::Hv,
        ReportBasis::Da => LetterBasis::Da,
    };
    let report = project(&cfg, mode, args.bra, basis)?;
    match report.reference_fidelity {
        Some(f) if f < 1.0 - 1e-9 => {
            log::warn!("conditional state differs from the closed form: fidelity {f:.6}")
        }
        _ => {}
    }
    emit(&args.output, |w| match args.output.format {
        Format::Json => write_json(w, &projection_json(&cfg, &report)),
        Format::Csv => Ok(write_histogram_csv(w, &report.distribution, None)?),
    })
}

fn read_counts(paths: &[impl AsRef<Path>]) -> Result<Vec<CountsTable>> {
    paths
        .iter()
        .map(|p| {
            let p = p.as_ref();
            let file = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            read_counts_csv(file).with_context(|| format!("reading counts {}", p.display()))
        })
        .collect()
}

pub fn witness_cmd(args: &WitnessArgs) -> Result<()> {
    let cfg = args.config.resolve()?;
    let analysis = witness_analysis(&cfg)?;

    let golden_text = match &args.golden {
        Some(path) => std::fs::read_to_string(path)
            .with_context(|| format!("reading reference terms {}", path.display()))?,
        None => REFERENCE_TERMS.to_string(),
    };
    let golden = parse_golden(&golden_text).context("parsing reference terms")?;
    let diff = diff_against_golden(&analysis.reduced, &golden, GOLDEN_TOL);
    if !diff.is_clean() {
        log::warn!(
            "{} of {} reference terms differ from the computed reduced witness ({} by sign only)",
            diff.mismatches.len(),
            diff.compared,
            diff.sign_flips(GOLDEN_TOL)
        );
    }

    let simulated = match &args.counts {
        None if cfg.shots > 0 => Some(simulate_run(&cfg)?),
        _ => None,
    };
    let tables = match (&args.counts, &simulated) {
        (Some(paths), _) => Some(read_counts(paths)?),
        (None, Some(run)) => Some(run.tables.clone()),
        (None, None) => None,
    };
    let estimate = match &tables {
        Some(t) => {
            if args.resamples < 2 {
                bail!("--resamples must be at least 2");
            }
            let boot = BootstrapConfig {
                resamples: args.resamples,
                seed: cfg.seed,
                significance: args.significance,
            };
            Some(witness_expectation_from_counts(
                &analysis.reduced,
                t,
                &boot,
            )?)
        }
        None => None,
    };
    if let Some(e) = &estimate {
        eprintln!(
            "reduced witness from counts: {:.6} +- {:.6} ({:?})",
            e.expectation, e.stderr, e.verdict
        );
    }

    emit(&args.output, |w| match args.output.format {
        Format::Json => {
            let mut v = witness_json(&cfg, &analysis, estimate.as_ref(), Some(&diff));
            if let Some(run) = &simulated {
                v["simulated_run"] = simulated_run_json(run);
            }
            write_json(w, &v)
        }
        Format::Csv => Ok(write_terms_csv(w, analysis.reduced.form())?),
    })
}

pub fn invariance_cmd(args: &InvarianceArgs) -> Result<()> {
    let cfg = args.config.resolve()?;
    let report = invariance(&cfg, args.trials)?;
    eprintln!(
        "invariance over {} trials: {}",
        report.trials,
        if report.passed { "passed" } else { "FAILED" }
    );
    emit(&args.output, |w| match args.output.format {
        Format::Json => write_json(w, &invariance_json(&report)),
        Format::Csv => Ok(write_invariance_csv(w, &report)?),
    })
}
