use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use mismatch_qpt::circuit::{build_cnot, parse_circuit, Circuit, TauParams, TAU_COUNT};
use mismatch_qpt::fitting::{fit, FitConfig, FitResult};
use mismatch_qpt::synth::synthesize;
use mismatch_qpt::tomography::{
    ideal_cnot_chi, model_matrix, process_fidelity, reconstruct_chi, ChiJson, ChiMatrix, MeasMatrix,
    DATA_BLOCK_TOLERANCE,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{CliError, Context};
use crate::manifest::RunManifest;
use crate::{
    Cli, Command, FidelityArgs, FitArgs, Format, QptArgs, ReplayArgs, SimulateArgs, SweepArgs, SynthArgs,
};

/// Lowest χ eigenvalue still accepted as physical.
const EIGENVALUE_FLOOR: f64 = -1e-9;

/// What a command produced, for the manifest.
struct Outcome {
    inputs: Vec<PathBuf>,
    config: serde_json::Value,
    seed: Option<u64>,
}

pub fn dispatch(cli: Cli, argv: Vec<OsString>) -> Result<(), CliError> {
    let started = Instant::now();
    let (name, output, outcome) = match &cli.command {
        Command::Simulate(a) => ("simulate", a.out.output.clone(), simulate(a)?),
        Command::Fit(a) => ("fit", a.out.output.clone(), fit_cmd(a)?),
        Command::Qpt(a) => ("qpt", a.out.output.clone(), qpt(a)?),
        Command::Fidelity(a) => ("fidelity", a.out.output.clone(), fidelity(a)?),
        Command::Synth(a) => ("synth", a.out.output.clone(), synth(a)?),
        Command::Sweep(a) => ("sweep", a.out.output.clone(), sweep(a)?),
        Command::Replay(a) => return replay(a),
    };

    let mut args: Vec<String> = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    // A seed taken from the environment must still be replayable.
    if let Some(seed) = outcome.seed {
        args.extend(["--seed".to_string(), seed.to_string()]);
    }
    RunManifest {
        command: name.to_string(),
        args,
        inputs: outcome.inputs,
        output,
        config: outcome.config,
        seed: outcome.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_seconds: started.elapsed().as_secs_f64(),
    }
    .emit(cli.manifest.as_deref())
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(CliError::io(p)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(CliError::io(path))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("value serializes") + "\n"
}

fn simulate(a: &SimulateArgs) -> Result<Outcome, CliError> {
    let (circuit, name, inputs): (Circuit, String, Vec<PathBuf>) = match &a.circuit {
        Some(path) => (
            parse_circuit(&read(path)?).context(path.display().to_string())?,
            path.display().to_string(),
            vec![path.clone()],
        ),
        None => (build_cnot(), "cnot".into(), vec![]),
    };
    let (control, target) = a.basis;
    let prediction = circuit
        .predict(&a.tau, a.input, control, target)
        .context("simulation")?;
    let conditional = prediction.conditional().context("simulation")?;

    let mut text = String::new();
    match a.format {
        Format::Text => {
            let _ = writeln!(text, "circuit  {name}");
            let _ = writeln!(text, "tau      {}", a.tau);
            let _ = writeln!(text, "input    {}", a.input);
            let _ = writeln!(text, "outcome  probability  joint");
            for ((o, p), j) in prediction.outcomes.iter().zip(conditional).zip(prediction.joint) {
                let _ = writeln!(text, "{:<8} {p:<12.6} {j:.6}", o.to_string());
            }
            let _ = writeln!(text, "success  {:.6}", prediction.success());
        }
        Format::Csv => {
            text.push_str("outcome,probability,joint\n");
            for ((o, p), j) in prediction.outcomes.iter().zip(conditional).zip(prediction.joint) {
                let _ = writeln!(text, "{o},{p},{j}");
            }
            let _ = writeln!(text, "success,,{}", prediction.success());
        }
    }
    write_output(a.out.output.as_deref(), &text)?;
    Ok(Outcome {
        inputs,
        config: json!({
            "circuit": name,
            "tau": a.tau,
            "input": a.input.to_string(),
            "basis": [control, target],
        }),
        seed: None,
    })
}

fn fit_cmd(a: &FitArgs) -> Result<Outcome, CliError> {
    let data = MeasMatrix::from_csv(&read(&a.data)?).context(a.data.display().to_string())?;
    data.check_normalization(DATA_BLOCK_TOLERANCE)
        .context(a.data.display().to_string())?;
    let config = FitConfig {
        bound: a.bound,
        restarts: a.restarts,
        seed: a.seed,
        mode: a.mode.into(),
        subset: a.subset.into(),
        ..FitConfig::default()
    };
    let result = fit(&data, &config).context("fit")?;
    write_output(a.out.output.as_deref(), &to_json(&result))?;
    Ok(Outcome {
        inputs: vec![a.data.clone()],
        config: serde_json::to_value(&config).expect("config serializes"),
        seed: Some(a.seed),
    })
}

#[derive(Serialize)]
struct QptReport {
    tau: TauParams,
    process_fidelity: f64,
    min_eigenvalue: f64,
    eigenvalue_floor: f64,
    physical: bool,
    chi: ChiJson,
}

fn qpt(a: &QptArgs) -> Result<Outcome, CliError> {
    let (tau, inputs) = match (&a.tau, &a.fit_result) {
        (Some(t), _) => (*t, vec![]),
        (None, Some(path)) => {
            let fit: FitResult = serde_json::from_str(&read(path)?)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
            (fit.tau, vec![path.clone()])
        }
        (None, None) => return Err(CliError::Usage("either --tau or --fit-result is required".into())),
    };
    let chi = reconstruct_chi(&tau).context("process tomography")?;
    let min_eigenvalue = chi.min_eigenvalue();
    let report = QptReport {
        tau,
        process_fidelity: process_fidelity(&chi, &ideal_cnot_chi()).context("process fidelity")?,
        min_eigenvalue,
        eigenvalue_floor: EIGENVALUE_FLOOR,
        physical: min_eigenvalue >= EIGENVALUE_FLOOR,
        chi: chi.to_json(),
    };
    write_output(a.out.output.as_deref(), &to_json(&report))?;
    Ok(Outcome {
        inputs,
        config: json!({ "tau": tau }),
        seed: None,
    })
}

/// A bare χ file or a `qpt` report containing one.
#[derive(Deserialize)]
#[serde(untagged)]
enum ChiFile {
    Bare(ChiJson),
    Report { chi: ChiJson },
}

fn load_chi(path: &Path) -> Result<ChiMatrix, CliError> {
    let file: ChiFile = serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Invalid(format!("{}: not a χ matrix: {e}", path.display())))?;
    let json = match file {
        ChiFile::Bare(j) | ChiFile::Report { chi: j } => j,
    };
    ChiMatrix::from_json(&json).context(path.display().to_string())
}

fn fidelity(a: &FidelityArgs) -> Result<Outcome, CliError> {
    let f = process_fidelity(&load_chi(&a.first)?, &load_chi(&a.second)?).context("process fidelity")?;
    write_output(
        a.out.output.as_deref(),
        &to_json(&json!({ "process_fidelity": f })),
    )?;
    Ok(Outcome {
        inputs: vec![a.first.clone(), a.second.clone()],
        config: json!({}),
        seed: None,
    })
}

fn synth(a: &SynthArgs) -> Result<Outcome, CliError> {
    let model = model_matrix(&a.tau).context("model")?;
    let data = synthesize(&model, a.counts, a.seed).context("sampling")?;
    write_output(a.out.output.as_deref(), &data.to_csv())?;
    Ok(Outcome {
        inputs: vec![],
        config: json!({ "tau": a.tau, "counts": a.counts }),
        seed: Some(a.seed),
    })
}

fn sweep(a: &SweepArgs) -> Result<Outcome, CliError> {
    let base = a.tau.unwrap_or_else(TauParams::reference);
    let ideal = ideal_cnot_chi();
    let mut text = String::from("parameter");
    for k in 1..=TAU_COUNT {
        let _ = write!(text, ",tau{k}");
    }
    text.push_str(",process_fidelity\n");
    for i in 0..a.points {
        let s = a.from + (a.to - a.from) * f64::from(i) / f64::from(a.points - 1);
        let tau = match a.component {
            None => base.scaled(s),
            Some(k) => {
                let mut v = *base.values();
                v[usize::from(k) - 1] = s;
                TauParams::new(v).context("sweep point")?
            }
        };
        let chi = reconstruct_chi(&tau).context("process tomography")?;
        let f = process_fidelity(&chi, &ideal).context("process fidelity")?;
        let _ = write!(text, "{s}");
        for v in tau.values() {
            let _ = write!(text, ",{v}");
        }
        let _ = writeln!(text, ",{f}");
    }
    write_output(a.out.output.as_deref(), &text)?;
    Ok(Outcome {
        inputs: vec![],
        config: json!({
            "tau": base,
            "component": a.component,
            "from": a.from,
            "to": a.to,
            "points": a.points,
        }),
        seed: None,
    })
}

fn replay(a: &ReplayArgs) -> Result<(), CliError> {
    let manifest = RunManifest::read(&a.manifest_file)?;
    if manifest.command == "replay" {
        return Err(CliError::Invalid("a replay manifest cannot be replayed".into()));
    }
    let mut argv: Vec<OsString> = std::iter::once(OsString::from("mismatch-qpt"))
        .chain(manifest.args.iter().map(OsString::from))
        .collect();
    if let Some(out) = &a.output {
        argv.extend([OsString::from("--output"), out.clone().into_os_string()]);
    }
    let cli = crate::Cli::try_parse_from_manifest(&argv)?;
    dispatch(cli, argv)
}
