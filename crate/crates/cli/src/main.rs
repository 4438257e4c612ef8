use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use kdwit::case_studies::{haar_genericity_study_with_eps, run_spin1_report_with};
use kdwit::geometry::{facet_enumeration, membership_lp, Verdict};
use kdwit::incompatibility::{complete_incompatibility, support_counts_mixed, support_counts_pure};
use kdwit::io::{parse_documents, pure_state_json, MatrixDocument, RunReport, StateInput, Timing};
use kdwit::kd::{kd_table, DensityMatrix, PureState, TransitionMatrix};
use kdwit::pure_positive::{enumerate_min_uncertainty_states, filter_kd_positive_pure};
use kdwit::roof::{nonpositivity_roof_bounds, support_roof_bounds, RoofConfig, RoofEstimate};
use kdwit::{Error, Tolerances};

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_INDETERMINATE: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

/// Kirkwood-Dirac quasiprobabilities, nonpositivity witnesses and convex-roof bounds.
#[derive(Parser, Debug)]
#[command(name = "kdwit", version)]
struct Cli {
    /// Emit a machine-readable JSON report on stdout.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// KD table, marginals, total nonpositivity and positivity verdict.
    Table {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        basis: PathBuf,
    },
    /// Support counts n_A, n_B of a pure or mixed state.
    Support {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        basis: PathBuf,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Complete-incompatibility test over all minors.
    Incompat {
        #[arg(long)]
        basis: PathBuf,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Pure states of minimal support uncertainty and the KD-positive ones.
    Enumerate {
        #[arg(long)]
        basis: PathBuf,
    },
    /// Convex-hull membership with a certificate.
    Hull {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        generators: Vec<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Facets of the convex hull of the generators.
    Facets {
        #[arg(long, num_args = 1.., required = true)]
        generators: Vec<PathBuf>,
    },
    /// Bounds on the convex roof of the support uncertainty.
    RoofSupport {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        basis: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Bounds on the convex roof of the total nonpositivity.
    RoofNonpos {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        basis: PathBuf,
        /// Pure KD-positive states, assumed complete.
        #[arg(long)]
        positive_pure: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Every quantitative check of the spin-1 counterexample; exit 0 iff all pass.
    Spin1 {
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Fraction of Haar-random transition matrices that are completely incompatible.
    HaarStudy {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        eps: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
}

impl SearchArgs {
    fn config(&self, base: RoofConfig) -> RoofConfig {
        RoofConfig {
            seed: self.seed,
            restarts: self.restarts.unwrap_or(base.restarts),
            steps: self.steps.unwrap_or(base.steps),
            ..base
        }
    }
}

/// Command failure with the exit code it maps to.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match e {
            Error::Indeterminate { .. } => (EXIT_INDETERMINATE, "indeterminate"),
            ref e if e.is_validation() => (EXIT_VALIDATION, "validation"),
            _ => (EXIT_INTERNAL, "internal"),
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

struct Inputs {
    hasher: Sha256,
    tol: Tolerances,
}

impl Inputs {
    fn read(&mut self, path: &PathBuf) -> Result<Vec<MatrixDocument>, Failure> {
        let bytes = std::fs::read(path).map_err(|e| Failure {
            code: EXIT_VALIDATION,
            kind: "validation",
            message: format!("{}: {e}", path.display()),
        })?;
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(&bytes);
        let text = String::from_utf8_lossy(&bytes);
        Ok(parse_documents(&text, &path.display().to_string())?)
    }

    fn single(&mut self, path: &PathBuf) -> Result<MatrixDocument, Failure> {
        let mut docs = self.read(path)?;
        if docs.len() != 1 {
            return Err(Error::Parse {
                location: path.display().to_string(),
                message: format!("expected one document, found {}", docs.len()),
            }
            .into());
        }
        Ok(docs.remove(0))
    }

    fn basis(&mut self, path: &PathBuf) -> Result<TransitionMatrix, Failure> {
        Ok(self.single(path)?.into_transition(self.tol.validation)?)
    }

    fn state(&mut self, path: &PathBuf) -> Result<StateInput, Failure> {
        Ok(self.single(path)?.into_state(self.tol.validation)?)
    }

    fn states(&mut self, paths: &[PathBuf]) -> Result<Vec<StateInput>, Failure> {
        let mut out = Vec::new();
        for p in paths {
            for doc in self.read(p)? {
                out.push(doc.into_state(self.tol.validation)?);
            }
        }
        Ok(out)
    }

    fn digest(&self) -> String {
        hex::encode(self.hasher.clone().finalize())
    }
}

fn check_dims(expected: usize, found: usize) -> Result<(), Failure> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found }.into());
    }
    Ok(())
}

fn roof_text(e: &RoofEstimate) -> String {
    let rel = if e.lower_bound.strict { ">" } else { ">=" };
    let mut s = format!(
        "lower bound: {rel} {:.9} ({:?})\nupper bound: {:.9} ({:?}, {} terms)\n",
        e.lower_bound.value,
        e.lower_bound.kind,
        e.upper_bound,
        e.upper_source,
        e.decomposition.len()
    );
    if let Some(v) = e.value() {
        s.push_str(&format!("exact: {v:.9}\n"));
    }
    if let Some(m) = &e.membership {
        s.push_str(&format!(
            "hull membership: {:?} (margin {:.3e})\n",
            m.verdict, m.margin
        ));
    }
    for a in &e.assumptions {
        s.push_str(&format!("assumption: {a}\n"));
    }
    s
}

struct Outcome {
    config: Value,
    results: Value,
    certificates: Value,
    text: String,
    /// Exit code for a completed run, e.g. failed checks.
    code: u8,
}

impl Outcome {
    fn ok(config: Value, results: Value, certificates: Value, text: String) -> Self {
        Self {
            config,
            results,
            certificates,
            text,
            code: 0,
        }
    }
}

fn run(command: &Command, inputs: &mut Inputs) -> Result<Outcome, Failure> {
    let tol = inputs.tol;
    match command {
        Command::Table { state, basis } => {
            let rho = inputs.state(state)?;
            let u = inputs.basis(basis)?;
            check_dims(u.dim(), rho.dim())?;
            let table = kd_table(&rho.to_density(), &u)?;
            let report = table.positivity(tol.positivity);
            let n = table.total_nonpositivity();
            let mut text = String::from("Q =\n");
            for i in 0..table.dim {
                let row: Vec<String> = (0..table.dim)
                    .map(|j| {
                        let z = table.entry(i, j);
                        format!("{:>10.6}{:+.6}i", z.re, z.im)
                    })
                    .collect();
                text.push_str(&format!("  {}\n", row.join("  ")));
            }
            text.push_str(&format!(
                "A marginals: {:?}\nB marginals: {:?}\n",
                table.a_marginals, table.b_marginals
            ));
            text.push_str(&format!("N = {n:.12}\nKD positive: {}\n", report.positive));
            Ok(Outcome::ok(
                json!({ "tolerances": tol, "state": state, "basis": basis }),
                json!({
                    "table": json!(&table),
                    "total_nonpositivity": n,
                    "marginal_defect": table.marginal_defect(),
                    "positivity": json!(&report),
                }),
                Value::Null,
                text,
            ))
        }
        Command::Support { state, basis, eps } => {
            let rho = inputs.state(state)?;
            let u = inputs.basis(basis)?;
            check_dims(u.dim(), rho.dim())?;
            let eps = eps.unwrap_or(tol.support_eps);
            let (mode, counts) = match &rho {
                StateInput::Pure(p) => ("pure", support_counts_pure(p, &u, eps)?),
                StateInput::Mixed(m) => ("mixed", support_counts_mixed(m, &u, eps)?),
            };
            let text = format!(
                "{mode}: n_A = {}, n_B = {}, n_AB = {}\n",
                counts.n_a,
                counts.n_b,
                counts.n_ab()
            );
            Ok(Outcome::ok(
                json!({ "tolerances": tol, "eps": eps, "state": state, "basis": basis }),
                json!({ "mode": mode, "counts": json!(&counts), "n_ab": counts.n_ab() }),
                Value::Null,
                text,
            ))
        }
        Command::Incompat { basis, eps } => {
            let u = inputs.basis(basis)?;
            let eps = eps.unwrap_or(tol.minor_eps);
            let r = complete_incompatibility(&u, eps)?;
            let to_one = |v: &[usize]| v.iter().map(|i| i + 1).collect::<Vec<_>>();
            let text = format!(
                "completely incompatible: {}\nminors checked: {}\nsmallest |minor| = {:.3e} (order {}, rows {:?}, cols {:?}, 1-based)\n",
                r.completely_incompatible,
                r.minors_checked,
                r.min_abs_minor,
                r.argmin.order,
                to_one(&r.argmin.rows),
                to_one(&r.argmin.cols)
            );
            Ok(Outcome::ok(
                json!({ "tolerances": tol, "eps": eps, "basis": basis }),
                json!(&r),
                Value::Null,
                text,
            ))
        }
        Command::Enumerate { basis } => {
            let u = inputs.basis(basis)?;
            let all = enumerate_min_uncertainty_states(&u, tol.support_eps)?;
            let pos = filter_kd_positive_pure(&all, &u, tol.positivity)?;
            let positive_idx: Vec<usize> = pos
                .states
                .iter()
                .filter_map(|s| all.position(s, 0.0))
                .collect();
            let mut text = format!(
                "{} minimal-uncertainty states, {} KD positive\n",
                all.len(),
                pos.len()
            );
            for (k, (s, p)) in all.states.iter().zip(&all.patterns).enumerate() {
                let amps: Vec<String> = s
                    .amplitudes()
                    .iter()
                    .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
                    .collect();
                let mark = if positive_idx.contains(&k) {
                    "KD+"
                } else {
                    "   "
                };
                text.push_str(&format!(
                    "{k:>3} {mark} S={:?} T={:?} [{}]\n",
                    p.s,
                    p.t,
                    amps.join(", ")
                ));
            }
            Ok(Outcome::ok(
                json!({ "tolerances": tol, "basis": basis }),
                json!({
                    "count": all.len(),
                    "states": all.states.iter().map(pure_state_json).collect::<Vec<_>>(),
                    "patterns": json!(&all.patterns),
                    "non_generic": json!(&all.non_generic),
                    "kd_positive_indices": positive_idx,
                    "kd_positive_count": pos.len(),
                }),
                Value::Null,
                text,
            ))
        }
        Command::Hull {
            state,
            generators,
            tol: lp_tol,
        } => {
            let rho = inputs.state(state)?.to_density();
            let gens: Vec<DensityMatrix> = inputs
                .states(generators)?
                .iter()
                .map(StateInput::to_density)
                .collect();
            let lp_tol = lp_tol.unwrap_or(tol.lp_feasibility);
            let cert = membership_lp(&rho, &gens, lp_tol)?;
            let text = format!("verdict: {:?}\nmargin: {:.6e}\n", cert.verdict, cert.margin);
            let config = json!({ "tolerances": tol, "lp_tolerance": lp_tol, "state": state, "generators": generators });
            if cert.verdict == Verdict::Indeterminate {
                return Err(Failure {
                    code: EXIT_INDETERMINATE,
                    kind: "indeterminate",
                    message: format!(
                        "separating margin {:.3e} below {:.3e}",
                        cert.margin,
                        10.0 * lp_tol
                    ),
                });
            }
            Ok(Outcome::ok(
                config,
                json!({ "verdict": cert.verdict, "margin": cert.margin }),
                json!(&cert),
                text,
            ))
        }
        Command::Facets { generators } => {
            let gens: Vec<DensityMatrix> = inputs
                .states(generators)?
                .iter()
                .map(StateInput::to_density)
                .collect();
            let facets = facet_enumeration(&gens)?;
            let mut text = format!("{} facets\n", facets.len());
            for f in &facets {
                text.push_str(&format!(
                    "  active {:?}  offset {:.9}\n",
                    f.active, f.offset
                ));
            }
            Ok(Outcome::ok(
                json!({ "tolerances": tol, "generators": generators }),
                json!({ "count": facets.len(), "facets": json!(&facets) }),
                Value::Null,
                text,
            ))
        }
        Command::RoofSupport {
            state,
            basis,
            search,
        } => {
            let rho = inputs.state(state)?.to_density();
            let u = inputs.basis(basis)?;
            check_dims(u.dim(), rho.dim())?;
            let config = search.config(RoofConfig::default());
            let est = support_roof_bounds(&rho, &u, &config, &tol)?;
            Ok(roof_outcome(
                &est,
                json!({ "tolerances": tol, "roof": config, "state": state, "basis": basis }),
            ))
        }
        Command::RoofNonpos {
            state,
            basis,
            positive_pure,
            search,
        } => {
            let rho = inputs.state(state)?.to_density();
            let u = inputs.basis(basis)?;
            check_dims(u.dim(), rho.dim())?;
            let positive: Option<Vec<PureState>> = match positive_pure {
                Some(p) => {
                    let mut v = Vec::new();
                    for doc in inputs.read(p)? {
                        v.push(doc.into_pure(tol.validation)?);
                    }
                    Some(v)
                }
                None => None,
            };
            let config = search.config(RoofConfig::default());
            let est = nonpositivity_roof_bounds(&rho, &u, positive.as_deref(), &config, &tol)?;
            Ok(roof_outcome(
                &est,
                json!({ "tolerances": tol, "roof": config, "state": state, "basis": basis, "positive_pure": positive_pure }),
            ))
        }
        Command::Spin1 { search } => {
            let config = search.config(RoofConfig {
                restarts: 8,
                steps: 500,
                ..RoofConfig::default()
            });
            let report = run_spin1_report_with(&config, &tol)?;
            let mut text = String::new();
            for c in &report.checks {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                text.push_str(&format!(
                    "{mark} {:<36} expected {:<14.9} computed {:<14.9} tol {:.0e}  {}\n",
                    c.name, c.expected, c.computed, c.tolerance, c.provenance
                ));
            }
            text.push_str(&format!("facets: {}\n", report.facet_count));
            text.push_str("<psi|F*|psi> over the 15 states:\n");
            for (label, v) in &report.f_star_expectations {
                text.push_str(&format!("  {label:<5} {v:.12}\n"));
            }
            let passed = report.all_passed();
            text.push_str(if passed {
                "all checks passed\n"
            } else {
                "some checks FAILED\n"
            });
            Ok(Outcome {
                config: json!({ "tolerances": tol, "roof": config }),
                results: json!({ "all_passed": passed, "report": json!(&report) }),
                certificates: Value::Null,
                text,
                code: if passed { 0 } else { EXIT_INTERNAL },
            })
        }
        Command::HaarStudy {
            dim,
            samples,
            seed,
            eps,
        } => {
            let eps = eps.unwrap_or(tol.minor_eps);
            let study = haar_genericity_study_with_eps(*dim, *samples, *seed, eps)?;
            let mut text = format!(
                "d = {}: {}/{} completely incompatible (fraction {:.4})\nsmallest |minor| quantiles:\n",
                study.dim, study.completely_incompatible, study.samples, study.fraction
            );
            for (q, v) in &study.min_minor_quantiles {
                text.push_str(&format!("  q{q:<5} {v:.6e}\n"));
            }
            Ok(Outcome::ok(
                json!({ "tolerances": tol, "dim": dim, "samples": samples, "seed": seed, "eps": eps }),
                json!(&study),
                Value::Null,
                text,
            ))
        }
    }
}

fn roof_outcome(est: &RoofEstimate, config: Value) -> Outcome {
    Outcome::ok(
        config,
        json!({
            "objective": est.objective,
            "lower_bound": json!(&est.lower_bound),
            "upper_bound": est.upper_bound,
            "upper_source": est.upper_source,
            "exact": est.exact,
            "decomposition": {
                "weights": est.decomposition.weights,
                "states": est.decomposition.states.iter().map(pure_state_json).collect::<Vec<_>>(),
            },
            "assumptions": est.assumptions,
        }),
        json!({ "membership": json!(&est.membership) }),
        roof_text(est),
    )
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Table { .. } => "table",
        Command::Support { .. } => "support",
        Command::Incompat { .. } => "incompat",
        Command::Enumerate { .. } => "enumerate",
        Command::Hull { .. } => "hull",
        Command::Facets { .. } => "facets",
        Command::RoofSupport { .. } => "roof-support",
        Command::RoofNonpos { .. } => "roof-nonpos",
        Command::Spin1 { .. } => "spin1",
        Command::HaarStudy { .. } => "haar-study",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let start = Instant::now();
    let mut inputs = Inputs {
        hasher: Sha256::new(),
        tol: Tolerances::from_env(),
    };
    let outcome = run(&cli.command, &mut inputs);
    let mut report = RunReport::new(command_name(&cli.command), inputs.digest(), Value::Null);
    let code = match outcome {
        Ok(out) => {
            report.config = out.config;
            report.results = out.results;
            report.certificates = out.certificates;
            if !cli.json {
                print!("{}", out.text);
            }
            out.code
        }
        Err(f) => {
            report.config = json!({ "tolerances": inputs.tol });
            report.error = Some(kdwit::io::ReportError {
                kind: f.kind.to_string(),
                message: f.message.clone(),
            });
            eprintln!("error: {}", f.message);
            f.code
        }
    };
    report.timing = Some(Timing {
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    });
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    }
    ExitCode::from(code)
}
