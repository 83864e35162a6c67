use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ahp_rank::pipeline::Evaluation;
use ahp_rank::report::{round_all, round_sig};
use ahp_rank::{
    emit_report, Cohort, ElicitationRule, Error, MethodSelection, MissingPolicy, ReportFormat, Result, RuleKind,
    RunConfig,
};

#[derive(Parser)]
#[command(name = "ahp-rank", version, about = "Rank alternatives with crisp and fuzzy AHP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Load and check the inputs without evaluating.
    Validate,
    /// Criteria-level weights and consistency only.
    Weights,
    /// Full evaluation report (json by default).
    Score,
    /// Final rankings (text summary by default).
    Rank,
    /// Run both methods and report their agreement.
    Compare,
    /// Perturb each criteria judgment and report rank changes.
    Sweep {
        /// Comma-separated multiplicative factors.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 2.0])]
        factors: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CohortArg {
    #[value(name = "ages_15_34")]
    Ages15To34,
    #[value(name = "ages_35_59")]
    Ages35To59,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Ahp,
    Fahp,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    #[value(name = "direct_ratio")]
    DirectRatio,
    #[value(name = "saaty_difference")]
    SaatyDifference,
}

impl From<RuleArg> for RuleKind {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::DirectRatio => RuleKind::DirectRatio,
            RuleArg::SaatyDifference => RuleKind::SaatyDifference,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Hierarchy TOML (defaults to the bundled hierarchy).
    #[arg(long, global = true)]
    hierarchy: Option<PathBuf>,
    /// Indicator CSV for the cohort (defaults to the bundled 2017 table).
    #[arg(long, global = true)]
    indicators: Option<PathBuf>,
    /// Fuzzy scale CSV (defaults to the bundled scale).
    #[arg(long, global = true)]
    scale: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "ages_15_34")]
    cohort: CohortArg,
    #[arg(long, global = true, value_enum, default_value = "both")]
    method: MethodArg,
    #[arg(long, global = true, value_enum, default_value = "saaty_difference")]
    criteria_rule: RuleArg,
    #[arg(long, global = true, value_enum, default_value = "direct_ratio")]
    indicator_rule: RuleArg,
    /// Substitute this value for missing cells instead of excluding the alternative.
    #[arg(long, global = true)]
    missing_epsilon: Option<f64>,
    /// Abort with exit code 2 when any matrix fails its GCI threshold.
    #[arg(long, global = true)]
    strict: bool,
    /// json, csv or text-summary.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> RunConfig {
        let policy = match self.missing_epsilon {
            Some(eps) => MissingPolicy::EpsilonFloor(eps),
            None => MissingPolicy::ExcludeAlternative,
        };
        RunConfig {
            method: match self.method {
                MethodArg::Ahp => MethodSelection::Ahp,
                MethodArg::Fahp => MethodSelection::Fahp,
                MethodArg::Both => MethodSelection::Both,
            },
            cohort: match self.cohort {
                CohortArg::Ages15To34 => Cohort::Ages15To34,
                CohortArg::Ages35To59 => Cohort::Ages35To59,
            },
            criteria_rule: ElicitationRule::new(self.criteria_rule.into()).with_missing_policy(policy),
            indicator_rule: ElicitationRule::new(self.indicator_rule.into()).with_missing_policy(policy),
            strict_consistency: self.strict,
            hierarchy_path: self.hierarchy.clone(),
            indicators_path: self.indicators.clone(),
            scale_path: self.scale.clone(),
        }
    }

    fn format(&self, default: ReportFormat) -> Result<ReportFormat> {
        self.format.as_deref().map_or(Ok(default), str::parse)
    }

    fn write(&self, bytes: &[u8]) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, bytes).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            }),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(bytes)
                    .and_then(|_| stdout.flush())
                    .map_err(|source| Error::Io {
                        path: "<stdout>".into(),
                        source,
                    })
            }
        }
    }
}

fn json_bytes<T: serde::Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| Error::Invariant(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

fn run(cli: &Cli) -> Result<()> {
    let common = &cli.common;
    let mut config = common.config();
    match &cli.command {
        Command::Validate => {
            let (hierarchy, table, _) = config.load_inputs()?;
            let missing = table.missing_cells();
            let text = format!(
                "ok: {} criteria, {} sub-criteria, {} alternatives, cohort {}, {} missing cells\n",
                hierarchy.criteria.len(),
                hierarchy.sub_criteria().count(),
                hierarchy.alternatives.len(),
                table.cohort,
                missing.len()
            );
            common.write(text.as_bytes())
        }
        Command::Weights => {
            let report = Evaluation::prepare(&config)?.report()?;
            let block = serde_json::json!({
                "schema_version": report.schema_version,
                "criteria_rule": report.criteria_rule.kind,
                "consistency": report.criteria_gci(),
                "reference_criteria_gci": report.reference_criteria_gci,
                "weights": report.criteria_weights,
            });
            match common.format(ReportFormat::Json)? {
                ReportFormat::Json => common.write(&json_bytes(&block)?),
                ReportFormat::Text | ReportFormat::Csv => {
                    let w = &report.criteria_weights;
                    let mut text = String::from("sub_criterion,crisp,fuzzy_normalized\n");
                    for (k, id) in w.sub_criteria.iter().enumerate() {
                        let fmt = |v: &Option<Vec<f64>>| v.as_ref().map_or(String::new(), |v| format!("{:.12}", v[k]));
                        text.push_str(&format!("{id},{},{}\n", fmt(&w.crisp), fmt(&w.fuzzy_normalized)));
                    }
                    common.write(text.as_bytes())
                }
            }
        }
        Command::Score => {
            let report = ahp_rank::run_evaluation(&config)?;
            common.write(&emit_report(&report, common.format(ReportFormat::Json)?)?)
        }
        Command::Rank => {
            let report = ahp_rank::run_evaluation(&config)?;
            common.write(&emit_report(&report, common.format(ReportFormat::Text)?)?)
        }
        Command::Compare => {
            config.method = MethodSelection::Both;
            let report = ahp_rank::run_evaluation(&config)?;
            match common.format(ReportFormat::Text)? {
                ReportFormat::Json => common.write(&json_bytes(&serde_json::json!({
                    "schema_version": report.schema_version,
                    "cohort": report.cohort,
                    "comparison": report.comparison,
                    "reference_check": report.reference_check,
                }))?),
                format => common.write(&emit_report(&report, format)?),
            }
        }
        Command::Sweep { factors } => {
            let evaluation = Evaluation::prepare(&config)?;
            let mut reports = evaluation.sweep(factors)?;
            for r in &mut reports {
                for e in &mut r.entries {
                    e.gci = round_sig(e.gci);
                    e.tau = round_sig(e.tau);
                }
                r.factors = round_all(&r.factors);
            }
            match common.format(ReportFormat::Json)? {
                ReportFormat::Json => common.write(&json_bytes(&reports)?),
                _ => {
                    let mut text = String::new();
                    for r in &reports {
                        text.push_str(&format!(
                            "{}: baseline {}; {} of {} perturbations change the order; stable: {}\n",
                            r.method,
                            r.baseline.join(" > "),
                            r.perturbations_with_flips,
                            r.entries.len(),
                            r.stable_positions.join(", ")
                        ));
                    }
                    common.write(text.as_bytes())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
