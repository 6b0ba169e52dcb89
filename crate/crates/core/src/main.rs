use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use latbound::bhw::{q_values, verify_theorem1};
use latbound::campaign::{run_campaign, CampaignConfig, Mode};
use latbound::enumeration::{count_ball, minima_of_body, oracle_count};
use latbound::error::{Error, Result};
use latbound::instance::InstanceFile;
use latbound::rat::{parse_rat, Rat};
use latbound::report::{
    bhw_text, campaign_json, campaign_text, count_text, minima_text, oracle_diff_text,
    qvalues_text, strong_text, to_json_string, translation_json, translation_text,
    via_strong_text, BhwJson, CountJson, MinimaJson, OracleDiffJson, QValuesJson, StrongJson,
    ViaStrongJson,
};
use latbound::slicing::{verify_strong, verify_theorem1_via_strong};
use latbound::translation::{default_t_samples, translate_spheres, verify_translation};

#[derive(Parser)]
#[command(
    name = "latbound",
    version,
    about = "Exact lattice point counts in ellipsoids and verified product bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, ValueEnum)]
enum ModeArg {
    #[default]
    Theorem1,
    Strong,
    Translation,
    OracleDiff,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Theorem1 => Mode::Theorem1,
            ModeArg::Strong => Mode::Strong,
            ModeArg::Translation => Mode::Translation,
            ModeArg::OracleDiff => Mode::OracleDiff,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Count lattice points in the instance body
    Count {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Successive minima of the instance body with witness vectors
    Minima {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// The q values and product bounds derived from the minima
    Qvalues {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Verify count <= prod q_i (optionally replaying the full recursion)
    VerifyBhw {
        #[arg(long)]
        input: PathBuf,
        /// Route the check through the recursive slicing verifier
        #[arg(long)]
        via_strong: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Translate a sphere pack and certify distance monotonicity
    Translate {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated rational scales t >= 1 to spot-check
        #[arg(long, value_delimiter = ',')]
        t_samples: Option<Vec<String>>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Run the recursive sliced verification on the instance
    VerifyStrong {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Compare tree enumeration against the brute-force box oracle
    OracleDiff {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Generate and verify a seeded batch of random instances
    Campaign {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Smallest instance dimension
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Largest instance dimension (defaults to --dim)
        #[arg(long)]
        dim_max: Option<usize>,
        #[arg(long, default_value_t = 5)]
        entry_bound: u32,
        #[arg(long, default_value_t = 3)]
        radius_bound: u32,
        #[arg(long, value_enum, default_value_t)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

fn read_instance(path: &PathBuf) -> Result<InstanceFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    InstanceFile::parse(&text)
}

fn emit(format: Format, json: String, text: String) {
    match format {
        Format::Json => println!("{json}"),
        Format::Text => print!("{text}"),
    }
}

/// Runs one command; `Ok(true)` means every check passed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Count { input, format } => {
            let inst = read_instance(&input)?;
            let lattice = inst.lattice()?;
            let counts = inst
                .balls()?
                .iter()
                .map(|b| count_ball(&lattice, b))
                .collect::<Result<Vec<_>>>()?;
            let report = CountJson {
                total: counts.iter().sum(),
                counts,
            };
            emit(format, to_json_string(&report), count_text(&report));
            Ok(true)
        }
        Command::Minima { input, format } => {
            let inst = read_instance(&input)?;
            let profile = minima_of_body(&inst.lattice()?, &inst.ball()?)?;
            let report = MinimaJson::from(&profile);
            emit(format, to_json_string(&report), minima_text(&report));
            Ok(true)
        }
        Command::Qvalues { input, format } => {
            let inst = read_instance(&input)?;
            let profile = minima_of_body(&inst.lattice()?, &inst.ball()?)?;
            let report = QValuesJson::from(&q_values(&profile)?);
            emit(format, to_json_string(&report), qvalues_text(&report));
            Ok(true)
        }
        Command::VerifyBhw {
            input,
            via_strong,
            format,
        } => {
            let inst = read_instance(&input)?;
            let lattice = inst.lattice()?;
            let ball = inst.ball()?;
            if via_strong {
                let report = verify_theorem1_via_strong(&lattice, &ball)?;
                let json = ViaStrongJson::from(&report);
                emit(format, to_json_string(&json), via_strong_text(&json));
                Ok(report.passed)
            } else {
                let report = verify_theorem1(&lattice, &ball)?;
                let json = BhwJson::from(&report);
                emit(format, to_json_string(&json), bhw_text(&json));
                Ok(report.holds && report.holds_first)
            }
        }
        Command::Translate {
            input,
            t_samples,
            format,
        } => {
            let inst = read_instance(&input)?;
            let pack = inst.sphere_pack()?;
            let samples = match t_samples {
                Some(raw) => raw
                    .iter()
                    .map(|s| parse_rat(s))
                    .collect::<Result<Vec<Rat>>>()?,
                None => default_t_samples(),
            };
            let result = translate_spheres(&pack)?;
            let report = verify_translation(&pack, &result, &samples)?;
            let json = translation_json(&result, &report);
            let passed = json.passed;
            emit(format, to_json_string(&json), translation_text(&json));
            Ok(passed)
        }
        Command::VerifyStrong { input, format } => {
            let inst = read_instance(&input)?;
            let report = verify_strong(&inst.strong_instance()?)?;
            let json = StrongJson::from(&report);
            emit(format, to_json_string(&json), strong_text(&json));
            Ok(report.passed)
        }
        Command::OracleDiff { input, format } => {
            let inst = read_instance(&input)?;
            let lattice = inst.lattice()?;
            let ball = inst.ball()?;
            let enumerated = count_ball(&lattice, &ball)?;
            let b = lattice.basis().to_rational();
            let g = b.transpose().mul(ball.space().form()).mul(&b);
            let t = lattice.coefficients(ball.center())?;
            let oracle = oracle_count(&g, &t, ball.radius_sq())?;
            let report = OracleDiffJson {
                enumerated,
                oracle,
                equal: enumerated == oracle,
            };
            emit(format, to_json_string(&report), oracle_diff_text(&report));
            Ok(report.equal)
        }
        Command::Campaign {
            seed,
            count,
            dim,
            dim_max,
            entry_bound,
            radius_bound,
            mode,
            format,
        } => {
            let config = CampaignConfig::new(
                seed,
                count,
                (dim, dim_max.unwrap_or(dim)),
                entry_bound,
                radius_bound,
                mode.into(),
            )?;
            let records = run_campaign(&config)?;
            let report = campaign_json(&config, &records);
            let passed = report.all_passed;
            emit(format, to_json_string(&report), campaign_text(&report));
            Ok(passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
