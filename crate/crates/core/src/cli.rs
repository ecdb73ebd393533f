//! Command-line interface. Every command prints one JSON document carrying
//! `"schema": "msi-forge/1"`; `--pretty` switches to a table where one
//! exists and to indented JSON otherwise.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path as FsPath, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::coleman::{period_matrix, PeriodMap, Signs};
use crate::modsym::{expected_rank, ManinBasis, DEFAULT_EIGEN_PRIMES};
use crate::msi::{
    build_path_model, collision_experiment, parameter_check, random_period_map, sample_instance,
    solve_bruteforce, solve_linear_unconstrained, solve_mitm, InstanceParams, ModelSource,
    ModelSpec, MsiInstance, PathModel, SecurityParams, DEFAULT_WORK_CAP,
};
use crate::protocol::{
    identify, keygen, prf_eval, simulate, verify, KeyPair, ProtocolParams, Transcript,
};
use crate::quadratic::{enumerate_class_group, hilbert_class_poly_auto, Discriminant};
use crate::seed::Seed;
use crate::ssgraph::build_graph;

pub const SCHEMA: &str = "msi-forge/1";

const SCHEMA_HELP: &str = "\
Output: one JSON object per run with \"schema\": \"msi-forge/1\".
Big integers are decimal strings, seeds and byte strings are hex.
Exit status: 0 success, 1 domain error, 2 usage error.";

#[derive(Parser)]
#[command(name = "msi-forge", version, about = "Modular-symbol period vectors, MSI search and protocol demos", after_help = SCHEMA_HELP)]
struct Cli {
    /// Render a table (or indented JSON) instead of compact JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// 32-byte hex seed; every random choice derives from it.
    #[arg(
        long,
        global = true,
        default_value = "0000000000000000000000000000000000000000000000000000000000000000"
    )]
    seed: Seed,
    /// Cap on node expansions for exhaustive stages.
    #[arg(long, global = true, default_value_t = DEFAULT_WORK_CAP)]
    work_cap: u64,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduced forms of a negative discriminant.
    Classgroup {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        /// Also print the Hilbert class polynomial.
        #[arg(long)]
        hilbert: bool,
    },
    /// Manin-basis rank and rational newforms of level N.
    Homology {
        #[arg(long)]
        level: u64,
        /// Only the rank.
        #[arg(long)]
        rank: bool,
    },
    /// The period matrix of level N over Z/l^m.
    Periods {
        #[arg(long)]
        level: u64,
        #[arg(short = 'l')]
        l: u64,
        #[arg(short = 'm')]
        m: u32,
        #[arg(long, value_enum, default_value_t = SignArg::Both)]
        signs: SignArg,
    },
    /// The supersingular isogeny graph of degree `--degree` mod p.
    Graph {
        #[arg(short = 'p')]
        p: u64,
        #[arg(long, default_value_t = 2)]
        degree: u64,
    },
    /// MSI instances, solvers and experiments.
    Msi {
        #[command(subcommand)]
        command: MsiCommand,
    },
    /// The identification protocol.
    Idproto {
        #[command(subcommand)]
        command: IdCommand,
    },
    /// Evaluate the PRF keyed by a key file.
    Prf {
        #[arg(long)]
        key: PathBuf,
        /// Input bytes in hex.
        #[arg(long, default_value = "")]
        input: String,
    },
    /// Check security parameters.
    Params(ParamArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Both,
    PlusOnly,
}

impl From<SignArg> for Signs {
    fn from(s: SignArg) -> Signs {
        match s {
            SignArg::Both => Signs::Both,
            SignArg::PlusOnly => Signs::PlusOnly,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Manin,
    Graph,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    /// Level N (manin mode).
    #[arg(long)]
    level: Option<u64>,
    /// Characteristic p (graph mode).
    #[arg(short = 'p')]
    p: Option<u64>,
    /// Isogeny degree (graph mode).
    #[arg(long, default_value_t = 2)]
    degree: u64,
    /// Path length L.
    #[arg(short = 'L', long = "length")]
    length: usize,
}

#[derive(Args)]
struct MatrixArgs {
    /// Period matrix written by `periods`.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(short = 'l')]
    l: Option<u64>,
    #[arg(short = 'm')]
    m: Option<u32>,
    /// Rows of the random matrix (graph mode).
    #[arg(short = 'd')]
    d: Option<usize>,
    #[arg(long, value_enum, default_value_t = SignArg::Both)]
    signs: SignArg,
}

#[derive(Subcommand)]
enum MsiCommand {
    /// Sample an instance from a uniform path of length L.
    Sample {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        matrix: MatrixArgs,
        /// Keep the sampled path in the output.
        #[arg(long)]
        keep_witness: bool,
    },
    /// Solve an instance file.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Mitm)]
        method: Method,
    },
    /// Count collisions of the period map on paths of length L.
    Collide {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        matrix: MatrixArgs,
        /// Draw this many paths instead of enumerating all of them.
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Same as the top-level `params`.
    Params(ParamArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Bruteforce,
    Mitm,
    Linear,
}

#[derive(Subcommand)]
enum IdCommand {
    /// Sample a key pair; the key file also records the model and matrix.
    Keygen {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        matrix: MatrixArgs,
    },
    /// Run an identification between an honest prover and verifier.
    Run {
        #[arg(long)]
        key: PathBuf,
        #[arg(long, default_value_t = 1)]
        rounds: u32,
        #[arg(long, default_value_t = 2)]
        challenges: u64,
    },
    /// Check one transcript given in wire format.
    Verify {
        #[arg(long)]
        key: PathBuf,
        /// Transcript bytes in hex.
        #[arg(long)]
        transcript: String,
        #[arg(long, default_value_t = 2)]
        challenges: u64,
    },
    /// Produce a transcript for challenge c from the public key alone.
    Simulate {
        #[arg(long)]
        key: PathBuf,
        #[arg(short = 'c', default_value_t = 0)]
        c: u64,
    },
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["check", "file"]))]
struct ParamArgs {
    /// Check the parameters given as flags.
    #[arg(long, requires_all = ["l", "m", "d", "b", "length"])]
    check: bool,
    /// Read and validate a parameter file instead.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(short = 'l')]
    l: Option<u64>,
    #[arg(short = 'm')]
    m: Option<u32>,
    #[arg(short = 'd')]
    d: Option<u32>,
    #[arg(short = 'B')]
    b: Option<u64>,
    #[arg(short = 'L')]
    length: Option<u32>,
    #[arg(long, default_value_t = 128)]
    lambda: u32,
}

/// Global parameters of a deployment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterFile {
    pub p: u64,
    pub disc: i64,
    #[serde(rename = "N")]
    pub level: u64,
    pub l: u64,
    pub m: u32,
    pub d: u32,
    #[serde(rename = "L")]
    pub length: u32,
    #[serde(rename = "B")]
    pub branching: u64,
    pub lambda: u32,
    pub seed: Seed,
}

impl ParameterFile {
    pub fn validate(&self) -> Result<()> {
        Discriminant::new(self.disc)?;
        ensure!(
            crate::arith::is_prime(self.l),
            "l = {} is not prime",
            self.l
        );
        ensure!(
            (self.level as u128 * self.p as u128) % self.l as u128 != 0,
            "l = {} divides N p = {} * {}",
            self.l,
            self.level,
            self.p
        );
        ensure!(
            self.branching >= 1 && self.length >= 1 && self.m >= 1 && self.d >= 1,
            "parameters must be positive"
        );
        Ok(())
    }
}

/// What `idproto keygen` writes: the setup plus the key pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyFile {
    pub setup: InstanceParams,
    pub key: KeyPair,
}

struct Output {
    json: Value,
    table: Option<String>,
}

impl Output {
    fn json<T: Serialize>(v: &T) -> Result<Self> {
        Ok(Output {
            json: serde_json::to_value(v)?,
            table: None,
        })
    }
}

/// Run the CLI and return the process exit status.
pub fn main_with_args<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", json!({ "schema": SCHEMA, "error": format!("{e:#}") }));
            1
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    let out = match &cli.command {
        Command::Classgroup { disc, hilbert } => classgroup(*disc, *hilbert)?,
        Command::Homology { level, rank } => homology(*level, *rank)?,
        Command::Periods { level, l, m, signs } => {
            let b = ManinBasis::new(*level);
            let e = b.eigen_decompose(&DEFAULT_EIGEN_PRIMES)?;
            Output::json(&period_matrix(&b, &e, *l, *m, (*signs).into())?)?
        }
        Command::Graph { p, degree } => graph(*p, *degree)?,
        Command::Msi { command } => msi(cli, command)?,
        Command::Idproto { command } => idproto(cli, command)?,
        Command::Prf { key, input } => {
            let kf: KeyFile = read_json(key)?;
            let model = model_for(&kf.setup.model, kf.setup.length)?;
            let x = hex::decode(input).context("--input must be hex")?;
            let y = prf_eval(&model, &kf.setup.matrix, &kf.key.sk, &x);
            Output::json(&json!({ "input": input, "output": hex::encode(y) }))?
        }
        Command::Params(args) => params(args)?,
    };
    emit(cli, out)
}

fn emit(cli: &Cli, out: Output) -> Result<()> {
    let mut json = out.json;
    if let Value::Object(map) = &mut json {
        map.insert("schema".into(), Value::from(SCHEMA));
    }
    let text = match (cli.pretty, out.table) {
        (true, Some(t)) => t,
        (true, None) => serde_json::to_string_pretty(&json)? + "\n",
        (false, _) => serde_json::to_string(&json)? + "\n",
    };
    match &cli.out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn read_json<T: DeserializeOwned>(path: &FsPath) -> Result<T> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(s) = value.get("schema") {
        ensure!(
            s == SCHEMA,
            "{} has schema {s}, expected {SCHEMA}",
            path.display()
        );
    }
    serde_json::from_value(value).with_context(|| format!("decoding {}", path.display()))
}

fn classgroup(disc: i64, hilbert: bool) -> Result<Output> {
    let d = Discriminant::new(disc)?;
    let forms = enumerate_class_group(d);
    let mut v = json!({ "disc": disc, "class_number": forms.len(), "forms": forms });
    if hilbert {
        let h = hilbert_class_poly_auto(d)?;
        v["hilbert_poly"] = json!(h.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    }
    let mut t = format!("disc {disc}, class number {}\n", forms.len());
    for f in &forms {
        let _ = writeln!(t, "  ({}, {}, {})", f.a, f.b, f.c);
    }
    Ok(Output {
        json: v,
        table: Some(t),
    })
}

fn homology(level: u64, rank_only: bool) -> Result<Output> {
    let b = ManinBasis::new(level);
    if rank_only {
        return Ok(Output {
            json: json!({ "level": level, "rank": b.rank }),
            table: Some(format!("{}\n", b.rank)),
        });
    }
    let e = b.eigen_decompose(&DEFAULT_EIGEN_PRIMES)?;
    let newforms: Vec<Value> = e
        .iter()
        .map(|f| {
            let a: BTreeMap<String, i64> = f
                .eigenvalues
                .iter()
                .map(|(q, a)| (q.to_string(), *a))
                .collect();
            json!({ "id": f.newform_id, "eigenvalues": a })
        })
        .collect();
    let mut t = format!(
        "level {level}: rank {}, {} rational newforms\n",
        b.rank,
        e.len()
    );
    for f in &e {
        let a: Vec<String> = f
            .eigenvalues
            .iter()
            .map(|(q, a)| format!("a{q}={a}"))
            .collect();
        let _ = writeln!(t, "  f{}: {}", f.newform_id, a.join(" "));
    }
    let v = json!({
        "level": level,
        "rank": b.rank,
        "expected_rank": expected_rank(level),
        "newforms": newforms,
    });
    Ok(Output {
        json: v,
        table: Some(t),
    })
}

fn graph(p: u64, degree: u64) -> Result<Output> {
    let g = build_graph(p, degree)?;
    let t = format!(
        "p {p}, degree {degree}: {} vertices, {} edges, diameter {}\n",
        g.vertices.len(),
        g.undirected_edges().len(),
        g.diameter()
    );
    Ok(Output {
        json: serde_json::to_value(&g)?,
        table: Some(t),
    })
}

fn model_for(spec: &ModelSpec, len: usize) -> Result<PathModel> {
    Ok(match spec {
        ModelSpec::ManinGenerators { level } => {
            build_path_model(ModelSource::Manin(&ManinBasis::new(*level)), len)?
        }
        ModelSpec::GraphEdges { p, l } => {
            build_path_model(ModelSource::Graph(&build_graph(*p, *l)?), len)?
        }
    })
}

fn setup(cli: &Cli, model: &ModelArgs, matrix: &MatrixArgs) -> Result<(PathModel, PeriodMap)> {
    let spec = match model.mode {
        Mode::Manin => ModelSpec::ManinGenerators {
            level: model.level.context("manin mode needs --level")?,
        },
        Mode::Graph => ModelSpec::GraphEdges {
            p: model.p.context("graph mode needs -p")?,
            l: model.degree,
        },
    };
    let pm = model_for(&spec, model.length)?;
    let a = match (&matrix.matrix, &spec) {
        (Some(path), _) => read_json(path)?,
        (None, ModelSpec::ManinGenerators { level }) => {
            let (l, m) = (
                matrix.l.context("need -l or --matrix")?,
                matrix.m.context("need -m or --matrix")?,
            );
            let b = ManinBasis::new(*level);
            let e = b.eigen_decompose(&DEFAULT_EIGEN_PRIMES)?;
            period_matrix(&b, &e, l, m, matrix.signs.into())?
        }
        (None, ModelSpec::GraphEdges { .. }) => {
            let (l, m) = (
                matrix.l.context("need -l or --matrix")?,
                matrix.m.context("need -m or --matrix")?,
            );
            let d = matrix.d.context("graph mode needs -d or --matrix")?;
            random_period_map(l, m, d, pm.generators, &cli.seed.derive("cli-matrix", 0))?
        }
    };
    Ok((pm, a))
}

fn msi(cli: &Cli, command: &MsiCommand) -> Result<Output> {
    match command {
        MsiCommand::Sample {
            model,
            matrix,
            keep_witness,
        } => {
            let (pm, a) = setup(cli, model, matrix)?;
            let mut inst = sample_instance(&pm, &a, &cli.seed)?;
            if !keep_witness {
                inst.witness = None;
            }
            Output::json(&inst)
        }
        MsiCommand::Solve { instance, method } => {
            let inst: MsiInstance = read_json(instance)?;
            let pm = model_for(&inst.params.model, inst.params.length)?;
            inst.check_model(&pm)?;
            let (name, report) = match method {
                Method::Bruteforce => ("bruteforce", solve_bruteforce(&inst, &pm, cli.work_cap)?),
                Method::Mitm => ("mitm", solve_mitm(&inst, &pm, cli.work_cap)?),
                Method::Linear => {
                    let sol = solve_linear_unconstrained(&inst.params.matrix, &inst.y)?;
                    return Output::json(&json!({ "method": "linear", "solution": sol }));
                }
            };
            let verified = report.witness.as_ref().map(|w| inst.accepts(&pm, w));
            let t = match &report.witness {
                Some(w) => format!(
                    "{name}: witness {:?} after {} expansions\n",
                    w.indices, report.expansions
                ),
                None => format!(
                    "{name}: no witness after {} expansions\n",
                    report.expansions
                ),
            };
            let v = json!({
                "method": name,
                "witness": report.witness,
                "expansions": report.expansions,
                "verified": verified,
            });
            Ok(Output {
                json: v,
                table: Some(t),
            })
        }
        MsiCommand::Collide {
            model,
            matrix,
            samples,
        } => {
            let (pm, a) = setup(cli, model, matrix)?;
            let r = collision_experiment(&pm, &a, *samples, &cli.seed, cli.work_cap)?;
            let t = format!(
                "paths {}, codomain {}: observed {} pairs ({} trivial, {} nontrivial), predicted {:.2}\n",
                r.paths, r.codomain_size, r.observed_pairs, r.trivial_pairs, r.nontrivial_pairs, r.predicted
            );
            Ok(Output {
                json: serde_json::to_value(&r)?,
                table: Some(t),
            })
        }
        MsiCommand::Params(args) => params(args),
    }
}

fn idproto(cli: &Cli, command: &IdCommand) -> Result<Output> {
    match command {
        IdCommand::Keygen { model, matrix } => {
            let (pm, a) = setup(cli, model, matrix)?;
            let key = keygen(&pm, &a, &cli.seed)?;
            let setup = InstanceParams {
                model: pm.spec.clone(),
                l: a.l,
                m: a.m,
                d: a.d(),
                length: pm.max_len,
                matrix: a,
            };
            Output::json(&KeyFile { setup, key })
        }
        IdCommand::Run {
            key,
            rounds,
            challenges,
        } => {
            let kf: KeyFile = read_json(key)?;
            let pm = model_for(&kf.setup.model, kf.setup.length)?;
            let params = ProtocolParams {
                challenge_modulus: *challenges,
                rounds: *rounds,
            };
            let run = identify(&pm, &kf.setup.matrix, &kf.key, &params, &cli.seed)?;
            let wire: Vec<String> = run
                .transcripts
                .iter()
                .map(|t| hex::encode(t.to_bytes()))
                .collect();
            let t = format!(
                "{} rounds, challenges mod {}: {}\n",
                rounds,
                challenges,
                if run.accepted { "accepted" } else { "rejected" }
            );
            let mut v = serde_json::to_value(&run)?;
            v["wire"] = json!(wire);
            Ok(Output {
                json: v,
                table: Some(t),
            })
        }
        IdCommand::Verify {
            key,
            transcript,
            challenges,
        } => {
            let kf: KeyFile = read_json(key)?;
            let bytes = hex::decode(transcript).context("--transcript must be hex")?;
            let tr = Transcript::from_bytes(&bytes)?;
            let bound = ProtocolParams {
                challenge_modulus: *challenges,
                rounds: 1,
            }
            .response_bound(kf.setup.length);
            let valid = tr.c < *challenges && verify(&tr, &kf.key.pk, &kf.setup.matrix, bound);
            Output::json(&json!({ "valid": valid, "digest": hex::encode(tr.digest()) }))
        }
        IdCommand::Simulate { key, c } => {
            let kf: KeyFile = read_json(key)?;
            let pm = model_for(&kf.setup.model, kf.setup.length)?;
            let tr = simulate(&pm, &kf.setup.matrix, &kf.key.pk, *c, &cli.seed);
            let mut v = serde_json::to_value(&tr)?;
            v["wire"] = json!(hex::encode(tr.to_bytes()));
            Output::json(&v)
        }
    }
}

fn params(args: &ParamArgs) -> Result<Output> {
    let (p, validated) = match &args.file {
        Some(path) => {
            let f: ParameterFile = read_json(path)?;
            f.validate()?;
            let p = SecurityParams {
                l: f.l,
                m: f.m,
                d: f.d,
                branching: f.branching,
                length: f.length,
                lambda: f.lambda,
            };
            (p, true)
        }
        None => {
            let p = SecurityParams {
                l: args.l.context("-l is required")?,
                m: args.m.context("-m is required")?,
                d: args.d.context("-d is required")?,
                branching: args.b.context("-B is required")?,
                length: args.length.context("-L is required")?,
                lambda: args.lambda,
            };
            (p, false)
        }
    };
    if p.l < 2 || p.m == 0 || p.d == 0 || p.branching == 0 {
        bail!("parameters must be positive with l >= 2");
    }
    let v = parameter_check(p);
    let mut t = String::new();
    for (name, ok) in [
        ("search hardness", v.search_hardness),
        ("quantum margin", v.quantum_margin),
        ("separation", v.separation),
    ] {
        let _ = writeln!(t, "{name:16} {}", if ok { "ok" } else { "FAIL" });
    }
    let _ = writeln!(
        t,
        "log2 #W_L ~ {:.2}, log2 l^(md) = {:.2}",
        v.log2_paths, v.log2_codomain
    );
    let mut json = serde_json::to_value(&v)?;
    if validated {
        json["validated_file"] = Value::Bool(true);
    }
    Ok(Output {
        json,
        table: Some(t),
    })
}
