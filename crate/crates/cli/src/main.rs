use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use hberry::berry::{
    analyze, berry_number, family_phases, synthetic_family, BerryOptions, PhaseData, TensorFamily,
};
use hberry::channel::{injectivity_length, DensityOp, MpsTensor, QuantumChannel};
use hberry::cohomology::{bockstein_z2, cohomology, nontrivial_bockstein_source, AbelianGroup, ClassCoords, Ring};
use hberry::io;
use hberry::linalg::random_unitary;
use hberry::rg::{fixed_tensor, rg_flow, FlowOptions};
use hberry::tduality::{tdualize, verify_duality, TDualPair};
use hberry::Error;

#[derive(Parser)]
#[command(name = "hberry", version, about = "MPS transfer channels, RG fixed points, higher Berry classes, T-duality")]
struct Cli {
    #[command(flatten)]
    cfg: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Tolerances and options shared by all commands.
#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Tolerance for algebraic identities (unitality, isometry, rank decisions).
    #[arg(long, global = true, default_value_t = hberry::TOL_ALG)]
    tol_alg: f64,
    /// Tolerance for spectral decisions (peripheral eigenvalues, convergence).
    #[arg(long, global = true, default_value_t = hberry::TOL_SPEC)]
    tol_spec: f64,
    /// Largest accepted deviation of a triangle holonomy from a scalar.
    #[arg(long, global = true, default_value_t = hberry::DEV_MAX)]
    dev_max: f64,
    /// Smallest accepted overlap between neighbouring tensors.
    #[arg(long, global = true, default_value_t = hberry::ETA_MIN)]
    eta_min: f64,
    /// Iteration cap of the RG flow.
    #[arg(long, global = true, default_value_t = 16)]
    max_iter: usize,
    /// Seed for generated fixtures.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

impl RunConfig {
    fn validate(&self) -> hberry::Result<()> {
        for (name, v) in [
            ("tol-alg", self.tol_alg),
            ("tol-spec", self.tol_spec),
            ("dev-max", self.dev_max),
            ("eta-min", self.eta_min),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!("--{name} must be positive, got {v}")));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("--max-iter must be at least 1".into()));
        }
        Ok(())
    }

    fn flow(&self) -> FlowOptions<f64> {
        FlowOptions { tol: self.tol_spec, tol_spec: self.tol_spec, max_iter: self.max_iter, ..FlowOptions::default() }
    }

    fn berry(&self) -> BerryOptions<f64> {
        BerryOptions {
            dev_max: self.dev_max,
            eta_min: self.eta_min,
            tol_spec: self.tol_spec,
            tol_alg: self.tol_alg,
            ..BerryOptions::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Transfer-channel diagnostics of a tensor file.
    Channel {
        #[command(subcommand)]
        cmd: ChannelCmd,
    },
    /// Renormalization flow to the fixed point.
    Rg {
        #[command(subcommand)]
        cmd: RgCmd,
    },
    /// Higher Berry number or class of a family or phase file.
    Berry {
        #[command(subcommand)]
        cmd: BerryCmd,
    },
    /// Simplicial cohomology.
    Coh {
        #[command(subcommand)]
        cmd: CohCmd,
    },
    /// Topological T-duality of circle bundles with H-flux.
    Tdual {
        #[command(subcommand)]
        cmd: TdualCmd,
    },
    /// Print a fixture file.
    Examples {
        name: Example,
        /// Berry number of the synthetic family.
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        target: i64,
        /// Built-in complex for `constant-family`.
        #[arg(long, default_value = "S3")]
        complex: String,
        /// Bond dimension for `fixed-point` and `ad-u`.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Write to this file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ChannelCmd {
    /// Spectrum, gap, injectivity and stationary state (`-` reads stdin).
    Info { path: String },
}

#[derive(Subcommand)]
enum RgCmd {
    /// Flow a tensor file to its fixed point.
    Run { path: String },
}

#[derive(Subcommand)]
enum BerryCmd {
    /// Integer Berry number on an oriented complex.
    Number { path: String },
    /// Class in H³ with free and torsion coordinates.
    Class { path: String },
}

#[derive(Subcommand)]
enum CohCmd {
    /// Cohomology groups of a complex (file or built-in name).
    Groups {
        complex: String,
        /// `Z`, `Z/p` or `R`.
        #[arg(long, default_value = "Z")]
        ring: String,
    },
    /// Integral Bockstein of a mod-2 cocycle.
    Bockstein { complex: String, cochain: String },
}

#[derive(Subcommand)]
enum TdualCmd {
    /// Dual pair of a pair file.
    Run { path: String },
    /// Check that two pair files are T-dual.
    Verify { a: String, b: String },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Example {
    Aklt,
    FixedPoint,
    AdU,
    ConstantFamily,
    SyntheticS3,
    BocksteinRp2xs1,
    TdualTable,
}

/// Command failures: library errors keep their classification, I/O problems
/// count as validation failures.
enum Failure {
    Lib(Error),
    Io(String),
    /// The command ran but its check did not hold.
    Check(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<Value, Failure>;

fn read_input(path: &str) -> Result<Value, Failure> {
    let mut text = String::new();
    if path == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(|e| Failure::Io(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{path}: {e}")))?;
    }
    Ok(io::parse(&text)?)
}

fn complex_arg(arg: &str) -> Result<hberry::cohomology::SimplicialComplex, Failure> {
    if !Path::new(arg).exists() && arg != "-" {
        if let Ok(k) = io::builtin_complex(arg) {
            return Ok(k);
        }
    }
    Ok(io::complex_from_json(&read_input(arg)?)?)
}

fn number(x: &impl ToString) -> Value {
    serde_json::from_str(&x.to_string()).unwrap_or(Value::Null)
}

fn complex_json(z: &hberry::C<f64>) -> Value {
    json!([z.re, z.im])
}

fn group_json(g: &AbelianGroup) -> Value {
    json!({
        "description": g.describe(),
        "free_rank": g.free_rank,
        "torsion": g.torsion.iter().map(number).collect::<Vec<_>>(),
    })
}

fn class_json(c: &ClassCoords) -> Value {
    json!({
        "free": c.free.iter().map(number).collect::<Vec<_>>(),
        "torsion": c.torsion.iter().map(number).collect::<Vec<_>>(),
    })
}

fn channel_info(path: &str, cfg: &RunConfig) -> Outcome {
    let t = io::tensor_from_json(&read_input(path)?)?;
    let ch = QuantumChannel::from_tensor(&t);
    let spec = ch.transfer_spectrum()?;
    let d = t.bond_dim();
    let inj = injectivity_length(&t, 2 * d * d, cfg.tol_alg);
    let rho = ch.stationary_state(cfg.tol_spec)?;
    Ok(json!({
        "phys_dim": t.phys_dim(),
        "bond_dim": d,
        "unitality_residual": t.unitality_residual(),
        "transfer_spectrum": spec.eigenvalues.iter().map(complex_json).collect::<Vec<_>>(),
        "gap": spec.gap,
        "injectivity_length": inj,
        "stationary_spectrum": rho.spectrum(),
    }))
}

fn rg_run(path: &str, cfg: &RunConfig) -> Outcome {
    let t = io::tensor_from_json(&read_input(path)?)?;
    Ok(io::fixed_point_to_json(&rg_flow(&t, &cfg.flow())?))
}

fn load_phases(path: &str, cfg: &RunConfig) -> Result<PhaseData<f64>, Failure> {
    let v = read_input(path)?;
    if v.get("tensors").is_some() {
        let fam: TensorFamily<f64> = io::family_from_json(&v, cfg.tol_alg)?;
        Ok(family_phases(&fam, &cfg.berry())?)
    } else {
        Ok(io::phases_from_json(&v)?)
    }
}

fn berry_cmd(cmd: &BerryCmd, cfg: &RunConfig) -> Outcome {
    let opts = cfg.berry();
    match cmd {
        BerryCmd::Number { path } => {
            let p = load_phases(path, cfg)?;
            let (n, residual) = berry_number(&p, &opts)?;
            let out = analyze(&p, &opts)?;
            Ok(json!({
                "number": n,
                "residual": residual,
                "group": group_json(&out.group),
                "class": class_json(&out.class),
                "max_dev": p.deviations().iter().cloned().fold(0.0, f64::max),
            }))
        }
        BerryCmd::Class { path } => {
            let p = load_phases(path, cfg)?;
            let out = analyze(&p, &opts)?;
            Ok(json!({
                "group": group_json(&out.group),
                "class": class_json(&out.class),
                "number": out.number.map(|(n, _)| n),
                "max_dev": p.deviations().iter().cloned().fold(0.0, f64::max),
            }))
        }
    }
}

fn parse_ring(s: &str) -> hberry::Result<Ring> {
    match s {
        "Z" => Ok(Ring::Integers),
        "R" => Ok(Ring::Reals),
        _ => s
            .strip_prefix("Z/")
            .and_then(|p| p.parse().ok())
            .map(Ring::ModP)
            .ok_or_else(|| Error::InvalidInput(format!("unknown ring {s:?}"))),
    }
}

fn coh_cmd(cmd: &CohCmd) -> Outcome {
    match cmd {
        CohCmd::Groups { complex, ring } => {
            let k = complex_arg(complex)?;
            let ring = parse_ring(ring)?;
            let mut groups = serde_json::Map::new();
            for d in 0..=k.dim() {
                groups.insert(format!("H{d}"), json!(cohomology(&k, d, ring)?.group.describe()));
            }
            Ok(json!({
                "vertices": k.n_vertices(),
                "counts": (0..=k.dim()).map(|d| k.count(d)).collect::<Vec<_>>(),
                "euler_characteristic": k.euler_characteristic(),
                "groups": groups,
            }))
        }
        CohCmd::Bockstein { complex, cochain } => {
            let k = complex_arg(complex)?;
            let z = io::cochain_from_json(&k, &read_input(cochain)?)?;
            let b = bockstein_z2(&k, &z)?;
            Ok(json!({
                "group": group_json(&b.group),
                "class": class_json(&b.class),
                "cocycle": io::cochain_to_json(&k, &b.cocycle),
            }))
        }
    }
}

fn tdual_cmd(cmd: &TdualCmd) -> Outcome {
    match cmd {
        TdualCmd::Run { path } => {
            let p = io::pair_from_json(&read_input(path)?)?;
            let d = tdualize(&p)?;
            let report = verify_duality(&p, &d.pair);
            let mut out = io::pair_to_json(&d.pair);
            out["ambiguous_lift"] = json!(d.ambiguous_lift);
            out["source_total_space"] = json!(p.total_space());
            out["verified"] = json!(report.holds());
            Ok(out)
        }
        TdualCmd::Verify { a, b } => {
            let pa = io::pair_from_json(&read_input(a)?)?;
            let pb = io::pair_from_json(&read_input(b)?)?;
            let r = verify_duality(&pa, &pb);
            let out = json!({
                "holds": r.holds(),
                "same_base": r.same_base,
                "forward": r.forward,
                "backward": r.backward,
                "coker_agree": r.coker_agree,
                "total_spaces": [pa.total_space(), pb.total_space()],
            });
            if r.holds() {
                Ok(out)
            } else {
                Err(Failure::Check(out))
            }
        }
    }
}

fn example(name: Example, target: i64, complex: &str, dim: usize, cfg: &RunConfig) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok(match name {
        Example::Aklt => io::tensor_to_json(&MpsTensor::aklt()),
        Example::FixedPoint => {
            let rho = DensityOp::<f64>::random_faithful(dim, &mut rng);
            io::tensor_to_json(&fixed_tensor(&rho, cfg.tol_alg)?)
        }
        Example::AdU => io::tensor_to_json(&MpsTensor::unitary(random_unitary::<f64, _>(dim, &mut rng))?),
        Example::ConstantFamily => {
            let k = io::builtin_complex(complex)?;
            io::family_to_json(&TensorFamily::constant(k, MpsTensor::aklt(), cfg.tol_alg)?)
        }
        Example::SyntheticS3 => {
            let k = io::builtin_complex("S3")?;
            io::phases_to_json(&synthetic_family(&k, target, 1e-9)?)
        }
        Example::BocksteinRp2xs1 => {
            let k = io::builtin_complex("RP2xS1")?;
            let z = nontrivial_bockstein_source(&k, 2)?
                .ok_or_else(|| Error::Inconsistent("no mod-2 class with nonzero Bockstein".into()))?;
            io::phases_to_json(&PhaseData::from_z2(k, &z)?)
        }
        Example::TdualTable => {
            let rows: Vec<Value> = [(1, 1), (1, 0), (0, 0)]
                .into_iter()
                .map(|(c1, h)| {
                    let p = TDualPair::sphere(c1, h);
                    let d = tdualize(&p).expect("pairs over S2 dualize");
                    json!({ "pair": io::pair_to_json(&p), "dual": io::pair_to_json(&d.pair) })
                })
                .collect();
            Value::Array(rows)
        }
    })
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match x {
                    Value::Object(_) => {
                        let _ = writeln!(out, "{pad}{k}:");
                        render_text(x, indent + 1, out);
                    }
                    Value::Array(items) if items.iter().any(Value::is_object) => {
                        let _ = writeln!(out, "{pad}{k}:");
                        render_text(x, indent + 1, out);
                    }
                    _ => {
                        let _ = writeln!(out, "{pad}{k}: {}", inline(x));
                    }
                }
            }
        }
        Value::Array(items) if items.iter().any(Value::is_object) => {
            for (i, x) in items.iter().enumerate() {
                let _ = writeln!(out, "{pad}[{i}]");
                render_text(x, indent + 1, out);
            }
        }
        _ => {
            let _ = writeln!(out, "{pad}{}", inline(v));
        }
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        Value::Array(items) => format!("[{}]", items.iter().map(inline).collect::<Vec<_>>().join(", ")),
        Value::Number(n) => match n.as_f64() {
            Some(x) if !n.is_i64() && !n.is_u64() => format!("{x:.10e}"),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

fn emit(v: &Value, format: Format, out: Option<&Path>) -> std::io::Result<()> {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(v).expect("serializable") + "\n",
        Format::Text => {
            let mut s = String::new();
            render_text(v, 0, &mut s);
            s
        }
    };
    match out {
        Some(path) => {
            let tmp = path.with_extension("tmp");
            std::fs::write(&tmp, &text)?;
            std::fs::rename(&tmp, path)
        }
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = &cli.cfg;
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let mut out_path = None;
    // fixtures are files: always JSON
    let mut format = cfg.format;
    let result = match &cli.command {
        Command::Channel { cmd: ChannelCmd::Info { path } } => channel_info(path, cfg),
        Command::Rg { cmd: RgCmd::Run { path } } => rg_run(path, cfg),
        Command::Berry { cmd } => berry_cmd(cmd, cfg),
        Command::Coh { cmd } => coh_cmd(cmd),
        Command::Tdual { cmd } => tdual_cmd(cmd),
        Command::Examples { name, target, complex, dim, out } => {
            format = Format::Json;
            out_path = out.as_deref();
            example(*name, *target, complex, *dim, cfg)
        }
    };
    match result {
        Ok(v) => match emit(&v, format, out_path) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: cannot write output: {e}");
                ExitCode::from(1)
            }
        },
        Err(Failure::Check(v)) => {
            let _ = emit(&v, format, None);
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}
