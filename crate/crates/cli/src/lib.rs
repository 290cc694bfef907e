//! Command-line front end for `peps-core`.
//!
//! [`run`] parses arguments, executes one command and returns everything it
//! would print, so the binary writes stdout exactly once and tests can call
//! it in-process.

pub mod sat;
pub mod verify;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use peps_core::circuit::{circuit_from_text, Cnf};
use peps_core::cooling::{
    cooling_network, exact_evolve, haar_product_state, hamiltonian_from_text, imaginary_time_evolve,
    plus_state, product_vector, spectrum, CoolingSchedule, Spectrum, TrotterOrder,
};
use peps_core::duality::{
    circuit_to_peps, compiled_circuit_to_text, compiled_peps_to_text, peps_to_circuit, Mode,
};
use peps_core::linalg::{CMatrix, C64};
use peps_core::pathsum::{counting_identity_check, path_histogram, postselected_norm, ThCircuit};
use peps_core::peps::{nev_with, norm_squared_with, peps_from_json, uev_with, Observable};
use peps_core::random::Rng;
use peps_core::tensor::{
    contract_network_with, contraction_value_with, network_from_json, ContractOptions, DEFAULT_MAX_ENTRIES,
};
use peps_core::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "peps",
    version,
    about = "Exact desk-scale PEPS, circuit and tensor-network tools"
)]
pub struct Cli {
    /// Seed for every random choice
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest intermediate tensor, in entries
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ENTRIES)]
    pub cap: usize,
    /// Numeric tolerance (countsat rounding residue)
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    /// circuit file to PEPS
    C2p,
    /// PEPS file to circuit
    P2c,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Spacetime,
    Mbqc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    /// |+⟩ on every site
    Plus,
    /// seeded Haar-random product state
    Haar,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Contract a closed tensor network
    Contract { network: PathBuf },
    /// ⟨ψ|ψ⟩ of a PEPS
    Norm { peps: PathBuf },
    /// ⟨ψ|A|ψ⟩/⟨ψ|ψ⟩ for A given as name@vertex (sz, sx, sy, id, p0, p1)
    Nev {
        peps: PathBuf,
        #[arg(long)]
        obs: String,
        /// print ⟨ψ|A|ψ⟩ without dividing by the norm
        #[arg(long)]
        unnormalized: bool,
    },
    /// Compile between postselected circuits and PEPS
    Compile {
        #[arg(value_enum)]
        direction: Direction,
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Spacetime)]
        mode: ModeArg,
        /// write here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exact path sums of a Toffoli-Hadamard circuit
    Pathsum {
        circuit: PathBuf,
        /// also evaluate the counting identity (needs one postselection)
        #[arg(long)]
        identity: bool,
    },
    /// Count satisfying assignments of a DIMACS CNF through a PEPS
    Countsat { cnf: PathBuf },
    /// Decide whether at least half of all assignments satisfy a CNF
    Majority { cnf: PathBuf },
    /// Imaginary-time cooling of a local Hamiltonian
    Cool {
        hamiltonian: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value = "second")]
        order: String,
        #[arg(long, value_enum, default_value_t = InitArg::Plus)]
        init: InitArg,
        /// skip the tensor-network backend
        #[arg(long)]
        no_network: bool,
    },
    /// Run the seeded cross-representation suite
    Verify,
}

/// What a finished invocation prints and how it exits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Invalid(_) | Error::UnknownTensor(_) | Error::Io(_) => EXIT_PARSE,
        Error::TooLarge { .. } | Error::Cap(_) => EXIT_CAP,
        Error::InvalidPostselection { .. } | Error::ZeroNorm | Error::Degenerate(_) | Error::Numeric(_) => {
            EXIT_NUMERIC
        }
    }
}

/// Shortest round-trip decimal; exponent form outside [1e-4, 1e15).
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if x.is_finite() && (1e-4..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

struct Printed {
    text: String,
    json: Value,
    code: i32,
}

impl Printed {
    fn ok(text: String, json: Value) -> Self {
        Printed {
            text,
            json,
            code: EXIT_OK,
        }
    }
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let (stdout, stderr) = if code == EXIT_OK {
                (rendered, String::new())
            } else {
                (String::new(), rendered)
            };
            return Outcome { code, stdout, stderr };
        }
    };
    let format = cli.format;
    match execute(&cli) {
        Ok(p) => Outcome {
            code: p.code,
            stdout: match format {
                Format::Text => p.text,
                Format::Json => format!("{}\n", p.json),
            },
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn execute(cli: &Cli) -> Result<Printed> {
    if !(cli.tol > 0.0) {
        return Err(Error::Invalid("--tol must be positive".into()));
    }
    let opts = ContractOptions::with_cap(cli.cap);
    match &cli.command {
        Command::Contract { network } => {
            let net = network_from_json(&read(network)?)?;
            if !net.is_closed() {
                let t = contract_network_with(&net, None, opts)?;
                let entries: Vec<Value> = t.data.iter().map(|z| json!([z.re, z.im])).collect();
                let mut text = String::new();
                for z in &t.data {
                    let _ = writeln!(text, "{} {}", fmt_num(z.re), fmt_num(z.im));
                }
                return Ok(Printed::ok(text, json!({ "shape": t.shape, "entries": entries })));
            }
            let z = contraction_value_with(&net, opts)?;
            Ok(Printed::ok(
                format!("{} {}\n", fmt_num(z.re), fmt_num(z.im)),
                json!({ "re": z.re, "im": z.im }),
            ))
        }
        Command::Norm { peps } => {
            let p = peps_from_json(&read(peps)?)?;
            let v = norm_squared_with(&p, opts)?;
            Ok(Printed::ok(
                format!("{}\n", fmt_num(v)),
                json!({ "norm_squared": v }),
            ))
        }
        Command::Nev {
            peps,
            obs,
            unnormalized,
        } => {
            let p = peps_from_json(&read(peps)?)?;
            let a = Observable::from_spec(obs)?;
            let (v, key) = if *unnormalized {
                (uev_with(&p, &a, opts)?, "uev")
            } else {
                (nev_with(&p, &a, opts)?, "nev")
            };
            Ok(Printed::ok(
                format!("{}\n", fmt_num(v)),
                json!({ key: v, "observable": obs }),
            ))
        }
        Command::Compile {
            direction,
            input,
            mode,
            output,
        } => compile(*direction, input, *mode, output.as_ref()),
        Command::Pathsum { circuit, identity } => pathsum(circuit, *identity),
        Command::Countsat { cnf } => {
            let f = Cnf::from_dimacs(&read(cnf)?)?;
            let c = sat::count_models(&f, opts, cli.tol)?;
            Ok(Printed::ok(
                format!("{}\n", c.count),
                json!({ "count": c.count, "z": c.z, "residue": c.residue }),
            ))
        }
        Command::Majority { cnf } => {
            let f = Cnf::from_dimacs(&read(cnf)?)?;
            let c = sat::count_models(&f, opts, cli.tol)?;
            let answer = if c.majority() { "yes" } else { "no" };
            Ok(Printed::ok(
                format!("{answer}\n"),
                json!({ "majority": c.majority(), "z": c.z }),
            ))
        }
        Command::Cool {
            hamiltonian,
            beta,
            steps,
            order,
            init,
            no_network,
        } => {
            let h = hamiltonian_from_text(&read(hamiltonian)?)?;
            let order: TrotterOrder = order.parse()?;
            let sites = match init {
                InitArg::Plus if h.site_dim() == 2 => plus_state(h.n_sites()),
                InitArg::Plus => {
                    return Err(Error::Invalid("--init plus needs qubit sites".into()));
                }
                InitArg::Haar => haar_product_state(&mut Rng::seed(cli.seed), h.n_sites(), h.site_dim()),
            };
            cool(&h, *beta, *steps, order, &sites, !*no_network, opts)
        }
        Command::Verify => {
            let checks = verify::run(cli.seed, opts)?;
            let mut text = String::new();
            let mut rows = Vec::new();
            for c in &checks {
                let verdict = if c.passed() { "PASS" } else { "FAIL" };
                let _ = writeln!(
                    text,
                    "{verdict} {}  cases {}  failures {}  worst {}",
                    c.name,
                    c.cases,
                    c.failures,
                    fmt_num(c.worst)
                );
                rows.push(json!({
                    "check": c.name, "passed": c.passed(), "cases": c.cases,
                    "failures": c.failures, "worst": c.worst,
                }));
            }
            let code = if checks.iter().all(|c| c.passed()) {
                EXIT_OK
            } else {
                EXIT_NUMERIC
            };
            Ok(Printed {
                text,
                json: Value::Array(rows),
                code,
            })
        }
    }
}

fn compile(
    direction: Direction,
    input: &PathBuf,
    mode: ModeArg,
    output: Option<&PathBuf>,
) -> Result<Printed> {
    let src = read(input)?;
    let (doc, scale) = match direction {
        Direction::C2p => {
            let c = circuit_from_text(&src)?;
            let mode = match mode {
                ModeArg::Spacetime => Mode::Spacetime,
                ModeArg::Mbqc => Mode::Mbqc,
            };
            let compiled = circuit_to_peps(&c, mode)?;
            (compiled_peps_to_text(&compiled), compiled.scale)
        }
        Direction::P2c => {
            let compiled = peps_to_circuit(&peps_from_json(&src)?)?;
            (compiled_circuit_to_text(&compiled), compiled.scale)
        }
    };
    match output {
        Some(path) => {
            std::fs::write(path, &doc)?;
            Ok(Printed::ok(
                format!("wrote {} (scale {})\n", path.display(), fmt_num(scale)),
                json!({ "output": path.display().to_string(), "scale": scale }),
            ))
        }
        None => Ok(Printed::ok(
            doc.clone(),
            json!({ "document": doc, "scale": scale }),
        )),
    }
}

fn bits(x: u64, n: usize) -> String {
    (0..n)
        .map(|q| if (x >> (n - 1 - q)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn pathsum(path: &PathBuf, identity: bool) -> Result<Printed> {
    let th = ThCircuit::new(circuit_from_text(&read(path)?)?)?;
    let n = th.n_qubits();
    let free = ThCircuit::new(th.circuit().without_postselections())?;
    let hist = path_histogram(&free)?;
    let mut text = format!("qubits {n} hadamards {}\n", th.h_count());
    let mut rows = Vec::new();
    for (x, pc) in &hist {
        if pc.net() == 0 {
            continue;
        }
        let p = pc.probability();
        let _ = writeln!(
            text,
            "{} paths +{} -{} probability {p}",
            bits(*x, n),
            pc.plus,
            pc.minus
        );
        rows.push(json!({
            "bits": bits(*x, n), "plus": pc.plus, "minus": pc.minus, "probability": p.to_string(),
        }));
    }
    let mut doc = json!({ "qubits": n, "hadamards": th.h_count(), "outputs": rows });
    if !th.circuit().postselections().is_empty() {
        let norm = postselected_norm(&th)?;
        let _ = writeln!(text, "postselected norm {norm}");
        doc["postselected_norm"] = json!(norm.to_string());
    }
    let mut code = EXIT_OK;
    if identity {
        let id = counting_identity_check(&th)?;
        let holds = id.holds();
        let _ = writeln!(
            text,
            "s {} K {} sum_f {} identity {}",
            id.s,
            id.k,
            id.sum_f,
            if holds { "holds" } else { "FAILS" }
        );
        doc["identity"] = json!({
            "s": id.s.to_string(), "k": id.k.to_string(), "sum_f": id.sum_f.to_string(), "holds": holds,
        });
        if !holds {
            code = EXIT_NUMERIC;
        }
    }
    Ok(Printed {
        text,
        json: doc,
        code,
    })
}

/// |⟨ψ₀|ψ⟩| for a nondegenerate ground state; with a degenerate ground level
/// the overlap with the whole ground space.
fn ground_fidelity(s: &Spectrum, psi: &[C64]) -> f64 {
    let v = CMatrix::from_column_slice(psi.len(), 1, psi);
    let c = s.vectors.adjoint() * v;
    let total: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    let e0 = s.values[0];
    let ground: f64 = c
        .iter()
        .zip(&s.values)
        .filter(|(_, &e)| e - e0 < peps_core::cooling::DEGENERACY_GAP)
        .map(|(z, _)| z.norm_sqr())
        .sum();
    (ground / total).sqrt()
}

fn cool(
    h: &peps_core::cooling::LocalHamiltonian,
    beta: f64,
    steps: usize,
    order: TrotterOrder,
    sites: &[Vec<C64>],
    network: bool,
    opts: ContractOptions,
) -> Result<Printed> {
    let sched = CoolingSchedule::new(beta, steps, order)?;
    let spec = spectrum(h)?;
    let e0 = spec.values[0];
    let degeneracy = spec
        .values
        .iter()
        .filter(|&&e| e - e0 < peps_core::cooling::DEGENERACY_GAP)
        .count();
    let gap = spec.values.get(degeneracy).map_or(0.0, |e| e - e0);
    let chi = product_vector(sites);
    let mut text = format!(
        "sites {} terms {} ground_energy {} gap {} degeneracy {degeneracy}\n",
        h.n_sites(),
        h.terms().len(),
        fmt_num(e0),
        fmt_num(gap)
    );
    text.push_str("beta steps fidelity_trotter fidelity_exact energy_trotter\n");
    let mut rows = Vec::new();
    let mut last = None;
    for k in 0..=4 {
        let b = beta * k as f64 / 4.0;
        let m = ((steps * k).div_ceil(4)).max(1);
        let trot = imaginary_time_evolve(h, &CoolingSchedule::new(b, m, order)?, &chi)?;
        let exact = exact_evolve(&spec, b, &chi)?;
        let ft = ground_fidelity(&spec, &trot.state);
        let fe = ground_fidelity(&spec, &exact.state);
        let energy = h.energy(&trot.state)?;
        let _ = writeln!(
            text,
            "{} {m} {} {} {}",
            fmt_num(b),
            fmt_num(ft),
            fmt_num(fe),
            fmt_num(energy)
        );
        rows.push(json!({ "beta": b, "steps": m, "fidelity_trotter": ft, "fidelity_exact": fe, "energy_trotter": energy }));
        last = Some((ft, trot));
    }
    let (fidelity, trot) = last.expect("five rows");
    let _ = writeln!(
        text,
        "fidelity {} at beta {} steps {steps}",
        fmt_num(fidelity),
        fmt_num(beta)
    );
    let mut doc = json!({ "ground_energy": e0, "gap": gap, "degeneracy": degeneracy, "rows": rows, "fidelity": fidelity });
    if network {
        let net = cooling_network(h, &sched, sites)?;
        let t = contract_network_with(&net, None, opts)?;
        let dense = trot.unnormalized();
        let scale = dense.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let dev = t
            .data
            .iter()
            .zip(&dense)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
            / scale.max(1e-300);
        let _ = writeln!(text, "network_vs_dense max_relative_deviation {}", fmt_num(dev));
        doc["network_vs_dense"] = json!(dev);
    }
    Ok(Printed::ok(text, doc))
}
