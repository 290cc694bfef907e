//! Acceptance suite: one PASS/FAIL line per criterion, with its runtime.
//! Runs without the libtest harness so the lines always reach stdout.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use peps_core::circuit::{simulate, Cnf};
use peps_core::cooling::{
    convergence_report, cooling_network, exact_ground_state, haar_product_state, imaginary_time_evolve,
    plus_state, product_vector, CoolingSchedule, LocalHamiltonian, TrotterOrder,
};
use peps_core::duality::{circuit_to_peps, norm_via_nev, peps_to_circuit, Mode};
use peps_core::linalg::{c64, fidelity, norm_sqr, C64};
use peps_core::oracle::peps_state_oracle;
use peps_core::pathsum::{counting_identity_check, probability, Dyadic, ThCircuit};
use peps_core::peps::{norm_squared, state_vector, uev, uev_via_norm, Observable, PepsGraph};
use peps_core::random::{
    random_circuit, random_cnf, random_connected_network, random_grid_peps, random_hermitian,
    random_mbqc_circuit, random_peps, random_th_circuit, valid_postselected, Rng,
};
use peps_core::tensor::{
    conjugate_network, contraction_value, network_direct_sum, network_tensor_product, norm_oracle,
    recover_complex_contraction, rotate_tensor,
};

/// A summary of what was measured, or the reason the criterion failed.
/// Library errors are failures.
type Verdict = Result<String, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    format!("error: {e}")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn crel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

fn fail_if(cond: bool, msg: impl FnOnce() -> String) -> Verdict {
    if cond {
        Err(msg())
    } else {
        Ok(msg())
    }
}

fn c1_cross_representation() -> Verdict {
    let mut rng = Rng::seed(101);
    let shapes = [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (2, 3), (3, 2)];
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let (w, h) = shapes[k % shapes.len()];
        let p = random_grid_peps(&mut rng, w, h, 2, 2);
        let contracted = norm_squared(&p).map_err(err)?;
        let definition = norm_sqr(&peps_state_oracle(&p).map_err(err)?);
        let cc = peps_to_circuit(&p).map_err(err)?;
        let circuit = cc.scale.powi(2) * simulate(&cc.circuit).map_err(err)?.1;
        let dev = rel(contracted, definition)
            .max(rel(contracted, circuit))
            .max(rel(definition, circuit));
        worst = worst.max(dev);
    }
    fail_if(!(worst <= 1e-9), || {
        format!("worst pairwise relative deviation {worst:.1e}")
    })
}

fn c2_round_trip() -> Verdict {
    let mut rng = Rng::seed(102);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let gates = 1 + rng.below(8);
        let posts = rng.below(3);
        let c = valid_postselected(&mut rng, 1e-6, |r| random_circuit(r, 3, gates, posts));
        let psi = state_vector(&circuit_to_peps(&c, Mode::Spacetime).map_err(err)?.peps).map_err(err)?;
        let want = simulate(&c).map_err(err)?.0.to_dense().map_err(err)?;
        worst = worst.max(1.0 - fidelity(&psi, &want));
    }
    let mut mbqc_worst: f64 = 0.0;
    for _ in 0..24 {
        let gates = 1 + rng.below(8);
        let posts = rng.below(3);
        let c = valid_postselected(&mut rng, 1e-6, |r| random_mbqc_circuit(r, 3, gates, posts));
        let psi = state_vector(&circuit_to_peps(&c, Mode::Mbqc).map_err(err)?.peps).map_err(err)?;
        let want = simulate(&c).map_err(err)?.0.to_dense().map_err(err)?;
        mbqc_worst = mbqc_worst.max(1.0 - fidelity(&psi, &want));
    }
    fail_if(!(worst <= 1e-9 && mbqc_worst <= 1e-9), || {
        format!("fidelity loss spacetime {worst:.1e}, mbqc {mbqc_worst:.1e}")
    })
}

fn c3_path_sums() -> Verdict {
    let mut rng = Rng::seed(103);
    let (mut worst, mut max_h, mut literal): (f64, usize, usize) = (0.0, 0, 0);
    for i in 0..100 {
        let n = 1 + rng.below(5);
        let gates = 4 + rng.below(30);
        let c = random_th_circuit(&mut rng, n, gates, 12, 1);
        let th = ThCircuit::new(c.clone()).map_err(err)?;
        let free = ThCircuit::new(c.without_postselections()).map_err(err)?;
        let state = simulate(free.circuit()).map_err(err)?.0;
        let mut total = Dyadic::zero();
        for x in 0..1u64 << n {
            let p = probability(&free, x).map_err(err)?;
            let dev = (p.to_f64() - state.amplitude(x).norm_sqr()).abs();
            worst = worst.max(dev);
            if !(dev <= 1e-12) {
                return Err(format!("instance {i}: probability of {x} off by {dev:e}"));
            }
            total = &total + &p;
        }
        if total != Dyadic::one() {
            return Err(format!("instance {i}: probabilities sum to {total}"));
        }
        let id = counting_identity_check(&th).map_err(err)?;
        if !id.holds() {
            return Err(format!(
                "instance {i}: s − K = {} − {} but Σf = {}",
                id.s, id.k, id.sum_f
            ));
        }
        max_h = max_h.max(th.h_count());
        literal += id.literal as usize;
    }
    Ok(format!(
        "worst probability deviation {worst:.1e}, max h {max_h}, {literal} identities enumerated literally"
    ))
}

fn brute_majority(f: &Cnf) -> bool {
    2 * f.count_models() >= 1u64 << f.n_vars
}

fn c4_counting(dir: &Path) -> Verdict {
    let mut rng = Rng::seed(104);
    let mut formulas = Vec::new();
    for i in 0..50 {
        let n = 4 + i % 5;
        let m = 1 + rng.below(n);
        formulas.push(random_cnf(&mut rng, n, m, 3));
    }
    // exact ties s = 2^{n-1}: a unit clause, an XOR pair, and random finds
    formulas.push(Cnf::new(5, vec![vec![-3]]).unwrap());
    formulas.push(Cnf::new(6, vec![vec![1, 2], vec![-1, -2]]).unwrap());
    let mut ties = 0;
    while ties < 4 {
        let n = 4 + rng.below(3);
        let m = 1 + rng.below(3);
        let f = random_cnf(&mut rng, n, m, 2);
        if 2 * f.count_models() == 1 << n {
            formulas.push(f);
            ties += 1;
        }
    }
    for (i, f) in formulas.iter().enumerate() {
        let path = dir.join(format!("f{i}.cnf"));
        std::fs::write(&path, f.to_dimacs()).map_err(err)?;
        let count = peps_cli::run(["peps", "countsat", path.to_str().ok_or("path")?]);
        let want = f.count_models();
        if count.code != 0 || count.stdout.trim() != want.to_string() {
            return Err(format!(
                "formula {i}: countsat gave {:?} (exit {}), truth {want}",
                count.stdout.trim(),
                count.code
            ));
        }
        let maj = peps_cli::run(["peps", "majority", path.to_str().ok_or("path")?]);
        let expect = if brute_majority(f) { "yes" } else { "no" };
        if maj.stdout.trim() != expect {
            return Err(format!(
                "formula {i}: majority {:?}, truth {expect}",
                maj.stdout.trim()
            ));
        }
    }
    Ok(format!(
        "{} formulas exact, {} with s = 2^(n-1)",
        formulas.len(),
        formulas
            .iter()
            .filter(|f| 2 * f.count_models() == 1 << f.n_vars)
            .count()
    ))
}

fn c5_identities() -> Verdict {
    let mut rng = Rng::seed(105);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let (na, nb) = (1 + rng.below(5), 1 + rng.below(5));
        let mut a = random_connected_network(&mut rng, na, 2);
        let b = random_connected_network(&mut rng, nb, 2);
        // steer every third network to a negative real, every third+1 to a purely imaginary value
        let z = contraction_value(&a).map_err(err)?;
        if z.norm() > 0.0 && i % 3 != 0 {
            let target = if i % 3 == 1 { c64(-1.0, 0.0) } else { c64(0.0, 1.0) };
            a = rotate_tensor(
                &a,
                a.min_id().ok_or("empty network")?,
                target * z.conj() / z.norm(),
            )
            .map_err(err)?;
        }
        let za = contraction_value(&a).map_err(err)?;
        let zb = contraction_value(&b).map_err(err)?;
        let sq = contraction_value(&network_tensor_product(&a, &conjugate_network(&a)).map_err(err)?)
            .map_err(err)?;
        let sum = contraction_value(&network_direct_sum(&a, &b).map_err(err)?).map_err(err)?;
        let back = recover_complex_contraction(norm_oracle, &a).map_err(err)?;
        let dev = crel(sq, c64(za.norm_sqr(), 0.0))
            .max(crel(sum, za + zb))
            .max(crel(back, za));
        worst = worst.max(dev);
    }
    fail_if(!(worst <= 1e-8), || {
        format!("worst relative deviation {worst:.1e}")
    })
}

fn c6_reductions() -> Verdict {
    let mut rng = Rng::seed(106);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let (w, h) = [(1, 2), (2, 2), (2, 3)][k % 3];
        let p = random_grid_peps(&mut rng, w, h, 2, 2);
        let site = rng.below(p.n_vertices());
        let obs = Observable::single(site, random_hermitian(&mut rng, 2)).map_err(err)?;
        let scale = norm_squared(&p).map_err(err)?;
        let dev = (uev_via_norm(&p, &obs).map_err(err)? - uev(&p, &obs).map_err(err)?).abs() / scale;
        worst = worst.max(dev);
    }
    let mut norm_worst: f64 = 0.0;
    for k in 0..50 {
        let graph = match k % 3 {
            0 => PepsGraph::grid(1, 1, 2, 2),
            1 => PepsGraph::grid(2, 1, 2, 2),
            _ => PepsGraph::grid(2, 1, 2, 4),
        }
        .map_err(err)?;
        let p = random_peps(&mut rng, graph);
        norm_worst = norm_worst.max(rel(
            norm_via_nev(&p).map_err(err)?,
            norm_squared(&p).map_err(err)?,
        ));
    }
    fail_if(!(worst <= 1e-9 && norm_worst <= 1e-9), || {
        format!("uev_via_norm deviation {worst:.1e}, norm-as-nev deviation {norm_worst:.1e}")
    })
}

fn c7_cooling() -> Verdict {
    let h8 = LocalHamiltonian::tfi(8, 2.0, 1.0).map_err(err)?;
    let gs = exact_ground_state(&h8).map_err(err)?;
    let sched = CoolingSchedule::new(6.0, 200, TrotterOrder::Second).map_err(err)?;
    let out = imaginary_time_evolve(&h8, &sched, &product_vector(&plus_state(8))).map_err(err)?;
    let f = fidelity(&gs.state, &out.state).sqrt();
    if !(f >= 0.999) {
        return Err(format!("fidelity {f} at β = 6, M = 200"));
    }
    let mut summary = format!("fidelity {f:.6}");

    let chi = product_vector(&haar_product_state(&mut Rng::seed(107), 8, 2));
    let betas: Vec<f64> = (1..=16).map(|k| 0.5 * k as f64).collect();
    let report = convergence_report(&h8, &betas, 200.0 / 6.0, &chi).map_err(err)?;
    let want = -2.0 * report.gap;
    let slope = report.slope.ok_or("no slope fitted")?;
    if !((slope - want).abs() <= 0.2 * want.abs()) {
        return Err(format!("slope {slope} vs −2Δ = {want}"));
    }
    summary += &format!(", slope {slope:.4} vs −2Δ = {want:.4}");

    let h6 = LocalHamiltonian::tfi(6, 2.0, 1.0).map_err(err)?;
    let sites = plus_state(6);
    let sched = CoolingSchedule::new(6.0, 100, TrotterOrder::Second).map_err(err)?;
    let dense = imaginary_time_evolve(&h6, &sched, &product_vector(&sites))
        .map_err(err)?
        .unnormalized();
    let net = peps_core::tensor::contract_network(&cooling_network(&h6, &sched, &sites).map_err(err)?, None)
        .map_err(err)?;
    let scale = dense.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let dev = net
        .data
        .iter()
        .zip(&dense)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / scale;
    fail_if(!(dev <= 1e-8), || {
        format!("{summary}, network vs dense deviation {dev:.1e}")
    })
}

fn c8_determinism(dir: &Path) -> Verdict {
    let bin = env!("CARGO_BIN_EXE_peps");
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let d = |f: &str| data.join(f).to_string_lossy().into_owned();
    let compiled = dir.join("bell.circ").to_string_lossy().into_owned();
    let suite: Vec<Vec<String>> = vec![
        vec!["verify".into(), "--seed".into(), "7".into()],
        vec!["contract".into(), d("trace_identity2.json")],
        vec!["norm".into(), d("bell.peps.json")],
        vec!["nev".into(), d("bell.peps.json"), "--obs".into(), "sx@1".into()],
        vec![
            "compile".into(),
            "c2p".into(),
            d("ghz.circ"),
            "--mode".into(),
            "mbqc".into(),
        ],
        vec![
            "compile".into(),
            "p2c".into(),
            d("bell.peps.json"),
            "-o".into(),
            compiled.clone(),
        ],
        vec!["pathsum".into(), d("th.circ"), "--identity".into()],
        vec!["countsat".into(), d("random8.cnf")],
        vec!["majority".into(), d("half.cnf"), "--format".into(), "json".into()],
        vec![
            "cool".into(),
            d("tfi6.ham"),
            "--beta".into(),
            "3".into(),
            "--steps".into(),
            "60".into(),
            "--init".into(),
            "haar".into(),
            "--seed".into(),
            "3".into(),
        ],
    ];
    let run_all = || -> Result<Vec<u8>, String> {
        let mut all = Vec::new();
        for args in &suite {
            let out = Command::new(bin).args(args).output().map_err(err)?;
            all.extend_from_slice(format!("$ {} -> {:?}\n", args.join(" "), out.status.code()).as_bytes());
            all.extend_from_slice(&out.stdout);
            if args[0] == "compile" && args.len() > 3 && args[3] == "-o" {
                all.extend_from_slice(&std::fs::read(&compiled).map_err(err)?);
            }
        }
        Ok(all)
    };
    let first = run_all()?;
    let second = run_all()?;
    if first != second {
        return Err("two runs produced different output".to_string());
    }
    Ok(format!(
        "{} commands, {} bytes identical",
        suite.len(),
        first.len()
    ))
}

fn main() {
    let dir = std::env::temp_dir().join(format!("peps-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("scratch directory");
    type Criterion<'a> = (&'a str, u64, Box<dyn Fn() -> Verdict + 'a>);
    let criteria: Vec<Criterion> = vec![
        (
            "1 cross-representation norms (200 PEPS)",
            60,
            Box::new(c1_cross_representation),
        ),
        (
            "2 circuit/PEPS round trip (100 spacetime, 24 mbqc)",
            120,
            Box::new(c2_round_trip),
        ),
        (
            "3 path-sum exactness (100 TH circuits)",
            60,
            Box::new(c3_path_sums),
        ),
        (
            "4 #P demo: countsat and majority (56 CNFs)",
            600,
            Box::new(|| c4_counting(&dir)),
        ),
        (
            "5 tensor-network identities (100 networks)",
            60,
            Box::new(c5_identities),
        ),
        (
            "6 expectation-value reductions (100 uev, 50 norm-as-nev)",
            60,
            Box::new(c6_reductions),
        ),
        ("7 cooling TFI chain", 300, Box::new(c7_cooling)),
        (
            "8 byte-identical CLI output across runs",
            600,
            Box::new(|| c8_determinism(&dir)),
        ),
    ];
    let mut failed = 0;
    let mut stdout = std::io::stdout().lock();
    for (name, budget, check) in &criteria {
        let start = Instant::now();
        let verdict = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let took = start.elapsed();
        let verdict = match verdict {
            Ok(_) if took > Duration::from_secs(*budget) => Err(format!(
                "runtime {:.1}s over the {budget}s budget",
                took.as_secs_f64()
            )),
            v => v,
        };
        let line = match &verdict {
            Ok(what) => format!("PASS criterion {name} ({:.1}s): {what}", took.as_secs_f64()),
            Err(why) => {
                failed += 1;
                format!("FAIL criterion {name} ({:.1}s): {why}", took.as_secs_f64())
            }
        };
        writeln!(stdout, "{line}").unwrap();
        stdout.flush().unwrap();
    }
    let _ = std::fs::remove_dir_all(&dir);
    if failed > 0 {
        writeln!(stdout, "{failed} acceptance criteria failed").unwrap();
        std::process::exit(1);
    }
}
