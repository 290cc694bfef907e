//! A small seeded cross-representation suite: every check compares two
//! independent routes to the same quantity.

use peps_core::circuit::simulate;
use peps_core::cooling::{
    exact_ground_state, imaginary_time_evolve, plus_state, product_vector, CoolingSchedule, LocalHamiltonian,
    TrotterOrder,
};
use peps_core::duality::{circuit_to_peps, norm_via_nev, peps_to_circuit, Mode};
use peps_core::linalg::{fidelity, norm_sqr, C64};
use peps_core::oracle::{peps_state_oracle, peps_uev_oracle};
use peps_core::pathsum::{
    counting_identity_check, path_histogram, postselected_norm, probability, Dyadic, ThCircuit,
};
use peps_core::peps::{norm_squared_with, state_vector, uev_via_norm, uev_with, Observable};
use peps_core::random::{
    random_circuit, random_cnf, random_connected_network, random_grid_peps, random_hermitian,
    random_mbqc_circuit, random_th_circuit, valid_postselected, Rng,
};
use peps_core::tensor::{
    conjugate_network, contraction_value_with, network_direct_sum, network_tensor_product, norm_oracle,
    recover_complex_contraction, ContractOptions,
};
use peps_core::Result;

use crate::sat::count_models;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// largest deviation seen (0 for exact checks)
    pub worst: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Tally {
    check: Check,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            check: Check {
                name,
                cases: 0,
                failures: 0,
                worst: 0.0,
            },
        }
    }

    fn record(&mut self, deviation: f64, tol: f64) {
        self.check.cases += 1;
        if !(deviation <= tol) {
            self.check.failures += 1;
        }
        if deviation > self.check.worst || deviation.is_nan() {
            self.check.worst = deviation;
        }
    }

    fn exact(&mut self, ok: bool) {
        self.record(if ok { 0.0 } else { 1.0 }, 0.0);
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

fn crel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

fn norms(rng: &mut Rng, opts: ContractOptions) -> Result<Check> {
    let mut t = Tally::new("norm: contraction / definition / compiled circuit");
    for k in 0..12 {
        let (w, h) = [(1, 2), (2, 2), (2, 3)][k % 3];
        let p = random_grid_peps(rng, w, h, 2, 2);
        let a = norm_squared_with(&p, opts)?;
        let b = norm_sqr(&peps_state_oracle(&p)?);
        let cc = peps_to_circuit(&p)?;
        let c = cc.scale.powi(2) * simulate(&cc.circuit)?.1;
        t.record(rel(a, b).max(rel(a, c)).max(rel(b, c)), 1e-9);
    }
    Ok(t.check)
}

fn duality(rng: &mut Rng) -> Result<Check> {
    let mut t = Tally::new("circuit to PEPS: spacetime and mbqc fidelity");
    for k in 0..12 {
        let gates = 1 + rng.below(8);
        let posts = rng.below(3);
        let (c, mode) = if k % 3 == 2 {
            let c = valid_postselected(rng, 1e-6, |r| {
                random_mbqc_circuit(r, 3, gates.min(5), posts.min(1))
            });
            (c, Mode::Mbqc)
        } else {
            (
                valid_postselected(rng, 1e-6, |r| random_circuit(r, 3, gates, posts)),
                Mode::Spacetime,
            )
        };
        let psi = state_vector(&circuit_to_peps(&c, mode)?.peps)?;
        let want = simulate(&c)?.0.to_dense()?;
        t.record(1.0 - fidelity(&psi, &want), 1e-9);
    }
    Ok(t.check)
}

fn path_sums(rng: &mut Rng) -> Result<Check> {
    let mut t = Tally::new("path sums: probabilities, total, counting identity");
    for _ in 0..12 {
        let n = 1 + rng.below(4);
        let gates = rng.below(14);
        let th = ThCircuit::new(random_th_circuit(rng, n, gates, 8, 1))?;
        let free = ThCircuit::new(th.circuit().without_postselections())?;
        let state = simulate(free.circuit())?.0;
        let mut worst: f64 = 0.0;
        let mut total = Dyadic::zero();
        for x in 0..1u64 << n {
            let p = probability(&free, x)?;
            worst = worst.max((p.to_f64() - state.amplitude(x).norm_sqr()).abs());
            total = &total + &p;
        }
        t.record(worst, 1e-12);
        t.exact(total == Dyadic::one() && path_histogram(&free)?.len() <= 1 << n);
        let id = counting_identity_check(&th)?;
        t.exact(id.holds() && id.norm == postselected_norm(&th)?);
    }
    Ok(t.check)
}

fn counting(rng: &mut Rng, opts: ContractOptions) -> Result<Check> {
    let mut t = Tally::new("model counting via PEPS vs truth table");
    for k in 0..6 {
        let n = 3 + k % 3;
        let f = random_cnf(rng, n, n, 3);
        let got = count_models(&f, opts, 1e-6)?;
        t.exact(got.count == f.count_models());
    }
    Ok(t.check)
}

fn identities(rng: &mut Rng, opts: ContractOptions) -> Result<Check> {
    let mut t = Tally::new("network identities and phase recovery");
    for _ in 0..12 {
        let (na, nb) = (1 + rng.below(4), 1 + rng.below(4));
        let a = random_connected_network(rng, na, 2);
        let b = random_connected_network(rng, nb, 2);
        let za = contraction_value_with(&a, opts)?;
        let zb = contraction_value_with(&b, opts)?;
        let sq = contraction_value_with(&network_tensor_product(&a, &conjugate_network(&a))?, opts)?;
        let sum = contraction_value_with(&network_direct_sum(&a, &b)?, opts)?;
        let back = recover_complex_contraction(norm_oracle, &a)?;
        let dev = crel(sq, C64::new(za.norm_sqr(), 0.0))
            .max(crel(sum, za + zb))
            .max(crel(back, za));
        t.record(dev, 1e-8);
    }
    Ok(t.check)
}

fn reductions(rng: &mut Rng, opts: ContractOptions) -> Result<Check> {
    let mut t = Tally::new("uev via norm, uev oracle, norm via nev");
    for k in 0..10 {
        let p = random_grid_peps(rng, 2, 1 + k % 2, 2, 2);
        let site = rng.below(p.n_vertices());
        let obs = Observable::single(site, random_hermitian(rng, 2))?;
        let scale = norm_squared_with(&p, opts)?;
        let direct = uev_with(&p, &obs, opts)?;
        let dev = (uev_via_norm(&p, &obs)? - direct)
            .abs()
            .max((peps_uev_oracle(&p, &obs)? - direct).abs())
            / scale;
        t.record(dev, 1e-9);
        if k < 3 {
            t.record(rel(norm_via_nev(&p)?, scale), 1e-9);
        }
    }
    Ok(t.check)
}

fn cooling() -> Result<Check> {
    let mut t = Tally::new("cooling: Trotter state vs exact ground state");
    let h = LocalHamiltonian::tfi(6, 2.0, 1.0)?;
    let gs = exact_ground_state(&h)?;
    let sched = CoolingSchedule::new(6.0, 200, TrotterOrder::Second)?;
    let out = imaginary_time_evolve(&h, &sched, &product_vector(&plus_state(6)))?;
    t.record(1.0 - fidelity(&gs.state, &out.state).sqrt(), 1e-3);
    Ok(t.check)
}

/// Runs every check; randomness derives from `seed` only.
pub fn run(seed: u64, opts: ContractOptions) -> Result<Vec<Check>> {
    let mut rng = Rng::seed(seed);
    Ok(vec![
        norms(&mut rng, opts)?,
        duality(&mut rng)?,
        path_sums(&mut rng)?,
        counting(&mut rng, opts)?,
        identities(&mut rng, opts)?,
        reductions(&mut rng, opts)?,
        cooling()?,
    ])
}
