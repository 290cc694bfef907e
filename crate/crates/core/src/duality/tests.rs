use super::*;
use crate::circuit::{simulate, Gate};
use crate::linalg::{fidelity, from_row_major, identity, is_unitary, max_abs_diff, norm_sqr, C64, ONE, ZERO};
use crate::peps::{norm_squared, state_vector, Edge, PepsGraph};
use crate::random::{
    random_circuit, random_grid_peps, random_matrix, random_mbqc_circuit, random_peps, valid_postselected,
    Rng,
};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Postselected output vector of `c` (unnormalized) and its success probability.
fn circuit_output(c: &PostselectedCircuit) -> (Vec<C64>, f64) {
    let (s, p) = simulate(c).unwrap();
    let v = s.to_dense().unwrap().into_iter().map(|z| z * p.sqrt()).collect();
    (v, p)
}

fn check_compiled(c: &PostselectedCircuit, mode: Mode) {
    let comp = circuit_to_peps(c, mode).unwrap();
    assert_eq!(comp.output_sites.len(), c.n_qubits());
    let psi = state_vector(&comp.peps).unwrap();
    let (want, p) = circuit_output(c);
    assert!(fidelity(&psi, &want) > 1.0 - 1e-9, "{mode:?} fidelity");
    assert!(
        rel(norm_sqr(&psi) / comp.scale.powi(2), p) < 1e-9,
        "{mode:?} scale"
    );
}

#[test]
fn empty_circuit_is_zero_state() {
    for mode in [Mode::Spacetime, Mode::Mbqc] {
        let c = PostselectedCircuit::new(1);
        let comp = circuit_to_peps(&c, mode).unwrap();
        let psi = state_vector(&comp.peps).unwrap();
        assert!(fidelity(&psi, &[ONE, ZERO]) > 1.0 - 1e-12);
    }
}

#[test]
fn hadamard_postselect_mbqc() {
    let c = PostselectedCircuit::from_parts(1, vec![Gate::H(0)], vec![(0, 0)]).unwrap();
    let comp = circuit_to_peps(&c, Mode::Mbqc).unwrap();
    let psi = state_vector(&comp.peps).unwrap();
    assert!(fidelity(&psi, &[ONE, ZERO]) > 1.0 - 1e-12);
    let norm = norm_squared(&comp.peps).unwrap();
    assert!((norm / comp.scale.powi(2) - 0.5).abs() < 1e-10);
}

#[test]
fn spacetime_matches_simulator() {
    let mut rng = Rng::seed(11);
    for _ in 0..30 {
        let g = 1 + rng.below(6);
        let posts = rng.below(3);
        let c = valid_postselected(&mut rng, 1e-6, |r| random_circuit(r, 3, g, posts));
        check_compiled(&c, Mode::Spacetime);
    }
}

#[test]
fn mbqc_matches_simulator() {
    let mut rng = Rng::seed(12);
    for _ in 0..10 {
        let g = 1 + rng.below(6);
        let posts = rng.below(2);
        let c = valid_postselected(&mut rng, 1e-6, |r| random_mbqc_circuit(r, 3, g, posts));
        check_compiled(&c, Mode::Mbqc);
    }
}

#[test]
fn mbqc_routes_distant_cz() {
    let c = PostselectedCircuit::from_parts(
        3,
        vec![Gate::H(0), Gate::H(2), Gate::Cz(0, 2), Gate::H(2), Gate::X(1)],
        vec![],
    )
    .unwrap();
    check_compiled(&c, Mode::Mbqc);
}

#[test]
fn mbqc_scale_predicts_norm_of_unitary_circuits() {
    let mut rng = Rng::seed(13);
    for _ in 0..4 {
        let c = random_mbqc_circuit(&mut rng, 2, 5, 0);
        let comp = circuit_to_peps(&c, Mode::Mbqc).unwrap();
        let norm = norm_squared(&comp.peps).unwrap();
        assert!(rel(norm, comp.scale.powi(2)) < 1e-9);
    }
}

#[test]
fn mbqc_rejects_toffoli() {
    let c = PostselectedCircuit::from_parts(3, vec![Gate::Toffoli(0, 1, 2)], vec![]).unwrap();
    assert!(circuit_to_peps(&c, Mode::Mbqc).is_err());
}

#[test]
fn dilate_examples() {
    let (u, s) = dilate(&identity(2)).unwrap();
    assert!((s - 1.0).abs() < 1e-14);
    assert!(max_abs_diff(&u.view((0, 0), (2, 2)).into_owned(), &identity(2)) < 1e-14);

    let (u, s) = dilate(&(identity(2) * C64::from(2.0))).unwrap();
    assert!((s - 2.0).abs() < 1e-14);
    assert!(max_abs_diff(&u.view((0, 0), (2, 2)).into_owned(), &identity(2)) < 1e-14);

    let mut rng = Rng::seed(14);
    for (r, c) in [(2, 4), (4, 2), (3, 3), (1, 8)] {
        let p = random_matrix(&mut rng, r, c);
        let (u, s) = dilate(&p).unwrap();
        assert!(is_unitary(&u, 1e-10));
        let block = u.view((0, 0), (r, c)).into_owned() * C64::from(s);
        assert!(max_abs_diff(&block, &p) < 1e-12);
    }
    assert!(dilate(&crate::linalg::CMatrix::zeros(2, 2)).is_err());
}

fn compiled_state(cc: &CompiledCircuit) -> (Vec<C64>, f64) {
    let (s, p) = simulate(&cc.circuit).unwrap();
    let outs = cc.all_output_qubits();
    let rest: Vec<(usize, u8)> = (0..cc.circuit.n_qubits())
        .filter(|q| !outs.contains(q))
        .map(|q| (q, 0))
        .collect();
    (s.slice(&outs, &rest), p)
}

#[test]
fn bell_and_single_vertex() {
    let g = PepsGraph::new(vec![2, 2], vec![Edge { u: 0, v: 1, dim: 2 }]).unwrap();
    let bell = Peps::new(g, vec![identity(2), identity(2)]).unwrap();
    let cc = peps_to_circuit(&bell).unwrap();
    assert_eq!(cc.circuit.postselections().len(), 1);
    let (_, p) = simulate(&cc.circuit).unwrap();
    assert!((cc.scale.powi(2) * p - 2.0).abs() < 1e-10);

    let g = PepsGraph::new(vec![2], vec![]).unwrap();
    let ket = Peps::new(g, vec![from_row_major(2, 1, &[ONE, ZERO])]).unwrap();
    let cc = peps_to_circuit(&ket).unwrap();
    let (psi, p) = compiled_state(&cc);
    assert!(fidelity(&psi, &[ONE, ZERO]) > 1.0 - 1e-12);
    assert!((cc.scale.powi(2) * p - 1.0).abs() < 1e-12);
}

#[test]
fn grid_peps_to_circuit() {
    let mut rng = Rng::seed(15);
    for _ in 0..3 {
        let p = random_grid_peps(&mut rng, 2, 2, 2, 2);
        let cc = peps_to_circuit(&p).unwrap();
        let (psi, prob) = compiled_state(&cc);
        let want = state_vector(&p).unwrap();
        assert!(fidelity(&psi, &want) > 1.0 - 1e-9);
        assert!(rel(cc.scale.powi(2) * prob, norm_squared(&p).unwrap()) < 1e-9);
    }
}

#[test]
fn wide_projectors_and_trivial_physical_legs() {
    // degree-1 vertex with d = 4 > D = 2 needs a pad qubit; d = 1 has no output
    let g = PepsGraph::new(
        vec![4, 1, 2],
        vec![Edge { u: 0, v: 1, dim: 2 }, Edge { u: 1, v: 2, dim: 2 }],
    )
    .unwrap();
    let mut rng = Rng::seed(16);
    let p = random_peps(&mut rng, g);
    let cc = peps_to_circuit(&p).unwrap();
    assert_eq!(cc.output_qubits[1].len(), 0);
    let (psi, prob) = compiled_state(&cc);
    let want = state_vector(&p).unwrap();
    assert!(fidelity(&psi, &want) > 1.0 - 1e-9);
    assert!(rel(cc.scale.powi(2) * prob, norm_squared(&p).unwrap()) < 1e-9);
}

#[test]
fn non_power_of_two_rejected() {
    let g = PepsGraph::new(vec![2, 2], vec![Edge { u: 0, v: 1, dim: 3 }]).unwrap();
    let mut rng = Rng::seed(17);
    assert!(peps_to_circuit(&random_peps(&mut rng, g)).is_err());
}

#[test]
fn gather_examples() {
    let one = PostselectedCircuit::from_parts(1, vec![Gate::H(0)], vec![(0, 0)]).unwrap();
    let g = gather_postselections(&one).unwrap();
    assert_eq!(g.postselections().len(), 1);
    assert!((simulate(&g).unwrap().1 - 0.5).abs() < 1e-12);

    let two = PostselectedCircuit::from_parts(2, vec![Gate::H(0), Gate::H(1)], vec![(0, 0), (1, 0)]).unwrap();
    let g = gather_postselections(&two).unwrap();
    assert!((simulate(&two).unwrap().1 - 0.25).abs() < 1e-12);
    assert!((simulate(&g).unwrap().1 - 0.25).abs() < 1e-12);

    let none = PostselectedCircuit::from_parts(1, vec![Gate::H(0)], vec![]).unwrap();
    assert_eq!(gather_postselections(&none).unwrap(), none);
}

#[test]
fn gather_preserves_semantics() {
    let mut rng = Rng::seed(18);
    for _ in 0..20 {
        let k = 3 + rng.below(3);
        let c = valid_postselected(&mut rng, 1e-4, |r| random_circuit(r, 5, 10, k));
        let g = gather_postselections(&c).unwrap();
        assert_eq!(g.postselections().len(), 1);
        let (a, pa) = simulate(&c).unwrap();
        let (b, pb) = simulate(&g).unwrap();
        assert!((pa - pb).abs() < 1e-12);
        let qs: Vec<usize> = (0..c.n_qubits()).collect();
        let rest: Vec<(usize, u8)> = (c.n_qubits()..g.n_qubits()).map(|q| (q, 0)).collect();
        let va = a.slice(&qs, &[]);
        let vb = b.slice(&qs, &rest);
        for (x, y) in va.iter().zip(&vb) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}

#[test]
fn round_trip_a() {
    let mut rng = Rng::seed(19);
    for _ in 0..2 {
        let p = random_grid_peps(&mut rng, 2, 1, 2, 2);
        let cc = peps_to_circuit(&p).unwrap();
        let back = circuit_to_peps(&cc.circuit, Mode::Spacetime).unwrap();
        let outs = cc.all_output_qubits();
        let sites: Vec<usize> = outs.iter().map(|&q| back.output_sites[q]).collect();
        let rho = crate::peps::reduced_density_matrix(&back.peps, &sites).unwrap();
        let want = state_vector(&p).unwrap();
        let n = norm_sqr(&want);
        let overlap: C64 = (0..want.len())
            .flat_map(|i| (0..want.len()).map(move |j| (i, j)))
            .map(|(i, j)| want[i].conj() * rho[(i, j)] * want[j])
            .sum();
        let tr: C64 = (0..want.len()).map(|i| rho[(i, i)]).sum();
        assert!(overlap.re / (n * tr.re) > 1.0 - 1e-9);
    }
}

#[test]
fn round_trip_b() {
    let mut rng = Rng::seed(20);
    let g = PepsGraph::new(vec![2, 2], vec![Edge { u: 0, v: 1, dim: 2 }]).unwrap();
    let p = random_peps(&mut rng, g);
    assert!(rel(norm_via_nev(&p).unwrap(), norm_squared(&p).unwrap()) < 1e-9);
    let p = random_grid_peps(&mut rng, 2, 1, 2, 2);
    assert!(rel(norm_via_nev(&p).unwrap(), norm_squared(&p).unwrap()) < 1e-9);
}
