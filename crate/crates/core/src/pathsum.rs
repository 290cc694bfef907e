//! Exact path sums for Toffoli–Hadamard circuits.
//!
//! A path is the sequence of branch bits chosen at each H in gate order;
//! classical gates act deterministically in between. Every path ends in one
//! basis state with weight ±2^{−h/2}, so amplitudes, probabilities and
//! postselected norms are exact integers over powers of two.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::circuit::{Gate, PostselectedCircuit};
use crate::par::{self, Execution};
use crate::{Error, Result};

/// Largest number of H gates accepted for 2^h enumeration.
pub const MAX_H: usize = 24;
/// Largest register for the postselected-norm sum over bitstrings.
pub const MAX_NORM_QUBITS: usize = 20;
/// Above this many (x̄, ζ, ζ′) triples the counting identity is tabulated per
/// x̄ instead of enumerated triple by triple.
pub const LITERAL_DOMAIN_LIMIT: u64 = 1 << 20;

/// A postselected circuit restricted to {H, X, CNOT, TOFFOLI}.
#[derive(Clone, Debug, PartialEq)]
pub struct ThCircuit {
    inner: PostselectedCircuit,
}

impl ThCircuit {
    pub fn new(c: PostselectedCircuit) -> Result<Self> {
        if let Some(g) = c.gates().iter().find(|g| !g.is_toffoli_hadamard()) {
            return Err(Error::invalid(format!(
                "gate `{}` is outside the Toffoli–Hadamard set",
                g.name()
            )));
        }
        if c.n_qubits() > 63 {
            return Err(Error::Cap(format!(
                "{} qubits exceed the path-sum cap 63",
                c.n_qubits()
            )));
        }
        Ok(Self { inner: c })
    }

    pub fn circuit(&self) -> &PostselectedCircuit {
        &self.inner
    }

    pub fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    pub fn h_count(&self) -> usize {
        self.inner.h_count()
    }

    fn check_h(&self) -> Result<()> {
        if self.h_count() > MAX_H {
            return Err(Error::Cap(format!(
                "{} Hadamards exceed the path enumeration cap {MAX_H}",
                self.h_count()
            )));
        }
        Ok(())
    }
}

impl TryFrom<PostselectedCircuit> for ThCircuit {
    type Error = Error;

    fn try_from(c: PostselectedCircuit) -> Result<Self> {
        Self::new(c)
    }
}

/// Numbers of +1 and −1 paths (in units of 2^{−h/2}) ending in one bitstring.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PathCount {
    pub plus: u64,
    pub minus: u64,
    pub h_count: usize,
}

impl PathCount {
    pub fn net(&self) -> i64 {
        self.plus as i64 - self.minus as i64
    }

    pub fn amplitude(&self) -> f64 {
        self.net() as f64 * 0.5f64.powf(self.h_count as f64 / 2.0)
    }

    /// |amplitude|² exactly.
    pub fn probability(&self) -> Dyadic {
        let n = BigInt::from(self.net());
        Dyadic::new(&n * &n, self.h_count as u32)
    }
}

/// Exact rational `num / 2^exp` in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: BigInt, exp: u32) -> Self {
        let mut d = Dyadic { num, exp };
        d.reduce();
        d
    }

    pub fn zero() -> Self {
        Dyadic {
            num: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            num: BigInt::one(),
            exp: 0,
        }
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.exp = 0;
            return;
        }
        while self.exp > 0 && self.num.is_even() {
            self.num >>= 1;
            self.exp -= 1;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.num.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(self.exp as i32))
    }
}

impl std::ops::Add for &Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        let a = &self.num << (e - self.exp);
        let b = &rhs.num << (e - rhs.exp);
        Dyadic::new(a + b, e)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.exp)
    }
}

#[derive(Clone, Copy)]
enum Op {
    H(u32),
    X(u32),
    Cnot(u32, u32),
    Toffoli(u32, u32, u32),
}

fn lower(c: &ThCircuit) -> Vec<Op> {
    let n = c.n_qubits();
    let pos = |q: usize| (n - 1 - q) as u32;
    c.inner
        .gates()
        .iter()
        .map(|g| match *g {
            Gate::H(q) => Op::H(pos(q)),
            Gate::X(q) => Op::X(pos(q)),
            Gate::Cnot(a, t) => Op::Cnot(pos(a), pos(t)),
            Gate::Toffoli(a, b, t) => Op::Toffoli(pos(a), pos(b), pos(t)),
            _ => unreachable!("validated by ThCircuit::new"),
        })
        .collect()
}

/// Runs classical gates from `idx` until the next H (or the end).
fn advance(ops: &[Op], mut idx: usize, mut s: u64) -> (usize, u64) {
    while idx < ops.len() {
        match ops[idx] {
            Op::H(_) => break,
            Op::X(p) => s ^= 1 << p,
            Op::Cnot(a, t) => s ^= ((s >> a) & 1) << t,
            Op::Toffoli(a, b, t) => s ^= ((s >> a) & (s >> b) & 1) << t,
        }
        idx += 1;
    }
    (idx, s)
}

/// Visits every path from gate `idx` in state `s` with sign bit `neg`.
fn walk(ops: &[Op], idx: usize, s: u64, neg: bool, visit: &mut impl FnMut(u64, bool)) {
    let (idx, s) = advance(ops, idx, s);
    let Some(&Op::H(p)) = ops.get(idx) else {
        visit(s, neg);
        return;
    };
    let bit = (s >> p) & 1;
    for b in 0..2u64 {
        let next = (s & !(1 << p)) | (b << p);
        walk(ops, idx + 1, next, neg ^ (bit & b == 1), visit);
    }
}

/// Path prefixes after the first few branch points, in a fixed order.
fn prefixes(ops: &[Op], depth: usize) -> Vec<(usize, u64, bool)> {
    let mut level = vec![(0usize, 0u64, false)];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(2 * level.len());
        for (idx, s, neg) in level {
            let (idx, s) = advance(ops, idx, s);
            match ops.get(idx) {
                Some(&Op::H(p)) => {
                    let bit = (s >> p) & 1;
                    for b in 0..2u64 {
                        let t = (s & !(1 << p)) | (b << p);
                        next.push((idx + 1, t, neg ^ (bit & b == 1)));
                    }
                }
                _ => next.push((idx, s, neg)),
            }
        }
        level = next;
    }
    level
}

fn split_depth(h: usize) -> usize {
    h.min(8)
}

/// Path counts for every reachable bitstring (qubit 0 most significant).
pub fn path_histogram(c: &ThCircuit) -> Result<BTreeMap<u64, PathCount>> {
    path_histogram_with(c, Execution::default())
}

pub fn path_histogram_with(c: &ThCircuit, exec: Execution) -> Result<BTreeMap<u64, PathCount>> {
    c.check_h()?;
    let ops = lower(c);
    let h = c.h_count();
    let roots = prefixes(&ops, split_depth(h));
    let parts = par::map_indexed(exec, roots.len(), |i| {
        let (idx, s, neg) = roots[i];
        let mut m: BTreeMap<u64, PathCount> = BTreeMap::new();
        walk(&ops, idx, s, neg, &mut |x, neg| {
            let e = m.entry(x).or_insert(PathCount {
                h_count: h,
                ..Default::default()
            });
            if neg {
                e.minus += 1;
            } else {
                e.plus += 1;
            }
        });
        m
    });
    let mut out: BTreeMap<u64, PathCount> = BTreeMap::new();
    for m in parts {
        for (x, pc) in m {
            let e = out.entry(x).or_insert(PathCount {
                h_count: h,
                ..Default::default()
            });
            e.plus += pc.plus;
            e.minus += pc.minus;
        }
    }
    Ok(out)
}

fn check_bits(c: &ThCircuit, x: u64) -> Result<()> {
    if c.n_qubits() < 64 && x >> c.n_qubits() != 0 {
        return Err(Error::invalid(format!(
            "bitstring {x} has more than {} bits",
            c.n_qubits()
        )));
    }
    Ok(())
}

/// ⟨x|U|0…0⟩ as signed path counts; postselections are ignored.
pub fn path_amplitude(c: &ThCircuit, x: u64) -> Result<PathCount> {
    path_amplitude_with(c, x, Execution::default())
}

pub fn path_amplitude_with(c: &ThCircuit, x: u64, exec: Execution) -> Result<PathCount> {
    c.check_h()?;
    check_bits(c, x)?;
    let ops = lower(c);
    let h = c.h_count();
    let roots = prefixes(&ops, split_depth(h));
    let parts = par::map_indexed(exec, roots.len(), |i| {
        let (idx, s, neg) = roots[i];
        let (mut plus, mut minus) = (0u64, 0u64);
        walk(&ops, idx, s, neg, &mut |end, neg| {
            if end == x {
                if neg {
                    minus += 1;
                } else {
                    plus += 1;
                }
            }
        });
        (plus, minus)
    });
    let (plus, minus) = parts.into_iter().fold((0, 0), |(a, b), (p, m)| (a + p, b + m));
    Ok(PathCount {
        plus,
        minus,
        h_count: h,
    })
}

/// |⟨x|U|0…0⟩|² as an exact dyadic rational.
pub fn probability(c: &ThCircuit, x: u64) -> Result<Dyadic> {
    Ok(path_amplitude(c, x)?.probability())
}

fn post_mask(c: &ThCircuit) -> (u64, u64) {
    let n = c.n_qubits();
    let mut mask = 0u64;
    let mut want = 0u64;
    for &(q, v) in c.inner.postselections() {
        let p = n - 1 - q;
        mask |= 1 << p;
        want |= (v as u64) << p;
    }
    (mask, want)
}

/// Σ p_x over bitstrings consistent with every postselection, exactly.
pub fn postselected_norm(c: &ThCircuit) -> Result<Dyadic> {
    if c.n_qubits() > MAX_NORM_QUBITS {
        return Err(Error::Cap(format!(
            "{} qubits exceed the postselected-norm cap {MAX_NORM_QUBITS}",
            c.n_qubits()
        )));
    }
    let (mask, want) = post_mask(c);
    let hist = path_histogram(c)?;
    let mut total = BigInt::zero();
    for (x, pc) in hist {
        if x & mask == want {
            let n = BigInt::from(pc.net());
            total += &n * &n;
        }
    }
    Ok(Dyadic::new(total, c.h_count() as u32))
}

/// Result of [`counting_identity_check`]. `f` ranges over x̄ (the bits other
/// than the postselected one) and path pairs (ζ, ζ′), so K = 2^{n−1}·2^{2h};
/// f_bool(ξ, z) = (f(ξ) ≥ z) ranges over z ∈ {0, 1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountingIdentity {
    pub s: BigUint,
    pub k: BigUint,
    pub sum_f: BigInt,
    pub norm: Dyadic,
    /// true when every triple was enumerated individually
    pub literal: bool,
}

impl CountingIdentity {
    pub fn holds(&self) -> bool {
        BigInt::from(self.s.clone()) - BigInt::from(self.k.clone()) == self.sum_f
    }
}

pub fn counting_identity_check(c: &ThCircuit) -> Result<CountingIdentity> {
    counting_identity(c, None)
}

fn counting_identity(c: &ThCircuit, force_literal: Option<bool>) -> Result<CountingIdentity> {
    let &[(q, v)] = c.inner.postselections() else {
        return Err(Error::invalid(
            "counting identity needs exactly one postselection (gather first)",
        ));
    };
    let n = c.n_qubits();
    if n > MAX_NORM_QUBITS {
        return Err(Error::Cap(format!(
            "{n} qubits exceed the counting cap {MAX_NORM_QUBITS}"
        )));
    }
    c.check_h()?;
    let h = c.h_count();
    let paths = 1u64 << h;
    let xbar = 1u64 << (n - 1);
    let k = BigUint::from(xbar) << (2 * h);
    let bit = (n - 1 - q) as u32;
    let mut s = BigUint::zero();
    let mut sum_f = BigInt::zero();

    let literal = force_literal.unwrap_or_else(|| {
        xbar.checked_mul(paths * paths)
            .is_some_and(|d| d <= LITERAL_DOMAIN_LIMIT)
    });
    if literal {
        // record every path's end state and sign, then evaluate f pair by pair
        let ops = lower(c);
        let mut ends = Vec::with_capacity(paths as usize);
        walk(&ops, 0, 0, false, &mut |x, neg| {
            ends.push((x, if neg { -1i64 } else { 1 }))
        });
        let (mut nonneg, mut pos, mut total) = (0u64, 0u64, 0i64);
        for xb in 0..xbar {
            // splice the postselected bit into x̄
            let low = xb & ((1 << bit) - 1);
            let x = ((xb >> bit) << (bit + 1)) | ((v as u64) << bit) | low;
            for &(e1, s1) in &ends {
                for &(e2, s2) in &ends {
                    let f = if e1 == x && e2 == x { s1 * s2 } else { 0 };
                    nonneg += u64::from(f >= 0);
                    pos += u64::from(f >= 1);
                    total += f;
                }
            }
        }
        s = BigUint::from(nonneg) + BigUint::from(pos);
        sum_f = BigInt::from(total);
    } else {
        // per x̄: f = +1 on plus²+minus² pairs, −1 on 2·plus·minus, 0 elsewhere
        let pairs = BigUint::from(paths) * BigUint::from(paths);
        let hist = path_histogram(c)?;
        let mut zero_x = xbar;
        for (x, pc) in hist {
            if (x >> bit) & 1 != v as u64 {
                continue;
            }
            zero_x -= 1;
            let (p, m) = (BigUint::from(pc.plus), BigUint::from(pc.minus));
            let plus = &p * &p + &m * &m;
            let minus = BigUint::from(2u8) * &p * &m;
            s += &pairs - &minus + &plus;
            sum_f += BigInt::from(plus) - BigInt::from(minus);
        }
        // unreachable x̄: f ≡ 0, so f ≥ 0 holds on every pair
        s += BigUint::from(zero_x) * &pairs;
    }

    let norm = postselected_norm(c)?;
    let out = CountingIdentity {
        s,
        k,
        sum_f: sum_f.clone(),
        norm: norm.clone(),
        literal,
    };
    if !out.holds() {
        return Err(Error::Numeric(format!(
            "counting identity fails: s − K = {} but Σf = {}",
            BigInt::from(out.s.clone()) - BigInt::from(out.k.clone()),
            out.sum_f
        )));
    }
    if Dyadic::new(sum_f, h as u32) != norm {
        return Err(Error::Numeric(format!(
            "Σf / 2^{h} disagrees with the postselected norm {norm}"
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::simulate;
    use crate::oracle::literal_path_sum;
    use crate::random::{random_th_circuit, Rng};

    fn th(n: usize, gates: Vec<Gate>, posts: Vec<(usize, u8)>) -> ThCircuit {
        ThCircuit::new(PostselectedCircuit::from_parts(n, gates, posts).unwrap()).unwrap()
    }

    #[test]
    fn hadamard_examples() {
        let c = th(1, vec![Gate::H(0)], vec![]);
        let a = path_amplitude(&c, 0).unwrap();
        assert_eq!((a.plus, a.minus), (1, 0));
        assert!((a.amplitude() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(probability(&c, 0).unwrap().to_string(), "1/2^1");

        let c = th(1, vec![Gate::H(0), Gate::H(0)], vec![]);
        let a = path_amplitude(&c, 0).unwrap();
        assert_eq!((a.plus, a.minus), (2, 0));
        assert_eq!(a.amplitude(), 1.0);
        let b = path_amplitude(&c, 1).unwrap();
        assert_eq!((b.plus, b.minus), (1, 1));

        assert_eq!(probability(&th(2, vec![], vec![]), 0).unwrap(), Dyadic::one());
    }

    #[test]
    fn postselected_norm_examples() {
        let c = th(1, vec![Gate::H(0)], vec![(0, 0)]);
        assert_eq!(postselected_norm(&c).unwrap(), Dyadic::new(BigInt::one(), 1));
        let c = th(1, vec![Gate::X(0)], vec![(0, 0)]);
        assert!(postselected_norm(&c).unwrap().is_zero());
    }

    #[test]
    fn counting_examples() {
        let c = th(1, vec![], vec![(0, 0)]);
        let r = counting_identity_check(&c).unwrap();
        assert_eq!(r.sum_f, BigInt::one());
        assert_eq!(r.norm, Dyadic::one());
        assert!(r.literal);

        let c = th(1, vec![Gate::H(0)], vec![(0, 0)]);
        let r = counting_identity_check(&c).unwrap();
        assert_eq!(r.norm, Dyadic::new(BigInt::one(), 1));
        assert!(r.holds());
    }

    #[test]
    fn literal_and_tabulated_counting_agree() {
        let mut rng = Rng::seed(3);
        for _ in 0..10 {
            let c = th_random(&mut rng, 3, 8, 3, 1);
            let a = counting_identity(&c, Some(true)).unwrap();
            let b = counting_identity(&c, Some(false)).unwrap();
            assert!(a.literal && !b.literal);
            assert_eq!((a.s, a.k, a.sum_f), (b.s, b.k, b.sum_f));
        }
    }

    fn th_random(rng: &mut Rng, n: usize, gates: usize, max_h: usize, posts: usize) -> ThCircuit {
        ThCircuit::new(random_th_circuit(rng, n, gates, max_h, posts)).unwrap()
    }

    #[test]
    fn matches_statevector() {
        let mut rng = Rng::seed(4);
        for _ in 0..10 {
            let c = th_random(&mut rng, 4, 14, 10, 0);
            let (state, _) = simulate(c.circuit()).unwrap();
            let mut total = Dyadic::zero();
            for x in 0..16u64 {
                let p = probability(&c, x).unwrap();
                assert!((p.to_f64() - state.amplitude(x).norm_sqr()).abs() < 1e-12);
                total = &total + &p;
            }
            assert_eq!(total, Dyadic::one());
        }
    }

    #[test]
    fn norm_matches_simulator() {
        let mut rng = Rng::seed(5);
        let mut checked = 0;
        while checked < 10 {
            let c = th_random(&mut rng, 4, 12, 8, 2);
            let norm = postselected_norm(&c).unwrap();
            match simulate(c.circuit()) {
                Ok((_, p)) => {
                    assert!((norm.to_f64() - p).abs() < 1e-12);
                    checked += 1;
                }
                Err(_) => assert!(norm.to_f64() < 1e-13),
            }
        }
    }

    #[test]
    fn agrees_with_literal_state_sequences() {
        let mut rng = Rng::seed(6);
        for _ in 0..30 {
            let g = 1 + rng.below(4);
            let c = th_random(&mut rng, 2, g, 4, 0);
            for x in 0..4 {
                let a = path_amplitude(&c, x).unwrap();
                assert_eq!(literal_path_sum(c.circuit(), x).unwrap(), (a.plus, a.minus));
            }
        }
    }

    #[test]
    fn sign_structure() {
        let mut rng = Rng::seed(7);
        let c = th_random(&mut rng, 3, 12, 6, 0);
        let hist = path_histogram(&c).unwrap();
        let total: u64 = hist.values().map(|pc| pc.plus + pc.minus).sum();
        assert_eq!(total, 1 << c.h_count());
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let mut rng = Rng::seed(8);
        let c = th_random(&mut rng, 5, 30, 14, 0);
        assert_eq!(
            path_histogram_with(&c, Execution::Sequential).unwrap(),
            path_histogram_with(&c, Execution::Parallel).unwrap()
        );
    }

    #[test]
    fn rejects_non_th_gates_and_caps() {
        let c = PostselectedCircuit::from_parts(2, vec![Gate::Cz(0, 1)], vec![]).unwrap();
        assert!(ThCircuit::new(c).is_err());
        let c = th(1, vec![Gate::H(0); 25], vec![]);
        assert!(matches!(path_amplitude(&c, 0), Err(Error::Cap(_))));
    }

    #[test]
    fn dyadic_arithmetic() {
        let half = Dyadic::new(BigInt::from(2), 2);
        assert_eq!(half.to_string(), "1/2^1");
        assert_eq!(&half + &half, Dyadic::one());
        assert_eq!(Dyadic::new(BigInt::zero(), 9).to_string(), "0/2^0");
    }
}
