//! Test-side reference simulator, written without the library's `qsim`.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use adbqc::gadgets::{gadget_cz, gadget_hrz_sueki, AncillaPrep, Octant, PauliFrame};
use adbqc::protocols::{p1_hrz_case_a, p1_hrz_case_b, p2_hrz, GateKind, GateRequest};
use adbqc::qsim::{enumerate_choices, Chooser, StateVector, BRANCH_BUDGET};
use num_complex::Complex64 as C;
use rand::Rng;

pub type M2 = [[C; 2]; 2];

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn h() -> M2 {
    let s = c(FRAC_1_SQRT_2, 0.0);
    [[s, s], [s, -s]]
}

pub fn rz(theta: f64) -> M2 {
    [
        [c(1.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), C::from_polar(1.0, theta)],
    ]
}

pub fn x() -> M2 {
    [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
}

pub fn z() -> M2 {
    rz(std::f64::consts::PI)
}

pub fn mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn hrz(octant: u8) -> M2 {
    mul(&h(), &rz(octant as f64 * FRAC_PI_4))
}

/// `RZ(b) RX(g) RZ(d)` with `RX(g) = H RZ(g) H`.
pub fn euler(b: u8, g: u8, d: u8) -> M2 {
    let o = |k: u8| rz(k as f64 * FRAC_PI_4);
    let rx = mul(&h(), &mul(&o(g), &h()));
    mul(&o(b), &mul(&rx, &o(d)))
}

/// Dense little-endian statevector.
#[derive(Clone, Debug)]
pub struct Dense {
    pub n: usize,
    pub amps: Vec<C>,
}

impl Dense {
    pub fn zero(n: usize) -> Self {
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        amps[0] = c(1.0, 0.0);
        Self { n, amps }
    }

    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let mut amps: Vec<C> = (0..1 << n)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        Self { n, amps }
    }

    pub fn from_lib(s: &StateVector) -> Self {
        Self {
            n: s.num_qubits(),
            amps: s.amplitudes().to_vec(),
        }
    }

    pub fn to_lib(&self) -> StateVector {
        StateVector::from_amplitudes(self.amps.clone()).unwrap()
    }

    pub fn apply(&mut self, m: &M2, q: usize) {
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        for i in 0..self.amps.len() {
            if (i >> a) & 1 == 1 && (i >> b) & 1 == 1 {
                self.amps[i] = -self.amps[i];
            }
        }
    }

    /// Undoes a frame: applies `X^x` then `Z^z` per qubit (inverse up to phase).
    pub fn unframe(&mut self, f: &PauliFrame) {
        for q in 0..self.n {
            let (fx, fz) = f.get(q);
            if fx {
                self.apply(&x(), q);
            }
            if fz {
                self.apply(&z(), q);
            }
        }
    }

    pub fn fidelity(&self, other: &Dense) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<C>()
            .norm_sqr()
    }

    pub fn apply_request(&mut self, g: &GateRequest) {
        let t = &g.targets;
        let single = |o: [u8; 3]| euler(o[0], o[1], o[2]);
        match g.kind {
            GateKind::Single => {
                let o = [g.octants[0].k(), g.octants[1].k(), g.octants[2].k()];
                self.apply(&single(o), t[0]);
            }
            GateKind::I => {}
            GateKind::H => self.apply(&h(), t[0]),
            GateKind::X => self.apply(&x(), t[0]),
            GateKind::Z => self.apply(&z(), t[0]),
            GateKind::S => self.apply(&rz(2.0 * FRAC_PI_4), t[0]),
            GateKind::T => self.apply(&rz(FRAC_PI_4), t[0]),
            GateKind::Cz => self.cz(t[0], t[1]),
            GateKind::Cnot => {
                self.apply(&h(), t[1]);
                self.cz(t[0], t[1]);
                self.apply(&h(), t[1]);
            }
        }
    }
}

/// Z-basis output distribution of `algorithm` on `n` fresh `|0>` qubits,
/// keyed by bits in qubit order.
pub fn reference_distribution(n: usize, algorithm: &[GateRequest]) -> BTreeMap<Vec<u8>, f64> {
    let mut s = Dense::zero(n);
    for g in algorithm {
        s.apply_request(g);
    }
    let mut out = BTreeMap::new();
    for (i, a) in s.amps.iter().enumerate() {
        let p = a.norm_sqr();
        if p > 1e-15 {
            let bits: Vec<u8> = (0..n).map(|q| ((i >> q) & 1) as u8).collect();
            *out.entry(bits).or_insert(0.0) += p;
        }
    }
    out
}

pub fn total_variation(a: &BTreeMap<Vec<u8>, f64>, b: &BTreeMap<Vec<u8>, f64>) -> f64 {
    let mut keys: Vec<&Vec<u8>> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.iter()
        .map(|k| (a.get(*k).unwrap_or(&0.0) - b.get(*k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
        / 2.0
}

/// Exhaustive count of placements of `a` X, `b` Z and `c` XZ on distinct
/// positions of a layout `[register; r] ++ [zero trap; z0] ++ [plus trap; p]`
/// that leave every trap intact, divided by all placements.
pub fn brute_force_escape(r: usize, z0: usize, p: usize) -> BTreeMap<(usize, usize, usize), f64> {
    let n = r + z0 + p;
    // 0: none, 1: X, 2: Z, 3: XZ.
    let mut total: BTreeMap<(usize, usize, usize), (u64, u64)> = BTreeMap::new();
    let mut digits = vec![0u8; n];
    loop {
        let (mut a, mut b, mut cc, mut ok) = (0, 0, 0, true);
        for (pos, &d) in digits.iter().enumerate() {
            match d {
                1 => a += 1,
                2 => b += 1,
                3 => cc += 1,
                _ => {}
            }
            let kind = if pos < r {
                0
            } else if pos < r + z0 {
                1
            } else {
                2
            };
            let flips_zero = d == 1 || d == 3;
            let flips_plus = d == 2 || d == 3;
            if (kind == 1 && flips_zero) || (kind == 2 && flips_plus) {
                ok = false;
            }
        }
        let e = total.entry((a, b, cc)).or_insert((0, 0));
        e.1 += 1;
        if ok {
            e.0 += 1;
        }
        let mut i = 0;
        loop {
            if i == n {
                return total
                    .into_iter()
                    .map(|(k, (g, t))| (k, g as f64 / t as f64))
                    .collect();
            }
            digits[i] += 1;
            if digits[i] < 4 {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

pub const GADGETS: [&str; 5] = ["hrz-sueki", "p1-a", "p1-b", "p2", "cz"];

/// Admissible octants per gadget; `cz` has a single dummy entry.
pub fn admissible(gadget: &str) -> Vec<u8> {
    match gadget {
        "p1-a" => vec![0, 2, 4, 6],
        "p1-b" => vec![1, 3, 5, 7],
        "cz" => vec![0],
        _ => (0..8).collect(),
    }
}

/// Smallest branch fidelity with `ideal` after undoing each branch's frame,
/// with the number of branches and their total probability.
pub fn worst_branch<F>(ideal: &Dense, mut run: F) -> (usize, f64, f64)
where
    F: FnMut(&mut dyn Chooser) -> adbqc::Result<(StateVector, PauliFrame)>,
{
    let leaves = enumerate_choices(BRANCH_BUDGET, |ch| run(ch)).unwrap();
    let mut worst: f64 = 1.0;
    let mut total = 0.0;
    for l in &leaves {
        total += l.probability;
        let (s, f) = &l.value;
        let mut d = Dense::from_lib(s);
        d.unframe(f);
        worst = worst.min(ideal.fidelity(&d));
    }
    (leaves.len(), worst, total)
}

/// Runs `gadget` at `octant` on `states` random inputs. Returns the number of
/// branches checked and the worst fidelity seen.
pub fn gadget_soundness<R: Rng>(
    gadget: &str,
    octant: u8,
    states: usize,
    rng: &mut R,
) -> (usize, f64) {
    let mut branches = 0;
    let mut worst: f64 = 1.0;
    for _ in 0..states {
        let (n, psi) = if gadget == "cz" {
            (3, Dense::random(3, rng))
        } else {
            (2, Dense::random(2, rng))
        };
        let lib = psi.to_lib();
        let t = rng.random_range(0..n);
        let mut ideal = psi.clone();
        let (b, w, total) = match gadget {
            "cz" => {
                let u = (t + 1 + rng.random_range(0..n - 1)) % n;
                ideal.cz(t, u);
                worst_branch(&ideal, |ch| {
                    gadget_cz(&lib, t, u, ch).map(|r| (r.state, r.frame_update))
                })
            }
            _ => {
                ideal.apply(&hrz(octant), t);
                let k = Octant::new(octant).unwrap();
                let gamma = Octant::new(rng.random_range(0..8)).unwrap();
                let neg = rng.random_bool(0.5);
                let r = rng.random_range(0..2u8);
                worst_branch(&ideal, |ch| match gadget {
                    "hrz-sueki" => gadget_hrz_sueki(
                        &lib,
                        t,
                        k.radians(),
                        &AncillaPrep::octant(gamma, neg),
                        r,
                        ch,
                    )
                    .map(|r| (r.state, r.frame_update)),
                    "p1-a" => p1_hrz_case_a(&lib, t, k, ch).map(|r| (r.state, r.frame_update)),
                    "p1-b" => p1_hrz_case_b(&lib, t, k, ch).map(|r| (r.state, r.frame_update)),
                    "p2" => p2_hrz(&lib, t, octant, ch).map(|r| (r.state, r.frame_update)),
                    other => panic!("unknown gadget {other}"),
                })
            }
        };
        assert!(
            (total - 1.0).abs() < 1e-9,
            "{gadget}: branch weights sum to {total}"
        );
        branches += b;
        worst = worst.min(w);
    }
    (branches, worst)
}
