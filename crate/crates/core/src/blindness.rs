//! Blindness audits: disclosed-angle uniformity, no-signaling of the server's
//! reduced state, transcript indistinguishability and probe resistance.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::{probe_gram_closed_form, probe_gram_matrix, probe_weight};
use crate::error::{Error, Result};
use crate::gadgets::{theta_public, Octant};
use crate::protocols::{
    exec_step, p1_hrz_step, ClientCapability, P1Options, Party, Payload, ProtocolConfig,
    ProtocolKind, RunContext, RunState, Step, Transcript, TrapLayout, WireBasis, World, P1_STEPS,
};
use crate::qsim::{
    enumerate_choices, hermitian_eigenvalues, DensityMatrix, RngChooser, StateVector, BRANCH_BUDGET,
};
use crate::rng::stream;

/// Trace-distance threshold for exact audits.
pub const EXACT_THRESHOLD: f64 = 1e-10;

/// Outcome of one audit. `passed` is `value <= threshold`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditResult {
    pub audit: String,
    pub protocol: String,
    pub secrets: Vec<String>,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    pub trials: usize,
}

impl AuditResult {
    fn new(
        audit: &str,
        protocol: &str,
        secrets: Vec<String>,
        value: f64,
        threshold: f64,
        trials: usize,
    ) -> Self {
        Self {
            audit: audit.into(),
            protocol: protocol.into(),
            secrets,
            value,
            threshold,
            passed: value <= threshold,
            trials,
        }
    }
}

/// What the server observes: classical traffic it sends or receives and,
/// optionally, the reduced state of the qubits it holds.
#[derive(Clone, Debug, PartialEq)]
pub struct BobView {
    pub classical_events: Vec<Payload>,
    pub quantum_marginal: Option<DensityMatrix>,
}

impl BobView {
    pub fn from_transcript(t: &Transcript) -> Self {
        Self {
            classical_events: t.bob_classical().into_iter().cloned().collect(),
            quantum_marginal: None,
        }
    }

    /// Captures the classical view plus Bob's current reduced state.
    pub fn capture(world: &World) -> Result<Self> {
        let mut v = world
            .transcript()
            .map(Self::from_transcript)
            .unwrap_or(Self {
                classical_events: Vec::new(),
                quantum_marginal: None,
            });
        v.quantum_marginal = Some(world.bob_marginal()?);
        Ok(v)
    }

    /// Canonical string used to bin classical views.
    pub fn key(&self) -> String {
        serde_json::to_string(&self.classical_events).expect("payloads serialize")
    }
}

fn octant_list(s: &[Octant]) -> String {
    s.iter()
        .map(|o| o.k().to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Checks that the 16 pad pairs `(gamma, r)` hit every disclosed octant twice.
pub fn audit_theta_uniformity(theta: Octant, s1: u8) -> AuditResult {
    let gammas: Vec<Octant> = Octant::all().collect();
    audit_theta_uniformity_restricted(theta, s1, &gammas)
}

/// Same as [`audit_theta_uniformity`] with `gamma` drawn from `gammas` only.
///
/// The value is the largest deviation of any octant's multiplicity from 2.
pub fn audit_theta_uniformity_restricted(theta: Octant, s1: u8, gammas: &[Octant]) -> AuditResult {
    let mut counts = [0i64; 8];
    for &g in gammas {
        for r in 0..2 {
            counts[theta_public(theta, g, false, r, s1).k() as usize] += 1;
        }
    }
    let dev = counts.iter().map(|c| (c - 2).abs()).max().unwrap_or(0);
    AuditResult::new(
        "theta",
        "sueki",
        vec![format!("theta={} s1={s1}", theta.k())],
        dev as f64,
        0.0,
        1,
    )
}

/// Sub-normalised Bob states per classical view, after `checkpoint` steps.
fn bob_states(
    input: &StateVector,
    theta: Octant,
    checkpoint: u8,
    leak_basis: bool,
) -> Result<BTreeMap<String, DMatrix<C64>>> {
    let opts = P1Options {
        stop_after: Some(checkpoint),
        leak_basis,
    };
    let leaves = enumerate_choices(BRANCH_BUDGET, |ch| {
        let (mut world, ids) =
            World::with_register(ClientCapability::MeasureOnly, true, input.clone())?;
        p1_hrz_step(&mut world, ids[0], theta, opts, ch)?;
        BobView::capture(&world)
    })?;
    let mut out: BTreeMap<String, DMatrix<C64>> = BTreeMap::new();
    for leaf in leaves {
        let rho = leaf.value.quantum_marginal.as_ref().expect("captured");
        let weighted = rho.entries() * C64::new(leaf.probability, 0.0);
        match out.get_mut(&leaf.value.key()) {
            Some(m) if m.shape() != weighted.shape() => {
                return Err(Error::ScheduleMismatch(
                    "server register count differs".into(),
                ))
            }
            Some(m) => *m += weighted,
            None => {
                out.insert(leaf.value.key(), weighted);
            }
        }
    }
    Ok(out)
}

fn half_trace_norm(m: &DMatrix<C64>) -> f64 {
    hermitian_eigenvalues(m)
        .iter()
        .map(|l| l.abs())
        .sum::<f64>()
        / 2.0
}

/// Trace distance between the server's classical-quantum views after
/// `checkpoint` steps of the measure-only gadget under two client angles.
///
/// The register starts in `input`. `leak_basis` is a negative control in
/// which the client announces its X/Y choice.
pub fn audit_no_signaling(
    input: &StateVector,
    secrets: [Octant; 2],
    checkpoint: u8,
    leak_basis: bool,
) -> Result<AuditResult> {
    if checkpoint > P1_STEPS {
        return Err(Error::CheckpointOutOfRange(checkpoint));
    }
    if input.num_qubits() != 1 {
        return Err(Error::DimensionMismatch(input.num_qubits(), 1));
    }
    let a = bob_states(input, secrets[0], checkpoint, leak_basis)?;
    let b = bob_states(input, secrets[1], checkpoint, leak_basis)?;
    let mut value = 0.0;
    for (key, sa) in &a {
        value += match b.get(key) {
            Some(sb) if sb.shape() == sa.shape() => half_trace_norm(&(sa - sb)),
            Some(_) => {
                return Err(Error::ScheduleMismatch(
                    "server register count differs".into(),
                ))
            }
            None => sa.trace().re / 2.0,
        };
    }
    for (key, sb) in &b {
        if !a.contains_key(key) {
            value += sb.trace().re / 2.0;
        }
    }
    Ok(AuditResult::new(
        "nosig",
        "p1",
        secrets
            .iter()
            .map(|s| format!("theta={} checkpoint={checkpoint}", s.k()))
            .collect(),
        value,
        EXACT_THRESHOLD,
        1,
    ))
}

/// Bob's classical view of one blinded run of `secret` on a single `|0>` register.
fn sample_view(
    protocol: ProtocolKind,
    secret: &[Octant],
    seed: u64,
    trial: u64,
    leak: bool,
) -> Result<String> {
    let config = ProtocolConfig::new(protocol, 1, 1, seed);
    let ctx = RunContext {
        protocol,
        adversary: config.adversary.clone(),
        layout: TrapLayout {
            permutation: vec![0],
            traps: vec![None],
            bases: vec![WireBasis::Z],
        },
        attack: Vec::new(),
    };
    let mut pads = stream(seed, "client", trial);
    let mut nature = RngChooser::new(stream(seed, "nature", trial));
    let mut st = RunState::new(&config, true)?;
    if leak {
        st.world.send(Party::Alice, || Payload::Secret {
            value: octant_list(secret),
        });
    }
    for &theta in secret {
        let step = Step::Hrz {
            pos: 0,
            theta,
            gamma: Octant::wrap(pads.random_range(0..8)),
            r: pads.random_range(0..2u8),
        };
        exec_step(&mut st, &step, &ctx, &mut nature)?;
    }
    let t = st.world.take_transcript().unwrap_or_default();
    Ok(BobView::from_transcript(&t).key())
}

/// Bob-view keys of `trials` runs, mapped to dense bin ids through `bins`.
fn sample_bins(
    protocol: ProtocolKind,
    secret: &[Octant],
    trials: usize,
    seed: u64,
    leak: bool,
    bins: &mut BTreeMap<String, usize>,
) -> Result<Vec<usize>> {
    let keys: Vec<String> = (0..trials as u64)
        .into_par_iter()
        .map(|t| sample_view(protocol, secret, seed, t, leak))
        .collect::<Result<_>>()?;
    Ok(keys
        .into_iter()
        .map(|k| {
            let next = bins.len();
            *bins.entry(k).or_insert(next)
        })
        .collect())
}

fn tv_of(a: &[usize], b: &[usize], bins: usize) -> f64 {
    let mut diff = vec![0i64; bins];
    for &x in a {
        diff[x] += 1;
    }
    for &x in b {
        diff[x] -= 1;
    }
    diff.iter().map(|d| d.unsigned_abs()).sum::<u64>() as f64 / (2.0 * a.len() as f64)
}

/// Random re-splits of the pooled samples used to estimate the null law.
pub const TV_NULL_SPLITS: u64 = 200;

/// Empirical total variation between Bob's classical views when the client
/// runs the gate sequence `secret_a` or `secret_b` on one `|0>` register.
///
/// The threshold is the mean plus five standard deviations of the same
/// statistic over random equal splits of the pooled samples, which stays
/// calibrated when most bins are sparse. `leak` is a negative control that
/// sends the secret in clear.
pub fn audit_transcript_tv(
    protocol: ProtocolKind,
    secret_a: &[Octant],
    secret_b: &[Octant],
    trials: usize,
    seed: u64,
    leak: bool,
) -> Result<AuditResult> {
    if secret_a.len() != secret_b.len() {
        return Err(Error::ScheduleMismatch(format!(
            "{} vs {} gadget invocations",
            secret_a.len(),
            secret_b.len()
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let mut bins = BTreeMap::new();
    let a = sample_bins(protocol, secret_a, trials, seed, leak, &mut bins)?;
    let b = sample_bins(
        protocol,
        secret_b,
        trials,
        seed ^ 0x9e37_79b9_7f4a_7c15,
        leak,
        &mut bins,
    )?;
    let tv = tv_of(&a, &b, bins.len());
    let mut pooled = [a, b].concat();
    let null: Vec<f64> = (0..TV_NULL_SPLITS)
        .map(|i| {
            pooled.shuffle(&mut stream(seed, "tv-null", i));
            let (x, y) = pooled.split_at(trials);
            tv_of(x, y, bins.len())
        })
        .collect();
    let m = null.len() as f64;
    let mean = null.iter().sum::<f64>() / m;
    let var = null.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    Ok(AuditResult::new(
        "tv",
        &protocol.to_string(),
        vec![octant_list(secret_a), octant_list(secret_b)],
        tv,
        mean + 5.0 * var.sqrt(),
        trials,
    ))
}

/// Largest deviation of any probe Gram entry from its closed form.
///
/// Also fails (value set to infinity) if some probe makes all eight rotated
/// states pairwise orthogonal, which the closed form rules out.
pub fn audit_probe_resistance(psis: &[StateVector]) -> Result<AuditResult> {
    let mut residual: f64 = 0.0;
    for psi in psis {
        let g = probe_gram_matrix(psi)?;
        let w = probe_weight(psi);
        let mut max_off: f64 = 0.0;
        for k in 0..8 {
            for kp in 0..8 {
                residual = residual.max((g[(k, kp)] - probe_gram_closed_form(w, k, kp)).norm());
                if k != kp {
                    max_off = max_off.max(g[(k, kp)].norm());
                }
            }
        }
        if max_off < 1e-9 {
            residual = f64::INFINITY;
        }
    }
    Ok(AuditResult::new(
        "probe",
        "p2",
        vec![format!("{} probes", psis.len())],
        residual,
        EXACT_THRESHOLD,
        psis.len(),
    ))
}

/// `count` Haar-like random three-qubit probes from the named stream.
pub fn random_probes(count: usize, seed: u64) -> Result<Vec<StateVector>> {
    let mut rng = stream(seed, "probe", 0);
    (0..count)
        .map(|_| StateVector::random(3, &mut rng))
        .collect()
}
