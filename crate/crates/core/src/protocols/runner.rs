use std::collections::{BTreeMap, HashMap};

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::{AdversaryConfig, ProtocolConfig, ProtocolKind};
use super::layout::{decode_output, DecodedOutput, TrapLayout};
use super::p1::{p1_hrz_step, P1Options};
use super::p2::p2_hrz_step;
use super::schedule::{compile, Plan, Step};
use super::transcript::{Party, Payload, Transcript, WireBasis};
use super::world::World;
use crate::error::{Error, Result};
use crate::gadgets::{cz_step, frame_conjugate, sueki_hrz_step, AncillaPrep, PauliFrame};
use crate::qsim::{
    enumerate_choices, fidelity_up_to_phase, Chooser, Gate, MeasurementBasis, QubitId, RngChooser,
    BRANCH_BUDGET,
};
use crate::rng::stream;

/// Outcome summary of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub protocol: ProtocolKind,
    pub accepted: bool,
    pub trap_errors: usize,
    pub trap_total: usize,
    pub decoded_output: Vec<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript_digest: Option<String>,
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: VerificationReport,
    pub transcript: Option<Transcript>,
    pub frame: PauliFrame,
    pub raw: Vec<u8>,
    pub plan: Plan,
    /// Attacked positions with the `(x, z)` operator applied.
    pub attacked: Vec<(usize, bool, bool)>,
}

/// Per-run fixed data.
#[derive(Clone, Debug)]
pub struct RunContext {
    pub protocol: ProtocolKind,
    pub adversary: AdversaryConfig,
    pub layout: TrapLayout,
    pub attack: Vec<(usize, bool, bool)>,
}

/// Mutable state threaded through the steps of a run.
#[derive(Clone, Debug)]
pub struct RunState {
    pub world: World,
    pub regs: Vec<QubitId>,
    pub frame: PauliFrame,
    pub raw: Vec<u8>,
    probe: Option<QubitId>,
}

fn wire_to_basis(b: WireBasis) -> MeasurementBasis {
    match b {
        WireBasis::X => MeasurementBasis::PauliX,
        WireBasis::Y => MeasurementBasis::PauliY,
        WireBasis::Z => MeasurementBasis::PauliZ,
    }
}

/// Uniform distinct positions: the first `a` get X, the next `b` Z, the last `c` XZ.
pub fn draw_pauli_positions<R: Rng + ?Sized>(
    n: usize,
    a: usize,
    b: usize,
    c: usize,
    rng: &mut R,
) -> Result<Vec<(usize, bool, bool)>> {
    if a + b + c > n {
        return Err(Error::InvalidConfig(format!(
            "{} Pauli operators on {n} qubits",
            a + b + c
        )));
    }
    let picked = sample(rng, n, a + b + c).into_vec();
    Ok(picked
        .into_iter()
        .enumerate()
        .map(|(i, pos)| (pos, i < a || i >= a + b, i >= a))
        .collect())
}

impl RunContext {
    pub fn new<R: Rng + ?Sized>(config: &ProtocolConfig, plan: &Plan, adv: &mut R) -> Result<Self> {
        let attack = match config.adversary {
            AdversaryConfig::RandomPauli { a, b, c } => {
                draw_pauli_positions(plan.n(), a, b, c, adv)?
            }
            _ => Vec::new(),
        };
        Ok(Self {
            protocol: config.protocol,
            adversary: config.adversary.clone(),
            layout: plan.layout.clone(),
            attack,
        })
    }
}

impl RunState {
    /// `N` fresh `|0>` registers held by the server.
    pub fn new(config: &ProtocolConfig, record: bool) -> Result<Self> {
        let mut world = World::new(config.protocol.client(), record);
        let zero = [
            num_complex::Complex64::new(1.0, 0.0),
            num_complex::Complex64::new(0.0, 0.0),
        ];
        let regs = (0..config.num_register_qubits)
            .map(|_| world.prepare(Party::Bob, zero, "register"))
            .collect::<Result<Vec<_>>>()?;
        let probe = match config.adversary.probe_state()? {
            Some(psi) => Some(world.prepare_state(Party::Bob, psi, "probe")?[0]),
            None => None,
        };
        Ok(Self {
            world,
            frame: PauliFrame::identity(regs.len()),
            raw: vec![0; regs.len()],
            regs,
            probe,
        })
    }

    /// Pure joint state of the registers.
    pub fn register_state(&self) -> Result<crate::qsim::StateVector> {
        self.world.state_of(&self.regs)
    }
}

/// Executes one step. All measurement randomness flows through `chooser`.
pub fn exec_step(
    st: &mut RunState,
    step: &Step,
    ctx: &RunContext,
    chooser: &mut dyn Chooser,
) -> Result<()> {
    match *step {
        Step::Hrz {
            pos,
            theta,
            gamma,
            r,
        } => {
            let fs = frame_conjugate(&st.frame, &Gate::HRZ(0.0), &[pos])?;
            let theta_eff = theta.signed(fs.negate_angle);
            let reg = st.regs[pos];
            let x_delta = match ctx.protocol {
                ProtocolKind::Sueki => {
                    let prep = AncillaPrep::octant(gamma, false);
                    sueki_hrz_step(&mut st.world, reg, theta_eff.radians(), &prep, r, chooser)?
                        .x_delta
                }
                ProtocolKind::P1 => {
                    p1_hrz_step(&mut st.world, reg, theta_eff, P1Options::default(), chooser)?
                        .x_delta
                }
                ProtocolKind::P2 => {
                    let sub = st.probe.take();
                    p2_hrz_step(&mut st.world, reg, theta_eff, sub, chooser)?.x_delta
                }
            };
            st.frame = fs.frame;
            st.frame.toggle(pos, x_delta, false);
        }
        Step::Cz { a, b } => {
            let fs = frame_conjugate(&st.frame, &Gate::CZ, &[a, b])?;
            let (_, d) = cz_step(&mut st.world, st.regs[a], st.regs[b], chooser)?;
            st.frame = fs.frame;
            st.frame.toggle(a, d[0].0, d[0].1);
            st.frame.toggle(b, d[1].0, d[1].1);
        }
        Step::Attack => {
            for &(pos, x, z) in &ctx.attack {
                let reg = st.regs[pos];
                if z {
                    st.world.tamper(&Gate::Z, &[reg])?;
                }
                if x {
                    st.world.tamper(&Gate::X, &[reg])?;
                }
            }
        }
        Step::Output => {
            let survive = match ctx.adversary {
                AdversaryConfig::TrapTamper { delta } => Some(delta),
                _ => None,
            };
            for j in 0..st.regs.len() {
                let wire = ctx.layout.bases[j];
                let basis = wire_to_basis(wire);
                let reg = st.regs[j];
                st.raw[j] = match ctx.protocol {
                    ProtocolKind::P1 => {
                        st.world.send_qubit(Party::Bob, reg, "output")?;
                        st.world.measure(Party::Alice, reg, basis, chooser)?
                    }
                    _ => {
                        st.world
                            .send(Party::Alice, || Payload::Basis { basis: wire });
                        let mut bit = st.world.measure(Party::Bob, reg, basis, chooser)?;
                        if let Some(delta) = survive {
                            bit ^= chooser.choose(&[delta, 1.0 - delta])? as u8;
                        }
                        st.world.send(Party::Bob, || Payload::Bit { bit });
                        bit
                    }
                };
            }
        }
    }
    Ok(())
}

fn report(
    protocol: ProtocolKind,
    decoded: &DecodedOutput,
    threshold: usize,
    transcript: Option<&Transcript>,
) -> VerificationReport {
    let trap_errors = decoded.trap_errors();
    VerificationReport {
        protocol,
        accepted: trap_errors <= threshold,
        trap_errors,
        trap_total: decoded.trap_results.len(),
        decoded_output: decoded.computation.clone(),
        transcript_digest: transcript.map(Transcript::digest),
    }
}

/// One sampled run; trial `t` uses streams `client/t`, `nature/t` and `adversary/t`.
pub fn run_protocol(config: &ProtocolConfig, trial: u64, record: bool) -> Result<RunOutcome> {
    let plan = compile(config, &mut stream(config.seed, "client", trial))?;
    let ctx = RunContext::new(config, &plan, &mut stream(config.seed, "adversary", trial))?;
    let mut nature = RngChooser::new(stream(config.seed, "nature", trial));
    let mut st = RunState::new(config, record)?;
    for step in &plan.steps {
        exec_step(&mut st, step, &ctx, &mut nature)?;
    }
    let decoded = decode_output(&st.raw, &st.frame, &plan.layout)?;
    let transcript = st.world.take_transcript();
    Ok(RunOutcome {
        report: report(
            config.protocol,
            &decoded,
            config.accept_threshold,
            transcript.as_ref(),
        ),
        transcript,
        frame: st.frame,
        raw: st.raw,
        plan,
        attacked: ctx.attack,
    })
}

fn expect_kind(config: &ProtocolConfig, kind: ProtocolKind) -> Result<()> {
    if config.protocol != kind {
        return Err(Error::InvalidConfig(format!(
            "expected a {kind} config, got {}",
            config.protocol
        )));
    }
    Ok(())
}

pub fn run_sueki(config: &ProtocolConfig, trial: u64) -> Result<RunOutcome> {
    expect_kind(config, ProtocolKind::Sueki)?;
    run_protocol(config, trial, true)
}

pub fn run_protocol1(config: &ProtocolConfig, trial: u64) -> Result<RunOutcome> {
    expect_kind(config, ProtocolKind::P1)?;
    run_protocol(config, trial, true)
}

pub fn run_protocol2(config: &ProtocolConfig, trial: u64) -> Result<RunOutcome> {
    expect_kind(config, ProtocolKind::P2)?;
    run_protocol(config, trial, true)
}

/// Exact output statistics of one compiled run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExactDistribution {
    /// Decoded computation bits to probability.
    pub outputs: BTreeMap<Vec<u8>, f64>,
    pub acceptance: f64,
    /// Branches alive at the widest point.
    pub peak_branches: usize,
}

const MERGE_FIDELITY: f64 = 1.0 - 1e-12;

/// Enumerates every measurement outcome of trial `trial`, merging branches
/// with equal frame and register state after each step. Client pads and the
/// layout are fixed by the trial's client stream.
pub fn exact_distribution(config: &ProtocolConfig, trial: u64) -> Result<ExactDistribution> {
    let plan = compile(config, &mut stream(config.seed, "client", trial))?;
    let ctx = RunContext::new(config, &plan, &mut stream(config.seed, "adversary", trial))?;
    let mut branches = vec![(RunState::new(config, false)?, 1.0)];
    let mut peak = 1;
    for step in &plan.steps {
        let mut next: Vec<(RunState, f64)> = Vec::new();
        let mut index: HashMap<(PauliFrame, Vec<u8>), Vec<usize>> = HashMap::new();
        let merge = *step != Step::Output;
        for (st, p) in &branches {
            let leaves = enumerate_choices(BRANCH_BUDGET, |ch| {
                let mut s = st.clone();
                exec_step(&mut s, step, &ctx, ch)?;
                Ok(s)
            })?;
            for leaf in leaves {
                let q = p * leaf.probability;
                if q <= 0.0 {
                    continue;
                }
                let s = leaf.value;
                if !merge {
                    next.push((s, q));
                    continue;
                }
                let key = (s.frame.clone(), s.raw.clone());
                let state = s.register_state()?;
                let slot = index.entry(key).or_default();
                let mut merged = false;
                for &i in slot.iter() {
                    let other = next[i].0.register_state()?;
                    if fidelity_up_to_phase(&state, &other)? >= MERGE_FIDELITY {
                        next[i].1 += q;
                        merged = true;
                        break;
                    }
                }
                if !merged {
                    slot.push(next.len());
                    next.push((s, q));
                }
            }
        }
        peak = peak.max(next.len());
        if next.len() > BRANCH_BUDGET {
            return Err(Error::BranchBudgetExceeded(BRANCH_BUDGET));
        }
        branches = next;
    }
    let mut out = ExactDistribution {
        peak_branches: peak,
        ..Default::default()
    };
    for (st, p) in branches {
        let d = decode_output(&st.raw, &st.frame, &plan.layout)?;
        *out.outputs.entry(d.computation.clone()).or_insert(0.0) += p;
        if d.trap_errors() <= config.accept_threshold {
            out.acceptance += p;
        }
    }
    Ok(out)
}
