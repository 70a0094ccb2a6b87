use adbqc::adversary::simulate_detection;
use adbqc::blindness::{
    audit_no_signaling, audit_probe_resistance, audit_theta_uniformity_restricted,
    audit_transcript_tv, random_probes, AuditResult,
};
use adbqc::gadgets::{gadget_cz, gadget_hrz_sueki, AncillaPrep, Octant, PauliFrame};
use adbqc::manifest::RunManifest;
use adbqc::protocols::{
    p1_hrz_case_a, p1_hrz_case_b, p2_hrz, GateRequest, ProtocolConfig, ProtocolKind,
};
use adbqc::qsim::{
    apply_gate, apply_gate_mut, enumerate_choices, fidelity_up_to_phase, Gate, StateVector,
    BRANCH_BUDGET,
};
use adbqc::rng::stream;
use adbqc::Error;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{read, write, CliError, CliResult};
use crate::{AttackArgs, BlindnessArgs, OracleArgs, ProtocolArgs, RunArgs};

const FIDELITY_TOL: f64 = 1e-9;

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Core(Error::InvalidConfig(e.to_string()))
}

fn octants(list: &str) -> CliResult<Vec<Octant>> {
    list.split(',')
        .map(|p| {
            let k: u8 = p
                .trim()
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("bad octant {p:?}")))?;
            Ok(Octant::new(k)?)
        })
        .collect()
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("reports serialize")
    );
}

/// Builds the effective config: file values first, then flag overrides.
pub fn build_config(args: &ProtocolArgs) -> CliResult<ProtocolConfig> {
    let base: Option<ProtocolConfig> = match &args.config {
        Some(p) => Some(serde_json::from_str(&read(p)?).map_err(invalid)?),
        None => None,
    };
    let protocol: ProtocolKind = match (&args.protocol, &base) {
        (Some(p), _) => p.parse()?,
        (None, Some(b)) => b.protocol,
        (None, None) => return Err(CliError::Usage("--protocol or --config is required".into())),
    };
    if protocol == ProtocolKind::Sueki && args.traps.is_some() {
        return Err(CliError::Usage(
            "--traps does not apply to the sueki protocol".into(),
        ));
    }
    let n = args
        .qubits
        .or(base.as_ref().map(|b| b.num_register_qubits))
        .ok_or_else(|| CliError::Usage("--qubits or --config is required".into()))?;
    let depth = args.depth.or(base.as_ref().map(|b| b.depth)).unwrap_or(1);
    let seed = args.seed.or(base.as_ref().map(|b| b.seed)).unwrap_or(0);
    let mut c = ProtocolConfig::new(protocol, n, depth, seed);
    if let Some(b) = base {
        if b.protocol == protocol && b.num_register_qubits == n && b.trap_count > 0 {
            c.trap_count = b.trap_count;
        }
        c.algorithm = b.algorithm;
        c.adversary = b.adversary;
        c.accept_threshold = b.accept_threshold;
    }
    if let Some(t) = args.traps {
        c.trap_count = t;
    }
    if let Some(a) = &args.adversary {
        c.adversary = a.parse()?;
    }
    if !args.gates.is_empty() {
        c.algorithm = args
            .gates
            .iter()
            .map(|g| g.parse::<GateRequest>())
            .collect::<Result<_, _>>()?;
    }
    c.validate()?;
    Ok(c)
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub fn run(args: RunArgs) -> CliResult<bool> {
    let manifest = match &args.manifest {
        Some(path) => {
            let p = &args.protocol;
            if p.protocol.is_some()
                || p.qubits.is_some()
                || p.depth.is_some()
                || p.traps.is_some()
                || p.seed.is_some()
                || p.config.is_some()
                || p.adversary.is_some()
                || !p.gates.is_empty()
            {
                return Err(CliError::Usage(
                    "--manifest cannot be combined with config flags".into(),
                ));
            }
            RunManifest::from_json(&read(path)?)?
        }
        None => RunManifest::new(build_config(&args.protocol)?, timestamp()),
    };
    let outcome = manifest.rerun()?;
    if let Some(path) = &args.manifest_out {
        write(path, &manifest.to_json())?;
    }
    if let (Some(path), Some(t)) = (&args.transcript_out, &outcome.transcript) {
        write(path, &t.to_json_lines())?;
    }
    print_json(&outcome.report);
    Ok(outcome.report.accepted)
}

type Branch = (Vec<u8>, StateVector, PauliFrame);

fn unframe(state: &StateVector, frame: &PauliFrame) -> adbqc::Result<StateVector> {
    let mut s = state.clone();
    for q in 0..frame.len() {
        let (x, z) = frame.get(q);
        if x {
            apply_gate_mut(&mut s, &Gate::X, &[q])?;
        }
        if z {
            apply_gate_mut(&mut s, &Gate::Z, &[q])?;
        }
    }
    Ok(s)
}

/// Prints one row per branch; true when every branch reaches the target.
pub fn oracle(args: OracleArgs) -> CliResult<bool> {
    let k = Octant::new(args.theta_octant)?;
    let cz = match args.gadget.as_str() {
        "cz" => true,
        "hrz-sueki" | "p1-a" | "p1-b" | "p2" => false,
        other => return Err(Error::InvalidSpec(format!("unknown gadget {other:?}")).into()),
    };
    let mut rng = stream(args.seed, "oracle", 0);
    let mut all_ok = true;
    println!("# gadget {} octant {}", args.gadget, k.k());
    println!("state\tbranch\toutcomes\tprobability\tfidelity\tok");
    for idx in 0..args.states {
        let n = if cz { 3 } else { 2 };
        let psi = StateVector::random(n, &mut rng)?;
        let (gate, targets) = if cz {
            (Gate::CZ, vec![0, 1])
        } else {
            (Gate::HRZ(k.radians()), vec![0])
        };
        let ideal = apply_gate(&psi, &gate, &targets)?;
        let gamma = Octant::new(rng.random_range(0..8))?;
        let r = rng.random_range(0..2u8);
        let leaves = enumerate_choices(BRANCH_BUDGET, |ch| -> adbqc::Result<Branch> {
            Ok(match args.gadget.as_str() {
                "cz" => {
                    let o = gadget_cz(&psi, 0, 1, ch)?;
                    (vec![o.s_prime], o.state, o.frame_update)
                }
                "hrz-sueki" => {
                    let prep = AncillaPrep::octant(gamma, false);
                    let o = gadget_hrz_sueki(&psi, 0, k.radians(), &prep, r, ch)?;
                    (vec![o.outcomes.0, o.outcomes.1], o.state, o.frame_update)
                }
                "p1-a" => {
                    let o = p1_hrz_case_a(&psi, 0, k, ch)?;
                    (o.outcomes, o.state, o.frame_update)
                }
                "p1-b" => {
                    let o = p1_hrz_case_b(&psi, 0, k, ch)?;
                    (o.outcomes, o.state, o.frame_update)
                }
                _ => {
                    let o = p2_hrz(&psi, 0, k.k(), ch)?;
                    (vec![o.s], o.state, o.frame_update)
                }
            })
        })?;
        for (b, leaf) in leaves.iter().enumerate() {
            let (outcomes, state, frame) = &leaf.value;
            let f = fidelity_up_to_phase(&unframe(state, frame)?, &ideal)?;
            let ok = f >= 1.0 - FIDELITY_TOL;
            all_ok &= ok;
            let bits: String = outcomes.iter().map(|o| o.to_string()).collect();
            println!(
                "{idx}\t{b}\t{bits}\t{:.6}\t{f:.12}\t{}",
                leaf.probability,
                if ok { "pass" } else { "FAIL" }
            );
        }
    }
    Ok(all_ok)
}

pub fn attack(args: AttackArgs) -> CliResult<bool> {
    let mut protocol = args.protocol;
    if let Some(p) = &args.pauli {
        protocol.adversary = Some(format!("pauli:{p}"));
    }
    if let Some(d) = args.tamper {
        protocol.adversary = Some(format!("tamper:{d}"));
    }
    let config = build_config(&protocol)?;
    let analysis = simulate_detection(&config, args.trials)?;
    print_json(&analysis);
    Ok(analysis.bound_holds() && analysis.within(4.0))
}

fn emit(results: Vec<AuditResult>) -> bool {
    let ok = results.iter().all(|r| r.passed);
    if results.len() == 1 {
        print_json(&results[0]);
    } else {
        print_json(&results);
    }
    ok
}

pub fn blindness(args: BlindnessArgs) -> CliResult<bool> {
    let results = match args.audit.as_str() {
        "theta" => {
            let thetas = match args.theta_octant {
                Some(k) => vec![Octant::new(k)?],
                None => Octant::all().collect(),
            };
            let s1s = match args.s1 {
                Some(s) if s > 1 => return Err(CliError::Usage("--s1 must be 0 or 1".into())),
                Some(s) => vec![s],
                None => vec![0, 1],
            };
            let gammas = match &args.gammas {
                Some(g) => octants(g)?,
                None => Octant::all().collect(),
            };
            let mut out = Vec::new();
            for &t in &thetas {
                for &s in &s1s {
                    out.push(audit_theta_uniformity_restricted(t, s, &gammas));
                }
            }
            out
        }
        "nosig" => {
            let s = octants(&args.secrets)?;
            let [a, b] = s[..] else {
                return Err(CliError::Usage("--secrets needs two octants".into()));
            };
            let psi = StateVector::from_amplitudes(vec![
                Complex64::new(0.6, 0.0),
                Complex64::new(0.0, 0.8),
            ])?;
            let checkpoints = match args.checkpoint {
                Some(c) => vec![c],
                None => (0..=adbqc::protocols::P1_STEPS).collect(),
            };
            checkpoints
                .into_iter()
                .map(|c| audit_no_signaling(&psi, [a, b], c, args.leak))
                .collect::<Result<_, _>>()?
        }
        "tv" => {
            let kind: ProtocolKind = args.protocol.parse()?;
            vec![audit_transcript_tv(
                kind,
                &octants(&args.secret_a)?,
                &octants(&args.secret_b)?,
                args.trials,
                args.seed,
                args.leak,
            )?]
        }
        "probe" => vec![audit_probe_resistance(&random_probes(
            args.samples,
            args.seed,
        )?)?],
        other => return Err(Error::InvalidSpec(format!("unknown audit {other:?}")).into()),
    };
    Ok(emit(results))
}
