//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on failure.

mod common;

use std::f64::consts::FRAC_PI_4;
use std::time::Instant;

use adbqc::adversary::{
    escape_bound, escape_probability_exact, probe_gram_matrix, simulate_detection,
};
use adbqc::blindness::{
    audit_no_signaling, audit_probe_resistance, audit_theta_uniformity, random_probes,
};
use adbqc::gadgets::{theta_public_radians, AncillaPrep, Octant};
use adbqc::manifest::RunManifest;
use adbqc::protocols::{
    exact_distribution, run_protocol, AdversaryConfig, GateKind, GateRequest, ProtocolConfig,
    ProtocolKind,
};
use adbqc::qsim::StateVector;
use adbqc::rng::stream;
use common::{
    admissible, brute_force_escape, gadget_soundness, reference_distribution, total_variation,
    Dense, GADGETS,
};
use num_complex::Complex64 as C;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gadget_soundness_all() -> Outcome {
    let start = Instant::now();
    let mut rng = stream(1, "acceptance-gadgets", 0);
    let (mut pairs, mut branches, mut worst) = (0, 0, 1.0f64);
    for g in GADGETS {
        for k in admissible(g) {
            let (b, w) = gadget_soundness(g, k, 100, &mut rng);
            pairs += 1;
            branches += b;
            worst = worst.min(w);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst >= 1.0 - 1e-9 && secs < 30.0,
        format!("{pairs} gadget/octant pairs x 100 states, {branches} branches, worst fidelity {worst:.12}, {secs:.1}s"),
    )
}

fn universality() -> Outcome {
    use GateKind::*;
    let g = GateRequest::named;
    let single: Vec<Vec<GateRequest>> = vec![
        vec![g(H, &[0])],
        vec![g(X, &[0])],
        vec![g(H, &[0]), g(T, &[0]), g(H, &[0])],
        vec![g(H, &[0]), g(T, &[0]), g(X, &[0]), g(H, &[0])],
    ];
    let two: Vec<Vec<GateRequest>> = vec![
        vec![g(H, &[0]), g(Cnot, &[0, 1])],
        vec![g(X, &[0]), g(Cnot, &[0, 1])],
        vec![g(H, &[0]), g(T, &[0]), g(Cnot, &[0, 1]), g(H, &[0])],
    ];
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    for (kind, n, traps) in [
        (ProtocolKind::Sueki, 2, 0),
        (ProtocolKind::Sueki, 3, 0),
        (ProtocolKind::P1, 3, 2),
        (ProtocolKind::P2, 3, 1),
    ] {
        let n_comp = n - traps;
        let algos = single
            .iter()
            .chain(if n_comp >= 2 { two.iter() } else { [].iter() });
        for algo in algos {
            let mut c = ProtocolConfig::new(kind, n, 4, 2024);
            c.trap_count = traps;
            c.algorithm = algo.clone();
            let want = reference_distribution(n_comp, algo);
            for trial in 0..4 {
                let got = exact_distribution(&c, trial).map_err(|e| e.to_string())?;
                worst = worst.max(total_variation(&got.outputs, &want));
                cases += 1;
            }
        }
    }
    check(
        worst <= 1e-9,
        format!("{cases} exhaustive runs over Sueki/P1/P2, N <= 3, depth 4, max TV {worst:.2e}"),
    )
}

fn verifiability() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut violations = Vec::new();
    for n in [3usize, 6, 9, 12] {
        let t = n / 3;
        for ((a, b, c), oracle) in brute_force_escape(t, t, t) {
            let exact =
                escape_probability_exact(n, (t, t, t), a, b, c).map_err(|e| e.to_string())?;
            checked += 1;
            if (exact - oracle).abs() > 1e-12 || exact > escape_bound(a + b + c) + 1e-12 {
                violations.push(format!("N={n} ({a},{b},{c})"));
            }
        }
    }
    let spot = escape_probability_exact(9, (3, 3, 3), 3, 0, 0).map_err(|e| e.to_string())?;
    let mut c = ProtocolConfig::new(ProtocolKind::P1, 9, 1, 31);
    c.adversary = AdversaryConfig::RandomPauli { a: 3, b: 0, c: 0 };
    let mc = simulate_detection(&c, 10_000).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let z = (mc.empirical - spot) / mc.sigma;
    check(
        violations.is_empty()
            && (spot - 120.0 / 504.0).abs() <= 1e-15
            && z.abs() <= 4.0
            && secs < 60.0,
        format!(
            "{checked} (N, a, b, c) cases match brute force and bound{}; N=9 (3,0,0) exact {spot:.6} = 120/504, Monte Carlo {:.4} ({z:+.2} sigma), {secs:.1}s",
            if violations.is_empty() { String::new() } else { format!(", violations {violations:?}") },
            mc.empirical
        ),
    )
}

fn p2_tamper() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (delta, h) in [(0.5, 4usize), (0.3, 3), (0.9, 8)] {
        let mut c = ProtocolConfig::new(ProtocolKind::P2, h + 1, 1, 77);
        c.trap_count = h;
        c.adversary = AdversaryConfig::TrapTamper { delta };
        let r = simulate_detection(&c, 10_000).map_err(|e| e.to_string())?;
        let expect = delta.powi(h as i32);
        let z = (r.empirical - expect) / r.sigma;
        ok &= z.abs() <= 4.0 && (r.exact.unwrap_or(f64::NAN) - expect).abs() < 1e-12;
        parts.push(format!(
            "d={delta} h={h}: {:.4} vs {expect:.4} ({z:+.2} sigma)",
            r.empirical
        ));
    }
    check(ok, parts.join("; "))
}

fn theta_uniformity() -> Outcome {
    let mut passed = 0;
    for theta in 0..8u8 {
        for s1 in 0..2u8 {
            let mut counts = [0usize; 8];
            for g in 0..8 {
                for r in 0..2 {
                    let prep = AncillaPrep::octant(Octant::new(g).unwrap(), false);
                    let t = theta_public_radians(theta as f64 * FRAC_PI_4, &prep, r, s1);
                    let k = (t / FRAC_PI_4).round() as usize % 8;
                    counts[k] += 1;
                }
            }
            let audit = audit_theta_uniformity(Octant::new(theta).unwrap(), s1).passed;
            passed += counts.iter().filter(|&&c| c == 2 && audit).count();
        }
    }
    check(passed == 128, format!("{passed}/128 octant checks"))
}

fn no_signaling() -> Outcome {
    let mut rng = stream(6, "acceptance-nosig", 0);
    let inputs = [
        Dense::random(1, &mut rng).to_lib(),
        StateVector::from_amplitudes(vec![C::new(0.6, 0.0), C::new(0.0, 0.8)]).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    let mut audits = 0;
    for psi in &inputs {
        for cp in 0..=9 {
            for a in 0..8u8 {
                for b in a..8u8 {
                    let o = |k| Octant::new(k).unwrap();
                    let r = audit_no_signaling(psi, [o(a), o(b)], cp, false)
                        .map_err(|e| e.to_string())?;
                    worst = worst.max(r.value);
                    audits += 1;
                }
            }
        }
    }
    let control = audit_no_signaling(
        &inputs[0],
        [Octant::new(0).unwrap(), Octant::new(2).unwrap()],
        4,
        true,
    )
    .map_err(|e| e.to_string())?;
    check(
        worst <= 1e-10 && !control.passed,
        format!(
            "{audits} audits over checkpoints 0..=9, max trace distance {worst:.2e}; leaked-basis control {:.3}",
            control.value
        ),
    )
}

fn probe_resistance() -> Outcome {
    let probes = random_probes(100, 12).map_err(|e| e.to_string())?;
    let audit = audit_probe_resistance(&probes).map_err(|e| e.to_string())?;
    let mut oracle_residual: f64 = 0.0;
    for psi in &probes {
        let g = probe_gram_matrix(psi).map_err(|e| e.to_string())?;
        let amps = psi.amplitudes();
        for k in 0..8 {
            for kp in 0..8 {
                let direct: C = (0..8)
                    .map(|i| {
                        let phase = if i & 1 == 1 {
                            C::from_polar(1.0, (kp as f64 - k as f64) * FRAC_PI_4)
                        } else {
                            C::new(1.0, 0.0)
                        };
                        amps[i].norm_sqr() * phase
                    })
                    .sum();
                oracle_residual = oracle_residual.max((g[(k, kp)] - direct).norm());
            }
        }
    }
    check(
        audit.passed && oracle_residual <= 1e-10,
        format!(
            "100 probes, closed-form residual {:.2e}, inner-product residual {oracle_residual:.2e}",
            audit.value
        ),
    )
}

fn honest_acceptance() -> Outcome {
    use GateKind::*;
    let g = GateRequest::named;
    let mut parts = Vec::new();
    let mut ok = true;
    for (kind, n, traps) in [
        (ProtocolKind::Sueki, 3, 0),
        (ProtocolKind::P1, 9, 6),
        (ProtocolKind::P2, 5, 2),
    ] {
        let mut c = ProtocolConfig::new(kind, n, 3, 5);
        c.trap_count = traps;
        c.algorithm = vec![g(H, &[0]), g(Cnot, &[0, 1]), g(T, &[1])];
        let mut accepted = 0;
        for t in 0..1000 {
            let r = run_protocol(&c, t, false).map_err(|e| e.to_string())?;
            if r.report.accepted && r.report.trap_errors == 0 {
                accepted += 1;
            }
        }
        ok &= accepted == 1000;
        parts.push(format!("{kind} {accepted}/1000"));
    }
    check(ok, parts.join(", "))
}

fn determinism() -> Outcome {
    let mut ok = true;
    let mut runs = 0;
    for (kind, n, traps, adversary) in [
        (ProtocolKind::Sueki, 2, 0, AdversaryConfig::None),
        (
            ProtocolKind::P1,
            6,
            4,
            AdversaryConfig::RandomPauli { a: 1, b: 1, c: 0 },
        ),
        (
            ProtocolKind::P2,
            4,
            2,
            AdversaryConfig::TrapTamper { delta: 0.5 },
        ),
    ] {
        let mut c = ProtocolConfig::new(kind, n, 2, 4242);
        c.trap_count = traps;
        c.adversary = adversary;
        c.algorithm = vec![GateRequest::named(GateKind::H, &[0])];
        let m = RunManifest::new(c, "1970-01-01T00:00:00Z");
        let reparsed = RunManifest::from_json(&m.to_json()).map_err(|e| e.to_string())?;
        let bytes = |m: &RunManifest| -> Result<(String, String), String> {
            let out = m.rerun().map_err(|e| e.to_string())?;
            let t = out.transcript.ok_or("no transcript")?.to_json_lines();
            let r = serde_json::to_string(&out.report).map_err(|e| e.to_string())?;
            Ok((t, r))
        };
        let first = bytes(&m)?;
        ok &= first == bytes(&reparsed)? && first == bytes(&m)?;
        runs += 3;
    }
    check(
        ok,
        format!("{runs} manifest re-runs, transcript and report bytes identical"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("gadget soundness", gadget_soundness_all),
        ("universality", universality),
        ("verifiability bound", verifiability),
        ("P2 tamper escape", p2_tamper),
        ("theta uniformity", theta_uniformity),
        ("no-signaling", no_signaling),
        ("probe resistance", probe_resistance),
        ("honest acceptance", honest_acceptance),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} [{}] {name}: {detail}", i + 1);
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
