use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadgets::{decompose_unitary, Octant};
use crate::qsim::{mat_h, mat_identity2, mat_rz, mat_x, mat_z, mul2, Mat2, StateVector};

/// Which protocol to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    /// Single-client HR_Z protocol without traps.
    Sueki,
    /// Measure-only client with `2N/3` traps.
    P1,
    /// `RZ(pi/4)`-only client with `h` traps.
    P2,
}

impl ProtocolKind {
    pub fn client(self) -> super::ClientCapability {
        match self {
            ProtocolKind::Sueki => super::ClientCapability::PrepareOnly,
            ProtocolKind::P1 => super::ClientCapability::MeasureOnly,
            ProtocolKind::P2 => super::ClientCapability::GateOnly,
        }
    }
}

impl std::fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProtocolKind::Sueki => "sueki",
            ProtocolKind::P1 => "p1",
            ProtocolKind::P2 => "p2",
        })
    }
}

impl std::str::FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sueki" => Ok(ProtocolKind::Sueki),
            "p1" => Ok(ProtocolKind::P1),
            "p2" => Ok(ProtocolKind::P2),
            _ => Err(Error::InvalidSpec(format!("unknown protocol {s:?}"))),
        }
    }
}

/// Gate kinds accepted in an algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    /// Arbitrary single-qubit gate given as octants `[beta, gamma, delta]`
    /// of `RZ(beta) RX(gamma) RZ(delta)`.
    Single,
    I,
    H,
    X,
    Z,
    S,
    T,
    Cz,
    /// `targets = [control, target]`; expands to `H_t CZ H_t`.
    Cnot,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cz | GateKind::Cnot => 2,
            _ => 1,
        }
    }

    fn named_matrix(self) -> Option<Mat2> {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        Some(match self {
            GateKind::I => mat_identity2(),
            GateKind::H => mat_h(),
            GateKind::X => mat_x(),
            GateKind::Z => mat_z(),
            GateKind::S => mat_rz(FRAC_PI_2),
            GateKind::T => mat_rz(FRAC_PI_4),
            _ => return None,
        })
    }
}

/// One requested gate on computation qubits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GateRequest {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub octants: Vec<Octant>,
}

/// A request lowered to the two primitive forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Primitive {
    /// `[beta, gamma, delta]`
    Single {
        target: usize,
        octants: [Octant; 3],
    },
    Cz {
        a: usize,
        b: usize,
    },
}

/// Octants `[beta, gamma, delta]` of a single-qubit unitary whose Euler angles
/// are all multiples of `pi/4`.
pub fn single_octants(u: &Mat2) -> Result<[Octant; 3]> {
    decompose_unitary(u)?.octants(1e-9)
}

impl GateRequest {
    pub fn single(target: usize, octants: [u8; 3]) -> Result<Self> {
        Ok(Self {
            kind: GateKind::Single,
            targets: vec![target],
            octants: octants
                .iter()
                .map(|&k| Octant::new(k))
                .collect::<Result<_>>()?,
        })
    }

    pub fn named(kind: GateKind, targets: &[usize]) -> Self {
        Self {
            kind,
            targets: targets.to_vec(),
            octants: Vec::new(),
        }
    }

    /// The 2x2 matrix of a single-qubit request.
    pub fn matrix(&self) -> Result<Mat2> {
        if let Some(m) = self.kind.named_matrix() {
            return Ok(m);
        }
        match (self.kind, self.octants.as_slice()) {
            (GateKind::Single, [b, g, d]) => Ok(mul2(
                &mul2(&mat_rz(b.radians()), &crate::qsim::mat_rx(g.radians())),
                &mat_rz(d.radians()),
            )),
            _ => Err(Error::InvalidConfig(format!(
                "{:?} is not single-qubit",
                self.kind
            ))),
        }
    }

    pub fn validate(&self, n_comp: usize) -> Result<()> {
        if self.targets.len() != self.kind.arity() {
            return Err(Error::InvalidConfig(format!(
                "{:?} needs {} targets, got {}",
                self.kind,
                self.kind.arity(),
                self.targets.len()
            )));
        }
        if let Some(&t) = self.targets.iter().find(|&&t| t >= n_comp) {
            return Err(Error::InvalidConfig(format!(
                "target {t} outside the {n_comp} computation qubits"
            )));
        }
        if self.kind.arity() == 2 && self.targets[0] == self.targets[1] {
            return Err(Error::InvalidConfig("two-qubit gate on one qubit".into()));
        }
        match (self.kind, self.octants.len()) {
            (GateKind::Single, 3) => Ok(()),
            (GateKind::Single, k) => Err(Error::InvalidConfig(format!(
                "single gate needs 3 octants, got {k}"
            ))),
            (_, 0) => Ok(()),
            (k, _) => Err(Error::InvalidConfig(format!("{k:?} takes no octants"))),
        }
    }

    pub fn lower(&self) -> Result<Vec<Primitive>> {
        Ok(match self.kind {
            GateKind::Cz => vec![Primitive::Cz {
                a: self.targets[0],
                b: self.targets[1],
            }],
            GateKind::Cnot => {
                let t = self.targets[1];
                let h = single_octants(&mat_h())?;
                vec![
                    Primitive::Single {
                        target: t,
                        octants: h,
                    },
                    Primitive::Cz {
                        a: self.targets[0],
                        b: t,
                    },
                    Primitive::Single {
                        target: t,
                        octants: h,
                    },
                ]
            }
            GateKind::Single => vec![Primitive::Single {
                target: self.targets[0],
                octants: [self.octants[0], self.octants[1], self.octants[2]],
            }],
            _ => vec![Primitive::Single {
                target: self.targets[0],
                octants: single_octants(&self.matrix()?)?,
            }],
        })
    }
}

/// Deviating server behaviour.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum AdversaryConfig {
    #[default]
    None,
    /// `a` X, `b` Z and `c` XZ operators on distinct random output positions.
    RandomPauli { a: usize, b: usize, c: usize },
    /// Each reported output bit survives with probability `delta`.
    TrapTamper { delta: f64 },
    /// Three-qubit probe `(B, B, A)`, amplitude index `4 B1 + 2 B2 + A`, whose
    /// `A` qubit replaces the first ancilla sent to the client.
    EntangledProbe { psi: Vec<[f64; 2]> },
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("bad {what} {p:?}")))
        })
        .collect()
}

impl std::str::FromStr for AdversaryConfig {
    type Err = Error;

    /// `none`, `pauli:a,b,c`, `tamper:delta` or `probe:ghz|product|random[:seed]`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        match head {
            "none" if rest.is_empty() => Ok(AdversaryConfig::None),
            "pauli" => match parse_list::<usize>(rest, "count")?[..] {
                [a, b, c] => Ok(AdversaryConfig::RandomPauli { a, b, c }),
                _ => Err(Error::InvalidSpec(format!(
                    "pauli needs a,b,c, got {rest:?}"
                ))),
            },
            "tamper" => {
                let delta = rest
                    .parse()
                    .map_err(|_| Error::InvalidSpec(format!("bad delta {rest:?}")))?;
                Ok(AdversaryConfig::TrapTamper { delta })
            }
            "probe" => {
                let (name, seed) = rest.split_once(':').unwrap_or((rest, "0"));
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let mut psi = vec![[0.0, 0.0]; 8];
                match name {
                    "ghz" => {
                        psi[0] = [h, 0.0];
                        psi[7] = [h, 0.0];
                    }
                    // |+>|+> on the server pair, |0> on the sent qubit.
                    "product" => {
                        for i in [0, 2, 4, 6] {
                            psi[i] = [0.5, 0.0];
                        }
                    }
                    "random" => {
                        let seed = seed
                            .parse()
                            .map_err(|_| Error::InvalidSpec(format!("bad seed {seed:?}")))?;
                        let s = StateVector::random(3, &mut crate::rng::stream(seed, "probe", 0))?;
                        psi = s.amplitudes().iter().map(|a| [a.re, a.im]).collect();
                    }
                    _ => return Err(Error::InvalidSpec(format!("unknown probe {name:?}"))),
                }
                Ok(AdversaryConfig::EntangledProbe { psi })
            }
            _ => Err(Error::InvalidSpec(format!("unknown adversary {s:?}"))),
        }
    }
}

impl std::str::FromStr for GateRequest {
    type Err = Error;

    /// `kind:targets`, e.g. `h:0`, `cnot:0,1`, or `single:0:b,g,d` with octants.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let kind: GateKind = serde_json::from_value(serde_json::Value::String(
            parts.next().unwrap_or_default().to_ascii_lowercase(),
        ))
        .map_err(|_| Error::InvalidSpec(format!("unknown gate in {s:?}")))?;
        let targets = parse_list(parts.next().unwrap_or_default(), "target")?;
        let octants = match parts.next() {
            Some(o) => parse_list::<u8>(o, "octant")?
                .into_iter()
                .map(Octant::new)
                .collect::<Result<_>>()?,
            None => Vec::new(),
        };
        if parts.next().is_some() {
            return Err(Error::InvalidSpec(format!("trailing fields in {s:?}")));
        }
        Ok(GateRequest {
            kind,
            targets,
            octants,
        })
    }
}

impl AdversaryConfig {
    pub fn is_none(&self) -> bool {
        matches!(self, AdversaryConfig::None)
    }

    pub fn probe_state(&self) -> Result<Option<StateVector>> {
        match self {
            AdversaryConfig::EntangledProbe { psi } => {
                let amps = psi
                    .iter()
                    .map(|&[re, im]| num_complex::Complex64::new(re, im))
                    .collect();
                let s = StateVector::from_amplitudes(amps)?;
                if s.num_qubits() != 3 {
                    return Err(Error::InvalidConfig("probe must have 3 qubits".into()));
                }
                Ok(Some(s))
            }
            _ => Ok(None),
        }
    }

    fn validate(&self, protocol: ProtocolKind, n: usize) -> Result<()> {
        match self {
            AdversaryConfig::None => Ok(()),
            AdversaryConfig::RandomPauli { a, b, c } => {
                if a + b + c > n {
                    Err(Error::InvalidConfig(format!(
                        "{} Pauli operators on {n} qubits",
                        a + b + c
                    )))
                } else {
                    Ok(())
                }
            }
            AdversaryConfig::TrapTamper { delta } => {
                if protocol == ProtocolKind::P1 {
                    return Err(Error::InvalidConfig(
                        "the P1 client measures outputs itself; tampering needs server-side reports"
                            .into(),
                    ));
                }
                if !(*delta > 0.0 && *delta < 1.0) {
                    return Err(Error::InvalidConfig(format!("delta {delta} not in (0, 1)")));
                }
                Ok(())
            }
            AdversaryConfig::EntangledProbe { .. } => {
                if protocol != ProtocolKind::P2 {
                    return Err(Error::InvalidConfig("the probe attack targets P2".into()));
                }
                self.probe_state().map(|_| ())
            }
        }
    }
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

/// A full experiment description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub protocol: ProtocolKind,
    /// `N`, including traps.
    pub num_register_qubits: usize,
    /// `M`, gate-pattern layers.
    pub depth: usize,
    #[serde(default)]
    pub trap_count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub adversary: AdversaryConfig,
    #[serde(default)]
    pub algorithm: Vec<GateRequest>,
    /// Largest number of trap errors still accepted.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub accept_threshold: usize,
}

impl ProtocolConfig {
    /// A config with the protocol's default trap count and no algorithm.
    pub fn new(protocol: ProtocolKind, n: usize, depth: usize, seed: u64) -> Self {
        let trap_count = match protocol {
            ProtocolKind::Sueki => 0,
            ProtocolKind::P1 => 2 * n / 3,
            ProtocolKind::P2 => n / 2,
        };
        Self {
            protocol,
            num_register_qubits: n,
            depth,
            trap_count,
            seed,
            adversary: AdversaryConfig::None,
            algorithm: Vec::new(),
            accept_threshold: 0,
        }
    }

    /// Number of qubits carrying the computation.
    pub fn n_comp(&self) -> usize {
        self.num_register_qubits - self.trap_count
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_register_qubits;
        if n == 0 {
            return Err(Error::InvalidConfig("no register qubits".into()));
        }
        if self.depth == 0 {
            return Err(Error::InvalidConfig("depth must be at least 1".into()));
        }
        match self.protocol {
            ProtocolKind::Sueki => {
                if self.trap_count != 0 {
                    return Err(Error::InvalidConfig(
                        "the Sueki protocol has no traps".into(),
                    ));
                }
            }
            ProtocolKind::P1 => {
                if !n.is_multiple_of(3) {
                    return Err(Error::InvalidConfig(format!(
                        "P1 needs N divisible by 3, got {n}"
                    )));
                }
                if self.trap_count != 2 * n / 3 {
                    return Err(Error::InvalidConfig(format!(
                        "P1 uses 2N/3 = {} traps, got {}",
                        2 * n / 3,
                        self.trap_count
                    )));
                }
            }
            ProtocolKind::P2 => {
                if self.trap_count == 0 || self.trap_count >= n {
                    return Err(Error::InvalidConfig(format!(
                        "P2 needs 0 < h < N, got h = {} with N = {n}",
                        self.trap_count
                    )));
                }
            }
        }
        for g in &self.algorithm {
            g.validate(self.n_comp())?;
        }
        self.adversary.validate(self.protocol, n)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }
}
