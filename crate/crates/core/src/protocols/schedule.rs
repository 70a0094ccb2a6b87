use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::{single_octants, Primitive, ProtocolConfig};
use super::layout::{place_traps, TrapLayout};
use super::transcript::WireBasis;
use crate::error::{Error, Result};
use crate::gadgets::Octant;
use crate::qsim::mat_h;

/// One step of a compiled run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Step {
    /// `HRZ(theta)` on a physical position. `gamma` and `r` are the client's
    /// one-time pad for the prepare-only protocol.
    Hrz {
        pos: usize,
        theta: Octant,
        gamma: Octant,
        r: u8,
    },
    Cz {
        a: usize,
        b: usize,
    },
    /// Server deviation point just before the outputs are measured.
    Attack,
    Output,
}

/// Compiled schedule plus the hidden layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub layout: TrapLayout,
    pub steps: Vec<Step>,
    /// Layers used by the algorithm (at most the configured depth).
    pub layers_used: usize,
}

impl Plan {
    pub fn n(&self) -> usize {
        self.layout.len()
    }
}

/// `RZ(b) RX(g) RZ(d)` as `HRZ(0) HRZ(b) HRZ(g) HRZ(d)`, listed in the order applied.
pub fn slot_angles(octants: [Octant; 3]) -> [Octant; 4] {
    let [b, g, d] = octants;
    [d, g, b, Octant::ZERO]
}

#[derive(Clone, Debug, Default)]
struct Layer {
    slots: Vec<Option<[Octant; 3]>>,
    czs: Vec<(usize, usize)>,
}

/// Greedily packs lowered gates into layers of one single-qubit slot per
/// position followed by CZs. Positions are physical.
fn pack(prims: &[Primitive], n: usize, depth: usize) -> Result<Vec<Layer>> {
    let mut layers: Vec<Layer> = Vec::new();
    let mut ready_slot = vec![0usize; n];
    let mut ready_cz = vec![0usize; n];
    let need = |layers: &mut Vec<Layer>, l: usize| {
        while layers.len() <= l {
            layers.push(Layer {
                slots: vec![None; n],
                czs: Vec::new(),
            });
        }
    };
    for p in prims {
        match *p {
            Primitive::Single { target, octants } => {
                let l = ready_slot[target];
                need(&mut layers, l);
                layers[l].slots[target] = Some(octants);
                ready_slot[target] = l + 1;
                ready_cz[target] = l;
            }
            Primitive::Cz { a, b } => {
                let l = ready_cz[a].max(ready_cz[b]);
                need(&mut layers, l);
                layers[l].czs.push((a, b));
                for q in [a, b] {
                    ready_cz[q] = l;
                    ready_slot[q] = l + 1;
                }
            }
        }
    }
    if layers.len() > depth {
        return Err(Error::InvalidConfig(format!(
            "algorithm needs {} layers, depth is {depth}",
            layers.len()
        )));
    }
    Ok(layers)
}

/// Draws the layout and the client pads from `rng` and lays out every step.
///
/// Every position gets one slot per layer (identity where unused) plus an
/// output slot that prepares traps and rotates X-basis computation outputs.
pub fn compile<R: Rng + ?Sized>(config: &ProtocolConfig, rng: &mut R) -> Result<Plan> {
    config.validate()?;
    let n = config.num_register_qubits;
    let layout = place_traps(n, config.trap_count, config.protocol, rng)?;
    let mut prims = Vec::new();
    for g in &config.algorithm {
        for p in g.lower()? {
            prims.push(match p {
                Primitive::Single { target, octants } => Primitive::Single {
                    target: layout.position(target),
                    octants,
                },
                Primitive::Cz { a, b } => Primitive::Cz {
                    a: layout.position(a),
                    b: layout.position(b),
                },
            });
        }
    }
    let layers = pack(&prims, n, config.depth)?;
    let layers_used = layers.len();
    let identity = [Octant::ZERO; 3];
    let h = single_octants(&mat_h())?;
    let mut steps = Vec::new();
    let hrz = |steps: &mut Vec<Step>, pos: usize, o: [Octant; 3], rng: &mut R| {
        for theta in slot_angles(o) {
            let gamma = Octant::wrap(rng.random_range(0..8));
            let r = rng.random_range(0..2u8);
            steps.push(Step::Hrz {
                pos,
                theta,
                gamma,
                r,
            });
        }
    };
    for l in 0..config.depth {
        for pos in 0..n {
            let o = layers
                .get(l)
                .and_then(|layer| layer.slots[pos])
                .unwrap_or(identity);
            hrz(&mut steps, pos, o, rng);
        }
        if let Some(layer) = layers.get(l) {
            for &(a, b) in &layer.czs {
                steps.push(Step::Cz { a, b });
            }
        }
    }
    for pos in 0..n {
        let o = match (layout.traps[pos], layout.bases[pos]) {
            (Some(kind), _) => single_octants(&kind.preparation())?,
            (None, WireBasis::X) => h,
            (None, _) => identity,
        };
        hrz(&mut steps, pos, o, rng);
    }
    steps.push(Step::Attack);
    steps.push(Step::Output);
    Ok(Plan {
        layout,
        steps,
        layers_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{GateKind, GateRequest, ProtocolKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn packing_and_depth() {
        let mut c = ProtocolConfig::new(ProtocolKind::Sueki, 2, 2, 0);
        c.algorithm = vec![
            GateRequest::named(GateKind::H, &[0]),
            GateRequest::named(GateKind::Cz, &[0, 1]),
            GateRequest::named(GateKind::X, &[1]),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let plan = compile(&c, &mut rng).unwrap();
        assert_eq!(plan.layers_used, 2);
        // 2 layers + output, 2 positions, 4 HRZ each, 1 CZ, attack, output.
        assert_eq!(plan.steps.len(), 3 * 2 * 4 + 1 + 2);
        c.depth = 1;
        assert!(compile(&c, &mut rng).is_err());
    }

    #[test]
    fn cnot_needs_two_layers() {
        let mut c = ProtocolConfig::new(ProtocolKind::Sueki, 2, 2, 0);
        c.algorithm = vec![GateRequest::named(GateKind::Cnot, &[0, 1])];
        let plan = compile(&c, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(plan.layers_used, 2);
    }
}
