use std::fmt::Write as _;

use super::frame::PauliFrame;
use super::kraus::AncillaPrep;
use super::octant::Octant;
use crate::error::{Error, Result};
use crate::protocols::{Party, Payload, World};
use crate::qsim::{mat_h, Chooser, MeasurementBasis, Qubit, QubitId};

/// Initial state of the gadget ancilla.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrepKind {
    Zero,
    Plus,
    /// `|+_{k pi/4, pi/2}>`
    Gamma(Octant),
}

impl PrepKind {
    pub fn state(self) -> Qubit {
        match self {
            PrepKind::Zero => AncillaPrep::octant(Octant::ZERO, false).state(),
            PrepKind::Plus => mat_h()[0],
            PrepKind::Gamma(g) => AncillaPrep::octant(g, false).state(),
        }
    }
}

/// What happens to the ancilla after the couplings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    Discard,
    X,
    Z,
    /// Equatorial basis at `k pi/4`.
    Rotated(Octant),
}

impl MeasureKind {
    pub fn basis(self) -> Option<MeasurementBasis> {
        match self {
            MeasureKind::Discard => None,
            MeasureKind::X => Some(MeasurementBasis::PauliX),
            MeasureKind::Z => Some(MeasurementBasis::PauliZ),
            MeasureKind::Rotated(o) => Some(MeasurementBasis::equatorial(o.radians())),
        }
    }

    pub fn outcomes(self) -> usize {
        if self == MeasureKind::Discard {
            1
        } else {
            2
        }
    }
}

/// A single-ancilla gadget: prepare, couple to register slots in order,
/// measure or discard, then cancel surplus Hadamards on the listed slots.
/// `corrections[m]` is the Pauli by-product left for outcome `m`, one
/// character per slot from `I`, `X`, `Z`, `Y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Wiring {
    pub prep: PrepKind,
    pub couplings: Vec<usize>,
    pub measure: MeasureKind,
    pub hcancel: Vec<usize>,
    pub corrections: Vec<String>,
}

const ZERO_STATE: Qubit = [
    num_complex::Complex64 { re: 1.0, im: 0.0 },
    num_complex::Complex64 { re: 0.0, im: 0.0 },
];

/// `(x, z)` bits of a Pauli letter.
pub fn pauli_bits(c: char) -> Option<(bool, bool)> {
    match c {
        'I' => Some((false, false)),
        'X' => Some((true, false)),
        'Z' => Some((false, true)),
        'Y' => Some((true, true)),
        _ => None,
    }
}

pub fn pauli_letter(x: bool, z: bool) -> char {
    match (x, z) {
        (false, false) => 'I',
        (true, false) => 'X',
        (false, true) => 'Z',
        (true, true) => 'Y',
    }
}

impl Wiring {
    /// Number of register slots the wiring touches.
    pub fn arity(&self) -> usize {
        self.couplings
            .iter()
            .chain(&self.hcancel)
            .map(|s| s + 1)
            .max()
            .unwrap_or(0)
    }

    /// Runs the wiring on `regs` (slot k is `regs[k]`), all operations by Bob.
    /// Returns the outcome and the by-product per slot.
    pub fn execute(
        &self,
        world: &mut World,
        regs: &[QubitId],
        chooser: &mut dyn Chooser,
    ) -> Result<(u8, Vec<(bool, bool)>)> {
        let outcome = self.run(world, regs, chooser)?;
        let corr = self
            .corrections
            .get(outcome as usize)
            .ok_or_else(|| Error::InvalidState(format!("no correction for outcome {outcome}")))?;
        let delta = corr
            .chars()
            .map(|c| pauli_bits(c).expect("validated on parse"))
            .collect();
        Ok((outcome, delta))
    }

    /// The quantum part of [`Wiring::execute`]; ignores the corrections.
    pub fn run(
        &self,
        world: &mut World,
        regs: &[QubitId],
        chooser: &mut dyn Chooser,
    ) -> Result<u8> {
        if regs.len() < self.arity() {
            return Err(Error::LengthMismatch {
                expected: self.arity(),
                got: regs.len(),
            });
        }
        let anc = world.prepare(Party::Bob, self.prep.state(), "ancilla")?;
        for &slot in &self.couplings {
            world.couple(anc, regs[slot])?;
        }
        let outcome = match self.measure.basis() {
            None => {
                world.discard(Party::Bob, anc, chooser)?;
                0
            }
            Some(b) => {
                let bit = world.measure(Party::Bob, anc, b, chooser)?;
                world.send(Party::Bob, || Payload::Bit { bit });
                bit
            }
        };
        for &slot in &self.hcancel {
            let h = world.prepare(Party::Bob, ZERO_STATE, "h-cancel")?;
            world.couple(h, regs[slot])?;
            world.discard(Party::Bob, h, chooser)?;
        }
        Ok(outcome)
    }

    /// The by-product for `outcome` as a frame over `n` qubits with slot k at `targets[k]`.
    pub fn frame_delta(&self, outcome: u8, targets: &[usize], n: usize) -> Result<PauliFrame> {
        let mut f = PauliFrame::identity(n);
        let corr = self
            .corrections
            .get(outcome as usize)
            .ok_or_else(|| Error::InvalidState(format!("no correction for outcome {outcome}")))?;
        for (c, &t) in corr.chars().zip(targets) {
            let (x, z) = pauli_bits(c).expect("validated on parse");
            f.toggle(t, x, z);
        }
        Ok(f)
    }

    /// Line-oriented text form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let prep = match self.prep {
            PrepKind::Zero => "zero".to_string(),
            PrepKind::Plus => "plus".to_string(),
            PrepKind::Gamma(g) => format!("gamma {}", g.k()),
        };
        let join = |v: &[usize]| v.iter().map(|x| format!(" {x}")).collect::<String>();
        let meas = match self.measure {
            MeasureKind::Discard => "discard".to_string(),
            MeasureKind::X => "x".to_string(),
            MeasureKind::Z => "z".to_string(),
            MeasureKind::Rotated(o) => format!("rotated {}", o.k()),
        };
        writeln!(s, "prep {prep}").unwrap();
        writeln!(s, "couple{}", join(&self.couplings)).unwrap();
        writeln!(s, "measure {meas}").unwrap();
        writeln!(s, "hcancel{}", join(&self.hcancel)).unwrap();
        for (m, c) in self.corrections.iter().enumerate() {
            writeln!(s, "correct {m} {c}").unwrap();
        }
        s.push_str("end\n");
        s
    }

    /// Parses [`Wiring::to_text`] output. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, message: &str| Error::FixtureParse {
            line,
            message: message.to_string(),
        };
        let mut prep = None;
        let mut couplings = None;
        let mut measure = None;
        let mut hcancel = Vec::new();
        let mut corrections: Vec<String> = Vec::new();
        let mut ended = false;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if ended {
                return Err(err(line_no, "content after end"));
            }
            let mut words = line.split_whitespace();
            let key = words.next().expect("non-empty line");
            let rest: Vec<&str> = words.collect();
            let slots = |rest: &[&str]| -> Result<Vec<usize>> {
                rest.iter()
                    .map(|w| w.parse().map_err(|_| err(line_no, "bad slot index")))
                    .collect()
            };
            let octant = |w: Option<&&str>| -> Result<Octant> {
                let k: u8 = w
                    .ok_or_else(|| err(line_no, "missing octant"))?
                    .parse()
                    .map_err(|_| err(line_no, "bad octant"))?;
                Octant::new(k).map_err(|_| err(line_no, "octant out of range"))
            };
            match key {
                "prep" => {
                    prep = Some(match rest.first().copied() {
                        Some("zero") => PrepKind::Zero,
                        Some("plus") => PrepKind::Plus,
                        Some("gamma") => PrepKind::Gamma(octant(rest.get(1))?),
                        _ => return Err(err(line_no, "unknown prep")),
                    })
                }
                "couple" => couplings = Some(slots(&rest)?),
                "measure" => {
                    measure = Some(match rest.first().copied() {
                        Some("discard") => MeasureKind::Discard,
                        Some("x") => MeasureKind::X,
                        Some("z") => MeasureKind::Z,
                        Some("rotated") => MeasureKind::Rotated(octant(rest.get(1))?),
                        _ => return Err(err(line_no, "unknown measurement")),
                    })
                }
                "hcancel" => hcancel = slots(&rest)?,
                "correct" => {
                    let m: usize = rest
                        .first()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| err(line_no, "bad outcome"))?;
                    if m != corrections.len() {
                        return Err(err(line_no, "corrections must be listed in outcome order"));
                    }
                    let p = rest
                        .get(1)
                        .ok_or_else(|| err(line_no, "missing Pauli string"))?;
                    if p.chars().any(|c| pauli_bits(c).is_none()) {
                        return Err(err(line_no, "Pauli string must use I, X, Z, Y"));
                    }
                    corrections.push(p.to_string());
                }
                "end" => ended = true,
                _ => return Err(err(line_no, "unknown directive")),
            }
        }
        let last = text.lines().count();
        if !ended {
            return Err(err(last, "missing end"));
        }
        let w = Wiring {
            prep: prep.ok_or_else(|| err(last, "missing prep"))?,
            couplings: couplings.ok_or_else(|| err(last, "missing couple"))?,
            measure: measure.ok_or_else(|| err(last, "missing measure"))?,
            hcancel,
            corrections,
        };
        if w.corrections.len() != w.measure.outcomes() {
            return Err(err(last, "one correction per outcome required"));
        }
        if w.corrections.iter().any(|c| c.len() != w.arity()) {
            return Err(err(last, "correction length must equal the slot count"));
        }
        Ok(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let w = Wiring {
            prep: PrepKind::Gamma(Octant::new(2).unwrap()),
            couplings: vec![0, 1],
            measure: MeasureKind::Rotated(Octant::new(5).unwrap()),
            hcancel: vec![1],
            corrections: vec!["IX".into(), "ZY".into()],
        };
        let text = w.to_text();
        assert_eq!(Wiring::parse(&text).unwrap(), w);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "prep plus\ncouple 0\nmeasure y\nend\n";
        match Wiring::parse(bad) {
            Err(Error::FixtureParse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Wiring::parse("prep zero\ncouple 0\nmeasure discard\ncorrect 0 I\n").is_err());
        assert!(Wiring::parse("prep zero\ncouple 0\nmeasure z\ncorrect 0 I\nend\n").is_err());
    }
}
