//! Reversible circuit IR.
//!
//! A [`Circuit`] is an ordered gate list over the qubits of a
//! [`RegisterMap`]. Every gate in the set is self-inverse, so inversion is
//! order reversal.
//!
//! Depth is computed by as-soon-as-possible layering. Multi-controlled gates
//! are simulated atomically but charged the depth of their expansion into
//! bounded-arity gates (see [`Circuit::expanded`]).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strings::ceil_log2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Qubit(pub u32);

impl Qubit {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    H(Qubit),
    X(Qubit),
    Z(Qubit),
    Cx { control: Qubit, target: Qubit },
    Ccx { controls: [Qubit; 2], target: Qubit },
    Mcx { controls: Vec<Qubit>, target: Qubit },
    /// Phase flip of the all-ones state of `controls` and `target`.
    Mcz { controls: Vec<Qubit>, target: Qubit },
    Swap(Qubit, Qubit),
    Cswap { control: Qubit, a: Qubit, b: Qubit },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Z,
    #[serde(rename = "CX")]
    Cx,
    #[serde(rename = "CCX")]
    Ccx,
    #[serde(rename = "MCX")]
    Mcx,
    #[serde(rename = "MCZ")]
    Mcz,
    #[serde(rename = "SWAP")]
    Swap,
    #[serde(rename = "CSWAP")]
    Cswap,
}

impl GateKind {
    pub const ALL: [GateKind; 9] = [
        GateKind::H,
        GateKind::X,
        GateKind::Z,
        GateKind::Cx,
        GateKind::Ccx,
        GateKind::Mcx,
        GateKind::Mcz,
        GateKind::Swap,
        GateKind::Cswap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::Cx => "CX",
            GateKind::Ccx => "CCX",
            GateKind::Mcx => "MCX",
            GateKind::Mcz => "MCZ",
            GateKind::Swap => "SWAP",
            GateKind::Cswap => "CSWAP",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown gate kind '{s}'")))
    }
}

/// Layers taken by a multi-controlled X with `k` controls once expanded into
/// a Toffoli AND-tree over ancillae: compute, target, uncompute.
pub fn mcx_layers(k: usize) -> usize {
    if k <= 2 {
        1
    } else {
        2 * ceil_log2(k) as usize - 1
    }
}

/// Layers of a multi-controlled Z with `k` controls: `H . MCX . H` on the
/// target, or a plain `Z` when there are no controls. For `k > 2` the two
/// Hadamards overlap the tree compute and uncompute.
pub fn mcz_layers(k: usize) -> usize {
    match k {
        0 => 1,
        1 | 2 => 3,
        _ => mcx_layers(k),
    }
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::H(_) => GateKind::H,
            Gate::X(_) => GateKind::X,
            Gate::Z(_) => GateKind::Z,
            Gate::Cx { .. } => GateKind::Cx,
            Gate::Ccx { .. } => GateKind::Ccx,
            Gate::Mcx { .. } => GateKind::Mcx,
            Gate::Mcz { .. } => GateKind::Mcz,
            Gate::Swap(..) => GateKind::Swap,
            Gate::Cswap { .. } => GateKind::Cswap,
        }
    }

    /// Targets then controls, the order used by the text dump.
    pub fn targets_and_controls(&self) -> (Vec<Qubit>, Vec<Qubit>) {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::Z(q) => (vec![*q], vec![]),
            Gate::Cx { control, target } => (vec![*target], vec![*control]),
            Gate::Ccx { controls, target } => (vec![*target], controls.to_vec()),
            Gate::Mcx { controls, target } | Gate::Mcz { controls, target } => {
                (vec![*target], controls.clone())
            }
            Gate::Swap(a, b) => (vec![*a, *b], vec![]),
            Gate::Cswap { control, a, b } => (vec![*a, *b], vec![*control]),
        }
    }

    pub fn from_parts(kind: GateKind, targets: &[Qubit], controls: &[Qubit]) -> Result<Self> {
        let bad = || {
            Error::MalformedGate(format!(
                "{kind} with {} target(s) and {} control(s)",
                targets.len(),
                controls.len()
            ))
        };
        let gate = match (kind, targets, controls) {
            (GateKind::H, [q], []) => Gate::H(*q),
            (GateKind::X, [q], []) => Gate::X(*q),
            (GateKind::Z, [q], []) => Gate::Z(*q),
            (GateKind::Cx, [t], [c]) => Gate::Cx { control: *c, target: *t },
            (GateKind::Ccx, [t], [a, b]) => Gate::Ccx { controls: [*a, *b], target: *t },
            (GateKind::Mcx, [t], cs) => Gate::Mcx { controls: cs.to_vec(), target: *t },
            (GateKind::Mcz, [t], cs) => Gate::Mcz { controls: cs.to_vec(), target: *t },
            (GateKind::Swap, [a, b], []) => Gate::Swap(*a, *b),
            (GateKind::Cswap, [a, b], [c]) => Gate::Cswap { control: *c, a: *a, b: *b },
            _ => return Err(bad()),
        };
        Ok(gate)
    }

    #[inline]
    pub fn for_each_qubit(&self, mut f: impl FnMut(Qubit)) {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::Z(q) => f(*q),
            Gate::Cx { control, target } => {
                f(*control);
                f(*target);
            }
            Gate::Ccx { controls, target } => {
                f(controls[0]);
                f(controls[1]);
                f(*target);
            }
            Gate::Mcx { controls, target } | Gate::Mcz { controls, target } => {
                controls.iter().copied().for_each(&mut f);
                f(*target);
            }
            Gate::Swap(a, b) => {
                f(*a);
                f(*b);
            }
            Gate::Cswap { control, a, b } => {
                f(*control);
                f(*a);
                f(*b);
            }
        }
    }

    /// Layers this gate occupies in depth accounting.
    pub fn layers(&self) -> usize {
        match self {
            Gate::Mcx { controls, .. } => mcx_layers(controls.len()),
            Gate::Mcz { controls, .. } => mcz_layers(controls.len()),
            _ => 1,
        }
    }

    /// Distinct qubits, all below `width`.
    pub fn validate(&self, width: u32) -> Result<()> {
        let mut seen: Vec<Qubit> = Vec::with_capacity(4);
        let mut err = None;
        self.for_each_qubit(|q| {
            if err.is_some() {
                return;
            }
            if q.0 >= width {
                err = Some(Error::MalformedGate(format!(
                    "{} uses qubit {q} outside width {width}",
                    self.kind()
                )));
            } else if seen.contains(&q) {
                err = Some(Error::MalformedGate(format!(
                    "{} uses qubit {q} more than once",
                    self.kind()
                )));
            } else {
                seen.push(q);
            }
        });
        err.map_or(Ok(()), Err)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (targets, controls) = self.targets_and_controls();
        let join = |qs: &[Qubit]| {
            if qs.is_empty() {
                "-".to_string()
            } else {
                qs.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",")
            }
        };
        write!(f, "{} {} {}", self.kind(), join(&targets), join(&controls))
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let mut parts = line.split_whitespace();
        let (Some(kind), Some(t), Some(c), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(Error::Parse(format!("expected `KIND targets controls`, got '{line}'")));
        };
        let list = |s: &str| -> Result<Vec<Qubit>> {
            if s == "-" {
                return Ok(vec![]);
            }
            s.split(',')
                .map(|q| {
                    q.parse::<u32>()
                        .map(Qubit)
                        .map_err(|e| Error::Parse(format!("bad qubit '{q}': {e}")))
                })
                .collect()
        };
        Gate::from_parts(kind.parse()?, &list(t)?, &list(c)?)
    }
}

/// Register names used by the oracle circuits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegName {
    I,
    J,
    X,
    Y,
    D,
    R,
    Out,
    Anc,
    /// Extra ancillae introduced by multi-controlled gate expansion.
    Scratch,
}

impl fmt::Display for RegName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegName::I => "i",
            RegName::J => "j",
            RegName::X => "x",
            RegName::Y => "y",
            RegName::D => "d",
            RegName::R => "r",
            RegName::Out => "out",
            RegName::Anc => "anc",
            RegName::Scratch => "scratch",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Register {
    pub name: RegName,
    pub start: u32,
    pub width: u32,
}

impl Register {
    pub fn range(&self) -> Range<u32> {
        self.start..self.start + self.width
    }

    /// Qubit holding bit `bit` of the register value (bit 0 = least
    /// significant). The most significant bit sits on the lowest qubit.
    pub fn value_qubit(&self, bit: u32) -> Qubit {
        debug_assert!(bit < self.width);
        Qubit(self.start + self.width - 1 - bit)
    }

    pub fn qubit(&self, offset: u32) -> Qubit {
        debug_assert!(offset < self.width);
        Qubit(self.start + offset)
    }

    pub fn qubits(&self) -> impl Iterator<Item = Qubit> + '_ {
        self.range().map(Qubit)
    }
}

/// Named contiguous qubit ranges plus the text layout (`n` symbols of `c`
/// bits each for the `x`/`y` registers).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterMap {
    regs: Vec<Register>,
    n: usize,
    symbol_width: u32,
    width: u32,
}

impl RegisterMap {
    /// Lays registers out contiguously in the given order.
    pub fn new(n: usize, symbol_width: u32, layout: &[(RegName, u32)]) -> Result<Self> {
        let mut regs = Vec::with_capacity(layout.len());
        let mut next = 0u32;
        for &(name, width) in layout {
            if regs.iter().any(|r: &Register| r.name == name) {
                return Err(Error::RegisterMismatch(format!("register {name} declared twice")));
            }
            regs.push(Register { name, start: next, width });
            next += width;
        }
        let map = Self {
            regs,
            n,
            symbol_width,
            width: next,
        };
        for name in [RegName::X, RegName::Y] {
            if let Ok(r) = map.get(name) {
                if r.width as usize != n * symbol_width as usize {
                    return Err(Error::WidthMismatch(format!(
                        "text register {name} has {} qubits, expected n*c = {}",
                        r.width,
                        n * symbol_width as usize
                    )));
                }
            }
        }
        Ok(map)
    }

    pub fn get(&self, name: RegName) -> Result<&Register> {
        self.regs
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::RegisterMismatch(format!("no register named {name}")))
    }

    pub fn has(&self, name: RegName) -> bool {
        self.regs.iter().any(|r| r.name == name)
    }

    pub fn registers(&self) -> &[Register] {
        &self.regs
    }

    /// Total qubit count.
    pub fn width(&self) -> u32 {
        self.width
    }

    /// Number of text symbols `n`.
    pub fn text_len(&self) -> usize {
        self.n
    }

    pub fn symbol_width(&self) -> u32 {
        self.symbol_width
    }

    /// Qubit holding bit `bit` (0 = least significant) of symbol `pos` in a
    /// text register.
    pub fn symbol_qubit(&self, reg: &Register, pos: usize, bit: u32) -> Qubit {
        let c = self.symbol_width;
        Qubit(reg.start + pos as u32 * c + (c - 1 - bit))
    }

    /// The same map with `extra` scratch qubits appended.
    pub fn with_scratch(&self, extra: u32) -> Self {
        let mut map = self.clone();
        if extra > 0 {
            map.regs.push(Register {
                name: RegName::Scratch,
                start: map.width,
                width: extra,
            });
            map.width += extra;
        }
        map
    }
}

/// Ordered gate list over a register map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    gates: Vec<Gate>,
    map: RegisterMap,
    label: String,
}

impl Circuit {
    pub fn new(map: RegisterMap, label: impl Into<String>) -> Self {
        Self {
            gates: Vec::new(),
            map,
            label: label.into(),
        }
    }

    /// Wraps an already validated gate list.
    pub(crate) fn from_gates(map: RegisterMap, label: impl Into<String>, gates: Vec<Gate>) -> Self {
        Self {
            gates,
            map,
            label: label.into(),
        }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn map(&self) -> &RegisterMap {
        &self.map
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn append(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.map.width())?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn with_gate(mut self, gate: Gate) -> Result<Self> {
        self.append(gate)?;
        Ok(self)
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            gates: self.gates.iter().rev().cloned().collect(),
            map: self.map.clone(),
            label: format!("{}^-1", self.label),
        }
    }

    pub fn compose(&self, other: &Circuit) -> Result<Circuit> {
        let mut out = self.clone();
        out.extend(other)?;
        out.label = format!("{}.{}", self.label, other.label);
        Ok(out)
    }

    /// Appends `other` in place.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if self.map != other.map {
            return Err(Error::RegisterMismatch(format!(
                "cannot compose '{}' with '{}': register maps differ",
                self.label, other.label
            )));
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// ASAP layering: each gate starts once every qubit it touches is free,
    /// and holds those qubits for [`Gate::layers`] steps.
    pub fn depth(&self) -> usize {
        let mut ready = vec![0usize; self.map.width() as usize];
        let mut depth = 0;
        for g in &self.gates {
            let mut start = 0;
            g.for_each_qubit(|q| start = start.max(ready[q.index()]));
            let end = start + g.layers();
            g.for_each_qubit(|q| ready[q.index()] = end);
            depth = depth.max(end);
        }
        depth
    }

    /// Start layer of every gate under unit-duration ASAP scheduling.
    pub fn layer_assignment(&self) -> Vec<usize> {
        let mut ready = vec![0usize; self.map.width() as usize];
        self.gates
            .iter()
            .map(|g| {
                let mut start = 0;
                g.for_each_qubit(|q| start = start.max(ready[q.index()]));
                g.for_each_qubit(|q| ready[q.index()] = start + 1);
                start
            })
            .collect()
    }

    pub fn gate_counts(&self) -> GateCounts {
        let mut counts = GateCounts::default();
        for g in &self.gates {
            counts.add(g.kind(), 1);
        }
        counts
    }

    /// Replaces every MCX/MCZ with more than two controls by its AND-tree
    /// expansion, using scratch qubits appended after the map.
    pub fn expanded(&self) -> Circuit {
        let scratch = self
            .gates
            .iter()
            .map(|g| match g {
                Gate::Mcx { controls, .. } | Gate::Mcz { controls, .. } => {
                    controls.len().saturating_sub(2)
                }
                _ => 0,
            })
            .max()
            .unwrap_or(0) as u32;
        let map = self.map.with_scratch(scratch);
        let anc: Vec<Qubit> = (self.map.width()..map.width()).map(Qubit).collect();
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            match g {
                Gate::Mcx { controls, target } if controls.len() > 2 => {
                    expand_mcx(controls, *target, &anc, &mut gates)
                }
                Gate::Mcz { controls, target } if !controls.is_empty() => {
                    gates.push(Gate::H(*target));
                    match controls.len() {
                        1 => gates.push(Gate::Cx { control: controls[0], target: *target }),
                        2 => gates.push(Gate::Ccx { controls: [controls[0], controls[1]], target: *target }),
                        _ => expand_mcx(controls, *target, &anc, &mut gates),
                    }
                    gates.push(Gate::H(*target));
                }
                Gate::Mcz { target, .. } => gates.push(Gate::Z(*target)),
                Gate::Mcx { controls, target } => gates.push(match controls.len() {
                    0 => Gate::X(*target),
                    1 => Gate::Cx { control: controls[0], target: *target },
                    _ => Gate::Ccx { controls: [controls[0], controls[1]], target: *target },
                }),
                other => gates.push(other.clone()),
            }
        }
        Circuit {
            gates,
            map,
            label: format!("{}+expanded", self.label),
        }
    }

    /// One gate per line: `KIND targets controls`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for g in &self.gates {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_text(map: RegisterMap, label: &str, text: &str) -> Result<Circuit> {
        let mut c = Circuit::new(map, label);
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            c.append(line.parse()?)?;
        }
        Ok(c)
    }
}

/// Pairwise Toffoli tree over `controls` into ancillae, CCX onto `target`,
/// then the tree uncomputed. Needs `controls.len() - 2` ancillae.
fn expand_mcx(controls: &[Qubit], target: Qubit, anc: &[Qubit], out: &mut Vec<Gate>) {
    let mut level: Vec<Qubit> = controls.to_vec();
    let mut computed = Vec::new();
    let mut next_anc = 0;
    while level.len() > 2 {
        let mut next = Vec::with_capacity(level.len() / 2 + 1);
        for pair in level.chunks(2) {
            match pair {
                [a, b] => {
                    let t = anc[next_anc];
                    next_anc += 1;
                    let g = Gate::Ccx { controls: [*a, *b], target: t };
                    out.push(g.clone());
                    computed.push(g);
                    next.push(t);
                }
                [a] => next.push(*a),
                _ => unreachable!(),
            }
        }
        level = next;
    }
    out.push(Gate::Ccx { controls: [level[0], level[1]], target });
    out.extend(computed.into_iter().rev());
}

/// Gate totals by kind.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts(pub BTreeMap<GateKind, u64>);

impl GateCounts {
    pub fn add(&mut self, kind: GateKind, count: u64) {
        if count > 0 {
            *self.0.entry(kind).or_insert(0) += count;
        }
    }

    pub fn get(&self, kind: GateKind) -> u64 {
        self.0.get(&kind).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn merge(&mut self, other: &GateCounts) {
        self.merge_scaled(other, 1);
    }

    pub fn merge_scaled(&mut self, other: &GateCounts, times: u64) {
        for (k, v) in &other.0 {
            self.add(*k, v * times);
        }
    }

    /// Counts keyed by gate name, for reports.
    pub fn by_name(&self) -> BTreeMap<String, u64> {
        self.0.iter().map(|(k, v)| (k.name().to_string(), *v)).collect()
    }
}
