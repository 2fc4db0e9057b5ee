//! Gate-level builders for the controlled rotation, the window matchers
//! and the Grover diffuser, plus their classical (functional) forms.
//!
//! Every builder works on a [`RegisterMap`] and takes its work qubits from
//! the map's `anc` register with a bump allocator. All matchers follow the
//! compute / copy-into-`r` / uncompute pattern, so the ancillae end in
//! `|0>` on every basis input.

use std::ops::Range;

use crate::circuit::{Circuit, Gate, Qubit, RegName, Register, RegisterMap};
use crate::error::{check_range, Error, Result};
use crate::sim::BasisKey;
use crate::strings::{ceil_log2, phi, psi, rho, rotate_symbols, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuildMode {
    GateLevel,
    /// Classical action only; the circuit is empty but depth and size are
    /// those of the gate-level build it stands in for.
    Functional,
}

#[derive(Clone, Debug)]
pub struct OperatorBuild {
    pub circuit: Circuit,
    /// Ancilla qubits touched (a prefix of the `anc` register).
    pub ancillas: Range<u32>,
    pub depth: usize,
    pub size: usize,
    pub mode: BuildMode,
}

impl OperatorBuild {
    fn finish(map: &RegisterMap, label: String, em: Emitter) -> Self {
        let ancillas = em.pool.used();
        let circuit = Circuit::from_gates(map.clone(), label, em.gates);
        Self {
            depth: circuit.depth(),
            size: circuit.size(),
            circuit,
            ancillas,
            mode: BuildMode::GateLevel,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            circuit: self.circuit.inverse(),
            ancillas: self.ancillas.clone(),
            depth: self.depth,
            size: self.size,
            mode: self.mode,
        }
    }

    fn functional(self) -> Self {
        Self {
            circuit: Circuit::new(self.circuit.map().clone(), self.circuit.label()),
            mode: BuildMode::Functional,
            ..self
        }
    }
}

/// Bump allocator over the `anc` register.
#[derive(Clone, Debug)]
struct Scratch {
    start: u32,
    width: u32,
    next: u32,
    peak: u32,
}

impl Scratch {
    fn new(map: &RegisterMap) -> Self {
        let (start, width) = map.get(RegName::Anc).map_or((map.width(), 0), |r| (r.start, r.width));
        Self { start, width, next: 0, peak: 0 }
    }

    fn alloc(&mut self, k: usize) -> Result<Vec<Qubit>> {
        let needed = self.next as usize + k;
        if needed > self.width as usize {
            return Err(Error::AncillaExhausted {
                needed,
                available: self.width as usize,
            });
        }
        let out = (self.next..self.next + k as u32).map(|o| Qubit(self.start + o)).collect();
        self.next += k as u32;
        self.peak = self.peak.max(self.next);
        Ok(out)
    }

    fn mark(&self) -> u32 {
        self.next
    }

    fn release(&mut self, mark: u32) {
        self.next = mark;
    }

    fn used(&self) -> Range<u32> {
        self.start..self.start + self.peak
    }
}

struct Emitter {
    gates: Vec<Gate>,
    pool: Scratch,
}

impl Emitter {
    fn new(map: &RegisterMap) -> Self {
        Self {
            gates: Vec::new(),
            pool: Scratch::new(map),
        }
    }

    fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    fn mcx(&mut self, controls: &[Qubit], target: Qubit) {
        self.push(match controls {
            [] => Gate::X(target),
            [c] => Gate::Cx { control: *c, target },
            [a, b] => Gate::Ccx { controls: [*a, *b], target },
            _ => Gate::Mcx { controls: controls.to_vec(), target },
        });
    }

    /// `target ^= a AND b`; a single CX when both are the same qubit.
    fn and2(&mut self, a: Qubit, b: Qubit, target: Qubit) {
        if a == b {
            self.push(Gate::Cx { control: a, target });
        } else {
            self.push(Gate::Ccx { controls: [a, b], target });
        }
    }

    /// Appends the inverse of the first `upto` gates.
    fn uncompute_prefix(&mut self, upto: usize) {
        let tail: Vec<Gate> = self.gates[..upto].iter().rev().cloned().collect();
        self.gates.extend(tail);
    }

    /// `target ^= AND(bits)` with a pairwise Toffoli tree; scratch is
    /// restored before returning.
    fn and_tree(&mut self, bits: &[Qubit], target: Qubit) -> Result<()> {
        if bits.len() <= 2 {
            self.mcx(bits, target);
            return Ok(());
        }
        let mark = self.pool.mark();
        let from = self.gates.len();
        let mut level = bits.to_vec();
        while level.len() > 2 {
            let pairs = level.len() / 2;
            let anc = self.pool.alloc(pairs)?;
            let mut next = Vec::with_capacity(pairs + 1);
            for (p, a) in anc.into_iter().enumerate() {
                self.push(Gate::Ccx { controls: [level[2 * p], level[2 * p + 1]], target: a });
                next.push(a);
            }
            if level.len() % 2 == 1 {
                next.push(level[level.len() - 1]);
            }
            level = next;
        }
        let computed = self.gates.len();
        self.push(Gate::Ccx { controls: [level[0], level[1]], target });
        let tail: Vec<Gate> = self.gates[from..computed].iter().rev().cloned().collect();
        self.gates.extend(tail);
        self.pool.release(mark);
        Ok(())
    }

    /// `target ^= OR(bits)`.
    fn or_tree(&mut self, bits: &[Qubit], target: Qubit) -> Result<()> {
        for &b in bits {
            self.push(Gate::X(b));
        }
        self.and_tree(bits, target)?;
        self.push(Gate::X(target));
        for &b in bits {
            self.push(Gate::X(b));
        }
        Ok(())
    }

    /// `m ^= [a == b]` for two c-bit symbols, leaving `a` and `b` unchanged.
    fn symbol_equal(&mut self, a: &[Qubit], b: &[Qubit], m: Qubit) {
        for (&qa, &qb) in a.iter().zip(b) {
            self.push(Gate::Cx { control: qa, target: qb });
            self.push(Gate::X(qb));
        }
        self.mcx(b, m);
        for (&qa, &qb) in a.iter().zip(b).rev() {
            self.push(Gate::X(qb));
            self.push(Gate::Cx { control: qa, target: qb });
        }
    }

    /// `m ^= [a != code]`.
    fn symbol_differs(&mut self, a: &[Qubit], code: u32, m: Qubit) {
        let c = a.len() as u32;
        // a[0] is the most significant bit
        let zeros: Vec<Qubit> = (0..c).filter(|k| code >> (c - 1 - k) & 1 == 0).map(|k| a[k as usize]).collect();
        for &q in &zeros {
            self.push(Gate::X(q));
        }
        self.mcx(a, m);
        self.push(Gate::X(m));
        for &q in &zeros {
            self.push(Gate::X(q));
        }
    }
}

fn symbol_bits(map: &RegisterMap, reg: &Register, pos: usize) -> Vec<Qubit> {
    let c = map.symbol_width();
    (0..c).rev().map(|bit| map.symbol_qubit(reg, pos, bit)).collect()
}

fn check_length(d: usize, n: usize) -> Result<()> {
    check_range("window length", d, n + 1)
}

fn single(map: &RegisterMap, name: RegName) -> Result<Qubit> {
    let r = map.get(name)?;
    if r.width != 1 {
        return Err(Error::WidthMismatch(format!("register {name} must be one qubit, has {}", r.width)));
    }
    Ok(r.qubit(0))
}

fn and_tree_ancillas(k: usize) -> usize {
    k.saturating_sub(2)
}

/// Control copies needed to swap all `n/2` symbol pairs in one layer.
fn fanout(n: usize, c: u32) -> usize {
    (n / 2) * c as usize
}

pub fn rot_ancillas(n: usize, c: u32) -> usize {
    fanout(n, c).saturating_sub(1)
}

/// `sfc` uses `n` match bits, one array per doubling level and one per
/// extra set bit of `d`, then an OR tree over `n` window bits.
pub fn sfc_ancillas(n: usize, d: usize) -> usize {
    if d == 0 {
        return 0;
    }
    let levels = (usize::BITS - 1 - d.leading_zeros()) as usize;
    let arrays = 1 + levels + d.count_ones() as usize - 1;
    n * arrays + and_tree_ancillas(n)
}

pub fn fpm_ancillas(d: usize) -> usize {
    d + and_tree_ancillas(d)
}

pub fn ipm_ancillas(d: usize, exclude_sentinel: bool) -> usize {
    let k = d / 2 + if exclude_sentinel { d.div_ceil(2) } else { 0 };
    k + and_tree_ancillas(k)
}

/// Ancilla register width that fits every operator of the LCS oracles.
pub fn lcs_ancillas(n: usize, c: u32) -> usize {
    (0..=n)
        .map(|d| sfc_ancillas(n, d).max(fpm_ancillas(d)))
        .max()
        .unwrap_or(0)
        .max(rot_ancillas(n, c))
}

/// Ancilla register width that fits every operator of the LPS oracle.
pub fn lps_ancillas(n: usize, c: u32) -> usize {
    (0..=n).map(|d| ipm_ancillas(d, true)).max().unwrap_or(0).max(rot_ancillas(n, c))
}

/// Controlled cyclic right rotation of `data` by the value of `control`,
/// in whole symbols.
///
/// Bit `b` of the control rotates by `2^b` as two reversal layers of
/// CSWAPs (whole text, then `[0, 2^b)` and `[2^b, n)` side by side). The
/// control bit is first copied onto `n c / 2` qubits with a CX doubling
/// tree so every CSWAP of a layer has its own control.
pub fn build_ctrl_rot(map: &RegisterMap, control: RegName, data: RegName) -> Result<OperatorBuild> {
    let n = map.text_len();
    let c = map.symbol_width();
    let ctrl = *map.get(control)?;
    let data_reg = *map.get(data)?;
    if !matches!(control, RegName::I | RegName::J) || !matches!(data, RegName::X | RegName::Y) {
        return Err(Error::RegisterMismatch(format!("rotation of {data} controlled by {control}")));
    }
    if ctrl.width != ceil_log2(n) {
        return Err(Error::WidthMismatch(format!(
            "control register {control} has {} qubits, expected log2(n) = {}",
            ctrl.width,
            ceil_log2(n)
        )));
    }
    let mut em = Emitter::new(map);
    let copies_needed = fanout(n, c);
    for b in 0..ctrl.width {
        let s = 1usize << b;
        let mark = em.pool.mark();
        let mut copies = vec![ctrl.value_qubit(b)];
        copies.extend(em.pool.alloc(copies_needed.saturating_sub(1))?);
        let fan_from = em.gates.len();
        let mut have = 1;
        while have < copies.len() {
            let step = have.min(copies.len() - have);
            for k in 0..step {
                em.push(Gate::Cx { control: copies[k], target: copies[have + k] });
            }
            have += step;
        }
        let fan_to = em.gates.len();

        let reverse_layer = |em: &mut Emitter, ranges: &[(usize, usize)]| {
            let mut next_copy = 0;
            for &(lo, hi) in ranges {
                for t in 0..(hi - lo) / 2 {
                    let (a, z) = (lo + t, hi - 1 - t);
                    for bit in 0..c {
                        em.push(Gate::Cswap {
                            control: copies[next_copy],
                            a: map.symbol_qubit(&data_reg, a, bit),
                            b: map.symbol_qubit(&data_reg, z, bit),
                        });
                        next_copy += 1;
                    }
                }
            }
        };
        reverse_layer(&mut em, &[(0, n)]);
        reverse_layer(&mut em, &[(0, s), (s, n)]);

        let fan: Vec<Gate> = em.gates[fan_from..fan_to].iter().rev().cloned().collect();
        em.gates.extend(fan);
        em.pool.release(mark);
    }
    Ok(OperatorBuild::finish(map, format!("rot({control}->{data})"), em))
}

/// Emits the match bits `m_t = [x_t == y_t]` for `t < count`.
fn match_bits(em: &mut Emitter, map: &RegisterMap, count: usize) -> Result<Vec<Qubit>> {
    let x = *map.get(RegName::X)?;
    let y = *map.get(RegName::Y)?;
    let m = em.pool.alloc(count)?;
    for (t, &mt) in m.iter().enumerate() {
        em.symbol_equal(&symbol_bits(map, &x, t), &symbol_bits(map, &y, t), mt);
    }
    Ok(m)
}

/// Shared-window test at offset zero: flips `r` iff `x` and `y` agree on
/// some circular window of length `d`.
///
/// Windows are found by doubling: `A_1 = m`,
/// `A_2k[t] = A_k[t] AND A_k[t + k]`, and the binary digits of `d` are
/// chained from the highest down, each step shifted by the length covered
/// so far. An OR tree then folds the `n` window bits into `r`.
pub fn build_sfc(map: &RegisterMap, d: usize) -> Result<OperatorBuild> {
    let n = map.text_len();
    check_length(d, n)?;
    let r = single(map, RegName::R)?;
    let mut em = Emitter::new(map);
    let label = format!("sfc(d={d})");
    if d == 0 {
        em.push(Gate::X(r));
        return Ok(OperatorBuild::finish(map, label, em));
    }
    let top = usize::BITS - 1 - d.leading_zeros();

    let mut powers = vec![match_bits(&mut em, map, n)?];
    for lvl in 0..top {
        let k = 1usize << lvl;
        let prev = powers[lvl as usize].clone();
        let next = em.pool.alloc(n)?;
        // each A_k[t] feeds two gates; even k-blocks first, then odd ones,
        // keeps every half free of shared qubits
        for parity in [0, 1] {
            for t in (0..n).filter(|t| (t / k) % 2 == parity) {
                em.and2(prev[t], prev[(t + k) % n], next[t]);
            }
        }
        powers.push(next);
    }

    let mut window = powers[top as usize].clone();
    let mut covered = 1usize << top;
    for lvl in (0..top).rev() {
        if d >> lvl & 1 == 0 {
            continue;
        }
        let piece = &powers[lvl as usize];
        let next = em.pool.alloc(n)?;
        for t in 0..n {
            em.and2(window[t], piece[(t + covered) % n], next[t]);
        }
        window = next;
        covered += 1 << lvl;
    }
    debug_assert_eq!(covered, d);

    let computed = em.gates.len();
    em.or_tree(&window, r)?;
    em.uncompute_prefix(computed);
    Ok(OperatorBuild::finish(map, label, em))
}

/// Prefix match: flips `r` iff the first `d` symbols of `x` and `y` agree.
pub fn build_fpm(map: &RegisterMap, d: usize) -> Result<OperatorBuild> {
    check_length(d, map.text_len())?;
    let r = single(map, RegName::R)?;
    let mut em = Emitter::new(map);
    let m = match_bits(&mut em, map, d)?;
    let computed = em.gates.len();
    em.and_tree(&m, r)?;
    em.uncompute_prefix(computed);
    Ok(OperatorBuild::finish(map, format!("fpm(d={d})"), em))
}

/// Palindromic prefix: flips `r` iff `x[0..d)` equals its reverse. With
/// `exclude` set, the prefix must also be free of that (sentinel) symbol;
/// checking the first half suffices because the halves are mirror images.
pub fn build_ipm(map: &RegisterMap, d: usize, exclude: Option<Symbol>) -> Result<OperatorBuild> {
    check_length(d, map.text_len())?;
    let r = single(map, RegName::R)?;
    let x = *map.get(RegName::X)?;
    let mut em = Emitter::new(map);
    let mut bits = em.pool.alloc(d / 2)?;
    for (t, &e) in bits.iter().enumerate() {
        em.symbol_equal(&symbol_bits(map, &x, t), &symbol_bits(map, &x, d - 1 - t), e);
    }
    if let Some(sentinel) = exclude {
        let ns = em.pool.alloc(d.div_ceil(2))?;
        for (t, &q) in ns.iter().enumerate() {
            em.symbol_differs(&symbol_bits(map, &x, t), sentinel.0, q);
        }
        bits.extend(ns);
    }
    let computed = em.gates.len();
    em.and_tree(&bits, r)?;
    em.uncompute_prefix(computed);
    Ok(OperatorBuild::finish(map, format!("ipm(d={d})"), em))
}

/// Reflection `2|s><s| - I` about the uniform superposition of `search`.
/// The trailing `X Z X Z` on the first qubit is a global `-1`, so the
/// circuit equals the reflection exactly rather than up to phase.
pub fn build_diffuser(map: &RegisterMap, search: RegName) -> Result<OperatorBuild> {
    let reg = *map.get(search)?;
    let mut em = Emitter::new(map);
    let qs: Vec<Qubit> = reg.qubits().collect();
    if let Some((&target, controls)) = qs.split_last() {
        for &q in &qs {
            em.push(Gate::H(q));
            em.push(Gate::X(q));
        }
        em.push(Gate::Mcz { controls: controls.to_vec(), target });
        for &q in &qs {
            em.push(Gate::X(q));
            em.push(Gate::H(q));
        }
        for g in [Gate::X(qs[0]), Gate::Z(qs[0]), Gate::X(qs[0]), Gate::Z(qs[0])] {
            em.push(g);
        }
    }
    Ok(OperatorBuild::finish(map, format!("diffuser({search})"), em))
}

/// Operators with a classical action on basis states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operator {
    /// Rotation of `data` by the value of `control`; `left` for the inverse.
    Rot { control: RegName, data: RegName, left: bool },
    Sfc { d: usize },
    Fpm { d: usize },
    Ipm { d: usize, exclude: Option<Symbol> },
}

impl Operator {
    pub fn build(&self, map: &RegisterMap) -> Result<OperatorBuild> {
        match *self {
            Operator::Rot { control, data, left } => {
                let b = build_ctrl_rot(map, control, data)?;
                Ok(if left { b.inverse() } else { b })
            }
            Operator::Sfc { d } => build_sfc(map, d),
            Operator::Fpm { d } => build_fpm(map, d),
            Operator::Ipm { d, exclude } => build_ipm(map, d, exclude),
        }
    }

    /// Resource record without gates, for the functional simulation mode.
    pub fn build_functional(&self, map: &RegisterMap) -> Result<OperatorBuild> {
        Ok(self.build(map)?.functional())
    }

    /// Applies the operator's action to a basis state in place.
    pub fn apply_classical(&self, map: &RegisterMap, key: &mut BasisKey) -> Result<()> {
        let n = map.text_len();
        let text = |key: &BasisKey, name| -> Result<Vec<Symbol>> { Ok(key.read_symbols(map, map.get(name)?)) };
        let flip = |key: &mut BasisKey, hit: bool| -> Result<()> {
            if hit {
                key.flip(single(map, RegName::R)?);
            }
            Ok(())
        };
        match *self {
            Operator::Rot { control, data, left } => {
                let v = key.read(map.get(control)?) as usize;
                check_range("rotation", v, n)?;
                let shift = if left { (n - v) % n } else { v };
                let rotated = rotate_symbols(&text(key, data)?, shift)?;
                key.write_symbols(map, map.get(data)?, &rotated)
            }
            Operator::Sfc { d } => {
                let hit = psi(&text(key, RegName::X)?, &text(key, RegName::Y)?, 0, d)?;
                flip(key, hit)
            }
            Operator::Fpm { d } => {
                let hit = phi(&text(key, RegName::X)?, &text(key, RegName::Y)?, 0, 0, d)?;
                flip(key, hit)
            }
            Operator::Ipm { d, exclude } => {
                let x = text(key, RegName::X)?;
                let hit = rho(&x, 0, d)? && exclude.is_none_or(|s| x[..d].iter().all(|&v| v != s));
                flip(key, hit)
            }
        }
    }
}
