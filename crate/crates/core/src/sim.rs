//! Exact sparse statevector simulation.
//!
//! The text registers of the oracle circuits always hold basis states that
//! are functions of the small search registers, so the number of nonzero
//! amplitudes stays at most `2n` even though the circuits span hundreds of
//! qubits. The state is kept as parallel arrays of basis keys (one bit per
//! qubit, packed into `u64` words) and complex amplitudes, with every key
//! distinct.
//!
//! Permutation gates rewrite keys in place; `H` is the only gate that can
//! grow or shrink the support, and it leaves the entries sorted by key.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;

use crate::circuit::{Circuit, Gate, Qubit, RegName, Register, RegisterMap};
use crate::error::{Error, Result};
use crate::strings::Symbol;

/// Amplitudes with magnitude below this are dropped after interference.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// A computational basis state over a register map, one bit per qubit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisKey {
    words: Vec<u64>,
}

impl BasisKey {
    pub fn zeros(width: u32) -> Self {
        Self {
            words: vec![0; words_for(width)],
        }
    }

    pub fn from_words(words: &[u64]) -> Self {
        Self {
            words: words.to_vec(),
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, q: Qubit) -> bool {
        get_bit(&self.words, q)
    }

    pub fn set(&mut self, q: Qubit, value: bool) {
        set_bit(&mut self.words, q, value)
    }

    pub fn flip(&mut self, q: Qubit) {
        flip_bit(&mut self.words, q)
    }

    pub fn read(&self, reg: &Register) -> u64 {
        read_register(&self.words, reg)
    }

    pub fn write(&mut self, reg: &Register, value: u64) -> Result<()> {
        write_register(&mut self.words, reg, value)
    }

    pub fn read_symbols(&self, map: &RegisterMap, reg: &Register) -> Vec<Symbol> {
        read_symbols(&self.words, map, reg)
    }

    pub fn write_symbols(&mut self, map: &RegisterMap, reg: &Register, text: &[Symbol]) -> Result<()> {
        write_symbols(&mut self.words, map, reg, text)
    }
}

fn words_for(width: u32) -> usize {
    (width as usize).div_ceil(64).max(1)
}

#[inline]
fn get_bit(words: &[u64], q: Qubit) -> bool {
    words[q.index() >> 6] >> (q.0 & 63) & 1 == 1
}

#[inline]
fn set_bit(words: &mut [u64], q: Qubit, value: bool) {
    let mask = 1u64 << (q.0 & 63);
    if value {
        words[q.index() >> 6] |= mask;
    } else {
        words[q.index() >> 6] &= !mask;
    }
}

#[inline]
fn flip_bit(words: &mut [u64], q: Qubit) {
    words[q.index() >> 6] ^= 1u64 << (q.0 & 63);
}

/// Value of a register of at most 64 qubits.
pub fn read_register(words: &[u64], reg: &Register) -> u64 {
    debug_assert!(reg.width <= 64);
    (0..reg.width).fold(0u64, |v, bit| v | (get_bit(words, reg.value_qubit(bit)) as u64) << bit)
}

pub fn write_register(words: &mut [u64], reg: &Register, value: u64) -> Result<()> {
    if reg.width < 64 && value >> reg.width != 0 {
        return Err(Error::WidthMismatch(format!(
            "value {value} does not fit register {} of {} qubits",
            reg.name, reg.width
        )));
    }
    for bit in 0..reg.width {
        set_bit(words, reg.value_qubit(bit), value >> bit & 1 == 1);
    }
    Ok(())
}

pub fn read_symbols(words: &[u64], map: &RegisterMap, reg: &Register) -> Vec<Symbol> {
    let c = map.symbol_width();
    (0..map.text_len())
        .map(|pos| {
            Symbol((0..c).fold(0u32, |v, bit| {
                v | (get_bit(words, map.symbol_qubit(reg, pos, bit)) as u32) << bit
            }))
        })
        .collect()
}

pub fn write_symbols(words: &mut [u64], map: &RegisterMap, reg: &Register, text: &[Symbol]) -> Result<()> {
    let c = map.symbol_width();
    if text.len() != map.text_len() {
        return Err(Error::WidthMismatch(format!(
            "text of {} symbols for register {} of {} symbols",
            text.len(),
            reg.name,
            map.text_len()
        )));
    }
    for (pos, s) in text.iter().enumerate() {
        if c < 32 && s.0 >> c != 0 {
            return Err(Error::WidthMismatch(format!("symbol code {} needs more than {c} bits", s.0)));
        }
        for bit in 0..c {
            set_bit(words, map.symbol_qubit(reg, pos, bit), s.0 >> bit & 1 == 1);
        }
    }
    Ok(())
}

/// Result of measuring one register.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementOutcome {
    pub register: RegName,
    pub value: u64,
    /// Born probability of `value` before the collapse.
    pub probability: f64,
}

/// Normalized state stored only on its nonzero support.
#[derive(Clone, Debug)]
pub struct SparseState {
    map: RegisterMap,
    stride: usize,
    keys: Vec<u64>,
    amps: Vec<Complex64>,
}

impl SparseState {
    /// A single basis state with the given register values; every other
    /// qubit is `|0>`.
    pub fn init_basis(map: &RegisterMap, assignments: &[(RegName, u64)]) -> Result<Self> {
        let mut key = BasisKey::zeros(map.width());
        for &(name, value) in assignments {
            key.write(map.get(name)?, value)?;
        }
        Self::from_basis(map, key)
    }

    pub fn from_basis(map: &RegisterMap, key: BasisKey) -> Result<Self> {
        let stride = words_for(map.width());
        if key.words.len() != stride {
            return Err(Error::WidthMismatch(format!(
                "basis key has {} words, map needs {stride}",
                key.words.len()
            )));
        }
        Ok(Self {
            map: map.clone(),
            stride,
            keys: key.words,
            amps: vec![Complex64::new(1.0, 0.0)],
        })
    }

    /// Superposition from explicit entries. Keys must be distinct and the
    /// amplitudes normalized within 1e-9.
    pub fn from_entries(map: &RegisterMap, entries: Vec<(BasisKey, Complex64)>) -> Result<Self> {
        let stride = words_for(map.width());
        let mut sorted = entries;
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidInput("duplicate basis key".into()));
        }
        let mut state = Self {
            map: map.clone(),
            stride,
            keys: Vec::with_capacity(sorted.len() * stride),
            amps: Vec::with_capacity(sorted.len()),
        };
        for (k, a) in sorted {
            if k.words.len() != stride {
                return Err(Error::WidthMismatch("basis key width".into()));
            }
            if a.norm() >= PRUNE_THRESHOLD {
                state.keys.extend_from_slice(&k.words);
                state.amps.push(a);
            }
        }
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("state norm^2 is {norm}, expected 1")));
        }
        Ok(state)
    }

    pub fn map(&self) -> &RegisterMap {
        &self.map
    }

    /// Number of stored (nonzero) amplitudes.
    pub fn support(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[u64], Complex64)> + '_ {
        self.keys.chunks_exact(self.stride).zip(self.amps.iter().copied())
    }

    pub fn amplitude(&self, key: &BasisKey) -> Complex64 {
        self.entries()
            .find(|(k, _)| *k == key.words())
            .map_or(Complex64::new(0.0, 0.0), |(_, a)| a)
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.map().width() != self.map.width() {
            return Err(Error::RegisterMismatch(format!(
                "circuit '{}' spans {} qubits, state spans {}",
                circuit.label(),
                circuit.map().width(),
                self.map.width()
            )));
        }
        for g in circuit.gates() {
            self.apply_unchecked(g);
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.map.width())?;
        self.apply_unchecked(gate);
        Ok(())
    }

    fn apply_unchecked(&mut self, gate: &Gate) {
        let stride = self.stride;
        match gate {
            Gate::H(q) => self.hadamard(*q),
            Gate::X(q) => {
                for k in self.keys.chunks_exact_mut(stride) {
                    flip_bit(k, *q);
                }
            }
            Gate::Z(q) => {
                for (k, a) in self.keys.chunks_exact(stride).zip(self.amps.iter_mut()) {
                    if get_bit(k, *q) {
                        *a = -*a;
                    }
                }
            }
            Gate::Cx { control, target } => {
                for k in self.keys.chunks_exact_mut(stride) {
                    if get_bit(k, *control) {
                        flip_bit(k, *target);
                    }
                }
            }
            Gate::Ccx { controls: [a, b], target } => {
                for k in self.keys.chunks_exact_mut(stride) {
                    if get_bit(k, *a) && get_bit(k, *b) {
                        flip_bit(k, *target);
                    }
                }
            }
            Gate::Mcx { controls, target } => {
                for k in self.keys.chunks_exact_mut(stride) {
                    if controls.iter().all(|c| get_bit(k, *c)) {
                        flip_bit(k, *target);
                    }
                }
            }
            Gate::Mcz { controls, target } => {
                for (k, a) in self.keys.chunks_exact(stride).zip(self.amps.iter_mut()) {
                    if get_bit(k, *target) && controls.iter().all(|c| get_bit(k, *c)) {
                        *a = -*a;
                    }
                }
            }
            Gate::Swap(a, b) => {
                for k in self.keys.chunks_exact_mut(stride) {
                    if get_bit(k, *a) != get_bit(k, *b) {
                        flip_bit(k, *a);
                        flip_bit(k, *b);
                    }
                }
            }
            Gate::Cswap { control, a, b } => {
                for k in self.keys.chunks_exact_mut(stride) {
                    if get_bit(k, *control) && get_bit(k, *a) != get_bit(k, *b) {
                        flip_bit(k, *a);
                        flip_bit(k, *b);
                    }
                }
            }
        }
    }

    fn hadamard(&mut self, q: Qubit) {
        let stride = self.stride;
        let word = q.index() >> 6;
        let mask = 1u64 << (q.0 & 63);
        // pair up entries that differ only in qubit q
        let mut order: Vec<usize> = (0..self.amps.len()).collect();
        let cleared = |i: usize| {
            let k = &self.keys[i * stride..(i + 1) * stride];
            (k.iter().enumerate().map(move |(w, v)| if w == word { v & !mask } else { *v }), k[word] & mask != 0)
        };
        order.sort_by(|&a, &b| cleared(a).0.cmp(cleared(b).0).then(cleared(a).1.cmp(&cleared(b).1)));

        let mut keys = Vec::with_capacity(self.keys.len() * 2);
        let mut amps = Vec::with_capacity(self.amps.len() * 2);
        let zero = Complex64::new(0.0, 0.0);
        let mut idx = 0;
        while idx < order.len() {
            let first = order[idx];
            let mut a0 = zero;
            let mut a1 = zero;
            let mut take = |i: usize| {
                if self.keys[i * stride + word] & mask != 0 {
                    a1 = self.amps[i];
                } else {
                    a0 = self.amps[i];
                }
            };
            take(first);
            idx += 1;
            if idx < order.len() && cleared(order[idx]).0.eq(cleared(first).0) {
                take(order[idx]);
                idx += 1;
            }
            let base = &self.keys[first * stride..(first + 1) * stride];
            for (bit, amp) in [(false, (a0 + a1) * FRAC_1_SQRT_2), (true, (a0 - a1) * FRAC_1_SQRT_2)] {
                if amp.norm() < PRUNE_THRESHOLD {
                    continue;
                }
                let start = keys.len();
                keys.extend_from_slice(base);
                if bit {
                    keys[start + word] |= mask;
                } else {
                    keys[start + word] &= !mask;
                }
                amps.push(amp);
            }
        }
        self.keys = keys;
        self.amps = amps;
    }

    /// Negates the amplitude of every basis state whose values on `regs`
    /// satisfy `predicate`.
    pub fn apply_phase_function(&mut self, regs: &[RegName], predicate: impl Fn(&[u64]) -> bool) -> Result<()> {
        let regs: Vec<Register> = regs.iter().map(|r| self.map.get(*r).copied()).collect::<Result<_>>()?;
        let mut values = vec![0u64; regs.len()];
        for (k, a) in self.keys.chunks_exact(self.stride).zip(self.amps.iter_mut()) {
            for (v, r) in values.iter_mut().zip(&regs) {
                *v = read_register(k, r);
            }
            if predicate(&values) {
                *a = -*a;
            }
        }
        Ok(())
    }

    fn marginal(&self, reg: &Register) -> BTreeMap<u64, f64> {
        let mut probs = BTreeMap::new();
        for (k, a) in self.entries() {
            *probs.entry(read_register(k, reg)).or_insert(0.0) += a.norm_sqr();
        }
        probs
    }

    fn register_for_readout(&self, name: RegName) -> Result<Register> {
        let reg = *self.map.get(name)?;
        if reg.width > 64 {
            return Err(Error::WidthMismatch(format!(
                "register {name} has {} qubits; only registers up to 64 qubits can be read out",
                reg.width
            )));
        }
        Ok(reg)
    }

    /// Samples `reg` by the Born rule and collapses the state onto the
    /// observed value.
    pub fn measure_register(&mut self, name: RegName, rng: &mut impl Rng) -> Result<MeasurementOutcome> {
        let reg = self.register_for_readout(name)?;
        let probs = self.marginal(&reg);
        let total: f64 = probs.values().sum();
        let draw = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for (&v, &p) in &probs {
            acc += p;
            chosen = Some((v, p));
            if draw < acc {
                break;
            }
        }
        let (value, p) = chosen.ok_or_else(|| Error::InvalidInput("empty state".into()))?;
        let scale = 1.0 / p.sqrt();
        let mut keys = Vec::with_capacity(self.keys.len());
        let mut amps = Vec::with_capacity(self.amps.len());
        for (k, a) in self.entries() {
            if read_register(k, &reg) == value {
                keys.extend_from_slice(k);
                amps.push(a * scale);
            }
        }
        self.keys = keys;
        self.amps = amps;
        Ok(MeasurementOutcome {
            register: name,
            value,
            probability: p / total,
        })
    }

    /// Total probability that `reg` holds a value satisfying `predicate`.
    pub fn register_probability(&self, name: RegName, predicate: impl Fn(u64) -> bool) -> Result<f64> {
        let reg = self.register_for_readout(name)?;
        Ok(self
            .entries()
            .filter(|(k, _)| predicate(read_register(k, &reg)))
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Amplitude vector of `reg` when the state factors as
    /// `(sum_v a_v |v>) (x) |rest>`. The phase of `|rest>` is fixed so that
    /// its first nonzero amplitude (smallest key) is real and positive.
    /// Fails if the register is entangled with the rest within 1e-9.
    pub fn register_amplitudes(&self, name: RegName) -> Result<Vec<Complex64>> {
        let reg = self.register_for_readout(name)?;
        if reg.width > 24 {
            return Err(Error::Capacity(format!("register {name} too wide for a dense amplitude vector")));
        }
        let rest_key = |k: &[u64]| {
            let mut w = k.to_vec();
            for q in reg.qubits() {
                set_bit(&mut w, q, false);
            }
            w
        };
        let (pivot, _) = self
            .entries()
            .enumerate()
            .fold((0, -1.0), |best, (i, (_, a))| if a.norm() > best.1 + 1e-12 { (i, a.norm()) } else { best });
        let pivot_value = read_register(&self.keys[pivot * self.stride..(pivot + 1) * self.stride], &reg);
        let mut rest: BTreeMap<Vec<u64>, Complex64> = BTreeMap::new();
        for (k, a) in self.entries() {
            if read_register(k, &reg) == pivot_value {
                rest.insert(rest_key(k), a);
            }
        }
        let norm = rest.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let first = *rest.values().next().ok_or_else(|| Error::InvalidInput("empty state".into()))?;
        let phase = first.conj() / first.norm();
        for a in rest.values_mut() {
            *a = *a * phase / norm;
        }
        let mut out = vec![Complex64::new(0.0, 0.0); 1usize << reg.width];
        for (k, a) in self.entries() {
            if let Some(r) = rest.get(&rest_key(k)) {
                out[read_register(k, &reg) as usize] += r.conj() * a;
            }
        }
        let captured: f64 = out.iter().map(|a| a.norm_sqr()).sum();
        if (captured - self.norm_sqr()).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "register {name} is entangled with the rest of the state (captured {captured})"
            )));
        }
        Ok(out)
    }

    /// One line per entry: hex basis index (most significant word first),
    /// real part, imaginary part.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (k, a) in self.entries() {
            for w in k.iter().rev() {
                let _ = write!(s, "{w:016x}");
            }
            let _ = writeln!(s, " {:.17e} {:.17e}", a.re, a.im);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_map(width: u32) -> RegisterMap {
        RegisterMap::new(0, 1, &[(RegName::J, width)]).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn init_basis_msb_first() {
        let map = small_map(4);
        let s = SparseState::init_basis(&map, &[(RegName::J, 8)]).unwrap();
        assert_eq!(s.support(), 1);
        let (k, a) = s.entries().next().unwrap();
        assert_eq!(a, c(1.0));
        // |8> = |1000>: the first qubit of the register carries the MSB
        assert_eq!(k[0], 0b0001);
        let bits: String = (0..4).map(|q| if get_bit(k, Qubit(q)) { '1' } else { '0' }).collect();
        assert_eq!(bits, "1000");
        let z = SparseState::init_basis(&map, &[(RegName::J, 0)]).unwrap();
        assert_eq!(z.entries().next().unwrap().0, &[0]);
        assert!(SparseState::init_basis(&map, &[(RegName::J, 16)]).is_err());
        assert!(SparseState::init_basis(&map, &[(RegName::X, 0)]).is_err());
    }

    #[test]
    fn single_qubit_gates() {
        let map = small_map(1);
        let mut s = SparseState::init_basis(&map, &[]).unwrap();
        s.apply_gate(&Gate::H(Qubit(0))).unwrap();
        assert_eq!(s.support(), 2);
        for (_, a) in s.entries() {
            assert!((a - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        }
        s.apply_gate(&Gate::H(Qubit(0))).unwrap();
        // interference leaves exactly |0>
        assert_eq!(s.support(), 1);
        assert!((s.amplitude(&BasisKey::zeros(1)) - c(1.0)).norm() < 1e-15);

        let mut x = SparseState::init_basis(&map, &[]).unwrap();
        x.apply_gate(&Gate::X(Qubit(0))).unwrap();
        assert_eq!(x.entries().next().unwrap().0, &[1]);
        assert!(x.apply_gate(&Gate::X(Qubit(1))).is_err());
    }

    #[test]
    fn phase_function_examples() {
        let map = small_map(2);
        let uniform = || {
            let mut s = SparseState::init_basis(&map, &[]).unwrap();
            s.apply_gate(&Gate::H(Qubit(0))).unwrap();
            s.apply_gate(&Gate::H(Qubit(1))).unwrap();
            s
        };
        let mut s = uniform();
        s.apply_phase_function(&[RegName::J], |_| false).unwrap();
        assert_eq!(s.dump(), uniform().dump());

        let mut s = uniform();
        s.apply_phase_function(&[RegName::J], |_| true).unwrap();
        for (_, a) in s.entries() {
            assert!((a - c(-0.5)).norm() < 1e-15);
        }

        let mut s = uniform();
        s.apply_phase_function(&[RegName::J], |v| v[0] == 2).unwrap();
        let amps = s.register_amplitudes(RegName::J).unwrap();
        for (v, a) in amps.iter().enumerate() {
            let expect = if v == 2 { -0.5 } else { 0.5 };
            assert!((a - c(expect)).norm() < 1e-15, "value {v}");
        }
    }

    #[test]
    fn measurement_on_basis_state_is_certain() {
        let map = small_map(3);
        let mut s = SparseState::init_basis(&map, &[(RegName::J, 5)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = s.measure_register(RegName::J, &mut rng).unwrap();
        assert_eq!(m.value, 5);
        assert!((m.probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measurement_is_reproducible_and_normalized() {
        let map = small_map(2);
        let run = |seed| {
            let mut s = SparseState::init_basis(&map, &[]).unwrap();
            s.apply_gate(&Gate::H(Qubit(0))).unwrap();
            s.apply_gate(&Gate::H(Qubit(1))).unwrap();
            let m = s.measure_register(RegName::J, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
            assert!((m.probability - 0.25).abs() < 1e-9);
            m.value
        };
        for seed in 0..8 {
            assert_eq!(run(seed), run(seed));
        }
        let seen: std::collections::BTreeSet<u64> = (0..64).map(run).collect();
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn register_probability_complements() {
        let map = small_map(3);
        let mut s = SparseState::init_basis(&map, &[]).unwrap();
        for q in 0..3 {
            s.apply_gate(&Gate::H(Qubit(q))).unwrap();
        }
        s.apply_gate(&Gate::Ccx { controls: [Qubit(0), Qubit(1)], target: Qubit(2) }).unwrap();
        assert!((s.register_probability(RegName::J, |_| true).unwrap() - 1.0).abs() < 1e-12);
        let p = s.register_probability(RegName::J, |v| v % 3 == 0).unwrap();
        let q = s.register_probability(RegName::J, |v| v % 3 != 0).unwrap();
        assert!((p + q - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entangled_register_has_no_amplitude_vector() {
        let map = RegisterMap::new(0, 1, &[(RegName::J, 1), (RegName::Out, 1)]).unwrap();
        let mut s = SparseState::init_basis(&map, &[]).unwrap();
        s.apply_gate(&Gate::H(Qubit(0))).unwrap();
        s.apply_gate(&Gate::Cx { control: Qubit(0), target: Qubit(1) }).unwrap();
        assert!(s.register_amplitudes(RegName::J).is_err());
    }

    #[test]
    fn text_registers_round_trip() {
        let map = RegisterMap::new(4, 2, &[(RegName::X, 8)]).unwrap();
        let text = [Symbol(0), Symbol(3), Symbol(2), Symbol(1)];
        let mut key = BasisKey::zeros(map.width());
        key.write_symbols(&map, map.get(RegName::X).unwrap(), &text).unwrap();
        assert_eq!(key.read_symbols(&map, map.get(RegName::X).unwrap()), text);
        assert!(key.write_symbols(&map, map.get(RegName::X).unwrap(), &[Symbol(4); 4]).is_err());
    }

    #[test]
    fn from_entries_validates() {
        let map = small_map(1);
        let k0 = BasisKey::zeros(1);
        let mut k1 = BasisKey::zeros(1);
        k1.set(Qubit(0), true);
        assert!(SparseState::from_entries(&map, vec![(k0.clone(), c(1.0)), (k0.clone(), c(0.0))]).is_err());
        assert!(SparseState::from_entries(&map, vec![(k0.clone(), c(0.5))]).is_err());
        let s = SparseState::from_entries(&map, vec![(k1, c(0.6)), (k0, c(0.8))]).unwrap();
        assert_eq!(s.support(), 2);
    }
}
