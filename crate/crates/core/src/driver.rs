//! Binary search over the window length with the iterative quantum test.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::circuit::{Circuit, GateCounts, GateKind, RegName, RegisterMap};
use crate::error::{Error, Result};
use crate::grover::{
    amplify, build_u_phi, build_u_psi, build_u_rho, lcs_map, lps_map, Amplifier, GateAmplifier, GroverConfig,
    OracleSpec, PhaseAmplifier, PhaseReport, Schedule,
};
use crate::operators::build_diffuser;
use crate::sim::{BasisKey, SparseState};
use crate::strings::{brute_lcs, brute_lps, Alphabet, MatchWitness, PaddedText, Sentinel};

/// Largest padded length simulated gate by gate.
pub const GATE_MODE_MAX_N: usize = 16;
/// Largest padded length accepted in abstract mode.
pub const ABSTRACT_MODE_MAX_N: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Full oracle circuits on the sparse state.
    Gate,
    /// Search register only, oracles as phase functions.
    Abstract,
    /// Brute force, no quantum simulation.
    Classical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Lcs,
    Lps,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub grover: GroverConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Gate,
            grover: GroverConfig::default(),
        }
    }
}

/// Result of the iterative test at one window length.
#[derive(Clone, Debug, PartialEq)]
pub struct TestOutcome {
    pub verified: bool,
    pub witness: Option<MatchWitness>,
    /// Exact success probability of the last search-phase run.
    pub search_success_prob: Option<f64>,
    /// Same for the verification phase (LCS only).
    pub verify_success_prob: Option<f64>,
    /// Restarts of the whole test that were started.
    pub restarts: u32,
    pub usage: Usage,
}

/// Oracle calls and the circuit cost of everything run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Usage {
    pub oracle_calls: u64,
    pub depth: u64,
    pub gates: GateCounts,
}

impl Usage {
    fn charge(&mut self, depth: usize, gates: &GateCounts, times: u64) {
        self.depth += depth as u64 * times;
        self.gates.merge_scaled(gates, times);
    }

    fn merge(&mut self, other: &Usage) {
        self.oracle_calls += other.oracle_calls;
        self.depth += other.depth;
        self.gates.merge(&other.gates);
    }

    /// Cost of a phase: state preparations, iterations and checks.
    fn charge_phase(&mut self, phase: &PhaseReport, oracle: &OracleSpec, diffuser: &Cost, search_width: u32) {
        let mut prep = GateCounts::default();
        prep.add(GateKind::H, search_width as u64 + 1);
        prep.add(GateKind::X, 1);
        self.charge(2, &prep, phase.runs);
        self.charge(oracle.depth + diffuser.depth, &oracle.counts, phase.iterations);
        self.charge(0, &diffuser.gates, phase.iterations);
        self.charge(oracle.depth, &oracle.counts, phase.checks);
        self.oracle_calls += phase.oracle_calls();
    }
}

struct Cost {
    depth: usize,
    gates: GateCounts,
}

fn diffuser_cost(map: &RegisterMap, reg: RegName) -> Result<Cost> {
    let b = build_diffuser(map, reg)?;
    Ok(Cost {
        depth: b.depth,
        gates: b.circuit.gate_counts(),
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for a node of the randomness tree: the run seed, then e.g.
/// (binary-search iteration, restart, phase).
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(seed), |s, &p| splitmix64(s ^ splitmix64(p)))
}

const SEARCH_PHASE: u64 = 0;
const VERIFY_PHASE: u64 = 1;

fn check_capacity(n: usize, mode: Mode) -> Result<()> {
    match mode {
        Mode::Gate if n > GATE_MODE_MAX_N => Err(Error::Capacity(format!(
            "padded length {n} exceeds the gate-mode limit of {GATE_MODE_MAX_N}; use --mode abstract"
        ))),
        Mode::Abstract if n > ABSTRACT_MODE_MAX_N => Err(Error::Capacity(format!(
            "padded length {n} exceeds the abstract-mode limit of {ABSTRACT_MODE_MAX_N}; use --mode classical"
        ))),
        _ => Ok(()),
    }
}

/// Symbol width for an alphabet whose first sentinel has code `sentinel`
/// (both sentinels follow the alphabet).
fn symbol_width(sentinel: u32) -> u32 {
    crate::strings::ceil_log2(sentinel as usize + 2)
}

fn text_key(map: &RegisterMap, x: &PaddedText, y: Option<&PaddedText>, regs: &[(RegName, u64)]) -> Result<BasisKey> {
    let mut key = BasisKey::zeros(map.width());
    key.write_symbols(map, map.get(RegName::X)?, x.symbols())?;
    if let Some(y) = y {
        key.write_symbols(map, map.get(RegName::Y)?, y.symbols())?;
    }
    for &(r, v) in regs {
        key.write(map.get(r)?, v)?;
    }
    Ok(key)
}

/// One application of a boolean oracle to a basis state, then a
/// measurement of `out`.
fn run_check(oracle: &OracleSpec, key: BasisKey, rng: &mut ChaCha8Rng) -> Result<bool> {
    let mut s = SparseState::from_basis(oracle.circuit.map(), key)?;
    s.apply_circuit(&oracle.circuit)?;
    Ok(s.measure_register(RegName::Out, rng)?.value == 1)
}

/// Runs a phase in the requested mode. `key` is the basis state of every
/// register except the search register and `out`.
#[allow(clippy::too_many_arguments)]
fn run_phase(
    mode: Mode,
    oracle: &OracleSpec,
    diffuser: &Circuit,
    key: &BasisKey,
    marked: Vec<bool>,
    cfg: &GroverConfig,
    check_fixed: bool,
    rng: &mut ChaCha8Rng,
) -> Result<PhaseReport> {
    let map = oracle.circuit.map();
    let search = *map.get(oracle.search)?;
    let basis_with = |v: u64| -> Result<BasisKey> {
        let mut k = key.clone();
        k.write(&search, v)?;
        Ok(k)
    };
    let amp: Box<dyn Amplifier + '_> = match mode {
        Mode::Gate => Box::new(GateAmplifier::new(
            SparseState::from_basis(map, key.clone())?,
            oracle,
            diffuser,
            marked.clone(),
        )?),
        _ => Box::new(PhaseAmplifier::new(oracle.search, marked.clone())?),
    };
    // the check rng is separate so both modes consume the search stream alike
    let mut check_rng = ChaCha8Rng::seed_from_u64(rand::Rng::gen(rng));
    amplify(amp.as_ref(), cfg.schedule, cfg.budget, check_fixed, rng, |v| match mode {
        Mode::Gate => run_check(oracle, basis_with(v)?, &mut check_rng),
        _ => Ok(marked[v as usize]),
    })
}

struct LcsCircuits {
    map: RegisterMap,
    psi: OracleSpec,
    phi: OracleSpec,
    diff_j: Circuit,
    diff_i: Circuit,
    cost_j: Cost,
    cost_i: Cost,
}

impl LcsCircuits {
    fn new(n: usize, c: u32, d: usize) -> Result<Self> {
        let map = lcs_map(n, c)?;
        let diff_j = build_diffuser(&map, RegName::J)?.circuit;
        let diff_i = build_diffuser(&map, RegName::I)?.circuit;
        Ok(Self {
            psi: build_u_psi(&map, d)?,
            phi: build_u_phi(&map, d)?,
            cost_j: diffuser_cost(&map, RegName::J)?,
            cost_i: diffuser_cost(&map, RegName::I)?,
            diff_j,
            diff_i,
            map,
        })
    }
}

fn classical_lcs_test(x: &PaddedText, y: &PaddedText, d: usize) -> Result<TestOutcome> {
    let n = x.len();
    for j in 0..n {
        for i in 0..n {
            if crate::strings::phi(x.symbols(), y.symbols(), i, j, d)? {
                return Ok(TestOutcome {
                    verified: true,
                    witness: Some(MatchWitness { i, j, d }),
                    search_success_prob: None,
                    verify_success_prob: None,
                    restarts: 0,
                    usage: Usage::default(),
                });
            }
        }
    }
    Ok(TestOutcome {
        verified: false,
        witness: None,
        search_success_prob: None,
        verify_success_prob: None,
        restarts: 0,
        usage: Usage::default(),
    })
}

/// The three-phase test at length `d`: Grover over `j` with `U_psi`,
/// Grover over `i` with `U_phi` at the measured `j`, and a final `U_phi`
/// check of `(i, j)`; repeated up to `cfg.restarts` times.
pub fn quantum_test_lcs(x: &PaddedText, y: &PaddedText, d: usize, mode: Mode, cfg: &GroverConfig) -> Result<TestOutcome> {
    cfg.validate()?;
    let n = x.len();
    if y.len() != n {
        return Err(Error::InvalidInput("texts have different padded lengths".into()));
    }
    crate::error::check_range("window length", d, n + 1)?;
    check_capacity(n, mode)?;
    if mode == Mode::Classical {
        return classical_lcs_test(x, y, d);
    }
    let c = symbol_width(x.sentinel().0.min(y.sentinel().0));
    let circ = LcsCircuits::new(n, c, d)?;
    let width = circ.map.get(RegName::J)?.width;
    let (xs, ys) = (x.symbols(), y.symbols());
    let base = text_key(&circ.map, x, Some(y), &[(RegName::D, d as u64)])?;

    let mut outcome = TestOutcome {
        verified: false,
        witness: None,
        search_success_prob: None,
        verify_success_prob: None,
        restarts: 0,
        usage: Usage::default(),
    };
    for restart in 0..cfg.restarts as u64 {
        outcome.restarts += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[restart, SEARCH_PHASE]));
        let marked_j = (0..n).map(|j| crate::strings::psi(xs, ys, j, d)).collect::<Result<Vec<_>>>()?;
        let search = run_phase(mode, &circ.psi, &circ.diff_j, &base, marked_j, cfg, false, &mut rng)?;
        outcome.usage.charge_phase(&search, &circ.psi, &circ.cost_j, width);
        outcome.search_success_prob = Some(search.success_prob);
        let Some(j) = search.found else { continue };

        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[restart, VERIFY_PHASE]));
        let mut key = base.clone();
        key.write(circ.map.get(RegName::J)?, j)?;
        let marked_i = (0..n)
            .map(|i| crate::strings::phi(xs, ys, i, j as usize, d))
            .collect::<Result<Vec<_>>>()?;
        let verify = run_phase(mode, &circ.phi, &circ.diff_i, &key, marked_i, cfg, true, &mut rng)?;
        outcome.usage.charge_phase(&verify, &circ.phi, &circ.cost_i, width);
        outcome.verify_success_prob = Some(verify.success_prob);
        if let Some(i) = verify.found {
            let w = MatchWitness { i: i as usize, j: j as usize, d };
            if !crate::strings::phi(xs, ys, w.i, w.j, d)? {
                return Err(Error::InvalidInput(format!("final check accepted a non-witness {w}")));
            }
            outcome.verified = true;
            outcome.witness = Some(w);
            break;
        }
    }
    Ok(outcome)
}

/// Two-phase palindrome test at length `d`: Grover over `i` with `U_rho`,
/// then one `U_rho` application at the measured `i`.
pub fn quantum_test_lps(x: &PaddedText, d: usize, mode: Mode, cfg: &GroverConfig) -> Result<TestOutcome> {
    cfg.validate()?;
    let n = x.len();
    crate::error::check_range("window length", d, n + 1)?;
    check_capacity(n, mode)?;
    let sentinel = x.sentinel();
    let xs = x.symbols();
    let marked = (0..n)
        .map(|i| crate::strings::rho_in_text(xs, sentinel, i, d))
        .collect::<Result<Vec<_>>>()?;
    let mut outcome = TestOutcome {
        verified: false,
        witness: None,
        search_success_prob: None,
        verify_success_prob: None,
        restarts: 0,
        usage: Usage::default(),
    };
    if mode == Mode::Classical {
        if let Some(i) = marked.iter().position(|&m| m) {
            outcome.verified = true;
            outcome.witness = Some(MatchWitness { i, j: 0, d });
        }
        return Ok(outcome);
    }
    let c = symbol_width(sentinel.0);
    let map = lps_map(n, c)?;
    let rho = build_u_rho(&map, d, Some(sentinel))?;
    let diff = build_diffuser(&map, RegName::I)?.circuit;
    let cost = diffuser_cost(&map, RegName::I)?;
    let width = map.get(RegName::I)?.width;
    let base = text_key(&map, x, None, &[(RegName::D, d as u64)])?;
    for restart in 0..cfg.restarts as u64 {
        outcome.restarts += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[restart, SEARCH_PHASE]));
        let phase = run_phase(mode, &rho, &diff, &base, marked.clone(), cfg, true, &mut rng)?;
        outcome.usage.charge_phase(&phase, &rho, &cost, width);
        outcome.search_success_prob = Some(phase.success_prob);
        if let Some(i) = phase.found {
            if !marked[i as usize] {
                return Err(Error::InvalidInput(format!("final check accepted a non-palindrome at {i}")));
            }
            outcome.verified = true;
            outcome.witness = Some(MatchWitness { i: i as usize, j: 0, d });
            break;
        }
    }
    Ok(outcome)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x_pos: usize,
    pub y_pos: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub l: usize,
    pub r: usize,
    pub d: usize,
    pub verified: bool,
    pub search_success_prob: Option<f64>,
    pub verify_success_prob: Option<f64>,
    pub restarts: u32,
    /// A solution of length `d` exists but the test did not verify one.
    pub false_negative: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Resources {
    pub qubits: u64,
    pub depth: u64,
    pub gates: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub problem: Problem,
    pub n: usize,
    pub raw_len: usize,
    pub answer: usize,
    pub witness: Option<Witness>,
    pub iterations: Vec<IterationRecord>,
    pub resources: Resources,
    pub oracle_calls: u64,
    pub seed: u64,
    pub mode: Mode,
    pub schedule: Schedule,
}

impl RunReport {
    pub fn has_false_negative(&self) -> bool {
        self.iterations.iter().any(|it| it.false_negative)
    }
}

/// Max-true binary search on `[0, n]` with the ceiling midpoint, so a
/// success always moves `l` up. `test(d, r, iteration)` may verify a
/// longer length than `d` (never beyond `r`); `l` jumps to the witness.
fn binary_search(
    n: usize,
    best: usize,
    mut test: impl FnMut(usize, usize, u64) -> Result<TestOutcome>,
) -> Result<(usize, Option<MatchWitness>, Vec<IterationRecord>, Usage)> {
    let (mut l, mut r) = (0, n);
    let mut witness = None;
    let mut trace = Vec::new();
    let mut usage = Usage::default();
    while l < r {
        let d = (l + r).div_ceil(2);
        let out = test(d, r, trace.len() as u64)?;
        usage.merge(&out.usage);
        trace.push(IterationRecord {
            l,
            r,
            d,
            verified: out.verified,
            search_success_prob: out.search_success_prob,
            verify_success_prob: out.verify_success_prob,
            restarts: out.restarts,
            false_negative: !out.verified && d <= best,
        });
        if out.verified {
            l = out.witness.map_or(d, |w| w.d.clamp(d, r));
            witness = out.witness;
        } else {
            r = d - 1;
        }
    }
    Ok((l, witness, trace, usage))
}

fn resources(qubits: u32, usage: &Usage, mode: Mode) -> Resources {
    if mode == Mode::Classical {
        return Resources::default();
    }
    Resources {
        qubits: qubits as u64,
        depth: usage.depth,
        gates: usage.gates.by_name(),
    }
}

/// Longest common substring of two equal-length strings.
pub fn lcs(x_raw: &str, y_raw: &str, cfg: &RunConfig) -> Result<RunReport> {
    cfg.grover.validate()?;
    let (xl, yl) = (x_raw.chars().count(), y_raw.chars().count());
    if xl != yl {
        return Err(Error::InvalidInput(format!("strings must have equal length, got {xl} and {yl}")));
    }
    let alphabet = Alphabet::infer([x_raw, y_raw])?;
    let x = alphabet.pad(x_raw, Sentinel::Dollar)?;
    let y = alphabet.pad(y_raw, Sentinel::Percent)?;
    let n = x.len();
    check_capacity(n, cfg.mode)?;
    let (best, _) = brute_lcs(&x, &y)?;
    let (answer, found, iterations, usage) = binary_search(n, best, |d, _, iter| {
        let g = GroverConfig {
            seed: derive_seed(cfg.grover.seed, &[iter]),
            ..cfg.grover.clone()
        };
        quantum_test_lcs(&x, &y, d, cfg.mode, &g)
    })?;
    let witness = found.map(|w| {
        let x_pos = (w.i + n - w.j) % n;
        debug_assert!(x_pos + w.d <= xl && w.i + w.d <= yl);
        Witness {
            x_pos,
            y_pos: Some(w.i),
        }
    });
    let qubits = lcs_map(n, alphabet.symbol_width())?.width();
    Ok(RunReport {
        problem: Problem::Lcs,
        n,
        raw_len: xl,
        answer,
        witness,
        iterations,
        resources: resources(qubits, &usage, cfg.mode),
        oracle_calls: if cfg.mode == Mode::Classical { 0 } else { usage.oracle_calls },
        seed: cfg.grover.seed,
        mode: cfg.mode,
        schedule: cfg.grover.schedule,
    })
}

/// Longest palindromic substring.
pub fn lps(x_raw: &str, cfg: &RunConfig) -> Result<RunReport> {
    cfg.grover.validate()?;
    let alphabet = Alphabet::infer([x_raw])?;
    let x = alphabet.pad(x_raw, Sentinel::Dollar)?;
    let n = x.len();
    check_capacity(n, cfg.mode)?;
    let (best, _) = brute_lps(&x);
    // Palindromes only shrink two at a time ("010" has none of length 2),
    // so each iteration asks for length d or d + 1, which is monotone in d.
    let (answer, found, iterations, usage) = binary_search(n, best, |d, r, iter| {
        let g = GroverConfig {
            seed: derive_seed(cfg.grover.seed, &[iter]),
            ..cfg.grover.clone()
        };
        let first = quantum_test_lps(&x, d, cfg.mode, &g)?;
        if first.verified || d + 1 > r {
            return Ok(first);
        }
        let g = GroverConfig {
            seed: derive_seed(cfg.grover.seed, &[iter, 1]),
            ..g
        };
        let mut second = quantum_test_lps(&x, d + 1, cfg.mode, &g)?;
        second.restarts += first.restarts;
        second.usage.merge(&first.usage);
        Ok(second)
    })?;
    let qubits = lps_map(n, alphabet.symbol_width())?.width();
    Ok(RunReport {
        problem: Problem::Lps,
        n,
        raw_len: x.raw_len(),
        answer,
        witness: found.map(|w| Witness { x_pos: w.i, y_pos: None }),
        iterations,
        resources: resources(qubits, &usage, cfg.mode),
        oracle_calls: if cfg.mode == Mode::Classical { 0 } else { usage.oracle_calls },
        seed: cfg.grover.seed,
        mode: cfg.mode,
        schedule: cfg.grover.schedule,
    })
}
