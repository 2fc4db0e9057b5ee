//! Boolean oracles for the three window predicates and Grover search over
//! them, with either the gate-level circuits or a phase-function stand-in.

use std::f64::consts::FRAC_PI_4;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateCounts, RegName, RegisterMap};
use crate::error::{Error, Result};
use crate::operators::{build_ctrl_rot, build_diffuser, build_fpm, build_ipm, build_sfc, lcs_ancillas, lps_ancillas};
use crate::sim::SparseState;
use crate::strings::{ceil_log2, phi, psi, rho, rho_in_text, Symbol};

/// Register layout of the LCS circuits. `d` gets `log n + 1` qubits so it
/// can hold `n` itself.
pub fn lcs_map(n: usize, c: u32) -> Result<RegisterMap> {
    let p = ceil_log2(n);
    let w = n as u32 * c;
    RegisterMap::new(
        n,
        c,
        &[
            (RegName::I, p),
            (RegName::J, p),
            (RegName::X, w),
            (RegName::Y, w),
            (RegName::D, p + 1),
            (RegName::R, 1),
            (RegName::Out, 1),
            (RegName::Anc, lcs_ancillas(n, c) as u32),
        ],
    )
}

pub fn lps_map(n: usize, c: u32) -> Result<RegisterMap> {
    let p = ceil_log2(n);
    RegisterMap::new(
        n,
        c,
        &[
            (RegName::I, p),
            (RegName::X, n as u32 * c),
            (RegName::D, p + 1),
            (RegName::R, 1),
            (RegName::Out, 1),
            (RegName::Anc, lps_ancillas(n, c) as u32),
        ],
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Psi,
    Phi,
    Rho,
}

/// A boolean oracle `|.., out> -> |.., out XOR f>` for one window length.
#[derive(Clone, Debug)]
pub struct OracleSpec {
    pub kind: OracleKind,
    pub d: usize,
    pub search: RegName,
    pub circuit: Circuit,
    pub depth: usize,
    pub counts: GateCounts,
    /// Symbol that may not occur in a `rho` window (the padding sentinel).
    pub exclude: Option<Symbol>,
}

impl OracleSpec {
    fn assemble(kind: OracleKind, d: usize, search: RegName, map: &RegisterMap, parts: &[Circuit]) -> Result<Self> {
        let mut circuit = Circuit::new(map.clone(), format!("U_{kind:?}(d={d})").to_lowercase());
        for p in parts {
            circuit.extend(p)?;
        }
        Ok(Self {
            kind,
            d,
            search,
            depth: circuit.depth(),
            counts: circuit.gate_counts(),
            circuit,
            exclude: None,
        })
    }

    /// The oracle's boolean function on explicit texts and positions.
    pub fn predicate(&self, x: &[Symbol], y: &[Symbol], i: usize, j: usize) -> Result<bool> {
        match self.kind {
            OracleKind::Psi => psi(x, y, j, self.d),
            OracleKind::Phi => phi(x, y, i, j, self.d),
            OracleKind::Rho => match self.exclude {
                Some(s) => rho_in_text(x, s, i, self.d),
                None => rho(x, i, self.d),
            },
        }
    }
}

fn copy_out(map: &RegisterMap) -> Result<Circuit> {
    let r = map.get(RegName::R)?.qubit(0);
    let out = map.get(RegName::Out)?.qubit(0);
    Circuit::new(map.clone(), "copy").with_gate(Gate::Cx { control: r, target: out })
}

/// `ROT(j->x); SFC; CX(r->out); SFC^-1; ROT^-1`.
pub fn build_u_psi(map: &RegisterMap, d: usize) -> Result<OracleSpec> {
    let rot = build_ctrl_rot(map, RegName::J, RegName::X)?.circuit;
    let sfc = build_sfc(map, d)?.circuit;
    let parts = [rot.clone(), sfc.clone(), copy_out(map)?, sfc.inverse(), rot.inverse()];
    OracleSpec::assemble(OracleKind::Psi, d, RegName::J, map, &parts)
}

/// Brings `x^j[i..]` and `y[i..]` to the front, matches the prefix of
/// length `d`, and undoes the rotations.
///
/// Rotating right by `j` and then left by `i` puts `x^j[i + t]` at
/// position `t`; `y` is rotated left by `i`. Right rotations by `i` would
/// align the window starting at `n - i` instead.
pub fn build_u_phi(map: &RegisterMap, d: usize) -> Result<OracleSpec> {
    let rot_jx = build_ctrl_rot(map, RegName::J, RegName::X)?.circuit;
    let rot_ix = build_ctrl_rot(map, RegName::I, RegName::X)?.circuit;
    let rot_iy = build_ctrl_rot(map, RegName::I, RegName::Y)?.circuit;
    let fpm = build_fpm(map, d)?.circuit;
    let parts = [
        rot_jx.clone(),
        rot_ix.inverse(),
        rot_iy.inverse(),
        fpm.clone(),
        copy_out(map)?,
        fpm.inverse(),
        rot_iy,
        rot_ix,
        rot_jx.inverse(),
    ];
    OracleSpec::assemble(OracleKind::Phi, d, RegName::I, map, &parts)
}

/// `ROT^-1(i->x); IPM; CX(r->out); IPM^-1; ROT(i->x)`: a left rotation by
/// `i` brings the window starting at `i` to the front. With `exclude`, only
/// windows free of that symbol count.
pub fn build_u_rho(map: &RegisterMap, d: usize, exclude: Option<Symbol>) -> Result<OracleSpec> {
    let rot = build_ctrl_rot(map, RegName::I, RegName::X)?.circuit;
    let ipm = build_ipm(map, d, exclude)?.circuit;
    let parts = [rot.inverse(), ipm.clone(), copy_out(map)?, ipm.inverse(), rot];
    let mut spec = OracleSpec::assemble(OracleKind::Rho, d, RegName::I, map, &parts)?;
    spec.exclude = exclude;
    Ok(spec)
}

/// Puts `out` (in `|0>`) into `|->`, turning boolean oracles into phase
/// oracles.
pub fn prepare_kickback(state: &mut SparseState, out: RegName) -> Result<()> {
    let q = state.map().get(out)?.qubit(0);
    state.apply_gate(&Gate::X(q))?;
    state.apply_gate(&Gate::H(q))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    /// `floor(pi/4 sqrt(N))` iterations, one attempt.
    Fixed,
    /// Iteration counts drawn uniformly below a cap that doubles per
    /// attempt, each attempt followed by a one-call check.
    RandomizedDoubling,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroverConfig {
    pub schedule: Schedule,
    /// Repetitions of the whole iterative test.
    pub restarts: u32,
    /// A randomized phase gives up once its oracle calls reach
    /// `budget * (floor(pi/4 sqrt(N)) + 1)`.
    pub budget: u32,
    pub seed: u64,
}

impl Default for GroverConfig {
    fn default() -> Self {
        Self {
            schedule: Schedule::RandomizedDoubling,
            restarts: 5,
            budget: 6,
            seed: 0,
        }
    }
}

impl GroverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidInput("restarts must be at least 1".into()));
        }
        if self.budget == 0 {
            return Err(Error::InvalidInput("budget must be at least 1".into()));
        }
        Ok(())
    }
}

pub fn fixed_iterations(search_size: usize) -> usize {
    (FRAC_PI_4 * (search_size as f64).sqrt()).floor() as usize
}

/// Something that can prepare the state after `k` Grover iterations.
pub trait Amplifier {
    fn search_register(&self) -> RegName;
    fn search_size(&self) -> usize;
    fn is_marked(&self, value: u64) -> bool;
    fn state_after(&self, k: usize) -> Result<SparseState>;
}

/// Gate-level amplifier: the oracle circuit with `out` in `|->` followed by
/// the diffuser circuit, on the full register map.
pub struct GateAmplifier<'a> {
    prepared: SparseState,
    oracle: &'a OracleSpec,
    diffuser: &'a Circuit,
    marked: Vec<bool>,
}

impl<'a> GateAmplifier<'a> {
    /// `base` holds the texts and every other register as a basis state;
    /// the search register is put into uniform superposition here.
    pub fn new(mut base: SparseState, oracle: &'a OracleSpec, diffuser: &'a Circuit, marked: Vec<bool>) -> Result<Self> {
        let reg = *base.map().get(oracle.search)?;
        if marked.len() != 1usize << reg.width {
            return Err(Error::WidthMismatch("marked table does not cover the search register".into()));
        }
        for q in reg.qubits() {
            base.apply_gate(&Gate::H(q))?;
        }
        prepare_kickback(&mut base, RegName::Out)?;
        Ok(Self {
            prepared: base,
            oracle,
            diffuser,
            marked,
        })
    }
}

impl Amplifier for GateAmplifier<'_> {
    fn search_register(&self) -> RegName {
        self.oracle.search
    }

    fn search_size(&self) -> usize {
        self.marked.len()
    }

    fn is_marked(&self, value: u64) -> bool {
        self.marked[value as usize]
    }

    fn state_after(&self, k: usize) -> Result<SparseState> {
        let mut s = self.prepared.clone();
        for _ in 0..k {
            s.apply_circuit(&self.oracle.circuit)?;
            s.apply_circuit(self.diffuser)?;
        }
        Ok(s)
    }
}

/// Abstract amplifier: only the search register is simulated and the
/// oracle is a phase function over a precomputed truth table.
pub struct PhaseAmplifier {
    map: RegisterMap,
    search: RegName,
    diffuser: Circuit,
    marked: Vec<bool>,
}

impl PhaseAmplifier {
    pub fn new(search: RegName, marked: Vec<bool>) -> Result<Self> {
        let size = marked.len();
        if !size.is_power_of_two() {
            return Err(Error::InvalidInput(format!("search space of {size} values is not a power of two")));
        }
        let map = RegisterMap::new(size, 1, &[(search, ceil_log2(size))])?;
        let diffuser = build_diffuser(&map, search)?.circuit;
        Ok(Self {
            map,
            search,
            diffuser,
            marked,
        })
    }
}

impl Amplifier for PhaseAmplifier {
    fn search_register(&self) -> RegName {
        self.search
    }

    fn search_size(&self) -> usize {
        self.marked.len()
    }

    fn is_marked(&self, value: u64) -> bool {
        self.marked[value as usize]
    }

    fn state_after(&self, k: usize) -> Result<SparseState> {
        let mut s = SparseState::init_basis(&self.map, &[])?;
        for q in self.map.get(self.search)?.qubits() {
            s.apply_gate(&Gate::H(q))?;
        }
        for _ in 0..k {
            s.apply_phase_function(&[self.search], |v| self.marked[v[0] as usize])?;
            s.apply_circuit(&self.diffuser)?;
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub candidate: u64,
    /// Exact probability, before measuring, that the search register held
    /// a marked value.
    pub success_prob: f64,
}

/// `k` iterations, then a measurement of the search register.
pub fn grover_search(amp: &dyn Amplifier, k: usize, rng: &mut impl Rng) -> Result<SearchOutcome> {
    let mut state = amp.state_after(k)?;
    let reg = amp.search_register();
    let success_prob = state.register_probability(reg, |v| amp.is_marked(v))?;
    let m = state.measure_register(reg, rng)?;
    Ok(SearchOutcome {
        candidate: m.value,
        success_prob,
    })
}

/// What one search phase did.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhaseReport {
    /// Accepted candidate, if any.
    pub found: Option<u64>,
    /// Success probability of the last Grover run.
    pub success_prob: f64,
    /// Runs of state preparation + iterations + measurement.
    pub runs: u64,
    /// Oracle-plus-diffuser iterations over all runs.
    pub iterations: u64,
    /// Single oracle applications used to check candidates.
    pub checks: u64,
}

impl PhaseReport {
    pub fn oracle_calls(&self) -> u64 {
        self.iterations + self.checks
    }
}

/// Runs one phase under `schedule`. `check` evaluates the oracle once on a
/// measured candidate; with the fixed schedule it runs only if
/// `check_fixed` is set, otherwise the candidate is passed on unchecked.
pub fn amplify(
    amp: &dyn Amplifier,
    schedule: Schedule,
    budget: u32,
    check_fixed: bool,
    rng: &mut impl Rng,
    mut check: impl FnMut(u64) -> Result<bool>,
) -> Result<PhaseReport> {
    let size = amp.search_size();
    let mut report = PhaseReport::default();
    match schedule {
        Schedule::Fixed => {
            let k = fixed_iterations(size);
            let out = grover_search(amp, k, rng)?;
            report.runs = 1;
            report.iterations = k as u64;
            report.success_prob = out.success_prob;
            report.found = Some(out.candidate);
            if check_fixed {
                report.checks = 1;
                if !check(out.candidate)? {
                    report.found = None;
                }
            }
        }
        Schedule::RandomizedDoubling => {
            let cap = fixed_iterations(size) + 1;
            let limit = budget as u64 * cap as u64;
            let mut window = 1usize;
            while report.oracle_calls() < limit {
                let k = rng.gen_range(0..window);
                let out = grover_search(amp, k, rng)?;
                report.runs += 1;
                report.iterations += k as u64;
                report.checks += 1;
                report.success_prob = out.success_prob;
                if check(out.candidate)? {
                    report.found = Some(out.candidate);
                    break;
                }
                window = (window * 2).min(cap);
            }
        }
    }
    Ok(report)
}
