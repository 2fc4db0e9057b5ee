//! Worst-case resource estimates built from the circuits, without
//! simulating them.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::circuit::{GateCounts, GateKind, RegName};
use crate::driver::Problem;
use crate::error::{Error, Result};
use crate::grover::{build_u_phi, build_u_psi, build_u_rho, fixed_iterations, lcs_map, lps_map, GroverConfig, OracleSpec, Schedule};
use crate::operators::build_diffuser;
use crate::strings::{ceil_log2, Symbol};

/// Binary alphabet: two letters plus two sentinels in two bits.
const SYMBOL_WIDTH: u32 = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceRow {
    pub n: usize,
    pub problem: Problem,
    pub qubits: u64,
    pub gates: BTreeMap<String, u64>,
    pub depth: u64,
    pub oracle_calls: u64,
    /// Power of `log2 n` in the normalization of `ratio`.
    pub log_power: u32,
    /// `depth / (sqrt(n) * log2(n)^log_power)`.
    pub ratio: f64,
}

#[derive(Default)]
struct Tally {
    depth: u64,
    gates: GateCounts,
    calls: u64,
}

impl Tally {
    /// A phase with `iterations` oracle+diffuser rounds and `checks` bare
    /// oracle calls, plus one state preparation.
    fn phase(&mut self, oracle: &OracleSpec, diffuser: (usize, &GateCounts), iterations: u64, checks: u64, width: u32) {
        self.depth += 2 + iterations * (oracle.depth + diffuser.0) as u64 + checks * oracle.depth as u64;
        self.gates.add(GateKind::H, width as u64 + 1);
        self.gates.add(GateKind::X, 1);
        self.gates.merge_scaled(&oracle.counts, iterations + checks);
        self.gates.merge_scaled(diffuser.1, iterations);
        self.calls += iterations + checks;
    }
}

/// Oracle rounds and bare checks a phase can spend at most.
fn phase_limits(cfg: &GroverConfig, n: usize, checked: bool) -> (u64, u64) {
    match cfg.schedule {
        Schedule::Fixed => (fixed_iterations(n) as u64, checked as u64),
        // every call counted as a full round bounds both kinds
        Schedule::RandomizedDoubling => (cfg.budget as u64 * (fixed_iterations(n) as u64 + 1), 0),
    }
}

/// Worst case of a full run at padded length `n` over a binary alphabet:
/// `log n + 1` binary-search iterations, each failing all restarts with
/// every phase spending its whole allowance, at window length `n - 1`
/// (the deepest matcher). An LPS iteration may run a second test at the
/// next length.
pub fn estimate_resources(n: usize, problem: Problem, cfg: &GroverConfig) -> Result<ResourceRow> {
    if !n.is_power_of_two() || n < 2 {
        return Err(Error::InvalidInput(format!("n must be a power of two of at least 2, got {n}")));
    }
    cfg.validate()?;
    let p = ceil_log2(n);
    let d = n - 1;
    let iterations = p as u64 + 1;
    let tests = match problem {
        Problem::Lcs => 1,
        Problem::Lps => 2,
    };
    let repeats = iterations * tests * cfg.restarts as u64;
    let mut one = Tally::default();
    let (qubits, log_power) = match problem {
        Problem::Lcs => {
            let map = lcs_map(n, SYMBOL_WIDTH)?;
            let psi = build_u_psi(&map, d)?;
            let phi = build_u_phi(&map, d)?;
            let dj = build_diffuser(&map, RegName::J)?;
            let di = build_diffuser(&map, RegName::I)?;
            let (it, ck) = phase_limits(cfg, n, false);
            one.phase(&psi, (dj.depth, &dj.circuit.gate_counts()), it, ck, p);
            let (it, ck) = phase_limits(cfg, n, true);
            one.phase(&phi, (di.depth, &di.circuit.gate_counts()), it, ck, p);
            (map.width(), 4)
        }
        Problem::Lps => {
            let map = lps_map(n, SYMBOL_WIDTH)?;
            let rho = build_u_rho(&map, d, Some(Symbol(2)))?;
            let di = build_diffuser(&map, RegName::I)?;
            let (it, ck) = phase_limits(cfg, n, true);
            one.phase(&rho, (di.depth, &di.circuit.gate_counts()), it, ck, p);
            (map.width(), 3)
        }
    };
    let mut gates = GateCounts::default();
    gates.merge_scaled(&one.gates, repeats);
    let depth = one.depth * repeats;
    let norm = (n as f64).sqrt() * (p as f64).powi(log_power as i32);
    Ok(ResourceRow {
        n,
        problem,
        qubits: qubits as u64,
        gates: gates.by_name(),
        depth,
        oracle_calls: one.calls * repeats,
        log_power,
        ratio: depth as f64 / norm,
    })
}

/// Rows for `n = lo, 2 lo, ..., hi`.
pub fn sweep(lo: usize, hi: usize, problem: Problem, cfg: &GroverConfig) -> Result<Vec<ResourceRow>> {
    let mut rows = Vec::new();
    let mut n = lo;
    while n <= hi {
        rows.push(estimate_resources(n, problem, cfg)?);
        n *= 2;
    }
    Ok(rows)
}

/// CSV with one column per gate kind, in a fixed order.
pub fn write_csv(rows: &[ResourceRow], out: impl Write) -> Result<()> {
    let err = |e: csv::Error| Error::Parse(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["n", "problem", "qubits", "depth", "oracle_calls", "log_power", "ratio"];
    header.extend(GateKind::ALL.iter().map(|k| k.name()));
    w.write_record(&header).map_err(err)?;
    for r in rows {
        let mut rec = vec![
            r.n.to_string(),
            serde_json::to_value(r.problem).map_err(|e| Error::Parse(e.to_string()))?.as_str().unwrap_or("").to_string(),
            r.qubits.to_string(),
            r.depth.to_string(),
            r.oracle_calls.to_string(),
            r.log_power.to_string(),
            format!("{:.6}", r.ratio),
        ];
        rec.extend(GateKind::ALL.iter().map(|k| r.gates.get(k.name()).copied().unwrap_or(0).to_string()));
        w.write_record(&rec).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

/// Largest over smallest normalized depth.
pub fn ratio_spread(rows: &[ResourceRow]) -> f64 {
    let max = rows.iter().map(|r| r.ratio).fold(f64::MIN, f64::max);
    let min = rows.iter().map(|r| r.ratio).fold(f64::MAX, f64::min);
    max / min
}
