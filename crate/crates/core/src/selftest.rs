//! Built-in consistency suites: exhaustive oracle checks at `n = 4` and the
//! Grover closed form.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate, RegName, RegisterMap};
use crate::error::Result;
use crate::grover::{build_u_phi, build_u_psi, build_u_rho, grover_search, lcs_map, lps_map, OracleSpec, PhaseAmplifier};
use crate::operators::{build_ctrl_rot, build_sfc};
use crate::sim::{BasisKey, SparseState};
use crate::strings::Symbol;

/// Deliberate corruption for checking that the suites catch faults.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Drops the middle gate of the shared-window matcher.
    Sfc,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of running an oracle on every basis input.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Sweep {
    pub cases: u64,
    /// Cases where `out` differed from the predicate.
    pub wrong: u64,
    /// Cases where some other register (or an amplitude) was disturbed.
    pub dirty: u64,
}

const N: usize = 4;
const C: u32 = 2;

fn all_texts() -> Vec<Vec<Symbol>> {
    let codes = 1u32 << C;
    (0..codes.pow(N as u32))
        .map(|mut v| {
            (0..N)
                .map(|_| {
                    let s = Symbol(v % codes);
                    v /= codes;
                    s
                })
                .collect()
        })
        .collect()
}

fn faulty_psi(map: &RegisterMap, d: usize) -> Result<OracleSpec> {
    let mut spec = build_u_psi(map, d)?;
    let rot = build_ctrl_rot(map, RegName::J, RegName::X)?.circuit;
    let sfc = build_sfc(map, d)?.circuit;
    let mut gates = sfc.gates().to_vec();
    gates.remove(gates.len() / 2);
    let bad = Circuit::from_gates(map.clone(), "sfc-faulty", gates);
    let copy = Circuit::new(map.clone(), "copy").with_gate(Gate::Cx {
        control: map.get(RegName::R)?.qubit(0),
        target: map.get(RegName::Out)?.qubit(0),
    })?;
    let mut c = Circuit::new(map.clone(), "U_psi-faulty");
    for part in [&rot, &bad, &copy, &bad.inverse(), &rot.inverse()] {
        c.extend(part)?;
    }
    spec.circuit = c;
    Ok(spec)
}

/// Runs `oracle` on a superposition of all values of `superposed` (so one
/// simulation covers every basis setting of those registers) and compares
/// each branch with `predicate`.
fn sweep_one(
    oracle: &OracleSpec,
    key: &BasisKey,
    superposed: &[RegName],
    predicate: impl Fn(&BasisKey) -> bool,
    tally: &mut Sweep,
) -> Result<()> {
    let map = oracle.circuit.map();
    let mut s = SparseState::from_basis(map, key.clone())?;
    let mut branches = 1usize;
    for &r in superposed {
        let reg = map.get(r)?;
        for q in reg.qubits() {
            s.apply_gate(&Gate::H(q))?;
        }
        branches <<= reg.width;
    }
    s.apply_circuit(&oracle.circuit)?;
    let amp = 1.0 / (branches as f64).sqrt();
    let out = map.get(RegName::Out)?.qubit(0);
    tally.cases += branches as u64;
    if s.support() != branches {
        tally.dirty += branches as u64;
        return Ok(());
    }
    for (words, a) in s.entries() {
        let mut k = BasisKey::from_words(words);
        let flipped = k.get(out);
        k.set(out, false);
        // restore the input key with the superposed registers zeroed
        let mut input = k.clone();
        for &r in superposed {
            input.write(map.get(r)?, 0)?;
        }
        if input != *key || (a - Complex64::new(amp, 0.0)).norm() >= 1e-12 {
            tally.dirty += 1;
        } else if flipped != predicate(&k) {
            tally.wrong += 1;
        }
    }
    Ok(())
}

/// `U_psi` at `n = 4`, `c = 2`: every `x`, `y`, `j`, `d`.
pub fn sweep_psi(fault: Option<Fault>) -> Result<Sweep> {
    let map = lcs_map(N, C)?;
    let texts = all_texts();
    let (xr, yr, jr) = (*map.get(RegName::X)?, *map.get(RegName::Y)?, *map.get(RegName::J)?);
    let mut tally = Sweep::default();
    for d in 0..=N {
        let oracle = match fault {
            Some(Fault::Sfc) => faulty_psi(&map, d)?,
            None => build_u_psi(&map, d)?,
        };
        for x in &texts {
            for y in &texts {
                let mut key = BasisKey::zeros(map.width());
                key.write_symbols(&map, &xr, x)?;
                key.write_symbols(&map, &yr, y)?;
                key.write(map.get(RegName::D)?, d as u64)?;
                sweep_one(&oracle, &key, &[RegName::J], |k| {
                    crate::strings::psi(x, y, k.read(&jr) as usize, d).unwrap_or(false)
                }, &mut tally)?;
            }
        }
    }
    Ok(tally)
}

/// `U_phi` at `n = 4`, `c = 2`: every `x`, `y`, `i`, `j`, `d`.
pub fn sweep_phi() -> Result<Sweep> {
    let map = lcs_map(N, C)?;
    let texts = all_texts();
    let (xr, yr) = (*map.get(RegName::X)?, *map.get(RegName::Y)?);
    let (ir, jr) = (*map.get(RegName::I)?, *map.get(RegName::J)?);
    let mut tally = Sweep::default();
    for d in 0..=N {
        let oracle = build_u_phi(&map, d)?;
        for x in &texts {
            for y in &texts {
                let mut key = BasisKey::zeros(map.width());
                key.write_symbols(&map, &xr, x)?;
                key.write_symbols(&map, &yr, y)?;
                key.write(map.get(RegName::D)?, d as u64)?;
                sweep_one(&oracle, &key, &[RegName::I, RegName::J], |k| {
                    crate::strings::phi(x, y, k.read(&ir) as usize, k.read(&jr) as usize, d).unwrap_or(false)
                }, &mut tally)?;
            }
        }
    }
    Ok(tally)
}

/// `U_rho` at `n = 4`, `c = 2`: every `x`, `i`, `d`, both with and without
/// the sentinel exclusion (`exclude` is the sentinel code).
pub fn sweep_rho(exclude: Option<Symbol>) -> Result<Sweep> {
    let map = lps_map(N, C)?;
    let texts = all_texts();
    let (xr, ir) = (*map.get(RegName::X)?, *map.get(RegName::I)?);
    let mut tally = Sweep::default();
    for d in 0..=N {
        let oracle = build_u_rho(&map, d, exclude)?;
        for x in &texts {
            let mut key = BasisKey::zeros(map.width());
            key.write_symbols(&map, &xr, x)?;
            key.write(map.get(RegName::D)?, d as u64)?;
            sweep_one(&oracle, &key, &[RegName::I], |k| {
                let i = k.read(&ir) as usize;
                match exclude {
                    Some(s) => crate::strings::rho_in_text(x, s, i, d),
                    None => crate::strings::rho(x, i, d),
                }
                .unwrap_or(false)
            }, &mut tally)?;
        }
    }
    Ok(tally)
}

fn suite(name: &str, sweep: Result<Sweep>) -> SuiteResult {
    match sweep {
        Ok(s) => SuiteResult {
            name: name.into(),
            passed: s.wrong == 0 && s.dirty == 0 && s.cases > 0,
            detail: format!("{} cases, {} wrong, {} disturbed", s.cases, s.wrong, s.dirty),
        },
        Err(e) => SuiteResult {
            name: name.into(),
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn grover_suite() -> SuiteResult {
    let marked: Vec<bool> = (0..16).map(|v| v == 5).collect();
    let run = || -> Result<f64> {
        let amp = PhaseAmplifier::new(RegName::J, marked.clone())?;
        Ok(grover_search(&amp, 3, &mut ChaCha8Rng::seed_from_u64(0))?.success_prob)
    };
    let want = (7.0 * 0.25f64.asin()).sin().powi(2);
    match run() {
        Ok(p) => SuiteResult {
            name: "grover-closed-form".into(),
            passed: (p - want).abs() < 1e-9,
            detail: format!("p = {p:.12}, closed form {want:.12}"),
        },
        Err(e) => SuiteResult {
            name: "grover-closed-form".into(),
            passed: false,
            detail: e.to_string(),
        },
    }
}

/// Runs every suite; `fault` corrupts the matcher used by the `U_psi` suite.
pub fn selftest(fault: Option<Fault>) -> Vec<SuiteResult> {
    vec![
        suite("u_psi-exhaustive-n4", sweep_psi(fault)),
        suite("u_phi-exhaustive-n4", sweep_phi()),
        suite("u_rho-exhaustive-n4", sweep_rho(None)),
        suite("u_rho-sentinel-exhaustive-n4", sweep_rho(Some(Symbol(2)))),
        grover_suite(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fault_is_detected() {
        let bad = sweep_psi(Some(Fault::Sfc)).unwrap();
        assert!(bad.wrong + bad.dirty > 0);
    }

    #[test]
    fn rho_sweeps_pass() {
        for exclude in [None, Some(Symbol(2))] {
            let s = sweep_rho(exclude).unwrap();
            assert_eq!(s.cases, 256 * 4 * 5);
            assert_eq!((s.wrong, s.dirty), (0, 0));
        }
    }

    #[test]
    fn grover_suite_passes() {
        assert!(grover_suite().passed);
    }
}
