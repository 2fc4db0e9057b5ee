//! Classical reference layer.
//!
//! Symbol encoding, sentinel padding, cyclic rotation and exact evaluation of
//! the three window predicates the quantum oracles compute: `psi` (some
//! position shares a window), `phi` (a given position shares a window) and
//! `rho` (a window is palindromic). The brute-force `brute_lcs` and
//! `brute_lps` searches are the ground truth used by the tests and the
//! false-negative recheck in the driver.
//!
//! All windows are circular: position `t` of a window starting at `i` is
//! `(i + t) mod n`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};

/// A symbol code. Codes `0..sigma` are alphabet characters; `sigma` and
/// `sigma + 1` are the two sentinels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Symbol(pub u32);

impl Symbol {
    pub fn code(self) -> u32 {
        self.0
    }
}

/// Which of the two reserved padding characters a text uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sentinel {
    /// `$`, pads the first text.
    Dollar,
    /// `%`, pads the second text.
    Percent,
}

impl Sentinel {
    pub fn as_char(self) -> char {
        match self {
            Sentinel::Dollar => '$',
            Sentinel::Percent => '%',
        }
    }
}

/// A declared input alphabet of `sigma` characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    chars: Vec<char>,
}

impl Alphabet {
    /// Builds an alphabet from its characters, in code order.
    pub fn new(chars: impl IntoIterator<Item = char>) -> Result<Self> {
        let chars: Vec<char> = chars.into_iter().collect();
        if chars.is_empty() {
            return Err(Error::InvalidInput("alphabet must not be empty".into()));
        }
        for (k, ch) in chars.iter().enumerate() {
            if *ch == '$' || *ch == '%' {
                return Err(Error::InvalidInput(format!(
                    "'{ch}' is reserved as a sentinel and cannot be an alphabet character"
                )));
            }
            if chars[..k].contains(ch) {
                return Err(Error::InvalidInput(format!("duplicate alphabet character '{ch}'")));
            }
        }
        Ok(Self { chars })
    }

    /// The alphabet `{0, 1}`.
    pub fn binary() -> Self {
        Self { chars: vec!['0', '1'] }
    }

    /// Smallest alphabet covering every character of `texts`. Texts over
    /// `{0, 1}` get the binary alphabet.
    pub fn infer<'a>(texts: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut chars: Vec<char> = texts.into_iter().flat_map(str::chars).collect();
        chars.sort_unstable();
        chars.dedup();
        if chars.iter().all(|c| *c == '0' || *c == '1') {
            return Ok(Self::binary());
        }
        Self::new(chars)
    }

    /// `sigma`, the number of alphabet characters.
    pub fn size(&self) -> u32 {
        self.chars.len() as u32
    }

    /// Bits per symbol: `ceil(log2(sigma + 2))`, enough for the two sentinels.
    pub fn symbol_width(&self) -> u32 {
        ceil_log2(self.size() as usize + 2)
    }

    pub fn sentinel(&self, which: Sentinel) -> Symbol {
        match which {
            Sentinel::Dollar => Symbol(self.size()),
            Sentinel::Percent => Symbol(self.size() + 1),
        }
    }

    pub fn encode(&self, text: &str) -> Result<Vec<Symbol>> {
        text.chars()
            .map(|ch| {
                self.chars
                    .iter()
                    .position(|c| *c == ch)
                    .map(|k| Symbol(k as u32))
                    .ok_or_else(|| {
                        Error::InvalidInput(format!("character '{ch}' is not in the alphabet"))
                    })
            })
            .collect()
    }

    pub fn decode(&self, symbols: &[Symbol]) -> String {
        symbols
            .iter()
            .map(|s| match s.0 {
                c if c < self.size() => self.chars[c as usize],
                c if c == self.size() => '$',
                c if c == self.size() + 1 => '%',
                _ => '?',
            })
            .collect()
    }

    /// Encodes `text` and pads it with `which`.
    pub fn pad(&self, text: &str, which: Sentinel) -> Result<PaddedText> {
        pad_input(&self.encode(text)?, self.sentinel(which))
    }
}

/// A text padded with one or more trailing sentinels to a power-of-two length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaddedText {
    symbols: Vec<Symbol>,
    raw_len: usize,
    sentinel: Symbol,
}

impl PaddedText {
    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Padded length `n = 2^p`.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn raw_len(&self) -> usize {
        self.raw_len
    }

    /// The exponent `p` with `n = 2^p`.
    pub fn log_len(&self) -> u32 {
        self.len().trailing_zeros()
    }

    pub fn sentinel(&self) -> Symbol {
        self.sentinel
    }

    pub fn raw(&self) -> &[Symbol] {
        &self.symbols[..self.raw_len]
    }
}

impl AsRef<[Symbol]> for PaddedText {
    fn as_ref(&self) -> &[Symbol] {
        &self.symbols
    }
}

/// Position `(i, j, d)`: the length-`d` window at `i` of `x` rotated right by
/// `j` matches the window at `i` of `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchWitness {
    pub i: usize,
    pub j: usize,
    pub d: usize,
}

impl fmt::Display for MatchWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(i={}, j={}, d={})", self.i, self.j, self.d)
    }
}

pub(crate) fn ceil_log2(v: usize) -> u32 {
    if v <= 1 {
        0
    } else {
        usize::BITS - (v - 1).leading_zeros()
    }
}

/// Appends sentinels up to the least power of two strictly greater than the
/// raw length.
pub fn pad_input(raw: &[Symbol], sentinel: Symbol) -> Result<PaddedText> {
    if let Some(pos) = raw.iter().position(|s| *s == sentinel) {
        return Err(Error::InvalidInput(format!(
            "raw text contains the sentinel code {} at position {pos}",
            sentinel.0
        )));
    }
    let n = (raw.len() + 1).next_power_of_two();
    let mut symbols = raw.to_vec();
    symbols.resize(n, sentinel);
    Ok(PaddedText {
        symbols,
        raw_len: raw.len(),
        sentinel,
    })
}

/// Cyclic rightward rotation by `j`: `x[n-j..n-1] . x[0..n-j-1]`.
pub fn rotate(x: &PaddedText, j: usize) -> Result<PaddedText> {
    Ok(PaddedText {
        symbols: rotate_symbols(&x.symbols, j)?,
        raw_len: x.raw_len,
        sentinel: x.sentinel,
    })
}

pub fn rotate_symbols(x: &[Symbol], j: usize) -> Result<Vec<Symbol>> {
    let n = x.len();
    check_range("rotation", j, n.max(1))?;
    let mut out = Vec::with_capacity(n);
    out.extend_from_slice(&x[n - j..]);
    out.extend_from_slice(&x[..n - j]);
    Ok(out)
}

fn check_pair(x: &[Symbol], y: &[Symbol]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "texts have different padded lengths ({} and {})",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

fn check_length(d: usize, n: usize) -> Result<()> {
    if d > n {
        return Err(Error::OutOfRange {
            what: "window length",
            value: d,
            limit: n + 1,
        });
    }
    Ok(())
}

/// Match vector of `x` rotated right by `j` against `y`.
fn match_vector(x: &[Symbol], y: &[Symbol], j: usize) -> Vec<bool> {
    let n = x.len();
    (0..n).map(|t| x[(t + n - j) % n] == y[t]).collect()
}

/// Length of the circular run of `true` starting at each position, capped at `n`.
fn runs_from(m: &[bool]) -> Vec<usize> {
    let n = m.len();
    let Some(miss) = m.iter().position(|b| !b) else {
        return vec![n; n];
    };
    let mut run = vec![0; n];
    let mut acc = 0;
    for step in 0..n {
        let t = (miss + n - step) % n;
        acc = if m[t] { acc + 1 } else { 0 };
        run[t] = acc;
    }
    run
}

/// 1 iff `x` rotated right by `j` and `y` agree on some circular window of
/// length `d`.
pub fn psi(x: &[Symbol], y: &[Symbol], j: usize, d: usize) -> Result<bool> {
    check_pair(x, y)?;
    let n = x.len();
    check_range("rotation", j, n)?;
    check_length(d, n)?;
    if d == 0 {
        return Ok(true);
    }
    Ok(runs_from(&match_vector(x, y, j)).into_iter().any(|r| r >= d))
}

/// 1 iff `x` rotated right by `j` and `y` agree on the circular window
/// `[i, i + d)`.
pub fn phi(x: &[Symbol], y: &[Symbol], i: usize, j: usize, d: usize) -> Result<bool> {
    check_pair(x, y)?;
    let n = x.len();
    check_range("position", i, n)?;
    check_range("rotation", j, n)?;
    check_length(d, n)?;
    Ok((0..d).all(|t| {
        let pos = (i + t) % n;
        x[(pos + n - j) % n] == y[pos]
    }))
}

/// 1 iff the circular window `x[i .. i + d)` equals its reverse.
pub fn rho(x: &[Symbol], i: usize, d: usize) -> Result<bool> {
    let n = x.len();
    check_range("position", i, n)?;
    check_length(d, n)?;
    Ok((0..d / 2).all(|t| x[(i + t) % n] == x[(i + d - 1 - t) % n]))
}

/// `rho` restricted to windows free of `sentinel`. For a padded text these
/// are exactly the palindromes lying inside the raw string, since any
/// circular window that wraps passes through the padding.
pub fn rho_in_text(x: &[Symbol], sentinel: Symbol, i: usize, d: usize) -> Result<bool> {
    let n = x.len();
    Ok(rho(x, i, d)? && (0..d).all(|t| x[(i + t) % n] != sentinel))
}

/// Longest `d` for which some rotation shares a window, with a witness.
/// Ties go to the smallest `j`, then the smallest `i`.
pub fn brute_lcs(x: &PaddedText, y: &PaddedText) -> Result<(usize, MatchWitness)> {
    check_pair(&x.symbols, &y.symbols)?;
    let n = x.len();
    let mut best = MatchWitness { i: 0, j: 0, d: 0 };
    for j in 0..n {
        let runs = runs_from(&match_vector(&x.symbols, &y.symbols, j));
        for (i, &d) in runs.iter().enumerate() {
            if d > best.d {
                best = MatchWitness { i, j, d };
            }
        }
    }
    Ok((best.d, best))
}

/// Longest palindromic window inside the raw text, with its start
/// (smallest start among ties). An empty raw text gives `(0, 0)`.
pub fn brute_lps(x: &PaddedText) -> (usize, usize) {
    let raw = x.raw();
    let len = raw.len();
    let mut best = (0, 0);
    for center in 0..2 * len {
        // centers at symbols (even) and between symbols (odd)
        let (mut lo, mut hi) = (center / 2, center / 2 + center % 2);
        let mut found = None;
        while hi < len && raw[lo] == raw[hi] {
            found = Some((lo, hi));
            if lo == 0 {
                break;
            }
            lo -= 1;
            hi += 1;
        }
        if let Some((s, e)) = found {
            let l = e - s + 1;
            if l > best.0 || (l == best.0 && s < best.1) {
                best = (l, s);
            }
        }
    }
    best
}
