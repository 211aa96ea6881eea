//! Iterated function systems, address words, orbital branches and the skew product.

use std::fmt;

use super::maps::{Map, MapSpec};
use super::space::{Point, Space};
use super::CoreError;
use crate::sequences::SymbolStream;

/// A 1-based generator index.
pub type Symbol = usize;

/// A finite family of generators acting on one space.
#[derive(Clone, Debug)]
pub struct Ifs {
    space: Space,
    maps: Vec<Map>,
}

impl Ifs {
    pub fn new(space: Space, generators: Vec<MapSpec>) -> Result<Self, CoreError> {
        if generators.is_empty() {
            return Err(CoreError::InvalidIfs("an IFS needs at least one generator".into()));
        }
        let mut maps = Vec::with_capacity(generators.len());
        for (i, g) in generators.into_iter().enumerate() {
            if g.space_kind() != space.kind() {
                return Err(CoreError::InvalidIfs(format!(
                    "generator {} is a {} map but the space is a {}",
                    i + 1,
                    g.space_kind(),
                    space.kind()
                )));
            }
            maps.push(Map::new(g)?);
        }
        Ok(Ifs { space, maps })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    /// Number of generators `k`.
    pub fn k(&self) -> usize {
        self.maps.len()
    }

    pub fn maps(&self) -> &[Map] {
        &self.maps
    }

    pub fn specs(&self) -> impl Iterator<Item = &MapSpec> {
        self.maps.iter().map(Map::spec)
    }

    /// The generator addressed by the 1-based `symbol`.
    pub fn generator(&self, symbol: Symbol) -> Result<&Map, CoreError> {
        symbol
            .checked_sub(1)
            .and_then(|i| self.maps.get(i))
            .ok_or(CoreError::SymbolOutOfRange {
                symbol,
                k: self.maps.len(),
            })
    }

    pub fn apply(&self, symbol: Symbol, x: Point) -> Result<Point, CoreError> {
        self.generator(symbol)?.apply(x)
    }

    pub fn all_invertible(&self) -> bool {
        self.maps.iter().all(Map::is_invertible)
    }

    /// The IFS generated by the inverses of the generators.
    pub fn inverse_specs(&self) -> Option<Vec<MapSpec>> {
        self.specs().map(MapSpec::inverse_spec).collect()
    }
}

/// A finite address word over `{1, …, k}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolWord {
    symbols: Vec<Symbol>,
    k: usize,
}

impl SymbolWord {
    pub fn new(symbols: Vec<Symbol>, k: usize) -> Result<Self, CoreError> {
        if k == 0 {
            return Err(CoreError::InvalidWord("alphabet size must be at least 1".into()));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s == 0 || s > k) {
            return Err(CoreError::SymbolOutOfRange { symbol: s, k });
        }
        Ok(SymbolWord { symbols, k })
    }

    pub fn empty(k: usize) -> Self {
        SymbolWord {
            symbols: Vec::new(),
            k: k.max(1),
        }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn alphabet_size(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &SymbolWord) -> SymbolWord {
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        SymbolWord {
            symbols,
            k: self.k.max(other.k),
        }
    }

    pub fn push(&mut self, s: Symbol) -> Result<(), CoreError> {
        if s == 0 || s > self.k {
            return Err(CoreError::SymbolOutOfRange { symbol: s, k: self.k });
        }
        self.symbols.push(s);
        Ok(())
    }

    pub fn prefix(&self, n: usize) -> SymbolWord {
        SymbolWord {
            symbols: self.symbols[..n.min(self.symbols.len())].to_vec(),
            k: self.k,
        }
    }
}

impl fmt::Display for SymbolWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.symbols.is_empty() {
            return f.write_str("-");
        }
        let sep = if self.k > 9 { "," } else { "" };
        let parts: Vec<String> = self.symbols.iter().map(|s| s.to_string()).collect();
        f.write_str(&parts.join(sep))
    }
}

/// `f_{w_n} ∘ … ∘ f_{w_1}(x)`: the first symbol is applied first.
pub fn orbital_branch(ifs: &Ifs, w: &SymbolWord, x: Point) -> Result<Point, CoreError> {
    w.symbols().iter().try_fold(x, |p, &s| ifs.apply(s, p))
}

/// The first `n` points `f¹_ω(x), …, fⁿ_ω(x)` of the ω-fiberwise orbit.
///
/// The seed itself is not included. Consumes exactly `n` symbols.
pub fn fiberwise_orbit(
    ifs: &Ifs,
    stream: &mut SymbolStream,
    x: Point,
    n: usize,
) -> Result<Vec<Point>, CoreError> {
    let mut out = Vec::with_capacity(n);
    let mut p = x;
    for _ in 0..n {
        let s = stream.next().ok_or(CoreError::StreamExhausted {
            position: stream.cursor(),
        })?;
        p = ifs.apply(s, p)?;
        out.push(p);
    }
    Ok(out)
}

/// A point `(σⁿω, fⁿ_ω(x))` of the one-step skew product.
///
/// The stream cursor is the shifted sequence σⁿω.
#[derive(Clone, Debug)]
pub struct SkewState {
    pub stream: SymbolStream,
    pub point: Point,
}

impl SkewState {
    pub fn new(stream: SymbolStream, point: Point) -> Self {
        SkewState { stream, point }
    }

    pub fn position(&self) -> u64 {
        self.stream.cursor()
    }

    /// Advances in place; returns the consumed symbol.
    pub fn step(&mut self, ifs: &Ifs) -> Result<Symbol, CoreError> {
        let s = self.stream.next().ok_or(CoreError::StreamExhausted {
            position: self.stream.cursor(),
        })?;
        self.point = ifs.apply(s, self.point)?;
        Ok(s)
    }
}

/// `Φ(ω, x) = (σω, f_{ω₁}(x))`.
pub fn skew_step(ifs: &Ifs, st: &SkewState) -> Result<SkewState, CoreError> {
    let mut next = st.clone();
    next.step(ifs)?;
    Ok(next)
}
