use std::collections::VecDeque;

use super::ChaosError;
use crate::dynamics::{CoreError, Ifs, Point, SymbolWord};
use crate::sequences::SymbolStream;
use crate::setops::{GridSet, SetError};

/// Visited cells of `{1..k}^d × (fiber grid)` along a skew-product orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewDensity {
    pub complete: bool,
    pub visited: usize,
    pub total: usize,
    /// Unvisited `(word, fiber cell center)` pairs, at most `MAX_LISTED_MISSING`.
    pub missing: Vec<(SymbolWord, Point)>,
    pub missing_count: usize,
    pub depth: usize,
    pub eps: f64,
    pub steps: u64,
}

pub const MAX_LISTED_MISSING: usize = 1024;

/// Product density check for the skew product on the whole space.
///
/// Iterates `Φ(ω, x) = (σω, f_{ω₁}(x))` `n` times from `(stream, x)` and marks,
/// after each step, the product cell made of the next `d` symbols of the
/// shifted stream and the `ε`-cell of the fiber point. The fiber grid has
/// resolution `ε`; on the circle that is `⌈1/ε⌉` cells.
pub fn skew_density_check(
    ifs: &Ifs,
    stream: &SymbolStream,
    x: Point,
    depth: usize,
    eps: f64,
    n: u64,
) -> Result<SkewDensity, ChaosError> {
    let fiber = GridSet::full(ifs.space().clone(), eps)?;
    skew_density_check_in(ifs, stream, x, depth, &fiber, n)
}

/// As [`skew_density_check`], with fiber cells taken from `fiber` (for
/// instance an attractor grid).
pub fn skew_density_check_in(
    ifs: &Ifs,
    stream: &SymbolStream,
    x: Point,
    depth: usize,
    fiber: &GridSet,
    n: u64,
) -> Result<SkewDensity, ChaosError> {
    let k = ifs.k();
    let words = k
        .checked_pow(depth as u32)
        .filter(|w| w.checked_mul(fiber.count()).is_some_and(|t| t <= crate::tolerances::DEFAULT_CELL_BUDGET))
        .ok_or_else(|| SetError::Budget("product grid exceeds the cell budget".into()))?;
    let geom = fiber.geometry();
    let cells: Vec<usize> = fiber.cells().collect();
    let mut slot = vec![usize::MAX; geom.cell_count()];
    for (i, &c) in cells.iter().enumerate() {
        slot[c] = i;
    }
    let total = words * cells.len();
    let mut seen = vec![false; total];
    let mut visited = 0;

    let mut s = stream.clone();
    let pull = |s: &mut SymbolStream| {
        s.next().ok_or(CoreError::StreamExhausted { position: s.cursor() })
    };
    let mut ahead: VecDeque<usize> = VecDeque::with_capacity(depth + 1);
    if n > 0 {
        for _ in 0..depth {
            ahead.push_back(pull(&mut s)?);
        }
    }
    let mut p = x;
    for _ in 0..n {
        let sym = match ahead.pop_front() {
            Some(sym) => sym,
            None => pull(&mut s)?,
        };
        if depth > 0 {
            ahead.push_back(pull(&mut s)?);
        }
        p = ifs.apply(sym, p)?;
        let Some(c) = geom.cell_of(&p) else { continue };
        if slot[c] == usize::MAX {
            continue;
        }
        let code = ahead.iter().fold(0usize, |acc, &a| acc * k + a - 1);
        let idx = code * cells.len() + slot[c];
        if !seen[idx] {
            seen[idx] = true;
            visited += 1;
        }
    }

    let missing_count = total - visited;
    let mut missing = Vec::new();
    for idx in (0..total).filter(|&i| !seen[i]).take(MAX_LISTED_MISSING) {
        let (mut code, cell) = (idx / cells.len(), cells[idx % cells.len()]);
        let mut digits = vec![0; depth];
        for d in digits.iter_mut().rev() {
            *d = code % k + 1;
            code /= k;
        }
        missing.push((SymbolWord::new(digits, k)?, geom.center(cell)));
    }
    Ok(SkewDensity {
        complete: missing_count == 0,
        visited,
        total,
        missing,
        missing_count,
        depth,
        eps: geom.h(),
        steps: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{MapSpec, Space};

    #[test]
    fn rotation_fills_product() {
        let ifs = Ifs::new(Space::Circle, vec![MapSpec::rotation(0.618_033_988_7)]).unwrap();
        let s = SymbolStream::champernowne(1).unwrap();
        let r = skew_density_check(&ifs, &s, Point::Circle(0.0), 1, 1.0 / 32.0, 10_000).unwrap();
        assert!(r.complete);
        assert_eq!(r.total, 32);
    }

    #[test]
    fn no_steps_no_visits() {
        let ifs = Ifs::new(Space::Circle, vec![MapSpec::rotation(0.1), MapSpec::rotation(0.2)]).unwrap();
        let s = SymbolStream::champernowne(2).unwrap();
        let r = skew_density_check(&ifs, &s, Point::Circle(0.0), 2, 0.25, 0).unwrap();
        assert!(!r.complete);
        assert_eq!(r.missing_count, 16);
        assert_eq!(r.missing.len(), 16);
    }

    #[test]
    fn lookahead_word_is_the_next_symbols() {
        // the fiber point after the step records the symbols still to come
        let ifs = Ifs::new(Space::Circle, vec![MapSpec::rotation(0.0), MapSpec::rotation(0.5)]).unwrap();
        let w = SymbolWord::new(vec![1, 2, 2, 1], 2).unwrap();
        let s = SymbolStream::explicit(w);
        let r = skew_density_check(&ifs, &s, Point::Circle(0.1), 1, 0.5, 3).unwrap();
        // steps: apply 1 -> 0.1, next 2; apply 2 -> 0.6, next 2; apply 2 -> 0.1, next 1
        assert_eq!(r.visited, 3);
        let missing: Vec<String> = r.missing.iter().map(|(w, p)| format!("{w}@{p}")).collect();
        assert_eq!(missing, vec!["1@0.75"]);
        assert!(skew_density_check(&ifs, &SymbolStream::explicit(SymbolWord::new(vec![1], 2).unwrap()), Point::Circle(0.1), 1, 0.5, 1).is_err());
    }
}
