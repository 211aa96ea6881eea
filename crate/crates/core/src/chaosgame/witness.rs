use super::ChaosError;
use crate::dynamics::{Ifs, Point, Symbol};
use crate::sequences::SymbolStream;
use crate::setops::{distance_field, hutchinson_step, map_preimage, GridSet, Stamping};

/// A point whose fiberwise orbit along a given address prefix never leaves
/// a proper backward-invariant set `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct TheoremBWitness {
    /// `f⁻¹_{ω₁} ∘ … ∘ f⁻¹_{ωₙ}(K)`, outer-approximated.
    pub k_n: GridSet,
    pub x: Point,
    /// `[f¹_ω(x), …, fⁿ_ω(x)]`.
    pub trace: Vec<Point>,
    pub symbols: Vec<Symbol>,
    /// Whether every trace point lies in the one-cell dilation of `K`.
    pub stays_in_k: bool,
    /// Whether `x` lies in `k_n`.
    pub x_in_k_n: bool,
    /// Largest distance between the trace and plain forward iteration of `x`.
    pub forward_defect: f64,
    /// First step at which plain forward iteration of `x` leaves the dilated
    /// `K`, if it does. Forward iteration of points near a repeller amplifies
    /// rounding, so this is informative only.
    pub forward_escape: Option<usize>,
}

/// Whether `K` passes the one-step check for backward invariance: the outer
/// image of its complement stays inside the one-cell dilation of the
/// complement, so `Kᶜ` is forward invariant at the grid's resolution.
pub fn accepts_backward_invariant(ifs: &Ifs, k: &GridSet) -> Result<bool, ChaosError> {
    let u = k.complement();
    if u.is_empty() || k.is_empty() {
        return Ok(false);
    }
    Ok(hutchinson_step(ifs, &u)?.is_subset(&u.dilate(1))?)
}

/// Builds the witness of the nested-preimage argument along the first `n`
/// symbols of (a clone of) `stream`.
///
/// Picks `y` at the center of the cell of `K` farthest from `Kᶜ` and sets
/// `x = f⁻¹_{ω₁} ∘ … ∘ f⁻¹_{ωₙ}(y)`, so that `fⁿ_ω(x) = y`. The orbit of `x` is
/// recovered from the same backward chain, which is numerically stable.
pub fn theorem_b_witness(
    ifs: &Ifs,
    k: &GridSet,
    stream: &SymbolStream,
    n: usize,
) -> Result<TheoremBWitness, ChaosError> {
    if k.is_empty() || k.is_full() {
        return Err(ChaosError::Precondition("K must be proper and nonempty".into()));
    }
    if k.space() != ifs.space() {
        return Err(ChaosError::Precondition("K lives on a different space".into()));
    }
    if !ifs.all_invertible() {
        return Err(ChaosError::Precondition("every generator must be invertible".into()));
    }
    let mut s = stream.clone();
    let symbols: Vec<Symbol> = s.take_word(n)?.symbols().to_vec();

    let mut k_n = k.clone();
    for &sym in symbols.iter().rev() {
        k_n = map_preimage(ifs.generator(sym)?, &k_n, Stamping::Outer)?;
        if k_n.is_empty() {
            return Err(ChaosError::EmptyWitness);
        }
    }

    let depth = distance_field(&k.complement())?;
    let deepest = k
        .cells()
        .max_by(|&a, &b| depth[a].total_cmp(&depth[b]))
        .expect("K is nonempty");
    let y = k.geometry().center(deepest);

    // chain[j] = f⁻¹_{ω_{j+1}} ∘ … ∘ f⁻¹_{ωₙ}(y) = fʲ_ω(x)
    let mut chain = vec![y; n + 1];
    for j in (0..n).rev() {
        chain[j] = ifs.generator(symbols[j])?.inverse(chain[j + 1])?;
    }
    let x = chain[0];
    let trace = chain[1..].to_vec();

    let dilated = k.dilate(1);
    let stays_in_k = trace.iter().all(|p| dilated.contains_point(p));
    let x_in_k_n = k_n.contains_point(&x);

    let space = ifs.space();
    let mut forward_defect: f64 = 0.0;
    let mut forward_escape = None;
    let mut p = x;
    for (j, (&sym, q)) in symbols.iter().zip(&trace).enumerate() {
        p = ifs.apply(sym, p)?;
        forward_defect = forward_defect.max(space.distance(&p, q)?);
        if forward_escape.is_none() && !dilated.contains_point(&p) {
            forward_escape = Some(j + 1);
        }
    }

    Ok(TheoremBWitness {
        k_n,
        x,
        trace,
        symbols,
        stays_in_k,
        x_in_k_n,
        forward_defect,
        forward_escape,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{MapSpec, Space};

    fn f_and_f2() -> Ifs {
        Ifs::new(
            Space::Circle,
            vec![MapSpec::moebius(0.0, 0.5, 0.5), MapSpec::moebius(0.0, 0.5, 0.25)],
        )
        .unwrap()
    }

    fn k_away_from_zero(h: f64) -> GridSet {
        let mut k = GridSet::full(Space::Circle, h).unwrap();
        let geom = k.geometry().clone();
        for c in 0..geom.cell_count() {
            let t = geom.center(c).as_circle().unwrap();
            if !(0.1..=0.9).contains(&t) {
                k.remove(c);
            }
        }
        k
    }

    #[test]
    fn repeller_stays_in_k() {
        let ifs = f_and_f2();
        let k = k_away_from_zero(1e-3);
        assert!(accepts_backward_invariant(&ifs, &k).unwrap());
        let w = theorem_b_witness(&ifs, &k, &SymbolStream::champernowne(2).unwrap(), 200).unwrap();
        assert!(w.stays_in_k && w.x_in_k_n);
        assert!((w.x.as_circle().unwrap() - 0.5).abs() < 1e-3);
        assert_eq!(w.trace.len(), 200);
    }

    #[test]
    fn zero_steps_returns_k() {
        let ifs = f_and_f2();
        let k = k_away_from_zero(0.01);
        let w = theorem_b_witness(&ifs, &k, &SymbolStream::champernowne(2).unwrap(), 0).unwrap();
        assert_eq!(w.k_n, k);
        assert!(k.contains_point(&w.x));
        assert!(w.trace.is_empty());
    }

    #[test]
    fn nested_preimages() {
        let ifs = f_and_f2();
        let k = k_away_from_zero(0.01);
        let s = SymbolStream::champernowne(2).unwrap();
        let mut prev = k.clone();
        for n in 1..12 {
            let w = theorem_b_witness(&ifs, &k, &s, n).unwrap();
            assert!(w.k_n.is_subset(&prev.dilate(1)).unwrap(), "n = {n}");
            prev = w.k_n;
        }
    }

    #[test]
    fn rejects_improper_sets() {
        let ifs = f_and_f2();
        let s = SymbolStream::champernowne(2).unwrap();
        let full = GridSet::full(Space::Circle, 0.01).unwrap();
        assert!(theorem_b_witness(&ifs, &full, &s, 3).is_err());
        assert!(!accepts_backward_invariant(&ifs, &full).unwrap());
        // an arc around the attractor is not backward invariant
        let mut arc = GridSet::empty(Space::Circle, 0.01).unwrap();
        for c in [98, 99, 0, 1] {
            arc.insert(c);
        }
        assert!(!accepts_backward_invariant(&ifs, &arc).unwrap());
    }
}
