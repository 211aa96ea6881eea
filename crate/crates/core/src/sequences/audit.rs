use super::{SequenceError, StreamPolicy, SymbolStream};

/// Empirical conditional symbol frequencies, bucketed by the preceding
/// `depth` symbols.
///
/// Bucket `b` encodes the history `(s_{n-d}, …, s_{n-1})` in base `k` with the
/// oldest symbol most significant, so depth 0 has the single bucket 0.
#[derive(Clone, Debug, PartialEq)]
pub struct DriverAudit {
    pub k: usize,
    pub depth: usize,
    /// `counts[bucket][symbol - 1]`.
    pub counts: Vec<Vec<u64>>,
    /// Row-normalized counts; `None` for histories never observed.
    pub frequencies: Vec<Option<Vec<f64>>>,
    /// Smallest entry over all observed rows.
    pub min_conditional: f64,
    /// Number of (history, symbol) observations.
    pub samples: u64,
}

impl DriverAudit {
    pub fn row_count(&self, bucket: usize) -> u64 {
        self.counts[bucket].iter().sum()
    }

    /// True when every observed conditional frequency is at least
    /// `p_min − sigmas·σ`, with σ the binomial standard deviation of that row.
    pub fn meets_bound(&self, p_min: f64, sigmas: f64) -> bool {
        self.frequencies.iter().enumerate().all(|(b, row)| match row {
            None => true,
            Some(row) => {
                let sd = (p_min * (1.0 - p_min) / self.row_count(b) as f64).sqrt();
                row.iter().all(|&f| f >= p_min - sigmas * sd)
            }
        })
    }
}

/// Consumes up to `n` symbols from a clone of `stream` and tabulates
/// conditional frequencies. The caller's stream is not advanced.
///
/// Requires `n ≥ 10·k^(depth+1)` except for explicit words, which are counted
/// exactly (a finite word contributes all of its symbols up to `n`).
pub fn audit_driver(stream: &SymbolStream, n: u64, depth: usize) -> Result<DriverAudit, SequenceError> {
    let k = stream.alphabet_size();
    let buckets = k.checked_pow(depth as u32).ok_or(SequenceError::InsufficientSamples {
        need: u64::MAX,
        got: n,
    })?;
    let exact = matches!(stream.policy(), StreamPolicy::Explicit(_));
    if !exact {
        let need = (buckets as u64).saturating_mul(k as u64).saturating_mul(10);
        if n < need {
            return Err(SequenceError::InsufficientSamples { need, got: n });
        }
    }
    let mut s = stream.clone();
    let mut counts = vec![vec![0u64; k]; buckets];
    let mut history = 0usize;
    let mut seen = 0usize;
    let mut samples = 0;
    for _ in 0..n {
        let Some(sym) = s.next() else { break };
        if seen >= depth {
            counts[history][sym - 1] += 1;
            samples += 1;
        } else {
            seen += 1;
        }
        if depth > 0 {
            history = (history * k + sym - 1) % buckets;
        }
    }
    let frequencies: Vec<Option<Vec<f64>>> = counts
        .iter()
        .map(|row| {
            let total: u64 = row.iter().sum();
            (total > 0).then(|| row.iter().map(|&c| c as f64 / total as f64).collect())
        })
        .collect();
    let min_conditional = frequencies
        .iter()
        .flatten()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(DriverAudit {
        k,
        depth,
        counts,
        frequencies,
        min_conditional,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::SymbolWord;

    #[test]
    fn explicit_word_counts() {
        let s = SymbolStream::explicit(SymbolWord::new(vec![1, 1, 2], 2).unwrap());
        let a = audit_driver(&s, 3, 0).unwrap();
        let f = a.frequencies[0].as_ref().unwrap();
        assert!((f[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((f[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(a.samples, 3);
        assert_eq!(s.cursor(), 0);
    }

    #[test]
    fn uniform_bernoulli_depth_one() {
        let s = SymbolStream::uniform_bernoulli(2, 3).unwrap();
        let a = audit_driver(&s, 100_000, 1).unwrap();
        for row in a.frequencies.iter().flatten() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            for &f in row {
                assert!((f - 0.5).abs() < 0.02, "{f}");
            }
        }
    }

    #[test]
    fn champernowne_depth_zero() {
        let s = SymbolStream::champernowne(2).unwrap();
        let a = audit_driver(&s, 1_000_000, 0).unwrap();
        for &f in a.frequencies[0].as_ref().unwrap() {
            assert!((f - 0.5).abs() < 0.05);
        }
    }

    #[test]
    fn history_biased_respects_bound() {
        let s = SymbolStream::history_biased(2, 0.1, 17).unwrap();
        let a = audit_driver(&s, 1_000_000, 1).unwrap();
        assert!(a.meets_bound(0.1, 3.0));
        // the bias is real: repeating the previous symbol dominates
        let repeat = a.frequencies[0].as_ref().unwrap()[0];
        assert!(repeat > 0.85, "{repeat}");
    }

    #[test]
    fn sample_precondition() {
        let s = SymbolStream::uniform_bernoulli(2, 0).unwrap();
        assert_eq!(
            audit_driver(&s, 39, 1),
            Err(SequenceError::InsufficientSamples { need: 40, got: 39 })
        );
        assert!(audit_driver(&s, 40, 1).is_ok());
    }

    #[test]
    fn history_buckets_oldest_first() {
        // 1,2,2: after history (1) comes 2; after (2) comes 2
        let s = SymbolStream::explicit(SymbolWord::new(vec![1, 2, 2], 2).unwrap());
        let a = audit_driver(&s, 3, 1).unwrap();
        assert_eq!(a.counts, vec![vec![0, 1], vec![0, 1]]);
        let s = SymbolStream::explicit(SymbolWord::new(vec![1, 2, 2, 1], 2).unwrap());
        let a = audit_driver(&s, 4, 2).unwrap();
        // histories 12 -> 2 (bucket 1), 22 -> 1 (bucket 3)
        assert_eq!(a.counts[1], vec![0, 1]);
        assert_eq!(a.counts[3], vec![1, 0]);
    }
}
