use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SequenceError;
use crate::dynamics::{Symbol, SymbolWord};

/// How a [`SymbolStream`] produces its symbols.
#[derive(Clone, Debug, PartialEq)]
pub enum StreamPolicy {
    /// All words over `{1..k}` in length-then-lexicographic order, concatenated.
    Champernowne,
    /// Same blocks of words as `Champernowne`, but the words of each length are
    /// emitted in a seeded random order. Still disjunctive.
    ShuffledBlocks { seed: u64 },
    /// I.i.d. symbols with the given probabilities.
    Bernoulli { weights: Vec<f64>, seed: u64 },
    /// Markov driver: with probability `k·p_min` a uniform symbol, otherwise the
    /// previous symbol again (symbol 1 at the start). Every conditional
    /// probability is at least `p_min`, whatever the history.
    HistoryBiased { p_min: f64, seed: u64 },
    /// A finite word; the stream ends after its last symbol.
    Explicit(SymbolWord),
}

#[derive(Clone, Debug)]
enum State {
    Words {
        digits: Vec<usize>,
        pos: usize,
    },
    Shuffled {
        rng: ChaCha8Rng,
        len: u32,
        order: Vec<u64>,
        word: usize,
        digits: Vec<usize>,
        pos: usize,
    },
    Random {
        rng: ChaCha8Rng,
        cumulative: Vec<f64>,
    },
    Biased {
        rng: ChaCha8Rng,
        prev: Symbol,
    },
    Explicit,
}

/// A single-consumer address sequence ω ∈ {1..k}^ℕ with a cursor.
///
/// Cloning yields an independent consumer at the same position. Random
/// policies draw from ChaCha8 seeded with `seed_from_u64`; a uniform variate is
/// `(next_u64 >> 11) · 2⁻⁵³`, so `(policy, seed)` fixes the stream bit-exactly.
#[derive(Clone, Debug)]
pub struct SymbolStream {
    k: usize,
    policy: StreamPolicy,
    state: State,
    position: u64,
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in `0..n` by multiply-shift.
fn below(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    ((rng.next_u64() as u128 * n as u128) >> 64) as u64
}

impl SymbolStream {
    pub fn new(k: usize, policy: StreamPolicy) -> Result<Self, SequenceError> {
        if k == 0 {
            return Err(SequenceError::InvalidPolicy("alphabet size must be at least 1".into()));
        }
        let state = match &policy {
            StreamPolicy::Champernowne => State::Words {
                digits: vec![0],
                pos: 0,
            },
            StreamPolicy::ShuffledBlocks { seed } => {
                let mut s = State::Shuffled {
                    rng: ChaCha8Rng::seed_from_u64(*seed),
                    len: 0,
                    order: Vec::new(),
                    word: 0,
                    digits: Vec::new(),
                    pos: 0,
                };
                next_shuffled_block(&mut s, k);
                s
            }
            StreamPolicy::Bernoulli { weights, seed } => {
                if weights.len() != k {
                    return Err(SequenceError::InvalidPolicy(format!(
                        "{} weights given for alphabet size {k}",
                        weights.len()
                    )));
                }
                if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    return Err(SequenceError::InvalidPolicy("weights must be positive".into()));
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(SequenceError::InvalidPolicy(format!(
                        "weights sum to {total}, expected 1"
                    )));
                }
                let mut acc = 0.0;
                let mut cumulative: Vec<f64> = weights
                    .iter()
                    .map(|w| {
                        acc += w;
                        acc
                    })
                    .collect();
                *cumulative.last_mut().unwrap() = f64::INFINITY;
                State::Random {
                    rng: ChaCha8Rng::seed_from_u64(*seed),
                    cumulative,
                }
            }
            StreamPolicy::HistoryBiased { p_min, seed } => {
                if !(*p_min > 0.0 && *p_min <= 1.0 / k as f64 + 1e-12) {
                    return Err(SequenceError::InvalidPolicy(format!(
                        "p_min {p_min} must lie in (0, 1/{k}]"
                    )));
                }
                State::Biased {
                    rng: ChaCha8Rng::seed_from_u64(*seed),
                    prev: 1,
                }
            }
            StreamPolicy::Explicit(w) => {
                if w.alphabet_size() != k {
                    return Err(SequenceError::InvalidPolicy(format!(
                        "explicit word over alphabet {} used as stream over {k}",
                        w.alphabet_size()
                    )));
                }
                State::Explicit
            }
        };
        Ok(SymbolStream {
            k,
            policy,
            state,
            position: 0,
        })
    }

    pub fn champernowne(k: usize) -> Result<Self, SequenceError> {
        Self::new(k, StreamPolicy::Champernowne)
    }

    pub fn explicit(w: SymbolWord) -> Self {
        let k = w.alphabet_size();
        Self::new(k, StreamPolicy::Explicit(w)).expect("explicit words are always valid")
    }

    pub fn uniform_bernoulli(k: usize, seed: u64) -> Result<Self, SequenceError> {
        Self::new(
            k,
            StreamPolicy::Bernoulli {
                weights: vec![1.0 / k as f64; k],
                seed,
            },
        )
    }

    pub fn history_biased(k: usize, p_min: f64, seed: u64) -> Result<Self, SequenceError> {
        Self::new(k, StreamPolicy::HistoryBiased { p_min, seed })
    }

    /// Parses `champernowne | shuffled:<seed> | bernoulli:<w1,...,wk>:<seed> |
    /// biased:<p_min>:<seed> | explicit:<digits>`.
    ///
    /// `bernoulli:uniform:<seed>` is shorthand for equal weights. Explicit
    /// symbols are single digits, or comma separated when `k > 9`.
    pub fn parse(spec: &str, k: usize) -> Result<Self, SequenceError> {
        let bad = || SequenceError::InvalidPolicy(format!("cannot parse stream `{spec}`"));
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let seed = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
        let policy = match parts.as_slice() {
            ["champernowne"] => StreamPolicy::Champernowne,
            ["shuffled", s] => StreamPolicy::ShuffledBlocks { seed: seed(s)? },
            ["bernoulli", "uniform", s] => StreamPolicy::Bernoulli {
                weights: vec![1.0 / k as f64; k],
                seed: seed(s)?,
            },
            ["bernoulli", w, s] => StreamPolicy::Bernoulli {
                weights: w
                    .split(',')
                    .map(|v| crate::dynamics::schema::parse_real(v).ok_or_else(bad))
                    .collect::<Result<_, _>>()?,
                seed: seed(s)?,
            },
            ["biased", p, s] => StreamPolicy::HistoryBiased {
                p_min: crate::dynamics::schema::parse_real(p).ok_or_else(bad)?,
                seed: seed(s)?,
            },
            ["explicit", digits] => {
                let symbols: Vec<Symbol> = if digits.contains(',') {
                    digits
                        .split(',')
                        .map(|d| d.trim().parse().map_err(|_| bad()))
                        .collect::<Result<_, _>>()?
                } else {
                    digits
                        .chars()
                        .map(|c| c.to_digit(10).map(|d| d as Symbol).ok_or_else(bad))
                        .collect::<Result<_, _>>()?
                };
                StreamPolicy::Explicit(
                    SymbolWord::new(symbols, k)
                        .map_err(|e| SequenceError::InvalidPolicy(e.to_string()))?,
                )
            }
            _ => return Err(bad()),
        };
        Self::new(k, policy)
    }

    pub fn alphabet_size(&self) -> usize {
        self.k
    }

    pub fn policy(&self) -> &StreamPolicy {
        &self.policy
    }

    /// Number of symbols consumed so far.
    pub fn cursor(&self) -> u64 {
        self.position
    }

    /// Lower bound on every conditional symbol probability, for random policies.
    pub fn declared_p_min(&self) -> Option<f64> {
        match &self.policy {
            StreamPolicy::Bernoulli { weights, .. } => {
                Some(weights.iter().copied().fold(f64::INFINITY, f64::min))
            }
            StreamPolicy::HistoryBiased { p_min, .. } => Some(*p_min),
            _ => None,
        }
    }

    pub fn is_random(&self) -> bool {
        self.declared_p_min().is_some()
    }

    /// Same policy and seed, cursor back at 0.
    pub fn restarted(&self) -> Self {
        Self::new(self.k, self.policy.clone()).expect("policy was validated at construction")
    }

    /// Consumes `n` symbols into a word.
    pub fn take_word(&mut self, n: usize) -> Result<SymbolWord, SequenceError> {
        let mut symbols = Vec::with_capacity(n);
        for _ in 0..n {
            symbols.push(self.next().ok_or(SequenceError::Exhausted {
                position: self.position,
            })?);
        }
        Ok(SymbolWord::new(symbols, self.k).expect("streams emit symbols in range"))
    }

    pub fn advance(&mut self, n: u64) -> Result<(), SequenceError> {
        for _ in 0..n {
            self.next().ok_or(SequenceError::Exhausted {
                position: self.position,
            })?;
        }
        Ok(())
    }
}

fn next_shuffled_block(state: &mut State, k: usize) {
    if let State::Shuffled {
        rng,
        len,
        order,
        word,
        digits,
        pos,
    } = state
    {
        *len += 1;
        let count = (k as u64).pow(*len);
        *order = (0..count).collect();
        for i in (1..order.len()).rev() {
            let j = below(rng, i as u64 + 1) as usize;
            order.swap(i, j);
        }
        *word = 0;
        *pos = 0;
        decode(order[0], k, *len as usize, digits);
    }
}

fn decode(mut code: u64, k: usize, len: usize, digits: &mut Vec<usize>) {
    digits.clear();
    digits.resize(len, 0);
    for d in digits.iter_mut().rev() {
        *d = (code % k as u64) as usize;
        code /= k as u64;
    }
}

impl Iterator for SymbolStream {
    type Item = Symbol;

    fn next(&mut self) -> Option<Symbol> {
        let k = self.k;
        let s = match &mut self.state {
            State::Words { digits, pos } => {
                let s = digits[*pos] + 1;
                *pos += 1;
                if *pos == digits.len() {
                    *pos = 0;
                    // increment base k; overflow starts the next length
                    let mut i = digits.len();
                    loop {
                        if i == 0 {
                            let len = digits.len() + 1;
                            digits.clear();
                            digits.resize(len, 0);
                            break;
                        }
                        i -= 1;
                        digits[i] += 1;
                        if digits[i] < k {
                            break;
                        }
                        digits[i] = 0;
                    }
                }
                s
            }
            State::Shuffled {
                order,
                word,
                digits,
                pos,
                len,
                ..
            } => {
                let s = digits[*pos] + 1;
                *pos += 1;
                if *pos == digits.len() {
                    *pos = 0;
                    *word += 1;
                    if *word == order.len() {
                        next_shuffled_block(&mut self.state, k);
                    } else {
                        let code = order[*word];
                        decode(code, k, *len as usize, digits);
                    }
                }
                s
            }
            State::Random { rng, cumulative } => {
                let u = uniform(rng);
                cumulative.iter().position(|&c| u < c).unwrap() + 1
            }
            State::Biased { rng, prev } => {
                let StreamPolicy::HistoryBiased { p_min, .. } = self.policy else {
                    unreachable!()
                };
                let u = uniform(rng);
                let s = if u < k as f64 * p_min {
                    ((u / p_min) as usize).min(k - 1) + 1
                } else {
                    *prev
                };
                *prev = s;
                s
            }
            State::Explicit => {
                let StreamPolicy::Explicit(w) = &self.policy else {
                    unreachable!()
                };
                *w.symbols().get(self.position as usize)?
            }
        };
        self.position += 1;
        Some(s)
    }
}
