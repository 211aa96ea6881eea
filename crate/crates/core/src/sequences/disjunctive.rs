use std::collections::HashSet;

use crate::dynamics::SymbolWord;

/// Result of a finite disjunctivity scan.
#[derive(Clone, Debug, PartialEq)]
pub struct DisjunctiveCheck {
    pub complete: bool,
    /// Missing words, shortest first, lexicographic within a length.
    pub missing: Vec<SymbolWord>,
}

// Above this many words per length, missing words are not listed individually.
const MAX_LISTED: usize = 1 << 16;

/// Checks that every word of length `1..=max_len` over the alphabet of `w`
/// occurs as a factor of `w`.
pub fn is_disjunctive_prefix(w: &SymbolWord, max_len: usize) -> DisjunctiveCheck {
    let k = w.alphabet_size() as u128;
    let s = w.symbols();
    let mut missing = Vec::new();
    let mut complete = true;
    for len in 1..=max_len {
        let Some(total) = k.checked_pow(len as u32) else {
            complete = false;
            break;
        };
        let mut seen: HashSet<u128> = HashSet::new();
        if len <= s.len() {
            let modulus = total;
            let mut code: u128 = 0;
            for (i, &sym) in s.iter().enumerate() {
                code = (code * k + (sym as u128 - 1)) % modulus;
                if i + 1 >= len {
                    seen.insert(code);
                }
            }
        }
        if seen.len() as u128 == total {
            continue;
        }
        complete = false;
        if total > MAX_LISTED as u128 {
            continue;
        }
        for code in 0..total {
            if !seen.contains(&code) {
                let mut digits = vec![0usize; len];
                let mut c = code;
                for d in digits.iter_mut().rev() {
                    *d = (c % k) as usize + 1;
                    c /= k;
                }
                missing.push(SymbolWord::new(digits, k as usize).expect("digits in range"));
            }
        }
    }
    DisjunctiveCheck { complete, missing }
}
