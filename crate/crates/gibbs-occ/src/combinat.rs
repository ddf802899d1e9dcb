//! Iterative enumerators for compositions and integer partitions.
//!
//! Both enumerators are plain iterators with explicit state (no recursion), so they are
//! safe for any size the caller can afford to wait for. Orders are fixed and documented
//! so that test fixtures built from them are stable.

/// Weak compositions of `total` into exactly `parts` non-negative parts, in ascending
/// lexicographic order: `(0,…,0,total)` first and `(total,0,…,0)` last.
#[derive(Clone, Debug)]
pub struct Compositions {
    current: Option<Vec<u64>>,
}

impl Compositions {
    pub fn new(total: u64, parts: usize) -> Self {
        let current = match parts {
            0 if total == 0 => Some(Vec::new()),
            0 => None,
            _ => {
                let mut v = vec![0; parts];
                v[parts - 1] = total;
                Some(v)
            }
        };
        Compositions { current }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let out = self.current.take()?;
        let n = out.len();
        if n >= 2 {
            // Rightmost position (before the last) that still has mass to its right.
            let mut suffix = out[n - 1];
            let mut i = n - 1;
            while i > 0 {
                i -= 1;
                if suffix > 0 {
                    let mut next = out.clone();
                    next[i] += 1;
                    for x in next.iter_mut().skip(i + 1) {
                        *x = 0;
                    }
                    next[n - 1] = suffix - 1;
                    self.current = Some(next);
                    break;
                }
                suffix += out[i];
            }
        }
        Some(out)
    }
}

/// Compositions of `total` into `parts` strictly positive parts (same order).
pub fn positive_compositions(total: u64, parts: usize) -> impl Iterator<Item = Vec<u64>> {
    let base = total.checked_sub(parts as u64);
    let inner = match base {
        Some(b) => Compositions::new(b, parts),
        None => Compositions { current: None },
    };
    inner.map(|v| v.into_iter().map(|x| x + 1).collect())
}

/// Number of weak compositions `C(total + parts − 1, parts − 1)`, or `None` on overflow.
pub fn count_compositions(total: u64, parts: usize) -> Option<u128> {
    if parts == 0 {
        return Some(u128::from(total == 0));
    }
    let n = total as u128 + parts as u128 - 1;
    let k = (parts as u128 - 1).min(total as u128);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Integer partitions of `n` as non-increasing part lists, in descending lexicographic
/// order: `[n]`, `[n−1, 1]`, …, `[1, 1, …, 1]`. The partition of zero is `[]`.
#[derive(Clone, Debug)]
pub struct Partitions {
    current: Option<Vec<u64>>,
}

impl Partitions {
    pub fn new(n: u64) -> Self {
        Partitions { current: Some(if n == 0 { Vec::new() } else { vec![n] }) }
    }
}

impl Iterator for Partitions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        // Strip trailing ones, then decrement the last part > 1 and refill greedily.
        let mut ones = 0;
        while next.last() == Some(&1) {
            next.pop();
            ones += 1;
        }
        if let Some(last) = next.pop() {
            let part = last - 1;
            let mut remaining = ones + 1 + part;
            while remaining > 0 {
                let take = part.min(remaining);
                next.push(take);
                remaining -= take;
            }
            self.current = Some(next);
        }
        Some(out)
    }
}

/// Frequency-of-frequencies vector `(a₁, …, a_k)` of a list of counts (zeros ignored).
pub fn aff_of(counts: &[u64], k: usize) -> Vec<u64> {
    let mut a = vec![0; k];
    for &c in counts {
        if c > 0 {
            a[c as usize - 1] += 1;
        }
    }
    a
}

/// Inverse of [`aff_of`] for a partition: the non-increasing part list.
pub fn parts_of(aff: &[u64]) -> Vec<u64> {
    let mut parts = Vec::new();
    for (i, &a) in aff.iter().enumerate().rev() {
        for _ in 0..a {
            parts.push(i as u64 + 1);
        }
    }
    parts
}
