//! Log-domain summation with a fixed pairwise reduction tree.
//!
//! Terms are merged like a binary counter: the accumulator keeps at most one
//! partial sum per power-of-two block size, so the result depends only on the
//! order terms are pushed, never on how the work was scheduled.

/// `ln(e^a + e^b)` without overflow.
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

#[derive(Clone, Debug, Default)]
pub struct LogSum {
    /// `(block size exponent, partial log-sum)`, exponents strictly decreasing.
    stack: Vec<(u32, f64)>,
}

impl LogSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, term: f64) {
        let mut cur = (0u32, term);
        while let Some(&(size, value)) = self.stack.last() {
            if size != cur.0 {
                break;
            }
            self.stack.pop();
            cur = (size + 1, log_add(value, cur.1));
        }
        self.stack.push(cur);
    }

    /// Merge another accumulator's total as a single term.
    pub fn push_sum(&mut self, other: &LogSum) {
        if !other.is_empty() {
            self.push(other.total());
        }
    }

    pub fn is_empty(&self) -> bool {
        self.stack.is_empty()
    }

    /// Log of the sum of all pushed terms; `-inf` when empty.
    pub fn total(&self) -> f64 {
        self.stack
            .iter()
            .rev()
            .fold(f64::NEG_INFINITY, |acc, &(_, v)| log_add(acc, v))
    }
}

/// Pairwise log-sum of a slice in index order.
pub fn log_sum_pairwise(terms: &[f64]) -> f64 {
    match terms.len() {
        0 => f64::NEG_INFINITY,
        1 => terms[0],
        n => {
            let (a, b) = terms.split_at(n / 2);
            log_add(log_sum_pairwise(a), log_sum_pairwise(b))
        }
    }
}
