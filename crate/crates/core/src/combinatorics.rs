//! Small integer combinatorics shared by the other modules: binomials,
//! factorials, k-subset enumeration and colexicographic ranking.

/// `n!` as `u64`. Panics on overflow (n > 20).
pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).try_fold(1u64, |acc, x| acc.checked_mul(x)).expect("factorial overflow")
}

/// Binomial coefficient C(n, k) with exact integer arithmetic.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Colexicographic rank of a strictly increasing subset of `0..`.
///
/// The rank of `{c_0 < c_1 < ... < c_{r-1}}` is `sum_i C(c_i, i + 1)`.
pub fn colex_rank(subset: &[u32]) -> u128 {
    subset.iter().enumerate().map(|(i, &c)| binomial(c as usize, i + 1)).sum()
}

/// Inverse of [`colex_rank`] for subsets of size `size`.
pub fn colex_unrank(mut rank: u128, size: usize) -> Vec<u32> {
    let mut out = vec![0u32; size];
    for i in (0..size).rev() {
        // largest c with C(c, i+1) <= rank
        let mut c = i;
        while binomial(c + 1, i + 1) <= rank {
            c += 1;
        }
        rank -= binomial(c, i + 1);
        out[i] = c as u32;
    }
    out
}

/// Advances `subset` (strictly increasing, values `< n`) to its colexicographic
/// successor. Returns `false` when `subset` was the last one.
pub fn next_colex(subset: &mut [u32], n: u32) -> bool {
    let r = subset.len();
    for i in 0..r {
        let limit = if i + 1 < r { subset[i + 1] } else { n };
        if subset[i] + 1 < limit {
            subset[i] += 1;
            for (j, slot) in subset.iter_mut().enumerate().take(i) {
                *slot = j as u32;
            }
            return true;
        }
    }
    false
}

/// Advances `subset` to its lexicographic successor among `size`-subsets of `0..n`.
pub fn next_lex(subset: &mut [usize], n: usize) -> bool {
    let r = subset.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if subset[i] < n - r + i {
            subset[i] += 1;
            for j in i + 1..r {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// All `size`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    if size > n {
        return Vec::new();
    }
    let mut cur: Vec<usize> = (0..size).collect();
    let mut out = vec![cur.clone()];
    if size == 0 {
        return out;
    }
    while next_lex(&mut cur, n) {
        out.push(cur.clone());
    }
    out
}

/// Sign of the permutation that sorts `items` ascending (items must be distinct).
pub fn sort_sign<T: Ord>(items: &[T]) -> i8 {
    let mut inversions = 0usize;
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            if items[i] > items[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}
