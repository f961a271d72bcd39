//! Strictly increasing multi-indices over {0, …, n−1} and the signs that
//! arise when wedging, inserting and complementing them.

/// Binomial coefficient C(n, k) as usize. Small arguments only (n ≤ 8 here).
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num = 1usize;
    for i in 0..k {
        num = num * (n - i) / (i + 1);
    }
    num
}

/// All strictly increasing k-subsets of {0, …, n−1} in lexicographic order.
pub fn index_sets(n: usize, k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut current: Vec<u8> = (0..k as u8).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(current.clone());
        // advance to the next lexicographic subset
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] < (n - k + i) as u8 {
                current[i] += 1;
                for j in i + 1..k {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Lexicographic rank of an increasing subset, via the combinatorial number
/// system. Inverse of `index_sets` ordering.
pub fn rank(n: usize, set: &[u8]) -> usize {
    let k = set.len();
    let mut r = 0usize;
    let mut prev: i32 = -1;
    for (pos, &e) in set.iter().enumerate() {
        for cand in (prev + 1) as u8..e {
            r += binomial(n - 1 - cand as usize, k - 1 - pos);
        }
        prev = e as i32;
    }
    r
}

/// Sign of the permutation that sorts the concatenation `a ++ b` of two
/// disjoint increasing sets, together with the merged set. `None` if the
/// sets intersect (the wedge vanishes).
pub fn merge_sign(a: &[u8], b: &[u8]) -> Option<(Vec<u8>, f64)> {
    let mut merged = Vec::with_capacity(a.len() + b.len());
    let mut transpositions = 0usize;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            merged.push(a[i]);
            i += 1;
        } else {
            // b[j] jumps over the remaining elements of a
            transpositions += a.len() - i;
            merged.push(b[j]);
            j += 1;
        }
    }
    merged.extend_from_slice(&a[i..]);
    merged.extend_from_slice(&b[j..]);
    let sign = if transpositions.is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((merged, sign))
}

/// Insert `e` into an increasing set: returns the enlarged set and the sign
/// (−1)^{#elements below e}. `None` if `e` is already present.
pub fn insert_sign(set: &[u8], e: u8) -> Option<(Vec<u8>, f64)> {
    let mut below = 0usize;
    for &s in set {
        if s == e {
            return None;
        }
        if s < e {
            below += 1;
        }
    }
    let mut out = Vec::with_capacity(set.len() + 1);
    out.extend_from_slice(&set[..below]);
    out.push(e);
    out.extend_from_slice(&set[below..]);
    let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((out, sign))
}

/// Complement of an increasing set inside {0, …, n−1}.
pub fn complement(n: usize, set: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(n - set.len());
    let mut it = set.iter().peekable();
    for e in 0..n as u8 {
        if it.peek() == Some(&&e) {
            it.next();
        } else {
            out.push(e);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_sets_count_and_rank_roundtrip() {
        for n in 1..=8 {
            for k in 0..=n {
                let sets = index_sets(n, k);
                assert_eq!(sets.len(), binomial(n, k));
                for (i, s) in sets.iter().enumerate() {
                    assert_eq!(rank(n, s), i);
                }
            }
        }
    }

    #[test]
    fn merge_sign_matches_bubble_count() {
        // (0,2) ++ (1,3): one transposition moves 1 past 2
        let (m, s) = merge_sign(&[0, 2], &[1, 3]).unwrap();
        assert_eq!(m, vec![0, 1, 2, 3]);
        assert_eq!(s, -1.0);
        assert!(merge_sign(&[0, 1], &[1, 2]).is_none());
    }

    #[test]
    fn insert_and_complement() {
        let (s, sign) = insert_sign(&[0, 2], 1).unwrap();
        assert_eq!(s, vec![0, 1, 2]);
        assert_eq!(sign, -1.0);
        assert_eq!(complement(4, &[1, 3]), vec![0, 2]);
    }
}
