//! Longest common subsequence.

/// A longest common subsequence of `a` and `b`. Among optimal answers the
/// traceback prefers the earliest positions in `a`.
pub fn lcs<T: PartialEq + Clone>(a: &[T], b: &[T]) -> Vec<T> {
    let (n, m) = (a.len(), b.len());
    // suffix table: t[i][j] = LCS length of a[i..], b[j..]
    let mut t = vec![vec![0usize; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            t[i][j] = if a[i] == b[j] { t[i + 1][j + 1] + 1 } else { t[i + 1][j].max(t[i][j + 1]) };
        }
    }
    let mut out = Vec::with_capacity(t[0][0]);
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if a[i] == b[j] {
            out.push(a[i].clone());
            i += 1;
            j += 1;
        } else if t[i][j + 1] >= t[i + 1][j] {
            j += 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Whether `needle` occurs in `hay` as a (not necessarily contiguous) subsequence.
pub fn is_subsequence<T: PartialEq>(needle: &[T], hay: &[T]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|x| it.any(|y| y == x))
}

/// Contiguous occurrences of `needle` in `hay`, overlaps included.
pub fn count_occurrences<T: PartialEq>(needle: &[T], hay: &[T]) -> usize {
    if needle.is_empty() || needle.len() > hay.len() {
        return 0;
    }
    hay.windows(needle.len()).filter(|w| *w == needle).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(lcs(b"abc", b"abc"), b"abc");
        assert_eq!(lcs(b"ab", b"ba").len(), 1);
        assert_eq!(lcs(b"ab", b"ba"), b"a");
        assert_eq!(lcs(b"", b"abc"), b"");
        assert_eq!(lcs(b"talun", b"tumpul").len(), 2);
    }

    #[test]
    fn occurrences() {
        assert_eq!(count_occurrences(b"aa", b"aaaa"), 3);
        assert_eq!(count_occurrences(b"", b"aaaa"), 0);
        assert_eq!(count_occurrences(b"abc", b"ab"), 0);
        assert!(is_subsequence(b"tul", b"tumpul"));
        assert!(!is_subsequence(b"lut", b"tumpul"));
    }
}
