//! Edit distance over phones (or characters).

use crate::phonology::Word;

/// Alphabet the distance is measured over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMode {
    /// A multigraph segment such as `tʰ` counts as one symbol.
    #[default]
    Phone,
    /// Unicode scalar values of the concatenated word.
    Char,
}

/// Unit-cost Levenshtein distance, two-row DP.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub fn word_distance(a: &Word, b: &Word, mode: DistanceMode) -> usize {
    match mode {
        DistanceMode::Phone => levenshtein(a.phones(), b.phones()),
        DistanceMode::Char => {
            let a: Vec<char> = a.to_string().chars().collect();
            let b: Vec<char> = b.to_string().chars().collect();
            levenshtein(&a, &b)
        }
    }
}
