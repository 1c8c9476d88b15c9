//! Reference implementations shared by the integration tests. None of them
//! call into the code they check beyond the basic types and predicates.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use rand::Rng;
use sli_core::{Inventory, Phone, Predicate, SoundLaw, Token, Word};

pub fn random_symbols<'a>(alphabet: &[&'a str], rng: &mut impl Rng, max_len: usize) -> Vec<&'a str> {
    let len = rng.gen_range(1..=max_len);
    (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
}

pub fn spelled(w: &[&str]) -> Word {
    Word::from_symbols(w).unwrap()
}

pub fn symbols(w: &Word) -> Vec<&str> {
    w.phones().iter().map(|p| p.as_str()).collect()
}

/// `a > e / _ j` by direct scan.
pub fn pre_j_oracle(w: &[&str]) -> Vec<String> {
    (0..w.len())
        .map(|i| if w[i] == "a" && w.get(i + 1) == Some(&"j") { "e".to_string() } else { w[i].to_string() })
        .collect()
}

/// `x > y / l _ r` over literal phones, with `#` for a word edge and `None`
/// for an empty slot, computed from the original word only.
pub struct Simple {
    pub text: &'static str,
    pub x: Option<&'static str>,
    pub y: Option<&'static str>,
    pub l: Option<&'static str>,
    pub r: Option<&'static str>,
}

impl Simple {
    fn left_ok(&self, w: &[&str], i: usize) -> bool {
        match self.l {
            None => true,
            Some("#") => i == 0,
            Some(l) => i > 0 && w[i - 1] == l,
        }
    }

    fn right_ok(&self, w: &[&str], j: usize) -> bool {
        match self.r {
            None => true,
            Some("#") => j == w.len(),
            Some(r) => j < w.len() && w[j] == r,
        }
    }

    /// Output word and number of sites.
    pub fn oracle(&self, w: &[&str]) -> (Vec<String>, usize) {
        let mut out = Vec::new();
        let mut sites = 0;
        match self.x {
            Some(x) => {
                for i in 0..w.len() {
                    if w[i] == x && self.left_ok(w, i) && self.right_ok(w, i + 1) {
                        sites += 1;
                        out.extend(self.y.map(str::to_string));
                    } else {
                        out.push(w[i].to_string());
                    }
                }
            }
            None => {
                let y = self.y.expect("insertion has a target");
                for gap in 0..=w.len() {
                    if self.left_ok(w, gap) && self.right_ok(w, gap) && (self.l.is_some() || self.r.is_some()) {
                        sites += 1;
                        out.push(y.to_string());
                    }
                    if gap < w.len() {
                        out.push(w[gap].to_string());
                    }
                }
            }
        }
        (out, sites)
    }
}

/// Rules whose output can recreate their own environment.
pub const SELF_FEEDING: [Simple; 10] = [
    Simple { text: "∅ > a / a _", x: None, y: Some("a"), l: Some("a"), r: None },
    Simple { text: "∅ > a / _ a", x: None, y: Some("a"), l: None, r: Some("a") },
    Simple { text: "∅ > k / k _", x: None, y: Some("k"), l: Some("k"), r: None },
    Simple { text: "a > b / b _", x: Some("a"), y: Some("b"), l: Some("b"), r: None },
    Simple { text: "b > a / _ a", x: Some("b"), y: Some("a"), l: None, r: Some("a") },
    Simple { text: "t > d / d _", x: Some("t"), y: Some("d"), l: Some("d"), r: None },
    Simple { text: "a > ∅ / k _", x: Some("a"), y: None, l: Some("k"), r: None },
    Simple { text: "a > ∅ / _ #", x: Some("a"), y: None, l: None, r: Some("#") },
    Simple { text: "b > ∅ / # _", x: Some("b"), y: None, l: Some("#"), r: None },
    Simple { text: "i > j / j _", x: Some("i"), y: Some("j"), l: Some("j"), r: None },
];

pub const SELF_FEEDING_ALPHABET: [&str; 7] = ["a", "b", "k", "t", "d", "i", "j"];

// ---- edit distance and LCS by exhaustive search

pub const SMALL_ALPHABET: [u8; 3] = *b"pan";
pub const SMALL_MAX_LEN: usize = 6;

pub fn all_small_words() -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..SMALL_MAX_LEN {
        let mut next = Vec::new();
        for w in &frontier {
            for &c in &SMALL_ALPHABET {
                let mut v: Vec<u8> = w.clone();
                v.push(c);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn neighbours(w: &[u8]) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for i in 0..w.len() {
        let mut d = w.to_vec();
        d.remove(i);
        out.push(d);
        for &c in &SMALL_ALPHABET {
            if c != w[i] {
                let mut s = w.to_vec();
                s[i] = c;
                out.push(s);
            }
        }
    }
    if w.len() < SMALL_MAX_LEN {
        for i in 0..=w.len() {
            for &c in &SMALL_ALPHABET {
                let mut s = w.to_vec();
                s.insert(i, c);
                out.push(s);
            }
        }
    }
    out
}

/// Edit distances from `words[from]` to every word, by BFS over single edits.
///
/// Some shortest edit path between two words of length <= SMALL_MAX_LEN
/// never leaves that range (deletions first, then substitutions, then
/// insertions), so the bounded universe gives exact distances.
pub fn bfs_distances(from: usize, words: &[Vec<u8>], index: &HashMap<Vec<u8>, usize>) -> Vec<usize> {
    let mut dist = vec![usize::MAX; words.len()];
    dist[from] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for n in neighbours(&words[u]) {
            let v = index[&n];
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

pub fn is_subseq<T: PartialEq>(needle: &[T], hay: &[T]) -> bool {
    let mut j = 0;
    for c in hay {
        if j < needle.len() && needle[j] == *c {
            j += 1;
        }
    }
    j == needle.len()
}

/// LCS length by trying every subsequence of `a`.
pub fn brute_lcs_len(a: &[u8], b: &[u8]) -> usize {
    (0u32..1 << a.len())
        .filter_map(|mask| {
            let sub: Vec<u8> = (0..a.len()).filter(|i| mask & (1 << i) != 0).map(|i| a[i]).collect();
            is_subseq(&sub, b).then_some(sub.len())
        })
        .max()
        .unwrap_or(0)
}

// ---- input quota audit

fn is_edge(p: &Predicate) -> bool {
    matches!(p, Predicate::IsToken(Token::Boundary) | Predicate::IsNotToken(Token::Boundary))
}

/// Phone slots of a sampled law: everything but separators and edge tests.
pub fn phone_slots(law: &SoundLaw) -> Vec<Predicate> {
    law.predicates()
        .iter()
        .filter(|p| !is_edge(p) && **p != Predicate::IsToken(Token::Separator))
        .cloned()
        .collect()
}

fn occurrences(slots: &[Predicate], w: &Word, inv: &Inventory) -> Vec<usize> {
    let ph = w.phones();
    let mut out = Vec::new();
    for start in 0..ph.len() {
        if start + slots.len() > ph.len() {
            break;
        }
        let mut ok = true;
        for (k, s) in slots.iter().enumerate() {
            ok &= s.matches(&Token::Phone(ph[start + k].clone()), inv);
        }
        if ok {
            out.push(start);
        }
    }
    out
}

#[derive(Default, Debug)]
pub struct Buckets {
    pub contain: usize,
    pub begin: usize,
    pub end: usize,
    pub interior: usize,
    pub interior_two: usize,
}

impl Buckets {
    /// At least two thirds of `n` words carry the context and every
    /// position bucket holds a tenth.
    pub fn meets(&self, n: usize) -> bool {
        let tenth = n / 10;
        3 * self.contain >= 2 * n
            && [self.begin, self.end, self.interior, self.interior_two].iter().all(|&b| b >= tenth)
    }
}

pub fn audit(law: &SoundLaw, inputs: &[Word], inv: &Inventory) -> Buckets {
    let slots = phone_slots(law);
    let c = slots.len();
    let mut b = Buckets::default();
    for w in inputs {
        let occ = occurrences(&slots, w, inv);
        let n = w.len();
        b.contain += usize::from(!occ.is_empty());
        b.begin += usize::from(occ.contains(&0));
        b.end += usize::from(n >= c && occ.contains(&(n - c)));
        let inner: Vec<usize> = occ.iter().copied().filter(|&p| p >= 1 && p + c < n).collect();
        b.interior += usize::from(!inner.is_empty());
        // two disjoint interior occurrences
        let mut taken = 0;
        let mut next_free = 0;
        for p in inner {
            if p >= next_free {
                taken += 1;
                next_free = p + c;
            }
        }
        b.interior_two += usize::from(taken >= 2);
    }
    b
}

// ---- context weights

/// Largest number of consecutive blocks of `w` that each contain `c` as a
/// subsequence, by exhaustive split search.
pub fn max_blocks(c: &[Phone], w: &[Phone]) -> usize {
    let n = w.len();
    let mut best = vec![0usize; n + 1];
    for i in (0..n).rev() {
        let mut b = best[i + 1];
        for j in i + 1..=n {
            if is_subseq(c, &w[i..j]) {
                b = b.max(1 + best[j]);
            }
        }
        best[i] = b;
    }
    best[0]
}
