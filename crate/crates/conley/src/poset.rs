//! Finite posets, order queries, and the linear extension that fixes the
//! global column/row order of every graded complex.
//!
//! The order relation is stored as a dense reflexive-transitive closure table;
//! posets here are small (they index Morse sets or filtration levels, not
//! generators). The linear extension is a Kahn topological sort with ties
//! broken by declaration order, which makes every downstream pivot choice and
//! output byte deterministic.

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("unknown poset element `{0}`")]
    UnknownElement(String),
    #[error("duplicate poset element `{0}`")]
    DuplicateElement(String),
    #[error("antisymmetry violated: `{0}` and `{1}` lie on a cycle")]
    Cycle(String, String),
}

/// A finite partially ordered set with a fixed linear extension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    /// Closed relation table: `leq[i][j]` iff element `i` <= element `j`.
    leq: Vec<Vec<bool>>,
    /// `extension[k]` is the element at position `k` of the linear extension.
    extension: Vec<usize>,
    /// Inverse of `extension`.
    position: Vec<usize>,
}

impl Poset {
    /// Builds a poset from element labels and a relation list `a <= b`.
    ///
    /// The relations may be covers or any generating set; the reflexive and
    /// transitive closure is taken. Cycles between distinct elements are
    /// rejected as antisymmetry violations.
    pub fn new<S: AsRef<str>>(elements: &[S], relations: &[(S, S)]) -> Result<Self, PosetError> {
        let labels: Vec<String> = elements.iter().map(|s| s.as_ref().to_owned()).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(PosetError::DuplicateElement(l.clone()));
            }
        }
        let n = labels.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in relations {
            let ia = *index
                .get(a.as_ref())
                .ok_or_else(|| PosetError::UnknownElement(a.as_ref().to_owned()))?;
            let ib = *index
                .get(b.as_ref())
                .ok_or_else(|| PosetError::UnknownElement(b.as_ref().to_owned()))?;
            leq[ia][ib] = true;
        }
        // Warshall closure.
        for k in 0..n {
            for i in 0..n {
                if i != k && leq[i][k] {
                    let (row_k, row_i) = if i < k {
                        let (a, b) = leq.split_at_mut(k);
                        (&b[0], &mut a[i])
                    } else {
                        let (a, b) = leq.split_at_mut(i);
                        (&a[k], &mut b[0])
                    };
                    for (target, &reach) in row_i.iter_mut().zip(row_k.iter()) {
                        *target = *target || reach;
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i][j] && leq[j][i] {
                    return Err(PosetError::Cycle(labels[i].clone(), labels[j].clone()));
                }
            }
        }
        // Kahn topological sort; among ready elements pick the smallest
        // declaration index.
        let mut placed = vec![false; n];
        let mut extension = Vec::with_capacity(n);
        for _ in 0..n {
            let next = (0..n)
                .find(|&i| !placed[i] && (0..n).all(|j| placed[j] || j == i || !leq[j][i]))
                .expect("acyclic relation always has a ready element");
            placed[next] = true;
            extension.push(next);
        }
        let mut position = vec![0; n];
        for (k, &i) in extension.iter().enumerate() {
            position[i] = k;
        }
        Ok(Self {
            labels,
            index,
            leq,
            extension,
            position,
        })
    }

    /// A total order on `n` anonymous levels `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let rels: Vec<(String, String)> = (1..n)
            .map(|i| ((i - 1).to_string(), i.to_string()))
            .collect();
        Self::new(&labels, &rels).expect("chain construction cannot fail")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, PosetError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| PosetError::UnknownElement(label.to_owned()))
    }

    /// True iff `p <= q` in the closure.
    pub fn leq(&self, p: usize, q: usize) -> bool {
        self.leq[p][q]
    }

    pub fn lt(&self, p: usize, q: usize) -> bool {
        p != q && self.leq[p][q]
    }

    /// Position of element `p` in the linear extension.
    pub fn position(&self, p: usize) -> usize {
        self.position[p]
    }

    /// Elements in linear-extension order.
    pub fn extension(&self) -> &[usize] {
        &self.extension
    }

    /// Covering relations `(a, b)` with `a` covered by `b`, in extension order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &a in &self.extension {
            for &b in &self.extension {
                if self.lt(a, b) && !(0..self.len()).any(|r| self.lt(a, r) && self.lt(r, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// All strictly increasing interior chains `p < x_1 < ... < x_l < q` with
    /// `l <= max_len`, in lexicographic order of extension positions. The
    /// empty chain is always included (and is all there is when `q` covers
    /// `p`). Returns nothing unless `p < q`.
    pub fn chains_between(&self, p: usize, q: usize, max_len: usize) -> Vec<Vec<usize>> {
        if !self.lt(p, q) {
            return Vec::new();
        }
        let interior: Vec<usize> = self
            .extension
            .iter()
            .copied()
            .filter(|&r| self.lt(p, r) && self.lt(r, q))
            .collect();
        let mut out = Vec::new();
        let mut stack = Vec::new();
        self.extend_chains(&interior, max_len, &mut stack, &mut out);
        out
    }

    // Preorder DFS over candidates in extension order emits chains
    // lexicographically; `lt(last, r)` forces strictly increasing positions,
    // so no chain is visited twice.
    fn extend_chains(
        &self,
        interior: &[usize],
        remaining: usize,
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        out.push(stack.clone());
        if remaining == 0 {
            return;
        }
        for &r in interior {
            let extends = match stack.last() {
                None => true,
                Some(&last) => self.lt(last, r),
            };
            if extends {
                stack.push(r);
                self.extend_chains(interior, remaining - 1, stack, out);
                stack.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain4() -> Poset {
        Poset::chain(4)
    }

    #[test]
    fn chain_is_a_total_order() {
        let p = chain4();
        assert_eq!(p.len(), 4);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(p.leq(i, j), i <= j);
            }
        }
        assert_eq!(p.extension(), &[0, 1, 2, 3]);
    }

    #[test]
    fn empty_relation_gives_antichain_in_input_order() {
        let p = Poset::new(&["a", "b"], &[]).unwrap();
        assert!(p.leq(0, 0) && p.leq(1, 1));
        assert!(!p.leq(0, 1) && !p.leq(1, 0));
        assert_eq!(p.extension(), &[0, 1]);
    }

    #[test]
    fn two_cycle_is_rejected() {
        let err = Poset::new(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap_err();
        assert_eq!(err, PosetError::Cycle("a".into(), "b".into()));
    }

    #[test]
    fn unknown_label_is_rejected() {
        let err = Poset::new(&["a"], &[("a", "z")]).unwrap_err();
        assert_eq!(err, PosetError::UnknownElement("z".into()));
    }

    #[test]
    fn duplicate_label_is_rejected() {
        let err = Poset::new(&["a", "a"], &[]).unwrap_err();
        assert_eq!(err, PosetError::DuplicateElement("a".into()));
    }

    #[test]
    fn leq_queries_on_chain() {
        let p = chain4();
        assert!(p.leq(0, 2));
        for i in 0..4 {
            assert!(p.leq(i, i));
        }
        let anti = Poset::new(&["a", "b"], &[]).unwrap();
        assert!(!anti.leq(0, 1));
    }

    #[test]
    fn extension_refines_order() {
        // A poset given with deliberately scrambled declaration order.
        let p = Poset::new(
            &["top", "left", "right", "bot"],
            &[
                ("bot", "left"),
                ("bot", "right"),
                ("left", "top"),
                ("right", "top"),
            ],
        )
        .unwrap();
        for a in 0..p.len() {
            for b in 0..p.len() {
                if p.leq(a, b) {
                    assert!(p.position(a) <= p.position(b));
                }
            }
        }
        // Ties broken by declaration order: left before right.
        assert!(p.position(1) < p.position(2));
    }

    #[test]
    fn chains_between_on_a_chain() {
        let p = Poset::chain(3);
        assert_eq!(p.chains_between(0, 2, 3), vec![vec![], vec![1]]);
        // q covering p: only the empty chain.
        assert_eq!(p.chains_between(0, 1, 3), vec![Vec::<usize>::new()]);
        // Precondition violated: nothing.
        assert!(p.chains_between(1, 1, 3).is_empty());
        assert!(p.chains_between(2, 0, 3).is_empty());
    }

    #[test]
    fn chains_between_on_diamond() {
        let p = Poset::new(
            &["0", "a", "b", "1"],
            &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
        )
        .unwrap();
        let (bot, top) = (0, 3);
        assert_eq!(
            p.chains_between(bot, top, 4),
            vec![vec![], vec![1], vec![2]]
        );
    }

    #[test]
    fn chains_between_respects_max_len() {
        let p = Poset::chain(5);
        let all = p.chains_between(0, 4, 5);
        assert_eq!(all.len(), 8); // subsets of {1,2,3}
        let short = p.chains_between(0, 4, 1);
        assert_eq!(short, vec![vec![], vec![1], vec![2], vec![3]]);
    }

    /// Brute-force cross-check: every subset of the open interval that is a
    /// chain, and nothing else, in lexicographic order.
    #[test]
    fn chains_between_matches_subset_enumeration() {
        let posets = vec![
            Poset::chain(6),
            Poset::new(
                &["0", "a", "b", "c", "1", "z"],
                &[
                    ("0", "a"),
                    ("0", "b"),
                    ("a", "c"),
                    ("b", "c"),
                    ("c", "1"),
                    ("0", "z"),
                ],
            )
            .unwrap(),
            Poset::new(&["a", "b", "c"], &[]).unwrap(),
        ];
        for p in posets {
            for src in 0..p.len() {
                for dst in 0..p.len() {
                    if !p.lt(src, dst) {
                        continue;
                    }
                    let got = p.chains_between(src, dst, p.len());
                    let interior: Vec<usize> = p
                        .extension()
                        .iter()
                        .copied()
                        .filter(|&r| p.lt(src, r) && p.lt(r, dst))
                        .collect();
                    let mut expect: Vec<Vec<usize>> = Vec::new();
                    for mask in 0u32..(1 << interior.len()) {
                        let subset: Vec<usize> = interior
                            .iter()
                            .enumerate()
                            .filter(|(k, _)| mask >> k & 1 == 1)
                            .map(|(_, &r)| r)
                            .collect();
                        if subset.windows(2).all(|w| p.lt(w[0], w[1])) {
                            expect.push(subset);
                        }
                    }
                    expect.sort_by_key(|c| c.iter().map(|&r| p.position(r)).collect::<Vec<_>>());
                    let mut got_sorted = got.clone();
                    got_sorted
                        .sort_by_key(|c| c.iter().map(|&r| p.position(r)).collect::<Vec<_>>());
                    assert_eq!(got, got_sorted, "lexicographic emission order");
                    assert_eq!(got, expect);
                }
            }
        }
    }
}
