//! Sequences over a group: finite multisets of elements.
//!
//! The encoding is canonical: terms are sorted by the element order and each
//! element appears once with its multiplicity. Sequences themselves are
//! ordered by comparing their expanded (nondecreasing) term lists
//! lexicographically; every "least witness" in the crate refers to this order.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::group::{cayley, Cayley, GroupElement, GroupSpec, Homomorphism, DEFAULT_ARITHMETIC_CAP};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sequence {
    group: GroupSpec,
    terms: Vec<(GroupElement, usize)>,
}

impl Sequence {
    pub fn empty(group: &GroupSpec) -> Self {
        Sequence { group: group.clone(), terms: Vec::new() }
    }

    /// Builds the canonical sequence from a list of elements (any order, repeats allowed).
    pub fn from_elements<I>(group: &GroupSpec, elems: I) -> Result<Self>
    where
        I: IntoIterator<Item = GroupElement>,
    {
        Self::from_terms(group, elems.into_iter().map(|g| (g, 1)))
    }

    /// Builds the canonical sequence from `(element, multiplicity)` pairs,
    /// merging repeated elements and dropping zero multiplicities.
    pub fn from_terms<I>(group: &GroupSpec, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (GroupElement, usize)>,
    {
        let mut terms: Vec<(GroupElement, usize)> = terms.into_iter().filter(|(_, k)| *k > 0).collect();
        for (g, _) in &terms {
            group.validate(g)?;
        }
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(GroupElement, usize)> = Vec::with_capacity(terms.len());
        for (g, k) in terms {
            match merged.last_mut() {
                Some((last, count)) if *last == g => *count += k,
                _ => merged.push((g, k)),
            }
        }
        Ok(Sequence { group: group.clone(), terms: merged })
    }

    /// Builds a sequence from dense element indices.
    pub(crate) fn from_indices(group: &GroupSpec, indices: &[usize]) -> Self {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        let mut terms: Vec<(GroupElement, usize)> = Vec::new();
        let mut i = 0;
        while i < sorted.len() {
            let j = sorted[i..].iter().take_while(|&&x| x == sorted[i]).count();
            terms.push((group.element_at(sorted[i]), j));
            i += j;
        }
        Sequence { group: group.clone(), terms }
    }

    /// Parses `term (' ' term)*` where a term is `[r1,...,rr]` or `[r1,...,rr]^k`.
    /// Residues are reduced; the empty string is the empty sequence.
    pub fn parse(group: &GroupSpec, text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for token in text.split_whitespace() {
            let (body, mult) = match token.split_once('^') {
                Some((body, k)) => {
                    let k: usize =
                        k.parse().map_err(|_| Error::SyntaxError(format!("bad multiplicity in `{token}`")))?;
                    if k == 0 {
                        return Err(Error::SyntaxError(format!("multiplicity must be >= 1 in `{token}`")));
                    }
                    (body, k)
                }
                None => (token, 1),
            };
            let inner = body
                .strip_prefix('[')
                .and_then(|b| b.strip_suffix(']'))
                .ok_or_else(|| Error::SyntaxError(format!("expected `[r1,...,rr]`, got `{token}`")))?;
            let residues = if inner.is_empty() {
                Vec::new()
            } else {
                inner
                    .split(',')
                    .map(|r| {
                        r.parse::<i64>().map_err(|_| Error::SyntaxError(format!("bad residue `{r}` in `{token}`")))
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            terms.push((group.element(&residues)?, mult));
        }
        Self::from_terms(group, terms)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    /// Sorted `(element, multiplicity)` pairs.
    pub fn terms(&self) -> &[(GroupElement, usize)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.iter().map(|(_, k)| k).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.terms.iter().map(|(g, _)| g)
    }

    pub fn multiplicity(&self, g: &GroupElement) -> usize {
        self.terms.binary_search_by(|(h, _)| h.cmp(g)).map(|i| self.terms[i].1).unwrap_or(0)
    }

    /// Terms with repetition, in nondecreasing order.
    pub fn expanded(&self) -> impl Iterator<Item = &GroupElement> {
        self.terms.iter().flat_map(|(g, k)| std::iter::repeat_n(g, *k))
    }

    pub(crate) fn indices(&self) -> Vec<usize> {
        self.terms.iter().flat_map(|(g, k)| std::iter::repeat_n(self.group.index_of(g), *k)).collect()
    }

    pub fn max_term(&self) -> Option<&GroupElement> {
        self.terms.last().map(|(g, _)| g)
    }

    pub fn min_term(&self) -> Option<&GroupElement> {
        self.terms.first().map(|(g, _)| g)
    }

    /// The product `self · other`.
    pub fn concat(&self, other: &Sequence) -> Result<Sequence> {
        self.same_group(other)?;
        Self::from_terms(&self.group, self.terms.iter().chain(&other.terms).cloned())
    }

    /// `self · g^k`.
    pub fn with(&self, g: &GroupElement, k: usize) -> Result<Sequence> {
        Self::from_terms(&self.group, self.terms.iter().cloned().chain([(g.clone(), k)]))
    }

    pub fn divides(&self, other: &Sequence) -> bool {
        self.group == other.group && self.terms.iter().all(|(g, k)| other.multiplicity(g) >= *k)
    }

    /// The co-divisor `part⁻¹ · self`, if `part` divides `self`.
    pub fn without(&self, part: &Sequence) -> Option<Sequence> {
        if !part.divides(self) {
            return None;
        }
        let terms = self.terms.iter().map(|(g, k)| (g.clone(), k - part.multiplicity(g)));
        Self::from_terms(&self.group, terms).ok()
    }

    /// Removes `k` copies of `g`, if present.
    pub fn without_copies(&self, g: &GroupElement, k: usize) -> Option<Sequence> {
        if self.multiplicity(g) < k {
            return None;
        }
        let terms = self.terms.iter().map(|(h, c)| (h.clone(), if h == g { c - k } else { *c }));
        Self::from_terms(&self.group, terms).ok()
    }

    fn same_group(&self, other: &Sequence) -> Result<()> {
        if self.group != other.group {
            return Err(Error::GroupMismatch { expected: self.group.to_string(), got: other.group.to_string() });
        }
        Ok(())
    }

    /// Sum of all terms; zero for the empty sequence.
    pub fn sigma(&self) -> GroupElement {
        self.terms.iter().fold(self.group.zero(), |acc, (g, k)| {
            self.group.add_unchecked(&acc, &self.group.scale_unchecked(*k as i64, g))
        })
    }

    /// Image of the sequence under `f`; terms with equal images merge.
    pub fn apply_hom(&self, f: &Homomorphism) -> Result<Sequence> {
        if f.source() != &self.group {
            return Err(Error::GroupMismatch { expected: f.source().to_string(), got: self.group.to_string() });
        }
        Self::from_terms(f.target(), self.terms.iter().map(|(g, k)| (f.apply_unchecked(g), *k)))
    }

    /// `{σ(T) : 1 ≠ T | S}` by dynamic programming, one term copy at a time.
    pub fn reachable_subsums(&self) -> Result<SumSet> {
        self.group.check_cap(DEFAULT_ARITHMETIC_CAP)?;
        let table = cayley(&self.group);
        let mut reachable = vec![false; table.n];
        let mut members: Vec<usize> = Vec::new();
        for g in self.indices() {
            let before = members.len();
            for i in 0..before {
                let s = table.add(members[i], g);
                if !reachable[s] {
                    reachable[s] = true;
                    members.push(s);
                }
            }
            if !reachable[g] {
                reachable[g] = true;
                members.push(g);
            }
        }
        Ok(SumSet { group: self.group.clone(), reachable })
    }

    /// No nonempty subsequence sums to zero. The empty sequence qualifies.
    pub fn is_zero_sum_free(&self) -> Result<bool> {
        Ok(!self.reachable_subsums()?.contains(&self.group.zero()))
    }

    /// Nonempty, zero-sum, and no proper nonempty zero-sum subsequence.
    ///
    /// Checked as `σ(S) = 0` plus zero-sum freeness of `S` with one copy of
    /// its least term removed: a proper zero-sum `T | S` either avoids that
    /// copy or its complement `T⁻¹S` (also zero-sum) does.
    pub fn is_mzss(&self) -> Result<bool> {
        let Some(first) = self.min_term() else {
            return Ok(false);
        };
        if !self.sigma().is_zero() {
            return Ok(false);
        }
        self.without_copies(first, 1).expect("least term present").is_zero_sum_free()
    }

    /// Largest `k` with `S = S_1 ⋯ S_k`, each `S_i` a nonempty zero-sum sequence.
    pub fn zss_max_factors(&self) -> Result<usize> {
        if !self.sigma().is_zero() {
            return Err(Error::NotZeroSum);
        }
        self.group.check_cap(DEFAULT_ARITHMETIC_CAP)?;
        let table = cayley(&self.group);
        let support: Vec<usize> = self.terms.iter().map(|(g, _)| self.group.index_of(g)).collect();
        let counts: Vec<usize> = self.terms.iter().map(|(_, k)| *k).collect();
        let mut memo = HashMap::new();
        Ok(max_factors(&table, &support, counts, &mut memo))
    }

    /// The least subsequence `T | S` with `|T| = len` and `σ(T) = 0`, if any.
    pub fn extract_zero_sum_of_length(&self, len: usize) -> Result<Option<Sequence>> {
        if len == 0 {
            return Err(Error::BadParams("length must be at least 1".into()));
        }
        least_subsequence_with_image_sum(self, len, None, &self.group.zero())
    }
}

// f(c) = 1 + max over zero-sum T | c containing one copy of the least
// remaining term of f(c - T). Every factorization has a factor holding that
// copy, so this covers all factorizations.
fn max_factors(table: &Cayley, support: &[usize], counts: Vec<usize>, memo: &mut HashMap<Vec<usize>, usize>) -> usize {
    let Some(first) = counts.iter().position(|&c| c > 0) else {
        return 0;
    };
    if let Some(&v) = memo.get(&counts) {
        return v;
    }
    let mut best = 0;
    let mut take = vec![0usize; counts.len()];
    take[first] = 1;
    loop {
        let sum = take.iter().zip(support).fold(0usize, |acc, (&k, &g)| (0..k).fold(acc, |a, _| table.add(a, g)));
        if sum == 0 {
            let rest: Vec<usize> = counts.iter().zip(&take).map(|(c, t)| c - t).collect();
            best = best.max(1 + max_factors(table, support, rest, memo));
        }
        // odometer over take[i] ∈ [0, counts[i]], with take[first] ≥ 1
        let mut i = first;
        loop {
            if i == counts.len() {
                memo.insert(counts, best);
                return best;
            }
            let low = usize::from(i == first);
            if take[i] < counts[i] {
                take[i] += 1;
                break;
            }
            take[i] = low;
            i += 1;
        }
    }
}

/// The least subsequence `T | S` (in the expanded lexicographic order) with
/// `|T| = len` and `f(σ(T)) = target`, where `f` is the identity when `None`.
///
/// Cardinality-indexed subset-sum DP over suffixes of the expanded sequence,
/// followed by greedy reconstruction from the front.
pub(crate) fn least_subsequence_with_image_sum(
    seq: &Sequence,
    len: usize,
    f: Option<&Homomorphism>,
    target: &GroupElement,
) -> Result<Option<Sequence>> {
    seq.group.check_cap(DEFAULT_ARITHMETIC_CAP)?;
    let image_group = f.map(|h| h.target()).unwrap_or(&seq.group);
    image_group.check_cap(DEFAULT_ARITHMETIC_CAP)?;
    image_group.validate(target)?;
    if let Some(h) = f {
        if h.source() != &seq.group {
            return Err(Error::GroupMismatch { expected: h.source().to_string(), got: seq.group.to_string() });
        }
    }
    let terms = seq.indices();
    let total = terms.len();
    if len > total {
        return Ok(None);
    }
    let table = cayley(image_group);
    let n = table.n;
    let images: Vec<usize> = match f {
        Some(h) => {
            let map = h.index_table();
            terms.iter().map(|&t| map[t] as usize).collect()
        }
        None => terms.clone(),
    };
    // feasible[p][k][s]: k terms from positions p.. can sum to s
    let idx = |p: usize, k: usize, s: usize| (p * (len + 1) + k) * n + s;
    let mut feasible = vec![false; (total + 1) * (len + 1) * n];
    feasible[idx(total, 0, 0)] = true;
    for p in (0..total).rev() {
        for k in 0..=len {
            for s in 0..n {
                let mut ok = feasible[idx(p + 1, k, s)];
                if !ok && k > 0 {
                    let prev = table.add(s, table.neg[images[p]] as usize);
                    ok = feasible[idx(p + 1, k - 1, prev)];
                }
                feasible[idx(p, k, s)] = ok;
            }
        }
    }
    let mut want = image_group.index_of(target);
    if !feasible[idx(0, len, want)] {
        return Ok(None);
    }
    let mut chosen = Vec::with_capacity(len);
    let mut p = 0;
    for k in (1..=len).rev() {
        loop {
            let rest = table.add(want, table.neg[images[p]] as usize);
            if feasible[idx(p + 1, k - 1, rest)] {
                chosen.push(terms[p]);
                want = rest;
                p += 1;
                break;
            }
            p += 1;
        }
    }
    Ok(Some(Sequence::from_indices(&seq.group, &chosen)))
}

impl Ord for Sequence {
    fn cmp(&self, other: &Self) -> Ordering {
        self.group.cmp(&other.group).then_with(|| self.expanded().cmp(other.expanded()))
    }
}

impl PartialOrd for Sequence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Sequence {
    /// Canonical text: sorted terms, `^k` only when `k > 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (g, k)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{g}")?;
            if *k > 1 {
                write!(f, "^{k}")?;
            }
        }
        Ok(())
    }
}

/// Elements reachable as sums of nonempty subsequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumSet {
    group: GroupSpec,
    reachable: Vec<bool>,
}

impl SumSet {
    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.reachable[self.group.index_of(g)]
    }

    pub fn len(&self) -> usize {
        self.reachable.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Reachable elements in increasing order.
    pub fn elements(&self) -> Vec<GroupElement> {
        self.reachable.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| self.group.element_at(i)).collect()
    }

    pub fn is_subset(&self, other: &SumSet) -> bool {
        self.group == other.group && self.reachable.iter().zip(&other.reachable).all(|(&a, &b)| !a || b)
    }
}
