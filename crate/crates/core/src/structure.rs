//! The two parametric families of ml-mzss over `C_m ⊕ C_{mn}`, the
//! `tm - 1` shapes over `C_m ⊕ C_m`, and admissible factorizations for the
//! quotient `C_m ⊕ C_{mn} → C_m ⊕ C_m`.
//!
//! Witness vectors are normalized: Type 1 stores `x_i ∈ [0, ord e_j)`, Type 2
//! stores `x_i ∈ [0, m)`, both sorted nondecreasingly, so a sequence and its
//! witness determine each other.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{cayley, gcd, inductive_quotient, Cayley, GroupElement, GroupSpec};
use crate::sequence::{least_subsequence_with_image_sum, Sequence};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Type1Witness {
    #[serde(serialize_with = "as_text")]
    pub e1: GroupElement,
    #[serde(serialize_with = "as_text")]
    pub e2: GroupElement,
    /// Index of the repeated basis element; `k` is the other one.
    pub j: u8,
    pub x: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Type2Witness {
    #[serde(serialize_with = "as_text")]
    pub g1: GroupElement,
    #[serde(serialize_with = "as_text")]
    pub g2: GroupElement,
    pub s: u32,
    pub x: Vec<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassificationResult {
    pub is_type1: bool,
    pub type1_witnesses: Vec<Type1Witness>,
    pub is_type2: bool,
    pub type2_witnesses: Vec<Type2Witness>,
}

/// `f1^{sm-1} ∏ (a_i f1 + f2)` over `C_m ⊕ C_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Struc1Witness {
    #[serde(serialize_with = "as_text")]
    pub f1: GroupElement,
    #[serde(serialize_with = "as_text")]
    pub f2: GroupElement,
    pub s: u32,
    pub a: Vec<u64>,
}

/// `f1^{s1 m} f2^{s2 m - 1} (b f1 + f2)^{s3 m - 1} (b f1 + 2 f2)` over `C_m ⊕ C_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Struc2Witness {
    #[serde(serialize_with = "as_text")]
    pub f1: GroupElement,
    #[serde(serialize_with = "as_text")]
    pub f2: GroupElement,
    pub s1: u32,
    pub s2: u32,
    pub s3: u32,
    pub b: u64,
}

fn as_text<S: serde::Serializer>(g: &GroupElement, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(g)
}

fn bad(msg: impl Into<String>) -> Error {
    Error::BadWitness(msg.into())
}

fn check_member(group: &GroupSpec, g: &GroupElement, name: &str) -> Result<()> {
    group.validate(g).map_err(|e| bad(format!("{name}: {e}")))
}

/// Validates a Type 1 witness against `G = C_m ⊕ C_{mn}`.
pub fn validate_type1(group: &GroupSpec, w: &Type1Witness) -> Result<()> {
    let (m, n) = group.require_rank_two()?;
    check_member(group, &w.e1, "e1")?;
    check_member(group, &w.e2, "e2")?;
    if w.e1.is_zero() || w.e2.is_zero() || !group.is_basis(&[w.e1.clone(), w.e2.clone()])? {
        return Err(bad("{e1, e2} is not a basis"));
    }
    if group.order_of_unchecked(&w.e2) != m as u64 * n as u64 {
        return Err(bad(format!("ord e2 must be mn = {}", m * n)));
    }
    let (ej, ek) = type1_pair(w)?;
    let oj = group.order_of_unchecked(ej);
    let ok = group.order_of_unchecked(ek);
    if w.x.len() as u64 != ok {
        return Err(bad(format!("x must have ord e_k = {ok} entries, got {}", w.x.len())));
    }
    if let Some(v) = w.x.iter().find(|&&v| v >= oj) {
        return Err(bad(format!("x entry {v} outside [0, {oj})")));
    }
    if (w.x.iter().sum::<u64>() + 1) % oj != 0 {
        return Err(bad(format!("sum of x must be -1 mod {oj}")));
    }
    Ok(())
}

fn type1_pair(w: &Type1Witness) -> Result<(&GroupElement, &GroupElement)> {
    match w.j {
        1 => Ok((&w.e1, &w.e2)),
        2 => Ok((&w.e2, &w.e1)),
        j => Err(bad(format!("j must be 1 or 2, got {j}"))),
    }
}

/// `e_j^{ord e_j - 1} ∏ (-x_i e_j + e_k)`.
pub fn gen_type1(group: &GroupSpec, w: &Type1Witness) -> Result<Sequence> {
    validate_type1(group, w)?;
    let (ej, ek) = type1_pair(w)?;
    let oj = group.order_of_unchecked(ej) as usize;
    let terms =
        w.x.iter()
            .map(|&x| (group.add_unchecked(&group.scale_unchecked(-(x as i64), ej), ek), 1))
            .chain([(ej.clone(), oj - 1)]);
    Sequence::from_terms(group, terms)
}

/// Validates a Type 2 witness against `G = C_m ⊕ C_{mn}`.
pub fn validate_type2(group: &GroupSpec, w: &Type2Witness) -> Result<()> {
    let (m, n) = group.require_rank_two()?;
    check_member(group, &w.g1, "g1")?;
    check_member(group, &w.g2, "g2")?;
    if !group.generates(&[w.g1.clone(), w.g2.clone()])? {
        return Err(bad("{g1, g2} does not generate the group"));
    }
    if group.order_of_unchecked(&w.g2) != m as u64 * n as u64 {
        return Err(bad(format!("ord g2 must be mn = {}", m * n)));
    }
    if w.s < 1 || w.s > n {
        return Err(bad(format!("s must lie in [1, {n}], got {}", w.s)));
    }
    if w.s != 1 && group.scale_unchecked(m as i64, &w.g1) != group.scale_unchecked(m as i64, &w.g2) {
        return Err(Error::MissingCosetCondition);
    }
    let len = ((n + 1 - w.s) * m) as usize;
    if w.x.len() != len {
        return Err(bad(format!("x must have (n+1-s)m = {len} entries, got {}", w.x.len())));
    }
    if let Some(v) = w.x.iter().find(|&&v| v >= m as u64) {
        return Err(bad(format!("x entry {v} outside [0, {m})")));
    }
    if w.x.iter().sum::<u64>() != (m - 1) as u64 {
        return Err(bad(format!("sum of x must be exactly m - 1 = {}", m - 1)));
    }
    Ok(())
}

/// `g1^{sm - 1} ∏ (-x_i g1 + g2)`.
pub fn gen_type2(group: &GroupSpec, w: &Type2Witness) -> Result<Sequence> {
    validate_type2(group, w)?;
    let (m, _) = group.require_rank_two()?;
    let terms =
        w.x.iter()
            .map(|&x| (group.add_unchecked(&group.scale_unchecked(-(x as i64), &w.g1), &w.g2), 1))
            .chain([(w.g1.clone(), (w.s * m - 1) as usize)]);
    Sequence::from_terms(group, terms)
}

/// Ordered element pairs of a rank-two group used by the classifiers.
struct PairTables {
    /// `(e1, e2)` bases with `ord e2 = exp(G)`.
    bases: Vec<(GroupElement, GroupElement)>,
    /// `(g1, g2)` generating pairs with `ord g2 = exp(G)`.
    generating: Vec<(GroupElement, GroupElement)>,
}

fn pair_tables(group: &GroupSpec) -> Result<Arc<PairTables>> {
    type Cache = RwLock<HashMap<GroupSpec, Arc<PairTables>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.read().unwrap().get(group) {
        return Ok(Arc::clone(t));
    }
    let exp = group.exponent() as u64;
    let elems: Vec<GroupElement> = group.elements().collect();
    let mut bases = Vec::new();
    let mut generating = Vec::new();
    for a in &elems {
        for b in elems.iter().filter(|b| group.order_of_unchecked(b) == exp) {
            let pair = [a.clone(), b.clone()];
            if !group.generates(&pair)? {
                continue;
            }
            generating.push((a.clone(), b.clone()));
            if !a.is_zero() && group.is_basis(&pair)? {
                bases.push((a.clone(), b.clone()));
            }
        }
    }
    let tables = Arc::new(PairTables { bases, generating });
    cache.write().unwrap().insert(group.clone(), Arc::clone(&tables));
    Ok(tables)
}

/// Inverts `t ↦ x` on `{-x·g + h : x ∈ [0, bound)}`, which must be injective.
fn offsets(group: &GroupSpec, g: &GroupElement, h: &GroupElement, bound: u64) -> HashMap<GroupElement, u64> {
    (0..bound).map(|x| (group.add_unchecked(&group.scale_unchecked(-(x as i64), g), h), x)).collect()
}

/// Reads `x` off the terms of `rest`, each of which must be `-x·g + h`.
fn solve_offsets(rest: &Sequence, table: &HashMap<GroupElement, u64>) -> Option<Vec<u64>> {
    let mut xs = Vec::with_capacity(rest.len());
    for (t, k) in rest.terms() {
        let &x = table.get(t)?;
        xs.extend(std::iter::repeat_n(x, *k));
    }
    xs.sort_unstable();
    Some(xs)
}

/// All Type 1 and Type 2 witnesses of an ml-mzss over `C_m ⊕ C_{mn}`.
///
/// Type 1: for each basis `(e1, e2)` with `ord e2 = mn` and each `j`, the
/// term `e_j` must occur exactly `ord e_j - 1` times (no other term can equal
/// `e_j` by independence) and every remaining term determines its `x_i`.
/// Type 2: for each generating pair with `ord g2 = mn`, `s` is read off the
/// multiplicity of `g1` (no other term equals `g1`, else `G` is cyclic).
pub fn classify(group: &GroupSpec, seq: &Sequence) -> Result<ClassificationResult> {
    let (m, n) = group.require_rank_two()?;
    if seq.group() != group {
        return Err(Error::GroupMismatch { expected: group.to_string(), got: seq.group().to_string() });
    }
    let d = (m + m * n - 1) as usize;
    if seq.len() != d {
        return Err(Error::NotMlMzss(format!("length {} differs from D(G) = {d}", seq.len())));
    }
    if !seq.is_mzss()? {
        return Err(Error::NotMlMzss("not a minimal zero-sum sequence".into()));
    }
    let tables = pair_tables(group)?;
    let mut result = ClassificationResult::default();

    for (e1, e2) in &tables.bases {
        for j in [1u8, 2] {
            let (ej, ek) = if j == 1 { (e1, e2) } else { (e2, e1) };
            let oj = group.order_of_unchecked(ej);
            if seq.multiplicity(ej) as u64 != oj - 1 {
                continue;
            }
            let rest = seq.without_copies(ej, (oj - 1) as usize).expect("multiplicity checked");
            let Some(x) = solve_offsets(&rest, &offsets(group, ej, ek, oj)) else {
                continue;
            };
            if (x.iter().sum::<u64>() + 1) % oj == 0 {
                result.type1_witnesses.push(Type1Witness { e1: e1.clone(), e2: e2.clone(), j, x });
            }
        }
    }

    for (g1, g2) in &tables.generating {
        let v = seq.multiplicity(g1) as u32;
        if !(v + 1).is_multiple_of(m) {
            continue;
        }
        let s = (v + 1) / m;
        if s < 1 || s > n {
            continue;
        }
        if s != 1 && group.scale_unchecked(m as i64, g1) != group.scale_unchecked(m as i64, g2) {
            continue;
        }
        // ⟨g1, g2⟩ = G and ord g2 = |G|/m force m | ord g1, so x ↦ -x g1 + g2 is injective on [0, m)
        let o1 = group.order_of_unchecked(g1);
        assert_eq!(o1 % m as u64, 0, "generating pair with ord g1 = {o1} not divisible by m = {m}");
        let rest = seq.without_copies(g1, v as usize).expect("multiplicity checked");
        let Some(x) = solve_offsets(&rest, &offsets(group, g1, g2, m as u64)) else {
            continue;
        };
        if x.iter().sum::<u64>() == (m - 1) as u64 {
            result.type2_witnesses.push(Type2Witness { g1: g1.clone(), g2: g2.clone(), s, x });
        }
    }

    result.is_type1 = !result.type1_witnesses.is_empty();
    result.is_type2 = !result.type2_witnesses.is_empty();
    Ok(result)
}

fn require_square(group: &GroupSpec) -> Result<u32> {
    match group.rank_two_params() {
        Some((m, 1)) => Ok(m),
        _ => Err(Error::BadParams(format!("expected C_m + C_m, got {group}"))),
    }
}

fn check_square_basis(group: &GroupSpec, f1: &GroupElement, f2: &GroupElement) -> Result<()> {
    check_member(group, f1, "f1")?;
    check_member(group, f2, "f2")?;
    if f1.is_zero() || f2.is_zero() || !group.is_basis(&[f1.clone(), f2.clone()])? {
        return Err(bad("{f1, f2} is not a basis"));
    }
    Ok(())
}

/// `f1^{sm-1} ∏_{i=1}^{(t-s)m} (a_i f1 + f2)` over `C_m ⊕ C_m`; `t` is
/// recovered from the length of `a`.
pub fn gen_struc1(group: &GroupSpec, w: &Struc1Witness) -> Result<Sequence> {
    let m = require_square(group)?;
    check_square_basis(group, &w.f1, &w.f2)?;
    if !w.a.len().is_multiple_of(m as usize) || w.a.is_empty() {
        return Err(bad(format!("a must have a positive multiple of m = {m} entries")));
    }
    let t = w.s + (w.a.len() / m as usize) as u32;
    if w.s < 1 || w.s > t - 1 {
        return Err(bad(format!("s must lie in [1, t-1], got {}", w.s)));
    }
    if let Some(v) = w.a.iter().find(|&&v| v >= m as u64) {
        return Err(bad(format!("a entry {v} outside [0, {m})")));
    }
    if w.a.iter().sum::<u64>() % m as u64 != 1 % m as u64 {
        return Err(bad("sum of a must be 1 mod m"));
    }
    let terms =
        w.a.iter()
            .map(|&a| (group.add_unchecked(&group.scale_unchecked(a as i64, &w.f1), &w.f2), 1))
            .chain([(w.f1.clone(), (w.s * m - 1) as usize)]);
    Sequence::from_terms(group, terms)
}

/// `f1^{s1 m} f2^{s2 m - 1} (b f1 + f2)^{s3 m - 1} (b f1 + 2 f2)` over `C_m ⊕ C_m`.
pub fn gen_struc2(group: &GroupSpec, w: &Struc2Witness) -> Result<Sequence> {
    let m = require_square(group)?;
    check_square_basis(group, &w.f1, &w.f2)?;
    if w.s1 < 1 || w.s2 < 1 || w.s3 < 1 {
        return Err(bad("s1, s2, s3 must be positive"));
    }
    if w.b < 1 || w.b >= m as u64 || gcd(w.b, m as u64) != 1 {
        return Err(bad(format!("b must lie in [1, m) and be coprime to m = {m}")));
    }
    let bf1 = group.scale_unchecked(w.b as i64, &w.f1);
    let terms = [
        (w.f1.clone(), (w.s1 * m) as usize),
        (w.f2.clone(), (w.s2 * m - 1) as usize),
        (group.add_unchecked(&bf1, &w.f2), (w.s3 * m - 1) as usize),
        (group.add_unchecked(&bf1, &group.scale_unchecked(2, &w.f2)), 1),
    ];
    Sequence::from_terms(group, terms)
}

/// Ordered bases `(e1, e2)` of a rank-two group with `ord e2 = exp(G)`.
pub(crate) fn pair_bases(group: &GroupSpec) -> Result<Vec<(GroupElement, GroupElement)>> {
    Ok(pair_tables(group)?.bases.clone())
}

/// Ordered generating pairs `(g1, g2)` with `ord g2 = exp(G)`.
pub(crate) fn pair_generating(group: &GroupSpec) -> Result<Vec<(GroupElement, GroupElement)>> {
    Ok(pair_tables(group)?.generating.clone())
}

/// All Struc1 witnesses of `seq` (length `tm - 1`) over `C_m ⊕ C_m`.
pub fn match_struc1(group: &GroupSpec, seq: &Sequence, t: u32) -> Result<Vec<Struc1Witness>> {
    let m = require_square(group)?;
    if seq.len() + 1 != (t * m) as usize {
        return Err(Error::BadLength { expected: (t * m - 1) as usize, got: seq.len() });
    }
    let mut out = Vec::new();
    for (f1, f2) in pair_bases(group)? {
        let v = seq.multiplicity(&f1) as u32;
        if !(v + 1).is_multiple_of(m) {
            continue;
        }
        let s = (v + 1) / m;
        if s < 1 || s + 1 > t {
            continue;
        }
        let rest = seq.without_copies(&f1, v as usize).expect("multiplicity checked");
        // a f1 + f2 = -(-a) f1 + f2: reuse the offset table with negated a
        let table: HashMap<GroupElement, u64> =
            (0..m as u64).map(|a| (group.add_unchecked(&group.scale_unchecked(a as i64, &f1), &f2), a)).collect();
        let Some(a) = solve_offsets(&rest, &table) else {
            continue;
        };
        if a.iter().sum::<u64>() % m as u64 == 1 % m as u64 {
            out.push(Struc1Witness { f1, f2, s, a });
        }
    }
    Ok(out)
}

/// All Struc2 witnesses of `seq` over `C_m ⊕ C_m`; empty when `t < 3`.
pub fn match_struc2(group: &GroupSpec, seq: &Sequence, t: u32) -> Result<Vec<Struc2Witness>> {
    let m = require_square(group)?;
    let mut out = Vec::new();
    if t < 3 {
        return Ok(out);
    }
    for (f1, f2) in pair_bases(group)? {
        for b in (1..m as u64).filter(|&b| gcd(b, m as u64) == 1) {
            for s1 in 1..t - 1 {
                for s2 in 1..t - s1 {
                    let s3 = t - s1 - s2;
                    let w = Struc2Witness { f1: f1.clone(), f2: f2.clone(), s1, s2, s3, b };
                    if gen_struc2(group, &w)? == *seq {
                        out.push(w);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// A factorization `T = S_0 S_1 ⋯ S_{n-s}` with `|S_i| = m` for all `i` and
/// `σ(φ(S_i)) = 0` for `i ≥ 1`, where `φ` is the quotient onto `C_m ⊕ C_m`.
///
/// Blocks are taken greedily as the least admissible subsequence of what
/// remains; if the greedy pass gets stuck, a backtracking search over
/// nondecreasing block choices decides existence. `S_0` is returned first and
/// its own image sum is left for the caller to inspect.
pub fn find_admissible_factorization(m: u32, n: u32, s: u32, seq: &Sequence) -> Result<Option<Vec<Sequence>>> {
    let phi = inductive_quotient(m, n)?;
    if seq.group() != phi.source() {
        return Err(Error::GroupMismatch { expected: phi.source().to_string(), got: seq.group().to_string() });
    }
    if s < 1 || s > n {
        return Err(Error::BadParams(format!("s must lie in [1, {n}], got {s}")));
    }
    let expected = ((n + 1 - s) * m) as usize;
    if seq.len() != expected {
        return Err(Error::BadLength { expected, got: seq.len() });
    }
    let blocks = (n - s) as usize;
    let zero = phi.target().zero();

    let mut rest = seq.clone();
    let mut greedy = Vec::with_capacity(blocks);
    for _ in 0..blocks {
        match least_subsequence_with_image_sum(&rest, m as usize, Some(&phi), &zero)? {
            Some(block) => {
                rest = rest.without(&block).expect("block divides remainder");
                greedy.push(block);
            }
            None => break,
        }
    }
    if greedy.len() == blocks {
        let mut out = vec![rest];
        out.extend(greedy);
        return Ok(Some(out));
    }

    let images = phi.index_table();
    let table = cayley(phi.target());
    let mut chosen = Vec::with_capacity(blocks);
    if backtrack_blocks(seq, m as usize, blocks, &images, &table, &mut chosen)? {
        let mut rest = seq.clone();
        for b in &chosen {
            rest = rest.without(b).expect("block divides remainder");
        }
        let mut out = vec![rest];
        out.extend(chosen);
        return Ok(Some(out));
    }
    Ok(None)
}

fn backtrack_blocks(
    rest: &Sequence,
    m: usize,
    remaining: usize,
    phi: &[u32],
    table: &Cayley,
    chosen: &mut Vec<Sequence>,
) -> Result<bool> {
    if remaining == 0 {
        return Ok(true);
    }
    let lower = chosen.last().cloned();
    for block in admissible_blocks(rest, m, phi, table) {
        if lower.as_ref().is_some_and(|l| block < *l) {
            continue;
        }
        let next = rest.without(&block).expect("block divides remainder");
        chosen.push(block);
        if backtrack_blocks(&next, m, remaining - 1, phi, table, chosen)? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}

/// Sub-multisets of size `m` whose image sum is zero, in increasing order.
fn admissible_blocks(seq: &Sequence, m: usize, phi: &[u32], table: &Cayley) -> Vec<Sequence> {
    struct Walk<'a> {
        support: Vec<(usize, usize)>,
        phi: &'a [u32],
        table: &'a Cayley,
        picked: Vec<usize>,
        out: Vec<Vec<usize>>,
    }
    impl Walk<'_> {
        // more copies of a smaller element sort first in the expanded order
        fn rec(&mut self, pos: usize, need: usize, sum: usize) {
            if need == 0 {
                if sum == 0 {
                    self.out.push(self.picked.clone());
                }
                return;
            }
            let Some(&(g, k)) = self.support.get(pos) else {
                return;
            };
            let img = self.phi[g] as usize;
            let mut sums = vec![sum];
            for _ in 0..k.min(need) {
                sums.push(self.table.add(*sums.last().unwrap(), img));
            }
            for c in (0..=k.min(need)).rev() {
                self.picked.extend(std::iter::repeat_n(g, c));
                self.rec(pos + 1, need - c, sums[c]);
                self.picked.truncate(self.picked.len() - c);
            }
        }
    }
    let group = seq.group();
    let support = seq.terms().iter().map(|(g, k)| (group.index_of(g), *k)).collect();
    let mut walk = Walk { support, phi, table, picked: Vec::with_capacity(m), out: Vec::new() };
    walk.rec(0, m, 0);
    walk.out.into_iter().map(|b| Sequence::from_indices(group, &b)).collect()
}
