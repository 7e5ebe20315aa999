//! Finite abelian groups in invariant-factor form.
//!
//! A group is stored as its chain `n_1 | n_2 | ... | n_r` and elements are
//! residue vectors in those coordinates. Elements are totally ordered
//! lexicographically by residues; the same order is used for the dense
//! element index (first coordinate most significant), so comparing indices
//! and comparing elements agree.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};

/// Default cap on `|G|` for table-driven arithmetic.
pub const DEFAULT_ARITHMETIC_CAP: usize = 256;
/// Default cap on `|G|` for automorphism enumeration.
pub const DEFAULT_AUTOMORPHISM_CAP: usize = 64;
/// Hard limit on `|Aut(G)|`; enumeration stops with `CapExceeded` beyond it.
const MAX_AUTOMORPHISMS: usize = 200_000;

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupSpec {
    factors: Vec<u32>,
}

impl GroupSpec {
    /// Validates an invariant-factor chain. The empty chain is the trivial group.
    pub fn new(invariant_factors: &[i64]) -> Result<Self> {
        let mut factors = Vec::with_capacity(invariant_factors.len());
        for &f in invariant_factors {
            if f < 2 {
                return Err(Error::BadFactor(f));
            }
            let f = u32::try_from(f).map_err(|_| Error::BadParams(format!("factor {f} too large")))?;
            if let Some(&prev) = factors.last() {
                if f % prev != 0 {
                    return Err(Error::ChainViolation { prev, next: f });
                }
            }
            factors.push(f);
        }
        let spec = GroupSpec { factors };
        if spec.order_u128() > u64::MAX as u128 {
            return Err(Error::BadParams("group order overflows".into()));
        }
        Ok(spec)
    }

    pub fn trivial() -> Self {
        GroupSpec { factors: Vec::new() }
    }

    /// `C_n`; `n = 1` gives the trivial group.
    pub fn cyclic(n: u32) -> Result<Self> {
        if n == 1 {
            return Ok(Self::trivial());
        }
        Self::new(&[n as i64])
    }

    /// `C_m ⊕ C_{mn}` in standard coordinates.
    pub fn rank_two(m: u32, n: u32) -> Result<Self> {
        if m < 2 || n < 1 {
            return Err(Error::BadParams(format!("need m >= 2 and n >= 1, got m={m}, n={n}")));
        }
        Self::new(&[m as i64, (m as i64) * (n as i64)])
    }

    pub fn invariant_factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    fn order_u128(&self) -> u128 {
        self.factors.iter().map(|&f| f as u128).product()
    }

    pub fn order(&self) -> usize {
        self.factors.iter().map(|&f| f as usize).product()
    }

    pub fn exponent(&self) -> u32 {
        self.factors.last().copied().unwrap_or(1)
    }

    /// `(m, n)` when the group is `C_m ⊕ C_{mn}` with `m >= 2`.
    pub fn rank_two_params(&self) -> Option<(u32, u32)> {
        match self.factors[..] {
            [m, mn] => Some((m, mn / m)),
            _ => None,
        }
    }

    pub(crate) fn require_rank_two(&self) -> Result<(u32, u32)> {
        self.rank_two_params().ok_or_else(|| Error::NotRankTwo(self.to_string()))
    }

    pub(crate) fn check_cap(&self, cap: usize) -> Result<()> {
        let order = self.order();
        if order > cap {
            return Err(Error::CapExceeded { order, cap });
        }
        Ok(())
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    /// Builds an element from arbitrary integers, reducing each into range.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement> {
        self.check_dim(residues.len())?;
        Ok(GroupElement(residues.iter().zip(&self.factors).map(|(&r, &n)| r.rem_euclid(n as i64) as u32).collect()))
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got });
        }
        Ok(())
    }

    /// Checks that `g` has the right rank and reduced residues.
    pub fn validate(&self, g: &GroupElement) -> Result<()> {
        self.check_dim(g.0.len())?;
        for (&r, &n) in g.0.iter().zip(&self.factors) {
            if r >= n {
                return Err(Error::BadParams(format!("residue {r} not reduced modulo {n}")));
            }
        }
        Ok(())
    }

    /// Dense index of `g`; increasing index is increasing lexicographic order.
    pub fn index_of(&self, g: &GroupElement) -> usize {
        g.0.iter().zip(&self.factors).fold(0usize, |acc, (&r, &n)| acc * n as usize + r as usize)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut residues = vec![0u32; self.rank()];
        for (slot, &n) in residues.iter_mut().zip(&self.factors).rev() {
            *slot = (index % n as usize) as u32;
            index /= n as usize;
        }
        GroupElement(residues)
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order()).map(|i| self.element_at(i))
    }

    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check_dim(g.0.len())?;
        self.check_dim(h.0.len())?;
        Ok(self.add_unchecked(g, h))
    }

    pub(crate) fn add_unchecked(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        GroupElement(
            g.0.iter()
                .zip(&h.0)
                .zip(&self.factors)
                .map(|((&a, &b), &n)| ((a as u64 + b as u64) % n as u64) as u32)
                .collect(),
        )
    }

    pub fn neg(&self, g: &GroupElement) -> Result<GroupElement> {
        self.scale(-1, g)
    }

    pub fn sub(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        let minus_h = self.neg(h)?;
        self.add(g, &minus_h)
    }

    /// `k·g` for any integer `k`.
    pub fn scale(&self, k: i64, g: &GroupElement) -> Result<GroupElement> {
        self.check_dim(g.0.len())?;
        Ok(self.scale_unchecked(k, g))
    }

    pub(crate) fn scale_unchecked(&self, k: i64, g: &GroupElement) -> GroupElement {
        GroupElement(
            g.0.iter()
                .zip(&self.factors)
                .map(|(&r, &n)| {
                    let k = k.rem_euclid(n as i64) as u64;
                    (k * r as u64 % n as u64) as u32
                })
                .collect(),
        )
    }

    /// Least `k >= 1` with `k·g = 0`.
    pub fn order_of(&self, g: &GroupElement) -> Result<u64> {
        self.check_dim(g.0.len())?;
        Ok(self.order_of_unchecked(g))
    }

    pub(crate) fn order_of_unchecked(&self, g: &GroupElement) -> u64 {
        g.0.iter().zip(&self.factors).map(|(&r, &n)| n as u64 / gcd(n as u64, r as u64)).fold(1, lcm)
    }

    /// Independence by exhaustive search over the coefficient box
    /// `∏ [0, ord g_i)`: only the all-zero coefficient vector may sum to zero.
    pub fn is_independent(&self, elems: &[GroupElement]) -> Result<bool> {
        for g in elems {
            self.check_dim(g.0.len())?;
            if g.is_zero() {
                return Err(Error::ZeroElement);
            }
        }
        let orders: Vec<u64> = elems.iter().map(|g| self.order_of_unchecked(g)).collect();
        let mut coeffs = vec![0u64; elems.len()];
        loop {
            // odometer increment; the first state (all zero) is skipped
            let mut i = 0;
            loop {
                if i == coeffs.len() {
                    return Ok(true);
                }
                coeffs[i] += 1;
                if coeffs[i] < orders[i] {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
            let sum = coeffs
                .iter()
                .zip(elems)
                .fold(self.zero(), |acc, (&c, g)| self.add_unchecked(&acc, &self.scale_unchecked(c as i64, g)));
            if sum.is_zero() {
                return Ok(false);
            }
        }
    }

    /// Independent and generating; equivalently independent with `∏ ord g_i = |G|`.
    pub fn is_basis(&self, elems: &[GroupElement]) -> Result<bool> {
        if !self.is_independent(elems)? {
            return Ok(false);
        }
        let product: u128 = elems.iter().map(|g| self.order_of_unchecked(g) as u128).product();
        Ok(product == self.order() as u128)
    }

    /// Closure of `elems` under addition, always containing zero.
    pub fn subgroup_generated(&self, elems: &[GroupElement]) -> Result<BTreeSet<GroupElement>> {
        for g in elems {
            self.check_dim(g.0.len())?;
        }
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([self.zero()]);
        seen.insert(self.zero());
        while let Some(x) = queue.pop_front() {
            for g in elems {
                let y = self.add_unchecked(&x, g);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        Ok(seen)
    }

    pub fn generates(&self, elems: &[GroupElement]) -> Result<bool> {
        Ok(self.subgroup_generated(elems)?.len() == self.order())
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|n| n.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Comma-separated invariant factors, e.g. `2,4`. Empty text is the trivial group.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::trivial());
        }
        let factors = s
            .split(',')
            .map(|p| {
                p.trim().parse::<i64>().map_err(|_| Error::SyntaxError(format!("bad invariant factor `{}`", p.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&factors)
    }
}

/// A residue vector in invariant-factor coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(Vec<u32>);

impl GroupElement {
    pub fn residues(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&r| r == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("]")
    }
}

/// A group homomorphism given by the images of the standard generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Homomorphism {
    source: GroupSpec,
    target: GroupSpec,
    images: Vec<GroupElement>,
}

impl Homomorphism {
    /// Fails unless `n_i · images[i] = 0` in the target for every generator.
    pub fn new(source: GroupSpec, target: GroupSpec, images: Vec<GroupElement>) -> Result<Self> {
        if images.len() != source.rank() {
            return Err(Error::DimensionMismatch { expected: source.rank(), got: images.len() });
        }
        for (img, &n) in images.iter().zip(source.invariant_factors()) {
            target.validate(img)?;
            if !target.scale_unchecked(n as i64, img).is_zero() {
                return Err(Error::BadParams(format!("image {img} of a generator of order {n} is not killed by {n}")));
            }
        }
        Ok(Homomorphism { source, target, images })
    }

    pub fn identity(group: &GroupSpec) -> Self {
        let images = (0..group.rank())
            .map(|i| {
                let mut r = vec![0u32; group.rank()];
                r[i] = 1;
                GroupElement(r)
            })
            .collect();
        Homomorphism { source: group.clone(), target: group.clone(), images }
    }

    pub fn source(&self) -> &GroupSpec {
        &self.source
    }

    pub fn target(&self) -> &GroupSpec {
        &self.target
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn apply(&self, g: &GroupElement) -> Result<GroupElement> {
        self.source.validate(g)?;
        Ok(self.apply_unchecked(g))
    }

    pub(crate) fn apply_unchecked(&self, g: &GroupElement) -> GroupElement {
        g.0.iter().zip(&self.images).fold(self.target.zero(), |acc, (&c, img)| {
            self.target.add_unchecked(&acc, &self.target.scale_unchecked(c as i64, img))
        })
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Homomorphism) -> Result<Homomorphism> {
        if inner.target != self.source {
            return Err(Error::GroupMismatch { expected: self.source.to_string(), got: inner.target.to_string() });
        }
        let images = inner.images.iter().map(|g| self.apply_unchecked(g)).collect();
        Ok(Homomorphism { source: inner.source.clone(), target: self.target.clone(), images })
    }

    pub fn kernel(&self) -> Vec<GroupElement> {
        self.source.elements().filter(|g| self.apply_unchecked(g).is_zero()).collect()
    }

    pub fn is_surjective(&self) -> bool {
        self.target.generates(&self.images).unwrap_or(false)
    }

    /// The map as a permutation of dense element indices (source order).
    pub(crate) fn index_table(&self) -> Vec<u32> {
        self.source.elements().map(|g| self.target.index_of(&self.apply_unchecked(&g)) as u32).collect()
    }
}

/// The quotient map `C_m ⊕ C_{mn} → C_m ⊕ C_m`, `(a, b) ↦ (a mod m, b mod m)`,
/// whose kernel is `mG = ⟨(0, m)⟩ ≅ C_n`.
pub fn inductive_quotient(m: u32, n: u32) -> Result<Homomorphism> {
    if m < 2 || n < 1 {
        return Err(Error::BadParams(format!("need m >= 2 and n >= 1, got m={m}, n={n}")));
    }
    let source = GroupSpec::rank_two(m, n)?;
    let target = GroupSpec::rank_two(m, 1)?;
    let images = vec![GroupElement(vec![1, 0]), GroupElement(vec![0, 1])];
    Homomorphism::new(source, target, images)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    First,
    Second,
}

/// Projection onto `⟨basis[axis]⟩` along the other basis element.
pub fn projection(group: &GroupSpec, basis: (&GroupElement, &GroupElement), axis: Axis) -> Result<Homomorphism> {
    let (b1, b2) = basis;
    if b1.is_zero() || b2.is_zero() || !group.is_basis(&[b1.clone(), b2.clone()])? {
        return Err(Error::NotABasis);
    }
    let o1 = group.order_of_unchecked(b1);
    let o2 = group.order_of_unchecked(b2);
    // coordinates of every element with respect to the basis, by brute force
    let mut coords: HashMap<GroupElement, (u64, u64)> = HashMap::with_capacity(group.order());
    for c1 in 0..o1 {
        let x1 = group.scale_unchecked(c1 as i64, b1);
        for c2 in 0..o2 {
            let x = group.add_unchecked(&x1, &group.scale_unchecked(c2 as i64, b2));
            coords.insert(x, (c1, c2));
        }
    }
    let images = Homomorphism::identity(group)
        .images
        .iter()
        .map(|u| {
            let (c1, c2) = coords[u];
            match axis {
                Axis::First => group.scale_unchecked(c1 as i64, b1),
                Axis::Second => group.scale_unchecked(c2 as i64, b2),
            }
        })
        .collect();
    Homomorphism::new(group.clone(), group.clone(), images)
}

type AutCache = RwLock<HashMap<GroupSpec, Arc<Vec<Homomorphism>>>>;

fn aut_cache() -> &'static AutCache {
    static CACHE: OnceLock<AutCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// All automorphisms with the default cap.
pub fn automorphisms(group: &GroupSpec) -> Result<Arc<Vec<Homomorphism>>> {
    automorphisms_with_cap(group, DEFAULT_AUTOMORPHISM_CAP)
}

/// All automorphisms of `group`, sorted by generator-image tuples. Results
/// are cached per group; concurrent writers compute identical lists.
pub fn automorphisms_with_cap(group: &GroupSpec, cap: usize) -> Result<Arc<Vec<Homomorphism>>> {
    group.check_cap(cap)?;
    if let Some(found) = aut_cache().read().unwrap().get(group) {
        return Ok(Arc::clone(found));
    }
    let computed = Arc::new(enumerate_automorphisms(group)?);
    aut_cache().write().unwrap().insert(group.clone(), Arc::clone(&computed));
    Ok(computed)
}

fn enumerate_automorphisms(group: &GroupSpec) -> Result<Vec<Homomorphism>> {
    let candidates: Vec<Vec<GroupElement>> = group
        .invariant_factors()
        .iter()
        .map(|&n| group.elements().filter(|g| group.order_of_unchecked(g) == n as u64).collect())
        .collect();
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(group.rank());
    extend_automorphism(group, &candidates, &mut chosen, 1, &mut out)?;
    Ok(out)
}

// Images are chosen generator by generator; a prefix survives only while the
// chosen images generate a subgroup of the expected size `n_1 ⋯ n_k`.
fn extend_automorphism(
    group: &GroupSpec,
    candidates: &[Vec<GroupElement>],
    chosen: &mut Vec<GroupElement>,
    expected: usize,
    out: &mut Vec<Homomorphism>,
) -> Result<()> {
    let depth = chosen.len();
    if depth == group.rank() {
        out.push(Homomorphism { source: group.clone(), target: group.clone(), images: chosen.clone() });
        if out.len() > MAX_AUTOMORPHISMS {
            return Err(Error::CapExceeded { order: out.len(), cap: MAX_AUTOMORPHISMS });
        }
        return Ok(());
    }
    let next_expected = expected * group.invariant_factors()[depth] as usize;
    for h in &candidates[depth] {
        chosen.push(h.clone());
        if group.subgroup_generated(chosen)?.len() == next_expected {
            extend_automorphism(group, candidates, chosen, next_expected, out)?;
        }
        chosen.pop();
    }
    Ok(())
}

/// Dense addition/negation tables, cached per group.
pub(crate) struct Cayley {
    pub n: usize,
    add: Vec<u32>,
    pub neg: Vec<u32>,
}

impl Cayley {
    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.n + b] as usize
    }
}

type CayleyCache = RwLock<HashMap<GroupSpec, Arc<Cayley>>>;

pub(crate) fn cayley(group: &GroupSpec) -> Arc<Cayley> {
    static CACHE: OnceLock<CayleyCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.read().unwrap().get(group) {
        return Arc::clone(t);
    }
    let n = group.order();
    let elems: Vec<GroupElement> = group.elements().collect();
    let mut add = Vec::with_capacity(n * n);
    for a in &elems {
        for b in &elems {
            add.push(group.index_of(&group.add_unchecked(a, b)) as u32);
        }
    }
    let neg = elems.iter().map(|a| group.index_of(&group.scale_unchecked(-1, a)) as u32).collect();
    let table = Arc::new(Cayley { n, add, neg });
    cache.write().unwrap().insert(group.clone(), Arc::clone(&table));
    table
}
