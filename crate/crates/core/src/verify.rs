//! Exhaustive verification sweeps producing [`VerificationReport`]s.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{cayley, gcd, GroupSpec};
use crate::search::{ml_mzss, SearchConfig};
use crate::sequence::Sequence;
use crate::structure::{
    classify, gen_type1, gen_type2, match_struc1, match_struc2, pair_bases, pair_generating, Type1Witness, Type2Witness,
};

/// Limit on the number of multisets walked by [`tm1_structure_check`].
const TM1_MULTISET_CAP: u128 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub params: Value,
    pub checked: u64,
    pub violations: Vec<String>,
    pub verdict: bool,
    #[serde(rename = "elapsed_ms", serialize_with = "crate::report::as_millis")]
    pub elapsed: Duration,
    /// Per-check supporting data (witnesses, counts).
    pub details: Value,
}

impl VerificationReport {
    fn new(
        check: &str,
        params: Value,
        checked: u64,
        violations: Vec<String>,
        started: Instant,
        details: Value,
    ) -> Self {
        VerificationReport {
            check: check.to_string(),
            params,
            checked,
            verdict: violations.is_empty(),
            violations,
            elapsed: started.elapsed(),
            details,
        }
    }
}

/// Every ml-mzss over `C_m ⊕ C_m` must contain some `g` at least `m - 1`
/// times. Reports the least such `g` and its cofactor for each sequence.
pub fn check_property_b(m: u32, cfg: &SearchConfig) -> Result<VerificationReport> {
    let started = Instant::now();
    let group = GroupSpec::rank_two(m, 1)?;
    let all = ml_mzss(&group, cfg)?;
    let need = (group.exponent() - 1) as usize;
    let mut violations = Vec::new();
    let mut witnesses = Vec::with_capacity(all.len());
    for s in &all {
        match s.terms().iter().find(|(_, k)| *k >= need) {
            Some((g, _)) => {
                let cofactor = s.without_copies(g, need).expect("multiplicity checked");
                witnesses.push(json!({
                    "sequence": s.to_string(),
                    "element": g.to_string(),
                    "cofactor": cofactor.to_string(),
                }));
            }
            None => violations.push(s.to_string()),
        }
    }
    Ok(VerificationReport::new(
        "property-b",
        json!({ "m": m }),
        all.len() as u64,
        violations,
        started,
        json!({ "witnesses": witnesses }),
    ))
}

fn euler_phi(n: u32) -> u64 {
    (1..=n as u64).filter(|&e| gcd(e, n as u64) == 1).count() as u64
}

/// The ml-mzss over `C_n` are exactly `e^n` with `⟨e⟩ = C_n`.
pub fn check_cyclic_inverse(n: u32, cfg: &SearchConfig) -> Result<VerificationReport> {
    if n < 2 {
        return Err(Error::BadParams(format!("n must be at least 2, got {n}")));
    }
    let started = Instant::now();
    let group = GroupSpec::cyclic(n)?;
    let found: Vec<String> = ml_mzss(&group, cfg)?.iter().map(|s| s.to_string()).collect();
    let expected: Vec<String> =
        (1..n as i64).filter(|&e| gcd(e as u64, n as u64) == 1).map(|e| format!("[{e}]^{n}")).collect();
    let mut violations: Vec<String> = found.iter().filter(|s| !expected.contains(s)).cloned().collect();
    violations.extend(expected.iter().filter(|s| !found.contains(s)).map(|s| format!("missing {s}")));
    Ok(VerificationReport::new(
        "cyclic",
        json!({ "n": n }),
        found.len() as u64,
        violations,
        started,
        json!({ "count": found.len(), "phi": euler_phi(n), "sequences": found }),
    ))
}

/// Seeded random sequences of length `2n - 1` over `C_n` must each contain
/// `n` terms summing to zero; `0^{n-1} 1^{n-1}` must not.
pub fn egz_property(n: u32, trials: u64, seed: u64) -> Result<VerificationReport> {
    if n < 2 {
        return Err(Error::BadParams(format!("n must be at least 2, got {n}")));
    }
    let started = Instant::now();
    let group = GroupSpec::cyclic(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let len = 2 * n as usize - 1;
    for _ in 0..trials {
        let elems = (0..len).map(|_| group.element(&[rng.random_range(0..n as i64)]).expect("rank one"));
        let s = Sequence::from_elements(&group, elems)?;
        if s.extract_zero_sum_of_length(n as usize)?.is_none() {
            violations.push(s.to_string());
        }
    }
    let tight = Sequence::from_terms(&group, [(group.zero(), n as usize - 1), (group.element(&[1])?, n as usize - 1)])?;
    let tight_witness = tight.extract_zero_sum_of_length(n as usize)?;
    if let Some(w) = &tight_witness {
        violations.push(format!("tightness {tight} has witness {w}"));
    }
    Ok(VerificationReport::new(
        "egz",
        json!({ "n": n, "trials": trials, "seed": seed }),
        trials + 1,
        violations,
        started,
        json!({ "tightness_sequence": tight.to_string(), "tightness_holds": tight_witness.is_none() }),
    ))
}

/// Enumerates every ml-mzss over `C_m ⊕ C_{mn}` and classifies it; any
/// sequence with neither a Type 1 nor a Type 2 witness is a violation.
pub fn verify_theorem(group: &GroupSpec, cfg: &SearchConfig) -> Result<VerificationReport> {
    group.require_rank_two()?;
    let started = Instant::now();
    let all = ml_mzss(group, cfg)?;
    let flags: Vec<Result<(bool, bool)>> =
        cfg.run(|| all.par_iter().map(|s| classify(group, s).map(|c| (c.is_type1, c.is_type2))).collect());
    let (mut only1, mut only2, mut both) = (0u64, 0u64, 0u64);
    let mut violations = Vec::new();
    for (s, f) in all.iter().zip(flags) {
        match f? {
            (true, true) => both += 1,
            (true, false) => only1 += 1,
            (false, true) => only2 += 1,
            (false, false) => violations.push(s.to_string()),
        }
    }
    Ok(VerificationReport::new(
        "theorem",
        json!({ "group": group.to_string() }),
        all.len() as u64,
        violations,
        started,
        json!({ "type1_only": only1, "type2_only": only2, "both": both }),
    ))
}

/// Calls `f` on every nondecreasing vector of length `len` over `[0, bound)`.
fn nondecreasing(len: usize, bound: u64, f: &mut dyn FnMut(&[u64])) {
    fn rec(buf: &mut Vec<u64>, len: usize, lo: u64, bound: u64, f: &mut dyn FnMut(&[u64])) {
        if buf.len() == len {
            f(buf);
            return;
        }
        for v in lo..bound {
            buf.push(v);
            rec(buf, len, v, bound, f);
            buf.pop();
        }
    }
    rec(&mut Vec::with_capacity(len), len, 0, bound, f);
}

/// All valid Type 1 witnesses (with nondecreasing `x`) over `C_m ⊕ C_{mn}`.
pub fn all_type1_witnesses(group: &GroupSpec) -> Result<Vec<Type1Witness>> {
    group.require_rank_two()?;
    let mut out = Vec::new();
    for (e1, e2) in pair_bases(group)? {
        for j in [1u8, 2] {
            let (ej, ek) = if j == 1 { (&e1, &e2) } else { (&e2, &e1) };
            let oj = group.order_of_unchecked(ej);
            let ok = group.order_of_unchecked(ek) as usize;
            nondecreasing(ok, oj, &mut |x| {
                if (x.iter().sum::<u64>() + 1) % oj == 0 {
                    out.push(Type1Witness { e1: e1.clone(), e2: e2.clone(), j, x: x.to_vec() });
                }
            });
        }
    }
    Ok(out)
}

/// All valid Type 2 witnesses (with nondecreasing `x`) over `C_m ⊕ C_{mn}`.
pub fn all_type2_witnesses(group: &GroupSpec) -> Result<Vec<Type2Witness>> {
    let (m, n) = group.require_rank_two()?;
    let mut out = Vec::new();
    for (g1, g2) in pair_generating(group)? {
        let coset = group.scale_unchecked(m as i64, &g1) == group.scale_unchecked(m as i64, &g2);
        for s in 1..=n {
            if s != 1 && !coset {
                continue;
            }
            nondecreasing(((n + 1 - s) * m) as usize, m as u64, &mut |x| {
                if x.iter().sum::<u64>() == (m - 1) as u64 {
                    out.push(Type2Witness { g1: g1.clone(), g2: g2.clone(), s, x: x.to_vec() });
                }
            });
        }
    }
    Ok(out)
}

/// Every valid Type 1 / Type 2 witness must generate an mzss of length
/// `m + mn - 1`.
pub fn soundness_sweep(group: &GroupSpec) -> Result<VerificationReport> {
    let (m, n) = group.require_rank_two()?;
    let started = Instant::now();
    let d = (m + m * n - 1) as usize;
    let mut violations = Vec::new();
    let mut checked = 0u64;
    let mut check = |label: String, s: Sequence| -> Result<()> {
        checked += 1;
        if s.len() != d || !s.is_mzss()? {
            violations.push(format!("{label}: {s}"));
        }
        Ok(())
    };
    let t1 = all_type1_witnesses(group)?;
    let t2 = all_type2_witnesses(group)?;
    for w in &t1 {
        check(format!("type1 {}", serde_json::to_string(w).unwrap_or_default()), gen_type1(group, w)?)?;
    }
    for w in &t2 {
        check(format!("type2 {}", serde_json::to_string(w).unwrap_or_default()), gen_type2(group, w)?)?;
    }
    Ok(VerificationReport::new(
        "soundness",
        json!({ "group": group.to_string() }),
        checked,
        violations,
        started,
        json!({ "type1_witnesses": t1.len(), "type2_witnesses": t2.len() }),
    ))
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// All zero-sum sequences of length `len` (nondecreasing index lists).
fn zero_sum_multisets(group: &GroupSpec, len: usize) -> Vec<Vec<usize>> {
    let table = cayley(group);
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(len);
    fn rec(
        table: &crate::group::Cayley,
        buf: &mut Vec<usize>,
        len: usize,
        lo: usize,
        sum: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if buf.len() == len {
            if sum == 0 {
                out.push(buf.clone());
            }
            return;
        }
        for g in lo..table.n {
            buf.push(g);
            rec(table, buf, len, g, table.add(sum, g), out);
            buf.pop();
        }
    }
    rec(&table, &mut buf, len, 0, 0, &mut out);
    out
}

/// Every zero-sum sequence of length `tm - 1` over `C_m ⊕ C_m` that is not a
/// product of `t` nonempty zero-sum sequences must match Struc1, or Struc2
/// when `t ≥ 3`.
pub fn tm1_structure_check(m: u32, t: u32, cfg: &SearchConfig) -> Result<VerificationReport> {
    if m < 2 || t < 2 {
        return Err(Error::BadParams(format!("need m >= 2 and t >= 2, got m={m}, t={t}")));
    }
    let started = Instant::now();
    let group = GroupSpec::rank_two(m, 1)?;
    group.check_cap(cfg.caps.enumeration_max_order)?;
    let len = (t * m - 1) as usize;
    let walked = binomial((group.order() + len - 1) as u128, len as u128);
    if walked > TM1_MULTISET_CAP {
        return Err(Error::CapExceeded {
            order: walked.min(usize::MAX as u128) as usize,
            cap: TM1_MULTISET_CAP as usize,
        });
    }
    let candidates = zero_sum_multisets(&group, len);
    let outcomes: Vec<Result<Option<(String, usize, usize)>>> = cfg.run(|| {
        candidates
            .par_iter()
            .map(|terms| {
                let s = Sequence::from_indices(&group, terms);
                if s.zss_max_factors()? >= t as usize {
                    return Ok(None);
                }
                let c1 = match_struc1(&group, &s, t)?.len();
                let c2 = match_struc2(&group, &s, t)?.len();
                Ok(Some((s.to_string(), c1, c2)))
            })
            .collect()
    });
    let mut violations = Vec::new();
    let (mut checked, mut struc1, mut struc2, mut struc2_only) = (0u64, 0u64, 0u64, 0u64);
    for o in outcomes {
        let Some((text, c1, c2)) = o? else { continue };
        checked += 1;
        struc1 += u64::from(c1 > 0);
        struc2 += u64::from(c2 > 0);
        struc2_only += u64::from(c2 > 0 && c1 == 0);
        if c1 == 0 && c2 == 0 {
            violations.push(text);
        }
    }
    Ok(VerificationReport::new(
        "tm1",
        json!({ "m": m, "t": t }),
        checked,
        violations,
        started,
        json!({
            "zero_sum_sequences": candidates.len(),
            "struc1_matches": struc1,
            "struc2_matches": struc2,
            "struc2_only": struc2_only,
        }),
    ))
}
