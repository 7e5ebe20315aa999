//! Acceptance checks with one PASS/FAIL line per criterion.
//!
//! Runs under `cargo test`; use `cargo test -p zerosum-cli --test acceptance`
//! to run it alone. Exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use serde_json::Value;
use zerosum::verify::{all_type1_witnesses, all_type2_witnesses};
use zerosum::{
    check_cyclic_inverse, check_property_b, davenport, egz_property, gen_type1, gen_type2, ml_mzss, soundness_sweep,
    tm1_structure_check, verify_theorem, GroupSpec, SearchConfig, Sequence,
};

type Check = fn() -> Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn grp(factors: &[i64]) -> GroupSpec {
    GroupSpec::new(factors).unwrap()
}

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Subset sums by bitmask over an addition table built from residues.
struct Oracle {
    group: GroupSpec,
    factors: Vec<usize>,
    n: usize,
    table: Vec<usize>,
}

impl Oracle {
    fn new(group: &GroupSpec) -> Self {
        let factors: Vec<usize> = group.invariant_factors().iter().map(|&f| f as usize).collect();
        let n = factors.iter().product();
        let digits = |mut i: usize| {
            let mut r = vec![0; factors.len()];
            for (slot, f) in r.iter_mut().zip(&factors).rev() {
                *slot = i % f;
                i /= f;
            }
            r
        };
        let table = (0..n * n)
            .map(|ij| {
                let (a, b) = (digits(ij / n), digits(ij % n));
                a.iter().zip(&b).zip(&factors).fold(0, |acc, ((x, y), f)| acc * f + (x + y) % f)
            })
            .collect();
        Oracle { group: group.clone(), factors, n, table }
    }

    fn index(&self, s: &Sequence) -> Vec<usize> {
        s.expanded()
            .map(|g| g.residues().iter().zip(&self.factors).fold(0, |acc, (&x, f)| acc * f + x as usize))
            .collect()
    }

    fn sums(&self, s: &[usize]) -> Vec<usize> {
        let mut sums = vec![0; 1 << s.len()];
        for mask in 1usize..sums.len() {
            let low = mask.trailing_zeros() as usize;
            sums[mask] = self.table[sums[mask & (mask - 1)] * self.n + s[low]];
        }
        sums
    }

    fn is_zero_sum_free(&self, s: &[usize]) -> bool {
        self.sums(s)[1..].iter().all(|&x| x != 0)
    }

    fn is_mzss(&self, s: &[usize]) -> bool {
        let sums = self.sums(s);
        let full = sums.len() - 1;
        full > 0 && sums[full] == 0 && sums[1..full].iter().all(|&x| x != 0)
    }

    fn sequence(&self, s: &[usize]) -> Sequence {
        let elems = s.iter().map(|&i| {
            let mut r = vec![0i64; self.factors.len()];
            let mut i = i;
            for (slot, f) in r.iter_mut().zip(&self.factors).rev() {
                *slot = (i % f) as i64;
                i /= f;
            }
            self.group.element(&r).unwrap()
        });
        Sequence::from_elements(&self.group, elems).unwrap()
    }
}

fn multisets(n: usize, len: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(n: usize, len: usize, lo: usize, buf: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if buf.len() == len {
            f(buf);
            return;
        }
        for g in lo..n {
            buf.push(g);
            rec(n, len, g, buf, f);
            buf.pop();
        }
    }
    rec(n, len, 0, &mut Vec::with_capacity(len), f);
}

fn davenport_formula() -> Result<String, String> {
    let pairs = [(2, 2), (2, 4), (2, 6), (2, 8), (3, 3), (3, 6), (4, 4), (5, 5), (3, 9)];
    let mut slowest = Duration::ZERO;
    for (m, mn) in pairs {
        let g = grp(&[m, mn]);
        let started = Instant::now();
        let d = davenport(&g, &cfg()).map_err(|e| e.to_string())?.d;
        let took = started.elapsed();
        slowest = slowest.max(took);
        ensure!(d as i64 == m + mn - 1, "D({g}) = {d}, expected {}", m + mn - 1);
        ensure!(took < Duration::from_secs(60), "D({g}) took {took:?}");
    }
    Ok(format!("{} groups, slowest {:.2}s", pairs.len(), slowest.as_secs_f64()))
}

fn cyclic_inverse() -> Result<String, String> {
    for n in 2u32..=12 {
        let g = GroupSpec::cyclic(n).unwrap();
        let found: BTreeSet<String> =
            ml_mzss(&g, &cfg()).map_err(|e| e.to_string())?.iter().map(Sequence::to_string).collect();
        let expected: BTreeSet<String> = (1..n).filter(|&e| gcd(e, n) == 1).map(|e| format!("[{e}]^{n}")).collect();
        let phi = (1..=n).filter(|&e| gcd(e, n) == 1).count();
        ensure!(found == expected, "C_{n}: found {found:?}");
        ensure!(found.len() == phi, "C_{n}: count {} != phi {phi}", found.len());
        let report = check_cyclic_inverse(n, &cfg()).map_err(|e| e.to_string())?;
        ensure!(report.verdict, "C_{n}: {:?}", report.violations);
    }
    Ok("n = 2..12".into())
}

fn property_b() -> Result<String, String> {
    let mut counts = Vec::new();
    for m in 2u32..=4 {
        let report = check_property_b(m, &cfg()).map_err(|e| e.to_string())?;
        ensure!(report.verdict && report.violations.is_empty(), "m = {m}: {:?}", report.violations);
        let all = ml_mzss(&GroupSpec::rank_two(m, 1).unwrap(), &cfg()).map_err(|e| e.to_string())?;
        ensure!(report.checked as usize == all.len() && !all.is_empty(), "m = {m}: checked {}", report.checked);
        for s in &all {
            ensure!(s.terms().iter().any(|(_, k)| *k + 1 >= m as usize), "m = {m}: {s}");
        }
        counts.push(format!("m={m}: {}", all.len()));
    }
    Ok(counts.join(", "))
}

fn theorem_completeness() -> Result<String, String> {
    let started = Instant::now();
    let mut counts = Vec::new();
    for f in [[2, 4], [2, 6], [2, 8], [3, 6], [4, 4]] {
        let g = grp(&f);
        let report = verify_theorem(&g, &cfg()).map_err(|e| e.to_string())?;
        ensure!(report.verdict, "{g}: unclassified {:?}", report.violations);
        let total = ml_mzss(&g, &cfg()).map_err(|e| e.to_string())?.len();
        ensure!(report.checked as usize == total && total > 0, "{g}: checked {} of {total}", report.checked);
        counts.push(format!("{g}: {total}"));
    }
    ensure!(started.elapsed() < Duration::from_secs(600), "took {:?}", started.elapsed());
    Ok(counts.join(", "))
}

fn theorem_soundness() -> Result<String, String> {
    let mut counts = Vec::new();
    for f in [[2, 4], [3, 6]] {
        let g = grp(&f);
        let d = (f[0] + f[1] - 1) as usize;
        let report = soundness_sweep(&g).map_err(|e| e.to_string())?;
        ensure!(report.verdict, "{g}: {:?}", report.violations);
        let oracle = Oracle::new(&g);
        let mut generated = Vec::new();
        for w in all_type1_witnesses(&g).map_err(|e| e.to_string())? {
            generated.push(gen_type1(&g, &w).map_err(|e| e.to_string())?);
        }
        for w in all_type2_witnesses(&g).map_err(|e| e.to_string())? {
            generated.push(gen_type2(&g, &w).map_err(|e| e.to_string())?);
        }
        ensure!(generated.len() as u64 == report.checked, "{g}: witness count mismatch");
        for s in &generated {
            ensure!(s.len() == d && oracle.is_mzss(&oracle.index(s)), "{g}: {s}");
        }
        counts.push(format!("{g}: {} witnesses", generated.len()));
    }
    Ok(counts.join(", "))
}

fn egz() -> Result<String, String> {
    let started = Instant::now();
    for n in 2u32..=10 {
        let report = egz_property(n, 10_000, 0).map_err(|e| e.to_string())?;
        ensure!(report.verdict, "n = {n}: {:?}", report.violations);
        let g = GroupSpec::cyclic(n).unwrap();
        for a in (1..n).filter(|&a| gcd(a, n) == 1) {
            let tight = Sequence::parse(&g, &format!("[0]^{} [{a}]^{}", n - 1, n - 1)).unwrap();
            let found = tight.extract_zero_sum_of_length(n as usize).map_err(|e| e.to_string())?;
            ensure!(found.is_none(), "n = {n}: {tight} has witness");
        }
    }
    let took = started.elapsed();
    ensure!(took < Duration::from_secs(60), "took {took:?}");
    Ok(format!("10^4 trials for n = 2..10 in {:.1}s", took.as_secs_f64()))
}

fn tm1() -> Result<String, String> {
    let mut counts = Vec::new();
    for (m, t) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let report = tm1_structure_check(m, t, &cfg()).map_err(|e| e.to_string())?;
        ensure!(report.verdict, "(m, t) = ({m}, {t}): {:?}", report.violations);
        let struc2 = report.details["struc2_matches"].as_u64().unwrap_or(u64::MAX);
        ensure!(t == 3 || struc2 == 0, "(m, t) = ({m}, {t}): {struc2} Struc2 matches");
        counts.push(format!("({m},{t}): {} checked, {struc2} struc2", report.checked));
    }
    Ok(counts.join(", "))
}

fn oracle_equivalence() -> Result<String, String> {
    let mut compared = 0u64;
    for f in [[2, 4], [3, 3]] {
        let oracle = Oracle::new(&grp(&f));
        let mut mismatch = None;
        for len in 0..=10 {
            multisets(oracle.n, len, &mut |s| {
                if mismatch.is_some() {
                    return;
                }
                compared += 1;
                let seq = oracle.sequence(s);
                let fast = (seq.is_zero_sum_free().unwrap(), seq.is_mzss().unwrap());
                if fast != (oracle.is_zero_sum_free(s), oracle.is_mzss(s)) {
                    mismatch = Some(seq.to_string());
                }
            });
        }
        ensure!(mismatch.is_none(), "disagreement on {}", mismatch.unwrap());
    }
    Ok(format!("{compared} sequences"))
}

fn enumerate_stream(workers: &str) -> Result<(Vec<String>, Value), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_zerosum"))
        .args(["enumerate", "--group", "3,6", "--workers", workers])
        .env_remove("ZEROSUM_CAP_ORDER")
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "exit {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
    let mut summary: Value = serde_json::from_str(&lines.pop().unwrap_or_default()).map_err(|e| e.to_string())?;
    zerosum::report::strip_timing(&mut summary);
    Ok((lines, summary))
}

fn determinism() -> Result<String, String> {
    let one = enumerate_stream("1")?;
    let four = enumerate_stream("4")?;
    ensure!(one == four, "streams differ between 1 and 4 workers");
    ensure!(one.1["total"] == one.0.len(), "summary total does not match stream");
    Ok(format!("{} lines identical", one.0.len() + 1))
}

fn main() -> ExitCode {
    let criteria: [(u8, &str, Check); 9] = [
        (1, "davenport formula", davenport_formula),
        (2, "cyclic inverse", cyclic_inverse),
        (3, "property B", property_b),
        (4, "theorem completeness", theorem_completeness),
        (5, "theorem soundness", theorem_soundness),
        (6, "EGZ", egz),
        (7, "tm-1 structure", tm1),
        (8, "oracle equivalence", oracle_equivalence),
        (9, "determinism", determinism),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id} ({name}): PASS [{detail}] {secs:.2}s"),
            Err(why) => {
                failed += 1;
                println!("criterion {id} ({name}): FAIL [{why}] {secs:.2}s");
            }
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
