//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::BTreeMap;
use std::time::Instant;

use chebknot::engine::ratio_to_f64;
use chebknot::oracle::{brute_x_tables, filtration_mismatches, move_free_counts};
use chebknot::rational::FractionWord;
use chebknot::sampler::compare;
use chebknot::{
    enumerate_distribution, evaluate, expand_1regular, no_move_count, probability, profile, sample_distribution,
    ExactEngine, ExactProbability, KnotClass, NameTable, ReducedProfile, Sign, SignWord,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const MC_SEED: u64 = 20_240_607;
const TABLE_KNOTS: [&str; 8] = ["unknot", "3_1", "4_1", "5_1", "5_2", "6_1", "6_2", "6_3"];

fn knot(name: &str) -> KnotClass {
    NameTable::bundled().resolve(name).unwrap()
}

fn prof(name: &str) -> ReducedProfile {
    profile(&knot(name)).unwrap()
}

fn valid(n: usize) -> bool {
    n % 3 != 2
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn oracle_vs_engine() -> Outcome {
    let mut checked = 0;
    let mut engines: BTreeMap<KnotClass, ExactEngine> = BTreeMap::new();
    for n in [6usize, 7, 9, 10, 12, 13, 15, 16, 18] {
        let d = enumerate_distribution(n).map_err(err)?;
        for (k, count) in &d.counts {
            let e = match engines.get_mut(k) {
                Some(e) => e,
                None => engines
                    .entry(k.clone())
                    .or_insert(ExactEngine::new(profile(k).map_err(err)?)),
            };
            let num = e.numerator(n).map_err(err)?;
            ensure(&num == count, || format!("{k} n={n}: engine {num}, oracle {count}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (class, n) pairs exact"))
}

fn small_cases() -> Outcome {
    let cases = [
        ("unknot", 3, 6),
        ("3_1", 3, 2),
        ("3_1", 4, 2),
        ("unknot", 6, 36),
        ("3_1", 6, 18),
    ];
    for (name, n, expect) in cases {
        let k = knot(name);
        let oracle = enumerate_distribution(n).map_err(err)?.count(&k);
        let p = probability(&prof(name), n).map_err(err)?;
        ensure(oracle == BigInt::from(expect) && p.numerator == oracle, || {
            format!(
                "P_{name}({n}): oracle {oracle}, engine {}, expected {expect}",
                p.numerator
            )
        })?;
        if n >= 6 {
            let direct = ExactEngine::new(prof(name)).numerator(n).map_err(err)?;
            ensure(direct == oracle, || format!("closed formula at n={n} gives {direct}"))?;
        }
    }
    Ok("6/8, 2/8, 2/16, 36/64, 18/64".into())
}

fn base_values() -> Outcome {
    let u = KnotClass::unknot();
    let x33 = brute_x_tables(3).map_err(err)?[&u].x(3);
    let x44 = brute_x_tables(4).map_err(err)?[&u].x(4);
    ensure(x33 == 2 && x44 == 2, || {
        format!("unknot x_3^(3) = {x33}, x_4^(4) = {x44}")
    })?;
    let mut tables = 0;
    for n in (1..=12).filter(|&n| valid(n)) {
        for t in brute_x_tables(n).map_err(err)?.values() {
            if n >= 2 {
                ensure(t.x(2) == 0, || format!("{} n={n}: x_2 = {}", t.class, t.x(2)))?;
            }
            if n >= 4 {
                ensure(t.x(3) == 2 * t.x(4), || format!("{} n={n}: x_3 != 2 x_4", t.class))?;
            }
            if n >= 5 {
                ensure(t.x(4) == t.x(5), || format!("{} n={n}: x_4 != x_5", t.class))?;
            }
            tables += 1;
        }
    }
    Ok(format!("x_3^(3) = x_4^(4) = 2; X2-X4 on {tables} tables"))
}

fn filtration_identities() -> Outcome {
    let mut checked = 0;
    for name in ["unknot", "3_1", "4_1"] {
        let k = knot(name);
        let mut engine = ExactEngine::new(prof(name));
        let mut prev: BTreeMap<usize, chebknot::BruteXTable> = BTreeMap::new();
        for n in (1..=12).filter(|&n| valid(n)) {
            let t = chebknot::brute_x_table(&k, n).map_err(err)?;
            let below = if n >= 3 { prev.get(&(n - 3)) } else { None };
            let bad = filtration_mismatches(&t, below, &mut engine).map_err(err)?;
            ensure(bad.is_empty(), || bad.join("; "))?;
            prev.insert(n, t);
            checked += 1;
        }
    }
    Ok(format!("{checked} tables, all identities exact"))
}

fn numerators(name: &str, n_max: usize) -> Result<BTreeMap<usize, BigInt>, String> {
    let p = prof(name);
    let mut engine = ExactEngine::new(p.clone());
    (1..=n_max)
        .filter(|&n| valid(n))
        .map(|n| {
            let v = if n >= 6 {
                engine.numerator(n)
            } else {
                probability(&p, n).map(|p| p.numerator)
            };
            v.map(|v| (n, v)).map_err(err)
        })
        .collect()
}

fn coincidences() -> Outcome {
    let start = Instant::now();
    let groups: [(&[&str], Option<usize>); 4] = [
        (&["3_1", "4_1"], Some(1)),
        (&["4_1", "5_1", "6_3"], Some(0)),
        (&["5_2", "6_1", "6_2"], Some(1)),
        (&["6_1", "6_2"], None),
    ];
    let mut compared = 0;
    for (names, residue) in groups {
        let tables: Vec<_> = names.iter().map(|n| numerators(n, 73)).collect::<Result<_, _>>()?;
        for (&n, v) in &tables[0] {
            if residue.is_some_and(|r| n % 3 != r) {
                continue;
            }
            for (other, t) in names.iter().zip(&tables).skip(1) {
                ensure(&t[&n] == v, || format!("{} vs {other} differ at n={n}", names[0]))?;
                compared += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 5.0, || format!("took {secs:.2}s"))?;
    Ok(format!("{compared} equalities, {secs:.2}s"))
}

fn unknot_residue_equality() -> Outcome {
    let t = numerators("unknot", 73)?;
    for i in 1..=24 {
        // P(3i) = a / 2^(3i) and P(3i+1) = b / 2^(3i+1)
        let (a, b) = (&t[&(3 * i)], &t[&(3 * i + 1)]);
        ensure(a * 2 == *b, || format!("i={i}: {a}/2^{} vs {b}/2^{}", 3 * i, 3 * i + 1))?;
    }
    Ok("1 <= i <= 24".into())
}

fn no_move_counts() -> Outcome {
    let mut checked = 0;
    for n in (0..=15).filter(|&n| valid(n)) {
        let counted = move_free_counts(n).map_err(err)?;
        let classes = enumerate_distribution(n).map_err(err)?;
        for k in classes.counts.keys() {
            let expect = no_move_count(&profile(k).map_err(err)?, n) as u64;
            let got = counted.get(k).copied().unwrap_or(0);
            ensure(got == expect, || {
                format!("{k} n={n}: {got} move-free words, r gives {expect}")
            })?;
            checked += 1;
        }
    }
    let trefoil = knot("3_1");
    for n in [3, 4] {
        let got = move_free_counts(n).map_err(err)?.get(&trefoil).copied().unwrap_or(0);
        ensure(got == 2, || format!("trefoil at n={n}: {got}"))?;
    }
    Ok(format!("{checked} (class, n) pairs"))
}

fn expansion_roundtrip() -> Outcome {
    let mut total = 0;
    for len in 2..=16usize {
        for bits in 0..1u64 << len {
            let fw = FractionWord::new(SignWord::from_bits(bits, len).letters().to_vec());
            if !fw.is_one_regular() || !fw.entries().starts_with(&[Sign::Plus, Sign::Plus]) {
                continue;
            }
            total += 1;
            let back = expand_1regular(&evaluate::<i64>(&fw)).map_err(err)?;
            ensure(back == fw, || {
                format!("{:?} expands back to {:?}", fw.values(), back.values())
            })?;
        }
    }
    Ok(format!("{total} words, 0 failures"))
}

fn conservation() -> Outcome {
    for n in (0..=18).filter(|&n| valid(n)) {
        let d = enumerate_distribution(n).map_err(err)?;
        ensure(d.total() == BigInt::one() << n, || {
            format!("n={n}: total {}", d.total())
        })?;
        for (k, c) in &d.counts {
            if n >= 6 {
                let num = ExactEngine::new(profile(k).map_err(err)?).numerator(n).map_err(err)?;
                ExactProbability::new(k.clone(), n, num).map_err(err)?;
            }
            ensure(*c > BigInt::zero(), || format!("{k} n={n}: empty class listed"))?;
        }
    }
    for name in TABLE_KNOTS {
        for (n, v) in numerators(name, 301)? {
            ExactProbability::new(knot(name), n, v).map_err(err)?;
        }
    }
    Ok("sums are 2^n for n <= 18; numerators in [0, 2^n] through n = 301".into())
}

fn monte_carlo() -> Outcome {
    let start = Instant::now();
    let trials = 1_000_000;
    let e = sample_distribution(30, trials, MC_SEED).map_err(err)?;
    let exact: BTreeMap<KnotClass, f64> = ["unknot", "3_1"]
        .iter()
        .map(|n| Ok((knot(n), probability(&prof(n), 30).map_err(err)?.value)))
        .collect::<Result<_, String>>()?;
    let cmp = compare(&e, &exact);
    let mut detail = Vec::new();
    for name in ["unknot", "3_1"] {
        let row = cmp.rows.iter().find(|r| r.knot == knot(name)).ok_or("missing row")?;
        ensure(!row.flagged, || {
            format!("{name}: p = {}, phat = {}, z = {}", row.p, row.phat, row.z)
        })?;
        detail.push(format!("{name} z={:+.2}", row.z));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("took {secs:.2}s"))?;
    Ok(format!("seed {MC_SEED}: {}, {secs:.2}s", detail.join(", ")))
}

fn scale() -> Outcome {
    let start = Instant::now();
    let mut all = BTreeMap::new();
    for name in TABLE_KNOTS {
        let p = prof(name);
        let mut engine = ExactEngine::new(p.clone());
        let mut values = BTreeMap::new();
        for n in (6..=301).filter(|&n| valid(n)) {
            let v = ExactProbability::new(p.knot.clone(), n, engine.numerator(n).map_err(err)?).map_err(err)?;
            values.insert(n, v);
        }
        all.insert(name, values);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, || format!("took {secs:.2}s"))?;

    for name in TABLE_KNOTS {
        let p = prof(name);
        for (n, v) in &all[name] {
            let (ell, _) = p.length_for_residue(n % 3).unwrap();
            // a knot can only appear once n reaches its reduced length
            let reachable = *n >= ell;
            ensure((v.numerator > BigInt::zero()) == reachable, || {
                format!("{name} n={n}: numerator {} with reduced length {ell}", v.numerator)
            })?;
        }
    }
    let unknot = &all["unknot"];
    let ratio = |n: usize| (&unknot[&n].numerator, n);
    for n in (9..=18).filter(|&n| valid(n)) {
        let ((a, na), (b, nb)) = (ratio(n - 3), ratio(n));
        // a / 2^na >= b / 2^nb  <=>  a * 8 >= b
        ensure(a << (nb - na) >= *b, || format!("P_U({n}) > P_U({})", n - 3))?;
    }
    let mut decay = String::from("unknot nonincreasing per residue through n = 301");
    for n in (21..=301).filter(|&n| valid(n)) {
        if ratio(n - 3).0 << 3 < *ratio(n).0 {
            decay = format!("unknot increases at n = {n} (reported only)");
            break;
        }
    }
    let p301 = ratio_to_f64(&unknot[&301].numerator, 301);
    Ok(format!("{secs:.2}s; P_U(301) = {p301:.4e}; {decay}"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("oracle vs engine exactness", oracle_vs_engine),
        ("small-case probabilities", small_cases),
        ("brute-force base values", base_values),
        ("filtration identities", filtration_identities),
        ("coincidence classes", coincidences),
        ("unknot residue equality", unknot_residue_equality),
        ("no-move counts", no_move_counts),
        ("expansion roundtrip", expansion_roundtrip),
        ("conservation", conservation),
        ("Monte Carlo agreement", monte_carlo),
        ("scale", scale),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
