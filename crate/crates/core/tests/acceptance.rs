//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};
use wfomc::celltypes::build_tables;
use wfomc::engine::{
    binomial, enumerate_kh, evaluate_explicit, fomc_universal, solve, term_value, EngineOptions,
    ExplicitOptions, Granularity,
};
use wfomc::formula::{parse_formula, parse_problem, Formula, Problem, Signature, Var};
use wfomc::oracle::oracle_count;
use wfomc::transform::compile;
use wfomc::weights::{count_distribution, DistributionQuery, WeightSpec};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

/// Parses a problem; texts without a `domain:` line get domain 1.
fn problem(text: &str) -> Problem {
    let text = if text.contains("domain:") {
        text.to_string()
    } else {
        format!("domain: 1\n{text}")
    };
    parse_problem(&text).unwrap_or_else(|e| panic!("bad test problem: {e}\n{text}"))
}

fn count(p: &Problem) -> BigRational {
    solve(p, &[], &EngineOptions::default())
        .expect("engine")
        .total()
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn corpus() -> Vec<(String, Problem)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .expect("problems directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "wmc"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|f| {
            let name = f.file_stem().unwrap().to_string_lossy().into_owned();
            (name, problem(&std::fs::read_to_string(&f).unwrap()))
        })
        .collect()
}

fn friends_tables() -> wfomc::celltypes::TypeTables {
    let kernel = parse_formula("A(x) & R(x,y) & x != y -> A(y)").unwrap();
    build_tables(&kernel, &Signature::new(vec!["A".into()], vec!["R".into()])).unwrap()
}

fn pair_table_fixture() -> Outcome {
    let start = Instant::now();
    let t = friends_tables();
    let mut got = Vec::new();
    for i in 0..4 {
        for j in i..4 {
            got.push(t.n_ij(i, j));
        }
    }
    let n13: Vec<u8> = (0..4).map(|v| t.n_ijv(1, 3, v) as u8).collect();
    let elapsed = start.elapsed();
    check(got == [4, 4, 2, 2, 4, 2, 2, 4, 4, 4], || {
        format!("n_ij = {got:?}")
    })?;
    check(n13 == [1, 0, 1, 0], || format!("n_13v = {n13:?}"))?;
    check(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("n_ij = {got:?}, n_13v = {n13:?}"))
}

fn term_fixture() -> Outcome {
    let v = term_value(&friends_tables(), &[2, 0, 0, 1]);
    check(v == BigInt::from(48), || format!("term = {v}"))?;
    Ok("k = (2,0,0,1) gives 48".into())
}

fn coin_distribution() -> Outcome {
    let start = Instant::now();
    let coins = corpus()
        .into_iter()
        .find(|(n, _)| n == "coins")
        .expect("coins problem")
        .1;
    check(coins.domain == 4, || {
        format!("coins domain is {}", coins.domain)
    })?;
    let dist =
        count_distribution(&coins, &DistributionQuery::new(["H"])).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let want = [
        ratio(1, 8),
        ratio(0, 1),
        ratio(3, 4),
        ratio(0, 1),
        ratio(1, 8),
    ];
    for (k, w) in want.iter().enumerate() {
        let got = dist
            .get(&vec![k as u64])
            .cloned()
            .unwrap_or_else(BigRational::zero);
        check(&got == w, || format!("P(|H| = {k}) = {got}, want {w}"))?;
    }
    check(dist.keys().all(|k| k[0] <= 4), || {
        format!("unexpected keys {:?}", dist.keys())
    })?;
    check(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok("(1/8, 0, 3/4, 0, 1/8)".into())
}

fn random_qf(rng: &mut ChaCha8Rng, depth: u32) -> Formula {
    let (x, y) = (Var::X, Var::Y);
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..12) {
            0 => Formula::unary("A", x),
            1 => Formula::unary("A", y),
            2 => Formula::unary("B", x),
            3 => Formula::unary("B", y),
            4 => Formula::binary("R", x, y),
            5 => Formula::binary("R", y, x),
            6 => Formula::binary("R", x, x),
            7 => Formula::binary("R", y, y),
            8 => Formula::Eq(x, y),
            9 => Formula::Neq(x, y),
            10 => Formula::not(Formula::binary("R", x, y)),
            _ => Formula::not(Formula::unary("A", x)),
        };
    }
    let a = random_qf(rng, depth - 1);
    match rng.gen_range(0..5) {
        0 => Formula::not(a),
        1 => Formula::and(a, random_qf(rng, depth - 1)),
        2 => Formula::or(a, random_qf(rng, depth - 1)),
        3 => Formula::implies(a, random_qf(rng, depth - 1)),
        _ => Formula::iff(a, random_qf(rng, depth - 1)),
    }
}

fn random_universal_kernels() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let sig = Signature::new(vec!["A".into(), "B".into()], vec!["R".into()]);
    let kernels = 200;
    let mut nonzero = 0;
    for case in 0..kernels {
        let body = random_qf(&mut rng, 3);
        let sentence = Formula::forall(Var::X, Formula::forall(Var::Y, body));
        for n in 1..=4 {
            let p = Problem::new(sig.clone(), sentence.clone(), n);
            let engine = count(&p);
            let oracle = oracle_count(&p).map_err(|e| e.to_string())?;
            check(engine == oracle, || {
                format!("case {case}, n = {n}: engine {engine} vs oracle {oracle} for {sentence}")
            })?;
            if n == 4 && !engine.is_zero() {
                nonzero += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(300), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{kernels} kernels x n = 1..4 agree ({nonzero} satisfiable at n = 4)"
    ))
}

fn existential_identities() -> Outcome {
    let base = problem("binary: R\nformula: forall x exists y R(x,y)\n");
    for n in 1..=5u64 {
        let p = base.with_domain(n);
        let got = count(&p);
        let want = int((BigInt::from(2).pow(n as u32) - BigInt::one()).pow(n as u32));
        check(got == want, || {
            format!("n = {n}: {got} vs (2^n - 1)^n = {want}")
        })?;
        if n <= 3 {
            let o = oracle_count(&p).map_err(|e| e.to_string())?;
            check(o == want, || format!("oracle at n = {n}: {o}"))?;
        }
    }
    let p = base.with_domain(3);
    let program = compile(&p);
    let tables = build_tables(&program.kernel, &program.signature).unwrap();
    let terms = enumerate_kh(
        &program,
        &tables,
        3,
        &p.weights,
        &[],
        &ExplicitOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let negative = terms
        .iter()
        .filter(|t| t.sign < 0 && !t.value.is_zero())
        .count();
    let positive = terms
        .iter()
        .filter(|t| t.sign > 0 && !t.value.is_zero())
        .count();
    let signed: BigInt = terms.iter().map(|t| BigInt::from(t.sign) * &t.value).sum();
    check(negative > 0, || "no negatively signed term at n = 3".into())?;
    check(!signed.is_negative(), || {
        format!("signed sum {signed} is negative")
    })?;
    let total = evaluate_explicit(
        &program,
        &tables,
        3,
        &p.weights,
        &[],
        &ExplicitOptions::default(),
    )
    .map_err(|e| e.to_string())?
    .total();
    check(total == int(343), || format!("explicit total {total}"))?;
    Ok(format!(
        "(2^n-1)^n for n <= 5; at n = 3, {positive} positive and {negative} negative terms cancel to 343"
    ))
}

fn counting_identities() -> Outcome {
    let f = problem("binary: R\nformula: forall x exists[=1] y R(x,y)\n");
    for n in 1..=5u64 {
        let p = f.with_domain(n);
        let got = count(&p);
        let want = int(BigInt::from(n).pow(n as u32));
        check(got == want, || {
            format!("exists[=1] at n = {n}: {got} vs {want}")
        })?;
        if n <= 3 {
            let o = oracle_count(&p).map_err(|e| e.to_string())?;
            check(o == want, || format!("oracle at n = {n}: {o}"))?;
        }
    }
    let mut checked = 0;
    for op in ["<=", ">="] {
        for m in 0..=2 {
            let base = problem(&format!(
                "binary: R\nformula: forall x exists[{op}{m}] y R(x,y)\n"
            ));
            for n in 1..=3 {
                let p = base.with_domain(n);
                let got = count(&p);
                let o = oracle_count(&p).map_err(|e| e.to_string())?;
                check(got == o, || {
                    format!("exists[{op}{m}] at n = {n}: engine {got} vs oracle {o}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!(
        "n^n for n <= 5; {checked} bounded variants agree with the oracle"
    ))
}

fn cardinality_identities() -> Outcome {
    let unary = problem("unary: A\nformula: true\n");
    let binary = problem("binary: R\nformula: true\n");
    let mut checked = 0;
    for n in 1..=4u64 {
        for m in 0..=n {
            let mut p = unary.with_domain(n);
            p.constraints
                .push(wfomc::formula::parse_cardinality(&format!("|A| = {m}")).unwrap());
            let want = int(binomial(n, m));
            let got = count(&p);
            let o = oracle_count(&p).map_err(|e| e.to_string())?;
            check(got == want && o == want, || {
                format!("|A| = {m}, n = {n}: {got}, oracle {o}, want {want}")
            })?;
            checked += 1;
        }
        for m in 0..=n * n {
            let mut p = binary.with_domain(n);
            p.constraints
                .push(wfomc::formula::parse_cardinality(&format!("|R| = {m}")).unwrap());
            let want = int(binomial(n * n, m));
            let got = count(&p);
            let o = oracle_count(&p).map_err(|e| e.to_string())?;
            check(got == want && o == want, || {
                format!("|R| = {m}, n = {n}: {got}, oracle {o}, want {want}")
            })?;
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} binomial cases exact and oracle-confirmed"
    ))
}

fn symmetric_weights() -> Outcome {
    let pairs = [
        (ratio(3, 2), ratio(5, 1)),
        (ratio(-2, 3), ratio(7, 4)),
        (ratio(1, 1), ratio(0, 1)),
    ];
    for (w, wb) in &pairs {
        let mut map = BTreeMap::new();
        map.insert("A".to_string(), (w.clone(), wb.clone()));
        let mut p = problem("unary: A\nformula: true\n");
        p.weights = WeightSpec::Symmetric(map);
        let mut want = BigRational::one();
        for n in 1..=6u64 {
            want *= w + wb;
            let got = count(&p.with_domain(n));
            check(got == want, || {
                format!("({w}, {wb}) at n = {n}: {got} vs {want}")
            })?;
        }
    }
    let mixed = [
        "unary: S, C\nbinary: F\nformula: forall x forall y (S(x) & F(x,y) -> S(y)) & forall x (S(x) -> C(x))\nweight: S 3/2 1\nweight: F 2 1\n",
        "unary: A\nbinary: R\nformula: forall x exists y (R(x,y) & (A(x) | A(y)))\nweight: A -1/2 3\nweight: R 2 1/3\n",
        "unary: A, B\nbinary: E\nformula: forall x forall y (E(x,y) -> (A(x) <-> ~B(y)))\nweight: E 1/2 2\nweight: B 5 -1\n",
    ];
    let mut checked = 0;
    for text in mixed {
        let base = problem(text);
        for n in 1..=3 {
            let p = base.with_domain(n);
            let got = count(&p);
            let o = oracle_count(&p).map_err(|e| e.to_string())?;
            check(got == o, || {
                format!("n = {n}: engine {got} vs oracle {o} for\n{text}")
            })?;
            checked += 1;
        }
    }
    Ok(format!(
        "(w+w')^n for n <= 6; {checked} mixed cases agree with the oracle"
    ))
}

fn collapse_equivalence() -> Outcome {
    let mut names = Vec::new();
    for (name, p) in corpus() {
        check(p.domain <= 5, || format!("{name} has domain {}", p.domain))?;
        let program = compile(&p);
        let tables =
            build_tables(&program.kernel, &program.signature).map_err(|e| e.to_string())?;
        let opts = |granularity| ExplicitOptions {
            granularity,
            budget: 50_000_000,
            ..ExplicitOptions::default()
        };
        let run = |g| evaluate_explicit(&program, &tables, p.domain, &p.weights, &[], &opts(g));
        let grouped = run(Granularity::Grouped).map_err(|e| format!("{name}: {e}"))?;
        let per_v = run(Granularity::PerTwoType).map_err(|e| format!("{name}: {e}"))?;
        check(grouped.cells == per_v.cells, || {
            format!(
                "{name} at n = {}: grouped {} vs per-v {}",
                p.domain,
                grouped.total(),
                per_v.total()
            )
        })?;
        names.push(format!("{name}@{}", p.domain));
    }
    Ok(names.join(" "))
}

fn normalization() -> Outcome {
    let mut checked = 0;
    for (name, p) in corpus() {
        let preds: Vec<String> = p
            .signature
            .unary
            .iter()
            .chain(&p.signature.binary)
            .cloned()
            .collect();
        let mut queries: Vec<Vec<String>> = preds.iter().map(|q| vec![q.clone()]).collect();
        queries.push(preds.clone());
        for q in queries {
            let dist = count_distribution(&p, &DistributionQuery::new(q.clone()))
                .map_err(|e| format!("{name}: {e}"))?;
            let total: BigRational = dist.values().fold(BigRational::zero(), |a, b| a + b);
            check(total.is_one(), || {
                format!("{name} over {q:?} sums to {total}")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} distributions sum to exactly 1"))
}

fn polynomial_scaling() -> Outcome {
    let t = friends_tables();
    let sizes = [25u64, 50, 100, 200];
    let mut points = Vec::new();
    let mut single_200 = Duration::ZERO;
    for &n in &sizes {
        let first = Instant::now();
        let value = fomc_universal(&t, n);
        let once = first.elapsed();
        if n == 200 {
            single_200 = once;
        }
        check(value.is_positive(), || {
            format!("count at n = {n} is {value}")
        })?;
        let mut reps = 1u32;
        let start = Instant::now();
        while start.elapsed() < Duration::from_millis(300) {
            std::hint::black_box(fomc_universal(&t, n));
            reps += 1;
        }
        let per = (start.elapsed() + once).as_secs_f64() / reps as f64;
        points.push(((n as f64).ln(), per.ln()));
    }
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / points.len() as f64;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let slope = sxy / sxx;
    check(single_200 < Duration::from_secs(60), || {
        format!("n = 200 took {single_200:?}")
    })?;
    check(slope < 6.0, || format!("log-log slope {slope:.2}"))?;
    Ok(format!(
        "n = 200 in {single_200:?}, log-log slope {slope:.2}"
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("pair table fixture", pair_table_fixture),
        ("collapsed term fixture", term_fixture),
        ("coin distribution", coin_distribution),
        (
            "random universal kernels vs oracle",
            random_universal_kernels,
        ),
        ("existential identities", existential_identities),
        ("counting quantifier identities", counting_identities),
        ("cardinality identities", cardinality_identities),
        ("symmetric weights", symmetric_weights),
        ("grouped vs per-v enumeration", collapse_equivalence),
        ("distribution normalization", normalization),
        ("polynomial scaling", polynomial_scaling),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} [{ms} ms]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} [{ms} ms]");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
