//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use groupcut::compendium::{
    catalog, construct, drlm_backward_3_slope, gmic, partial_measure, psi_n, rlm_dpl1_extreme_3a, EntryStatus,
    GeometricEpsParams,
};
use groupcut::extremality::{covered_components, CoveredComponents};
use groupcut::minimality::Check;
use groupcut::rational::q;
use groupcut::{extremality_test, minimality_test, oracle_check, OracleVerdict, PwlPeriodic, Rational, Status};
use groupcut_cli::family::Family;
use groupcut_cli::search::search_random;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Duration, limit_s: u64, what: &str) -> Result<(), String> {
    ensure(t < Duration::from_secs(limit_s), || format!("{what} took {t:?}, limit {limit_s} s"))
}

fn criterion(id: u32, name: &str, body: impl FnOnce() -> Outcome) -> bool {
    let t0 = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(format!("panicked: {msg}"))
    });
    let elapsed = t0.elapsed();
    match &result {
        Ok(detail) => println!("criterion {id}: PASS {name} ({detail}; {elapsed:.2?})"),
        Err(detail) => println!("criterion {id}: FAIL {name} ({detail}; {elapsed:.2?})"),
    }
    result.is_ok()
}

fn rlm_regression() -> Outcome {
    for f in [q(1, 7), q(1, 5), q(1, 4), q(3, 10), q(33, 100)] {
        let t0 = Instant::now();
        let v = extremality_test(&rlm_dpl1_extreme_3a(&f).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        within(t0.elapsed(), 5, &format!("f = {f}"))?;
        ensure(v.status == Status::Extreme, || format!("f = {f}: {:?}", v.status))?;
        let p = v.solved_parameters.ok_or("no solved parameters")?;
        let d = Rational::one() + q(2, 1) * &f;
        let s = q(2, 1) / &d;
        let t = q(2, 1) * &f / &d;
        ensure(p.get("s2") == Some(&s), || format!("f = {f}: s = {:?}, expected {s}", p.get("s2")))?;
        let key = format!("phi({f}+)");
        ensure(p.get(&key) == Some(&t), || format!("f = {f}: t = {:?}, expected {t}", p.get(&key)))?;
    }
    Ok("5 values of f, s and t exact".into())
}

/// The slope variable of every refinement interval inside `[lo, hi]`, if unique.
fn slope_on(c: &CoveredComponents, lo: &Rational, hi: &Rational) -> Result<String, String> {
    let mut names: Vec<&str> = c
        .components
        .iter()
        .filter(|comp| comp.intervals.iter().any(|(a, b)| lo <= a && b <= hi))
        .map(|comp| comp.slope_variable.as_str())
        .collect();
    names.sort();
    names.dedup();
    ensure(c.uncovered.iter().all(|(a, b)| b <= lo || hi <= a), || format!("[{lo}, {hi}] not covered"))?;
    ensure(names.len() == 1, || format!("[{lo}, {hi}] has slopes {names:?}"))?;
    Ok(names[0].to_string())
}

fn drlm_regression() -> Outcome {
    let one = Rational::one();
    for (f, b) in [(q(1, 12), q(1, 6)), (q(1, 10), q(3, 20)), (q(1, 20), q(13, 50))] {
        ensure(b <= (&one + &f) * q(1, 4), || format!("b = {b} exceeds (1+f)/4"))?;
        let t0 = Instant::now();
        let pi = drlm_backward_3_slope(&f, &b).map_err(|e| e.to_string())?;
        let v = extremality_test(&pi).map_err(|e| e.to_string())?;
        let c = covered_components(&pi).map_err(|e| e.to_string())?;
        within(t0.elapsed(), 5, &format!("(f, b) = ({f}, {b})"))?;
        ensure(v.status == Status::Extreme, || format!("({f}, {b}): {:?}", v.status))?;
        let fb = &one + &f - &b;
        let pattern = [
            slope_on(&c, &Rational::zero(), &f)?,
            slope_on(&c, &f, &b)?,
            slope_on(&c, &b, &fb)?,
            slope_on(&c, &fb, &one)?,
        ];
        let mut distinct = pattern.to_vec();
        distinct.sort();
        distinct.dedup();
        ensure(pattern[1] == pattern[3] && distinct.len() == 3, || format!("({f}, {b}): pattern {pattern:?}"))?;
        let slopes: Vec<&Rational> = pi.slopes().collect();
        ensure(slopes.len() == 4 && slopes[1] == slopes[3], || "function slopes are not s1, s2, s3, s2".into())?;
    }
    Ok("3 parameter sets, pattern s1 s2 s3 s2".into())
}

fn parameter_grid() -> Vec<(&'static str, Vec<Vec<(&'static str, &'static str)>>)> {
    let single = |name: &'static str, fs: [&'static str; 5]| (name, fs.iter().map(|f| vec![("f", *f)]).collect());
    vec![
        single("gmic", ["1/2", "1/5", "2/3", "4/5", "1/7"]),
        single("rlm_dpl1_extreme_3a", ["1/7", "1/5", "1/4", "3/10", "33/100"]),
        (
            "drlm_backward_3_slope",
            [("1/12", "1/6"), ("1/10", "3/20"), ("1/20", "13/50"), ("1/5", "3/10"), ("1/4", "3/10")]
                .iter()
                .map(|(f, b)| vec![("f", *f), ("b", *b)])
                .collect(),
        ),
        (
            "kf_n_step_mir",
            [("2/5", "3", "2"), ("1/2", "3", "1"), ("3/5", "5", "2"), ("1/5", "4", "2"), ("2/5", "5/2", "3")]
                .iter()
                .map(|(f, qq, n)| vec![("f", *f), ("q", *qq), ("n", *n)])
                .collect(),
        ),
        (
            "bccz_counterexample",
            vec![
                vec![("f", "2/5"), ("q", "3"), ("n", "2")],
                vec![("f", "1/2"), ("eps", "1/4")],
                vec![("f", "1/2"), ("eps", "1/4,1/16")],
                vec![("f", "2/3"), ("eps", "1/5,1/20,1/100")],
                vec![("f", "1/3"), ("eps", "1/10,1/40")],
            ],
        ),
    ]
}

fn minimality_suite() -> Outcome {
    let t0 = Instant::now();
    let constructible: Vec<&str> = catalog()
        .iter()
        .filter(|e| e.status == EntryStatus::Constructible)
        .map(|e| e.name)
        .collect();
    let grid = parameter_grid();
    ensure(constructible.len() == grid.len(), || "grid does not cover the catalog".into())?;
    let mut checked = 0;
    for (name, sets) in grid {
        ensure(constructible.contains(&name) && sets.len() >= 5, || format!("{name}: bad grid"))?;
        for set in sets {
            let map: BTreeMap<String, String> = set.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
            let pi = construct(name, &map).map_err(|e| format!("{name} {map:?}: {e}"))?;
            let r = minimality_test(&pi, None);
            ensure(r.is_minimal, || format!("{name} {map:?}: {:?}", r.violations.first()))?;
            checked += 1;
        }
    }
    let g = gmic(&q(1, 2)).unwrap();
    let half = minimality_test(&g.scale(&q(1, 2)), None);
    ensure(!half.is_minimal && half.has(Check::PiOfF), || "(1/2)·gmic not flagged as pi_of_f".into())?;
    let shifted = minimality_test(&g.add_constant(&q(1, 10)), Some(&q(1, 2)));
    ensure(!shifted.is_minimal && shifted.has(Check::Origin), || "shifted gmic not flagged as origin".into())?;
    within(t0.elapsed(), 10, "suite")?;
    Ok(format!("{checked} instances minimal, 2 negatives flagged"))
}

fn witness_soundness() -> Outcome {
    let t0 = Instant::now();
    let pi = PwlPeriodic::combine(&gmic(&q(1, 5)).unwrap(), &rlm_dpl1_extreme_3a(&q(1, 5)).unwrap(), &q(1, 2));
    let v = extremality_test(&pi).map_err(|e| e.to_string())?;
    ensure(v.status == Status::NotExtreme, || format!("{:?}", v.status))?;
    let w = v.witness.ok_or("no witness")?;
    ensure(!w.pi1.equal(&w.pi2), || "pi1 = pi2".into())?;
    ensure(minimality_test(&w.pi1, None).is_minimal, || "pi1 not minimal".into())?;
    ensure(minimality_test(&w.pi2, None).is_minimal, || "pi2 not minimal".into())?;
    ensure(PwlPeriodic::combine(&w.pi1, &w.pi2, &q(1, 2)).equal(&pi), || "midpoint differs from pi".into())?;
    within(t0.elapsed(), 5, "witness")?;
    Ok(format!("epsilon = {}", w.epsilon))
}

fn oracle_equivalence() -> Outcome {
    let t0 = Instant::now();
    let mut cases: Vec<(String, PwlPeriodic)> = Vec::new();
    for f in [q(1, 2), q(1, 5), q(2, 3), q(4, 5), q(1, 7)] {
        cases.push((format!("gmic({f})"), gmic(&f).unwrap()));
    }
    for (f, b) in [(q(1, 12), q(1, 6)), (q(1, 10), q(3, 20)), (q(1, 20), q(13, 50))] {
        cases.push((format!("drlm({f}, {b})"), drlm_backward_3_slope(&f, &b).unwrap()));
    }
    for (f, b, l) in [(q(1, 12), q(1, 6), q(1, 2)), (q(1, 10), q(3, 20), q(1, 3)), (q(1, 4), q(3, 10), q(1, 2))] {
        let pi = PwlPeriodic::combine(&gmic(&f).unwrap(), &drlm_backward_3_slope(&f, &b).unwrap(), &l);
        cases.push((format!("combine(gmic({f}), drlm({f}, {b}), {l})"), pi));
    }
    for (name, pi) in &cases {
        ensure(pi.is_continuous(), || format!("{name} is not continuous"))?;
        let engine = extremality_test(pi).map_err(|e| format!("{name}: {e}"))?.status;
        let oracle = oracle_check(pi).map_err(|e| format!("{name}: {e}"))?;
        let agree = matches!(
            (engine, oracle.verdict),
            (Status::Extreme, OracleVerdict::Extreme) | (Status::NotExtreme, OracleVerdict::NotExtreme)
        );
        ensure(agree, || format!("{name}: engine {engine:?}, oracle {:?} at N = {}", oracle.verdict, oracle.n))?;
        ensure(oracle.confirmed_at == 2 * oracle.n, || format!("{name}: not confirmed at 8q"))?;
    }
    within(t0.elapsed(), 30, "oracle suite")?;
    Ok(format!("{} continuous instances agree at 4q and 8q", cases.len()))
}

fn psi_params(n: usize) -> GeometricEpsParams {
    GeometricEpsParams::new(q(2, 5), q(3, 1), n).unwrap()
}

fn psi_properties() -> Outcome {
    let t0 = Instant::now();
    let f = q(2, 5);
    let one = Rational::one();
    let c = q(5, 2);
    let psis: Vec<PwlPeriodic> = (0..=6).map(|n| psi_n(&psi_params(n)).unwrap()).collect();
    for (n, p) in psis.iter().enumerate() {
        let gamma = q(2, 3).pow(n as i32) * &f;
        let pts: Vec<Rational> = p.points().cloned().collect();
        let positive: Vec<(Rational, &Rational)> = pts
            .windows(2)
            .zip(p.slopes())
            .filter(|(_, s)| s.is_positive())
            .map(|(w, s)| (&w[1] - &w[0], s))
            .collect();
        ensure(positive.len() == 1 << n, || format!("n = {n}: {} positive intervals", positive.len()))?;
        let width = &gamma / Rational::from_integer(1 << n);
        ensure(positive.iter().all(|(w, _)| *w == width), || format!("n = {n}: widths"))?;
        let slope = (&one - &gamma) / ((&one - &f) * &gamma);
        ensure(positive.iter().all(|(_, s)| **s == slope), || format!("n = {n}: slope"))?;
        let measure = partial_measure(&f, &psi_params(n).eps_list());
        ensure(measure == &one - &gamma, || format!("n = {n}: measure {measure}"))?;
        for m in n + 1..=6 {
            let bound = &c * q(2, 1).pow(1 - n as i32);
            let gap = pts.iter().chain(psis[m].points()).map(|x| (p.value(x) - psis[m].value(x)).abs()).max().unwrap();
            ensure(gap <= bound, || format!("|psi_{n} - psi_{m}| = {gap} > {bound}"))?;
        }
        let r = minimality_test(p, None);
        ensure(r.is_minimal, || format!("psi_{n} not minimal: {:?}", r.violations.first()))?;
    }
    within(t0.elapsed(), 60, "psi properties")?;
    Ok("depths 0..=6".into())
}

fn psi_extremality() -> Outcome {
    let t0 = Instant::now();
    for n in 0..=2 {
        let p = psi_n(&psi_params(n)).unwrap();
        let v = extremality_test(&p).map_err(|e| e.to_string())?;
        ensure(v.status == Status::Extreme, || format!("psi_{n}: {:?}", v.status))?;
        let o = oracle_check(&p).map_err(|e| format!("psi_{n} oracle: {e}"))?;
        ensure(o.verdict == OracleVerdict::Extreme, || format!("psi_{n}: oracle {:?}", o.verdict))?;
    }
    within(t0.elapsed(), 60, "psi extremality")?;
    Ok("n = 0, 1, 2 extreme, oracle agrees".into())
}

fn fixture(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn search_workflow() -> Outcome {
    let t0 = Instant::now();
    let text = std::fs::read_to_string(fixture("midpoint-family.json")).map_err(|e| e.to_string())?;
    let family = Family::from_json(&text).map_err(|e| e.to_string())?;
    let a = search_random(&family, 1000, 1);
    let b = search_random(&family, 1000, 1);
    ensure(a == b, || "summaries differ under the same seed".into())?;
    ensure(a.extreme == 0 && a.minimal_not_extreme == 1000, || format!("{a:?}"))?;
    within(t0.elapsed(), 600, "search")?;
    Ok("1000 samples, extreme 0, minimal_not_extreme 1000, deterministic".into())
}

fn run_cli(args: &[&str]) -> Vec<u8> {
    let o = Command::new(env!("CARGO_BIN_EXE_groupcut")).args(args).output().expect("binary runs");
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    o.stdout
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let inputs: [&[&str]; 2] = [
        &["rlm_dpl1_extreme_3a", "-p", "f=1/5"],
        &["drlm_backward_3_slope", "-p", "f=1/12", "-p", "b=1/6"],
    ];
    let mut files = 0;
    for (k, input) in inputs.iter().enumerate() {
        let mut outputs: Vec<Vec<Vec<u8>>> = Vec::new();
        for run in 0..2 {
            let mut this = Vec::new();
            let mut args = vec!["report"];
            args.extend_from_slice(input);
            args.extend_from_slice(&["--json", "-"]);
            this.push(run_cli(&args));
            for kind in ["--complex", "--function"] {
                let path = dir.path().join(format!("{k}{kind}{run}.svg"));
                let mut args = vec!["plot"];
                args.extend_from_slice(input);
                let out = path.to_str().unwrap().to_string();
                args.extend_from_slice(&[kind, "--out", &out]);
                run_cli(&args);
                this.push(std::fs::read(&path).map_err(|e| e.to_string())?);
            }
            outputs.push(this);
        }
        ensure(outputs[0] == outputs[1], || format!("{input:?}: outputs differ"))?;
        ensure(outputs[0].iter().all(|o| !o.is_empty()), || "empty output".into())?;
        files += outputs[0].len();
    }
    Ok(format!("{files} outputs byte-identical across two runs"))
}

#[test]
fn acceptance() {
    let results = [
        criterion(1, "rlm_dpl1_extreme_3a regression", rlm_regression),
        criterion(2, "drlm_backward_3_slope regression", drlm_regression),
        criterion(3, "minimality suite", minimality_suite),
        criterion(4, "NotExtreme witness soundness", witness_soundness),
        criterion(5, "oracle equivalence", oracle_equivalence),
        criterion(6, "psi sequence properties", psi_properties),
        criterion(7, "psi extremality at small depth", psi_extremality),
        criterion(8, "random search workflow", search_workflow),
        criterion(9, "report and plot determinism", determinism),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
