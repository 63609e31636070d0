use std::collections::BTreeMap;
use std::time::Instant;

use groupcut::compendium::{
    catalog, construct, drlm_backward_3_slope, gmic, kf_params_of_psi, partial_measure, psi_n, psi_n_from_eps,
    rlm_dpl1_extreme_3a, EntryStatus, GeometricEpsParams,
};
use groupcut::rational::q;
use groupcut::{minimality_test, Error, PwlPeriodic, Rational, Side};

fn params(f: Rational, n: usize) -> GeometricEpsParams {
    GeometricEpsParams::new(f, q(3, 1), n).unwrap()
}

/// Open intervals on which the function is strictly increasing.
fn positive_intervals(p: &PwlPeriodic) -> Vec<(Rational, Rational)> {
    let pts: Vec<Rational> = p.points().cloned().collect();
    pts.windows(2)
        .zip(p.slopes())
        .filter(|(_, s)| s.is_positive())
        .map(|(w, _)| (w[0].clone(), w[1].clone()))
        .collect()
}

#[test]
fn psi_interval_structure() {
    let f = q(2, 5);
    for n in 0..=6usize {
        let p = psi_n(&params(f.clone(), n)).unwrap();
        let gamma = q(2, 3).pow(n as i32) * &f;
        let ivs = positive_intervals(&p);
        assert_eq!(ivs.len(), 1 << n, "n = {n}");
        let width = &gamma / &Rational::from_integer(1 << n);
        assert!(ivs.iter().all(|(a, b)| b - a == width));
        let slope = (q(1, 1) - &gamma) / ((q(1, 1) - &f) * &gamma);
        assert!(p.slopes().filter(|s| s.is_positive()).all(|s| *s == slope));
        let eps = params(f.clone(), n).eps_list();
        assert_eq!(partial_measure(&f, &eps), q(1, 1) - &gamma);
    }
}

#[test]
fn psi_uniform_bound() {
    let f = q(2, 5);
    let c = q(5, 2);
    let psis: Vec<PwlPeriodic> = (0..=6).map(|n| psi_n(&params(f.clone(), n)).unwrap()).collect();
    for n in 0..=6usize {
        for m in n + 1..=6 {
            let diff = psis[n].add_scaled(&q(-1, 1), &psis[m]);
            let bound = &c * &q(2, 1).pow(1 - n as i32);
            assert!(diff.max_abs() <= bound, "n = {n}, m = {m}");
        }
    }
}

#[test]
fn psi_endpoint_agreement_and_slope_growth() {
    let f = q(2, 5);
    let mut last_slope = Rational::zero();
    for n in 0..6usize {
        let a = psi_n(&params(f.clone(), n)).unwrap();
        let b = psi_n(&params(f.clone(), n + 1)).unwrap();
        for (lo, hi) in positive_intervals(&a) {
            assert_eq!(a.value(&lo), b.value(&lo));
            assert_eq!(a.value(&hi), b.value(&hi));
        }
        let s = a.slopes().filter(|s| s.is_positive()).next().unwrap().clone();
        assert!(s > last_slope);
        last_slope = s;
    }
}

#[test]
fn psi_minimal_up_to_depth_six() {
    let t0 = Instant::now();
    for n in 0..=6usize {
        let r = minimality_test(&psi_n(&params(q(2, 5), n)).unwrap(), None);
        assert!(r.is_minimal, "n = {n}: {:?}", r.violations.first());
        assert_eq!(r.f, Some(q(2, 5)));
    }
    eprintln!("psi_0..psi_6 minimality: {:?}", t0.elapsed());
}

#[test]
fn kf_params_start_with_f_and_one() {
    let k = kf_params_of_psi(&params(q(2, 5), 2));
    assert_eq!(k[0], q(2, 5));
    assert_eq!(k[1], q(1, 1));
}

#[test]
fn explicit_eps_matches_geometric() {
    let p = params(q(2, 5), 3);
    let a = psi_n(&p).unwrap();
    let b = psi_n_from_eps(&q(2, 5), &p.eps_list()).unwrap();
    assert!(a.equal(&b));
}

#[test]
fn constructible_entries_minimal_on_parameter_grid() {
    let grids: Vec<(&str, Vec<Vec<(&str, &str)>>)> = vec![
        ("gmic", ["1/2", "1/5", "2/3", "4/5", "1/7"].iter().map(|f| vec![("f", *f)]).collect()),
        (
            "rlm_dpl1_extreme_3a",
            ["1/7", "1/5", "1/4", "3/10", "33/100"].iter().map(|f| vec![("f", *f)]).collect(),
        ),
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
    ];
    let constructible: Vec<&str> = catalog()
        .iter()
        .filter(|e| e.status == EntryStatus::Constructible)
        .map(|e| e.name)
        .collect();
    assert_eq!(constructible.len(), grids.len());
    for (name, sets) in grids {
        assert!(constructible.contains(&name));
        assert!(sets.len() >= 5);
        for set in sets {
            let map: BTreeMap<String, String> = set.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
            let pi = construct(name, &map).unwrap_or_else(|e| panic!("{name} {map:?}: {e}"));
            let r = minimality_test(&pi, None);
            assert!(r.is_minimal, "{name} {map:?}: {:?}", r.violations.first());
        }
    }
}

#[test]
fn stubs_cite_literature() {
    let c = catalog();
    assert_eq!(c.len(), 20);
    let stub = c.iter().find(|e| e.name == "hildebrand_5_slope_22_1").unwrap();
    assert_eq!(stub.status, EntryStatus::KnownAbsentStub);
    match construct("chen_4_slope", &BTreeMap::new()) {
        Err(Error::NotImplemented { citation, .. }) => assert!(citation.contains("Chen")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn known_discontinuities() {
    let r = rlm_dpl1_extreme_3a(&q(1, 4)).unwrap();
    let b = q(5, 8);
    assert!(r.eval(&b, Side::Left) > r.eval(&b, Side::Right));
    assert!(gmic(&q(1, 4)).unwrap().is_continuous());
    assert!(drlm_backward_3_slope(&q(1, 12), &q(1, 6)).unwrap().is_continuous());
}
