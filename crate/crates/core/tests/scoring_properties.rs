use compsel_core::score::{component_scores, evaluate_all, grand_totals};
use compsel_core::{CriteriaSet, MetricsTable};
use proptest::prelude::*;

/// Straight-line reference for the grand totals of one combination.
fn oracle(rows: &[(f64, f64, f64)], use_e: bool, use_d: bool, use_r: bool) -> Vec<f64> {
    let m = rows.len() as f64;
    let mut se = 0.0;
    let mut sd = 0.0;
    let mut sr = 0.0;
    for &(e, d, r) in rows {
        se += e;
        sd += d;
        sr += r;
    }
    let mut ce = Vec::new();
    let mut cd = Vec::new();
    let mut share = Vec::new();
    for &(e, d, r) in rows {
        ce.push(se / e);
        cd.push(sd / d);
        share.push(r / sr);
    }
    let x: f64 = share.iter().sum::<f64>() / m;
    let y: f64 = ce.iter().sum::<f64>() / m;
    let z: f64 = cd.iter().sum::<f64>() / m;
    let k = (y + z) / (2.0 * x);
    let mut totals = Vec::new();
    for j in 0..rows.len() {
        let mut t = 0.0;
        if use_e {
            t += ce[j];
        }
        if use_d {
            t += cd[j];
        }
        if use_r {
            t += k * share[j];
        }
        totals.push(t);
    }
    let grand: f64 = totals.iter().sum();
    totals.iter().map(|t| 100.0 * t / grand).collect()
}

fn flags(set: CriteriaSet) -> (bool, bool, bool) {
    use compsel_core::Criterion::*;
    (set.contains(Encode), set.contains(Decode), set.contains(Ratio))
}

fn table(rows: &[(f64, f64, f64)]) -> MetricsTable {
    let names: Vec<String> = (0..rows.len()).map(|i| format!("M{i}")).collect();
    MetricsTable::from_triples(
        rows.iter()
            .zip(&names)
            .map(|(&(e, d, r), n)| (n.as_str(), e, d, r)),
        "generated",
    )
    .unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

fn metric() -> impl Strategy<Value = f64> {
    (-4.0f64..=4.0).prop_map(|p| 10f64.powf(p))
}

fn rows(max: usize) -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((metric(), metric(), metric()), 2..=max)
}

const ALL_SETS: [&str; 7] = ["ed", "er", "dr", "edr", "e", "d", "r"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn totals_sum_to_100(rows in rows(10)) {
        let t = table(&rows);
        let s = component_scores(&t);
        for tok in ALL_SETS {
            let r = grand_totals(&s, tok.parse().unwrap()).unwrap();
            let sum: f64 = r.entries.iter().map(|e| e.g).sum();
            prop_assert!((sum - 100.0).abs() < 1e-9, "{tok}: {sum}");
        }
    }

    #[test]
    fn ratio_share_mean_is_one_over_m(rows in rows(10)) {
        let s = component_scores(&table(&rows));
        prop_assert!((s.x - 1.0 / rows.len() as f64).abs() < 1e-12);
    }

    #[test]
    fn matches_reference(rows in rows(10)) {
        let reports = evaluate_all(&table(&rows)).unwrap();
        for r in reports {
            let (e, d, q) = flags(r.criteria);
            let want = oracle(&rows, e, d, q);
            for (entry, w) in r.entries.iter().zip(&want) {
                prop_assert!(close(entry.g, *w, 1e-9), "{}: {} vs {}", r.criteria, entry.g, w);
            }
        }
    }

    #[test]
    fn unit_scaling_leaves_totals_unchanged(
        rows in rows(8),
        which in 0usize..3,
        lambda in prop::sample::select(vec![1e-3, 7.0, 1e4]),
    ) {
        let scaled: Vec<_> = rows
            .iter()
            .map(|&(e, d, r)| match which {
                0 => (e * lambda, d, r),
                1 => (e, d * lambda, r),
                _ => (e, d, r * lambda),
            })
            .collect();
        let a = evaluate_all(&table(&rows)).unwrap();
        let b = evaluate_all(&table(&scaled)).unwrap();
        for (ra, rb) in a.iter().zip(&b) {
            for (ea, eb) in ra.entries.iter().zip(&rb.entries) {
                prop_assert!(close(ea.g, eb.g, 1e-9));
            }
        }
    }

    #[test]
    fn dominating_method_scores_higher(
        rows in rows(8),
        f in (1.01f64..10.0, 1.01f64..10.0, 1.01f64..10.0),
    ) {
        let mut rows = rows;
        let (e, d, r) = rows[0];
        rows[1] = (e / f.0, d / f.1, r * f.2);
        for report in evaluate_all(&table(&rows)).unwrap() {
            prop_assert!(report.entries[1].g > report.entries[0].g, "{}", report.criteria);
        }
    }

    #[test]
    fn permuting_rows_permutes_entries(rows in rows(10), seed in any::<u64>()) {
        let m = rows.len();
        let mut perm: Vec<usize> = (0..m).collect();
        let mut s = seed;
        for i in (1..m).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let named = table(&rows);
        let permuted = MetricsTable::new(
            perm.iter().map(|&i| named.rows()[i].clone()).collect(),
            "permuted",
        )
        .unwrap();
        let a = evaluate_all(&named).unwrap();
        let b = evaluate_all(&permuted).unwrap();
        for (ra, rb) in a.iter().zip(&b) {
            for (k, &i) in perm.iter().enumerate() {
                prop_assert_eq!(&rb.entries[k].method_id, &ra.entries[i].method_id);
                prop_assert!(close(rb.entries[k].g, ra.entries[i].g, 1e-9));
            }
        }
    }
}

#[test]
fn single_method_takes_everything() {
    let t = table(&[(0.3, 0.2, 1.7)]);
    for r in evaluate_all(&t).unwrap() {
        assert_eq!(r.entries.len(), 1);
        assert!((r.winner_score - 100.0).abs() < 1e-12);
    }
}

#[test]
fn identical_rows_tie_to_the_first() {
    let t = table(&[(1.0, 1.0, 1.0), (0.5, 0.5, 3.0), (0.5, 0.5, 3.0)]);
    for r in evaluate_all(&t).unwrap() {
        assert_eq!(r.entries[1].g, r.entries[2].g);
        assert_eq!(r.winner, "M1");
    }
}
