use ncc_core::dynamics::true_in_out_ratio;
use ncc_core::exec::{derive_seed, with_workers, Exec};
use ncc_core::generators::{dcbm_from_degree, gen_dcbm, gen_er, gen_lcd, DcbmParams, ErParams, LcdParams, ThetaSpec};
use ncc_core::inference::{test_threshold, two_sample_test};
use ncc_core::sampling::{sample, SampleMethod, SampleSpec};
use ncc_core::stats::count_subgraphs_with;
use ncc_core::Graph;
use proptest::prelude::*;

fn dcbm(n: usize, r: f64, lambda: f64, seed: u64) -> Graph {
    gen_dcbm(&dcbm_from_degree(n, 3, r, lambda, ThetaSpec::constant(), seed).unwrap())
        .unwrap()
        .graph
}

#[test]
fn in_out_ratio_concentrates_on_its_expectation() {
    let (n, k, r) = (600usize, 3usize, 10.0);
    let block = (n / k) as f64;
    let within_pairs = k as f64 * block * (block - 1.0) / 2.0;
    let between_pairs = (n * n) as f64 / 2.0 * (1.0 - 1.0 / k as f64);
    let expected = r * within_pairs / between_pairs;
    let mut total = 0.0;
    for s in 0..100 {
        let sample =
            gen_dcbm(&dcbm_from_degree(n, k, r, 30.0, ThetaSpec::constant(), derive_seed(31, s)).unwrap()).unwrap();
        total += true_in_out_ratio(&sample.graph, &sample.labels).unwrap().unwrap();
    }
    let mean = total / 100.0;
    assert!(
        (mean - expected).abs() / expected < 0.15,
        "mean {mean} expected {expected}"
    );
}

#[test]
fn block_density_ratio_at_moderate_scale() {
    let s = gen_dcbm(&dcbm_from_degree(2000, 3, 10.0, 50.0, ThetaSpec::constant(), 12).unwrap()).unwrap();
    let (mut within, mut between) = (0usize, 0usize);
    for (u, v) in s.graph.edges() {
        if s.labels.label(u as usize) == s.labels.label(v as usize) {
            within += 1;
        } else {
            between += 1;
        }
    }
    let sizes: Vec<usize> = (0..3)
        .map(|b| s.labels.labels().iter().filter(|&&l| l == b).count())
        .collect();
    let within_pairs: usize = sizes.iter().map(|&m| m * (m - 1) / 2).sum();
    let between_pairs = 2000 * 1999 / 2 - within_pairs;
    let ratio = (within as f64 / within_pairs as f64) / (between as f64 / between_pairs as f64);
    assert!((ratio - 10.0).abs() < 1.0, "density ratio {ratio}");
}

#[test]
fn generators_are_reproducible() {
    let er = ErParams {
        n: 500,
        p: 0.03,
        seed: 9,
    };
    assert_eq!(gen_er(&er).unwrap(), gen_er(&er).unwrap());
    let d = DcbmParams::balanced(500, 4, 0.1, 0.01, ThetaSpec::power_law(3.5), 9);
    assert_eq!(gen_dcbm(&d).unwrap(), gen_dcbm(&d).unwrap());
    let l = LcdParams { n: 2000, m: 4, seed: 9 };
    assert_eq!(gen_lcd(&l).unwrap(), gen_lcd(&l).unwrap());
    assert_ne!(gen_er(&er).unwrap(), gen_er(&ErParams { seed: 10, ..er }).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn two_sample_is_symmetric_exact_and_monotone_in_alpha(
        s1 in 0u64..1000, s2 in 0u64..1000, r1 in 2.0f64..12.0, r2 in 2.0f64..12.0,
    ) {
        let g1 = dcbm(300, r1, 15.0, s1);
        let g2 = dcbm(300, r2, 15.0, s2);
        let t = two_sample_test(&g1, &g2, 3, 0.05).unwrap();
        let back = two_sample_test(&g2, &g1, 3, 0.05).unwrap();
        prop_assert_eq!(t.reject, back.reject);
        prop_assert_eq!(t.statistic, back.statistic);
        let c = test_threshold(0.05, 3, t.d1, t.d2).unwrap();
        prop_assert!((c - t.threshold).abs() <= 1e-12 * c);
        let strict = two_sample_test(&g1, &g2, 3, 0.01).unwrap();
        prop_assert!(!strict.reject || t.reject);
    }

    #[test]
    fn samplers_respect_size_and_containment(
        n in 20usize..120, p in 0.0f64..0.3, seed in 0u64..10_000, f in 0.05f64..1.0,
        mi in 0usize..7,
    ) {
        let g = gen_er(&ErParams { n, p, seed }).unwrap();
        let method = SampleMethod::ALL[mi];
        let spec = SampleSpec::new(method, f, seed ^ 0xABCD);
        let s = spec.target_size(n).unwrap();
        let sub = sample(&g, &spec).unwrap();
        let got = sub.graph.n();
        if method == SampleMethod::Es {
            prop_assert!(got == s || got + 1 == s, "ES size {got} target {s}");
        } else {
            prop_assert_eq!(got, s);
        }
        prop_assert!(sub.mapping.windows(2).all(|w| w[0] < w[1]));
        for (a, b) in sub.graph.edges() {
            prop_assert!(g.has_edge(sub.mapping[a as usize] as usize, sub.mapping[b as usize] as usize));
        }
        // induced: every parent edge among sampled nodes is present
        for (i, &u) in sub.mapping.iter().enumerate() {
            for (j, &v) in sub.mapping.iter().enumerate().skip(i + 1) {
                prop_assert_eq!(g.has_edge(u as usize, v as usize), sub.graph.has_edge(i, j));
            }
        }
        let again = sample(&g, &spec).unwrap();
        prop_assert_eq!(again.mapping, sub.mapping);
    }

    #[test]
    fn counts_do_not_depend_on_worker_count(seed in 0u64..1000, workers in 1usize..9) {
        let g = gen_dcbm(&DcbmParams::balanced(400, 3, 0.08, 0.01, ThetaSpec::power_law(3.0), seed)).unwrap().graph;
        let base = count_subgraphs_with(&g, Exec::Sequential);
        let pooled = with_workers(workers, || count_subgraphs_with(&g, Exec::default()));
        prop_assert_eq!(base, pooled);
    }
}
