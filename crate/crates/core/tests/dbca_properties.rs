use compgen_core::dbca::{
    build_mcd_split, divergence, divergence_sweep, measure, measure_split, profile, CompoundConfig, McdConfig,
    ATOM_ALPHA, COMPOUND_ALPHA,
};
use compgen_core::scan::enumerate_dataset;
use compgen_core::splits::build_random_split;
use compgen_core::{Example, Parallelism};
use proptest::prelude::*;
use std::collections::BTreeMap;

type Dist = BTreeMap<String, f64>;

fn dist(weights: &[f64], offset: usize) -> Dist {
    let total: f64 = weights.iter().sum();
    weights.iter().enumerate().map(|(i, w)| (format!("k{}", i + offset), w / total)).collect()
}

fn weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.001f64..10.0, 1..20)
}

fn subsample(step: usize) -> Vec<Example> {
    enumerate_dataset().into_iter().step_by(step).collect()
}

fn small_config(target: f64) -> McdConfig {
    McdConfig { seed: 3, target_compound_divergence: target, iterations: 2_000, ..McdConfig::default() }
}

#[test]
fn two_point_hand_case() {
    let p = dist(&[1.0], 0);
    let q = dist(&[1.0, 1.0], 0);
    // p^0.5 q^0.5 over the shared key: 1 * sqrt(0.5)
    let d = divergence(&p, &q, 0.5).unwrap();
    assert!((d - (1.0 - 0.5f64.sqrt())).abs() < 1e-12);
}

proptest! {
    #[test]
    fn self_divergence_is_zero(w in weights(), alpha in 0.05f64..0.95) {
        let p = dist(&w, 0);
        prop_assert!(divergence(&p, &p, alpha).unwrap().abs() < 1e-9);
    }

    #[test]
    fn disjoint_support_is_one(a in weights(), b in weights(), alpha in 0.05f64..0.95) {
        let p = dist(&a, 0);
        let q = dist(&b, 100);
        prop_assert_eq!(divergence(&p, &q, alpha).unwrap(), 1.0);
    }

    #[test]
    fn bounded_and_invariant_to_relabeling(a in weights(), b in weights(), alpha in 0.05f64..0.95) {
        let p = dist(&a, 0);
        let q = dist(&b, 0);
        let d = divergence(&p, &q, alpha).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        let relabel = |m: &Dist| -> Dist { m.iter().map(|(k, v)| (format!("z-{k}"), *v)).collect() };
        let d2 = divergence(&relabel(&p), &relabel(&q), alpha).unwrap();
        prop_assert!((d - d2).abs() < 1e-12);
    }
}

#[test]
fn profile_of_union_is_weighted_mixture() {
    let data = subsample(97);
    let (a, b) = data.split_at(80);
    let cfg = CompoundConfig::default();
    let pa = profile(a, cfg).unwrap();
    let pb = profile(b, cfg).unwrap();
    let pu = profile(&data, cfg).unwrap();
    // atom mass is proportional to the number of rule applications
    let mass = |ex: &[Example]| -> f64 {
        ex.iter().map(|e| e.derivation.as_ref().unwrap().nodes().len() as f64).sum()
    };
    let (ma, mb) = (mass(a), mass(b));
    for (k, &v) in &pu.atoms {
        let mix = (pa.atoms.get(k).unwrap_or(&0.0) * ma + pb.atoms.get(k).unwrap_or(&0.0) * mb) / (ma + mb);
        assert!((v - mix).abs() < 1e-12, "{k}");
    }
}

fn objective(train: &[&Example], test: &[&Example], cfg: &McdConfig) -> (f64, f64) {
    let r = measure(train, test, cfg.compounds, (cfg.atom_alpha, cfg.compound_alpha)).unwrap();
    ((r.atom_divergence - cfg.max_atom_divergence).max(0.0), (r.compound_divergence - cfg.target_compound_divergence).abs())
}

#[test]
fn mcd_result_is_a_local_optimum_under_single_swaps() {
    let data = subsample(170);
    let cfg = McdConfig { parallelism: Parallelism::Sequential, ..small_config(1.0) };
    let out = build_mcd_split(&data, &cfg).unwrap();
    out.split.check_partition(&data).unwrap();
    let index: BTreeMap<&str, &Example> = data.iter().map(|e| (e.id.as_str(), e)).collect();
    let train: Vec<&Example> = out.split.train.iter().map(|id| index[id.as_str()]).collect();
    let test: Vec<&Example> = out.split.test.iter().map(|id| index[id.as_str()]).collect();
    let base = objective(&train, &test, &cfg);
    for i in 0..train.len() {
        for j in 0..test.len() {
            let mut tr = train.clone();
            let mut te = test.clone();
            std::mem::swap(&mut tr[i], &mut te[j]);
            let cand = objective(&tr, &te, &cfg);
            let better = cand.0 < base.0 - 1e-9 || (cand.0 <= base.0 + 1e-9 && cand.1 < base.1 - 1e-9);
            assert!(!better, "swap {i},{j} improves {base:?} to {cand:?}");
        }
    }
}

#[test]
fn zero_target_stays_near_random() {
    let data = subsample(20);
    let random = build_random_split(&data, 3, 0.8).unwrap();
    let alphas = (ATOM_ALPHA, COMPOUND_ALPHA);
    let r = measure_split(&data, &random, CompoundConfig::default(), alphas).unwrap();
    let out = build_mcd_split(&data, &small_config(0.0)).unwrap();
    assert!(out.report.compound_divergence <= r.compound_divergence + 0.05);
    assert!(out.report.atom_divergence <= 0.02);
}

#[test]
fn sweep_is_monotone_in_target() {
    let data = subsample(40);
    let targets = [0.0, 0.1, 0.2, 0.4];
    let outs = divergence_sweep(&data, &targets, &small_config(0.0)).unwrap();
    let achieved: Vec<f64> = outs.iter().map(|o| o.report.compound_divergence).collect();
    for w in achieved.windows(2) {
        assert!(w[1] + 0.01 >= w[0], "{achieved:?}");
    }
    for o in &outs {
        assert!(o.report.atom_divergence <= 0.02 + 1e-12);
    }
}

#[test]
fn search_is_identical_across_parallelism() {
    let data = subsample(60);
    let seq = build_mcd_split(&data, &McdConfig { parallelism: Parallelism::Sequential, ..small_config(1.0) }).unwrap();
    let par = build_mcd_split(&data, &McdConfig { parallelism: Parallelism::Parallel, ..small_config(1.0) }).unwrap();
    assert_eq!(seq.split.to_json(), par.split.to_json());
    assert_eq!(seq.stats, par.stats);
}
