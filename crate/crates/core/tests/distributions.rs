use imbalance_evt::distributions::{
    evt_constants, tail_function, ConstantSet, DistributionSpec, Family,
};
use imbalance_evt::stats::ks_distance;
use imbalance_evt::SeedTree;
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = DistributionSpec> {
    (0usize..4, -5.0f64..5.0, 0.1f64..10.0, 0.5f64..4.0).prop_map(|(k, mu, scale, alpha)| {
        match Family::ALL[k] {
            Family::Uniform => DistributionSpec::uniform(mu, scale),
            Family::Gaussian => DistributionSpec::gaussian(mu, scale),
            Family::Laplace => DistributionSpec::laplace(mu, scale),
            Family::TwoSidedFrechet => DistributionSpec::frechet(mu, alpha),
        }
    })
}

proptest! {
    #[test]
    fn cdf_inverts_quantile(spec in spec_strategy(), e in -6.0f64..-1e-3, upper in any::<bool>()) {
        let p = if upper { 1.0 - 10f64.powf(e) } else { 10f64.powf(e) };
        let x = spec.quantile(p).unwrap();
        prop_assert!((spec.cdf(x) - p).abs() <= 1e-12, "p {p} x {x} F(x) {}", spec.cdf(x));
    }

    #[test]
    fn reflection_about_center(spec in spec_strategy(), t in 0.0f64..20.0) {
        let s = spec.cdf(spec.mu - t) + spec.cdf(spec.mu + t);
        prop_assert!((s - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn tail_function_increases(spec in spec_strategy(), lt in 0.01f64..12.0) {
        let t = 1.0 + 10f64.powf(lt);
        let a = tail_function(&spec, t).unwrap();
        let b = tail_function(&spec, t * 1.01).unwrap();
        prop_assert!(b > a, "U({t}) = {a}, U({}) = {b}", t * 1.01);
    }
}

fn maxima(spec: &DistributionSpec, n: usize, reps: u64, seed: u64) -> Vec<f64> {
    let tree = SeedTree::new(seed);
    (0..reps).map(|r| spec.sample_max(&mut tree.stream(r), n).unwrap()).collect()
}

#[test]
fn printed_uniform_constants_fail_ftg_while_exact_ones_pass() {
    let spec = DistributionSpec::uniform(0.0, 0.5);
    let n = 1000;
    let norm = evt_constants(&spec, n as u64).unwrap();
    let m = maxima(&spec, n, 3000, 11);
    let exact: Vec<f64> = m.iter().map(|&x| norm.normalize(x, ConstantSet::Exact)).collect();
    let printed: Vec<f64> = m.iter().map(|&x| norm.normalize(x, ConstantSet::Asymptotic)).collect();
    let ks_exact = ks_distance(&exact, |x| norm.limit_cdf(x));
    let ks_printed = ks_distance(&printed, |x| norm.limit_cdf(x));
    assert!(ks_exact <= 0.05, "exact {ks_exact}");
    assert!(ks_printed > 0.5, "printed {ks_printed}");
}

#[test]
fn asymptotic_constants_converge_for_laplace_and_frechet() {
    // both families have closed-form U, so the asymptotic pair is the exact
    // one up to the two-sided factor
    let lap = evt_constants(&DistributionSpec::laplace(0.0, 1.0), 1_000_000).unwrap();
    let (a, b) = lap.constants(ConstantSet::Exact);
    let (aa, ba) = lap.constants(ConstantSet::Asymptotic);
    assert!((a - aa).abs() < 1e-12);
    assert!((b - (ba - 2f64.ln())).abs() < 1e-9);

    let fr = evt_constants(&DistributionSpec::frechet(0.0, 2.0), 1_000_000).unwrap();
    let (a, b) = fr.constants(ConstantSet::Exact);
    let (aa, _) = fr.constants(ConstantSet::Asymptotic);
    assert_eq!(b, 0.0);
    assert!((aa / a - 2f64.sqrt()).abs() < 1e-5, "ratio {}", aa / a);
}
