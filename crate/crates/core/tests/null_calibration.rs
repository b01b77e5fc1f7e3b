//! Behaviour of the goodness-of-fit test under the exponential null.

use equimax::density::DensityModel;
use equimax::gof::simulate_size_power;

#[test]
fn null_pvalues_are_roughly_uniform() {
    let reps = 400;
    let b = 199;
    let sim = simulate_size_power(&DensityModel::exponential(1.0).unwrap(), 600, 3, reps, b, 0.05, 123).unwrap();
    let floor = 1.0 / (b + 1) as f64;
    assert!(sim.p_values.iter().all(|&p| (floor..=1.0).contains(&p)));
    let mut deciles = [0usize; 10];
    for &p in &sim.p_values {
        deciles[((p * 10.0).ceil() as usize).clamp(1, 10) - 1] += 1;
    }
    let expected = reps as f64 / 10.0;
    let sd = (reps as f64 * 0.1 * 0.9).sqrt();
    for (i, &count) in deciles.iter().enumerate() {
        assert!((count as f64 - expected).abs() <= 4.0 * sd, "decile {i}: {count} ({deciles:?})");
    }
}

#[test]
fn null_rate_does_not_depend_on_rate_parameter() {
    let run = |rate: f64| {
        simulate_size_power(&DensityModel::exponential(rate).unwrap(), 1200, 3, 400, 300, 0.05, 2024)
            .unwrap()
            .rejection_rate
    };
    let (a, b) = (run(1.0), run(7.0));
    // Same seeds give the same uniforms, so the scaled datasets are
    // identical up to rounding and the decisions nearly always agree.
    let joint_sd = (2.0 * 0.05 * 0.95 / 400.0f64).sqrt();
    assert!((a - b).abs() <= 3.0 * joint_sd, "{a} vs {b}");
    assert!((0.02..=0.08).contains(&a));
}
