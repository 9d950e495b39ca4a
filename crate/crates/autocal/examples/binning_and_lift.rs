//! Continuous predictions handled by quantile binning: predictions are
//! replaced by their bin means, giving a finite prediction range the tests
//! apply to, plus a lift table comparing mean outcomes per bin.

use autocal::rng::RngStream;
use autocal::simulation::sample_gamma;
use autocal::stats::{bin_by_quantiles, estimate_null_model, lift_points};
use autocal::testing::{run_all, McConfig};
use autocal::data::{Observation, Sample};

pub fn run_example() -> autocal::Result<()> {
    // A continuous scoring model: predictions spread over [5, 20], outcomes
    // gamma with the predicted mean. The score is mildly miscalibrated at
    // the high end (outcomes run 4% above predictions there).
    let mut rng = RngStream::new(99, 0);
    let mut obs = Vec::with_capacity(4000);
    for _ in 0..4000 {
        let pi = 5.0 + 15.0 * rng.unit_open();
        let target = if pi > 16.0 { 1.04 * pi } else { pi };
        let y = sample_gamma(3.0 * target, 3.0, &mut rng)?;
        obs.push(Observation { response: y, prediction: pi });
    }
    let continuous = Sample::new(obs)?;

    let (binned, partition) = bin_by_quantiles(&continuous, 8)?;
    println!("bin  level (bin mean)  outcome mean  count");
    for p in lift_points(&binned, &partition)? {
        println!(
            "{:>3}  {:>16.3}  {:>12.3}  {:>5}",
            partition.find(p.level).map(|k| k + 1).unwrap_or(0),
            p.level,
            p.response_mean,
            p.count
        );
    }

    let model = estimate_null_model(&binned, &partition)?;
    let mc = McConfig { draws: 50_000, seed: 5 };
    println!("\ntest  statistic  critical   p-value  reject");
    for (test, outcome) in run_all(&binned, &model, 0.05, &mc)? {
        let o = outcome?;
        println!(
            "{:>4}  {:>9.4}  {:>8.4}  {:>8.5}  {}",
            test.code(),
            o.statistic,
            o.critical_value,
            o.p_value,
            if o.reject { "yes" } else { "no" }
        );
    }
    Ok(())
}

fn main() {
    run_example().unwrap()
}
