//! Critical-value table for the built-in six-level example model at the 5%
//! level. Two of the seven values are closed forms, one comes from a root
//! search on a product of normal probabilities, and four are Monte Carlo
//! quantiles with a reported standard error.

use autocal::asymptotics::QuantileMethod;
use autocal::simulation::GammaLevelModel;
use autocal::testing::{critical_value, per_test_seed, McConfig, TestId};

pub fn run_example() -> autocal::Result<()> {
    let model = GammaLevelModel::table_example();
    let null = model.null_model();
    let level = 0.05;
    let seed = 42;

    println!("level = {level}, monte carlo draws = 200000");
    println!("test  critical value  method       std error");
    for t in TestId::ALL {
        let q = critical_value(
            t,
            null,
            level,
            &McConfig { draws: 200_000, seed: per_test_seed(seed, t) },
        )?;
        let se = q
            .mc_standard_error()
            .map(|s| format!("{s:.5}"))
            .unwrap_or_else(|| "-".into());
        let method = match q.method {
            QuantileMethod::ClosedForm => "closed form",
            QuantileMethod::RootSearch => "root search",
            QuantileMethod::MonteCarlo => "monte carlo",
        };
        println!("{:>4}  {:>14.4}  {:<11}  {:>9}", t.code(), q.critical_value, method, se);
    }
    Ok(())
}

fn main() {
    run_example().unwrap()
}
