//! The file surface: write a sample CSV, run the `test` command against it
//! with an output directory, and show the JSON report that lands there.

use autocal::cli::{cmd_test, RunContext, TestArgs};
use autocal::io::write_sample_csv;
use autocal::simulation::{simulate_sample, Contamination, GammaLevelModel};

pub fn run_example() -> autocal::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let input = dir.path().join("sample.csv");

    let generator = GammaLevelModel::table_example();
    let sample = simulate_sample(&generator, 500, Contamination::Global { delta: 0.3 }, 77)?;
    write_sample_csv(&input, &sample)?;

    let ctx = RunContext {
        seed: 42,
        alpha: 0.05,
        mc_draws: 20_000,
        out: Some(dir.path().to_path_buf()),
    };
    let report = cmd_test(
        &TestArgs { input, reference: None, model: None, bins: None },
        &ctx,
    )?;

    println!(
        "report.json written under {} (model {} from {})",
        dir.path().display(),
        report.model_digest,
        report.model_source
    );
    println!("n = {}, level = {}, seed = {}", report.n, report.level, report.seed);
    for row in &report.results {
        println!(
            "{:>4}: {} p = {}",
            row.test.code(),
            row.status,
            row.p_value.map(|p| format!("{p:.5}")).unwrap_or_else(|| "-".into())
        );
    }

    let text = std::fs::read_to_string(dir.path().join("report.json")).expect("report exists");
    println!("\nreport.json is {} bytes of pretty JSON", text.len());
    Ok(())
}

fn main() {
    run_example().unwrap()
}
