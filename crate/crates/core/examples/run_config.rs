//! Drives the benchmark harness from an inline configuration.

use hamjump::bench::commands::converge;
use hamjump::bench::Config;

fn main() -> hamjump::Result<()> {
    let cfg = Config::from_toml(
        r#"
        model = "single_particle"
        rule = "gauss_lobatto_3"
        t_end = 2.5
        metric = "l1_vs_reference"
        ladder = [0.1, 0.05, 0.025, 0.0125]
        "#,
    )?;
    let result = converge(&cfg)?;
    print!("{}", result.table().as_str());
    Ok(())
}
