//! Builds `Φ` for the built-in scenarios and checks it on samples.

use std::sync::Arc;
use std::time::Instant;

use csb_shuffle::csb::{run_csb, scenario, CsbConfig, CsbInstance};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["same-shuffle", "absorbed-palette"] {
        let inst = Arc::new(CsbInstance::build(&scenario(name).unwrap())?);
        let start = Instant::now();
        let report = run_csb(inst, CsbConfig::default())?;
        println!(
            "{name}: passed={} resolved={:?} unresolved={:?} pairs={} ({:.1?})",
            report.passed(),
            report.resolved,
            report.unresolved,
            report.session_pairs,
            start.elapsed()
        );
    }
    Ok(())
}
