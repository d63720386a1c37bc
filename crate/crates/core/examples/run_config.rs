//! Build a run configuration, write it as JSON and read it back; the same
//! file drives `sturmlab --config`.

use sturmlab::config::{OutputFormat, RunConfig};
use sturmlab::quad::QuadraticIrrational;
use sturmlab::word::FiniteWord;

fn main() -> sturmlab::Result<()> {
    let mut cfg = RunConfig {
        phi: Some(QuadraticIrrational::from_i64(3, -1, 1, 5)?),
        alpha: Some(1.4),
        lambda: Some(1e-3),
        pattern_set: Some(FiniteWord::all_up_to(2)),
        ..Default::default()
    };
    cfg.ranges.k_range = Some((2, 200));
    cfg.output.format = Some(OutputFormat::Json);
    let text = cfg.to_json()?;
    println!("{text}");
    assert_eq!(RunConfig::from_json(&text)?, cfg);
    Ok(())
}
