//! Regenerates the shipped battery files.

use adlv_core::harness::Battery;

fn main() -> std::io::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "crates/cli/batteries".into());
    std::fs::write(
        format!("{dir}/default.json"),
        Battery::default_battery().to_json(),
    )?;
    std::fs::write(format!("{dir}/anchors.json"), Battery::anchors().to_json())?;
    Ok(())
}
