//! Regenerate the shipped synthetic fixture.
//!
//! cargo run -p cognate-core --example make_fixture -- [DIR]

use cognate_core::synthetic::{generate, SyntheticConfig};

fn main() -> cognate_core::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/synthetic").to_owned());
    let data = generate(&SyntheticConfig::default())?;
    data.write_to(&dir)?;
    println!("wrote {} pairs to {dir}", data.pairs.len());
    Ok(())
}
