//! Regenerates the bundled example spectra in `data/`.
//!
//! cargo run -p stirap-core --example synth_spectra -- crates/core/data

use std::fs::File;
use std::path::PathBuf;

use stirap_core::spectra::{bump_feedforward, FeedforwardSettings, ServoBumpSpectrum};

fn main() -> stirap_core::Result<()> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "crates/core/data".into()),
    );
    let shape = ServoBumpSpectrum::default();
    let off = shape.spectrum(&FeedforwardSettings::default())?;
    let on = shape.spectrum(&bump_feedforward(shape.bump_peak_hz, 20.0)?)?;
    off.write_csv(File::create(dir.join("stokes_ff_off.csv"))?)?;
    on.write_csv(File::create(dir.join("stokes_ff_on.csv"))?)?;
    println!(
        "wrote {} bins per file to {}",
        off.bins().len(),
        dir.display()
    );
    Ok(())
}
