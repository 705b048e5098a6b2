use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumBin {
    #[serde(rename = "freq_hz")]
    pub frequency: f64,
    #[serde(rename = "power_dbc")]
    pub relative_power: f64,
}

/// Noise power relative to the beat-note carrier, one value per frequency bin.
#[derive(Debug, Clone, PartialEq)]
pub struct BeatNoteSpectrum {
    bins: Vec<SpectrumBin>,
    resolution_bandwidth: f64,
    carrier_frequency: f64,
}

impl BeatNoteSpectrum {
    pub fn new(
        bins: Vec<SpectrumBin>,
        resolution_bandwidth: f64,
        carrier_frequency: f64,
    ) -> Result<Self> {
        if bins.len() < 2 {
            return Err(Error::InvalidSpectrum(format!(
                "need at least 2 bins, got {}",
                bins.len()
            )));
        }
        for (i, bin) in bins.iter().enumerate() {
            if !(bin.frequency.is_finite() && bin.frequency > 0.0) {
                return Err(Error::InvalidSpectrum(format!(
                    "bin {i}: frequency {} Hz must be positive",
                    bin.frequency
                )));
            }
            if !(bin.relative_power.is_finite() && bin.relative_power <= 0.0) {
                return Err(Error::InvalidSpectrum(format!(
                    "bin {i}: power {} dBc must be finite and <= 0",
                    bin.relative_power
                )));
            }
        }
        if let Some(i) = bins
            .windows(2)
            .position(|w| w[1].frequency <= w[0].frequency)
        {
            return Err(Error::InvalidSpectrum(format!(
                "frequencies must be strictly increasing (bins {} and {})",
                i,
                i + 1
            )));
        }
        if !(resolution_bandwidth.is_finite() && resolution_bandwidth > 0.0) {
            return Err(Error::InvalidSpectrum(format!(
                "resolution bandwidth {resolution_bandwidth} Hz must be positive"
            )));
        }
        Ok(Self {
            bins,
            resolution_bandwidth,
            carrier_frequency,
        })
    }

    pub fn bins(&self) -> &[SpectrumBin] {
        &self.bins
    }

    pub fn resolution_bandwidth(&self) -> f64 {
        self.resolution_bandwidth
    }

    pub fn carrier_frequency(&self) -> f64 {
        self.carrier_frequency
    }

    /// Reads the `freq_hz,power_dbc` CSV format. The resolution bandwidth is
    /// taken as the smallest bin spacing.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "freq_hz" || &headers[1] != "power_dbc" {
            return Err(Error::InvalidSpectrum(format!(
                "expected header `freq_hz,power_dbc`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let bins = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<SpectrumBin>, _>>()?;
        let rbw = bins
            .windows(2)
            .map(|w| w[1].frequency - w[0].frequency)
            .fold(f64::INFINITY, f64::min);
        Self::new(bins, if rbw.is_finite() { rbw } else { 1.0 }, 0.0)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        for bin in &self.bins {
            wtr.serialize(bin)?;
        }
        wtr.flush()?;
        Ok(())
    }
}
