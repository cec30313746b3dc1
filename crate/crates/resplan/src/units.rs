//! dB/dBm conversions. Scenario files carry noise in dBm and SINR targets in
//! dB; everything internal works in linear watts and linear ratios, so these
//! conversions happen exactly once, at load time.

/// Converts a dBm power level to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Converts watts to dBm. Requires a strictly positive input.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Converts a dB ratio to a linear ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear ratio to dB. Requires a strictly positive input.
pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}
