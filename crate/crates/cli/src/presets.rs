//! Bundled configurations for the standard figures.

use crate::{CliError, Config};

pub const PRESETS: &[(&str, &str)] = &[
    ("analyze", include_str!("../presets/analyze.toml")),
    ("fig5", include_str!("../presets/fig5.toml")),
    ("rate-qpsk", include_str!("../presets/rate-qpsk.toml")),
    ("rate-16qam", include_str!("../presets/rate-16qam.toml")),
    ("rate-qpsk-loss", include_str!("../presets/rate-qpsk-loss.toml")),
    ("rate-16qam-loss", include_str!("../presets/rate-16qam-loss.toml")),
];

pub fn preset(name: &str) -> Result<Config, CliError> {
    let (_, text) = PRESETS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
        let names: Vec<_> = PRESETS.iter().map(|p| p.0).collect();
        CliError::Config(format!("unknown preset '{name}' (available: {})", names.join(", ")))
    })?;
    Config::parse(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_parse() {
        for (name, _) in PRESETS {
            preset(name).unwrap();
        }
        assert!(preset("fig6").is_err());
    }
}
