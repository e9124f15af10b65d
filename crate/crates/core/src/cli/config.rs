use serde::Deserialize;

use super::args::Format;

/// Defaults read from `--config`. Keys mirror the long flag names; a flag
/// given on the command line always wins.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub language: Option<String>,
    pub scheme: Option<String>,
    pub metrics: Option<Vec<String>>,
    pub strict: Option<bool>,
    pub trials: Option<usize>,
    pub ratios: Option<String>,
    pub threshold: Option<f64>,
    pub max_gap: Option<usize>,
    pub min_len: Option<usize>,
    pub max_len: Option<usize>,
    pub slack: Option<usize>,
    pub std: Option<String>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_kebab_keys() {
        let c = FileConfig::parse("seed = 7\nformat = \"json\"\nmax-gap = 3\nmetrics = [\"epm\"]\n").unwrap();
        assert_eq!((c.seed, c.format, c.max_gap), (Some(7), Some(Format::Json), Some(3)));
        assert_eq!(c.metrics.unwrap(), ["epm"]);
        assert!(FileConfig::parse("sed = 1").is_err());
    }
}
