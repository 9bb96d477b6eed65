//! Flat `key=value` experiment configuration.
//!
//! One pair per line; `#` starts a comment; blank lines are ignored. Later
//! assignments override earlier ones, and command-line flags override both.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mode {
    Simulate,
    Branching,
    Meanfield,
    Percolation,
    Block,
    Verify,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::Branching => "branching",
            Mode::Meanfield => "meanfield",
            Mode::Percolation => "percolation",
            Mode::Block => "block",
            Mode::Verify => "verify",
        }
    }
}

/// A parsed experiment: the mode, its raw parameters and the run controls.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub parameters: Params,
    pub replicas: Option<u64>,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub output_path: String,
}

/// Raw parameters with consumption tracking, so unknown keys can be reported.
#[derive(Debug, Clone, Default)]
pub struct Params {
    values: BTreeMap<String, String>,
    used: BTreeMap<String, String>,
}

fn validation(key: &str, message: impl Display) -> CliError {
    CliError::Validation {
        key: key.to_owned(),
        message: message.to_string(),
    }
}

impl Params {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut params = Params::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| validation("config", format!("line {}: expected key=value, got `{line}`", lineno + 1)))?;
            params.set(key.trim(), value.trim());
        }
        Ok(params)
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.values.insert(key.to_owned(), value.to_owned());
    }

    /// Removes and returns a raw value, recording it for the config echo.
    fn take_raw(&mut self, key: &str) -> Option<String> {
        let v = self.values.remove(key)?;
        self.used.insert(key.to_owned(), v.clone());
        Some(v)
    }

    pub fn get<T>(&mut self, key: &str, default: T) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        match self.take_raw(key) {
            Some(raw) => raw
                .parse()
                .map_err(|e| validation(key, format!("cannot parse `{raw}`: {e}"))),
            None => {
                self.used.insert(key.to_owned(), default.to_string());
                Ok(default)
            }
        }
    }

    pub fn get_opt<T>(&mut self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.take_raw(key)
            .map(|raw| {
                raw.parse()
                    .map_err(|e| validation(key, format!("cannot parse `{raw}`: {e}")))
            })
            .transpose()
    }

    /// Fails on the first key that no mode consumed.
    pub fn finish(&self) -> Result<(), CliError> {
        match self.values.keys().next() {
            Some(key) => Err(validation(key, "unknown parameter for this mode")),
            None => Ok(()),
        }
    }

    /// Every consumed parameter, defaults included, in key order.
    pub fn echo(&self) -> &BTreeMap<String, String> {
        &self.used
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_overrides() {
        let mut p = Params::parse("# header\n d = 2 \ngamma=0.1 # trailing\n\nd=3\n").unwrap();
        assert_eq!(p.get::<u32>("d", 1).unwrap(), 3);
        assert_eq!(p.get::<f64>("gamma", 0.0).unwrap(), 0.1);
        assert_eq!(p.get::<f64>("horizon", 5.0).unwrap(), 5.0);
        assert!(p.finish().is_ok());
        assert_eq!(p.echo()["horizon"], "5");
    }

    #[test]
    fn errors_name_the_key() {
        let mut p = Params::parse("gamma=abc\nextra=1").unwrap();
        match p.get::<f64>("gamma", 0.0) {
            Err(CliError::Validation { key, .. }) => assert_eq!(key, "gamma"),
            other => panic!("{other:?}"),
        }
        match p.finish() {
            Err(CliError::Validation { key, .. }) => assert_eq!(key, "extra"),
            other => panic!("{other:?}"),
        }
        assert!(Params::parse("novalue").is_err());
    }

    #[test]
    fn infinity_parses() {
        let mut p = Params::parse("lambda2=inf\nother=INFINITY").unwrap();
        assert_eq!(p.get::<f64>("lambda2", 0.0).unwrap(), f64::INFINITY);
        assert_eq!(p.get::<f64>("other", 0.0).unwrap(), f64::INFINITY);
    }
}
