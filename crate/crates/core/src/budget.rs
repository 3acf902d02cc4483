//! Enumeration caps shared by every module.
//!
//! The defaults can be overridden once per process, typically from the
//! `BQ_BUDGET` environment variable (`james=26,signs=22`).

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budget {
    /// Largest James section (pattern enumeration over `dim + 1` positions).
    pub james: usize,
    /// Largest section for sign-vector enumeration of unconditional constants.
    pub signs: usize,
    /// Largest James section for the `{-1,0,1}^N` enumeration bounding `K_u`.
    pub james_signs: usize,
    /// Largest block count for exact sign-vector enumeration in certificates.
    pub blocks: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            james: 24,
            signs: 20,
            james_signs: 12,
            blocks: 16,
        }
    }
}

static INSTALLED: OnceLock<Budget> = OnceLock::new();

impl Budget {
    /// Parses `key=value` pairs separated by commas. Unknown keys are errors.
    pub fn parse_overrides(spec: &str, base: Budget) -> Result<Budget> {
        let mut out = base;
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("budget entry `{item}` is not key=value")))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("budget value `{value}` is not an integer")))?;
            match key.trim() {
                "james" => out.james = value,
                "signs" => out.signs = value,
                "james_signs" => out.james_signs = value,
                "blocks" => out.blocks = value,
                other => {
                    return Err(Error::Unknown {
                        what: "budget key",
                        name: other.to_string(),
                    })
                }
            }
        }
        Ok(out)
    }

    pub fn from_env() -> Result<Budget> {
        match std::env::var("BQ_BUDGET") {
            Ok(spec) => Budget::parse_overrides(&spec, Budget::default()),
            Err(_) => Ok(Budget::default()),
        }
    }

    /// Installs process-wide caps. Only the first call has an effect.
    pub fn install(self) -> Budget {
        *INSTALLED.get_or_init(|| self)
    }

    /// The installed caps, or the defaults.
    pub fn current() -> Budget {
        INSTALLED.get().copied().unwrap_or_default()
    }

    pub(crate) fn check(what: &'static str, requested: usize, limit: usize) -> Result<()> {
        if requested > limit {
            Err(Error::Budget {
                what,
                requested,
                limit,
            })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let b = Budget::parse_overrides("james=30, signs=22", Budget::default()).unwrap();
        assert_eq!(b.james, 30);
        assert_eq!(b.signs, 22);
        assert_eq!(b.blocks, 16);
        assert!(Budget::parse_overrides("jams=3", Budget::default()).is_err());
        assert!(Budget::parse_overrides("james", Budget::default()).is_err());
    }
}
