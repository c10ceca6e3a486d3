//! Key-value run configuration files.
//!
//! ```text
//! # comments start with '#'
//! command = sweep
//! from = -32
//! to = 10
//! points = 200
//! ```
//!
//! Every key except `command` names a long flag of the chosen subcommand
//! (underscores may stand for dashes). `true` turns a switch on and `false`
//! leaves it off. Flags given on the command line win over the file.

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Syntax { path: String, line: usize, message: String },
}

/// One `key = value` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Option<String>,
    pub entries: Vec<Entry>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses configuration text; `origin` only labels error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| ConfigError::Syntax { path: origin.to_string(), line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((k, v)) = content.split_once('=') else {
                return Err(err(format!("expected `key = value`, found `{content}`")));
            };
            let key = k.trim().replace('_', "-");
            let value = unquote(v.trim()).to_string();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
                return Err(err(format!("invalid key `{}`", k.trim())));
            }
            if key == "config" {
                return Err(err("configuration files cannot include other files".into()));
            }
            if cfg.entries.iter().any(|e| e.key == key) || (key == "command" && cfg.command.is_some()) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            if key == "command" {
                if value.is_empty() {
                    return Err(err("empty command".into()));
                }
                cfg.command = Some(value);
            } else {
                cfg.entries.push(Entry { key, value, line });
            }
        }
        Ok(cfg)
    }

    /// The entries rendered as command-line arguments.
    pub fn to_args(&self) -> Vec<String> {
        let mut out = Vec::new();
        for e in &self.entries {
            match e.value.as_str() {
                "true" => out.push(format!("--{}", e.key)),
                "false" => {}
                v => out.push(format!("--{}={v}", e.key)),
            }
        }
        out
    }

    /// Line of the entry behind flag `--key`, for error reporting.
    pub fn line_of(&self, key: &str) -> Option<usize> {
        self.entries.iter().find(|e| e.key == key).map(|e| e.line)
    }
}

fn unquote(v: &str) -> &str {
    let b = v.as_bytes();
    if b.len() >= 2 && (b[0] == b'"' || b[0] == b'\'') && b[b.len() - 1] == b[0] {
        &v[1..v.len() - 1]
    } else {
        v
    }
}

/// Options that take a value and may precede the subcommand.
const GLOBAL_VALUED: [&str; 3] = ["--config", "--format", "--output"];

/// Merges an optional configuration file into `argv`.
///
/// The result is `prog SUBCOMMAND <file flags> <command-line flags>`, so a
/// flag repeated on the command line overrides the file. Returns the merged
/// arguments and the loaded configuration.
pub fn merge_args(
    argv: &[String],
    is_subcommand: impl Fn(&str) -> bool,
) -> Result<(Vec<String>, Option<RunConfig>), ConfigError> {
    let Some((prog, rest)) = argv.split_first() else {
        return Ok((argv.to_vec(), None));
    };
    let mut config_path = None;
    let mut sub_pos = None;
    let mut i = 0;
    while i < rest.len() {
        let a = rest[i].as_str();
        if a == "--config" {
            config_path = rest.get(i + 1).cloned();
            i += 2;
            continue;
        }
        if let Some(p) = a.strip_prefix("--config=") {
            config_path = Some(p.to_string());
            i += 1;
            continue;
        }
        if GLOBAL_VALUED.contains(&a) {
            i += 2;
            continue;
        }
        if !a.starts_with('-') && is_subcommand(a) {
            sub_pos = Some(i);
            break;
        }
        if !a.starts_with('-') {
            break;
        }
        i += 1;
    }
    let Some(path) = config_path else {
        return Ok((argv.to_vec(), None));
    };
    let cfg = RunConfig::load(Path::new(&path))?;

    let mut user: Vec<String> = Vec::new();
    let mut skip_next = false;
    for (k, a) in rest.iter().enumerate() {
        if skip_next {
            skip_next = false;
            continue;
        }
        if Some(k) == sub_pos {
            continue;
        }
        if a == "--config" {
            skip_next = true;
            continue;
        }
        if a.starts_with("--config=") {
            continue;
        }
        user.push(a.clone());
    }
    let sub = match (sub_pos, &cfg.command) {
        (Some(p), _) => rest[p].clone(),
        (None, Some(c)) => c.clone(),
        (None, None) => {
            return Err(ConfigError::Syntax {
                path,
                line: 0,
                message: "no subcommand on the command line and no `command` key".into(),
            })
        }
    };
    let mut out = vec![prog.clone(), sub];
    out.extend(cfg.to_args());
    out.extend(user);
    Ok((out, Some(cfg)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_comments_and_switches() {
        let cfg = RunConfig::parse(
            "# run\ncommand = sweep\nfrom = -32 # lower\nrenorm_dt = 0.5\nall = true\nquiet = false\n",
            "t",
        )
        .unwrap();
        assert_eq!(cfg.command.as_deref(), Some("sweep"));
        assert_eq!(cfg.to_args(), ["--from=-32", "--renorm-dt=0.5", "--all"]);
        assert_eq!(cfg.line_of("renorm-dt"), Some(4));
    }

    #[test]
    fn reports_line_numbers() {
        let e = RunConfig::parse("mu = 1\n\nbogus line\n", "run.cfg").unwrap_err();
        assert_eq!(e.to_string(), "run.cfg:3: expected `key = value`, found `bogus line`");
        let e = RunConfig::parse("mu = 1\nmu = 2\n", "run.cfg").unwrap_err();
        assert!(e.to_string().starts_with("run.cfg:2:"));
    }

    #[test]
    fn command_line_follows_file_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.cfg");
        std::fs::write(&path, "command = eigen\nmu = 3\n").unwrap();
        let argv: Vec<String> =
            ["polyrep", "--config", path.to_str().unwrap(), "--format", "json", "--mu", "4"].map(String::from).to_vec();
        let (args, _) = merge_args(&argv, |s| s == "eigen").unwrap();
        assert_eq!(args, ["polyrep", "eigen", "--mu=3", "--format", "json", "--mu", "4"]);
    }
}
