//! Plain-text game definitions.
//!
//! ```text
//! groups = [2, 2, 2]
//! payoff =
//!   0 0   0 -1   0 0
//!   ...
//! ```
//!
//! `payoff` is followed by one matrix row per line (entries separated by
//! whitespace or commas), or by all entries on the same line. `#` starts a
//! comment.

use std::path::Path;

use polyrep_core::game::PolymatrixGame;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GameFileError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Game(#[from] polyrep_core::Error),
}

fn syntax(line: usize, message: impl Into<String>) -> GameFileError {
    GameFileError::Syntax { line, message: message.into() }
}

fn numbers(text: &str, line: usize) -> Result<Vec<f64>, GameFileError> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| syntax(line, format!("`{t}` is not a number"))))
        .collect()
}

pub fn parse_game(text: &str) -> Result<PolymatrixGame, GameFileError> {
    let mut groups: Option<Vec<usize>> = None;
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut in_payoff = false;
    let mut payoff_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some((k, v)) = content.split_once('=') {
            in_payoff = false;
            match k.trim() {
                "groups" => {
                    if groups.is_some() {
                        return Err(syntax(line, "duplicate `groups`"));
                    }
                    let v = v.trim();
                    let inner = v
                        .strip_prefix('[')
                        .and_then(|s| s.strip_suffix(']'))
                        .ok_or_else(|| syntax(line, "expected `groups = [n1, ...]`"))?;
                    let sizes = inner
                        .split(',')
                        .map(str::trim)
                        .filter(|t| !t.is_empty())
                        .map(|t| t.parse::<usize>().map_err(|_| syntax(line, format!("bad group size `{t}`"))))
                        .collect::<Result<Vec<_>, _>>()?;
                    groups = Some(sizes);
                }
                "payoff" => {
                    if payoff_line != 0 {
                        return Err(syntax(line, "duplicate `payoff`"));
                    }
                    payoff_line = line;
                    in_payoff = true;
                    let first = numbers(v, line)?;
                    if !first.is_empty() {
                        rows.push((line, first));
                    }
                }
                other => return Err(syntax(line, format!("unknown key `{other}`"))),
            }
        } else if in_payoff {
            rows.push((line, numbers(content, line)?));
        } else {
            return Err(syntax(line, format!("unexpected `{content}`")));
        }
    }
    let groups = groups.ok_or_else(|| syntax(0, "missing `groups`"))?;
    if payoff_line == 0 {
        return Err(syntax(0, "missing `payoff`"));
    }
    let n: usize = groups.iter().sum();
    // a single line holding all entries is accepted as well
    let entries: Vec<f64> = if rows.len() == 1 && rows[0].1.len() == n * n {
        rows.remove(0).1
    } else {
        if rows.len() != n {
            return Err(syntax(payoff_line, format!("payoff has {} rows, groups need {n}", rows.len())));
        }
        for (line, r) in &rows {
            if r.len() != n {
                return Err(syntax(*line, format!("payoff row has {} entries, groups need {n}", r.len())));
            }
        }
        rows.into_iter().flat_map(|(_, r)| r).collect()
    };
    Ok(PolymatrixGame::new(groups, entries)?)
}

pub fn load_game(path: &Path) -> Result<PolymatrixGame, GameFileError> {
    parse_game(&std::fs::read_to_string(path)?)
}

/// Writes `game` in the format read by [`parse_game`].
pub fn format_game(game: &PolymatrixGame) -> String {
    let sizes: Vec<String> = game.group_sizes().iter().map(usize::to_string).collect();
    let mut out = format!("groups = [{}]\npayoff =\n", sizes.join(", "));
    for r in 0..game.dim() {
        let row: Vec<String> = game.row(r).iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use polyrep_core::game::family_matrix;

    #[test]
    fn round_trips_the_family_matrix() {
        let g = family_matrix(3.6);
        assert_eq!(parse_game(&format_game(&g)).unwrap(), g);
    }

    #[test]
    fn accepts_a_single_line_block() {
        let g = parse_game("groups = [1, 1]\npayoff = 1, 2, 3, 4\n").unwrap();
        assert_eq!(g.entry(1, 0), 3.0);
    }

    #[test]
    fn rejects_inconsistent_dimensions() {
        let e = parse_game("groups = [2, 1]\npayoff =\n1 2 3\n4 5 6\n").unwrap_err();
        assert!(e.to_string().contains("2 rows"), "{e}");
        let e = parse_game("groups = [2]\npayoff =\n1 2\n3\n").unwrap_err();
        assert!(e.to_string().starts_with("line 4:"), "{e}");
        assert!(parse_game("groups = [2]\n").is_err());
        assert!(parse_game("payoff = 1\n").is_err());
    }
}
