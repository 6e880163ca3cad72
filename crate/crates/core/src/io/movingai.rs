//! Reader for MovingAI benchmark `.map` files (octile format).
//!
//! ```text
//! type octile
//! height 3
//! width 4
//! map
//! ..@.
//! .T..
//! ....
//! ```
//!
//! Row 0 of the map body becomes cell row `y = 0`.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Cell;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MovingAiMap {
    pub width: u32,
    pub height: u32,
    blocked: Vec<bool>,
}

impl MovingAiMap {
    pub fn is_blocked(&self, c: Cell) -> bool {
        self.blocked[(c.y as u32 * self.width + c.x as u32) as usize]
    }

    pub fn blocked_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let w = self.width as i32;
        self.blocked
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| Cell::new(i as i32 % w, i as i32 / w))
    }
}

pub fn read_map(path: &Path) -> Result<MovingAiMap> {
    let text = fs::read_to_string(path)?;
    parse_map(&text)
}

pub fn parse_map(text: &str) -> Result<MovingAiMap> {
    let mut lines = text.lines();
    let mut width = None;
    let mut height = None;
    for line in lines.by_ref() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == "map" {
            break;
        }
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next()) {
            (Some("type"), _) => {}
            (Some("height"), Some(h)) => height = Some(parse_dim("height", h)?),
            (Some("width"), Some(w)) => width = Some(parse_dim("width", w)?),
            _ => return Err(Error::MapFormat(format!("unexpected header line `{line}`"))),
        }
    }
    let width = width.ok_or_else(|| Error::MapFormat("missing width".into()))?;
    let height = height.ok_or_else(|| Error::MapFormat("missing height".into()))?;

    let mut blocked = Vec::with_capacity((width * height) as usize);
    let rows: Vec<&str> = lines.map(str::trim_end).filter(|l| !l.is_empty()).collect();
    if rows.len() != height as usize {
        return Err(Error::MapFormat(format!(
            "expected {height} rows, found {}",
            rows.len()
        )));
    }
    for (r, row) in rows.iter().enumerate() {
        if row.chars().count() != width as usize {
            return Err(Error::MapFormat(format!("row {r} is not {width} wide")));
        }
        blocked.extend(row.chars().map(|ch| !matches!(ch, '.' | 'G' | 'S')));
    }
    Ok(MovingAiMap {
        width,
        height,
        blocked,
    })
}

fn parse_dim(name: &str, s: &str) -> Result<u32> {
    match s.parse::<u32>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Error::MapFormat(format!("bad {name} `{s}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_octile_map() {
        let m = parse_map("type octile\nheight 2\nwidth 3\nmap\n.@.\nT..\n").unwrap();
        assert_eq!((m.width, m.height), (3, 2));
        let cells: Vec<_> = m.blocked_cells().collect();
        assert_eq!(cells, vec![Cell::new(1, 0), Cell::new(0, 1)]);
    }

    #[test]
    fn rejects_short_rows() {
        assert!(parse_map("type octile\nheight 2\nwidth 3\nmap\n...\n..\n").is_err());
        assert!(parse_map("type octile\nwidth 3\nmap\n...\n").is_err());
    }
}
