use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::angular::HalfInt;
use crate::constants::{inverse_cm_to_joule, joule_to_inverse_cm};
use crate::error::{Error, Result};

/// Largest level energy accepted, cm⁻¹.
pub const MAX_ENERGY_CM1: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    pub label: String,
    pub configuration: String,
    pub term: String,
    pub j: HalfInt,
    /// Level energy, J.
    energy: f64,
}

impl Level {
    pub fn from_cm1(label: &str, configuration: &str, term: &str, j: HalfInt, energy_cm1: f64) -> Result<Self> {
        if !energy_cm1.is_finite() || energy_cm1.abs() >= MAX_ENERGY_CM1 {
            return Err(Error::invalid(format!(
                "level `{label}`: energy {energy_cm1} cm^-1 outside the accepted range (|E| < 1e6 cm^-1)"
            )));
        }
        Self::from_joules(label, configuration, term, j, inverse_cm_to_joule(energy_cm1))
    }

    pub fn from_joules(label: &str, configuration: &str, term: &str, j: HalfInt, energy: f64) -> Result<Self> {
        if label.trim().is_empty() {
            return Err(Error::invalid("level label is empty"));
        }
        if j.twice() < 0 {
            return Err(Error::invalid(format!("level `{label}`: negative J")));
        }
        if !energy.is_finite() || joule_to_inverse_cm(energy).abs() >= MAX_ENERGY_CM1 {
            return Err(Error::invalid(format!("level `{label}`: energy {energy} J outside the accepted range")));
        }
        Ok(Self {
            label: label.trim().to_string(),
            configuration: configuration.trim().to_string(),
            term: term.trim().to_string(),
            j,
            energy,
        })
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn energy_cm1(&self) -> f64 {
        joule_to_inverse_cm(self.energy)
    }

    /// Degeneracy `2J + 1`.
    pub fn degeneracy(&self) -> usize {
        self.j.multiplicity()
    }

    /// `(L, S)` read from an LS term symbol such as `2S`, `2P*` or `3D`.
    pub fn orbital_and_spin(&self) -> Option<(HalfInt, HalfInt)> {
        let mut chars = self.term.trim().trim_end_matches(['*', 'o']).chars().peekable();
        let mut digits = String::new();
        while let Some(c) = chars.peek().filter(|c| c.is_ascii_digit()) {
            digits.push(*c);
            chars.next();
        }
        let multiplicity: i32 = digits.parse().ok().filter(|&m| m >= 1)?;
        let letter = chars.next()?;
        if chars.next().is_some() {
            return None;
        }
        let l = "SPDFGHIKLMN".find(letter.to_ascii_uppercase())? as i32;
        Some((HalfInt::from_int(l), HalfInt::from_twice(multiplicity - 1)))
    }

    fn shifted(&self, shift: f64) -> Self {
        Self { energy: self.energy + shift, ..self.clone() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LevelTable {
    levels: Vec<Level>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl LevelTable {
    pub fn new(levels: Vec<Level>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, level) in levels.iter().enumerate() {
            if index.insert(level.label.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate level label `{}`", level.label)));
            }
        }
        Ok(Self { levels, index })
    }

    pub fn get(&self, label: &str) -> Option<&Level> {
        self.index.get(label).map(|&i| &self.levels[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = &Level> {
        self.levels.iter()
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Same table with every energy moved by `shift` joules.
    pub fn shifted(&self, shift: f64) -> Result<Self> {
        Self::new(self.levels.iter().map(|l| l.shifted(shift)).collect())
    }
}

/// Electric-dipole line between two levels, strength in `e²a₀²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Line {
    pub upper: String,
    pub lower: String,
    pub strength: f64,
}

impl Line {
    pub fn new(upper: &str, lower: &str, strength: f64) -> Result<Self> {
        if !(strength >= 0.0) || !strength.is_finite() {
            return Err(Error::invalid(format!("line {upper}-{lower}: strength must be finite and >= 0, got {strength}")));
        }
        if upper.trim() == lower.trim() {
            return Err(Error::invalid(format!("line {upper}-{lower} connects a level to itself")));
        }
        Ok(Self { upper: upper.trim().to_string(), lower: lower.trim().to_string(), strength })
    }

    /// The other end of the line, if `label` is one end.
    pub fn partner(&self, label: &str) -> Option<&str> {
        if self.upper == label {
            Some(&self.lower)
        } else if self.lower == label {
            Some(&self.upper)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LineTable {
    lines: Vec<Line>,
}

impl LineTable {
    pub fn new(lines: Vec<Line>) -> Result<Self> {
        let mut seen = HashSet::new();
        for line in &lines {
            let key = if line.upper < line.lower {
                (line.upper.clone(), line.lower.clone())
            } else {
                (line.lower.clone(), line.upper.clone())
            };
            if !seen.insert(key) {
                return Err(Error::invalid(format!("duplicate line {}-{}", line.upper, line.lower)));
            }
        }
        Ok(Self { lines })
    }

    pub fn iter(&self) -> impl Iterator<Item = &Line> {
        self.lines.iter()
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes())
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    Error::Parse { line, message: e.to_string() }
}

fn check_header(text: &str, rdr: &mut csv::Reader<&[u8]>, expected: &[&str]) -> Result<bool> {
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Ok(false);
    }
    let got: Vec<&str> = header.iter().collect();
    if got != expected {
        let line = text
            .lines()
            .position(|l| !l.trim().is_empty() && !l.starts_with('#'))
            .map_or(1, |i| i as u64 + 1);
        return Err(Error::Parse { line, message: format!("expected header `{}`, got `{}`", expected.join(","), got.join(",")) });
    }
    Ok(true)
}

/// Parses `label,configuration,term,J,energy_cm1` rows; `#` starts a comment line.
pub fn parse_levels(text: &str) -> Result<LevelTable> {
    let mut rdr = reader(text);
    if !check_header(text, &mut rdr, &["label", "configuration", "term", "J", "energy_cm1"])? {
        return Ok(LevelTable::default());
    }
    let mut levels: Vec<Level> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let at = |e: Error| Error::Parse { line, message: e.to_string() };
        let j: HalfInt = record[3].parse().map_err(at)?;
        let energy: f64 = record[4]
            .parse()
            .map_err(|_| Error::Parse { line, message: format!("bad energy `{}`", &record[4]) })?;
        let level = Level::from_cm1(&record[0], &record[1], &record[2], j, energy).map_err(at)?;
        if levels.iter().any(|l| l.label == level.label) {
            return Err(Error::Parse { line, message: format!("duplicate level label `{}`", level.label) });
        }
        levels.push(level);
    }
    LevelTable::new(levels)
}

/// Parses `upper,lower,S_au` rows; `#` starts a comment line.
pub fn parse_lines(text: &str) -> Result<LineTable> {
    let mut rdr = reader(text);
    if !check_header(text, &mut rdr, &["upper", "lower", "S_au"])? {
        return Ok(LineTable::default());
    }
    let mut lines: Vec<Line> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let strength: f64 = record[2]
            .parse()
            .map_err(|_| Error::Parse { line, message: format!("bad line strength `{}`", &record[2]) })?;
        let entry = Line::new(&record[0], &record[1], strength).map_err(|e| Error::Parse { line, message: e.to_string() })?;
        if lines.iter().any(|l| l.partner(&entry.upper) == Some(entry.lower.as_str())) {
            return Err(Error::Parse { line, message: format!("duplicate line {}-{}", entry.upper, entry.lower) });
        }
        lines.push(entry);
    }
    LineTable::new(lines)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LEVELS: &str = "\
# test levels
label,configuration,term,J,energy_cm1
S,4s,2S,1/2,0
P1,4p,2P*,1/2,25191.51
P3,4p,2P*,3/2,25414.40
";

    #[test]
    fn parses_levels() {
        let t = parse_levels(LEVELS).unwrap();
        assert_eq!(t.len(), 3);
        let p = t.get("P3").unwrap();
        assert_eq!(p.j, HalfInt::from_twice(3));
        assert_eq!(p.degeneracy(), 4);
        assert!((p.energy_cm1() - 25414.40).abs() < 1e-9);
        assert_eq!(p.orbital_and_spin(), Some((HalfInt::from_int(1), HalfInt::HALF)));
    }

    #[test]
    fn rejects_bad_levels() {
        let bad_j = LEVELS.replace("P1,4p,2P*,1/2", "P1,4p,2P*,0.3");
        match parse_levels(&bad_j) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        let dup = LEVELS.replace("P3,", "P1,");
        assert!(matches!(parse_levels(&dup), Err(Error::Parse { line: 5, .. })));
        let huge = LEVELS.replace("25414.40", "2.5e6");
        assert!(parse_levels(&huge).is_err());
        let short = LEVELS.replace(",25191.51", "");
        assert!(matches!(parse_levels(&short), Err(Error::Parse { .. })));
        let header = LEVELS.replace("energy_cm1", "energy");
        assert!(matches!(parse_levels(&header), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn empty_tables_are_valid() {
        assert!(parse_levels("").unwrap().is_empty());
        assert!(parse_lines("# nothing\n").unwrap().is_empty());
        assert!(parse_lines("upper,lower,S_au\n").unwrap().is_empty());
    }

    #[test]
    fn parses_and_validates_lines() {
        let t = parse_lines("upper,lower,S_au\nP1,S,8.6\nP3,S,17.7\n").unwrap();
        assert_eq!(t.len(), 2);
        assert!(parse_lines("upper,lower,S_au\nP1,S,-1\n").is_err());
        assert!(matches!(parse_lines("upper,lower,S_au\nP1,S,1\nS,P1,2\n"), Err(Error::Parse { line: 3, .. })));
        assert!(parse_lines("upper,lower,S_au\nP1,P1,1\n").is_err());
    }

    #[test]
    fn term_symbols() {
        let lvl = |term: &str| Level::from_cm1("x", "", term, HalfInt::HALF, 0.0).unwrap().orbital_and_spin();
        assert_eq!(lvl("2D"), Some((HalfInt::from_int(2), HalfInt::HALF)));
        assert_eq!(lvl("3Po"), Some((HalfInt::from_int(1), HalfInt::ONE)));
        assert_eq!(lvl("?"), None);
        assert_eq!(lvl(""), None);
    }
}
