//! Motive definitions: line-oriented `key = value` text.
//!
//! ```text
//! # the first Carlitz twist over F_3
//! p = 3
//! name = A(1)
//! tau = [["(t-th)^-1"]]
//! class = ["(t-th)^-1"]
//! prec_u = 64
//! ```
//!
//! Keys: `p` (required), `e` (default 1), `name`, `tau` (required),
//! `class`, `model` (only `standard`), `prec_t`, `prec_u`, `prec_j`,
//! `degree_bound`. Blank lines and `#` comments are ignored.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field_tower::Fq;
use crate::motive::{TMotive, TauEntry, TauMatrix};

use super::literal::parse_literal_at;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MotiveConfig {
    pub p: u32,
    pub e: u32,
    pub name: String,
    pub tau: TauMatrix,
    pub class: Option<Vec<TauEntry>>,
    /// `model = standard` was given explicitly.
    pub explicit_model: bool,
    pub prec_t: Option<usize>,
    pub prec_u: Option<i64>,
    pub prec_j: Option<usize>,
    pub degree_bound: Option<u32>,
}

impl MotiveConfig {
    pub fn field(&self) -> Result<Fq> {
        Fq::new(self.p, self.e)
    }

    pub fn motive(&self) -> Result<TMotive> {
        TMotive::new(&self.field()?, &self.name, self.tau.clone())
    }
}

struct Entry {
    value: String,
    line: usize,
    /// 1-based column of the value's first character.
    col: usize,
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

/// String literals of a bracketed list `["a", "b"]`, with the 0-based
/// offset of each literal's content.
fn string_list(s: &str, from: usize) -> std::result::Result<(Vec<(String, usize)>, usize), (usize, String)> {
    let b = s.as_bytes();
    let mut i = from;
    let skip_ws = |i: &mut usize| {
        while *i < b.len() && b[*i].is_ascii_whitespace() {
            *i += 1;
        }
    };
    skip_ws(&mut i);
    if b.get(i) != Some(&b'[') {
        return Err((i, "expected '['".into()));
    }
    i += 1;
    let mut out = Vec::new();
    skip_ws(&mut i);
    if b.get(i) == Some(&b']') {
        return Ok((out, i + 1));
    }
    loop {
        skip_ws(&mut i);
        if b.get(i) != Some(&b'"') {
            return Err((i, "expected a quoted literal".into()));
        }
        let start = i + 1;
        let end = s[start..].find('"').map(|k| start + k).ok_or((i, "unterminated literal".to_string()))?;
        out.push((s[start..end].to_string(), start));
        i = end + 1;
        skip_ws(&mut i);
        match b.get(i) {
            Some(b',') => i += 1,
            Some(b']') => return Ok((out, i + 1)),
            _ => return Err((i, "expected ',' or ']'".into())),
        }
    }
}

fn nested_list(s: &str) -> std::result::Result<Vec<Vec<(String, usize)>>, (usize, String)> {
    let b = s.as_bytes();
    let mut i = 0;
    let skip_ws = |i: &mut usize| {
        while *i < b.len() && b[*i].is_ascii_whitespace() {
            *i += 1;
        }
    };
    skip_ws(&mut i);
    if b.get(i) != Some(&b'[') {
        return Err((i, "expected '['".into()));
    }
    i += 1;
    let mut rows = Vec::new();
    loop {
        let (row, next) = string_list(s, i)?;
        rows.push(row);
        i = next;
        skip_ws(&mut i);
        match b.get(i) {
            Some(b',') => i += 1,
            Some(b']') => {
                i += 1;
                break;
            }
            _ => return Err((i, "expected ',' or ']'".into())),
        }
    }
    skip_ws(&mut i);
    if i < b.len() {
        return Err((i, "trailing input".into()));
    }
    Ok(rows)
}

fn literals(f: &Fq, e: &Entry, items: Vec<(String, usize)>) -> Result<Vec<TauEntry>> {
    items
        .into_iter()
        .map(|(lit, off)| {
            parse_literal_at(f, &lit).map_err(|(k, msg)| perr(e.line, e.col + off + k, msg))
        })
        .collect()
}

fn number<T: std::str::FromStr>(e: &Entry, what: &str) -> Result<T> {
    e.value.trim().parse().map_err(|_| perr(e.line, e.col, format!("{what} must be a non-negative integer")))
}

pub fn parse_config(text: &str) -> Result<MotiveConfig> {
    const KEYS: [&str; 10] = ["p", "e", "name", "tau", "class", "model", "prec_t", "prec_u", "prec_j", "degree_bound"];
    let mut entries: BTreeMap<&str, Entry> = BTreeMap::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let Some(eq) = body.find('=') else {
            let col = body.len() - body.trim_start().len() + 1;
            return Err(perr(line, col, "expected `key = value`"));
        };
        let key = body[..eq].trim();
        let key_col = body.len() - body.trim_start().len() + 1;
        let Some(&key) = KEYS.iter().find(|k| **k == key) else {
            return Err(perr(line, key_col, format!("unknown key `{key}`")));
        };
        let rest = &body[eq + 1..];
        let lead = rest.len() - rest.trim_start().len();
        let entry = Entry { value: rest.trim().to_string(), line, col: eq + 2 + lead };
        if entries.insert(key, entry).is_some() {
            return Err(perr(line, key_col, format!("duplicate key `{key}`")));
        }
    }
    let need = |k: &str| entries.get(k).ok_or_else(|| perr(text.lines().count().max(1), 1, format!("missing key `{k}`")));
    let p: u32 = number(need("p")?, "p")?;
    let e: u32 = match entries.get("e") {
        Some(x) => number(x, "e")?,
        None => 1,
    };
    let f = Fq::new(p, e).map_err(|err| {
        let x = &entries["p"];
        perr(x.line, x.col, err.to_string())
    })?;
    let name = entries.get("name").map_or_else(|| "M".to_string(), |x| x.value.clone());
    let te = need("tau")?;
    let rows = nested_list(&te.value).map_err(|(k, msg)| perr(te.line, te.col + k, msg))?;
    let tau: TauMatrix = rows.into_iter().map(|r| literals(&f, te, r)).collect::<Result<_>>()?;
    let class = match entries.get("class") {
        Some(x) => {
            let (items, end) = string_list(&x.value, 0).map_err(|(k, msg)| perr(x.line, x.col + k, msg))?;
            if !x.value[end..].trim().is_empty() {
                return Err(perr(x.line, x.col + end, "trailing input"));
            }
            Some(literals(&f, x, items)?)
        }
        None => None,
    };
    let explicit_model = match entries.get("model") {
        Some(x) if x.value == "standard" => true,
        Some(x) => return Err(Error::UnsupportedShape(format!("integral model `{}`: only `standard` is supported", x.value))),
        None => false,
    };
    let opt = |k: &str| entries.get(k);
    let cfg = MotiveConfig {
        p,
        e,
        name,
        tau,
        class,
        explicit_model,
        prec_t: opt("prec_t").map(|x| number(x, "prec_t")).transpose()?,
        prec_u: opt("prec_u").map(|x| number(x, "prec_u")).transpose()?,
        prec_j: opt("prec_j").map(|x| number(x, "prec_j")).transpose()?,
        degree_bound: opt("degree_bound").map(|x| number(x, "degree_bound")).transpose()?,
    };
    let m = cfg.motive()?;
    if let Some(c) = &cfg.class {
        if c.len() != m.rank() {
            let x = &entries["class"];
            return Err(perr(x.line, x.col, format!("class has {} entries, rank is {}", c.len(), m.rank())));
        }
    }
    Ok(cfg)
}

fn quoted(v: &[TauEntry]) -> String {
    let parts: Vec<String> = v.iter().map(|e| format!("\"{}\"", e.show())).collect();
    format!("[{}]", parts.join(", "))
}

/// Canonical text; `parse_config(&print_config(c)) == c`.
pub fn print_config(c: &MotiveConfig) -> String {
    let mut out = format!("p = {}\ne = {}\nname = {}\n", c.p, c.e, c.name);
    let rows: Vec<String> = c.tau.iter().map(|r| quoted(r)).collect();
    out += &format!("tau = [{}]\n", rows.join(", "));
    if let Some(cl) = &c.class {
        out += &format!("class = {}\n", quoted(cl));
    }
    if c.explicit_model {
        out += "model = standard\n";
    }
    if let Some(x) = c.prec_t {
        out += &format!("prec_t = {x}\n");
    }
    if let Some(x) = c.prec_u {
        out += &format!("prec_u = {x}\n");
    }
    if let Some(x) = c.prec_j {
        out += &format!("prec_j = {x}\n");
    }
    if let Some(x) = c.degree_bound {
        out += &format!("degree_bound = {x}\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly2;

    #[test]
    fn twist_and_unit() {
        let c = parse_config("p = 3\ntau = [[\"(t-th)^-1\"]]\n").unwrap();
        assert_eq!(c.motive().unwrap().tau, TMotive::carlitz_twist(&c.field().unwrap(), 1).tau);
        let u = parse_config("p = 3\ntau = [[\"1\"]]").unwrap();
        assert_eq!(u.motive().unwrap().tau, TMotive::unit(&u.field().unwrap()).tau);
    }

    #[test]
    fn extension_middle_shape() {
        let c = parse_config("p = 3\ntau = [[\"(t-th)^-1\", \"th\"], [\"0\", \"1\"]]").unwrap();
        let f = c.field().unwrap();
        let m = TMotive::carlitz_twist(&f, 1);
        let want = m.extension_middle(&[TauEntry::from_poly(Poly2::theta(&f))]).unwrap();
        assert_eq!(c.motive().unwrap().tau, want.tau);
    }

    #[test]
    fn round_trip() {
        let text = "p = 5\ne = 1\nname = X\ntau = [[\"(t-th)^-2\", \"t + th^2\"], [\"0\", \"1\"]]\nclass = [\"(t-th)^-1\", \"0\"]\nprec_u = 48\ndegree_bound = 3\n";
        let c = parse_config(text).unwrap();
        assert_eq!(print_config(&c), text);
        assert_eq!(parse_config(&print_config(&c)).unwrap(), c);
    }

    #[test]
    fn errors_point_at_the_literal() {
        match parse_config("p = 3\ntau = [[\"t^-1\"]]") {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 11)),
            e => panic!("{e:?}"),
        }
        assert!(matches!(parse_config("p = 4\ntau = [[\"1\"]]"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_config("p = 3\ntau = [[\"t\"]]"), Err(Error::InvalidTau(_))));
        assert!(matches!(parse_config("p = 3\nfoo = 1"), Err(Error::Parse { line: 2, col: 1, .. })));
    }
}
