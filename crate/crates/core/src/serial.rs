//! Line-oriented text records for signatures, diagram fragments and finite
//! maps.
//!
//! ```text
//! signature 2 1          # arities in relation order; `signature` alone is empty
//! fragment 2 2 0010      # length, arities joined by `,` (or `-`), bits (or `-`)
//! finmap 0:2 1:0 2:1     # pairs x:y
//! ```

use crate::error::{Error, Result};
use crate::model::{DiagramFragment, FinMap, Signature};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse {
        line: 1,
        msg: msg.into(),
    }
}

fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| parse_err(format!("bad number `{s}`")))
}

pub fn signature_to_line(sig: &Signature) -> Result<String> {
    let a = sig
        .finite_arities()
        .ok_or_else(|| Error::Argument("generated signatures have no text form".into()))?;
    let mut s = String::from("signature");
    for x in a {
        s.push_str(&format!(" {x}"));
    }
    Ok(s)
}

/// Parses the fields after a `signature` or `target` tag.
pub fn signature_fields(fields: &[&str]) -> Result<Signature> {
    let a = fields.iter().map(|f| num(f)).collect::<Result<Vec<usize>>>()?;
    Signature::finite(a).map_err(|e| parse_err(e.to_string()))
}

pub fn signature_from_line(line: &str) -> Result<Signature> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    match toks.split_first() {
        Some((&"signature", rest)) => signature_fields(rest),
        _ => Err(parse_err("expected `signature`")),
    }
}

pub fn fragment_to_line(d: &DiagramFragment) -> String {
    let ar = if d.arities().is_empty() {
        "-".to_string()
    } else {
        d.arities().iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")
    };
    let bits = if d.bits().is_empty() {
        "-".to_string()
    } else {
        d.bits().iter().map(|&b| if b { '1' } else { '0' }).collect()
    };
    format!("fragment {} {ar} {bits}", d.len())
}

pub fn fragment_from_line(line: &str) -> Result<DiagramFragment> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "fragment" {
        return Err(parse_err("expected `fragment <len> <arities> <bits>`"));
    }
    let len = num(toks[1])?;
    let arities = if toks[2] == "-" {
        Vec::new()
    } else {
        toks[2].split(',').map(num).collect::<Result<Vec<usize>>>()?
    };
    let bits = if toks[3] == "-" {
        Vec::new()
    } else {
        toks[3]
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(parse_err(format!("bad bit `{c}`"))),
            })
            .collect::<Result<Vec<bool>>>()?
    };
    DiagramFragment::from_bits(len, arities, bits).map_err(|e| parse_err(e.to_string()))
}

pub fn finmap_to_line(m: &FinMap) -> String {
    let mut s = String::from("finmap");
    for (x, y) in m.pairs() {
        s.push_str(&format!(" {x}:{y}"));
    }
    s
}

pub fn finmap_from_line(line: &str) -> Result<FinMap> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    match toks.split_first() {
        Some((&"finmap", rest)) => {
            let pairs = rest
                .iter()
                .map(|p| {
                    let (x, y) = p
                        .split_once(':')
                        .ok_or_else(|| parse_err(format!("bad pair `{p}`")))?;
                    Ok((num(x)?, num(y)?))
                })
                .collect::<Result<Vec<(u64, u64)>>>()?;
            FinMap::new(pairs).map_err(|e| parse_err(e.to_string()))
        }
        _ => Err(parse_err("expected `finmap`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{fragment_of, Presentation};

    #[test]
    fn records_round_trip() {
        let sig = Signature::finite(vec![2, 1]).unwrap();
        let line = signature_to_line(&sig).unwrap();
        assert_eq!(line, "signature 2 1");
        assert_eq!(signature_from_line(&line).unwrap(), sig);
        assert_eq!(signature_from_line("signature").unwrap(), Signature::empty());

        let d = fragment_of(&Presentation::order(), &[3, 1]).unwrap();
        let line = fragment_to_line(&d);
        assert_eq!(line, "fragment 2 2 0010");
        assert_eq!(fragment_from_line(&line).unwrap(), d);
        let e = fragment_of(&Presentation::pure_set(), &[3]).unwrap();
        assert_eq!(fragment_from_line(&fragment_to_line(&e)).unwrap(), e);

        let m = FinMap::new([(0, 2), (1, 0), (2, 1)]).unwrap();
        let line = finmap_to_line(&m);
        assert_eq!(line, "finmap 0:2 1:0 2:1");
        assert_eq!(finmap_from_line(&line).unwrap(), m);
    }

    #[test]
    fn malformed_records_fail() {
        assert!(fragment_from_line("fragment 2 2 001").is_err());
        assert!(fragment_from_line("fragment 2 2 00x0").is_err());
        assert!(finmap_from_line("finmap 0:1 1:1").is_err());
        assert!(signature_from_line("signature 0").is_err());
    }
}
