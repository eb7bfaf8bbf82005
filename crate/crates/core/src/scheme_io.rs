//! Text format for interpretation schemes.
//!
//! ```text
//! # comment
//! scheme pairs
//! signature              # base arities
//! target 2               # interpreted structure's arities
//! section dom
//! + 3 0 : - eq 0 1 ; - eq 0 2 ; - eq 1 2
//! - 0 0 :
//! section equiv
//! ...
//! section rel 0
//! ...
//! ```
//!
//! A condition line is a side (`+` or `-`), then the block shape (block
//! lengths joined by `,`, a trailing `+` for "at least"), the witness count,
//! `:`, and `;`-separated literals `(+|-) rel j p…` or `(+|-) eq p q`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::interp::{DeltaScheme, ExistentialCondition, InterpScheme, Relations};
use crate::serial::signature_fields;

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

#[derive(Default)]
struct Sides {
    pos: Vec<ExistentialCondition>,
    neg: Vec<ExistentialCondition>,
}

impl Sides {
    fn into_delta(self) -> DeltaScheme {
        DeltaScheme::lists(self.pos, self.neg)
    }
}

enum Section {
    Dom,
    Equiv,
    Rel(usize),
}

pub fn parse_scheme(text: &str) -> Result<InterpScheme> {
    let mut name = None;
    let mut base = None;
    let mut target = None;
    let mut dom = Sides::default();
    let mut equiv = Sides::default();
    let mut rels: Vec<Sides> = Vec::new();
    let mut section: Option<Section> = None;
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "scheme" => name = Some(toks[1..].join(" ")),
            "signature" => base = Some(signature_fields(&toks[1..]).map_err(|e| err(n, e.to_string()))?),
            "target" => {
                let t = signature_fields(&toks[1..]).map_err(|e| err(n, e.to_string()))?;
                rels = (0..t.relation_count().unwrap()).map(|_| Sides::default()).collect();
                target = Some(t);
            }
            "section" => {
                section = Some(match toks.get(1..) {
                    Some(["dom"]) => Section::Dom,
                    Some(["equiv"]) => Section::Equiv,
                    Some(["rel", j]) => {
                        let j: usize = j.parse().map_err(|_| err(n, format!("bad relation `{j}`")))?;
                        if j >= rels.len() {
                            return Err(err(n, format!("relation {j} not in target")));
                        }
                        Section::Rel(j)
                    }
                    _ => return Err(err(n, format!("unknown section `{line}`"))),
                })
            }
            "+" | "-" => {
                let cond: ExistentialCondition =
                    line[1..].trim().parse().map_err(|m: String| err(n, m))?;
                let sides = match &section {
                    None => return Err(err(n, "condition outside a section")),
                    Some(Section::Dom) => &mut dom,
                    Some(Section::Equiv) => &mut equiv,
                    Some(Section::Rel(j)) => &mut rels[*j],
                };
                if toks[0] == "+" {
                    sides.pos.push(cond);
                } else {
                    sides.neg.push(cond);
                }
            }
            other => return Err(err(n, format!("unexpected `{other}`"))),
        }
    }
    let name = name.ok_or_else(|| err(0, "missing `scheme` line"))?;
    let base = base.ok_or_else(|| err(0, "missing `signature` line"))?;
    let target = target.ok_or_else(|| err(0, "missing `target` line"))?;
    let s = InterpScheme::new(
        name,
        base,
        target,
        dom.into_delta(),
        equiv.into_delta(),
        Relations::List(rels.into_iter().map(Sides::into_delta).collect()),
    );
    s.validate().map_err(|e| err(0, e.to_string()))?;
    Ok(s)
}

fn write_sides(out: &mut String, d: &DeltaScheme) -> Result<()> {
    let (p, n) = d
        .as_lists()
        .ok_or_else(|| Error::Argument("generated schemes have no text form".into()))?;
    for c in p {
        writeln!(out, "+ {c}").unwrap();
    }
    for c in n {
        writeln!(out, "- {c}").unwrap();
    }
    Ok(())
}

fn arities(sig: &crate::model::Signature) -> Result<String> {
    let a = sig
        .finite_arities()
        .ok_or_else(|| Error::Argument("generated signatures have no text form".into()))?;
    Ok(a.iter().map(|x| format!(" {x}")).collect())
}

pub fn format_scheme(s: &InterpScheme) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "scheme {}", s.name).unwrap();
    writeln!(out, "signature{}", arities(&s.base)?).unwrap();
    writeln!(out, "target{}", arities(&s.target)?).unwrap();
    writeln!(out, "section dom").unwrap();
    write_sides(&mut out, &s.dom)?;
    writeln!(out, "section equiv").unwrap();
    write_sides(&mut out, &s.equiv)?;
    let Relations::List(rels) = &s.relations else {
        return Err(Error::Argument("generated schemes have no text form".into()));
    };
    for (j, r) in rels.iter().enumerate() {
        writeln!(out, "section rel {j}").unwrap();
        write_sides(&mut out, r)?;
    }
    Ok(out)
}

pub fn load_scheme(path: impl AsRef<Path>) -> Result<InterpScheme> {
    parse_scheme(&std::fs::read_to_string(path)?)
}

pub fn save_scheme(s: &InterpScheme, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_scheme(s)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{identity_scheme, pairs_scheme};
    use crate::model::Signature;

    #[test]
    fn round_trip_builtin_schemes() {
        for s in [
            identity_scheme(&Signature::empty()).unwrap(),
            identity_scheme(&Signature::finite(vec![2]).unwrap()).unwrap(),
            pairs_scheme(),
        ] {
            let text = format_scheme(&s).unwrap();
            let back = parse_scheme(&text).unwrap();
            assert_eq!(back, s);
            assert_ne!(back.id(), s.id());
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = std::env::temp_dir().join(format!("effint-scheme-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("identity.scheme");
        let s = identity_scheme(&Signature::empty()).unwrap();
        save_scheme(&s, &path).unwrap();
        assert_eq!(load_scheme(&path).unwrap(), s);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn parse_error_names_line() {
        let text = "scheme x\nsignature\ntarget\nsection dom\n+ 2 0 : + foo 1 2\n";
        match parse_scheme(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
        let text = "scheme x\nsignature\ntarget\n+ 2 0 :\n";
        assert!(matches!(parse_scheme(text), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn rejects_relation_outside_base() {
        let text = "scheme x\nsignature\ntarget\nsection dom\n+ 2 0 : + rel 0 0 1\n";
        assert!(parse_scheme(text).is_err());
    }
}
