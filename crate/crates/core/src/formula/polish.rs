//! Łukasiewicz-style prefix notation: `CpCqp` for p⇒(q⇒p).
//!
//! Uppercase letters are function symbols looked up in a [`SymbolTable`],
//! lowercase letters are variables. The variable with index `i` is written
//! as the `i mod 26`-th letter of `pqrstuvwxyzabcdefghijklmno`, followed by
//! `i / 26` when that is nonzero.

use thiserror::Error;

use super::{Formula, Sym, SymbolTable, Var};

const VAR_LETTERS: &[u8; 26] = b"pqrstuvwxyzabcdefghijklmno";

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PolishError {
    #[error("premature end of input at position {pos}")]
    PrematureEnd { pos: usize },
    #[error("trailing input at position {pos}")]
    Trailing { pos: usize },
    #[error("unknown letter `{letter}` at position {pos}")]
    UnknownLetter { letter: char, pos: usize },
    #[error("bad variable suffix at position {pos}")]
    BadSuffix { pos: usize },
}

pub fn var_name(v: Var) -> String {
    let letter = VAR_LETTERS[(v.0 % 26) as usize] as char;
    match v.0 / 26 {
        0 => letter.to_string(),
        n => format!("{letter}{n}"),
    }
}

fn var_index(letter: u8) -> u32 {
    VAR_LETTERS.iter().position(|&c| c == letter).expect("lowercase ascii letter") as u32
}

struct Pending {
    sym: Sym,
    arity: usize,
    args: Vec<Formula>,
}

pub fn parse_polish(text: &str, symbols: &SymbolTable) -> Result<Formula, PolishError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut stack: Vec<Pending> = Vec::new();
    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos >= bytes.len() {
            return Err(PolishError::PrematureEnd { pos });
        }
        let start = pos;
        let c = bytes[pos];
        pos += 1;
        let mut done = if c.is_ascii_lowercase() {
            let digits_start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let suffix = &text[digits_start..pos];
            let block = if suffix.is_empty() {
                0
            } else if suffix.starts_with('0') {
                return Err(PolishError::BadSuffix { pos: digits_start });
            } else {
                suffix.parse::<u32>().map_err(|_| PolishError::BadSuffix { pos: digits_start })?
            };
            Formula::Var(Var(var_index(c) + 26 * block))
        } else {
            let letter = text[start..].chars().next().unwrap_or('?');
            let sym = symbols
                .by_letter(letter)
                .filter(|_| c.is_ascii_uppercase())
                .ok_or(PolishError::UnknownLetter { letter, pos: start })?;
            let arity = symbols.arity(sym);
            if arity > 0 {
                stack.push(Pending { sym, arity, args: Vec::with_capacity(arity) });
                continue;
            }
            Formula::constant(sym)
        };
        // Fold completed subterms into their parents.
        loop {
            match stack.last_mut() {
                None => {
                    while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                        pos += 1;
                    }
                    if pos < bytes.len() {
                        return Err(PolishError::Trailing { pos });
                    }
                    return Ok(done);
                }
                Some(top) => {
                    top.args.push(done);
                    if top.args.len() < top.arity {
                        break;
                    }
                    let top = stack.pop().expect("nonempty");
                    done = Formula::app(top.sym, top.args);
                }
            }
        }
    }
}

/// Parses a goal: every variable letter becomes a constant of the same name,
/// interned into `symbols`.
pub fn parse_goal(text: &str, symbols: &mut SymbolTable) -> Result<Formula, PolishError> {
    let f = parse_polish(text, symbols)?;
    Ok(f.ground_with(&mut |v| {
        symbols.intern(&var_name(v), 0).expect("constant names never clash with symbol arities")
    }))
}

pub fn print_polish(f: &Formula, symbols: &SymbolTable) -> String {
    let mut out = String::new();
    let mut stack = vec![f];
    while let Some(t) = stack.pop() {
        match t {
            Formula::Var(v) => out.push_str(&var_name(*v)),
            Formula::App(s, args) => {
                let info = symbols.info(*s);
                match info.letter {
                    Some(c) => out.push(c),
                    None if args.is_empty() => out.push_str(&info.name),
                    None => {
                        out.push('{');
                        out.push_str(&info.name);
                        out.push('}');
                    }
                }
                stack.extend(args.iter().rev());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t() -> SymbolTable {
        SymbolTable::standard()
    }

    #[test]
    fn simp_axiom() {
        let f = parse_polish("CpCqp", &t()).unwrap();
        let expected = Formula::imp(Formula::var(0), Formula::imp(Formula::var(1), Formula::var(0)));
        assert_eq!(f, expected);
    }

    #[test]
    fn lukasiewicz_axiom() {
        let f = parse_polish("CCCpqrCCrpCsp", &t()).unwrap();
        let (p, q, r, s) = (Formula::var(0), Formula::var(1), Formula::var(2), Formula::var(3));
        let expected = Formula::imp(
            Formula::imp(Formula::imp(p.clone(), q), r.clone()),
            Formula::imp(Formula::imp(r, p.clone()), Formula::imp(s, p)),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse_polish("Cp", &t()), Err(PolishError::PrematureEnd { pos: 2 }));
        assert_eq!(parse_polish("", &t()), Err(PolishError::PrematureEnd { pos: 0 }));
        assert_eq!(parse_polish("Cpqr", &t()), Err(PolishError::Trailing { pos: 3 }));
        assert_eq!(
            parse_polish("CpXq", &t()),
            Err(PolishError::UnknownLetter { letter: 'X', pos: 2 })
        );
        assert_eq!(parse_polish("p0", &t()), Err(PolishError::BadSuffix { pos: 1 }));
    }

    #[test]
    fn many_variables() {
        let f = Formula::imp(Formula::var(27), Formula::var(3));
        let s = print_polish(&f, &t());
        assert_eq!(s, "Cq1s");
        assert_eq!(parse_polish(&s, &t()).unwrap(), f);
    }

    #[test]
    fn goals_are_ground() {
        let mut table = t();
        let g = parse_goal("CaCba", &mut table).unwrap();
        assert!(g.is_ground());
        assert_eq!(print_polish(&g, &table), "CaCba");
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = (0u32..60).prop_map(Formula::var);
        leaf.prop_recursive(6, 40, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
                inner.prop_map(|a| Formula::app(Sym::NOT, vec![a])),
            ]
        })
    }

    proptest! {
        #[test]
        fn round_trip(f in arb_formula()) {
            let text = print_polish(&f, &t());
            let back = parse_polish(&text, &t()).unwrap();
            prop_assert_eq!(&back, &f);
            prop_assert_eq!(print_polish(&back, &t()), text);
        }
    }
}
