//! Linear D-notation: prefix `D`, single-digit axiom ids, `n`, and
//! bracketed multi-digit ids such as `[12]`. Example: `DD26n`.

use thiserror::Error;

use super::{AxiomId, DTerm};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DNotationError {
    #[error("premature end of D-term at position {pos}")]
    PrematureEnd { pos: usize },
    #[error("trailing input at position {pos}")]
    Trailing { pos: usize },
    #[error("unknown token `{token}` at position {pos}")]
    UnknownToken { token: char, pos: usize },
    #[error("unresolved reference {id} at position {pos}")]
    UnknownReference { id: u32, pos: usize },
}

/// Parses D-notation, reading every number as an axiom id.
pub fn parse_dnotation(text: &str) -> Result<DTerm, DNotationError> {
    parse_dnotation_with(text, &mut |id| Some(DTerm::Axiom(AxiomId(id))))
}

/// Parses D-notation, resolving each number through `resolve` (for step
/// references in Meredith proofs).
pub fn parse_dnotation_with(
    text: &str,
    resolve: &mut dyn FnMut(u32) -> Option<DTerm>,
) -> Result<DTerm, DNotationError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    // Each open D collects up to two children.
    let mut open: Vec<Vec<DTerm>> = Vec::new();
    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos >= bytes.len() {
            return Err(DNotationError::PrematureEnd { pos });
        }
        let start = pos;
        let mut done = match bytes[pos] {
            b'D' => {
                pos += 1;
                open.push(Vec::with_capacity(2));
                continue;
            }
            b'n' => {
                pos += 1;
                DTerm::N
            }
            c if c.is_ascii_digit() => {
                pos += 1;
                let id = (c - b'0') as u32;
                resolve(id).ok_or(DNotationError::UnknownReference { id, pos: start })?
            }
            b'[' => {
                let close = text[pos..]
                    .find(']')
                    .map(|i| pos + i)
                    .ok_or(DNotationError::PrematureEnd { pos: bytes.len() })?;
                let id: u32 = text[pos + 1..close]
                    .parse()
                    .map_err(|_| DNotationError::UnknownToken { token: '[', pos })?;
                pos = close + 1;
                resolve(id).ok_or(DNotationError::UnknownReference { id, pos: start })?
            }
            _ => {
                let token = text[pos..].chars().next().unwrap_or('?');
                return Err(DNotationError::UnknownToken { token, pos });
            }
        };
        loop {
            match open.last_mut() {
                None => {
                    while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                        pos += 1;
                    }
                    if pos < bytes.len() {
                        return Err(DNotationError::Trailing { pos });
                    }
                    return Ok(done);
                }
                Some(children) => {
                    children.push(done);
                    if children.len() < 2 {
                        break;
                    }
                    let mut children = open.pop().expect("nonempty");
                    let minor = children.pop().expect("two children");
                    let major = children.pop().expect("two children");
                    done = DTerm::d(major, minor);
                }
            }
        }
    }
}

pub fn print_dnotation(d: &DTerm) -> String {
    let mut out = String::new();
    let mut stack = vec![d];
    while let Some(t) = stack.pop() {
        match t {
            DTerm::Axiom(AxiomId(id)) if *id < 10 => out.push(char::from(b'0' + *id as u8)),
            DTerm::Axiom(AxiomId(id)) => out.push_str(&format!("[{id}]")),
            DTerm::N => out.push('n'),
            DTerm::D(a, b) => {
                out.push('D');
                stack.push(b);
                stack.push(a);
            }
        }
    }
    out
}
