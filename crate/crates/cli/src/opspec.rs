//! Mini expression grammar for operator specifications.
//!
//! Sums of scaled products over the tokens `𝟙`/`E` (identity), `Ikx`,
//! `Iky`, `Ikz`, `Ika` (alpha projector) and `Ikb` (beta projector), where
//! `k` is the 1-based spin slot: `"0.5*I2a + I1x*I2a"`. Scalars may carry
//! the imaginary unit `i`, so non-hermitian operators like `"I1x - i*I1y"`
//! are expressible. Parse errors carry the byte position of the offending
//! token.

use moyal_spin_core::angular::HalfInt;
use moyal_spin_core::spinop::{cartesian_op, Axis, SpinOperator};
use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("position {pos}: unexpected character '{ch}'")]
    UnexpectedChar { pos: usize, ch: char },
    #[error("position {pos}: expected {expected}")]
    Expected { pos: usize, expected: String },
    #[error("position {pos}: bad number '{text}'")]
    BadNumber { pos: usize, text: String },
    #[error("position {pos}: spin slot {slot} exceeds system size {n_spins}")]
    SlotRange {
        pos: usize,
        slot: usize,
        n_spins: usize,
    },
    #[error("position {pos}: spin slot {slot} appears twice in one product")]
    DuplicateSlot { pos: usize, slot: usize },
    #[error("empty expression")]
    Empty,
}

#[derive(Debug, PartialEq)]
enum Token {
    Number(f64),
    Imaginary,
    Identity,
    Spin { slot: usize, axis: Axis },
    Star,
    Plus,
    Minus,
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { text, pos: 0 }
    }

    fn peek_char(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn next_token(&mut self) -> Result<Option<(usize, Token)>, ParseError> {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        let start = self.pos;
        let Some(c) = self.peek_char() else {
            return Ok(None);
        };
        match c {
            '*' => {
                self.pos += 1;
                Ok(Some((start, Token::Star)))
            }
            '+' => {
                self.pos += 1;
                Ok(Some((start, Token::Plus)))
            }
            '-' => {
                self.pos += 1;
                Ok(Some((start, Token::Minus)))
            }
            '𝟙' | 'E' => {
                self.pos += c.len_utf8();
                Ok(Some((start, Token::Identity)))
            }
            'i' => {
                self.pos += 1;
                Ok(Some((start, Token::Imaginary)))
            }
            'I' => {
                self.pos += 1;
                let digits_start = self.pos;
                while self.peek_char().is_some_and(|d| d.is_ascii_digit()) {
                    self.pos += 1;
                }
                if digits_start == self.pos {
                    return Err(ParseError::Expected {
                        pos: self.pos,
                        expected: "spin slot digits after 'I'".into(),
                    });
                }
                let slot: usize = self.text[digits_start..self.pos].parse().map_err(|_| {
                    ParseError::BadNumber {
                        pos: digits_start,
                        text: self.text[digits_start..self.pos].into(),
                    }
                })?;
                let axis_pos = self.pos;
                let axis_char = self.peek_char().ok_or_else(|| ParseError::Expected {
                    pos: axis_pos,
                    expected: "axis letter x/y/z/a/b".into(),
                })?;
                let axis = Axis::parse(axis_char).ok_or(ParseError::UnexpectedChar {
                    pos: axis_pos,
                    ch: axis_char,
                })?;
                self.pos += axis_char.len_utf8();
                Ok(Some((start, Token::Spin { slot, axis })))
            }
            d if d.is_ascii_digit() || d == '.' => {
                while self
                    .peek_char()
                    .is_some_and(|x| x.is_ascii_digit() || x == '.' || x == 'e' || x == 'E')
                {
                    self.pos += 1;
                    // Exponent sign.
                    if self.text[..self.pos].ends_with(['e', 'E'])
                        && self.peek_char().is_some_and(|x| x == '+' || x == '-')
                    {
                        self.pos += 1;
                    }
                }
                let text = &self.text[start..self.pos];
                let value: f64 = text.parse().map_err(|_| ParseError::BadNumber {
                    pos: start,
                    text: text.into(),
                })?;
                Ok(Some((start, Token::Number(value))))
            }
            other => Err(ParseError::UnexpectedChar {
                pos: start,
                ch: other,
            }),
        }
    }
}

/// Parses an operator expression into a dense spin-1/2 operator on
/// `n_spins` spins.
pub fn parse_operator(text: &str, n_spins: usize) -> Result<SpinOperator, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut tokens = Vec::new();
    while let Some(t) = lexer.next_token()? {
        tokens.push(t);
    }
    if tokens.is_empty() {
        return Err(ParseError::Empty);
    }

    let mut result = SpinOperator::zeros(n_spins, HalfInt::HALF);
    let mut i = 0;
    loop {
        // Optional leading sign for each summand.
        let mut sign = 1.0;
        while i < tokens.len() {
            match tokens[i].1 {
                Token::Plus => i += 1,
                Token::Minus => {
                    sign = -sign;
                    i += 1;
                }
                _ => break,
            }
        }
        if i >= tokens.len() {
            return Err(ParseError::Expected {
                pos: text.len(),
                expected: "a term after the sign".into(),
            });
        }

        // One product term: factors separated by '*'.
        let mut scalar = C64::new(sign, 0.0);
        let mut slots: Vec<(usize, Axis)> = Vec::new();
        loop {
            let (pos, token) = &tokens[i];
            match token {
                Token::Number(v) => scalar *= v,
                Token::Imaginary => scalar *= C64::new(0.0, 1.0),
                Token::Identity => {}
                Token::Spin { slot, axis } => {
                    if *slot == 0 || *slot > n_spins {
                        return Err(ParseError::SlotRange {
                            pos: *pos,
                            slot: *slot,
                            n_spins,
                        });
                    }
                    if slots.iter().any(|(s, _)| s == slot) {
                        return Err(ParseError::DuplicateSlot {
                            pos: *pos,
                            slot: *slot,
                        });
                    }
                    slots.push((*slot, *axis));
                }
                Token::Star | Token::Plus | Token::Minus => {
                    return Err(ParseError::Expected {
                        pos: *pos,
                        expected: "a factor".into(),
                    });
                }
            }
            i += 1;
            if i < tokens.len() && tokens[i].1 == Token::Star {
                i += 1;
                if i >= tokens.len() {
                    return Err(ParseError::Expected {
                        pos: text.len(),
                        expected: "a factor after '*'".into(),
                    });
                }
                continue;
            }
            break;
        }

        let term = cartesian_op(n_spins, &slots)
            .expect("slot validity checked during parsing")
            .scale(scalar);
        result = result.add(&term).expect("fixed shape");

        if i >= tokens.len() {
            break;
        }
        match tokens[i].1 {
            Token::Plus | Token::Minus => continue,
            _ => {
                return Err(ParseError::Expected {
                    pos: tokens[i].0,
                    expected: "'+' or '-' between terms".into(),
                })
            }
        }
    }
    Ok(result)
}

/// Largest spin slot referenced by an expression, for consistency checks.
pub fn max_slot(text: &str) -> Result<usize, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut max = 0;
    while let Some((_, token)) = lexer.next_token()? {
        if let Token::Spin { slot, .. } = token {
            max = max.max(slot);
        }
    }
    Ok(max)
}
