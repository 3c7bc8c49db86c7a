//! Linear-combination syntax: `2*x*y^2 - 1/3*y + 1`, and `x⊗y - 1⊗1` (or `x (x) y`) for
//! elements of a tensor product of two algebras.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Algebra, Element, Monomial};
use crate::kernel::Scalar;
use crate::lin::Lin;
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Tensor,
}

fn err(col: usize, message: impl Into<String>) -> Error {
    Error::Parse { line: 1, column: col, message: message.into() }
}

fn lex(s: &str) -> Result<Vec<(Tok, usize)>, Error> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push((Tok::Num(text.parse().unwrap()), col));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Name(chars[start..i].iter().collect()), col));
            continue;
        }
        if c == '(' && chars.get(i + 1) == Some(&'x') && chars.get(i + 2) == Some(&')') {
            out.push((Tok::Tensor, col));
            i += 3;
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' | '−' => Tok::Minus,
            '*' | '·' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '⊗' | '@' => Tok::Tensor,
            _ => return Err(err(col, format!("unexpected character '{c}'"))),
        };
        out.push((tok, col));
        i += 1;
    }
    Ok(out)
}

/// One parsed summand: coefficient and one word per tensor factor.
struct Term {
    coeff: BigRational,
    words: Vec<Vec<(String, u32, usize)>>,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }
    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end_col)
    }
    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn number(&mut self) -> Result<BigRational, Error> {
        let col = self.col();
        let Some(Tok::Num(n)) = self.bump() else { return Err(err(col, "expected a number")) };
        if self.peek() == Some(&Tok::Slash) {
            self.bump();
            let col = self.col();
            let Some(Tok::Num(d)) = self.bump() else { return Err(err(col, "expected a denominator")) };
            if d == BigInt::from(0) {
                return Err(err(col, "zero denominator"));
            }
            return Ok(BigRational::new(n, d));
        }
        Ok(BigRational::from_integer(n))
    }

    /// A product of factors separated by `*`; numbers multiply the coefficient.
    fn product(&mut self, coeff: &mut BigRational) -> Result<Vec<(String, u32, usize)>, Error> {
        let mut word = Vec::new();
        loop {
            let col = self.col();
            match self.peek() {
                Some(Tok::Num(_)) => *coeff *= self.number()?,
                Some(Tok::Name(_)) => {
                    let Some(Tok::Name(name)) = self.bump() else { unreachable!() };
                    let mut exp = 1u32;
                    if self.peek() == Some(&Tok::Caret) {
                        self.bump();
                        let c2 = self.col();
                        match self.bump() {
                            Some(Tok::Num(e)) => {
                                exp = e.try_into().map_err(|_| err(c2, "exponent too large"))?;
                            }
                            _ => return Err(err(c2, "expected an exponent")),
                        }
                    }
                    word.push((name, exp, col));
                }
                _ => return Err(err(col, "expected a generator or a number")),
            }
            if self.peek() == Some(&Tok::Star) {
                self.bump();
            } else if matches!(self.peek(), Some(Tok::Name(_) | Tok::Num(_))) {
                // juxtaposition `2 x`, `x y`, `2 1⊗y`
            } else {
                return Ok(word);
            }
        }
    }

    fn terms(&mut self, factors: usize) -> Result<Vec<Term>, Error> {
        let mut out = Vec::new();
        let mut sign = BigRational::from_integer(BigInt::from(1));
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            sign = -sign;
        } else if self.peek() == Some(&Tok::Plus) {
            self.bump();
        }
        loop {
            let mut coeff = sign.clone();
            let mut words = vec![self.product(&mut coeff)?];
            while self.peek() == Some(&Tok::Tensor) {
                self.bump();
                words.push(self.product(&mut coeff)?);
            }
            if words.len() != factors {
                return Err(err(self.col(), format!("expected {factors} tensor factor(s) per term, found {}", words.len())));
            }
            out.push(Term { coeff, words });
            match self.bump() {
                None => return Ok(out),
                Some(Tok::Plus) => sign = BigRational::from_integer(BigInt::from(1)),
                Some(Tok::Minus) => sign = BigRational::from_integer(BigInt::from(-1)),
                Some(_) => return Err(err(self.toks[self.pos - 1].1, "expected '+' or '-'")),
            }
        }
    }
}

fn parse_terms(s: &str, factors: usize) -> Result<Vec<Term>, Error> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(err(1, "empty expression"));
    }
    let mut p = Parser { toks, pos: 0, end_col: s.chars().count() + 1 };
    p.terms(factors)
}

fn word_element(alg: &Algebra, word: &[(String, u32, usize)]) -> Result<Element, Error> {
    let mut gens = Vec::new();
    for (name, exp, col) in word {
        if name == "1" {
            continue;
        }
        let g = alg
            .generator_index(name)
            .ok_or_else(|| Error::UnknownGenerator(format!("'{name}' at column {col} is not a generator of {}", alg.name())))?;
        gens.extend(std::iter::repeat_n(g, *exp as usize));
    }
    alg.normalize(&gens)
}

fn scalar(alg: &Algebra, q: &BigRational) -> Result<Scalar, Error> {
    alg.field().from_rational(q)
}

/// Parses a linear combination of words in the generators of `alg`.
pub fn parse_element(alg: &Algebra, s: &str) -> Result<Element, Error> {
    let mut out = Lin::zero(alg.field());
    for t in parse_terms(s, 1)? {
        let c = scalar(alg, &t.coeff)?;
        out.add_scaled(&word_element(alg, &t.words[0])?, &c);
    }
    Ok(out)
}

/// Parses an element of `left ⊗ right`, e.g. `x⊗y - 1⊗1`.
pub fn parse_tensor(left: &Algebra, right: &Algebra, s: &str) -> Result<Lin<(Monomial, Monomial)>, Error> {
    let mut out = Lin::zero(left.field());
    for t in parse_terms(s, 2)? {
        let c = scalar(left, &t.coeff)?;
        let l = word_element(left, &t.words[0])?;
        let r = word_element(right, &t.words[1])?;
        for (lm, lc) in l.iter() {
            for (rm, rc) in r.iter() {
                out.add_term((lm.clone(), rm.clone()), &(&(&c * lc) * rc));
            }
        }
    }
    Ok(out)
}
