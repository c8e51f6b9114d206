//! Text form of polynomials: `3/2 x1^2 x3 - x2`, `0.25*x1*x2 + 1`.
//!
//! ```text
//! poly   := sign? term (sign term)*
//! term   := coeff factor* | factor+
//! coeff  := digits ('/' digits | '.' digits)?
//! factor := '*'? 'x' digits ('^' digits)?
//! ```

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Monomial, MultiPoly, DEGREE_CAP};
use crate::error::{Error, Result};
use crate::scalar::Rational;

/// Parse a polynomial in `nvars` variables named `x1..x{nvars}`.
pub fn parse_poly(src: &str, nvars: usize) -> Result<MultiPoly> {
    let mut p = Parser {
        s: src.as_bytes(),
        pos: 0,
        nvars,
    };
    let out = p.poly()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

impl std::str::FromStr for MultiPoly {
    type Err = Error;

    /// Variable count is the largest index mentioned (at least 1).
    fn from_str(s: &str) -> Result<Self> {
        let bytes = s.as_bytes();
        let mut nvars = 1;
        let mut i = 0;
        while i < bytes.len() {
            if bytes[i] == b'x' {
                let start = i + 1;
                let mut j = start;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if let Ok(v) = s[start..j].parse::<usize>() {
                    nvars = nvars.max(v);
                }
                i = j;
            } else {
                i += 1;
            }
        }
        parse_poly(s, nvars)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn poly(&mut self) -> Result<MultiPoly> {
        let mut out = MultiPoly::zero(self.nvars);
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    1
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                None if first => return Err(self.err("empty polynomial")),
                None => break,
                _ if first => 1,
                _ => return Err(self.err("expected '+' or '-'")),
            };
            first = false;
            let (m, mut c) = self.term()?;
            if sign < 0 {
                c = -c;
            }
            out.add_term(m, c);
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Monomial, Rational)> {
        let coeff = match self.peek() {
            Some(b) if b.is_ascii_digit() => Some(self.coeff()?),
            _ => None,
        };
        let mut e = vec![0u32; self.nvars];
        let mut factors = 0;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    if self.peek() != Some(b'x') {
                        return Err(self.err("expected a variable after '*'"));
                    }
                }
                Some(b'x') => {}
                _ => break,
            }
            self.pos += 1;
            let idx = self.digits()?;
            let idx: usize = idx.parse().map_err(|_| self.err("bad variable index"))?;
            if idx == 0 || idx > self.nvars {
                return Err(Error::VariableIndex {
                    index: idx,
                    nvars: self.nvars,
                });
            }
            let pow = if self.peek() == Some(b'^') {
                self.pos += 1;
                self.skip_ws();
                self.digits()?
                    .parse::<u32>()
                    .map_err(|_| self.err("bad exponent"))?
            } else {
                1
            };
            e[idx - 1] += pow;
            factors += 1;
        }
        if coeff.is_none() && factors == 0 {
            return Err(self.err("expected a coefficient or variable"));
        }
        let m = Monomial(e);
        if m.degree() > DEGREE_CAP {
            return Err(Error::DegreeCap {
                degree: m.degree(),
                cap: DEGREE_CAP,
            });
        }
        Ok((m, coeff.unwrap_or_else(Rational::one)))
    }

    fn digits(&mut self) -> Result<&str> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        Ok(std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits"))
    }

    fn coeff(&mut self) -> Result<Rational> {
        let whole: BigInt = self.digits()?.parse().expect("ascii digits");
        match self.s.get(self.pos) {
            Some(b'/') => {
                self.pos += 1;
                let den: BigInt = self.digits()?.parse().expect("ascii digits");
                if den.is_zero() {
                    return Err(self.err("zero denominator"));
                }
                Ok(Rational::new(whole, den))
            }
            Some(b'.') => {
                self.pos += 1;
                let frac = self.digits()?;
                let scale = BigInt::from(10).pow(frac.len() as u32);
                let f: BigInt = frac.parse().expect("ascii digits");
                Ok(Rational::new(whole * scale.clone() + f, scale))
            }
            _ => Ok(Rational::from_integer(whole)),
        }
    }
}
