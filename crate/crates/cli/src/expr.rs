//! Real-valued parameter expressions such as `sqrt(2) - 1` or `2^-4`.
//!
//! Grammar: sums and differences of products and quotients of powers of
//! signed atoms; an atom is a decimal literal, `pi`, a parenthesized
//! expression or `sqrt(...)`. All arithmetic is in `f64`, so `1/3` is a
//! third, not zero.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprError {
    pub input: String,
    pub message: String,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot evaluate '{}': {}", self.input, self.message)
    }
}

impl std::error::Error for ExprError {}

pub fn eval(input: &str) -> Result<f64, ExprError> {
    let mut p = Parser {
        src: input.as_bytes(),
        pos: 0,
    };
    let fail = |message: String| ExprError {
        input: input.to_string(),
        message,
    };
    let v = p.sum().map_err(fail)?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(fail(format!("unexpected input at byte {}", p.pos)));
    }
    if !v.is_finite() {
        return Err(fail("value is not finite".into()));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<f64, String> {
        let mut v = self.product()?;
        loop {
            if self.eat(b'+') {
                v += self.product()?;
            } else if self.eat(b'-') {
                v -= self.product()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn product(&mut self) -> Result<f64, String> {
        let mut v = self.unary()?;
        loop {
            if self.eat(b'*') {
                v *= self.unary()?;
            } else if self.eat(b'/') {
                v /= self.unary()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<f64, String> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    // Right-associative; the exponent may carry its own sign (`2^-4`).
    fn power(&mut self) -> Result<f64, String> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.unary()?;
            return Ok(base.powf(exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<f64, String> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum()?;
                if !self.eat(b')') {
                    return Err("missing ')'".into());
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                match name {
                    "pi" => Ok(std::f64::consts::PI),
                    "sqrt" => {
                        if !self.eat(b'(') {
                            return Err("sqrt needs '('".into());
                        }
                        let v = self.sum()?;
                        if !self.eat(b')') {
                            return Err("missing ')'".into());
                        }
                        if v < 0.0 {
                            return Err("sqrt of a negative number".into());
                        }
                        Ok(v.sqrt())
                    }
                    _ => Err(format!("unknown name '{name}'")),
                }
            }
            Some(c) => Err(format!("unexpected '{}'", c as char)),
            None => Err("unexpected end of input".into()),
        }
    }

    fn number(&mut self) -> Result<f64, String> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if self.pos == exp_start {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        text.parse::<f64>().map_err(|_| format!("bad number '{text}'"))
    }
}
