//! The form expression language: `theta`, `f2`, `eisenstein:k`, combined
//! with `*`, `^` and parentheses, e.g. `theta^3*eisenstein:4`.

use std::fmt;

use qmf_core::qmring::{decompose_gamma14, DECOMPOSITION_GUARD};
use qmf_core::qseries::{eisenstein_series, f2_series, theta_series};
use qmf_core::{Error, IsobaricPoly, QSeries, Result, Weight};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Form {
    Theta,
    F2,
    Eisenstein(u32),
    Product(Vec<Form>),
    Power(Box<Form>, u32),
}

impl Form {
    pub fn parse(src: &str) -> Result<Form> {
        let tokens = tokenize(src)?;
        let mut parser = Parser { tokens: &tokens, pos: 0 };
        let form = parser.product()?;
        if parser.pos != tokens.len() {
            return Err(syntax(src, "trailing input"));
        }
        Ok(form)
    }

    pub fn weight(&self) -> Weight {
        match self {
            Form::Theta => Weight::from_halves(1),
            Form::F2 => Weight::int(2),
            Form::Eisenstein(k) => Weight::int(*k as i64),
            Form::Product(fs) => fs.iter().fold(Weight::ZERO, |w, f| w + f.weight()),
            Form::Power(f, e) => Weight::from_halves(f.weight().halves() * *e as i64),
        }
    }

    pub fn series(&self, precision: usize) -> Result<QSeries> {
        Ok(match self {
            Form::Theta => theta_series(precision),
            Form::F2 => f2_series(precision),
            Form::Eisenstein(k) => eisenstein_series(*k, precision)?,
            Form::Product(fs) => {
                let mut acc = QSeries::one(precision);
                for f in fs {
                    acc = acc.mul(&f.series(precision)?);
                }
                acc
            }
            Form::Power(f, e) => f.series(precision)?.pow(*e),
        })
    }

    /// The polynomial model in `X, Y, Z = Theta, F2, E2`.
    pub fn poly(&self) -> Result<IsobaricPoly> {
        Ok(match self {
            Form::Theta => IsobaricPoly::x(),
            Form::F2 => IsobaricPoly::y(),
            Form::Eisenstein(2) => IsobaricPoly::z(),
            Form::Eisenstein(k) => {
                let w = Weight::int(*k as i64);
                let prec = qmf_core::qmring::gamma14_dimension(w) + DECOMPOSITION_GUARD;
                decompose_gamma14(&eisenstein_series(*k, prec)?, w)?
            }
            Form::Product(fs) => {
                let mut acc = IsobaricPoly::one();
                for f in fs {
                    acc = &acc * &f.poly()?;
                }
                acc
            }
            Form::Power(f, e) => f.poly()?.pow(*e),
        })
    }

    pub fn is_modular(&self) -> bool {
        match self {
            Form::Eisenstein(2) => false,
            Form::Product(fs) => fs.iter().all(Form::is_modular),
            Form::Power(f, e) => *e == 0 || f.is_modular(),
            _ => true,
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Form::Theta => write!(f, "theta"),
            Form::F2 => write!(f, "f2"),
            Form::Eisenstein(k) => write!(f, "eisenstein:{k}"),
            Form::Product(fs) => {
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
            Form::Power(x, e) => match **x {
                Form::Product(_) => write!(f, "({x})^{e}"),
                _ => write!(f, "{x}^{e}"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Name(String),
    Int(u32),
    Star,
    Caret,
    Colon,
    Open,
    Close,
}

fn syntax(src: &str, what: &str) -> Error {
    Error::InvalidArgument(format!("cannot parse form {src:?}: {what}"))
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' => {
                chars.next();
            }
            '*' => {
                chars.next();
                out.push(Token::Star);
            }
            '^' => {
                chars.next();
                out.push(Token::Caret);
            }
            ':' => {
                chars.next();
                out.push(Token::Colon);
            }
            '(' => {
                chars.next();
                out.push(Token::Open);
            }
            ')' => {
                chars.next();
                out.push(Token::Close);
            }
            '0'..='9' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    s.push(d);
                    chars.next();
                }
                out.push(Token::Int(s.parse().map_err(|_| syntax(src, "number too large"))?));
            }
            c if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while let Some(&d) = chars.peek().filter(|d| d.is_ascii_alphanumeric() || **d == '_') {
                    s.push(d.to_ascii_lowercase());
                    chars.next();
                }
                out.push(Token::Name(s));
            }
            other => return Err(syntax(src, &format!("unexpected character {other:?}"))),
        }
    }
    if out.is_empty() {
        return Err(syntax(src, "empty expression"));
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn err(&self, what: &str) -> Error {
        Error::InvalidArgument(format!("cannot parse form: {what} at token {}", self.pos))
    }

    fn product(&mut self) -> Result<Form> {
        let mut factors = vec![self.power()?];
        while self.peek() == Some(&Token::Star) {
            self.next();
            factors.push(self.power()?);
        }
        Ok(if factors.len() == 1 { factors.pop().expect("one factor") } else { Form::Product(factors) })
    }

    fn power(&mut self) -> Result<Form> {
        let base = self.atom()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.next();
        match self.next() {
            Some(&Token::Int(e)) => Ok(Form::Power(Box::new(base), e)),
            _ => Err(self.err("expected an exponent")),
        }
    }

    fn atom(&mut self) -> Result<Form> {
        match self.next().cloned() {
            Some(Token::Open) => {
                let inner = self.product()?;
                match self.next() {
                    Some(Token::Close) => Ok(inner),
                    _ => Err(self.err("expected ')'")),
                }
            }
            Some(Token::Name(n)) => match n.as_str() {
                "theta" => Ok(Form::Theta),
                "f2" => Ok(Form::F2),
                "eisenstein" | "e" => {
                    if self.next() != Some(&Token::Colon) {
                        return Err(self.err("expected ':' after eisenstein"));
                    }
                    match self.next() {
                        Some(&Token::Int(k)) if k >= 2 && k % 2 == 0 => Ok(Form::Eisenstein(k)),
                        Some(&Token::Int(k)) => Err(self.err(&format!("Eisenstein weight {k} must be even and >= 2"))),
                        _ => Err(self.err("expected a weight after ':'")),
                    }
                }
                other => Err(self.err(&format!("unknown form {other:?}"))),
            },
            _ => Err(self.err("expected a form")),
        }
    }
}
