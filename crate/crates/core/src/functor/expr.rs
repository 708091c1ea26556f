//! Functor expressions: parsing and building. The grammar is documented in
//! `docs/functor-grammar.md`.

use std::fmt;
use std::sync::Arc;

use super::{
    AdditiveTensor, Constant, DirectSumFunctor, DividedPower, DualFunctor, ExteriorPower, FunctorRef,
    Linearization, ReducedLinearization, SymmetricPower, TensorFp, TensorFunctor, TruncatedPoly,
};
use crate::addcat::{Object, Skeleton};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerOp {
    /// `S^d`: on `Hom(a,-)` the graded piece of the group-ring filtration,
    /// otherwise the classical symmetric power.
    Sym,
    /// `Q^d`: only on `Hom(a,-)`, the quotient `q_d F_p[A(a,-)]`.
    Quot,
    Ext,
    Div,
}

/// Parsed functor expression; objects stay textual until a skeleton is known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctorExpr {
    Constant(usize),
    Identity,
    Linear(String),
    Reduced(String),
    Additive(String),
    Hom(String),
    Power(PowerOp, usize, Box<FunctorExpr>),
    Dual(Box<FunctorExpr>),
    Tensor(Box<FunctorExpr>, Box<FunctorExpr>),
    Sum(Vec<FunctorExpr>),
}

impl FunctorExpr {
    pub fn parse(s: &str) -> Result<FunctorExpr> {
        let mut p = Parser { s: s.as_bytes(), pos: 0, input: s };
        let e = p.sum()?;
        p.ws();
        if p.pos != p.s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(e)
    }

    pub fn build(&self, sk: &Arc<Skeleton>) -> Result<FunctorRef> {
        let obj = |s: &str| {
            let a = Object::parse(sk.num_generators(), s)?;
            sk.check_contains(&a)?;
            Ok::<_, Error>(a)
        };
        Ok(match self {
            FunctorExpr::Constant(n) => Arc::new(Constant::new(sk.clone(), *n)),
            FunctorExpr::Identity => Arc::new(TensorFp::new(sk.clone())),
            FunctorExpr::Linear(a) => Arc::new(Linearization::new(sk.clone(), obj(a)?)?),
            FunctorExpr::Reduced(a) => Arc::new(ReducedLinearization::new(sk.clone(), obj(a)?)?),
            FunctorExpr::Additive(a) | FunctorExpr::Hom(a) => Arc::new(AdditiveTensor::new(sk.clone(), obj(a)?)?),
            FunctorExpr::Power(op, d, inner) => match (op, inner.as_ref()) {
                (PowerOp::Sym, FunctorExpr::Hom(a)) => Arc::new(TruncatedPoly::graded(sk.clone(), obj(a)?, *d)?),
                (PowerOp::Quot, FunctorExpr::Hom(a)) => Arc::new(TruncatedPoly::quotient(sk.clone(), obj(a)?, *d)?),
                (PowerOp::Quot, _) => return Err(Error::Invalid("Q^d applies only to Hom(a,-)".into())),
                (PowerOp::Sym, e) => Arc::new(SymmetricPower::new(e.build(sk)?, *d)),
                (PowerOp::Ext, e) => Arc::new(ExteriorPower::new(e.build(sk)?, *d)),
                (PowerOp::Div, e) => Arc::new(DividedPower::new(e.build(sk)?, *d)),
            },
            FunctorExpr::Dual(e) => Arc::new(DualFunctor::new(e.build(sk)?)?),
            FunctorExpr::Tensor(l, r) => Arc::new(TensorFunctor::new(l.build(sk)?, r.build(sk)?)),
            FunctorExpr::Sum(parts) => {
                Arc::new(DirectSumFunctor::new(parts.iter().map(|e| e.build(sk)).collect::<Result<_>>()?)?)
            }
        })
    }
}

/// Parses and builds an expression over `sk`.
pub fn parse_functor(sk: &Arc<Skeleton>, s: &str) -> Result<FunctorRef> {
    FunctorExpr::parse(s)?.build(sk)
}

impl fmt::Display for FunctorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctorExpr::Constant(1) => write!(f, "k"),
            FunctorExpr::Constant(n) => write!(f, "k^{n}"),
            FunctorExpr::Identity => write!(f, "I"),
            FunctorExpr::Linear(a) => write!(f, "P({a})"),
            FunctorExpr::Reduced(a) => write!(f, "Pbar({a})"),
            FunctorExpr::Additive(a) => write!(f, "A({a})"),
            FunctorExpr::Hom(a) => write!(f, "Hom({a},-)"),
            FunctorExpr::Power(op, d, e) => {
                let c = match op {
                    PowerOp::Sym => 'S',
                    PowerOp::Quot => 'Q',
                    PowerOp::Ext => 'L',
                    PowerOp::Div => 'G',
                };
                write!(f, "{c}^{d} . ")?;
                match e.as_ref() {
                    FunctorExpr::Tensor(..) | FunctorExpr::Sum(_) => write!(f, "({e})"),
                    _ => write!(f, "{e}"),
                }
            }
            FunctorExpr::Dual(e) => write!(f, "D({e})"),
            FunctorExpr::Tensor(l, r) => {
                let wrap = |e: &FunctorExpr| matches!(e, FunctorExpr::Sum(_));
                if wrap(l) { write!(f, "({l})")? } else { write!(f, "{l}")? }
                write!(f, " * ")?;
                if wrap(r) || matches!(r.as_ref(), FunctorExpr::Tensor(..)) { write!(f, "({r})") } else { write!(f, "{r}") }
            }
            FunctorExpr::Sum(parts) => {
                let s: Vec<String> = parts.iter().map(ToString::to_string).collect();
                write!(f, "{}", s.join(" + "))
            }
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    input: &'a str,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Invalid(format!("functor expression {:?} at offset {}: {what}", self.input, self.pos))
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(&format!("expected {tok:?}")))
        }
    }

    fn int(&mut self) -> Result<usize> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.input[start..self.pos].parse().map_err(|_| self.err("expected an integer"))
    }

    /// `V<n>` or `V(<n>,...)`, returned verbatim.
    fn object(&mut self) -> Result<String> {
        self.ws();
        let start = self.pos;
        if !self.eat("V") {
            return Err(self.err("expected an object"));
        }
        if self.peek() == Some(b'(') {
            while self.pos < self.s.len() && self.s[self.pos] != b')' {
                self.pos += 1;
            }
            self.expect(")")?;
        } else {
            self.int()?;
        }
        Ok(self.input[start..self.pos].chars().filter(|c| !c.is_whitespace()).collect())
    }

    fn sum(&mut self) -> Result<FunctorExpr> {
        let mut parts = vec![self.product()?];
        while self.eat("+") {
            parts.push(self.product()?);
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one part") } else { FunctorExpr::Sum(parts) })
    }

    fn product(&mut self) -> Result<FunctorExpr> {
        let left = self.factor()?;
        if self.eat("*") {
            let right = self.product()?;
            return Ok(FunctorExpr::Tensor(Box::new(left), Box::new(right)));
        }
        Ok(left)
    }

    fn factor(&mut self) -> Result<FunctorExpr> {
        for (tok, op) in [("S^", PowerOp::Sym), ("Q^", PowerOp::Quot), ("L^", PowerOp::Ext), ("G^", PowerOp::Div)] {
            if self.eat(tok) {
                let d = self.int()?;
                self.expect(".")?;
                let inner = self.factor()?;
                return Ok(FunctorExpr::Power(op, d, Box::new(inner)));
            }
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<FunctorExpr> {
        if self.eat("(") {
            let e = self.sum()?;
            self.expect(")")?;
            return Ok(e);
        }
        if self.eat("Pbar(") {
            let a = self.object()?;
            self.expect(")")?;
            return Ok(FunctorExpr::Reduced(a));
        }
        for (tok, make) in [
            ("P(", FunctorExpr::Linear as fn(String) -> FunctorExpr),
            ("A(", FunctorExpr::Additive),
        ] {
            if self.eat(tok) {
                let a = self.object()?;
                self.expect(")")?;
                return Ok(make(a));
            }
        }
        if self.eat("Hom(") {
            let a = self.object()?;
            self.expect(",")?;
            self.expect("-")?;
            self.expect(")")?;
            return Ok(FunctorExpr::Hom(a));
        }
        if self.eat("D(") {
            let e = self.sum()?;
            self.expect(")")?;
            return Ok(FunctorExpr::Dual(Box::new(e)));
        }
        if self.eat("I") {
            return Ok(FunctorExpr::Identity);
        }
        if self.eat("k") {
            let n = if self.eat("^") { self.int()? } else { 1 };
            return Ok(FunctorExpr::Constant(n));
        }
        Err(self.err("expected a functor"))
    }
}
