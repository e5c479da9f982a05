//! A pragmatic SMT-LIB2 front end for conjunctions of strict polynomial
//! inequalities over `Real` variables.
//!
//! Supported commands: `set-logic`, `set-info`, `set-option`, `declare-fun`
//! and `declare-const` of arity-0 `Real` symbols, `assert`, `check-sat`,
//! `get-model`, `exit`. Terms are built from numerals, decimals, declared
//! variables, `+ - * /`, the relations `< > <= >= =`, `and`, `or`, `not`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::poly::{ExponentVector, Polynomial, Rational};
use crate::subtropical::Problem;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum SExpr {
    Atom(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }
}

fn syntax(pos: Pos, message: impl Into<String>) -> Error {
    Error::Syntax {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Reader {
            chars: text.chars().peekable(),
            pos: Pos { line: 1, column: 1 },
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    fn skip_blank(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read_all(&mut self) -> Result<Vec<SExpr>> {
        let mut out = Vec::new();
        loop {
            self.skip_blank();
            if self.chars.peek().is_none() {
                return Ok(out);
            }
            out.push(self.read()?);
        }
    }

    fn read(&mut self) -> Result<SExpr> {
        self.skip_blank();
        let start = self.pos;
        match self.chars.peek().copied() {
            None => Err(syntax(start, "unexpected end of input")),
            Some(')') => Err(syntax(start, "unexpected ')'")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_blank();
                    match self.chars.peek() {
                        None => return Err(syntax(start, "unclosed '('")),
                        Some(')') => {
                            self.bump();
                            return Ok(SExpr::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some('|') => {
                self.bump();
                let mut text = String::new();
                loop {
                    match self.bump() {
                        None => return Err(syntax(start, "unterminated quoted symbol")),
                        Some('|') => return Ok(SExpr::Atom(text, start)),
                        Some(c) => text.push(c),
                    }
                }
            }
            Some('"') => {
                self.bump();
                let mut text = String::from("\"");
                loop {
                    match self.bump() {
                        None => return Err(syntax(start, "unterminated string literal")),
                        Some('"') if self.chars.peek() == Some(&'"') => {
                            self.bump();
                            text.push('"');
                        }
                        Some('"') => {
                            text.push('"');
                            return Ok(SExpr::Atom(text, start));
                        }
                        Some(c) => text.push(c),
                    }
                }
            }
            Some(_) => {
                let mut text = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' || c == '|' || c == '"' {
                        break;
                    }
                    text.push(c);
                    self.bump();
                }
                Ok(SExpr::Atom(text, start))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Gt,
    Lt,
    Ge,
    Le,
    Eq,
    And,
    Or,
    Not,
}

impl Op {
    fn from_symbol(s: &str) -> Option<Op> {
        Some(match s {
            "+" => Op::Add,
            "-" => Op::Sub,
            "*" => Op::Mul,
            "/" => Op::Div,
            ">" => Op::Gt,
            "<" => Op::Lt,
            ">=" => Op::Ge,
            "<=" => Op::Le,
            "=" => Op::Eq,
            "and" => Op::And,
            "or" => Op::Or,
            "not" => Op::Not,
            _ => return None,
        })
    }

    fn symbol(self) -> &'static str {
        match self {
            Op::Add => "+",
            Op::Sub => "-",
            Op::Mul => "*",
            Op::Div => "/",
            Op::Gt => ">",
            Op::Lt => "<",
            Op::Ge => ">=",
            Op::Le => "<=",
            Op::Eq => "=",
            Op::And => "and",
            Op::Or => "or",
            Op::Not => "not",
        }
    }
}

/// A well-sorted term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Num(Rational),
    /// Index into the script's variable list.
    Var(usize),
    Bool(bool),
    App(Op, Vec<Term>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sort {
    Real,
    Bool,
}

/// Value of a term under an assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Num(Rational),
    Bool(bool),
}

impl Term {
    /// Evaluates the term directly, without going through polynomials.
    /// `None` on division by zero.
    pub fn evaluate(&self, values: &[Rational]) -> Option<Value> {
        let num = |t: &Term| match t.evaluate(values)? {
            Value::Num(r) => Some(r),
            Value::Bool(_) => None,
        };
        let boolean = |t: &Term| match t.evaluate(values)? {
            Value::Bool(b) => Some(b),
            Value::Num(_) => None,
        };
        Some(match self {
            Term::Num(r) => Value::Num(r.clone()),
            Term::Var(i) => Value::Num(values[*i].clone()),
            Term::Bool(b) => Value::Bool(*b),
            Term::App(op, args) => match op {
                Op::Add => Value::Num(args.iter().map(num).sum::<Option<Rational>>()?),
                Op::Mul => Value::Num(args.iter().map(num).product::<Option<Rational>>()?),
                Op::Sub if args.len() == 1 => Value::Num(-num(&args[0])?),
                Op::Sub => {
                    let first = num(&args[0])?;
                    Value::Num(args[1..].iter().try_fold(first, |acc, t| Some(acc - num(t)?))?)
                }
                Op::Div => {
                    let first = num(&args[0])?;
                    Value::Num(args[1..].iter().try_fold(first, |acc, t| {
                        let d = num(t)?;
                        (!d.is_zero()).then(|| acc / d)
                    })?)
                }
                Op::Gt | Op::Lt | Op::Ge | Op::Le | Op::Eq => {
                    let nums: Vec<Rational> = args.iter().map(num).collect::<Option<_>>()?;
                    Value::Bool(nums.windows(2).all(|w| match op {
                        Op::Gt => w[0] > w[1],
                        Op::Lt => w[0] < w[1],
                        Op::Ge => w[0] >= w[1],
                        Op::Le => w[0] <= w[1],
                        _ => w[0] == w[1],
                    }))
                }
                Op::And => Value::Bool(args.iter().map(boolean).collect::<Option<Vec<_>>>()?.iter().all(|&b| b)),
                Op::Or => Value::Bool(args.iter().map(boolean).collect::<Option<Vec<_>>>()?.iter().any(|&b| b)),
                Op::Not => Value::Bool(!boolean(&args[0])?),
            },
        })
    }
}

/// Declarations and assertions of one script.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParsedScript {
    pub logic: Option<String>,
    /// Declared `Real` variables, in declaration order.
    pub variables: Vec<String>,
    pub assertions: Vec<Term>,
    /// Command names in order of appearance.
    pub commands: Vec<String>,
}

/// Parses an SMT-LIB2 script.
pub fn parse(text: &str) -> Result<ParsedScript> {
    let commands = Reader::new(text).read_all()?;
    let mut script = ParsedScript::default();
    let mut index: HashMap<String, usize> = HashMap::new();
    for command in &commands {
        let SExpr::List(items, pos) = command else {
            return Err(syntax(command.pos(), "expected a command"));
        };
        let Some(SExpr::Atom(name, _)) = items.first() else {
            return Err(syntax(*pos, "expected a command name"));
        };
        script.commands.push(name.clone());
        let args = &items[1..];
        match name.as_str() {
            "set-logic" => match args {
                [SExpr::Atom(logic, _)] => script.logic = Some(logic.clone()),
                _ => return Err(syntax(*pos, "set-logic expects one symbol")),
            },
            "set-info" | "set-option" | "check-sat" | "get-model" | "exit" => {}
            "declare-fun" | "declare-const" => {
                let (symbol, sort) = match (name.as_str(), args) {
                    ("declare-fun", [SExpr::Atom(symbol, _), SExpr::List(params, ppos), sort]) => {
                        if !params.is_empty() {
                            let _ = ppos;
                            return Err(Error::Unsupported(format!(
                                "function symbol {symbol} of arity {}",
                                params.len()
                            )));
                        }
                        (symbol, sort)
                    }
                    ("declare-const", [SExpr::Atom(symbol, _), sort]) => (symbol, sort),
                    _ => return Err(syntax(*pos, format!("malformed {name}"))),
                };
                match sort {
                    SExpr::Atom(s, _) if s == "Real" => {}
                    SExpr::Atom(s, _) => return Err(Error::Unsupported(format!("sort {s}"))),
                    SExpr::List(..) => return Err(Error::Unsupported("parametric sort".into())),
                }
                if index.contains_key(symbol) {
                    return Err(syntax(*pos, format!("{symbol} is already declared")));
                }
                index.insert(symbol.clone(), script.variables.len());
                script.variables.push(symbol.clone());
            }
            "assert" => {
                let [term] = args else {
                    return Err(syntax(*pos, "assert expects one term"));
                };
                let (term, sort) = parse_term(term, &index)?;
                if sort != Sort::Bool {
                    return Err(syntax(*pos, "asserted term is not Boolean"));
                }
                script.assertions.push(term);
            }
            other => return Err(Error::Unsupported(format!("command {other}"))),
        }
    }
    Ok(script)
}

fn parse_numeral(text: &str) -> Option<Rational> {
    if text.is_empty() || !text.chars().next()?.is_ascii_digit() {
        return None;
    }
    match text.split_once('.') {
        None => text.parse::<BigInt>().ok().map(Rational::from_integer),
        Some((whole, fraction)) => {
            if fraction.is_empty() || !fraction.chars().all(|c| c.is_ascii_digit()) {
                return None;
            }
            let digits: BigInt = format!("{whole}{fraction}").parse().ok()?;
            let scale = num_traits::pow(BigInt::from(10), fraction.len());
            Some(Rational::new(digits, scale))
        }
    }
}

fn parse_term(e: &SExpr, vars: &HashMap<String, usize>) -> Result<(Term, Sort)> {
    match e {
        SExpr::Atom(text, pos) => {
            if let Some(r) = parse_numeral(text) {
                return Ok((Term::Num(r), Sort::Real));
            }
            match text.as_str() {
                "true" => Ok((Term::Bool(true), Sort::Bool)),
                "false" => Ok((Term::Bool(false), Sort::Bool)),
                _ => match vars.get(text) {
                    Some(&i) => Ok((Term::Var(i), Sort::Real)),
                    None => Err(syntax(*pos, format!("undeclared symbol {text}"))),
                },
            }
        }
        SExpr::List(items, pos) => {
            let Some(SExpr::Atom(head, _)) = items.first() else {
                return Err(syntax(*pos, "expected an operator"));
            };
            let Some(op) = Op::from_symbol(head) else {
                return Err(match head.as_str() {
                    "let" | "ite" | "distinct" | "=>" | "xor" | "forall" | "exists" | "to_real" | "abs" => {
                        Error::Unsupported(format!("operator {head}"))
                    }
                    _ => syntax(*pos, format!("unknown operator {head}")),
                });
            };
            let mut args = Vec::with_capacity(items.len() - 1);
            for item in &items[1..] {
                let (term, sort) = parse_term(item, vars)?;
                let expected = match op {
                    Op::And | Op::Or | Op::Not => Sort::Bool,
                    _ => Sort::Real,
                };
                if sort != expected {
                    return Err(syntax(item.pos(), format!("sort mismatch in argument of {head}")));
                }
                args.push(term);
            }
            let arity_ok = match op {
                Op::Not => args.len() == 1,
                Op::Sub => !args.is_empty(),
                Op::Add | Op::Mul | Op::Div | Op::Gt | Op::Lt | Op::Ge | Op::Le | Op::Eq => args.len() >= 2,
                Op::And | Op::Or => true,
            };
            if !arity_ok {
                return Err(syntax(*pos, format!("wrong number of arguments for {head}")));
            }
            let sort = match op {
                Op::Add | Op::Sub | Op::Mul | Op::Div => Sort::Real,
                _ => Sort::Bool,
            };
            Ok((Term::App(op, args), sort))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictOverride {
    TriviallySat,
    TriviallyUnsat,
}

impl fmt::Display for VerdictOverride {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerdictOverride::TriviallySat => write!(f, "trivially sat"),
            VerdictOverride::TriviallyUnsat => write!(f, "trivially unsat"),
        }
    }
}

/// A script in the form `⋀ f_i > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedProblem {
    pub problem: Problem,
    /// Source assertion index of each constraint.
    pub provenance: Vec<usize>,
    pub verdict_override: Option<VerdictOverride>,
}

/// Rewrites every assertion into constraints `f > 0` with nonconstant `f`.
/// Non-strict relations, equalities, negations and disjunctions are
/// rejected as [`Error::Unsupported`].
pub fn normalize(script: &ParsedScript) -> Result<NormalizedProblem> {
    let d = script.variables.len();
    let mut strict = Vec::new();
    let mut trivially_false = false;
    for (index, assertion) in script.assertions.iter().enumerate() {
        collect_conjuncts(assertion, index, &mut strict, &mut trivially_false)?;
    }

    let mut constraints = Vec::new();
    let mut provenance = Vec::new();
    for (index, lhs, rhs) in strict {
        let f = polynomial(rhs, d)?.negate();
        let f = add(&polynomial(lhs, d)?, &f);
        if f.is_constant() {
            if !f.constant_term().is_positive() {
                trivially_false = true;
            }
            continue;
        }
        constraints.push(f);
        provenance.push(index);
    }
    let verdict_override = if trivially_false {
        Some(VerdictOverride::TriviallyUnsat)
    } else if constraints.is_empty() {
        Some(VerdictOverride::TriviallySat)
    } else {
        None
    };
    Ok(NormalizedProblem {
        problem: Problem::new(script.variables.clone(), constraints)?,
        provenance,
        verdict_override,
    })
}

/// Appends `(lhs, rhs)` for each `lhs > rhs` implied by the conjunction.
fn collect_conjuncts<'a>(
    term: &'a Term,
    index: usize,
    out: &mut Vec<(usize, &'a Term, &'a Term)>,
    trivially_false: &mut bool,
) -> Result<()> {
    match term {
        Term::Bool(true) => Ok(()),
        Term::Bool(false) => {
            *trivially_false = true;
            Ok(())
        }
        Term::App(Op::And, args) => args
            .iter()
            .try_for_each(|a| collect_conjuncts(a, index, out, trivially_false)),
        Term::App(Op::Gt, args) => {
            out.extend(args.windows(2).map(|w| (index, &w[0], &w[1])));
            Ok(())
        }
        Term::App(Op::Lt, args) => {
            out.extend(args.windows(2).map(|w| (index, &w[1], &w[0])));
            Ok(())
        }
        Term::App(Op::Ge | Op::Le, _) => Err(Error::Unsupported("non-strict relation".into())),
        Term::App(Op::Eq, _) => Err(Error::Unsupported("equality".into())),
        Term::App(Op::Or, _) => Err(Error::Unsupported("disjunction".into())),
        Term::App(Op::Not, args) => match &args[0] {
            Term::Bool(b) => {
                *trivially_false |= *b;
                Ok(())
            }
            Term::App(Op::Gt | Op::Lt | Op::Ge | Op::Le, _) => Err(Error::Unsupported("non-strict relation".into())),
            Term::App(Op::Eq, _) => Err(Error::Unsupported("disequality".into())),
            _ => Err(Error::Unsupported("negation".into())),
        },
        Term::App(op, _) => Err(Error::Unsupported(format!(
            "operator {} in Boolean position",
            op.symbol()
        ))),
        Term::Num(_) | Term::Var(_) => Err(Error::Unsupported("non-Boolean assertion".into())),
    }
}

fn polynomial(term: &Term, d: usize) -> Result<Polynomial> {
    Ok(match term {
        Term::Num(r) => Polynomial::constant(d, r.clone()),
        Term::Var(i) => {
            let mut exponents = vec![0; d];
            exponents[*i] = 1;
            Polynomial::from_terms(d, [(ExponentVector::new(exponents), Rational::one())])?
        }
        Term::Bool(_) => return Err(Error::Unsupported("Boolean inside arithmetic".into())),
        Term::App(op, args) => {
            let mut parts = args.iter().map(|a| polynomial(a, d));
            match op {
                Op::Add => parts.try_fold(Polynomial::zero(d), |acc, p| Ok::<_, Error>(add(&acc, &p?)))?,
                Op::Mul => parts.try_fold(Polynomial::constant(d, Rational::one()), |acc, p| {
                    Ok::<_, Error>(mul(&acc, &p?))
                })?,
                Op::Sub => {
                    let first = parts.next().expect("arity checked")?;
                    if args.len() == 1 {
                        first.negate()
                    } else {
                        parts.try_fold(first, |acc, p| Ok::<_, Error>(add(&acc, &p?.negate())))?
                    }
                }
                Op::Div => {
                    let first = parts.next().expect("arity checked")?;
                    parts.try_fold(first, |acc, p| {
                        let p = p?;
                        if !p.is_constant() {
                            return Err(Error::Unsupported("division by a non-constant".into()));
                        }
                        let divisor = p.constant_term();
                        if divisor.is_zero() {
                            return Err(Error::Unsupported("division by zero".into()));
                        }
                        Ok(scale(&acc, &divisor.recip()))
                    })?
                }
                _ => {
                    return Err(Error::Unsupported(format!(
                        "operator {} inside arithmetic",
                        op.symbol()
                    )))
                }
            }
        }
    })
}

fn add(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let mut sum = a.clone();
    for (p, c) in b.terms() {
        sum.add_term(p.clone(), c.clone()).expect("dimensions agree");
    }
    sum
}

fn scale(a: &Polynomial, k: &Rational) -> Polynomial {
    Polynomial::from_terms(a.dimension(), a.terms().map(|(p, c)| (p.clone(), c * k))).expect("dimensions agree")
}

fn mul(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let mut product = Polynomial::zero(a.dimension());
    for (p, c) in a.terms() {
        for (q, e) in b.terms() {
            let exponents = p.exponents().iter().zip(q.exponents()).map(|(x, y)| x + y).collect();
            product
                .add_term(ExponentVector::new(exponents), c * e)
                .expect("dimensions agree");
        }
    }
    product
}

/// Checks an assignment against every assertion by direct term evaluation.
pub fn assertions_hold(script: &ParsedScript, values: &[Rational]) -> bool {
    values.len() == script.variables.len()
        && script
            .assertions
            .iter()
            .all(|a| a.evaluate(values) == Some(Value::Bool(true)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, ratio, Point};

    #[test]
    fn single_assertion() {
        let s = parse("(declare-fun x () Real)\n(assert (> (+ x 1) 0))").unwrap();
        assert_eq!(s.assertions.len(), 1);
        assert_eq!(s.variables, vec!["x"]);
    }

    #[test]
    fn conjunction_flattens() {
        let s = parse("(declare-const x Real)(declare-const y Real)(assert (and (> x 0) (< y 0)))").unwrap();
        let n = normalize(&s).unwrap();
        assert_eq!(n.problem.constraints().len(), 2);
        assert_eq!(n.provenance, vec![0, 0]);
        // y < 0 becomes -y > 0
        let minus_y = Polynomial::from_int_terms(2, [(vec![0, 1], -1)]).unwrap();
        assert_eq!(n.problem.constraints()[1], minus_y);
    }

    #[test]
    fn non_real_declarations_are_unsupported() {
        assert!(matches!(
            parse("(declare-fun f (Real) Real)"),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(parse("(declare-fun n () Int)"), Err(Error::Unsupported(_))));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse("(set-logic QF_NRA)\n(assert (> x 0))").unwrap_err();
        assert_eq!(
            err,
            Error::Syntax {
                line: 2,
                column: 12,
                message: "undeclared symbol x".into()
            }
        );
        assert!(matches!(
            parse("(assert (> 1 0)"),
            Err(Error::Syntax { line: 1, column: 1, .. })
        ));
    }

    #[test]
    fn squares_and_products() {
        let s = parse("(declare-fun x () Real)(assert (> (* x x) 2))").unwrap();
        let n = normalize(&s).unwrap();
        let expected = Polynomial::from_int_terms(1, [(vec![2], 1), (vec![0], -2)]).unwrap();
        assert_eq!(n.problem.constraints(), &[expected]);
    }

    #[test]
    fn non_strict_and_equalities_are_rejected() {
        let check = |text: &str, reason: &str| {
            let s = parse(text).unwrap();
            assert_eq!(normalize(&s), Err(Error::Unsupported(reason.into())));
        };
        check("(declare-fun x () Real)(assert (>= x 0))", "non-strict relation");
        check("(declare-fun x () Real)(assert (not (> x 0)))", "non-strict relation");
        check("(declare-fun x () Real)(assert (= x 0))", "equality");
        check("(declare-fun x () Real)(assert (or (> x 0) (< x 1)))", "disjunction");
    }

    #[test]
    fn constant_constraints() {
        let s = parse("(declare-fun x () Real)(assert (> 3 1))").unwrap();
        let n = normalize(&s).unwrap();
        assert_eq!(n.verdict_override, Some(VerdictOverride::TriviallySat));
        assert!(n.problem.constraints().is_empty());

        let s = parse("(declare-fun x () Real)(assert (> x 0))(assert (> 1 1))").unwrap();
        assert_eq!(
            normalize(&s).unwrap().verdict_override,
            Some(VerdictOverride::TriviallyUnsat)
        );

        let s = parse("(declare-fun x () Real)(assert (> (- x x) 0))").unwrap();
        assert_eq!(
            normalize(&s).unwrap().verdict_override,
            Some(VerdictOverride::TriviallyUnsat)
        );
    }

    #[test]
    fn decimals_and_division() {
        let s = parse("(declare-fun x () Real)(assert (> (/ x 4) 0.1))").unwrap();
        let n = normalize(&s).unwrap();
        let expected = Polynomial::from_terms(1, [(vec![1], ratio(1, 4)), (vec![0], ratio(-1, 10))]).unwrap();
        assert_eq!(n.problem.constraints(), &[expected]);

        let s = parse("(declare-fun x () Real)(assert (> (/ 1 x) 0))").unwrap();
        assert!(matches!(normalize(&s), Err(Error::Unsupported(_))));
    }

    #[test]
    fn unary_and_nary_minus() {
        let s = parse("(declare-fun x () Real)(assert (> (- x 1 2) (- 3)))").unwrap();
        let n = normalize(&s).unwrap();
        // x - 3 + 3 = x
        let expected = Polynomial::from_int_terms(1, [(vec![1], 1)]).unwrap();
        assert_eq!(n.problem.constraints(), &[expected]);
    }

    #[test]
    fn chained_relations() {
        let s = parse("(declare-fun x () Real)(declare-fun y () Real)(assert (< 0 x y))").unwrap();
        assert_eq!(normalize(&s).unwrap().problem.constraints().len(), 2);
    }

    #[test]
    fn commands_and_comments() {
        let text = "; header\n(set-info :status sat)\n(set-logic QF_NRA)\n(declare-fun |a b| () Real)\n\
                    (assert (> |a b| 0)) ; trailing\n(check-sat)\n(get-model)\n(exit)\n";
        let s = parse(text).unwrap();
        assert_eq!(s.logic.as_deref(), Some("QF_NRA"));
        assert_eq!(s.variables, vec!["a b"]);
        assert_eq!(
            s.commands,
            vec![
                "set-info",
                "set-logic",
                "declare-fun",
                "assert",
                "check-sat",
                "get-model",
                "exit"
            ]
        );
        assert!(matches!(parse("(push 1)"), Err(Error::Unsupported(_))));
    }

    #[test]
    fn normalized_constraint_matches_source_difference() {
        let s = parse("(declare-fun x () Real)(declare-fun y () Real)(assert (< (* x y) (+ (* 2 x) 1.5)))").unwrap();
        let n = normalize(&s).unwrap();
        let values = [ratio(3, 7), int(-2)];
        let f = &n.problem.constraints()[0];
        let direct = &values[0] * int(2) + ratio(3, 2) - &values[0] * &values[1];
        assert_eq!(f.evaluate(&Point::new(values.to_vec())).unwrap(), direct);
    }

    #[test]
    fn direct_assertion_evaluation() {
        let s = parse("(declare-fun x () Real)(assert (and (> (* x x) 2) (< x 0)))").unwrap();
        assert!(assertions_hold(&s, &[int(-2)]));
        assert!(!assertions_hold(&s, &[int(2)]));
        assert!(!assertions_hold(&s, &[]));
    }
}
