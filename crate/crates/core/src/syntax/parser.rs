use std::collections::BTreeSet;

use super::lexer::{tokenize, Spanned, Tok};
use crate::error::{Error, Result};
use crate::kernel::atom::{Atom, GroundAtom, Symbol, Term};
use crate::kernel::context::{Emcs, EvolvingContext, Vocabulary};
use crate::kernel::kb::Kb;
use crate::kernel::rules::{BridgeLiteral, BridgeRule, Head};
use crate::logics::datalog::{Program, Rule};
use crate::logics::el::{Axiom, Concept, Ontology};
use crate::logics::LogicKind;

const CONCEPT_KEYWORDS: [&str; 6] = ["top", "bot", "some", "and", "sub", "equiv"];

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

/// A context reference inside a bridge literal, resolved once all context
/// names are known.
enum Ref {
    Index(usize),
    Name(String, usize, usize),
}

/// A bridge rule whose body literals still name their contexts.
type PendingRule = (Head, Vec<(Ref, Atom, bool)>);

struct PendingContext {
    context: EvolvingContext,
    rules: Vec<PendingRule>,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser {
            toks: tokenize(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let (l, c) = self.here();
        Err(Error::parse(l, c, message))
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", tok.describe(), self.peek().describe()))
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Word(x) if x == w)
    }

    fn word(&mut self, what: &str) -> Result<String> {
        match self.peek().clone() {
            Tok::Word(w) => {
                self.advance();
                Ok(w)
            }
            other => self.error(format!("expected {what}, found {}", other.describe())),
        }
    }

    fn name(&mut self, what: &str) -> Result<String> {
        let (l, c) = self.here();
        let w = self.word(what)?;
        if w.starts_with(|c: char| c.is_ascii_digit()) {
            return Err(Error::parse(
                l,
                c,
                format!("{what} `{w}` must start with a letter or `_`"),
            ));
        }
        Ok(w)
    }

    fn term(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Word(w) => {
                self.advance();
                if Symbol::is_variable_name(&w) {
                    Ok(Term::Var(Symbol::new(&w)))
                } else {
                    Ok(Term::Const(Symbol::new(&w)))
                }
            }
            Tok::Quoted(q) => {
                self.advance();
                Ok(Term::Const(Symbol::new(&q)))
            }
            other => self.error(format!("expected a term, found {}", other.describe())),
        }
    }

    fn atom(&mut self) -> Result<Atom> {
        let (l, c) = self.here();
        let predicate = self.name("predicate")?;
        if predicate == "not" {
            return Err(Error::parse(l, c, "`not` cannot be used as a predicate"));
        }
        let mut terms = Vec::new();
        if self.eat(&Tok::LParen) {
            loop {
                terms.push(self.term()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RParen)?;
        }
        Ok(Atom::new(Symbol::new(&predicate), terms))
    }

    fn ground_atom(&mut self) -> Result<GroundAtom> {
        let (l, c) = self.here();
        let a = self.atom()?;
        a.as_ground().ok_or_else(|| {
            Error::parse(
                l,
                c,
                format!("`{a}` must be ground; single lowercase letters are variables"),
            )
        })
    }

    fn negation(&mut self) -> bool {
        if self.is_word("not") || self.peek() == &Tok::Tilde {
            self.advance();
            true
        } else {
            false
        }
    }

    fn system(&mut self) -> Result<Emcs> {
        let mut constants = BTreeSet::new();
        let mut pending: Vec<PendingContext> = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Word(w) if w == "constants" => {
                    self.advance();
                    if !self.eat(&Tok::Semi) {
                        loop {
                            match self.term()? {
                                Term::Const(c) => constants.insert(c),
                                Term::Var(v) => {
                                    return self
                                        .error(format!("`{v}` reads as a variable; quote it to use it as a constant"))
                                }
                            };
                            if !self.eat(&Tok::Comma) {
                                break;
                            }
                        }
                        self.expect(&Tok::Semi)?;
                    }
                }
                Tok::Word(w) if w == "context" => {
                    self.advance();
                    let (l, c) = self.here();
                    let p = self.context()?;
                    if pending.iter().any(|q| q.context.name() == p.context.name()) {
                        return Err(Error::parse(l, c, format!("duplicate context `{}`", p.context.name())));
                    }
                    pending.push(p);
                }
                other => return self.error(format!("expected `context` or `constants`, found {}", other.describe())),
            }
        }

        let names: Vec<String> = pending.iter().map(|p| p.context.name().to_string()).collect();
        let mut contexts = Vec::with_capacity(pending.len());
        for p in pending {
            let mut rules = Vec::with_capacity(p.rules.len());
            for (head, body) in p.rules {
                let mut lits = Vec::with_capacity(body.len());
                for (r, atom, negated) in body {
                    let context = match r {
                        Ref::Index(k) => k,
                        Ref::Name(n, l, c) => match names.iter().position(|m| *m == n) {
                            Some(k) => k,
                            None => return Err(Error::parse(l, c, format!("unknown context `{n}`"))),
                        },
                    };
                    lits.push(BridgeLiteral { context, atom, negated });
                }
                rules.push(BridgeRule::new(head, lits));
            }
            contexts.push(p.context.with_bridge_rules(rules));
        }
        Ok(Emcs::with_constants(contexts, constants))
    }

    fn context(&mut self) -> Result<PendingContext> {
        let name = self.name("context name")?;
        self.expect(&Tok::Colon)?;
        let (l, c) = self.here();
        let kind_word = self.word("context kind")?;
        let (kind, observation) =
            match kind_word.as_str() {
                "observation" => (LogicKind::Identity, true),
                other => match other.parse::<LogicKind>() {
                    Ok(k) => (k, false),
                    Err(_) => return Err(Error::parse(
                        l,
                        c,
                        format!(
                            "unknown context kind `{other}`; expected observation, identity, datalog, normal-lp or el"
                        ),
                    )),
                },
            };
        self.expect(&Tok::LBrace)?;

        let mut vocab: Option<Vocabulary> = None;
        let mut ops: Option<BTreeSet<Symbol>> = None;
        let mut kb: Option<Kb> = None;
        let mut rules = None;
        while !self.eat(&Tok::RBrace) {
            let (l, c) = self.here();
            let item = self.word("`vocab`, `ops`, `kb`, `bridge` or `}`")?;
            let duplicate = match item.as_str() {
                "vocab" => vocab.replace(self.vocab()?).is_some(),
                "ops" => ops.replace(self.ops()?).is_some(),
                "kb" => kb.replace(self.kb(kind)?).is_some(),
                "bridge" => rules.replace(self.bridge()?).is_some(),
                other => {
                    return Err(Error::parse(
                        l,
                        c,
                        format!("expected `vocab`, `ops`, `kb`, `bridge` or `}}`, found `{other}`"),
                    ))
                }
            };
            if duplicate {
                return Err(Error::parse(l, c, format!("`{item}` given twice")));
            }
        }

        let mut context = EvolvingContext::new(&name, kind, kb.unwrap_or_default());
        if observation {
            context = EvolvingContext::observation(&name).replace_kb(context.kb().clone());
        }
        if let Some(v) = vocab {
            context = context.with_vocab(v);
        }
        if let Some(o) = ops {
            context = context.with_ops(o);
        }
        Ok(PendingContext {
            context,
            rules: rules.unwrap_or_default(),
        })
    }

    fn vocab(&mut self) -> Result<Vocabulary> {
        let mut v = Vocabulary::new();
        if self.eat(&Tok::Semi) {
            return Ok(v);
        }
        loop {
            let (l, c) = self.here();
            let p = self.name("predicate")?;
            self.expect(&Tok::Slash)?;
            let (al, ac) = self.here();
            let a: usize = self
                .word("arity")?
                .parse()
                .map_err(|_| Error::parse(al, ac, "arity must be a number"))?;
            if let Some(prev) = v.insert(Symbol::new(&p), a) {
                if prev != a {
                    return Err(Error::parse(
                        l,
                        c,
                        format!("`{p}` declared with arities {prev} and {a}"),
                    ));
                }
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(&Tok::Semi)?;
        Ok(v)
    }

    fn ops(&mut self) -> Result<BTreeSet<Symbol>> {
        let mut ops = BTreeSet::new();
        if self.eat(&Tok::Semi) {
            return Ok(ops);
        }
        loop {
            ops.insert(Symbol::new(&self.name("operation")?));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(&Tok::Semi)?;
        Ok(ops)
    }

    fn kb(&mut self, kind: LogicKind) -> Result<Kb> {
        self.expect(&Tok::LBrace)?;
        let mut facts = BTreeSet::new();
        let mut rules = Vec::new();
        let mut axioms = Vec::new();
        while !self.eat(&Tok::RBrace) {
            match kind {
                LogicKind::Identity => {
                    facts.insert(self.ground_atom()?);
                    self.expect(&Tok::Dot)?;
                }
                LogicKind::Datalog | LogicKind::NormalLp => match self.rule()? {
                    Statement::Fact(f) => {
                        facts.insert(f);
                    }
                    Statement::Rule(r) => rules.push(r),
                },
                LogicKind::El => {
                    let assertion = matches!(self.peek(), Tok::Word(w) if !CONCEPT_KEYWORDS.contains(&w.as_str()))
                        && matches!(self.peek_at(1), Tok::LParen | Tok::Dot);
                    if assertion {
                        facts.insert(self.ground_atom()?);
                    } else {
                        axioms.push(self.axiom()?);
                    }
                    self.expect(&Tok::Dot)?;
                }
            }
        }
        Ok(match kind {
            LogicKind::Identity => Kb::from_facts(facts),
            LogicKind::Datalog | LogicKind::NormalLp if !rules.is_empty() => {
                Kb::with_program(facts, Program::new(rules))
            }
            LogicKind::Datalog | LogicKind::NormalLp => Kb::from_facts(facts),
            LogicKind::El if !axioms.is_empty() => Kb::with_ontology(facts, Ontology::new(axioms)),
            LogicKind::El => Kb::from_facts(facts),
        })
    }

    /// `H.`, `H <- B1, not B2.` or `H <- .` (a rule with an empty body).
    fn rule(&mut self) -> Result<Statement> {
        let (l, c) = self.here();
        let head = self.atom()?;
        if self.eat(&Tok::Dot) {
            return match head.as_ground() {
                Some(f) => Ok(Statement::Fact(f)),
                None => Err(Error::parse(l, c, format!("fact `{head}` must be ground"))),
            };
        }
        self.expect(&Tok::Arrow)?;
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        if !self.eat(&Tok::Dot) {
            loop {
                if self.negation() {
                    negative.push(self.atom()?);
                } else {
                    positive.push(self.atom()?);
                }
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::Dot)?;
        }
        Ok(Statement::Rule(Rule::new(head, positive, negative)))
    }

    fn axiom(&mut self) -> Result<Axiom> {
        let lhs = self.concept()?;
        if self.is_word("sub") {
            self.advance();
            Ok(Axiom::Sub(lhs, self.concept()?))
        } else if self.is_word("equiv") {
            self.advance();
            Ok(Axiom::Equiv(lhs, self.concept()?))
        } else {
            self.error(format!("expected `sub` or `equiv`, found {}", self.peek().describe()))
        }
    }

    fn concept(&mut self) -> Result<Concept> {
        let first = self.unary_concept()?;
        if !self.is_word("and") {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.is_word("and") {
            self.advance();
            parts.push(self.unary_concept()?);
        }
        Ok(Concept::And(parts))
    }

    fn unary_concept(&mut self) -> Result<Concept> {
        match self.peek().clone() {
            Tok::Word(w) if w == "some" => {
                self.advance();
                let role = self.concept_name("role name")?;
                Ok(Concept::Exists(Symbol::new(&role), Box::new(self.unary_concept()?)))
            }
            Tok::Word(w) if w == "top" => {
                self.advance();
                Ok(Concept::Top)
            }
            Tok::Word(w) if w == "bot" => {
                self.advance();
                Ok(Concept::Bottom)
            }
            Tok::LBrace => {
                self.advance();
                let o = match self.term()? {
                    Term::Const(c) => c,
                    Term::Var(v) => return self.error(format!("`{v}` reads as a variable; quote nominal individuals")),
                };
                self.expect(&Tok::RBrace)?;
                Ok(Concept::Nominal(o))
            }
            Tok::LParen => {
                self.advance();
                let c = self.concept()?;
                self.expect(&Tok::RParen)?;
                Ok(c)
            }
            Tok::Word(_) => Ok(Concept::Name(Symbol::new(&self.concept_name("concept name")?))),
            other => self.error(format!("expected a concept, found {}", other.describe())),
        }
    }

    fn concept_name(&mut self, what: &str) -> Result<String> {
        let (l, c) = self.here();
        let w = self.name(what)?;
        if CONCEPT_KEYWORDS.contains(&w.as_str()) {
            return Err(Error::parse(l, c, format!("`{w}` is a keyword, not a {what}")));
        }
        Ok(w)
    }

    #[allow(clippy::type_complexity)]
    fn bridge(&mut self) -> Result<Vec<PendingRule>> {
        self.expect(&Tok::LBrace)?;
        let mut rules = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let head = self.head()?;
            let mut body = Vec::new();
            if self.eat(&Tok::Arrow) {
                loop {
                    let negated = self.negation();
                    self.expect(&Tok::LParen)?;
                    let (l, c) = self.here();
                    let r = match self.word("context index or name")? {
                        w if w.chars().all(|c| c.is_ascii_digit()) => match w.parse::<usize>() {
                            Ok(k) if k >= 1 => Ref::Index(k - 1),
                            _ => return Err(Error::parse(l, c, "context indices start at 1")),
                        },
                        w => Ref::Name(w, l, c),
                    };
                    self.expect(&Tok::Colon)?;
                    let atom = self.atom()?;
                    self.expect(&Tok::RParen)?;
                    body.push((r, atom, negated));
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(&Tok::Dot)?;
            rules.push((head, body));
        }
        Ok(rules)
    }

    fn head(&mut self) -> Result<Head> {
        let op = self.name("operation")?;
        self.expect(&Tok::LParen)?;
        let head = if op == "next" {
            let inner = self.name("operation")?;
            self.expect(&Tok::LParen)?;
            let atom = self.atom()?;
            self.expect(&Tok::RParen)?;
            Head {
                op: Symbol::new(&inner),
                atom,
                next: true,
            }
        } else {
            Head {
                op: Symbol::new(&op),
                atom: self.atom()?,
                next: false,
            }
        };
        self.expect(&Tok::RParen)?;
        Ok(head)
    }
}

enum Statement {
    Fact(GroundAtom),
    Rule(Rule),
}

/// Parses a system description. Semantic problems (vocabulary, operations,
/// index ranges) are left to [`crate::kernel::validate::validate`].
pub fn parse_system(text: &str) -> Result<Emcs> {
    Parser::new(text)?.system()
}

pub fn parse_ground_atom(text: &str) -> Result<GroundAtom> {
    let mut p = Parser::new(text)?;
    let a = p.ground_atom()?;
    if p.peek() != &Tok::Eof {
        return p.error(format!("unexpected {} after atom", p.peek().describe()));
    }
    Ok(a)
}
