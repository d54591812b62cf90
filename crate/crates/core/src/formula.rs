//! The epistemic language: propositional connectives, per-agent knowledge,
//! common knowledge, and dynamic modalities over actions.
//!
//! `Or`, `Implies`, `Diamond` and `Applied` are abbreviations in the logic;
//! they are kept as explicit nodes so parsed formulas print back exactly, and
//! the evaluator expands them by their defining equivalences.

use std::fmt;
use std::sync::Arc;

use crate::action::Action;
use crate::error::{Error, Result};
use crate::sig::{AgentId, PropId, Signature};
use crate::task::PlanningTask;

#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    Top,
    Bot,
    Atom(PropId),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// K_i φ — agent i knows φ.
    Knows(AgentId, Box<Formula>),
    /// C φ — common knowledge of φ.
    Common(Box<Formula>),
    /// `[a]φ` — after every designated outcome of `a`, φ holds.
    Box(Arc<Action>, Box<Formula>),
    /// `⟨a⟩φ = ¬[a]¬φ`.
    Diamond(Arc<Action>, Box<Formula>),
    /// `⟪a⟫φ = ⟨a⟩⊤ ∧ [a]φ` — `a` is applicable and necessarily leads to φ.
    Applied(Arc<Action>, Box<Formula>),
}

impl Formula {
    // Named after the connective, like the other constructors.
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn knows(i: AgentId, f: Formula) -> Formula {
        Formula::Knows(i, Box::new(f))
    }

    pub fn common(f: Formula) -> Formula {
        Formula::Common(Box::new(f))
    }

    pub fn applied(a: Arc<Action>, f: Formula) -> Formula {
        Formula::Applied(a, Box::new(f))
    }

    /// Right-fold of `&` over the given formulas; `⊤` when empty.
    pub fn conj(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = fs.into_iter().collect::<Vec<_>>().into_iter().rev();
        match it.next() {
            None => Formula::Top,
            Some(last) => it.fold(last, |acc, f| Formula::and(f, acc)),
        }
    }

    /// Right-fold of `|` over the given formulas; `⊥` when empty.
    pub fn disj(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = fs.into_iter().collect::<Vec<_>>().into_iter().rev();
        match it.next() {
            None => Formula::Bot,
            Some(last) => it.fold(last, |acc, f| Formula::or(f, acc)),
        }
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> FormulaDisplay<'a> {
        FormulaDisplay { f: self, sig }
    }
}

/// How a sequential plan is read as a single verification formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanMode {
    /// ⟪a₁⟫…⟪aₙ⟫γ — each step applicable and leading onward.
    Standard,
    /// K_{ω(a₁)}⟪a₁⟫…K_{ω(aₙ)}⟪aₙ⟫γ — each owner knows their step works.
    ImplicitlyCoordinated,
}

/// Builds the formula whose truth at the initial state says "this action
/// sequence is a plan". The empty sequence yields the goal itself.
pub fn plan_formula(task: &PlanningTask, plan: &[String], mode: PlanMode) -> Result<Formula> {
    let mut f = task.goal().clone();
    for name in plan.iter().rev() {
        let ta = task.action(name)?;
        f = Formula::applied(Arc::clone(&ta.action), f);
        if mode == PlanMode::ImplicitlyCoordinated {
            f = Formula::knows(ta.owner, f);
        }
    }
    Ok(f)
}

// Precedence levels for printing: implication binds loosest, then `|`, `&`,
// and the prefix operators.
const LVL_IMPLIES: u8 = 1;
const LVL_OR: u8 = 2;
const LVL_AND: u8 = 3;
const LVL_PREFIX: u8 = 4;

pub struct FormulaDisplay<'a> {
    f: &'a Formula,
    sig: &'a Signature,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self.f, self.sig, 0)
    }
}

fn write_formula(
    out: &mut fmt::Formatter<'_>,
    f: &Formula,
    sig: &Signature,
    min_level: u8,
) -> fmt::Result {
    let level = match f {
        Formula::Implies(..) => LVL_IMPLIES,
        Formula::Or(..) => LVL_OR,
        Formula::And(..) => LVL_AND,
        _ => LVL_PREFIX,
    };
    let parens = level < min_level;
    if parens {
        write!(out, "(")?;
    }
    match f {
        Formula::Top => write!(out, "true")?,
        Formula::Bot => write!(out, "false")?,
        Formula::Atom(p) => write!(out, "{}", sig.prop_name(*p))?,
        Formula::Not(g) => {
            write!(out, "!")?;
            write_formula(out, g, sig, LVL_PREFIX)?;
        }
        Formula::And(a, b) => {
            // Left-associative: a nested right `&` needs parentheses.
            write_formula(out, a, sig, LVL_AND)?;
            write!(out, " & ")?;
            write_formula(out, b, sig, LVL_AND + 1)?;
        }
        Formula::Or(a, b) => {
            write_formula(out, a, sig, LVL_OR)?;
            write!(out, " | ")?;
            write_formula(out, b, sig, LVL_OR + 1)?;
        }
        Formula::Implies(a, b) => {
            // Right-associative.
            write_formula(out, a, sig, LVL_IMPLIES + 1)?;
            write!(out, " -> ")?;
            write_formula(out, b, sig, LVL_IMPLIES)?;
        }
        Formula::Knows(i, g) => {
            write!(out, "K[{}] ", sig.agent_name(*i))?;
            write_formula(out, g, sig, LVL_PREFIX)?;
        }
        Formula::Common(g) => {
            write!(out, "C ")?;
            write_formula(out, g, sig, LVL_PREFIX)?;
        }
        Formula::Box(a, g) => {
            write!(out, "[{}] ", a.name())?;
            write_formula(out, g, sig, LVL_PREFIX)?;
        }
        Formula::Diamond(a, g) => {
            write!(out, "<{}> ", a.name())?;
            write_formula(out, g, sig, LVL_PREFIX)?;
        }
        Formula::Applied(a, g) => {
            write!(out, "<<{}>> ", a.name())?;
            write_formula(out, g, sig, LVL_PREFIX)?;
        }
    }
    if parens {
        write!(out, ")")?;
    }
    Ok(())
}

/// Checks that every identifier in the formula is resolvable in `sig`.
/// Formulas built through `Signature` lookups always pass; this guards
/// formulas carried across tasks.
pub fn validate_formula(f: &Formula, sig: &Signature) -> Result<()> {
    match f {
        Formula::Top | Formula::Bot => Ok(()),
        Formula::Atom(p) => {
            if p.index() < sig.num_props() {
                Ok(())
            } else {
                Err(Error::UnknownProp(format!("#{}", p.0)))
            }
        }
        Formula::Not(g) | Formula::Common(g) => validate_formula(g, sig),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            validate_formula(a, sig)?;
            validate_formula(b, sig)
        }
        Formula::Knows(i, g) => {
            if i.index() >= sig.num_agents() {
                return Err(Error::UnknownAgent(format!("#{}", i.0)));
            }
            validate_formula(g, sig)
        }
        Formula::Box(a, g) | Formula::Diamond(a, g) | Formula::Applied(a, g) => {
            if a.sig().as_ref() != sig {
                return Err(Error::SignatureMismatch("dynamic modality"));
            }
            validate_formula(g, sig)
        }
    }
}
