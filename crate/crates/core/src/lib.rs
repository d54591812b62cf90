//! Multi-agent epistemic planning on Dynamic Epistemic Logic models.
//!
//! The crate provides finite S5 Kripke models with designated worlds, event
//! models with preconditions and literal postconditions, product update,
//! perspective shifts, a formula language with knowledge and common-knowledge
//! operators, bisimulation contraction for duplicate detection, breadth-first
//! synthesis of standard and implicitly coordinated sequential plans, AND-OR
//! synthesis of implicitly coordinated policies, and deterministic generators
//! for benchmark scenarios (letter passing on neighborhood graphs and the
//! restricted Russian card problem).

pub mod action;
pub mod bench;
pub mod bisim;
pub mod error;
pub mod eval;
pub mod formula;
pub mod model;
pub mod parser;
pub mod partition;
pub mod policy;
pub mod random;
pub mod seqplan;
pub mod sig;
pub mod task;
pub mod taskfile;

pub use action::{is_applicable, product_update, Action, EventModel, Postcondition};
pub use bisim::{contract, equivalent, CanonicalState, StateKey};
pub use error::{Error, ParseError, Result};
pub use eval::evaluate;
pub use formula::{plan_formula, Formula, PlanMode};
pub use model::{EpistemicModel, State};
pub use parser::parse_formula;
pub use partition::Partition;
pub use policy::{
    execute, execute_from, find_ic_policy, global_to_joint, joint_to_global, successors,
    validate_policy, ExecutionTrace, GlobalPolicy, JointPolicy, SuccessorKind, ValidationReport,
};
pub use seqplan::{find_plan, search_plan, verify_plan, Plan, SearchOutcome};
pub use sig::{AgentId, PropId, PropSet, Signature};
pub use task::{PlanningTask, TaskAction};
pub use taskfile::{parse_task, serialize_task};
