//! Verification and breadth-first synthesis of sequential plans.
//!
//! A standard plan transition applies an action to the current state; an
//! implicitly coordinated transition first shifts to the owner's perspective,
//! tests applicability there, and updates the shifted state. Searching that
//! transition relation breadth-first finds shortest implicitly coordinated
//! plans; duplicate states are pruned through bisimulation keys.

use std::collections::VecDeque;
use std::fmt;

use rustc_hash::FxHashSet;

use crate::action::{is_applicable_ctx, product_update_ctx};
use crate::bisim::contract;
use crate::error::Result;
use crate::eval::{evaluate, EvalCtx};
use crate::formula::{plan_formula, PlanMode};
use crate::model::State;
use crate::task::PlanningTask;

/// An ordered sequence of action names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan(pub Vec<String>);

impl Plan {
    pub fn empty() -> Self {
        Plan(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn actions(&self) -> &[String] {
        &self.0
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.join(" "))
    }
}

/// Result of a bounded breadth-first search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Plan),
    /// The reachable space was exhausted below the depth bound: no plan exists.
    ProvenNone,
    /// The horizon cut off unexpanded states: existence beyond it is open.
    DepthExhausted,
}

/// Does the sequence satisfy the plan formula of the requested mode on the
/// task's initial state?
pub fn verify_plan(task: &PlanningTask, plan: &Plan, mode: PlanMode) -> Result<bool> {
    let f = plan_formula(task, plan.actions(), mode)?;
    Ok(evaluate(task.initial(), &f))
}

/// Shortest plan within `max_depth`, ties broken by lexicographic action
/// order, or `None` when the search finds no plan.
pub fn find_plan(task: &PlanningTask, mode: PlanMode, max_depth: usize) -> Option<Plan> {
    match search_plan(task, mode, max_depth) {
        SearchOutcome::Found(p) => Some(p),
        _ => None,
    }
}

pub fn search_plan(task: &PlanningTask, mode: PlanMode, max_depth: usize) -> SearchOutcome {
    search_plan_impl(task, mode, max_depth, true)
}

/// Search with duplicate detection optionally disabled; used to check that
/// pruning never changes plan lengths.
pub(crate) fn search_plan_impl(
    task: &PlanningTask,
    mode: PlanMode,
    max_depth: usize,
    dedup: bool,
) -> SearchOutcome {
    struct Node {
        state: State,
        parent: usize,
        action: Option<String>,
        depth: usize,
    }

    let goal = task.goal();
    if evaluate(task.initial(), goal) {
        return SearchOutcome::Found(Plan::empty());
    }

    let mut nodes = vec![Node {
        state: task.initial().clone(),
        parent: usize::MAX,
        action: None,
        depth: 0,
    }];
    let mut visited: FxHashSet<_> = FxHashSet::default();
    visited.insert(contract(task.initial()).key());
    let mut queue = VecDeque::from([0usize]);
    let mut truncated = false;

    while let Some(idx) = queue.pop_front() {
        if nodes[idx].depth == max_depth {
            truncated = true;
            continue;
        }
        for (name, ta) in task.actions() {
            let mut ctx = EvalCtx::default();
            let source = match mode {
                PlanMode::Standard => nodes[idx].state.clone(),
                PlanMode::ImplicitlyCoordinated => {
                    nodes[idx].state.perspective_shift(ta.owner)
                }
            };
            if !is_applicable_ctx(&ta.action, &source, &mut ctx) {
                continue;
            }
            let succ = product_update_ctx(&source, &ta.action, &mut ctx)
                .expect("applicable action leaves designated worlds");
            if dedup && !visited.insert(contract(&succ).key()) {
                continue;
            }
            let depth = nodes[idx].depth + 1;
            let reached_goal = evaluate(&succ, goal);
            nodes.push(Node { state: succ, parent: idx, action: Some(name.to_owned()), depth });
            if reached_goal {
                let mut plan = Vec::new();
                let mut at = nodes.len() - 1;
                while let Some(a) = &nodes[at].action {
                    plan.push(a.clone());
                    at = nodes[at].parent;
                }
                plan.reverse();
                return SearchOutcome::Found(Plan(plan));
            }
            queue.push_back(nodes.len() - 1);
        }
    }

    if truncated {
        SearchOutcome::DepthExhausted
    } else {
        SearchOutcome::ProvenNone
    }
}
