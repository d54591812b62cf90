//! Joint and global policies, strong-policy validation under centralized and
//! perspective-sensitive successor functions, AND-OR synthesis of implicitly
//! coordinated policies, and decentralized execution traces.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::action::{is_applicable, product_update};
use crate::bisim::{contract, StateKey};
use crate::error::{Error, ParseError, Result};
use crate::eval::evaluate;
use crate::model::State;
use crate::sig::AgentId;
use crate::task::PlanningTask;

/// Which states count as possible outcomes of applying an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuccessorKind {
    /// Globals of s ⊗ a: what can actually happen.
    Centralized,
    /// Globals of s^ω(a) ⊗ a: what the owner considers possible.
    PerspectiveSensitive,
}

/// Successor global states of applying `action` in the global state `state`.
pub fn successors(
    task: &PlanningTask,
    state: &State,
    action: &str,
    kind: SuccessorKind,
) -> Result<Vec<State>> {
    if !state.is_global() {
        return Err(Error::NotGlobal);
    }
    let ta = task.action(action)?;
    let source = match kind {
        SuccessorKind::Centralized => state.clone(),
        SuccessorKind::PerspectiveSensitive => state.perspective_shift(ta.owner),
    };
    Ok(product_update(&source, &ta.action)?.globals())
}

/// One policy row: a retained representative of the canonical global state
/// and the actions assigned there.
#[derive(Debug, Clone)]
pub struct PolicyEntry {
    pub state: State,
    pub actions: BTreeSet<String>,
}

/// Global policy: canonical global-state keys to non-empty action sets.
#[derive(Debug, Clone, Default)]
pub struct GlobalPolicy {
    entries: BTreeMap<StateKey, PolicyEntry>,
}

impl PartialEq for GlobalPolicy {
    fn eq(&self, other: &Self) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(other.entries.iter())
                .all(|((k, e), (k2, e2))| k == k2 && e.actions == e2.actions)
    }
}

impl GlobalPolicy {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assigns an action to the canonical class of a global state.
    pub fn insert(&mut self, state: &State, action: impl Into<String>) -> Result<()> {
        if !state.is_global() {
            return Err(Error::NotGlobal);
        }
        let c = contract(state);
        self.entries
            .entry(c.key())
            .or_insert_with(|| PolicyEntry { state: c.state().clone(), actions: BTreeSet::new() })
            .actions
            .insert(action.into());
        Ok(())
    }

    pub fn remove(&mut self, key: &StateKey) -> Option<PolicyEntry> {
        self.entries.remove(key)
    }

    pub fn get(&self, key: &StateKey) -> Option<&PolicyEntry> {
        self.entries.get(key)
    }

    /// Actions assigned to the class of `state`, empty when undefined.
    pub fn actions_at(&self, state: &State) -> BTreeSet<String> {
        self.get(&contract(state).key()).map(|e| e.actions.clone()).unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&StateKey, &PolicyEntry)> {
        self.entries.iter()
    }
}

/// Per-agent partial functions from minimal local states to owned actions.
#[derive(Debug, Clone, Default)]
pub struct JointPolicy {
    maps: BTreeMap<AgentId, BTreeMap<StateKey, JointEntry>>,
}

#[derive(Debug, Clone)]
pub struct JointEntry {
    pub state: State,
    pub action: String,
}

impl JointPolicy {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds π_i(local) = action, checking ownership, locality and
    /// applicability in the local state.
    pub fn insert(
        &mut self,
        task: &PlanningTask,
        agent: AgentId,
        local: &State,
        action: impl Into<String>,
    ) -> Result<()> {
        let action = action.into();
        let ta = task.action(&action)?;
        if ta.owner != agent {
            return Err(Error::InvalidPolicy(format!(
                "action `{action}` is not owned by `{}`",
                task.sig().agent_name(agent)
            )));
        }
        if !local.is_local_for(agent) {
            return Err(Error::InvalidPolicy(format!(
                "state is not local for `{}`",
                task.sig().agent_name(agent)
            )));
        }
        if !is_applicable(&ta.action, local) {
            return Err(Error::InvalidPolicy(format!(
                "action `{action}` is not applicable in the given local state"
            )));
        }
        let c = contract(local);
        let map = self.maps.entry(agent).or_default();
        if let Some(existing) = map.get(&c.key()) {
            if existing.action != action {
                return Err(Error::InvalidPolicy(format!(
                    "conflicting assignments `{}` and `{action}` for one local state",
                    existing.action
                )));
            }
            return Ok(());
        }
        map.insert(c.key(), JointEntry { state: c.state().clone(), action });
        Ok(())
    }

    pub fn get(&self, agent: AgentId, key: &StateKey) -> Option<&JointEntry> {
        self.maps.get(&agent).and_then(|m| m.get(key))
    }

    pub fn agent_entries(
        &self,
        agent: AgentId,
    ) -> impl Iterator<Item = (&StateKey, &JointEntry)> {
        self.maps.get(&agent).into_iter().flat_map(|m| m.iter())
    }

    pub fn len(&self) -> usize {
        self.maps.values().map(|m| m.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// π(s) = { π_i(sⁱ) : defined }. The induced policy is total over global
/// states, so the given domain is closed under the globals of every assigned
/// perspective class before restricting: whenever π_i assigns an action at
/// sⁱ, every global the owner cannot tell apart from s receives it too,
/// which is what makes uniformity hold on the result.
pub fn joint_to_global(
    task: &PlanningTask,
    jp: &JointPolicy,
    domain: &[State],
) -> Result<GlobalPolicy> {
    let mut gp = GlobalPolicy::new();
    let mut queue: Vec<State> = Vec::new();
    for s in domain {
        if !s.is_global() {
            return Err(Error::NotGlobal);
        }
        queue.push(s.clone());
    }
    let mut seen: BTreeSet<StateKey> = BTreeSet::new();
    while let Some(s) = queue.pop() {
        if !seen.insert(contract(&s).key()) {
            continue;
        }
        for i in task.sig().agents() {
            let shifted = s.perspective_shift(i);
            let class = contract(&shifted);
            if let Some(entry) = jp.get(i, &class.key()) {
                gp.insert(&s, entry.action.clone())?;
                queue.extend(shifted.globals());
            }
        }
    }
    Ok(gp)
}

/// Recovers the per-agent partial functions from a global policy satisfying
/// the knowledge-of-preconditions, determinism and uniformity constraints.
pub fn global_to_joint(task: &PlanningTask, gp: &GlobalPolicy) -> Result<JointPolicy> {
    let violations = constraint_violations(task, gp);
    if let Some(v) = violations.first() {
        return Err(Error::InvalidPolicy(v.to_string()));
    }
    let mut jp = JointPolicy::new();
    for (_, entry) in gp.entries() {
        for action in &entry.actions {
            let owner = task.owner(action)?;
            let local = entry.state.perspective_shift(owner);
            jp.insert(task, owner, &local, action.clone())?;
        }
    }
    Ok(jp)
}

/// A constraint or strong-policy violation, with witness state keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownAction { state: StateKey, action: String },
    /// The owner cannot verify applicability from their perspective.
    Kop { state: StateKey, action: String },
    /// Two distinct actions of one owner at the same state.
    Det { state: StateKey, first: String, second: String },
    /// A state indistinguishable to the owner lacks the same assignment.
    Unif { state: StateKey, sibling: StateKey, action: String },
    /// An initial global state is neither a goal state nor assigned.
    Foundedness { state: StateKey },
    /// A successor under the policy is neither a goal state nor assigned.
    Closedness { from: StateKey, action: String, state: StateKey },
    /// Following the policy can revisit a state, so some execution never
    /// terminates. In the literal update semantics every successor is a
    /// fresh state and finiteness rules this out; with states identified up
    /// to bisimulation it has to be checked.
    Cycle { state: StateKey },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownAction { state, action } => {
                write!(f, "unknown action `{action}` assigned at {}", state.short())
            }
            Violation::Kop { state, action } => write!(
                f,
                "kop: `{action}` not applicable from its owner's perspective at {}",
                state.short()
            ),
            Violation::Det { state, first, second } => write!(
                f,
                "det: owner has two actions `{first}`, `{second}` at {}",
                state.short()
            ),
            Violation::Unif { state, sibling, action } => write!(
                f,
                "unif: `{action}` at {} but not at owner-indistinguishable {}",
                state.short(),
                sibling.short()
            ),
            Violation::Foundedness { state } => {
                write!(f, "foundedness: initial global {} unassigned and not a goal", state.short())
            }
            Violation::Closedness { from, action, state } => write!(
                f,
                "closedness: successor {} of `{action}` from {} unassigned and not a goal",
                state.short(),
                from.short()
            ),
            Violation::Cycle { state } => {
                write!(f, "cycle: following the policy revisits {}", state.short())
            }
        }
    }
}

/// Outcome of validating a policy against a task.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// Number of policy entries (finiteness is immediate for in-memory
    /// policies and reported for completeness).
    pub entries: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            write!(f, "valid ({} entries)", self.entries)
        } else {
            writeln!(f, "invalid ({} entries):", self.entries)?;
            for v in &self.violations {
                writeln!(f, "  {v}")?;
            }
            Ok(())
        }
    }
}

/// Knowledge-of-preconditions, per-agent determinism and uniformity checks.
fn constraint_violations(task: &PlanningTask, gp: &GlobalPolicy) -> Vec<Violation> {
    let mut violations = Vec::new();
    for (key, entry) in gp.entries() {
        let mut by_owner: BTreeMap<AgentId, &String> = BTreeMap::new();
        for action in &entry.actions {
            let Ok(ta) = task.action(action) else {
                violations.push(Violation::UnknownAction { state: *key, action: action.clone() });
                continue;
            };
            if let Some(first) = by_owner.insert(ta.owner, action) {
                violations.push(Violation::Det {
                    state: *key,
                    first: first.clone(),
                    second: action.clone(),
                });
            }
            let shifted = entry.state.perspective_shift(ta.owner);
            if !is_applicable(&ta.action, &shifted) {
                violations.push(Violation::Kop { state: *key, action: action.clone() });
            }
            // Uniformity over all globals of the owner's perspective: they
            // are exactly the states the owner cannot tell apart from here.
            for sibling in shifted.globals() {
                let sk = contract(&sibling).key();
                let ok = gp.get(&sk).is_some_and(|e| e.actions.contains(action));
                if !ok {
                    violations.push(Violation::Unif {
                        state: *key,
                        sibling: sk,
                        action: action.clone(),
                    });
                }
            }
        }
    }
    violations
}

/// Full strong-policy validation: constraint checks plus foundedness and
/// closedness under the chosen successor function. Violations are data, not
/// errors.
pub fn validate_policy(
    task: &PlanningTask,
    gp: &GlobalPolicy,
    kind: SuccessorKind,
) -> ValidationReport {
    let mut violations = constraint_violations(task, gp);
    let goal = task.goal();

    for s in task.initial().globals() {
        let key = contract(&s).key();
        let assigned = gp.get(&key).is_some_and(|e| !e.actions.is_empty());
        if !assigned && !evaluate(&s, goal) {
            violations.push(Violation::Foundedness { state: key });
        }
    }

    for (key, entry) in gp.entries() {
        for action in &entry.actions {
            let Ok(succs) = successors(task, &entry.state, action, kind) else {
                // Inapplicability is already reported as a kop violation.
                continue;
            };
            for succ in succs {
                let sk = contract(&succ).key();
                let assigned = gp.get(&sk).is_some_and(|e| !e.actions.is_empty());
                if !assigned && !evaluate(&succ, goal) {
                    violations.push(Violation::Closedness {
                        from: *key,
                        action: action.clone(),
                        state: sk,
                    });
                }
            }
        }
    }

    // Depth-first pass over the policy graph for cycles.
    let mut color: BTreeMap<StateKey, u8> = BTreeMap::new(); // 1 on stack, 2 done
    let mut stack: Vec<(StateKey, bool)> = Vec::new();
    for s in task.initial().globals() {
        stack.push((contract(&s).key(), false));
        while let Some((key, leaving)) = stack.pop() {
            if leaving {
                color.insert(key, 2);
                continue;
            }
            match color.get(&key) {
                Some(1) => {
                    violations.push(Violation::Cycle { state: key });
                    continue;
                }
                Some(_) => continue,
                None => {}
            }
            color.insert(key, 1);
            stack.push((key, true));
            let Some(entry) = gp.get(&key) else { continue };
            if evaluate(&entry.state, goal) {
                continue;
            }
            for action in &entry.actions {
                let Ok(succs) = successors(task, &entry.state, action, kind) else { continue };
                for succ in succs {
                    stack.push((contract(&succ).key(), false));
                }
            }
        }
    }

    ValidationReport { entries: gp.len(), violations }
}

struct OrChoice {
    action: String,
    owner: AgentId,
    class_key: StateKey,
    class_state: State,
    and_set: Vec<usize>,
}

struct AndOrNode {
    state: State,
    key: StateKey,
    is_goal: bool,
    choices: Vec<OrChoice>,
}

/// AND-OR synthesis of an implicitly coordinated strong policy.
///
/// The reachable graph under the perspective-sensitive successor function is
/// expanded with bisimulation dedup, then solved by computing for every state
/// the least worst-case distance-to-goal (an unsolvable state keeps infinite
/// cost, which also handles cycles in the contracted graph). Assignments are
/// made per owner perspective class, so uniformity holds structurally; every
/// global of an assigned class receives the class action.
///
/// Returns `Ok(None)` when the fully explored graph proves no policy exists,
/// and `Err(ResourceLimit)` when `max_nodes` was hit first. Total worlds
/// across interned states are capped at 16 times `max_nodes`, so
/// tasks whose product models balloon also stop with a resource error
/// instead of thrashing.
pub fn find_ic_policy(task: &PlanningTask, max_nodes: usize) -> Result<Option<GlobalPolicy>> {
    if max_nodes == 0 {
        return Err(Error::InvalidParams("max_nodes must be at least 1".into()));
    }
    let world_budget = max_nodes.saturating_mul(16);
    let goal = task.goal();
    let mut nodes: Vec<AndOrNode> = Vec::new();
    let mut index: FxHashMap<StateKey, usize> = FxHashMap::default();
    let mut worlds_used = 0usize;

    let intern = |state: &State,
                  nodes: &mut Vec<AndOrNode>,
                  index: &mut FxHashMap<StateKey, usize>,
                  worlds_used: &mut usize|
     -> usize {
        let c = contract(state);
        if let Some(&i) = index.get(&c.key()) {
            return i;
        }
        let i = nodes.len();
        let is_goal = evaluate(c.state(), goal);
        *worlds_used += c.state().model().num_worlds();
        nodes.push(AndOrNode { state: c.state().clone(), key: c.key(), is_goal, choices: Vec::new() });
        index.insert(c.key(), i);
        i
    };

    let initial: Vec<usize> = task
        .initial()
        .globals()
        .iter()
        .map(|g| intern(g, &mut nodes, &mut index, &mut worlds_used))
        .collect();

    // Forward expansion of the full perspective-sensitive AND-OR graph.
    let mut cursor = 0;
    while cursor < nodes.len() {
        if nodes.len() > max_nodes || worlds_used > world_budget {
            return Err(Error::ResourceLimit(nodes.len()));
        }
        if nodes[cursor].is_goal {
            cursor += 1;
            continue;
        }
        let state = nodes[cursor].state.clone();
        let mut choices = Vec::new();
        for (name, ta) in task.actions() {
            let shifted = state.perspective_shift(ta.owner);
            // Bail out before building a product that would bust the budget.
            let product_size =
                shifted.model().num_worlds() * ta.action.model().num_events();
            if worlds_used.saturating_add(product_size) > world_budget {
                return Err(Error::ResourceLimit(nodes.len()));
            }
            if !is_applicable(&ta.action, &shifted) {
                continue;
            }
            let updated = product_update(&shifted, &ta.action)
                .expect("applicable action leaves designated worlds");
            let and_set: Vec<usize> = updated
                .globals()
                .iter()
                .map(|g| intern(g, &mut nodes, &mut index, &mut worlds_used))
                .collect();
            choices.push(OrChoice {
                action: name.to_owned(),
                owner: ta.owner,
                class_key: contract(&shifted).key(),
                class_state: shifted,
                and_set,
            });
        }
        nodes[cursor].choices = choices;
        cursor += 1;
    }

    // Least fixpoint of cost(s) = min over actions of 1 + max successor cost.
    const INF: u64 = u64::MAX;
    let mut cost: Vec<u64> = nodes.iter().map(|n| if n.is_goal { 0 } else { INF }).collect();
    loop {
        let mut changed = false;
        for (i, node) in nodes.iter().enumerate() {
            if node.is_goal {
                continue;
            }
            let best = node
                .choices
                .iter()
                .map(|c| {
                    c.and_set
                        .iter()
                        .map(|&s| cost[s])
                        .max()
                        .unwrap_or(0)
                        .saturating_add(1)
                })
                .min()
                .unwrap_or(INF);
            if best < cost[i] {
                cost[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    if initial.iter().any(|&i| cost[i] == INF) {
        return Ok(None);
    }

    // Extraction: cover every policy-reachable non-goal state with the
    // cheapest choice; assignments are keyed by (owner, perspective class)
    // and propagate to every global of the class.
    let mut gp = GlobalPolicy::new();
    let mut assigned: BTreeSet<(AgentId, StateKey)> = BTreeSet::new();
    let mut stack: Vec<usize> = initial.iter().copied().filter(|&i| !nodes[i].is_goal).collect();
    while let Some(i) = stack.pop() {
        if gp.get(&nodes[i].key).is_some() {
            continue;
        }
        let node = &nodes[i];
        let best = node
            .choices
            .iter()
            .filter(|c| c.and_set.iter().all(|&s| cost[s] != INF))
            .min_by_key(|c| {
                let worst = c.and_set.iter().map(|&s| cost[s]).max().unwrap_or(0) + 1;
                (worst, c.action.clone())
            })
            .expect("finite cost implies a usable choice");
        if assigned.insert((best.owner, best.class_key)) {
            for sibling in best.class_state.globals() {
                gp.insert(&sibling, best.action.clone())?;
            }
            for &s in &best.and_set {
                if !nodes[s].is_goal {
                    stack.push(s);
                }
            }
        }
    }

    #[cfg(debug_assertions)]
    {
        let report = validate_policy(task, &gp, SuccessorKind::PerspectiveSensitive);
        debug_assert!(report.is_valid(), "synthesized policy failed validation: {report}");
    }
    Ok(Some(gp))
}

/// Outcome flag of a policy execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceOutcome {
    GoalReached,
    /// A non-goal state with no assignment was reached; cannot occur when the
    /// executed policy is valid.
    Stuck,
}

#[derive(Debug, Clone)]
pub struct TraceStep {
    /// State the action was taken in.
    pub from: StateKey,
    pub agent: String,
    pub action: String,
    /// State reached by the centralized outcome.
    pub to: StateKey,
}

#[derive(Debug, Clone)]
pub struct ExecutionTrace {
    pub initial: StateKey,
    pub steps: Vec<TraceStep>,
    pub outcome: TraceOutcome,
}

impl fmt::Display for ExecutionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "initial state={}", self.initial)?;
        for (n, step) in self.steps.iter().enumerate() {
            writeln!(
                f,
                "step {}: agent={} action={} -> state={}",
                n + 1,
                step.agent,
                step.action,
                step.to
            )?;
        }
        match self.outcome {
            TraceOutcome::GoalReached => write!(f, "outcome: goal-reached"),
            TraceOutcome::Stuck => write!(f, "outcome: stuck"),
        }
    }
}

/// Executes a policy from a chooser-selected global of the initial state.
/// Actual outcomes are centralized; the seed drives every choice.
pub fn execute(task: &PlanningTask, gp: &GlobalPolicy, seed: u64) -> Result<ExecutionTrace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let globals = task.initial().globals();
    let start = &globals[rng.random_range(0..globals.len())];
    execute_with_rng(task, gp, start, &mut rng)
}

/// Executes a policy from a specific global state of the task's model.
pub fn execute_from(
    task: &PlanningTask,
    gp: &GlobalPolicy,
    start: &State,
    seed: u64,
) -> Result<ExecutionTrace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    execute_with_rng(task, gp, start, &mut rng)
}

fn execute_with_rng(
    task: &PlanningTask,
    gp: &GlobalPolicy,
    start: &State,
    rng: &mut ChaCha8Rng,
) -> Result<ExecutionTrace> {
    if !start.is_global() {
        return Err(Error::NotGlobal);
    }
    let goal = task.goal();
    let mut current = contract(start);
    let initial = current.key();
    let mut seen = BTreeSet::from([initial]);
    let mut steps = Vec::new();
    loop {
        if evaluate(current.state(), goal) {
            return Ok(ExecutionTrace { initial, steps, outcome: TraceOutcome::GoalReached });
        }
        let Some(entry) = gp.get(&current.key()) else {
            return Ok(ExecutionTrace { initial, steps, outcome: TraceOutcome::Stuck });
        };
        let actions: Vec<&String> = entry.actions.iter().collect();
        let action = actions[rng.random_range(0..actions.len())].clone();
        let owner = task.owner(&action)?;
        let succs = successors(task, current.state(), &action, SuccessorKind::Centralized)?;
        let next = contract(&succs[rng.random_range(0..succs.len())]);
        // Fresh world provenance makes valid executions acyclic.
        if !seen.insert(next.key()) {
            return Err(Error::InvalidPolicy(format!(
                "execution revisited state {}",
                next.key().short()
            )));
        }
        steps.push(TraceStep {
            from: current.key(),
            agent: task.sig().agent_name(owner).to_owned(),
            action,
            to: next.key(),
        });
        current = next;
    }
}

/// Length (in actions) of the longest execution of `gp`, over all initial
/// globals, all assigned actions and all centralized outcomes. Errors if an
/// execution can get stuck or loop.
pub fn worst_case_trace_len(task: &PlanningTask, gp: &GlobalPolicy) -> Result<usize> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        InProgress,
        Done(usize),
    }

    fn go(
        task: &PlanningTask,
        gp: &GlobalPolicy,
        state: &State,
        memo: &mut BTreeMap<StateKey, Mark>,
    ) -> Result<usize> {
        let c = contract(state);
        match memo.get(&c.key()) {
            Some(Mark::Done(n)) => return Ok(*n),
            Some(Mark::InProgress) => {
                return Err(Error::InvalidPolicy("cyclic execution graph".into()))
            }
            None => {}
        }
        if evaluate(c.state(), task.goal()) {
            memo.insert(c.key(), Mark::Done(0));
            return Ok(0);
        }
        let Some(entry) = gp.get(&c.key()) else {
            return Err(Error::Stuck(c.key().short()));
        };
        memo.insert(c.key(), Mark::InProgress);
        let mut worst = 0usize;
        let actions = entry.actions.clone();
        let rep = entry.state.clone();
        for action in &actions {
            for succ in successors(task, &rep, action, SuccessorKind::Centralized)? {
                worst = worst.max(1 + go(task, gp, &succ, memo)?);
            }
        }
        memo.insert(c.key(), Mark::Done(worst));
        Ok(worst)
    }

    let mut memo = BTreeMap::new();
    let mut worst = 0;
    for g in task.initial().globals() {
        worst = worst.max(go(task, gp, &g, &mut memo)?);
    }
    Ok(worst)
}

/// Serializes a policy: a header with the task hash, then one line per entry,
/// `<state-key-hex> : <action>[, <action>]*`, in key order.
pub fn serialize_policy(gp: &GlobalPolicy, task_hash: &str) -> String {
    let mut out = String::new();
    out.push_str("# implicitly coordinated policy\n");
    out.push_str(&format!("# task-hash: {task_hash}\n"));
    for (key, entry) in gp.entries() {
        let actions: Vec<&str> = entry.actions.iter().map(String::as_str).collect();
        out.push_str(&format!("{key} : {}\n", actions.join(", ")));
    }
    out
}

/// A policy parsed from text: keys and action names, with no bound states.
#[derive(Debug, Clone, Default)]
pub struct PolicyFile {
    pub task_hash: Option<String>,
    pub entries: BTreeMap<StateKey, BTreeSet<String>>,
}

pub fn parse_policy(text: &str) -> Result<PolicyFile> {
    let mut file = PolicyFile::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(hash) = comment.trim().strip_prefix("task-hash:") {
                file.task_hash = Some(hash.trim().to_owned());
            }
            continue;
        }
        let Some((key_text, actions_text)) = line.split_once(':') else {
            return Err(ParseError::new(lineno as u32 + 1, 1, "expected `<key> : <actions>`").into());
        };
        let key: StateKey = key_text.trim().parse().map_err(|_| {
            ParseError::new(lineno as u32 + 1, 1, format!("malformed state key `{}`", key_text.trim()))
        })?;
        let actions: BTreeSet<String> = actions_text
            .split(',')
            .map(|a| a.trim().to_owned())
            .filter(|a| !a.is_empty())
            .collect();
        if actions.is_empty() {
            return Err(ParseError::new(lineno as u32 + 1, 1, "entry with no actions").into());
        }
        file.entries.insert(key, actions);
    }
    Ok(file)
}

/// Rebinds representative states to the entries of a parsed policy by
/// exploring forward from the initial state under the given successor
/// function. Returns the bound policy and the keys that were never reached
/// (those cannot be checked against the task from text alone).
pub fn resolve_policy(
    task: &PlanningTask,
    file: &PolicyFile,
    kind: SuccessorKind,
) -> Result<(GlobalPolicy, Vec<StateKey>)> {
    let mut gp = GlobalPolicy::new();
    let mut frontier: Vec<State> = task.initial().globals();
    let mut seen: BTreeSet<StateKey> = BTreeSet::new();
    while let Some(state) = frontier.pop() {
        let c = contract(&state);
        if !seen.insert(c.key()) {
            continue;
        }
        let Some(actions) = file.entries.get(&c.key()) else {
            continue;
        };
        for action in actions {
            gp.insert(c.state(), action.clone())?;
            if task.action(action).is_err() {
                continue;
            }
            if let Ok(succs) = successors(task, c.state(), action, kind) {
                frontier.extend(succs);
            }
        }
    }
    let unreached: Vec<StateKey> =
        file.entries.keys().filter(|k| gp.get(k).is_none()).copied().collect();
    Ok((gp, unreached))
}
