//! Cooperative planning tasks: an initial state, a named action set, an owner
//! function and a goal formula. Every action must be local for its owner.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::action::Action;
use crate::error::{Error, Result};
use crate::formula::{validate_formula, Formula};
use crate::model::State;
use crate::sig::{AgentId, Signature};

/// An action together with the agent who executes it.
#[derive(Debug, Clone)]
pub struct TaskAction {
    pub action: Arc<Action>,
    pub owner: AgentId,
}

#[derive(Debug, Clone)]
pub struct PlanningTask {
    sig: Arc<Signature>,
    initial: State,
    /// Keyed by action name; iteration order is the lexicographic tie-break
    /// used throughout search.
    actions: BTreeMap<String, TaskAction>,
    goal: Formula,
}

impl PlanningTask {
    pub fn new(
        initial: State,
        actions: impl IntoIterator<Item = (Action, AgentId)>,
        goal: Formula,
    ) -> Result<Self> {
        let sig = Arc::clone(initial.sig());
        let mut map = BTreeMap::new();
        for (action, owner) in actions {
            if !Arc::ptr_eq(action.sig(), &sig) && action.sig().as_ref() != sig.as_ref() {
                return Err(Error::SignatureMismatch("action"));
            }
            if owner.index() >= sig.num_agents() {
                return Err(Error::UnknownAgent(format!("#{}", owner.0)));
            }
            if !action.is_local_for(owner) {
                return Err(Error::NotLocalForOwner {
                    action: action.name().to_owned(),
                    owner: sig.agent_name(owner).to_owned(),
                });
            }
            let name = action.name().to_owned();
            if map
                .insert(name.clone(), TaskAction { action: Arc::new(action), owner })
                .is_some()
            {
                return Err(Error::Duplicate { what: "action", name });
            }
        }
        validate_formula(&goal, &sig)?;
        Ok(PlanningTask { sig, initial, actions: map, goal })
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn initial(&self) -> &State {
        &self.initial
    }

    pub fn goal(&self) -> &Formula {
        &self.goal
    }

    pub fn action(&self, name: &str) -> Result<&TaskAction> {
        self.actions.get(name).ok_or_else(|| Error::UnknownAction(name.to_owned()))
    }

    pub fn owner(&self, name: &str) -> Result<AgentId> {
        Ok(self.action(name)?.owner)
    }

    /// Actions in name order.
    pub fn actions(&self) -> impl Iterator<Item = (&str, &TaskAction)> {
        self.actions.iter().map(|(n, a)| (n.as_str(), a))
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    /// Π(s): the same task posed from a different state.
    pub fn with_initial(&self, s: State) -> PlanningTask {
        PlanningTask {
            sig: Arc::clone(&self.sig),
            initial: s,
            actions: self.actions.clone(),
            goal: self.goal.clone(),
        }
    }

    /// Πⁱ: the associated task for agent `i`, with the initial state replaced
    /// by the agent's perspective on it.
    pub fn perspective(&self, i: AgentId) -> PlanningTask {
        self.with_initial(self.initial.perspective_shift(i))
    }
}
