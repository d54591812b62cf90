//! The external task format: a line-oriented text file declaring the
//! signature, the initial epistemic state, the actions with their event
//! models and owners, and the goal.
//!
//! ```text
//! agents: anne, bob
//! props: m, h
//! worlds:
//! w { m }
//! v { }
//! indist[bob]: w, v
//! designated: w
//! action try-take owner=bob:
//! event e pre="m" post="h & !m"
//! event f pre="!m" post="top"
//! indist[anne]: e, f
//! designated: e, f
//! goal: "h"
//! ```
//!
//! `#` starts a comment outside quotes; agents without an `indist` line
//! distinguish everything (singleton blocks); omitted worlds or events form
//! singleton blocks.

use std::collections::BTreeMap;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::action::{Action, EventModel, Postcondition};
use crate::error::{Error, ParseError, Result};
use crate::formula::Formula;
use crate::model::{EpistemicModel, State};
use crate::parser::parse_formula;
use crate::partition::Partition;
use crate::sig::{AgentId, PropSet, Signature};
use crate::task::PlanningTask;

/// Hex SHA-256 of task file bytes; referenced by policy file headers.
pub fn task_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn strip_comment(line: &str) -> &str {
    let mut in_quote = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_quote = !in_quote,
            '#' if !in_quote => return &line[..i],
            _ => {}
        }
    }
    line
}

fn err(lineno: usize, msg: impl Into<String>) -> Error {
    ParseError::new(lineno as u32, 1, msg).into()
}

fn split_names(text: &str) -> Vec<String> {
    text.split(',').map(|s| s.trim().to_owned()).filter(|s| !s.is_empty()).collect()
}

/// `indist[agent]: a, b | c` → (agent, blocks of names).
fn parse_indist(lineno: usize, line: &str) -> Result<(String, Vec<Vec<String>>)> {
    let rest = line.strip_prefix("indist[").ok_or_else(|| err(lineno, "expected `indist[`"))?;
    let (agent, rest) =
        rest.split_once(']').ok_or_else(|| err(lineno, "unclosed `indist[`"))?;
    let rest = rest.trim_start();
    let rest = rest.strip_prefix(':').ok_or_else(|| err(lineno, "expected `:` after `indist[..]`"))?;
    let blocks = rest.split('|').map(split_names).filter(|b| !b.is_empty()).collect();
    Ok((agent.trim().to_owned(), blocks))
}

fn resolve_blocks(
    lineno: usize,
    blocks: &[Vec<String>],
    index: &BTreeMap<String, u32>,
    what: &str,
) -> Result<Vec<Vec<u32>>> {
    blocks
        .iter()
        .map(|block| {
            block
                .iter()
                .map(|name| {
                    index
                        .get(name)
                        .copied()
                        .ok_or_else(|| err(lineno, format!("undeclared {what} `{name}`")))
                })
                .collect()
        })
        .collect()
}

fn parse_quoted(lineno: usize, text: &str) -> Result<String> {
    let t = text.trim();
    let t = t.strip_prefix('"').ok_or_else(|| err(lineno, "expected opening `\"`"))?;
    let t = t.strip_suffix('"').ok_or_else(|| err(lineno, "expected closing `\"`"))?;
    Ok(t.to_owned())
}

fn parse_post(lineno: usize, text: &str, sig: &Signature) -> Result<Postcondition> {
    let t = text.trim();
    if t == "top" {
        return Ok(Postcondition::top());
    }
    let mut literals = Vec::new();
    for lit in t.split('&') {
        let lit = lit.trim();
        let (name, positive) = match lit.strip_prefix('!') {
            Some(rest) => (rest.trim(), false),
            None => (lit, true),
        };
        let p = sig
            .prop(name)
            .ok_or_else(|| err(lineno, format!("undeclared proposition `{name}`")))?;
        literals.push((p, positive));
    }
    Postcondition::new(sig, literals)
}

struct PendingEvent {
    name: String,
    pre: String,
    post: String,
    lineno: usize,
}

struct PendingAction {
    name: String,
    owner: String,
    lineno: usize,
    events: Vec<PendingEvent>,
    indist: Vec<(usize, String, Vec<Vec<String>>)>,
    designated: Option<(usize, Vec<String>)>,
}

fn formula_at(lineno: usize, text: &str, sig: &Signature) -> Result<Formula> {
    parse_formula(text, sig).map_err(|e| {
        // Report positions relative to the containing file line.
        ParseError::new(lineno as u32, e.col, e.msg).into()
    })
}

fn build_action(pending: &PendingAction, sig: &Arc<Signature>) -> Result<(Action, String)> {
    if pending.events.is_empty() {
        return Err(err(pending.lineno, format!("action `{}` has no events", pending.name)));
    }
    let mut event_index: BTreeMap<String, u32> = BTreeMap::new();
    for (i, ev) in pending.events.iter().enumerate() {
        if event_index.insert(ev.name.clone(), i as u32).is_some() {
            return Err(err(ev.lineno, format!("duplicate event `{}`", ev.name)));
        }
    }
    let pres = pending
        .events
        .iter()
        .map(|ev| formula_at(ev.lineno, &ev.pre, sig))
        .collect::<Result<Vec<_>>>()?;
    let posts = pending
        .events
        .iter()
        .map(|ev| parse_post(ev.lineno, &ev.post, sig))
        .collect::<Result<Vec<_>>>()?;
    let n = pending.events.len();
    let mut partitions: Vec<Partition> = vec![Partition::identity(n); sig.num_agents()];
    for (lineno, agent, blocks) in &pending.indist {
        let id = sig
            .agent(agent)
            .ok_or_else(|| err(*lineno, format!("undeclared agent `{agent}`")))?;
        let resolved = resolve_blocks(*lineno, blocks, &event_index, "event")?;
        partitions[id.index()] = Partition::from_blocks(n, &resolved)?;
    }
    let (dlineno, designated) = pending
        .designated
        .as_ref()
        .ok_or_else(|| err(pending.lineno, format!("action `{}` has no designated events", pending.name)))?;
    let designated = designated
        .iter()
        .map(|name| {
            event_index
                .get(name)
                .copied()
                .ok_or_else(|| err(*dlineno, format!("undeclared event `{name}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let names = pending.events.iter().map(|e| e.name.clone()).collect();
    let model = EventModel::new(Arc::clone(sig), pres, posts, partitions, Some(names))?;
    let action = Action::new(pending.name.clone(), model, designated)?;
    Ok((action, pending.owner.clone()))
}

/// Parses the textual task format into a validated planning task.
pub fn parse_task(text: &str) -> Result<PlanningTask> {
    let mut agents: Option<Vec<String>> = None;
    let mut props: Option<Vec<String>> = None;
    let mut worlds: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut in_worlds = false;
    let mut state_indist: Vec<(usize, String, Vec<Vec<String>>)> = Vec::new();
    let mut state_designated: Option<(usize, Vec<String>)> = None;
    let mut actions: Vec<PendingAction> = Vec::new();
    let mut in_action = false;
    let mut goal: Option<(usize, String)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("agents:") {
            agents = Some(split_names(rest));
        } else if let Some(rest) = line.strip_prefix("props:") {
            props = Some(split_names(rest));
        } else if let Some(rest) = line.strip_prefix("worlds:") {
            in_worlds = true;
            let rest = rest.trim();
            if !rest.is_empty() {
                worlds.push(parse_world_line(lineno, rest)?);
            }
        } else if line.starts_with("indist[") {
            let (agent, blocks) = parse_indist(lineno, line)?;
            if in_action {
                actions.last_mut().unwrap().indist.push((lineno, agent, blocks));
            } else {
                in_worlds = false;
                state_indist.push((lineno, agent, blocks));
            }
        } else if let Some(rest) = line.strip_prefix("designated:") {
            let names = split_names(rest);
            if in_action {
                actions.last_mut().unwrap().designated = Some((lineno, names));
            } else {
                in_worlds = false;
                if state_designated.is_some() {
                    return Err(err(lineno, "duplicate `designated:` for the initial state"));
                }
                state_designated = Some((lineno, names));
            }
        } else if let Some(rest) = line.strip_prefix("action ") {
            in_worlds = false;
            in_action = true;
            let rest = rest.trim().strip_suffix(':').ok_or_else(|| {
                err(lineno, "expected `action NAME owner=AGENT:`")
            })?;
            let (name, owner_part) = rest
                .split_once(char::is_whitespace)
                .ok_or_else(|| err(lineno, "expected `action NAME owner=AGENT:`"))?;
            let owner = owner_part
                .trim()
                .strip_prefix("owner=")
                .ok_or_else(|| err(lineno, "expected `owner=AGENT`"))?;
            actions.push(PendingAction {
                name: name.trim().to_owned(),
                owner: owner.trim().to_owned(),
                lineno,
                events: Vec::new(),
                indist: Vec::new(),
                designated: None,
            });
        } else if let Some(rest) = line.strip_prefix("event ") {
            if !in_action {
                return Err(err(lineno, "`event` outside an action block"));
            }
            let rest = rest.trim();
            let (name, rest) = rest
                .split_once(char::is_whitespace)
                .ok_or_else(|| err(lineno, "expected `event EID pre=\"..\" post=\"..\"`"))?;
            let rest = rest.trim();
            let pre_start = rest
                .find("pre=")
                .ok_or_else(|| err(lineno, "event is missing `pre=`"))?;
            let post_start = rest
                .find("post=")
                .ok_or_else(|| err(lineno, "event is missing `post=`"))?;
            let pre = parse_quoted(lineno, rest[pre_start + 4..post_start].trim())?;
            let post = parse_quoted(lineno, rest[post_start + 5..].trim())?;
            actions.last_mut().unwrap().events.push(PendingEvent {
                name: name.to_owned(),
                pre,
                post,
                lineno,
            });
        } else if let Some(rest) = line.strip_prefix("goal:") {
            in_worlds = false;
            in_action = false;
            goal = Some((lineno, parse_quoted(lineno, rest)?));
        } else if in_worlds {
            worlds.push(parse_world_line(lineno, line)?);
        } else {
            return Err(err(lineno, format!("unrecognized line `{line}`")));
        }
    }

    let agents = agents.ok_or_else(|| err(1, "missing `agents:` section"))?;
    let props = props.ok_or_else(|| err(1, "missing `props:` section"))?;
    let sig = Signature::new(agents, props)?;

    if worlds.is_empty() {
        return Err(err(1, "missing `worlds:` section"));
    }
    let mut world_index: BTreeMap<String, u32> = BTreeMap::new();
    for (lineno, name, _) in &worlds {
        if world_index.insert(name.clone(), world_index.len() as u32).is_some() {
            return Err(err(*lineno, format!("duplicate world `{name}`")));
        }
    }
    let valuations = worlds
        .iter()
        .map(|(lineno, _, prop_names)| {
            let mut ps = PropSet::empty(sig.num_props());
            for p in prop_names {
                let id = sig
                    .prop(p)
                    .ok_or_else(|| err(*lineno, format!("undeclared proposition `{p}`")))?;
                ps.insert(id);
            }
            Ok(ps)
        })
        .collect::<Result<Vec<_>>>()?;
    let n = worlds.len();
    let mut partitions: Vec<Partition> = vec![Partition::identity(n); sig.num_agents()];
    for (lineno, agent, blocks) in &state_indist {
        let id = sig
            .agent(agent)
            .ok_or_else(|| err(*lineno, format!("undeclared agent `{agent}`")))?;
        let resolved = resolve_blocks(*lineno, blocks, &world_index, "world")?;
        partitions[id.index()] = Partition::from_blocks(n, &resolved)?;
    }
    let world_names: Vec<String> = worlds.iter().map(|(_, name, _)| name.clone()).collect();
    let model = EpistemicModel::new(Arc::clone(&sig), valuations, partitions, Some(world_names))?;
    let (dlineno, designated_names) =
        state_designated.ok_or_else(|| err(1, "missing `designated:` for the initial state"))?;
    let designated = designated_names
        .iter()
        .map(|name| {
            world_index
                .get(name)
                .copied()
                .ok_or_else(|| err(dlineno, format!("undeclared world `{name}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let initial = State::new(model, designated)?;

    let (goal_lineno, goal_text) = goal.ok_or_else(|| err(1, "missing `goal:` section"))?;
    let goal = formula_at(goal_lineno, &goal_text, &sig)?;

    let built = actions
        .iter()
        .map(|pending| {
            let (action, owner_name) = build_action(pending, &sig)?;
            let owner: AgentId = sig
                .agent(&owner_name)
                .ok_or_else(|| err(pending.lineno, format!("undeclared agent `{owner_name}`")))?;
            Ok((action, owner))
        })
        .collect::<Result<Vec<_>>>()?;

    PlanningTask::new(initial, built, goal)
}

fn parse_world_line(lineno: usize, line: &str) -> Result<(usize, String, Vec<String>)> {
    let (name, rest) = line
        .split_once('{')
        .ok_or_else(|| err(lineno, "expected `WID { props }`"))?;
    let props = rest
        .trim()
        .strip_suffix('}')
        .ok_or_else(|| err(lineno, "unclosed `{`"))?;
    Ok((lineno, name.trim().to_owned(), split_names(props)))
}

fn write_partition_lines(
    out: &mut String,
    sig: &Signature,
    partitions: impl Fn(AgentId) -> Vec<Vec<String>>,
) {
    for i in sig.agents() {
        let blocks = partitions(i);
        // Singleton-only partitions are the default and stay implicit.
        if blocks.iter().all(|b| b.len() == 1) {
            continue;
        }
        let rendered: Vec<String> =
            blocks.iter().filter(|b| b.len() > 1).map(|b| b.join(", ")).collect();
        out.push_str(&format!("indist[{}]: {}\n", sig.agent_name(i), rendered.join(" | ")));
    }
}

/// Serializes a task in the textual format. Parsing the result yields a task
/// bisimulation-equivalent to the original, action for action.
pub fn serialize_task(task: &PlanningTask) -> String {
    let sig = task.sig();
    let model = task.initial().model();
    let mut out = String::new();
    out.push_str(&format!("agents: {}\n", sig.agent_names().join(", ")));
    out.push_str(&format!("props: {}\n", sig.prop_names().join(", ")));
    out.push_str("worlds:\n");
    for w in model.worlds() {
        let props: Vec<&str> =
            model.valuation(w).iter().map(|p| sig.prop_name(p)).collect();
        out.push_str(&format!("{} {{ {} }}\n", model.world_name(w), props.join(", ")));
    }
    write_partition_lines(&mut out, sig, |i| {
        model
            .partition(i)
            .blocks()
            .map(|b| b.iter().map(|&w| model.world_name(w)).collect())
            .collect()
    });
    let designated: Vec<String> =
        task.initial().designated().iter().map(|&w| model.world_name(w)).collect();
    out.push_str(&format!("designated: {}\n", designated.join(", ")));
    for (name, ta) in task.actions() {
        let em = ta.action.model();
        out.push_str(&format!(
            "action {} owner={}:\n",
            name,
            sig.agent_name(ta.owner)
        ));
        for e in em.events() {
            let post = if em.post(e).is_top() {
                "top".to_owned()
            } else {
                em.post(e)
                    .literals()
                    .iter()
                    .map(|&(p, positive)| {
                        let name = sig.prop_name(p);
                        if positive {
                            name.to_owned()
                        } else {
                            format!("!{name}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" & ")
            };
            out.push_str(&format!(
                "event {} pre=\"{}\" post=\"{}\"\n",
                em.event_name(e),
                em.pre(e).display(sig),
                post
            ));
        }
        write_partition_lines(&mut out, sig, |i| {
            em.partition(i)
                .blocks()
                .map(|b| b.iter().map(|&e| em.event_name(e)).collect())
                .collect()
        });
        let designated: Vec<String> =
            ta.action.designated().iter().map(|&e| em.event_name(e)).collect();
        out.push_str(&format!("designated: {}\n", designated.join(", ")));
    }
    out.push_str(&format!("goal: \"{}\"\n", task.goal().display(sig)));
    out
}
