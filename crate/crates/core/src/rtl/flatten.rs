use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::ir::RtlModule;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlattenError {
    #[error("module `{parent}` instantiates unknown module `{child}`")]
    UnresolvedInstance { parent: String, child: String },
    #[error("instance of `{child}` in `{parent}` does not match the child's port list")]
    InterfaceMismatch { parent: String, child: String },
    #[error("module hierarchy contains a cycle through `{0}`")]
    CyclicHierarchy(String),
    #[error("two different modules are named `{0}`")]
    ConflictingDefinitions(String),
}

/// Collects the modules reachable from `top` and orders them children
/// first, ties broken by name. Structurally identical modules that share a
/// name appear once.
pub fn flatten_hierarchy(top: &RtlModule, library: &[RtlModule]) -> Result<Vec<RtlModule>, FlattenError> {
    let mut by_name: BTreeMap<&str, &RtlModule> = BTreeMap::new();
    for module in library.iter().chain(std::iter::once(top)) {
        if let Some(existing) = by_name.insert(&module.name, module) {
            if existing != module {
                return Err(FlattenError::ConflictingDefinitions(module.name.clone()));
            }
        }
    }

    // Reachable set and child edges.
    let mut children: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut stack = vec![top.name.as_str()];
    while let Some(name) = stack.pop() {
        if children.contains_key(name) {
            continue;
        }
        let module = by_name[name];
        let mut kids = BTreeSet::new();
        for inst in &module.instances {
            let child = by_name.get(inst.module.as_str()).ok_or_else(|| FlattenError::UnresolvedInstance {
                parent: module.name.clone(),
                child: inst.module.clone(),
            })?;
            if child.ports != inst.child_ports {
                return Err(FlattenError::InterfaceMismatch {
                    parent: module.name.clone(),
                    child: inst.module.clone(),
                });
            }
            kids.insert(child.name.as_str());
            stack.push(child.name.as_str());
        }
        children.insert(name, kids);
    }

    // Kahn's algorithm on "all children emitted" with lexicographic tie-break.
    let mut pending: BTreeMap<&str, usize> = children.iter().map(|(k, v)| (*k, v.len())).collect();
    let mut ready: BTreeSet<&str> = pending.iter().filter(|(_, n)| **n == 0).map(|(k, _)| *k).collect();
    let mut order = Vec::with_capacity(children.len());
    while let Some(name) = ready.pop_first() {
        pending.remove(name);
        order.push(by_name[name].clone());
        for (parent, kids) in &children {
            if kids.contains(name) {
                if let Some(count) = pending.get_mut(parent) {
                    *count -= 1;
                    if *count == 0 {
                        ready.insert(parent);
                    }
                }
            }
        }
    }
    if let Some((name, _)) = pending.into_iter().next() {
        return Err(FlattenError::CyclicHierarchy(name.to_string()));
    }
    Ok(order)
}
