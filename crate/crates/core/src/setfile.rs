//! Text format for a group together with one of its subsets.
//!
//! ```text
//! # optional comments
//! 3^1 x 3^2
//! 0,0
//! 1,0
//! ```
//!
//! The first non-comment line is the group; every further line is one
//! element as comma-separated coordinates. Blank lines are ignored.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::subset::GroupSubset;

pub fn parse_set_file(text: &str) -> Result<(Group, GroupSubset)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (_, head) = lines
        .next()
        .ok_or_else(|| Error::Parse("set file has no group line".into()))?;
    let group: Group = head.parse()?;
    let mut set = GroupSubset::empty(&group);
    for (no, line) in lines {
        let x = group
            .parse_element(line)
            .map_err(|e| Error::Parse(format!("line {no}: {e}")))?;
        set.insert(x);
    }
    Ok((group, set))
}

/// Writes `header` lines as comments, then the group and the elements in
/// increasing index order.
pub fn write_set_file(group: &Group, set: &GroupSubset, header: &[String]) -> Result<String> {
    set.check(group)?;
    let mut out = String::new();
    for h in header {
        for line in h.lines() {
            writeln!(out, "# {line}").unwrap();
        }
    }
    writeln!(out, "{group}").unwrap();
    for x in set.iter() {
        writeln!(out, "{}", group.format_index(x)).unwrap();
    }
    Ok(out)
}
