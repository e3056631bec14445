//! alist text format for sparse parity-check matrices.

use std::fmt::Write as _;
use std::path::Path;

use super::TannerGraph;
use crate::error::{Error, Result};

/// Serializes a graph: `N M`, `max_var_deg max_chk_deg`, the two degree
/// lists, then 1-indexed adjacency lists for variables and for checks.
pub fn to_alist(g: &TannerGraph) -> String {
    let mut s = String::new();
    let vmax = (0..g.n()).map(|i| g.var_degree(i)).max().unwrap_or(0);
    let cmax = (0..g.m()).map(|a| g.chk_degree(a)).max().unwrap_or(0);
    // Isolated nodes are written as a single zero so that every list occupies a line.
    let join = |it: &mut dyn Iterator<Item = usize>| {
        let s = it.map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        if s.is_empty() {
            "0".to_string()
        } else {
            s
        }
    };
    writeln!(s, "{} {}", g.n(), g.m()).unwrap();
    writeln!(s, "{vmax} {cmax}").unwrap();
    writeln!(s, "{}", join(&mut (0..g.n()).map(|i| g.var_degree(i)))).unwrap();
    writeln!(s, "{}", join(&mut (0..g.m()).map(|a| g.chk_degree(a)))).unwrap();
    for i in 0..g.n() {
        let mut nb: Vec<usize> = g.var_neighbors(i).map(|a| a + 1).collect();
        nb.sort_unstable();
        writeln!(s, "{}", join(&mut nb.into_iter())).unwrap();
    }
    for a in 0..g.m() {
        let mut nb: Vec<usize> = g.chk_neighbors(a).map(|i| i + 1).collect();
        nb.sort_unstable();
        writeln!(s, "{}", join(&mut nb.into_iter())).unwrap();
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_numbers(&mut self, what: &str) -> Result<(usize, Vec<usize>)> {
        for (idx, line) in self.inner.by_ref() {
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let nums = t
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| Error::Alist {
                        line: idx + 1,
                        reason: format!("'{tok}' is not a nonnegative integer"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok((idx + 1, nums));
        }
        Err(Error::Alist {
            line: 0,
            reason: format!("unexpected end of input while reading {what}"),
        })
    }
}

/// Parses alist text. Zero padding in adjacency lines is accepted.
pub fn from_alist(text: &str) -> Result<TannerGraph> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let bad = |line, reason: &str| Error::Alist {
        line,
        reason: reason.to_string(),
    };
    let (ln, head) = lines.next_numbers("dimensions")?;
    let [n, m] = head[..] else {
        return Err(bad(ln, "expected 'N M'"));
    };
    let (ln, maxes) = lines.next_numbers("maximum degrees")?;
    let [vmax, cmax] = maxes[..] else {
        return Err(bad(ln, "expected 'max_var_deg max_chk_deg'"));
    };
    let (ln, vdeg) = lines.next_numbers("variable degrees")?;
    if vdeg.len() != n {
        return Err(bad(ln, "variable degree list has wrong length"));
    }
    let (ln, cdeg) = lines.next_numbers("check degrees")?;
    if cdeg.len() != m {
        return Err(bad(ln, "check degree list has wrong length"));
    }
    if vdeg.iter().copied().max().unwrap_or(0) != vmax || cdeg.iter().copied().max().unwrap_or(0) != cmax {
        return Err(bad(ln, "maximum degrees disagree with degree lists"));
    }
    let mut var_lists = Vec::with_capacity(n);
    for (i, &d) in vdeg.iter().enumerate() {
        let (ln, nums) = lines.next_numbers("variable adjacency")?;
        let list: Vec<usize> = nums.into_iter().filter(|&v| v != 0).collect();
        if list.len() != d {
            return Err(bad(ln, &format!("variable {} lists {} checks, degree says {d}", i + 1, list.len())));
        }
        if list.iter().any(|&a| a > m) {
            return Err(bad(ln, "check index out of range"));
        }
        var_lists.push(list);
    }
    let mut edges = Vec::new();
    for (a, &d) in cdeg.iter().enumerate() {
        let (ln, nums) = lines.next_numbers("check adjacency")?;
        let list: Vec<usize> = nums.into_iter().filter(|&v| v != 0).collect();
        if list.len() != d {
            return Err(bad(ln, &format!("check {} lists {} variables, degree says {d}", a + 1, list.len())));
        }
        for &i in &list {
            if i > n {
                return Err(bad(ln, "variable index out of range"));
            }
            if !var_lists[i - 1].contains(&(a + 1)) {
                return Err(bad(ln, &format!("edge ({i},{}) missing from variable list", a + 1)));
            }
            edges.push((i - 1, a));
        }
    }
    let total: usize = vdeg.iter().sum();
    if total != edges.len() {
        return Err(bad(0, "variable and check adjacency lists disagree"));
    }
    if edges.is_empty() {
        return Err(bad(0, "graph has no edges"));
    }
    TannerGraph::from_edges(n, m, edges).map_err(|e| bad(0, &e.to_string()))
}

pub fn read_alist(path: impl AsRef<Path>) -> Result<TannerGraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_alist(&text).map_err(|e| Error::format(path, e))
}

pub fn write_alist(g: &TannerGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_alist(g)).map_err(|e| Error::io(path, e))
}
