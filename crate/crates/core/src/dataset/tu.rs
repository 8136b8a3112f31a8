//! TU graph-classification text format.
//!
//! A dataset `NAME` is a directory holding:
//!
//! * `NAME_A.txt` – one `u, v` row per edge, 1-based global node ids;
//! * `NAME_graph_indicator.txt` – line `i` is the 1-based graph id of node `i`;
//! * `NAME_graph_labels.txt` (optional) – line `k` is the label of graph `k`;
//! * `NAME_node_labels.txt` (optional) – line `i` is the label of node `i`;
//! * `NAME_node_attributes.txt` (optional) – comma-separated reals for node `i`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::Dataset;
use crate::error::{Error, Result};
use crate::graph::{Graph, Label, NodeId};

fn tu_path(dir: &Path, name: &str, suffix: &str) -> PathBuf {
    dir.join(format!("{name}_{suffix}.txt"))
}

/// Non-blank content lines with 1-based line numbers. Blank lines are allowed
/// only at the end of the file.
fn content_lines<'a>(path: &Path, text: &'a str) -> Result<Vec<(usize, &'a str)>> {
    let lines: Vec<&str> = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .collect();
    let used = lines
        .iter()
        .rposition(|l| !l.trim().is_empty())
        .map_or(0, |i| i + 1);
    lines[..used]
        .iter()
        .enumerate()
        .map(|(i, l)| {
            if l.trim().is_empty() {
                Err(Error::parse(path, i + 1, "unexpected blank line"))
            } else {
                Ok((i + 1, l.trim()))
            }
        })
        .collect()
}

fn read_required(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn read_optional(path: &Path) -> Result<Option<String>> {
    match fs::read_to_string(path) {
        Ok(s) => Ok(Some(s)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(Error::io(path, e)),
    }
}

fn parse_int<T: std::str::FromStr>(path: &Path, line: usize, field: &str) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::parse(path, line, format!("expected an integer, found '{field}'")))
}

fn check_row_count(path: &Path, rows: usize, expected: usize, what: &str) -> Result<()> {
    if rows != expected {
        return Err(Error::parse(
            path,
            rows.min(expected) + 1,
            format!("{what} has {rows} rows but the graph indicator lists {expected} nodes"),
        ));
    }
    Ok(())
}

/// Reads dataset `name` from `dir`.
pub fn parse_tu(dir: &Path, name: &str) -> Result<Dataset> {
    let indicator_path = tu_path(dir, name, "graph_indicator");
    let indicator_text = read_required(&indicator_path)?;
    let indicator_lines = content_lines(&indicator_path, &indicator_text)?;
    let mut node_graph = Vec::with_capacity(indicator_lines.len());
    for &(line, field) in &indicator_lines {
        let gid: usize = parse_int(&indicator_path, line, field)?;
        if gid == 0 {
            return Err(Error::parse(
                &indicator_path,
                line,
                "node assigned to nonexistent graph 0 (graph ids are 1-based)",
            ));
        }
        node_graph.push(gid - 1);
    }
    let node_total = node_graph.len();

    let labels_path = tu_path(dir, name, "graph_labels");
    let graph_labels: Option<Vec<Label>> = match read_optional(&labels_path)? {
        Some(text) => Some(
            content_lines(&labels_path, &text)?
                .into_iter()
                .map(|(line, field)| parse_int(&labels_path, line, field))
                .collect::<Result<_>>()?,
        ),
        None => None,
    };

    let graph_count = match &graph_labels {
        Some(labels) => {
            if let Some(i) = node_graph.iter().position(|&g| g >= labels.len()) {
                return Err(Error::parse(
                    &indicator_path,
                    indicator_lines[i].0,
                    format!(
                        "node assigned to nonexistent graph {} ({} graph labels)",
                        node_graph[i] + 1,
                        labels.len()
                    ),
                ));
            }
            labels.len()
        }
        None => node_graph.iter().max().map_or(0, |&g| g + 1),
    };

    // Local ids follow the order of the global ids within each graph.
    let mut sizes = vec![0usize; graph_count];
    let mut local = Vec::with_capacity(node_total);
    for &g in &node_graph {
        local.push(sizes[g]);
        sizes[g] += 1;
    }

    let edges_path = tu_path(dir, name, "A");
    let edges_text = read_required(&edges_path)?;
    let mut pairs: Vec<Vec<(NodeId, NodeId)>> = vec![Vec::new(); graph_count];
    for (line, row) in content_lines(&edges_path, &edges_text)? {
        let (a, b) = row.split_once(',').ok_or_else(|| {
            Error::parse(&edges_path, line, format!("expected 'u, v', found '{row}'"))
        })?;
        let u: usize = parse_int(&edges_path, line, a)?;
        let v: usize = parse_int(&edges_path, line, b)?;
        for id in [u, v] {
            if id == 0 || id > node_total {
                return Err(Error::parse(
                    &edges_path,
                    line,
                    format!("node id {id} outside 1..={node_total}"),
                ));
            }
        }
        let (gu, gv) = (node_graph[u - 1], node_graph[v - 1]);
        if gu != gv {
            return Err(Error::parse(
                &edges_path,
                line,
                format!("edge ({u}, {v}) crosses graphs {} and {}", gu + 1, gv + 1),
            ));
        }
        pairs[gu].push((local[u - 1], local[v - 1]));
    }

    let node_labels_path = tu_path(dir, name, "node_labels");
    let node_labels: Option<Vec<Label>> = match read_optional(&node_labels_path)? {
        Some(text) => {
            let rows = content_lines(&node_labels_path, &text)?;
            check_row_count(&node_labels_path, rows.len(), node_total, "node label file")?;
            Some(
                rows.into_iter()
                    .map(|(line, field)| parse_int(&node_labels_path, line, field))
                    .collect::<Result<_>>()?,
            )
        }
        None => None,
    };

    let attributes_path = tu_path(dir, name, "node_attributes");
    let node_attributes: Option<Vec<Vec<f64>>> = match read_optional(&attributes_path)? {
        Some(text) => {
            let rows = content_lines(&attributes_path, &text)?;
            check_row_count(
                &attributes_path,
                rows.len(),
                node_total,
                "node attribute file",
            )?;
            let mut out = Vec::with_capacity(rows.len());
            let mut dim = None;
            for (line, row) in rows {
                let values = row
                    .split(',')
                    .map(|f| {
                        f.trim().parse::<f64>().map_err(|_| {
                            Error::parse(
                                &attributes_path,
                                line,
                                format!("expected a real, found '{f}'"),
                            )
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                match dim {
                    None => dim = Some(values.len()),
                    Some(d) if d != values.len() => {
                        return Err(Error::parse(
                            &attributes_path,
                            line,
                            format!("{} attributes, expected {d}", values.len()),
                        ))
                    }
                    Some(_) => {}
                }
                out.push(values);
            }
            Some(out)
        }
        None => None,
    };

    // Per-graph slices of the per-node files.
    let mut members: Vec<Vec<usize>> = sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
    for (node, &g) in node_graph.iter().enumerate() {
        members[g].push(node);
    }

    let mut loops = 0;
    let mut graphs = Vec::with_capacity(graph_count);
    for (k, graph_pairs) in pairs.into_iter().enumerate() {
        let (mut g, dropped) = Graph::from_edge_list_counting(sizes[k], &graph_pairs)?;
        loops += dropped;
        if let Some(labels) = &node_labels {
            g = g.with_node_labels(members[k].iter().map(|&i| labels[i]).collect())?;
        }
        if let Some(attrs) = &node_attributes {
            g = g.with_node_attributes(members[k].iter().map(|&i| attrs[i].clone()).collect())?;
        }
        g = g.with_graph_label(graph_labels.as_ref().map(|l| l[k]));
        graphs.push(g);
    }
    if loops > 0 {
        log::warn!("{name}: dropped {loops} self-loop row(s)");
    }

    Ok(Dataset::new(name, graphs))
}

struct TuWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl TuWriter {
    fn create(path: PathBuf) -> Result<Self> {
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        Ok(TuWriter {
            path,
            out: BufWriter::new(file),
        })
    }

    fn line(&mut self, args: std::fmt::Arguments<'_>) -> Result<()> {
        self.out
            .write_fmt(args)
            .and_then(|()| self.out.write_all(b"\n"))
            .map_err(|e| Error::io(&self.path, e))
    }

    fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}

/// Which optional per-item files the dataset can fill for every graph.
fn all_or_none(d: &Dataset, has: impl Fn(&Graph) -> bool, what: &str) -> Result<bool> {
    let count = d.graphs().iter().filter(|g| has(g)).count();
    match count {
        0 => Ok(false),
        c if c == d.len() => Ok(true),
        c => Err(Error::Structure(format!(
            "{c} of {} graphs carry {what}; TU files need all or none",
            d.len()
        ))),
    }
}

/// Writes `d` into `dir` as TU files named after `d.name`. Each undirected
/// edge is emitted in both directions.
pub fn write_tu(d: &Dataset, dir: &Path) -> Result<()> {
    if d.is_empty() {
        return Err(Error::Usage(format!(
            "dataset '{}' has no graphs to write",
            d.name
        )));
    }
    let with_graph_labels = all_or_none(d, |g| g.graph_label().is_some(), "graph labels")?;
    let with_node_labels = all_or_none(d, |g| g.node_labels().is_some(), "node labels")?;
    let with_attributes = all_or_none(d, |g| g.node_attributes().is_some(), "node attributes")?;
    if !with_graph_labels {
        if let Some(k) = d.graphs().iter().position(|g| g.node_count() == 0) {
            return Err(Error::Structure(format!(
                "graph {k} has no nodes; without graph labels TU files cannot represent it"
            )));
        }
    }

    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = &d.name;

    let mut edges = TuWriter::create(tu_path(dir, name, "A"))?;
    let mut indicator = TuWriter::create(tu_path(dir, name, "graph_indicator"))?;
    let mut offset = 0;
    for (k, g) in d.graphs().iter().enumerate() {
        for u in 0..g.node_count() {
            indicator.line(format_args!("{}", k + 1))?;
            for &v in g.neighbors(u) {
                edges.line(format_args!("{}, {}", offset + u + 1, offset + v + 1))?;
            }
        }
        offset += g.node_count();
    }
    edges.finish()?;
    indicator.finish()?;

    if with_graph_labels {
        let mut w = TuWriter::create(tu_path(dir, name, "graph_labels"))?;
        for g in d.graphs() {
            w.line(format_args!("{}", g.graph_label().unwrap()))?;
        }
        w.finish()?;
    }
    if with_node_labels {
        let mut w = TuWriter::create(tu_path(dir, name, "node_labels"))?;
        for label in d.graphs().iter().flat_map(|g| g.node_labels().unwrap()) {
            w.line(format_args!("{label}"))?;
        }
        w.finish()?;
    }
    if with_attributes {
        let mut w = TuWriter::create(tu_path(dir, name, "node_attributes"))?;
        for row in d.graphs().iter().flat_map(|g| g.node_attributes().unwrap()) {
            let fields: Vec<String> = row.iter().map(f64::to_string).collect();
            w.line(format_args!("{}", fields.join(", ")))?;
        }
        w.finish()?;
    }
    Ok(())
}
