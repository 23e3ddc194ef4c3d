//! CSV exchange formats.
//!
//! Orderings and partitions are keyed by the vertex ids of the edge list
//! they came from, so files produced from one graph can be joined later.
//!
//! - partition: `vertex,label`
//! - ordering: `position,vertex`
//! - reordered adjacency: `row,col,group`

use std::collections::HashMap;
use std::io::Write;

use crate::clustering::Partition;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ordering::Ordering;

fn id_of(ids: Option<&[u64]>, v: usize) -> u64 {
    ids.map_or(v as u64, |ids| ids[v])
}

pub fn write_partition_csv<W: Write>(sigma: &Partition, ids: Option<&[u64]>, mut out: W) -> Result<()> {
    writeln!(out, "vertex,label")?;
    for (v, &label) in sigma.labels().iter().enumerate() {
        writeln!(out, "{},{}", id_of(ids, v), label)?;
    }
    Ok(())
}

pub fn write_ordering_csv<W: Write>(pi: &Ordering, ids: Option<&[u64]>, mut out: W) -> Result<()> {
    writeln!(out, "position,vertex")?;
    for (pos, &v) in pi.sequence().iter().enumerate() {
        writeln!(out, "{},{}", pos, id_of(ids, v))?;
    }
    Ok(())
}

/// Adjacency entries in sequence coordinates: each edge appears as both
/// `(row, col)` and `(col, row)`, tagged with the row vertex's group.
/// Sorted by row then column.
pub fn write_reordered_matrix_csv<W: Write>(
    g: &Graph,
    pi: &Ordering,
    sigma: &Partition,
    mut out: W,
) -> Result<()> {
    if pi.len() != g.n() || sigma.len() != g.n() {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            found: if pi.len() != g.n() { pi.len() } else { sigma.len() },
        });
    }
    let mut cells: Vec<(usize, usize, usize)> = g
        .edges()
        .iter()
        .flat_map(|&(u, v)| {
            [
                (pi.position(u), pi.position(v), sigma.label(u)),
                (pi.position(v), pi.position(u), sigma.label(v)),
            ]
        })
        .collect();
    cells.sort_unstable();
    writeln!(out, "row,col,group")?;
    for (r, c, k) in cells {
        writeln!(out, "{r},{c},{k}")?;
    }
    Ok(())
}

fn parse_rows(text: &str, header: [&str; 2]) -> Result<Vec<(u64, u64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let found = reader.headers().map_err(csv_error)?.clone();
    if found.len() != 2 || found[0] != *header[0] || found[1] != *header[1] {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header {:?}, found {:?}", header.join(","), found),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| -> Result<u64> {
            record.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| Error::Parse {
                line,
                message: format!("expected non-negative integer in column {:?}", header[i]),
            })
        };
        rows.push((field(0)?, field(1)?));
    }
    Ok(rows)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

/// `(vertex id, label)` pairs in file order.
pub fn read_partition_csv(text: &str) -> Result<Vec<(u64, usize)>> {
    let rows = parse_rows(text, ["vertex", "label"])?;
    let mut seen = HashMap::new();
    for (line, &(v, _)) in rows.iter().enumerate() {
        if seen.insert(v, line).is_some() {
            return Err(Error::Parse {
                line: line + 2,
                message: format!("vertex {v} listed twice"),
            });
        }
    }
    Ok(rows.into_iter().map(|(v, l)| (v, l as usize)).collect())
}

/// Vertex ids in sequence order.
pub fn read_ordering_csv(text: &str) -> Result<Vec<u64>> {
    let rows = parse_rows(text, ["position", "vertex"])?;
    let n = rows.len();
    let mut seq = vec![None; n];
    for (line, &(pos, v)) in rows.iter().enumerate() {
        let slot = seq.get_mut(pos as usize).ok_or_else(|| Error::Parse {
            line: line + 2,
            message: format!("position {pos} out of range for {n} rows"),
        })?;
        if slot.replace(v).is_some() {
            return Err(Error::Parse {
                line: line + 2,
                message: format!("position {pos} listed twice"),
            });
        }
    }
    let seq: Vec<u64> = seq.into_iter().map(|v| v.expect("every position filled")).collect();
    let mut ids = seq.clone();
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidOrdering("a vertex appears at two positions".into()));
    }
    Ok(seq)
}

/// Restricts an ordering and a partition to their common vertex ids and
/// re-indexes both over that set. Returns the shared ids in sequence order.
pub fn join_on_ids(sequence: &[u64], labels: &[(u64, usize)]) -> Result<(Vec<u64>, Ordering, Partition)> {
    let by_id: HashMap<u64, usize> = labels.iter().copied().collect();
    let common: Vec<u64> = sequence.iter().copied().filter(|v| by_id.contains_key(v)).collect();
    let dropped = sequence.len() + labels.len() - 2 * common.len();
    if dropped > 0 {
        log::warn!("{dropped} vertices appear in only one of the ordering and the partition");
    }
    if common.is_empty() {
        return Err(Error::Config("ordering and partition share no vertices".into()));
    }
    // Vertex i of the joined problem is the i-th shared id along the sequence.
    let pi = Ordering::identity(common.len());
    let sigma = Partition::from_labels(common.iter().map(|v| by_id[v]).collect());
    Ok((common, pi, sigma))
}

/// Aligns two partitions by vertex id over their common vertices.
pub fn join_partitions(a: &[(u64, usize)], b: &[(u64, usize)]) -> Result<(Partition, Partition)> {
    let by_id: HashMap<u64, usize> = b.iter().copied().collect();
    let (la, lb): (Vec<usize>, Vec<usize>) = a
        .iter()
        .filter_map(|&(v, l)| by_id.get(&v).map(|&m| (l, m)))
        .unzip();
    let dropped = a.len() + b.len() - 2 * la.len();
    if dropped > 0 {
        log::warn!("{dropped} vertices appear in only one partition");
    }
    if la.is_empty() {
        return Err(Error::Config("partitions share no vertices".into()));
    }
    Ok((Partition::from_labels(la), Partition::from_labels(lb)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_round_trip() {
        let sigma = Partition::from_labels(vec![1, 0, 1]);
        let mut buf = Vec::new();
        write_partition_csv(&sigma, Some(&[5, 9, 7]), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "vertex,label\n5,1\n9,0\n7,1\n");
        assert_eq!(read_partition_csv(&text).unwrap(), vec![(5, 1), (9, 0), (7, 1)]);
    }

    #[test]
    fn ordering_round_trip() {
        let pi = Ordering::from_sequence(vec![2, 0, 1]).unwrap();
        let mut buf = Vec::new();
        write_ordering_csv(&pi, None, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "position,vertex\n0,2\n1,0\n2,1\n");
        assert_eq!(read_ordering_csv(&text).unwrap(), vec![2, 0, 1]);
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(read_partition_csv("vertex,group\n0,1\n").is_err());
        assert!(read_partition_csv("vertex,label\n0,x\n").is_err());
        assert!(read_partition_csv("vertex,label\n0,1\n0,2\n").is_err());
        assert!(read_ordering_csv("position,vertex\n0,1\n0,2\n").is_err());
        assert!(read_ordering_csv("position,vertex\n0,1\n5,2\n").is_err());
        assert!(read_ordering_csv("position,vertex\n0,1\n1,1\n").is_err());
    }

    #[test]
    fn reordered_matrix_export() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let pi = Ordering::from_sequence(vec![1, 0, 2]).unwrap();
        let sigma = Partition::from_labels(vec![0, 0, 1]);
        let mut buf = Vec::new();
        write_reordered_matrix_csv(&g, &pi, &sigma, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "row,col,group\n0,1,0\n0,2,0\n1,0,0\n2,0,1\n"
        );
    }

    #[test]
    fn join_keeps_common_vertices_in_sequence_order() {
        let (ids, pi, sigma) = join_on_ids(&[7, 3, 5, 1], &[(1, 0), (3, 1), (7, 1)]).unwrap();
        assert_eq!(ids, vec![7, 3, 1]);
        assert_eq!(pi.len(), 3);
        assert_eq!(sigma.labels(), &[1, 1, 0]);
        assert!(join_on_ids(&[1], &[(2, 0)]).is_err());
        let (a, b) = join_partitions(&[(1, 0), (2, 1)], &[(2, 0), (1, 0), (3, 1)]).unwrap();
        assert_eq!((a.labels(), b.labels()), (&[0, 1][..], &[0, 0][..]));
    }
}
