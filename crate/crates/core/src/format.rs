//! Text formats: floorplans, object files and query workloads.
//!
//! ```text
//! unit=m floors=2
//! P 1 0 room 4 0 0 10 0 10 10 0 10
//! P 7 0 staircase 20 4 ...
//! D 0 0 0 5 2 1:0 0:1
//! O 0 0 5 5
//! RQ 0 0 5 5 600
//! KNN 1 0 5 5 10
//! SPDQ 2 0 5 5 1 40 2 1500
//! ```

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use crate::error::SpaceError;
use crate::geom::Point2;
use crate::space::{Door, DoorId, IndoorObject, IndoorPoint, IndoorSpace, ObjectId, Partition, PartitionId, PartitionKind};

/// Decimal with at most nine fractional digits and no trailing zeros.
pub fn fmt_num(x: f64) -> String {
    let mut s = format!("{x:.9}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn parse_err(line: usize, message: impl Into<String>) -> SpaceError {
    SpaceError::Parse { line, message: message.into() }
}

/// Non-empty, comment-stripped lines with 1-based numbers.
fn records<R: BufRead>(r: R) -> Result<Vec<(usize, Vec<String>)>, SpaceError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| parse_err(i + 1, e.to_string()))?;
        let body = line.split('#').next().unwrap_or("");
        let toks: Vec<String> = body.split_whitespace().map(str::to_string).collect();
        if !toks.is_empty() {
            out.push((i + 1, toks));
        }
    }
    Ok(out)
}

struct Fields<'a> {
    line: usize,
    toks: &'a [String],
    at: usize,
}

impl<'a> Fields<'a> {
    fn new(line: usize, toks: &'a [String]) -> Self {
        Fields { line, toks, at: 1 }
    }

    fn next(&mut self, what: &str) -> Result<&'a str, SpaceError> {
        let t = self.toks.get(self.at).ok_or_else(|| parse_err(self.line, format!("missing {what}")))?;
        self.at += 1;
        Ok(t)
    }

    fn num<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, SpaceError> {
        let t = self.next(what)?;
        t.parse().map_err(|_| parse_err(self.line, format!("bad {what} '{t}'")))
    }

    fn coord(&mut self, what: &str) -> Result<f64, SpaceError> {
        let x: f64 = self.num(what)?;
        if !x.is_finite() {
            return Err(SpaceError::NonFinite(format!("line {}", self.line)));
        }
        Ok(x)
    }

    fn point(&mut self) -> Result<IndoorPoint, SpaceError> {
        let floor = self.num("floor")?;
        Ok(IndoorPoint::new(floor, self.coord("x")?, self.coord("y")?))
    }

    fn done(&self) -> Result<(), SpaceError> {
        if self.at < self.toks.len() {
            return Err(parse_err(self.line, format!("unexpected '{}'", self.toks[self.at])));
        }
        Ok(())
    }
}

pub fn write_space<W: Write>(space: &IndoorSpace, mut w: W) -> io::Result<()> {
    writeln!(w, "unit=m floors={}", space.floors())?;
    for p in space.partitions() {
        let mut line = format!("P {} {} {}", p.id.0, p.floor, p.kind.as_str());
        if let Some(t) = p.traversal_length {
            let _ = write!(line, " {}", fmt_num(t));
        }
        let _ = write!(line, " {}", p.boundary.len());
        for c in &p.boundary {
            let _ = write!(line, " {} {}", fmt_num(c.x), fmt_num(c.y));
        }
        writeln!(w, "{line}")?;
    }
    for d in space.doors() {
        let l = d.location;
        let mut line = format!("D {} {} {} {} {}", d.id.0, l.floor, fmt_num(l.x), fmt_num(l.y), d.transitions.len());
        for (a, b) in &d.transitions {
            let _ = write!(line, " {}:{}", a.0, b.0);
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn space_to_string(space: &IndoorSpace) -> String {
    let mut buf = Vec::new();
    write_space(space, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Parses and validates a floorplan; the outdoor partition is added when the
/// document does not declare it.
pub fn read_space<R: BufRead>(r: R) -> Result<IndoorSpace, SpaceError> {
    let mut partitions = Vec::new();
    let mut doors = Vec::new();
    let mut header = false;
    for (line, toks) in records(r)? {
        match toks[0].as_str() {
            t if t.starts_with("unit=") || t.starts_with("floors=") => {
                for kv in &toks {
                    match kv.split_once('=') {
                        Some(("unit", "m")) | Some(("floors", _)) => {}
                        _ => return Err(parse_err(line, format!("bad header field '{kv}'"))),
                    }
                }
                header = true;
            }
            "P" => {
                let mut f = Fields::new(line, &toks);
                let id = PartitionId(f.num("partition id")?);
                let floor = f.num("floor")?;
                let kind_s = f.next("kind")?;
                let kind = PartitionKind::parse(kind_s).ok_or_else(|| parse_err(line, format!("unknown kind '{kind_s}'")))?;
                let traversal_length = if kind == PartitionKind::Staircase { Some(f.coord("traversal length")?) } else { None };
                let k: usize = f.num("vertex count")?;
                let mut boundary = Vec::with_capacity(k);
                for _ in 0..k {
                    boundary.push(Point2::new(f.coord("x")?, f.coord("y")?));
                }
                f.done()?;
                partitions.push(Partition { id, floor, kind, boundary, traversal_length });
            }
            "D" => {
                let mut f = Fields::new(line, &toks);
                let id = DoorId(f.num("door id")?);
                let location = f.point()?;
                let m: usize = f.num("transition count")?;
                let mut transitions = Vec::with_capacity(m);
                for _ in 0..m {
                    let t = f.next("transition")?;
                    let (a, b) = t.split_once(':').ok_or_else(|| parse_err(line, format!("bad transition '{t}'")))?;
                    let a: u32 = a.parse().map_err(|_| parse_err(line, format!("bad transition '{t}'")))?;
                    let b: u32 = b.parse().map_err(|_| parse_err(line, format!("bad transition '{t}'")))?;
                    transitions.push((PartitionId(a), PartitionId(b)));
                }
                f.done()?;
                doors.push(Door { id, location, transitions });
            }
            other => return Err(parse_err(line, format!("unknown record '{other}'"))),
        }
    }
    if !header {
        return Err(parse_err(0, "missing header 'unit=m floors=<n>'"));
    }
    if partitions.is_empty() {
        return Err(SpaceError::NoPartitions);
    }
    partitions.sort_by_key(|p| p.id);
    doors.sort_by_key(|d| d.id);
    if partitions[0].id != PartitionId::OUTDOOR {
        partitions.insert(0, Partition::outdoor());
    }
    IndoorSpace::new(partitions, doors)
}

pub fn write_objects<W: Write>(objects: &[IndoorObject], mut w: W) -> io::Result<()> {
    for o in objects {
        let l = o.location;
        writeln!(w, "O {} {} {} {}", o.id.0, l.floor, fmt_num(l.x), fmt_num(l.y))?;
    }
    Ok(())
}

/// Reads objects and resolves their hosts against `space`.
pub fn read_objects<R: BufRead>(space: &IndoorSpace, r: R) -> Result<Vec<IndoorObject>, SpaceError> {
    let mut out = Vec::new();
    for (line, toks) in records(r)? {
        if toks[0] != "O" {
            return Err(parse_err(line, format!("unknown record '{}'", toks[0])));
        }
        let mut f = Fields::new(line, &toks);
        let id = ObjectId(f.num("object id")?);
        let p = f.point()?;
        f.done()?;
        let o = space
            .locate_object(id, p)
            .ok_or_else(|| parse_err(line, format!("object {id} at {p} is not inside any partition")))?;
        out.push(o);
    }
    out.sort_by_key(|o| o.id);
    for (i, o) in out.iter().enumerate() {
        if o.id.index() != i {
            return Err(parse_err(0, format!("object ids must be dense 0..n; found {} at position {i}", o.id)));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Query {
    Range { id: u32, p: IndoorPoint, r: f64 },
    Knn { id: u32, p: IndoorPoint, k: usize },
    Spdq { id: u32, p: IndoorPoint, q: IndoorPoint, s2t: f64 },
}

impl Query {
    pub fn id(&self) -> u32 {
        match self {
            Query::Range { id, .. } | Query::Knn { id, .. } | Query::Spdq { id, .. } => *id,
        }
    }

    /// The varied parameter: r, k or the s2t target.
    pub fn param(&self) -> f64 {
        match self {
            Query::Range { r, .. } => *r,
            Query::Knn { k, .. } => *k as f64,
            Query::Spdq { s2t, .. } => *s2t,
        }
    }

    pub fn to_line(&self) -> String {
        let pt = |p: &IndoorPoint| format!("{} {} {}", p.floor, fmt_num(p.x), fmt_num(p.y));
        match self {
            Query::Range { id, p, r } => format!("RQ {id} {} {}", pt(p), fmt_num(*r)),
            Query::Knn { id, p, k } => format!("KNN {id} {} {k}", pt(p)),
            Query::Spdq { id, p, q, s2t } => format!("SPDQ {id} {} {} {}", pt(p), pt(q), fmt_num(*s2t)),
        }
    }
}

pub fn write_workload<W: Write>(queries: &[Query], mut w: W) -> io::Result<()> {
    for q in queries {
        writeln!(w, "{}", q.to_line())?;
    }
    Ok(())
}

pub fn read_workload<R: BufRead>(r: R) -> Result<Vec<Query>, SpaceError> {
    let mut out = Vec::new();
    for (line, toks) in records(r)? {
        let mut f = Fields::new(line, &toks);
        let q = match toks[0].as_str() {
            "RQ" => Query::Range { id: f.num("query id")?, p: f.point()?, r: f.coord("radius")? },
            "KNN" => Query::Knn { id: f.num("query id")?, p: f.point()?, k: f.num("k")? },
            "SPDQ" => Query::Spdq { id: f.num("query id")?, p: f.point()?, q: f.point()?, s2t: f.coord("s2t")? },
            other => return Err(parse_err(line, format!("unknown query kind '{other}'"))),
        };
        f.done()?;
        out.push(q);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn numbers() {
        assert_eq!(fmt_num(10.0), "10");
        assert_eq!(fmt_num(0.1 + 0.2), "0.3");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333");
    }

    #[test]
    fn space_round_trip() {
        for s in [fixtures::fix_a(), fixtures::fix_u(), fixtures::two_floor_l()] {
            let text = space_to_string(&s);
            let back = read_space(text.as_bytes()).unwrap();
            assert_eq!(back.partitions(), s.partitions());
            assert_eq!(back.doors(), s.doors());
            assert_eq!(space_to_string(&back), text);
        }
    }

    #[test]
    fn outdoor_is_inserted() {
        let doc = "# FIX-A\nunit=m floors=1\nP 1 0 room 4 0 0 10 0 10 10 0 10\nD 0 0 0 5 2 1:0 0:1\n";
        let s = read_space(doc.as_bytes()).unwrap();
        assert_eq!(s.num_partitions(), 2);
        assert!(s.partition(PartitionId(0)).is_outdoor());
    }

    #[test]
    fn errors_name_the_entity() {
        let off = "unit=m floors=1\nP 1 0 room 4 0 0 10 0 10 10 0 10\nD 0 0 0.5 5 2 1:0 0:1\n";
        assert!(matches!(read_space(off.as_bytes()), Err(SpaceError::DoorOffBoundary { door: DoorId(0), .. })));
        let dangling = "unit=m floors=1\nP 1 0 room 4 0 0 10 0 10 10 0 10\nD 0 0 0 5 2 1:9 9:1\n";
        assert!(matches!(read_space(dangling.as_bytes()), Err(SpaceError::DanglingPartition { partition: 9, .. })));
        let bad = "unit=m floors=1\nP 1 0 room 4 0 0 10 0\n";
        assert!(matches!(read_space(bad.as_bytes()), Err(SpaceError::Parse { line: 2, .. })));
        assert!(matches!(read_space("unit=m floors=0\n".as_bytes()), Err(SpaceError::NoPartitions)));
    }

    #[test]
    fn objects_and_workload_round_trip() {
        let s = fixtures::fix_a();
        let objs = fixtures::fix_a_objects(&s);
        let mut buf = Vec::new();
        write_objects(&objs, &mut buf).unwrap();
        assert_eq!(read_objects(&s, buf.as_slice()).unwrap(), objs);
        let w = vec![
            Query::Range { id: 0, p: IndoorPoint::new(0, 2.0, 5.0), r: 9.0 },
            Query::Knn { id: 1, p: IndoorPoint::new(0, 2.0, 5.0), k: 2 },
            Query::Spdq { id: 2, p: IndoorPoint::new(0, 2.0, 5.0), q: IndoorPoint::new(0, 15.0, 5.0), s2t: 13.0 },
        ];
        let mut buf = Vec::new();
        write_workload(&w, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap().lines().next(), Some("RQ 0 0 2 5 9"));
        assert_eq!(read_workload(buf.as_slice()).unwrap(), w);
    }
}
