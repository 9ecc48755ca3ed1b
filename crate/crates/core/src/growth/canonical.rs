//! Planar webs and their normal form under contraction of edges joining two vertices of the
//! same family (two merges or two splits, by flow).
//!
//! A web is built from segments with signed upward-flow labels. Segment ends meet at
//! vertices (with a clockwise port order), at bivalent junctions, or at the boundary.
//! Junctions are fused away, so bends, caps, cups and parallel strands leave no trace. The
//! normal form names everything by discovery order from the ordered boundary, so two webs
//! are equal iff their normal forms are.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use super::{Cell, Fill, FlowDiagram};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Sw,
    Se,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SegmentId {
    /// Strand above letter `j`.
    Top(usize),
    /// Bottom edge of a cell.
    Out { row: usize, col: usize, side: Side },
    /// Internal edge of a merge-split cell.
    Mid { row: usize, col: usize },
    /// Free-form segment of a hand-built web.
    Named(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundarySlot {
    Top(usize),
    Oa(usize),
    Ob(usize),
    Named(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    Lower(SegmentId),
    Upper(SegmentId),
}

impl End {
    fn segment(self) -> SegmentId {
        match self {
            End::Lower(s) | End::Upper(s) => s,
        }
    }

    /// Flow into the meeting point through this end, given the segment's upward label.
    fn inflow(self, label: i32) -> i32 {
        match self {
            End::Upper(_) => label,
            End::Lower(_) => -label,
        }
    }
}

/// A segment attached to a vertex; `above` means the segment leaves the vertex upward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Port {
    pub seg: SegmentId,
    pub above: bool,
}

impl Port {
    pub fn above(seg: SegmentId) -> Self {
        Self { seg, above: true }
    }

    pub fn below(seg: SegmentId) -> Self {
        Self { seg, above: false }
    }

    fn end(self) -> End {
        if self.above {
            End::Lower(self.seg)
        } else {
            End::Upper(self.seg)
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WebError {
    #[error("segment {0:?} has no label")]
    UnknownSegment(SegmentId),
    #[error("segment end {0:?} is attached twice")]
    Reused(End),
    #[error("segment end {0:?} is not attached")]
    Dangling(End),
    #[error("flow is not conserved at {0}")]
    Unbalanced(String),
}

/// A planar web under construction.
#[derive(Clone, Debug, Default)]
pub struct Web {
    labels: BTreeMap<SegmentId, i32>,
    vertices: Vec<Vec<Port>>,
    junctions: Vec<(End, End)>,
    boundary: Vec<(BoundarySlot, End)>,
}

/// Target of a wire end in the normal form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Boundary(BoundarySlot),
    /// Vertex number and port number, both in discovery order.
    Port(usize, usize),
}

/// One port of a vertex in the normal form: wire label, inflow flag, far end.
pub type CanonicalPort = (u32, bool, Target);

/// Normal form of a web.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalWeb {
    /// Non-zero boundary points in slot order with their signed labels and far ends.
    pub boundary: Vec<(BoundarySlot, i32, Target)>,
    /// Vertices reachable from the boundary, ports clockwise from the arrival port.
    pub vertices: Vec<Vec<CanonicalPort>>,
    /// Components without boundary, each in its least encoding, sorted.
    pub closed: Vec<Vec<Vec<CanonicalPort>>>,
    /// Labels of closed loops without vertices, sorted.
    pub loops: Vec<u32>,
}

impl CanonicalWeb {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len() + self.closed.iter().map(Vec::len).sum::<usize>()
    }

    /// Vertex valences, sorted.
    pub fn valences(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.vertices.iter().chain(self.closed.iter().flatten()).map(Vec::len).collect();
        v.sort_unstable();
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    Merge,
    Split,
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Terminal {
    Port(usize, usize),
    Boundary(BoundarySlot),
}

#[derive(Clone, Copy, Debug)]
struct WirePort {
    wire: usize,
    inflow: bool,
    label: u32,
}

impl Web {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a segment. Segments with label 0 are absent and everything attached to
    /// them is dropped.
    pub fn segment(&mut self, id: SegmentId, label: i32) -> &mut Self {
        self.labels.insert(id, label);
        self
    }

    fn label(&self, s: SegmentId) -> Result<i32, WebError> {
        self.labels.get(&s).copied().ok_or(WebError::UnknownSegment(s))
    }

    /// Adds a vertex with clockwise ports. Absent segments are dropped; two remaining ports
    /// become a junction.
    pub fn vertex(&mut self, ports: &[Port]) -> Result<&mut Self, WebError> {
        let mut live = Vec::new();
        for p in ports {
            if self.label(p.seg)? != 0 {
                live.push(*p);
            }
        }
        match live.len() {
            0 => {}
            1 => return Err(WebError::Unbalanced(format!("{:?}", live[0].seg))),
            2 => {
                self.junction(live[0].end(), live[1].end())?;
            }
            _ => self.vertices.push(live),
        }
        Ok(self)
    }

    /// Joins two segment ends.
    pub fn junction(&mut self, a: End, b: End) -> Result<&mut Self, WebError> {
        let (la, lb) = (self.label(a.segment())?, self.label(b.segment())?);
        if la == 0 && lb == 0 {
            return Ok(self);
        }
        if a.inflow(la) + b.inflow(lb) != 0 {
            return Err(WebError::Unbalanced(format!("{a:?}/{b:?}")));
        }
        self.junctions.push((a, b));
        Ok(self)
    }

    pub fn boundary(&mut self, slot: BoundarySlot, end: End) -> Result<&mut Self, WebError> {
        if self.label(end.segment())? != 0 {
            self.boundary.push((slot, end));
        }
        Ok(self)
    }

    /// Fuses junctions into wires and returns, per vertex, its ports as wires; plus each
    /// wire's terminals and label, and the boundary terminals.
    #[allow(clippy::type_complexity)]
    fn wires(&self) -> Result<(Vec<Vec<WirePort>>, Vec<u32>, Vec<(BoundarySlot, i32, usize)>, usize), WebError> {
        let segs: Vec<SegmentId> = self.labels.iter().filter(|(_, &l)| l != 0).map(|(s, _)| *s).collect();
        let index: HashMap<SegmentId, usize> = segs.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut parent: Vec<usize> = (0..segs.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut used: BTreeSet<End> = BTreeSet::new();
        let mut claim = |e: End| -> Result<(), WebError> {
            if used.insert(e) {
                Ok(())
            } else {
                Err(WebError::Reused(e))
            }
        };
        for (a, b) in &self.junctions {
            claim(*a)?;
            claim(*b)?;
            let (x, y) = (find(&mut parent, index[&a.segment()]), find(&mut parent, index[&b.segment()]));
            parent[x] = y;
        }
        for v in &self.vertices {
            for p in v {
                claim(p.end())?;
            }
        }
        for (_, e) in &self.boundary {
            claim(*e)?;
        }
        for s in &segs {
            for e in [End::Lower(*s), End::Upper(*s)] {
                if !used.contains(&e) {
                    return Err(WebError::Dangling(e));
                }
            }
        }
        let mut wire_of: HashMap<usize, usize> = HashMap::new();
        let mut wire_label = Vec::new();
        for (i, s) in segs.iter().enumerate() {
            let root = find(&mut parent, i);
            let next = wire_of.len();
            let w = *wire_of.entry(root).or_insert(next);
            if w == wire_label.len() {
                wire_label.push(self.labels[s].unsigned_abs());
            } else if wire_label[w] != self.labels[s].unsigned_abs() {
                return Err(WebError::Unbalanced(format!("{s:?}")));
            }
        }
        let wire = |s: &SegmentId, p: &mut Vec<usize>| wire_of[&find(p, index[s])];
        let mut vertices = Vec::new();
        for (vi, v) in self.vertices.iter().enumerate() {
            let mut ports = Vec::new();
            let mut balance = 0;
            for p in v {
                let l = self.labels[&p.seg];
                let into = p.end().inflow(l);
                balance += into;
                ports.push(WirePort { wire: wire(&p.seg, &mut parent), inflow: into > 0, label: l.unsigned_abs() });
            }
            if balance != 0 {
                return Err(WebError::Unbalanced(format!("vertex {vi}")));
            }
            vertices.push(ports);
        }
        let mut boundary: Vec<(BoundarySlot, i32, usize)> =
            self.boundary.iter().map(|(slot, e)| (*slot, self.labels[&e.segment()], wire(&e.segment(), &mut parent))).collect();
        boundary.sort_by_key(|b| b.0);
        let n_wires = wire_label.len();
        Ok((vertices, wire_label, boundary, n_wires))
    }

    /// Normal form and the number of contractions performed.
    pub fn normal_form(&self) -> Result<(CanonicalWeb, usize), WebError> {
        let (vs, wire_label, boundary, n_wires) = self.wires()?;
        let mut vertices: Vec<Option<Vec<WirePort>>> = vs.into_iter().map(Some).collect();
        let mut contractions = 0;
        loop {
            let terms = terminals(&vertices, &boundary, n_wires);
            let family = |v: &[WirePort]| {
                let ins = v.iter().filter(|p| p.inflow).count();
                let outs = v.len() - ins;
                if outs == 1 && ins >= 2 {
                    Family::Merge
                } else if ins == 1 && outs >= 2 {
                    Family::Split
                } else {
                    Family::Other
                }
            };
            let found = terms.iter().find_map(|t| match t.as_slice() {
                [Terminal::Port(u, a), Terminal::Port(v, b)] if u != v => {
                    let fu = family(vertices[*u].as_ref().unwrap());
                    let fv = family(vertices[*v].as_ref().unwrap());
                    (fu == fv && fu != Family::Other).then_some((*u, *a, *v, *b))
                }
                _ => None,
            });
            let Some((u, a, v, b)) = found else { break };
            let pu = vertices[u].take().unwrap();
            let pv = vertices[v].take().unwrap();
            let mut merged: Vec<WirePort> = (1..pu.len()).map(|k| pu[(a + k) % pu.len()]).collect();
            merged.extend((1..pv.len()).map(|k| pv[(b + k) % pv.len()]));
            vertices[u] = Some(merged);
            contractions += 1;
        }
        let terms = terminals(&vertices, &boundary, n_wires);
        Ok((encode(&vertices, &boundary, &terms, &wire_label), contractions))
    }

    pub fn canonical(&self) -> Result<CanonicalWeb, WebError> {
        self.normal_form().map(|(c, _)| c)
    }
}

fn terminals(vertices: &[Option<Vec<WirePort>>], boundary: &[(BoundarySlot, i32, usize)], n_wires: usize) -> Vec<Vec<Terminal>> {
    let mut t = vec![Vec::new(); n_wires];
    for (vi, v) in vertices.iter().enumerate() {
        for (k, p) in v.iter().flatten().enumerate() {
            t[p.wire].push(Terminal::Port(vi, k));
        }
    }
    for (slot, _, w) in boundary {
        t[*w].push(Terminal::Boundary(*slot));
    }
    t
}

fn far_end(terms: &[Vec<Terminal>], wire: usize, here: Terminal) -> Terminal {
    let t = &terms[wire];
    if t[0] == here {
        t[1]
    } else {
        t[0]
    }
}

/// Discovery from seeds: returns vertex order and the rotation (arrival port) of each.
fn discover(
    vertices: &[Option<Vec<WirePort>>],
    terms: &[Vec<Terminal>],
    seeds: impl IntoIterator<Item = Terminal>,
    rot: &mut HashMap<usize, usize>,
    order: &mut Vec<usize>,
) {
    let mut queue = VecDeque::new();
    fn visit(t: Terminal, rot: &mut HashMap<usize, usize>, order: &mut Vec<usize>, queue: &mut VecDeque<usize>) {
        if let Terminal::Port(v, k) = t {
            if let std::collections::hash_map::Entry::Vacant(e) = rot.entry(v) {
                e.insert(k);
                order.push(v);
                queue.push_back(v);
            }
        }
    }
    for seed in seeds {
        visit(seed, rot, order, &mut queue);
        while let Some(v) = queue.pop_front() {
            let ports = vertices[v].as_ref().unwrap();
            let start = rot[&v];
            for k in 0..ports.len() {
                let idx = (start + k) % ports.len();
                let far = far_end(terms, ports[idx].wire, Terminal::Port(v, idx));
                visit(far, rot, order, &mut queue);
            }
        }
    }
}

fn encode_vertices(
    vertices: &[Option<Vec<WirePort>>],
    terms: &[Vec<Terminal>],
    order: &[usize],
    rot: &HashMap<usize, usize>,
    id: &HashMap<usize, usize>,
) -> Vec<Vec<CanonicalPort>> {
    let target = |t: Terminal| match t {
        Terminal::Boundary(s) => Target::Boundary(s),
        Terminal::Port(v, k) => {
            let len = vertices[v].as_ref().unwrap().len();
            Target::Port(id[&v], (k + len - rot[&v]) % len)
        }
    };
    order
        .iter()
        .map(|&v| {
            let ports = vertices[v].as_ref().unwrap();
            (0..ports.len())
                .map(|k| {
                    let idx = (rot[&v] + k) % ports.len();
                    let p = ports[idx];
                    (p.label, p.inflow, target(far_end(terms, p.wire, Terminal::Port(v, idx))))
                })
                .collect()
        })
        .collect()
}

fn encode(
    vertices: &[Option<Vec<WirePort>>],
    boundary: &[(BoundarySlot, i32, usize)],
    terms: &[Vec<Terminal>],
    wire_label: &[u32],
) -> CanonicalWeb {
    let mut rot = HashMap::new();
    let mut order = Vec::new();
    let seeds: Vec<Terminal> = boundary.iter().map(|(s, _, w)| far_end(terms, *w, Terminal::Boundary(*s))).collect();
    discover(vertices, terms, seeds, &mut rot, &mut order);
    let id: HashMap<usize, usize> = order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let main = encode_vertices(vertices, terms, &order, &rot, &id);
    let boundary_enc = boundary
        .iter()
        .map(|(s, l, w)| {
            let t = match far_end(terms, *w, Terminal::Boundary(*s)) {
                Terminal::Boundary(b) => Target::Boundary(b),
                Terminal::Port(v, k) => {
                    let len = vertices[v].as_ref().unwrap().len();
                    Target::Port(id[&v], (k + len - rot[&v]) % len)
                }
            };
            (*s, *l, t)
        })
        .collect();

    // Components without boundary: least encoding over all starting ports.
    let mut closed = Vec::new();
    let mut seen: BTreeSet<usize> = order.iter().copied().collect();
    for v in 0..vertices.len() {
        if vertices[v].is_none() || seen.contains(&v) {
            continue;
        }
        let mut rot = HashMap::new();
        let mut members = Vec::new();
        discover(vertices, terms, [Terminal::Port(v, 0)], &mut rot, &mut members);
        let mut best: Option<Vec<Vec<CanonicalPort>>> = None;
        for &u in &members {
            for k in 0..vertices[u].as_ref().unwrap().len() {
                let mut rot = HashMap::new();
                let mut order = Vec::new();
                discover(vertices, terms, [Terminal::Port(u, k)], &mut rot, &mut order);
                let id: HashMap<usize, usize> = order.iter().enumerate().map(|(i, v)| (*v, i)).collect();
                let enc = encode_vertices(vertices, terms, &order, &rot, &id);
                if best.as_ref().is_none_or(|b| enc < *b) {
                    best = Some(enc);
                }
            }
        }
        seen.extend(members);
        closed.extend(best);
    }
    closed.sort();

    let mut loops: Vec<u32> = terms.iter().enumerate().filter(|(_, t)| t.is_empty()).map(|(w, _)| wire_label[w]).collect();
    loops.sort_unstable();
    CanonicalWeb { boundary: boundary_enc, vertices: main, closed, loops }
}

/// Builds the web of a flow diagram.
pub fn web_of(d: &FlowDiagram) -> Result<Web, WebError> {
    let mut web = Web::new();
    let r = d.r;
    for c in d.iter_cells() {
        let (sw, se) = c.outputs();
        web.segment(SegmentId::Out { row: c.row, col: c.col, side: Side::Sw }, sw);
        web.segment(SegmentId::Out { row: c.row, col: c.col, side: Side::Se }, se);
        if let Some(m) = c.middle() {
            web.segment(SegmentId::Mid { row: c.row, col: c.col }, m);
        }
        if let Fill::Letter(l) = c.fill {
            web.segment(SegmentId::Top(c.col), l.z_label().signum());
        }
    }
    for c in d.iter_cells() {
        add_cell(&mut web, c)?;
    }
    for j in 0..r {
        web.boundary(BoundarySlot::Top(j), End::Upper(SegmentId::Top(j)))?;
    }
    for i in 0..r {
        web.boundary(BoundarySlot::Oa(i), End::Lower(SegmentId::Out { row: i, col: r - 1 - i, side: Side::Se }))?;
        web.boundary(BoundarySlot::Ob(i), End::Lower(SegmentId::Out { row: i, col: 0, side: Side::Sw }))?;
    }
    Ok(web)
}

fn add_cell(web: &mut Web, c: &Cell) -> Result<(), WebError> {
    let (i, j) = (c.row, c.col);
    let bl = SegmentId::Out { row: i, col: j, side: Side::Sw };
    let br = SegmentId::Out { row: i, col: j, side: Side::Se };
    if let Fill::Letter(_) = c.fill {
        web.vertex(&[Port::above(SegmentId::Top(j)), Port::below(br), Port::below(bl)])?;
        return Ok(());
    }
    let tl = SegmentId::Out { row: i - 1, col: j, side: Side::Se };
    let tr = SegmentId::Out { row: i - 1, col: j + 1, side: Side::Sw };
    match c.fill {
        Fill::Through { .. } => match c.middle() {
            Some(_) => {
                let mid = SegmentId::Mid { row: i, col: j };
                web.vertex(&[Port::above(mid), Port::below(br), Port::below(bl)])?;
                web.vertex(&[Port::above(tl), Port::above(tr), Port::below(mid)])?;
            }
            None => {
                web.junction(End::Upper(bl), End::Upper(br))?;
                web.junction(End::Lower(tl), End::Lower(tr))?;
            }
        },
        Fill::Parallel => {
            web.junction(End::Upper(bl), End::Lower(tl))?;
            web.junction(End::Upper(br), End::Lower(tr))?;
        }
        Fill::Empty | Fill::Letter(_) => {}
    }
    Ok(())
}

/// Normal form of a flow diagram.
pub fn canonicalize(d: &FlowDiagram) -> Result<CanonicalWeb, WebError> {
    web_of(d)?.canonical()
}
