//! Trivalent-graph evaluator: an independent route to the correlators that
//! cross-checks the residue recursion.
//!
//! A graph for ω_{k+1}^(g) has 2g+k-1 trivalent vertices carrying a
//! left/right child marking, one root leg, k labeled leaves, a spanning
//! planar binary skeleton of arrowed edges, and g+k non-arrowed edges
//! (k to the leaves, g joining a vertex to itself or to a descendant).
//! When an arrowed edge and a non-arrowed edge to a descendant leave the
//! same vertex, the arrowed edge must be the left child; dropping that
//! marking rule inflates the count (13 instead of 5 at genus two), which
//! the tests pin.
//!
//! Weights attach the recursion kernel to arrowed edges and the canonical
//! bilinear differential to non-arrowed ones, taking branchpoint residues
//! from the leaves back to the root.

use crate::curve::SpectralCurve;
use crate::error::Result;
use crate::field::{FieldElem, FieldTag, Rational};
use crate::forms::{PoleForm, SeriesOfForms, Terms};
use crate::series::{laurent_expand, LaurentSeries};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotContent {
    /// Arrowed edge to a child vertex.
    Child(usize),
    /// Non-arrowed edge to the labeled leaf.
    Leaf(usize),
    /// Non-arrowed inner edge (index into `edges`).
    Inner(usize),
    /// Non-arrowed edge joining this vertex's two slots.
    SelfLoop,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecursionGraph {
    pub g: u32,
    /// Number of labeled leaves (the form has k+1 slots).
    pub k: usize,
    /// Parent link for every non-root vertex.
    pub parent: Vec<Option<(usize, Side)>>,
    /// Slot contents, indexed by vertex then side.
    pub slots: Vec<[SlotContent; 2]>,
    /// Inner edges as (upper endpoint, lower endpoint), each (vertex, side);
    /// a self-loop repeats the vertex.
    pub edges: Vec<((usize, Side), (usize, Side))>,
}

impl RecursionGraph {
    pub fn vertex_count(&self) -> usize {
        self.slots.len()
    }

    fn is_ancestor(&self, up: usize, down: usize) -> bool {
        let mut v = down;
        while let Some((p, _)) = self.parent[v] {
            if p == up {
                return true;
            }
            v = p;
        }
        false
    }

    /// Canonical bracketed notation, e.g. `K[L=K[L=leaf1 R=e0] R=e0]`.
    pub fn notation(&self) -> String {
        fn slot(g: &RecursionGraph, c: &SlotContent) -> String {
            match c {
                SlotContent::Child(v) => vertex(g, *v),
                SlotContent::Leaf(l) => format!("leaf{}", l + 1),
                SlotContent::Inner(e) => format!("e{e}"),
                SlotContent::SelfLoop => "loop".into(),
            }
        }
        fn vertex(g: &RecursionGraph, v: usize) -> String {
            format!(
                "K[L={} R={}]",
                slot(g, &g.slots[v][0]),
                slot(g, &g.slots[v][1])
            )
        }
        vertex(self, 0)
    }
}

impl fmt::Display for RecursionGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.notation())
    }
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// All graphs for ω_{k+1}^(g); requires stability k + 2g ≥ 3 (counting the
/// root leg).
pub fn enumerate_graphs(g: u32, k: usize) -> Vec<RecursionGraph> {
    enumerate(g, k, true)
}

/// The same enumeration without the left-child marking rule — the
/// over-counted set the canonical one is compared against.
pub fn enumerate_graphs_relaxed(g: u32, k: usize) -> Vec<RecursionGraph> {
    enumerate(g, k, false)
}

/// Number of pants gluings of a genus-g surface with k+1 boundaries: the
/// gluings of its 2g-2+(k+1) pants correspond bijectively to the graphs
/// (attach a pair of pants to the root boundary, walk left/right choices,
/// arrowed edges to unvisited pants, non-arrowed back-edges otherwise).
pub fn pants_count(g: u32, k: usize) -> usize {
    enumerate_graphs(g, k).len()
}

fn enumerate(g: u32, k: usize, left_child_rule: bool) -> Vec<RecursionGraph> {
    // Stability of ω_{k+1}^(g): 2g - 2 + (k+1) > 0.
    assert!(k + 2 * g as usize >= 2, "stability: k + 2g >= 2");
    let v_count = 2 * g as usize + k - 1;
    let mut out = vec![];
    for skeleton in skeletons(v_count) {
        let free = free_slots(&skeleton);
        let mut leaf_choice = vec![];
        choose_injection(free.len(), k, &mut leaf_choice, &mut |sel| {
            let rest: Vec<(usize, Side)> = free
                .iter()
                .enumerate()
                .filter(|(i, _)| !sel.contains(i))
                .map(|(_, s)| *s)
                .collect();
            let mut pairs = vec![];
            matchings(&skeleton, &rest, &mut pairs, &mut |edges| {
                let graph = assemble(g, k, &skeleton, &free, sel, edges);
                if !left_child_rule || satisfies_left_child_rule(&graph) {
                    out.push(graph);
                }
            });
        });
    }
    // The construction is canonical; dedup-by-notation guards the generator.
    let mut seen = std::collections::BTreeSet::new();
    out.retain(|g| seen.insert(g.notation()));
    out
}

/// Marked binary skeletons in preorder: entry v holds (parent, side).
type Skeleton = Vec<Option<(usize, Side)>>;

fn skeletons(v_count: usize) -> Vec<Skeleton> {
    fn build(n: usize) -> Vec<Vec<(Option<usize>, Option<usize>)>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = vec![];
        for l in 0..n {
            let r = n - 1 - l;
            for lt in build(l) {
                for rt in build(r) {
                    let mut node = vec![(
                        if l > 0 { Some(l) } else { None },
                        if r > 0 { Some(r) } else { None },
                    )];
                    node.extend(lt.clone());
                    node.extend(rt.clone());
                    out.push(node);
                }
            }
        }
        out
    }
    build(v_count)
        .into_iter()
        .map(|nodes| {
            let mut parent: Skeleton = vec![None; nodes.len()];
            fn walk(
                nodes: &[(Option<usize>, Option<usize>)],
                at: usize,
                parent: &mut Skeleton,
            ) -> usize {
                let (l, r) = nodes[at];
                let mut next = at + 1;
                if let Some(lsize) = l {
                    parent[next] = Some((at, Side::Left));
                    walk(nodes, next, parent);
                    next += lsize;
                }
                if let Some(rsize) = r {
                    parent[next] = Some((at, Side::Right));
                    walk(nodes, next, parent);
                    next += rsize;
                }
                next - at
            }
            walk(&nodes, 0, &mut parent);
            parent
        })
        .collect()
}

fn free_slots(skeleton: &Skeleton) -> Vec<(usize, Side)> {
    let n = skeleton.len();
    let mut used = vec![[false; 2]; n];
    for v in 1..n {
        let (p, side) = skeleton[v].expect("non-root has a parent");
        used[p][side_idx(side)] = true;
    }
    let mut out = vec![];
    for (v, u) in used.iter().enumerate() {
        if !u[0] {
            out.push((v, Side::Left));
        }
        if !u[1] {
            out.push((v, Side::Right));
        }
    }
    out
}

fn side_idx(s: Side) -> usize {
    match s {
        Side::Left => 0,
        Side::Right => 1,
    }
}

/// Ordered injections of `k` items into `n` positions.
fn choose_injection(n: usize, k: usize, sel: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if sel.len() == k {
        f(sel);
        return;
    }
    for i in 0..n {
        if sel.contains(&i) {
            continue;
        }
        sel.push(i);
        choose_injection(n, k, sel, f);
        sel.pop();
    }
}

fn ancestor_in(skel: &Skeleton, up: usize, down: usize) -> bool {
    let mut v = down;
    while let Some((p, _)) = skel[v] {
        if p == up {
            return true;
        }
        v = p;
    }
    false
}

/// Perfect matchings of the remaining free slots; a non-arrowed inner edge
/// may join a vertex to itself or to a descendant, never to a sibling.
fn matchings(
    skel: &Skeleton,
    slots: &[(usize, Side)],
    acc: &mut Vec<((usize, Side), (usize, Side))>,
    f: &mut impl FnMut(&[((usize, Side), (usize, Side))]),
) {
    if slots.is_empty() {
        f(acc);
        return;
    }
    let first = slots[0];
    for (i, other) in slots.iter().enumerate().skip(1) {
        let (v1, v2) = (first.0, other.0);
        let allowed = v1 == v2 || ancestor_in(skel, v1, v2) || ancestor_in(skel, v2, v1);
        if !allowed {
            continue;
        }
        let pair = if v1 == v2 || ancestor_in(skel, v1, v2) {
            (first, *other)
        } else {
            (*other, first)
        };
        acc.push(pair);
        let rest: Vec<(usize, Side)> = slots[1..]
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i - 1)
            .map(|(_, s)| *s)
            .collect();
        matchings(skel, &rest, acc, f);
        acc.pop();
    }
}

fn assemble(
    g: u32,
    k: usize,
    skeleton: &Skeleton,
    free: &[(usize, Side)],
    leaf_sel: &[usize],
    edges: &[((usize, Side), (usize, Side))],
) -> RecursionGraph {
    let n = skeleton.len();
    let mut slots = vec![[SlotContent::SelfLoop; 2]; n];
    for v in 1..n {
        let (p, side) = skeleton[v].expect("non-root");
        slots[p][side_idx(side)] = SlotContent::Child(v);
    }
    for (leaf, &slot_idx) in leaf_sel.iter().enumerate() {
        let (v, s) = free[slot_idx];
        slots[v][side_idx(s)] = SlotContent::Leaf(leaf);
    }
    let mut stored_edges = vec![];
    for &(a, b) in edges {
        let e = stored_edges.len();
        if a.0 == b.0 {
            slots[a.0][side_idx(a.1)] = SlotContent::SelfLoop;
            slots[b.0][side_idx(b.1)] = SlotContent::SelfLoop;
        } else {
            slots[a.0][side_idx(a.1)] = SlotContent::Inner(e);
            slots[b.0][side_idx(b.1)] = SlotContent::Inner(e);
        }
        stored_edges.push((a, b));
    }
    RecursionGraph {
        g,
        k,
        parent: skeleton.clone(),
        slots,
        edges: stored_edges,
    }
}

/// When an arrowed edge and a non-arrowed inner edge to a strict descendant
/// leave the same vertex, the arrowed edge must be the left child.
fn satisfies_left_child_rule(graph: &RecursionGraph) -> bool {
    for v in 0..graph.vertex_count() {
        let [l, r] = graph.slots[v];
        let goes_down = |c: &SlotContent| -> bool {
            match c {
                SlotContent::Inner(e) => {
                    let (up, down) = graph.edges[*e];
                    up.0 == v && down.0 != v && graph.is_ancestor(v, down.0)
                }
                _ => false,
            }
        };
        if matches!(r, SlotContent::Child(_)) && goes_down(&l) {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
enum Label {
    ParentHook,
    Pending(usize),
    Leaf(usize),
}

struct Labeled {
    labels: Vec<Label>,
    series: SeriesOfForms,
}

struct BpLocal {
    ident: LaurentSeries,
    sigma: LaurentSeries,
    inv_kernel_denom: LaurentSeries,
    b_self: LaurentSeries,
    b_ident: SeriesOfForms,
    b_sigma: SeriesOfForms,
}

/// Shared per-curve expansion data for weight evaluation.
pub struct WeightContext {
    tag: FieldTag,
    points: Vec<FieldElem>,
    locals: Vec<BpLocal>,
    order: i64,
}

impl WeightContext {
    pub fn new(curve: &SpectralCurve, g: u32, k: usize) -> Result<Self> {
        let tag = curve.tag();
        let n = k as u32 + 1;
        let order = 6 * g as i64 + 2 * n as i64 + 8;
        let points = curve.branchpoint_values();
        let mut locals = vec![];
        for i in 0..points.len() {
            let data = curve.branch_local(i, order)?;
            let ident =
                LaurentSeries::new(tag, data.a.clone(), 1, vec![FieldElem::one(tag)], order);
            let x_loc = laurent_expand(curve.x(), &data.a, order + 1)?;
            let x0 = x_loc.coefficient(0)?;
            let x_deriv = x_loc
                .sub(&LaurentSeries::constant(tag, data.a.clone(), x0))
                .derivative();
            let y_odd = data.y_series.sub(&data.y_series.compose(&data.sigma)?);
            let inv_kernel_denom = y_odd.mul(&x_deriv).invert(order)?;
            let s_minus_sigma = ident.sub(&data.sigma);
            let b_self = data.sigma.derivative().mul(&s_minus_sigma.powi(-2, order)?);
            // The two leaf/pending B-expansions are graph-independent.
            let b_ident = b_spectator_series(tag, i, &ident, order)?;
            let b_sigma = b_spectator_series(tag, i, &data.sigma, order)?;
            locals.push(BpLocal {
                ident,
                sigma: data.sigma,
                inv_kernel_denom,
                b_self,
                b_ident,
                b_sigma,
            });
        }
        Ok(WeightContext {
            tag,
            points,
            locals,
            order,
        })
    }
}

/// Evaluates the weight of one graph: nested residues from the leaves back
/// to the root, the recursion kernel on arrowed edges, B on non-arrowed
/// ones. Summing a full graph set reproduces the recursion's correlator.
pub fn graph_weight(curve: &SpectralCurve, graph: &RecursionGraph) -> Result<PoleForm> {
    let ctx = WeightContext::new(curve, graph.g, graph.k)?;
    graph_weight_with(&ctx, graph)
}

pub fn graph_weight_with(ctx: &WeightContext, graph: &RecursionGraph) -> Result<PoleForm> {
    let tag = ctx.tag;
    let g = graph.g;
    let n = graph.k as u32 + 1;
    let points = &ctx.points;
    let locals = &ctx.locals;
    let _ = ctx.order;

    // Process vertices children-first (preorder puts children later).
    let mut values: Vec<Option<Labeled>> = (0..graph.vertex_count()).map(|_| None).collect();
    for v in (0..graph.vertex_count()).rev() {
        let mut acc: Option<(Vec<Label>, Terms)> = None;
        for (bp, loc) in locals.iter().enumerate() {
            let subs = [&loc.ident, &loc.sigma];
            let mut factors: Vec<Labeled> = vec![];
            let mut deferred: Vec<(usize, Side)> = vec![];
            let mut self_loop = false;
            for side in [Side::Left, Side::Right] {
                match graph.slots[v][side_idx(side)] {
                    SlotContent::Child(c) => {
                        let child = values[c].as_ref().expect("children processed first");
                        let hook = child
                            .labels
                            .iter()
                            .position(|l| *l == Label::ParentHook)
                            .expect("child has a parent hook");
                        let series =
                            child
                                .series
                                .expand_slot(hook, bp, &points, subs[side_idx(side)])?;
                        let mut labels = child.labels.clone();
                        labels.remove(hook);
                        factors.push(Labeled { labels, series });
                    }
                    SlotContent::Leaf(l) => {
                        let series = match side {
                            Side::Left => loc.b_ident.clone(),
                            Side::Right => loc.b_sigma.clone(),
                        };
                        factors.push(Labeled {
                            labels: vec![Label::Leaf(l)],
                            series,
                        });
                    }
                    SlotContent::Inner(e) => {
                        let (up, _down) = graph.edges[e];
                        if up.0 == v {
                            // The partner endpoint sits below: its factor
                            // carries a pending hook; expand it here.
                            deferred.push((e, side));
                        } else {
                            let series = match side {
                                Side::Left => loc.b_ident.clone(),
                                Side::Right => loc.b_sigma.clone(),
                            };
                            factors.push(Labeled {
                                labels: vec![Label::Pending(e)],
                                series,
                            });
                        }
                    }
                    SlotContent::SelfLoop => {
                        self_loop = true;
                    }
                }
            }
            let mut prod = Labeled {
                labels: vec![],
                series: SeriesOfForms::from_scalar_series(
                    &LaurentSeries::constant(tag, points[bp].clone(), FieldElem::one(tag)),
                    &Terms::singleton(vec![], FieldElem::one(tag)),
                    0,
                )?,
            };
            if self_loop {
                prod.series = prod.series.mul_scalar_series(&loc.b_self)?;
            }
            for f in factors {
                let total = prod.labels.len() + f.labels.len();
                let pos_a: Vec<usize> = (0..prod.labels.len()).collect();
                let pos_b: Vec<usize> = (prod.labels.len()..total).collect();
                prod = Labeled {
                    series: prod.series.product(&f.series, &pos_a, &pos_b, total),
                    labels: prod.labels.into_iter().chain(f.labels).collect(),
                };
            }
            for (e, side) in deferred {
                let idx = prod
                    .labels
                    .iter()
                    .position(|l| *l == Label::Pending(e))
                    .expect("pending edge from a descendant");
                prod = Labeled {
                    series: prod
                        .series
                        .expand_slot(idx, bp, &points, subs[side_idx(side)])?,
                    labels: {
                        let mut ls = prod.labels;
                        ls.remove(idx);
                        ls
                    },
                };
            }
            let glo = match prod.series.lowest() {
                Some(l) => l,
                None => continue,
            };
            let minus_half = FieldElem::from_rational(tag, Rational::ratio(-1, 2));
            let mut s_pow = loc.ident.clone();
            let mut sigma_pow = loc.sigma.clone();
            let m_max = (1 - glo).max(1);
            let labels_here: Vec<Label> = std::iter::once(Label::ParentHook)
                .chain(prod.labels.iter().cloned())
                .collect();
            for m in 1..=m_max {
                let diff = s_pow.sub(&sigma_pow);
                if !diff.is_zero() {
                    let kappa = diff.mul(&loc.inv_kernel_denom).scale(&minus_half);
                    let res = prod.series.residue_against(&kappa)?;
                    for (key, c) in res.0 {
                        let mut full = Vec::with_capacity(key.len() + 1);
                        full.push((bp, m as u32 + 1));
                        full.extend(key);
                        match &mut acc {
                            None => {
                                acc = Some((labels_here.clone(), Terms::singleton(full, c)));
                            }
                            Some((labels, terms)) => {
                                debug_assert_eq!(*labels, labels_here);
                                terms.insert_add(full, c);
                            }
                        }
                    }
                }
                s_pow = s_pow.mul(&loc.ident);
                sigma_pow = sigma_pow.mul(&loc.sigma);
            }
            if acc.is_none() {
                acc = Some((labels_here, Terms::zero()));
            }
        }
        let (labels, terms) = acc.expect("at least one branchpoint");
        let slots = labels.len();
        let series = SeriesOfForms::from_scalar_series(
            &LaurentSeries::constant(tag, FieldElem::zero(tag), FieldElem::one(tag)),
            &terms,
            slots,
        )?;
        values[v] = Some(Labeled { labels, series });
    }

    // The root value has labels [ParentHook, leaves...]; reorder to the
    // slot order (root, leaf 1, ..., leaf k).
    let root = values[0].take().expect("root processed");
    let terms = root.series.coefficient(0)?;
    let mut order_map = vec![0usize; root.labels.len()];
    for (i, l) in root.labels.iter().enumerate() {
        order_map[i] = match l {
            Label::ParentHook => 0,
            Label::Leaf(j) => j + 1,
            Label::Pending(_) => unreachable!("pendings resolve inside the tree"),
        };
    }
    let mut out = Terms::zero();
    for (key, c) in terms.0 {
        let mut new_key = vec![(0usize, 0u32); key.len()];
        for (i, kv) in key.into_iter().enumerate() {
            new_key[order_map[i]] = kv;
        }
        out.insert_add(new_key, c);
    }
    Ok(PoleForm::new(tag, g, n, out))
}

fn b_spectator_series(
    tag: FieldTag,
    bp: usize,
    w: &LaurentSeries,
    order: i64,
) -> Result<SeriesOfForms> {
    let wprime = w.derivative();
    let mut out = SeriesOfForms::zero(tag, 1, i64::MAX / 8);
    let mut w_pow = LaurentSeries::constant(tag, w.center().clone(), FieldElem::one(tag));
    for m in 0..=order.max(2) {
        let scalar = w_pow.mul(&wprime).scale(&FieldElem::from_int(tag, m + 1));
        let spect = Terms::singleton(vec![(bp, m as u32 + 2)], FieldElem::one(tag));
        out = out.add(&SeriesOfForms::from_scalar_series(&scalar, &spect, 1)?);
        w_pow = w_pow.mul(w);
    }
    Ok(out)
}

/// Σ over the graph set of the weights.
pub fn sum_of_weights(curve: &SpectralCurve, g: u32, k: usize) -> Result<PoleForm> {
    let graphs = enumerate_graphs(g, k);
    let ctx = WeightContext::new(curve, g, k)?;
    let mut acc = PoleForm::zero(curve.tag(), g, k as u32 + 1);
    for graph in &graphs {
        acc = acc.add(&graph_weight_with(&ctx, graph)?);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::YData;
    use crate::engine::OmegaTable;
    use crate::ratfunc::{UniRatFunc, ZPoly};

    fn airy() -> SpectralCurve {
        let poly = |ints: &[i64]| UniRatFunc::from_poly(ZPoly::from_ints(FieldTag::Q, ints));
        SpectralCurve::build(poly(&[0, 0, 1]), YData::Rational(poly(&[0, 1])), None, "u").unwrap()
    }

    #[test]
    fn graph_counts() {
        assert_eq!(enumerate_graphs(0, 2).len(), 2);
        assert_eq!(enumerate_graphs(0, 3).len(), 12);
        assert_eq!(enumerate_graphs(1, 1).len(), 4);
        assert_eq!(enumerate_graphs(2, 0).len(), 5);
        assert_eq!(enumerate_graphs_relaxed(2, 0).len(), 13);
        assert_eq!(pants_count(2, 0), 5);
        assert_eq!(pants_count(0, 2), 2);
    }

    #[test]
    fn genus_two_weight_orbits() {
        // The 5 graphs collapse into weight classes of sizes 2, 2, 1 (the
        // child swap at a vertex preserves the weight).
        let curve = SpectralCurve::build(
            UniRatFunc::from_poly(ZPoly::from_ints(FieldTag::Q, &[-2, 0, 1])),
            YData::Rational(UniRatFunc::from_poly(ZPoly::from_ints(
                FieldTag::Q,
                &[0, -3, 0, 1],
            ))),
            None,
            "u",
        )
        .unwrap();
        let graphs = enumerate_graphs(2, 0);
        let mut by_weight: Vec<(PoleForm, usize)> = vec![];
        for g in &graphs {
            let w = graph_weight(&curve, g).unwrap();
            match by_weight.iter_mut().find(|(f, _)| *f == w) {
                Some((_, c)) => *c += 1,
                None => by_weight.push((w, 1)),
            }
        }
        let mut sizes: Vec<usize> = by_weight.iter().map(|(_, c)| *c).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 2]);
    }

    #[test]
    fn weights_match_recursion_on_airy() {
        let c = airy();
        let table = OmegaTable::new(&c);
        for (g, k) in [(0u32, 2usize), (0, 3), (1, 0), (1, 1), (2, 0)] {
            let sum = sum_of_weights(&c, g, k).unwrap();
            let direct = table.omega(g, k as u32 + 1).unwrap();
            assert_eq!(&sum, direct.stable().unwrap(), "(g,k)=({g},{k})");
        }
    }

    #[test]
    fn leaf_swap_relates_the_two_three_point_graphs() {
        let c = airy();
        let graphs = enumerate_graphs(0, 2);
        let w0 = graph_weight(&c, &graphs[0]).unwrap();
        let w1 = graph_weight(&c, &graphs[1]).unwrap();
        assert_eq!(w0, w1.permute_slots(&[0, 2, 1]));
    }
}
