use crate::env::Allocation;

/// A `{far, near, channel}` hyperedge.
///
/// `None` stands for the group's "no UE" placeholder. Placeholders are
/// distinct per channel, so two edges only intersect through a real UE or
/// through their channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperedge {
    pub far: Option<usize>,
    pub near: Option<usize>,
    pub channel: usize,
    pub weight: f64,
}

impl Hyperedge {
    pub fn new(far: Option<usize>, near: Option<usize>, channel: usize) -> Self {
        Self { far, near, channel, weight: 0.0 }
    }

    pub fn intersects(&self, other: &Hyperedge) -> bool {
        self.channel == other.channel
            || (self.far.is_some() && self.far == other.far)
            || (self.near.is_some() && self.near == other.near)
            || (self.far.is_some() && self.far == other.near)
            || (self.near.is_some() && self.near == other.far)
    }

    /// Same vertices, ignoring weight.
    pub fn same_vertices(&self, other: &Hyperedge) -> bool {
        self.far == other.far && self.near == other.near && self.channel == other.channel
    }

    pub fn ues(&self) -> impl Iterator<Item = usize> {
        self.far.into_iter().chain(self.near)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    pub edges: Vec<Hyperedge>,
    pub n_channels: usize,
}

impl Hypergraph {
    pub fn new(edges: Vec<Hyperedge>, n_channels: usize) -> Self {
        debug_assert!(edges.iter().all(|e| e.channel < n_channels));
        Self { edges, n_channels }
    }

    fn distinct(&self, pick: impl Fn(&Hyperedge) -> Option<usize>) -> usize {
        let mut ids: Vec<usize> = self.edges.iter().filter_map(pick).collect();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }

    /// Real far UEs appearing in some edge.
    pub fn far_count(&self) -> usize {
        self.distinct(|e| e.far)
    }

    pub fn near_count(&self) -> usize {
        self.distinct(|e| e.near)
    }
}

/// One edge per `(far, near, channel)` with both UEs eligible. A group with
/// fewer eligible UEs than channels also contributes its placeholder, so a
/// channel can carry a single UE or stay idle.
///
/// Edges are ordered by channel, then far id, then near id, placeholders last.
pub fn build_hypergraph(
    far: &[usize],
    near: &[usize],
    n_channels: usize,
    eligible: impl Fn(usize) -> bool,
) -> Hypergraph {
    let slots = |group: &[usize]| {
        let mut ids: Vec<usize> = group.iter().copied().filter(|&u| eligible(u)).collect();
        ids.sort_unstable();
        let short = ids.len() < n_channels;
        let mut out: Vec<Option<usize>> = ids.into_iter().map(Some).collect();
        if short {
            out.push(None);
        }
        out
    };
    let far_slots = slots(far);
    let near_slots = slots(near);
    let mut edges = Vec::with_capacity(n_channels * far_slots.len() * near_slots.len());
    for channel in 0..n_channels {
        for &f in &far_slots {
            for &r in &near_slots {
                edges.push(Hyperedge::new(f, r, channel));
            }
        }
    }
    Hypergraph::new(edges, n_channels)
}

/// Pairwise-disjoint hyperedges.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Matching {
    pub edges: Vec<Hyperedge>,
}

impl Matching {
    pub fn is_valid(&self) -> bool {
        self.edges
            .iter()
            .enumerate()
            .all(|(i, a)| self.edges[i + 1..].iter().all(|b| !a.intersects(b)))
    }

    pub fn weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn to_allocation(&self, n_channels: usize) -> Allocation {
        let mut alloc = Allocation::idle(n_channels);
        for e in &self.edges {
            alloc.channels[e.channel].extend(e.ues());
        }
        alloc
    }

    /// Edge multiset equality on vertices, ignoring order and weights.
    pub fn same_edges(&self, other: &Matching) -> bool {
        self.edges.len() == other.edges.len()
            && self
                .edges
                .iter()
                .all(|a| other.edges.iter().any(|b| a.same_vertices(b)))
    }
}

/// All matchings with one edge on each of the `n_channels` channels that
/// use as many real UEs of each group as the channels allow.
///
/// With every UE eligible this yields `P(F, M) * P(R, M)` matchings. The
/// output is in lexicographic (channel, far, near) order of the edge list.
pub fn enumerate_reduced_actions(h: &Hypergraph, n_channels: usize) -> Vec<Matching> {
    let want_far = h.far_count().min(n_channels);
    let want_near = h.near_count().min(n_channels);
    let mut by_channel: Vec<Vec<Hyperedge>> = vec![Vec::new(); n_channels];
    for e in &h.edges {
        if e.channel < n_channels {
            by_channel[e.channel].push(*e);
        }
    }
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(n_channels);
    extend(&by_channel, 0, &mut chosen, &mut out, want_far, want_near);
    out
}

fn extend(
    by_channel: &[Vec<Hyperedge>],
    channel: usize,
    chosen: &mut Vec<Hyperedge>,
    out: &mut Vec<Matching>,
    want_far: usize,
    want_near: usize,
) {
    if channel == by_channel.len() {
        let far = chosen.iter().filter(|e| e.far.is_some()).count();
        let near = chosen.iter().filter(|e| e.near.is_some()).count();
        if far == want_far && near == want_near {
            out.push(Matching { edges: chosen.clone() });
        }
        return;
    }
    for e in &by_channel[channel] {
        if chosen.iter().all(|c| !c.intersects(e)) {
            chosen.push(*e);
            extend(by_channel, channel + 1, chosen, out, want_far, want_near);
            chosen.pop();
        }
    }
}
