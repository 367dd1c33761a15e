//! Finite ⊥-forests of regions: structure, sub-forests, forest relating maps,
//! isomonotone limits and equality up to null sets.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::density::DensityModel;
use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::number::{display_rational, Rational, RationalText, FLOAT_TOL};
use crate::separation::SeparationRelation;

/// Per-node annotations carried through forest operations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NodeMeta {
    /// Level at which the cluster appears.
    pub birth: Option<Rational>,
    /// Level at which the cluster splits or vanishes.
    pub death: Option<Rational>,
    pub note: Option<String>,
}

impl NodeMeta {
    pub fn born(birth: Rational) -> Self {
        NodeMeta {
            birth: Some(birth),
            ..Default::default()
        }
    }

    pub fn span(birth: Rational, death: Rational) -> Self {
        NodeMeta {
            birth: Some(birth),
            death: Some(death),
            note: None,
        }
    }
}

/// A finite family of regions, pairwise nested or separated.
///
/// Nodes are stored in a canonical order (by depth, then by region), so two
/// forests over the same node set compare equal. Nodes of different
/// dimension classes live in separate strata and are never related.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Forest {
    rel: SeparationRelation,
    nodes: Vec<Region>,
    meta: Vec<NodeMeta>,
    parents: Vec<Option<usize>>,
}

/// Sub-forest selectors relative to a node `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubForestMode {
    /// `A' ⊋ A`
    Above,
    /// `A' ⊇ A`
    AboveOrEqual,
    /// `A' ⊆ A`
    BelowOrEqual,
    /// `A' ⊊ A`
    Below,
}

impl Forest {
    pub fn empty(rel: SeparationRelation) -> Self {
        Forest {
            rel,
            nodes: Vec::new(),
            meta: Vec::new(),
            parents: Vec::new(),
        }
    }

    /// Validates the forest property and derives parents from inclusion.
    pub fn new(rel: SeparationRelation, nodes: Vec<(Region, NodeMeta)>) -> Result<Self> {
        let n = nodes.len();
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (&nodes[i].0, &nodes[j].0);
                if a.dim_class() != b.dim_class() || a.ambient_dim() != b.ambient_dim() {
                    continue;
                }
                if a.set_eq(b) {
                    return Err(Error::DuplicateNode(a.to_string()));
                }
                if !(a.contains(b) || b.contains(a) || rel.separated(a, b)) {
                    return Err(Error::ForestViolation {
                        first: a.to_string(),
                        second: b.to_string(),
                    });
                }
            }
        }
        let parents = derive_parents(nodes.iter().map(|(r, _)| r));
        let depth = depths(&parents);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            (nodes[i].0.dim_class(), depth[i], &nodes[i].0).cmp(&(
                nodes[j].0.dim_class(),
                depth[j],
                &nodes[j].0,
            ))
        });
        let mut position = vec![0; n];
        for (k, &i) in order.iter().enumerate() {
            position[i] = k;
        }
        let parents = order
            .iter()
            .map(|&i| parents[i].map(|p| position[p]))
            .collect();
        let (regions, meta): (Vec<Region>, Vec<NodeMeta>) = {
            let mut slots: Vec<Option<(Region, NodeMeta)>> = nodes.into_iter().map(Some).collect();
            order
                .iter()
                .map(|&i| slots[i].take().expect("each index once"))
                .unzip()
        };
        Ok(Forest {
            rel,
            nodes: regions,
            meta,
            parents,
        })
    }

    pub fn from_regions(rel: SeparationRelation, regions: Vec<Region>) -> Result<Self> {
        Self::new(
            rel,
            regions
                .into_iter()
                .map(|r| (r, NodeMeta::default()))
                .collect(),
        )
    }

    pub fn rel(&self) -> &SeparationRelation {
        &self.rel
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Region] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Region {
        &self.nodes[i]
    }

    pub fn meta(&self, i: usize) -> &NodeMeta {
        &self.meta[i]
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parents[i]
    }

    pub fn children(&self, i: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&j| self.parents[j] == Some(i))
            .collect()
    }

    /// Strict ancestors, nearest first.
    pub fn ancestors(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self.parents[i];
        while let Some(p) = cur {
            out.push(p);
            cur = self.parents[p];
        }
        out
    }

    pub fn index_of(&self, region: &Region) -> Option<usize> {
        self.nodes.iter().position(|r| r.set_eq(region))
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.parents[i].is_none())
            .collect()
    }

    pub fn leaves(&self) -> Vec<usize> {
        let mut has_child = vec![false; self.len()];
        for p in self.parents.iter().flatten() {
            has_child[*p] = true;
        }
        (0..self.len()).filter(|&i| !has_child[i]).collect()
    }

    pub fn root_regions(&self) -> Vec<Region> {
        self.roots()
            .into_iter()
            .map(|i| self.nodes[i].clone())
            .collect()
    }

    /// Union of the roots; `None` for the empty forest.
    pub fn ground(&self) -> Result<Option<Region>> {
        let mut acc: Option<Region> = None;
        for r in self.roots() {
            acc = Some(match acc {
                None => self.nodes[r].clone(),
                Some(a) => a.union(&self.nodes[r])?,
            });
        }
        Ok(acc)
    }

    pub fn sub_forest(&self, region: &Region, mode: SubForestMode) -> Result<Forest> {
        let a = self
            .index_of(region)
            .ok_or_else(|| Error::NodeNotFound(region.to_string()))?;
        let ancestors = self.ancestors(a);
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| match mode {
                SubForestMode::Above => ancestors.contains(&i),
                SubForestMode::AboveOrEqual => i == a || ancestors.contains(&i),
                SubForestMode::BelowOrEqual => i == a || self.ancestors(i).contains(&a),
                SubForestMode::Below => self.ancestors(i).contains(&a),
            })
            .collect();
        Ok(self.restricted(&keep))
    }

    /// The forest on a subset of node indices; parents are re-derived by skipping removed nodes.
    pub fn restricted(&self, keep: &[usize]) -> Forest {
        let mut position = vec![None; self.len()];
        for (k, &i) in keep.iter().enumerate() {
            position[i] = Some(k);
        }
        let parents: Vec<Option<usize>> = keep
            .iter()
            .map(|&i| self.ancestors(i).into_iter().find_map(|p| position[p]))
            .collect();
        let nodes: Vec<Region> = keep.iter().map(|&i| self.nodes[i].clone()).collect();
        let meta: Vec<NodeMeta> = keep.iter().map(|&i| self.meta[i].clone()).collect();
        let depth = depths(&parents);
        let mut order: Vec<usize> = (0..keep.len()).collect();
        order.sort_by(|&i, &j| {
            (nodes[i].dim_class(), depth[i], &nodes[i]).cmp(&(
                nodes[j].dim_class(),
                depth[j],
                &nodes[j],
            ))
        });
        let mut pos = vec![0; keep.len()];
        for (k, &i) in order.iter().enumerate() {
            pos[i] = k;
        }
        Forest {
            rel: self.rel.clone(),
            nodes: order.iter().map(|&i| nodes[i].clone()).collect(),
            meta: order.iter().map(|&i| meta[i].clone()).collect(),
            parents: order.iter().map(|&i| parents[i].map(|p| pos[p])).collect(),
        }
    }

    /// Roots together with every node that has a direct sibling.
    pub fn structure(&self) -> Forest {
        let mut child_count: BTreeMap<Option<usize>, usize> = BTreeMap::new();
        for p in &self.parents {
            *child_count.entry(*p).or_default() += 1;
        }
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| self.parents[i].is_none() || child_count[&self.parents[i]] >= 2)
            .collect();
        self.restricted(&keep)
    }

    pub fn is_structured(&self) -> bool {
        self.structure().len() == self.len()
    }

    /// Union of two forests under the same relation, re-validated.
    pub fn union(&self, other: &Forest) -> Result<Forest> {
        let mut nodes: Vec<(Region, NodeMeta)> = self
            .nodes
            .iter()
            .cloned()
            .zip(self.meta.iter().cloned())
            .collect();
        for (r, m) in other.nodes.iter().zip(&other.meta) {
            if self.index_of(r).is_none() {
                nodes.push((r.clone(), m.clone()));
            }
        }
        Forest::new(self.rel.clone(), nodes)
    }

    /// Same node set with fresh metadata removed; used for set-level comparisons.
    pub fn same_nodes(&self, other: &Forest) -> bool {
        self.len() == other.len() && self.nodes.iter().all(|r| other.index_of(r).is_some())
    }

    /// Canonical shape code of the subtree rooted at `i`.
    pub fn shape_code(&self, i: usize) -> String {
        let mut codes: Vec<String> = self
            .children(i)
            .into_iter()
            .map(|c| self.shape_code(c))
            .collect();
        codes.sort();
        format!("{}({})", self.nodes[i].dim_class(), codes.concat())
    }

    /// Canonical shape code of the whole forest.
    pub fn forest_code(&self) -> String {
        let mut codes: Vec<String> = self
            .roots()
            .into_iter()
            .map(|r| self.shape_code(r))
            .collect();
        codes.sort();
        codes.concat()
    }

    /// The forest relating map witnessing `self ≤ other`.
    pub fn frm(&self, other: &Forest) -> Result<ForestRelatingMap> {
        if self.forest_code() != other.forest_code() {
            return Err(Error::NotIsomorphic(format!(
                "shapes {} and {} differ",
                self.forest_code(),
                other.forest_code()
            )));
        }
        let mut map = vec![usize::MAX; self.len()];
        let mut used = vec![false; other.len()];
        self.match_level(other, &self.roots(), &other.roots(), &mut map, &mut used)?;
        Ok(ForestRelatingMap {
            domain: self.clone(),
            codomain: other.clone(),
            map,
        })
    }

    fn match_level(
        &self,
        other: &Forest,
        mine: &[usize],
        theirs: &[usize],
        map: &mut [usize],
        used: &mut [bool],
    ) -> Result<()> {
        for &a in mine {
            let target = theirs
                .iter()
                .copied()
                .find(|&b| !used[b] && other.nodes[b].contains(&self.nodes[a]))
                .ok_or_else(|| {
                    Error::NotContained(format!("{} has no containing partner", self.nodes[a]))
                })?;
            if self.shape_code(a) != other.shape_code(target) {
                return Err(Error::NotIsomorphic(format!(
                    "{} and {} have different subtrees",
                    self.nodes[a], other.nodes[target]
                )));
            }
            used[target] = true;
            map[a] = target;
            self.match_level(other, &self.children(a), &other.children(target), map, used)?;
        }
        Ok(())
    }

    /// `self =_P other`: an isomorphism whose node symmetric differences are `P`-null.
    ///
    /// `tolerance = None` means exact zero for exact models and `1e-9·P(Ω)`
    /// otherwise. Returns the matching (`self` index → `other` index) if any.
    pub fn equal_mod_p(
        &self,
        other: &Forest,
        p: &DensityModel,
        tolerance: Option<f64>,
    ) -> Option<Vec<usize>> {
        if self.forest_code() != other.forest_code() {
            return None;
        }
        let tol = tolerance.unwrap_or_else(|| {
            if p.is_exact() {
                0.0
            } else {
                FLOAT_TOL * p.total_mass().to_f64()
            }
        });
        let close = |a: usize, b: usize| -> bool {
            let (ra, rb) = (&self.nodes[a], &other.nodes[b]);
            if ra.dim_class() != rb.dim_class() {
                return false;
            }
            match p.mass_symmetric_difference(ra, rb) {
                Ok(m) if tol == 0.0 && p.is_exact() => m.is_zero(),
                Ok(m) => m.to_f64() <= tol,
                Err(_) => false,
            }
        };
        let mut map = vec![usize::MAX; self.len()];
        let mut used = vec![false; other.len()];
        if self.match_mod_p(
            other,
            &self.roots(),
            &other.roots(),
            &close,
            &mut map,
            &mut used,
        ) {
            Some(map)
        } else {
            None
        }
    }

    fn match_mod_p(
        &self,
        other: &Forest,
        mine: &[usize],
        theirs: &[usize],
        close: &dyn Fn(usize, usize) -> bool,
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        let Some((&a, rest)) = mine.split_first() else {
            return true;
        };
        for &b in theirs {
            if used[b] || self.shape_code(a) != other.shape_code(b) || !close(a, b) {
                continue;
            }
            let snapshot_map = map.to_vec();
            let snapshot_used = used.to_vec();
            used[b] = true;
            map[a] = b;
            if self.match_mod_p(
                other,
                &self.children(a),
                &other.children(b),
                close,
                map,
                used,
            ) && self.match_mod_p(other, rest, theirs, close, map, used)
            {
                return true;
            }
            map.copy_from_slice(&snapshot_map);
            used.copy_from_slice(&snapshot_used);
        }
        false
    }

    pub fn to_wire(&self) -> ForestWire {
        ForestWire {
            relation: self.rel.to_string(),
            nodes: (0..self.len())
                .map(|i| NodeWire {
                    id: i,
                    dim: self.nodes[i].dim_class(),
                    parent: self.parents[i],
                    birth: self.meta[i].birth.clone().map(RationalText),
                    death: self.meta[i].death.clone().map(RationalText),
                    note: self.meta[i].note.clone(),
                    region: self.nodes[i].clone(),
                })
                .collect(),
        }
    }

    pub fn from_wire(wire: ForestWire) -> Result<Forest> {
        let rel: SeparationRelation = wire.relation.parse()?;
        let forest = Forest::new(
            rel,
            wire.nodes
                .into_iter()
                .map(|n| {
                    let meta = NodeMeta {
                        birth: n.birth.map(|b| b.0),
                        death: n.death.map(|d| d.0),
                        note: n.note,
                    };
                    (n.region, meta)
                })
                .collect(),
        )?;
        Ok(forest)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("forest serializes")
    }

    pub fn from_json(text: &str) -> Result<Forest> {
        let wire: ForestWire =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Forest::from_wire(wire)
    }

    /// Graphviz rendering with child → parent edges labelled by birth level.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph forest {\n  rankdir=BT;\n  node [shape=box];\n");
        for (i, r) in self.nodes.iter().enumerate() {
            let mut label = r.to_string();
            if let Some(b) = &self.meta[i].birth {
                let _ = write!(label, "\\nbirth {}", display_rational(b));
            }
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", label.replace('"', "'"));
        }
        for (i, p) in self.parents.iter().enumerate() {
            if let Some(p) = p {
                let _ = writeln!(out, "  n{i} -> n{p};");
            }
        }
        out.push_str("}\n");
        out
    }
}

impl std::fmt::Display for Forest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.nodes.iter().map(|r| r.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

fn derive_parents<'a>(regions: impl Iterator<Item = &'a Region>) -> Vec<Option<usize>> {
    let regions: Vec<&Region> = regions.collect();
    let n = regions.len();
    (0..n)
        .map(|i| {
            let supersets: Vec<usize> = (0..n)
                .filter(|&j| {
                    j != i
                        && regions[j].dim_class() == regions[i].dim_class()
                        && regions[j].ambient_dim() == regions[i].ambient_dim()
                        && regions[j].contains(regions[i])
                })
                .collect();
            supersets.iter().copied().find(|&c| {
                supersets
                    .iter()
                    .all(|&o| o == c || regions[o].contains(regions[c]))
            })
        })
        .collect()
}

fn depths(parents: &[Option<usize>]) -> Vec<usize> {
    (0..parents.len())
        .map(|i| {
            let mut d = 0;
            let mut cur = parents[i];
            while let Some(p) = cur {
                d += 1;
                cur = parents[p];
            }
            d
        })
        .collect()
}

/// JSON form of a forest.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ForestWire {
    pub relation: String,
    pub nodes: Vec<NodeWire>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NodeWire {
    pub id: usize,
    pub dim: usize,
    pub parent: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub birth: Option<RationalText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub death: Option<RationalText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub region: Region,
}

/// The unique inclusion-respecting isomorphism witnessing `F ≤ F'`.
#[derive(Clone, Debug)]
pub struct ForestRelatingMap {
    domain: Forest,
    codomain: Forest,
    map: Vec<usize>,
}

impl ForestRelatingMap {
    pub fn domain(&self) -> &Forest {
        &self.domain
    }

    pub fn codomain(&self) -> &Forest {
        &self.codomain
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.map
    }

    pub fn then(&self, next: &ForestRelatingMap) -> ForestRelatingMap {
        ForestRelatingMap {
            domain: self.domain.clone(),
            codomain: next.codomain.clone(),
            map: self.map.iter().map(|&i| next.map[i]).collect(),
        }
    }
}

/// Limit of an isomonotone sequence of forests: each node of `s(F_1)` is
/// followed along the relating maps and its images are united.
///
/// A failure between terms `n-1` and `n` is reported with index `n`.
pub fn isomonotone_limit(seq: &[Forest]) -> Result<Forest> {
    let Some(first) = seq.first() else {
        return Err(Error::MonotonicityViolation {
            index: 0,
            detail: "empty sequence".into(),
        });
    };
    let structures: Vec<Forest> = seq.iter().map(Forest::structure).collect();
    let mut unions: Vec<Region> = structures[0].nodes.clone();
    let mut current: Vec<usize> = (0..unions.len()).collect();
    for n in 1..structures.len() {
        let zeta =
            structures[n - 1]
                .frm(&structures[n])
                .map_err(|e| Error::MonotonicityViolation {
                    index: n,
                    detail: e.to_string(),
                })?;
        for (k, idx) in current.iter_mut().enumerate() {
            *idx = zeta.apply(*idx);
            unions[k] = unions[k].union(&structures[n].nodes[*idx])?;
        }
    }
    let last = structures.last().expect("nonempty");
    let nodes = unions
        .into_iter()
        .zip(current.iter().map(|&i| last.meta[i].clone()))
        .collect();
    Forest::new(first.rel.clone(), nodes)
}

/// One parameterized chain `{B(λ) : λ ∈ (lo, hi)}` of level components,
/// decreasing in `λ` and stored through its union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamChain {
    pub lo: Rational,
    pub hi: Rational,
    pub union: Region,
    pub parent: Option<usize>,
}

/// A level-set forest with finitely many branch events.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamChainForest {
    rel: SeparationRelation,
    chains: Vec<ParamChain>,
}

impl ParamChainForest {
    pub fn new(rel: SeparationRelation, chains: Vec<ParamChain>) -> Result<Self> {
        for (i, c) in chains.iter().enumerate() {
            if c.lo > c.hi {
                return Err(Error::InvalidRegion(format!(
                    "chain {i} has an empty level range"
                )));
            }
            if let Some(p) = c.parent {
                if p >= chains.len() || p == i || !chains[p].union.contains(&c.union) {
                    return Err(Error::ForestViolation {
                        first: c.union.to_string(),
                        second: chains
                            .get(p)
                            .map(|q| q.union.to_string())
                            .unwrap_or_default(),
                    });
                }
            }
        }
        Ok(ParamChainForest { rel, chains })
    }

    pub fn chains(&self) -> &[ParamChain] {
        &self.chains
    }

    pub fn rel(&self) -> &SeparationRelation {
        &self.rel
    }

    /// Replaces every maximal pure chain by its union and keeps roots and
    /// nodes with a direct sibling.
    pub fn generalized_structure(&self) -> Result<Forest> {
        let mut child_count = vec![0usize; self.chains.len()];
        for c in &self.chains {
            if let Some(p) = c.parent {
                child_count[p] += 1;
            }
        }
        let mut nodes = Vec::new();
        for (i, c) in self.chains.iter().enumerate() {
            let keep = match c.parent {
                None => true,
                Some(p) => child_count[p] >= 2,
            };
            if keep {
                let end = self.pure_chain_end(i);
                nodes.push((c.union.clone(), NodeMeta::span(c.lo.clone(), end)));
            }
        }
        Forest::new(self.rel.clone(), nodes)
    }

    /// Top level of the maximal pure chain starting at `c`.
    fn pure_chain_end(&self, start: usize) -> Rational {
        let mut cur = start;
        loop {
            let kids: Vec<usize> = (0..self.chains.len())
                .filter(|&k| self.chains[k].parent == Some(cur))
                .collect();
            if kids.len() == 1 {
                cur = kids[0];
            } else {
                return self.chains[cur].hi.clone();
            }
        }
    }
}
