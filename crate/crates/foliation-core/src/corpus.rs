//! Programmatic construction of surface models: a builder, canonical chain
//! components, a library of named example models, and a seeded random
//! generator with targeted invariant-breaking tweaks for validator tests.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::divisor::QDivisor;
use crate::model::{
    clause, AmbientId, AmbientSingularity, Curve, CurveId, FoliationSingularity, ModelParts,
    SingId, SingIncidence, SingKind, SurfaceModel,
};
use crate::rat;
use crate::rational::Rat;

/// Incremental model assembly. Index bookkeeping (Euler characteristics from
/// self-intersections, canonical CS values along chains) is done here so that
/// example models are valid by construction.
#[derive(Debug, Clone, Default)]
pub struct ModelBuilder {
    curves: Vec<Curve>,
    intersections: Vec<(CurveId, CurveId, Rat)>,
    fol_sings: Vec<FoliationSingularity>,
    amb_sings: Vec<AmbientSingularity>,
    pseudoeffective: bool,
}

impl ModelBuilder {
    pub fn new() -> Self {
        ModelBuilder {
            pseudoeffective: true,
            ..Default::default()
        }
    }

    pub fn pseudoeffective(mut self, v: bool) -> Self {
        self.pseudoeffective = v;
        self
    }

    /// Adds an invariant curve; kx_dot is derived from chi and C².
    pub fn invariant_curve(&mut self, id: &str, self_int: Rat, chi: Rat) -> CurveId {
        let cid = CurveId::from(id);
        self.curves.push(Curve {
            id: cid.clone(),
            kx_dot: -&chi - &self_int,
            self_int,
            chi,
            invariant: true,
            tang: None,
            nodal: false,
        });
        cid
    }

    pub fn nodal_curve(&mut self, id: &str, self_int: Rat, chi: Rat) -> CurveId {
        let cid = self.invariant_curve(id, self_int, chi);
        self.curves.last_mut().unwrap().nodal = true;
        cid
    }

    pub fn non_invariant_curve(
        &mut self,
        id: &str,
        self_int: Rat,
        chi: Rat,
        tang: Rat,
    ) -> CurveId {
        let cid = CurveId::from(id);
        self.curves.push(Curve {
            id: cid.clone(),
            kx_dot: -&chi - &self_int,
            self_int,
            chi,
            invariant: false,
            tang: Some(tang),
            nodal: false,
        });
        cid
    }

    pub fn meet(&mut self, a: &CurveId, b: &CurveId, v: Rat) {
        self.intersections.push((a.clone(), b.clone(), v));
    }

    /// Adds a reduced singularity; every incidence gets Z contribution 1.
    pub fn reduced_sing(&mut self, id: &str, quotient: Rat, incs: &[(CurveId, Rat)]) -> SingId {
        let sid = SingId::from(id);
        self.fol_sings.push(FoliationSingularity {
            id: sid.clone(),
            kind: SingKind::Reduced,
            quotient,
            incidences: incs
                .iter()
                .map(|(c, cs)| SingIncidence {
                    curve: c.clone(),
                    z: rat!(1),
                    cs: cs.clone(),
                    node: false,
                })
                .collect(),
        });
        sid
    }

    /// A nodal curve passing through a reduced singularity with both
    /// branches: Z contribution 0, CS contribution the two-branch total.
    pub fn node_sing(&mut self, id: &str, quotient: Rat, curve: &CurveId) -> SingId {
        let sid = SingId::from(id);
        let cs = &quotient + quotient.recip().expect("node quotient nonzero");
        self.fol_sings.push(FoliationSingularity {
            id: sid.clone(),
            kind: SingKind::Reduced,
            quotient,
            incidences: vec![SingIncidence {
                curve: curve.clone(),
                z: rat!(0),
                cs,
                node: true,
            }],
        });
        sid
    }

    pub fn sing_raw(&mut self, s: FoliationSingularity) {
        self.fol_sings.push(s);
    }

    pub fn ambient(&mut self, id: &str, order: u64, curves: &[CurveId]) -> AmbientId {
        let aid = AmbientId::from(id);
        self.amb_sings.push(AmbientSingularity {
            id: aid.clone(),
            order,
            on_curves: curves.to_vec(),
        });
        aid
    }

    pub fn parts(self) -> ModelParts {
        let ambient_smooth = self.amb_sings.is_empty();
        ModelParts {
            curves: self.curves,
            intersections: self.intersections,
            fol_sings: self.fol_sings,
            amb_sings: self.amb_sings,
            ambient_smooth,
            pseudoeffective: self.pseudoeffective,
        }
    }

    pub fn build(self) -> SurfaceModel {
        self.parts().build().expect("builder produces structural models")
    }
}

/// Handle to a chain component added by `chain_component`: its curves in
/// order, its singularities (junctions first, terminal last), and the
/// u-sequence used to place canonical CS values.
#[derive(Debug, Clone)]
pub struct ChainPart {
    pub curves: Vec<CurveId>,
    pub sings: Vec<SingId>,
    pub u: Vec<Rat>,
}

impl ChainPart {
    pub fn terminal_sing(&self) -> &SingId {
        self.sings.last().expect("chain has a terminal singularity")
    }

    pub fn last_curve(&self) -> &CurveId {
        self.curves.last().expect("chain is nonempty")
    }
}

/// Adds a chain of invariant smooth rational curves with the canonical
/// singularity layout: junction k carries CS values (u_k, 1/u_k), the
/// terminal singularity carries u_n, so every curve satisfies C² = ΣCS and
/// the Z pattern is (1, 2, ..., 2). `head_ambient` threads the first curve
/// through one cyclic quotient point of that order.
pub fn chain_component(
    b: &mut ModelBuilder,
    prefix: &str,
    self_ints: &[Rat],
    head_ambient: Option<u64>,
) -> ChainPart {
    assert!(!self_ints.is_empty());
    let n = self_ints.len();
    let mut curves = Vec::with_capacity(n);
    for (i, a) in self_ints.iter().enumerate() {
        let chi = if i == 0 {
            match head_ambient {
                Some(r) => rat!(1) + rat!(1, r as i64),
                None => rat!(2),
            }
        } else {
            rat!(2)
        };
        curves.push(b.invariant_curve(&format!("{prefix}{}", i + 1), a.clone(), chi));
    }
    if let Some(r) = head_ambient {
        b.ambient(&format!("{prefix}s"), r, &curves[..1]);
    }
    let mut u = Vec::with_capacity(n);
    u.push(self_ints[0].clone());
    for a in &self_ints[1..] {
        let prev = u.last().unwrap();
        let inv = prev.recip().expect("u stays nonzero along canonical chains");
        u.push(a - inv);
    }
    let mut sings = Vec::with_capacity(n);
    for k in 0..n {
        let id = format!("{prefix}p{}", k + 1);
        let uk = &u[k];
        let mut incs = vec![(curves[k].clone(), uk.clone())];
        if k + 1 < n {
            incs.push((curves[k + 1].clone(), uk.recip().expect("nonzero u")));
            b.meet(&curves[k], &curves[k + 1], rat!(1));
        }
        sings.push(b.reduced_sing(&id, uk.clone(), &incs));
    }
    ChainPart { curves, sings, u }
}

/// Attaches an existing invariant curve to the chain's terminal singularity.
/// The tail's CS contribution there is 1/u_n; the caller accounts for it in
/// the tail's self-intersection.
pub fn attach_tail(b: &mut ModelBuilder, part: &ChainPart, tail: &CurveId) {
    let sing = b
        .fol_sings
        .iter_mut()
        .find(|s| &s.id == part.terminal_sing())
        .expect("terminal singularity exists");
    let inv = part.u.last().unwrap().recip().expect("nonzero u");
    sing.incidences.push(SingIncidence {
        curve: tail.clone(),
        z: rat!(1),
        cs: inv,
        node: false,
    });
    b.meet(part.last_curve(), tail, rat!(1));
}

/// A (-1)-curve chaining into a (-2)-curve tail; the maximal chain is
/// artificial and its decomposition has a boundary coefficient of 1.
pub fn x1() -> SurfaceModel {
    let mut b = ModelBuilder::new();
    chain_component(&mut b, "C", &[rat!(-1), rat!(-2)], None);
    b.build()
}

/// Two (-2)-curves with Z pattern (1, 2); the chain has determinant 3.
pub fn x3() -> SurfaceModel {
    let mut b = ModelBuilder::new();
    chain_component(&mut b, "C", &[rat!(-2), rat!(-2)], None);
    b.build()
}

/// One (-2)-curve with a single terminal singularity.
pub fn single_minus_two() -> SurfaceModel {
    let mut b = ModelBuilder::new();
    chain_component(&mut b, "C", &[rat!(-2)], None);
    b.build()
}

/// A model with no chain heads: one curve with Z = 2, so every foliation
/// index is already non-negative.
pub fn nef_model() -> SurfaceModel {
    let mut b = ModelBuilder::new();
    let c = b.invariant_curve("C", rat!(-2), rat!(2));
    b.reduced_sing("p", rat!(-1), &[(c.clone(), rat!(-1))]);
    b.reduced_sing("q", rat!(-1), &[(c, rat!(-1))]);
    b.build()
}

/// X3 extended by an invariant tail curve T and a non-invariant curve W
/// meeting T once. With boundary (1/3)W the chain recursion hits S₃ = 0 on
/// T, so the maximal chain stops at C2 and T is its external tail.
pub fn x3_with_tail() -> SurfaceModel {
    let mut b = ModelBuilder::new();
    let part = chain_component(&mut b, "C", &[rat!(-2), rat!(-2)], None);
    // T carries the backward CS 1/u_2 = -2/3 at the terminal singularity and
    // its own forward singularity with the remaining CS.
    let t = b.invariant_curve("T", rat!(-2), rat!(2));
    attach_tail(&mut b, &part, &t);
    b.reduced_sing("Tp", rat!(-2) + rat!(2, 3), &[(t.clone(), rat!(-2) + rat!(2, 3))]);
    let w = b.non_invariant_curve("W", rat!(-2), rat!(2), rat!(1));
    b.meet(&t, &w, rat!(1));
    b.build()
}

/// An isolated nodal invariant curve whose node sits at a reduced
/// singularity: Z = 0, the node carries the whole CS total, and every
/// foliation index vanishes.
pub fn nodal_model() -> SurfaceModel {
    let mut b = ModelBuilder::new();
    let c = b.nodal_curve("N1", rat!(-2), rat!(0));
    b.node_sing("Np", rat!(-1), &c);
    b.build()
}

/// Three (-2)-curves closing into a cycle, each junction a reduced
/// singularity; every foliation index vanishes.
pub fn cycle_model() -> SurfaceModel {
    let mut b = ModelBuilder::new();
    let y1 = b.invariant_curve("Y1", rat!(-2), rat!(2));
    let y2 = b.invariant_curve("Y2", rat!(-2), rat!(2));
    let y3 = b.invariant_curve("Y3", rat!(-2), rat!(2));
    for (x, y, p) in [(&y1, &y2, "Yp1"), (&y2, &y3, "Yp2"), (&y3, &y1, "Yp3")] {
        b.meet(x, y, rat!(1));
        b.reduced_sing(p, rat!(-1), &[((*x).clone(), rat!(-1)), ((*y).clone(), rat!(-1))]);
    }
    b.build()
}

/// Two single (-2) chains sharing the (-1)-curve C as their common tail,
/// plus a non-invariant curve W meeting C twice. With boundary (1/2)W both
/// walks stop before C; with an empty boundary both walks absorb C and the
/// maximal chains collide on it.
pub fn tail_cluster() -> SurfaceModel {
    let mut b = ModelBuilder::new();
    let f = chain_component(&mut b, "F", &[rat!(-2)], None);
    let g = chain_component(&mut b, "G", &[rat!(-2)], None);
    let c = b.invariant_curve("C", rat!(-1), rat!(2));
    attach_tail(&mut b, &f, &c);
    attach_tail(&mut b, &g, &c);
    let w = b.non_invariant_curve("W", rat!(-2), rat!(2), rat!(0));
    b.meet(&c, &w, rat!(2));
    b.build()
}

/// Two (-2)-curves meeting twice, at two reduced singularities. Both are
/// orthogonal to the positive part, yet the pair matches neither the cycle
/// pattern nor a string.
pub fn two_cycle() -> SurfaceModel {
    let mut b = ModelBuilder::new();
    let y1 = b.invariant_curve("Y1", rat!(-2), rat!(2));
    let y2 = b.invariant_curve("Y2", rat!(-2), rat!(2));
    b.meet(&y1, &y2, rat!(2));
    b.reduced_sing("p", rat!(-1), &[(y1.clone(), rat!(-1)), (y2.clone(), rat!(-1))]);
    b.reduced_sing("q", rat!(-1), &[(y1, rat!(-1)), (y2, rat!(-1))]);
    b.build()
}

/// One model containing every orthogonal-curve type at once: chain curves
/// (type A), an isolated nodal curve (B), a cycle (C), a string of
/// index-two curves (D), a stopped-chain tail (E), and the common tail of
/// two determinant-two chains (F). Returned with the boundary divisor that
/// produces that census.
pub fn gallery() -> (SurfaceModel, QDivisor) {
    let mut b = ModelBuilder::new();
    let part = chain_component(&mut b, "C", &[rat!(-2), rat!(-2)], None);
    let t = b.invariant_curve("T", rat!(-2), rat!(2));
    attach_tail(&mut b, &part, &t);
    b.reduced_sing("Tp", rat!(-4, 3), &[(t.clone(), rat!(-4, 3))]);
    let w = b.non_invariant_curve("W", rat!(-2), rat!(2), rat!(1));
    b.meet(&t, &w, rat!(1));

    let f = chain_component(&mut b, "F", &[rat!(-2)], None);
    let g = chain_component(&mut b, "G", &[rat!(-2)], None);
    let h = b.invariant_curve("H", rat!(-1), rat!(2));
    attach_tail(&mut b, &f, &h);
    attach_tail(&mut b, &g, &h);
    let v = b.non_invariant_curve("V", rat!(-2), rat!(2), rat!(0));
    b.meet(&h, &v, rat!(2));

    let n1 = b.nodal_curve("N1", rat!(-2), rat!(0));
    b.node_sing("Np", rat!(-1), &n1);

    let y1 = b.invariant_curve("Y1", rat!(-2), rat!(2));
    let y2 = b.invariant_curve("Y2", rat!(-2), rat!(2));
    let y3 = b.invariant_curve("Y3", rat!(-2), rat!(2));
    for (x, y, p) in [(&y1, &y2, "Yp1"), (&y2, &y3, "Yp2"), (&y3, &y1, "Yp3")] {
        b.meet(x, y, rat!(1));
        b.reduced_sing(p, rat!(-1), &[((*x).clone(), rat!(-1)), ((*y).clone(), rat!(-1))]);
    }

    let d1 = b.invariant_curve("D1", rat!(-2), rat!(2));
    let d2 = b.invariant_curve("D2", rat!(-2), rat!(2));
    b.meet(&d1, &d2, rat!(1));
    b.reduced_sing("Dp0", rat!(-1), &[(d1.clone(), rat!(-1))]);
    b.reduced_sing("Dp1", rat!(-1), &[(d1, rat!(-1)), (d2.clone(), rat!(-1))]);
    b.reduced_sing("Dp2", rat!(-1), &[(d2, rat!(-1))]);

    let delta = QDivisor::from_pairs([(w, rat!(1, 3)), (v, rat!(1, 2))]);
    (b.build(), delta)
}

/// Largest integer strictly below the value, capped at -1. Chain steps pick
/// self-intersections below 1/u so the u-sequence stays negative.
fn int_strictly_below(v: &Rat) -> i64 {
    let f = v.floor_int().expect("chain data stays small");
    let top = if v.is_integer() { f - 1 } else { f };
    top.min(-1)
}

/// Seed-determined valid model with at most twelve curves, assembled from
/// chains (optionally through an ambient singularity, optionally with a
/// tail), nodal curves, cycles, lone curves with mixed singularity kinds,
/// and non-invariant curves wired to earlier components.
pub fn random_model(seed: u64) -> SurfaceModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = ModelBuilder::new();
    let cap = rng.gen_range(2..=12usize);
    let mut count = 0usize;
    let mut component = 0usize;
    let mut invariant_pool: Vec<CurveId> = Vec::new();
    let mut mixed_pool: Vec<CurveId> = Vec::new();
    while count < cap {
        let room = cap - count;
        let prefix = format!("{}", (b'A' + component as u8) as char);
        component += 1;
        match rng.gen_range(0..5u8) {
            0 => {
                let len = rng.gen_range(1..=3usize.min(room));
                let mut self_ints = Vec::with_capacity(len);
                let mut u: Option<Rat> = None;
                for _ in 0..len {
                    let (a, next) = match &u {
                        None => {
                            let a = Rat::int(rng.gen_range(-4..=-1i64));
                            (a.clone(), a)
                        }
                        Some(prev) => {
                            let back = prev.recip().expect("u stays negative");
                            let top = int_strictly_below(&back);
                            let a = Rat::int(rng.gen_range(top - 3..=top));
                            let next = &a - &back;
                            (a, next)
                        }
                    };
                    self_ints.push(a);
                    u = Some(next);
                }
                let head_ambient = if rng.gen_bool(0.3) {
                    Some(rng.gen_range(2..=4u64))
                } else {
                    None
                };
                let part = chain_component(&mut b, &prefix, &self_ints, head_ambient);
                count += len;
                invariant_pool.extend(part.curves.iter().cloned());
                if count < cap && rng.gen_bool(0.3) {
                    let back = part.u.last().unwrap().recip().expect("u stays negative");
                    let s = Rat::int(int_strictly_below(&back) - rng.gen_range(0..=1i64));
                    let t = b.invariant_curve(&format!("{prefix}t"), s.clone(), rat!(2));
                    attach_tail(&mut b, &part, &t);
                    b.reduced_sing(&format!("{prefix}tp"), &s - &back, &[(t.clone(), &s - &back)]);
                    count += 1;
                    invariant_pool.push(t);
                }
            }
            1 => {
                let c = b.nodal_curve(&format!("{prefix}n"), rat!(-2), rat!(0));
                b.node_sing(&format!("{prefix}np"), rat!(-1), &c);
                count += 1;
                invariant_pool.push(c);
            }
            2 if room >= 3 => {
                let len = rng.gen_range(3..=4usize.min(room));
                let ring: Vec<CurveId> = (0..len)
                    .map(|i| b.invariant_curve(&format!("{prefix}{i}"), rat!(-2), rat!(2)))
                    .collect();
                for i in 0..len {
                    let x = &ring[i];
                    let y = &ring[(i + 1) % len];
                    b.meet(x, y, rat!(1));
                    b.reduced_sing(
                        &format!("{prefix}j{i}"),
                        rat!(-1),
                        &[(x.clone(), rat!(-1)), (y.clone(), rat!(-1))],
                    );
                }
                count += len;
                invariant_pool.extend(ring);
            }
            3 => {
                let sings = rng.gen_range(1..=3usize);
                let mut total = Rat::zero();
                let id = format!("{prefix}l");
                let cid = CurveId::from(id.as_str());
                for k in 0..sings {
                    match rng.gen_range(0..4u8) {
                        0 => {
                            let q = rat!(rng.gen_range(2..=4i64));
                            total += &q;
                            b.sing_raw(FoliationSingularity {
                                id: SingId::from(format!("{prefix}l{k}").as_str()),
                                kind: SingKind::PoincareDulacB,
                                quotient: q.clone(),
                                incidences: vec![SingIncidence {
                                    curve: cid.clone(),
                                    z: rat!(1),
                                    cs: q,
                                    node: false,
                                }],
                            });
                        }
                        1 => {
                            let z = rat!(rng.gen_range(2..=3i64));
                            let cs = rat!(rng.gen_range(-2..=0i64));
                            total += &cs;
                            b.sing_raw(FoliationSingularity {
                                id: SingId::from(format!("{prefix}l{k}").as_str()),
                                kind: SingKind::Reduced,
                                quotient: rat!(0),
                                incidences: vec![SingIncidence {
                                    curve: cid.clone(),
                                    z,
                                    cs,
                                    node: false,
                                }],
                            });
                        }
                        2 => {
                            b.sing_raw(FoliationSingularity {
                                id: SingId::from(format!("{prefix}l{k}").as_str()),
                                kind: SingKind::Reduced,
                                quotient: rat!(0),
                                incidences: vec![SingIncidence {
                                    curve: cid.clone(),
                                    z: rat!(1),
                                    cs: rat!(0),
                                    node: false,
                                }],
                            });
                        }
                        _ => {
                            let q = rat!(rng.gen_range(-3..=-1i64));
                            total += &q;
                            b.sing_raw(FoliationSingularity {
                                id: SingId::from(format!("{prefix}l{k}").as_str()),
                                kind: SingKind::Reduced,
                                quotient: q.clone(),
                                incidences: vec![SingIncidence {
                                    curve: cid.clone(),
                                    z: rat!(1),
                                    cs: q,
                                    node: false,
                                }],
                            });
                        }
                    }
                }
                b.invariant_curve(&id, total, rat!(2));
                count += 1;
                invariant_pool.push(cid);
            }
            _ => {
                let tang = rat!(rng.gen_range(0..=3i64));
                let self_int = rat!(rng.gen_range(-3..=1i64));
                let w = b.non_invariant_curve(&format!("{prefix}w"), self_int, rat!(2), tang);
                let mut partners: Vec<CurveId> = invariant_pool.clone();
                partners.extend(mixed_pool.iter().cloned());
                for _ in 0..rng.gen_range(0..=2usize) {
                    if partners.is_empty() {
                        break;
                    }
                    let pick = partners.swap_remove(rng.gen_range(0..partners.len()));
                    b.meet(&w, &pick, rat!(rng.gen_range(1..=2i64)));
                }
                count += 1;
                mixed_pool.push(w);
            }
        }
    }
    b.build()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TweakKind {
    Z,
    Cs,
    Tang,
    Chi,
    SelfInt,
}

/// One planted invariant violation: the mutated model must flag exactly
/// `expected` rule codes.
#[derive(Debug, Clone)]
pub struct Tweak {
    pub kind: TweakKind,
    pub subject: String,
    pub detail: String,
    pub expected: BTreeSet<String>,
}

fn rebuilt(parts: ModelParts) -> SurfaceModel {
    parts.build().expect("tweaks leave the structure intact")
}

fn adjunction_extra(m: &SurfaceModel, c: &CurveId) -> BTreeSet<String> {
    let mut set = BTreeSet::new();
    let curve = m.curve(c).expect("incidence curve exists");
    if curve.invariant && !m.meets_ambient_singularity(c) {
        set.insert(clause::CS_ADJUNCTION.to_string());
    }
    set
}

/// Every single-field perturbation of Z, CS, tang, chi, or C² applicable to
/// the model, paired with the exact rule codes the validator must raise.
pub fn tweaks(m: &SurfaceModel) -> Vec<(SurfaceModel, Tweak)> {
    let mut out = Vec::new();
    let parts = m.clone().into_parts();

    for (si, s) in parts.fol_sings.iter().enumerate() {
        for (ii, inc) in s.incidences.iter().enumerate() {
            let site = format!("{} on {}", s.id, inc.curve);

            let mut p = parts.clone();
            p.fol_sings[si].incidences[ii].z += &rat!(1, 2);
            out.push((
                rebuilt(p),
                Tweak {
                    kind: TweakKind::Z,
                    subject: site.clone(),
                    detail: "Z shifted by 1/2".into(),
                    expected: [clause::Z_INTEGER.to_string()].into(),
                },
            ));

            let mut p = parts.clone();
            p.fol_sings[si].incidences[ii].z = rat!(-1);
            out.push((
                rebuilt(p),
                Tweak {
                    kind: TweakKind::Z,
                    subject: site.clone(),
                    detail: "Z set to -1".into(),
                    expected: [clause::Z_CANONICAL.to_string()].into(),
                },
            ));

            if !s.quotient.is_zero() && !inc.node {
                let mut p = parts.clone();
                p.fol_sings[si].incidences[ii].z += &rat!(1);
                out.push((
                    rebuilt(p),
                    Tweak {
                        kind: TweakKind::Z,
                        subject: site.clone(),
                        detail: "Z shifted by 1".into(),
                        expected: [clause::Z_CANONICAL.to_string()].into(),
                    },
                ));
            }

            let sing_clause = if s.quotient.is_zero() {
                let central = inc.z == Rat::one() && inc.cs.is_zero();
                central.then_some(clause::SADDLE_NODE)
            } else {
                Some(clause::CS_PAIRING)
            };
            if let Some(cl) = sing_clause {
                let mut expected = adjunction_extra(m, &inc.curve);
                expected.insert(cl.to_string());
                let mut p = parts.clone();
                p.fol_sings[si].incidences[ii].cs += &rat!(1);
                out.push((
                    rebuilt(p),
                    Tweak {
                        kind: TweakKind::Cs,
                        subject: site,
                        detail: "CS shifted by 1".into(),
                        expected,
                    },
                ));
            }
        }
    }

    for (ci, c) in parts.curves.iter().enumerate() {
        if !c.invariant {
            let mut p = parts.clone();
            *p.curves[ci].tang.as_mut().expect("non-invariant carries tang") = rat!(-1);
            out.push((
                rebuilt(p),
                Tweak {
                    kind: TweakKind::Tang,
                    subject: c.id.to_string(),
                    detail: "tang set to -1".into(),
                    expected: [clause::TANG_RANGE.to_string()].into(),
                },
            ));
            if !m.meets_ambient_singularity(&c.id) {
                let mut p = parts.clone();
                *p.curves[ci].tang.as_mut().expect("non-invariant carries tang") += &rat!(1, 2);
                out.push((
                    rebuilt(p),
                    Tweak {
                        kind: TweakKind::Tang,
                        subject: c.id.to_string(),
                        detail: "tang shifted by 1/2".into(),
                        expected: [clause::TANG_RANGE.to_string()].into(),
                    },
                ));
            }
        }

        let mut p = parts.clone();
        p.curves[ci].chi += &rat!(1);
        out.push((
            rebuilt(p),
            Tweak {
                kind: TweakKind::Chi,
                subject: c.id.to_string(),
                detail: "chi shifted by 1".into(),
                expected: [clause::CHI_DEFINITION.to_string()].into(),
            },
        ));

        let mut expected = adjunction_extra(m, &c.id);
        expected.insert(clause::CHI_DEFINITION.to_string());
        let mut p = parts.clone();
        p.curves[ci].self_int += &rat!(1);
        out.push((
            rebuilt(p),
            Tweak {
                kind: TweakKind::SelfInt,
                subject: c.id.to_string(),
                detail: "C^2 shifted by 1".into(),
                expected: expected.clone(),
            },
        ));

        if !m.meets_ambient_singularity(&c.id) {
            let mut expected = expected;
            expected.insert(clause::PAIRING_INTEGRALITY.to_string());
            let mut p = parts.clone();
            p.curves[ci].self_int += &rat!(1, 2);
            out.push((
                rebuilt(p),
                Tweak {
                    kind: TweakKind::SelfInt,
                    subject: c.id.to_string(),
                    detail: "C^2 shifted by 1/2".into(),
                    expected,
                },
            ));
        }
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_models_are_valid() {
        for (name, m) in [
            ("x1", x1()),
            ("x3", x3()),
            ("single_minus_two", single_minus_two()),
            ("nef_model", nef_model()),
            ("x3_with_tail", x3_with_tail()),
            ("nodal_model", nodal_model()),
            ("cycle_model", cycle_model()),
            ("tail_cluster", tail_cluster()),
            ("two_cycle", two_cycle()),
            ("gallery", gallery().0),
        ] {
            let rep = m.validate();
            assert!(rep.is_valid(), "{name}: {:?}", rep.violations);
        }
    }

    #[test]
    fn random_models_are_valid_and_reproducible() {
        for seed in 0..60 {
            let m = random_model(seed);
            assert_eq!(m, random_model(seed), "seed {seed} must be reproducible");
            assert!(m.curves().len() <= 12, "seed {seed} exceeds the curve cap");
            let rep = m.validate();
            assert!(rep.is_valid(), "seed {seed}: {:?}", rep.violations);
        }
    }

    #[test]
    fn every_tweak_flags_exactly_its_expected_clauses() {
        let mut applied = 0usize;
        for seed in 0..12 {
            let m = random_model(seed);
            for (tm, tweak) in tweaks(&m) {
                assert!(!tweak.expected.is_empty());
                let rep = tm.validate();
                assert_eq!(
                    rep.clause_set(),
                    tweak.expected,
                    "seed {seed}, {:?} tweak at {} ({})",
                    tweak.kind,
                    tweak.subject,
                    tweak.detail
                );
                applied += 1;
            }
        }
        assert!(applied > 100, "tweak enumeration looks too small: {applied}");
    }

    #[test]
    fn tweak_kinds_cover_all_five_fields() {
        let mut kinds = BTreeSet::new();
        for seed in 0..12 {
            for (_, t) in tweaks(&random_model(seed)) {
                kinds.insert(format!("{:?}", t.kind));
            }
        }
        assert_eq!(kinds.len(), 5);
    }

    #[test]
    fn chain_component_places_canonical_indices() {
        let m = x3();
        assert_eq!(m.z_total(&CurveId::from("C1")), rat!(1));
        assert_eq!(m.z_total(&CurveId::from("C2")), rat!(2));
        assert_eq!(m.cs_total(&CurveId::from("C1")), rat!(-2));
        assert_eq!(m.cs_total(&CurveId::from("C2")), rat!(-2));
        let p1 = m.fol_sing(&SingId::from("Cp1")).unwrap();
        assert_eq!(p1.quotient, rat!(-2));
        let p2 = m.fol_sing(&SingId::from("Cp2")).unwrap();
        assert_eq!(p2.quotient, rat!(-3, 2));
    }
}
