//! Seeded samplers for points, P-geodesics and pieces.
//!
//! Values are drawn from small grids so that equal exit points, shared
//! prefixes and same-piece continuations show up often: uniform sampling
//! would almost never produce the coincidences the metric cases hinge on.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pgeodesic::{PGeodesic, PStep};
use crate::pieces::{Family, PieceId, PieceKind, PiecePoint};
use crate::scalar::Scalar;
use crate::structure::PieceRef;
use crate::universal::{Capacity, Label, UPoint, USegment};

const POOL: usize = 64;

pub struct Sampler<'a> {
    family: &'a Family,
    ids: Vec<PieceId>,
    labels: Label,
    rng: ChaCha8Rng,
    pool: Vec<UPoint>,
}

impl<'a> Sampler<'a> {
    pub fn new(family: &'a Family, capacity: Capacity, seed: u64) -> Self {
        let labels = match capacity {
            Capacity::Finite(c) => c.clamp(1, 3),
            Capacity::Infinite => 3,
        };
        Sampler {
            family,
            ids: family.ids().collect(),
            labels,
            rng: ChaCha8Rng::seed_from_u64(seed),
            pool: Vec::new(),
        }
    }

    pub fn family(&self) -> &'a Family {
        self.family
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn grid(&mut self, choices: &[(i64, i64)]) -> Scalar {
        let &(n, d) = choices.choose(&mut self.rng).expect("non-empty grid");
        Scalar::ratio(n, d)
    }

    pub fn piece_id(&mut self) -> PieceId {
        *self
            .ids
            .choose(&mut self.rng)
            .expect("families are non-empty")
    }

    pub fn label(&mut self) -> Label {
        self.rng.gen_range(0..self.labels)
    }

    /// A point of the piece other than its basepoint.
    pub fn piece_point(&mut self, piece: PieceId) -> PiecePoint {
        const LINE: &[(i64, i64)] = &[(1, 2), (1, 1), (3, 2), (2, 1), (3, 1)];
        const AXIS: &[(i64, i64)] = &[(-1, 1), (-1, 2), (0, 1), (0, 1), (1, 2), (1, 1)];
        const LEN: &[(i64, i64)] = &[(1, 2), (1, 1), (3, 2)];
        let kind = self.family.piece(piece).expect("sampled id").kind.clone();
        match kind {
            PieceKind::Line => {
                let x = self.grid(LINE);
                PiecePoint::line(if self.rng.gen_bool(0.5) { x } else { -x })
            }
            PieceKind::L1 { dim } => loop {
                let c: Vec<Scalar> = (0..dim).map(|_| self.grid(AXIS)).collect();
                if c.iter().any(|x| !x.is_zero()) {
                    break PiecePoint::Coords(c);
                }
            },
            PieceKind::Tree => loop {
                let n = self.rng.gen_range(1..=2);
                let letters: Vec<(i64, Scalar)> = (0..n)
                    .map(|_| {
                        let b = self.rng.gen_range(1..=3);
                        let b = if self.rng.gen_bool(0.5) { b } else { -b };
                        (b, self.grid(LEN))
                    })
                    .collect();
                let w = PiecePoint::word(letters).expect("non-zero branches");
                if w != PiecePoint::Word(Default::default()) {
                    break w;
                }
            },
        }
    }

    pub fn segment_in(&mut self, piece: PieceId, label: Label) -> USegment {
        let value = self.piece_point(piece);
        let len = self
            .family
            .piece(piece)
            .expect("sampled id")
            .norm(&value)
            .expect("own shape");
        USegment::new(len, piece, value, label)
    }

    pub fn segment(&mut self) -> USegment {
        let piece = self.piece_id();
        let label = self.label();
        self.segment_in(piece, label)
    }

    pub fn step(&mut self) -> PStep {
        self.segment().step()
    }

    pub fn pgeodesic(&mut self, max_steps: usize) -> PGeodesic {
        let n = self.rng.gen_range(1..=max_steps.max(1));
        PGeodesic::from_steps((0..n).map(|_| self.step()).collect())
    }

    fn fresh(&mut self) -> UPoint {
        let n = self.rng.gen_range(0..=3);
        UPoint::from_segments((0..n).map(|_| self.segment()).collect())
    }

    /// A point derived from `p`: keep a prefix, maybe cut the next segment
    /// partway, maybe branch off within the same piece copy, then append a
    /// random tail.
    pub fn near(&mut self, p: &UPoint) -> UPoint {
        let segs = p.segments();
        let k = self.rng.gen_range(0..=segs.len());
        let mut out: Vec<USegment> = segs[..k].to_vec();
        let mut tail_len = self.rng.gen_range(0..=2);
        if let Some(next) = segs.get(k) {
            match self.rng.gen_range(0..3) {
                0 => {
                    let cut = &next.len * self.grid(&[(1, 4), (1, 3), (1, 2), (2, 3), (3, 4)]);
                    let head = UPoint::from_segments(vec![next.clone()])
                        .restrict(self.family, &cut)
                        .expect("cut inside the segment");
                    out.extend(head.segments().iter().cloned());
                }
                1 => {
                    out.push(self.segment_in(next.piece, next.label));
                    tail_len = tail_len.min(1);
                }
                _ => {}
            }
        }
        out.extend((0..tail_len).map(|_| self.segment()));
        UPoint::from_segments(out)
    }

    /// A point from the pool's neighbourhood, occasionally a fresh one.
    pub fn point(&mut self) -> UPoint {
        let p = if self.pool.is_empty() || self.rng.gen_bool(0.2) {
            self.fresh()
        } else {
            let base = self.pool.choose(&mut self.rng).expect("non-empty").clone();
            self.near(&base)
        };
        if self.pool.len() < POOL {
            self.pool.push(p.clone());
        } else {
            let i = self.rng.gen_range(0..POOL);
            self.pool[i] = p.clone();
        }
        p
    }

    /// A parameter in `[0, len]`, on a twelfths grid or at one of `marks`.
    pub fn param(&mut self, len: &Scalar, marks: &[Scalar]) -> Scalar {
        let inside: Vec<&Scalar> = marks
            .iter()
            .filter(|m| !m.is_negative() && *m <= len)
            .collect();
        if !inside.is_empty() && self.rng.gen_bool(0.25) {
            return (*inside.choose(&mut self.rng).expect("non-empty")).clone();
        }
        len * Scalar::ratio(self.rng.gen_range(0..=12), 12)
    }

    /// Two parameters `a < b` in `[0, len]`; `len` must be positive.
    pub fn param_pair(&mut self, len: &Scalar, marks: &[Scalar]) -> (Scalar, Scalar) {
        loop {
            let a = self.param(len, marks);
            let b = self.param(len, marks);
            if a < b {
                return (a, b);
            }
            if b < a {
                return (b, a);
            }
        }
    }

    /// A piece whose base is a prefix of `r`, often continuing along `r`.
    pub fn piece_ref_near(&mut self, r: &UPoint) -> PieceRef {
        let k = self.rng.gen_range(0..=r.segments().len());
        let base = r.prefix(k);
        match r.segments().get(k) {
            Some(next) if self.rng.gen_bool(0.6) => PieceRef::new(base, next.piece, next.label),
            _ => {
                let piece = self.piece_id();
                let label = self.label();
                PieceRef::new(base, piece, label)
            }
        }
    }

    /// A random member of `p`, the base itself about a fifth of the time.
    pub fn member_of(&mut self, p: &PieceRef) -> UPoint {
        if self.rng.gen_bool(0.2) {
            return p.base.clone();
        }
        let x = self.piece_point(p.piece);
        p.embed(self.family, &x).expect("sampled in the piece")
    }

    /// A point near `p`: a member, or a member with a random tail.
    pub fn point_near_piece(&mut self, p: &PieceRef) -> UPoint {
        let m = self.member_of(p);
        match self.rng.gen_range(0..3) {
            0 => m,
            1 => {
                let tail = self.fresh();
                m.concat(&tail)
            }
            _ => self.near(&m),
        }
    }
}
