use serde::Serialize;

/// Which one-sided value a map takes at its breakpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Shape of a map between consecutive knots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Piece {
    Constant,
    Affine,
    /// `F(x) = F(x_k+) + rate (x^2 - x_k^2) / 2`.
    Quadratic { rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapKnot {
    pub x: f64,
    pub left: f64,
    pub right: f64,
}

impl MapKnot {
    pub fn is_jump(&self) -> bool {
        self.left != self.right
    }
}

/// A monotone map of time given by knots with one-sided values and a piece
/// shape between neighbours; constant after the last knot up to `domain_end`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReparamMap {
    knots: Vec<MapKnot>,
    pieces: Vec<Piece>,
    side: Side,
    domain_end: f64,
}

impl ReparamMap {
    pub(crate) fn new(knots: Vec<MapKnot>, pieces: Vec<Piece>, side: Side, domain_end: f64) -> Self {
        assert!(!knots.is_empty() && pieces.len() + 1 == knots.len());
        Self { knots, pieces, side, domain_end }
    }

    pub fn knots(&self) -> &[MapKnot] {
        &self.knots
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// End of the interval on which the map is determined.
    pub fn domain_end(&self) -> f64 {
        self.domain_end
    }

    fn piece_value(&self, k: usize, x: f64) -> f64 {
        let (a, b) = (&self.knots[k], &self.knots[k + 1]);
        match self.pieces[k] {
            Piece::Constant => a.right,
            Piece::Affine => a.right + (b.left - a.right) * (x - a.x) / (b.x - a.x),
            Piece::Quadratic { rate } => a.right + 0.5 * rate * (x * x - a.x * a.x),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_side(x, self.side)
    }

    pub fn eval_left(&self, x: f64) -> f64 {
        self.eval_side(x, Side::Left)
    }

    pub fn eval_right(&self, x: f64) -> f64 {
        self.eval_side(x, Side::Right)
    }

    fn eval_side(&self, x: f64, side: Side) -> f64 {
        let i = self.knots.partition_point(|k| k.x < x);
        if let Some(k) = self.knots.get(i).filter(|k| k.x == x) {
            return match side {
                Side::Left => k.left,
                Side::Right => k.right,
            };
        }
        match i {
            0 => self.knots[0].left,
            i if i == self.knots.len() => self.knots[i - 1].right,
            i => self.piece_value(i - 1, x),
        }
    }

    pub fn jumps(&self) -> Vec<MapKnot> {
        self.knots.iter().copied().filter(MapKnot::is_jump).collect()
    }

    /// Maximal intervals `(a, b, value)` of positive length on which the map
    /// is constant.
    pub fn plateaus(&self) -> Vec<(f64, f64, f64)> {
        let mut out: Vec<(f64, f64, f64)> = Vec::new();
        let mut push = |a: f64, b: f64, v: f64| match out.last_mut() {
            Some(last) if last.1 == a && last.2 == v => last.1 = b,
            _ => out.push((a, b, v)),
        };
        for (k, piece) in self.pieces.iter().enumerate() {
            let (a, b) = (self.knots[k], self.knots[k + 1]);
            if *piece == Piece::Constant || a.right == b.left && *piece == Piece::Affine {
                push(a.x, b.x, a.right);
            }
        }
        let last = self.knots.last().unwrap();
        if self.domain_end > last.x {
            push(last.x, self.domain_end, last.right);
        }
        out
    }

    /// Largest decrease anywhere in the map (0 when nondecreasing).
    pub fn monotonicity_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, knot) in self.knots.iter().enumerate() {
            worst = worst.max(knot.left - knot.right);
            if let Some(next) = self.knots.get(k + 1) {
                worst = worst.max(knot.right - next.left);
                if let Piece::Quadratic { rate } = self.pieces[k] {
                    worst = worst.max(-rate);
                }
            }
        }
        worst
    }

    /// Generalized inverse `inf{x >= 0 : F(x) >= y}`, or `domain_end` when
    /// `y` is never reached.
    pub fn inverse(&self, y: f64) -> f64 {
        for (k, knot) in self.knots.iter().enumerate() {
            if knot.left >= y {
                if k == 0 {
                    return knot.x;
                }
                let prev = &self.knots[k - 1];
                if prev.right >= y {
                    return prev.x;
                }
                return match self.pieces[k - 1] {
                    Piece::Constant => knot.x,
                    Piece::Affine => prev.x + (y - prev.right) / (knot.left - prev.right) * (knot.x - prev.x),
                    Piece::Quadratic { rate } => (prev.x * prev.x + 2.0 * (y - prev.right) / rate).sqrt().min(knot.x),
                };
            }
        }
        let last = self.knots.last().unwrap();
        if last.right >= y {
            last.x
        } else {
            self.domain_end
        }
    }
}

/// Weighted least-squares fit by a nonincreasing sequence (pool adjacent
/// violators). Returns the fit and the largest change made.
pub fn isotonic_nonincreasing(values: &[f64], weights: &[f64]) -> (Vec<f64>, f64) {
    assert_eq!(values.len(), weights.len());
    // Blocks of (mean, weight, count).
    let mut blocks: Vec<(f64, f64, usize)> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((v, w, 1));
        while blocks.len() > 1 {
            let n = blocks.len();
            let (b, a) = (blocks[n - 1], blocks[n - 2]);
            if a.0 >= b.0 {
                break;
            }
            let w = a.1 + b.1;
            let mean = if w > 0.0 { (a.0 * a.1 + b.0 * b.1) / w } else { 0.5 * (a.0 + b.0) };
            blocks.truncate(n - 2);
            blocks.push((mean, w, a.2 + b.2));
        }
    }
    let fit: Vec<f64> = blocks.iter().flat_map(|&(m, _, c)| std::iter::repeat_n(m, c)).collect();
    let adjust = fit.iter().zip(values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    (fit, adjust)
}
