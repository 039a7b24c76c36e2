//! Dyadic intervals `[2^k n', 2^k (n'+1)]` and their integer shifts.

/// A dyadic interval, stored as scale exponent and position index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicInterval {
    /// Scale exponent: the length is `2^k`.
    pub scale: i32,
    /// Position index `n'`: the left endpoint is `2^k n'`.
    pub index: i64,
}

impl DyadicInterval {
    pub fn new(scale: i32, index: i64) -> Self {
        DyadicInterval { scale, index }
    }

    pub fn length(&self) -> f64 {
        (self.scale as f64).exp2()
    }

    pub fn left(&self) -> f64 {
        self.length() * self.index as f64
    }

    pub fn right(&self) -> f64 {
        self.length() * (self.index + 1) as f64
    }

    pub fn center(&self) -> f64 {
        self.length() * (self.index as f64 + 0.5)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.left() <= x && x < self.right()
    }

    /// The translate sitting `n` units of the interval's own length away,
    /// on the left for positive `n`.
    pub fn shift(&self, n: i64) -> DyadicInterval {
        DyadicInterval {
            scale: self.scale,
            index: self.index - n,
        }
    }

    /// The parent interval (twice the length) containing this one.
    pub fn parent(&self) -> DyadicInterval {
        DyadicInterval {
            scale: self.scale + 1,
            index: self.index.div_euclid(2),
        }
    }

    /// Left and right halves.
    pub fn children(&self) -> (DyadicInterval, DyadicInterval) {
        let k = self.scale - 1;
        (
            DyadicInterval::new(k, 2 * self.index),
            DyadicInterval::new(k, 2 * self.index + 1),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry() {
        let i = DyadicInterval::new(-2, 5);
        assert_eq!(i.length(), 0.25);
        assert_eq!(i.left(), 1.25);
        assert_eq!(i.right(), 1.5);
        assert!(i.contains(1.3));
        assert!(!i.contains(1.5));
    }

    #[test]
    fn shift_moves_by_own_length() {
        let i = DyadicInterval::new(3, 4); // [32, 40]
        let s = i.shift(2); // two lengths to the left
        assert_eq!(s.scale, 3);
        assert_eq!(s.index, 2);
        assert_eq!(s.left(), 16.0);
    }

    #[test]
    fn parent_child_round_trip() {
        let i = DyadicInterval::new(0, -7);
        let (a, b) = i.children();
        assert_eq!(a.parent(), i);
        assert_eq!(b.parent(), i);
        assert_eq!(a.left(), i.left());
        assert_eq!(b.right(), i.right());
    }
}
