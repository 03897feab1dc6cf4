//! Little-endian base-`b` digit maps on row indices.

#[derive(Debug, Clone)]
pub(crate) struct Digits {
    base: usize,
    pows: Vec<usize>,
}

impl Digits {
    /// Digits of numbers below `base^len`.
    pub(crate) fn new(base: usize, len: usize) -> Self {
        let mut pows = Vec::with_capacity(len + 1);
        let mut x = 1usize;
        for _ in 0..=len {
            pows.push(x);
            x = x.checked_mul(base).expect("sub-packetization overflows usize");
        }
        Digits { base, pows }
    }

    /// `base^len`.
    pub(crate) fn total(&self) -> usize {
        *self.pows.last().unwrap()
    }

    pub(crate) fn digit(&self, i: usize, pos: usize) -> usize {
        (i / self.pows[pos]) % self.base
    }

    /// `i` with digit `pos` replaced by `a`.
    pub(crate) fn with_digit(&self, i: usize, pos: usize, a: usize) -> usize {
        i - self.digit(i, pos) * self.pows[pos] + a * self.pows[pos]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_three() {
        let d = Digits::new(3, 4);
        assert_eq!(d.total(), 81);
        // 47 = 2 + 0*3 + 2*9 + 1*27
        assert_eq!((0..4).map(|p| d.digit(47, p)).collect::<Vec<_>>(), vec![2, 0, 2, 1]);
        assert_eq!(d.with_digit(47, 1, 1), 50);
        assert_eq!(d.with_digit(47, 3, 0), 20);
    }

    #[test]
    fn base_one_is_all_zero() {
        let d = Digits::new(1, 3);
        assert_eq!(d.total(), 1);
        assert_eq!(d.digit(0, 2), 0);
        assert_eq!(d.with_digit(0, 1, 0), 0);
    }
}
