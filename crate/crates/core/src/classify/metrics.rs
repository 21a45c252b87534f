/// Binary confusion counts with at-risk as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn from_predictions(predictions: &[bool], truth: &[bool]) -> Confusion {
        let mut c = Confusion::default();
        for (&p, &t) in predictions.iter().zip(truth) {
            match (p, t) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fn_ += 1,
            }
        }
        c
    }
}

/// Precision, recall and F1; undefined ratios count as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub confusion: Confusion,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl From<Confusion> for Scores {
    fn from(c: Confusion) -> Scores {
        let precision = ratio(c.tp, c.tp + c.fp);
        let recall = ratio(c.tp, c.tp + c.fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Scores { f1, precision, recall, confusion: c }
    }
}

pub fn f1(predictions: &[bool], truth: &[bool]) -> Scores {
    Confusion::from_predictions(predictions, truth).into()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect() {
        let t = [true, false, true, false];
        assert_eq!(f1(&t, &t).f1, 1.0);
    }

    #[test]
    fn half() {
        let s = f1(&[true, false, true, false], &[true, true, false, false]);
        assert_eq!((s.precision, s.recall, s.f1), (0.5, 0.5, 0.5));
        assert_eq!(s.confusion, Confusion { tp: 1, fp: 1, tn: 1, fn_: 1 });
    }

    #[test]
    fn all_negative_predictions() {
        let s = f1(&[false, false, false], &[true, false, true]);
        assert_eq!(s.f1, 0.0);
        assert_eq!(s.precision, 0.0);
    }
}
