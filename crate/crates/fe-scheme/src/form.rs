use crate::error::FeError;
use crate::group::digest16;

/// Row-major integer matrix used to describe factored quadratic forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self, FeError> {
        if data.len() != rows * cols {
            return Err(FeError::dimension(
                "matrix construction",
                format!("{} entries", rows * cols),
                format!("{} entries", data.len()),
            ));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, FeError> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(height * width);
        for (idx, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(FeError::dimension(
                    format!("matrix row {idx}"),
                    format!("{width} entries"),
                    format!("{} entries", row.len()),
                ));
            }
            data.extend_from_slice(row);
        }
        IntMatrix::new(height, width, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, row: usize, col: usize) -> i64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[i64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn entries(&self) -> &[i64] {
        &self.data
    }
}

/// Factored quadratic form describing the encrypted part of a classifier.
///
/// The form evaluates `n + 1`-dimensional inputs `x' = (1, x)` to the vector
/// with entries `f_j(x) = sum_k w2[j][k] * (P x')_k^2`. `x_max` is the
/// largest feature value the certified output bounds account for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    p: IntMatrix,
    w2: IntMatrix,
    x_max: u32,
}

impl QuadraticForm {
    pub fn new(p: IntMatrix, w2: IntMatrix, x_max: u32) -> Result<Self, FeError> {
        if p.cols() < 2 {
            return Err(FeError::dimension(
                "projection matrix",
                "at least 2 columns (bias plus one feature)".to_string(),
                format!("{} columns", p.cols()),
            ));
        }
        if w2.cols() != p.rows() {
            return Err(FeError::dimension(
                "form factors",
                format!("w2 with {} columns", p.rows()),
                format!("w2 with {} columns", w2.cols()),
            ));
        }
        if w2.rows() == 0 {
            return Err(FeError::dimension(
                "form factors",
                "at least one output row".to_string(),
                "0 output rows".to_string(),
            ));
        }
        Ok(QuadraticForm { p, w2, x_max })
    }

    pub fn p(&self) -> &IntMatrix {
        &self.p
    }

    pub fn w2(&self) -> &IntMatrix {
        &self.w2
    }

    pub fn x_max(&self) -> u32 {
        self.x_max
    }

    /// Number of features, excluding the bias coordinate.
    pub fn n(&self) -> usize {
        self.p.cols() - 1
    }

    /// Inner dimension of the factorization.
    pub fn d(&self) -> usize {
        self.p.rows()
    }

    /// Number of outputs.
    pub fn outputs(&self) -> usize {
        self.w2.rows()
    }

    /// Digest over the parts of the form shared by every output: dimensions,
    /// input range, and the projection matrix.
    pub fn shared_digest(&self) -> [u8; 16] {
        let mut meta = Vec::with_capacity(16);
        meta.extend_from_slice(&(self.p.rows() as u32).to_le_bytes());
        meta.extend_from_slice(&(self.p.cols() as u32).to_le_bytes());
        meta.extend_from_slice(&self.x_max.to_le_bytes());
        let mut entries = Vec::with_capacity(self.p.entries().len() * 8);
        for &e in self.p.entries() {
            entries.extend_from_slice(&e.to_le_bytes());
        }
        digest16(&[b"form-shared", &meta, &entries])
    }

    /// Digest over the per-output data: the output index and its weight row.
    pub fn row_digest(&self, index: usize) -> [u8; 16] {
        let mut buf = Vec::with_capacity(8 + self.w2.cols() * 8);
        buf.extend_from_slice(&(index as u32).to_le_bytes());
        for &e in self.w2.row(index) {
            buf.extend_from_slice(&e.to_le_bytes());
        }
        digest16(&[b"form-row", &buf])
    }

    /// Full form digest carried by a functional key: the shared half followed
    /// by the per-output half.
    pub fn output_digest(&self, index: usize) -> [u8; 32] {
        let mut out = [0u8; 32];
        out[..16].copy_from_slice(&self.shared_digest());
        out[16..].copy_from_slice(&self.row_digest(index));
        out
    }

    /// Certified bound on `|f_j(x)|` over all inputs with `0 <= x_i <= x_max`:
    /// each projected coordinate is bounded by its row's weighted maximum, and
    /// the squares are combined with the absolute output weights.
    ///
    /// Entry-wise maxima are attained coordinate by coordinate because each
    /// `|(P x')_k|` is maximized independently at a corner of the input box,
    /// so the bound is sound though not always tight.
    pub fn certified_bound(&self, index: usize, capacity: u128) -> Result<u128, FeError> {
        let overflow = |value: &str| FeError::BoundOverflow {
            bound: value.to_string(),
            capacity,
        };
        let x_max = self.x_max as u128;
        let mut total: u128 = 0;
        for (k, &w) in self.w2.row(index).iter().enumerate() {
            if w == 0 {
                continue;
            }
            let mut reach: u128 = 0;
            for (i, &p) in self.p.row(k).iter().enumerate() {
                let scale = if i == 0 { 1 } else { x_max };
                let term = (p.unsigned_abs() as u128)
                    .checked_mul(scale)
                    .ok_or_else(|| overflow("overflowing projection reach"))?;
                reach = reach
                    .checked_add(term)
                    .ok_or_else(|| overflow("overflowing projection reach"))?;
            }
            let squared = reach
                .checked_mul(reach)
                .ok_or_else(|| overflow("overflowing squared reach"))?;
            let contribution = (w.unsigned_abs() as u128)
                .checked_mul(squared)
                .ok_or_else(|| overflow("overflowing output bound"))?;
            total = total
                .checked_add(contribution)
                .ok_or_else(|| overflow("overflowing output bound"))?;
        }
        if total > capacity {
            return Err(FeError::BoundOverflow {
                bound: total.to_string(),
                capacity,
            });
        }
        Ok(total)
    }

    /// Exact integer evaluation of every output on `x' = (1, x)`.
    pub fn evaluate(&self, x: &[u32]) -> Result<Vec<i128>, FeError> {
        if x.len() != self.n() {
            return Err(FeError::dimension(
                "form evaluation",
                format!("{} features", self.n()),
                format!("{} features", x.len()),
            ));
        }
        let d = self.d();
        let mut projected = vec![0i128; d];
        for (k, slot) in projected.iter_mut().enumerate() {
            let row = self.p.row(k);
            let mut acc: i128 = row[0] as i128;
            for (i, &value) in x.iter().enumerate() {
                acc = acc
                    .checked_add((row[i + 1] as i128) * (value as i128))
                    .ok_or_else(|| FeError::dimension(
                        "form evaluation",
                        "projection within i128".to_string(),
                        "overflow".to_string(),
                    ))?;
            }
            *slot = acc;
        }
        let mut outputs = Vec::with_capacity(self.outputs());
        for j in 0..self.outputs() {
            let mut acc: i128 = 0;
            for (k, &w) in self.w2.row(j).iter().enumerate() {
                let sq = projected[k]
                    .checked_mul(projected[k])
                    .ok_or_else(|| FeError::dimension(
                        "form evaluation",
                        "square within i128".to_string(),
                        "overflow".to_string(),
                    ))?;
                acc = sq
                    .checked_mul(w as i128)
                    .and_then(|term| acc.checked_add(term))
                    .ok_or_else(|| FeError::dimension(
                        "form evaluation",
                        "output within i128".to_string(),
                        "overflow".to_string(),
                    ))?;
            }
            outputs.push(acc);
        }
        Ok(outputs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(p: &[Vec<i64>], w2: &[Vec<i64>], x_max: u32) -> QuadraticForm {
        QuadraticForm::new(
            IntMatrix::from_rows(p).unwrap(),
            IntMatrix::from_rows(w2).unwrap(),
            x_max,
        )
        .unwrap()
    }

    #[test]
    fn zero_weight_row_has_zero_bound() {
        let f = form(
            &[vec![1, 2], vec![3, -4]],
            &[vec![0, 0], vec![1, 1]],
            100,
        );
        assert_eq!(f.certified_bound(0, u128::MAX).unwrap(), 0);
    }

    #[test]
    fn identity_projection_bound_matches_hand_computation() {
        // P = I (2x2), w2 row = (1, 1), x_max = 3: the bias coordinate is
        // capped at 1 and the feature coordinate at 3, so the bound is
        // 1^2 + 3^2 = 10.
        let f = form(&[vec![1, 0], vec![0, 1]], &[vec![1, 1]], 3);
        assert_eq!(f.certified_bound(0, u128::MAX).unwrap(), 10);
    }

    #[test]
    fn bound_exceeding_capacity_is_rejected() {
        let f = form(&[vec![1, 1000]], &[vec![1000]], 1000);
        let err = f.certified_bound(0, 100).unwrap_err();
        match err {
            FeError::BoundOverflow { capacity, .. } => assert_eq!(capacity, 100),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn evaluate_matches_direct_expansion() {
        let f = form(
            &[vec![1, 2, -1], vec![0, 1, 1]],
            &[vec![3, -2], vec![0, 5]],
            10,
        );
        let x = [4u32, 7];
        // h = (1 + 8 - 7, 4 + 7) = (2, 11)
        // f_0 = 3*4 - 2*121 = -230; f_1 = 5*121 = 605
        assert_eq!(f.evaluate(&x).unwrap(), vec![-230, 605]);
    }

    #[test]
    fn evaluate_rejects_wrong_arity() {
        let f = form(&[vec![1, 2]], &[vec![1]], 10);
        assert!(matches!(
            f.evaluate(&[1, 2]),
            Err(FeError::Dimension { .. })
        ));
    }

    #[test]
    fn digests_separate_shared_and_row_halves() {
        let a = form(&[vec![1, 2], vec![3, 4]], &[vec![1, 0], vec![0, 1]], 5);
        let b = form(&[vec![1, 2], vec![3, 4]], &[vec![1, 0], vec![2, 1]], 5);
        assert_eq!(a.shared_digest(), b.shared_digest());
        assert_eq!(a.row_digest(0), b.row_digest(0));
        assert_ne!(a.row_digest(1), b.row_digest(1));

        let c = form(&[vec![1, 2], vec![3, 5]], &[vec![1, 0], vec![0, 1]], 5);
        assert_ne!(a.shared_digest(), c.shared_digest());

        let d = form(&[vec![1, 2], vec![3, 4]], &[vec![1, 0], vec![0, 1]], 6);
        assert_ne!(a.shared_digest(), d.shared_digest());
    }

    #[test]
    fn output_digest_embeds_index() {
        let f = form(
            &[vec![1, 2], vec![3, 4]],
            &[vec![1, 1], vec![1, 1]],
            5,
        );
        // Identical rows still yield distinct digests because the output
        // index is part of the hashed data.
        assert_ne!(f.output_digest(0), f.output_digest(1));
        assert_eq!(f.output_digest(0)[..16], f.output_digest(1)[..16]);
    }

    #[test]
    fn mismatched_factor_shapes_are_rejected() {
        let p = IntMatrix::from_rows(&[vec![1, 2], vec![3, 4]]).unwrap();
        let w2 = IntMatrix::from_rows(&[vec![1, 2, 3]]).unwrap();
        assert!(matches!(
            QuadraticForm::new(p, w2, 10),
            Err(FeError::Dimension { .. })
        ));
    }
}
