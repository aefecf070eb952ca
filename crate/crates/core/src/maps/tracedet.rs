use super::{check_len, BoxDomain, DiagramMap, Jacobian, MapError, Result};
use crate::geom2d::{BoundingBox, Point};

/// A symmetric `d×d` matrix stored as its concatenated diagonals
/// `j - i = 0, 1, …, d - 1`: first the `d` diagonal entries, then the
/// `d - 1` entries of the first super-diagonal, and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrixVec {
    d: usize,
    entries: Vec<f64>,
}

impl SymMatrixVec {
    pub fn new(d: usize, entries: Vec<f64>) -> Result<Self> {
        check_len(&entries, param_count(d))?;
        Ok(Self { d, entries })
    }

    pub fn from_matrix(m: &[Vec<f64>]) -> Result<Self> {
        let d = m.len();
        let mut entries = Vec::with_capacity(param_count(d));
        for k in 0..d {
            for i in 0..d - k {
                entries.push(m[i][i + k]);
            }
        }
        Self::new(d, entries)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Dense row-major matrix.
    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        unpack(self.d, &self.entries)
    }
}

/// Number of free parameters of a symmetric `d×d` matrix.
pub fn param_count(d: usize) -> usize {
    d * (d + 1) / 2
}

/// Index of entry `(i, i + k)` in the diagonal-concatenated encoding.
fn param_index(d: usize, i: usize, k: usize) -> usize {
    // diagonals 0..k hold d + (d-1) + … + (d-k+1) entries
    k * d - k * (k.saturating_sub(1)) / 2 + i
}

fn unpack(d: usize, v: &[f64]) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; d]; d];
    for k in 0..d {
        for i in 0..d - k {
            let a = v[param_index(d, i, k)];
            m[i][i + k] = a;
            m[i + k][i] = a;
        }
    }
    m
}

/// Determinant by cofactor expansion for `d ≤ 4`, partial-pivot LU above.
pub fn determinant(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let idx: Vec<usize> = (0..n).collect();
    if n <= 4 {
        laplace(m, &idx, &idx)
    } else {
        lu_det(m, &idx, &idx)
    }
}

/// Adjugate (transposed cofactor matrix) from explicit minors.
pub fn adjugate(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![1.0]];
    }
    let mut adj = vec![vec![0.0; n]; n];
    for i in 0..n {
        let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
        for j in 0..n {
            let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            let minor = if n - 1 <= 4 {
                laplace(m, &rows, &cols)
            } else {
                lu_det(m, &rows, &cols)
            };
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            adj[j][i] = sign * minor;
        }
    }
    adj
}

fn laplace(m: &[Vec<f64>], rows: &[usize], cols: &[usize]) -> f64 {
    match rows.len() {
        0 => 1.0,
        1 => m[rows[0]][cols[0]],
        2 => m[rows[0]][cols[0]] * m[rows[1]][cols[1]] - m[rows[0]][cols[1]] * m[rows[1]][cols[0]],
        _ => {
            let r0 = rows[0];
            let sub_rows = &rows[1..];
            let mut sum = 0.0;
            let mut sub_cols = Vec::with_capacity(cols.len() - 1);
            for (k, &c) in cols.iter().enumerate() {
                let a = m[r0][c];
                if a == 0.0 {
                    continue;
                }
                sub_cols.clear();
                sub_cols.extend(cols.iter().copied().filter(|&cc| cc != c));
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sum += sign * a * laplace(m, sub_rows, &sub_cols);
            }
            sum
        }
    }
}

fn lu_det(m: &[Vec<f64>], rows: &[usize], cols: &[usize]) -> f64 {
    let n = rows.len();
    let mut a: Vec<Vec<f64>> = rows
        .iter()
        .map(|&r| cols.iter().map(|&c| m[r][c]).collect())
        .collect();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&x, &y| a[x][k].abs().total_cmp(&a[y][k].abs()))
            .unwrap();
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for r in k + 1..n {
            let f = a[r][k] / a[k][k];
            for c in k..n {
                a[r][c] -= f * a[k][c];
            }
        }
    }
    det
}

/// `(tr A, det A)` for the encoded matrix.
pub fn tracedet_eval(v: &SymMatrixVec) -> Point {
    let m = v.to_matrix();
    let trace: f64 = v.entries[..v.d].iter().sum();
    Point::new(trace, determinant(&m))
}

/// Jacobian of `(tr, det)` with respect to the encoding.
///
/// The determinant row uses `∂det/∂a_ij = adj(A)_ji`; an off-diagonal
/// parameter sets both `a_ij` and `a_ji`, which doubles its derivative.
pub fn tracedet_jacobian(v: &SymMatrixVec) -> Jacobian {
    let d = v.d;
    let adj = adjugate(&v.to_matrix());
    let mut jac = Jacobian::zeros(param_count(d));
    for i in 0..d {
        jac.rows[0][i] = 1.0;
    }
    for k in 0..d {
        for i in 0..d - k {
            let p = param_index(d, i, k);
            jac.rows[1][p] = if k == 0 {
                adj[i][i]
            } else {
                2.0 * adj[i + k][i]
            };
        }
    }
    jac
}

/// `A ↦ (tr A, det A)` on symmetric `d×d` matrices with entries in `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct TraceDet {
    d: usize,
    domain: BoxDomain,
}

impl TraceDet {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(MapError::InvalidParameters(format!(
                "matrix size {d}, need at least 2"
            )));
        }
        Ok(Self {
            d,
            domain: BoxDomain::cube(param_count(d), -1.0, 1.0)?,
        })
    }

    pub fn matrix_size(&self) -> usize {
        self.d
    }

    fn encode(&self, x: &[f64]) -> Result<SymMatrixVec> {
        SymMatrixVec::new(self.d, x.to_vec())
    }
}

impl DiagramMap for TraceDet {
    fn name(&self) -> String {
        format!("tracedet:{}", self.d)
    }

    fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    fn evaluate(&self, x: &[f64]) -> Result<Point> {
        Ok(tracedet_eval(&self.encode(x)?))
    }

    fn jacobian(&self, x: &[f64]) -> Result<Jacobian> {
        Ok(tracedet_jacobian(&self.encode(x)?))
    }

    /// Trace in `[-d, d]`; Hadamard's inequality bounds `|det|` by `d^{d/2}`.
    fn image_bounds(&self) -> Option<BoundingBox> {
        let d = self.d as f64;
        let det = d.powf(0.5 * d);
        BoundingBox::new(-d, d, -det, det).ok()
    }

    fn default_box(&self) -> Option<BoundingBox> {
        match self.d {
            2 => BoundingBox::new(-2.5, 2.5, -2.5, 2.5).ok(),
            3 => BoundingBox::new(-5.0, 5.0, -5.0, 5.0).ok(),
            4 => BoundingBox::new(-6.0, 6.0, -20.0, 20.0).ok(),
            _ => self.image_bounds().map(|b| b.inflated(0.125)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_layout() {
        // [[a, d, f], [d, b, e], [f, e, c]] -> (a, b, c, d, e, f)
        let v = SymMatrixVec::new(3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let m = v.to_matrix();
        assert_eq!(m[0], vec![1.0, 4.0, 6.0]);
        assert_eq!(m[1], vec![4.0, 2.0, 5.0]);
        assert_eq!(m[2], vec![6.0, 5.0, 3.0]);
        assert_eq!(SymMatrixVec::from_matrix(&m).unwrap(), v);
    }

    #[test]
    fn identity_and_zero() {
        let id = SymMatrixVec::new(2, vec![1.0, 1.0, 0.0]).unwrap();
        assert_eq!(tracedet_eval(&id), Point::new(2.0, 1.0));
        let zero = SymMatrixVec::new(2, vec![0.0; 3]).unwrap();
        assert_eq!(tracedet_eval(&zero), Point::new(0.0, 0.0));
    }

    #[test]
    fn three_by_three_minus_one_diagonal() {
        let v = SymMatrixVec::new(3, vec![-1.0, -1.0, -1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(tracedet_eval(&v), Point::new(-3.0, 4.0));
    }

    #[test]
    fn wrong_length_is_encoding_error() {
        assert_eq!(
            SymMatrixVec::new(3, vec![0.0; 5]),
            Err(MapError::Encoding {
                expected: 6,
                got: 5
            })
        );
        let map = TraceDet::new(2).unwrap();
        assert!(map.evaluate(&[0.0; 4]).is_err());
    }

    #[test]
    fn jacobian_at_identity() {
        // det = ab - c² has gradient (b, a, -2c).
        let id = SymMatrixVec::new(2, vec![1.0, 1.0, 0.0]).unwrap();
        let j = tracedet_jacobian(&id);
        assert_eq!(j.rows[0], vec![1.0, 1.0, 0.0]);
        assert_eq!(j.rows[1], vec![1.0, 1.0, 0.0]);
        let v = SymMatrixVec::new(2, vec![0.3, -0.6, 0.4]).unwrap();
        assert_eq!(tracedet_jacobian(&v).rows[1], vec![-0.6, 0.3, -0.8]);
    }

    #[test]
    fn trace_row_for_three() {
        let v = SymMatrixVec::new(3, vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).unwrap();
        assert_eq!(
            tracedet_jacobian(&v).rows[0],
            vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn lu_agrees_with_laplace() {
        let m: Vec<Vec<f64>> = (0..5)
            .map(|i| (0..5).map(|j| ((i * 7 + j * 3) % 5) as f64 - 2.0 + 0.1 * i as f64).collect())
            .collect();
        let idx: Vec<usize> = (0..5).collect();
        let a = laplace(&m, &idx, &idx);
        let b = lu_det(&m, &idx, &idx);
        assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
    }

    #[test]
    fn adjugate_identity() {
        // A adj(A) = det(A) I
        let v = SymMatrixVec::new(4, (0..10).map(|k| ((k * 37) % 11) as f64 / 11.0 - 0.4).collect())
            .unwrap();
        let m = v.to_matrix();
        let adj = adjugate(&m);
        let det = determinant(&m);
        for i in 0..4 {
            for j in 0..4 {
                let s: f64 = (0..4).map(|k| m[i][k] * adj[k][j]).sum();
                let want = if i == j { det } else { 0.0 };
                assert!((s - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn default_boxes() {
        let b = TraceDet::new(3).unwrap().default_box().unwrap();
        assert_eq!((b.xmin, b.xmax, b.ymin, b.ymax), (-5.0, 5.0, -5.0, 5.0));
    }
}
