//! Dense row-major matrices and vectors whose entries share one mode.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::scalar::{rational_to_f64, Mode, Scalar};
use super::LinalgError;

/// Storage shared by [`Mat`] and [`Vector`].
#[derive(Clone, Debug, PartialEq)]
pub enum Entries {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

impl Entries {
    pub fn len(&self) -> usize {
        match self {
            Entries::Exact(v) => v.len(),
            Entries::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mode(&self) -> Mode {
        match self {
            Entries::Exact(_) => Mode::Exact,
            Entries::Float(_) => Mode::Float,
        }
    }

    fn get(&self, i: usize) -> Scalar {
        match self {
            Entries::Exact(v) => Scalar::Exact(v[i].clone()),
            Entries::Float(v) => Scalar::Float(v[i]),
        }
    }

    fn is_zero_at(&self, i: usize) -> bool {
        match self {
            Entries::Exact(v) => v[i].is_zero(),
            Entries::Float(v) => v[i] == 0.0,
        }
    }

    fn zeros(mode: Mode, n: usize) -> Entries {
        match mode {
            Mode::Exact => Entries::Exact(vec![BigRational::zero(); n]),
            Mode::Float => Entries::Float(vec![0.0; n]),
        }
    }

    fn from_scalars(items: Vec<Scalar>, default: Mode) -> Result<Entries, LinalgError> {
        let mode = items.first().map(Scalar::mode).unwrap_or(default);
        match mode {
            Mode::Exact => items
                .into_iter()
                .map(|s| match s {
                    Scalar::Exact(q) => Ok(q),
                    Scalar::Float(_) => Err(LinalgError::MixedMode),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Entries::Exact),
            Mode::Float => items
                .into_iter()
                .map(|s| match s {
                    Scalar::Float(x) => Ok(x),
                    Scalar::Exact(_) => Err(LinalgError::MixedMode),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Entries::Float),
        }
    }

    fn to_float(&self) -> Entries {
        match self {
            Entries::Exact(v) => Entries::Float(v.iter().map(rational_to_f64).collect()),
            Entries::Float(v) => Entries::Float(v.clone()),
        }
    }

    fn select(&self, idx: impl Iterator<Item = usize>) -> Entries {
        match self {
            Entries::Exact(v) => Entries::Exact(idx.map(|i| v[i].clone()).collect()),
            Entries::Float(v) => Entries::Float(idx.map(|i| v[i]).collect()),
        }
    }
}

/// Dense matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    entries: Entries,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, entries: Entries) -> Result<Mat, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Mat { rows, cols, entries })
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Mat {
        assert_eq!(data.len(), rows * cols, "entry count does not match shape");
        let v = data.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect();
        Mat { rows, cols, entries: Entries::Exact(v) }
    }

    /// Exact matrix from integer rows; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<i64>]) -> Mat {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let flat: Vec<i64> = rows.iter().flatten().copied().collect();
        Mat::from_i64(rows.len(), cols, &flat)
    }

    pub fn from_rationals(rows: usize, cols: usize, data: Vec<BigRational>) -> Result<Mat, LinalgError> {
        Mat::new(rows, cols, Entries::Exact(data))
    }

    pub fn from_f64(rows: usize, cols: usize, data: Vec<f64>) -> Result<Mat, LinalgError> {
        Mat::new(rows, cols, Entries::Float(data))
    }

    /// Fails with `MixedMode` if the scalars do not all share one mode.
    pub fn from_scalars(rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Mat, LinalgError> {
        Mat::new(rows, cols, Entries::from_scalars(data, Mode::Exact)?)
    }

    pub fn zeros(rows: usize, cols: usize, mode: Mode) -> Mat {
        Mat { rows, cols, entries: Entries::zeros(mode, rows * cols) }
    }

    pub fn identity(n: usize, mode: Mode) -> Mat {
        let mut m = Mat::zeros(n, n, mode);
        for i in 0..n {
            match &mut m.entries {
                Entries::Exact(v) => v[i * n + i] = BigRational::one(),
                Entries::Float(v) => v[i * n + i] = 1.0,
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mode(&self) -> Mode {
        self.entries.mode()
    }

    pub fn entries(&self) -> &Entries {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        self.entries.get(i * self.cols + j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) -> Result<(), LinalgError> {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        let k = i * self.cols + j;
        match (&mut self.entries, value) {
            (Entries::Exact(v), Scalar::Exact(q)) => v[k] = q,
            (Entries::Float(v), Scalar::Float(x)) => v[k] = x,
            _ => return Err(LinalgError::MixedMode),
        }
        Ok(())
    }

    pub(crate) fn exact(&self) -> Option<&[BigRational]> {
        match &self.entries {
            Entries::Exact(v) => Some(v),
            Entries::Float(_) => None,
        }
    }


    pub fn to_float(&self) -> Mat {
        Mat { rows: self.rows, cols: self.cols, entries: self.entries.to_float() }
    }

    pub fn transpose(&self) -> Mat {
        let (r, c) = (self.rows, self.cols);
        let idx = (0..c).flat_map(move |j| (0..r).map(move |i| i * c + j));
        Mat { rows: c, cols: r, entries: self.entries.select(idx) }
    }

    pub fn column(&self, j: usize) -> Vector {
        assert!(j < self.cols, "column out of bounds");
        let c = self.cols;
        Vector { entries: self.entries.select((0..self.rows).map(|i| i * c + j)) }
    }

    pub fn row(&self, i: usize) -> Vector {
        assert!(i < self.rows, "row out of bounds");
        let c = self.cols;
        Vector { entries: self.entries.select(i * c..(i + 1) * c) }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Mat {
        let c = self.cols;
        let idx = (0..self.rows).flat_map(|i| cols.iter().map(move |&j| i * c + j));
        Mat { rows: self.rows, cols: cols.len(), entries: self.entries.select(idx) }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Mat {
        let c = self.cols;
        let idx = rows.iter().flat_map(|&i| i * c..(i + 1) * c);
        Mat { rows: rows.len(), cols: self.cols, entries: self.entries.select(idx) }
    }

    pub fn is_zero_column(&self, j: usize) -> bool {
        (0..self.rows).all(|i| self.entries.is_zero_at(i * self.cols + j))
    }

    pub fn is_zero(&self) -> bool {
        (0..self.entries.len()).all(|k| self.entries.is_zero_at(k))
    }

    /// Appends `v` as an extra column.
    pub fn append_column(&self, v: &Vector) -> Result<Mat, LinalgError> {
        if v.len() != self.rows {
            return Err(LinalgError::Shape(format!(
                "vector of length {} next to {} rows",
                v.len(),
                self.rows
            )));
        }
        let c = self.cols;
        let entries = match (&self.entries, &v.entries) {
            (Entries::Exact(a), Entries::Exact(b)) => Entries::Exact(
                (0..self.rows)
                    .flat_map(|i| a[i * c..(i + 1) * c].iter().chain(std::iter::once(&b[i])).cloned())
                    .collect(),
            ),
            (Entries::Float(a), Entries::Float(b)) => Entries::Float(
                (0..self.rows)
                    .flat_map(|i| a[i * c..(i + 1) * c].iter().chain(std::iter::once(&b[i])).copied())
                    .collect(),
            ),
            _ => return Err(LinalgError::MixedMode),
        };
        Ok(Mat { rows: self.rows, cols: c + 1, entries })
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Mat) -> Result<Mat, LinalgError> {
        if self.cols != other.cols {
            return Err(LinalgError::Shape(format!("{} vs {} columns", self.cols, other.cols)));
        }
        let entries = match (&self.entries, &other.entries) {
            (Entries::Exact(a), Entries::Exact(b)) => Entries::Exact(a.iter().chain(b).cloned().collect()),
            (Entries::Float(a), Entries::Float(b)) => Entries::Float(a.iter().chain(b).copied().collect()),
            _ => return Err(LinalgError::MixedMode),
        };
        Ok(Mat { rows: self.rows + other.rows, cols: self.cols, entries })
    }

    pub fn matmul(&self, other: &Mat) -> Result<Mat, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let entries = match (&self.entries, &other.entries) {
            (Entries::Exact(a), Entries::Exact(b)) => {
                let mut out = vec![BigRational::zero(); n * m];
                for i in 0..n {
                    for l in 0..k {
                        let x = &a[i * k + l];
                        if x.is_zero() {
                            continue;
                        }
                        for j in 0..m {
                            let y = &b[l * m + j];
                            if !y.is_zero() {
                                out[i * m + j] += x * y;
                            }
                        }
                    }
                }
                Entries::Exact(out)
            }
            (Entries::Float(a), Entries::Float(b)) => {
                let mut out = vec![0.0; n * m];
                for i in 0..n {
                    for l in 0..k {
                        let x = a[i * k + l];
                        for j in 0..m {
                            out[i * m + j] += x * b[l * m + j];
                        }
                    }
                }
                Entries::Float(out)
            }
            _ => return Err(LinalgError::MixedMode),
        };
        Ok(Mat { rows: n, cols: m, entries })
    }

    pub fn mul_vec(&self, v: &Vector) -> Result<Vector, LinalgError> {
        let col = Mat { rows: v.len(), cols: 1, entries: v.entries.clone() };
        Ok(Vector { entries: self.matmul(&col)?.entries })
    }

    /// Largest absolute entry, as f64.
    pub fn max_abs(&self) -> f64 {
        match &self.entries {
            Entries::Exact(v) => v.iter().map(|q| rational_to_f64(&q.abs())).fold(0.0, f64::max),
            Entries::Float(v) => v.iter().map(|x| x.abs()).fold(0.0, f64::max),
        }
    }

    /// Row `i` as a vector of scalars.
    pub fn row_scalars(&self, i: usize) -> Vec<Scalar> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }
}

/// Dense vector with the same storage rules as [`Mat`].
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    entries: Entries,
}

impl Vector {
    pub fn new(entries: Entries) -> Vector {
        Vector { entries }
    }

    pub fn from_i64(data: &[i64]) -> Vector {
        Vector {
            entries: Entries::Exact(data.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()),
        }
    }

    pub fn from_rationals(data: Vec<BigRational>) -> Vector {
        Vector { entries: Entries::Exact(data) }
    }

    pub fn from_f64(data: Vec<f64>) -> Vector {
        Vector { entries: Entries::Float(data) }
    }

    pub fn from_scalars(data: Vec<Scalar>) -> Result<Vector, LinalgError> {
        Ok(Vector { entries: Entries::from_scalars(data, Mode::Exact)? })
    }

    pub fn zeros(n: usize, mode: Mode) -> Vector {
        Vector { entries: Entries::zeros(mode, n) }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mode(&self) -> Mode {
        self.entries.mode()
    }

    pub fn entries(&self) -> &Entries {
        &self.entries
    }

    pub fn get(&self, i: usize) -> Scalar {
        self.entries.get(i)
    }

    pub fn is_zero_at(&self, i: usize) -> bool {
        self.entries.is_zero_at(i)
    }

    pub fn is_zero(&self) -> bool {
        (0..self.len()).all(|i| self.is_zero_at(i))
    }

    pub(crate) fn exact(&self) -> Option<&[BigRational]> {
        match &self.entries {
            Entries::Exact(v) => Some(v),
            Entries::Float(_) => None,
        }
    }


    pub fn to_float(&self) -> Vector {
        Vector { entries: self.entries.to_float() }
    }

    pub fn to_scalars(&self) -> Vec<Scalar> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    /// Number of nonzero entries (exact zero test).
    pub fn weight(&self) -> usize {
        (0..self.len()).filter(|&i| !self.is_zero_at(i)).count()
    }

    /// Indices of entries whose magnitude exceeds `tol` (exact: nonzero).
    pub fn support(&self, tol: f64) -> Vec<usize> {
        match &self.entries {
            Entries::Exact(v) => (0..v.len()).filter(|&i| !v[i].is_zero()).collect(),
            Entries::Float(v) => (0..v.len()).filter(|&i| v[i].abs() > tol).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        match &self.entries {
            Entries::Exact(v) => v.iter().map(|q| rational_to_f64(&q.abs())).fold(0.0, f64::max),
            Entries::Float(v) => v.iter().map(|x| x.abs()).fold(0.0, f64::max),
        }
    }

    /// Same vector as an n×1 matrix.
    pub fn as_column(&self) -> Mat {
        Mat { rows: self.len(), cols: 1, entries: self.entries.clone() }
    }

    /// True iff `self = c * other` for some nonzero scalar `c`
    /// (float: up to `tol` relative to the larger max-norm).
    pub fn is_proportional(&self, other: &Vector, tol: f64) -> bool {
        if self.len() != other.len() || self.mode() != other.mode() {
            return false;
        }
        match (&self.entries, &other.entries) {
            (Entries::Exact(a), Entries::Exact(b)) => {
                let Some(k) = (0..a.len()).find(|&i| !a[i].is_zero()) else {
                    return false;
                };
                if b[k].is_zero() {
                    return false;
                }
                let c = &b[k] / &a[k];
                a.iter().zip(b).all(|(x, y)| &(x * &c) == y)
            }
            (Entries::Float(a), Entries::Float(b)) => {
                let na = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                let nb = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                if na == 0.0 || nb == 0.0 {
                    return false;
                }
                let k = (0..a.len()).max_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs())).unwrap();
                let c = b[k] / a[k];
                a.iter().zip(b).all(|(x, y)| (x * c - y).abs() <= tol * nb.max(1.0))
            }
            _ => false,
        }
    }
}

impl std::fmt::Display for Vector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.to_scalars().iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        self.to_scalars().serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let items = Vec::<Scalar>::deserialize(de)?;
        Vector::from_scalars(items).map_err(serde::de::Error::custom)
    }
}

/// Serialized as `{"rows": r, "cols": c, "entries": [...]}`.
impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("Mat", 3)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        let items: Vec<Scalar> = (0..self.entries.len()).map(|k| self.entries.get(k)).collect();
        st.serialize_field("entries", &items)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Mat {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            rows: usize,
            cols: usize,
            entries: Vec<Scalar>,
        }
        let raw = Raw::deserialize(de)?;
        Mat::from_scalars(raw.rows, raw.cols, raw.entries).map_err(serde::de::Error::custom)
    }
}

/// Exact vector scaled to a primitive integer vector whose first nonzero
/// entry is positive. Zero vectors are returned unchanged.
pub(crate) fn primitive_integer(v: &[BigRational]) -> Vec<BigRational> {
    use num_integer::Integer;
    let mut lcm = BigInt::one();
    for q in v {
        lcm = lcm.lcm(q.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    let first_negative = ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    if first_negative {
        g = -g;
    }
    ints.into_iter().map(|x| BigRational::from_integer(x / &g)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_and_access() {
        let m = Mat::from_rows(&[vec![1, 2, 3], vec![4, 5, 6]]);
        assert_eq!((m.rows(), m.cols()), (2, 3));
        assert_eq!(m.get(1, 2), Scalar::int(6));
        let t = m.transpose();
        assert_eq!(t.get(2, 1), Scalar::int(6));
        assert_eq!(m.select_columns(&[2, 0]), Mat::from_rows(&[vec![3, 1], vec![6, 4]]));
        assert_eq!(m.column(1), Vector::from_i64(&[2, 5]));
        assert!(Mat::new(2, 2, Entries::Float(vec![1.0])).is_err());
    }

    #[test]
    fn mixed_scalars_rejected() {
        let r = Mat::from_scalars(1, 2, vec![Scalar::int(1), Scalar::float(1.0)]);
        assert_eq!(r, Err(LinalgError::MixedMode));
        let a = Mat::identity(2, Mode::Exact);
        let b = Mat::identity(2, Mode::Float);
        assert_eq!(a.matmul(&b), Err(LinalgError::MixedMode));
    }

    #[test]
    fn products() {
        let a = Mat::from_rows(&[vec![1, 2], vec![3, 4]]);
        let b = Mat::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(a.matmul(&b).unwrap(), Mat::from_rows(&[vec![2, 1], vec![4, 3]]));
        assert_eq!(a.mul_vec(&Vector::from_i64(&[1, 1])).unwrap(), Vector::from_i64(&[3, 7]));
        assert_eq!(a.to_float().matmul(&b.to_float()).unwrap(), a.matmul(&b).unwrap().to_float());
    }

    #[test]
    fn proportionality() {
        let a = Vector::from_i64(&[0, 2, -4]);
        assert!(a.is_proportional(&Vector::from_i64(&[0, -1, 2]), 0.0));
        assert!(!a.is_proportional(&Vector::from_i64(&[0, -1, 3]), 0.0));
        assert!(!a.is_proportional(&Vector::from_i64(&[0, 0, 0]), 0.0));
    }

    #[test]
    fn primitive_scaling() {
        let v: Vec<BigRational> = [(-2, 3), (4, 3), (0, 1)]
            .iter()
            .map(|&(n, d)| BigRational::new(n.into(), BigInt::from(d)))
            .collect();
        let p = primitive_integer(&v);
        assert_eq!(p, Vector::from_i64(&[1, -2, 0]).exact().unwrap());
    }
}
