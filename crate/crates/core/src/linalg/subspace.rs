use super::field::Fp;
use super::matrix::FpMatrix;
use super::row::Row;

/// A subspace of F_p^n held as a semi-echelon basis (pivot entries are 1 and
/// every later basis vector vanishes on earlier pivots).
#[derive(Clone, Debug)]
pub struct Subspace {
    field: Fp,
    ambient: usize,
    rows: Vec<Row>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(field: Fp, ambient: usize) -> Self {
        Subspace { field, ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(field: Fp, ambient: usize) -> Self {
        let mut s = Self::new(field, ambient);
        for i in 0..ambient {
            let mut v = vec![0u8; ambient];
            v[i] = 1;
            s.insert(&v);
        }
        s
    }

    /// Span of the columns of `m`.
    pub fn column_span(m: &FpMatrix) -> Self {
        let mut s = Self::new(m.field(), m.rows());
        for c in 0..m.cols() {
            s.insert(&m.column(c));
        }
        s
    }

    pub fn from_vectors<'a>(field: Fp, ambient: usize, vs: impl IntoIterator<Item = &'a Vec<u8>>) -> Self {
        let mut s = Self::new(field, ambient);
        for v in vs {
            s.insert(v);
        }
        s
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn reduce_row(&self, row: &mut Row) {
        let f = self.field;
        for (basis, &pc) in self.rows.iter().zip(&self.pivots) {
            let x = row.get(pc);
            if x != 0 {
                row.axpy(f, f.neg(x), basis);
            }
        }
    }

    /// Remainder of `v` after reduction against the basis.
    pub fn reduce(&self, v: &[u8]) -> Vec<u8> {
        let mut row = Row::from_dense(self.field, v);
        self.reduce_row(&mut row);
        row.to_dense()
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        let mut row = Row::from_dense(self.field, v);
        self.reduce_row(&mut row);
        row.is_zero()
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[u8]) -> bool {
        debug_assert_eq!(v.len(), self.ambient);
        let mut row = Row::from_dense(self.field, v);
        self.insert_row(&mut row)
    }

    fn insert_row(&mut self, row: &mut Row) -> bool {
        self.reduce_row(row);
        let Some(pc) = row.first_nonzero() else {
            return false;
        };
        let lead = row.get(pc);
        if lead != 1 {
            row.scale(self.field, self.field.inv(lead));
        }
        self.rows.push(row.clone());
        self.pivots.push(pc);
        true
    }

    pub fn basis(&self) -> Vec<Vec<u8>> {
        self.rows.iter().map(Row::to_dense).collect()
    }

    /// Basis vectors as the columns of a matrix.
    pub fn basis_matrix(&self) -> FpMatrix {
        FpMatrix::from_columns(self.field, self.ambient, &self.basis())
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.rows.iter().all(|r| {
            let mut r = r.clone();
            other.reduce_row(&mut r);
            r.is_zero()
        })
    }

    pub fn same_as(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.dim() == other.dim() && self.is_subspace_of(other)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for r in &other.rows {
            let mut r = r.clone();
            s.insert_row(&mut r);
        }
        s
    }

    /// Indices (in `0..ambient`) completing the pivots to a full basis; the
    /// corresponding unit vectors span a complement.
    pub fn complement_indices(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient).filter(|&i| !is_pivot[i]).collect()
    }

    /// Coordinates of the class of `v` in `ambient / self` with respect to the
    /// unit vectors at [`Self::complement_indices`]. The remainder after
    /// reduction is the unique representative vanishing on every pivot.
    pub fn quotient_coords(&self, v: &[u8], complement: &[usize]) -> Vec<u8> {
        let r = self.reduce(v);
        complement.iter().map(|&i| r[i]).collect()
    }

    /// Back-substitutes so the basis is in reduced echelon form.
    pub fn into_reduced(mut self) -> Subspace {
        let f = self.field;
        let n = self.rows.len();
        for i in (0..n).rev() {
            let pi = self.pivots[i];
            let pivot_row = self.rows[i].clone();
            for j in 0..n {
                if j != i {
                    let x = self.rows[j].get(pi);
                    if x != 0 {
                        self.rows[j].axpy(f, f.neg(x), &pivot_row);
                    }
                }
            }
        }
        self
    }

    /// Intersection with `other`, via the kernel of the stacked bases.
    pub fn intersection(&self, other: &Subspace) -> Subspace {
        let a = self.basis_matrix();
        let b = other.basis_matrix();
        let stacked = a.hstack(&b).expect("same ambient");
        let k = stacked.kernel();
        let mut out = Subspace::new(self.field, self.ambient);
        for c in 0..k.cols() {
            let coeffs: Vec<u8> = (0..a.cols()).map(|r| k.get(r, c)).collect();
            out.insert(&a.apply(&coeffs));
        }
        out
    }
}

/// Solves `Mx = b` repeatedly for a fixed `M` by tracking, for each echelon
/// vector of the column space, the combination of columns producing it.
#[derive(Clone, Debug)]
pub struct PreimageSolver {
    field: Fp,
    rows: usize,
    cols: usize,
    echelon: Vec<Row>,
    combos: Vec<Row>,
    pivots: Vec<usize>,
}

impl PreimageSolver {
    pub fn new(m: &FpMatrix) -> Self {
        let cols: Vec<Vec<u8>> = m.columns();
        Self::from_columns(m.field(), m.rows(), &cols)
    }

    pub fn from_columns(field: Fp, rows: usize, columns: &[Vec<u8>]) -> Self {
        let mut s = PreimageSolver {
            field,
            rows,
            cols: columns.len(),
            echelon: Vec::new(),
            combos: Vec::new(),
            pivots: Vec::new(),
        };
        let f = field;
        for (j, col) in columns.iter().enumerate() {
            let mut v = Row::from_dense(f, col);
            let mut combo = Row::zero(f, s.cols);
            combo.set(j, 1);
            s.reduce_tracked(&mut v, &mut combo);
            if let Some(pc) = v.first_nonzero() {
                let lead = v.get(pc);
                if lead != 1 {
                    let inv = f.inv(lead);
                    v.scale(f, inv);
                    combo.scale(f, inv);
                }
                s.echelon.push(v);
                s.combos.push(combo);
                s.pivots.push(pc);
            }
        }
        s
    }

    fn reduce_tracked(&self, v: &mut Row, combo: &mut Row) {
        let f = self.field;
        for ((e, c), &pc) in self.echelon.iter().zip(&self.combos).zip(&self.pivots) {
            let x = v.get(pc);
            if x != 0 {
                let nx = f.neg(x);
                v.axpy(f, nx, e);
                combo.axpy(f, nx, c);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon.len()
    }

    pub fn solve(&self, b: &[u8]) -> Option<Vec<u8>> {
        assert_eq!(b.len(), self.rows);
        let f = self.field;
        let mut v = Row::from_dense(f, b);
        // combo tracks -x; negate at the end
        let mut combo = Row::zero(f, self.cols);
        self.reduce_tracked(&mut v, &mut combo);
        if !v.is_zero() {
            return None;
        }
        Some(combo.to_dense().into_iter().map(|x| f.neg(x)).collect())
    }
}
