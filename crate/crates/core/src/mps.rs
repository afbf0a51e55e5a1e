//! Matrix-product-state representation with canonical forms, Schmidt-spectrum
//! extraction, Haar-random isometries, and a dense statevector oracle for
//! small chains.
//!
//! Site tensors are stored as `d` complex matrices of shape m_{l-1} × m_l.
//! A state is left-canonical when every vertically stacked site tensor has
//! orthonormal columns; for a unit-norm state this includes the last site.
//! All state comparisons go through fidelity or spectra since gauge phases
//! are unconstrained.

use std::io::{Read as _, Write as _};
use std::path::Path;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

/// Dense statevectors are refused beyond this many qubits.
pub const DENSE_SITE_LIMIT: usize = 14;

const CHECKPOINT_MAGIC: &[u8; 8] = b"SGMPS01\n";

/// Descending positive singular values across one bond; squares sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtSpectrum {
    values: Vec<f64>,
}

impl SchmidtSpectrum {
    /// Validates descending order, positivity, and unit normalization of the
    /// squares (within 1e-10).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySpectrum { threshold: 0.0 });
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v > 0.0) {
                return Err(Error::NonPositiveEntry { index: i, value: v });
            }
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::MalformedData(
                "schmidt values must be descending".into(),
            ));
        }
        let sq: f64 = values.iter().map(|v| v * v).sum();
        if (sq - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { sum: sq });
        }
        Ok(Self { values })
    }

    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Squared singular values, i.e. the reduced-density-operator spectrum.
    pub fn squared(&self) -> Vec<f64> {
        self.values.iter().map(|v| v * v).collect()
    }

    /// Two-norm distance against another spectrum, padding the shorter one
    /// with zeros.
    pub fn distance(&self, other: &SchmidtSpectrum) -> f64 {
        vec_distance(&self.values, &other.values)
    }

    /// Two-norm distance between the squared spectra (eigenvalue sets).
    pub fn eigenvalue_distance(&self, other: &SchmidtSpectrum) -> f64 {
        vec_distance(&self.squared(), &other.squared())
    }
}

pub(crate) fn vec_distance(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    let mut acc = 0.0;
    for i in 0..len {
        let x = a.get(i).copied().unwrap_or(0.0);
        let y = b.get(i).copied().unwrap_or(0.0);
        acc += (x - y) * (x - y);
    }
    acc.sqrt()
}

/// One MPS site: `d` matrices of shape m_{l-1} × m_l.
#[derive(Debug, Clone)]
pub struct SiteTensor {
    blocks: Vec<CMat>,
}

impl SiteTensor {
    pub fn new(blocks: Vec<CMat>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::DimensionMismatch("site needs d >= 1 blocks".into()));
        }
        let (rows, cols) = (blocks[0].nrows(), blocks[0].ncols());
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch("zero-sized site block".into()));
        }
        if blocks.iter().any(|b| b.nrows() != rows || b.ncols() != cols) {
            return Err(Error::DimensionMismatch(
                "site blocks differ in shape".into(),
            ));
        }
        Ok(Self { blocks })
    }

    pub fn local_dim(&self) -> usize {
        self.blocks.len()
    }

    pub fn left_dim(&self) -> usize {
        self.blocks[0].nrows()
    }

    pub fn right_dim(&self) -> usize {
        self.blocks[0].ncols()
    }

    pub fn block(&self, sigma: usize) -> &CMat {
        &self.blocks[sigma]
    }

    /// Stacks blocks vertically into a (d·m_{l-1}) × m_l matrix; row index is
    /// σ·m_{l-1} + a.
    pub fn stack_vertical(&self) -> CMat {
        let (d, m, n) = (self.local_dim(), self.left_dim(), self.right_dim());
        CMat::from_fn(d * m, n, |i, j| self.blocks[i / m][(i % m, j)])
    }

    /// Stacks blocks horizontally into a m_{l-1} × (d·m_l) matrix; column
    /// index is σ·m_l + b.
    pub fn stack_horizontal(&self) -> CMat {
        let (d, m, n) = (self.local_dim(), self.left_dim(), self.right_dim());
        CMat::from_fn(m, d * n, |i, j| self.blocks[j / n][(i, j % n)])
    }

    pub fn from_vertical(stack: &CMat, d: usize) -> Result<Self> {
        if d == 0 || stack.nrows() % d != 0 {
            return Err(Error::DimensionMismatch(format!(
                "cannot split {} rows into {d} blocks",
                stack.nrows()
            )));
        }
        let m = stack.nrows() / d;
        let n = stack.ncols();
        let blocks = (0..d)
            .map(|s| CMat::from_fn(m, n, |i, j| stack[(s * m + i, j)]))
            .collect();
        Self::new(blocks)
    }

    pub fn from_horizontal(stack: &CMat, d: usize) -> Result<Self> {
        if d == 0 || stack.ncols() % d != 0 {
            return Err(Error::DimensionMismatch(format!(
                "cannot split {} cols into {d} blocks",
                stack.ncols()
            )));
        }
        let m = stack.nrows();
        let n = stack.ncols() / d;
        let blocks = (0..d)
            .map(|s| CMat::from_fn(m, n, |i, j| stack[(i, s * n + j)]))
            .collect();
        Self::new(blocks)
    }

    /// Max deviation of Σ_σ A^σ† A^σ from the identity.
    pub fn left_normalization_error(&self) -> f64 {
        let t = self.stack_vertical();
        linalg::identity_error(&(&t.adjoint().to_owned() * &t))
    }

    /// Max deviation of Σ_σ M^σ M^σ† from the identity.
    pub fn right_normalization_error(&self) -> f64 {
        let t = self.stack_horizontal();
        linalg::identity_error(&(&t * &t.adjoint().to_owned()))
    }

    /// `carry · A^σ` for every block.
    pub(crate) fn multiply_left(&self, carry: &CMat) -> SiteTensor {
        SiteTensor {
            blocks: self.blocks.iter().map(|b| carry * b).collect(),
        }
    }

    /// `A^σ · carry` for every block.
    pub(crate) fn multiply_right(&self, carry: &CMat) -> SiteTensor {
        SiteTensor {
            blocks: self.blocks.iter().map(|b| b * carry).collect(),
        }
    }
}

/// Which canonical form, if any, the state is currently in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CanonicalForm {
    Left,
    Right,
    /// Mixed-canonical with the orthogonality center at the given bond.
    Mixed(usize),
    None,
}

/// Matrix product state over L sites with open boundary bonds of dimension 1.
#[derive(Debug, Clone)]
pub struct MatrixProductState {
    sites: Vec<SiteTensor>,
    canonical: CanonicalForm,
}

impl MatrixProductState {
    pub fn new(sites: Vec<SiteTensor>, canonical: CanonicalForm) -> Result<Self> {
        if sites.len() < 2 {
            return Err(Error::InvalidDimension {
                n: sites.len(),
                min: 2,
            });
        }
        let d = sites[0].local_dim();
        if sites.iter().any(|s| s.local_dim() != d) {
            return Err(Error::DimensionMismatch(
                "sites differ in local dimension".into(),
            ));
        }
        if sites[0].left_dim() != 1 || sites[sites.len() - 1].right_dim() != 1 {
            return Err(Error::DimensionMismatch(
                "boundary bonds must have dimension 1".into(),
            ));
        }
        for i in 0..sites.len() - 1 {
            let (r, l) = (sites[i].right_dim(), sites[i + 1].left_dim());
            if r != l {
                return Err(Error::DimensionMismatch(format!(
                    "bond {} mismatch: {r} vs {l}",
                    i + 1
                )));
            }
        }
        // Structural feasibility m_{l+1} <= d·m_l and m_l <= d·m_{l+1}
        // implies the ceiling m_l <= min(d^l, d^{L-l}).
        for i in 0..sites.len() {
            let (ml, mr) = (sites[i].left_dim(), sites[i].right_dim());
            if mr > d * ml || ml > d * mr {
                return Err(Error::DimensionMismatch(format!(
                    "site {i}: bond dims ({ml}, {mr}) infeasible for d = {d}"
                )));
            }
        }
        Ok(Self { sites, canonical })
    }

    /// The computational basis product state |b_1 ... b_L⟩ as a bond-1 MPS.
    pub fn product_state(basis: &[usize], d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension { n: d, min: 2 });
        }
        let sites = basis
            .iter()
            .map(|&b| {
                let blocks = (0..d)
                    .map(|s| {
                        CMat::from_fn(
                            1,
                            1,
                            |_, _| {
                                if s == b {
                                    C64::new(1.0, 0.0)
                                } else {
                                    C64::new(0.0, 0.0)
                                }
                            },
                        )
                    })
                    .collect();
                SiteTensor::new(blocks)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sites, CanonicalForm::Left)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn local_dim(&self) -> usize {
        self.sites[0].local_dim()
    }

    pub fn site(&self, i: usize) -> &SiteTensor {
        &self.sites[i]
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        self.canonical
    }

    /// Bond dimensions m_0 ... m_L (boundaries included).
    pub fn bond_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.sites.len() + 1);
        dims.push(self.sites[0].left_dim());
        for s in &self.sites {
            dims.push(s.right_dim());
        }
        dims
    }

    /// ⟨self|other⟩ by transfer-matrix contraction.
    pub fn overlap(&self, other: &MatrixProductState) -> Result<C64> {
        if self.len() != other.len() || self.local_dim() != other.local_dim() {
            return Err(Error::DimensionMismatch(
                "overlap of incompatible states".into(),
            ));
        }
        let d = self.local_dim();
        let mut env = CMat::from_fn(1, 1, |_, _| C64::new(1.0, 0.0));
        for (sa, sb) in self.sites.iter().zip(&other.sites) {
            let mut next = CMat::zeros(sa.right_dim(), sb.right_dim());
            for s in 0..d {
                let term = &(&sa.block(s).adjoint().to_owned() * &env) * sb.block(s);
                next += &term;
            }
            env = next;
        }
        Ok(env[(0, 0)])
    }

    pub fn norm(&self) -> f64 {
        self.overlap(self)
            .map(|v| v.re.max(0.0).sqrt())
            .unwrap_or(0.0)
    }

    /// |⟨self|other⟩|², insensitive to gauge phases.
    pub fn fidelity(&self, other: &MatrixProductState) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr())
    }

    /// Tensor product: `a ⊗ b` concatenated along the chain; the joining bond
    /// has dimension 1 and carries the trivial spectrum.
    pub fn tensor_product(a: &MatrixProductState, b: &MatrixProductState) -> Result<Self> {
        if a.local_dim() != b.local_dim() {
            return Err(Error::DimensionMismatch(
                "tensor product of different local dimensions".into(),
            ));
        }
        let mut sites = a.sites.clone();
        sites.extend(b.sites.iter().cloned());
        let canonical = match (a.canonical, b.canonical) {
            (CanonicalForm::Left, CanonicalForm::Left) => CanonicalForm::Left,
            _ => CanonicalForm::None,
        };
        Self::new(sites, canonical)
    }

    /// Contracts the chain into a dense vector of length d^L, basis ordered
    /// with site 1 most significant. Guarded to small systems.
    pub fn statevector(&self) -> Result<Vec<C64>> {
        let (l, d) = (self.len(), self.local_dim());
        let dim = checked_power(d, l, DENSE_SITE_LIMIT)
            .ok_or(Error::CapacityExceeded {
                sites: l,
                max: DENSE_SITE_LIMIT,
            })?;
        let mut acc = CMat::from_fn(1, 1, |_, _| C64::new(1.0, 0.0));
        for site in &self.sites {
            let (rows, m_r) = (acc.nrows(), site.right_dim());
            let mut next = CMat::zeros(rows * d, m_r);
            for s in 0..d {
                let prod = &acc * site.block(s);
                for p in 0..rows {
                    for j in 0..m_r {
                        next[(p * d + s, j)] = prod[(p, j)];
                    }
                }
            }
            acc = next;
        }
        debug_assert_eq!(acc.nrows(), dim);
        Ok((0..dim).map(|i| acc[(i, 0)]).collect())
    }

    /// Binary checkpoint encoding: row-major blocks, little-endian f64
    /// (re, im) pairs.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(CHECKPOINT_MAGIC);
        out.extend_from_slice(&(self.len() as u32).to_le_bytes());
        out.extend_from_slice(&(self.local_dim() as u32).to_le_bytes());
        let (tag, center) = match self.canonical {
            CanonicalForm::Left => (1u8, 0u32),
            CanonicalForm::Right => (2, 0),
            CanonicalForm::Mixed(b) => (3, b as u32),
            CanonicalForm::None => (0, 0),
        };
        out.push(tag);
        out.extend_from_slice(&center.to_le_bytes());
        for dim in self.bond_dims() {
            out.extend_from_slice(&(dim as u32).to_le_bytes());
        }
        for site in &self.sites {
            for s in 0..site.local_dim() {
                let b = site.block(s);
                for i in 0..b.nrows() {
                    for j in 0..b.ncols() {
                        out.extend_from_slice(&b[(i, j)].re.to_le_bytes());
                        out.extend_from_slice(&b[(i, j)].im.to_le_bytes());
                    }
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cur = std::io::Cursor::new(bytes);
        let mut magic = [0u8; 8];
        cur.read_exact(&mut magic)?;
        if &magic != CHECKPOINT_MAGIC {
            return Err(Error::MalformedData("bad checkpoint magic".into()));
        }
        let l = read_u32(&mut cur)? as usize;
        let d = read_u32(&mut cur)? as usize;
        let mut tag = [0u8; 1];
        cur.read_exact(&mut tag)?;
        let center = read_u32(&mut cur)? as usize;
        let canonical = match tag[0] {
            1 => CanonicalForm::Left,
            2 => CanonicalForm::Right,
            3 => CanonicalForm::Mixed(center),
            _ => CanonicalForm::None,
        };
        if l < 2 || l > 1 << 20 || d < 2 || d > 1 << 10 {
            return Err(Error::MalformedData(format!(
                "implausible checkpoint header: L = {l}, d = {d}"
            )));
        }
        let dims: Vec<usize> = (0..=l)
            .map(|_| read_u32(&mut cur).map(|v| v as usize))
            .collect::<Result<_>>()?;
        let mut sites = Vec::with_capacity(l);
        for i in 0..l {
            let (m, n) = (dims[i], dims[i + 1]);
            let mut blocks = Vec::with_capacity(d);
            for _ in 0..d {
                let mut b = CMat::zeros(m, n);
                for r in 0..m {
                    for c in 0..n {
                        let re = read_f64(&mut cur)?;
                        let im = read_f64(&mut cur)?;
                        b[(r, c)] = C64::new(re, im);
                    }
                }
                blocks.push(b);
            }
            sites.push(SiteTensor::new(blocks)?);
        }
        Self::new(sites, canonical)
    }

    pub fn write_checkpoint<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn read_checkpoint<P: AsRef<Path>>(path: P) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Self::from_bytes(&bytes)
    }
}

fn read_u32(cur: &mut std::io::Cursor<&[u8]>) -> Result<u32> {
    let mut buf = [0u8; 4];
    cur.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f64(cur: &mut std::io::Cursor<&[u8]>) -> Result<f64> {
    let mut buf = [0u8; 8];
    cur.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

/// d^l if l stays within the dense guard, else None.
fn checked_power(d: usize, l: usize, max_sites: usize) -> Option<usize> {
    if l > max_sites {
        return None;
    }
    let mut acc = 1usize;
    for _ in 0..l {
        acc = acc.checked_mul(d)?;
        if acc > 1 << 24 {
            return None;
        }
    }
    Some(acc)
}

/// Returns a left-canonical copy representing the same physical state
/// (fidelity 1 up to numerical precision). Normalizes the state.
pub fn canonicalize_left(psi: &MatrixProductState) -> Result<MatrixProductState> {
    let d = psi.local_dim();
    let l = psi.len();
    let mut sites = Vec::with_capacity(l);
    let mut carry = CMat::from_fn(1, 1, |_, _| C64::new(1.0, 0.0));
    for (i, site) in psi.sites.iter().enumerate() {
        let eff = site.multiply_left(&carry);
        let stack = eff.stack_vertical();
        if i + 1 == l {
            let nrm = linalg::frob(&stack);
            if nrm < 1e-300 {
                return Err(Error::DegenerateState);
            }
            let scaled = CMat::from_fn(stack.nrows(), 1, |r, _| stack[(r, 0)] / nrm);
            sites.push(SiteTensor::from_vertical(&scaled, d)?);
        } else {
            let (q, r) = linalg::qr_thin(&stack);
            sites.push(SiteTensor::from_vertical(&q, d)?);
            carry = r;
        }
    }
    MatrixProductState::new(sites, CanonicalForm::Left)
}

/// Schmidt spectrum at bond l (1-based, between sites l and l+1), computed by
/// bringing a copy to mixed-canonical form at that bond. The input state is
/// not mutated.
pub fn extract_spectrum(psi: &MatrixProductState, bond: usize) -> Result<SchmidtSpectrum> {
    let l = psi.len();
    if bond == 0 || bond >= l {
        return Err(Error::BondOutOfRange { bond, max: l - 1 });
    }
    let owned;
    let work = if psi.canonical_form() == CanonicalForm::Left {
        psi
    } else {
        owned = canonicalize_left(psi)?;
        &owned
    };
    // Right-to-left LQ sweep; the accumulated carry at the target bond is the
    // center matrix whose singular values are the Schmidt coefficients.
    let mut carry = CMat::from_fn(1, 1, |_, _| C64::new(1.0, 0.0));
    for i in (bond..l).rev() {
        let eff = work.sites[i].multiply_right(&carry);
        let (lf, _q) = linalg::lq_thin(&eff.stack_horizontal());
        carry = lf;
    }
    let mut values = linalg::singular_values(&carry)?;
    values.retain(|&v| v > 0.0);
    if values.is_empty() {
        return Err(Error::DegenerateState);
    }
    Ok(SchmidtSpectrum::from_raw(values))
}

/// Haar-random isometry with `rows >= cols`: complex Ginibre matrix, thin QR,
/// and the R-diagonal phase fix that makes the distribution exactly Haar.
pub fn haar_random_isometry<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Result<CMat> {
    if rows < cols {
        return Err(Error::RowsLessThanCols { rows, cols });
    }
    if cols == 0 {
        return Err(Error::InvalidDimension { n: 0, min: 1 });
    }
    let mut g = CMat::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            g[(i, j)] = C64::new(re, im);
        }
    }
    let (mut q, r) = linalg::qr_thin(&g);
    for j in 0..cols {
        let diag = r[(j, j)];
        if diag.norm() > 0.0 {
            let phase = diag / diag.norm();
            for i in 0..rows {
                q[(i, j)] *= phase;
            }
        }
    }
    Ok(q)
}

/// Dense-SVD Schmidt spectrum of a statevector across the cut after
/// `left_sites` sites. Independent of the MPS sweep path; used as the
/// brute-force oracle.
pub fn schmidt_from_statevector(v: &[C64], left_sites: usize, d: usize) -> Result<Vec<f64>> {
    let rows = checked_power(d, left_sites, DENSE_SITE_LIMIT).ok_or(Error::CapacityExceeded {
        sites: left_sites,
        max: DENSE_SITE_LIMIT,
    })?;
    if rows == 0 || v.len() % rows != 0 {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} not divisible by {rows}",
            v.len()
        )));
    }
    let cols = v.len() / rows;
    let m = CMat::from_fn(rows, cols, |i, j| v[i * cols + j]);
    let mut s = linalg::singular_values(&m)?;
    s.retain(|&x| x > 0.0);
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamFactory;

    fn bell_state() -> MatrixProductState {
        let r = C64::new(0.5f64.sqrt(), 0.0);
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let a0 = CMat::from_fn(1, 2, |_, j| if j == 0 { one } else { zero });
        let a1 = CMat::from_fn(1, 2, |_, j| if j == 1 { one } else { zero });
        let b0 = CMat::from_fn(2, 1, |i, _| if i == 0 { r } else { zero });
        let b1 = CMat::from_fn(2, 1, |i, _| if i == 1 { r } else { zero });
        MatrixProductState::new(
            vec![
                SiteTensor::new(vec![a0, a1]).unwrap(),
                SiteTensor::new(vec![b0, b1]).unwrap(),
            ],
            CanonicalForm::Left,
        )
        .unwrap()
    }

    fn random_mps(l: usize, d: usize, chi: usize, seed: u64) -> MatrixProductState {
        // Unnormalized random tensors with feasible bond dimensions.
        let mut rng = StreamFactory::new(seed).stream(0);
        let mut dims = vec![1usize];
        for i in 1..l {
            let cap = chi.min(d.pow(i as u32).min(d.pow((l - i) as u32)));
            dims.push(cap.min(d * dims[i - 1]));
        }
        dims.push(1);
        for i in (1..l).rev() {
            dims[i] = dims[i].min(d * dims[i + 1]);
        }
        let sites = (0..l)
            .map(|i| {
                let blocks = (0..d)
                    .map(|_| {
                        CMat::from_fn(dims[i], dims[i + 1], |_, _| {
                            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                        })
                    })
                    .collect();
                SiteTensor::new(blocks).unwrap()
            })
            .collect();
        MatrixProductState::new(sites, CanonicalForm::None).unwrap()
    }

    #[test]
    fn product_state_statevector_is_unit_basis_vector() {
        let psi = MatrixProductState::product_state(&[0, 0, 0], 2).unwrap();
        let v = psi.statevector().unwrap();
        assert_eq!(v.len(), 8);
        assert!((v[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(v[1..].iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn bell_statevector_and_spectrum() {
        let psi = bell_state();
        let v = psi.statevector().unwrap();
        let r = 0.5f64.sqrt();
        assert!((v[0].norm() - r).abs() < 1e-14);
        assert!((v[3].norm() - r).abs() < 1e-14);
        assert!(v[1].norm() < 1e-14 && v[2].norm() < 1e-14);

        let spec = extract_spectrum(&psi, 1).unwrap();
        assert_eq!(spec.len(), 2);
        for &s in spec.values() {
            assert!((s - r).abs() < 1e-12);
        }
    }

    #[test]
    fn statevector_capacity_guard() {
        let psi = MatrixProductState::product_state(&[0; 15], 2).unwrap();
        assert!(matches!(
            psi.statevector(),
            Err(Error::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn product_state_has_trivial_spectra() {
        let psi = MatrixProductState::product_state(&[1, 0, 1, 1], 2).unwrap();
        for bond in 1..4 {
            let spec = extract_spectrum(&psi, bond).unwrap();
            assert_eq!(spec.len(), 1);
            assert!((spec.values()[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bond_out_of_range_rejected() {
        let psi = bell_state();
        assert!(matches!(
            extract_spectrum(&psi, 2),
            Err(Error::BondOutOfRange { .. })
        ));
        assert!(matches!(
            extract_spectrum(&psi, 0),
            Err(Error::BondOutOfRange { .. })
        ));
    }

    #[test]
    fn canonicalize_left_normalizes_and_preserves_state() {
        let psi = random_mps(6, 2, 4, 17);
        let nrm = psi.norm();
        assert!(nrm > 0.0);
        let canon = canonicalize_left(&psi).unwrap();
        assert!((canon.norm() - 1.0).abs() < 1e-12);
        for i in 0..canon.len() {
            assert!(canon.site(i).left_normalization_error() < 1e-10, "site {i}");
        }
        // Same physical state up to normalization: |<psi|canon>| = ||psi||.
        let ov = psi.overlap(&canon).unwrap().norm();
        assert!((ov - nrm).abs() < 1e-9, "{ov} vs {nrm}");
    }

    #[test]
    fn canonicalize_left_idempotent() {
        let psi = canonicalize_left(&random_mps(5, 2, 4, 3)).unwrap();
        let again = canonicalize_left(&psi).unwrap();
        let fid = psi.fidelity(&again).unwrap();
        assert!((fid - 1.0).abs() < 1e-12);
    }

    #[test]
    fn canonicalize_unnormalized_product_state() {
        let scale = C64::new(3.0, -1.0);
        let base = MatrixProductState::product_state(&[1, 0], 2).unwrap();
        let mut sites: Vec<SiteTensor> = (0..2).map(|i| base.site(i).clone()).collect();
        sites[0] = SiteTensor::new(vec![
            base.site(0).block(0) * faer::Scale(scale),
            base.site(0).block(1) * faer::Scale(scale),
        ])
        .unwrap();
        let psi = MatrixProductState::new(sites, CanonicalForm::None).unwrap();
        let canon = canonicalize_left(&psi).unwrap();
        assert!((canon.norm() - 1.0).abs() < 1e-12);
        let spec = extract_spectrum(&canon, 1).unwrap();
        assert_eq!(spec.len(), 1);
    }

    #[test]
    fn zero_state_degenerate() {
        let zero = CMat::zeros(1, 1);
        let sites = vec![
            SiteTensor::new(vec![zero.clone(), zero.clone()]).unwrap(),
            SiteTensor::new(vec![zero.clone(), zero]).unwrap(),
        ];
        let psi = MatrixProductState::new(sites, CanonicalForm::None).unwrap();
        assert!(matches!(
            canonicalize_left(&psi),
            Err(Error::DegenerateState)
        ));
    }

    #[test]
    fn spectrum_matches_dense_oracle() {
        for seed in 0..4u64 {
            let psi = canonicalize_left(&random_mps(8, 2, 6, 100 + seed)).unwrap();
            let v = psi.statevector().unwrap();
            for bond in 1..8 {
                let dense = schmidt_from_statevector(&v, bond, 2).unwrap();
                let fast = extract_spectrum(&psi, bond).unwrap();
                let err = vec_distance(&dense, fast.values());
                assert!(err < 1e-8, "bond {bond}: {err}");
            }
        }
        // Largest dense-oracle size exercised: L = 10.
        let psi = canonicalize_left(&random_mps(10, 2, 8, 321)).unwrap();
        let v = psi.statevector().unwrap();
        for bond in 1..10 {
            let dense = schmidt_from_statevector(&v, bond, 2).unwrap();
            let fast = extract_spectrum(&psi, bond).unwrap();
            assert!(vec_distance(&dense, fast.values()) < 1e-8, "bond {bond}");
        }
    }

    #[test]
    fn tensor_product_has_trivial_joining_bond() {
        let a = canonicalize_left(&random_mps(3, 2, 2, 5)).unwrap();
        let b = canonicalize_left(&random_mps(4, 2, 3, 6)).unwrap();
        let joined = MatrixProductState::tensor_product(&a, &b).unwrap();
        let spec = extract_spectrum(&joined, 3).unwrap();
        assert_eq!(spec.len(), 1);
        assert!((spec.values()[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bond_ceiling_holds_after_canonicalization() {
        let psi = canonicalize_left(&random_mps(7, 2, 16, 8)).unwrap();
        let dims = psi.bond_dims();
        for (l, &m) in dims.iter().enumerate() {
            let cap = 2usize
                .pow(l.min(7 - l) as u32)
                .min(16);
            assert!(m <= cap.max(1), "bond {l}: {m} > {cap}");
        }
    }

    #[test]
    fn haar_isometry_properties() {
        let mut rng = StreamFactory::new(77).stream(0);
        let q = haar_random_isometry(4, 2, &mut rng).unwrap();
        let qq = &q.adjoint().to_owned() * &q;
        assert!(linalg::identity_error(&qq) < 1e-12);

        let q = haar_random_isometry(1, 1, &mut rng).unwrap();
        assert!((q[(0, 0)].norm() - 1.0).abs() < 1e-12);

        assert!(matches!(
            haar_random_isometry(2, 3, &mut rng),
            Err(Error::RowsLessThanCols { .. })
        ));
    }

    #[test]
    fn haar_moment_matches_unitary_group() {
        // E|Q_11|^2 = 1/dim for Haar unitaries.
        let factory = StreamFactory::new(1001);
        let n = 20_000;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for i in 0..n {
            let mut rng = factory.stream(i);
            let q = haar_random_isometry(4, 4, &mut rng).unwrap();
            let v = q[(0, 0)].norm_sqr();
            sum += v;
            sq += v * v;
        }
        let mean = sum / n as f64;
        let se = ((sq / n as f64 - mean * mean).max(0.0) / n as f64).sqrt();
        assert!((mean - 0.25).abs() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn checkpoint_round_trip_is_bit_exact() {
        let psi = canonicalize_left(&random_mps(6, 2, 5, 12)).unwrap();
        let bytes = psi.to_bytes();
        let back = MatrixProductState::from_bytes(&bytes).unwrap();
        assert_eq!(psi.canonical_form(), back.canonical_form());
        assert_eq!(psi.bond_dims(), back.bond_dims());
        for i in 0..psi.len() {
            for s in 0..2 {
                let a = psi.site(i).block(s);
                let b = back.site(i).block(s);
                for r in 0..a.nrows() {
                    for c in 0..a.ncols() {
                        assert_eq!(a[(r, c)], b[(r, c)]);
                    }
                }
            }
        }
        assert_eq!(bytes, back.to_bytes());
    }

    #[test]
    fn malformed_checkpoint_rejected() {
        assert!(MatrixProductState::from_bytes(b"not a checkpoint").is_err());
        let psi = bell_state();
        let mut bytes = psi.to_bytes();
        bytes.truncate(bytes.len() - 3);
        assert!(MatrixProductState::from_bytes(&bytes).is_err());
    }
}
