use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::circuit::{CircuitIR, GateRecord};
use crate::costmodel::{estimate_circuit, CostConfig};
use crate::error::{QdlcError, Result};
use crate::metrics::l2_distance;
use crate::types::{ErrorBudget, Method, MethodPlan, TargetVector, C64};

/// Truncation errors below this are treated as an exact representation.
pub const EXACT_FLOOR: f64 = 1e-12;

/// Left-canonical MPS built from the most significant qubit down.
/// `tensors[k]` is the (2 chi_{k}) x chi_{k+1} isometry of site k+1 with row
/// index `2a + b` (previous bond a, physical bit b).
#[derive(Debug, Clone)]
pub struct MpsFactorization {
    pub tensors: Vec<DMatrix<C64>>,
    /// chi_1 .. chi_{n-1}
    pub bond_dims: Vec<usize>,
    pub predicted_state: Vec<C64>,
    pub error: f64,
}

impl MpsFactorization {
    pub fn max_bond(&self) -> usize {
        self.bond_dims.iter().copied().max().unwrap_or(1)
    }

    /// Per-site block width: max of the two bonds adjacent to each site.
    pub fn site_bonds(&self) -> Vec<usize> {
        let n = self.tensors.len();
        (0..n)
            .map(|k| {
                let left = if k == 0 { 1 } else { self.bond_dims[k - 1] };
                let right = if k + 1 == n { 1 } else { self.bond_dims[k] };
                left.max(right)
            })
            .collect()
    }
}

pub fn mps_compress(target: &TargetVector, chi_max: usize) -> Result<MpsFactorization> {
    if chi_max == 0 {
        return Err(QdlcError::Domain("chi_max must be at least 1".into()));
    }
    let n = target.n_qubits;
    let norm = crate::metrics::l2_norm(&target.amplitudes);
    let psi: Vec<C64> = target.amplitudes.iter().map(|a| a / norm).collect();
    // remainder R: rows = current bond, columns = unprocessed index (MSB first)
    let mut rows = 1usize;
    let mut r: Vec<C64> = psi.clone(); // row-major rows x cols
    let mut tensors = Vec::with_capacity(n);
    let mut bond_dims = Vec::new();
    for k in 0..n {
        let cols_in = 1usize << (n - k);
        let cols = cols_in / 2;
        // M[2a + b, rest] = R[a, b * cols + rest]
        let mrows = 2 * rows;
        let m = DMatrix::from_fn(mrows, cols, |i, j| {
            let (a, b) = (i / 2, i % 2);
            r[a * cols_in + b * cols + j]
        });
        let keep = if k + 1 == n { 1 } else { chi_max.min(mrows).min(cols) };
        let u = leading_subspace(&m, keep);
        let mut rnew = u.adjoint() * &m;
        let mut u = u;
        if k + 1 == n {
            // move the remaining scalar's phase into the last tensor
            let z = rnew[(0, 0)];
            if z.norm() > 0.0 {
                let ph = z / z.norm();
                u *= ph;
                rnew[(0, 0)] = C64::new(z.norm(), 0.0);
            }
        } else {
            bond_dims.push(keep);
        }
        tensors.push(u);
        r = (0..keep).flat_map(|a| (0..cols).map(move |j| (a, j))).map(|(a, j)| rnew[(a, j)]).collect();
        rows = keep;
    }
    let predicted_state = contract(&tensors);
    let error = l2_distance(&predicted_state, &psi)?;
    let error = if error < EXACT_FLOOR { 0.0 } else { error };
    Ok(MpsFactorization { tensors, bond_dims, predicted_state, error })
}

/// Orthonormal basis of the `keep` leading left singular vectors of `m`.
/// m = R^dagger Q^dagger from a QR of m^dagger, so the left singular vectors
/// are those of the small factor R^dagger; unlike an eigensolve of m m^dagger
/// this keeps singular values far below sqrt(machine epsilon).
fn leading_subspace(m: &DMatrix<C64>, keep: usize) -> DMatrix<C64> {
    let rows = m.nrows();
    let small = m.adjoint().qr().r().adjoint();
    let svd = small.svd(true, false);
    let su = svd.u.expect("left singular vectors requested");
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]).then(a.cmp(&b)));
    let mut u = DMatrix::from_element(rows, keep, C64::new(0.0, 0.0));
    for (c, &idx) in order.iter().take(keep).enumerate() {
        u.set_column(c, &su.column(idx));
    }
    gram_schmidt_columns(&mut u);
    u
}

fn gram_schmidt_columns(u: &mut DMatrix<C64>) {
    for c in 0..u.ncols() {
        for _ in 0..2 {
            for p in 0..c {
                let proj = u.column(p).dotc(&u.column(c));
                let pc = u.column(p).clone_owned();
                let mut col = u.column_mut(c);
                col -= pc * proj;
            }
        }
        let nrm = u.column(c).norm();
        if nrm > 0.0 {
            let mut col = u.column_mut(c);
            col /= C64::new(nrm, 0.0);
        }
    }
}

fn contract(tensors: &[DMatrix<C64>]) -> Vec<C64> {
    // c: rows = prefix (MSB first), cols = open bond
    let mut c = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for a in tensors {
        let chi_in = a.nrows() / 2;
        let chi_out = a.ncols();
        let mut next = DMatrix::from_element(c.nrows() * 2, chi_out, C64::new(0.0, 0.0));
        for p in 0..c.nrows() {
            for b in 0..2 {
                for o in 0..chi_out {
                    let mut acc = C64::new(0.0, 0.0);
                    for i in 0..chi_in {
                        acc += c[(p, i)] * a[(2 * i + b, o)];
                    }
                    next[(2 * p + b, o)] = acc;
                }
            }
        }
        c = next;
    }
    c.column(0).iter().copied().collect()
}

/// Per-rotation tolerance for blocks with bond dimensions `chis`.
pub fn solve_mps_delta(chis: &[usize], eps_p: f64) -> Result<f64> {
    if chis.is_empty() {
        return Err(QdlcError::Domain("empty bond list".into()));
    }
    let s: f64 = chis.iter().map(|&c| (c * c) as f64).sum();
    Ok(eps_p / (4.0 * s).sqrt())
}

/// Unitary whose columns `2a` (a < isometry columns) are the isometry's
/// columns; the rest is completed against the standard basis in order.
pub fn complete_unitary(iso: &DMatrix<C64>, dim: usize) -> DMatrix<C64> {
    let mut u = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    let mut fixed = vec![false; dim];
    let mut basis: Vec<DVector<C64>> = Vec::new();
    for a in 0..iso.ncols() {
        let mut col = DVector::from_element(dim, C64::new(0.0, 0.0));
        for i in 0..iso.nrows() {
            col[i] = iso[(i, a)];
        }
        u.set_column(2 * a, &col);
        fixed[2 * a] = true;
        basis.push(col);
    }
    let mut free = (0..dim).filter(|c| !fixed[*c]);
    for e in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = DVector::from_element(dim, C64::new(0.0, 0.0));
        v[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let nrm = v.norm();
        if nrm > 1e-8 {
            v /= C64::new(nrm, 0.0);
            let c = free.next().expect("free column");
            u.set_column(c, &v);
            basis.push(v);
        }
    }
    u
}

fn ceil_log2(x: usize) -> usize {
    if x <= 1 {
        0
    } else {
        (x - 1).ilog2() as usize + 1
    }
}

/// Circuit for a factorization: blocks from the least significant site up,
/// with the bond carried in ancillas `n..`.
pub fn mps_circuit(f: &MpsFactorization) -> CircuitIR {
    let n = f.tensors.len();
    let bonds = f.site_bonds();
    let c = ceil_log2(f.max_bond());
    let mut ir = CircuitIR::new(n, c);
    for k in (0..n).rev() {
        let b = ceil_log2(bonds[k]);
        let mut targets = vec![n - 1 - k];
        targets.extend(n..n + b);
        let dim = 1usize << (b + 1);
        let u = complete_unitary(&f.tensors[k], dim);
        let flat: Vec<C64> = (0..dim).flat_map(|i| (0..dim).map(move |j| (i, j))).map(|(i, j)| u[(i, j)]).collect();
        ir.push(GateRecord::dense(&targets, &format!("mps-G{}", k + 1), &flat));
    }
    ir
}

/// Smallest power-of-two bond dimension meeting `eps_a`.
pub fn select_bond(target: &TargetVector, eps_a: f64) -> Result<(usize, MpsFactorization)> {
    let mut cache = BTreeMap::new();
    let (chi, f) = select_bond_cached(target, eps_a, &mut cache)?;
    Ok((chi, f.clone()))
}

/// As `select_bond`, reusing factorizations across calls on the same target.
pub fn select_bond_cached<'a>(
    target: &TargetVector,
    eps_a: f64,
    cache: &'a mut BTreeMap<usize, MpsFactorization>,
) -> Result<(usize, &'a MpsFactorization)> {
    let n = target.n_qubits;
    let full = 1usize << (n / 2);
    let mut chi = 1;
    loop {
        if !cache.contains_key(&chi) {
            cache.insert(chi, mps_compress(target, chi)?);
        }
        let err = cache[&chi].error;
        if err <= eps_a || chi >= full {
            return Ok((chi, &cache[&chi]));
        }
        chi *= 2;
    }
}

pub fn synth_mps(target: &TargetVector, budget: ErrorBudget, cfg: &CostConfig) -> Result<(MethodPlan, CircuitIR)> {
    synth_mps_cached(target, budget, cfg, &mut BTreeMap::new())
}

pub fn synth_mps_cached(
    target: &TargetVector,
    budget: ErrorBudget,
    cfg: &CostConfig,
    cache: &mut BTreeMap<usize, MpsFactorization>,
) -> Result<(MethodPlan, CircuitIR)> {
    let (chi, f) = select_bond_cached(target, budget.eps_a, cache)?;
    plan_from_factorization(chi, f, budget, cfg)
}

pub(crate) fn plan_from_factorization(
    chi: usize,
    f: &MpsFactorization,
    budget: ErrorBudget,
    cfg: &CostConfig,
) -> Result<(MethodPlan, CircuitIR)> {
    let ir = mps_circuit(f);
    let bonds: Vec<usize> = f.site_bonds().iter().map(|&b| 1 << ceil_log2(b)).collect();
    let delta = solve_mps_delta(&bonds, budget.eps_p)?;
    let mut plan = MethodPlan::new(Method::MPS, budget);
    plan.set("chi", chi as f64);
    plan.set("max_bond", f.max_bond() as f64);
    plan.set("delta_g", delta);
    plan.set("bond_sq_sum", bonds.iter().map(|&b| (b * b) as f64).sum());
    plan.eps_a_predicted = f.error;
    plan.feasible = f.error <= budget.eps_a;
    plan.resources = estimate_circuit(&ir, cfg, delta)?;
    Ok((plan, ir))
}
