use crate::circuit::{CircuitIR, GateRecord};
use crate::costmodel::{estimate_circuit, CostConfig};
use crate::error::{QdlcError, Result};
use crate::types::{ErrorBudget, Method, MethodPlan, TargetVector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AliasTable {
    /// Blocks kept at each index, in 0..=2^mu.
    pub thresholds: Vec<u64>,
    /// Index receiving the exported blocks (the index itself when nothing is exported).
    pub destinations: Vec<usize>,
    pub mu: u32,
}

impl AliasTable {
    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    /// Probability of each index after a uniform draw over all L * 2^mu blocks.
    pub fn reconstructed(&self) -> Vec<f64> {
        let cap = 1u64 << self.mu;
        let mut blocks = vec![0u64; self.len()];
        for (i, (&t, &d)) in self.thresholds.iter().zip(&self.destinations).enumerate() {
            blocks[i] += t;
            blocks[d] += cap - t;
        }
        let total = (cap * self.len() as u64) as f64;
        blocks.iter().map(|&b| b as f64 / total).collect()
    }
}

/// Largest-remainder rounding of `p` to integer block counts summing to `total`.
pub fn quantize_blocks(p: &[f64], total: u64) -> Vec<u64> {
    let scaled: Vec<f64> = p.iter().map(|&x| x.max(0.0) * total as f64).collect();
    let mut q: Vec<u64> = scaled.iter().map(|x| x.floor() as u64).collect();
    let assigned: u64 = q.iter().sum();
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = scaled[a] - scaled[a].floor();
        let rb = scaled[b] - scaled[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut left = total.saturating_sub(assigned) as usize;
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        q[i] += 1;
        left -= 1;
    }
    q
}

pub fn build_alias_table(probabilities: &[f64], mu: u32) -> Result<AliasTable> {
    let l = probabilities.len();
    if l == 0 || mu == 0 {
        return Err(QdlcError::Domain("alias table needs outcomes and mu >= 1".into()));
    }
    let sum: f64 = probabilities.iter().sum();
    if (sum - 1.0).abs() > 1e-12 || probabilities.iter().any(|&p| p < 0.0 || !p.is_finite()) {
        return Err(QdlcError::Domain("probabilities must be nonnegative and sum to 1".into()));
    }
    let cap = 1u64 << mu;
    let mut w = quantize_blocks(probabilities, cap * l as u64);
    let mut thresholds = vec![cap; l];
    let destinations: Vec<usize> = (0..l).collect();
    let mut destinations = destinations;
    let mut small: Vec<usize> = (0..l).filter(|&i| w[i] < cap).rev().collect();
    let mut large: Vec<usize> = (0..l).filter(|&i| w[i] > cap).rev().collect();
    while let Some(s) = small.pop() {
        let g = *large.last().ok_or_else(|| QdlcError::Validation("alias pairing ran out of donors".into()))?;
        thresholds[s] = w[s];
        destinations[s] = g;
        w[g] -= cap - w[s];
        if w[g] <= cap {
            large.pop();
            if w[g] < cap {
                small.push(g);
            }
        }
    }
    if !large.is_empty() {
        return Err(QdlcError::Validation("alias pairing left unpaired mass".into()));
    }
    Ok(AliasTable { thresholds, destinations, mu })
}

/// mu = ceil(log2(1 / eps_p)).
pub fn solve_alias_mu(eps_p: f64) -> u32 {
    let x = (1.0 / eps_p).log2().ceil();
    let mut mu = if x < 1.0 { 1 } else { x as u32 };
    while mu > 1 && (2f64).powi(-(mu as i32 - 1)) <= eps_p {
        mu -= 1;
    }
    while (2f64).powi(-(mu as i32)) > eps_p {
        mu += 1;
    }
    mu
}

/// Register layout of the alias circuit.
#[derive(Debug, Clone)]
pub struct AliasRegisters {
    pub index: Vec<usize>,
    pub sigma: Vec<usize>,
    pub dest: Vec<usize>,
    pub flag: usize,
}

pub fn alias_registers(n: usize, mu: u32) -> AliasRegisters {
    let mu = mu as usize;
    AliasRegisters {
        index: (0..n).collect(),
        sigma: (n..n + mu).collect(),
        dest: (n + mu..2 * n + mu).collect(),
        flag: 2 * n + mu,
    }
}

pub fn synth_alias(target: &TargetVector, budget: ErrorBudget, cfg: &CostConfig) -> Result<(MethodPlan, CircuitIR)> {
    if !target.amplitudes.iter().all(|a| a.im == 0.0 && a.re >= 0.0) {
        return Err(QdlcError::UnsupportedTarget(
            "alias sampling loads LCU coefficients and needs nonnegative real amplitudes".into(),
        ));
    }
    let n = target.n_qubits;
    let p = target.probabilities();
    let total: f64 = p.iter().sum();
    let p: Vec<f64> = p.iter().map(|x| x / total).collect();
    let mu = solve_alias_mu(budget.eps_p);
    let table = build_alias_table(&p, mu)?;
    let r = alias_registers(n, mu);

    let mut ir = CircuitIR::new(n, mu as usize + n + 1);
    for &q in r.index.iter().chain(&r.sigma) {
        ir.push(GateRecord::h(q));
    }
    let dest: Vec<i64> = table.destinations.iter().map(|&d| d as i64).collect();
    ir.push(GateRecord::qrom(&r.index, &r.dest, dest));
    let t: Vec<i64> = table.thresholds.iter().map(|&t| t as i64).collect();
    ir.push(GateRecord::comparator(r.flag, &r.sigma, &r.index, t));
    ir.push(GateRecord::cswap(r.flag, &r.index, &r.dest));

    let q = table.reconstructed();
    let err = q.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let mut plan = MethodPlan::new(Method::AliasSampling, budget);
    plan.set("mu", mu as f64);
    plan.table_error_predicted = err;
    plan.note = Some("index register is entangled with a garbage register; valid as an LCU Prep only".into());
    plan.resources = estimate_circuit(&ir, cfg, 1.0)?;
    Ok((plan, ir))
}
