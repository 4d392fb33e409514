//! Clifford+T cost ledger for semantic gates.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::circuit::{BlockAction, CircuitIR, GateKind, GateRecord};
use crate::error::{QdlcError, Result};
use crate::types::ResourceEstimate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostConfig {
    pub t_per_rotation_slope: f64,
    pub t_per_rotation_offset: f64,
    pub toffoli_t_cost: u64,
    /// `None` means "auto": the power of two minimizing the Toffoli count.
    #[serde(serialize_with = "ser_width", deserialize_with = "de_width")]
    pub qrom_swap_width: Option<u64>,
    pub adder_toffoli_per_bit: f64,
}

impl Default for CostConfig {
    fn default() -> Self {
        CostConfig {
            t_per_rotation_slope: 3.02,
            t_per_rotation_offset: 1.77,
            toffoli_t_cost: 4,
            qrom_swap_width: None,
            adder_toffoli_per_bit: 2.0,
        }
    }
}

fn ser_width<S: Serializer>(w: &Option<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match w {
        None => s.serialize_str("auto"),
        Some(v) => s.serialize_u64(*v),
    }
}

fn de_width<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<u64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum W {
        N(u64),
        S(String),
    }
    match W::deserialize(d)? {
        W::N(v) => Ok(Some(v)),
        W::S(s) if s == "auto" => Ok(None),
        W::S(s) => Err(serde::de::Error::custom(format!("qrom_swap_width must be an integer or \"auto\", got {s}"))),
    }
}

impl CostConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_per_rotation_slope > 0.0) {
            return Err(QdlcError::Domain("t_per_rotation_slope must be positive".into()));
        }
        if !self.t_per_rotation_offset.is_finite() {
            return Err(QdlcError::Domain("t_per_rotation_offset must be finite".into()));
        }
        if self.toffoli_t_cost != 4 && self.toffoli_t_cost != 7 {
            return Err(QdlcError::Domain("toffoli_t_cost must be 4 or 7".into()));
        }
        if let Some(w) = self.qrom_swap_width {
            if w == 0 || !w.is_power_of_two() {
                return Err(QdlcError::Domain("qrom_swap_width must be a positive power of two".into()));
            }
        }
        if !(self.adder_toffoli_per_bit >= 0.0) {
            return Err(QdlcError::Domain("adder_toffoli_per_bit must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: CostConfig = serde_json::from_str(text).map_err(|e| QdlcError::Parse(format!("cost model: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn t_count_for_rotation(delta_g: f64, cfg: &CostConfig) -> Result<u64> {
    if delta_g.is_nan() || delta_g <= 0.0 {
        return Err(QdlcError::Domain(format!("rotation tolerance must be positive, got {delta_g}")));
    }
    if delta_g >= 1.0 {
        return Ok(0);
    }
    let t = (cfg.t_per_rotation_slope * (1.0 / delta_g).log2() + cfg.t_per_rotation_offset).ceil();
    Ok(if t > 0.0 { t as u64 } else { 0 })
}

fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

fn qrom_toffolis(n: u64, b: u64, lambda: u64) -> u64 {
    n.div_ceil(lambda) + b * (lambda - 1)
}

/// Swap width used for a lookup of `num_entries` entries of `bits` bits.
pub fn qrom_lambda(num_entries: u64, bits: u64, cfg: &CostConfig) -> u64 {
    if let Some(w) = cfg.qrom_swap_width {
        return w;
    }
    let mut best = (qrom_toffolis(num_entries, bits, 1), 1);
    let mut lambda = 2;
    while lambda <= num_entries.next_power_of_two() {
        let t = qrom_toffolis(num_entries, bits, lambda);
        if t < best.0 {
            best = (t, lambda);
        }
        lambda *= 2;
    }
    best.1
}

pub fn qrom_cost(num_entries: u64, bits_per_entry: u64, cfg: &CostConfig) -> ResourceEstimate {
    let n = num_entries.max(1);
    let b = bits_per_entry.max(1);
    let lambda = qrom_lambda(n, b, cfg);
    let toffoli = qrom_toffolis(n, b, lambda);
    let ancilla = b * lambda + ceil_log2(lambda);
    ResourceEstimate {
        t_count: cfg.toffoli_t_cost * toffoli,
        cnot_count: 2 * b * n,
        rotation_count: 0,
        toffoli_count: toffoli,
        ancilla_qubits: ancilla,
        total_qubits: ancilla + ceil_log2(n),
    }
}

/// Counts for a gate list plus the peak scratch qubits any gate needs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GateTally {
    pub counts: ResourceEstimate,
    pub workspace: u64,
}

impl GateTally {
    fn add(&mut self, o: GateTally) {
        self.counts.t_count += o.counts.t_count;
        self.counts.cnot_count += o.counts.cnot_count;
        self.counts.rotation_count += o.counts.rotation_count;
        self.counts.toffoli_count += o.counts.toffoli_count;
        self.workspace = self.workspace.max(o.workspace);
    }
}

struct Ctx<'a> {
    cfg: &'a CostConfig,
    t_rot: u64,
}

impl Ctx<'_> {
    fn rotations(&self, r: u64, cnot: u64) -> ResourceEstimate {
        ResourceEstimate { t_count: r * self.t_rot, cnot_count: cnot, rotation_count: r, ..Default::default() }
    }

    fn toffolis(&self, t: u64) -> ResourceEstimate {
        ResourceEstimate { t_count: t * self.cfg.toffoli_t_cost, toffoli_count: t, ..Default::default() }
    }
}

fn plus(a: ResourceEstimate, b: ResourceEstimate) -> ResourceEstimate {
    ResourceEstimate {
        t_count: a.t_count + b.t_count,
        cnot_count: a.cnot_count + b.cnot_count,
        rotation_count: a.rotation_count + b.rotation_count,
        toffoli_count: a.toffoli_count + b.toffoli_count,
        ..Default::default()
    }
}

fn times(a: ResourceEstimate, k: u64) -> ResourceEstimate {
    ResourceEstimate {
        t_count: a.t_count * k,
        cnot_count: a.cnot_count * k,
        rotation_count: a.rotation_count * k,
        toffoli_count: a.toffoli_count * k,
        ..Default::default()
    }
}

/// Cost of running `e` under `c` extra controls. Up to three controls the
/// controls are first folded into one qubit with a Toffoli chain, then each
/// rotation becomes two rotations plus two CNOTs, each CNOT a Toffoli and
/// each Toffoli two Toffolis. Beyond three controls every count is scaled by
/// 2^c, the cost of a fully multiplexed branch.
pub fn controlled_surcharge(e: ResourceEstimate, c: u64, cfg: &CostConfig) -> GateTally {
    if c == 0 {
        return GateTally { counts: e, workspace: 0 };
    }
    if c > 3 {
        return GateTally { counts: times(e, 1 << c), workspace: 0 };
    }
    let rot_t = e.t_count - cfg.toffoli_t_cost * e.toffoli_count;
    let toffoli = e.cnot_count + 2 * e.toffoli_count + 2 * (c - 1);
    GateTally {
        counts: ResourceEstimate {
            t_count: 2 * rot_t + cfg.toffoli_t_cost * toffoli,
            cnot_count: 2 * e.rotation_count,
            rotation_count: 2 * e.rotation_count,
            toffoli_count: toffoli,
            ..Default::default()
        },
        workspace: c - 1,
    }
}

fn qrom_tally(n: u64, b: u64, cfg: &CostConfig) -> GateTally {
    let q = qrom_cost(n, b, cfg);
    GateTally { counts: q, workspace: q.ancilla_qubits.saturating_sub(b) }
}

fn adder_toffolis(b: u64, cfg: &CostConfig) -> u64 {
    (cfg.adder_toffoli_per_bit * b as f64).ceil() as u64
}

fn qsd_cnots(m: u32) -> u64 {
    if m < 2 {
        return 0;
    }
    let v = 23.0 / 48.0 * 4f64.powi(m as i32) - 1.5 * 2f64.powi(m as i32) + 4.0 / 3.0;
    v.ceil() as u64
}

fn gate_tally(g: &GateRecord, ctx: &Ctx) -> Result<GateTally> {
    let cfg = ctx.cfg;
    let c = g.controls.len() as u64;
    let b = g.targets.len() as u64;
    let base = |counts: ResourceEstimate| GateTally { counts, workspace: 0 };
    let tally = match g.kind {
        GateKind::H | GateKind::S => controlled_surcharge_or_free(ctx.rotations(1, 0), c, cfg),
        GateKind::X | GateKind::CNOT => match c {
            0 => base(ResourceEstimate::zero()),
            1 => base(ResourceEstimate { cnot_count: 1, ..Default::default() }),
            _ => GateTally { counts: ctx.toffolis(2 * c - 3), workspace: c - 2 },
        },
        GateKind::RY | GateKind::RZ => controlled_surcharge(ctx.rotations(1, 0), c, cfg),
        GateKind::SWAP => {
            if c == 0 {
                base(ResourceEstimate { cnot_count: 3, ..Default::default() })
            } else {
                let mut t = GateTally {
                    counts: plus(ctx.toffolis(1), ResourceEstimate { cnot_count: 2, ..Default::default() }),
                    workspace: 0,
                };
                t.add(control_fold(c, ctx));
                t
            }
        }
        GateKind::ControlledRZ => {
            let mut t = base(ctx.rotations(2, 2));
            t.add(control_fold(c, ctx));
            t
        }
        GateKind::MultiplexedRY | GateKind::MultiplexedRZ => {
            let k = 1u64 << c;
            base(ctx.rotations(k, if c == 0 { 0 } else { k }))
        }
        GateKind::QROMLookup => {
            let n = g.table.as_ref().map(|t| t.len()).unwrap_or(1) as u64;
            qrom_tally(n, b, cfg)
        }
        GateKind::InPlaceAdder => {
            let adder = GateTally { counts: ctx.toffolis(adder_toffolis(b, cfg)), workspace: b.saturating_sub(1) };
            let mut t = controlled_surcharge(adder.counts, c, cfg);
            t.workspace = t.workspace.max(adder.workspace);
            t
        }
        GateKind::ConstantAdder => {
            let mut t = GateTally { counts: ctx.toffolis(adder_toffolis(b, cfg)), workspace: b.saturating_sub(1) };
            if c > 0 {
                let n = g.table.as_ref().map(|t| t.len()).unwrap_or(1) as u64;
                let q = qrom_tally(n, b, cfg);
                t.counts = plus(t.counts, times(q.counts, 2));
                t.workspace = b + q.workspace.max(b.saturating_sub(1));
            }
            t
        }
        GateKind::Comparator => {
            let w = g.operand.len() as u64;
            let mut t = GateTally { counts: ctx.toffolis(w), workspace: w };
            if c > 0 {
                let n = g.table.as_ref().map(|t| t.len()).unwrap_or(1) as u64;
                let q = qrom_tally(n, w + 1, cfg);
                t.counts = plus(t.counts, times(q.counts, 2));
                t.workspace = (w + 1) + q.workspace.max(w);
            }
            t
        }
        GateKind::CSwap => {
            let pairs = b / 2;
            let mut t = base(plus(ctx.toffolis(pairs), ResourceEstimate { cnot_count: 2 * pairs, ..Default::default() }));
            if c > 1 {
                t.add(control_fold(c - 1, ctx));
            }
            t
        }
        GateKind::BlockGate => {
            let p = g.payload().ok_or_else(|| QdlcError::Validation("block gate without payload".into()))?;
            let inner = if let Some(cost) = p.cost {
                GateTally { counts: cost, workspace: cost.ancilla_qubits }
            } else {
                block_tally(&p.action, b, ctx)?
            };
            let mut t = controlled_surcharge(inner.counts, c, cfg);
            t.workspace = t.workspace.max(inner.workspace);
            t
        }
    };
    Ok(tally)
}

fn controlled_surcharge_or_free(e: ResourceEstimate, c: u64, cfg: &CostConfig) -> GateTally {
    if c == 0 {
        GateTally::default()
    } else {
        controlled_surcharge(e, c, cfg)
    }
}

fn control_fold(c: u64, ctx: &Ctx) -> GateTally {
    if c <= 1 {
        return GateTally::default();
    }
    GateTally { counts: ctx.toffolis(2 * (c - 1)), workspace: c - 1 }
}

fn block_tally(action: &BlockAction, m: u64, ctx: &Ctx) -> Result<GateTally> {
    let cfg = ctx.cfg;
    Ok(match action {
        BlockAction::Dense { .. } => {
            if m == 0 {
                GateTally::default()
            } else {
                let r = 1u64 << (2 * m);
                GateTally { counts: ctx.rotations(r, qsd_cnots(m as u32)), workspace: 0 }
            }
        }
        BlockAction::DiagonalEncoding { .. } => {
            let sel = m.saturating_sub(1);
            let k = 1u64 << sel;
            GateTally { counts: ctx.rotations(k, if sel == 0 { 0 } else { k }), workspace: 0 }
        }
        BlockAction::Qft { .. } => {
            let pairs = m * m.saturating_sub(1) / 2;
            GateTally { counts: ctx.rotations(2 * pairs, 2 * pairs + 3 * (m / 2)), workspace: 0 }
        }
        BlockAction::Permutation { .. } => {
            let q = qrom_tally(1 << m, m, cfg);
            GateTally {
                counts: plus(times(q.counts, 2), ResourceEstimate { cnot_count: 3 * m, ..Default::default() }),
                workspace: m + q.workspace,
            }
        }
        BlockAction::Circuit { gates } => tally_gates_ctx(gates, ctx)?,
    })
}

fn tally_gates_ctx(gates: &[GateRecord], ctx: &Ctx) -> Result<GateTally> {
    let mut total = GateTally::default();
    for g in gates {
        total.add(gate_tally(g, ctx)?);
    }
    Ok(total)
}

/// Sums gate costs with every rotation synthesized to tolerance `delta_g`.
pub fn tally_gates(gates: &[GateRecord], cfg: &CostConfig, delta_g: f64) -> Result<GateTally> {
    let ctx = Ctx { cfg, t_rot: t_count_for_rotation(delta_g, cfg)? };
    tally_gates_ctx(gates, &ctx)
}

/// Combines separately tallied gate groups into a full estimate for `ir`.
pub fn finish_estimate(ir: &CircuitIR, parts: &[GateTally]) -> ResourceEstimate {
    let mut t = GateTally::default();
    for p in parts {
        t.add(*p);
    }
    let ancilla = ir.num_ancilla_qubits as u64 + t.workspace;
    ResourceEstimate {
        ancilla_qubits: ancilla,
        total_qubits: ir.num_system_qubits as u64 + ancilla,
        ..t.counts
    }
}

pub fn estimate_circuit(ir: &CircuitIR, cfg: &CostConfig, delta_g: f64) -> Result<ResourceEstimate> {
    let t = tally_gates(&ir.gates, cfg, delta_g)?;
    Ok(finish_estimate(ir, &[t]))
}

/// The human-readable cost rules, regenerated into `COST_LEDGER.md`.
pub fn cost_ledger_markdown(cfg: &CostConfig) -> String {
    let lam = |n: u64, b: u64| qrom_lambda(n, b, cfg);
    let width = match cfg.qrom_swap_width {
        None => "auto".to_string(),
        Some(w) => w.to_string(),
    };
    let mut s = String::new();
    s.push_str("# Cost ledger\n\n");
    s.push_str("Generated by `qdlc cost-ledger`. Every resource number reported by the planner comes from these rules.\n\n");
    s.push_str("## Parameters\n\n");
    s.push_str("| parameter | value |\n|---|---|\n");
    s.push_str(&format!("| t_per_rotation_slope | {} |\n", cfg.t_per_rotation_slope));
    s.push_str(&format!("| t_per_rotation_offset | {} |\n", cfg.t_per_rotation_offset));
    s.push_str(&format!("| toffoli_t_cost | {} |\n", cfg.toffoli_t_cost));
    s.push_str(&format!("| qrom_swap_width | {} |\n", width));
    s.push_str(&format!("| adder_toffoli_per_bit | {} |\n\n", cfg.adder_toffoli_per_bit));
    s.push_str("## Rotation synthesis\n\n");
    s.push_str("T(delta) = ceil(slope * log2(1/delta) + offset), 0 for delta >= 1.\n\n");
    s.push_str("| delta | T |\n|---|---|\n");
    for d in [0.5, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-8] {
        s.push_str(&format!("| {:e} | {} |\n", d, t_count_for_rotation(d, cfg).unwrap_or(0)));
    }
    s.push_str("\n## Gate rules\n\n");
    s.push_str("| gate | rotations | CNOT | Toffoli | scratch qubits |\n|---|---|---|---|---|\n");
    s.push_str("| H, X, S (uncontrolled) | 0 | 0 | 0 | 0 |\n");
    s.push_str("| X with 1 control / CNOT | 0 | 1 | 0 | 0 |\n");
    s.push_str("| X with c >= 2 controls | 0 | 0 | 2c-3 | c-2 |\n");
    s.push_str("| RY, RZ | 1 | 0 | 0 | 0 |\n");
    s.push_str("| SWAP | 0 | 3 | 0 | 0 |\n");
    s.push_str("| ControlledRZ | 2 | 2 | 0 | 0 |\n");
    s.push_str("| Multiplexed RY/RZ, c select qubits | 2^c | 2^c (0 if c = 0) | 0 | 0 |\n");
    s.push_str("| QROMLookup, N entries, b bits | 0 | 2bN | ceil(N/lambda) + b(lambda-1) | b(lambda-1) + ceil(log2 lambda) |\n");
    s.push_str("| InPlaceAdder, b bits | 0 | 0 | ceil(adder_toffoli_per_bit * b) | b-1 |\n");
    s.push_str("| ConstantAdder, b bits, L constants | 0 | 2 x QROM(L,b) | adder + 2 x QROM(L,b) | b + QROM scratch |\n");
    s.push_str("| Comparator, w-bit operand, L thresholds | 0 | 2 x QROM(L,w+1) | w + 2 x QROM(L,w+1) | w+1 + QROM scratch |\n");
    s.push_str("| CSwap, b pairs | 0 | 2b | b | 0 |\n");
    s.push_str("| Block, dense on m qubits | 4^m | QSD bound ceil(23/48 4^m - 3/2 2^m + 4/3) | 0 | 0 |\n");
    s.push_str("| Block, diagonal encoding on 1+k qubits | 2^k | 2^k | 0 | 0 |\n");
    s.push_str("| Block, QFT on k qubits | k(k-1) | k(k-1) + 3 floor(k/2) | 0 | 0 |\n");
    s.push_str("| Block, permutation on m qubits | 0 | 2 x QROM(2^m,m) + 3m | 2 x QROM(2^m,m) | m + QROM scratch |\n");
    s.push_str("| Block with attached cost | as attached | | | |\n\n");
    s.push_str("Each rotation costs T(delta) T gates and each Toffoli costs toffoli_t_cost T gates.\n\n");
    s.push_str("## Controls\n\n");
    s.push_str("A gate or block with c extra controls, 1 <= c <= 3: the controls are folded into one qubit with 2(c-1) Toffolis (c-1 scratch), every rotation becomes 2 rotations + 2 CNOTs, every CNOT becomes a Toffoli and every Toffoli becomes 2 Toffolis. For c > 3 all counts are multiplied by 2^c (the multiplexed worst case). ControlledRZ, CNOT and CSwap already include their first control.\n\n");
    s.push_str("## Aggregation\n\n");
    s.push_str("Counts add along a circuit. Ancilla qubits = declared ancillas + the largest scratch requirement of any single gate; total qubits = system + ancillas. Adding two estimates sums the counts and takes the maximum of the qubit numbers.\n\n");
    s.push_str("## QROM swap widths (auto)\n\n");
    s.push_str("| entries | bits | lambda | Toffoli | T |\n|---|---|---|---|---|\n");
    for (n, b) in [(1u64, 8u64), (2, 1), (16, 20), (1024, 16), (2048, 19), (1 << 20, 20)] {
        let q = qrom_cost(n, b, cfg);
        s.push_str(&format!("| {} | {} | {} | {} | {} |\n", n, b, lam(n, b), q.toffoli_count, q.t_count));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_t_examples() {
        let cfg = CostConfig::default();
        assert_eq!(t_count_for_rotation(0.5, &cfg).unwrap(), 5);
        assert_eq!(t_count_for_rotation(1e-5, &cfg).unwrap(), 52);
        assert_eq!(t_count_for_rotation(0.999999, &cfg).unwrap(), 2);
        assert_eq!(t_count_for_rotation(1.0, &cfg).unwrap(), 0);
        assert_eq!(t_count_for_rotation(3.0, &cfg).unwrap(), 0);
        assert!(matches!(t_count_for_rotation(0.0, &cfg), Err(QdlcError::Domain(_))));
        assert!(matches!(t_count_for_rotation(-1.0, &cfg), Err(QdlcError::Domain(_))));
    }

    #[test]
    fn qrom_examples() {
        let mut cfg = CostConfig { qrom_swap_width: Some(1), ..Default::default() };
        let q = qrom_cost(1, 8, &cfg);
        assert_eq!((q.toffoli_count, q.t_count), (1, 4));
        let q = qrom_cost(2, 1, &cfg);
        assert_eq!((q.toffoli_count, q.t_count), (2, 8));
        cfg.qrom_swap_width = None;
        // exhaustive scan: ceil(1024/l) + 16(l-1) is minimal at l = 8 (128 + 112 = 240)
        assert_eq!(qrom_lambda(1024, 16, &cfg), 8);
        assert_eq!(qrom_cost(1024, 16, &cfg).toffoli_count, 240);
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = CostConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("\"auto\""));
        assert_eq!(CostConfig::from_json(&text).unwrap(), cfg);
        let c7 = CostConfig::from_json(r#"{"toffoli_t_cost": 7, "qrom_swap_width": 4}"#).unwrap();
        assert_eq!(c7.toffoli_t_cost, 7);
        assert_eq!(c7.qrom_swap_width, Some(4));
        assert!(CostConfig::from_json(r#"{"toffoli_t_cost": 5}"#).is_err());
    }
}
