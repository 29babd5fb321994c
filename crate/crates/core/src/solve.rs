//! End-to-end driver: greedy phase, cycle canceling, tour recovery, and the
//! versioned report.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cost::Cost;
use crate::cycle::CycleCandidate;
use crate::error::{Error, Result};
use crate::fw::phase2_run;
use crate::greedy::{phase1_run, Phase1Params};
use crate::matrix::{CostMatrix, MinOrderTable, ReducedMatrix};
use crate::oracles;
use crate::perm::Permutation;
use crate::tour::{phase3_run, Certificate, Phase3Params};

pub const REPORT_SCHEMA: &str = "tspcc-report/1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveConfig {
    pub seed: u64,
    /// Pins the random starting tour.
    pub start_tour: Option<Permutation>,
    pub phase1: Phase1Params,
    pub phase3: Phase3Params,
    pub trace: bool,
    pub oracle_check: bool,
}

impl SolveConfig {
    pub fn for_size(n: usize, seed: u64) -> Self {
        SolveConfig {
            seed,
            start_tour: None,
            phase1: Phase1Params::for_size(n),
            phase3: Phase3Params::for_size(n, seed),
            trace: false,
            oracle_check: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigEcho {
    pub rank_budget: usize,
    pub start_budget: usize,
    pub sweep_all_starts: bool,
    pub restarts: Option<usize>,
    pub product_cap: usize,
    pub node_budget: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub start: usize,
    pub cycles: String,
    pub total: Cost,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PermReport {
    pub cycles: String,
    pub cost: Cost,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Phase1Report {
    pub start_tour: PermReport,
    pub steps: Vec<StepReport>,
    pub derangements: Vec<PermReport>,
    pub bag_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Phase2Report {
    pub assignment: PermReport,
    pub canceled: Vec<StepReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Phase3Report {
    pub tour: PermReport,
    pub gap: Cost,
    pub bound_history: Vec<Cost>,
    pub fw_cycles: usize,
    pub ctree_cycles: usize,
    pub ctree_nodes: u64,
    pub ctree_complete: bool,
    pub product_cap_binding: bool,
    pub products_complete: bool,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleCheck {
    pub assignment_optimum: Option<Cost>,
    pub tour_optimum: Option<Cost>,
    pub notices: Vec<String>,
    pub assignment_pass: Option<bool>,
    pub tour_pass: Option<bool>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    pub schema: &'static str,
    pub n: usize,
    pub seed: u64,
    pub config: ConfigEcho,
    pub phase1: Phase1Report,
    pub phase2: Phase2Report,
    pub phase3: Phase3Report,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<String>,
}

impl SolveReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Short human summary.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "assignment {}  {}",
            self.phase2.assignment.cycles, self.phase2.assignment.cost
        );
        let _ = writeln!(
            s,
            "tour {}  {}",
            self.phase3.tour.cycles, self.phase3.tour.cost
        );
        let _ = writeln!(
            s,
            "bounds {}",
            self.phase3
                .bound_history
                .iter()
                .map(Cost::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        );
        let _ = writeln!(s, "certificate {}", self.phase3.certificate);
        if let Some(o) = &self.oracle {
            for n in &o.notices {
                let _ = writeln!(s, "oracle: {n}");
            }
            let show = |c: Option<Cost>| c.map_or("-".to_string(), |c| c.to_string());
            let _ = writeln!(
                s,
                "oracle ap {} tsp {}  {}",
                show(o.assignment_optimum),
                show(o.tour_optimum),
                if o.pass { "PASS" } else { "FAIL" }
            );
        }
        s
    }
}

fn perm_report(p: &Permutation, m: &CostMatrix) -> Result<PermReport> {
    Ok(PermReport {
        cycles: p.to_string(),
        cost: p.cost(m)?,
    })
}

fn step_report(start: usize, cycles: &[CycleCandidate], total: Cost) -> StepReport {
    StepReport {
        start: start + 1,
        cycles: cycles.iter().map(ToString::to_string).collect(),
        total,
    }
}

/// Runs all three phases.
pub fn solve(m: &CostMatrix, cfg: &SolveConfig) -> Result<SolveReport> {
    let n = m.n();
    if n < 3 {
        return Err(Error::TooSmall { n, min: 3 });
    }
    let d0 = match &cfg.start_tour {
        Some(t) => t.clone(),
        None => Permutation::random_tour(n, &mut ChaCha8Rng::seed_from_u64(cfg.seed)),
    };
    let phase1 = Phase1Params {
        trace: cfg.trace,
        ..cfg.phase1
    };
    let phase3 = Phase3Params {
        trace: cfg.trace,
        seed: cfg.seed,
        ..cfg.phase3
    };
    let mut trace = phase1_run(m, &d0, &phase1)?;
    let greedy_steps = trace.steps.len();
    let p1 = Phase1Report {
        start_tour: perm_report(&d0, m)?,
        steps: trace
            .steps
            .iter()
            .map(|s| step_report(s.start, &s.cycles, s.total))
            .collect(),
        derangements: trace
            .derangements
            .iter()
            .skip(1)
            .map(|d| perm_report(d, m))
            .collect::<Result<_>>()?,
        bag_size: trace.bag.len(),
    };
    let mut lines = Vec::new();
    if cfg.trace {
        lines.push("M".to_string());
        lines.extend(matrix_table(m));
        lines.push("MIN(M)".to_string());
        lines.extend(min_order_table(m));
        lines.push("phase 1".to_string());
        lines.extend(trace.events.iter().cloned());
        let r = trace.derangements.len() - 1;
        let last = trace.last().clone();
        lines.push("phase 2".to_string());
        lines.push(format!("D{r}^-1 M"));
        lines.extend(permuted_table(m, &last));
        lines.push(format!("D{r}^-1 M-"));
        lines.extend(reduced_table(&ReducedMatrix::new(m, &last), &last));
    }
    let p2 = phase2_run(m, &mut trace, cfg.trace)?;
    let ap = p2.assignment.clone();
    if cfg.trace {
        lines.extend(p2.events.iter().cloned());
        lines.push(format!("assignment {}  {}", ap, p2.cost));
        lines.push("phase 3".to_string());
    }
    let p3 = phase3_run(m, &trace, &ap, &phase1, &phase3)?;
    if cfg.trace {
        lines.extend(p3.events.iter().cloned());
        lines.push(format!(
            "tour {}  {}",
            p3.bounds.best_tour, p3.bounds.best_value
        ));
    }
    let phase2 = Phase2Report {
        assignment: perm_report(&ap, m)?,
        canceled: trace.steps[greedy_steps..]
            .iter()
            .map(|s| step_report(s.start, &s.cycles, s.total))
            .collect(),
    };
    let phase3 = Phase3Report {
        tour: perm_report(&p3.bounds.best_tour, m)?,
        gap: p3.bounds.m,
        bound_history: p3.bounds.history.clone(),
        fw_cycles: p3.fw_cycles.len(),
        ctree_cycles: p3.ctree_cycles,
        ctree_nodes: p3.ctree_nodes,
        ctree_complete: p3.ctree_complete,
        product_cap_binding: p3.cap_binding,
        products_complete: p3.products_complete,
        certificate: p3.certificate,
    };
    let oracle = cfg.oracle_check.then(|| {
        oracle_check(
            m,
            phase2.assignment.cost,
            phase3.tour.cost,
            phase3.certificate,
        )
    });
    Ok(SolveReport {
        schema: REPORT_SCHEMA,
        n,
        seed: cfg.seed,
        config: ConfigEcho {
            rank_budget: cfg.phase1.rank_budget,
            start_budget: cfg.phase1.start_budget,
            sweep_all_starts: cfg.phase1.sweep_all_starts,
            restarts: cfg.phase3.restarts,
            product_cap: cfg.phase3.product_cap,
            node_budget: cfg.phase3.node_budget,
        },
        phase1: p1,
        phase2,
        phase3,
        oracle,
        trace: lines,
    })
}

/// Compares against the exact oracles where their size gates allow.
pub fn oracle_check(m: &CostMatrix, ap: Cost, tour: Cost, cert: Certificate) -> OracleCheck {
    let mut notices = Vec::new();
    let ap_opt = if m.n() <= oracles::BRUTE_AP_LIMIT {
        oracles::brute_ap(m).ok().map(|r| r.0)
    } else {
        notices.push(format!(
            "n = {} exceeds brute-force limit {}; Hungarian used",
            m.n(),
            oracles::BRUTE_AP_LIMIT
        ));
        Some(oracles::hungarian(m).0)
    };
    let tsp_opt = match oracles::held_karp(m) {
        Ok(r) => Some(r.0),
        Err(e) => {
            notices.push(e.to_string());
            None
        }
    };
    let assignment_pass = ap_opt.map(|o| o == ap);
    let tour_pass = tsp_opt.map(|o| match cert {
        Certificate::OptimalProven => o == tour,
        Certificate::BudgetExhausted => tour >= o,
    });
    OracleCheck {
        assignment_optimum: ap_opt,
        tour_optimum: tsp_opt,
        notices,
        assignment_pass,
        tour_pass,
        pass: assignment_pass.unwrap_or(true) && tour_pass.unwrap_or(true),
    }
}

fn row_line(label: String, cells: impl Iterator<Item = String>) -> String {
    let mut s = format!("{label:>4}");
    for c in cells {
        let _ = write!(s, "{c:>5}");
    }
    s.trim_end().to_string()
}

fn header(n: usize, images: Option<&Permutation>) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(p) = images {
        out.push(row_line(
            String::new(),
            (0..n).map(|j| (p.image(j) + 1).to_string()),
        ));
    }
    out.push(row_line(String::new(), (1..=n).map(|j| j.to_string())));
    out
}

pub fn matrix_table(m: &CostMatrix) -> Vec<String> {
    let n = m.n();
    let mut out = header(n, None);
    for i in 0..n {
        out.push(row_line(
            (i + 1).to_string(),
            m.row(i).iter().map(Cost::to_string),
        ));
    }
    out
}

/// Column order per row, the diagonal listed last.
pub fn min_order_table(m: &CostMatrix) -> Vec<String> {
    let n = m.n();
    let order = MinOrderTable::build(m);
    let mut out = header(n, None);
    for i in 0..n {
        let cells = order
            .order(i)
            .iter()
            .chain(std::iter::once(&i))
            .map(|j| (j + 1).to_string());
        out.push(row_line((i + 1).to_string(), cells));
    }
    out
}

/// `d(i, p(j))`, headed by the images of `p`.
pub fn permuted_table(m: &CostMatrix, p: &Permutation) -> Vec<String> {
    let n = m.n();
    let mut out = header(n, Some(p));
    for i in 0..n {
        let cells = (0..n).map(|j| m.get(i, p.image(j)).to_string());
        out.push(row_line((i + 1).to_string(), cells));
    }
    out
}

pub fn reduced_table(r: &ReducedMatrix, p: &Permutation) -> Vec<String> {
    let n = r.n();
    let mut out = header(n, Some(p));
    for i in 0..n {
        out.push(row_line(
            (i + 1).to_string(),
            (0..n).map(|j| r.get(i, j).to_string()),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example1;

    #[test]
    fn example_end_to_end() {
        let m = example1::matrix();
        let mut cfg = SolveConfig::for_size(8, 0);
        cfg.start_tour = Some(example1::start_tour());
        cfg.oracle_check = true;
        let rep = solve(&m, &cfg).unwrap();
        assert_eq!(rep.phase2.assignment.cost, Cost::Finite(155));
        assert_eq!(rep.phase2.assignment.cycles, "(1 4 2 3)(5 7 8 6)");
        assert_eq!(rep.phase3.tour.cost, Cost::Finite(161));
        assert_eq!(rep.phase3.bound_history, vec![Cost::Finite(6)]);
        assert_eq!(rep.phase3.certificate, Certificate::OptimalProven);
        assert!(rep.oracle.unwrap().pass);
        let totals: Vec<Cost> = rep.phase1.steps.iter().map(|s| s.total).collect();
        assert_eq!(
            totals,
            vec![Cost::Finite(-22), Cost::Finite(-29), Cost::Finite(-7)]
        );
    }

    #[test]
    fn min_order_rows() {
        let t = min_order_table(&example1::matrix());
        assert_eq!(t[1], "   1    5    4    7    2    8    3    6    1");
        assert_eq!(t[2], "   2    3    5    8    1    7    4    6    2");
    }

    #[test]
    fn tiny_instances() {
        let m = CostMatrix::from_rows(&[[0, 5, 5], [5, 0, 5], [5, 5, 0]]).unwrap();
        let rep = solve(&m, &SolveConfig::for_size(3, 1)).unwrap();
        assert_eq!(rep.phase3.tour.cost, Cost::Finite(15));
        assert_eq!(rep.phase3.gap, Cost::ZERO);
        let two = CostMatrix::from_rows(&[[0, 1], [1, 0]]).unwrap();
        assert!(matches!(
            solve(&two, &SolveConfig::for_size(2, 1)),
            Err(Error::TooSmall { .. })
        ));
    }
}
