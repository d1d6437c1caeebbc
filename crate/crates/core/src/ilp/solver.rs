//! Exact 0-1 branch and bound driven only by the model's rows.
//!
//! Rows of the form `sum x <= 1` with unit coefficients are packing rows:
//! they give the conflict structure for propagation and the cliques for the
//! cover bound. Single-variable rows fix variables at the root. Everything
//! else is checked for feasibility from activity bounds at every node.
//!
//! The search asks for objective values from the root bound downward and
//! stops at the first target it can meet.

use super::solution::{Solution, SolutionSource, SolverStatus};
use super::IlpModel;
use crate::bitseq::Word;
use crate::constraints::{LinearConstraint, Sense};
use crate::cover::{BitSet, Budget, CliqueFamily, SearchOptions};
use crate::error::{Error, Result};

struct GeneralRow {
    /// Variables grouped by coefficient.
    groups: Vec<(i64, BitSet)>,
    sense: Sense,
    rhs: i64,
}

impl GeneralRow {
    fn new(c: &LinearConstraint, label: &[usize], vars: usize) -> Self {
        let mut groups: Vec<(i64, BitSet)> = Vec::new();
        for &(w, coef) in &c.terms {
            let l = label[w.index()];
            match groups.iter_mut().find(|g| g.0 == coef) {
                Some(g) => g.1.insert(l),
                None => {
                    let mut s = BitSet::new(vars);
                    s.insert(l);
                    groups.push((coef, s));
                }
            }
        }
        GeneralRow { groups, sense: c.sense, rhs: c.rhs }
    }

    /// Whether some completion of `ones` using `free` can satisfy the row.
    fn feasible(&self, ones: &BitSet, free: &BitSet) -> bool {
        let (mut lo, mut hi) = (0i64, 0i64);
        for (coef, vars) in &self.groups {
            let fixed = *coef * vars.intersection_count(ones) as i64;
            let open = *coef * vars.intersection_count(free) as i64;
            lo += fixed + open.min(0);
            hi += fixed + open.max(0);
        }
        match self.sense {
            Sense::Le => lo <= self.rhs,
            Sense::Ge => hi >= self.rhs,
            Sense::Eq => lo <= self.rhs && hi >= self.rhs,
        }
    }
}

struct Problem {
    vars: usize,
    rows: Vec<GeneralRow>,
    packing: CliqueFamily,
    /// Per variable: all variables outside its closed packing neighborhood.
    keep: Vec<BitSet>,
    ones: BitSet,
    free: BitSet,
    /// Solutions must reach this objective (from a unit `>=` row over all variables).
    floor: i64,
    /// Internal label to word index. Labels follow the number of packing
    /// rows a variable appears in, so the cover seeds each class with the
    /// least constrained variable.
    order: Vec<usize>,
}

fn is_packing(c: &LinearConstraint) -> bool {
    c.sense == Sense::Le && c.rhs == 1 && c.terms.len() >= 2 && c.terms.iter().all(|t| t.1 == 1)
}

fn infeasible(msg: impl Into<String>) -> Error {
    Error::Infeasible(msg.into())
}

impl Problem {
    fn build(model: &IlpModel) -> Result<Self> {
        let vars = model.variable_count();
        let packing_rows: Vec<&LinearConstraint> = model.constraints().iter().filter(|c| is_packing(c)).collect();

        let mut neighbors: Vec<BitSet> = (0..vars).map(|_| BitSet::new(vars)).collect();
        let mut degree = vec![0usize; vars];
        for c in &packing_rows {
            for &(v, _) in &c.terms {
                degree[v.index()] += 1;
                for &(u, _) in &c.terms {
                    neighbors[v.index()].insert(u.index());
                }
            }
        }
        let mut order: Vec<usize> = (0..vars).collect();
        order.sort_by_key(|&v| (degree[v], v));
        let mut label = vec![0; vars];
        for (l, &v) in order.iter().enumerate() {
            label[v] = l;
        }

        let mut cliques: Vec<Vec<usize>> =
            packing_rows.iter().map(|c| c.terms.iter().map(|t| label[t.0.index()]).collect()).collect();
        let mut rows = Vec::new();
        let mut fix_zero = Vec::new();
        let mut fix_one = Vec::new();
        let mut floor = 0;
        for c in model.constraints().iter().filter(|c| !is_packing(c)) {
            if c.terms.is_empty() {
                if !c.sense.holds(0, c.rhs) {
                    return Err(infeasible(format!("row {} has no terms and cannot hold", c.label)));
                }
            } else if let [(w, coef)] = c.terms[..] {
                match (c.sense.holds(0, c.rhs), c.sense.holds(coef, c.rhs)) {
                    (true, true) => {}
                    (true, false) => fix_zero.push(label[w.index()]),
                    (false, true) => fix_one.push(label[w.index()]),
                    (false, false) => return Err(infeasible(format!("row {} cannot hold", c.label))),
                }
            } else {
                if c.sense == Sense::Ge && c.terms.len() == vars && c.terms.iter().all(|t| t.1 == 1) {
                    floor = floor.max(c.rhs);
                }
                rows.push(GeneralRow::new(c, &label, vars));
            }
        }

        // Variables outside every packing row still need a cover class.
        cliques.extend((0..vars).filter(|&l| degree[order[l]] == 0).map(|l| vec![l]));
        let keep = (0..vars)
            .map(|l| {
                let mut k = BitSet::full(vars);
                for u in neighbors[order[l]].ones() {
                    k.remove(label[u]);
                }
                k.remove(l);
                k
            })
            .collect();

        let mut problem = Problem {
            vars,
            rows,
            packing: CliqueFamily::new(vars, cliques),
            keep,
            ones: BitSet::new(vars),
            free: BitSet::full(vars),
            floor,
            order,
        };
        for v in fix_zero {
            problem.free.remove(v);
        }
        for v in fix_one {
            if problem.ones.contains(v) {
                continue;
            }
            if !problem.free.contains(v) {
                return Err(infeasible(format!(
                    "variable {} is fixed to 1 but excluded by another row",
                    problem.order[v]
                )));
            }
            problem.ones.insert(v);
            problem.free.intersect_with(&problem.keep[v]);
        }
        Ok(problem)
    }
}

/// Per-depth scratch space.
struct Level {
    free: BitSet,
    rest: BitSet,
    classes: Vec<(u32, u32)>,
}

struct Search<'a> {
    p: &'a Problem,
    budget: Budget,
    nodes: u64,
    stopped: bool,
    best: i64,
    best_ones: Option<BitSet>,
    /// Set once an assignment beating the target has been recorded.
    found: bool,
    empty: BitSet,
}

impl Search<'_> {
    fn feasible(&self, ones: &BitSet, free: &BitSet) -> bool {
        self.p.rows.iter().all(|r| r.feasible(ones, free))
    }

    /// Takes free variables in label order whenever every row stays
    /// satisfiable, giving the search a starting incumbent.
    fn greedy(&mut self) {
        let mut ones = self.p.ones.clone();
        let mut free = self.p.free.clone();
        if !self.feasible(&ones, &free) {
            return;
        }
        let mut trial = free.clone();
        while let Some(v) = free.first() {
            trial.copy_from(&free);
            trial.intersect_with(&self.p.keep[v]);
            ones.insert(v);
            if self.feasible(&ones, &trial) {
                free.copy_from(&trial);
                continue;
            }
            ones.remove(v);
            free.remove(v);
            if !self.feasible(&ones, &free) {
                return;
            }
        }
        let count = ones.count() as i64;
        if count > self.best {
            self.best = count;
            self.best_ones = Some(ones);
        }
    }

    /// Explores every completion of `ones` within `levels[0].free`. Free
    /// variables are covered by packing cliques; those in the highest classes
    /// are branched on in turn, and the rest cannot lift the objective above
    /// the incumbent.
    fn node(&mut self, ones: &mut BitSet, ones_count: i64, levels: &mut [Level]) {
        self.nodes += 1;
        if self.stopped || self.budget.exhausted(self.nodes) {
            self.stopped = true;
            return;
        }
        let (level, deeper) = levels.split_first_mut().expect("depth bound");
        if !self.feasible(ones, &level.free) {
            return;
        }
        if ones_count > self.best && self.feasible(ones, &self.empty) {
            self.best = ones_count;
            self.best_ones = Some(ones.clone());
            self.found = true;
            return;
        }
        level.classes.clear();
        self.p.packing.cover(&level.free, &mut level.rest, &mut level.classes);
        for idx in (0..level.classes.len()).rev() {
            let (v, class) = level.classes[idx];
            if ones_count + class as i64 <= self.best || self.stopped || self.found {
                return;
            }
            let v = v as usize;
            deeper[0].free.copy_from(&level.free);
            deeper[0].free.intersect_with(&self.p.keep[v]);
            ones.insert(v);
            self.node(ones, ones_count + 1, deeper);
            ones.remove(v);
            level.free.remove(v);
            if !self.feasible(ones, &level.free) {
                return;
            }
        }
    }
}

/// Solves a model exactly, or returns the best assignment found within the
/// budget with status `Feasible` (or `Unknown` if none was found).
///
/// A model with no feasible assignment is an error. For models built from the
/// code constraints that means a generator defect.
pub fn solve_builtin(model: &IlpModel, options: &SearchOptions) -> Result<Solution> {
    let p = Problem::build(model)?;
    let mut search = Search {
        p: &p,
        budget: Budget::new(options),
        nodes: 0,
        stopped: false,
        best: p.floor - 1,
        best_ones: None,
        found: false,
        empty: BitSet::new(p.vars),
    };
    search.greedy();
    // Each level below the root fixes one more variable to 1.
    let mut levels: Vec<Level> = (0..=p.vars + 1)
        .map(|_| Level { free: BitSet::new(p.vars), rest: BitSet::new(p.vars), classes: Vec::new() })
        .collect();
    let fixed = p.ones.count() as i64;
    let mut rest = BitSet::new(p.vars);
    let mut target = fixed + p.packing.cover_size(&p.free, &mut rest) as i64;
    // Targets descend from the root bound; the first one reached is optimal
    // because every larger target was refuted.
    let mut proved = false;
    while target > search.best.max(p.floor - 1) {
        let incumbent = (search.best, search.best_ones.take());
        search.best = target - 1;
        search.found = false;
        levels[0].free.copy_from(&p.free);
        let mut ones = p.ones.clone();
        search.node(&mut ones, fixed, &mut levels);
        if search.found {
            proved = !search.stopped;
            break;
        }
        (search.best, search.best_ones) = incumbent;
        if search.stopped {
            break;
        }
        target -= 1;
    }
    if !search.stopped && !search.found {
        proved = true;
    }

    let status = match (&search.best_ones, search.stopped && !proved) {
        (Some(_), false) => SolverStatus::Optimal,
        (Some(_), true) => SolverStatus::Feasible,
        (None, true) => SolverStatus::Unknown,
        (None, false) => {
            let why = if p.floor > 0 {
                format!("no assignment satisfies every row with objective at least {}", p.floor)
            } else {
                "no assignment satisfies every row".to_string()
            };
            return Err(infeasible(why));
        }
    };
    let mut sol = Solution::new(model.n(), SolutionSource::Builtin, status);
    if let Some(best) = &search.best_ones {
        for l in best.ones() {
            sol.set(&Word::raw(p.order[l] as u32, model.n()), true);
        }
    }
    sol.nodes = search.nodes;
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{build_model, FamilyId::*};
    use crate::ilp::verify_solution;

    #[test]
    fn small_models() {
        let m = build_model(5, &[C0], &[]).unwrap();
        let s = solve_builtin(&m, &SearchOptions::unlimited()).unwrap();
        assert_eq!((s.objective(), s.status), (6, SolverStatus::Optimal));
        assert!(verify_solution(&m, &s).passed());

        let m = build_model(3, &[C0, C2, C3], &[]).unwrap();
        let s = solve_builtin(&m, &SearchOptions::unlimited()).unwrap();
        assert_eq!(s.objective(), 2);
        assert_eq!(s.selected(), crate::vt::Code::parse_list("000 111").unwrap());
    }

    #[test]
    fn every_family_at_five() {
        let m = build_model(5, &[C0, C1, C2, C3, C4, C5], &[]).unwrap();
        let s = solve_builtin(&m, &SearchOptions::unlimited()).unwrap();
        assert_eq!(s.objective(), 6);
        assert!(verify_solution(&m, &s).passed());
    }

    #[test]
    fn infeasible_floor_is_an_error() {
        let mut m = build_model(4, &[C0, C1], &[]).unwrap();
        let mut rows = m.constraints().to_vec();
        rows.iter_mut().find(|c| c.label == "c1").unwrap().rhs = 5;
        m = IlpModel::new(4, rows, m.metadata().clone());
        assert!(matches!(solve_builtin(&m, &SearchOptions::unlimited()), Err(Error::Infeasible(_))));
    }

    #[test]
    fn contradictory_fixings() {
        let m = build_model(3, &[C0], &[]).unwrap();
        let mut rows = m.constraints().to_vec();
        let x: Word = "000".parse().unwrap();
        let y: Word = "001".parse().unwrap();
        rows.push(LinearConstraint { label: "a".into(), terms: vec![(x, 1)], sense: Sense::Eq, rhs: 1 });
        rows.push(LinearConstraint { label: "b".into(), terms: vec![(y, 1)], sense: Sense::Ge, rhs: 1 });
        let m = IlpModel::new(3, rows, m.metadata().clone());
        assert!(matches!(solve_builtin(&m, &SearchOptions::unlimited()), Err(Error::Infeasible(_))));
    }

    #[test]
    fn node_limit_returns_incumbent_or_unknown() {
        let m = build_model(7, &[C0], &[]).unwrap();
        let s = solve_builtin(&m, &SearchOptions::unlimited().with_node_limit(5)).unwrap();
        assert!(matches!(s.status, SolverStatus::Feasible | SolverStatus::Unknown));
        let s = solve_builtin(&m, &SearchOptions::unlimited().with_node_limit(500)).unwrap();
        assert_eq!(s.status, SolverStatus::Feasible);
        let r = verify_solution(&m, &s);
        assert!(r.passed());
    }
}
