#include "btconv/execution.hpp"

#include <algorithm>

namespace btconv {

const char* to_string(HaltReason h) {
  switch (h) {
    case HaltReason::Stopped: return "stopped";
    case HaltReason::NoAction: return "no-action";
    case HaltReason::StepLimit: return "step-limit";
  }
  return "?";
}

const char* to_string(FtsViolationKind k) {
  switch (k) {
    case FtsViolationKind::LeavesBasin: return "leaves-basin";
    case FtsViolationKind::MissesDeadline: return "misses-deadline";
    case FtsViolationKind::LeavesGoal: return "leaves-goal";
    case FtsViolationKind::BasinOutsideRunningOrSuccess: return "basin-outside-running-or-success";
    case FtsViolationKind::GoalOutsideBasinAndSuccess: return "goal-outside-basin-and-success";
    case FtsViolationKind::NoController: return "no-controller";
  }
  return "?";
}

ClosedLoop closed_loop(const BTModel& m) { return closed_loop(m, m.root()); }

ClosedLoop closed_loop(const BTModel& m, VertexId from) {
  const std::size_t n = m.world().cell_count();
  ClosedLoop loop;
  loop.from = from;
  loop.leaf.resize(n);
  loop.status.resize(n);
  loop.next.resize(n);
  for (CellId x = 0; x < n; ++x) {
    const TickResult t = tick(m, x, from);
    loop.leaf[x] = t.leaf;
    const Node& nd = m.node(t.leaf);
    // The executing leaf's status is the root's status by construction.
    loop.status[x] = t.status;
    if (nd.controller) loop.next[x] = (*nd.controller)(x);
  }
  return loop;
}

Trace simulate(const BTModel& m, CellId x0, std::size_t max_steps, const StopPredicate& stop) {
  if (x0 >= m.world().cell_count()) throw ValidationError("simulate: start cell outside universe");
  return simulate(closed_loop(m), x0, max_steps, stop);
}

Trace simulate(const ClosedLoop& loop, CellId x0, std::size_t max_steps, const StopPredicate& stop) {
  if (x0 >= loop.size()) throw ValidationError("simulate: start cell outside universe");
  if (max_steps == 0) throw ValidationError("simulate: max_steps must be positive");
  Trace t;
  CellId x = x0;
  while (true) {
    t.states.push_back(x);
    t.leaves.push_back(loop.leaf[x]);
    t.statuses.push_back(loop.status[x]);
    if (stop && stop(x, loop.status[x])) {
      t.halt = HaltReason::Stopped;
      break;
    }
    if (!loop.next[x]) {
      t.halt = HaltReason::NoAction;
      break;
    }
    if (t.states.size() >= max_steps) {
      t.halt = HaltReason::StepLimit;
      break;
    }
    x = *loop.next[x];
  }
  return t;
}

std::string FtsVerdict::describe(const BTModel& m) const {
  if (!violation) return "'" + m.name(vertex) + "' is finite-time successful";
  return "'" + m.name(vertex) + "': " + to_string(violation->kind) + " at cell " + m.world().label(violation->cell) +
         " (step " + std::to_string(violation->step) + ")";
}

FtsVerdict check_fts(const BTModel& m, VertexId i) { return check_fts(m, i, propagate_metadata(m)); }

FtsVerdict check_fts(const BTModel& m, VertexId i, const std::vector<Metadata>& meta) {
  const Node& nd = m.node(i);
  if (!nd.doa) throw PreconditionError("'" + nd.name + "' has no DOA");
  const Doa& d = *nd.doa;
  FtsVerdict v{i, std::nullopt};
  const Metadata& md = meta.at(i);

  const Region outside_rs = d.basin - (md.running | md.success);
  if (!outside_rs.empty()) {
    v.violation = FtsViolation{FtsViolationKind::BasinOutsideRunningOrSuccess, outside_rs.first(), 0};
    return v;
  }
  const Region outside_bs = d.goal - (d.basin & md.success);
  if (!outside_bs.empty()) {
    v.violation = FtsViolation{FtsViolationKind::GoalOutsideBasinAndSuccess, outside_bs.first(), 0};
    return v;
  }

  std::vector<std::optional<CellId>> next(m.world().cell_count());
  if (m.is_leaf(i)) {
    if (!nd.controller) {
      if (!d.basin.empty()) v.violation = FtsViolation{FtsViolationKind::NoController, d.basin.first(), 0};
      return v;
    }
    for (CellId x = 0; x < next.size(); ++x) next[x] = (*nd.controller)(x);
  } else {
    next = closed_loop(m, i).next;
  }

  // On a finite deterministic system the orbit repeats within N steps, so
  // following it N steps covers all future states.
  const std::size_t horizon = m.world().cell_count();
  auto follow = [&](CellId start, const Region& keep, FtsViolationKind leave_kind,
                    bool need_goal) -> std::optional<FtsViolation> {
    CellId x = start;
    std::optional<std::size_t> reached;
    if (need_goal && d.goal.contains(x)) reached = 0;
    for (std::size_t k = 1; k <= horizon; ++k) {
      if (!next[x]) return FtsViolation{FtsViolationKind::NoController, x, k - 1};
      x = *next[x];
      if (!keep.contains(x)) return FtsViolation{leave_kind, start, k};
      if (need_goal && !reached && d.goal.contains(x)) {
        reached = k;
        if (k > d.tau) return FtsViolation{FtsViolationKind::MissesDeadline, start, k};
      }
    }
    if (need_goal && !reached) return FtsViolation{FtsViolationKind::MissesDeadline, start, horizon + 1};
    return std::nullopt;
  };

  for (CellId x = d.basin.first(); x < d.basin.size(); x = d.basin.next(x + 1))
    if (auto bad = follow(x, d.basin, FtsViolationKind::LeavesBasin, true)) {
      v.violation = bad;
      return v;
    }
  for (CellId x = d.goal.first(); x < d.goal.size(); x = d.goal.next(x + 1))
    if (auto bad = follow(x, d.goal, FtsViolationKind::LeavesGoal, false)) {
      v.violation = bad;
      return v;
    }
  return v;
}

ExitTime empirical_exit_time(const BTModel& m, const Region& region, std::size_t max_steps) {
  return empirical_exit_time(closed_loop(m), region, max_steps);
}

ExitTime empirical_exit_time(const ClosedLoop& loop, const Region& region, std::size_t max_steps) {
  if (max_steps == 0) max_steps = loop.size() + 1;
  ExitTime out;
  std::size_t worst = 0;
  for (CellId s = region.first(); s < region.size(); s = region.next(s + 1)) {
    CellId x = s;
    std::optional<std::size_t> exit;
    for (std::size_t k = 1; k <= max_steps; ++k) {
      if (!loop.next[x]) break;
      x = *loop.next[x];
      if (!region.contains(x)) {
        exit = k;
        break;
      }
    }
    if (!exit) {
      out.witness = s;
      out.witness_trace = simulate(loop, s, max_steps + 1);
      return out;
    }
    worst = std::max(worst, *exit);
  }
  out.steps = worst;
  return out;
}

Doa derive_doa(const SuccessorMap& map, const Region& allowed, const Region& success) {
  const std::size_t n = map.size();
  Doa d{Region(n), Region(n), 1};
  for (CellId x = 0; x < n; ++x)
    if (map(x) == x && success.contains(x) && allowed.contains(x)) d.goal.insert(x);
  std::size_t tau = 1;
  for (CellId s = 0; s < n; ++s) {
    CellId x = s;
    for (std::size_t k = 0; k <= n; ++k) {
      if (!allowed.contains(x)) break;
      if (d.goal.contains(x)) {
        d.basin.insert(s);
        tau = std::max(tau, k);
        break;
      }
      x = map(x);
    }
  }
  d.tau = tau;
  return d;
}

}  // namespace btconv
