#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "btconv/analysis.hpp"

namespace btconv {

enum class HaltReason { Stopped, NoAction, StepLimit };
const char* to_string(HaltReason h);

struct Trace {
  std::vector<CellId> states;
  std::vector<VertexId> leaves;
  std::vector<Status> statuses;
  HaltReason halt = HaltReason::StepLimit;

  std::size_t size() const { return states.size(); }
};

// Per-cell tick of a subtree, tabulated once: executing leaf, status, and
// the successor cell when the leaf is an action.
struct ClosedLoop {
  VertexId from = 0;
  std::vector<VertexId> leaf;
  std::vector<Status> status;
  std::vector<std::optional<CellId>> next;

  std::size_t size() const { return leaf.size(); }
};

ClosedLoop closed_loop(const BTModel& m);
ClosedLoop closed_loop(const BTModel& m, VertexId from);

using StopPredicate = std::function<bool(CellId, Status)>;

// Tick-then-step from x0. The trace records at most max_steps ticks; it ends
// early when stop holds, or when the resolved leaf is not an action.
Trace simulate(const BTModel& m, CellId x0, std::size_t max_steps, const StopPredicate& stop = {});
Trace simulate(const ClosedLoop& loop, CellId x0, std::size_t max_steps, const StopPredicate& stop = {});

enum class FtsViolationKind {
  LeavesBasin,          // trajectory from B exits B
  MissesDeadline,       // G not reached within tau
  LeavesGoal,           // trajectory from G exits G
  BasinOutsideRunningOrSuccess,
  GoalOutsideBasinAndSuccess,
  NoController,         // closed loop of a subtree hits a condition leaf
};
const char* to_string(FtsViolationKind k);

struct FtsViolation {
  FtsViolationKind kind;
  CellId cell;
  std::size_t step;
};

struct FtsVerdict {
  VertexId vertex;
  std::optional<FtsViolation> violation;
  bool ok() const { return !violation; }
  std::string describe(const BTModel& m) const;
};

// Finite-time success of vertex i against its DOA. Leaves are driven by
// their own controller, composites by the closed loop of their subtree.
FtsVerdict check_fts(const BTModel& m, VertexId i);
FtsVerdict check_fts(const BTModel& m, VertexId i, const std::vector<Metadata>& meta);

struct ExitTime {
  std::optional<std::size_t> steps;  // max over starts of the first step outside the region
  std::optional<CellId> witness;     // a start that never exits
  Trace witness_trace;
};

// max_steps == 0 selects cell_count + 1.
ExitTime empirical_exit_time(const BTModel& m, const Region& region, std::size_t max_steps = 0);
ExitTime empirical_exit_time(const ClosedLoop& loop, const Region& region, std::size_t max_steps = 0);

// Largest DOA for a single map: G is the set of fixed points inside
// `success`, B the cells whose orbit stays in `allowed` and reaches G.
// Returns B = G = {} with tau = 1 when no cell qualifies.
Doa derive_doa(const SuccessorMap& map, const Region& allowed, const Region& success);

}  // namespace btconv
