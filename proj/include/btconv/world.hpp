#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "btconv/bitset.hpp"

namespace btconv {

// Total successor function over the cell universe: one discrete step of a
// controller applied to the plant.
struct SuccessorMap {
  std::vector<CellId> next;

  static SuccessorMap identity(std::size_t cells);
  std::size_t size() const { return next.size(); }
  CellId operator()(CellId c) const { return next.at(c); }
  friend bool operator==(const SuccessorMap&, const SuccessorMap&) = default;
};

enum class NeighborMode { None, Metric, Adjacency };

// Finite universe {0..N-1}. Neighboring is decided either by euclidean
// coordinates or by an explicit symmetric adjacency relation.
class World {
 public:
  World() = default;
  explicit World(std::size_t cell_count);
  static World with_coords(std::vector<std::vector<double>> coords);
  static World with_adjacency(std::size_t cell_count,
                              const std::vector<std::pair<CellId, CellId>>& pairs);

  std::size_t cell_count() const { return cell_count_; }
  NeighborMode mode() const;
  bool has_coords() const { return coords_.has_value(); }
  bool has_adjacency() const { return adjacency_.has_value(); }
  const std::vector<std::vector<double>>& coords() const;
  // Cells adjacent to c, not including c itself unless listed.
  const Region& adjacent(CellId c) const;
  std::vector<std::pair<CellId, CellId>> adjacency_pairs() const;

  void set_labels(std::vector<std::string> labels);
  const std::vector<std::string>& labels() const { return labels_; }
  std::string label(CellId c) const;

  Region empty_region() const { return Region(cell_count_); }
  Region universe() const { return Region::full(cell_count_); }
  Region region(const std::vector<CellId>& cells) const;

  double distance(CellId a, CellId b) const;

 private:
  std::size_t cell_count_ = 0;
  std::optional<std::vector<std::vector<double>>> coords_;
  std::optional<std::vector<Region>> adjacency_;
  std::vector<std::string> labels_;
};

void validate_map(const World& w, const SuccessorMap& m, const std::string& what);

// Largest single-step euclidean displacement over all cells and maps.
double step_bound(const World& w, const std::vector<const SuccessorMap*>& maps);

// Metric mode: min pairwise distance <= delta. Adjacency mode: a shared cell
// or an adjacent pair. Both operands must be nonempty.
bool neighboring(const Region& a, const Region& b, const World& w, double delta);

// Every (c, m(c)) pair over all maps, symmetrised; self pairs dropped.
std::vector<std::pair<CellId, CellId>> transition_pairs(const World& w,
                                                        const std::vector<const SuccessorMap*>& maps);

// First transition (c, m(c)) that an adjacency-mode world does not list, if any.
// Neighboring is only sound for the prepares graph when this is empty.
std::optional<std::pair<CellId, CellId>> uncovered_transition(const World& w,
                                                              const std::vector<const SuccessorMap*>& maps);

}  // namespace btconv
