#include "btconv/world.hpp"

#include <algorithm>
#include <cmath>

namespace btconv {

SuccessorMap SuccessorMap::identity(std::size_t cells) {
  SuccessorMap m;
  m.next.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) m.next[c] = c;
  return m;
}

World::World(std::size_t cell_count) : cell_count_(cell_count) {
  if (cell_count == 0) throw ValidationError("universe must contain at least one cell");
}

World World::with_coords(std::vector<std::vector<double>> coords) {
  World w(coords.size());
  const std::size_t dim = coords.front().size();
  for (std::size_t c = 0; c < coords.size(); ++c) {
    if (coords[c].size() != dim)
      throw ValidationError("coords: cell " + std::to_string(c) + " has dimension " +
                            std::to_string(coords[c].size()) + ", expected " + std::to_string(dim));
    for (double x : coords[c])
      if (!std::isfinite(x)) throw ValidationError("coords: cell " + std::to_string(c) + " is not finite");
  }
  w.coords_ = std::move(coords);
  return w;
}

World World::with_adjacency(std::size_t cell_count, const std::vector<std::pair<CellId, CellId>>& pairs) {
  World w(cell_count);
  std::vector<Region> rows(cell_count, Region(cell_count));
  for (auto [p, q] : pairs) {
    if (p >= cell_count || q >= cell_count)
      throw ValidationError("adjacency: pair (" + std::to_string(p) + "," + std::to_string(q) +
                            ") outside universe");
    rows[p].insert(q);
    rows[q].insert(p);
  }
  w.adjacency_ = std::move(rows);
  return w;
}

NeighborMode World::mode() const {
  if (coords_) return NeighborMode::Metric;
  if (adjacency_) return NeighborMode::Adjacency;
  return NeighborMode::None;
}

const std::vector<std::vector<double>>& World::coords() const {
  if (!coords_) throw Error("world has no coordinates");
  return *coords_;
}

const Region& World::adjacent(CellId c) const {
  if (!adjacency_) throw Error("world has no adjacency relation");
  return adjacency_->at(c);
}

std::vector<std::pair<CellId, CellId>> World::adjacency_pairs() const {
  std::vector<std::pair<CellId, CellId>> out;
  if (!adjacency_) return out;
  for (CellId p = 0; p < cell_count_; ++p)
    (*adjacency_)[p].for_each([&](CellId q) {
      if (p <= q) out.emplace_back(p, q);
    });
  return out;
}

void World::set_labels(std::vector<std::string> labels) {
  if (!labels.empty() && labels.size() != cell_count_)
    throw ValidationError("labels: expected " + std::to_string(cell_count_) + " entries, got " +
                          std::to_string(labels.size()));
  labels_ = std::move(labels);
}

std::string World::label(CellId c) const {
  if (c < labels_.size()) return labels_[c];
  return std::to_string(c);
}

Region World::region(const std::vector<CellId>& cells) const {
  Region r(cell_count_);
  for (CellId c : cells) r.insert(c);
  return r;
}

double World::distance(CellId a, CellId b) const {
  const auto& ca = coords().at(a);
  const auto& cb = coords().at(b);
  double s = 0.0;
  for (std::size_t k = 0; k < ca.size(); ++k) {
    const double d = ca[k] - cb[k];
    s += d * d;
  }
  return std::sqrt(s);
}

void validate_map(const World& w, const SuccessorMap& m, const std::string& what) {
  if (m.size() != w.cell_count())
    throw ValidationError(what + ": successor array has " + std::to_string(m.size()) + " entries, expected " +
                          std::to_string(w.cell_count()));
  for (std::size_t c = 0; c < m.size(); ++c)
    if (m.next[c] >= w.cell_count())
      throw ValidationError(what + ": successor of cell " + std::to_string(c) + " is " +
                            std::to_string(m.next[c]) + ", outside the universe");
}

double step_bound(const World& w, const std::vector<const SuccessorMap*>& maps) {
  if (!w.has_coords())
    throw Error("step bound needs cell coordinates; use an adjacency relation for symbolic universes");
  double delta = 0.0;
  for (const SuccessorMap* m : maps)
    for (CellId c = 0; c < w.cell_count(); ++c) delta = std::max(delta, w.distance(c, (*m)(c)));
  return delta;
}

bool neighboring(const Region& a, const Region& b, const World& w, double delta) {
  if (a.empty() || b.empty()) throw Error("neighboring is undefined for empty sets");
  if (a.intersects(b)) return true;
  switch (w.mode()) {
    case NeighborMode::Metric: {
      bool found = false;
      a.for_each([&](CellId p) {
        if (found) return;
        b.for_each([&](CellId q) {
          if (!found && w.distance(p, q) <= delta) found = true;
        });
      });
      return found;
    }
    case NeighborMode::Adjacency: {
      bool found = false;
      a.for_each([&](CellId p) {
        if (!found && w.adjacent(p).intersects(b)) found = true;
      });
      return found;
    }
    case NeighborMode::None:
      break;
  }
  throw Error("world has neither coordinates nor adjacency; neighboring is undefined");
}

std::vector<std::pair<CellId, CellId>> transition_pairs(const World& w,
                                                        const std::vector<const SuccessorMap*>& maps) {
  std::vector<std::pair<CellId, CellId>> out;
  for (const SuccessorMap* m : maps)
    for (CellId c = 0; c < w.cell_count(); ++c) {
      const CellId d = (*m)(c);
      if (c != d) out.emplace_back(std::min(c, d), std::max(c, d));
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<std::pair<CellId, CellId>> uncovered_transition(const World& w,
                                                              const std::vector<const SuccessorMap*>& maps) {
  if (!w.has_adjacency()) return std::nullopt;
  for (const SuccessorMap* m : maps)
    for (CellId c = 0; c < w.cell_count(); ++c) {
      const CellId d = (*m)(c);
      if (c != d && !w.adjacent(c).contains(d)) return std::make_pair(c, d);
    }
  return std::nullopt;
}

}  // namespace btconv
