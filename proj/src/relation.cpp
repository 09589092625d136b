#include "btconv/relation.hpp"

namespace btconv {

Relation Relation::identity(std::size_t n) {
  Relation r(n);
  for (std::size_t i = 0; i < n; ++i) r.insert(i, i);
  return r;
}

Relation Relation::from_pairs(std::size_t n,
                              const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  Relation r(n);
  for (auto [i, j] : pairs) {
    if (i >= n || j >= n) throw ValidationError("relation pair outside vertex set");
    r.insert(i, j);
  }
  return r;
}

VertexSet Relation::column(std::size_t j) const {
  VertexSet c(size());
  for (std::size_t i = 0; i < size(); ++i)
    if (rows_[i].contains(j)) c.insert(i);
  return c;
}

std::vector<std::pair<std::size_t, std::size_t>> Relation::pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < size(); ++i) rows_[i].for_each([&](std::size_t j) { out.emplace_back(i, j); });
  return out;
}

std::size_t Relation::pair_count() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.count();
  return n;
}

Relation Relation::converse() const {
  Relation c(size());
  for (std::size_t i = 0; i < size(); ++i) rows_[i].for_each([&](std::size_t j) { c.insert(j, i); });
  return c;
}

Relation Relation::strict() const {
  Relation s = *this;
  for (std::size_t i = 0; i < size(); ++i) s.rows_[i].erase(i);
  return s;
}

bool Relation::is_reflexive() const {
  for (std::size_t i = 0; i < size(); ++i)
    if (!rows_[i].contains(i)) return false;
  return true;
}

bool Relation::is_irreflexive() const {
  for (std::size_t i = 0; i < size(); ++i)
    if (rows_[i].contains(i)) return false;
  return true;
}

bool Relation::is_transitive() const {
  Relation sq = compose(*this, *this);
  for (std::size_t i = 0; i < size(); ++i)
    if (!sq.rows_[i].is_subset_of(rows_[i])) return false;
  return true;
}

bool Relation::is_antisymmetric() const {
  for (std::size_t i = 0; i < size(); ++i) {
    bool ok = true;
    rows_[i].for_each([&](std::size_t j) {
      if (j != i && rows_[j].contains(i)) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

Relation& Relation::operator|=(const Relation& o) {
  if (o.size() != size()) throw Error("relations over different vertex sets");
  for (std::size_t i = 0; i < size(); ++i) rows_[i] |= o.rows_[i];
  return *this;
}

Relation& Relation::operator&=(const Relation& o) {
  if (o.size() != size()) throw Error("relations over different vertex sets");
  for (std::size_t i = 0; i < size(); ++i) rows_[i] &= o.rows_[i];
  return *this;
}

Relation reflexive_transitive_closure(const Relation& rel) {
  Relation c = rel | Relation::identity(rel.size());
  // Warshall over bit rows.
  for (std::size_t k = 0; k < c.size(); ++k) {
    const VertexSet via = c.row(k);
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c.row(i).contains(k)) c.row(i) |= via;
  }
  return c;
}

Relation compose(const Relation& a, const Relation& b) {
  if (a.size() != b.size()) throw Error("relations over different vertex sets");
  Relation out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    a.row(i).for_each([&](std::size_t j) { out.row(i) |= b.row(j); });
  return out;
}

}  // namespace btconv
