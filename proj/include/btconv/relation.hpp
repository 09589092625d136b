#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "btconv/bitset.hpp"

namespace btconv {

// Binary relation over {0..n-1}, one successor bitset per source vertex.
// contains(i, j) reads as "i R j".
class Relation {
 public:
  Relation() = default;
  explicit Relation(std::size_t n) : rows_(n, VertexSet(n)) {}

  static Relation identity(std::size_t n);
  static Relation from_pairs(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

  std::size_t size() const { return rows_.size(); }
  bool contains(std::size_t i, std::size_t j) const { return rows_.at(i).contains(j); }
  void insert(std::size_t i, std::size_t j) { rows_.at(i).insert(j); }
  void erase(std::size_t i, std::size_t j) { rows_.at(i).erase(j); }

  const VertexSet& row(std::size_t i) const { return rows_.at(i); }
  VertexSet& row(std::size_t i) { return rows_.at(i); }
  VertexSet column(std::size_t j) const;

  std::vector<std::pair<std::size_t, std::size_t>> pairs() const;
  std::size_t pair_count() const;

  Relation converse() const;
  Relation strict() const;  // drops the diagonal

  bool is_reflexive() const;
  bool is_irreflexive() const;
  bool is_transitive() const;
  bool is_antisymmetric() const;

  Relation& operator|=(const Relation& o);
  Relation& operator&=(const Relation& o);
  friend Relation operator|(Relation a, const Relation& b) { return a |= b; }
  friend Relation operator&(Relation a, const Relation& b) { return a &= b; }
  friend bool operator==(const Relation& a, const Relation& b) { return a.rows_ == b.rows_; }

 private:
  std::vector<VertexSet> rows_;
};

Relation reflexive_transitive_closure(const Relation& rel);

// {(i,k) | exists j: (i,j) in a and (j,k) in b}
Relation compose(const Relation& a, const Relation& b);

}  // namespace btconv
