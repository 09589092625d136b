#include "btconv/generate.hpp"

#include <random>

namespace btconv {

namespace {

using Rng = std::mt19937_64;

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

TreeBuilder::Spec random_shape(Rng& rng, std::vector<TreeBuilder::Spec>& leaves, std::size_t lo, std::size_t hi,
                               int depth) {
  const std::size_t count = hi - lo;
  if (count == 1 && (depth > 0 || pick(rng, 0, 1) == 0)) return leaves[lo];
  // Split [lo, hi) into 1..3 consecutive groups.
  std::vector<std::size_t> cuts{lo};
  const std::size_t groups = count == 1 ? 1 : pick(rng, 2, std::min<std::size_t>(3, count));
  std::vector<std::size_t> inner;
  for (std::size_t k = lo + 1; k < hi; ++k) inner.push_back(k);
  std::shuffle(inner.begin(), inner.end(), rng);
  inner.resize(groups - 1);
  std::sort(inner.begin(), inner.end());
  cuts.insert(cuts.end(), inner.begin(), inner.end());
  cuts.push_back(hi);
  std::vector<TreeBuilder::Spec> kids;
  for (std::size_t g = 0; g + 1 < cuts.size(); ++g) kids.push_back(random_shape(rng, leaves, cuts[g], cuts[g + 1], depth + 1));
  return pick(rng, 0, 1) ? TreeBuilder::seq("", std::move(kids)) : TreeBuilder::fal("", std::move(kids));
}

}  // namespace

SpecDocument random_gridworld(std::uint64_t seed, const GridworldOptions& opts) {
  Rng rng(seed);
  const std::size_t w = pick(rng, 2, opts.max_side), h = pick(rng, 2, opts.max_side);
  const std::size_t n = w * h;
  std::vector<std::vector<double>> coords;
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) coords.push_back({double(x), double(y)});
  SpecDocument doc;
  doc.world = World::with_coords(coords);

  auto cell = [&](std::size_t x, std::size_t y) { return y * w + x; };
  const std::size_t leaves = pick(rng, 1, opts.max_leaves);
  std::vector<TreeBuilder::Spec> specs;
  for (std::size_t k = 0; k < leaves; ++k) {
    const std::size_t tx = pick(rng, 0, w - 1), ty = pick(rng, 0, h - 1);
    const std::size_t radius = pick(rng, 0, 1);
    Region s(n), f(n);
    SuccessorMap u = SuccessorMap::identity(n);
    std::bernoulli_distribution noisy(0.2), failing(0.15);
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) {
        const std::size_t c = cell(x, y);
        const std::size_t dx = x > tx ? x - tx : tx - x, dy = y > ty ? y - ty : ty - y;
        if (dx + dy <= radius) s.insert(c);
        else if (failing(rng)) f.insert(c);
        std::size_t nx = x, ny = y;
        if (noisy(rng)) {
          switch (pick(rng, 0, 4)) {
            case 0: nx = x + 1 < w ? x + 1 : x; break;
            case 1: nx = x > 0 ? x - 1 : x; break;
            case 2: ny = y + 1 < h ? y + 1 : y; break;
            case 3: ny = y > 0 ? y - 1 : y; break;
            default: break;
          }
        } else if (dx > 0 && (dy == 0 || pick(rng, 0, 1))) {
          nx = x < tx ? x + 1 : x - 1;
        } else if (dy > 0) {
          ny = y < ty ? y + 1 : y - 1;
        }
        u.next[c] = cell(nx, ny);
      }
    Doa d = derive_doa(u, f.complement(), s);
    specs.push_back(TreeBuilder::action("a" + std::to_string(k), s, f, u, d));
  }
  doc.model.emplace(TreeBuilder::build(doc.world, random_shape(rng, specs, 0, specs.size(), 0)));
  return doc;
}

}  // namespace btconv
