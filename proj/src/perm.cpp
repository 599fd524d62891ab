#include "prill/perm.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace prill {

Permutation::Permutation(std::vector<Index> images) : images_(std::move(images)) {
  std::vector<bool> seen(images_.size(), false);
  for (Index x : images_) {
    if (x >= images_.size() || seen[x]) {
      throw std::invalid_argument("Permutation: image array is not a bijection");
    }
    seen[x] = true;
  }
}

Permutation Permutation::identity(Index degree) {
  std::vector<Index> im(degree);
  std::iota(im.begin(), im.end(), Index{0});
  return Permutation(std::move(im));
}

Permutation Permutation::from_cycles(Index degree, std::initializer_list<std::vector<Index>> cycles) {
  return from_cycles(degree, std::vector<std::vector<Index>>(cycles));
}

Permutation Permutation::from_cycles(Index degree, const std::vector<std::vector<Index>>& cycles) {
  std::vector<Index> im(degree);
  std::iota(im.begin(), im.end(), Index{0});
  std::vector<bool> touched(degree, false);
  for (const auto& c : cycles) {
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (c[k] >= degree || touched[c[k]]) {
        throw std::invalid_argument("Permutation::from_cycles: cycles are not disjoint or out of range");
      }
      touched[c[k]] = true;
      im[c[k]] = c[(k + 1) % c.size()];
    }
  }
  return Permutation(std::move(im));
}

bool Permutation::is_identity() const {
  for (Index i = 0; i < images_.size(); ++i) {
    if (images_[i] != i) return false;
  }
  return true;
}

Permutation Permutation::inverse() const {
  std::vector<Index> inv(images_.size());
  for (Index i = 0; i < images_.size(); ++i) inv[images_[i]] = i;
  return Permutation(std::move(inv));
}

std::string Permutation::to_string() const {
  std::ostringstream os;
  os << '[';
  for (Index i = 0; i < images_.size(); ++i) {
    if (i) os << ',';
    os << images_[i];
  }
  os << ']';
  return os.str();
}

Permutation compose(const Permutation& p, const Permutation& q) {
  if (p.degree() != q.degree()) {
    throw std::invalid_argument("compose: degree mismatch");
  }
  std::vector<Index> im(p.degree());
  for (Index i = 0; i < im.size(); ++i) im[i] = p(q(i));
  return Permutation(std::move(im));
}

Permutation conjugate(const Permutation& q, const Permutation& p) {
  return compose(p.inverse(), compose(q, p));
}

CycleType::CycleType(std::vector<Index> lens) : lengths(std::move(lens)) {
  std::sort(lengths.begin(), lengths.end(), std::greater<>());
}

Index CycleType::degree() const { return std::accumulate(lengths.begin(), lengths.end(), Index{0}); }

bool CycleType::all_even() const {
  return std::all_of(lengths.begin(), lengths.end(), [](Index l) { return l % 2 == 0; });
}

std::string CycleType::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (i) os << ',';
    os << lengths[i];
  }
  os << '}';
  return os.str();
}

std::vector<std::vector<Index>> cycles(const Permutation& p) {
  std::vector<std::vector<Index>> out;
  std::vector<bool> seen(p.degree(), false);
  for (Index i = 0; i < p.degree(); ++i) {
    if (seen[i]) continue;
    std::vector<Index> c;
    for (Index x = i; !seen[x]; x = p(x)) {
      seen[x] = true;
      c.push_back(x);
    }
    out.push_back(std::move(c));
  }
  return out;
}

CycleType cycle_type(const Permutation& p) {
  std::vector<Index> lens;
  for (const auto& c : cycles(p)) lens.push_back(c.size());
  return CycleType(std::move(lens));
}

Partition orbits(std::span<const Permutation> generators, Index degree) {
  for (const auto& g : generators) {
    if (g.degree() != degree) throw std::invalid_argument("orbits: degree mismatch");
  }
  // union-find with path halving
  std::vector<Index> parent(degree);
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& g : generators) {
    for (Index i = 0; i < degree; ++i) {
      Index a = find(i), b = find(g(i));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::map<Index, std::vector<Index>> blocks;
  for (Index i = 0; i < degree; ++i) blocks[find(i)].push_back(i);
  Partition out;
  for (auto& [root, block] : blocks) out.push_back(std::move(block));
  return out;
}

Partition orbits(std::span<const Permutation> generators) {
  if (generators.empty()) return {};
  return orbits(generators, generators.front().degree());
}

Permutation product_action(std::span<const std::pair<Index, Index>> pairs, const Permutation& p,
                           const Permutation& q) {
  std::map<std::pair<Index, Index>, Index> position;
  for (Index k = 0; k < pairs.size(); ++k) position.emplace(pairs[k], k);
  std::vector<Index> im(pairs.size());
  for (Index k = 0; k < pairs.size(); ++k) {
    auto [i, j] = pairs[k];
    if (i >= p.degree() || j >= q.degree()) throw ClosureError("product_action: pair index out of range");
    auto it = position.find({p(i), q(j)});
    if (it == position.end()) {
      throw ClosureError("product_action: pair set is not closed under the action");
    }
    im[k] = it->second;
  }
  return Permutation(std::move(im));
}

bool verifies_conjugacy(const Permutation& r, std::span<const Permutation> tuple_a,
                        std::span<const Permutation> tuple_b) {
  if (tuple_a.size() != tuple_b.size()) return false;
  for (std::size_t k = 0; k < tuple_a.size(); ++k) {
    if (r.degree() != tuple_a[k].degree() || r.degree() != tuple_b[k].degree()) return false;
    if (compose(r, tuple_a[k]) != compose(tuple_b[k], r)) return false;
  }
  return true;
}

namespace {

constexpr Index kUnset = static_cast<Index>(-1);

// Local invariant of a point: size of its orbit plus the cycle length through
// it for every generator. Conjugation must preserve it pointwise.
std::vector<std::vector<Index>> point_signatures(std::span<const Permutation> tuple, const Partition& orb,
                                                 Index degree) {
  std::vector<std::vector<Index>> sig(degree);
  for (const auto& block : orb) {
    for (Index x : block) sig[x].push_back(block.size());
  }
  for (const auto& g : tuple) {
    std::vector<Index> len(degree, 0);
    for (const auto& c : cycles(g)) {
      for (Index x : c) len[x] = c.size();
    }
    for (Index x = 0; x < degree; ++x) sig[x].push_back(len[x]);
  }
  return sig;
}

struct ConjugacySearch {
  std::span<const Permutation> a, b;
  Index degree;
  Partition orbits_a;
  std::vector<Index> orbit_of_b;
  std::vector<std::vector<Index>> sig_a, sig_b;
  std::vector<Index> image, preimage;
  std::vector<bool> b_orbit_used;
  std::size_t nodes = 0, budget = 0;

  // Extends r(x0) = y0 through the orbit of x0. Returns the assigned points
  // on success, or nullopt after rolling back on conflict.
  std::optional<std::vector<Index>> propagate(Index x0, Index y0) {
    std::vector<Index> assigned;
    auto rollback = [&]() {
      for (Index x : assigned) {
        preimage[image[x]] = kUnset;
        image[x] = kUnset;
      }
    };
    auto assign = [&](Index x, Index y) {
      if (image[x] != kUnset) return image[x] == y;
      if (preimage[y] != kUnset) return false;
      if (sig_a[x] != sig_b[y]) return false;
      image[x] = y;
      preimage[y] = x;
      assigned.push_back(x);
      return true;
    };
    if (!assign(x0, y0)) {
      rollback();
      return std::nullopt;
    }
    for (std::size_t head = 0; head < assigned.size(); ++head) {
      Index x = assigned[head];
      for (std::size_t k = 0; k < a.size(); ++k) {
        if (!assign(a[k](x), b[k](image[x]))) {
          rollback();
          return std::nullopt;
        }
      }
    }
    return assigned;
  }

  bool search(std::size_t orbit_idx) {
    if (orbit_idx == orbits_a.size()) return true;
    if (++nodes > budget) throw ConjugacySearchTimeout("are_simultaneously_conjugate: node budget exhausted");
    Index x0 = orbits_a[orbit_idx].front();
    for (Index y0 = 0; y0 < degree; ++y0) {
      if (preimage[y0] != kUnset || b_orbit_used[orbit_of_b[y0]] || sig_a[x0] != sig_b[y0]) continue;
      auto assigned = propagate(x0, y0);
      if (!assigned) continue;
      b_orbit_used[orbit_of_b[y0]] = true;
      if (search(orbit_idx + 1)) return true;
      b_orbit_used[orbit_of_b[y0]] = false;
      for (Index x : *assigned) {
        preimage[image[x]] = kUnset;
        image[x] = kUnset;
      }
    }
    return false;
  }
};

}  // namespace

std::optional<Permutation> are_simultaneously_conjugate(std::span<const Permutation> tuple_a,
                                                        std::span<const Permutation> tuple_b,
                                                        std::size_t node_budget) {
  if (tuple_a.size() != tuple_b.size()) throw std::invalid_argument("are_simultaneously_conjugate: length mismatch");
  if (tuple_a.empty()) return std::nullopt;
  const Index degree = tuple_a.front().degree();
  for (std::size_t k = 0; k < tuple_a.size(); ++k) {
    if (tuple_a[k].degree() != degree || tuple_b[k].degree() != degree) {
      throw std::invalid_argument("are_simultaneously_conjugate: degree mismatch");
    }
    if (cycle_type(tuple_a[k]) != cycle_type(tuple_b[k])) return std::nullopt;
  }

  ConjugacySearch s{tuple_a, tuple_b, degree, orbits(tuple_a, degree), {}, {}, {}, {}, {}, {}, 0, node_budget};
  Partition orbits_b = orbits(tuple_b, degree);
  if (s.orbits_a.size() != orbits_b.size()) return std::nullopt;
  s.orbit_of_b.assign(degree, 0);
  for (Index o = 0; o < orbits_b.size(); ++o) {
    for (Index y : orbits_b[o]) s.orbit_of_b[y] = o;
  }
  s.sig_a = point_signatures(tuple_a, s.orbits_a, degree);
  s.sig_b = point_signatures(tuple_b, orbits_b, degree);
  {
    auto sa = s.sig_a, sb = s.sig_b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa != sb) return std::nullopt;
  }
  s.image.assign(degree, kUnset);
  s.preimage.assign(degree, kUnset);
  s.b_orbit_used.assign(orbits_b.size(), false);
  // Larger orbits first: they constrain the search the most.
  std::stable_sort(s.orbits_a.begin(), s.orbits_a.end(),
                   [](const auto& x, const auto& y) { return x.size() > y.size(); });
  if (!s.search(0)) return std::nullopt;
  Permutation r(s.image);
  if (!verifies_conjugacy(r, tuple_a, tuple_b)) {
    throw std::logic_error("are_simultaneously_conjugate: produced relabeling does not verify");
  }
  return r;
}

}  // namespace prill
