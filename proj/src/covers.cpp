#include "prill/covers.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace prill {

std::optional<Index> MarkedBase::find(const std::string& label) const {
  for (Index j = 0; j < points.size(); ++j) {
    if (points[j].label == label) return j;
  }
  return std::nullopt;
}

void validate_base(const MarkedBase& base) {
  std::set<std::string> seen;
  for (const auto& p : base.points) {
    if (!seen.insert(p.label).second) throw CoverError("marked point label '" + p.label + "' is not unique");
  }
}

Word surface_relation(const MarkedBase& base) {
  Word w;
  for (Index i = 0; i < base.genus; ++i) {
    Index a = 2 * i, b = 2 * i + 1;
    w.push_back({a, false});
    w.push_back({b, false});
    w.push_back({a, true});
    w.push_back({b, true});
  }
  for (Index j = 0; j < base.points.size(); ++j) w.push_back({2 * base.genus + j, false});
  return w;
}

Cover::Cover(MarkedBase base, Index degree, std::vector<Permutation> monodromy)
    : base_(std::move(base)), degree_(degree), monodromy_(std::move(monodromy)) {
  if (monodromy_.size() != base_.num_generators()) {
    throw CoverError("Cover: expected " + std::to_string(base_.num_generators()) + " generators, got " +
                     std::to_string(monodromy_.size()));
  }
  for (const auto& p : monodromy_) {
    if (p.degree() != degree_) throw CoverError("Cover: generator degree differs from cover degree");
  }
}

Index Cover::act(Index x, const Word& word) const {
  for (const auto& l : word) {
    const auto& g = monodromy_.at(l.generator);
    if (l.inverted) {
      auto im = g.images();
      x = static_cast<Index>(std::find(im.begin(), im.end(), x) - im.begin());
    } else {
      x = g(x);
    }
  }
  return x;
}

Cover trivial_cover(const MarkedBase& base) {
  return Cover(base, 1, std::vector<Permutation>(base.num_generators(), Permutation::identity(1)));
}

std::optional<Violation> validate_cover(const Cover& c) {
  std::set<std::string> seen;
  for (const auto& p : c.base().points) {
    if (!seen.insert(p.label).second) return Violation{"duplicate marked point label '" + p.label + "'", {}};
  }
  if (c.monodromy().size() != c.base().num_generators()) return Violation{"generator count mismatch", {}};
  for (Index k = 0; k < c.monodromy().size(); ++k) {
    if (c.generator(k).degree() != c.degree()) return Violation{"generator has wrong degree", k};
  }
  // Evaluate the relation one generator at a time so the first offending
  // prefix can be named.
  Permutation acc = Permutation::identity(c.degree());
  const Word rel = surface_relation(c.base());
  for (const auto& l : rel) {
    const auto& g = c.generator(l.generator);
    acc = compose(l.inverted ? g.inverse() : g, acc);
  }
  if (!acc.is_identity()) {
    std::ostringstream os;
    os << "surface relation fails: product of generators is " << acc.to_string();
    std::optional<Index> culprit;
    if (!rel.empty()) culprit = rel.back().generator;
    return Violation{os.str(), culprit};
  }
  return std::nullopt;
}

bool is_connected(const Cover& c) {
  if (c.degree() == 0) return false;
  return orbits(c.monodromy(), c.degree()).size() == 1;
}

long euler_characteristic(const Cover& c) {
  long chi = static_cast<long>(c.degree()) * (2 - 2 * static_cast<long>(c.base().genus));
  for (Index j = 0; j < c.base().points.size(); ++j) {
    chi -= static_cast<long>(c.degree() - cycle_type(c.point_monodromy(j)).num_cycles());
  }
  return chi;
}

Index riemann_hurwitz_genus(const Cover& c) {
  if (!is_connected(c)) throw CoverError("riemann_hurwitz_genus: cover is not connected");
  long chi = euler_characteristic(c);
  if ((2 - chi) % 2 != 0 || 2 - chi < 0) {
    throw CoverError("riemann_hurwitz_genus: non-integral genus (chi = " + std::to_string(chi) + ")");
  }
  return static_cast<Index>((2 - chi) / 2);
}

std::vector<CycleType> ramification_profile(const Cover& c) {
  std::vector<CycleType> out;
  for (Index j = 0; j < c.base().points.size(); ++j) out.push_back(cycle_type(c.point_monodromy(j)));
  return out;
}

std::vector<Index> fiber_sizes(const CoverMap& m) {
  std::vector<Index> sizes(m.target.degree(), 0);
  for (Index y : m.fiber_map) {
    if (y >= sizes.size()) throw CoverError("fiber map points outside target fiber");
    ++sizes[y];
  }
  return sizes;
}

std::optional<Violation> validate_cover_map(const CoverMap& m) {
  if (!(m.source.base() == m.target.base())) return Violation{"source and target bases differ", {}};
  if (m.fiber_map.size() != m.source.degree()) return Violation{"fiber map has wrong length", {}};
  for (Index y : m.fiber_map) {
    if (y >= m.target.degree()) return Violation{"fiber map points outside target fiber", {}};
  }
  auto sizes = fiber_sizes(m);
  if (m.target.degree() == 0 || m.source.degree() % m.target.degree() != 0) {
    return Violation{"source degree is not a multiple of target degree", {}};
  }
  Index expected = m.source.degree() / m.target.degree();
  for (Index s : sizes) {
    if (s != expected) return Violation{"fibers of the fiber map have unequal sizes", {}};
  }
  for (Index k = 0; k < m.source.monodromy().size(); ++k) {
    const auto& gs = m.source.generator(k);
    const auto& gt = m.target.generator(k);
    for (Index x = 0; x < m.source.degree(); ++x) {
      if (m.fiber_map[gs(x)] != gt(m.fiber_map[x])) return Violation{"fiber map is not equivariant", k};
    }
  }
  return std::nullopt;
}

Index map_degree(const CoverMap& m) {
  if (m.target.degree() == 0) throw CoverError("map_degree: empty target");
  return m.source.degree() / m.target.degree();
}

namespace {

std::vector<Index> orbit_lengths(const Permutation& p) {
  std::vector<Index> len(p.degree(), 0);
  for (const auto& c : cycles(p)) {
    for (Index x : c) len[x] = c.size();
  }
  return len;
}

}  // namespace

bool relative_ramification_ok(const CoverMap& m, Index point_index) {
  if (point_index >= m.source.base().points.size()) {
    throw std::out_of_range("relative_ramification_ok: marked point index out of range");
  }
  auto src = orbit_lengths(m.source.point_monodromy(point_index));
  auto tgt = orbit_lengths(m.target.point_monodromy(point_index));
  for (Index x = 0; x < src.size(); ++x) {
    if (src[x] != tgt[m.fiber_map[x]]) return false;
  }
  return true;
}

bool is_etale(const CoverMap& m) {
  for (Index j = 0; j < m.source.base().points.size(); ++j) {
    if (!relative_ramification_ok(m, j)) return false;
  }
  return true;
}

CoverMap identity_map(const Cover& c) {
  std::vector<Index> fm(c.degree());
  for (Index i = 0; i < fm.size(); ++i) fm[i] = i;
  return CoverMap{c, c, std::move(fm)};
}

CoverMap compose_maps(const CoverMap& outer, const CoverMap& inner) {
  if (inner.target.degree() != outer.source.degree()) throw CoverError("compose_maps: maps are not composable");
  std::vector<Index> fm(inner.source.degree());
  for (Index x = 0; x < fm.size(); ++x) fm[x] = outer.fiber_map[inner.fiber_map[x]];
  return CoverMap{inner.source, outer.target, std::move(fm)};
}

std::vector<FiberProductComponent> fiber_product(const CoverMap& a, const CoverMap& b) {
  if (!(a.target.base() == b.target.base()) || a.target.degree() != b.target.degree() ||
      !std::equal(a.target.monodromy().begin(), a.target.monodromy().end(), b.target.monodromy().begin())) {
    throw CoverError("fiber_product: maps do not share a target cover");
  }
  if (!(a.source.base() == a.target.base()) || !(b.source.base() == b.target.base())) {
    throw CoverError("fiber_product: mismatched bases");
  }
  std::vector<std::pair<Index, Index>> pairs;
  for (Index i = 0; i < a.source.degree(); ++i) {
    for (Index j = 0; j < b.source.degree(); ++j) {
      if (a.fiber_map[i] == b.fiber_map[j]) pairs.emplace_back(i, j);
    }
  }
  const Index ngen = a.source.base().num_generators();
  std::vector<Permutation> action;
  for (Index k = 0; k < ngen; ++k) action.push_back(product_action(pairs, a.source.generator(k), b.source.generator(k)));

  std::vector<FiberProductComponent> out;
  for (const auto& block : orbits(action, pairs.size())) {
    // block is sorted, so local labels follow the global pair order.
    std::map<Index, Index> local;
    for (Index t = 0; t < block.size(); ++t) local[block[t]] = t;
    std::vector<Permutation> mono;
    for (Index k = 0; k < ngen; ++k) {
      std::vector<Index> im(block.size());
      for (Index t = 0; t < block.size(); ++t) im[t] = local.at(action[k](block[t]));
      mono.emplace_back(std::move(im));
    }
    FiberProductComponent comp;
    comp.cover = Cover(a.source.base(), block.size(), std::move(mono));
    std::vector<Index> fa, fb;
    for (Index pos : block) {
      comp.pairs.push_back(pairs[pos]);
      fa.push_back(pairs[pos].first);
      fb.push_back(pairs[pos].second);
    }
    comp.to_first = CoverMap{comp.cover, a.source, std::move(fa)};
    comp.to_second = CoverMap{comp.cover, b.source, std::move(fb)};
    out.push_back(std::move(comp));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.cover.degree() != y.cover.degree()) return x.cover.degree() < y.cover.degree();
    return x.pairs.front() < y.pairs.front();
  });
  return out;
}

Cover refine_marked_points(const Cover& c, std::span<const MarkedPoint> extra) {
  MarkedBase base = c.base();
  for (const auto& p : extra) {
    if (base.find(p.label)) throw CoverError("refine_marked_points: duplicate label '" + p.label + "'");
    base.points.push_back(p);
  }
  std::vector<Permutation> mono(c.monodromy().begin(), c.monodromy().end());
  mono.resize(base.num_generators(), Permutation::identity(c.degree()));
  return Cover(std::move(base), c.degree(), std::move(mono));
}

Cover forget_marked_points(const Cover& c, std::span<const std::string> labels) {
  std::set<std::string> drop(labels.begin(), labels.end());
  for (const auto& l : drop) {
    auto j = c.base().find(l);
    if (!j) throw CoverError("forget_marked_points: unknown label '" + l + "'");
    if (!c.point_monodromy(*j).is_identity()) {
      throw CoverError("forget_marked_points: point '" + l + "' has nontrivial monodromy");
    }
  }
  MarkedBase base{c.base().genus, {}};
  std::vector<Permutation> mono(c.monodromy().begin(), c.monodromy().begin() + 2 * c.base().genus);
  for (Index j = 0; j < c.base().points.size(); ++j) {
    if (drop.count(c.base().points[j].label)) continue;
    base.points.push_back(c.base().points[j]);
    mono.push_back(c.point_monodromy(j));
  }
  return Cover(std::move(base), c.degree(), std::move(mono));
}

Cover align_to_base(const Cover& c, const MarkedBase& base) {
  if (base.genus != c.base().genus) throw CoverError("align_to_base: genus mismatch");
  Index last = 0;
  for (Index j = 0; j < c.base().points.size(); ++j) {
    auto pos = base.find(c.base().points[j].label);
    if (!pos) throw CoverError("align_to_base: target base lacks point '" + c.base().points[j].label + "'");
    // Nontrivial generators must keep their relative order or the surface
    // relation changes.
    if (j > 0 && *pos < last) throw CoverError("align_to_base: target base reorders marked points");
    last = *pos;
  }
  std::vector<Permutation> mono(c.monodromy().begin(), c.monodromy().begin() + 2 * c.base().genus);
  for (const auto& p : base.points) {
    auto j = c.base().find(p.label);
    mono.push_back(j ? c.point_monodromy(*j) : Permutation::identity(c.degree()));
  }
  return Cover(base, c.degree(), std::move(mono));
}

}  // namespace prill
