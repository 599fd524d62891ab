#include "prill/homology.hpp"

#include <deque>
#include <stdexcept>

namespace prill {

namespace {

bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t q = 2; q * q <= n; ++q) {
    if (n % q == 0) return false;
  }
  return true;
}

std::int64_t mod(std::int64_t a, std::int64_t p) {
  a %= p;
  return a < 0 ? a + p : a;
}

std::int64_t inverse_mod(std::int64_t a, std::int64_t p) {
  // Fermat; p is prime and small.
  std::int64_t result = 1, base = mod(a, p), e = p - 2;
  while (e > 0) {
    if (e & 1) result = result * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return result;
}

}  // namespace

ClosedSurfaceHomology::ClosedSurfaceHomology(const Cover& c, std::uint32_t modulus, Index basepoint)
    : modulus_(modulus), basepoint_(basepoint), degree_(c.degree()), num_generators_(c.base().num_generators()) {
  if (!is_prime(modulus)) throw std::invalid_argument("closed_surface_homology: modulus must be prime");
  if (basepoint >= degree_) throw std::invalid_argument("closed_surface_homology: basepoint out of range");
  const Index genus = riemann_hurwitz_genus(c);  // throws if disconnected
  const std::int64_t p = modulus;
  const Index d = degree_, K = num_generators_;

  generators_.assign(c.monodromy().begin(), c.monodromy().end());
  for (const auto& g : generators_) inverses_.push_back(g.inverse());
  const auto& inverses = inverses_;

  // Breadth-first Schreier tree; forward edges before inverse edges, by generator.
  transversal_.assign(d, {});
  std::vector<bool> visited(d, false), tree_edge(d * K, false);
  std::deque<Index> queue{basepoint};
  visited[basepoint] = true;
  while (!queue.empty()) {
    Index x = queue.front();
    queue.pop_front();
    for (Index k = 0; k < K; ++k) {
      Index y = c.generator(k)(x);
      if (!visited[y]) {
        visited[y] = true;
        tree_edge[x * K + k] = true;
        transversal_[y] = transversal_[x];
        transversal_[y].push_back({k, false});
        queue.push_back(y);
      }
      Index z = inverses[k](x);
      if (!visited[z]) {
        visited[z] = true;
        tree_edge[z * K + k] = true;
        transversal_[z] = transversal_[x];
        transversal_[z].push_back({k, true});
        queue.push_back(z);
      }
    }
  }

  cotree_column_.assign(d * K, -1);
  Index m = 0;
  for (Index e = 0; e < d * K; ++e) {
    if (!tree_edge[e]) cotree_column_[e] = static_cast<std::int64_t>(m++);
  }

  // 2-cells: lifted relation at each vertex, plus one cap per cycle of each C_j.
  std::vector<std::vector<std::int64_t>> rows;
  auto add_edge = [&](std::vector<std::int64_t>& row, Index e, std::int64_t sign) {
    if (cotree_column_[e] >= 0) row[cotree_column_[e]] = mod(row[cotree_column_[e]] + sign, p);
  };
  const Word rel = surface_relation(c.base());
  for (Index x = 0; x < d; ++x) {
    std::vector<std::int64_t> row(m, 0);
    Index v = x;
    for (const auto& l : rel) {
      if (l.inverted) {
        Index u = inverses[l.generator](v);
        add_edge(row, u * K + l.generator, -1);
        v = u;
      } else {
        add_edge(row, v * K + l.generator, +1);
        v = c.generator(l.generator)(v);
      }
    }
    rows.push_back(std::move(row));
  }
  for (Index j = 0; j < c.base().points.size(); ++j) {
    Index k = c.point_generator(j);
    for (const auto& cyc : cycles(c.point_monodromy(j))) {
      std::vector<std::int64_t> row(m, 0);
      for (Index x : cyc) add_edge(row, x * K + k, +1);
      rows.push_back(std::move(row));
    }
  }

  boundaries_.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m));
  for (Index r = 0; r < rows.size(); ++r) {
    for (Index col = 0; col < m; ++col) boundaries_(r, col) = rows[r][col];
  }

  // Reduced row echelon form over F_p.
  Eigen::Index pivot_row = 0;
  for (Index col = 0; col < m && pivot_row < boundaries_.rows(); ++col) {
    Eigen::Index sel = -1;
    for (Eigen::Index r = pivot_row; r < boundaries_.rows(); ++r) {
      if (boundaries_(r, col) != 0) {
        sel = r;
        break;
      }
    }
    if (sel < 0) continue;
    boundaries_.row(sel).swap(boundaries_.row(pivot_row));
    const std::int64_t inv = inverse_mod(boundaries_(pivot_row, col), p);
    for (Index cc = 0; cc < m; ++cc) boundaries_(pivot_row, cc) = boundaries_(pivot_row, cc) * inv % p;
    for (Eigen::Index r = 0; r < boundaries_.rows(); ++r) {
      if (r == pivot_row || boundaries_(r, col) == 0) continue;
      const std::int64_t f = boundaries_(r, col);
      for (Index cc = 0; cc < m; ++cc) {
        boundaries_(r, cc) = mod(boundaries_(r, cc) - f * boundaries_(pivot_row, cc), p);
      }
    }
    pivot_columns_.push_back(col);
    ++pivot_row;
  }
  boundaries_.conservativeResize(pivot_row, Eigen::NoChange);
  std::vector<bool> is_pivot(m, false);
  for (Index col : pivot_columns_) is_pivot[col] = true;
  for (Index col = 0; col < m; ++col) {
    if (!is_pivot[col]) free_columns_.push_back(col);
  }
  rank_ = free_columns_.size();
  if (rank_ != 2 * genus) {
    throw std::logic_error("closed_surface_homology: rank " + std::to_string(rank_) + " differs from 2*genus = " +
                           std::to_string(2 * genus));
  }

  edge_class_.assign(d * K, Class(rank_, 0));
  for (Index e = 0; e < d * K; ++e) {
    if (cotree_column_[e] < 0) continue;
    std::vector<std::int64_t> chain(m, 0);
    chain[cotree_column_[e]] = 1;
    edge_class_[e] = reduce(std::move(chain));
  }
}

ClosedSurfaceHomology::Class ClosedSurfaceHomology::reduce(std::vector<std::int64_t> chain) const {
  const std::int64_t p = modulus_;
  for (Index r = 0; r < pivot_columns_.size(); ++r) {
    const std::int64_t f = chain[pivot_columns_[r]];
    if (f == 0) continue;
    for (Index col = 0; col < chain.size(); ++col) {
      chain[col] = mod(chain[col] - f * boundaries_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)), p);
    }
  }
  Class out;
  out.reserve(free_columns_.size());
  for (Index col : free_columns_) out.push_back(static_cast<std::uint32_t>(chain[col]));
  return out;
}

ClosedSurfaceHomology::Class ClosedSurfaceHomology::add(const Class& a, const Class& b) const {
  Class out(a.size());
  for (Index i = 0; i < a.size(); ++i) out[i] = (a[i] + b[i]) % modulus_;
  return out;
}

ClosedSurfaceHomology::Class ClosedSurfaceHomology::class_of_word(const Word& w) const {
  Class acc(rank_, 0);
  Index v = basepoint_;
  for (const auto& l : w) {
    if (l.generator >= num_generators_) throw std::invalid_argument("class_of_word: generator out of range");
    if (l.inverted) {
      Index u = inverses_[l.generator](v);
      const Class& h = edge_class(u, l.generator);
      for (Index i = 0; i < rank_; ++i) acc[i] = (acc[i] + modulus_ - h[i]) % modulus_;
      v = u;
    } else {
      acc = add(acc, edge_class(v, l.generator));
      v = generators_[l.generator](v);
    }
  }
  if (v != basepoint_) throw std::invalid_argument("class_of_word: word does not fix the basepoint");
  return acc;
}


std::pair<Cover, CoverMap> mul3_torsor_cover(const Cover& e, Index basepoint) {
  if (!is_connected(e)) throw CoverError("mul3_torsor_cover: input cover is not connected");
  if (riemann_hurwitz_genus(e) != 1) throw CoverError("mul3_torsor_cover: input cover must have genus 1");
  ClosedSurfaceHomology h(e, 3, basepoint);
  const Index d = e.degree();
  std::vector<Permutation> mono;
  for (Index k = 0; k < e.base().num_generators(); ++k) {
    std::vector<Index> im(9 * d);
    for (Index x = 0; x < d; ++x) {
      const auto& shift = h.edge_class(x, k);
      const Index y = e.generator(k)(x);
      for (Index v0 = 0; v0 < 3; ++v0) {
        for (Index v1 = 0; v1 < 3; ++v1) {
          im[9 * x + 3 * v0 + v1] = 9 * y + 3 * ((v0 + shift[0]) % 3) + (v1 + shift[1]) % 3;
        }
      }
    }
    mono.emplace_back(std::move(im));
  }
  Cover up(e.base(), 9 * d, std::move(mono));
  std::vector<Index> fm(9 * d);
  for (Index i = 0; i < fm.size(); ++i) fm[i] = i / 9;
  CoverMap proj{up, e, std::move(fm)};
  return {std::move(up), std::move(proj)};
}

}  // namespace prill
