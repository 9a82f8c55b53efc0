#include "phi4/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

#include "phi4/multipliers.hpp"

namespace phi4 {

double DyadicPartition::theta(double r) const {
  return smooth_step_down(3.0 * (r - 1.0));
}

double DyadicPartition::weight(int j, double r) const {
  if (j < -1) return 0.0;
  if (j == -1) return chi(r);
  return phi(std::ldexp(r, -j));
}

int DyadicPartition::j_max(const TorusGrid& grid) const {
  return static_cast<int>(std::ceil(std::log2(std::sqrt(3.0) * grid.K / 0.75))) + 1;
}

DyadicPartition make_partition() { return {}; }

namespace {

// Sparse per-block multipliers on the mode cube of a given K. Every mode lies
// in at most two blocks.
struct BlockTable {
  struct Entry {
    std::size_t index;
    double weight;
  };
  int j_max = 0;
  std::vector<std::vector<Entry>> blocks;  // index j + 1
};

std::shared_ptr<const BlockTable> block_table(const TorusGrid& grid) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const BlockTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(grid.K); it != cache.end()) return it->second;

  const DyadicPartition part;
  auto t = std::make_shared<BlockTable>();
  t->j_max = part.j_max(grid);
  t->blocks.resize(t->j_max + 2);
  const FourierField probe(grid);
  for (std::size_t i = 0; i < grid.mode_count(); ++i) {
    const double r = std::sqrt(static_cast<double>(probe.mode_at(i).norm_sq()));
    for (int j = -1; j <= t->j_max; ++j) {
      const double w = part.weight(j, r);
      if (w != 0.0) t->blocks[j + 1].push_back({i, w});
    }
  }
  cache.emplace(grid.K, t);
  return t;
}

void require_same(const TorusGrid& a, const TorusGrid& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

void require_safe(const TorusGrid& g) {
  if (!g.cubic_safe()) {
    throw std::invalid_argument("paraproduct: grid M=" + std::to_string(g.M) +
                                " is not alias-free for K=" + std::to_string(g.K));
  }
}

}  // namespace

FourierField dyadic_block(const FourierField& F, int j) {
  if (j < -1) throw std::invalid_argument("dyadic_block: j must be >= -1");
  FourierField out(F.grid());
  const auto t = block_table(F.grid());
  if (j > t->j_max) return out;
  auto dst = out.coeffs_mut();
  auto src = F.coeffs();
  for (const auto& e : t->blocks[j + 1]) dst[e.index] = e.weight * src[e.index];
  return out;
}

BlockDecomposition::BlockDecomposition(const FourierField& F) : grid_(F.grid()) {
  const auto t = block_table(grid_);
  blocks_.resize(t->j_max + 2);
  nonempty_.assign(t->j_max + 2, false);
  auto src = F.coeffs();
  FourierField tmp(grid_);
  for (int j = -1; j <= t->j_max; ++j) {
    const auto& entries = t->blocks[j + 1];
    bool any = false;
    for (const auto& e : entries) {
      if (src[e.index] != cplx{0.0, 0.0}) {
        any = true;
        break;
      }
    }
    if (!any) continue;
    std::fill(tmp.coeffs_mut().begin(), tmp.coeffs_mut().end(), cplx{0.0, 0.0});
    auto dst = tmp.coeffs_mut();
    for (const auto& e : entries) dst[e.index] = e.weight * src[e.index];
    blocks_[j + 1] = inverse_transform(tmp);
    nonempty_[j + 1] = true;
  }
}

double besov_norm(const BlockDecomposition& D, const BesovSpec& spec) {
  if (!(spec.p >= 1.0) || !(spec.r >= 1.0)) {
    throw std::invalid_argument("besov_norm: p and r must be >= 1");
  }
  double acc = 0.0;
  for (int j = -1; j <= D.j_max(); ++j) {
    if (!D.nonempty(j)) continue;
    const double term = std::exp2(j * spec.s) * lp_norm(D.block(j), spec.p);
    if (std::isinf(spec.r)) {
      acc = std::max(acc, term);
    } else {
      acc += std::pow(term, spec.r);
    }
  }
  return std::isinf(spec.r) ? acc : std::pow(acc, 1.0 / spec.r);
}

double besov_norm(const FourierField& F, const BesovSpec& spec) {
  return besov_norm(BlockDecomposition(F), spec);
}

namespace {

// Running partial sum S_j over the nonempty blocks of one decomposition.
class PartialSum {
 public:
  PartialSum(const BlockDecomposition& d, kernels::Exec exec)
      : d_(d), exec_(exec), sum_(d.grid()) {}
  // Advance so that sum() == S_j.
  void advance_to(int j) {
    while (next_ < j) {
      if (next_ >= -1 && next_ <= d_.j_max() && d_.nonempty(next_)) {
        kernels::add(sum_.values_mut(), d_.block(next_).values(), exec_);
        touched_ = true;
      }
      ++next_;
    }
  }
  bool zero() const { return !touched_; }
  const RealField& sum() const { return sum_; }

 private:
  const BlockDecomposition& d_;
  kernels::Exec exec_;
  RealField sum_;
  int next_ = -1;
  bool touched_ = false;
};

// sum_{l >= 1} S_{l-1} f * Delta_l g  (= f < g)
RealField lt_physical(const BlockDecomposition& f, const BlockDecomposition& g,
                      kernels::Exec exec) {
  RealField acc(f.grid());
  PartialSum S(f, exec);
  for (int l = 0; l <= g.j_max(); ++l) {
    if (!g.nonempty(l)) continue;
    S.advance_to(l - 1);
    if (S.zero()) continue;
    kernels::multiply_accumulate(acc.values_mut(), S.sum().values(),
                                 g.block(l).values(), exec);
  }
  return acc;
}

RealField res_physical(const BlockDecomposition& f, const BlockDecomposition& g,
                       kernels::Exec exec) {
  RealField acc(f.grid());
  for (int j = -1; j <= f.j_max(); ++j) {
    if (!f.nonempty(j)) continue;
    for (int l = std::max(-1, j - 1); l <= std::min(g.j_max(), j + 1); ++l) {
      if (!g.nonempty(l)) continue;
      kernels::multiply_accumulate(acc.values_mut(), f.block(j).values(),
                                   g.block(l).values(), exec);
    }
  }
  return acc;
}

void check_pair(const BlockDecomposition& f, const BlockDecomposition& g) {
  require_same(f.grid(), g.grid(), "paraproduct");
  require_safe(f.grid());
}

}  // namespace

BonyParts bony_parts(const BlockDecomposition& f, const BlockDecomposition& g,
                     kernels::Exec exec) {
  check_pair(f, g);
  return {forward_transform(lt_physical(f, g, exec)),
          forward_transform(res_physical(f, g, exec)),
          forward_transform(lt_physical(g, f, exec))};
}

BonyParts bony_parts(const FourierField& f, const FourierField& g,
                     kernels::Exec exec) {
  require_same(f.grid(), g.grid(), "paraproduct");
  require_safe(f.grid());
  return bony_parts(BlockDecomposition(f), BlockDecomposition(g), exec);
}

FourierField para_lt(const BlockDecomposition& f, const BlockDecomposition& g) {
  check_pair(f, g);
  return forward_transform(lt_physical(f, g, kernels::Exec::parallel));
}

FourierField resonance(const BlockDecomposition& f, const BlockDecomposition& g) {
  check_pair(f, g);
  return forward_transform(res_physical(f, g, kernels::Exec::parallel));
}

FourierField para_lt(const FourierField& f, const FourierField& g) {
  require_same(f.grid(), g.grid(), "para_lt");
  require_safe(f.grid());
  return para_lt(BlockDecomposition(f), BlockDecomposition(g));
}

FourierField para_gt(const FourierField& f, const FourierField& g) {
  return para_lt(g, f);
}

FourierField resonance(const FourierField& f, const FourierField& g) {
  require_same(f.grid(), g.grid(), "resonance");
  require_safe(f.grid());
  return resonance(BlockDecomposition(f), BlockDecomposition(g));
}

FourierField para_leq(const FourierField& f, const FourierField& g) {
  auto p = bony_parts(f, g);
  return p.lt + p.res;
}

FourierField para_geq(const FourierField& f, const FourierField& g) {
  auto p = bony_parts(f, g);
  return p.gt + p.res;
}

}  // namespace phi4
