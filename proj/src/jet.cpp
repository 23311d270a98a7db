#include "levilab/jet.hpp"

#include <map>
#include <mutex>
#include <utility>

namespace levilab {

namespace {

void enumerate_degree(int num_vars, int degree, int var, std::vector<int>& current,
                      std::vector<std::vector<int>>& out) {
  if (var == num_vars - 1) {
    current[var] = degree;
    out.push_back(current);
    return;
  }
  for (int e = degree; e >= 0; --e) {
    current[var] = e;
    enumerate_degree(num_vars, degree - e, var + 1, current, out);
  }
}

}  // namespace

std::shared_ptr<const MonomialBasis> MonomialBasis::get(int num_vars, int order) {
  if (num_vars < 1 || order < 0) throw std::invalid_argument("MonomialBasis: bad shape");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const MonomialBasis>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{num_vars, order}];
  if (!slot) slot = std::make_shared<const MonomialBasis>(num_vars, order);
  return slot;
}

MonomialBasis::MonomialBasis(int num_vars, int order) : num_vars_(num_vars), order_(order) {
  std::vector<int> current(num_vars, 0);
  for (int d = 0; d <= order; ++d) {
    enumerate_degree(num_vars, d, 0, current, exponents_);
    degree_end_.push_back(static_cast<int>(exponents_.size()));
  }
  int stride = 1;
  for (int a = 0; a < num_vars; ++a) stride *= (order + 1);
  lookup_.assign(stride, -1);
  for (int i = 0; i < size(); ++i) {
    int key = 0, mul = 1, deg = 0;
    for (int a = 0; a < num_vars; ++a) {
      key += exponents_[i][a] * mul;
      mul *= (order + 1);
      deg += exponents_[i][a];
      exponents_flat_.push_back(static_cast<std::uint8_t>(exponents_[i][a]));
    }
    lookup_[key] = i;
    degrees_.push_back(deg);
  }

  std::vector<int> sum(num_vars);
  for (int i = 0; i < size(); ++i) {
    for (int j = 0; j < size(); ++j) {
      if (degrees_[i] + degrees_[j] > order) break;  // graded: later j only larger
      for (int a = 0; a < num_vars; ++a) sum[a] = exponents_[i][a] + exponents_[j][a];
      products_.push_back({i, j, index_of(sum)});
    }
  }

  if (order >= 1) {
    const int lower = degree_end_[order - 1];
    derivative_.resize(num_vars);
    for (int a = 0; a < num_vars; ++a) {
      derivative_[a].reserve(lower);
      for (int i = 0; i < lower; ++i) {
        std::vector<int> e = exponents_[i];
        const double factor = e[a] + 1;
        e[a] += 1;
        derivative_[a].push_back({index_of(e), factor});
      }
    }
  }
}

int MonomialBasis::index_of(std::span<const int> exponent) const {
  if (static_cast<int>(exponent.size()) != num_vars_) return -1;
  int key = 0, mul = 1, deg = 0;
  for (int a = 0; a < num_vars_; ++a) {
    if (exponent[a] < 0 || exponent[a] > order_) return -1;
    key += exponent[a] * mul;
    mul *= (order_ + 1);
    deg += exponent[a];
  }
  if (deg > order_) return -1;
  return lookup_[key];
}

}  // namespace levilab
