#include "heatlab/norms.hpp"

#include <algorithm>

namespace heatlab {

double lp_norm(const Field& f, double p) {
  require(p >= 1.0, "lp_norm: p must be >= 1");
  double cell = f.grid.cell();
  double s = pairwise_sum_f(f.grid.size(),
                            [&](std::size_t n) { return std::pow(f.abs_at(n), p); });
  return std::pow(cell * s, 1.0 / p);
}

double lp_norm_weighted(const Field& f, double p, const Field& w) {
  require(p >= 1.0, "lp_norm: p must be >= 1");
  require(w.grid == f.grid && w.ell == 1, "lp_norm: weight must be scalar on the same grid");
  double cell = f.grid.cell();
  double s = pairwise_sum_f(f.grid.size(), [&](std::size_t n) {
    return std::pow(f.abs_at(n), p) * w.at(0, n);
  });
  return std::pow(cell * s, 1.0 / p);
}

double sup_norm(const Field& f) {
  double m = 0.0;
  for (std::size_t n = 0; n < f.grid.size(); ++n) m = std::max(m, f.abs_at(n));
  return m;
}

double lorentz_from_pairs(std::vector<ValueMass> pairs, double p, double q) {
  require(p > 0.0, "lorentz: p must be > 0");
  require(q > 0.0, "lorentz: q must be > 0 (or infinity)");
  std::erase_if(pairs, [](const ValueMass& v) { return v.value == 0.0 || v.mass == 0.0; });
  for (const auto& v : pairs)
    require(v.value > 0.0 && v.mass > 0.0 && std::isfinite(v.value) && std::isfinite(v.mass),
            "lorentz: values and masses must be positive and finite");
  if (pairs.empty()) return 0.0;
  std::sort(pairs.begin(), pairs.end(),
            [](const ValueMass& a, const ValueMass& b) { return a.value > b.value; });
  // merge equal values
  std::size_t out = 0;
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (pairs[i].value == pairs[out].value)
      pairs[out].mass += pairs[i].mass;
    else
      pairs[++out] = pairs[i];
  }
  pairs.resize(out + 1);

  double M = 0.0;
  if (std::isinf(q)) {
    double best = 0.0;
    for (const auto& v : pairs) {
      M += v.mass;
      best = std::max(best, v.value * std::pow(M, 1.0 / p));
    }
    return best;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    M += pairs[i].mass;
    double tnext = i + 1 < pairs.size() ? pairs[i + 1].value : 0.0;
    s += std::pow(M, q / p) * (std::pow(pairs[i].value, q) - std::pow(tnext, q));
  }
  return std::pow(p / q * s, 1.0 / q);
}

namespace {

std::vector<ValueMass> node_pairs(const Field& f, const std::uint8_t* mask, std::uint8_t region,
                                  const Field* w) {
  std::vector<ValueMass> pairs;
  double cell = f.grid.cell();
  pairs.reserve(f.grid.size());
  for (std::size_t n = 0; n < f.grid.size(); ++n) {
    if (mask && mask[n] != region) continue;
    double m = w ? cell * w->at(0, n) : cell;
    require(m >= 0.0, "lorentz: weight must be >= 0");
    pairs.push_back({f.abs_at(n), m});
  }
  return pairs;
}

}  // namespace

double lorentz_norm(const Field& f, double p, double q) {
  return lorentz_from_pairs(node_pairs(f, nullptr, 0, nullptr), p, q);
}

double lorentz_norm_region(const Field& f, double p, double q,
                           std::span<const std::uint8_t> mask) {
  require(mask.size() == f.grid.size(), "lorentz: mask size mismatch");
  return lorentz_from_pairs(node_pairs(f, mask.data(), 1, nullptr), p, q);
}

double lorentz_norm_weighted(const Field& f, double p, double q, const Field& w) {
  require(w.grid == f.grid && w.ell == 1, "lorentz: weight must be scalar on the same grid");
  return lorentz_from_pairs(node_pairs(f, nullptr, 0, &w), p, q);
}

double lorentz_split_defect(const Field& f, double p, double q,
                            std::span<const std::uint8_t> region_of_node, int nregions) {
  require(region_of_node.size() == f.grid.size(), "split defect: mask size mismatch");
  require(nregions >= 1, "split defect: need at least one region");
  for (std::uint8_t r : region_of_node)
    require(r < nregions, "split defect: region index out of range");
  double total = lorentz_norm(f, p, q);
  double split = 0.0;
  for (int r = 0; r < nregions; ++r)
    split += lorentz_from_pairs(
        node_pairs(f, region_of_node.data(), static_cast<std::uint8_t>(r), nullptr), p, q);
  return split - total;
}

double BesovTerms::weighted_sum(double A, double sigma) const {
  return pairwise_sum_f(terms.size(), [&](std::size_t i) {
    return std::pow(A, sigma * (kmin + static_cast<int>(i))) * terms[i];
  });
}

BesovTerms besov_lorentz_terms(const Field& f, double p, double q, const BandFilter& filter) {
  BesovTerms out;
  out.kmin = min_active_band(f.grid, filter);
  out.kmax = max_resolvable_band(f.grid, filter);
  require(out.kmin <= out.kmax, "besov: grid resolves no bands");
  for (int k = out.kmin; k <= out.kmax; ++k)
    out.terms.push_back(lorentz_norm(besov_band(f, k, filter), p, q));
  return out;
}

}  // namespace heatlab
