#include "heatlab/spectral.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <fstream>
#include <map>
#include <sstream>

namespace heatlab {

namespace {

// One cached plan pair (+ workspace) per grid shape; single-threaded library.
struct PlanSet {
  fftw_plan fwd = nullptr, bwd = nullptr;
  std::vector<std::complex<double>> buf;
};

PlanSet& plans_for(const GridSpec& g) {
  static std::map<std::pair<int, int>, PlanSet> cache;
  auto key = std::make_pair(g.d, g.N);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  PlanSet ps;
  ps.buf.resize(g.size());
  int n[3] = {g.N, g.N, g.N};
  auto* ptr = reinterpret_cast<fftw_complex*>(ps.buf.data());
  ps.fwd = fftw_plan_dft(g.d, n, ptr, ptr, FFTW_FORWARD, FFTW_ESTIMATE);
  ps.bwd = fftw_plan_dft(g.d, n, ptr, ptr, FFTW_BACKWARD, FFTW_ESTIMATE);
  require(ps.fwd && ps.bwd, "FFTW plan creation failed");
  return cache.emplace(key, std::move(ps)).first->second;
}

int parity(const GridSpec& g, std::size_t bin) {
  int s = 0;
  for (int a = 0; a < g.d; ++a) {
    s += static_cast<int>(bin % g.N);
    bin /= g.N;
  }
  return s & 1;
}

}  // namespace

double bin_xi2(const GridSpec& g, std::size_t bin) {
  double x2 = 0.0;
  for (int a = 0; a < g.d; ++a) {
    std::int64_t n = bin_freq(static_cast<std::int64_t>(bin % g.N), g.N);
    bin /= g.N;
    x2 += sqr(n / (2.0 * g.L));
  }
  return x2;
}

Spectrum dft(const Field& f) {
  const GridSpec& g = f.grid;
  PlanSet& ps = plans_for(g);
  Spectrum out{g, f.ell, std::vector<std::complex<double>>(f.data.size())};
  double hd = g.cell();
  for (int c = 0; c < f.ell; ++c) {
    for (std::size_t i = 0; i < g.size(); ++i) ps.buf[i] = f.at(c, i);
    fftw_execute(ps.fwd);
    for (std::size_t i = 0; i < g.size(); ++i) {
      double phase = parity(g, i) ? -hd : hd;
      out.data[c * g.size() + i] = phase * ps.buf[i];
    }
  }
  return out;
}

Field idft(const Spectrum& s) {
  const GridSpec& g = s.grid;
  PlanSet& ps = plans_for(g);
  Field out(g, s.ell);
  double inv = 1.0 / (g.cell() * g.size());
  for (int c = 0; c < s.ell; ++c) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      double phase = parity(g, i) ? -1.0 : 1.0;
      ps.buf[i] = phase * s.data[c * g.size() + i];
    }
    fftw_execute(ps.bwd);
    for (std::size_t i = 0; i < g.size(); ++i) out.at(c, i) = ps.buf[i].real() * inv;
  }
  return out;
}

Field apply_radial_multiplier(const Field& f, const std::function<double(double)>& m) {
  const GridSpec& g = f.grid;
  PlanSet& ps = plans_for(g);
  // precompute per-bin multiplier once (shared across components)
  std::vector<double> mult(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) mult[i] = m(std::sqrt(bin_xi2(g, i)));
  Field out(g, f.ell);
  double inv = 1.0 / g.size();
  for (int c = 0; c < f.ell; ++c) {
    for (std::size_t i = 0; i < g.size(); ++i) ps.buf[i] = f.at(c, i);
    fftw_execute(ps.fwd);
    for (std::size_t i = 0; i < g.size(); ++i) ps.buf[i] *= mult[i];
    fftw_execute(ps.bwd);
    for (std::size_t i = 0; i < g.size(); ++i) out.at(c, i) = ps.buf[i].real() * inv;
  }
  return out;
}

RieszResult riesz_potential(const Field& f, double alpha) {
  require(alpha > 0.0 && alpha < f.grid.d, "Riesz exponent must lie in (0, d)");
  bool truncated = false;
  auto mass = quadrature(f);
  Field af = abs_field(f);
  double l1 = quadrature(af)[0];
  for (double mc : mass)
    if (std::abs(mc) > 1e-8 * std::max(l1, 1e-300)) truncated = true;
  Field out = apply_radial_multiplier(
      f, [alpha](double r) { return r == 0.0 ? 0.0 : std::pow(r, -alpha); });
  return {std::move(out), truncated};
}

double BandFilter::psi_hat(double r) const {
  if (r <= r0) return 1.0;
  if (r >= r1) return 0.0;
  double u = (r - r0) / (r1 - r0);  // in (0,1)
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

Field besov_band(const Field& f, int k, const BandFilter& filter) {
  require(filter.resolvable(f.grid, k), "unresolvable band");
  return apply_radial_multiplier(
      f, [&](double r) { return filter.band_multiplier(k, r); });
}

int max_resolvable_band(const GridSpec& g, const BandFilter& filter) {
  int k = 0;
  while (filter.resolvable(g, k + 1)) ++k;
  return k;
}

int min_active_band(const GridSpec& g, const BandFilter& filter) {
  // Band k vanishes on every nonzero grid frequency iff A^k r1 <= ximin
  // (both taper arguments sit past the filter support). First active k:
  double ximin = 1.0 / (2.0 * g.L);
  int k = static_cast<int>(std::floor(std::log(ximin / filter.r1) / std::log(filter.A))) - 2;
  while (std::pow(filter.A, k) * filter.r1 <= ximin) ++k;
  return k;
}

SymbolMap gradient_symbol(int d) {
  SymbolMap s;
  s.name = "gradient";
  s.d = d;
  s.ell = d;
  s.k = 1;
  s.basis = [d](const Vec3& zeta, double* b) {
    for (int i = 0; i < d; ++i) b[i] = zeta[i];
  };
  return s;
}

SymbolMap divfree_symbol() {
  SymbolMap s;
  s.name = "divfree";
  s.d = 2;
  s.ell = 2;
  s.k = 1;
  s.basis = [](const Vec3& zeta, double* b) {
    b[0] = -zeta[1];
    b[1] = zeta[0];
  };
  return s;
}

SymbolMap identity_symbol(int d, int ell) {
  SymbolMap s;
  s.name = "identity";
  s.d = d;
  s.ell = ell;
  s.k = ell;
  s.basis = [ell](const Vec3&, double* b) {
    for (int i = 0; i < ell * ell; ++i) b[i] = 0.0;
    for (int i = 0; i < ell; ++i) b[i * ell + i] = 1.0;
  };
  return s;
}

SymbolMap load_symbol_csv(const std::filesystem::path& path, int d, int ell, int k) {
  // rows: zeta_1..zeta_d, then the ell x k basis in column-major order
  std::ifstream is(path);
  require(is.good(), "cannot open symbol CSV: " + path.string());
  auto table = std::make_shared<std::vector<std::pair<Vec3, std::vector<double>>>>();
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> nums;
    while (std::getline(ss, tok, ',')) nums.push_back(std::stod(tok));
    require(static_cast<int>(nums.size()) == d + ell * k,
            "symbol CSV row has wrong arity: " + path.string());
    Vec3 z{0, 0, 0};
    for (int i = 0; i < d; ++i) z[i] = nums[i];
    table->emplace_back(z, std::vector<double>(nums.begin() + d, nums.end()));
  }
  require(!table->empty(), "symbol CSV has no data rows: " + path.string());
  SymbolMap s;
  s.name = "csv:" + path.filename().string();
  s.d = d;
  s.ell = ell;
  s.k = k;
  s.basis = [table, d, ell, k](const Vec3& zeta, double* b) {
    // nearest sampled direction
    std::size_t best = 0;
    double bestd = 1e300;
    for (std::size_t i = 0; i < table->size(); ++i) {
      double dd = dist2((*table)[i].first, zeta, d);
      if (dd < bestd) {
        bestd = dd;
        best = i;
      }
    }
    const auto& m = (*table)[best].second;
    for (int i = 0; i < ell * k; ++i) b[i] = m[i];
  };
  return s;
}

std::vector<Vec3> sphere_samples(int d, int M) {
  std::vector<Vec3> out;
  if (d == 1) {
    out.push_back({1, 0, 0});
    out.push_back({-1, 0, 0});
    return out;
  }
  require(M >= 2 * d, "need at least 2d sphere samples");
  if (d == 2) {
    for (int i = 0; i < M; ++i) {
      double a = 2.0 * M_PI * i / M;
      out.push_back({std::cos(a), std::sin(a), 0});
    }
    return out;
  }
  // Fibonacci lattice on S^2
  const double ga = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < M; ++i) {
    double z = 1.0 - 2.0 * (i + 0.5) / M;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    out.push_back({r * std::cos(ga * i), r * std::sin(ga * i), z});
  }
  return out;
}

CancelResult cancellation_defect(const SymbolMap& omega, int M) {
  auto zs = sphere_samples(omega.d, M);
  const int ell = omega.ell, k = omega.k;
  Eigen::MatrixXd stack(static_cast<Eigen::Index>(zs.size()) * ell, ell);
  Eigen::MatrixXd B(ell, k);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    omega.basis(zs[i], B.data());
    Eigen::JacobiSVD<Eigen::MatrixXd> bsvd(B, Eigen::ComputeThinU);
    if (bsvd.singularValues()(k - 1) <= 1e-10)
      throw assertion_error("symbol basis rank drop at a sphere sample");
    Eigen::MatrixXd U = bsvd.matrixU();
    Eigen::MatrixXd P = U * U.transpose();  // projection onto Omega(zeta)
    stack.block(static_cast<Eigen::Index>(i) * ell, 0, ell, ell) =
        Eigen::MatrixXd::Identity(ell, ell) - P;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack, Eigen::ComputeThinV);
  CancelResult r;
  r.samples = static_cast<int>(zs.size());
  r.defect = svd.singularValues()(ell - 1);
  r.stack_norm = svd.singularValues()(0);
  r.canceling = r.defect > 1e-8 * r.stack_norm;
  if (!r.canceling) {
    Eigen::VectorXd w = svd.matrixV().col(ell - 1);
    r.witness.assign(w.data(), w.data() + ell);
  }
  return r;
}

}  // namespace heatlab
