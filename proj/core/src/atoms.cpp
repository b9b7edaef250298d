#include "heatlab/atoms.hpp"

#include <algorithm>
#include <map>

namespace heatlab {

namespace {

template <class F>
void for_offsets(int d, int R, F&& f) {
  Idx3 o{0, 0, 0};
  if (d == 1) {
    for (o[0] = -R; o[0] <= R; ++o[0]) f(o);
  } else if (d == 2) {
    for (o[0] = -R; o[0] <= R; ++o[0])
      for (o[1] = -R; o[1] <= R; ++o[1]) f(o);
  } else {
    for (o[0] = -R; o[0] <= R; ++o[0])
      for (o[1] = -R; o[1] <= R; ++o[1])
        for (o[2] = -R; o[2] <= R; ++o[2]) f(o);
  }
}

std::string join_idx(const Idx3& j, int d) {
  std::string s = std::to_string(j[0]);
  for (int a = 1; a < d; ++a) s += "," + std::to_string(j[a]);
  return d > 1 ? "\"" + s + "\"" : s;
}

}  // namespace

Idx3 parent_cube(const Idx3& j, int d, int A) {
  Idx3 i{0, 0, 0};
  std::int64_t half = (A - 1) / 2;
  for (int a = 0; a < d; ++a) {
    std::int64_t num = j[a] + half;
    // floor division
    i[a] = num >= 0 ? num / A : -((-num + A - 1) / A);
  }
  return i;
}

AtomTable build_atom_table(const HeatLadder& ladder, const ProofParameters& params,
                           double tail_tol) {
  const GridSpec& g = ladder.grid();
  params.validate(g.d);
  require(params.A == ladder.A, "atom table: parameter A differs from the ladder A");
  require(ladder.K >= 3, "atom table: ladder too shallow (need K >= 3)");

  AtomTable table;
  table.params = params;
  table.d = g.d;

  const LatticeWeightEval& lw = shared_lattice_weight(g.d, params.theta1);
  int rc = 1;
  while (poly_decay(static_cast<double>(rc), params.theta1) > tail_tol) ++rc;
  table.truncation_radius = rc;
  double sd = g.d == 1 ? 2.0 : (g.d == 2 ? 2.0 * M_PI : 4.0 * M_PI);
  table.tail_bound = sd * std::pow(1.0 + rc, -(params.theta1 - g.d)) / (params.theta1 - g.d);

  const double cell = g.cell();
  for (int k = 0; k + 3 <= ladder.K; ++k) {
    double scale = std::pow(static_cast<double>(params.A), k);
    double tk = std::pow(static_cast<double>(params.A), -2 * k);
    double t4 = tk * (1.0 - std::pow(static_cast<double>(params.A), -4));
    double t6 = tk * (1.0 - std::pow(static_cast<double>(params.A), -6));

    JBox box;
    box.d = g.d;
    for (int a = 0; a < g.d; ++a) {
      box.lo[a] = static_cast<std::int64_t>(std::floor(-scale * g.L)) - rc - 1;
      box.hi[a] = static_cast<std::int64_t>(std::ceil(scale * g.L)) + rc + 1;
    }
    AtomLevel lvl(k, box);

    Field S0 = abs_field(ladder.level(k));
    Field S4 = heat_extend(abs_field(ladder.level(k + 2)), t4);
    Field S6 = heat_extend(abs_field(ladder.level(k + 3)), t6);
    // spectral heat of a nonnegative field dips below zero only by roundoff
    for (double& v : S4.data) v = std::max(v, 0.0);
    for (double& v : S6.data) v = std::max(v, 0.0);

    for (std::size_t n = 0; n < g.size(); ++n) {
      Vec3 x = g.node(n);
      Vec3 y{0, 0, 0};
      Idx3 base{0, 0, 0};
      for (int a = 0; a < g.d; ++a) {
        y[a] = scale * x[a];
        base[a] = std::llround(y[a]);
      }
      // one shared denominator per grid node (translation-invariant bitwise)
      double D = lw.denom(y);
      double s0 = S0.at(0, n), s4 = S4.at(0, n), s6 = S6.at(0, n);
      for_offsets(g.d, rc, [&](const Idx3& o) {
        Idx3 j = base;
        double r2 = 0.0;
        for (int a = 0; a < g.d; ++a) {
          j[a] += o[a];
          r2 += sqr(y[a] - static_cast<double>(j[a]));
        }
        double nw = poly_decay(std::sqrt(r2), params.theta1) / D;
        std::size_t idx = box.index(j);
        lvl.star0[idx] += s0 * nw;
        lvl.star[idx] += s4 * nw;
        lvl.star6[idx] += s6 * nw;
      });
    }
    for (std::size_t i = 0; i < box.size(); ++i) {
      lvl.star0[i] *= cell;
      lvl.star[i] *= cell;
      lvl.star6[i] *= cell;
    }

    classify_level(lvl, params.eps);
    compute_maximal(lvl, params.theta4);
    compute_saturation(lvl, params.Ksat);
    table.levels.push_back(std::move(lvl));
  }
  return table;
}

void classify_level(AtomLevel& lvl, double eps) {
  require(eps > 0.0, "classify: eps must be positive");
  for (std::size_t i = 0; i < lvl.box.size(); ++i) {
    if (lvl.star6[i] <= 0.0) {
      // zero atom: flat by convention, excluded from graph statistics
      lvl.degenerate[i] = 1;
      lvl.convex[i] = 0;
      continue;
    }
    lvl.degenerate[i] = 0;
    lvl.convex[i] = (lvl.star6[i] - lvl.star0[i] >= eps * lvl.star6[i]) ? 1 : 0;
  }
}

void compute_maximal(AtomLevel& lvl, double theta4) {
  require(theta4 > 0.0, "maximal: theta4 must be positive");
  const JBox& box = lvl.box;
  std::size_t n = box.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lvl.star[a] != lvl.star[b] ? lvl.star[a] > lvl.star[b] : a < b;
  });
  for (std::size_t jf = 0; jf < n; ++jf) {
    Idx3 j = box.at(jf);
    double bestv = -1.0;
    std::int64_t besti = -1;
    // sorted scan: once star_i < bestv no later i can improve (the decay
    // factor is <= 1); equal stars are still scanned for exact ties
    for (std::size_t s = 0; s < n; ++s) {
      std::size_t i = order[s];
      double si = lvl.star[i];
      if (si <= 0.0 || si < bestv) break;
      Idx3 ji = box.at(i);
      double r2 = 0.0;
      for (int a = 0; a < box.d; ++a) r2 += sqr(static_cast<double>(ji[a] - j[a]));
      double v = poly_decay(std::sqrt(r2), theta4) * si;
      if (v > bestv || (v == bestv && static_cast<std::int64_t>(i) < besti)) {
        bestv = v;
        besti = static_cast<std::int64_t>(i);
      }
    }
    lvl.maximal[jf] = bestv > 0.0 ? bestv : 0.0;
    lvl.argmax[jf] = besti;
  }
}

void compute_saturation(AtomLevel& lvl, int Ksat) {
  for (std::size_t i = 0; i < lvl.box.size(); ++i)
    lvl.saturated[i] = (lvl.maximal[i] <= Ksat * lvl.star[i]) ? 1 : 0;
}

HorizontalGraph build_horizontal_graph(const AtomLevel& lvl, double lambda, double theta4) {
  require(lambda >= 1.0, "horizontal graph: lambda must be >= 1");
  HorizontalGraph g;
  g.k = lvl.k;
  g.box = lvl.box;
  g.source_of.assign(lvl.box.size(), -1);
  for (std::size_t j = 0; j < lvl.box.size(); ++j) {
    std::int64_t s = lvl.argmax[j];
    if (s < 0 || static_cast<std::size_t>(s) == j) continue;
    // the exact argmax satisfies the lambda-selection inequality for any
    // lambda >= 1; assert it to catch stale maximal data
    Idx3 js = lvl.box.at(static_cast<std::size_t>(s)), jt = lvl.box.at(j);
    double r2 = 0.0;
    for (int a = 0; a < lvl.box.d; ++a) r2 += sqr(static_cast<double>(js[a] - jt[a]));
    double sel = lambda * poly_decay(std::sqrt(r2), theta4) * lvl.star[static_cast<std::size_t>(s)];
    if (lvl.maximal[j] > sel * (1.0 + 1e-12))
      throw assertion_error("horizontal graph: argmax violates the selection inequality");
    g.source_of[j] = s;
  }
  return g;
}

void verify_horizontal_graph(const HorizontalGraph& g, const AtomLevel& lvl) {
  for (std::size_t j = 0; j < g.source_of.size(); ++j) {
    std::int64_t s = g.source_of[j];
    if (s < 0) continue;
    if (static_cast<std::size_t>(s) == j)
      throw assertion_error("horizontal graph: self loop");
    if (g.source_of[static_cast<std::size_t>(s)] >= 0)
      throw assertion_error("horizontal graph: oriented path of length 2");
    if (!lvl.saturated[static_cast<std::size_t>(s)])
      throw assertion_error("horizontal graph: arrow source is not saturated");
  }
}

namespace {

bool is_vertex(const AtomLevel& lvl, std::size_t i) {
  return !lvl.convex[i] && !lvl.degenerate[i];
}

}  // namespace

VerticalForest build_vertical_forest(const AtomTable& table,
                                     const std::vector<HorizontalGraph>& graphs) {
  require(graphs.size() == table.levels.size(), "vertical forest: graph/level count mismatch");
  VerticalForest forest;
  std::map<std::pair<int, std::size_t>, int> indeg;
  for (std::size_t k = 0; k + 1 < table.levels.size(); ++k) {
    const AtomLevel& up = table.levels[k];
    const AtomLevel& dn = table.levels[k + 1];
    for (std::size_t jf = 0; jf < dn.box.size(); ++jf) {
      if (!is_vertex(dn, jf)) continue;
      Idx3 jp = dn.box.at(jf);
      Idx3 i = parent_cube(jp, table.d, table.params.A);
      if (!up.box.contains(i)) continue;
      std::size_t ifl = up.box.index(i);
      std::int64_t src = -1;
      if (up.saturated[ifl]) {
        if (is_vertex(up, ifl)) src = static_cast<std::int64_t>(ifl);
      } else {
        std::int64_t h = graphs[k].source_of[ifl];
        if (h >= 0 && is_vertex(up, static_cast<std::size_t>(h)) &&
            up.saturated[static_cast<std::size_t>(h)])
          src = h;
      }
      if (src < 0) continue;
      forest.arrows.push_back(
          {static_cast<int>(k), up.box.at(static_cast<std::size_t>(src)), jp});
      ++indeg[{static_cast<int>(k) + 1, jf}];
    }
  }
  for (std::size_t k = 0; k < table.levels.size(); ++k) {
    const AtomLevel& lvl = table.levels[k];
    for (std::size_t jf = 0; jf < lvl.box.size(); ++jf) {
      if (!is_vertex(lvl, jf)) continue;
      auto it = indeg.find({static_cast<int>(k), jf});
      if (it == indeg.end()) forest.roots.push_back({static_cast<int>(k), lvl.box.at(jf)});
    }
  }
  return forest;
}

void verify_vertical_forest(const VerticalForest& forest, const AtomTable& table) {
  std::map<std::pair<int, std::size_t>, int> indeg;
  for (const auto& a : forest.arrows) {
    require(a.k >= 0 && a.k + 1 < static_cast<int>(table.levels.size()),
            "vertical forest: arrow level out of range");
    const AtomLevel& up = table.levels[static_cast<std::size_t>(a.k)];
    const AtomLevel& dn = table.levels[static_cast<std::size_t>(a.k) + 1];
    std::size_t s = up.box.index(a.src), t = dn.box.index(a.dst);
    if (!is_vertex(up, s) || !up.saturated[s])
      throw assertion_error("vertical forest: source is not a saturated flat vertex");
    if (!is_vertex(dn, t)) throw assertion_error("vertical forest: target is not a vertex");
    if (++indeg[{a.k + 1, t}] > 1) throw assertion_error("vertical forest: in-degree exceeds 1");
  }
}

ConcentrationCheck concentration_check(const HeatLadder& ladder, int k, const Idx3& j, double C,
                                       const ProofParameters& params) {
  const GridSpec& g = ladder.grid();
  params.validate(g.d);
  require(k >= 0 && k + 2 <= ladder.K, "concentration: level out of range");
  const LatticeWeightEval& lw = shared_lattice_weight(g.d, params.theta1);
  double scale = std::pow(static_cast<double>(params.A), k);
  double t4 = std::pow(static_cast<double>(params.A), -2 * k) *
              (1.0 - std::pow(static_cast<double>(params.A), -4));

  Field F = abs_field(ladder.level(k + 2));
  Field H = heat_extend(F, t4);
  double cell = g.cell();
  double num = cell * pairwise_sum_f(g.size(), [&](std::size_t n) {
                 Vec3 x = g.node(n);
                 double r2 = 0.0;
                 for (int a = 0; a < g.d; ++a)
                   r2 += sqr(scale * x[a] - static_cast<double>(j[a]));
                 return F.at(0, n) * poly_decay(std::sqrt(r2), params.theta2);
               });
  double den = cell * pairwise_sum_f(g.size(), [&](std::size_t n) {
                 Vec3 x = g.node(n);
                 Vec3 y{0, 0, 0};
                 for (int a = 0; a < g.d; ++a) y[a] = scale * x[a] - static_cast<double>(j[a]);
                 return H.at(0, n) * lw.eval(y);
               });
  ConcentrationCheck out;
  out.degenerate = den <= 0.0;
  out.ratio = out.degenerate ? 0.0 : num / den;
  out.pass = num <= C * den;
  return out;
}

CsvTable atom_table_csv(const AtomTable& table, const std::vector<HorizontalGraph>& graphs,
                        const VerticalForest& forest) {
  // (k, j) -> joined list of vertical arrow destinations
  std::map<std::pair<int, std::size_t>, std::string> vdst;
  for (const auto& a : forest.arrows) {
    std::size_t s = table.levels[static_cast<std::size_t>(a.k)].box.index(a.src);
    std::string& acc = vdst[{a.k, s}];
    if (!acc.empty()) acc += ";";
    std::string one = std::to_string(a.dst[0]);
    for (int ax = 1; ax < table.d; ++ax) one += "," + std::to_string(a.dst[ax]);
    acc += one;
  }
  CsvTable csv;
  csv.header = {"k", "j", "star", "flag", "maximal", "saturated", "h_arrow_src", "v_arrow_dst"};
  for (std::size_t k = 0; k < table.levels.size(); ++k) {
    const AtomLevel& lvl = table.levels[k];
    for (std::size_t i = 0; i < lvl.box.size(); ++i) {
      std::string flag = lvl.degenerate[i] ? "degenerate" : (lvl.convex[i] ? "convex" : "flat");
      std::string hsrc;
      if (k < graphs.size() && graphs[k].source_of[i] >= 0)
        hsrc = join_idx(lvl.box.at(static_cast<std::size_t>(graphs[k].source_of[i])), table.d);
      auto vit = vdst.find({static_cast<int>(k), i});
      std::string vd = vit == vdst.end() ? "" : "\"" + vit->second + "\"";
      csv.add_row({std::to_string(lvl.k), join_idx(lvl.box.at(i), table.d), csv_num(lvl.star[i]),
                   flag, csv_num(lvl.maximal[i]), lvl.saturated[i] ? "1" : "0", hsrc, vd});
    }
  }
  return csv;
}

}  // namespace heatlab
