#include "heatlab/reports.hpp"

#include <fstream>
#include <map>
#include <random>

#include "heatlab/io.hpp"
#include "heatlab/qp.hpp"

namespace heatlab {

EmbeddingReport embedding_report(const HeatLadder& ladder, const ProofParameters& params) {
  const GridSpec& g = ladder.grid();
  params.validate(g.d);
  EmbeddingReport rep;
  rep.l1 = lp_norm(ladder.levels.front(), 1.0);
  double alpha = params.alpha(g.d);
  double sum = 0.0;
  for (int k = 0; k <= ladder.K; ++k) {
    double term = std::pow(static_cast<double>(params.A), -alpha * k) *
                  lorentz_norm(ladder.level(k), params.p, 1.0);
    sum += term;
    rep.terms.push_back(term);
    rep.partial.push_back(sum);
    rep.ratio.push_back(rep.l1 > 0.0 ? sum / rep.l1 : 0.0);
  }
  return rep;
}

namespace {

// region mask of the nodes lying in convex cubes of level k
std::vector<std::uint8_t> convex_mask(const GridSpec& g, const AtomLevel& lvl, int A,
                                      double* coverage) {
  std::vector<std::uint8_t> mask(g.size(), 0);
  double scale = std::pow(static_cast<double>(A), lvl.k);
  std::size_t hit = 0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    Vec3 x = g.node(n);
    Idx3 j{0, 0, 0};
    for (int a = 0; a < g.d; ++a) j[a] = std::llround(scale * x[a]);
    if (lvl.box.contains(j) && lvl.convex[lvl.box.index(j)]) {
      mask[n] = 1;
      ++hit;
    }
  }
  if (coverage) *coverage = static_cast<double>(hit) / static_cast<double>(g.size());
  return mask;
}

}  // namespace

ConvexSumReport convex_sum_report(const HeatLadder& ladder, const AtomTable& table) {
  const GridSpec& g = ladder.grid();
  const ProofParameters& params = table.params;
  ConvexSumReport rep;
  rep.l1 = lp_norm(ladder.levels.front(), 1.0);
  double alpha = params.alpha(g.d);
  double sum = 0.0;
  for (const AtomLevel& lvl : table.levels) {
    ConvexSumRow row;
    row.k = lvl.k;
    std::vector<std::uint8_t> mask = convex_mask(g, lvl, params.A, &row.coverage);
    row.term = std::pow(static_cast<double>(params.A), -alpha * lvl.k) *
               lorentz_norm_region(ladder.level(lvl.k), params.p, 1.0, mask);
    sum += row.term;
    row.partial = sum;
    rep.rows.push_back(row);
  }
  return rep;
}

std::vector<TreeBudgetRow> tree_budget_report(const HeatLadder& ladder, const AtomTable& table,
                                              const VerticalForest& forest) {
  const GridSpec& g = ladder.grid();
  const ProofParameters& params = table.params;
  double alpha = params.alpha(g.d);

  // children lists keyed by (level, flat index)
  std::map<std::pair<int, std::size_t>, std::vector<std::pair<int, std::size_t>>> children;
  for (const auto& a : forest.arrows) {
    std::size_t s = table.levels[static_cast<std::size_t>(a.k)].box.index(a.src);
    std::size_t t = table.levels[static_cast<std::size_t>(a.k) + 1].box.index(a.dst);
    children[{a.k, s}].push_back({a.k + 1, t});
  }

  auto cube_mass = [&](int k, const Idx3& j) {
    double scale = std::pow(static_cast<double>(params.A), k);
    std::vector<std::uint8_t> mask(g.size(), 0);
    for (std::size_t n = 0; n < g.size(); ++n) {
      Vec3 x = g.node(n);
      bool in = true;
      for (int a = 0; a < g.d; ++a)
        if (std::llround(scale * x[a]) != j[a]) in = false;
      if (in) mask[n] = 1;
    }
    return std::pow(static_cast<double>(params.A), -alpha * k) *
           lorentz_norm_region(ladder.level(k), params.p, 1.0, mask);
  };

  std::vector<TreeBudgetRow> rows;
  for (const auto& [rk, rj] : forest.roots) {
    TreeBudgetRow row;
    row.root_k = rk;
    row.root_j = rj;
    // breadth-first walk of the tree
    std::vector<std::pair<int, std::size_t>> frontier{
        {rk, table.levels[static_cast<std::size_t>(rk)].box.index(rj)}};
    while (!frontier.empty()) {
      std::vector<std::pair<int, std::size_t>> next;
      for (const auto& [k, idx] : frontier) {
        const AtomLevel& lvl = table.levels[static_cast<std::size_t>(k)];
        ++row.size;
        row.depth = std::max(row.depth, k - rk);
        row.mass += cube_mass(k, lvl.box.at(idx));
        row.budget += std::max(lvl.star6[idx] - lvl.star0[idx], 0.0);
        auto it = children.find({k, idx});
        if (it != children.end())
          next.insert(next.end(), it->second.begin(), it->second.end());
      }
      frontier = std::move(next);
    }
    rows.push_back(row);
  }
  return rows;
}

TelescopingAudit telescoping_audit(const AtomTable& table, double l1, double rel_tol) {
  TelescopingAudit audit;
  for (const AtomLevel& lvl : table.levels)
    audit.total += pairwise_sum_f(lvl.box.size(), [&](std::size_t i) {
      return std::max(lvl.star6[i] - lvl.star0[i], 0.0);
    });
  audit.budget = 3.0 * l1;
  audit.pass = audit.total <= audit.budget * (1.0 + rel_tol);
  return audit;
}

Field make_generator_field(const LabConfig& cfg, const GridSpec& g) {
  std::string gen = cfg.get_str("input.generator");
  Vec3 center{cfg.get_real("input.cx", 0.0), cfg.get_real("input.cy", 0.0),
              cfg.get_real("input.cz", 0.0)};
  if (gen == "near_delta") {
    double sigma = cfg.get_real("input.sigma", 2.0 * g.h());
    std::vector<double> a(static_cast<std::size_t>(cfg.get_int("input.ell", 1)), 0.0);
    a[0] = 1.0;
    return gen_near_delta(g, sigma, a, center);
  }
  if (gen == "gradient")
    return gen_gradient_field(g, center, cfg.get_real("input.width", 1.0),
                              cfg.get_real("input.amplitude", 1.0));
  if (gen == "divfree")
    return gen_divfree_field(g, center, cfg.get_real("input.width", 1.0),
                             cfg.get_real("input.amplitude", 1.0));
  if (gen == "dipole")
    return gen_dipole(g, cfg.get_real("input.sigma", 0.5), cfg.get_real("input.offset", 1.0),
                      cfg.get_real("input.amplitude", 1.0));
  if (gen == "file") return read_field(cfg.get_str("input.path"));
  throw config_error("unknown input.generator '" + gen + "'");
}

namespace {

GridSpec grid_from(const LabConfig& cfg) {
  GridSpec g;
  g.d = static_cast<int>(cfg.get_int("grid.d"));
  g.N = static_cast<int>(cfg.get_int("grid.N"));
  g.L = cfg.get_real("grid.L");
  return make_grid(g.d, g.N, g.L);
}

ProofParameters params_from(const LabConfig& cfg, int d) {
  ProofParameters pp = ProofParameters::defaults(
      d, static_cast<int>(cfg.get_int("params.A", 3)), cfg.get_real("params.p", 2.0),
      static_cast<int>(cfg.get_int("params.K", 5)));
  pp.eps = cfg.get_real("params.epsilon", pp.eps);
  pp.theta1 = cfg.get_real("params.theta1", pp.theta1);
  pp.theta2 = cfg.get_real("params.theta2", pp.theta2);
  pp.theta3 = cfg.get_real("params.theta3", pp.theta3);
  pp.theta4 = cfg.get_real("params.theta4", pp.theta4);
  pp.theta5 = cfg.get_real("params.theta5", pp.theta5);
  pp.lambda_override = cfg.get_real("params.lambda_override", 0.0);
  pp.validate(d);
  return pp;
}

struct ManifestWriter {
  const LabConfig& cfg;
  std::filesystem::path dir;
  std::vector<std::pair<std::string, std::uint64_t>> outputs;

  void add_csv(const std::string& name, const CsvTable& csv) {
    csv.write(dir / name);
    std::ifstream in(dir / name, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    outputs.push_back({name, fnv1a(bytes.data(), bytes.size())});
  }
  void finish(std::uint64_t seed) {
    std::ofstream man(dir / "manifest.txt");
    man << "seed = " << seed << "\n";
    for (const auto& [k, v] : cfg.items()) man << "config." << k << " = " << v << "\n";
    char buf[32];
    for (const auto& [name, hash] : outputs) {
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
      man << "output." << name << " = " << buf << "\n";
    }
  }
};

void run_bct(const LabConfig& cfg, ManifestWriter& man, std::uint64_t seed) {
  int d = static_cast<int>(cfg.get_int("bct.d", 1));
  double p = cfg.get_real("bct.p", 2.0);
  int natoms = static_cast<int>(cfg.get_int("bct.natoms", 5));
  int instances = static_cast<int>(cfg.get_int("bct.instances", 10));
  double theta = cfg.get_real("weight.theta", 4.0 * d + 9.0);
  double tol = cfg.get_real("tolerances.bct_defect", 1e-3);
  std::vector<double> tgrid = cfg.get_reals("bct.t");
  require(d >= 1 && d <= 2 && natoms >= 1 && instances >= 1, "bct: bad instance parameters");

  ParametricWeight G = ParametricWeight::poly_decay(d, theta);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-2.0, 2.0), mass(0.2, 1.0);
  CsvTable csv;
  csv.header = {"instance", "t", "Qp", "bct_rhs", "fd_derivative", "defect"};
  double worst = 0.0;
  for (int inst = 0; inst < instances; ++inst) {
    std::vector<PointMeasure::Atom> atoms;
    for (int i = 0; i < natoms; ++i) {
      Vec3 x{0, 0, 0};
      for (int a = 0; a < d; ++a) x[a] = pos(rng);
      atoms.push_back({x, mass(rng)});
    }
    PointMeasure mu(d, atoms);
    for (double t : tgrid) {
      BctDefect bd = bct_identity_defect(mu, G, p, t);
      worst = std::max(worst, bd.defect);
      csv.add_row({std::to_string(inst), csv_num(t), csv_num(qp(mu, G, p, t)),
                   csv_num(bd.rhs), csv_num(bd.fd), csv_num(bd.defect)});
    }
  }
  man.add_csv("bct_scan.csv", csv);
  if (worst > tol)
    throw assertion_error("bct: worst defect " + format_g17(worst) + " exceeds tolerance " +
                          format_g17(tol));
}

void run_embedding(const LabConfig& cfg, ManifestWriter& man) {
  GridSpec g = grid_from(cfg);
  ProofParameters pp = params_from(cfg, g.d);
  Field f = make_generator_field(cfg, g);
  HeatLadder ladder = build_ladder(f, pp.A, pp.K);
  EmbeddingReport rep = embedding_report(ladder, pp);

  CsvTable csv;
  csv.header = {"k", "term", "partial_sum", "ratio_to_l1"};
  for (std::size_t k = 0; k < rep.terms.size(); ++k)
    csv.add_row({std::to_string(k), csv_num(rep.terms[k]), csv_num(rep.partial[k]),
                 csv_num(rep.ratio[k])});
  man.add_csv("embedding.csv", csv);

  // optional assertions driven by the config
  if (cfg.has("tolerances.max_ratio_spread")) {
    double spread = cfg.get_real("tolerances.max_ratio_spread");
    int k0 = static_cast<int>(cfg.get_int("tolerances.spread_from_k", 2));
    double lo = rep.partial[static_cast<std::size_t>(k0)];
    double hi = rep.partial.back();
    if (hi > spread * lo)
      throw assertion_error("embedding: partial sums grew by " + format_g17(hi / lo) +
                            " from k=" + std::to_string(k0) + ", exceeding " +
                            format_g17(spread));
  }
  if (cfg.has("tolerances.min_growth_per_k")) {
    // linear-divergence check: partial sums must keep gaining at least
    // min_growth_per_k * (increment measured at k = 2) per level
    double frac = cfg.get_real("tolerances.min_growth_per_k");
    double c = rep.partial[2] - rep.partial[1];
    double K = static_cast<double>(rep.partial.size() - 1);
    if (rep.partial.back() < frac * c * K)
      throw assertion_error("embedding: partial sum " + format_g17(rep.partial.back()) +
                            " fails the linear growth bound " + format_g17(frac * c * K));
  }
}

void run_atoms(const LabConfig& cfg, ManifestWriter& man) {
  GridSpec g = grid_from(cfg);
  ProofParameters pp = params_from(cfg, g.d);
  Field f = make_generator_field(cfg, g);
  HeatLadder ladder = build_ladder(f, pp.A, pp.K);
  AtomTable table = build_atom_table(ladder, pp);

  std::vector<HorizontalGraph> graphs;
  for (const AtomLevel& lvl : table.levels) {
    graphs.push_back(build_horizontal_graph(lvl, pp.lambda(), pp.theta4));
    verify_horizontal_graph(graphs.back(), lvl);
  }
  VerticalForest forest = build_vertical_forest(table, graphs);
  verify_vertical_forest(forest, table);

  man.add_csv("atoms.csv", atom_table_csv(table, graphs, forest));

  std::vector<TreeBudgetRow> trees = tree_budget_report(ladder, table, forest);
  CsvTable tcsv;
  tcsv.header = {"root_k", "root_j", "size", "depth", "mass", "budget"};
  for (const auto& row : trees) {
    std::string j = std::to_string(row.root_j[0]);
    for (int a = 1; a < g.d; ++a) j += "," + std::to_string(row.root_j[a]);
    if (g.d > 1) j = "\"" + j + "\"";
    tcsv.add_row({std::to_string(row.root_k), j, std::to_string(row.size),
                  std::to_string(row.depth), csv_num(row.mass), csv_num(row.budget)});
  }
  man.add_csv("trees.csv", tcsv);

  double l1 = lp_norm(f, 1.0);
  TelescopingAudit audit = telescoping_audit(table, l1,
                                             cfg.get_real("tolerances.telescoping", 1e-6));
  CsvTable acsv;
  acsv.header = {"total_positive_difference", "budget_3_l1", "pass"};
  acsv.add_row({csv_num(audit.total), csv_num(audit.budget), audit.pass ? "1" : "0"});
  man.add_csv("telescoping.csv", acsv);
  if (!audit.pass)
    throw assertion_error("telescoping audit: " + format_g17(audit.total) + " exceeds 3||f||_1 = " +
                          format_g17(audit.budget));
}

void run_qp_scan(const LabConfig& cfg, ManifestWriter& man) {
  int d = static_cast<int>(cfg.get_int("qp.d", 1));
  double p = cfg.get_real("qp.p", 2.0);
  double theta = cfg.get_real("weight.theta", 4.0 * d + 9.0);
  std::vector<double> tgrid = cfg.get_reals("qp.t");
  std::vector<double> xs = cfg.get_reals("measure.x");
  std::vector<double> ms = cfg.get_reals("measure.mass");
  require(xs.size() == ms.size() * static_cast<std::size_t>(d),
          "qp: measure.x must list d coordinates per atom");
  std::vector<PointMeasure::Atom> atoms;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    Vec3 x{0, 0, 0};
    for (int a = 0; a < d; ++a) x[a] = xs[i * d + a];
    atoms.push_back({x, ms[i]});
  }
  PointMeasure mu(d, atoms);
  ParametricWeight G = ParametricWeight::poly_decay(d, theta);
  MonotonicityScan scan =
      monotonicity_scan(mu, G, p, tgrid, cfg.get_real("tolerances.monotone_slack", 1e-8));
  CsvTable csv;
  csv.header = {"t", "Qp"};
  for (std::size_t i = 0; i < scan.t.size(); ++i)
    csv.add_row({csv_num(scan.t[i]), csv_num(scan.values[i])});
  man.add_csv("qp_scan.csv", csv);
  if (!scan.pass)
    throw assertion_error("qp scan: monotonicity violated with slack " +
                          format_g17(scan.worst_slack));
}

}  // namespace

void run_experiment(const LabConfig& cfg, const std::filesystem::path& outdir,
                    std::uint64_t seed) {
  std::filesystem::create_directories(outdir);
  ManifestWriter man{cfg, outdir, {}};
  std::string kind = cfg.get_str("experiment.kind");
  if (kind == "bct")
    run_bct(cfg, man, seed);
  else if (kind == "embedding")
    run_embedding(cfg, man);
  else if (kind == "atoms")
    run_atoms(cfg, man);
  else if (kind == "qp_scan")
    run_qp_scan(cfg, man);
  else
    throw config_error("unknown experiment.kind '" + kind + "'");
  man.finish(seed);
}

}  // namespace heatlab
