#include <CLI11.hpp>
#include <cstdio>
#include <random>

#include "heatlab/atoms.hpp"
#include "heatlab/io.hpp"
#include "heatlab/norms.hpp"
#include "heatlab/qp.hpp"
#include "heatlab/reports.hpp"
#include "heatlab/spectral.hpp"

using namespace heatlab;

namespace {

struct CommonOpts {
  std::string config;
  std::string out = "out";
  int threads = 1;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required) {
  auto* c = cmd->add_option("--config", opts.config, "experiment config file");
  if (config_required) c->required();
  cmd->add_option("--out", opts.out, "output directory");
  cmd->add_option("--threads", opts.threads, "worker threads (results are identical for any N)");
  cmd->add_option("--seed", opts.seed, "RNG seed for randomized suites");
}

LabConfig load(const CommonOpts& opts) { return LabConfig::parse_file(opts.config); }

// quick standalone invariant suite for `verify` (no config required)
void run_verify(const CommonOpts& opts) {
  GridSpec g = make_grid(1, 512, 8.0);
  Field f = gen_near_delta(g, 0.5, {1.0});

  SemigroupDefect sg = semigroup_defect(f, 0.125, 0.25);
  if (sg.defect > 1e-10) throw assertion_error("verify: semigroup defect " + format_g17(sg.defect));

  Field i_ab = riesz_potential(riesz_potential(f, 0.25).field, 0.35).field;
  Field i_sum = riesz_potential(f, 0.6).field;
  double comp = 0.0, scale = sup_norm(i_sum);
  for (std::size_t n = 0; n < g.size(); ++n)
    comp = std::max(comp, std::abs(i_ab.at(0, n) - i_sum.at(0, n)));
  if (comp > 1e-10 * scale)
    throw assertion_error("verify: Riesz composition defect " + format_g17(comp / scale));

  for (int d = 1; d <= 2; ++d) {
    const LatticeWeightEval& lw = shared_lattice_weight(d, 2.0 * d + 4.0);
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> pos(-20.0, 20.0);
    for (int i = 0; i < 200; ++i) {
      Vec3 x{pos(rng), d >= 2 ? pos(rng) : 0.0, 0.0};
      double dev = std::abs(lw.partition_sum(x) - 1.0);
      if (dev > 1e-10)
        throw assertion_error("verify: partition of unity deviates by " + format_g17(dev));
    }
  }
  std::printf("verify: semigroup, Riesz composition, partition of unity OK\n");
}

void run_gen(const CommonOpts& opts) {
  LabConfig cfg = load(opts);
  GridSpec g = make_grid(static_cast<int>(cfg.get_int("grid.d")),
                         static_cast<int>(cfg.get_int("grid.N")), cfg.get_real("grid.L"));
  Field f = make_generator_field(cfg, g);
  std::filesystem::create_directories(opts.out);
  write_field(f, std::filesystem::path(opts.out) / "field.bin");
  write_field_csv(f, std::filesystem::path(opts.out) / "field.csv");
  std::printf("gen: wrote field.bin and field.csv (hash %016llx)\n",
              static_cast<unsigned long long>(field_content_hash(f)));
}

void run_with_kind(const CommonOpts& opts, const std::string& expected_kind) {
  LabConfig cfg = load(opts);
  std::string kind = cfg.get_str("experiment.kind", expected_kind);
  if (kind != expected_kind && !(expected_kind == "bct" && kind == "qp_scan"))
    throw config_error("config experiment.kind '" + kind + "' does not match the subcommand");
  cfg.set("experiment.kind", kind);
  run_experiment(cfg, opts.out, opts.seed);
  std::printf("%s: all asserted invariants passed; outputs in %s\n", kind.c_str(),
              opts.out.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for heat-flow monotonicity and atomic decompositions"};
  app.require_subcommand(1);

  CommonOpts opts;
  CLI::App* verify = app.add_subcommand("verify", "run the built-in invariant suites");
  add_common(verify, opts, false);
  CLI::App* qpcmd = app.add_subcommand("qp", "Q_p monotonicity / derivative-identity scans");
  add_common(qpcmd, opts, true);
  CLI::App* atoms = app.add_subcommand("atoms", "atom tables, graphs, telescoping audit");
  add_common(atoms, opts, true);
  CLI::App* embed = app.add_subcommand("embed", "embedding partial-sum reports");
  add_common(embed, opts, true);
  CLI::App* gen = app.add_subcommand("gen", "write a generator field to disk");
  add_common(gen, opts, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) run_verify(opts);
    if (qpcmd->parsed()) run_with_kind(opts, "bct");
    if (atoms->parsed()) run_with_kind(opts, "atoms");
    if (embed->parsed()) run_with_kind(opts, "embedding");
    if (gen->parsed()) run_gen(opts);
  } catch (const config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const assertion_error& e) {
    std::fprintf(stderr, "assertion failed: %s\n", e.what());
    return 2;
  }
  return 0;
}
