#pragma once

#include <filesystem>

#include "heatlab/atoms.hpp"
#include "heatlab/config.hpp"
#include "heatlab/norms.hpp"

namespace heatlab {

struct EmbeddingReport {
  double l1 = 0.0;                // ||f||_{L1}
  std::vector<double> terms;      // A^{-alpha k} ||f_k||_{L_{p,1}}, k = 0..K
  std::vector<double> partial;    // running sums
  std::vector<double> ratio;      // partial / l1
};

EmbeddingReport embedding_report(const HeatLadder& ladder, const ProofParameters& params);

struct ConvexSumRow {
  int k = 0;
  double coverage = 0.0;  // node fraction inside convex cubes
  double term = 0.0;      // A^{-alpha k} ||f_k||_{L_{p,1}(convex cubes)}
  double partial = 0.0;
};

struct ConvexSumReport {
  double l1 = 0.0;
  std::vector<ConvexSumRow> rows;
};

ConvexSumReport convex_sum_report(const HeatLadder& ladder, const AtomTable& table);

struct TreeBudgetRow {
  int root_k = 0;
  Idx3 root_j{0, 0, 0};
  int size = 0;            // member atoms
  int depth = 0;           // levels below the root
  double mass = 0.0;       // sum over members of A^{-alpha k} ||f_k||_{L_{p,1}(Q_{k,j})}
  double budget = 0.0;     // sum over members of (star6 - star0)_+
};

std::vector<TreeBudgetRow> tree_budget_report(const HeatLadder& ladder, const AtomTable& table,
                                              const VerticalForest& forest);

struct TelescopingAudit {
  double total = 0.0;   // sum over k = 0..K-3 and j of (star6 - star0)_+
  double budget = 0.0;  // 3 ||f||_{L1}
  bool pass = false;
};

TelescopingAudit telescoping_audit(const AtomTable& table, double l1, double rel_tol = 1e-6);

// Config-driven experiment runner used by the CLI. Writes CSVs plus a
// manifest into outdir. Throws config_error / assertion_error; a normal
// return means every asserted invariant passed.
void run_experiment(const LabConfig& cfg, const std::filesystem::path& outdir,
                    std::uint64_t seed);

// Generator dispatch shared by the runner and the `gen` subcommand.
Field make_generator_field(const LabConfig& cfg, const GridSpec& g);

}  // namespace heatlab
