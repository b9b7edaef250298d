#pragma once

#include "heatlab/heat.hpp"
#include "heatlab/io.hpp"
#include "heatlab/weights.hpp"

namespace heatlab {

// Finite index box of the j-lattice at one level (inclusive bounds).
struct JBox {
  int d = 1;
  Idx3 lo{0, 0, 0}, hi{0, 0, 0};

  std::size_t size() const {
    std::size_t s = 1;
    for (int a = 0; a < d; ++a) s *= static_cast<std::size_t>(hi[a] - lo[a] + 1);
    return s;
  }
  bool contains(const Idx3& j) const {
    for (int a = 0; a < d; ++a)
      if (j[a] < lo[a] || j[a] > hi[a]) return false;
    return true;
  }
  std::size_t index(const Idx3& j) const {
    std::size_t f = 0;
    for (int a = 0; a < d; ++a)
      f = f * static_cast<std::size_t>(hi[a] - lo[a] + 1) + static_cast<std::size_t>(j[a] - lo[a]);
    return f;
  }
  Idx3 at(std::size_t f) const {
    Idx3 j{0, 0, 0};
    for (int a = d - 1; a >= 0; --a) {
      std::size_t ext = static_cast<std::size_t>(hi[a] - lo[a] + 1);
      j[a] = lo[a] + static_cast<std::int64_t>(f % ext);
      f /= ext;
    }
    return j;
  }
};

// Per-level atom statistics over a dense j-box. star/star0/star6 are the
// three weighted norms entering classification; maximal/argmax come from
// compute_maximal, saturated from compute_saturation.
struct AtomLevel {
  int k = 0;
  JBox box;
  std::vector<double> star;    // ||f_{k+2}||_{L1(Heat[w_{k,j}](., A^{-2k}-A^{-2k-4}))}
  std::vector<double> star0;   // ||f_k||_{L1(w_{k,j})}
  std::vector<double> star6;   // ||f_{k+3}||_{L1(Heat[w_{k,j}](., A^{-2k}-A^{-2k-6}))}
  std::vector<double> maximal;
  std::vector<std::int64_t> argmax;  // flat index into the box, -1 when the window is all-zero
  std::vector<std::uint8_t> convex, degenerate, saturated;

  explicit AtomLevel(int level = 0, const JBox& b = {})
      : k(level),
        box(b),
        star(b.size(), 0.0),
        star0(b.size(), 0.0),
        star6(b.size(), 0.0),
        maximal(b.size(), 0.0),
        argmax(b.size(), -1),
        convex(b.size(), 0),
        degenerate(b.size(), 0),
        saturated(b.size(), 0) {}
};

struct AtomTable {
  ProofParameters params;
  int d = 1;
  std::vector<AtomLevel> levels;  // k = 0 .. K-3
  int truncation_radius = 0;      // j-window radius of the star sweeps
  double tail_bound = 0.0;        // certified relative truncation error

  const AtomLevel& level(int k) const { return levels.at(static_cast<std::size_t>(k)); }
};

// Builds star/star0/star6 for k = 0..K-3 by one scatter sweep per level
// (the heat is moved onto the field spectrally; the lattice weight is then
// integrated directly, sharing one denominator evaluation per grid node),
// then classifies and fills maximal/saturation. tail_tol bounds the relative
// error of the j-window truncation.
AtomTable build_atom_table(const HeatLadder& ladder, const ProofParameters& params,
                           double tail_tol = 1e-12);

void classify_level(AtomLevel& lvl, double eps);

// M_{k,j} = sup_i (1+|i-j|)^{-theta4} star_i over the box, with the exact
// argmax (ties to the lexicographically smallest index).
void compute_maximal(AtomLevel& lvl, double theta4);

void compute_saturation(AtomLevel& lvl, int Ksat = 2);

// Horizontal graph at one level: arrow argmax(j) -> j whenever the argmax
// differs from j. source_of[target] = flat source index or -1.
struct HorizontalGraph {
  int k = 0;
  JBox box;
  std::vector<std::int64_t> source_of;
};

HorizontalGraph build_horizontal_graph(const AtomLevel& lvl, double lambda, double theta4);

// Throws assertion_error on: self loops, an oriented path of length 2, or a
// source that is not saturated per the table.
void verify_horizontal_graph(const HorizontalGraph& g, const AtomLevel& lvl);

struct VerticalArrow {
  int k = 0;      // source level; target level is k+1
  Idx3 src{0, 0, 0}, dst{0, 0, 0};
};

struct VerticalForest {
  std::vector<VerticalArrow> arrows;
  // vertices (flat, non-degenerate atoms) with no incoming arrow
  std::vector<std::pair<int, Idx3>> roots;
};

// Vertices are the eps-flat non-degenerate atoms. Arrow (k,j) -> (k+1,j')
// when (k,j) is 2-saturated and either Q_{k+1,j'} lies in Q_{k,j}, or it lies
// in a non-2-saturated Q_{k,i} with a horizontal arrow j -> i at level k.
VerticalForest build_vertical_forest(const AtomTable& table,
                                     const std::vector<HorizontalGraph>& graphs);

void verify_vertical_forest(const VerticalForest& forest, const AtomTable& table);

// Unique level-k parent cube of temporal cube Q_{k+1, j'} (A odd).
Idx3 parent_cube(const Idx3& j, int d, int A);

struct ConcentrationCheck {
  double ratio = 0.0;  // ||f_{k+2}||_{L1(u_{k,j})} / star_{k,j}
  bool pass = false;
  bool degenerate = false;  // zero denominator
};

ConcentrationCheck concentration_check(const HeatLadder& ladder, int k, const Idx3& j, double C,
                                       const ProofParameters& params);

CsvTable atom_table_csv(const AtomTable& table, const std::vector<HorizontalGraph>& graphs,
                        const VerticalForest& forest);

}  // namespace heatlab
