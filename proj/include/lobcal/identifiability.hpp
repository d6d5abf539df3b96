#ifndef LOBCAL_IDENTIFIABILITY_HPP
#define LOBCAL_IDENTIFIABILITY_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "lobcal/discrepancy.hpp"
#include "lobcal/features.hpp"
#include "lobcal/pgps.hpp"

namespace lobcal::ident {

/// A 2-D slice through parameter space: two swept parameters (indices into
/// PgpsParams vector order), the other four pinned to `base`.
struct GridSpec {
    std::array<int, 2> dims{4, 5};  // alpha, mu
    std::array<discrepancy::Bounds, 2> ranges{{{0.05, 0.2}, {0.01, 0.06}}};
    std::array<int, 2> resolution{100, 100};
    pgps::PgpsParams base{};  // defaults to the recommended setting

    void validate() const;
    /// i-th of resolution[axis] evenly spaced points, endpoints inclusive.
    double coordinate(int axis, int i) const;
    std::size_t cell_count() const noexcept;
    /// Cells are row-major with dims[0] as the outer axis.
    pgps::PgpsParams cell_params(std::size_t cell) const;
};

struct GridCell {
    std::array<double, 2> coords{};
    std::array<double, features::kFeatureCount> d{};  // normalized W per feature 1..6
};

struct GridReport {
    GridSpec spec;
    pgps::SimConfig sim_config;
    int replicates = 1;
    std::vector<GridCell> cells;
    std::size_t simulations = 0;

    /// D_k of every cell, k in 1..6.
    std::vector<double> feature_values(int feature_id) const;
};

/// One simulation per cell (per replicate), all with sim.seed (common random
/// numbers); D_k is the target-normalized Wasserstein distance. A failing cell
/// aborts with its index and parameters in the message.
GridReport grid_evaluate(const GridSpec& spec, const features::FeatureMatrix& target, const pgps::SimConfig& sim,
                         unsigned threads = 1, int replicates = 1);

using Mask = std::vector<bool>;

struct TopQSets {
    double q = 0.1;
    std::size_t set_size = 0;  // ceil(q * N)
    std::vector<Mask> masks;   // one per feature, in feature order
};

/// ceil(q * N), robust to the q * N rounding just above an integer.
std::size_t topq_size(double q, std::size_t n);

/// Marks, per series, the ceil(q*N) smallest values; ties at the threshold go
/// to the lowest index. Throws ConfigError for q outside (0, 1].
TopQSets topq_sets(const std::vector<std::vector<double>>& values, double q);
TopQSets topq_sets(const GridReport& report, double q = 0.10);

struct Ratio {
    std::int64_t num = 0;
    std::int64_t den = 1;
    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
};

struct NonIdentEstimate {
    int k = 0;
    double probability = 0.0;
    std::int64_t cardinality = 0;
};

struct IntersectionStats {
    std::size_t grid_size = 0;
    std::vector<NonIdentEstimate> estimates;  // k = 1..K
    std::vector<Ratio> beta;                  // beta[i] is beta_{i+2}, i.e. starts at beta_2
    std::vector<Mask> intersections;          // intersection of the first k masks, k = 1..K

    /// P_k = P_1 * prod_{i<=k} beta_i, checked in exact integer arithmetic.
    bool chain_identity_holds(int k) const;
    /// P_k <= P_1 * (max_{i<=k} beta_i)^(k-1), exact.
    bool upper_bound_holds(int k) const;
    /// P_1 * prod beta_i in floating point (for reports).
    double chain_product(int k) const;
    double upper_bound(int k) const;
};

/// Intersections of the first k masks for k = 1..K; beta_i = 0 when the
/// previous intersection is empty.
IntersectionStats intersection_stats(const std::vector<Mask>& masks, int K);

}  // namespace lobcal::ident

#endif  // LOBCAL_IDENTIFIABILITY_HPP
