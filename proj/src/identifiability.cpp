#include "lobcal/identifiability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lobcal/error.hpp"
#include "lobcal/parallel.hpp"

namespace lobcal::ident {

void GridSpec::validate() const {
    if (dims[0] == dims[1]) throw ConfigError("grid dimensions must differ");
    for (int a = 0; a < 2; ++a) {
        if (dims[a] < 0 || dims[a] >= static_cast<int>(pgps::PgpsParams::kDim))
            throw ConfigError("grid dimension index " + std::to_string(dims[a]) + " outside 0..5");
        if (resolution[a] < 2) throw ConfigError("grid resolution must be >= 2 per dimension");
        if (!(ranges[a].lo < ranges[a].hi)) throw ConfigError("grid range needs lo < hi");
    }
    base.validate();
    // Corners bound every cell for the box-shaped parameter constraints.
    for (int i : {0, resolution[0] - 1})
        for (int j : {0, resolution[1] - 1}) cell_params(static_cast<std::size_t>(i * resolution[1] + j)).validate();
}

double GridSpec::coordinate(int axis, int i) const {
    const auto& r = ranges[static_cast<std::size_t>(axis)];
    const int n = resolution[static_cast<std::size_t>(axis)];
    if (i == n - 1) return r.hi;
    return r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

std::size_t GridSpec::cell_count() const noexcept {
    return static_cast<std::size_t>(resolution[0]) * static_cast<std::size_t>(resolution[1]);
}

pgps::PgpsParams GridSpec::cell_params(std::size_t cell) const {
    const int i = static_cast<int>(cell / static_cast<std::size_t>(resolution[1]));
    const int j = static_cast<int>(cell % static_cast<std::size_t>(resolution[1]));
    auto v = base.to_array();
    v[static_cast<std::size_t>(dims[0])] = coordinate(0, i);
    v[static_cast<std::size_t>(dims[1])] = coordinate(1, j);
    return pgps::PgpsParams::from_array(v);
}

std::vector<double> GridReport::feature_values(int feature_id) const {
    std::vector<double> out;
    out.reserve(cells.size());
    for (const auto& c : cells) out.push_back(c.d.at(static_cast<std::size_t>(feature_id - 1)));
    return out;
}

GridReport grid_evaluate(const GridSpec& spec, const features::FeatureMatrix& target, const pgps::SimConfig& sim,
                         unsigned threads, int replicates) {
    spec.validate();
    discrepancy::ObjectiveSpec objective = discrepancy::ObjectiveSpec::first_k(features::kFeatureCount);
    objective.replicates = replicates;
    const discrepancy::PreparedObjective prepared(objective, target);
    for (std::size_t c : {std::size_t{0}, spec.cell_count() - 1}) sim.validate(spec.cell_params(c));

    GridReport report;
    report.spec = spec;
    report.sim_config = sim;
    report.replicates = replicates;
    report.cells.resize(spec.cell_count());

    parallel_for(report.cells.size(), threads, [&](std::size_t c) {
        const pgps::PgpsParams p = spec.cell_params(c);
        GridCell& cell = report.cells[c];
        cell.coords = {p.to_array()[static_cast<std::size_t>(spec.dims[0])],
                       p.to_array()[static_cast<std::size_t>(spec.dims[1])]};
        try {
            const auto r = prepared.evaluate(p, sim);
            std::copy(r.values.begin(), r.values.end(), cell.d.begin());
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "grid cell " << c << " (" << pgps::PgpsParams::kNames[static_cast<std::size_t>(spec.dims[0])]
               << "=" << cell.coords[0] << ", " << pgps::PgpsParams::kNames[static_cast<std::size_t>(spec.dims[1])]
               << "=" << cell.coords[1] << ") failed: " << e.what();
            throw Error(os.str());
        }
    });
    report.simulations = report.cells.size() * static_cast<std::size_t>(replicates);
    return report;
}

std::size_t topq_size(double q, std::size_t n) {
    const double raw = q * static_cast<double>(n);
    const double k = std::ceil(raw - 1e-9 * std::max(1.0, raw));
    return std::min(n, static_cast<std::size_t>(std::max(0.0, k)));
}

TopQSets topq_sets(const std::vector<std::vector<double>>& values, double q) {
    if (!(q > 0.0 && q <= 1.0)) throw ConfigError("q must lie in (0, 1]");
    TopQSets out;
    out.q = q;
    if (values.empty()) return out;
    const std::size_t n = values.front().size();
    out.set_size = topq_size(q, n);
    std::vector<std::size_t> order(n);
    for (const auto& v : values) {
        if (v.size() != n) throw ConfigError("top-q: series of unequal length");
        std::iota(order.begin(), order.end(), std::size_t{0});
        // Strict weak order on (value, index) makes the set size exact.
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(out.set_size), order.end(),
                          [&](std::size_t a, std::size_t b) { return v[a] < v[b] || (v[a] == v[b] && a < b); });
        Mask m(n, false);
        for (std::size_t i = 0; i < out.set_size; ++i) m[order[i]] = true;
        out.masks.push_back(std::move(m));
    }
    return out;
}

TopQSets topq_sets(const GridReport& report, double q) {
    std::vector<std::vector<double>> values;
    for (int k = 1; k <= features::kFeatureCount; ++k) values.push_back(report.feature_values(k));
    return topq_sets(values, q);
}

IntersectionStats intersection_stats(const std::vector<Mask>& masks, int K) {
    if (K < 1 || static_cast<std::size_t>(K) > masks.size())
        throw ConfigError("K must lie in 1..number of masks");
    IntersectionStats s;
    s.grid_size = masks.front().size();
    Mask acc = masks.front();
    std::int64_t prev = 0;
    for (int k = 1; k <= K; ++k) {
        const Mask& m = masks[static_cast<std::size_t>(k - 1)];
        if (m.size() != s.grid_size) throw ConfigError("masks of unequal length");
        if (k > 1)
            for (std::size_t c = 0; c < acc.size(); ++c) acc[c] = acc[c] && m[c];
        const auto card = static_cast<std::int64_t>(std::count(acc.begin(), acc.end(), true));
        s.estimates.push_back({k, s.grid_size == 0 ? 0.0 : static_cast<double>(card) / static_cast<double>(s.grid_size),
                               card});
        if (k > 1) s.beta.push_back(prev == 0 ? Ratio{0, 1} : Ratio{card, prev});
        s.intersections.push_back(acc);
        prev = card;
    }
    return s;
}

namespace {

__extension__ typedef __int128 i128;

i128 ipow(i128 b, int e) {
    i128 r = 1;
    while (e-- > 0) r *= b;
    return r;
}

}  // namespace

bool IntersectionStats::chain_identity_holds(int k) const {
    // |I_k| / N == (|I_1| / N) * prod num_i / den_i
    i128 num = estimates.at(0).cardinality;
    i128 den = 1;
    for (int i = 0; i < k - 1; ++i) {
        num *= beta.at(static_cast<std::size_t>(i)).num;
        den *= beta.at(static_cast<std::size_t>(i)).den;
    }
    return static_cast<i128>(estimates.at(static_cast<std::size_t>(k - 1)).cardinality) * den == num;
}

bool IntersectionStats::upper_bound_holds(int k) const {
    if (k == 1) return true;
    Ratio best = beta.at(0);
    for (int i = 1; i < k - 1; ++i) {
        const Ratio& b = beta.at(static_cast<std::size_t>(i));
        if (static_cast<i128>(b.num) * best.den > static_cast<i128>(best.num) * b.den) best = b;
    }
    const i128 lhs = static_cast<i128>(estimates.at(static_cast<std::size_t>(k - 1)).cardinality) * ipow(best.den, k - 1);
    const i128 rhs = static_cast<i128>(estimates.at(0).cardinality) * ipow(best.num, k - 1);
    return lhs <= rhs;
}

double IntersectionStats::chain_product(int k) const {
    double p = estimates.at(0).probability;
    for (int i = 0; i < k - 1; ++i) p *= beta.at(static_cast<std::size_t>(i)).value();
    return p;
}

double IntersectionStats::upper_bound(int k) const {
    double m = 0.0;
    for (int i = 0; i < k - 1; ++i) m = std::max(m, beta.at(static_cast<std::size_t>(i)).value());
    return k == 1 ? estimates.at(0).probability : estimates.at(0).probability * std::pow(m, k - 1);
}

}  // namespace lobcal::ident
