#include "mgrsc/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "mgrsc/errors.hpp"

namespace mgrsc {

RscDistribution::RscDistribution(std::vector<double> values, Provenance provenance)
    : values_(std::move(values)), provenance_(provenance) {
    if (values_.empty()) throw ValidationError("distribution requires at least one value");
    for (double v : values_)
        if (!std::isfinite(v)) throw ValidationError("distribution contains non-finite values");
    std::sort(values_.begin(), values_.end());
}

double RscDistribution::mean() const {
    double acc = 0.0;
    for (double v : values_) acc += v;
    return acc / static_cast<double>(values_.size());
}

double RscDistribution::variance() const {
    const double m = mean();
    double acc = 0.0;
    for (double v : values_) acc += (v - m) * (v - m);
    return acc / static_cast<double>(values_.size());
}

double confidence_rsc(const RscDistribution& dist, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw ValidationError("confidence level must be in (0, 1)");
    if (dist.n() < 100)
        throw ValidationError("confidence_rsc needs at least 100 samples, got " +
                              std::to_string(dist.n()));
    // Small guard so that exactly-representable products ((1-0.95)*100 = 5
    // up to float noise) do not round the rank up a slot.
    const double target = (1.0 - gamma) * static_cast<double>(dist.n());
    int rank = static_cast<int>(std::ceil(target - 1e-9));
    rank = std::max(rank, 1);
    return dist.values()[static_cast<size_t>(rank - 1)];
}

double ks_statistic(const RscDistribution& a, const RscDistribution& b) {
    const std::vector<double>& x = a.values();
    const std::vector<double>& y = b.values();
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());

    double d = 0.0;
    size_t i = 0, j = 0;
    while (i < x.size() && j < y.size()) {
        const double t = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= t) ++i;
        while (j < y.size() && y[j] <= t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return d;
}

Histogram histogram(const RscDistribution& dist, int bins) {
    if (bins < 1) throw ValidationError("histogram needs at least one bin");
    const double lo = dist.min(), hi = dist.max();
    const double width = (hi - lo) / static_cast<double>(bins);

    Histogram h;
    h.edges.resize(static_cast<size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b)
        h.edges[static_cast<size_t>(b)] = lo + width * static_cast<double>(b);
    h.edges.back() = hi;
    h.counts.assign(static_cast<size_t>(bins), 0);

    for (double v : dist.values()) {
        int idx = width > 0.0 ? static_cast<int>((v - lo) / width) : 0;
        idx = std::clamp(idx, 0, bins - 1);
        ++h.counts[static_cast<size_t>(idx)];
    }
    return h;
}

}  // namespace mgrsc
