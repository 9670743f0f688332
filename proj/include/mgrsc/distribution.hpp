#pragma once

#include <vector>

namespace mgrsc {

// Empirical distribution of the assessed ramping support capability. Values
// are stored sorted ascending; construction rejects non-finite entries.
class RscDistribution {
public:
    enum class Provenance { PCE_SURROGATE, MCS_ORACLE };

    // Empty placeholder; every statistic requires a populated distribution.
    RscDistribution() = default;
    RscDistribution(std::vector<double> values, Provenance provenance);

    const std::vector<double>& values() const { return values_; }
    int n() const { return static_cast<int>(values_.size()); }
    Provenance provenance() const { return provenance_; }

    double min() const { return values_.front(); }
    double max() const { return values_.back(); }
    double mean() const;
    double variance() const;  // population variance

private:
    std::vector<double> values_;
    Provenance provenance_ = Provenance::PCE_SURROGATE;
};

// Largest value v with P(RSC > v) >= gamma empirically: the lower order
// statistic at rank ceil((1-gamma) * n). Requires n >= 100.
double confidence_rsc(const RscDistribution& dist, double gamma);

// Two-sample Kolmogorov-Smirnov sup-distance between empirical CDFs.
double ks_statistic(const RscDistribution& a, const RscDistribution& b);

struct Histogram {
    std::vector<double> edges;  // bins+1 ascending edges spanning [min, max]
    std::vector<int> counts;    // per bin; sums to n
};

Histogram histogram(const RscDistribution& dist, int bins);

}  // namespace mgrsc
