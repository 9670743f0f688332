#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "mgrsc/distribution.hpp"
#include "mgrsc/errors.hpp"
#include "mgrsc/rng.hpp"

using namespace mgrsc;

namespace {

RscDistribution make_dist(std::vector<double> v) {
    return RscDistribution(std::move(v), RscDistribution::Provenance::PCE_SURROGATE);
}

std::vector<double> ramp(int n, double lo, double hi) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    return v;
}

// Quadratic-time reference: sup over both samples' points of the empirical
// CDF difference.
double ks_brute(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pts = a;
    pts.insert(pts.end(), b.begin(), b.end());
    double worst = 0.0;
    for (double t : pts) {
        const auto cdf = [t](const std::vector<double>& v) {
            double c = 0.0;
            for (double x : v) c += (x <= t) ? 1.0 : 0.0;
            return c / static_cast<double>(v.size());
        };
        worst = std::max(worst, std::abs(cdf(a) - cdf(b)));
    }
    return worst;
}

}  // namespace

TEST_CASE("construction sorts the values and screens bad input") {
    const RscDistribution d = make_dist({3.0, 1.0, 2.0});
    CHECK(d.values() == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(d.n() == 3);
    CHECK(d.min() == 1.0);
    CHECK(d.max() == 3.0);
    CHECK(d.mean() == doctest::Approx(2.0));
    CHECK(d.variance() == doctest::Approx(2.0 / 3.0));  // population variance
    CHECK(d.provenance() == RscDistribution::Provenance::PCE_SURROGATE);

    CHECK_THROWS_AS(make_dist({}), ValidationError);
    CHECK_THROWS_AS(make_dist({1.0, std::nan("")}), ValidationError);
    CHECK_THROWS_AS(make_dist({1.0, std::numeric_limits<double>::infinity()}),
                    ValidationError);
}

TEST_CASE("the confidence level picks the documented order statistic") {
    // 100 values 1..100: gamma 0.95 -> rank ceil(0.05 * 100) = 5 -> value 5.
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    const RscDistribution d = make_dist(v);
    CHECK(confidence_rsc(d, 0.95) == doctest::Approx(5.0));
    // gamma 0.99 -> rank ceil(1) = 1 -> the minimum.
    CHECK(confidence_rsc(d, 0.99) == doctest::Approx(1.0));
    CHECK(confidence_rsc(d, 0.999) == doctest::Approx(1.0));  // rank floor of 1
    // gamma 0.5 -> rank 50.
    CHECK(confidence_rsc(d, 0.5) == doctest::Approx(50.0));

    // The 1e-9 guard keeps exact products from rounding up a rank.
    std::vector<double> w(200);
    std::iota(w.begin(), w.end(), 1.0);
    CHECK(confidence_rsc(make_dist(w), 0.95) == doctest::Approx(10.0));

    CHECK_THROWS_AS(confidence_rsc(make_dist(ramp(99, 0.0, 1.0)), 0.95),
                    ValidationError);
    CHECK_THROWS_AS(confidence_rsc(d, 0.0), ValidationError);
    CHECK_THROWS_AS(confidence_rsc(d, 1.0), ValidationError);
}

TEST_CASE("the confidence level is monotone in gamma") {
    Rng rng = Rng::split(3, "dist-test", 0);
    std::vector<double> v(500);
    for (double& x : v) x = rng.normal(5.0, 2.0);
    const RscDistribution d = make_dist(v);
    // Higher confidence never raises the supportable ramp.
    double prev = std::numeric_limits<double>::infinity();
    for (double gamma : {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99}) {
        const double q = confidence_rsc(d, gamma);
        CHECK(q <= prev);
        prev = q;
    }
}

TEST_CASE("KS distance: identical, disjoint, and hand-computed cases") {
    const RscDistribution a = make_dist(ramp(120, 0.0, 1.0));
    CHECK(ks_statistic(a, a) == doctest::Approx(0.0));

    const RscDistribution lo = make_dist(ramp(100, 0.0, 1.0));
    const RscDistribution hi = make_dist(ramp(100, 5.0, 6.0));
    CHECK(ks_statistic(lo, hi) == doctest::Approx(1.0));

    // {1,2,3} vs {2,3,4}: the sup gap is 1/3 (at t in [1,2) and [3,4)).
    const RscDistribution x = make_dist({1.0, 2.0, 3.0});
    const RscDistribution y = make_dist({2.0, 3.0, 4.0});
    CHECK(ks_statistic(x, y) == doctest::Approx(1.0 / 3.0));
    CHECK(ks_statistic(y, x) == doctest::Approx(ks_statistic(x, y)));  // symmetric

    // Duplicated values still count with their multiplicity.
    const RscDistribution t1 = make_dist({1.0, 1.0, 1.0, 2.0});
    const RscDistribution t2 = make_dist({1.0, 2.0, 2.0, 2.0});
    CHECK(ks_statistic(t1, t2) == doctest::Approx(0.5));
}

TEST_CASE("KS distance matches a quadratic-time reference on random data") {
    Rng rng = Rng::split(9, "dist-test", 1);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> a(151), b(211);
        for (double& x : a) x = rng.normal(0.0, 1.0);
        for (double& x : b) x = rng.normal(0.2, 1.3);
        // Inject ties across the two samples.
        b[0] = a[0];
        b[1] = a[1];
        const double fast = ks_statistic(make_dist(a), make_dist(b));
        CHECK(fast == doctest::Approx(ks_brute(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("histograms cover the range with equal-width bins") {
    const RscDistribution d = make_dist({0.0, 0.1, 0.5, 0.9, 1.0, 1.0});
    const Histogram h = histogram(d, 4);
    REQUIRE(h.edges.size() == 5);
    REQUIRE(h.counts.size() == 4);
    CHECK(h.edges.front() == doctest::Approx(0.0));
    CHECK(h.edges.back() == doctest::Approx(1.0));
    for (size_t i = 1; i < h.edges.size(); ++i)
        CHECK(h.edges[i] - h.edges[i - 1] == doctest::Approx(0.25));
    CHECK(std::accumulate(h.counts.begin(), h.counts.end(), 0) == d.n());
    // Maxima land in the last bin, not past it.
    CHECK(h.counts[3] == 3);  // 0.9, 1.0, 1.0
    CHECK(h.counts[0] == 2);  // 0.0, 0.1
    CHECK(h.counts[1] == 0);
    CHECK(h.counts[2] == 1);  // 0.5 sits on the edge and rolls upward

    CHECK_THROWS_AS(histogram(d, 0), ValidationError);
    CHECK_THROWS_AS(histogram(d, -3), ValidationError);
}

TEST_CASE("a zero-width distribution puts everything in the first bin") {
    const RscDistribution d = make_dist({2.5, 2.5, 2.5});
    const Histogram h = histogram(d, 3);
    CHECK(h.counts[0] == 3);
    CHECK(h.counts[1] == 0);
    CHECK(h.counts[2] == 0);
    CHECK(std::accumulate(h.counts.begin(), h.counts.end(), 0) == 3);
}
