#include "sicmag/rates.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sicmag {

bool LevelScheme::is_ground(int i) const {
    return std::find(ground.begin(), ground.end(), i) != ground.end();
}

void LevelScheme::validate() const {
    std::vector<bool> seen(n_levels, false);
    auto mark = [&](const std::vector<int>& idx) {
        for (int i : idx) {
            if (i < 0 || i >= n_levels)
                throw std::invalid_argument("LevelScheme: index out of range");
            if (seen[i]) throw std::invalid_argument("LevelScheme: index sets overlap");
            seen[i] = true;
        }
    };
    mark(ground);
    mark(excited);
    mark(metastable);
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw std::invalid_argument("LevelScheme: index sets do not cover all levels");
    if (ground.size() != 4)
        throw std::invalid_argument("LevelScheme: ground block must hold the 4 spin states");
}

std::vector<RateEntry> RateSet::active(double laser_power_w) const {
    std::vector<RateEntry> out;
    out.reserve(entries.size());
    const bool laser_on = laser_power_w > 0.0;
    for (const RateEntry& e : entries) {
        if (e.laser_dependent) {
            if (!laser_on) continue;
            RateEntry scaled = e;
            scaled.rate_per_s = e.rate_per_s * laser_power_w / nominal_power_w;
            out.push_back(scaled);
        } else {
            out.push_back(e);
        }
    }
    return out;
}

void RateSet::validate(const LevelScheme& scheme) const {
    if (nominal_power_w <= 0.0)
        throw std::invalid_argument("RateSet: nominal_power_w must be > 0");
    for (const RateEntry& e : entries) {
        if (e.from == e.to)
            throw std::invalid_argument("RateSet: self-transition at level " +
                                        std::to_string(e.from));
        if (e.rate_per_s < 0.0) throw std::invalid_argument("RateSet: negative rate");
        if (e.from < 0 || e.from >= scheme.n_levels || e.to < 0 || e.to >= scheme.n_levels)
            throw std::invalid_argument("RateSet: level index out of range");
    }
}

RateSet RateSet::v2_default(const LevelScheme& scheme) {
    scheme.validate();
    const auto& g = scheme.ground;
    const auto& e = scheme.excited;
    const auto& s = scheme.metastable;
    if (e.size() != 4 || s.size() != 2)
        throw std::invalid_argument("RateSet::v2_default requires the 4+4+2 partition");

    constexpr double pump = 1.0e6;
    constexpr double radiative = 1.6e8;
    constexpr double isc_32 = 2.0e7;
    constexpr double isc_12 = 1.0e7;
    constexpr double cascade = 5.0e7;
    constexpr double ret = 2.0e6;
    constexpr double branch_32 = 0.8;  // fraction of the return into m = +-3/2

    RateSet r;
    for (int m = 0; m < 4; ++m) {
        r.entries.push_back({g[m], e[m], pump, true});
        r.entries.push_back({e[m], g[m], radiative, false});
    }
    // ground ordering is (+3/2, +1/2, -1/2, -3/2): indices 0,3 are |m|=3/2
    r.entries.push_back({e[0], s[0], isc_32, false});
    r.entries.push_back({e[3], s[0], isc_32, false});
    r.entries.push_back({e[1], s[0], isc_12, false});
    r.entries.push_back({e[2], s[0], isc_12, false});
    r.entries.push_back({s[0], s[1], cascade, false});
    r.entries.push_back({s[1], g[0], ret * branch_32 / 2.0, false});
    r.entries.push_back({s[1], g[3], ret * branch_32 / 2.0, false});
    r.entries.push_back({s[1], g[1], ret * (1.0 - branch_32) / 2.0, false});
    r.entries.push_back({s[1], g[2], ret * (1.0 - branch_32) / 2.0, false});
    return r;
}

RelaxationParams alpha_beta_from_times(double t1_s, double t2_s) {
    if (t1_s <= 0.0 || t2_s <= 0.0)
        throw std::invalid_argument("alpha_beta_from_times: T1 and T2 must be > 0");
    const double alpha = 1.0 / (3.0 * t1_s);
    const double beta = 1.0 / t2_s - 2.5 * alpha;
    if (beta < 0.0)
        throw std::invalid_argument(
            "alpha_beta_from_times: inconsistent (T1, T2) pair, 1/T2 < (5/2)/(3 T1)");
    return {alpha, beta};
}

}  // namespace sicmag
