#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pq/error.hpp"

namespace pq {

/// One parallel-LC block of a first-form Foster network. The block resonance
/// omega is a zero of the network admittance.
struct FosterMode {
    double omega = 0.0;        // rad/s
    double capacitance = 0.0;  // F
    double inductance = 0.0;   // H, always 1 / (omega^2 C)

    static FosterMode from_omega_c(double omega, double capacitance) {
        return {omega, capacitance, 1.0 / (omega * omega * capacitance)};
    }
};

/// Static capacitance C_0 in series with parallel-LC blocks. A zero C_0 marks
/// the block as absent (black-box form, where the junction inductance closes
/// the DC path instead).
struct FosterNetwork {
    double c0 = 0.0;
    std::vector<FosterMode> modes;

    bool has_c0() const { return c0 > 0.0; }

    void validate() const {
        if (!(c0 >= 0.0) || !std::isfinite(c0)) throw ConfigError("FosterNetwork: c0 must be finite and >= 0");
        if (c0 == 0.0 && modes.empty()) throw ConfigError("FosterNetwork: degenerate network (no C0 and no modes)");
        for (std::size_t k = 0; k < modes.size(); ++k) {
            const auto& m = modes[k];
            if (!(m.omega > 0.0) || !(m.capacitance > 0.0) || !std::isfinite(m.omega) || !std::isfinite(m.capacitance))
                throw ConfigError("FosterNetwork: mode " + std::to_string(k) + " needs omega > 0 and C > 0");
            if (k > 0 && !(m.omega > modes[k - 1].omega))
                throw ConfigError("FosterNetwork: modes must be strictly ascending in omega");
        }
    }

    void sort_modes() {
        std::sort(modes.begin(), modes.end(), [](const auto& a, const auto& b) { return a.omega < b.omega; });
    }
};

}  // namespace pq
