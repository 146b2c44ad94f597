#ifndef RFSO_LINK_HPP
#define RFSO_LINK_HPP

// End-to-end SNDR of the fixed-gain AF link with aggregate hardware impairments.

#include "rfso/errors.hpp"
#include "rfso/fso_hop.hpp"
#include "rfso/rf_hop.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rfso {

struct ImpairmentProfile {
    double kappa1 = 0.0; ///< source impairment level
    double kappa2 = 0.0; ///< relay impairment level

    /// Aggregate distortion delta = k1^2 + k2^2 + k1^2 k2^2.
    double delta() const {
        const double a = kappa1 * kappa1, b = kappa2 * kappa2;
        return a + b + a * b;
    }

    bool ideal() const { return kappa1 == 0.0 && kappa2 == 0.0; }

    void validate() const {
        std::ostringstream msg;
        if (!(kappa1 >= 0.0) || !std::isfinite(kappa1)) msg << "impairments.kappa1: must be >= 0; ";
        if (!(kappa2 >= 0.0) || !std::isfinite(kappa2)) msg << "impairments.kappa2: must be >= 0; ";
        const auto text = msg.str();
        if (!text.empty()) throw ConfigInvalid(text);
    }
};

struct LinkConfig {
    RfHopConfig rf;
    OpticalHopConfig optical;
    ImpairmentProfile impairments;

    double detection_constant() const { return rfso::detection_constant(optical.detection); }

    void validate() const {
        // Collect every block's complaints before throwing.
        std::string text;
        try {
            rf.validate();
        } catch (const ConfigInvalid& e) {
            text += e.what();
        }
        try {
            optical.validate();
        } catch (const ConfigInvalid& e) {
            text += e.what();
        }
        try {
            impairments.validate();
        } catch (const ConfigInvalid& e) {
            text += e.what();
        }
        if (!text.empty()) throw ConfigInvalid(text);
    }
};

/// Fixed relay gain constant C = E[gamma_1(m)] (1 + kappa1^2) + 1.
inline double gain_constant(const LinkConfig& cfg) {
    const double k1 = cfg.impairments.kappa1;
    return rf_mean(cfg.rf) * (1.0 + k1 * k1) + 1.0;
}

/// gamma1 gamma2 / (delta gamma1 gamma2 + (1 + kappa2^2) gamma2 + C).
inline double sndr(double gamma1, double gamma2, const ImpairmentProfile& imp, double C) {
    const double prod = gamma1 * gamma2;
    const double k2 = imp.kappa2;
    return prod / (imp.delta() * prod + (1.0 + k2 * k2) * gamma2 + C);
}

/// Ideal-hardware end-to-end SNR gamma1 gamma2 / (gamma2 + E[gamma1] + 1).
inline double snr_ideal(double gamma1, double gamma2, double mean_gamma1) {
    return gamma1 * gamma2 / (gamma2 + mean_gamma1 + 1.0);
}

/// gamma* = 1/delta.
inline double sndr_ceiling(const ImpairmentProfile& imp) {
    const double d = imp.delta();
    if (d == 0.0) throw InfiniteCeiling("sndr_ceiling: ideal hardware has no SNDR ceiling");
    return 1.0 / d;
}

/// C* = log2(1 + c/delta).
inline double capacity_ceiling(const ImpairmentProfile& imp, Detection detection) {
    return std::log2(1.0 + rfso::detection_constant(detection) * sndr_ceiling(imp));
}

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

} // namespace rfso

#endif // RFSO_LINK_HPP
