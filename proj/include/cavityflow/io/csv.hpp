#pragma once

#include "cavityflow/dynamics.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace cavityflow {

/// Locale-independent float with 17 significant digits (round-trip exact).
std::string format_double(double v);

/// Trajectory CSV with the fixed header t,cnorm,a1,a2,a3,E,Imom,dissip,eresid.
class TrajectoryCsv {
public:
    explicit TrajectoryCsv(std::ostream& out);
    void write(const TrajectorySample& s);

private:
    std::ostream& out_;
};

struct DecayFit {
    double rate = 0.0;      // positive = decay
    double r_squared = 1.0;
};

/// Least-squares line through (t, log value) over the trailing tail_fraction
/// of the series; the negated slope estimates the exponential decay rate.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& value,
                   double tail_fraction);

} // namespace cavityflow
