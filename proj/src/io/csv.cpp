#include "cavityflow/io/csv.hpp"

#include <cmath>
#include <cstdio>

namespace cavityflow {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

TrajectoryCsv::TrajectoryCsv(std::ostream& out) : out_(out) {
    out_ << "t,cnorm,a1,a2,a3,E,Imom,dissip,eresid\n";
}

void TrajectoryCsv::write(const TrajectorySample& s) {
    out_ << format_double(s.t) << ',' << format_double(s.c_norm) << ',' << format_double(s.a(0))
         << ',' << format_double(s.a(1)) << ',' << format_double(s.a(2)) << ','
         << format_double(s.energy) << ',' << format_double(s.momentum_norm) << ','
         << format_double(s.dissipation) << ',' << format_double(s.identity_residual) << '\n';
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& value,
                   double tail_fraction) {
    if (t.size() != value.size()) throw NumericalError("fit_decay: series length mismatch");
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
        throw NumericalError("fit_decay: tail_fraction must be in (0,1)");
    const std::size_t n = t.size();
    const std::size_t window = std::max<std::size_t>(
        static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n))), 1);
    if (window < 10) throw NumericalError("fit_decay: need at least 10 samples in the tail window");
    const std::size_t begin = n - window;

    double st = 0.0, sy = 0.0;
    for (std::size_t i = begin; i < n; ++i) {
        if (!(value[i] > 0.0))
            throw NumericalError("fit_decay: nonpositive value in the fit window");
        st += t[i];
        sy += std::log(value[i]);
    }
    const double mt = st / static_cast<double>(window);
    const double my = sy / static_cast<double>(window);
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t i = begin; i < n; ++i) {
        const double dt = t[i] - mt;
        const double dy = std::log(value[i]) - my;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if (!(stt > 0.0)) throw NumericalError("fit_decay: degenerate time window");

    DecayFit fit;
    const double slope = sty / stt;
    fit.rate = -slope;
    const double ss_res = syy - slope * sty;
    fit.r_squared = syy > 0.0 ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
    return fit;
}

} // namespace cavityflow
