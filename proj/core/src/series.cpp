#include "lindstedt/series.hpp"

#include <cstdio>

namespace lindstedt {

std::string dump_series(const FourierTaylorSeries& series) {
    std::string out;
    char buf[160];
    for (const auto& [key, v] : series.coeff) {
        for (int j = 0; j < series.dim; ++j) {
            std::string line = "k=" + std::to_string(key.first) + " nu=" + mode_str(key.second) +
                               " comp=" + std::to_string(j);
            std::snprintf(buf, sizeof(buf), " re=%.17g im=%.17g", v[j].real(), v[j].imag());
            out += line + buf + "\n";
        }
    }
    return out;
}

}  // namespace lindstedt
