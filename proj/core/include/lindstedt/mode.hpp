#pragma once

#include <cstdlib>
#include <string>
#include <vector>

namespace lindstedt {

// Fourier mode label: an integer vector indexed by the rotation angles.
using Mode = std::vector<int>;

inline int norm1(const Mode& nu) {
    int s = 0;
    for (int c : nu) s += std::abs(c);
    return s;
}

inline bool is_zero(const Mode& nu) {
    for (int c : nu)
        if (c != 0) return false;
    return true;
}

inline Mode mode_add(const Mode& a, const Mode& b) {
    Mode out(a);
    for (size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

inline Mode mode_neg(const Mode& a) {
    Mode out(a);
    for (int& c : out) c = -c;
    return out;
}

template <class R>
R mode_dot(const std::vector<R>& w, const Mode& nu) {
    R s = 0;
    for (size_t i = 0; i < nu.size(); ++i) s += w[i] * static_cast<R>(nu[i]);
    return s;
}

inline std::string mode_str(const Mode& nu) {
    std::string s = "(";
    for (size_t i = 0; i < nu.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(nu[i]);
    }
    s += ")";
    return s;
}

}  // namespace lindstedt
