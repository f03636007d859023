#include "qel/util.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace qel {

std::string fmt_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string digest_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    static const char* hexd = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = hexd[h & 0xf];
        h >>= 4;
    }
    return out;
}

std::vector<double> gauss_nodes01(int n) {
    if (n < 1) throw std::invalid_argument("gauss_nodes01: n < 1");
    // abscissae on (-1,1), mapped to (0,1)
    std::vector<double> t;
    switch (n) {
        case 1: t = {0.0}; break;
        case 2: t = {-0.5773502691896257, 0.5773502691896257}; break;
        case 3: t = {-0.7745966692414834, 0.0, 0.7745966692414834}; break;
        case 4:
            t = {-0.8611363115940526, -0.3399810435848563,
                 0.3399810435848563, 0.8611363115940526};
            break;
        case 5:
            t = {-0.9061798459386640, -0.5384693101056831, 0.0,
                 0.5384693101056831, 0.9061798459386640};
            break;
        default: {
            t.resize(n);
            for (int i = 0; i < n; ++i) t[i] = -1.0 + 2.0 * (i + 0.5) / n;
        }
    }
    std::vector<double> out(t.size());
    for (size_t i = 0; i < t.size(); ++i) out[i] = 0.5 * (t[i] + 1.0);
    return out;
}

std::vector<double> sample_nodes01(int k) {
    if (k < 1) throw std::invalid_argument("sample_nodes01: k < 1");
    if (k == 1) return {0.5};
    std::vector<double> out(k);
    for (int i = 0; i < k; ++i) out[i] = double(i) / double(k - 1);
    return out;
}

}  // namespace qel
