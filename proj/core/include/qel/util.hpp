#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qel {

// Shortest round-trip decimal form of a double (std::to_chars).
std::string fmt_double(double x);

// FNV-1a 64-bit content digest, hex-encoded.
std::string digest_hex(const std::string& bytes);

// Gauss-Legendre abscissae on (0,1), n in {1..5} plus equally spaced
// fallback (endpoints excluded) for larger n.
std::vector<double> gauss_nodes01(int n);

// Equally spaced sample points on [0,1] including both endpoints (k >= 2);
// k == 1 gives the midpoint.
std::vector<double> sample_nodes01(int k);

}  // namespace qel
