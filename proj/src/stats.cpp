#include "chatpc/stats.hpp"

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_errno.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chatpc::stats {

namespace {
// GSL aborts by default; turn its errors into exceptions once.
const bool gsl_handler_disabled = [] {
    gsl_set_error_handler_off();
    return true;
}();
}  // namespace

double binomial_half_upper_tail(int m, int k) {
    if (m < 0) throw std::invalid_argument("binomial_half_upper_tail: m < 0");
    if (k <= 0) return 1.0;
    if (k > m) return 0.0;
    if (m <= 62) {
        // Integer-exact tail: sum of C(m, i) fits in 64 bits up to m = 62.
        // Keeps boundary values (such as exactly 1/2 at a bare majority)
        // free of CDF round-off.
        unsigned long long c = 1;  // C(m, k), built incrementally
        for (int j = 1; j <= k; ++j)
            c = static_cast<unsigned long long>(
                (static_cast<unsigned __int128>(c) * static_cast<unsigned>(m - k + j)) /
                static_cast<unsigned>(j));
        unsigned long long total = 0;
        for (int i = k; i <= m; ++i) {
            total += c;
            c = static_cast<unsigned long long>(
                (static_cast<unsigned __int128>(c) * static_cast<unsigned>(m - i)) /
                static_cast<unsigned>(i + 1));
        }
        return std::ldexp(static_cast<double>(total), -m);
    }
    // gsl_cdf_binomial_Q(j, p, n) = P(X > j)
    return gsl_cdf_binomial_Q(static_cast<unsigned>(k - 1), 0.5, static_cast<unsigned>(m));
}

double normal_upper_tail(double z) { return gsl_cdf_ugaussian_Q(z); }

double chi_square_upper_tail(double x, int dof) {
    if (dof < 0) throw std::invalid_argument("chi_square_upper_tail: dof < 0");
    if (dof == 0) return x <= 0.0 ? 1.0 : 0.0;
    if (x <= 0.0) return 1.0;
    return gsl_cdf_chisq_Q(x, static_cast<double>(dof));
}

}  // namespace chatpc::stats
