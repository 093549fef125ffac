#pragma once

namespace chatpc::stats {

// P(Binomial(m, 1/2) >= k). Returns 1 for k <= 0 and 0 for k > m.
double binomial_half_upper_tail(int m, int k);

// One-sided upper tail of the standard normal, P(Z >= z).
double normal_upper_tail(double z);

// Upper tail of the chi-square distribution with `dof` degrees of freedom.
// dof == 0 degenerates to a point mass at zero: returns 1 for x <= 0, else 0.
double chi_square_upper_tail(double x, int dof);

}  // namespace chatpc::stats
