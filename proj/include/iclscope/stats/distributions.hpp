#pragma once

namespace iclscope::stats {

double normal_cdf(double x);
double normal_sf(double x);

// Student t with real-valued degrees of freedom.
double student_t_cdf(double t, double df);

// Survival function of the F distribution, P(F > f).
double f_sf(double f, double df1, double df2);
double f_cdf(double f, double df1, double df2);

// Limiting Kolmogorov distribution of sqrt(n) * D_n.
double kolmogorov_cdf(double lambda);
double kolmogorov_sf(double lambda);

}  // namespace iclscope::stats
