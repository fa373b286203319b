#pragma once

#include <array>
#include <span>
#include <string>

namespace cardiocausal {

struct MediationFit {
  std::array<std::string, 3> path;  // x, m, y
  double a_hat;           // slope of m on x
  double se_a;
  double b_hat;           // slope of y on m, adjusting for x
  double se_b;
  double direct_effect;   // slope of y on x, adjusting for m
  double indirect_effect; // a_hat * b_hat
  double sobel_z;
  double sobel_p;         // two-sided
};

/// Least-squares fits m ~ x and y ~ m + x with the first-order Sobel test of
/// a * b. Needs n >= 10, non-constant x, and m not collinear with x.
/// When both a and b are exactly zero the test is reported as z = 0, p = 1.
MediationFit mediation_fit(std::span<const double> x, std::span<const double> m, std::span<const double> y,
                           std::array<std::string, 3> path = {"x", "m", "y"});

/// Two-sided standard-normal tail probability of |z|.
double sobel_p_value(double z);

}  // namespace cardiocausal
