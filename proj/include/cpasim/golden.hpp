#ifndef CPASIM_GOLDEN_HPP
#define CPASIM_GOLDEN_HPP

#include <cmath>
#include <functional>

namespace cpasim {

struct GoldenResult {
    double x;
    double value;
};

/// Golden-section minimization on [a, b]. Runs until the bracket is shorter
/// than xtol. Assumes f is unimodal on the bracket.
inline GoldenResult golden_section_minimize(const std::function<double(double)>& f,
                                            double a, double b, double xtol,
                                            int max_iterations = 200) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < max_iterations && (b - a) > xtol; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return GoldenResult{x, f(x)};
}

} // namespace cpasim

#endif
