#include "hashprompt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hashprompt/error.hpp"

namespace hashprompt::stats {

bool ContingencyTable2x2::degenerate() const noexcept {
    return a + b == 0 || c + d == 0 || a + c == 0 || b + d == 0;
}

namespace {

ChiSquare chi_square(const ContingencyTable2x2& t, double correction) {
    if (t.degenerate()) throw DegenerateTable();
    const double n = static_cast<double>(t.n());
    const double r0 = static_cast<double>(t.a + t.b), r1 = static_cast<double>(t.c + t.d);
    const double c0 = static_cast<double>(t.a + t.c), c1 = static_cast<double>(t.b + t.d);
    const double observed[4] = {double(t.a), double(t.b), double(t.c), double(t.d)};
    const double expected[4] = {r0 * c0 / n, r0 * c1 / n, r1 * c0 / n, r1 * c1 / n};
    double chi2 = 0;
    for (int i = 0; i < 4; ++i) {
        double dev = std::max(std::abs(observed[i] - expected[i]) - correction, 0.0);
        chi2 += dev * dev / expected[i];
    }
    return {chi2, chi2_upper_tail_df1(chi2)};
}

double log_factorial(std::uint64_t k) { return std::lgamma(static_cast<double>(k) + 1.0); }

}  // namespace

double chi2_upper_tail_df1(double chi2) { return chi2 <= 0 ? 1.0 : std::erfc(std::sqrt(chi2 / 2.0)); }

ChiSquare chi_square_corrected(const ContingencyTable2x2& t) { return chi_square(t, 0.5); }

ChiSquare chi_square_uncorrected(const ContingencyTable2x2& t) { return chi_square(t, 0.0); }

double fisher_exact(const ContingencyTable2x2& t) {
    if (t.degenerate()) return 1.0;
    const std::uint64_t r0 = t.a + t.b, r1 = t.c + t.d, c0 = t.a + t.c, n = t.n();
    const double fixed = log_factorial(r0) + log_factorial(r1) + log_factorial(c0) + log_factorial(n - c0) -
                         log_factorial(n);
    // Table determined by its top-left cell x, with the margins held fixed.
    auto log_p = [&](std::uint64_t x) {
        return fixed - log_factorial(x) - log_factorial(r0 - x) - log_factorial(c0 - x) -
               log_factorial(r1 + x - c0);
    };
    const std::uint64_t lo = c0 > r1 ? c0 - r1 : 0, hi = std::min(r0, c0);
    const double observed = log_p(t.a);
    const double threshold = observed + std::log1p(1e-12);
    double p = 0;
    for (std::uint64_t x = lo; x <= hi; ++x) {
        double lp = log_p(x);
        if (lp <= threshold) p += std::exp(lp);
    }
    return std::min(p, 1.0);
}

std::string_view to_string(Interpretation i) {
    switch (i) {
        case Interpretation::Small: return "small";
        case Interpretation::Medium: return "medium";
        case Interpretation::Large: return "large";
    }
    return "?";
}

Interpretation interpret(double v) {
    if (v <= 0.10) return Interpretation::Small;
    if (v <= 0.30) return Interpretation::Medium;
    return Interpretation::Large;
}

EffectSize cramers_v(double chi2, std::uint64_t n) {
    if (n == 0 || chi2 <= 0) return {0.0, Interpretation::Small};
    double v = std::min(std::sqrt(chi2 / static_cast<double>(n)), 1.0);
    return {v, interpret(v)};
}

TestBattery run_battery(const ContingencyTable2x2& t) {
    TestBattery out;
    out.table = t;
    out.fisher_p = fisher_exact(t);
    out.degenerate = t.degenerate();
    if (!out.degenerate) {
        out.chi_square = chi_square_corrected(t);
        out.effect = cramers_v(out.chi_square->chi2, t.n());
    }
    return out;
}

std::string format_sig(double x, int digits) {
    char buf[64];
    if (x != 0 && std::abs(x) < 1e-4)
        std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
    else
        std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

}  // namespace hashprompt::stats
