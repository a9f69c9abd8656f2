#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hashprompt::stats {

/// Rows are conditions, columns are outcomes (correct/wrong, found/not found).
///   | a b |
///   | c d |
struct ContingencyTable2x2 {
    std::uint64_t a = 0, b = 0, c = 0, d = 0;

    std::uint64_t n() const noexcept { return a + b + c + d; }
    /// True when any row or column sum is zero.
    bool degenerate() const noexcept;
    ContingencyTable2x2 swap_rows() const noexcept { return {c, d, a, b}; }
    ContingencyTable2x2 swap_columns() const noexcept { return {b, a, d, c}; }
    bool operator==(const ContingencyTable2x2&) const = default;
};

struct ChiSquare {
    double chi2 = 0;
    double p = 1;  ///< upper tail, 1 degree of freedom
};

/// Yates-corrected statistic: sum of max(|O-E| - 0.5, 0)^2 / E. Throws DegenerateTable.
ChiSquare chi_square_corrected(const ContingencyTable2x2& t);

/// Pearson statistic without correction. Throws DegenerateTable.
ChiSquare chi_square_uncorrected(const ContingencyTable2x2& t);

/// Upper tail of chi-square with one degree of freedom: erfc(sqrt(x / 2)).
double chi2_upper_tail_df1(double chi2);

/// Two-sided Fisher: sum of the hypergeometric probabilities of every table with
/// the observed margins that is no more probable than the observed one (relative
/// tolerance 1e-12). A degenerate table has p = 1.
double fisher_exact(const ContingencyTable2x2& t);

enum class Interpretation { Small, Medium, Large };

std::string_view to_string(Interpretation i);

/// V <= 0.10 small, V <= 0.30 medium, otherwise large.
Interpretation interpret(double cramers_v);

struct EffectSize {
    double cramers_v = 0;
    Interpretation interpretation = Interpretation::Small;
};

/// V = sqrt(chi2 / n). For 2x2 tables min(rows, cols) - 1 = 1.
EffectSize cramers_v(double chi2, std::uint64_t n);

/// Everything reported for one pairing. Degenerate tables carry only the Fisher p.
struct TestBattery {
    ContingencyTable2x2 table;
    bool degenerate = false;
    std::optional<ChiSquare> chi_square;
    double fisher_p = 1;
    std::optional<EffectSize> effect;
};

TestBattery run_battery(const ContingencyTable2x2& t);

/// `x` rounded to `digits` significant digits, scientific notation below 1e-4.
std::string format_sig(double x, int digits = 4);

}  // namespace hashprompt::stats
